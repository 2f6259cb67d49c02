//! The circle-bundle Maxwell model on a five-dimensional chart: action
//! functional (two independent integrand routes), Euler-Lagrange residuals,
//! an exact solution builder, Gateaux derivatives and the gauge-symmetry
//! catalog.
//!
//! Hot paths assemble the integrand once as a shared field expression; the
//! quadrature then evaluates a memoized DAG per node.

use crate::chart::Chart;
use crate::error::Error;
use crate::field::{EvalCtx, Field};
use crate::forms::{Basis, FormField};
use crate::frame::{flat_vierbein_rows, graded_volume_ff, kk_coframe_u1, CoFrame};
use crate::jet::Jet;
use crate::metric::ETA;
use crate::variational::quad::{chart_quadrature, pairwise_sum};

/// Fields of the Maxwell model: the one-form `theta`, momentum components
/// `pi^{ab}`, `pi^a` against the frame `(e^a, theta)`, and the fixed base
/// vierbein.
#[derive(Clone)]
pub struct MaxwellFields {
    pub chart: Chart,
    /// Base vierbein rows over the 5-dim chart (x-dependent).
    pub e_rows: Vec<Vec<Field>>,
    pub theta: FormField,
    pub pi_ab: Vec<Vec<Field>>,
    pub pi_a: Vec<Field>,
}

impl MaxwellFields {
    pub fn coframe(&self) -> CoFrame {
        let mut rows = Vec::with_capacity(5);
        for a in 0..4 {
            rows.push(self.e_rows[a].clone());
        }
        rows.push((0..5).map(|mu| self.theta.coeff(&[mu as u8])).collect());
        CoFrame::new(self.chart.clone(), rows, 4)
    }

    pub fn e_forms(&self) -> Vec<FormField> {
        (0..4)
            .map(|a| FormField::one_form(5, self.e_rows[a].clone()))
            .collect()
    }

    /// Assemble `pi = (1/2) pi^{ab} e2_{ab} ^ theta - pi^a e3_a`.
    pub fn pi_form(&self) -> FormField {
        let e = self.e_forms();
        let hor: Vec<usize> = (0..4).collect();
        let mut out = FormField::zero(5, 3);
        for a in 0..4 {
            for b in 0..4 {
                if self.pi_ab[a][b].as_const() == Some(0.0) {
                    continue;
                }
                let e2 = graded_volume_ff(&e, &hor, &[a, b]);
                out = out.add(&e2.wedge(&self.theta).mul_field(&self.pi_ab[a][b].scale(0.5)));
            }
        }
        for a in 0..4 {
            if self.pi_a[a].as_const() == Some(0.0) {
                continue;
            }
            let e3 = graded_volume_ff(&e, &hor, &[a]);
            out = out.sub(&e3.mul_field(&self.pi_a[a]));
        }
        out
    }
}

const TOP: [u8; 5] = [0, 1, 2, 3, 4];

/// Symbolic frame-extraction helpers shared by the action, residual and
/// pairing assemblies. All members are plain field expressions.
pub struct FrameExtract {
    pub e: Vec<FormField>,
    pub e4: FormField,
    pub e3: Vec<FormField>,
    pub e2: Vec<Vec<FormField>>,
    /// `(e4 ^ theta)` top coefficient.
    pub vol: Field,
    /// `Theta_{ab}` frame components of `d theta`.
    pub th_ab: Vec<Vec<Field>>,
    /// `Theta_a` mixed components of `d theta`.
    pub th_a: Vec<Field>,
    pub dtheta: FormField,
}

impl FrameExtract {
    pub fn new(e_rows: &[Vec<Field>], theta: &FormField) -> Self {
        let e: Vec<FormField> = (0..4)
            .map(|a| FormField::one_form(5, e_rows[a].clone()))
            .collect();
        let hor: Vec<usize> = (0..4).collect();
        let e4 = graded_volume_ff(&e, &hor, &[]);
        let e3: Vec<FormField> = (0..4).map(|a| graded_volume_ff(&e, &hor, &[a])).collect();
        let e2: Vec<Vec<FormField>> = (0..4)
            .map(|a| {
                (0..4)
                    .map(|b| graded_volume_ff(&e, &hor, &[a, b]))
                    .collect()
            })
            .collect();
        let vol = e4.wedge(theta).coeff(&TOP);
        let dtheta = theta.ext_d();
        let vinv = vol.recip();
        // Theta_{cd} = (d theta ^ e2_{cd} ^ theta)_top / vol
        let mut th_ab = vec![vec![Field::zero(); 4]; 4];
        for c in 0..4 {
            for d in (c + 1)..4 {
                let t = dtheta.wedge(&e2[c][d]).wedge(theta).coeff(&TOP).mul(&vinv);
                th_ab[c][d] = t.clone();
                th_ab[d][c] = t.neg();
            }
        }
        // Theta_a = -(d theta ^ e3_a)_top / vol
        let th_a: Vec<Field> = (0..4)
            .map(|a| dtheta.wedge(&e3[a]).coeff(&TOP).neg().mul(&vinv))
            .collect();
        FrameExtract {
            e,
            e4,
            e3,
            e2,
            vol,
            th_ab,
            th_a,
            dtheta,
        }
    }

    /// Extraction of `pi^{cd}` components of a 3-form against this frame.
    pub fn pi_ab_of(&self, pi: &FormField) -> Vec<Vec<Field>> {
        let vinv = self.vol.recip();
        let mut out = vec![vec![Field::zero(); 4]; 4];
        for c in 0..4 {
            for d in (c + 1)..4 {
                let t = self.e[c].wedge(&self.e[d]).wedge(pi).coeff(&TOP).mul(&vinv);
                out[c][d] = t.clone();
                out[d][c] = t.neg();
            }
        }
        out
    }
}

/// `|pi|^2 = (1/2) pi^{ab} pi_{ab}` as a field expression.
pub fn pi_norm2_field(pi_ab: &[Vec<Field>]) -> Field {
    let mut terms = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            terms.push(
                pi_ab[a][b]
                    .mul(&pi_ab[a][b])
                    .scale(0.5 * ETA[a] * ETA[b]),
            );
        }
    }
    Field::sum(terms)
}

/// The action integrand `(1/2)|pi|^2 e4 ^ theta + pi ^ d theta` as a single
/// top-coefficient field; components are re-extracted against the frame, so
/// the same assembly serves transformed raw forms.
pub fn action_integrand(e_rows: &[Vec<Field>], theta: &FormField, pi: &FormField) -> Field {
    let fx = FrameExtract::new(e_rows, theta);
    let pab = fx.pi_ab_of(pi);
    let n2 = pi_norm2_field(&pab);
    let t1 = n2.scale(0.5).mul(&fx.vol);
    let t2 = pi.wedge(&fx.dtheta).coeff(&TOP);
    t1.add(&t2)
}

fn integrate(chart: &Chart, integrand: &Field, n_box: usize, n_circle: usize, ord: usize) -> f64 {
    use rayon::prelude::*;
    let nodes = chart_quadrature(chart, n_box, n_circle);
    // node values are independent; the reduction order below is fixed, so
    // the result is bit-stable across thread counts
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|(z, w)| w * integrand.eval_at(z, ord).v)
        .collect();
    pairwise_sum(&vals)
}

/// Action by the compact route.
pub fn action_maxwell(f: &MaxwellFields, n_box: usize, n_circle: usize) -> Result<f64, Error> {
    let integrand = action_integrand(&f.e_rows, &f.theta, &f.pi_form());
    Ok(integrate(&f.chart, &integrand, n_box, n_circle, 1))
}

/// Independent route: the expanded integrand
/// `(1/4 pi^{ab} pi_{ab} + 1/2 Theta_{ab} pi^{ab} + Theta_a pi^a) e4 ^ theta`,
/// evaluated pointwise through the frame-component machinery.
pub fn action_maxwell_expanded(
    f: &MaxwellFields,
    n_box: usize,
    n_circle: usize,
) -> Result<f64, Error> {
    let nodes = chart_quadrature(&f.chart, n_box, n_circle);
    let frame = f.coframe();
    let dtheta = f.theta.ext_d();
    let e = f.e_forms();
    let hor: Vec<usize> = (0..4).collect();
    let e4 = graded_volume_ff(&e, &hor, &[]);
    let mut vals = Vec::with_capacity(nodes.len());
    for (z, w) in &nodes {
        if !f.chart.contains(z) {
            return Err(Error::input("quadrature node outside chart"));
        }
        let jets = Jet::seed(z, 1);
        let mut ctx = EvalCtx::new(&jets);
        let th = f.theta.eval(&mut ctx, Basis::Coordinate);
        let dth = dtheta.eval(&mut ctx, Basis::Coordinate);
        let e4v = e4.eval(&mut ctx, Basis::Coordinate);
        let fc = frame.frame_components(&dth, z)?;
        let mut integrand = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                let pab = f.pi_ab[a][b].eval(&mut ctx).v;
                let pi_low = ETA[a] * ETA[b] * pab;
                integrand += 0.25 * pab * pi_low;
                integrand += 0.5 * fc.coeff(&[a as u8, b as u8]) * pab;
            }
            integrand += fc.coeff(&[a as u8, 4]) * f.pi_a[a].eval(&mut ctx).v;
        }
        vals.push(w * integrand * e4v.wedge(&th)?.coeff(&TOP));
    }
    Ok(pairwise_sum(&vals))
}

/// Euler-Lagrange residual fields, assembled once per configuration:
/// `(a) Theta_a`, `(b) Theta_{ab} + pi_{ab}`,
/// `(c) d pi - (1/2)|pi|^2 e4` (coordinate components).
pub struct MaxwellElOperator {
    pub res_a: Vec<Field>,
    pub res_b: Vec<Field>,
    pub res_c: Vec<Field>,
}

pub struct MaxwellResidual {
    pub res_a: f64,
    pub res_b: f64,
    pub res_c: f64,
}

impl MaxwellElOperator {
    pub fn new(f: &MaxwellFields) -> Self {
        let fx = FrameExtract::new(&f.e_rows, &f.theta);
        let res_a = fx.th_a.clone();
        let mut res_b = Vec::new();
        for a in 0..4 {
            for b in (a + 1)..4 {
                let pi_low = f.pi_ab[a][b].scale(ETA[a] * ETA[b]);
                res_b.push(fx.th_ab[a][b].add(&pi_low));
            }
        }
        let n2 = pi_norm2_field(&f.pi_ab);
        let dpi = f.pi_form().ext_d();
        let mut res_c = Vec::new();
        for t in dpi.comps.keys() {
            let lhs = dpi.coeff(t);
            let rhs = fx.e4.coeff(t).mul(&n2.scale(0.5));
            res_c.push(lhs.sub(&rhs));
        }
        // e4 components absent from d pi still contribute
        for t in fx.e4.comps.keys() {
            if !dpi.comps.contains_key(t) {
                res_c.push(fx.e4.coeff(t).mul(&n2.scale(0.5)).neg());
            }
        }
        MaxwellElOperator {
            res_a,
            res_b,
            res_c,
        }
    }

    pub fn at(&self, z: &[f64]) -> MaxwellResidual {
        let jets = Jet::seed(z, 1);
        let mut ctx = EvalCtx::new(&jets);
        let eval_max = |fs: &[Field], ctx: &mut EvalCtx| {
            fs.iter()
                .fold(0.0_f64, |m, f| m.max(f.eval(ctx).v.abs()))
        };
        let res_a = eval_max(&self.res_a, &mut ctx);
        let res_b = eval_max(&self.res_b, &mut ctx);
        let res_c = eval_max(&self.res_c, &mut ctx);
        MaxwellResidual {
            res_a,
            res_b,
            res_c,
        }
    }
}

/// Exact solution: `theta = B x^0 dx^1 + ds` on the flat base, with the
/// momenta that solve the full system.
pub fn build_maxwell_solution(b: f64) -> MaxwellFields {
    let chart = Chart::base_with_circle(std::f64::consts::TAU);
    let e_rows = flat_vierbein_rows(5);
    let mut theta = FormField::zero(5, 1);
    theta.insert(&[1], Field::coord(0).scale(b));
    theta.insert(&[4], Field::one());
    // p^{ab} = -F^{ab}: F_{01} = B so F^{01} = -B and p^{01} = B
    let mut pi_ab = vec![vec![Field::zero(); 4]; 4];
    pi_ab[0][1] = Field::constant(b);
    pi_ab[1][0] = Field::constant(-b);
    // |F|^2 = -B^2; p^3 = (1/2) B^2 x^3; pi^a = p^a + p^{ab} A_b
    let mut pi_a = vec![Field::zero(); 4];
    pi_a[0] = Field::coord(0).scale(b * b);
    pi_a[3] = Field::coord(3).scale(0.5 * b * b);
    MaxwellFields {
        chart,
        e_rows,
        theta,
        pi_ab,
        pi_a,
    }
}

/// The raw coframe of the solution family (for fibration checks).
pub fn solution_coframe(b: f64) -> CoFrame {
    let chart = Chart::base_with_circle(std::f64::consts::TAU);
    let mut a_pot = vec![Field::zero(); 4];
    a_pot[1] = Field::coord(0).scale(b);
    kk_coframe_u1(chart, &flat_vierbein_rows(5), &a_pot).raw
}

/// Gauge transformations of the Maxwell model.
pub enum MaxwellTransform {
    /// Fibered diffeomorphism `T(x, y) = (x, f(x, y))`, acting by pullback.
    FiberedDiffeo { fiber_map: Field },
    /// `theta -> theta + dV` with `V = V(x)`.
    GaugeShift { v: Field },
    /// `pi -> pi + psi` with a 3-form `psi`.
    PiShift { psi: FormField },
}

/// `|A[transformed] - A[original]|` under a catalog transformation.
pub fn gauge_invariance_delta(
    f: &MaxwellFields,
    transform: &MaxwellTransform,
    n_box: usize,
    n_circle: usize,
) -> Result<f64, Error> {
    let theta = f.theta.clone();
    let pi = f.pi_form();
    let base = integrate(
        &f.chart,
        &action_integrand(&f.e_rows, &theta, &pi),
        n_box,
        n_circle,
        1,
    );
    let (theta2, pi2) = match transform {
        MaxwellTransform::FiberedDiffeo { fiber_map } => {
            let map = vec![
                Field::coord(0),
                Field::coord(1),
                Field::coord(2),
                Field::coord(3),
                fiber_map.clone(),
            ];
            (theta.pullback(&map, 5), pi.pullback(&map, 5))
        }
        MaxwellTransform::GaugeShift { v } => {
            let dv = FormField::scalar(5, v.clone()).ext_d();
            (theta.add(&dv), pi)
        }
        MaxwellTransform::PiShift { psi } => {
            if psi.degree != 3 {
                return Err(Error::precondition("pi shift must be a 3-form"));
            }
            (theta, pi.add(psi))
        }
    };
    // transformed coefficients may already carry one derivative level
    let new = integrate(
        &f.chart,
        &action_integrand(&f.e_rows, &theta2, &pi2),
        n_box,
        n_circle,
        2,
    );
    Ok((new - base).abs())
}

/// Residual of the closedness precondition of a candidate `psi` (sampled).
pub fn closedness_residual(psi: &FormField, chart: &Chart, samples: usize, seed: u64) -> f64 {
    let dpsi = psi.ext_d();
    let mut rng = Chart::rng(seed);
    let mut worst = 0.0_f64;
    for _ in 0..samples {
        let z = chart.sample(&mut rng);
        worst = worst.max(dpsi.max_abs_at(&z, 2));
    }
    worst
}

/// Variation directions for the Gateaux derivative: coefficient
/// perturbations of `(theta, pi^{ab}, pi^a)`.
#[derive(Clone)]
pub struct MaxwellVariation {
    pub dtheta: Vec<Field>,
    pub dpi_ab: Vec<Vec<Field>>,
    pub dpi_a: Vec<Field>,
}

impl MaxwellVariation {
    /// Seeded random variation, windowed to vanish on the box boundary.
    pub fn random(chart: &Chart, seed: u64) -> Self {
        let mut rng = Chart::rng(seed);
        let bump = chart.bump();
        let dtheta = (0..5)
            .map(|_| chart.random_field(&mut rng, 3).mul(&bump))
            .collect();
        let mut dpi_ab = vec![vec![Field::zero(); 4]; 4];
        for a in 0..4 {
            for b in (a + 1)..4 {
                let g = chart.random_field(&mut rng, 3).mul(&bump);
                dpi_ab[a][b] = g.clone();
                dpi_ab[b][a] = g.neg();
            }
        }
        let dpi_a = (0..4)
            .map(|_| chart.random_field(&mut rng, 3).mul(&bump))
            .collect();
        MaxwellVariation {
            dtheta,
            dpi_ab,
            dpi_a,
        }
    }
}

pub fn perturbed(f: &MaxwellFields, v: &MaxwellVariation, eps: f64) -> MaxwellFields {
    let mut g = f.clone();
    let mut theta = g.theta.clone();
    for mu in 0..5u8 {
        let d = v.dtheta[mu as usize].scale(eps);
        if d.as_const() != Some(0.0) {
            let mut add = FormField::zero(5, 1);
            add.insert(&[mu], d);
            theta = theta.add(&add);
        }
    }
    g.theta = theta;
    for a in 0..4 {
        for b in 0..4 {
            g.pi_ab[a][b] = g.pi_ab[a][b].add(&v.dpi_ab[a][b].scale(eps));
        }
        g.pi_a[a] = g.pi_a[a].add(&v.dpi_a[a].scale(eps));
    }
    g
}

/// Central-difference Gateaux derivative of the Maxwell action.
pub fn gateaux_maxwell(
    f: &MaxwellFields,
    v: &MaxwellVariation,
    eps: f64,
    n_box: usize,
    n_circle: usize,
) -> Result<f64, Error> {
    let ap = action_maxwell(&perturbed(f, v, eps), n_box, n_circle)?;
    let am = action_maxwell(&perturbed(f, v, -eps), n_box, n_circle)?;
    Ok((ap - am) / (2.0 * eps))
}

/// Analytic first variation `<EL residual, v>` including the full
/// theta-variation bracket (integration-by-parts form):
/// `dA = int Theta_a dpi^a (e4^theta) + (1/2)(pi_{ab} + Theta_{ab}) dpi^{ab}
///  (e4^theta) + [d pi + (1/2)|pi|^2 e4 + (1/2) pi^{ab} e2_{ab}^d theta] ^ dtheta`.
pub fn el_pairing_maxwell(
    f: &MaxwellFields,
    v: &MaxwellVariation,
    n_box: usize,
    n_circle: usize,
) -> Result<f64, Error> {
    let fx = FrameExtract::new(&f.e_rows, &f.theta);
    let n2 = pi_norm2_field(&f.pi_ab);
    let dpi = f.pi_form().ext_d();
    let dtheta_var = FormField::one_form(5, v.dtheta.clone());
    let mut pi_e2_dth = FormField::zero(5, 4);
    for a in 0..4 {
        for b in 0..4 {
            if f.pi_ab[a][b].as_const() == Some(0.0) {
                continue;
            }
            pi_e2_dth = pi_e2_dth.add(
                &fx.e2[a][b]
                    .wedge(&fx.dtheta)
                    .mul_field(&f.pi_ab[a][b].scale(0.5)),
            );
        }
    }
    let bracket = dpi
        .add(&fx.e4.mul_field(&n2.scale(0.5)))
        .add(&pi_e2_dth)
        .wedge(&dtheta_var)
        .coeff(&TOP);
    let mut terms = vec![bracket];
    for a in 0..4 {
        terms.push(fx.th_a[a].mul(&v.dpi_a[a]).mul(&fx.vol));
        for b in 0..4 {
            let pi_low = f.pi_ab[a][b].scale(ETA[a] * ETA[b]);
            terms.push(
                fx.th_ab[a][b]
                    .add(&pi_low)
                    .mul(&v.dpi_ab[a][b])
                    .scale(0.5)
                    .mul(&fx.vol),
            );
        }
    }
    let integrand = Field::sum(terms);
    Ok(integrate(&f.chart, &integrand, n_box, n_circle, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn trivial_vacuum_has_zero_action_and_residuals() {
        let f = build_maxwell_solution(0.0);
        assert_eq!(action_maxwell(&f, 4, 8).unwrap(), 0.0);
        let op = MaxwellElOperator::new(&f);
        let r = op.at(&[0.2, 0.1, -0.4, 0.3, 1.0]);
        assert_eq!(r.res_a.max(r.res_b).max(r.res_c), 0.0);
    }

    #[test]
    fn constant_pi_flat_theta_action_value() {
        // theta = ds, pi^{01} = 1, d theta = 0: action = -(1/2) vol
        let mut f = build_maxwell_solution(0.0);
        f.pi_ab[0][1] = Field::one();
        f.pi_ab[1][0] = Field::constant(-1.0);
        let vol = 16.0 * TAU;
        let a = action_maxwell(&f, 4, 8).unwrap();
        assert!((a + 0.5 * vol).abs() < 1e-10, "action {a}");
        let b = action_maxwell_expanded(&f, 4, 8).unwrap();
        assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn built_solution_has_small_residuals() {
        let f = build_maxwell_solution(0.7);
        let op = MaxwellElOperator::new(&f);
        let mut rng = Chart::rng(2);
        for _ in 0..50 {
            let z = f.chart.sample(&mut rng);
            let r = op.at(&z);
            assert!(r.res_a < 1e-12, "res_a {}", r.res_a);
            assert!(r.res_b < 1e-12, "res_b {}", r.res_b);
            assert!(r.res_c < 1e-12, "res_c {}", r.res_c);
        }
        let a1 = action_maxwell(&f, 6, 12).unwrap();
        let a2 = action_maxwell_expanded(&f, 6, 12).unwrap();
        assert!((a1 - a2).abs() < 1e-9, "{a1} vs {a2}");
    }

    #[test]
    fn off_shell_theta_detected() {
        // theta = y dx^0 + ds has a Theta_a component
        let mut f = build_maxwell_solution(0.0);
        let mut theta = FormField::zero(5, 1);
        theta.insert(&[0], Field::coord(4));
        theta.insert(&[4], Field::one());
        f.theta = theta;
        let op = MaxwellElOperator::new(&f);
        let r = op.at(&[0.1, 0.2, 0.3, 0.4, 1.0]);
        assert!(r.res_a > 0.5, "res_a {}", r.res_a);
    }

    #[test]
    fn gateaux_vanishes_on_shell() {
        let f = build_maxwell_solution(0.7);
        for seed in 0..3 {
            let v = MaxwellVariation::random(&f.chart, seed);
            let g = gateaux_maxwell(&f, &v, 1e-4, 8, 8).unwrap();
            assert!(g.abs() < 5e-6, "gateaux {g} at seed {seed}");
        }
    }

    #[test]
    fn gateaux_matches_pairing_off_shell() {
        let f = build_maxwell_solution(0.7);
        for seed in 0..3 {
            let p = MaxwellVariation::random(&f.chart, 1000 + seed);
            let off = perturbed(&f, &p, 0.1);
            let v = MaxwellVariation::random(&f.chart, 2000 + seed);
            let g = gateaux_maxwell(&off, &v, 1e-4, 8, 8).unwrap();
            let pairing = el_pairing_maxwell(&off, &v, 8, 8).unwrap();
            assert!(
                (g - pairing).abs() < 1e-5,
                "gateaux {g} vs pairing {pairing}"
            );
        }
    }

    #[test]
    fn gauge_deltas() {
        let f = build_maxwell_solution(0.7);
        let t = MaxwellTransform::FiberedDiffeo {
            fiber_map: Field::coord(4).add(&Field::coord(0).sin().scale(0.5)),
        };
        let d = gauge_invariance_delta(&f, &t, 8, 16).unwrap();
        assert!(d < 1e-7, "diffeo delta {d}");
        let t2 = MaxwellTransform::GaugeShift {
            v: Field::coord(0).mul(&Field::coord(2)).scale(0.3),
        };
        let d2 = gauge_invariance_delta(&f, &t2, 8, 8).unwrap();
        assert!(d2 < 1e-10, "gauge delta {d2}");
        // exact psi = d(compactly supported 2-form)
        let chart = f.chart.clone();
        let bump = chart.bump();
        let mut phi = FormField::zero(5, 2);
        phi.insert(&[0, 1], bump.mul(&Field::coord(2)));
        phi.insert(&[2, 3], bump.mul(&Field::coord(0).sin()));
        let psi = phi.ext_d();
        assert!(closedness_residual(&psi, &chart, 20, 5) < 1e-10);
        let d3 = gauge_invariance_delta(&f, &MaxwellTransform::PiShift { psi }, 8, 8).unwrap();
        assert!(d3 < 1e-8, "closed psi delta {d3}");
        // non-closed control on an off-shell configuration engineered so
        // that int psi ^ d theta = 0.6 int bump x3^2 is an O(0.1) number
        let mut off = f.clone();
        let mut bad_theta = FormField::zero(5, 1);
        bad_theta.insert(&[4], Field::coord(3).mul(&Field::coord(3)).scale(0.3));
        off.theta = off.theta.add(&bad_theta);
        let mut psi_bad = FormField::zero(5, 3);
        psi_bad.insert(&[0, 1, 2], bump.mul(&Field::coord(3)));
        assert!(closedness_residual(&psi_bad, &chart, 20, 6) > 1e-3);
        let d4 =
            gauge_invariance_delta(&off, &MaxwellTransform::PiShift { psi: psi_bad }, 8, 8)
                .unwrap();
        assert!(d4 > 1e-3, "non-closed psi delta {d4}");
    }
}
