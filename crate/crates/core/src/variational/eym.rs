//! The Einstein-Yang-Mills model in the dressed (reduced-frame)
//! representation: dynamical coframe components, an independent spin
//! connection, constrained momenta, the Einstein-Palatini action with a
//! bare cosmological constant, the four Euler-Lagrange residuals, the
//! vacuum solution builder, Gateaux derivatives, and the projected
//! equations on the base.
//!
//! Fields are frame-forms over the reference structure of a
//! [`ReducedFrame`]: index tuples refer to the dressed coframe
//! `(e^a, A^i + rho^i)`, coefficients are x-fields, and the exterior
//! derivative runs through the structure equations.

use crate::chart::Chart;
use crate::error::Error;
use crate::field::{EvalCtx, Field};
use crate::forms::{Basis, FormField, FormValue};
use crate::frame::graded_volume_ff;
use crate::jet::Jet;
use crate::lie::invert;
use crate::metric::ETA;
use crate::reduced::{lambda_effective, ReducedFrame};
use crate::variational::quad::{gauss_legendre, pairwise_sum, SU2_VOLUME};

/// Dynamical fields: coframe `theta^I`, connection `w^{IJ}` (antisymmetric,
/// both indices up), and the constrained momenta (`p_I^{ab}` vanishes).
#[derive(Clone)]
pub struct EYMFields {
    pub theta: Vec<FormField>,
    /// `w^{IJ}_K`, antisymmetric in `(I, J)`.
    pub w: Vec<Vec<Vec<Field>>>,
    /// `p_I^{ak}` with the horizontal slot first.
    pub p_mixed: Vec<Vec<Vec<Field>>>,
    /// `p_I^{jk}`, antisymmetric.
    pub p_vv: Vec<Vec<Vec<Field>>>,
    pub lambda0: f64,
}

impl EYMFields {
    /// Unified antisymmetric momentum component `p_I^{PQ}`.
    fn p_unified(&self, i: usize, p: usize, q: usize) -> Field {
        let split = 4;
        if p < split && q >= split {
            self.p_mixed[i][p][q - split].clone()
        } else if q < split && p >= split {
            self.p_mixed[i][q][p - split].neg()
        } else if p >= split && q >= split {
            self.p_vv[i][p - split][q - split].clone()
        } else {
            Field::zero()
        }
    }

    /// Momentum `(N-1)`-forms assembled against the current coframe.
    pub fn p_forms(&self, red: &ReducedFrame) -> Vec<FormField> {
        let n = red.n();
        let all: Vec<usize> = (0..n).collect();
        (0..n)
            .map(|i| {
                let mut p = FormField::zero(n, n - 2);
                for a in 0..n {
                    for b in (a + 1)..n {
                        let c = self.p_unified(i, a, b);
                        if c.as_const() != Some(0.0) {
                            let hat = graded_volume_ff(&self.theta, &all, &[a, b]);
                            p = p.add(&hat.mul_field(&c));
                        }
                    }
                }
                p
            })
            .collect()
    }

    /// Curvature two-forms `Phi^{IJ} = d w^{IJ} + w^I_K ^ w^{KJ}`.
    pub fn curvature_forms(&self, red: &ReducedFrame) -> Vec<Vec<FormField>> {
        let n = red.n();
        let h = &red.metric;
        let w_ff: Vec<Vec<FormField>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut f = FormField::zero(n, 1);
                        for k in 0..n {
                            f.insert(&[k as u8], self.w[i][j][k].clone());
                        }
                        f
                    })
                    .collect()
            })
            .collect();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            return FormField::zero(n, 2);
                        }
                        let mut phi = red.d_frame_form(&w_ff[i][j]);
                        for k in 0..n {
                            for m in 0..n {
                                let hkm = h.h(m, k);
                                if hkm != 0.0 {
                                    phi = phi.add(&w_ff[i][m].wedge(&w_ff[k][j]).scale(hkm));
                                }
                            }
                        }
                        phi
                    })
                    .collect()
            })
            .collect()
    }

    /// Dressed curvature-torsion forms: `E^a = d theta^a`,
    /// `E^i = d theta^i - c^i_{jk} rho^j ^ theta^k
    ///        + (1/2) c^i_{jk} theta^j ^ theta^k`,
    /// with `rho^j` the reference right-invariant block.
    pub fn structure_forms(&self, red: &ReducedFrame) -> Vec<FormField> {
        let n = red.n();
        let r = red.alg.dim;
        let c = &red.alg.c;
        let rho: Vec<FormField> = (0..r)
            .map(|j| {
                let mut f = FormField::basis_one_form(n, 4 + j);
                for a in 0..4 {
                    let mut af = FormField::zero(n, 1);
                    af.insert(&[a as u8], red.a_comps[j][a].clone());
                    f = f.sub(&af);
                }
                f
            })
            .collect();
        (0..n)
            .map(|idx| {
                let mut e = red.d_frame_form(&self.theta[idx]);
                if idx >= 4 {
                    let i = idx - 4;
                    for j in 0..r {
                        for k in 0..r {
                            let cc = c[i][j][k];
                            if cc != 0.0 {
                                e = e.sub(&rho[j].wedge(&self.theta[4 + k]).scale(cc));
                                e = e.add(
                                    &self.theta[4 + j]
                                        .wedge(&self.theta[4 + k])
                                        .scale(0.5 * cc),
                                );
                            }
                        }
                    }
                }
                e
            })
            .collect()
    }

    /// Torsion forms `T^I = d theta^I + w^I_J ^ theta^J`.
    pub fn torsion_forms(&self, red: &ReducedFrame) -> Vec<FormField> {
        let n = red.n();
        let h = &red.metric;
        (0..n)
            .map(|i| {
                let mut t = red.d_frame_form(&self.theta[i]);
                for j in 0..n {
                    for m in 0..n {
                        let hmj = h.h(m, j);
                        if hmj == 0.0 {
                            continue;
                        }
                        let mut wij = FormField::zero(n, 1);
                        for k in 0..n {
                            wij.insert(&[k as u8], self.w[i][m][k].clone());
                        }
                        t = t.add(&wij.wedge(&self.theta[j]).scale(hmj));
                    }
                }
                t
            })
            .collect()
    }
}

const fn full_key(n: usize) -> [u8; 8] {
    let mut k = [0u8; 8];
    let mut i = 0;
    while i < 8 {
        k[i] = i as u8;
        i += 1;
    }
    let _ = n;
    k
}

/// The action integrand top coefficient (against the reference frame
/// volume): `(1/2) that^{(N-1)}_{IJ} ^ Phi^{IJ} + p_I ^ E^I
/// - Lambda_0 that^{(N+1)}`.
pub fn action_integrand_eym(red: &ReducedFrame, f: &EYMFields) -> Field {
    let n = red.n();
    let key = &full_key(n)[..n];
    let all: Vec<usize> = (0..n).collect();
    let phi = f.curvature_forms(red);
    let e = f.structure_forms(red);
    let p = f.p_forms(red);
    let mut terms = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let hat = graded_volume_ff(&f.theta, &all, &[i, j]);
            terms.push(hat.wedge(&phi[i][j]).coeff(key).scale(0.5));
        }
        terms.push(p[i].wedge(&e[i]).coeff(key));
    }
    let top = graded_volume_ff(&f.theta, &all, &[]);
    terms.push(top.coeff(key).scale(-f.lambda0));
    Field::sum(terms)
}

/// Integrate a top coefficient over `R^4 x G` (fiber volume times the
/// reference base volume element).
pub fn integrate_reduced(
    red: &ReducedFrame,
    integrand: &Field,
    n_box: usize,
    fiber_volume: f64,
    ord: usize,
) -> f64 {
    use rayon::prelude::*;
    let (gx, gw) = gauss_legendre(n_box);
    let (det, _) = crate::reduced::invert_4x4_fields(&red.e_rows);
    let weighted = integrand.mul(&det);
    let mut nodes: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for s in red.chart.spans.iter() {
        let half = 0.5 * s.period();
        let mid = 0.5 * (s.lo + s.hi);
        let mut next = Vec::new();
        for (p, w) in &nodes {
            for (x, wx) in gx.iter().zip(&gw) {
                let mut q = p.clone();
                q.push(mid + half * x);
                next.push((q, w * wx * half));
            }
        }
        nodes = next;
    }
    let vals: Vec<f64> = nodes
        .par_iter()
        .map(|(z, w)| w * weighted.eval_at(z, ord).v)
        .collect();
    pairwise_sum(&vals) * fiber_volume
}

pub fn action_eym(red: &ReducedFrame, f: &EYMFields, n_box: usize) -> f64 {
    let fiber_volume = match red.alg.tag {
        crate::lie::GroupTag::Su2 => SU2_VOLUME,
        crate::lie::GroupTag::U1 => std::f64::consts::TAU,
        _ => SU2_VOLUME,
    };
    integrate_reduced(red, &action_integrand_eym(red, f), n_box, fiber_volume, 1)
}

/// Max-abs residuals of the four Euler-Lagrange equations at a base point,
/// plus the internal deviation of the two torsion-equation routes.
pub struct EymResidual {
    pub res_a: f64,
    pub res_b: f64,
    pub res_c: f64,
    pub res_d: f64,
    pub torsion_route_deviation: f64,
}

pub struct EymElOperator {
    n: usize,
    structure: Vec<FormField>,
    torsion: Vec<FormField>,
    /// residual (d) forms per lower index I
    res_d: Vec<FormField>,
    /// d^w of the `(N-1)`-volumes minus the contracted route, per (I, J)
    route_dev: Vec<FormField>,
    theta: Vec<FormField>,
}

impl EymElOperator {
    pub fn new(red: &ReducedFrame, f: &EYMFields) -> Self {
        let n = red.n();
        let r = red.alg.dim;
        let c = &red.alg.c;
        let h = &red.metric;
        let all: Vec<usize> = (0..n).collect();
        let structure = f.structure_forms(red);
        let torsion = f.torsion_forms(red);
        let phi = f.curvature_forms(red);
        let p = f.p_forms(red);
        // hat volumes of the current coframe
        let hat_top_1: Vec<FormField> =
            (0..n).map(|i| graded_volume_ff(&f.theta, &all, &[i])).collect();
        let hat3: Vec<Vec<Vec<FormField>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| graded_volume_ff(&f.theta, &all, &[i, j, k]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        // vertical difference forms theta^m - rho^m
        let rho_diff: Vec<FormField> = (0..r)
            .map(|m| {
                let mut d = f.theta[4 + m].clone();
                let mut refm = FormField::basis_one_form(n, 4 + m);
                for a in 0..4 {
                    let mut af = FormField::zero(n, 1);
                    af.insert(&[a as u8], red.a_comps[m][a].clone());
                    refm = refm.sub(&af);
                }
                d = d.sub(&refm);
                d
            })
            .collect();
        let mut res_d = Vec::with_capacity(n);
        for i in 0..n {
            // d p_I - c^p_{mI} (theta^m - rho^m) ^ p_p
            let mut d = red.d_frame_form(&p[i]);
            if i >= 4 {
                for pp in 0..r {
                    for m in 0..r {
                        let cc = c[pp][m][i - 4];
                        if cc != 0.0 {
                            d = d.sub(&rho_diff[m].wedge(&p[4 + pp]).scale(cc));
                        }
                    }
                }
            }
            // + (1/2) hat3_{IJK} ^ Phi^{JK}
            for j in 0..n {
                for k in 0..n {
                    if j == k {
                        continue;
                    }
                    d = d.add(&hat3[i][j][k].wedge(&phi[j][k]).scale(0.5));
                }
            }
            // - Lambda_0 hat1_I
            d = d.sub(&hat_top_1[i].scale(f.lambda0));
            res_d.push(d);
        }
        // the E-contraction term of (d) needs frame components of E against
        // the current coframe; it is applied at evaluation time
        let mut route_dev = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                // route 1: d^w hat^{(N-1)}_{IJ} = d hat_{IJ}
                //          - w^K_I ^ hat_{KJ} - w^K_J ^ hat_{IK}
                let hat2 = graded_volume_ff(&f.theta, &all, &[i, j]);
                let mut r1 = red.d_frame_form(&hat2);
                for k in 0..n {
                    let mut w_ki = FormField::zero(n, 1);
                    let mut w_kj = FormField::zero(n, 1);
                    for mm in 0..n {
                        let hmi = h.h(mm, i);
                        let hmj = h.h(mm, j);
                        for l in 0..n {
                            if hmi != 0.0 {
                                w_ki.insert(&[l as u8], f.w[k][mm][l].scale(hmi));
                            }
                            if hmj != 0.0 {
                                w_kj.insert(&[l as u8], f.w[k][mm][l].scale(hmj));
                            }
                        }
                    }
                    let hat_kj = graded_volume_ff(&f.theta, &all, &[k, j]);
                    let hat_ik = graded_volume_ff(&f.theta, &all, &[i, k]);
                    r1 = r1.sub(&w_ki.wedge(&hat_kj)).sub(&w_kj.wedge(&hat_ik));
                }
                // route 2: d^w theta^K ^ hat^{(N-2)}_{IJK} = T^K ^ hat3_{IJK}
                let mut r2 = FormField::zero(n, n - 1);
                for k in 0..n {
                    r2 = r2.add(&torsion[k].wedge(&hat3[i][j][k]));
                }
                route_dev.push(r1.sub(&r2));
            }
        }
        EymElOperator {
            n,
            structure,
            torsion,
            res_d,
            route_dev,
            theta: f.theta.clone(),
        }
    }

    pub fn at(&self, red: &ReducedFrame, f: &EYMFields, x: &[f64]) -> Result<EymResidual, Error> {
        let n = self.n;
        let r = red.alg.dim;
        let jets = Jet::seed(x, 2);
        let mut ctx = EvalCtx::new(&jets);
        // current coframe matrix and its inverse for frame components
        let mut m = vec![vec![0.0; n]; n];
        for (i, th) in self.theta.iter().enumerate() {
            for j in 0..n {
                m[i][j] = th.coeff(&[j as u8]).eval(&mut ctx).v;
            }
        }
        let minv =
            invert(&m).ok_or_else(|| Error::degenerate("coframe singular at point"))?;
        let rows: Vec<FormValue> = (0..n)
            .map(|mu| FormValue::one_form(n, Basis::Frame, &minv[mu]))
            .collect();
        let mut res_a = 0.0_f64;
        let mut res_b = 0.0_f64;
        let mut e_comps: Vec<FormValue> = Vec::with_capacity(n);
        for idx in 0..n {
            let ev = self.structure[idx].eval(&mut ctx, Basis::Frame);
            let fc = ev.substitute(&rows, Basis::Frame);
            for a in 0..4 {
                for k in 0..r {
                    res_a = res_a.max(fc.coeff(&[a as u8, (4 + k) as u8]).abs());
                }
            }
            for j in 0..r {
                for k in (j + 1)..r {
                    res_b = res_b.max(fc.coeff(&[(4 + j) as u8, (4 + k) as u8]).abs());
                }
            }
            e_comps.push(fc);
        }
        let mut res_c = 0.0_f64;
        for t in &self.torsion {
            res_c = res_c.max(t.eval(&mut ctx, Basis::Frame).max_abs());
        }
        let mut dev = 0.0_f64;
        for d in &self.route_dev {
            dev = dev.max(d.eval(&mut ctx, Basis::Frame).max_abs());
        }
        // residual (d): assembled forms plus the E-contraction term
        let all: Vec<usize> = (0..n).collect();
        let mut res_d = 0.0_f64;
        // hat1 of the current frame at the point
        let theta_vals: Vec<FormValue> = self
            .theta
            .iter()
            .map(|t| t.eval(&mut ctx, Basis::Frame))
            .collect();
        let hat1: Vec<FormValue> = (0..n)
            .map(|l| crate::frame::graded_volume(&theta_vals, &all, &[l]))
            .collect();
        for i in 0..n {
            let mut v = self.res_d[i].eval(&mut ctx, Basis::Frame);
            // - E^K_{IJ} p_K^{lJ} hat1_l
            for k in 0..n {
                for j in 0..n {
                    let ekij = e_comps[k].coeff(&[i as u8, j as u8]);
                    if ekij == 0.0 {
                        continue;
                    }
                    for l in 0..n {
                        let plj = f.p_unified(k, l, j).eval(&mut ctx).v;
                        if plj != 0.0 {
                            v = v.sub(&hat1[l].scale(ekij * plj));
                        }
                    }
                }
            }
            res_d = res_d.max(v.max_abs());
        }
        Ok(EymResidual {
            res_a,
            res_b,
            res_c,
            res_d,
            torsion_route_deviation: dev,
        })
    }
}

/// The vacuum solution on `R^4 x SU(2)`: flat base, `A = 0`,
/// `Lambda_0 = 3/4`, identity coframe components, the closed-form spin
/// connection, and the single momentum family sourcing the vertical
/// Einstein block.
pub fn build_eym_vacuum_solution(red: &ReducedFrame) -> EYMFields {
    let n = red.n();
    let r = red.alg.dim;
    let theta: Vec<FormField> = (0..n).map(|i| FormField::basis_one_form(n, i)).collect();
    // raise the second index of the closed-form connection
    let cf = red.connection_closed_form_fields();
    let mut w = vec![vec![vec![Field::zero(); n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut terms = Vec::new();
                for m in 0..n {
                    let hmj = red.metric.h_inv(m, j);
                    if hmj != 0.0 {
                        terms.push(cf[i][m][k].scale(hmj));
                    }
                }
                w[i][j][k] = Field::sum(terms);
            }
        }
    }
    // p_{4+i}^{(0, 4+j)} = -(1/2) delta_ij x^0 sources Ein_i^j + Lambda_0
    let mut p_mixed = vec![vec![vec![Field::zero(); r]; 4]; n];
    for i in 0..r {
        p_mixed[4 + i][0][i] = Field::coord(0).scale(-0.5);
    }
    EYMFields {
        theta,
        w,
        p_mixed,
        p_vv: vec![vec![vec![Field::zero(); r]; r]; n],
        lambda0: 0.75,
    }
}

/// Coefficient perturbations of `(theta, w, p)`, windowed in the base box.
#[derive(Clone)]
pub struct EymVariation {
    pub dtheta: Vec<Vec<Field>>,
    pub dw: Vec<Vec<Vec<Field>>>,
    pub dp_mixed: Vec<Vec<Vec<Field>>>,
    pub dp_vv: Vec<Vec<Vec<Field>>>,
}

impl EymVariation {
    pub fn random(red: &ReducedFrame, seed: u64) -> Self {
        let n = red.n();
        let r = red.alg.dim;
        let chart = &red.chart;
        let mut rng = Chart::rng(seed);
        let bump = chart.bump();
        let mut fresh = || chart.random_field(&mut rng, 2).mul(&bump);
        let dtheta = (0..n).map(|_| (0..n).map(|_| fresh()).collect()).collect();
        let mut dw = vec![vec![vec![Field::zero(); n]; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let g = fresh();
                    dw[i][j][k] = g.clone();
                    dw[j][i][k] = g.neg();
                }
            }
        }
        let dp_mixed = (0..n)
            .map(|_| (0..4).map(|_| (0..r).map(|_| fresh()).collect()).collect())
            .collect();
        let mut dp_vv = vec![vec![vec![Field::zero(); r]; r]; n];
        for i in 0..n {
            for j in 0..r {
                for k in (j + 1)..r {
                    let g = fresh();
                    dp_vv[i][j][k] = g.clone();
                    dp_vv[i][k][j] = g.neg();
                }
            }
        }
        EymVariation {
            dtheta,
            dw,
            dp_mixed,
            dp_vv,
        }
    }
}

pub fn perturbed_eym(f: &EYMFields, v: &EymVariation, eps: f64) -> EYMFields {
    let n = f.theta.len();
    let mut g = f.clone();
    for i in 0..n {
        let mut th = g.theta[i].clone();
        for j in 0..n {
            let d = v.dtheta[i][j].scale(eps);
            if d.as_const() != Some(0.0) {
                let mut add = FormField::zero(n, 1);
                add.insert(&[j as u8], d);
                th = th.add(&add);
            }
        }
        g.theta[i] = th;
        for j in 0..n {
            for k in 0..n {
                g.w[i][j][k] = g.w[i][j][k].add(&v.dw[i][j][k].scale(eps));
            }
        }
        for a in 0..4 {
            for k in 0..g.p_mixed[i][a].len() {
                g.p_mixed[i][a][k] = g.p_mixed[i][a][k].add(&v.dp_mixed[i][a][k].scale(eps));
            }
        }
        for j in 0..g.p_vv[i].len() {
            for k in 0..g.p_vv[i][j].len() {
                g.p_vv[i][j][k] = g.p_vv[i][j][k].add(&v.dp_vv[i][j][k].scale(eps));
            }
        }
    }
    g
}

pub fn gateaux_eym(
    red: &ReducedFrame,
    f: &EYMFields,
    v: &EymVariation,
    eps: f64,
    n_box: usize,
) -> f64 {
    let ap = action_eym(red, &perturbed_eym(f, v, eps), n_box);
    let am = action_eym(red, &perturbed_eym(f, v, -eps), n_box);
    (ap - am) / (2.0 * eps)
}

/// Residuals of the projected equations on the base: the Einstein equation
/// with the gauge stress tensor and effective constant, the Yang-Mills
/// equation, and the equivalence `Ein(h)_i^a = (1/2) d^{gamma,A}_b F_i^{ab}`.
pub struct ProjectedResiduals {
    pub einstein: f64,
    pub yang_mills: f64,
    pub mixed_block_equivalence: f64,
}

pub fn projected_equations_check(
    red: &ReducedFrame,
    lambda0: f64,
    x: &[f64],
) -> Result<ProjectedResiduals, Error> {
    let r = red.alg.dim;
    let lambda = lambda_effective(lambda0, &red.alg)?;
    let base = red.base_einstein_at(x, 3);
    let jets = Jet::seed(x, 2);
    let mut ctx = EvalCtx::new(&jets);
    let fm = red.f_mixed_fields();
    let fmv: Vec<Vec<Vec<f64>>> = (0..r)
        .map(|i| {
            (0..4)
                .map(|a| (0..4).map(|b| fm[i][a][b].eval(&mut ctx).v).collect())
                .collect()
        })
        .collect();
    let fv: Vec<Vec<Vec<f64>>> = (0..r)
        .map(|i| {
            (0..4)
                .map(|a| {
                    (0..4)
                        .map(|b| red.f_comps[i][a][b].eval(&mut ctx).v)
                        .collect()
                })
                .collect()
        })
        .collect();
    let fnorm2 = red.f_norm2_field().eval(&mut ctx).v;
    let divf = red.div_f_fields();
    let divfv: Vec<Vec<f64>> = (0..r)
        .map(|i| (0..4).map(|a| divf[i][a].eval(&mut ctx).v).collect())
        .collect();
    let mut einstein = 0.0_f64;
    for a in 0..4 {
        for b in 0..4 {
            let mut stress = 0.0;
            for i in 0..r {
                for cc in 0..4 {
                    stress += fv[i][a][cc] * fmv[i][b][cc];
                }
            }
            if a == b {
                stress -= 0.5 * fnorm2;
            }
            let lhs = base.ein_mixed[b][a].v
                + if a == b { lambda } else { 0.0 }
                - 0.5 * stress;
            einstein = einstein.max(lhs.abs());
        }
    }
    let mut yang_mills = 0.0_f64;
    for i in 0..r {
        for a in 0..4 {
            yang_mills = yang_mills.max(divfv[i][a].abs());
        }
    }
    // equivalence chain through the reduction block
    let full = red.einstein_full_at(x, 3);
    let mut equiv = 0.0_f64;
    for i in 0..r {
        for a in 0..4 {
            // Ein(h)_i^a = k_{ij} Ein^{(4+j)}_b eta^{ba}
            let mut lowered = 0.0;
            for j in 0..r {
                lowered += red.alg.k_metric[i][j] * full.ein_mixed[4 + j][a].v * ETA[a];
            }
            equiv = equiv.max((lowered - 0.5 * divfv[i][a]).abs());
        }
    }
    Ok(ProjectedResiduals {
        einstein,
        yang_mills,
        mixed_block_equivalence: equiv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;

    #[test]
    fn flat_trivial_configuration_is_critical() {
        let red = ReducedFrame::flat(LieAlgebra::u1()).unwrap();
        let n = red.n();
        let f = EYMFields {
            theta: (0..n).map(|i| FormField::basis_one_form(n, i)).collect(),
            w: vec![vec![vec![Field::zero(); n]; n]; n],
            p_mixed: vec![vec![vec![Field::zero(); 1]; 4]; n],
            p_vv: vec![vec![vec![Field::zero(); 1]; 1]; n],
            lambda0: 0.0,
        };
        let a = action_eym(&red, &f, 2);
        assert_eq!(a, 0.0);
        let op = EymElOperator::new(&red, &f);
        let res = op.at(&red, &f, &[0.2, 0.1, -0.3, 0.4]).unwrap();
        assert!(res.res_a == 0.0 && res.res_b == 0.0);
        assert!(res.res_c == 0.0 && res.res_d == 0.0);
    }

    #[test]
    fn vacuum_solution_residuals_vanish() {
        let red = ReducedFrame::flat(LieAlgebra::su2()).unwrap();
        let f = build_eym_vacuum_solution(&red);
        let op = EymElOperator::new(&red, &f);
        let mut rng = Chart::rng(8);
        for _ in 0..10 {
            let x = red.chart.sample_interior(&mut rng, 0.02);
            let res = op.at(&red, &f, &x).unwrap();
            assert!(res.res_a < 1e-12, "res_a {}", res.res_a);
            assert!(res.res_b < 1e-12, "res_b {}", res.res_b);
            assert!(res.res_c < 1e-12, "res_c {}", res.res_c);
            assert!(res.res_d < 1e-12, "res_d {}", res.res_d);
            assert!(
                res.torsion_route_deviation < 1e-10,
                "route deviation {}",
                res.torsion_route_deviation
            );
        }
    }

    #[test]
    fn perturbing_connection_creates_torsion() {
        let red = ReducedFrame::flat(LieAlgebra::su2()).unwrap();
        let f = build_eym_vacuum_solution(&red);
        let v = EymVariation::random(&red, 3);
        let g = perturbed_eym(&f, &v, 0.1);
        let op = EymElOperator::new(&red, &g);
        let res = op.at(&red, &g, &[0.2, -0.1, 0.3, 0.0]).unwrap();
        assert!(res.res_c > 1e-3, "res_c {}", res.res_c);
        assert!(
            res.torsion_route_deviation < 1e-9,
            "route deviation {} should hold off shell",
            res.torsion_route_deviation
        );
    }

    #[test]
    fn gateaux_vanishes_on_vacuum() {
        let red = ReducedFrame::flat(LieAlgebra::su2()).unwrap();
        let f = build_eym_vacuum_solution(&red);
        for seed in 0..3 {
            let v = EymVariation::random(&red, 100 + seed);
            let g = gateaux_eym(&red, &f, &v, 1e-4, 6);
            assert!(g.abs() < 5e-6, "gateaux {g} at seed {seed}");
        }
    }

    #[test]
    fn projected_equations() {
        // vacuum: F = 0, flat base, Lambda_0 = 3/4 on su(2)
        let red = ReducedFrame::flat(LieAlgebra::su2()).unwrap();
        let r = projected_equations_check(&red, 0.75, &[0.1, 0.2, -0.3, 0.4]).unwrap();
        assert!(r.einstein < 1e-12, "einstein {}", r.einstein);
        assert!(r.yang_mills < 1e-12);
        assert!(r.mixed_block_equivalence < 1e-10);
        // u(1), constant F, flat g, Lambda_0 = 0: the stress term survives
        let mut a = vec![vec![Field::zero(); 4]; 1];
        a[0][1] = Field::coord(0).scale(0.7);
        let red2 = ReducedFrame::new(
            Chart::base4(),
            LieAlgebra::u1(),
            crate::frame::flat_vierbein_rows(4),
            a,
        )
        .unwrap();
        let r2 = projected_equations_check(&red2, 0.0, &[0.1, 0.2, -0.3, 0.4]).unwrap();
        assert!(r2.einstein > 1e-2, "stress term must be flagged");
        assert!(r2.yang_mills < 1e-12);
        assert!(r2.mixed_block_equivalence < 1e-9);
    }
}
