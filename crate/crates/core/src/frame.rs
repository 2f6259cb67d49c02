//! Coframes over a chart: evaluation, duals, frame components, structure
//! curvature and the graded volume forms, plus the Kaluza-Klein coframe
//! builders for circle and SU(2) fibers.

use crate::chart::Chart;
use crate::error::Error;
use crate::field::{EvalCtx, Field};
use crate::forms::{epsilon_complement, Basis, FormField, FormValue};
use crate::jet::Jet;
use crate::lie::LieAlgebra;
use crate::linalg;

/// Number of horizontal (base) directions.
pub const HORIZONTAL: usize = 4;

/// A coframe: `n` one-forms over an `n`-dimensional chart. Indices below
/// `split` are horizontal (a-type), the rest vertical (i-type).
#[derive(Clone)]
pub struct CoFrame {
    pub chart: Chart,
    /// `rows[i][mu]`: coefficient of `dz^mu` in the `i`-th coframe form.
    pub rows: Vec<Vec<Field>>,
    pub split: usize,
}

impl CoFrame {
    pub fn new(chart: Chart, rows: Vec<Vec<Field>>, split: usize) -> Self {
        let n = chart.dim();
        assert_eq!(rows.len(), n);
        assert!(rows.iter().all(|r| r.len() == n));
        CoFrame { chart, rows, split }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Identity coframe `theta^I = dz^I`.
    pub fn identity(chart: Chart, split: usize) -> Self {
        let n = chart.dim();
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|m| {
                        if i == m {
                            Field::one()
                        } else {
                            Field::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        CoFrame::new(chart, rows, split)
    }

    pub fn one_form(&self, i: usize) -> FormField {
        FormField::one_form(self.dim(), self.rows[i].clone())
    }

    pub fn one_forms(&self) -> Vec<FormField> {
        (0..self.dim()).map(|i| self.one_form(i)).collect()
    }

    /// Coefficient matrix as jets at a point.
    pub fn matrix_jets(&self, ctx: &mut EvalCtx) -> Vec<Vec<Jet>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|f| (*f.eval(ctx)).clone()).collect())
            .collect()
    }

    pub fn matrix_values(&self, point: &[f64]) -> Vec<Vec<f64>> {
        // order 1 so that coefficient fields carrying one derivative level
        // (Maurer-Cartan blocks) evaluate
        let jets = Jet::seed(point, 1);
        let mut ctx = EvalCtx::new(&jets);
        self.rows
            .iter()
            .map(|r| r.iter().map(|f| f.eval(&mut ctx).v).collect())
            .collect()
    }

    /// Coframe forms as pointwise values (coordinate basis).
    pub fn forms_at(&self, point: &[f64]) -> Vec<FormValue> {
        let m = self.matrix_values(point);
        m.iter()
            .map(|row| FormValue::one_form(self.dim(), Basis::Coordinate, row))
            .collect()
    }

    /// Frame components of a coordinate-basis form at a point.
    pub fn frame_components(&self, a: &FormValue, point: &[f64]) -> Result<FormValue, Error> {
        let m = self.matrix_values(point);
        let minv = crate::lie::invert(&m)
            .ok_or_else(|| Error::degenerate("coframe matrix singular at point"))?;
        // dz^mu = sum_I (M^-1)^mu_I theta^I
        let rows: Vec<FormValue> = (0..self.dim())
            .map(|mu| FormValue::one_form(self.dim(), Basis::Frame, &minv[mu]))
            .collect();
        Ok(a.substitute(&rows, Basis::Frame))
    }

    /// Back-conversion of frame components to the coordinate basis.
    pub fn coordinate_components(
        &self,
        a: &FormValue,
        point: &[f64],
    ) -> Result<FormValue, Error> {
        let m = self.matrix_values(point);
        let rows: Vec<FormValue> = m
            .iter()
            .map(|row| FormValue::one_form(self.dim(), Basis::Coordinate, row))
            .collect();
        Ok(a.substitute(&rows, Basis::Coordinate))
    }

    /// Solve `theta^I(V) = rhs^I` for the vector `V` at a point, with
    /// derivative information to the given order.
    pub fn dual_vector_jets(&self, point: &[f64], rhs: &[f64], ord: usize) -> Result<Vec<Jet>, Error> {
        // one extra seed order covers frames whose coefficients carry a
        // derivative level already
        let jets = Jet::seed(point, ord + 1);
        let mut ctx = EvalCtx::new(&jets);
        let m = self.matrix_jets(&mut ctx);
        let b: Vec<Jet> = rhs
            .iter()
            .map(|&v| Jet::constant(self.dim(), ord, v))
            .collect();
        linalg::solve_jets(&m, &b)
    }

    /// Plain dual-vector values at a point.
    pub fn dual_vector(&self, point: &[f64], rhs: &[f64]) -> Result<Vec<f64>, Error> {
        let m = self.matrix_values(point);
        linalg::solve_f64(&m, rhs)
    }

    /// Structure curvature `Theta^I = d theta^I + (1/2) c^I_jk theta^j ^ theta^k`
    /// (algebra term on vertical indices only).
    pub fn g_curvature(&self, alg: &LieAlgebra) -> Vec<FormField> {
        let n = self.dim();
        let split = self.split;
        let mut out = Vec::with_capacity(n);
        for idx in 0..n {
            let mut theta = self.one_form(idx).ext_d();
            if idx >= split {
                let i = idx - split;
                for j in 0..alg.dim {
                    for k in 0..alg.dim {
                        let c = alg.c[i][j][k];
                        if c != 0.0 {
                            let w = self
                                .one_form(split + j)
                                .wedge(&self.one_form(split + k))
                                .scale(0.5 * c);
                            theta = theta.add(&w);
                        }
                    }
                }
            }
            out.push(theta);
        }
        out
    }

    /// Max-abs anholonomy mixed components `Theta^I_{ak}` and vertical
    /// components over the frame basis at a point (used by closure and
    /// commuting-flow preconditions).
    pub fn anholonomy_frame_components(
        &self,
        point: &[f64],
    ) -> Result<Vec<FormValue>, Error> {
        self.one_forms()
            .iter()
            .map(|t| {
                let d = t.ext_d().eval_at(point, 1, Basis::Coordinate);
                self.frame_components(&d, point)
            })
            .collect()
    }
}

/// The graded volume forms of a coframe at a point, in the coordinate basis.
///
/// `e4`, `e3[a]`, `e2[a][b]` use the horizontal block; `bar*` the vertical
/// block; `hat*` the full frame. All follow the convention
/// `epsilon_{0 1 ... N} = +1` on their index ranges.
pub struct GradedVolumes {
    pub dim: usize,
    pub split: usize,
    pub e4: FormValue,
    pub e3: Vec<FormValue>,
    pub e2: Vec<Vec<FormValue>>,
    pub bar_top: FormValue,
    pub bar1: Vec<FormValue>,
    pub bar2: Vec<Vec<FormValue>>,
    pub hat_top: FormValue,
    pub hat1: Vec<FormValue>,
    pub hat2: Vec<Vec<FormValue>>,
    pub hat3: Vec<Vec<Vec<FormValue>>>,
}

/// Wedge of `rows[subset[i]]` over the complement of `leading` (positions in
/// `subset`), with the Levi-Civita sign of `(leading..., complement...)`.
pub fn graded_volume(
    rows: &[FormValue],
    subset: &[usize],
    leading: &[usize],
) -> FormValue {
    let dim = rows[0].dim;
    let basis = rows[0].basis;
    let m = subset.len();
    let degree = m.saturating_sub(leading.len());
    if leading.len() > m {
        return FormValue::zero(dim, degree, basis);
    }
    let local: Option<Vec<usize>> = leading
        .iter()
        .map(|g| subset.iter().position(|s| s == g))
        .collect();
    let local = match local {
        Some(l) => l,
        None => return FormValue::zero(dim, degree, basis),
    };
    match epsilon_complement(m, &local) {
        Some((comp, sign)) => {
            let mut w = FormValue::monomial(dim, basis, &[], sign);
            for p in comp {
                w = w.wedge(&rows[subset[p]]).expect("graded volume wedge");
            }
            w
        }
        None => FormValue::zero(dim, degree, basis),
    }
}

/// Field-level analogue of [`graded_volume`]: wedge of coframe one-form
/// fields over the complement of `leading` within `subset`.
pub fn graded_volume_ff(
    rows: &[FormField],
    subset: &[usize],
    leading: &[usize],
) -> FormField {
    let dim = rows[0].dim;
    let m = subset.len();
    let degree = m.saturating_sub(leading.len());
    if leading.len() > m {
        return FormField::zero(dim, degree);
    }
    let local: Option<Vec<usize>> = leading
        .iter()
        .map(|g| subset.iter().position(|s| s == g))
        .collect();
    let local = match local {
        Some(l) => l,
        None => return FormField::zero(dim, degree),
    };
    match epsilon_complement(m, &local) {
        Some((comp, sign)) => {
            let mut w = FormField::zero(dim, 0);
            w.insert(&[], Field::constant(sign));
            for p in comp {
                w = w.wedge(&rows[subset[p]]);
            }
            w
        }
        None => FormField::zero(dim, degree),
    }
}

impl GradedVolumes {
    pub fn build(rows: &[FormValue], split: usize) -> Self {
        let n = rows.len();
        let dim = rows[0].dim;
        let hor: Vec<usize> = (0..split).collect();
        let ver: Vec<usize> = (split..n).collect();
        let all: Vec<usize> = (0..n).collect();
        let e4 = graded_volume(rows, &hor, &[]);
        let e3: Vec<FormValue> = (0..split).map(|a| graded_volume(rows, &hor, &[a])).collect();
        let e2: Vec<Vec<FormValue>> = (0..split)
            .map(|a| {
                (0..split)
                    .map(|b| graded_volume(rows, &hor, &[a, b]))
                    .collect()
            })
            .collect();
        let bar_top = graded_volume(rows, &ver, &[]);
        let bar1: Vec<FormValue> = ver
            .iter()
            .map(|&k| graded_volume(rows, &ver, &[k]))
            .collect();
        let bar2: Vec<Vec<FormValue>> = ver
            .iter()
            .map(|&j| {
                ver.iter()
                    .map(|&k| graded_volume(rows, &ver, &[j, k]))
                    .collect()
            })
            .collect();
        let hat_top = graded_volume(rows, &all, &[]);
        let hat1: Vec<FormValue> = (0..n).map(|i| graded_volume(rows, &all, &[i])).collect();
        let hat2: Vec<Vec<FormValue>> = (0..n)
            .map(|i| (0..n).map(|j| graded_volume(rows, &all, &[i, j])).collect())
            .collect();
        let hat3: Vec<Vec<Vec<FormValue>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        (0..n)
                            .map(|k| graded_volume(rows, &all, &[i, j, k]))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        GradedVolumes {
            dim,
            split,
            e4,
            e3,
            e2,
            bar_top,
            bar1,
            bar2,
            hat_top,
            hat1,
            hat2,
            hat3,
        }
    }
}

/// Quaternion-valued fields (components as scalar fields).
pub type QuatFields = [Field; 4];

pub fn qmul_fields(a: &QuatFields, b: &QuatFields) -> QuatFields {
    let t = |ops: [(usize, usize, f64); 4]| {
        Field::sum(
            ops.iter()
                .map(|&(i, j, s)| a[i].mul(&b[j]).scale(s))
                .collect(),
        )
    };
    [
        t([(0, 0, 1.0), (1, 1, -1.0), (2, 2, -1.0), (3, 3, -1.0)]),
        t([(0, 1, 1.0), (1, 0, 1.0), (2, 3, 1.0), (3, 2, -1.0)]),
        t([(0, 2, 1.0), (2, 0, 1.0), (3, 1, 1.0), (1, 3, -1.0)]),
        t([(0, 3, 1.0), (3, 0, 1.0), (1, 2, 1.0), (2, 1, -1.0)]),
    ]
}

pub fn qconj_fields(a: &QuatFields) -> QuatFields {
    [a[0].clone(), a[1].neg(), a[2].neg(), a[3].neg()]
}

fn cos_half_sqrt_series(u: f64) -> [f64; 4] {
    // f(u) = cos(sqrt(u)/2) = sum (-1)^n u^n / (4^n (2n)!), and derivatives
    series_and_derivs(u, |n| {
        let mut c = 1.0;
        for k in 1..=2 * n {
            c /= k as f64;
        }
        c / 4f64.powi(n as i32) * if n % 2 == 0 { 1.0 } else { -1.0 }
    })
}

fn sinc_half_sqrt_series(u: f64) -> [f64; 4] {
    // g(u) = sin(sqrt(u)/2)/sqrt(u) = sum (-1)^n u^n / (2 * 4^n (2n+1)!)
    series_and_derivs(u, |n| {
        let mut c = 0.5;
        for k in 1..=2 * n + 1 {
            c /= k as f64;
        }
        c / 4f64.powi(n as i32) * if n % 2 == 0 { 1.0 } else { -1.0 }
    })
}

fn series_and_derivs(u: f64, coeff: impl Fn(usize) -> f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    for n in 0..28 {
        let c = coeff(n);
        let un = u.powi(n as i32);
        out[0] += c * un;
        if n >= 1 {
            out[1] += c * n as f64 * u.powi(n as i32 - 1);
        }
        if n >= 2 {
            out[2] += c * (n * (n - 1)) as f64 * u.powi(n as i32 - 2);
        }
        if n >= 3 {
            out[3] += c * (n * (n - 1) * (n - 2)) as f64 * u.powi(n as i32 - 3);
        }
    }
    out
}

/// Group element fields `q(w) = exp(w^i t_i)` on the exponential chart,
/// where chart coordinates `wbase..wbase+2` hold `w`.
pub fn su2_exp_fields(wbase: usize) -> QuatFields {
    let w: Vec<Field> = (0..3).map(|i| Field::coord(wbase + i)).collect();
    let u = Field::sum(w.iter().map(|wi| wi.mul(wi)).collect());
    let c = u.apply_analytic(cos_half_sqrt_series);
    let s = u.apply_analytic(sinc_half_sqrt_series);
    [c, s.mul(&w[0]), s.mul(&w[1]), s.mul(&w[2])]
}

/// The chart for a 4-dim base box times the SU(2) exponential chart.
pub fn su2_chart() -> Chart {
    let mut spans = vec![crate::chart::CoordSpan::boxed(-1.0, 1.0); 4];
    spans.extend(vec![
        crate::chart::CoordSpan::boxed(
            -2.0 * std::f64::consts::PI,
            2.0 * std::f64::consts::PI
        );
        3
    ]);
    Chart::new(spans)
}

/// Left and right Maurer-Cartan coefficient fields on the SU(2) exponential
/// chart: `mc[i][mu]` is the `dw^mu` coefficient of the i-th algebra
/// component (basis `t_i = e_i/2`, so components carry a factor 2).
pub struct Su2MaurerCartan {
    pub left: Vec<Vec<Field>>,
    pub right: Vec<Vec<Field>>,
    /// Group element components as fields.
    pub q: QuatFields,
    /// Adjoint matrix fields `S(g)^i_j` (rotation of the vector part).
    pub adjoint: Vec<Vec<Field>>,
}

pub fn su2_maurer_cartan(wbase: usize) -> Su2MaurerCartan {
    let q = su2_exp_fields(wbase);
    let qc = qconj_fields(&q);
    let mut left = vec![vec![Field::zero(); 3]; 3];
    let mut right = vec![vec![Field::zero(); 3]; 3];
    for mu in 0..3 {
        let dq: QuatFields = [
            q[0].partial(wbase + mu),
            q[1].partial(wbase + mu),
            q[2].partial(wbase + mu),
            q[3].partial(wbase + mu),
        ];
        let l = qmul_fields(&qc, &dq);
        let r = qmul_fields(&dq, &qc);
        for i in 0..3 {
            left[i][mu] = l[i + 1].scale(2.0);
            right[i][mu] = r[i + 1].scale(2.0);
        }
    }
    // S(q) v = q v q^-1 on pure quaternions
    let mut adjoint = vec![vec![Field::zero(); 3]; 3];
    for j in 0..3 {
        let mut e = [
            Field::zero(),
            Field::zero(),
            Field::zero(),
            Field::zero(),
        ];
        e[j + 1] = Field::one();
        let conj = qmul_fields(&qmul_fields(&q, &e), &qc);
        for (i, row) in adjoint.iter_mut().enumerate() {
            row[j] = conj[i + 1].clone();
        }
    }
    Su2MaurerCartan {
        left,
        right,
        q,
        adjoint,
    }
}

/// Raw and adjoint-dressed Kaluza-Klein coframes on `R^4 x G`.
pub struct KKFrames {
    /// Raw frame `(e^a, theta^i)` with vertical block carrying the left
    /// Maurer-Cartan form.
    pub raw: CoFrame,
    /// Dressed frame `(e^a, e^i = A^i + rho^i)` with the right-invariant
    /// vertical block; coefficients of vertical forms depend on the fiber,
    /// but frame components of reduced fields do not.
    pub dressed: CoFrame,
}

/// Build the KK coframe for a circle fiber: `theta^4 = A_a(x) e^a + ds`.
/// `e_rows` are the base vierbein coefficients (4x4 fields over x),
/// `a_pot[a]` the gauge potential components.
pub fn kk_coframe_u1(chart: Chart, e_rows: &[Vec<Field>], a_pot: &[Field]) -> KKFrames {
    let n = chart.dim();
    assert_eq!(n, 5);
    let mut rows: Vec<Vec<Field>> = Vec::with_capacity(5);
    for a in 0..4 {
        let mut row = vec![Field::zero(); 5];
        for mu in 0..4 {
            row[mu] = e_rows[a][mu].clone();
        }
        rows.push(row);
    }
    let mut v = vec![Field::zero(); 5];
    for mu in 0..4 {
        // A_a e^a expressed in coordinates: sum_a A_a e^a_mu
        v[mu] = Field::sum(
            (0..4)
                .map(|a| a_pot[a].mul(&e_rows[a][mu]))
                .collect(),
        );
    }
    v[4] = Field::one();
    rows.push(v);
    let frame = CoFrame::new(chart, rows, 4);
    KKFrames {
        raw: frame.clone(),
        dressed: frame,
    }
}

/// Build raw and dressed KK coframes for an SU(2) fiber on the exponential
/// chart. `a_pot[i][a]` are the components of the algebra-valued potential.
pub fn kk_coframe_su2(e_rows: &[Vec<Field>], a_pot: &[Vec<Field>]) -> KKFrames {
    let chart = su2_chart();
    let mc = su2_maurer_cartan(4);
    let mut raw_rows: Vec<Vec<Field>> = Vec::with_capacity(7);
    let mut dressed_rows: Vec<Vec<Field>> = Vec::with_capacity(7);
    for a in 0..4 {
        let mut row = vec![Field::zero(); 7];
        for mu in 0..4 {
            row[mu] = e_rows[a][mu].clone();
        }
        raw_rows.push(row.clone());
        dressed_rows.push(row);
    }
    for i in 0..3 {
        // raw: theta^i = (S^-1 A)^i_a e^a + lambda^i ; S^-1 = S transposed
        let mut raw = vec![Field::zero(); 7];
        let mut dressed = vec![Field::zero(); 7];
        for mu in 0..4 {
            let mut terms_raw = Vec::new();
            let mut terms_dressed = Vec::new();
            for a in 0..4 {
                for j in 0..3 {
                    // (S^-1)^i_j = S^j_i
                    terms_raw.push(mc.adjoint[j][i].mul(&a_pot[j][a]).mul(&e_rows[a][mu]));
                }
                terms_dressed.push(a_pot[i][a].mul(&e_rows[a][mu]));
            }
            raw[mu] = Field::sum(terms_raw);
            dressed[mu] = Field::sum(terms_dressed);
        }
        for mu in 0..3 {
            raw[4 + mu] = mc.left[i][mu].clone();
            dressed[4 + mu] = mc.right[i][mu].clone();
        }
        raw_rows.push(raw);
        dressed_rows.push(dressed);
    }
    KKFrames {
        raw: CoFrame::new(chart.clone(), raw_rows, 4),
        dressed: CoFrame::new(chart, dressed_rows, 4),
    }
}

/// Flat base vierbein rows `e^a = dx^a` over an n-dim chart.
pub fn flat_vierbein_rows(n: usize) -> Vec<Vec<Field>> {
    (0..4)
        .map(|a| {
            (0..n)
                .map(|mu| {
                    if a == mu {
                        Field::one()
                    } else {
                        Field::zero()
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::Quaternion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frame_components_identity_and_roundtrip() {
        let chart = Chart::base_with_circle(std::f64::consts::TAU);
        let id = CoFrame::identity(chart.clone(), 4);
        let a = FormValue::monomial(5, Basis::Coordinate, &[0, 1], 1.0);
        let p = [0.1, 0.2, 0.3, 0.4, 0.5];
        let f = id.frame_components(&a, &p).unwrap();
        assert_eq!(f.coeff(&[0, 1]), 1.0);

        // random invertible frame: round trip
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut rows = Vec::new();
            for i in 0..5 {
                let mut row = Vec::new();
                for mu in 0..5 {
                    let base = if i == mu { 1.0 } else { 0.0 };
                    row.push(
                        chart
                            .random_field(&mut rng, 2)
                            .scale(0.25)
                            .add(&Field::constant(base)),
                    );
                }
                rows.push(row);
            }
            let frame = CoFrame::new(chart.clone(), rows, 4);
            let mut b = FormValue::zero(5, 2, Basis::Coordinate);
            use rand::Rng;
            for i in 0..5u8 {
                for j in (i + 1)..5 {
                    b.insert(&[i, j], rng.gen_range(-1.0..1.0));
                }
            }
            let fc = frame.frame_components(&b, &p).unwrap();
            let back = frame.coordinate_components(&fc, &p).unwrap();
            let diff = back.sub(&b).max_abs();
            assert!(diff < 1e-10, "roundtrip residual {diff}");
        }
    }

    #[test]
    fn graded_volume_contraction_identity() {
        // theta^K ^ hat_I = delta^K_I hat_top on a random frame
        let chart = Chart::base_with_circle(std::f64::consts::TAU);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut rows = Vec::new();
        for i in 0..5 {
            let mut row = Vec::new();
            for mu in 0..5 {
                let base = if i == mu { 1.0 } else { 0.0 };
                row.push(
                    chart
                        .random_field(&mut rng, 2)
                        .scale(0.3)
                        .add(&Field::constant(base)),
                );
            }
            rows.push(row);
        }
        let frame = CoFrame::new(chart, rows, 4);
        let p = [0.3, -0.5, 0.2, 0.9, 1.0];
        let forms = frame.forms_at(&p);
        let gv = GradedVolumes::build(&forms, 4);
        for k in 0..5 {
            for i in 0..5 {
                let w = forms[k].wedge(&gv.hat1[i]).unwrap();
                let expect = if k == i {
                    gv.hat_top.clone()
                } else {
                    FormValue::zero(5, 5, Basis::Coordinate)
                };
                assert!(w.sub(&expect).max_abs() < 1e-10);
            }
        }
        // identity frame top volume
        let idchart = Chart::base_with_circle(std::f64::consts::TAU);
        let id = CoFrame::identity(idchart, 4);
        let idf = id.forms_at(&p);
        let idgv = GradedVolumes::build(&idf, 4);
        assert_eq!(idgv.hat_top.coeff(&[0, 1, 2, 3, 4]), 1.0);
        assert_eq!(idgv.e3[0].coeff(&[1, 2, 3]), 1.0);
        assert_eq!(idgv.e2[0][1].coeff(&[2, 3]), 1.0);
    }

    #[test]
    fn su2_exp_fields_match_quaternion_exp() {
        let chart = su2_chart();
        let q = su2_exp_fields(4);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let g = Quaternion::haar(&mut rng);
            let w = g.log();
            let p = [0.0, 0.0, 0.0, 0.0, w[0], w[1], w[2]];
            assert!(chart.contains(&p));
            for c in 0..4 {
                let v = q[c].value(&p);
                assert!((v - g.0[c]).abs() < 1e-12, "component {c}");
            }
        }
    }

    #[test]
    fn su2_left_mc_satisfies_maurer_cartan_equation() {
        // Theta^i = d lambda^i + (1/2) eps_ijk lambda^j ^ lambda^k = 0
        let frames = kk_coframe_su2(
            &flat_vierbein_rows(7),
            &vec![vec![Field::zero(); 4]; 3],
        );
        let alg = LieAlgebra::su2();
        let theta = frames.raw.g_curvature(&alg);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let g = Quaternion::haar(&mut rng);
            let w = g.log();
            if w.iter().map(|x| x * x).sum::<f64>().sqrt() > 5.0 {
                continue;
            }
            let p = [0.1, -0.2, 0.3, 0.4, w[0], w[1], w[2]];
            for t in theta.iter().skip(4) {
                assert!(t.max_abs_at(&p, 2) < 1e-9);
            }
        }
    }

    #[test]
    fn su2_right_mc_structure_equation_sign() {
        // d rho^i = +(1/2) eps_ijk rho^j ^ rho^k
        let frames = kk_coframe_su2(
            &flat_vierbein_rows(7),
            &vec![vec![Field::zero(); 4]; 3],
        );
        let rho: Vec<FormField> = (4..7).map(|i| frames.dressed.one_form(i)).collect();
        let p = [0.0, 0.0, 0.0, 0.0, 0.7, -0.4, 1.1];
        for i in 0..3 {
            let d = rho[i].ext_d();
            let mut expect = FormField::zero(7, 2);
            for j in 0..3 {
                for k in 0..3 {
                    let c = LieAlgebra::su2().c[i][j][k];
                    if c != 0.0 {
                        expect = expect.add(&rho[j].wedge(&rho[k]).scale(0.5 * c));
                    }
                }
            }
            let diff = d.sub(&expect);
            assert!(diff.max_abs_at(&p, 2) < 1e-10);
        }
    }

    #[test]
    fn u1_kk_frame_field_strength() {
        // theta^4 = B x0 dx1 + ds: frame components of d theta^4 give F_01 = B
        let b = 0.7;
        let chart = Chart::base_with_circle(std::f64::consts::TAU);
        let mut a_pot = vec![Field::zero(); 4];
        a_pot[1] = Field::coord(0).scale(b);
        let frames = kk_coframe_u1(chart, &flat_vierbein_rows(5), &a_pot);
        let dth = frames.raw.one_form(4).ext_d();
        let p = [0.3, 0.1, -0.2, 0.5, 1.0];
        let v = dth.eval_at(&p, 1, Basis::Coordinate);
        let f = frames.raw.frame_components(&v, &p).unwrap();
        assert!((f.coeff(&[0, 1]) - b).abs() < 1e-12);
    }
}
