//! Lie algebras given by structure constants, their invariants, and adjoint
//! representations of group elements.
//!
//! Catalog algebras (u(1), su(2), su(3) and direct sums) carry exact
//! structure constants in ℚ[√3], so the Jacobi, unimodularity and
//! ad-invariance residuals are evaluated exactly and come out as literal
//! zeros, not small floats.

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;

/// Exact scalar of the form `a + b*sqrt(3)` with rational `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Q3 {
    pub a: Rational64,
    pub b: Rational64,
}

impl Q3 {
    pub const fn zero() -> Q3 {
        Q3 {
            a: Rational64::new_raw(0, 1),
            b: Rational64::new_raw(0, 1),
        }
    }

    pub fn rational(n: i64, d: i64) -> Q3 {
        Q3 {
            a: Rational64::new(n, d),
            b: Rational64::zero(),
        }
    }

    pub fn sqrt3(n: i64, d: i64) -> Q3 {
        Q3 {
            a: Rational64::zero(),
            b: Rational64::new(n, d),
        }
    }

    pub fn add(self, o: Q3) -> Q3 {
        Q3 {
            a: self.a + o.a,
            b: self.b + o.b,
        }
    }

    pub fn sub(self, o: Q3) -> Q3 {
        Q3 {
            a: self.a - o.a,
            b: self.b - o.b,
        }
    }

    pub fn mul(self, o: Q3) -> Q3 {
        // (a + b√3)(c + d√3) = ac + 3bd + (ad + bc)√3
        Q3 {
            a: self.a * o.a + Rational64::from_integer(3) * self.b * o.b,
            b: self.a * o.b + self.b * o.a,
        }
    }

    pub fn neg(self) -> Q3 {
        Q3 {
            a: -self.a,
            b: -self.b,
        }
    }

    pub fn is_zero(self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn abs_f64(self) -> f64 {
        self.to_f64().abs()
    }

    pub fn to_f64(self) -> f64 {
        let r = |q: Rational64| *q.numer() as f64 / *q.denom() as f64;
        r(self.a) + r(self.b) * 3.0_f64.sqrt()
    }
}

/// Tag of the group integrating a catalog algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupTag {
    U1,
    Su2,
    Su3,
    Product,
}

/// A Lie algebra by structure constants `c^k_ij` plus an ad-invariant
/// positive-definite metric `k_ij`.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    pub dim: usize,
    /// Dense `c[k][i][j]` with `[t_i, t_j] = c^k_ij t_k`.
    pub c: Vec<Vec<Vec<f64>>>,
    /// Metric on the algebra.
    pub k_metric: Vec<Vec<f64>>,
    /// Exact structure constants, when the algebra comes from the catalog.
    pub c_exact: Option<Vec<Vec<Vec<Q3>>>>,
    pub k_exact: Option<Vec<Vec<Q3>>>,
    pub tag: GroupTag,
}

impl LieAlgebra {
    pub fn from_f64(
        c: Vec<Vec<Vec<f64>>>,
        k_metric: Vec<Vec<f64>>,
        tag: GroupTag,
    ) -> Result<Self, Error> {
        let r = c.len();
        if c.iter().any(|m| m.len() != r || m.iter().any(|row| row.len() != r)) {
            return Err(Error::input("structure constant array is not r x r x r"));
        }
        if k_metric.len() != r || k_metric.iter().any(|row| row.len() != r) {
            return Err(Error::input("metric is not r x r"));
        }
        for k in 0..r {
            for i in 0..r {
                for j in 0..r {
                    if (c[k][i][j] + c[k][j][i]).abs() > 1e-14 {
                        return Err(Error::input(
                            "structure constants not antisymmetric in lower indices",
                        ));
                    }
                }
            }
        }
        for i in 0..r {
            for j in 0..r {
                if (k_metric[i][j] - k_metric[j][i]).abs() > 1e-14 {
                    return Err(Error::input("metric not symmetric"));
                }
            }
        }
        Ok(LieAlgebra {
            dim: r,
            c,
            k_metric,
            c_exact: None,
            k_exact: None,
            tag,
        })
    }

    /// Build without the antisymmetry gate; for diagnostic arrays fed to the
    /// residual operations.
    pub fn from_raw_parts(
        c: Vec<Vec<Vec<f64>>>,
        k_metric: Vec<Vec<f64>>,
        tag: GroupTag,
    ) -> Self {
        let dim = c.len();
        LieAlgebra {
            dim,
            c,
            k_metric,
            c_exact: None,
            k_exact: None,
            tag,
        }
    }

    fn from_exact(c: Vec<Vec<Vec<Q3>>>, k: Vec<Vec<Q3>>, tag: GroupTag) -> Self {
        let r = c.len();
        let cf = (0..r)
            .map(|a| {
                (0..r)
                    .map(|b| (0..r).map(|d| c[a][b][d].to_f64()).collect())
                    .collect()
            })
            .collect();
        let kf = (0..r)
            .map(|a| (0..r).map(|b| k[a][b].to_f64()).collect())
            .collect();
        LieAlgebra {
            dim: r,
            c: cf,
            k_metric: kf,
            c_exact: Some(c),
            k_exact: Some(k),
            tag,
        }
    }

    /// u(1): one-dimensional abelian algebra.
    pub fn u1() -> Self {
        LieAlgebra::from_exact(
            vec![vec![vec![Q3::zero()]]],
            vec![vec![Q3::rational(1, 1)]],
            GroupTag::U1,
        )
    }

    /// su(2) with `c^k_ij = epsilon_ijk` and metric `k = lambda * identity`.
    pub fn su2() -> Self {
        Self::su2_scaled(1.0)
    }

    pub fn su2_scaled(lambda: f64) -> Self {
        let mut c = vec![vec![vec![Q3::zero(); 3]; 3]; 3];
        let eps: [(usize, usize, usize, i64); 6] = [
            (0, 1, 2, 1),
            (1, 2, 0, 1),
            (2, 0, 1, 1),
            (1, 0, 2, -1),
            (2, 1, 0, -1),
            (0, 2, 1, -1),
        ];
        for (i, j, k, s) in eps {
            c[k][i][j] = Q3::rational(s, 1);
        }
        let mut alg = LieAlgebra::from_exact(c, identity_exact(3), GroupTag::Su2);
        if lambda != 1.0 {
            for i in 0..3 {
                alg.k_metric[i][i] = lambda;
            }
            alg.k_exact = None;
        }
        alg
    }

    /// su(3) with the standard totally antisymmetric constants in the
    /// Gell-Mann basis and metric `k = identity`.
    pub fn su3() -> Self {
        let mut c = vec![vec![vec![Q3::zero(); 8]; 8]; 8];
        // nonzero f_{ijk} up to total antisymmetry, 1-based indices
        let f: [(usize, usize, usize, Q3); 9] = [
            (1, 2, 3, Q3::rational(1, 1)),
            (1, 4, 7, Q3::rational(1, 2)),
            (1, 5, 6, Q3::rational(-1, 2)),
            (2, 4, 6, Q3::rational(1, 2)),
            (2, 5, 7, Q3::rational(1, 2)),
            (3, 4, 5, Q3::rational(1, 2)),
            (3, 6, 7, Q3::rational(-1, 2)),
            (4, 5, 8, Q3::sqrt3(1, 2)),
            (6, 7, 8, Q3::sqrt3(1, 2)),
        ];
        for &(i, j, k, v) in &f {
            let (i, j, k) = (i - 1, j - 1, k - 1);
            // all even permutations get +v, odd get -v; c[k][i][j] = f_{ijk}
            let perms: [(usize, usize, usize, bool); 6] = [
                (i, j, k, true),
                (j, k, i, true),
                (k, i, j, true),
                (j, i, k, false),
                (i, k, j, false),
                (k, j, i, false),
            ];
            for (a, b, d, even) in perms {
                c[d][a][b] = if even { v } else { v.neg() };
            }
        }
        LieAlgebra::from_exact(c, identity_exact(8), GroupTag::Su3)
    }

    /// Block direct sum; metric blocks concatenated.
    pub fn direct_sum(parts: &[LieAlgebra]) -> Self {
        let dim: usize = parts.iter().map(|p| p.dim).sum();
        let mut c = vec![vec![vec![Q3::zero(); dim]; dim]; dim];
        let mut k = vec![vec![Q3::zero(); dim]; dim];
        let exact = parts.iter().all(|p| p.c_exact.is_some() && p.k_exact.is_some());
        let mut off = 0;
        let mut cf = vec![vec![vec![0.0; dim]; dim]; dim];
        let mut kf = vec![vec![0.0; dim]; dim];
        for p in parts {
            for a in 0..p.dim {
                for b in 0..p.dim {
                    kf[off + a][off + b] = p.k_metric[a][b];
                    if let Some(ke) = &p.k_exact {
                        k[off + a][off + b] = ke[a][b];
                    }
                    for d in 0..p.dim {
                        cf[off + d][off + a][off + b] = p.c[d][a][b];
                        if let Some(ce) = &p.c_exact {
                            c[off + d][off + a][off + b] = ce[d][a][b];
                        }
                    }
                }
            }
            off += p.dim;
        }
        LieAlgebra {
            dim,
            c: cf,
            k_metric: kf,
            c_exact: if exact { Some(c) } else { None },
            k_exact: if exact { Some(k) } else { None },
            tag: GroupTag::Product,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.c
            .iter()
            .all(|m| m.iter().all(|row| row.iter().all(|&x| x == 0.0)))
    }
}

fn identity_exact(n: usize) -> Vec<Vec<Q3>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        Q3 {
                            a: Rational64::one(),
                            b: Rational64::zero(),
                        }
                    } else {
                        Q3::zero()
                    }
                })
                .collect()
        })
        .collect()
}

/// Max-abs Jacobi identity violation over all index quadruples.
pub fn jacobi_residual(alg: &LieAlgebra) -> f64 {
    if let Some(c) = &alg.c_exact {
        let r = alg.dim;
        let mut max = Rational64::zero();
        let mut maxq: Option<Q3> = None;
        for m in 0..r {
            for i in 0..r {
                for j in 0..r {
                    for k in 0..r {
                        let mut s = Q3::zero();
                        for l in 0..r {
                            s = s
                                .add(c[m][i][l].mul(c[l][j][k]))
                                .add(c[m][j][l].mul(c[l][k][i]))
                                .add(c[m][k][l].mul(c[l][i][j]));
                        }
                        if !s.is_zero() {
                            let mag = s.a.abs() + s.b.abs();
                            if maxq.is_none() || mag > max {
                                max = mag;
                                maxq = Some(s);
                            }
                        }
                    }
                }
            }
        }
        return maxq.map(|q| q.abs_f64()).unwrap_or(0.0);
    }
    let r = alg.dim;
    let c = &alg.c;
    let mut max: f64 = 0.0;
    for m in 0..r {
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    let mut s = 0.0;
                    for l in 0..r {
                        s += c[m][i][l] * c[l][j][k]
                            + c[m][j][l] * c[l][k][i]
                            + c[m][k][l] * c[l][i][j];
                    }
                    max = max.max(s.abs());
                }
            }
        }
    }
    max
}

/// Max-abs trace of the adjoint maps: `|sum_i c^i_ij|`.
pub fn unimodularity_residual(alg: &LieAlgebra) -> f64 {
    if let Some(c) = &alg.c_exact {
        let r = alg.dim;
        let mut worst = 0.0_f64;
        for j in 0..r {
            let mut s = Q3::zero();
            for i in 0..r {
                s = s.add(c[i][i][j]);
            }
            if !s.is_zero() {
                worst = worst.max(s.abs_f64());
            }
        }
        return worst;
    }
    let r = alg.dim;
    let mut worst = 0.0_f64;
    for j in 0..r {
        let s: f64 = (0..r).map(|i| alg.c[i][i][j]).sum();
        worst = worst.max(s.abs());
    }
    worst
}

/// Killing form `B_jk = c^m_jn c^n_km`.
pub fn killing_form(alg: &LieAlgebra) -> Vec<Vec<f64>> {
    let r = alg.dim;
    if let Some(c) = &alg.c_exact {
        let mut b = vec![vec![0.0; r]; r];
        for j in 0..r {
            for k in 0..r {
                let mut s = Q3::zero();
                for m in 0..r {
                    for n in 0..r {
                        s = s.add(c[m][j][n].mul(c[n][k][m]));
                    }
                }
                b[j][k] = if s.is_zero() { 0.0 } else { s.to_f64() };
            }
        }
        return b;
    }
    let c = &alg.c;
    let mut b = vec![vec![0.0; r]; r];
    for j in 0..r {
        for k in 0..r {
            let mut s = 0.0;
            for m in 0..r {
                for n in 0..r {
                    s += c[m][j][n] * c[n][k][m];
                }
            }
            b[j][k] = s;
        }
    }
    b
}

/// The contraction `(1/2) c^i_lk c^l_ij k^{jk}` shifting the cosmological
/// constant; equals `(1/2) B_jk k^{jk}`.
pub fn killing_contraction(alg: &LieAlgebra) -> Result<f64, Error> {
    let kinv = invert(&alg.k_metric)
        .ok_or_else(|| Error::input("algebra metric is singular"))?;
    let r = alg.dim;
    let c = &alg.c;
    let mut s = 0.0;
    for i in 0..r {
        for l in 0..r {
            for k in 0..r {
                for j in 0..r {
                    s += 0.5 * c[i][l][k] * c[l][i][j] * kinv[j][k];
                }
            }
        }
    }
    Ok(s)
}

/// Independent route for the same contraction via the Killing form.
pub fn killing_contraction_via_form(alg: &LieAlgebra) -> Result<f64, Error> {
    let kinv = invert(&alg.k_metric)
        .ok_or_else(|| Error::input("algebra metric is singular"))?;
    let b = killing_form(alg);
    let r = alg.dim;
    let mut s = 0.0;
    for j in 0..r {
        for k in 0..r {
            s += 0.5 * b[j][k] * kinv[j][k];
        }
    }
    Ok(s)
}

/// Max-abs violation of `k_ml c^l_ij + k_jl c^l_im = 0`.
pub fn ad_invariance_residual(alg: &LieAlgebra) -> f64 {
    let r = alg.dim;
    if let (Some(c), Some(k)) = (&alg.c_exact, &alg.k_exact) {
        let mut worst = 0.0_f64;
        for i in 0..r {
            for j in 0..r {
                for m in 0..r {
                    let mut s = Q3::zero();
                    for l in 0..r {
                        s = s.add(k[m][l].mul(c[l][i][j])).add(k[j][l].mul(c[l][i][m]));
                    }
                    if !s.is_zero() {
                        worst = worst.max(s.abs_f64());
                    }
                }
            }
        }
        return worst;
    }
    let c = &alg.c;
    let k = &alg.k_metric;
    let mut worst = 0.0_f64;
    for i in 0..r {
        for j in 0..r {
            for m in 0..r {
                let mut s = 0.0;
                for l in 0..r {
                    s += k[m][l] * c[l][i][j] + k[j][l] * c[l][i][m];
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

/// Dense matrix inverse by Gauss-Jordan with partial pivoting.
pub fn invert(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv = vec![vec![0.0; n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        inv.swap(col, piv);
        let d = a[col][col];
        for x in a[col].iter_mut() {
            *x /= d;
        }
        for x in inv[col].iter_mut() {
            *x /= d;
        }
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                if f != 0.0 {
                    for k in 0..n {
                        let v = a[col][k];
                        a[row][k] -= f * v;
                        let w = inv[col][k];
                        inv[row][k] -= f * w;
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Unit quaternion, scalar part first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion(pub [f64; 4]);

impl Quaternion {
    pub fn identity() -> Self {
        Quaternion([1.0, 0.0, 0.0, 0.0])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn normalize(&self) -> Self {
        let n = self.norm();
        Quaternion([self.0[0] / n, self.0[1] / n, self.0[2] / n, self.0[3] / n])
    }

    pub fn mul(&self, o: &Quaternion) -> Quaternion {
        let [a0, a1, a2, a3] = self.0;
        let [b0, b1, b2, b3] = o.0;
        Quaternion([
            a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
            a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
            a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
            a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
        ])
    }

    pub fn conj(&self) -> Quaternion {
        Quaternion([self.0[0], -self.0[1], -self.0[2], -self.0[3]])
    }

    /// Exponential of `w^i t_i` with `t_i = e_i / 2`.
    pub fn exp(w: &[f64; 3]) -> Quaternion {
        let rho = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
        if rho < 1e-300 {
            return Quaternion::identity();
        }
        let c = (rho / 2.0).cos();
        let s = (rho / 2.0).sin() / rho;
        Quaternion([c, s * w[0], s * w[1], s * w[2]])
    }

    /// Principal logarithm: `w` with `exp(w) = self`, `|w| < 2 pi`.
    pub fn log(&self) -> [f64; 3] {
        let vn = (self.0[1] * self.0[1] + self.0[2] * self.0[2] + self.0[3] * self.0[3]).sqrt();
        if vn < 1e-300 {
            return [0.0, 0.0, 0.0];
        }
        let half = vn.atan2(self.0[0]);
        let f = 2.0 * half / vn;
        [f * self.0[1], f * self.0[2], f * self.0[3]]
    }

    /// Rotation matrix of the conjugation action on pure quaternions.
    pub fn rotation(&self) -> [[f64; 3]; 3] {
        let [w, x, y, z] = self.0;
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }

    /// Haar-uniform sample.
    pub fn haar(rng: &mut ChaCha8Rng) -> Quaternion {
        loop {
            let mut q = [0.0; 4];
            let mut n2 = 0.0;
            for x in q.iter_mut() {
                // Box-Muller from two uniforms
                let u: f64 = rng.gen_range(1e-12..1.0);
                let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                *x = (-2.0 * u.ln()).sqrt() * v.cos();
                n2 += *x * *x;
            }
            if n2 > 1e-12 {
                return Quaternion(q).normalize();
            }
        }
    }
}

/// Group element of a catalog group.
#[derive(Debug, Clone, PartialEq)]
pub enum GroupElement {
    U1 { angle: f64 },
    Su2(Quaternion),
    Product(Vec<GroupElement>),
}

impl GroupElement {
    pub fn identity_for(alg: &LieAlgebra) -> Result<GroupElement, Error> {
        match alg.tag {
            GroupTag::U1 => Ok(GroupElement::U1 { angle: 0.0 }),
            GroupTag::Su2 => Ok(GroupElement::Su2(Quaternion::identity())),
            GroupTag::Su3 | GroupTag::Product => Err(Error::input(
                "group elements are provided only for u(1) and su(2) factors",
            )),
        }
    }

    pub fn mul(&self, o: &GroupElement) -> Result<GroupElement, Error> {
        match (self, o) {
            (GroupElement::U1 { angle: a }, GroupElement::U1 { angle: b }) => {
                Ok(GroupElement::U1 {
                    angle: (a + b).rem_euclid(std::f64::consts::TAU),
                })
            }
            (GroupElement::Su2(p), GroupElement::Su2(q)) => Ok(GroupElement::Su2(p.mul(q))),
            (GroupElement::Product(a), GroupElement::Product(b)) if a.len() == b.len() => {
                let parts = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| x.mul(y))
                    .collect::<Result<_, _>>()?;
                Ok(GroupElement::Product(parts))
            }
            _ => Err(Error::input("group element kinds do not match")),
        }
    }

    /// Matrix `S^i_j` of the adjoint action, `g t_j g^-1 = S^i_j t_i`.
    pub fn adjoint_matrix(&self, alg: &LieAlgebra) -> Result<Vec<Vec<f64>>, Error> {
        match (self, alg.tag) {
            (GroupElement::U1 { .. }, GroupTag::U1) => Ok(vec![vec![1.0]]),
            (GroupElement::Su2(q), GroupTag::Su2) => {
                if (q.norm() - 1.0).abs() > 1e-12 {
                    return Err(Error::input("quaternion is not unit length"));
                }
                let r = q.rotation();
                Ok(r.iter().map(|row| row.to_vec()).collect())
            }
            _ => Err(Error::input(
                "adjoint matrix supported for u(1) and su(2) elements",
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn catalog_invariants_are_exact_zero() {
        for alg in [
            LieAlgebra::u1(),
            LieAlgebra::su2(),
            LieAlgebra::su3(),
            LieAlgebra::direct_sum(&[LieAlgebra::u1(), LieAlgebra::su2(), LieAlgebra::su3()]),
        ] {
            assert_eq!(jacobi_residual(&alg), 0.0);
            assert_eq!(unimodularity_residual(&alg), 0.0);
            assert_eq!(ad_invariance_residual(&alg), 0.0);
        }
    }

    #[test]
    fn perturbed_constants_fail_jacobi() {
        // brute-force oracle over the perturbed raw array: a single entry of
        // epsilon replaced by 1.5
        let su2 = LieAlgebra::su2();
        let mut c = su2.c.clone();
        c[2][0][1] = 1.5;
        let alg = LieAlgebra::from_raw_parts(c, su2.k_metric.clone(), GroupTag::Su2);
        let res = jacobi_residual(&alg);
        assert!((res - 0.5).abs() < 1e-15, "residual {res}");
        // keeping the antisymmetric pair rescales the basis: still a Lie algebra
        let mut c2 = su2.c.clone();
        c2[2][0][1] = 1.5;
        c2[2][1][0] = -1.5;
        let alg2 = LieAlgebra::from_f64(c2, su2.k_metric.clone(), GroupTag::Su2).unwrap();
        assert_eq!(jacobi_residual(&alg2), 0.0);
    }

    #[test]
    fn two_dim_nonunimodular_example() {
        // [e1, e2] = e2
        let mut c = vec![vec![vec![0.0; 2]; 2]; 2];
        c[1][0][1] = 1.0;
        c[1][1][0] = -1.0;
        let alg =
            LieAlgebra::from_f64(c, vec![vec![1.0, 0.0], vec![0.0, 1.0]], GroupTag::Product)
                .unwrap();
        assert!((unimodularity_residual(&alg) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn killing_form_su2_is_minus_two_identity() {
        let b = killing_form(&LieAlgebra::su2());
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { -2.0 } else { 0.0 };
                assert_eq!(b[i][j], expect);
            }
        }
    }

    #[test]
    fn killing_block_structure_of_sums() {
        let alg = LieAlgebra::direct_sum(&[LieAlgebra::su2(), LieAlgebra::u1()]);
        let b = killing_form(&alg);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j && i < 3 { -2.0 } else { 0.0 };
                assert_eq!(b[i][j], expect);
            }
        }
    }

    #[test]
    fn killing_contraction_values() {
        let su2 = LieAlgebra::su2();
        let v = killing_contraction(&su2).unwrap();
        assert!((v + 3.0).abs() < 1e-12);
        let via = killing_contraction_via_form(&su2).unwrap();
        assert!((v - via).abs() < 1e-12);
        assert!((killing_contraction(&LieAlgebra::u1()).unwrap()).abs() < 1e-15);
        // inverse-metric scaling at lambda = 2
        let scaled = LieAlgebra::su2_scaled(2.0);
        assert!((killing_contraction(&scaled).unwrap() + 1.5).abs() < 1e-12);
        // su(3) is compact semisimple: contraction strictly negative
        assert!(killing_contraction(&LieAlgebra::su3()).unwrap() < 0.0);
    }

    #[test]
    fn ad_invariance_detects_bad_metric() {
        let mut alg = LieAlgebra::su2();
        alg.k_metric = vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ];
        alg.k_exact = None;
        assert!(ad_invariance_residual(&alg) > 0.5);
    }

    #[test]
    fn adjoint_is_rotation_and_homomorphism() {
        let su2 = LieAlgebra::su2();
        // rotation by pi/2 about axis 3
        let g = GroupElement::Su2(Quaternion::exp(&[0.0, 0.0, std::f64::consts::FRAC_PI_2]));
        let s = g.adjoint_matrix(&su2).unwrap();
        let expect = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((s[i][j] - expect[i][j]).abs() < 1e-12);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let a = GroupElement::Su2(Quaternion::haar(&mut rng));
            let b = GroupElement::Su2(Quaternion::haar(&mut rng));
            let sab = a.mul(&b).unwrap().adjoint_matrix(&su2).unwrap();
            let sa = a.adjoint_matrix(&su2).unwrap();
            let sb = b.adjoint_matrix(&su2).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let prod: f64 = (0..3).map(|k| sa[i][k] * sb[k][j]).sum();
                    assert!((sab[i][j] - prod).abs() < 1e-10);
                }
            }
            // S preserves k = identity
            let s = sa;
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| s[k][i] * s[k][j]).sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expect).abs() < 1e-10);
                }
            }
        }
    }
}
