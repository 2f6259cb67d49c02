//! Truncated Taylor (jet) arithmetic in `n` variables up to order 3.
//!
//! A [`Jet`] carries the value of a smooth function together with its exact
//! partial derivatives up to a chosen order at one point. All arithmetic
//! propagates derivatives by the Leibniz and chain rules, so derivatives of
//! composite expressions are exact up to floating-point rounding. Mixed
//! partials are stored once (symmetric layout), so commutation of partials
//! holds by construction.

/// Maximum supported derivative order.
pub const MAX_ORDER: usize = 3;

/// Value plus partial derivatives up to `ord` at a point, in `n` variables.
///
/// Storage is dense and symmetric: gradient of length `n`, Hessian over pairs
/// `i <= j`, third derivatives over triples `i <= j <= k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub n: usize,
    pub ord: usize,
    pub v: f64,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub t: Vec<f64>,
}

#[inline]
fn pairs(n: usize) -> usize {
    n * (n + 1) / 2
}

#[inline]
fn triples(n: usize) -> usize {
    n * (n + 1) * (n + 2) / 6
}

/// Index of the unordered pair `(i, j)` with `i <= j` in the symmetric layout.
#[inline]
pub fn hidx(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < n);
    pairs(n) - pairs(n - i) + (j - i)
}

/// Index of the unordered triple `(i, j, k)` with `i <= j <= k`.
#[inline]
pub fn tidx(n: usize, i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i <= j && j <= k && k < n);
    let m = n - i;
    triples(n) - triples(m) + pairs(m) - pairs(m - (j - i)) + (k - j)
}

#[inline]
fn sort2(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

#[inline]
fn sort3(a: usize, b: usize, c: usize) -> (usize, usize, usize) {
    let (x, y) = sort2(a, b);
    if c >= y {
        (x, y, c)
    } else if c >= x {
        (x, c, y)
    } else {
        (c, x, y)
    }
}

impl Jet {
    pub fn constant(n: usize, ord: usize, v: f64) -> Self {
        assert!(ord <= MAX_ORDER);
        Jet {
            n,
            ord,
            v,
            g: if ord >= 1 { vec![0.0; n] } else { Vec::new() },
            h: if ord >= 2 { vec![0.0; pairs(n)] } else { Vec::new() },
            t: if ord >= 3 { vec![0.0; triples(n)] } else { Vec::new() },
        }
    }

    /// Seed for the coordinate `idx` with value `v` (unit gradient entry).
    pub fn var(n: usize, ord: usize, idx: usize, v: f64) -> Self {
        let mut j = Jet::constant(n, ord, v);
        if ord >= 1 {
            j.g[idx] = 1.0;
        }
        j
    }

    /// Seed jets for a full coordinate point.
    pub fn seed(point: &[f64], ord: usize) -> Vec<Jet> {
        let n = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &x)| Jet::var(n, ord, i, x))
            .collect()
    }

    fn truncate(&self, ord: usize) -> Jet {
        if ord >= self.ord {
            return self.clone();
        }
        let mut j = self.clone();
        j.ord = ord;
        if ord < 3 {
            j.t = Vec::new();
        }
        if ord < 2 {
            j.h = Vec::new();
        }
        if ord < 1 {
            j.g = Vec::new();
        }
        j
    }

    pub fn add(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a + b)
    }

    pub fn sub(&self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a - b)
    }

    fn zip(&self, o: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        assert_eq!(self.n, o.n, "jet dimension mismatch");
        let ord = self.ord.min(o.ord);
        let a = self.truncate(ord);
        let b = o.truncate(ord);
        let mut r = a;
        r.v = f(r.v, b.v);
        for (x, y) in r.g.iter_mut().zip(&b.g) {
            *x = f(*x, *y);
        }
        for (x, y) in r.h.iter_mut().zip(&b.h) {
            *x = f(*x, *y);
        }
        for (x, y) in r.t.iter_mut().zip(&b.t) {
            *x = f(*x, *y);
        }
        r
    }

    pub fn scale(&self, s: f64) -> Jet {
        let mut r = self.clone();
        r.v *= s;
        r.g.iter_mut().for_each(|x| *x *= s);
        r.h.iter_mut().for_each(|x| *x *= s);
        r.t.iter_mut().for_each(|x| *x *= s);
        r
    }

    pub fn neg(&self) -> Jet {
        self.scale(-1.0)
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        assert_eq!(self.n, o.n, "jet dimension mismatch");
        let ord = self.ord.min(o.ord);
        let n = self.n;
        let a = self;
        let b = o;
        let mut r = Jet::constant(n, ord, a.v * b.v);
        if ord >= 1 {
            for i in 0..n {
                r.g[i] = a.g[i] * b.v + a.v * b.g[i];
            }
        }
        if ord >= 2 {
            for i in 0..n {
                for j in i..n {
                    r.h[hidx(n, i, j)] = a.h[hidx(n, i, j)] * b.v
                        + a.g[i] * b.g[j]
                        + a.g[j] * b.g[i]
                        + a.v * b.h[hidx(n, i, j)];
                }
            }
        }
        if ord >= 3 {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        let hij = hidx(n, i, j);
                        let hik = hidx(n, i, k);
                        let hjk = hidx(n, j, k);
                        r.t[tidx(n, i, j, k)] = a.t[tidx(n, i, j, k)] * b.v
                            + a.h[hij] * b.g[k]
                            + a.h[hik] * b.g[j]
                            + a.h[hjk] * b.g[i]
                            + a.g[i] * b.h[hjk]
                            + a.g[j] * b.h[hik]
                            + a.g[k] * b.h[hij]
                            + a.v * b.t[tidx(n, i, j, k)];
                    }
                }
            }
        }
        r
    }

    /// Chain rule for a univariate analytic map applied to this jet.
    /// `d` holds the value and first three derivatives of the outer map at `self.v`.
    pub fn chain(&self, d: [f64; 4]) -> Jet {
        let n = self.n;
        let ord = self.ord;
        let mut r = Jet::constant(n, ord, d[0]);
        if ord >= 1 {
            for i in 0..n {
                r.g[i] = d[1] * self.g[i];
            }
        }
        if ord >= 2 {
            for i in 0..n {
                for j in i..n {
                    r.h[hidx(n, i, j)] =
                        d[2] * self.g[i] * self.g[j] + d[1] * self.h[hidx(n, i, j)];
                }
            }
        }
        if ord >= 3 {
            for i in 0..n {
                for j in i..n {
                    for k in j..n {
                        r.t[tidx(n, i, j, k)] = d[3] * self.g[i] * self.g[j] * self.g[k]
                            + d[2]
                                * (self.h[hidx(n, i, j)] * self.g[k]
                                    + self.h[hidx(n, i, k)] * self.g[j]
                                    + self.h[hidx(n, j, k)] * self.g[i])
                            + d[1] * self.t[tidx(n, i, j, k)];
                    }
                }
            }
        }
        r
    }

    pub fn sin(&self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain([s, c, -s, -c])
    }

    pub fn cos(&self) -> Jet {
        let (s, c) = self.v.sin_cos();
        self.chain([c, -s, -c, s])
    }

    pub fn exp(&self) -> Jet {
        let e = self.v.exp();
        self.chain([e, e, e, e])
    }

    pub fn sqrt(&self) -> Jet {
        let s = self.v.sqrt();
        self.chain([s, 0.5 / s, -0.25 / (s * s * s), 0.375 / (s * s * s * s * s)])
    }

    pub fn recip(&self) -> Jet {
        let v = self.v;
        self.chain([
            1.0 / v,
            -1.0 / (v * v),
            2.0 / (v * v * v),
            -6.0 / (v * v * v * v),
        ])
    }

    pub fn div(&self, o: &Jet) -> Jet {
        self.mul(&o.recip())
    }

    pub fn powi(&self, p: u32) -> Jet {
        let mut r = Jet::constant(self.n, self.ord, 1.0);
        for _ in 0..p {
            r = r.mul(self);
        }
        r
    }

    /// Multivariate truncated composition (chain rule to order 3):
    /// `outer` is a jet in the target variables, `inner` the jets of the
    /// target coordinates over the source chart.
    pub fn compose(outer: &Jet, inner: &[Jet]) -> Jet {
        assert_eq!(outer.n, inner.len(), "composition arity mismatch");
        let n = inner[0].n;
        let ord = outer
            .ord
            .min(inner.iter().map(|j| j.ord).min().unwrap_or(0));
        let m = outer.n;
        let mut r = Jet::constant(n, ord, outer.v);
        if ord >= 1 {
            for mu in 0..n {
                let mut acc = 0.0;
                for a in 0..m {
                    acc += outer.g[a] * inner[a].g[mu];
                }
                r.g[mu] = acc;
            }
        }
        if ord >= 2 {
            for mu in 0..n {
                for nu in mu..n {
                    let mut acc = 0.0;
                    for a in 0..m {
                        for b in 0..m {
                            let (s, t) = sort2(a, b);
                            acc += outer.h[hidx(m, s, t)] * inner[a].g[mu] * inner[b].g[nu];
                        }
                        acc += outer.g[a] * inner[a].h[hidx(n, mu, nu)];
                    }
                    r.h[hidx(n, mu, nu)] = acc;
                }
            }
        }
        if ord >= 3 {
            for mu in 0..n {
                for nu in mu..n {
                    for rho in nu..n {
                        let mut acc = 0.0;
                        for a in 0..m {
                            for b in 0..m {
                                let (s, t) = sort2(a, b);
                                let hab = outer.h[hidx(m, s, t)];
                                if hab != 0.0 {
                                    acc += hab
                                        * (inner[a].h[hidx(n, mu, nu)] * inner[b].g[rho]
                                            + inner[a].h[hidx(n, mu, rho)] * inner[b].g[nu]
                                            + inner[a].h[hidx(n, nu, rho)] * inner[b].g[mu]);
                                }
                                for c in 0..m {
                                    let (x, y, z) = sort3(a, b, c);
                                    acc += outer.t[tidx(m, x, y, z)]
                                        * inner[a].g[mu]
                                        * inner[b].g[nu]
                                        * inner[c].g[rho];
                                }
                            }
                            acc += outer.g[a] * inner[a].t[tidx(n, mu, nu, rho)];
                        }
                        r.t[tidx(n, mu, nu, rho)] = acc;
                    }
                }
            }
        }
        r
    }

    /// Derivative slot extraction: the jet of `∂f/∂x_d`, one order lower.
    pub fn partial(&self, d: usize) -> Jet {
        assert!(
            self.ord >= 1,
            "partial derivative requested from an order-0 jet (seed order too low)"
        );
        let n = self.n;
        let ord = self.ord - 1;
        let mut r = Jet::constant(n, ord, self.g[d]);
        if ord >= 1 {
            for i in 0..n {
                let (a, b) = sort2(d, i);
                r.g[i] = self.h[hidx(n, a, b)];
            }
        }
        if ord >= 2 {
            for i in 0..n {
                for j in i..n {
                    let (a, b, c) = sort3(d, i, j);
                    r.h[hidx(n, i, j)] = self.t[tidx(n, a, b, c)];
                }
            }
        }
        r
    }

    /// Second partial value shortcut (requires `ord >= 2`).
    pub fn d2(&self, i: usize, j: usize) -> f64 {
        let (a, b) = sort2(i, j);
        self.h[hidx(self.n, a, b)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f_sample(x: &[Jet]) -> Jet {
        // f = sin(x0 * x1) + x2^3 * exp(x0) - x1 / (2 + x2)
        let a = x[0].mul(&x[1]).sin();
        let b = x[2].powi(3).mul(&x[0].exp());
        let c = x[1].div(&x[2].add(&Jet::constant(x[0].n, x[0].ord, 2.0)));
        a.add(&b).sub(&c)
    }

    fn f_val(p: &[f64]) -> f64 {
        (p[0] * p[1]).sin() + p[2].powi(3) * p[0].exp() - p[1] / (2.0 + p[2])
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let p = [0.3, -0.7, 0.9];
        let j = f_sample(&Jet::seed(&p, 3));
        assert!((j.v - f_val(&p)).abs() < 1e-14);
        let h = 1e-5;
        for d in 0..3 {
            let mut pp = p;
            let mut pm = p;
            pp[d] += h;
            pm[d] -= h;
            let fd = (f_val(&pp) - f_val(&pm)) / (2.0 * h);
            assert!((j.g[d] - fd).abs() < 1e-9, "grad {d}: {} vs {}", j.g[d], fd);
        }
    }

    #[test]
    fn hessian_and_third_match_finite_differences() {
        let p = [0.3, -0.7, 0.9];
        let j = f_sample(&Jet::seed(&p, 3));
        let h = 1e-4;
        for a in 0..3 {
            for b in a..3 {
                let g = |q: &[f64]| {
                    let jj = f_sample(&Jet::seed(q, 1));
                    jj.g[a]
                };
                let mut pp = p.to_vec();
                let mut pm = p.to_vec();
                pp[b] += h;
                pm[b] -= h;
                let fd = (g(&pp) - g(&pm)) / (2.0 * h);
                assert!((j.d2(a, b) - fd).abs() < 1e-7);
            }
        }
        // third: finite difference of second partials from order-2 jets
        for a in 0..3 {
            for b in a..3 {
                for c in b..3 {
                    let g = |q: &[f64]| f_sample(&Jet::seed(q, 2)).d2(a, b);
                    let mut pp = p.to_vec();
                    let mut pm = p.to_vec();
                    pp[c] += h;
                    pm[c] -= h;
                    let fd = (g(&pp) - g(&pm)) / (2.0 * h);
                    assert!((j.t[tidx(3, a, b, c)] - fd).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn partial_extraction_consistent() {
        let p = [0.4, 1.1, -0.2];
        let j3 = f_sample(&Jet::seed(&p, 3));
        let d0 = j3.partial(0);
        assert_eq!(d0.ord, 2);
        assert!((d0.v - j3.g[0]).abs() == 0.0);
        for i in 0..3 {
            assert_eq!(d0.g[i], j3.d2(0, i));
        }
        // second-level extraction agrees with symmetric third derivatives
        let d01 = d0.partial(1);
        assert_eq!(d01.v, j3.d2(0, 1));
        let d10 = j3.partial(1).partial(0);
        assert_eq!(d01.v, d10.v);
        for i in 0..3 {
            assert_eq!(d01.g[i], d10.g[i]);
        }
    }

    #[test]
    fn index_maps_are_bijective() {
        let n = 7;
        let mut seen = vec![false; n * (n + 1) * (n + 2) / 6];
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let idx = tidx(n, i, j, k);
                    assert!(!seen[idx]);
                    seen[idx] = true;
                }
            }
        }
        assert!(seen.iter().all(|&x| x));
    }
}
