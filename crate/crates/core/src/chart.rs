//! Charts: coordinate boxes with optional periodic identifications.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::field::Field;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoordSpan {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl CoordSpan {
    pub fn boxed(lo: f64, hi: f64) -> Self {
        CoordSpan {
            lo,
            hi,
            periodic: false,
        }
    }

    pub fn circle(period: f64) -> Self {
        CoordSpan {
            lo: 0.0,
            hi: period,
            periodic: true,
        }
    }

    pub fn period(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A single chart of dimension `dim()`, with per-coordinate interval and
/// periodicity flags. Periodic coordinates are identified modulo their span.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub spans: Vec<CoordSpan>,
}

impl Chart {
    pub fn new(spans: Vec<CoordSpan>) -> Self {
        for s in &spans {
            assert!(s.hi > s.lo, "empty coordinate interval");
        }
        Chart { spans }
    }

    /// Standard chart for a 4-dim base box `[-1,1]^4` times an `s`-circle.
    pub fn base_with_circle(period: f64) -> Self {
        let mut spans = vec![CoordSpan::boxed(-1.0, 1.0); 4];
        spans.push(CoordSpan::circle(period));
        Chart::new(spans)
    }

    /// 4-dim base box `[-1,1]^4`.
    pub fn base4() -> Self {
        Chart::new(vec![CoordSpan::boxed(-1.0, 1.0); 4])
    }

    pub fn dim(&self) -> usize {
        self.spans.len()
    }

    /// Wrap periodic coordinates into their fundamental interval.
    pub fn wrap(&self, p: &mut [f64]) {
        for (x, s) in p.iter_mut().zip(&self.spans) {
            if s.periodic {
                let t = s.period();
                *x = (*x - s.lo).rem_euclid(t) + s.lo;
            }
        }
    }

    /// Component-wise displacement with minimal periodic image.
    pub fn delta(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        a.iter()
            .zip(b)
            .zip(&self.spans)
            .map(|((&x, &y), s)| {
                let mut d = x - y;
                if s.periodic {
                    let t = s.period();
                    d = d.rem_euclid(t);
                    if d > t / 2.0 {
                        d -= t;
                    }
                }
                d
            })
            .collect()
    }

    /// Euclidean distance respecting periodic identifications.
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.delta(a, b).iter().map(|d| d * d).sum::<f64>().sqrt()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(&self.spans)
            .all(|(&x, s)| s.periodic || (x >= s.lo && x <= s.hi))
    }

    /// Uniform random point (seeded).
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.spans
            .iter()
            .map(|s| rng.gen_range(s.lo..s.hi))
            .collect()
    }

    /// Random interior point, shrunk away from box boundaries.
    pub fn sample_interior(&self, rng: &mut ChaCha8Rng, margin: f64) -> Vec<f64> {
        self.spans
            .iter()
            .map(|s| {
                if s.periodic {
                    rng.gen_range(s.lo..s.hi)
                } else {
                    let m = margin * s.period();
                    rng.gen_range(s.lo + m..s.hi - m)
                }
            })
            .collect()
    }

    /// Deterministic RNG for this chart's random-field generator.
    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    /// Random smooth coefficient field: sum of products of per-coordinate
    /// basis functions. Box coordinates contribute polynomials of degree at
    /// most 3, periodic coordinates trigonometric polynomials of harmonic at
    /// most 2, with coefficients uniform in [-1, 1].
    pub fn random_field(&self, rng: &mut ChaCha8Rng, terms: usize) -> Field {
        let mut parts = Vec::with_capacity(terms);
        for _ in 0..terms {
            let coeff: f64 = rng.gen_range(-1.0..1.0);
            let mut factor = Field::constant(coeff);
            for (i, s) in self.spans.iter().enumerate() {
                let z = Field::coord(i);
                let basis = if s.periodic {
                    let k = rng.gen_range(0..=2u32);
                    if k == 0 {
                        Field::one()
                    } else {
                        let omega = 2.0 * std::f64::consts::PI / s.period() * k as f64;
                        let arg = z.sub(&Field::constant(s.lo)).scale(omega);
                        if rng.gen_bool(0.5) {
                            arg.sin()
                        } else {
                            arg.cos()
                        }
                    }
                } else {
                    let p = rng.gen_range(0..=3u32);
                    match p {
                        0 => Field::one(),
                        1 => z.clone(),
                        2 => z.mul(&z),
                        _ => z.mul(&z).mul(&z),
                    }
                };
                factor = factor.mul(&basis);
            }
            parts.push(factor);
        }
        Field::sum(parts)
    }

    /// Polynomial window vanishing to third order on all box boundaries;
    /// identically 1-profiled in periodic directions. Used to model
    /// compactly supported variations.
    pub fn bump(&self) -> Field {
        let mut w = Field::one();
        for (i, s) in self.spans.iter().enumerate() {
            if s.periodic {
                continue;
            }
            let mid = 0.5 * (s.lo + s.hi);
            let half = 0.5 * s.period();
            let u = Field::coord(i).sub(&Field::constant(mid)).scale(1.0 / half);
            let one_minus = Field::one().sub(&u.mul(&u));
            w = w.mul(&one_minus.mul(&one_minus).mul(&one_minus));
        }
        w
    }
}
