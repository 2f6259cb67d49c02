//! Block metric on the frame index space: Minkowski `eta = diag(-1,1,1,1)`
//! on horizontal indices, a positive-definite algebra metric `k` on vertical
//! indices, zero cross blocks.

use crate::error::Error;

pub const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

#[derive(Debug, Clone)]
pub struct FrameMetric {
    pub n: usize,
    pub split: usize,
    pub k: Vec<Vec<f64>>,
    k_inv: Vec<Vec<f64>>,
}

impl FrameMetric {
    pub fn new(k: Vec<Vec<f64>>) -> Result<Self, Error> {
        let r = k.len();
        if !is_spd(&k) {
            return Err(Error::input("algebra metric must be symmetric positive definite"));
        }
        let k_inv = crate::lie::invert(&k)
            .ok_or_else(|| Error::input("algebra metric is singular"))?;
        Ok(FrameMetric {
            n: 4 + r,
            split: 4,
            k,
            k_inv,
        })
    }

    pub fn minkowski() -> Self {
        FrameMetric {
            n: 4,
            split: 4,
            k: Vec::new(),
            k_inv: Vec::new(),
        }
    }

    #[inline]
    pub fn h(&self, i: usize, j: usize) -> f64 {
        match (i < self.split, j < self.split) {
            (true, true) => {
                if i == j {
                    ETA[i]
                } else {
                    0.0
                }
            }
            (false, false) => self.k[i - self.split][j - self.split],
            _ => 0.0,
        }
    }

    #[inline]
    pub fn h_inv(&self, i: usize, j: usize) -> f64 {
        match (i < self.split, j < self.split) {
            (true, true) => {
                if i == j {
                    ETA[i]
                } else {
                    0.0
                }
            }
            (false, false) => self.k_inv[i - self.split][j - self.split],
            _ => 0.0,
        }
    }

    pub fn k_inv(&self) -> &[Vec<f64>] {
        &self.k_inv
    }
}

fn is_spd(k: &[Vec<f64>]) -> bool {
    let n = k.len();
    for i in 0..n {
        if k[i].len() != n {
            return false;
        }
        for j in 0..n {
            if (k[i][j] - k[j][i]).abs() > 1e-12 {
                return false;
            }
        }
    }
    // Cholesky attempt
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = k[i][j];
            for p in 0..j {
                s -= l[i][p] * l[j][p];
            }
            if i == j {
                if s <= 0.0 {
                    return false;
                }
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    true
}
