//! Deterministic quadrature: tensor Gauss-Legendre on box directions,
//! trapezoid on circles (spectrally exact for trigonometric polynomials),
//! a spherical product rule on the SU(2) exponential chart, Haar Monte
//! Carlo with error bars, and fixed-order pairwise summation.

use rand_chacha::ChaCha8Rng;

use crate::chart::Chart;
use crate::lie::Quaternion;

/// Nodes and weights of `n`-point Gauss-Legendre on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for k in 0..n {
        // Chebyshev initial guess, Newton on P_n
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        nodes[n - 1 - k] = x;
        weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (nodes, weights)
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let pk = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Fixed-order pairwise summation (bit-stable regardless of thread count).
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Tensor quadrature nodes over the box directions of a chart, with the
/// trapezoid rule on periodic directions.
pub fn chart_quadrature(chart: &Chart, n_box: usize, n_circle: usize) -> Vec<(Vec<f64>, f64)> {
    let (gx, gw) = gauss_legendre(n_box);
    let mut nodes: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), 1.0)];
    for s in &chart.spans {
        let mut next = Vec::with_capacity(nodes.len() * n_box.max(n_circle));
        if s.periodic {
            let t = s.period();
            for (p, w) in &nodes {
                for k in 0..n_circle {
                    let y = s.lo + t * k as f64 / n_circle as f64;
                    let mut q = p.clone();
                    q.push(y);
                    next.push((q, w * t / n_circle as f64));
                }
            }
        } else {
            let half = 0.5 * s.period();
            let mid = 0.5 * (s.lo + s.hi);
            for (p, w) in &nodes {
                for (x, wx) in gx.iter().zip(&gw) {
                    let mut q = p.clone();
                    q.push(mid + half * x);
                    next.push((q, w * wx * half));
                }
            }
        }
        nodes = next;
    }
    nodes
}

/// Deterministic Haar samples on SU(2).
pub fn haar_samples(n: usize, seed: u64) -> Vec<Quaternion> {
    let mut rng: ChaCha8Rng = Chart::rng(seed);
    (0..n).map(|_| Quaternion::haar(&mut rng)).collect()
}

/// Quadrature over the SU(2) exponential chart: spherical product rule on
/// the ball `|w| < 2 pi` (plain Lebesgue weight; the Maurer-Cartan volume
/// factor belongs to the integrand). Returns `(w, weight)` pairs.
pub fn su2_ball_quadrature(n_r: usize, n_theta: usize, n_phi: usize) -> Vec<([f64; 3], f64)> {
    let (gr, gwr) = gauss_legendre(n_r);
    let (gt, gwt) = gauss_legendre(n_theta);
    let rmax = 2.0 * std::f64::consts::PI;
    let mut out = Vec::with_capacity(n_r * n_theta * n_phi);
    for (xr, wr) in gr.iter().zip(&gwr) {
        let rho = 0.5 * rmax * (xr + 1.0);
        let jw = 0.5 * rmax * wr * rho * rho;
        for (xt, wt) in gt.iter().zip(&gwt) {
            let ct = *xt;
            let st = (1.0 - ct * ct).sqrt();
            for kp in 0..n_phi {
                let phi = std::f64::consts::TAU * kp as f64 / n_phi as f64;
                let w = [rho * st * phi.cos(), rho * st * phi.sin(), rho * ct];
                out.push((w, jw * wt * std::f64::consts::TAU / n_phi as f64));
            }
        }
    }
    out
}

/// Haar volume of SU(2) against the Maurer-Cartan volume form in the
/// `t_i = e_i/2` basis.
pub const SU2_VOLUME: f64 = 16.0 * std::f64::consts::PI * std::f64::consts::PI;
