//! The cancellation mechanism: fiber averages of divergence-form auxiliary
//! terms vanish over compact fibers. Circle fibers use the trapezoid rule
//! (exact for trigonometric polynomials); SU(2) fibers use Haar Monte Carlo
//! with a reported statistical error bar.

use crate::chart::Chart;
use crate::error::Error;
use crate::field::Field;
use crate::lie::LieAlgebra;
use crate::variational::quad::{haar_samples, pairwise_sum};

/// Mean of `d p / d s` over the fiber circle at base point `x`.
pub fn fiber_average_ds(
    chart: &Chart,
    p: &Field,
    x: &[f64],
    nodes: usize,
) -> Result<f64, Error> {
    let span = *chart
        .spans
        .last()
        .ok_or_else(|| Error::input("chart has no fiber coordinate"))?;
    if !span.periodic {
        return Err(Error::precondition("fiber coordinate is not periodic"));
    }
    let dp = p.partial(chart.dim() - 1);
    let mut vals = Vec::with_capacity(nodes);
    for k in 0..nodes {
        let s = span.lo + span.period() * k as f64 / nodes as f64;
        let mut z = x.to_vec();
        z.push(s);
        vals.push(dp.eval_at(&z, 1).v);
    }
    Ok(pairwise_sum(&vals) / nodes as f64)
}

/// Monte Carlo fiber average of the summed vertical divergence
/// `sum_k d_k p_i^{ak}` of an adjoint-dressed momentum family
/// `p_i^{ak}(x, g) = (S^{-1})^j_i S^k_m u_j^{am}(x)`.
///
/// Vertical frame derivatives of the dressing are algebraic:
/// `d_{V_k} S = ad_{t_k} S`, so the divergence at a Haar sample needs only
/// the adjoint matrix. Returns `(mean, sigma_of_mean)` per `(i, a)` slot.
pub struct DressedDivergenceAverage {
    pub mean: Vec<Vec<f64>>,
    pub sigma: Vec<Vec<f64>>,
    pub samples: usize,
}

pub fn cancellation_average_su2(
    alg: &LieAlgebra,
    u: &[Vec<Vec<Field>>],
    x: &[f64],
    samples: usize,
    seed: u64,
) -> Result<DressedDivergenceAverage, Error> {
    if alg.tag != crate::lie::GroupTag::Su2 {
        return Err(Error::input("Haar averaging implemented for su(2)"));
    }
    let r = alg.dim;
    let c = &alg.c;
    let qs = haar_samples(samples, seed);
    // u-values at the base point
    let uvals: Vec<Vec<Vec<f64>>> = u
        .iter()
        .map(|ui| {
            ui.iter()
                .map(|ua| ua.iter().map(|f| f.value(x)).collect())
                .collect()
        })
        .collect();
    let mut acc: Vec<Vec<Vec<f64>>> = vec![vec![Vec::with_capacity(samples); 4]; r];
    for q in &qs {
        let s = q.rotation();
        // sum_k d_k p_i^{ak} = sum over the two dressing slots:
        //   -(S^-1 ad_{t_k})^j_i S^k_m u + (S^-1)^j_i (ad_{t_k} S)^k_m u
        // the second sum vanishes by unimodularity; keep it for honesty
        for i in 0..r {
            for a in 0..4 {
                let mut v = 0.0;
                for k in 0..r {
                    for j in 0..r {
                        for m in 0..r {
                            // (S^-1)^j_p c^p_{ki} S^k_m, with S^-1 = S^T
                            let mut t1 = 0.0;
                            for p in 0..r {
                                t1 += s[p][j] * c[p][k][i];
                            }
                            v -= t1 * s[k][m] * uvals[j][a][m];
                            // (S^-1)^j_i c^k_{kl} S^l_m
                            let mut t2 = 0.0;
                            for l in 0..r {
                                t2 += c[k][k][l] * s[l][m];
                            }
                            v += s[i][j] * t2 * uvals[j][a][m];
                        }
                    }
                }
                acc[i][a].push(v);
            }
        }
    }
    let mut mean = vec![vec![0.0; 4]; r];
    let mut sigma = vec![vec![0.0; 4]; r];
    for i in 0..r {
        for a in 0..4 {
            let vals = &acc[i][a];
            let m = pairwise_sum(vals) / samples as f64;
            let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>()
                / (samples as f64 - 1.0);
            mean[i][a] = m;
            sigma[i][a] = (var / samples as f64).sqrt();
        }
    }
    Ok(DressedDivergenceAverage {
        mean,
        sigma,
        samples,
    })
}
