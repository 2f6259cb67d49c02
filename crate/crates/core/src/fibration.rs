//! Numerical fibration diagnostics: integration of vertical leaves, closure
//! and period detection through a Poincare section, fiber flux integrals and
//! their base-independence, Frobenius and commuting-flow residuals, the
//! holonomy map, and the normalized fiber coordinate.

use crate::error::Error;
use crate::forms::Basis;
use crate::frame::CoFrame;
use crate::lie::Quaternion;

/// Dormand-Prince 5(4) step: returns (y5, y4) proposals.
fn dp_step(
    rhs: &mut impl FnMut(f64, &[f64]) -> Result<Vec<f64>, Error>,
    t: f64,
    y: &[f64],
    h: f64,
) -> Result<(Vec<f64>, Vec<f64>), Error> {
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let n = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    k.push(rhs(t, y)?);
    for s in 0..6 {
        let mut ys = y.to_vec();
        for (j, kj) in k.iter().enumerate() {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..n {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k.push(rhs(t + C[s] * h, &ys)?);
    }
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    let mut y5 = y.to_vec();
    let mut y4 = y.to_vec();
    for (j, kj) in k.iter().enumerate() {
        for i in 0..n {
            y5[i] += h * B5[j] * kj[i];
            y4[i] += h * B4[j] * kj[i];
        }
    }
    Ok((y5, y4))
}

/// Adaptive integration; records every accepted step.
pub struct Integration {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub steps: usize,
    pub max_error_estimate: f64,
}

pub fn integrate_adaptive(
    rhs: impl FnMut(f64, &[f64]) -> Result<Vec<f64>, Error>,
    y0: &[f64],
    t_end: f64,
    tol: f64,
) -> Result<Integration, Error> {
    integrate_adaptive_capped(rhs, y0, t_end, tol, f64::INFINITY)
}

/// Adaptive integration with a hard cap on the step size (used when events
/// along the trajectory must not be skipped).
pub fn integrate_adaptive_capped(
    mut rhs: impl FnMut(f64, &[f64]) -> Result<Vec<f64>, Error>,
    y0: &[f64],
    t_end: f64,
    tol: f64,
    max_step: f64,
) -> Result<Integration, Error> {
    let mut t = 0.0;
    let mut y = y0.to_vec();
    let mut h = (t_end.abs() * 1e-3).max(1e-6).min(max_step) * t_end.signum();
    let mut times = vec![0.0];
    let mut points = vec![y.clone()];
    let mut steps = 0;
    let mut max_err = 0.0_f64;
    let dir = t_end.signum();
    while (t_end - t) * dir > 1e-14 {
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        let (y5, y4) = dp_step(&mut rhs, t, &y, h)?;
        let mut err = 0.0_f64;
        for i in 0..y.len() {
            let sc = tol + tol * y5[i].abs().max(y[i].abs());
            err = err.max(((y5[i] - y4[i]) / sc).abs());
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            times.push(t);
            points.push(y.clone());
            max_err = max_err.max(err * tol);
        }
        let fac = if err > 0.0 {
            0.9 * err.powf(-0.2)
        } else {
            5.0
        };
        h *= fac.clamp(0.2, 5.0);
        if h.abs() > max_step {
            h = max_step * h.signum();
        }
        if h.abs() < 1e-14 * t_end.abs().max(1.0) {
            return Err(Error::integrator("step size underflow"));
        }
        steps += 1;
        if steps > 2_000_000 {
            return Err(Error::integrator("step budget exhausted"));
        }
    }
    Ok(Integration {
        times,
        points,
        steps,
        max_error_estimate: max_err,
    })
}

/// Direction of a leaf integration.
#[derive(Debug, Clone)]
pub enum LeafDirection {
    /// Unit velocity against one vertical coframe index (global index).
    Vertical(usize),
    /// Prescribed algebra components on the vertical block.
    Algebra(Vec<f64>),
}

/// A computed leaf trajectory in chart coordinates.
pub struct LeafTrajectory {
    pub times: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub steps: usize,
    pub max_error_estimate: f64,
}

/// Right-hand side `V(z)` with `theta^a(V) = 0` and vertical components as
/// prescribed.
fn leaf_rhs<'a>(
    frame: &'a CoFrame,
    dir: &LeafDirection,
) -> impl Fn(f64, &[f64]) -> Result<Vec<f64>, Error> + 'a {
    let n = frame.dim();
    let mut rhs_vec = vec![0.0; n];
    match dir {
        LeafDirection::Vertical(i) => rhs_vec[*i] = 1.0,
        LeafDirection::Algebra(xi) => {
            for (p, &v) in xi.iter().enumerate() {
                rhs_vec[frame.split + p] = v;
            }
        }
    }
    move |_t: f64, z: &[f64]| frame.dual_vector(z, &rhs_vec)
}

/// Integrate the vertical leaf through `start`.
pub fn integrate_leaf(
    frame: &CoFrame,
    start: &[f64],
    dir: &LeafDirection,
    horizon: f64,
    tol: f64,
) -> Result<LeafTrajectory, Error> {
    if horizon <= 0.0 {
        return Err(Error::input("horizon must be positive"));
    }
    let rhs = leaf_rhs(frame, dir);
    let run = integrate_adaptive(rhs, start, horizon, tol)?;
    let mut points = run.points;
    for p in points.iter_mut() {
        frame.chart.wrap(p);
    }
    Ok(LeafTrajectory {
        times: run.times,
        points,
        steps: run.steps,
        max_error_estimate: run.max_error_estimate,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum ClosureStatus {
    Closed { period: f64, return_distance: f64 },
    NotClosedWithinHorizon { min_distance: f64 },
}

/// Detect the smallest return time of the vertical leaf through `start` via
/// an upward crossing of the Poincare section orthogonal to the initial
/// velocity, refined by bisection.
pub fn detect_closure(
    frame: &CoFrame,
    start: &[f64],
    horizon: f64,
    eps: f64,
    tol: f64,
) -> Result<ClosureStatus, Error> {
    let dir = LeafDirection::Vertical(frame.dim() - 1);
    let rhs = leaf_rhs(frame, &dir);
    let v0 = rhs(0.0, start)?;
    let v0n: f64 = v0.iter().map(|x| x * x).sum::<f64>().sqrt();
    if v0n < 1e-14 {
        return Err(Error::degenerate("vanishing vertical velocity at start"));
    }
    let vhat: Vec<f64> = v0.iter().map(|x| x / v0n).collect();
    let chart = &frame.chart;
    let sigma = |z: &[f64]| -> f64 {
        chart
            .delta(z, start)
            .iter()
            .zip(&vhat)
            .map(|(d, v)| d * v)
            .sum()
    };
    let max_step = 0.25 / v0n;
    let run = integrate_adaptive_capped(rhs, start, horizon, tol, max_step)?;
    let rhs2 = leaf_rhs(frame, &dir);
    let mut armed = false;
    let mut min_distance = f64::INFINITY;
    for w in 1..run.times.len() {
        let (t0, z0) = (run.times[w - 1], &run.points[w - 1]);
        let (t1, z1) = (run.times[w], &run.points[w]);
        let d1 = chart.distance(z1, start);
        if w > 1 {
            min_distance = min_distance.min(d1);
        }
        if !armed {
            if d1 > 10.0 * eps {
                armed = true;
            }
            continue;
        }
        let s0 = sigma(z0);
        let s1 = sigma(z1);
        if s0 < 0.0 && s1 >= 0.0 && s1 - s0 < 1.0 / v0n.max(1e-9) {
            // bisection refinement from z0
            let mut lo = 0.0;
            let mut hi = t1 - t0;
            let mut zc = z1.clone();
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let r = integrate_adaptive(&rhs2, z0, mid, tol * 0.1)?;
                let zm = r.points.last().unwrap().clone();
                if sigma(&zm) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                    zc = zm;
                }
                if hi - lo < 1e-13 * t1.max(1.0) {
                    break;
                }
            }
            let t_cross = t0 + 0.5 * (lo + hi);
            let d = chart.distance(&zc, start);
            if d <= eps {
                return Ok(ClosureStatus::Closed {
                    period: t_cross,
                    return_distance: d,
                });
            }
            min_distance = min_distance.min(d);
        }
    }
    Ok(ClosureStatus::NotClosedWithinHorizon { min_distance })
}

/// Flux of the last coframe form over the fiber circle above `x` (the
/// trapezoid rule is spectrally accurate for periodic integrands).
pub fn fiber_flux(frame: &CoFrame, x: &[f64], nodes: usize) -> Result<f64, Error> {
    let n = frame.dim();
    let span = frame
        .chart
        .spans
        .last()
        .ok_or_else(|| Error::input("chart has no fiber coordinate"))?;
    if !span.periodic {
        return Err(Error::precondition("fiber coordinate is not periodic"));
    }
    let period = span.period();
    let mut total = 0.0;
    for k in 0..nodes {
        let y = span.lo + period * k as f64 / nodes as f64;
        let mut z = x.to_vec();
        z.push(y);
        let m = frame.matrix_values(&z);
        // the leaf must be vertical: theta^a(d_y) = 0
        for (a, row) in m.iter().enumerate().take(frame.split) {
            if row[n - 1].abs() > 1e-10 {
                return Err(Error::precondition(format!(
                    "coordinate fiber is not a vertical leaf (theta^{a} has a dy component)"
                )));
            }
        }
        total += m[n - 1][n - 1];
    }
    Ok(total * period / nodes as f64)
}

/// Max pairwise flux deviation over a set of base points.
pub fn flux_constancy_scan(
    frame: &CoFrame,
    base_points: &[Vec<f64>],
    nodes: usize,
) -> Result<f64, Error> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for x in base_points {
        let q = fiber_flux(frame, x, nodes)?;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok(hi - lo)
}

/// Max `|Theta^i(V_j, V_k)|`: the obstruction to integrating the vertical
/// distribution with group-modeled leaves.
pub fn frobenius_residual(
    frame: &CoFrame,
    alg: &crate::lie::LieAlgebra,
    point: &[f64],
) -> Result<f64, Error> {
    let n = frame.dim();
    let split = frame.split;
    let theta = frame.g_curvature(alg);
    let mut verts: Vec<Vec<f64>> = Vec::new();
    for i in split..n {
        let mut rhs = vec![0.0; n];
        rhs[i] = 1.0;
        verts.push(frame.dual_vector(point, &rhs)?);
    }
    let mut worst = 0.0_f64;
    for th in theta.iter().skip(split) {
        let val = th.eval_at(point, 2, Basis::Coordinate);
        for vj in &verts {
            for vk in &verts {
                worst = worst.max(val.apply(&[vj, vk]).abs());
            }
        }
    }
    Ok(worst)
}

/// `|[X(xi), Y]|` at a point, with `X` the horizontal lift of `xi` and `Y`
/// the vertical unit field against the last coframe form.
pub fn commuting_flows_residual(
    frame: &CoFrame,
    xi: &[f64; 4],
    point: &[f64],
) -> Result<f64, Error> {
    let n = frame.dim();
    let mut rhs_x = vec![0.0; n];
    rhs_x[..4].copy_from_slice(xi);
    let mut rhs_y = vec![0.0; n];
    rhs_y[n - 1] = 1.0;
    let xj = frame.dual_vector_jets(point, &rhs_x, 1)?;
    let yj = frame.dual_vector_jets(point, &rhs_y, 1)?;
    let mut worst = 0.0_f64;
    for mu in 0..n {
        let mut acc = 0.0;
        for nu in 0..n {
            acc += xj[nu].v * yj[mu].g[nu] - yj[nu].v * xj[mu].g[nu];
        }
        worst = worst.max(acc.abs());
    }
    Ok(worst)
}

/// A path in the structure group for the holonomy map, with piecewise
/// constant Maurer-Cartan velocity (geodesic segments).
#[derive(Debug, Clone)]
pub enum GroupPath {
    /// `u(t) = exp(t log g)`, one segment to the target.
    Geodesic { target: Quaternion },
    /// Geodesic to `mid`, then geodesic from `mid` to `target`.
    TwoSegment { mid: Quaternion, target: Quaternion },
    /// U(1) path winding to `angle + 2 pi windings`.
    U1 { angle: f64, windings: i32 },
}

/// Integrate the fiber path with prescribed Maurer-Cartan velocity on an
/// SU(2) fiber; the fiber point is a quaternion. Returns the end point.
pub fn holonomy_su2(start: Quaternion, path: &GroupPath, tol: f64) -> Result<Quaternion, Error> {
    let segments: Vec<(Quaternion, [f64; 3])> = match path {
        GroupPath::Geodesic { target } => vec![(*target, target.log())],
        GroupPath::TwoSegment { mid, target } => {
            let rel = mid.conj().mul(target);
            vec![(*mid, mid.log()), (*target, rel.log())]
        }
        GroupPath::U1 { .. } => return Err(Error::input("u(1) path on an su(2) fiber")),
    };
    let mut q = start;
    for (_, w) in segments {
        // dq/dt = q * (w/2) as a quaternion product, t over [0, 1]
        let vel = Quaternion([0.0, w[0] / 2.0, w[1] / 2.0, w[2] / 2.0]);
        let rhs = |_t: f64, y: &[f64]| -> Result<Vec<f64>, Error> {
            let qy = Quaternion([y[0], y[1], y[2], y[3]]);
            Ok(qy.mul(&vel).0.to_vec())
        };
        let run = integrate_adaptive(rhs, &q.0, 1.0, tol)?;
        let last = run.points.last().unwrap();
        q = Quaternion([last[0], last[1], last[2], last[3]]);
    }
    Ok(q)
}

/// Holonomy on a circle fiber: integrate `dv/dt` with
/// `theta^4(dv/dt) = alpha'(t)` along the fiber over the base point of `z`.
pub fn holonomy_u1(
    frame: &CoFrame,
    start: &[f64],
    angle: f64,
    windings: i32,
    tol: f64,
) -> Result<Vec<f64>, Error> {
    let n = frame.dim();
    let total = angle + std::f64::consts::TAU * windings as f64;
    let rhs = |_t: f64, z: &[f64]| -> Result<Vec<f64>, Error> {
        let mut rhs_vec = vec![0.0; n];
        rhs_vec[n - 1] = total;
        frame.dual_vector(z, &rhs_vec)
    };
    let run = integrate_adaptive(rhs, start, 1.0, tol)?;
    let mut p = run.points.last().unwrap().clone();
    frame.chart.wrap(&mut p);
    Ok(p)
}

/// Integrate an SU(2) leaf in the group (quaternion space) along a constant
/// algebra direction `xi`; matches the one-parameter subgroup.
pub fn integrate_su2_leaf(
    start: Quaternion,
    xi: &[f64; 3],
    t_end: f64,
    tol: f64,
) -> Result<Quaternion, Error> {
    let vel = Quaternion([0.0, xi[0] / 2.0, xi[1] / 2.0, xi[2] / 2.0]);
    let rhs = |_t: f64, y: &[f64]| -> Result<Vec<f64>, Error> {
        let qy = Quaternion([y[0], y[1], y[2], y[3]]);
        Ok(qy.mul(&vel).0.to_vec())
    };
    let run = integrate_adaptive(rhs, &start.0, t_end, tol)?;
    let last = run.points.last().unwrap();
    Ok(Quaternion([last[0], last[1], last[2], last[3]]))
}

/// Normalized fiber coordinate `s(x, y) = int_0^y theta_4(x, y') dy' mod q`.
pub fn fiber_coordinate(frame: &CoFrame, x: &[f64], y: f64, q: f64) -> Result<f64, Error> {
    let n = frame.dim();
    // composite Gauss-Legendre (5 nodes) on subintervals
    const GL_X: [f64; 5] = [
        -0.906179845938664,
        -0.538469310105683,
        0.0,
        0.538469310105683,
        0.906179845938664,
    ];
    const GL_W: [f64; 5] = [
        0.236926885056189,
        0.478628670499366,
        0.568888888888889,
        0.478628670499366,
        0.236926885056189,
    ];
    let segs = (y.abs() * 4.0).ceil().max(1.0) as usize;
    let mut total = 0.0;
    for s in 0..segs {
        let a = y * s as f64 / segs as f64;
        let b = y * (s + 1) as f64 / segs as f64;
        for (xi, wi) in GL_X.iter().zip(GL_W.iter()) {
            let yy = 0.5 * (a + b) + 0.5 * (b - a) * xi;
            let mut z = x.to_vec();
            z.push(yy);
            let m = frame.matrix_values(&z);
            let t4 = m[n - 1][n - 1];
            if t4.abs() < 1e-12 {
                return Err(Error::degenerate("theta_4 vanishes on the integration range"));
            }
            total += wi * 0.5 * (b - a) * t4;
        }
    }
    Ok(total.rem_euclid(q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::field::Field;
    use crate::frame::{flat_vierbein_rows, kk_coframe_u1};
    use std::f64::consts::{PI, TAU};

    fn trivial_frame() -> CoFrame {
        let chart = Chart::base_with_circle(TAU);
        CoFrame::identity(chart, 4)
    }

    fn scaled_fiber_frame(c: f64) -> CoFrame {
        // theta^4 = c ds
        let chart = Chart::base_with_circle(TAU);
        let mut frame = CoFrame::identity(chart, 4);
        frame.rows[4][4] = Field::constant(c);
        frame
    }

    #[test]
    fn straight_leaf_on_trivial_frame() {
        let frame = trivial_frame();
        let start = [0.0, 0.0, 0.0, 0.0, 0.0];
        let traj = integrate_leaf(&frame, &start, &LeafDirection::Vertical(4), 1.0, 1e-10).unwrap();
        let end = traj.points.last().unwrap();
        assert!((end[4] - 1.0).abs() < 1e-9);
        for c in end.iter().take(4) {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn closure_periods() {
        // trivial circle: q = 2 pi; theta^4 = 2 ds: q = pi
        let frame = trivial_frame();
        let start = [0.0, 0.0, 0.0, 0.0, 0.0];
        match detect_closure(&frame, &start, 1e3, 1e-7, 1e-10).unwrap() {
            ClosureStatus::Closed { period, .. } => assert!((period - TAU).abs() < 1e-8),
            other => panic!("expected closure, got {other:?}"),
        }
        // theta^4 = c ds travels at speed 1/c: period 2 pi c
        let frame2 = scaled_fiber_frame(2.0);
        match detect_closure(&frame2, &start, 1e3, 1e-7, 1e-10).unwrap() {
            ClosureStatus::Closed { period, .. } => assert!((period - 2.0 * TAU).abs() < 1e-8),
            other => panic!("expected closure, got {other:?}"),
        }
        let frame_half = scaled_fiber_frame(0.5);
        match detect_closure(&frame_half, &start, 1e3, 1e-7, 1e-10).unwrap() {
            ClosureStatus::Closed { period, .. } => assert!((period - PI).abs() < 1e-8),
            other => panic!("expected closure, got {other:?}"),
        }
    }

    #[test]
    fn irrational_winding_does_not_close() {
        // diagnostic frame with a 2-torus vertical block and golden winding
        let phi = 0.5 * (1.0 + 5.0_f64.sqrt());
        let mut spans = vec![crate::chart::CoordSpan::boxed(-1.0, 1.0); 3];
        spans.push(crate::chart::CoordSpan::circle(TAU));
        spans.push(crate::chart::CoordSpan::circle(TAU));
        let chart = Chart::new(spans);
        let mut frame = CoFrame::identity(chart, 3);
        // vertical velocity (phi, 1) along the last coordinate's dual:
        // theta^3 = dy1 - phi dy2 kills V = (phi, 1) direction... instead set
        // theta^4(V) = 1 with V = (phi, 1)/1: rows: theta^3 = dy1 - phi dy2,
        // theta^4 = dy2 so that V = (phi, 1).
        frame.rows[3][3] = Field::one();
        frame.rows[3][4] = Field::constant(-phi);
        frame.rows[4][3] = Field::zero();
        frame.rows[4][4] = Field::one();
        // V solves theta^3(V) = 0, theta^4(V) = 1: V = (phi, 1)
        let start = [0.0, 0.0, 0.0, 0.0, 0.0];
        match detect_closure(&frame, &start, 1e3, 1e-3, 1e-9).unwrap() {
            ClosureStatus::NotClosedWithinHorizon { min_distance } => {
                assert!(min_distance > 1e-3, "came too close: {min_distance}");
            }
            ClosureStatus::Closed { period, .. } => {
                panic!("irrational winding reported closed at {period}")
            }
        }
    }

    #[test]
    fn flux_values_and_constancy() {
        let b = 0.7;
        let chart = Chart::base_with_circle(TAU);
        let mut a_pot = vec![Field::zero(); 4];
        a_pot[1] = Field::coord(0).scale(b);
        let frames = kk_coframe_u1(chart, &flat_vierbein_rows(5), &a_pot);
        let q = fiber_flux(&frames.raw, &[0.3, 0.2, -0.4, 0.1], 16).unwrap();
        assert!((q - TAU).abs() < 1e-12);
        let f2 = scaled_fiber_frame(2.0);
        let q2 = fiber_flux(&f2, &[0.0, 0.0, 0.0, 0.0], 16).unwrap();
        assert!((q2 - 2.0 * TAU).abs() < 1e-12);
        // base independence on the solution-family frame
        let pts: Vec<Vec<f64>> = (0..10)
            .map(|i| vec![0.1 * i as f64 - 0.5, 0.05 * i as f64, 0.0, -0.3])
            .collect();
        assert!(flux_constancy_scan(&frames.raw, &pts, 32).unwrap() < 1e-12);
        // broken frame theta^4 = (1 + y/8) dy + scaled horizontal part
        let chart = Chart::base_with_circle(TAU);
        let mut broken = CoFrame::identity(chart, 4);
        broken.rows[4][4] = Field::one().add(&Field::coord(0).scale(0.5));
        let dev = flux_constancy_scan(&broken, &pts, 32).unwrap();
        assert!(dev > 1e-2, "deviation {dev}");
    }

    #[test]
    fn frobenius_detects_broken_vertical_block() {
        let alg = crate::lie::LieAlgebra::u1();
        let b = 0.7;
        let chart = Chart::base_with_circle(TAU);
        let mut a_pot = vec![Field::zero(); 4];
        a_pot[1] = Field::coord(0).scale(b);
        let frames = kk_coframe_u1(chart, &flat_vierbein_rows(5), &a_pot);
        let p = [0.1, 0.4, -0.2, 0.3, 1.1];
        assert!(frobenius_residual(&frames.raw, &alg, &p).unwrap() < 1e-12);
        // two-dim vertical block with y-dependent twist
        let alg2 = crate::lie::LieAlgebra::direct_sum(&[
            crate::lie::LieAlgebra::u1(),
            crate::lie::LieAlgebra::u1(),
        ]);
        let mut spans = vec![crate::chart::CoordSpan::boxed(-1.0, 1.0); 3];
        spans.push(crate::chart::CoordSpan::circle(TAU));
        spans.push(crate::chart::CoordSpan::circle(TAU));
        let chart6 = Chart::new(spans);
        let mut broken = CoFrame::identity(chart6, 3);
        // theta^4 multiplied by (1 + sin(y5)/2)
        broken.rows[3][3] = Field::one().add(&Field::coord(4).sin().scale(0.5));
        let pb = [0.0, 0.0, 0.0, 0.5, 1.0];
        let res = frobenius_residual(&broken, &alg2, &pb).unwrap();
        assert!(res > 1e-3, "residual {res}");
    }

    #[test]
    fn commuting_flows() {
        let frame = trivial_frame();
        let xi = [1.0, 0.5, -0.3, 0.2];
        let p = [0.1, 0.2, 0.3, 0.4, 0.5];
        assert!(commuting_flows_residual(&frame, &xi, &p).unwrap() < 1e-13);
        // u(1) KK frame with A = A(x): still commuting
        let chart = Chart::base_with_circle(TAU);
        let mut a_pot = vec![Field::zero(); 4];
        a_pot[1] = Field::coord(0).scale(0.7);
        a_pot[2] = Field::coord(3).sin();
        let frames = kk_coframe_u1(chart, &flat_vierbein_rows(5), &a_pot);
        assert!(commuting_flows_residual(&frames.raw, &xi, &p).unwrap() < 1e-10);
        // artificial y-dependence breaks it
        let chart2 = Chart::base_with_circle(TAU);
        let mut bad = CoFrame::identity(chart2, 4);
        bad.rows[4][4] = Field::one().add(&Field::coord(4).sin().scale(0.3));
        // also give theta^4 a horizontal part depending on y
        bad.rows[4][0] = Field::coord(4).sin();
        let res = commuting_flows_residual(&bad, &xi, &p).unwrap();
        assert!(res > 1e-3, "residual {res}");
    }

    #[test]
    fn su2_leaf_matches_quaternion_exponential() {
        let start = Quaternion::haar(&mut crate::chart::Chart::rng(5));
        for t in [0.5, 3.0, -2.0, 10.0] {
            let xi = [0.0, 0.0, 1.0];
            let num = integrate_su2_leaf(start, &xi, t, 1e-11).unwrap();
            let exact = start.mul(&Quaternion::exp(&[0.0, 0.0, t]));
            let d: f64 = num
                .0
                .iter()
                .zip(exact.0.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(d < 1e-8, "deviation {d} at t = {t}");
        }
    }

    #[test]
    fn holonomy_path_independence_su2() {
        let mut rng = crate::chart::Chart::rng(11);
        let start = Quaternion::haar(&mut rng);
        for _ in 0..10 {
            let target = Quaternion::haar(&mut rng);
            let mid = Quaternion::haar(&mut rng);
            let e1 = holonomy_su2(start, &GroupPath::Geodesic { target }, 1e-10).unwrap();
            let e2 =
                holonomy_su2(start, &GroupPath::TwoSegment { mid, target }, 1e-10).unwrap();
            let d: f64 = e1
                .0
                .iter()
                .zip(e2.0.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(d < 1e-6, "path dependence {d}");
            // endpoint equals start * target (left-invariant transport)
            let exact = start.mul(&target);
            let d2: f64 = e1
                .0
                .iter()
                .zip(exact.0.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            assert!(d2 < 1e-8);
        }
    }

    #[test]
    fn holonomy_u1_windings_close() {
        let frame = trivial_frame();
        let start = [0.0, 0.0, 0.0, 0.0, 0.4];
        let constant = holonomy_u1(&frame, &start, 0.0, 0, 1e-10).unwrap();
        assert!(frame.chart.distance(&constant, &start) < 1e-10);
        let once = holonomy_u1(&frame, &start, 0.0, 1, 1e-10).unwrap();
        assert!(frame.chart.distance(&once, &start) < 1e-8);
        let half = holonomy_u1(&frame, &start, PI, 0, 1e-10).unwrap();
        assert!((half[4] - (0.4 + PI)).abs() < 1e-8);
    }

    #[test]
    fn fiber_coordinate_examples() {
        let frame = trivial_frame();
        let s = fiber_coordinate(&frame, &[0.0; 4], 1.3, TAU).unwrap();
        assert!((s - 1.3).abs() < 1e-12);
        let f2 = scaled_fiber_frame(2.0);
        let s2 = fiber_coordinate(&f2, &[0.0; 4], PI, 2.0 * TAU).unwrap();
        assert!((s2 - TAU).abs() < 1e-12);
        // theta_4 = 1 + sin(y)/2: s(2 pi) = 2 pi
        let chart = Chart::base_with_circle(TAU);
        let mut f3 = CoFrame::identity(chart, 4);
        f3.rows[4][4] = Field::one().add(&Field::coord(4).sin().scale(0.5));
        let s3 = fiber_coordinate(&f3, &[0.0; 4], TAU, TAU).unwrap();
        assert!(s3.abs() < 1e-10 || (s3 - TAU).abs() < 1e-10);
    }

    #[test]
    fn period_propagation_with_nonuniform_speed() {
        // theta^4 = (1 + sin(y)/2) dy + A_a(x) e^a keeps Theta^I_{ak} = 0
        let chart = Chart::base_with_circle(TAU);
        let mut frame = CoFrame::identity(chart, 4);
        frame.rows[4][4] = Field::one().add(&Field::coord(4).sin().scale(0.5));
        frame.rows[4][0] = Field::coord(1).scale(0.3);
        let mut rng = Chart::rng(31);
        let mut period0 = None;
        for _ in 0..8 {
            let x = frame.chart.sample_interior(&mut rng, 0.05);
            let mut start = x[..4].to_vec();
            start.push(0.0);
            match detect_closure(&frame, &start, 50.0, 1e-7, 1e-11).unwrap() {
                ClosureStatus::Closed { period, .. } => {
                    assert!((period - TAU).abs() < 1e-7, "period {period}");
                    if let Some(p0) = period0 {
                        let diff: f64 = period - p0;
                        assert!(diff.abs() < 1e-6);
                    } else {
                        period0 = Some(period);
                    }
                }
                other => panic!("no closure: {other:?}"),
            }
        }
    }
}
