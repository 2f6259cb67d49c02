//! Named verification suites with seeded determinism and machine-readable
//! reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

use crate::chart::Chart;
use crate::error::Error;
use crate::field::Field;
use crate::forms::{Basis, FormField};
use crate::frame::{graded_volume, CoFrame};
use crate::geometry::{
    curvature, einstein, einstein_divergence, koszul_connection, palatini_residual,
    solve_connection_linear, torsion_residual, FramePoint,
};
use crate::lie::{
    ad_invariance_residual, jacobi_residual, killing_contraction,
    killing_contraction_via_form, killing_form, unimodularity_residual, GroupElement,
    LieAlgebra, Quaternion,
};
use crate::reduced::{lambda_effective, ReducedFrame};
use crate::variational as var;

pub const ENGINE_VERSION: &str = concat!("kkcheck ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lie,
    Forms,
    Geometry,
    Fibration,
    Variational,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite, Error> {
        match s {
            "lie" => Ok(Suite::Lie),
            "forms" => Ok(Suite::Forms),
            "geometry" => Ok(Suite::Geometry),
            "fibration" => Ok(Suite::Fibration),
            "variational" => Ok(Suite::Variational),
            "all" => Ok(Suite::All),
            _ => Err(Error::input(format!("unknown suite '{s}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Lie => "lie",
            Suite::Forms => "forms",
            Suite::Geometry => "geometry",
            Suite::Fibration => "fibration",
            Suite::Variational => "variational",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    U1,
    Su2,
    Su3,
    U1Su2Su3,
}

impl Group {
    pub fn parse(s: &str) -> Result<Group, Error> {
        match s {
            "u1" => Ok(Group::U1),
            "su2" => Ok(Group::Su2),
            "su3" => Ok(Group::Su3),
            "u1su2su3" => Ok(Group::U1Su2Su3),
            _ => Err(Error::input(format!("unknown group '{s}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Group::U1 => "u1",
            Group::Su2 => "su2",
            Group::Su3 => "su3",
            Group::U1Su2Su3 => "u1su2su3",
        }
    }

    pub fn algebra(&self) -> LieAlgebra {
        match self {
            Group::U1 => LieAlgebra::u1(),
            Group::Su2 => LieAlgebra::su2(),
            Group::Su3 => LieAlgebra::su3(),
            Group::U1Su2Su3 => LieAlgebra::direct_sum(&[
                LieAlgebra::u1(),
                LieAlgebra::su2(),
                LieAlgebra::su3(),
            ]),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub suite: Suite,
    pub group: Group,
    pub seed: u64,
    pub tol: Option<f64>,
    pub samples: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            suite: Suite::All,
            group: Group::Su2,
            seed: 0,
            tol: None,
            samples: 100,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub extra: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub suite: String,
    pub group: String,
    pub seed: u64,
    pub checks: Vec<CheckRow>,
    pub wall_ms: u64,
    pub version: String,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,max_residual,tolerance,pass\n");
        for c in &self.checks {
            out.push_str(&format!(
                "{},{},{},{}\n",
                c.name, c.max_residual, c.tolerance, c.pass
            ));
        }
        out
    }
}

struct Rows<'a> {
    rows: Vec<CheckRow>,
    tol_override: Option<f64>,
    _cfg: &'a SuiteConfig,
}

impl<'a> Rows<'a> {
    fn new(cfg: &'a SuiteConfig) -> Self {
        Rows {
            rows: Vec::new(),
            tol_override: cfg.tol,
            _cfg: cfg,
        }
    }

    fn push(&mut self, name: &str, residual: f64, default_tol: f64) {
        let tolerance = self.tol_override.unwrap_or(default_tol);
        self.rows.push(CheckRow {
            name: name.to_string(),
            max_residual: residual,
            tolerance,
            pass: residual <= tolerance,
            extra: BTreeMap::new(),
        });
    }

    fn push_extra(
        &mut self,
        name: &str,
        residual: f64,
        default_tol: f64,
        extra: BTreeMap<String, serde_json::Value>,
    ) {
        let tolerance = self.tol_override.unwrap_or(default_tol);
        self.rows.push(CheckRow {
            name: name.to_string(),
            max_residual: residual,
            tolerance,
            pass: residual <= tolerance,
            extra,
        });
    }

    /// A detection check passes when the residual EXCEEDS the floor.
    fn push_floor(&mut self, name: &str, residual: f64, floor: f64) {
        let mut extra = BTreeMap::new();
        extra.insert(
            "detection_floor".to_string(),
            serde_json::json!(floor),
        );
        self.rows.push(CheckRow {
            name: name.to_string(),
            max_residual: residual,
            tolerance: floor,
            pass: residual >= floor,
            extra,
        });
    }
}

pub fn run_suite(cfg: &SuiteConfig) -> Result<CheckReport, Error> {
    let start = Instant::now();
    let mut checks = Vec::new();
    let suites: Vec<Suite> = match cfg.suite {
        Suite::All => vec![
            Suite::Lie,
            Suite::Forms,
            Suite::Geometry,
            Suite::Fibration,
            Suite::Variational,
        ],
        s => vec![s],
    };
    for s in suites {
        let rows = match s {
            Suite::Lie => lie_suite(cfg)?,
            Suite::Forms => forms_suite(cfg)?,
            Suite::Geometry => geometry_suite(cfg)?,
            Suite::Fibration => fibration_suite(cfg)?,
            Suite::Variational => variational_suite(cfg)?,
            Suite::All => unreachable!(),
        };
        checks.extend(rows);
    }
    Ok(CheckReport {
        suite: cfg.suite.name().to_string(),
        group: cfg.group.name().to_string(),
        seed: cfg.seed,
        checks,
        wall_ms: start.elapsed().as_millis() as u64,
        version: ENGINE_VERSION.to_string(),
    })
}

fn lie_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRow>, Error> {
    let mut rows = Rows::new(cfg);
    let named: Vec<(&str, LieAlgebra)> = vec![
        ("u1", LieAlgebra::u1()),
        ("su2", LieAlgebra::su2()),
        ("su3", LieAlgebra::su3()),
        (
            "u1su2su3",
            LieAlgebra::direct_sum(&[
                LieAlgebra::u1(),
                LieAlgebra::su2(),
                LieAlgebra::su3(),
            ]),
        ),
    ];
    for (name, alg) in &named {
        rows.push(&format!("jacobi_{name}"), jacobi_residual(alg), 0.0);
        rows.push(
            &format!("unimodularity_{name}"),
            unimodularity_residual(alg),
            0.0,
        );
        rows.push(
            &format!("ad_invariance_{name}"),
            ad_invariance_residual(alg),
            0.0,
        );
    }
    // su(2) Killing form and contraction against the brute-force values
    let su2 = LieAlgebra::su2();
    let b = killing_form(&su2);
    let mut kdev = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let expect = if i == j { -2.0 } else { 0.0 };
            kdev = kdev.max((b[i][j] - expect).abs());
        }
    }
    rows.push("killing_form_su2_minus_two_identity", kdev, 1e-12);
    let kc = killing_contraction(&su2)?;
    rows.push("killing_contraction_su2_minus_three", (kc + 3.0).abs(), 1e-12);
    rows.push(
        "killing_contraction_dual_route",
        (kc - killing_contraction_via_form(&su2)?).abs(),
        1e-12,
    );
    for (name, alg) in &named {
        if matches!(alg.tag, crate::lie::GroupTag::Su2 | crate::lie::GroupTag::Su3) {
            let v = killing_contraction(alg)?;
            rows.push_floor(&format!("killing_contraction_negative_{name}"), -v, 1e-9);
        }
    }
    // adjoint representation is a homomorphism and preserves k
    let mut rng = Chart::rng(cfg.seed ^ 0x11);
    let mut hom_dev = 0.0_f64;
    let mut iso_dev = 0.0_f64;
    for _ in 0..cfg.samples.max(10) {
        let a = GroupElement::Su2(Quaternion::haar(&mut rng));
        let b = GroupElement::Su2(Quaternion::haar(&mut rng));
        let sab = a.mul(&b)?.adjoint_matrix(&su2)?;
        let sa = a.adjoint_matrix(&su2)?;
        let sb = b.adjoint_matrix(&su2)?;
        for i in 0..3 {
            for j in 0..3 {
                let prod: f64 = (0..3).map(|k| sa[i][k] * sb[k][j]).sum();
                hom_dev = hom_dev.max((sab[i][j] - prod).abs());
                let dot: f64 = (0..3).map(|k| sa[k][i] * sa[k][j]).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                iso_dev = iso_dev.max((dot - expect).abs());
            }
        }
    }
    rows.push("adjoint_homomorphism_su2", hom_dev, 1e-10);
    rows.push("adjoint_preserves_metric_su2", iso_dev, 1e-10);
    Ok(rows.rows)
}

fn random_coframe(chart: &Chart, rng: &mut rand_chacha::ChaCha8Rng, scale: f64) -> CoFrame {
    let n = chart.dim();
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for mu in 0..n {
            let base = if i == mu { 1.0 } else { 0.0 };
            row.push(
                chart
                    .random_field(rng, 2)
                    .scale(scale)
                    .add(&Field::constant(base)),
            );
        }
        rows.push(row);
    }
    CoFrame::new(chart.clone(), rows, 4)
}

fn forms_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRow>, Error> {
    let mut rows = Rows::new(cfg);
    let chart = Chart::base_with_circle(std::f64::consts::TAU);
    let mut rng = Chart::rng(cfg.seed ^ 0x22);
    let n = chart.dim();
    let samples = cfg.samples.max(10);
    // d o d = 0 for random polynomial/trig coefficient forms of degree 0..3
    let mut dd = 0.0_f64;
    use rand::Rng;
    for _ in 0..samples {
        let degree = rng.gen_range(0..=3usize);
        let mut a = FormField::zero(n, degree);
        for _ in 0..3 {
            let idx: Vec<u8> = {
                let mut v: Vec<u8> = (0..n as u8).collect();
                for i in (1..v.len()).rev() {
                    let j = rng.gen_range(0..=i);
                    v.swap(i, j);
                }
                v.truncate(degree);
                v
            };
            a.insert(&idx, chart.random_field(&mut rng, 2));
        }
        let dda = a.ext_d().ext_d();
        let z = chart.sample(&mut rng);
        dd = dd.max(dda.max_abs_at(&z, 3));
    }
    rows.push("exterior_derivative_squares_to_zero", dd, 1e-8);
    // Leibniz rule
    let mut leib = 0.0_f64;
    for _ in 0..samples {
        let pa = rng.gen_range(0..=2usize);
        let pb = rng.gen_range(1..=2usize);
        let mut a = FormField::zero(n, pa);
        let mut b = FormField::zero(n, pb);
        for _ in 0..3 {
            let mut v: Vec<u8> = (0..n as u8).collect();
            for i in (1..v.len()).rev() {
                let j = rng.gen_range(0..=i);
                v.swap(i, j);
            }
            let mut vb = v.clone();
            v.truncate(pa);
            a.insert(&v, chart.random_field(&mut rng, 2));
            vb.truncate(pb);
            b.insert(&vb, chart.random_field(&mut rng, 2));
        }
        let lhs = a.wedge(&b).ext_d();
        let sign = if pa % 2 == 0 { 1.0 } else { -1.0 };
        let rhs = a.ext_d().wedge(&b).add(&a.wedge(&b.ext_d()).scale(sign));
        let z = chart.sample(&mut rng);
        leib = leib.max(lhs.sub(&rhs).max_abs_at(&z, 2));
    }
    rows.push("leibniz_rule", leib, 1e-8);
    // frame component round trip on well-conditioned random frames
    let mut rt = 0.0_f64;
    for _ in 0..samples.min(100) {
        let frame = random_coframe(&chart, &mut rng, 0.25);
        let z = chart.sample(&mut rng);
        let mut b = crate::forms::FormValue::zero(n, 2, Basis::Coordinate);
        for i in 0..n as u8 {
            for j in (i + 1)..n as u8 {
                b.insert(&[i, j], rng.gen_range(-1.0..1.0));
            }
        }
        let fc = frame.frame_components(&b, &z)?;
        let back = frame.coordinate_components(&fc, &z)?;
        rt = rt.max(back.sub(&b).max_abs());
    }
    rows.push("frame_component_round_trip", rt, 1e-10);
    // pullback naturality: (T^* d a) = d (T^* a) on fibered maps
    let mut nat = 0.0_f64;
    for _ in 0..50 {
        let f = chart.random_field(&mut rng, 2).scale(0.5);
        let map = vec![
            Field::coord(0),
            Field::coord(1),
            Field::coord(2),
            Field::coord(3),
            Field::coord(4).add(&f),
        ];
        let mut a = FormField::zero(n, 1);
        for i in 0..n as u8 {
            a.insert(&[i], chart.random_field(&mut rng, 2));
        }
        let lhs = a.ext_d().pullback(&map, n);
        let rhs = a.pullback(&map, n).ext_d();
        let z = chart.sample(&mut rng);
        nat = nat.max(lhs.sub(&rhs).max_abs_at(&z, 3));
    }
    rows.push("pullback_commutes_with_d", nat, 1e-8);
    // graded volume contraction identity on random frames
    let mut contraction = 0.0_f64;
    for _ in 0..20 {
        let frame = random_coframe(&chart, &mut rng, 0.3);
        let z = chart.sample(&mut rng);
        let forms = frame.forms_at(&z);
        let all: Vec<usize> = (0..n).collect();
        let top = graded_volume(&forms, &all, &[]);
        for k in 0..n {
            for i in 0..n {
                let hat = graded_volume(&forms, &all, &[i]);
                let w = forms[k].wedge(&hat)?;
                let expect = if k == i {
                    top.clone()
                } else {
                    crate::forms::FormValue::zero(n, n, Basis::Coordinate)
                };
                contraction = contraction.max(w.sub(&expect).max_abs());
            }
        }
    }
    rows.push("graded_volume_contraction_identity", contraction, 1e-10);
    Ok(rows.rows)
}

fn geometry_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRow>, Error> {
    let mut rows = Rows::new(cfg);
    let mut rng = Chart::rng(cfg.seed ^ 0x33);
    use rand::Rng;
    // torsion-free solve on random frames: residual and uniqueness
    let chart = Chart::base_with_circle(std::f64::consts::TAU);
    let h5 = crate::metric::FrameMetric::new(vec![vec![1.0]])?;
    let mut torsion = 0.0_f64;
    let mut unique = 0.0_f64;
    for _ in 0..20 {
        let frame = random_coframe(&chart, &mut rng, 0.15);
        let z = chart.sample(&mut rng);
        let fp = FramePoint::from_coframe(&frame, &z, 2)?;
        let kos = koszul_connection(&fp, &h5);
        torsion = torsion.max(torsion_residual(&fp, &kos));
        let lin = solve_connection_linear(&fp, &h5)?;
        for i in 0..5 {
            for j in 0..5 {
                for k in 0..5 {
                    unique = unique.max((kos.omega[i][j][k].v - lin.omega[i][j][k].v).abs());
                }
            }
        }
    }
    rows.push("torsion_free_residual_random_frames", torsion, 1e-9);
    rows.push("connection_solver_uniqueness", unique, 1e-9);
    // closed-form Kaluza-Klein connection vs generic solve on random (e, A)
    let algs: Vec<LieAlgebra> = match cfg.group {
        Group::U1 => vec![LieAlgebra::u1()],
        _ => vec![LieAlgebra::u1(), LieAlgebra::su2()],
    };
    let base = Chart::base4();
    let mut cf_dev = 0.0_f64;
    for alg in &algs {
        for _ in 0..10 {
            let red = random_reduced(&base, alg.clone(), &mut rng)?;
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.8..0.8)).collect();
            let fp = red.frame_point(&x, 2);
            let kos = koszul_connection(&fp, &red.metric);
            let cf = red.connection_closed_form_at(&x, 1);
            let n = red.n();
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        cf_dev =
                            cf_dev.max((kos.omega[i][j][k].v - cf.omega[i][j][k].v).abs());
                    }
                }
            }
        }
    }
    rows.push("kk_connection_closed_form_vs_solve", cf_dev, 1e-8);
    // Einstein reduction vs the full numeric tensor
    let alg = match cfg.group {
        Group::U1 => LieAlgebra::u1(),
        _ => LieAlgebra::su2(),
    };
    let mut red_dev = 0.0_f64;
    for _ in 0..5 {
        let red = random_reduced(&base, alg.clone(), &mut rng)?;
        for _ in 0..4 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.8..0.8)).collect();
            let full = red.einstein_full_at(&x, 3);
            let low_full = red.lower_einstein(&full);
            let low_red = red.einstein_reduction_at(&x)?;
            for (ra, rb) in low_full.iter().zip(&low_red) {
                for (a, b) in ra.iter().zip(rb) {
                    red_dev = red_dev.max((a - b).abs());
                }
            }
        }
    }
    rows.push("einstein_reduction_matches_full", red_dev, 1e-6);
    // flat R^4 x SU(2) blocks
    let red = ReducedFrame::flat(LieAlgebra::su2())?;
    let x = [0.2, -0.3, 0.5, 0.1];
    let full = red.einstein_full_at(&x, 3);
    let mut block_dev = 0.0_f64;
    for i in 0..7 {
        for j in 0..7 {
            let expect = if i == j {
                if i < 4 {
                    -0.75
                } else {
                    -0.25
                }
            } else {
                0.0
            };
            block_dev = block_dev.max((full.ein_mixed[i][j].v - expect).abs());
        }
    }
    rows.push("flat_su2_einstein_blocks", block_dev, 1e-8);
    // Palatini normalization arbiter on random reduced frames
    let mut pal = 0.0_f64;
    let mut sym = 0.0_f64;
    let mut bianchi = 0.0_f64;
    for _ in 0..5 {
        let red = random_reduced(&base, alg.clone(), &mut rng)?;
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.8..0.8)).collect();
        let fp = red.frame_point(&x, 3);
        let conn = koszul_connection(&fp, &red.metric);
        let curv = curvature(&fp, &conn, &red.metric);
        let ein = einstein(&curv, &red.metric);
        pal = pal.max(palatini_residual(&curv, &ein));
        sym = sym.max(ein.symmetry_residual(&red.metric));
        for d in einstein_divergence(&fp, &conn, &ein) {
            bianchi = bianchi.max(d.abs());
        }
    }
    let mut extra = BTreeMap::new();
    extra.insert(
        "note".to_string(),
        serde_json::json!(
            "resolves the printed Einstein-tensor normalization to Ric - R/2"
        ),
    );
    rows.push_extra("palatini_contraction_identity", pal, 1e-8, extra);
    if pal > 1e-6 {
        return Err(Error::internal(format!(
            "palatini cross-check failed at {pal:.3e}"
        )));
    }
    rows.push("einstein_lowered_symmetry", sym, 1e-8);
    rows.push("contracted_bianchi_divergence", bianchi, 1e-6);
    // effective cosmological constant
    let lam = lambda_effective(0.0, &LieAlgebra::su2())?;
    rows.push("lambda_su2_shift", (lam + 0.75).abs(), 1e-12);
    let lam_u1 = lambda_effective(0.0, &LieAlgebra::u1())?;
    rows.push("lambda_u1_unshifted", lam_u1.abs(), 1e-15);
    rows.push_floor(
        "lambda_below_bare_su2",
        -lambda_effective(0.75, &LieAlgebra::su2())? + 0.75,
        1e-9,
    );
    Ok(rows.rows)
}

fn random_reduced(
    base: &Chart,
    alg: LieAlgebra,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<ReducedFrame, Error> {
    let r = alg.dim;
    let mut e = Vec::new();
    for aidx in 0..4 {
        let mut row = Vec::new();
        for mu in 0..4 {
            let basev = if aidx == mu { 1.0 } else { 0.0 };
            row.push(
                base.random_field(rng, 2)
                    .scale(0.06)
                    .add(&Field::constant(basev)),
            );
        }
        e.push(row);
    }
    let a_comps: Vec<Vec<Field>> = (0..r)
        .map(|_| {
            (0..4)
                .map(|_| base.random_field(rng, 2).scale(0.3))
                .collect()
        })
        .collect();
    ReducedFrame::new(base.clone(), alg, e, a_comps)
}

fn fibration_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRow>, Error> {
    use crate::fibration::*;
    let mut rows = Rows::new(cfg);
    let mut rng = Chart::rng(cfg.seed ^ 0x44);
    let tau = std::f64::consts::TAU;
    // closure on the trivial circle and a scaled fiber
    let chart = Chart::base_with_circle(tau);
    let trivial = CoFrame::identity(chart.clone(), 4);
    let start = [0.0, 0.0, 0.0, 0.0, 0.0];
    let mut closure_dev = 0.0_f64;
    match detect_closure(&trivial, &start, 1e3, 1e-7, 1e-10)? {
        ClosureStatus::Closed { period, .. } => {
            closure_dev = closure_dev.max((period - tau).abs())
        }
        _ => closure_dev = f64::INFINITY,
    }
    let mut scaled = CoFrame::identity(chart.clone(), 4);
    scaled.rows[4][4] = Field::constant(2.0);
    match detect_closure(&scaled, &start, 1e3, 1e-7, 1e-10)? {
        ClosureStatus::Closed { period, .. } => {
            closure_dev = closure_dev.max((period - 2.0 * tau).abs())
        }
        _ => closure_dev = f64::INFINITY,
    }
    rows.push("closure_period_detection", closure_dev, 1e-8);
    // period propagation across base points for a solution-type frame
    let mut frame = CoFrame::identity(chart.clone(), 4);
    frame.rows[4][4] = Field::one().add(&Field::coord(4).sin().scale(0.5));
    frame.rows[4][0] = Field::coord(1).scale(0.3);
    let mut prop_dev = 0.0_f64;
    let mut first = None;
    for _ in 0..20 {
        let x = chart.sample_interior(&mut rng, 0.05);
        let mut s0 = x[..4].to_vec();
        s0.push(0.0);
        match detect_closure(&frame, &s0, 50.0, 1e-7, 1e-11)? {
            ClosureStatus::Closed { period, .. } => {
                let p0 = *first.get_or_insert(period);
                prop_dev = prop_dev.max((period - p0).abs());
            }
            _ => prop_dev = f64::INFINITY,
        }
    }
    rows.push("period_propagation_across_base", prop_dev, 1e-6);
    // flux constancy for the solution family and a broken control
    let sol = var::maxwell::solution_coframe(0.7);
    let pts: Vec<Vec<f64>> = (0..20)
        .map(|_| chart.sample_interior(&mut rng, 0.05)[..4].to_vec())
        .collect();
    rows.push(
        "fiber_flux_constancy",
        flux_constancy_scan(&sol, &pts, 32)?,
        1e-9,
    );
    let mut broken = CoFrame::identity(chart.clone(), 4);
    broken.rows[4][4] = Field::one().add(&Field::coord(0).scale(0.5));
    rows.push_floor(
        "broken_flux_detected",
        flux_constancy_scan(&broken, &pts, 32)?,
        1e-2,
    );
    // Frobenius residuals: integrable and broken verticals
    let alg_u1 = LieAlgebra::u1();
    let mut frob = 0.0_f64;
    for _ in 0..10 {
        let z = chart.sample(&mut rng);
        frob = frob.max(frobenius_residual(&sol, &alg_u1, &z)?);
    }
    rows.push("frobenius_integrable_vertical", frob, 1e-10);
    // commuting flows for solution-type frames
    let mut comm = 0.0_f64;
    for _ in 0..10 {
        let z = chart.sample(&mut rng);
        let xi = [1.0, 0.4, -0.2, 0.7];
        comm = comm.max(commuting_flows_residual(&sol, &xi, &z)?);
    }
    rows.push("commuting_horizontal_vertical_flows", comm, 1e-8);
    // holonomy: path independence on SU(2), winding closure on U(1)
    let mut holo = 0.0_f64;
    let s0 = Quaternion::haar(&mut rng);
    for _ in 0..10 {
        let target = Quaternion::haar(&mut rng);
        let mid = Quaternion::haar(&mut rng);
        let e1 = holonomy_su2(s0, &GroupPath::Geodesic { target }, 1e-10)?;
        let e2 = holonomy_su2(s0, &GroupPath::TwoSegment { mid, target }, 1e-10)?;
        let d: f64 = e1
            .0
            .iter()
            .zip(e2.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        holo = holo.max(d);
    }
    rows.push("holonomy_path_independence_su2", holo, 1e-6);
    let w = holonomy_u1(&trivial, &[0.0, 0.0, 0.0, 0.0, 0.4], 0.0, 1, 1e-10)?;
    rows.push(
        "holonomy_u1_full_winding_closes",
        trivial.chart.distance(&w, &[0.0, 0.0, 0.0, 0.0, 0.4]),
        1e-8,
    );
    // leaf integration against the quaternion exponential
    let mut leaf_dev = 0.0_f64;
    for t in [0.5, 3.0, -2.0, 10.0] {
        let q0 = Quaternion::haar(&mut rng);
        let num = integrate_su2_leaf(q0, &[0.0, 0.0, 1.0], t, 1e-11)?;
        let exact = q0.mul(&Quaternion::exp(&[0.0, 0.0, t]));
        let d: f64 = num
            .0
            .iter()
            .zip(exact.0.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        leaf_dev = leaf_dev.max(d);
    }
    rows.push("su2_leaf_matches_exponential", leaf_dev, 1e-8);
    // a non-closing control: irrational winding stays away from the start
    let phi = 0.5 * (1.0 + 5.0_f64.sqrt());
    let mut spans = vec![crate::chart::CoordSpan::boxed(-1.0, 1.0); 3];
    spans.push(crate::chart::CoordSpan::circle(tau));
    spans.push(crate::chart::CoordSpan::circle(tau));
    let chart6 = Chart::new(spans);
    let mut winding = CoFrame::identity(chart6, 3);
    winding.rows[3][3] = Field::one();
    winding.rows[3][4] = Field::constant(-phi);
    match detect_closure(&winding, &[0.0; 5], 1e3, 1e-3, 1e-9)? {
        ClosureStatus::NotClosedWithinHorizon { min_distance } => {
            rows.push_floor("irrational_winding_not_closed", min_distance, 1e-3);
        }
        ClosureStatus::Closed { period, .. } => {
            rows.push_floor("irrational_winding_not_closed", -period, 1e-3);
        }
    }
    // fiber coordinate normalization
    let mut f3 = CoFrame::identity(Chart::base_with_circle(tau), 4);
    f3.rows[4][4] = Field::one().add(&Field::coord(4).sin().scale(0.5));
    let s_full = fiber_coordinate(&f3, &[0.0; 4], tau, tau)?;
    let dev = s_full.min((s_full - tau).abs());
    rows.push("fiber_coordinate_period_normalization", dev, 1e-10);
    Ok(rows.rows)
}

fn variational_suite(cfg: &SuiteConfig) -> Result<Vec<CheckRow>, Error> {
    use var::maxwell::*;
    let mut rows = Rows::new(cfg);
    let mut rng = Chart::rng(cfg.seed ^ 0x55);
    // Maxwell solution residuals on a sample grid
    let f = build_maxwell_solution(0.7);
    let op = MaxwellElOperator::new(&f);
    let mut res = [0.0_f64; 3];
    for _ in 0..200 {
        let z = f.chart.sample(&mut rng);
        let r = op.at(&z);
        res[0] = res[0].max(r.res_a);
        res[1] = res[1].max(r.res_b);
        res[2] = res[2].max(r.res_c);
    }
    rows.push("maxwell_solution_residual_a", res[0], 1e-8);
    rows.push("maxwell_solution_residual_b", res[1], 1e-8);
    rows.push("maxwell_solution_residual_c", res[2], 1e-8);
    let a1 = action_maxwell(&f, 6, 8)?;
    let a2 = action_maxwell_expanded(&f, 6, 8)?;
    rows.push("maxwell_action_dual_route", (a1 - a2).abs(), 1e-9);
    // Gateaux derivative on shell
    let mut gmax = 0.0_f64;
    for seed in 0..3 {
        let v = MaxwellVariation::random(&f.chart, cfg.seed ^ (7000 + seed));
        gmax = gmax.max(gateaux_maxwell(&f, &v, 1e-4, 6, 8)?.abs());
    }
    rows.push("maxwell_gateaux_on_shell", gmax, 5e-6);
    // gauge deltas
    let t = MaxwellTransform::FiberedDiffeo {
        fiber_map: Field::coord(4).add(&Field::coord(0).sin().scale(0.5)),
    };
    rows.push(
        "gauge_delta_fibered_diffeo",
        gauge_invariance_delta(&f, &t, 8, 16)?,
        1e-7,
    );
    let t2 = MaxwellTransform::GaugeShift {
        v: Field::coord(0).mul(&Field::coord(2)).scale(0.3),
    };
    rows.push(
        "gauge_delta_dv_shift",
        gauge_invariance_delta(&f, &t2, 8, 8)?,
        1e-7,
    );
    let bump = f.chart.bump();
    let mut phi2 = FormField::zero(5, 2);
    phi2.insert(&[0, 1], bump.mul(&Field::coord(2)));
    phi2.insert(&[2, 3], bump.mul(&Field::coord(0).sin()));
    let psi = phi2.ext_d();
    rows.push(
        "gauge_delta_closed_psi",
        gauge_invariance_delta(&f, &MaxwellTransform::PiShift { psi }, 8, 8)?,
        1e-7,
    );
    let mut off = f.clone();
    let mut bad_theta = FormField::zero(5, 1);
    bad_theta.insert(&[4], Field::coord(3).mul(&Field::coord(3)).scale(0.3));
    off.theta = off.theta.add(&bad_theta);
    let mut psi_bad = FormField::zero(5, 3);
    psi_bad.insert(&[0, 1, 2], bump.mul(&Field::coord(3)));
    rows.push_floor(
        "gauge_delta_nonclosed_psi_detected",
        gauge_invariance_delta(&off, &MaxwellTransform::PiShift { psi: psi_bad }, 8, 8)?,
        1e-3,
    );
    // cancellation mechanism
    let chart5 = f.chart.clone();
    let mut rng2 = Chart::rng(cfg.seed ^ 0x66);
    use rand::Rng;
    let mut p_trig = Field::zero();
    for k in 1..=6u32 {
        let c1: f64 = rng2.gen_range(-1.0..1.0);
        let arg = Field::coord(4).scale(k as f64);
        p_trig = p_trig.add(&arg.sin().scale(c1));
    }
    let mavg = var::cancel::fiber_average_ds(&chart5, &p_trig, &[0.2, 0.1, -0.3, 0.5], 16)?;
    rows.push("cancellation_circle_average", mavg.abs(), 1e-12);
    let base4 = Chart::base4();
    let u: Vec<Vec<Vec<Field>>> = (0..3)
        .map(|_| {
            (0..4)
                .map(|_| (0..3).map(|_| base4.random_field(&mut rng2, 2)).collect())
                .collect()
        })
        .collect();
    let avg = var::cancel::cancellation_average_su2(
        &LieAlgebra::su2(),
        &u,
        &[0.3, -0.5, 0.2, 0.7],
        4096,
        cfg.seed ^ 0x77,
    )?;
    let mut worst_ratio = 0.0_f64;
    for i in 0..3 {
        for a in 0..4 {
            let bound = 3.0 * avg.sigma[i][a] + 1e-12;
            worst_ratio = worst_ratio.max(avg.mean[i][a].abs() / bound);
        }
    }
    let mut extra = BTreeMap::new();
    extra.insert("samples".to_string(), serde_json::json!(avg.samples));
    rows.push_extra(
        "cancellation_su2_haar_three_sigma_ratio",
        worst_ratio,
        1.0,
        extra,
    );
    // dressed divergence identity
    let red_su2 = random_reduced(&base4, LieAlgebra::su2(), &mut rng2)?;
    let p = var::ym::DressedMomenta::random(&red_su2, cfg.seed ^ 0x88);
    let mut dev15 = 0.0_f64;
    for _ in 0..5 {
        let x: Vec<f64> = (0..4).map(|_| rng2.gen_range(-0.8..0.8)).collect();
        dev15 = dev15.max(var::ym::identity_divergence_deviation(&red_su2, &p, &x)?);
    }
    rows.push("dressed_divergence_dual_route", dev15, 1e-8);
    // Yang-Mills residuals for the group-chart configurations
    if cfg.group != Group::U1 {
        let ym = var::ym::build_embedded_maxwell_su2(0.7);
        let yop = var::ym::YMElOperator::new(&ym);
        let mut yres = [0.0_f64; 4];
        let mut count = 0;
        while count < 10 {
            let q = Quaternion::haar(&mut rng2);
            let w = q.log();
            if w.iter().map(|x| x * x).sum::<f64>().sqrt() > 5.0 {
                continue;
            }
            let mut z: Vec<f64> = (0..4).map(|_| rng2.gen_range(-0.9..0.9)).collect();
            z.extend_from_slice(&w);
            let r = yop.at(&z)?;
            for (acc, v) in yres.iter_mut().zip(r.iter()) {
                *acc = acc.max(*v);
            }
            count += 1;
        }
        rows.push(
            "ym_embedded_solution_residual",
            yres.iter().fold(0.0_f64, |m, v| m.max(*v)),
            1e-8,
        );
        // constant adjoint dressing: pointwise invariance of the integrand
        let g0 = Quaternion::exp(&[0.4, -0.8, 1.1]);
        let s = GroupElement::Su2(g0).adjoint_matrix(&LieAlgebra::su2())?;
        let dressed = var::ym::adjoint_dress(&ym, &s);
        let i1 = var::ym::action_integrand_ym(&ym);
        let i2 = var::ym::action_integrand_ym(&dressed);
        let mut ad_dev = 0.0_f64;
        let mut count = 0;
        while count < 8 {
            let q = Quaternion::haar(&mut rng2);
            let w = q.log();
            if w.iter().map(|x| x * x).sum::<f64>().sqrt() > 5.0 {
                continue;
            }
            let mut z: Vec<f64> = (0..4).map(|_| rng2.gen_range(-0.9..0.9)).collect();
            z.extend_from_slice(&w);
            ad_dev = ad_dev.max((i1.eval_at(&z, 2).v - i2.eval_at(&z, 2).v).abs());
            count += 1;
        }
        rows.push("gauge_delta_constant_adjoint", ad_dev, 1e-7);
        // chi shift through the ball quadrature
        let chis = var::ym::chi_shift_forms(&ym, cfg.seed ^ 0x99);
        let (chi_delta, _) = var::ym::chi_shift_delta(
            &ym,
            &chis,
            4,
            &var::ym::FiberRule::Ball {
                n_r: 10,
                n_sphere: 6,
            },
        );
        rows.push("gauge_delta_chi_shift", chi_delta, 1e-7);
    }
    // Einstein-Yang-Mills vacuum
    let alg = match cfg.group {
        Group::U1 => LieAlgebra::u1(),
        _ => LieAlgebra::su2(),
    };
    if alg.tag == crate::lie::GroupTag::Su2 {
        let red = ReducedFrame::flat(LieAlgebra::su2())?;
        let vac = var::eym::build_eym_vacuum_solution(&red);
        let eop = var::eym::EymElOperator::new(&red, &vac);
        let mut eres = 0.0_f64;
        let mut route = 0.0_f64;
        for _ in 0..20 {
            let x = red.chart.sample_interior(&mut rng2, 0.02);
            let r = eop.at(&red, &vac, &x)?;
            eres = eres
                .max(r.res_a)
                .max(r.res_b)
                .max(r.res_c)
                .max(r.res_d);
            route = route.max(r.torsion_route_deviation);
        }
        rows.push("eym_vacuum_residual", eres, 1e-7);
        rows.push("eym_torsion_equation_dual_route", route, 1e-9);
        let mut gmax = 0.0_f64;
        for seed in 0..3 {
            let v = var::eym::EymVariation::random(&red, cfg.seed ^ (9000 + seed));
            gmax = gmax.max(var::eym::gateaux_eym(&red, &vac, &v, 1e-4, 6).abs());
        }
        rows.push("eym_gateaux_on_shell", gmax, 5e-6);
        let pr = var::eym::projected_equations_check(&red, 0.75, &[0.1, 0.2, -0.3, 0.4])?;
        rows.push(
            "projected_einstein_equation",
            pr.einstein.max(pr.yang_mills),
            1e-7,
        );
        rows.push(
            "projected_mixed_block_equivalence",
            pr.mixed_block_equivalence,
            1e-7,
        );
    }
    Ok(rows.rows)
}
