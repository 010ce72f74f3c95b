//! End-to-end verification suite: ten numbered checks covering every module,
//! with deterministic artifacts.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::analytic::{SeparationMode, TravelingWave};
use crate::barrier::{certify_barrier, scaled_limit, BarrierSpec, CertOptions};
use crate::conformal::{
    default_exclusion, pushforward, ray_trace_max, transport_to_patch, weighted_residual_field,
    FnPair, HalfPlaneFunction, Transported,
};
use crate::duality::{dual_field, dual_residual_field, integrate_stream, StreamPath};
use crate::error::{Error, Result};
use crate::fd::{
    assemble, convergence_order, min_eigenvalue, residual_field, solve, AssemblyOptions,
    BoundaryData, Convection, ConvergenceProblem, ExactSolution, SideClosure, DEFAULT_TOL,
};
use crate::field::{PatchField, ScalarField};
use crate::grid::{HalfPlaneGrid, StripGrid};
use crate::maglev::{
    closed_form_averages, maxwell_residuals, sweep, wavelength_averages, write_sweep_csv, FieldPair,
};
use crate::params::{MaglevParams, PdeParams, MU0};

pub const DEFAULT_SEED: u64 = 20_240_601;

/// Grid budget for the suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// Strip grids capped at 129 x 65 nodes.
    #[default]
    Quick,
    /// Grids up to 513 x 257 nodes.
    Full,
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Quick => "quick",
            Self::Full => "full",
        })
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Self::Quick),
            "full" => Ok(Self::Full),
            other => Err(Error::Parse(format!(
                "unknown profile '{other}', expected quick or full"
            ))),
        }
    }
}

/// Outcome of one numbered check. Timings are kept out of the serialized form
/// so that artifacts are reproducible.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub metrics: BTreeMap<String, Value>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionOutcome {
    fn new(id: u8, name: &str) -> Self {
        Self {
            id,
            name: name.to_string(),
            passed: true,
            metrics: BTreeMap::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn metric(&mut self, key: &str, v: impl Into<Value>) {
        self.metrics.insert(key.to_string(), v.into());
    }

    /// Records a named sub-check and folds it into the verdict.
    fn check(&mut self, key: &str, ok: bool) {
        self.passed &= ok;
        self.metric(&format!("check_{key}"), ok);
    }
}

/// Named byte blobs produced by a run, written under the output directory.
pub type Artifacts = BTreeMap<String, Vec<u8>>;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub profile: Profile,
    pub seed: u64,
    pub criteria: Vec<CriterionOutcome>,
    pub all_passed: bool,
}

impl Summary {
    /// One line per criterion: id, verdict, name, wall time.
    pub fn table(&self) -> String {
        let mut s = String::from(" id  result  time      check\n");
        for c in &self.criteria {
            s.push_str(&format!(
                "{:>3}  {:<6}  {:>7.2}s  {}\n",
                c.id,
                if c.passed { "PASS" } else { "FAIL" },
                c.elapsed.as_secs_f64(),
                c.name
            ));
        }
        s
    }
}

fn sub_seed(seed: u64, id: u8) -> u64 {
    seed ^ (u64::from(id)).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn timed<F>(id: u8, name: &str, f: F) -> Result<CriterionOutcome>
where
    F: FnOnce(&mut CriterionOutcome) -> Result<()>,
{
    let mut out = CriterionOutcome::new(id, name);
    let t = Instant::now();
    f(&mut out)?;
    out.elapsed = t.elapsed();
    Ok(out)
}

fn order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

fn strip_levels(profile: Profile, full: &[usize], quick: &[usize]) -> Vec<StripGrid<f64>> {
    let nxs = match profile {
        Profile::Full => full,
        Profile::Quick => quick,
    };
    nxs.iter()
        .map(|&nx| StripGrid::new(-PI, PI, nx, (nx - 1) / 2 - 1).expect("valid grid"))
        .collect()
}

/// Pointwise Romberg table over nested residual fields, returned on the
/// coarsest grid's nodes.
fn romberg(levels: &[ScalarField<f64>]) -> Vec<f64> {
    let n = levels.len();
    let coarse = levels[0].grid();
    coarse
        .nodes()
        .map(|(i, j, _, _)| {
            let mut col: Vec<f64> = (0..n).map(|m| levels[m].at(i << m, j << m)).collect();
            for lev in 1..n {
                let f = 4f64.powi(lev as i32);
                for m in (lev..n).rev() {
                    col[m] = (f * col[m] - col[m - 1]) / (f - 1.0);
                }
            }
            col[n - 1]
        })
        .collect()
}

/// 1. Traveling-wave residuals are second order and extrapolate to zero.
pub fn dispersion_consistency(profile: Profile, seed: u64) -> Result<CriterionOutcome> {
    timed(1, "dispersion consistency", |out| {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 1));
        let grids = strip_levels(profile, &[129, 257, 513], &[9, 17, 33, 65, 129]);
        let mut cases = Vec::new();
        let (mut min_ratio, mut max_ratio, mut worst) = (f64::INFINITY, 0.0f64, 0.0f64);
        for _ in 0..20 {
            let k = rng.gen_range(-5.0..=5.0);
            let lambda = rng.gen_range(0.0..=4.0);
            let wavelength = rng.gen_range(0.5..=2.0);
            let wave = TravelingWave::new(k, lambda, wavelength, 1.0)?;
            let params = wave.params();
            let mut fields = Vec::with_capacity(grids.len());
            for g in &grids {
                let u = ScalarField::sample(*g, |x, y| wave.eval(x, y))?;
                fields.push(residual_field(&u, &params, |_, _| 0.0));
            }
            let n = fields.len();
            let (coarse, fine) = (&fields[n - 2], &fields[n - 1]);
            let fine_on_coarse = coarse
                .grid()
                .nodes()
                .fold(0.0f64, |m, (i, j, _, _)| m.max(fine.at(2 * i, 2 * j).abs()));
            let ratio = coarse.max_abs() / fine_on_coarse;
            let extrapolated = romberg(&fields).iter().fold(0.0f64, |m, v| m.max(v.abs()));
            min_ratio = min_ratio.min(ratio);
            max_ratio = max_ratio.max(ratio);
            worst = worst.max(extrapolated);
            cases.push(json!({
                "k": k, "lambda": lambda, "wavelength": wavelength,
                "ratio": ratio, "extrapolated": extrapolated,
            }));
        }
        out.metric("cases", cases);
        out.metric("min_ratio", min_ratio);
        out.metric("max_ratio", max_ratio);
        out.metric("max_extrapolated", worst);
        out.metric(
            "finest_grid",
            format!(
                "{}x{}",
                grids.last().unwrap().nx(),
                grids.last().unwrap().rows()
            ),
        );
        out.check("ratio_in_3.5_4.5", min_ratio >= 3.5 && max_ratio <= 4.5);
        out.check("extrapolated_below_1e-9", worst < 1e-9);
        Ok(())
    })
}

/// 2. Dirichlet solve of the traveling wave converges at second order.
pub fn solver_convergence(profile: Profile, artifacts: &mut Artifacts) -> Result<CriterionOutcome> {
    timed(2, "solver convergence", |out| {
        let grids = strip_levels(profile, &[129, 257, 513], &[33, 65, 129]);
        let wave = TravelingWave::new(2.0, 0.0, 1.0, 1.0)?;
        let problem = ConvergenceProblem {
            grid: grids[0],
            params: wave.params(),
            exact: ExactSolution::Wave(wave),
            options: AssemblyOptions::default(),
        };
        let study = convergence_order(&problem, grids.len())?;
        out.metric("spacings", study.spacings.clone());
        out.metric("errors", study.errors.clone());
        out.metric("order", study.order);
        out.check("order_2.0_pm_0.1", (study.order - 2.0).abs() <= 0.1);

        let u = |x: f64, y: f64| wave.eval(x, y);
        let bc = BoundaryData::dirichlet_from(&u);
        let sys = assemble(&grids[0], &problem.params, &bc, |_, _| 0.0, problem.options)?;
        let field = solve(&sys, DEFAULT_TOL)?;
        let mut buf = Vec::new();
        field.write_csv(&mut buf)?;
        artifacts.insert("solve_coarse.csv".into(), buf);
        Ok(())
    })
}

/// 3. Barrier certificates for the full parameter table.
pub fn barrier_certificates(seed: u64, artifacts: &mut Artifacts) -> Result<CriterionOutcome> {
    timed(3, "barrier certificate", |out| {
        let opts = CertOptions {
            seed: sub_seed(seed, 3),
            ..CertOptions::default()
        };
        let mut reports = Vec::new();
        let (mut all, mut max_l, mut max_fd, mut max_drift) = (true, 0.0f64, 0.0f64, 0.0f64);
        let mut samples = 0usize;
        for &r in &[10.0, 100.0] {
            for &k in &[0.0, 1.0, -1.0, 2.0, -2.0, 5.0, -5.0] {
                for &lambda in &[0.0, 1.0, 5.0] {
                    let spec = BarrierSpec::new(k, lambda, r)?;
                    let cert = certify_barrier(&spec, &opts)?;
                    all &= cert.passed();
                    max_l = max_l.max(cert.report.max_violation);
                    max_fd = max_fd.max(cert.fd_discrepancy.max_violation);
                    max_drift = max_drift.max(cert.drift_bound.max_violation);
                    samples += cert.report.samples_checked;
                    reports.push(json!({
                        "k": k, "lambda": lambda, "R": r, "passed": cert.passed(),
                        "certificate": cert,
                    }));
                }
            }
        }
        out.metric("specs", reports.len());
        out.metric("samples", samples);
        out.metric("max_closed_form_violation", max_l);
        out.metric("max_fd_discrepancy", max_fd);
        out.metric("max_drift_excess", max_drift);
        out.check("all_certified", all);
        artifacts.insert("barrier_certificates.json".into(), to_json_bytes(&reports)?);
        Ok(())
    })
}

/// 4. `R v_R(0, 1)` approaches `(4/pi) f'(0)`.
pub fn scaled_limit_check() -> Result<CriterionOutcome> {
    timed(4, "scaled limit", |out| {
        for &k in &[0.0, 2.0] {
            let pts = scaled_limit(k, 0.0, 1.0, &[1e2, 1e3, 1e4])?;
            let monotone = pts.windows(2).all(|w| w[1].abs_error < w[0].abs_error);
            let last = pts.last().unwrap().rel_error;
            out.metric(
                &format!("k{k}_abs_errors"),
                pts.iter().map(|p| p.abs_error).collect::<Vec<_>>(),
            );
            out.metric(&format!("k{k}_rel_error_at_1e4"), last);
            out.check(&format!("k{k}_monotone"), monotone);
            out.check(&format!("k{k}_within_1pct"), last < 0.01);
        }
        Ok(())
    })
}

/// 5. Discrete maximum principle on random supersolution problems.
pub fn maximum_principle(seed: u64) -> Result<CriterionOutcome> {
    timed(5, "discrete maximum principle", |out| {
        let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, 5));
        let mut worst = f64::INFINITY;
        for _ in 0..50 {
            let half = rng.gen_range(1.0..4.0);
            let nx = rng.gen_range(9..=65);
            let ny = rng.gen_range(5..=31);
            let grid = StripGrid::<f64>::new(-half, half, nx, ny)?;
            let kmax = (2.0f64 / grid.hx()).min(5.0);
            let k = rng.gen_range(-kmax..=kmax);
            let lambda = rng.gen_range(0.0..=5.0);
            let params = PdeParams::new(k, lambda)?;
            let convection = if rng.gen_bool(0.5) {
                Convection::Central
            } else {
                Convection::Upwind
            };
            let c: [f64; 8] = std::array::from_fn(|_| rng.gen_range(0.0..2.0));
            let w: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.5..3.0));
            let bc = BoundaryData::new(
                move |x: f64| c[0] * (1.0 + (w[0] * x).cos()),
                move |x: f64| c[1] * (w[1] * x).sin().powi(2),
                SideClosure::Dirichlet(Box::new(move |_, y: f64| c[2] * (1.0 + (w[2] * y).sin()))),
            );
            let forcing =
                move |x: f64, y: f64| -c[3] * (w[3] * (x + y)).sin().powi(2) - c[4] * c[5];
            let sys = assemble(
                &grid,
                &params,
                &bc,
                forcing,
                AssemblyOptions {
                    convection,
                    ..Default::default()
                },
            )?;
            let u = solve(&sys, DEFAULT_TOL)?;
            worst = worst.min(u.min());
        }
        out.metric("problems", 50);
        out.metric("min_value", worst);
        out.check("nonnegative_to_1e-12", worst >= -1e-12);
        Ok(())
    })
}

fn conformal_patch(n: usize) -> Result<HalfPlaneGrid<f64>> {
    let rho = default_exclusion(&StripGrid::new(-PI, PI, 3, 3)?);
    HalfPlaneGrid::new((-2.0, 2.0), (1.0, 3.0), n, n, rho)
}

/// 6. The weighted half-plane equation holds for transported strip solutions.
pub fn conformal_equivalence(artifacts: &mut Artifacts) -> Result<CriterionOutcome> {
    timed(6, "conformal equivalence", |out| {
        let sizes = [17, 33, 65];
        for &k in &[0.0, 2.0] {
            let wave = Transported(TravelingWave::new(k, 0.0, 1.0, 1.0)?);
            let mode = Transported(SeparationMode::new(k, 1, 1.0, 1.0)?);
            for (label, u) in [
                ("wave", &wave as &dyn HalfPlaneFunction<f64>),
                ("mode", &mode),
            ] {
                let mut res = Vec::new();
                for (m, &n) in sizes.iter().enumerate() {
                    let p = conformal_patch(n)?;
                    let f = transport_to_patch(&DynFn(u), &p)?;
                    let r = weighted_residual_field(&f, k, p.exclusion())?;
                    res.push(max_on_coarse_nodes(&r, m, sizes[0]));
                }
                let orders: Vec<f64> = res.windows(2).map(|w| order(w[0], w[1])).collect();
                let ok = orders.iter().all(|o| (o - 2.0).abs() <= 0.2);
                out.metric(&format!("k{k}_{label}_residuals"), res);
                out.metric(&format!("k{k}_{label}_orders"), orders);
                out.check(&format!("k{k}_{label}_order_2_pm_0.2"), ok);
            }
            // Ray traces of a solution vanishing on both walls.
            let radii: Vec<f64> = (0..=200)
                .map(|i| (-PI + 2.0 * PI * f64::from(i) / 200.0).exp())
                .collect();
            let m = SeparationMode::new(k, 1, 1.0, 1.0)?;
            let (pos, neg) = ray_trace_max(
                |x, y| crate::analytic::StripSolution::value(&m, x, y),
                &radii,
            );
            out.metric(&format!("k{k}_mode_trace_positive_ray"), pos);
            out.metric(&format!("k{k}_mode_trace_negative_ray"), neg);
            out.check(
                &format!("k{k}_traces_below_1e-12"),
                pos <= 1e-12 && neg <= 1e-12,
            );
        }
        let g = StripGrid::new(-PI, PI, 33, 15)?;
        let wave = TravelingWave::new(2.0, 0.0, 1.0, 1.0)?;
        let img = pushforward(&ScalarField::sample(g, |x, y| wave.eval(x, y))?);
        let mut buf = Vec::new();
        img.write_csv(&mut buf)?;
        artifacts.insert("map_image.csv".into(), buf);
        Ok(())
    })
}

/// Max of `|field|` over the interior nodes of the coarsest patch of a
/// refinement sequence, `level` halvings below it.
fn max_on_coarse_nodes(field: &PatchField<f64>, level: usize, coarse_n: usize) -> f64 {
    let mut m = 0.0f64;
    for i in 1..coarse_n - 1 {
        for j in 1..coarse_n - 1 {
            m = m.max(field.at(i << level, j << level).abs());
        }
    }
    m
}

/// Adapter so trait objects can be passed where a sized function is expected.
struct DynFn<'a>(&'a dyn HalfPlaneFunction<f64>);

impl HalfPlaneFunction<f64> for DynFn<'_> {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.0.value(x, y)
    }

    fn gradient(&self, x: f64, y: f64) -> (f64, f64) {
        self.0.gradient(x, y)
    }
}

fn stddev(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// 7. Stream-function duality.
pub fn duality_check(artifacts: &mut Artifacts) -> Result<CriterionOutcome> {
    timed(7, "duality", |out| {
        let k = 2.0;
        let u = Transported(TravelingWave::new(k, 0.0, 1.0, 1.0)?);
        let rho = conformal_patch(3)?.exclusion();

        let base = (-1.5, 1.0);
        let mut gap = 0.0f64;
        for target in [(1.5, 2.0), (0.5, 1.2), (-0.5, 2.5), (1.8, 0.3), (-2.0, 0.2)] {
            let a = integrate_stream(&u, k, &StreamPath::staircase(base, target, true, rho)?);
            let b = integrate_stream(&u, k, &StreamPath::staircase(base, target, false, rho)?);
            gap = gap.max((a.value - b.value).abs());
        }
        out.metric("path_independence_gap", gap);
        out.check("gap_below_1e-8", gap <= 1e-8);

        let mut res = Vec::new();
        let sizes = [17, 33, 65];
        for (m, &n) in sizes.iter().enumerate() {
            let p = conformal_patch(n)?;
            let v = dual_field(&u, k, &p, (0, 0))?;
            let r = dual_residual_field(&v, k, rho)?;
            res.push(max_on_coarse_nodes(&r, m, sizes[0]));
            if n == 33 {
                let mut buf = Vec::new();
                v.write_csv(&mut buf)?;
                artifacts.insert("dual_field.csv".into(), buf);
            }
        }
        let orders: Vec<f64> = res.windows(2).map(|w| order(w[0], w[1])).collect();
        out.metric("dual_residuals", res);
        out.check("dual_order_at_least_1.8", orders.iter().all(|&o| o >= 1.8));
        out.metric("dual_orders", orders);

        let p = conformal_patch(33)?;
        let v0 = dual_field(&u, k, &p, (0, 0))?;
        let v1 = dual_field(&u, k, &p, (16, 16))?;
        let diff: Vec<f64> = v0
            .values()
            .iter()
            .zip(v1.values())
            .map(|(a, b)| a - b)
            .collect();
        let sd = stddev(&diff);
        out.metric("basepoint_shift_stddev", sd);
        out.check("basepoint_shift_constant", sd <= 1e-8);

        let x_lin = FnPair {
            value: |x: f64, _: f64| x,
            gradient: |_: f64, _: f64| (1.0, 0.0),
        };
        let log_mod = FnPair {
            value: |x: f64, y: f64| x.hypot(y).ln(),
            gradient: |x: f64, y: f64| {
                let r2 = x * x + y * y;
                (x / r2, y / r2)
            },
        };
        let (b0x, b0y) = p.node(0, 0);
        let v_lin = dual_field(&x_lin, 0.0, &p, (0, 0))?;
        let v_log = dual_field(&log_mod, 0.0, &p, (0, 0))?;
        let mut err = 0.0f64;
        for (i, j, x, y) in p.nodes() {
            err = err.max((v_lin.at(i, j) - (y - b0y)).abs());
            err = err.max((v_log.at(i, j) - (y.atan2(x) - b0y.atan2(b0x))).abs());
        }
        out.metric("harmonic_conjugate_error", err);
        out.check("harmonic_conjugates_1e-10", err <= 1e-10);
        Ok(())
    })
}

/// 8. Lowest Dirichlet eigenvalue on truncated strips.
pub fn eigenvalue_check(profile: Profile) -> Result<CriterionOutcome> {
    timed(8, "eigenvalue", |out| {
        let (nx0, ny) = match profile {
            Profile::Full => (129, 63),
            Profile::Quick => (33, 15),
        };
        let mut values = Vec::new();
        for m in 0..3usize {
            let half = PI * f64::from(1u32 << m);
            let nx = (nx0 - 1) * (1 << m) + 1;
            let g = StripGrid::new(-half, half, nx, ny)?;
            let ev = min_eigenvalue(&g)?;
            if m == 0 {
                let h = g.hx().max(g.hy());
                let gap = (ev.eigenvalue - 1.25).abs();
                out.metric("eigenvalue_X_pi", ev.eigenvalue);
                out.metric("bound_5h2", 5.0 * h * h);
                out.check("within_5h2_of_1.25", gap <= 5.0 * h * h);
            }
            values.push(ev.eigenvalue);
        }
        let decreasing = values.windows(2).all(|w| w[1] < w[0]);
        out.metric("eigenvalues", values.clone());
        out.check("monotone_decrease", decreasing);
        out.check("above_1", values.iter().all(|&v| v > 1.0));
        Ok(())
    })
}

/// 9. Field reconstruction and force proxies.
pub fn maglev_check(artifacts: &mut Artifacts) -> Result<CriterionOutcome> {
    timed(9, "maglev physics", |out| {
        for &k in &[0.0, 2.0] {
            let p = MaglevParams::from_k(MU0, k, 1.0, 1.0)?;
            let mut div = Vec::new();
            let mut curl = Vec::new();
            for &nx in &[33, 65, 129] {
                let g = StripGrid::new(-PI, PI, nx, (nx - 1) / 2 - 1)?;
                let r = maxwell_residuals(&p, &g)?;
                div.push(r.div_norm);
                curl.push(r.curl_norm);
            }
            let od: Vec<f64> = div.windows(2).map(|w| order(w[0], w[1])).collect();
            let oc: Vec<f64> = curl.windows(2).map(|w| order(w[0], w[1])).collect();
            let ok = od.iter().chain(&oc).all(|o| (o - 2.0).abs() <= 0.2);
            out.metric(&format!("k{k}_div_norms"), div);
            out.metric(&format!("k{k}_curl_norms"), curl);
            out.metric(&format!("k{k}_orders"), json!({"div": od, "curl": oc}));
            out.check(&format!("k{k}_second_order"), ok);
        }

        let p0 = MaglevParams::from_k(MU0, 0.0, 1.0, 1.0)?;
        let (d0, l0) = wavelength_averages(&p0, 0.0)?.normalized(&p0);
        out.metric("k0_proxies", vec![d0, l0]);
        out.check("k0_proxies_vanish", d0.abs() <= 1e-10 && l0.abs() <= 1e-10);

        let p2 = MaglevParams::from_k(MU0, 2.0, 1.0, 1.0)?;
        let q = wavelength_averages(&p2, 0.0)?;
        let (d2, l2) = q.normalized(&p2);
        let (cd, cl) = closed_form_averages(&p2, 0.0)?;
        let unit = 1.0 / MU0;
        let (cd, cl) = (cd / unit, cl / unit);
        out.metric("k2_proxies", vec![d2, l2]);
        out.metric("k2_closed_forms", vec![cd, cl]);
        out.check(
            "k2_quadrature_matches_closed_form",
            q.converged && (d2 - cd).abs() <= 1e-8 && (l2 - cl).abs() <= 1e-8,
        );
        out.check(
            "k2_reference_values",
            (d2 - 0.393_075).abs() <= 1e-6 && (l2 - (5f64.sqrt() - 1.0) / 4.0).abs() <= 1e-8,
        );

        let alpha = FieldPair::new(&p2)?.alpha();
        let mut decay_err = 0.0f64;
        for &y in &[0.5, 1.0] {
            let (dy, ly) = wavelength_averages(&p2, y)?.normalized(&p2);
            let e = (-2.0 * alpha * y).exp();
            decay_err = decay_err.max((dy / d2 - e).abs()).max((ly / l2 - e).abs());
        }
        out.metric("decay_law_error", decay_err);
        out.check("decay_law_1e-10", decay_err <= 1e-10);

        let drags: Vec<f64> = [0.5, 1.0, 2.0, 5.0]
            .iter()
            .map(|&k| {
                let p = MaglevParams::from_k(MU0, k, 1.0, 1.0)?;
                Ok(wavelength_averages(&p, 0.0)?.normalized(&p).0)
            })
            .collect::<Result<_>>()?;
        out.check(
            "drag_positive_increasing",
            drags[0] > 0.0 && drags.windows(2).all(|w| w[1] > w[0]),
        );
        out.metric("drag_by_k", drags);

        let rows = sweep(&[0.0, 0.5, 1.0, 2.0, 5.0], &[0.0, 0.5, 1.0], 1.0, 1.0, MU0)?;
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf)?;
        artifacts.insert("maglev_sweep.csv".into(), buf);
        Ok(())
    })
}

fn to_json_bytes<S: Serialize>(v: &S) -> Result<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v)?;
    b.push(b'\n');
    Ok(b)
}

/// Runs checks 1 to 9 and collects their artifacts.
pub fn run_checks(profile: Profile, seed: u64) -> Result<(Vec<CriterionOutcome>, Artifacts)> {
    let mut artifacts = Artifacts::new();
    let mut v = Vec::with_capacity(10);
    let c1 = dispersion_consistency(profile, seed)?;
    let mut c1 = c1;
    if profile == Profile::Full {
        c1.check("runtime_below_10s", c1.elapsed < Duration::from_secs(10));
    }
    v.push(c1);
    let mut c2 = solver_convergence(profile, &mut artifacts)?;
    c2.check("runtime_below_30s", c2.elapsed < Duration::from_secs(30));
    v.push(c2);
    let mut c3 = barrier_certificates(seed, &mut artifacts)?;
    c3.check("runtime_below_20s", c3.elapsed < Duration::from_secs(20));
    v.push(c3);
    v.push(scaled_limit_check()?);
    v.push(maximum_principle(seed)?);
    v.push(conformal_equivalence(&mut artifacts)?);
    v.push(duality_check(&mut artifacts)?);
    v.push(eigenvalue_check(profile)?);
    v.push(maglev_check(&mut artifacts)?);
    for c in &v {
        artifacts.insert(format!("criterion_{:02}.json", c.id), to_json_bytes(c)?);
    }
    Ok((v, artifacts))
}

/// Full suite. Check 10 repeats checks 1 to 9 and compares every artifact
/// byte for byte; in the quick profile it also bounds the first pass at 60 s.
pub fn verify_all(profile: Profile, seed: u64) -> Result<(Summary, Artifacts)> {
    let t = Instant::now();
    let (mut criteria, mut artifacts) = run_checks(profile, seed)?;
    let first_pass = t.elapsed();

    let t10 = Instant::now();
    let (_, again) = run_checks(profile, seed)?;
    let mut c10 = CriterionOutcome::new(10, "determinism");
    let identical = again == artifacts;
    c10.metric("artifacts", artifacts.len());
    c10.check("byte_identical_rerun", identical);
    if profile == Profile::Quick {
        c10.check("quick_under_60s", first_pass < Duration::from_secs(60));
    }
    c10.elapsed = t10.elapsed();
    criteria.push(c10);

    let all_passed = criteria.iter().all(|c| c.passed);
    let summary = Summary {
        profile,
        seed,
        criteria,
        all_passed,
    };
    artifacts.insert("summary.json".into(), to_json_bytes(&summary)?);
    Ok((summary, artifacts))
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::InvalidParams(format!("no file name in {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

/// Writes every artifact into `dir`, creating it if needed.
pub fn write_artifacts(dir: &Path, artifacts: &Artifacts) -> Result<()> {
    fs::create_dir_all(dir)?;
    for (name, bytes) in artifacts {
        write_atomic(&dir.join(name), bytes)?;
    }
    Ok(())
}
