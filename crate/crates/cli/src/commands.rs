//! Subcommand bodies. Each one computes everything in memory and returns its
//! artifacts; nothing touches the output directory until the run succeeds.

use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use strip_lab::barrier::{certify_barrier, BarrierSpec, CertOptions};
use strip_lab::conformal::{
    admissibility, default_exclusion, pushforward, transport_to_patch, weighted_residual,
    ConformalReport, Transported,
};
use strip_lab::duality::{dual_field, dual_residual, integrate_stream, DualityReport, StreamPath};
use strip_lab::fd::{
    assemble, continuum_min_eigenvalue, convergence_order, min_eigenvalue, solve_detailed,
    AssemblyOptions, BoundaryData, ConvergenceProblem, DEFAULT_TOL, EIGEN_RESIDUAL_TOL,
};
use strip_lab::maglev::{sweep, write_sweep_csv};
use strip_lab::verify::{self, Artifacts, Profile};
use strip_lab::PdeParams;

use crate::config::{
    BcMode, CertifyConfig, DualizeConfig, EigenConfig, MaglevConfig, MapConfig, SolveConfig,
};
use crate::CliError;

/// Result of a successful run: artifacts to write, the verdict, and an
/// optional human-readable summary for standard output.
pub struct Outcome {
    pub artifacts: Artifacts,
    pub passed: bool,
    pub summary: String,
}

fn json_bytes<S: Serialize>(v: &S) -> Result<Vec<u8>, CliError> {
    let mut b = serde_json::to_vec_pretty(v).map_err(strip_lab::Error::from)?;
    b.push(b'\n');
    Ok(b)
}

fn report_outcome(
    name: &str,
    report: Value,
    passed: bool,
    mut artifacts: Artifacts,
) -> Result<Outcome, CliError> {
    let summary = format!("{name}: {}", if passed { "ok" } else { "FAILED" });
    artifacts.insert("report.json".into(), json_bytes(&report)?);
    Ok(Outcome {
        artifacts,
        passed,
        summary,
    })
}

fn within(value: f64, tolerance: Option<f64>) -> bool {
    tolerance.is_none_or(|t| value <= t)
}

pub fn solve(cfg: &SolveConfig, seed: u64) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let grid = cfg.grid.build()?;
    let params = cfg.params.build()?;
    let exact = cfg.bc.preset.exact(&params)?;
    let options = AssemblyOptions {
        convection: cfg.convection,
        ordering: cfg.ordering,
    };
    let uses_exact_forcing = cfg.forcing != "zero";
    let forcing = move |x: f64, y: f64| match exact {
        Some(e) if uses_exact_forcing => e.forcing(&params, x, y),
        _ => 0.0,
    };
    let u = move |x: f64, y: f64| exact.map_or(0.0, |e| e.value(x, y));
    let bc = match cfg.bc.mode {
        BcMode::Dirichlet => BoundaryData::dirichlet_from(&u),
        BcMode::Periodic => BoundaryData::periodic_from(&u),
    };

    let start = Instant::now();
    let sys = assemble(&grid, &params, &bc, forcing, options)?;
    let sol = solve_detailed(&sys, DEFAULT_TOL)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;

    // The preset is the exact solution of the configured problem when its own
    // forcing is used, or when that forcing vanishes identically.
    let consistent = match exact {
        Some(e) => uses_exact_forcing || matches!(e, strip_lab::fd::ExactSolution::Wave(_)),
        None => true,
    };
    let max_error = if consistent {
        Some(
            grid.nodes()
                .map(|(i, j, x, y)| (sol.field.at(i, j) - u(x, y)).abs())
                .fold(0.0, f64::max),
        )
    } else {
        None
    };
    let mut report = json!({
        "seed": seed,
        "grid": cfg.grid,
        "params": cfg.params,
        "preset": cfg.bc.preset.name(),
        "residual": sol.residual,
        "refinement_steps": sol.refinement_steps,
        "runtime_ms": runtime_ms,
        "max_error": max_error,
    });

    if cfg.refinements >= 2 {
        let Some(exact) = exact.filter(|_| consistent) else {
            return Err(CliError::Config(
                "an order estimate needs a nonzero preset that solves the configured problem"
                    .into(),
            ));
        };
        if cfg.bc.mode == BcMode::Periodic {
            return Err(CliError::Config(
                "order estimates use Dirichlet sides".into(),
            ));
        }
        let study = convergence_order(
            &ConvergenceProblem {
                grid,
                params,
                exact,
                options,
            },
            cfg.refinements + 1,
        )?;
        report["order_estimate"] = json!(study.order);
        report["convergence"] = json!(study);
    }

    let passed = sol.residual <= DEFAULT_TOL;
    let mut artifacts = Artifacts::new();
    let mut csv = Vec::new();
    sol.field.write_csv(&mut csv)?;
    artifacts.insert(cfg.output.clone(), csv);
    report_outcome("solve", report, passed, artifacts)
}

pub fn certify(cfg: &CertifyConfig, seed: u64) -> Result<Outcome, CliError> {
    let spec = BarrierSpec::new(cfg.k, cfg.lambda, cfg.r)?;
    let opts = CertOptions {
        density: cfg.density,
        seed,
        random_samples: cfg.random_samples,
        ..CertOptions::default()
    };
    let cert = certify_barrier(&spec, &opts)?;
    let passed = cert.passed();
    let report = json!({
        "seed": seed,
        "k": cfg.k,
        "lambda": cfg.lambda,
        "R": cfg.r,
        "passed": passed,
        "certificate": cert,
    });
    let mut out = report_outcome("certify", report, passed, Artifacts::new())?;
    if let Some(bytes) = out.artifacts.remove("report.json") {
        out.artifacts.insert("certificate.json".into(), bytes);
    }
    Ok(out)
}

pub fn map(cfg: &MapConfig, seed: u64) -> Result<Outcome, CliError> {
    let grid = cfg.grid.build()?;
    let params = PdeParams::new(cfg.k, 0.0)?;
    let solution = cfg.preset.strip_solution(&params)?;
    let field = strip_lab::ScalarField::sample(grid, |x, y| {
        strip_lab::analytic::StripSolution::value(&solution, x, y)
    })?;
    let mut csv = Vec::new();
    pushforward(&field).write_csv(&mut csv)?;

    let exclusion = default_exclusion(&grid);
    let patch = cfg.patch.build(exclusion)?;
    let transported = transport_to_patch(&Transported(solution), &patch)?;
    let residual = weighted_residual(&transported, cfg.k, exclusion)?;
    let conformal = ConformalReport {
        k: cfg.k,
        weighted_residual: residual,
        exclusion,
        admissibility: admissibility(cfg.k),
    };
    let passed = within(residual, cfg.tolerance);
    let report = json!({
        "seed": seed,
        "preset": cfg.preset.name(),
        "patch": cfg.patch,
        "tolerance": cfg.tolerance,
        "conformal": conformal,
    });
    let mut artifacts = Artifacts::new();
    artifacts.insert("map_image.csv".into(), csv);
    report_outcome("map", report, passed, artifacts)
}

pub fn dualize(cfg: &DualizeConfig, seed: u64) -> Result<Outcome, CliError> {
    let params = PdeParams::new(cfg.k, 0.0)?;
    let u = Transported(cfg.preset.strip_solution(&params)?);
    let patch = cfg.patch.build(cfg.exclusion)?;
    let [i0, j0] = cfg.basepoint.unwrap_or([patch.nx() / 2, patch.ny() / 2]);
    let v = dual_field(&u, cfg.k, &patch, (i0, j0))?;
    let residual = dual_residual(&v, cfg.k, cfg.exclusion)?;

    let base = patch.node(i0, j0);
    let far = if i0 < patch.nx() / 2 {
        patch.nx() - 1
    } else {
        0
    };
    let far = patch.node(
        far,
        if j0 < patch.ny() / 2 {
            patch.ny() - 1
        } else {
            0
        },
    );
    let a = integrate_stream(
        &u,
        cfg.k,
        &StreamPath::staircase(base, far, true, cfg.exclusion)?,
    );
    let b = integrate_stream(
        &u,
        cfg.k,
        &StreamPath::staircase(base, far, false, cfg.exclusion)?,
    );
    let duality = DualityReport {
        path_independence_gap: (a.value - b.value).abs(),
        dual_residual: residual,
        basepoint: base,
    };
    let passed = within(residual, cfg.tolerance) && a.converged && b.converged;
    let report = json!({
        "seed": seed,
        "k": cfg.k,
        "preset": cfg.preset.name(),
        "patch": cfg.patch,
        "tolerance": cfg.tolerance,
        "duality": duality,
    });
    let mut csv = Vec::new();
    v.write_csv(&mut csv)?;
    let mut artifacts = Artifacts::new();
    artifacts.insert("dual_field.csv".into(), csv);
    report_outcome("dualize", report, passed, artifacts)
}

pub fn eigen(cfg: &EigenConfig, seed: u64) -> Result<Outcome, CliError> {
    let grid = cfg.grid.build()?;
    let r = min_eigenvalue(&grid)?;
    let passed = r.relative_residual <= EIGEN_RESIDUAL_TOL;
    let report = json!({
        "seed": seed,
        "grid": cfg.grid,
        "eigen": r,
        "continuum": continuum_min_eigenvalue(cfg.grid.x_max - cfg.grid.x_min),
        "strip_infimum": 1.0,
    });
    report_outcome("eigen", report, passed, Artifacts::new())
}

pub fn maglev(cfg: &MaglevConfig, seed: u64) -> Result<Outcome, CliError> {
    let ks = cfg.k.expand("k")?;
    let ys = cfg.y.expand("y")?;
    let rows = sweep(&ks, &ys, cfg.b0, cfg.wavelength, cfg.mu0)?;
    let mut csv = Vec::new();
    write_sweep_csv(&rows, &mut csv)?;
    let report = json!({
        "seed": seed,
        "b0": cfg.b0,
        "wavelength": cfg.wavelength,
        "mu0": cfg.mu0,
        "rows": rows.len(),
        "units": "B0^2 / mu0",
    });
    let mut artifacts = Artifacts::new();
    artifacts.insert("maglev_sweep.csv".into(), csv);
    report_outcome("maglev", report, true, artifacts)
}

pub fn verify_all(profile: Profile, seed: u64) -> Result<Outcome, CliError> {
    let (summary, artifacts) = verify::verify_all(profile, seed)?;
    Ok(Outcome {
        artifacts,
        passed: summary.all_passed,
        summary: summary.table(),
    })
}
