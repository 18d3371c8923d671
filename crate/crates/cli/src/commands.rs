use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use slv_core::constitutive::ConstitutiveModel;
use slv_core::convergence::{level_solution, refinement_steps, study_from_solutions, Pipeline};
use slv_core::diagnostics::{run_diagnostics, DiagnosticsOptions, DiagnosticsReport};
use slv_core::fixed_point::{smallness_check, solve_horizon, CheckReport, SolverConfig};
use slv_core::grid::{derivative_periodic, linf_norm, sobolev_norm, Field};
use slv_core::io::{contraction_csv, field_csv, read_slvt, series_csv, write_slvt};
use slv_core::oracle::oracle_run;
use slv_core::scenario::{Scenario, Setup};
use slv_core::transforms::{
    eta_to_displacement, filter_residual, omega_to_eta, omega_to_stress, sigma_field,
    strain_recovery,
};
use slv_core::{Result, SlvError, Trajectory};

use crate::output::{emit, error_record, report_error, sanitize, RunDir};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Error,
    ChecksFailed,
}

impl Outcome {
    fn worst(self, other: Outcome) -> Outcome {
        use Outcome::*;
        match (self, other) {
            (Error, _) | (_, Error) => Error,
            (ChecksFailed, _) | (_, ChecksFailed) => ChecksFailed,
            _ => Success,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PipelineChoice {
    Picard,
    Oracle,
    Both,
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| SlvError::Config(format!("thread pool: {e}")))
}

fn fallback_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into())
}

/// Runs `f` on every scenario, in parallel when `jobs > 1`.
pub fn run_batch<F>(paths: &[PathBuf], out: &Path, jobs: usize, f: F) -> Outcome
where
    F: Fn(&Path, &Path) -> Outcome + Sync,
{
    if paths.len() > 1 {
        let mut names = BTreeSet::new();
        for path in paths {
            let name = Scenario::load(path)
                .map(|s| sanitize(&s.name))
                .unwrap_or_else(|_| sanitize(&fallback_name(path)));
            if !names.insert(name.clone()) {
                eprintln!("slv: scenario name {name:?} appears twice in the batch");
                return Outcome::Error;
            }
        }
    }
    let pool = match pool(jobs) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("slv: {e}");
            return Outcome::Error;
        }
    };
    pool.install(|| {
        paths
            .par_iter()
            .map(|p| f(p, out))
            .collect::<Vec<_>>()
            .into_iter()
            .fold(Outcome::Success, Outcome::worst)
    })
}

fn load(path: &Path, out: &Path) -> std::result::Result<(Scenario, Setup), Outcome> {
    let scenario = Scenario::load(path).map_err(|e| {
        report_error(out, &fallback_name(path), &e);
        Outcome::Error
    })?;
    let setup = scenario.build().map_err(|e| {
        report_error(out, &scenario.name, &e);
        Outcome::Error
    })?;
    Ok((scenario, setup))
}

fn diagnostics_options(setup: &Setup) -> DiagnosticsOptions {
    DiagnosticsOptions {
        periodic: setup.periodic,
        ..DiagnosticsOptions::default()
    }
}

fn strain_trajectory(eta: &Trajectory) -> Result<Trajectory> {
    Trajectory::new(
        *eta.grid(),
        eta.dt(),
        eta.values().iter().map(derivative_periodic).collect(),
        eta.rates().iter().map(derivative_periodic).collect(),
    )
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    scenario_file: String,
    scenario: &'a Scenario,
    solver_config: &'a SolverConfig,
    steps: usize,
    dt: f64,
    achieved_t: f64,
    verdicts: &'a [slv_core::diagnostics::Verdict],
    passed: bool,
    exit_code: u8,
    outputs: Vec<String>,
}

fn exit_code(passed: bool) -> (Outcome, u8) {
    if passed {
        (Outcome::Success, 0)
    } else {
        (Outcome::ChecksFailed, 2)
    }
}

/// Files shared by `run` and `oracle`.
fn write_common(
    dir: &mut RunDir,
    setup: &Setup,
    eta: &Trajectory,
    omega: &Trajectory,
    report: &DiagnosticsReport,
) -> Result<()> {
    dir.text("series.csv", &series_csv(report.series_rows()))?;
    dir.text("final_eta.csv", &field_csv(eta.final_value()))?;
    dir.text("final_omega.csv", &field_csv(omega.final_value()))?;
    let stress = omega_to_stress(omega.final_value(), &setup.model)?;
    dir.text("final_stress.csv", &field_csv(&stress))?;
    let sigma = sigma_field(
        omega.final_value(),
        omega.final_rate(),
        &setup.model,
        setup.cfg.nu,
    )?;
    dir.text("final_sigma.csv", &field_csv(&sigma))?;
    let path = dir.file("omega.slvt");
    write_slvt(&path, omega.grid(), omega.dt(), omega.values())?;
    Ok(())
}

pub fn cmd_run(path: &Path, out: &Path, strict: bool) -> Outcome {
    let (scenario, setup) = match load(path, out) {
        Ok(v) => v,
        Err(o) => return o,
    };
    match run_pipeline(path, out, &scenario, &setup, strict) {
        Ok(outcome) => outcome,
        Err(e) => {
            report_error(out, &scenario.name, &e);
            Outcome::Error
        }
    }
}

fn run_pipeline(
    path: &Path,
    out: &Path,
    scenario: &Scenario,
    setup: &Setup,
    strict: bool,
) -> Result<Outcome> {
    let cfg = SolverConfig {
        strict_smallness: strict,
        ..setup.cfg.clone()
    };
    let data = &setup.data;
    let smallness: CheckReport = smallness_check(&data.eta0, &setup.model, &cfg)?;
    if strict && !smallness.passed {
        return Err(SlvError::Smallness {
            norm: smallness.norm,
            threshold: smallness.threshold,
        });
    }
    let solved = solve_horizon(&data.eta0, &data.eta1, &setup.model, &cfg, setup.horizon)?;
    let eta = &solved.trajectory;
    let report = run_diagnostics(
        eta,
        &setup.model,
        &cfg,
        Some(&solved.history),
        diagnostics_options(setup),
    );
    let omega = strain_trajectory(eta)?;
    let u = eta_to_displacement(eta, &data.u0, cfg.nu)?;
    let ux = strain_recovery(&omega, &derivative_periodic(&data.u0), cfg.nu)?;
    let displacement_residual = filter_residual(eta, &u, cfg.nu)?;
    let strain_residual = filter_residual(&omega, &ux, cfg.nu)?;

    let mut dir = RunDir::create(out, &scenario.name)?;
    write_common(&mut dir, setup, eta, &omega, &report)?;
    dir.text("contraction.csv", &contraction_csv(&solved.history))?;
    dir.text("final_displacement.csv", &field_csv(u.final_value()))?;
    dir.text("final_strain.csv", &field_csv(ux.final_value()))?;
    dir.json(
        "report.json",
        &json!({
            "diagnostics": report,
            "passed": report.passed(),
            "smallness": smallness,
            "contraction": solved.history,
            "slabs": solved.slabs,
            "displacement_residual": displacement_residual,
            "strain_residual": strain_residual,
        }),
    )?;
    let (outcome, code) = exit_code(report.passed());
    let manifest = Manifest {
        tool: "slv",
        version: env!("CARGO_PKG_VERSION"),
        command: "run",
        scenario_file: path.display().to_string(),
        scenario,
        solver_config: &cfg,
        steps: eta.steps(),
        dt: eta.dt(),
        achieved_t: solved.achieved_t,
        verdicts: &report.verdicts,
        passed: report.passed(),
        exit_code: code,
        outputs: dir
            .written()
            .iter()
            .cloned()
            .chain(["manifest.json".into()])
            .collect(),
    };
    dir.json("manifest.json", &manifest)?;
    emit(&format!(
        "{}: {} after {} Picard iterations, T = {}, diagnostics {} ({})",
        scenario.name,
        if report.passed() {
            "ok"
        } else {
            "checks failed"
        },
        solved.history.iterations(),
        solved.achieved_t,
        if report.passed() { "PASS" } else { "FAIL" },
        dir.path().display()
    ));
    Ok(outcome)
}

/// Oracle runs write next to, not over, the Picard outputs of the same scenario.
fn oracle_dir_name(scenario: &Scenario) -> String {
    format!("{}-oracle", scenario.name)
}

pub fn cmd_oracle(path: &Path, out: &Path) -> Outcome {
    let (scenario, setup) = match load(path, out) {
        Ok(v) => v,
        Err(o) => return o,
    };
    match oracle_pipeline(path, out, &scenario, &setup) {
        Ok(outcome) => outcome,
        Err(e) => {
            report_error(out, &oracle_dir_name(&scenario), &e);
            Outcome::Error
        }
    }
}

fn oracle_pipeline(path: &Path, out: &Path, scenario: &Scenario, setup: &Setup) -> Result<Outcome> {
    let cfg = &setup.cfg;
    let (w0, w1) = setup.data.discrete_strain();
    let omega = oracle_run(&w0, &w1, &setup.model, cfg.nu, cfg.dt, setup.horizon)?;
    let tol = scenario.tolerances.mean_zero_tol;
    let to_potential = |fields: &[Field]| -> Result<Vec<Field>> {
        fields.iter().map(|f| omega_to_eta(f, tol)).collect()
    };
    let eta = Trajectory::new(
        *omega.grid(),
        omega.dt(),
        to_potential(omega.values())?,
        to_potential(omega.rates())?,
    )?;
    let report = run_diagnostics(&eta, &setup.model, cfg, None, diagnostics_options(setup));
    let mut dir = RunDir::create(out, &oracle_dir_name(scenario))?;
    write_common(&mut dir, setup, &eta, &omega, &report)?;
    dir.json(
        "report.json",
        &json!({ "diagnostics": report, "passed": report.passed() }),
    )?;
    let (outcome, code) = exit_code(report.passed());
    let manifest = Manifest {
        tool: "slv",
        version: env!("CARGO_PKG_VERSION"),
        command: "oracle",
        scenario_file: path.display().to_string(),
        scenario,
        solver_config: cfg,
        steps: omega.steps(),
        dt: omega.dt(),
        achieved_t: omega.horizon(),
        verdicts: &report.verdicts,
        passed: report.passed(),
        exit_code: code,
        outputs: dir
            .written()
            .iter()
            .cloned()
            .chain(["manifest.json".into()])
            .collect(),
    };
    dir.json("manifest.json", &manifest)?;
    emit(&format!(
        "{}: oracle reached T = {}, diagnostics {} ({})",
        scenario.name,
        omega.horizon(),
        if report.passed() { "PASS" } else { "FAIL" },
        dir.path().display()
    ));
    Ok(outcome)
}

pub fn cmd_compare(a: &Path, b: &Path, tol: f64, s: f64) -> Outcome {
    match compare(a, b, tol, s) {
        Ok((value, passed)) => {
            emit(&serde_json::to_string_pretty(&value).unwrap_or_default());
            if passed {
                Outcome::Success
            } else {
                Outcome::ChecksFailed
            }
        }
        Err(e) => {
            eprintln!("slv: compare: {}: {e}", e.kind());
            emit(&error_record(&e).to_string());
            Outcome::Error
        }
    }
}

fn compare(a: &Path, b: &Path, tol: f64, s: f64) -> Result<(serde_json::Value, bool)> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(SlvError::Config(format!(
            "tolerance must be non-negative, got {tol}"
        )));
    }
    let ta = read_slvt(a)?;
    let tb = read_slvt(b)?;
    if !ta.grid.same_as(&tb.grid) {
        return Err(SlvError::GridMismatch(format!(
            "grids differ: L={} N={} vs L={} N={}",
            ta.grid.half_length(),
            ta.grid.len(),
            tb.grid.half_length(),
            tb.grid.len()
        )));
    }
    if ta.levels.len() != tb.levels.len() || (ta.dt - tb.dt).abs() > 1e-12 * ta.dt.abs() {
        return Err(SlvError::GridMismatch(format!(
            "time grids differ: {} levels at dt={} vs {} levels at dt={}",
            ta.levels.len(),
            ta.dt,
            tb.levels.len(),
            tb.dt
        )));
    }
    let diffs: Vec<Field> = ta
        .levels
        .iter()
        .zip(&tb.levels)
        .map(|(x, y)| x.sub(y))
        .collect();
    let max_norm = diffs.iter().map(linf_norm).fold(0.0, f64::max);
    let sobolev = diffs.iter().map(|d| sobolev_norm(d, s)).fold(0.0, f64::max);
    let last = diffs.last().expect("at least one level");
    let passed = max_norm <= tol;
    Ok((
        json!({
            "levels": diffs.len(),
            "max_norm": max_norm,
            "max_norm_final": linf_norm(last),
            "sobolev_order": s,
            "sobolev_norm": sobolev,
            "sobolev_norm_final": sobolev_norm(last, s),
            "tol": tol,
            "passed": passed,
        }),
        passed,
    ))
}

pub fn cmd_convergence(
    path: &Path,
    out: &Path,
    levels: usize,
    choice: PipelineChoice,
    jobs: usize,
) -> Outcome {
    let (scenario, setup) = match load(path, out) {
        Ok(v) => v,
        Err(o) => return o,
    };
    match convergence(&scenario, &setup, out, levels, choice, jobs) {
        Ok(()) => Outcome::Success,
        Err(e) => {
            report_error(out, &scenario.name, &e);
            Outcome::Error
        }
    }
}

fn convergence(
    scenario: &Scenario,
    setup: &Setup,
    out: &Path,
    levels: usize,
    choice: PipelineChoice,
    jobs: usize,
) -> Result<()> {
    let dts = refinement_steps(setup.cfg.dt, levels)?;
    let pipelines: &[Pipeline] = match choice {
        PipelineChoice::Picard => &[Pipeline::Picard],
        PipelineChoice::Oracle => &[Pipeline::Oracle],
        PipelineChoice::Both => &[Pipeline::Picard, Pipeline::Oracle],
    };
    let work: Vec<(Pipeline, f64)> = pipelines
        .iter()
        .flat_map(|&p| dts.iter().map(move |&dt| (p, dt)))
        .collect();
    let data = &setup.data;
    let finals = pool(jobs)?.install(|| {
        work.par_iter()
            .map(|&(p, dt)| {
                level_solution(
                    p,
                    &data.eta0,
                    &data.eta1,
                    &setup.model,
                    &setup.cfg,
                    setup.horizon,
                    dt,
                )
            })
            .collect::<Result<Vec<_>>>()
    })?;
    let mut studies = Vec::new();
    for (i, &p) in pipelines.iter().enumerate() {
        let chunk = &finals[i * dts.len()..(i + 1) * dts.len()];
        let study = study_from_solutions(p, dts.clone(), chunk)?;
        emit(&format!(
            "{}: {:?} observed order {:.3} (differences {:?})",
            scenario.name, p, study.observed_order, study.differences
        ));
        studies.push(study);
    }
    let mut dir = RunDir::create(out, &scenario.name)?;
    dir.json("convergence.json", &studies)?;
    Ok(())
}

const CHECK_SAMPLES: usize = 10_000;
const CHECK_STRESS: f64 = 50.0;

pub fn cmd_model_check(name: &str) -> Outcome {
    let model = match ConstitutiveModel::by_name(name) {
        Ok(m) => m,
        Err(e) => {
            eprintln!("slv: {}: {e}", e.kind());
            emit(&error_record(&e).to_string());
            return Outcome::Error;
        }
    };
    let stresses: Vec<f64> = (0..CHECK_SAMPLES)
        .map(|i| -CHECK_STRESS + 2.0 * CHECK_STRESS * i as f64 / (CHECK_SAMPLES - 1) as f64)
        .collect();
    let mut round_trip = 0.0_f64;
    let mut derivative_product = 0.0_f64;
    let mut failures = Vec::new();
    for &s in &stresses {
        let w = model.h(s);
        match (model.g(w), model.g_prime(w)) {
            (Ok(back), Ok(slope)) => {
                round_trip = round_trip.max((back - s).abs() / (1.0 + s.abs()));
                derivative_product =
                    derivative_product.max((slope * model.h_prime(back) - 1.0).abs());
            }
            (Err(e), _) | (_, Err(e)) => failures.push(format!("S = {s}: {e}")),
        }
    }
    let h_increasing = stresses.windows(2).all(|p| model.h(p[0]) < model.h(p[1]));
    let omegas: Vec<f64> = stresses.iter().map(|&s| model.h(s)).collect();
    let g_increasing = omegas
        .windows(2)
        .all(|p| matches!((model.g(p[0]), model.g(p[1])), (Ok(a), Ok(b)) if a < b));
    let checks = json!([
        { "check": "round_trip", "worst": round_trip, "tol": 1e-10, "passed": round_trip <= 1e-10 && failures.is_empty() },
        { "check": "inverse_derivative", "worst": derivative_product, "tol": 1e-8, "passed": derivative_product <= 1e-8 },
        { "check": "h_increasing", "passed": h_increasing },
        { "check": "g_increasing", "passed": g_increasing },
    ]);
    let passed = checks
        .as_array()
        .map(|a| a.iter().all(|c| c["passed"] == true))
        .unwrap_or(false);
    let delta = model.admissible_delta();
    let report = json!({
        "model": model.name(),
        "delta_max": if delta.is_finite() { json!(delta) } else { json!("inf") },
        "checks": checks,
        "failures": failures,
        "passed": passed,
    });
    emit(&serde_json::to_string_pretty(&report).unwrap_or_default());
    if passed {
        Outcome::Success
    } else {
        Outcome::ChecksFailed
    }
}
