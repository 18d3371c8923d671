//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::f64::consts::FRAC_PI_2;
use std::time::{Duration, Instant};

use rand::{rngs::StdRng, Rng, SeedableRng};

use common::{mode_shape, DampedMode};
use slv_core::constitutive::{ConstitutiveModel, ModelKind};
use slv_core::convergence::{convergence_study, Pipeline};
use slv_core::diagnostics::{run_diagnostics, DiagnosticsOptions, DiagnosticsReport};
use slv_core::fixed_point::{picard_iterate, PicardOutcome, SolverConfig};
use slv_core::grid::{derivative_periodic, integral, linf_norm, Field, GridSpec};
use slv_core::oracle::oracle_run;
use slv_core::scenario::Scenario;
use slv_core::transforms::{eta_to_displacement, filter_residual};
use slv_core::{SlvError, Trajectory};

type Outcome = std::result::Result<String, String>;

struct Shared {
    picard: PicardOutcome,
    oracle: Trajectory,
    cfg: SolverConfig,
    model: ConstitutiveModel,
    report: DiagnosticsReport,
    elapsed: Duration,
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(limit: Duration, elapsed: Duration) -> bool {
    elapsed <= limit
}

// ---------------------------------------------------------------------------

fn c1_constitutive_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let stresses: Vec<f64> = (0..10_000).map(|_| rng.gen_range(-50.0..=50.0)).collect();
    let mut worst = 0.0_f64;
    for kind in ModelKind::ALL {
        let m = ConstitutiveModel::new(kind);
        for &s in &stresses {
            let back = m
                .g(m.h(s))
                .map_err(|e| format!("{kind}: g(h({s})) failed: {e}"))?;
            worst = worst.max((back - s).abs() / (1.0 + s.abs()));
        }
    }
    let deltas: Vec<f64> = ModelKind::ALL
        .iter()
        .map(|&k| ConstitutiveModel::new(k).admissible_delta())
        .collect();
    let deltas_ok = deltas[0] == 1.0
        && deltas[1] == FRAC_PI_2
        && deltas[2] == f64::INFINITY
        && deltas[3] == f64::INFINITY;
    let elapsed = start.elapsed();
    check(
        worst <= 1e-10 && deltas_ok && within(Duration::from_secs(1), elapsed),
        format!("max scaled round-trip error {worst:.2e} (tol 1e-10), delta_max {deltas:?}, {elapsed:.2?}"),
    )
}

fn mode_config(dt: f64, t0: f64, fp_tol: f64) -> SolverConfig {
    SolverConfig {
        nu: 1.0,
        dt,
        t0,
        fp_tol,
        max_picard_iters: 80,
        ..SolverConfig::default()
    }
}

fn c2_linear_exact_mode() -> Outcome {
    let start = Instant::now();
    let grid = GridSpec::new(20.0, 256).map_err(|e| e.to_string())?;
    let model = ConstitutiveModel::new(ModelKind::Linear);
    let (shape, xi) = mode_shape(&grid, 1);
    let amp = 0.1;
    let cfg = mode_config(1e-3, 1.0, 1e-11);
    let out = picard_iterate(&shape.scale(amp), &grid.zeros(), &model, &cfg, 1.0)
        .map_err(|e| e.to_string())?;
    let exact = DampedMode::new(xi, cfg.nu, amp, 0.0);
    let traj = &out.trajectory;
    let mut err = 0.0_f64;
    let mut scale = 0.0_f64;
    for n in 0..traj.levels() {
        let reference = shape.scale(exact.amplitude(traj.time(n)));
        err = err.max(linf_norm(&traj.value(n).sub(&reference)));
        scale = scale.max(linf_norm(&reference));
    }
    let rel = err / scale;
    let ratios = &out.history.ratios;
    let contracting = ratios.iter().all(|&r| r < 1.0);
    let elapsed = start.elapsed();
    check(
        rel <= 1e-4 && contracting && within(Duration::from_secs(30), elapsed),
        format!(
            "relative max error {rel:.2e} (tol 1e-4), {} iterations, max ratio {:.3}, {elapsed:.2?}",
            out.history.iterations(),
            out.history.max_ratio().unwrap_or(0.0)
        ),
    )
}

fn acceptance_setup() -> (GridSpec, Field, ConstitutiveModel, SolverConfig) {
    let grid = GridSpec::new(20.0, 512).expect("grid");
    let eta0 = grid.sample(|x| 0.05 * (-x * x).exp());
    let cfg = SolverConfig {
        nu: 1.0,
        dt: 5e-4,
        s: 3.0,
        delta_bar: 2.0,
        m_bound: 2.0,
        delta: 0.5,
        theta_floor: 0.1,
        k1_bound: None,
        t0: 0.5,
        fp_tol: 1e-10,
        max_picard_iters: 80,
        strict_smallness: true,
    };
    (
        grid,
        eta0,
        ConstitutiveModel::new(ModelKind::RationalSquareRoot),
        cfg,
    )
}

fn shared_run() -> std::result::Result<Shared, String> {
    let start = Instant::now();
    let (grid, eta0, model, cfg) = acceptance_setup();
    let eta1 = grid.zeros();
    let picard = picard_iterate(&eta0, &eta1, &model, &cfg, 0.5).map_err(|e| e.to_string())?;
    let oracle = oracle_run(
        &derivative_periodic(&eta0),
        &derivative_periodic(&eta1),
        &model,
        cfg.nu,
        cfg.dt,
        0.5,
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let report = run_diagnostics(
        &picard.trajectory,
        &model,
        &cfg,
        Some(&picard.history),
        DiagnosticsOptions::default(),
    );
    Ok(Shared {
        picard,
        oracle,
        cfg,
        model,
        report,
        elapsed,
    })
}

fn c3_cross_solver(shared: &Shared) -> Outcome {
    let picard_omega = derivative_periodic(shared.picard.trajectory.final_value());
    let gap = linf_norm(&picard_omega.sub(shared.oracle.final_value()));
    let scale = linf_norm(shared.oracle.final_value());
    check(
        gap <= 1e-4 && within(Duration::from_secs(60), shared.elapsed),
        format!(
            "max |ω_picard − ω_oracle| at T = {gap:.2e} (tol 1e-4, ‖ω‖∞ = {scale:.3e}), {} iterations, {:.2?}",
            shared.picard.history.iterations(),
            shared.elapsed
        ),
    )
}

fn c4_conservation(shared: &Shared) -> Outcome {
    let r = &shared.report;
    let names = ["conserved_omega", "conserved_omega_t", "conserved_phi"];
    let mut parts = Vec::new();
    let mut ok = true;
    for name in names {
        let v = r.verdict(name).ok_or("missing verdict")?;
        ok &= v.passed;
        parts.push(format!("{name} {:.1e}/{:.1e}", v.worst, v.bound));
    }
    // the oracle conserves the same integrals
    let tol_w = 1e-8 * (1.0 + linf_norm(shared.oracle.value(0)));
    let tol_z = 1e-8 * (1.0 + linf_norm(shared.oracle.rate(0)));
    let drift_w = shared
        .oracle
        .values()
        .iter()
        .map(|f| integral(f).abs())
        .fold(0.0, f64::max);
    let drift_z = shared
        .oracle
        .rates()
        .iter()
        .map(|f| integral(f).abs())
        .fold(0.0, f64::max);
    ok &= drift_w <= tol_w && drift_z <= tol_z;
    parts.push(format!("oracle ∫ω {drift_w:.1e}, ∫ω_t {drift_z:.1e}"));
    check(ok, parts.join(", "))
}

fn c5_hypotheses(shared: &Shared) -> Outcome {
    let r = &shared.report;
    let strain = r.verdict("strain_linf").ok_or("missing verdict")?.worst;
    let floor = r
        .verdict("ellipticity_floor")
        .ok_or("missing verdict")?
        .worst;
    let delta_max = shared.model.admissible_delta();
    let ok = strain <= 0.5 && 0.5 < delta_max && floor >= 1.0 && r.passed();
    let failed: Vec<&str> = r
        .verdicts
        .iter()
        .filter(|v| !v.passed)
        .map(|v| v.check.as_str())
        .collect();
    check(
        ok,
        format!(
            "max ‖η_x‖∞ {strain:.4} (≤ 0.5), min g′ {floor:.6} (≥ 1), verdict {} {failed:?}",
            if r.passed() { "PASS" } else { "FAIL" }
        ),
    )
}

fn c6_order() -> Outcome {
    let grid = GridSpec::new(20.0, 256).map_err(|e| e.to_string())?;
    let model = ConstitutiveModel::new(ModelKind::Linear);
    let (shape, _) = mode_shape(&grid, 1);
    let cfg = mode_config(0.1, 1.0, 1e-12);
    let eta0 = shape.scale(0.1);
    let mut parts = Vec::new();
    let mut ok = true;
    for pipeline in [Pipeline::Picard, Pipeline::Oracle] {
        let study = convergence_study(pipeline, &eta0, &grid.zeros(), &model, &cfg, 1.0, 4)
            .map_err(|e| e.to_string())?;
        ok &= (study.observed_order - 2.0).abs() <= 0.2;
        parts.push(format!(
            "{pipeline:?} order {:.3} (orders {:?}, differences {:?})",
            study.observed_order,
            study
                .orders
                .iter()
                .map(|o| format!("{o:.3}"))
                .collect::<Vec<_>>(),
            study
                .differences
                .iter()
                .map(|d| format!("{d:.2e}"))
                .collect::<Vec<_>>()
        ));
    }
    check(ok, parts.join("; "))
}

fn c7_displacement(shared: &Shared) -> Outcome {
    let traj = &shared.picard.trajectory;
    let u = eta_to_displacement(traj, &traj.grid().zeros(), shared.cfg.nu)
        .map_err(|e| e.to_string())?;
    let residual = filter_residual(traj, &u, shared.cfg.nu).map_err(|e| e.to_string())?;
    check(
        residual <= 1e-6 && u.is_finite(),
        format!("max ‖η − (u + ν u_t)‖∞ = {residual:.2e} (tol 1e-6)"),
    )
}

fn c8_failure_signaling() -> Outcome {
    let (grid, _, model, cfg) = acceptance_setup();
    let cfg = SolverConfig {
        delta: 0.99,
        strict_smallness: false,
        ..cfg
    };
    let mut parts = Vec::new();
    let mut ok = true;
    // peak strain of A·exp(−x²) is A·√(2/e) ≈ 0.858·A, past the limit for both
    for amplitude in [1.2, 2.0] {
        let eta0 = grid.sample(|x| amplitude * (-x * x).exp());
        let picard = picard_iterate(&eta0, &grid.zeros(), &model, &cfg, 0.5).map(|o| o.trajectory);
        let oracle = oracle_run(
            &derivative_periodic(&eta0),
            &grid.zeros(),
            &model,
            cfg.nu,
            cfg.dt,
            0.5,
        );
        for (solver, result) in [("picard", picard), ("oracle", oracle)] {
            match result {
                Err(e @ (SlvError::Domain { .. } | SlvError::Ellipticity { .. })) => {
                    parts.push(format!("{solver} amplitude {amplitude}: {}", e.kind()))
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!(
                        "{solver} amplitude {amplitude}: unexpected {}",
                        e.kind()
                    ));
                }
                Ok(traj) => {
                    ok = false;
                    let finite = traj.is_finite();
                    parts.push(format!(
                        "{solver} amplitude {amplitude}: no error (finite output: {finite})"
                    ));
                }
            }
        }
    }
    let text = r#"{
        "name": "nonzero-mean",
        "model": "rational_sqrt",
        "initial_data": {"form": "strain_sum", "first": {"family": "gaussian", "amplitude": 0.05}},
        "grid": {"L": 20, "N": 512},
        "time": {"dt": 5e-4, "T": 0.5},
        "physics": {"nu": 1.0}
    }"#;
    match Scenario::from_json(text).and_then(|s| s.build()) {
        Err(SlvError::MeanZeroViolation { mean, .. }) => parts.push(format!(
            "nonzero-mean ω₀ rejected at load (mean {mean:.3e})"
        )),
        other => {
            ok = false;
            parts.push(format!("nonzero-mean ω₀ not rejected: {:?}", other.err()));
        }
    }
    check(ok, parts.join("; "))
}

fn c9_contraction_breakdown() -> Outcome {
    let start = Instant::now();
    let (grid, eta0, model, cfg) = acceptance_setup();
    let cfg = SolverConfig {
        t0: 10.0,
        strict_smallness: false,
        ..cfg
    };
    let result = picard_iterate(&eta0, &grid.zeros(), &model, &cfg, 10.0);
    let elapsed = start.elapsed();
    match result {
        Ok(out) => check(
            out.trajectory.is_finite(),
            format!(
                "converged in {} iterations (max ratio {:.3}), {elapsed:.2?}",
                out.history.iterations(),
                out.history.max_ratio().unwrap_or(0.0)
            ),
        ),
        Err(SlvError::NoContraction { iteration, .. }) => Ok(format!(
            "NoContraction raised at iteration {iteration}, {elapsed:.2?}"
        )),
        Err(e) => Err(format!("unexpected {} ({e}), {elapsed:.2?}", e.kind())),
    }
}

fn main() {
    let start = Instant::now();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    results.push((1, "constitutive round trip", c1_constitutive_round_trip()));
    results.push((2, "linear exact mode solution", c2_linear_exact_mode()));
    match shared_run() {
        Ok(shared) => {
            results.push((3, "cross-solver equivalence", c3_cross_solver(&shared)));
            results.push((4, "conservation", c4_conservation(&shared)));
            results.push((5, "hypothesis monitoring", c5_hypotheses(&shared)));
            results.push((7, "displacement recovery", c7_displacement(&shared)));
        }
        Err(e) => {
            for (n, name) in [
                (3, "cross-solver equivalence"),
                (4, "conservation"),
                (5, "hypothesis monitoring"),
                (7, "displacement recovery"),
            ] {
                results.push((n, name, Err(format!("acceptance run failed: {e}"))));
            }
        }
    }
    results.push((6, "order of accuracy", c6_order()));
    results.push((8, "failure signaling", c8_failure_signaling()));
    results.push((9, "contraction breakdown", c9_contraction_breakdown()));
    results.sort_by_key(|r| r.0);

    let mut failures = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(detail) => {
                failures += 1;
                println!("FAIL criterion {n} ({name}): {detail}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failures} failed, {:.2?}",
        results.len() - failures,
        start.elapsed()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
