//! Monitored hypotheses and conserved quantities of a computed potential trajectory.

use serde::{Deserialize, Serialize};

use crate::constitutive::ConstitutiveModel;
use crate::fixed_point::{ContractionHistory, SolverConfig};
use crate::grid::{derivative, derivative_periodic, integral, linf_norm, sobolev_norm, Field};
use crate::trajectory::Trajectory;

/// Relative tolerance on conserved integrals, scaled by `1 + ‖f(0)‖_∞`.
pub const CONSERVATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsOptions {
    pub conservation_tol: f64,
    /// Data is exactly periodic on the grid rather than decayed at `±L`; the
    /// integrals of `ω` and `ω_t` then use the periodic difference.
    pub periodic: bool,
}

impl Default for DiagnosticsOptions {
    fn default() -> Self {
        DiagnosticsOptions {
            conservation_tol: CONSERVATION_TOL,
            periodic: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub check: String,
    pub passed: bool,
    /// Worst sample of the monitored quantity.
    pub worst: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub times: Vec<f64>,
    pub conserved_omega: Vec<f64>,
    pub conserved_omega_t: Vec<f64>,
    pub conserved_phi: Vec<f64>,
    pub ellipticity_floor: Vec<f64>,
    pub strain_linf: Vec<f64>,
    pub sobolev_eta: Vec<f64>,
    pub sobolev_eta_t: Vec<f64>,
    pub contraction_history: Vec<f64>,
    pub verdicts: Vec<Verdict>,
    pub cascade_consistent: bool,
}

impl DiagnosticsReport {
    pub fn passed(&self) -> bool {
        self.cascade_consistent && self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, check: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.check == check)
    }

    /// Rows `(t, quantity, value)` for CSV export.
    pub fn series_rows(&self) -> Vec<(f64, &'static str, f64)> {
        let named: [(&'static str, &Vec<f64>); 7] = [
            ("conserved_omega", &self.conserved_omega),
            ("conserved_omega_t", &self.conserved_omega_t),
            ("conserved_phi", &self.conserved_phi),
            ("ellipticity_floor", &self.ellipticity_floor),
            ("strain_linf", &self.strain_linf),
            ("sobolev_eta", &self.sobolev_eta),
            ("sobolev_eta_t", &self.sobolev_eta_t),
        ];
        let mut rows = Vec::with_capacity(named.len() * self.times.len());
        for (n, &t) in self.times.iter().enumerate() {
            for (name, series) in named {
                rows.push((t, name, series[n]));
            }
        }
        rows
    }
}

/// Evaluates every monitored quantity on the potential trajectory `(η, φ = η_t)`.
///
/// Never fails on a violated bound; violations show up as failed verdicts.
/// A strain outside the law's admissible range yields an infinite coefficient
/// sample instead of an error.
pub fn run_diagnostics(
    traj: &Trajectory,
    model: &ConstitutiveModel,
    cfg: &SolverConfig,
    history: Option<&ContractionHistory>,
    opts: DiagnosticsOptions,
) -> DiagnosticsReport {
    let levels = traj.levels();
    let mut report = DiagnosticsReport {
        times: (0..levels).map(|n| traj.time(n)).collect(),
        conserved_omega: Vec::with_capacity(levels),
        conserved_omega_t: Vec::with_capacity(levels),
        conserved_phi: Vec::with_capacity(levels),
        ellipticity_floor: Vec::with_capacity(levels),
        strain_linf: Vec::with_capacity(levels),
        sobolev_eta: Vec::with_capacity(levels),
        sobolev_eta_t: Vec::with_capacity(levels),
        contraction_history: history.map(|h| h.ratios.clone()).unwrap_or_default(),
        verdicts: Vec::new(),
        cascade_consistent: true,
    };
    let gradient = |f: &Field| {
        if opts.periodic {
            derivative_periodic(f)
        } else {
            derivative(f)
        }
    };
    for n in 0..levels {
        let (eta, phi) = (traj.value(n), traj.rate(n));
        let strain = derivative_periodic(eta);
        report.conserved_omega.push(integral(&gradient(eta)));
        report.conserved_omega_t.push(integral(&gradient(phi)));
        report.conserved_phi.push(integral(phi));
        report.strain_linf.push(linf_norm(&strain));
        let floor = strain
            .values()
            .iter()
            .map(|&w| model.g_prime(w).unwrap_or(f64::INFINITY))
            .fold(f64::INFINITY, f64::min);
        report.ellipticity_floor.push(floor);
        report.sobolev_eta.push(sobolev_norm(eta, cfg.s));
        report.sobolev_eta_t.push(sobolev_norm(phi, cfg.s));
    }

    let tol = opts.conservation_tol;
    let omega_scale = 1.0 + linf_norm(&derivative_periodic(traj.value(0)));
    let omega_t_scale = 1.0 + linf_norm(&derivative_periodic(traj.rate(0)));
    let phi_scale = 1.0 + linf_norm(traj.rate(0));
    let phi0 = report.conserved_phi[0];

    let max_abs = |xs: &[f64]| xs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let max_of = |xs: &[f64]| xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_of = |xs: &[f64]| xs.iter().copied().fold(f64::INFINITY, f64::min);
    let phi_drift: Vec<f64> = report.conserved_phi.iter().map(|p| p - phi0).collect();

    let mut push = |check: &str, worst: f64, bound: f64, passed: bool| {
        report.verdicts.push(Verdict {
            check: check.to_string(),
            passed,
            worst,
            bound,
        });
    };
    let w = max_abs(&report.conserved_omega);
    push(
        "conserved_omega",
        w,
        tol * omega_scale,
        w <= tol * omega_scale,
    );
    let w = max_abs(&report.conserved_omega_t);
    push(
        "conserved_omega_t",
        w,
        tol * omega_t_scale,
        w <= tol * omega_t_scale,
    );
    let w = max_abs(&phi_drift);
    push("conserved_phi", w, tol * phi_scale, w <= tol * phi_scale);
    let w = max_of(&report.strain_linf);
    push("strain_linf", w, cfg.delta, w <= cfg.delta);
    let w = min_of(&report.ellipticity_floor);
    push(
        "ellipticity_floor",
        w,
        cfg.theta_floor,
        w >= cfg.theta_floor,
    );
    let w = max_of(&report.sobolev_eta);
    push("sobolev_eta", w, cfg.delta_bar, w <= cfg.delta_bar);
    let w = max_of(&report.sobolev_eta_t);
    push("sobolev_eta_t", w, cfg.m_bound, w <= cfg.m_bound);
    if history.is_some() {
        let w = max_of(&report.contraction_history).max(0.0);
        push("contraction", w, 1.0, w < 1.0);
    }

    // Strain within δ forces the coefficient above inf_{|z|≤δ} g′.
    if let Ok(floor) = model.inf_g_prime(cfg.delta) {
        report.cascade_consistent = report
            .strain_linf
            .iter()
            .zip(&report.ellipticity_floor)
            .all(|(&s, &a)| s > cfg.delta || a >= floor * (1.0 - 1e-12));
    }
    report
}
