//! Linearize-and-solve map `K` and its Picard iteration.
//!
//! Given a trajectory `v` with `v(0) = η₀`, `v_t(0) = η₁`, the map `K(v) = η`
//! solves the linear problem
//!
//! ```text
//! η_t = φ,
//! φ_t + A_v φ = G_v + F_v,   A_v = 1 − ν D_x(g′(v_x) D_x),  G_v = g(v_x)_x,  F_v = v_t,
//! ```
//!
//! over the whole window `[0, T]`. A fixed point of `K` solves
//! `η_tt = g(η_x)_x + ν g(η_x)_xt`. Picard iteration on `K` converges when
//! `T` is small enough; the ratio of successive `X^s` distances is recorded
//! as the empirical contraction factor.
//!
//! Discretisation: `A_v` is the flux-form operator of [`crate::parabolic`]
//! with `a = g′(D_c v)` at the half step; `G_v` is the periodic difference
//! `δ₋ g(δ₊ v)`, so for the linear law `G_v` is the same three-point
//! Laplacian that appears inside `A_v`.

use serde::{Deserialize, Serialize};

use crate::constitutive::ConstitutiveModel;
use crate::error::{Result, SlvError};
use crate::grid::{
    backward_difference, derivative_periodic, forward_difference, linf_norm, sobolev_norm, Field,
};
use crate::parabolic::EllipticOperator;
use crate::trajectory::{level_distance, xs_distance, Trajectory};

/// Physical, analytical and numerical parameters of a solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    /// Viscosity `ν > 0`.
    pub nu: f64,
    /// Time step (rounded so that an integer number of steps fits the horizon).
    pub dt: f64,
    /// Sobolev order, `s > 5/2`.
    pub s: f64,
    /// Bound on `‖η(t)‖_{H^s}`.
    pub delta_bar: f64,
    /// Bound on `‖η_t(t)‖_{H^s}`.
    #[serde(rename = "M")]
    pub m_bound: f64,
    /// Strain bound on `‖v_x‖_∞`.
    pub delta: f64,
    /// Ellipticity floor for `g′(v_x)`.
    pub theta_floor: f64,
    /// Composition constant for the smallness check; `sup_{|z|≤δ} g′(z)` when absent.
    #[serde(rename = "K1_bound", default)]
    pub k1_bound: Option<f64>,
    /// Reference horizon of the smallness condition, also the slab length for long runs.
    #[serde(rename = "T0")]
    pub t0: f64,
    pub fp_tol: f64,
    pub max_picard_iters: usize,
    /// Turn a failed smallness check into an error.
    #[serde(default)]
    pub strict_smallness: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            nu: 1.0,
            dt: 1e-3,
            s: 3.0,
            delta_bar: 2.0,
            m_bound: 2.0,
            delta: 0.5,
            theta_floor: 0.1,
            k1_bound: None,
            t0: 1.0,
            fp_tol: 1e-10,
            max_picard_iters: 80,
            strict_smallness: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self, model: &ConstitutiveModel) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(SlvError::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        positive("nu", self.nu)?;
        positive("dt", self.dt)?;
        positive("delta_bar", self.delta_bar)?;
        positive("M", self.m_bound)?;
        positive("delta", self.delta)?;
        positive("theta_floor", self.theta_floor)?;
        positive("T0", self.t0)?;
        positive("fp_tol", self.fp_tol)?;
        if !(self.s > 2.5 && self.s.is_finite()) {
            return Err(SlvError::Config(format!(
                "Sobolev order must exceed 5/2, got {}",
                self.s
            )));
        }
        if model.has_finite_limits() && self.delta >= model.admissible_delta() {
            return Err(SlvError::Config(format!(
                "strain bound {} must lie below {} for the {} law",
                self.delta,
                model.admissible_delta(),
                model.name()
            )));
        }
        if let Some(k1) = self.k1_bound {
            positive("K1_bound", k1)?;
        }
        if self.max_picard_iters == 0 {
            return Err(SlvError::Config(
                "max_picard_iters must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn k1(&self, model: &ConstitutiveModel) -> Result<f64> {
        match self.k1_bound {
            Some(k) => Ok(k),
            None => model.sup_g_prime(self.delta),
        }
    }

    /// Number of steps and the adjusted step covering `[0, horizon]` exactly.
    pub fn time_grid(&self, horizon: f64) -> Result<(usize, f64)> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(SlvError::Config(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        let steps = ((horizon / self.dt) - 1e-9).ceil().max(1.0) as usize;
        Ok((steps, horizon / steps as f64))
    }
}

/// Outcome of the smallness condition `‖η₀‖_{H^s} ≤ δ̄ / (2(1 + T₀K₁))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub norm: f64,
    pub threshold: f64,
    pub margin: f64,
    pub k1: f64,
}

pub fn smallness_check(
    eta0: &Field,
    model: &ConstitutiveModel,
    cfg: &SolverConfig,
) -> Result<CheckReport> {
    let k1 = cfg.k1(model)?;
    Ok(smallness_with_k1(eta0, cfg, k1))
}

fn smallness_with_k1(eta0: &Field, cfg: &SolverConfig, k1: f64) -> CheckReport {
    let norm = sobolev_norm(eta0, cfg.s);
    let threshold = cfg.delta_bar / (2.0 * (1.0 + cfg.t0 * k1));
    CheckReport {
        passed: norm <= threshold,
        norm,
        threshold,
        margin: threshold - norm,
        k1,
    }
}

/// Strains and forcing of the linearization at one time level of `v`.
struct LevelTerms {
    strain: Field,
    forcing: Field,
}

fn level_terms(
    v: &Field,
    v_t: &Field,
    level: usize,
    model: &ConstitutiveModel,
    delta: f64,
) -> Result<LevelTerms> {
    let strain = derivative_periodic(v);
    check_strain(&strain, level, model, delta)?;
    let face_strain = forward_difference(v);
    let stress = face_strain.try_map(|j, w| model.g(w).map_err(|e| e.at_node(j)))?;
    let forcing = backward_difference(&stress).add(v_t);
    Ok(LevelTerms { strain, forcing })
}

fn check_strain(strain: &Field, level: usize, model: &ConstitutiveModel, delta: f64) -> Result<()> {
    for (j, &w) in strain.values().iter().enumerate() {
        model.check_admissible(w).map_err(|e| e.at_node(j))?;
    }
    let peak = linf_norm(strain);
    if peak > delta {
        return Err(SlvError::StrainBound {
            strain: peak,
            delta,
            level,
        });
    }
    Ok(())
}

fn coefficient(strain: &Field, model: &ConstitutiveModel) -> Result<Field> {
    strain.try_map(|j, w| model.g_prime(w).map_err(|e| e.at_node(j)))
}

/// One application of `K`: the solution `η` of the problem linearized about `v`.
pub fn linearized_solve(
    v: &Trajectory,
    eta0: &Field,
    eta1: &Field,
    model: &ConstitutiveModel,
    cfg: &SolverConfig,
) -> Result<Trajectory> {
    let grid = *v.grid();
    if !eta0.grid().same_as(&grid) || !eta1.grid().same_as(&grid) {
        return Err(SlvError::GridMismatch(
            "initial data and trajectory grids differ".into(),
        ));
    }
    let dt = v.dt();
    let steps = v.steps();
    let mut values = Vec::with_capacity(steps + 1);
    let mut rates = Vec::with_capacity(steps + 1);
    values.push(eta0.clone());
    rates.push(eta1.clone());

    let mut current = level_terms(v.value(0), v.rate(0), 0, model, cfg.delta)?;
    for n in 0..steps {
        let next = level_terms(v.value(n + 1), v.rate(n + 1), n + 1, model, cfg.delta)?;
        let mid_strain = current.strain.add(&next.strain).scale(0.5);
        let op =
            EllipticOperator::assemble(&coefficient(&mid_strain, model)?, cfg.nu, cfg.theta_floor)?;
        let phi = op.step(&rates[n], &current.forcing, &next.forcing, dt)?;
        let eta = values[n].add(&rates[n].add(&phi).scale(0.5 * dt));
        if !(phi.is_finite() && eta.is_finite()) {
            return Err(SlvError::NonFinite { level: n + 1 });
        }
        values.push(eta);
        rates.push(phi);
        current = next;
    }
    Trajectory::new(grid, dt, values, rates)
}

/// Starting point of the Picard iteration.
#[derive(Debug, Clone)]
pub enum InitialGuess {
    /// `v⁰(t) = η₀ + c·t·η₁`, with `c ∈ [0, 1]` the largest value keeping the strain within `δ`.
    Ramp,
    /// `v⁰(t) = η₀` for all `t`.
    Constant,
    Given(Trajectory),
}

fn build_guess(
    guess: InitialGuess,
    eta0: &Field,
    eta1: &Field,
    cfg: &SolverConfig,
    steps: usize,
    dt: f64,
) -> Result<Trajectory> {
    let grid = *eta0.grid();
    let ramp = |c: f64| -> Result<Trajectory> {
        let slope = eta1.scale(c);
        let values = (0..=steps)
            .map(|n| eta0.axpy(n as f64 * dt, &slope))
            .collect();
        Trajectory::new(grid, dt, values, vec![slope.clone(); steps + 1])
    };
    match guess {
        InitialGuess::Constant => ramp(0.0),
        InitialGuess::Ramp => {
            let horizon = steps as f64 * dt;
            let s0 = derivative_periodic(eta0);
            let s1 = derivative_periodic(eta1);
            let peak = |c: f64| linf_norm(&s0.axpy(c * horizon, &s1));
            if peak(1.0) <= cfg.delta || peak(0.0) > cfg.delta {
                return ramp(1.0);
            }
            let (mut lo, mut hi) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if peak(mid) <= cfg.delta {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            ramp(lo)
        }
        InitialGuess::Given(traj) => {
            if traj.steps() != steps || traj.dt() != dt || !traj.grid().same_as(&grid) {
                return Err(SlvError::GridMismatch(
                    "initial guess does not match the time grid".into(),
                ));
            }
            Ok(traj)
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ContractionHistory {
    /// `X^s` distance between iterate `k+1` and iterate `k`.
    pub distances: Vec<f64>,
    /// `distances[k] / distances[k-1]`; empty for the first iteration.
    pub ratios: Vec<f64>,
}

impl ContractionHistory {
    fn push(&mut self, d: f64) {
        if let Some(&prev) = self.distances.last() {
            self.ratios.push(if prev > 0.0 { d / prev } else { 0.0 });
        }
        self.distances.push(d);
    }

    pub fn iterations(&self) -> usize {
        self.distances.len()
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.ratios.iter().copied().reduce(f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    pub trajectory: Trajectory,
    pub history: ContractionHistory,
}

/// Number of consecutive non-decreasing distances that counts as loss of contraction.
pub const STALL_LIMIT: usize = 3;

/// Picard iteration `v^{k+1} = K(v^k)` on the whole window `[0, horizon]`.
pub fn picard_iterate(
    eta0: &Field,
    eta1: &Field,
    model: &ConstitutiveModel,
    cfg: &SolverConfig,
    horizon: f64,
) -> Result<PicardOutcome> {
    picard_iterate_from(eta0, eta1, model, cfg, horizon, InitialGuess::Ramp)
}

pub fn picard_iterate_from(
    eta0: &Field,
    eta1: &Field,
    model: &ConstitutiveModel,
    cfg: &SolverConfig,
    horizon: f64,
    guess: InitialGuess,
) -> Result<PicardOutcome> {
    cfg.validate(model)?;
    if cfg.strict_smallness {
        let report = smallness_check(eta0, model, cfg)?;
        if !report.passed {
            return Err(SlvError::Smallness {
                norm: report.norm,
                threshold: report.threshold,
            });
        }
    }
    let (steps, dt) = cfg.time_grid(horizon)?;
    let mut v = build_guess(guess, eta0, eta1, cfg, steps, dt)?;
    let mut history = ContractionHistory::default();
    let mut stalls = 0;
    for iteration in 0..cfg.max_picard_iters {
        let next = match linearized_solve(&v, eta0, eta1, model, cfg) {
            Ok(next) => next,
            // an iterate of K left the strain ball, so K is not a self-map on this window
            Err(SlvError::StrainBound {
                strain,
                delta,
                level,
            }) if iteration > 0 => {
                return Err(SlvError::NoContraction {
                    iteration,
                    cause: format!(
                        "iterate left the strain ball (|v_x| = {strain} > {delta} at level {level})"
                    ),
                    distances: history.distances,
                })
            }
            Err(e) => return Err(e),
        };
        let d = (0..next.levels())
            .map(|n| level_distance(&next, &v, n, cfg.s))
            .fold(0.0, f64::max);
        let previous = history.distances.last().copied();
        history.push(d);
        v = next;
        if d <= cfg.fp_tol {
            return Ok(PicardOutcome {
                trajectory: v,
                history,
            });
        }
        match previous {
            Some(p) if d >= p => stalls += 1,
            _ => stalls = 0,
        }
        if stalls >= STALL_LIMIT {
            return Err(SlvError::NoContraction {
                iteration: iteration + 1,
                cause: format!("{STALL_LIMIT} consecutive non-decreasing distances"),
                distances: history.distances,
            });
        }
    }
    Err(SlvError::IterationLimit {
        limit: cfg.max_picard_iters,
        distance: history.distances.last().copied().unwrap_or(f64::NAN),
    })
}

/// Empirical contraction factor `‖Kv − Kv̄‖ / ‖v − v̄‖` in `X^s`.
pub fn contraction_estimate(
    v: &Trajectory,
    v_bar: &Trajectory,
    kv: &Trajectory,
    kv_bar: &Trajectory,
    s: f64,
) -> Result<f64> {
    if !(v.compatible_with(v_bar) && v.compatible_with(kv) && v.compatible_with(kv_bar)) {
        return Err(SlvError::GridMismatch(
            "contraction estimate needs trajectories on one time grid".into(),
        ));
    }
    let denom = xs_distance(v, v_bar, s)?;
    if denom == 0.0 {
        return Err(SlvError::DegenerateInput(
            "the two input trajectories coincide".into(),
        ));
    }
    Ok(xs_distance(kv, kv_bar, s)? / denom)
}

/// Residual of the discrete nonlinear equation evaluated on `traj`, using the
/// same operators as [`linearized_solve`] with `v = η`.
pub fn fixed_point_residual(
    traj: &Trajectory,
    model: &ConstitutiveModel,
    cfg: &SolverConfig,
) -> Result<f64> {
    let dt = traj.dt();
    let mut worst = 0.0_f64;
    let big = f64::INFINITY;
    let mut current = level_terms(traj.value(0), traj.rate(0), 0, model, big)?;
    for n in 0..traj.steps() {
        let next = level_terms(traj.value(n + 1), traj.rate(n + 1), n + 1, model, big)?;
        let mid_strain = current.strain.add(&next.strain).scale(0.5);
        let op = EllipticOperator::assemble(&coefficient(&mid_strain, model)?, cfg.nu, 0.0)?;
        let phi_sum = traj.rate(n).add(traj.rate(n + 1));
        let momentum = traj
            .rate(n + 1)
            .sub(traj.rate(n))
            .scale(1.0 / dt)
            .add(&op.apply(&phi_sum).scale(0.5))
            .sub(&current.forcing.add(&next.forcing).scale(0.5));
        let kinematic = traj
            .value(n + 1)
            .sub(traj.value(n))
            .sub(&phi_sum.scale(0.5 * dt))
            .scale(1.0 / dt);
        worst = worst.max(linf_norm(&momentum)).max(linf_norm(&kinematic));
        current = next;
    }
    Ok(worst)
}

/// One slab of a marched solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlabRecord {
    pub t_start: f64,
    pub length: f64,
    pub iterations: usize,
    pub max_ratio: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct HorizonOutcome {
    pub trajectory: Trajectory,
    pub history: ContractionHistory,
    pub slabs: Vec<SlabRecord>,
    pub achieved_t: f64,
}

/// Shortest slab tried before giving up, in time steps.
const MIN_SLAB_STEPS: usize = 4;

/// Solves on `[0, horizon]`: a single Picard window when `horizon ≤ T0`,
/// otherwise consecutive slabs of length `T0`, halved whenever a slab stops
/// contracting. The contraction history is that of the first slab.
pub fn solve_horizon(
    eta0: &Field,
    eta1: &Field,
    model: &ConstitutiveModel,
    cfg: &SolverConfig,
    horizon: f64,
) -> Result<HorizonOutcome> {
    let (total_steps, dt) = cfg.time_grid(horizon)?;
    let slab_cfg = SolverConfig { dt, ..cfg.clone() };
    let mut slab_steps = ((cfg.t0 / dt) + 1e-9).floor().max(1.0) as usize;
    let mut done = 0usize;
    let mut state = (eta0.clone(), eta1.clone());
    let mut joined: Option<Trajectory> = None;
    let mut first_history = None;
    let mut slabs = Vec::new();
    while done < total_steps {
        let take = slab_steps.min(total_steps - done);
        let attempt = picard_iterate(&state.0, &state.1, model, &slab_cfg, take as f64 * dt);
        match attempt {
            Ok(out) => {
                slabs.push(SlabRecord {
                    t_start: done as f64 * dt,
                    length: take as f64 * dt,
                    iterations: out.history.iterations(),
                    max_ratio: out.history.max_ratio(),
                });
                first_history.get_or_insert_with(|| out.history.clone());
                state = (
                    out.trajectory.final_value().clone(),
                    out.trajectory.final_rate().clone(),
                );
                match joined.as_mut() {
                    Some(traj) => traj.extend_with(out.trajectory)?,
                    None => joined = Some(out.trajectory),
                }
                done += take;
            }
            Err(SlvError::NoContraction { .. }) if take / 2 >= MIN_SLAB_STEPS => {
                slab_steps = take / 2;
            }
            Err(e) => return Err(e),
        }
    }
    let trajectory = joined.expect("at least one slab");
    Ok(HorizonOutcome {
        achieved_t: trajectory.horizon(),
        trajectory,
        history: first_history.unwrap_or_default(),
        slabs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::ModelKind;
    use crate::grid::GridSpec;

    fn grid() -> GridSpec {
        GridSpec::new(20.0, 128).unwrap()
    }

    fn cfg() -> SolverConfig {
        SolverConfig {
            dt: 0.01,
            t0: 0.2,
            ..SolverConfig::default()
        }
    }

    #[test]
    fn zero_data_gives_zero_in_one_iteration() {
        let g = grid();
        let m = ConstitutiveModel::new(ModelKind::RationalSquareRoot);
        let out = picard_iterate(&g.zeros(), &g.zeros(), &m, &cfg(), 0.2).unwrap();
        assert_eq!(out.history.iterations(), 1);
        assert!(out.trajectory.values().iter().all(|f| linf_norm(f) == 0.0));
    }

    #[test]
    fn linearized_solve_preserves_initial_data() {
        let g = grid();
        let m = ConstitutiveModel::new(ModelKind::Arctangent);
        let eta0 = g.sample(|x| 0.05 * (-x * x).exp());
        let eta1 = g.sample(|x| 0.02 * (-(x - 1.0).powi(2)).exp());
        let cfg = cfg();
        let (steps, dt) = cfg.time_grid(0.2).unwrap();
        let v = build_guess(InitialGuess::Ramp, &eta0, &eta1, &cfg, steps, dt).unwrap();
        let eta = linearized_solve(&v, &eta0, &eta1, &m, &cfg).unwrap();
        assert_eq!(eta.value(0), &eta0);
        assert_eq!(eta.rate(0), &eta1);
        assert_eq!(eta.steps(), 20);
    }

    #[test]
    fn linearized_solve_signals_strain_bound() {
        let g = grid();
        let m = ConstitutiveModel::new(ModelKind::Cubic);
        let eta0 = g.sample(|x| 2.0 * (-x * x).exp());
        let cfg = cfg();
        let v = build_guess(InitialGuess::Constant, &eta0, &g.zeros(), &cfg, 4, 0.01).unwrap();
        assert!(matches!(
            linearized_solve(&v, &eta0, &g.zeros(), &m, &cfg),
            Err(SlvError::StrainBound { level: 0, .. })
        ));
    }

    #[test]
    fn linearized_solve_signals_domain_error() {
        let g = grid();
        let m = ConstitutiveModel::new(ModelKind::RationalSquareRoot);
        let eta0 = g.sample(|x| 1.3 * (-x * x).exp());
        let cfg = cfg();
        let v = build_guess(InitialGuess::Constant, &eta0, &g.zeros(), &cfg, 4, 0.01).unwrap();
        assert!(matches!(
            linearized_solve(&v, &eta0, &g.zeros(), &m, &cfg),
            Err(SlvError::Domain { node: Some(_), .. })
        ));
    }

    #[test]
    fn smallness_arithmetic() {
        let g = grid();
        let cfg = SolverConfig {
            delta_bar: 1.0,
            t0: 1.0,
            k1_bound: Some(1.0),
            ..SolverConfig::default()
        };
        let m = ConstitutiveModel::new(ModelKind::Linear);
        let zero = smallness_check(&g.zeros(), &m, &cfg).unwrap();
        assert!(zero.passed);
        assert_eq!(zero.norm, 0.0);
        assert_eq!(zero.threshold, 0.25);

        let bump = g.sample(|x| (-x * x).exp());
        let scaled = bump.scale(0.3 / sobolev_norm(&bump, cfg.s));
        let report = smallness_check(&scaled, &m, &cfg).unwrap();
        assert!(!report.passed);
        assert!((report.margin + 0.05).abs() < 1e-12);
    }

    #[test]
    fn default_k1_is_sup_of_g_prime() {
        let m = ConstitutiveModel::new(ModelKind::RationalSquareRoot);
        let cfg = SolverConfig::default();
        let expected = (1.0f64 - 0.25).powf(-1.5);
        assert!((cfg.k1(&m).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn config_validation() {
        let m = ConstitutiveModel::new(ModelKind::RationalSquareRoot);
        let mut cfg = SolverConfig::default();
        assert!(cfg.validate(&m).is_ok());
        cfg.delta = 1.0;
        assert!(cfg.validate(&m).is_err());
        cfg.delta = 0.5;
        cfg.s = 2.5;
        assert!(cfg.validate(&m).is_err());
        let cubic = ConstitutiveModel::new(ModelKind::Cubic);
        let wide = SolverConfig {
            delta: 40.0,
            ..SolverConfig::default()
        };
        assert!(wide.validate(&cubic).is_ok());
    }

    #[test]
    fn contraction_estimate_edge_cases() {
        let g = grid();
        let a = Trajectory::from_values(g, 0.1, vec![g.zeros(); 3]).unwrap();
        let b = Trajectory::from_values(g, 0.1, vec![g.sample(|x| (-x * x).exp()); 3]).unwrap();
        assert!(matches!(
            contraction_estimate(&a, &a, &a, &b, 3.0),
            Err(SlvError::DegenerateInput(_))
        ));
        assert_eq!(contraction_estimate(&a, &b, &a, &a, 3.0).unwrap(), 0.0);
    }

    #[test]
    fn ramp_guess_is_clamped_to_strain_bound() {
        let g = grid();
        let cfg = SolverConfig {
            delta: 0.1,
            ..cfg()
        };
        let eta0 = g.zeros();
        let eta1 = g.sample(|x| (-x * x).exp());
        let v = build_guess(InitialGuess::Ramp, &eta0, &eta1, &cfg, 100, 0.01).unwrap();
        let peak = v
            .values()
            .iter()
            .map(|f| linf_norm(&derivative_periodic(f)))
            .fold(0.0, f64::max);
        assert!(peak <= 0.1 + 1e-12 && peak > 0.099, "peak {peak}");
    }

    #[test]
    fn slab_marching_covers_the_horizon() {
        let g = grid();
        let m = ConstitutiveModel::new(ModelKind::RationalSquareRoot);
        let eta0 = g.sample(|x| 0.05 * (-x * x).exp());
        let cfg = SolverConfig {
            dt: 0.01,
            t0: 0.25,
            fp_tol: 1e-9,
            ..SolverConfig::default()
        };
        let out = solve_horizon(&eta0, &g.zeros(), &m, &cfg, 1.0).unwrap();
        assert_eq!(out.slabs.len(), 4);
        assert!((out.achieved_t - 1.0).abs() < 1e-12);
        assert_eq!(out.trajectory.steps(), 100);
        let whole = picard_iterate(&eta0, &g.zeros(), &m, &cfg, 1.0).unwrap();
        let diff = linf_norm(
            &whole
                .trajectory
                .final_value()
                .sub(out.trajectory.final_value()),
        );
        assert!(diff < 1e-8, "slabbed vs whole window: {diff}");
    }
}
