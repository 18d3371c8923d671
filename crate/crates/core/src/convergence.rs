//! Time-step self-convergence studies for both solvers.

use serde::{Deserialize, Serialize};

use crate::constitutive::ConstitutiveModel;
use crate::error::{Result, SlvError};
use crate::fixed_point::{picard_iterate, SolverConfig};
use crate::grid::{derivative_periodic, linf_norm, Field};
use crate::oracle::oracle_run;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Picard iteration; compares the final potential `η(T)`.
    Picard,
    /// IMEX solver; compares the final strain-sum `ω(T)`.
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub pipeline: Pipeline,
    pub dts: Vec<f64>,
    /// `‖y_{dt_k}(T) − y_{dt_{k+1}}(T)‖_∞`
    pub differences: Vec<f64>,
    /// `log₂(d_k / d_{k+1})`
    pub orders: Vec<f64>,
    /// Order from the two finest pairs.
    pub observed_order: f64,
}

pub const MIN_LEVELS: usize = 3;

/// Step sizes `dt, dt/2, …` for `levels` refinement levels.
pub fn refinement_steps(dt: f64, levels: usize) -> Result<Vec<f64>> {
    if levels < MIN_LEVELS {
        return Err(SlvError::Config(format!(
            "a convergence study needs at least {MIN_LEVELS} levels, got {levels}"
        )));
    }
    Ok((0..levels).map(|k| dt / (1u64 << k) as f64).collect())
}

/// Final field of one pipeline run with step `dt`.
pub fn level_solution(
    pipeline: Pipeline,
    eta0: &Field,
    eta1: &Field,
    model: &ConstitutiveModel,
    cfg: &SolverConfig,
    horizon: f64,
    dt: f64,
) -> Result<Field> {
    match pipeline {
        Pipeline::Picard => {
            let cfg = SolverConfig { dt, ..cfg.clone() };
            let out = picard_iterate(eta0, eta1, model, &cfg, horizon)?;
            Ok(out.trajectory.final_value().clone())
        }
        Pipeline::Oracle => {
            let traj = oracle_run(
                &derivative_periodic(eta0),
                &derivative_periodic(eta1),
                model,
                cfg.nu,
                dt,
                horizon,
            )?;
            Ok(traj.final_value().clone())
        }
    }
}

/// Observed orders from final fields at successively halved steps.
pub fn study_from_solutions(
    pipeline: Pipeline,
    dts: Vec<f64>,
    finals: &[Field],
) -> Result<ConvergenceStudy> {
    if finals.len() != dts.len() || finals.len() < MIN_LEVELS {
        return Err(SlvError::DegenerateInput(
            "need one solution per level and at least three levels".into(),
        ));
    }
    let differences: Vec<f64> = finals
        .windows(2)
        .map(|w| linf_norm(&w[0].sub(&w[1])))
        .collect();
    let orders: Vec<f64> = differences
        .windows(2)
        .map(|d| (d[0] / d[1]).log2())
        .collect();
    let observed_order = *orders.last().expect("at least one order");
    Ok(ConvergenceStudy {
        pipeline,
        dts,
        differences,
        orders,
        observed_order,
    })
}

pub fn convergence_study(
    pipeline: Pipeline,
    eta0: &Field,
    eta1: &Field,
    model: &ConstitutiveModel,
    cfg: &SolverConfig,
    horizon: f64,
    levels: usize,
) -> Result<ConvergenceStudy> {
    let dts = refinement_steps(cfg.dt, levels)?;
    let finals = dts
        .iter()
        .map(|&dt| level_solution(pipeline, eta0, eta1, model, cfg, horizon, dt))
        .collect::<Result<Vec<_>>>()?;
    study_from_solutions(pipeline, dts, &finals)
}
