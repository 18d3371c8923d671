//! Direct IMEX solver for `ω_tt = g(ω)_xx + ν g(ω)_xxt` on the pair `(ω, ζ = ω_t)`.
//!
//! Used as an independent check on the Picard pipeline, so it evolves a
//! different unknown with a different scheme:
//!
//! ```text
//! ω*      = ωₙ + dt/2·ζₙ
//! ζₙ₊₁ − ζₙ = dt·Δₕ g(ω*) + dt·ν/2·Δₕ[aₙ(ζₙ + ζₙ₊₁)],   aₙ = g′(ωₙ)
//! ωₙ₊₁   = ωₙ + dt/2·(ζₙ + ζₙ₊₁)
//! ```
//!
//! with `Δₕ` the three-point periodic Laplacian. Every column of `Δₕ diag(a)`
//! sums to zero, so `Σω` and `Σζ` are conserved to rounding.

use crate::constitutive::ConstitutiveModel;
use crate::error::{Result, SlvError};
use crate::grid::{forward_fft, laplacian_periodic, Field};
use crate::trajectory::Trajectory;
use crate::tridiag::CyclicTridiagonal;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    pub omega: Field,
    pub zeta: Field,
    pub t: f64,
}

impl OracleState {
    pub fn new(omega: Field, zeta: Field) -> Result<Self> {
        if !omega.grid().same_as(zeta.grid()) {
            return Err(SlvError::GridMismatch(
                "ω and ζ live on different grids".into(),
            ));
        }
        Ok(OracleState {
            omega,
            zeta,
            t: 0.0,
        })
    }
}

/// Largest step allowed by the explicit part, `dx / √max g′(ω)`.
pub fn courant_limit(omega: &Field, model: &ConstitutiveModel) -> Result<f64> {
    let mut peak = 0.0_f64;
    for (j, &w) in omega.values().iter().enumerate() {
        peak = peak.max(model.g_prime(w).map_err(|e| e.at_node(j))?);
    }
    Ok(omega.grid().dx() / peak.sqrt())
}

pub fn oracle_step(
    state: &OracleState,
    model: &ConstitutiveModel,
    nu: f64,
    dt: f64,
) -> Result<OracleState> {
    if !(dt.is_finite() && dt > 0.0) || !(nu.is_finite() && nu >= 0.0) {
        return Err(SlvError::Config(format!(
            "bad step parameters dt={dt}, nu={nu}"
        )));
    }
    let limit = courant_limit(&state.omega, model)?;
    if dt > limit {
        return Err(SlvError::CourantViolation { dt, limit });
    }
    let grid = *state.omega.grid();
    let n = grid.len();
    let a = state
        .omega
        .try_map(|j, w| model.g_prime(w).map_err(|e| e.at_node(j)))?;
    let predictor = state.omega.axpy(0.5 * dt, &state.zeta);
    let stress = predictor.try_map(|j, w| model.g(w).map_err(|e| e.at_node(j)))?;

    let c = 0.5 * dt * nu / (grid.dx() * grid.dx());
    let av = a.values();
    let az = state.zeta.zip_map(&a, |z, a| z * a);
    let rhs = state
        .zeta
        .axpy(dt, &laplacian_periodic(&stress))
        .axpy(c * grid.dx() * grid.dx(), &laplacian_periodic(&az));

    // I − c·Δ diag(a): row j couples a_{j−1}ζ_{j−1}, a_jζ_j, a_{j+1}ζ_{j+1}
    let matrix = CyclicTridiagonal {
        lower: (0..n).map(|j| -c * av[(j + n - 1) % n]).collect(),
        diag: av.iter().map(|a| 1.0 + 2.0 * c * a).collect(),
        upper: (0..n).map(|j| -c * av[(j + 1) % n]).collect(),
    };
    let zeta = Field::new(grid, matrix.solve(rhs.values())?)
        .map_err(|_| SlvError::NonFinite { level: 0 })?;
    let omega = state.omega.axpy(0.5 * dt, &state.zeta.add(&zeta));
    if !omega.is_finite() {
        return Err(SlvError::NonFinite { level: 0 });
    }
    for (j, &w) in omega.values().iter().enumerate() {
        model.check_admissible(w).map_err(|e| e.at_node(j))?;
    }
    Ok(OracleState {
        omega,
        zeta,
        t: state.t + dt,
    })
}

/// Runs to `horizon` in `steps` equal steps; the trajectory stores `(ω, ζ)`.
pub fn oracle_run(
    omega0: &Field,
    omega1: &Field,
    model: &ConstitutiveModel,
    nu: f64,
    dt: f64,
    horizon: f64,
) -> Result<Trajectory> {
    let steps = ((horizon / dt) - 1e-9).ceil().max(1.0) as usize;
    let dt = horizon / steps as f64;
    let mut state = OracleState::new(omega0.clone(), omega1.clone())?;
    let mut values = Vec::with_capacity(steps + 1);
    let mut rates = Vec::with_capacity(steps + 1);
    values.push(state.omega.clone());
    rates.push(state.zeta.clone());
    for n in 0..steps {
        state = oracle_step(&state, model, nu, dt).map_err(|e| match e {
            SlvError::NonFinite { .. } => SlvError::NonFinite { level: n + 1 },
            other => other,
        })?;
        values.push(state.omega.clone());
        rates.push(state.zeta.clone());
    }
    Trajectory::new(*omega0.grid(), dt, values, rates)
}

/// Discrete energy of the linear scheme,
/// `½⟨ζ, (−Δₕ)⁻¹ζ⟩ + ½‖ω‖² − dt²/8·‖ζ‖²`, which the update never increases
/// for `g = id` and `ν ≥ 0`. The mean of `ζ` is excluded from the first term.
pub fn linear_energy(state: &OracleState, dt: f64) -> f64 {
    let grid = state.zeta.grid();
    let n = grid.len();
    let dx = grid.dx();
    let spectrum = forward_fft(state.zeta.values());
    let kinetic: f64 = spectrum
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| {
            let symbol = 2.0 / (dx * dx) * (1.0 - (grid.frequency(k) * dx).cos());
            c.norm_sqr() / symbol
        })
        .sum::<f64>()
        * dx
        / n as f64;
    let zz = state.zeta.dot(&state.zeta);
    0.5 * kinetic + 0.5 * state.omega.dot(&state.omega) - dt * dt / 8.0 * zz
}
