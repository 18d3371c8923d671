//! Changes of variable between stress, strain-sum, potential and displacement.

use crate::constitutive::ConstitutiveModel;
use crate::error::{Result, SlvError};
use crate::grid::{antiderivative, derivative_periodic, Field};
use crate::trajectory::{time_derivative, Trajectory};

/// Initial data in every representation used by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioData {
    pub s0: Field,
    pub s1: Field,
    pub omega0: Field,
    pub omega1: Field,
    pub eta0: Field,
    pub eta1: Field,
    pub u0: Field,
}

impl ScenarioData {
    /// From a stress pair `(S₀, S₁)`.
    pub fn from_stress(
        s0: Field,
        s1: Field,
        model: &ConstitutiveModel,
        mean_zero_tol: Option<f64>,
    ) -> Result<Self> {
        let (omega0, omega1) = stress_to_omega(&s0, &s1, model);
        let eta0 = antiderivative(&omega0, mean_zero_tol)?;
        let eta1 = antiderivative(&omega1, mean_zero_tol)?;
        let u0 = s0.grid().zeros();
        Ok(ScenarioData {
            s0,
            s1,
            omega0,
            omega1,
            eta0,
            eta1,
            u0,
        })
    }

    /// From a strain-sum pair `(ω₀, ω₁)`.
    pub fn from_strain_sum(
        omega0: Field,
        omega1: Field,
        model: &ConstitutiveModel,
        mean_zero_tol: Option<f64>,
    ) -> Result<Self> {
        let eta0 = antiderivative(&omega0, mean_zero_tol)?;
        let eta1 = antiderivative(&omega1, mean_zero_tol)?;
        Self::assemble(omega0, omega1, eta0, eta1, model)
    }

    /// From a potential pair `(η₀, η₁)`; the strain-sum is its discrete derivative.
    pub fn from_potential(eta0: Field, eta1: Field, model: &ConstitutiveModel) -> Result<Self> {
        let omega0 = derivative_periodic(&eta0);
        let omega1 = derivative_periodic(&eta1);
        Self::assemble(omega0, omega1, eta0, eta1, model)
    }

    fn assemble(
        omega0: Field,
        omega1: Field,
        eta0: Field,
        eta1: Field,
        model: &ConstitutiveModel,
    ) -> Result<Self> {
        let s0 = omega_to_stress(&omega0, model)?;
        // S_t = g′(ω) ω_t
        let slope = omega0.try_map(|j, w| model.g_prime(w).map_err(|e| e.at_node(j)))?;
        let s1 = slope.zip_map(&omega1, |a, b| a * b);
        let u0 = eta0.grid().zeros();
        Ok(ScenarioData {
            s0,
            s1,
            omega0,
            omega1,
            eta0,
            eta1,
            u0,
        })
    }

    pub fn with_displacement(mut self, u0: Field) -> Result<Self> {
        if !u0.grid().same_as(self.eta0.grid()) {
            return Err(SlvError::GridMismatch("initial displacement grid".into()));
        }
        self.u0 = u0;
        Ok(self)
    }

    /// Strain-sum seen by the finite-difference solvers: the periodic centered
    /// difference of the potential. Agrees with `omega0`, `omega1` up to the
    /// truncation error of the difference quotient.
    pub fn discrete_strain(&self) -> (Field, Field) {
        (
            derivative_periodic(&self.eta0),
            derivative_periodic(&self.eta1),
        )
    }
}

/// `ω₀ = h(S₀)`, `ω₁ = h′(S₀)·S₁`.
pub fn stress_to_omega(s0: &Field, s1: &Field, model: &ConstitutiveModel) -> (Field, Field) {
    let omega0 = s0.map(|s| model.h(s));
    let omega1 = s0.zip_map(s1, |s, st| model.h_prime(s) * st);
    (omega0, omega1)
}

pub fn omega_to_eta(omega: &Field, mean_zero_tol: Option<f64>) -> Result<Field> {
    antiderivative(omega, mean_zero_tol)
}

pub fn omega_to_stress(omega: &Field, model: &ConstitutiveModel) -> Result<Field> {
    omega.try_map(|j, w| model.g(w).map_err(|e| e.at_node(j)))
}

/// `σ = g(ω) + ν g′(ω) ω_t`.
pub fn sigma_field(
    omega: &Field,
    omega_t: &Field,
    model: &ConstitutiveModel,
    nu: f64,
) -> Result<Field> {
    let stress = omega_to_stress(omega, model)?;
    if nu == 0.0 {
        return Ok(stress);
    }
    let slope = omega.try_map(|j, w| model.g_prime(w).map_err(|e| e.at_node(j)))?;
    let rate = slope.zip_map(omega_t, |a, b| a * b);
    Ok(stress.axpy(nu, &rate))
}

/// Solves `y + ν y_t = f` for `y` along a time series, with `f` linear between levels.
///
/// The update `y_{n+1} = E y_n + (φ₁ − E) f_n + (1 − φ₁) f_{n+1}`, with
/// `E = e^{−dt/ν}` and `φ₁ = (1 − E)/(dt/ν)`, is the exact convolution of the
/// exponential kernel with the linear interpolant of `f`.
pub fn exponential_filter(
    forcing: &[Field],
    initial: &Field,
    nu: f64,
    dt: f64,
) -> Result<Vec<Field>> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(SlvError::Config(format!(
            "viscosity must be positive, got {nu}"
        )));
    }
    let x = dt / nu;
    let decay = (-x).exp();
    let phi1 = -(-x).exp_m1() / x;
    let (w_old, w_new) = (phi1 - decay, 1.0 - phi1);
    let mut out = Vec::with_capacity(forcing.len());
    out.push(initial.clone());
    for pair in forcing.windows(2) {
        let prev = out.last().expect("seeded");
        let next = prev
            .scale(decay)
            .axpy(w_old, &pair[0])
            .axpy(w_new, &pair[1]);
        out.push(next);
    }
    Ok(out)
}

/// Displacement `u` from the potential, `η = u + ν u_t`; rates are time differences of `u`.
pub fn eta_to_displacement(eta: &Trajectory, u0: &Field, nu: f64) -> Result<Trajectory> {
    filtered_trajectory(eta, u0, nu)
}

/// Strain `u_x` from the strain-sum, `ω = u_x + ν (u_x)_t`.
pub fn strain_recovery(omega: &Trajectory, ux0: &Field, nu: f64) -> Result<Trajectory> {
    filtered_trajectory(omega, ux0, nu)
}

fn filtered_trajectory(forcing: &Trajectory, initial: &Field, nu: f64) -> Result<Trajectory> {
    if !initial.grid().same_as(forcing.grid()) {
        return Err(SlvError::GridMismatch("initial field grid".into()));
    }
    let values = exponential_filter(forcing.values(), initial, nu, forcing.dt())?;
    let rates = time_derivative(&values, forcing.dt())?;
    Trajectory::new(*forcing.grid(), forcing.dt(), values, rates)
}

/// `max_n ‖f_n − (y_n + ν ẏ_n)‖_∞` for a filtered pair.
pub fn filter_residual(forcing: &Trajectory, filtered: &Trajectory, nu: f64) -> Result<f64> {
    if !forcing.compatible_with(filtered) {
        return Err(SlvError::GridMismatch(
            "residual needs matching trajectories".into(),
        ));
    }
    Ok((0..forcing.levels())
        .map(|n| {
            let recon = filtered.value(n).axpy(nu, filtered.rate(n));
            crate::grid::linf_norm(&forcing.value(n).sub(&recon))
        })
        .fold(0.0, f64::max))
}
