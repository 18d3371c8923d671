//! The elliptic operator `Aφ = −ν(aφ_x)_x + φ` and Crank–Nicolson stepping for
//! `φ_t + Aφ = f`.
//!
//! The operator is discretised in flux form on the periodic grid:
//!
//! ```text
//! (Aφ)_j = φ_j − (ν/dx²)·[a_{j+½}(φ_{j+1} − φ_j) − a_{j−½}(φ_j − φ_{j−1})],
//! a_{j±½} = (a_j + a_{j±1}) / 2
//! ```
//!
//! which is symmetric, and positive definite with every eigenvalue ≥ 1.

use crate::error::{Result, SlvError};
use crate::grid::{linf_norm, Field, GridSpec};
use crate::tridiag::CyclicTridiagonal;

#[derive(Debug, Clone)]
pub struct EllipticOperator {
    coefficient: Field,
    nu: f64,
    theta: f64,
    matrix: CyclicTridiagonal,
}

impl EllipticOperator {
    /// Builds the operator for coefficient `a`. Fails if `min a < theta_floor`.
    pub fn assemble(a: &Field, nu: f64, theta_floor: f64) -> Result<Self> {
        if !(nu.is_finite() && nu > 0.0) {
            return Err(SlvError::Config(format!(
                "viscosity must be positive, got {nu}"
            )));
        }
        if !a.is_finite() {
            return Err(SlvError::Format("non-finite diffusion coefficient".into()));
        }
        let (node, theta) =
            a.values()
                .iter()
                .copied()
                .enumerate()
                .fold(
                    (0, f64::INFINITY),
                    |best, (j, v)| if v < best.1 { (j, v) } else { best },
                );
        if theta < theta_floor {
            return Err(SlvError::Ellipticity {
                min: theta,
                floor: theta_floor,
                node,
            });
        }

        let grid = *a.grid();
        let n = grid.len();
        let c = nu / (grid.dx() * grid.dx());
        let av = a.values();
        // face j carries a_{j+½}
        let face: Vec<f64> = (0..n).map(|j| 0.5 * (av[j] + av[(j + 1) % n])).collect();
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for j in 0..n {
            let right = face[j];
            let left = face[(j + n - 1) % n];
            lower[j] = -c * left;
            upper[j] = -c * right;
            diag[j] = 1.0 + c * (left + right);
        }
        Ok(EllipticOperator {
            coefficient: a.clone(),
            nu,
            theta,
            matrix: CyclicTridiagonal { lower, diag, upper },
        })
    }

    pub fn grid(&self) -> &GridSpec {
        self.coefficient.grid()
    }

    pub fn coefficient(&self) -> &Field {
        &self.coefficient
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// Measured ellipticity constant `min_j a_j`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn matrix(&self) -> &CyclicTridiagonal {
        &self.matrix
    }

    pub fn apply(&self, phi: &Field) -> Field {
        Field::from_vec_unchecked(*phi.grid(), self.matrix.matvec(phi.values()))
    }

    pub fn solve(&self, rhs: &Field) -> Result<Field> {
        self.shifted_solve(0.0, 1.0, rhs)
    }

    /// Solves `(α·I + β·A) φ = rhs`.
    pub fn shifted_solve(&self, alpha: f64, beta: f64, rhs: &Field) -> Result<Field> {
        let m = if alpha == 0.0 && beta == 1.0 {
            self.matrix.solve(rhs.values())?
        } else {
            self.matrix.shifted(alpha, beta).solve(rhs.values())?
        };
        let out = Field::from_vec_unchecked(*rhs.grid(), m);
        if !out.is_finite() {
            return Err(SlvError::SingularSystem {
                row: 0,
                pivot: f64::NAN,
            });
        }
        Ok(out)
    }

    /// One Crank–Nicolson step of `φ_t + Aφ = f` with `A` frozen at the half step:
    /// `(I + dt/2·A) φ_new = (I − dt/2·A) φ_old + dt/2·(f_old + f_new)`.
    pub fn step(&self, phi: &Field, f_old: &Field, f_new: &Field, dt: f64) -> Result<Field> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SlvError::Config(format!(
                "time step must be positive, got {dt}"
            )));
        }
        let half = 0.5 * dt;
        let a_phi = self.apply(phi);
        let rhs: Vec<f64> = phi
            .values()
            .iter()
            .zip(a_phi.values())
            .zip(f_old.values().iter().zip(f_new.values()))
            .map(|((p, ap), (fo, fnew))| p - half * ap + half * (fo + fnew))
            .collect();
        self.shifted_solve(1.0, half, &Field::from_vec_unchecked(*phi.grid(), rhs))
    }

    /// Max-norm residual `‖Aφ − rhs‖_∞`.
    pub fn residual(&self, phi: &Field, rhs: &Field) -> f64 {
        linf_norm(&self.apply(phi).sub(rhs))
    }
}

/// Discrete eigenvalue of the constant-coefficient (`a ≡ 1`) operator for frequency `xi`.
pub fn constant_coefficient_eigenvalue(grid: &GridSpec, nu: f64, xi: f64) -> f64 {
    let dx = grid.dx();
    1.0 + nu * (2.0 / (dx * dx)) * (1.0 - (xi * dx).cos())
}
