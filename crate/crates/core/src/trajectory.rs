use crate::error::{Result, SlvError};
use crate::grid::{sobolev_norm, Field, GridSpec};

/// Time levels `t_n = n·dt`, `n = 0..=steps`, of a field and its time derivative.
///
/// For the potential this is `(η, η_t = φ)`, for the oracle `(ω, ω_t)`, and for
/// the displacement `(u, u_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    grid: GridSpec,
    dt: f64,
    values: Vec<Field>,
    rates: Vec<Field>,
}

impl Trajectory {
    pub fn new(grid: GridSpec, dt: f64, values: Vec<Field>, rates: Vec<Field>) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SlvError::Config(format!(
                "time step must be positive, got {dt}"
            )));
        }
        if values.len() < 2 || values.len() != rates.len() {
            return Err(SlvError::DegenerateInput(format!(
                "trajectory needs matching value/rate levels (>= 2), got {} and {}",
                values.len(),
                rates.len()
            )));
        }
        if values
            .iter()
            .chain(&rates)
            .any(|f| !f.grid().same_as(&grid))
        {
            return Err(SlvError::GridMismatch(
                "trajectory level on a different grid".into(),
            ));
        }
        Ok(Trajectory {
            grid,
            dt,
            values,
            rates,
        })
    }

    /// Builds a trajectory from values only; rates come from second-order
    /// centered differences in time, one-sided at the two end levels.
    pub fn from_values(grid: GridSpec, dt: f64, values: Vec<Field>) -> Result<Self> {
        let rates = time_derivative(&values, dt)?;
        Trajectory::new(grid, dt, values, rates)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn levels(&self) -> usize {
        self.values.len()
    }

    pub fn horizon(&self) -> f64 {
        self.dt * self.steps() as f64
    }

    pub fn time(&self, n: usize) -> f64 {
        self.dt * n as f64
    }

    pub fn values(&self) -> &[Field] {
        &self.values
    }

    pub fn rates(&self) -> &[Field] {
        &self.rates
    }

    pub fn value(&self, n: usize) -> &Field {
        &self.values[n]
    }

    pub fn rate(&self, n: usize) -> &Field {
        &self.rates[n]
    }

    pub fn final_value(&self) -> &Field {
        self.values.last().expect("trajectory has levels")
    }

    pub fn final_rate(&self) -> &Field {
        self.rates.last().expect("trajectory has levels")
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().chain(&self.rates).all(Field::is_finite)
    }

    pub fn compatible_with(&self, other: &Trajectory) -> bool {
        self.grid.same_as(&other.grid) && self.dt == other.dt && self.levels() == other.levels()
    }

    /// Appends `other`, whose first level must coincide with this trajectory's last.
    pub fn extend_with(&mut self, other: Trajectory) -> Result<()> {
        if !self.grid.same_as(&other.grid) || self.dt != other.dt {
            return Err(SlvError::GridMismatch("cannot join trajectories".into()));
        }
        self.values.extend(other.values.into_iter().skip(1));
        self.rates.extend(other.rates.into_iter().skip(1));
        Ok(())
    }

    pub fn into_parts(self) -> (Vec<Field>, Vec<Field>) {
        (self.values, self.rates)
    }
}

/// Second-order finite differences in time across a sequence of levels.
pub fn time_derivative(values: &[Field], dt: f64) -> Result<Vec<Field>> {
    let n = values.len();
    if n < 2 {
        return Err(SlvError::DegenerateInput(
            "need at least two time levels".into(),
        ));
    }
    if n == 2 {
        let d = values[1].sub(&values[0]).scale(1.0 / dt);
        return Ok(vec![d.clone(), d]);
    }
    let inv = 1.0 / dt;
    let mut out = Vec::with_capacity(n);
    out.push(
        values[0]
            .scale(-1.5)
            .axpy(2.0, &values[1])
            .axpy(-0.5, &values[2])
            .scale(inv),
    );
    for k in 1..n - 1 {
        out.push(values[k + 1].sub(&values[k - 1]).scale(0.5 * inv));
    }
    out.push(
        values[n - 1]
            .scale(1.5)
            .axpy(-2.0, &values[n - 2])
            .axpy(0.5, &values[n - 3])
            .scale(inv),
    );
    Ok(out)
}

/// Distance in `X^s([0, T])`: `sup_n (‖a_n − b_n‖_{H^s} + ‖ȧ_n − ḃ_n‖_{H^s})`.
pub fn xs_distance(a: &Trajectory, b: &Trajectory, s: f64) -> Result<f64> {
    if !a.compatible_with(b) {
        return Err(SlvError::GridMismatch(
            "trajectories differ in grid, time step or length".into(),
        ));
    }
    Ok((0..a.levels())
        .map(|n| level_distance(a, b, n, s))
        .fold(0.0, f64::max))
}

pub(crate) fn level_distance(a: &Trajectory, b: &Trajectory, n: usize, s: f64) -> f64 {
    sobolev_norm(&a.values[n].sub(&b.values[n]), s) + sobolev_norm(&a.rates[n].sub(&b.rates[n]), s)
}

/// `X^s` norm of a single trajectory.
pub fn xs_norm(a: &Trajectory, s: f64) -> f64 {
    a.values
        .iter()
        .zip(&a.rates)
        .map(|(v, r)| sobolev_norm(v, s) + sobolev_norm(r, s))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::linf_norm;

    #[test]
    fn centered_time_derivative_is_exact_on_quadratics() {
        let g = GridSpec::new(5.0, 16).unwrap();
        let dt = 0.1;
        let values: Vec<Field> = (0..6)
            .map(|n| {
                let t = n as f64 * dt;
                g.sample(|x| x * t * t + t)
            })
            .collect();
        let rates = time_derivative(&values, dt).unwrap();
        for (n, r) in rates.iter().enumerate() {
            let t = n as f64 * dt;
            let exact = g.sample(|x| 2.0 * x * t + 1.0);
            assert!(linf_norm(&r.sub(&exact)) < 1e-12);
        }
    }

    #[test]
    fn distance_requires_compatible_trajectories() {
        let g = GridSpec::new(5.0, 16).unwrap();
        let a = Trajectory::from_values(g, 0.1, vec![g.zeros(); 3]).unwrap();
        let b = Trajectory::from_values(g, 0.1, vec![g.zeros(); 4]).unwrap();
        assert!(xs_distance(&a, &b, 3.0).is_err());
        assert_eq!(xs_distance(&a, &a, 3.0).unwrap(), 0.0);
    }
}
