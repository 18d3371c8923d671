//! Direct solver for periodic (cyclic) tridiagonal systems.

use crate::error::{Result, SlvError};

/// Row `i` couples `x[i-1]`, `x[i]`, `x[i+1]` with indices taken modulo `n`.
///
/// `lower[0]` is the top-right corner entry and `upper[n-1]` the bottom-left one.
#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl CyclicTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                self.lower[i] * x[(i + n - 1) % n]
                    + self.diag[i] * x[i]
                    + self.upper[i] * x[(i + 1) % n]
            })
            .collect()
    }

    /// `α·I + β·self`
    pub fn shifted(&self, alpha: f64, beta: f64) -> CyclicTridiagonal {
        CyclicTridiagonal {
            lower: self.lower.iter().map(|v| beta * v).collect(),
            diag: self.diag.iter().map(|v| alpha + beta * v).collect(),
            upper: self.upper.iter().map(|v| beta * v).collect(),
        }
    }

    /// Sherman–Morrison on top of two Thomas sweeps; no pivoting, so the
    /// matrix must be diagonally dominant (by rows or by columns).
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        assert!(n >= 3 && rhs.len() == n);
        let corner_top = self.lower[0];
        let corner_bottom = self.upper[n - 1];
        let gamma = -self.diag[0];
        if gamma == 0.0 {
            return Err(SlvError::SingularSystem { row: 0, pivot: 0.0 });
        }

        let mut modified = self.diag.clone();
        modified[0] -= gamma;
        modified[n - 1] -= corner_bottom * corner_top / gamma;

        let mut u = vec![0.0; n];
        u[0] = gamma;
        u[n - 1] = corner_bottom;

        let (x, z) = self.thomas_pair(&modified, rhs, &u)?;
        let denom = 1.0 + z[0] + corner_top * z[n - 1] / gamma;
        if denom == 0.0 || !denom.is_finite() {
            return Err(SlvError::SingularSystem {
                row: n - 1,
                pivot: denom,
            });
        }
        let factor = (x[0] + corner_top * x[n - 1] / gamma) / denom;
        Ok(x.iter().zip(&z).map(|(xi, zi)| xi - factor * zi).collect())
    }

    /// Solves the non-cyclic part with diagonal `diag` for two right-hand sides at once.
    fn thomas_pair(&self, diag: &[f64], r1: &[f64], r2: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = diag.len();
        let mut c_prime = vec![0.0; n];
        let mut y1 = vec![0.0; n];
        let mut y2 = vec![0.0; n];

        let mut pivot = diag[0];
        check_pivot(0, pivot)?;
        c_prime[0] = self.upper[0] / pivot;
        y1[0] = r1[0] / pivot;
        y2[0] = r2[0] / pivot;
        for i in 1..n {
            let a = self.lower[i];
            pivot = diag[i] - a * c_prime[i - 1];
            check_pivot(i, pivot)?;
            if i < n - 1 {
                c_prime[i] = self.upper[i] / pivot;
            }
            y1[i] = (r1[i] - a * y1[i - 1]) / pivot;
            y2[i] = (r2[i] - a * y2[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            y1[i] -= c_prime[i] * y1[i + 1];
            y2[i] -= c_prime[i] * y2[i + 1];
        }
        Ok((y1, y2))
    }
}

fn check_pivot(row: usize, pivot: f64) -> Result<()> {
    if pivot == 0.0 || !pivot.is_finite() {
        Err(SlvError::SingularSystem { row, pivot })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense(m: &CyclicTridiagonal) -> Vec<Vec<f64>> {
        let n = m.len();
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..n {
            a[i][(i + n - 1) % n] += m.lower[i];
            a[i][i] += m.diag[i];
            a[i][(i + 1) % n] += m.upper[i];
        }
        a
    }

    #[test]
    fn residual_of_nonsymmetric_cyclic_system() {
        let n = 9;
        let m = CyclicTridiagonal {
            lower: (0..n).map(|i| -0.3 - 0.01 * i as f64).collect(),
            diag: (0..n).map(|i| 2.0 + 0.1 * i as f64).collect(),
            upper: (0..n).map(|i| -0.5 + 0.02 * i as f64).collect(),
        };
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let x = m.solve(&rhs).unwrap();
        let a = dense(&m);
        for i in 0..n {
            let row: f64 = (0..n).map(|j| a[i][j] * x[j]).sum();
            assert!((row - rhs[i]).abs() < 1e-14);
        }
        let back = m.matvec(&x);
        for i in 0..n {
            assert!((back[i] - rhs[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_matrix_is_reported() {
        let m = CyclicTridiagonal {
            lower: vec![0.0; 4],
            diag: vec![0.0; 4],
            upper: vec![0.0; 4],
        };
        assert!(matches!(
            m.solve(&[1.0; 4]),
            Err(SlvError::SingularSystem { .. })
        ));
    }
}
