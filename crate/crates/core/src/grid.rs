//! Uniform grid on the truncated line `[−L, L)` and the field operations on it.
//!
//! Nodes are `x_j = −L + j·dx`, `j = 0..N`, `dx = 2L/N`. The node at `+L` is
//! the periodic image of `x_0`, so quadrature and the Fourier transform both
//! see the periodic extension of a field. Data on this grid is expected to
//! decay to (numerically) zero near `±L`, or to be exactly periodic.

use std::cell::RefCell;
use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SlvError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    half_length: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(half_length: f64, points: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(SlvError::Config(format!(
                "grid half-length must be positive, got {half_length}"
            )));
        }
        if points < 16 || !points.is_power_of_two() {
            return Err(SlvError::Config(format!(
                "grid size must be a power of two >= 16, got {points}"
            )));
        }
        Ok(GridSpec {
            half_length,
            points,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn len(&self) -> usize {
        self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.points as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.half_length + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points).map(move |j| self.x(j))
    }

    /// Angular frequency of DFT slot `k` (slots above `N/2` are negative frequencies).
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.points as isize;
        let signed = if (k as isize) < n / 2 {
            k as isize
        } else {
            k as isize - n
        };
        PI * signed as f64 / self.half_length
    }

    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.points == other.points && self.half_length == other.half_length
    }

    pub fn zeros(&self) -> Field {
        Field {
            grid: *self,
            values: vec![0.0; self.points],
        }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: *self,
            values: self.nodes().map(f).collect(),
        }
    }
}

/// Real samples of a function of `x` on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(SlvError::GridMismatch(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(SlvError::Format(format!("non-finite sample at node {j}")));
        }
        Ok(Field { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Field { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field::from_vec_unchecked(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn try_map(&self, f: impl Fn(usize, f64) -> Result<f64>) -> Result<Field> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(j, v))
            .collect::<Result<Vec<_>>>()?;
        Ok(Field::from_vec_unchecked(self.grid, values))
    }

    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        debug_assert!(self.grid.same_as(&other.grid));
        Field::from_vec_unchecked(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip_map(other, |a, b| a - b)
    }

    pub fn scale(&self, c: f64) -> Field {
        self.map(|v| c * v)
    }

    /// `self + c·other`
    pub fn axpy(&self, c: f64, other: &Field) -> Field {
        self.zip_map(other, |a, b| a + c * b)
    }

    /// Discrete inner product `dx Σ f_j g_j`.
    pub fn dot(&self, other: &Field) -> f64 {
        let products: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        self.grid.dx() * pairwise_sum(&products)
    }

    /// Largest `|f(x)|` for `|x| ≥ x_min`.
    pub fn tail_max(&self, x_min: f64) -> f64 {
        self.grid
            .nodes()
            .zip(&self.values)
            .filter(|(x, _)| x.abs() >= x_min)
            .map(|(_, v)| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Summation by recursive halving; the reduction order depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 16;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let mid = values.len() / 2;
        pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
    }
}

/// Second-order derivative: centered in the interior, one-sided at both end nodes.
pub fn derivative(f: &Field) -> Field {
    let v = f.values();
    let n = v.len();
    let inv = 1.0 / f.grid().dx();
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) * 0.5 * inv;
    out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) * 0.5 * inv;
    for j in 1..n - 1 {
        out[j] = (v[j + 1] - v[j - 1]) * 0.5 * inv;
    }
    Field::from_vec_unchecked(*f.grid(), out)
}

/// Centered derivative with the periodic closure used by the PDE solvers.
pub fn derivative_periodic(f: &Field) -> Field {
    let v = f.values();
    let n = v.len();
    let half_inv = 0.5 / f.grid().dx();
    let out = (0..n)
        .map(|j| (v[(j + 1) % n] - v[(j + n - 1) % n]) * half_inv)
        .collect();
    Field::from_vec_unchecked(*f.grid(), out)
}

/// Forward differences `(f_{j+1} − f_j)/dx`, periodic; entry `j` lives at `x_{j+1/2}`.
pub fn forward_difference(f: &Field) -> Field {
    let v = f.values();
    let n = v.len();
    let inv = 1.0 / f.grid().dx();
    let out = (0..n).map(|j| (v[(j + 1) % n] - v[j]) * inv).collect();
    Field::from_vec_unchecked(*f.grid(), out)
}

/// Backward differences `(f_j − f_{j−1})/dx`, periodic. Adjoint of [`forward_difference`] up to sign.
pub fn backward_difference(f: &Field) -> Field {
    let v = f.values();
    let n = v.len();
    let inv = 1.0 / f.grid().dx();
    let out = (0..n).map(|j| (v[j] - v[(j + n - 1) % n]) * inv).collect();
    Field::from_vec_unchecked(*f.grid(), out)
}

/// Three-point periodic Laplacian.
pub fn laplacian_periodic(f: &Field) -> Field {
    let v = f.values();
    let n = v.len();
    let inv2 = 1.0 / (f.grid().dx() * f.grid().dx());
    let out = (0..n)
        .map(|j| (v[(j + 1) % n] - 2.0 * v[j] + v[(j + n - 1) % n]) * inv2)
        .collect();
    Field::from_vec_unchecked(*f.grid(), out)
}

/// Trapezoidal quadrature over `[−L, L]` of the periodic extension.
pub fn integral(f: &Field) -> f64 {
    f.grid().dx() * pairwise_sum(f.values())
}

pub fn mean(f: &Field) -> f64 {
    integral(f) / (2.0 * f.grid().half_length())
}

pub fn linf_norm(f: &Field) -> f64 {
    f.values().iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Discrete L² norm `(dx Σ f_j²)^{1/2}`.
pub fn l2_norm(f: &Field) -> f64 {
    f.dot(f).sqrt()
}

/// Default mean-zero tolerance: `1e-10 · max|f|`.
pub fn default_mean_zero_tol(f: &Field) -> f64 {
    1e-10 * linf_norm(f)
}

/// Antiderivative from `x_0 = −L`, so that the result vanishes at the left node.
///
/// Integration is carried out mode by mode on the periodic extension, which
/// is spectrally accurate for mean-zero data decayed near `±L`. A field whose
/// mean exceeds `mean_zero_tol` cannot be the derivative of a potential that
/// vanishes at both ends and is rejected.
pub fn antiderivative(f: &Field, mean_zero_tol: Option<f64>) -> Result<Field> {
    let tol = mean_zero_tol.unwrap_or_else(|| default_mean_zero_tol(f));
    let m = mean(f);
    if m.abs() > tol {
        return Err(SlvError::MeanZeroViolation { mean: m, tol });
    }
    let grid = *f.grid();
    let n = grid.len();
    let mut spectrum = forward_fft(f.values());
    spectrum[0] = Complex64::new(0.0, 0.0);
    spectrum[n / 2] = Complex64::new(0.0, 0.0);
    for (k, c) in spectrum.iter_mut().enumerate() {
        if k != 0 && k != n / 2 {
            let xi = grid.frequency(k);
            // divide by i·ξ
            *c = Complex64::new(c.im / xi, -c.re / xi);
        }
    }
    let raw = inverse_fft_real(spectrum);
    let origin = raw[0];
    Ok(Field::from_vec_unchecked(
        grid,
        raw.into_iter().map(|v| v - origin).collect(),
    ))
}

/// Discrete `H^s` norm `(∫ (1+ξ²)^s |ẑ(ξ)|² dξ)^{1/2}` with Parseval scaling,
/// so that `s = 0` reproduces [`l2_norm`].
pub fn sobolev_norm(f: &Field, s: f64) -> f64 {
    let grid = f.grid();
    let n = grid.len();
    let spectrum = forward_fft(f.values());
    let weighted: Vec<f64> = spectrum
        .iter()
        .enumerate()
        .map(|(k, c)| {
            let xi = grid.frequency(k);
            (1.0 + xi * xi).powf(s) * c.norm_sqr()
        })
        .collect();
    (grid.dx() / n as f64 * pairwise_sum(&weighted)).sqrt()
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(n: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(n)
        } else {
            p.plan_fft_forward(n)
        }
    })
}

pub(crate) fn forward_fft(values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    plan(buf.len(), false).process(&mut buf);
    buf
}

fn inverse_fft_real(mut spectrum: Vec<Complex64>) -> Vec<f64> {
    let n = spectrum.len();
    plan(n, true).process(&mut spectrum);
    let scale = 1.0 / n as f64;
    spectrum.into_iter().map(|c| c.re * scale).collect()
}
