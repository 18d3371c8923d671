//! Reference solutions shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use slv_core::{Field, GridSpec};

/// Amplitude `A(t)` of `A'' + νξ²A' + ξ²A = 0`, `A(0) = a0`, `A'(0) = a1`,
/// built from the two roots of `λ² + νξ²λ + ξ² = 0`.
pub struct DampedMode {
    roots: [Complex64; 2],
    coeffs: [Complex64; 2],
}

impl DampedMode {
    pub fn new(xi: f64, nu: f64, a0: f64, a1: f64) -> Self {
        let b = Complex64::new(nu * xi * xi, 0.0);
        let c = Complex64::new(xi * xi, 0.0);
        let disc = (b * b - 4.0 * c).sqrt();
        let l1 = (-b + disc) / 2.0;
        let l2 = (-b - disc) / 2.0;
        // c1 + c2 = a0, l1 c1 + l2 c2 = a1
        let c1 = (Complex64::new(a1, 0.0) - l2 * a0) / (l1 - l2);
        let c2 = Complex64::new(a0, 0.0) - c1;
        DampedMode {
            roots: [l1, l2],
            coeffs: [c1, c2],
        }
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        (self.coeffs[0] * (self.roots[0] * t).exp() + self.coeffs[1] * (self.roots[1] * t).exp()).re
    }

    pub fn rate(&self, t: f64) -> f64 {
        (self.coeffs[0] * self.roots[0] * (self.roots[0] * t).exp()
            + self.coeffs[1] * self.roots[1] * (self.roots[1] * t).exp())
        .re
    }
}

/// Grid mode `sin(πk(x+L)/L)` and its frequency.
pub fn mode_shape(grid: &GridSpec, k: u32) -> (Field, f64) {
    let l = grid.half_length();
    let xi = std::f64::consts::PI * k as f64 / l;
    (grid.sample(|x| (xi * (x + l)).sin()), xi)
}
