//! Strain-limiting constitutive laws.
//!
//! Each law relates the stress `S` to the strain-sum `ω = ε + νε_t` through a
//! strictly increasing `h`, `ω = h(S)`, with `h(0) = 0`. The solver works with
//! the inverse `g = h⁻¹`, which only exists on the open interval `(α₋, α₊)`
//! of limits of `h` at `∓∞`.
//!
//! The cubic law is the nominal `(−1 + 2(1 + S²/2))S`, which reduces to
//! `S + S³`; only the reduced unit-parameter form is provided.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SlvError};

/// Distance from a finite endpoint of `(α₋, α₊)` inside which inversion is refused.
pub const INVERSION_MARGIN: f64 = 1e-9;

const CUBIC_NEWTON_TOL: f64 = 1e-14;
const CUBIC_NEWTON_MAX_ITERS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// `h(S) = S / sqrt(1 + S²)`
    #[serde(rename = "rational_sqrt")]
    RationalSquareRoot,
    /// `h(S) = arctan S`
    #[serde(rename = "arctan")]
    Arctangent,
    /// `h(S) = (1 + S²) S`
    #[serde(rename = "cubic")]
    Cubic,
    /// `h(S) = S`
    #[serde(rename = "linear")]
    Linear,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::RationalSquareRoot,
        ModelKind::Arctangent,
        ModelKind::Cubic,
        ModelKind::Linear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::RationalSquareRoot => "rational_sqrt",
            ModelKind::Arctangent => "arctan",
            ModelKind::Cubic => "cubic",
            ModelKind::Linear => "linear",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = SlvError;

    fn from_str(s: &str) -> Result<Self> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| SlvError::Config(format!("unknown constitutive model {s:?}")))
    }
}

/// An immutable constitutive law with its strain-sum limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstitutiveModel {
    pub kind: ModelKind,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub delta_max: f64,
}

impl ConstitutiveModel {
    pub fn new(kind: ModelKind) -> Self {
        let (alpha_minus, alpha_plus) = match kind {
            ModelKind::RationalSquareRoot => (-1.0, 1.0),
            ModelKind::Arctangent => (-FRAC_PI_2, FRAC_PI_2),
            ModelKind::Cubic | ModelKind::Linear => (f64::NEG_INFINITY, f64::INFINITY),
        };
        ConstitutiveModel {
            kind,
            alpha_minus,
            alpha_plus,
            delta_max: alpha_minus.abs().min(alpha_plus.abs()),
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        name.parse().map(ConstitutiveModel::new)
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    /// Largest admissible strain bound `δ`: 1, π/2, or +∞.
    pub fn admissible_delta(&self) -> f64 {
        self.delta_max
    }

    pub fn has_finite_limits(&self) -> bool {
        self.delta_max.is_finite()
    }

    pub fn h(&self, stress: f64) -> f64 {
        match self.kind {
            ModelKind::RationalSquareRoot => stress / (1.0 + stress * stress).sqrt(),
            ModelKind::Arctangent => stress.atan(),
            ModelKind::Cubic => (1.0 + stress * stress) * stress,
            ModelKind::Linear => stress,
        }
    }

    pub fn h_prime(&self, stress: f64) -> f64 {
        match self.kind {
            ModelKind::RationalSquareRoot => {
                let q = 1.0 + stress * stress;
                1.0 / (q * q.sqrt())
            }
            ModelKind::Arctangent => 1.0 / (1.0 + stress * stress),
            ModelKind::Cubic => 1.0 + 3.0 * stress * stress,
            ModelKind::Linear => 1.0,
        }
    }

    /// Rejects strain-sums outside `(α₋, α₊)` shrunk by [`INVERSION_MARGIN`].
    pub fn check_admissible(&self, omega: f64) -> Result<()> {
        let inside = omega.is_finite()
            && omega > self.alpha_minus + INVERSION_MARGIN
            && omega < self.alpha_plus - INVERSION_MARGIN;
        if inside {
            Ok(())
        } else {
            Err(SlvError::Domain {
                value: omega,
                lower: self.alpha_minus,
                upper: self.alpha_plus,
                node: None,
            })
        }
    }

    /// Stress as a function of strain-sum, `S = g(ω)`.
    pub fn g(&self, omega: f64) -> Result<f64> {
        self.check_admissible(omega)?;
        Ok(match self.kind {
            // (1-ω)(1+ω) avoids cancellation close to the strain limit
            ModelKind::RationalSquareRoot => omega / ((1.0 - omega) * (1.0 + omega)).sqrt(),
            ModelKind::Arctangent => omega.tan(),
            ModelKind::Cubic => invert_cubic(omega),
            ModelKind::Linear => omega,
        })
    }

    /// `g′(ω) = 1 / h′(g(ω))`.
    pub fn g_prime(&self, omega: f64) -> Result<f64> {
        self.check_admissible(omega)?;
        Ok(match self.kind {
            ModelKind::RationalSquareRoot => {
                let q = (1.0 - omega) * (1.0 + omega);
                1.0 / (q * q.sqrt())
            }
            ModelKind::Arctangent => {
                let t = omega.tan();
                1.0 + t * t
            }
            ModelKind::Cubic => {
                let s = invert_cubic(omega);
                1.0 / (1.0 + 3.0 * s * s)
            }
            ModelKind::Linear => 1.0,
        })
    }

    /// Candidate points for extrema of `g′` on `[−δ, δ]`.
    ///
    /// All four laws have an even `g′` that is monotone in `|ω|`, so the
    /// extrema sit at `0` or `±δ`.
    fn g_prime_samples(&self, delta: f64) -> Result<Vec<f64>> {
        let mut out = vec![self.g_prime(0.0)?];
        if delta.is_finite() && delta > 0.0 {
            out.push(self.g_prime(delta)?);
            out.push(self.g_prime(-delta)?);
        } else if delta.is_infinite() {
            // cubic: g′ → 0 as |ω| → ∞
            out.push(if self.kind == ModelKind::Linear {
                1.0
            } else {
                0.0
            });
        }
        Ok(out)
    }

    /// `sup_{|z| ≤ δ} g′(z)`, the computable surrogate for the composition constant.
    pub fn sup_g_prime(&self, delta: f64) -> Result<f64> {
        Ok(self
            .g_prime_samples(delta)?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// `inf_{|z| ≤ δ} g′(z)`.
    pub fn inf_g_prime(&self, delta: f64) -> Result<f64> {
        Ok(self
            .g_prime_samples(delta)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }
}

/// Unique real root of `S + S³ = ω` by Newton with a bisection safeguard.
fn invert_cubic(omega: f64) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    let sign = omega.signum();
    let target = omega.abs();
    // root lies in [0, min(ω, ω^{1/3})]
    let mut lo = 0.0_f64;
    let mut hi = target.min(target.cbrt());
    let mut s = target / (1.0 + target.powf(2.0 / 3.0));
    for _ in 0..CUBIC_NEWTON_MAX_ITERS {
        let residual = s + s * s * s - target;
        if residual > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let mut next = s - residual / (1.0 + 3.0 * s * s);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let converged = (next - s).abs() <= CUBIC_NEWTON_TOL * (1.0 + next.abs());
        s = next;
        if converged {
            break;
        }
    }
    // final polish
    s -= (s + s * s * s - target) / (1.0 + 3.0 * s * s);
    sign * s
}
