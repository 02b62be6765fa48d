//! Scalar cutoff functions used to regularize linear coordinate growth.
//!
//! The central object is the Huber ramp
//!
//! ```text
//!            ⎧ ½x²            |x| ≤ m
//! huber(x) = ⎨
//!            ⎩ m|x| − ½m²     |x| ≥ m
//! ```
//!
//! which follows ½x² in the core and continues with constant slope ±m
//! outside. It is C¹: its derivative is the clamp of x to [−m, m], and the
//! part of x that the clamp discards is the soft-threshold remainder
//! `soft_threshold(x) = x − huber_slope(x)`. The exponentially damped
//! variant `huber(x)·e^{−ε√(1+x²)}` and the two-coordinate difference
//! built from it are what make "multiply by a linearly growing function"
//! a bounded operation; the verification suite drives ε ↓ 0 and watches
//! the damped slope converge back to the clamp.
//!
//! All gradients here are analytic per branch. Nothing in this module is
//! differentiated numerically, so discretization studies downstream see
//! grid error only.

use thiserror::Error;

/// Construction errors for [`CutoffParams`].
#[derive(Debug, Error, PartialEq)]
pub enum CutoffError {
    #[error("crossover scale m must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("damping rate epsilon must be non-negative, got {0}")]
    NegativeDamping(f64),
}

/// Quadratic-core, linear-tail ramp: ½x² for |x| ≤ m, m|x| − ½m² beyond.
///
/// Continuous with continuous first derivative; grows linearly with slope
/// ±m at infinity.
pub fn huber(x: f64, m: f64) -> f64 {
    if x.abs() <= m {
        0.5 * x * x
    } else {
        m * x.abs() - 0.5 * m * m
    }
}

/// Derivative of [`huber`]: x on the core, ±m on the tails.
///
/// At the kinks |x| = m both branches agree and the common value ±m is
/// returned, so the function is well defined everywhere and |result| ≤ m.
pub fn huber_slope(x: f64, m: f64) -> f64 {
    if x > m {
        m
    } else if x < -m {
        -m
    } else {
        x
    }
}

/// Soft-threshold remainder: 0 on [−m, m], x ∓ m outside.
///
/// Identically `x − huber_slope(x, m)`, but computed branchwise so the
/// identity is a genuine cross-check between two code paths.
pub fn soft_threshold(x: f64, m: f64) -> f64 {
    if x > m {
        x - m
    } else if x < -m {
        x + m
    } else {
        0.0
    }
}

/// Quadratic saddle (x² − y²)/2, the polynomial comparison function whose
/// gradient (x, −y) feeds the commutator machinery without any cutoff.
pub fn saddle(x: f64, y: f64) -> f64 {
    0.5 * (x * x - y * y)
}

/// Gradient of [`saddle`]: (x, −y).
pub fn saddle_gradient(x: f64, y: f64) -> (f64, f64) {
    (x, -y)
}

/// Crossover scale m and exponential damping rate ε for the damped ramp
/// family h_ε(x) = huber(x)·e^{−ε√(1+x²)}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffParams {
    pub m: f64,
    pub epsilon: f64,
}

impl CutoffParams {
    /// Validates m > 0 and ε ≥ 0.
    pub fn new(m: f64, epsilon: f64) -> Result<Self, CutoffError> {
        if !(m > 0.0) {
            return Err(CutoffError::NonPositiveScale(m));
        }
        if !(epsilon >= 0.0) {
            return Err(CutoffError::NegativeDamping(epsilon));
        }
        Ok(Self { m, epsilon })
    }

    /// Damped ramp huber(x)·e^{−ε√(1+x²)}; bounded for every ε > 0, and
    /// exactly the undamped ramp at ε = 0.
    pub fn damped(&self, x: f64) -> f64 {
        huber(x, self.m) * (-self.epsilon * (1.0 + x * x).sqrt()).exp()
    }

    /// Analytic derivative of [`CutoffParams::damped`]:
    /// [huber'(x) − ε·x·huber(x)/√(1+x²)]·e^{−ε√(1+x²)}.
    pub fn damped_slope(&self, x: f64) -> f64 {
        let s = (1.0 + x * x).sqrt();
        let damp = (-self.epsilon * s).exp();
        (huber_slope(x, self.m) - self.epsilon * x * huber(x, self.m) / s) * damp
    }

    /// Two-coordinate difference h_ε(x) − h_ε(y). Antisymmetric under the
    /// swap (x, y) ↦ (y, x).
    pub fn pair_difference(&self, x: f64, y: f64) -> f64 {
        self.damped(x) - self.damped(y)
    }

    /// Gradient of [`CutoffParams::pair_difference`]: (h_ε'(x), −h_ε'(y)).
    pub fn pair_gradient(&self, x: f64, y: f64) -> (f64, f64) {
        (self.damped_slope(x), -self.damped_slope(y))
    }
}
