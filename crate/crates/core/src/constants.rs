//! Cached constants of the standard mollifier `t ↦ exp(-1/(t(1-t)))` on (0,1).
//!
//! Values were computed once with 40-digit quadrature and root finding; the
//! `mollifier_constants_match_dense_scan` test re-derives them by a dense
//! sample scan at 10⁵ points.

/// `∫₀¹ exp(-1/(t(1-t))) dt`.
pub const BUMP_RAW_INTEGRAL: f64 = 0.007_029_858_406_609_656;

/// Sup norm of the unit-integral mollifier on (0,1), attained at t = 1/2.
pub const BUMP_SUP: f64 = 2.605_406_514_520_028;

/// Sup norm of the derivative of the unit-integral mollifier on (0,1).
pub const BUMP_DERIVATIVE_SUP: f64 = 11.035_565_148_994_598;

/// Support used for every mollifier factor in the Poincaré construction.
pub const STEP_MOLLIFIER_SUPPORT: (f64, f64) = (0.1, 0.9);
