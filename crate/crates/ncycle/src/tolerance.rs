//! Default numerical tolerances, centralized so every module agrees on them.

/// Validation tolerance for boxes produced by the library's own constructors.
/// Everything we build is a short convex combination of exactly representable
/// vertices, so deviations beyond a few ulps indicate a bug.
pub const CONSTRUCTION: f64 = 1e-12;

/// Validation tolerance for user-supplied boxes (files, CLI input), which may
/// have passed through decimal formatting or foreign tooling.
pub const USER_DATA: f64 = 1e-9;

/// Default tolerance for nondisturbance (marginal consistency) checks.
pub const NONDISTURBANCE: f64 = 1e-9;

/// Default tolerance above a bound before an inequality counts as violated.
/// Entropy evaluation is accurate to ~1e-14; 1e-9 leaves ample margin.
pub const VIOLATION: f64 = 1e-9;

/// Phase-1 objective threshold below which a linear feasibility problem is
/// declared feasible.
pub const LP_FEASIBILITY: f64 = 1e-8;

/// Simplex pivot magnitude below which a column is treated as numerically zero.
pub const LP_PIVOT: f64 = 1e-10;
