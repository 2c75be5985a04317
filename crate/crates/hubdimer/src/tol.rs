//! Centralized tolerances. Each constant states what it guards and why the
//! value is adequate; no other magic thresholds are used in the library.

/// Normalization slack for state coefficient triples. Exact arithmetic plus a
/// handful of rounding steps stays far below this.
pub const NORM_TOL: f64 = 1e-12;

/// Slack on the disk inequality (g11-1/2)^2 + |g12|^2 <= 1/4.
pub const DISK_TOL: f64 = 1e-12;

/// Hermiticity check for density operators.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Trace-one check for density operators.
pub const TRACE_TOL: f64 = 1e-12;

/// Smallest admissible density-operator eigenvalue. Slightly negative values
/// arise from rounding in feasible constructions and are physically zero.
pub const PSD_TOL: f64 = -1e-10;

/// Eigenpair residual bound |H v - E v| for the 3x3 solver.
pub const EIG_RESIDUAL_TOL: f64 = 1e-10;

/// Relative gap below which eigenvalues are declared degenerate,
/// scaled by the spectral range.
pub const DEGENERACY_REL_GAP: f64 = 1e-9;

/// Distance from the disk center below which a point is treated as the
/// center itself (the polar angle is undefined there).
pub const CENTER_EPS: f64 = 1e-14;

/// Verdict threshold: a point is not representable when the pure-ensemble
/// gap exceeds this times max(1, |F_ens|). Separates true flat-facet gaps
/// (order of the coupling) from solver error (~1e-9).
pub const VERDICT_GAP_TOL: f64 = 1e-6;

/// Polar band near the disk boundary where classification defers to the
/// exchange-force prefactor instead of comparing functional values.
pub const BOUNDARY_BAND: f64 = 1e-3;

/// Force prefactor below this counts as vanishing (boundary touch point).
pub const FORCE_ZERO_TOL: f64 = 1e-10;

/// Deduplication tolerance for canonicalized angles.
pub const ANGLE_DEDUP_TOL: f64 = 1e-10;

/// Central-difference step for the Hessian determinant.
pub const HESSIAN_STEP: f64 = 1e-5;

/// Half-width of the tube around the absolute-value kink locus
/// (V-U) sin^2(phi) = 2V excluded from finite differencing.
pub const KINK_TUBE: f64 = 1e-4;

/// Minimal distance to the boundary for Hessian evaluation; the 1/sqrt(R)
/// divergence makes differences meaningless closer in.
pub const HESSIAN_MIN_R: f64 = 1e-3;

/// Feasibility residual bound for returned minimizers (constraints are
/// eliminated exactly, so only rounding remains).
pub const FEASIBILITY_TOL: f64 = 1e-10;
