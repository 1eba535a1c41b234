//! Central numeric tolerances.
//!
//! Every threshold used by the construction and verification pipeline is
//! pinned here so that certification behaviour is explicit and stable.
//! All values are calibrated for `n = 33` double-precision matrices.

/// Absolute ceiling on the symmetrization residual `max|J Λ − Λ Jᵀ|` and the
/// idempotency residual `max|H² − H|` of a certified operator.
pub const CERTIFICATION_RESIDUAL: f64 = 1e-10;

/// Null-space quality: every returned basis vector `v` satisfies
/// `‖A v‖∞ ≤ KERNEL_RESIDUAL_REL · ‖v‖∞`.
pub const KERNEL_RESIDUAL_REL: f64 = 1e-10;

/// Rank decisions during floating-point elimination treat a pivot as zero
/// when its magnitude falls below this fraction of the largest pivot seen.
pub const RANK_PIVOT_REL: f64 = 1e-10;

/// Weighted Gram-Schmidt declares the conserved-row span degenerate when an
/// orthogonalized vector's weighted norm drops below this fraction of the
/// original row's weighted norm.
pub const GS_DEGENERACY_REL: f64 = 1e-12;

/// The weight-selection linear program accepts a phase-1 basic solution as
/// feasible when the artificial objective is at most this value.
pub const LP_FEASIBILITY: f64 = 1e-8;

/// Simplex pivot columns/rows with magnitude below this are treated as zero.
pub const LP_PIVOT: f64 = 1e-9;

/// Returned weights satisfy `λ_i ≥ 1 − LP_BOUND_SLACK` (floating-point slack
/// on the unit lower bound that the program enforces exactly in theory).
pub const LP_BOUND_SLACK: f64 = 1e-9;

/// Post-construction check: modified tail rows must be weighted-orthogonal
/// to every conserved row within this absolute residual (row norms are O(1)
/// to O(10) for the 33-velocity set).
pub const ORTHOGONALITY_CHECK: f64 = 1e-12;

/// Relative consistency required between a relaxation time passed to the
/// simulator and the one recorded in an operator certificate.
pub const TAU_MATCH_REL: f64 = 1e-12;
