//! Pinned numeric tolerances.
//!
//! Every comparison threshold used by the library lives here, with the reason
//! it has the value it has. Tests import these constants rather than
//! restating magic numbers, so loosening one is a single visible edit.

/// Angular resolution: atoms closer than this merge, breakpoints closer than
/// this are the same breakpoint, and zero crossings snap to nearby cuts.
/// Angles live in `[0, 2pi)` where f64 carries ~1e-16 of relative noise;
/// 1e-12 leaves three orders of magnitude of headroom for accumulated
/// arithmetic while staying far below any meaningful angular separation.
pub const ANGLE_TOL: f64 = 1e-12;

/// Value-level agreement: continuity at breakpoints, support-function
/// identities, circumdisk deduplication, and the sigma comparisons all use
/// this. Closed-form constructions agree to ~1e-14; 1e-9 tolerates the worst
/// conditioning seen across the seeded suites while still distinguishing any
/// genuinely different geometry.
pub const VALUE_TOL: f64 = 1e-9;

/// Convexity slack: a derivative jump is accepted as nonnegative when it is
/// `>= -CONVEXITY_TOL`. Same scale (and same reasoning) as [`VALUE_TOL`].
pub const CONVEXITY_TOL: f64 = 1e-9;

/// A measure with integer order is regular when the modulus of its moment
/// defect is at most this. The defect is a sum of unit-scale complex terms,
/// so this is again the [`VALUE_TOL`] scale.
pub const REGULARITY_TOL: f64 = 1e-9;

/// Derivative jumps smaller than this (relative to the derivative scale) are
/// representation noise, not corners, and are removed when a piecewise
/// function is normalized. Kept two orders looser than raw f64 noise because
/// jumps are differences of derivatives that were themselves products.
pub const JUMP_DROP_TOL: f64 = 1e-11;

/// Acceptance threshold for the seeded minimax search: the achieved combined
/// type must come within this of the nest lower bound. The search is a
/// general-purpose simplex method on a smooth-ish objective; 1e-4 is
/// attainable within the pinned iteration budget on every suite instance
/// while still being far tighter than any visible geometry.
pub const MINIMAX_TOL: f64 = 1e-4;

/// Surgery constructions are closed-form, so their sandwich verification is
/// held to the value scale, not the search scale.
pub const SURGERY_TOL: f64 = 1e-9;

/// Grid resolution for "minorant never exceeds the function" style dense
/// verifications.
pub const VERIFY_GRID: usize = 10_000;
