//! The algebra of piecewise `rho`-trigonometric functions on the circle.
//!
//! A *piece* is a pure sinusoid `a cos(rho t) + b sin(rho t)`. A
//! [`PiecewiseTrig`] is a `2pi`-periodic continuous function assembled from
//! finitely many pieces meeting at *breakpoints*; at each breakpoint the
//! one-sided derivatives may differ, and the function is *trigonometrically
//! convex* when every derivative jump is nonnegative. Convex functions of
//! this kind are exactly the support-style functions of finite atomic
//! angular densities: the derivative jump at a breakpoint equals
//! `2 pi rho` times the mass sitting there.
//!
//! The module provides the constructions both ways (measure from function,
//! function from measure), convexity checks, pointwise maxima, global maxima
//! with their maximizer sets, and the widely spaced trigonometric minorant
//! built from elementary two-slope windows.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::geom::Point;
use crate::measures::{lindelof_defect, AtomicMeasure, Order};
use crate::tol::{ANGLE_TOL, CONVEXITY_TOL, JUMP_DROP_TOL, VALUE_TOL};

/// Errors from the piecewise-trigonometric layer.
#[derive(Debug, Clone, Error)]
pub enum TrigError {
    /// A derivative jump was negative beyond tolerance.
    #[error(
        "function is not trigonometrically convex: derivative jump {jump:.6e} at breakpoint {location}"
    )]
    NotConvex { location: f64, jump: f64 },
    /// A two-slope window `[alpha, beta]` had width outside `(0, pi/rho]`.
    #[error("invalid window: width {width} is outside (0, {max_width}]")]
    BadWindow { width: f64, max_width: f64 },
    /// Integer order with a measure whose moment defect does not vanish:
    /// no continuous periodic representation exists.
    #[error(
        "integer order rho = {rho} requires a regular measure, but the moment defect has modulus {defect:.6e}"
    )]
    IllposedIntegerOrder { rho: f64, defect: f64 },
    /// A raw piecewise representation violated its structural invariants.
    #[error("invalid piecewise representation: {0}")]
    Invalid(String),
}

/// Coefficients of one pure piece `a cos(rho t) + b sin(rho t)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Coeff {
    pub a: f64,
    pub b: f64,
}

impl Coeff {
    pub fn new(a: f64, b: f64) -> Self {
        Coeff { a, b }
    }

    /// Value `a cos(rho t) + b sin(rho t)`.
    pub fn eval(self, rho: f64, t: f64) -> f64 {
        let (s, c) = (rho * t).sin_cos();
        self.a * c + self.b * s
    }

    /// Derivative `rho (-a sin(rho t) + b cos(rho t))`.
    pub fn deriv(self, rho: f64, t: f64) -> f64 {
        let (s, c) = (rho * t).sin_cos();
        rho * (-self.a * s + self.b * c)
    }

    /// Amplitude `hypot(a, b)`.
    pub fn amp(self) -> f64 {
        self.a.hypot(self.b)
    }

    /// The coefficient pair as a point in the support plane.
    pub fn point(self) -> Point {
        Point::new(self.a, self.b)
    }

    /// Coefficients of the shifted function `u -> self.eval(u - delta)`.
    /// (Rotation of `(a, b)` by `rho * delta`.)
    pub fn shifted(self, rho: f64, delta: f64) -> Coeff {
        if delta == 0.0 {
            return self;
        }
        let (s, c) = (rho * delta).sin_cos();
        Coeff {
            a: self.a * c - self.b * s,
            b: self.a * s + self.b * c,
        }
    }

    /// The unique piece with the given value and derivative at `t`.
    pub fn from_value_deriv(rho: f64, t: f64, value: f64, deriv: f64) -> Coeff {
        let (s, c) = (rho * t).sin_cos();
        let d = deriv / rho;
        Coeff {
            a: value * c - d * s,
            b: value * s + d * c,
        }
    }

    fn approx_eq(self, other: Coeff, tol: f64) -> bool {
        (self.a - other.a).abs() <= tol && (self.b - other.b).abs() <= tol
    }
}

/// Which one-sided limit to take at a breakpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Left,
    Right,
}

/// A derivative jump at one breakpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeJump {
    /// The breakpoint, in `[0, 2pi)`.
    pub location: f64,
    /// Left derivative there.
    pub left: f64,
    /// Right derivative there.
    pub right: f64,
    /// `right - left`.
    pub jump: f64,
}

/// Convexity verdict with the evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport {
    /// True when every jump is `>= -`[`CONVEXITY_TOL`].
    pub convex: bool,
    /// All breakpoint jumps, in breakpoint order.
    pub jumps: Vec<DerivativeJump>,
}

/// A continuous `2pi`-periodic piecewise `rho`-trigonometric function.
///
/// Representation: breakpoints `s_1 < ... < s_L` in `[0, 2pi)`; piece `k`
/// holds on `[s_{k-1}, s_k]` with its coefficients evaluated at the *raw*
/// angle in that interval, and piece `0` holds on `[s_L - 2pi, s_1]`. The
/// breakpoint-free form (one global piece, no breakpoints) is reserved for
/// the zero function and, at integer order, pure sinusoids.
///
/// Normalization removes breakpoints whose derivative jump vanishes, so the
/// stored breakpoints are exactly the singular support.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseTrig {
    rho: Order,
    breakpoints: Vec<f64>,
    pieces: Vec<Coeff>,
}

impl PiecewiseTrig {
    /// The identically-zero function.
    pub fn zero(rho: &Order) -> Self {
        PiecewiseTrig {
            rho: *rho,
            breakpoints: Vec::new(),
            pieces: vec![Coeff::default()],
        }
    }

    /// A single global sinusoid. Only meaningful as a periodic function when
    /// the order is an integer (or the coefficients vanish).
    pub fn pure(rho: &Order, a: f64, b: f64) -> Self {
        debug_assert!(
            rho.is_integer() || a.hypot(b) <= 1e-12,
            "a breakpoint-free nonzero piece is periodic only at integer order"
        );
        PiecewiseTrig {
            rho: *rho,
            breakpoints: Vec::new(),
            pieces: vec![Coeff::new(a, b)],
        }
    }

    /// Assemble from raw breakpoints and pieces (see type docs for the
    /// layout). Validates ordering, spacing, and continuity, then normalizes
    /// away breakpoints with no derivative jump.
    pub fn from_parts(
        rho: &Order,
        breakpoints: Vec<f64>,
        pieces: Vec<Coeff>,
    ) -> Result<Self, TrigError> {
        let max_amp = pieces.iter().map(|c| c.amp()).fold(0.0f64, f64::max);
        let cont_tol = VALUE_TOL * (1.0 + max_amp);
        Self::from_parts_with_tol(rho, breakpoints, pieces, cont_tol)
    }

    /// `from_parts` with an explicit continuity tolerance. Used internally
    /// where a barely-regular measure makes the wrap seam mismatch by up to
    /// `2 pi` times the regularity tolerance.
    fn from_parts_with_tol(
        rho: &Order,
        breakpoints: Vec<f64>,
        pieces: Vec<Coeff>,
        cont_tol: f64,
    ) -> Result<Self, TrigError> {
        if breakpoints.is_empty() {
            if pieces.len() != 1 {
                return Err(TrigError::Invalid(
                    "breakpoint-free form needs exactly one piece".into(),
                ));
            }
            if !rho.is_integer() && pieces[0].amp() > 1e-12 {
                return Err(TrigError::Invalid(
                    "a breakpoint-free nonzero piece is not 2pi-periodic at non-integer order"
                        .into(),
                ));
            }
            return Ok(PiecewiseTrig {
                rho: *rho,
                breakpoints,
                pieces,
            });
        }
        if breakpoints.len() != pieces.len() {
            return Err(TrigError::Invalid(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len(),
                pieces.len()
            )));
        }
        let l = breakpoints.len();
        for (i, &s) in breakpoints.iter().enumerate() {
            if !(0.0..TAU).contains(&s) {
                return Err(TrigError::Invalid(format!(
                    "breakpoint {s} outside [0, 2pi)"
                )));
            }
            let gap = if i + 1 < l {
                breakpoints[i + 1] - s
            } else {
                breakpoints[0] + TAU - s
            };
            if gap <= ANGLE_TOL {
                return Err(TrigError::Invalid(format!(
                    "breakpoints too close near {s} (gap {gap:.3e})"
                )));
            }
        }
        let r = rho.value();
        for i in 0..l {
            let s = breakpoints[i];
            let left = pieces[i].eval(r, s);
            let right = if i + 1 < l {
                pieces[i + 1].eval(r, s)
            } else {
                pieces[0].eval(r, s - TAU)
            };
            if (left - right).abs() > cont_tol {
                return Err(TrigError::Invalid(format!(
                    "discontinuity {:.3e} at breakpoint {s}",
                    left - right
                )));
            }
        }
        let mut f = PiecewiseTrig {
            rho: *rho,
            breakpoints,
            pieces,
        };
        f.normalize_in_place();
        Ok(f)
    }

    /// Remove breakpoints whose derivative jump vanishes (within
    /// [`JUMP_DROP_TOL`] scaled to the derivative magnitude).
    fn normalize_in_place(&mut self) {
        let r = self.rho.value();
        loop {
            let l = self.breakpoints.len();
            if l == 0 {
                return;
            }
            let max_amp = self.pieces.iter().map(|c| c.amp()).fold(0.0f64, f64::max);
            let drop_tol = JUMP_DROP_TOL * (1.0 + r * max_amp);
            let jumps = self.derivative_jumps();
            let Some(j) = jumps.iter().position(|d| d.jump.abs() <= drop_tol) else {
                return;
            };
            if l == 1 {
                // A smooth single-breakpoint function is a global sinusoid;
                // only legal breakpoint-free when periodic.
                if self.rho.is_integer() || self.pieces[0].amp() <= 1e-12 {
                    self.breakpoints.clear();
                    self.pieces.truncate(1);
                }
                return;
            }
            if j == l - 1 {
                // Wrap seam: piece 0 is the smooth continuation of the last
                // piece, so the last breakpoint and piece both go.
                self.breakpoints.pop();
                self.pieces.pop();
            } else {
                // Interior: zero jump with continuity means the two pieces
                // have identical coefficients; keep the later one.
                self.breakpoints.remove(j);
                self.pieces.remove(j);
            }
        }
    }

    /// Assemble from a contiguous run of segments `(start, end, coeff)`
    /// covering exactly one period, where each coefficient pair is valid at
    /// the raw angles of its own segment. Segments thinner than the angular
    /// tolerance are absorbed into their neighbors.
    pub fn from_segments(
        rho: &Order,
        segments: &[(f64, f64, Coeff)],
    ) -> Result<Self, TrigError> {
        if segments.is_empty() {
            return Err(TrigError::Invalid("no segments".into()));
        }
        let w0 = segments[0].0;
        let w1 = segments[segments.len() - 1].1;
        if (w1 - w0 - TAU).abs() > 1e-9 {
            return Err(TrigError::Invalid(format!(
                "segments span {} instead of one period",
                w1 - w0
            )));
        }
        for w in segments.windows(2) {
            if (w[0].1 - w[1].0).abs() > 1e-9 {
                return Err(TrigError::Invalid(format!(
                    "segment gap between {} and {}",
                    w[0].1, w[1].0
                )));
            }
        }
        // Retain segment ends as cuts, skipping degenerate slivers.
        let mut cuts: Vec<f64> = Vec::with_capacity(segments.len());
        let mut cursor = w0;
        for (i, seg) in segments.iter().enumerate() {
            let end = if i + 1 == segments.len() { w1 } else { seg.1 };
            if end - cursor > ANGLE_TOL {
                cuts.push(end);
                cursor = end;
            } else if i + 1 == segments.len() {
                // Fold a trailing sliver into the final cut.
                if let Some(last) = cuts.last_mut() {
                    *last = end;
                } else {
                    cuts.push(end);
                }
            }
        }

        // Wrap the cuts into [0, 2pi) and sort; each canonical piece gets its
        // coefficients reconstructed from value and derivative at the
        // canonical midpoint, read off the covering segment.
        let mut wrapped: Vec<f64> = cuts
            .iter()
            .map(|&c| crate::measures::wrap_angle(c))
            .collect();
        wrapped.sort_by(f64::total_cmp);
        wrapped.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);
        if wrapped.len() >= 2 {
            let first = wrapped[0];
            let last = wrapped[wrapped.len() - 1];
            if first + TAU - last <= ANGLE_TOL {
                wrapped.pop();
            }
        }
        if wrapped.is_empty() {
            return Err(TrigError::Invalid("all cuts degenerate".into()));
        }

        let r = rho.value();
        let sample = |t: f64| -> (f64, f64) {
            // Bring t into [w0, w1) and read the covering segment.
            let tt = w0 + (t - w0).rem_euclid(TAU);
            let mut value = 0.0;
            let mut deriv = 0.0;
            let mut hit = false;
            for seg in segments {
                if tt >= seg.0 - 1e-9 && tt <= seg.1 + 1e-9 {
                    value = seg.2.eval(r, tt);
                    deriv = seg.2.deriv(r, tt);
                    hit = true;
                    if tt > seg.0 + ANGLE_TOL && tt < seg.1 - ANGLE_TOL {
                        break; // interior hit is unambiguous
                    }
                }
            }
            debug_assert!(hit, "segment cover has a hole at {tt}");
            (value, deriv)
        };

        let l = wrapped.len();
        let mut pieces: Vec<Coeff> = Vec::with_capacity(l);
        for k in 0..l {
            let (lo, hi) = if k == 0 {
                (wrapped[l - 1] - TAU, wrapped[0])
            } else {
                (wrapped[k - 1], wrapped[k])
            };
            let mid = 0.5 * (lo + hi);
            let (v, d) = sample(mid);
            pieces.push(Coeff::from_value_deriv(r, mid, v, d));
        }
        Self::from_parts(rho, wrapped, pieces)
    }

    /// The order.
    pub fn order(&self) -> Order {
        self.rho
    }

    /// The order as a float.
    pub fn rho_value(&self) -> f64 {
        self.rho.value()
    }

    /// Breakpoints (singular support), sorted in `[0, 2pi)`.
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Piece coefficients; `pieces()[k]` holds left of `breakpoints()[k]`
    /// (piece 0 holds on the wrap interval). For the breakpoint-free form
    /// this is the single global piece.
    pub fn pieces(&self) -> &[Coeff] {
        &self.pieces
    }

    /// Wrap `t` into the representation window `[s_L - 2pi, s_L)`; returns
    /// the wrapped angle and the (2pi-multiple) shift taken off.
    fn wrap_into_window(&self, t: f64) -> (f64, f64) {
        let top = *self.breakpoints.last().expect("nonempty breakpoints");
        let bot = top - TAU;
        let tt = bot + (t - bot).rem_euclid(TAU);
        let tt = if tt >= top { bot } else { tt };
        (tt, t - tt)
    }

    /// The coefficients of the piece governing `f` near `t`, expressed in
    /// the frame of `t` itself (so `result.eval(rho, t)` is `f(t)` and the
    /// same holds in a neighborhood on the chosen side).
    pub(crate) fn coeff_in_frame_sided(&self, t: f64, side: Side) -> Coeff {
        if self.breakpoints.is_empty() {
            return self.pieces[0];
        }
        let r = self.rho.value();
        let l = self.breakpoints.len();
        let top = self.breakpoints[l - 1];
        let bot = top - TAU;
        let (tt, delta) = self.wrap_into_window(t);

        // Breakpoint hit? (The window bottom is the wrap image of the last
        // breakpoint.)
        let mut hit: Option<(usize, f64)> = None;
        if (tt - bot).abs() <= ANGLE_TOL {
            hit = Some((l - 1, bot));
        } else {
            for (j, &s) in self.breakpoints.iter().enumerate() {
                if (tt - s).abs() <= ANGLE_TOL {
                    hit = Some((j, s));
                    break;
                }
            }
        }
        match (hit, side) {
            (Some((j, pos)), Side::Left) => {
                // Piece j ends at breakpoint j; its frame anchor is the
                // canonical breakpoint position.
                let frame_delta = (pos + delta) - self.breakpoints[j];
                self.pieces[j].shifted(r, frame_delta)
            }
            (Some((j, pos)), Side::Right) => {
                let jr = (j + 1) % l;
                let start_in_frame = if jr == 0 { bot } else { self.breakpoints[j] };
                let frame_delta = (pos + delta) - start_in_frame;
                self.pieces[jr].shifted(r, frame_delta)
            }
            (None, _) => {
                let idx = self.breakpoints.partition_point(|&s| s < tt);
                debug_assert!(idx < l);
                self.pieces[idx].shifted(r, delta)
            }
        }
    }

    /// Like [`Self::coeff_in_frame_sided`] for interior points.
    pub(crate) fn coeff_in_frame(&self, t: f64) -> Coeff {
        self.coeff_in_frame_sided(t, Side::Left)
    }

    /// Value at `t` (any real angle; the function is `2pi`-periodic).
    pub fn evaluate(&self, t: f64) -> f64 {
        self.coeff_in_frame_sided(t, Side::Left).eval(self.rho.value(), t)
    }

    /// Left derivative at `t`.
    pub fn deriv_left(&self, t: f64) -> f64 {
        self.coeff_in_frame_sided(t, Side::Left).deriv(self.rho.value(), t)
    }

    /// Right derivative at `t`.
    pub fn deriv_right(&self, t: f64) -> f64 {
        self.coeff_in_frame_sided(t, Side::Right).deriv(self.rho.value(), t)
    }

    /// All derivative jumps, one per breakpoint.
    pub fn derivative_jumps(&self) -> Vec<DerivativeJump> {
        let r = self.rho.value();
        let l = self.breakpoints.len();
        let mut out = Vec::with_capacity(l);
        for j in 0..l {
            let s = self.breakpoints[j];
            let left = self.pieces[j].deriv(r, s);
            let right = if j + 1 < l {
                self.pieces[j + 1].deriv(r, s)
            } else {
                self.pieces[0].deriv(r, s - TAU)
            };
            out.push(DerivativeJump {
                location: s,
                left,
                right,
                jump: right - left,
            });
        }
        out
    }

    /// The function `t -> f(t + delta)`.
    pub fn rotated(&self, delta: f64) -> PiecewiseTrig {
        let r = self.rho.value();
        if self.breakpoints.is_empty() {
            let mut out = self.clone();
            out.pieces[0] = self.pieces[0].shifted(r, -delta);
            return out;
        }
        let segs: Vec<(f64, f64, Coeff)> = self
            .piece_intervals()
            .map(|(lo, hi, c)| (lo - delta, hi - delta, c.shifted(r, -delta)))
            .collect();
        Self::from_segments(&self.rho, &segs)
            .expect("rotation of a valid function stays valid")
    }

    /// Iterate the canonical piece intervals `(lo, hi, coeff)` covering the
    /// representation window in order.
    pub(crate) fn piece_intervals(&self) -> impl Iterator<Item = (f64, f64, Coeff)> + '_ {
        let l = self.breakpoints.len();
        (0..self.pieces.len()).map(move |k| {
            if l == 0 {
                return (0.0, TAU, self.pieces[0]);
            }
            let hi = self.breakpoints[k];
            let lo = if k == 0 {
                self.breakpoints[l - 1] - TAU
            } else {
                self.breakpoints[k - 1]
            };
            (lo, hi, self.pieces[k])
        })
    }

    /// Debug CSV dump: `samples` rows of `t,value` over one period.
    pub fn dump_csv(&self, samples: usize) -> String {
        let mut out = String::from("t,value\n");
        for k in 0..samples {
            let t = TAU * k as f64 / samples as f64;
            out.push_str(&format!("{t:.12},{:.12}\n", self.evaluate(t)));
        }
        out
    }
}

/// Zeros of `coeff.eval(rho, .)` inside `[lo, hi]`, ascending. Degenerate
/// (near-zero amplitude) pieces report no zeros; callers that care about the
/// identically-zero case must test the amplitude themselves.
fn trig_zeros(coeff: Coeff, rho: f64, lo: f64, hi: f64) -> Vec<f64> {
    if coeff.amp() <= 1e-13 || hi <= lo {
        return Vec::new();
    }
    let psi = coeff.b.atan2(coeff.a);
    // Zeros where rho t - psi = pi/2 + k pi.
    let k0 = ((rho * lo - psi) / PI - 0.5).floor() as i64 - 1;
    let k1 = ((rho * hi - psi) / PI - 0.5).ceil() as i64 + 1;
    let mut out = Vec::new();
    for k in k0..=k1 {
        let t = (psi + PI / 2.0 + k as f64 * PI) / rho;
        if t >= lo && t <= hi {
            out.push(t);
        }
    }
    out
}

/// Interior maximizer positions of `coeff.eval(rho, .)` inside `(lo, hi)`.
fn trig_maxima(coeff: Coeff, rho: f64, lo: f64, hi: f64) -> Vec<f64> {
    if coeff.amp() <= 1e-13 || hi <= lo {
        return Vec::new();
    }
    let psi = coeff.b.atan2(coeff.a);
    let k0 = ((rho * lo - psi) / TAU).floor() as i64 - 1;
    let k1 = ((rho * hi - psi) / TAU).ceil() as i64 + 1;
    let mut out = Vec::new();
    for k in k0..=k1 {
        let t = (psi + TAU * k as f64) / rho;
        if t > lo && t < hi {
            out.push(t);
        }
    }
    out
}

/// Upper envelope of same-frequency sinusoids over `(lo, hi)`: returns
/// `(end, winner)` sub-segments in order, the last end being `hi`. Winners
/// switch only at pairwise crossings, all of which are cut.
fn upper_envelope(rho: f64, lo: f64, hi: f64, cands: &[Coeff]) -> Vec<(f64, Coeff)> {
    debug_assert!(!cands.is_empty());
    if cands.len() == 1 {
        return vec![(hi, cands[0])];
    }
    let mut cuts: Vec<f64> = Vec::new();
    for i in 0..cands.len() {
        for j in (i + 1)..cands.len() {
            let diff = Coeff::new(cands[i].a - cands[j].a, cands[i].b - cands[j].b);
            cuts.extend(trig_zeros(diff, rho, lo + ANGLE_TOL, hi - ANGLE_TOL));
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);
    cuts.push(hi);
    let mut out = Vec::with_capacity(cuts.len());
    let mut start = lo;
    for end in cuts {
        if end - start <= ANGLE_TOL && end != hi {
            continue;
        }
        let mid = 0.5 * (start + end);
        let mut best = 0usize;
        let mut best_val = cands[0].eval(rho, mid);
        for (i, c) in cands.iter().enumerate().skip(1) {
            let v = c.eval(rho, mid);
            if v > best_val + 1e-15 {
                best = i;
                best_val = v;
            }
        }
        out.push((end, cands[best]));
        start = end;
    }
    out
}

// ---------------------------------------------------------------------------
// Convexity
// ---------------------------------------------------------------------------

/// Convexity check: every derivative jump must be `>= -`[`CONVEXITY_TOL`].
pub fn is_trig_convex(f: &PiecewiseTrig) -> ConvexityReport {
    let jumps = f.derivative_jumps();
    let convex = jumps.iter().all(|d| d.jump >= -CONVEXITY_TOL);
    ConvexityReport { convex, jumps }
}

/// Monte-Carlo check of the three-point convexity inequality: samples
/// `samples` admissible triples `t1 < t2 < t3` with `t3 - t1 < pi/rho` and
/// returns the worst (largest) value of
///
/// `f(t1) sin rho(t2 - t3) + f(t2) sin rho(t3 - t1) + f(t3) sin rho(t1 - t2)`,
///
/// which is nonpositive exactly for trigonometrically convex `f`.
pub fn tc_triple_check(f: &PiecewiseTrig, samples: usize, seed: u64) -> f64 {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let rho = f.rho_value();
    let span = PI / rho;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        let t1: f64 = rng.random_range(0.0..TAU);
        let u: f64 = rng.random_range(0.0..span);
        let v: f64 = rng.random_range(0.0..span);
        let (d1, d2) = if u <= v { (u, v) } else { (v, u) };
        let (t2, t3) = (t1 + d1, t1 + d2);
        let lhs = f.evaluate(t1) * (rho * (t2 - t3)).sin()
            + f.evaluate(t2) * (rho * (t3 - t1)).sin()
            + f.evaluate(t3) * (rho * (t1 - t2)).sin();
        if lhs > worst {
            worst = lhs;
        }
    }
    worst
}

// ---------------------------------------------------------------------------
// Measure <-> function
// ---------------------------------------------------------------------------

/// The angular density of a convex piecewise function: one atom per
/// breakpoint with mass `jump / (2 pi rho)`. Errors with [`TrigError::NotConvex`]
/// when some jump is negative beyond tolerance.
pub fn measure_of(f: &PiecewiseTrig) -> Result<AtomicMeasure, TrigError> {
    let rho = f.rho_value();
    let mut raw = Vec::new();
    for d in f.derivative_jumps() {
        if d.jump < -CONVEXITY_TOL {
            return Err(TrigError::NotConvex {
                location: d.location,
                jump: d.jump,
            });
        }
        raw.push((d.location, d.jump.max(0.0) / (TAU * rho)));
    }
    AtomicMeasure::new(raw).map_err(|e| TrigError::Invalid(e.to_string()))
}

/// The canonical convex piecewise function with angular density `measure`.
///
/// Non-integer order: the kernel sum
/// `sum_j m_j (pi / sin(pi rho)) cos(rho (t - phi_j' - pi))`, with `phi_j'`
/// the representative of atom `j` in the current piece's backward window.
/// Integer order `n`: requires a regular measure (else
/// [`TrigError::IllposedIntegerOrder`]) and uses the kernel sum
/// `sum_j m_j phi_j' sin(n (t - phi_j'))`; regularity makes the result
/// independent of representative choices.
///
/// In both branches the derivative jump at atom `j` is exactly
/// `2 pi rho m_j`, so [`measure_of`] inverts this construction.
pub fn h_from_measure(measure: &AtomicMeasure, rho: &Order) -> Result<PiecewiseTrig, TrigError> {
    let r = rho.value();
    if measure.is_empty() {
        return Ok(PiecewiseTrig::zero(rho));
    }
    let defect = lindelof_defect(measure, rho);
    if rho.is_integer() && !defect.regular {
        return Err(TrigError::IllposedIntegerOrder {
            rho: r,
            defect: defect.modulus(),
        });
    }

    let atoms = measure.atoms();
    let bps: Vec<f64> = atoms.iter().map(|a| a.angle).collect();
    let l = bps.len();
    let mut pieces = Vec::with_capacity(l);
    let integer = rho.as_integer();
    for k in 0..l {
        let lo = if k == 0 { bps[l - 1] - TAU } else { bps[k - 1] };
        let mid = 0.5 * (lo + bps[k]);
        let mut a = 0.0;
        let mut b = 0.0;
        for atom in atoms {
            // Representative of the atom in (mid - 2pi, mid].
            let rep = mid - crate::measures::wrap_angle(mid - atom.angle);
            match integer {
                Some(n) => {
                    let n = n as f64;
                    let (s, c) = (n * rep).sin_cos();
                    a += -atom.mass * rep * s;
                    b += atom.mass * rep * c;
                }
                None => {
                    let scale = PI * atom.mass / (PI * r).sin();
                    let (s, c) = (r * (rep + PI)).sin_cos();
                    a += scale * c;
                    b += scale * s;
                }
            }
        }
        pieces.push(Coeff::new(a, b));
    }
    // A barely-regular integer-order measure leaves a seam mismatch of up to
    // 2 pi * |defect|; widen the continuity tolerance accordingly.
    let max_amp = pieces.iter().map(|c| c.amp()).fold(0.0f64, f64::max);
    let cont_tol = VALUE_TOL * (1.0 + max_amp) + TAU * defect.modulus();
    PiecewiseTrig::from_parts_with_tol(rho, bps, pieces, cont_tol)
}

/// Add the sinusoid `a cos(rho t) + b sin(rho t)` to `f`.
///
/// At integer order this is the type-preserving shift: it translates the
/// swept curve by `(a, b)` and leaves the angular density unchanged. It is
/// defined for every order, but at non-integer order the addend is not
/// `2pi`-periodic, so the result is a formal per-piece object; only
/// integer-order callers should treat it as a function on the circle.
pub fn add_trig(f: &PiecewiseTrig, a: f64, b: f64) -> PiecewiseTrig {
    let mut out = f.clone();
    for c in &mut out.pieces {
        c.a += a;
        c.b += b;
    }
    out
}

// ---------------------------------------------------------------------------
// Pointwise max, global max
// ---------------------------------------------------------------------------

/// Pointwise maximum of two functions of the same order.
///
/// The result's breakpoints are the surviving breakpoints of the inputs plus
/// the transversal crossings, located in closed form and snapped to existing
/// cuts within the angular tolerance. The maximum of trigonometrically
/// convex functions is again trigonometrically convex.
///
/// Panics if the orders differ (caller contract).
pub fn pointwise_max(f: &PiecewiseTrig, g: &PiecewiseTrig) -> PiecewiseTrig {
    assert_eq!(
        f.rho, g.rho,
        "pointwise_max requires functions of one order"
    );
    let rho = f.rho_value();

    let mut events: Vec<f64> = f
        .breakpoints
        .iter()
        .chain(g.breakpoints.iter())
        .copied()
        .collect();
    events.sort_by(f64::total_cmp);
    events.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);
    if events.is_empty() {
        events.push(0.0);
    }

    let l = events.len();
    let mut segments: Vec<(f64, f64, Coeff)> = Vec::new();
    for k in 0..l {
        let hi = events[k];
        let lo = if k == 0 { events[l - 1] - TAU } else { events[k - 1] };
        let mid = 0.5 * (lo + hi);
        let fc = f.coeff_in_frame(mid);
        let gc = g.coeff_in_frame(mid);
        for (end, winner) in upper_envelope(rho, lo, hi, &[fc, gc]) {
            segments.push((segments.last().map_or(lo, |s| s.1), end, winner));
        }
    }
    PiecewiseTrig::from_segments(&f.rho, &segments)
        .expect("envelope of valid functions assembles")
}

/// Global maximum of `f` with its maximizer set.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxReport {
    /// The maximum value.
    pub value: f64,
    /// Isolated maximizers in `[0, 2pi)`, sorted, deduplicated within 1e-9.
    pub angles: Vec<f64>,
    /// Maximal intervals `(start, start + len)` of identically-zero pieces
    /// attaining the maximum (only possible when the maximum is ~0). Starts
    /// lie in `[0, 2pi)`; ends may exceed `2pi` for the wrap piece.
    pub intervals: Vec<(f64, f64)>,
}

/// Exact global maximum and argmax set, computed piece by piece in closed
/// form (piece endpoints plus interior crest points).
pub fn max_and_argmax(f: &PiecewiseTrig) -> MaxReport {
    let rho = f.rho_value();
    if f.breakpoints.is_empty() {
        let c = f.pieces[0];
        if c.amp() <= 1e-12 {
            return MaxReport {
                value: 0.0,
                angles: Vec::new(),
                intervals: vec![(0.0, TAU)],
            };
        }
        // Integer order: crests of a global sinusoid.
        let psi = c.b.atan2(c.a);
        let n = f.rho.as_integer().expect("pure nonzero piece is integer order") as i64;
        let mut angles: Vec<f64> = (0..n)
            .map(|k| crate::measures::wrap_angle((psi + TAU * k as f64) / rho))
            .collect();
        angles.sort_by(f64::total_cmp);
        return MaxReport {
            value: c.amp(),
            angles,
            intervals: Vec::new(),
        };
    }

    let scale = f.pieces.iter().map(|c| c.amp()).fold(0.0f64, f64::max);
    struct Cand {
        t: f64,
        value: f64,
    }
    let mut cands: Vec<Cand> = Vec::new();
    let mut flats: Vec<(f64, f64)> = Vec::new();
    for (lo, hi, c) in f.piece_intervals() {
        if c.amp() <= 1e-13 * (1.0 + scale) {
            flats.push((lo, hi));
            continue;
        }
        cands.push(Cand {
            t: lo,
            value: c.eval(rho, lo),
        });
        cands.push(Cand {
            t: hi,
            value: c.eval(rho, hi),
        });
        for t in trig_maxima(c, rho, lo, hi) {
            cands.push(Cand { t, value: c.eval(rho, t) });
        }
    }
    let mut value = f64::NEG_INFINITY;
    for c in &cands {
        value = value.max(c.value);
    }
    for _ in &flats {
        value = value.max(0.0);
    }

    let mut angles: Vec<f64> = cands
        .iter()
        .filter(|c| c.value >= value - VALUE_TOL)
        .map(|c| crate::measures::wrap_angle(c.t))
        .collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    if angles.len() >= 2 {
        let first = angles[0];
        let last = angles[angles.len() - 1];
        if first + TAU - last <= 1e-9 {
            angles.pop();
        }
    }
    let intervals: Vec<(f64, f64)> = flats
        .into_iter()
        .filter(|_| 0.0 >= value - VALUE_TOL)
        .map(|(lo, hi)| {
            let w = crate::measures::wrap_angle(lo);
            (w, w + (hi - lo))
        })
        .collect();
    MaxReport {
        value,
        angles,
        intervals,
    }
}

// ---------------------------------------------------------------------------
// Two-slope windows and the minorant
// ---------------------------------------------------------------------------

/// A piecewise sinusoid restricted to a finite window (used for the
/// elementary two-slope minorant pieces). Coefficients are valid at the raw
/// angles of the window; the function is *not* periodized.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowTrig {
    rho: f64,
    start: f64,
    end: f64,
    /// Interior cuts, strictly between `start` and `end`, ascending.
    cuts: Vec<f64>,
    /// `cuts.len() + 1` pieces.
    pieces: Vec<Coeff>,
}

impl WindowTrig {
    pub fn window(&self) -> (f64, f64) {
        (self.start, self.end)
    }

    pub fn cuts(&self) -> &[f64] {
        &self.cuts
    }

    pub fn pieces(&self) -> &[Coeff] {
        &self.pieces
    }

    /// All boundary angles: start, interior cuts, end.
    pub fn boundaries(&self) -> Vec<f64> {
        let mut b = Vec::with_capacity(self.cuts.len() + 2);
        b.push(self.start);
        b.extend_from_slice(&self.cuts);
        b.push(self.end);
        b
    }

    /// Piece coefficients governing `t` (clamped into the window).
    pub fn coeff_at(&self, t: f64) -> Coeff {
        let idx = self.cuts.partition_point(|&c| c < t);
        self.pieces[idx]
    }

    /// Value at `t` inside the window.
    pub fn evaluate(&self, t: f64) -> f64 {
        debug_assert!(t >= self.start - 1e-9 && t <= self.end + 1e-9);
        self.coeff_at(t).eval(self.rho, t)
    }

    fn normalize(mut self) -> Self {
        let mut k = 0;
        while k < self.cuts.len() {
            let tol = 1e-12 * (1.0 + self.pieces[k].amp().max(self.pieces[k + 1].amp()));
            if self.pieces[k].approx_eq(self.pieces[k + 1], tol) {
                self.cuts.remove(k);
                self.pieces.remove(k);
            } else {
                k += 1;
            }
        }
        self
    }
}

/// The elementary two-slope minorant window for a negativity component
/// `(alpha, beta)` with entry slope amplitude `a_amp` and exit amplitude
/// `b_amp` (both nonnegative): on `[alpha - pi/rho, alpha]` the lobe
/// `a_amp sin(rho (alpha - t))`, on `[beta, beta + pi/rho]` the lobe
/// `b_amp sin(rho (t - beta))`, and on `[alpha, beta]` the upper envelope of
/// the two lobes' continuations (which cross at most once). Both lobes
/// vanish at the outer window edges, so the window extends by zero.
///
/// Errors with [`TrigError::BadWindow`] unless `0 < beta - alpha <= pi/rho`
/// (up to roundoff slack).
pub fn tau_ab(
    alpha: f64,
    a_amp: f64,
    beta: f64,
    b_amp: f64,
    rho: &Order,
) -> Result<WindowTrig, TrigError> {
    let r = rho.value();
    let max_width = PI / r;
    let width = beta - alpha;
    if !(width > 0.0 && width <= max_width * (1.0 + 1e-12) + 1e-12) {
        return Err(TrigError::BadWindow { width, max_width });
    }
    debug_assert!(a_amp >= 0.0 && b_amp >= 0.0, "slope amplitudes are nonnegative");

    // a_amp sin(rho(alpha - t)) = (a_amp sin(rho alpha)) cos(rho t) - (a_amp cos(rho alpha)) sin(rho t)
    let (sa, ca) = (r * alpha).sin_cos();
    let left = Coeff::new(a_amp * sa, -a_amp * ca);
    // b_amp sin(rho(t - beta)) = -(b_amp sin(rho beta)) cos(rho t) + (b_amp cos(rho beta)) sin(rho t)
    let (sb, cb) = (r * beta).sin_cos();
    let right = Coeff::new(-b_amp * sb, b_amp * cb);

    let start = alpha - max_width;
    let end = beta + max_width;
    let mut cuts: Vec<f64> = Vec::new();
    let mut pieces: Vec<Coeff> = Vec::new();
    pieces.push(left);
    cuts.push(alpha);
    for (seg_end, winner) in upper_envelope(r, alpha, beta, &[left, right]) {
        pieces.push(winner);
        cuts.push(seg_end);
    }
    // The envelope loop pushed beta as the final cut; the closing piece is
    // the right lobe.
    pieces.push(right);
    Ok(WindowTrig {
        rho: r,
        start,
        end,
        cuts,
        pieces,
    }
    .normalize())
}

/// Maximal open components of `{h < 0}` as absolute intervals, each of
/// positive length, endpoints at exact zeros of the governing pieces.
/// Components are reported in the representation window's frame; a component
/// wrapping the window seam is reported with its end lifted by `2pi`.
fn negative_components(h: &PiecewiseTrig) -> Vec<(f64, f64)> {
    let rho = h.rho_value();
    if h.breakpoints.is_empty() {
        let c = h.pieces[0];
        if c.amp() <= 1e-12 {
            return Vec::new();
        }
        let n = h.rho.as_integer().expect("pure nonzero piece is integer order");
        let psi = c.b.atan2(c.a);
        return (0..n)
            .map(|k| {
                let lo = (psi + PI / 2.0 + TAU * k as f64) / rho;
                (lo, lo + PI / rho)
            })
            .collect();
    }

    // Cut the window at piece edges and interior zeros, classify elementary
    // intervals by sign at their midpoints, then merge.
    let mut cuts: Vec<f64> = Vec::new();
    let mut window = (0.0, 0.0);
    for (lo, hi, c) in h.piece_intervals() {
        if cuts.is_empty() {
            cuts.push(lo);
            window.0 = lo;
        }
        cuts.extend(trig_zeros(c, rho, lo + ANGLE_TOL, hi - ANGLE_TOL));
        cuts.push(hi);
        window.1 = hi;
    }
    let mut neg: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= ANGLE_TOL {
            continue;
        }
        if h.evaluate(0.5 * (lo + hi)) < 0.0 {
            match neg.last_mut() {
                Some(prev) if (prev.1 - lo).abs() <= ANGLE_TOL => prev.1 = hi,
                _ => neg.push((lo, hi)),
            }
        }
    }
    // Wrap seam: a component touching both window ends is one component.
    if neg.len() >= 2 {
        let first = neg[0];
        let last = *neg.last().expect("len >= 2");
        if (first.0 - window.0).abs() <= ANGLE_TOL && (window.1 - last.1).abs() <= ANGLE_TOL {
            neg[0] = (last.0, first.1 + TAU);
            neg.pop();
        }
    }
    neg
}

/// The elementary trigonometric minorant: the pointwise maximum of the
/// two-slope windows erected over every negativity component of `h`
/// (zero where no window reaches). For `h >= 0` this is the zero function.
///
/// Precondition: `h` is trigonometrically convex. The result is convex,
/// stays below `h`, is nonpositive on the negativity components themselves
/// (the outer lobes rise above zero, but never above `h`), vanishes where
/// no window reaches, and touches `h` at every component endpoint.
pub fn minorant_elementary(h: &PiecewiseTrig) -> PiecewiseTrig {
    debug_assert!(is_trig_convex(h).convex);
    let rho_ord = h.order();
    let rho = h.rho_value();
    let comps = negative_components(h);
    if comps.is_empty() {
        return PiecewiseTrig::zero(&rho_ord);
    }

    // One window function per component.
    struct Instance {
        start: f64,
        end: f64,
        offset: f64,
        tau: usize,
    }
    let mut taus: Vec<WindowTrig> = Vec::with_capacity(comps.len());
    for &(alpha, beta) in &comps {
        let a_amp = (-h.deriv_right(alpha) / rho).max(0.0);
        let b_amp = (h.deriv_left(beta) / rho).max(0.0);
        // Property of convex h: component width is at most pi/rho; tau_ab
        // accepts the roundoff slack.
        let tau = tau_ab(alpha, a_amp, beta, b_amp, &rho_ord)
            .expect("negativity components of convex functions fit one window");
        taus.push(tau);
    }

    // Periodized instances intersecting the assembly window [0, 2pi].
    let mut instances: Vec<Instance> = Vec::new();
    for (idx, tau) in taus.iter().enumerate() {
        let (s, e) = tau.window();
        for k in -3i32..=3 {
            let off = TAU * k as f64;
            if s + off < TAU - ANGLE_TOL && e + off > ANGLE_TOL {
                instances.push(Instance {
                    start: s + off,
                    end: e + off,
                    offset: off,
                    tau: idx,
                });
            }
        }
    }

    // Cut [0, 2pi] at every instance boundary.
    let mut cuts: Vec<f64> = vec![0.0, TAU];
    for inst in &instances {
        for b in taus[inst.tau].boundaries() {
            let x = b + inst.offset;
            if x > ANGLE_TOL && x < TAU - ANGLE_TOL {
                cuts.push(x);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= ANGLE_TOL);

    let mut segments: Vec<(f64, f64, Coeff)> = Vec::new();
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let mut cands: Vec<Coeff> = Vec::new();
        for inst in &instances {
            if mid > inst.start && mid < inst.end {
                let local = taus[inst.tau].coeff_at(mid - inst.offset);
                cands.push(local.shifted(rho, inst.offset));
            }
        }
        if cands.is_empty() {
            segments.push((lo, hi, Coeff::default()));
        } else {
            let mut start = lo;
            for (end, winner) in upper_envelope(rho, lo, hi, &cands) {
                segments.push((start, end, winner));
                start = end;
            }
        }
    }
    PiecewiseTrig::from_segments(&rho_ord, &segments)
        .expect("minorant assembly covers one period")
}

/// Merge singular points of a convex minorant until all circular
/// gaps exceed `pi/rho`: repeatedly take the first adjacent pair with gap
/// `<= pi/rho` and replace the function between them by the upper envelope
/// of the two outer neighboring pieces extended inward. Each merge removes
/// at least one singular point, the result stays convex and only decreases,
/// and at gap exactly `pi/rho` with matching slopes the pair fuses smoothly.
pub fn merge_singulars(tau: &PiecewiseTrig) -> PiecewiseTrig {
    let rho = tau.rho_value();
    let max_gap = PI / rho;
    let mut cur = tau.clone();
    loop {
        let l = cur.breakpoints.len();
        if l <= 1 {
            return cur;
        }
        let mut pair: Option<(usize, f64)> = None;
        for i in 0..l {
            let gap = if i + 1 < l {
                cur.breakpoints[i + 1] - cur.breakpoints[i]
            } else {
                cur.breakpoints[0] + TAU - cur.breakpoints[l - 1]
            };
            if gap <= max_gap + 1e-12 {
                pair = Some((i, gap));
                break;
            }
        }
        let Some((i, gap)) = pair else {
            return cur;
        };
        let alpha = cur.breakpoints[i];

        // Rotate so the pair sits symmetrically about pi, safely interior.
        let c = alpha - (PI - gap / 2.0);
        let g = cur.rotated(c);
        let gl = g.breakpoints.len();
        let ia = g
            .breakpoints
            .iter()
            .position(|&s| (s - (PI - gap / 2.0)).abs() <= 1e-9)
            .expect("rotated pair start present");
        let ib = ia + 1;
        debug_assert!(
            ib < gl && (g.breakpoints[ib] - (PI + gap / 2.0)).abs() <= 1e-9,
            "rotated pair is linearly adjacent"
        );
        let (alpha_r, beta_r) = (g.breakpoints[ia], g.breakpoints[ib]);

        let left = g.pieces[ia];
        let right = if ib + 1 < gl {
            g.pieces[ib + 1]
        } else {
            g.pieces[0].shifted(rho, TAU)
        };

        // Rebuild the canonical segment list with the middle replaced by the
        // envelope of the extended neighbors.
        let mut segments: Vec<(f64, f64, Coeff)> = Vec::new();
        for (k, (lo, hi, coeff)) in g.piece_intervals().enumerate() {
            if k != ib {
                segments.push((lo, hi, coeff));
                continue;
            }
            let mut start = alpha_r;
            for (end, winner) in upper_envelope(rho, alpha_r, beta_r, &[left, right]) {
                segments.push((start, end, winner));
                start = end;
            }
        }
        let merged = PiecewiseTrig::from_segments(&cur.rho, &segments)
            .expect("merge rebuild covers one period");
        debug_assert!(merged.breakpoints.len() < l, "merge makes progress");
        cur = merged.rotated(-c);
    }
}

/// The widely spaced trigonometric minorant: elementary minorant, then
/// singularity merging. The result is convex, lies below `h`, and its
/// singular points have circular gaps exceeding `pi/rho`.
pub fn widely_spaced_minorant(h: &PiecewiseTrig) -> PiecewiseTrig {
    merge_singulars(&minorant_elementary(h))
}
