//! The locally convex curve swept by a convex piecewise trigonometric
//! function, its nests, and the two critical types.
//!
//! Stretching the angle by `rho` turns a convex `h` into a support-style
//! function `h~(sigma) = h(sigma / rho)` of period `2 pi rho`: each smooth
//! piece contributes a *vertex* (the point whose support function the piece
//! is) and each derivative jump contributes an *edge* of length `2 pi` times
//! the atom mass, normal to the jump direction. The resulting polygonal
//! curve is locally convex and closes up after one stretched period.
//!
//! A *nest* at `sigma = alpha` is a sub-arc spanning exactly one full turn
//! `(alpha - 2pi, alpha)` whose closure meets itself without crossing; its
//! circumscribed disk radius is the local quantity whose maximum over all
//! nests is the critical uniqueness type `sigma_U`. The critical zero type
//! `sigma_Z` is the global size of the curve: the maximum of `h` itself at
//! non-integer order, and the smallest enclosing-circle radius over the
//! vertex set (minimized over translations) at integer order.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

pub use crate::geom::min_enclosing_circle;
use crate::geom::{Circle, Point};
use crate::measures::wrap_angle;
use crate::tol::VALUE_TOL;
use crate::trigfun::{
    add_trig, is_trig_convex, max_and_argmax, measure_of, PiecewiseTrig, Side, TrigError,
};

/// Errors from the curve layer.
#[derive(Debug, Clone, Error)]
pub enum CurveError {
    /// The input function is not trigonometrically convex.
    #[error(
        "function is not trigonometrically convex: derivative jump {jump:.6e} at breakpoint {location}"
    )]
    NotConvex { location: f64, jump: f64 },
    /// Unsupported export format string.
    #[error("unknown export format {0:?} (expected \"svg\" or \"csv\")")]
    UnknownFormat(String),
    /// Malformed request (window, degenerate input, ...).
    #[error("{0}")]
    Invalid(String),
}

impl From<TrigError> for CurveError {
    fn from(e: TrigError) -> Self {
        match e {
            TrigError::NotConvex { location, jump } => CurveError::NotConvex { location, jump },
            other => CurveError::Invalid(other.to_string()),
        }
    }
}

/// One vertex of the swept curve with the parameter interval supporting it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vertex {
    /// The vertex position.
    pub point: Point,
    /// Start of the stretched-parameter interval on which this vertex is the
    /// support point.
    pub sigma_from: f64,
    /// End of that interval.
    pub sigma_to: f64,
}

/// One edge of the swept curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    /// Stretched parameter of the derivative jump generating this edge.
    pub sigma: f64,
    /// Edge start point.
    pub from: Point,
    /// Edge end point.
    pub to: Point,
    /// Unit direction `(-sin sigma, cos sigma)`.
    pub direction: Point,
    /// Edge length (`2 pi` times the atom mass).
    pub length: f64,
}

/// A finite window of the locally convex curve.
#[derive(Debug, Clone, PartialEq)]
pub struct LocallyConvexPolygon {
    /// The order of the generating function.
    pub rho: f64,
    /// The stretched-parameter window `(from, to)` that was traced.
    pub window: (f64, f64),
    /// Vertices in parameter order (always one more than the edges between
    /// them, counting the leading and trailing partial intervals).
    pub vertices: Vec<Vertex>,
    /// Edges in parameter order.
    pub edges: Vec<Edge>,
}

/// A nest: a one-turn closed sub-arc of the curve with its circumdisk.
#[derive(Debug, Clone, PartialEq)]
pub struct Nest {
    /// Closing parameter: the sub-arc spans `(alpha - 2pi, alpha)`, with
    /// `alpha` reported in `[0, 2 pi rho)`.
    pub alpha: f64,
    /// Center of the smallest disk enclosing the sub-arc's vertex set.
    pub center: Point,
    /// Radius of that disk (the local circumradius at `alpha`).
    pub radius: f64,
    /// The sub-arc's vertex points, in parameter order.
    pub vertices: Vec<Point>,
}

/// Outcome of the local balance test.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport {
    /// Critical zero type.
    pub sigma_z: f64,
    /// Critical uniqueness type.
    pub sigma_u: f64,
    /// The centering sinusoid coefficients: `h + shift.x cos(rho t) +
    /// shift.y sin(rho t)` attains `sigma_z` as its plain maximum (the shift
    /// is zero at non-integer order).
    pub shift: Point,
    /// Whether the function is locally balanced (equivalently, whether
    /// `sigma_u` equals `sigma_z`).
    pub locally_balanced: bool,
    /// Isolated maximizers of the centered function, in `[0, 2pi)`.
    pub maximizers: Vec<f64>,
    /// Flat maximizer intervals of the centered function (only when the
    /// maximum is zero).
    pub maximizer_intervals: Vec<(f64, f64)>,
    /// A maximizer triple `(alpha, beta, gamma)` witnessing balance:
    /// `beta - alpha` in `(0, pi/rho]`, `gamma - beta` in `[0, pi/rho)`,
    /// `gamma - alpha >= pi/rho`. `None` when not balanced.
    pub witness: Option<(f64, f64, f64)>,
}

fn wrap_period(x: f64, period: f64) -> f64 {
    let w = x.rem_euclid(period);
    if w >= period {
        0.0
    } else {
        w
    }
}

/// The support point (vertex) of the stretched curve at parameter `sigma`,
/// approached from the given side.
fn stretched_vertex(h: &PiecewiseTrig, sigma: f64, side: Side) -> Point {
    h.coeff_in_frame_sided(sigma / h.rho_value(), side).point()
}

fn ensure_convex(h: &PiecewiseTrig) -> Result<(), CurveError> {
    let report = is_trig_convex(h);
    if report.convex {
        return Ok(());
    }
    let worst = report
        .jumps
        .iter()
        .min_by(|a, b| a.jump.total_cmp(&b.jump))
        .expect("non-convex verdict implies a jump");
    Err(CurveError::NotConvex {
        location: worst.location,
        jump: worst.jump,
    })
}

/// Trace the curve over a stretched-parameter window (at most four stretched
/// periods, i.e. `8 pi rho` wide).
pub fn build_curve(
    h: &PiecewiseTrig,
    window: (f64, f64),
) -> Result<LocallyConvexPolygon, CurveError> {
    ensure_convex(h)?;
    let rho = h.rho_value();
    let (w0, w1) = window;
    if !(w1 > w0) {
        return Err(CurveError::Invalid(format!(
            "empty parameter window ({w0}, {w1})"
        )));
    }
    if w1 - w0 > 8.0 * PI * rho + 1e-9 {
        return Err(CurveError::Invalid(format!(
            "parameter window wider than four stretched periods ({} > {})",
            w1 - w0,
            8.0 * PI * rho
        )));
    }
    let measure = measure_of(h)?;
    debug_assert_eq!(measure.len(), h.breakpoints().len());

    let period = TAU * rho;
    // All derivative-jump parameters inside the window.
    let mut jump_sites: Vec<(f64, f64)> = Vec::new(); // (sigma, mass)
    for (bp, atom) in h.breakpoints().iter().zip(measure.atoms()) {
        debug_assert!((bp - atom.angle).abs() <= 1e-9);
        let s0 = rho * bp;
        let k0 = ((w0 - s0) / period).floor() as i64 - 1;
        let k1 = ((w1 - s0) / period).ceil() as i64 + 1;
        for k in k0..=k1 {
            let s = s0 + period * k as f64;
            if s >= w0 - 1e-12 && s <= w1 + 1e-12 {
                jump_sites.push((s, atom.mass));
            }
        }
    }
    jump_sites.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut edges = Vec::with_capacity(jump_sites.len());
    for &(sigma, mass) in &jump_sites {
        let t = sigma / rho;
        let from = h.coeff_in_frame_sided(t, Side::Left).point();
        let to = h.coeff_in_frame_sided(t, Side::Right).point();
        let (s, c) = sigma.sin_cos();
        let direction = Point::new(-s, c);
        let length = TAU * mass;
        debug_assert!(
            to.sub(from).sub(direction.scale(length)).norm() <= 1e-9 * (1.0 + length),
            "edge vector disagrees with jump data at sigma = {sigma}"
        );
        edges.push(Edge {
            sigma,
            from,
            to,
            direction,
            length,
        });
    }

    let mut boundaries = Vec::with_capacity(edges.len() + 2);
    boundaries.push(w0);
    boundaries.extend(edges.iter().map(|e| e.sigma));
    boundaries.push(w1);
    let mut vertices = Vec::new();
    for pair in boundaries.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        if hi - lo <= 1e-12 {
            continue;
        }
        let mid = 0.5 * (lo + hi);
        vertices.push(Vertex {
            point: stretched_vertex(h, mid, Side::Left),
            sigma_from: lo,
            sigma_to: hi,
        });
    }
    if vertices.is_empty() {
        // Window degenerated onto a single jump; still report the point.
        vertices.push(Vertex {
            point: stretched_vertex(h, w0, Side::Right),
            sigma_from: w0,
            sigma_to: w1,
        });
    }
    Ok(LocallyConvexPolygon {
        rho,
        window,
        vertices,
        edges,
    })
}

/// The smallest disk enclosing the vertex set of the one-turn sub-arc
/// `(alpha - 2pi, alpha)` of the stretched curve.
pub fn local_circumradius(h: &PiecewiseTrig, alpha: f64) -> Result<Circle, CurveError> {
    ensure_convex(h)?;
    Ok(subarc_disk(h, alpha).0)
}

/// Circumdisk and vertex list of the sub-arc `(alpha - 2pi, alpha)`.
fn subarc_disk(h: &PiecewiseTrig, alpha: f64) -> (Circle, Vec<Point>) {
    let rho = h.rho_value();
    let period = TAU * rho;
    // Unrolled jump parameters strictly inside the open window.
    let mut inner: Vec<f64> = Vec::new();
    for &bp in h.breakpoints() {
        let s0 = rho * bp;
        let k0 = ((alpha - TAU - s0) / period).floor() as i64 - 1;
        let k1 = ((alpha - s0) / period).ceil() as i64 + 1;
        for k in k0..=k1 {
            let s = s0 + period * k as f64;
            if s > alpha - TAU + 1e-12 && s < alpha - 1e-12 {
                inner.push(s);
            }
        }
    }
    inner.sort_by(f64::total_cmp);
    let mut bounds = Vec::with_capacity(inner.len() + 2);
    bounds.push(alpha - TAU);
    bounds.extend(inner);
    bounds.push(alpha);
    let mut points = Vec::with_capacity(bounds.len() - 1);
    for pair in bounds.windows(2) {
        let mid = 0.5 * (pair[0] + pair[1]);
        points.push(stretched_vertex(h, mid, Side::Left));
    }
    (min_enclosing_circle(&points), points)
}

/// Complex moment of the sub-arc `(alpha - 2pi, alpha)`:
/// `S(alpha) = sum m_j exp(i (sigma_j - alpha))` over the unrolled atoms
/// strictly inside the window. At a nest, `Im S = 0` and `Re S <= 0`;
/// returned as `(re, im)` for cross-checking.
pub fn nest_moment_sum(h: &PiecewiseTrig, alpha: f64) -> Result<(f64, f64), CurveError> {
    ensure_convex(h)?;
    let rho = h.rho_value();
    let period = TAU * rho;
    let measure = measure_of(h)?;
    let mut re = 0.0;
    let mut im = 0.0;
    for atom in measure.atoms() {
        let s0 = rho * atom.angle;
        let k0 = ((alpha - TAU - s0) / period).floor() as i64 - 1;
        let k1 = ((alpha - s0) / period).ceil() as i64 + 1;
        for k in k0..=k1 {
            let s = s0 + period * k as f64;
            if s > alpha - TAU + 1e-12 && s < alpha - 1e-12 {
                let (si, co) = (s - alpha).sin_cos();
                re += atom.mass * co;
                im += atom.mass * si;
            }
        }
    }
    Ok((re, im))
}

/// Enumerate all nests of the curve, one per distinct circumdisk, sorted by
/// closing parameter `alpha` in `[0, 2 pi rho)`.
///
/// Candidates are the closed-form zeros of the closure gap
/// `d(sigma) = h~(sigma - 2pi) - h~(sigma)` on each interval between
/// breakpoint events (where `d` is a single sinusoid), plus whole intervals
/// where `d` vanishes identically (represented by their endpoints and
/// midpoint). A candidate is a nest when the one-sided slopes close
/// correctly: `h~'_+(alpha - 2pi) >= h~'_-(alpha)`.
pub fn enumerate_nests(h: &PiecewiseTrig) -> Result<Vec<Nest>, CurveError> {
    ensure_convex(h)?;
    let rho = h.rho_value();
    let period = TAU * rho;

    let mut events: Vec<f64> = Vec::new();
    for &bp in h.breakpoints() {
        let s = rho * bp;
        events.push(wrap_period(s, period));
        events.push(wrap_period(s + TAU, period));
    }
    events.sort_by(f64::total_cmp);
    events.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    if events.len() >= 2 && events[0] + period - events[events.len() - 1] <= 1e-12 {
        events.pop();
    }

    let mut candidates: Vec<f64> = Vec::new();
    if events.is_empty() {
        // Pure curve: every parameter closes; two representatives of the
        // same (single-point) disk.
        candidates.push(0.0);
        candidates.push(period / 2.0);
    } else {
        let n = events.len();
        for i in 0..n {
            let lo = events[i];
            let hi = if i + 1 < n {
                events[i + 1]
            } else {
                events[0] + period
            };
            let mid = 0.5 * (lo + hi);
            let p = stretched_vertex(h, mid - TAU, Side::Left);
            let q = stretched_vertex(h, mid, Side::Left);
            let diff = p.sub(q);
            let scale = 1.0 + p.norm() + q.norm();
            if diff.norm() <= 1e-12 * scale {
                candidates.extend([lo, mid, hi]);
                continue;
            }
            // d(sigma) = diff . (cos sigma, sin sigma) = |diff| cos(sigma - psi).
            let psi = diff.arg();
            let k0 = ((lo - psi) / PI - 0.5).floor() as i64 - 1;
            let k1 = ((hi - psi) / PI - 0.5).ceil() as i64 + 1;
            for k in k0..=k1 {
                let z = psi + PI / 2.0 + k as f64 * PI;
                if z >= lo - 1e-12 && z <= hi + 1e-12 {
                    candidates.push(z.clamp(lo, hi));
                }
            }
        }
    }

    let mut nests: Vec<Nest> = Vec::new();
    for &sigma in &candidates {
        let alpha = wrap_period(sigma, period);
        // Closure of the values.
        let p = stretched_vertex(h, alpha - TAU, Side::Right);
        let q = stretched_vertex(h, alpha, Side::Left);
        let (sa, ca) = alpha.sin_cos();
        let gap = (p.x - q.x) * ca + (p.y - q.y) * sa;
        if gap.abs() > VALUE_TOL * (1.0 + p.norm() + q.norm()) {
            continue;
        }
        // Closure of the slopes: right slope at the window start must not
        // fall below the left slope at the window end.
        let dr = h.deriv_right((alpha - TAU) / rho) / rho;
        let dl = h.deriv_left(alpha / rho) / rho;
        if dr < dl - VALUE_TOL {
            continue;
        }
        let (disk, vertices) = subarc_disk(h, alpha);
        nests.push(Nest {
            alpha,
            center: disk.center,
            radius: disk.radius,
            vertices,
        });
    }

    nests.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
    let mut unique: Vec<Nest> = Vec::new();
    for nest in nests {
        let dup = unique.iter().any(|u| {
            u.center.dist(nest.center) <= 1e-9 && (u.radius - nest.radius).abs() <= 1e-9
        });
        if !dup {
            unique.push(nest);
        }
    }
    Ok(unique)
}

/// Critical zero type with its centering shift.
///
/// Non-integer order: `sigma_Z = max h`, shift zero (no type-preserving
/// sinusoid exists). Integer order: the radius of the smallest circle
/// enclosing the curve's vertex set, with the shift translating its center
/// to the origin.
pub fn sigma_z(h: &PiecewiseTrig) -> Result<(f64, Point), CurveError> {
    ensure_convex(h)?;
    if !h.order().is_integer() {
        return Ok((max_and_argmax(h).value, Point::ORIGIN));
    }
    let points: Vec<Point> = h.pieces().iter().map(|c| c.point()).collect();
    let disk = min_enclosing_circle(&points);
    Ok((disk.radius, disk.center.scale(-1.0)))
}

/// Largest local circumradius over all nests (`r_loc^*`): the critical
/// uniqueness type `sigma_U`.
pub fn r_loc_star(h: &PiecewiseTrig) -> Result<f64, CurveError> {
    let nests = enumerate_nests(h)?;
    nests
        .iter()
        .map(|n| n.radius)
        .max_by(f64::total_cmp)
        .ok_or_else(|| CurveError::Invalid("curve has no nests".into()))
}

/// Alias for [`r_loc_star`]: the critical uniqueness type.
pub fn sigma_u(h: &PiecewiseTrig) -> Result<f64, CurveError> {
    r_loc_star(h)
}

/// Local balance test.
///
/// Centers the function (integer order) or takes it as is (non-integer),
/// computes the maximizer set `M` of the centered function, and searches for
/// a triple `alpha <= beta <= gamma` of maximizers (lifting `beta, gamma` by
/// full turns) with `beta - alpha` in `(0, pi/rho]`, `gamma - beta` in
/// `[0, pi/rho)` and `gamma - alpha >= pi/rho`. Such a triple exists exactly
/// when `sigma_U = sigma_Z`.
pub fn is_locally_balanced(h: &PiecewiseTrig) -> Result<BalanceReport, CurveError> {
    let (sz, shift) = sigma_z(h)?;
    let su = r_loc_star(h)?;
    let centered = if shift.norm() > 0.0 {
        add_trig(h, shift.x, shift.y)
    } else {
        h.clone()
    };
    let mm = max_and_argmax(&centered);
    let span = PI / h.rho_value();

    let (balanced, witness) = if !mm.intervals.is_empty() {
        // Flat maximum: only possible for the identically-centered (zero)
        // function, which is balanced with a degenerate witness.
        let start = mm.intervals[0].0;
        (true, Some((start, start + span, start + span)))
    } else {
        let mut found: Option<(f64, f64, f64)> = None;
        let mut lifted: Vec<f64> = Vec::with_capacity(mm.angles.len() * 3);
        for turn in 0..3 {
            lifted.extend(mm.angles.iter().map(|&a| a + TAU * turn as f64));
        }
        'outer: for &a in &mm.angles {
            for &b in &lifted {
                if !(b - a > 1e-12 && b - a <= span + 1e-9) {
                    continue;
                }
                for &g in &lifted {
                    if g >= b - 1e-12 && g - b < span && g - a >= span - 1e-9 {
                        found = Some((a, b, g));
                        break 'outer;
                    }
                }
            }
        }
        (found.is_some(), found)
    };

    Ok(BalanceReport {
        sigma_z: sz,
        sigma_u: su,
        shift,
        locally_balanced: balanced,
        maximizers: mm.angles,
        maximizer_intervals: mm.intervals,
        witness,
    })
}

/// Render a traced curve window (plus optional nests) to `"svg"` or `"csv"`.
///
/// CSV columns: `kind,x,y,angle,length,radius`. Vertex rows carry the
/// support point, the start and width of the supporting parameter interval,
/// and the distance to the origin; edge rows carry the start point, the jump
/// parameter, the edge length, and the signed distance `h~(sigma)` from the
/// origin to the edge line. The output is deterministic byte for byte.
pub fn export_curve(
    polygon: &LocallyConvexPolygon,
    nests: &[Nest],
    format: &str,
) -> Result<String, CurveError> {
    match format {
        "csv" => Ok(export_csv(polygon)),
        "svg" => Ok(export_svg(polygon, nests)),
        other => Err(CurveError::UnknownFormat(other.to_string())),
    }
}

fn export_csv(polygon: &LocallyConvexPolygon) -> String {
    let mut out = String::from("kind,x,y,angle,length,radius\n");
    for v in &polygon.vertices {
        out.push_str(&format!(
            "vertex,{:.12},{:.12},{:.12},{:.12},{:.12}\n",
            v.point.x,
            v.point.y,
            v.sigma_from,
            v.sigma_to - v.sigma_from,
            v.point.norm()
        ));
    }
    for e in &polygon.edges {
        let support = e.from.x * e.sigma.cos() + e.from.y * e.sigma.sin();
        out.push_str(&format!(
            "edge,{:.12},{:.12},{:.12},{:.12},{:.12}\n",
            e.from.x, e.from.y, e.sigma, e.length, support
        ));
    }
    out
}

fn polyline_points(polygon: &LocallyConvexPolygon) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::new();
    let mut push = |p: Point| {
        if pts.last().map_or(true, |q| q.dist(p) > 1e-12) {
            pts.push(p);
        }
    };
    let mut edge_iter = polygon.edges.iter().peekable();
    for v in &polygon.vertices {
        push(v.point);
        while let Some(e) = edge_iter.peek() {
            if e.sigma <= v.sigma_to + 1e-12 {
                push(e.from);
                push(e.to);
                edge_iter.next();
            } else {
                break;
            }
        }
    }
    for e in edge_iter {
        push(e.from);
        push(e.to);
    }
    pts
}

fn export_svg(polygon: &LocallyConvexPolygon, nests: &[Nest]) -> String {
    let pts = polyline_points(polygon);
    let mut min_x = f64::INFINITY;
    let mut min_y = f64::INFINITY;
    let mut max_x = f64::NEG_INFINITY;
    let mut max_y = f64::NEG_INFINITY;
    let mut extend = |x: f64, y: f64, r: f64| {
        min_x = min_x.min(x - r);
        min_y = min_y.min(y - r);
        max_x = max_x.max(x + r);
        max_y = max_y.max(y + r);
    };
    extend(0.0, 0.0, 0.0);
    for p in &pts {
        extend(p.x, p.y, 0.0);
    }
    for n in nests {
        extend(n.center.x, n.center.y, n.radius);
    }
    let span = (max_x - min_x).max(max_y - min_y).max(1e-6);
    let margin = 0.08 * span;
    let (x0, y0) = (min_x - margin, min_y - margin);
    let (w, hgt) = (max_x - min_x + 2.0 * margin, max_y - min_y + 2.0 * margin);
    let stroke = 0.006 * span;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" data-uct-version=\"1\" \
         viewBox=\"{x0:.6} {y0:.6} {w:.6} {hgt:.6}\" width=\"640\" height=\"640\">\n"
    ));
    // Flip the y axis so the mathematical orientation reads correctly.
    out.push_str(&format!(
        "  <g transform=\"translate(0,{:.6}) scale(1,-1)\">\n",
        2.0 * y0 + hgt
    ));
    out.push_str(&format!(
        "    <line x1=\"{:.6}\" y1=\"0\" x2=\"{:.6}\" y2=\"0\" stroke=\"#bbbbbb\" stroke-width=\"{:.6}\"/>\n",
        x0, x0 + w, 0.5 * stroke
    ));
    out.push_str(&format!(
        "    <line x1=\"0\" y1=\"{:.6}\" x2=\"0\" y2=\"{:.6}\" stroke=\"#bbbbbb\" stroke-width=\"{:.6}\"/>\n",
        y0, y0 + hgt, 0.5 * stroke
    ));
    for n in nests {
        out.push_str(&format!(
            "    <circle class=\"nest\" data-alpha=\"{:.6}\" cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" \
             fill=\"none\" stroke=\"#d08a00\" stroke-width=\"{:.6}\" stroke-dasharray=\"{:.6} {:.6}\"/>\n",
            n.alpha,
            n.center.x,
            n.center.y,
            n.radius.max(0.002 * span),
            stroke,
            2.0 * stroke,
            2.0 * stroke
        ));
    }
    if pts.len() > 1 {
        let coords: Vec<String> = pts.iter().map(|p| format!("{:.6},{:.6}", p.x, p.y)).collect();
        out.push_str(&format!(
            "    <polyline points=\"{}\" fill=\"none\" stroke=\"#1f5fbf\" stroke-width=\"{:.6}\" \
             stroke-linejoin=\"round\"/>\n",
            coords.join(" "),
            stroke
        ));
    }
    for p in &pts {
        out.push_str(&format!(
            "    <circle cx=\"{:.6}\" cy=\"{:.6}\" r=\"{:.6}\" fill=\"#1f5fbf\"/>\n",
            p.x,
            p.y,
            1.5 * stroke
        ));
    }
    out.push_str("  </g>\n</svg>\n");
    out
}

/// Convenience: wrap any angle into `[0, 2pi)` (re-exported for callers
/// assembling reports).
pub fn wrap_to_circle(t: f64) -> f64 {
    wrap_angle(t)
}
