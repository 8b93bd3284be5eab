//! Small planar geometry kit: points, circles, and the minimal enclosing
//! circle of a finite point set.

use serde::Serialize;

/// A point (or vector) in the support plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }

    pub fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(k * self.x, k * self.y)
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point) -> f64 {
        self.sub(o).norm()
    }

    /// Polar angle in `(-pi, pi]` (atan2 convention).
    pub fn arg(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Rotation by `angle` about the origin.
    pub fn rotate(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(self.x * c - self.y * s, self.x * s + self.y * c)
    }
}

/// A circle given by center and radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    pub fn contains(&self, p: Point, slack: f64) -> bool {
        self.center.dist(p) <= self.radius + slack
    }
}

/// Minimal enclosing circle of a finite point set.
///
/// Exhaustive over the one-, two-, and three-point candidate circles with a
/// deterministic lexicographic tie-break on `(radius, center.x, center.y)`.
/// The sets handled here are vertex lists of modest curves (tens of points),
/// where the quadratic/cubic candidate scan is instant and has no data-order
/// or randomization sensitivity.
///
/// Points closer than 1e-12 are treated as one point. The empty set maps to
/// the degenerate circle at the origin with radius 0.
pub fn min_enclosing_circle(points: &[Point]) -> Circle {
    let mut pts: Vec<Point> = Vec::with_capacity(points.len());
    for &p in points {
        if !pts.iter().any(|q| q.dist(p) <= 1e-12) {
            pts.push(p);
        }
    }
    match pts.len() {
        0 => {
            return Circle {
                center: Point::ORIGIN,
                radius: 0.0,
            }
        }
        1 => {
            return Circle {
                center: pts[0],
                radius: 0.0,
            }
        }
        _ => {}
    }

    // Containment slack scaled to the data so a candidate is never rejected
    // for pure roundoff, yet the reported radius is sharp to ~1e-12.
    let scale = pts
        .iter()
        .map(|p| p.norm())
        .fold(1.0f64, |acc, n| acc.max(n));
    let slack = 1e-12 * scale;

    let mut best: Option<Circle> = None;
    let mut consider = |c: Circle| {
        if !pts.iter().all(|&p| c.contains(p, slack)) {
            return;
        }
        let better = match &best {
            None => true,
            Some(b) => {
                (c.radius, c.center.x, c.center.y) < (b.radius - 1e-15, b.center.x, b.center.y)
                    || (c.radius - b.radius).abs() <= 1e-15
                        && (c.center.x, c.center.y) < (b.center.x, b.center.y)
            }
        };
        if better {
            best = Some(c);
        }
    };

    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            consider(circle_from_two(pts[i], pts[j]));
        }
    }
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            for k in (j + 1)..pts.len() {
                if let Some(c) = circle_from_three(pts[i], pts[j], pts[k]) {
                    consider(c);
                }
            }
        }
    }

    best.expect("two-point candidates always include an enclosing circle")
}

/// Smallest circle through two points: centered at their midpoint.
fn circle_from_two(a: Point, b: Point) -> Circle {
    let center = a.add(b).scale(0.5);
    Circle {
        center,
        radius: center.dist(a).max(center.dist(b)),
    }
}

/// Circumcircle of a (non-degenerate) triangle; `None` when the points are
/// too close to collinear for the circumcenter to be trustworthy. Collinear
/// triples are always covered by a two-point candidate, so dropping them
/// never loses the optimum.
fn circle_from_three(a: Point, b: Point, c: Point) -> Option<Circle> {
    let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    let span = a.dist(b).max(b.dist(c)).max(a.dist(c));
    if d.abs() <= 1e-14 * span.max(1.0) * span.max(1.0) {
        return None;
    }
    let na = a.x * a.x + a.y * a.y;
    let nb = b.x * b.x + b.y * b.y;
    let nc = c.x * c.x + c.y * c.y;
    let ux = (na * (b.y - c.y) + nb * (c.y - a.y) + nc * (a.y - b.y)) / d;
    let uy = (na * (c.x - b.x) + nb * (a.x - c.x) + nc * (b.x - a.x)) / d;
    let center = Point::new(ux, uy);
    let radius = center.dist(a).max(center.dist(b)).max(center.dist(c));
    Some(Circle { center, radius })
}
