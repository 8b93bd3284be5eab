//! Orders, finite atomic angular densities, the moment (Lindelöf) defect,
//! and the JSON measure format.
//!
//! An *order* is a real `rho > 1/2`, optionally tagged with an exact rational
//! representation. An *atomic measure* is a finite list of `(angle, mass)`
//! atoms on the circle, kept in a canonical normalized form: angles wrapped
//! into `[0, 2pi)` and sorted, atoms closer than [`ANGLE_TOL`] merged by
//! summing their masses, zero-mass atoms dropped.
//!
//! For integer orders the *moment defect* `sum_j m_j e^{i rho phi_j}` decides
//! whether the usual growth machinery applies: the measure is *regular* when
//! the defect vanishes (within [`REGULARITY_TOL`]). Non-integer orders are
//! always regular; the defect is still reported for diagnostics.

use std::f64::consts::{PI, TAU};

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::tol::{ANGLE_TOL, REGULARITY_TOL};

/// Errors from measure construction and the JSON format.
#[derive(Debug, Clone, Error)]
pub enum MeasureError {
    /// An atom carried a negative mass.
    #[error("atom {index} has negative mass {mass}")]
    NegativeMass { index: usize, mass: f64 },
    /// The input text violated the measure format; `context` names the
    /// offending location (field path or line info), `detail` says what is
    /// wrong with it.
    #[error("measure format error at {context}: {detail}")]
    FormatError { context: String, detail: String },
    /// The order was not a real number greater than 1/2.
    #[error("order rho = {value} is out of range: rho > 1/2 is required")]
    OrderOutOfRange { value: f64 },
}

fn format_err(context: impl Into<String>, detail: impl Into<String>) -> MeasureError {
    MeasureError::FormatError {
        context: context.into(),
        detail: detail.into(),
    }
}

/// Growth order `rho > 1/2`, optionally with an exact rational form.
///
/// The integer/non-integer distinction switches formulas elsewhere in the
/// crate, so it must be unambiguous: a float within 1e-12 of an integer is
/// snapped to that integer, and a supplied rational `p/q` (kept in lowest
/// terms) overrides the float entirely.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Order {
    value: f64,
    rational: Option<(u64, u64)>,
}

impl Order {
    /// Order from a float. Snaps to the nearest integer when within 1e-12.
    pub fn new(value: f64) -> Result<Self, MeasureError> {
        if !value.is_finite() || value <= 0.5 {
            return Err(MeasureError::OrderOutOfRange { value });
        }
        let nearest = value.round();
        if (value - nearest).abs() <= 1e-12 && nearest >= 1.0 {
            Ok(Order {
                value: nearest,
                rational: Some((nearest as u64, 1)),
            })
        } else {
            Ok(Order {
                value,
                rational: None,
            })
        }
    }

    /// Order from an exact rational `num/den`.
    pub fn from_rational(num: u64, den: u64) -> Result<Self, MeasureError> {
        if den == 0 {
            return Err(format_err("rho", "denominator must be nonzero"));
        }
        let value = num as f64 / den as f64;
        if !(value > 0.5) {
            return Err(MeasureError::OrderOutOfRange { value });
        }
        let g = gcd(num, den);
        Ok(Order {
            value,
            rational: Some((num / g, den / g)),
        })
    }

    /// The order as a float. Exact for integer and rational orders.
    pub fn value(&self) -> f64 {
        self.value
    }

    /// The reduced rational form, when one is known.
    pub fn rational(&self) -> Option<(u64, u64)> {
        self.rational
    }

    /// Whether this order is an integer (decided exactly; float inputs were
    /// snapped at construction).
    pub fn is_integer(&self) -> bool {
        matches!(self.rational, Some((_, 1)))
    }

    /// The integer value for integer orders.
    pub fn as_integer(&self) -> Option<u64> {
        match self.rational {
            Some((p, 1)) => Some(p),
            _ => None,
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// One atom of an angular density: a point mass `mass` at direction `angle`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    /// Direction in `[0, 2pi)`.
    pub angle: f64,
    /// Mass, strictly positive in normalized measures.
    pub mass: f64,
}

/// A finite atomic measure on the circle, in canonical form (see module
/// docs). Construct through [`AtomicMeasure::new`] or [`normalize`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AtomicMeasure {
    atoms: Vec<Atom>,
}

impl AtomicMeasure {
    /// The zero measure.
    pub fn empty() -> Self {
        AtomicMeasure { atoms: Vec::new() }
    }

    /// Normalize raw `(angle, mass)` pairs into a canonical measure.
    ///
    /// Angles are wrapped into `[0, 2pi)`, atoms are sorted by angle, atoms
    /// within [`ANGLE_TOL`] of each other merge by summing masses (the first
    /// angle encountered in sorted order represents the cluster), and atoms
    /// of zero mass are dropped. Negative masses are rejected; `index`
    /// reports the input position.
    pub fn new(raw: impl IntoIterator<Item = (f64, f64)>) -> Result<Self, MeasureError> {
        let mut atoms: Vec<Atom> = Vec::new();
        for (index, (angle, mass)) in raw.into_iter().enumerate() {
            if !mass.is_finite() || mass < 0.0 {
                return Err(MeasureError::NegativeMass { index, mass });
            }
            if !angle.is_finite() {
                return Err(format_err(
                    format!("atoms[{index}].angle"),
                    format!("angle {angle} is not finite"),
                ));
            }
            atoms.push(Atom {
                angle: wrap_angle(angle),
                mass,
            });
        }
        atoms.sort_by(|p, q| p.angle.total_cmp(&q.angle));

        // Merge clusters, including the wrap-around pair (last ~ first+2pi).
        let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
        for atom in atoms {
            match merged.last_mut() {
                Some(prev) if atom.angle - prev.angle <= ANGLE_TOL => prev.mass += atom.mass,
                _ => merged.push(atom),
            }
        }
        if merged.len() >= 2 {
            let first = merged[0];
            let last = *merged.last().expect("len >= 2");
            if first.angle + TAU - last.angle <= ANGLE_TOL {
                merged[0].mass += last.mass;
                merged.pop();
            }
        }
        merged.retain(|a| a.mass > 0.0);
        Ok(AtomicMeasure { atoms: merged })
    }

    /// The atoms, sorted by angle in `[0, 2pi)`.
    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    /// Number of atoms.
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    /// Whether this is the zero measure.
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass.
    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Sum of measures (normalized).
    pub fn plus(&self, other: &AtomicMeasure) -> AtomicMeasure {
        let raw = self
            .atoms
            .iter()
            .chain(other.atoms.iter())
            .map(|a| (a.angle, a.mass));
        AtomicMeasure::new(raw).expect("sum of normalized measures is normalizable")
    }

    /// Smallest circular gap between consecutive atoms; `TAU` for fewer than
    /// two atoms.
    pub fn min_circular_gap(&self) -> f64 {
        if self.atoms.len() < 2 {
            return TAU;
        }
        let mut min_gap = f64::INFINITY;
        for i in 0..self.atoms.len() {
            let next = (i + 1) % self.atoms.len();
            let mut gap = self.atoms[next].angle - self.atoms[i].angle;
            if next == 0 {
                gap += TAU;
            }
            min_gap = min_gap.min(gap);
        }
        min_gap
    }
}

/// Wrap an angle into `[0, 2pi)`.
pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    // rem_euclid can return TAU itself when t is a tiny negative number.
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Normalize raw pairs into a canonical measure (free-function form of
/// [`AtomicMeasure::new`]).
pub fn normalize(raw: &[(f64, f64)]) -> Result<AtomicMeasure, MeasureError> {
    AtomicMeasure::new(raw.iter().copied())
}

/// The moment defect of a measure at a given order, with the regularity
/// verdict baked in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LindelofDefect {
    /// Real part of `sum_j m_j e^{i rho phi_j}`.
    pub re: f64,
    /// Imaginary part of the same sum.
    pub im: f64,
    /// Tolerance the verdict used.
    pub tolerance: f64,
    /// True when the order is non-integer (the defect is then immaterial) or
    /// the defect modulus is within tolerance.
    pub regular: bool,
}

impl LindelofDefect {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

/// Compute the moment defect `sum_j m_j e^{i rho phi_j}` and the regularity
/// verdict for `measure` at order `rho`.
pub fn lindelof_defect(measure: &AtomicMeasure, rho: &Order) -> LindelofDefect {
    let r = rho.value();
    let (mut re, mut im) = (0.0, 0.0);
    for atom in measure.atoms() {
        let (s, c) = (r * atom.angle).sin_cos();
        re += atom.mass * c;
        im += atom.mass * s;
    }
    let regular = !rho.is_integer() || re.hypot(im) <= REGULARITY_TOL;
    LindelofDefect {
        re,
        im,
        tolerance: REGULARITY_TOL,
        regular,
    }
}

// ---------------------------------------------------------------------------
// JSON measure format
// ---------------------------------------------------------------------------

/// Parse the JSON measure format.
///
/// The document is an object with exactly the keys `rho` and `atoms`:
///
/// - `rho`: either a number, or an object `{"num": p, "den": q}` of positive
///   integers for an exact rational order.
/// - `atoms`: an array of objects, each with exactly one of `angle` |
///   `angle_over_pi` and exactly one of `mass` | `mass_times_2pi`.
///
/// Unknown keys are rejected, with the field path in the error.
pub fn parse_measure(text: &str) -> Result<(Order, AtomicMeasure), MeasureError> {
    let value: Value = serde_json::from_str(text).map_err(|e| {
        format_err(
            format!("line {}, column {}", e.line(), e.column()),
            format!("invalid JSON: {e}"),
        )
    })?;
    let top = value
        .as_object()
        .ok_or_else(|| format_err("top level", "expected a JSON object"))?;
    reject_unknown_keys(top, &["rho", "atoms"], "top level")?;

    let rho_value = top
        .get("rho")
        .ok_or_else(|| format_err("top level", "missing required key \"rho\""))?;
    let rho = parse_order(rho_value)?;

    let atoms_value = top
        .get("atoms")
        .ok_or_else(|| format_err("top level", "missing required key \"atoms\""))?;
    let atoms = atoms_value
        .as_array()
        .ok_or_else(|| format_err("atoms", "expected an array"))?;

    let mut raw: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (i, entry) in atoms.iter().enumerate() {
        let ctx = format!("atoms[{i}]");
        let obj = entry
            .as_object()
            .ok_or_else(|| format_err(&ctx, "expected an object"))?;
        reject_unknown_keys(
            obj,
            &["angle", "angle_over_pi", "mass", "mass_times_2pi"],
            &ctx,
        )?;

        let angle = exactly_one_numeric(obj, "angle", "angle_over_pi", &ctx)?;
        let angle = match angle {
            (Field::First, v) => v,
            (Field::Second, v) => v * PI,
        };
        let mass = exactly_one_numeric(obj, "mass", "mass_times_2pi", &ctx)?;
        let mass = match mass {
            (Field::First, v) => v,
            (Field::Second, v) => v / TAU,
        };
        if mass < 0.0 {
            return Err(MeasureError::NegativeMass {
                index: i,
                mass,
            });
        }
        raw.push((angle, mass));
    }
    let measure = AtomicMeasure::new(raw)?;
    Ok((rho, measure))
}

enum Field {
    First,
    Second,
}

fn exactly_one_numeric(
    obj: &Map<String, Value>,
    a: &str,
    b: &str,
    ctx: &str,
) -> Result<(Field, f64), MeasureError> {
    match (obj.get(a), obj.get(b)) {
        (Some(_), Some(_)) => Err(format_err(
            ctx,
            format!("keys \"{a}\" and \"{b}\" are mutually exclusive"),
        )),
        (None, None) => Err(format_err(
            ctx,
            format!("exactly one of \"{a}\" or \"{b}\" is required"),
        )),
        (Some(v), None) => Ok((Field::First, as_finite_number(v, &format!("{ctx}.{a}"))?)),
        (None, Some(v)) => Ok((Field::Second, as_finite_number(v, &format!("{ctx}.{b}"))?)),
    }
}

fn as_finite_number(v: &Value, ctx: &str) -> Result<f64, MeasureError> {
    let n = v
        .as_f64()
        .ok_or_else(|| format_err(ctx, "expected a number"))?;
    if !n.is_finite() {
        return Err(format_err(ctx, "expected a finite number"));
    }
    Ok(n)
}

fn reject_unknown_keys(
    obj: &Map<String, Value>,
    allowed: &[&str],
    ctx: &str,
) -> Result<(), MeasureError> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(format_err(
                format!("{ctx}.{key}"),
                format!("unknown key \"{key}\" (allowed: {})", allowed.join(", ")),
            ));
        }
    }
    Ok(())
}

fn parse_order(v: &Value) -> Result<Order, MeasureError> {
    match v {
        Value::Number(_) => Order::new(as_finite_number(v, "rho")?),
        Value::Object(obj) => {
            reject_unknown_keys(obj, &["num", "den"], "rho")?;
            let num = rho_component(obj, "num")?;
            let den = rho_component(obj, "den")?;
            Order::from_rational(num, den)
        }
        _ => Err(format_err(
            "rho",
            "expected a number or an object {\"num\", \"den\"}",
        )),
    }
}

fn rho_component(obj: &Map<String, Value>, key: &str) -> Result<u64, MeasureError> {
    obj.get(key)
        .and_then(Value::as_u64)
        .filter(|&n| n > 0)
        .ok_or_else(|| format_err(format!("rho.{key}"), "expected a positive integer"))
}

/// The canonical JSON value for an order: a number, or `{"num", "den"}` for
/// an exact non-integer rational.
pub fn order_to_json(rho: &Order) -> Value {
    match rho.rational() {
        Some((p, q)) if q != 1 => json!({ "den": q, "num": p }),
        _ => json!(rho.value()),
    }
}

/// The canonical JSON value for an order/measure pair, `parse_measure`-ready:
/// sorted keys, `angle`/`mass` fields only.
pub fn measure_to_json(rho: &Order, measure: &AtomicMeasure) -> Value {
    let atoms: Vec<Value> = measure
        .atoms()
        .iter()
        .map(|a| json!({ "angle": a.angle, "mass": a.mass }))
        .collect();
    json!({ "atoms": atoms, "rho": order_to_json(rho) })
}

/// Serialize an order and measure to the canonical JSON form: sorted keys,
/// `angle`/`mass` fields only, pretty-printed. `parse_measure` of the output
/// reproduces the inputs exactly up to float round-trip.
pub fn serialize_measure(rho: &Order, measure: &AtomicMeasure) -> String {
    let mut text = serde_json::to_string_pretty(&measure_to_json(rho, measure))
        .expect("JSON encoding cannot fail");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_accepts_and_rejects() {
        assert!(Order::new(0.6).is_ok());
        assert!(Order::new(0.5).is_err());
        assert!(Order::new(0.2).is_err());
        assert!(Order::new(f64::NAN).is_err());
        assert!(Order::new(f64::INFINITY).is_err());
        assert!(Order::from_rational(1, 2).is_err());
        assert!(Order::from_rational(3, 0).is_err());
    }

    #[test]
    fn order_integrality() {
        assert!(Order::new(2.0).unwrap().is_integer());
        assert_eq!(Order::new(2.0).unwrap().as_integer(), Some(2));
        // Snapping: a float within 1e-12 of an integer becomes that integer.
        let snapped = Order::new(3.0 + 4e-13).unwrap();
        assert!(snapped.is_integer());
        assert_eq!(snapped.value(), 3.0);
        assert!(!Order::new(2.5).unwrap().is_integer());
        assert!(!Order::from_rational(5, 2).unwrap().is_integer());
        assert!(Order::from_rational(4, 2).unwrap().is_integer());
        assert_eq!(Order::from_rational(4, 2).unwrap().rational(), Some((2, 1)));
    }

    #[test]
    fn normalize_wraps_sorts_merges_drops() {
        // Angles land in [0, 2pi) sorted; near-duplicates merge; zero mass drops.
        let m = normalize(&[
            (7.0, 0.25),               // wraps to 7 - 2pi ~ 0.7168
            (-0.1, 0.5),               // wraps to 2pi - 0.1
            (0.7168146928204138, 0.25), // merges with the wrapped 7.0
            (1.0, 0.0),                // dropped
        ])
        .unwrap();
        assert_eq!(m.len(), 2);
        assert!((m.atoms()[0].angle - (7.0 - TAU)).abs() <= 1e-12);
        assert!((m.atoms()[0].mass - 0.5).abs() < 1e-15);
        assert!((m.atoms()[1].angle - (TAU - 0.1)).abs() <= 1e-12);

        // Wrap-around merge: 2pi - eps and 0 are the same direction.
        let m = normalize(&[(TAU - 1e-13, 1.0), (0.0, 1.0)]).unwrap();
        assert_eq!(m.len(), 1);
        assert!((m.atoms()[0].mass - 2.0).abs() < 1e-15);
    }

    #[test]
    fn normalize_rejects_negative_mass() {
        let err = normalize(&[(0.0, 1.0), (1.0, -0.5)]).unwrap_err();
        match err {
            MeasureError::NegativeMass { index, mass } => {
                assert_eq!(index, 1);
                assert_eq!(mass, -0.5);
            }
            other => panic!("expected NegativeMass, got {other:?}"),
        }
    }

    #[test]
    fn normalize_is_idempotent() {
        let m = normalize(&[(3.0, 0.5), (1.0, 0.25), (1.0 + 5e-13, 0.25)]).unwrap();
        let again =
            AtomicMeasure::new(m.atoms().iter().map(|a| (a.angle, a.mass))).unwrap();
        assert_eq!(m, again);
    }

    #[test]
    fn defect_examples() {
        // Triangle at order 2: equal masses 2pi/3 apart are regular.
        let m = normalize(&[
            (0.0, 0.5),
            (2.0 * PI / 3.0, 0.5),
            (4.0 * PI / 3.0, 0.5),
        ])
        .unwrap();
        let rho = Order::new(2.0).unwrap();
        let d = lindelof_defect(&m, &rho);
        assert!(d.modulus() <= 1e-12);
        assert!(d.regular);

        // Knock one mass out of balance: irregular at integer order...
        let m2 = normalize(&[
            (0.0, 0.6),
            (2.0 * PI / 3.0, 0.5),
            (4.0 * PI / 3.0, 0.5),
        ])
        .unwrap();
        let d2 = lindelof_defect(&m2, &rho);
        assert!((d2.modulus() - 0.1).abs() < 1e-12);
        assert!(!d2.regular);

        // ...but any non-integer order is regular regardless of the defect.
        let rho_frac = Order::new(1.5).unwrap();
        let d3 = lindelof_defect(&m2, &rho_frac);
        assert!(d3.regular);
        assert!(d3.modulus() > 0.0);
    }

    #[test]
    fn defect_is_additive() {
        let rho = Order::new(3.0).unwrap();
        let a = normalize(&[(0.3, 1.0), (2.0, 0.7)]).unwrap();
        let b = normalize(&[(1.1, 0.4), (4.4, 0.9)]).unwrap();
        let da = lindelof_defect(&a, &rho);
        let db = lindelof_defect(&b, &rho);
        let dsum = lindelof_defect(&a.plus(&b), &rho);
        assert!((da.re + db.re - dsum.re).abs() < 1e-12);
        assert!((da.im + db.im - dsum.im).abs() < 1e-12);
    }

    #[test]
    fn parse_minimal_and_variants() {
        let (rho, m) = parse_measure(
            r#"{"rho": 0.75, "atoms": [
                {"angle": 1.0, "mass": 0.5},
                {"angle_over_pi": 1.5, "mass_times_2pi": 3.0}
            ]}"#,
        )
        .unwrap();
        assert_eq!(rho.value(), 0.75);
        assert_eq!(m.len(), 2);
        assert!((m.atoms()[0].angle - 1.0).abs() < 1e-15);
        assert!((m.atoms()[0].mass - 0.5).abs() < 1e-15);
        assert!((m.atoms()[1].angle - 1.5 * PI).abs() < 1e-15);
        assert!((m.atoms()[1].mass - 3.0 / TAU).abs() < 1e-15);
    }

    #[test]
    fn parse_rational_order() {
        let (rho, _) = parse_measure(r#"{"rho": {"num": 3, "den": 2}, "atoms": []}"#).unwrap();
        assert_eq!(rho.value(), 1.5);
        assert_eq!(rho.rational(), Some((3, 2)));
        assert!(!rho.is_integer());
    }

    #[test]
    fn parse_rejections_carry_context() {
        // Unknown key at an atom.
        let err = parse_measure(r#"{"rho": 1.0, "atoms": [{"angle": 0, "mass": 1, "angel": 2}]}"#)
            .unwrap_err();
        let text = err.to_string();
        assert!(text.contains("atoms[0]"), "missing context: {text}");
        assert!(text.contains("angel"), "missing key name: {text}");

        // Both angle spellings at once.
        let err = parse_measure(
            r#"{"rho": 1.0, "atoms": [{"angle": 0, "angle_over_pi": 0, "mass": 1}]}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("mutually exclusive"));

        // Neither mass spelling.
        let err = parse_measure(r#"{"rho": 1.0, "atoms": [{"angle": 0}]}"#).unwrap_err();
        assert!(err.to_string().contains("exactly one"));

        // Unknown top-level key.
        let err = parse_measure(r#"{"rho": 1.0, "atoms": [], "extra": 1}"#).unwrap_err();
        assert!(err.to_string().contains("extra"));

        // Syntax errors report position.
        let err = parse_measure("{\"rho\": 1.0,\n  \"atoms\": [}").unwrap_err();
        assert!(err.to_string().contains("line 2"));

        // Out-of-range order maps to the dedicated error.
        let err = parse_measure(r#"{"rho": 0.25, "atoms": []}"#).unwrap_err();
        assert!(matches!(err, MeasureError::OrderOutOfRange { .. }));

        // Negative mass maps to the dedicated error with the atom index.
        let err =
            parse_measure(r#"{"rho": 1.0, "atoms": [{"angle": 0, "mass": -2.0}]}"#).unwrap_err();
        assert!(matches!(err, MeasureError::NegativeMass { index: 0, .. }));
    }

    #[test]
    fn serialize_round_trips() {
        let rho = Order::from_rational(5, 2).unwrap();
        let m = normalize(&[(0.25, 0.5), (5.5, 1.25)]).unwrap();
        let text = serialize_measure(&rho, &m);
        let (rho2, m2) = parse_measure(&text).unwrap();
        assert_eq!(rho, rho2);
        assert_eq!(m, m2);
        // Canonical form is deterministic.
        assert_eq!(text, serialize_measure(&rho2, &m2));
    }
}
