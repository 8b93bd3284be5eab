//! Shared suite and raw-definition oracles for the integration tests.
//!
//! The suite is a fixed family of seeded regular measures spanning
//! sub-unit, fractional, and integer orders. The oracles recompute library
//! quantities straight from the definitions — windowed kernel sums and
//! one-sided finite differences — without touching the piecewise machinery
//! they are checked against.

#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use uct::measures::{AtomicMeasure, Order};
use uct::sample::random_regular_measure;
use uct::trigfun::{h_from_measure, PiecewiseTrig};

/// One suite entry: a regular measure, its order, and its function.
pub struct Instance {
    pub label: String,
    pub rho: Order,
    pub delta: AtomicMeasure,
    pub h: PiecewiseTrig,
}

/// A hundred seeded regular measures with 2-8 atoms across six orders
/// (integer orders start at 3 atoms: the moment constraints eat two degrees
/// of freedom).
pub fn suite() -> Vec<Instance> {
    let orders = [
        (0.6, 17),
        (0.75, 17),
        (1.5, 17),
        (2.0, 17),
        (2.5, 16),
        (3.0, 16),
    ];
    let mut out = Vec::new();
    for (oi, &(rv, count)) in orders.iter().enumerate() {
        let rho = Order::new(rv).expect("suite orders are valid");
        for i in 0..count {
            let n_atoms = if rho.is_integer() { 3 + i % 6 } else { 2 + i % 7 };
            let seed = 7000 * (oi as u64 + 1) + i as u64;
            let delta = random_regular_measure(&rho, n_atoms, seed);
            let h = h_from_measure(&delta, &rho).expect("suite measures are regular");
            out.push(Instance {
                label: format!("rho={rv} n={n_atoms} seed={seed}"),
                rho,
                delta,
                h,
            });
        }
    }
    out
}

/// Circular distance between two angles for the given period.
pub fn circ_dist(a: f64, b: f64, period: f64) -> f64 {
    let d = (a - b).rem_euclid(period);
    d.min(period - d)
}

/// The defining windowed kernel sum for the function of a measure at one
/// angle: every atom is lifted into `(theta - 2pi, theta]` and fed through
/// the non-integer cosine kernel or the integer `-(phi - theta) sin` kernel.
pub fn kernel_h(delta: &AtomicMeasure, rho: &Order, theta: f64) -> f64 {
    let rv = rho.value();
    let mut sum = 0.0;
    for atom in delta.atoms() {
        let phi = theta - (theta - atom.angle).rem_euclid(TAU);
        if rho.is_integer() {
            sum -= atom.mass * (phi - theta) * (rv * (phi - theta)).sin();
        } else {
            sum += atom.mass * (rv * (theta - phi - PI)).cos();
        }
    }
    if rho.is_integer() {
        sum
    } else {
        sum * PI / (PI * rv).sin()
    }
}

/// Second-order one-sided finite difference; `toward` is `+1.0` for the
/// right derivative, `-1.0` for the left.
pub fn fd_deriv(h: &PiecewiseTrig, t: f64, toward: f64) -> f64 {
    let eps = 1e-7 * toward;
    (4.0 * h.evaluate(t + eps) - 3.0 * h.evaluate(t) - h.evaluate(t + 2.0 * eps)) / (2.0 * eps)
}

/// Largest absolute value of `h` on a uniform grid, for tolerance scales.
pub fn sup_abs(h: &PiecewiseTrig, samples: usize) -> f64 {
    (0..samples)
        .map(|k| h.evaluate(TAU * k as f64 / samples as f64).abs())
        .fold(0.0, f64::max)
}
