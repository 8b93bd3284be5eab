//! Deterministic sample measures: worked fixtures and seeded random regular
//! measures for tests, demos, and benchmarks.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::measures::{lindelof_defect, normalize, AtomicMeasure, Order};

/// Equilateral triangle at order 2: three atoms of mass `1/(2 pi)` at
/// `0, 2pi/3, 4pi/3`. Not locally balanced; the classical surgery example.
pub fn fixture_triangle() -> (Order, AtomicMeasure) {
    let rho = Order::new(2.0).expect("2 is a valid order");
    let m = normalize(&[
        (0.0, 0.5 / PI),
        (2.0 * PI / 3.0, 0.5 / PI),
        (4.0 * PI / 3.0, 0.5 / PI),
    ])
    .expect("triangle fixture is valid");
    (rho, m)
}

/// Unit square at order 2: four atoms of mass `1/(2 pi)` at the quarter
/// angles. Locally balanced (the curve degenerates to a digon).
pub fn fixture_square() -> (Order, AtomicMeasure) {
    let rho = Order::new(2.0).expect("2 is a valid order");
    let m = normalize(&[
        (0.0, 0.5 / PI),
        (PI / 2.0, 0.5 / PI),
        (PI, 0.5 / PI),
        (3.0 * PI / 2.0, 0.5 / PI),
    ])
    .expect("square fixture is valid");
    (rho, m)
}

/// `sqrt(3) x 1` rectangle at order 3: masses `sqrt(3)/(2 pi)` on the
/// horizontal axis and `1/(2 pi)` on the vertical axis. Not locally
/// balanced; the type-minimizing completion needs the minimax search.
pub fn fixture_rectangle() -> (Order, AtomicMeasure) {
    let rho = Order::new(3.0).expect("3 is a valid order");
    let s3 = 3.0f64.sqrt();
    let m = normalize(&[
        (0.0, s3 / TAU),
        (PI / 2.0, 1.0 / TAU),
        (PI, s3 / TAU),
        (3.0 * PI / 2.0, 1.0 / TAU),
    ])
    .expect("rectangle fixture is valid");
    (rho, m)
}

/// A generic non-balanced measure at order `3/4`, exercising the one-atom
/// surgery of the sub-unit range.
pub fn fixture_small_rho() -> (Order, AtomicMeasure) {
    let rho = Order::from_rational(3, 4).expect("3/4 is a valid order");
    let m = normalize(&[(0.0, 0.5), (2.5, 0.8), (4.5, 0.35)])
        .expect("small-order fixture is valid");
    (rho, m)
}

/// A seeded random measure with `n_atoms` atoms, regular for the given
/// order: angles are separated by at least 0.05, masses lie in a moderate
/// range, and at integer order the last two masses are solved from the
/// moment constraints (rejection-sampling until the solution is
/// well-conditioned and positive). Deterministic in `(rho, n_atoms, seed)`.
///
/// Panics if `n_atoms` is 0, or less than 3 at integer order (two moment
/// constraints leave no freedom below that).
pub fn random_regular_measure(rho: &Order, n_atoms: usize, seed: u64) -> AtomicMeasure {
    assert!(n_atoms >= 1, "need at least one atom");
    if rho.is_integer() {
        assert!(
            n_atoms >= 3,
            "integer order needs at least three atoms for a nontrivial regular measure"
        );
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut angles: Vec<f64> = (0..n_atoms).map(|_| rng.random_range(0.0..TAU)).collect();
        angles.sort_by(f64::total_cmp);
        let min_gap = (0..n_atoms)
            .map(|i| {
                if i + 1 < n_atoms {
                    angles[i + 1] - angles[i]
                } else {
                    angles[0] + TAU - angles[n_atoms - 1]
                }
            })
            .fold(f64::INFINITY, f64::min);
        if n_atoms > 1 && min_gap < 0.05 {
            continue;
        }
        let mut masses: Vec<f64> = (0..n_atoms).map(|_| rng.random_range(0.2..1.0)).collect();
        if let Some(n) = rho.as_integer() {
            // Solve masses[n_atoms-2..] from
            //   sum_j m_j cos(n phi_j) = 0,  sum_j m_j sin(n phi_j) = 0.
            let nf = n as f64;
            let i = n_atoms - 2;
            let j = n_atoms - 1;
            let (si, ci) = (nf * angles[i]).sin_cos();
            let (sj, cj) = (nf * angles[j]).sin_cos();
            let det = ci * sj - cj * si;
            if det.abs() < 0.1 {
                continue;
            }
            let mut rc = 0.0;
            let mut rs = 0.0;
            for k in 0..i {
                let (s, c) = (nf * angles[k]).sin_cos();
                rc -= masses[k] * c;
                rs -= masses[k] * s;
            }
            let mi = (rc * sj - rs * cj) / det;
            let mj = (ci * rs - si * rc) / det;
            if !(0.05..=5.0).contains(&mi) || !(0.05..=5.0).contains(&mj) {
                continue;
            }
            masses[i] = mi;
            masses[j] = mj;
        }
        let raw: Vec<(f64, f64)> = angles.iter().copied().zip(masses.iter().copied()).collect();
        let m = normalize(&raw).expect("sampled atoms are valid");
        if m.len() != n_atoms {
            continue;
        }
        debug_assert!(lindelof_defect(&m, rho).regular);
        return m;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_regular() {
        for (rho, m) in [
            fixture_triangle(),
            fixture_square(),
            fixture_rectangle(),
            fixture_small_rho(),
        ] {
            assert!(lindelof_defect(&m, &rho).regular);
            assert!(m.total_mass() > 0.0);
        }
    }

    #[test]
    fn random_measures_are_deterministic_and_regular() {
        let rho2 = Order::new(2.0).unwrap();
        let rho_frac = Order::new(1.7).unwrap();
        for seed in 0..20 {
            let a = random_regular_measure(&rho2, 4, seed);
            let b = random_regular_measure(&rho2, 4, seed);
            assert_eq!(a.atoms(), b.atoms(), "seed {seed} not deterministic");
            let d = lindelof_defect(&a, &rho2);
            assert!(d.regular, "seed {seed}: defect {}", d.modulus());
            assert!(d.modulus() <= 1e-9);

            let c = random_regular_measure(&rho_frac, 3, seed);
            assert_eq!(c.len(), 3);
        }
    }
}
