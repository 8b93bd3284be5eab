//! Critical-type analysis for finite atomic angular densities.
//!
//! Given an order `rho > 1/2` and a finite atomic measure on the circle, this
//! crate computes the critical zero type `sigma_Z` and the critical uniqueness
//! type `sigma_U`, enumerates the nests of the associated locally convex
//! curve, and constructs a discrete type-minimizing measure with fewer than
//! `2 rho` widely spaced atoms.
//!
//! The pipeline, bottom to top:
//!
//! - [`measures`] — orders, atomic measures, the moment (Lindelöf) defect,
//!   and the JSON measure format.
//! - [`trigfun`] — the algebra of piecewise `rho`-trigonometric functions:
//!   construction from a measure, convexity checks, pointwise maxima, and the
//!   widely spaced trigonometric minorant.
//! - [`curve`] — the locally convex curve swept by a convex function, its
//!   nests and circumdisks, `sigma_Z`, `sigma_U`, and the balance test.
//! - [`minimizer`] — type-minimizing measures by closed-form surgery (orders
//!   in `(1/2, 1)` and order `2`) or by seeded minimax search (everything
//!   else), plus the end-to-end analysis report.
//! - [`sample`] — seeded generators for regular measures, used by the test
//!   suites and handy for demos.
//!
//! # Quick start
//!
//! ```
//! use uct::measures::parse_measure;
//! use uct::minimizer::{analyze, AnalyzeOptions};
//!
//! // Equal point masses in three directions 2pi/3 apart, order 2: the curve
//! // is an equilateral triangle of side 1 (the tangent makes two turns, so
//! // the corner at each vertex is swept twice as fast as for a plain
//! // triangle).
//! let text = r#"{
//!     "rho": 2,
//!     "atoms": [
//!         {"angle_over_pi": 0.0,              "mass_times_2pi": 1.0},
//!         {"angle_over_pi": 0.6666666666666666, "mass_times_2pi": 1.0},
//!         {"angle_over_pi": 1.3333333333333333, "mass_times_2pi": 1.0}
//!     ]
//! }"#;
//! let (rho, delta) = parse_measure(text).unwrap();
//! let report = analyze(&delta, &rho, &AnalyzeOptions::default()).unwrap();
//! // Circumradius of the triangle vs. half its side: each nest closes over
//! // a single edge, so the deepest nest disk has radius 1/2.
//! assert!((report.sigma_z - 1.0 / 3f64.sqrt()).abs() < 1e-9);
//! assert!((report.sigma_u - 0.5).abs() < 1e-9);
//! assert!(!report.locally_balanced);
//! // The type-minimizing complement has three atoms, at the edge normals.
//! assert_eq!(report.delta_star.as_ref().unwrap().len(), 3);
//! ```

pub mod curve;
pub mod geom;
pub mod measures;
pub mod minimizer;
pub mod sample;
pub mod tol;
pub mod trigfun;
