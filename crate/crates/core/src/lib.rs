//! Projectors onto closed convex sets in R^n, and decision procedures for
//! when linear and convex combinations of such projectors are themselves
//! projectors.
//!
//! ```
//! use projkit::{decide_pair_sum, SampleConfig, SetDescriptor};
//!
//! let u = SetDescriptor::ray([1.0, 2.0]).unwrap();
//! let v = SetDescriptor::ray([-1.0, -2.0]).unwrap();
//! let cert = decide_pair_sum(&u, &v, &SampleConfig::default()).unwrap();
//! assert!(cert.is_projector());
//! assert_eq!(cert.result_set().unwrap().label(), "line");
//! ```

pub mod algebra;
pub mod certifier;
pub mod fixtures;
pub mod linalg;
pub mod sets;
pub mod tol;
pub mod vector;

pub use algebra::{
    cone_difference_projector, cone_intersection_projector, decide_1d_pair, decide_1d_sets, decide_cone_family_sum,
    decide_convex_combination, decide_difference, decide_generated_cone, decide_linear_combination, decide_pair_sum,
    decide_ray_pair, matrix_projector_check, AlgebraError, Certificate, Combination, Condition, Confidence, Evidence,
    MatrixCheck, Method, Verdict, Witness,
};
pub use certifier::{OperatorHandle, SampleConfig};
pub use sets::{set_difference_witness, Interval, SetDescriptor, SetError};
pub use vector::Vector;
