//! Fitting, evaluation, inversion and extrapolation of learning-curve
//! scaling laws.
//!
//! The central object is the data-scaling law
//! `error(n) = a * n^-alpha + c_inf`, fitted to measured `(n, error)` points
//! by projected Levenberg-Marquardt. The joint law
//! `a * n^-alpha + b * m^-beta + c_inf` over model size `m` and its
//! random-guess envelope are also available.
//!
//! ```
//! use scaling_laws::{builtin_fixture, fit_data_law, eval_data_law, FitOptions};
//!
//! let points = builtin_fixture("table1").unwrap();
//! let fit = fit_data_law(&points, &FitOptions::default()).unwrap();
//! assert!(fit.converged && fit.sse < 5e-6);
//! let at_2m = eval_data_law(&fit.params, 2e6).unwrap();
//! assert!((at_2m - 0.309).abs() < 3e-3);
//! ```

// `!(x >= lo)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod ingest;
pub mod model;
pub mod regions;
pub mod report;
mod rng;
pub mod solver;
pub mod synth;
pub mod types;

pub use error::{Error, Result};
pub use ingest::{builtin_fixture, read_points, read_points_path, write_points};
pub use model::{
    data_law_jacobian, envelope, eval_data_law, eval_enveloped_joint, eval_joint_law, invert_data_law,
};
pub use regions::{classify_points, region_boundaries, RegionLabel, RegionTolerances};
pub use solver::{fit_data_law, fit_joint_law, grid_oracle_fit, sse, FitOptions};
pub use synth::{gen_curve, gen_joint_grid};
pub use types::{
    accuracy_from_error, error_from_accuracy, validate_points, DataLawParams, EnvelopeParams, FitResult,
    JointLawParams, ObservationPoint, ObservationSet,
};
