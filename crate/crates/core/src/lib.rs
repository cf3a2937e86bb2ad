//! Quantum state tomography for systems of `n` qudits.
//!
//! The crate builds the ordered SU(d) generator basis, simulates measurement
//! counts for orthogonal and non-orthogonal projector sets (with Poissonian
//! noise), and reconstructs density matrices by A-matrix linear inversion,
//! optionally refined to a physical state by eigenvalue projection or
//! maximum likelihood.
//!
//! ```
//! use qudit_tomography::{generators, measurement, reconstruction, states};
//!
//! let basis = generators::lambda_basis(3).unwrap();
//! let ms = measurement::qutrit_nine_state();
//! let rho = states::named_state("bal12", 3, 1).unwrap();
//! let counts = measurement::expected_counts(&rho, &ms, 1e4).unwrap();
//! let rec = reconstruction::linear_inversion(&counts, &ms, &basis).unwrap();
//! assert!((rec.rho_linear.matrix() - rho.matrix()).frobenius_norm() < 1e-10);
//! ```
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod formats;
pub mod generators;
pub mod matrix;
pub mod measurement;
pub mod pipeline;
pub mod reconstruction;
pub mod states;

pub use error::{Error, Result};
pub use generators::GeneratorBasis;
pub use matrix::ComplexMatrix;
pub use measurement::{CountRecord, MeasurementSet, Scale};
pub use reconstruction::{Method, ReconstructionResult};
pub use states::{BlochVector, DensityMatrix};
