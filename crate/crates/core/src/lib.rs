//! Multiplierless 8-point DCT approximations drawn from a multiparametric
//! matrix class.
//!
//! Every member of the class is an 8×8 matrix whose eight free entries come
//! from `{0, ±1/2, ±1, ±2}`, so the low-complexity matrix only needs
//! additions and bit shifts. The crate covers exact construction and
//! orthogonality testing ([`class`]), the shared fast factorization
//! ([`fast`]), figures of merit ([`metrics`]), exhaustive Pareto search over
//! all 7⁸ vectors ([`search`]), doubling to 16 and 32 points ([`scaling`])
//! and a block-compression harness ([`codec`]).
//!
//! ```
//! use mpdct::{catalog, class, metrics};
//!
//! let j7 = catalog::by_name("j7").unwrap();
//! let kernel = class::orthonormalize(&j7.params()).unwrap();
//! assert_eq!((kernel.adds(), kernel.shifts()), (22, 4));
//! let report = metrics::evaluate(&kernel, 0.95).unwrap();
//! assert!(report.cg > 8.0);
//! ```

pub mod catalog;
pub mod class;
pub mod codec;
pub mod error;
pub mod fast;
pub mod kernel;
pub mod linalg;
pub mod metrics;
pub mod scaling;
pub mod search;

pub use class::ParamVector;
pub use error::{Error, Result};
pub use kernel::TransformKernel;
pub use metrics::MetricsReport;
