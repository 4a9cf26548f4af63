//! kth contact-distance and nearest-neighbour-distance distributions of the
//! n-dimensional Matérn cluster process.
//!
//! The analytic path goes through the probability generating function of the
//! number of points in a ball: its power-series coefficients give the count
//! PMF, the count PMF gives the contact-distance CDFs, and a convolution with
//! the intra-cluster weights gives the nearest-neighbour CDFs. A Monte Carlo
//! simulator of the process (stationary and reduced Palm) is included so every
//! analytic curve can be checked against samples.
//!
//! ```
//! use mcpdist::{analytic, McpParams};
//!
//! let p = McpParams::new(2e-5, 50.0, 5.0, 2).unwrap();
//! let f1 = analytic::cdf_contact(100.0, 1, &p).unwrap();
//! let f1_nnd = analytic::cdf_nnd(100.0, 1, &p).unwrap();
//! assert!(f1_nnd >= f1);
//! ```

pub mod analytic;
pub mod apps;
pub mod cli;
mod error;
pub mod exec;
pub mod geometry;
pub mod quadrature;
pub mod simulator;

pub use analytic::{DistributionCurve, McpParams, PmfVector};
pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::Dimension;
