//! Hybrid shearlet–wavelet frames for H¹ on the unit square, an adaptive
//! frame-coordinate Poisson solver, and best N-term benchmarks.

pub mod approx;
pub mod cartoon;
pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod hybrid;
pub mod io;
pub mod krylov;
pub mod shearlet;
pub mod solver;
pub mod spectral;
pub mod spline;
pub mod wavelet;

pub use error::{Error, Result};
pub use grid::GridFunction;
pub use hybrid::{CoefficientVector, FrameConfig, HybridFrame, HybridIndex};
