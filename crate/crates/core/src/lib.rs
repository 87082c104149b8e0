//! Numerical toolkit for the high-frequency Euler-Maxwell to Zakharov limit.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: parameters, the 14-component state, the symbol and the sources.
//! - [`spectral`]: eigenvalues, eigenvectors and total projectors of the symbol.
//! - [`resonance`]: phases, resonance localization and homological symbols.
//! - [`transparency`]: interaction coefficients and the symmetrizer.
//! - [`semiclassical`]: periodic grids, semiclassical norms and quantization.
//! - [`zakharov`]: split-step solver for the vector Zakharov system.
//! - [`wkb`]: three-scale approximate solution and its residual.
//! - [`em_dynamics`]: exponential integrator for the full stiff system.
//! - [`harness`]: configuration, experiment runners and result persistence.

pub mod em_dynamics;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod resonance;
pub mod semiclassical;
pub mod spectral;
pub mod transparency;
pub mod wkb;
pub mod zakharov;

pub use num_complex::Complex64 as C64;
