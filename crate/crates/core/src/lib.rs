//! Laguerre-Gauss beam modes on Cartesian grids: closed-form evaluation,
//! ladder operators, paraxial propagation and modal decomposition.

pub mod analytic;
pub mod decomposition;
pub mod error;
pub mod field;
pub mod grid;
pub mod operators;
pub mod params;
pub mod propagation;
pub mod spectral;

pub use error::{LgError, Result};
pub use field::{fidelity, inner_product, ComplexField};
pub use grid::Grid;
pub use params::{BeamParams, ModeIndex};

pub use num_complex::Complex64;
