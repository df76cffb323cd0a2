//! Genus-2 modular polynomials for theta quotients and Streng invariants,
//! computed by evaluation at many period matrices and interpolation.

pub mod borchardt;
pub mod error;
pub mod interp;
pub mod inversion;
pub mod invariants;
pub mod modpoly;
pub mod numerics;
pub mod siegel;
pub mod symplectic;
pub mod theta;

pub use error::{Error, Result};
