//! Arbitrary-precision substrate: complex scalars, dense univariate
//! polynomials, the extended Euclidean algorithm, rational reconstruction
//! and small dense linear algebra.

pub mod euclid;
pub mod jet;
pub mod linalg;
pub mod precision;
pub mod ratrecon;
pub mod scalar;
pub mod unipoly;

pub use euclid::{euclid_rows, ext_euclid_row, EuclidRow};
pub use jet::Jet;
pub use precision::PrecisionContext;
pub use ratrecon::{rational_reconstruct, rational_reconstruct_within, round_complex_to_integer};
pub use rug::Rational;
pub use scalar::{BigComplex, Scalar};
pub use unipoly::{deflate, poly_product_tree, UniPoly};
