//! Modular polynomials: evaluation at period matrices, the interpolation
//! build, exact storage and verification.

pub mod build;
pub mod checkpoint;
pub mod evaluate;
pub mod humbert;
pub mod set;
pub mod verify;

pub use build::{build, BuildOutcome, BuildStats, BuildStrategy, ModPolyBox};
pub use checkpoint::Checkpoint;
pub use evaluate::{assemble, conjugate_values, cosets_for, evaluate_at, EvaluatedModPoly};
pub use humbert::{humbert_degree, is_prime, sigma1, sigma_identity_holds, HumbertDegreeOracle};
pub use set::{ModularPolynomialSet, PolyId, Specialized};
pub use verify::{verify, Check, VerifyReport};
