//! Genus-2 theta constants with half-integer characteristics: the lattice
//! series, the duplication formula, and transport of quotients along the
//! symplectic action.

pub mod action;
pub mod characteristic;
pub mod series;
pub mod transport;

pub use action::{half_conjugate, igusa_image, theta_action_of, zeta8_pow, ThetaAction};
pub use characteristic::{Characteristic, EVEN};
pub use series::{theta_all, theta_all_bits, theta_series, ThetaValues};
pub use transport::{bprime, bprime_jets, duplication, theta_quotients_anywhere, ThetaQuotients};
