//! Sp₄(ℤ): matrices, congruence subgroups, coset enumeration and the
//! catalog of special matrices.

pub mod cosets;
pub mod matrix;
pub mod special;
pub mod subgroup;

pub use cosets::{
    enumerate_cosets, enumerate_cosets_with_budget, g24_table, gamma0_completion, gamma_p,
    generators_of, CosetTable,
};
pub use matrix::{is_symplectic, SymplecticMatrix};
pub use special::{special, special_matrices};
pub use subgroup::{coset_key, membership, GroupId};
