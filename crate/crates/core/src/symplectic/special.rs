use super::matrix::SymplecticMatrix;

fn mk(m: [[i64; 4]; 4]) -> SymplecticMatrix {
    SymplecticMatrix::new(m).expect("catalog matrix is symplectic")
}

/// Named matrices whose actions on the theta quotients are used as checks.
pub fn special_matrices() -> Vec<(&'static str, SymplecticMatrix)> {
    vec![
        ("gamma_134", mk([[-1, 0, 0, 0], [0, -1, 0, 0], [2, 1, -1, 0], [1, 0, 0, -1]])),
        ("gamma_410", mk([[0, -1, 0, 0], [-1, 0, 0, 0], [0, 0, 0, -1], [0, 0, -1, 0]])),
        ("gamma_8316", mk([[1, 0, 0, 2], [-3, 1, 2, -2], [-4, 0, 1, -5], [0, 0, 0, 1]])),
        ("gamma_sym", mk([[1, -3, -2, 2], [0, 1, 2, 0], [0, 0, 1, 0], [0, -4, -5, 1]])),
        ("gamma_prime_3", mk([[-5, 24, -12, 12], [-2, 19, -12, 8], [0, 6, -5, 2], [-2, 4, 0, 3]])),
        ("gamma_prime_5", mk([[-7, 6, 4, 2], [0, -7, 2, 0], [0, 10, -3, 0], [10, -8, -6, -3]])),
        ("gamma_prime_7", mk([[13, 12, -16, -6], [-10, -3, 10, 4], [56, 14, -55, -22], [30, -40, -12, -7]])),
        ("gamma_141", mk([[-1, 0, 0, 0], [0, -1, 0, 0], [1, 1, -1, 0], [1, 1, 0, -1]])),
        ("gamma_21", mk([[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 1, 0, -1]])),
        ("gamma_1886", mk([[-1, 0, 0, 0], [0, -1, 0, 0], [-1, 1, -1, 0], [1, -1, 0, -1]])),
        ("gamma_155", mk([[-1, 0, 0, 0], [0, -1, 0, 0], [0, 0, -1, 0], [0, 3, 0, -1]])),
    ]
}

/// Catalog lookup by name.
pub fn special(name: &str) -> Option<SymplecticMatrix> {
    special_matrices()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, m)| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::matrix::is_symplectic;
    use crate::symplectic::subgroup::{membership, GroupId};

    #[test]
    fn catalog_is_symplectic() {
        let all = special_matrices();
        assert_eq!(all.len(), 11);
        for (_, m) in &all {
            assert!(is_symplectic(&m.m));
        }
        assert!(!membership(&special("gamma_134").unwrap(), GroupId::G24));
    }

    #[test]
    fn symmetry_pairings_land_in_gamma0() {
        let g = special("gamma_sym").unwrap();
        for (p, name) in [(3, "gamma_prime_3"), (5, "gamma_prime_5"), (7, "gamma_prime_7")] {
            let gp = special(name).unwrap();
            assert!(membership(&gp, GroupId::G24), "{name} in Gamma(2,4)");
            assert!(membership(&g.mul(&gp), GroupId::Gamma0(p)), "{name}");
        }
    }
}
