use std::sync::OnceLock;

use super::matrix::{mul_mod, SymplecticMatrix};

/// The congruence subgroups of Sp₄(ℤ) used here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GroupId {
    /// Sp₄(ℤ) itself.
    Full,
    /// C ≡ 0 mod p.
    Gamma0(u64),
    /// γ ≡ I mod 2.
    Gamma2,
    /// γ ≡ I mod 2 with diag(B) ≡ diag(C) ≡ 0 mod 4.
    G24,
    /// Γ(2,4) ∩ Γ₀(p).
    G24Gamma0(u64),
}

impl GroupId {
    pub fn name(&self) -> String {
        match self {
            GroupId::Full => "Sp4(Z)".into(),
            GroupId::Gamma0(p) => format!("Gamma0({p})"),
            GroupId::Gamma2 => "Gamma(2)".into(),
            GroupId::G24 => "Gamma(2,4)".into(),
            GroupId::G24Gamma0(p) => format!("Gamma(2,4)&Gamma0({p})"),
        }
    }
}

fn is_identity_mod2(g: &SymplecticMatrix) -> bool {
    let r = g.reduce_mod(2);
    (0..4).all(|i| (0..4).all(|j| r[i][j] == (i == j) as i64))
}

/// Exact congruence test.
pub fn membership(g: &SymplecticMatrix, sg: GroupId) -> bool {
    match sg {
        GroupId::Full => true,
        GroupId::Gamma0(p) => g.c().iter().flatten().all(|x| x.rem_euclid(p as i64) == 0),
        GroupId::Gamma2 => is_identity_mod2(g),
        GroupId::G24 => {
            let (b, c) = (g.b(), g.c());
            is_identity_mod2(g)
                && b[0][0].rem_euclid(4) == 0
                && b[1][1].rem_euclid(4) == 0
                && c[0][0].rem_euclid(4) == 0
                && c[1][1].rem_euclid(4) == 0
        }
        GroupId::G24Gamma0(p) => membership(g, GroupId::G24) && membership(g, GroupId::Gamma0(p)),
    }
}

/// Γ(2,4) modulo Γ(4): the 64 matrices I + 2X mod 4 with X₄ = ᵗX₁ and
/// X₂, X₃ symmetric with zero diagonal.
fn g24_mod4() -> &'static Vec<[[i64; 4]; 4]> {
    static K: OnceLock<Vec<[[i64; 4]; 4]>> = OnceLock::new();
    K.get_or_init(|| {
        let mut out = Vec::with_capacity(64);
        for bits in 0u32..64 {
            let bit = |k: u32| ((bits >> k) & 1) as i64;
            let x1 = [[bit(0), bit(1)], [bit(2), bit(3)]];
            let c2 = bit(4);
            let c3 = bit(5);
            let mut m = [[0i64; 4]; 4];
            for i in 0..2 {
                for j in 0..2 {
                    m[i][j] = 2 * x1[i][j];
                    m[i + 2][j + 2] = 2 * x1[j][i];
                }
            }
            m[0][3] = 2 * c2;
            m[1][2] = 2 * c2;
            m[2][1] = 2 * c3;
            m[3][0] = 2 * c3;
            for (i, row) in m.iter_mut().enumerate() {
                row[i] += 1;
                for x in row.iter_mut() {
                    *x = x.rem_euclid(4);
                }
            }
            out.push(m);
        }
        out
    })
}

fn pack(m: &[[i64; 4]; 4], bits: u32) -> u64 {
    let mut k = 0u64;
    for x in m.iter().flatten() {
        k = (k << bits) | (*x as u64);
    }
    k
}

fn inv_mod(a: i64, p: i64) -> i64 {
    // p prime and a ≠ 0 mod p
    let mut r = 1i64;
    let mut b = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Reduced row echelon form of the 2×4 block (C | D) mod p: the Lagrangian
/// subspace that labels the coset Γ₀(p)·g.
fn lagrangian_mod_p(g: &SymplecticMatrix, p: i64) -> [i64; 8] {
    let mut rows = [[0i64; 4]; 2];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = g.m[i + 2][j].rem_euclid(p);
        }
    }
    let mut lead_row = 0;
    for col in 0..4 {
        if lead_row == 2 {
            break;
        }
        let Some(piv) = (lead_row..2).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(lead_row, piv);
        let inv = inv_mod(rows[lead_row][col], p);
        for x in rows[lead_row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..2 {
            if r != lead_row && rows[r][col] != 0 {
                let f = rows[r][col];
                for c in 0..4 {
                    rows[r][c] = (rows[r][c] - f * rows[lead_row][c]).rem_euclid(p);
                }
            }
        }
        lead_row += 1;
    }
    let mut out = [0i64; 8];
    for i in 0..2 {
        for j in 0..4 {
            out[4 * i + j] = rows[i][j];
        }
    }
    out
}

/// Hashable label of the right coset H·g, so that g₁ and g₂ get the same
/// label exactly when g₁g₂⁻¹ ∈ H.
pub fn coset_key(g: &SymplecticMatrix, sg: GroupId) -> Vec<u64> {
    match sg {
        GroupId::Full => vec![],
        GroupId::Gamma0(p) => lagrangian_mod_p(g, p as i64).iter().map(|&x| x as u64).collect(),
        GroupId::Gamma2 => vec![pack(&g.reduce_mod(2), 1)],
        GroupId::G24 => {
            let r = g.reduce_mod(4);
            let best = g24_mod4()
                .iter()
                .map(|k| pack(&mul_mod(k, &r, 4), 2))
                .min()
                .expect("nonempty");
            vec![best]
        }
        GroupId::G24Gamma0(p) => {
            let mut k = coset_key(g, GroupId::G24);
            k.extend(coset_key(g, GroupId::Gamma0(p)));
            k
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn elementary_memberships() {
        let i = SymplecticMatrix::identity();
        assert!(membership(&i, GroupId::G24));
        assert!(!membership(&SymplecticMatrix::j(), GroupId::Gamma0(3)));
        assert!(membership(&i.neg(), GroupId::G24));
        let m11 = SymplecticMatrix::m_gen(0, 0);
        let m11_4 = m11.mul(&m11).mul(&m11).mul(&m11);
        assert!(!membership(&m11.mul(&m11), GroupId::G24));
        assert!(membership(&m11_4, GroupId::G24));
        let m12 = SymplecticMatrix::m_gen(0, 1);
        assert!(membership(&m12.mul(&m12), GroupId::G24));
    }

    #[test]
    fn g24_mod4_is_a_group_of_symplectic_matrices() {
        let k = g24_mod4();
        assert_eq!(k.len(), 64);
        let set: std::collections::HashSet<_> = k.iter().collect();
        assert_eq!(set.len(), 64);
        for a in k {
            for b in k {
                assert!(set.contains(&mul_mod(a, b, 4)));
            }
        }
    }

    #[test]
    fn keys_detect_subgroup_cosets() {
        let gens = SymplecticMatrix::generators();
        let mut g = SymplecticMatrix::identity();
        for k in [0, 1, 2, 0, 3, 1, 0] {
            g = g.mul(&gens[k]);
        }
        let m11 = SymplecticMatrix::m_gen(0, 0);
        let h = m11.mul(&m11).mul(&m11).mul(&m11);
        assert_eq!(coset_key(&h.mul(&g), GroupId::G24), coset_key(&g, GroupId::G24));
        let low = SymplecticMatrix::j().mul(&SymplecticMatrix::m_gen(0, 1)).mul(&SymplecticMatrix::j().inverse());
        // low has C = -[[0,1],[1,0]]·(-1); conjugating by J moves B into C
        let mut l3 = SymplecticMatrix::identity();
        for _ in 0..3 {
            l3 = l3.mul(&low);
        }
        assert!(membership(&l3, GroupId::Gamma0(3)));
        assert_eq!(coset_key(&l3.mul(&g), GroupId::Gamma0(3)), coset_key(&g, GroupId::Gamma0(3)));
        assert_ne!(coset_key(&low.mul(&g), GroupId::Gamma0(3)), coset_key(&g, GroupId::Gamma0(3)));
    }
}
