use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use super::matrix::SymplecticMatrix;
use super::subgroup::{coset_key, membership, GroupId};
use crate::error::{Error, Result};

/// Representatives of the right cosets H\G, with a key lookup that maps any
/// element of G to the index of its representative.
#[derive(Clone, Debug)]
pub struct CosetTable {
    pub group: GroupId,
    pub subgroup: GroupId,
    pub reps: Vec<SymplecticMatrix>,
    key_group: GroupId,
    index: HashMap<Vec<u64>, usize>,
}

impl CosetTable {
    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Key of the coset of `g`; `g` must lie in the table's group.
    pub fn key(&self, g: &SymplecticMatrix) -> Vec<u64> {
        coset_key(g, self.key_group)
    }

    /// Index of the representative r with H·r = H·g.
    pub fn lookup(&self, g: &SymplecticMatrix) -> Option<usize> {
        self.index.get(&self.key(g)).copied()
    }
}

/// Default bound on the number of cosets explored.
pub const DEFAULT_BUDGET: usize = 200_000;

/// Generators of `group`. For Γ(2,4) these are Schreier generators read off
/// the Sp₄(ℤ)/Γ(2,4) transversal.
pub fn generators_of(group: GroupId) -> Result<Vec<SymplecticMatrix>> {
    match group {
        GroupId::Full => Ok(SymplecticMatrix::generators()),
        GroupId::G24 => Ok(g24_generators().clone()),
        other => Err(Error::Config(format!(
            "no generating set available for {}",
            other.name()
        ))),
    }
}

/// (reported subgroup, subgroup whose keys are used). Inside Γ(2,4) the
/// Γ(2,4) part of an intersection key is constant, so it is skipped.
fn effective_subgroup(group: GroupId, subgroup: GroupId) -> (GroupId, GroupId) {
    match (group, subgroup) {
        (GroupId::G24, GroupId::Gamma0(p)) | (GroupId::G24, GroupId::G24Gamma0(p)) => {
            (GroupId::G24Gamma0(p), GroupId::Gamma0(p))
        }
        _ => (subgroup, subgroup),
    }
}

/// Breadth-first closure of the identity coset under right multiplication by
/// the generators of `group`, merging g₁ ~ g₂ when g₁g₂⁻¹ lies in
/// `subgroup`.
pub fn enumerate_cosets(group: GroupId, subgroup: GroupId) -> Result<CosetTable> {
    enumerate_cosets_with_budget(group, subgroup, DEFAULT_BUDGET)
}

pub fn enumerate_cosets_with_budget(
    group: GroupId,
    subgroup: GroupId,
    budget: usize,
) -> Result<CosetTable> {
    let (subgroup, key_group) = effective_subgroup(group, subgroup);
    let gens = generators_of(group)?;
    let id = SymplecticMatrix::identity();
    let mut index = HashMap::new();
    let mut reps = vec![id];
    index.insert(coset_key(&id, key_group), 0usize);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let r = reps[i];
        for g in &gens {
            let x = r.mul(g);
            let k = coset_key(&x, key_group);
            if index.contains_key(&k) {
                continue;
            }
            if reps.len() >= budget {
                return Err(Error::BudgetExceeded(budget));
            }
            index.insert(k, reps.len());
            queue.push_back(reps.len());
            reps.push(x);
        }
    }
    Ok(CosetTable {
        group,
        subgroup,
        reps,
        key_group,
        index,
    })
}

/// Transversal of Γ(2,4) in Sp₄(ℤ) (computed once).
pub fn g24_table() -> &'static CosetTable {
    static T: OnceLock<CosetTable> = OnceLock::new();
    T.get_or_init(|| enumerate_cosets(GroupId::Full, GroupId::G24).expect("finite index"))
}

fn g24_generators() -> &'static Vec<SymplecticMatrix> {
    static G: OnceLock<Vec<SymplecticMatrix>> = OnceLock::new();
    G.get_or_init(|| {
        let table = g24_table();
        let gens = SymplecticMatrix::generators();
        let id = SymplecticMatrix::identity();
        let mut seen = std::collections::BTreeSet::new();
        for r in &table.reps {
            for s in &gens {
                let x = r.mul(s);
                let t = table.reps[table.lookup(&x).expect("transversal is complete")];
                let h = x.mul(&t.inverse());
                debug_assert!(membership(&h, GroupId::G24));
                if h == id || h == id.neg() {
                    continue;
                }
                // one of ±h, the one with the larger matrix in lexicographic order
                let h = h.max(h.neg());
                seen.insert((h.max_abs(), h));
            }
        }
        seen.into_iter().map(|(_, h)| h).collect()
    })
}

/// γ_p = (A, pB; C/p, D) for γ ∈ Γ₀(p).
pub fn gamma_p(g: &SymplecticMatrix, p: u64) -> Result<SymplecticMatrix> {
    if !membership(g, GroupId::Gamma0(p)) {
        return Err(Error::NotInGamma0(p));
    }
    let p = p as i64;
    let mut m = g.m;
    for i in 0..2 {
        for j in 0..2 {
            m[i][j + 2] *= p;
            m[i + 2][j] /= p;
        }
    }
    SymplecticMatrix::new(m).ok_or_else(|| Error::Numeric("gamma_p lost symplecticity".into()))
}

/// Some M′ ∈ Γ(2,4) with M·M′ ∈ Γ₀(p), read off the coset table of
/// Γ(2,4) ∩ Γ₀(p) in Γ(2,4).
pub fn gamma0_completion(
    m: &SymplecticMatrix,
    p: u64,
    table: &CosetTable,
) -> Option<SymplecticMatrix> {
    let want = coset_key(m, GroupId::Gamma0(p));
    table
        .reps
        .iter()
        .find(|s| coset_key(s, GroupId::Gamma0(p)) == want)
        .map(|s| s.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma0_indices() {
        for (p, n) in [(2u64, 15usize), (3, 40), (5, 156)] {
            let t = enumerate_cosets(GroupId::Full, GroupId::Gamma0(p)).unwrap();
            assert_eq!(t.len(), n, "p = {p}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let e = enumerate_cosets_with_budget(GroupId::Full, GroupId::Gamma0(3), 10);
        assert!(matches!(e, Err(Error::BudgetExceeded(10))));
    }

    #[test]
    fn gamma_p_of_identity_and_non_members() {
        let i = SymplecticMatrix::identity();
        assert_eq!(gamma_p(&i, 7).unwrap(), i);
        assert!(matches!(gamma_p(&SymplecticMatrix::j(), 3), Err(Error::NotInGamma0(3))));
    }

    #[test]
    fn reps_are_pairwise_inequivalent() {
        let t = enumerate_cosets(GroupId::Full, GroupId::Gamma0(3)).unwrap();
        for (i, a) in t.reps.iter().enumerate() {
            for b in &t.reps[..i] {
                assert!(!membership(&a.mul(&b.inverse()), GroupId::Gamma0(3)));
            }
        }
    }
}

#[cfg(test)]
mod g24_tests {
    use super::*;

    #[test]
    fn g24_index_and_bijection() {
        assert_eq!(g24_table().len(), 11520);
        let gens = generators_of(GroupId::G24).unwrap();
        assert!(gens.iter().all(|g| membership(g, GroupId::G24)));
        for (p, n) in [(3u64, 40usize), (5, 156)] {
            let t = enumerate_cosets(GroupId::G24, GroupId::Gamma0(p)).unwrap();
            assert_eq!(t.len(), n);
            assert!(t.reps.iter().all(|r| membership(r, GroupId::G24)));
            assert!(t.reps.iter().all(|r| r.max_abs() <= 16));
        }
    }
}
