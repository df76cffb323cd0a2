use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Complex;

use super::set::{ModularPolynomialSet, PolyId};
use crate::interp::TriPoly;
use crate::invariants::{invariants_at, InvariantKind};
use crate::numerics::scalar::log2_abs;
use crate::numerics::{PrecisionContext, UniPoly};
use crate::siegel::sample_fundamental;

/// Seed of the verification points; the build draws from other streams.
pub const VERIFY_SEED: u64 = 0x7e51_f00d;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl std::fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(f, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
        }
        Ok(())
    }
}

/// log2 of Σ |cᵢ|·|x|^i, the natural scale of a polynomial value at x.
fn value_scale(p: &UniPoly, x: &Complex) -> f64 {
    let lx = log2_abs(x);
    p.coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| log2_abs(c) + i as f64 * lx)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn derivative(p: &UniPoly) -> UniPoly {
    let prec = p.coeffs.first().map_or(64, |c| c.prec().0);
    UniPoly::new(
        p.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| Complex::with_val(prec, c * i as u32))
            .collect(),
    )
}

/// Worst (log2 relative) errors of Φ₁(f₁(pΩ)) = 0 and Ψ_m/Φ₁′ = f_m(pΩ) at
/// one Ω.
fn residual_at(set: &ModularPolynomialSet, om: &crate::siegel::PeriodMatrix, ctx: &PrecisionContext) -> crate::Result<(f64, f64)> {
    let prec = ctx.working();
    let here = invariants_at(om, set.kind, ctx)?.v;
    let there = invariants_at(&om.scaled(set.p as i64, 1), set.kind, ctx)?.v;
    let sp = set.specialize(&here, prec)?;
    let r = &there[0];
    let phi = sp.phi1.eval(r);
    let phi_err = log2_abs(&phi) - value_scale(&sp.phi1, r);
    let dphi = derivative(&sp.phi1).eval(r);
    let mut psi_err = f64::NEG_INFINITY;
    for (psi, want) in [(&sp.psi2, &there[1]), (&sp.psi3, &there[2])] {
        let got = Complex::with_val(prec, psi.eval(r) / &dphi);
        let diff = Complex::with_val(prec, &got - want);
        psi_err = psi_err.max(log2_abs(&diff) - log2_abs(want).max(0.0));
    }
    Ok((phi_err, psi_err))
}

/// Φ₁ and the Ψ quotient at `trials` random points of the fundamental
/// domain, to 2^-(n_bits/2) relative accuracy.
pub fn check_residual(set: &ModularPolynomialSet, trials: usize, ctx: &PrecisionContext, seed: u64) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = -(ctx.n_bits as f64) / 2.0;
    let (mut worst_phi, mut worst_psi) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut done = 0;
    let mut skipped = 0;
    while done < trials {
        let om = sample_fundamental(&mut rng, ctx.working());
        match residual_at(set, &om, ctx) {
            Ok((a, b)) => {
                worst_phi = worst_phi.max(a);
                worst_psi = worst_psi.max(b);
                done += 1;
            }
            Err(e) => {
                log::debug!("residual point skipped: {e}");
                skipped += 1;
                if skipped > 4 * trials + 4 {
                    return Check {
                        name: "residual",
                        passed: false,
                        detail: format!("only {done} of {trials} points usable: {e}"),
                    };
                }
            }
        }
    }
    Check {
        name: "residual",
        passed: worst_phi < tol && worst_psi < tol,
        detail: format!(
            "{trials} points, worst log2 rel. error phi1 {worst_phi:.1}, psi quotient {worst_psi:.1} (bound {tol:.0})"
        ),
    }
}

/// Φ₁ is invariant and Ψ₂, Ψ₃ are exchanged when the last two invariants
/// are swapped.
pub fn check_symmetry(set: &ModularPolynomialSet) -> Check {
    let mut bad = Vec::new();
    for (l, p) in &set.phi1_num {
        if p.swap_vars(1, 2) != *p {
            bad.push(format!("phi1[{l}]"));
        }
    }
    let ls: std::collections::BTreeSet<u32> = set.psi2_num.keys().chain(set.psi3_num.keys()).copied().collect();
    let empty = TriPoly::new();
    for l in ls {
        let a = set.psi2_num.get(&l).unwrap_or(&empty);
        let b = set.psi3_num.get(&l).unwrap_or(&empty);
        if a.swap_vars(1, 2) != *b {
            bad.push(format!("psi2[{l}]/psi3[{l}]"));
        }
    }
    Check {
        name: "symmetry",
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            "phi1 symmetric, psi2 <-> psi3 under y <-> z".into()
        } else {
            format!("violated at {}", bad.join(", "))
        },
    }
}

/// The congruences satisfied by every monomial:
/// Φ₁ (m = 1) and Ψ₂ (m = 2) numerators i ≡ ℓ+m+1 (2), i+j ≡ −pℓ (4),
/// j+k ≡ p(m−1) (4); Ψ₃ is the y ↔ z image of Ψ₂, so its monomials obey the
/// m = 2 rules with j and k exchanged;
/// denominator i ≡ j ≡ k ≡ 0 (2), i+j ≡ j+k ≡ 0 (4).
pub fn check_parity(set: &ModularPolynomialSet) -> Check {
    let p = set.p as i64;
    let mut bad = Vec::new();
    for id in [PolyId::Phi1, PolyId::Psi2, PolyId::Psi3] {
        let (m, swap) = if id == PolyId::Psi3 { (2, true) } else { (id.m().expect("numerator") as i64, false) };
        for (l, poly) in set.numerators(id).expect("numerator") {
            let l = *l as i64;
            for e in poly.terms.keys() {
                let (i, mut j, mut k) = (e[0] as i64, e[1] as i64, e[2] as i64);
                if swap {
                    std::mem::swap(&mut j, &mut k);
                }
                let ok = (i - l - m - 1).rem_euclid(2) == 0
                    && (i + j + p * l).rem_euclid(4) == 0
                    && (j + k - p * (m - 1)).rem_euclid(4) == 0;
                if !ok {
                    bad.push(format!("{}[{l}] {i} {j} {k}", id.name()));
                }
            }
        }
    }
    for e in set.denominator.terms.keys() {
        let (i, j, k) = (e[0], e[1], e[2]);
        if i % 2 != 0 || j % 2 != 0 || k % 2 != 0 || (i + j) % 4 != 0 || (j + k) % 4 != 0 {
            bad.push(format!("den {i} {j} {k}"));
        }
    }
    let shown: Vec<String> = bad.iter().take(5).cloned().collect();
    Check {
        name: "parity",
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            "all monomials satisfy the congruences".into()
        } else {
            format!("{} offending monomials, e.g. {}", bad.len(), shown.join("; "))
        },
    }
}

/// Total degree p³ − p and invariance under every permutation of the
/// three invariants.
pub fn check_denominator(set: &ModularPolynomialSet) -> Check {
    let d = &set.denominator;
    let want = set.p * set.p * set.p - set.p;
    let total = d.total_degree().unwrap_or(0) as u64;
    let symmetric = d.swap_vars(0, 1) == *d && d.swap_vars(1, 2) == *d;
    Check {
        name: "denominator",
        passed: total == want && symmetric,
        detail: format!("total degree {total} (expected {want}), fully symmetric: {symmetric}"),
    }
}

/// All checks; the structural ones only apply to the b′ kind.
pub fn verify(set: &ModularPolynomialSet, trials: usize, ctx: &PrecisionContext) -> VerifyReport {
    let mut checks = vec![check_residual(set, trials, ctx, VERIFY_SEED)];
    if set.kind == InvariantKind::ThetaQuotient {
        checks.push(check_symmetry(set));
        checks.push(check_parity(set));
        checks.push(check_denominator(set));
    }
    VerifyReport { checks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modpoly::set::tests::toy_set;
    use rug::Rational;

    #[test]
    fn structural_checks_on_a_toy_set() {
        let mut s = toy_set();
        // toy numerators are not meant to satisfy the congruences
        assert!(check_symmetry(&s).passed);
        assert!(!check_denominator(&s).passed, "toy denominator has degree 6");
        s.psi3_num.get_mut(&0).unwrap().add_term([0, 0, 1], Rational::from(1));
        let c = check_symmetry(&s);
        assert!(!c.passed && c.detail.contains("psi2[0]"));
    }

    #[test]
    fn psi3_parity_follows_psi2_through_the_swap() {
        let mut s = toy_set();
        s.p = 3;
        s.denominator = TriPoly::constant(Rational::from(1));
        s.phi1_num.clear();
        // ℓ = 0, m = 2: i odd, i + j ≡ 0, j + k ≡ 3 (mod 4)
        s.psi2_num = [(0, TriPoly::from_terms([([1, 3, 0], Rational::from(5))]))].into();
        s.psi3_num = [(0, TriPoly::from_terms([([1, 0, 3], Rational::from(5))]))].into();
        assert!(check_parity(&s).passed, "{}", check_parity(&s).detail);
        s.psi3_num = [(0, TriPoly::from_terms([([1, 3, 0], Rational::from(5))]))].into();
        assert!(!check_parity(&s).passed);
    }

    #[test]
    fn parity_of_the_denominator() {
        let mut s = toy_set();
        s.phi1_num.clear();
        s.psi2_num.clear();
        s.psi3_num.clear();
        assert!(check_parity(&s).passed);
        s.denominator.add_term([1, 1, 0], Rational::from(2));
        assert!(!check_parity(&s).passed);
    }
}
