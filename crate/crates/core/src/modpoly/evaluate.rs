use rug::Complex;

use crate::error::{Error, Result};
use crate::invariants::{invariants_at, InvariantKind};
use crate::numerics::scalar::log2_abs;
use crate::numerics::{poly_product_tree, PrecisionContext, UniPoly};
use crate::siegel::{act, PeriodMatrix};
use crate::symplectic::{enumerate_cosets, CosetTable, GroupId};

/// Φ₁, Ψ₂, Ψ₃ specialised at one period matrix.
#[derive(Clone, Debug)]
pub struct EvaluatedModPoly {
    pub p: u64,
    pub kind: InvariantKind,
    /// Monic, degree q = #cosets; `phi1[l]` multiplies X^l.
    pub phi1: Vec<Complex>,
    /// Degree < q.
    pub psi2: Vec<Complex>,
    pub psi3: Vec<Complex>,
    pub omega: PeriodMatrix,
}

impl EvaluatedModPoly {
    pub fn degree(&self) -> usize {
        self.phi1.len() - 1
    }

    /// The non-trivial coefficients in a fixed order: Φ₁ (l < q), then Ψ₂,
    /// then Ψ₃.
    pub fn flat(&self) -> Vec<Complex> {
        let q = self.degree();
        self.phi1[..q]
            .iter()
            .chain(&self.psi2)
            .chain(&self.psi3)
            .cloned()
            .collect()
    }
}

/// The cosets over which the roots run: (Γ(2,4) ∩ Γ₀(p))\Γ(2,4) for b′,
/// Γ₀(p)\Sp₄(ℤ) for the Igusa and Streng invariants.
pub fn cosets_for(p: u64, kind: InvariantKind) -> Result<CosetTable> {
    match kind {
        InvariantKind::ThetaQuotient => {
            if p == 2 {
                return Err(Error::Config("b' modular polynomials need p odd".into()));
            }
            enumerate_cosets(GroupId::G24, GroupId::Gamma0(p))
        }
        _ => enumerate_cosets(GroupId::Full, GroupId::Gamma0(p)),
    }
}

/// Largest |f₁^γ| (as log2, relative to n_bits) still accepted.
fn dynamic_range(ctx: &PrecisionContext) -> f64 {
    ctx.n_bits as f64 / 8.0
}

/// Roots f^γ = f(p·γΩ) for every coset representative.
pub fn conjugate_values(
    om: &PeriodMatrix,
    p: u64,
    kind: InvariantKind,
    cosets: &CosetTable,
    ctx: &PrecisionContext,
) -> Result<Vec<[Complex; 3]>> {
    let om = om.with_prec(ctx.working());
    cosets
        .reps
        .iter()
        .map(|g| {
            let pt = act(g, &om)?.scaled(p as i64, 1);
            match invariants_at(&pt, kind, ctx) {
                Ok(v) => {
                    if v.v.iter().any(|z| !(log2_abs(z) < dynamic_range(ctx))) {
                        Err(Error::NearDenominator)
                    } else {
                        Ok(v.v)
                    }
                }
                Err(Error::VanishingDenominator) | Err(Error::ProductOfElliptic) => Err(Error::NearDenominator),
                Err(e) => Err(e),
            }
        })
        .collect()
}

fn padded(p: UniPoly, n: usize, prec: u32) -> Vec<Complex> {
    let mut c = p.coeffs;
    c.resize(n, Complex::new(prec));
    c
}

/// Φ₁ = Π(X − r_γ) and Ψ_ℓ = Σ_γ f_ℓ^γ Π_{γ′≠γ}(X − r_γ′) from the roots.
/// The products leaving one root out come from prefix and suffix products,
/// which avoids dividing by (X − r_γ).
pub fn assemble(roots: &[[Complex; 3]], prec: u32) -> (Vec<Complex>, Vec<Complex>, Vec<Complex>) {
    let q = roots.len();
    let r1: Vec<Complex> = roots.iter().map(|r| r[0].clone()).collect();
    let phi1 = padded(poly_product_tree(&r1), q + 1, prec);
    let one = UniPoly::constant(Complex::with_val(prec, 1));
    let mut prefix = vec![one.clone()];
    for r in &r1[..q - 1] {
        let lin = UniPoly::new(vec![Complex::with_val(prec, -r), Complex::with_val(prec, 1)]);
        let next = prefix.last().expect("nonempty").mul(&lin);
        prefix.push(next);
    }
    let mut suffix = vec![one; q + 1];
    for i in (1..q).rev() {
        let lin = UniPoly::new(vec![Complex::with_val(prec, -&r1[i]), Complex::with_val(prec, 1)]);
        suffix[i] = suffix[i + 1].mul(&lin);
    }
    let mut psi2 = vec![Complex::new(prec); q];
    let mut psi3 = vec![Complex::new(prec); q];
    for i in 0..q {
        let others = prefix[i].mul(&suffix[i + 1]);
        for (l, c) in others.coeffs.iter().enumerate() {
            psi2[l] += Complex::with_val(prec, c * &roots[i][1]);
            psi3[l] += Complex::with_val(prec, c * &roots[i][2]);
        }
    }
    (phi1, psi2, psi3)
}

/// The three modular polynomials specialised at Ω.
pub fn evaluate_at(
    om: &PeriodMatrix,
    p: u64,
    kind: InvariantKind,
    cosets: &CosetTable,
    ctx: &PrecisionContext,
) -> Result<EvaluatedModPoly> {
    let roots = conjugate_values(om, p, kind, cosets, ctx)?;
    let (phi1, psi2, psi3) = assemble(&roots, ctx.working());
    Ok(EvaluatedModPoly {
        p,
        kind,
        phi1,
        psi2,
        psi3,
        omega: om.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::{abs_f64, cf64};
    use crate::siegel::sample_fundamental;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn assemble_matches_definition() {
        let prec = 128;
        let roots: Vec<[Complex; 3]> = (0..5)
            .map(|k| {
                let k = k as f64;
                [cf64(prec, k, 1.0), cf64(prec, 2.0 * k, 0.0), cf64(prec, 0.0, k)]
            })
            .collect();
        let (phi1, psi2, _) = assemble(&roots, prec);
        let x = cf64(prec, 0.3, -0.7);
        let f = UniPoly::new(phi1).eval(&x);
        let mut want = cf64(prec, 1.0, 0.0);
        for r in &roots {
            want *= Complex::with_val(prec, &x - &r[0]);
        }
        assert!(abs_f64(&Complex::with_val(prec, &f - &want)) < 1e-30);
        let g = UniPoly::new(psi2).eval(&x);
        let mut want = Complex::new(prec);
        for (i, r) in roots.iter().enumerate() {
            let mut t = r[1].clone();
            for (j, s) in roots.iter().enumerate() {
                if i != j {
                    t *= Complex::with_val(prec, &x - &s[0]);
                }
            }
            want += t;
        }
        assert!(abs_f64(&Complex::with_val(prec, &g - &want)) < 1e-30);
    }

    #[test]
    fn phi1_vanishes_at_the_identity_conjugate() {
        let ctx = PrecisionContext::with_bits(192).unwrap();
        let cos = cosets_for(3, InvariantKind::ThetaQuotient).unwrap();
        assert_eq!(cos.len(), 40);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let om = sample_fundamental(&mut rng, ctx.working());
        let e = evaluate_at(&om, 3, InvariantKind::ThetaQuotient, &cos, &ctx).unwrap();
        assert_eq!(e.degree(), 40);
        assert_eq!(e.phi1[40], Complex::with_val(ctx.working(), 1));
        let b3 = invariants_at(&om.scaled(3, 1), InvariantKind::ThetaQuotient, &ctx).unwrap().v;
        let phi = UniPoly::new(e.phi1.clone());
        let v = phi.eval(&b3[0]);
        let d = phi.derivative().eval(&b3[0]);
        assert!(log2_abs(&v) < -150.0, "{}", log2_abs(&v));
        // Ψ₂(x)/Φ₁′(x) recovers the second conjugate at a simple root
        let q = Complex::with_val(ctx.working(), UniPoly::new(e.psi2.clone()).eval(&b3[0]) / d);
        assert!(log2_abs(&Complex::with_val(ctx.working(), &q - &b3[1])) < -120.0);
    }

    #[test]
    fn even_p_rejected_for_bprime() {
        assert!(cosets_for(2, InvariantKind::ThetaQuotient).is_err());
        assert_eq!(cosets_for(2, InvariantKind::Streng).unwrap().len(), 15);
    }
}
