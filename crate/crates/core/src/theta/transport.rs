use rug::{Assign, Complex};

use super::action::{theta_action_of, zeta8_pow};
use super::series::theta_all;
use crate::error::{Error, Result};
use crate::numerics::scalar::log2_abs;
use crate::numerics::{Jet, PrecisionContext};
use crate::siegel::{reduce_to_fundamental, PeriodMatrix, ReductionResult};

/// Quotients θ_k(Ω)/θ_0(Ω) for all sixteen k (odd ones are 0), with an
/// optional Jacobian in (τ₁, τ₂, τ₃) of the input point.
#[derive(Clone, Debug)]
pub struct ThetaQuotients {
    pub q: [Complex; 16],
    pub jac: Option<[[Complex; 3]; 16]>,
    pub reduction: ReductionResult,
}

impl ThetaQuotients {
    pub fn jets(&self) -> Option<Vec<Jet>> {
        let jac = self.jac.as_ref()?;
        Some(
            (0..16)
                .map(|k| Jet::new(self.q[k].clone(), jac[k].clone()))
                .collect(),
        )
    }
}

/// Reduce Ω into F₂, evaluate the series there and carry the quotients
/// back. Only quotients cross the functional equation, so the common
/// factor κ(γ)·√det(CΩ+D) never has to be determined.
pub fn theta_quotients_anywhere(
    om: &PeriodMatrix,
    ctx: &PrecisionContext,
    with_jacobian: bool,
) -> Result<ThetaQuotients> {
    let prec = ctx.working();
    let om = om.with_prec(prec);
    let red = reduce_to_fundamental(&om)?;
    let act = theta_action_of(&red.gamma);
    let t = theta_all(&red.omega_reduced, ctx, with_jacobian)?;
    let p0 = act.perm[0];
    let den = &t.values[p0];
    let scale = t
        .values
        .iter()
        .map(log2_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    if log2_abs(den) < scale - prec as f64 / 2.0 {
        return Err(Error::VanishingDenominator);
    }
    let mut q: [Complex; 16] = std::array::from_fn(|_| Complex::new(prec));
    let zetas: Vec<Complex> = (0..8).map(|e| zeta8_pow(e, prec)).collect();
    for k in 0..16 {
        let num = &t.values[act.perm[k]];
        if num.real().is_zero() && num.imag().is_zero() {
            continue;
        }
        let mut v = Complex::with_val(prec, num / den);
        v *= &zetas[act.quotient_exponent(k, 0) as usize];
        q[k] = v;
    }
    let jac = match &t.derivs {
        None => None,
        Some(dt) => {
            // ∂/∂Ω′ of θ_{σk}/θ_{σ0}, then the chain rule through
            // dΩ′ = ᵗP·dΩ·P with P = (CΩ+D)⁻¹
            let g = &red.gamma;
            let pm = inverse_c_omega_d(g, &om)?;
            let mut jac: [[Complex; 3]; 16] =
                std::array::from_fn(|_| std::array::from_fn(|_| Complex::new(prec)));
            // dΩ′ entries (11, 22, 12) for each input direction
            let dom: [[Complex; 3]; 3] = [
                sandwich(&pm, 0, 0),
                sandwich(&pm, 1, 1),
                {
                    let a = sandwich(&pm, 0, 1);
                    let b = sandwich(&pm, 1, 0);
                    std::array::from_fn(|w| Complex::with_val(prec, &a[w] + &b[w]))
                },
            ];
            for k in 0..16 {
                if q[k].real().is_zero() && q[k].imag().is_zero() {
                    continue;
                }
                let num = &t.values[act.perm[k]];
                let z = &zetas[act.quotient_exponent(k, 0) as usize];
                let mut dprime: [Complex; 3] = std::array::from_fn(|_| Complex::new(prec));
                for w in 0..3 {
                    let mut a = Complex::with_val(prec, &dt[act.perm[k]][w] * den);
                    a -= Complex::with_val(prec, num * &dt[p0][w]);
                    a /= den;
                    a /= den;
                    a *= z;
                    dprime[w] = a;
                }
                for v in 0..3 {
                    let mut s = Complex::new(prec);
                    for w in 0..3 {
                        s += Complex::with_val(prec, &dprime[w] * &dom[v][w]);
                    }
                    jac[k][v] = s;
                }
            }
            Some(jac)
        }
    };
    Ok(ThetaQuotients {
        q,
        jac,
        reduction: red,
    })
}

/// Entries (11, 22, 12) of ᵗP·E_ij·P = (row i of P)ᵀ(row j of P).
fn sandwich(p: &[[Complex; 2]; 2], i: usize, j: usize) -> [Complex; 3] {
    let prec = p[0][0].prec().0;
    let e = |r: usize, c: usize| Complex::with_val(prec, &p[i][r] * &p[j][c]);
    let mut off = e(0, 1);
    off += e(1, 0);
    off /= 2;
    [e(0, 0), e(1, 1), off]
}

fn inverse_c_omega_d(
    g: &crate::symplectic::SymplecticMatrix,
    om: &PeriodMatrix,
) -> Result<[[Complex; 2]; 2]> {
    let prec = om.prec();
    let (c, d) = (g.c(), g.d());
    let mut m: [[Complex; 2]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| Complex::new(prec)));
    for i in 0..2 {
        for j in 0..2 {
            m[i][j].assign(d[i][j]);
            for k in 0..2 {
                m[i][j] += Complex::with_val(prec, om.entry(k, j) * c[i][k]);
            }
        }
    }
    let mut det = Complex::with_val(prec, &m[0][0] * &m[1][1]);
    det -= Complex::with_val(prec, &m[0][1] * &m[1][0]);
    if det.real().is_zero() && det.imag().is_zero() {
        return Err(Error::Numeric("det(CΩ+D) vanished".into()));
    }
    let inv = |x: &Complex, neg: bool| {
        let mut z = Complex::with_val(prec, x / &det);
        if neg {
            z = -z;
        }
        z
    };
    Ok([
        [inv(&m[1][1], false), inv(&m[0][1], true)],
        [inv(&m[1][0], true), inv(&m[0][0], false)],
    ])
}

/// b′_k(Ω) = θ_k(Ω/2)/θ_0(Ω/2) for k = 1, 2, 3.
pub fn bprime(om: &PeriodMatrix, ctx: &PrecisionContext) -> Result<[Complex; 3]> {
    let t = theta_quotients_anywhere(&om.half(), ctx, false)?;
    let [_, a, b, c, ..] = t.q;
    Ok([a, b, c])
}

/// b′ with its Jacobian in (τ₁, τ₂, τ₃).
pub fn bprime_jets(om: &PeriodMatrix, ctx: &PrecisionContext) -> Result<[Jet; 3]> {
    let t = theta_quotients_anywhere(&om.half(), ctx, true)?;
    let jets = t.jets().expect("jacobian requested");
    let half = Complex::with_val(ctx.working(), 0.5);
    Ok(std::array::from_fn(|k| {
        let j = &jets[k + 1];
        Jet::new(j.v.clone(), std::array::from_fn(|v| Complex::with_val(ctx.working(), &j.d[v] * &half)))
    }))
}

/// Squares θ²_{a,b}(Ω) from the four values θ_{0,β}(Ω/2), β = index 0..3:
/// θ²[a;b](Ω) = ¼ Σ_β (−1)^(a·β) θ[0;β](Ω/2)·θ[0;β+b](Ω/2).
pub fn duplication(half: &[Complex; 4]) -> [Complex; 16] {
    let prec = half.iter().map(|z| z.prec().0).max().unwrap_or(64);
    std::array::from_fn(|k| {
        let a = k >> 2;
        let b = k & 3;
        let mut s = Complex::new(prec);
        if (a & 1) * (b & 1) + (a >> 1) * (b >> 1) == 1 {
            return s;
        }
        for beta in 0..4usize {
            let term = Complex::with_val(prec, &half[beta] * &half[beta ^ b]);
            if ((a & beta).count_ones() & 1) == 1 {
                s -= term;
            } else {
                s += term;
            }
        }
        s /= 4;
        s
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::abs_f64;
    use crate::siegel::act;
    use crate::symplectic::SymplecticMatrix;
    use crate::theta::series::theta_all_bits;
    use crate::theta::EVEN;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// A random point of F₂, sampled near the bottom where thetas vary most.
    pub(crate) fn random_f2(rng: &mut ChaCha8Rng, prec: u32) -> PeriodMatrix {
        loop {
            let y1: f64 = rng.gen_range(0.9..1.6);
            let y2: f64 = y1 + rng.gen_range(0.0..0.8);
            let y3: f64 = rng.gen_range(0.0..y1 / 2.0);
            let om = PeriodMatrix::from_f64(
                prec,
                (rng.gen_range(-0.5..0.5), y1),
                (rng.gen_range(-0.5..0.5), y2),
                (rng.gen_range(-0.5..0.5), y3),
            );
            if crate::siegel::is_in_fundamental(&om, 0.0) {
                return om;
            }
        }
    }

    fn close(a: &Complex, b: &Complex, tol: f64) -> bool {
        abs_f64(&Complex::with_val(a.prec(), a - b)) <= tol * abs_f64(b).max(1.0)
    }

    #[test]
    fn fundamental_points_need_no_transport() {
        let ctx = PrecisionContext::with_bits(128).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let om = random_f2(&mut rng, ctx.working());
        let q = theta_quotients_anywhere(&om, &ctx, false).unwrap();
        let t = theta_all(&om, &ctx, false).unwrap();
        for k in EVEN {
            let want = Complex::with_val(ctx.working(), &t.values[k] / &t.values[0]);
            assert!(close(&q.q[k], &want, 1e-35));
        }
    }

    #[test]
    fn transport_matches_direct_series() {
        let ctx = PrecisionContext::with_bits(160).unwrap();
        let prec = ctx.working();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let gens = SymplecticMatrix::generators();
        let mut checked = 0;
        while checked < 40 {
            let om = random_f2(&mut rng, prec);
            let mut g = SymplecticMatrix::identity();
            for _ in 0..rng.gen_range(1..4) {
                g = g.mul(&gens[rng.gen_range(0..4)]);
            }
            let gom = act(&g, &om).unwrap();
            let y = gom.im_f64();
            if y[0][0] * y[1][1] - y[0][1] * y[0][1] < 0.05 {
                continue;
            }
            checked += 1;
            let q = theta_quotients_anywhere(&gom, &ctx, false).unwrap();
            let t = theta_all_bits(&gom, prec, prec, false).unwrap();
            for k in EVEN {
                let want = Complex::with_val(prec, &t.values[k] / &t.values[0]);
                assert!(close(&q.q[k], &want, 1e-30), "k={k} g={g}");
            }
        }
    }

    #[test]
    fn duplication_matches_series() {
        let ctx = PrecisionContext::with_bits(200).unwrap();
        let prec = ctx.working();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let om = random_f2(&mut rng, prec);
            let th = theta_all(&om.half(), &ctx, false).unwrap();
            let full = theta_all(&om, &ctx, false).unwrap();
            let sq = duplication(&[
                th.values[0].clone(),
                th.values[1].clone(),
                th.values[2].clone(),
                th.values[3].clone(),
            ]);
            for k in EVEN {
                let want = Complex::with_val(prec, &full.values[k] * &full.values[k]);
                assert!(close(&sq[k], &want, 2f64.powi(-80)));
            }
        }
        let c = Complex::with_val(100, (1.5, 0.5));
        let sq = duplication(&[c.clone(), c.clone(), c.clone(), c.clone()]);
        assert!(close(&sq[0], &Complex::with_val(100, &c * &c), 1e-25));
        for k in [4, 8, 12, 6, 9, 15] {
            assert!(abs_f64(&sq[k]) < 1e-25);
        }
    }

    #[test]
    fn quotient_jacobian_matches_differences() {
        let ctx = PrecisionContext::with_bits(200).unwrap();
        let prec = ctx.working();
        // a point far from F₂ so that the chain rule is exercised
        let om = PeriodMatrix::from_f64(prec, (1.3, 0.35), (-0.7, 0.6), (0.2, 0.1));
        let base = theta_quotients_anywhere(&om, &ctx, true).unwrap();
        assert_ne!(base.reduction.gamma, SymplecticMatrix::identity());
        let jac = base.jac.unwrap();
        let h = 1e-8;
        for v in 0..3 {
            let shift = |s: f64| {
                let mut o = om.clone();
                let d = Complex::with_val(prec, (s * h, 0.0));
                match v {
                    0 => o.tau1 += &d,
                    1 => o.tau2 += &d,
                    _ => o.tau3 += &d,
                }
                theta_quotients_anywhere(&o, &ctx, false).unwrap()
            };
            let (p, m) = (shift(1.0), shift(-1.0));
            for k in EVEN {
                let mut fd = Complex::with_val(prec, &p.q[k] - &m.q[k]);
                fd /= 2.0 * h;
                let rel = abs_f64(&Complex::with_val(prec, &fd - &jac[k][v])) / abs_f64(&jac[k][v]).max(1e-3);
                assert!(rel < 1e-6, "k={k} v={v} rel={rel}");
            }
        }
    }

    #[test]
    fn bprime_is_level24_invariant() {
        let ctx = PrecisionContext::with_bits(128).unwrap();
        let prec = ctx.working();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let gens = crate::symplectic::generators_of(crate::symplectic::GroupId::G24).unwrap();
        for _ in 0..10 {
            let om = random_f2(&mut rng, prec);
            let g = gens[rng.gen_range(0..gens.len())].mul(&gens[rng.gen_range(0..gens.len())]);
            let a = bprime(&om, &ctx).unwrap();
            let b = bprime(&act(&g, &om).unwrap(), &ctx).unwrap();
            for k in 0..3 {
                assert!(close(&a[k], &b[k], 1e-30));
            }
        }
    }

    #[test]
    fn bprime_action_of_special_matrices() {
        let ctx = PrecisionContext::with_bits(128).unwrap();
        let prec = ctx.working();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let om = random_f2(&mut rng, prec);
        let b = bprime(&om, &ctx).unwrap();
        let g = crate::symplectic::special("gamma_134").unwrap();
        let c = bprime(&act(&g, &om).unwrap(), &ctx).unwrap();
        assert!(close(&c[0], &Complex::with_val(prec, -&b[0]), 1e-30));
        assert!(close(&c[1], &b[1], 1e-30) && close(&c[2], &b[2], 1e-30));
        let g = crate::symplectic::special("gamma_410").unwrap();
        let c = bprime(&act(&g, &om).unwrap(), &ctx).unwrap();
        assert!(close(&c[0], &b[1], 1e-30) && close(&c[1], &b[0], 1e-30) && close(&c[2], &b[2], 1e-30));
    }
}
