//! Siegel modular forms h₄, h₆, h₁₀, h₁₂, h₁₆ built from theta constants,
//! and the three invariant systems: Igusa j, Streng i and the level-(2,4)
//! theta quotients b′.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use rug::Complex;

use crate::error::{Error, Result};
use crate::numerics::scalar::log2_abs;
use crate::numerics::{Jet, PrecisionContext, Scalar};
use crate::siegel::PeriodMatrix;
use crate::symplectic::SymplecticMatrix;
use crate::theta::{bprime, bprime_jets, igusa_image, theta_quotients_anywhere, Characteristic, EVEN};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InvariantKind {
    Igusa,
    Streng,
    ThetaQuotient,
}

impl InvariantKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "igusa" | "j" => Ok(Self::Igusa),
            "streng" | "i" => Ok(Self::Streng),
            "bprime" | "b'" | "theta" => Ok(Self::ThetaQuotient),
            _ => Err(Error::Parse(format!("unknown invariant kind {s:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Igusa => "igusa",
            Self::Streng => "streng",
            Self::ThetaQuotient => "bprime",
        }
    }
}

#[derive(Clone, Debug)]
pub struct InvariantTriple<T: Scalar = Complex> {
    pub kind: InvariantKind,
    pub v: [T; 3],
}

#[derive(Clone, Debug)]
pub struct SiegelFormValues<T: Scalar = Complex> {
    pub h4: T,
    pub h6: T,
    pub h10: T,
    pub h12: T,
    pub h16: T,
}

/// Signed triples of h₆ and the sextets of h₁₂, derived once from the
/// transformation law of theta constants.
#[derive(Clone, Debug)]
pub struct FormTables {
    pub h6_triples: Vec<([usize; 3], i8)>,
    pub h12_sextets: Vec<[usize; 6]>,
}

fn char_vec(k: usize) -> [u8; 4] {
    let c = Characteristic::from_index(k);
    [c.a[0], c.a[1], c.b[0], c.b[1]]
}

/// Sextets: complements in the even set of the 4-subsets whose
/// characteristic vectors sum to zero mod 2.
fn derive_sextets() -> Vec<[usize; 6]> {
    let mut out = Vec::new();
    for i in 0..10 {
        for j in i + 1..10 {
            for k in j + 1..10 {
                for l in k + 1..10 {
                    let q = [EVEN[i], EVEN[j], EVEN[k], EVEN[l]];
                    let mut s = [0u8; 4];
                    for &m in &q {
                        for (x, y) in s.iter_mut().zip(char_vec(m)) {
                            *x ^= y;
                        }
                    }
                    if s == [0; 4] {
                        let rest: Vec<usize> = EVEN.iter().copied().filter(|e| !q.contains(e)).collect();
                        out.push(rest.try_into().expect("six remaining"));
                    }
                }
            }
        }
    }
    out
}

/// Signs of the triple monomials (θᵢθⱼθₖ)⁴ in h₆. Under each generator γ
/// of Sp₄(ℤ) the monomial of T picks up ε·det(CΩ+D)⁶ and moves to the
/// monomial of γ(T), with ε = κ(γ)⁴·e(4Σ_{m∈T} φ_m(γ)) = ±1 and
/// κ(γ)⁴ = e(−2Σ_{m even} φ_m(γ)) forced by the trivial character of h₁₀.
/// Modularity of weight 6 requires c_T = ε·c_γ(T). The 120 triples split
/// into two orbits; the one where these constraints are consistent carries
/// h₆. The global sign is fixed by h₆ → 4 at the cusp (triples inside
/// {0,1,2,3} positive).
fn derive_h6() -> Vec<([usize; 3], i8)> {
    let mut triples = Vec::new();
    for i in 0..10 {
        for j in i + 1..10 {
            for k in j + 1..10 {
                triples.push([EVEN[i], EVEN[j], EVEN[k]]);
            }
        }
    }
    let mut edges: BTreeMap<[usize; 3], Vec<([usize; 3], u8)>> = BTreeMap::new();
    for g in SymplecticMatrix::generators() {
        let mut perm = [0usize; 16];
        let mut phi8 = [0i64; 16];
        for k in 0..16 {
            let ch = Characteristic::from_index(k);
            let (n1, n2, p8) = igusa_image(&g, ch);
            let img = Characteristic::new(
                [n1[0].rem_euclid(2) as u8, n1[1].rem_euclid(2) as u8],
                [n2[0].rem_euclid(2) as u8, n2[1].rem_euclid(2) as u8],
            );
            perm[k] = img.index();
            phi8[k] = p8;
        }
        let kappa4: i64 = -2 * EVEN.iter().map(|&m| phi8[m]).sum::<i64>();
        for t in &triples {
            let e = (kappa4 + 4 * t.iter().map(|&m| phi8[m]).sum::<i64>()).rem_euclid(8);
            assert!(e == 0 || e == 4, "monomial factor must be ±1");
            let mut img = [perm[t[0]], perm[t[1]], perm[t[2]]];
            img.sort();
            let flip = (e / 4) as u8;
            edges.entry(*t).or_default().push((img, flip));
            edges.entry(img).or_default().push((*t, flip));
        }
    }
    let mut sign: BTreeMap<[usize; 3], u8> = BTreeMap::new();
    let mut chosen = None;
    for t in &triples {
        if sign.contains_key(t) {
            continue;
        }
        sign.insert(*t, 0);
        let mut comp = vec![*t];
        let mut stack = vec![*t];
        let mut ok = true;
        while let Some(u) = stack.pop() {
            let su = sign[&u];
            for &(v, f) in &edges[&u] {
                let sv = su ^ f;
                match sign.get(&v) {
                    None => {
                        sign.insert(v, sv);
                        comp.push(v);
                        stack.push(v);
                    }
                    Some(&x) if x != sv => ok = false,
                    _ => {}
                }
            }
        }
        if ok {
            assert!(chosen.is_none(), "only one consistent orbit expected");
            chosen = Some(comp);
        }
    }
    let comp = chosen.expect("a consistent orbit exists");
    let cusp: BTreeSet<usize> = [0, 1, 2, 3].into_iter().collect();
    let anchor = comp
        .iter()
        .find(|t| t.iter().all(|m| cusp.contains(m)))
        .expect("orbit meets the cusp triples");
    let flip = sign[anchor];
    let mut out: Vec<([usize; 3], i8)> = comp
        .into_iter()
        .map(|t| (t, if sign[&t] ^ flip == 0 { 1 } else { -1 }))
        .collect();
    out.sort();
    out
}

pub fn form_tables() -> &'static FormTables {
    static T: OnceLock<FormTables> = OnceLock::new();
    T.get_or_init(|| FormTables {
        h6_triples: derive_h6(),
        h12_sextets: derive_sextets(),
    })
}

/// The forms from the ten even thetas (indexed by characteristic number;
/// entries at odd indices are ignored). Any common scaling of the thetas
/// scales h_k by λ^(2k).
pub fn siegel_forms<T: Scalar>(theta: &[T; 16]) -> SiegelFormValues<T> {
    let tab = form_tables();
    let sq: Vec<T> = (0..16).map(|k| theta[k].mul(&theta[k])).collect();
    let t4: Vec<T> = sq.iter().map(|s| s.mul(s)).collect();
    let zero = theta[0].zero_like();
    let mut h4 = zero.clone();
    let mut h10 = theta[0].one_like();
    for &k in &EVEN {
        h4 = h4.add(&t4[k].mul(&t4[k]));
        h10 = h10.mul(&sq[k]);
    }
    let mut h6 = zero.clone();
    for (t, s) in &tab.h6_triples {
        let m = t4[t[0]].mul(&t4[t[1]]).mul(&t4[t[2]]);
        h6 = if *s > 0 { h6.add(&m) } else { h6.sub(&m) };
    }
    let mut h12 = zero;
    for s in &tab.h12_sextets {
        let mut m = t4[s[0]].clone();
        for &k in &s[1..] {
            m = m.mul(&t4[k]);
        }
        h12 = h12.add(&m);
    }
    let three = {
        let one = theta[0].one_like();
        one.add(&one).add(&one)
    };
    let two_h6h10 = h6.mul(&h10).add(&h6.mul(&h10));
    let h16 = h12.mul(&h4).sub(&two_h6h10).div(&three);
    SiegelFormValues { h4, h6, h10, h12, h16 }
}

fn powi<T: Scalar>(x: &T, n: u32) -> T {
    let mut acc = x.one_like();
    for _ in 0..n {
        acc = acc.mul(x);
    }
    acc
}

/// Refuse points where h₁₀ is below 2^(−bits/2)·max|θ|²⁰.
fn check_h10<T: Scalar>(f: &SiegelFormValues<T>, theta: &[T; 16], bits: u32) -> Result<()> {
    let m = EVEN.iter().map(|&k| theta[k].log2_mag()).fold(f64::NEG_INFINITY, f64::max);
    if f.h10.is_zero() || f.h10.log2_mag() < 20.0 * m - bits as f64 / 2.0 {
        return Err(Error::ProductOfElliptic);
    }
    Ok(())
}

pub fn igusa_from_forms<T: Scalar>(f: &SiegelFormValues<T>) -> InvariantTriple<T> {
    let h10_4 = powi(&f.h10, 4);
    let h10_6 = h10_4.mul(&f.h10).mul(&f.h10);
    let h12_2 = f.h12.mul(&f.h12);
    let h12_3 = h12_2.mul(&f.h12);
    let h12_5 = h12_3.mul(&h12_2);
    InvariantTriple {
        kind: InvariantKind::Igusa,
        v: [
            h12_5.div(&h10_6),
            f.h4.mul(&h12_3).div(&h10_4),
            f.h16.mul(&h12_2).div(&h10_4),
        ],
    }
}

pub fn streng_from_forms<T: Scalar>(f: &SiegelFormValues<T>) -> InvariantTriple<T> {
    let h10_2 = f.h10.mul(&f.h10);
    let h4_2 = f.h4.mul(&f.h4);
    let h4_5 = h4_2.mul(&h4_2).mul(&f.h4);
    InvariantTriple {
        kind: InvariantKind::Streng,
        v: [
            f.h4.mul(&f.h6).div(&f.h10),
            h4_2.mul(&f.h12).div(&h10_2),
            h4_5.div(&h10_2),
        ],
    }
}

fn require_nonzero<T: Scalar>(x: &T, what: &str) -> Result<()> {
    let bits = x.precision_bits().unwrap_or(u32::MAX) as f64;
    if x.is_zero() || x.log2_mag() < -bits / 2.0 {
        return Err(Error::Singular(format!("{what} vanishes")));
    }
    Ok(())
}

/// Birational change between Igusa and Streng triples, in the direction
/// given by the input's kind.
pub fn streng_igusa_convert<T: Scalar>(t: &InvariantTriple<T>) -> Result<InvariantTriple<T>> {
    let [a, b, c] = &t.v;
    let two = a.one_like().add(&a.one_like());
    let three = two.add(&a.one_like());
    match t.kind {
        InvariantKind::Igusa => {
            // i₁ = j₂(j₂−3j₃)/(2j₁), i₂ = j₂²/j₁, i₃ = j₂⁵/j₁³
            require_nonzero(a, "j1")?;
            let j2sq = b.mul(b);
            let i1 = b.mul(&b.sub(&three.mul(c))).div(&two.mul(a));
            let i2 = j2sq.div(a);
            let i3 = powi(b, 5).div(&powi(a, 3));
            Ok(InvariantTriple {
                kind: InvariantKind::Streng,
                v: [i1, i2, i3],
            })
        }
        InvariantKind::Streng => {
            // j₁ = i₂⁵/i₃², j₂ = i₂³/i₃, j₃ = i₂²(i₂−2i₁)/(3i₃)
            require_nonzero(c, "i3")?;
            let j1 = powi(b, 5).div(&c.mul(c));
            let j2 = powi(b, 3).div(c);
            let j3 = b.mul(b).mul(&b.sub(&two.mul(a))).div(&three.mul(c));
            Ok(InvariantTriple {
                kind: InvariantKind::Igusa,
                v: [j1, j2, j3],
            })
        }
        InvariantKind::ThetaQuotient => Err(Error::Config("theta quotients have no Igusa/Streng conversion".into())),
    }
}

/// Squared quotients b_k = θ_k²(Ω)/θ₀²(Ω) from b′ by duplication.
pub fn b_from_bprime<T: Scalar>(bp: &[T; 3]) -> Result<[T; 16]> {
    let one = bp[0].one_like();
    let h = [one, bp[0].clone(), bp[1].clone(), bp[2].clone()];
    let sq: [T; 16] = std::array::from_fn(|k| {
        let (a, b) = (k >> 2, k & 3);
        let mut s = h[0].zero_like();
        if (a & 1) * (b & 1) + (a >> 1) * (b >> 1) == 1 {
            return s;
        }
        for beta in 0..4usize {
            let t = h[beta].mul(&h[beta ^ b]);
            s = if (a & beta).count_ones() & 1 == 1 { s.sub(&t) } else { s.add(&t) };
        }
        s
    });
    require_nonzero(&sq[0], "theta_0^2")?;
    Ok(std::array::from_fn(|k| sq[k].div(&sq[0])))
}

/// b′ from the ten squared quotients.
pub fn bprime_from_b<T: Scalar>(b: &[T; 16]) -> Result<[T; 3]> {
    let den = b[0].one_like().add(&b[4]).add(&b[8]).add(&b[12]);
    require_nonzero(&den, "1 + b4 + b8 + b12")?;
    Ok([
        b[1].add(&b[9]).div(&den),
        b[2].add(&b[6]).div(&den),
        b[3].add(&b[15]).div(&den),
    ])
}

/// Invariant triple at an arbitrary point of ℍ₂.
pub fn invariants_at(om: &PeriodMatrix, kind: InvariantKind, ctx: &PrecisionContext) -> Result<InvariantTriple> {
    match kind {
        InvariantKind::ThetaQuotient => Ok(InvariantTriple {
            kind,
            v: bprime(om, ctx)?,
        }),
        _ => {
            let q = theta_quotients_anywhere(om, ctx, false)?;
            let f = siegel_forms(&q.q);
            check_h10(&f, &q.q, ctx.n_bits)?;
            Ok(match kind {
                InvariantKind::Igusa => igusa_from_forms(&f),
                _ => streng_from_forms(&f),
            })
        }
    }
}

/// Invariant triple with its Jacobian in (τ₁, τ₂, τ₃).
pub fn invariant_jets(om: &PeriodMatrix, kind: InvariantKind, ctx: &PrecisionContext) -> Result<[Jet; 3]> {
    match kind {
        InvariantKind::ThetaQuotient => bprime_jets(om, ctx),
        _ => {
            let q = theta_quotients_anywhere(om, ctx, true)?;
            let jets: [Jet; 16] = q.jets().expect("jacobian requested").try_into().expect("16 jets");
            let f = siegel_forms(&jets);
            check_h10(&f, &jets, ctx.n_bits)?;
            Ok(match kind {
                InvariantKind::Igusa => igusa_from_forms(&f).v,
                _ => streng_from_forms(&f).v,
            })
        }
    }
}

/// log2 of the largest entry, for scale-aware comparisons.
pub fn triple_scale(v: &[Complex; 3]) -> f64 {
    v.iter().map(log2_abs).fold(f64::NEG_INFINITY, f64::max)
}
