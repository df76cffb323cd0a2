use rug::float::Constant;
use rug::{Complex, Float};

use super::characteristic::Characteristic;
use crate::symplectic::SymplecticMatrix;

/// How γ moves theta constants:
/// θ_m(Ω) = c(γ, Ω) · ζ₈^zeta8[m] · θ_perm[m](γΩ),
/// where c(γ, Ω) does not depend on m. Quotients of thetas at the same
/// point therefore transport with the ζ₈ factors alone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaAction {
    pub gamma: SymplecticMatrix,
    pub perm: [usize; 16],
    pub zeta8: [u8; 16],
}

fn mv(m: &[[i64; 2]; 2], v: [i64; 2]) -> [i64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn dot(u: [i64; 2], v: [i64; 2]) -> i64 {
    u[0] * v[0] + u[1] * v[1]
}

fn tr(m: &[[i64; 2]; 2]) -> [[i64; 2]; 2] {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

fn diag_of_product(x: &[[i64; 2]; 2], y_t: &[[i64; 2]; 2]) -> [i64; 2] {
    // diag(X·Yᵀ) given Yᵀ
    [
        x[0][0] * y_t[0][0] + x[0][1] * y_t[1][0],
        x[1][0] * y_t[0][1] + x[1][1] * y_t[1][1],
    ]
}

/// Image characteristic and the exponent 8φ (mod 8) of the transformation
/// formula for integral characteristics m = (a; b):
/// θ[γ∘m](γΩ) = κ(γ)·e(φ_m(γ))·√det(CΩ+D)·θ[m](Ω).
/// Returns (n1, n2, 8φ) with γ∘m = (n1; n2) not yet reduced mod 2.
pub fn igusa_image(g: &SymplecticMatrix, ch: Characteristic) -> ([i64; 2], [i64; 2], i64) {
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    let m1 = [ch.a[0] as i64, ch.a[1] as i64];
    let m2 = [ch.b[0] as i64, ch.b[1] as i64];
    let cdt = diag_of_product(&c, &tr(&d));
    let abt = diag_of_product(&a, &tr(&b));
    let da = mv(&d, m1);
    let cb = mv(&c, m2);
    let ba = mv(&b, m1);
    let ab = mv(&a, m2);
    let n1 = [da[0] - cb[0] + cdt[0], da[1] - cb[1] + cdt[1]];
    let n2 = [-ba[0] + ab[0] + abt[0], -ba[1] + ab[1] + abt[1]];
    // aᵀBᵀDa = (Ba)·(Da), bᵀAᵀCb = (Ab)·(Cb), aᵀBᵀCb = (Ba)·(Cb)
    let quad = dot(ba, da) + dot(ab, cb) - 2 * dot(ba, cb);
    let lin = dot([da[0] - cb[0], da[1] - cb[1]], abt);
    (n1, n2, -quad + 2 * lin)
}

pub fn theta_action_of(g: &SymplecticMatrix) -> ThetaAction {
    let mut perm = [0usize; 16];
    let mut zeta8 = [0u8; 16];
    for ch in Characteristic::all() {
        let (n1, n2, phi8) = igusa_image(g, ch);
        let r1 = [n1[0].rem_euclid(2), n1[1].rem_euclid(2)];
        let r2 = [n2[0].rem_euclid(2), n2[1].rem_euclid(2)];
        let k2 = [(n2[0] - r2[0]) / 2, (n2[1] - r2[1]) / 2];
        // θ[n1; r2 + 2k2] = (-1)^(n1·k2) θ[n1; r2], and shifting n1 by even
        // vectors leaves θ unchanged
        let s = dot(n1, k2).rem_euclid(2);
        let img = Characteristic::new([r1[0] as u8, r1[1] as u8], [r2[0] as u8, r2[1] as u8]);
        perm[ch.index()] = img.index();
        zeta8[ch.index()] = (-phi8 + 4 * s).rem_euclid(8) as u8;
    }
    ThetaAction {
        gamma: *g,
        perm,
        zeta8,
    }
}

impl ThetaAction {
    /// Exponent e with θ_i(Ω)/θ_j(Ω) = ζ₈^e · θ_perm[i](γΩ)/θ_perm[j](γΩ).
    pub fn quotient_exponent(&self, i: usize, j: usize) -> u8 {
        (self.zeta8[i] + 8 - self.zeta8[j]) % 8
    }

    /// Action on the quotients θ_k/θ_0, k = 1, 2, 3, when it permutes them
    /// up to 4th roots of unity: entry k−1 is (j, α) with
    /// θ_j/θ_0 (γZ) = i^α · θ_k/θ_0 (Z).
    pub fn level24_action(&self) -> Option<[(usize, u8); 3]> {
        let p0 = self.perm[0];
        if p0 > 3 || (1..4).any(|k| self.perm[k] > 3) {
            return None;
        }
        let mut out = [(0usize, 0u8); 3];
        for k in 1..4 {
            let e = self.quotient_exponent(k, 0);
            if e % 2 == 1 || p0 != 0 {
                return None;
            }
            out[k - 1] = (self.perm[k], ((8 - e) % 8) / 2);
        }
        Some(out)
    }
}

/// The matrix γ̃ with γ̃·(Ω/2) = (γΩ)/2, defined when B is even.
pub fn half_conjugate(g: &SymplecticMatrix) -> Option<SymplecticMatrix> {
    let (a, b, c, d) = (g.a(), g.b(), g.c(), g.d());
    if b.iter().flatten().any(|x| x % 2 != 0) {
        return None;
    }
    let b2 = [[b[0][0] / 2, b[0][1] / 2], [b[1][0] / 2, b[1][1] / 2]];
    let c2 = [[c[0][0] * 2, c[0][1] * 2], [c[1][0] * 2, c[1][1] * 2]];
    SymplecticMatrix::from_blocks(a, b2, c2, d)
}

/// ζ₈^e at precision `prec`.
pub fn zeta8_pow(e: u8, prec: u32) -> Complex {
    let pi = Float::with_val(prec, Constant::Pi);
    let ang = Float::with_val(prec, &pi * (e % 8) as u32) / 4u32;
    let ang = Float::with_val(prec, ang);
    let (s, c) = ang.sin_cos(Float::new(prec));
    Complex::with_val(prec, (c, s))
}
