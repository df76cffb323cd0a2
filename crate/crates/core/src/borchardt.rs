//! The Borchardt mean of four complex numbers and the recovery of a period
//! matrix in F₂ from its squared theta quotients.

use rug::Complex;

use crate::error::{Error, Result};
use crate::numerics::scalar::log2_abs;
use crate::numerics::PrecisionContext;
use crate::siegel::PeriodMatrix;

#[derive(Clone, Debug)]
pub struct BorchardtState {
    pub u: [Complex; 4],
}

/// Square root of `u` on the side of `v0`: |v0 − v| ≤ |v0 + v|, ties broken
/// towards Im(v/v0) > 0. Returns the root and whether the choice was a
/// near-tie at relative tolerance 2^-tie_bits.
fn good_root(u: &Complex, v0: &Complex, tie_bits: f64) -> (Complex, bool) {
    let prec = u.prec().0;
    if u.real().is_zero() && u.imag().is_zero() {
        return (Complex::new(prec), false);
    }
    let v = Complex::with_val(prec, u.sqrt_ref());
    let minus = log2_abs(&Complex::with_val(prec, v0 - &v));
    let plus = log2_abs(&Complex::with_val(prec, v0 + &v));
    let scale = minus.max(plus);
    let near_tie = (minus.exp2() - plus.exp2()).abs() <= (scale - tie_bits).exp2();
    let flip = if near_tie {
        let ratio = Complex::with_val(prec, &v / v0);
        ratio.imag().is_sign_negative()
    } else {
        minus > plus
    };
    (if flip { -v } else { v }, near_tie)
}

impl BorchardtState {
    pub fn new(u: [Complex; 4]) -> Self {
        Self { u }
    }

    /// One step of the sequence. Returns whether a root choice was a
    /// near-tie.
    pub fn step(&mut self, tie_bits: f64) -> bool {
        let prec = self.u[0].prec().0;
        let v0 = Complex::with_val(prec, self.u[0].sqrt_ref());
        let mut ties = false;
        let mut v = [v0.clone(), Complex::new(prec), Complex::new(prec), Complex::new(prec)];
        if !(v0.real().is_zero() && v0.imag().is_zero()) {
            for k in 1..4 {
                let (r, t) = good_root(&self.u[k], &v0, tie_bits);
                v[k] = r;
                ties |= t;
            }
        }
        let next: [Complex; 4] = std::array::from_fn(|k| {
            let mut s = Complex::new(prec);
            for k1 in 0..4 {
                s += Complex::with_val(prec, &v[k1] * &v[k1 ^ k]);
            }
            s /= 4;
            s
        });
        self.u = next;
        ties
    }

    /// log2 of max_k |u_k − u_0| relative to |u_0|.
    pub fn spread_log2(&self) -> f64 {
        let prec = self.u[0].prec().0;
        let s = log2_abs(&self.u[0]);
        (1..4)
            .map(|k| log2_abs(&Complex::with_val(prec, &self.u[k] - &self.u[0])))
            .fold(f64::NEG_INFINITY, f64::max)
            - s
    }
}

/// B₂(z₁, z₂, z₃): the common limit of the sequence started at
/// (1, z₁, z₂, z₃).
pub fn borchardt_mean(z1: &Complex, z2: &Complex, z3: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let prec = ctx.working();
    let mut st = BorchardtState::new([
        Complex::with_val(prec, 1),
        Complex::with_val(prec, z1),
        Complex::with_val(prec, z2),
        Complex::with_val(prec, z3),
    ]);
    let max_iter = 4 * (ctx.n_bits as f64).log2().ceil() as usize + 64;
    let tie_bits = ctx.n_bits as f64 - 8.0;
    for it in 0..=max_iter {
        if st.spread_log2() < -(ctx.n_bits as f64) {
            return Ok(st.u[0].clone());
        }
        if it == max_iter {
            break;
        }
        if st.step(tie_bits) {
            log::warn!("Borchardt root choice was a near-tie at step {it}");
        }
    }
    Err(Error::Stall(max_iter))
}

fn ratio(a: &Complex, b: &Complex) -> Complex {
    Complex::with_val(a.prec().0.max(b.prec().0), a / b)
}

/// Both square-root candidates for τ₃ together with τ₁ and τ₂, from the ten
/// squared quotients b_k = θ_k²/θ_0² (indexed by characteristic, b₀ = 1).
pub fn recover_tau_candidates(b: &[Complex; 16], ctx: &PrecisionContext) -> Result<[PeriodMatrix; 2]> {
    let prec = ctx.working();
    let small = |z: &Complex| log2_abs(z) < -(ctx.n_bits as f64) / 2.0;
    if small(&b[4]) || small(&b[8]) {
        return Err(Error::Vanishing);
    }
    let one = Complex::with_val(prec, 1);
    let i = Complex::with_val(prec, (0, 1));
    let inv_t0sq = borchardt_mean(&b[1], &b[2], &b[3], ctx)?;
    let t0sq = ratio(&one, &inv_t0sq);
    // τ₁ = i / (θ₄² B₂(θ₀²/θ₄², θ₆²/θ₄², θ₂²/θ₄²))
    let t4sq = Complex::with_val(prec, &b[4] * &t0sq);
    let m1 = borchardt_mean(&ratio(&one, &b[4]), &ratio(&b[6], &b[4]), &ratio(&b[2], &b[4]), ctx)?;
    let tau1 = ratio(&i, &Complex::with_val(prec, &t4sq * &m1));
    // τ₂ = i / (θ₈² B₂(θ₉²/θ₈², θ₀²/θ₈², θ₁²/θ₈²))
    let t8sq = Complex::with_val(prec, &b[8] * &t0sq);
    let m2 = borchardt_mean(&ratio(&b[9], &b[8]), &ratio(&one, &b[8]), &ratio(&b[1], &b[8]), ctx)?;
    let tau2 = ratio(&i, &Complex::with_val(prec, &t8sq * &m2));
    // τ₃² − τ₁τ₂ = 1 / (θ₀² B₂(b₈, b₄, b₁₂))
    let m3 = borchardt_mean(&b[8], &b[4], &b[12], ctx)?;
    let mut sq = ratio(&one, &Complex::with_val(prec, &t0sq * &m3));
    sq += Complex::with_val(prec, &tau1 * &tau2);
    let mut t3 = Complex::with_val(prec, sq.sqrt_ref());
    if t3.imag().is_sign_negative() {
        t3 = -t3;
    }
    let neg = Complex::with_val(prec, -&t3);
    Ok([
        PeriodMatrix::new(tau1.clone(), tau2.clone(), t3),
        PeriodMatrix::new(tau1, tau2, neg),
    ])
}

/// τ ∈ F₂ from its squared quotients, taking the branch with Im τ₃ ≥ 0.
pub fn recover_tau(b: &[Complex; 16], ctx: &PrecisionContext) -> Result<PeriodMatrix> {
    let [t, _] = recover_tau_candidates(b, ctx)?;
    let tol = -(ctx.n_bits as f64) / 4.0;
    if log2_abs(&t.tau3) >= tol && log2_abs_imag(&t.tau3) < tol {
        return Err(Error::BranchAmbiguous);
    }
    Ok(t)
}

fn log2_abs_imag(z: &Complex) -> f64 {
    crate::numerics::scalar::log2_abs_real(z.imag())
}
