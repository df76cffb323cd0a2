//! Inverting invariant maps: from a target triple back to a period matrix.
//!
//! The general route is predictor–corrector continuation in invariant space
//! from a seed point of F₂, with Newton corrections driven by the analytic
//! Jacobian of the theta series. For b′ targets coming from F₂ points the
//! Borchardt mean gives the answer directly.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Complex;

use crate::borchardt::recover_tau_candidates;
use crate::error::{Error, Result};
use crate::invariants::{b_from_bprime, invariant_jets, invariants_at, InvariantKind, InvariantTriple};
use crate::numerics::linalg::solve;
use crate::numerics::scalar::{log2_abs, reprec};
use crate::numerics::{Jet, PrecisionContext};
use crate::siegel::{act, reduce_to_fundamental, sample_fundamental, PeriodMatrix};
use crate::symplectic::g24_table;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InversionMethod {
    BorchardtDirect,
    NewtonContinuation,
}

#[derive(Clone, Debug)]
pub struct InversionResult {
    pub omega: PeriodMatrix,
    /// log2 of max |f_i(Ω) − target_i| relative to max(1, |target|).
    pub residual_log2: f64,
    /// Accepted continuation steps (0 for the direct method).
    pub path_length: usize,
    pub method: InversionMethod,
}

pub const SEED_POOL_SIZE: usize = 16;
const MAX_PATH_STEPS: usize = 600;
const MAX_CORRECTOR_ITERS: usize = 7;
const MIN_STEP: f64 = 1.0 / 65536.0;
const POLISH_ITERS: usize = 12;

/// Residual budget above 2^-n_bits accepted at the end of the polish.
pub const RESIDUAL_SLACK_BITS: f64 = 48.0;

/// The fixed pool of continuation seeds: points of F₂ drawn from a constant
/// seed, so every inversion is reproducible.
pub fn seed_pool(prec: u32) -> Vec<PeriodMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_900d);
    (0..SEED_POOL_SIZE)
        .map(|_| sample_fundamental(&mut rng, prec))
        .collect()
}

fn scale_of(v: &[Complex; 3]) -> f64 {
    v.iter().map(log2_abs).fold(0.0, f64::max)
}

/// log2 max |a_i − b_i|, relative to max(1, |b|).
fn rel_residual(a: &[Complex; 3], b: &[Complex; 3]) -> f64 {
    let prec = a[0].prec().0;
    let d = (0..3)
        .map(|i| log2_abs(&Complex::with_val(prec, &a[i] - &b[i])))
        .fold(f64::NEG_INFINITY, f64::max);
    d - scale_of(b)
}

fn values(j: &[Jet; 3]) -> [Complex; 3] {
    std::array::from_fn(|i| j[i].v.clone())
}

/// One Newton update Ω ← Ω + J⁻¹(goal − f(Ω)); also returns the residual at
/// the input point.
fn newton_update(
    om: &PeriodMatrix,
    goal: &[Complex; 3],
    kind: InvariantKind,
    ctx: &PrecisionContext,
) -> Result<(PeriodMatrix, f64)> {
    let prec = ctx.working();
    let jets = invariant_jets(om, kind, ctx)?;
    let v = values(&jets);
    let res = rel_residual(&v, goal);
    let rhs: Vec<Complex> = (0..3).map(|i| Complex::with_val(prec, &goal[i] - &v[i])).collect();
    let jac: Vec<Vec<Complex>> = (0..3).map(|i| jets[i].d.to_vec()).collect();
    let delta = solve(jac, rhs, 0.75 * prec as f64).map_err(|_| Error::SingularTarget)?;
    let next = PeriodMatrix::new(
        Complex::with_val(prec, &om.tau1 + &delta[0]),
        Complex::with_val(prec, &om.tau2 + &delta[1]),
        Complex::with_val(prec, &om.tau3 + &delta[2]),
    );
    Ok((next, res))
}

/// Newton from `start` towards `goal` until the relative residual is below
/// 2^tol. Fails unless every iteration contracts.
fn correct(
    start: &PeriodMatrix,
    goal: &[Complex; 3],
    kind: InvariantKind,
    ctx: &PrecisionContext,
    tol: f64,
) -> Result<PeriodMatrix> {
    let mut om = start.clone();
    let mut last = f64::INFINITY;
    for _ in 0..MAX_CORRECTOR_ITERS {
        let (next, res) = newton_update(&om, goal, kind, ctx)?;
        if res < tol {
            return Ok(om);
        }
        if res > last - 0.5 {
            return Err(Error::PathFailure("corrector does not contract".into()));
        }
        if !next.is_in_h2() {
            return Err(Error::PathFailure("corrector left H2".into()));
        }
        last = res;
        om = next;
    }
    Err(Error::PathFailure("corrector iteration budget exhausted".into()))
}

fn badness(om: &PeriodMatrix) -> f64 {
    let y = om.im_f64();
    let tr = y[0][0] + y[1][1];
    let det = y[0][0] * y[1][1] - y[0][1] * y[0][1];
    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
    let lam = tr / 2.0 - disc;
    let w = om.to_c64();
    let big = w.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    -lam.max(1e-300).ln() + (1.0 + big).ln()
}

/// An equivalent point (under Γ₂ for j/i, under Γ(2,4) for b′) that is
/// better conditioned, if one is found.
fn reanchor(om: &PeriodMatrix, kind: InvariantKind) -> Result<PeriodMatrix> {
    let red = reduce_to_fundamental(om)?;
    let cand = match kind {
        InvariantKind::ThetaQuotient => {
            // Ω = g·Ω_red with g = γ⁻¹ = h·s, h ∈ Γ(2,4)
            let g = red.gamma.inverse();
            let t = g24_table();
            let s = t.reps[t
                .lookup(&g)
                .ok_or_else(|| Error::Numeric("transversal lookup failed".into()))?];
            act(&s, &red.omega_reduced)?
        }
        _ => red.omega_reduced,
    };
    Ok(if badness(&cand) < badness(om) { cand } else { om.clone() })
}

fn lerp(a: &[Complex; 3], b: &[Complex; 3], t: f64, prec: u32) -> [Complex; 3] {
    std::array::from_fn(|i| {
        let d = Complex::with_val(prec, &b[i] - &a[i]);
        Complex::with_val(prec, &a[i] + d * t)
    })
}

/// Follow v(t) = (1−t)v₀ + t·target from `seed` at the tracking precision.
fn track(
    seed: &PeriodMatrix,
    target: &[Complex; 3],
    kind: InvariantKind,
    ctx: &PrecisionContext,
) -> Result<(PeriodMatrix, usize)> {
    let low = ctx.at_bits(ctx.n_low_bits);
    let prec = low.working();
    let target: [Complex; 3] = std::array::from_fn(|i| reprec(&target[i], prec));
    let mut om = seed.with_prec(prec);
    let v0 = invariants_at(&om, kind, &low)?.v;
    let tol = -0.6 * low.n_bits as f64;
    let (mut t, mut h) = (0.0f64, 0.25f64);
    let mut steps = 0;
    let mut attempts = 0;
    while t < 1.0 {
        attempts += 1;
        if attempts > MAX_PATH_STEPS {
            return Err(Error::PathFailure("step budget exhausted".into()));
        }
        let t1 = (t + h).min(1.0);
        let goal = lerp(&v0, &target, t1, prec);
        // loose tolerance along the way, tight at the end
        let step_tol = if t1 < 1.0 { tol / 3.0 } else { tol };
        match correct(&om, &goal, kind, &low, step_tol) {
            Ok(next) => {
                om = reanchor(&next, kind)?;
                t = t1;
                h = (h * 2.0).min(0.5);
                steps += 1;
            }
            Err(Error::PathFailure(_)) | Err(Error::SingularTarget) | Err(Error::VanishingDenominator) => {
                h /= 2.0;
                if h < MIN_STEP {
                    return Err(Error::PathFailure(format!("step size underflow at t = {t:.4}")));
                }
            }
            Err(e) => return Err(e),
        }
    }
    Ok((om, steps))
}

/// Newton at rising precision until the residual reaches 2^(-n_bits + slack).
pub fn polish(
    om: &PeriodMatrix,
    target: &[Complex; 3],
    kind: InvariantKind,
    ctx: &PrecisionContext,
) -> Result<(PeriodMatrix, f64)> {
    let goal_res = -(ctx.n_bits as f64) + RESIDUAL_SLACK_BITS;
    let mut om = om.with_prec(ctx.working());
    let mut acc = ctx.n_low_bits as f64 / 2.0;
    let mut last = f64::INFINITY;
    for _ in 0..POLISH_ITERS {
        let bits = ((2.0 * acc) as u32 + 32).min(ctx.n_bits);
        let c = ctx.at_bits(bits);
        let goal: [Complex; 3] = std::array::from_fn(|i| reprec(&target[i], c.working()));
        let (next, res) = newton_update(&om.with_prec(c.working()), &goal, kind, &c)?;
        if bits == ctx.n_bits && res < goal_res {
            return Ok((om, res));
        }
        if bits == ctx.n_bits && res > last - 1.0 {
            return Err(Error::Precision(format!("polish stalled at 2^{res:.1}")));
        }
        last = if bits == ctx.n_bits { res } else { f64::INFINITY };
        acc = acc.max(-res);
        om = next.with_prec(ctx.working());
    }
    Err(Error::Precision("polish iteration budget exhausted".into()))
}

fn check_target(target: &InvariantTriple, ctx: &PrecisionContext) -> Result<()> {
    for v in &target.v {
        let m = log2_abs(v);
        if !m.is_finite() && m != f64::NEG_INFINITY {
            return Err(Error::SingularTarget);
        }
        if m > ctx.n_bits as f64 / 2.0 {
            return Err(Error::SingularTarget);
        }
    }
    Ok(())
}

/// Find Ω with f(Ω) = target for the triple's invariant system. With a
/// seed, continuation starts there; otherwise (or if that path fails) the
/// fixed seed pool is tried in order.
pub fn invert_invariants(
    target: &InvariantTriple,
    seed: Option<&PeriodMatrix>,
    ctx: &PrecisionContext,
) -> Result<InversionResult> {
    check_target(target, ctx)?;
    let kind = target.kind;
    let mut seeds: Vec<PeriodMatrix> = seed.into_iter().cloned().collect();
    seeds.extend(seed_pool(ctx.low_working()));
    let mut last_err = Error::PathFailure("no seed tried".into());
    for s in &seeds {
        match track(s, &target.v, kind, ctx) {
            Ok((om, steps)) => {
                let (omega, residual_log2) = polish(&om, &target.v, kind, ctx)?;
                return Ok(InversionResult {
                    omega,
                    residual_log2,
                    path_length: steps,
                    method: InversionMethod::NewtonContinuation,
                });
            }
            Err(e @ Error::PathFailure(_)) | Err(e @ Error::VanishingDenominator) => {
                log::debug!("continuation from seed failed: {e}");
                last_err = e;
            }
            Err(e @ Error::ProductOfElliptic) | Err(e @ Error::SingularTarget) => {
                log::debug!("continuation from seed failed: {e}");
                last_err = e;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

/// Direct inversion of b′ through the Borchardt mean, valid when the
/// target's class contains a point of F₂ with the standard root choices.
/// The candidate is verified forward; a mismatch is a rejection.
pub fn borchardt_fast_path(target: &InvariantTriple, ctx: &PrecisionContext) -> Result<InversionResult> {
    if target.kind != InvariantKind::ThetaQuotient {
        return Err(Error::Config("Borchardt fast path needs a b' target".into()));
    }
    check_target(target, ctx)?;
    let prec = ctx.working();
    let bp: [Complex; 3] = std::array::from_fn(|i| reprec(&target.v[i], prec));
    let b = b_from_bprime(&bp).map_err(|_| Error::Reject)?;
    let cands = match recover_tau_candidates(&b, ctx) {
        Ok(c) => c,
        Err(Error::Vanishing) => return Err(Error::Reject),
        Err(e) => return Err(e),
    };
    let goal = -(ctx.n_bits as f64) + RESIDUAL_SLACK_BITS;
    for om in cands {
        if !om.is_in_h2() {
            continue;
        }
        let Ok(v) = invariants_at(&om, InvariantKind::ThetaQuotient, ctx) else {
            continue;
        };
        let res = rel_residual(&v.v, &bp);
        if res < goal {
            return Ok(InversionResult {
                omega: om,
                residual_log2: res,
                path_length: 0,
                method: InversionMethod::BorchardtDirect,
            });
        }
    }
    Err(Error::Reject)
}
