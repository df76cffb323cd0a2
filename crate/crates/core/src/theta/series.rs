use rug::float::Constant;
use rug::{Assign, Complex, Float};

use super::characteristic::Characteristic;
use crate::error::{Error, Result};
use crate::numerics::PrecisionContext;
use crate::siegel::PeriodMatrix;

/// Refuse truncation ellipses containing more lattice points than this.
pub const MAX_LATTICE_POINTS: f64 = 4.0e6;

/// All sixteen theta constants at one point, optionally with their partial
/// derivatives in (τ₁, τ₂, τ₃).
#[derive(Clone, Debug)]
pub struct ThetaValues {
    pub values: [Complex; 16],
    pub derivs: Option<[[Complex; 3]; 16]>,
}

/// Squared lattice norm bound K such that every term with mᵀ(Im Ω)m > K is
/// below 2^-(bits+40) in absolute value (terms are exp(-π mᵀYm/4)).
fn radius_bound(bits: u32) -> f64 {
    4.0 * (bits as f64 + 40.0) * std::f64::consts::LN_2 / std::f64::consts::PI
}

/// Sum over m ∈ ℤ² of exp(iπ mᵀΩm/4)·i^(m·b), split by m mod 2. With
/// m = 2n + a this is θ[a/2; b/2](Ω).
pub fn theta_all_bits(om: &PeriodMatrix, prec: u32, bits: u32, derivs: bool) -> Result<ThetaValues> {
    let y = om.im_f64();
    let (y1, y2, y3) = (y[0][0], y[1][1], y[0][1]);
    let det = y1 * y2 - y3 * y3;
    if !(y1 > 0.0 && det > 0.0) {
        return Err(Error::Numeric("imaginary part not positive definite".into()));
    }
    let k = radius_bound(bits);
    let points = std::f64::consts::PI * k / det.sqrt();
    if points > MAX_LATTICE_POINTS {
        return Err(Error::SlowConvergence(points as usize));
    }
    let b2 = (k * y1 / det).sqrt().floor() as i64;

    let zero = || Complex::new(prec);
    let ipi4 = {
        let mut z = Complex::with_val(prec, (0, Float::with_val(prec, Constant::Pi)));
        z /= 4;
        z
    };
    let ex = |t: &Complex, mult: i64| -> Complex {
        let mut z = Complex::with_val(prec, t * &ipi4);
        z *= mult;
        z.exp()
    };
    let q1 = ex(&om.tau1, 1);
    let q2 = ex(&om.tau2, 1);
    let q3 = ex(&om.tau3, 2);
    let q3inv = Complex::with_val(prec, q3.clone().recip());
    let q1sq = Complex::with_val(prec, &q1 * &q1);

    let mut val: [Complex; 16] = std::array::from_fn(|_| zero());
    let mut der: [[Complex; 3]; 16] = std::array::from_fn(|_| [zero(), zero(), zero()]);

    // m = 0
    for v in val.iter_mut().take(4) {
        *v += 1;
    }

    // column m1 = 0: q2^(m2²) for m2 ≥ 0
    let mut col = Vec::with_capacity(b2 as usize + 1);
    {
        let mut cur = Complex::with_val(prec, 1);
        let mut ratio = q2.clone();
        let q2sq = Complex::with_val(prec, &q2 * &q2);
        col.push(cur.clone());
        for _ in 1..=b2 {
            cur *= &ratio;
            ratio *= &q2sq;
            col.push(cur.clone());
        }
    }
    for m2 in 1..=b2 {
        let q = &col[m2 as usize];
        let a1 = (m2 & 1) as usize;
        for bb in 0..4usize {
            let kk = (m2 * (bb >> 1) as i64).rem_euclid(4);
            if kk % 2 == 1 {
                continue;
            }
            let idx = bb + 8 * a1;
            let mut t = Complex::with_val(prec, q * 2);
            if kk == 2 {
                t = -t;
            }
            if derivs {
                let mut d = t.clone();
                d *= m2 * m2;
                der[idx][1] += &d;
            }
            val[idx] += &t;
        }
    }

    // half plane m1 ≥ 1, rows m2 ∈ [-b2, b2]
    let mut q3pow = vec![zero(); 2 * b2 as usize + 1];
    q3pow[b2 as usize].assign(1);
    for j in 1..=b2 as usize {
        let prev = q3pow[b2 as usize + j - 1].clone();
        q3pow[b2 as usize + j] = Complex::with_val(prec, &prev * &q3);
        let prevn = q3pow[b2 as usize - j + 1].clone();
        q3pow[b2 as usize - j] = Complex::with_val(prec, &prevn * &q3inv);
    }
    let mut t0: [Complex; 4] = std::array::from_fn(|_| zero());
    let mut t1: [Complex; 4] = std::array::from_fn(|_| zero());
    let mut t2: [Complex; 4] = std::array::from_fn(|_| zero());
    let mut tmp = zero();
    for m2 in -b2..=b2 {
        let rem = k - (m2 * m2) as f64 * det / y1;
        if rem < 0.0 {
            continue;
        }
        let centre = -y3 * m2 as f64 / y1;
        let w = (rem / y1).sqrt();
        let lo = ((centre - w).ceil() as i64).max(1);
        let hi = (centre + w).floor() as i64;
        if hi < lo {
            continue;
        }
        for x in t0.iter_mut().chain(t1.iter_mut()).chain(t2.iter_mut()) {
            x.assign(0);
        }
        let mut q = col[m2.unsigned_abs() as usize].clone();
        let mut ratio = Complex::with_val(prec, &q1 * &q3pow[(m2 + b2) as usize]);
        for m1 in 1..=hi {
            q *= &ratio;
            ratio *= &q1sq;
            if m1 < lo {
                continue;
            }
            let r = (m1 & 3) as usize;
            t0[r] += &q;
            if derivs {
                tmp.assign(&q * m1);
                t1[r] += &tmp;
                tmp *= m1;
                t2[r] += &tmp;
            }
        }
        let a1 = (m2 & 1) as usize;
        for r in 0..4usize {
            let a0 = r & 1;
            for bb in 0..4usize {
                let kk = (r as i64 * (bb & 1) as i64 + m2 * (bb >> 1) as i64).rem_euclid(4);
                if kk % 2 == 1 {
                    continue;
                }
                let idx = bb + 4 * a0 + 8 * a1;
                let sgn: i64 = if kk == 0 { 2 } else { -2 };
                tmp.assign(&t0[r] * sgn);
                val[idx] += &tmp;
                if derivs {
                    tmp.assign(&t2[r] * sgn);
                    der[idx][0] += &tmp;
                    tmp.assign(&t0[r] * sgn);
                    tmp *= m2 * m2;
                    der[idx][1] += &tmp;
                    tmp.assign(&t1[r] * sgn);
                    tmp *= 2 * m2;
                    der[idx][2] += &tmp;
                }
            }
        }
    }

    for k in 0..16 {
        if !Characteristic::from_index(k).is_even() {
            val[k].assign(0);
            for d in der[k].iter_mut() {
                d.assign(0);
            }
        }
    }
    let derivs = if derivs {
        for row in der.iter_mut() {
            for d in row.iter_mut() {
                *d *= &ipi4;
            }
        }
        Some(der)
    } else {
        None
    };
    Ok(ThetaValues { values: val, derivs })
}

/// All sixteen theta constants at the working precision of `ctx`.
pub fn theta_all(om: &PeriodMatrix, ctx: &PrecisionContext, derivs: bool) -> Result<ThetaValues> {
    let om = om.with_prec(ctx.working());
    theta_all_bits(&om, ctx.working(), ctx.working(), derivs)
}

/// A single theta constant θ[a/2; b/2](Ω).
pub fn theta_series(ch: Characteristic, om: &PeriodMatrix, ctx: &PrecisionContext) -> Result<Complex> {
    if !ch.is_even() {
        return Ok(Complex::new(ctx.working()));
    }
    let mut t = theta_all(om, ctx, false)?;
    Ok(std::mem::replace(&mut t.values[ch.index()], Complex::new(1)))
}
