use super::scalar::Scalar;
use super::unipoly::UniPoly;
use crate::error::{Error, Result};

/// One row of the extended Euclidean algorithm on (g, f): `r ≡ t·f mod g`.
#[derive(Clone, Debug)]
pub struct EuclidRow<T: Scalar> {
    pub r: UniPoly<T>,
    pub t: UniPoly<T>,
}

/// Thresholds (in bits below the operand scale) for deciding that a
/// computed leading coefficient is an exact zero, or that it is too small to
/// trust.
#[derive(Clone, Copy, Debug)]
pub struct Thresholds {
    pub zero_bits: f64,
    pub loss_bits: f64,
}

impl Thresholds {
    /// Defaults for mantissas of `prec` bits: below 3/4 of the precision is
    /// noise, between 1/2 and 3/4 is an error.
    pub fn for_prec(prec: u32) -> Self {
        Self {
            zero_bits: 0.75 * prec as f64,
            loss_bits: 0.5 * prec as f64,
        }
    }
}

fn thresholds_of<T: Scalar>(g: &UniPoly<T>) -> Option<Thresholds> {
    g.coeffs
        .first()
        .and_then(|c| c.precision_bits())
        .map(Thresholds::for_prec)
}

/// Remainder step with noise trimming. Returns (quotient, remainder).
fn step<T: Scalar>(
    r0: &UniPoly<T>,
    r1: &UniPoly<T>,
    th: Option<Thresholds>,
    strict: bool,
) -> Result<(UniPoly<T>, UniPoly<T>)> {
    let (q, mut rem) = r0.divrem(r1);
    if let Some(th) = th {
        let scale = r0.max_log2().max(q.max_log2() + r1.max_log2());
        rem.trim_below(scale, th.zero_bits);
        if strict {
            if let Some(l) = rem.lead() {
                let rel = l.log2_mag() - scale;
                if rel < -th.loss_bits {
                    return Err(Error::PrecisionLoss(format!(
                        "Euclidean remainder leading coefficient at 2^{rel:.1} of the row scale"
                    )));
                }
            }
        }
    }
    Ok((q, rem))
}

/// First row (r_j, t_j) of the extended Euclidean algorithm on (g, f) with
/// deg r_j < k.
pub fn ext_euclid_row<T: Scalar>(
    g: &UniPoly<T>,
    f: &UniPoly<T>,
    k: usize,
) -> Result<(UniPoly<T>, UniPoly<T>)> {
    assert!(k >= 1, "degree bound must be positive");
    let gd = g.degree().expect("g must be nonzero");
    assert!(f.deg_i() < gd as isize, "need deg f < deg g");
    let th = thresholds_of(g);
    let one = g.coeffs[0].one_like();
    let mut r0 = g.clone();
    let mut r1 = f.clone();
    if let Some(th) = th {
        let s = g.max_log2().max(f.max_log2());
        r1.trim_below(s, th.zero_bits);
    }
    let mut t0: UniPoly<T> = UniPoly::zero();
    let mut t1 = UniPoly::constant(one);
    while r1.deg_i() >= k as isize {
        let (q, rem) = step(&r0, &r1, th, true)?;
        let t2 = t0.sub(&q.mul(&t1));
        r0 = std::mem::replace(&mut r1, rem);
        t0 = std::mem::replace(&mut t1, t2);
    }
    Ok((r1, t1))
}

/// All rows of the extended Euclidean algorithm, with leading-coefficient
/// noise below `zero_bits` treated as exact cancellation. Used for degree
/// discovery, where the interesting row is the one after a degree jump.
pub fn euclid_rows<T: Scalar>(g: &UniPoly<T>, f: &UniPoly<T>, zero_bits: f64) -> Vec<EuclidRow<T>> {
    let th = thresholds_of(g).map(|t| Thresholds {
        zero_bits,
        loss_bits: t.loss_bits,
    });
    let one = g.coeffs[0].one_like();
    let mut rows = vec![
        EuclidRow {
            r: g.clone(),
            t: UniPoly::zero(),
        },
    ];
    let mut r1 = f.clone();
    if let Some(th) = th {
        let s = g.max_log2().max(f.max_log2());
        r1.trim_below(s, th.zero_bits);
    }
    rows.push(EuclidRow {
        r: r1,
        t: UniPoly::constant(one),
    });
    loop {
        let n = rows.len();
        if rows[n - 1].r.is_zero() {
            break;
        }
        let (q, rem) = match step(&rows[n - 2].r, &rows[n - 1].r, th, false) {
            Ok(x) => x,
            Err(_) => break,
        };
        let t2 = rows[n - 2].t.sub(&q.mul(&rows[n - 1].t));
        rows.push(EuclidRow { r: rem, t: t2 });
    }
    rows
}
