use rug::Complex;

use super::scalar::{log2_abs, Scalar};
use crate::error::{Error, Result};

/// Solve the square system `a·x = b` by Gaussian elimination with partial
/// pivoting. Fails if a pivot falls below `2^-tol_bits` of the largest
/// entry of its column.
pub fn solve(mut a: Vec<Vec<Complex>>, mut b: Vec<Complex>, tol_bits: f64) -> Result<Vec<Complex>> {
    let n = b.len();
    assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let scale = a
        .iter()
        .flatten()
        .map(log2_abs)
        .fold(f64::NEG_INFINITY, f64::max);
    for col in 0..n {
        let (piv, mag) = (col..n)
            .map(|r| (r, log2_abs(&a[r][col])))
            .fold((col, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
        if mag < scale - tol_bits {
            return Err(Error::Numeric(format!("singular {n}x{n} system")));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let pivot = a[col][col].clone();
        for r in col + 1..n {
            let f = a[r][col].div(&pivot);
            if f.is_zero() {
                continue;
            }
            for c in col..n {
                let t = f.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&t);
            }
            let t = f.mul(&b[col]);
            b[r] = b[r].sub(&t);
        }
    }
    let mut x: Vec<Complex> = b.iter().map(|v| v.zero_like()).collect();
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for c in r + 1..n {
            acc = acc.sub(&a[r][c].mul(&x[c]));
        }
        x[r] = acc.div(&a[r][r]);
    }
    Ok(x)
}

/// Inverse of a square matrix (columns obtained by solving against the unit
/// vectors).
pub fn invert(a: &[Vec<Complex>], tol_bits: f64) -> Result<Vec<Vec<Complex>>> {
    let n = a.len();
    let prec = a[0][0].prec().0;
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Complex> = (0..n)
            .map(|i| Complex::with_val(prec, if i == j { 1 } else { 0 }))
            .collect();
        cols.push(solve(a.to_vec(), e, tol_bits)?);
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect())
}
