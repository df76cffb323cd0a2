use rug::{Assign, Complex};

use super::scalar::{log2_abs, Scalar};

/// Dense univariate polynomial, `coeffs[i]` multiplies `X^i`. The zero
/// polynomial has no coefficients.
#[derive(Clone, Debug)]
pub struct UniPoly<T: Scalar = Complex> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> UniPoly<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Self { coeffs };
        p.trim_exact();
        p
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = -1.
    pub fn deg_i(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn lead(&self) -> Option<&T> {
        self.coeffs.last()
    }

    pub fn trim_exact(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Drop leading coefficients smaller than `2^-tol_bits` times `scale`
    /// (given as log2). Returns how many were dropped.
    pub fn trim_below(&mut self, scale_log2: f64, tol_bits: f64) -> usize {
        let mut dropped = 0;
        while let Some(c) = self.coeffs.last() {
            if c.is_zero() || c.log2_mag() < scale_log2 - tol_bits {
                self.coeffs.pop();
                dropped += 1;
            } else {
                break;
            }
        }
        dropped
    }

    /// log2 of the largest coefficient magnitude.
    pub fn max_log2(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.log2_mag())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn eval(&self, x: &T) -> T {
        let mut it = self.coeffs.iter().rev();
        let mut acc = match it.next() {
            Some(c) => c.clone(),
            None => return x.zero_like(),
        };
        for c in it {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.add(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        Self::new(out)
    }

    pub fn sub(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(match (self.coeffs.get(i), o.coeffs.get(i)) {
                (Some(a), Some(b)) => a.sub(b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.neg(),
                (None, None) => unreachable!(),
            });
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let z = self.coeffs[0].zero_like();
        let mut out = vec![z; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    /// Euclidean division by `d` whose leading coefficient is nonzero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        let dd = d.degree().expect("division by the zero polynomial");
        let n = match self.degree() {
            Some(n) if n >= dd => n,
            _ => return (Self::zero(), self.clone()),
        };
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let z = lead.zero_like();
        let mut q = vec![z; n - dd + 1];
        for k in (0..=n - dd).rev() {
            let c = rem[k + dd].div(&lead);
            for (j, dj) in d.coeffs.iter().enumerate().take(dd) {
                rem[k + j] = rem[k + j].sub(&c.mul(dj));
            }
            rem[k + dd] = c.zero_like();
            q[k] = c;
        }
        rem.truncate(dd);
        (Self::new(q), Self::new(rem))
    }

    /// Formal derivative.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let one = self.coeffs[0].one_like();
        let mut k = one.clone();
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        for c in &self.coeffs[1..] {
            out.push(c.mul(&k));
            k = k.add(&one);
        }
        Self::new(out)
    }
}

/// Π (X − r) over `roots`, by a balanced subproduct tree.
pub fn poly_product_tree(roots: &[Complex]) -> UniPoly<Complex> {
    assert!(!roots.is_empty(), "product tree needs at least one root");
    fn rec(roots: &[Complex]) -> UniPoly<Complex> {
        if roots.len() == 1 {
            let r = &roots[0];
            return UniPoly {
                coeffs: vec![r.neg(), r.one_like()],
            };
        }
        let mid = roots.len() / 2;
        rec(&roots[..mid]).mul(&rec(&roots[mid..]))
    }
    rec(roots)
}

/// Quotient of `p` by `X − r`, assuming `r` is (numerically) a root of `p`.
/// Divides from the top when |r| ≤ 1 and from the bottom otherwise, which
/// keeps the recurrence contracting in both cases.
pub fn deflate(p: &UniPoly<Complex>, r: &Complex) -> UniPoly<Complex> {
    let n = p.degree().expect("cannot deflate the zero polynomial");
    if n == 0 {
        return UniPoly::zero();
    }
    let prec = p.coeffs[0].prec().0.max(r.prec().0);
    let mut q: Vec<Complex> = (0..n).map(|_| Complex::new(prec)).collect();
    let mut tmp = Complex::new(prec);
    if log2_abs(r) <= 0.0 {
        // q_{n-1} = p_n, q_{k-1} = p_k + r q_k
        q[n - 1].assign(&p.coeffs[n]);
        for k in (1..n).rev() {
            tmp.assign(r * &q[k]);
            tmp += &p.coeffs[k];
            q[k - 1].assign(&tmp);
        }
    } else {
        // q_0 = -p_0 / r, q_k = (q_{k-1} - p_k) / r
        tmp.assign(-&p.coeffs[0]);
        tmp /= r;
        q[0].assign(&tmp);
        for k in 1..n {
            tmp.assign(&q[k - 1] - &p.coeffs[k]);
            tmp /= r;
            q[k].assign(&tmp);
        }
    }
    UniPoly { coeffs: q }
}
