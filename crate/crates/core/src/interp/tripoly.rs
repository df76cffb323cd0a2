use std::collections::BTreeMap;

use rug::{Complex, Integer, Rational};

use crate::numerics::scalar::log2_abs;
use crate::numerics::{Scalar, UniPoly};

/// Exponents (i, j, k) of X^i Y^j Z^k.
pub type Mono = [u32; 3];

/// Sparse polynomial in three variables. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq)]
pub struct TriPoly<T> {
    pub terms: BTreeMap<Mono, T>,
}

impl<T> Default for TriPoly<T> {
    fn default() -> Self {
        Self {
            terms: BTreeMap::new(),
        }
    }
}

impl<T: Scalar> TriPoly<T> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(it: impl IntoIterator<Item = (Mono, T)>) -> Self {
        let mut p = Self::new();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn constant(c: T) -> Self {
        Self::from_terms([([0, 0, 0], c)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, m: &Mono) -> Option<&T> {
        self.terms.get(m)
    }

    /// Adds c·X^i Y^j Z^k, removing the monomial if it cancels.
    pub fn add_term(&mut self, m: Mono, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Largest exponent of each variable (zeros for the zero polynomial).
    pub fn degrees(&self) -> [u32; 3] {
        let mut d = [0; 3];
        for m in self.terms.keys() {
            for v in 0..3 {
                d[v] = d[v].max(m[v]);
            }
        }
        d
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m[0] + m[1] + m[2]).max()
    }

    pub fn eval(&self, pt: &[T; 3]) -> T {
        let d = self.degrees();
        let pows: Vec<Vec<T>> = (0..3)
            .map(|v| {
                let mut out = vec![pt[v].one_like()];
                for e in 1..=d[v] as usize {
                    let next = out[e - 1].mul(&pt[v]);
                    out.push(next);
                }
                out
            })
            .collect();
        let mut acc = pt[0].zero_like();
        for (m, c) in &self.terms {
            let t = c
                .mul(&pows[0][m[0] as usize])
                .mul(&pows[1][m[1] as usize])
                .mul(&pows[2][m[2] as usize]);
            acc = acc.add(&t);
        }
        acc
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> TriPoly<U> {
        TriPoly::from_terms(self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// Exchange two variables.
    pub fn swap_vars(&self, a: usize, b: usize) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| {
            let mut m = *m;
            m.swap(a, b);
            (m, c.clone())
        }))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(*m, c.neg());
        }
        out
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, a)| (*m, a.mul(c))))
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::new();
        for (m, a) in &self.terms {
            for (n, b) in &o.terms {
                out.add_term([m[0] + n[0], m[1] + n[1], m[2] + n[2]], a.mul(b));
            }
        }
        out
    }

    /// P(X + s₀, Y + s₁, Z + s₂), one variable at a time by Horner's rule.
    pub fn shift(&self, s: &[T; 3]) -> Self {
        let mut cur = self.clone();
        for v in 0..3 {
            if s[v].is_zero() {
                continue;
            }
            // group by the other two exponents
            let mut groups: BTreeMap<[u32; 2], Vec<(u32, T)>> = BTreeMap::new();
            for (m, c) in &cur.terms {
                let key = match v {
                    0 => [m[1], m[2]],
                    1 => [m[0], m[2]],
                    _ => [m[0], m[1]],
                };
                groups.entry(key).or_default().push((m[v], c.clone()));
            }
            let mut next = Self::new();
            for (key, list) in groups {
                let deg = list.iter().map(|x| x.0).max().unwrap_or(0) as usize;
                let z = list[0].1.zero_like();
                let mut coeffs = vec![z.clone(); deg + 1];
                for (e, c) in list {
                    coeffs[e as usize] = c;
                }
                let lin = UniPoly::new(vec![s[v].clone(), z.one_like()]);
                let mut acc: UniPoly<T> = UniPoly::zero();
                for c in coeffs.into_iter().rev() {
                    acc = acc.mul(&lin).add(&UniPoly::constant(c));
                }
                for (e, c) in acc.coeffs.into_iter().enumerate() {
                    let m = match v {
                        0 => [e as u32, key[0], key[1]],
                        1 => [key[0], e as u32, key[1]],
                        _ => [key[0], key[1], e as u32],
                    };
                    next.add_term(m, c);
                }
            }
            cur = next;
        }
        cur
    }
}

impl TriPoly<Complex> {
    pub fn max_log2(&self) -> f64 {
        self.terms.values().map(log2_abs).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Remove coefficients below 2^-tol_bits times the largest one.
    pub fn trim(&mut self, tol_bits: f64) {
        let top = self.max_log2();
        self.terms.retain(|_, c| log2_abs(c) >= top - tol_bits);
    }
}

impl TriPoly<Rational> {
    pub fn to_complex(&self, prec: u32) -> TriPoly<Complex> {
        TriPoly::from_terms(
            self.terms
                .iter()
                .map(|(m, c)| (*m, Complex::with_val(prec, c))),
        )
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| *c.denom() == 1)
    }

    /// Scale to integer coefficients with gcd 1 and a positive leading
    /// coefficient (in the monomial order); returns the scaling factor.
    pub fn make_primitive(&self) -> (Self, Rational) {
        if self.is_zero() {
            return (self.clone(), Rational::from(1));
        }
        let mut lcm = Integer::from(1);
        for c in self.terms.values() {
            lcm.lcm_mut(c.denom());
        }
        let mut g = Integer::new();
        for c in self.terms.values() {
            let n = Integer::from(c.numer() * &lcm) / c.denom();
            g.gcd_mut(&n);
        }
        let mut f = Rational::from((lcm, g));
        let lead = self.terms.values().next_back().expect("nonzero");
        if *lead < 0 {
            f = -f;
        }
        (self.scale(&f), f)
    }
}

/// Quotient of two trivariate polynomials.
#[derive(Clone, Debug, PartialEq)]
pub struct TriRat<T> {
    pub num: TriPoly<T>,
    pub den: TriPoly<T>,
    /// The interpolation ran on F(X + s₀, Y + s₁, Z + s₂); `num` and `den`
    /// are in the original variables, normalised so that the shifted
    /// denominator has constant term 1.
    pub shift: [i64; 3],
}

impl<T: Scalar> TriRat<T> {
    pub fn eval(&self, pt: &[T; 3]) -> T {
        self.num.eval(pt).div(&self.den.eval(pt))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn shift_round_trip() {
        let p = TriPoly::from_terms([([2, 1, 0], q(3)), ([0, 0, 3], q(-2)), ([1, 1, 1], q(5)), ([0, 0, 0], q(7))]);
        let s = [q(2), q(-1), q(3)];
        let back = p.shift(&s).shift(&[q(-2), q(1), q(-3)]);
        assert_eq!(back, p);
        // value check
        let pt = [q(1), q(2), q(-1)];
        let shifted_pt = [q(3), q(1), q(2)];
        assert_eq!(p.shift(&s).eval(&pt), p.eval(&shifted_pt));
    }

    #[test]
    fn primitive_form() {
        let p = TriPoly::from_terms([([1, 0, 0], Rational::from((-3, 4))), ([0, 0, 0], Rational::from((3, 2)))]);
        let (pp, _) = p.make_primitive();
        assert_eq!(pp.get(&[1, 0, 0]), Some(&q(1)));
        assert_eq!(pp.get(&[0, 0, 0]), Some(&q(-2)));
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = TriPoly::from_terms([([1, 0, 0], q(1))]);
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.swap_vars(0, 2).get(&[0, 0, 1]), Some(&q(1)));
    }
}
