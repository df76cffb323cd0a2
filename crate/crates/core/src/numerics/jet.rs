use rug::Complex;

use super::scalar::{log2_abs, Scalar};

/// A value together with its partial derivatives in three variables
/// (forward-mode differentiation).
#[derive(Clone, Debug)]
pub struct Jet {
    pub v: Complex,
    pub d: [Complex; 3],
}

impl Jet {
    pub fn new(v: Complex, d: [Complex; 3]) -> Self {
        Self { v, d }
    }

    pub fn constant(v: Complex) -> Self {
        let p = v.prec();
        Self {
            v,
            d: [Complex::new(p), Complex::new(p), Complex::new(p)],
        }
    }

    pub fn prec(&self) -> u32 {
        self.v.prec().0
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.prec();
        Self {
            v: Complex::with_val(p, &self.v + &o.v),
            d: std::array::from_fn(|k| Complex::with_val(p, &self.d[k] + &o.d[k])),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.prec();
        Self {
            v: Complex::with_val(p, &self.v - &o.v),
            d: std::array::from_fn(|k| Complex::with_val(p, &self.d[k] - &o.d[k])),
        }
    }

    pub fn neg(&self) -> Self {
        let p = self.prec();
        Self {
            v: Complex::with_val(p, -&self.v),
            d: std::array::from_fn(|k| Complex::with_val(p, -&self.d[k])),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.prec();
        Self {
            v: Complex::with_val(p, &self.v * &o.v),
            d: std::array::from_fn(|k| {
                let mut t = Complex::with_val(p, &self.d[k] * &o.v);
                t += Complex::with_val(p, &self.v * &o.d[k]);
                t
            }),
        }
    }

    pub fn div(&self, o: &Self) -> Self {
        let p = self.prec();
        let q = Complex::with_val(p, &self.v / &o.v);
        // (f/g)' = (f' − q g') / g
        let d = std::array::from_fn(|k| {
            let mut t = Complex::with_val(p, &q * &o.d[k]);
            t = Complex::with_val(p, &self.d[k] - &t);
            t /= &o.v;
            t
        });
        Self { v: q, d }
    }

    pub fn scale(&self, c: &Complex) -> Self {
        let p = self.prec();
        Self {
            v: Complex::with_val(p, &self.v * c),
            d: std::array::from_fn(|k| Complex::with_val(p, &self.d[k] * c)),
        }
    }

    pub fn scale_i64(&self, c: i64) -> Self {
        let p = self.prec();
        Self {
            v: Complex::with_val(p, &self.v * c),
            d: std::array::from_fn(|k| Complex::with_val(p, &self.d[k] * c)),
        }
    }

    /// Nonnegative integer power by repeated squaring.
    pub fn powi(&self, n: u32) -> Self {
        let mut acc = Jet::constant(Complex::with_val(self.prec(), 1));
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl Scalar for Jet {
    fn zero_like(&self) -> Self {
        Jet::constant(Complex::new(self.prec()))
    }
    fn one_like(&self) -> Self {
        Jet::constant(Complex::with_val(self.prec(), 1))
    }
    fn add(&self, o: &Self) -> Self {
        Jet::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Jet::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Jet::mul(self, o)
    }
    fn div(&self, o: &Self) -> Self {
        Jet::div(self, o)
    }
    fn neg(&self) -> Self {
        Jet::neg(self)
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero() && self.d.iter().all(|x| x.is_zero())
    }
    fn log2_mag(&self) -> f64 {
        log2_abs(&self.v)
    }
    fn precision_bits(&self) -> Option<u32> {
        Some(self.prec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::scalar::{abs_f64, cf64};

    fn var(k: usize, x: f64) -> Jet {
        let p = 128;
        let mut d = [Complex::new(p), Complex::new(p), Complex::new(p)];
        d[k] = cf64(p, 1.0, 0.0);
        Jet::new(cf64(p, x, 0.0), d)
    }

    #[test]
    fn product_and_quotient_rules() {
        let x = var(0, 2.0);
        let y = var(1, 3.0);
        let f = x.powi(3).mul(&y).div(&x.add(&y));
        // f = x^3 y / (x + y); ∂x = (3x^2 y (x+y) − x^3 y)/(x+y)^2
        let fx = (3.0 * 4.0 * 3.0 * 5.0 - 8.0 * 3.0) / 25.0;
        let fy = (8.0 * 5.0 - 8.0 * 3.0) / 25.0;
        assert!((abs_f64(&f.v) - 24.0 / 5.0).abs() < 1e-15);
        assert!((f.d[0].real().to_f64() - fx).abs() < 1e-14);
        assert!((f.d[1].real().to_f64() - fy).abs() < 1e-14);
        assert!(f.d[2].real().is_zero());
    }
}
