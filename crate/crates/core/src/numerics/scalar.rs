use rug::{Assign, Complex, Float, Rational};

/// Arbitrary-precision complex number. Precision travels with the value.
pub type BigComplex = Complex;

/// Field operations shared by floating complex numbers and exact rationals,
/// so that polynomial and Euclid code runs unchanged in both settings.
pub trait Scalar: Clone + std::fmt::Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// log2 of the magnitude; `-inf` for zero.
    fn log2_mag(&self) -> f64;
    /// Mantissa bits, `None` for exact values.
    fn precision_bits(&self) -> Option<u32>;
}

fn cprec(a: &Complex, b: &Complex) -> u32 {
    a.prec().0.max(b.prec().0)
}

impl Scalar for Complex {
    fn zero_like(&self) -> Self {
        Complex::new(self.prec())
    }
    fn one_like(&self) -> Self {
        Complex::with_val(self.prec(), 1)
    }
    fn add(&self, o: &Self) -> Self {
        Complex::with_val(cprec(self, o), self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Complex::with_val(cprec(self, o), self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Complex::with_val(cprec(self, o), self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Complex::with_val(cprec(self, o), self / o)
    }
    fn neg(&self) -> Self {
        Complex::with_val(self.prec(), -self)
    }
    fn is_zero(&self) -> bool {
        self.real().is_zero() && self.imag().is_zero()
    }
    fn log2_mag(&self) -> f64 {
        log2_abs(self)
    }
    fn precision_bits(&self) -> Option<u32> {
        Some(self.prec().0)
    }
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn one_like(&self) -> Self {
        Rational::from(1)
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Rational::from(self / o)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn log2_mag(&self) -> f64 {
        if *self == 0 {
            return f64::NEG_INFINITY;
        }
        let n = self.numer().significant_bits() as f64;
        let d = self.denom().significant_bits() as f64;
        // good to about one bit, which is all callers need
        n - d
    }
    fn precision_bits(&self) -> Option<u32> {
        None
    }
}

/// log2 |x| for a real float; `-inf` for zero.
pub fn log2_abs_real(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    if !x.is_finite() {
        return f64::INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + e as f64
}

/// log2 |z| without overflow for huge or tiny exponents.
pub fn log2_abs(z: &Complex) -> f64 {
    let a = log2_abs_real(z.real());
    let b = log2_abs_real(z.imag());
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let hi = a.max(b);
    let lo = a.min(b);
    hi + 0.5 * (1.0 + (2.0 * (lo - hi)).exp2()).log2()
}

/// |z| as an f64 (saturating).
pub fn abs_f64(z: &Complex) -> f64 {
    log2_abs(z).exp2()
}

pub fn czero(prec: u32) -> Complex {
    Complex::new(prec)
}

pub fn cone(prec: u32) -> Complex {
    Complex::with_val(prec, 1)
}

pub fn cf64(prec: u32, re: f64, im: f64) -> Complex {
    Complex::with_val(prec, (re, im))
}

/// Re-round a value to a new precision.
pub fn reprec(z: &Complex, prec: u32) -> Complex {
    let mut out = Complex::new(prec);
    out.assign(z);
    out
}

pub fn to_c64(z: &Complex) -> (f64, f64) {
    (z.real().to_f64(), z.imag().to_f64())
}

/// Parse "a", "a+bi", "a-bi", "bi" or "(a,b)" into a complex number.
pub fn parse_complex(s: &str, prec: u32) -> Option<Complex> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(inner) = t.strip_prefix('(').and_then(|u| u.strip_suffix(')')) {
        let mut it = inner.splitn(2, ',');
        let re = Float::parse(it.next()?).ok()?;
        let im = Float::parse(it.next()?).ok()?;
        return Some(Complex::with_val(prec, (re, im)));
    }
    if let Some(body) = t.strip_suffix('i') {
        // find split between real and imaginary part: last sign not after 'e'
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            let c = bytes[idx] as char;
            if (c == '+' || c == '-') && !matches!(bytes[idx - 1] as char, 'e' | 'E') {
                split = Some(idx);
                break;
            }
        }
        let (re_s, im_s) = match split {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im_s = match im_s {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        let re = Float::parse(re_s).ok()?;
        let im = Float::parse(im_s).ok()?;
        return Some(Complex::with_val(prec, (re, im)));
    }
    let re = Float::parse(&t).ok()?;
    Some(Complex::with_val(prec, (re, 0)))
}

/// Short human-readable rendering with `digits` significant digits.
pub fn fmt_complex(z: &Complex, digits: usize) -> String {
    let re = z.real().to_string_radix(10, Some(digits));
    let im = z.imag().to_string_radix(10, Some(digits));
    if im.starts_with('-') {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_of_tiny_and_huge() {
        let z = Complex::with_val(200, (Float::with_val(200, Float::i_exp(3, -5000)), 0));
        assert!((log2_abs(&z) - (3f64.log2() - 5000.0)).abs() < 1e-9);
        let w = Complex::with_val(64, (3, 4));
        assert!((abs_f64(&w) - 5.0).abs() < 1e-12);
        assert_eq!(log2_abs(&czero(64)), f64::NEG_INFINITY);
    }

    #[test]
    fn parses_complex_forms() {
        let z = parse_complex("0.25+1.5i", 64).unwrap();
        assert_eq!(to_c64(&z), (0.25, 1.5));
        let z = parse_complex("-2e-3-1i", 64).unwrap();
        assert_eq!(to_c64(&z), (-0.002, -1.0));
        let z = parse_complex("i", 64).unwrap();
        assert_eq!(to_c64(&z), (0.0, 1.0));
        let z = parse_complex("(1,2)", 64).unwrap();
        assert_eq!(to_c64(&z), (1.0, 2.0));
        let z = parse_complex("7", 64).unwrap();
        assert_eq!(to_c64(&z), (7.0, 0.0));
        assert!(parse_complex("abc", 64).is_none());
    }

    #[test]
    fn rational_field_ops() {
        let a = Rational::from((1, 3));
        let b = Rational::from((1, 6));
        assert_eq!(a.add(&b), Rational::from((1, 2)));
        assert_eq!(a.div(&b), Rational::from(2));
        assert!(a.sub(&a).is_zero());
    }
}
