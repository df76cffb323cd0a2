use rug::{Complex, Float, Integer, Rational};

use crate::error::{Error, Result};

/// Rational p/q with q ≤ `den_bound` and |x − p/q| < 1/(2·den_bound²),
/// found among the continued-fraction convergents of x.
pub fn rational_reconstruct(x: &Float, den_bound: &Integer) -> Result<Rational> {
    let mut window = Rational::from(den_bound * den_bound);
    window *= 2;
    window.recip_mut();
    rational_reconstruct_within(x, den_bound, &window)
}

/// As [`rational_reconstruct`] with an explicit error window.
pub fn rational_reconstruct_within(
    x: &Float,
    den_bound: &Integer,
    window: &Rational,
) -> Result<Rational> {
    let xr = x.to_rational().ok_or(Error::NoConvergent)?;
    // convergents h_k / k_k
    let (mut h_prev, mut h) = (Integer::from(1), Integer::new());
    let (mut k_prev, mut k) = (Integer::new(), Integer::from(1));
    let mut rem = xr.clone();
    loop {
        let a = rem.clone().floor().into_numer_denom().0;
        let h_next = Integer::from(&a * &h_prev) + &h;
        let k_next = Integer::from(&a * &k_prev) + &k;
        h = std::mem::replace(&mut h_prev, h_next);
        k = std::mem::replace(&mut k_prev, k_next);
        // (h_prev, k_prev) is now the newest convergent
        if k_prev > *den_bound {
            return Err(Error::NoConvergent);
        }
        let cand = Rational::from((h_prev.clone(), k_prev.clone()));
        let err = Rational::from(&xr - &cand).abs();
        if err < *window {
            return Ok(cand);
        }
        let frac = Rational::from(&rem - &a);
        if frac == 0 {
            return Err(Error::NoConvergent);
        }
        rem = frac.recip();
    }
}

/// Nearest integer to the real part of `z`, accepted only when both the
/// distance to it and the imaginary part are below `2^tol_log2` times
/// max(1, |z|).
pub fn round_complex_to_integer(z: &Complex, tol_log2: f64) -> Option<Integer> {
    let re = z.real();
    let n = re.to_integer()?;
    let mut d = Float::with_val(re.prec(), re - &n);
    d.abs_mut();
    let scale = super::scalar::log2_abs(z).max(0.0);
    let bound = scale + tol_log2;
    let ok_re = super::scalar::log2_abs_real(&d) < bound;
    let ok_im = super::scalar::log2_abs_real(z.imag()) < bound;
    if ok_re && ok_im {
        Some(n)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_third() {
        let x = Float::with_val(700, Float::with_val(700, 1) / 3);
        let r = rational_reconstruct(&x, &Integer::from(1_000_000)).unwrap();
        assert_eq!(r, Rational::from((1, 3)));
    }

    #[test]
    fn exact_half_integer() {
        let x = Float::with_val(64, 1.5);
        let r = rational_reconstruct(&x, &Integer::from(100)).unwrap();
        assert_eq!(r, Rational::from((3, 2)));
    }

    #[test]
    fn large_integer_with_noise() {
        let mut x = Float::with_val(400, 24883200);
        x += Float::with_val(400, Float::i_exp(1, -170));
        let r = rational_reconstruct(&x, &Integer::from(1_000_000)).unwrap();
        assert_eq!(r, Rational::from(24883200));
    }

    #[test]
    fn too_little_precision_fails() {
        // 1/3 perturbed at 2^-30 has no convergent inside a 2^-41 window
        let mut x = Float::with_val(200, Float::with_val(200, 1) / 3);
        x += Float::with_val(200, Float::i_exp(1, -30));
        assert!(rational_reconstruct(&x, &Integer::from(1_000_000)).is_err());
    }

    #[test]
    fn integer_rounding_gate() {
        let z = Complex::with_val(200, (Float::with_val(200, 42.0), 0.0));
        assert_eq!(round_complex_to_integer(&z, -100.0), Some(Integer::from(42)));
        let w = Complex::with_val(200, (42.3, 0.0));
        assert_eq!(round_complex_to_integer(&w, -100.0), None);
        let v = Complex::with_val(200, (42.0, 1e-5));
        assert_eq!(round_complex_to_integer(&v, -100.0), None);
    }

    proptest! {
        #[test]
        fn reconstruct_is_left_inverse(p in -1_000_000i64..1_000_000, q in 1i64..1_000_000) {
            let bound = Integer::from(1_000_000);
            // N ≥ 2 log2(bound) + 16
            let prec = 2 * 20 + 16 + 24;
            let exact = Rational::from((p, q));
            let x = Float::with_val(prec, &exact);
            let r = rational_reconstruct(&x, &bound).unwrap();
            prop_assert_eq!(r, exact);
        }
    }
}
