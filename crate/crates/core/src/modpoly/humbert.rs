use crate::error::{Error, Result};

/// Degree data of the Humbert surface of discriminant p².
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HumbertDegreeOracle {
    pub p: u64,
    pub a_value: u64,
    /// Degree of one irreducible component over Γ(2,4); p³ − p.
    pub component_degree: u64,
    pub h_degree: u64,
}

/// Sum of the positive divisors of n (n ≥ 1).
pub fn sigma1(n: u64) -> u64 {
    let mut s = 0;
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            s += d;
            if d * d != n {
                s += n / d;
            }
        }
        d += 1;
    }
    s
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Σ σ₁((p² − x²)/4) over x > 0 with x ≡ p (mod 2) and x < p.
pub fn half_sigma_sum(p: u64) -> u64 {
    (1..p).filter(|x| (p - x) % 2 == 0).map(|x| sigma1((p * p - x * x) / 4)).sum()
}

/// a_{p²} = 24 Σ_{x ∈ ℤ, 4 | p² − x², x² < p²} σ₁((p² − x²)/4) + 12p² − 2.
pub fn a_value(p: u64) -> u64 {
    let zero_term = if p % 2 == 0 { sigma1(p * p / 4) } else { 0 };
    24 * (2 * half_sigma_sum(p) + zero_term) + 12 * p * p - 2
}

pub fn humbert_degree(p: u64) -> Result<HumbertDegreeOracle> {
    if !is_prime(p) {
        return Err(Error::Config(format!("{p} is not prime")));
    }
    let a = a_value(p);
    // v(p²)·deg H + 5 = a/2 with v = 1/2 for p = 2 and 1 otherwise
    let h = if p == 2 { 2 * (a / 2 - 5) } else { a / 2 - 5 };
    Ok(HumbertDegreeOracle {
        p,
        a_value: a,
        component_degree: a / 10 - 1,
        h_degree: h,
    })
}

/// (5p³ − 6p² − 5p + 6)/24 = Σ_{x>0} σ₁((p² − x²)/4) for an odd prime p.
pub fn sigma_identity_holds(p: u64) -> bool {
    let lhs = 5 * p * p * p + 6 - 6 * p * p - 5 * p;
    lhs % 24 == 0 && lhs / 24 == half_sigma_sum(p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_discriminants() {
        let h = humbert_degree(2).unwrap();
        assert_eq!((h.a_value, h.h_degree), (70, 60));
        let h = humbert_degree(3).unwrap();
        assert_eq!((h.a_value, h.component_degree, h.h_degree), (250, 24, 120));
        let h = humbert_degree(5).unwrap();
        assert_eq!((h.a_value, h.component_degree), (1210, 120));
        assert!(humbert_degree(9).is_err());
    }

    #[test]
    fn component_degree_is_p3_minus_p() {
        for p in (3..100).filter(|&p| is_prime(p)) {
            assert!(sigma_identity_holds(p), "p = {p}");
            assert_eq!(humbert_degree(p).unwrap().component_degree, p * p * p - p);
        }
    }

    #[test]
    fn divisor_sums() {
        let got: Vec<u64> = (1..=12).map(sigma1).collect();
        assert_eq!(got, [1, 3, 4, 7, 6, 12, 8, 15, 13, 18, 12, 28]);
    }
}
