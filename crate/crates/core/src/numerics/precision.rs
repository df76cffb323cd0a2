use crate::error::{Error, Result};

/// Working precision of a computation: `n_bits` of target accuracy, plus
/// `guard_bits` spent on error growth, plus a cheaper `n_low_bits` used for
/// path tracking and sanity checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    pub n_bits: u32,
    pub guard_bits: u32,
    pub n_low_bits: u32,
}

impl PrecisionContext {
    pub fn new(n_bits: u32, guard_bits: u32, n_low_bits: u32) -> Result<Self> {
        if n_bits < 64 {
            return Err(Error::Config(format!("n_bits = {n_bits} < 64")));
        }
        if guard_bits < 32 {
            return Err(Error::Config(format!("guard_bits = {guard_bits} < 32")));
        }
        if n_low_bits >= n_bits {
            return Err(Error::Config(format!(
                "n_low_bits = {n_low_bits} must be below n_bits = {n_bits}"
            )));
        }
        Ok(Self {
            n_bits,
            guard_bits,
            n_low_bits,
        })
    }

    /// Context with default guard (64 bits) and low precision (96 bits or
    /// half the target, whichever is smaller).
    pub fn with_bits(n_bits: u32) -> Result<Self> {
        let low = 96.min(n_bits / 2).max(53);
        Self::new(n_bits, 64, low)
    }

    /// Mantissa size used for every floating value.
    pub fn working(&self) -> u32 {
        self.n_bits + self.guard_bits
    }

    /// Mantissa size for low-precision tracking.
    pub fn low_working(&self) -> u32 {
        self.n_low_bits + self.guard_bits / 2
    }

    /// Same guard and low settings, doubled target precision.
    pub fn doubled(&self) -> Self {
        Self {
            n_bits: self.n_bits * 2,
            guard_bits: self.guard_bits,
            n_low_bits: self.n_low_bits,
        }
    }

    /// A context whose target precision is `bits` (used to run the same code
    /// at the tracking precision).
    pub fn at_bits(&self, bits: u32) -> Self {
        Self {
            n_bits: bits.max(64),
            guard_bits: self.guard_bits,
            n_low_bits: self.n_low_bits.min(bits.max(64) - 1),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_contexts() {
        assert!(PrecisionContext::new(32, 64, 16).is_err());
        assert!(PrecisionContext::new(128, 16, 64).is_err());
        assert!(PrecisionContext::new(128, 64, 128).is_err());
        let c = PrecisionContext::new(128, 32, 64).unwrap();
        assert_eq!(c.working(), 160);
        assert_eq!(c.doubled().n_bits, 256);
    }
}
