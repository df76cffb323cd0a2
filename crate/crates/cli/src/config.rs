use std::path::PathBuf;

use g2modpoly::invariants::InvariantKind;
use g2modpoly::modpoly::is_prime;
use g2modpoly::{Error, Result};

pub const MIN_PREC_BITS: u32 = 128;

/// Everything a job needs, validated before any work starts.
#[derive(Clone, Debug, PartialEq)]
pub struct JobConfig {
    pub command: &'static str,
    pub kind: InvariantKind,
    pub p: u64,
    pub prec_bits: u32,
    pub threads: Option<usize>,
    pub seed: u64,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub resume: bool,
}

impl JobConfig {
    pub fn new(command: &'static str, kind: &str, p: u64) -> Result<Self> {
        Ok(Self {
            command,
            kind: InvariantKind::parse(kind).map_err(|e| Error::Config(e.to_string()))?,
            p,
            prec_bits: 400,
            threads: None,
            seed: 2024,
            input: None,
            output: None,
            resume: false,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !is_prime(self.p) {
            return Err(Error::Config(format!("p = {} is not prime", self.p)));
        }
        if self.kind == InvariantKind::ThetaQuotient && self.p == 2 {
            return Err(Error::Config("the b' polynomials need p > 2".into()));
        }
        if self.prec_bits < MIN_PREC_BITS {
            return Err(Error::Config(format!(
                "precision {} bits is below the minimum of {MIN_PREC_BITS}",
                self.prec_bits
            )));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("thread count must be positive".into()));
        }
        Ok(())
    }
}

/// 0 ok, 1 verification failure, 2 configuration error, 3 precision abort.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::Parse(_) | Error::Io(_) => 2,
        Error::Precision(_) | Error::PrecisionLoss(_) => 3,
        _ => 1,
    }
}
