use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rug::{Complex, Integer, Rational};

use crate::error::{Error, Result};
use crate::interp::TriPoly;
use crate::invariants::InvariantKind;
use crate::numerics::scalar::log2_abs;
use crate::numerics::{Scalar, UniPoly};

/// Which of the four stored polynomials a block of monomials belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolyId {
    Phi1,
    Psi2,
    Psi3,
    Den,
}

impl PolyId {
    pub const ALL: [PolyId; 4] = [PolyId::Phi1, PolyId::Psi2, PolyId::Psi3, PolyId::Den];

    pub fn name(&self) -> &'static str {
        match self {
            PolyId::Phi1 => "phi1",
            PolyId::Psi2 => "psi2",
            PolyId::Psi3 => "psi3",
            PolyId::Den => "den",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown polynomial {s:?}")))
    }

    /// The index m of Φ₁ / Ψ₂ / Ψ₃.
    pub fn m(&self) -> Option<u32> {
        match self {
            PolyId::Phi1 => Some(1),
            PolyId::Psi2 => Some(2),
            PolyId::Psi3 => Some(3),
            PolyId::Den => None,
        }
    }
}

/// Φ₁, Ψ₂, Ψ₃ over one shared denominator D:
/// Φ₁ = Σ_ℓ phi1_num[ℓ]·X^ℓ / D (with phi1_num[q] = D), and likewise for
/// Ψ₂, Ψ₃ with ℓ < q. Coefficients are integers stored as rationals.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularPolynomialSet {
    pub p: u64,
    pub kind: InvariantKind,
    pub phi1_num: BTreeMap<u32, TriPoly<Rational>>,
    pub psi2_num: BTreeMap<u32, TriPoly<Rational>>,
    pub psi3_num: BTreeMap<u32, TriPoly<Rational>>,
    pub denominator: TriPoly<Rational>,
}

/// The three polynomials at a point of invariant space, as polynomials in X.
#[derive(Clone, Debug)]
pub struct Specialized {
    pub phi1: UniPoly,
    pub psi2: UniPoly,
    pub psi3: UniPoly,
}

fn file_name(id: PolyId) -> String {
    format!("{}.modpoly", id.name())
}

impl ModularPolynomialSet {
    /// Degree of Φ₁ in X.
    pub fn q(&self) -> u32 {
        self.phi1_num.keys().next_back().copied().unwrap_or(0)
    }

    pub fn numerators(&self, id: PolyId) -> Option<&BTreeMap<u32, TriPoly<Rational>>> {
        match id {
            PolyId::Phi1 => Some(&self.phi1_num),
            PolyId::Psi2 => Some(&self.psi2_num),
            PolyId::Psi3 => Some(&self.psi3_num),
            PolyId::Den => None,
        }
    }

    pub fn numerators_mut(&mut self, id: PolyId) -> Option<&mut BTreeMap<u32, TriPoly<Rational>>> {
        match id {
            PolyId::Phi1 => Some(&mut self.phi1_num),
            PolyId::Psi2 => Some(&mut self.psi2_num),
            PolyId::Psi3 => Some(&mut self.psi3_num),
            PolyId::Den => None,
        }
    }

    /// Per-variable degrees of the numerator of X^ℓ in one polynomial.
    pub fn degrees(&self, id: PolyId, l: u32) -> Option<[u32; 3]> {
        self.numerators(id)?.get(&l).map(|p| p.degrees())
    }

    pub fn monomial_count(&self) -> usize {
        self.denominator.len()
            + [&self.phi1_num, &self.psi2_num, &self.psi3_num]
                .iter()
                .flat_map(|m| m.values())
                .map(|p| p.len())
                .sum::<usize>()
    }

    fn header(&self, id: PolyId) -> String {
        format!("MODPOLY v1\nkind={}\np={}\npoly={}\n", self.kind.name(), self.p, id.name())
    }

    /// One polynomial in the line-oriented text format.
    pub fn poly_text(&self, id: PolyId) -> Result<String> {
        let mut s = self.header(id);
        let int = |c: &Rational| -> Result<Integer> {
            if *c.denom() != 1 {
                return Err(Error::Config(format!("non-integral coefficient {c}")));
            }
            Ok(c.numer().clone())
        };
        match self.numerators(id) {
            Some(map) => {
                for (l, poly) in map {
                    for (m, c) in &poly.terms {
                        writeln!(s, "{l} {} {} {} {}", m[0], m[1], m[2], int(c)?).expect("string write");
                    }
                }
            }
            None => {
                for (m, c) in &self.denominator.terms {
                    writeln!(s, "{} {} {} {}", m[0], m[1], m[2], int(c)?).expect("string write");
                }
            }
        }
        Ok(s)
    }

    pub fn to_text(&self) -> Result<String> {
        let mut s = String::new();
        for id in PolyId::ALL {
            s += &self.poly_text(id)?;
        }
        Ok(s)
    }

    /// Parse one or more concatenated blocks.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut p = None;
        let mut current: Option<PolyId> = None;
        let mut maps: BTreeMap<PolyId, BTreeMap<u32, TriPoly<Rational>>> = BTreeMap::new();
        let mut den = TriPoly::new();
        let bad = |n: usize, msg: &str| Error::Parse(format!("line {}: {msg}", n + 1));
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "MODPOLY v1" {
                current = None;
                continue;
            }
            if let Some((key, val)) = line.split_once('=') {
                match key {
                    "kind" => {
                        let k = InvariantKind::parse(val)?;
                        if kind.is_some_and(|old| old != k) {
                            return Err(bad(n, "mixed kinds"));
                        }
                        kind = Some(k);
                    }
                    "p" => {
                        let v: u64 = val.parse().map_err(|_| bad(n, "bad p"))?;
                        if p.is_some_and(|old| old != v) {
                            return Err(bad(n, "mixed p"));
                        }
                        p = Some(v);
                    }
                    "poly" => current = Some(PolyId::parse(val)?),
                    k if k.starts_with("alpha_") || k.starts_with("c_") => {
                        return Err(bad(n, "per-coefficient Streng headers are not supported"));
                    }
                    _ => return Err(bad(n, "unknown header")),
                }
                continue;
            }
            let id = current.ok_or_else(|| bad(n, "monomial before poly= header"))?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            let want = if id == PolyId::Den { 4 } else { 5 };
            if fields.len() != want {
                return Err(bad(n, "wrong field count"));
            }
            let nums: Vec<u32> = fields[..want - 1]
                .iter()
                .map(|f| f.parse().map_err(|_| bad(n, "bad exponent")))
                .collect::<Result<_>>()?;
            let c: Integer = fields[want - 1].parse().map_err(|_| bad(n, "bad coefficient"))?;
            if id == PolyId::Den {
                den.add_term([nums[0], nums[1], nums[2]], Rational::from(c));
            } else {
                maps.entry(id)
                    .or_default()
                    .entry(nums[0])
                    .or_default()
                    .add_term([nums[1], nums[2], nums[3]], Rational::from(c));
            }
        }
        let kind = kind.ok_or_else(|| Error::Parse("missing kind".into()))?;
        let p = p.ok_or_else(|| Error::Parse("missing p".into()))?;
        if den.is_zero() {
            return Err(Error::Parse("missing or zero denominator".into()));
        }
        let mut take = |id| maps.remove(&id).unwrap_or_default();
        Ok(Self {
            p,
            kind,
            phi1_num: take(PolyId::Phi1),
            psi2_num: take(PolyId::Psi2),
            psi3_num: take(PolyId::Psi3),
            denominator: den,
        })
    }

    /// One file per polynomial inside `dir`.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for id in PolyId::ALL {
            std::fs::write(dir.join(file_name(id)), self.poly_text(id)?)?;
        }
        Ok(())
    }

    /// Reads every `*.modpoly` file of `dir` (or a single file).
    pub fn read_path(path: &Path) -> Result<Self> {
        if path.is_file() {
            return Self::from_text(&std::fs::read_to_string(path)?);
        }
        let mut files: Vec<_> = std::fs::read_dir(path)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|e| e == "modpoly"))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::Io(format!("no .modpoly files in {}", path.display())));
        }
        let mut text = String::new();
        for f in files {
            text += &std::fs::read_to_string(f)?;
            text.push('\n');
        }
        Self::from_text(&text)
    }

    /// Φ₁, Ψ₂, Ψ₃ with the invariants fixed to `at`.
    pub fn specialize(&self, at: &[Complex; 3], prec: u32) -> Result<Specialized> {
        let d = self.denominator.to_complex(prec).eval(at);
        let scale = self
            .denominator
            .terms
            .values()
            .map(|c| c.log2_mag())
            .fold(f64::NEG_INFINITY, f64::max)
            + at.iter().map(log2_abs).fold(0.0, f64::max) * self.denominator.total_degree().unwrap_or(0) as f64;
        if d.is_zero() || log2_abs(&d) < scale - prec as f64 / 2.0 {
            return Err(Error::VanishingDenominator);
        }
        let side = |map: &BTreeMap<u32, TriPoly<Rational>>| -> UniPoly {
            let len = map.keys().next_back().map_or(0, |l| *l as usize + 1);
            let mut c = vec![Complex::new(prec); len];
            for (l, poly) in map {
                c[*l as usize] = Complex::with_val(prec, poly.to_complex(prec).eval(at) / &d);
            }
            UniPoly::new(c)
        };
        Ok(Specialized {
            phi1: side(&self.phi1_num),
            psi2: side(&self.psi2_num),
            psi3: side(&self.psi3_num),
        })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// A tiny hand-made set with the right shape, for format tests.
    pub(crate) fn toy_set() -> ModularPolynomialSet {
        let q = |n: i64| Rational::from(n);
        let den = TriPoly::from_terms([([0, 0, 0], q(1)), ([2, 2, 2], q(-32))]);
        let mut phi1 = BTreeMap::new();
        phi1.insert(0, TriPoly::from_terms([([1, 0, 0], q(3)), ([0, 1, 1], q(-7))]));
        phi1.insert(1, den.clone());
        let mut psi2 = BTreeMap::new();
        psi2.insert(0, TriPoly::from_terms([([0, 1, 0], q(5))]));
        let mut psi3 = BTreeMap::new();
        psi3.insert(0, TriPoly::from_terms([([0, 0, 1], q(5))]));
        ModularPolynomialSet {
            p: 3,
            kind: InvariantKind::ThetaQuotient,
            phi1_num: phi1,
            psi2_num: psi2,
            psi3_num: psi3,
            denominator: den,
        }
    }

    #[test]
    fn text_round_trip() {
        let s = toy_set();
        let text = s.to_text().unwrap();
        assert!(text.starts_with("MODPOLY v1\nkind=bprime\np=3\npoly=phi1\n"));
        assert!(text.contains("poly=den\n0 0 0 1\n"));
        assert_eq!(ModularPolynomialSet::from_text(&text).unwrap(), s);
        // blocks may come in any order, with comments in between
        let mut blocks: Vec<String> = PolyId::ALL.iter().map(|&id| s.poly_text(id).unwrap()).collect();
        blocks.reverse();
        let joined = blocks.join("# next block\n");
        assert_eq!(ModularPolynomialSet::from_text(&joined).unwrap(), s);
    }

    #[test]
    fn malformed_input_is_rejected() {
        assert!(ModularPolynomialSet::from_text("MODPOLY v1\nkind=bprime\np=3\n1 2 3 4\n").is_err());
        assert!(ModularPolynomialSet::from_text("MODPOLY v1\nkind=bprime\np=3\npoly=den\n1 2 x\n").is_err());
        assert!(ModularPolynomialSet::from_text("MODPOLY v1\nkind=bprime\np=3\npoly=phi1\n0 0 0 0 1\n").is_err());
    }

    #[test]
    fn directory_round_trip() {
        let dir = std::env::temp_dir().join(format!("modpoly-set-{}", std::process::id()));
        let s = toy_set();
        s.write_dir(&dir).unwrap();
        assert_eq!(ModularPolynomialSet::read_path(&dir).unwrap(), s);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn specialization_divides_by_the_denominator() {
        let s = toy_set();
        let prec = 128;
        let at = [Complex::with_val(prec, 2), Complex::with_val(prec, 1), Complex::with_val(prec, 3)];
        let sp = s.specialize(&at, prec).unwrap();
        assert_eq!(sp.phi1.coeffs.len(), 2);
        assert!(Complex::with_val(prec, &sp.phi1.coeffs[1] - 1u32).abs().real().to_f64() < 1e-30);
        let d = 1.0 - 32.0 * 36.0;
        let want = (6.0 - 21.0) / d;
        assert!((sp.phi1.coeffs[0].real().to_f64() - want).abs() < 1e-15);
    }
}
