use g2modpoly::interp::*;
use g2modpoly::numerics::Rational;
use g2modpoly::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Integer};

const PREC: u32 = 320;

fn random_poly(rng: &mut ChaCha8Rng, deg: [u32; 3], terms: usize, with_constant: bool) -> TriPoly<Rational> {
    let mut p = TriPoly::new();
    let coeff = |rng: &mut ChaCha8Rng| loop {
        let c: i64 = rng.gen_range(-1_000_000..=1_000_000);
        if c != 0 {
            return Rational::from(c);
        }
    };
    if with_constant {
        p.add_term([0, 0, 0], coeff(rng));
    }
    for _ in 0..terms {
        let m = [rng.gen_range(0..=deg[0]), rng.gen_range(0..=deg[1]), rng.gen_range(0..=deg[2])];
        p.add_term(m, coeff(rng));
    }
    // make the degree bounds attained so the profile is exercised fully
    p.add_term(deg, coeff(rng));
    p
}

fn black_box<'a>(num: &'a TriPoly<Rational>, den: &'a TriPoly<Rational>) -> impl BlackBox + 'a {
    let (a, b) = (num.to_complex(PREC), den.to_complex(PREC));
    FnBlackBox {
        f: move |p: &[Complex; 3]| -> g2modpoly::Result<Vec<Complex>> {
            let d = b.eval(p);
            Ok(vec![Complex::with_val(PREC, a.eval(p) / d)])
        },
        outputs: 1,
        prec: PREC,
    }
}

fn same_fraction(a: &TriRat<Rational>, num: &TriPoly<Rational>, den: &TriPoly<Rational>) -> bool {
    a.num.mul(den) == num.mul(&a.den)
}

#[test]
fn discovery_never_underestimates() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for case in 0..15 {
        let dn = [rng.gen_range(0..=6), rng.gen_range(0..=4), rng.gen_range(0..=4)];
        let dd = [rng.gen_range(0..=5), rng.gen_range(0..=3), rng.gen_range(0..=3)];
        let num = random_poly(&mut rng, dn, 6, true);
        let den = random_poly(&mut rng, dd, 4, true);
        let truth = DegreeProfile::of(&num, &den);
        let bb = black_box(&num, &den);
        let cfg = DiscoveryConfig {
            seed: case,
            ..Default::default()
        };
        let found = discover_degrees(&bb, &cfg).unwrap()[0];
        assert!(found.dominates(&truth), "case {case}: {found:?} vs {truth:?}");
    }
}

fn running_example() -> (TriPoly<Rational>, TriPoly<Rational>) {
    // (3X²Y² + Y + 2)/(3XY + 3)
    let q = |n: i64| Rational::from(n);
    let num = TriPoly::from_terms([([2, 2, 0], q(3)), ([0, 1, 0], q(1)), ([0, 0, 0], q(2))]);
    let den = TriPoly::from_terms([([1, 1, 0], q(3)), ([0, 0, 0], q(3))]);
    (num, den)
}

#[test]
fn running_example_is_recovered_with_normalisation() {
    let (num, den) = running_example();
    let bb = black_box(&num, &den);
    let found = discover_degrees(&bb, &DiscoveryConfig::default()).unwrap()[0];
    assert_eq!(found, DegreeProfile::of(&num, &den));
    let r = interp_rat_tri(&bb, 0, &found, &RatInterpConfig::default()).unwrap();
    let exact = exactify_rat(&r, &Integer::from(1000), 160.0).unwrap();
    assert!(same_fraction(&exact, &num, &den));
    // the unnormalised failure mode produces 2Y² + 5Y − 6 as numerator
    let q = |n: i64| Rational::from(n);
    let bogus = TriPoly::from_terms([([0, 2, 0], q(2)), ([0, 1, 0], q(5)), ([0, 0, 0], q(-6))]);
    assert_ne!(exact.num, bogus);
    assert_ne!(exact.num.make_primitive().0, bogus);
}

#[test]
fn polynomial_has_unit_denominator() {
    let q = |n: i64| Rational::from(n);
    let num = TriPoly::from_terms([([1, 2, 0], q(5)), ([0, 0, 3], q(-1)), ([0, 0, 0], q(4))]);
    let den = TriPoly::constant(q(1));
    let bb = black_box(&num, &den);
    let r = interp_rat_tri(&bb, 0, &DegreeProfile::of(&num, &den), &RatInterpConfig::default()).unwrap();
    let exact = exactify_rat(&r, &Integer::from(1000), 160.0).unwrap();
    assert_eq!(exact.den, TriPoly::constant(q(1)));
    assert_eq!(exact.num, num);
}

#[test]
fn zero_constant_denominator_needs_shift() {
    let q = |n: i64| Rational::from(n);
    let num = TriPoly::from_terms([([0, 0, 0], q(1)), ([0, 1, 1], q(2))]);
    let den = TriPoly::from_terms([([1, 0, 0], q(1)), ([0, 1, 0], q(-3))]);
    let bb = black_box(&num, &den);
    let r = interp_rat_tri(&bb, 0, &DegreeProfile::of(&num, &den), &RatInterpConfig::default()).unwrap();
    assert_ne!(r.shift, [0, 0, 0]);
    let exact = exactify_rat(&r, &Integer::from(1000), 160.0).unwrap();
    assert!(same_fraction(&exact, &num, &den));
    let no_retry = RatInterpConfig {
        max_retries: 0,
        ..Default::default()
    };
    assert!(matches!(
        interp_rat_tri(&bb, 0, &DegreeProfile::of(&num, &den), &no_retry),
        Err(Error::NormalizationZero)
    ));
}
