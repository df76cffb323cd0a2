use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Float, Integer, Rational};

use super::tripoly::{TriPoly, TriRat};
use super::uni::{circle_nodes, fit_rational, interp_poly_uni, AxisInterpolator, Normalization, RationalFit};
use crate::error::{Error, Result};
use crate::numerics::scalar::{log2_abs, log2_abs_real};
use crate::numerics::{euclid_rows, poly_product_tree, rational_reconstruct_within, Scalar, UniPoly};

/// A function C³ → C^outputs that can only be evaluated.
pub trait BlackBox: Sync {
    fn outputs(&self) -> usize;
    fn prec(&self) -> u32;
    /// Values at consecutive points of a line; implementations may use each
    /// point to warm-start the next, so callers keep lines in order.
    fn eval_line(&self, pts: &[[Complex; 3]]) -> Result<Vec<Vec<Complex>>>;
}

/// Black box from a pointwise closure.
pub struct FnBlackBox<F> {
    pub f: F,
    pub outputs: usize,
    pub prec: u32,
}

impl<F> BlackBox for FnBlackBox<F>
where
    F: Fn(&[Complex; 3]) -> Result<Vec<Complex>> + Sync,
{
    fn outputs(&self) -> usize {
        self.outputs
    }
    fn prec(&self) -> u32 {
        self.prec
    }
    fn eval_line(&self, pts: &[[Complex; 3]]) -> Result<Vec<Vec<Complex>>> {
        pts.iter().map(|p| (self.f)(p)).collect()
    }
}

/// Degrees of a rational function A/B: per variable and total, for the
/// numerator and the denominator.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DegreeProfile {
    pub num: [u32; 3],
    pub den: [u32; 3],
    pub num_total: u32,
    pub den_total: u32,
}

impl DegreeProfile {
    pub fn of<T: Scalar>(num: &TriPoly<T>, den: &TriPoly<T>) -> Self {
        Self {
            num: num.degrees(),
            den: den.degrees(),
            num_total: num.total_degree().unwrap_or(0),
            den_total: den.total_degree().unwrap_or(0),
        }
    }

    /// Cauchy nodes needed along a line (x, xy, xz).
    pub fn nodes_per_line(&self) -> usize {
        (self.num_total + self.den_total + 1) as usize
    }

    pub fn max_with(&self, o: &Self) -> Self {
        Self {
            num: std::array::from_fn(|v| self.num[v].max(o.num[v])),
            den: std::array::from_fn(|v| self.den[v].max(o.den[v])),
            num_total: self.num_total.max(o.num_total),
            den_total: self.den_total.max(o.den_total),
        }
    }

    /// True if every degree of `self` is at least the corresponding one of
    /// `o`.
    pub fn dominates(&self, o: &Self) -> bool {
        (0..3).all(|v| self.num[v] >= o.num[v] && self.den[v] >= o.den[v])
            && self.num_total >= o.num_total
            && self.den_total >= o.den_total
    }
}

/// Where interpolation nodes live: per variable, a circle of the given
/// center and radius.
#[derive(Clone, Debug)]
pub struct NodeGeometry {
    pub center: [(f64, f64); 3],
    pub radius: [f64; 3],
}

impl Default for NodeGeometry {
    fn default() -> Self {
        Self {
            center: [(0.0, 0.0); 3],
            radius: [1.0; 3],
        }
    }
}

impl NodeGeometry {
    pub fn nodes(&self, v: usize, n: usize, phase: f64, prec: u32) -> Vec<Complex> {
        circle_nodes(n, self.center[v], self.radius[v], phase, prec)
    }

    /// A random point on the circle of variable v.
    pub fn random_point<R: Rng>(&self, v: usize, rng: &mut R, prec: u32) -> Complex {
        let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (c, r) = (self.center[v], self.radius[v]);
        Complex::with_val(prec, (c.0 + r * a.cos(), c.1 + r * a.sin()))
    }
}

#[derive(Clone, Debug)]
pub struct RatInterpConfig {
    pub geometry: NodeGeometry,
    pub shift: [i64; 3],
    pub seed: u64,
    pub max_retries: usize,
    /// Recover only the denominator: the (y, z) grid is sized by the
    /// denominator degrees and the numerator comes back empty.
    pub den_only: bool,
}

impl Default for RatInterpConfig {
    fn default() -> Self {
        Self {
            geometry: NodeGeometry::default(),
            shift: [0; 3],
            seed: 1,
            max_retries: 4,
            den_only: false,
        }
    }
}

fn pad(p: &UniPoly, n: usize, prec: u32) -> Vec<Complex> {
    let mut c = p.coeffs.clone();
    c.resize(n, Complex::new(prec));
    c
}

/// Coefficients [j][k] of the bivariate interpolant of vals[j·nz + k].
fn interp2(ay: &AxisInterpolator, az: &AxisInterpolator, vals: &[Complex]) -> Vec<Vec<Complex>> {
    let (ny, nz) = (ay.len(), az.len());
    let rows: Vec<Vec<Complex>> = (0..ny).map(|j| az.apply(&vals[j * nz..(j + 1) * nz])).collect();
    let mut out = vec![Vec::with_capacity(nz); ny];
    for k in 0..nz {
        let col: Vec<Complex> = (0..ny).map(|j| rows[j][k].clone()).collect();
        for (j, c) in ay.apply(&col).into_iter().enumerate() {
            out[j].push(c);
        }
    }
    out
}

/// Turn the per-line coefficient of x^t (as a function of the line
/// parameters y, z) back into monomials X^(t−j−k) Y^j Z^k.
fn back_substitute(
    coeffs: &[Vec<Complex>],
    deg: usize,
    bounds: [u32; 3],
    ay: &AxisInterpolator,
    az: &AxisInterpolator,
    tol_bits: f64,
) -> TriPoly<Complex> {
    let mut p = TriPoly::new();
    for t in 0..=deg {
        let vals: Vec<Complex> = coeffs.iter().map(|c| c[t].clone()).collect();
        let c2 = interp2(ay, az, &vals);
        for (j, row) in c2.into_iter().enumerate() {
            for (k, c) in row.into_iter().enumerate() {
                if j + k > t || t - j - k > bounds[0] as usize {
                    continue;
                }
                p.terms.insert([(t - j - k) as u32, j as u32, k as u32], c);
            }
        }
    }
    p.terms.retain(|_, c| !(c.real().is_zero() && c.imag().is_zero()));
    p.trim(tol_bits);
    p
}

fn rat_attempt(
    bb: &dyn BlackBox,
    output: usize,
    profile: &DegreeProfile,
    geom: &NodeGeometry,
    shift: [i64; 3],
    den_only: bool,
    rng: &mut ChaCha8Rng,
) -> Result<TriRat<Complex>> {
    let prec = bb.prec();
    let (da, db) = (profile.num_total as usize, profile.den_total as usize);
    let m = da + db + 2; // one held-out node per line
    let (ny, nz) = if den_only {
        (profile.den[1] as usize + 1, profile.den[2] as usize + 1)
    } else {
        (
            profile.num[1].max(profile.den[1]) as usize + 1,
            profile.num[2].max(profile.den[2]) as usize + 1,
        )
    };
    let xs = geom.nodes(0, m, rng.gen(), prec);
    let ay = AxisInterpolator::new(geom.nodes(1, ny, rng.gen(), prec))?;
    let az = AxisInterpolator::new(geom.nodes(2, nz, rng.gen(), prec))?;
    let lines: Vec<(usize, usize)> = (0..ny).flat_map(|j| (0..nz).map(move |k| (j, k))).collect();
    let s: [Complex; 3] = std::array::from_fn(|v| Complex::with_val(prec, shift[v]));
    let fits: Vec<(Vec<Complex>, Vec<Complex>)> = lines
        .par_iter()
        .map(|&(j, k)| {
            let (y, z) = (&ay.nodes[j], &az.nodes[k]);
            let pts: Vec<[Complex; 3]> = xs
                .iter()
                .map(|x| {
                    [
                        Complex::with_val(prec, x + &s[0]),
                        Complex::with_val(prec, x * y) + &s[1],
                        Complex::with_val(prec, x * z) + &s[2],
                    ]
                })
                .collect();
            let vals: Vec<Complex> = bb.eval_line(&pts)?.into_iter().map(|mut v| v.swap_remove(output)).collect();
            let (r, t) = match fit_rational(&xs, &vals, da, db, Normalization::Constant)? {
                RationalFit::Fit(r, t) => (r, t),
                _ => {
                    // tell an impossible normalisation apart from a degenerate line
                    return Err(match fit_rational(&xs, &vals, da, db, Normalization::Leading)? {
                        RationalFit::Fit(_, t) if t.coeffs.first().is_none_or(|c| log2_abs(c) < t.max_log2() - prec as f64 / 4.0) => {
                            Error::NormalizationZero
                        }
                        _ => Error::Degenerate(format!("line ({j}, {k}) has no fit of type ({da}, {db})")),
                    });
                }
            };
            if r.deg_i() < da as isize || t.deg_i() < db as isize {
                // exact zeros only; numerically tiny top coefficients are
                // caught by the singular solve
                return Err(Error::Degenerate(format!("line ({j}, {k}) drops degree")));
            }
            Ok((pad(&r, da + 1, prec), pad(&t, db + 1, prec)))
        })
        .collect::<Result<_>>()?;
    let (nums, dens): (Vec<_>, Vec<_>) = fits.into_iter().unzip();
    let tol = prec as f64 / 2.0;
    let num = if den_only {
        TriPoly::new()
    } else {
        back_substitute(&nums, da, profile.num, &ay, &az, tol)
    };
    let den = back_substitute(&dens, db, profile.den, &ay, &az, tol);
    let back: [Complex; 3] = std::array::from_fn(|v| Complex::with_val(prec, -shift[v]));
    Ok(TriRat {
        num: num.shift(&back),
        den: den.shift(&back),
        shift,
    })
}

/// Trivariate rational interpolation from a black box, given its degree
/// profile. Runs on the structured set (xᵢ + s₀, xᵢyⱼ + s₁, xᵢz_k + s₂): for
/// each (yⱼ, z_k) a univariate Cauchy interpolation in x with the
/// denominator's constant term fixed to 1, then interpolation of every
/// x-coefficient in (y, z), then back-substitution. A vanishing
/// normalising coefficient triggers a new random shift; degenerate lines
/// trigger fresh nodes.
pub fn interp_rat_tri(
    bb: &dyn BlackBox,
    output: usize,
    profile: &DegreeProfile,
    cfg: &RatInterpConfig,
) -> Result<TriRat<Complex>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut shift = cfg.shift;
    let mut last = Error::Degenerate("no attempt made".into());
    for attempt in 0..=cfg.max_retries {
        match rat_attempt(bb, output, profile, &cfg.geometry, shift, cfg.den_only, &mut rng) {
            Ok(r) => return Ok(r),
            Err(Error::NormalizationZero) => {
                log::debug!("attempt {attempt}: normalising coefficient vanishes, shifting");
                shift = std::array::from_fn(|_| rng.gen_range(-3..=3));
                last = Error::NormalizationZero;
            }
            Err(e @ Error::Degenerate(_)) | Err(e @ Error::NearDenominator) | Err(e @ Error::PrecisionLoss(_)) => {
                log::debug!("attempt {attempt}: {e}, resampling");
                last = e;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Candidate type from the largest degree jump of the Euclidean remainder
/// sequence. Cheap, but unreliable when the interpolating polynomial has
/// fast decaying coefficients, so only used as a starting point.
fn euclid_guess(nodes: &[Complex], values: &[Complex]) -> Option<(usize, usize)> {
    let prec = nodes[0].prec().0;
    let f = interp_poly_uni(nodes, values).ok()?;
    let g = poly_product_tree(nodes);
    let n = nodes.len() as isize;
    euclid_rows(&g, &f, prec as f64 / 2.0)
        .iter()
        .skip(1)
        .filter(|row| !row.t.is_zero())
        .map(|row| (row.r.deg_i().max(0), row.t.deg_i()))
        .filter(|&(a, b)| n - a - b >= 2)
        .max_by_key(|&(a, b)| n - a - b)
        .map(|(a, b)| (a as usize, b as usize))
}

/// Numerator and denominator degree of a univariate rational function from
/// n samples. A fit of type (a, b) through a + b + 1 nodes that also
/// matches the held-out nodes exists exactly when a ≥ a₀ and b ≥ b₀. Once
/// one such type is known, a₀ and b₀ follow by bisection along each axis.
/// `None` when no admissible type fits (too few nodes).
pub fn line_degrees(nodes: &[Complex], values: &[Complex]) -> Result<Option<(u32, u32)>> {
    let n = nodes.len();
    if n < 5 {
        return Ok(None);
    }
    let budget = n - 3;
    let ok = |a: usize, b: usize| -> Result<bool> {
        Ok(!matches!(
            fit_rational(nodes, values, a, b, Normalization::Constant)?,
            RationalFit::Mismatch
        ))
    };
    let mut candidates: Vec<(usize, usize)> = euclid_guess(nodes, values)
        .into_iter()
        .filter(|&(a, b)| a + b <= budget)
        .collect();
    for num in [4, 2, 6, 1, 3, 5, 7] {
        let a = budget * num / 8;
        candidates.push((a, budget - a));
    }
    let mut found = None;
    for (a, b) in candidates {
        if ok(a, b)? {
            found = Some((a, b));
            break;
        }
    }
    let Some((a1, b1)) = found else {
        return Ok(None);
    };
    let smallest = |hi: usize, pred: &dyn Fn(usize) -> Result<bool>| -> Result<usize> {
        let mut lo = 0usize;
        let mut hi = hi;
        while lo < hi {
            let mid = (lo + hi) / 2;
            if pred(mid)? {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    };
    let a0 = smallest(a1, &|a| ok(a, b1))?;
    let b0 = smallest(b1, &|b| ok(a1, b))?;
    Ok(Some((a0 as u32, b0 as u32)))
}

#[derive(Clone, Debug)]
pub struct DiscoveryConfig {
    pub geometry: NodeGeometry,
    pub start_nodes: usize,
    pub max_nodes: usize,
    pub probes: usize,
    pub shifted_probes: usize,
    pub extra_probes: usize,
    pub seed: u64,
    /// Restrict the analysis to these outputs (all when `None`); profiles
    /// come back in this order.
    pub outputs: Option<Vec<usize>>,
}

impl DiscoveryConfig {
    fn selected(&self, all: usize) -> Vec<usize> {
        self.outputs.clone().unwrap_or_else(|| (0..all).collect())
    }
}

impl Default for DiscoveryConfig {
    fn default() -> Self {
        Self {
            geometry: NodeGeometry::default(),
            start_nodes: 16,
            max_nodes: 256,
            probes: 3,
            shifted_probes: 2,
            extra_probes: 3,
            seed: 7,
            outputs: None,
        }
    }
}

#[derive(Clone, Copy)]
enum LineKind {
    Total,
    Var(usize),
}

/// Degrees for every output along one line, doubling the node count until
/// each output shows its degree jump.
fn probe_line(
    bb: &dyn BlackBox,
    kind: LineKind,
    base: &[Complex; 3],
    shift: [i64; 3],
    phase: f64,
    cfg: &DiscoveryConfig,
) -> Result<Vec<(u32, u32)>> {
    let prec = bb.prec();
    let axis = match kind {
        LineKind::Total => 0,
        LineKind::Var(v) => v,
    };
    let mut n = cfg.start_nodes;
    loop {
        let ts = cfg.geometry.nodes(axis, n, phase, prec);
        let pts: Vec<[Complex; 3]> = ts
            .iter()
            .map(|t| {
                let mut p = match kind {
                    LineKind::Total => [
                        t.clone(),
                        Complex::with_val(prec, t * &base[1]),
                        Complex::with_val(prec, t * &base[2]),
                    ],
                    LineKind::Var(v) => {
                        let mut p = base.clone();
                        p[v] = t.clone();
                        p
                    }
                };
                for v in 0..3 {
                    p[v] += shift[v];
                }
                p
            })
            .collect();
        let vals = bb.eval_line(&pts)?;
        let sel = cfg.selected(bb.outputs());
        let mut out = Vec::with_capacity(sel.len());
        let mut complete = true;
        for o in sel {
            let col: Vec<Complex> = vals.iter().map(|v| v[o].clone()).collect();
            match line_degrees(&ts, &col)? {
                Some(d) => out.push(d),
                None => {
                    complete = false;
                    break;
                }
            }
        }
        if complete {
            return Ok(out);
        }
        if n >= cfg.max_nodes {
            return Err(Error::Unstable(format!("no degree jump with {n} nodes")));
        }
        n = (2 * n).min(cfg.max_nodes);
    }
}

/// One probe: a total-degree line and three per-variable lines.
fn probe(bb: &dyn BlackBox, shift: [i64; 3], rng: &mut ChaCha8Rng, cfg: &DiscoveryConfig) -> Result<Vec<DegreeProfile>> {
    let prec = bb.prec();
    let base: [Complex; 3] = std::array::from_fn(|v| cfg.geometry.random_point(v, rng, prec));
    let mut prof = vec![DegreeProfile::default(); cfg.selected(bb.outputs()).len()];
    let tot = probe_line(bb, LineKind::Total, &base, shift, rng.gen(), cfg)?;
    for (p, (a, b)) in prof.iter_mut().zip(tot) {
        p.num_total = a;
        p.den_total = b;
    }
    for v in 0..3 {
        let d = probe_line(bb, LineKind::Var(v), &base, shift, rng.gen(), cfg)?;
        for (p, (a, b)) in prof.iter_mut().zip(d) {
            p.num[v] = a;
            p.den[v] = b;
        }
    }
    Ok(prof)
}

/// Degree profile of every output of the black box: coordinatewise maxima
/// over random probes, some of them at shifted points, continued until a
/// probe adds nothing.
pub fn discover_degrees(bb: &dyn BlackBox, cfg: &DiscoveryConfig) -> Result<Vec<DegreeProfile>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut acc = vec![DegreeProfile::default(); cfg.selected(bb.outputs()).len()];
    let merge = |acc: &mut Vec<DegreeProfile>, new: Vec<DegreeProfile>| -> bool {
        let mut changed = false;
        for (a, n) in acc.iter_mut().zip(new) {
            let m = a.max_with(&n);
            changed |= m != *a;
            *a = m;
        }
        changed
    };
    for _ in 0..cfg.probes {
        let p = probe(bb, [0; 3], &mut rng, cfg)?;
        merge(&mut acc, p);
    }
    for _ in 0..cfg.shifted_probes {
        let shift = std::array::from_fn(|_| rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 });
        let p = probe(bb, shift, &mut rng, cfg)?;
        merge(&mut acc, p);
    }
    let mut stable = false;
    for _ in 0..cfg.extra_probes {
        let p = probe(bb, [0; 3], &mut rng, cfg)?;
        if !merge(&mut acc, p) {
            stable = true;
            break;
        }
    }
    if !stable && cfg.extra_probes > 0 {
        return Err(Error::Unstable("degree maxima still moving".into()));
    }
    Ok(acc)
}

fn exp2_rational(e: f64) -> Rational {
    let f = Float::with_val(64, e).exp2();
    f.to_rational().expect("finite")
}

/// Rational coefficients from floating ones: each real part is replaced by
/// the first continued-fraction convergent with denominator ≤ `den_bound`
/// within 2^-tol_bits of the largest coefficient; imaginary parts must
/// vanish to the same tolerance. Coefficients below the tolerance are
/// dropped.
pub fn exactify_poly(p: &TriPoly<Complex>, den_bound: &Integer, tol_bits: f64) -> Result<TriPoly<Rational>> {
    let w = p.max_log2().max(0.0) - tol_bits;
    let window = exp2_rational(w);
    let mut out = TriPoly::new();
    for (m, c) in &p.terms {
        if log2_abs(c) < w {
            continue;
        }
        if log2_abs_real(c.imag()) >= w {
            return Err(Error::NoConvergent);
        }
        let r = rational_reconstruct_within(c.real(), den_bound, &window)?;
        out.add_term(*m, r);
    }
    Ok(out)
}

impl TriRat<Rational> {
    /// Scale numerator and denominator together to coprime integer
    /// coefficients, with the denominator's leading coefficient positive.
    pub fn primitive(&self) -> Self {
        let mut lcm = Integer::from(1);
        for c in self.num.terms.values().chain(self.den.terms.values()) {
            lcm.lcm_mut(c.denom());
        }
        let mut g = Integer::new();
        for c in self.num.terms.values().chain(self.den.terms.values()) {
            let n = Integer::from(c.numer() * &lcm) / c.denom();
            g.gcd_mut(&n);
        }
        let mut f = Rational::from((lcm, g));
        if self.den.terms.values().next_back().is_some_and(|c| *c < 0) {
            f = -f;
        }
        Self {
            num: self.num.scale(&f),
            den: self.den.scale(&f),
            shift: self.shift,
        }
    }
}

pub fn exactify_rat(r: &TriRat<Complex>, den_bound: &Integer, tol_bits: f64) -> Result<TriRat<Rational>> {
    // a common absolute window for both halves
    let top = r.num.max_log2().max(r.den.max_log2());
    let fix = |p: &TriPoly<Complex>| exactify_poly(p, den_bound, tol_bits - (top - p.max_log2()).max(0.0));
    Ok(TriRat {
        num: fix(&r.num)?,
        den: fix(&r.den)?,
        shift: r.shift,
    }
    .primitive())
}
