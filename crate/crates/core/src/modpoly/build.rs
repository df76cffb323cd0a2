use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rug::{Complex, Integer, Rational};

use super::checkpoint::Checkpoint;
use super::evaluate::{cosets_for, evaluate_at};
use super::set::ModularPolynomialSet;
use crate::error::{Error, Result};
use crate::interp::{
    circle_nodes, discover_degrees, exactify_poly, interp_rat_tri, AxisInterpolator, BlackBox, DegreeProfile,
    DiscoveryConfig, RatInterpConfig, TensorInterpolator, TriPoly,
};
use crate::invariants::{InvariantKind, InvariantTriple};
use crate::inversion::invert_invariants;
use crate::numerics::scalar::log2_abs;
use crate::numerics::PrecisionContext;
use crate::siegel::PeriodMatrix;
use crate::symplectic::CosetTable;

/// Knobs of [`build`]. Everything random is drawn from `seed`.
#[derive(Clone, Debug)]
pub struct BuildStrategy {
    pub seed: u64,
    /// Precision doublings allowed before giving up.
    pub max_doublings: u32,
    /// Probes used for degree discovery: plain, shifted, confirming.
    pub probes: (usize, usize, usize),
    /// Random lines per variable when bounding numerator degrees.
    pub bound_probes: usize,
    /// Held-out nodes of the exactness gate.
    pub held_out: usize,
    /// Seconds between progress records.
    pub progress_every: u64,
}

impl Default for BuildStrategy {
    fn default() -> Self {
        Self {
            seed: 2024,
            max_doublings: 4,
            probes: (2, 1, 1),
            bound_probes: 2,
            held_out: 3,
            progress_every: 60,
        }
    }
}

/// What a build learned on the way, for logging and reports.
#[derive(Clone, Debug, Default)]
pub struct BuildStats {
    pub precision_bits: u32,
    pub probe_output: usize,
    pub probe_profile: DegreeProfile,
    pub numerator_bounds: [u32; 3],
    pub evaluations: usize,
    pub rejections: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug)]
pub struct BuildOutcome {
    pub set: ModularPolynomialSet,
    pub stats: BuildStats,
}

struct Progress {
    done: AtomicUsize,
    rejected: AtomicUsize,
    phase: Mutex<(String, usize, Instant)>,
    every: Duration,
    bits: u32,
}

impl Progress {
    fn new(every: u64, bits: u32) -> Self {
        Self {
            done: AtomicUsize::new(0),
            rejected: AtomicUsize::new(0),
            phase: Mutex::new((String::new(), 0, Instant::now())),
            every: Duration::from_secs(every),
            bits,
        }
    }

    fn start(&self, name: &str, total: usize) {
        log::info!("{name}: {total} evaluations planned at {} bits", self.bits);
        *self.phase.lock().expect("progress lock") = (name.to_string(), total, Instant::now());
    }

    fn tick(&self) {
        let n = self.done.fetch_add(1, Ordering::Relaxed) + 1;
        let mut g = self.phase.lock().expect("progress lock");
        if g.2.elapsed() >= self.every {
            log::info!(
                "{}: nodes done {n} (phase total {}), precision {} bits, rejections {}",
                g.0,
                g.1,
                self.bits,
                self.rejected.load(Ordering::Relaxed)
            );
            g.2 = Instant::now();
        }
    }
}

/// The coefficients of Φ₁ (below X^q), Ψ₂ and Ψ₃ as a black box in the
/// invariants. Each line is walked in order, reusing the previous period
/// matrix as the seed of the next inversion.
pub struct ModPolyBox<'a> {
    pub p: u64,
    pub kind: InvariantKind,
    pub cosets: &'a CosetTable,
    pub ctx: PrecisionContext,
    checkpoint: &'a Checkpoint,
    progress: Progress,
}

impl<'a> ModPolyBox<'a> {
    pub fn new(p: u64, kind: InvariantKind, cosets: &'a CosetTable, ctx: PrecisionContext, checkpoint: &'a Checkpoint) -> Self {
        Self::with_progress(p, kind, cosets, ctx, checkpoint, 60)
    }

    fn with_progress(
        p: u64,
        kind: InvariantKind,
        cosets: &'a CosetTable,
        ctx: PrecisionContext,
        checkpoint: &'a Checkpoint,
        every: u64,
    ) -> Self {
        Self {
            p,
            kind,
            cosets,
            ctx,
            checkpoint,
            progress: Progress::new(every, ctx.n_bits),
        }
    }


    fn eval_point(&self, pt: &[Complex; 3], seed: Option<&PeriodMatrix>) -> Result<(Vec<Complex>, Option<PeriodMatrix>)> {
        let key = Checkpoint::key(pt);
        if let Some(v) = self.checkpoint.get(&key) {
            return Ok((v, None));
        }
        let target = InvariantTriple {
            kind: self.kind,
            v: pt.clone(),
        };
        let res = invert_invariants(&target, seed, &self.ctx).and_then(|r| {
            let e = evaluate_at(&r.omega, self.p, self.kind, self.cosets, &self.ctx)?;
            Ok((e.flat(), r.omega))
        });
        match res {
            Ok((v, om)) => {
                self.checkpoint.put(&key, &v)?;
                self.progress.tick();
                Ok((v, Some(om)))
            }
            Err(e) => {
                self.progress.rejected.fetch_add(1, Ordering::Relaxed);
                log::debug!("node rejected: {e}");
                Err(match e {
                    Error::Config(_) | Error::Io(_) => e,
                    _ => Error::NearDenominator,
                })
            }
        }
    }
}

impl BlackBox for ModPolyBox<'_> {
    fn outputs(&self) -> usize {
        3 * self.cosets.reps.len()
    }

    fn prec(&self) -> u32 {
        self.ctx.working()
    }

    fn eval_line(&self, pts: &[[Complex; 3]]) -> Result<Vec<Vec<Complex>>> {
        let mut seed: Option<PeriodMatrix> = None;
        let mut out = Vec::with_capacity(pts.len());
        for pt in pts {
            let (v, om) = self.eval_point(pt, seed.as_ref())?;
            if om.is_some() {
                seed = om;
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// log2 of |D(pt)| relative to Σ|d|·|pt|^e.
fn relative_den(den: &TriPoly<Complex>, pt: &[Complex; 3]) -> f64 {
    let scale = den
        .terms
        .iter()
        .map(|(m, c)| log2_abs(c) + (0..3).filter(|&v| m[v] > 0).map(|v| m[v] as f64 * log2_abs(&pt[v])).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    log2_abs(&den.eval(pt)) - scale
}

/// Per-variable degree bounds of the numerators c·D, from random lines in
/// each variable on which c·D is a polynomial.
fn numerator_bounds(
    bb: &ModPolyBox<'_>,
    den: &TriPoly<Complex>,
    rng: &mut ChaCha8Rng,
    probes: usize,
) -> Result<[u32; 3]> {
    let prec = bb.prec();
    let zero_bits = bb.ctx.n_bits as f64 / 2.0;
    let mut bounds = [0u32; 3];
    for _ in 0..probes {
        let base: [Complex; 3] = std::array::from_fn(|_| circle_nodes(1, (0.0, 0.0), 1.0, rng.gen(), prec).remove(0));
        for v in 0..3 {
            let mut n = 32usize;
            loop {
                let ts = circle_nodes(n, (0.0, 0.0), 1.0, rng.gen(), prec);
                let pts: Vec<[Complex; 3]> = ts
                    .iter()
                    .map(|t| {
                        let mut p = base.clone();
                        p[v] = t.clone();
                        p
                    })
                    .collect();
                let vals = bb.eval_line(&pts)?;
                let dv: Vec<Complex> = pts.iter().map(|p| den.eval(p)).collect();
                let axis = AxisInterpolator::new(ts)?;
                let mut deg = 0usize;
                for o in 0..bb.outputs() {
                    let col: Vec<Complex> = vals.iter().zip(&dv).map(|(r, d)| Complex::with_val(prec, &r[o] * d)).collect();
                    let c = axis.apply(&col);
                    let top = c.iter().map(log2_abs).fold(f64::NEG_INFINITY, f64::max);
                    if let Some(d) = c.iter().rposition(|x| log2_abs(x) > top - zero_bits) {
                        deg = deg.max(d);
                    }
                }
                if deg + 3 < n {
                    bounds[v] = bounds[v].max(deg as u32);
                    break;
                }
                if n >= 512 {
                    return Err(Error::Unstable(format!("numerator degree in variable {v} above {n}")));
                }
                n *= 2;
            }
        }
    }
    Ok(bounds)
}

fn to_integral(p: &TriPoly<Complex>, tol_bits: f64) -> Result<TriPoly<Rational>> {
    let r = exactify_poly(p, &Integer::from(1), tol_bits)?;
    debug_assert!(r.is_integral());
    Ok(r)
}

/// One build at a fixed precision.
fn build_at(
    p: u64,
    kind: InvariantKind,
    ctx: &PrecisionContext,
    strategy: &BuildStrategy,
    checkpoint: &Checkpoint,
) -> Result<BuildOutcome> {
    let t0 = Instant::now();
    let cosets = cosets_for(p, kind)?;
    let q = cosets.reps.len();
    let prec = ctx.working();
    let bb = ModPolyBox::with_progress(p, kind, &cosets, *ctx, checkpoint, strategy.progress_every);
    let progress = &bb.progress;
    let mut rng = ChaCha8Rng::seed_from_u64(strategy.seed);

    // (1) degrees of the probe: the highest non-trivial coefficient of Φ₁
    let probe = q - 1;
    progress.start("discovery", 0);
    let dcfg = DiscoveryConfig {
        start_nodes: 32,
        probes: strategy.probes.0,
        shifted_probes: strategy.probes.1,
        extra_probes: strategy.probes.2,
        seed: rng.gen(),
        outputs: Some(vec![probe]),
        ..Default::default()
    };
    let profile = discover_degrees(&bb, &dcfg)?[0];
    log::info!("probe coefficient {probe}: {profile:?}");

    // (2) its denominator, taken as the common one
    let rcfg = RatInterpConfig {
        seed: rng.gen(),
        den_only: true,
        ..Default::default()
    };
    let lines = (profile.den[1] + 1) * (profile.den[2] + 1);
    progress.start("denominator", lines as usize * (profile.num_total + profile.den_total + 2) as usize);
    let rat = interp_rat_tri(&bb, probe, &profile, &rcfg)?;
    let tol = ctx.n_bits as f64 / 2.0;
    let den = exactify_poly(&rat.den, &Integer::from(1u64 << 32), tol)?.make_primitive().0;
    log::info!(
        "denominator: {} terms, degrees {:?}, total {:?}",
        den.len(),
        den.degrees(),
        den.total_degree()
    );
    let den_c = den.to_complex(prec);

    // (3) how large the numerators c·D get in each variable
    progress.start("bounds", 0);
    let bounds = numerator_bounds(&bb, &den_c, &mut rng, strategy.bound_probes)?;
    log::info!("numerator degree bounds {bounds:?}");

    // (4) tensor grid of c·D, resampled when a node sits near D = 0
    let shape = bounds.map(|b| b as usize + 1);
    let (ti, values) = {
        let mut attempt = 0;
        loop {
            let nodes: [Vec<Complex>; 3] = std::array::from_fn(|v| circle_nodes(shape[v], (0.0, 0.0), 1.0, rng.gen(), prec));
            let ti = TensorInterpolator::new(nodes)?;
            // a node at relative height 2^-h costs about h bits in the
            // coefficient values, so allow an eighth of the working bits
            let closest = (0..shape[1])
                .flat_map(|j| (0..shape[2]).flat_map(move |k| (0..shape[0]).map(move |i| (i, j, k))))
                .map(|(i, j, k)| relative_den(&den_c, &ti.grid_point(i, j, k)))
                .fold(f64::INFINITY, f64::min);
            attempt += 1;
            if closest < -(ctx.n_bits as f64) / 8.0 {
                log::info!("grid node at relative denominator 2^{closest:.1}, resampling");
                if attempt > 3 {
                    return Err(Error::NearDenominator);
                }
                continue;
            }
            progress.start("grid", shape.iter().product());
            let lines: Vec<(usize, usize)> = (0..shape[1]).flat_map(|j| (0..shape[2]).map(move |k| (j, k))).collect();
            let res: Result<Vec<Vec<Vec<Complex>>>> = lines
                .par_iter()
                .map(|&(j, k)| {
                    let pts: Vec<[Complex; 3]> = (0..shape[0]).map(|i| ti.grid_point(i, j, k)).collect();
                    let vals = bb.eval_line(&pts)?;
                    Ok(vals
                        .into_iter()
                        .zip(&pts)
                        .map(|(row, pt)| {
                            let d = den_c.eval(pt);
                            row.into_iter().map(|v| Complex::with_val(prec, v * &d)).collect()
                        })
                        .collect())
                })
                .collect();
            match res {
                Ok(per_line) => {
                    // per_line[(j, k)][i][o] → values[o][(i·ny + j)·nz + k]
                    let outs = bb.outputs();
                    let mut values = vec![vec![Complex::new(prec); shape.iter().product()]; outs];
                    for (li, line) in per_line.into_iter().enumerate() {
                        let (j, k) = lines[li];
                        for (i, row) in line.into_iter().enumerate() {
                            for (o, v) in row.into_iter().enumerate() {
                                values[o][(i * shape[1] + j) * shape[2] + k] = v;
                            }
                        }
                    }
                    break (ti, values);
                }
                Err(Error::NearDenominator) if attempt <= 3 => {
                    log::info!("grid node rejected, resampling the grid");
                }
                Err(e) => return Err(e),
            }
        }
    };
    log::info!("grid complete, interpolating {} coefficients", values.len());
    let nums: Vec<TriPoly<Rational>> = values
        .par_iter()
        .map(|v| to_integral(&ti.interpolate(v, tol), tol))
        .collect::<Result<_>>()?;
    drop(values);

    // (5) exactness gate at held-out nodes
    for _ in 0..strategy.held_out {
        let pt: [Complex; 3] = std::array::from_fn(|_| circle_nodes(1, (0.0, 0.0), 1.0, rng.gen(), prec).remove(0));
        let Ok((vals, _)) = bb.eval_point(&pt, None) else {
            continue;
        };
        let d = den_c.eval(&pt);
        let scale = vals.iter().map(log2_abs).fold(0.0, f64::max);
        for (o, (n, v)) in nums.iter().zip(&vals).enumerate() {
            let got = Complex::with_val(prec, n.to_complex(prec).eval(&pt) / &d);
            let err = log2_abs(&Complex::with_val(prec, &got - v)) - scale;
            if !(err < -(ctx.n_bits as f64) / 4.0) {
                return Err(Error::Precision(format!(
                    "exactness gate: coefficient {o} off by 2^{err:.1} at a held-out node"
                )));
            }
        }
    }

    let mut set = ModularPolynomialSet {
        p,
        kind,
        phi1_num: BTreeMap::new(),
        psi2_num: BTreeMap::new(),
        psi3_num: BTreeMap::new(),
        denominator: den.clone(),
    };
    for (o, n) in nums.into_iter().enumerate() {
        if n.is_zero() {
            continue;
        }
        let (map, l) = match o / q {
            0 => (&mut set.phi1_num, o),
            1 => (&mut set.psi2_num, o - q),
            _ => (&mut set.psi3_num, o - 2 * q),
        };
        map.insert(l as u32, n);
    }
    set.phi1_num.insert(q as u32, den);
    let stats = BuildStats {
        precision_bits: ctx.n_bits,
        probe_output: probe,
        probe_profile: profile,
        numerator_bounds: bounds,
        evaluations: progress.done.load(Ordering::Relaxed),
        rejections: progress.rejected.load(Ordering::Relaxed),
        seconds: t0.elapsed().as_secs_f64(),
    };
    Ok(BuildOutcome { set, stats })
}

/// Interpolate Φ₁, Ψ₂, Ψ₃ for the b′ invariants: degrees and denominator
/// from one probe coefficient, then a tensor grid of every coefficient
/// times the denominator, exact integers, and a held-out check. Numerical
/// failures double the precision, at most `max_doublings` times.
pub fn build(
    p: u64,
    kind: InvariantKind,
    ctx: &PrecisionContext,
    strategy: &BuildStrategy,
    checkpoint: &Checkpoint,
) -> Result<BuildOutcome> {
    if kind != InvariantKind::ThetaQuotient {
        // Igusa and Streng coefficients carry per-coefficient powers of one
        // invariant in their denominators, which this pipeline does not model
        return Err(Error::Config(format!("builds are implemented for bprime only, not {}", kind.name())));
    }
    cosets_for(p, kind)?;
    let mut ctx = *ctx;
    for round in 0..=strategy.max_doublings {
        match build_at(p, kind, &ctx, strategy, checkpoint) {
            Ok(out) => return Ok(out),
            Err(
                e @ (Error::NoConvergent
                | Error::Precision(_)
                | Error::PrecisionLoss(_)
                | Error::IllConditioned(_)
                | Error::Degenerate(_)),
            ) => {
                if round == strategy.max_doublings {
                    return Err(Error::Precision(format!(
                        "giving up at {} bits after {round} doublings: {e}",
                        ctx.n_bits
                    )));
                }
                log::warn!("{e}; doubling precision to {} bits", 2 * ctx.n_bits);
                ctx = ctx.doubled();
            }
            Err(e) => return Err(e),
        }
    }
    unreachable!("loop returns")
}
