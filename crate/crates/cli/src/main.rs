mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use g2modpoly::interp::{discover_degrees, DiscoveryConfig};
use g2modpoly::invariants::{invariants_at, InvariantKind};
use g2modpoly::modpoly::{
    build, cosets_for, humbert_degree, verify, BuildStrategy, Checkpoint, ModPolyBox, ModularPolynomialSet, PolyId,
};
use g2modpoly::numerics::scalar::{fmt_complex, parse_complex};
use g2modpoly::numerics::PrecisionContext;
use g2modpoly::siegel::PeriodMatrix;
use g2modpoly::symplectic::{enumerate_cosets, GroupId};
use g2modpoly::{Error, Result};

use config::{exit_code, JobConfig};

#[derive(Parser, Debug)]
#[command(name = "g2modpoly", version, about = "Genus-2 modular polynomials")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "G2MODPOLY_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Interpolate Φ₁, Ψ₂, Ψ₃ and write them to a directory.
    Compute {
        #[arg(long, default_value = "bprime")]
        kind: String,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 400)]
        prec_bits: u32,
        #[arg(long, env = "G2MODPOLY_OUT")]
        out: PathBuf,
        /// Reuse node evaluations from an interrupted run.
        #[arg(long)]
        resume: bool,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        /// Fresh points used by the final verification.
        #[arg(long, default_value_t = 3)]
        trials: usize,
    },
    /// Check a stored set: residuals at fresh points and the structural identities.
    Verify {
        #[arg(long = "in", env = "G2MODPOLY_IN")]
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 400)]
        prec_bits: u32,
    },
    /// Print the three polynomials in X at given invariant values.
    Eval {
        #[arg(long = "in", env = "G2MODPOLY_IN")]
        input: PathBuf,
        /// Comma-separated invariant values, e.g. 0.5,0.25+1i,-2
        #[arg(long)]
        at: String,
        #[arg(long, default_value_t = 256)]
        prec_bits: u32,
        #[arg(long, default_value_t = 20)]
        digits: usize,
    },
    /// Per-coefficient degrees: exact ones from a stored set, otherwise
    /// probed numerically on random lines.
    Degrees {
        #[arg(long, default_value = "bprime")]
        kind: String,
        #[arg(long)]
        p: u64,
        #[arg(long = "in", env = "G2MODPOLY_IN")]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 256)]
        prec_bits: u32,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Degree data of the Humbert surface of discriminant p².
    Humbert {
        #[arg(long)]
        p: u64,
    },
    /// Number of cosets of Γ₀(p) in Sp₄(ℤ) (or in Γ(2,4) with --level24).
    Cosets {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        level24: bool,
    },
    /// Invariants of one period matrix given by τ₁, τ₂, τ₃.
    Invariants {
        #[arg(long, default_value = "bprime")]
        kind: String,
        #[arg(long)]
        tau: String,
        #[arg(long, default_value_t = 256)]
        prec_bits: u32,
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
}

fn ctx_for(bits: u32) -> Result<PrecisionContext> {
    if bits < config::MIN_PREC_BITS {
        return Err(Error::Config(format!("precision {bits} bits is below {}", config::MIN_PREC_BITS)));
    }
    PrecisionContext::with_bits(bits)
}

fn parse_triple(s: &str, prec: u32) -> Result<[rug::Complex; 3]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!("expected three comma-separated values, got {s:?}")));
    }
    let v: Vec<rug::Complex> = parts
        .iter()
        .map(|t| parse_complex(t, prec).ok_or_else(|| Error::Config(format!("cannot parse {t:?}"))))
        .collect::<Result<_>>()?;
    Ok([v[0].clone(), v[1].clone(), v[2].clone()])
}

fn read_set(path: &Path) -> Result<ModularPolynomialSet> {
    ModularPolynomialSet::read_path(path).map_err(|e| match e {
        Error::Io(m) => Error::Config(format!("{}: {m}", path.display())),
        e => e,
    })
}

fn run(cli: Cli) -> Result<u8> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::Config("thread count must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    match cli.cmd {
        Cmd::Humbert { p } => {
            let h = humbert_degree(p)?;
            println!("a={} component_degree={} H_degree={}", h.a_value, h.component_degree, h.h_degree);
        }
        Cmd::Cosets { p, level24 } => {
            if !g2modpoly::modpoly::is_prime(p) {
                return Err(Error::Config(format!("p = {p} is not prime")));
            }
            let group = if level24 { GroupId::G24 } else { GroupId::Full };
            println!("{}", enumerate_cosets(group, GroupId::Gamma0(p))?.reps.len());
        }
        Cmd::Invariants {
            kind,
            tau,
            prec_bits,
            digits,
        } => {
            let ctx = ctx_for(prec_bits)?;
            let kind = InvariantKind::parse(&kind).map_err(|e| Error::Config(e.to_string()))?;
            let [t1, t2, t3] = parse_triple(&tau, ctx.working())?;
            let om = PeriodMatrix::new(t1, t2, t3);
            if !om.is_in_h2() {
                return Err(Error::Config("imaginary part is not positive definite".into()));
            }
            let v = invariants_at(&om, kind, &ctx)?;
            for (i, z) in v.v.iter().enumerate() {
                println!("{}{} = {}", kind.name(), i + 1, fmt_complex(z, digits));
            }
        }
        Cmd::Compute {
            kind,
            p,
            prec_bits,
            out,
            resume,
            seed,
            trials,
        } => {
            let mut job = JobConfig::new("compute", &kind, p)?;
            job.prec_bits = prec_bits;
            job.threads = cli.threads;
            job.seed = seed;
            job.output = Some(out.clone());
            job.resume = resume;
            job.validate()?;
            let ctx = ctx_for(job.prec_bits)?;
            let ckpt = Checkpoint::open(&out.join("checkpoint.ckpt"), job.resume)?;
            let strategy = BuildStrategy {
                seed: job.seed,
                ..Default::default()
            };
            let outcome = build(job.p, job.kind, &ctx, &strategy, &ckpt)?;
            outcome.set.write_dir(&out)?;
            let s = &outcome.stats;
            println!(
                "summary kind={} p={} precision_bits={} evaluations={} rejections={} seconds={:.0} monomials={} den_terms={}",
                job.kind.name(),
                job.p,
                s.precision_bits,
                s.evaluations,
                s.rejections,
                s.seconds,
                outcome.set.monomial_count(),
                outcome.set.denominator.len()
            );
            ckpt.remove()?;
            let report = verify(&outcome.set, trials, &PrecisionContext::with_bits(s.precision_bits)?);
            print!("{report}");
            if !report.passed() {
                return Ok(1);
            }
        }
        Cmd::Verify {
            input,
            trials,
            prec_bits,
        } => {
            let set = read_set(&input)?;
            let report = verify(&set, trials, &ctx_for(prec_bits)?);
            print!("{report}");
            if !report.passed() {
                for c in report.failures() {
                    eprintln!("verification failed: {}", c.name);
                }
                return Ok(1);
            }
        }
        Cmd::Eval {
            input,
            at,
            prec_bits,
            digits,
        } => {
            let set = read_set(&input)?;
            let prec = ctx_for(prec_bits)?.working();
            let pt = parse_triple(&at, prec)?;
            let sp = set.specialize(&pt, prec)?;
            for (name, poly) in [("phi1", &sp.phi1), ("psi2", &sp.psi2), ("psi3", &sp.psi3)] {
                println!("{name}:");
                for (l, c) in poly.coeffs.iter().enumerate().rev() {
                    println!("  X^{l}: {}", fmt_complex(c, digits));
                }
            }
        }
        Cmd::Degrees {
            kind,
            p,
            input,
            prec_bits,
            seed,
        } => {
            let job = JobConfig::new("degrees", &kind, p)?;
            job.validate()?;
            match input {
                Some(path) => {
                    let set = read_set(&path)?;
                    println!("# exact numerator degrees (x, y, z) over the shared denominator");
                    println!("den {:?} total {:?}", set.denominator.degrees(), set.denominator.total_degree());
                    for id in [PolyId::Phi1, PolyId::Psi2, PolyId::Psi3] {
                        for (l, n) in set.numerators(id).expect("numerator") {
                            let d = n.degrees();
                            println!("{} {l} {} {} {}", id.name(), d[0], d[1], d[2]);
                        }
                    }
                }
                None => {
                    let ctx = ctx_for(prec_bits)?;
                    let cosets = cosets_for(job.p, job.kind)?;
                    let q = cosets.reps.len();
                    let ckpt = Checkpoint::memory();
                    let bb = ModPolyBox::new(job.p, job.kind, &cosets, ctx, &ckpt);
                    let cfg = DiscoveryConfig {
                        start_nodes: 32,
                        probes: 1,
                        shifted_probes: 0,
                        extra_probes: 0,
                        seed,
                        ..Default::default()
                    };
                    let prof = discover_degrees(&bb, &cfg)?;
                    println!("# numerical degrees of each reduced coefficient: num (x, y, z) / den (x, y, z)");
                    for (o, d) in prof.iter().enumerate() {
                        let name = ["phi1", "psi2", "psi3"][o / q];
                        println!(
                            "{name} {} {} {} {} / {} {} {}",
                            o % q,
                            d.num[0],
                            d.num[1],
                            d.num[2],
                            d.den[0],
                            d.den[1],
                            d.den[2]
                        );
                    }
                }
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
