use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use mmrank::io;
use mmrank::lift::{lift, LiftOutcome};
use mmrank::morph::Selector;
use mmrank::pipeline::{parse_format_triple, parse_plan, run_pipeline};
use mmrank::scheme::{standard_scheme, AnyScheme, Ring, Slot};
use mmrank::search::{orchestrate_in, run_report, SearchConfig};
use mmrank::Gf2Scheme;

/// Environment variable naming the default run directory.
const RUN_DIR_ENV: &str = "MMRANK_RUN_DIR";

#[derive(Parser)]
#[command(
    name = "mmrank",
    about = "Matrix multiplication schemes: verify, search, morph, lift",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Brent equations; exit 0 iff the scheme is correct.
    Verify {
        /// Scheme file (canonical or published format).
        file: PathBuf,
    },
    /// Flip graph search for a lower-rank scheme.
    Search {
        /// Starting scheme file; must be over gf2.
        file: PathBuf,
        #[arg(long, default_value_t = 10_000_000)]
        steps: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop as soon as this rank is reached.
        #[arg(long)]
        target: Option<usize>,
        /// Run directory (default: $MMRANK_RUN_DIR if set).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000)]
        escape_after: u64,
        #[arg(long, default_value_t = 1_000_000)]
        restart_after: u64,
        #[arg(long, default_value_t = 3)]
        max_splits_above_best: u32,
        /// Wall-clock limit in seconds.
        #[arg(long)]
        time_limit: Option<u64>,
    },
    /// Transform a scheme: blockwise extension, restriction, symmetry.
    Morph {
        file: PathBuf,
        #[command(flatten)]
        op: MorphOp,
        /// Selector for --restrict: kept indices per axis, "0,1;0,1,2;0,2".
        #[arg(long)]
        selector: Option<String>,
        /// Output file (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Hensel-lift a gf2 scheme to integer coefficients.
    Lift {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        attempts: u32,
        #[arg(long, default_value_t = 32)]
        kmax: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Multiply two matrices with a scheme.
    Apply {
        file: PathBuf,
        x: PathBuf,
        y: PathBuf,
    },
    /// Run a multi-step plan file.
    Pipeline {
        plan: PathBuf,
        /// Artifact directory (default: $MMRANK_RUN_DIR or <plan>.out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank, addition counts and coefficient histogram of a scheme.
    Stats { file: PathBuf },
    /// Write the standard algorithm as a scheme file.
    Standard {
        n: usize,
        m: usize,
        p: usize,
        #[arg(long, default_value = "gf2")]
        ring: String,
        /// Output file (default: stdout).
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct MorphOp {
    /// Extend with a second scheme of format (n,m,q).
    #[arg(long)]
    extend: Option<PathBuf>,
    /// Restrict to format "n,m,p".
    #[arg(long)]
    restrict: Option<String>,
    /// Cyclic symmetry (n,m,p) -> (m,p,n).
    #[arg(long)]
    rotate: bool,
    /// Transpose symmetry (n,m,p) -> (p,m,n).
    #[arg(long)]
    transpose: bool,
    /// Rotate/transpose until n <= m <= p.
    #[arg(long)]
    canonical: bool,
    /// Reduce coefficients mod 2 (integer scheme -> gf2 scheme).
    #[arg(long)]
    mod2: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn load(path: &Path) -> anyhow::Result<AnyScheme> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    io::load_scheme_text(&text).with_context(|| format!("cannot load {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn summary_line(s: &AnyScheme) -> String {
    let f = s.format();
    format!("format {} {} {} {} rank {}", f.n, f.m, f.p, s.ring(), s.rank())
}

fn default_run_dir() -> Option<PathBuf> {
    std::env::var_os(RUN_DIR_ENV).map(PathBuf::from)
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.command {
        Command::Verify { file } => {
            let s = load(&file)?;
            println!("{}", summary_line(&s));
            if s.verify() {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("scheme does not satisfy the Brent equations");
                Ok(ExitCode::from(1))
            }
        }
        Command::Search {
            file,
            steps,
            workers,
            seed,
            target,
            out,
            escape_after,
            restart_after,
            max_splits_above_best,
            time_limit,
        } => {
            let s = load(&file)?;
            let Some(gf2) = s.as_gf2() else {
                bail!(
                    "search walks schemes over gf2; {} is over {}",
                    file.display(),
                    s.ring()
                );
            };
            let cfg = SearchConfig {
                max_steps: steps,
                escape_after,
                max_splits_above_best,
                restart_after,
                seed,
                workers,
                target_rank: target,
                time_limit_secs: time_limit,
            };
            let run_dir = out.or_else(default_run_dir);
            let state = orchestrate_in(gf2, &cfg, run_dir.as_deref())?;
            print!("{}", run_report(gf2, &state));
            if let Some(dir) = &run_dir {
                println!("artifacts in {}", dir.display());
            } else {
                println!("(no run directory; pass --out or set {RUN_DIR_ENV} to persist)");
            }
            match target {
                Some(t) if state.best_rank() > t => {
                    eprintln!("target rank {t} not reached (best {})", state.best_rank());
                    Ok(ExitCode::from(1))
                }
                _ => Ok(ExitCode::SUCCESS),
            }
        }
        Command::Morph {
            file,
            op,
            selector,
            out,
        } => {
            let s = load(&file)?;
            let result = if let Some(second) = &op.extend {
                s.extend(&load(second)?)?
            } else if let Some(target) = &op.restrict {
                let target = parse_format_triple(target)?;
                let sel = match &selector {
                    Some(text) => parse_selector_arg(text)?,
                    None => Selector::prefix(target),
                };
                s.restrict(target, &sel)?
            } else if op.rotate {
                s.rotate()
            } else if op.transpose {
                s.transpose()
            } else if op.canonical {
                s.canonical_format()
            } else if op.mod2 {
                s.reduce_mod2()
            } else {
                unreachable!("clap enforces one operation");
            };
            eprintln!("{}", summary_line(&result));
            emit(&io::serialize(&result), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Lift {
            file,
            attempts,
            kmax,
            seed,
            out,
        } => {
            let s = load(&file)?;
            let gf2: Gf2Scheme = match &s {
                AnyScheme::Gf2(g) => g.clone(),
                AnyScheme::Int(_) => bail!(
                    "lift starts from a gf2 scheme; {} is over {}",
                    file.display(),
                    s.ring()
                ),
            };
            let mut rng = mmrank::search::worker_rng(seed, 0);
            match lift(&gf2, attempts, kmax, &mut rng)? {
                LiftOutcome::Lifted(lifted) => {
                    eprintln!("{}", summary_line(&AnyScheme::Int(lifted.clone())));
                    emit(&io::serialize(&AnyScheme::Int(lifted)), out.as_deref())?;
                    Ok(ExitCode::SUCCESS)
                }
                LiftOutcome::Failed(report) => {
                    eprintln!("lift failed after {} attempts:", report.attempts.len());
                    for (i, a) in report.attempts.iter().enumerate() {
                        match a.obstructed_at {
                            Some(k) => eprintln!(
                                "  attempt {}: correct mod 2^{}, obstructed at 2^{k}",
                                i + 1,
                                a.max_k
                            ),
                            None => eprintln!(
                                "  attempt {}: reached mod 2^{} without integer readout",
                                i + 1,
                                a.max_k
                            ),
                        }
                    }
                    Ok(ExitCode::from(1))
                }
            }
        }
        Command::Apply { file, x, y } => {
            let s = load(&file)?;
            let read_mat = |p: &Path| -> anyhow::Result<mmrank::IntMatrix> {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("cannot read {}", p.display()))?;
                Ok(io::parse_matrix(&text)?)
            };
            let xm = read_mat(&x)?;
            let ym = read_mat(&y)?;
            let result = match &s {
                AnyScheme::Gf2(g) => {
                    let xg = io::int_to_gf2_matrix(&xm).context("X is not a 0/1 matrix")?;
                    let yg = io::int_to_gf2_matrix(&ym).context("Y is not a 0/1 matrix")?;
                    io::gf2_to_int_matrix(&g.apply(&xg, &yg)?)
                }
                AnyScheme::Int(int) => int.apply(&xm, &ym)?,
            };
            print!("{}", io::format_matrix(&result));
            Ok(ExitCode::SUCCESS)
        }
        Command::Pipeline { plan, out } => {
            let text = std::fs::read_to_string(&plan)
                .with_context(|| format!("cannot read {}", plan.display()))?;
            let parsed = parse_plan(&text)?;
            let plan_dir = plan
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."))
                .to_path_buf();
            let out_dir = out.or_else(default_run_dir).unwrap_or_else(|| {
                let stem = plan
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| "pipeline".into());
                PathBuf::from(format!("{stem}.out"))
            });
            let report = run_pipeline(&parsed, &plan_dir, &out_dir)?;
            print!("{report}");
            println!("artifacts in {}", out_dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Stats { file } => {
            let s = load(&file)?;
            println!("{}", summary_line(&s));
            let (adds, histogram) = scheme_stats(&s);
            println!(
                "additions: {} in A-forms, {} in B-forms, {} assembling C; total {}",
                adds.0,
                adds.1,
                adds.2,
                adds.0 + adds.1 + adds.2
            );
            let entries: Vec<String> = histogram
                .iter()
                .map(|(value, count)| format!("{value}: {count}"))
                .collect();
            println!("coefficients: {}", entries.join(", "));
            Ok(ExitCode::SUCCESS)
        }
        Command::Standard { n, m, p, ring, out } => {
            let format = mmrank::Format::new(n, m, p)?;
            let ring = Ring::parse(&ring)?;
            let s = standard_scheme(format, ring)?;
            emit(&io::serialize(&s), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_selector_arg(text: &str) -> anyhow::Result<Selector> {
    let axes: Vec<&str> = text.split(';').collect();
    if axes.len() != 3 {
        return Err(anyhow!("selector needs three ;-separated axis lists"));
    }
    let parse_axis = |t: &str| -> anyhow::Result<Vec<usize>> {
        t.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse().map_err(|_| anyhow!("bad selector index {x:?}")))
            .collect()
    };
    Ok(Selector {
        n_keep: parse_axis(axes[0])?,
        m_keep: parse_axis(axes[1])?,
        p_keep: parse_axis(axes[2])?,
    })
}

/// Naive addition counts of the bilinear algorithm (no common
/// subexpression sharing) and the coefficient histogram.
fn scheme_stats(s: &AnyScheme) -> ((usize, usize, usize), BTreeMap<i64, usize>) {
    let mut histogram: BTreeMap<i64, usize> = BTreeMap::new();
    let (mut nnz_a, mut nnz_b, mut nnz_c) = (0usize, 0usize, 0usize);
    let rank = s.rank();
    let f = s.format();
    let mut c_used = vec![false; f.p * f.n];
    let mut count = |m: &dyn Fn(usize, Slot, usize, usize) -> i64, rows: [(usize, usize); 3]| {
        for l in 0..rank {
            for (si, slot) in Slot::ALL.into_iter().enumerate() {
                for r in 0..rows[si].0 {
                    for c in 0..rows[si].1 {
                        let v = m(l, slot, r, c);
                        *histogram.entry(v).or_insert(0) += 1;
                        if v != 0 {
                            match slot {
                                Slot::A => nnz_a += 1,
                                Slot::B => nnz_b += 1,
                                Slot::C => {
                                    nnz_c += 1;
                                    c_used[r * rows[si].1 + c] = true;
                                }
                            }
                        }
                    }
                }
            }
        }
    };
    let dims = [(f.n, f.m), (f.m, f.p), (f.p, f.n)];
    match s {
        AnyScheme::Gf2(g) => count(
            &|l, slot, r, c| g.terms()[l].slot(slot).get(r, c) as i64,
            dims,
        ),
        AnyScheme::Int(i) => count(&|l, slot, r, c| i.terms()[l].slot(slot).get(r, c), dims),
    }
    let outputs = c_used.iter().filter(|&&u| u).count();
    (
        (
            nnz_a.saturating_sub(rank),
            nnz_b.saturating_sub(rank),
            nnz_c.saturating_sub(outputs),
        ),
        histogram,
    )
}
