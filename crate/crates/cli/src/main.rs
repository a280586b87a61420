use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;

use wpvol::asymptotics::{self, Which};
use wpvol::bracket::BracketEngine;
use wpvol::consistency;
use wpvol::exactnum::{parse_rational, render_decimal, PiLaurent, PiScalar};
use wpvol::geodesic::{self, CutDescription, WeightSpec};
use wpvol::par::Execution;
use wpvol::volume::volume_polynomial;

const CACHE_ENV: &str = "WPVOL_CACHE";

#[derive(Parser)]
#[command(name = "wpvol", version, about = "Weil-Petersson volumes and intersection brackets")]
struct Cli {
    /// Worker threads for the engine (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Also print floats, with this many significant digits.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "20", value_name = "DIGITS")]
    float: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum RatioWhich {
    #[value(name = "B")]
    B,
    #[value(name = "C")]
    C,
    #[value(name = "tau")]
    Tau,
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightKind {
    Indicator,
    Monomial,
    Reciprocal,
    Exp,
    Custom,
}

#[derive(Subcommand)]
enum Command {
    /// Exact bracket [tau_d1 ... tau_dn]_{g,n}.
    Bracket {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        /// Comma-separated indices; all zero when omitted.
        #[arg(long, value_delimiter = ',')]
        d: Option<Vec<u32>>,
    },
    /// Volume polynomial V_{g,n}, or its value at the given lengths.
    Volume {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        /// Comma-separated lengths (integers, fractions p/q or decimals).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<String>>,
    },
    /// Volume V_g of the closed genus-g moduli space.
    GenusVolume {
        #[arg(long)]
        g: u32,
    },
    /// Check the recursion identities and the oracle table.
    Verify {
        #[arg(long, default_value_t = 8)]
        max_weight: u32,
    },
    /// Ratio tables for B, C or tau flatness.
    Ratios {
        #[arg(long)]
        max_g: u32,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, value_enum)]
        which: RatioWhich,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Volumes against the Zograf prediction.
    Zograf {
        #[arg(long)]
        max_g: u32,
        #[arg(long, default_value_t = 0)]
        n: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Integral of f_gamma over moduli space for a cut description.
    Integrate {
        #[arg(long)]
        cut: PathBuf,
        #[arg(long, value_enum, default_value = "indicator")]
        weight: WeightKind,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        power: Option<u32>,
        /// Decay rate for the exponential weight.
        #[arg(long)]
        s: Option<f64>,
        /// JSON file with [[t, f(t)], ...] for the custom weight.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Boundary lengths of the ambient surface.
        #[arg(long, value_delimiter = ',')]
        lengths: Option<Vec<f64>>,
        /// Also run nested quadrature as a cross-check.
        #[arg(long)]
        check: bool,
    },
    /// Thin-part estimate and short-geodesic expectations.
    Systole {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long, default_value_t = geodesic::DEFAULT_EPS0)]
        eps0: f64,
    },
    /// Bounds on short separating geodesics.
    SepBound {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        length: f64,
        #[arg(long)]
        m: Option<u32>,
    },
    /// Save, load or inspect the bracket cache.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Subcommand)]
enum CacheAction {
    /// Fill the memo table up to a weight and write it out.
    Save {
        #[arg(long)]
        path: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_weight: u32,
    },
    /// Validate a cache file and report what it holds.
    Load {
        #[arg(long)]
        path: Option<PathBuf>,
    },
    Stats {
        #[arg(long)]
        path: Option<PathBuf>,
    },
}

/// Errors mapped to exit code 1 instead of 2.
#[derive(Debug)]
struct VerificationFailed;

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("verification failed")
    }
}

impl std::error::Error for VerificationFailed {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<VerificationFailed>() => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn engine_for(threads: Option<usize>) -> Result<BracketEngine> {
    let exec = match threads {
        Some(0) => bail!("--threads must be positive"),
        Some(1) => Execution::Sequential,
        _ => Execution::Parallel,
    };
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new().num_threads(t).build_global().context("configuring thread pool")?;
    }
    Ok(BracketEngine::with_execution(exec))
}

fn cache_path(p: Option<PathBuf>) -> Result<PathBuf> {
    p.or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
        .ok_or_else(|| anyhow!("no --path given and {CACHE_ENV} is unset"))
}

fn parse_length(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some(q) = parse_rational(s) {
        return Ok(q);
    }
    let (neg, body) = s.strip_prefix('-').map_or((false, s), |b| (true, b));
    let (int, frac) = body.split_once('.').ok_or_else(|| anyhow!("bad length {s:?}"))?;
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        bail!("bad length {s:?}");
    }
    let num: BigInt = format!("{int}{frac}").parse().map_err(|_| anyhow!("bad length {s:?}"))?;
    let q = BigRational::new(num, BigInt::from(10).pow(frac.len() as u32));
    Ok(if neg { -q } else { q })
}

fn print_exact(x: &PiScalar, float: Option<usize>) {
    println!("{x}");
    if let Some(d) = float {
        println!("{}", render_decimal(&PiLaurent::from(x.clone()), d));
    }
}

fn run(cli: Cli) -> Result<()> {
    let engine = engine_for(cli.threads)?;
    let float = cli.float;
    match cli.command {
        Command::Bracket { g, n, d } => {
            let d = d.unwrap_or_else(|| vec![0; n]);
            if d.len() != n {
                bail!("--d has {} entries but --n is {n}", d.len());
            }
            print_exact(&engine.bracket_of(g, &d)?, float);
        }
        Command::Volume { g, n, at } => {
            let v = volume_polynomial(&engine, g, n)?;
            match at {
                None => println!("{v}"),
                Some(raw) => {
                    let lengths: Vec<BigRational> = raw.iter().map(|s| parse_length(s)).collect::<Result<_>>()?;
                    let value = v.evaluate_exact(&lengths)?;
                    println!("{value}");
                    if let Some(d) = float {
                        println!("{}", render_decimal(&value, d));
                    }
                }
            }
        }
        Command::GenusVolume { g } => print_exact(&consistency::genus_volume(&engine, g)?, float),
        Command::Verify { max_weight } => verify(&engine, max_weight)?,
        Command::Ratios { max_g, n, which, format } => {
            let which = match which {
                RatioWhich::B => Which::B,
                RatioWhich::C => Which::C,
                RatioWhich::Tau => Which::Tau,
            };
            let report = asymptotics::ratio_table(&engine, which, max_g, n)?;
            match format {
                Format::Csv => print!("{}", report.to_csv()?),
                Format::Json => println!("{}", report.to_json()),
            }
        }
        Command::Zograf { max_g, n, format } => {
            let rows = asymptotics::zograf_table(&engine, max_g, n)?;
            match format {
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(std::io::stdout());
                    for r in &rows {
                        w.serialize(r)?;
                    }
                    w.flush()?;
                }
                Format::Json => println!("{}", serde_json::to_string_pretty(&rows)?),
            }
        }
        Command::Integrate { cut, weight, lambda, power, s, table, lengths, check } => {
            let text = std::fs::read_to_string(&cut).with_context(|| format!("reading {}", cut.display()))?;
            let cut = CutDescription::from_json(&text)?;
            let need_lambda = || lambda.ok_or_else(|| anyhow!("this weight needs --lambda"));
            let w = match weight {
                WeightKind::Indicator => WeightSpec::Indicator { lambda: need_lambda()? },
                WeightKind::Monomial => WeightSpec::Monomial {
                    power: power.ok_or_else(|| anyhow!("monomial weight needs --power"))?,
                    lambda: need_lambda()?,
                },
                WeightKind::Reciprocal => WeightSpec::Reciprocal { lambda: need_lambda()? },
                WeightKind::Exp => WeightSpec::ExpScaled { s: s.ok_or_else(|| anyhow!("exp weight needs --s"))? },
                WeightKind::Custom => {
                    let path = table.ok_or_else(|| anyhow!("custom weight needs --table"))?;
                    let points: Vec<(f64, f64)> = serde_json::from_str(&std::fs::read_to_string(&path)?)
                        .with_context(|| format!("parsing {}", path.display()))?;
                    WeightSpec::Custom { points }
                }
            };
            let ambient = cut.ambient()?;
            let lengths = lengths.unwrap_or_else(|| vec![0.0; ambient.1]);
            let r = geodesic::integrate_f_gamma(&engine, &cut, &w, ambient, &lengths)?;
            let mut out = r.to_json();
            if check {
                let q = geodesic::integrate_f_gamma_quadrature(&engine, &cut, &w, ambient, &lengths)?;
                out["quadrature"] = q.to_json();
            }
            println!("{}", serde_json::to_string_pretty(&out)?);
            if !r.converged {
                return Err(VerificationFailed.into());
            }
        }
        Command::Systole { g, eps, eps0 } => {
            let thin = geodesic::thin_part_estimate(&engine, g, eps, eps0)?;
            let count = geodesic::expected_count_nonsep(&engine, g, eps)?;
            let inv = geodesic::reciprocal_systole_integral(&engine, g)?;
            let out = serde_json::json!({
                "g": g,
                "eps": eps,
                "upper": thin.upper,
                "upper_over_eps2": thin.upper / (eps * eps),
                "lower_heuristic": thin.lower,
                "upper_times_vg": thin.upper_exact.to_string(),
                "expected_nonseparating": count.expectation,
                "reciprocal_systole_integral": inv,
            });
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::SepBound { g, length, m } => {
            let out = match m {
                None => serde_json::json!({ "g": g, "length": length, "bound": geodesic::prob_sep_bound(&engine, g, length)? }),
                Some(m) => {
                    let b = geodesic::multi_sep_bound(&engine, g, m, length)?;
                    serde_json::json!({ "g": g, "m": m, "length": length, "ln_raw": b.ln_raw, "raw": b.raw, "normalized": b.normalized })
                }
            };
            println!("{}", serde_json::to_string_pretty(&out)?);
        }
        Command::Cache { action } => match action {
            CacheAction::Save { path, max_weight } => {
                let path = cache_path(path)?;
                engine.bracket_range(max_weight);
                let n = engine.save_cache(&path)?;
                println!("saved {n} records to {}", path.display());
                println!("sha256 {}", engine.dump_sha256());
            }
            CacheAction::Load { path } => {
                let path = cache_path(path)?;
                let n = engine.load_cache(&path)?;
                println!("loaded {n} records from {}", path.display());
                println!("sha256 {}", engine.dump_sha256());
            }
            CacheAction::Stats { path } => {
                let path = cache_path(path)?;
                engine.load_cache(&path)?;
                println!("{}", serde_json::to_string_pretty(&engine.cache_stats())?);
            }
        },
    }
    Ok(())
}

fn verify(engine: &BracketEngine, max_weight: u32) -> Result<()> {
    let reports = [
        consistency::check_oracle(engine),
        consistency::sweep_recursion_ii(engine, max_weight),
        consistency::sweep_recursion_i(engine, max_weight),
        consistency::check_positivity_homogeneity(engine, max_weight),
        consistency::sweep_derivative_identity(engine, max_weight),
    ];
    for r in &reports {
        println!("{r}");
    }
    if reports.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(VerificationFailed.into())
    }
}
