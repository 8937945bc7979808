//! Command-line front end: rank distributions, solution counts,
//! verification suites and the built-in reference tables.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or unsupported
//! input. All counts print as exact decimal strings; factored forms use an
//! odd mantissa. Output is deterministic across runs and worker counts.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use persymm::counting::{odd_times_pow2, r_q, r_q_mixed};
use persymm::enumeration::{
    gamma_bruteforce, gamma_bruteforce_double, gamma_bruteforce_mixed, DEFAULT_BIT_BUDGET,
};
use persymm::formulas::{closed_gamma, gamma_mixed_from_doubles};
use persymm::recurrence::DEFAULT_DOUBLE_BIT_BUDGET;
use persymm::{
    Engine, Method, MixedShape, RankDistribution, ShapeClass, TripleShape,
};

mod tables;
mod verify;

#[derive(Parser)]
#[command(
    name = "persymm",
    about = "Exact rank distributions of stacked persymmetric matrices over GF(2)",
    version
)]
struct Cli {
    /// Worker threads (default: PERSYMM_WORKERS or all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the rank distribution of a triple shape
    Gamma(GammaArgs),
    /// Print the number of solutions of the q-summand bilinear system
    Count(CountArgs),
    /// Run a verification suite
    Verify(VerifyArgs),
    /// Print a built-in reference table
    Table(TableArgs),
}

#[derive(Args)]
struct GammaArgs {
    #[arg(long)]
    s: usize,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    l: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    /// Bit budget for enumeration (default: PERSYMM_MAX_BITS or 24)
    #[arg(long)]
    max_bits: Option<u32>,
}

#[derive(Args)]
struct CountArgs {
    #[arg(long)]
    q: usize,
    #[arg(long)]
    k: usize,
    /// Triple family block parameter; omit when --n is given
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 0)]
    l: usize,
    /// Number of unstructured rows: selects the mixed family
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    max_bits: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: SuiteArg,
    #[arg(long)]
    max_bits: Option<u32>,
    /// Alternative errata file to display alongside results
    #[arg(long)]
    errata: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    /// Table id; run with an unknown id to list all ids
    id: String,
    /// Width at which symbolic tables are sampled
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Closed,
    Recurrence,
    Brute,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Golden,
    Oracle,
    Identities,
    Recurrence,
    Expsum,
    Profiles,
}

#[derive(Serialize, Deserialize, PartialEq, Eq, Debug)]
struct ShapeRecord {
    s: usize,
    m: usize,
    l: usize,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
}

/// One distribution as emitted on stdout.
#[derive(Serialize, Deserialize, PartialEq, Eq, Debug)]
struct OutputRecord {
    shape: ShapeRecord,
    method: String,
    counts: Vec<String>,
    provenance: Vec<String>,
}

fn env_bits(flag: Option<u32>) -> u32 {
    flag.or_else(|| {
        std::env::var("PERSYMM_MAX_BITS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_BIT_BUDGET)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers.or_else(|| {
        std::env::var("PERSYMM_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(w) = workers {
        // the pool may already exist in tests; a failure here is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    match cli.command {
        Command::Gamma(args) => cmd_gamma(args),
        Command::Count(args) => cmd_count(args),
        Command::Verify(args) => verify::run(args.suite, env_bits(args.max_bits), args.errata),
        Command::Table(args) => tables::run(&args.id, args.k),
    }
}

fn cmd_gamma(args: GammaArgs) -> ExitCode {
    let bits = env_bits(args.max_bits);
    let shape = match TripleShape::new(args.s, args.m, args.l, args.k) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("invalid shape: {e}");
            return ExitCode::from(2);
        }
    };
    let built = build_distribution(&shape, args.method, bits);
    let (dist, provenance) = match built {
        Ok(v) => v,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(2);
        }
    };
    let record = OutputRecord {
        shape: ShapeRecord {
            s: args.s,
            m: args.m,
            l: args.l,
            k: args.k,
            n: None,
        },
        method: dist.method.tag().to_string(),
        counts: dist.counts.iter().map(|c| c.to_string()).collect(),
        provenance,
    };
    match args.format {
        FormatArg::Json => println!("{}", serde_json::to_string(&record).unwrap()),
        FormatArg::Tsv => {
            println!("rank\tcount");
            for (i, c) in record.counts.iter().enumerate() {
                println!("{i}\t{c}");
            }
        }
    }
    ExitCode::SUCCESS
}

fn build_distribution(
    shape: &TripleShape,
    method: MethodArg,
    bits: u32,
) -> Result<(RankDistribution, Vec<String>), String> {
    match method {
        MethodArg::Brute => {
            let d = gamma_bruteforce(shape, bits)
                .map_err(|e| format!("enumeration unsupported: {e}"))?;
            let prov = vec![format!(
                "enumeration over 2^{} coefficient tuples",
                shape.total_coeff_bits()
            )];
            Ok((d, prov))
        }
        MethodArg::Closed => {
            let mut counts = Vec::new();
            let mut prov: Vec<String> = Vec::new();
            for i in 0..=shape.max_rank() {
                match closed_gamma(shape.s(), shape.m(), shape.l(), shape.k(), i) {
                    Some(r) => {
                        counts.push(r.value);
                        let tag = format!("i={}: {} ({})", i, r.source, r.validity);
                        prov.push(tag);
                    }
                    None => {
                        return Err(format!(
                            "no closed form covers rank {i} of {}",
                            ShapeClass::Triple(*shape)
                        ))
                    }
                }
            }
            Ok((
                RankDistribution::new(ShapeClass::Triple(*shape), counts, Method::Closed),
                prov,
            ))
        }
        MethodArg::Recurrence => {
            let engine = Engine::with_budgets(bits, bits.max(DEFAULT_DOUBLE_BIT_BUDGET));
            let mut counts = Vec::new();
            for i in 0..=shape.max_rank() {
                counts.push(
                    engine
                        .gamma_recursive(shape, i)
                        .map_err(|e| format!("recurrence unsupported: {e}"))?,
                );
            }
            Ok((
                RankDistribution::new(ShapeClass::Triple(*shape), counts, Method::Recurrence),
                vec!["three-block recurrence with closed-form remainder".to_string()],
            ))
        }
        MethodArg::Auto => {
            let engine = Engine::with_budgets(bits, bits.max(DEFAULT_DOUBLE_BIT_BUDGET));
            let d = engine
                .distribution(shape)
                .map_err(|e| format!("all methods unsupported: {e}"))?;
            Ok((
                d,
                vec!["fallback ladder: closed forms, recurrence, enumeration".to_string()],
            ))
        }
    }
}

fn cmd_count(args: CountArgs) -> ExitCode {
    let bits = env_bits(args.max_bits);
    if args.q == 0 {
        eprintln!("q must be >= 1");
        return ExitCode::from(2);
    }
    match args.n {
        None => {
            let Some(s) = args.s else {
                eprintln!("either --s (triple family) or --n (mixed family) is required");
                return ExitCode::from(2);
            };
            let shape = match TripleShape::new(s, args.m, args.l, args.k) {
                Ok(sh) => sh,
                Err(e) => {
                    eprintln!("invalid shape: {e}");
                    return ExitCode::from(2);
                }
            };
            let engine = Engine::with_budgets(bits, bits.max(DEFAULT_DOUBLE_BIT_BUDGET));
            let dist = match engine.distribution(&shape) {
                Ok(d) => d,
                Err(e) => {
                    eprintln!("cannot assemble the distribution: {e}");
                    return ExitCode::from(2);
                }
            };
            match r_q(args.q, &shape, &dist) {
                Ok(v) => {
                    let (odd, e) = odd_times_pow2(&v.value);
                    println!("{}", v.value);
                    println!("= {odd}*2^{e}");
                    if v.extrapolated {
                        println!("# l > 0: prefactor extrapolated from the l = 0 identity");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("count failed: {e}");
                    ExitCode::from(1)
                }
            }
        }
        Some(n) => {
            let ms = match MixedShape::new(n, args.m, args.l, args.k) {
                Ok(ms) => ms,
                Err(e) => {
                    eprintln!("invalid shape: {e}");
                    return ExitCode::from(2);
                }
            };
            let dist = match mixed_distribution(&ms, bits) {
                Ok(d) => d,
                Err(msg) => {
                    eprintln!("{msg}");
                    return ExitCode::from(2);
                }
            };
            match r_q_mixed(args.q, &ms, &dist) {
                Ok(v) => {
                    let (odd, e) = odd_times_pow2(&v);
                    println!("{v}");
                    println!("= {odd}*2^{e}");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("count failed: {e}");
                    ExitCode::from(1)
                }
            }
        }
    }
}

/// Mixed distribution via the double-stack combination (cheap) with full
/// enumeration as the fallback.
fn mixed_distribution(ms: &MixedShape, bits: u32) -> Result<RankDistribution, String> {
    let double = gamma_bruteforce_double(
        1 + ms.m(),
        1 + ms.m() + ms.l(),
        ms.k(),
        bits.max(DEFAULT_DOUBLE_BIT_BUDGET),
    );
    if let Ok(dd) = double {
        let counts = (0..=ms.max_rank())
            .map(|i| gamma_mixed_from_doubles(ms, i, &dd))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("mixed combination failed: {e}"))?;
        return Ok(RankDistribution::new(
            ShapeClass::Mixed(*ms),
            counts,
            Method::Closed,
        ));
    }
    gamma_bruteforce_mixed(ms, bits).map_err(|e| {
        format!(
            "mixed family needs {} bits enumerated (budget {bits}): {e}",
            ms.total_coeff_bits()
        )
    })
}
