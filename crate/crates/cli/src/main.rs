//! `spoofsearch`: verify, search for, generate, and catalog spoof perfect
//! factorizations, entirely in exact arithmetic.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use spoof_core::families::{catalog, even_two_base_family, expand_base, three_base_instance};
use spoof_core::padic::eulerian_check;
use spoof_core::search::{brute_force, Parity, SearchConfig};
use spoof_core::Factorization;
use spoofsearch::checkpoint;
use spoofsearch::json::{parse_input, CatalogEntryJson, FactorizationJson};
use spoofsearch::runner::{run, RunnerConfig};

/// Exit code for "input parsed but the factorization is not spoof perfect".
const EXIT_NOT_SPOOF: u8 = 1;
/// Exit code for unparseable or invalid input.
const EXIT_BAD_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "spoofsearch",
    about = "Exact-arithmetic toolkit for spoof perfect factorizations",
    long_about = "A factorization x1^a1 * ... * xk^ak of integers is spoof perfect when the \
                  formal sum-of-divisors product (1 + x1 + ... + x1^a1)...(1 + xk + ... + xk^ak) \
                  equals twice the product value. This tool verifies candidates, runs the \
                  bounded exhaustive search for odd primitive examples, applies the \
                  value-preserving rewrites, and prints the built-in catalogs."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a factorization is spoof perfect (exit 0 yes, 1 no).
    Verify(VerifyArgs),
    /// Enumerate all nontrivial, odd, primitive spoof perfect factorizations
    /// with at most k bases.
    Search(SearchArgs),
    /// Apply the base-expansion rewrite x^a -> x^{a+1} * (-(1+...+x^{a+1}))^1.
    Expand(ExpandArgs),
    /// Print the embedded catalog of known spoof perfect factorizations.
    Catalog(CatalogArgs),
    /// Instantiate a member of the parameterized spoof perfect families.
    Families(FamiliesArgs),
    /// Exhaustively enumerate small spoof perfect factorizations by brute
    /// force (independent of the bounded search).
    Oracle(OracleArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Factorization, e.g. "3^2 * 7^2 * 11^2 * 13^2 * 22021^1".
    input: String,
    /// Treat the input as the JSON form instead of the text grammar.
    #[arg(long)]
    json: bool,
    /// Print the full report (sigma values, triviality, primitivity,
    /// Eulerian structure).
    #[arg(long)]
    explain: bool,
}

#[derive(Args)]
struct SearchArgs {
    /// Maximum number of bases.
    #[arg(long)]
    k: Option<usize>,
    /// Worker thread count.
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Keep only primitive factorizations (default on).
    #[arg(long, overrides_with = "no_primitive", default_value_t = true)]
    primitive: bool,
    #[arg(long = "no-primitive", overrides_with = "primitive")]
    no_primitive: bool,
    /// Disable the q-adic valuation pruning filter (slower, same output).
    #[arg(long = "no-padic-prune")]
    no_padic_prune: bool,
    /// Write periodic checkpoints to this path.
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Resume from a checkpoint written by a compatible version.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Write the final sorted results as JSON lines to this path.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExpandArgs {
    /// Factorization to rewrite.
    input: String,
    /// Index of the factor to expand, in canonical order (0-based).
    #[arg(long)]
    index: usize,
    /// Treat the input as the JSON form.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CatalogArgs {
    /// Keep only entries whose label contains this pattern
    /// (e.g. "odd-primitive", "Descartes", "three-base-sporadic").
    #[arg(long)]
    filter: Option<String>,
    /// Print JSON lines instead of the human-readable table.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FamiliesArgs {
    /// Family id 1-9 (1-6 single-indexed, 7-9 doubly-indexed).
    #[arg(long)]
    id: u8,
    /// First index n >= 1.
    #[arg(long)]
    n: u64,
    /// Second index m (families 7-9 only).
    #[arg(long)]
    m: Option<u64>,
    /// Instantiate the even two-base family 2^a * (2^{a+1}-1)^1 instead
    /// (uses --n as a; --id is ignored).
    #[arg(long)]
    even_two_base: bool,
}

#[derive(Args)]
struct OracleArgs {
    /// Bases range over [-base-bound, base-bound] excluding 0 and -1.
    #[arg(long)]
    base_bound: u64,
    /// Exponents range over [1, exp-bound].
    #[arg(long)]
    exp_bound: u64,
    /// Maximum number of factors.
    #[arg(long)]
    k: usize,
    #[arg(long, value_enum, default_value_t = ParityArg::Any)]
    parity: ParityArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum ParityArg {
    Odd,
    Any,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => cmd_verify(args),
        Command::Search(args) => cmd_search(args),
        Command::Expand(args) => cmd_expand(args),
        Command::Catalog(args) => cmd_catalog(args),
        Command::Families(args) => cmd_families(args),
        Command::Oracle(args) => cmd_oracle(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {:#}", err);
            ExitCode::from(EXIT_BAD_INPUT)
        }
    }
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let f = parse_input(&args.input, args.json)?;
    let spoof = f.is_spoof_perfect();
    if args.explain {
        print_report(&f, spoof);
    } else {
        println!("{}: {}", f, if spoof { "spoof perfect" } else { "not spoof perfect" });
    }
    Ok(if spoof { 0 } else { EXIT_NOT_SPOOF })
}

fn print_report(f: &Factorization, spoof: bool) {
    println!("factorization: {}", f);
    match f.product_value() {
        Ok(n) => println!("n: {}", n),
        Err(_) => println!("n: undefined (infinite exponent)"),
    }
    match f.sigma_tilde() {
        Ok(s) => println!("sigma_tilde: {}", s),
        Err(_) => println!("sigma_tilde: undefined (infinite exponent)"),
    }
    match f.sigma_tilde_inv() {
        Ok(v) => println!("sigma_tilde_inv: {}", v),
        Err(e) => println!("sigma_tilde_inv: undefined ({})", e),
    }
    println!("trivial: {}", if f.is_trivial() { "yes" } else { "no" });
    println!("spoof perfect: {}", if spoof { "yes" } else { "no" });
    if spoof && !f.is_trivial() {
        match f.is_primitive() {
            Ok(p) => println!("primitive: {}", if p { "yes" } else { "no" }),
            Err(e) => println!("primitive: not computed ({})", e),
        }
    } else {
        println!("primitive: n/a");
    }
    match eulerian_check(f) {
        Ok(report) => println!("eulerian structure: {}", report),
        Err(e) => println!("eulerian structure: n/a ({})", e),
    }
}

fn cmd_search(args: SearchArgs) -> Result<u8> {
    let resume = match &args.resume {
        Some(path) => {
            Some(checkpoint::load(path).with_context(|| format!("loading {:?}", path))?)
        }
        None => None,
    };
    let require_primitive = if args.no_primitive { false } else { args.primitive };
    let (k, require_primitive) = match (&resume, args.k) {
        (Some(ck), Some(k)) if ck.max_bases != k => {
            bail!("checkpoint was written for k={}, not k={}", ck.max_bases, k)
        }
        (Some(ck), _) => (ck.max_bases, ck.require_primitive),
        (None, Some(k)) => (k, require_primitive),
        (None, None) => bail!("--k is required unless resuming"),
    };
    if k == 0 {
        bail!("--k must be >= 1");
    }
    let mut search = SearchConfig::new(k);
    search.require_primitive = require_primitive;
    search.use_padic_prune = !args.no_padic_prune;
    let mut config = RunnerConfig::new(search);
    config.workers = args.workers.max(1);
    config.checkpoint_path = args.checkpoint.clone();
    config.checkpoint_interval = checkpoint_interval();

    let stop = install_interrupt_flag();
    let stdout = std::io::stdout();
    let outcome = run(&config, resume, Some(stop), |f| {
        let mut lock = stdout.lock();
        let _ = writeln!(lock, "{}", f);
        let _ = lock.flush();
    })
    .map_err(|e| anyhow!("{}", e))?;

    if let Some(path) = &args.output {
        let mut lines = String::new();
        for f in &outcome.results {
            let json = serde_json::to_string(&FactorizationJson::from(f))?;
            lines.push_str(&json);
            lines.push('\n');
        }
        fs::write(path, lines).with_context(|| format!("writing {:?}", path))?;
    }
    if outcome.interrupted {
        eprintln!("interrupted; progress saved{}", match &args.checkpoint {
            Some(p) => format!(" to {:?}", p),
            None => " nowhere (no --checkpoint path)".to_string(),
        });
        return Ok(130);
    }
    Ok(0)
}

fn checkpoint_interval() -> Duration {
    std::env::var("SPOOFSEARCH_CHECKPOINT_SECS")
        .ok()
        .and_then(|v| v.parse::<u64>().ok())
        .map(Duration::from_secs)
        .unwrap_or(Duration::from_secs(60))
}

fn install_interrupt_flag() -> &'static AtomicBool {
    static FLAG: AtomicBool = AtomicBool::new(false);
    extern "C" fn on_signal(_: libc::c_int) {
        FLAG.store(true, Ordering::Relaxed);
    }
    unsafe {
        libc::signal(libc::SIGINT, on_signal as *const () as libc::sighandler_t);
        libc::signal(libc::SIGTERM, on_signal as *const () as libc::sighandler_t);
    }
    &FLAG
}

fn cmd_expand(args: ExpandArgs) -> Result<u8> {
    let f = parse_input(&args.input, args.json)?;
    let expanded = expand_base(&f, args.index).map_err(|e| anyhow!("{}", e))?;
    println!("{}", expanded);
    Ok(0)
}

fn cmd_catalog(args: CatalogArgs) -> Result<u8> {
    let entries = catalog(args.filter.as_deref());
    for entry in &entries {
        if args.json {
            println!("{}", serde_json::to_string(&CatalogEntryJson::from(entry))?);
        } else {
            println!("{}\t{}\t{}", entry.label, entry.provenance.as_str(), entry.factorization);
        }
    }
    Ok(0)
}

fn cmd_families(args: FamiliesArgs) -> Result<u8> {
    let f = if args.even_two_base {
        if args.n == 0 {
            bail!("--n must be >= 1");
        }
        even_two_base_family(args.n)
    } else {
        three_base_instance(args.id, args.n, args.m).map_err(|e| anyhow!("{}", e))?
    };
    println!("{}", f);
    Ok(0)
}

fn cmd_oracle(args: OracleArgs) -> Result<u8> {
    let parity = match args.parity {
        ParityArg::Odd => Parity::Odd,
        ParityArg::Any => Parity::Any,
    };
    let results =
        brute_force(args.base_bound, args.exp_bound, args.k, parity).map_err(|e| anyhow!("{}", e))?;
    for f in &results {
        println!("{}", f);
    }
    Ok(0)
}
