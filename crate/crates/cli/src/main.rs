mod commands;
mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{count_kind, count_mode, Failure, Outcome};
use config::{Format, Overrides, RunConfig, SigChoice, CACHE_ENV};
use output::{render, Meta};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

/// Enumerate binary cubic forms, cubic orders and cubic fields by
/// discriminant, and check the identities relating them.
///
/// Discriminant bounds are strict everywhere: `--x X` means 0 < |Disc| < X
/// and `--disc lo..hi` means lo < Disc < hi.
#[derive(Debug, Parser)]
#[command(name = "cubic-census", version)]
struct Cli {
    /// Config file of `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (0 = one per core). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    #[arg(long, global = true, env = CACHE_ENV)]
    cache_dir: Option<PathBuf>,
    /// Declared precision in significant digits (at most 12).
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// positive, negative or both.
    #[arg(long, global = true, value_enum)]
    sig: Option<SigChoice>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the class inventory for lo < Disc < hi.
    Enumerate {
        /// Range `lo..hi`, both ends excluded.
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<String>,
        /// Comma-separated filter: all, maximal, ntr, pP:any|maximal|ntr|split=111|12|3|1^21|1^3.
        #[arg(long)]
        filter: Option<String>,
        /// Reuse and extend the inventory cached in the cache directory.
        #[arg(long)]
        resume: bool,
    },
    /// Raw and automorphism-weighted class counts with 0 < ±Disc < X.
    Count {
        #[arg(long)]
        x: Option<f64>,
        /// orders, fields or ntr; overrides --filter.
        #[arg(long, value_parser = parse_mode)]
        mode: Option<cubic_census::enumerate::CountMode>,
        #[arg(long)]
        filter: Option<String>,
    },
    /// Counts against one- and two-term predictions.
    Report {
        /// Comma-separated bounds.
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        /// forms or fields.
        #[arg(long, default_value = "fields", value_parser = parse_kind)]
        kind: cubic_census::asymptotics::CountKind,
    },
    /// Local densities at a prime. Sums over the cube-root basis print as
    /// `a|b|c` meaning a + b·p^(-1/3) + c·p^(-2/3).
    Densities {
        #[arg(long)]
        p: u64,
        /// Recompute every density by enumerating residue forms.
        #[arg(long)]
        brute_force: bool,
        #[arg(long)]
        level: Option<u32>,
    },
    /// Asymptotic constants and special-function identity residuals.
    Constants {
        /// Exit 1 unless every identity residual is below 1e-10.
        #[arg(long)]
        check: bool,
    },
    /// Three-torsion statistics of quadratic class groups.
    Classgroup {
        #[arg(long)]
        x: Option<u64>,
        /// Compare the 3-torsion sum with the cubic count.
        #[arg(long)]
        check_identity: bool,
        /// Emit D,h,h3star for every fundamental discriminant instead.
        #[arg(long)]
        table: bool,
    },
    /// Run the identity suite.
    Verify {
        /// Include the larger bounds (slower).
        #[arg(long)]
        full: bool,
    },
}

fn parse_mode(s: &str) -> Result<cubic_census::enumerate::CountMode, String> {
    count_mode(s).ok_or_else(|| format!("unknown mode {s:?}; expected orders, fields or ntr"))
}

fn parse_kind(s: &str) -> Result<cubic_census::asymptotics::CountKind, String> {
    count_kind(s).ok_or_else(|| format!("unknown kind {s:?}; expected forms or fields"))
}

fn run(cli: &Cli, cfg: &RunConfig) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Enumerate { disc, filter, resume } => {
            commands::enumerate(disc.as_deref(), filter.as_deref(), *resume, cfg)
        }
        Command::Count { x, mode, filter } => commands::count(*x, *mode, filter.as_deref(), cfg),
        Command::Report { x, kind } => commands::report(x, *kind, cfg),
        Command::Densities { p, brute_force, level } => commands::densities(*p, *brute_force, *level),
        Command::Constants { check } => commands::constants_cmd(*check),
        Command::Classgroup { x, check_identity, table } => commands::classgroup(*x, *check_identity, *table, cfg),
        Command::Verify { full } => commands::verify(*full),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Enumerate { .. } => "enumerate",
        Command::Count { .. } => "count",
        Command::Report { .. } => "report",
        Command::Densities { .. } => "densities",
        Command::Constants { .. } => "constants",
        Command::Classgroup { .. } => "classgroup",
        Command::Verify { .. } => "verify",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = Overrides {
        max_disc: None,
        signature: cli.sig,
        filter: None,
        threads: cli.threads,
        cache_dir: cli.cache_dir.clone(),
        precision: cli.precision,
        format: if cli.json { Some(Format::Json) } else { cli.format },
    };
    let cfg = match RunConfig::load(cli.config.as_deref(), flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    if cfg.threads > 0 {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build_global();
    }
    let outcome = match run(&cli, &cfg) {
        Ok(o) => o,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(Failure::Resource(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(EXIT_RESOURCE);
        }
    };
    let name = command_name(&cli.command);
    let meta = Meta {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config_hash: cfg.hash(&format!("{:?}", cli.command)),
        command: name.to_string(),
        range: outcome.range.replace(' ', "_"),
    };
    let mut buf = Vec::new();
    render(&meta, &outcome.table, cfg.format, outcome.delimiter, &mut buf).expect("writing to memory");
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &buf),
        None => std::io::stdout().lock().write_all(&buf),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_RESOURCE);
    }
    if !outcome.violations.is_empty() {
        for v in &outcome.violations {
            eprintln!("identity violation: {v}");
        }
        return ExitCode::from(EXIT_VIOLATION);
    }
    ExitCode::SUCCESS
}
