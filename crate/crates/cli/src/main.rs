use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tropteich_cli::commands::{
    cmd_enumerate, cmd_export, cmd_space, cmd_tropicalize, cmd_verify, SeedSource, Suite, Which,
};
use tropteich_cli::{default_cache_dir, CliError, Config, Format, DEFAULT_SEED};

#[derive(Parser)]
#[command(name = "tropteich", version, about = "Stable graphs, markings and tropical moduli cone complexes")]
struct Cli {
    /// Directory for cached enumerations.
    #[arg(long, global = true, env = "TROPTEICH_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the stable graphs of a genus up to isomorphism.
    Enumerate {
        #[arg(long)]
        genus: usize,
    },
    /// Build M_g, a chart of T_g, or the curve-complex locus.
    Space {
        #[arg(long)]
        genus: usize,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
        /// JSON array of marking documents.
        #[arg(long, conflicts_with = "random_seeds")]
        seeds: Option<PathBuf>,
        /// Use this many random seeds instead.
        #[arg(long)]
        random_seeds: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// How many dimensions above the seeds to expand.
        #[arg(long, default_value_t = 0)]
        radius: usize,
    },
    /// Run a check suite and print a report.
    Verify {
        #[arg(long)]
        genus: usize,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        radius: usize,
        /// Also write the report to this file.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Tropicalize a stable model given as JSON.
    Tropicalize {
        #[arg(long)]
        model: PathBuf,
        /// Use the p-adic valuation for this prime.
        #[arg(long)]
        prime: Option<u64>,
        /// Locate the resulting point in M_g.
        #[arg(long)]
        locate: bool,
    },
    /// Export the contraction poset.
    Export {
        #[arg(long)]
        genus: usize,
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
}

fn config(cli: &Cli, genus: usize) -> Config {
    Config { cache_dir: cli.cache_dir.clone().unwrap_or_else(default_cache_dir), ..Config::new(genus) }
}

fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    match &cli.command {
        Command::Enumerate { genus } => Ok((cmd_enumerate(&config(cli, *genus))?, true)),
        Command::Space { genus, which, format, seeds, random_seeds, seed, radius } => {
            let cfg = Config { format: *format, seed: *seed, radius: *radius, ..config(cli, *genus) };
            let source = match (seeds, random_seeds) {
                (Some(p), _) => SeedSource::File(p.clone()),
                (None, Some(k)) => SeedSource::Random(*k),
                (None, None) => SeedSource::Default,
            };
            let out = cmd_space(&cfg, *which, &source)?;
            if let Some(v) = out.verdict {
                eprintln!("cone complex: {}", if v { "yes" } else { "no" });
            }
            Ok((out.text, true))
        }
        Command::Verify { genus, suite, samples, seed, radius, report } => {
            let cfg = Config { seed: *seed, radius: *radius, ..config(cli, *genus) };
            let (text, passed) = cmd_verify(&cfg, *suite, *samples)?;
            if let Some(path) = report {
                std::fs::write(path, &text).map_err(|e| CliError::io(path, e))?;
            }
            Ok((text, passed))
        }
        Command::Tropicalize { model, prime, locate } => Ok((cmd_tropicalize(model, *prime, *locate)?, true)),
        Command::Export { genus, format } => {
            Ok((cmd_export(&Config { format: *format, ..config(cli, *genus) })?, true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((text, passed)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| CliError::io(path, e)),
                None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::io("<stdout>", e)),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
