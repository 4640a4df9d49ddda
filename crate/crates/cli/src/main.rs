mod cache;
mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use realstrata::detector::Model;
use realstrata::lattices::{BinaryLattice, RootSpec};

use cache::Cache;
use commands::{DetectJob, RunSettings};

#[derive(Parser)]
#[command(
    name = "realstrata",
    version,
    about = "Real structures on ADE strata of polarized K3 surfaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args)]
struct GlobalArgs {
    /// Also write the result as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    json: Option<PathBuf>,
    /// Report cache; REALSTRATA_CACHE takes precedence.
    #[arg(long, global = true, value_name = "PATH")]
    cache_dir: Option<PathBuf>,
    /// Ignore cached reports and recompute.
    #[arg(long, global = true)]
    no_cache: bool,
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Re-check every result against the brute-force oracle.
    #[arg(long, global = true)]
    oracle: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the tagged discriminant form of S + <h>.
    Disc {
        #[arg(long, default_value = "quartic", conflicts_with = "h2")]
        model: Model,
        #[arg(long)]
        h2: Option<i64>,
        #[arg(long)]
        spec: RootSpec,
    },
    /// Search one stratum for a real structure.
    Detect {
        #[arg(long, default_value = "quartic")]
        model: Model,
        #[arg(long)]
        spec: RootSpec,
        /// Gram matrix [[a,b],[b,d]] of the transcendental lattice, needed at rank 19.
        #[arg(long, value_name = "a,b,d")]
        tgram: Option<BinaryLattice>,
    },
    /// Run `detect` on every line of a file.
    Batch {
        #[arg(long, default_value = "quartic")]
        model: Model,
        file: PathBuf,
    },
    /// Decide whether an even lattice of signature (s+, s-) with the given discriminant embeds
    /// primitively into the K3 lattice.
    Embed {
        #[arg(long)]
        sigma_plus: u32,
        #[arg(long)]
        sigma_minus: u32,
        /// Form JSON, or @path to a file holding it.
        #[arg(long)]
        form: String,
    },
    /// List the isometries of a positive definite binary lattice.
    Autos {
        #[arg(long, value_name = "a,b,d")]
        tgram: BinaryLattice,
    },
}

fn run(cli: Cli) -> Result<u8> {
    let g = &cli.global;
    let json = g.json.as_deref();
    let cache = Cache::resolve(g.cache_dir.as_deref());
    let settings = RunSettings {
        cache: &cache,
        use_cache: !g.no_cache,
        threads: g.threads,
        oracle: g.oracle,
    };
    match cli.command {
        Command::Disc { model, h2, spec } => {
            let h2 = h2.unwrap_or(model.h_square());
            if h2 < 2 || h2 % 2 != 0 {
                bail!("h2 must be even and at least 2, got {h2}");
            }
            commands::run_disc(&spec, h2, json)?;
            Ok(0)
        }
        Command::Detect { model, spec, tgram } => {
            let job = DetectJob {
                model,
                spec,
                t_gram: tgram,
            };
            let outcome = commands::detect_job(&job, &settings)?;
            commands::print_report(&outcome, &cache);
            if let Some(path) = json {
                std::fs::write(path, serde_json::to_string_pretty(&outcome.report)? + "\n")?;
            }
            Ok(outcome.report.exit_code() as u8)
        }
        Command::Batch { model, file } => {
            let summary = commands::run_batch(model, &file, &settings, json)?;
            Ok(u8::from(summary.unparseable > 0))
        }
        Command::Embed {
            sigma_plus,
            sigma_minus,
            form,
        } => {
            commands::run_embed(sigma_plus, sigma_minus, &form, json)?;
            Ok(0)
        }
        Command::Autos { tgram } => {
            commands::run_autos(&tgram, json)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
