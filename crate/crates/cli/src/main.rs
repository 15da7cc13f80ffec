//! `hybrep`: batch tools for hybrid-representation solid documents.
//!
//! Numeric output is JSON on standard out; logs and warnings go to standard
//! error. Exit codes: 0 success, 1 domain or validation failure, 2
//! environment or I/O failure. Every command is deterministic given its
//! inputs, configuration, and seed.

mod commands;
mod config;
mod util;

use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand};

use commands::sample::CloudFormat;
use commands::tessellate::MeshFormat;
use config::RunConfig;
use util::Failure;

#[derive(Parser)]
#[command(name = "hybrep", version, about = "Validate, mesh, sample, measure, and curate solid documents")]
struct Cli {
    /// JSON config file; HYBREP_CONFIG names the default path
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Worker threads for file-level parallelism (0 = one per core)
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Chord tolerance for validation and tessellation
    #[arg(long, global = true, value_name = "REAL")]
    tolerance: Option<f64>,

    /// Points sampled per solid
    #[arg(long, global = true, value_name = "N")]
    points: Option<usize>,

    /// Seed for every randomized draw
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Histogram resolution per axis for the JSD
    #[arg(long, global = true, value_name = "N")]
    grid: Option<usize>,

    /// Chamfer threshold below which a NURBS representation is kept
    #[arg(long, global = true, value_name = "REAL")]
    epsilon: Option<f64>,

    /// Simple/moderate/complex sampling ratios, e.g. 0.1,0.5,0.4
    #[arg(long, global = true, value_name = "R,R,R", value_parser = parse_ratios)]
    ratios: Option<(f64, f64, f64)>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check documents and report per-file violations plus an invalidity ratio
    Validate {
        /// Document files or directories of .json documents
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Mesh one document and write OBJ or binary STL
    Tessellate {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = MeshFormat::Obj)]
        format: MeshFormat,
        /// Output path (default: input with the format extension)
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Sample a normalized point cloud from one document
    Sample {
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = CloudFormat::Xyz)]
        format: CloudFormat,
        /// Output path (default: input with the format extension)
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Compare a directory of generated documents against references
    Metrics {
        /// Directory of generated documents
        generated: PathBuf,
        /// Directory of reference documents
        reference: PathBuf,
        /// Also write the report here
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Print the size/area/volume/through-hole record of one document
    Metadata { input: PathBuf },
    /// Score a document directory and sample a tiered subset
    Curate {
        /// Directory of .json documents
        dir: PathBuf,
        /// Number of parts to select
        #[arg(long, value_name = "N")]
        target: usize,
        /// Manifest path (default: standard out)
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
        /// Write per-feature min/max ranges here
        #[arg(long, value_name = "PATH")]
        stats: Option<PathBuf>,
    },
    /// Re-serialize one document canonically and report changed fields
    Roundtrip {
        input: PathBuf,
        /// Canonical document path (default: standard out)
        #[arg(long, value_name = "PATH")]
        output: Option<PathBuf>,
    },
}

fn parse_ratios(text: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = text.split([',', '/']).collect();
    if parts.len() != 3 {
        return Err("expected three numbers, e.g. 0.1,0.5,0.4".into());
    }
    let mut values = [0.0f64; 3];
    for (slot, part) in values.iter_mut().zip(&parts) {
        *slot = part.trim().parse().map_err(|e| format!("{}: {e}", part.trim()))?;
    }
    Ok((values[0], values[1], values[2]))
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => process::exit(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message());
            process::exit(failure.code());
        }
    }
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let mut config = RunConfig::load(cli.config.as_deref())?;
    if let Some(v) = cli.tolerance {
        config.chord_tolerance = v;
    }
    if let Some(v) = cli.points {
        config.n_points = v;
    }
    if let Some(v) = cli.seed {
        config.seed = v;
    }
    if let Some(v) = cli.grid {
        config.jsd_grid = v;
    }
    if let Some(v) = cli.epsilon {
        config.epsilon = v;
    }
    if let Some(v) = cli.ratios {
        config.ratios = v;
    }
    config.check()?;
    if let Some(jobs) = cli.jobs {
        // A second global-pool initialization (only possible in-process) is
        // harmless: the first one wins.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }

    match &cli.command {
        Command::Validate { inputs } => commands::validate::run(inputs, &config),
        Command::Tessellate { input, format, output } => {
            commands::tessellate::run(input, *format, output.as_deref(), &config)
        }
        Command::Sample { input, format, output } => {
            commands::sample::run(input, *format, output.as_deref(), &config)
        }
        Command::Metrics { generated, reference, output } => {
            commands::metrics::run(generated, reference, output.as_deref(), &config)
        }
        Command::Metadata { input } => commands::metadata::run(input, &config),
        Command::Curate { dir, target, output, stats } => {
            commands::curate::run(dir, *target, output.as_deref(), stats.as_deref(), &config)
        }
        Command::Roundtrip { input, output } => {
            commands::roundtrip::run(input, output.as_deref())
        }
    }
}
