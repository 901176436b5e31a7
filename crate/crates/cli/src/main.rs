//! `simbar`: dataset synthesis, barcodes, distance matrices, clustering and
//! full experiments from the command line.
//!
//! Exit status is 0 on success, 2 when the input was at fault and 1 on an
//! internal failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use simbar_core::experiment::SubsampleMethod;
use simbar_core::{BarcodeKind, Error, Method, Metric};

#[derive(Parser)]
#[command(name = "simbar", version, about = "Spectral barcode similarity toolkit")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores). Results do not
    /// depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the two- versus three-ellipse point clouds, labels and a manifest.
    Synth(SynthArgs),
    /// Compute one barcode file per input point cloud or signal.
    Barcode(BarcodeArgs),
    /// Pairwise distance matrix between barcode files.
    Distmat(DistmatArgs),
    /// Cluster a distance matrix and optionally score it against labels.
    Cluster(ClusterArgs),
    /// Run repeated clustering trials and report mean FMI.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
pub struct SynthArgs {
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 20)]
    pub per_class: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Apply a random conformal map to every cloud.
    #[arg(long)]
    pub transformed: bool,
    /// Also write the two synthetic instrument recordings as WAV files.
    #[arg(long)]
    pub instruments: bool,
}

#[derive(Args)]
pub struct BarcodeArgs {
    /// rips0, rips1 or sublevel0.
    #[arg(long)]
    pub kind: BarcodeKind,
    /// Output directory; each input `name.ext` becomes `name.bar`.
    #[arg(long)]
    pub out: PathBuf,
    /// Refuse rips1 on clouds larger than this.
    #[arg(long, default_value_t = 150)]
    pub h1_cap: usize,
    /// Drop the infinite H0 class instead of capping it at the diameter.
    #[arg(long)]
    pub drop_essential: bool,
    /// Point-cloud or signal files, or directories to scan.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Args)]
pub struct DistmatArgs {
    /// db, dW1, dW2, dS1 or dS2.
    #[arg(long)]
    pub metric: Metric,
    #[arg(long)]
    pub out: PathBuf,
    /// Compute pairs on one thread.
    #[arg(long)]
    pub serial: bool,
    /// Write wall-clock time of the computation as JSON here.
    #[arg(long)]
    pub timing: Option<PathBuf>,
    /// Barcode files, or directories of `.bar` files.
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
}

#[derive(Args)]
pub struct ClusterArgs {
    /// kmedoids, agglomerative or affinity.
    #[arg(long)]
    pub method: Method,
    /// Number of clusters (ignored by affinity propagation).
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    /// True labels, one per line, for an FMI score.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// Where to write predicted labels (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    pub matrix: PathBuf,
}

#[derive(Args)]
pub struct ExperimentArgs {
    /// JSON configuration; other flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// synthetic or waves.
    #[arg(long, default_value = "synthetic")]
    pub dataset: String,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Clouds per class (synthetic) or slices per recording (waves).
    #[arg(long)]
    pub per_class: Option<usize>,
    /// Points kept per cloud; 0 keeps every point.
    #[arg(long)]
    pub subsample: Option<usize>,
    #[arg(long)]
    pub subsample_method: Option<SubsampleMethod>,
    /// both, yes or no.
    #[arg(long)]
    pub transformed: Option<String>,
    /// Metrics to compare (repeatable or comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub metric: Vec<Metric>,
    /// Clustering methods (repeatable or comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub method: Vec<Method>,
    /// Recording for the waves dataset, as `path:start:end` with the slice
    /// window in seconds. Repeat once per class.
    #[arg(long)]
    pub wav: Vec<String>,
    #[arg(long)]
    pub h1_cap: Option<usize>,
    /// Compute distance-matrix pairs on one thread.
    #[arg(long)]
    pub serial: bool,
    /// Report JSON destination.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Timing JSON destination.
    #[arg(long)]
    pub timing: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot start {threads} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Synth(a) => commands::synth(&a),
        Command::Barcode(a) => commands::barcode(&a),
        Command::Distmat(a) => commands::distmat(&a),
        Command::Cluster(a) => commands::cluster(&a),
        Command::Experiment(a) => commands::experiment(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_input_error() {
        2
    } else {
        1
    }
}
