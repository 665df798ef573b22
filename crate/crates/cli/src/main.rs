//! `subcart`: run the constructions of `subcart-core` on a space, bundle or
//! distribution file and write a JSON report (plus a CSV point cloud for `embed`).

mod pipeline;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::pipeline::run;

#[derive(Parser, Debug)]
#[command(name = "subcart", version, about = "Covers, partitions of unity, embeddings and generators for subcartesian spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Validate,
    Cover,
    Partition,
    Embed,
    Generators,
    BundleGenerators,
    Report,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Validate => "validate",
            Kind::Cover => "cover",
            Kind::Partition => "partition",
            Kind::Embed => "embed",
            Kind::Generators => "generators",
            Kind::BundleGenerators => "bundle-generators",
            Kind::Report => "report",
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check samples, charts, cocycles and tangency.
    Validate(Opts),
    /// Triple cover, bounded-order refinement and finite atlas.
    Cover(Opts),
    /// Partition of unity and exhaustion function.
    Partition(Opts),
    /// Proper embedding into R^m with certificates and a point cloud.
    Embed(Opts),
    /// Global generators of a distribution or subbundle.
    Generators(Opts),
    /// Global generators, metric and injective trivialization of a bundle.
    BundleGenerators(Opts),
    /// Every stage that applies to the document.
    Report(Opts),
}

#[derive(Args, Debug, Clone)]
pub struct Opts {
    /// Space, bundle or distribution file (JSON).
    pub spec: PathBuf,
    /// Seed for every randomized stage.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Override the number of samples.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long = "tol-eq")]
    pub tol_eq: Option<f64>,
    #[arg(long = "tol-rank")]
    pub tol_rank: Option<f64>,
    /// Embedding dimension (default 2n+1).
    #[arg(long)]
    pub m: Option<usize>,
    /// Allowed deviation of the embedding from the exhaustion map.
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Number of sets in the compact exhaustion.
    #[arg(long, default_value_t = 4)]
    pub horizon: usize,
    #[arg(long = "out-dir", default_value = ".")]
    pub out_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage { 3 } else { 0 });
        }
    };
    let (kind, opts) = match cli.command {
        Command::Validate(o) => (Kind::Validate, o),
        Command::Cover(o) => (Kind::Cover, o),
        Command::Partition(o) => (Kind::Partition, o),
        Command::Embed(o) => (Kind::Embed, o),
        Command::Generators(o) => (Kind::Generators, o),
        Command::BundleGenerators(o) => (Kind::BundleGenerators, o),
        Command::Report(o) => (Kind::Report, o),
    };
    ExitCode::from(run(kind, &opts))
}
