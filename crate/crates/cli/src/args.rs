use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lindblad_core::bench::{DEFAULT_REPS, DEFAULT_SEED, DEFAULT_WARMUP};
use lindblad_core::validate::DEFAULT_TOL;
use lindblad_core::KernelVariant;

#[derive(Debug, Parser)]
#[command(name = "lindblad-bench", version)]
#[command(about = "Lindblad propagation kernels: Roofline analysis, timings and validation")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,

    /// Write to this file instead of stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    /// Machine-profile file (defaults to the bundled i9-13980HX profile)
    #[arg(long, global = true)]
    pub machine_profile: Option<PathBuf>,

    /// Seed for every random input
    #[arg(long, default_value_t = DEFAULT_SEED, global = true)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Dump {
    Lindbladian,
    Propagator,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Working set, arithmetic intensity and cache placement per dimension
    Roofline {
        /// Comma-separated system dimensions
        #[arg(long, value_delimiter = ',', default_value = "3,9,27")]
        dims: Vec<usize>,
    },

    /// Time the propagation kernels over dims x variants
    Bench {
        /// Comma-separated system dimensions
        #[arg(long, value_delimiter = ',', default_value = "3,9,27")]
        dims: Vec<usize>,

        /// Comma-separated kernel variants
        #[arg(long, value_delimiter = ',', default_value = "aos,soa,simd")]
        variants: Vec<KernelVariant>,

        /// Timed steps per cell
        #[arg(long, default_value_t = DEFAULT_REPS)]
        reps: usize,

        /// Untimed steps before the timed block
        #[arg(long, default_value_t = DEFAULT_WARMUP)]
        warmup: usize,
    },

    /// Time a piecewise-constant pulse chain: per-segment expm vs stepping
    Grape {
        /// System dimension (3 uses the transmon preset unless --model is given)
        #[arg(long)]
        dim: Option<usize>,

        /// Piecewise-constant pulse segments
        #[arg(long, default_value_t = 100)]
        segments: usize,

        /// Propagator applications per segment
        #[arg(long, default_value_t = 20)]
        steps_per_segment: usize,

        /// Step size (defaults to 0.01 / ||L||_1 of the drift model)
        #[arg(long)]
        dt: Option<f64>,

        /// Model file (defaults to the transmon preset)
        #[arg(long)]
        model: Option<PathBuf>,

        /// Kernel used for the stepping
        #[arg(long, default_value = "soa")]
        variant: KernelVariant,
    },

    /// Evolve a model and check trace, Hermiticity and diagonal positivity
    Verify {
        /// Model file (defaults to the transmon preset)
        #[arg(long)]
        model: Option<PathBuf>,

        /// Propagator applications
        #[arg(long, default_value_t = 10_000)]
        steps: usize,

        /// Step size (defaults to 0.01 / ||L||_1)
        #[arg(long)]
        dt: Option<f64>,

        /// Kernel used for the stepping
        #[arg(long, default_value = "soa")]
        variant: KernelVariant,

        /// Tolerance for trace, Hermiticity and diagonal checks
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },

    /// Print a model's Lindbladian or propagator in interchange format
    Dump {
        /// Model file (defaults to the transmon preset)
        #[arg(long)]
        model: Option<PathBuf>,

        /// Matrix to print
        #[arg(long, value_enum, default_value_t = Dump::Lindbladian)]
        what: Dump,

        /// Step size for the propagator (defaults to 0.01 / ||L||_1)
        #[arg(long)]
        dt: Option<f64>,
    },
}
