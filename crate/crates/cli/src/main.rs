use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dmtlab::Mode;

mod commands;

#[derive(Parser, Debug)]
#[command(name = "dmtlab", version, about = "Diversity-multiplexing tradeoff lab for lattice space-time codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tradeoff curves d*, d1 and d2 as CSV.
    Curves {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = dmtlab::dmt::DEFAULT_CURVE_STEP)]
        step: f64,
        /// Also write the anchor lists as JSON.
        #[arg(long)]
        anchors: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo outage probability and its SNR slope.
    Outage {
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Monte Carlo ML block error rate of a shaped lattice codebook.
    Error {
        /// Built-in name (hamilton, split) or a lattice JSON file.
        #[arg(long)]
        lattice: String,
        /// Codebook size used when r = 0.
        #[arg(long, default_value_t = 16)]
        codebook_size: usize,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Compares the closed-form exponent minimum with a grid search.
    #[command(name = "lemma2-verify")]
    Lemma2Verify {
        #[arg(long)]
        qmax: usize,
        #[arg(long)]
        lmax: usize,
        #[arg(long, default_value_t = 0.25)]
        sstep: f64,
        #[arg(long, default_value_t = 0.02)]
        gridstep: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Enumerates a lattice shell and checks the determinant condition.
    #[command(name = "lattice-audit")]
    LatticeAudit {
        #[arg(long)]
        lattice: String,
        #[arg(long)]
        radius: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Sanity checks on sampled Wishart eigenvalues.
    #[command(name = "wishart-check")]
    WishartCheck {
        #[arg(long)]
        mode: Mode,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        /// SNR in dB for the exponent transform.
        #[arg(long, default_value_t = 40.0)]
        snr_db: f64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Args, Debug)]
struct SimArgs {
    #[arg(long)]
    mode: Mode,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    m: usize,
    #[arg(long)]
    r: f64,
    /// Comma-separated SNR points in dB.
    #[arg(long, value_delimiter = ',', required = true)]
    snr_db: Vec<f64>,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Also write the slope summary as JSON.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    dmtlab::sim::configure_threads_from_env();
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dmtlab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
