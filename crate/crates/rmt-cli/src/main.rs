//! Command-line front end: experiment drivers, convergence tables,
//! structural-identity suites, Fredholm distributions, Monte Carlo
//! cross-checks, and static SVG plots.

mod commands;
mod output;
mod wparse;

use clap::{Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "rmt",
    about = "Finite-n correlation kernels for Laguerre-type ensembles and their \
             Bessel/Airy/sine universality checks",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute orthonormal-polynomial recurrence coefficients.
    Recurrence {
        /// Weight exponent alpha (>= 0).
        #[arg(long)]
        alpha: f64,
        /// External field, e.g. "x", "2x", "x^2+0.5x".
        #[arg(long = "V")]
        v: String,
        /// Highest degree.
        #[arg(long)]
        n_max: usize,
        /// CSV output path (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the table as JSON with decimal strings.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Equilibrium data: MRS numbers, density polynomial, edge constants.
    Equilibrium {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "V")]
        v: String,
        /// Comma list of matrix sizes.
        #[arg(long)]
        n: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the finite-rank correction system and dump its matrices.
    Widom {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "V")]
        v: String,
        /// Even matrix size.
        #[arg(long)]
        n: usize,
        /// Directory for the matrix CSVs and metadata JSON.
        #[arg(long = "dump-widom")]
        dump_dir: PathBuf,
    },
    /// Evaluate a scaled kernel (finite n vs its limit) on a lattice.
    Kernel {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "V")]
        v: String,
        #[arg(long)]
        n: usize,
        /// Symmetry class: 1, 2 or 4.
        #[arg(long)]
        beta: u8,
        /// Spectral regime: hard, soft or bulk.
        #[arg(long)]
        regime: String,
        /// Bulk reference point in (0, 1).
        #[arg(long, default_value_t = 0.5)]
        x_bulk: f64,
        /// Comma list of scaled coordinates.
        #[arg(long, default_value = "0.5,1,2,4,8", allow_hyphen_values = true)]
        lattice: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence table of scaled kernels toward their limits.
    Converge {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "V")]
        v: String,
        #[arg(long)]
        beta: u8,
        #[arg(long)]
        regime: String,
        /// Comma list of sizes, e.g. "16,32,64".
        #[arg(long)]
        n: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Optional log-log SVG of error vs n.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Gap probability over one interval.
    Gap {
        #[arg(long)]
        regime: String,
        #[arg(long)]
        beta: u8,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long = "V", default_value = "x")]
        v: String,
        /// Threshold (hard: right endpoint; soft: left endpoint).
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        s: f64,
        /// Bulk window half-width in spacing units.
        #[arg(long, default_value_t = 1.0)]
        xi: f64,
        #[arg(long, default_value_t = 0.5)]
        x_bulk: f64,
        /// Use the limiting kernel instead of a finite-n system.
        #[arg(long)]
        limit: bool,
        /// Finite matrix size (ignored with --limit).
        #[arg(long)]
        n: Option<usize>,
        /// Nystrom order.
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Smallest/largest eigenvalue distribution at several thresholds.
    ExtremeCdf {
        #[arg(long)]
        which: String,
        #[arg(long)]
        beta: u8,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long = "V", default_value = "x")]
        v: String,
        #[arg(long)]
        limit: bool,
        #[arg(long)]
        n: Option<usize>,
        /// Comma list of thresholds.
        #[arg(long, allow_hyphen_values = true)]
        s_list: String,
        #[arg(long, default_value_t = 40)]
        order: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Verify the n-independent matrix bounds (exit 2 on any failure).
    TmVerify {
        /// Range "1..32" or comma list.
        #[arg(long)]
        m: String,
        /// Oscillatory-integral sweep depth.
        #[arg(long, default_value_t = 200)]
        q_max: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare exact and leading-order evaluators per region.
    AsymptCompare {
        #[arg(long)]
        alpha: f64,
        #[arg(long = "V")]
        v: String,
        /// Comma list of even sizes.
        #[arg(long)]
        n: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Draw eigenvalues from the bidiagonal matrix model.
    Sample {
        #[arg(long)]
        beta: u8,
        #[arg(long)]
        n: usize,
        /// Laguerre exponent of the sampled density (> -1).
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// smallest | largest
        #[arg(long, default_value = "smallest")]
        which: String,
        /// Thresholds for an empirical CDF.
        #[arg(long, allow_hyphen_values = true)]
        thresholds: Option<String>,
        /// "lo,hi,bins" for a binned density instead.
        #[arg(long)]
        density: Option<String>,
        /// Dump raw extremes.
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match commands::run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
