//! Command-line front end for `planiso`.
//!
//! [`run`] takes the argument list and two output streams and returns the
//! process exit status, so the binary and the test suites share one entry point.
//! Output for a fixed seed does not depend on the thread count.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Exit status of a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status of `decide` when there is no occurrence.
pub const EXIT_NO: i32 = 1;
/// Exit status for parse, validation and I/O errors.
pub const EXIT_ERROR: i32 = 2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    JsonLines,
}

/// Parallel subgraph isomorphism and vertex connectivity for planar graphs.
///
/// Graph files start with a line `n m` followed by `m` lines `u v`.
#[derive(Debug, Parser)]
#[command(name = "planiso", version)]
pub struct Invocation {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Args)]
pub struct Common {
    /// Random seed; a fresh one is drawn and reported on stderr when absent.
    #[arg(long, global = true, env = "PLANISO_SEED")]
    pub seed: Option<u64>,
    /// Failure probability target n^-a for the randomized searches.
    #[arg(long, global = true, env = "PLANISO_CONFIDENCE", default_value_t = 2.0)]
    pub confidence: f64,
    /// Worker threads; never changes the output.
    #[arg(long, global = true, env = "PLANISO_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, env = "PLANISO_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Whether the pattern occurs in the target; prints a witness map.
    Decide {
        graph: PathBuf,
        pattern: PathBuf,
        /// Only accept occurrences whose removal separates two of these
        /// vertices (comma separated).
        #[arg(long, value_delimiter = ',')]
        terminals: Option<Vec<usize>>,
    },
    /// Every occurrence, one map per line.
    List { graph: PathBuf, pattern: PathBuf },
    /// Vertex connectivity and a minimum vertex cut.
    Connectivity { graph: PathBuf },
    /// One exponential-shift clustering.
    Cluster {
        graph: PathBuf,
        /// Mean of the exponential shifts.
        #[arg(long, default_value_t = 10.0)]
        beta: f64,
    },
    /// The pieces of one cover together with their decomposition widths.
    Cover {
        graph: PathBuf,
        /// Pattern size the cover is built for.
        #[arg(long)]
        k: usize,
        /// Pattern diameter the cover is built for.
        #[arg(long)]
        d: usize,
        /// Build the separating cover with these terminals (comma separated).
        #[arg(long, value_delimiter = ',')]
        terminals: Option<Vec<usize>>,
    },
    /// Exhaustive reference answers.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Writes a generated planar graph.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Destination file; stdout when absent.
        #[arg(long, short, global = true)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// All occurrences by backtracking.
    Iso { graph: PathBuf, pattern: PathBuf },
    /// Occurrences whose removal separates two terminals.
    Separating {
        graph: PathBuf,
        pattern: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        terminals: Vec<usize>,
    },
    /// Vertex connectivity by subset enumeration.
    Connectivity {
        graph: PathBuf,
        /// Largest graph the enumeration accepts.
        #[arg(long, default_value_t = 14)]
        max_n: usize,
    },
}

#[derive(Clone, Debug, Subcommand)]
pub enum Family {
    /// Delaunay triangulation of random points in the unit square.
    Delaunay { n: usize },
    /// Delaunay triangulation with every edge kept with probability `keep`.
    Planar {
        n: usize,
        #[arg(long, default_value_t = 0.7)]
        keep: f64,
    },
    /// The rows x cols grid.
    Grid { rows: usize, cols: usize },
}

/// Parses `args` (program name first) and executes the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let invocation = match Invocation::try_parse_from(args) {
        Ok(inv) => inv,
        Err(e) => {
            let shown = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return if shown.is_ok() && !e.use_stderr() { EXIT_OK } else { EXIT_ERROR };
        }
    };
    execute(&invocation, out, err)
}

/// Executes a parsed invocation.
pub fn execute(invocation: &Invocation, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match commands::dispatch(invocation, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_ERROR
        }
    }
}
