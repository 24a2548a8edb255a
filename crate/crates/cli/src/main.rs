//! Command-line surface for the ring-lattice toolkit: emit operator
//! matrices as JSON, run waveguide propagation traces as CSV, search for
//! self-imaging revivals, and execute the built-in verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 bad arguments, 3 I/O
//! failure. All configuration is passed through flags, and identical
//! invocations produce byte-identical output.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use phasering::linalg::{FieldState, Operator, ToleranceProfile};
use phasering::phase::{
    dft, log_shift_operator, lsg_shift_operator, number_operator, pb_phase_operator, HilbertDim,
};
use phasering::verify::{self, VerificationReport};
use phasering::waveguide::{
    intensity_trace, intensity_trace_parallel, revival_search, IntensityTrace, Method,
    PropagationPlan, RingLattice,
};

#[derive(Parser)]
#[command(
    name = "phasering",
    version,
    about = "Ring-lattice toolkit: operator matrices, waveguide propagation traces, \
             revival search, and a built-in verification suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit one of the named operator matrices as JSON
    Operator {
        /// Which operator to emit
        #[arg(value_enum)]
        name: OperatorName,
        /// Matrix dimension (number of levels), at least 1
        #[arg(long)]
        dim: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format; operator matrices support json only
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
    },
    /// Propagate a single-site excitation around the ring and write a CSV
    /// intensity trace
    Propagate {
        /// Number of waveguides in the ring, at least 2
        #[arg(long)]
        sites: usize,
        /// Nearest-neighbour coupling constant, positive
        #[arg(long)]
        gamma: f64,
        /// Index of the initially excited site
        #[arg(long, default_value_t = 0)]
        excite: usize,
        /// Final propagation distance; samples run from 0 to this value
        #[arg(long)]
        z_max: f64,
        /// Number of rows in the trace, at least 2
        #[arg(long)]
        samples: usize,
        /// Propagation method: spectral, bessel, folded, or ode
        #[arg(long, default_value = "spectral")]
        method: String,
        /// Compute analytic rows on multiple threads (same output bytes)
        #[arg(long)]
        parallel: bool,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for self-imaging revivals and print one line per find
    Revivals {
        /// Number of waveguides in the ring, at least 2
        #[arg(long)]
        sites: usize,
        /// Nearest-neighbour coupling constant, positive
        #[arg(long)]
        gamma: f64,
        /// Index of the initially excited site
        #[arg(long, default_value_t = 0)]
        excite: usize,
        /// Upper end of the search interval (0, z_max]
        #[arg(long)]
        z_max: f64,
        /// Report peaks with fidelity above 1 - tol
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run the full verification suite and report every check
    Selftest {
        /// Largest matrix dimension swept by the suite, at least 2
        #[arg(long, default_value_t = 16)]
        max_dim: usize,
        /// Seed for the randomized cross-method configurations
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OperatorName {
    /// Diagonal level-counting operator diag(0, 1, ..., dim-1)
    Number,
    /// Unitary discrete Fourier transform matrix
    Dft,
    /// Phase operator assembled from its spectral decomposition
    PbSpectral,
    /// Phase operator from the corrected closed-form entries
    PbClosed,
    /// Phase operator with the commonly printed off-diagonal prefactor,
    /// which is too large by exactly a factor of dim
    PbPaperLiteral,
    /// Unitary cyclic-shift operator
    Lsg,
    /// Logarithm of the cyclic shift on the branch with phases in [0, 2pi)
    LogLsg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

/// What went wrong, bucketed by exit code.
enum Failure {
    /// Exit 1: the verification suite found a broken invariant. The report
    /// itself has already been printed.
    Verification,
    /// Exit 2: arguments that name no valid computation.
    Usage(String),
    /// Exit 3: the computation succeeded but its output could not be
    /// written (or some other I/O fault).
    Io(String),
}

// Library errors reachable from the CLI all describe meaningless inputs
// (zero dimension, unknown method, excitation index out of range, ...),
// so they map to usage failures.
impl From<phasering::Error> for Failure {
    fn from(e: phasering::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Operator {
            name,
            dim,
            out,
            format,
        } => cmd_operator(name, dim, out, format),
        Command::Propagate {
            sites,
            gamma,
            excite,
            z_max,
            samples,
            method,
            parallel,
            out,
        } => cmd_propagate(sites, gamma, excite, z_max, samples, &method, parallel, out),
        Command::Revivals {
            sites,
            gamma,
            excite,
            z_max,
            tol,
        } => cmd_revivals(sites, gamma, excite, z_max, tol),
        Command::Selftest { max_dim, seed } => cmd_selftest(max_dim, seed),
    }
}

fn cmd_operator(
    name: OperatorName,
    dim: usize,
    out: Option<PathBuf>,
    format: OutputFormat,
) -> Result<(), Failure> {
    if format == OutputFormat::Csv {
        return Err(Failure::Usage(
            "csv is only available for propagation traces; operator matrices are json".into(),
        ));
    }
    let h = HilbertDim::from_dim(dim)?;
    let op = match name {
        OperatorName::Number => number_operator(h),
        OperatorName::Dft => dft(h),
        OperatorName::PbSpectral => pb_phase_operator(h).spectral,
        OperatorName::PbClosed => pb_phase_operator(h).closed_form,
        OperatorName::PbPaperLiteral => pb_phase_operator(h).paper_literal,
        OperatorName::Lsg => lsg_shift_operator(h),
        OperatorName::LogLsg => log_shift_operator(h),
    };
    let mut text =
        serde_json::to_string_pretty(&OperatorJson::from(&op)).expect("plain data serializes");
    text.push('\n');
    write_output(out.as_ref(), &text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_propagate(
    sites: usize,
    gamma: f64,
    excite: usize,
    z_max: f64,
    samples: usize,
    method: &str,
    parallel: bool,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let lat = RingLattice::new(sites, gamma)?;
    let e0 = FieldState::basis(sites, excite)?;
    let method = Method::from_str(method)?;
    let plan = PropagationPlan::new(z_max, samples, method)?;
    let trace = if parallel {
        intensity_trace_parallel(&lat, &e0, &plan)?
    } else {
        intensity_trace(&lat, &e0, &plan)?
    };
    write_output(out.as_ref(), &trace_csv(&trace))
}

fn cmd_revivals(
    sites: usize,
    gamma: f64,
    excite: usize,
    z_max: f64,
    tol: f64,
) -> Result<(), Failure> {
    let lat = RingLattice::new(sites, gamma)?;
    let e0 = FieldState::basis(sites, excite)?;
    let revivals = revival_search(&lat, &e0, z_max, tol)?;
    let mut text = String::new();
    for r in &revivals {
        let _ = writeln!(text, "z={:.6} fidelity={:.12}", r.z, r.fidelity);
    }
    let _ = writeln!(text, "count={}", revivals.len());
    write_output(None, &text)
}

fn cmd_selftest(max_dim: usize, seed: u64) -> Result<(), Failure> {
    let report = verify::run_all(max_dim, seed, &ToleranceProfile::default())?;
    write_output(None, &render_report(&report, max_dim, seed))?;
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

/// JSON operator schema: dimension plus separate real and imaginary grids,
/// so any JSON reader can consume it without complex-number literals.
#[derive(Serialize)]
struct OperatorJson {
    dim: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

impl From<&Operator> for OperatorJson {
    fn from(op: &Operator) -> Self {
        let d = op.dim();
        let mut re = vec![vec![0.0; d]; d];
        let mut im = vec![vec![0.0; d]; d];
        for r in 0..d {
            for c in 0..d {
                let entry = op.entry(r, c);
                re[r][c] = entry.re;
                im[r][c] = entry.im;
            }
        }
        OperatorJson { dim: d, re, im }
    }
}

/// CSV trace: header `z,site0,site1,...`, one row per sample, every value
/// printed with 17 significant digits so doubles round-trip losslessly.
fn trace_csv(trace: &IntensityTrace) -> String {
    let mut text = String::from("z");
    for j in 0..trace.sites() {
        let _ = write!(text, ",site{j}");
    }
    text.push('\n');
    for (z, row) in trace.z_values().iter().zip(trace.intensities()) {
        let _ = write!(text, "{z:.16e}");
        for v in row {
            let _ = write!(text, ",{v:.16e}");
        }
        text.push('\n');
    }
    text
}

fn render_report(report: &VerificationReport, max_dim: usize, seed: u64) -> String {
    let mut text = String::new();
    let _ = writeln!(
        text,
        "verification suite: dimensions up to {max_dim}, seed {seed}"
    );
    for suite in &report.suites {
        let _ = writeln!(
            text,
            "[{}] {}",
            if suite.passed() { "pass" } else { "FAIL" },
            suite.name
        );
        for check in &suite.checks {
            let _ = writeln!(
                text,
                "  [{}] {}: worst {:.3e} (bound {:.1e})",
                if check.passed { "pass" } else { "FAIL" },
                check.name,
                check.worst,
                check.bound
            );
            for line in &check.detail {
                let _ = writeln!(text, "      {line}");
            }
        }
    }
    let failed = report
        .suites
        .iter()
        .flat_map(|s| &s.checks)
        .filter(|c| !c.passed)
        .count();
    let _ = writeln!(
        text,
        "result: {} ({} checks, {} failed)",
        if report.passed() { "PASS" } else { "FAIL" },
        report.check_count(),
        failed
    );
    text
}

fn write_output(out: Option<&PathBuf>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
        }
        None => Ok(io::stdout().write_all(contents.as_bytes())?),
    }
}
