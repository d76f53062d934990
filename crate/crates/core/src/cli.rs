//! The `egsp` command-line tool.
//!
//! Exit codes: 0 success, 2 usage error, 3 dependent input, 4 I/O or format
//! error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::coeffs::PackedCoefficients;
use crate::error::Error;
use crate::io::{self, IoError, Loaded, Report};
use crate::lab::{self, ExperimentConfig};
use crate::metrics::{compare, po, MetricsReport};
use crate::ortho::{Method, Tolerance};
use crate::prune::prune_reconstruct;
use crate::sets::ItemSet;

#[derive(Debug, Parser)]
#[command(
    name = "egsp",
    version,
    about = "Invertible Gram-Schmidt orthogonalization"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Orthogonalize a matrix or tensor, writing u and the packed coefficients.
    Ortho(OrthoArgs),
    /// Rebuild the original set from u and its coefficients.
    Inverse(InverseArgs),
    /// Forward then inverse; report MAE/MSE/PSNR against the input.
    Roundtrip(RoundtripArgs),
    /// Write the pairwise inner products of a set as plot data.
    Po(PoArgs),
    /// Reproduce the orthogonality and round-trip tables on random bases.
    Bench(BenchArgs),
    /// Lossy reconstruction from the first K orthogonal components.
    Compress(CompressArgs),
    /// Generate a uniform(0,1) random basis.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Gsp,
    Egsp,
    Mgs,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Gsp => Method::Gsp,
            MethodArg::Egsp => Method::Egsp,
            MethodArg::Mgs => Method::MgsStrict,
        }
    }
}

#[derive(Debug, Args)]
pub struct ForwardOpts {
    #[arg(long, value_enum, default_value = "egsp")]
    pub method: MethodArg,
    /// Relative dependence threshold.
    #[arg(long, default_value_t = Tolerance::DEFAULT_REL_DEP)]
    pub tol: f64,
}

impl ForwardOpts {
    fn method(&self) -> Method {
        self.method.into()
    }

    fn tolerance(&self) -> Result<Tolerance, CliError> {
        Tolerance::new(self.tol).map_err(CliError::from)
    }
}

#[derive(Debug, Args)]
pub struct OrthoArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub forward: ForwardOpts,
    #[arg(long)]
    pub output_u: PathBuf,
    #[arg(long)]
    pub output_r: PathBuf,
}

#[derive(Debug, Args)]
pub struct InverseArgs {
    /// Orthogonalized set (matrix or tensor).
    #[arg(long)]
    pub input: PathBuf,
    /// Packed coefficient file.
    #[arg(long)]
    pub input_r: PathBuf,
    #[arg(long, value_enum, default_value = "egsp")]
    pub method: MethodArg,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct RoundtripArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub forward: ForwardOpts,
    /// Report file.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct PoArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Plot file.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 20)]
    pub m: usize,
    #[arg(long, value_delimiter = ',', default_value = "5,10,15,20")]
    pub n_list: Vec<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[command(flatten)]
    pub forward: ForwardOpts,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct CompressArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Number of leading components to keep.
    #[arg(long)]
    pub keep: usize,
    #[command(flatten)]
    pub forward: ForwardOpts,
    /// Reconstructed set.
    #[arg(long)]
    pub output: PathBuf,
    /// Report file; defaults to the output path with `.report` appended.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Dependent(Error),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Invalid(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Dependent(_) => 3,
            CliError::Io(_) | CliError::Invalid(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DependentVector(_) | Error::DependentBlock(_) => CliError::Dependent(e),
            Error::KeepOutOfRange { .. } | Error::InvalidConfig(_) | Error::InvalidTolerance(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Invalid(e),
        }
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn forward(
    v: &Loaded,
    method: Method,
    tol: Tolerance,
) -> Result<(Loaded, PackedCoefficients), Error> {
    match v {
        Loaded::Matrix(s) => method.forward(s, tol).map(|(u, r)| (Loaded::Matrix(u), r)),
        Loaded::Tensor(s) => method.forward(s, tol).map(|(u, r)| (Loaded::Tensor(u), r)),
    }
}

fn inverse(u: &Loaded, r: &PackedCoefficients, method: Method) -> Result<Loaded, Error> {
    match u {
        Loaded::Matrix(s) => method.inverse(s, r).map(Loaded::Matrix),
        Loaded::Tensor(s) => method.inverse(s, r).map(Loaded::Tensor),
    }
}

fn prune(u: &Loaded, r: &PackedCoefficients, keep: usize) -> Result<Loaded, Error> {
    match u {
        Loaded::Matrix(s) => prune_reconstruct(s, r, keep).map(Loaded::Matrix),
        Loaded::Tensor(s) => prune_reconstruct(s, r, keep).map(Loaded::Tensor),
    }
}

fn shape_of(set: &Loaded) -> (usize, usize) {
    match set {
        Loaded::Matrix(v) => (v.item_len(), v.len()),
        Loaded::Tensor(v) => (v.item_len(), v.len()),
    }
}

fn max_po(set: &Loaded) -> f64 {
    match set {
        Loaded::Matrix(v) => po(v).max_abs(),
        Loaded::Tensor(v) => po(v).max_abs(),
    }
}

fn metrics_between(v: &Loaded, vhat: &Loaded) -> CliResult<MetricsReport> {
    match (v, vhat) {
        (Loaded::Matrix(a), Loaded::Matrix(b)) => Ok(compare(a, b)?),
        (Loaded::Tensor(a), Loaded::Tensor(b)) => Ok(compare(a, b)?),
        _ => Err(CliError::Invalid(Error::ShapeMismatch(
            "matrix compared with tensor".into(),
        ))),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult {
    match cli.command {
        Command::Ortho(a) => cmd_ortho(&a, out),
        Command::Inverse(a) => cmd_inverse(&a),
        Command::Roundtrip(a) => cmd_roundtrip(&a, out),
        Command::Po(a) => cmd_po(&a, out),
        Command::Bench(a) => cmd_bench(&a, out),
        Command::Compress(a) => cmd_compress(&a, out),
        Command::Gen(a) => cmd_gen(&a),
    }
}

fn say(out: &mut dyn Write, line: std::fmt::Arguments<'_>) {
    // stdout failures are not worth aborting a finished computation
    let _ = writeln!(out, "{line}");
}

pub fn cmd_ortho(a: &OrthoArgs, out: &mut dyn Write) -> CliResult {
    let tol = a.forward.tolerance()?;
    let method = a.forward.method();
    let v = io::read_set(&a.input)?;
    let (u, r) = forward(&v, method, tol)?;
    io::write_set(&u, &a.output_u)?;
    io::write_coeffs(&r, &a.output_r)?;
    say(
        out,
        format_args!(
            "method = {method}, n = {}, max|po| = {:e}",
            u.n_items(),
            max_po(&u)
        ),
    );
    Ok(())
}

pub fn cmd_inverse(a: &InverseArgs) -> CliResult {
    let u = io::read_set(&a.input)?;
    let r = io::read_coeffs(&a.input_r)?;
    let v = inverse(&u, &r, a.method.into())?;
    io::write_set(&v, &a.output)?;
    Ok(())
}

fn report_for(
    method: Method,
    seed: Option<u64>,
    v: &Loaded,
    u: &Loaded,
    vhat: &Loaded,
) -> CliResult<Report> {
    let (m, n) = shape_of(v);
    let metrics = metrics_between(v, vhat)?;
    Ok(Report {
        method,
        seed,
        m,
        n,
        max_po: max_po(u),
        mae: metrics.mae,
        mse: metrics.mse,
        psnr: metrics.psnr,
    })
}

fn print_report(out: &mut dyn Write, r: &Report) {
    say(
        out,
        format_args!(
            "method = {}, n = {}, max|po| = {:e}, mae = {:e}, mse = {:e}, psnr = {:.4} dB",
            r.method, r.n, r.max_po, r.mae, r.mse, r.psnr
        ),
    );
}

pub fn cmd_roundtrip(a: &RoundtripArgs, out: &mut dyn Write) -> CliResult {
    let tol = a.forward.tolerance()?;
    let method = a.forward.method();
    let v = io::read_set(&a.input)?;
    let (u, r) = forward(&v, method, tol)?;
    let vhat = inverse(&u, &r, method)?;
    let report = report_for(method, None, &v, &u, &vhat)?;
    io::write_report(&report, &a.output)?;
    print_report(out, &report);
    Ok(())
}

pub fn cmd_po(a: &PoArgs, out: &mut dyn Write) -> CliResult {
    let u = io::read_set(&a.input)?;
    let p = match &u {
        Loaded::Matrix(s) => po(s),
        Loaded::Tensor(s) => po(s),
    };
    io::write_plot(&p, &a.output)?;
    say(
        out,
        format_args!("pairs = {}, max|po| = {:e}", p.len(), p.max_abs()),
    );
    Ok(())
}

/// Report and plot file names for set size `n` inside a bench directory.
pub fn bench_file_names(n: usize) -> (String, String) {
    (format!("n{n:03}.report"), format!("n{n:03}_po.csv"))
}

pub fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> CliResult {
    let cfg = ExperimentConfig {
        m: a.m,
        n_list: a.n_list.clone(),
        seed: a.seed,
        method: a.forward.method(),
        trials: a.trials,
        tol: a.forward.tolerance()?,
    };
    cfg.validate()?;
    let table1 = lab::run_table1(&cfg)?;
    let table2 = lab::run_table2(&cfg)?;

    std::fs::create_dir_all(&a.out_dir).map_err(|source| IoError::Io {
        path: a.out_dir.clone(),
        source,
    })?;
    let mut summary = String::from("n,max_po,mae,mse,psnr\n");
    say(
        out,
        format_args!(
            "{:>4}  {:>12}  {:>12}  {:>12}  {:>10}",
            "N", "max|po|", "MAE", "MSE", "PSNR"
        ),
    );
    for (t1, row) in table1.iter().zip(&table2) {
        let metrics = row.metrics.expect("round-trip rows carry metrics");
        let report = Report {
            method: row.method,
            seed: Some(row.seed),
            m: row.m,
            n: row.n,
            max_po: row.max_po,
            mae: metrics.mae,
            mse: metrics.mse,
            psnr: metrics.psnr,
        };
        let (report_name, plot_name) = bench_file_names(row.n);
        io::write_report(&report, &a.out_dir.join(report_name))?;
        io::write_plot(&t1.po, &a.out_dir.join(plot_name))?;
        summary.push_str(&format!(
            "{},{},{},{},{}\n",
            row.n,
            io::fmt_real(row.max_po),
            io::fmt_real(metrics.mae),
            io::fmt_real(metrics.mse),
            io::fmt_real(metrics.psnr)
        ));
        say(
            out,
            format_args!(
                "{:>4}  {:>12.4e}  {:>12.4e}  {:>12.4e}  {:>10.4}",
                row.n, row.max_po, metrics.mae, metrics.mse, metrics.psnr
            ),
        );
    }
    io::write_atomic(&a.out_dir.join("summary.csv"), &summary)?;
    Ok(())
}

fn default_report_path(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".report");
    PathBuf::from(name)
}

pub fn cmd_compress(a: &CompressArgs, out: &mut dyn Write) -> CliResult {
    let tol = a.forward.tolerance()?;
    let method = a.forward.method();
    let v = io::read_set(&a.input)?;
    let (u, r) = forward(&v, method, tol)?;
    let vhat = prune(&u, &r, a.keep)?;
    let report = report_for(method, None, &v, &u, &vhat)?;
    io::write_set(&vhat, &a.output)?;
    let report_path = a
        .report
        .clone()
        .unwrap_or_else(|| default_report_path(&a.output));
    io::write_report(&report, &report_path)?;
    print_report(out, &report);
    Ok(())
}

pub fn cmd_gen(a: &GenArgs) -> CliResult {
    if a.m == 0 || a.n == 0 {
        return Err(CliError::Usage("--m and --n must be positive".into()));
    }
    let v = lab::random_basis(a.m, a.n, a.seed)?;
    io::write_matrix(&v, &a.output)?;
    Ok(())
}
