//! Plain-text file formats.
//!
//! Every real value is written as `{:.16e}` (17 significant digits), which
//! reads back to the identical double. Readers accept either commas or
//! whitespace between fields (decided by the first data line); writers emit
//! commas.
//!
//! * matrix: one matrix row per line, no header.
//! * tensor: `dims M B N`, then `N` blocks of `M` lines with `B` values,
//!   separated by a blank line.
//! * coefficients: `n_vectors N`, then `N(N-1)/2` values, one per line.
//! * report: `key = value` lines for [`Report`]'s fields.
//! * plot: `k,value` lines with `k` running from 1.
//!
//! Writes go to a temporary file in the target directory which is then
//! renamed over the destination.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::coeffs::{packed_len, PackedCoefficients};
use crate::metrics::PoVector;
use crate::ortho::Method;
use crate::sets::{BlockSet, ItemSet, VectorSet};

/// A malformed file. `line` and `column` are 1-based; `column` counts fields,
/// and is 0 when the problem concerns the line or file as a whole.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct FormatError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl FormatError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        FormatError {
            line,
            column,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
}

type ParseResult<T> = std::result::Result<T, FormatError>;
pub type IoResult<T> = std::result::Result<T, IoError>;

/// Renders a value so that parsing it returns the same bits.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_real(token: &str, line: usize, column: usize) -> ParseResult<f64> {
    token
        .trim()
        .parse::<f64>()
        .map_err(|_| FormatError::new(line, column, format!("`{}` is not a number", token.trim())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Delimiter {
    Comma,
    Whitespace,
}

impl Delimiter {
    fn detect(line: &str) -> Self {
        if line.contains(',') {
            Delimiter::Comma
        } else {
            Delimiter::Whitespace
        }
    }

    fn split<'a>(&self, line: &'a str) -> Vec<&'a str> {
        match self {
            Delimiter::Comma => line.split(',').collect(),
            Delimiter::Whitespace => line.split_whitespace().collect(),
        }
    }
}

/// Numbered non-blank lines; `None` marks a blank line.
fn numbered(text: &str) -> impl Iterator<Item = (usize, Option<&str>)> {
    text.lines().enumerate().map(|(i, l)| {
        let t = l.trim();
        (i + 1, if t.is_empty() { None } else { Some(t) })
    })
}

fn parse_fields(line: &str, line_no: usize, delim: Delimiter) -> ParseResult<Vec<f64>> {
    delim
        .split(line)
        .iter()
        .enumerate()
        .map(|(j, tok)| parse_real(tok, line_no, j + 1))
        .collect()
}

fn push_row(out: &mut String, values: impl Iterator<Item = f64>) {
    let mut first = true;
    for x in values {
        if !first {
            out.push(',');
        }
        first = false;
        out.push_str(&fmt_real(x));
    }
    out.push('\n');
}

pub fn render_matrix(v: &VectorSet) -> String {
    let mut out = String::new();
    for i in 0..v.dim() {
        push_row(&mut out, (0..v.n_vectors()).map(|n| v.get(i, n)));
    }
    out
}

pub fn parse_matrix(text: &str) -> ParseResult<VectorSet> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut delim = None;
    let mut last_line = 0;
    for (line_no, line) in numbered(text) {
        last_line = line_no;
        let Some(line) = line else { continue };
        let d = *delim.get_or_insert_with(|| Delimiter::detect(line));
        let fields = parse_fields(line, line_no, d)?;
        if let Some(first) = rows.first() {
            if fields.len() != first.len() {
                return Err(FormatError::new(
                    line_no,
                    0,
                    format!("expected {} fields, found {}", first.len(), fields.len()),
                ));
            }
        }
        rows.push(fields);
    }
    if rows.is_empty() {
        return Err(FormatError::new(
            last_line.max(1),
            0,
            "matrix file has no data",
        ));
    }
    VectorSet::from_rows(&rows).map_err(|e| FormatError::new(1, 0, e.to_string()))
}

pub fn render_tensor(v: &BlockSet) -> String {
    let (rows, cols, blocks) = v.dims();
    let mut out = format!("dims {rows} {cols} {blocks}\n");
    for n in 0..blocks {
        if n > 0 {
            out.push('\n');
        }
        for i in 0..rows {
            push_row(&mut out, (0..cols).map(|j| v.get(i, j, n)));
        }
    }
    out
}

fn parse_header<const K: usize>(line: &str, line_no: usize, key: &str) -> ParseResult<[usize; K]> {
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err(FormatError::new(
            line_no,
            1,
            format!("expected `{key}` header"),
        ));
    }
    let mut out = [0usize; K];
    for (j, slot) in out.iter_mut().enumerate() {
        let tok = parts.next().ok_or_else(|| {
            FormatError::new(line_no, j + 2, format!("`{key}` header needs {K} values"))
        })?;
        *slot = tok
            .parse()
            .map_err(|_| FormatError::new(line_no, j + 2, format!("`{tok}` is not a count")))?;
    }
    if parts.next().is_some() {
        return Err(FormatError::new(
            line_no,
            K + 2,
            format!("`{key}` header has extra fields"),
        ));
    }
    Ok(out)
}

/// True when the text starts with a tensor `dims` header.
pub fn looks_like_tensor(text: &str) -> bool {
    numbered(text)
        .find_map(|(_, l)| l)
        .is_some_and(|l| l.split_whitespace().next() == Some("dims"))
}

pub fn parse_tensor(text: &str) -> ParseResult<BlockSet> {
    let mut lines = numbered(text).skip_while(|(_, l)| l.is_none());
    let (header_no, header) = match lines.next() {
        Some((no, Some(l))) => (no, l),
        _ => return Err(FormatError::new(1, 0, "tensor file is empty")),
    };
    let [rows, cols, blocks] = parse_header::<3>(header, header_no, "dims")?;
    if rows == 0 || cols == 0 || blocks == 0 {
        return Err(FormatError::new(
            header_no,
            0,
            "tensor dims must be positive",
        ));
    }

    // group consecutive data lines into blocks
    let mut groups: Vec<Vec<(usize, &str)>> = Vec::new();
    let mut current = Vec::new();
    let mut last_line = header_no;
    for (line_no, line) in lines {
        last_line = line_no;
        match line {
            Some(l) => current.push((line_no, l)),
            None if !current.is_empty() => groups.push(std::mem::take(&mut current)),
            None => {}
        }
    }
    if !current.is_empty() {
        groups.push(current);
    }
    if groups.len() != blocks {
        return Err(FormatError::new(
            last_line,
            0,
            format!("dims declare {blocks} blocks, found {}", groups.len()),
        ));
    }

    let mut data = vec![0.0; rows * cols * blocks];
    let mut delim = None;
    for (n, group) in groups.iter().enumerate() {
        if group.len() != rows {
            return Err(FormatError::new(
                group[0].0,
                0,
                format!(
                    "block {} has {} rows, dims declare {rows}",
                    n + 1,
                    group.len()
                ),
            ));
        }
        for (i, &(line_no, line)) in group.iter().enumerate() {
            let d = *delim.get_or_insert_with(|| Delimiter::detect(line));
            let fields = parse_fields(line, line_no, d)?;
            if fields.len() != cols {
                return Err(FormatError::new(
                    line_no,
                    0,
                    format!("expected {cols} fields, found {}", fields.len()),
                ));
            }
            for (j, x) in fields.into_iter().enumerate() {
                data[(n * cols + j) * rows + i] = x;
            }
        }
    }
    BlockSet::from_raw(rows, cols, blocks, data)
        .map_err(|e| FormatError::new(header_no, 0, e.to_string()))
}

pub fn render_coeffs(r: &PackedCoefficients) -> String {
    let mut out = format!("n_vectors {}\n", r.n_vectors());
    for &x in r.as_slice() {
        out.push_str(&fmt_real(x));
        out.push('\n');
    }
    out
}

pub fn parse_coeffs(text: &str) -> ParseResult<PackedCoefficients> {
    let mut lines = numbered(text).filter_map(|(no, l)| l.map(|l| (no, l)));
    let (header_no, header) = lines
        .next()
        .ok_or_else(|| FormatError::new(1, 0, "coefficient file is empty"))?;
    let [n_vectors] = parse_header::<1>(header, header_no, "n_vectors")?;
    let mut values = Vec::with_capacity(packed_len(n_vectors));
    let mut last_line = header_no;
    for (line_no, line) in lines {
        last_line = line_no;
        values.push(parse_real(line, line_no, 1)?);
    }
    let expected = packed_len(n_vectors);
    if values.len() != expected {
        return Err(FormatError::new(
            last_line,
            0,
            format!(
                "n_vectors {n_vectors} needs {expected} coefficients, found {}",
                values.len()
            ),
        ));
    }
    PackedCoefficients::new(n_vectors, values)
        .map_err(|e| FormatError::new(header_no, 0, e.to_string()))
}

/// One experiment or round-trip summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub method: Method,
    /// `None` for user-supplied inputs.
    pub seed: Option<u64>,
    /// Entries per item (`M`, or `M·B` for blocks).
    pub m: usize,
    pub n: usize,
    pub max_po: f64,
    pub mae: f64,
    pub mse: f64,
    pub psnr: f64,
}

const REPORT_KEYS: [&str; 8] = ["method", "seed", "m", "n", "max_po", "mae", "mse", "psnr"];

pub fn render_report(report: &Report) -> String {
    let seed = report
        .seed
        .map_or_else(|| "none".to_string(), |s| s.to_string());
    let mut out = String::new();
    let _ = writeln!(out, "method = {}", report.method);
    let _ = writeln!(out, "seed = {seed}");
    let _ = writeln!(out, "m = {}", report.m);
    let _ = writeln!(out, "n = {}", report.n);
    let _ = writeln!(out, "max_po = {}", fmt_real(report.max_po));
    let _ = writeln!(out, "mae = {}", fmt_real(report.mae));
    let _ = writeln!(out, "mse = {}", fmt_real(report.mse));
    let _ = writeln!(out, "psnr = {}", fmt_real(report.psnr));
    out
}

pub fn parse_report(text: &str) -> ParseResult<Report> {
    let mut values: [Option<(usize, &str)>; 8] = [None; 8];
    let mut last_line = 1;
    for (line_no, line) in numbered(text) {
        last_line = line_no;
        let Some(line) = line else { continue };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| FormatError::new(line_no, 0, "expected `key = value`"))?;
        let key = key.trim();
        let slot = REPORT_KEYS
            .iter()
            .position(|&k| k == key)
            .ok_or_else(|| FormatError::new(line_no, 1, format!("unknown key `{key}`")))?;
        if values[slot].is_some() {
            return Err(FormatError::new(
                line_no,
                1,
                format!("duplicate key `{key}`"),
            ));
        }
        values[slot] = Some((line_no, value.trim()));
    }
    let mut get = |slot: usize| {
        values[slot].take().ok_or_else(|| {
            FormatError::new(last_line, 0, format!("missing key `{}`", REPORT_KEYS[slot]))
        })
    };
    let count = |(no, v): (usize, &str)| {
        v.parse::<usize>()
            .map_err(|_| FormatError::new(no, 2, format!("`{v}` is not a count")))
    };

    let (no, method) = get(0)?;
    let method = method
        .parse::<Method>()
        .map_err(|e| FormatError::new(no, 2, e))?;
    let (no, seed) = get(1)?;
    let seed = match seed {
        "none" => None,
        s => Some(
            s.parse::<u64>()
                .map_err(|_| FormatError::new(no, 2, format!("`{s}` is not a seed")))?,
        ),
    };
    let m = count(get(2)?)?;
    let n = count(get(3)?)?;
    let mut real = |slot: usize| get(slot).and_then(|(no, v)| parse_real(v, no, 2));
    Ok(Report {
        method,
        seed,
        m,
        n,
        max_po: real(4)?,
        mae: real(5)?,
        mse: real(6)?,
        psnr: real(7)?,
    })
}

pub fn render_plot(po: &PoVector) -> String {
    let mut out = String::new();
    for (k, &x) in po.as_slice().iter().enumerate() {
        let _ = writeln!(out, "{},{}", k + 1, fmt_real(x));
    }
    out
}

pub fn parse_plot(text: &str) -> ParseResult<PoVector> {
    let mut values = Vec::new();
    let mut delim = None;
    for (line_no, line) in numbered(text) {
        let Some(line) = line else { continue };
        let d = *delim.get_or_insert_with(|| Delimiter::detect(line));
        let fields = d.split(line);
        if fields.len() != 2 {
            return Err(FormatError::new(
                line_no,
                0,
                format!("expected 2 fields, found {}", fields.len()),
            ));
        }
        let k: usize = fields[0].trim().parse().map_err(|_| {
            FormatError::new(
                line_no,
                1,
                format!("`{}` is not an index", fields[0].trim()),
            )
        })?;
        if k != values.len() + 1 {
            return Err(FormatError::new(
                line_no,
                1,
                format!("expected index {}, found {k}", values.len() + 1),
            ));
        }
        values.push(parse_real(fields[1], line_no, 2)?);
    }
    Ok(PoVector::new(values))
}

fn read_text(path: &Path) -> IoResult<String> {
    std::fs::read_to_string(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_with<T>(path: &Path, parse: impl FnOnce(&str) -> ParseResult<T>) -> IoResult<T> {
    let text = read_text(path)?;
    parse(&text).map_err(|source| IoError::Format {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `contents` to a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> IoResult<()> {
    let io_err = |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> IoResult<VectorSet> {
    read_with(path, parse_matrix)
}

pub fn write_matrix(v: &VectorSet, path: &Path) -> IoResult<()> {
    write_atomic(path, &render_matrix(v))
}

pub fn read_tensor(path: &Path) -> IoResult<BlockSet> {
    read_with(path, parse_tensor)
}

pub fn write_tensor(v: &BlockSet, path: &Path) -> IoResult<()> {
    write_atomic(path, &render_tensor(v))
}

pub fn read_coeffs(path: &Path) -> IoResult<PackedCoefficients> {
    read_with(path, parse_coeffs)
}

pub fn write_coeffs(r: &PackedCoefficients, path: &Path) -> IoResult<()> {
    write_atomic(path, &render_coeffs(r))
}

pub fn read_report(path: &Path) -> IoResult<Report> {
    read_with(path, parse_report)
}

pub fn write_report(report: &Report, path: &Path) -> IoResult<()> {
    write_atomic(path, &render_report(report))
}

pub fn read_plot(path: &Path) -> IoResult<PoVector> {
    read_with(path, parse_plot)
}

pub fn write_plot(po: &PoVector, path: &Path) -> IoResult<()> {
    write_atomic(path, &render_plot(po))
}

/// A matrix or tensor file, told apart by the `dims` header.
#[derive(Debug, Clone, PartialEq)]
pub enum Loaded {
    Matrix(VectorSet),
    Tensor(BlockSet),
}

impl Loaded {
    pub fn n_items(&self) -> usize {
        match self {
            Loaded::Matrix(v) => v.len(),
            Loaded::Tensor(v) => v.len(),
        }
    }
}

pub fn read_set(path: &Path) -> IoResult<Loaded> {
    read_with(path, |text| {
        if looks_like_tensor(text) {
            parse_tensor(text).map(Loaded::Tensor)
        } else {
            parse_matrix(text).map(Loaded::Matrix)
        }
    })
}

pub fn write_set(set: &Loaded, path: &Path) -> IoResult<()> {
    match set {
        Loaded::Matrix(v) => write_matrix(v, path),
        Loaded::Tensor(v) => write_tensor(v, path),
    }
}
