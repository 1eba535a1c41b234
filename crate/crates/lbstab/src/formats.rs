//! On-disk formats: matrix CSV, operator and certificate text files, field
//! snapshots (CSV and binary), and the report CSVs.
//!
//! Every format is deterministic — the same data always serializes to the
//! same bytes. Floating-point values are written with Rust's shortest
//! round-trip decimal formatting, so write→parse reproduces each bit
//! pattern exactly. Every parser is total: malformed input of any shape
//! returns an error, never panics, and allocation is bounded by the input
//! size plus fixed caps.
//!
//! ## Operator / certificate text layout
//!
//! Line-oriented, space-separated. A type line, `key value` header lines
//! (n, gamma, beta, tau, rho0, u0, cs2, velocity-set), then one or more
//! `matrix <name> <rows> <cols>` sections followed by row-major decimal
//! rows. The operator file carries the modified moment matrix and the
//! reduced equilibrium map — together with τ they reproduce the operator
//! exactly. The certificate file carries the weight vector and the two
//! residuals.
//!
//! ## Snapshot binary layout (documented, little-endian)
//!
//! | bytes  | content                                   |
//! |--------|-------------------------------------------|
//! | 0..4   | magic `LBF1`                              |
//! | 4..8   | u32: number of discrete velocities n      |
//! | 8..20  | u32 ×3: grid dims (nx, ny, nz)            |
//! | 20..   | f64 ×(n·nx·ny·nz): densities, index order |
//! |        | velocity-major, then z, y, x-fastest      |

use crate::analysis::{ConvergenceReport, DomainMap};
use crate::equilibrium::BackgroundState;
use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::simulator::{macroscopic_fields, LatticeField, Monitors};
use crate::stability::{CollisionOperator, StabilityCertificate};

/// Largest matrix entry count a parser will allocate (guards against
/// header-claimed sizes far beyond any real file).
const MAX_MATRIX_ENTRIES: usize = 16_000_000;

const SNAPSHOT_MAGIC: &[u8; 4] = b"LBF1";

fn fmt_f64(v: f64) -> String {
    // Shortest decimal that parses back to the same bits.
    format!("{v}")
}

// ---------------------------------------------------------------------------
// Matrix CSV
// ---------------------------------------------------------------------------

/// Integer matrix as CSV: one row per line, comma-separated entries.
pub fn write_integer_matrix_csv(rows: &[Vec<i64>]) -> String {
    let mut out = String::new();
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses an integer-matrix CSV: non-empty, rectangular, every cell a
/// (possibly signed) 64-bit integer. Blank lines are ignored.
pub fn parse_integer_matrix_csv(text: &str) -> Result<Vec<Vec<i64>>> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            let v: i64 = cell.trim().parse().map_err(|_| {
                Error::Parse(format!("line {}: bad integer {cell:?}", lineno + 1))
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, got {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix".into()));
    }
    Ok(rows)
}

/// Real matrix as CSV with exact round-trip decimals.
pub fn write_matrix_csv(m: &Mat) -> String {
    let mut out = String::new();
    for r in 0..m.rows() {
        let cells: Vec<String> = m.row(r).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Parses a real-matrix CSV: non-empty, rectangular, every cell an f64.
pub fn parse_matrix_csv(text: &str) -> Result<Mat> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            let v: f64 = cell.trim().parse().map_err(|_| {
                Error::Parse(format!("line {}: bad number {cell:?}", lineno + 1))
            })?;
            row.push(v);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::Parse(format!(
                    "line {}: expected {} columns, got {}",
                    lineno + 1,
                    first.len(),
                    row.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Parse("empty matrix".into()));
    }
    Ok(Mat::from_rows(rows))
}

// ---------------------------------------------------------------------------
// Operator and certificate text files
// ---------------------------------------------------------------------------

fn write_background_header(
    out: &mut String,
    n: usize,
    gamma: usize,
    beta: usize,
    tau: f64,
    bg: &BackgroundState,
    velocity_set: &str,
) {
    use std::fmt::Write;
    let _ = writeln!(out, "n {n}");
    let _ = writeln!(out, "gamma {gamma}");
    let _ = writeln!(out, "beta {beta}");
    let _ = writeln!(out, "tau {}", fmt_f64(tau));
    let _ = writeln!(out, "rho0 {}", fmt_f64(bg.rho0));
    let _ = writeln!(
        out,
        "u0 {} {} {}",
        fmt_f64(bg.u0[0]),
        fmt_f64(bg.u0[1]),
        fmt_f64(bg.u0[2])
    );
    let _ = writeln!(out, "cs2 {}", fmt_f64(bg.cs2));
    let _ = writeln!(out, "velocity-set {velocity_set}");
}

fn write_matrix_section(out: &mut String, name: &str, m: &Mat) {
    use std::fmt::Write;
    let _ = writeln!(out, "matrix {name} {} {}", m.rows(), m.cols());
    for r in 0..m.rows() {
        let cells: Vec<String> = m.row(r).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
}

/// Serializes a collision operator: header (n, γ, β, τ, background), the
/// modified moment matrix, and the reduced equilibrium map. Together these
/// reproduce the operator's action exactly.
pub fn write_operator(op: &CollisionOperator, bg: &BackgroundState, velocity_set: &str) -> String {
    let mut out = String::from("lbstab operator v1\n");
    write_background_header(&mut out, op.n(), op.gamma(), op.moment_matrix.beta(), op.tau, bg, velocity_set);
    write_matrix_section(&mut out, "moment", op.moment_matrix.entries());
    write_matrix_section(&mut out, "reduced-equilibrium", &op.reduced_equilibrium);
    out
}

/// Serializes a stability certificate: header, residuals, relaxation rates,
/// and the weight vector as an n×1 matrix.
pub fn write_certificate(
    cert: &StabilityCertificate,
    n: usize,
    gamma: usize,
    beta: usize,
    bg: &BackgroundState,
    velocity_set: &str,
) -> String {
    use std::fmt::Write;
    let mut out = String::from("lbstab certificate v1\n");
    write_background_header(&mut out, n, gamma, beta, cert.tau, bg, velocity_set);
    let _ = writeln!(
        out,
        "symmetrization-residual {}",
        fmt_f64(cert.symmetrization_residual)
    );
    let _ = writeln!(
        out,
        "idempotency-residual {}",
        fmt_f64(cert.idempotency_residual)
    );
    let _ = writeln!(
        out,
        "relaxation-rates {} {}",
        fmt_f64(cert.relaxation_rates[0]),
        fmt_f64(cert.relaxation_rates[1])
    );
    let lambda = Mat::from_rows(cert.lambda.iter().map(|&l| vec![l]).collect());
    write_matrix_section(&mut out, "lambda", &lambda);
    out
}

/// Line cursor for the text formats.
struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Self {
            iter: text.lines().enumerate(),
        }
    }

    /// Next non-blank line with its 1-based number.
    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, line) in self.iter.by_ref() {
            if !line.trim().is_empty() {
                return Ok((i + 1, line.trim()));
            }
        }
        Err(Error::Parse("unexpected end of file".into()))
    }
}

fn expect_kv<'a>(lines: &mut Lines<'a>, key: &str) -> Result<(usize, &'a str)> {
    let (no, line) = lines.next()?;
    match line.split_once(' ') {
        Some((k, v)) if k == key => Ok((no, v.trim())),
        _ => Err(Error::Parse(format!(
            "line {no}: expected {key:?}, got {line:?}"
        ))),
    }
}

fn parse_usize(no: usize, s: &str) -> Result<usize> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {no}: bad count {s:?}")))
}

fn parse_f64(no: usize, s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parse(format!("line {no}: bad number {s:?}")))
}

fn parse_f64_list(no: usize, s: &str, count: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = s
        .split_whitespace()
        .map(|t| parse_f64(no, t))
        .collect::<Result<_>>()?;
    if vals.len() != count {
        return Err(Error::Parse(format!(
            "line {no}: expected {count} values, got {}",
            vals.len()
        )));
    }
    Ok(vals)
}

struct Header {
    n: usize,
    gamma: usize,
    beta: usize,
    tau: f64,
    bg: BackgroundState,
    velocity_set: String,
}

fn parse_header(lines: &mut Lines<'_>) -> Result<Header> {
    let (no, v) = expect_kv(lines, "n")?;
    let n = parse_usize(no, v)?;
    if n == 0 || n > 10_000 {
        return Err(Error::Parse(format!("line {no}: implausible n = {n}")));
    }
    let (no, v) = expect_kv(lines, "gamma")?;
    let gamma = parse_usize(no, v)?;
    let (no, v) = expect_kv(lines, "beta")?;
    let beta = parse_usize(no, v)?;
    if gamma + beta > n {
        return Err(Error::Parse(format!(
            "line {no}: role counts gamma {gamma} + beta {beta} exceed n {n}"
        )));
    }
    let (no, v) = expect_kv(lines, "tau")?;
    let tau = parse_f64(no, v)?;
    if !tau.is_finite() {
        return Err(Error::Parse(format!("line {no}: tau must be finite")));
    }
    let (no, v) = expect_kv(lines, "rho0")?;
    let rho0 = parse_f64(no, v)?;
    let (no, v) = expect_kv(lines, "u0")?;
    let u0v = parse_f64_list(no, v, 3)?;
    let (no_cs, v) = expect_kv(lines, "cs2")?;
    let cs2 = parse_f64(no_cs, v)?;
    let (_, v) = expect_kv(lines, "velocity-set")?;
    let bg = BackgroundState::new(rho0, [u0v[0], u0v[1], u0v[2]], cs2)?;
    Ok(Header {
        n,
        gamma,
        beta,
        tau,
        bg,
        velocity_set: v.to_string(),
    })
}

fn parse_matrix_section(lines: &mut Lines<'_>, name: &str) -> Result<Mat> {
    let (no, v) = expect_kv(lines, "matrix")?;
    let parts: Vec<&str> = v.split_whitespace().collect();
    if parts.len() != 3 || parts[0] != name {
        return Err(Error::Parse(format!(
            "line {no}: expected \"matrix {name} <rows> <cols>\", got \"matrix {v}\""
        )));
    }
    let rows = parse_usize(no, parts[1])?;
    let cols = parse_usize(no, parts[2])?;
    rows.checked_mul(cols)
        .filter(|&t| t > 0 && t <= MAX_MATRIX_ENTRIES)
        .ok_or_else(|| {
            Error::Parse(format!("line {no}: implausible matrix size {rows}×{cols}"))
        })?;
    let mut data = Vec::with_capacity(rows);
    for _ in 0..rows {
        let (no, line) = lines.next()?;
        data.push(parse_f64_list(no, line, cols)?);
    }
    Ok(Mat::from_rows(data))
}

/// Parses an operator file back into a working collision operator and its
/// background. The dense generator is not stored; verification paths that
/// need it rebuild it from the stored matrices.
pub fn parse_operator(text: &str) -> Result<(CollisionOperator, BackgroundState, String)> {
    let mut lines = Lines::new(text);
    let (no, magic) = lines.next()?;
    if magic != "lbstab operator v1" {
        return Err(Error::Parse(format!(
            "line {no}: not an operator file (got {magic:?})"
        )));
    }
    let h = parse_header(&mut lines)?;
    let moment = parse_matrix_section(&mut lines, "moment")?;
    if moment.rows() != h.n || moment.cols() != h.n {
        return Err(Error::Parse(format!(
            "moment matrix is {}×{}, header says n = {}",
            moment.rows(),
            moment.cols(),
            h.n
        )));
    }
    let reduced = parse_matrix_section(&mut lines, "reduced-equilibrium")?;
    if reduced.rows() != h.n || reduced.cols() != h.gamma {
        return Err(Error::Parse(format!(
            "reduced equilibrium is {}×{}, expected {}×{}",
            reduced.rows(),
            reduced.cols(),
            h.n,
            h.gamma
        )));
    }
    let moment_matrix = crate::lattice::MomentMatrix::from_real(moment, h.gamma, h.beta)?;
    let op = CollisionOperator {
        reduced_equilibrium: reduced,
        moment_matrix,
        tau: h.tau,
        full_matrix: None,
    };
    Ok((op, h.bg, h.velocity_set))
}

/// Parses a certificate file.
pub fn parse_certificate(text: &str) -> Result<(StabilityCertificate, BackgroundState, String)> {
    let mut lines = Lines::new(text);
    let (no, magic) = lines.next()?;
    if magic != "lbstab certificate v1" {
        return Err(Error::Parse(format!(
            "line {no}: not a certificate file (got {magic:?})"
        )));
    }
    let h = parse_header(&mut lines)?;
    let (no, v) = expect_kv(&mut lines, "symmetrization-residual")?;
    let symmetrization_residual = parse_f64(no, v)?;
    let (no, v) = expect_kv(&mut lines, "idempotency-residual")?;
    let idempotency_residual = parse_f64(no, v)?;
    let (no, v) = expect_kv(&mut lines, "relaxation-rates")?;
    let rates = parse_f64_list(no, v, 2)?;
    let lambda = parse_matrix_section(&mut lines, "lambda")?;
    if lambda.rows() != h.n || lambda.cols() != 1 {
        return Err(Error::Parse(format!(
            "lambda is {}×{}, expected {}×1",
            lambda.rows(),
            lambda.cols(),
            h.n
        )));
    }
    let cert = StabilityCertificate {
        lambda: (0..h.n).map(|r| lambda[(r, 0)]).collect(),
        symmetrization_residual,
        idempotency_residual,
        relaxation_rates: [rates[0], rates[1]],
        tau: h.tau,
    };
    Ok((cert, h.bg, h.velocity_set))
}

// ---------------------------------------------------------------------------
// Field snapshots
// ---------------------------------------------------------------------------

/// Macroscopic snapshot as CSV: node indices and the four macroscopic
/// fields, x-fastest node order.
pub fn write_snapshot_csv(
    field: &LatticeField,
    op: &CollisionOperator,
    bg: &BackgroundState,
) -> String {
    let (rho, u) = macroscopic_fields(field, op, bg);
    let [nx, ny, nz] = field.dims();
    let mut out = String::from("x,y,z,rho_prime,u1_prime,u2_prime,u3_prime\n");
    let mut idx = 0usize;
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                out.push_str(&format!(
                    "{x},{y},{z},{},{},{},{}\n",
                    fmt_f64(rho[idx]),
                    fmt_f64(u[idx][0]),
                    fmt_f64(u[idx][1]),
                    fmt_f64(u[idx][2])
                ));
                idx += 1;
            }
        }
    }
    out
}

/// Raw density snapshot in the documented little-endian binary layout.
pub fn write_snapshot_binary(field: &LatticeField) -> Vec<u8> {
    let [nx, ny, nz] = field.dims();
    let n = field.n_velocities();
    let mut out = Vec::with_capacity(20 + 8 * n * nx * ny * nz);
    out.extend_from_slice(SNAPSHOT_MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(nx as u32).to_le_bytes());
    out.extend_from_slice(&(ny as u32).to_le_bytes());
    out.extend_from_slice(&(nz as u32).to_le_bytes());
    for i in 0..n {
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    out.extend_from_slice(&field.get(i, x, y, z).to_le_bytes());
                }
            }
        }
    }
    out
}

fn read_u32(bytes: &[u8], at: usize) -> Result<u32> {
    let slice = bytes
        .get(at..at + 4)
        .ok_or_else(|| Error::Parse("snapshot truncated in header".into()))?;
    Ok(u32::from_le_bytes(slice.try_into().expect("4-byte slice")))
}

/// Parses a binary snapshot. The payload length must match the header
/// exactly, and the dimensions must be valid lattice dimensions (each
/// either 1 or at least 5).
pub fn parse_snapshot_binary(bytes: &[u8]) -> Result<LatticeField> {
    if bytes.len() < 20 || &bytes[..4] != SNAPSHOT_MAGIC {
        return Err(Error::Parse("not a density snapshot (bad magic)".into()));
    }
    let n = read_u32(bytes, 4)? as usize;
    let nx = read_u32(bytes, 8)? as usize;
    let ny = read_u32(bytes, 12)? as usize;
    let nz = read_u32(bytes, 16)? as usize;
    if n == 0 || n > 10_000 {
        return Err(Error::Parse(format!("implausible velocity count {n}")));
    }
    let total = nx
        .checked_mul(ny)
        .and_then(|v| v.checked_mul(nz))
        .and_then(|v| v.checked_mul(n))
        .and_then(|v| v.checked_mul(8))
        .ok_or_else(|| Error::Parse("snapshot dimensions overflow".into()))?;
    if bytes.len() != 20 + total {
        return Err(Error::Parse(format!(
            "snapshot payload is {} bytes, header implies {}",
            bytes.len() - 20,
            total
        )));
    }
    let mut field = LatticeField::zeros([nx, ny, nz], n)?;
    let mut at = 20usize;
    for i in 0..n {
        for z in 0..nz {
            for y in 0..ny {
                for x in 0..nx {
                    let v = f64::from_le_bytes(
                        bytes[at..at + 8].try_into().expect("8-byte slice"),
                    );
                    field.set(i, x, y, z, v);
                    at += 8;
                }
            }
        }
    }
    Ok(field)
}

// ---------------------------------------------------------------------------
// Report CSVs
// ---------------------------------------------------------------------------

/// Monitor series as CSV, one row per recorded step (step 0 = initial).
pub fn write_monitors_csv(monitors: &Monitors) -> String {
    let mut out = String::from("step,energy,rho_sum,j1_sum,j2_sum,j3_sum\n");
    for (s, ((e, r), j)) in monitors
        .energy
        .iter()
        .zip(&monitors.rho_sum)
        .zip(&monitors.j_sum)
        .enumerate()
    {
        out.push_str(&format!(
            "{s},{},{},{},{},{}\n",
            fmt_f64(*e),
            fmt_f64(*r),
            fmt_f64(j[0]),
            fmt_f64(j[1]),
            fmt_f64(j[2])
        ));
    }
    out
}

/// Convergence report as CSV; the first row has no order entry.
pub fn write_convergence_csv(report: &ConvergenceReport) -> String {
    let mut out = String::from("grid_n,error,order\n");
    for row in &report.rows {
        let order = row.order.map(fmt_f64).unwrap_or_default();
        out.push_str(&format!("{},{},{order}\n", row.grid_n, fmt_f64(row.error)));
    }
    out
}

/// Stability-domain map as CSV, row-major over (u02, u03), feasible ∈ {0,1}.
pub fn write_domain_csv(map: &DomainMap) -> String {
    let mut out = String::from("u02,u03,feasible\n");
    for (i2, &v2) in map.u02.iter().enumerate() {
        for (i3, &v3) in map.u03.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_f64(v2),
                fmt_f64(v3),
                u8::from(map.at(i2, i3))
            ));
        }
    }
    out
}
