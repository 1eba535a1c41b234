//! `lbstab` — construct, verify, and exercise stable collision operators.
//!
//! Five subcommands cover the pipeline: `construct` builds and certifies an
//! operator for a background flow, `verify` re-checks a stored operator
//! file, `simulate` runs the lattice scheme and records monitors and
//! snapshots, `converge` runs a grid-refinement study, and `scan` maps the
//! feasibility domain over background velocities.
//!
//! Every subcommand accepts `--config FILE` (JSON) plus overriding flags;
//! flags win over the file. Outputs are written into `--out DIR` (default
//! `out`) with fixed names and deterministic bytes: the same configuration
//! always produces identical files.
//!
//! Exit status: 0 on success; 2 when the weight linear program is
//! infeasible for the requested background (a scientific result, not a
//! failure); 1 on any other error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lbstab::analysis::{
    self, scan_axis, scan_stability_domain, test_case, TestCase,
};
use lbstab::config::{CommandKind, Num, RunConfig, ScanConfig};
use lbstab::equilibrium::BackgroundState;
use lbstab::error::{Error, Result};
use lbstab::formats;
use lbstab::lattice::{build_m1, build_velocity_set};
use lbstab::simulator::{init_equilibrium_dims, run_field};
use lbstab::stability::certify_operator;

#[derive(Parser)]
#[command(
    name = "lbstab",
    version,
    about = "Stable collision operators for the isothermal linearized Euler equations",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand; each overrides its config-file key.
#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// JSON configuration file (flags override its keys)
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory (default "out")
    #[arg(long, value_name = "DIR")]
    out: Option<String>,

    /// Background-velocity preset: preset-1 .. preset-4
    #[arg(long, value_name = "NAME")]
    preset: Option<String>,

    /// Grid size, or comma-separated doubling list for converge
    #[arg(long, value_name = "N[,N...]", value_delimiter = ',')]
    grid: Option<Vec<u32>>,

    /// Relaxation time τ (default 1/2)
    #[arg(long, value_name = "X")]
    tau: Option<f64>,

    /// Permit τ < 1/2, outside the certified stability range
    #[arg(long)]
    allow_unstable: bool,

    /// Worker threads (default: all available cores)
    #[arg(long, value_name = "K")]
    threads: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Operator file to verify (from a previous `construct`)
    #[arg(long, value_name = "FILE")]
    operator: Option<String>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Number of time steps
    #[arg(long, value_name = "N")]
    steps: Option<u64>,

    /// Benchmark initial-condition set 1..3 (default: background only)
    #[arg(long, value_name = "ID")]
    test_case: Option<u8>,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Benchmark initial-condition set 1..3
    #[arg(long, value_name = "ID")]
    test_case: Option<u8>,

    /// Final physical time (default: the test case's convention)
    #[arg(long, value_name = "T")]
    final_time: Option<f64>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Fixed first background-velocity component
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    u01: Option<f64>,

    /// Lower edge of the scanned (u02, u03) square (default -1)
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    min: Option<f64>,

    /// Upper edge of the scanned (u02, u03) square (default 1)
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    max: Option<f64>,

    /// Scan points per axis (default 41)
    #[arg(long, value_name = "N")]
    cells: Option<u32>,
}

#[derive(Subcommand)]
enum Command {
    /// Build an operator for a background flow and certify it
    Construct(CommonArgs),
    /// Re-check a stored operator file against a fresh construction
    Verify(VerifyArgs),
    /// Run the lattice scheme; record monitors and final-state snapshots
    Simulate(SimulateArgs),
    /// Grid-refinement study against the reference solution
    Converge(ConvergeArgs),
    /// Map weight feasibility over a grid of background velocities
    Scan(ScanArgs),
}

impl Command {
    fn kind(&self) -> CommandKind {
        match self {
            Command::Construct(_) => CommandKind::Construct,
            Command::Verify(_) => CommandKind::Verify,
            Command::Simulate(_) => CommandKind::Simulate,
            Command::Converge(_) => CommandKind::Converge,
            Command::Scan(_) => CommandKind::Scan,
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::Construct(c) => c,
            Command::Verify(v) => &v.common,
            Command::Simulate(s) => &s.common,
            Command::Converge(c) => &c.common,
            Command::Scan(s) => &s.common,
        }
    }
}

/// Loads the config file (if any) and merges the command-line flags over
/// it, then runs the per-command validation.
fn resolve_config(command: &Command) -> Result<RunConfig> {
    let kind = command.kind();
    let common = command.common();
    let mut cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let cfg = RunConfig::from_json_str_lenient(&text)?;
            let file_kind = cfg.command_kind()?;
            if file_kind != kind {
                return Err(Error::Config(format!(
                    "the configuration file says command {:?} but the {:?} \
                     subcommand was invoked",
                    file_kind.name(),
                    kind.name()
                )));
            }
            cfg
        }
        None => RunConfig::minimal(kind.name()),
    };

    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    if let Some(preset) = &common.preset {
        cfg.preset = Some(preset.clone());
        // A flag-level preset replaces any file-level explicit velocity.
        if let Some(bg) = cfg.background.as_mut() {
            bg.u0 = None;
        }
    }
    if let Some(tau) = common.tau {
        cfg.tau = Some(Num::Float(tau));
    }
    if common.allow_unstable {
        cfg.allow_unstable = Some(true);
    }
    if let Some(threads) = common.threads {
        cfg.threads = Some(threads);
    }
    if let Some(grid) = &common.grid {
        match (kind, grid.as_slice()) {
            (CommandKind::Converge, list) => cfg.grids = Some(list.to_vec()),
            (_, [n]) => cfg.grid = Some(*n),
            (_, list) => {
                return Err(Error::Config(format!(
                    "{} takes a single --grid value, got {} of them",
                    kind.name(),
                    list.len()
                )))
            }
        }
    }

    match command {
        Command::Verify(v) => {
            if let Some(op) = &v.operator {
                cfg.operator = Some(op.clone());
            }
        }
        Command::Simulate(s) => {
            if let Some(steps) = s.steps {
                cfg.steps = Some(steps);
            }
            if let Some(tc) = s.test_case {
                cfg.test_case = Some(tc);
            }
        }
        Command::Converge(c) => {
            if let Some(tc) = c.test_case {
                cfg.test_case = Some(tc);
            }
            if let Some(t) = c.final_time {
                cfg.final_time = Some(Num::Float(t));
            }
        }
        Command::Scan(s) => {
            let from_file = cfg.scan.is_some();
            if !from_file && s.u01.is_none() {
                return Err(Error::Config(
                    "scan requires --u01 or a scan section in the config file".into(),
                ));
            }
            let mut section = cfg.scan.take().unwrap_or(ScanConfig {
                u01: Num::Float(0.0),
                min: None,
                max: None,
                cells: None,
            });
            if let Some(u01) = s.u01 {
                section.u01 = Num::Float(u01);
            }
            if let Some(min) = s.min {
                section.min = Some(Num::Float(min));
            }
            if let Some(max) = s.max {
                section.max = Some(Num::Float(max));
            }
            if let Some(cells) = s.cells {
                section.cells = Some(cells);
            }
            cfg.scan = Some(section);
        }
        Command::Construct(_) => {}
    }

    cfg.validate()?;
    Ok(cfg)
}

fn install_thread_pool(cfg: &RunConfig) {
    if let Some(threads) = cfg.threads {
        // Ignore the error when a pool already exists (tests call in-process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
}

fn ensure_out_dir(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = PathBuf::from(cfg.out_dir());
    std::fs::create_dir_all(&dir)?;
    Ok(dir)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes)?;
    println!("wrote {}", path.display());
    Ok(())
}

/// Background for a benchmark initial-condition set: the case pins ρ₀, the
/// config supplies u₀ (and may restate the same ρ₀, but not a different one).
fn background_for_case(cfg: &RunConfig, tc: &TestCase) -> Result<BackgroundState> {
    let bg = cfg.resolved_background()?;
    let explicit_rho0 = cfg
        .background
        .as_ref()
        .and_then(|b| b.rho0.as_ref())
        .is_some();
    if !explicit_rho0 {
        return BackgroundState::new(tc.rho0, bg.u0, bg.cs2);
    }
    if (bg.rho0 - tc.rho0).abs() > 1e-12 {
        return Err(Error::Config(format!(
            "test case {} is defined with rho0 = {}, but the configuration \
             sets rho0 = {}",
            tc.id, tc.rho0, bg.rho0
        )));
    }
    Ok(bg)
}

fn cmd_construct(cfg: &RunConfig) -> Result<()> {
    let out = ensure_out_dir(cfg)?;
    let vs_name = cfg.velocity_set_name();
    let vs = build_velocity_set(vs_name)?;
    let m1 = build_m1(&vs)?;
    let bg = cfg.resolved_background()?;
    let tau = cfg.resolved_tau()?;
    let (op, cert) = certify_operator(&m1, &bg, tau)?;
    println!(
        "constructed {}-velocity operator at u0 = [{}, {}, {}], tau = {tau}",
        op.n(),
        bg.u0[0],
        bg.u0[1],
        bg.u0[2]
    );
    println!(
        "certificate: symmetrization residual {:.3e}, idempotency residual {:.3e}",
        cert.symmetrization_residual, cert.idempotency_residual
    );
    let tol = cfg.certification_residual();
    if !cert.certifies_stability(tol) {
        if cfg.allow_unstable.unwrap_or(false) {
            println!(
                "note: operator is outside the certified range (tau = {tau} < 1/2); \
                 files written anyway"
            );
        } else {
            return Err(Error::Construction(format!(
                "certificate residuals exceed the tolerance {tol:.3e}"
            )));
        }
    }
    write_file(
        &out.join("operator.txt"),
        formats::write_operator(&op, &bg, vs_name).as_bytes(),
    )?;
    write_file(
        &out.join("certificate.txt"),
        formats::write_certificate(&cert, op.n(), op.gamma(), op.moment_matrix.beta(), &bg, vs_name)
            .as_bytes(),
    )?;
    Ok(())
}

fn cmd_verify(cfg: &RunConfig) -> Result<()> {
    let out = ensure_out_dir(cfg)?;
    let path = cfg
        .operator
        .as_ref()
        .ok_or_else(|| Error::Config("verify requires an operator file".into()))?;
    let text = std::fs::read_to_string(path)?;
    let (stored, bg, vs_name) = formats::parse_operator(&text)?;

    // Rebuild from the file's own background and compare: the construction
    // is deterministic, so a faithful file reproduces it exactly.
    let vs = build_velocity_set(&vs_name)?;
    let m1 = build_m1(&vs)?;
    let (rebuilt, cert) = certify_operator(&m1, &bg, stored.tau)?;
    let mut worst = 0.0f64;
    for r in 0..stored.n() {
        for c in 0..stored.n() {
            worst = worst.max(
                (stored.moment_matrix.entries()[(r, c)]
                    - rebuilt.moment_matrix.entries()[(r, c)])
                .abs(),
            );
        }
        for c in 0..stored.gamma() {
            worst = worst
                .max((stored.reduced_equilibrium[(r, c)] - rebuilt.reduced_equilibrium[(r, c)]).abs());
        }
    }
    let tol = cfg.certification_residual();
    println!(
        "verification: reconstruction deviation {worst:.3e}, symmetrization \
         residual {:.3e}, idempotency residual {:.3e}",
        cert.symmetrization_residual, cert.idempotency_residual
    );
    let report = format!(
        "verification report\noperator-file {path}\nreconstruction-deviation {worst}\n\
         symmetrization-residual {}\nidempotency-residual {}\ncertified {}\n",
        cert.symmetrization_residual,
        cert.idempotency_residual,
        cert.certifies_stability(tol) && worst <= tol
    );
    write_file(&out.join("verification.txt"), report.as_bytes())?;
    if worst > tol {
        return Err(Error::Construction(format!(
            "stored operator deviates from its reconstruction by {worst:.3e} (tolerance {tol:.3e})"
        )));
    }
    if !cert.certifies_stability(tol) {
        return Err(Error::Construction(format!(
            "certificate residuals exceed the tolerance {tol:.3e}"
        )));
    }
    Ok(())
}

fn cmd_simulate(cfg: &RunConfig) -> Result<()> {
    let out = ensure_out_dir(cfg)?;
    let vs_name = cfg.velocity_set_name();
    let vs = build_velocity_set(vs_name)?;
    let m1 = build_m1(&vs)?;
    let tau = cfg.resolved_tau()?;
    let grid = cfg
        .grid
        .ok_or_else(|| Error::Config("simulate requires a grid size".into()))? as usize;
    let steps = cfg
        .steps
        .ok_or_else(|| Error::Config("simulate requires a step count".into()))?
        as usize;

    let case = match cfg.test_case {
        Some(id) => Some(test_case(id)?),
        None => None,
    };
    let bg = match &case {
        Some(tc) => background_for_case(cfg, tc)?,
        None => cfg.resolved_background()?,
    };
    let (op, cert) = certify_operator(&m1, &bg, tau)?;

    let field = match &case {
        Some(tc) => init_equilibrium_dims(
            [grid; 3],
            &op,
            &bg,
            |p| tc.rho_prime(p),
            |p| tc.u_prime(p),
        )?,
        None => init_equilibrium_dims([grid; 3], &op, &bg, |_| 0.0, |_| [0.0; 3])?,
    };
    println!(
        "simulating {steps} steps on a {grid}^3 grid ({} velocities)",
        op.n()
    );
    let (field, monitors) = run_field(field, &op, &vs, steps, &cert.lambda)?;
    let initial = monitors.energy.first().copied().unwrap_or(0.0);
    let final_e = monitors.energy.last().copied().unwrap_or(0.0);
    println!("weighted energy: {initial:.6e} -> {final_e:.6e}");
    write_file(
        &out.join("monitors.csv"),
        formats::write_monitors_csv(&monitors).as_bytes(),
    )?;
    write_file(
        &out.join("snapshot.csv"),
        formats::write_snapshot_csv(&field, &op, &bg).as_bytes(),
    )?;
    write_file(
        &out.join("snapshot.bin"),
        &formats::write_snapshot_binary(&field),
    )?;
    Ok(())
}

fn cmd_converge(cfg: &RunConfig) -> Result<()> {
    let out = ensure_out_dir(cfg)?;
    let id = cfg
        .test_case
        .ok_or_else(|| Error::Config("converge requires a test case".into()))?;
    let tc = test_case(id)?;
    let bg = background_for_case(cfg, &tc)?;
    let grids: Vec<usize> = cfg
        .grids
        .as_ref()
        .ok_or_else(|| Error::Config("converge requires a grid list".into()))?
        .iter()
        .map(|&g| g as usize)
        .collect();
    let t_final = match &cfg.final_time {
        Some(n) => n.to_f64()?,
        None => tc.default_final_time(),
    };
    let report = if tc.is_pseudo1d() {
        analysis::convergence_study(&tc, &bg, &grids, t_final)?
    } else {
        let finest = *grids.iter().max().unwrap();
        analysis::self_convergence_study(&tc, &bg, &grids, 4 * finest, t_final, 256)?
    };
    for row in &report.rows {
        match row.order {
            Some(order) => println!(
                "grid {:>4}: error {:.6e}, order {:.3}",
                row.grid_n, row.error, order
            ),
            None => println!("grid {:>4}: error {:.6e}", row.grid_n, row.error),
        }
    }
    write_file(
        &out.join("convergence.csv"),
        formats::write_convergence_csv(&report).as_bytes(),
    )?;
    Ok(())
}

fn cmd_scan(cfg: &RunConfig) -> Result<()> {
    let out = ensure_out_dir(cfg)?;
    let section = cfg
        .scan
        .as_ref()
        .ok_or_else(|| Error::Config("scan requires scan parameters".into()))?;
    let u01 = section.u01.to_f64()?;
    let lo = match &section.min {
        Some(n) => n.to_f64()?,
        None => -1.0,
    };
    let hi = match &section.max {
        Some(n) => n.to_f64()?,
        None => 1.0,
    };
    if !(lo < hi) {
        return Err(Error::Config(format!(
            "scan range is empty: min {lo} must be below max {hi}"
        )));
    }
    let cells = section.cells.unwrap_or(41) as usize;
    let vs = build_velocity_set(cfg.velocity_set_name())?;
    let axis = scan_axis(lo, hi, cells);
    let map = scan_stability_domain(&vs, u01, &axis, &axis)?;
    let feasible = map.feasible.iter().filter(|&&f| f).count();
    println!(
        "scanned {cells}x{cells} backgrounds at u01 = {u01}: {feasible} feasible, {} infeasible",
        cells * cells - feasible
    );
    write_file(&out.join("domain.csv"), formats::write_domain_csv(&map).as_bytes())?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let cfg = resolve_config(&cli.command)?;
    install_thread_pool(&cfg);
    match cli.command {
        Command::Construct(_) => cmd_construct(&cfg),
        Command::Verify(_) => cmd_verify(&cfg),
        Command::Simulate(_) => cmd_simulate(&cfg),
        Command::Converge(_) => cmd_converge(&cfg),
        Command::Scan(_) => cmd_scan(&cfg),
    }
}

fn main() -> ExitCode {
    // Exit-code contract: 0 success, 2 infeasible, 1 any other error.
    // Usage errors therefore exit 1, not clap's default 2; help and
    // version displays stay 0.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Error::Infeasible) => {
            eprintln!("error: {}", Error::Infeasible);
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
