//! `membrane` — command-line front end for the spectral verification
//! library.
//!
//! Seven run modes cover the full verification chain: `spectrum`,
//! `verify-algebra`, `verify-identity`, `bracketing`, `region-scan`,
//! `oscillator-bound` and `zero-mode-scan`. Each resolves its
//! configuration from per-command defaults, an optional `key = value`
//! config file (with `[command]` sections), and long-form flags — in
//! that precedence order — runs the corresponding library checks, and
//! writes a JSON or CSV report.
//!
//! Exit codes: `0` every check passed, `1` at least one check failed,
//! `2` configuration or runtime error. Partial results are written in
//! every case once execution has begun.

mod config;
mod report;
mod run;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use config::{fmt_f64, fmt_f64_list, ConfigError, Patch, RunConfig};
use report::{ConfigBlock, Report};

#[derive(Parser)]
#[command(
    name = "membrane",
    version,
    about = "Spectral verification of the supersymmetric x\u{b2}y\u{b2} matrix Schr\u{f6}dinger operator",
    after_help = "Examples:\n  membrane spectrum --L 6 --n 96 --k 4\n  membrane verify-algebra --L 2 --n 16\n  membrane region-scan --M 1,2,3 --region II --format csv\n  membrane zero-mode-scan --L 4,6,8"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Low-lying eigenvalues of the full Hamiltonian on one box, with residual certificates.
    Spectrum(CommonArgs),
    /// Exact operator-algebra identities (squaring, gradings, reflections) on one grid.
    VerifyAlgebra(CommonArgs),
    /// Cutoff commutator identity, strong limit, assembly consistency and the quadratic form bound.
    VerifyIdentity(CommonArgs),
    /// Neumann bracketing of the comparison operator across a refinement schedule.
    Bracketing(CommonArgs),
    /// Regional ground-value positivity scan over cut scales, with the strip-bound fit.
    RegionScan(CommonArgs),
    /// 1D Neumann oscillator ground values, inverse-square deficit law and scaled consequence.
    OscillatorBound(CommonArgs),
    /// Ground-state delocalization scan over growing boxes at fixed spacing.
    ZeroModeScan(CommonArgs),
}

impl Command {
    fn pieces(&self) -> (&'static str, &CommonArgs) {
        match self {
            Command::Spectrum(a) => ("spectrum", a),
            Command::VerifyAlgebra(a) => ("verify-algebra", a),
            Command::VerifyIdentity(a) => ("verify-identity", a),
            Command::Bracketing(a) => ("bracketing", a),
            Command::RegionScan(a) => ("region-scan", a),
            Command::OscillatorBound(a) => ("oscillator-bound", a),
            Command::ZeroModeScan(a) => ("zero-mode-scan", a),
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    /// Config file (key = value pairs, optional [command] sections).
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Box half-length(s) L, comma-separated for scans.
    #[arg(long = "L", value_name = "LIST")]
    half_lengths: Option<String>,
    /// Points per axis n of the fine grid (even).
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    /// Boundary condition: dirichlet | neumann.
    #[arg(long, value_name = "BC")]
    bc: Option<String>,
    /// Cut scale(s) M, comma-separated for scans.
    #[arg(long = "M", value_name = "LIST")]
    cut_scales: Option<String>,
    /// Damping rate of the crossover cutoff.
    #[arg(long, value_name = "EPS")]
    eps: Option<f64>,
    /// Number of requested eigenpairs.
    #[arg(long, value_name = "K")]
    k: Option<usize>,
    /// Residual / defect tolerance.
    #[arg(long, value_name = "TOL")]
    tol: Option<f64>,
    /// Seed for every random draw of the run.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
    /// Report path (default: membrane-report.json / .csv).
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Report format: json | csv.
    #[arg(long, value_name = "FMT")]
    format: Option<String>,
    /// Ascending refinement schedule, comma-separated point counts.
    #[arg(long, value_name = "LIST")]
    schedule: Option<String>,
    /// Oscillator half-lengths a, comma-separated ascending.
    #[arg(long = "a", value_name = "LIST")]
    oscillator_half_lengths: Option<String>,
    /// Grid spacing for the fixed-spacing box scan.
    #[arg(long, value_name = "H")]
    spacing: Option<f64>,
    /// Region selector for scan tables: I | II | III | IV | all.
    #[arg(long, value_name = "REGION")]
    region: Option<String>,
}

/// Converts the parsed flags into a configuration patch, recording each
/// supplied key in the same rendered form the config file uses.
fn flag_patch(args: &CommonArgs) -> Result<Patch, ConfigError> {
    let mut p = Patch::default();
    if let Some(raw) = &args.half_lengths {
        let v = config::flag_f64_list("L", raw)?;
        p.rendered.insert("L".into(), fmt_f64_list(&v));
        p.half_lengths = Some(v);
    }
    if let Some(n) = args.n {
        p.rendered.insert("n".into(), n.to_string());
        p.points_per_axis = Some(n);
    }
    if let Some(bc) = &args.bc {
        let v = bc.to_lowercase();
        p.rendered.insert("bc".into(), v.clone());
        p.boundary = Some(v);
    }
    if let Some(raw) = &args.cut_scales {
        let v = config::flag_f64_list("M", raw)?;
        p.rendered.insert("M".into(), fmt_f64_list(&v));
        p.cut_scales = Some(v);
    }
    if let Some(eps) = args.eps {
        p.rendered.insert("eps".into(), fmt_f64(eps));
        p.damping = Some(eps);
    }
    if let Some(k) = args.k {
        p.rendered.insert("k".into(), k.to_string());
        p.modes = Some(k);
    }
    if let Some(tol) = args.tol {
        p.rendered.insert("tol".into(), fmt_f64(tol));
        p.tol = Some(tol);
    }
    if let Some(seed) = args.seed {
        p.rendered.insert("seed".into(), seed.to_string());
        p.seed = Some(seed);
    }
    if let Some(path) = &args.output {
        let v = path.to_string_lossy().into_owned();
        p.rendered.insert("output".into(), v.clone());
        p.output = Some(v);
    }
    if let Some(fmt) = &args.format {
        let v = fmt.to_lowercase();
        p.rendered.insert("format".into(), v.clone());
        p.format = Some(v);
    }
    if let Some(raw) = &args.schedule {
        let v = config::flag_usize_list("schedule", raw)?;
        let body = v.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(", ");
        p.rendered.insert("schedule".into(), format!("[{body}]"));
        p.resolution_schedule = Some(v);
    }
    if let Some(raw) = &args.oscillator_half_lengths {
        let v = config::flag_f64_list("a", raw)?;
        p.rendered.insert("a".into(), fmt_f64_list(&v));
        p.oscillator_half_lengths = Some(v);
    }
    if let Some(h) = args.spacing {
        p.rendered.insert("spacing".into(), fmt_f64(h));
        p.spacing = Some(h);
    }
    if let Some(region) = &args.region {
        let v = if region.eq_ignore_ascii_case("all") {
            "all".to_string()
        } else {
            region.to_uppercase()
        };
        p.rendered.insert("region".into(), v.clone());
        p.region = Some(v);
    }
    Ok(p)
}

fn main() {
    let cli = Cli::parse();
    std::process::exit(run_cli(&cli));
}

fn fail_usage(message: impl std::fmt::Display) -> i32 {
    eprintln!("error: {message}");
    2
}

fn run_cli(cli: &Cli) -> i32 {
    let (command, args) = cli.command.pieces();

    let file_layer = match &args.config {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => return fail_usage(format_args!("cannot read {}: {e}", path.display())),
            };
            match config::file_patch(&text, command) {
                Ok((patch, file_command)) => {
                    if let Some(fc) = file_command {
                        if fc != command {
                            return fail_usage(format_args!(
                                "config file names command `{fc}` but `{command}` was invoked"
                            ));
                        }
                    }
                    Some((patch, path.to_string_lossy().into_owned()))
                }
                Err(e) => return fail_usage(e),
            }
        }
        None => None,
    };

    let flags = match flag_patch(args) {
        Ok(p) => p,
        Err(e) => return fail_usage(e),
    };

    let resolved = match config::resolve(command, file_layer.as_ref().map(|(p, _)| p), &flags) {
        Ok(r) => r,
        Err(e) => return fail_usage(e),
    };
    let cfg: RunConfig = resolved.config;

    let (output, error) = run::execute(&cfg);
    let runtime_failed = error.is_some();
    let report = Report {
        config: ConfigBlock {
            values: cfg.clone(),
            file: file_layer.map(|(_, path)| path),
            overrides: resolved.overrides,
        },
        checks: output.checks,
        tables: output.tables,
        timings: output.timings,
        timestamp: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0),
        error,
    };

    let path = cfg.output.clone().unwrap_or_else(|| {
        if cfg.format == "csv" {
            "membrane-report.csv".to_string()
        } else {
            "membrane-report.json".to_string()
        }
    });
    let body = if cfg.format == "csv" {
        report.to_csv()
    } else {
        report.to_json()
    };
    if let Err(e) = std::fs::write(&path, body) {
        return fail_usage(format_args!("cannot write report to {path}: {e}"));
    }

    for line in report.summary_lines() {
        println!("{line}");
    }
    println!("report written to {path}");

    if runtime_failed {
        2
    } else if report.all_passed() {
        0
    } else {
        1
    }
}
