//! Command execution: maps each run mode onto the library's checks and
//! gathers their reports, tables and timings.
//!
//! Execution is transactional per stage: if a stage errors (bad
//! geometry, solver stall), everything computed so far is kept and the
//! error travels back alongside the partial output, so the binary can
//! still write a report before exiting with the runtime-error code.

use std::collections::BTreeMap;
use std::time::Instant;

use membrane::cutoff::{saddle, saddle_gradient, CutoffParams};
use membrane::eigen::{smallest_eigenpairs, SolverConfig};
use membrane::grid::{Bc, GridSpec};
use membrane::operator::hamiltonian;
use membrane::verify::{
    bracketing_test, check_commutator_identity, check_commutator_vanishes,
    check_discretization_consistency, check_form_bound, check_strong_limit, check_susy_algebra,
    neumann_oscillator_bound, nonuniqueness_algebra_check, region_positivity_scan,
    supertrace_check, zero_mode_search, VerificationReport,
};
use serde_json::json;

use crate::config::RunConfig;
use crate::report::Table;

/// Everything a run produced, independent of how it ends.
#[derive(Debug, Default)]
pub struct RunOutput {
    pub checks: Vec<VerificationReport>,
    pub tables: BTreeMap<String, Table>,
    pub timings: BTreeMap<String, f64>,
}

/// Number of random test fields for the algebra checks.
const ALGEBRA_FIELDS: usize = 20;
/// Number of random quadratic-form trials for the form-bound check.
const FORM_BOUND_TRIALS: usize = 25;
/// Canonical undamping schedule for the strong-limit check.
const UNDAMPING_SCHEDULE: [f64; 4] = [0.5, 0.25, 0.1, 0.01];
/// The strong-limit defect must fall to 5% of its first value.
const UNDAMPING_RATIO: f64 = 0.05;
/// The eigensolver-limited checks (paired spectrum) cannot certify
/// below this floor even when the algebraic tolerance is tighter.
const SPECTRAL_PAIRING_FLOOR: f64 = 1e-6;

/// Runs the configured command. The second component is a runtime
/// error message when one interrupted the run; partial results remain
/// in the first component either way.
pub fn execute(cfg: &RunConfig) -> (RunOutput, Option<String>) {
    let mut out = RunOutput::default();
    let started = Instant::now();
    let result = dispatch(cfg, &mut out);
    out.timings
        .insert("total".to_string(), started.elapsed().as_secs_f64());
    (out, result.err())
}

fn dispatch(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), String> {
    match cfg.command.as_str() {
        "spectrum" => spectrum(cfg, out),
        "verify-algebra" => verify_algebra(cfg, out),
        "verify-identity" => verify_identity(cfg, out),
        "bracketing" => bracketing(cfg, out),
        "region-scan" => region_scan(cfg, out),
        "oscillator-bound" => oscillator_bound(cfg, out),
        "zero-mode-scan" => zero_mode_scan(cfg, out),
        other => Err(format!("unknown command `{other}`")),
    }
}

fn bc_of(cfg: &RunConfig) -> Bc {
    if cfg.boundary == "neumann" {
        Bc::Neumann
    } else {
        Bc::Dirichlet
    }
}

fn grid_of(cfg: &RunConfig) -> Result<GridSpec, String> {
    let bc = bc_of(cfg);
    GridSpec::new(cfg.half_lengths[0], cfg.points_per_axis, bc, bc).map_err(|e| e.to_string())
}

fn timed<T, E: ToString>(
    out: &mut RunOutput,
    stage: &str,
    f: impl FnOnce() -> Result<T, E>,
) -> Result<T, String> {
    let t0 = Instant::now();
    let r = f();
    out.timings
        .insert(stage.to_string(), t0.elapsed().as_secs_f64());
    r.map_err(|e| e.to_string())
}

fn spectrum(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), String> {
    let grid = grid_of(cfg)?;
    let op = hamiltonian(&grid);
    let solver = SolverConfig::new(cfg.modes)
        .with_tol(cfg.tol)
        .with_seed(cfg.seed);
    let result = timed(out, "spectrum", || smallest_eigenpairs(&op, &solver))?;

    let mut table = Table::new(&["index", "eigenvalue", "residual", "converged"]);
    for (i, ((ev, res), conv)) in result
        .eigenvalues
        .iter()
        .zip(&result.residuals)
        .zip(&result.converged)
        .enumerate()
    {
        table.push_row(vec![json!(i), json!(ev), json!(res), json!(conv)]);
    }
    out.tables.insert("spectrum".to_string(), table);

    let worst = result.residuals.iter().cloned().fold(0.0, f64::max);
    let mut params = BTreeMap::new();
    params.insert("half_length".to_string(), cfg.half_lengths[0]);
    params.insert("points_per_axis".to_string(), cfg.points_per_axis as f64);
    params.insert("modes".to_string(), cfg.modes as f64);
    params.insert("seed".to_string(), cfg.seed as f64);
    let check = VerificationReport::new(
        "spectrum: every requested eigenpair certified by its residual",
        params,
        worst,
        cfg.tol,
    )
    .with_artifact("eigenvalues", result.eigenvalues.clone())
    .with_artifact("residuals", result.residuals.clone())
    .with_artifact("iterations", vec![result.iterations as f64]);
    out.checks.push(check);
    Ok(())
}

fn verify_algebra(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), String> {
    let grid = grid_of(cfg)?;
    let algebra = timed(out, "operator algebra", || {
        check_susy_algebra(&grid, ALGEBRA_FIELDS, cfg.tol, cfg.seed)
    })?;
    let mut table = Table::new(&["identity", "worst_defect"]);
    for (name, values) in &algebra.artifacts {
        if let Some(defect) = values.first() {
            table.push_row(vec![json!(name), json!(defect)]);
        }
    }
    out.tables.insert("identity_defects".to_string(), table);
    out.checks.push(algebra);

    let nonuniq = timed(out, "reflection non-commutation", || {
        nonuniqueness_algebra_check(&grid, ALGEBRA_FIELDS, cfg.tol, cfg.seed)
    })?;
    out.checks.push(nonuniq);

    // The paired-spectrum check measures eigenvalue splittings, so its
    // floor is the eigensolver certificate, not machine precision.
    let st_tol = cfg.tol.max(SPECTRAL_PAIRING_FLOOR);
    let st = timed(out, "paired spectrum", || supertrace_check(&grid, st_tol, cfg.seed))?;
    out.checks.push(st);
    Ok(())
}

fn verify_identity(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), String> {
    let bc = bc_of(cfg);
    let l = cfg.half_lengths[0];
    let m = cfg.cut_scales[0];
    let schedule = cfg.resolution_schedule.clone();

    let params = CutoffParams::new(m, cfg.damping).map_err(|e| e.to_string())?;
    let damped = timed(out, "commutator identity (damped crossover)", || {
        check_commutator_identity(
            l,
            &schedule,
            bc,
            "damped crossover",
            move |x, y| params.pair_difference(x, y),
            move |x, y| params.pair_gradient(x, y),
        )
    })?;
    let saddle_report = timed(out, "commutator identity (quadratic saddle)", || {
        check_commutator_identity(l, &schedule, bc, "quadratic saddle", saddle, saddle_gradient)
    })?;
    let vanishing = timed(out, "commutator vanishes for constants", || {
        check_commutator_vanishes(l, cfg.points_per_axis, bc, 2.75)
    })?;
    let consistency = timed(out, "direct vs supersymmetric assembly", || {
        check_discretization_consistency(l, &schedule, bc, 1.0)
    })?;

    let mut table = Table::new(&[
        "points_per_axis",
        "spacing",
        "damped_defect",
        "saddle_defect",
        "assembly_defect",
    ]);
    let spacings = &damped.artifacts["spacings"];
    let damped_defects = &damped.artifacts["defects"];
    let saddle_defects = &saddle_report.artifacts["defects"];
    let assembly_defects = &consistency.artifacts["defects"];
    for (i, &n) in schedule.iter().enumerate() {
        table.push_row(vec![
            json!(n),
            json!(spacings[i]),
            json!(damped_defects[i]),
            json!(saddle_defects[i]),
            json!(assembly_defects[i]),
        ]);
    }
    out.tables.insert("commutator_convergence".to_string(), table);
    out.checks.push(damped);
    out.checks.push(saddle_report);
    out.checks.push(vanishing);
    out.checks.push(consistency);

    let grid = grid_of(cfg)?;
    let strong = timed(out, "undamping strong limit", || {
        check_strong_limit(&grid, m, &UNDAMPING_SCHEDULE, UNDAMPING_RATIO)
    })?;
    let mut sl_table = Table::new(&["damping_rate", "defect"]);
    for (rate, defect) in strong.artifacts["damping_rates"]
        .iter()
        .zip(&strong.artifacts["defects"])
    {
        sl_table.push_row(vec![json!(rate), json!(defect)]);
    }
    out.tables.insert("strong_limit".to_string(), sl_table);
    out.checks.push(strong);

    let form = timed(out, "quadratic form bound", || {
        check_form_bound(&grid, m, FORM_BOUND_TRIALS, cfg.seed)
    })?;
    out.checks.push(form);
    Ok(())
}

fn bracketing(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), String> {
    let schedule = cfg.resolution_schedule.clone();
    let report = timed(out, "bracketing", || {
        bracketing_test(cfg.half_lengths[0], cfg.cut_scales[0], &schedule, cfg.seed)
    })?;
    let mut table = Table::new(&[
        "points_per_axis",
        "spacing",
        "full_ground_value",
        "partitioned_ground_value",
        "margin",
    ]);
    for (i, &n) in schedule.iter().enumerate() {
        table.push_row(vec![
            json!(n),
            json!(report.artifacts["spacings"][i]),
            json!(report.artifacts["full_ground_values"][i]),
            json!(report.artifacts["partitioned_ground_values"][i]),
            json!(report.artifacts["margins"][i]),
        ]);
    }
    out.tables.insert("bracketing".to_string(), table);
    out.checks.push(report);
    Ok(())
}

const REGION_NAMES: [&str; 4] = ["I", "II", "III", "IV"];

fn region_scan(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), String> {
    let n = cfg.points_per_axis;
    let m_list = cfg.cut_scales.clone();
    let (reports, fit) = timed(out, "regional scan", || {
        region_positivity_scan(cfg.half_lengths[0], &m_list, n, n / 2, cfg.seed)
    })?;

    // Per-scale reports come first, the summary report last.
    let per_scale = &reports[..reports.len() - 1];
    let summary = &reports[reports.len() - 1];

    let mut scan_table = if cfg.region == "all" {
        Table::new(&["cut_scale", "region", "ground_value", "residual", "boundary_fraction"])
    } else {
        Table::new(&["cut_scale", "ground_value", "residual", "implied_constant"])
    };
    for (report, &m) in per_scale.iter().zip(&m_list) {
        let lambdas = &report.artifacts["ground_values"];
        let residuals = &report.artifacts["residuals"];
        let fractions = &report.artifacts["boundary_fractions"];
        if cfg.region == "all" {
            for (i, name) in REGION_NAMES.iter().enumerate() {
                scan_table.push_row(vec![
                    json!(m),
                    json!(name),
                    json!(lambdas[i]),
                    json!(residuals[i]),
                    json!(fractions[i]),
                ]);
            }
        } else {
            let i = REGION_NAMES
                .iter()
                .position(|r| *r == cfg.region)
                .expect("validated region");
            scan_table.push_row(vec![
                json!(m),
                json!(lambdas[i]),
                json!(residuals[i]),
                json!((m - lambdas[i]) * m * m),
            ]);
        }
    }
    out.tables.insert("regional_scan".to_string(), scan_table);

    let mut strip_table = Table::new(&[
        "cut_scale",
        "strip_ground_value",
        "implied_constant",
        "bound_margin",
    ]);
    let strip_values = &summary.artifacts["strip_ground_values"];
    let margins = &summary.artifacts["strip_bound_margins"];
    for (i, &m) in m_list.iter().enumerate() {
        strip_table.push_row(vec![
            json!(m),
            json!(strip_values[i]),
            json!((m - strip_values[i]) * m * m),
            json!(margins[i]),
        ]);
    }
    out.tables.insert("strip_bound".to_string(), strip_table);

    let mut fit_table = Table::new(&["fitted_constant", "bound_form"]);
    fit_table.push_row(vec![json!(fit.fitted_constant), json!(fit.bound_form)]);
    out.tables.insert("bound_fit".to_string(), fit_table);

    out.checks.extend(reports);
    Ok(())
}

fn oscillator_bound(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), String> {
    let n = cfg.points_per_axis;
    let a_list = cfg.oscillator_half_lengths.clone();
    let (report, fit) = timed(out, "oscillator bound", || {
        neumann_oscillator_bound(&a_list, n / 2, n, cfg.seed)
    })?;

    let mut table = Table::new(&["half_length", "ground_value", "deficit", "implied_constant"]);
    for (i, &a) in a_list.iter().enumerate() {
        let deficit = report.artifacts["deficits"][i];
        table.push_row(vec![
            json!(a),
            json!(report.artifacts["ground_values"][i]),
            json!(deficit),
            json!(deficit * a * a),
        ]);
    }
    out.tables.insert("oscillator_deficits".to_string(), table);

    let mut scaled = Table::new(&["slope", "ground_value", "floor"]);
    for (i, w) in report.artifacts["scaled_slopes"].iter().enumerate() {
        scaled.push_row(vec![
            json!(w),
            json!(report.artifacts["scaled_ground_values"][i]),
            json!(report.artifacts["scaled_floors"][i]),
        ]);
    }
    out.tables.insert("scaled_consequence".to_string(), scaled);

    let mut fit_table = Table::new(&["fitted_constant", "bound_form"]);
    fit_table.push_row(vec![json!(fit.fitted_constant), json!(fit.bound_form)]);
    out.tables.insert("bound_fit".to_string(), fit_table);

    out.checks.push(report);
    Ok(())
}

fn zero_mode_scan(cfg: &RunConfig, out: &mut RunOutput) -> Result<(), String> {
    let scan = timed(out, "zero-mode scan", || {
        zero_mode_search(
            &cfg.half_lengths,
            cfg.spacing,
            cfg.modes,
            cfg.tol,
            cfg.seed,
        )
    })?;

    let mut table = Table::new(&[
        "half_length",
        "points_per_axis",
        "ground_value",
        "residual",
        "delocalization_fraction",
        "half_box_fraction",
        "scalar_ground_value",
        "high_frequency_fraction",
        "iterations",
    ]);
    for row in &scan.rows {
        table.push_row(vec![
            json!(row.half_length),
            json!(row.points_per_axis),
            json!(row.eigenvalues[0]),
            json!(row.residuals[0]),
            json!(row.delocalization_fraction),
            json!(row.half_box_fraction),
            json!(row.scalar_ground),
            json!(row.high_frequency_fraction),
            json!(row.iterations),
        ]);
    }
    out.tables.insert("zero_mode_rows".to_string(), table);
    out.checks.extend(scan.reports);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_config(command: &str) -> RunConfig {
        let mut cfg = RunConfig::defaults(command).unwrap();
        cfg.half_lengths = vec![2.0];
        cfg.points_per_axis = 16;
        cfg.modes = 2;
        cfg
    }

    #[test]
    fn spectrum_produces_table_and_certificate() {
        let (out, err) = execute(&quick_config("spectrum"));
        assert!(err.is_none(), "{err:?}");
        assert_eq!(out.checks.len(), 1);
        assert!(out.checks[0].passed);
        assert_eq!(out.tables["spectrum"].rows.len(), 2);
        assert!(out.timings.contains_key("total"));
    }

    #[test]
    fn algebra_command_reports_three_checks() {
        let (out, err) = execute(&quick_config("verify-algebra"));
        assert!(err.is_none(), "{err:?}");
        assert_eq!(out.checks.len(), 3);
        assert!(out.checks.iter().all(|c| c.passed));
        assert!(!out.tables["identity_defects"].rows.is_empty());
    }

    #[test]
    fn runtime_errors_keep_partial_output() {
        let mut cfg = quick_config("region-scan");
        // Cut scale incommensurate with the spacing: the scan rejects
        // the geometry after the output scaffold exists.
        cfg.points_per_axis = 16;
        cfg.cut_scales = vec![0.3];
        let (out, err) = execute(&cfg);
        assert!(err.is_some());
        assert!(out.timings.contains_key("total"));
    }
}
