//! Run configuration with a three-layer precedence model.
//!
//! Every run resolves its configuration as
//!
//! ```text
//! per-command defaults  <  config file (globals, then [command] section)  <  flags
//! ```
//!
//! and the effective values are echoed verbatim into the report, along
//! with a record of every key where a flag overrode a file value. The
//! canonical textual form is `key = value` pairs with optional
//! per-command sections; [`emit`] writes it and [`parse`] reads it back,
//! and `parse(emit(c)) == c` holds for every valid configuration.

use std::collections::BTreeMap;
use std::fmt;

/// The seven run modes of the binary.
pub const COMMANDS: [&str; 7] = [
    "spectrum",
    "verify-algebra",
    "verify-identity",
    "bracketing",
    "region-scan",
    "oscillator-bound",
    "zero-mode-scan",
];

/// Fully resolved configuration of one run. Field names follow the
/// library's vocabulary; the config-file / flag keys are the short
/// forms noted on each field.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct RunConfig {
    /// Which run mode executes (`command`).
    pub command: String,
    /// Box half-lengths `L`; single-grid commands take exactly one,
    /// the zero-mode scan takes an ascending list.
    pub half_lengths: Vec<f64>,
    /// Points per axis `n` of the primary (fine) grid.
    pub points_per_axis: usize,
    /// Boundary condition `bc`: `dirichlet` or `neumann`.
    pub boundary: String,
    /// Cutoff cut scales `M`; most commands take one, the region scan
    /// an ascending list.
    pub cut_scales: Vec<f64>,
    /// Damping rate `eps` of the crossover cutoff.
    pub damping: f64,
    /// Number of requested eigenpairs `k`.
    pub modes: usize,
    /// Residual / defect tolerance `tol`.
    pub tol: f64,
    /// Seed `seed`; every random draw in a run flows from it.
    pub seed: u64,
    /// Report path `output`; a format-derived default applies when absent.
    pub output: Option<String>,
    /// Report format `format`: `json` (full report) or `csv` (tables).
    pub format: String,
    /// Ascending grid-refinement schedule `schedule` (points per axis).
    pub resolution_schedule: Vec<usize>,
    /// Oscillator chain half-lengths `a` (ascending).
    pub oscillator_half_lengths: Vec<f64>,
    /// Grid spacing `spacing` for the fixed-spacing box scan.
    pub spacing: f64,
    /// Region selector `region` for scan tables: `I` … `IV` or `all`.
    pub region: String,
}

/// A key where both the config file and a flag supplied a value; the
/// flag won and both readings are kept for the report.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct OverrideRecord {
    pub key: String,
    pub file_value: String,
    pub flag_value: String,
}

/// Configuration error; the message always names the offending key.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

impl RunConfig {
    /// Built-in defaults for one command. Shared knobs (tolerance 1e-8,
    /// seed 42, JSON output) are identical everywhere; geometry defaults
    /// pick the documented working geometry of each check.
    pub fn defaults(command: &str) -> Result<RunConfig, ConfigError> {
        if !COMMANDS.contains(&command) {
            return Err(err(format!(
                "unknown command `{command}`; expected one of {COMMANDS:?}"
            )));
        }
        let mut cfg = RunConfig {
            command: command.to_string(),
            half_lengths: vec![6.0],
            points_per_axis: 64,
            boundary: "dirichlet".to_string(),
            cut_scales: vec![2.0],
            damping: 0.1,
            modes: 4,
            tol: 1e-8,
            seed: 42,
            output: None,
            format: "json".to_string(),
            resolution_schedule: vec![24, 48, 96],
            oscillator_half_lengths: vec![1.0, 2.0, 4.0, 8.0, 16.0],
            spacing: 0.125,
            region: "all".to_string(),
        };
        match command {
            "verify-algebra" => {
                cfg.half_lengths = vec![4.0];
            }
            "verify-identity" => {
                cfg.points_per_axis = 48;
            }
            "bracketing" => {
                cfg.half_lengths = vec![4.0];
                cfg.resolution_schedule = vec![16, 32, 64];
            }
            "region-scan" => {
                cfg.points_per_axis = 96;
                cfg.cut_scales = vec![1.0, 1.5, 2.0, 3.0, 4.0];
            }
            "oscillator-bound" => {
                cfg.points_per_axis = 1024;
            }
            "zero-mode-scan" => {
                cfg.half_lengths = vec![4.0, 6.0, 8.0];
                cfg.modes = 2;
            }
            _ => {}
        }
        Ok(cfg)
    }
}

/// One layer of partial configuration (from a file or from flags),
/// with each supplied key also kept in rendered form for override
/// reporting.
#[derive(Debug, Default, Clone)]
pub struct Patch {
    pub half_lengths: Option<Vec<f64>>,
    pub points_per_axis: Option<usize>,
    pub boundary: Option<String>,
    pub cut_scales: Option<Vec<f64>>,
    pub damping: Option<f64>,
    pub modes: Option<usize>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub output: Option<String>,
    pub format: Option<String>,
    pub resolution_schedule: Option<Vec<usize>>,
    pub oscillator_half_lengths: Option<Vec<f64>>,
    pub spacing: Option<f64>,
    pub region: Option<String>,
    /// `key -> rendered value` for every key this layer supplied.
    pub rendered: BTreeMap<String, String>,
}

impl Patch {
    fn set_key(&mut self, key: &str, value: &toml::Value) -> Result<(), ConfigError> {
        match key {
            "L" => {
                self.half_lengths = Some(f64_list(key, value)?);
                self.rendered.insert(key.into(), fmt_f64_list(self.half_lengths.as_ref().unwrap()));
            }
            "n" => {
                self.points_per_axis = Some(usize_scalar(key, value)?);
                self.rendered.insert(key.into(), self.points_per_axis.unwrap().to_string());
            }
            "bc" => {
                self.boundary = Some(string_scalar(key, value)?.to_lowercase());
                self.rendered.insert(key.into(), self.boundary.clone().unwrap());
            }
            "M" => {
                self.cut_scales = Some(f64_list(key, value)?);
                self.rendered.insert(key.into(), fmt_f64_list(self.cut_scales.as_ref().unwrap()));
            }
            "eps" => {
                self.damping = Some(f64_scalar(key, value)?);
                self.rendered.insert(key.into(), fmt_f64(self.damping.unwrap()));
            }
            "k" => {
                self.modes = Some(usize_scalar(key, value)?);
                self.rendered.insert(key.into(), self.modes.unwrap().to_string());
            }
            "tol" => {
                self.tol = Some(f64_scalar(key, value)?);
                self.rendered.insert(key.into(), fmt_f64(self.tol.unwrap()));
            }
            "seed" => {
                self.seed = Some(u64_scalar(key, value)?);
                self.rendered.insert(key.into(), self.seed.unwrap().to_string());
            }
            "output" => {
                self.output = Some(string_scalar(key, value)?);
                self.rendered.insert(key.into(), self.output.clone().unwrap());
            }
            "format" => {
                self.format = Some(string_scalar(key, value)?.to_lowercase());
                self.rendered.insert(key.into(), self.format.clone().unwrap());
            }
            "schedule" => {
                self.resolution_schedule = Some(usize_list(key, value)?);
                let r = self
                    .resolution_schedule
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(", ");
                self.rendered.insert(key.into(), format!("[{r}]"));
            }
            "a" => {
                self.oscillator_half_lengths = Some(f64_list(key, value)?);
                self.rendered
                    .insert(key.into(), fmt_f64_list(self.oscillator_half_lengths.as_ref().unwrap()));
            }
            "spacing" => {
                self.spacing = Some(f64_scalar(key, value)?);
                self.rendered.insert(key.into(), fmt_f64(self.spacing.unwrap()));
            }
            "region" => {
                let raw = string_scalar(key, value)?;
                let norm = if raw.eq_ignore_ascii_case("all") {
                    "all".to_string()
                } else {
                    raw.to_uppercase()
                };
                self.region = Some(norm);
                self.rendered.insert(key.into(), self.region.clone().unwrap());
            }
            other => {
                return Err(err(format!(
                    "unknown configuration key `{other}`; known keys: L, n, bc, M, eps, k, tol, seed, output, format, schedule, a, spacing, region"
                )));
            }
        }
        Ok(())
    }

    /// Applies this layer on top of `cfg`.
    fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = &self.half_lengths {
            cfg.half_lengths = v.clone();
        }
        if let Some(v) = self.points_per_axis {
            cfg.points_per_axis = v;
        }
        if let Some(v) = &self.boundary {
            cfg.boundary = v.clone();
        }
        if let Some(v) = &self.cut_scales {
            cfg.cut_scales = v.clone();
        }
        if let Some(v) = self.damping {
            cfg.damping = v;
        }
        if let Some(v) = self.modes {
            cfg.modes = v;
        }
        if let Some(v) = self.tol {
            cfg.tol = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = &self.output {
            cfg.output = Some(v.clone());
        }
        if let Some(v) = &self.format {
            cfg.format = v.clone();
        }
        if let Some(v) = &self.resolution_schedule {
            cfg.resolution_schedule = v.clone();
        }
        if let Some(v) = &self.oscillator_half_lengths {
            cfg.oscillator_half_lengths = v.clone();
        }
        if let Some(v) = self.spacing {
            cfg.spacing = v;
        }
        if let Some(v) = &self.region {
            cfg.region = v.clone();
        }
    }
}

/// Parses the config-file text for a given command: global keys first,
/// then the matching `[command]` section. Returns the file's patch and
/// the command the file names, if any.
pub fn file_patch(text: &str, command: &str) -> Result<(Patch, Option<String>), ConfigError> {
    let table: toml::Table =
        toml::from_str(text).map_err(|e| err(format!("config file is not valid key = value text: {e}")))?;
    let mut patch = Patch::default();
    let mut file_command = None;
    // Globals first so section values take precedence within the file.
    for (key, value) in &table {
        match value {
            toml::Value::Table(_) => {
                if !COMMANDS.contains(&key.as_str()) {
                    return Err(err(format!(
                        "unknown section [{key}] in config file; sections must name a command: {COMMANDS:?}"
                    )));
                }
            }
            _ if key == "command" => {
                file_command = Some(string_scalar(key, value)?);
            }
            _ => patch.set_key(key, value)?,
        }
    }
    if let Some(toml::Value::Table(section)) = table.get(command) {
        for (key, value) in section {
            patch.set_key(key, value)?;
        }
    }
    Ok((patch, file_command))
}

/// Resolution result: effective config plus the override audit trail.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub config: RunConfig,
    pub overrides: Vec<OverrideRecord>,
}

/// Builds the effective configuration: defaults for `command`, the file
/// layer (if any), then the flag layer, recording keys where the flag
/// displaced a file value.
pub fn resolve(
    command: &str,
    file: Option<&Patch>,
    flags: &Patch,
) -> Result<Resolved, ConfigError> {
    let mut cfg = RunConfig::defaults(command)?;
    if let Some(f) = file {
        f.apply(&mut cfg);
    }
    flags.apply(&mut cfg);
    let mut overrides = Vec::new();
    if let Some(f) = file {
        for (key, file_value) in &f.rendered {
            if let Some(flag_value) = flags.rendered.get(key) {
                overrides.push(OverrideRecord {
                    key: key.clone(),
                    file_value: file_value.clone(),
                    flag_value: flag_value.clone(),
                });
            }
        }
    }
    validate(&cfg)?;
    Ok(Resolved { config: cfg, overrides })
}

/// Checks every cross-field requirement, naming the offending key.
pub fn validate(cfg: &RunConfig) -> Result<(), ConfigError> {
    let n = cfg.points_per_axis;
    if n < 4 || n % 2 != 0 {
        return Err(err(format!(
            "n = {n}: points per axis must be an even number >= 4 (cell-centered grids pair nodes symmetrically across each axis, so no node sits on a coordinate axis)"
        )));
    }
    if !(cfg.tol > 0.0) {
        return Err(err(format!("tol = {}: tolerance must be positive", cfg.tol)));
    }
    if cfg.modes == 0 {
        return Err(err("k = 0: at least one eigenpair must be requested"));
    }
    if !(cfg.spacing > 0.0) {
        return Err(err(format!("spacing = {}: grid spacing must be positive", cfg.spacing)));
    }
    if cfg.boundary != "dirichlet" && cfg.boundary != "neumann" {
        return Err(err(format!(
            "bc = {}: boundary condition must be `dirichlet` or `neumann`",
            cfg.boundary
        )));
    }
    if cfg.format != "json" && cfg.format != "csv" {
        return Err(err(format!("format = {}: report format must be `json` or `csv`", cfg.format)));
    }
    if !matches!(cfg.region.as_str(), "I" | "II" | "III" | "IV" | "all") {
        return Err(err(format!(
            "region = {}: region selector must be I, II, III, IV or all",
            cfg.region
        )));
    }
    if cfg.half_lengths.is_empty()
        || cfg.half_lengths.iter().any(|&l| !(l > 0.0))
        || cfg.half_lengths.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(err(format!(
            "L = {:?}: half-lengths must be positive and strictly increasing",
            cfg.half_lengths
        )));
    }
    if cfg.cut_scales.is_empty()
        || cfg.cut_scales.iter().any(|&m| !(m > 0.0))
        || cfg.cut_scales.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(err(format!(
            "M = {:?}: cut scales must be positive and strictly increasing",
            cfg.cut_scales
        )));
    }
    if cfg.resolution_schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(err(format!(
            "schedule = {:?}: the refinement schedule must be strictly increasing",
            cfg.resolution_schedule
        )));
    }
    for &m in &cfg.resolution_schedule {
        if m < 4 || m % 2 != 0 {
            return Err(err(format!(
                "schedule entry {m}: every point count must be an even number >= 4"
            )));
        }
    }
    if cfg.oscillator_half_lengths.is_empty()
        || cfg.oscillator_half_lengths.iter().any(|&a| !(a > 0.0))
        || cfg.oscillator_half_lengths.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(err(format!(
            "a = {:?}: oscillator half-lengths must be positive and strictly increasing",
            cfg.oscillator_half_lengths
        )));
    }

    let single_l = matches!(
        cfg.command.as_str(),
        "spectrum" | "verify-algebra" | "verify-identity" | "bracketing" | "region-scan" | "oscillator-bound"
    );
    if single_l && cfg.half_lengths.len() != 1 {
        return Err(err(format!(
            "L = {:?}: `{}` works on a single box; pass one half-length",
            cfg.half_lengths, cfg.command
        )));
    }
    match cfg.command.as_str() {
        "verify-identity" | "bracketing" => {
            if cfg.cut_scales.len() != 1 {
                return Err(err(format!(
                    "M = {:?}: `{}` takes a single cut scale",
                    cfg.cut_scales, cfg.command
                )));
            }
            let min_len = if cfg.command == "bracketing" { 3 } else { 2 };
            if cfg.resolution_schedule.len() < min_len {
                return Err(err(format!(
                    "schedule = {:?}: `{}` needs at least {min_len} ascending resolutions",
                    cfg.resolution_schedule, cfg.command
                )));
            }
        }
        "region-scan" | "oscillator-bound" => {
            if n % 4 != 0 {
                return Err(err(format!(
                    "n = {n}: `{}` compares against the half-resolution grid n/2, so n must be divisible by 4",
                    cfg.command
                )));
            }
        }
        "zero-mode-scan" => {
            if cfg.half_lengths.len() < 2 {
                return Err(err(format!(
                    "L = {:?}: `zero-mode-scan` needs at least two ascending box half-lengths",
                    cfg.half_lengths
                )));
            }
        }
        _ => {}
    }
    Ok(())
}

/// Renders the effective configuration in the canonical `key = value`
/// file form. Every field is written explicitly, so the text is a
/// complete, replayable record of the run.
pub fn emit(cfg: &RunConfig) -> String {
    let mut out = String::new();
    let push = |out: &mut String, k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    push(&mut out, "command", format!("{:?}", cfg.command));
    push(&mut out, "L", fmt_f64_list(&cfg.half_lengths));
    push(&mut out, "n", cfg.points_per_axis.to_string());
    push(&mut out, "bc", format!("{:?}", cfg.boundary));
    push(&mut out, "M", fmt_f64_list(&cfg.cut_scales));
    push(&mut out, "eps", fmt_f64(cfg.damping));
    push(&mut out, "k", cfg.modes.to_string());
    push(&mut out, "tol", fmt_f64(cfg.tol));
    push(&mut out, "seed", cfg.seed.to_string());
    if let Some(path) = &cfg.output {
        push(&mut out, "output", format!("{path:?}"));
    }
    push(&mut out, "format", format!("{:?}", cfg.format));
    let sched = cfg
        .resolution_schedule
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join(", ");
    push(&mut out, "schedule", format!("[{sched}]"));
    push(&mut out, "a", fmt_f64_list(&cfg.oscillator_half_lengths));
    push(&mut out, "spacing", fmt_f64(cfg.spacing));
    push(&mut out, "region", format!("{:?}", cfg.region));
    out
}

/// Reads a complete configuration back from its canonical text form.
/// The text must carry a `command` key; `parse(emit(c)) == c`.
///
/// The binary replays emitted configs through `--config` (which routes
/// the same machinery via [`file_patch`]); this direct entry point
/// states the round-trip invariant and is exercised by the tests.
#[cfg_attr(not(test), allow(dead_code))]
pub fn parse(text: &str) -> Result<RunConfig, ConfigError> {
    let table: toml::Table =
        toml::from_str(text).map_err(|e| err(format!("not valid key = value text: {e}")))?;
    let command = match table.get("command") {
        Some(v) => string_scalar("command", v)?,
        None => return Err(err("missing `command` key")),
    };
    let (patch, _) = file_patch(text, &command)?;
    let mut cfg = RunConfig::defaults(&command)?;
    patch.apply(&mut cfg);
    validate(&cfg)?;
    Ok(cfg)
}

/// Shortest decimal rendering that TOML and `str::parse` both read back
/// to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Renders a numeric list in the canonical bracketed form.
pub fn fmt_f64_list(xs: &[f64]) -> String {
    let body = xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(", ");
    format!("[{body}]")
}

fn f64_scalar(key: &str, v: &toml::Value) -> Result<f64, ConfigError> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        other => Err(err(format!("{key} = {other}: expected a number"))),
    }
}

fn usize_scalar(key: &str, v: &toml::Value) -> Result<usize, ConfigError> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        other => Err(err(format!("{key} = {other}: expected a non-negative integer"))),
    }
}

fn u64_scalar(key: &str, v: &toml::Value) -> Result<u64, ConfigError> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        other => Err(err(format!("{key} = {other}: expected a non-negative integer"))),
    }
}

fn string_scalar(key: &str, v: &toml::Value) -> Result<String, ConfigError> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        other => Err(err(format!("{key} = {other}: expected a quoted string"))),
    }
}

fn f64_list(key: &str, v: &toml::Value) -> Result<Vec<f64>, ConfigError> {
    match v {
        toml::Value::Array(items) => items.iter().map(|x| f64_scalar(key, x)).collect(),
        scalar => Ok(vec![f64_scalar(key, scalar)?]),
    }
}

fn usize_list(key: &str, v: &toml::Value) -> Result<Vec<usize>, ConfigError> {
    match v {
        toml::Value::Array(items) => items.iter().map(|x| usize_scalar(key, x)).collect(),
        scalar => Ok(vec![usize_scalar(key, scalar)?]),
    }
}

/// Parses a comma-separated numeric list from a flag value.
pub fn flag_f64_list(key: &str, raw: &str) -> Result<Vec<f64>, ConfigError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| err(format!("{key} = {raw}: `{s}` is not a number")))
        })
        .collect()
}

/// Parses a comma-separated integer list from a flag value.
pub fn flag_usize_list(key: &str, raw: &str) -> Result<Vec<usize>, ConfigError> {
    raw.split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| err(format!("{key} = {raw}: `{s}` is not a non-negative integer")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emit_then_parse_is_the_identity() {
        let mut cfg = RunConfig::defaults("region-scan").unwrap();
        cfg.half_lengths = vec![8.0];
        cfg.points_per_axis = 128;
        cfg.cut_scales = vec![0.5, 1.25, 2.0];
        cfg.tol = 3.5e-9;
        cfg.seed = 7;
        cfg.output = Some("out/report.json".to_string());
        cfg.format = "csv".to_string();
        cfg.region = "II".to_string();
        let text = emit(&cfg);
        let back = parse(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn round_trip_preserves_every_command_default() {
        for command in COMMANDS {
            let cfg = RunConfig::defaults(command).unwrap();
            assert_eq!(parse(&emit(&cfg)).unwrap(), cfg, "command {command}");
        }
    }

    #[test]
    fn file_sections_apply_only_to_the_named_command() {
        let text = "n = 32\nk = 1\n\n[spectrum]\nk = 6\n";
        let (patch, _) = file_patch(text, "spectrum").unwrap();
        let resolved = resolve("spectrum", Some(&patch), &Patch::default()).unwrap();
        assert_eq!(resolved.config.points_per_axis, 32);
        assert_eq!(resolved.config.modes, 6);

        let (patch, _) = file_patch(text, "bracketing").unwrap();
        let resolved = resolve("bracketing", Some(&patch), &Patch::default()).unwrap();
        assert_eq!(resolved.config.modes, 1);
    }

    #[test]
    fn flags_override_file_values_and_the_report_records_both() {
        let (file, _) = file_patch("seed = 5\ntol = 1e-10\n", "spectrum").unwrap();
        let mut flags = Patch::default();
        flags
            .set_key("seed", &toml::Value::Integer(9))
            .unwrap();
        let resolved = resolve("spectrum", Some(&file), &flags).unwrap();
        assert_eq!(resolved.config.seed, 9);
        assert_eq!(resolved.config.tol, 1e-10);
        assert_eq!(resolved.overrides.len(), 1);
        assert_eq!(resolved.overrides[0].key, "seed");
        assert_eq!(resolved.overrides[0].file_value, "5");
        assert_eq!(resolved.overrides[0].flag_value, "9");
    }

    #[test]
    fn unknown_keys_and_sections_are_named() {
        let e = file_patch("wavelength = 3\n", "spectrum").unwrap_err();
        assert!(e.0.contains("wavelength"), "{e}");
        let e = file_patch("[supersymmetry]\nn = 4\n", "spectrum").unwrap_err();
        assert!(e.0.contains("supersymmetry"), "{e}");
    }

    #[test]
    fn validation_names_the_offending_key() {
        let mut cfg = RunConfig::defaults("spectrum").unwrap();
        cfg.points_per_axis = 97;
        let e = validate(&cfg).unwrap_err();
        assert!(e.0.contains("n = 97") && e.0.contains("even"), "{e}");

        let mut cfg = RunConfig::defaults("zero-mode-scan").unwrap();
        cfg.half_lengths = vec![4.0];
        let e = validate(&cfg).unwrap_err();
        assert!(e.0.contains("zero-mode-scan") && e.0.contains("two"), "{e}");

        let mut cfg = RunConfig::defaults("region-scan").unwrap();
        cfg.points_per_axis = 90;
        let e = validate(&cfg).unwrap_err();
        assert!(e.0.contains("divisible by 4"), "{e}");
    }

    #[test]
    fn flag_lists_parse_single_values_and_commas() {
        assert_eq!(flag_f64_list("L", "6").unwrap(), vec![6.0]);
        assert_eq!(flag_f64_list("M", "1,1.5, 2").unwrap(), vec![1.0, 1.5, 2.0]);
        assert!(flag_f64_list("M", "1,x").unwrap_err().0.contains("x"));
        assert_eq!(flag_usize_list("schedule", "16,32,64").unwrap(), vec![16, 32, 64]);
    }
}
