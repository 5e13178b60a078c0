//! The `polgate` command line.
//!
//! Exit codes: 0 on success, 1 when an audit finds the assignment insecure, 2 on any input
//! error. Errors are written to stderr as `{"error": {"kind", "field", "message"}}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::adversary::AttackKind;
use crate::analysis::{attack_rates, honest_rates};
use crate::detectors::{
    attack_energy_window, check_conditions_ab, p_max_trigger, AuditReport, DetectorRole,
    DetectorSet, GateVariant, GeigerParams, ThresholdData, BLINDING_GRID_MW, DETECTOR_NAMES,
};
use crate::error::{Error, Result};
use crate::qmath::{overlap_bounds, sample_overlap_extremes, JonesVector, PolarizationState};
use crate::report::{sig9, to_json_string, RatesReport, SCHEMA_VERSION};
use crate::simengine::{
    run, sweep, write_sweep_csv, Mode, Scenario, SimResult, SweepParameter, SweepRow,
};

#[derive(Debug, Parser)]
#[command(
    name = "polgate",
    version,
    about = "Polarization-randomized QKD receiver: simulation, rates and detector audits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a Monte Carlo scenario and write its SimResult.
    Simulate(RunArgs),
    /// Run a scenario once per value of one parameter and write a table.
    Sweep(SweepArgs),
    /// Evaluate the closed-form rates of a scenario.
    Rates(RatesArgs),
    /// Check a detector assignment against the 1:2 operational ratio.
    Audit(AuditArgs),
    /// Largest and smallest alert-path fraction for given trigger purities.
    Pmax(PmaxArgs),
    /// Trigger-energy conditions for a traceless blinding attack.
    Bounds(BoundsArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (.toml or .json).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub rounds: Option<u64>,
    /// Hold Bob's randomizer at its bench setting.
    #[arg(long)]
    pub fixed_u: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Overrides the config's `sweep.parameter`.
    #[arg(long)]
    pub parameter: Option<String>,
    /// Comma-separated grid; overrides the config's sweep values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Replace the attack kind of the scenario.
    #[arg(long, value_enum)]
    pub attack: Option<AttackArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub fixed_u: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackArg {
    InterceptResend,
    Quantum,
    Blinding,
    WavelengthBlinding,
    Integrated,
}

impl From<AttackArg> for AttackKind {
    fn from(a: AttackArg) -> Self {
        match a {
            AttackArg::InterceptResend => AttackKind::InterceptResend,
            AttackArg::Quantum => AttackKind::Quantum,
            AttackArg::Blinding => AttackKind::Blinding,
            AttackArg::WavelengthBlinding => AttackKind::WavelengthBlinding,
            AttackArg::Integrated => AttackKind::Integrated,
        }
    }
}

#[derive(Debug, Args)]
pub struct GateArgs {
    /// Use only the gated threshold curves.
    #[arg(long, overrides_with = "no_gate")]
    pub gate: bool,
    /// Use only the ungated threshold curves.
    #[arg(long, overrides_with = "gate")]
    pub no_gate: bool,
}

impl GateArgs {
    fn variants(&self) -> Vec<GateVariant> {
        match (self.gate, self.no_gate) {
            (true, _) => vec![GateVariant::Gated],
            (_, true) => vec![GateVariant::Ungated],
            _ => GateVariant::BOTH.to_vec(),
        }
    }
}

/// Audit inputs that can also be given in a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditConfig {
    pub alert: Option<PathBuf>,
    pub secure: Option<PathBuf>,
    pub powers_mw: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    /// File with `alert`, `secure` and optionally `powers_mw`.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Threshold CSV of the detector type on the alert path.
    #[arg(long)]
    pub alert: Option<PathBuf>,
    /// Threshold CSV of the detector type on the secure path.
    #[arg(long)]
    pub secure: Option<PathBuf>,
    /// Total blinding powers in mW, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub powers: Option<Vec<f64>>,
    #[command(flatten)]
    pub gate: GateArgs,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PmaxArgs {
    /// Trigger purities, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 0.78, 0.63, 0.53, 0.5])]
    pub purity: Vec<f64>,
    /// Haar draws for an empirical check; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub alert: PathBuf,
    #[arg(long)]
    pub secure: PathBuf,
    /// Trigger purity.
    #[arg(long, default_value_t = 1.0)]
    pub purity: f64,
    /// Trigger pulse energy, pJ.
    #[arg(long)]
    pub e_t: f64,
    /// Total blinding power, mW.
    #[arg(long)]
    pub i_b: f64,
    #[command(flatten)]
    pub gate: GateArgs,
    #[command(flatten)]
    pub output: Output,
}

/// Parses `args`, runs the command and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return 0;
            }
            let obj = json!({"error": {"kind": "usage", "field": null, "message": e.kind().to_string(), "detail": e.to_string()}});
            eprintln!("{obj}");
            return 2;
        }
    };
    match execute(&cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            2
        }
    }
}

pub fn main() -> i32 {
    run_cli(std::env::args_os())
}

/// The machine-readable error object printed on stderr.
pub fn error_json(e: &Error) -> serde_json::Value {
    let (field, row) = match e {
        Error::Config { field, .. } => (Some(field.clone()), None),
        Error::Schema {
            source_name, row, ..
        } => (Some(source_name.clone()), Some(*row)),
        Error::Domain { what, .. } => (Some(what.to_string()), None),
        Error::UnknownParameter(p) => (Some(p.clone()), None),
        Error::Io { path, .. } => (Some(path.display().to_string()), None),
        _ => (None, None),
    };
    let mut inner = json!({"kind": e.kind(), "field": field, "message": e.to_string()});
    if let Some(r) = row {
        inner["row"] = json!(r);
    }
    json!({ "error": inner })
}

fn execute(cmd: &Command) -> Result<i32> {
    match cmd {
        Command::Simulate(a) => {
            let scenario = load_run_scenario(a)?;
            let result = run(&scenario)?;
            match a.output.format.unwrap_or(Format::Json) {
                Format::Json => emit(&a.output, to_json_string(&result)?),
                Format::Csv => {
                    let rows = [SweepRow {
                        parameter: SweepParameter::Mu,
                        value: scenario.system.mu,
                        result,
                    }];
                    let mut buf = Vec::new();
                    write_sweep_csv(&rows, &mut buf)?;
                    emit(&a.output, String::from_utf8_lossy(&buf).into_owned())
                }
            }?;
            Ok(0)
        }
        Command::Sweep(a) => {
            let scenario = load_run_scenario(&a.run)?;
            let spec = scenario.sweep.clone();
            let name = a
                .parameter
                .clone()
                .or_else(|| spec.as_ref().map(|s| s.parameter.clone()))
                .ok_or_else(|| Error::config("sweep.parameter", "no sweep parameter given"))?;
            let parameter: SweepParameter = name.parse()?;
            let grid = match (&a.values, &spec) {
                (Some(v), _) => v.clone(),
                (None, Some(s)) => s.grid()?,
                (None, None) => return Err(Error::config("sweep.values", "no sweep values given")),
            };
            let rows = sweep(&scenario, parameter, &grid)?;
            match a.run.output.format.unwrap_or(Format::Csv) {
                Format::Json => emit(&a.run.output, to_json_string(&rows)?),
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_sweep_csv(&rows, &mut buf)?;
                    emit(&a.run.output, String::from_utf8_lossy(&buf).into_owned())
                }
            }?;
            Ok(0)
        }
        Command::Rates(a) => {
            let mut scenario = load_scenario(&a.config)?;
            if let Some(seed) = a.seed {
                scenario.seed = seed;
            }
            scenario.fixed_u |= a.fixed_u;
            if let Some(kind) = a.attack {
                match &mut scenario.mode {
                    Mode::Attack(cfg) => cfg.kind = kind.into(),
                    Mode::Honest => {
                        scenario.mode =
                            Mode::Attack(crate::adversary::AttackConfig::new(kind.into()));
                    }
                }
            }
            scenario.validate()?;
            let report = match &scenario.mode {
                Mode::Honest => honest_rates(&scenario.system),
                Mode::Attack(cfg) => attack_rates(
                    &scenario.system,
                    cfg,
                    &scenario.randomizer(),
                    scenario.base_dir.as_deref(),
                )?,
            };
            let out = RatesOutput {
                schema_version: SCHEMA_VERSION,
                mode: scenario.mode.label().to_string(),
                report,
            };
            match a.output.format.unwrap_or(Format::Json) {
                Format::Json => emit(&a.output, to_json_string(&out)?),
                Format::Csv => emit(&a.output, rates_csv(&out)?),
            }?;
            Ok(0)
        }
        Command::Audit(a) => {
            let cfg = match &a.config {
                Some(p) => {
                    let mut c: AuditConfig = parse_file(p)?;
                    let base = p.parent().map(Path::to_path_buf).unwrap_or_default();
                    c.alert = c.alert.map(|x| resolve(&base, x));
                    c.secure = c.secure.map(|x| resolve(&base, x));
                    c
                }
                None => AuditConfig::default(),
            };
            let alert = a
                .alert
                .clone()
                .or(cfg.alert)
                .ok_or_else(|| Error::config("alert", "no alert-path threshold file given"))?;
            let secure =
                a.secure.clone().or(cfg.secure).ok_or_else(|| {
                    Error::config("secure", "no secure-path threshold file given")
                })?;
            let powers = a
                .powers
                .clone()
                .or(cfg.powers_mw)
                .unwrap_or_else(|| BLINDING_GRID_MW.to_vec());
            let sets = detector_sets(&alert, &secure, &a.gate.variants())?;
            let report = AuditReport::new(&sets, &powers)?;
            match a.output.format.unwrap_or(Format::Json) {
                Format::Json => emit(&a.output, to_json_string(&report)?),
                Format::Csv => {
                    let mut buf = Vec::new();
                    report.write_csv(&mut buf)?;
                    emit(&a.output, String::from_utf8_lossy(&buf).into_owned())
                }
            }?;
            Ok(if report.secure { 0 } else { 1 })
        }
        Command::Pmax(a) => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let rows = a
                .purity
                .iter()
                .map(|&p| {
                    let b = overlap_bounds(p)?;
                    let sampled = (a.draws > 0).then(|| {
                        let state =
                            PolarizationState::from_bloch([0.0, 0.0, (2.0 * p - 1.0).sqrt()])?;
                        Ok::<_, Error>(sample_overlap_extremes(
                            &state,
                            &JonesVector::horizontal(),
                            a.draws,
                            &mut rng,
                        ))
                    });
                    let sampled = sampled.transpose()?;
                    Ok(PmaxRow {
                        purity: p,
                        p_max: b.max,
                        p_min: b.min,
                        sampled_max: sampled.map(|s| s.max),
                        sampled_min: sampled.map(|s| s.min),
                        draws: a.draws,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            match a.output.format.unwrap_or(Format::Json) {
                Format::Json => emit(
                    &a.output,
                    to_json_string(&json!({"schema_version": SCHEMA_VERSION, "rows": rows}))?,
                ),
                Format::Csv => {
                    let mut w = csv::Writer::from_writer(Vec::new());
                    w.write_record([
                        "schema_version",
                        "purity",
                        "p_max",
                        "p_min",
                        "sampled_max",
                        "sampled_min",
                        "draws",
                    ])?;
                    for r in &rows {
                        let opt = |x: Option<f64>| x.map(sig9).unwrap_or_default();
                        w.write_record([
                            SCHEMA_VERSION.to_string(),
                            sig9(r.purity),
                            sig9(r.p_max),
                            sig9(r.p_min),
                            opt(r.sampled_max),
                            opt(r.sampled_min),
                            r.draws.to_string(),
                        ])?;
                    }
                    let buf = w
                        .into_inner()
                        .map_err(|e| Error::io("<csv writer>", e.into_error()))?;
                    emit(&a.output, String::from_utf8_lossy(&buf).into_owned())
                }
            }?;
            Ok(0)
        }
        Command::Bounds(a) => {
            let p_max = p_max_trigger(a.purity)?;
            let sets = detector_sets(&a.alert, &a.secure, &a.gate.variants())?;
            let rows = sets
                .iter()
                .map(|set| {
                    let c = check_conditions_ab(set, a.e_t, a.purity, a.i_b)?;
                    let window = attack_energy_window(set, a.purity, a.i_b)?;
                    Ok(json!({
                        "gate": set.gate_variant().map(GateVariant::as_str),
                        "condition_a": c.a_holds,
                        "condition_b": c.b_holds,
                        "attack_possible": c.attack_possible(),
                        "energy_window_pj": window.map(|(lo, hi)| [lo, hi]),
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            let out = json!({
                "schema_version": SCHEMA_VERSION,
                "purity": a.purity,
                "p_max": p_max,
                "e_t_pj": a.e_t,
                "i_b_mw": a.i_b,
                "variants": rows,
            });
            emit(&a.output, to_json_string(&out)?)?;
            Ok(0)
        }
    }
}

#[derive(Debug, Serialize)]
struct PmaxRow {
    purity: f64,
    p_max: f64,
    p_min: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled_min: Option<f64>,
    draws: usize,
}

/// Analytic report as written by `polgate rates`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatesOutput {
    pub schema_version: u32,
    pub mode: String,
    #[serde(flatten)]
    pub report: RatesReport,
}

fn rates_csv(out: &RatesOutput) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![
        "schema_version",
        "mode",
        "alert_rate",
        "sifted_rate",
        "qber",
    ];
    let det: Vec<String> = DETECTOR_NAMES.iter().map(|d| format!("p_{d}")).collect();
    header.extend(det.iter().map(String::as_str));
    w.write_record(&header)?;
    let r = &out.report;
    let mut rec = vec![
        out.schema_version.to_string(),
        out.mode.clone(),
        sig9(r.alert_rate),
        sig9(r.sifted_rate),
        sig9(r.qber),
    ];
    rec.extend(r.detector_click_probs.iter().map(|&p| sig9(p)));
    w.write_record(&rec)?;
    let buf = w
        .into_inner()
        .map_err(|e| Error::io("<csv writer>", e.into_error()))?;
    Ok(String::from_utf8_lossy(&buf).into_owned())
}

fn detector_sets(
    alert: &Path,
    secure: &Path,
    variants: &[GateVariant],
) -> Result<Vec<DetectorSet>> {
    let a = ThresholdData::load(alert)?;
    let s = ThresholdData::load(secure)?;
    variants
        .iter()
        .map(|&v| {
            Ok(DetectorSet::uniform(
                &a.model(DetectorRole::Alert, v, GeigerParams::ideal())?,
                &s.model(DetectorRole::Secure, v, GeigerParams::ideal())?,
            ))
        })
        .collect()
}

fn resolve(base: &Path, p: PathBuf) -> PathBuf {
    if p.is_relative() {
        base.join(p)
    } else {
        p
    }
}

fn parse_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => Ok(serde_json::from_str(&text)?),
        _ => Ok(toml::from_str(&text)?),
    }
}

/// Reads a scenario file; relative paths inside it resolve against its directory.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let mut s: Scenario = parse_file(path)?;
    s.base_dir = Some(path.parent().map(Path::to_path_buf).unwrap_or_default());
    Ok(s)
}

fn load_run_scenario(a: &RunArgs) -> Result<Scenario> {
    let mut s = load_scenario(&a.config)?;
    if let Some(seed) = a.seed {
        s.seed = seed;
    }
    if let Some(w) = a.workers {
        s.workers = w;
    }
    if let Some(r) = a.rounds {
        s.rounds = r;
    }
    s.fixed_u |= a.fixed_u;
    s.validate()?;
    Ok(s)
}

fn emit(out: &Output, mut text: String) -> Result<()> {
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &out.out {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Reads a SimResult file written by `polgate simulate`.
pub fn read_sim_result(path: &Path) -> Result<SimResult> {
    parse_file(path)
}
