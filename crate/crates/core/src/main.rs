//! `ttc-sim`: command-line front end.
//!
//! Exit codes: 0 success, 1 reference-check failure, 2 config error,
//! 3 I/O error.

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use cubesat_ttc::adm::{
    ambient_sweep, knife_power_w, monte_carlo, run_scenario, BatteryPoint, FaultSpec, JitterSpec, LineThermal, Phase,
    SweepSpec, TcEvent,
};
use cubesat_ttc::budget::{
    coded_mission_bytes, days_to_downlink, images_per_run, raw_mission_bytes, raw_run_bytes, required_rate,
};
use cubesat_ttc::config::{ConfigError, RunConfig};
use cubesat_ttc::link::{axial_ratio_ok, link_breakdown, AntennaPreset};
use cubesat_ttc::paper_check::run_checks;
use cubesat_ttc::DomainError;

#[derive(Parser, Debug)]
#[command(name = "ttc-sim", version, about = "CubeSat TT&C budget, link and deployment simulator")]
struct Cli {
    /// TOML config; omitted keys use the mission defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed, overriding `scenario.rng_seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for report.json (and trace.csv for `deploy`).
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Data volume, coding overhead and downlink time.
    Budget(BudgetArgs),
    /// Link margin with a per-term breakdown.
    Link(LinkArgs),
    /// One deployment run, with event trace.
    Deploy(DeployArgs),
    /// Seeded reliability estimate, optionally swept over ambient.
    Montecarlo(MonteCarloArgs),
    /// Recompute the published mission numbers; exit 1 on any mismatch.
    PaperCheck,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    compression: Option<f64>,
    #[arg(long)]
    cadence_min: Option<f64>,
    /// Day count for the required-rate figure.
    #[arg(long)]
    days: Option<u32>,
    #[arg(long)]
    rate_kbps: Option<f64>,
    #[arg(long)]
    window_s: Option<f64>,
}

#[derive(Args, Debug)]
struct LinkArgs {
    #[arg(long)]
    tx_preset: Option<AntennaPreset>,
    #[arg(long)]
    rx_preset: Option<AntennaPreset>,
    #[arg(long)]
    freq_mhz: Option<f64>,
    /// Slant range; required here or in `[link]`.
    #[arg(long)]
    distance_km: Option<f64>,
    /// TX off-boresight angle, degrees.
    #[arg(long)]
    tx_theta: Option<f64>,
    #[arg(long)]
    rx_theta: Option<f64>,
    /// Angle between polarization major axes, degrees.
    #[arg(long)]
    tilt: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tx_power_dbw: Option<f64>,
    #[arg(long)]
    misc_loss: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    required_cn: Option<f64>,
}

#[derive(Args, Debug)]
struct DeployArgs {
    /// Ambient temperature, °C.
    #[arg(long, allow_hyphen_values = true)]
    ambient: Option<f64>,
    /// Fault such as `resistor-open:0:0` or `door-stuck:2@120`; repeatable.
    #[arg(long = "fault")]
    faults: Vec<FaultSpec>,
    /// Telecommand such as `confirm@3600`; repeatable.
    #[arg(long = "tc")]
    tcs: Vec<TcEvent>,
    #[arg(long)]
    horizon_h: Option<f64>,
    /// Battery step `t_s:volts`; repeatable.
    #[arg(long = "battery", value_parser = parse_battery)]
    battery: Vec<BatteryPoint>,
    /// Relative sigma on each line's k, C and melt point.
    #[arg(long)]
    jitter: Option<f64>,
}

#[derive(Args, Debug)]
struct MonteCarloArgs {
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    jitter: Option<f64>,
    /// Ambient sweep `start:stop:step` in °C.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "ambient")]
    sweep: Option<SweepSpec>,
    /// Single ambient instead of a sweep.
    #[arg(long, allow_hyphen_values = true)]
    ambient: Option<f64>,
    /// Simulated horizon per run, hours.
    #[arg(long)]
    horizon: Option<f64>,
}

fn parse_battery(s: &str) -> Result<BatteryPoint, String> {
    let (t, v) = s.split_once(':').ok_or_else(|| format!("battery `{s}` must look like `t_s:volts`"))?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("battery `{s}`: {e}"));
    Ok(BatteryPoint { t_s: num(t)?, volts: num(v)? })
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Io(String),
    CheckFailed,
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::CheckFailed => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DomainError> for CliError {
    fn from(e: DomainError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            match &e {
                CliError::Config(m) => eprintln!("config error: {m}"),
                CliError::Io(m) => eprintln!("i/o error: {m}"),
                CliError::CheckFailed => {}
            }
            ExitCode::from(e.code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.scenario.rng_seed = seed;
    }
    match cli.command {
        Command::Budget(a) => cmd_budget(cfg, a, &cli.out),
        Command::Link(a) => cmd_link(cfg, a, &cli.out),
        Command::Deploy(a) => cmd_deploy(cfg, a, &cli.out),
        Command::Montecarlo(a) => cmd_montecarlo(cfg, a, &cli.out),
        Command::PaperCheck => cmd_paper_check(cfg, &cli.out),
    }
}

fn emit<T: Serialize>(report: &T, out: &Path) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let path = out.join("report.json");
    fs::write(&path, format!("{text}\n")).map_err(|e| io_err(&path, e))?;
    println!("{text}");
    Ok(())
}

/// Four significant figures, for GB figures.
fn sig4(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let scale = 10f64.powi(3 - x.abs().log10().floor() as i32);
    (x * scale).round() / scale
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

fn cmd_budget(mut cfg: RunConfig, a: BudgetArgs, out: &Path) -> Result<(), CliError> {
    let m = &mut cfg.mission;
    if let Some(v) = a.runs {
        m.runs = v;
    }
    if let Some(v) = a.compression {
        m.compression_ratio = v;
    }
    if let Some(v) = a.cadence_min {
        m.cadence_min = v;
    }
    let d = &mut cfg.downlink;
    if let Some(v) = a.days {
        d.available_days = v;
    }
    if let Some(v) = a.rate_kbps {
        d.link_rate_kbps = v;
    }
    if let Some(v) = a.window_s {
        d.window_s = v;
    }
    let profile = cfg.mission.profile()?;
    let ctx = cfg.downlink.context()?;
    let run_bytes = raw_run_bytes(&profile)?;
    let mission_bytes = raw_mission_bytes(&profile)?;
    let coded = coded_mission_bytes(&profile)?;
    let rate = required_rate(&profile, ctx.window_per_day, ctx.mission_days)?;
    let days = days_to_downlink(&profile, &ctx)?;
    let report = json!({
        "command": "budget",
        "images_per_run": images_per_run(&profile)?,
        "image_bytes": profile.image_bytes(),
        "raw_run_bytes": run_bytes.bytes(),
        "raw_run_gb": sig4(run_bytes.gb()),
        "raw_mission_bytes": mission_bytes.bytes(),
        "raw_gb": sig4(mission_bytes.gb()),
        "code_expansion": profile.code_expansion(),
        "coded_bytes": coded,
        "coded_gb": sig4(coded / 1e9),
        "link_rate_kbps": ctx.link_rate.as_kbps(),
        "window_per_day_s": ctx.window_per_day.as_secs(),
        "days_to_downlink": round1(days),
        "available_days": ctx.mission_days,
        "required_rate_kbps": round1(rate.as_kbps()),
    });
    emit(&report, out)
}

fn cmd_link(mut cfg: RunConfig, a: LinkArgs, out: &Path) -> Result<(), CliError> {
    let l = &mut cfg.link;
    if let Some(v) = a.tx_preset {
        l.tx_preset = v;
    }
    if let Some(v) = a.rx_preset {
        l.rx_preset = v;
    }
    if a.freq_mhz.is_some() {
        l.frequency_mhz = a.freq_mhz;
    }
    if a.distance_km.is_some() {
        l.distance_km = a.distance_km;
    }
    if let Some(v) = a.tx_theta {
        l.tx_off_boresight_deg = v;
    }
    if let Some(v) = a.rx_theta {
        l.rx_off_boresight_deg = v;
    }
    if let Some(v) = a.tilt {
        l.polarization_tilt_deg = v;
    }
    if let Some(v) = a.tx_power_dbw {
        l.tx_power_dbw = v;
    }
    if let Some(v) = a.misc_loss {
        l.misc_losses_db = v;
    }
    if let Some(v) = a.required_cn {
        l.required_cn_db = v;
    }
    let input = cfg.link.input()?;
    let breakdown = link_breakdown(&input)?;
    let report = json!({
        "command": "link",
        "tx_preset": cfg.link.tx_preset.name(),
        "rx_preset": cfg.link.rx_preset.name(),
        "frequency_mhz": input.frequency.as_mhz(),
        "distance_km": input.distance_m / 1e3,
        "tx_off_boresight_deg": input.tx_off_boresight_deg,
        "rx_off_boresight_deg": input.rx_off_boresight_deg,
        "polarization_tilt_deg": input.polarization_tilt_deg,
        "tx_circular_ok": axial_ratio_ok(&input.tx_pattern, input.frequency),
        "rx_circular_ok": axial_ratio_ok(&input.rx_pattern, input.frequency),
        "breakdown": breakdown,
    });
    emit(&report, out)
}

fn cmd_deploy(mut cfg: RunConfig, a: DeployArgs, out: &Path) -> Result<(), CliError> {
    let s = &mut cfg.scenario;
    if let Some(v) = a.ambient {
        s.ambient_c = v;
    }
    if !a.faults.is_empty() {
        s.faults = a.faults;
    }
    if !a.tcs.is_empty() {
        s.tc = a.tcs;
    }
    if let Some(v) = a.horizon_h {
        s.horizon_h = v;
    }
    if !a.battery.is_empty() {
        s.battery = a.battery;
    }
    if let Some(v) = a.jitter {
        s.jitter = v;
    }
    let adm = cfg.adm()?;
    let scenario = cfg.scenario.scenario(&adm)?;
    let run = run_scenario(&scenario, &adm)?;

    let mut notes = Vec::new();
    let nominal = LineThermal::from_config(&adm);
    let t_inf = nominal.steady_state_c(scenario.ambient.0, knife_power_w(&adm));
    if t_inf < nominal.melt_temp_c {
        notes.push(format!(
            "steady-state line temperature {t_inf:.2} °C stays below the {:.1} °C melt point at this ambient; \
             the lumped model cannot cut, whereas real lines near this threshold may part unevenly",
            nominal.melt_temp_c
        ));
    }
    if !run.summary.fully_deployed() && run.summary.final_phase == Phase::Partial {
        notes.push(format!("{} of {} doors open at the horizon", run.summary.doors_open, adm.n_doors));
    }

    fs::create_dir_all(out).map_err(|e| io_err(out, e))?;
    let trace_path = out.join("trace.csv");
    let file = fs::File::create(&trace_path).map_err(|e| io_err(&trace_path, e))?;
    run.trace.write_csv(file).map_err(|e| io_err(&trace_path, e))?;

    let report = json!({
        "command": "deploy",
        "ambient_c": scenario.ambient.0,
        "horizon_s": scenario.horizon.as_secs(),
        "seed": scenario.rng_seed,
        "jitter": scenario.jitter,
        "faults": scenario.faults.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        "tc_schedule": scenario.tc_schedule.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
        "summary": run.summary,
        "trace_records": run.trace.records.len(),
        "notes": notes,
    });
    emit(&report, out)
}

fn cmd_montecarlo(mut cfg: RunConfig, a: MonteCarloArgs, out: &Path) -> Result<(), CliError> {
    if let Some(v) = a.runs {
        cfg.montecarlo.runs = v;
    }
    if let Some(v) = a.jitter {
        cfg.montecarlo.jitter = v;
    }
    if let Some(v) = a.horizon {
        cfg.scenario.horizon_h = v;
    }
    let sweep = match (a.ambient, a.sweep) {
        (Some(t), _) => {
            cfg.scenario.ambient_c = t;
            None
        }
        (None, Some(s)) => Some(s),
        (None, None) => cfg.montecarlo.sweep_spec()?,
    };
    let adm = cfg.adm()?;
    let template = cfg.scenario.scenario(&adm)?;
    let jitter = JitterSpec::uniform(cfg.montecarlo.jitter);
    let runs = cfg.montecarlo.runs;
    let reports = match sweep {
        Some(spec) => ambient_sweep(&template, &adm, runs, jitter, spec)?,
        None => vec![monte_carlo(&template, &adm, runs, jitter)?],
    };
    let report = json!({
        "command": "montecarlo",
        "runs": runs,
        "seed": template.rng_seed,
        "jitter": jitter,
        "horizon_s": template.horizon.as_secs(),
        "sweep": sweep,
        "reports": reports,
    });
    emit(&report, out)
}

fn cmd_paper_check(cfg: RunConfig, out: &Path) -> Result<(), CliError> {
    let report = run_checks(&cfg)?;
    for row in &report.rows {
        eprintln!("{row}");
    }
    let n_pass = report.rows.iter().filter(|r| r.pass).count();
    eprintln!("{n_pass}/{} checks passed", report.rows.len());
    emit(&report, out)?;
    if report.all_pass {
        Ok(())
    } else {
        Err(CliError::CheckFailed)
    }
}
