//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage errors (bad flags, missing or
//! invalid scenario, bad overrides), 2 for failures while running.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::analysis::{mean_loss_percent, throughput_cdf, ExclusionZone, SweepResult};
use crate::error::Error;
use crate::output::{self, ensure_dir};
use crate::propagation::PathLoss;
use crate::radar::build_schedule;
use crate::scenario::{Deployment, Scenario};
use crate::simulation::{run_sweep_reports, scan_phase_deg, RadarPoint, RunIdentity, Simulation, ThroughputReport};

/// Environment variable holding the default output directory.
pub const OUT_ENV: &str = "RADAR_LTE_OUT";

#[derive(Debug, Parser)]
#[command(name = "radar-lte", version, about = "Rotating radar interference into a TDD LTE uplink")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Baseline and interfered run at the scenario's radar placement.
    Run(Common),
    /// Interfered runs over distances and offsets, with exclusion-zone estimates.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Radar distances in km, comma separated.
        #[arg(long, value_delimiter = ',')]
        distances: Option<Vec<f64>>,
        /// Radar frequency offsets in MHz, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        offsets: Option<Vec<f64>>,
    },
    /// Radar and sector antenna patterns.
    Patterns {
        #[command(flatten)]
        common: Common,
        /// Angle step in degrees.
        #[arg(long, default_value_t = 0.01)]
        step: f64,
    },
    /// Free-space, ITM and selected radar path loss against distance.
    Proploss {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 300.0)]
        max_km: f64,
        #[arg(long, default_value_t = 1.0)]
        step_km: f64,
    },
    /// Radar pulse schedule.
    Schedule {
        #[command(flatten)]
        common: Common,
        /// Seconds of schedule to export; defaults to one rotation.
        #[arg(long)]
        duration: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Scenario file, or a preset name (`macro`, `small_cell`).
    #[arg(long, default_value = "macro")]
    pub scenario: String,
    /// Override a scenario field, e.g. `--set radar.freq_offset_MHz=10`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Shorthand for `--set lte.deployment=...`.
    #[arg(long)]
    pub deployment: Option<Deployment>,
    /// Output directory.
    #[arg(long, env = OUT_ENV, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; all cores when omitted.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Runtime(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

/// Parse arguments, run, print a one-line diagnostic on failure, and return
/// the exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let msg = e.to_string();
            eprintln!("radar-lte: {}", msg.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: "));
            return 1;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("radar-lte: {}", one_line(&e.to_string()));
            e.exit_code()
        }
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Scenario text for `--scenario`: a file if one exists, else a preset.
fn scenario_text(arg: &str) -> Result<String, CliError> {
    let path = Path::new(arg);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| usage(Error::io(path, e)));
    }
    match arg.parse::<Deployment>() {
        Ok(d) => Ok(format!("[lte]\ndeployment = \"{}\"\n", d.as_str())),
        Err(_) => Err(CliError::Usage(format!("scenario `{arg}`: no such file or preset"))),
    }
}

fn resolve(common: &Common, extra: &[String]) -> Result<Scenario, CliError> {
    let text = scenario_text(&common.scenario)?;
    let mut overrides = Vec::new();
    if let Some(d) = common.deployment {
        overrides.push(format!("lte.deployment=\"{}\"", d.as_str()));
    }
    overrides.extend(extra.iter().cloned());
    overrides.extend(common.overrides.iter().cloned());
    Scenario::resolve(&text, &overrides).map_err(usage)
}

fn list_literal(v: &[f64]) -> String {
    let items: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    format!("[{}]", items.join(", "))
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Run(c) => c,
        Command::Sweep { common, .. }
        | Command::Patterns { common, .. }
        | Command::Proploss { common, .. }
        | Command::Schedule { common, .. } => common,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = common.jobs {
        if j == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| CliError::Usage(e.to_string()))?;
    pool.install(|| dispatch(&cli.command, common))
}

fn dispatch(command: &Command, common: &Common) -> Result<(), CliError> {
    match command {
        Command::Run(_) => {
            let scenario = resolve(common, &[])?;
            prepare_out(&common.out, &scenario)?;
            run(&scenario, &common.out)?;
        }
        Command::Sweep { distances, offsets, .. } => {
            let mut extra = Vec::new();
            if let Some(d) = distances {
                extra.push(format!("sweep.distances_km={}", list_literal(d)));
                let explicit = common.overrides.iter().any(|o| o.trim_start().starts_with("radar.distance_km"));
                if let (false, Some(first)) = (explicit, d.first()) {
                    extra.push(format!("radar.distance_km={first:?}"));
                }
            }
            if let Some(o) = offsets {
                extra.push(format!("sweep.freq_offsets_MHz={}", list_literal(o)));
            }
            let scenario = resolve(common, &extra)?;
            prepare_out(&common.out, &scenario)?;
            sweep(&scenario, &common.out)?;
        }
        Command::Patterns { step, .. } => {
            if !(*step > 0.0 && *step <= 90.0) {
                return Err(CliError::Usage("--step must lie in (0, 90] degrees".into()));
            }
            let scenario = resolve(common, &[])?;
            prepare_out(&common.out, &scenario)?;
            output::write_radar_pattern_csv(&common.out.join("radar_pattern.csv"), &scenario.radar.antenna(), *step)?;
            let omni = scenario.lte.deployment == Deployment::SmallCell;
            let sector = crate::geometry::sector_antenna(&scenario.lte, 0.0, omni);
            output::write_sector_pattern_csv(&common.out.join("sector_pattern.csv"), &sector, *step)?;
        }
        Command::Proploss { max_km, step_km, .. } => {
            if !(*step_km > 0.0 && *max_km >= *step_km) {
                return Err(CliError::Usage("need 0 < --step-km ≤ --max-km".into()));
            }
            let scenario = resolve(common, &[])?;
            prepare_out(&common.out, &scenario)?;
            let pl = PathLoss::new(&scenario.propagation)?;
            let n = (max_km / step_km + 1e-9).floor() as usize;
            let samples = (1..=n).map(|i| pl.sample(i as f64 * step_km)).collect::<crate::Result<Vec<_>>>()?;
            output::write_proploss_csv(&common.out.join("proploss.csv"), &samples)?;
        }
        Command::Schedule { duration, .. } => {
            let scenario = resolve(common, &[])?;
            let duration = duration.unwrap_or_else(|| scenario.radar.rotation_period_s());
            if !(duration > 0.0) {
                return Err(CliError::Usage("--duration must be > 0".into()));
            }
            prepare_out(&common.out, &scenario)?;
            let schedule = build_schedule(&scenario.radar, duration, scan_phase_deg(&scenario, 0));
            output::write_schedule_csv(&common.out.join("schedule.csv"), &schedule)?;
        }
    }
    Ok(())
}

/// Create the output directory and echo the resolved scenario into it.
fn prepare_out(out: &Path, scenario: &Scenario) -> crate::Result<()> {
    ensure_dir(out)?;
    output::write_text(&out.join("resolved.toml"), &scenario.to_toml_string())
}

#[derive(Serialize)]
struct Stats {
    mean_bps: f64,
    p5_bps: f64,
    p50_bps: f64,
}

impl Stats {
    fn of(r: &ThroughputReport) -> Self {
        Stats { mean_bps: r.mean_bps(), p5_bps: r.percentile_bps(0.05), p50_bps: r.percentile_bps(0.5) }
    }
}

#[derive(Serialize)]
struct RunSummary {
    loss_percent: f64,
    centre_cell: usize,
    #[serde(rename = "centre_cell_radar_path_loss_dB")]
    centre_cell_path_loss_db: f64,
    los_horizon_km: f64,
    centre_cell_radar_symbols: usize,
    identity: RunIdentity,
    radar: RadarPoint,
    baseline: Stats,
    interfered: Stats,
}

/// Paired run plus its CSV outputs.
pub fn run(scenario: &Scenario, out: &Path) -> crate::Result<()> {
    let sim = Simulation::prepare(scenario)?;
    let (d, o) = (scenario.radar.distance_km, scenario.radar.freq_offset_mhz);
    let base = sim.baseline()?;
    let hit = sim.interfered(d, o)?;
    let drop = &sim.drops[0];
    let cell = drop.layout.centre_cell();
    let links = sim.radar_links(drop, d)?;
    let grid = sim.radar_grid(drop, cell, d, o)?;
    let sps = scenario.lte.symbols_per_subframe as u64;

    output::write_layout_csv(&out.join("layout.csv"), &drop.layout)?;
    output::write_ue_csv(&out.join("ue_throughput.csv"), &base.report, &hit.report)?;
    output::write_cdf_csv(
        &out.join("cdf.csv"),
        &[("baseline".into(), throughput_cdf(&base.report)?), ("interfered".into(), throughput_cdf(&hit.report)?)],
    )?;
    output::write_sinr_csv(&out.join("sinr_baseline.csv"), &base.sinr)?;
    output::write_sinr_csv(&out.join("sinr_interfered.csv"), &hit.sinr)?;
    output::write_grid_csv(
        &out.join("radar_grid.csv"),
        &grid,
        scenario.sim.sinr_start_subframe * sps,
        scenario.sim.sinr_subframes * sps,
    )?;
    let summary = RunSummary {
        loss_percent: mean_loss_percent(&hit.report, &base.report)?,
        centre_cell: cell,
        centre_cell_path_loss_db: links[cell].path_loss_db,
        los_horizon_km: PathLoss::new(&scenario.propagation)?.horizon_km(),
        centre_cell_radar_symbols: grid.symbols().len(),
        identity: base.report.identity.clone(),
        radar: RadarPoint { distance_km: d, freq_offset_mhz: o },
        baseline: Stats::of(&base.report),
        interfered: Stats::of(&hit.report),
    };
    output::write_toml(&out.join("summary.toml"), &summary)
}

#[derive(Serialize)]
struct ZoneEstimate {
    #[serde(rename = "freq_offset_MHz")]
    freq_offset_mhz: f64,
    #[serde(flatten)]
    zone: Option<ExclusionZone>,
    note: Option<String>,
}

#[derive(Serialize)]
struct SweepSummary {
    notes: Vec<String>,
    identity: RunIdentity,
    baseline: Stats,
    exclusion: Vec<ZoneEstimate>,
    result: SweepResult,
}

/// Sweep plus its CSV outputs.
pub fn sweep(scenario: &Scenario, out: &Path) -> crate::Result<()> {
    let sim = Simulation::prepare(scenario)?;
    let (base, runs) = run_sweep_reports(&sim)?;
    let result = SweepResult::from_reports(&base, &runs)?;
    let w = &scenario.sweep;

    output::write_sweep_csv(&out.join("sweep.csv"), &result)?;
    let mut cdfs = vec![("baseline".to_string(), throughput_cdf(&base)?)];
    for r in &runs {
        if let Some(p) = r.radar {
            cdfs.push((format!("{} km {} MHz", p.distance_km, p.freq_offset_mhz), throughput_cdf(r)?));
        }
    }
    output::write_cdf_csv(&out.join("cdf.csv"), &cdfs)?;

    let exclusion = result
        .offsets()
        .into_iter()
        .map(|o| match result.exclusion_zone(o, w.exclusion_threshold_percent, w.monotone_tolerance_percent) {
            Ok(z) => ZoneEstimate { freq_offset_mhz: o, zone: Some(z), note: None },
            Err(e) => ZoneEstimate { freq_offset_mhz: o, zone: None, note: Some(e.to_string()) },
        })
        .collect();
    let mut notes = Vec::new();
    if scenario.lte.deployment == Deployment::SmallCell && w.distances_km.iter().any(|&d| d < 100.0) {
        notes.push("small-cell points below 100 km are extrapolated beyond the studied range".to_string());
    }
    let summary =
        SweepSummary { notes, identity: base.identity.clone(), baseline: Stats::of(&base), exclusion, result };
    output::write_toml(&out.join("summary.toml"), &summary)
}
