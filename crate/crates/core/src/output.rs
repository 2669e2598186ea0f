//! CSV and TOML writers. Column names carry their units.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::antennas::{RadarAntenna, SectorAntenna};
use crate::coupling::InterferenceGrid;
use crate::error::{Error, Result};
use crate::geometry::NetworkLayout;
use crate::propagation::LossSample;
use crate::radar::PulseEvent;
use crate::simulation::ThroughputReport;
use crate::uplink::SinrGrid;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_toml<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = toml::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))?;
    write_text(path, &text)
}

fn write_rows<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Serialize)]
struct CellRow {
    cell: usize,
    site: usize,
    macro_cell: usize,
    x_m: f64,
    y_m: f64,
    height_m: f64,
    boresight_deg: f64,
    omni: bool,
}

pub fn write_layout_csv(path: &Path, layout: &NetworkLayout) -> Result<()> {
    write_rows(
        path,
        layout.cells.iter().map(|c| CellRow {
            cell: c.id,
            site: c.site,
            macro_cell: c.macro_cell,
            x_m: c.position.x,
            y_m: c.position.y,
            height_m: c.height_m,
            boresight_deg: c.antenna.boresight_az_deg,
            omni: c.antenna.omni,
        }),
    )
}

#[derive(Serialize)]
struct UeRow {
    drop: u32,
    ue: usize,
    cell: usize,
    indoor: bool,
    #[serde(rename = "coupling_loss_dB")]
    coupling_loss_db: f64,
    baseline_bps: f64,
    interfered_bps: f64,
    loss_percent: f64,
}

/// Per-UE throughput of a matched pair.
pub fn write_ue_csv(path: &Path, baseline: &ThroughputReport, interfered: &ThroughputReport) -> Result<()> {
    if baseline.identity != interfered.identity {
        return Err(Error::MismatchedRuns("per-UE table needs matching runs".into()));
    }
    write_rows(
        path,
        baseline.ues.iter().zip(&interfered.ues).map(|(b, i)| UeRow {
            drop: b.drop,
            ue: b.ue,
            cell: b.cell,
            indoor: b.indoor,
            coupling_loss_db: b.coupling_loss_db,
            baseline_bps: b.throughput_bps,
            interfered_bps: i.throughput_bps,
            loss_percent: if b.throughput_bps > 0.0 {
                100.0 * (1.0 - i.throughput_bps / b.throughput_bps)
            } else {
                0.0
            },
        }),
    )
}

#[derive(Serialize)]
struct CdfRow<'a> {
    run: &'a str,
    throughput_bps: f64,
    cdf: f64,
}

/// Labelled CDFs stacked in one file.
pub fn write_cdf_csv(path: &Path, cdfs: &[(String, Vec<(f64, f64)>)]) -> Result<()> {
    write_rows(
        path,
        cdfs.iter()
            .flat_map(|(label, c)| c.iter().map(move |&(x, p)| CdfRow { run: label, throughput_bps: x, cdf: p })),
    )
}

#[derive(Serialize)]
struct SinrRow {
    drop: u32,
    cell: usize,
    subframe: u64,
    symbol: usize,
    subcarrier: usize,
    #[serde(rename = "sinr_dB")]
    sinr_db: f32,
}

/// Recorded SINR, unscheduled resource elements omitted. `symbol` counts
/// from 0 within the subframe.
pub fn write_sinr_csv(path: &Path, grid: &SinrGrid) -> Result<()> {
    let n_sc = grid.subcarriers;
    write_rows(
        path,
        grid.subframes.iter().flat_map(|sf| {
            sf.sinr_db.iter().enumerate().filter(|(_, v)| !v.is_nan()).map(move |(i, &v)| SinrRow {
                drop: sf.drop,
                cell: sf.cell,
                subframe: sf.subframe,
                symbol: i / n_sc,
                subcarrier: i % n_sc,
                sinr_db: v,
            })
        }),
    )
}

#[derive(Serialize)]
struct GridRow {
    cell: usize,
    symbol: u64,
    subcarrier: usize,
    #[serde(rename = "power_dBm")]
    power_dbm: f64,
}

/// Radar power triples for absolute symbols in `[first, first + count)`;
/// symbols without radar power are omitted.
pub fn write_grid_csv(path: &Path, grid: &InterferenceGrid, first_symbol: u64, count: u64) -> Result<()> {
    let profile = grid.profile();
    write_rows(
        path,
        grid.symbols().iter().filter(|(s, _)| *s >= first_symbol && *s < first_symbol + count).flat_map(|&(s, p)| {
            profile.iter().enumerate().map(move |(sc, f)| GridRow {
                cell: grid.cell,
                symbol: s,
                subcarrier: sc,
                power_dbm: 10.0 * (p * f).log10(),
            })
        }),
    )
}

#[derive(Serialize)]
struct LossRow {
    distance_km: f64,
    #[serde(rename = "fspl_dB")]
    fspl_db: f64,
    #[serde(rename = "itm_dB")]
    itm_db: Option<f64>,
    #[serde(rename = "selected_dB")]
    selected_db: f64,
}

pub fn write_proploss_csv(path: &Path, samples: &[LossSample]) -> Result<()> {
    write_rows(
        path,
        samples.iter().map(|s| LossRow {
            distance_km: s.distance_km,
            fspl_db: s.fspl_db,
            itm_db: s.itm_db,
            selected_db: s.selected_db,
        }),
    )
}

#[derive(Serialize)]
struct PulseRow {
    index: u64,
    start_s: f64,
    width_s: f64,
    dwell: u64,
    beam_azimuth_deg: f64,
    #[serde(rename = "eirp_dBm")]
    eirp_dbm: f64,
}

pub fn write_schedule_csv(path: &Path, schedule: &[PulseEvent]) -> Result<()> {
    write_rows(
        path,
        schedule.iter().map(|p| PulseRow {
            index: p.index,
            start_s: p.start_s,
            width_s: p.width_s,
            dwell: p.dwell,
            beam_azimuth_deg: p.beam_azimuth_deg,
            eirp_dbm: p.eirp_dbm,
        }),
    )
}

#[derive(Serialize)]
struct RadarPatternRow {
    angle_deg: f64,
    /// Empty beyond ±90°, where the aperture formula folds back.
    #[serde(rename = "theoretical_dB")]
    theoretical_db: Option<f64>,
    /// Capped at 0 dB near boresight, where the logarithmic mask diverges.
    #[serde(rename = "mask_dB")]
    mask_db: f64,
    #[serde(rename = "pattern_dB")]
    pattern_db: f64,
}

/// Radar azimuth pattern over `[-180, 180]` in `step_deg` steps.
pub fn write_radar_pattern_csv(path: &Path, antenna: &RadarAntenna, step_deg: f64) -> Result<()> {
    let p = antenna.azimuth_pattern();
    let n = (360.0 / step_deg).round() as i64;
    write_rows(
        path,
        (0..=n).map(|i| {
            let a = -180.0 + i as f64 * step_deg;
            RadarPatternRow {
                angle_deg: a,
                theoretical_db: (a.abs() <= 90.0).then(|| p.theoretical_db(a).max(-200.0)),
                mask_db: p.mask_db(a).min(0.0),
                pattern_db: p.gain_db(a),
            }
        }),
    )
}

#[derive(Serialize)]
struct SectorPatternRow {
    angle_deg: f64,
    #[serde(rename = "azimuth_dB")]
    azimuth_db: f64,
    /// Empty beyond ±90°.
    #[serde(rename = "elevation_dB")]
    elevation_db: Option<f64>,
    #[serde(rename = "composite_at_downtilt_dB")]
    composite_db: f64,
}

/// Sector per-plane patterns and the composite along azimuth at the
/// downtilt, over `[-180, 180]`.
pub fn write_sector_pattern_csv(path: &Path, antenna: &SectorAntenna, step_deg: f64) -> Result<()> {
    let n = (360.0 / step_deg).round() as i64;
    let am = antenna.max_attenuation_db;
    write_rows(
        path,
        (0..=n).map(|i| {
            let a = -180.0 + i as f64 * step_deg;
            SectorPatternRow {
                angle_deg: a,
                azimuth_db: crate::antennas::sector_plane_gain_db(a, antenna.az_tilt_deg, antenna.theta3db_az_deg, am),
                elevation_db: (a.abs() <= 90.0).then(|| {
                    crate::antennas::sector_plane_gain_db(a, antenna.downtilt_deg, antenna.theta3db_el_deg, am)
                }),
                composite_db: antenna.composite_gain_db(a, antenna.downtilt_deg),
            }
        }),
    )
}

/// One row per sweep point.
pub fn write_sweep_csv(path: &Path, result: &crate::analysis::SweepResult) -> Result<()> {
    write_rows(path, &result.entries)
}
