//! Orchestration: drops, radar grids, baseline and interfered runs, sweeps.
//!
//! Layout, LoS states and shadowing are drawn once per drop from labelled
//! streams and shared by every run of that drop, so a baseline and an
//! interfered run differ only in the radar grids.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::SweepResult;
use crate::antennas::RadarAntenna;
use crate::coupling::{build_interference_grid, subcarrier_profile, InterferenceGrid, RadarLink};
use crate::error::{Error, Result};
use crate::geometry::{build_layout, radar_geometry, NetworkLayout};
use crate::propagation::PathLoss;
use crate::radar::{build_schedule, PulseEvent};
use crate::rng::drop_stream;
use crate::scenario::{Deployment, Scenario};
use crate::uplink::{run_uplink, Capture, LinkBudget, SinrGrid, UeThroughput};

/// What makes two runs comparable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunIdentity {
    pub seed: u64,
    pub drops: u32,
    pub deployment: Deployment,
    pub duration_s: f64,
    pub cells: usize,
    pub ues: usize,
    /// FNV-1a over every drop's UE positions and attachments.
    pub layout_fingerprint: u64,
}

/// Radar placement of an interfered run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadarPoint {
    pub distance_km: f64,
    #[serde(rename = "freq_offset_MHz")]
    pub freq_offset_mhz: f64,
}

/// Per-UE throughputs of one run, all drops concatenated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputReport {
    pub identity: RunIdentity,
    pub radar: Option<RadarPoint>,
    #[serde(rename = "p0_dBm")]
    pub p0_dbm: f64,
    pub alpha: f64,
    pub ues: Vec<UeThroughput>,
}

impl ThroughputReport {
    pub fn throughputs(&self) -> Vec<f64> {
        self.ues.iter().map(|u| u.throughput_bps).collect()
    }

    pub fn mean_bps(&self) -> f64 {
        if self.ues.is_empty() {
            return 0.0;
        }
        self.ues.iter().map(|u| u.throughput_bps).sum::<f64>() / self.ues.len() as f64
    }

    /// Empirical quantile (nearest rank), `q` in [0, 1].
    pub fn percentile_bps(&self, q: f64) -> f64 {
        let mut t = self.throughputs();
        if t.is_empty() {
            return 0.0;
        }
        t.sort_by(f64::total_cmp);
        let rank = ((q.clamp(0.0, 1.0) * t.len() as f64).ceil() as usize).clamp(1, t.len());
        t[rank - 1]
    }
}

/// One run's report and its recorded SINR grids.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: ThroughputReport,
    pub sinr: SinrGrid,
}

/// Layout and link budget of one drop.
#[derive(Debug, Clone)]
pub struct PreparedDrop {
    pub drop: u32,
    pub layout: NetworkLayout,
    pub budget: LinkBudget,
}

struct RadarInputs {
    schedule: Vec<PulseEvent>,
    profile: Arc<[f64]>,
    antenna: RadarAntenna,
}

/// Scan phase of a drop: fixed, or drawn from the drop's radar stream.
pub fn scan_phase_deg(scenario: &Scenario, drop: u32) -> f64 {
    let radar = &scenario.radar;
    if radar.random_scan_phase {
        use rand::Rng;
        drop_stream(scenario.sim.seed, "radar", drop).random_range(0.0..360.0)
    } else {
        radar.scan_phase_deg
    }
}

/// A scenario with its drops drawn, ready to run at any radar placement.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub scenario: Scenario,
    pub drops: Vec<PreparedDrop>,
    identity: RunIdentity,
}

fn fnv(h: &mut u64, bytes: &[u8]) {
    for b in bytes {
        *h ^= u64::from(*b);
        *h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
}

impl Simulation {
    pub fn prepare(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let seed = scenario.sim.seed;
        let lte = &scenario.lte;
        let drops: Vec<PreparedDrop> = (0..scenario.sim.drops)
            .map(|d| {
                let layout = build_layout(lte, &mut drop_stream(seed, "layout", d));
                let budget = LinkBudget::build(
                    &layout,
                    lte,
                    &mut drop_stream(seed, "los", d),
                    &mut drop_stream(seed, "shadowing", d),
                );
                PreparedDrop { drop: d, layout, budget }
            })
            .collect();
        let mut fp = 0xcbf2_9ce4_8422_2325u64;
        for d in &drops {
            for (i, ue) in d.layout.ues.iter().enumerate() {
                fnv(&mut fp, &ue.position.x.to_bits().to_le_bytes());
                fnv(&mut fp, &ue.position.y.to_bits().to_le_bytes());
                fnv(&mut fp, &(d.budget.serving(i) as u64).to_le_bytes());
            }
        }
        let identity = RunIdentity {
            seed,
            drops: scenario.sim.drops,
            deployment: lte.deployment,
            duration_s: scenario.sim.duration_s,
            cells: drops.first().map_or(0, |d| d.layout.cells.len()),
            ues: drops.iter().map(|d| d.layout.ues.len()).sum(),
            layout_fingerprint: fp,
        };
        Ok(Simulation { scenario: scenario.clone(), drops, identity })
    }

    pub fn identity(&self) -> &RunIdentity {
        &self.identity
    }

    fn capture(&self, drop: &PreparedDrop) -> Capture {
        let sim = &self.scenario.sim;
        let cells = if sim.sinr_cells.is_empty() {
            vec![drop.layout.centre_cell()]
        } else {
            sim.sinr_cells.iter().copied().filter(|&c| c < drop.layout.cells.len()).collect()
        };
        Capture { cells, start_subframe: sim.sinr_start_subframe, subframes: sim.sinr_subframes }
    }

    /// Scan phase of a drop: fixed, or drawn from the drop's radar stream.
    pub fn scan_phase_deg(&self, drop: u32) -> f64 {
        scan_phase_deg(&self.scenario, drop)
    }

    /// Radar links of every cell of a drop for a radar at `distance_km`.
    pub fn radar_links(&self, drop: &PreparedDrop, distance_km: f64) -> Result<Vec<RadarLink>> {
        let sc = &self.scenario;
        let pl = PathLoss::new(&sc.propagation)?;
        radar_geometry(&drop.layout, distance_km, sc.propagation.tx_height_m)
            .iter()
            .map(|g| {
                let cell = &drop.layout.cells[g.cell];
                let gain = cell.antenna.gain_dbi(g.bearing_to_radar_deg, g.depression_to_radar_deg);
                Ok(RadarLink::new(g, gain, pl.loss_db(g.ground_range_km)?, sc.lte.rx_loss_db))
            })
            .collect()
    }

    fn radar_inputs(&self, drop: &PreparedDrop, distance_km: f64, freq_offset_mhz: f64) -> RadarInputs {
        let sc = &self.scenario;
        let radar = crate::radar::RadarConfig { distance_km, freq_offset_mhz, ..sc.radar.clone() };
        RadarInputs {
            schedule: build_schedule(&radar, sc.sim.subframes() as f64 * 1e-3, self.scan_phase_deg(drop.drop)),
            profile: subcarrier_profile(&sc.lte, &radar).into(),
            antenna: radar.antenna(),
        }
    }

    /// Radar interference grid of every cell of a drop.
    pub fn radar_grids(
        &self,
        drop: &PreparedDrop,
        distance_km: f64,
        freq_offset_mhz: f64,
    ) -> Result<Vec<InterferenceGrid>> {
        let r = self.radar_inputs(drop, distance_km, freq_offset_mhz);
        let links = self.radar_links(drop, distance_km)?;
        Ok(links
            .par_iter()
            .map(|l| build_interference_grid(&r.schedule, l, &r.antenna, &self.scenario.lte, r.profile.clone()))
            .collect())
    }

    /// Radar interference grid of a single cell.
    pub fn radar_grid(
        &self,
        drop: &PreparedDrop,
        cell: usize,
        distance_km: f64,
        freq_offset_mhz: f64,
    ) -> Result<InterferenceGrid> {
        let links = self.radar_links(drop, distance_km)?;
        let link = links.get(cell).ok_or_else(|| Error::invalid("cell", format!("no cell {cell} in the layout")))?;
        let r = self.radar_inputs(drop, distance_km, freq_offset_mhz);
        Ok(build_interference_grid(&r.schedule, link, &r.antenna, &self.scenario.lte, r.profile))
    }

    fn run(&self, radar: Option<RadarPoint>) -> Result<RunOutput> {
        let sc = &self.scenario;
        let n_sf = sc.sim.subframes();
        let mut ues = Vec::with_capacity(self.identity.ues);
        let mut sinr = SinrGrid::default();
        for drop in &self.drops {
            let grids = match radar {
                Some(p) => Some(self.radar_grids(drop, p.distance_km, p.freq_offset_mhz)?),
                None => None,
            };
            let cap = self.capture(drop);
            let (u, s) = run_uplink(&sc.lte, &drop.layout, &drop.budget, grids.as_deref(), n_sf, drop.drop, &cap)?;
            ues.extend(u);
            sinr.symbols_per_subframe = s.symbols_per_subframe;
            sinr.subcarriers = s.subcarriers;
            sinr.subframes.extend(s.subframes);
        }
        Ok(RunOutput {
            report: ThroughputReport {
                identity: self.identity.clone(),
                radar,
                p0_dbm: sc.lte.p0_dbm,
                alpha: sc.lte.alpha,
                ues,
            },
            sinr,
        })
    }

    /// Run without the radar.
    pub fn baseline(&self) -> Result<RunOutput> {
        self.run(None)
    }

    /// Run with the radar at a given distance and frequency offset.
    pub fn interfered(&self, distance_km: f64, freq_offset_mhz: f64) -> Result<RunOutput> {
        if !(distance_km > 0.0) {
            return Err(Error::invalid("radar.distance_km", "distance must be > 0"));
        }
        self.run(Some(RadarPoint { distance_km, freq_offset_mhz }))
    }
}

/// Baseline and interfered run at the scenario's radar placement.
pub fn run_pair(scenario: &Scenario) -> Result<(ThroughputReport, ThroughputReport)> {
    let sim = Simulation::prepare(scenario)?;
    let base = sim.baseline()?;
    let hit = sim.interfered(scenario.radar.distance_km, scenario.radar.freq_offset_mhz)?;
    Ok((base.report, hit.report))
}

/// Interfered runs at every (distance, offset) of the sweep, plus the
/// baseline. Points run in parallel; the result is in sweep order.
pub fn run_sweep_reports(sim: &Simulation) -> Result<(ThroughputReport, Vec<ThroughputReport>)> {
    let sweep = &sim.scenario.sweep;
    let points: Vec<(f64, f64)> =
        sweep.freq_offsets_mhz.iter().flat_map(|&o| sweep.distances_km.iter().map(move |&d| (d, o))).collect();
    let (base, runs) = rayon::join(
        || sim.baseline(),
        || points.par_iter().map(|&(d, o)| sim.interfered(d, o).map(|r| r.report)).collect::<Result<Vec<_>>>(),
    );
    Ok((base?.report, runs?))
}

/// Sweep summary of a prepared simulation.
pub fn run_sweep(sim: &Simulation) -> Result<SweepResult> {
    let (base, runs) = run_sweep_reports(sim)?;
    SweepResult::from_reports(&base, &runs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn short(deployment: Deployment) -> Scenario {
        let mut s = Scenario::preset(deployment);
        s.sim.duration_s = 0.05;
        s
    }

    #[test]
    fn pair_shares_the_drop() {
        let (b, i) = run_pair(&short(Deployment::Macro)).unwrap();
        assert_eq!(b.identity, i.identity);
        assert_eq!(b.ues.len(), 210);
        for (x, y) in b.ues.iter().zip(&i.ues) {
            assert_eq!((x.ue, x.cell, x.coupling_loss_db), (y.ue, y.cell, y.coupling_loss_db));
        }
        assert!(i.mean_bps() <= b.mean_bps());
    }

    #[test]
    fn baseline_is_deterministic_and_radar_blind() {
        let s = short(Deployment::Macro);
        let a = Simulation::prepare(&s).unwrap().baseline().unwrap();
        let mut t = s.clone();
        t.radar.peak_power_dbm = 10.0;
        t.radar.freq_offset_mhz = 10.0;
        t.radar.pulse_width_s = 1e-6;
        let b = Simulation::prepare(&t).unwrap().baseline().unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seeds_change_values_not_configuration() {
        let s = short(Deployment::Macro);
        let mut t = s.clone();
        t.sim.seed = 2;
        let a = Simulation::prepare(&s).unwrap().baseline().unwrap().report;
        let b = Simulation::prepare(&t).unwrap().baseline().unwrap().report;
        assert_ne!(a.throughputs(), b.throughputs());
        assert_eq!((a.identity.cells, a.identity.ues), (b.identity.cells, b.identity.ues));
    }
}
