//! TDD LTE uplink: attachment, power control, round-robin scheduling,
//! per-resource-element SINR and link-to-system throughput.
//!
//! Per uplink subframe every cell schedules all its resource blocks over its
//! attached UEs. A resource element's SINR is the serving UE's power over
//! noise, the same-RB transmissions of other cells' UEs and, on symbols a
//! radar pulse touched, the radar power on that subcarrier. Each allocation
//! is mapped to bits through an exponential effective SINR.

pub mod channel;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::coupling::InterferenceGrid;
use crate::error::{Error, Result};
use crate::geometry::{Cell, NetworkLayout, Ue};
use crate::scenario::{LinkConfig, LteConfig};
pub use channel::ChannelModel;

const RB_SUBCARRIERS: usize = 12;
const RB_BANDWIDTH_HZ: f64 = 180e3;
const SUBFRAME_S: f64 = 1e-3;
/// Radar terms this far below noise plus interference are treated as zero.
const NEGLIGIBLE: f64 = 1e-12;

fn db_to_lin(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn lin_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Random draws of one UE-to-site link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDraw {
    /// Uniform variate compared against the LoS probability.
    pub los_uniform: f64,
    /// Standard normal shadowing variate, scaled by the state's sigma.
    pub shadow_normal: f64,
}

impl LinkDraw {
    pub const NONE: LinkDraw = LinkDraw { los_uniform: 0.0, shadow_normal: 0.0 };
}

/// Coupling loss between a UE and a cell: path loss, shadowing and indoor
/// penetration, minus both antenna gains along the link.
pub fn ue_coupling_loss(ue: &Ue, cell: &Cell, draw: &LinkDraw, model: &ChannelModel, lte: &LteConfig) -> f64 {
    let d = ue.position.distance(&cell.position);
    let los = draw.los_uniform < model.los_probability(d);
    let pl = model.path_loss_db(d, los);
    let shadow = draw.shadow_normal * model.shadow_sigma_db(los);
    let indoor = if ue.indoor { lte.indoor_loss_db } else { 0.0 };
    let depression = (cell.height_m - ue.height_m).atan2(d).to_degrees();
    let bs_gain = cell.antenna.gain_dbi(cell.position.bearing_to(&ue.position), depression);
    pl + shadow + indoor - bs_gain - lte.ue_gain_dbi
}

/// Coupling losses of every UE to every cell, and attachment.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudget {
    n_cells: usize,
    /// Row-major `[ue][cell]`, dB.
    loss_db: Vec<f64>,
    /// Same layout, linear gain.
    gain: Vec<f64>,
    serving: Vec<usize>,
}

impl LinkBudget {
    /// Draw LoS states and shadowing per (UE, site) and evaluate every link.
    /// Sectors of one site share the draw.
    pub fn build<R1: Rng, R2: Rng>(
        layout: &NetworkLayout,
        lte: &LteConfig,
        los_rng: &mut R1,
        shadow_rng: &mut R2,
    ) -> Self {
        let model = ChannelModel::new(lte.deployment, lte.carrier_mhz, lte.bs_height_m, lte.ue_height_m);
        let n_sites = layout.cells.iter().map(|c| c.site).max().map_or(0, |m| m + 1);
        let n_cells = layout.cells.len();
        let mut loss_db = Vec::with_capacity(layout.ues.len() * n_cells);
        let mut draws = vec![LinkDraw::NONE; n_sites];
        for ue in &layout.ues {
            for d in draws.iter_mut() {
                d.los_uniform = los_rng.random();
                d.shadow_normal = shadow_rng.sample(StandardNormal);
            }
            for cell in &layout.cells {
                loss_db.push(ue_coupling_loss(ue, cell, &draws[cell.site], &model, lte));
            }
        }
        Self::from_losses(n_cells, loss_db)
    }

    /// Budget from a precomputed `[ue][cell]` loss table.
    pub fn from_losses(n_cells: usize, loss_db: Vec<f64>) -> Self {
        assert!(n_cells > 0 && loss_db.len().is_multiple_of(n_cells), "loss table is not [ue][cell]");
        let gain = loss_db.iter().map(|l| db_to_lin(-l)).collect();
        let serving = loss_db
            .chunks(n_cells)
            .map(|row| row.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0))
            .collect();
        LinkBudget { n_cells, loss_db, gain, serving }
    }

    pub fn n_ues(&self) -> usize {
        self.serving.len()
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn loss_db(&self, ue: usize, cell: usize) -> f64 {
        self.loss_db[ue * self.n_cells + cell]
    }

    pub fn gain(&self, ue: usize, cell: usize) -> f64 {
        self.gain[ue * self.n_cells + cell]
    }

    pub fn serving(&self, ue: usize) -> usize {
        self.serving[ue]
    }

    pub fn serving_loss_db(&self, ue: usize) -> f64 {
        self.loss_db(ue, self.serving[ue])
    }

    /// Attached UEs of each cell, in UE order.
    pub fn attached(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_cells];
        for (ue, &c) in self.serving.iter().enumerate() {
            out[c].push(ue);
        }
        out
    }
}

/// Open-loop fractional power control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerControl {
    pub p0_dbm: f64,
    pub alpha: f64,
    pub max_dbm: f64,
}

impl PowerControl {
    pub fn from_config(lte: &LteConfig) -> Self {
        PowerControl { p0_dbm: lte.p0_dbm, alpha: lte.alpha, max_dbm: lte.ue_max_power_dbm }
    }
}

/// `min(Pmax, P0 + 10 log10(M) + α·CL)` for an allocation of `n_rb` blocks.
pub fn ul_transmit_power_dbm(coupling_loss_db: f64, n_rb: usize, pc: &PowerControl) -> f64 {
    (pc.p0_dbm + 10.0 * (n_rb.max(1) as f64).log10() + pc.alpha * coupling_loss_db).min(pc.max_dbm)
}

/// Contiguous block of resource blocks given to one UE.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Allocation {
    pub ue: usize,
    pub first_rb: usize,
    pub n_rb: usize,
}

/// Round-robin allocation of all `n_rb` blocks over `ues` for the
/// `ul_index`-th uplink subframe. Blocks are split as evenly as possible and
/// the order rotates each uplink subframe; with more UEs than blocks the
/// pointer advances by the number served.
pub fn schedule_subframe(ues: &[usize], ul_index: u64, n_rb: usize) -> Vec<Allocation> {
    let n = ues.len();
    if n == 0 || n_rb == 0 {
        return Vec::new();
    }
    let k = n.min(n_rb);
    let start = if k == n { ul_index % n as u64 } else { ul_index.wrapping_mul(k as u64) % n as u64 } as usize;
    let base = n_rb / k;
    let extra = n_rb % k;
    let mut first = 0;
    (0..k)
        .map(|i| {
            let size = base + usize::from(i < extra);
            let a = Allocation { ue: ues[(start + i) % n], first_rb: first, n_rb: size };
            first += size;
            a
        })
        .collect()
}

/// Streaming exponential effective-SINR accumulator, shifted by the running
/// minimum so large SINRs never underflow.
#[derive(Debug, Clone, Copy)]
pub struct Eesm {
    beta: f64,
    min: f64,
    sum: f64,
    count: f64,
}

impl Eesm {
    pub fn new(beta: f64) -> Self {
        Eesm { beta, min: f64::INFINITY, sum: 0.0, count: 0.0 }
    }

    /// Add `count` resource elements with linear SINR `gamma`.
    pub fn add(&mut self, gamma: f64, count: f64) {
        if count <= 0.0 {
            return;
        }
        if gamma < self.min {
            self.sum = if self.sum > 0.0 { self.sum * ((gamma - self.min) / self.beta).exp() } else { 0.0 };
            self.sum += count;
            self.min = gamma;
        } else {
            self.sum += count * (-(gamma - self.min) / self.beta).exp();
        }
        self.count += count;
    }

    /// Effective SINR, linear. `None` when empty.
    pub fn effective(&self) -> Option<f64> {
        (self.count > 0.0).then(|| self.min - self.beta * (self.sum / self.count).ln())
    }
}

/// Spectral efficiency in bit/s/Hz for an effective SINR in dB.
pub fn spectral_efficiency(eff_sinr_db: f64, link: &LinkConfig) -> f64 {
    if eff_sinr_db < link.min_sinr_db || eff_sinr_db.is_nan() {
        return 0.0;
    }
    (link.efficiency * (1.0 + db_to_lin(eff_sinr_db)).log2()).min(link.max_spectral_efficiency)
}

/// Bits delivered in one subframe on `n_rb` blocks whose resource elements
/// have the given SINRs (dB).
pub fn subframe_throughput(sinr_db: &[f64], n_rb: usize, link: &LinkConfig) -> f64 {
    let mut acc = Eesm::new(link.eesm_beta);
    for &s in sinr_db {
        acc.add(db_to_lin(s), 1.0);
    }
    match acc.effective() {
        Some(g) => n_rb as f64 * RB_BANDWIDTH_HZ * SUBFRAME_S * spectral_efficiency(lin_to_db(g), link),
        None => 0.0,
    }
}

/// Transmit state of one cell in one uplink subframe.
#[derive(Debug, Clone, PartialEq)]
pub struct CellSubframe {
    pub allocations: Vec<Allocation>,
    /// Per RB: the transmitting UE and its power per subcarrier (mW).
    pub rb_tx: Vec<Option<(usize, f64)>>,
}

/// Schedules, powers and inter-cell interference of one uplink subframe.
#[derive(Debug, Clone, PartialEq)]
pub struct SubframeState {
    pub subframe: u64,
    pub cells: Vec<CellSubframe>,
    /// Other-cell interference per subcarrier, mW, `[rb][cell]`.
    intercell_mw: Vec<f64>,
    pub noise_mw: f64,
}

impl SubframeState {
    pub fn compute(
        subframe: u64,
        ul_index: u64,
        attached: &[Vec<usize>],
        budget: &LinkBudget,
        lte: &LteConfig,
        pc: &PowerControl,
    ) -> Self {
        let n_rb = lte.resource_blocks;
        let n_cells = attached.len();
        let cells: Vec<CellSubframe> = attached
            .iter()
            .map(|ues| {
                let allocations = schedule_subframe(ues, ul_index, n_rb);
                let mut rb_tx = vec![None; n_rb];
                for a in &allocations {
                    let p = ul_transmit_power_dbm(budget.serving_loss_db(a.ue), a.n_rb, pc);
                    let p_sc = db_to_lin(p - lin_to_db((a.n_rb * RB_SUBCARRIERS) as f64));
                    for slot in &mut rb_tx[a.first_rb..a.first_rb + a.n_rb] {
                        *slot = Some((a.ue, p_sc));
                    }
                }
                CellSubframe { allocations, rb_tx }
            })
            .collect();
        // [rb][cell]; each transmitter adds its contiguous gain row
        let mut intercell_mw = vec![0.0; n_rb * n_cells];
        for (c, cell) in cells.iter().enumerate() {
            for (rb, tx) in cell.rb_tx.iter().enumerate() {
                let Some((ue, p)) = *tx else { continue };
                let row = &budget.gain[ue * n_cells..(ue + 1) * n_cells];
                let acc = &mut intercell_mw[rb * n_cells..(rb + 1) * n_cells];
                for v in (0..c).chain(c + 1..n_cells) {
                    acc[v] += p * row[v];
                }
            }
        }
        SubframeState { subframe, cells, intercell_mw, noise_mw: db_to_lin(lte.noise_per_subcarrier_dbm()) }
    }

    /// Other-cell interference per subcarrier on `rb` at `cell`, mW.
    pub fn intercell_mw(&self, cell: usize, rb: usize) -> f64 {
        self.intercell_mw[rb * self.cells.len() + cell]
    }

    /// Serving signal per subcarrier on `rb` of `cell`, mW.
    pub fn signal_mw(&self, cell: usize, rb: usize, budget: &LinkBudget) -> Option<f64> {
        self.cells[cell].rb_tx[rb].map(|(ue, p)| p * budget.gain(ue, cell))
    }

    /// SINR in dB of one resource element; `symbol` counts within the
    /// subframe. Fails on resources with no scheduled UE.
    pub fn sinr_db(
        &self,
        cell: usize,
        symbol: usize,
        subcarrier: usize,
        budget: &LinkBudget,
        grid: Option<&InterferenceGrid>,
        symbols_per_subframe: usize,
    ) -> Result<f64> {
        let rb = subcarrier / RB_SUBCARRIERS;
        let s = self.signal_mw(cell, rb, budget).ok_or_else(|| {
            Error::Domain(format!(
                "subcarrier {subcarrier} of cell {cell} is not scheduled in subframe {}",
                self.subframe
            ))
        })?;
        let radar = grid.map_or(0.0, |g| {
            g.symbol_power_mw(self.subframe * symbols_per_subframe as u64 + symbol as u64) * g.profile()[subcarrier]
        });
        Ok(lin_to_db(s / (self.noise_mw + self.intercell_mw(cell, rb) + radar)))
    }
}

/// Run-averaged throughput of one UE.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct UeThroughput {
    pub drop: u32,
    pub ue: usize,
    pub cell: usize,
    pub indoor: bool,
    #[serde(rename = "coupling_loss_dB")]
    pub coupling_loss_db: f64,
    pub throughput_bps: f64,
}

/// SINR of every resource element of one cell in one uplink subframe,
/// `[symbol][subcarrier]` row-major; NaN where nothing is scheduled.
#[derive(Debug, Clone, PartialEq)]
pub struct SinrSubframe {
    pub drop: u32,
    pub cell: usize,
    pub subframe: u64,
    pub sinr_db: Vec<f32>,
}

/// Recorded SINR grids.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SinrGrid {
    pub symbols_per_subframe: usize,
    pub subcarriers: usize,
    pub subframes: Vec<SinrSubframe>,
}

/// What to record while running.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Capture {
    pub cells: Vec<usize>,
    pub start_subframe: u64,
    pub subframes: u64,
}

impl Capture {
    fn wants(&self, cell: usize, sf: u64) -> bool {
        sf >= self.start_subframe && sf < self.start_subframe + self.subframes && self.cells.contains(&cell)
    }
}

/// Simulate `n_subframes` of uplink for one drop.
///
/// `grids`, when given, holds one radar grid per cell in cell order.
pub fn run_uplink(
    lte: &LteConfig,
    layout: &NetworkLayout,
    budget: &LinkBudget,
    grids: Option<&[InterferenceGrid]>,
    n_subframes: u64,
    drop: u32,
    capture: &Capture,
) -> Result<(Vec<UeThroughput>, SinrGrid)> {
    let n_cells = layout.cells.len();
    if budget.n_cells() != n_cells || budget.n_ues() != layout.ues.len() {
        return Err(Error::MismatchedRuns("link budget does not match the layout".into()));
    }
    if let Some(g) = grids {
        if g.len() != n_cells {
            return Err(Error::MismatchedRuns(format!("{} radar grids for {n_cells} cells", g.len())));
        }
    }
    let pc = PowerControl::from_config(lte);
    let link = &lte.link;
    let attached = budget.attached();
    let sps = lte.symbols_per_subframe;
    let n_sc = lte.subcarriers();
    let n_rb = lte.resource_blocks;
    let mut bits = vec![0.0f64; layout.ues.len()];
    let mut sinr = SinrGrid { symbols_per_subframe: sps, subcarriers: n_sc, subframes: Vec::new() };
    let mut ul_index = 0u64;

    for sf in 0..n_subframes {
        if !lte.is_uplink(sf) {
            continue;
        }
        let state = SubframeState::compute(sf, ul_index, &attached, budget, lte, &pc);
        ul_index += 1;
        for cell in 0..n_cells {
            let grid = grids.map(|g| &g[cell]);
            let hits: &[(u64, f64)] = grid.map_or(&[], |g| g.subframe_symbols(sf));
            let profile: &[f64] = grid.map_or(&[], |g| g.profile());
            let clean_symbols = (sps - hits.len()) as f64;
            for a in &state.cells[cell].allocations {
                let mut acc = Eesm::new(link.eesm_beta);
                for rb in a.first_rb..a.first_rb + a.n_rb {
                    let s = state.signal_mw(cell, rb, budget).expect("allocated");
                    let base = state.noise_mw + state.intercell_mw(cell, rb);
                    let clean = s / base;
                    let mut n_clean = clean_symbols * RB_SUBCARRIERS as f64;
                    for &(_, p_sym) in hits {
                        for &frac in &profile[rb * RB_SUBCARRIERS..(rb + 1) * RB_SUBCARRIERS] {
                            let r = p_sym * frac;
                            if r <= NEGLIGIBLE * base {
                                n_clean += 1.0;
                            } else {
                                acc.add(s / (base + r), 1.0);
                            }
                        }
                    }
                    acc.add(clean, n_clean);
                }
                if let Some(g) = acc.effective() {
                    bits[a.ue] +=
                        a.n_rb as f64 * RB_BANDWIDTH_HZ * SUBFRAME_S * spectral_efficiency(lin_to_db(g), link);
                }
            }
            if capture.wants(cell, sf) {
                let mut values = vec![f32::NAN; sps * n_sc];
                for rb in 0..n_rb {
                    let Some(s) = state.signal_mw(cell, rb, budget) else { continue };
                    let base = state.noise_mw + state.intercell_mw(cell, rb);
                    for sym in 0..sps {
                        let p_sym = grid.map_or(0.0, |g| g.symbol_power_mw(sf * sps as u64 + sym as u64));
                        for sc in rb * RB_SUBCARRIERS..(rb + 1) * RB_SUBCARRIERS {
                            let r = if p_sym > 0.0 { p_sym * profile[sc] } else { 0.0 };
                            values[sym * n_sc + sc] = lin_to_db(s / (base + r)) as f32;
                        }
                    }
                }
                sinr.subframes.push(SinrSubframe { drop, cell, subframe: sf, sinr_db: values });
            }
        }
    }

    let duration_s = n_subframes as f64 * SUBFRAME_S;
    let out = layout
        .ues
        .iter()
        .enumerate()
        .map(|(i, ue)| UeThroughput {
            drop,
            ue: ue.id,
            cell: budget.serving(i),
            indoor: ue.indoor,
            coupling_loss_db: budget.serving_loss_db(i),
            throughput_bps: bits[i] / duration_s,
        })
        .collect();
    Ok((out, sinr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_layout;
    use crate::rng::stream;
    use crate::scenario::Deployment;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn macro_setup(seed: u64) -> (LteConfig, NetworkLayout, LinkBudget) {
        let lte = LteConfig::defaults_for(Deployment::Macro);
        let layout = build_layout(&lte, &mut stream(seed, "layout"));
        let budget = LinkBudget::build(&layout, &lte, &mut stream(seed, "los"), &mut stream(seed, "shadowing"));
        (lte, layout, budget)
    }

    #[test]
    fn noise_per_subcarrier() {
        assert_abs_diff_eq!(LteConfig::default().noise_per_subcarrier_dbm(), -127.239, epsilon = 1e-3);
    }

    #[test]
    fn coupling_loss_is_deterministic_and_indoor_adds_penetration() {
        let lte = LteConfig::default();
        let layout = build_layout(&lte, &mut stream(4, "layout"));
        let model = ChannelModel::new(lte.deployment, lte.carrier_mhz, lte.bs_height_m, lte.ue_height_m);
        let draw = LinkDraw { los_uniform: 0.4, shadow_normal: 0.7 };
        let mut ue = layout.ues[3].clone();
        let cell = &layout.cells[2];
        ue.indoor = false;
        let out = ue_coupling_loss(&ue, cell, &draw, &model, &lte);
        assert_eq!(out, ue_coupling_loss(&ue, cell, &draw, &model, &lte));
        ue.indoor = true;
        assert_abs_diff_eq!(ue_coupling_loss(&ue, cell, &draw, &model, &lte) - out, 20.0, epsilon = 1e-9);
    }

    #[test]
    fn budget_invariants() {
        for seed in 0..5 {
            let (_, _, b) = macro_setup(seed);
            for ue in 0..b.n_ues() {
                let best = (0..b.n_cells()).map(|c| b.loss_db(ue, c)).fold(f64::INFINITY, f64::min);
                assert_eq!(b.serving_loss_db(ue), best);
                assert!((0..b.n_cells()).all(|c| b.loss_db(ue, c) > 0.0));
            }
        }
    }

    #[test]
    fn power_control_examples() {
        let pc = PowerControl { p0_dbm: -85.0, alpha: 0.8, max_dbm: 23.0 };
        assert_eq!(ul_transmit_power_dbm(300.0, 10, &pc), 23.0);
        let flat = PowerControl { alpha: 0.0, ..pc };
        assert_eq!(ul_transmit_power_dbm(80.0, 1, &flat), -85.0);
        assert_eq!(ul_transmit_power_dbm(120.0, 1, &flat), -85.0);
        let full = PowerControl { alpha: 1.0, ..pc };
        assert_abs_diff_eq!(
            ul_transmit_power_dbm(100.0, 1, &full) - ul_transmit_power_dbm(90.0, 1, &full),
            10.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn schedule_examples() {
        let ues: Vec<usize> = (0..10).collect();
        let a = schedule_subframe(&ues, 0, 100);
        assert_eq!(a.len(), 10);
        assert!(a.iter().all(|x| x.n_rb == 10));
        assert_eq!(schedule_subframe(&[7], 5, 100), vec![Allocation { ue: 7, first_rb: 0, n_rb: 100 }]);
        assert!(schedule_subframe(&[], 0, 100).is_empty());
        // rotation moves each UE's block
        assert_ne!(schedule_subframe(&ues, 1, 100)[0].ue, a[0].ue);
    }

    #[test]
    fn eesm_examples() {
        let link = LinkConfig::default();
        let mut e = Eesm::new(1.0);
        e.add(3.0, 5.0);
        e.add(3.0, 7.0);
        assert_relative_eq!(e.effective().unwrap(), 3.0, max_relative = 1e-12);
        assert_eq!(subframe_throughput(&[-10.0; 168], 1, &link), 0.0);
        let capped = subframe_throughput(&[80.0; 168], 1, &link);
        assert_abs_diff_eq!(capped, 180e3 * 1e-3 * 6.0, epsilon = 1e-9);
        // log-sum-exp agrees with the direct formula
        let g = [0.5, 2.0, 7.0, 30.0];
        let mut e = Eesm::new(1.0);
        for x in g {
            e.add(x, 1.0);
        }
        let direct = -(g.iter().map(|x: &f64| (-x).exp()).sum::<f64>() / 4.0).ln();
        assert_relative_eq!(e.effective().unwrap(), direct, max_relative = 1e-12);
    }

    #[test]
    fn sinr_examples() {
        let (lte, layout, budget) = macro_setup(1);
        let pc = PowerControl::from_config(&lte);
        // isolated cell: one cell's UEs only, no other-cell interference
        let mut attached = vec![Vec::new(); layout.cells.len()];
        attached[0] = budget.attached()[0].clone();
        let st = SubframeState::compute(0, 0, &attached, &budget, &lte, &pc);
        let s = st.signal_mw(0, 0, &budget).unwrap();
        let got = st.sinr_db(0, 3, 0, &budget, None, 14).unwrap();
        assert_abs_diff_eq!(got, lin_to_db(s) - lte.noise_per_subcarrier_dbm(), epsilon = 1e-9);
        assert!(st.sinr_db(1, 0, 0, &budget, None, 14).is_err());

        // radar power equal to noise plus interference costs 3.01 dB
        let full = SubframeState::compute(0, 0, &budget.attached(), &budget, &lte, &pc);
        let base = full.noise_mw + full.intercell_mw(0, 50);
        let profile: std::sync::Arc<[f64]> = vec![1.0; lte.subcarriers()].into();
        let clean = full.sinr_db(0, 0, 600, &budget, None, 14).unwrap();
        let grid = InterferenceGrid::from_symbols(0, 14, vec![(0, base)], profile);
        let hit = full.sinr_db(0, 0, 600, &budget, Some(&grid), 14).unwrap();
        assert_abs_diff_eq!(clean - hit, 10.0 * 2f64.log10(), epsilon = 1e-9);
        assert_eq!(full.sinr_db(0, 2, 600, &budget, Some(&grid), 14).unwrap(), clean);
    }

    #[test]
    fn tdd_three_of_five() {
        let lte = LteConfig::default();
        for start in 0..20 {
            assert_eq!((start..start + 5).filter(|&s| lte.is_uplink(s)).count(), 3);
        }
    }

    #[test]
    fn empty_grids_match_no_grids() {
        let (lte, layout, budget) = macro_setup(2);
        let profile: std::sync::Arc<[f64]> = vec![0.5; lte.subcarriers()].into();
        let grids: Vec<_> = (0..layout.cells.len()).map(|c| InterferenceGrid::empty(c, 14, profile.clone())).collect();
        let cap = Capture::default();
        let (a, _) = run_uplink(&lte, &layout, &budget, None, 20, 0, &cap).unwrap();
        let (b, _) = run_uplink(&lte, &layout, &budget, Some(&grids), 20, 0, &cap).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|u| u.throughput_bps >= 0.0));
    }

    proptest! {
        #[test]
        fn schedule_covers_all_blocks(n in 1usize..150, idx in 0u64..1000) {
            let ues: Vec<usize> = (0..n).collect();
            let a = schedule_subframe(&ues, idx, 100);
            prop_assert_eq!(a.iter().map(|x| x.n_rb).sum::<usize>(), 100);
            let mut next = 0;
            for x in &a {
                prop_assert_eq!(x.first_rb, next);
                next += x.n_rb;
            }
            let max = a.iter().map(|x| x.n_rb).max().unwrap();
            let min = a.iter().map(|x| x.n_rb).min().unwrap();
            prop_assert!(max - min <= 1);
        }

        #[test]
        fn power_never_exceeds_cap(cl in 0.0f64..250.0, m in 1usize..100, alpha in 0.0f64..1.0) {
            let pc = PowerControl { p0_dbm: -85.0, alpha, max_dbm: 23.0 };
            prop_assert!(ul_transmit_power_dbm(cl, m, &pc) <= 23.0);
        }

        #[test]
        fn eesm_between_min_and_mean(g in proptest::collection::vec(0.001f64..1000.0, 1..40)) {
            let mut e = Eesm::new(1.0);
            for &x in &g {
                e.add(x, 1.0);
            }
            let eff = e.effective().unwrap();
            let min = g.iter().cloned().fold(f64::INFINITY, f64::min);
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            prop_assert!(eff >= min * (1.0 - 1e-9) && eff <= mean * (1.0 + 1e-9));
        }
    }
}
