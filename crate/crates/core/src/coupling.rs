//! Radar pulses to interference power per eNB, OFDM symbol and subcarrier.
//!
//! A pulse deposits its received power into every uplink symbol it
//! overlaps, weighted by the overlapped fraction of the symbol. The spectral
//! split is the same for every pulse (a rectangular pulse has a sinc²
//! spectrum), so a grid stores per-symbol power once and one shared vector
//! of per-subcarrier fractions.

use std::sync::Arc;

use crate::antennas::{wrap_deg, RadarAntenna};
use crate::geometry::BsRadarGeometry;
use crate::radar::{OffsetReference, PulseEvent, RadarConfig};
use crate::scenario::LteConfig;

const GL8_NODES: [f64; 4] =
    [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
const GL8_WEIGHTS: [f64; 4] =
    [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];

/// Normalized energy density of a rectangular pulse, `τ sinc²(π f τ)`.
fn sinc2_density(f_hz: f64, tau_s: f64) -> f64 {
    let x = std::f64::consts::PI * f_hz * tau_s;
    if x.abs() < 1e-8 {
        tau_s
    } else {
        let s = x.sin() / x;
        tau_s * s * s
    }
}

/// Fraction of a rectangular pulse's energy inside a frequency bin.
///
/// The bin is `bin_width_hz` wide and centred `bin_center_offset_hz` from
/// the pulse carrier. Composite 8-point Gauss-Legendre over panels no wider
/// than a quarter of the sinc² lobe width.
pub fn spectral_fraction(bin_center_offset_hz: f64, bin_width_hz: f64, pulse_width_s: f64) -> f64 {
    let lo = bin_center_offset_hz - 0.5 * bin_width_hz;
    let panels = ((4.0 * bin_width_hz * pulse_width_s).ceil() as usize).max(2);
    let h = bin_width_hz / panels as f64;
    let mut sum = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        for (x, w) in GL8_NODES.iter().zip(GL8_WEIGHTS) {
            let dx = 0.5 * h * x;
            sum += w * (sinc2_density(mid - dx, pulse_width_s) + sinc2_density(mid + dx, pulse_width_s));
        }
    }
    (0.5 * h * sum).clamp(0.0, 1.0)
}

/// Radar carrier minus LTE carrier in Hz.
pub fn radar_offset_hz(lte: &LteConfig, radar: &RadarConfig) -> f64 {
    let offset = radar.freq_offset_mhz * 1e6;
    match radar.offset_reference {
        OffsetReference::Center => offset,
        OffsetReference::BandEdge => 0.5 * lte.bandwidth_mhz * 1e6 + offset,
    }
}

/// Per-subcarrier energy fraction. Subcarrier `k` sits at
/// `(k - n/2) · Δf` from the LTE carrier.
pub fn subcarrier_profile(lte: &LteConfig, radar: &RadarConfig) -> Vec<f64> {
    let n = lte.subcarriers();
    let df = lte.subcarrier_spacing_hz();
    let offset = radar_offset_hz(lte, radar);
    (0..n).map(|k| spectral_fraction((k as f64 - (n / 2) as f64) * df - offset, df, radar.pulse_width_s)).collect()
}

/// Radar-to-eNB link terms that do not change from pulse to pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarLink {
    pub cell: usize,
    /// Scan-frame azimuth of the eNB.
    pub azimuth_deg: f64,
    /// Elevation of the eNB off the horizontal radar beam.
    pub elevation_deg: f64,
    /// eNB antenna gain toward the radar.
    pub bs_gain_dbi: f64,
    pub path_loss_db: f64,
    pub rx_loss_db: f64,
}

impl RadarLink {
    pub fn new(geometry: &BsRadarGeometry, bs_gain_dbi: f64, path_loss_db: f64, rx_loss_db: f64) -> Self {
        RadarLink {
            cell: geometry.cell,
            azimuth_deg: geometry.azimuth_from_radar_deg,
            elevation_deg: geometry.elevation_deg,
            bs_gain_dbi,
            path_loss_db,
            rx_loss_db,
        }
    }
}

/// In-pulse power at the eNB receiver, summed over all frequencies.
///
/// EIRP at boresight, corrected by the radar pattern toward the eNB, minus
/// path loss, plus eNB gain, minus receiver losses.
pub fn received_pulse_power_dbm(pulse: &PulseEvent, link: &RadarLink, radar: &RadarAntenna) -> f64 {
    let az_off = wrap_deg(pulse.beam_azimuth_deg - link.azimuth_deg);
    let pattern = radar.tx_gain_dbi(az_off, link.elevation_deg) - radar.boresight_gain_dbi;
    pulse.eirp_dbm + pattern - link.path_loss_db + link.bs_gain_dbi - link.rx_loss_db
}

/// Radar interference at one eNB over a run.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceGrid {
    pub cell: usize,
    symbols_per_subframe: u64,
    /// (absolute symbol index, mean in-symbol power in mW), ascending.
    symbols: Vec<(u64, f64)>,
    profile: Arc<[f64]>,
}

impl InterferenceGrid {
    pub fn empty(cell: usize, symbols_per_subframe: usize, profile: Arc<[f64]>) -> Self {
        InterferenceGrid { cell, symbols_per_subframe: symbols_per_subframe as u64, symbols: Vec::new(), profile }
    }

    /// Grid from explicit (absolute symbol, mW) entries.
    pub fn from_symbols(
        cell: usize,
        symbols_per_subframe: usize,
        mut symbols: Vec<(u64, f64)>,
        profile: Arc<[f64]>,
    ) -> Self {
        symbols.sort_by_key(|(s, _)| *s);
        symbols.dedup_by(|b, a| {
            let same = a.0 == b.0;
            if same {
                a.1 += b.1;
            }
            same
        });
        InterferenceGrid { cell, symbols_per_subframe: symbols_per_subframe as u64, symbols, profile }
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn profile(&self) -> &[f64] {
        &self.profile
    }

    /// Symbols with radar power, as (absolute symbol, total mW).
    pub fn symbols(&self) -> &[(u64, f64)] {
        &self.symbols
    }

    /// Hit symbols inside subframe `sf`.
    pub fn subframe_symbols(&self, sf: u64) -> &[(u64, f64)] {
        let lo = sf * self.symbols_per_subframe;
        let hi = lo + self.symbols_per_subframe;
        let a = self.symbols.partition_point(|(s, _)| *s < lo);
        let b = self.symbols.partition_point(|(s, _)| *s < hi);
        &self.symbols[a..b]
    }

    /// Total radar power of a symbol summed over all frequencies, mW.
    pub fn symbol_power_mw(&self, symbol: u64) -> f64 {
        match self.symbols.binary_search_by_key(&symbol, |(s, _)| *s) {
            Ok(i) => self.symbols[i].1,
            Err(_) => 0.0,
        }
    }

    /// Power on one subcarrier of one symbol in dBm; `-inf` where no pulse lands.
    pub fn power_dbm(&self, symbol: u64, subcarrier: usize) -> f64 {
        let p = self.symbol_power_mw(symbol) * self.profile[subcarrier];
        10.0 * p.log10()
    }

    /// Radar energy inside the LTE band in joules.
    pub fn in_band_energy_j(&self, symbol_s: f64) -> f64 {
        let band: f64 = self.profile.iter().sum();
        self.symbols.iter().map(|(_, p)| p * 1e-3 * symbol_s).sum::<f64>() * band
    }
}

/// Deposit every pulse of `schedule` into the uplink symbols it overlaps.
pub fn build_interference_grid(
    schedule: &[PulseEvent],
    link: &RadarLink,
    radar: &RadarAntenna,
    lte: &LteConfig,
    profile: Arc<[f64]>,
) -> InterferenceGrid {
    let ts = lte.symbol_s();
    let sps = lte.symbols_per_subframe as u64;
    let mut grid = InterferenceGrid::empty(link.cell, lte.symbols_per_subframe, profile);
    // snap to the symbol grid so pulses aligned with a boundary do not leave
    // a rounding sliver in the preceding symbol
    let snap = |x: f64| {
        let r = x.round();
        if (x - r).abs() < 1e-9 {
            r
        } else {
            x
        }
    };
    for pulse in schedule {
        let p_mw = 10f64.powf(received_pulse_power_dbm(pulse, link, radar) / 10.0);
        let s0 = snap(pulse.start_s / ts);
        let s1 = snap((pulse.start_s + pulse.width_s) / ts);
        let mut sym = s0.floor() as u64;
        while (sym as f64) < s1 {
            let overlap = s1.min(sym as f64 + 1.0) - s0.max(sym as f64);
            if overlap > 1e-12 && lte.is_uplink(sym / sps) {
                let add = p_mw * overlap;
                match grid.symbols.last_mut() {
                    Some((s, p)) if *s == sym => *p += add,
                    _ => grid.symbols.push((sym, add)),
                }
            }
            sym += 1;
        }
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radar::build_schedule;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    // Closed-form oracle: (1/π)[F(πτf₂) − F(πτf₁)], F(x) = Si(2x) − sin²x / x,
    // evaluated independently with a library sine integral.
    const CENTRED: f64 = 0.831_308_711_5;
    const NEXT_BIN: f64 = 5.799_666_942_9e-2;
    const AT_1_MHZ: f64 = 1.109_259_777_9e-5;
    const AT_5_MHZ: f64 = 4.436_673_725_2e-7;
    const IN_BAND_0: f64 = 0.999_855_667_7;
    const IN_BAND_5: f64 = 0.999_790_914_7;
    const IN_BAND_10: f64 = 6.098_312e-4;
    const SPAN_50: f64 = 0.997_973_617_4;

    const TAU: f64 = 78e-6;

    #[test]
    fn matches_closed_form() {
        assert_relative_eq!(spectral_fraction(0.0, 15e3, TAU), CENTRED, max_relative = 1e-8);
        assert_relative_eq!(spectral_fraction(15e3, 15e3, TAU), NEXT_BIN, max_relative = 1e-7);
        assert_relative_eq!(spectral_fraction(1e6, 15e3, TAU), AT_1_MHZ, max_relative = 1e-6);
        assert_relative_eq!(spectral_fraction(5e6, 15e3, TAU), AT_5_MHZ, max_relative = 1e-6);
        assert_relative_eq!(spectral_fraction(0.0, 100.0 / TAU, TAU), SPAN_50, max_relative = 1e-8);
    }

    #[test]
    fn in_band_totals() {
        let lte = LteConfig::default();
        for (off, want) in [(0.0, IN_BAND_0), (5.0, IN_BAND_5), (10.0, IN_BAND_10)] {
            let radar = RadarConfig { freq_offset_mhz: off, ..Default::default() };
            let total: f64 = subcarrier_profile(&lte, &radar).iter().sum();
            assert_relative_eq!(total, want, max_relative = 1e-6);
        }
    }

    #[test]
    fn envelope_decays() {
        let c = spectral_fraction(0.0, 15e3, TAU);
        let a = spectral_fraction(1e6, 15e3, TAU);
        let b = spectral_fraction(5e6, 15e3, TAU);
        assert!(b < a && a < c);
    }

    #[test]
    fn profile_peaks_at_band_centre() {
        let p = subcarrier_profile(&LteConfig::default(), &RadarConfig::default());
        let peak = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert_eq!(peak, 600);
    }

    #[test]
    fn band_edge_reference_shifts_by_half_bandwidth() {
        let lte = LteConfig::default();
        let r = RadarConfig { offset_reference: OffsetReference::BandEdge, freq_offset_mhz: 5.0, ..Default::default() };
        assert_eq!(radar_offset_hz(&lte, &r), 15e6);
    }

    fn boresight_link(path_loss_db: f64) -> RadarLink {
        RadarLink { cell: 0, azimuth_deg: 0.0, elevation_deg: 0.0, bs_gain_dbi: 17.0, path_loss_db, rx_loss_db: 0.0 }
    }

    fn pulse_at(az: f64) -> PulseEvent {
        PulseEvent { index: 0, start_s: 0.0, width_s: TAU, dwell: 0, beam_azimuth_deg: az, eirp_dbm: 126.0 }
    }

    #[test]
    fn received_power_examples() {
        let ant = RadarAntenna::default();
        let pl = crate::propagation::fspl_db(3500.0, 50.0).unwrap();
        assert_abs_diff_eq!(received_pulse_power_dbm(&pulse_at(0.0), &boresight_link(pl), &ant), 5.69, epsilon = 0.005);
        assert_abs_diff_eq!(
            received_pulse_power_dbm(&pulse_at(180.0), &boresight_link(pl), &ant),
            -44.31,
            epsilon = 0.005
        );
        assert_abs_diff_eq!(
            received_pulse_power_dbm(&pulse_at(0.0), &boresight_link(pl + 20.0), &ant),
            -14.31,
            epsilon = 0.005
        );
    }

    fn grid_for(duration: f64, lte: &LteConfig) -> InterferenceGrid {
        let radar = RadarConfig::default();
        let sched = build_schedule(&radar, duration, 0.0);
        let profile: Arc<[f64]> = subcarrier_profile(lte, &radar).into();
        build_interference_grid(&sched, &boresight_link(137.31), &radar.antenna(), lte, profile)
    }

    #[test]
    fn footprint_is_symbols_1_2_8_9() {
        let lte = LteConfig::default();
        let g = grid_for(0.1, &lte);
        assert!(!g.is_empty());
        for (s, _) in g.symbols() {
            assert!(lte.is_uplink(s / 14));
            assert!([0, 1, 7, 8].contains(&(s % 14)), "hit in symbol index {}", s % 14);
        }
        // first pulse: 71.4 µs fills symbol 0, 6.6 µs spills into symbol 1
        let full = g.symbol_power_mw(0);
        let spill = g.symbol_power_mw(1);
        assert_relative_eq!(spill / full, (TAU - 1e-3 / 14.0) / (1e-3 / 14.0), max_relative = 1e-9);
        assert_eq!(g.symbol_power_mw(2), 0.0);
        assert_eq!(g.power_dbm(2, 600), f64::NEG_INFINITY);
        assert!(g.symbols().iter().all(|(s, _)| s / 14 % 5 < 3));
    }

    #[test]
    fn energy_is_conserved() {
        let lte = LteConfig { tdd_ul_ms: 5, tdd_dl_ms: 0, ..Default::default() };
        let radar = RadarConfig::default();
        let sched = build_schedule(&radar, 0.05, 0.0);
        let link = boresight_link(137.31);
        let profile: Arc<[f64]> = subcarrier_profile(&lte, &radar).into();
        let g = build_interference_grid(&sched, &link, &radar.antenna(), &lte, profile.clone());
        let band: f64 = profile.iter().sum();
        let want: f64 = sched
            .iter()
            .map(|p| 10f64.powf(received_pulse_power_dbm(p, &link, &radar.antenna()) / 10.0) * 1e-3 * p.width_s)
            .sum::<f64>()
            * band;
        assert_relative_eq!(g.in_band_energy_j(lte.symbol_s()), want, max_relative = 1e-9);
    }

    #[test]
    fn offsets_reduce_in_band_power() {
        let lte = LteConfig::default();
        let sched = build_schedule(&RadarConfig::default(), 0.02, 0.0);
        let energy = |off: f64| {
            let radar = RadarConfig { freq_offset_mhz: off, ..Default::default() };
            let profile: Arc<[f64]> = subcarrier_profile(&lte, &radar).into();
            build_interference_grid(&sched, &boresight_link(150.0), &radar.antenna(), &lte, profile)
                .in_band_energy_j(lte.symbol_s())
        };
        let (e0, e5, e10) = (energy(0.0), energy(5.0), energy(10.0));
        assert!(e10 < e5 && e5 < e0);
    }

    proptest! {
        #[test]
        fn fraction_bounded(c in -2e7f64..2e7, w in 1.0f64..1e6, tau in 1e-6f64..1e-3) {
            let f = spectral_fraction(c, w, tau);
            prop_assert!((0.0..=1.0).contains(&f));
        }

        #[test]
        fn adjacent_bins_add(c in -1e6f64..1e6, w in 1e3f64..1e5) {
            let whole = spectral_fraction(c, 2.0 * w, TAU);
            let halves = spectral_fraction(c - 0.5 * w, w, TAU) + spectral_fraction(c + 0.5 * w, w, TAU);
            prop_assert!((whole - halves).abs() <= 1e-9 * whole.max(1e-12) + 1e-15);
        }

        #[test]
        fn backlobe_is_50_db_down(az in 10.0f64..180.0) {
            let ant = RadarAntenna::default();
            let main = received_pulse_power_dbm(&pulse_at(0.0), &boresight_link(140.0), &ant);
            let side = received_pulse_power_dbm(&pulse_at(az), &boresight_link(140.0), &ant);
            prop_assert!((main - side - 50.0).abs() < 1e-9);
        }
    }
}
