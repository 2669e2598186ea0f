//! Rotating radar: configuration, beam schedule and pulse train.
//!
//! The beam steps through `ceil(scan / beamwidth)` positions per rotation,
//! each held for `rotation_period / positions`. Pulses form one continuous
//! train at the pulse repetition interval and belong to the dwell in which
//! they start. With the default figures a rotation is 2 s, 445 dwells of
//! 4.494 ms and 4000 pulses; a dwell holds nine pulses, except where the
//! 0.01-PRI shortfall of the dwell accumulates and one holds eight.

use serde::{Deserialize, Serialize};

use crate::antennas::{wrap_deg, RadarAntenna};
use crate::error::{Error, Result};

/// How the radar frequency offset is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OffsetReference {
    /// Radar carrier minus LTE carrier.
    Center,
    /// Radar carrier minus the upper LTE channel edge.
    BandEdge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadarConfig {
    #[serde(rename = "peak_power_dBm")]
    pub peak_power_dbm: f64,
    #[serde(rename = "antenna_gain_dBi")]
    pub antenna_gain_dbi: f64,
    #[serde(rename = "insertion_loss_dB")]
    pub insertion_loss_db: f64,
    pub pri_s: f64,
    pub pulse_width_s: f64,
    pub rotation_rpm: f64,
    pub beamwidth_az_deg: f64,
    pub beamwidth_el_deg: f64,
    #[serde(rename = "backlobe_floor_dB")]
    pub backlobe_floor_db: f64,
    pub scan_deg: f64,
    pub distance_km: f64,
    #[serde(rename = "freq_offset_MHz")]
    pub freq_offset_mhz: f64,
    pub offset_reference: OffsetReference,
    /// Angle of the illuminated footprint used for arc widths and
    /// main-beam dwell lists.
    pub footprint_angle_rad: f64,
    /// Beam azimuth at t = 0, measured clockwise from the radar-to-layout line.
    pub scan_phase_deg: f64,
    /// Draw the scan phase from the seeded radar stream instead.
    pub random_scan_phase: bool,
    /// Delay of the first pulse relative to LTE subframe 0.
    pub pulse_time_offset_s: f64,
}

impl Default for RadarConfig {
    fn default() -> Self {
        RadarConfig {
            peak_power_dbm: 83.0,
            antenna_gain_dbi: 45.0,
            insertion_loss_db: 2.0,
            pri_s: 0.5e-3,
            pulse_width_s: 78e-6,
            rotation_rpm: 30.0,
            beamwidth_az_deg: 0.81,
            beamwidth_el_deg: 0.81,
            backlobe_floor_db: -50.0,
            scan_deg: 360.0,
            distance_km: 50.0,
            freq_offset_mhz: 0.0,
            offset_reference: OffsetReference::Center,
            footprint_angle_rad: 0.03,
            scan_phase_deg: 0.0,
            random_scan_phase: false,
            pulse_time_offset_s: 0.0,
        }
    }
}

impl RadarConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("radar.pri_s", self.pri_s, "pulse repetition interval"),
            ("radar.pulse_width_s", self.pulse_width_s, "pulse width"),
            ("radar.rotation_rpm", self.rotation_rpm, "rotation speed"),
            ("radar.beamwidth_az_deg", self.beamwidth_az_deg, "azimuth beamwidth"),
            ("radar.beamwidth_el_deg", self.beamwidth_el_deg, "elevation beamwidth"),
            ("radar.scan_deg", self.scan_deg, "scan sector"),
            ("radar.distance_km", self.distance_km, "radar distance"),
            ("radar.footprint_angle_rad", self.footprint_angle_rad, "footprint angle"),
        ];
        for (field, v, what) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(field, format!("{what} must be > 0 (got {v})")));
            }
        }
        if self.pulse_width_s >= self.pri_s {
            return Err(Error::invalid(
                "radar.pulse_width_s",
                "pulse width must be shorter than the pulse repetition interval",
            ));
        }
        if self.scan_deg > 360.0 {
            return Err(Error::invalid("radar.scan_deg", "scan sector cannot exceed 360°"));
        }
        if !(self.backlobe_floor_db < 0.0) {
            return Err(Error::invalid("radar.backlobe_floor_dB", "floor must be negative"));
        }
        if !(0.0..self.pri_s).contains(&self.pulse_time_offset_s) {
            return Err(Error::invalid(
                "radar.pulse_time_offset_s",
                "offset must lie in [0, pulse repetition interval)",
            ));
        }
        Ok(())
    }

    pub fn rotation_period_s(&self) -> f64 {
        60.0 / self.rotation_rpm
    }

    pub fn beam_positions(&self) -> usize {
        // tolerance keeps an exact fit (e.g. 360/0.5) from rounding up
        (self.scan_deg / self.beamwidth_az_deg - 1e-9).ceil() as usize
    }

    pub fn dwell_s(&self) -> f64 {
        self.rotation_period_s() / self.beam_positions() as f64
    }

    /// Nominal pulses per dwell, `round(dwell / PRI)`.
    pub fn nominal_pulses_per_dwell(&self) -> usize {
        (self.dwell_s() / self.pri_s).round() as usize
    }

    pub fn duty_cycle(&self) -> f64 {
        self.pulse_width_s / self.pri_s
    }

    /// Boresight EIRP: peak power plus antenna gain minus insertion loss.
    pub fn eirp_dbm(&self) -> f64 {
        self.peak_power_dbm + self.antenna_gain_dbi - self.insertion_loss_db
    }

    pub fn antenna(&self) -> RadarAntenna {
        RadarAntenna::new(self.antenna_gain_dbi, self.beamwidth_az_deg, self.beamwidth_el_deg, self.backlobe_floor_db)
    }

    /// Dwell index (not wrapped) containing time `t_s`.
    pub fn dwell_index_at(&self, t_s: f64) -> u64 {
        let x = t_s * self.beam_positions() as f64 / self.rotation_period_s();
        (x + 1e-9).floor().max(0.0) as u64
    }

    /// Beam azimuth of dwell `dwell` (wrapped into the rotation).
    pub fn dwell_azimuth_deg(&self, dwell: u64, phase_deg: f64) -> f64 {
        let k = dwell % self.beam_positions() as u64;
        (phase_deg + k as f64 * self.beamwidth_az_deg).rem_euclid(360.0)
    }
}

/// One radar pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEvent {
    pub index: u64,
    pub start_s: f64,
    pub width_s: f64,
    /// Dwell counted from t = 0, not wrapped.
    pub dwell: u64,
    pub beam_azimuth_deg: f64,
    /// Boresight EIRP.
    pub eirp_dbm: f64,
}

/// Beam azimuth in degrees at time `t_s`, stepped per dwell, with scan phase 0.
pub fn beam_azimuth_at(t_s: f64, cfg: &RadarConfig) -> f64 {
    cfg.dwell_azimuth_deg(cfg.dwell_index_at(t_s), 0.0)
}

/// Time-ordered pulse train over `[0, duration_s)`.
pub fn build_schedule(cfg: &RadarConfig, duration_s: f64, phase_deg: f64) -> Vec<PulseEvent> {
    let mut out = Vec::new();
    let eirp = cfg.eirp_dbm();
    let mut k: u64 = 0;
    loop {
        let start = cfg.pulse_time_offset_s + k as f64 * cfg.pri_s;
        if start >= duration_s {
            break;
        }
        let dwell = cfg.dwell_index_at(start);
        out.push(PulseEvent {
            index: k,
            start_s: start,
            width_s: cfg.pulse_width_s,
            dwell,
            beam_azimuth_deg: cfg.dwell_azimuth_deg(dwell, phase_deg),
            eirp_dbm: eirp,
        });
        k += 1;
    }
    out
}

/// Dwell positions (within one rotation) whose beam centre lies within half
/// the footprint angle of `bs_azimuth_deg`. Returned in scan order, starting
/// with the first dwell of the run of consecutive positions.
pub fn dwells_illuminating(
    bs_azimuth_deg: f64,
    footprint_angle_rad: f64,
    cfg: &RadarConfig,
    phase_deg: f64,
) -> Vec<usize> {
    let half = 0.5 * footprint_angle_rad.to_degrees();
    let n = cfg.beam_positions();
    let hit: Vec<bool> =
        (0..n).map(|k| wrap_deg(cfg.dwell_azimuth_deg(k as u64, phase_deg) - bs_azimuth_deg).abs() <= half).collect();
    // Start after a miss so a run that wraps past position 0 stays contiguous.
    let start = match hit.iter().position(|h| !h) {
        Some(miss) => miss,
        None => return (0..n).collect(),
    };
    (0..n).map(|i| (start + i) % n).filter(|&k| hit[k]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn rotation_arithmetic() {
        let c = RadarConfig::default();
        assert_eq!(c.rotation_period_s(), 2.0);
        assert_eq!(c.beam_positions(), 445);
        assert_abs_diff_eq!(c.dwell_s(), 2.0 / 445.0, epsilon = 1e-15);
        assert_eq!(c.nominal_pulses_per_dwell(), 9);
        assert_abs_diff_eq!(c.duty_cycle(), 0.156, epsilon = 1e-12);
        assert_eq!(c.eirp_dbm(), 126.0);
    }

    #[test]
    fn schedule_examples() {
        let c = RadarConfig::default();
        let s = build_schedule(&c, c.rotation_period_s(), 0.0);
        assert_eq!(s.len(), 4000);
        assert_eq!(s[0].start_s, 0.0);
        assert_abs_diff_eq!(s[1].start_s, 0.5e-3, epsilon = 1e-15);
        let mut per_dwell = vec![0usize; 445];
        for p in &s {
            per_dwell[p.dwell as usize] += 1;
        }
        assert_eq!(per_dwell.iter().filter(|&&n| n == 9).count(), 440);
        assert_eq!(per_dwell.iter().filter(|&&n| n == 8).count(), 5);
        assert_eq!(per_dwell[0], 9);
    }

    #[test]
    fn azimuth_examples() {
        let c = RadarConfig::default();
        assert_eq!(beam_azimuth_at(0.0, &c), 0.0);
        assert_abs_diff_eq!(beam_azimuth_at(4.6e-3, &c), 0.81, epsilon = 1e-12);
        assert_abs_diff_eq!(beam_azimuth_at(2.0025, &c), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn illumination_examples() {
        let c = RadarConfig::default();
        let on_center = dwells_illuminating(0.81 * 7.0, 0.03, &c, 0.0);
        assert!(on_center.contains(&7));
        assert!((2..=3).contains(&on_center.len()));
        // a narrow footprint between beam centres sees no main-beam dwell
        assert!(dwells_illuminating(0.405, 0.005, &c, 0.0).is_empty());
        // wraps through position 0
        let wrap = dwells_illuminating(0.0, 0.03, &c, 0.0);
        assert_eq!(wrap, vec![444, 0, 1]);
    }

    #[test]
    fn validation_names_the_field() {
        let c = RadarConfig { pri_s: 0.0, ..Default::default() };
        match c.validate() {
            Err(Error::Validation { field, reason }) => {
                assert_eq!(field, "radar.pri_s");
                assert!(reason.contains("pulse repetition interval"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let c = RadarConfig { pulse_width_s: 1e-3, ..Default::default() };
        assert!(c.validate().is_err());
    }

    proptest! {
        #[test]
        fn schedule_ordered_and_disjoint(duration in 0.001f64..3.0, offset in 0.0f64..0.0004) {
            let c = RadarConfig { pulse_time_offset_s: offset, ..Default::default() };
            let s = build_schedule(&c, duration, 0.0);
            for w in s.windows(2) {
                prop_assert!(w[1].start_s > w[0].start_s + w[0].width_s);
                prop_assert!(w[1].dwell >= w[0].dwell);
            }
            prop_assert!(s.last().is_none_or(|p| p.start_s < duration));
        }

        #[test]
        fn illumination_is_one_consecutive_run(az in -180.0f64..180.0, fp in 0.001f64..0.2) {
            let c = RadarConfig::default();
            let d = dwells_illuminating(az, fp, &c, 0.0);
            for w in d.windows(2) {
                prop_assert_eq!((w[0] + 1) % 445, w[1]);
            }
        }
    }
}
