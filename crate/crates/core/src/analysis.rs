//! Post-processing: CDFs, throughput loss and exclusion-zone estimates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scenario::Deployment;
use crate::simulation::ThroughputReport;

/// Empirical CDF of per-UE throughputs as `(value, F(value))`, one step per
/// sample, sorted by value.
pub fn throughput_cdf(report: &ThroughputReport) -> Result<Vec<(f64, f64)>> {
    empirical_cdf(&report.throughputs())
}

pub fn empirical_cdf(samples: &[f64]) -> Result<Vec<(f64, f64)>> {
    if samples.is_empty() {
        return Err(Error::Empty("throughput samples"));
    }
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    Ok(v.into_iter().enumerate().map(|(i, x)| (x, (i + 1) as f64 / n)).collect())
}

/// True when `upper` first-order stochastically dominates `lower`: every
/// sorted sample of `upper` is at least the matching sample of `lower`.
pub fn dominates(upper: &[f64], lower: &[f64]) -> bool {
    if upper.len() != lower.len() {
        return false;
    }
    let mut a = upper.to_vec();
    let mut b = lower.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().zip(&b).all(|(x, y)| x >= y)
}

/// `100 · (1 − mean_interfered / mean_baseline)`; negative values are kept.
pub fn mean_loss_percent(interfered: &ThroughputReport, baseline: &ThroughputReport) -> Result<f64> {
    if interfered.identity != baseline.identity {
        return Err(Error::MismatchedRuns(format!(
            "seed/layout differ: {:?} vs {:?}",
            interfered.identity, baseline.identity
        )));
    }
    if baseline.ues.is_empty() {
        return Err(Error::Empty("baseline throughputs"));
    }
    let base = baseline.mean_bps();
    if base <= 0.0 {
        return Err(Error::Domain("baseline mean throughput is zero".into()));
    }
    Ok(100.0 * (1.0 - interfered.mean_bps() / base))
}

/// Per-UE loss in percent of the UE's own baseline throughput; UEs with no
/// baseline throughput are skipped.
pub fn per_ue_loss_percent(interfered: &ThroughputReport, baseline: &ThroughputReport) -> Result<Vec<f64>> {
    if interfered.identity != baseline.identity {
        return Err(Error::MismatchedRuns("per-UE losses need matching runs".into()));
    }
    Ok(baseline
        .ues
        .iter()
        .zip(&interfered.ues)
        .filter(|(b, _)| b.throughput_bps > 0.0)
        .map(|(b, i)| 100.0 * (1.0 - i.throughput_bps / b.throughput_bps))
        .collect())
}

/// Estimated exclusion distance and the sweep points bracketing it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExclusionZone {
    pub distance_km: f64,
    pub threshold_percent: f64,
    /// (distance, loss) just inside and just outside the estimate; equal
    /// when the threshold is met at the nearest distance.
    pub lower: (f64, f64),
    pub upper: (f64, f64),
}

/// Smallest distance at which mean loss falls to `threshold_percent`,
/// interpolating linearly between `(distance_km, loss_percent)` points.
///
/// Points may come in any order. Losses may rise with distance by at most
/// `tolerance_percent` before the estimate is refused.
pub fn exclusion_zone_km(
    points: &[(f64, f64)],
    threshold_percent: f64,
    tolerance_percent: f64,
) -> Result<ExclusionZone> {
    if points.len() < 2 {
        return Err(Error::Empty("sweep needs at least two distances"));
    }
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0));
    for w in p.windows(2) {
        if w[1].1 > w[0].1 + tolerance_percent {
            return Err(Error::NonMonotone(format!(
                "loss rises from {:.3}% at {} km to {:.3}% at {} km; run more drops",
                w[0].1, w[0].0, w[1].1, w[1].0
            )));
        }
    }
    if p[0].1 <= threshold_percent {
        return Ok(ExclusionZone { distance_km: p[0].0, threshold_percent, lower: p[0], upper: p[0] });
    }
    for w in p.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b.1 <= threshold_percent {
            let t = if a.1 == b.1 { 1.0 } else { (a.1 - threshold_percent) / (a.1 - b.1) };
            return Ok(ExclusionZone {
                distance_km: a.0 + t.clamp(0.0, 1.0) * (b.0 - a.0),
                threshold_percent,
                lower: a,
                upper: b,
            });
        }
    }
    Err(Error::ThresholdNotMet { threshold_percent, max_distance_km: p[p.len() - 1].0 })
}

/// Summary of one interfered run against its baseline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub deployment: Deployment,
    pub distance_km: f64,
    #[serde(rename = "freq_offset_MHz")]
    pub freq_offset_mhz: f64,
    pub mean_bps: f64,
    pub p5_bps: f64,
    pub p50_bps: f64,
    pub loss_percent: f64,
}

/// Sweep results of one deployment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub deployment: Deployment,
    pub baseline_mean_bps: f64,
    pub baseline_p5_bps: f64,
    pub baseline_p50_bps: f64,
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    /// Build from a baseline and interfered reports of the same drop set.
    /// Entries are ordered by offset, then distance, whatever the input order.
    pub fn from_reports(baseline: &ThroughputReport, runs: &[ThroughputReport]) -> Result<Self> {
        let mut entries = runs
            .iter()
            .map(|r| {
                let radar = r.radar.ok_or_else(|| Error::MismatchedRuns("sweep run has no radar point".into()))?;
                Ok(SweepEntry {
                    deployment: r.identity.deployment,
                    distance_km: radar.distance_km,
                    freq_offset_mhz: radar.freq_offset_mhz,
                    mean_bps: r.mean_bps(),
                    p5_bps: r.percentile_bps(0.05),
                    p50_bps: r.percentile_bps(0.5),
                    loss_percent: mean_loss_percent(r, baseline)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        entries.sort_by(|a, b| {
            a.freq_offset_mhz.total_cmp(&b.freq_offset_mhz).then(a.distance_km.total_cmp(&b.distance_km))
        });
        Ok(SweepResult {
            deployment: baseline.identity.deployment,
            baseline_mean_bps: baseline.mean_bps(),
            baseline_p5_bps: baseline.percentile_bps(0.05),
            baseline_p50_bps: baseline.percentile_bps(0.5),
            entries,
        })
    }

    /// Offsets present, ascending.
    pub fn offsets(&self) -> Vec<f64> {
        let mut o: Vec<f64> = self.entries.iter().map(|e| e.freq_offset_mhz).collect();
        o.dedup();
        o
    }

    /// (distance, loss) points at one offset.
    pub fn loss_curve(&self, freq_offset_mhz: f64) -> Vec<(f64, f64)> {
        self.entries
            .iter()
            .filter(|e| e.freq_offset_mhz == freq_offset_mhz)
            .map(|e| (e.distance_km, e.loss_percent))
            .collect()
    }

    pub fn exclusion_zone(
        &self,
        freq_offset_mhz: f64,
        threshold_percent: f64,
        tolerance_percent: f64,
    ) -> Result<ExclusionZone> {
        exclusion_zone_km(&self.loss_curve(freq_offset_mhz), threshold_percent, tolerance_percent)
    }
}
