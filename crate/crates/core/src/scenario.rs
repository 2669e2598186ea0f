//! Scenario definition, loading and validation.
//!
//! A scenario file is TOML with optional tables `[radar]`, `[lte]`,
//! `[propagation]`, `[sim]` and `[sweep]`. Anything omitted takes its
//! default; the LTE and propagation defaults depend on `lte.deployment`.
//! Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use toml::Value;

use crate::error::{Error, Result};
use crate::propagation::PropagationConfig;
use crate::radar::RadarConfig;

/// Network flavour of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Deployment {
    /// Three-sector macro sites, urban-macro channel.
    Macro,
    /// Omnidirectional small cells, urban-micro channel.
    SmallCell,
}

impl Deployment {
    pub fn as_str(self) -> &'static str {
        match self {
            Deployment::Macro => "macro",
            Deployment::SmallCell => "small_cell",
        }
    }
}

impl std::str::FromStr for Deployment {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "macro" => Ok(Deployment::Macro),
            "small_cell" | "small-cell" | "small" => Ok(Deployment::SmallCell),
            other => Err(Error::Parse(format!("unknown deployment `{other}` (expected macro or small_cell)"))),
        }
    }
}

impl std::fmt::Display for Deployment {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Mapping from effective SINR to throughput.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub eesm_beta: f64,
    pub efficiency: f64,
    pub max_spectral_efficiency: f64,
    #[serde(rename = "min_sinr_dB")]
    pub min_sinr_db: f64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        LinkConfig { eesm_beta: 1.0, efficiency: 0.75, max_spectral_efficiency: 6.0, min_sinr_db: -7.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LteConfig {
    pub deployment: Deployment,
    #[serde(rename = "bandwidth_MHz")]
    pub bandwidth_mhz: f64,
    #[serde(rename = "carrier_MHz")]
    pub carrier_mhz: f64,
    pub resource_blocks: usize,
    #[serde(rename = "subcarrier_spacing_kHz")]
    pub subcarrier_spacing_khz: f64,
    pub symbols_per_subframe: usize,
    pub sites: usize,
    pub sectors_per_site: usize,
    pub isd_m: f64,
    pub small_cells_per_macro_cell: usize,
    pub small_cell_min_separation_m: f64,
    /// UEs of a small cell are dropped within this radius of it.
    pub small_cell_ue_radius_m: f64,
    pub bs_height_m: f64,
    #[serde(rename = "bs_gain_dBi")]
    pub bs_gain_dbi: f64,
    pub downtilt_deg: f64,
    #[serde(rename = "theta3dB_az_deg")]
    pub theta3db_az_deg: f64,
    #[serde(rename = "theta3dB_el_deg")]
    pub theta3db_el_deg: f64,
    #[serde(rename = "max_attenuation_dB")]
    pub max_attenuation_db: f64,
    pub ues_per_cell: usize,
    pub indoor_fraction: f64,
    pub min_ue_distance_m: f64,
    pub ue_height_m: f64,
    pub ue_speed_kmh: f64,
    #[serde(rename = "ue_gain_dBi")]
    pub ue_gain_dbi: f64,
    #[serde(rename = "ue_max_power_dBm")]
    pub ue_max_power_dbm: f64,
    #[serde(rename = "bs_noise_figure_dB")]
    pub bs_noise_figure_db: f64,
    #[serde(rename = "thermal_noise_dBm_per_Hz")]
    pub thermal_noise_dbm_per_hz: f64,
    #[serde(rename = "indoor_loss_dB")]
    pub indoor_loss_db: f64,
    /// Receiver cable and body loss between the eNB antenna and the
    /// point where radar power is counted.
    #[serde(rename = "rx_loss_dB")]
    pub rx_loss_db: f64,
    /// Open-loop power control target per resource block.
    #[serde(rename = "p0_dBm")]
    pub p0_dbm: f64,
    pub alpha: f64,
    pub tdd_ul_ms: usize,
    pub tdd_dl_ms: usize,
    #[serde(default)]
    pub link: LinkConfig,
}

impl LteConfig {
    pub fn defaults_for(deployment: Deployment) -> Self {
        let macro_ = deployment == Deployment::Macro;
        LteConfig {
            deployment,
            bandwidth_mhz: 20.0,
            carrier_mhz: 3500.0,
            resource_blocks: 100,
            subcarrier_spacing_khz: 15.0,
            symbols_per_subframe: 14,
            sites: 7,
            sectors_per_site: 3,
            isd_m: 500.0,
            small_cells_per_macro_cell: 4,
            small_cell_min_separation_m: 40.0,
            small_cell_ue_radius_m: 40.0,
            bs_height_m: if macro_ { 25.0 } else { 10.0 },
            bs_gain_dbi: if macro_ { 17.0 } else { 5.0 },
            downtilt_deg: 12.0,
            theta3db_az_deg: 70.0,
            theta3db_el_deg: 10.0,
            max_attenuation_db: 20.0,
            ues_per_cell: if macro_ { 10 } else { 30 },
            indoor_fraction: if macro_ { 0.8 } else { 0.2 },
            min_ue_distance_m: if macro_ { 25.0 } else { 5.0 },
            ue_height_m: 1.5,
            ue_speed_kmh: 3.0,
            ue_gain_dbi: 0.0,
            ue_max_power_dbm: 23.0,
            bs_noise_figure_db: 5.0,
            thermal_noise_dbm_per_hz: -174.0,
            indoor_loss_db: 20.0,
            rx_loss_db: 0.0,
            p0_dbm: -85.0,
            alpha: 0.8,
            tdd_ul_ms: 3,
            tdd_dl_ms: 2,
            link: LinkConfig::default(),
        }
    }

    pub fn subcarriers(&self) -> usize {
        self.resource_blocks * 12
    }

    pub fn subcarrier_spacing_hz(&self) -> f64 {
        self.subcarrier_spacing_khz * 1e3
    }

    pub fn symbol_s(&self) -> f64 {
        1e-3 / self.symbols_per_subframe as f64
    }

    /// Noise power per subcarrier at the eNB, dBm.
    pub fn noise_per_subcarrier_dbm(&self) -> f64 {
        self.thermal_noise_dbm_per_hz + 10.0 * self.subcarrier_spacing_hz().log10() + self.bs_noise_figure_db
    }

    /// Uplink-on for subframe `sf` (1 ms each) under the TDD cycle.
    pub fn is_uplink(&self, sf: u64) -> bool {
        (sf % (self.tdd_ul_ms + self.tdd_dl_ms) as u64) < (self.tdd_ul_ms as u64)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lte.bandwidth_MHz", self.bandwidth_mhz),
            ("lte.carrier_MHz", self.carrier_mhz),
            ("lte.subcarrier_spacing_kHz", self.subcarrier_spacing_khz),
            ("lte.isd_m", self.isd_m),
            ("lte.bs_height_m", self.bs_height_m),
            ("lte.ue_height_m", self.ue_height_m),
            ("lte.theta3dB_az_deg", self.theta3db_az_deg),
            ("lte.theta3dB_el_deg", self.theta3db_el_deg),
            ("lte.max_attenuation_dB", self.max_attenuation_db),
            ("lte.small_cell_ue_radius_m", self.small_cell_ue_radius_m),
        ];
        for (field, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(field, format!("must be > 0 (got {v})")));
            }
        }
        let counts = [
            ("lte.resource_blocks", self.resource_blocks),
            ("lte.symbols_per_subframe", self.symbols_per_subframe),
            ("lte.sites", self.sites),
            ("lte.sectors_per_site", self.sectors_per_site),
            ("lte.ues_per_cell", self.ues_per_cell),
            ("lte.tdd_ul_ms", self.tdd_ul_ms),
        ];
        for (field, v) in counts {
            if v == 0 {
                return Err(Error::invalid(field, "must be at least 1"));
            }
        }
        if self.sectors_per_site != 3 {
            return Err(Error::invalid("lte.sectors_per_site", "the layout is built from three-sector sites"));
        }
        if self.sites != 1 && self.sites != 7 {
            return Err(Error::invalid("lte.sites", "the hexagonal layout supports 1 or 7 sites"));
        }
        if self.deployment == Deployment::SmallCell && self.small_cells_per_macro_cell == 0 {
            return Err(Error::invalid("lte.small_cells_per_macro_cell", "must be at least 1"));
        }
        if self.resource_blocks as f64 * 12.0 * self.subcarrier_spacing_khz > self.bandwidth_mhz * 1e3 {
            return Err(Error::invalid("lte.resource_blocks", "occupied bandwidth exceeds the channel"));
        }
        if !(0.0..=1.0).contains(&self.indoor_fraction) {
            return Err(Error::invalid("lte.indoor_fraction", "must lie in [0, 1]"));
        }
        if !(self.min_ue_distance_m >= 0.0) {
            return Err(Error::invalid("lte.min_ue_distance_m", "must be ≥ 0"));
        }
        if self.deployment == Deployment::SmallCell && self.min_ue_distance_m >= self.small_cell_ue_radius_m {
            return Err(Error::invalid("lte.min_ue_distance_m", "must be smaller than lte.small_cell_ue_radius_m"));
        }
        if self.ue_max_power_dbm > 23.0 {
            return Err(Error::invalid("lte.ue_max_power_dBm", "UE transmit power cannot exceed 23 dBm"));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid("lte.alpha", "path-loss compensation factor must lie in [0, 1]"));
        }
        if !(self.indoor_loss_db >= 0.0) || !(self.rx_loss_db >= 0.0) {
            return Err(Error::invalid("lte.indoor_loss_dB", "losses must be ≥ 0"));
        }
        if !(self.link.eesm_beta > 0.0) {
            return Err(Error::invalid("lte.link.eesm_beta", "must be > 0"));
        }
        if !(self.link.efficiency > 0.0) || !(self.link.max_spectral_efficiency > 0.0) {
            return Err(Error::invalid("lte.link.efficiency", "efficiency and cap must be > 0"));
        }
        Ok(())
    }
}

impl Default for LteConfig {
    fn default() -> Self {
        Self::defaults_for(Deployment::Macro)
    }
}

/// Run control.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimControl {
    pub seed: u64,
    pub duration_s: f64,
    pub drops: u32,
    /// Cells whose SINR grid is recorded; empty selects the cell nearest
    /// the layout centroid that faces the radar.
    pub sinr_cells: Vec<usize>,
    /// First subframe of the SINR capture window.
    pub sinr_start_subframe: u64,
    /// Length of the SINR capture window in subframes.
    pub sinr_subframes: u64,
}

impl Default for SimControl {
    fn default() -> Self {
        SimControl {
            seed: 1,
            duration_s: 5.0,
            drops: 1,
            sinr_cells: Vec::new(),
            sinr_start_subframe: 0,
            sinr_subframes: 10,
        }
    }
}

impl SimControl {
    pub fn subframes(&self) -> u64 {
        (self.duration_s * 1e3 - 1e-9).ceil() as u64
    }
}

/// Distances and offsets evaluated by a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub distances_km: Vec<f64>,
    #[serde(rename = "freq_offsets_MHz")]
    pub freq_offsets_mhz: Vec<f64>,
    pub exclusion_threshold_percent: f64,
    /// Allowed increase of loss with distance before the exclusion-zone
    /// estimate refuses to interpolate.
    pub monotone_tolerance_percent: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            distances_km: vec![50.0, 100.0, 150.0, 200.0],
            freq_offsets_mhz: vec![0.0],
            exclusion_threshold_percent: 5.0,
            monotone_tolerance_percent: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub radar: RadarConfig,
    pub lte: LteConfig,
    pub propagation: PropagationConfig,
    pub sim: SimControl,
    pub sweep: SweepConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario::preset(Deployment::Macro)
    }
}

/// Propagation defaults for a deployment: receive height follows the eNB and
/// terrain is rougher for small cells.
pub fn propagation_defaults(deployment: Deployment) -> PropagationConfig {
    match deployment {
        Deployment::Macro => PropagationConfig::default(),
        Deployment::SmallCell => {
            PropagationConfig { rx_height_m: 10.0, terrain_roughness_m: 20.0, ..PropagationConfig::default() }
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    Value::try_from(v).expect("config types serialize to TOML")
}

/// Overlay `top` onto `base`, table by table.
fn merge(base: &mut Value, top: Value) {
    match (base, top) {
        (Value::Table(b), Value::Table(t)) => {
            for (k, v) in t {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_table() && v.is_table() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, t) => *b = t,
    }
}

impl Scenario {
    /// Fully defaulted scenario for a deployment.
    pub fn preset(deployment: Deployment) -> Self {
        Scenario {
            radar: RadarConfig::default(),
            lte: LteConfig::defaults_for(deployment),
            propagation: propagation_defaults(deployment),
            sim: SimControl::default(),
            sweep: SweepConfig::default(),
        }
    }

    /// Parse, default and validate a scenario document.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let doc: Value = text.parse::<toml::Table>().map(Value::Table).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_value(doc)
    }

    fn from_value(doc: Value) -> Result<Self> {
        let table = doc.as_table().ok_or_else(|| Error::Parse("scenario must be a table".into()))?;
        for key in table.keys() {
            if !["radar", "lte", "propagation", "sim", "sweep"].contains(&key.as_str()) {
                return Err(Error::Parse(format!("unknown section `{key}`")));
            }
        }
        let deployment = match table.get("lte").and_then(|l| l.get("deployment")) {
            None => Deployment::Macro,
            Some(Value::String(s)) => s.parse()?,
            Some(other) => return Err(Error::Parse(format!("lte.deployment must be a string, got {other}"))),
        };
        let mut full = to_value(&Scenario::preset(deployment));
        merge(&mut full, doc);
        let scenario: Scenario = full.try_into().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Parse scenario text, apply `section.key=value` overrides to the raw
    /// document, then default and validate. Deployment-dependent fields not
    /// given explicitly follow the final `lte.deployment`.
    pub fn resolve<S: AsRef<str>>(text: &str, overrides: &[S]) -> Result<Self> {
        let mut doc: Value = text.parse::<toml::Table>().map(Value::Table).map_err(|e| Error::Parse(e.to_string()))?;
        apply_overrides(&mut doc, overrides)?;
        Self::from_value(doc)
    }

    /// Apply overrides to an already resolved scenario. Every field is
    /// explicit here, so changing the deployment keeps the current heights,
    /// gains and counts.
    pub fn with_overrides<S: AsRef<str>>(&self, overrides: &[S]) -> Result<Self> {
        let mut doc = to_value(self);
        apply_overrides(&mut doc, overrides)?;
        Self::from_value(doc)
    }

    /// Serialize with every default materialized.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.radar.validate()?;
        self.lte.validate()?;
        let p = &self.propagation;
        for (field, v) in [
            ("propagation.frequency_MHz", p.frequency_mhz),
            ("propagation.tx_height_m", p.tx_height_m),
            ("propagation.rx_height_m", p.rx_height_m),
            ("propagation.dielectric", p.dielectric),
            ("propagation.conductivity_S_per_m", p.conductivity_s_per_m),
            ("propagation.refractivity_N", p.refractivity_n),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(field, format!("must be > 0 (got {v})")));
            }
        }
        if !(p.terrain_roughness_m >= 0.0) {
            return Err(Error::invalid("propagation.terrain_roughness_m", "must be ≥ 0"));
        }
        for (field, q) in [("propagation.reliability", p.reliability), ("propagation.confidence", p.confidence)] {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::invalid(field, "quantile must lie in (0, 1)"));
            }
        }
        // ITM's own parameter checks
        crate::propagation::AreaModel::new(p.area_params())
            .map_err(|e| Error::invalid("propagation", e.to_string()))?;

        let s = &self.sim;
        if !(s.duration_s > 0.0) || !s.duration_s.is_finite() {
            return Err(Error::invalid("sim.duration_s", "duration must be > 0"));
        }
        if s.drops == 0 {
            return Err(Error::invalid("sim.drops", "at least one drop is needed"));
        }
        let w = &self.sweep;
        if w.distances_km.is_empty() {
            return Err(Error::invalid("sweep.distances_km", "at least one distance is needed"));
        }
        if let Some(d) = w.distances_km.iter().find(|d| !(**d > 0.0) || !d.is_finite()) {
            return Err(Error::invalid("sweep.distances_km", format!("distances must be > 0 (got {d})")));
        }
        if !w.distances_km.iter().any(|d| (d - self.radar.distance_km).abs() < 1e-9) {
            return Err(Error::invalid(
                "radar.distance_km",
                format!("{} km is not in sweep.distances_km {:?}", self.radar.distance_km, w.distances_km),
            ));
        }
        if w.freq_offsets_mhz.is_empty() || w.freq_offsets_mhz.iter().any(|f| !f.is_finite()) {
            return Err(Error::invalid("sweep.freq_offsets_MHz", "needs at least one finite offset"));
        }
        if !(w.exclusion_threshold_percent > 0.0) {
            return Err(Error::invalid("sweep.exclusion_threshold_percent", "must be > 0"));
        }
        if !(w.monotone_tolerance_percent >= 0.0) {
            return Err(Error::invalid("sweep.monotone_tolerance_percent", "must be ≥ 0"));
        }
        Ok(())
    }
}

fn apply_overrides<S: AsRef<str>>(doc: &mut Value, overrides: &[S]) -> Result<()> {
    for raw in overrides {
        let raw = raw.as_ref();
        let (path, val) = raw
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("override `{raw}` is not of the form key=value")))?;
        let path = path.trim();
        let keys: Vec<&str> = path.split('.').collect();
        if keys.len() < 2 || keys.iter().any(|k| k.is_empty()) {
            return Err(Error::Parse(format!("override key `{path}` must look like section.key")));
        }
        let mut slot = &mut *doc;
        for k in &keys[..keys.len() - 1] {
            let t = slot
                .as_table_mut()
                .ok_or_else(|| Error::Parse(format!("override key `{path}`: `{k}` is not a section")))?;
            slot = t.entry(k.to_string()).or_insert_with(|| Value::Table(Default::default()));
        }
        slot.as_table_mut()
            .ok_or_else(|| Error::Parse(format!("override key `{path}` is not inside a section")))?
            .insert(keys[keys.len() - 1].to_string(), parse_literal(val.trim()));
    }
    Ok(())
}

fn parse_literal(val: &str) -> Value {
    // parse as the right-hand side of a one-line document
    format!("v = {val}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(val.to_string()))
}

/// Parse and validate scenario text.
pub fn load_scenario(config_text: &str) -> Result<Scenario> {
    Scenario::from_toml_str(config_text)
}
