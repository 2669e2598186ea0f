//! Radar-to-base-station path loss.
//!
//! Free-space loss inside the radio horizon, and beyond it the larger of
//! free-space loss and the irregular terrain model in area prediction mode.

pub mod itm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use itm::{AreaModel, AreaParams, Climate, Polarization, Siting, Variability};

/// Environment of the radar-to-eNB link. Electrical and climate values
/// default to the continental-temperate inland case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationConfig {
    #[serde(rename = "frequency_MHz")]
    pub frequency_mhz: f64,
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub terrain_roughness_m: f64,
    pub dielectric: f64,
    #[serde(rename = "conductivity_S_per_m")]
    pub conductivity_s_per_m: f64,
    #[serde(rename = "refractivity_N")]
    pub refractivity_n: f64,
    pub climate: Climate,
    pub variability: Variability,
    pub polarization: Polarization,
    pub tx_siting: Siting,
    pub rx_siting: Siting,
    pub reliability: f64,
    pub confidence: f64,
}

impl Default for PropagationConfig {
    fn default() -> Self {
        PropagationConfig {
            frequency_mhz: 3500.0,
            tx_height_m: 50.0,
            rx_height_m: 25.0,
            terrain_roughness_m: 10.0,
            dielectric: 15.0,
            conductivity_s_per_m: 0.005,
            refractivity_n: 301.0,
            climate: Climate::ContinentalTemperate,
            variability: Variability::SingleMessage,
            polarization: Polarization::Horizontal,
            tx_siting: Siting::Random,
            rx_siting: Siting::Random,
            reliability: 0.5,
            confidence: 0.5,
        }
    }
}

impl PropagationConfig {
    pub fn area_params(&self) -> AreaParams {
        AreaParams {
            frequency_mhz: self.frequency_mhz,
            tx_height_m: self.tx_height_m,
            rx_height_m: self.rx_height_m,
            terrain_roughness_m: self.terrain_roughness_m,
            dielectric: self.dielectric,
            conductivity_s_per_m: self.conductivity_s_per_m,
            refractivity_n: self.refractivity_n,
            climate: self.climate,
            polarization: self.polarization,
            tx_siting: self.tx_siting,
            rx_siting: self.rx_siting,
            variability: self.variability,
            time: self.reliability,
            location: self.reliability,
            confidence: self.confidence,
        }
    }
}

/// Free-space path loss, frequency in MHz and distance in km.
pub fn fspl_db(frequency_mhz: f64, distance_km: f64) -> Result<f64> {
    if !(frequency_mhz > 0.0) || !(distance_km > 0.0) {
        return Err(Error::Domain(format!(
            "free-space loss needs positive frequency and distance (got {frequency_mhz} MHz, {distance_km} km)"
        )));
    }
    Ok(20.0 * frequency_mhz.log10() + 20.0 * distance_km.log10() + 32.45)
}

/// Radio line-of-sight distance in km between antennas at the given heights (m).
pub fn los_horizon_km(h_tx_m: f64, h_rx_m: f64) -> f64 {
    4.1 * (h_tx_m.max(0.0).sqrt() + h_rx_m.max(0.0).sqrt())
}

/// Area-mode ITM median loss in dB.
pub fn itm_apm_loss_db(distance_km: f64, cfg: &PropagationConfig) -> Result<f64> {
    AreaModel::new(cfg.area_params())?.loss_db(distance_km)
}

/// Path loss used for the radar link; see [`PathLoss::loss_db`].
pub fn radar_path_loss_db(distance_km: f64, cfg: &PropagationConfig) -> Result<f64> {
    PathLoss::new(cfg)?.loss_db(distance_km)
}

/// Prepared radar path-loss model for one propagation configuration.
#[derive(Debug, Clone)]
pub struct PathLoss {
    frequency_mhz: f64,
    horizon_km: f64,
    itm: AreaModel,
}

/// One row of a loss-versus-distance table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossSample {
    pub distance_km: f64,
    pub fspl_db: f64,
    pub itm_db: Option<f64>,
    pub selected_db: f64,
}

impl PathLoss {
    pub fn new(cfg: &PropagationConfig) -> Result<Self> {
        Ok(PathLoss {
            frequency_mhz: cfg.frequency_mhz,
            horizon_km: los_horizon_km(cfg.tx_height_m, cfg.rx_height_m),
            itm: AreaModel::new(cfg.area_params())?,
        })
    }

    pub fn horizon_km(&self) -> f64 {
        self.horizon_km
    }

    pub fn itm(&self) -> &AreaModel {
        &self.itm
    }

    /// True when `distance_km` is at or beyond the radio horizon.
    pub fn uses_itm(&self, distance_km: f64) -> bool {
        distance_km >= self.horizon_km
    }

    /// FSPL inside the horizon; `max(FSPL, ITM)` at and beyond it.
    pub fn loss_db(&self, distance_km: f64) -> Result<f64> {
        let fs = fspl_db(self.frequency_mhz, distance_km)?;
        if !self.uses_itm(distance_km) {
            return Ok(fs);
        }
        Ok(fs.max(self.itm.loss_db(distance_km)?))
    }

    pub fn sample(&self, distance_km: f64) -> Result<LossSample> {
        let fs = fspl_db(self.frequency_mhz, distance_km)?;
        let itm = self.itm.loss_db(distance_km).ok();
        Ok(LossSample { distance_km, fspl_db: fs, itm_db: itm, selected_db: self.loss_db(distance_km)? })
    }
}
