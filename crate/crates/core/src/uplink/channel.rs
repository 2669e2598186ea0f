//! IMT-Advanced urban macro and urban micro path loss.
//!
//! Distances are 2-D in metres, clamped below at 10 m; frequency in GHz.
//! The NLoS branch never goes below the LoS value at the same distance.

use crate::scenario::Deployment;

const C: f64 = 299_792_458.0;
/// Effective environment height subtracted from both antenna heights.
const ENV_HEIGHT_M: f64 = 1.0;
/// Urban macro average building height and street width.
const UMA_BUILDING_M: f64 = 20.0;
const UMA_STREET_M: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub deployment: Deployment,
    pub frequency_ghz: f64,
    pub bs_height_m: f64,
    pub ue_height_m: f64,
}

impl ChannelModel {
    pub fn new(deployment: Deployment, frequency_mhz: f64, bs_height_m: f64, ue_height_m: f64) -> Self {
        ChannelModel { deployment, frequency_ghz: frequency_mhz / 1e3, bs_height_m, ue_height_m }
    }

    /// LoS probability at 2-D distance `d_m`.
    pub fn los_probability(&self, d_m: f64) -> f64 {
        let d = d_m.max(1e-3);
        let scale = match self.deployment {
            Deployment::Macro => 63.0,
            Deployment::SmallCell => 36.0,
        };
        (18.0 / d).min(1.0) * (1.0 - (-d / scale).exp()) + (-d / scale).exp()
    }

    /// Shadow-fading standard deviation in dB.
    pub fn shadow_sigma_db(&self, los: bool) -> f64 {
        match (self.deployment, los) {
            (Deployment::Macro, true) => 4.0,
            (Deployment::Macro, false) => 6.0,
            (Deployment::SmallCell, true) => 3.0,
            (Deployment::SmallCell, false) => 4.0,
        }
    }

    fn breakpoint_m(&self) -> f64 {
        4.0 * (self.bs_height_m - ENV_HEIGHT_M) * (self.ue_height_m - ENV_HEIGHT_M) * self.frequency_ghz * 1e9 / C
    }

    pub fn los_db(&self, d_m: f64) -> f64 {
        let d = d_m.max(10.0);
        let fc = self.frequency_ghz;
        if d <= self.breakpoint_m() {
            22.0 * d.log10() + 28.0 + 20.0 * fc.log10()
        } else {
            let hb = self.bs_height_m - ENV_HEIGHT_M;
            let hu = self.ue_height_m - ENV_HEIGHT_M;
            40.0 * d.log10() + 7.8 - 18.0 * hb.log10() - 18.0 * hu.log10() + 2.0 * fc.log10()
        }
    }

    pub fn nlos_db(&self, d_m: f64) -> f64 {
        let d = d_m.max(10.0);
        let fc = self.frequency_ghz;
        let raw = match self.deployment {
            Deployment::Macro => {
                let (h, w, hb, hu) = (UMA_BUILDING_M, UMA_STREET_M, self.bs_height_m, self.ue_height_m);
                161.04 - 7.1 * w.log10() + 7.5 * h.log10() - (24.37 - 3.7 * (h / hb).powi(2)) * hb.log10()
                    + (43.42 - 3.1 * hb.log10()) * (d.log10() - 3.0)
                    + 20.0 * fc.log10()
                    - (3.2 * (11.75 * hu).log10().powi(2) - 4.97)
            }
            Deployment::SmallCell => 36.7 * d.log10() + 22.7 + 26.0 * fc.log10(),
        };
        raw.max(self.los_db(d))
    }

    /// Path loss given the LoS state.
    pub fn path_loss_db(&self, d_m: f64, los: bool) -> f64 {
        if los {
            self.los_db(d_m)
        } else {
            self.nlos_db(d_m)
        }
    }
}
