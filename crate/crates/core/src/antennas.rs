//! Radar cosine-aperture pattern and LTE sector antenna patterns.
//!
//! The radar pattern has three pieces: the theoretical cosine-illumination
//! voltage pattern near boresight, a logarithmic side-lobe mask, and a flat
//! back-lobe floor. The switch angles are not free parameters: the
//! theoretical-to-mask switch sits where the two curves meet on the outer
//! flank of the main lobe, and the mask-to-floor switch where the mask reaches
//! the floor, so the assembled pattern is continuous.
//!
//! Sector elevation angles are *depression* angles: positive below the
//! horizon, matching the sign of the downtilt.

use std::f64::consts::{FRAC_PI_2, PI};

/// Scale of the cosine-pattern argument when the 3 dB beamwidth is in degrees.
const COSINE_ARG_SCALE: f64 = 68.8;
const MASK_SLOPE_DB: f64 = 17.51;
const MASK_KNEE: f64 = 2.33;

/// Wrap an angle in degrees into (-180, 180].
pub fn wrap_deg(angle: f64) -> f64 {
    if angle > -180.0 && angle <= 180.0 {
        return angle;
    }
    let a = angle.rem_euclid(360.0);
    if a > 180.0 {
        a - 360.0
    } else {
        a
    }
}

/// One plane of the radar's cosine pattern, normalized to 0 dB at boresight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosinePattern {
    theta3db_deg: f64,
    floor_db: f64,
    theta_m_deg: f64,
    theta_f_deg: f64,
}

impl CosinePattern {
    pub fn new(theta3db_deg: f64, floor_db: f64) -> Self {
        assert!(theta3db_deg > 0.0, "beamwidth must be positive");
        assert!(floor_db < 0.0, "floor must be below boresight");
        let mut p = CosinePattern { theta3db_deg, floor_db, theta_m_deg: 0.0, theta_f_deg: 0.0 };
        p.theta_f_deg = (theta3db_deg / MASK_KNEE) * (-floor_db / MASK_SLOPE_DB).exp();
        p.theta_m_deg = p.find_theta_m();
        p
    }

    pub fn theta3db_deg(&self) -> f64 {
        self.theta3db_deg
    }

    /// Theoretical-to-mask transition angle.
    pub fn theta_m_deg(&self) -> f64 {
        self.theta_m_deg
    }

    /// Mask-to-floor transition angle.
    pub fn theta_f_deg(&self) -> f64 {
        self.theta_f_deg
    }

    /// First null of the theoretical pattern, where the argument reaches 3π/2.
    pub fn first_null_deg(&self) -> f64 {
        let s = 1.5 * self.theta3db_deg / COSINE_ARG_SCALE;
        s.min(1.0).asin().to_degrees()
    }

    /// Theoretical cosine-illumination pattern in dB relative to boresight.
    pub fn theoretical_db(&self, theta_deg: f64) -> f64 {
        let mu = COSINE_ARG_SCALE * PI * theta_deg.to_radians().sin() / self.theta3db_deg;
        let q = FRAC_PI_2 * FRAC_PI_2;
        let ratio = if (mu.abs() - FRAC_PI_2).abs() < 1e-9 {
            // removable singularity at mu = ±π/2
            q / PI
        } else {
            q * mu.cos() / (q - mu * mu)
        };
        20.0 * ratio.abs().log10()
    }

    /// Side-lobe mask in dB.
    pub fn mask_db(&self, theta_deg: f64) -> f64 {
        -MASK_SLOPE_DB * (MASK_KNEE * theta_deg.abs() / self.theta3db_deg).ln()
    }

    /// Assembled pattern, dB relative to boresight, for any angle in degrees.
    pub fn gain_db(&self, theta_deg: f64) -> f64 {
        let t = wrap_deg(theta_deg).abs();
        if t <= self.theta_m_deg {
            self.theoretical_db(t)
        } else if t <= self.theta_f_deg {
            self.mask_db(t).max(self.floor_db)
        } else {
            self.floor_db
        }
    }

    /// Outer crossing of the theoretical pattern and the mask on the main-lobe
    /// flank, between the half-power angle and the first null.
    fn find_theta_m(&self) -> f64 {
        let diff = |t: f64| self.theoretical_db(t) - self.mask_db(t);
        let lo_limit = 0.5 * self.theta3db_deg;
        let null = self.first_null_deg();
        let step = self.theta3db_deg / 400.0;
        // Walk inward from the null until the theoretical curve is above the mask.
        let mut hi = null * (1.0 - 1e-9);
        let mut lo = hi - step;
        while lo > lo_limit && diff(lo) <= 0.0 {
            hi = lo;
            lo -= step;
        }
        if lo <= lo_limit {
            // No crossing on the flank: hand over at the half-power angle.
            return lo_limit;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if diff(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Normalized radar gain in dB for an off-boresight angle, with a -50 dB floor.
pub fn radar_normalized_gain_db(theta_off_boresight_deg: f64, theta3db_deg: f64) -> f64 {
    CosinePattern::new(theta3db_deg, RadarAntenna::DEFAULT_FLOOR_DB).gain_db(theta_off_boresight_deg)
}

/// Rotating radar antenna: independent azimuth and elevation cosine patterns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarAntenna {
    pub boresight_gain_dbi: f64,
    pub floor_db: f64,
    az: CosinePattern,
    el: CosinePattern,
}

impl RadarAntenna {
    pub const DEFAULT_FLOOR_DB: f64 = -50.0;

    pub fn new(boresight_gain_dbi: f64, theta3db_az_deg: f64, theta3db_el_deg: f64, floor_db: f64) -> Self {
        RadarAntenna {
            boresight_gain_dbi,
            floor_db,
            az: CosinePattern::new(theta3db_az_deg, floor_db),
            el: CosinePattern::new(theta3db_el_deg, floor_db),
        }
    }

    pub fn azimuth_pattern(&self) -> &CosinePattern {
        &self.az
    }

    pub fn elevation_pattern(&self) -> &CosinePattern {
        &self.el
    }

    /// Transmit gain in dBi; the summed plane attenuation is floored jointly.
    pub fn tx_gain_dbi(&self, az_off_deg: f64, el_off_deg: f64) -> f64 {
        let rel = (self.az.gain_db(az_off_deg) + self.el.gain_db(el_off_deg)).max(self.floor_db);
        self.boresight_gain_dbi + rel
    }
}

impl Default for RadarAntenna {
    fn default() -> Self {
        RadarAntenna::new(45.0, 0.81, 0.81, Self::DEFAULT_FLOOR_DB)
    }
}

/// Radar transmit gain with the default antenna (45 dBi, 0.81° beams).
pub fn radar_tx_gain_dbi(az_off_deg: f64, el_off_deg: f64) -> f64 {
    RadarAntenna::default().tx_gain_dbi(az_off_deg, el_off_deg)
}

/// Parabolic per-plane attenuation, `-min(12 ((angle - tilt)/θ3dB)², Am)`.
pub fn sector_plane_gain_db(angle_deg: f64, tilt_deg: f64, theta3db_deg: f64, am_db: f64) -> f64 {
    let x = wrap_deg(angle_deg - tilt_deg) / theta3db_deg;
    -(12.0 * x * x).min(am_db)
}

/// LTE base-station antenna: three-sector parabolic pattern, or omni in
/// azimuth with the same elevation pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorAntenna {
    pub boresight_az_deg: f64,
    pub theta3db_az_deg: f64,
    pub theta3db_el_deg: f64,
    pub az_tilt_deg: f64,
    pub downtilt_deg: f64,
    pub max_attenuation_db: f64,
    pub max_gain_dbi: f64,
    pub omni: bool,
}

impl SectorAntenna {
    pub fn macro_sector(boresight_az_deg: f64) -> Self {
        SectorAntenna {
            boresight_az_deg,
            theta3db_az_deg: 70.0,
            theta3db_el_deg: 10.0,
            az_tilt_deg: 0.0,
            downtilt_deg: 12.0,
            max_attenuation_db: 20.0,
            max_gain_dbi: 17.0,
            omni: false,
        }
    }

    /// Combined attenuation for angles relative to the antenna boresight.
    pub fn composite_gain_db(&self, az_rel_deg: f64, depression_deg: f64) -> f64 {
        composite_gain_db(az_rel_deg, depression_deg, self)
    }

    /// Absolute gain in dBi toward a world azimuth and depression angle.
    pub fn gain_dbi(&self, az_world_deg: f64, depression_deg: f64) -> f64 {
        self.max_gain_dbi + self.composite_gain_db(az_world_deg - self.boresight_az_deg, depression_deg)
    }
}

/// Composite sector pattern `-min(-(G_A + G_E), Am)`, angles relative to
/// the antenna boresight (azimuth) and the horizon (depression).
pub fn composite_gain_db(az_deg: f64, el_deg: f64, antenna: &SectorAntenna) -> f64 {
    let am = antenna.max_attenuation_db;
    let ga =
        if antenna.omni { 0.0 } else { sector_plane_gain_db(az_deg, antenna.az_tilt_deg, antenna.theta3db_az_deg, am) };
    let ge = sector_plane_gain_db(el_deg, antenna.downtilt_deg, antenna.theta3db_el_deg, am);
    -(-(ga + ge)).min(am)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn radar_pattern_anchor_values() {
        assert_abs_diff_eq!(radar_normalized_gain_db(0.0, 0.81), 0.0, epsilon = 1e-12);
        assert_eq!(radar_normalized_gain_db(180.0, 0.81), -50.0);
        let p = CosinePattern::new(0.81, -50.0);
        // (θ3dB/2.33)·e^(50/17.51)
        assert_abs_diff_eq!(p.theta_f_deg(), 6.043128, epsilon = 1e-5);
        // -17.51·ln(2.33)
        assert_abs_diff_eq!(p.mask_db(0.81), -14.811153, epsilon = 1e-5);
        assert_abs_diff_eq!(p.gain_db(0.81), -14.811153, epsilon = 1e-5);
        // Outer flank crossing, found independently with brentq.
        assert_abs_diff_eq!(p.theta_m_deg(), 0.790554, epsilon = 1e-5);
    }

    #[test]
    fn theoretical_half_power_point() {
        let p = CosinePattern::new(0.81, -50.0);
        // cosine aperture voltage pattern is ~3 dB down at half the beamwidth
        assert_abs_diff_eq!(p.theoretical_db(0.405), -3.06, epsilon = 0.05);
        assert!(p.theoretical_db(p.first_null_deg()) < -100.0);
    }

    #[test]
    fn removable_singularity_is_finite() {
        let p = CosinePattern::new(0.81, -50.0);
        let t = (FRAC_PI_2 * 0.81 / (68.8 * PI)).asin().to_degrees();
        let at = p.theoretical_db(t);
        let near = p.theoretical_db(t * (1.0 + 1e-6));
        assert!(at.is_finite());
        assert_abs_diff_eq!(at, near, epsilon = 1e-3);
    }

    #[test]
    fn radar_tx_gain_examples() {
        assert_abs_diff_eq!(radar_tx_gain_dbi(0.0, 0.0), 45.0, epsilon = 1e-12);
        assert_abs_diff_eq!(radar_tx_gain_dbi(180.0, 0.0), -5.0, epsilon = 1e-12);
        // both planes in the mask region: the joint floor binds
        assert_abs_diff_eq!(radar_tx_gain_dbi(3.0, 3.0), -5.0, epsilon = 1e-12);
    }

    #[test]
    fn sector_plane_examples() {
        assert_eq!(sector_plane_gain_db(12.0, 12.0, 10.0, 20.0), 0.0);
        assert_abs_diff_eq!(sector_plane_gain_db(22.0, 12.0, 10.0, 20.0), -12.0, epsilon = 1e-12);
        assert_eq!(sector_plane_gain_db(170.0, 0.0, 70.0, 20.0), -20.0);
    }

    #[test]
    fn composite_examples() {
        let a = SectorAntenna::macro_sector(0.0);
        assert_eq!(a.composite_gain_db(0.0, 12.0), 0.0);
        // -12 in each plane: 24 dB summed, capped at Am = 20
        assert_abs_diff_eq!(a.composite_gain_db(70.0, 22.0), -20.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.composite_gain_db(0.0, 22.0), -12.0, epsilon = 1e-12);
        let omni = SectorAntenna { omni: true, ..a };
        assert_eq!(omni.composite_gain_db(135.0, 12.0), 0.0);
    }

    #[test]
    fn transitions_are_continuous_on_fine_sweep() {
        let p = CosinePattern::new(0.81, -50.0);
        let mut prev = p.gain_db(0.0);
        let mut t = 0.01;
        while t <= 10.0 {
            let g = p.gain_db(t);
            let crosses = (t - 0.01 <= p.theta_m_deg() && t > p.theta_m_deg())
                || (t - 0.01 <= p.theta_f_deg() && t > p.theta_f_deg());
            if crosses {
                assert!((g - prev).abs() <= 0.5, "jump {} dB at {t}", g - prev);
            }
            prev = g;
            t += 0.01;
        }
    }

    proptest! {
        #[test]
        fn radar_pattern_bounds_and_evenness(t in -180.0f64..180.0, bw in 0.3f64..5.0) {
            let p = CosinePattern::new(bw, -50.0);
            let g = p.gain_db(t);
            prop_assert!(g <= 1e-12);
            prop_assert!(g >= -50.0);
            prop_assert_eq!(g, p.gain_db(-t));
        }

        #[test]
        fn mask_region_strictly_decreasing(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let p = CosinePattern::new(0.81, -50.0);
            let span = p.theta_f_deg() - p.theta_m_deg();
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-6);
            let t1 = p.theta_m_deg() + lo * span;
            let t2 = p.theta_m_deg() + hi * span;
            prop_assume!(t1 > p.theta_m_deg());
            prop_assert!(p.gain_db(t2) < p.gain_db(t1));
        }

        #[test]
        fn composite_is_capped_and_below_each_plane(az in -180.0f64..180.0, el in -90.0f64..90.0) {
            let a = SectorAntenna::macro_sector(0.0);
            let g = a.composite_gain_db(az, el);
            let ga = sector_plane_gain_db(az, 0.0, 70.0, 20.0);
            let ge = sector_plane_gain_db(el, 12.0, 10.0, 20.0);
            prop_assert!((-20.0..=0.0).contains(&g));
            prop_assert!(g <= ga + 1e-12 && g <= ge + 1e-12);
            prop_assert_eq!(g, a.composite_gain_db(-az, el));
        }
    }
}
