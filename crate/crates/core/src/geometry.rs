//! Hexagonal network layout, UE drops and radar-relative geometry.
//!
//! World coordinates are metres with the layout centred on the origin.
//! World azimuths are counter-clockwise from +x. The radar sits on the +x
//! axis, so sector 0 of every site (boresight 0°) faces it. Radar scan
//! azimuths are a separate frame: clockwise from the radar-to-centroid line.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::antennas::{wrap_deg, SectorAntenna};
use crate::scenario::{Deployment, LteConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// World azimuth in degrees from `self` toward `other`.
    pub fn bearing_to(&self, other: &Point) -> f64 {
        (other.y - self.y).atan2(other.x - self.x).to_degrees()
    }
}

/// One eNB: a macro sector or a small cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub id: usize,
    /// Independent shadowing site. Sectors of one macro site share it.
    pub site: usize,
    /// Macro cell area the cell was placed in (its own id for macro cells).
    pub macro_cell: usize,
    pub position: Point,
    pub height_m: f64,
    pub antenna: SectorAntenna,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ue {
    pub id: usize,
    pub position: Point,
    pub height_m: f64,
    pub indoor: bool,
    /// Cell the UE was dropped for. Attachment is decided by coupling loss.
    pub home_cell: usize,
    pub speed_kmh: f64,
    pub heading_deg: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    pub deployment: Deployment,
    pub sites: Vec<Point>,
    pub cells: Vec<Cell>,
    pub ues: Vec<Ue>,
}

impl NetworkLayout {
    pub fn centroid(&self) -> Point {
        let n = self.sites.len() as f64;
        let (sx, sy) = self.sites.iter().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
        Point::new(sx / n, sy / n)
    }

    /// Cells of the radar-facing macro sector nearest the centroid, or the
    /// small cell nearest it.
    pub fn centre_cell(&self) -> usize {
        let c = self.centroid();
        let facing = |cell: &&Cell| cell.antenna.omni || wrap_deg(cell.antenna.boresight_az_deg).abs() < 1e-9;
        self.cells
            .iter()
            .filter(facing)
            .min_by(|a, b| a.position.distance(&c).total_cmp(&b.position.distance(&c)))
            .map(|c| c.id)
            .unwrap_or(0)
    }
}

/// Site positions of the 1- or 7-site hexagonal cluster.
pub fn hex_sites(n_sites: usize, isd_m: f64) -> Vec<Point> {
    let mut sites = vec![Point::new(0.0, 0.0)];
    if n_sites > 1 {
        for k in 0..6 {
            let a = (30.0 + 60.0 * k as f64).to_radians();
            sites.push(Point::new(isd_m * a.cos(), isd_m * a.sin()));
        }
    }
    sites
}

/// Point-in-hexagon test for a site's coverage area (flat sides toward the
/// neighbouring sites at 30° + k·60°).
fn in_site_hexagon(p: Point, isd_m: f64) -> bool {
    [30f64, 90.0, 150.0].iter().all(|a| {
        let (s, c) = a.to_radians().sin_cos();
        (p.x * c + p.y * s).abs() <= 0.5 * isd_m
    })
}

/// Sector of a three-sector site covering world azimuth `az_deg`.
fn sector_of(az_deg: f64) -> usize {
    ((az_deg + 60.0).rem_euclid(360.0) / 120.0).floor() as usize % 3
}

/// Uniform point in sector `sector` of a site's hexagon, at least `min_m`
/// from the site.
fn sample_in_sector<R: Rng>(rng: &mut R, site: Point, sector: usize, isd_m: f64, min_m: f64) -> Point {
    let r = isd_m / 3f64.sqrt();
    loop {
        let p = Point::new(rng.random_range(-r..=r), rng.random_range(-0.5 * isd_m..=0.5 * isd_m));
        let d = p.x.hypot(p.y);
        if d < min_m || !in_site_hexagon(p, isd_m) {
            continue;
        }
        if sector_of(p.y.atan2(p.x).to_degrees()) != sector {
            continue;
        }
        return Point::new(site.x + p.x, site.y + p.y);
    }
}

/// Uniform point in the annulus `min_m ≤ r ≤ max_m` around `centre`.
fn sample_in_annulus<R: Rng>(rng: &mut R, centre: Point, min_m: f64, max_m: f64) -> Point {
    let u: f64 = rng.random();
    let r = (min_m * min_m + u * (max_m * max_m - min_m * min_m)).sqrt();
    let a = rng.random_range(0.0..std::f64::consts::TAU);
    Point::new(centre.x + r * a.cos(), centre.y + r * a.sin())
}

/// Antenna of a cell under `cfg`.
pub fn sector_antenna(cfg: &LteConfig, boresight_deg: f64, omni: bool) -> SectorAntenna {
    SectorAntenna {
        boresight_az_deg: boresight_deg,
        theta3db_az_deg: cfg.theta3db_az_deg,
        theta3db_el_deg: cfg.theta3db_el_deg,
        az_tilt_deg: 0.0,
        downtilt_deg: cfg.downtilt_deg,
        max_attenuation_db: cfg.max_attenuation_db,
        max_gain_dbi: cfg.bs_gain_dbi,
        omni,
    }
}

/// Build the cell layout and drop UEs.
///
/// Macro: three sectors per site with boresights 0°, 120° and 240°, UEs
/// uniform over each sector's part of the site hexagon. Small cells: placed
/// uniformly within each macro sector area keeping a minimum separation,
/// UEs uniform within a disc around their cell. In both cases an exact
/// share `round(indoor_fraction × n)` of each cell's UEs is indoor.
pub fn build_layout<R: Rng>(cfg: &LteConfig, rng: &mut R) -> NetworkLayout {
    let sites = hex_sites(cfg.sites, cfg.isd_m);
    let mut cells = Vec::new();
    match cfg.deployment {
        Deployment::Macro => {
            for (s, &pos) in sites.iter().enumerate() {
                for k in 0..3 {
                    let id = cells.len();
                    cells.push(Cell {
                        id,
                        site: s,
                        macro_cell: id,
                        position: pos,
                        height_m: cfg.bs_height_m,
                        antenna: sector_antenna(cfg, 120.0 * k as f64, false),
                    });
                }
            }
        }
        Deployment::SmallCell => {
            let mut placed: Vec<Point> = Vec::new();
            for (s, &pos) in sites.iter().enumerate() {
                for k in 0..3 {
                    let macro_cell = 3 * s + k;
                    for _ in 0..cfg.small_cells_per_macro_cell {
                        let mut attempts = 0u32;
                        let p = loop {
                            let p = sample_in_sector(rng, pos, k, cfg.isd_m, 0.0);
                            attempts += 1;
                            // give up on separation rather than loop forever
                            // when the area is over-full
                            if attempts > 10_000
                                || placed.iter().all(|q| q.distance(&p) >= cfg.small_cell_min_separation_m)
                            {
                                break p;
                            }
                        };
                        placed.push(p);
                        let id = cells.len();
                        cells.push(Cell {
                            id,
                            site: id,
                            macro_cell,
                            position: p,
                            height_m: cfg.bs_height_m,
                            antenna: sector_antenna(cfg, 0.0, true),
                        });
                    }
                }
            }
        }
    }

    let mut ues = Vec::with_capacity(cells.len() * cfg.ues_per_cell);
    for cell in &cells {
        let n = cfg.ues_per_cell;
        let n_indoor = (cfg.indoor_fraction * n as f64).round() as usize;
        let mut indoor: Vec<bool> = (0..n).map(|i| i < n_indoor).collect();
        indoor.shuffle(rng);
        for flag in indoor {
            let position = match cfg.deployment {
                Deployment::Macro => {
                    let k = cell.id % 3;
                    sample_in_sector(rng, sites[cell.site], k, cfg.isd_m, cfg.min_ue_distance_m)
                }
                Deployment::SmallCell => {
                    sample_in_annulus(rng, cell.position, cfg.min_ue_distance_m, cfg.small_cell_ue_radius_m)
                }
            };
            ues.push(Ue {
                id: ues.len(),
                position,
                height_m: cfg.ue_height_m,
                indoor: flag,
                home_cell: cell.id,
                speed_kmh: cfg.ue_speed_kmh,
                heading_deg: rng.random_range(0.0..360.0),
            });
        }
    }

    NetworkLayout { deployment: cfg.deployment, sites, cells, ues }
}

/// Radar position for a given distance from the layout centroid.
pub fn radar_position(layout: &NetworkLayout, distance_km: f64) -> Point {
    let c = layout.centroid();
    Point::new(c.x + distance_km * 1e3, c.y)
}

/// Radar-relative geometry of one eNB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BsRadarGeometry {
    pub cell: usize,
    /// Slant range between the antennas.
    pub range_km: f64,
    pub ground_range_km: f64,
    /// Scan-frame azimuth of the eNB seen from the radar, clockwise from
    /// the radar-to-centroid line.
    pub azimuth_from_radar_deg: f64,
    /// Elevation of the eNB seen from the radar (negative: below).
    pub elevation_deg: f64,
    /// World azimuth from the eNB toward the radar.
    pub bearing_to_radar_deg: f64,
    /// Depression of the radar seen from the eNB (negative: above horizon).
    pub depression_to_radar_deg: f64,
}

/// Range, azimuth and elevation of every eNB from a radar `distance_km`
/// east of the layout centroid with its antenna at `radar_height_m`.
pub fn radar_geometry(layout: &NetworkLayout, distance_km: f64, radar_height_m: f64) -> Vec<BsRadarGeometry> {
    let radar = radar_position(layout, distance_km);
    let boresight = radar.bearing_to(&layout.centroid());
    layout
        .cells
        .iter()
        .map(|cell| {
            let ground = radar.distance(&cell.position);
            let dh = cell.height_m - radar_height_m;
            let az = wrap_deg(-(radar.bearing_to(&cell.position) - boresight));
            let elev = dh.atan2(ground).to_degrees();
            BsRadarGeometry {
                cell: cell.id,
                range_km: ground.hypot(dh) / 1e3,
                ground_range_km: ground / 1e3,
                azimuth_from_radar_deg: az,
                elevation_deg: elev,
                bearing_to_radar_deg: cell.position.bearing_to(&radar),
                depression_to_radar_deg: elev,
            }
        })
        .collect()
}

/// Width of the illuminated arc at `distance_km`, small-angle chord.
pub fn illuminated_arc_width(distance_km: f64, footprint_angle_rad: f64) -> f64 {
    distance_km * footprint_angle_rad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn layout(d: Deployment, seed: u64) -> (LteConfig, NetworkLayout) {
        let cfg = LteConfig::defaults_for(d);
        let l = build_layout(&cfg, &mut stream(seed, "layout"));
        (cfg, l)
    }

    #[test]
    fn macro_counts() {
        let (_, l) = layout(Deployment::Macro, 1);
        assert_eq!(l.sites.len(), 7);
        assert_eq!(l.cells.len(), 21);
        assert_eq!(l.ues.len(), 210);
        assert!(l.cells.iter().all(|c| c.height_m == 25.0 && c.antenna.max_gain_dbi == 17.0));
    }

    #[test]
    fn small_cell_counts() {
        let (_, l) = layout(Deployment::SmallCell, 1);
        assert_eq!(l.cells.len(), 84);
        assert_eq!(l.ues.len(), 2520);
        assert!(l.cells.iter().all(|c| c.antenna.omni && c.height_m == 10.0));
        for m in 0..21 {
            assert_eq!(l.cells.iter().filter(|c| c.macro_cell == m).count(), 4);
        }
    }

    #[test]
    fn hex_neighbours_at_isd() {
        let s = hex_sites(7, 500.0);
        for p in &s[1..] {
            assert_abs_diff_eq!(p.distance(&s[0]), 500.0, epsilon = 1e-9);
        }
        for i in 1..7 {
            let j = if i == 6 { 1 } else { i + 1 };
            assert_abs_diff_eq!(s[i].distance(&s[j]), 500.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn radar_geometry_examples() {
        let (_, l) = layout(Deployment::Macro, 1);
        let g = radar_geometry(&l, 50.0, 50.0);
        assert_abs_diff_eq!(g[0].ground_range_km, 50.0, epsilon = 1e-12);
        assert_abs_diff_eq!(g[0].azimuth_from_radar_deg, 0.0, epsilon = 1e-12);
        // -25 m over 50 km
        assert_abs_diff_eq!(g[0].elevation_deg, (-5e-4f64).atan().to_degrees(), epsilon = 1e-12);
        assert_abs_diff_eq!(g[0].elevation_deg, -0.02865, epsilon = 1e-5);
        assert_abs_diff_eq!(g[0].bearing_to_radar_deg, 0.0, epsilon = 1e-12);

        let mut probe = l.clone();
        probe.cells[0].position = Point::new(0.0, 250.0);
        let g = radar_geometry(&probe, 50.0, 50.0);
        assert_abs_diff_eq!(g[0].azimuth_from_radar_deg, (0.25f64 / 50.0).atan().to_degrees(), epsilon = 1e-9);
        assert_abs_diff_eq!(g[0].azimuth_from_radar_deg, 0.2865, epsilon = 1e-4);
    }

    #[test]
    fn arc_widths() {
        for (d, w) in [(50.0, 1.5), (100.0, 3.0), (150.0, 4.5), (200.0, 6.0)] {
            assert_abs_diff_eq!(illuminated_arc_width(d, 0.03), w, epsilon = 1e-12);
        }
        assert_eq!(illuminated_arc_width(100.0, 0.03) / illuminated_arc_width(50.0, 0.03), 2.0);
    }

    #[test]
    fn centre_cell_faces_radar() {
        let (_, l) = layout(Deployment::Macro, 3);
        assert_eq!(l.centre_cell(), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn ue_constraints_hold(seed in any::<u64>(), small in any::<bool>()) {
            let d = if small { Deployment::SmallCell } else { Deployment::Macro };
            let (cfg, l) = layout(d, seed);
            for ue in &l.ues {
                let home = &l.cells[ue.home_cell];
                prop_assert!(ue.position.distance(&home.position) >= cfg.min_ue_distance_m - 1e-9);
                if small {
                    prop_assert!(ue.position.distance(&home.position) <= cfg.small_cell_ue_radius_m + 1e-9);
                } else {
                    let rel = Point::new(ue.position.x - home.position.x, ue.position.y - home.position.y);
                    prop_assert!(in_site_hexagon(rel, cfg.isd_m));
                }
            }
            let want = (cfg.indoor_fraction * cfg.ues_per_cell as f64).round() as usize;
            for cell in &l.cells {
                let n = l.ues.iter().filter(|u| u.home_cell == cell.id && u.indoor).count();
                prop_assert_eq!(n, want);
            }
            if small {
                for (i, a) in l.cells.iter().enumerate() {
                    for b in &l.cells[i + 1..] {
                        prop_assert!(a.position.distance(&b.position) >= cfg.small_cell_min_separation_m);
                    }
                }
            }
        }

        #[test]
        fn arc_width_linear(d1 in 0.1f64..500.0, d2 in 0.1f64..500.0, fp in 0.001f64..0.2) {
            let (w1, w2) = (illuminated_arc_width(d1, fp), illuminated_arc_width(d2, fp));
            prop_assert!((d1 < d2) == (w1 < w2));
            prop_assert!((w1 / d1 - w2 / d2).abs() < 1e-12);
        }
    }
}
