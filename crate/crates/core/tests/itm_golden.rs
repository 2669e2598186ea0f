//! Area-mode ITM against the frozen reference-implementation golden file.

use radar_lte::propagation::{AreaModel, PropagationConfig};

const GOLDEN: &str = include_str!("data/itm_golden.csv");

fn config(scenario: &str) -> PropagationConfig {
    match scenario {
        "macro" => PropagationConfig::default(),
        "small" => PropagationConfig { rx_height_m: 10.0, terrain_roughness_m: 20.0, ..Default::default() },
        other => panic!("unknown scenario {other}"),
    }
}

#[test]
fn matches_reference_within_a_tenth_of_a_db() {
    let mut rows = 0;
    for line in GOLDEN.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let model = AreaModel::new(config(f[0]).area_params()).unwrap();
        let d: f64 = f[1].parse().unwrap();
        let want: f64 = f[2].parse().unwrap();
        let got = model.loss_db(d).unwrap();
        assert!((got - want).abs() <= 0.1, "{} {d} km: got {got:.4}, reference {want:.4}", f[0]);
        rows += 1;
    }
    assert_eq!(rows, 40);
}
