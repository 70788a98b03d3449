#![allow(dead_code)]

use keystage::spec::{parse_chart_spec, parse_chart_value, ChartSpec};
use std::path::PathBuf;

pub const PAIRS: [(&str, &str); 5] = [
    ("measurements_raw", "measurements_filtered_means"),
    ("cars_scatter", "cars_origin_bars"),
    ("penguins_strip", "penguins_species_means"),
    ("cars_plain_scatter", "cars_binned_counts"),
    ("covid_ny_early", "covid_all_states"),
];

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

pub fn fixture(name: &str) -> ChartSpec {
    parse_chart_spec(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

pub fn fixture_json(name: &str) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(fixture_path(name)).unwrap()).unwrap()
}

pub fn median_keyframes() -> Vec<ChartSpec> {
    fixture_json("median_sequence")["keyframes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| parse_chart_value(k).unwrap())
        .collect()
}
