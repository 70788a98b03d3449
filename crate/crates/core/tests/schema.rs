//! The published chart schema names exactly what the parser accepts.

use std::collections::BTreeSet;

use keystage::spec::{AggregateOp, Channel, DataType, Mark, PredicateOp, ScaleType};
use serde_json::Value as Json;

fn schema() -> Json {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../schema/chart.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn strings(v: &Json) -> Vec<String> {
    v.as_array().unwrap().iter().map(|s| s.as_str().unwrap().to_string()).collect()
}

fn keys(v: &Json) -> BTreeSet<String> {
    v.as_object().unwrap().keys().cloned().collect()
}

#[test]
fn enums_match_the_parser() {
    let s = &schema()["$defs"];
    for name in strings(&s["markName"]["enum"]) {
        assert!(Mark::from_name(&name).is_some_and(|m| m != Mark::Rule), "{name}");
    }
    assert!(strings(&s["layerMark"]["oneOf"][0]["enum"]).contains(&"rule".to_string()));
    for name in strings(&s["dataType"]["enum"]) {
        assert!(DataType::from_name(&name).is_some(), "{name}");
    }
    for name in strings(&s["aggregateOp"]["enum"]) {
        assert!(AggregateOp::from_name(&name).is_some(), "{name}");
    }
    for name in strings(&s["scale"]["properties"]["type"]["enum"]) {
        assert!(ScaleType::from_name(&name).is_some(), "{name}");
    }
}

#[test]
fn channels_and_predicates_match_the_parser() {
    let s = &schema()["$defs"];
    let channels: BTreeSet<String> = Channel::ALL.iter().map(|c| c.name().to_string()).collect();
    assert_eq!(keys(&s["encoding"]["properties"]), channels);
    assert_eq!(keys(&s["layerEncoding"]["properties"]), channels);
    let mut predicates: BTreeSet<String> = PredicateOp::ALL.iter().map(|p| p.key().to_string()).collect();
    predicates.insert("field".into());
    assert_eq!(keys(&s["predicate"]["properties"]), predicates);
}
