mod common;

use std::path::Path;
use std::process::Command;

use common::fixture_path;
use serde_json::Value as Json;

struct Run {
    code: i32,
    stdout: Json,
    stderr: Json,
}

fn keystage(args: &[&str]) -> Run {
    keystage_env(args, None)
}

fn keystage_env(args: &[&str], op_cap: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_keystage"));
    cmd.args(args).env_remove(keystage::cli::OP_CAP_ENV);
    if let Some(cap) = op_cap {
        cmd.env(keystage::cli::OP_CAP_ENV, cap);
    }
    let out = cmd.output().unwrap();
    let parse = |b: &[u8]| if b.is_empty() { Json::Null } else { serde_json::from_slice(b).unwrap() };
    Run {
        code: out.status.code().unwrap(),
        stdout: parse(&out.stdout),
        stderr: parse(&out.stderr),
    }
}

fn p(name: &str) -> String {
    fixture_path(name).to_str().unwrap().to_string()
}

fn temp(name: &str) -> String {
    let dir = std::env::temp_dir().join(format!("keystage-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn diff_lists_ops() {
    let run = keystage(&["diff", &p("cars_scatter"), &p("cars_origin_bars")]);
    assert_eq!(run.code, 0);
    let paths: Vec<&str> = run.stdout.as_array().unwrap().iter().map(|o| o["path"].as_str().unwrap()).collect();
    assert_eq!(paths, ["aggregate", "encoding.x", "mark"]);
}

#[test]
fn recommend_keyframes_ranks_filter_first() {
    let run = keystage(&["recommend-keyframes", &p("measurements_raw"), &p("measurements_filtered_means"), "--top-k", "2"]);
    assert_eq!(run.code, 0);
    let ranked = run.stdout.as_array().unwrap();
    assert_eq!(ranked.len(), 2);
    assert_eq!(ranked[0]["rank"], 1);
    assert_eq!(ranked[0]["partition"], serde_json::json!([["filter.value.lte"], ["aggregate"]]));
    assert_eq!(ranked[0]["keyframes"].as_array().unwrap().len(), 3);
}

#[test]
fn keyframes_plans_and_timelines_chain_through_files() {
    let seq = temp("seq.json");
    let plan = temp("plan.json");
    let timeline = temp("timeline.json");
    let run = keystage(&["recommend-keyframes", &p("cars_scatter"), &p("cars_origin_bars"), "-o", &seq]);
    assert_eq!((run.code, run.stdout), (0, Json::Null));
    let run = keystage(&["recommend-anim", &seq, "--stages", "3", "-o", &plan]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let run = keystage(&["compile", &seq, &plan, "-o", &timeline]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let start = keystage(&["sample", &timeline, "--t", "0"]);
    assert_eq!(start.code, 0);
    let first: Json = serde_json::from_str(&std::fs::read_to_string(&seq).unwrap()).unwrap();
    let first_chart = first[0]["keyframes"][0].clone();
    let scene = keystage::timeline::render_scene(&keystage::spec::parse_chart_value(&first_chart).unwrap()).unwrap();
    assert_eq!(start.stdout["elements"].as_object().unwrap().len(), scene.iter().map(|g| g.rows.len()).sum::<usize>());
}

#[test]
fn median_sequence_compiles() {
    let plan = temp("median_plan.json");
    let run = keystage(&["recommend-anim", &p("median_sequence"), "--stages", "6", "-o", &plan]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    let run = keystage(&["compile", &p("median_sequence"), &plan, "--stagger-order", "value"]);
    assert_eq!(run.code, 0, "{}", run.stderr);
    assert_eq!(run.stdout["keyframes"].as_array().unwrap().len(), 6);
}

#[test]
fn pipeline_separates_filter_and_aggregate() {
    let run = keystage(&["pipeline", &p("measurements_raw"), &p("measurements_filtered_means"), "--stages", "2"]);
    assert_eq!(run.code, 0);
    assert_eq!(run.stdout["sequence"]["partition"], serde_json::json!([["filter.value.lte"], ["aggregate"]]));
    assert_eq!(run.stdout["plan"]["steps"].as_array().unwrap().len(), 2);
}

#[test]
fn too_small_budget_is_infeasible() {
    let run = keystage(&["recommend-anim", &p("median_sequence"), "--stages", "1"]);
    assert_eq!(run.code, 3);
    assert_eq!(run.stderr["error"]["kind"], "infeasible-budget");
    assert_eq!(run.stdout, Json::Null);
}

#[test]
fn error_documents_and_exit_codes() {
    let missing = keystage(&["diff", "no/such/file.json", &p("cars_scatter")]);
    assert_eq!((missing.code, missing.stderr["error"]["kind"].as_str()), (1, Some("io")));

    let bad = temp("bad.json");
    std::fs::write(&bad, r#"{"mark": "point", "data": {"values": []}, "encoding": {"x": {"field": "a", "type": "quantitative", "bin": 1}}}"#).unwrap();
    let run = keystage(&["diff", &bad, &bad]);
    assert_eq!(run.code, 1);
    assert!(run.stderr["error"]["message"].is_string());

    let unsupported = temp("facet.json");
    let mut doc = common::fixture_json("cars_scatter");
    doc["encoding"]["column"] = serde_json::json!({"field": "Origin", "type": "nominal"});
    std::fs::write(&unsupported, doc.to_string()).unwrap();
    let run = keystage(&["diff", &unsupported, &p("cars_scatter")]);
    assert_eq!((run.code, run.stderr["error"]["kind"].as_str()), (2, Some("unsupported")));

    let same = keystage(&["recommend-keyframes", &p("cars_scatter"), &p("cars_scatter")]);
    assert_eq!((same.code, same.stderr["error"]["kind"].as_str()), (3, Some("empty-diff")));

    let usage = keystage(&["recommend-anim", &p("median_sequence")]);
    assert_eq!((usage.code, usage.stderr["error"]["kind"].as_str()), (1, Some("usage")));
}

#[test]
fn sample_rejects_times_outside_the_unit_interval() {
    let timeline = temp("tl_range.json");
    let run = keystage(&["pipeline", &p("cars_scatter"), &p("cars_origin_bars"), "--stages", "2", "-o", &timeline]);
    assert_eq!(run.code, 0);
    let doc: Json = serde_json::from_str(&std::fs::read_to_string(&timeline).unwrap()).unwrap();
    let only = temp("tl_only.json");
    std::fs::write(&only, doc["timeline"].to_string()).unwrap();
    assert_eq!(keystage(&["sample", &only, "--t", "0.5"]).code, 0);
    let run = keystage(&["sample", &only, "--t", "1.5"]);
    assert_eq!((run.code, run.stderr["error"]["kind"].as_str()), (1, Some("out-of-range")));
    let run = keystage(&["sample", &only, "--t", "-0.5"]);
    assert_eq!(run.code, 1);
}

#[test]
fn op_cap_comes_from_the_environment() {
    let args = ["recommend-keyframes", &p("cars_scatter"), &p("cars_origin_bars")];
    let run = keystage_env(&args, Some("2"));
    assert_eq!((run.code, run.stderr["error"]["kind"].as_str()), (3, Some("combinatorial-limit")));
    assert_eq!(keystage_env(&args, Some("3")).code, 0);
    assert_eq!(keystage_env(&args, Some("many")).code, 1);
}

#[test]
fn outputs_have_sorted_keys() {
    let run = Command::new(env!("CARGO_BIN_EXE_keystage"))
        .args(["diff", &p("cars_scatter"), &p("cars_origin_bars")])
        .output()
        .unwrap();
    let text = String::from_utf8(run.stdout).unwrap();
    let reparsed: Json = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&reparsed).unwrap() + "\n", text);
    assert!(Path::new(&p("cars_scatter")).exists());
}
