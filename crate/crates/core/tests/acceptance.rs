//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::process::Command;
use std::time::{Duration, Instant};

use common::{fixture, fixture_path, median_keyframes, PAIRS};
use keystage::anim::{
    changed_components, complexity, enumerate_pair_specs, recommend_animations, total_complexity, AnimError, AnimStepSpec,
    AnimationPlanCandidate, Component, Easing,
};
use keystage::data::{compute_domain, Value};
use keystage::edit::{diff, AggregateDescriptor, BinDescriptor, EditOp, EditOpSet, FieldRef};
use keystage::keyframe::{default_rules, enumerate_partitions, recommend_keyframes, score_partition, KeyframeOptions, KeyframeSequence};
use keystage::spec::{parse_chart_value, Channel, ChartSpec, DataType, Encoding, FieldPredicate, Mark, Operand, PredicateOp, ScaleSpec, ScaleType};
use keystage::timeline::{compile, render_scene, sample, AttrValue, CompileOptions, Timeline};

type Outcome = Result<String, String>;
/// Block layout given by op ids.
type Layout<'a> = &'a [&'a [&'a str]];
/// Rule id, layout meeting the condition, layout missing it, contribution.
type RuleCase = (&'static str, Vec<Vec<EditOp>>, Vec<Vec<EditOp>>, i32);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn all_sequences(a: &ChartSpec, b: &ChartSpec) -> Vec<KeyframeSequence> {
    let options = KeyframeOptions { top_k: usize::MAX, ..KeyframeOptions::default() };
    recommend_keyframes(a, b, &options).unwrap().sequences
}

fn find<'a>(seqs: &'a [KeyframeSequence], blocks: &[&[&str]]) -> Option<(usize, &'a KeyframeSequence)> {
    seqs.iter().enumerate().find(|(_, s)| {
        s.blocks.len() == blocks.len() && s.blocks.iter().zip(blocks).all(|(x, y)| x.iter().map(String::as_str).eq(y.iter().copied()))
    })
}

/// Score of an arbitrary block layout given by op ids, valid or not.
fn layout_score(ops: &EditOpSet, blocks: &[&[&str]]) -> i32 {
    let view: Vec<Vec<&EditOp>> = blocks
        .iter()
        .map(|b| b.iter().map(|id| ops.ops.iter().find(|o| o.path() == *id).expect("op id")).collect())
        .collect();
    score_partition(&view, &default_rules()).total
}

fn describe(seqs: &[KeyframeSequence], blocks: &[&[&str]]) -> String {
    match find(seqs, blocks) {
        Some((rank, s)) => format!("rank {} score {}", rank + 1, s.score.total),
        None => "pruned".into(),
    }
}

fn criterion_1() -> Outcome {
    let (a, b) = (fixture("measurements_raw"), fixture("measurements_filtered_means"));
    let started = Instant::now();
    let seqs = all_sequences(&a, &b);
    let elapsed = started.elapsed();
    let ops = diff(&a, &b).unwrap();
    let (fa, af, direct): (Layout, Layout, Layout) = (
        &[&["filter.value.lte"], &["aggregate"]],
        &[&["aggregate"], &["filter.value.lte"]],
        &[&["aggregate", "filter.value.lte"]],
    );
    let (s_fa, s_af, s_direct) = (layout_score(&ops, fa), layout_score(&ops, af), layout_score(&ops, direct));
    check((s_fa, s_af, s_direct) == (1, 0, 0), format!("scores {s_fa}/{s_af}/{s_direct}, expected 1/0/0"))?;
    let (rank_fa, _) = find(&seqs, fa).ok_or("filter-first sequence missing")?;
    check(rank_fa == 0, "filter-first sequence is not ranked first")?;
    for other in [af, direct] {
        if let Some((r, _)) = find(&seqs, other) {
            check(r > rank_fa, "a competing sequence ranks above filter-first")?;
        }
    }
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!(
        "filter-first {}, aggregate-first {}, direct {}, {:.1} ms",
        describe(&seqs, fa),
        describe(&seqs, af),
        describe(&seqs, direct),
        elapsed.as_secs_f64() * 1e3
    ))
}

fn criterion_2() -> Outcome {
    let filter = |f: &str| EditOp::AddFilter(FieldPredicate::new(f, PredicateOp::Gt, Operand::Scalar(Value::Number(1.0))));
    let agg = || EditOp::AddAggregate(AggregateDescriptor::default());
    let bin = || EditOp::AddBin(BinDescriptor::default());
    let mark = || EditOp::Mark { from: Mark::Point, to: Mark::Bar };
    let add_enc = || EditOp::AddEncoding { channel: Channel::Y, encoding: Encoding::new("g", DataType::Nominal) };
    let modify = |c| EditOp::ModifyEncoding {
        channel: c,
        from: FieldRef { field: Some("a".into()), data_type: DataType::Quantitative },
        to: FieldRef { field: Some("b".into()), data_type: DataType::Nominal },
    };
    let scale = |c| EditOp::ModifyScale {
        channel: c,
        from: ScaleSpec::default(),
        to: ScaleSpec { scale_type: Some(ScaleType::Ordinal), domain: None },
    };
    let cases: Vec<RuleCase> = vec![
        ("filter-before-aggregate-or-bin", vec![vec![filter("v")], vec![agg()]], vec![vec![agg()], vec![filter("v")]], 1),
        ("aggregate-before-bin", vec![vec![agg()], vec![bin()]], vec![vec![bin()], vec![agg()]], -1),
        ("mark-before-aggregate", vec![vec![mark()], vec![agg()]], vec![vec![agg()], vec![mark()]], -1),
        ("encoding-before-aggregate", vec![vec![add_enc()], vec![agg()]], vec![vec![agg()], vec![add_enc()]], 1),
        (
            "encoding-with-scale",
            vec![vec![modify(Channel::X), scale(Channel::X)]],
            vec![vec![modify(Channel::X)], vec![scale(Channel::X)]],
            1,
        ),
        ("filters-together", vec![vec![filter("a"), filter("b")]], vec![vec![filter("a")], vec![filter("b")]], -1),
        ("bin-with-aggregate", vec![vec![bin(), agg()]], vec![vec![bin()], vec![agg()]], 1),
    ];
    let rules = default_rules();
    let contribution = |id: &str, blocks: &[Vec<EditOp>]| -> i32 {
        let view: Vec<Vec<&EditOp>> = blocks.iter().map(|b| b.iter().collect()).collect();
        score_partition(&view, &rules).rules.iter().find(|r| r.rule == id).map_or(i32::MIN, |r| r.score)
    };
    check(rules.len() == 7, format!("{} rules", rules.len()))?;
    for (id, met, unmet, score) in &cases {
        check(rules.iter().find(|r| r.id == *id).map(|r| r.score) == Some(*score), format!("{id} weight"))?;
        check(contribution(id, met) == *score, format!("{id} met contributes {}", contribution(id, met)))?;
        check(contribution(id, unmet) == 0, format!("{id} unmet contributes {}", contribution(id, unmet)))?;
    }
    Ok(format!("{} rules, {} cases", cases.len(), cases.len() * 2))
}

fn criterion_3() -> Outcome {
    let (a, b) = (fixture("penguins_strip"), fixture("penguins_species_means"));
    let seqs = all_sequences(&a, &b);
    let two: Vec<&KeyframeSequence> = seqs.iter().filter(|s| s.blocks.len() == 2).collect();
    let top = two.first().ok_or("no two-block sequence")?;
    check(
        top.blocks == vec![vec!["encoding.y".to_string()], vec!["aggregate".to_string()]],
        format!("top two-block sequence is {:?}", top.blocks),
    )?;
    check(two.get(1).is_none_or(|s| s.score.total < top.score.total), "top two-block sequence is not unique")?;
    let ops = diff(&a, &b).unwrap();
    let reverse = layout_score(&ops, &[&["aggregate"], &["encoding.y"]]);
    check(reverse < top.score.total, format!("reverse order scores {reverse}"))?;
    Ok(format!("encoding-first score {}, reverse {} ({})", top.score.total, reverse, describe(&seqs, &[&["aggregate"], &["encoding.y"]])))
}

fn criterion_4() -> Outcome {
    let (a, b) = (fixture("cars_plain_scatter"), fixture("cars_binned_counts"));
    let seqs = all_sequences(&a, &b);
    let ops = diff(&a, &b).unwrap();
    let (co, ab, ba): (Layout, Layout, Layout) =
        (&[&["aggregate", "bin"]], &[&["aggregate"], &["bin"]], &[&["bin"], &["aggregate"]]);
    let (s_co, s_ab, s_ba) = (layout_score(&ops, co), layout_score(&ops, ab), layout_score(&ops, ba));
    check(s_co > s_ab && s_co > s_ba, format!("scores {s_co}/{s_ab}/{s_ba}"))?;
    let (rank_co, _) = find(&seqs, co).ok_or("co-block sequence missing")?;
    for other in [ab, ba] {
        if let Some((r, _)) = find(&seqs, other) {
            check(r > rank_co, "a separated order outranks the co-block sequence")?;
        }
    }
    Ok(format!(
        "together {}, aggregate-then-bin {} ({}), bin-then-aggregate {} ({})",
        s_co,
        s_ab,
        describe(&seqs, ab),
        s_ba,
        describe(&seqs, ba)
    ))
}

/// Ordered set partitions by brute force over block labels.
fn brute_force_ordered_partitions(n: usize) -> usize {
    let mut count = 0;
    let total = n.pow(n as u32);
    for code in 0..total {
        let labels: Vec<usize> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
        let used: BTreeSet<usize> = labels.iter().copied().collect();
        if used.iter().copied().eq(0..used.len()) {
            count += 1;
        }
    }
    count
}

fn synthetic_ops(n: usize) -> EditOpSet {
    let mut start = common::fixture_json("measurements_raw");
    start["encoding"]["x"]["scale"] = serde_json::json!({"domain": [-10, 110]});
    let mut end = start.clone();
    let filters = [
        serde_json::json!({"field": "value", "gte": 0}),
        serde_json::json!({"field": "value", "lte": 100}),
        serde_json::json!({"field": "id", "gte": 0}),
        serde_json::json!({"field": "id", "lte": 100}),
    ];
    end["transform"] = filters[..n].iter().map(|f| serde_json::json!({ "filter": f })).collect();
    diff(&parse_chart_value(&start).unwrap(), &parse_chart_value(&end).unwrap()).unwrap()
}

fn criterion_5() -> Outcome {
    let mut counts = Vec::new();
    for n in 1..=4 {
        let ops = synthetic_ops(n);
        check(ops.len() == n, format!("synthetic set has {} ops", ops.len()))?;
        let got = enumerate_partitions(&ops, n, 8).map_err(|e| e.to_string())?.len();
        let oracle = brute_force_ordered_partitions(n);
        check(got == oracle, format!("n={n}: {got} vs oracle {oracle}"))?;
        counts.push(got);
    }
    check(counts == [1, 3, 13, 75], format!("{counts:?}"))?;
    Ok(format!("counts {counts:?}"))
}

fn criterion_6() -> Outcome {
    let mut checked = 0;
    for (x, y) in PAIRS {
        for (a, b) in [(x, y), (y, x)] {
            for seq in all_sequences(&fixture(a), &fixture(b)) {
                for channel in Channel::ALL {
                    let domains: Vec<_> = seq.keyframes.iter().map(|k| k.encoding(channel).map(|_| compute_domain(k, channel).ok())).collect();
                    let changes = domains.windows(2).filter(|w| w[0] != w[1]).count();
                    check(changes <= 1, format!("{a} -> {b} {:?}: {} changes on {}", seq.blocks, changes, channel.name()))?;
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} sequences"))
}

/// Stagings of each pair by brute force over block labels of the changed
/// components, dropping guides staged before data.
fn brute_force_pair_specs(a: &ChartSpec, b: &ChartSpec) -> Vec<Vec<BTreeSet<Component>>> {
    let changed: Vec<Component> = changed_components(a, b).into_iter().collect();
    let n = changed.len();
    if n == 0 {
        return vec![vec![BTreeSet::new()]];
    }
    let mut out = Vec::new();
    for code in 0..n.pow(n as u32) {
        let labels: Vec<usize> = (0..n).map(|i| code / n.pow(i as u32) % n).collect();
        let k = labels.iter().max().unwrap() + 1;
        let mut stages = vec![BTreeSet::new(); k];
        for (c, l) in changed.iter().zip(&labels) {
            stages[*l].insert(*c);
        }
        if stages.iter().any(BTreeSet::is_empty) {
            continue;
        }
        let data = stages.iter().position(|s| s.contains(&Component::Data));
        let guides_early = data.is_some_and(|d| stages[..d].iter().any(|s| s.iter().any(|c| c.is_guide())));
        if !guides_early {
            out.push(stages);
        }
    }
    out
}

fn stage_sets(steps: &[AnimStepSpec]) -> Vec<Vec<BTreeSet<Component>>> {
    steps.iter().map(|s| s.stages.iter().map(|st| st.components.clone()).collect()).collect()
}

fn criterion_7() -> Outcome {
    let mut sequences: Vec<Vec<ChartSpec>> = Vec::new();
    for (a, b) in PAIRS {
        sequences.extend(all_sequences(&fixture(a), &fixture(b)).into_iter().map(|s| s.keyframes).filter(|k| k.len() <= 4));
    }
    let median = median_keyframes();
    for len in 2..=4 {
        sequences.extend(median.windows(len).map(<[ChartSpec]>::to_vec));
    }
    let mut cases = 0;
    for ks in &sequences {
        let per_pair: Vec<_> = ks.windows(2).map(|w| brute_force_pair_specs(&w[0], &w[1])).collect();
        // full cross join, bucketed by total stage count
        let mut by_total: BTreeMap<usize, BTreeSet<Vec<Vec<BTreeSet<Component>>>>> = BTreeMap::new();
        let mut index = vec![0; per_pair.len()];
        'outer: loop {
            let combo: Vec<_> = index.iter().zip(&per_pair).map(|(&i, p)| p[i].clone()).collect();
            by_total.entry(combo.iter().map(Vec::len).sum()).or_default().insert(combo);
            for j in 0..index.len() {
                index[j] += 1;
                if index[j] < per_pair[j].len() {
                    continue 'outer;
                }
                index[j] = 0;
            }
            break;
        }
        for m in 1..=6 {
            let expected = by_total.remove(&m).unwrap_or_default();
            match recommend_animations(ks, m, usize::MAX) {
                Ok(plans) => {
                    let got: BTreeSet<_> = plans.iter().map(|p| stage_sets(&p.steps)).collect();
                    check(got.len() == plans.len(), "duplicate plans")?;
                    check(got == expected, format!("N={} M={m}: {} plans vs oracle {}", ks.len(), got.len(), expected.len()))?;
                    check(
                        plans.windows(2).all(|w| w[0].total_complexity <= w[1].total_complexity),
                        "plans are not sorted by complexity",
                    )?;
                }
                Err(AnimError::InfeasibleBudget { .. }) => check(expected.is_empty(), format!("M={m} reported infeasible"))?,
                Err(e) => return Err(e.to_string()),
            }
            cases += 1;
        }
    }
    Ok(format!("{} sequences, {cases} budgets", sequences.len()))
}

fn criterion_8() -> Outcome {
    let mut pairs: Vec<(ChartSpec, ChartSpec)> = PAIRS.iter().map(|(a, b)| (fixture(a), fixture(b))).collect();
    pairs.extend(median_keyframes().windows(2).map(|w| (w[0].clone(), w[1].clone())));
    let mut staged = 0;
    for (a, b) in &pairs {
        let specs = enumerate_pair_specs(a, b);
        let plan = AnimationPlanCandidate::new(specs.iter().take(3).cloned().collect());
        let sum: f64 = plan.steps.iter().map(complexity).sum();
        check(plan.total_complexity == sum && total_complexity(&plan.steps) == sum, "total complexity is not additive")?;
        if changed_components(a, b).len() >= 2 {
            let best = |k: usize| specs.iter().filter(|s| s.stage_count() == k).map(complexity).fold(f64::INFINITY, f64::min);
            let (one, two) = (best(1), best(2));
            check(two < one, format!("two-stage {two} vs one-stage {one}"))?;
            staged += 1;
        }
    }
    Ok(format!("{} pairs, {staged} with two or more changed components", pairs.len()))
}

fn criterion_9() -> Outcome {
    let ks = median_keyframes();
    let started = Instant::now();
    let budget = (ks.len() - 1..=4 * ks.len())
        .find(|&m| recommend_animations(&ks, m, 1).is_ok())
        .ok_or("no feasible budget")?;
    let mut plan = recommend_animations(&ks, budget, 1).unwrap().remove(0);
    for stage in &mut plan.steps[3].stages {
        stage.timing.stagger = 0.5;
    }
    let tl = compile(&ks, &plan.steps, &CompileOptions::default()).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for (i, k) in ks.iter().enumerate() {
        let mark = &tl.keyframes[i];
        let at = sample(&tl, mark.time).map_err(|e| e.to_string())?;
        let expected: Vec<_> = render_scene(k).map_err(|e| e.to_string())?.into_iter().flat_map(|g| g.states).collect();
        check(at.elements.len() == expected.len(), format!("keyframe {}: {} elements visible, {} expected", i + 1, at.elements.len(), expected.len()))?;
        for (id, want) in mark.elements.iter().zip(&expected) {
            let got = at.elements.get(id).ok_or(format!("keyframe {}: {id} not visible", i + 1))?;
            for (attr, v) in want {
                worst = worst.max(got[attr].distance(v));
            }
        }
    }
    check(worst <= 1e-9, format!("boundary deviation {worst:e}"))?;
    let collinear = affine_deviation(&tl)?;
    check(collinear <= 1e-9, format!("collinearity deviation {collinear:e}"))?;
    let elapsed = started.elapsed();
    check(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!(
        "{} keyframes, {budget} stages, boundary {worst:.1e}, collinearity {collinear:.1e}, {:.1} ms",
        ks.len(),
        elapsed.as_secs_f64() * 1e3
    ))
}

/// Largest departure from collinearity of three samples inside each linear
/// track.
fn affine_deviation(tl: &Timeline) -> Result<f64, String> {
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for (id, el) in &tl.elements {
        for tr in el.tracks.iter().filter(|t| t.easing == Easing::Linear && t.end > t.start) {
            let times = [0.2, 0.5, 0.8].map(|f| (tr.start + f * (tr.end - tr.start)) / tl.duration);
            let values: Vec<Option<AttrValue>> = times
                .iter()
                .map(|&t| sample(tl, t).ok().and_then(|s| s.elements.get(id).map(|st| st[&tr.attribute].clone())))
                .collect();
            let nums: Vec<Vec<f64>> = values
                .iter()
                .flatten()
                .filter_map(|v| match v {
                    AttrValue::Number(x) => Some(vec![*x]),
                    AttrValue::Color(c) => Some(c.to_vec()),
                    AttrValue::Category(_) => None,
                })
                .collect();
            if nums.len() != 3 {
                continue;
            }
            let (t0, t1, t2) = (times[0], times[1], times[2]);
            for ((a, b), c) in nums[0].iter().zip(&nums[1]).zip(&nums[2]) {
                let predicted = a + (c - a) * (t1 - t0) / (t2 - t0);
                worst = worst.max((predicted - b).abs());
            }
            checked += 1;
        }
    }
    if checked == 0 {
        return Err("no linear tracks sampled".into());
    }
    Ok(worst)
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_keystage")).args(args).output().expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn criterion_10() -> Outcome {
    let mut runs = 0;
    for (a, b) in PAIRS {
        let (pa, pb) = (fixture_path(a), fixture_path(b));
        for stages in ["2", "3"] {
            let args = ["pipeline", pa.to_str().unwrap(), pb.to_str().unwrap(), "--stages", stages];
            let (c1, o1) = run_cli(&args);
            let (c2, o2) = run_cli(&args);
            check(c1 == 0 && c2 == 0, format!("{a}: exit {c1}/{c2}"))?;
            check(o1 == o2, format!("{a} -> {b} with {stages} stages differs between runs"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} pipelines run twice, identical bytes"))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 10] = [
        ("filter before aggregate", criterion_1),
        ("rule suite", criterion_2),
        ("encoding before aggregate", criterion_3),
        ("bin with aggregate", criterion_4),
        ("partition enumeration", criterion_5),
        ("one domain change", criterion_6),
        ("animation cross join", criterion_7),
        ("complexity", criterion_8),
        ("timeline fidelity", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
