use std::collections::{BTreeMap, HashMap};

use super::scene::{render_scene, SceneGroup};
use super::{key_string, AttrValue, Attribute, Element, KeyframeMark, Segment, State, Timeline, TimelineError, Track};
use crate::anim::{changed_components, AnimStepSpec, Component, Timing};
use crate::spec::{ChartSpec, DataType};

/// Order in which staggered elements start.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum StaggerOrder {
    /// Row order of the data.
    #[default]
    Data,
    /// Ascending starting x position.
    Value,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CompileOptions {
    /// Field joining elements across keyframes. Defaults to the nominal
    /// fields both keyframes share.
    pub key: Option<String>,
    pub stagger_order: StaggerOrder,
}

#[derive(Debug, Default)]
struct Join {
    pairs: Vec<(usize, usize)>,
    /// Several source rows collapsing into one target row.
    merges: Vec<(usize, usize)>,
    /// One source row spreading into several target rows.
    splits: Vec<(usize, usize)>,
    exits: Vec<usize>,
    enters: Vec<usize>,
}

fn by_index(na: usize, nb: usize) -> Join {
    Join {
        pairs: (0..na.min(nb)).map(|i| (i, i)).collect(),
        exits: (nb..na).collect(),
        enters: (na..nb).collect(),
        ..Join::default()
    }
}

fn join(a: &SceneGroup, b: &SceneGroup, key: Option<&str>, pair: usize) -> Result<Join, TimelineError> {
    let explicit = key.filter(|k| a.schema.contains_key(*k) && b.schema.contains_key(*k));
    let fields: Vec<String> = match explicit {
        Some(k) => vec![k.to_string()],
        None => a
            .schema
            .iter()
            .filter(|(f, t)| matches!(t, DataType::Nominal | DataType::Ordinal) && b.schema.get(*f) == Some(t))
            .map(|(f, _)| f.clone())
            .collect(),
    };
    if fields.is_empty() {
        return Ok(by_index(a.rows.len(), b.rows.len()));
    }
    let keys = |g: &SceneGroup| -> Vec<String> {
        g.rows
            .iter()
            .map(|r| key_string(&fields.iter().map(|f| r.get(f).unwrap_or(&crate::data::Value::Null)).collect::<Vec<_>>()))
            .collect()
    };
    let (ka, kb) = (keys(a), keys(b));
    fn index(ks: &[String]) -> BTreeMap<&str, Vec<usize>> {
        let mut m: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, k) in ks.iter().enumerate() {
            m.entry(k.as_str()).or_default().push(i);
        }
        m
    }
    let (ia, ib) = (index(&ka), index(&kb));
    let repeated = |m: &BTreeMap<&str, Vec<usize>>| -> Vec<String> {
        m.iter().filter(|(_, v)| v.len() > 1).map(|(k, _)| k.to_string()).collect()
    };
    let (ra, rb) = (repeated(&ia), repeated(&ib));
    if let Some(field) = explicit {
        for (keys, keyframe) in [(ra, pair), (rb, pair + 1)] {
            if !keys.is_empty() {
                return Err(TimelineError::JoinAmbiguity {
                    field: field.to_string(),
                    keyframe,
                    keys,
                });
            }
        }
    } else if !ra.is_empty() && !rb.is_empty() {
        return Ok(by_index(a.rows.len(), b.rows.len()));
    }
    let mut out = Join::default();
    for (j, k) in kb.iter().enumerate() {
        match ia.get(k.as_str()) {
            None => out.enters.push(j),
            Some(sources) => {
                let targets = &ib[k.as_str()];
                if targets[0] == j {
                    out.pairs.push((sources[0], j));
                    out.merges.extend(sources[1..].iter().map(|&i| (i, j)));
                } else {
                    out.splits.push((sources[0], j));
                }
            }
        }
    }
    out.exits = (0..ka.len()).filter(|&i| !ib.contains_key(ka[i].as_str())).collect();
    Ok(out)
}

enum Motion {
    Move { id: String, from: State, to: State },
    Merge { id: String, from: State, to: State },
    Exit { id: String, from: State },
    Enter { id: String, to: State },
    Split { id: String, from: State, to: State },
}

impl Motion {
    fn start_x(&self) -> f64 {
        let s = match self {
            Motion::Move { from, .. } | Motion::Merge { from, .. } | Motion::Exit { from, .. } | Motion::Split { from, .. } => from,
            Motion::Enter { to, .. } => to,
        };
        s.get(&Attribute::X).and_then(AttrValue::as_f64).unwrap_or(0.5)
    }
}

fn opacity(s: &State) -> AttrValue {
    s.get(&Attribute::Opacity).cloned().unwrap_or(AttrValue::Number(1.0))
}

fn track(attribute: Attribute, window: (f64, f64, f64), from: AttrValue, to: AttrValue, timing: &Timing) -> Track {
    let (start, end, offset) = window;
    Track {
        attribute,
        start,
        end,
        from,
        to,
        easing: timing.easing,
        stagger_offset: offset,
    }
}

/// Compile keyframes and one animation step per adjacent pair into a
/// timeline.
///
/// Elements are joined across each pair by key. Matched elements move in
/// the stage animating `marks` (the first stage when no stage does), exits
/// fade out in the pair's first stage and entries fade in during its last.
pub fn compile(keyframes: &[ChartSpec], steps: &[AnimStepSpec], options: &CompileOptions) -> Result<Timeline, TimelineError> {
    if keyframes.len() < 2 || steps.len() + 1 != keyframes.len() {
        return Err(TimelineError::StepCount {
            keyframes: keyframes.len(),
            steps: steps.len(),
        });
    }
    for (pair, (w, step)) in keyframes.windows(2).zip(steps).enumerate() {
        let changed = changed_components(&w[0], &w[1]);
        let planned = step.components();
        if changed != planned {
            let names = |s: &std::collections::BTreeSet<Component>| s.iter().map(|c| c.name().to_string()).collect();
            return Err(TimelineError::CoverageMismatch {
                pair,
                planned: names(&planned),
                changed: names(&changed),
            });
        }
    }
    let scenes = keyframes
        .iter()
        .enumerate()
        .map(|(i, k)| render_scene(k).map_err(|source| TimelineError::Render { keyframe: i, source }))
        .collect::<Result<Vec<_>, _>>()?;

    let mut elements: BTreeMap<String, Element> = BTreeMap::new();
    let mut ids: HashMap<String, Vec<String>> = HashMap::new();
    for g in &scenes[0] {
        let group_ids: Vec<String> = (0..g.rows.len()).map(|i| format!("{}/0/{i}", g.name)).collect();
        for (id, state) in group_ids.iter().zip(&g.states) {
            elements.insert(
                id.clone(),
                Element {
                    group: g.name.clone(),
                    birth: None,
                    death: None,
                    initial: state.clone(),
                    tracks: Vec::new(),
                },
            );
        }
        ids.insert(g.name.clone(), group_ids);
    }
    let mut marks = vec![KeyframeMark {
        time: 0.0,
        elements: scenes[0].iter().flat_map(|g| ids[&g.name].clone()).collect(),
    }];
    let mut boundaries = vec![0.0];
    let mut segments = Vec::new();
    let mut cursor = 0.0;

    for (pair, step) in steps.iter().enumerate() {
        let (a, b) = (&scenes[pair], &scenes[pair + 1]);
        let move_stage = step
            .stages
            .iter()
            .position(|s| s.components.contains(&Component::Marks))
            .unwrap_or(0);
        // a step without stages still carries the join, with instant motions
        let instant = [crate::anim::Stage::new([])];
        let stages = if step.stages.is_empty() { &instant[..] } else { &step.stages[..] };
        let instant_step = step.stages.is_empty();
        let last_stage = stages.len() - 1;
        let mut per_stage: Vec<Vec<Motion>> = (0..stages.len()).map(|_| Vec::new()).collect();
        let mut next_ids: HashMap<String, Vec<String>> = HashMap::new();

        let mut names: Vec<&str> = a.iter().map(|g| g.name.as_str()).collect();
        names.extend(b.iter().map(|g| g.name.as_str()).filter(|n| !a.iter().any(|g| g.name == *n)));
        for name in names {
            let ga = a.iter().find(|g| g.name == name);
            let gb = b.iter().find(|g| g.name == name);
            let empty = SceneGroup {
                name: name.to_string(),
                schema: BTreeMap::new(),
                rows: Vec::new(),
                states: Vec::new(),
            };
            let (ga, gb) = (ga.unwrap_or(&empty), gb.unwrap_or(&empty));
            let j = join(ga, gb, options.key.as_deref(), pair)?;
            let old_ids = ids.get(name).cloned().unwrap_or_default();
            let mut new_ids: Vec<String> = (0..gb.rows.len()).map(|i| format!("{name}/{}/{i}", pair + 1)).collect();
            // motions are pushed in target-row order so data order is kept
            let mut ordered: Vec<(usize, Motion)> = Vec::new();
            for &(ia, ib) in &j.pairs {
                new_ids[ib] = old_ids[ia].clone();
                ordered.push((ib, Motion::Move { id: old_ids[ia].clone(), from: ga.states[ia].clone(), to: gb.states[ib].clone() }));
            }
            for &(ia, ib) in &j.merges {
                ordered.push((ib, Motion::Merge { id: old_ids[ia].clone(), from: ga.states[ia].clone(), to: gb.states[ib].clone() }));
            }
            for &(ia, ib) in &j.splits {
                ordered.push((ib, Motion::Split { id: new_ids[ib].clone(), from: ga.states[ia].clone(), to: gb.states[ib].clone() }));
            }
            ordered.sort_by_key(|(i, _)| *i);
            per_stage[move_stage].extend(ordered.into_iter().map(|(_, m)| m));
            for &ia in &j.exits {
                per_stage[0].push(Motion::Exit { id: old_ids[ia].clone(), from: ga.states[ia].clone() });
            }
            for &ib in &j.enters {
                per_stage[last_stage].push(Motion::Enter { id: new_ids[ib].clone(), to: gb.states[ib].clone() });
            }
            next_ids.insert(name.to_string(), new_ids);
        }

        for (s, (stage, mut motions)) in stages.iter().zip(per_stage).enumerate() {
            let t = &stage.timing;
            if instant_step {
                for motion in motions {
                    apply_motion(&mut elements, motion, (cursor, cursor, 0.0), t);
                }
                continue;
            }
            let seg_start = cursor;
            let stage_start = cursor + t.delay_ms;
            cursor = stage_start + t.duration_ms;
            segments.push(Segment {
                pair,
                stage: s,
                start: seg_start,
                end: cursor,
                components: stage.components.iter().copied().collect(),
            });
            if options.stagger_order == StaggerOrder::Value {
                motions.sort_by(|x, y| x.start_x().total_cmp(&y.start_x()));
            }
            let n = motions.len();
            let length = t.duration_ms * (1.0 - t.stagger);
            for (k, motion) in motions.into_iter().enumerate() {
                let offset = if n > 1 { k as f64 * t.stagger * t.duration_ms / (n - 1) as f64 } else { 0.0 };
                let window = (stage_start + offset, stage_start + offset + length, offset);
                apply_motion(&mut elements, motion, window, t);
            }
        }
        ids = next_ids;
        boundaries.push(cursor);
        marks.push(KeyframeMark {
            time: 0.0,
            elements: b.iter().flat_map(|g| ids[&g.name].clone()).collect(),
        });
    }

    let duration = cursor;
    for (mark, at) in marks.iter_mut().zip(&boundaries) {
        mark.time = if duration > 0.0 { at / duration } else { 0.0 };
    }
    if let Some(last) = marks.last_mut() {
        last.time = 1.0;
    }
    Ok(Timeline {
        duration,
        segments,
        keyframes: marks,
        elements,
    })
}

fn apply_motion(elements: &mut BTreeMap<String, Element>, motion: Motion, window: (f64, f64, f64), timing: &Timing) {
    let moves = |from: &State, to: &State, skip_opacity: bool| -> Vec<Track> {
        from.iter()
            .filter(|(attr, _)| !(skip_opacity && **attr == Attribute::Opacity))
            .filter_map(|(attr, f)| to.get(attr).map(|t| track(*attr, window, f.clone(), t.clone(), timing)))
            .collect()
    };
    let group = |id: &str| id.split('/').next().unwrap_or_default().to_string();
    match motion {
        Motion::Move { id, from, to } => {
            let tracks = moves(&from, &to, false);
            elements.get_mut(&id).expect("joined ids exist").tracks.extend(tracks);
        }
        Motion::Merge { id, from, to } => {
            let mut tracks = moves(&from, &to, true);
            tracks.push(track(Attribute::Opacity, window, opacity(&from), AttrValue::Number(0.0), timing));
            let el = elements.get_mut(&id).expect("joined ids exist");
            el.tracks.extend(tracks);
            el.death = Some(window.1);
        }
        Motion::Exit { id, from } => {
            let el = elements.get_mut(&id).expect("joined ids exist");
            el.tracks.push(track(Attribute::Opacity, window, opacity(&from), AttrValue::Number(0.0), timing));
            el.death = Some(window.1);
        }
        Motion::Enter { id, to } => {
            let mut initial = to.clone();
            initial.insert(Attribute::Opacity, AttrValue::Number(0.0));
            let tracks = vec![track(Attribute::Opacity, window, AttrValue::Number(0.0), opacity(&to), timing)];
            elements.insert(id.clone(), Element { group: group(&id), birth: Some(window.0), death: None, initial, tracks });
        }
        Motion::Split { id, from, to } => {
            let mut initial = from.clone();
            initial.insert(Attribute::Opacity, AttrValue::Number(0.0));
            let mut tracks = moves(&from, &to, true);
            tracks.push(track(Attribute::Opacity, window, AttrValue::Number(0.0), opacity(&to), timing));
            elements.insert(id.clone(), Element { group: group(&id), birth: Some(window.0), death: None, initial, tracks });
        }
    }
}
