//! Staged animation plans over a keyframe sequence.
//!
//! Each adjacent keyframe pair changes a set of visual [`Component`]s. An
//! [`AnimStepSpec`] orders those components into stages; a plan picks one
//! step spec per pair so that the stage counts add up to a budget.

mod complexity;
mod components;
mod recommend;

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value as Json};

pub use complexity::{complexity, component_weight};
pub use components::changed_components;
pub use recommend::{enumerate_pair_specs, recommend_animations, total_complexity};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnimError {
    #[error("a stage budget of {requested} is infeasible; plans need between {min} and {max} stages")]
    InfeasibleBudget { requested: usize, min: usize, max: usize },
    #[error("a plan needs at least two keyframes")]
    TooFewKeyframes,
    #[error("malformed plan document at {path}: {message}")]
    InvalidPlan { path: String, message: String },
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> AnimError {
    AnimError::InvalidPlan {
        path: path.into(),
        message: message.into(),
    }
}

/// Visual components that can change between two keyframes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    Data,
    Marks,
    AxisX,
    AxisY,
    LegendColor,
    LegendSize,
}

impl Component {
    pub const ALL: [Component; 6] = [
        Component::Data,
        Component::Marks,
        Component::AxisX,
        Component::AxisY,
        Component::LegendColor,
        Component::LegendSize,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Component::Data => "data",
            Component::Marks => "marks",
            Component::AxisX => "axis.x",
            Component::AxisY => "axis.y",
            Component::LegendColor => "legend.color",
            Component::LegendSize => "legend.size",
        }
    }

    pub fn from_name(name: &str) -> Option<Component> {
        Component::ALL.into_iter().find(|c| c.name() == name)
    }

    /// Axes and legends read a scale that the data stage may change.
    pub const fn is_guide(self) -> bool {
        !matches!(self, Component::Data | Component::Marks)
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Easing {
    #[default]
    Linear,
    CubicInOut,
}

impl Easing {
    pub const fn name(self) -> &'static str {
        match self {
            Easing::Linear => "linear",
            Easing::CubicInOut => "cubic-in-out",
        }
    }

    pub fn from_name(name: &str) -> Option<Easing> {
        match name {
            "linear" => Some(Easing::Linear),
            "cubic-in-out" => Some(Easing::CubicInOut),
            _ => None,
        }
    }

    /// Maps progress in `[0, 1]` to eased progress in `[0, 1]`.
    pub fn apply(self, t: f64) -> f64 {
        let t = t.clamp(0.0, 1.0);
        match self {
            Easing::Linear => t,
            Easing::CubicInOut => {
                if t < 0.5 {
                    4.0 * t * t * t
                } else {
                    1.0 - (-2.0 * t + 2.0).powi(3) / 2.0
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Timing {
    pub duration_ms: f64,
    /// Pause before the stage starts.
    pub delay_ms: f64,
    /// Fraction of the duration over which element starts are spread.
    pub stagger: f64,
    pub easing: Easing,
}

impl Default for Timing {
    fn default() -> Self {
        Timing {
            duration_ms: 600.0,
            delay_ms: 0.0,
            stagger: 0.0,
            easing: Easing::Linear,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stage {
    pub components: BTreeSet<Component>,
    pub timing: Timing,
}

impl Stage {
    pub fn new(components: impl IntoIterator<Item = Component>) -> Self {
        Stage {
            components: components.into_iter().collect(),
            timing: Timing::default(),
        }
    }
}

/// How one adjacent keyframe pair animates.
#[derive(Clone, Debug, PartialEq)]
pub struct AnimStepSpec {
    pub stages: Vec<Stage>,
}

impl AnimStepSpec {
    pub fn stage_count(&self) -> usize {
        self.stages.len()
    }

    pub fn components(&self) -> BTreeSet<Component> {
        self.stages.iter().flat_map(|s| s.components.iter().copied()).collect()
    }

    pub fn to_json(&self, pair_index: usize) -> Json {
        let stages: Vec<Json> = self
            .stages
            .iter()
            .map(|s| {
                json!({
                    "components": s.components.iter().map(|c| c.name()).collect::<Vec<_>>(),
                    "duration": s.timing.duration_ms,
                    "delay": s.timing.delay_ms,
                    "stagger": s.timing.stagger,
                    "easing": s.timing.easing.name(),
                })
            })
            .collect();
        json!({ "pair_index": pair_index, "stages": stages })
    }

    pub fn from_json(json: &Json, path: &str) -> Result<AnimStepSpec, AnimError> {
        let stages = json
            .get("stages")
            .and_then(Json::as_array)
            .ok_or_else(|| invalid(path, "expected a `stages` array"))?;
        if stages.is_empty() {
            return Err(invalid(path, "a step needs at least one stage"));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (i, s) in stages.iter().enumerate() {
            let here = format!("{path}.stages[{i}]");
            let names = s
                .get("components")
                .and_then(Json::as_array)
                .ok_or_else(|| invalid(&here, "expected a `components` array"))?;
            let mut components = BTreeSet::new();
            for n in names {
                let c = n
                    .as_str()
                    .and_then(Component::from_name)
                    .ok_or_else(|| invalid(&here, format!("unknown component {n}")))?;
                if !seen.insert(c) {
                    return Err(invalid(&here, format!("component `{c}` appears in two stages")));
                }
                components.insert(c);
            }
            let number = |key: &str, default: f64| -> Result<f64, AnimError> {
                match s.get(key) {
                    None => Ok(default),
                    Some(v) => v
                        .as_f64()
                        .filter(|x| x.is_finite() && *x >= 0.0)
                        .ok_or_else(|| invalid(format!("{here}.{key}"), "expected a nonnegative number")),
                }
            };
            let defaults = Timing::default();
            let timing = Timing {
                duration_ms: number("duration", defaults.duration_ms)?,
                delay_ms: number("delay", defaults.delay_ms)?,
                stagger: number("stagger", defaults.stagger)?,
                easing: match s.get("easing") {
                    None => defaults.easing,
                    Some(e) => e
                        .as_str()
                        .and_then(Easing::from_name)
                        .ok_or_else(|| invalid(format!("{here}.easing"), "expected `linear` or `cubic-in-out`"))?,
                },
            };
            if timing.duration_ms <= 0.0 {
                return Err(invalid(format!("{here}.duration"), "durations must be positive"));
            }
            if timing.stagger > 1.0 {
                return Err(invalid(format!("{here}.stagger"), "stagger is a fraction in [0, 1]"));
            }
            out.push(Stage { components, timing });
        }
        Ok(AnimStepSpec { stages: out })
    }
}

/// One step spec per adjacent keyframe pair.
#[derive(Clone, Debug, PartialEq)]
pub struct AnimationPlanCandidate {
    pub steps: Vec<AnimStepSpec>,
    pub total_complexity: f64,
    pub total_stages: usize,
}

impl AnimationPlanCandidate {
    pub fn new(steps: Vec<AnimStepSpec>) -> Self {
        AnimationPlanCandidate {
            total_complexity: total_complexity(&steps),
            total_stages: steps.iter().map(AnimStepSpec::stage_count).sum(),
            steps,
        }
    }

    pub fn to_json(&self, rank: usize) -> Json {
        json!({
            "rank": rank,
            "total_complexity": self.total_complexity,
            "total_stages": self.total_stages,
            "steps": self.steps.iter().enumerate().map(|(i, s)| s.to_json(i)).collect::<Vec<_>>(),
        })
    }

    /// Reads a plan object, a ranked plan array (taking the first entry), or
    /// a bare array of steps.
    pub fn from_json(json: &Json) -> Result<AnimationPlanCandidate, AnimError> {
        let steps_json = match json {
            Json::Array(items) if items.first().is_some_and(|x| x.get("steps").is_some()) => &items[0]["steps"],
            Json::Array(_) => json,
            Json::Object(o) => o.get("steps").ok_or_else(|| invalid("$", "expected a `steps` array"))?,
            _ => return Err(invalid("$", "expected a plan object or array")),
        };
        let steps = steps_json
            .as_array()
            .ok_or_else(|| invalid("steps", "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, s)| AnimStepSpec::from_json(s, &format!("steps[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(AnimationPlanCandidate::new(steps))
    }
}

/// Ranked plans as a JSON array.
pub fn plans_to_json(plans: &[AnimationPlanCandidate]) -> Json {
    Json::Array(plans.iter().enumerate().map(|(i, p)| p.to_json(i + 1)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_easing_endpoints_and_symmetry() {
        let e = Easing::CubicInOut;
        assert_eq!(e.apply(0.0), 0.0);
        assert_eq!(e.apply(1.0), 1.0);
        assert!((e.apply(0.5) - 0.5).abs() < 1e-12);
        for t in [0.1, 0.2, 0.37] {
            assert!((e.apply(t) + e.apply(1.0 - t) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn plan_json_round_trip() {
        let mut step = AnimStepSpec { stages: vec![Stage::new([Component::Data]), Stage::new([Component::Marks, Component::AxisX])] };
        step.stages[1].timing.stagger = 0.5;
        step.stages[1].timing.easing = Easing::CubicInOut;
        let plan = AnimationPlanCandidate::new(vec![step]);
        let doc = plans_to_json(std::slice::from_ref(&plan));
        assert_eq!(AnimationPlanCandidate::from_json(&doc).unwrap(), plan);
    }

    #[test]
    fn malformed_plans() {
        let bad = json!({"steps": [{"stages": [{"components": ["data"], "duration": 0}]}]});
        assert!(AnimationPlanCandidate::from_json(&bad).is_err());
        let dup = json!({"steps": [{"stages": [{"components": ["data"]}, {"components": ["data"]}]}]});
        assert!(AnimationPlanCandidate::from_json(&dup).is_err());
        let unknown = json!({"steps": [{"stages": [{"components": ["glyphs"]}]}]});
        assert!(AnimationPlanCandidate::from_json(&unknown).is_err());
    }
}
