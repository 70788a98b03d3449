//! Tween timelines compiled from a keyframe sequence and an animation plan.
//!
//! Marks become elements with per-attribute tracks on a global time axis.
//! Positions live in the normalized unit square, so a renderer only needs
//! to rescale.

mod compile;
mod sample;
mod scene;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::anim::{Component, Easing};
use crate::data::{DataError, Value};

pub use compile::{compile, CompileOptions, StaggerOrder};
pub use sample::{interpolate, sample};
pub use scene::{render_scene, SceneGroup, PALETTE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TimelineError {
    #[error("{keyframes} keyframes need {} animation steps, got {steps}", keyframes.saturating_sub(1))]
    StepCount { keyframes: usize, steps: usize },
    #[error("step {pair} animates {planned:?} but the keyframes change {changed:?}")]
    CoverageMismatch { pair: usize, planned: Vec<String>, changed: Vec<String> },
    #[error("join key `{field}` repeats in keyframe {keyframe}: {keys:?}")]
    JoinAmbiguity { field: String, keyframe: usize, keys: Vec<String> },
    #[error("keyframe {keyframe} cannot be rendered: {source}")]
    Render { keyframe: usize, source: DataError },
    #[error("t = {0} lies outside [0, 1]")]
    OutOfRange(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attribute {
    X,
    Y,
    Size,
    Opacity,
    Color,
    Shape,
}

impl Attribute {
    pub const ALL: [Attribute; 6] = [
        Attribute::X,
        Attribute::Y,
        Attribute::Size,
        Attribute::Opacity,
        Attribute::Color,
        Attribute::Shape,
    ];
}

/// Value of one visual attribute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AttrValue {
    Number(f64),
    /// Linear RGB components in `[0, 1]`.
    Color([f64; 3]),
    Category(String),
}

impl AttrValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            AttrValue::Number(x) => Some(*x),
            _ => None,
        }
    }

    /// Largest componentwise difference; categories compare exactly.
    pub fn distance(&self, other: &AttrValue) -> f64 {
        match (self, other) {
            (AttrValue::Number(a), AttrValue::Number(b)) => (a - b).abs(),
            (AttrValue::Color(a), AttrValue::Color(b)) => {
                a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
            }
            (AttrValue::Category(a), AttrValue::Category(b)) if a == b => 0.0,
            _ => f64::INFINITY,
        }
    }
}

pub type State = BTreeMap<Attribute, AttrValue>;

/// One attribute moving from `from` to `to` over `[start, end]` ms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Track {
    pub attribute: Attribute,
    pub start: f64,
    pub end: f64,
    pub from: AttrValue,
    pub to: AttrValue,
    pub easing: Easing,
    /// Delay of this element within its stage.
    pub stagger_offset: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Element {
    /// `marks` or `layer:<name>`.
    pub group: String,
    /// Appearance time in ms, absent for elements of the first keyframe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub birth: Option<f64>,
    /// Disappearance time in ms, absent for elements that survive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub death: Option<f64>,
    /// State at birth.
    pub initial: State,
    pub tracks: Vec<Track>,
}

/// One stage of one keyframe pair, including its leading pause.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub pair: usize,
    pub stage: usize,
    pub start: f64,
    pub end: f64,
    pub components: Vec<Component>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KeyframeMark {
    /// Normalized time at which the keyframe is shown exactly.
    pub time: f64,
    /// Element ids on screen, in scene order.
    pub elements: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    /// Total length in ms.
    pub duration: f64,
    pub segments: Vec<Segment>,
    pub keyframes: Vec<KeyframeMark>,
    pub elements: BTreeMap<String, Element>,
}

impl Timeline {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("timelines serialize")
    }

    pub fn from_json(json: &serde_json::Value) -> Result<Timeline, serde_json::Error> {
        Timeline::deserialize(json)
    }
}

/// Attribute values of every visible element at one instant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SceneSample {
    pub t: f64,
    pub elements: BTreeMap<String, State>,
}

impl Serialize for Component {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Component {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Component::from_name(&name).ok_or_else(|| serde::de::Error::custom(format!("unknown component `{name}`")))
    }
}

impl Serialize for Easing {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Easing {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Easing::from_name(&name).ok_or_else(|| serde::de::Error::custom(format!("unknown easing `{name}`")))
    }
}

pub(crate) fn key_string(values: &[&Value]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("|")
}
