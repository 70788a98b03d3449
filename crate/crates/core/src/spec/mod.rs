//! The supported chart-specification subset.
//!
//! A [`ChartSpec`] is a single-view, Cartesian chart: one mark type, a set of
//! channel encodings, an ordered transform pipeline and an inline dataset.
//! Optional [`AnnotationLayer`]s add extra marks (a median rule, a highlighted
//! point) that share the base chart's scales.
//!
//! Documents are parsed with [`parse_chart_spec`], checked by [`validate`],
//! and normalized by [`canonicalize`]. Unknown or unsupported properties are
//! errors, never silently dropped.

mod canonical;
mod error;
mod json;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::data::{Domain, Row, Value};

pub use canonical::{canonicalize, default_scale_type, specs_equal};
pub(crate) use canonical::canonical_transforms;
pub use error::SpecError;
pub use json::{parse_chart_spec, parse_chart_value};
pub(crate) use json::{domain_to_json as domain_json, encoding_to_json, predicate_to_json, scale_to_json, transforms_to_json};
pub use validate::validate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mark {
    Point,
    Bar,
    Line,
    Tick,
    Rect,
    Area,
    /// Only valid inside annotation layers.
    Rule,
}

impl Mark {
    pub const fn name(self) -> &'static str {
        match self {
            Mark::Point => "point",
            Mark::Bar => "bar",
            Mark::Line => "line",
            Mark::Tick => "tick",
            Mark::Rect => "rect",
            Mark::Area => "area",
            Mark::Rule => "rule",
        }
    }

    pub fn from_name(name: &str) -> Option<Mark> {
        Some(match name {
            "point" => Mark::Point,
            "bar" => Mark::Bar,
            "line" => Mark::Line,
            "tick" => Mark::Tick,
            "rect" => Mark::Rect,
            "area" => Mark::Area,
            "rule" => Mark::Rule,
            _ => return None,
        })
    }

    /// Marks that need one datum per position along their dimension.
    pub const fn needs_grouped_data(self) -> bool {
        matches!(self, Mark::Bar | Mark::Line | Mark::Area)
    }
}

impl fmt::Display for Mark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Encoding channels, declared in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    X,
    Y,
    Color,
    Size,
    Opacity,
}

impl Channel {
    pub const ALL: [Channel; 5] = [
        Channel::X,
        Channel::Y,
        Channel::Color,
        Channel::Size,
        Channel::Opacity,
    ];

    pub const fn name(self) -> &'static str {
        match self {
            Channel::X => "x",
            Channel::Y => "y",
            Channel::Color => "color",
            Channel::Size => "size",
            Channel::Opacity => "opacity",
        }
    }

    pub fn from_name(name: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.name() == name)
    }

    pub const fn is_position(self) -> bool {
        matches!(self, Channel::X | Channel::Y)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataType {
    Quantitative,
    Nominal,
    Ordinal,
    Temporal,
}

impl DataType {
    pub const fn name(self) -> &'static str {
        match self {
            DataType::Quantitative => "quantitative",
            DataType::Nominal => "nominal",
            DataType::Ordinal => "ordinal",
            DataType::Temporal => "temporal",
        }
    }

    pub fn from_name(name: &str) -> Option<DataType> {
        Some(match name {
            "quantitative" => DataType::Quantitative,
            "nominal" => DataType::Nominal,
            "ordinal" => DataType::Ordinal,
            "temporal" => DataType::Temporal,
            _ => return None,
        })
    }

    /// Whether values of this type map onto a continuous scale.
    pub const fn is_continuous(self) -> bool {
        matches!(self, DataType::Quantitative | DataType::Temporal)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregateOp {
    Mean,
    Median,
    Sum,
    Count,
    Min,
    Max,
}

impl AggregateOp {
    pub const fn name(self) -> &'static str {
        match self {
            AggregateOp::Mean => "mean",
            AggregateOp::Median => "median",
            AggregateOp::Sum => "sum",
            AggregateOp::Count => "count",
            AggregateOp::Min => "min",
            AggregateOp::Max => "max",
        }
    }

    pub fn from_name(name: &str) -> Option<AggregateOp> {
        Some(match name {
            "mean" | "average" => AggregateOp::Mean,
            "median" => AggregateOp::Median,
            "sum" => AggregateOp::Sum,
            "count" => AggregateOp::Count,
            "min" => AggregateOp::Min,
            "max" => AggregateOp::Max,
            _ => return None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleType {
    Linear,
    Log,
    Ordinal,
    Band,
    Time,
}

impl ScaleType {
    pub const fn name(self) -> &'static str {
        match self {
            ScaleType::Linear => "linear",
            ScaleType::Log => "log",
            ScaleType::Ordinal => "ordinal",
            ScaleType::Band => "band",
            ScaleType::Time => "time",
        }
    }

    pub fn from_name(name: &str) -> Option<ScaleType> {
        Some(match name {
            "linear" => ScaleType::Linear,
            "log" => ScaleType::Log,
            "ordinal" => ScaleType::Ordinal,
            "band" => ScaleType::Band,
            "time" => ScaleType::Time,
            _ => return None,
        })
    }

    pub const fn is_discrete(self) -> bool {
        matches!(self, ScaleType::Ordinal | ScaleType::Band)
    }
}

/// Scale of one channel. The output range is always the unit interval.
///
/// `scale_type: None` means "the default for the encoding's data type";
/// [`canonicalize`] fills it in.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ScaleSpec {
    pub scale_type: Option<ScaleType>,
    pub domain: Option<Domain>,
}

impl ScaleSpec {
    pub fn is_default(&self) -> bool {
        self.scale_type.is_none() && self.domain.is_none()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Encoding {
    /// Absent only for `count` aggregates.
    pub field: Option<String>,
    pub data_type: DataType,
    pub aggregate: Option<AggregateOp>,
    /// `maxbins` when the channel is binned.
    pub bin: Option<u32>,
    pub scale: ScaleSpec,
}

impl Encoding {
    pub fn new(field: impl Into<String>, data_type: DataType) -> Self {
        Encoding {
            field: Some(field.into()),
            data_type,
            aggregate: None,
            bin: None,
            scale: ScaleSpec::default(),
        }
    }

    pub fn count() -> Self {
        Encoding {
            field: None,
            data_type: DataType::Quantitative,
            aggregate: Some(AggregateOp::Count),
            bin: None,
            scale: ScaleSpec::default(),
        }
    }

    /// A `count` encoding that carries no field of its own.
    pub fn is_count_only(&self) -> bool {
        self.aggregate == Some(AggregateOp::Count) && self.field.is_none()
    }

    /// Name of the field holding this channel's values after the encoding
    /// stage (aggregation and binning) has run.
    pub fn value_field(&self) -> String {
        let field = self.field.as_deref().unwrap_or("");
        match (self.aggregate, self.bin) {
            (Some(AggregateOp::Count), _) => "__count".to_string(),
            (Some(op), _) => format!("{}_{}", op.name(), field),
            (None, Some(_)) => bin_start_field(field),
            (None, None) => field.to_string(),
        }
    }

    /// Scale type after defaults are applied.
    pub fn effective_scale_type(&self, channel: Channel) -> ScaleType {
        self.scale
            .scale_type
            .unwrap_or_else(|| default_scale_type(channel, self))
    }
}

pub fn bin_start_field(field: &str) -> String {
    format!("bin_{field}")
}

pub fn bin_end_field(field: &str) -> String {
    format!("bin_{field}_end")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PredicateOp {
    #[serde(rename = "equal")]
    Eq,
    #[serde(rename = "neq")]
    Neq,
    #[serde(rename = "lt")]
    Lt,
    #[serde(rename = "lte")]
    Lte,
    #[serde(rename = "gt")]
    Gt,
    #[serde(rename = "gte")]
    Gte,
    #[serde(rename = "range")]
    Range,
    #[serde(rename = "oneOf")]
    OneOf,
}

impl PredicateOp {
    pub const ALL: [PredicateOp; 8] = [
        PredicateOp::Eq,
        PredicateOp::Neq,
        PredicateOp::Lt,
        PredicateOp::Lte,
        PredicateOp::Gt,
        PredicateOp::Gte,
        PredicateOp::Range,
        PredicateOp::OneOf,
    ];

    /// Key used in the document format.
    pub const fn key(self) -> &'static str {
        match self {
            PredicateOp::Eq => "equal",
            PredicateOp::Neq => "neq",
            PredicateOp::Lt => "lt",
            PredicateOp::Lte => "lte",
            PredicateOp::Gt => "gt",
            PredicateOp::Gte => "gte",
            PredicateOp::Range => "range",
            PredicateOp::OneOf => "oneOf",
        }
    }

    pub fn from_key(key: &str) -> Option<PredicateOp> {
        PredicateOp::ALL.into_iter().find(|op| op.key() == key)
    }

    /// Ops that need an order on the field's values.
    pub const fn is_ordered(self) -> bool {
        matches!(
            self,
            PredicateOp::Lt | PredicateOp::Lte | PredicateOp::Gt | PredicateOp::Gte | PredicateOp::Range
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Operand {
    Scalar(Value),
    /// Inclusive on both ends.
    Range(Value, Value),
    Set(Vec<Value>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldPredicate {
    pub field: String,
    pub op: PredicateOp,
    pub operand: Operand,
}

impl FieldPredicate {
    pub fn new(field: impl Into<String>, op: PredicateOp, operand: Operand) -> Self {
        FieldPredicate {
            field: field.into(),
            op,
            operand,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateField {
    pub op: AggregateOp,
    pub field: Option<String>,
    pub alias: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateTransform {
    pub fields: Vec<AggregateField>,
    pub groupby: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinTransform {
    pub field: String,
    pub maxbins: u32,
    pub start_as: String,
    pub end_as: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Transform {
    Filter(FieldPredicate),
    Bin(BinTransform),
    Aggregate(AggregateTransform),
}

impl Transform {
    pub const fn kind_name(&self) -> &'static str {
        match self {
            Transform::Filter(_) => "filter",
            Transform::Bin(_) => "bin",
            Transform::Aggregate(_) => "aggregate",
        }
    }
}

/// Rows of an inline dataset exactly as they appear in the document.
#[derive(Clone, Debug, PartialEq)]
pub struct InlineData {
    pub name: String,
    pub values: Vec<Row>,
}

/// An extra mark drawn over the base chart, using the base chart's scales.
#[derive(Clone, Debug, PartialEq)]
pub struct AnnotationLayer {
    pub name: String,
    pub mark: Mark,
    pub encodings: BTreeMap<Channel, Encoding>,
    pub transforms: Vec<Transform>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChartSpec {
    pub mark: Mark,
    pub encodings: BTreeMap<Channel, Encoding>,
    pub transforms: Vec<Transform>,
    pub data: Arc<InlineData>,
    pub layers: Vec<AnnotationLayer>,
}

impl ChartSpec {
    pub fn from_json(text: &str) -> Result<ChartSpec, SpecError> {
        parse_chart_spec(text)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        json::chart_to_json(self)
    }

    /// Pretty-printed JSON with sorted keys.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("JSON values always serialize")
    }

    pub fn encoding(&self, channel: Channel) -> Option<&Encoding> {
        self.encodings.get(&channel)
    }

    pub fn filters(&self) -> impl Iterator<Item = &FieldPredicate> {
        self.transforms.iter().filter_map(|t| match t {
            Transform::Filter(p) => Some(p),
            _ => None,
        })
    }

    pub fn aggregate_transform(&self) -> Option<&AggregateTransform> {
        self.transforms.iter().find_map(|t| match t {
            Transform::Aggregate(a) => Some(a),
            _ => None,
        })
    }

    /// True when any encoding or transform aggregates the data.
    pub fn is_aggregated(&self) -> bool {
        self.aggregate_transform().is_some()
            || self.encodings.values().any(|e| e.aggregate.is_some())
    }
}

impl Serialize for ChartSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ChartSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = serde_json::Value::deserialize(deserializer)?;
        parse_chart_value(&value).map_err(serde::de::Error::custom)
    }
}
