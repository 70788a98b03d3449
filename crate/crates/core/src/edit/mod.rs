//! Edit operations between two charts.
//!
//! [`diff`] itemizes what changed into an [`EditOpSet`]; [`apply_block`]
//! replays a block of operations on a chart. Every operation owns one
//! property path, so the operations of a block never interfere.

mod apply;
mod diff;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Map, Value as Json};

use crate::spec::{
    encoding_to_json, predicate_to_json, scale_to_json, transforms_to_json, AggregateOp, AggregateTransform,
    BinTransform, Channel, ChartSpec, DataType, Encoding, FieldPredicate, Mark, ScaleSpec, SpecError, Transform,
};

pub use apply::apply_block;
pub use diff::diff;

#[derive(Clone, Debug, thiserror::Error)]
pub enum EditError {
    #[error("unsupported change at {path}: {message}")]
    Unsupported { path: String, message: String },
    #[error("operation {op} does not apply: {message}")]
    InapplicableOp { op: String, message: String },
    #[error("block produces an invalid chart: {0}")]
    InvalidResult(SpecError),
}

impl EditError {
    fn unsupported(path: impl Into<String>, message: impl Into<String>) -> Self {
        EditError::Unsupported {
            path: path.into(),
            message: message.into(),
        }
    }
}

/// The field and type a channel shows, without aggregation or binning.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldRef {
    pub field: Option<String>,
    pub data_type: DataType,
}

impl FieldRef {
    pub fn of(enc: &Encoding) -> Self {
        FieldRef {
            field: enc.field.clone(),
            data_type: enc.data_type,
        }
    }
}

/// Every aggregation introduced (or removed) by one transition.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AggregateDescriptor {
    /// Aggregate ops on channels present in both charts.
    pub channels: BTreeMap<Channel, AggregateOp>,
    /// Field-less `count` channels that exist only on the aggregated side.
    pub counts: BTreeMap<Channel, Encoding>,
    pub transform: Option<AggregateTransform>,
}

impl AggregateDescriptor {
    pub fn is_empty(&self) -> bool {
        self.channels.is_empty() && self.counts.is_empty() && self.transform.is_none()
    }
}

/// Every binning introduced (or removed) by one transition.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BinDescriptor {
    /// `maxbins` per channel present in both charts.
    pub channels: BTreeMap<Channel, u32>,
    pub transforms: Vec<BinTransform>,
}

impl BinDescriptor {
    pub fn is_empty(&self) -> bool {
        self.channels.is_empty() && self.transforms.is_empty()
    }
}

/// One atomic difference between two charts.
#[derive(Clone, Debug, PartialEq)]
pub enum EditOp {
    Mark { from: Mark, to: Mark },
    AddEncoding { channel: Channel, encoding: Encoding },
    RemoveEncoding { channel: Channel, encoding: Encoding },
    ModifyEncoding { channel: Channel, from: FieldRef, to: FieldRef },
    /// `from`/`to` hold the scale exactly as written: `None` types mean
    /// "default for the data type".
    ModifyScale { channel: Channel, from: ScaleSpec, to: ScaleSpec },
    AddFilter(FieldPredicate),
    RemoveFilter(FieldPredicate),
    ModifyFilter { from: FieldPredicate, to: FieldPredicate },
    AddAggregate(AggregateDescriptor),
    RemoveAggregate(AggregateDescriptor),
    AddBin(BinDescriptor),
    RemoveBin(BinDescriptor),
}

/// Op kinds, in the vocabulary the ranking rules use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OpKind {
    Mark,
    AddEncoding,
    RemoveEncoding,
    ModifyEncoding,
    ModifyScale,
    AddFilter,
    RemoveFilter,
    ModifyFilter,
    AddAggregate,
    RemoveAggregate,
    AddBin,
    RemoveBin,
}

impl OpKind {
    pub const fn name(self) -> &'static str {
        match self {
            OpKind::Mark => "MARK",
            OpKind::AddEncoding => "ADD_ENCODING",
            OpKind::RemoveEncoding => "REMOVE_ENCODING",
            OpKind::ModifyEncoding => "MODIFY_ENCODING",
            OpKind::ModifyScale => "MODIFY_SCALE",
            OpKind::AddFilter => "ADD_FILTER",
            OpKind::RemoveFilter => "REMOVE_FILTER",
            OpKind::ModifyFilter => "MODIFY_FILTER",
            OpKind::AddAggregate => "ADD_AGGREGATE",
            OpKind::RemoveAggregate => "REMOVE_AGGREGATE",
            OpKind::AddBin => "ADD_BIN",
            OpKind::RemoveBin => "REMOVE_BIN",
        }
    }

    pub const fn is_filter(self) -> bool {
        matches!(self, OpKind::AddFilter | OpKind::RemoveFilter | OpKind::ModifyFilter)
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn filter_path(p: &FieldPredicate) -> String {
    format!("filter.{}.{}", p.field, p.op.key())
}

impl EditOp {
    pub fn kind(&self) -> OpKind {
        match self {
            EditOp::Mark { .. } => OpKind::Mark,
            EditOp::AddEncoding { .. } => OpKind::AddEncoding,
            EditOp::RemoveEncoding { .. } => OpKind::RemoveEncoding,
            EditOp::ModifyEncoding { .. } => OpKind::ModifyEncoding,
            EditOp::ModifyScale { .. } => OpKind::ModifyScale,
            EditOp::AddFilter(_) => OpKind::AddFilter,
            EditOp::RemoveFilter(_) => OpKind::RemoveFilter,
            EditOp::ModifyFilter { .. } => OpKind::ModifyFilter,
            EditOp::AddAggregate(_) => OpKind::AddAggregate,
            EditOp::RemoveAggregate(_) => OpKind::RemoveAggregate,
            EditOp::AddBin(_) => OpKind::AddBin,
            EditOp::RemoveBin(_) => OpKind::RemoveBin,
        }
    }

    /// The property this op changes. Unique within an [`EditOpSet`], so it
    /// doubles as the op's id.
    pub fn path(&self) -> String {
        match self {
            EditOp::Mark { .. } => "mark".into(),
            EditOp::AddEncoding { channel, .. }
            | EditOp::RemoveEncoding { channel, .. }
            | EditOp::ModifyEncoding { channel, .. } => format!("encoding.{channel}"),
            EditOp::ModifyScale { channel, .. } => format!("encoding.{channel}.scale"),
            EditOp::AddFilter(p) | EditOp::RemoveFilter(p) => filter_path(p),
            EditOp::ModifyFilter { from, .. } => filter_path(from),
            EditOp::AddAggregate(_) | EditOp::RemoveAggregate(_) => "aggregate".into(),
            EditOp::AddBin(_) | EditOp::RemoveBin(_) => "bin".into(),
        }
    }

    /// Channel touched by encoding-level ops.
    pub fn channel(&self) -> Option<Channel> {
        match self {
            EditOp::AddEncoding { channel, .. }
            | EditOp::RemoveEncoding { channel, .. }
            | EditOp::ModifyEncoding { channel, .. }
            | EditOp::ModifyScale { channel, .. } => Some(*channel),
            _ => None,
        }
    }

    /// The op that undoes this one.
    pub fn inverse(&self) -> EditOp {
        match self.clone() {
            EditOp::Mark { from, to } => EditOp::Mark { from: to, to: from },
            EditOp::AddEncoding { channel, encoding } => EditOp::RemoveEncoding { channel, encoding },
            EditOp::RemoveEncoding { channel, encoding } => EditOp::AddEncoding { channel, encoding },
            EditOp::ModifyEncoding { channel, from, to } => EditOp::ModifyEncoding { channel, from: to, to: from },
            EditOp::ModifyScale { channel, from, to } => EditOp::ModifyScale { channel, from: to, to: from },
            EditOp::AddFilter(p) => EditOp::RemoveFilter(p),
            EditOp::RemoveFilter(p) => EditOp::AddFilter(p),
            EditOp::ModifyFilter { from, to } => EditOp::ModifyFilter { from: to, to: from },
            EditOp::AddAggregate(d) => EditOp::RemoveAggregate(d),
            EditOp::RemoveAggregate(d) => EditOp::AddAggregate(d),
            EditOp::AddBin(d) => EditOp::RemoveBin(d),
            EditOp::RemoveBin(d) => EditOp::AddBin(d),
        }
    }

    pub fn payload(&self) -> Json {
        fn field_ref(r: &FieldRef) -> Json {
            let mut o = Map::new();
            if let Some(f) = &r.field {
                o.insert("field".into(), Json::from(f.clone()));
            }
            o.insert("type".into(), Json::from(r.data_type.name()));
            Json::Object(o)
        }
        match self {
            EditOp::Mark { from, to } => json!({ "from": from.name(), "to": to.name() }),
            EditOp::AddEncoding { channel, encoding } | EditOp::RemoveEncoding { channel, encoding } => {
                json!({ "channel": channel.name(), "encoding": encoding_to_json(encoding) })
            }
            EditOp::ModifyEncoding { channel, from, to } => {
                json!({ "channel": channel.name(), "from": field_ref(from), "to": field_ref(to) })
            }
            EditOp::ModifyScale { channel, from, to } => {
                json!({ "channel": channel.name(), "from": scale_to_json(from), "to": scale_to_json(to) })
            }
            EditOp::AddFilter(p) | EditOp::RemoveFilter(p) => json!({ "predicate": predicate_to_json(p) }),
            EditOp::ModifyFilter { from, to } => {
                json!({ "from": predicate_to_json(from), "to": predicate_to_json(to) })
            }
            EditOp::AddAggregate(d) | EditOp::RemoveAggregate(d) => {
                let mut o = Map::new();
                let channels: Map<String, Json> =
                    d.channels.iter().map(|(c, op)| (c.name().into(), Json::from(op.name()))).collect();
                o.insert("channels".into(), Json::Object(channels));
                let counts: Map<String, Json> =
                    d.counts.iter().map(|(c, e)| (c.name().into(), encoding_to_json(e))).collect();
                o.insert("counts".into(), Json::Object(counts));
                if let Some(t) = &d.transform {
                    o.insert("transform".into(), transforms_to_json(&[Transform::Aggregate(t.clone())]));
                }
                Json::Object(o)
            }
            EditOp::AddBin(d) | EditOp::RemoveBin(d) => {
                let channels: Map<String, Json> =
                    d.channels.iter().map(|(c, m)| (c.name().into(), Json::from(*m))).collect();
                let transforms: Vec<Transform> = d.transforms.iter().cloned().map(Transform::Bin).collect();
                json!({ "channels": channels, "transforms": transforms_to_json(&transforms) })
            }
        }
    }

    pub fn to_json(&self) -> Json {
        json!({ "kind": self.kind().name(), "path": self.path(), "payload": self.payload() })
    }
}

impl Serialize for EditOp {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl fmt::Display for EditOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.kind(), self.path())
    }
}

/// The ops turning `source` into `target`, sorted by path.
#[derive(Clone, Debug, PartialEq)]
pub struct EditOpSet {
    pub source: ChartSpec,
    pub target: ChartSpec,
    pub ops: Vec<EditOp>,
}

impl EditOpSet {
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn ids(&self) -> Vec<String> {
        self.ops.iter().map(EditOp::path).collect()
    }

    pub fn find(&self, kind: OpKind) -> Option<usize> {
        self.ops.iter().position(|op| op.kind() == kind)
    }

    pub fn to_json(&self) -> Json {
        Json::Array(self.ops.iter().map(EditOp::to_json).collect())
    }
}
