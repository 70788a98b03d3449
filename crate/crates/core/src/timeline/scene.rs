use std::collections::BTreeMap;

use super::{AttrValue, Attribute, State};
use crate::data::{compute_domain, layer_dataset, mark_dataset, DataError, Dataset, Domain, Row};
use crate::spec::{bin_end_field, Channel, ChartSpec, DataType, Encoding, Mark, ScaleType};

/// Categorical colors, cycled by domain index.
pub const PALETTE: [[f64; 3]; 10] = [
    [0.306, 0.475, 0.655],
    [0.949, 0.557, 0.169],
    [0.882, 0.341, 0.349],
    [0.463, 0.718, 0.698],
    [0.349, 0.631, 0.310],
    [0.929, 0.788, 0.282],
    [0.690, 0.478, 0.631],
    [1.000, 0.616, 0.655],
    [0.612, 0.459, 0.373],
    [0.729, 0.690, 0.675],
];

const RAMP_LOW: [f64; 3] = [0.871, 0.922, 0.969];
const RAMP_HIGH: [f64; 3] = [0.031, 0.188, 0.420];
const DEFAULT_COLOR: [f64; 3] = [0.27, 0.51, 0.71];

/// The marks drawn for the base chart or one annotation layer.
#[derive(Clone, Debug, PartialEq)]
pub struct SceneGroup {
    /// `marks` or `layer:<name>`.
    pub name: String,
    pub schema: BTreeMap<String, DataType>,
    pub rows: Vec<Row>,
    pub states: Vec<State>,
}

struct Scales {
    domains: BTreeMap<Channel, Domain>,
    types: BTreeMap<Channel, ScaleType>,
}

impl Scales {
    /// Position of `v` on `channel` in `[0, 1]`, if the channel has a scale.
    fn unit(&self, channel: Channel, v: &crate::data::Value) -> Option<f64> {
        match self.domains.get(&channel)? {
            Domain::Continuous { min, max } => {
                let x = v.as_f64()?;
                if max <= min {
                    return Some(0.5);
                }
                if self.types.get(&channel) == Some(&ScaleType::Log) && *min > 0.0 && x > 0.0 {
                    return Some((x.ln() - min.ln()) / (max.ln() - min.ln()));
                }
                Some((x - min) / (max - min))
            }
            Domain::Discrete(values) => {
                let i = values.iter().position(|d| d == v)?;
                Some((i as f64 + 0.5) / values.len() as f64)
            }
        }
    }

    fn index(&self, channel: Channel, v: &crate::data::Value) -> Option<usize> {
        match self.domains.get(&channel)? {
            Domain::Discrete(values) => values.iter().position(|d| d == v),
            Domain::Continuous { .. } => None,
        }
    }
}

fn lerp3(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [0, 1, 2].map(|i| a[i] + (b[i] - a[i]) * t)
}

fn channel_value(ds: &Dataset, row: &Row, enc: &Encoding) -> crate::data::Value {
    let start = ds.value(row, &enc.value_field()).clone();
    if let (Some(field), Some(_)) = (&enc.field, enc.bin) {
        let end = ds.value(row, &bin_end_field(field));
        if let (Some(a), Some(b)) = (start.as_f64(), end.as_f64()) {
            return crate::data::Value::Number((a + b) / 2.0);
        }
    }
    start
}

fn state_of(mark: Mark, encodings: &BTreeMap<Channel, Encoding>, scales: &Scales, ds: &Dataset, row: &Row) -> State {
    let unit = |c: Channel| encodings.get(&c).and_then(|e| scales.unit(c, &channel_value(ds, row, e)));
    let mut state = State::new();
    state.insert(Attribute::X, AttrValue::Number(unit(Channel::X).unwrap_or(0.5)));
    state.insert(Attribute::Y, AttrValue::Number(unit(Channel::Y).unwrap_or(0.5)));
    state.insert(Attribute::Size, AttrValue::Number(unit(Channel::Size).unwrap_or(0.5)));
    state.insert(Attribute::Opacity, AttrValue::Number(unit(Channel::Opacity).map_or(1.0, |o| o.clamp(0.0, 1.0))));
    let color = match encodings.get(&Channel::Color) {
        Some(e) if !e.data_type.is_continuous() => scales
            .index(Channel::Color, &channel_value(ds, row, e))
            .map_or(DEFAULT_COLOR, |i| PALETTE[i % PALETTE.len()]),
        Some(_) => unit(Channel::Color).map_or(DEFAULT_COLOR, |t| lerp3(RAMP_LOW, RAMP_HIGH, t.clamp(0.0, 1.0))),
        None => DEFAULT_COLOR,
    };
    state.insert(Attribute::Color, AttrValue::Color(color));
    state.insert(Attribute::Shape, AttrValue::Category(mark.name().to_string()));
    state
}

/// Static scene of one chart: the base marks, then each layer, every one
/// positioned by the base chart's scales.
pub fn render_scene(spec: &ChartSpec) -> Result<Vec<SceneGroup>, DataError> {
    let mut scales = Scales {
        domains: BTreeMap::new(),
        types: BTreeMap::new(),
    };
    for (&channel, enc) in &spec.encodings {
        match compute_domain(spec, channel) {
            Ok(d) => {
                scales.domains.insert(channel, d);
            }
            Err(DataError::EmptyDomain(_)) => {}
            Err(e) => return Err(e),
        }
        scales.types.insert(channel, enc.effective_scale_type(channel));
    }
    let mut groups = Vec::new();
    let base = mark_dataset(spec)?;
    groups.push(group("marks".into(), spec.mark, &spec.encodings, &scales, base));
    for layer in &spec.layers {
        let ds = layer_dataset(spec, layer)?;
        groups.push(group(format!("layer:{}", layer.name), layer.mark, &layer.encodings, &scales, ds));
    }
    Ok(groups)
}

fn group(name: String, mark: Mark, encodings: &BTreeMap<Channel, Encoding>, scales: &Scales, ds: Dataset) -> SceneGroup {
    let states = ds.rows.iter().map(|row| state_of(mark, encodings, scales, &ds, row)).collect();
    SceneGroup {
        name,
        schema: ds.schema,
        rows: ds.rows,
        states,
    }
}
