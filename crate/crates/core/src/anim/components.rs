use std::collections::{BTreeMap, BTreeSet};

use super::Component;
use crate::data::{compute_domain, mark_dataset, Domain};
use crate::spec::{canonicalize, AggregateOp, Channel, ChartSpec, DataType, ScaleType};

type Guide = (Option<String>, DataType, ScaleType, Option<Domain>);

fn guide(spec: &ChartSpec, channel: Channel) -> Option<Guide> {
    let enc = spec.encoding(channel)?;
    Some((
        enc.field.clone(),
        enc.data_type,
        enc.effective_scale_type(channel),
        compute_domain(spec, channel).ok(),
    ))
}

type DataShape = BTreeMap<Channel, (Option<AggregateOp>, Option<u32>)>;

fn data_shape(spec: &ChartSpec) -> (DataShape, Option<BTreeSet<String>>) {
    let shape = spec.encodings.iter().map(|(c, e)| (*c, (e.aggregate, e.bin))).collect();
    let grouping = spec.encodings.values().any(|e| e.aggregate.is_some()).then(|| {
        spec.encodings
            .values()
            .filter(|e| e.aggregate.is_none())
            .filter_map(|e| e.field.clone())
            .collect()
    });
    (shape, grouping)
}

/// Components whose appearance differs between `a` and `b`.
///
/// * `data`: the transforms, the encoding-level aggregation or binning, or
///   the rows themselves differ.
/// * `marks`: the mark type, the mark rows, any encoding, any resolved scale
///   domain or the annotation layers differ.
/// * `axis.*` and `legend.*`: the channel's field, type, scale type or
///   resolved domain differ.
pub fn changed_components(a: &ChartSpec, b: &ChartSpec) -> BTreeSet<Component> {
    let (ca, cb) = (canonicalize(a), canonicalize(b));
    let mut out = BTreeSet::new();
    if ca.transforms != cb.transforms || ca.data != cb.data || data_shape(&ca) != data_shape(&cb) {
        out.insert(Component::Data);
    }
    let guides = [
        (Component::AxisX, Channel::X),
        (Component::AxisY, Channel::Y),
        (Component::LegendColor, Channel::Color),
        (Component::LegendSize, Channel::Size),
    ];
    let mut any_guide = false;
    for (component, channel) in guides {
        if guide(&ca, channel) != guide(&cb, channel) {
            out.insert(component);
            any_guide = true;
        }
    }
    let rows = |s: &ChartSpec| mark_dataset(s).ok().map(|d| d.rows);
    let marks_changed = ca.mark != cb.mark
        || ca.layers != cb.layers
        || any_guide
        || guide(&ca, Channel::Opacity) != guide(&cb, Channel::Opacity)
        || ca.encodings.keys().ne(cb.encodings.keys())
        || ca.encodings.iter().zip(&cb.encodings).any(|((_, x), (_, y))| {
            (&x.field, x.data_type, x.aggregate, x.bin) != (&y.field, y.data_type, y.aggregate, y.bin)
        })
        || rows(&ca) != rows(&cb);
    if marks_changed {
        out.insert(Component::Marks);
    }
    out
}
