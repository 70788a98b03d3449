use std::collections::BTreeMap;

use super::{AggregateDescriptor, BinDescriptor, EditError, EditOp, EditOpSet, FieldRef};
use crate::spec::{canonical_transforms, default_scale_type, BinTransform, ChartSpec, PredicateOp, Transform};

/// Scale types equal to the data type's default are dropped, so that
/// "written out" and "implied" compare equal, and transforms are sorted.
pub(crate) fn normalize(spec: &ChartSpec) -> ChartSpec {
    let mut out = spec.clone();
    for (channel, enc) in out.encodings.iter_mut() {
        if enc.scale.scale_type == Some(default_scale_type(*channel, enc)) {
            enc.scale.scale_type = None;
        }
    }
    canonical_transforms(&mut out.transforms);
    out
}

/// Itemize the difference between two layer-free charts over the same data.
///
/// Identical charts give an empty set.
pub fn diff(start: &ChartSpec, end: &ChartSpec) -> Result<EditOpSet, EditError> {
    if !start.layers.is_empty() || !end.layers.is_empty() {
        return Err(EditError::unsupported("layer", "charts with annotation layers cannot be diffed"));
    }
    if start.data != end.data {
        return Err(EditError::unsupported("data", "both charts must use the same dataset"));
    }
    let (a, b) = (normalize(start), normalize(end));
    let mut ops = Vec::new();
    if a.mark != b.mark {
        ops.push(EditOp::Mark { from: a.mark, to: b.mark });
    }

    let mut add_agg = AggregateDescriptor::default();
    let mut remove_agg = AggregateDescriptor::default();
    let mut add_bin = BinDescriptor::default();
    let mut remove_bin = BinDescriptor::default();

    let channels: std::collections::BTreeSet<_> = a.encodings.keys().chain(b.encodings.keys()).copied().collect();
    for channel in channels {
        let path = format!("encoding.{channel}");
        match (a.encodings.get(&channel), b.encodings.get(&channel)) {
            (Some(ea), Some(eb)) => {
                if ea.is_count_only() != eb.is_count_only() {
                    return Err(EditError::unsupported(path, "switching a channel between count and a field"));
                }
                if FieldRef::of(ea) != FieldRef::of(eb) {
                    ops.push(EditOp::ModifyEncoding {
                        channel,
                        from: FieldRef::of(ea),
                        to: FieldRef::of(eb),
                    });
                }
                match (ea.aggregate, eb.aggregate) {
                    (None, Some(op)) => {
                        add_agg.channels.insert(channel, op);
                    }
                    (Some(op), None) => {
                        remove_agg.channels.insert(channel, op);
                    }
                    (Some(x), Some(y)) if x != y => {
                        return Err(EditError::unsupported(format!("{path}.aggregate"), "changing an aggregate op"));
                    }
                    _ => {}
                }
                match (ea.bin, eb.bin) {
                    (None, Some(m)) => {
                        add_bin.channels.insert(channel, m);
                    }
                    (Some(m), None) => {
                        remove_bin.channels.insert(channel, m);
                    }
                    (Some(x), Some(y)) if x != y => {
                        return Err(EditError::unsupported(format!("{path}.bin"), "changing maxbins"));
                    }
                    _ => {}
                }
                if ea.scale != eb.scale {
                    ops.push(EditOp::ModifyScale {
                        channel,
                        from: ea.scale.clone(),
                        to: eb.scale.clone(),
                    });
                }
            }
            (Some(ea), None) if ea.is_count_only() => {
                remove_agg.counts.insert(channel, ea.clone());
            }
            (Some(ea), None) => ops.push(EditOp::RemoveEncoding {
                channel,
                encoding: ea.clone(),
            }),
            (None, Some(eb)) if eb.is_count_only() => {
                add_agg.counts.insert(channel, eb.clone());
            }
            (None, Some(eb)) => ops.push(EditOp::AddEncoding {
                channel,
                encoding: eb.clone(),
            }),
            (None, None) => unreachable!("channel comes from one of the charts"),
        }
    }

    let filters = |s: &ChartSpec| -> BTreeMap<(String, PredicateOp), crate::spec::FieldPredicate> {
        s.filters().map(|p| ((p.field.clone(), p.op), p.clone())).collect()
    };
    let (fa, fb) = (filters(&a), filters(&b));
    for (key, p) in &fa {
        match fb.get(key) {
            None => ops.push(EditOp::RemoveFilter(p.clone())),
            Some(q) if q != p => ops.push(EditOp::ModifyFilter {
                from: p.clone(),
                to: q.clone(),
            }),
            _ => {}
        }
    }
    for (key, q) in &fb {
        if !fa.contains_key(key) {
            ops.push(EditOp::AddFilter(q.clone()));
        }
    }

    match (a.aggregate_transform(), b.aggregate_transform()) {
        (None, Some(t)) => add_agg.transform = Some(t.clone()),
        (Some(t), None) => remove_agg.transform = Some(t.clone()),
        (Some(x), Some(y)) if x != y => {
            return Err(EditError::unsupported("transform", "changing an aggregate transform"));
        }
        _ => {}
    }

    let bins = |s: &ChartSpec| -> BTreeMap<String, BinTransform> {
        s.transforms
            .iter()
            .filter_map(|t| match t {
                Transform::Bin(b) => Some((b.field.clone(), b.clone())),
                _ => None,
            })
            .collect()
    };
    let (ba, bb) = (bins(&a), bins(&b));
    for (field, t) in &ba {
        match bb.get(field) {
            None => remove_bin.transforms.push(t.clone()),
            Some(u) if u != t => {
                return Err(EditError::unsupported("transform", format!("changing the bin transform on `{field}`")));
            }
            _ => {}
        }
    }
    for (field, u) in &bb {
        if !ba.contains_key(field) {
            add_bin.transforms.push(u.clone());
        }
    }

    if !add_agg.is_empty() && !remove_agg.is_empty() {
        return Err(EditError::unsupported("aggregate", "a transition that both adds and removes aggregation"));
    }
    if !add_bin.is_empty() && !remove_bin.is_empty() {
        return Err(EditError::unsupported("bin", "a transition that both adds and removes binning"));
    }
    if !add_agg.is_empty() {
        ops.push(EditOp::AddAggregate(add_agg));
    }
    if !remove_agg.is_empty() {
        ops.push(EditOp::RemoveAggregate(remove_agg));
    }
    if !add_bin.is_empty() {
        ops.push(EditOp::AddBin(add_bin));
    }
    if !remove_bin.is_empty() {
        ops.push(EditOp::RemoveBin(remove_bin));
    }

    ops.sort_by_key(EditOp::path);
    Ok(EditOpSet {
        source: a,
        target: b,
        ops,
    })
}
