use super::{EditError, EditOp, FieldRef};
use crate::spec::{validate, ChartSpec, Transform};

fn inapplicable(op: &EditOp, message: impl Into<String>) -> EditError {
    EditError::InapplicableOp {
        op: op.path(),
        message: message.into(),
    }
}

/// Apply every op of `block` and validate the result.
///
/// The ops of one block touch disjoint properties, so their order does not
/// matter. Only the final chart is validated.
pub fn apply_block(spec: &ChartSpec, block: &[EditOp]) -> Result<ChartSpec, EditError> {
    let mut out = spec.clone();
    for op in block {
        apply_op(&mut out, op)?;
    }
    validate(&out).map_err(EditError::InvalidResult)?;
    Ok(out)
}

fn first_index(spec: &ChartSpec, pred: impl Fn(&Transform) -> bool) -> usize {
    spec.transforms.iter().position(pred).unwrap_or(spec.transforms.len())
}

fn apply_op(out: &mut ChartSpec, op: &EditOp) -> Result<(), EditError> {
    match op {
        EditOp::Mark { from, to } => {
            if out.mark != *from {
                return Err(inapplicable(op, format!("mark is `{}`", out.mark)));
            }
            out.mark = *to;
        }
        EditOp::AddEncoding { channel, encoding } => {
            if out.encodings.contains_key(channel) {
                return Err(inapplicable(op, "channel is already encoded"));
            }
            out.encodings.insert(*channel, encoding.clone());
        }
        EditOp::RemoveEncoding { channel, encoding } => {
            if out.encodings.get(channel) != Some(encoding) {
                return Err(inapplicable(op, "encoding differs"));
            }
            out.encodings.remove(channel);
        }
        EditOp::ModifyEncoding { channel, from, to } => {
            let enc = out.encodings.get_mut(channel).ok_or_else(|| inapplicable(op, "channel is not encoded"))?;
            if FieldRef::of(enc) != *from {
                return Err(inapplicable(op, "field or type differs"));
            }
            enc.field = to.field.clone();
            enc.data_type = to.data_type;
        }
        EditOp::ModifyScale { channel, from, to } => {
            let enc = out.encodings.get_mut(channel).ok_or_else(|| inapplicable(op, "channel is not encoded"))?;
            if enc.scale != *from {
                return Err(inapplicable(op, "scale differs"));
            }
            enc.scale = to.clone();
        }
        EditOp::AddFilter(p) => {
            if out.filters().any(|q| q.field == p.field && q.op == p.op) {
                return Err(inapplicable(op, "filter already present"));
            }
            let at = first_index(out, |t| !matches!(t, Transform::Filter(_)));
            out.transforms.insert(at, Transform::Filter(p.clone()));
        }
        EditOp::RemoveFilter(p) | EditOp::ModifyFilter { from: p, .. } => {
            let at = out
                .transforms
                .iter()
                .position(|t| matches!(t, Transform::Filter(q) if q == p))
                .ok_or_else(|| inapplicable(op, "filter not found"))?;
            match op {
                EditOp::ModifyFilter { to, .. } => out.transforms[at] = Transform::Filter(to.clone()),
                _ => {
                    out.transforms.remove(at);
                }
            }
        }
        EditOp::AddAggregate(d) => {
            for (channel, agg) in &d.channels {
                let enc = out.encodings.get_mut(channel).ok_or_else(|| inapplicable(op, "channel is not encoded"))?;
                if enc.aggregate.is_some() {
                    return Err(inapplicable(op, format!("{channel} is already aggregated")));
                }
                enc.aggregate = Some(*agg);
            }
            for (channel, enc) in &d.counts {
                if out.encodings.contains_key(channel) {
                    return Err(inapplicable(op, format!("{channel} is already encoded")));
                }
                out.encodings.insert(*channel, enc.clone());
            }
            if let Some(t) = &d.transform {
                if out.aggregate_transform().is_some() {
                    return Err(inapplicable(op, "an aggregate transform is already present"));
                }
                out.transforms.push(Transform::Aggregate(t.clone()));
            }
        }
        EditOp::RemoveAggregate(d) => {
            for (channel, agg) in &d.channels {
                let enc = out.encodings.get_mut(channel).ok_or_else(|| inapplicable(op, "channel is not encoded"))?;
                if enc.aggregate != Some(*agg) {
                    return Err(inapplicable(op, format!("{channel} aggregate differs")));
                }
                enc.aggregate = None;
            }
            for (channel, enc) in &d.counts {
                if out.encodings.get(channel) != Some(enc) {
                    return Err(inapplicable(op, format!("{channel} encoding differs")));
                }
                out.encodings.remove(channel);
            }
            if let Some(t) = &d.transform {
                let at = out
                    .transforms
                    .iter()
                    .position(|x| matches!(x, Transform::Aggregate(a) if a == t))
                    .ok_or_else(|| inapplicable(op, "aggregate transform not found"))?;
                out.transforms.remove(at);
            }
        }
        EditOp::AddBin(d) => {
            for (channel, maxbins) in &d.channels {
                let enc = out.encodings.get_mut(channel).ok_or_else(|| inapplicable(op, "channel is not encoded"))?;
                if enc.bin.is_some() {
                    return Err(inapplicable(op, format!("{channel} is already binned")));
                }
                enc.bin = Some(*maxbins);
            }
            for b in &d.transforms {
                if out.transforms.iter().any(|t| matches!(t, Transform::Bin(x) if x.field == b.field)) {
                    return Err(inapplicable(op, format!("`{}` is already binned", b.field)));
                }
                let at = first_index(out, |t| matches!(t, Transform::Aggregate(_)));
                out.transforms.insert(at, Transform::Bin(b.clone()));
            }
        }
        EditOp::RemoveBin(d) => {
            for (channel, maxbins) in &d.channels {
                let enc = out.encodings.get_mut(channel).ok_or_else(|| inapplicable(op, "channel is not encoded"))?;
                if enc.bin != Some(*maxbins) {
                    return Err(inapplicable(op, format!("{channel} binning differs")));
                }
                enc.bin = None;
            }
            for b in &d.transforms {
                let at = out
                    .transforms
                    .iter()
                    .position(|t| matches!(t, Transform::Bin(x) if x == b))
                    .ok_or_else(|| inapplicable(op, "bin transform not found"))?;
                out.transforms.remove(at);
            }
        }
    }
    Ok(())
}
