use super::{Channel, ChartSpec, DataType, Encoding, ScaleType, Transform};

/// Scale type used when an encoding does not name one.
pub fn default_scale_type(channel: Channel, enc: &Encoding) -> ScaleType {
    if enc.bin.is_some() {
        return ScaleType::Linear;
    }
    match enc.data_type {
        DataType::Quantitative => ScaleType::Linear,
        DataType::Temporal => ScaleType::Time,
        DataType::Nominal | DataType::Ordinal if channel.is_position() => ScaleType::Band,
        DataType::Nominal | DataType::Ordinal => ScaleType::Ordinal,
    }
}

fn transform_key(t: &Transform) -> (u8, String, &'static str) {
    match t {
        Transform::Filter(p) => (0, p.field.clone(), p.op.key()),
        Transform::Bin(b) => (1, b.field.clone(), ""),
        Transform::Aggregate(a) => (2, a.groupby.join(","), ""),
    }
}

/// Normal form: scale types filled in, transforms in a fixed order, and
/// aggregate fields and groupby lists sorted. Layer order is preserved.
///
/// Validation guarantees that filters only touch raw or grouping fields and
/// that bins precede the aggregate, so the reordering keeps the meaning.
pub fn canonicalize(spec: &ChartSpec) -> ChartSpec {
    let mut out = spec.clone();
    for (channel, enc) in out.encodings.iter_mut() {
        if enc.scale.scale_type.is_none() {
            enc.scale.scale_type = Some(default_scale_type(*channel, enc));
        }
    }
    canonical_transforms(&mut out.transforms);
    for layer in &mut out.layers {
        canonical_transforms(&mut layer.transforms);
    }
    out
}

pub(crate) fn canonical_transforms(transforms: &mut [Transform]) {
    for t in transforms.iter_mut() {
        if let Transform::Aggregate(a) = t {
            a.fields.sort_by(|x, y| x.alias.cmp(&y.alias));
            a.groupby.sort();
        }
    }
    transforms.sort_by_cached_key(transform_key);
}

/// Structural equality of canonical forms.
pub fn specs_equal(a: &ChartSpec, b: &ChartSpec) -> bool {
    canonicalize(a) == canonicalize(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_chart_spec;

    const DATA: &str = r#"{"values": [{"a": 1, "g": "x"}, {"a": 5, "g": "y"}]}"#;

    #[test]
    fn explicit_default_scale_is_equal() {
        let a = parse_chart_spec(&format!(
            r#"{{"mark": "point", "data": {DATA}, "encoding": {{"x": {{"field": "a", "type": "quantitative"}}}}}}"#
        ))
        .unwrap();
        let b = parse_chart_spec(&format!(
            r#"{{"mark": "point", "data": {DATA}, "encoding": {{"x": {{"field": "a", "type": "quantitative", "scale": {{"type": "linear"}}}}}}}}"#
        ))
        .unwrap();
        assert_ne!(a, b);
        assert!(specs_equal(&a, &b));
    }

    #[test]
    fn filter_order_is_irrelevant() {
        let make = |f1: &str, f2: &str| {
            parse_chart_spec(&format!(
                r#"{{"mark": "point", "data": {DATA}, "transform": [{{"filter": {f1}}}, {{"filter": {f2}}}],
                    "encoding": {{"x": {{"field": "a", "type": "quantitative"}}}}}}"#
            ))
            .unwrap()
        };
        let gt = r#"{"field": "a", "gt": 0}"#;
        let eq = r#"{"field": "g", "equal": "x"}"#;
        assert!(specs_equal(&make(gt, eq), &make(eq, gt)));
    }

    #[test]
    fn defaults_by_type_and_channel() {
        let nominal = Encoding::new("g", DataType::Nominal);
        assert_eq!(default_scale_type(Channel::X, &nominal), ScaleType::Band);
        assert_eq!(default_scale_type(Channel::Color, &nominal), ScaleType::Ordinal);
        assert_eq!(default_scale_type(Channel::Y, &Encoding::new("t", DataType::Temporal)), ScaleType::Time);
        let mut binned = Encoding::new("a", DataType::Quantitative);
        binned.bin = Some(10);
        assert_eq!(default_scale_type(Channel::X, &binned), ScaleType::Linear);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let spec = parse_chart_spec(&format!(
            r#"{{"mark": "bar", "data": {DATA}, "encoding": {{"x": {{"field": "g", "type": "nominal"}}, "y": {{"field": "a", "type": "quantitative", "aggregate": "sum"}}}}}}"#
        ))
        .unwrap();
        let once = canonicalize(&spec);
        assert_eq!(canonicalize(&once), once);
    }
}
