use std::collections::{BTreeMap, HashMap, HashSet};

use super::{
    AggregateOp, AnnotationLayer, Channel, ChartSpec, DataType, Encoding, ScaleType, SpecError, Transform,
};
use crate::data::{
    evaluate, layer_dataset, mark_dataset, resolved_domains, DataError, Dataset, Domain, Value,
};

fn data_error(path: &str, e: DataError) -> SpecError {
    SpecError::invalid(path, e.to_string())
}

/// Check every structural and data-dependent invariant of a chart.
///
/// Besides the type invariants this rejects charts that cannot be drawn:
/// `bar`, `line` and `area` marks over raw rows that share a position.
pub fn validate(spec: &ChartSpec) -> Result<(), SpecError> {
    let base = Dataset::from_inline(&spec.data).map_err(|e| data_error("data.values", e))?;
    let transformed = check_transforms(&base, &spec.transforms, "transform")?;
    check_encodings(&spec.encodings, &transformed, "encoding")?;
    let rows = mark_dataset(spec).map_err(|e| data_error("encoding", e))?;
    check_scales(spec)?;
    check_mark_support(spec, &rows)?;
    let mut names = HashSet::new();
    for (i, layer) in spec.layers.iter().enumerate() {
        let path = format!("layer[{i}]");
        if layer.name.is_empty() || !names.insert(layer.name.as_str()) {
            return Err(SpecError::invalid(format!("{path}.name"), "layer names must be nonempty and unique"));
        }
        check_layer(spec, layer, &base, &path)?;
    }
    Ok(())
}

/// Validate the transform list and return the dataset it produces.
fn check_transforms(base: &Dataset, transforms: &[Transform], path: &str) -> Result<Dataset, SpecError> {
    let mut current = base.clone();
    let mut filters = HashSet::new();
    let mut binned = HashSet::new();
    let mut groupby: Option<&[String]> = None;
    for (i, t) in transforms.iter().enumerate() {
        let here = format!("{path}[{i}]");
        match t {
            Transform::Filter(p) => {
                let fpath = format!("{here}.filter.field");
                if !filters.insert((p.field.as_str(), p.op)) {
                    return Err(SpecError::invalid(
                        format!("{here}.filter"),
                        format!("duplicate `{}` filter on `{}`", p.op.key(), p.field),
                    ));
                }
                if base.field_type(&p.field).is_none() {
                    if current.field_type(&p.field).is_some() {
                        return Err(SpecError::unsupported(fpath, "filters on derived fields are not supported"));
                    }
                    return Err(SpecError::invalid(fpath, format!("unknown field `{}`", p.field)));
                }
                if let Some(g) = groupby {
                    if !g.contains(&p.field) {
                        return Err(SpecError::unsupported(fpath, "filters over aggregated-away fields are not supported"));
                    }
                }
            }
            Transform::Bin(b) => {
                if base.field_type(&b.field).is_none() {
                    return Err(SpecError::invalid(format!("{here}.field"), format!("unknown field `{}`", b.field)));
                }
                if !binned.insert(b.field.as_str()) {
                    return Err(SpecError::invalid(here, format!("`{}` is binned more than once", b.field)));
                }
                if groupby.is_some() {
                    return Err(SpecError::unsupported(here, "binning aggregated data is not supported"));
                }
                for name in [&b.start_as, &b.end_as] {
                    if current.field_type(name).is_some() {
                        return Err(SpecError::invalid(format!("{here}.as"), format!("field `{name}` already exists")));
                    }
                }
            }
            Transform::Aggregate(a) => {
                if groupby.is_some() {
                    return Err(SpecError::invalid(here, "at most one aggregate transform is allowed"));
                }
                for g in &a.groupby {
                    if current.field_type(g).is_none() {
                        return Err(SpecError::invalid(format!("{here}.groupby"), format!("unknown field `{g}`")));
                    }
                }
                let mut aliases = HashSet::new();
                for (j, f) in a.fields.iter().enumerate() {
                    if let Some(name) = &f.field {
                        if current.field_type(name).is_none() {
                            return Err(SpecError::invalid(
                                format!("{here}.aggregate[{j}].field"),
                                format!("unknown field `{name}`"),
                            ));
                        }
                    }
                    if !aliases.insert(f.alias.as_str()) || a.groupby.contains(&f.alias) {
                        return Err(SpecError::invalid(
                            format!("{here}.aggregate[{j}].as"),
                            format!("output field `{}` is produced twice", f.alias),
                        ));
                    }
                }
                groupby = Some(&a.groupby);
            }
        }
        current = evaluate(&current, std::slice::from_ref(t)).map_err(|e| data_error(&here, e))?;
    }
    Ok(current)
}

fn check_encodings(encodings: &BTreeMap<Channel, Encoding>, ds: &Dataset, path: &str) -> Result<(), SpecError> {
    let mut bins: HashMap<&str, u32> = HashMap::new();
    for (channel, enc) in encodings {
        let here = format!("{path}.{channel}");
        let kind = match &enc.field {
            Some(f) => match ds.field_type(f) {
                Some(kind) => Some(kind),
                None if enc.aggregate == Some(AggregateOp::Count) => None,
                None => return Err(SpecError::invalid(format!("{here}.field"), format!("unknown field `{f}`"))),
            },
            None => None,
        };
        if enc.aggregate.is_some() && enc.bin.is_some() {
            return Err(SpecError::invalid(here, "aggregate and bin are mutually exclusive"));
        }
        if let Some(kind) = kind {
            let compatible = match enc.data_type {
                DataType::Quantitative => kind == DataType::Quantitative,
                DataType::Temporal => kind.is_continuous(),
                DataType::Nominal | DataType::Ordinal => true,
            };
            if !compatible && enc.aggregate != Some(AggregateOp::Count) {
                return Err(SpecError::invalid(
                    format!("{here}.type"),
                    format!("a {} field cannot be encoded as {}", kind.name(), enc.data_type.name()),
                ));
            }
        }
        if let Some(op) = enc.aggregate {
            let ok = match op {
                AggregateOp::Count => enc.data_type == DataType::Quantitative,
                AggregateOp::Min | AggregateOp::Max => {
                    enc.data_type.is_continuous() && kind.is_some_and(DataType::is_continuous)
                }
                _ => enc.data_type == DataType::Quantitative && kind == Some(DataType::Quantitative),
            };
            if !ok {
                return Err(SpecError::invalid(
                    format!("{here}.aggregate"),
                    format!("`{}` needs a quantitative field and encoding", op.name()),
                ));
            }
        }
        if let Some(maxbins) = enc.bin {
            if enc.data_type != DataType::Quantitative {
                return Err(SpecError::invalid(format!("{here}.bin"), "only quantitative encodings can be binned"));
            }
            let field = enc.field.as_deref().unwrap_or_default();
            if bins.insert(field, maxbins).is_some_and(|m| m != maxbins) {
                return Err(SpecError::invalid(format!("{here}.bin"), format!("`{field}` is binned twice")));
            }
        }
        let scale_type = enc.effective_scale_type(*channel);
        let scale_ok = match enc.data_type {
            DataType::Quantitative if enc.bin.is_some() => scale_type == ScaleType::Linear,
            DataType::Quantitative => matches!(scale_type, ScaleType::Linear | ScaleType::Log),
            DataType::Temporal => matches!(scale_type, ScaleType::Time | ScaleType::Linear),
            DataType::Nominal | DataType::Ordinal => scale_type.is_discrete(),
        };
        if !scale_ok {
            return Err(SpecError::invalid(
                format!("{here}.scale.type"),
                format!("a `{}` scale does not fit {} data", scale_type.name(), enc.data_type.name()),
            ));
        }
        match &enc.scale.domain {
            Some(Domain::Continuous { min, max }) if !(min.is_finite() && max.is_finite() && min < max) => {
                return Err(SpecError::invalid(format!("{here}.scale.domain"), "a continuous domain needs min < max"));
            }
            Some(Domain::Discrete(values)) => {
                let distinct: HashSet<&Value> = values.iter().collect();
                if values.is_empty() || distinct.len() != values.len() {
                    return Err(SpecError::invalid(
                        format!("{here}.scale.domain"),
                        "a discrete domain must be nonempty and duplicate-free",
                    ));
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn check_scales(spec: &ChartSpec) -> Result<(), SpecError> {
    let has_log = spec
        .encodings
        .iter()
        .any(|(c, e)| e.effective_scale_type(*c) == ScaleType::Log);
    if !has_log {
        return Ok(());
    }
    let domains = match resolved_domains(spec) {
        Ok(d) => d,
        Err(DataError::EmptyDomain(_)) => return Ok(()),
        Err(e) => return Err(data_error("encoding", e)),
    };
    for (channel, enc) in &spec.encodings {
        if enc.effective_scale_type(*channel) != ScaleType::Log {
            continue;
        }
        if let Some(Domain::Continuous { min, .. }) = domains.get(channel) {
            if *min <= 0.0 {
                return Err(SpecError::invalid(
                    format!("encoding.{channel}.scale"),
                    "log scales need a strictly positive domain",
                ));
            }
        }
    }
    Ok(())
}

/// Channels whose values identify a position: discrete, temporal or binned.
pub(crate) fn dimension_fields(encodings: &BTreeMap<Channel, Encoding>) -> Vec<String> {
    encodings
        .values()
        .filter(|e| e.bin.is_some() || e.data_type != DataType::Quantitative)
        .map(Encoding::value_field)
        .collect()
}

fn check_mark_support(spec: &ChartSpec, rows: &Dataset) -> Result<(), SpecError> {
    if !spec.mark.needs_grouped_data() || spec.is_aggregated() {
        return Ok(());
    }
    let dims = dimension_fields(&spec.encodings);
    let mut seen = HashSet::new();
    for row in &rows.rows {
        let key: Vec<&Value> = dims.iter().map(|d| rows.value(row, d)).collect();
        if !seen.insert(key) {
            return Err(SpecError::invalid(
                "mark",
                format!(
                    "`{}` marks cannot show raw per-point data; several rows share one position",
                    spec.mark
                ),
            ));
        }
    }
    Ok(())
}

fn check_layer(spec: &ChartSpec, layer: &AnnotationLayer, base: &Dataset, path: &str) -> Result<(), SpecError> {
    let transformed = check_transforms(base, &layer.transforms, &format!("{path}.transform"))?;
    for (channel, enc) in &layer.encodings {
        let Some(base_enc) = spec.encoding(*channel) else {
            return Err(SpecError::invalid(
                format!("{path}.encoding.{channel}"),
                "channel is absent from the base chart's encodings",
            ));
        };
        let base_continuous = base_enc.data_type.is_continuous();
        if enc.data_type.is_continuous() != base_continuous {
            return Err(SpecError::invalid(
                format!("{path}.encoding.{channel}.type"),
                "layer values must fit the base chart's scale",
            ));
        }
    }
    check_encodings(&layer.encodings, &transformed, &format!("{path}.encoding"))?;
    layer_dataset(spec, layer).map_err(|e| data_error(&format!("{path}.encoding"), e))?;
    Ok(())
}
