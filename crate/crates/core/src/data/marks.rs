use std::collections::BTreeMap;

use super::eval::{add_bin_fields, check_aggregable, group_rows};
use super::{evaluate, DataError, Dataset};
use crate::spec::{bin_end_field, bin_start_field, AggregateOp, AnnotationLayer, Channel, ChartSpec, DataType, Encoding};

/// Rows behind the base marks: the transform pipeline followed by the
/// encoding-level bin and aggregate steps. One row per mark.
pub fn mark_dataset(spec: &ChartSpec) -> Result<Dataset, DataError> {
    let base = Dataset::from_inline(&spec.data)?;
    let transformed = evaluate(&base, &spec.transforms)?;
    encoding_stage(transformed, &spec.encodings)
}

/// Rows behind one annotation layer. Layers start from the raw inline data.
pub fn layer_dataset(spec: &ChartSpec, layer: &AnnotationLayer) -> Result<Dataset, DataError> {
    let base = Dataset::from_inline(&spec.data)?;
    let transformed = evaluate(&base, &layer.transforms)?;
    encoding_stage(transformed, &layer.encodings)
}

fn encoding_stage(mut ds: Dataset, encodings: &BTreeMap<Channel, Encoding>) -> Result<Dataset, DataError> {
    for enc in encodings.values() {
        let Some(field) = &enc.field else { continue };
        let kind = ds.field_type(field).ok_or_else(|| DataError::UnknownField(field.clone()))?;
        let Some(maxbins) = enc.bin else { continue };
        if !kind.is_continuous() {
            return Err(DataError::TypeMismatch {
                field: field.clone(),
                message: "only numeric or temporal fields can be binned".into(),
            });
        }
        let (start, end) = (bin_start_field(field), bin_end_field(field));
        if ds.schema.contains_key(&start) {
            continue;
        }
        ds.rows = add_bin_fields(&ds, field, maxbins, &start, &end);
        ds.schema.insert(start, kind);
        ds.schema.insert(end, kind);
    }
    if !encodings.values().any(|e| e.aggregate.is_some()) {
        return Ok(ds);
    }
    let mut groupby: Vec<String> = Vec::new();
    let mut measures = Vec::new();
    let mut schema = BTreeMap::new();
    for enc in encodings.values() {
        match (enc.aggregate, &enc.field) {
            (None, Some(field)) => {
                let names = if enc.bin.is_some() {
                    vec![bin_start_field(field), bin_end_field(field)]
                } else {
                    vec![field.clone()]
                };
                for name in names {
                    if !groupby.contains(&name) {
                        schema.insert(name.clone(), ds.schema[&name]);
                        groupby.push(name);
                    }
                }
            }
            (None, None) => {}
            (Some(op), field) => {
                let kind = match (op, field) {
                    (AggregateOp::Count, _) => DataType::Quantitative,
                    (_, Some(f)) => {
                        let kind = ds.field_type(f).ok_or_else(|| DataError::UnknownField(f.clone()))?;
                        check_aggregable(f, kind, op)?;
                        match op {
                            AggregateOp::Min | AggregateOp::Max => kind,
                            _ => DataType::Quantitative,
                        }
                    }
                    (_, None) => DataType::Quantitative,
                };
                let alias = enc.value_field();
                schema.insert(alias.clone(), kind);
                measures.push((op, field.clone(), alias));
            }
        }
    }
    let rows = group_rows(&ds, &groupby, &measures);
    Ok(Dataset::new(ds.name.clone(), schema, rows))
}
