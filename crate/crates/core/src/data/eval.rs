use std::collections::HashMap;

use super::{nice_bins, DataError, Dataset, Row, Value};
use crate::spec::{
    AggregateOp, AggregateTransform, BinTransform, DataType, FieldPredicate, Operand, PredicateOp,
    Transform,
};

/// Run a transform pipeline in order.
///
/// An aggregate over zero rows yields zero rows; it is not an error.
pub fn evaluate(dataset: &Dataset, transforms: &[Transform]) -> Result<Dataset, DataError> {
    let mut current = dataset.clone();
    for t in transforms {
        current = match t {
            Transform::Filter(p) => filter(&current, p)?,
            Transform::Bin(b) => bin(&current, b)?,
            Transform::Aggregate(a) => aggregate(&current, a)?,
        };
    }
    Ok(current)
}

fn filter(ds: &Dataset, p: &FieldPredicate) -> Result<Dataset, DataError> {
    let kind = ds
        .field_type(&p.field)
        .ok_or_else(|| DataError::UnknownField(p.field.clone()))?;
    let operand = coerce_operand(&p.field, kind, p.op, &p.operand)?;
    let rows = ds
        .rows
        .iter()
        .filter(|row| test(ds.value(row, &p.field), p.op, &operand))
        .cloned()
        .collect();
    Ok(Dataset::new(ds.name.clone(), ds.schema.clone(), rows))
}

/// Check a predicate against a single row of `ds`.
pub fn matches_predicate(ds: &Dataset, row: &Row, p: &FieldPredicate) -> Result<bool, DataError> {
    let kind = ds
        .field_type(&p.field)
        .ok_or_else(|| DataError::UnknownField(p.field.clone()))?;
    let operand = coerce_operand(&p.field, kind, p.op, &p.operand)?;
    Ok(test(ds.value(row, &p.field), p.op, &operand))
}

/// Bring operands into the field's value space: numbers for quantitative
/// fields, epoch milliseconds for temporal fields.
fn coerce_operand(field: &str, kind: DataType, op: PredicateOp, operand: &Operand) -> Result<Operand, DataError> {
    let mismatch = |message: &str| DataError::TypeMismatch {
        field: field.to_string(),
        message: message.to_string(),
    };
    let coerce = |v: &Value| -> Result<Value, DataError> {
        match kind {
            DataType::Quantitative => match v {
                Value::Number(_) => Ok(v.clone()),
                _ => Err(mismatch("expected a numeric operand")),
            },
            DataType::Temporal => v
                .as_time_ms()
                .map(Value::Number)
                .ok_or_else(|| mismatch("expected a date or epoch-millisecond operand")),
            DataType::Nominal | DataType::Ordinal => match v {
                Value::Text(_) | Value::Bool(_) => Ok(v.clone()),
                _ => Err(mismatch("expected a text operand")),
            },
        }
    };
    if op.is_ordered() && !kind.is_continuous() {
        return Err(mismatch("ordered comparisons need a quantitative or temporal field"));
    }
    Ok(match operand {
        Operand::Scalar(v) => Operand::Scalar(coerce(v)?),
        Operand::Range(lo, hi) => Operand::Range(coerce(lo)?, coerce(hi)?),
        Operand::Set(items) => Operand::Set(items.iter().map(coerce).collect::<Result<_, _>>()?),
    })
}

fn test(v: &Value, op: PredicateOp, operand: &Operand) -> bool {
    if v.is_null() {
        return false;
    }
    match (op, operand) {
        (PredicateOp::Eq, Operand::Scalar(x)) => v == x,
        (PredicateOp::Neq, Operand::Scalar(x)) => v != x,
        (PredicateOp::Lt, Operand::Scalar(x)) => v < x,
        (PredicateOp::Lte, Operand::Scalar(x)) => v <= x,
        (PredicateOp::Gt, Operand::Scalar(x)) => v > x,
        (PredicateOp::Gte, Operand::Scalar(x)) => v >= x,
        (PredicateOp::Range, Operand::Range(lo, hi)) => lo <= v && v <= hi,
        (PredicateOp::OneOf, Operand::Set(items)) => items.contains(v),
        _ => false,
    }
}

fn bin(ds: &Dataset, b: &BinTransform) -> Result<Dataset, DataError> {
    let kind = ds
        .field_type(&b.field)
        .ok_or_else(|| DataError::UnknownField(b.field.clone()))?;
    if !kind.is_continuous() {
        return Err(DataError::TypeMismatch {
            field: b.field.clone(),
            message: "only numeric or temporal fields can be binned".into(),
        });
    }
    let mut schema = ds.schema.clone();
    schema.insert(b.start_as.clone(), kind);
    schema.insert(b.end_as.clone(), kind);
    let rows = add_bin_fields(ds, &b.field, b.maxbins, &b.start_as, &b.end_as);
    Ok(Dataset::new(ds.name.clone(), schema, rows))
}

pub(super) fn add_bin_fields(ds: &Dataset, field: &str, maxbins: u32, start_as: &str, end_as: &str) -> Vec<Row> {
    let values: Vec<f64> = ds.rows.iter().filter_map(|r| ds.value(r, field).as_f64()).collect();
    let layout = values.iter().copied().reduce(f64::min).zip(values.iter().copied().reduce(f64::max))
        .map(|(min, max)| nice_bins(min, max, maxbins));
    ds.rows
        .iter()
        .map(|row| {
            let mut out = row.clone();
            let (s, e) = match (ds.value(row, field).as_f64(), layout) {
                (Some(v), Some(layout)) => {
                    let i = layout.index(v);
                    (Value::Number(layout.bin_start(i)), Value::Number(layout.bin_end(i)))
                }
                _ => (Value::Null, Value::Null),
            };
            out.insert(start_as.to_string(), s);
            out.insert(end_as.to_string(), e);
            out
        })
        .collect()
}

fn aggregate(ds: &Dataset, a: &AggregateTransform) -> Result<Dataset, DataError> {
    for g in &a.groupby {
        if ds.field_type(g).is_none() {
            return Err(DataError::UnknownField(g.clone()));
        }
    }
    let mut schema = std::collections::BTreeMap::new();
    for g in &a.groupby {
        schema.insert(g.clone(), ds.schema[g]);
    }
    let mut measures = Vec::new();
    for f in &a.fields {
        let kind = match &f.field {
            Some(name) => {
                let kind = ds.field_type(name).ok_or_else(|| DataError::UnknownField(name.clone()))?;
                check_aggregable(name, kind, f.op)?;
                kind
            }
            None => DataType::Quantitative,
        };
        let out_kind = match f.op {
            AggregateOp::Min | AggregateOp::Max => kind,
            _ => DataType::Quantitative,
        };
        schema.insert(f.alias.clone(), out_kind);
        measures.push((f.op, f.field.clone(), f.alias.clone()));
    }
    let rows = group_rows(ds, &a.groupby, &measures);
    Ok(Dataset::new(ds.name.clone(), schema, rows))
}

pub(super) fn check_aggregable(field: &str, kind: DataType, op: AggregateOp) -> Result<(), DataError> {
    let ok = match op {
        AggregateOp::Count => true,
        AggregateOp::Min | AggregateOp::Max => kind.is_continuous(),
        _ => kind == DataType::Quantitative,
    };
    if ok {
        Ok(())
    } else {
        Err(DataError::TypeMismatch {
            field: field.to_string(),
            message: format!("cannot take the {} of a {} field", op.name(), kind.name()),
        })
    }
}

/// Group rows by `groupby` (groups in first-appearance order) and compute
/// each `(op, field, alias)` measure per group.
pub(super) fn group_rows(ds: &Dataset, groupby: &[String], measures: &[(AggregateOp, Option<String>, String)]) -> Vec<Row> {
    let mut order: Vec<Vec<Value>> = Vec::new();
    let mut groups: HashMap<Vec<Value>, Vec<&Row>> = HashMap::new();
    for row in &ds.rows {
        let key: Vec<Value> = groupby.iter().map(|g| ds.value(row, g).clone()).collect();
        groups
            .entry(key.clone())
            .or_insert_with(|| {
                order.push(key);
                Vec::new()
            })
            .push(row);
    }
    order
        .into_iter()
        .map(|key| {
            let members = &groups[&key];
            let mut out: Row = groupby.iter().cloned().zip(key).collect();
            for (op, field, alias) in measures {
                let value = match (op, field) {
                    (AggregateOp::Count, _) => Value::Number(members.len() as f64),
                    (_, Some(f)) => {
                        let values: Vec<f64> = members.iter().filter_map(|r| ds.value(r, f).as_f64()).collect();
                        aggregate_values(*op, &values).map(Value::Number).unwrap_or(Value::Null)
                    }
                    (_, None) => Value::Null,
                };
                out.insert(alias.clone(), value);
            }
            out
        })
        .collect()
}

/// Reduce a group's non-null values. `None` when there is nothing to reduce.
/// The median of an even-sized group is the mean of the two central values.
pub fn aggregate_values(op: AggregateOp, values: &[f64]) -> Option<f64> {
    if op == AggregateOp::Count {
        return Some(values.len() as f64);
    }
    if values.is_empty() {
        return None;
    }
    Some(match op {
        AggregateOp::Mean => values.iter().sum::<f64>() / values.len() as f64,
        AggregateOp::Sum => values.iter().sum(),
        AggregateOp::Min => values.iter().copied().fold(f64::INFINITY, f64::min),
        AggregateOp::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        AggregateOp::Median => {
            let mut sorted = values.to_vec();
            sorted.sort_by(f64::total_cmp);
            let mid = sorted.len() / 2;
            if sorted.len().is_multiple_of(2) {
                (sorted[mid - 1] + sorted[mid]) / 2.0
            } else {
                sorted[mid]
            }
        }
        AggregateOp::Count => unreachable!(),
    })
}
