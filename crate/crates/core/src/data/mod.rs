//! Inline datasets, the transform evaluator, and scale-domain computation.

mod bin;
mod domain;
mod eval;
mod marks;
mod value;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::spec::{DataType, InlineData};

pub use bin::{nice_bins, BinLayout};
pub use domain::{compute_domain, length_channel, resolved_domains, union_domains, Domain};
pub use eval::{aggregate_values, evaluate, matches_predicate};
pub use marks::{layer_dataset, mark_dataset};
pub use value::{number_json, parse_date_ms, Row, Value};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum DataError {
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("type mismatch on field `{field}`: {message}")]
    TypeMismatch { field: String, message: String },
    #[error("field `{0}` mixes numbers and text")]
    MixedTypes(String),
    #[error("channel `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("cannot union a continuous domain with a discrete one")]
    KindMismatch,
}

/// A typed dataset. Temporal fields hold epoch milliseconds.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub name: String,
    pub schema: BTreeMap<String, DataType>,
    pub rows: Vec<Row>,
}

impl Dataset {
    /// Infer a schema from inline rows: all-number fields are quantitative,
    /// all-date-string fields temporal, anything else nominal.
    pub fn from_inline(data: &InlineData) -> Result<Dataset, DataError> {
        let mut kinds: BTreeMap<String, (bool, bool, bool)> = BTreeMap::new();
        for row in &data.values {
            for (field, value) in row {
                let entry = kinds.entry(field.clone()).or_insert((false, false, true));
                match value {
                    Value::Null => {}
                    Value::Number(_) => entry.0 = true,
                    Value::Text(s) => {
                        entry.1 = true;
                        if parse_date_ms(s).is_none() {
                            entry.2 = false;
                        }
                    }
                    Value::Bool(_) => {
                        entry.1 = true;
                        entry.2 = false;
                    }
                }
            }
        }
        let mut schema = BTreeMap::new();
        for (field, (numbers, texts, all_dates)) in kinds {
            let kind = match (numbers, texts) {
                (true, true) => return Err(DataError::MixedTypes(field)),
                (true, false) => DataType::Quantitative,
                (false, true) if all_dates => DataType::Temporal,
                (false, true) => DataType::Nominal,
                // only nulls
                (false, false) => DataType::Nominal,
            };
            schema.insert(field, kind);
        }
        let rows = data
            .values
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(field, value)| {
                        let v = match (schema.get(field), value) {
                            (Some(DataType::Temporal), Value::Text(s)) => {
                                Value::Number(parse_date_ms(s).unwrap_or(f64::NAN))
                            }
                            _ => value.clone(),
                        };
                        (field.clone(), v)
                    })
                    .collect()
            })
            .collect();
        Ok(Dataset {
            name: data.name.clone(),
            schema,
            rows,
        })
    }

    pub fn new(name: impl Into<String>, schema: BTreeMap<String, DataType>, rows: Vec<Row>) -> Self {
        Dataset {
            name: name.into(),
            schema,
            rows,
        }
    }

    pub fn field_type(&self, field: &str) -> Option<DataType> {
        self.schema.get(field).copied()
    }

    pub fn value<'a>(&self, row: &'a Row, field: &str) -> &'a Value {
        static NULL: Value = Value::Null;
        row.get(field).unwrap_or(&NULL)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
