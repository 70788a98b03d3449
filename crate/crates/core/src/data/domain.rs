use std::collections::{BTreeMap, HashSet};

use super::{mark_dataset, DataError, Dataset, Value};
use crate::spec::{bin_end_field, Channel, ChartSpec, Encoding};

/// Data values mapped onto a channel's scale.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Continuous { min: f64, max: f64 },
    /// Ordered, duplicate-free.
    Discrete(Vec<Value>),
}

impl Domain {
    pub fn continuous(min: f64, max: f64) -> Self {
        Domain::Continuous { min, max }
    }

    pub fn discrete<I: IntoIterator<Item = V>, V: Into<Value>>(values: I) -> Self {
        Domain::Discrete(values.into_iter().map(Into::into).collect())
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self, Domain::Continuous { .. })
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(&self, other: &Domain) -> bool {
        match (self, other) {
            (Domain::Continuous { min: a, max: b }, Domain::Continuous { min: c, max: d }) => c <= a && b <= d,
            (Domain::Discrete(a), Domain::Discrete(b)) => a.iter().all(|v| b.contains(v)),
            _ => false,
        }
    }
}

impl serde::Serialize for Domain {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        crate::spec::domain_json(self).serialize(serializer)
    }
}

/// Hull of two continuous domains, or `a`'s values followed by the values
/// only `b` has.
pub fn union_domains(a: &Domain, b: &Domain) -> Result<Domain, DataError> {
    match (a, b) {
        (Domain::Continuous { min: a0, max: a1 }, Domain::Continuous { min: b0, max: b1 }) => {
            Ok(Domain::Continuous {
                min: a0.min(*b0),
                max: a1.max(*b1),
            })
        }
        (Domain::Discrete(a), Domain::Discrete(b)) => {
            let mut out = a.clone();
            for v in b {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Ok(Domain::Discrete(out))
        }
        _ => Err(DataError::KindMismatch),
    }
}

/// The bar/area channel encoding length from a zero baseline, if any.
pub fn length_channel(spec: &ChartSpec) -> Option<Channel> {
    if !spec.mark.needs_grouped_data() {
        return None;
    }
    let is_length = |c: Channel| {
        spec.encoding(c).is_some_and(|e| {
            e.data_type == crate::spec::DataType::Quantitative && e.bin.is_none()
        })
    };
    match (is_length(Channel::X), is_length(Channel::Y)) {
        (_, true) => Some(Channel::Y),
        (true, false) => Some(Channel::X),
        _ => None,
    }
}

/// Scale domain of `channel`: the explicit scale domain when present,
/// otherwise computed from the chart's evaluated mark rows.
pub fn compute_domain(spec: &ChartSpec, channel: Channel) -> Result<Domain, DataError> {
    let encoding = spec
        .encoding(channel)
        .ok_or_else(|| DataError::UnknownField(format!("<no {channel} encoding>")))?;
    if let Some(d) = &encoding.scale.domain {
        return Ok(d.clone());
    }
    let ds = mark_dataset(spec)?;
    domain_from_rows(spec, channel, encoding, &ds)
}

/// Domains of every encoded channel, evaluating the data once.
pub fn resolved_domains(spec: &ChartSpec) -> Result<BTreeMap<Channel, Domain>, DataError> {
    let mut out = BTreeMap::new();
    let mut rows: Option<Dataset> = None;
    for (&channel, encoding) in &spec.encodings {
        let domain = match &encoding.scale.domain {
            Some(d) => d.clone(),
            None => {
                if rows.is_none() {
                    rows = Some(mark_dataset(spec)?);
                }
                domain_from_rows(spec, channel, encoding, rows.as_ref().expect("just evaluated"))?
            }
        };
        out.insert(channel, domain);
    }
    Ok(out)
}

pub(crate) fn domain_from_rows(
    spec: &ChartSpec,
    channel: Channel,
    encoding: &Encoding,
    ds: &Dataset,
) -> Result<Domain, DataError> {
    let field = encoding.value_field();
    if !ds.schema.contains_key(&field) {
        return Err(DataError::UnknownField(field));
    }
    if encoding.data_type.is_continuous() {
        let mut values: Vec<f64> = ds.rows.iter().filter_map(|r| ds.value(r, &field).as_f64()).collect();
        if let (Some(f), Some(_)) = (&encoding.field, encoding.bin) {
            let end = bin_end_field(f);
            values.extend(ds.rows.iter().filter_map(|r| ds.value(r, &end).as_f64()));
        }
        if length_channel(spec) == Some(channel) && !values.is_empty() {
            values.push(0.0);
        }
        let min = values.iter().copied().reduce(f64::min);
        let max = values.iter().copied().reduce(f64::max);
        match (min, max) {
            (Some(min), Some(max)) => Ok(Domain::Continuous { min, max }),
            _ => Err(DataError::EmptyDomain(channel.name().to_string())),
        }
    } else {
        let mut seen = HashSet::new();
        let mut values = Vec::new();
        for row in &ds.rows {
            let v = ds.value(row, &field);
            if !v.is_null() && seen.insert(v.clone()) {
                values.push(v.clone());
            }
        }
        if values.is_empty() {
            return Err(DataError::EmptyDomain(channel.name().to_string()));
        }
        Ok(Domain::Discrete(values))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::parse_chart_spec;
    use proptest::prelude::*;

    fn chart(mark: &str, extra: &str) -> ChartSpec {
        parse_chart_spec(&format!(
            r#"{{"mark": "{mark}",
                "data": {{"values": [{{"g": "a", "v": 3}}, {{"g": "b", "v": 6}}]}},
                "encoding": {{"x": {{"field": "g", "type": "nominal"}},
                             "y": {{"field": "v", "type": "quantitative"{extra}}}}}}}"#
        ))
        .unwrap()
    }

    #[test]
    fn bars_include_zero() {
        assert_eq!(compute_domain(&chart("bar", ""), Channel::Y).unwrap(), Domain::continuous(0.0, 6.0));
        assert_eq!(compute_domain(&chart("point", ""), Channel::Y).unwrap(), Domain::continuous(3.0, 6.0));
    }

    #[test]
    fn explicit_domain_wins() {
        let spec = chart("point", r#", "scale": {"domain": [0, 50]}"#);
        assert_eq!(compute_domain(&spec, Channel::Y).unwrap(), Domain::continuous(0.0, 50.0));
    }

    #[test]
    fn discrete_first_appearance() {
        assert_eq!(compute_domain(&chart("point", ""), Channel::X).unwrap(), Domain::discrete(["a", "b"]));
    }

    #[test]
    fn empty_after_filter() {
        let spec = parse_chart_spec(
            r#"{"mark": "point", "data": {"values": [{"v": 1}]},
                "transform": [{"filter": {"field": "v", "gt": 5}}],
                "encoding": {"x": {"field": "v", "type": "quantitative"}}}"#,
        )
        .unwrap();
        assert_eq!(compute_domain(&spec, Channel::X), Err(DataError::EmptyDomain("x".into())));
    }

    #[test]
    fn unions() {
        let u = |a: Domain, b: Domain| union_domains(&a, &b).unwrap();
        assert_eq!(u(Domain::continuous(0.0, 40.0), Domain::continuous(0.0, 100.0)), Domain::continuous(0.0, 100.0));
        assert_eq!(u(Domain::continuous(0.0, 100.0), Domain::continuous(0.0, 100.0)), Domain::continuous(0.0, 100.0));
        assert_eq!(u(Domain::discrete(["A", "B"]), Domain::discrete(["B", "C"])), Domain::discrete(["A", "B", "C"]));
        assert_eq!(
            union_domains(&Domain::continuous(0.0, 1.0), &Domain::discrete(["A"])),
            Err(DataError::KindMismatch)
        );
    }

    fn continuous() -> impl Strategy<Value = Domain> {
        (-100.0f64..100.0, 0.0f64..100.0).prop_map(|(a, w)| Domain::continuous(a, a + w))
    }

    fn discrete() -> impl Strategy<Value = Domain> {
        prop::collection::vec(0u8..8, 1..6).prop_map(|v| {
            let mut seen = Vec::new();
            for x in v {
                let x = Value::Text(format!("v{x}"));
                if !seen.contains(&x) {
                    seen.push(x);
                }
            }
            Domain::Discrete(seen)
        })
    }

    fn as_set(d: &Domain) -> std::collections::BTreeSet<Value> {
        match d {
            Domain::Discrete(v) => v.iter().cloned().collect(),
            _ => unreachable!(),
        }
    }

    proptest! {
        #[test]
        fn continuous_union_laws(a in continuous(), b in continuous(), c in continuous()) {
            let ab = union_domains(&a, &b).unwrap();
            prop_assert_eq!(&ab, &union_domains(&b, &a).unwrap());
            let left = union_domains(&ab, &c).unwrap();
            let right = union_domains(&a, &union_domains(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            prop_assert_eq!(union_domains(&a, &ab).unwrap(), ab.clone());
            prop_assert!(a.is_subset_of(&ab) && b.is_subset_of(&ab));
        }

        #[test]
        fn discrete_union_laws(a in discrete(), b in discrete()) {
            let ab = union_domains(&a, &b).unwrap();
            let ba = union_domains(&b, &a).unwrap();
            prop_assert_eq!(as_set(&ab), as_set(&ba));
            prop_assert_eq!(union_domains(&a, &ab).unwrap(), ab.clone());
            if let (Domain::Discrete(av), Domain::Discrete(abv)) = (&a, &ab) {
                prop_assert_eq!(&abv[..av.len()], &av[..]);
            }
        }

        #[test]
        fn filtering_shrinks_continuous_domains(vals in prop::collection::vec(-50.0f64..50.0, 1..25), cut in -50.0f64..50.0) {
            let rows: Vec<String> = vals.iter().map(|v| format!(r#"{{"v": {v}}}"#)).collect();
            let base = format!(r#"{{"mark": "point", "data": {{"values": [{}]}}, "encoding": {{"x": {{"field": "v", "type": "quantitative"}}}}}}"#, rows.join(","));
            let full = parse_chart_spec(&base).unwrap();
            let mut filtered = full.clone();
            filtered.transforms.push(crate::spec::Transform::Filter(crate::spec::FieldPredicate::new(
                "v", crate::spec::PredicateOp::Gte, crate::spec::Operand::Scalar(Value::Number(cut)))));
            if let Ok(d) = compute_domain(&filtered, Channel::X) {
                prop_assert!(d.is_subset_of(&compute_domain(&full, Channel::X).unwrap()));
            }
        }
    }
}
