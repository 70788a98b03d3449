use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{Map, Value as Json};

use super::{
    validate, AggregateField, AggregateOp, AggregateTransform, AnnotationLayer, BinTransform,
    Channel, ChartSpec, DataType, Encoding, FieldPredicate, InlineData, Mark, Operand,
    PredicateOp, ScaleSpec, ScaleType, SpecError, Transform,
};
use crate::data::{number_json, parse_date_ms, Domain, Row, Value};

const DEFAULT_MAXBINS: u32 = 10;

// Vega-Lite properties we recognize but do not support. Anything else that is
// not part of the subset is reported as an unknown property.
const UNSUPPORTED_TOP: &[&str] = &[
    "hconcat", "vconcat", "concat", "facet", "repeat", "spec", "params", "selection",
    "projection", "resolve", "config", "title", "width", "height", "autosize", "padding",
    "background", "view", "usermeta", "datasets",
];
const UNSUPPORTED_MARKS: &[&str] = &[
    "arc", "text", "geoshape", "circle", "square", "trail", "image", "boxplot", "errorbar",
    "errorband",
];
const UNSUPPORTED_CHANNELS: &[&str] = &[
    "column", "row", "facet", "theta", "theta2", "radius", "radius2", "x2", "y2", "xOffset",
    "yOffset", "shape", "detail", "text", "tooltip", "href", "key", "order", "latitude",
    "longitude", "latitude2", "longitude2", "fill", "stroke", "fillOpacity", "strokeOpacity",
    "strokeWidth", "strokeDash", "angle", "description", "url", "xError", "yError",
];
const UNSUPPORTED_ENCODING_PROPS: &[&str] = &[
    "sort", "axis", "legend", "title", "stack", "timeUnit", "format", "formatType", "condition",
    "value", "datum", "impute", "band", "bandPosition", "header", "spacing",
];
const UNSUPPORTED_SCALE_PROPS: &[&str] = &[
    "range", "zero", "nice", "reverse", "scheme", "padding", "paddingInner", "paddingOuter",
    "clamp", "base", "exponent", "interpolate", "round", "domainMid", "rangeMax", "rangeMin",
    "align", "constant", "domainMax", "domainMin",
];
const UNSUPPORTED_TRANSFORMS: &[&str] = &[
    "calculate", "window", "joinaggregate", "timeUnit", "fold", "lookup", "impute", "sample",
    "stack", "density", "loess", "regression", "quantile", "pivot", "flatten", "extent",
];

/// Parse and validate a chart document.
pub fn parse_chart_spec(text: &str) -> Result<ChartSpec, SpecError> {
    let json: Json = serde_json::from_str(text).map_err(|e| SpecError::Syntax(e.to_string()))?;
    parse_chart_value(&json)
}

/// Like [`parse_chart_spec`] for an already-decoded JSON value.
pub fn parse_chart_value(json: &Json) -> Result<ChartSpec, SpecError> {
    let spec = chart_from_json(json)?;
    validate(&spec)?;
    Ok(spec)
}

struct Obj<'a> {
    map: &'a Map<String, Json>,
    path: String,
}

impl<'a> Obj<'a> {
    fn new(json: &'a Json, path: &str) -> Result<Self, SpecError> {
        match json {
            Json::Object(map) => Ok(Obj {
                map,
                path: path.to_string(),
            }),
            _ => Err(SpecError::invalid(display_path(path), "expected an object")),
        }
    }

    fn child(&self, key: &str) -> String {
        if self.path.is_empty() {
            key.to_string()
        } else {
            format!("{}.{}", self.path, key)
        }
    }

    fn get(&self, key: &str) -> Option<&'a Json> {
        self.map.get(key)
    }

    /// Reject keys outside `allowed`, classifying known Vega-Lite keys as
    /// unsupported rather than unknown.
    fn check_keys(&self, allowed: &[&str], unsupported: &[&str], what: &str) -> Result<(), SpecError> {
        for key in self.map.keys() {
            if allowed.contains(&key.as_str()) {
                continue;
            }
            let path = self.child(key);
            if unsupported.contains(&key.as_str()) {
                return Err(SpecError::unsupported(path, format!("{what} `{key}` is not supported")));
            }
            return Err(SpecError::invalid(path, format!("unknown {what} `{key}`")));
        }
        Ok(())
    }

    fn string(&self, key: &str) -> Result<Option<&'a str>, SpecError> {
        match self.get(key) {
            None => Ok(None),
            Some(Json::String(s)) => Ok(Some(s)),
            Some(_) => Err(SpecError::invalid(self.child(key), "expected a string")),
        }
    }

    fn required_string(&self, key: &str) -> Result<&'a str, SpecError> {
        self.string(key)?
            .ok_or_else(|| SpecError::invalid(self.child(key), "missing required property"))
    }
}

fn display_path(path: &str) -> String {
    if path.is_empty() {
        "$".to_string()
    } else {
        path.to_string()
    }
}

fn chart_from_json(json: &Json) -> Result<ChartSpec, SpecError> {
    let top = Obj::new(json, "")?;
    top.check_keys(
        &["$schema", "description", "mark", "encoding", "transform", "data", "layer"],
        UNSUPPORTED_TOP,
        "property",
    )?;
    let mark = parse_mark(top.get("mark"), "mark", false)?;
    let data = parse_data(top.get("data"))?;
    let transforms = match top.get("transform") {
        None => Vec::new(),
        Some(t) => parse_transforms(t, "transform")?,
    };
    let encodings = match top.get("encoding") {
        None => BTreeMap::new(),
        Some(e) => parse_encodings(e, "encoding", true)?,
    };
    let layers = match top.get("layer") {
        None => Vec::new(),
        Some(Json::Array(items)) => items
            .iter()
            .enumerate()
            .map(|(i, item)| parse_layer(item, &format!("layer[{i}]")))
            .collect::<Result<_, _>>()?,
        Some(_) => return Err(SpecError::invalid("layer", "expected an array")),
    };
    Ok(ChartSpec {
        mark,
        encodings,
        transforms,
        data: Arc::new(data),
        layers,
    })
}

fn parse_mark(json: Option<&Json>, path: &str, in_layer: bool) -> Result<Mark, SpecError> {
    let name = match json {
        None => return Err(SpecError::invalid(path, "missing required property")),
        Some(Json::String(s)) => s.as_str(),
        Some(obj @ Json::Object(_)) => {
            let o = Obj::new(obj, path)?;
            o.check_keys(&["type"], &[], "mark property")
                .map_err(|e| match e {
                    SpecError::Validation { path, message } => SpecError::Unsupported { path, message },
                    other => other,
                })?;
            o.required_string("type")?
        }
        Some(_) => return Err(SpecError::invalid(path, "expected a mark name")),
    };
    match Mark::from_name(name) {
        Some(Mark::Rule) if !in_layer => Err(SpecError::unsupported(
            path,
            "`rule` marks are only supported in annotation layers",
        )),
        Some(mark) => Ok(mark),
        None if UNSUPPORTED_MARKS.contains(&name) => Err(SpecError::unsupported(
            path,
            format!("mark `{name}` is not a supported single-view Cartesian mark"),
        )),
        None => Err(SpecError::invalid(path, format!("unknown mark `{name}`"))),
    }
}

fn parse_data(json: Option<&Json>) -> Result<InlineData, SpecError> {
    let json = json.ok_or_else(|| SpecError::invalid("data", "missing required property"))?;
    let obj = Obj::new(json, "data")?;
    obj.check_keys(&["name", "values"], &["url", "format", "sequence", "sphere", "graticule"], "data property")?;
    let name = obj.string("name")?.unwrap_or("inline").to_string();
    let values = match obj.get("values") {
        Some(Json::Array(rows)) => rows,
        Some(_) => return Err(SpecError::invalid("data.values", "expected an array of records")),
        None => return Err(SpecError::invalid("data.values", "missing required property")),
    };
    let mut out = Vec::with_capacity(values.len());
    for (i, row) in values.iter().enumerate() {
        let path = format!("data.values[{i}]");
        let Json::Object(map) = row else {
            return Err(SpecError::invalid(path, "expected a record object"));
        };
        let mut record = Row::new();
        for (k, v) in map {
            let value = Value::from_json(v).ok_or_else(|| {
                SpecError::invalid(format!("{path}.{k}"), "nested values are not supported")
            })?;
            record.insert(k.clone(), value);
        }
        out.push(record);
    }
    Ok(InlineData { name, values: out })
}

fn parse_encodings(
    json: &Json,
    path: &str,
    allow_scale: bool,
) -> Result<BTreeMap<Channel, Encoding>, SpecError> {
    let obj = Obj::new(json, path)?;
    let mut out = BTreeMap::new();
    for (key, def) in obj.map {
        let child = obj.child(key);
        let Some(channel) = Channel::from_name(key) else {
            if UNSUPPORTED_CHANNELS.contains(&key.as_str()) {
                return Err(SpecError::unsupported(child, format!("channel `{key}` is not supported")));
            }
            return Err(SpecError::invalid(child, format!("unknown channel `{key}`")));
        };
        out.insert(channel, parse_encoding(def, &child, allow_scale)?);
    }
    Ok(out)
}

fn parse_encoding(json: &Json, path: &str, allow_scale: bool) -> Result<Encoding, SpecError> {
    let obj = Obj::new(json, path)?;
    obj.check_keys(
        &["field", "type", "aggregate", "bin", "scale"],
        UNSUPPORTED_ENCODING_PROPS,
        "encoding property",
    )?;
    let field = obj.string("field")?.map(str::to_string);
    let type_name = obj.required_string("type")?;
    let data_type = DataType::from_name(type_name).ok_or_else(|| {
        SpecError::invalid(obj.child("type"), format!("unknown data type `{type_name}`"))
    })?;
    let aggregate = match obj.string("aggregate")? {
        None => None,
        Some(name) => Some(AggregateOp::from_name(name).ok_or_else(|| {
            SpecError::unsupported(obj.child("aggregate"), format!("aggregate op `{name}` is not supported"))
        })?),
    };
    if field.is_none() && aggregate != Some(AggregateOp::Count) {
        return Err(SpecError::invalid(obj.child("field"), "missing required property"));
    }
    let bin = match obj.get("bin") {
        None => None,
        Some(b) => parse_bin_param(b, &obj.child("bin"))?,
    };
    let scale = match obj.get("scale") {
        None => ScaleSpec::default(),
        Some(_) if !allow_scale => {
            return Err(SpecError::invalid(
                obj.child("scale"),
                "annotation layers share the base chart's scales",
            ))
        }
        Some(s) => parse_scale(s, &obj.child("scale"), data_type)?,
    };
    Ok(Encoding {
        field,
        data_type,
        aggregate,
        bin,
        scale,
    })
}

fn parse_bin_param(json: &Json, path: &str) -> Result<Option<u32>, SpecError> {
    match json {
        Json::Bool(false) => Ok(None),
        Json::Bool(true) => Ok(Some(DEFAULT_MAXBINS)),
        Json::Object(_) => {
            let obj = Obj::new(json, path)?;
            obj.check_keys(
                &["maxbins"],
                &["step", "steps", "extent", "nice", "base", "divide", "minstep", "anchor", "binned"],
                "bin property",
            )?;
            match obj.get("maxbins") {
                None => Ok(Some(DEFAULT_MAXBINS)),
                Some(m) => {
                    let n = m.as_u64().filter(|n| (2..=10_000).contains(n)).ok_or_else(|| {
                        SpecError::invalid(obj.child("maxbins"), "expected an integer of at least 2")
                    })?;
                    Ok(Some(n as u32))
                }
            }
        }
        _ => Err(SpecError::invalid(path, "expected a boolean or bin parameters")),
    }
}

fn parse_scale(json: &Json, path: &str, data_type: DataType) -> Result<ScaleSpec, SpecError> {
    let obj = Obj::new(json, path)?;
    obj.check_keys(&["type", "domain"], UNSUPPORTED_SCALE_PROPS, "scale property")?;
    let scale_type = match obj.string("type")? {
        None => None,
        Some(name) => Some(ScaleType::from_name(name).ok_or_else(|| {
            SpecError::unsupported(obj.child("type"), format!("scale type `{name}` is not supported"))
        })?),
    };
    let domain = match obj.get("domain") {
        None => None,
        Some(d) => Some(parse_domain(d, &obj.child("domain"), data_type)?),
    };
    Ok(ScaleSpec { scale_type, domain })
}

fn parse_domain(json: &Json, path: &str, data_type: DataType) -> Result<Domain, SpecError> {
    let Json::Array(items) = json else {
        return Err(SpecError::unsupported(path, "only literal domain arrays are supported"));
    };
    if data_type.is_continuous() {
        if items.len() != 2 {
            return Err(SpecError::invalid(path, "a continuous domain needs exactly [min, max]"));
        }
        let bound = |v: &Json| -> Option<f64> {
            match (v, data_type) {
                (Json::Number(n), _) => n.as_f64(),
                (Json::String(s), DataType::Temporal) => parse_date_ms(s),
                _ => None,
            }
        };
        let (Some(min), Some(max)) = (bound(&items[0]), bound(&items[1])) else {
            return Err(SpecError::invalid(path, "domain bounds must be numbers (or dates for temporal fields)"));
        };
        Ok(Domain::Continuous { min, max })
    } else {
        let values = items
            .iter()
            .map(|v| Value::from_json(v).filter(|v| !v.is_null()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| SpecError::invalid(path, "domain values must be scalars"))?;
        Ok(Domain::Discrete(values))
    }
}

fn parse_transforms(json: &Json, path: &str) -> Result<Vec<Transform>, SpecError> {
    let Json::Array(items) = json else {
        return Err(SpecError::invalid(path, "expected an array"));
    };
    items
        .iter()
        .enumerate()
        .map(|(i, t)| parse_transform(t, &format!("{path}[{i}]")))
        .collect()
}

fn parse_transform(json: &Json, path: &str) -> Result<Transform, SpecError> {
    let obj = Obj::new(json, path)?;
    if let Some(f) = obj.get("filter") {
        obj.check_keys(&["filter"], &[], "filter property")?;
        return parse_predicate(f, &obj.child("filter")).map(Transform::Filter);
    }
    if let Some(a) = obj.get("aggregate") {
        obj.check_keys(&["aggregate", "groupby"], &[], "aggregate property")?;
        return parse_aggregate(a, obj.get("groupby"), &obj).map(Transform::Aggregate);
    }
    if let Some(b) = obj.get("bin") {
        obj.check_keys(&["bin", "field", "as"], &[], "bin property")?;
        let maxbins = parse_bin_param(b, &obj.child("bin"))?
            .ok_or_else(|| SpecError::invalid(obj.child("bin"), "a bin transform cannot be disabled"))?;
        let field = obj.required_string("field")?.to_string();
        let (start_as, end_as) = match obj.get("as") {
            None => (super::bin_start_field(&field), super::bin_end_field(&field)),
            Some(Json::String(s)) => (s.clone(), format!("{s}_end")),
            Some(Json::Array(pair)) if pair.len() == 2 && pair.iter().all(Json::is_string) => (
                pair[0].as_str().unwrap_or_default().to_string(),
                pair[1].as_str().unwrap_or_default().to_string(),
            ),
            Some(_) => return Err(SpecError::invalid(obj.child("as"), "expected a name or [start, end] names")),
        };
        return Ok(Transform::Bin(BinTransform {
            field,
            maxbins,
            start_as,
            end_as,
        }));
    }
    for key in obj.map.keys() {
        if UNSUPPORTED_TRANSFORMS.contains(&key.as_str()) {
            return Err(SpecError::unsupported(obj.child(key), format!("`{key}` transforms are not supported")));
        }
    }
    Err(SpecError::invalid(path, "expected a filter, aggregate or bin transform"))
}

fn parse_predicate(json: &Json, path: &str) -> Result<FieldPredicate, SpecError> {
    if json.is_string() {
        return Err(SpecError::unsupported(path, "expression filters are not supported"));
    }
    let obj = Obj::new(json, path)?;
    let op_keys: Vec<&str> = PredicateOp::ALL.iter().map(|op| op.key()).collect();
    let mut allowed = vec!["field"];
    allowed.extend(&op_keys);
    obj.check_keys(&allowed, &["timeUnit", "param", "valid", "and", "or", "not", "empty"], "predicate property")?;
    let field = obj.required_string("field")?.to_string();
    let mut found = PredicateOp::ALL.into_iter().filter(|op| obj.get(op.key()).is_some());
    let op = found
        .next()
        .ok_or_else(|| SpecError::invalid(path, "a predicate needs one comparison"))?;
    if found.next().is_some() {
        return Err(SpecError::invalid(path, "a predicate takes exactly one comparison"));
    }
    let raw = &obj.map[op.key()];
    let operand_path = obj.child(op.key());
    let scalar = |v: &Json| Value::from_json(v).filter(|v| !v.is_null());
    let operand = match op {
        PredicateOp::Range => match raw {
            Json::Array(pair) if pair.len() == 2 => match (scalar(&pair[0]), scalar(&pair[1])) {
                (Some(lo), Some(hi)) => Operand::Range(lo, hi),
                _ => return Err(SpecError::invalid(operand_path, "range bounds must be scalars")),
            },
            _ => return Err(SpecError::invalid(operand_path, "expected [low, high]")),
        },
        PredicateOp::OneOf => match raw {
            Json::Array(items) if !items.is_empty() => Operand::Set(
                items
                    .iter()
                    .map(scalar)
                    .collect::<Option<_>>()
                    .ok_or_else(|| SpecError::invalid(operand_path.clone(), "set members must be scalars"))?,
            ),
            _ => return Err(SpecError::invalid(operand_path, "expected a nonempty array")),
        },
        _ => Operand::Scalar(
            scalar(raw).ok_or_else(|| SpecError::invalid(operand_path, "expected a scalar operand"))?,
        ),
    };
    Ok(FieldPredicate { field, op, operand })
}

fn parse_aggregate(json: &Json, groupby: Option<&Json>, parent: &Obj) -> Result<AggregateTransform, SpecError> {
    let path = parent.child("aggregate");
    let Json::Array(items) = json else {
        return Err(SpecError::invalid(path, "expected an array of aggregate fields"));
    };
    if items.is_empty() {
        return Err(SpecError::invalid(path, "expected at least one aggregate field"));
    }
    let mut fields = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let obj = Obj::new(item, &format!("{path}[{i}]"))?;
        obj.check_keys(&["op", "field", "as"], &[], "aggregate property")?;
        let op_name = obj.required_string("op")?;
        let op = AggregateOp::from_name(op_name).ok_or_else(|| {
            SpecError::unsupported(obj.child("op"), format!("aggregate op `{op_name}` is not supported"))
        })?;
        let field = obj.string("field")?.map(str::to_string);
        if field.is_none() && op != AggregateOp::Count {
            return Err(SpecError::invalid(obj.child("field"), "missing required property"));
        }
        let alias = match obj.string("as")? {
            Some(a) => a.to_string(),
            None if op == AggregateOp::Count => "count".to_string(),
            None => field.clone().unwrap_or_default(),
        };
        fields.push(AggregateField { op, field, alias });
    }
    let groupby = match groupby {
        None => Vec::new(),
        Some(Json::Array(g)) => g
            .iter()
            .map(|v| v.as_str().map(str::to_string))
            .collect::<Option<_>>()
            .ok_or_else(|| SpecError::invalid(parent.child("groupby"), "expected field names"))?,
        Some(_) => return Err(SpecError::invalid(parent.child("groupby"), "expected an array")),
    };
    Ok(AggregateTransform { fields, groupby })
}

fn parse_layer(json: &Json, path: &str) -> Result<AnnotationLayer, SpecError> {
    let obj = Obj::new(json, path)?;
    obj.check_keys(
        &["name", "mark", "encoding", "transform"],
        &["data", "layer", "params", "resolve", "title"],
        "layer property",
    )?;
    let name = obj.required_string("name")?.to_string();
    let mark = parse_mark(obj.get("mark"), &obj.child("mark"), true)?;
    let encodings = match obj.get("encoding") {
        None => BTreeMap::new(),
        Some(e) => parse_encodings(e, &obj.child("encoding"), false)?,
    };
    let transforms = match obj.get("transform") {
        None => Vec::new(),
        Some(t) => parse_transforms(t, &obj.child("transform"))?,
    };
    Ok(AnnotationLayer {
        name,
        mark,
        encodings,
        transforms,
    })
}

// ---------------------------------------------------------------------------
// Serialization

pub(crate) fn chart_to_json(spec: &ChartSpec) -> Json {
    let mut top = Map::new();
    top.insert("mark".into(), Json::from(spec.mark.name()));
    top.insert("data".into(), data_to_json(&spec.data));
    if !spec.transforms.is_empty() {
        top.insert("transform".into(), transforms_to_json(&spec.transforms));
    }
    top.insert("encoding".into(), encodings_to_json(&spec.encodings));
    if !spec.layers.is_empty() {
        let layers = spec
            .layers
            .iter()
            .map(|layer| {
                let mut o = Map::new();
                o.insert("name".into(), Json::from(layer.name.clone()));
                o.insert("mark".into(), Json::from(layer.mark.name()));
                o.insert("encoding".into(), encodings_to_json(&layer.encodings));
                if !layer.transforms.is_empty() {
                    o.insert("transform".into(), transforms_to_json(&layer.transforms));
                }
                Json::Object(o)
            })
            .collect();
        top.insert("layer".into(), Json::Array(layers));
    }
    Json::Object(top)
}

fn data_to_json(data: &InlineData) -> Json {
    let values = data
        .values
        .iter()
        .map(|row| Json::Object(row.iter().map(|(k, v)| (k.clone(), v.to_json())).collect()))
        .collect();
    let mut o = Map::new();
    o.insert("name".into(), Json::from(data.name.clone()));
    o.insert("values".into(), Json::Array(values));
    Json::Object(o)
}

pub(crate) fn encodings_to_json(encodings: &BTreeMap<Channel, Encoding>) -> Json {
    Json::Object(
        encodings
            .iter()
            .map(|(c, e)| (c.name().to_string(), encoding_to_json(e)))
            .collect(),
    )
}

pub(crate) fn encoding_to_json(e: &Encoding) -> Json {
    let mut o = Map::new();
    if let Some(f) = &e.field {
        o.insert("field".into(), Json::from(f.clone()));
    }
    o.insert("type".into(), Json::from(e.data_type.name()));
    if let Some(op) = e.aggregate {
        o.insert("aggregate".into(), Json::from(op.name()));
    }
    if let Some(maxbins) = e.bin {
        o.insert("bin".into(), serde_json::json!({ "maxbins": maxbins }));
    }
    if !e.scale.is_default() {
        o.insert("scale".into(), scale_to_json(&e.scale));
    }
    Json::Object(o)
}

pub(crate) fn scale_to_json(s: &ScaleSpec) -> Json {
    let mut o = Map::new();
    if let Some(t) = s.scale_type {
        o.insert("type".into(), Json::from(t.name()));
    }
    if let Some(d) = &s.domain {
        o.insert("domain".into(), domain_to_json(d));
    }
    Json::Object(o)
}

pub(crate) fn domain_to_json(d: &Domain) -> Json {
    match d {
        Domain::Continuous { min, max } => Json::Array(vec![number_json(*min), number_json(*max)]),
        Domain::Discrete(values) => Json::Array(values.iter().map(Value::to_json).collect()),
    }
}

pub(crate) fn transforms_to_json(transforms: &[Transform]) -> Json {
    Json::Array(transforms.iter().map(transform_to_json).collect())
}

fn transform_to_json(t: &Transform) -> Json {
    match t {
        Transform::Filter(p) => serde_json::json!({ "filter": predicate_to_json(p) }),
        Transform::Bin(b) => serde_json::json!({
            "bin": { "maxbins": b.maxbins },
            "field": b.field,
            "as": [b.start_as, b.end_as],
        }),
        Transform::Aggregate(a) => {
            let fields: Vec<Json> = a
                .fields
                .iter()
                .map(|f| {
                    let mut o = Map::new();
                    o.insert("op".into(), Json::from(f.op.name()));
                    if let Some(field) = &f.field {
                        o.insert("field".into(), Json::from(field.clone()));
                    }
                    o.insert("as".into(), Json::from(f.alias.clone()));
                    Json::Object(o)
                })
                .collect();
            serde_json::json!({ "aggregate": fields, "groupby": a.groupby })
        }
    }
}

pub(crate) fn predicate_to_json(p: &FieldPredicate) -> Json {
    let operand = match &p.operand {
        Operand::Scalar(v) => v.to_json(),
        Operand::Range(lo, hi) => Json::Array(vec![lo.to_json(), hi.to_json()]),
        Operand::Set(items) => Json::Array(items.iter().map(Value::to_json).collect()),
    };
    let mut o = Map::new();
    o.insert("field".into(), Json::from(p.field.clone()));
    o.insert(p.op.key().into(), operand);
    Json::Object(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scatter() -> String {
        r#"{
            "mark": "point",
            "data": {"values": [{"Horsepower": 130, "MPG": 18}, {"Horsepower": 95, "MPG": 24}]},
            "encoding": {
                "x": {"field": "Horsepower", "type": "quantitative"},
                "y": {"field": "MPG", "type": "quantitative"}
            }
        }"#
        .to_string()
    }

    #[test]
    fn minimal_scatter() {
        let spec = parse_chart_spec(&scatter()).unwrap();
        assert_eq!(spec.mark, Mark::Point);
        assert_eq!(spec.encodings.len(), 2);
        assert!(spec.transforms.is_empty());
        assert_eq!(spec.data.name, "inline");
    }

    #[test]
    fn arc_is_unsupported() {
        let text = scatter().replace("\"point\"", "\"arc\"");
        let err = parse_chart_spec(&text).unwrap_err();
        assert!(matches!(err, SpecError::Unsupported { ref path, .. } if path == "mark"), "{err}");
    }

    #[test]
    fn malformed_text_is_a_syntax_error() {
        assert!(matches!(parse_chart_spec("{\"mark\": "), Err(SpecError::Syntax(_))));
    }

    #[test]
    fn unknown_properties_are_rejected() {
        let text = scatter().replace("\"mark\": \"point\",", "\"mark\": \"point\", \"colour\": 1,");
        let err = parse_chart_spec(&text).unwrap_err();
        assert_eq!(err.path(), Some("colour"));
        assert!(matches!(err, SpecError::Validation { .. }));
    }

    #[test]
    fn multi_view_and_facets_are_unsupported() {
        let text = scatter().replace("\"mark\": \"point\",", "\"mark\": \"point\", \"hconcat\": [],");
        assert!(matches!(parse_chart_spec(&text), Err(SpecError::Unsupported { .. })));
        let text = scatter().replace(
            "\"encoding\": {",
            "\"encoding\": {\"column\": {\"field\": \"MPG\", \"type\": \"nominal\"},",
        );
        let err = parse_chart_spec(&text).unwrap_err();
        assert_eq!(err.path(), Some("encoding.column"));
        assert!(matches!(err, SpecError::Unsupported { .. }));
    }

    #[test]
    fn sort_and_axis_titles_are_unsupported() {
        let text = scatter().replace(
            "\"field\": \"MPG\", \"type\": \"quantitative\"",
            "\"field\": \"MPG\", \"type\": \"quantitative\", \"axis\": {\"title\": \"m\"}",
        );
        let err = parse_chart_spec(&text).unwrap_err();
        assert_eq!(err.path(), Some("encoding.y.axis"));
        assert!(matches!(err, SpecError::Unsupported { .. }));
    }

    #[test]
    fn url_data_is_unsupported() {
        let text = r#"{"mark": "point", "data": {"url": "cars.json"}, "encoding": {}}"#;
        assert!(matches!(parse_chart_spec(text), Err(SpecError::Unsupported { .. })));
    }

    #[test]
    fn rule_is_layer_only() {
        let text = scatter().replace("\"point\"", "\"rule\"");
        assert!(matches!(parse_chart_spec(&text), Err(SpecError::Unsupported { .. })));
    }

    #[test]
    fn filter_forms() {
        let p = parse_predicate(&serde_json::json!({"field": "v", "range": [1, 5]}), "f").unwrap();
        assert_eq!(p.op, PredicateOp::Range);
        assert_eq!(p.operand, Operand::Range(Value::Number(1.0), Value::Number(5.0)));
        assert!(parse_predicate(&serde_json::json!({"field": "v", "lt": 1, "gt": 0}), "f").is_err());
        assert!(matches!(
            parse_predicate(&serde_json::json!("datum.v > 3"), "f"),
            Err(SpecError::Unsupported { .. })
        ));
    }
}
