use super::{AttrValue, SceneSample, State, Timeline, TimelineError};

/// Slack, in ms, when comparing sample times against births and deaths.
const EPS_MS: f64 = 1e-6;

/// Value between `from` and `to`. Numbers and colors follow the eased
/// progress; categories switch halfway through the raw progress.
pub fn interpolate(from: &AttrValue, to: &AttrValue, eased: f64, raw: f64) -> AttrValue {
    match (from, to) {
        (AttrValue::Number(a), AttrValue::Number(b)) => AttrValue::Number(a + (b - a) * eased),
        (AttrValue::Color(a), AttrValue::Color(b)) => AttrValue::Color([0, 1, 2].map(|i| a[i] + (b[i] - a[i]) * eased)),
        _ if raw < 0.5 => from.clone(),
        _ => to.clone(),
    }
}

/// Every visible element's attributes at normalized time `t`.
pub fn sample(timeline: &Timeline, t: f64) -> Result<SceneSample, TimelineError> {
    if !(0.0..=1.0).contains(&t) {
        return Err(TimelineError::OutOfRange(t));
    }
    let ms = t * timeline.duration;
    let mut elements = std::collections::BTreeMap::new();
    for (id, el) in &timeline.elements {
        let born = el.birth.is_none_or(|b| ms > b + EPS_MS);
        let alive = el.death.is_none_or(|d| ms < d - EPS_MS);
        if !(born && alive) {
            continue;
        }
        let mut state: State = el.initial.clone();
        for (attr, value) in state.iter_mut() {
            for tr in el.tracks.iter().filter(|tr| tr.attribute == *attr) {
                if ms >= tr.end {
                    *value = tr.to.clone();
                } else {
                    if ms > tr.start {
                        let raw = (ms - tr.start) / (tr.end - tr.start);
                        *value = interpolate(&tr.from, &tr.to, tr.easing.apply(raw), raw);
                    }
                    break;
                }
            }
        }
        elements.insert(id.clone(), state);
    }
    Ok(SceneSample { t, elements })
}
