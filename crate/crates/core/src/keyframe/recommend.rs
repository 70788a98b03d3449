use serde::Serialize;
use serde_json::Value as Json;

use super::{enumerate_partitions, KeyframeError, KeyframeSequence, Synthesizer, DEFAULT_MAX_KEYFRAMES, DEFAULT_OP_CAP};
use crate::edit::diff;
use crate::spec::ChartSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KeyframeOptions {
    /// Most intermediate charts per sequence.
    pub max_keyframes: usize,
    pub top_k: usize,
    /// Largest op set the enumerator accepts.
    pub op_cap: usize,
}

impl Default for KeyframeOptions {
    fn default() -> Self {
        KeyframeOptions {
            max_keyframes: DEFAULT_MAX_KEYFRAMES,
            top_k: 5,
            op_cap: DEFAULT_OP_CAP,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub operations: usize,
    pub enumerated: usize,
    pub invalid: usize,
}

#[derive(Clone, Debug)]
pub struct Recommendation {
    /// Best first; at most `top_k`.
    pub sequences: Vec<KeyframeSequence>,
    pub diagnostics: Diagnostics,
}

impl Recommendation {
    pub fn to_json(&self) -> Json {
        Json::Array(
            self.sequences
                .iter()
                .enumerate()
                .map(|(i, s)| s.to_json(i + 1))
                .collect(),
        )
    }
}

/// Rank keyframe sequences from `start` to `end`.
///
/// Sequences are ordered by score (highest first), then by fewer keyframes,
/// then by their block layout serialized as JSON.
pub fn recommend_keyframes(
    start: &ChartSpec,
    end: &ChartSpec,
    options: &KeyframeOptions,
) -> Result<Recommendation, KeyframeError> {
    let ops = diff(start, end)?;
    if ops.is_empty() {
        return Err(KeyframeError::EmptyDiff);
    }
    let partitions = enumerate_partitions(&ops, options.max_keyframes + 1, options.op_cap)?;
    let mut synth = Synthesizer::new(start, end, &ops);
    let mut diagnostics = Diagnostics {
        operations: ops.len(),
        enumerated: partitions.len(),
        invalid: 0,
    };
    let mut ranked: Vec<(String, KeyframeSequence)> = Vec::new();
    for partition in &partitions {
        match synth.synthesize(partition) {
            Ok(seq) => {
                let key = serde_json::to_string(&seq.blocks).expect("ids serialize");
                ranked.push((key, seq));
            }
            Err(KeyframeError::InvalidIntermediate { .. }) => diagnostics.invalid += 1,
            Err(e) => return Err(e),
        }
    }
    if ranked.is_empty() {
        return Err(KeyframeError::NoValidSequence);
    }
    ranked.sort_by(|(ka, a), (kb, b)| {
        b.score
            .total
            .cmp(&a.score.total)
            .then(a.keyframes.len().cmp(&b.keyframes.len()))
            .then_with(|| ka.cmp(kb))
    });
    ranked.truncate(options.top_k);
    Ok(Recommendation {
        sequences: ranked.into_iter().map(|(_, s)| s).collect(),
        diagnostics,
    })
}
