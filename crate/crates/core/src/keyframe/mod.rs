//! Keyframe recommendation.
//!
//! The edit operations between two charts are recombined into ordered
//! blocks. Each block boundary becomes an intermediate chart, every
//! sequence is scored by a small set of ordering rules, and the results are
//! ranked.

mod recommend;
mod rules;
mod synth;

use serde_json::{json, Value as Json};

use crate::edit::{EditError, EditOpSet};
use crate::partitions::ordered_partitions;
use crate::spec::ChartSpec;

pub use recommend::{recommend_keyframes, Diagnostics, KeyframeOptions, Recommendation};
pub use rules::{default_rules, score_partition, PrioritizationRule, RuleScore, Score};
pub use synth::{synthesize_sequence, Synthesizer};

pub const DEFAULT_MAX_KEYFRAMES: usize = 4;
pub const DEFAULT_OP_CAP: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum KeyframeError {
    #[error(transparent)]
    Edit(#[from] EditError),
    #[error("the two charts are identical")]
    EmptyDiff,
    #[error("{ops} edit operations exceed the enumeration cap of {cap}")]
    CombinatorialLimit { ops: usize, cap: usize },
    #[error("keyframe {index} is invalid: {source}")]
    InvalidIntermediate { index: usize, source: EditError },
    #[error("no valid keyframe sequence exists")]
    NoValidSequence,
}

/// Ordered blocks of op indices into an [`EditOpSet`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedPartition {
    pub blocks: Vec<Vec<usize>>,
}

impl OrderedPartition {
    pub fn new(blocks: Vec<Vec<usize>>) -> Self {
        OrderedPartition { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Op ids per block.
    pub fn ids(&self, ops: &EditOpSet) -> Vec<Vec<String>> {
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&i| ops.ops[i].path()).collect())
            .collect()
    }
}

/// Every ordered partition of `ops` into at most `max_blocks` blocks.
pub fn enumerate_partitions(
    ops: &EditOpSet,
    max_blocks: usize,
    op_cap: usize,
) -> Result<Vec<OrderedPartition>, KeyframeError> {
    if ops.len() > op_cap {
        return Err(KeyframeError::CombinatorialLimit { ops: ops.len(), cap: op_cap });
    }
    Ok(ordered_partitions(ops.len(), max_blocks.max(1))
        .into_iter()
        .map(OrderedPartition::new)
        .collect())
}

/// Charts `k_1..k_N` with the partition that produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyframeSequence {
    pub keyframes: Vec<ChartSpec>,
    pub partition: OrderedPartition,
    /// Op ids per block.
    pub blocks: Vec<Vec<String>>,
    pub score: Score,
}

impl KeyframeSequence {
    pub fn to_json(&self, rank: usize) -> Json {
        let breakdown: serde_json::Map<String, Json> = self
            .score
            .rules
            .iter()
            .map(|r| (r.rule.to_string(), Json::from(r.score)))
            .collect();
        json!({
            "rank": rank,
            "score": self.score.total,
            "rule_breakdown": breakdown,
            "partition": self.blocks,
            "keyframes": self.keyframes.iter().map(ChartSpec::to_json_value).collect::<Vec<_>>(),
        })
    }
}
