use std::fmt;

use crate::edit::{EditOp, OpKind};

/// One ordering preference over the blocks of a partition.
#[derive(Clone, Copy)]
pub struct PrioritizationRule {
    pub id: &'static str,
    pub description: &'static str,
    pub score: i32,
    pub condition: fn(&[Vec<&EditOp>]) -> bool,
}

impl fmt::Debug for PrioritizationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({:+})", self.id, self.score)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleScore {
    pub rule: &'static str,
    pub score: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Score {
    pub total: i32,
    /// Every rule, in rule order, with its contribution (possibly 0).
    pub rules: Vec<RuleScore>,
}

fn blocks_of(blocks: &[Vec<&EditOp>], pred: impl Fn(OpKind) -> bool) -> Vec<usize> {
    blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.iter().any(|op| pred(op.kind())))
        .map(|(i, _)| i)
        .collect()
}

/// Some op matching `first` sits in a strictly earlier block than some op
/// matching `then`.
fn earlier(blocks: &[Vec<&EditOp>], first: impl Fn(OpKind) -> bool, then: impl Fn(OpKind) -> bool) -> bool {
    match (blocks_of(blocks, first).first(), blocks_of(blocks, then).last()) {
        (Some(a), Some(b)) => a < b,
        _ => false,
    }
}

fn same_block(blocks: &[Vec<&EditOp>], a: OpKind, b: OpKind) -> bool {
    blocks
        .iter()
        .any(|block| block.iter().any(|op| op.kind() == a) && block.iter().any(|op| op.kind() == b))
}

fn is(kind: OpKind) -> impl Fn(OpKind) -> bool {
    move |k| k == kind
}

fn filter_before_transform(blocks: &[Vec<&EditOp>]) -> bool {
    earlier(blocks, is(OpKind::AddFilter), |k| matches!(k, OpKind::AddAggregate | OpKind::AddBin))
        || earlier(blocks, |k| matches!(k, OpKind::RemoveAggregate | OpKind::RemoveBin), OpKind::is_filter)
}

fn aggregate_before_bin(blocks: &[Vec<&EditOp>]) -> bool {
    earlier(blocks, is(OpKind::AddAggregate), is(OpKind::AddBin))
        || earlier(blocks, is(OpKind::RemoveBin), is(OpKind::RemoveAggregate))
}

fn mark_before_aggregate(blocks: &[Vec<&EditOp>]) -> bool {
    earlier(blocks, is(OpKind::Mark), is(OpKind::AddAggregate))
        || earlier(blocks, is(OpKind::RemoveAggregate), is(OpKind::Mark))
}

fn encoding_before_aggregate(blocks: &[Vec<&EditOp>]) -> bool {
    earlier(blocks, |k| matches!(k, OpKind::AddEncoding | OpKind::ModifyEncoding), is(OpKind::AddAggregate))
        || earlier(blocks, is(OpKind::RemoveAggregate), is(OpKind::RemoveEncoding))
}

fn encoding_with_scale(blocks: &[Vec<&EditOp>]) -> bool {
    blocks.iter().any(|block| {
        block.iter().any(|a| {
            a.kind() == OpKind::ModifyEncoding
                && block
                    .iter()
                    .any(|b| b.kind() == OpKind::ModifyScale && b.channel() == a.channel())
        })
    })
}

fn filters_together(blocks: &[Vec<&EditOp>]) -> bool {
    blocks
        .iter()
        .any(|block| block.iter().filter(|op| op.kind().is_filter()).count() >= 2)
}

fn bin_with_aggregate(blocks: &[Vec<&EditOp>]) -> bool {
    same_block(blocks, OpKind::AddBin, OpKind::AddAggregate)
        || same_block(blocks, OpKind::RemoveBin, OpKind::RemoveAggregate)
}

/// The seven ordering rules.
pub fn default_rules() -> Vec<PrioritizationRule> {
    vec![
        PrioritizationRule {
            id: "filter-before-aggregate-or-bin",
            description: "data are filtered before being aggregated or binned",
            score: 1,
            condition: filter_before_transform,
        },
        PrioritizationRule {
            id: "aggregate-before-bin",
            description: "data are aggregated before being binned",
            score: -1,
            condition: aggregate_before_bin,
        },
        PrioritizationRule {
            id: "mark-before-aggregate",
            description: "the mark type changes before data are aggregated",
            score: -1,
            condition: mark_before_aggregate,
        },
        PrioritizationRule {
            id: "encoding-before-aggregate",
            description: "encodings are added or modified before data are aggregated",
            score: 1,
            condition: encoding_before_aggregate,
        },
        PrioritizationRule {
            id: "encoding-with-scale",
            description: "an encoding change and its scale change happen together",
            score: 1,
            condition: encoding_with_scale,
        },
        PrioritizationRule {
            id: "filters-together",
            description: "several filter changes happen at once",
            score: -1,
            condition: filters_together,
        },
        PrioritizationRule {
            id: "bin-with-aggregate",
            description: "binning happens together with aggregation",
            score: 1,
            condition: bin_with_aggregate,
        },
    ]
}

/// Sum of the scores of the rules whose condition holds. Each rule counts
/// at most once.
pub fn score_partition(blocks: &[Vec<&EditOp>], rules: &[PrioritizationRule]) -> Score {
    let rules: Vec<RuleScore> = rules
        .iter()
        .map(|r| RuleScore {
            rule: r.id,
            score: if (r.condition)(blocks) { r.score } else { 0 },
        })
        .collect();
    Score {
        total: rules.iter().map(|r| r.score).sum(),
        rules,
    }
}
