use std::collections::{BTreeMap, HashMap};

use super::rules::{default_rules, score_partition, PrioritizationRule};
use super::{KeyframeError, KeyframeSequence, OrderedPartition};
use crate::data::{compute_domain, union_domains, Domain};
use crate::edit::{apply_block, EditError, EditOp, EditOpSet, FieldRef};
use crate::spec::{validate, Channel, ChartSpec};

/// Builds keyframe sequences for one op set, caching the chart reached by
/// each subset of ops. Ops touch disjoint properties, so the chart after a
/// prefix of blocks depends only on which ops were applied.
pub struct Synthesizer<'a> {
    ops: &'a EditOpSet,
    start: &'a ChartSpec,
    end: &'a ChartSpec,
    rules: Vec<PrioritizationRule>,
    endpoint_domains: [BTreeMap<Channel, Domain>; 2],
    cache: HashMap<u64, Result<ChartSpec, EditError>>,
}

fn domains_of(spec: &ChartSpec) -> BTreeMap<Channel, Domain> {
    spec.encodings
        .keys()
        .filter_map(|&c| compute_domain(spec, c).ok().map(|d| (c, d)))
        .collect()
}

impl<'a> Synthesizer<'a> {
    pub fn new(start: &'a ChartSpec, end: &'a ChartSpec, ops: &'a EditOpSet) -> Self {
        Synthesizer {
            ops,
            start,
            end,
            rules: default_rules(),
            endpoint_domains: [domains_of(&ops.source), domains_of(&ops.target)],
            cache: HashMap::new(),
        }
    }

    /// The intermediate chart reached after applying the ops in `mask`,
    /// with its scale domains rewritten.
    pub fn intermediate(&mut self, mask: u64) -> Result<ChartSpec, EditError> {
        if let Some(hit) = self.cache.get(&mask) {
            return hit.clone();
        }
        let block: Vec<EditOp> = (0..self.ops.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| self.ops.ops[i].clone())
            .collect();
        let result = apply_block(&self.ops.source, &block).and_then(|chart| {
            let rewritten = self.rewrite_domains(chart);
            validate(&rewritten).map_err(EditError::InvalidResult)?;
            Ok(rewritten)
        });
        self.cache.insert(mask, result.clone());
        result
    }

    /// Each channel's domain becomes the union of the endpoint domains of
    /// the same field and type. Channels matching neither endpoint keep
    /// their own domain.
    fn rewrite_domains(&self, mut chart: ChartSpec) -> ChartSpec {
        let own = domains_of(&chart);
        let endpoints = [&self.ops.source, &self.ops.target];
        for (channel, enc) in chart.encodings.iter_mut() {
            let own_kind = own.get(channel).map(Domain::is_continuous);
            let mut union: Option<Domain> = None;
            for (side, endpoint) in endpoints.iter().enumerate() {
                let Some(other) = endpoint.encoding(*channel) else { continue };
                let Some(domain) = self.endpoint_domains[side].get(channel) else { continue };
                if FieldRef::of(other) != FieldRef::of(enc) || own_kind.is_some_and(|k| k != domain.is_continuous()) {
                    continue;
                }
                union = Some(match union {
                    None => domain.clone(),
                    Some(u) => union_domains(&u, domain).unwrap_or(u),
                });
            }
            let degenerate = matches!(union, Some(Domain::Continuous { min, max }) if min >= max);
            if let (Some(domain), false) = (union, degenerate) {
                enc.scale.domain = Some(domain);
            }
        }
        chart
    }

    pub fn synthesize(&mut self, partition: &OrderedPartition) -> Result<KeyframeSequence, KeyframeError> {
        let mut keyframes = vec![self.start.clone()];
        let mut mask = 0u64;
        let last = partition.blocks.len().saturating_sub(1);
        for (i, block) in partition.blocks.iter().enumerate() {
            for &op in block {
                mask |= 1 << op;
            }
            if i == last {
                break;
            }
            let chart = self
                .intermediate(mask)
                .map_err(|source| KeyframeError::InvalidIntermediate { index: i + 1, source })?;
            keyframes.push(chart);
        }
        keyframes.push(self.end.clone());
        let view: Vec<Vec<&EditOp>> = partition
            .blocks
            .iter()
            .map(|b| b.iter().map(|&i| &self.ops.ops[i]).collect())
            .collect();
        Ok(KeyframeSequence {
            keyframes,
            blocks: partition.ids(self.ops),
            partition: partition.clone(),
            score: score_partition(&view, &self.rules),
        })
    }
}

/// Apply `partition`'s blocks cumulatively from `start`, rewriting the
/// scale domains of every intermediate chart, and score the result.
pub fn synthesize_sequence(
    start: &ChartSpec,
    end: &ChartSpec,
    ops: &EditOpSet,
    partition: &OrderedPartition,
) -> Result<KeyframeSequence, KeyframeError> {
    Synthesizer::new(start, end, ops).synthesize(partition)
}
