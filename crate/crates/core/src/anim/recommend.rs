use super::{changed_components, complexity, AnimError, AnimStepSpec, AnimationPlanCandidate, Component, Stage};
use crate::partitions::ordered_partitions;
use crate::spec::ChartSpec;

/// Guides may not change before the data stage they depend on.
fn guide_follows_data(stages: &[Stage]) -> bool {
    let Some(data) = stages.iter().position(|s| s.components.contains(&Component::Data)) else {
        return true;
    };
    stages[..data].iter().all(|s| s.components.iter().all(|c| !c.is_guide()))
}

/// Every staging of the components changed between `a` and `b`, with
/// default timing. Equal charts yield one pass-through step with an empty
/// stage.
pub fn enumerate_pair_specs(a: &ChartSpec, b: &ChartSpec) -> Vec<AnimStepSpec> {
    let changed: Vec<Component> = changed_components(a, b).into_iter().collect();
    if changed.is_empty() {
        return vec![AnimStepSpec { stages: vec![Stage::new([])] }];
    }
    ordered_partitions(changed.len(), changed.len())
        .into_iter()
        .map(|blocks| {
            blocks
                .into_iter()
                .map(|block| Stage::new(block.into_iter().map(|i| changed[i])))
                .collect::<Vec<_>>()
        })
        .filter(|stages| guide_follows_data(stages))
        .map(|stages| AnimStepSpec { stages })
        .collect()
}

pub fn total_complexity(steps: &[AnimStepSpec]) -> f64 {
    steps.iter().map(complexity).sum()
}

fn serialization(plan: &AnimationPlanCandidate) -> String {
    plan.to_json(0)["steps"].to_string()
}

/// Plans whose stage counts add up to exactly `stages`, lowest total
/// complexity first. At most `top_k` are returned.
pub fn recommend_animations(
    keyframes: &[ChartSpec],
    stages: usize,
    top_k: usize,
) -> Result<Vec<AnimationPlanCandidate>, AnimError> {
    if keyframes.len() < 2 {
        return Err(AnimError::TooFewKeyframes);
    }
    let per_pair: Vec<Vec<AnimStepSpec>> = keyframes.windows(2).map(|w| enumerate_pair_specs(&w[0], &w[1])).collect();
    let min_of = |g: &[AnimStepSpec]| g.iter().map(AnimStepSpec::stage_count).min().unwrap_or(0);
    let max_of = |g: &[AnimStepSpec]| g.iter().map(AnimStepSpec::stage_count).max().unwrap_or(0);
    let min: usize = per_pair.iter().map(|g| min_of(g)).sum();
    let max: usize = per_pair.iter().map(|g| max_of(g)).sum();
    let infeasible = AnimError::InfeasibleBudget {
        requested: stages,
        min,
        max,
    };
    if stages < min || stages > max {
        return Err(infeasible);
    }
    // suffix bounds on the stages still to place
    let mut rest_min = vec![0; per_pair.len() + 1];
    let mut rest_max = vec![0; per_pair.len() + 1];
    for j in (0..per_pair.len()).rev() {
        rest_min[j] = rest_min[j + 1] + min_of(&per_pair[j]);
        rest_max[j] = rest_max[j + 1] + max_of(&per_pair[j]);
    }
    let mut plans = Vec::new();
    let mut chosen: Vec<&AnimStepSpec> = Vec::new();
    cross_join(&per_pair, 0, stages, &rest_min, &rest_max, &mut chosen, &mut plans);
    if plans.is_empty() {
        return Err(infeasible);
    }
    let mut keyed: Vec<(String, AnimationPlanCandidate)> = plans.into_iter().map(|p| (serialization(&p), p)).collect();
    keyed.sort_by(|(ka, a), (kb, b)| {
        a.total_complexity
            .total_cmp(&b.total_complexity)
            .then_with(|| ka.cmp(kb))
    });
    keyed.truncate(top_k);
    Ok(keyed.into_iter().map(|(_, p)| p).collect())
}

fn cross_join<'a>(
    per_pair: &'a [Vec<AnimStepSpec>],
    j: usize,
    remaining: usize,
    rest_min: &[usize],
    rest_max: &[usize],
    chosen: &mut Vec<&'a AnimStepSpec>,
    out: &mut Vec<AnimationPlanCandidate>,
) {
    if j == per_pair.len() {
        if remaining == 0 {
            out.push(AnimationPlanCandidate::new(chosen.iter().map(|s| (*s).clone()).collect()));
        }
        return;
    }
    for spec in &per_pair[j] {
        let n = spec.stage_count();
        if n > remaining || remaining - n < rest_min[j + 1] || remaining - n > rest_max[j + 1] {
            continue;
        }
        chosen.push(spec);
        cross_join(per_pair, j + 1, remaining - n, rest_min, rest_max, chosen, out);
        chosen.pop();
    }
}
