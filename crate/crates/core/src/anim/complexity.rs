use super::{AnimStepSpec, Component};

pub fn component_weight(c: Component) -> f64 {
    match c {
        Component::Data => 3.0,
        Component::Marks => 2.0,
        Component::AxisX | Component::AxisY | Component::LegendColor | Component::LegendSize => 1.0,
    }
}

/// Effort to follow one step: each stage contributes the sum of its
/// component weights, scaled by `1 + 0.5 (n - 1)` for `n` simultaneous
/// components.
pub fn complexity(spec: &AnimStepSpec) -> f64 {
    spec.stages
        .iter()
        .map(|stage| {
            let n = stage.components.len();
            if n == 0 {
                return 0.0;
            }
            let weight: f64 = stage.components.iter().copied().map(component_weight).sum();
            weight * (1.0 + 0.5 * (n as f64 - 1.0))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anim::Stage;

    fn step(stages: &[&[Component]]) -> AnimStepSpec {
        AnimStepSpec {
            stages: stages.iter().map(|s| Stage::new(s.iter().copied())).collect(),
        }
    }

    #[test]
    fn documented_values() {
        assert_eq!(complexity(&step(&[&[Component::AxisX]])), 1.0);
        assert_eq!(complexity(&step(&[&[Component::Data, Component::Marks]])), 7.5);
        assert_eq!(complexity(&step(&[&[Component::Data], &[Component::Marks]])), 5.0);
        assert_eq!(complexity(&step(&[&[]])), 0.0);
    }
}
