//! Decision-dependent probability arithmetic: the affine shift
//! p_s(y) = pbar_s + k * sum_a delta_sa y_a, plus the largest magnitude
//! multiplier that keeps every binary activation pattern valid.

use super::{FirstStageDesign, Instance, ModelError};

/// Probability vector induced by a first-stage design.
pub fn ddu_probability(
    instance: &Instance,
    design: &FirstStageDesign,
) -> Result<Vec<f64>, ModelError> {
    let ddu = &instance.ddu;
    let mut probs = Vec::with_capacity(instance.num_scenarios());
    for (s, scen) in instance.scenarios.iter().enumerate() {
        let mut shift = 0.0;
        for (a, &on) in design.arcs_on.iter().enumerate() {
            if on {
                shift += ddu.delta[s][a];
            }
        }
        let p = scen.base_prob + ddu.k * shift;
        if p < -1e-9 {
            return Err(ModelError::InvalidProbability { scenario: s, value: p });
        }
        probs.push(p);
    }
    Ok(probs)
}

/// Probability vector at an explicit magnitude multiplier, ignoring the
/// instance's own `k`. Used by the parametric sweeps.
pub fn ddu_probability_at_k(
    instance: &Instance,
    design: &FirstStageDesign,
    k: f64,
) -> Result<Vec<f64>, ModelError> {
    let mut scaled = instance.clone();
    scaled.ddu.k = k;
    ddu_probability(&scaled, design)
}

/// Largest multiplier consistent with probability validity for every binary
/// activation pattern: min over scenarios of pbar_s over the worst-case
/// negative shift. Plus infinity when no scenario can shift down.
pub fn ddu_k_max(instance: &Instance) -> f64 {
    let mut k_max = f64::INFINITY;
    for (s, scen) in instance.scenarios.iter().enumerate() {
        let neg: f64 = instance.ddu.delta[s].iter().map(|&d| d.min(0.0)).sum();
        if neg < 0.0 {
            k_max = k_max.min(scen.base_prob / -neg);
        }
    }
    k_max
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::gen;

    #[test]
    fn zero_k_returns_baselines() {
        let mut instance = gen::toy_instance();
        instance.ddu.k = 0.0;
        let design = FirstStageDesign::all_on_full_storage(&instance);
        let p = ddu_probability(&instance, &design).unwrap();
        assert_eq!(p, instance.base_probs());
    }

    #[test]
    fn all_off_returns_baselines() {
        let instance = gen::toy_instance();
        let design = FirstStageDesign::all_off(&instance);
        let p = ddu_probability(&instance, &design).unwrap();
        assert_eq!(p, instance.base_probs());
    }

    #[test]
    fn k_max_infinite_for_zero_matrix() {
        let mut instance = gen::toy_instance();
        for row in instance.ddu.delta.iter_mut() {
            for d in row.iter_mut() {
                *d = 0.0;
            }
        }
        assert!(ddu_k_max(&instance).is_infinite());
    }

    #[test]
    fn k_max_single_binding_scenario() {
        // One scenario with pbar 0.05 whose worst-case shift is -0.01.
        let mut instance = gen::toy_instance();
        let na = instance.num_arcs();
        for row in instance.ddu.delta.iter_mut() {
            for d in row.iter_mut() {
                *d = 0.0;
            }
        }
        instance.scenarios[0].base_prob = 0.05;
        instance.scenarios[1].base_prob = 0.95;
        for s in 2..instance.num_scenarios() {
            instance.scenarios[s].base_prob = 0.0;
        }
        instance.ddu.delta[0][0] = -0.004;
        instance.ddu.delta[0][1] = -0.006;
        instance.ddu.delta[1][0] = 0.004;
        instance.ddu.delta[1][1] = 0.006;
        instance.ddu.k = 1.0;
        assert!(na >= 2);
        assert!((ddu_k_max(&instance) - 5.0).abs() < 1e-12);

        // Exactness: at k = k_max the minimum probability over all binary
        // activation patterns is zero (within float dust).
        instance.ddu.k = ddu_k_max(&instance);
        let mut min_p = f64::INFINITY;
        for mask in 0u32..(1 << na) {
            let design = FirstStageDesign {
                arcs_on: (0..na).map(|a| mask & (1 << a) != 0).collect(),
                inventory: instance.nodes.iter().map(|n| vec![0.0; n.supply.len()]).collect(),
            };
            let p = ddu_probability(&instance, &design).unwrap();
            for v in p {
                min_p = min_p.min(v);
            }
        }
        assert!(min_p.abs() <= 1e-12, "min probability at k_max was {min_p}");
    }
}
