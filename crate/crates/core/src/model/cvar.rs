//! Conditional value-at-risk of a discrete cost distribution, computed in
//! closed form by sorting and locating the alpha-quantile. Agrees with the
//! auxiliary-variable LP form; the LP equivalence is exercised in tests.

/// Returns (cvar, var_threshold) at confidence level `alpha` for scenario
/// costs under the given probabilities. The threshold reported is the
/// smallest minimizer of nu + (1/(1-alpha)) * sum p * max(c - nu, 0).
pub fn cvar_of_costs(probs: &[f64], costs: &[f64], alpha: f64) -> (f64, f64) {
    assert_eq!(probs.len(), costs.len(), "probability and cost vectors must align");
    assert!(!probs.is_empty(), "cvar of an empty distribution");
    assert!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    let tail = 1.0 - alpha;

    let mut order: Vec<usize> = (0..costs.len()).collect();
    order.sort_by(|&i, &j| costs[j].partial_cmp(&costs[i]).unwrap().then(i.cmp(&j)));

    let mut remaining = tail;
    let mut acc = 0.0;
    let mut var = costs[order[0]];
    let tie_eps = 1e-12 * tail.max(1.0);
    for (rank, &i) in order.iter().enumerate() {
        let p = probs[i];
        if p <= 0.0 {
            continue;
        }
        if p < remaining - tie_eps {
            acc += p * costs[i];
            remaining -= p;
        } else {
            acc += remaining.min(p) * costs[i];
            // Atom exactly fills the tail: the minimizer region is flat down
            // to the next distinct cost; report its lower end.
            if (p - remaining).abs() <= tie_eps {
                var = order
                    .get(rank + 1..)
                    .and_then(|rest| rest.iter().find(|&&j| probs[j] > 0.0))
                    .map(|&j| costs[j])
                    .unwrap_or(costs[i]);
            } else {
                var = costs[i];
            }
            remaining = 0.0;
            break;
        }
    }
    if remaining > tie_eps {
        // Probabilities summed below the tail mass; treat the distribution
        // as exhausted at its minimum cost atom.
        let last = *order.last().unwrap();
        acc += remaining * costs[last];
        var = costs[last];
    }
    (acc / tail, var)
}

/// Number of scenarios whose cost strictly exceeds the threshold.
pub fn tail_scenario_count(costs: &[f64], var_threshold: f64) -> usize {
    costs.iter().filter(|&&c| c > var_threshold + 1e-9).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE_COSTS: [f64; 9] = [
        19450.00, 47592.75, 58171.00, 63187.00, 19450.00, 70211.88, 42709.25, 65953.00, 39458.20,
    ];
    const BASE_PROBS: [f64; 9] = [0.15, 0.20, 0.15, 0.10, 0.10, 0.08, 0.10, 0.07, 0.05];

    #[test]
    fn degenerate_distribution() {
        let (cvar, var) = cvar_of_costs(&[0.3, 0.7], &[5.0, 5.0], 0.9);
        assert_eq!(cvar, 5.0);
        assert_eq!(var, 5.0);
    }

    #[test]
    fn single_atom_tail_saturates_at_max() {
        let (cvar, var) = cvar_of_costs(&BASE_PROBS, &BASE_COSTS, 0.95);
        assert!((cvar - 70211.88).abs() < 1e-9);
        assert!((var - 70211.88).abs() < 1e-9);
    }

    #[test]
    fn median_tail_has_four_exceedances() {
        let (_, var) = cvar_of_costs(&BASE_PROBS, &BASE_COSTS, 0.50);
        assert!((var - 47592.75).abs() < 1e-9);
        assert_eq!(tail_scenario_count(&BASE_COSTS, var), 4);
    }

    #[test]
    fn exact_tie_reports_smallest_minimizer() {
        let (cvar, var) = cvar_of_costs(&[0.5, 0.5], &[1.0, 2.0], 0.5);
        assert!((cvar - 2.0).abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cvar_dominates_mean() {
        let mean: f64 = BASE_PROBS.iter().zip(&BASE_COSTS).map(|(p, c)| p * c).sum();
        for alpha in [0.5, 0.7, 0.9, 0.95, 0.99] {
            let (cvar, _) = cvar_of_costs(&BASE_PROBS, &BASE_COSTS, alpha);
            assert!(cvar >= mean - 1e-9);
        }
    }
}
