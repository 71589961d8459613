//! Change detection and the reaction to a detected change.

use super::de::Evaluate;
use super::method::{DiversityMechanism, HyperState};
use crate::rng::RngStream;
use crate::types::{clamp_to_bounds, Bounds, Population, Position};

/// Re-evaluates the first and middle members and reports whether either
/// objective or violation differs from the cached values. Exact comparison.
///
/// An unchanged sentinel has its cached evaluation refreshed so its time
/// index follows the environment. A change that leaves both sentinel values
/// identical goes unnoticed.
pub fn detect_change<E: Evaluate + ?Sized>(pop: &mut Population, evaluator: &mut E) -> bool {
    let [first, middle] = pop.sentinel_indices();
    let sentinels: &[usize] = if first == middle { &[first] } else { &[first, middle] };
    let mut changed = false;
    for &idx in sentinels {
        let member = &mut pop.members[idx];
        let fresh = evaluator.evaluate(&member.position);
        if fresh.objective != member.eval.objective || fresh.violation != member.eval.violation {
            changed = true;
        } else {
            member.eval = fresh;
        }
    }
    changed
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReactionOutcome {
    pub random_inserted: usize,
    pub predicted_inserted: usize,
    pub reevaluated: usize,
}

/// Reacts to a detected change.
///
/// 1. The diversity action replaces the feasibility-worst members (ranked on
///    the stale cached values) with uniform random positions and, for
///    hyper-mutation, switches the enlarged parameters on.
/// 2. Predicted positions, when given, replace the worst members not touched
///    by step 1. Under a full restart they overwrite random members instead.
/// 3. Every member is re-evaluated in the current environment.
pub fn react<E: Evaluate + ?Sized>(
    pop: &mut Population,
    diversity: &DiversityMechanism,
    predicted: Option<&[Position]>,
    hyper: &mut HyperState,
    bounds: Bounds,
    evaluator: &mut E,
    rng: &mut RngStream,
) -> ReactionOutcome {
    let np = pop.len();
    let d = pop.members.first().map_or(0, |m| m.position.dim());
    let order = pop.worst_first();
    let mut touched = vec![false; np];
    let n_random = diversity.random_insertions(np);
    for &i in order.iter().take(n_random) {
        pop.members[i].position = rng.random_position(d, bounds);
        touched[i] = true;
    }
    if let DiversityMechanism::HyperMutation { duration_generations, .. } = *diversity {
        hyper.activate(duration_generations);
    }

    let mut predicted_inserted = 0;
    if let Some(predicted) = predicted {
        let fresh = order.iter().filter(|&&i| !touched[i]);
        let reused = order.iter().filter(|&&i| touched[i]);
        for (&i, p) in fresh.chain(reused).zip(predicted) {
            pop.members[i].position = clamp_to_bounds(p, bounds);
            predicted_inserted += 1;
        }
    }

    for member in pop.members.iter_mut() {
        member.eval = evaluator.evaluate(&member.position);
    }
    ReactionOutcome {
        random_inserted: n_random,
        predicted_inserted,
        reevaluated: np,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::{Evaluation, Individual};

    fn population(np: usize, d: usize) -> Population {
        Population::new(
            (0..np)
                .map(|k| {
                    Individual::new(
                        Position::filled(d, 0.01 * k as f64),
                        Evaluation {
                            objective: k as f64,
                            violation: 0.0,
                            time_index: 0,
                        },
                    )
                })
                .collect(),
        )
    }

    struct Counting {
        shift: f64,
        calls: usize,
    }

    impl Evaluate for Counting {
        fn evaluate(&mut self, x: &[f64]) -> Evaluation {
            self.calls += 1;
            Evaluation {
                objective: x.iter().sum::<f64>() + self.shift,
                violation: 0.0,
                time_index: 1,
            }
        }
    }

    #[test]
    fn frozen_environment_is_not_a_change() {
        let mut pop = population(20, 3);
        let mut ev = Counting { shift: 0.0, calls: 0 };
        for m in pop.members.iter_mut() {
            m.eval = ev.evaluate(&m.position);
        }
        ev.calls = 0;
        assert!(!detect_change(&mut pop, &mut ev));
        assert_eq!(ev.calls, 2);
        ev.shift = 1.0;
        assert!(detect_change(&mut pop, &mut ev));
    }

    #[test]
    fn restart_replaces_everything() {
        let mut pop = population(20, 3);
        let before = pop.clone();
        let mut ev = Counting { shift: 0.0, calls: 0 };
        let mut h = HyperState::default();
        let out = react(
            &mut pop,
            &DiversityMechanism::Restart,
            None,
            &mut h,
            Bounds::default(),
            &mut ev,
            &mut RngStream::new(0, 3),
        );
        assert_eq!(out.random_inserted, 20);
        assert_eq!(ev.calls, 20);
        for (a, b) in pop.members.iter().zip(&before.members) {
            assert_ne!(a.position, b.position);
            assert_eq!(a.eval.time_index, 1);
        }
    }

    #[test]
    fn predictor_and_immigrants_replace_seven() {
        let mut pop = population(20, 3);
        let before = pop.clone();
        let predicted = vec![Position::filled(3, 4.5); 5];
        let mut ev = Counting { shift: 0.0, calls: 0 };
        let mut h = HyperState::default();
        let out = react(
            &mut pop,
            &DiversityMechanism::RandomImmigrants { rate: 2 },
            Some(&predicted),
            &mut h,
            Bounds::default(),
            &mut ev,
            &mut RngStream::new(0, 3),
        );
        assert_eq!((out.random_inserted, out.predicted_inserted), (2, 5));
        assert_eq!(pop.len(), 20);
        let changed = pop
            .members
            .iter()
            .zip(&before.members)
            .filter(|(a, b)| a.position != b.position)
            .count();
        assert_eq!(changed, 7);
        // worst = highest objective: 19, 18 random; 17..13 predicted
        for i in 13..18 {
            assert_eq!(pop.members[i].position, predicted[0]);
        }
        assert_eq!(ev.calls, 20);
    }

    #[test]
    fn hyper_mutation_activates() {
        let mut pop = population(20, 3);
        let mut ev = Counting { shift: 0.0, calls: 0 };
        let mut h = HyperState::default();
        let div = DiversityMechanism::HyperMutation {
            rate: 7,
            f_range: (0.6, 0.8),
            cr: 0.7,
            duration_generations: 6,
        };
        react(&mut pop, &div, None, &mut h, Bounds::default(), &mut ev, &mut RngStream::new(0, 3));
        assert_eq!(h.generations_remaining, 6);
    }
}
