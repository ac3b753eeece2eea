//! Shared fixtures for the criterion benches.

use qhom::counting::{Evaluator, PenaltySpec};
use qhom::graph::{ActingGroup, Element, Model};
use qhom::GeneratorSet;

/// An evaluator on the Farey corridor with a short `ω` through `0/1`.
pub fn farey_evaluator() -> Evaluator {
    let spec = PenaltySpec::parse("model = farey-corridor\nschedule = 0,1\nomega = 0/1; 1/0; 1/1; 1/2\n")
        .expect("valid spec");
    Evaluator::new(spec, ActingGroup::for_model(Model::Farey, Some(GeneratorSet::standard()))).expect("evaluator")
}

/// An evaluator on the rank-2 tree corridor.
pub fn tree_evaluator() -> Evaluator {
    let spec = PenaltySpec::parse("model = tree-corridor:2\nschedule = 0,1\nomega = 1; a; a b^-1; a b^-1 a\n")
        .expect("valid spec");
    Evaluator::new(spec, ActingGroup::Free { rank: 2 }).expect("evaluator")
}

/// `word^power` evaluated in the evaluator's group.
pub fn element(ev: &Evaluator, word: &str, power: i64) -> Element {
    let w = ev.group().parse_word(word).expect("valid word");
    ev.group().evaluate(&w).expect("evaluates").pow(power)
}
