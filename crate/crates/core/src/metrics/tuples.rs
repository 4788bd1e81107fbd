//! SPICE-style scene tuple matching against the union of the reference tuples.

use std::collections::BTreeSet;

use crate::grammar::CaptionAst;
use crate::semantics::{scene_tuples, SceneTuple};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TupleScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl TupleScore {
    pub const ZERO: TupleScore = TupleScore {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
}

/// Union of the reference tuple sets. Each caption already numbers its objects from 1.
pub fn reference_union(references: &[CaptionAst]) -> BTreeSet<SceneTuple> {
    references.iter().flat_map(scene_tuples).collect()
}

/// Matches candidate tuples against the reference union, aligning the candidate's object
/// ids by whichever bijection (identity or swap) matches the most tuples.
///
/// `None` stands for an ungrammatical candidate and scores zero. An empty candidate tuple
/// set is vacuously precise.
pub fn tuple_f1(candidate: Option<&CaptionAst>, references: &[CaptionAst]) -> TupleScore {
    let Some(candidate) = candidate else {
        return TupleScore::ZERO;
    };
    let union = reference_union(references);
    let cand = scene_tuples(candidate);

    let swap = |o: u8| match o {
        1 => 2,
        2 => 1,
        other => other,
    };
    let count = |map: &dyn Fn(u8) -> u8| {
        cand.iter()
            .filter(|t| union.contains(&t.renumbered(map)))
            .count()
    };
    let matched = count(&|o| o).max(count(&swap));

    let precision = if cand.is_empty() {
        1.0
    } else {
        matched as f64 / cand.len() as f64
    };
    let recall = if union.is_empty() {
        1.0
    } else {
        matched as f64 / union.len() as f64
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    TupleScore {
        precision,
        recall,
        f1,
    }
}
