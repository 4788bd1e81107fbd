//! Naive reference evaluator, written straight from the quantifier definitions and kept
//! separate from [`super::evaluate`] so the two can be checked against each other.
//!
//! Counting goes through subset enumeration: the entities satisfying a predicate are
//! exactly `k` in number iff `2^k` subsets consist only of satisfying entities.

use crate::grammar::{Descriptor, Relation};
use crate::worldmodel::{Entity, WorldModel};

use super::Proposition;

/// Worlds beyond this size are not enumerable here.
pub const MAX_ORACLE_ENTITIES: usize = 16;

fn has(e: &Entity, d: &Descriptor) -> bool {
    let shape_ok = match d.shape {
        None => true,
        Some(s) => s == e.shape,
    };
    let color_ok = match d.color {
        None => true,
        Some(c) => c == e.color,
    };
    shape_ok && color_ok
}

fn stands_in(relation: Relation, a: &Entity, b: &Entity) -> bool {
    let dx = b.center.x - a.center.x;
    let dy = b.center.y - a.center.y;
    match relation {
        Relation::Above => dy > 0.0,
        Relation::Below => dy < 0.0,
        Relation::LeftOf => dx > 0.0,
        Relation::RightOf => dx < 0.0,
    }
}

/// Size of `{e : pred(e)}` via subset enumeration.
fn cardinality(entities: &[Entity], pred: impl Fn(&Entity) -> bool) -> u32 {
    assert!(
        entities.len() <= MAX_ORACLE_ENTITIES,
        "world too large for the oracle"
    );
    let all_satisfying = (0u32..1 << entities.len())
        .filter(|mask| {
            entities
                .iter()
                .enumerate()
                .all(|(i, e)| mask & (1 << i) == 0 || pred(e))
        })
        .count();
    all_satisfying.trailing_zeros()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn oracle_evaluate(p: &Proposition, w: &WorldModel) -> bool {
    let es = &w.entities;
    match p {
        Proposition::Exists(d) => {
            for e in es {
                if has(e, d) {
                    return true;
                }
            }
            false
        }
        Proposition::ExistsPair {
            relation,
            subject,
            object,
        } => {
            for (i, a) in es.iter().enumerate() {
                for (j, b) in es.iter().enumerate() {
                    if i != j && has(a, subject) && has(b, object) && stands_in(*relation, a, b) {
                        return true;
                    }
                }
            }
            false
        }
        Proposition::CountEq {
            number,
            restrictor,
            body,
        } => cardinality(es, |e| has(e, restrictor) && has(e, body)) == *number,
        Proposition::RatioEq {
            fraction,
            restrictor,
            body,
        } => {
            let total = cardinality(es, |e| has(e, restrictor));
            let hits = cardinality(es, |e| has(e, restrictor) && has(e, body));
            if total == 0 {
                return false;
            }
            let g = gcd(hits, total);
            // 0/n reduces to 0/1, which is never one of the fractions
            (hits / g, total / g) == (fraction.num, fraction.den)
        }
        Proposition::Unsatisfiable { .. } => false,
    }
}
