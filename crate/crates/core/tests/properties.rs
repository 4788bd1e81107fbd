mod common;

use gtd_core::grammar::{construction_of, random_ast, Descriptor, Fraction, Relation};
use gtd_core::metrics::{bleu4_sentence, bleu_tokens, diversity_ratio};
use gtd_core::semantics::{evaluate, relation_holds, Proposition};
use gtd_core::worldmodel::{
    overlap_ratio, sample_world, Color, Entity, Point, Shape, Size, Task, WorldModel, WorldSpec,
    DEFAULT_OVERLAP_THRESHOLD,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn shape() -> impl Strategy<Value = Shape> {
    prop::sample::select(Shape::ALL.to_vec())
}

fn color() -> impl Strategy<Value = Color> {
    prop::sample::select(Color::ALL.to_vec())
}

fn entity() -> impl Strategy<Value = Entity> {
    (
        shape(),
        color(),
        0.1..0.9f64,
        0.1..0.9f64,
        0.08..0.25f64,
        0.08..0.25f64,
        0.0..360.0f64,
    )
        .prop_map(|(shape, color, x, y, w, h, rotation)| Entity {
            shape,
            color,
            center: Point { x, y },
            size: Size { w, h },
            rotation,
        })
}

/// Entities on a coarse grid with a small palette, so descriptors often match.
fn small_world() -> impl Strategy<Value = WorldModel> {
    prop::collection::vec(
        (0..3usize, 0..3usize, 0..4u8, 0..4u8).prop_map(|(s, c, x, y)| {
            common::entity(
                [Shape::Square, Shape::Circle, Shape::Cross][s],
                [Color::Red, Color::Green, Color::Blue][c],
                0.1 + f64::from(x) * 0.25,
                0.1 + f64::from(y) * 0.25,
            )
        }),
        0..8,
    )
    .prop_map(common::world)
}

fn descriptor() -> impl Strategy<Value = Descriptor> {
    (
        prop::option::of(prop::sample::select(vec![
            Shape::Square,
            Shape::Circle,
            Shape::Cross,
        ])),
        prop::option::of(prop::sample::select(vec![
            Color::Red,
            Color::Green,
            Color::Blue,
        ])),
    )
        .prop_map(|(s, c)| Descriptor::new(s, c))
}

proptest! {
    #[test]
    fn overlap_is_symmetric_and_bounded(a in entity(), b in entity()) {
        let ab = overlap_ratio(&a, &b);
        prop_assert_eq!(ab, overlap_ratio(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn bleu_ignores_reference_order(seed in any::<u64>(), rot in 0usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let refs: Vec<Vec<String>> = (0..10)
            .map(|_| bleu_tokens(&gtd_core::grammar::realize(&random_ast(&mut rng), &mut rng)))
            .collect();
        let cand = refs[3].clone();
        let mut rotated = refs.clone();
        rotated.rotate_left(rot);
        rotated.reverse();
        let other = bleu_tokens("There is a red square.");
        prop_assert_eq!(bleu4_sentence(&cand, &refs), bleu4_sentence(&cand, &rotated));
        prop_assert_eq!(bleu4_sentence(&other, &refs), bleu4_sentence(&other, &rotated));
    }

    #[test]
    fn diversity_ignores_duplicates(seed in any::<u64>(), n in 1usize..30, dup in 1usize..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cands: Vec<_> = (0..n).map(|_| construction_of(&random_ast(&mut rng))).collect();
        let refs: Vec<_> = (0..n).map(|_| construction_of(&random_ast(&mut rng))).collect();
        let base = diversity_ratio(cands.clone(), refs.clone()).unwrap();
        let repeated = cands.iter().cycle().take(n * (dup + 1)).cloned();
        prop_assert_eq!(base, diversity_ratio(repeated, refs).unwrap());
    }

    #[test]
    fn ratio_survives_duplicating_every_entity(
        w in small_world(), r in descriptor(), b in descriptor(), f in 0usize..5,
    ) {
        let p = Proposition::RatioEq { fraction: Fraction::ALL[f], restrictor: r, body: b };
        let mut doubled = w.clone();
        doubled.entities.extend(w.entities.iter().cloned());
        prop_assert_eq!(evaluate(&p, &w), evaluate(&p, &doubled));
    }

    #[test]
    fn exactly_one_count_holds(w in small_world(), r in descriptor(), b in descriptor()) {
        let holding = (0..=16u32)
            .filter(|&number| evaluate(&Proposition::CountEq { number, restrictor: r, body: b }, &w))
            .count();
        prop_assert_eq!(holding, 1);
    }

    #[test]
    fn relations_are_antisymmetric(
        ax in 0.0..1.0f64, ay in 0.0..1.0f64, bx in 0.0..1.0f64, by in 0.0..1.0f64, r in 0usize..4,
    ) {
        let (a, b) = (Point { x: ax, y: ay }, Point { x: bx, y: by });
        let rel = Relation::ALL[r];
        prop_assert!(!(relation_holds(rel, a, b) && relation_holds(rel, b, a)));
        prop_assert_eq!(relation_holds(rel, a, b), relation_holds(rel.inverse(), b, a));
        prop_assert!(!relation_holds(rel, a, a));
    }
}

#[test]
fn sampled_worlds_are_valid_for_ten_thousand_seeds() {
    for seed in 0..10_000u64 {
        let task = Task::ALL[seed as usize % Task::ALL.len()];
        let spec = WorldSpec::for_task(task);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = sample_world(&spec, format!("w{seed}"), &mut rng).unwrap();
        assert!(spec.entity_count.contains(&w.entities.len()), "seed {seed}");
        w.validate(DEFAULT_OVERLAP_THRESHOLD)
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let back: WorldModel = serde_json::from_str(&w.to_json_line()).unwrap();
        assert_eq!(back, w, "seed {seed}");
    }
}
