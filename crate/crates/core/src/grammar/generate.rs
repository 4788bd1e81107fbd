use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use super::{
    body_is_informative, parse, realize, CaptionAst, Descriptor, DescriptorKind, Fraction,
    Relation, MAX_NUMBER,
};
use crate::semantics::{count_matching, evaluate, matches, relation_holds, to_proposition};
use crate::worldmodel::{Color, Entity, Shape, Task, WorldModel, WorldSpec};

/// Rejection-sampling budget per caption before the world is declared unusable.
pub const MAX_CAPTION_ATTEMPTS: usize = 200;
pub const ZERO_COUNT_PROBABILITY: f64 = 0.05;

/// Reference captions never use a bare "shape" descriptor for the described object.
const REFERENCE_KINDS: [DescriptorKind; 3] = [
    DescriptorKind::Shape,
    DescriptorKind::Color,
    DescriptorKind::ColorShape,
];

/// Restrictor and body kinds for quantified captions.
const QUANTIFIED_KIND_PAIRS: [(DescriptorKind, DescriptorKind); 5] = [
    (DescriptorKind::Shape, DescriptorKind::Color),
    (DescriptorKind::Generic, DescriptorKind::Shape),
    (DescriptorKind::Generic, DescriptorKind::Color),
    (DescriptorKind::Generic, DescriptorKind::ColorShape),
    (DescriptorKind::Color, DescriptorKind::Shape),
];

#[derive(Debug, Error, PartialEq)]
pub enum GenerateError {
    #[error("world {id} has {found} entities, task {task} expects {expected}")]
    WorldMismatch {
        id: String,
        task: Task,
        found: usize,
        expected: String,
    },
    #[error("no true {task} caption for world {id} after {attempts} attempts")]
    Exhausted {
        id: String,
        task: Task,
        attempts: usize,
    },
    #[error("generated caption {caption:?} failed its self-check: {reason}")]
    SelfCheck { caption: String, reason: String },
}

fn describe(e: &Entity, kind: DescriptorKind) -> Descriptor {
    Descriptor {
        shape: kind.has_shape().then_some(e.shape),
        color: kind.has_color().then_some(e.color),
    }
}

fn random_of_kind<R: Rng + ?Sized>(kind: DescriptorKind, rng: &mut R) -> Descriptor {
    Descriptor {
        shape: kind.has_shape().then(|| *Shape::ALL.choose(rng).unwrap()),
        color: kind.has_color().then(|| *Color::ALL.choose(rng).unwrap()),
    }
}

fn existential<R: Rng + ?Sized>(world: &WorldModel, rng: &mut R) -> CaptionAst {
    let e = world.entities.choose(rng).expect("worlds are nonempty");
    match rng.gen_range(0..3) {
        0 => CaptionAst::ThereIs {
            object: describe(e, *REFERENCE_KINDS.choose(rng).unwrap()),
        },
        1 => {
            use DescriptorKind::*;
            let splits: &[(DescriptorKind, DescriptorKind)] = if rng.gen_bool(0.5) {
                &[(Generic, Shape)]
            } else {
                &[(Generic, ColorShape), (Color, Shape), (Shape, Color)]
            };
            let (subject, predicate) = *splits.choose(rng).unwrap();
            CaptionAst::IsA {
                subject: describe(e, subject),
                predicate: describe(e, predicate),
            }
        }
        _ => CaptionAst::IsColor {
            subject: Descriptor::shape(e.shape),
            color: e.color,
        },
    }
}

/// Spatial captions use descriptors that pick out exactly one entity each.
fn spatial<R: Rng + ?Sized>(world: &WorldModel, rng: &mut R) -> Option<CaptionAst> {
    let n = world.entities.len();
    if n < 2 {
        return None;
    }
    for _ in 0..MAX_CAPTION_ATTEMPTS {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let (a, b) = (&world.entities[i], &world.entities[j]);
        let relations: Vec<Relation> = Relation::ALL
            .into_iter()
            .filter(|r| relation_holds(*r, a.center, b.center))
            .collect();
        let unique_kinds = |e: &Entity| -> Vec<DescriptorKind> {
            REFERENCE_KINDS
                .into_iter()
                .filter(|k| count_matching(world, &describe(e, *k)) == 1)
                .collect()
        };
        let (subject_kinds, object_kinds) = (unique_kinds(a), unique_kinds(b));
        let (Some(relation), Some(sk), Some(ok)) = (
            relations.choose(rng),
            subject_kinds.choose(rng),
            object_kinds.choose(rng),
        ) else {
            continue;
        };
        return Some(CaptionAst::Spatial {
            relation: *relation,
            subject: describe(a, *sk),
            object: describe(b, *ok),
        });
    }
    None
}

fn intersection_size(world: &WorldModel, restrictor: &Descriptor, body: &Descriptor) -> usize {
    world
        .entities
        .iter()
        .filter(|e| matches(e, restrictor) && matches(e, body))
        .count()
}

fn count<R: Rng + ?Sized>(world: &WorldModel, rng: &mut R) -> Option<CaptionAst> {
    if rng.gen_bool(ZERO_COUNT_PROBABILITY) {
        for _ in 0..MAX_CAPTION_ATTEMPTS {
            let (rk, bk) = *QUANTIFIED_KIND_PAIRS.choose(rng).unwrap();
            let (restrictor, body) = (random_of_kind(rk, rng), random_of_kind(bk, rng));
            if intersection_size(world, &restrictor, &body) == 0 {
                return Some(CaptionAst::Count {
                    number: 0,
                    restrictor,
                    body,
                });
            }
        }
    }
    for _ in 0..MAX_CAPTION_ATTEMPTS {
        let (rk, bk) = *QUANTIFIED_KIND_PAIRS.choose(rng).unwrap();
        let e = world.entities.choose(rng)?;
        let (restrictor, body) = (describe(e, rk), describe(e, bk));
        let n = intersection_size(world, &restrictor, &body) as u32;
        if n <= MAX_NUMBER {
            return Some(CaptionAst::Count {
                number: n,
                restrictor,
                body,
            });
        }
    }
    None
}

fn ratio<R: Rng + ?Sized>(world: &WorldModel, rng: &mut R) -> Option<CaptionAst> {
    for _ in 0..MAX_CAPTION_ATTEMPTS {
        let (rk, bk) = *QUANTIFIED_KIND_PAIRS.choose(rng).unwrap();
        let e = world.entities.choose(rng)?;
        let (restrictor, body) = (describe(e, rk), describe(e, bk));
        let total = count_matching(world, &restrictor) as u32;
        let hits = intersection_size(world, &restrictor, &body) as u32;
        if let Some(fraction) = Fraction::ALL
            .into_iter()
            .find(|f| f.den * hits == f.num * total)
        {
            return Some(CaptionAst::Ratio {
                fraction,
                restrictor,
                body,
            });
        }
    }
    None
}

/// Generates a caption that is true of `world`, in the style of `task`.
pub fn generate_caption<R: Rng + ?Sized>(
    world: &WorldModel,
    task: Task,
    rng: &mut R,
) -> Result<(String, CaptionAst), GenerateError> {
    let range = WorldSpec::for_task(task).entity_count;
    if !range.contains(&world.entities.len()) {
        return Err(GenerateError::WorldMismatch {
            id: world.id.clone(),
            task,
            found: world.entities.len(),
            expected: format!("{}..={}", range.start(), range.end()),
        });
    }
    let ast = match task {
        Task::ExistentialOneShape | Task::ExistentialMultiShapes => Some(existential(world, rng)),
        Task::SpatialTwoShapes | Task::SpatialMultiShapes => spatial(world, rng),
        Task::QuantCount => count(world, rng),
        Task::QuantRatio => ratio(world, rng),
    }
    .ok_or_else(|| GenerateError::Exhausted {
        id: world.id.clone(),
        task,
        attempts: MAX_CAPTION_ATTEMPTS,
    })?;
    let caption = realize(&ast, rng);
    let self_check = |reason: &str| GenerateError::SelfCheck {
        caption: caption.clone(),
        reason: reason.to_string(),
    };
    if parse(&caption).as_ref() != Ok(&ast) {
        return Err(self_check("does not parse back to its AST"));
    }
    if !evaluate(&to_proposition(&ast), world) {
        return Err(self_check("is not true of the world"));
    }
    Ok((caption, ast))
}

/// A uniformly random sentence of the grammar, ignoring any world.
pub fn random_ast<R: Rng + ?Sized>(rng: &mut R) -> CaptionAst {
    let descriptors: Vec<Descriptor> = Descriptor::all().collect();
    let pick = |rng: &mut R| *descriptors.choose(rng).unwrap();
    match rng.gen_range(0..6) {
        0 => CaptionAst::ThereIs { object: pick(rng) },
        1 => CaptionAst::IsA {
            subject: pick(rng),
            predicate: pick(rng),
        },
        2 => CaptionAst::IsColor {
            subject: pick(rng),
            color: *Color::ALL.choose(rng).unwrap(),
        },
        3 => CaptionAst::Spatial {
            relation: *Relation::ALL.choose(rng).unwrap(),
            subject: pick(rng),
            object: pick(rng),
        },
        k => {
            // a fully specified restrictor leaves nothing for the body to add
            let restrictor = loop {
                let r = pick(rng);
                if r.kind() != DescriptorKind::ColorShape {
                    break r;
                }
            };
            let body = loop {
                let b = pick(rng);
                if body_is_informative(&restrictor, &b) {
                    break b;
                }
            };
            if k == 4 {
                CaptionAst::Count {
                    number: rng.gen_range(0..=MAX_NUMBER),
                    restrictor,
                    body,
                }
            } else {
                CaptionAst::Ratio {
                    fraction: *Fraction::ALL.choose(rng).unwrap(),
                    restrictor,
                    body,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::worldmodel::{sample_world, Point, Size};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn entity(shape: Shape, color: Color, x: f64, y: f64) -> Entity {
        Entity {
            shape,
            color,
            center: Point { x, y },
            size: Size { w: 0.1, h: 0.1 },
            rotation: 0.0,
        }
    }

    #[test]
    fn one_green_cross() {
        let world = WorldModel {
            id: "w".into(),
            entities: vec![entity(Shape::Cross, Color::Green, 0.5, 0.5)],
        };
        let allowed = [
            "There is a green cross.",
            "There is a cross.",
            "There is a green shape.",
            "A shape is a cross.",
            "A shape is a green cross.",
            "A green shape is a cross.",
            "A cross is a green shape.",
            "A cross is green.",
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..400 {
            let (caption, _) =
                generate_caption(&world, Task::ExistentialOneShape, &mut rng).unwrap();
            assert!(allowed.contains(&caption.as_str()), "{caption}");
            seen.insert(caption);
        }
        assert_eq!(seen.len(), allowed.len());
    }

    #[test]
    fn square_above_red_pentagon_is_reachable() {
        let world = WorldModel {
            id: "w".into(),
            entities: vec![
                entity(Shape::Square, Color::Blue, 0.3, 0.3),
                entity(Shape::Pentagon, Color::Red, 0.4, 0.7),
            ],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let captions: Vec<String> = (0..500)
            .map(|_| {
                generate_caption(&world, Task::SpatialTwoShapes, &mut rng)
                    .unwrap()
                    .0
            })
            .collect();
        assert!(captions
            .iter()
            .any(|c| c == "A square is above a red pentagon."));
    }

    #[test]
    fn wrong_entity_count_is_rejected() {
        let world = WorldModel {
            id: "w".into(),
            entities: vec![entity(Shape::Cross, Color::Green, 0.5, 0.5)],
        };
        let err = generate_caption(
            &world,
            Task::SpatialTwoShapes,
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap_err();
        assert!(matches!(err, GenerateError::WorldMismatch { .. }));
    }

    #[test]
    fn identical_spatial_entities_exhaust() {
        let world = WorldModel {
            id: "twins".into(),
            entities: vec![
                entity(Shape::Cross, Color::Green, 0.2, 0.2),
                entity(Shape::Cross, Color::Green, 0.7, 0.7),
            ],
        };
        let err = generate_caption(
            &world,
            Task::SpatialTwoShapes,
            &mut ChaCha8Rng::seed_from_u64(0),
        )
        .unwrap_err();
        assert!(matches!(err, GenerateError::Exhausted { .. }));
    }

    #[test]
    fn references_never_use_generic_objects() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for task in [Task::ExistentialMultiShapes, Task::SpatialMultiShapes] {
            let spec = WorldSpec::for_task(task);
            for i in 0..200 {
                let world = sample_world(&spec, format!("{i}"), &mut rng).unwrap();
                let Ok((_, ast)) = generate_caption(&world, task, &mut rng) else {
                    continue;
                };
                let c = super::super::construction_of(&ast);
                assert!(!c.kinds.contains(&DescriptorKind::Generic), "{ast:?}");
            }
        }
    }

    #[test]
    fn counts_stay_in_range_and_zero_occurs() {
        let spec = WorldSpec::for_task(Task::QuantCount);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut zeros = 0;
        for i in 0..2000 {
            let world = sample_world(&spec, format!("{i}"), &mut rng).unwrap();
            let (_, ast) = generate_caption(&world, Task::QuantCount, &mut rng).unwrap();
            let CaptionAst::Count { number, .. } = ast else {
                panic!("count task produced {ast:?}");
            };
            assert!(number <= MAX_NUMBER);
            zeros += (number == 0) as usize;
        }
        // about 5% of 2000
        assert!((50..=160).contains(&zeros), "{zeros} zero counts");
    }

    #[test]
    fn random_asts_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..2000 {
            let ast = random_ast(&mut rng);
            assert!(ast.is_valid());
            assert_eq!(parse(&realize(&ast, &mut rng)).unwrap(), ast);
        }
    }
}
