#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use gtd_core::worldmodel::{Color, Entity, Point, Shape, Size, WorldModel};
use sha2::{Digest, Sha256};

pub fn entity(shape: Shape, color: Color, x: f64, y: f64) -> Entity {
    Entity {
        shape,
        color,
        center: Point { x, y },
        size: Size { w: 0.1, h: 0.1 },
        rotation: 0.0,
    }
}

pub fn world(entities: Vec<Entity>) -> WorldModel {
    WorldModel {
        id: "hand".into(),
        entities,
    }
}

/// SHA-256 of every file below `root`, keyed by relative path.
pub fn digest_tree(root: &Path) -> BTreeMap<String, String> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(root)
                    .unwrap()
                    .to_string_lossy()
                    .into_owned();
                out.insert(rel, hex::encode(Sha256::digest(fs::read(&path).unwrap())));
            }
        }
    }
    out
}

/// Hand-encoded worlds for the sample captions of each dataset variant, with the
/// expected verdict of every caption.
pub type CaptionCase = (&'static str, WorldModel, Vec<(&'static str, bool)>);

pub fn sample_caption_cases() -> Vec<CaptionCase> {
    use Color::*;
    use Shape::*;
    let scene = world(vec![
        entity(Triangle, Blue, 0.2, 0.3),
        entity(Triangle, Gray, 0.4, 0.2),
        entity(Semicircle, Red, 0.7, 0.6),
        entity(Circle, Yellow, 0.5, 0.4),
        entity(Rectangle, Green, 0.5, 0.8),
    ]);
    vec![
        (
            "existential-oneshape",
            world(vec![entity(Cross, Green, 0.5, 0.5)]),
            vec![
                ("There is a green cross.", true),
                ("A rectangle is green.", false),
                ("There is a cyan shape.", false),
            ],
        ),
        (
            "existential-multishapes",
            world(vec![
                entity(Triangle, Gray, 0.2, 0.2),
                entity(Circle, Yellow, 0.5, 0.5),
                entity(Pentagon, Red, 0.8, 0.8),
                entity(Ellipse, Blue, 0.2, 0.8),
            ]),
            vec![
                ("A shape is a gray triangle.", true),
                ("There is a square.", false),
                ("There is a yellow shape.", true),
            ],
        ),
        (
            "spatial-twoshapes",
            world(vec![
                entity(Square, Blue, 0.7, 0.3),
                entity(Pentagon, Red, 0.3, 0.7),
            ]),
            vec![
                ("A square is above a red pentagon.", true),
                ("A yellow square is above a yellow pentagon.", false),
                ("A square is to the left of a pentagon.", false),
            ],
        ),
        (
            "spatial-multishapes",
            scene.clone(),
            vec![
                ("A blue triangle is to the left of a semicircle.", true),
                ("A circle is above a green rectangle.", true),
                ("A semicircle is to the left of a circle.", false),
            ],
        ),
        (
            "quant-count",
            world(vec![
                entity(Rectangle, Green, 0.2, 0.2),
                entity(Rectangle, Green, 0.8, 0.2),
                entity(Circle, Yellow, 0.5, 0.5),
                entity(Ellipse, Red, 0.2, 0.8),
                entity(Square, Blue, 0.8, 0.8),
            ]),
            vec![
                ("Exactly two rectangles are green.", true),
                ("Exactly one shape is a yellow circle.", true),
                ("Exactly zero shapes are ellipses.", false),
            ],
        ),
        (
            "quant-ratio",
            world(vec![
                entity(Rectangle, Red, 0.2, 0.2),
                entity(Circle, Green, 0.8, 0.2),
                entity(Triangle, Blue, 0.2, 0.8),
                entity(Square, Yellow, 0.8, 0.8),
            ]),
            vec![
                ("A quarter of the shapes are rectangles.", true),
                ("A third of the rectangles are magenta.", false),
                ("Half the shapes are green.", false),
            ],
        ),
        (
            "figure scene",
            scene,
            vec![
                ("A circle is above a green rectangle.", true),
                ("A blue triangle is to the left of a semicircle.", true),
                ("A semicircle is below a gray triangle.", true),
                ("A semicircle is to the left of a triangle.", false),
            ],
        ),
    ]
}
