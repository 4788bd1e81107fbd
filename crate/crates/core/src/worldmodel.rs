//! Microworld data model: shapes, colors, entities and world sampling.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed::{self, round6};

pub const MIN_SIZE: f64 = 0.08;
pub const MAX_SIZE: f64 = 0.25;
pub const DEFAULT_OVERLAP_THRESHOLD: f64 = 0.25;
/// Placement attempts per entity before a spec is declared infeasible.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

// Keeps boxes strictly inside the unit square after rounding to 6 decimals.
const EDGE_MARGIN: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum WorldError {
    #[error("invalid world spec: {0}")]
    InvalidSpec(String),
    #[error("could not place entity {entity} after {attempts} attempts (infeasible spec)")]
    Infeasible { entity: usize, attempts: usize },
    #[error("invalid world {id}: {reason}")]
    InvalidWorld { id: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Square,
    Rectangle,
    Triangle,
    Pentagon,
    Cross,
    Circle,
    Semicircle,
    Ellipse,
}

impl Shape {
    pub const ALL: [Shape; 8] = [
        Shape::Square,
        Shape::Rectangle,
        Shape::Triangle,
        Shape::Pentagon,
        Shape::Cross,
        Shape::Circle,
        Shape::Semicircle,
        Shape::Ellipse,
    ];

    pub fn word(self) -> &'static str {
        match self {
            Shape::Square => "square",
            Shape::Rectangle => "rectangle",
            Shape::Triangle => "triangle",
            Shape::Pentagon => "pentagon",
            Shape::Cross => "cross",
            Shape::Circle => "circle",
            Shape::Semicircle => "semicircle",
            Shape::Ellipse => "ellipse",
        }
    }

    pub fn plural(self) -> &'static str {
        match self {
            Shape::Square => "squares",
            Shape::Rectangle => "rectangles",
            Shape::Triangle => "triangles",
            Shape::Pentagon => "pentagons",
            Shape::Cross => "crosses",
            Shape::Circle => "circles",
            Shape::Semicircle => "semicircles",
            Shape::Ellipse => "ellipses",
        }
    }

    pub fn from_word(word: &str) -> Option<Shape> {
        Shape::ALL.into_iter().find(|s| s.word() == word)
    }

    pub fn from_plural(word: &str) -> Option<Shape> {
        Shape::ALL.into_iter().find(|s| s.plural() == word)
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Red,
    Green,
    Blue,
    Yellow,
    Magenta,
    Cyan,
    Gray,
}

impl Color {
    pub const ALL: [Color; 7] = [
        Color::Red,
        Color::Green,
        Color::Blue,
        Color::Yellow,
        Color::Magenta,
        Color::Cyan,
        Color::Gray,
    ];

    pub fn word(self) -> &'static str {
        match self {
            Color::Red => "red",
            Color::Green => "green",
            Color::Blue => "blue",
            Color::Yellow => "yellow",
            Color::Magenta => "magenta",
            Color::Cyan => "cyan",
            Color::Gray => "gray",
        }
    }

    pub fn from_word(word: &str) -> Option<Color> {
        Color::ALL.into_iter().find(|c| c.word() == word)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.word())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    #[serde(serialize_with = "fixed::serialize")]
    pub x: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Size {
    #[serde(serialize_with = "fixed::serialize")]
    pub w: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub h: f64,
}

/// One object in the scene. Coordinates are fractions of the canvas with y growing downward.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub shape: Shape,
    pub color: Color,
    pub center: Point,
    pub size: Size,
    #[serde(serialize_with = "fixed::serialize")]
    pub rotation: f64,
}

/// Axis-aligned box in unit coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn intersection_area(&self, other: &BBox) -> f64 {
        let w = self.x1.min(other.x1) - self.x0.max(other.x0);
        let h = self.y1.min(other.y1) - self.y0.max(other.y0);
        if w <= 0.0 || h <= 0.0 {
            0.0
        } else {
            w * h
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x0 && x <= self.x1 && y >= self.y0 && y <= self.y1
    }
}

/// Half extents of the box enclosing a `w`×`h` rectangle rotated by `rotation`.
fn half_extents(size: Size, rotation: f64) -> (f64, f64) {
    let (sin, cos) = rotation.sin_cos();
    let (hw, hh) = (size.w / 2.0, size.h / 2.0);
    (
        hw * cos.abs() + hh * sin.abs(),
        hw * sin.abs() + hh * cos.abs(),
    )
}

/// Every shape is drawn inside its (rotated) size rectangle, so the rectangle's box contains it.
pub fn bounding_box(e: &Entity) -> BBox {
    let (hx, hy) = half_extents(e.size, e.rotation);
    BBox {
        x0: e.center.x - hx,
        y0: e.center.y - hy,
        x1: e.center.x + hx,
        y1: e.center.y + hy,
    }
}

/// Intersection area of the two bounding boxes over the smaller box's area.
pub fn overlap_ratio(a: &Entity, b: &Entity) -> f64 {
    let (ba, bb) = (bounding_box(a), bounding_box(b));
    let smaller = ba.area().min(bb.area());
    if smaller <= 0.0 {
        return 0.0;
    }
    (ba.intersection_area(&bb) / smaller).clamp(0.0, 1.0)
}

impl Entity {
    pub fn validate(&self) -> Result<(), String> {
        let Point { x, y } = self.center;
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return Err(format!("center ({x}, {y}) outside the unit square"));
        }
        for v in [self.size.w, self.size.h] {
            if !(MIN_SIZE..=MAX_SIZE).contains(&v) {
                return Err(format!("size {v} outside [{MIN_SIZE}, {MAX_SIZE}]"));
            }
        }
        if !(0.0..TAU).contains(&self.rotation) {
            return Err(format!("rotation {} outside [0, 2pi)", self.rotation));
        }
        let b = bounding_box(self);
        if b.x0 < 0.0 || b.y0 < 0.0 || b.x1 > 1.0 || b.y1 > 1.0 {
            return Err(format!("bounding box {b:?} leaves the unit square"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldModel {
    pub id: String,
    pub entities: Vec<Entity>,
}

impl WorldModel {
    pub fn validate(&self, overlap_threshold: f64) -> Result<(), WorldError> {
        let fail = |reason: String| WorldError::InvalidWorld {
            id: self.id.clone(),
            reason,
        };
        if self.entities.is_empty() {
            return Err(fail("no entities".into()));
        }
        for (i, e) in self.entities.iter().enumerate() {
            e.validate().map_err(|r| fail(format!("entity {i}: {r}")))?;
        }
        for (i, a) in self.entities.iter().enumerate() {
            for (j, b) in self.entities.iter().enumerate().skip(i + 1) {
                let r = overlap_ratio(a, b);
                if r > overlap_threshold {
                    return Err(fail(format!("entities {i} and {j} overlap by {r:.3}")));
                }
            }
        }
        Ok(())
    }

    /// One JSON line with floats at six decimals.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("world serialization is infallible")
    }
}

/// The six dataset variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Task {
    #[serde(rename = "existential-oneshape")]
    ExistentialOneShape,
    #[serde(rename = "existential-multishapes")]
    ExistentialMultiShapes,
    #[serde(rename = "spatial-twoshapes")]
    SpatialTwoShapes,
    #[serde(rename = "spatial-multishapes")]
    SpatialMultiShapes,
    #[serde(rename = "quant-count")]
    QuantCount,
    #[serde(rename = "quant-ratio")]
    QuantRatio,
}

impl Task {
    pub const ALL: [Task; 6] = [
        Task::ExistentialOneShape,
        Task::ExistentialMultiShapes,
        Task::SpatialTwoShapes,
        Task::SpatialMultiShapes,
        Task::QuantCount,
        Task::QuantRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Task::ExistentialOneShape => "existential-oneshape",
            Task::ExistentialMultiShapes => "existential-multishapes",
            Task::SpatialTwoShapes => "spatial-twoshapes",
            Task::SpatialMultiShapes => "spatial-multishapes",
            Task::QuantCount => "quant-count",
            Task::QuantRatio => "quant-ratio",
        }
    }

    pub fn is_spatial(self) -> bool {
        matches!(self, Task::SpatialTwoShapes | Task::SpatialMultiShapes)
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| {
                let valid: Vec<_> = Task::ALL.iter().map(|t| t.name()).collect();
                format!("unknown task '{s}'; valid tasks: {}", valid.join(", "))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldSpec {
    pub entity_count: RangeInclusive<usize>,
    pub overlap_threshold: f64,
    pub task: Task,
}

impl WorldSpec {
    pub fn for_task(task: Task) -> WorldSpec {
        let entity_count = match task {
            Task::ExistentialOneShape => 1..=1,
            Task::SpatialTwoShapes => 2..=2,
            _ => 4..=8,
        };
        WorldSpec {
            entity_count,
            overlap_threshold: DEFAULT_OVERLAP_THRESHOLD,
            task,
        }
    }

    pub fn validate(&self) -> Result<(), WorldError> {
        if *self.entity_count.start() < 1 || self.entity_count.is_empty() {
            return Err(WorldError::InvalidSpec(format!(
                "entity count range {:?} must be nonempty with lower bound >= 1",
                self.entity_count
            )));
        }
        if !(0.0..1.0).contains(&self.overlap_threshold) {
            return Err(WorldError::InvalidSpec(format!(
                "overlap threshold {} outside [0, 1)",
                self.overlap_threshold
            )));
        }
        Ok(())
    }
}

fn sample_size<R: Rng + ?Sized>(shape: Shape, rng: &mut R) -> Size {
    match shape {
        Shape::Square | Shape::Circle | Shape::Cross | Shape::Pentagon => {
            let s = rng.gen_range(MIN_SIZE..=MAX_SIZE);
            Size { w: s, h: s }
        }
        Shape::Rectangle | Shape::Ellipse => {
            let long = rng.gen_range(0.12..=MAX_SIZE);
            let short = (long * rng.gen_range(0.5..=0.7)).max(MIN_SIZE);
            if rng.gen_bool(0.5) {
                Size { w: long, h: short }
            } else {
                Size { w: short, h: long }
            }
        }
        Shape::Semicircle => {
            let w = rng.gen_range(0.16..=MAX_SIZE);
            Size { w, h: w / 2.0 }
        }
        Shape::Triangle => Size {
            w: rng.gen_range(MIN_SIZE..=MAX_SIZE),
            h: rng.gen_range(MIN_SIZE..=MAX_SIZE),
        },
    }
}

fn sample_entity<R: Rng + ?Sized>(rng: &mut R) -> Entity {
    let shape = Shape::ALL[rng.gen_range(0..Shape::ALL.len())];
    let color = Color::ALL[rng.gen_range(0..Color::ALL.len())];
    let raw = sample_size(shape, rng);
    let size = Size {
        w: round6(raw.w),
        h: round6(raw.h),
    };
    let mut rotation = round6(rng.gen_range(0.0..TAU));
    if rotation >= TAU {
        rotation = 0.0;
    }
    let (hx, hy) = half_extents(size, rotation);
    let x = rng.gen_range(hx + EDGE_MARGIN..=1.0 - hx - EDGE_MARGIN);
    let y = rng.gen_range(hy + EDGE_MARGIN..=1.0 - hy - EDGE_MARGIN);
    Entity {
        shape,
        color,
        center: Point {
            x: round6(x),
            y: round6(y),
        },
        size,
        rotation,
    }
}

/// Samples a world under `spec`, placing entities in order and resampling any
/// entity whose box overlaps an earlier one beyond the threshold.
pub fn sample_world<R: Rng + ?Sized>(
    spec: &WorldSpec,
    id: impl Into<String>,
    rng: &mut R,
) -> Result<WorldModel, WorldError> {
    spec.validate()?;
    let count = rng.gen_range(spec.entity_count.clone());
    let mut entities: Vec<Entity> = Vec::with_capacity(count);
    for index in 0..count {
        let placed = (0..MAX_PLACEMENT_ATTEMPTS).find_map(|_| {
            let candidate = sample_entity(rng);
            entities
                .iter()
                .all(|e| overlap_ratio(e, &candidate) <= spec.overlap_threshold)
                .then_some(candidate)
        });
        match placed {
            Some(e) => entities.push(e),
            None => {
                return Err(WorldError::Infeasible {
                    entity: index,
                    attempts: MAX_PLACEMENT_ATTEMPTS,
                })
            }
        }
    }
    Ok(WorldModel {
        id: id.into(),
        entities,
    })
}
