//! The caption language: lexicon, sentence frames, parser, realizer and caption generator.
//!
//! One grammar serves both generation and parsing, so every generated caption is
//! parseable and a candidate caption is grammatical exactly when it parses.
//!
//! | frame   | surface pattern                                   |
//! |---------|---------------------------------------------------|
//! | E1      | `there is` NP                                     |
//! | E2a     | NP `is` NP                                        |
//! | E2b     | NP `is` COLOR                                     |
//! | SPATIAL | NP `is` REL NP                                    |
//! | COUNT   | `exactly` NUM NOM `are` PRED (singular for `one`) |
//! | RATIO   | FRAC NOM `are` PRED                               |

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::worldmodel::{Color, Shape};

mod construction;
mod generate;
mod parse;
mod realize;

pub use construction::{construction_of, Construction};
pub use generate::{generate_caption, random_ast, GenerateError, MAX_CAPTION_ATTEMPTS};
pub use parse::{parse, tokenize, ParseError};
pub use realize::realize;

/// Bumped whenever the lexicon or frame inventory changes; hashed into dataset manifests.
pub const GRAMMAR_REVISION: u32 = 1;

/// How an object is described: by its shape, its color, both, or neither (`shape`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Descriptor {
    pub shape: Option<Shape>,
    pub color: Option<Color>,
}

impl Descriptor {
    pub const GENERIC: Descriptor = Descriptor {
        shape: None,
        color: None,
    };

    pub fn new(shape: Option<Shape>, color: Option<Color>) -> Descriptor {
        Descriptor { shape, color }
    }

    pub fn shape(shape: Shape) -> Descriptor {
        Descriptor::new(Some(shape), None)
    }

    pub fn color(color: Color) -> Descriptor {
        Descriptor::new(None, Some(color))
    }

    pub fn colored(color: Color, shape: Shape) -> Descriptor {
        Descriptor::new(Some(shape), Some(color))
    }

    /// True when the noun is "shape" rather than a specific shape.
    pub fn is_generic(&self) -> bool {
        self.shape.is_none()
    }

    pub fn kind(&self) -> DescriptorKind {
        DescriptorKind::of(self.shape.is_some(), self.color.is_some())
    }

    /// Combines two descriptions of the same object; `None` if they disagree on a value.
    pub fn merge(&self, other: &Descriptor) -> Option<Descriptor> {
        fn pick<T: PartialEq + Copy>(a: Option<T>, b: Option<T>) -> Result<Option<T>, ()> {
            match (a, b) {
                (Some(x), Some(y)) if x != y => Err(()),
                (Some(x), _) | (None, Some(x)) => Ok(Some(x)),
                (None, None) => Ok(None),
            }
        }
        Some(Descriptor {
            shape: pick(self.shape, other.shape).ok()?,
            color: pick(self.color, other.color).ok()?,
        })
    }

    /// Every descriptor over the closed lexicon, generic ones included (72 in total).
    pub fn all() -> impl Iterator<Item = Descriptor> {
        let shapes = std::iter::once(None).chain(Shape::ALL.into_iter().map(Some));
        shapes.flat_map(|shape| {
            std::iter::once(None)
                .chain(Color::ALL.into_iter().map(Some))
                .map(move |color| Descriptor { shape, color })
        })
    }
}

impl fmt::Display for Descriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.color {
            write!(f, "{c} ")?;
        }
        match self.shape {
            Some(s) => write!(f, "{s}"),
            None => f.write_str("shape"),
        }
    }
}

/// Descriptor kind as recorded in constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DescriptorKind {
    #[serde(rename = "G")]
    Generic,
    #[serde(rename = "S")]
    Shape,
    #[serde(rename = "C")]
    Color,
    #[serde(rename = "CS")]
    ColorShape,
}

impl DescriptorKind {
    pub const ALL: [DescriptorKind; 4] = [
        DescriptorKind::Generic,
        DescriptorKind::Shape,
        DescriptorKind::Color,
        DescriptorKind::ColorShape,
    ];

    pub fn of(has_shape: bool, has_color: bool) -> DescriptorKind {
        match (has_shape, has_color) {
            (false, false) => DescriptorKind::Generic,
            (true, false) => DescriptorKind::Shape,
            (false, true) => DescriptorKind::Color,
            (true, true) => DescriptorKind::ColorShape,
        }
    }

    pub fn has_shape(self) -> bool {
        matches!(self, DescriptorKind::Shape | DescriptorKind::ColorShape)
    }

    pub fn has_color(self) -> bool {
        matches!(self, DescriptorKind::Color | DescriptorKind::ColorShape)
    }

    pub fn code(self) -> &'static str {
        match self {
            DescriptorKind::Generic => "G",
            DescriptorKind::Shape => "S",
            DescriptorKind::Color => "C",
            DescriptorKind::ColorShape => "CS",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    Above,
    Below,
    LeftOf,
    RightOf,
}

impl Relation {
    pub const ALL: [Relation; 4] = [
        Relation::Above,
        Relation::Below,
        Relation::LeftOf,
        Relation::RightOf,
    ];

    pub fn words(self) -> &'static [&'static str] {
        match self {
            Relation::Above => &["above"],
            Relation::Below => &["below"],
            Relation::LeftOf => &["to", "the", "left", "of"],
            Relation::RightOf => &["to", "the", "right", "of"],
        }
    }

    /// Normalized single-token name, as used in scene tuples.
    pub fn name(self) -> &'static str {
        match self {
            Relation::Above => "above",
            Relation::Below => "below",
            Relation::LeftOf => "left_of",
            Relation::RightOf => "right_of",
        }
    }

    pub fn inverse(self) -> Relation {
        match self {
            Relation::Above => Relation::Below,
            Relation::Below => Relation::Above,
            Relation::LeftOf => Relation::RightOf,
            Relation::RightOf => Relation::LeftOf,
        }
    }
}

/// One of the five quantifier fractions, stored in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fraction {
    pub num: u32,
    pub den: u32,
}

impl Fraction {
    pub const HALF: Fraction = Fraction { num: 1, den: 2 };
    pub const THIRD: Fraction = Fraction { num: 1, den: 3 };
    pub const QUARTER: Fraction = Fraction { num: 1, den: 4 };
    pub const TWO_THIRDS: Fraction = Fraction { num: 2, den: 3 };
    pub const THREE_QUARTERS: Fraction = Fraction { num: 3, den: 4 };

    pub const ALL: [Fraction; 5] = [
        Fraction::HALF,
        Fraction::THIRD,
        Fraction::QUARTER,
        Fraction::TWO_THIRDS,
        Fraction::THREE_QUARTERS,
    ];

    /// Surface phrasings, each ending in "the". The first is the canonical one.
    pub fn phrases(self) -> &'static [&'static [&'static str]] {
        match (self.num, self.den) {
            (1, 2) => &[&["half", "the"], &["half", "of", "the"]],
            (1, 3) => &[&["a", "third", "of", "the"]],
            (1, 4) => &[&["a", "quarter", "of", "the"]],
            (2, 3) => &[&["two", "thirds", "of", "the"]],
            (3, 4) => &[&["three", "quarters", "of", "the"]],
            _ => unreachable!("fractions are closed over Fraction::ALL"),
        }
    }

    /// Normalized single-token name, as used in scene tuples.
    pub fn name(self) -> &'static str {
        match (self.num, self.den) {
            (1, 2) => "half",
            (1, 3) => "a_third",
            (1, 4) => "a_quarter",
            (2, 3) => "two_thirds",
            (3, 4) => "three_quarters",
            _ => unreachable!("fractions are closed over Fraction::ALL"),
        }
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

pub const NUMBER_WORDS: [&str; 6] = ["zero", "one", "two", "three", "four", "five"];
pub const MAX_NUMBER: u32 = 5;

/// Surface frame that produced a caption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Frame {
    /// "There is a red square."
    E1,
    /// "A shape is a red square."
    E2a,
    /// "A square is red."
    E2b,
    #[serde(rename = "SPATIAL")]
    Spatial,
    #[serde(rename = "COUNT")]
    Count,
    #[serde(rename = "RATIO")]
    Ratio,
}

impl Frame {
    pub const ALL: [Frame; 6] = [
        Frame::E1,
        Frame::E2a,
        Frame::E2b,
        Frame::Spatial,
        Frame::Count,
        Frame::Ratio,
    ];

    pub fn slots(self) -> usize {
        match self {
            Frame::E1 | Frame::E2a | Frame::E2b => 1,
            Frame::Spatial | Frame::Count | Frame::Ratio => 2,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Frame::E1 => "E1",
            Frame::E2a => "E2a",
            Frame::E2b => "E2b",
            Frame::Spatial => "SPATIAL",
            Frame::Count => "COUNT",
            Frame::Ratio => "RATIO",
        }
    }
}

/// Parse result of one caption. The variant records the surface frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CaptionAst {
    /// E1: "There is a green cross."
    ThereIs { object: Descriptor },
    /// E2a: "A shape is a gray triangle."
    IsA {
        subject: Descriptor,
        predicate: Descriptor,
    },
    /// E2b: "A rectangle is green."
    IsColor { subject: Descriptor, color: Color },
    Spatial {
        relation: Relation,
        subject: Descriptor,
        object: Descriptor,
    },
    /// "Exactly two rectangles are green."
    Count {
        number: u32,
        restrictor: Descriptor,
        body: Descriptor,
    },
    /// "A quarter of the shapes are rectangles."
    Ratio {
        fraction: Fraction,
        restrictor: Descriptor,
        body: Descriptor,
    },
}

/// A quantified body has to say something the restrictor does not.
pub fn body_is_informative(restrictor: &Descriptor, body: &Descriptor) -> bool {
    (body.shape.is_some() && restrictor.shape.is_none())
        || (body.color.is_some() && restrictor.color.is_none())
}

impl CaptionAst {
    pub fn frame(&self) -> Frame {
        match self {
            CaptionAst::ThereIs { .. } => Frame::E1,
            CaptionAst::IsA { .. } => Frame::E2a,
            CaptionAst::IsColor { .. } => Frame::E2b,
            CaptionAst::Spatial { .. } => Frame::Spatial,
            CaptionAst::Count { .. } => Frame::Count,
            CaptionAst::Ratio { .. } => Frame::Ratio,
        }
    }

    pub fn is_valid(&self) -> bool {
        match self {
            CaptionAst::Count {
                number,
                restrictor,
                body,
            } => *number <= MAX_NUMBER && body_is_informative(restrictor, body),
            CaptionAst::Ratio {
                fraction,
                restrictor,
                body,
            } => Fraction::ALL.contains(fraction) && body_is_informative(restrictor, body),
            _ => true,
        }
    }
}
