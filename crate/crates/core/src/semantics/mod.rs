//! Logical forms for captions, their truth conditions over world models, and scene tuples.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grammar::{parse, CaptionAst, Descriptor, Fraction, Relation, NUMBER_WORDS};
use crate::worldmodel::{Entity, Point, WorldModel};

pub mod oracle;

pub use oracle::oracle_evaluate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Proposition {
    /// Some entity matches the descriptor.
    Exists(Descriptor),
    /// Two distinct entities matching the descriptors stand in the relation.
    ExistsPair {
        relation: Relation,
        subject: Descriptor,
        object: Descriptor,
    },
    /// Exactly `number` entities match both restrictor and body.
    CountEq {
        number: u32,
        restrictor: Descriptor,
        body: Descriptor,
    },
    /// The restrictor set is nonempty and `fraction` of it matches the body.
    RatioEq {
        fraction: Fraction,
        restrictor: Descriptor,
        body: Descriptor,
    },
    /// An existential whose two descriptions disagree ("A square is a circle."). False on
    /// every world.
    Unsatisfiable {
        subject: Descriptor,
        predicate: Descriptor,
    },
}

/// Three-way outcome for a candidate caption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Ungrammatical,
    True,
    False,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Ungrammatical => "ungrammatical",
            Verdict::True => "true",
            Verdict::False => "false",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn to_proposition(ast: &CaptionAst) -> Proposition {
    match *ast {
        CaptionAst::ThereIs { object } => Proposition::Exists(object),
        CaptionAst::IsA { subject, predicate } => match subject.merge(&predicate) {
            Some(merged) => Proposition::Exists(merged),
            None => Proposition::Unsatisfiable { subject, predicate },
        },
        // the color adjective cannot conflict: the subject noun phrase of E2b may carry a
        // color too ("A red square is blue."), which merging catches
        CaptionAst::IsColor { subject, color } => {
            let predicate = Descriptor::color(color);
            match subject.merge(&predicate) {
                Some(merged) => Proposition::Exists(merged),
                None => Proposition::Unsatisfiable { subject, predicate },
            }
        }
        CaptionAst::Spatial {
            relation,
            subject,
            object,
        } => Proposition::ExistsPair {
            relation,
            subject,
            object,
        },
        CaptionAst::Count {
            number,
            restrictor,
            body,
        } => Proposition::CountEq {
            number,
            restrictor,
            body,
        },
        CaptionAst::Ratio {
            fraction,
            restrictor,
            body,
        } => Proposition::RatioEq {
            fraction,
            restrictor,
            body,
        },
    }
}

pub fn matches(e: &Entity, d: &Descriptor) -> bool {
    d.shape.is_none_or(|s| s == e.shape) && d.color.is_none_or(|c| c == e.color)
}

pub fn count_matching(world: &WorldModel, d: &Descriptor) -> usize {
    world.entities.iter().filter(|e| matches(e, d)).count()
}

/// Strict comparison of centers in image coordinates (y grows downward). Ties are false.
pub fn relation_holds(relation: Relation, a: Point, b: Point) -> bool {
    match relation {
        Relation::Above => a.y < b.y,
        Relation::Below => a.y > b.y,
        Relation::LeftOf => a.x < b.x,
        Relation::RightOf => a.x > b.x,
    }
}

pub fn evaluate(p: &Proposition, w: &WorldModel) -> bool {
    match p {
        Proposition::Exists(d) => w.entities.iter().any(|e| matches(e, d)),
        Proposition::ExistsPair {
            relation,
            subject,
            object,
        } => w.entities.iter().enumerate().any(|(i, a)| {
            matches(a, subject)
                && w.entities.iter().enumerate().any(|(j, b)| {
                    i != j && matches(b, object) && relation_holds(*relation, a.center, b.center)
                })
        }),
        Proposition::CountEq {
            number,
            restrictor,
            body,
        } => {
            let n = w
                .entities
                .iter()
                .filter(|e| matches(e, restrictor) && matches(e, body))
                .count();
            n == *number as usize
        }
        Proposition::RatioEq {
            fraction,
            restrictor,
            body,
        } => {
            let (mut total, mut hits) = (0u64, 0u64);
            for e in w.entities.iter().filter(|e| matches(e, restrictor)) {
                total += 1;
                hits += matches(e, body) as u64;
            }
            total > 0 && fraction.den as u64 * hits == fraction.num as u64 * total
        }
        Proposition::Unsatisfiable { .. } => false,
    }
}

/// Total over arbitrary input: parse failure is a verdict, not an error.
pub fn evaluate_caption(text: &str, w: &WorldModel) -> Verdict {
    match parse(text) {
        Err(_) => Verdict::Ungrammatical,
        Ok(ast) if evaluate(&to_proposition(&ast), w) => Verdict::True,
        Ok(_) => Verdict::False,
    }
}

/// Normalized fact extracted from a caption. Objects are numbered by position within
/// the caption, starting at 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SceneTuple {
    Attribute {
        object: u8,
        word: &'static str,
    },
    Relation {
        subject: u8,
        relation: &'static str,
        object: u8,
    },
    Quantity {
        quantity: &'static str,
        words: Vec<&'static str>,
    },
}

impl SceneTuple {
    /// The same tuple with object ids passed through `map`.
    pub fn renumbered(&self, map: impl Fn(u8) -> u8) -> SceneTuple {
        match self {
            SceneTuple::Attribute { object, word } => SceneTuple::Attribute {
                object: map(*object),
                word,
            },
            SceneTuple::Relation {
                subject,
                relation,
                object,
            } => SceneTuple::Relation {
                subject: map(*subject),
                relation,
                object: map(*object),
            },
            q @ SceneTuple::Quantity { .. } => q.clone(),
        }
    }

    pub fn objects(&self) -> Vec<u8> {
        match self {
            SceneTuple::Attribute { object, .. } => vec![*object],
            SceneTuple::Relation {
                subject, object, ..
            } => vec![*subject, *object],
            SceneTuple::Quantity { .. } => vec![],
        }
    }
}

impl fmt::Display for SceneTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SceneTuple::Attribute { object, word } => write!(f, "(o{object}, {word})"),
            SceneTuple::Relation {
                subject,
                relation,
                object,
            } => write!(f, "(o{subject}, {relation}, o{object})"),
            SceneTuple::Quantity { quantity, words } => {
                write!(f, "({quantity}, {})", words.join(" "))
            }
        }
    }
}

fn attribute_tuples(out: &mut BTreeSet<SceneTuple>, object: u8, d: &Descriptor) {
    if let Some(s) = d.shape {
        out.insert(SceneTuple::Attribute {
            object,
            word: s.word(),
        });
    }
    if let Some(c) = d.color {
        out.insert(SceneTuple::Attribute {
            object,
            word: c.word(),
        });
    }
}

fn descriptor_words(d: &Descriptor) -> Vec<&'static str> {
    let mut words = Vec::with_capacity(2);
    if let Some(c) = d.color {
        words.push(c.word());
    }
    words.push(d.shape.map_or("shape", |s| s.word()));
    words
}

pub fn scene_tuples(ast: &CaptionAst) -> BTreeSet<SceneTuple> {
    let mut out = BTreeSet::new();
    match ast {
        CaptionAst::ThereIs { object } => attribute_tuples(&mut out, 1, object),
        CaptionAst::IsA { subject, predicate } => {
            attribute_tuples(&mut out, 1, subject);
            attribute_tuples(&mut out, 1, predicate);
        }
        CaptionAst::IsColor { subject, color } => {
            attribute_tuples(&mut out, 1, subject);
            attribute_tuples(&mut out, 1, &Descriptor::color(*color));
        }
        CaptionAst::Spatial {
            relation,
            subject,
            object,
        } => {
            attribute_tuples(&mut out, 1, subject);
            attribute_tuples(&mut out, 2, object);
            out.insert(SceneTuple::Relation {
                subject: 1,
                relation: relation.name(),
                object: 2,
            });
        }
        CaptionAst::Count {
            number,
            restrictor,
            body,
        } => {
            attribute_tuples(&mut out, 1, restrictor);
            attribute_tuples(&mut out, 1, body);
            out.insert(SceneTuple::Quantity {
                quantity: NUMBER_WORDS[*number as usize],
                words: descriptor_words(restrictor),
            });
        }
        CaptionAst::Ratio {
            fraction,
            restrictor,
            body,
        } => {
            attribute_tuples(&mut out, 1, restrictor);
            attribute_tuples(&mut out, 1, body);
            out.insert(SceneTuple::Quantity {
                quantity: fraction.name(),
                words: descriptor_words(restrictor),
            });
        }
    }
    out
}
