use thiserror::Error;

use super::{body_is_informative, CaptionAst, Descriptor, Fraction, Relation, NUMBER_WORDS};
use crate::worldmodel::{Color, Shape};

/// Why a caption is ungrammatical. Not an exceptional condition: a parse failure is the
/// grammaticality verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty caption")]
    Empty,
    #[error("caption must end with a single period attached to the last word")]
    Period,
    #[error("invalid token {0:?}")]
    Token(String),
    #[error("expected {expected} at word {position}")]
    Syntax {
        position: usize,
        expected: &'static str,
    },
    #[error("quantified predicate adds no attribute to the restrictor")]
    UninformativeBody,
}

/// Lowercases and splits on single spaces. The period is emitted as its own final token.
pub fn tokenize(text: &str) -> Result<Vec<String>, ParseError> {
    if text.is_empty() {
        return Err(ParseError::Empty);
    }
    let body = text.strip_suffix('.').ok_or(ParseError::Period)?;
    if body.is_empty() || body.ends_with(' ') {
        return Err(ParseError::Period);
    }
    let mut tokens = Vec::new();
    for word in body.split(' ') {
        if word.is_empty() || !word.bytes().all(|b| b.is_ascii_alphabetic()) {
            return Err(ParseError::Token(word.to_string()));
        }
        tokens.push(word.to_ascii_lowercase());
    }
    tokens.push(".".to_string());
    Ok(tokens)
}

struct Cursor<'a> {
    words: &'a [String],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a str> {
        self.words.get(self.pos).map(String::as_str)
    }

    fn peek_at(&self, offset: usize) -> Option<&'a str> {
        self.words.get(self.pos + offset).map(String::as_str)
    }

    fn next(&mut self) -> Option<&'a str> {
        let w = self.peek();
        if w.is_some() {
            self.pos += 1;
        }
        w
    }

    fn fail<T>(&self, expected: &'static str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.pos,
            expected,
        })
    }

    fn expect(&mut self, word: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(word) {
            self.pos += 1;
            Ok(())
        } else {
            self.fail(word)
        }
    }

    fn expect_seq(&mut self, words: &[&'static str]) -> Result<(), ParseError> {
        words.iter().try_for_each(|w| self.expect(w))
    }

    fn at_end(&self) -> bool {
        self.pos == self.words.len()
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            self.fail("end of sentence")
        }
    }

    fn color(&mut self) -> Option<Color> {
        let c = self.peek().and_then(Color::from_word);
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    /// `[COLOR] NOUN` where NOUN is a shape or "shape" (plural forms when `plural`).
    fn nominal(&mut self, plural: bool) -> Result<Descriptor, ParseError> {
        let color = self.color();
        let word = match self.next() {
            Some(w) => w,
            None => return self.fail("noun"),
        };
        let (generic, lookup): (&str, fn(&str) -> Option<Shape>) = if plural {
            ("shapes", Shape::from_plural)
        } else {
            ("shape", Shape::from_word)
        };
        if word == generic {
            return Ok(Descriptor::new(None, color));
        }
        match lookup(word) {
            Some(shape) => Ok(Descriptor::new(Some(shape), color)),
            None => {
                self.pos -= 1;
                self.fail(if plural { "plural noun" } else { "noun" })
            }
        }
    }

    /// `("a"|"an") [COLOR] NOUN`, "an" exactly when the next word starts with a vowel.
    fn noun_phrase(&mut self) -> Result<Descriptor, ParseError> {
        let article = match self.peek() {
            Some(a @ ("a" | "an")) => {
                self.pos += 1;
                a
            }
            _ => return self.fail("article"),
        };
        let vowel = self
            .peek()
            .and_then(|w| w.chars().next())
            .is_some_and(|c| "aeiou".contains(c));
        if (article == "an") != vowel {
            self.pos -= 1;
            return self.fail("agreeing article");
        }
        self.nominal(false)
    }

    /// Singular quantified predicate: bare COLOR or a noun phrase.
    fn predicate_singular(&mut self) -> Result<Descriptor, ParseError> {
        if let Some(color) = self.color() {
            return Ok(Descriptor::color(color));
        }
        self.noun_phrase()
    }

    /// Plural quantified predicate: bare COLOR or `[COLOR] NOUNpl`.
    fn predicate_plural(&mut self) -> Result<Descriptor, ParseError> {
        let start = self.pos;
        if let Some(color) = self.color() {
            if self.peek() == Some(".") {
                return Ok(Descriptor::color(color));
            }
            self.pos = start;
        }
        self.nominal(true)
    }

    fn relation(&mut self) -> Option<Relation> {
        for rel in Relation::ALL {
            let words = rel.words();
            if (0..words.len()).all(|i| self.peek_at(i) == Some(words[i])) {
                self.pos += words.len();
                return Some(rel);
            }
        }
        None
    }

    fn fraction(&mut self) -> Option<Fraction> {
        for fraction in Fraction::ALL {
            for phrase in fraction.phrases() {
                if (0..phrase.len()).all(|i| self.peek_at(i) == Some(phrase[i])) {
                    self.pos += phrase.len();
                    return Some(fraction);
                }
            }
        }
        None
    }
}

fn quantified(
    restrictor: Descriptor,
    body: Descriptor,
    make: impl FnOnce(Descriptor, Descriptor) -> CaptionAst,
) -> Result<CaptionAst, ParseError> {
    if body_is_informative(&restrictor, &body) {
        Ok(make(restrictor, body))
    } else {
        Err(ParseError::UninformativeBody)
    }
}

fn parse_tokens(cur: &mut Cursor<'_>) -> Result<CaptionAst, ParseError> {
    // Frames are distinguished by their first one or two words.
    let ast = match (cur.peek(), cur.peek_at(1)) {
        (Some("there"), _) => {
            cur.expect_seq(&["there", "is"])?;
            CaptionAst::ThereIs {
                object: cur.noun_phrase()?,
            }
        }
        (Some("exactly"), _) => {
            cur.next();
            let number = match cur
                .peek()
                .and_then(|w| NUMBER_WORDS.iter().position(|n| *n == w))
            {
                Some(n) => {
                    cur.pos += 1;
                    n as u32
                }
                None => return cur.fail("number word"),
            };
            let (restrictor, body) = if number == 1 {
                let r = cur.nominal(false)?;
                cur.expect("is")?;
                (r, cur.predicate_singular()?)
            } else {
                let r = cur.nominal(true)?;
                cur.expect("are")?;
                (r, cur.predicate_plural()?)
            };
            quantified(restrictor, body, |restrictor, body| CaptionAst::Count {
                number,
                restrictor,
                body,
            })?
        }
        (Some("half" | "two" | "three"), _) | (Some("a"), Some("third" | "quarter")) => {
            let fraction = match cur.fraction() {
                Some(f) => f,
                None => return cur.fail("fraction"),
            };
            let restrictor = cur.nominal(true)?;
            cur.expect("are")?;
            let body = cur.predicate_plural()?;
            quantified(restrictor, body, |restrictor, body| CaptionAst::Ratio {
                fraction,
                restrictor,
                body,
            })?
        }
        _ => {
            let subject = cur.noun_phrase()?;
            cur.expect("is")?;
            if let Some(relation) = cur.relation() {
                CaptionAst::Spatial {
                    relation,
                    subject,
                    object: cur.noun_phrase()?,
                }
            } else if let Some(color) = cur.color() {
                CaptionAst::IsColor { subject, color }
            } else {
                CaptionAst::IsA {
                    subject,
                    predicate: cur.noun_phrase()?,
                }
            }
        }
    };
    cur.expect(".")?;
    cur.finish()?;
    Ok(ast)
}

/// Parses a caption into its unique AST. Failure means the caption is ungrammatical.
pub fn parse(text: &str) -> Result<CaptionAst, ParseError> {
    let tokens = tokenize(text)?;
    let mut cur = Cursor {
        words: &tokens,
        pos: 0,
    };
    parse_tokens(&mut cur)
}
