use rand::Rng;

use super::{CaptionAst, Descriptor, NUMBER_WORDS};

fn starts_with_vowel(word: &str) -> bool {
    word.chars().next().is_some_and(|c| "aeiou".contains(c))
}

fn push_nominal(out: &mut Vec<&'static str>, d: &Descriptor, plural: bool) {
    if let Some(c) = d.color {
        out.push(c.word());
    }
    out.push(match (d.shape, plural) {
        (Some(s), false) => s.word(),
        (Some(s), true) => s.plural(),
        (None, false) => "shape",
        (None, true) => "shapes",
    });
}

fn push_noun_phrase(out: &mut Vec<&'static str>, d: &Descriptor) {
    let mut words = Vec::with_capacity(2);
    push_nominal(&mut words, d, false);
    out.push(if starts_with_vowel(words[0]) {
        "an"
    } else {
        "a"
    });
    out.extend(words);
}

/// Quantified predicates use a bare color when the body has no shape.
fn push_predicate(out: &mut Vec<&'static str>, body: &Descriptor, plural: bool) {
    match (body.shape, body.color) {
        (None, Some(c)) => out.push(c.word()),
        _ if plural => push_nominal(out, body, true),
        _ => push_noun_phrase(out, body),
    }
}

/// Renders an AST as a capitalized sentence with a terminal period. `rng` picks among
/// equivalent phrasings ("half the" / "half of the").
pub fn realize<R: Rng + ?Sized>(ast: &CaptionAst, rng: &mut R) -> String {
    let mut words: Vec<&'static str> = Vec::with_capacity(12);
    match ast {
        CaptionAst::ThereIs { object } => {
            words.extend(["there", "is"]);
            push_noun_phrase(&mut words, object);
        }
        CaptionAst::IsA { subject, predicate } => {
            push_noun_phrase(&mut words, subject);
            words.push("is");
            push_noun_phrase(&mut words, predicate);
        }
        CaptionAst::IsColor { subject, color } => {
            push_noun_phrase(&mut words, subject);
            words.extend(["is", color.word()]);
        }
        CaptionAst::Spatial {
            relation,
            subject,
            object,
        } => {
            push_noun_phrase(&mut words, subject);
            words.push("is");
            words.extend(relation.words());
            push_noun_phrase(&mut words, object);
        }
        CaptionAst::Count {
            number,
            restrictor,
            body,
        } => {
            let singular = *number == 1;
            words.extend(["exactly", NUMBER_WORDS[*number as usize]]);
            push_nominal(&mut words, restrictor, !singular);
            words.push(if singular { "is" } else { "are" });
            push_predicate(&mut words, body, !singular);
        }
        CaptionAst::Ratio {
            fraction,
            restrictor,
            body,
        } => {
            let phrases = fraction.phrases();
            let phrase = if phrases.len() > 1 {
                phrases[rng.gen_range(0..phrases.len())]
            } else {
                phrases[0]
            };
            words.extend(phrase);
            push_nominal(&mut words, restrictor, true);
            words.push("are");
            push_predicate(&mut words, body, true);
        }
    }
    let mut sentence = words.join(" ");
    if let Some(first) = sentence.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    sentence.push('.');
    sentence
}
