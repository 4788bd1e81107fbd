use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{instance_seed, Dataset, DatasetError, Split};
use crate::grammar::{parse, random_ast, realize, CaptionAst};
use crate::metrics::Candidate;

pub const GENERIC_CAPTION: &str = "There is a shape.";

/// Degenerate caption generators used to probe metric behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bot {
    /// Copies the first reference caption.
    EchoFirstRef,
    /// "There is a shape." for every image.
    ConstantGeneric,
    /// The first reference with its spatial relation inverted.
    RelationFlip,
    /// A random sentence of the grammar, ignoring the image.
    RandomGrammar,
}

impl Bot {
    pub const ALL: [Bot; 4] = [
        Bot::EchoFirstRef,
        Bot::ConstantGeneric,
        Bot::RelationFlip,
        Bot::RandomGrammar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Bot::EchoFirstRef => "echo-first-ref",
            Bot::ConstantGeneric => "constant-generic",
            Bot::RelationFlip => "relation-flip",
            Bot::RandomGrammar => "random-grammar",
        }
    }
}

impl fmt::Display for Bot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Bot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Bot::ALL.into_iter().find(|b| b.name() == s).ok_or_else(|| {
            let names: Vec<_> = Bot::ALL.iter().map(|b| b.name()).collect();
            format!("unknown bot '{s}'; valid bots: {}", names.join(", "))
        })
    }
}

fn flip(id: &str, reference: &str) -> Result<CaptionAst, DatasetError> {
    match parse(reference) {
        Ok(CaptionAst::Spatial {
            relation,
            subject,
            object,
        }) => Ok(CaptionAst::Spatial {
            relation: relation.inverse(),
            subject,
            object,
        }),
        _ => Err(DatasetError::Corrupt(format!(
            "first reference of {id} is not a spatial caption: {reference:?}"
        ))),
    }
}

/// Runs `bot` over the test split. Output is ordered by id.
pub fn make_baseline(dataset: &Dataset, bot: Bot) -> Result<Vec<Candidate>, DatasetError> {
    let task = dataset.meta().task;
    if bot == Bot::RelationFlip && !task.is_spatial() {
        return Err(DatasetError::BotTaskMismatch { bot, task });
    }
    let mut out = Vec::with_capacity(dataset.len(Split::Test));
    for inst in dataset.instances(Split::Test)? {
        let inst = inst?;
        let first = inst.captions.first().ok_or_else(|| {
            DatasetError::Corrupt(format!("{} has no reference captions", inst.id))
        })?;
        // per-instance stream, so outputs do not depend on iteration order
        let mut rng = ChaCha8Rng::seed_from_u64(
            instance_seed(dataset.meta().master_seed, Split::Test, inst.index) ^ 0xb07,
        );
        let caption = match bot {
            Bot::EchoFirstRef => first.clone(),
            Bot::ConstantGeneric => GENERIC_CAPTION.to_string(),
            Bot::RelationFlip => realize(&flip(&inst.id, first)?, &mut rng),
            Bot::RandomGrammar => realize(&random_ast(&mut rng), &mut rng),
        };
        out.push(Candidate {
            id: inst.id,
            caption,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bot_names_round_trip() {
        for b in Bot::ALL {
            assert_eq!(b.name().parse::<Bot>().unwrap(), b);
        }
        assert!("echo".parse::<Bot>().unwrap_err().contains("relation-flip"));
    }

    #[test]
    fn flipping_inverts_relation() {
        let flipped = flip("x", "A square is above a red pentagon.").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            realize(&flipped, &mut rng),
            "A square is below a red pentagon."
        );
        assert!(flip("x", "There is a square.").is_err());
    }
}
