use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CaptionAst, DescriptorKind, Frame};

/// Caption reduced to its frame and the kind of each descriptor slot. Specific shapes,
/// colors, relations, numbers and fractions are discarded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Construction {
    pub frame: Frame,
    pub kinds: Vec<DescriptorKind>,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kinds: Vec<_> = self.kinds.iter().map(|k| k.code()).collect();
        write!(f, "{}[{}]", self.frame.code(), kinds.join(","))
    }
}

pub fn construction_of(ast: &CaptionAst) -> Construction {
    let kinds = match ast {
        CaptionAst::ThereIs { object } => vec![object.kind()],
        // both noun phrases describe one object; record what the sentence says about it
        CaptionAst::IsA { subject, predicate } => vec![DescriptorKind::of(
            subject.shape.is_some() || predicate.shape.is_some(),
            subject.color.is_some() || predicate.color.is_some(),
        )],
        CaptionAst::IsColor { subject, .. } => vec![subject.kind()],
        CaptionAst::Spatial {
            subject, object, ..
        } => vec![subject.kind(), object.kind()],
        CaptionAst::Count {
            restrictor, body, ..
        }
        | CaptionAst::Ratio {
            restrictor, body, ..
        } => vec![restrictor.kind(), body.kind()],
    };
    let construction = Construction {
        frame: ast.frame(),
        kinds,
    };
    debug_assert_eq!(construction.kinds.len(), construction.frame.slots());
    construction
}
