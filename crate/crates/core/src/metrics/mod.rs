//! Grammaticality, truthfulness and diversity ratios, plus BLEU-4 and scene-tuple F1.

use std::collections::{BTreeSet, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fixed;
use crate::grammar::{construction_of, parse, CaptionAst, Construction};
use crate::semantics::{evaluate, evaluate_caption, to_proposition, Verdict};
use crate::worldmodel::{Task, WorldModel};

mod bleu;
mod tuples;

pub use bleu::{bleu4_sentence, bleu_tokens};
pub use tuples::{reference_union, tuple_f1, TupleScore};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no candidates to score")]
    EmptyCandidates,
    #[error("no reference constructions")]
    EmptyReferences,
    #[error("id mismatch at position {position}: candidate {candidate}, world {world}")]
    Misaligned {
        position: usize,
        candidate: String,
        world: String,
    },
    #[error("{candidates} candidates but {worlds} worlds")]
    LengthMismatch { candidates: usize, worlds: usize },
    #[error("duplicate instance id {0}")]
    DuplicateId(String),
    #[error("instance {0} has no reference captions")]
    NoReferences(String),
    #[error("reference {index} of instance {id} is not a true caption: {caption:?}")]
    BadReference {
        id: String,
        index: usize,
        caption: String,
    },
}

/// One line of a candidate file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub caption: String,
}

pub fn grammaticality_ratio<S: AsRef<str>>(candidates: &[S]) -> Result<f64, MetricsError> {
    if candidates.is_empty() {
        return Err(MetricsError::EmptyCandidates);
    }
    let ok = candidates
        .iter()
        .filter(|c| parse(c.as_ref()).is_ok())
        .count();
    Ok(ok as f64 / candidates.len() as f64)
}

/// Fraction of candidates that are grammatical and true of their world. Candidates and
/// worlds must be aligned by id.
pub fn truthfulness_ratio(
    candidates: &[Candidate],
    worlds: &[WorldModel],
) -> Result<f64, MetricsError> {
    if candidates.is_empty() {
        return Err(MetricsError::EmptyCandidates);
    }
    if candidates.len() != worlds.len() {
        return Err(MetricsError::LengthMismatch {
            candidates: candidates.len(),
            worlds: worlds.len(),
        });
    }
    let mut true_count = 0;
    for (position, (c, w)) in candidates.iter().zip(worlds).enumerate() {
        if c.id != w.id {
            return Err(MetricsError::Misaligned {
                position,
                candidate: c.id.clone(),
                world: w.id.clone(),
            });
        }
        true_count += (evaluate_caption(&c.caption, w) == Verdict::True) as usize;
    }
    Ok(true_count as f64 / candidates.len() as f64)
}

/// Distinct candidate constructions over distinct reference constructions. May exceed 1.
pub fn diversity_ratio(
    candidates: impl IntoIterator<Item = Construction>,
    references: impl IntoIterator<Item = Construction>,
) -> Result<f64, MetricsError> {
    let refs: HashSet<Construction> = references.into_iter().collect();
    if refs.is_empty() {
        return Err(MetricsError::EmptyReferences);
    }
    let cands: HashSet<Construction> = candidates.into_iter().collect();
    Ok(cands.len() as f64 / refs.len() as f64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunInstance {
    pub id: String,
    pub world: WorldModel,
    pub references: Vec<String>,
    pub candidate: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunInput {
    pub task: Task,
    pub instances: Vec<RunInstance>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub id: String,
    pub verdict: Verdict,
    #[serde(serialize_with = "fixed::serialize")]
    pub bleu4: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub tuple_precision: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub tuple_recall: f64,
    /// Display form such as `SPATIAL[CS,S]`; absent for ungrammatical candidates.
    pub construction: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GtdReport {
    pub task: Task,
    pub n_instances: usize,
    #[serde(serialize_with = "fixed::serialize")]
    pub grammaticality: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub truthfulness: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub diversity: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub bleu4: f64,
    #[serde(serialize_with = "fixed::serialize")]
    pub tuple_f1: f64,
    pub per_instance: Vec<InstanceRecord>,
}

impl GtdReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization is infallible")
    }

    pub fn from_json(text: &str) -> serde_json::Result<GtdReport> {
        serde_json::from_str(text)
    }

    /// `G=… T=… D=… BLEU4=… F1=…` with six decimals.
    pub fn summary_line(&self) -> String {
        format!(
            "G={:.6} T={:.6} D={:.6} BLEU4={:.6} F1={:.6}",
            self.grammaticality, self.truthfulness, self.diversity, self.bleu4, self.tuple_f1
        )
    }
}

struct Scored {
    record: InstanceRecord,
    tuple_f1: f64,
    candidate_construction: Option<Construction>,
    reference_construction: Construction,
}

fn score_instance(inst: &RunInstance) -> Result<Scored, MetricsError> {
    if inst.references.is_empty() {
        return Err(MetricsError::NoReferences(inst.id.clone()));
    }
    let mut reference_asts = Vec::with_capacity(inst.references.len());
    for (index, caption) in inst.references.iter().enumerate() {
        let ast = parse(caption)
            .ok()
            .filter(|ast| evaluate(&to_proposition(ast), &inst.world))
            .ok_or_else(|| MetricsError::BadReference {
                id: inst.id.clone(),
                index,
                caption: caption.clone(),
            })?;
        reference_asts.push(ast);
    }

    let candidate_ast: Option<CaptionAst> = parse(&inst.candidate).ok();
    let verdict = match &candidate_ast {
        None => Verdict::Ungrammatical,
        Some(ast) if evaluate(&to_proposition(ast), &inst.world) => Verdict::True,
        Some(_) => Verdict::False,
    };
    let reference_tokens: Vec<Vec<String>> =
        inst.references.iter().map(|r| bleu_tokens(r)).collect();
    let bleu4 = bleu4_sentence(&bleu_tokens(&inst.candidate), &reference_tokens);
    let tuples = tuple_f1(candidate_ast.as_ref(), &reference_asts);
    let candidate_construction = candidate_ast.as_ref().map(construction_of);

    Ok(Scored {
        record: InstanceRecord {
            id: inst.id.clone(),
            verdict,
            bleu4,
            tuple_precision: tuples.precision,
            tuple_recall: tuples.recall,
            construction: candidate_construction.as_ref().map(|c| c.to_string()),
        },
        tuple_f1: tuples.f1,
        candidate_construction,
        reference_construction: construction_of(&reference_asts[0]),
    })
}

/// Scores every instance and aggregates. Per-instance records are ordered by id, and the
/// result does not depend on the input order.
pub fn evaluate_run(run: &RunInput) -> Result<GtdReport, MetricsError> {
    if run.instances.is_empty() {
        return Err(MetricsError::EmptyCandidates);
    }
    let mut seen = HashMap::with_capacity(run.instances.len());
    for inst in &run.instances {
        if seen.insert(inst.id.as_str(), ()).is_some() {
            return Err(MetricsError::DuplicateId(inst.id.clone()));
        }
    }

    let mut scored = run
        .instances
        .par_iter()
        .map(score_instance)
        .collect::<Result<Vec<_>, _>>()?;
    scored.sort_by(|a, b| a.record.id.cmp(&b.record.id));

    let n = scored.len() as f64;
    let grammatical = scored
        .iter()
        .filter(|s| s.record.verdict != Verdict::Ungrammatical)
        .count();
    let truthful = scored
        .iter()
        .filter(|s| s.record.verdict == Verdict::True)
        .count();
    let candidate_constructions: BTreeSet<Construction> = scored
        .iter()
        .filter_map(|s| s.candidate_construction.clone())
        .collect();
    let diversity = diversity_ratio(
        candidate_constructions,
        scored.iter().map(|s| s.reference_construction.clone()),
    )?;
    let bleu4 = scored.iter().map(|s| s.record.bleu4).sum::<f64>() / n;
    let tuple_f1 = scored.iter().map(|s| s.tuple_f1).sum::<f64>() / n;

    Ok(GtdReport {
        task: run.task,
        n_instances: scored.len(),
        grammaticality: grammatical as f64 / n,
        truthfulness: truthful as f64 / n,
        diversity,
        bleu4,
        tuple_f1,
        per_instance: scored.into_iter().map(|s| s.record).collect(),
    })
}
