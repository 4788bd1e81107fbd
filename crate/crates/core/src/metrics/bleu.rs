//! Sentence-level BLEU-4 with one fixed smoothing rule.
//!
//! Modified n-gram precisions for n = 1..4 are clipped by the maximum count of each
//! n-gram in any single reference. A zero precision for n >= 2 is replaced by
//! `1 / (2 * c_n)` where `c_n` is the candidate's n-gram count (at least 1); a zero
//! unigram precision makes the score 0. The brevity penalty uses the reference length
//! closest to the candidate length, preferring the shorter one on ties.

use std::collections::HashMap;

pub const MAX_ORDER: usize = 4;

/// Lowercased words with periods removed; lenient so ungrammatical text still scores.
pub fn bleu_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.trim_matches('.').to_lowercase())
        .filter(|w| !w.is_empty())
        .collect()
}

fn ngram_counts<S: AsRef<str>>(tokens: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for window in tokens.windows(n) {
            let key: Vec<&str> = window.iter().map(AsRef::as_ref).collect();
            *counts.entry(key).or_insert(0) += 1;
        }
    }
    counts
}

fn closest_reference_length(candidate_len: usize, reference_lens: &[usize]) -> usize {
    reference_lens
        .iter()
        .copied()
        .min_by_key(|&r| (r.abs_diff(candidate_len), r))
        .unwrap_or(0)
}

/// BLEU-4 of one tokenized candidate against tokenized references. Period tokens are
/// ignored. An empty candidate scores 0.
pub fn bleu4_sentence<S: AsRef<str>, T: AsRef<str>>(candidate: &[S], references: &[Vec<T>]) -> f64 {
    let strip = |toks: &[&str]| -> Vec<String> {
        toks.iter()
            .filter(|t| **t != ".")
            .map(|t| t.to_string())
            .collect()
    };
    let cand = strip(&candidate.iter().map(AsRef::as_ref).collect::<Vec<_>>());
    let refs: Vec<Vec<String>> = references
        .iter()
        .map(|r| strip(&r.iter().map(AsRef::as_ref).collect::<Vec<_>>()))
        .collect();
    if cand.is_empty() || refs.is_empty() {
        return 0.0;
    }

    let mut log_sum = 0.0;
    for n in 1..=MAX_ORDER {
        let cand_counts = ngram_counts(&cand, n);
        let total: usize = cand_counts.values().sum();
        let mut max_ref: HashMap<Vec<&str>, usize> = HashMap::new();
        for r in &refs {
            for (gram, c) in ngram_counts(r, n) {
                let slot = max_ref.entry(gram).or_insert(0);
                *slot = (*slot).max(c);
            }
        }
        let clipped: usize = cand_counts
            .iter()
            .map(|(gram, c)| (*c).min(max_ref.get(gram).copied().unwrap_or(0)))
            .sum();
        let precision = if clipped > 0 {
            clipped as f64 / total as f64
        } else if n == 1 {
            return 0.0;
        } else {
            1.0 / (2.0 * total.max(1) as f64)
        };
        log_sum += precision.ln();
    }

    let c = cand.len();
    let ref_lens: Vec<usize> = refs.iter().map(Vec::len).collect();
    let r = closest_reference_length(c, &ref_lens);
    let brevity = if c < r {
        (1.0 - r as f64 / c as f64).exp()
    } else {
        1.0
    };
    brevity * (log_sum / MAX_ORDER as f64).exp()
}
