//! Language-agnostic pseudo-gloss rules.
//!
//! The pipeline is POS filter, random drop, lemmatisation and a bounded
//! random permutation, in that order. All randomness comes from a single
//! caller-supplied stream: one uniform draw per token for the drop step,
//! then one sort key per surviving token for the permutation.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;

use super::{AugmentConfig, Casing, GlossSequence, Rule};
use crate::conllu::{AnnotatedSentence, Token, Upos};
use crate::error::{Error, Result};

/// Keeps the tokens matching `keep`; heads pointing at removed tokens become 0.
pub(crate) fn retain_tokens(s: &AnnotatedSentence, keep: impl Fn(&Token) -> bool) -> AnnotatedSentence {
    let kept: Vec<&Token> = s.tokens.iter().filter(|t| keep(t)).collect();
    let survivors: HashSet<usize> = kept.iter().map(|t| t.index).collect();
    let tokens = kept
        .into_iter()
        .map(|t| {
            let mut t = t.clone();
            if t.head != 0 && !survivors.contains(&t.head) {
                t.head = 0;
            }
            t
        })
        .collect();
    s.with_tokens(tokens)
}

pub fn pos_filter(s: &AnnotatedSentence, kept: &BTreeSet<Upos>) -> AnnotatedSentence {
    retain_tokens(s, |t| kept.contains(&t.upos))
}

/// Drops each token independently with probability `p`.
pub fn random_drop<R: Rng + ?Sized>(s: &AnnotatedSentence, p: f64, rng: &mut R) -> AnnotatedSentence {
    let tokens = s.tokens.iter().filter(|_| rng.gen::<f64>() >= p).cloned().collect();
    s.with_tokens(tokens)
}

/// Replaces every form by its lemma under the casing policy.
pub fn lemma_project(s: &AnnotatedSentence, casing: Casing) -> Result<AnnotatedSentence> {
    let tokens = s
        .tokens
        .iter()
        .map(|t| {
            let lemma = t.lemma().ok_or_else(|| Error::MissingLemma {
                index: t.index,
                form: t.form.clone(),
            })?;
            let mut t = t.clone();
            t.form = casing.apply(lemma);
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(s.with_tokens(tokens))
}

/// Random reordering in which no token moves more than `d` positions.
///
/// Token `i` gets the key `i + u` with `u` uniform in `[0, d + 1)` and the
/// tokens are stably sorted by key. Every permutation within the bound has
/// non-zero probability; the distribution over them is not uniform.
pub fn bounded_permutation<R: Rng + ?Sized>(s: &AnnotatedSentence, d: usize, rng: &mut R) -> AnnotatedSentence {
    let width = (d + 1) as f64;
    let mut keyed: Vec<(f64, &Token)> = s
        .tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (i as f64 + rng.gen::<f64>() * width, t))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    s.with_tokens(keyed.into_iter().map(|(_, t)| t.clone()).collect())
}

pub fn augment_general<R: Rng + ?Sized>(
    s: &AnnotatedSentence,
    cfg: &AugmentConfig,
    rng: &mut R,
) -> Result<Option<GlossSequence>> {
    cfg.validate()?;
    let filtered = pos_filter(s, &cfg.kept_pos);
    if filtered.is_empty() {
        return Ok(None);
    }
    let dropped = random_drop(&filtered, cfg.drop_prob, rng);
    let lemmatized = lemma_project(&dropped, cfg.casing)?;
    let permuted = bounded_permutation(&lemmatized, cfg.max_displacement, rng);
    if permuted.is_empty() {
        return Ok(None);
    }
    Ok(Some(GlossSequence {
        glosses: permuted.tokens.into_iter().map(|t| t.form).collect(),
        applied_rules: vec![
            Rule::PosFilter,
            Rule::RandomDrop,
            Rule::Lemmatize,
            Rule::BoundedPermutation,
        ],
        source_id: s.id.clone(),
    }))
}
