//! German→DGS rewrite rules.
//!
//! The rewrite is deterministic and runs, in order: verb-after-object
//! reordering, POS filter (negation words exempt), adverb fronting, location
//! fronting, negation postposition, compound-head reduction and
//! lemmatisation. Location fronting runs after adverb fronting, so locations
//! end up in front of the adverb block.

use std::collections::{BTreeSet, HashSet};
use std::ops::RangeInclusive;

use super::general::{lemma_project, retain_tokens};
use super::{AugmentConfig, GlossSequence, Rule};
use crate::conllu::{AnnotatedSentence, Ner, Token, Upos};
use crate::error::{Error, Result};

/// A verb with both a nominal subject and a direct object.
///
/// Fields are token indices; `object_span` is the 1-based position range of
/// the contiguous part of the object's subtree around its head.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseTriplet {
    pub subject_head: usize,
    pub verb: usize,
    pub object_head: usize,
    pub object_span: RangeInclusive<usize>,
}

fn is_verb(t: &Token) -> bool {
    matches!(t.upos, Upos::Verb | Upos::Aux)
}

fn is_subject(t: &Token) -> bool {
    t.base_deprel() == "nsubj"
}

fn is_object(t: &Token) -> bool {
    matches!(t.base_deprel(), "obj" | "dobj")
}

fn subtree(s: &AnnotatedSentence, root: usize) -> HashSet<usize> {
    let mut members = HashSet::from([root]);
    let mut frontier = vec![root];
    while let Some(node) = frontier.pop() {
        for t in &s.tokens {
            if t.head == node && members.insert(t.index) {
                frontier.push(t.index);
            }
        }
    }
    members
}

pub fn find_svo_triplets(s: &AnnotatedSentence) -> Vec<ClauseTriplet> {
    let mut out = Vec::new();
    for verb in s.tokens.iter().filter(|t| is_verb(t)) {
        let children = || s.tokens.iter().filter(|t| t.head == verb.index);
        let (Some(subj), Some(obj)) = (children().find(|t| is_subject(t)), children().find(|t| is_object(t))) else {
            continue;
        };
        let members = subtree(s, obj.index);
        let in_tree = |pos: usize| members.contains(&s.tokens[pos].index);
        let Some(head_pos) = s.tokens.iter().position(|t| t.index == obj.index) else {
            continue;
        };
        let mut start = head_pos;
        while start > 0 && in_tree(start - 1) {
            start -= 1;
        }
        let mut end = head_pos;
        while end + 1 < s.tokens.len() && in_tree(end + 1) {
            end += 1;
        }
        out.push(ClauseTriplet {
            subject_head: subj.index,
            verb: verb.index,
            object_head: obj.index,
            object_span: start + 1..=end + 1,
        });
    }
    out
}

/// Moves each triplet's verb to just after its object span.
pub fn svo_to_sov(s: &AnnotatedSentence) -> AnnotatedSentence {
    let triplets = find_svo_triplets(s);
    if triplets.is_empty() {
        return s.clone();
    }
    let span_ids: Vec<HashSet<usize>> = triplets
        .iter()
        .map(|tr| {
            s.tokens[*tr.object_span.start() - 1..*tr.object_span.end()]
                .iter()
                .map(|t| t.index)
                .collect()
        })
        .collect();
    let mut tokens = s.tokens.clone();
    let mut moved = HashSet::new();
    for (tr, span) in triplets.iter().zip(&span_ids) {
        if moved.contains(&tr.verb) {
            continue;
        }
        let verb_pos = tokens.iter().position(|t| t.index == tr.verb);
        let span_end = tokens.iter().rposition(|t| span.contains(&t.index));
        let (Some(verb_pos), Some(span_end)) = (verb_pos, span_end) else {
            continue;
        };
        if verb_pos > span_end {
            continue;
        }
        let verb = tokens.remove(verb_pos);
        tokens.insert(span_end, verb);
        moved.insert(tr.verb);
    }
    s.with_tokens(tokens)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrontSelector {
    /// `upos = ADV`.
    Adverb,
    /// `NER = LOC`, excluding adverbs, which the adverb pass already fronted.
    Location,
}

impl FrontSelector {
    fn matches(self, t: &Token) -> bool {
        match self {
            FrontSelector::Adverb => t.upos == Upos::Adv,
            FrontSelector::Location => t.ner() == Ner::Loc && t.upos != Upos::Adv,
        }
    }
}

fn stable_partition(s: &AnnotatedSentence, to_front: impl Fn(&Token) -> bool) -> AnnotatedSentence {
    let (mut front, back): (Vec<Token>, Vec<Token>) = s.tokens.iter().cloned().partition(|t| to_front(t));
    front.extend(back);
    s.with_tokens(front)
}

pub fn front_tokens(s: &AnnotatedSentence, selector: FrontSelector) -> AnnotatedSentence {
    stable_partition(s, |t| selector.matches(t))
}

fn lemma_in(t: &Token, lemmas: &BTreeSet<String>) -> bool {
    t.lemma().map(|l| lemmas.contains(&l.to_lowercase())).unwrap_or(false)
}

pub fn negation_to_end(s: &AnnotatedSentence, negation_lemmas: &BTreeSet<String>) -> AnnotatedSentence {
    stable_partition(s, |t| !lemma_in(t, negation_lemmas))
}

/// Replaces each segmented noun by its first constituent.
pub fn compound_head(s: &AnnotatedSentence) -> Result<AnnotatedSentence> {
    let tokens = s
        .tokens
        .iter()
        .map(|t| {
            let Some(seg) = t.compound().filter(|_| t.upos == Upos::Noun) else {
                return Ok(t.clone());
            };
            let parts: Vec<&str> = seg.split('|').collect();
            if parts.iter().any(|p| p.trim().is_empty()) {
                return Err(Error::MalformedCompound {
                    index: t.index,
                    form: t.form.clone(),
                    value: seg.to_string(),
                });
            }
            let mut t = t.clone();
            t.form = parts[0].to_string();
            t.lemma = parts[0].to_string();
            Ok(t)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(s.with_tokens(tokens))
}

pub fn augment_specific(s: &AnnotatedSentence, cfg: &AugmentConfig) -> Result<Option<GlossSequence>> {
    cfg.validate()?;
    let mut rules = Vec::with_capacity(7);
    let mut cur = if cfg.reorder_svo {
        rules.push(Rule::SvoToSov);
        svo_to_sov(s)
    } else {
        s.clone()
    };
    cur = retain_tokens(&cur, |t| {
        cfg.kept_pos.contains(&t.upos) || lemma_in(t, &cfg.negation_lemmas)
    });
    rules.push(Rule::PosFilter);
    if cur.is_empty() {
        return Ok(None);
    }
    cur = front_tokens(&cur, FrontSelector::Adverb);
    cur = front_tokens(&cur, FrontSelector::Location);
    cur = negation_to_end(&cur, &cfg.negation_lemmas);
    cur = compound_head(&cur)?;
    cur = lemma_project(&cur, cfg.casing)?;
    rules.extend([
        Rule::FrontAdverbs,
        Rule::FrontLocations,
        Rule::NegationToEnd,
        Rule::CompoundHead,
        Rule::Lemmatize,
    ]);
    Ok(Some(GlossSequence {
        glosses: cur.tokens.into_iter().map(|t| t.form).collect(),
        applied_rules: rules,
        source_id: s.id.clone(),
    }))
}
