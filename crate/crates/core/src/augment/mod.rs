//! Pseudo-gloss synthesis from annotated spoken-language sentences.
//!
//! Two rule systems are provided: [`general`] (POS filter, random drop,
//! lemmatisation, bounded random permutation) and [`specific`] (a fixed
//! German→DGS rewrite). Both map one [`AnnotatedSentence`] to a
//! [`GlossSequence`], or to `None` when nothing survives.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::conllu::{AnnotatedSentence, Upos};
use crate::error::{Error, Result};
use crate::parallel::Origin;

pub mod general;
pub mod specific;

pub use general::{augment_general, bounded_permutation, lemma_project, pos_filter, random_drop};
pub use specific::{
    augment_specific, compound_head, find_svo_triplets, front_tokens, negation_to_end, svo_to_sov, ClauseTriplet,
    FrontSelector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Casing {
    Preserve,
    #[default]
    Upper,
}

impl Casing {
    pub fn apply(self, s: &str) -> String {
        match self {
            Casing::Preserve => s.to_string(),
            Casing::Upper => s.to_uppercase(),
        }
    }
}

impl FromStr for Casing {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "preserve" => Ok(Casing::Preserve),
            "upper" => Ok(Casing::Upper),
            _ => Err(format!("unknown casing {s:?}, expected preserve or upper")),
        }
    }
}

/// Identifiers recorded in [`GlossSequence::applied_rules`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    PosFilter,
    RandomDrop,
    Lemmatize,
    BoundedPermutation,
    SvoToSov,
    FrontAdverbs,
    FrontLocations,
    NegationToEnd,
    CompoundHead,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::PosFilter => "pos_filter",
            Rule::RandomDrop => "random_drop",
            Rule::Lemmatize => "lemmatize",
            Rule::BoundedPermutation => "bounded_permutation",
            Rule::SvoToSov => "svo_to_sov",
            Rule::FrontAdverbs => "front_adverbs",
            Rule::FrontLocations => "front_locations",
            Rule::NegationToEnd => "negation_to_end",
            Rule::CompoundHead => "compound_head",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlossSequence {
    pub glosses: Vec<String>,
    pub applied_rules: Vec<Rule>,
    pub source_id: String,
}

impl GlossSequence {
    pub fn line(&self) -> String {
        self.glosses.join(" ")
    }
}

pub const DEFAULT_DROP_PROB: f64 = 0.2;
pub const DEFAULT_MAX_DISPLACEMENT: usize = 4;
pub const DEFAULT_NEGATION_LEMMAS: [&str; 5] = ["nicht", "nie", "niemals", "nichts", "kein"];

pub fn default_kept_pos() -> BTreeSet<Upos> {
    [Upos::Noun, Upos::Verb, Upos::Adj, Upos::Adv, Upos::Num]
        .into_iter()
        .collect()
}

/// Hyperparameters shared by both rule systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    pub kept_pos: BTreeSet<Upos>,
    pub drop_prob: f64,
    pub max_displacement: usize,
    pub seed: u64,
    pub casing: Casing,
    pub negation_lemmas: BTreeSet<String>,
    /// Run the verb-after-object reordering in the specific rules.
    pub reorder_svo: bool,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            kept_pos: default_kept_pos(),
            drop_prob: DEFAULT_DROP_PROB,
            max_displacement: DEFAULT_MAX_DISPLACEMENT,
            seed: 0,
            casing: Casing::Upper,
            negation_lemmas: DEFAULT_NEGATION_LEMMAS.iter().map(|s| s.to_string()).collect(),
            reorder_svo: true,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.drop_prob) {
            return Err(Error::Config(format!(
                "drop probability must lie in [0, 1], got {}",
                self.drop_prob
            )));
        }
        Ok(())
    }

    pub fn is_negation(&self, lemma: &str) -> bool {
        self.negation_lemmas.contains(&lemma.to_lowercase())
    }
}

/// Which rule system to run over a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleSet {
    General,
    Specific,
}

impl RuleSet {
    pub fn origin(self) -> Origin {
        match self {
            RuleSet::General => Origin::SyntheticGeneral,
            RuleSet::Specific => Origin::SyntheticSpecific,
        }
    }

    /// Runs the rule system on the sentence at corpus position `ordinal`.
    /// The general rules draw from a stream seeded by `(cfg.seed, ordinal)`.
    pub fn apply(
        self,
        sentence: &AnnotatedSentence,
        cfg: &AugmentConfig,
        ordinal: u64,
    ) -> Result<Option<GlossSequence>> {
        match self {
            RuleSet::General => {
                let mut rng = sentence_rng(cfg.seed, ordinal);
                augment_general(sentence, cfg, &mut rng)
            }
            RuleSet::Specific => augment_specific(sentence, cfg),
        }
    }
}

impl FromStr for RuleSet {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "general" => Ok(RuleSet::General),
            "specific" => Ok(RuleSet::Specific),
            _ => Err(format!("unknown rule set {s:?}, expected general or specific")),
        }
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives an independent seed for one sentence of a corpus.
pub fn mix_seed(seed: u64, ordinal: u64) -> u64 {
    splitmix64(seed ^ splitmix64(ordinal))
}

pub fn sentence_rng(seed: u64, ordinal: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(seed, ordinal))
}
