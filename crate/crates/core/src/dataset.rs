//! Dataset statistics, fraction subsampling and curriculum stage assembly.
//!
//! A curriculum has three stages: `pretrain` (synthetic pairs only),
//! `mixed` (equal numbers of synthetic and real pairs, shuffled) and
//! `finetune` (real pairs only). Fractions always apply to the real data.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::augment::sentence_rng;
use crate::error::{Error, Result};
use crate::parallel::{Origin, ParallelPair};

/// Data fractions used when varying the amount of annotated data.
pub const STANDARD_FRACTIONS: [f64; 4] = [0.01, 0.05, 0.25, 1.0];

const SUBSAMPLE_STREAM: u64 = 1;
const SYNTHETIC_STREAM: u64 = 2;
const SHUFFLE_STREAM: u64 = 3;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VocabStats {
    pub gloss_types: usize,
    pub text_types: usize,
    pub pair_count: usize,
}

pub fn vocab_stats(pairs: &[ParallelPair]) -> VocabStats {
    let mut gloss: HashSet<&str> = HashSet::new();
    let mut text: HashSet<&str> = HashSet::new();
    for p in pairs {
        gloss.extend(p.gloss().glosses.iter().map(String::as_str));
        text.extend(p.text().split_whitespace());
    }
    VocabStats {
        gloss_types: gloss.len(),
        text_types: text.len(),
        pair_count: pairs.len(),
    }
}

/// Uniform sample of `round(fraction * n)` pairs, in their original order.
pub fn subsample_fraction(pairs: &[ParallelPair], fraction: f64, seed: u64) -> Result<Vec<ParallelPair>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!("fraction must lie in (0, 1], got {fraction}")));
    }
    let k = (fraction * pairs.len() as f64).round() as usize;
    if k == 0 {
        return Err(Error::Empty(format!(
            "fraction {fraction} of {} pairs selects nothing",
            pairs.len()
        )));
    }
    if k == pairs.len() {
        return Ok(pairs.to_vec());
    }
    let mut rng = sentence_rng(seed, SUBSAMPLE_STREAM);
    let mut picked = index::sample(&mut rng, pairs.len(), k).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| pairs[i].clone()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Pretrain,
    Mixed,
    Finetune,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Pretrain => "pretrain",
            Stage::Mixed => "mixed",
            Stage::Finetune => "finetune",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pretrain" => Ok(Stage::Pretrain),
            "mixed" => Ok(Stage::Mixed),
            "finetune" => Ok(Stage::Finetune),
            _ => Err(format!("unknown stage {s:?}, expected pretrain, mixed or finetune")),
        }
    }
}

pub struct MixPlan<'a> {
    pub real: &'a [ParallelPair],
    pub synthetic: &'a [ParallelPair],
    pub stage: Stage,
    pub fraction: f64,
    pub seed: u64,
}

pub fn build_stage(plan: &MixPlan<'_>) -> Result<Vec<ParallelPair>> {
    match plan.stage {
        Stage::Pretrain => {
            if plan.synthetic.is_empty() {
                return Err(Error::Empty("pretrain stage needs synthetic pairs".into()));
            }
            Ok(plan.synthetic.to_vec())
        }
        Stage::Finetune => {
            if plan.real.is_empty() {
                return Err(Error::Empty("finetune stage needs real pairs".into()));
            }
            subsample_fraction(plan.real, plan.fraction, plan.seed)
        }
        Stage::Mixed => {
            if plan.real.is_empty() || plan.synthetic.is_empty() {
                return Err(Error::Empty("mixed stage needs real and synthetic pairs".into()));
            }
            let real = subsample_fraction(plan.real, plan.fraction, plan.seed)?;
            let k = real.len();
            if plan.synthetic.len() < k {
                return Err(Error::InsufficientSynthetic {
                    required: k,
                    available: plan.synthetic.len(),
                });
            }
            let mut rng = sentence_rng(plan.seed, SYNTHETIC_STREAM);
            let mut out: Vec<ParallelPair> = index::sample(&mut rng, plan.synthetic.len(), k)
                .into_iter()
                .map(|i| plan.synthetic[i].clone())
                .collect();
            out.extend(real);
            out.shuffle(&mut sentence_rng(plan.seed, SHUFFLE_STREAM));
            Ok(out)
        }
    }
}

pub fn origin_counts(pairs: &[ParallelPair]) -> Vec<(Origin, usize)> {
    let mut counts: Vec<(Origin, usize)> = Vec::new();
    for p in pairs {
        match counts.iter_mut().find(|(o, _)| *o == p.origin()) {
            Some((_, c)) => *c += 1,
            None => counts.push((p.origin(), 1)),
        }
    }
    counts
}
