//! Pseudo-parallel gloss/text data for gloss-to-text translation.
//!
//! Annotated spoken-language sentences ([`conllu`]) are rewritten into
//! sign-language-style gloss sequences by the rule systems in [`augment`].
//! Around that sit the pieces an experiment needs: parallel file layout
//! ([`parallel`]), corpus similarity ([`metrics`]), subword segmentation
//! ([`bpe`]), BLEU scoring ([`bleu`]) and curriculum data assembly
//! ([`dataset`]). [`cli`] exposes all of it as one binary.

pub mod augment;
pub mod bleu;
pub mod bpe;
pub mod cli;
pub mod conllu;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod parallel;

pub use error::{Error, Result};
