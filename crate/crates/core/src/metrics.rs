//! Lexical and syntactic similarity between two languages.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

/// The set of word types observed in a corpus.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeSet {
    pub language_tag: String,
    pub types: HashSet<String>,
    pub token_count: usize,
}

impl TypeSet {
    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }
}

pub fn build_type_set<I, S>(language_tag: &str, tokens: I, casefold: bool) -> TypeSet
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut set = TypeSet {
        language_tag: language_tag.to_string(),
        ..Default::default()
    };
    for tok in tokens {
        let tok = tok.as_ref();
        set.token_count += 1;
        if casefold {
            set.types.insert(tok.to_lowercase());
        } else {
            set.types.insert(tok.to_string());
        }
    }
    set
}

/// Type set over the whitespace tokens of a text.
pub fn type_set_from_text(language_tag: &str, text: &str, casefold: bool) -> TypeSet {
    build_type_set(language_tag, text.split_whitespace(), casefold)
}

/// `|A ∩ B| / (|A| + |B|)` kept as an exact fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WordOverlap {
    pub shared: usize,
    pub total: usize,
}

impl WordOverlap {
    pub fn value(&self) -> f64 {
        self.shared as f64 / self.total as f64
    }
}

pub fn word_overlap(a: &TypeSet, b: &TypeSet) -> Result<WordOverlap> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty("word overlap needs two non-empty type sets".into()));
    }
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    let shared = small.types.iter().filter(|t| large.types.contains(*t)).count();
    Ok(WordOverlap {
        shared,
        total: a.len() + b.len(),
    })
}

/// Typological feature vector; `None` marks a missing value.
pub type FeatureVector = Vec<Option<f64>>;

/// One minus the cosine distance, over coordinates present in both vectors.
pub fn syntactic_similarity(a: &[Option<f64>], b: &[Option<f64>]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Config(format!(
            "feature vectors differ in length: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let (mut dot, mut na, mut nb, mut joint) = (0.0, 0.0, 0.0, 0usize);
    for (x, y) in a.iter().zip(b) {
        if let (Some(x), Some(y)) = (x, y) {
            dot += x * y;
            na += x * x;
            nb += y * y;
            joint += 1;
        }
    }
    if joint == 0 {
        return Err(Error::Empty("no feature present in both vectors".into()));
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::Config("zero-norm feature vector".into()));
    }
    let cosine = dot / (na.sqrt() * nb.sqrt());
    let distance = 1.0 - cosine;
    Ok((1.0 - distance).clamp(-1.0, 1.0))
}

/// Feature table: a tab-separated file with a header row, the language tag in
/// the first column and numeric features after it (`--` for missing).
#[derive(Debug, Clone, Default)]
pub struct FeatureTable {
    pub features: Vec<String>,
    pub rows: BTreeMap<String, FeatureVector>,
}

impl FeatureTable {
    pub fn parse(text: &str) -> Result<FeatureTable> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let Some((_, header)) = lines.next() else {
            return Err(Error::Empty("feature table has no header".into()));
        };
        let features: Vec<String> = header.split('\t').skip(1).map(str::to_string).collect();
        let mut rows = BTreeMap::new();
        for (i, line) in lines {
            let mut cols = line.split('\t');
            let tag = cols.next().unwrap_or_default().to_string();
            let values = cols
                .map(|c| match c.trim() {
                    "--" | "" => Ok(None),
                    v => v.parse::<f64>().map(Some).map_err(|_| Error::Parse {
                        line: i + 1,
                        message: format!("non-numeric feature value {v:?}"),
                    }),
                })
                .collect::<Result<FeatureVector>>()?;
            if values.len() != features.len() {
                return Err(Error::Parse {
                    line: i + 1,
                    message: format!("expected {} features, found {}", features.len(), values.len()),
                });
            }
            rows.insert(tag, values);
        }
        Ok(FeatureTable { features, rows })
    }

    pub fn load(path: &Path) -> Result<FeatureTable> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FeatureTable::parse(&text)
    }

    pub fn get(&self, tag: &str) -> Result<&FeatureVector> {
        self.rows
            .get(tag)
            .ok_or_else(|| Error::Config(format!("language {tag:?} not in feature table")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub pair: (String, String),
    pub o_w: f64,
    pub shared_types: usize,
    pub types_a: usize,
    pub types_b: usize,
    pub s_syn: Option<f64>,
}

impl SimilarityReport {
    pub fn new(a: &TypeSet, b: &TypeSet, s_syn: Option<f64>) -> Result<SimilarityReport> {
        let overlap = word_overlap(a, b)?;
        Ok(SimilarityReport {
            pair: (a.language_tag.clone(), b.language_tag.clone()),
            o_w: overlap.value(),
            shared_types: overlap.shared,
            types_a: a.len(),
            types_b: b.len(),
            s_syn,
        })
    }

    /// Two-column `lexical\tsyntactic` table with a label column in front.
    pub fn scatter_table(&self) -> String {
        let syn = self.s_syn.map(|v| v.to_string()).unwrap_or_else(|| "NA".into());
        format!(
            "pair\tlexical\tsyntactic\n{}-{}\t{}\t{}\n",
            self.pair.0, self.pair.1, self.o_w, syn
        )
    }
}
