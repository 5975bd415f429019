//! Byte-pair-encoding subword segmentation.
//!
//! Words start as character sequences whose last character carries the
//! end-of-word suffix `</w>`. Learning repeatedly merges the most frequent
//! adjacent pair; ties go to the lexicographically smallest pair. Segmented
//! text marks every non-final piece of a word with a continuation marker
//! (`wet@@ ter`).

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const END_OF_WORD: &str = "</w>";
pub const DEFAULT_MARKER: &str = "@@";
const CODES_HEADER: &str = "#version: 0.2";

pub type Pair = (String, String);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BpeModel {
    pub merges: Vec<Pair>,
    pub marker: String,
    pub vocab_threshold: usize,
    ranks: HashMap<Pair, usize>,
}

impl BpeModel {
    pub fn new(merges: Vec<Pair>, marker: &str) -> Result<BpeModel> {
        let mut ranks = HashMap::with_capacity(merges.len());
        for (i, pair) in merges.iter().enumerate() {
            if ranks.insert(pair.clone(), i).is_some() {
                return Err(Error::Config(format!("duplicate merge {} {}", pair.0, pair.1)));
            }
        }
        Ok(BpeModel {
            merges,
            marker: marker.to_string(),
            vocab_threshold: 1,
            ranks,
        })
    }

    /// Reads a codes file: an optional `#version` header, then one
    /// space-separated pair per line in merge order.
    pub fn from_codes(text: &str, marker: &str) -> Result<BpeModel> {
        let mut merges = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.starts_with("#version") || line.is_empty() {
                continue;
            }
            let mut parts = line.split(' ');
            match (parts.next(), parts.next(), parts.next()) {
                (Some(a), Some(b), None) if !a.is_empty() && !b.is_empty() => {
                    merges.push((a.to_string(), b.to_string()))
                }
                _ => {
                    return Err(Error::Parse {
                        line: i + 1,
                        message: format!("expected two space-separated symbols, got {line:?}"),
                    })
                }
            }
        }
        BpeModel::new(merges, marker)
    }

    pub fn to_codes(&self) -> String {
        let mut out = String::from(CODES_HEADER);
        out.push('\n');
        for (a, b) in &self.merges {
            out.push_str(a);
            out.push(' ');
            out.push_str(b);
            out.push('\n');
        }
        out
    }

    pub fn load(path: &Path, marker: &str) -> Result<BpeModel> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        BpeModel::from_codes(&text, marker)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_codes()).map_err(|e| Error::io(path, e))
    }

    /// Segments one word into symbols; the last keeps its `</w>` suffix.
    pub fn segment_word(&self, word: &str) -> Vec<String> {
        let mut symbols = initial_symbols(word);
        while symbols.len() > 1 {
            let best = symbols
                .windows(2)
                .filter_map(|w| self.ranks.get(&(w[0].clone(), w[1].clone())).copied())
                .min();
            let Some(rank) = best else { break };
            let (a, b) = &self.merges[rank];
            symbols = merge_pair(&symbols, a, b);
        }
        symbols
    }

    /// Segments a whitespace-tokenised line.
    pub fn apply(&self, line: &str) -> String {
        let mut out = String::with_capacity(line.len() * 2);
        for word in line.split_whitespace() {
            let symbols = self.segment_word(word);
            let last = symbols.len() - 1;
            for (i, sym) in symbols.iter().enumerate() {
                if !out.is_empty() {
                    out.push(' ');
                }
                if i == last {
                    out.push_str(sym.strip_suffix(END_OF_WORD).unwrap_or(sym));
                } else {
                    out.push_str(sym);
                    out.push_str(&self.marker);
                }
            }
        }
        out
    }

    /// Every symbol the model can produce on words over `alphabet`.
    pub fn derivable_symbols(&self, alphabet: &HashSet<char>) -> HashSet<String> {
        let mut out: HashSet<String> = alphabet
            .iter()
            .flat_map(|c| [c.to_string(), format!("{c}{END_OF_WORD}")])
            .collect();
        out.extend(self.merges.iter().map(|(a, b)| format!("{a}{b}")));
        out
    }
}

fn initial_symbols(word: &str) -> Vec<String> {
    let mut symbols: Vec<String> = word.chars().map(String::from).collect();
    if let Some(last) = symbols.last_mut() {
        last.push_str(END_OF_WORD);
    }
    symbols
}

fn merge_pair(symbols: &[String], a: &str, b: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(symbols.len());
    let mut i = 0;
    while i < symbols.len() {
        if i + 1 < symbols.len() && symbols[i] == a && symbols[i + 1] == b {
            out.push(format!("{a}{b}"));
            i += 2;
        } else {
            out.push(symbols[i].clone());
            i += 1;
        }
    }
    out
}

/// Incremental pair statistics over a word-frequency table.
struct PairStats {
    counts: HashMap<Pair, i64>,
    queue: BTreeSet<(Reverse<i64>, Pair)>,
    index: HashMap<Pair, HashSet<usize>>,
}

impl PairStats {
    fn adjust(&mut self, pair: &Pair, delta: i64) {
        let count = self.counts.entry(pair.clone()).or_insert(0);
        if *count > 0 {
            self.queue.remove(&(Reverse(*count), pair.clone()));
        }
        *count += delta;
        if *count > 0 {
            self.queue.insert((Reverse(*count), pair.clone()));
        }
    }

    fn add_word(&mut self, id: usize, symbols: &[String], freq: i64) {
        for w in symbols.windows(2) {
            let pair = (w[0].clone(), w[1].clone());
            self.adjust(&pair, freq);
            self.index.entry(pair).or_default().insert(id);
        }
    }

    fn remove_word(&mut self, symbols: &[String], freq: i64) {
        for w in symbols.windows(2) {
            self.adjust(&(w[0].clone(), w[1].clone()), -freq);
        }
    }
}

/// Learns up to `n_merges` merges from a token stream.
pub fn bpe_learn<I, S>(tokens: I, n_merges: usize) -> Result<BpeModel>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    bpe_learn_with(tokens, n_merges, 1, DEFAULT_MARKER)
}

pub fn bpe_learn_with<I, S>(tokens: I, n_merges: usize, vocab_threshold: usize, marker: &str) -> Result<BpeModel>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut freqs: HashMap<String, i64> = HashMap::new();
    for tok in tokens {
        *freqs.entry(tok.as_ref().to_string()).or_insert(0) += 1;
    }
    if freqs.is_empty() {
        return Err(Error::Empty("cannot learn BPE from an empty corpus".into()));
    }
    let mut vocab: Vec<(String, i64)> = freqs
        .into_iter()
        .filter(|(_, f)| *f >= vocab_threshold as i64)
        .collect();
    vocab.sort();
    let mut words: Vec<(Vec<String>, i64)> = vocab.into_iter().map(|(w, f)| (initial_symbols(&w), f)).collect();

    let mut stats = PairStats {
        counts: HashMap::new(),
        queue: BTreeSet::new(),
        index: HashMap::new(),
    };
    for (id, (symbols, freq)) in words.iter().enumerate() {
        stats.add_word(id, symbols, *freq);
    }

    let mut merges = Vec::new();
    while merges.len() < n_merges {
        let Some((Reverse(count), pair)) = stats.queue.first().cloned() else {
            break;
        };
        if count < 2 {
            break;
        }
        let mut ids: Vec<usize> = stats
            .index
            .get(&pair)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default();
        ids.sort_unstable();
        for id in ids {
            let (symbols, freq) = &words[id];
            let freq = *freq;
            if !symbols.windows(2).any(|w| w[0] == pair.0 && w[1] == pair.1) {
                continue;
            }
            let merged = merge_pair(symbols, &pair.0, &pair.1);
            stats.remove_word(symbols, freq);
            stats.add_word(id, &merged, freq);
            words[id].0 = merged;
        }
        merges.push(pair);
    }
    let mut model = BpeModel::new(merges, marker)?;
    model.vocab_threshold = vocab_threshold;
    Ok(model)
}

/// Undoes segmentation by gluing marker-suffixed pieces to their successor.
pub fn bpe_decode(line: &str, marker: &str) -> Result<String> {
    let mut out = String::with_capacity(line.len());
    let mut pending = false;
    for piece in line.split_whitespace() {
        if !pending && !out.is_empty() {
            out.push(' ');
        }
        match piece.strip_suffix(marker) {
            Some(stem) if !marker.is_empty() => {
                out.push_str(stem);
                pending = true;
            }
            _ => {
                out.push_str(piece);
                pending = false;
            }
        }
    }
    if pending {
        return Err(Error::DanglingMarker(line.to_string()));
    }
    Ok(out)
}
