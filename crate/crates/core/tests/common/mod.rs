//! Fuzzers and independent oracles shared by the integration tests.
//!
//! Nothing here calls into the rule, BPE or BLEU implementations; the oracles
//! are written from the rule definitions directly.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use glossaug::conllu::{AnnotatedSentence, Ner, Token, Upos};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

const LEMMAS: [&str; 16] = [
    "wetter", "regen", "sonne", "nicht", "kein", "nie", "morgen", "heute", "süd", "nord", "wind", "scheinen", "regnen",
    "schnee", "nichts", "niemals",
];
const DEPRELS: [&str; 11] = [
    "nsubj",
    "obj",
    "det",
    "advmod",
    "obl",
    "case",
    "conj",
    "cc",
    "punct",
    "amod",
    "nsubj:pass",
];

/// A random well-formed dependency tree of `n` tokens.
pub fn random_sentence<R: Rng>(rng: &mut R, n: usize, id: usize) -> AnnotatedSentence {
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(rng);
    let mut heads = vec![0usize; n + 1];
    for k in 1..n {
        heads[order[k]] = order[rng.gen_range(0..k)];
    }
    let tags: Vec<Upos> = (0..=n)
        .map(|_| {
            if rng.gen_bool(0.25) {
                Upos::Verb
            } else {
                Upos::ALL[rng.gen_range(0..Upos::ALL.len())]
            }
        })
        .collect();
    let tokens = (1..=n)
        .map(|i| {
            let upos = tags[i];
            let lemma = LEMMAS[rng.gen_range(0..LEMMAS.len())];
            let form = if rng.gen_bool(0.5) {
                lemma.to_string()
            } else {
                format!("{lemma}e")
            };
            let deprel = if heads[i] == 0 {
                "root"
            } else if matches!(tags[heads[i]], Upos::Verb | Upos::Aux) && rng.gen_bool(0.7) {
                ["nsubj", "obj", "obj", "nsubj"][rng.gen_range(0..4)]
            } else {
                DEPRELS[rng.gen_range(0..DEPRELS.len())]
            };
            let mut t = Token::new(i, &form, lemma, upos, heads[i], deprel);
            let ner = match rng.gen_range(0..10) {
                0 | 1 => Ner::Loc,
                2 => Ner::Per,
                _ => Ner::O,
            };
            t = t.with_ner(ner);
            if upos == Upos::Noun && rng.gen_bool(0.3) {
                t = t.with_compound(&format!("{}|{}", capitalize(lemma), "Bericht"));
            }
            t
        })
        .collect();
    AnnotatedSentence::new(format!("fuzz-{id}"), tokens)
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

/// All permutations of `0..n` with displacement at most `d`, by enumeration.
pub fn bounded_permutations(n: usize, d: usize) -> BTreeSet<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut all = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut all);
    all.into_iter()
        .filter(|p| p.iter().enumerate().all(|(pos, &orig)| pos.abs_diff(orig) <= d))
        .collect()
}

/// Straight-line German→DGS rewrite, written from the rule list:
/// swap verb behind object, keep content words (and negations), adverbs to
/// the front, locations to the front, negations to the end, compounds to
/// their first part, lemmatise and uppercase.
pub fn oracle_specific(s: &AnnotatedSentence, negations: &BTreeSet<String>) -> Option<String> {
    let n = s.tokens.len();
    // Work on positions into the original token vector.
    let mut seq: Vec<usize> = (0..n).collect();
    let pos_of_index: HashMap<usize, usize> = s.tokens.iter().enumerate().map(|(p, t)| (t.index, p)).collect();

    // Step 1.
    let mut moves: Vec<(usize, Vec<usize>)> = Vec::new();
    for (vp, v) in s.tokens.iter().enumerate() {
        if !(v.upos == Upos::Verb || v.upos == Upos::Aux) {
            continue;
        }
        let rel = |t: &Token| t.deprel.split(':').next().unwrap().to_string();
        let subj = s.tokens.iter().find(|t| t.head == v.index && rel(t) == "nsubj");
        let obj = s
            .tokens
            .iter()
            .find(|t| t.head == v.index && (rel(t) == "obj" || rel(t) == "dobj"));
        let (Some(_), Some(obj)) = (subj, obj) else { continue };
        // Descendants of the object by repeated closure.
        let mut desc: BTreeSet<usize> = BTreeSet::from([obj.index]);
        loop {
            let before = desc.len();
            for t in &s.tokens {
                if desc.contains(&t.head) {
                    desc.insert(t.index);
                }
            }
            if desc.len() == before {
                break;
            }
        }
        let op = pos_of_index[&obj.index];
        let (mut lo, mut hi) = (op, op);
        while lo > 0 && desc.contains(&s.tokens[lo - 1].index) {
            lo -= 1;
        }
        while hi + 1 < n && desc.contains(&s.tokens[hi + 1].index) {
            hi += 1;
        }
        moves.push((vp, (lo..=hi).collect()));
    }
    for (verb, span) in moves {
        let v_at = seq.iter().position(|&p| p == verb).unwrap();
        let last = seq
            .iter()
            .enumerate()
            .filter(|(_, p)| span.contains(p))
            .map(|(i, _)| i)
            .max()
            .unwrap();
        if v_at < last {
            let v = seq.remove(v_at);
            seq.insert(last, v);
        }
    }

    let is_neg = |p: usize| {
        let l = &s.tokens[p].lemma;
        !l.is_empty() && l != "_" && negations.contains(&l.to_lowercase())
    };
    // Step 2.
    let content = [Upos::Noun, Upos::Verb, Upos::Adj, Upos::Adv, Upos::Num];
    seq.retain(|&p| content.contains(&s.tokens[p].upos) || is_neg(p));
    if seq.is_empty() {
        return None;
    }
    // Steps 3 and 4.
    let adv = |p: &usize| s.tokens[*p].upos == Upos::Adv;
    let mut a: Vec<usize> = seq.iter().copied().filter(adv).collect();
    a.extend(seq.iter().copied().filter(|p| !adv(p)));
    seq = a;
    let loc = |p: &usize| s.tokens[*p].ner() == Ner::Loc && s.tokens[*p].upos != Upos::Adv;
    let mut b: Vec<usize> = seq.iter().copied().filter(loc).collect();
    b.extend(seq.iter().copied().filter(|p| !loc(p)));
    seq = b;
    // Step 5.
    let mut c: Vec<usize> = seq.iter().copied().filter(|&p| !is_neg(p)).collect();
    c.extend(seq.iter().copied().filter(|&p| is_neg(p)));
    seq = c;
    // Steps 6 and 7.
    let words: Vec<String> = seq
        .iter()
        .map(|&p| {
            let t = &s.tokens[p];
            let word = match (t.upos, t.compound()) {
                (Upos::Noun, Some(seg)) => seg.split('|').next().unwrap().to_string(),
                _ => t.lemma.clone(),
            };
            word.to_uppercase()
        })
        .collect();
    Some(words.join(" "))
}

/// BPE learning by full recount at every step.
pub fn oracle_bpe_merges(words: &[(&str, usize)], n_merges: usize) -> Vec<(String, String)> {
    let mut vocab: Vec<(Vec<String>, usize)> = words
        .iter()
        .map(|(w, f)| {
            let chars: Vec<char> = w.chars().collect();
            let mut syms: Vec<String> = chars.iter().map(|c| c.to_string()).collect();
            let last = syms.len() - 1;
            syms[last] = format!("{}</w>", syms[last]);
            (syms, *f)
        })
        .collect();
    let mut merges = Vec::new();
    for _ in 0..n_merges {
        let mut counts: HashMap<(String, String), usize> = HashMap::new();
        for (syms, f) in &vocab {
            for i in 0..syms.len().saturating_sub(1) {
                *counts.entry((syms[i].clone(), syms[i + 1].clone())).or_default() += f;
            }
        }
        let best = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(p, c)| (p.clone(), *c));
        let Some((pair, count)) = best else { break };
        if count < 2 {
            break;
        }
        for (syms, _) in vocab.iter_mut() {
            let mut out = Vec::new();
            let mut i = 0;
            while i < syms.len() {
                if i + 1 < syms.len() && syms[i] == pair.0 && syms[i + 1] == pair.1 {
                    out.push(format!("{}{}", pair.0, pair.1));
                    i += 2;
                } else {
                    out.push(syms[i].clone());
                    i += 1;
                }
            }
            *syms = out;
        }
        merges.push(pair);
    }
    merges
}

/// Corpus BLEU from the textbook definition, n-grams keyed as joined strings.
pub fn oracle_bleu(hyps: &[String], refs: &[String]) -> f64 {
    let mut hit = [0f64; 4];
    let mut tot = [0f64; 4];
    let (mut c, mut r) = (0f64, 0f64);
    for (h, rf) in hyps.iter().zip(refs) {
        let h: Vec<&str> = h.split_whitespace().collect();
        let rf: Vec<&str> = rf.split_whitespace().collect();
        c += h.len() as f64;
        r += rf.len() as f64;
        for n in 1..=4 {
            let grams = |toks: &[&str]| {
                let mut m: HashMap<String, f64> = HashMap::new();
                for i in 0..toks.len().saturating_sub(n - 1) {
                    if i + n <= toks.len() {
                        *m.entry(toks[i..i + n].join(" ")).or_default() += 1.0;
                    }
                }
                m
            };
            let hg = grams(&h);
            let rg = grams(&rf);
            for (g, k) in &hg {
                hit[n - 1] += k.min(*rg.get(g).unwrap_or(&0.0));
                tot[n - 1] += k;
            }
        }
    }
    if (0..4).any(|i| tot[i] == 0.0 || hit[i] == 0.0) {
        return 0.0;
    }
    let prod: f64 = (0..4).map(|i| hit[i] / tot[i]).product();
    let bp = if c < r { (1.0 - r / c).exp() } else { 1.0 };
    100.0 * bp * prod.powf(0.25)
}

/// Random corpus of short lines over a small vocabulary.
pub fn random_corpus<R: Rng>(rng: &mut R, lines: usize, vocab: &[&str]) -> Vec<String> {
    (0..lines)
        .map(|_| {
            let len = rng.gen_range(1..12);
            (0..len)
                .map(|_| vocab[rng.gen_range(0..vocab.len())])
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect()
}
