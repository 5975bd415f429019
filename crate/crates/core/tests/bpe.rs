mod common;

use std::collections::HashSet;

use glossaug::bpe::{bpe_decode, bpe_learn, BpeModel};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{oracle_bpe_merges, random_corpus};

const TOY: [(&str, usize); 4] = [("low", 5), ("lower", 2), ("newest", 6), ("widest", 3)];

fn expand(words: &[(&str, usize)]) -> Vec<String> {
    words
        .iter()
        .flat_map(|(w, f)| std::iter::repeat_n(w.to_string(), *f))
        .collect()
}

#[test]
fn toy_merges_match_recount_oracle() {
    for n in [0, 1, 2, 4, 8, 20] {
        let model = bpe_learn(expand(&TOY), n).unwrap();
        assert_eq!(model.merges, oracle_bpe_merges(&TOY, n), "n_merges={n}");
    }
    let model = bpe_learn(expand(&TOY), 4).unwrap();
    assert_eq!(model.merges[0], ("e".to_string(), "s".to_string()));
    assert_eq!(model.merges[1], ("es".to_string(), "t</w>".to_string()));
}

#[test]
fn single_word_aaaa() {
    let model = bpe_learn(["aaaa"], 2).unwrap();
    let oracle = oracle_bpe_merges(&[("aaaa", 1)], 2);
    assert_eq!(model.merges, oracle);
    // "a a a a</w>": (a,a) occurs twice; after merging, "aa a a</w>" has no repeated pair.
    assert_eq!(model.merges, [("a".to_string(), "a".to_string())]);
}

#[test]
fn lowest_segmentation_replays_merges() {
    let model = bpe_learn(expand(&TOY), 4).unwrap();
    // Replay the learned merges in order over "l o w e s t</w>".
    let mut syms: Vec<String> = "lowest".chars().map(String::from).collect();
    syms[5] = "t</w>".into();
    for (a, b) in &model.merges {
        let mut out = Vec::new();
        let mut i = 0;
        while i < syms.len() {
            if i + 1 < syms.len() && &syms[i] == a && &syms[i + 1] == b {
                out.push(format!("{a}{b}"));
                i += 2;
            } else {
                out.push(syms[i].clone());
                i += 1;
            }
        }
        syms = out;
    }
    let last = syms.len() - 1;
    let expected: Vec<String> = syms
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if i == last {
                s.trim_end_matches("</w>").to_string()
            } else {
                format!("{s}@@")
            }
        })
        .collect();
    assert_eq!(model.apply("lowest"), expected.join(" "));
    // merges: (e,s) (es,t</w>) (l,o) then the 6-count tie (e,w) < (n,e) < (w,est</w>)
    assert_eq!(model.apply("lowest"), "lo@@ w@@ est");
}

#[test]
fn training_corpus_uses_only_derivable_symbols() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let corpus = random_corpus(
        &mut rng,
        300,
        &["wetter", "regen", "morgen", "sonne", "wind", "süden", "nord", "heute"],
    );
    let model = bpe_learn(corpus.iter().flat_map(|l| l.split_whitespace()), 40).unwrap();
    let alphabet: HashSet<char> = corpus
        .iter()
        .flat_map(|l| l.chars())
        .filter(|c| !c.is_whitespace())
        .collect();
    let vocab = model.derivable_symbols(&alphabet);
    for line in &corpus {
        for word in line.split_whitespace() {
            for sym in model.segment_word(word) {
                assert!(vocab.contains(&sym), "{sym} not derivable");
            }
        }
    }
    assert!(model.merges.len() <= 40);
}

#[test]
fn codes_file_round_trip_preserves_segmentation() {
    let model = bpe_learn(expand(&TOY), 10).unwrap();
    let back = BpeModel::from_codes(&model.to_codes(), "@@").unwrap();
    for w in ["lowest", "newer", "wider", "x"] {
        assert_eq!(back.apply(w), model.apply(w));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decode_inverts_apply(words in prop::collection::vec("[a-zäöü@]{1,10}", 0..12), merges in 0usize..50) {
        let line = words.join(" ");
        prop_assume!(!line.contains("@@"));
        let model = bpe_learn(expand(&TOY).into_iter().chain(words.iter().cloned()), merges).unwrap();
        let seg = model.apply(&line);
        prop_assert_eq!(bpe_decode(&seg, "@@").unwrap(), line);
    }

    #[test]
    fn learning_is_deterministic_and_bounded(words in prop::collection::vec("[abc]{1,6}", 1..40), merges in 0usize..20) {
        let a = bpe_learn(words.iter(), merges).unwrap();
        let b = bpe_learn(words.iter().rev(), merges).unwrap();
        prop_assert_eq!(&a.merges, &b.merges);
        prop_assert!(a.merges.len() <= merges);
        let counted: Vec<(&str, usize)> = {
            let mut m = std::collections::BTreeMap::new();
            for w in &words { *m.entry(w.as_str()).or_insert(0usize) += 1; }
            m.into_iter().collect()
        };
        prop_assert_eq!(a.merges, oracle_bpe_merges(&counted, merges));
    }
}
