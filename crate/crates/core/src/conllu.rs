//! Reading and writing dependency-annotated sentences in CoNLL-U.
//!
//! Only syntactic words are kept: multiword-token ranges (`1-2`) and empty
//! nodes (`8.1`) are skipped on input. Named-entity labels and compound
//! segmentations travel in the MISC column under the keys `NER` and
//! `Compound`. Because a segmentation such as `Wetter|Bericht` uses the MISC
//! separator itself, any `|`-separated piece without `=` that directly follows
//! a `Compound` entry is read as a further constituent of that entry.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NER_KEY: &str = "NER";
pub const COMPOUND_KEY: &str = "Compound";
const SENT_ID_PREFIX: &str = "# sent_id = ";
const TEXT_PREFIX: &str = "# text = ";

/// Universal part-of-speech tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Upos {
    Noun,
    Verb,
    Aux,
    Adj,
    Adv,
    Num,
    Pron,
    Det,
    Adp,
    Part,
    Cconj,
    Sconj,
    Propn,
    Intj,
    Punct,
    Sym,
    X,
}

impl Upos {
    pub const ALL: [Upos; 17] = [
        Upos::Noun,
        Upos::Verb,
        Upos::Aux,
        Upos::Adj,
        Upos::Adv,
        Upos::Num,
        Upos::Pron,
        Upos::Det,
        Upos::Adp,
        Upos::Part,
        Upos::Cconj,
        Upos::Sconj,
        Upos::Propn,
        Upos::Intj,
        Upos::Punct,
        Upos::Sym,
        Upos::X,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Upos::Noun => "NOUN",
            Upos::Verb => "VERB",
            Upos::Aux => "AUX",
            Upos::Adj => "ADJ",
            Upos::Adv => "ADV",
            Upos::Num => "NUM",
            Upos::Pron => "PRON",
            Upos::Det => "DET",
            Upos::Adp => "ADP",
            Upos::Part => "PART",
            Upos::Cconj => "CCONJ",
            Upos::Sconj => "SCONJ",
            Upos::Propn => "PROPN",
            Upos::Intj => "INTJ",
            Upos::Punct => "PUNCT",
            Upos::Sym => "SYM",
            Upos::X => "X",
        }
    }
}

impl fmt::Display for Upos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Upos {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Upos::ALL
            .into_iter()
            .find(|u| u.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown UPOS tag {s:?}"))
    }
}

/// Named-entity label carried in MISC.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Ner {
    #[default]
    O,
    Loc,
    Per,
    Org,
    Misc,
}

impl Ner {
    pub fn as_str(self) -> &'static str {
        match self {
            Ner::O => "O",
            Ner::Loc => "LOC",
            Ner::Per => "PER",
            Ner::Org => "ORG",
            Ner::Misc => "MISC",
        }
    }
}

impl FromStr for Ner {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "O" => Ok(Ner::O),
            "LOC" => Ok(Ner::Loc),
            "PER" => Ok(Ner::Per),
            "ORG" => Ok(Ner::Org),
            "MISC" => Ok(Ner::Misc),
            _ => Err(format!("unknown NER label {s:?}")),
        }
    }
}

/// Ordered MISC column. A `None` value is a bare flag without `=`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Misc {
    entries: Vec<(String, Option<String>)>,
}

impl Misc {
    pub fn parse(raw: &str) -> Misc {
        let mut entries: Vec<(String, Option<String>)> = Vec::new();
        if raw == "_" {
            return Misc { entries };
        }
        for piece in raw.split('|') {
            if let Some((key, value)) = piece.split_once('=') {
                entries.push((key.to_string(), Some(value.to_string())));
                continue;
            }
            match entries.last_mut() {
                Some((key, Some(value))) if key == COMPOUND_KEY => {
                    value.push('|');
                    value.push_str(piece);
                }
                _ => entries.push((piece.to_string(), None)),
            }
        }
        Misc { entries }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .and_then(|(_, v)| v.as_deref())
    }

    /// Replaces the value of `key` in place, or appends it.
    pub fn set(&mut self, key: &str, value: &str) {
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some((_, v)) => *v = Some(value.to_string()),
            None => self.entries.push((key.to_string(), Some(value.to_string()))),
        }
    }

    pub fn remove(&mut self, key: &str) {
        self.entries.retain(|(k, _)| k != key);
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl fmt::Display for Misc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("_");
        }
        for (i, (key, value)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            match value {
                Some(v) => write!(f, "{key}={v}")?,
                None => f.write_str(key)?,
            }
        }
        Ok(())
    }
}

/// One syntactic word.
///
/// `index` is the 1-based position in the sentence as parsed. Rewrite rules
/// reorder and drop tokens but keep `index` as the token's identity, so after
/// a rewrite `index` no longer equals the position and `head` refers to the
/// original numbering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub index: usize,
    pub form: String,
    pub lemma: String,
    pub upos: Upos,
    pub xpos: String,
    pub feats: String,
    pub head: usize,
    pub deprel: String,
    pub deps: String,
    pub misc: Misc,
}

impl Token {
    pub fn new(index: usize, form: &str, lemma: &str, upos: Upos, head: usize, deprel: &str) -> Token {
        Token {
            index,
            form: form.to_string(),
            lemma: lemma.to_string(),
            upos,
            xpos: "_".to_string(),
            feats: "_".to_string(),
            head,
            deprel: deprel.to_string(),
            deps: "_".to_string(),
            misc: Misc::default(),
        }
    }

    pub fn with_ner(mut self, ner: Ner) -> Token {
        self.misc.set(NER_KEY, ner.as_str());
        self
    }

    pub fn with_compound(mut self, segmentation: &str) -> Token {
        self.misc.set(COMPOUND_KEY, segmentation);
        self
    }

    /// Entity label from MISC; `O` when absent. Labels are validated on parse.
    pub fn ner(&self) -> Ner {
        self.misc.get(NER_KEY).and_then(|v| v.parse().ok()).unwrap_or_default()
    }

    pub fn compound(&self) -> Option<&str> {
        self.misc.get(COMPOUND_KEY)
    }

    /// The lemma, unless it is empty or the CoNLL-U placeholder `_`.
    pub fn lemma(&self) -> Option<&str> {
        if self.lemma.is_empty() || (self.lemma == "_" && self.form != "_") {
            None
        } else {
            Some(&self.lemma)
        }
    }

    /// Universal relation without its language-specific subtype.
    pub fn base_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }

    fn parse_row(line: &str, line_no: usize) -> Result<Option<Token>> {
        let err = |message: String| Error::Parse { line: line_no, message };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(err(format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            return Ok(None);
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| err(format!("non-numeric token index {:?}", cols[0])))?;
        let upos: Upos = cols[3].parse().map_err(err)?;
        let head: usize = cols[6]
            .parse()
            .map_err(|_| err(format!("non-numeric head {:?}", cols[6])))?;
        let misc = Misc::parse(cols[9]);
        if let Some(label) = misc.get(NER_KEY) {
            label.parse::<Ner>().map_err(err)?;
        }
        Ok(Some(Token {
            index,
            form: cols[1].to_string(),
            lemma: cols[2].to_string(),
            upos,
            xpos: cols[4].to_string(),
            feats: cols[5].to_string(),
            head,
            deprel: cols[7].to_string(),
            deps: cols[8].to_string(),
            misc,
        }))
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.index,
            self.form,
            self.lemma,
            self.upos,
            self.xpos,
            self.feats,
            self.head,
            self.deprel,
            self.deps,
            self.misc
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedSentence {
    pub id: String,
    /// Comment lines, verbatim including the leading `#`.
    pub comments: Vec<String>,
    pub tokens: Vec<Token>,
}

impl AnnotatedSentence {
    pub fn new(id: impl Into<String>, tokens: Vec<Token>) -> AnnotatedSentence {
        AnnotatedSentence {
            id: id.into(),
            comments: Vec::new(),
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Same sentence with a different token list.
    pub fn with_tokens(&self, tokens: Vec<Token>) -> AnnotatedSentence {
        AnnotatedSentence {
            id: self.id.clone(),
            comments: self.comments.clone(),
            tokens,
        }
    }

    pub fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.form.as_str()).collect()
    }

    /// Surface text: the `# text` comment if present, otherwise the forms
    /// joined by spaces honouring `SpaceAfter=No`.
    pub fn text(&self) -> String {
        if let Some(text) = self.comments.iter().find_map(|c| c.strip_prefix(TEXT_PREFIX)) {
            return text.to_string();
        }
        let mut out = String::new();
        for (i, tok) in self.tokens.iter().enumerate() {
            out.push_str(&tok.form);
            if i + 1 < self.tokens.len() && tok.misc.get("SpaceAfter") != Some("No") {
                out.push(' ');
            }
        }
        out
    }

    /// Checks the structural invariants of a freshly parsed sentence.
    /// On failure returns the offending token position and a message.
    pub fn check(&self) -> std::result::Result<(), (usize, String)> {
        let n = self.tokens.len();
        if n == 0 {
            return Err((0, "sentence has no tokens".to_string()));
        }
        let mut roots = 0;
        for (pos, tok) in self.tokens.iter().enumerate() {
            if tok.index != pos + 1 {
                return Err((
                    pos,
                    format!("token index {} out of sequence, expected {}", tok.index, pos + 1),
                ));
            }
            if tok.head > n {
                return Err((pos, format!("head {} out of range for {n}-token sentence", tok.head)));
            }
            if tok.head == tok.index {
                return Err((pos, format!("token {} is its own head", tok.index)));
            }
            if tok.head == 0 {
                roots += 1;
                if roots > 1 {
                    return Err((pos, "more than one root".to_string()));
                }
            }
        }
        if roots == 0 {
            return Err((n - 1, "no root token".to_string()));
        }
        for (pos, tok) in self.tokens.iter().enumerate() {
            let mut cur = tok.head;
            let mut steps = 0;
            while cur != 0 {
                steps += 1;
                if steps > n {
                    return Err((pos, format!("cycle through token {}", tok.index)));
                }
                cur = self.tokens[cur - 1].head;
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check().map_err(|(_, message)| Error::InvalidSentence {
            sentence: self.id.clone(),
            message,
        })
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for c in &self.comments {
            writeln!(out, "{c}")?;
        }
        for t in &self.tokens {
            writeln!(out, "{t}")?;
        }
        writeln!(out)
    }
}

/// Streaming CoNLL-U reader yielding one validated sentence at a time.
pub struct ConlluReader<R> {
    input: R,
    line_no: usize,
    ordinal: usize,
    done: bool,
    buf: String,
}

impl<R: BufRead> ConlluReader<R> {
    pub fn new(input: R) -> Self {
        ConlluReader {
            input,
            line_no: 0,
            ordinal: 0,
            done: false,
            buf: String::new(),
        }
    }

    fn read_sentence(&mut self) -> Result<Option<AnnotatedSentence>> {
        let mut comments = Vec::new();
        let mut tokens = Vec::new();
        let mut lines = Vec::new();
        let mut first_line = 0;
        loop {
            self.buf.clear();
            let read = self
                .input
                .read_line(&mut self.buf)
                .map_err(|e| Error::io("<conllu input>", e))?;
            if read == 0 {
                self.done = true;
                break;
            }
            self.line_no += 1;
            let line = self.buf.strip_suffix('\n').unwrap_or(&self.buf);
            if line.is_empty() {
                if comments.is_empty() && tokens.is_empty() {
                    continue;
                }
                break;
            }
            if first_line == 0 {
                first_line = self.line_no;
            }
            if line.starts_with('#') {
                comments.push(line.to_string());
                continue;
            }
            if let Some(tok) = Token::parse_row(line, self.line_no)? {
                tokens.push(tok);
                lines.push(self.line_no);
            }
        }
        if comments.is_empty() && tokens.is_empty() {
            return Ok(None);
        }
        self.ordinal += 1;
        let id = comments
            .iter()
            .find_map(|c: &String| c.strip_prefix(SENT_ID_PREFIX))
            .map(str::to_string)
            .unwrap_or_else(|| self.ordinal.to_string());
        let sentence = AnnotatedSentence { id, comments, tokens };
        sentence.check().map_err(|(pos, message)| Error::Parse {
            line: lines.get(pos).copied().unwrap_or(first_line),
            message,
        })?;
        Ok(Some(sentence))
    }
}

impl<R: BufRead> Iterator for ConlluReader<R> {
    type Item = Result<AnnotatedSentence>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_sentence() {
            Ok(Some(s)) => Some(Ok(s)),
            Ok(None) => None,
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

pub fn parse_conllu(text: &str) -> Result<Vec<AnnotatedSentence>> {
    ConlluReader::new(text.as_bytes()).collect()
}

pub fn serialize_conllu(sentences: &[AnnotatedSentence]) -> String {
    let mut out = Vec::new();
    for s in sentences {
        s.write_to(&mut out).expect("writing to a Vec cannot fail");
    }
    String::from_utf8(out).expect("CoNLL-U fields are UTF-8")
}
