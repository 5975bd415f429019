//! Gloss/text pairs and the six-file `{train,dev,test}.{gloss,txt}` layout.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::augment::GlossSequence;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Real,
    SyntheticGeneral,
    SyntheticSpecific,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Real => "real",
            Origin::SyntheticGeneral => "synthetic_general",
            Origin::SyntheticSpecific => "synthetic_specific",
        }
    }

    pub fn is_synthetic(self) -> bool {
        self != Origin::Real
    }
}

impl FromStr for Origin {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "real" => Ok(Origin::Real),
            "synthetic_general" | "general" => Ok(Origin::SyntheticGeneral),
            "synthetic_specific" | "specific" => Ok(Origin::SyntheticSpecific),
            _ => Err(format!("unknown origin {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Dev,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Dev, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Dev => "dev",
            Split::Test => "test",
        }
    }

    pub fn gloss_path(self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.gloss", self.as_str()))
    }

    pub fn text_path(self, dir: &Path) -> PathBuf {
        dir.join(format!("{}.txt", self.as_str()))
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "dev" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            _ => Err(format!("unknown split {s:?}, expected train, dev or test")),
        }
    }
}

/// A gloss sequence paired with its spoken-language sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelPair {
    gloss: GlossSequence,
    text: String,
    origin: Origin,
}

impl ParallelPair {
    pub fn new(gloss: GlossSequence, text: impl Into<String>, origin: Origin) -> Result<Self> {
        let text = text.into();
        if gloss.glosses.is_empty() {
            return Err(Error::Empty(format!("gloss side of {:?}", gloss.source_id)));
        }
        if text.trim().is_empty() {
            return Err(Error::Empty(format!("text side of {:?}", gloss.source_id)));
        }
        Ok(ParallelPair { gloss, text, origin })
    }

    pub fn gloss(&self) -> &GlossSequence {
        &self.gloss
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn origin(&self) -> Origin {
        self.origin
    }

    pub fn gloss_line(&self) -> String {
        self.gloss.glosses.join(" ")
    }
}

/// Line-by-line writer for one split.
pub struct ParallelWriter {
    gloss: BufWriter<File>,
    text: BufWriter<File>,
    gloss_path: PathBuf,
    text_path: PathBuf,
    written: usize,
}

impl ParallelWriter {
    pub fn create(dir: &Path, split: Split) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let gloss_path = split.gloss_path(dir);
        let text_path = split.text_path(dir);
        let gloss = File::create(&gloss_path).map_err(|e| Error::io(&gloss_path, e))?;
        let text = File::create(&text_path).map_err(|e| Error::io(&text_path, e))?;
        Ok(ParallelWriter {
            gloss: BufWriter::new(gloss),
            text: BufWriter::new(text),
            gloss_path,
            text_path,
            written: 0,
        })
    }

    pub fn write(&mut self, pair: &ParallelPair) -> Result<()> {
        writeln!(self.gloss, "{}", pair.gloss_line()).map_err(|e| Error::io(&self.gloss_path, e))?;
        writeln!(self.text, "{}", single_line(pair.text())).map_err(|e| Error::io(&self.text_path, e))?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> usize {
        self.written
    }

    pub fn finish(mut self) -> Result<(PathBuf, PathBuf)> {
        self.gloss.flush().map_err(|e| Error::io(&self.gloss_path, e))?;
        self.text.flush().map_err(|e| Error::io(&self.text_path, e))?;
        Ok((self.gloss_path, self.text_path))
    }
}

fn single_line(text: &str) -> String {
    text.split(['\n', '\r']).collect::<Vec<_>>().join(" ")
}

/// Writes `<split>.gloss` and `<split>.txt` under `dir`.
pub fn write_parallel(pairs: &[ParallelPair], dir: &Path, split: Split) -> Result<(PathBuf, PathBuf)> {
    if pairs.is_empty() {
        return Err(Error::Empty(format!("no pairs to write for split {split}")));
    }
    let mut writer = ParallelWriter::create(dir, split)?;
    for pair in pairs {
        writer.write(pair)?;
    }
    writer.finish()
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}

/// Reads one split back. All pairs receive `origin`.
pub fn read_parallel(dir: &Path, split: Split, origin: Origin) -> Result<Vec<ParallelPair>> {
    let gloss_path = split.gloss_path(dir);
    let glosses = read_lines(&gloss_path)?;
    let texts = read_lines(&split.text_path(dir))?;
    if glosses.len() != texts.len() {
        return Err(Error::LengthMismatch {
            left: glosses.len(),
            right: texts.len(),
        });
    }
    glosses
        .into_iter()
        .zip(texts)
        .enumerate()
        .map(|(i, (g, t))| {
            let seq = GlossSequence {
                glosses: g.split_whitespace().map(str::to_string).collect(),
                applied_rules: Vec::new(),
                source_id: format!("{}:{}", split, i + 1),
            };
            ParallelPair::new(seq, t, origin).map_err(|_| Error::Parse {
                line: i + 1,
                message: format!("empty side in {}", gloss_path.display()),
            })
        })
        .collect()
}

pub fn split_exists(dir: &Path, split: Split) -> bool {
    split.gloss_path(dir).is_file() && split.text_path(dir).is_file()
}
