//! Command-line entry point.
//!
//! Every subcommand that writes files takes `--out DIR`, writes only inside
//! it, and leaves a `manifest.json` there recording the resolved
//! configuration, seed and counts. Read-only subcommands (`similarity`,
//! `stats`, `bleu`) print a JSON report that embeds the same configuration
//! and write files only when `--out` is given.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{ArgAction, Args, Parser, Subcommand};
use log::info;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::augment::{
    AugmentConfig, Casing, GlossSequence, RuleSet, DEFAULT_DROP_PROB, DEFAULT_MAX_DISPLACEMENT, DEFAULT_NEGATION_LEMMAS,
};
use crate::bleu::{corpus_bleu, Smoothing};
use crate::bpe::{bpe_decode, bpe_learn_with, BpeModel, DEFAULT_MARKER};
use crate::conllu::{AnnotatedSentence, ConlluReader, Upos};
use crate::dataset::{build_stage, origin_counts, subsample_fraction, vocab_stats, MixPlan, Stage};
use crate::error::Error;
use crate::metrics::{syntactic_similarity, type_set_from_text, FeatureTable, SimilarityReport};
use crate::parallel::{read_parallel, split_exists, write_parallel, Origin, ParallelPair, ParallelWriter, Split};

pub const MANIFEST: &str = "manifest.json";
const CHUNK: usize = 2048;

#[derive(Debug, Parser)]
#[command(
    name = "glossaug",
    version,
    about = "Pseudo-gloss synthesis and corpus tooling for gloss-to-text translation"
)]
pub struct Cli {
    /// Global random seed.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for per-sentence work; output is identical for any value.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Only log warnings and errors.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize glosses with the general rules.
    AugmentGeneral(AugmentArgs),
    /// Synthesize glosses with the German→DGS rules.
    AugmentSpecific(AugmentArgs),
    /// Synthesize glosses with the rule set chosen by --rules.
    Augment(RulesAugmentArgs),
    /// Lexical (and optionally syntactic) similarity between two corpora.
    Similarity(SimilarityArgs),
    /// Pair and vocabulary counts of a parallel dataset.
    Stats(StatsArgs),
    /// Keep a seeded fraction of one split.
    Subsample(SubsampleArgs),
    /// Build pretrain / mixed / finetune stage data.
    Mix(MixArgs),
    /// Learn BPE merges.
    BpeLearn(BpeLearnArgs),
    /// Segment files with learned merges.
    BpeApply(BpeApplyArgs),
    /// Undo BPE segmentation.
    BpeDecode(BpeDecodeArgs),
    /// Corpus BLEU of a hypothesis file against a reference file.
    Bleu(BleuArgs),
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Annotated CoNLL-U input.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value = "train")]
    pub split: Split,
    #[arg(long, default_value_t = DEFAULT_DROP_PROB)]
    pub drop_prob: f64,
    #[arg(long, default_value_t = DEFAULT_MAX_DISPLACEMENT)]
    pub max_displacement: usize,
    /// Comma-separated UPOS tags to keep.
    #[arg(long, value_delimiter = ',', default_value = "NOUN,VERB,ADJ,ADV,NUM")]
    pub kept_pos: Vec<Upos>,
    #[arg(long, default_value = "upper")]
    pub casing: Casing,
    /// Comma-separated negation lemmas.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_NEGATION_LEMMAS.map(String::from))]
    pub negation_lemmas: Vec<String>,
    /// Skip the verb-after-object reordering.
    #[arg(long)]
    pub no_svo: bool,
}

#[derive(Debug, Args)]
pub struct RulesAugmentArgs {
    #[arg(long)]
    pub rules: RuleSet,
    #[command(flatten)]
    pub common: AugmentArgs,
}

#[derive(Debug, Args)]
pub struct SimilarityArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long, default_value = "a")]
    pub lang_a: String,
    #[arg(long, default_value = "b")]
    pub lang_b: String,
    /// Lowercase tokens before collecting types.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub casefold: bool,
    /// Tab-separated typological feature table keyed by language tag.
    #[arg(long)]
    pub features: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Directory holding {train,dev,test}.{gloss,txt}.
    #[arg(long)]
    pub data: PathBuf,
    /// Restrict to one split; by default every split present is reported.
    #[arg(long)]
    pub split: Option<Split>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SubsampleArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value = "train")]
    pub split: Split,
    #[arg(long)]
    pub fraction: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MixArgs {
    /// Directory with the real parallel data.
    #[arg(long)]
    pub real: PathBuf,
    /// Directory with synthetic parallel data.
    #[arg(long)]
    pub synthetic: Option<PathBuf>,
    #[arg(long, default_value = "synthetic_general")]
    pub synthetic_origin: Origin,
    /// Stage to build; repeat or omit for all three.
    #[arg(long, value_delimiter = ',')]
    pub stage: Vec<Stage>,
    /// Fraction of the real training split to use.
    #[arg(long, default_value_t = 1.0)]
    pub fraction: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BpeLearnArgs {
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 2000)]
    pub merges: usize,
    /// Learn one model over all inputs instead of one per input.
    #[arg(long, default_value_t = true, action = ArgAction::Set)]
    pub joint: bool,
    #[arg(long, default_value_t = 1)]
    pub vocab_threshold: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BpeApplyArgs {
    #[arg(long)]
    pub codes: PathBuf,
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = DEFAULT_MARKER)]
    pub marker: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BpeDecodeArgs {
    #[arg(long = "input", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value = DEFAULT_MARKER)]
    pub marker: String,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BleuArgs {
    #[arg(long)]
    pub hyp: PathBuf,
    #[arg(long = "ref")]
    pub reference: PathBuf,
    /// Add-one smoothing for orders above 1.
    #[arg(long)]
    pub smooth: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs, and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let level = if cli.quiet { "warn" } else { "info" };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_target(false)
        .try_init();
    match execute(&cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err:#}");
            match err.downcast_ref::<Error>() {
                Some(Error::Config(_)) => 1,
                _ if err.downcast_ref::<UsageError>().is_some() => 1,
                _ => 2,
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn execute(cli: &Cli) -> anyhow::Result<()> {
    if cli.jobs == 0 {
        return Err(usage("--jobs must be at least 1"));
    }
    match &cli.command {
        Command::AugmentGeneral(a) => augment(cli, a, RuleSet::General, "augment-general"),
        Command::AugmentSpecific(a) => augment(cli, a, RuleSet::Specific, "augment-specific"),
        Command::Augment(a) => augment(cli, &a.common, a.rules, "augment"),
        Command::Similarity(a) => similarity(cli, a),
        Command::Stats(a) => stats(cli, a),
        Command::Subsample(a) => subsample(cli, a),
        Command::Mix(a) => mix(cli, a),
        Command::BpeLearn(a) => bpe_learn_cmd(cli, a),
        Command::BpeApply(a) => bpe_apply_cmd(cli, a),
        Command::BpeDecode(a) => bpe_decode_cmd(cli, a),
        Command::Bleu(a) => bleu(cli, a),
    }
}

fn globals(cli: &Cli) -> Value {
    json!({ "seed": cli.seed, "jobs": cli.jobs, "quiet": cli.quiet })
}

fn write_manifest(dir: &Path, subcommand: &str, cli: &Cli, body: Value) -> anyhow::Result<()> {
    let manifest = json!({
        "tool": "glossaug",
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "seed": cli.seed,
        "globals": globals(cli),
        "run": body,
    });
    let path = dir.join(MANIFEST);
    fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")
        .with_context(|| format!("writing {}", path.display()))
}

fn create_out(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn read_to_string(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e).into())
}

fn augment_config(cli: &Cli, a: &AugmentArgs) -> anyhow::Result<AugmentConfig> {
    let cfg = AugmentConfig {
        kept_pos: a.kept_pos.iter().copied().collect(),
        drop_prob: a.drop_prob,
        max_displacement: a.max_displacement,
        seed: cli.seed,
        casing: a.casing,
        negation_lemmas: a
            .negation_lemmas
            .iter()
            .map(|s| s.trim().to_lowercase())
            .filter(|s| !s.is_empty())
            .collect::<BTreeSet<_>>(),
        reorder_svo: !a.no_svo,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn augment(cli: &Cli, a: &AugmentArgs, rules: RuleSet, name: &str) -> anyhow::Result<()> {
    let cfg = augment_config(cli, a)?;
    let file = File::open(&a.input).map_err(|e| Error::io(&a.input, e))?;
    let reader = ConlluReader::new(BufReader::new(file));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build()?;

    create_out(&a.out)?;
    let mut writer = ParallelWriter::create(&a.out, a.split)?;
    let (mut sentences, mut skipped) = (0u64, 0u64);
    let mut chunk: Vec<AnnotatedSentence> = Vec::with_capacity(CHUNK);
    let mut flush = |chunk: &mut Vec<AnnotatedSentence>, first: u64| -> anyhow::Result<u64> {
        let run_one = |(i, s): (usize, &AnnotatedSentence)| -> crate::Result<Option<(GlossSequence, String)>> {
            Ok(rules.apply(s, &cfg, first + i as u64)?.map(|g| (g, s.text())))
        };
        let results: Vec<_> = if cli.jobs > 1 {
            pool.install(|| chunk.par_iter().enumerate().map(run_one).collect())
        } else {
            chunk.iter().enumerate().map(run_one).collect()
        };
        let mut skipped = 0;
        for r in results {
            match r? {
                Some((gloss, text)) => match ParallelPair::new(gloss, text, rules.origin()) {
                    Ok(pair) => writer.write(&pair)?,
                    Err(_) => skipped += 1,
                },
                None => skipped += 1,
            }
        }
        chunk.clear();
        Ok(skipped)
    };
    for sentence in reader {
        chunk.push(sentence?);
        if chunk.len() == CHUNK {
            skipped += flush(&mut chunk, sentences)?;
            sentences += CHUNK as u64;
        }
    }
    let rest = chunk.len() as u64;
    skipped += flush(&mut chunk, sentences)?;
    sentences += rest;
    let pairs = writer.written();
    let (gloss_path, text_path) = writer.finish()?;
    info!("{name}: {sentences} sentences, {pairs} pairs, {skipped} skipped");

    write_manifest(
        &a.out,
        name,
        cli,
        json!({
            "rules": rules,
            "input": a.input,
            "split": a.split,
            "config": cfg,
            "origin": rules.origin(),
            "counts": { "sentences": sentences, "pairs": pairs, "skipped": skipped },
            "outputs": [gloss_path, text_path],
        }),
    )
}

fn similarity(cli: &Cli, a: &SimilarityArgs) -> anyhow::Result<()> {
    let ta = type_set_from_text(&a.lang_a, &read_to_string(&a.a)?, a.casefold);
    let tb = type_set_from_text(&a.lang_b, &read_to_string(&a.b)?, a.casefold);
    let s_syn = match &a.features {
        Some(path) => {
            let table = FeatureTable::load(path)?;
            Some(syntactic_similarity(table.get(&a.lang_a)?, table.get(&a.lang_b)?)?)
        }
        None => None,
    };
    let report = SimilarityReport::new(&ta, &tb, s_syn)?;
    let config = json!({
        "a": a.a, "b": a.b, "lang_a": a.lang_a, "lang_b": a.lang_b,
        "casefold": a.casefold, "features": a.features,
    });
    emit_report(cli, "similarity", a.out.as_deref(), json!(report), config, |dir| {
        let path = dir.join("similarity.tsv");
        fs::write(&path, report.scatter_table()).map_err(|e| Error::io(&path, e))?;
        Ok(())
    })
}

/// Prints `{report, config}` and, with an output directory, also writes it
/// as `<name>.json` plus a manifest.
fn emit_report(
    cli: &Cli,
    name: &str,
    out: Option<&Path>,
    report: Value,
    config: Value,
    extra: impl FnOnce(&Path) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    let doc = json!({ "report": report, "config": config, "globals": globals(cli) });
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    std::io::stdout().write_all(text.as_bytes())?;
    if let Some(dir) = out {
        create_out(dir)?;
        let path = dir.join(format!("{name}.json"));
        fs::write(&path, &text).map_err(|e| Error::io(&path, e))?;
        extra(dir)?;
        write_manifest(dir, name, cli, config)?;
    }
    Ok(())
}

fn stats(cli: &Cli, a: &StatsArgs) -> anyhow::Result<()> {
    let splits: Vec<Split> = match a.split {
        Some(s) => vec![s],
        None => Split::ALL.into_iter().filter(|s| split_exists(&a.data, *s)).collect(),
    };
    if splits.is_empty() {
        bail!(Error::Empty(format!("no parallel splits under {}", a.data.display())));
    }
    let mut report = serde_json::Map::new();
    for split in splits {
        let pairs = read_parallel(&a.data, split, Origin::Real)?;
        report.insert(split.to_string(), json!(vocab_stats(&pairs)));
    }
    let config = json!({ "data": a.data, "split": a.split });
    emit_report(
        cli,
        "stats",
        a.out.as_deref(),
        Value::Object(report),
        config,
        |_| Ok(()),
    )
}

fn subsample(cli: &Cli, a: &SubsampleArgs) -> anyhow::Result<()> {
    let pairs = read_parallel(&a.data, a.split, Origin::Real)?;
    let picked = subsample_fraction(&pairs, a.fraction, cli.seed)?;
    create_out(&a.out)?;
    let (g, t) = write_parallel(&picked, &a.out, a.split)?;
    write_manifest(
        &a.out,
        "subsample",
        cli,
        json!({
            "data": a.data, "split": a.split, "fraction": a.fraction,
            "counts": { "input": pairs.len(), "output": picked.len() },
            "outputs": [g, t],
        }),
    )
}

fn copy_split(from: &Path, to: &Path, split: Split) -> anyhow::Result<Option<usize>> {
    if !split_exists(from, split) {
        return Ok(None);
    }
    let pairs = read_parallel(from, split, Origin::Real)?;
    if pairs.is_empty() {
        return Ok(Some(0));
    }
    write_parallel(&pairs, to, split)?;
    Ok(Some(pairs.len()))
}

fn mix(cli: &Cli, a: &MixArgs) -> anyhow::Result<()> {
    let stages = if a.stage.is_empty() {
        vec![Stage::Pretrain, Stage::Mixed, Stage::Finetune]
    } else {
        a.stage.clone()
    };
    if !a.synthetic_origin.is_synthetic() {
        return Err(usage("--synthetic-origin must be general or specific"));
    }
    let real = read_parallel(&a.real, Split::Train, Origin::Real)?;
    let synthetic = match &a.synthetic {
        Some(dir) => read_parallel(dir, Split::Train, a.synthetic_origin)?,
        None if stages.iter().any(|s| *s != Stage::Finetune) => {
            return Err(usage("--synthetic is required for pretrain and mixed stages"))
        }
        None => Vec::new(),
    };
    for stage in stages {
        let dir = a.out.join(stage.as_str());
        create_out(&dir)?;
        let plan = MixPlan {
            real: &real,
            synthetic: &synthetic,
            stage,
            fraction: a.fraction,
            seed: cli.seed,
        };
        let train = build_stage(&plan)?;
        write_parallel(&train, &dir, Split::Train)?;
        // Pretraining validates on synthetic dev data; later stages on real dev data.
        let dev_source = match (stage, &a.synthetic) {
            (Stage::Pretrain, Some(syn)) if split_exists(syn, Split::Dev) => syn.as_path(),
            _ => a.real.as_path(),
        };
        let dev = copy_split(dev_source, &dir, Split::Dev)?;
        let test = copy_split(&a.real, &dir, Split::Test)?;
        let origins: serde_json::Map<String, Value> = origin_counts(&train)
            .into_iter()
            .map(|(o, c)| (o.as_str().to_string(), json!(c)))
            .collect();
        info!("{stage}: {} training pairs", train.len());
        write_manifest(
            &dir,
            "mix",
            cli,
            json!({
                "stage": stage, "real": a.real, "synthetic": a.synthetic,
                "synthetic_origin": a.synthetic_origin, "fraction": a.fraction,
                "counts": { "train": train.len(), "dev": dev, "test": test, "origins": origins },
                "dev_source": dev_source,
            }),
        )?;
    }
    Ok(())
}

fn file_name(path: &Path) -> anyhow::Result<String> {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .ok_or_else(|| usage(format!("{} has no file name", path.display())))
}

fn bpe_learn_cmd(cli: &Cli, a: &BpeLearnArgs) -> anyhow::Result<()> {
    create_out(&a.out)?;
    let texts = a
        .inputs
        .iter()
        .map(|p| read_to_string(p))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut outputs = Vec::new();
    let mut merges = Vec::new();
    if a.joint {
        let model = bpe_learn_with(
            texts.iter().flat_map(|t| t.split_whitespace()),
            a.merges,
            a.vocab_threshold,
            DEFAULT_MARKER,
        )?;
        let path = a.out.join("codes.bpe");
        model.save(&path)?;
        merges.push(model.merges.len());
        outputs.push(path);
    } else {
        for (input, text) in a.inputs.iter().zip(&texts) {
            let model = bpe_learn_with(text.split_whitespace(), a.merges, a.vocab_threshold, DEFAULT_MARKER)?;
            let path = a.out.join(format!("{}.codes", file_name(input)?));
            model.save(&path)?;
            merges.push(model.merges.len());
            outputs.push(path);
        }
    }
    write_manifest(
        &a.out,
        "bpe-learn",
        cli,
        json!({
            "inputs": a.inputs, "merges": a.merges, "joint": a.joint,
            "vocab_threshold": a.vocab_threshold, "learned": merges, "outputs": outputs,
        }),
    )
}

fn map_lines(
    inputs: &[PathBuf],
    out: &Path,
    f: impl Fn(&str) -> crate::Result<String>,
) -> anyhow::Result<Vec<PathBuf>> {
    create_out(out)?;
    let mut outputs = Vec::new();
    for input in inputs {
        let target = out.join(file_name(input)?);
        if fs::canonicalize(input).ok() == fs::canonicalize(&target).ok() {
            return Err(usage(format!("{} would overwrite its input", target.display())));
        }
        let text = read_to_string(input)?;
        let mut result = String::with_capacity(text.len() * 2);
        for (i, line) in text.lines().enumerate() {
            let mapped = f(line).map_err(|e| Error::Parse {
                line: i + 1,
                message: format!("{}: {e}", input.display()),
            })?;
            result.push_str(&mapped);
            result.push('\n');
        }
        fs::write(&target, result).map_err(|e| Error::io(&target, e))?;
        outputs.push(target);
    }
    Ok(outputs)
}

fn bpe_apply_cmd(cli: &Cli, a: &BpeApplyArgs) -> anyhow::Result<()> {
    let model = BpeModel::load(&a.codes, &a.marker)?;
    let outputs = map_lines(&a.inputs, &a.out, |l| Ok(model.apply(l)))?;
    write_manifest(
        &a.out,
        "bpe-apply",
        cli,
        json!({ "codes": a.codes, "inputs": a.inputs, "marker": a.marker, "outputs": outputs }),
    )
}

fn bpe_decode_cmd(cli: &Cli, a: &BpeDecodeArgs) -> anyhow::Result<()> {
    let outputs = map_lines(&a.inputs, &a.out, |l| bpe_decode(l, &a.marker))?;
    write_manifest(
        &a.out,
        "bpe-decode",
        cli,
        json!({ "inputs": a.inputs, "marker": a.marker, "outputs": outputs }),
    )
}

fn bleu(cli: &Cli, a: &BleuArgs) -> anyhow::Result<()> {
    let hyp = read_to_string(&a.hyp)?;
    let reference = read_to_string(&a.reference)?;
    let hyps: Vec<&str> = hyp.lines().collect();
    let refs: Vec<&str> = reference.lines().collect();
    let smoothing = if a.smooth { Smoothing::AddOne } else { Smoothing::None };
    let report = corpus_bleu(&hyps, &refs, smoothing)?;
    let config = json!({ "hyp": a.hyp, "ref": a.reference, "smoothing": smoothing });
    emit_report(cli, "bleu", a.out.as_deref(), json!(report), config, |_| Ok(()))
}
