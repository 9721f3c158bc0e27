//! `tibtext`: command-line front end for the tibtext toolkit.
//!
//! Exit codes: 0 on success, 1 on domain errors (message on stderr),
//! 2 on usage errors.

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use tibtext_core::align::{
    align_chunked_with, align_pair_with, replacement_stats, AlignParams, ChunkParams, Document,
    ParticleLexicon,
};
use tibtext_core::corpus::fixture::{FixtureParams, MutationRates};
use tibtext_core::corpus::{self, CleaningConfig, PassageRecord};
use tibtext_core::segment::{
    boundary_f1, segment, train_segmenter, BoundaryTag, Segmentation, SegmenterModel,
};
use tibtext_core::stem::{extract_stem, normalize, CostTable, NormRuleSet};
use tibtext_core::stylo::{
    evaluate, extract_ngram_features, extract_style_features, load_stylo_model, predict,
    save_stylo_model, train_perceptron, FeatureVector, StyleLexicons, WordList,
};
use tibtext_core::syllable::{render_syllable, SyllableTables};
use tibtext_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "tibtext",
    version,
    about = "Classical Tibetan (Wylie) text processing: cleaning, parsing, \
             stemming, segmentation, parallel-passage alignment, stylometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct DataPaths {
    /// Syllable validity tables (default: $TIBTEXT_DATA/syllable_tables.txt
    /// if present, else the built-in tables)
    #[arg(long, global = true)]
    tables: Option<PathBuf>,
    /// Stem normalization rules (default: $TIBTEXT_DATA/stem_rules.txt)
    #[arg(long, global = true)]
    rules: Option<PathBuf>,
    /// Substitution cost table (default: $TIBTEXT_DATA/costs.txt)
    #[arg(long, global = true)]
    costs: Option<PathBuf>,
    /// Grammatical-particle lexicon (default: $TIBTEXT_DATA/particles.txt)
    #[arg(long, global = true)]
    particles: Option<PathBuf>,
}

impl DataPaths {
    fn tables(&self) -> Result<SyllableTables> {
        match resolve(&self.tables, "syllable_tables.txt") {
            Some(p) => SyllableTables::from_path(&p),
            None => Ok(SyllableTables::shipped().clone()),
        }
    }
    fn rules(&self) -> Result<NormRuleSet> {
        match resolve(&self.rules, "stem_rules.txt") {
            Some(p) => NormRuleSet::from_path(&p),
            None => Ok(NormRuleSet::shipped().clone()),
        }
    }
    fn costs(&self) -> Result<CostTable> {
        match resolve(&self.costs, "costs.txt") {
            Some(p) => CostTable::from_path(&p),
            None => Ok(*CostTable::shipped()),
        }
    }
    fn particles(&self) -> Result<ParticleLexicon> {
        match resolve(&self.particles, "particles.txt") {
            Some(p) => ParticleLexicon::from_path(&p),
            None => Ok(ParticleLexicon::shipped().clone()),
        }
    }
}

/// Explicit flag wins; otherwise a file of the conventional name under
/// $TIBTEXT_DATA is used when it exists.
fn resolve(flag: &Option<PathBuf>, name: &str) -> Option<PathBuf> {
    if let Some(p) = flag {
        return Some(p.clone());
    }
    if let Ok(dir) = std::env::var("TIBTEXT_DATA") {
        let p = Path::new(&dir).join(name);
        if p.exists() {
            return Some(p);
        }
    }
    None
}

#[derive(Subcommand)]
enum Command {
    /// Remove sigla and standardize punctuation
    Clean {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Cleaning configuration file (sigla pairs and character map)
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Parse syllables into their slot decomposition (JSON lines)
    Parse {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        data: DataPaths,
    },
    /// Emit the normalized stem of every syllable (JSON lines)
    Stem {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        data: DataPaths,
    },
    /// Word segmentation
    #[command(subcommand)]
    Segment(SegmentCmd),
    /// Parallel-passage alignment
    #[command(subcommand)]
    Align(AlignCmd),
    /// Stylometric features and classification
    #[command(subcommand)]
    Stylo(StyloCmd),
    /// Synthetic fixtures
    #[command(subcommand)]
    Fixture(FixtureCmd),
}

#[derive(Subcommand)]
enum SegmentCmd {
    /// Train the boundary tagger on `|`-separated text
    Train {
        /// Training corpus: one sentence per line, words separated by `|`
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 8)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Held-out fraction evaluated after training (0 disables)
        #[arg(long, default_value_t = 0.0)]
        holdout: f64,
        #[command(flatten)]
        data: DataPaths,
    },
    /// Insert `|` word boundaries into running text
    Apply {
        #[arg(long)]
        model: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        data: DataPaths,
    },
}

#[derive(Args, Clone)]
struct AlignFlags {
    /// Maximum stem distance for a match vertex
    #[arg(long, default_value_t = 0.0)]
    theta: f64,
    /// Maximum syllables skipped per side in one step
    #[arg(long, default_value_t = 2)]
    gap: usize,
    /// Error budget as a fraction of the longer span
    #[arg(long, default_value_t = 0.25)]
    tau: f64,
    /// Minimum passage length in syllables
    #[arg(long = "min-len", default_value_t = 6)]
    min_len: usize,
}

impl AlignFlags {
    fn params(&self) -> AlignParams {
        AlignParams {
            vertex_threshold: self.theta,
            max_gap: self.gap,
            error_budget: self.tau,
            min_length: self.min_len,
        }
    }
}

#[derive(Subcommand)]
enum AlignCmd {
    /// Align two documents and emit passages (JSON lines)
    Run {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        flags: AlignFlags,
        /// Chunk size in syllables; 0 aligns without chunking
        #[arg(long = "chunk-size", default_value_t = 0)]
        chunk_size: usize,
        /// Overlap between neighboring chunks
        #[arg(long, default_value_t = 256)]
        overlap: usize,
        /// Worker threads for chunked mode
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Also print variant-replacement statistics to stderr
        #[arg(long)]
        stats: bool,
        #[command(flatten)]
        data: DataPaths,
    },
    /// Score predicted passages against a gold file
    Eval {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gold: PathBuf,
        /// Span overlap required on both sides
        #[arg(long, default_value_t = 0.9)]
        threshold: f64,
    },
}

#[derive(Subcommand)]
enum StyloCmd {
    /// Extract style (and optionally n-gram) features per document
    Features {
        /// Input documents
        #[arg(long = "in", num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        /// Label recorded with each feature vector
        #[arg(long)]
        label: Option<String>,
        /// Also extract n-gram features up to this order (0 = none)
        #[arg(long, default_value_t = 0)]
        ngrams: usize,
        /// Segmenter model for word-level n-grams (stems otherwise)
        #[arg(long)]
        segmenter: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Function-word lexicon (default: $TIBTEXT_DATA/function_words.txt)
        #[arg(long = "function-words")]
        function_words: Option<PathBuf>,
        /// Verbal-prefix lexicon (default: $TIBTEXT_DATA/verbal_prefixes.txt)
        #[arg(long = "verbal-prefixes")]
        verbal_prefixes: Option<PathBuf>,
        #[command(flatten)]
        data: DataPaths,
    },
    /// Train the perceptron on labeled feature records
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 30)]
        epochs: usize,
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Predict labels for feature records
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a model on labeled feature records
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
}

#[derive(Subcommand)]
enum FixtureCmd {
    /// Generate a synthetic document pair with gold parallel passages
    MakeGold {
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 24)]
        pairs: usize,
        #[arg(long = "doc-len", default_value_t = 3600)]
        doc_len: usize,
        #[arg(long = "plant-min", default_value_t = 40)]
        plant_min: usize,
        #[arg(long = "plant-max", default_value_t = 90)]
        plant_max: usize,
        #[arg(long, default_value_t = 320)]
        vocab: usize,
        /// Rate of particle swaps in planted copies
        #[arg(long = "rate-swap", default_value_t = 0.03)]
        rate_swap: f64,
        /// Rate of orthographic variants
        #[arg(long = "rate-ortho", default_value_t = 0.04)]
        rate_ortho: f64,
        /// Rate of inflectional variants
        #[arg(long = "rate-infl", default_value_t = 0.05)]
        rate_infl: f64,
        /// Rate of content substitutions
        #[arg(long = "rate-sub", default_value_t = 0.02)]
        rate_sub: f64,
        /// Rate of omissions
        #[arg(long = "rate-gap", default_value_t = 0.01)]
        rate_gap: f64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content.as_bytes())?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ParseRecord<'a> {
    text: &'a str,
    parsed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    prescript: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    superscript: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    core: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subscript: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    vowel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coda: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    postscript: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    particle: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct FeatureRecord {
    doc: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    features: BTreeMap<String, f64>,
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Clean { input, out, config } => {
            let cfg = match config {
                Some(p) => CleaningConfig::from_path(&p)?,
                None => CleaningConfig::default(),
            };
            let raw = std::fs::read_to_string(&input)?;
            let mut cleaned = corpus::clean(&raw, &cfg)?;
            cleaned.push('\n');
            write_output(&out, &cleaned)
        }

        Command::Parse { input, out, data } => {
            let tables = data.tables()?;
            let rules = data.rules()?;
            let text = std::fs::read_to_string(&input)?;
            let doc = Document::from_text(stem_of_path(&input), &text, &tables, &rules);
            let mut lines = String::new();
            let form = |l: tibtext_core::wylie::TibetanLetter| l.wylie().to_string();
            for tok in &doc.tokens {
                let rec = match &tok.tuple {
                    None => ParseRecord {
                        text: &tok.text,
                        parsed: false,
                        prescript: None,
                        superscript: None,
                        core: None,
                        subscript: None,
                        vowel: None,
                        coda: None,
                        postscript: None,
                        particle: None,
                    },
                    Some(t) => ParseRecord {
                        text: &tok.text,
                        parsed: true,
                        prescript: t.prescript.map(form),
                        superscript: t.superscript.map(form),
                        core: Some(form(t.core)),
                        subscript: t.subscript.map(form),
                        vowel: Some(form(t.vowel)),
                        coda: t.coda.map(form),
                        postscript: t.postscript.map(form),
                        particle: t.particle.map(|p| tables.particle_form(p).to_string()),
                    },
                };
                lines.push_str(&serde_json::to_string(&rec)?);
                lines.push('\n');
            }
            write_output(&out, &lines)
        }

        Command::Stem { input, out, data } => {
            let tables = data.tables()?;
            let rules = data.rules()?;
            let text = std::fs::read_to_string(&input)?;
            let doc = Document::from_text(stem_of_path(&input), &text, &tables, &rules);
            let mut lines = String::new();
            for tok in &doc.tokens {
                let record = match &tok.tuple {
                    Some(t) => {
                        let stem = normalize(&extract_stem(t), &rules);
                        serde_json::json!({
                            "text": tok.text,
                            "foreign": false,
                            "stem": stem,
                        })
                    }
                    None => serde_json::json!({
                        "text": tok.text,
                        "foreign": true,
                    }),
                };
                lines.push_str(&serde_json::to_string(&record)?);
                lines.push('\n');
            }
            write_output(&out, &lines)
        }

        Command::Segment(cmd) => run_segment(cmd),
        Command::Align(cmd) => run_align(cmd),
        Command::Stylo(cmd) => run_stylo(cmd),
        Command::Fixture(cmd) => run_fixture(cmd),
    }
}

/// Training corpus line: syllables separated by spaces, `|` marks a word
/// boundary ("dge slong | gi | chos").
fn parse_segmented_line(
    line: &str,
    tables: &SyllableTables,
    rules: &NormRuleSet,
) -> (Vec<tibtext_core::align::Token>, Segmentation) {
    let mut text_parts = Vec::new();
    let mut tags = Vec::new();
    let mut begin_next = true;
    for field in line.split_whitespace() {
        if field == "|" {
            begin_next = true;
            continue;
        }
        text_parts.push(field);
        tags.push(if begin_next {
            BoundaryTag::Begin
        } else {
            BoundaryTag::Inside
        });
        begin_next = false;
    }
    let doc = Document::from_text("line", &text_parts.join(" "), tables, rules);
    (doc.tokens, Segmentation { tags })
}

fn run_segment(cmd: SegmentCmd) -> Result<()> {
    match cmd {
        SegmentCmd::Train {
            corpus,
            model,
            epochs,
            seed,
            holdout,
            data,
        } => {
            let tables = data.tables()?;
            let rules = data.rules()?;
            let text = std::fs::read_to_string(&corpus)?;
            let all: Vec<_> = text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(|l| parse_segmented_line(l, &tables, &rules))
                .collect();
            let split = ((all.len() as f64) * (1.0 - holdout)).round() as usize;
            let (train, held) = all.split_at(split.clamp(1, all.len()));
            let m = train_segmenter(train, epochs, seed)?;
            m.save(&model)?;
            if !held.is_empty() {
                let pairs: Vec<(Segmentation, Segmentation)> = held
                    .iter()
                    .map(|(toks, gold)| (segment(&m, toks).unwrap(), gold.clone()))
                    .collect();
                let (p, r, f1) = boundary_f1(&pairs);
                println!(
                    "trained on {} sentences; held-out boundary P={p:.3} R={r:.3} F1={f1:.3}",
                    train.len()
                );
            } else {
                println!("trained on {} sentences", train.len());
            }
            Ok(())
        }
        SegmentCmd::Apply {
            model,
            input,
            out,
            data,
        } => {
            let tables = data.tables()?;
            let rules = data.rules()?;
            let m = SegmenterModel::load(&model)?;
            let text = std::fs::read_to_string(&input)?;
            let mut lines = String::new();
            for line in text.lines() {
                if line.trim().is_empty() {
                    continue;
                }
                let doc = Document::from_text("line", line, &tables, &rules);
                let seg = segment(&m, &doc.tokens)?;
                let mut parts: Vec<&str> = Vec::new();
                for (i, tok) in doc.tokens.iter().enumerate() {
                    if i > 0 && seg.tags[i] == BoundaryTag::Begin {
                        parts.push("|");
                    }
                    parts.push(&tok.text);
                }
                lines.push_str(&parts.join(" "));
                lines.push('\n');
            }
            write_output(&out, &lines)
        }
    }
}

fn run_align(cmd: AlignCmd) -> Result<()> {
    match cmd {
        AlignCmd::Run {
            a,
            b,
            out,
            flags,
            chunk_size,
            overlap,
            workers,
            stats,
            data,
        } => {
            let tables = data.tables()?;
            let rules = data.rules()?;
            let lexicon = data.particles()?;
            let p = flags.params();
            let docs = corpus::load_documents(
                &[a, b],
                &CleaningConfig::default(),
                &tables,
                &rules,
            )?;
            let (da, db) = (&docs[0], &docs[1]);
            let passages = if chunk_size == 0 {
                align_pair_with(da, db, &p, &rules, &lexicon)?
            } else {
                let cp = ChunkParams {
                    chunk_size,
                    overlap,
                    workers,
                };
                align_chunked_with(da, db, &p, &cp, &rules, &lexicon)?
            };
            let mut lines = String::new();
            for passage in &passages {
                let rec = PassageRecord {
                    doc_a: da.id.clone(),
                    doc_b: db.id.clone(),
                    passage: passage.clone(),
                };
                lines.push_str(&serde_json::to_string(&rec)?);
                lines.push('\n');
            }
            if stats {
                let report = replacement_stats(&passages, da, db, &p, &rules, &lexicon);
                eprintln!("{}", serde_json::to_string_pretty(&report)?);
            }
            write_output(&out, &lines)
        }
        AlignCmd::Eval {
            pred,
            gold,
            threshold,
        } => {
            let pred_text = std::fs::read_to_string(&pred)?;
            let preds: Vec<PassageRecord> = pred_text
                .lines()
                .filter(|l| !l.trim().is_empty())
                .map(serde_json::from_str)
                .collect::<std::result::Result<_, _>>()?;
            let gold = corpus::read_gold(&std::fs::read_to_string(&gold)?)?;
            let result = corpus::eval_alignment(&preds, &gold, threshold);
            println!(
                "{}",
                serde_json::json!({
                    "precision": result.precision,
                    "recall": result.recall,
                    "matched": result.matched.len(),
                    "gold": gold.len(),
                    "predictions": preds.len(),
                })
            );
            Ok(())
        }
    }
}

fn run_stylo(cmd: StyloCmd) -> Result<()> {
    match cmd {
        StyloCmd::Features {
            inputs,
            label,
            ngrams,
            segmenter,
            out,
            function_words,
            verbal_prefixes,
            data,
        } => {
            let tables = data.tables()?;
            let rules = data.rules()?;
            let shipped = StyleLexicons::shipped();
            let fw = match resolve(&function_words, "function_words.txt") {
                Some(p) => WordList::from_path(&p)?,
                None => shipped.function_words.clone(),
            };
            let vp = match resolve(&verbal_prefixes, "verbal_prefixes.txt") {
                Some(p) => WordList::from_path(&p)?,
                None => shipped.verbal_prefixes.clone(),
            };
            let lexicons = StyleLexicons {
                function_words: &fw,
                verbal_prefixes: &vp,
            };
            let seg_model = match segmenter {
                Some(p) => Some(SegmenterModel::load(&p)?),
                None => None,
            };
            let mut lines = String::new();
            for path in &inputs {
                let text = std::fs::read_to_string(path)?;
                let doc = Document::from_text(stem_of_path(path), &text, &tables, &rules);
                let mut fv = extract_style_features(&doc, &lexicons)?;
                if ngrams > 0 {
                    fv.merge(extract_ngram_features(&doc, 1..=ngrams, seg_model.as_ref())?);
                }
                let rec = FeatureRecord {
                    doc: doc.id.clone(),
                    label: label.clone(),
                    features: fv.0,
                };
                lines.push_str(&serde_json::to_string(&rec)?);
                lines.push('\n');
            }
            write_output(&out, &lines)
        }
        StyloCmd::Train {
            data,
            model,
            epochs,
            rate,
            seed,
        } => {
            let examples = read_feature_records(&data, true)?;
            let m = train_perceptron(&examples, epochs, rate, seed)?;
            save_stylo_model(&model, &m)?;
            println!(
                "trained perceptron on {} examples ({} features)",
                examples.len(),
                m.weights.len()
            );
            Ok(())
        }
        StyloCmd::Predict { model, data, out } => {
            let m = load_stylo_model(&model)?;
            let text = std::fs::read_to_string(&data)?;
            let mut lines = String::new();
            for line in text.lines().filter(|l| !l.trim().is_empty()) {
                let rec: FeatureRecord = serde_json::from_str(line)?;
                let fv = FeatureVector(rec.features);
                let (label, margin) = predict(&m, &fv);
                lines.push_str(&serde_json::to_string(&serde_json::json!({
                    "doc": rec.doc,
                    "label": label,
                    "margin": margin,
                }))?);
                lines.push('\n');
            }
            write_output(&out, &lines)
        }
        StyloCmd::Eval { model, data } => {
            let m = load_stylo_model(&model)?;
            let examples = read_feature_records(&data, true)?;
            let metrics = evaluate(&m, &examples)?;
            println!("{}", serde_json::to_string(&metrics)?);
            Ok(())
        }
    }
}

fn read_feature_records(path: &Path, need_label: bool) -> Result<Vec<(FeatureVector, String)>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let rec: FeatureRecord = serde_json::from_str(line)?;
        let label = match (rec.label, need_label) {
            (Some(l), _) => l,
            (None, false) => String::new(),
            (None, true) => {
                return Err(Error::InvalidTable(format!(
                    "record for {:?} lacks a label",
                    rec.doc
                )))
            }
        };
        out.push((FeatureVector(rec.features), label));
    }
    Ok(out)
}

fn run_fixture(cmd: FixtureCmd) -> Result<()> {
    match cmd {
        FixtureCmd::MakeGold {
            out_dir,
            seed,
            pairs,
            doc_len,
            plant_min,
            plant_max,
            vocab,
            rate_swap,
            rate_ortho,
            rate_infl,
            rate_sub,
            rate_gap,
        } => {
            let params = FixtureParams {
                seed,
                n_pairs: pairs,
                doc_len,
                plant_min,
                plant_max,
                vocab_size: vocab,
                particle_every: 5,
                rates: MutationRates {
                    particle_swap: rate_swap,
                    orthographic: rate_ortho,
                    inflectional: rate_infl,
                    substitution: rate_sub,
                    gap: rate_gap,
                },
            };
            let fx = tibtext_core::corpus::fixture::make_gold_fixture(&params);
            std::fs::create_dir_all(&out_dir)?;
            std::fs::write(out_dir.join("a.txt"), fx.doc_a.render() + "\n")?;
            std::fs::write(out_dir.join("b.txt"), fx.doc_b.render() + "\n")?;
            std::fs::write(out_dir.join("gold.tsv"), corpus::write_gold(&fx.gold))?;
            let mut log = String::new();
            for rec in &fx.log {
                log.push_str(&serde_json::to_string(rec)?);
                log.push('\n');
            }
            std::fs::write(out_dir.join("plants.jsonl"), log)?;
            println!(
                "wrote fixture: {} syllables / {} syllables, {} gold pairs",
                fx.doc_a.len(),
                fx.doc_b.len(),
                fx.gold.len()
            );
            Ok(())
        }
    }
}

fn stem_of_path(path: &Path) -> &str {
    path.file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("doc")
}

// The CLI is exercised end to end by the integration tests; a couple of
// sanity checks for pure helpers live here.
#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segmented_line_round_trip() {
        let tables = SyllableTables::shipped();
        let rules = NormRuleSet::shipped();
        let (tokens, seg) = parse_segmented_line("dge slong | gi | chos mthong", tables, rules);
        assert_eq!(tokens.len(), 5);
        assert_eq!(
            seg.tags,
            vec![
                BoundaryTag::Begin,
                BoundaryTag::Inside,
                BoundaryTag::Begin,
                BoundaryTag::Begin,
                BoundaryTag::Inside,
            ]
        );
    }
}
