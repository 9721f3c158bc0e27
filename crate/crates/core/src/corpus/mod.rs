//! Corpus ingestion, cleaning, gold-standard handling and evaluation.

pub mod fixture;

use crate::align::{Document, ParallelPassage};
use crate::error::{Error, Result};
use crate::stem::NormRuleSet;
use crate::syllable::SyllableTables;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Sigla delimiters to strip and punctuation to normalize.
#[derive(Clone, Debug)]
pub struct CleaningConfig {
    /// Balanced delimiter pairs whose contents (page/line sigla, editorial
    /// notes) are removed wholesale.
    pub sigla: Vec<(char, char)>,
    /// Characters rewritten to a shad or a space.
    pub map: BTreeMap<char, MapTarget>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MapTarget {
    Shad,
    Space,
}

impl Default for CleaningConfig {
    fn default() -> Self {
        let mut map = BTreeMap::new();
        for c in [';', '|', '!', '?'] {
            map.insert(c, MapTarget::Shad);
        }
        for c in [',', ':', '"', '*', '#', '&', '+', '=', '~', '^', '_'] {
            map.insert(c, MapTarget::Space);
        }
        CleaningConfig {
            sigla: vec![('[', ']'), ('{', '}'), ('<', '>')],
            map,
        }
    }
}

impl CleaningConfig {
    /// Parse the line format: `sigla <open> <close>` and
    /// `map <char> shad|space`.
    pub fn parse(text: &str) -> Result<CleaningConfig> {
        let mut cfg = CleaningConfig {
            sigla: Vec::new(),
            map: BTreeMap::new(),
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::InvalidTable(format!("clean line {}: {msg}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            match fields.as_slice() {
                ["sigla", open, close] => {
                    let (o, c) = (single_char(open), single_char(close));
                    match (o, c) {
                        (Some(o), Some(c)) => cfg.sigla.push((o, c)),
                        _ => return Err(bad("delimiters must be single characters")),
                    }
                }
                ["map", ch, target] => {
                    let Some(ch) = single_char(ch) else {
                        return Err(bad("mapped entry must be a single character"));
                    };
                    let target = match *target {
                        "shad" => MapTarget::Shad,
                        "space" => MapTarget::Space,
                        other => return Err(bad(&format!("unknown target {other:?}"))),
                    };
                    cfg.map.insert(ch, target);
                }
                _ => return Err(bad("expected `sigla` or `map` line")),
            }
        }
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<CleaningConfig> {
        CleaningConfig::parse(&std::fs::read_to_string(path)?)
    }
}

fn single_char(s: &str) -> Option<char> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Some(c),
        _ => None,
    }
}

/// Remove sigla spans, normalize punctuation, collapse whitespace.
/// Idempotent; never touches letters outside sigla spans.
pub fn clean(raw: &str, cfg: &CleaningConfig) -> Result<String> {
    // Pass 1: drop balanced sigla spans (properly nested).
    let mut stripped = String::with_capacity(raw.len());
    let mut stack: Vec<(char, usize)> = Vec::new();
    for (pos, ch) in raw.char_indices() {
        if let Some(&(_, close)) = cfg.sigla.iter().find(|(o, _)| *o == ch) {
            stack.push((close, pos));
            continue;
        }
        if cfg.sigla.iter().any(|(_, c)| *c == ch) {
            match stack.last() {
                Some(&(expected, _)) if expected == ch => {
                    stack.pop();
                    if stack.is_empty() {
                        stripped.push(' ');
                    }
                    continue;
                }
                _ => return Err(Error::UnbalancedSigla(pos)),
            }
        }
        if stack.is_empty() {
            stripped.push(ch);
        }
    }
    if let Some(&(_, pos)) = stack.first() {
        return Err(Error::UnbalancedSigla(pos));
    }
    // Pass 2: punctuation map, with shads spaced out.
    let mut mapped = String::with_capacity(stripped.len());
    for ch in stripped.chars() {
        match cfg.map.get(&ch) {
            Some(MapTarget::Shad) => mapped.push_str(" / "),
            Some(MapTarget::Space) => mapped.push(' '),
            None if ch == '/' => mapped.push_str(" / "),
            None => mapped.push(ch),
        }
    }
    // Pass 3: collapse whitespace runs.
    Ok(mapped.split_whitespace().collect::<Vec<_>>().join(" "))
}

/// Read, clean and parse documents; ids are the file stems.
pub fn load_documents(
    paths: &[PathBuf],
    cfg: &CleaningConfig,
    tables: &SyllableTables,
    rules: &NormRuleSet,
) -> Result<Vec<Document>> {
    let mut docs: Vec<Document> = Vec::with_capacity(paths.len());
    for path in paths {
        let raw = std::fs::read_to_string(path)?;
        let text = clean(&raw, cfg)?;
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.to_string_lossy().into_owned());
        if docs.iter().any(|d| d.id == id) {
            return Err(Error::DuplicateDocId(id));
        }
        docs.push(Document::from_text(&id, &text, tables, rules));
    }
    Ok(docs)
}

/// An annotated ground-truth parallel passage.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldPair {
    pub doc_a: String,
    pub a_start: usize,
    pub a_end: usize,
    pub doc_b: String,
    pub b_start: usize,
    pub b_end: usize,
    pub note: String,
}

const GOLD_HEADER: &str = "# tibtext-gold v1";

/// Write gold pairs as a tab-separated file with a version header.
pub fn write_gold(pairs: &[GoldPair]) -> String {
    let mut out = String::from(GOLD_HEADER);
    out.push('\n');
    for g in pairs {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            g.doc_a, g.a_start, g.a_end, g.doc_b, g.b_start, g.b_end, g.note
        ));
    }
    out
}

pub fn read_gold(text: &str) -> Result<Vec<GoldPair>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == GOLD_HEADER => {}
        other => {
            return Err(Error::InvalidTable(format!(
                "gold file must start with {GOLD_HEADER:?}, found {other:?}"
            )))
        }
    }
    let mut out = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 6 {
            return Err(Error::InvalidTable(format!(
                "gold line {}: expected 6+ fields",
                lineno + 2
            )));
        }
        let num = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|e| Error::InvalidTable(format!("gold line {}: {e}", lineno + 2)))
        };
        out.push(GoldPair {
            doc_a: fields[0].to_string(),
            a_start: num(fields[1])?,
            a_end: num(fields[2])?,
            doc_b: fields[3].to_string(),
            b_start: num(fields[4])?,
            b_end: num(fields[5])?,
            note: fields.get(6).unwrap_or(&"").to_string(),
        });
    }
    Ok(out)
}

/// A passage together with the document ids it connects, as written to and
/// read from alignment output files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PassageRecord {
    pub doc_a: String,
    pub doc_b: String,
    #[serde(flatten)]
    pub passage: ParallelPassage,
}

/// Outcome of scoring predictions against gold pairs.
#[derive(Clone, Debug, Serialize)]
pub struct EvalResult {
    pub precision: f64,
    pub recall: f64,
    /// (gold index, prediction index) pairs, greedily matched by score.
    pub matched: Vec<(usize, usize)>,
}

/// Span overlap as intersection over the longer span.
fn span_overlap(s1: usize, e1: usize, s2: usize, e2: usize) -> f64 {
    let lo = s1.max(s2);
    let hi = e1.min(e2);
    if lo > hi {
        return 0.0;
    }
    let inter = (hi - lo + 1) as f64;
    let longer = (e1 - s1 + 1).max(e2 - s2 + 1) as f64;
    inter / longer
}

fn record_hits_gold(r: &PassageRecord, g: &GoldPair, threshold: f64) -> bool {
    let direct = r.doc_a == g.doc_a
        && r.doc_b == g.doc_b
        && span_overlap(r.passage.a_start, r.passage.a_end, g.a_start, g.a_end) >= threshold
        && span_overlap(r.passage.b_start, r.passage.b_end, g.b_start, g.b_end) >= threshold;
    let swapped = r.doc_a == g.doc_b
        && r.doc_b == g.doc_a
        && span_overlap(r.passage.a_start, r.passage.a_end, g.b_start, g.b_end) >= threshold
        && span_overlap(r.passage.b_start, r.passage.b_end, g.a_start, g.a_end) >= threshold;
    direct || swapped
}

/// Score predictions against gold. A gold pair is recalled when a
/// prediction overlaps it at least `threshold` on both spans; a prediction
/// is correct when it so-overlaps some gold pair. Each gold pair matches at
/// most one prediction, assigned greedily in score order. With no
/// predictions, precision is 1.0 by convention.
pub fn eval_alignment(
    preds: &[PassageRecord],
    gold: &[GoldPair],
    threshold: f64,
) -> EvalResult {
    assert!(
        threshold > 0.0 && threshold <= 1.0,
        "threshold must be in (0, 1]"
    );
    let mut order: Vec<usize> = (0..preds.len()).collect();
    order.sort_by(|&x, &y| {
        preds[y]
            .passage
            .score
            .total_cmp(&preds[x].passage.score)
            .then(preds[x].passage.a_start.cmp(&preds[y].passage.a_start))
            .then(preds[x].passage.b_start.cmp(&preds[y].passage.b_start))
    });
    let mut gold_taken = vec![false; gold.len()];
    let mut matched = Vec::new();
    let mut correct = 0usize;
    for &pi in &order {
        let r = &preds[pi];
        let mut hit_any = false;
        for (gi, g) in gold.iter().enumerate() {
            if record_hits_gold(r, g, threshold) {
                hit_any = true;
                if !gold_taken[gi] {
                    gold_taken[gi] = true;
                    matched.push((gi, pi));
                    break;
                }
            }
        }
        if hit_any {
            correct += 1;
        }
    }
    matched.sort_unstable();
    let precision = if preds.is_empty() {
        1.0
    } else {
        correct as f64 / preds.len() as f64
    };
    let recall = if gold.is_empty() {
        1.0
    } else {
        matched.len() as f64 / gold.len() as f64
    };
    EvalResult {
        precision,
        recall,
        matched,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::VariantCounts;

    fn cfg() -> CleaningConfig {
        CleaningConfig::default()
    }

    #[test]
    fn sigla_are_removed() {
        assert_eq!(clean("[12b.3] dper na /", &cfg()).unwrap(), "dper na /");
        assert_eq!(clean("dper {f 4a} na", &cfg()).unwrap(), "dper na");
    }

    #[test]
    fn text_without_sigla_is_unchanged() {
        assert_eq!(
            clean("dper na / g.yang", &cfg()).unwrap(),
            "dper na / g.yang"
        );
    }

    #[test]
    fn whitespace_collapses() {
        assert_eq!(clean("dper  na", &cfg()).unwrap(), "dper na");
        assert_eq!(clean("dper\n na\t/", &cfg()).unwrap(), "dper na /");
    }

    #[test]
    fn punctuation_is_standardized() {
        assert_eq!(clean("dper na; don", &cfg()).unwrap(), "dper na / don");
        assert_eq!(clean("dper, na", &cfg()).unwrap(), "dper na");
        assert_eq!(clean("na/don", &cfg()).unwrap(), "na / don");
    }

    #[test]
    fn unbalanced_sigla_is_an_error() {
        assert!(matches!(
            clean("dper [12 na", &cfg()),
            Err(Error::UnbalancedSigla(5))
        ));
        assert!(matches!(
            clean("dper ] na", &cfg()),
            Err(Error::UnbalancedSigla(_))
        ));
    }

    #[test]
    fn clean_is_idempotent() {
        for raw in [
            "[1a] dge slong; gi {x} chos",
            "dper  na //  don",
            "nga'i [p. 4] bla ma",
        ] {
            let once = clean(raw, &cfg()).unwrap();
            let twice = clean(&once, &cfg()).unwrap();
            assert_eq!(once, twice, "idempotence for {raw:?}");
        }
    }

    #[test]
    fn gold_round_trip() {
        let pairs = vec![
            GoldPair {
                doc_a: "a".into(),
                a_start: 3,
                a_end: 20,
                doc_b: "b".into(),
                b_start: 100,
                b_end: 118,
                note: "planted".into(),
            },
            GoldPair {
                doc_a: "a".into(),
                a_start: 40,
                a_end: 55,
                doc_b: "b".into(),
                b_start: 9,
                b_end: 24,
                note: String::new(),
            },
        ];
        let text = write_gold(&pairs);
        assert_eq!(read_gold(&text).unwrap(), pairs);
    }

    fn record(a: (usize, usize), b: (usize, usize), score: f64) -> PassageRecord {
        PassageRecord {
            doc_a: "a".into(),
            doc_b: "b".into(),
            passage: ParallelPassage {
                a_start: a.0,
                a_end: a.1,
                b_start: b.0,
                b_end: b.1,
                score,
                matched: 0,
                variants: VariantCounts::default(),
            },
        }
    }

    fn gold(a: (usize, usize), b: (usize, usize)) -> GoldPair {
        GoldPair {
            doc_a: "a".into(),
            a_start: a.0,
            a_end: a.1,
            doc_b: "b".into(),
            b_start: b.0,
            b_end: b.1,
            note: String::new(),
        }
    }

    #[test]
    fn exact_predictions_score_perfectly() {
        let g = vec![gold((0, 9), (5, 14)), gold((20, 29), (30, 39))];
        let p = vec![record((0, 9), (5, 14), 9.0), record((20, 29), (30, 39), 8.0)];
        let r = eval_alignment(&p, &g, 0.9);
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.recall, 1.0);
        assert_eq!(r.matched, vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn empty_predictions_convention() {
        let g = vec![gold((0, 9), (5, 14))];
        let r = eval_alignment(&[], &g, 0.9);
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.recall, 0.0);
    }

    #[test]
    fn half_recovered_no_spurious() {
        let g = vec![gold((0, 9), (5, 14)), gold((20, 29), (30, 39))];
        let p = vec![record((0, 9), (5, 14), 9.0)];
        let r = eval_alignment(&p, &g, 0.9);
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.recall, 0.5);
    }

    #[test]
    fn overlap_threshold_is_respected() {
        let g = vec![gold((0, 9), (0, 9))];
        // 9 of 10 positions on both spans: overlap 0.9 passes.
        let p = vec![record((0, 8), (0, 8), 1.0)];
        assert_eq!(eval_alignment(&p, &g, 0.9).recall, 1.0);
        // 8 of 10 fails at 0.9.
        let p = vec![record((0, 7), (0, 7), 1.0)];
        assert_eq!(eval_alignment(&p, &g, 0.9).recall, 0.0);
    }

    #[test]
    fn each_gold_matches_at_most_one_prediction() {
        let g = vec![gold((0, 9), (0, 9))];
        let p = vec![record((0, 9), (0, 9), 5.0), record((0, 9), (0, 9), 4.0)];
        let r = eval_alignment(&p, &g, 0.9);
        assert_eq!(r.matched.len(), 1);
        // Both predictions hit gold, so both count as correct.
        assert_eq!(r.precision, 1.0);
        assert_eq!(r.recall, 1.0);
    }
}
