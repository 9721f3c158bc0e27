//! Approximate parallel-passage detection between documents.
//!
//! Matching works over normalized stems rather than characters: positions
//! with equal (or near-equal) stems become vertices of a match graph, paths
//! through nearby vertices are chained by a dynamic program, and maximal
//! feasible paths become candidate passages. A path is feasible while its
//! accumulated cost (gap penalties plus vertex costs) stays within the
//! relative error budget `tau * max(span lengths)`.
//!
//! [`align_chunked`] runs the same computation over overlapping chunk pairs
//! and is required to reproduce [`align_pair`] exactly, independent of worker
//! count; the per-chunk work parallelizes with rayon when the `parallel`
//! feature (default) is on and degrades to a sequential loop otherwise.
//! [`oracle::oracle_align`] is a brute-force reference implementation for
//! small inputs, sharing the same acceptance predicate.

mod chunk;
mod graph;
mod paths;
pub mod oracle;
mod variant;

pub use chunk::{align_chunked, ChunkParams};
pub use graph::{build_match_graph, MatchGraph, Vertex};
pub use paths::{find_maximal_paths, PathCandidate};
pub use variant::{
    classify_variant, replacement_stats, ParticleLexicon, ReplacementReport, VariantClass,
};

use crate::error::{Error, Result};
use crate::stem::{self, CostTable, NormRuleSet, Stem};
use crate::syllable::{self, SyllableTuple};
use crate::wylie::{self, Span, TibetanLetter};
use serde::{Deserialize, Serialize};

/// One source token: its text, provenance, and parse (None = foreign).
#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub text: String,
    pub span: Span,
    pub tuple: Option<SyllableTuple>,
    pub letter_count: u32,
}

/// Matching key of a token: its normalized stem, or the raw text for
/// foreign tokens (so repeated foreign material can still align).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MatchKey {
    Stem(Stem),
    Foreign(Box<str>),
}

/// An identified sequence of tokens with per-token stems.
#[derive(Clone, Debug)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<Token>,
    pub keys: Vec<MatchKey>,
    /// Sentence boundaries as produced by [`wylie::split_units`].
    pub sentence_breaks: Vec<usize>,
}

impl Document {
    /// Build a document from cleaned Wylie text. Unparseable syllables are
    /// kept as foreign tokens.
    pub fn from_text(
        id: &str,
        text: &str,
        tables: &syllable::SyllableTables,
        rules: &NormRuleSet,
    ) -> Document {
        use std::collections::HashMap;
        let (units, sentence_breaks) = wylie::split_units(text);
        let mut cache: HashMap<String, (Option<SyllableTuple>, u32)> = HashMap::new();
        let mut tokens = Vec::with_capacity(units.len());
        let mut keys = Vec::with_capacity(units.len());
        for unit in units {
            let (tuple, letter_count) = cache
                .entry(unit.text.clone())
                .or_insert_with(|| match wylie::tokenize_letters(&unit.text) {
                    Ok((letters, seps)) => {
                        let n = letters.len() as u32;
                        (syllable::parse_syllable(&letters, &seps, tables).ok(), n)
                    }
                    Err(_) => (None, unit.text.chars().count() as u32),
                })
                .clone();
            keys.push(match &tuple {
                Some(t) => MatchKey::Stem(stem::normalize(&stem::extract_stem(t), rules)),
                None => MatchKey::Foreign(unit.text.clone().into_boxed_str()),
            });
            tokens.push(Token {
                text: unit.text,
                span: unit.span,
                tuple,
                letter_count,
            });
        }
        Document {
            id: id.to_string(),
            tokens,
            keys,
            sentence_breaks,
        }
    }

    /// Build a document directly from parsed tuples (fixture generation).
    /// The token texts and spans describe the space-joined rendering.
    pub fn from_tuples(
        id: &str,
        tuples: &[SyllableTuple],
        tables: &syllable::SyllableTables,
        rules: &NormRuleSet,
    ) -> Document {
        let mut tokens = Vec::with_capacity(tuples.len());
        let mut keys = Vec::with_capacity(tuples.len());
        let mut offset = 0usize;
        for t in tuples {
            let text = syllable::render_syllable(t, tables);
            let letter_count = t.letter_count(tables) as u32;
            let span = Span {
                start: offset,
                len: text.len(),
            };
            offset += text.len() + 1;
            keys.push(MatchKey::Stem(stem::normalize(&stem::extract_stem(t), rules)));
            tokens.push(Token {
                text,
                span,
                tuple: Some(*t),
                letter_count,
            });
        }
        Document {
            id: id.to_string(),
            tokens,
            keys,
            sentence_breaks: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The document as a flat letter stream (foreign tokens are skipped).
    /// This is the character-granularity input for comparing alignment at
    /// letter versus stem level.
    pub fn letter_keys(&self, tables: &syllable::SyllableTables) -> Vec<TibetanLetter> {
        let mut out = Vec::new();
        for t in &self.tokens {
            if let Some(tuple) = &t.tuple {
                out.extend(tuple.letters(tables));
            }
        }
        out
    }

    /// Rendered text, tokens joined by spaces.
    pub fn render(&self) -> String {
        let parts: Vec<&str> = self.tokens.iter().map(|t| t.text.as_str()).collect();
        parts.join(" ")
    }
}

/// Parameters of the match graph and path search.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct AlignParams {
    /// Maximum stem distance for two positions to form a vertex.
    pub vertex_threshold: f64,
    /// Maximum number of syllables skipped per side in one step.
    pub max_gap: usize,
    /// Maximum accumulated cost as a fraction of the longer span.
    pub error_budget: f64,
    /// Minimum passage length in syllables, on both sides.
    pub min_length: usize,
}

impl Default for AlignParams {
    fn default() -> Self {
        AlignParams {
            vertex_threshold: 0.0,
            max_gap: 2,
            error_budget: 0.25,
            min_length: 6,
        }
    }
}

impl AlignParams {
    pub fn validate(&self) -> Result<()> {
        if self.vertex_threshold < 0.0 {
            return Err(Error::InvalidParams("vertex threshold must be >= 0".into()));
        }
        if !(0.0..1.0).contains(&self.error_budget) {
            return Err(Error::InvalidParams("error budget must be in [0, 1)".into()));
        }
        if self.min_length < 2 {
            return Err(Error::InvalidParams("min length must be >= 2".into()));
        }
        Ok(())
    }
}

/// Tolerance for feasibility comparisons with fractional budgets.
pub(crate) const FEAS_EPS: f64 = 1e-9;

/// The shared acceptance predicate: a path of the given accumulated cost
/// spanning `len_a` x `len_b` is feasible within the error budget.
pub(crate) fn within_budget(cost: f64, len_a: usize, len_b: usize, p: &AlignParams) -> bool {
    cost <= p.error_budget * (len_a.max(len_b) as f64) + FEAS_EPS
}

/// Tallies of aligned-position classifications within a passage.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantCounts {
    pub identical: usize,
    pub non_substantial: usize,
    pub substantial_substitution: usize,
    pub substantial_gap: usize,
}

impl VariantCounts {
    pub fn total(&self) -> usize {
        self.identical + self.non_substantial + self.substantial_substitution
            + self.substantial_gap
    }
}

/// A scored pair of spans (inclusive syllable indices) across two documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParallelPassage {
    pub a_start: usize,
    pub a_end: usize,
    pub b_start: usize,
    pub b_end: usize,
    pub score: f64,
    pub matched: usize,
    pub variants: VariantCounts,
}

impl ParallelPassage {
    pub fn a_len(&self) -> usize {
        self.a_end - self.a_start + 1
    }

    pub fn b_len(&self) -> usize {
        self.b_end - self.b_start + 1
    }

    /// Same passage seen from the other document's perspective.
    pub fn swapped(&self) -> ParallelPassage {
        ParallelPassage {
            a_start: self.b_start,
            a_end: self.b_end,
            b_start: self.a_start,
            b_end: self.a_end,
            ..*self
        }
    }
}

/// Drop candidates shorter than the minimum length on either span, merge
/// candidates overlapping at least half on both spans (higher score wins),
/// and sort by spans. Variant tallies are left zeroed; see
/// [`annotate_variants`].
pub fn merge_and_filter(paths: Vec<PathCandidate>, p: &AlignParams) -> Vec<ParallelPassage> {
    let mut cands: Vec<PathCandidate> = paths
        .into_iter()
        .filter(|c| c.a_len() as usize >= p.min_length && c.b_len() as usize >= p.min_length)
        .collect();
    cands.sort_by(|x, y| {
        y.score
            .total_cmp(&x.score)
            .then(x.a_start.cmp(&y.a_start))
            .then(x.b_start.cmp(&y.b_start))
            .then(x.a_end.cmp(&y.a_end))
            .then(x.b_end.cmp(&y.b_end))
            .then(x.matched.cmp(&y.matched))
    });
    let overlap_half = |s1: u32, e1: u32, s2: u32, e2: u32| -> bool {
        let lo = s1.max(s2);
        let hi = e1.min(e2);
        if lo > hi {
            return false;
        }
        let inter = (hi - lo + 1) as f64;
        let shorter = (e1 - s1 + 1).min(e2 - s2 + 1) as f64;
        inter / shorter >= 0.5
    };
    let mut kept: Vec<PathCandidate> = Vec::new();
    for c in cands {
        let dup = kept.iter().any(|k| {
            overlap_half(c.a_start, c.a_end, k.a_start, k.a_end)
                && overlap_half(c.b_start, c.b_end, k.b_start, k.b_end)
        });
        if !dup {
            kept.push(c);
        }
    }
    kept.sort_by_key(|c| (c.a_start, c.b_start, c.a_end, c.b_end));
    kept.into_iter()
        .map(|c| ParallelPassage {
            a_start: c.a_start as usize,
            a_end: c.a_end as usize,
            b_start: c.b_start as usize,
            b_end: c.b_end as usize,
            score: c.score,
            matched: c.matched as usize,
            variants: VariantCounts::default(),
        })
        .collect()
}

/// Fill in the variant tallies of each passage by re-deriving its path and
/// classifying every aligned position.
pub fn annotate_variants(
    passages: &mut [ParallelPassage],
    a: &Document,
    b: &Document,
    p: &AlignParams,
    rules: &NormRuleSet,
    lexicon: &ParticleLexicon,
) {
    for passage in passages.iter_mut() {
        let mut counts = VariantCounts::default();
        for (ia, ib) in variant::aligned_positions(a, b, passage, p) {
            let class = classify_variant(
                ia.map(|i| &a.tokens[i]),
                ib.map(|j| &b.tokens[j]),
                rules,
                lexicon,
            )
            .expect("at least one side present");
            match class {
                VariantClass::Identical => counts.identical += 1,
                VariantClass::NonSubstantial => counts.non_substantial += 1,
                VariantClass::SubstantialSubstitution => counts.substantial_substitution += 1,
                VariantClass::SubstantialGap => counts.substantial_gap += 1,
            }
        }
        passage.variants = counts;
    }
}

/// Find all parallel passages between two documents: match graph, maximal
/// paths, merge, variant annotation. Pure and deterministic.
pub fn align_pair(a: &Document, b: &Document, p: &AlignParams) -> Result<Vec<ParallelPassage>> {
    align_pair_with(
        a,
        b,
        p,
        NormRuleSet::shipped(),
        ParticleLexicon::shipped(),
        CostTable::shipped(),
    )
}

/// [`align_pair`] with explicit normalization rules, particle lexicon and
/// cost table (the costs matter only with a positive vertex threshold).
pub fn align_pair_with(
    a: &Document,
    b: &Document,
    p: &AlignParams,
    rules: &NormRuleSet,
    lexicon: &ParticleLexicon,
    costs: &CostTable,
) -> Result<Vec<ParallelPassage>> {
    p.validate()?;
    let graph = graph::build_match_graph_with(a, b, p, costs)?;
    let cands = find_maximal_paths(&graph, p);
    let mut passages = merge_and_filter(cands, p);
    annotate_variants(&mut passages, a, b, p, rules, lexicon);
    Ok(passages)
}

/// Run the chaining algorithm over bare key streams. This is the surface
/// used to compare stem-level against letter-level granularity: the
/// algorithm and parameters are identical, only the tokens differ.
pub fn align_keys<K: std::hash::Hash + Eq>(
    a: &[K],
    b: &[K],
    p: &AlignParams,
) -> Result<Vec<ParallelPassage>> {
    p.validate()?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyDocument("empty key stream".into()));
    }
    let vertices = graph::vertices_for_keys(a, b, p, None::<&fn(&K, &K) -> f64>);
    let cands = paths::chain_candidates(&vertices, p);
    Ok(merge_and_filter(cands, p))
}

pub(crate) fn stem_cost_fn(costs: &CostTable) -> impl Fn(&MatchKey, &MatchKey) -> f64 + '_ {
    move |x, y| match (x, y) {
        (MatchKey::Stem(a), MatchKey::Stem(b)) => stem::stem_distance(a, b, costs),
        (MatchKey::Foreign(a), MatchKey::Foreign(b)) if a == b => 0.0,
        _ => f64::INFINITY,
    }
}
