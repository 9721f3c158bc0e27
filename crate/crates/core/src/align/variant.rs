//! Variant classification and replacement statistics over aligned passages.

use super::graph::vertices_for_keys;
use super::paths::trace_chain;
use super::{AlignParams, Document, MatchKey, ParallelPassage, Token};
use crate::error::{Error, Result};
use crate::stem::{stem_identical, CostTable, NormRuleSet};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

/// Classification of one aligned position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum VariantClass {
    /// Both sides present with identical written form.
    Identical,
    /// Inflectional, orthographic or particle variation.
    NonSubstantial,
    /// Both sides present but not relatable: a content substitution.
    SubstantialSubstitution,
    /// A content syllable present on one side only.
    SubstantialGap,
}

/// The grammatical-particle lexicon consulted by the classifier.
#[derive(Clone, Debug, Default)]
pub struct ParticleLexicon {
    forms: BTreeSet<String>,
}

static SHIPPED_LEXICON_TEXT: &str = include_str!("../../data/particles.txt");
static SHIPPED_LEXICON: OnceLock<ParticleLexicon> = OnceLock::new();

impl ParticleLexicon {
    pub fn shipped() -> &'static ParticleLexicon {
        SHIPPED_LEXICON.get_or_init(|| ParticleLexicon::parse(SHIPPED_LEXICON_TEXT))
    }

    pub fn parse(text: &str) -> ParticleLexicon {
        let forms = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        ParticleLexicon { forms }
    }

    pub fn from_path(path: &std::path::Path) -> Result<ParticleLexicon> {
        Ok(ParticleLexicon::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, form: &str) -> bool {
        self.forms.contains(form)
    }

    pub fn forms(&self) -> impl Iterator<Item = &str> {
        self.forms.iter().map(String::as_str)
    }
}

/// Classify one aligned position (either side may be absent, not both).
pub fn classify_variant(
    a: Option<&Token>,
    b: Option<&Token>,
    rules: &NormRuleSet,
    lexicon: &ParticleLexicon,
) -> Result<VariantClass> {
    match (a, b) {
        (None, None) => Err(Error::BothAbsent),
        (Some(x), Some(y)) => {
            if x.text == y.text {
                return Ok(VariantClass::Identical);
            }
            let stems_match = match (&x.tuple, &y.tuple) {
                (Some(tx), Some(ty)) => stem_identical(tx, ty, rules),
                _ => false,
            };
            if stems_match || (lexicon.contains(&x.text) && lexicon.contains(&y.text)) {
                Ok(VariantClass::NonSubstantial)
            } else {
                Ok(VariantClass::SubstantialSubstitution)
            }
        }
        (Some(x), None) | (None, Some(x)) => {
            if lexicon.contains(&x.text) {
                Ok(VariantClass::NonSubstantial)
            } else {
                Ok(VariantClass::SubstantialGap)
            }
        }
    }
}

/// The aligned positions of a passage: matched pairs at path vertices, the
/// shorter side of each inter-vertex hole paired up as substitutions, and
/// the remainder as one-sided gaps.
pub(crate) fn aligned_positions(
    a: &Document,
    b: &Document,
    passage: &ParallelPassage,
    p: &AlignParams,
) -> Vec<(Option<usize>, Option<usize>)> {
    let a_keys = &a.keys[passage.a_start..=passage.a_end];
    let b_keys = &b.keys[passage.b_start..=passage.b_end];
    let vertices = if p.vertex_threshold == 0.0 {
        vertices_for_keys(a_keys, b_keys, p, None::<&fn(&MatchKey, &MatchKey) -> f64>)
    } else {
        let dist = super::stem_cost_fn(CostTable::shipped());
        vertices_for_keys(a_keys, b_keys, p, Some(&dist))
    };
    let local_terminal = (
        (passage.a_end - passage.a_start) as u32,
        (passage.b_end - passage.b_start) as u32,
    );
    let chain = trace_chain(&vertices, (0, 0), local_terminal, p);

    let mut out = Vec::new();
    let mut prev: Option<(usize, usize)> = None;
    for (vi, vj) in chain {
        let (gi, gj) = (vi as usize + passage.a_start, vj as usize + passage.b_start);
        if let Some((pi, pj)) = prev {
            let da = gi - pi - 1;
            let db = gj - pj - 1;
            let paired = da.min(db);
            for k in 1..=paired {
                out.push((Some(pi + k), Some(pj + k)));
            }
            for k in paired + 1..=da {
                out.push((Some(pi + k), None));
            }
            for k in paired + 1..=db {
                out.push((None, Some(pj + k)));
            }
        }
        out.push((Some(gi), Some(gj)));
        prev = Some((gi, gj));
    }
    out
}

/// Frequency report over all aligned positions of a passage set.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ReplacementReport {
    pub variants: super::VariantCounts,
    pub aligned_positions: usize,
    /// Letter substitutions keyed `slot:from>to` with `-` for an empty slot.
    pub slot_substitutions: BTreeMap<String, usize>,
}

/// Tally variant classes and per-slot letter substitutions across passages.
pub fn replacement_stats(
    passages: &[ParallelPassage],
    a: &Document,
    b: &Document,
    p: &AlignParams,
    rules: &NormRuleSet,
    lexicon: &ParticleLexicon,
) -> ReplacementReport {
    let mut report = ReplacementReport::default();
    for passage in passages {
        for (ia, ib) in aligned_positions(a, b, passage, p) {
            let ta = ia.map(|i| &a.tokens[i]);
            let tb = ib.map(|j| &b.tokens[j]);
            let class =
                classify_variant(ta, tb, rules, lexicon).expect("one side present by construction");
            report.aligned_positions += 1;
            match class {
                VariantClass::Identical => report.variants.identical += 1,
                VariantClass::NonSubstantial => report.variants.non_substantial += 1,
                VariantClass::SubstantialSubstitution => {
                    report.variants.substantial_substitution += 1
                }
                VariantClass::SubstantialGap => report.variants.substantial_gap += 1,
            }
            if let (Some(x), Some(y)) = (ta, tb) {
                if x.text != y.text {
                    if let (Some(tx), Some(ty)) = (&x.tuple, &y.tuple) {
                        tally_slot_substitutions(tx, ty, &mut report.slot_substitutions);
                    }
                }
            }
        }
    }
    report
}

fn tally_slot_substitutions(
    x: &crate::syllable::SyllableTuple,
    y: &crate::syllable::SyllableTuple,
    tally: &mut BTreeMap<String, usize>,
) {
    let form = |l: Option<crate::wylie::TibetanLetter>| -> &str {
        l.map(|l| l.wylie()).unwrap_or("-")
    };
    let slots = [
        ("prescript", x.prescript, y.prescript),
        ("superscript", x.superscript, y.superscript),
        ("core", Some(x.core), Some(y.core)),
        ("subscript", x.subscript, y.subscript),
        ("vowel", Some(x.vowel), Some(y.vowel)),
        ("coda", x.coda, y.coda),
        ("postscript", x.postscript, y.postscript),
    ];
    for (name, fx, fy) in slots {
        if fx != fy {
            let key = format!("{name}:{}>{}", form(fx), form(fy));
            *tally.entry(key).or_insert(0) += 1;
        }
    }
}
