//! Stem extraction, normalization and stemmic distance.
//!
//! The stem of a syllable is its stack (core with optional superscript and
//! subscript), vowel and coda; prescript, postscript and appended particle
//! are inflectional material and are dropped. Two syllables are stemmically
//! identical when their normalized stems are field-wise equal, which groups
//! inflection rows like sgrub / bsgrubs / bsgrub / sgrubs together while
//! keeping e.g. sgrub and grub apart.
//!
//! Normalization is rule-driven (see `data/stem_rules.txt`); the shipped
//! rules cover attested letter-group alternations and a seed list of
//! verb-class vowel rows.

use crate::error::{Error, Result};
use crate::syllable::SyllableTuple;
use crate::wylie::TibetanLetter;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;
use std::sync::OnceLock;

/// Normalized or raw stem: stack, vowel, optional coda.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Stem {
    pub superscript: Option<TibetanLetter>,
    pub core: TibetanLetter,
    pub subscript: Option<TibetanLetter>,
    pub vowel: TibetanLetter,
    pub coda: Option<TibetanLetter>,
    pub normalized: bool,
}

impl Stem {
    /// The stack rendered as a Wylie string, e.g. `sgr`.
    pub fn stack_string(&self) -> String {
        let mut s = String::new();
        if let Some(l) = self.superscript {
            s.push_str(l.wylie());
        }
        s.push_str(self.core.wylie());
        if let Some(l) = self.subscript {
            s.push_str(l.wylie());
        }
        s
    }
}

impl fmt::Display for Stem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{}", self.stack_string(), self.vowel.wylie())?;
        if let Some(c) = self.coda {
            write!(f, ",{}", c.wylie())?;
        }
        write!(f, ")")
    }
}

impl Serialize for Stem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Stem", 4)?;
        st.serialize_field("stack", &self.stack_string())?;
        st.serialize_field("vowel", self.vowel.wylie())?;
        st.serialize_field("coda", &self.coda.map(|c| c.wylie()))?;
        st.serialize_field("normalized", &self.normalized)?;
        st.end()
    }
}

/// Drop inflectional slots: prescript, postscript, appended particle.
pub fn extract_stem(t: &SyllableTuple) -> Stem {
    Stem {
        superscript: t.superscript,
        core: t.core,
        subscript: t.subscript,
        vowel: t.vowel,
        coda: t.coda,
        normalized: false,
    }
}

/// A slot pattern in a normalization rule. `None` means "match anything";
/// `Some(None)` means "slot must be absent".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StemPattern {
    pub stack: Option<(
        Option<TibetanLetter>,
        TibetanLetter,
        Option<TibetanLetter>,
    )>,
    pub vowel: Option<TibetanLetter>,
    pub coda: Option<Option<TibetanLetter>>,
}

/// Replacement side of a rule: fields present are overwritten.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StemPatch {
    pub stack: Option<(
        Option<TibetanLetter>,
        TibetanLetter,
        Option<TibetanLetter>,
    )>,
    pub vowel: Option<TibetanLetter>,
    pub coda: Option<Option<TibetanLetter>>,
}

#[derive(Clone, Debug)]
pub struct NormalizationRule {
    pub rule_id: String,
    pub pattern: StemPattern,
    pub replacement: StemPatch,
}

impl NormalizationRule {
    fn matches(&self, s: &Stem) -> bool {
        if let Some((sup, core, sub)) = self.pattern.stack {
            if s.superscript != sup || s.core != core || s.subscript != sub {
                return false;
            }
        }
        if let Some(v) = self.pattern.vowel {
            if s.vowel != v {
                return false;
            }
        }
        if let Some(c) = self.pattern.coda {
            if s.coda != c {
                return false;
            }
        }
        true
    }

    fn apply(&self, s: &mut Stem) {
        if let Some((sup, core, sub)) = self.replacement.stack {
            s.superscript = sup;
            s.core = core;
            s.subscript = sub;
        }
        if let Some(v) = self.replacement.vowel {
            s.vowel = v;
        }
        if let Some(c) = self.replacement.coda {
            s.coda = c;
        }
    }
}

/// An ordered list of normalization rules.
#[derive(Clone, Debug, Default)]
pub struct NormRuleSet {
    pub rules: Vec<NormalizationRule>,
}

static SHIPPED_RULES: &str = include_str!("../data/stem_rules.txt");
static SHIPPED_RULESET: OnceLock<NormRuleSet> = OnceLock::new();

impl NormRuleSet {
    pub fn shipped() -> &'static NormRuleSet {
        SHIPPED_RULESET.get_or_init(|| NormRuleSet::parse(SHIPPED_RULES).expect("shipped rules"))
    }

    pub fn from_path(path: &std::path::Path) -> Result<NormRuleSet> {
        NormRuleSet::parse(&std::fs::read_to_string(path)?)
    }

    /// Parse the line format `rule <id> <pattern fields> => <patch fields>`.
    pub fn parse(text: &str) -> Result<NormRuleSet> {
        let mut rules = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: &str| Error::InvalidTable(format!("rule line {}: {msg}", lineno + 1));
            let mut parts = line.split_whitespace();
            if parts.next() != Some("rule") {
                return Err(bad("expected `rule`"));
            }
            let rule_id = parts.next().ok_or_else(|| bad("missing rule id"))?.to_string();
            let rest: Vec<&str> = parts.collect();
            let arrow = rest
                .iter()
                .position(|f| *f == "=>")
                .ok_or_else(|| bad("missing =>"))?;
            let pattern = parse_fields(&rest[..arrow]).map_err(|m| bad(&m))?;
            let patch = parse_fields(&rest[arrow + 1..]).map_err(|m| bad(&m))?;
            rules.push(NormalizationRule {
                rule_id,
                pattern: StemPattern {
                    stack: patch_field(&pattern, "stack")?,
                    vowel: flat_vowel(&pattern)?,
                    coda: flat_coda(&pattern)?,
                },
                replacement: StemPatch {
                    stack: patch_field(&patch, "stack")?,
                    vowel: flat_vowel(&patch)?,
                    coda: flat_coda(&patch)?,
                },
            });
        }
        Ok(NormRuleSet { rules })
    }
}

type Fields<'a> = Vec<(&'a str, &'a str)>;

fn parse_fields<'a>(tokens: &[&'a str]) -> std::result::Result<Fields<'a>, String> {
    tokens
        .iter()
        .map(|tok| {
            tok.split_once('=')
                .ok_or_else(|| format!("malformed field {tok:?}"))
        })
        .collect()
}

#[allow(clippy::type_complexity)]
fn patch_field(
    fields: &Fields,
    key: &str,
) -> Result<Option<(Option<TibetanLetter>, TibetanLetter, Option<TibetanLetter>)>> {
    let Some((_, value)) = fields.iter().find(|(k, _)| *k == key) else {
        return Ok(None);
    };
    let parts: Vec<&str> = value.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::InvalidTable(format!(
            "stack must be sup:core:sub, got {value:?}"
        )));
    }
    let opt = |p: &str| -> Result<Option<TibetanLetter>> {
        if p == "-" {
            Ok(None)
        } else {
            TibetanLetter::consonant(p)
                .map(Some)
                .ok_or_else(|| Error::InvalidTable(format!("unknown consonant {p:?}")))
        }
    };
    let core = TibetanLetter::consonant(parts[1])
        .ok_or_else(|| Error::InvalidTable(format!("unknown core {:?}", parts[1])))?;
    Ok(Some((opt(parts[0])?, core, opt(parts[2])?)))
}

fn flat_vowel(fields: &Fields) -> Result<Option<TibetanLetter>> {
    match fields.iter().find(|(k, _)| *k == "vowel") {
        None => Ok(None),
        Some((_, v)) => TibetanLetter::vowel(v)
            .map(Some)
            .ok_or_else(|| Error::InvalidTable(format!("unknown vowel {v:?}"))),
    }
}

fn flat_coda(fields: &Fields) -> Result<Option<Option<TibetanLetter>>> {
    match fields.iter().find(|(k, _)| *k == "coda") {
        None => Ok(None),
        Some((_, c)) if *c == "-" => Ok(Some(None)),
        Some((_, c)) => TibetanLetter::consonant(c)
            .map(|l| Some(Some(l)))
            .ok_or_else(|| Error::InvalidTable(format!("unknown coda {c:?}"))),
    }
}

/// Apply rules in list order, each at most once. Idempotent for rule sets
/// whose outputs match no earlier pattern, which the shipped set satisfies.
pub fn normalize(s: &Stem, rules: &NormRuleSet) -> Stem {
    let mut out = *s;
    for rule in &rules.rules {
        if rule.matches(&out) {
            rule.apply(&mut out);
        }
    }
    out.normalized = true;
    out
}

/// Stemmic identity: equality of normalized stems.
pub fn stem_identical(a: &SyllableTuple, b: &SyllableTuple, rules: &NormRuleSet) -> bool {
    normalize(&extract_stem(a), rules) == normalize(&extract_stem(b), rules)
}

/// Per-slot substitution costs. A differing slot (including presence versus
/// absence) contributes its entry once; identical slots cost nothing.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CostTable {
    pub superscript: f64,
    pub core: f64,
    pub subscript: f64,
    pub vowel: f64,
    pub coda: f64,
    pub prescript: f64,
    pub postscript: f64,
}

static SHIPPED_COSTS: &str = include_str!("../data/costs.txt");
static SHIPPED_COST_TABLE: OnceLock<CostTable> = OnceLock::new();

impl CostTable {
    pub fn shipped() -> &'static CostTable {
        SHIPPED_COST_TABLE.get_or_init(|| CostTable::parse(SHIPPED_COSTS).expect("shipped costs"))
    }

    pub fn from_path(path: &std::path::Path) -> Result<CostTable> {
        CostTable::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<CostTable> {
        let mut t = CostTable {
            superscript: f64::NAN,
            core: f64::NAN,
            subscript: f64::NAN,
            vowel: f64::NAN,
            coda: f64::NAN,
            prescript: f64::NAN,
            postscript: f64::NAN,
        };
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::InvalidTable(format!("cost line {}: {msg}", lineno + 1));
            let (key, value) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| bad("expected `slot value`".into()))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| bad(format!("bad number: {e}")))?;
            if value < 0.0 {
                return Err(bad("costs must be non-negative".into()));
            }
            match key {
                "superscript" => t.superscript = value,
                "core" => t.core = value,
                "subscript" => t.subscript = value,
                "vowel" => t.vowel = value,
                "coda" => t.coda = value,
                "prescript" => t.prescript = value,
                "postscript" => t.postscript = value,
                other => return Err(bad(format!("unknown slot {other:?}"))),
            }
        }
        for (name, v) in [
            ("superscript", t.superscript),
            ("core", t.core),
            ("subscript", t.subscript),
            ("vowel", t.vowel),
            ("coda", t.coda),
            ("prescript", t.prescript),
            ("postscript", t.postscript),
        ] {
            if v.is_nan() {
                return Err(Error::InvalidTable(format!("missing cost for {name}")));
            }
        }
        Ok(t)
    }
}

/// Sum of per-slot substitution costs between two stems.
pub fn stem_distance(a: &Stem, b: &Stem, costs: &CostTable) -> f64 {
    let mut d = 0.0;
    if a.superscript != b.superscript {
        d += costs.superscript;
    }
    if a.core != b.core {
        d += costs.core;
    }
    if a.subscript != b.subscript {
        d += costs.subscript;
    }
    if a.vowel != b.vowel {
        d += costs.vowel;
    }
    if a.coda != b.coda {
        d += costs.coda;
    }
    d
}

/// Full-syllable distance: normalized stem distance plus prescript and
/// postscript add-or-drop terms. This is the quantity [`fit_costs`] fits.
pub fn tuple_distance(
    a: &SyllableTuple,
    b: &SyllableTuple,
    rules: &NormRuleSet,
    costs: &CostTable,
) -> f64 {
    let mut d = stem_distance(
        &normalize(&extract_stem(a), rules),
        &normalize(&extract_stem(b), rules),
        costs,
    );
    if a.prescript != b.prescript {
        d += costs.prescript;
    }
    if a.postscript != b.postscript {
        d += costs.postscript;
    }
    d
}

/// Distance below this threshold classifies a fitted pair as "same".
pub const FIT_THRESHOLD: f64 = 1.0;

/// Learn per-slot costs from labeled syllable pairs (`true` = same) with
/// logistic gradient descent on the margin `FIT_THRESHOLD - distance`,
/// keeping every cost non-negative. Deterministic for a given seed.
pub fn fit_costs(
    labeled_pairs: &[(SyllableTuple, SyllableTuple, bool)],
    rules: &NormRuleSet,
    seed: u64,
) -> Result<CostTable> {
    let n_same = labeled_pairs.iter().filter(|(_, _, same)| *same).count();
    if n_same == 0 || n_same == labeled_pairs.len() {
        return Err(Error::DegenerateData(
            "need at least one pair of each label".into(),
        ));
    }
    // Indicator features in fixed slot order.
    let features: Vec<([f64; 7], f64)> = labeled_pairs
        .iter()
        .map(|(a, b, same)| {
            let sa = normalize(&extract_stem(a), rules);
            let sb = normalize(&extract_stem(b), rules);
            let x = [
                (sa.superscript != sb.superscript) as u8 as f64,
                (sa.core != sb.core) as u8 as f64,
                (sa.subscript != sb.subscript) as u8 as f64,
                (sa.vowel != sb.vowel) as u8 as f64,
                (sa.coda != sb.coda) as u8 as f64,
                (a.prescript != b.prescript) as u8 as f64,
                (a.postscript != b.postscript) as u8 as f64,
            ];
            (x, if *same { 1.0 } else { 0.0 })
        })
        .collect();

    let mut w = [0.5f64; 7];
    let mut order: Vec<usize> = (0..features.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lr = 0.25;
    for _epoch in 0..400 {
        order.shuffle(&mut rng);
        for &i in &order {
            let (x, y) = &features[i];
            let d: f64 = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum();
            let z = FIT_THRESHOLD - d;
            let p = 1.0 / (1.0 + (-z).exp());
            // Gradient of the logistic loss in the margin z = threshold - d:
            // a "same" pair pushes differing slots cheaper, a "different"
            // pair pushes them costlier. Costs stay non-negative.
            let g = y - p;
            for (wi, xi) in w.iter_mut().zip(x) {
                *wi = (*wi - lr * g * xi).max(0.0);
            }
        }
    }
    Ok(CostTable {
        superscript: w[0],
        core: w[1],
        subscript: w[2],
        vowel: w[3],
        coda: w[4],
        prescript: w[5],
        postscript: w[6],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syllable::{parse_str, SyllableTables};

    fn t(s: &str) -> SyllableTuple {
        parse_str(s, SyllableTables::shipped()).unwrap_or_else(|e| panic!("parse {s}: {e}"))
    }

    fn norm(s: &str) -> Stem {
        normalize(&extract_stem(&t(s)), NormRuleSet::shipped())
    }

    #[test]
    fn inflection_row_shares_one_stem() {
        let stem = norm("sgrub");
        for form in ["bsgrubs", "bsgrub", "sgrubs"] {
            assert_eq!(norm(form), stem, "{form} should stem like sgrub");
        }
        assert_eq!(stem.stack_string(), "sgr");
    }

    #[test]
    fn achung_prescript_is_dropped() {
        assert_eq!(norm("'grub"), norm("grub"));
        assert_eq!(norm("grub").stack_string(), "gr");
    }

    #[test]
    fn sgrub_and_grub_differ() {
        assert_ne!(norm("sgrub"), norm("grub"));
    }

    #[test]
    fn orthographic_sts_normalizes_to_s() {
        assert_eq!(norm("stsogs"), norm("sogs"));
        // Without rules the raw stems differ.
        assert_ne!(
            extract_stem(&t("stsogs")),
            extract_stem(&t("sogs"))
        );
    }

    #[test]
    fn verb_rows_normalize_to_o_forms() {
        assert_eq!(norm("brtag"), norm("rtog"));
        assert_eq!(norm("brtags"), norm("rtog"));
        assert_eq!(norm("dpyad"), norm("dpyod"));
        assert_eq!(norm("dbyad"), norm("dpyod"));
    }

    #[test]
    fn unmatched_stem_is_returned_unchanged() {
        let s = extract_stem(&t("mthong"));
        let n = normalize(&s, NormRuleSet::shipped());
        assert_eq!(
            Stem {
                normalized: true,
                ..s
            },
            n
        );
    }

    #[test]
    fn normalize_is_idempotent_over_enumeration() {
        let tables = SyllableTables::shipped();
        let rules = NormRuleSet::shipped();
        for tuple in crate::syllable::enumerate_valid_syllables(tables, usize::MAX)
            .iter()
            .step_by(37)
        {
            let once = normalize(&extract_stem(tuple), rules);
            let twice = normalize(&once, rules);
            assert_eq!(once, twice, "normalize not idempotent for {tuple:?}");
        }
    }

    #[test]
    fn stem_identity_examples() {
        let rules = NormRuleSet::shipped();
        assert!(stem_identical(&t("bsgrubs"), &t("sgrub"), rules));
        assert!(!stem_identical(&t("sgrub"), &t("grub"), rules));
        assert!(stem_identical(&t("sogs"), &t("stsogs"), rules));
    }

    #[test]
    fn distance_zero_iff_identical() {
        let costs = CostTable::shipped();
        let a = norm("sgrub");
        assert_eq!(stem_distance(&a, &a, costs), 0.0);
        let b = norm("grub");
        assert!(stem_distance(&a, &b, costs) > 0.0);
    }

    #[test]
    fn single_slot_difference_costs_one_entry() {
        let costs = CostTable::shipped();
        let a = norm("sgrub"); // s·g·r, u, b
        let b = norm("grub"); // g·r, u, b
        assert_eq!(stem_distance(&a, &b, costs), costs.superscript);
    }

    /// Breadth-first search over single-slot edits; the cheapest edit script
    /// between two stems must cost exactly the slot-wise sum.
    fn bfs_edit_cost(a: &Stem, b: &Stem, costs: &CostTable) -> f64 {
        use std::collections::HashMap;
        let mut best: HashMap<Stem, f64> = HashMap::new();
        let mut queue = std::collections::VecDeque::new();
        best.insert(*a, 0.0);
        queue.push_back(*a);
        let slot_edits = |s: &Stem, t: &Stem| -> Vec<(Stem, f64)> {
            let mut out = Vec::new();
            let mut e = *s;
            e.superscript = t.superscript;
            out.push((e, costs.superscript));
            let mut e = *s;
            e.core = t.core;
            out.push((e, costs.core));
            let mut e = *s;
            e.subscript = t.subscript;
            out.push((e, costs.subscript));
            let mut e = *s;
            e.vowel = t.vowel;
            out.push((e, costs.vowel));
            let mut e = *s;
            e.coda = t.coda;
            out.push((e, costs.coda));
            out
        };
        while let Some(s) = queue.pop_front() {
            let d = best[&s];
            for (next, c) in slot_edits(&s, b) {
                let nd = d + if next == s { 0.0 } else { c };
                if best.get(&next).map_or(true, |old| nd < *old) {
                    best.insert(next, nd);
                    queue.push_back(next);
                }
            }
        }
        best[b]
    }

    #[test]
    fn distance_matches_bfs_edit_enumeration() {
        let costs = CostTable::shipped();
        let stems: Vec<Stem> = ["sgrub", "grub", "sogs", "rtog", "dpyod", "mthong", "la"]
            .iter()
            .map(|s| norm(s))
            .collect();
        for a in &stems {
            for b in &stems {
                let direct = stem_distance(a, b, costs);
                let brute = bfs_edit_cost(a, b, costs);
                assert!(
                    (direct - brute).abs() < 1e-12,
                    "distance mismatch {a} vs {b}: {direct} vs {brute}"
                );
                // Metric axioms on the same pairs.
                assert_eq!(direct, stem_distance(b, a, costs));
            }
        }
    }

    #[test]
    fn triangle_inequality_on_sampled_stems() {
        let costs = CostTable::shipped();
        let tables = SyllableTables::shipped();
        let rules = NormRuleSet::shipped();
        let stems: Vec<Stem> = crate::syllable::enumerate_valid_syllables(tables, usize::MAX)
            .iter()
            .step_by(997)
            .map(|t| normalize(&extract_stem(t), rules))
            .collect();
        for a in stems.iter().step_by(7) {
            for b in stems.iter().step_by(11) {
                for c in stems.iter().step_by(13) {
                    let ab = stem_distance(a, b, costs);
                    let bc = stem_distance(b, c, costs);
                    let ac = stem_distance(a, c, costs);
                    assert!(ac <= ab + bc + 1e-12, "triangle violated: {a} {b} {c}");
                }
            }
        }
    }

    #[test]
    fn fit_learns_low_vowel_cost_for_same_label() {
        let rules = NormRuleSet::shipped();
        // Vowel-only differences labeled same; core differences labeled different.
        let pairs = vec![
            (t("ka"), t("ki"), true),
            (t("ku"), t("ke"), true),
            (t("mo"), t("ma"), true),
            (t("ka"), t("tha"), false),
            (t("mi"), t("ni"), false),
            (t("so"), t("lo"), false),
        ];
        let fitted = fit_costs(&pairs, rules, 11).unwrap();
        assert!(
            fitted.vowel < FIT_THRESHOLD,
            "vowel cost {} should fall below threshold",
            fitted.vowel
        );
        // Every training pair classified correctly.
        for (a, b, same) in &pairs {
            let d = tuple_distance(a, b, rules, &fitted);
            assert_eq!(d < FIT_THRESHOLD, *same, "pair {a:?}/{b:?}");
        }
    }

    #[test]
    fn fit_rejects_single_label() {
        let pairs = vec![(t("ka"), t("ki"), true), (t("ku"), t("ke"), true)];
        assert!(matches!(
            fit_costs(&pairs, NormRuleSet::shipped(), 1),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn fit_is_deterministic_per_seed() {
        let pairs = vec![
            (t("ka"), t("ki"), true),
            (t("ka"), t("tha"), false),
            (t("mo"), t("ma"), true),
            (t("so"), t("lo"), false),
        ];
        let a = fit_costs(&pairs, NormRuleSet::shipped(), 5).unwrap();
        let b = fit_costs(&pairs, NormRuleSet::shipped(), 5).unwrap();
        assert_eq!(a, b);
    }
}
