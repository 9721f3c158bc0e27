//! Syllable analysis: the eight-slot decomposition of a Tibetan syllable.
//!
//! A syllable holds one core letter and one vowel; prescript, superscript,
//! subscript, coda, postscript and an appended particle are optional. Which
//! slot combinations exist is not hardcoded: the validity tables ship as a
//! text data file (see `data/syllable_tables.txt`) so the letter combinatorics
//! can be amended without touching code.
//!
//! Disambiguation rules, in order:
//! * an appended particle is stripped off the end first (the six-particle set
//!   is part of the tables); at most two vowels may occur in total;
//! * a recorded period separator forces the prescript reading of an onset
//!   pair that would otherwise read as a stack (`g.yang` vs `gyang`);
//! * remaining ambiguous onsets go through the exception list, then the
//!   default preference order (stacked before prescripted).

use crate::error::{Error, Result};
use crate::wylie::{self, TibetanLetter};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

/// Index into the configured appended-particle set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Particle(pub(crate) u8);

impl Particle {
    pub fn index(&self) -> usize {
        self.0 as usize
    }
}

/// Which way an ambiguous onset should be read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OnsetReading {
    Stacked,
    Prescripted,
}

/// Validity tables for slot assignment, loaded from a data file.
#[derive(Debug, Clone)]
pub struct SyllableTables {
    prescripts: BTreeSet<TibetanLetter>,
    superscripts: BTreeSet<TibetanLetter>,
    subscripts: BTreeSet<TibetanLetter>,
    codas: BTreeSet<TibetanLetter>,
    postscripts: BTreeSet<TibetanLetter>,
    sup_core: BTreeSet<(TibetanLetter, TibetanLetter)>,
    core_sub: BTreeSet<(TibetanLetter, TibetanLetter)>,
    triples: BTreeSet<(TibetanLetter, TibetanLetter, TibetanLetter)>,
    pre_onset: BTreeSet<(TibetanLetter, Onset)>,
    coda_post: BTreeSet<(TibetanLetter, TibetanLetter)>,
    particles: Vec<ParticleInfo>,
    exceptions: BTreeMap<String, OnsetReading>,
}

#[derive(Debug, Clone)]
struct ParticleInfo {
    form: String,
    letters: Vec<TibetanLetter>,
}

/// An onset without its prescript: optional superscript, core, optional subscript.
type Onset = (
    Option<TibetanLetter>,
    TibetanLetter,
    Option<TibetanLetter>,
);

static SHIPPED: &str = include_str!("../data/syllable_tables.txt");
static SHIPPED_TABLES: OnceLock<SyllableTables> = OnceLock::new();

impl SyllableTables {
    /// The tables embedded in the library.
    pub fn shipped() -> &'static SyllableTables {
        SHIPPED_TABLES.get_or_init(|| SyllableTables::parse(SHIPPED).expect("shipped tables parse"))
    }

    pub fn from_path(path: &std::path::Path) -> Result<SyllableTables> {
        SyllableTables::parse(&std::fs::read_to_string(path)?)
    }

    /// Parse the line-oriented table format.
    pub fn parse(text: &str) -> Result<SyllableTables> {
        let mut t = SyllableTables {
            prescripts: BTreeSet::new(),
            superscripts: BTreeSet::new(),
            subscripts: BTreeSet::new(),
            codas: BTreeSet::new(),
            postscripts: BTreeSet::new(),
            sup_core: BTreeSet::new(),
            core_sub: BTreeSet::new(),
            triples: BTreeSet::new(),
            pre_onset: BTreeSet::new(),
            coda_post: BTreeSet::new(),
            particles: Vec::new(),
            exceptions: BTreeMap::new(),
        };
        let mut deferred_preonsets: Vec<(TibetanLetter, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let section = fields.next().unwrap();
            let rest: Vec<&str> = fields.collect();
            let bad = |msg: &str| Error::InvalidTable(format!("line {}: {msg}", lineno + 1));
            let consonant = |form: &str| {
                TibetanLetter::consonant(form)
                    .ok_or_else(|| bad(&format!("unknown consonant {form:?}")))
            };
            match section {
                "prescript" | "superscript" | "subscript" | "coda" | "postscript" => {
                    if rest.len() != 1 {
                        return Err(bad("expected one letter"));
                    }
                    let l = consonant(rest[0])?;
                    match section {
                        "prescript" => t.prescripts.insert(l),
                        "superscript" => t.superscripts.insert(l),
                        "subscript" => t.subscripts.insert(l),
                        "coda" => t.codas.insert(l),
                        _ => t.postscripts.insert(l),
                    };
                }
                "sup-core" => {
                    if rest.len() != 2 {
                        return Err(bad("expected two letters"));
                    }
                    t.sup_core.insert((consonant(rest[0])?, consonant(rest[1])?));
                }
                "core-sub" => {
                    if rest.len() != 2 {
                        return Err(bad("expected two letters"));
                    }
                    t.core_sub.insert((consonant(rest[0])?, consonant(rest[1])?));
                }
                "sup-core-sub" => {
                    if rest.len() != 3 {
                        return Err(bad("expected three letters"));
                    }
                    t.triples.insert((
                        consonant(rest[0])?,
                        consonant(rest[1])?,
                        consonant(rest[2])?,
                    ));
                }
                "pre-onset" => {
                    if rest.len() != 2 {
                        return Err(bad("expected prescript and onset form"));
                    }
                    deferred_preonsets.push((consonant(rest[0])?, rest[1].to_string()));
                }
                "coda-post" => {
                    if rest.len() != 2 {
                        return Err(bad("expected two letters"));
                    }
                    t.coda_post
                        .insert((consonant(rest[0])?, consonant(rest[1])?));
                }
                "particle" => {
                    if rest.len() != 1 {
                        return Err(bad("expected one particle form"));
                    }
                    let form = rest[0].to_string();
                    let (letters, seps) = wylie::tokenize_letters(&form)
                        .map_err(|_| bad(&format!("unparseable particle {form:?}")))?;
                    if !seps.is_empty() || letters.first() != Some(&TibetanLetter::A_CHUNG) {
                        return Err(bad("particle must begin with '"));
                    }
                    t.particles.push(ParticleInfo { form, letters });
                }
                "exception-onset" => {
                    if rest.len() != 2 {
                        return Err(bad("expected onset form and reading"));
                    }
                    let reading = match rest[1] {
                        "stacked" => OnsetReading::Stacked,
                        "prescript" => OnsetReading::Prescripted,
                        other => return Err(bad(&format!("unknown reading {other:?}"))),
                    };
                    t.exceptions.insert(rest[0].to_string(), reading);
                }
                other => return Err(bad(&format!("unknown section {other:?}"))),
            }
        }
        // Onset forms in pre-onset lines resolve against the stack tables,
        // so they are handled after all sections are read.
        for (pre, form) in deferred_preonsets {
            let onset = t.resolve_onset_form(&form).ok_or_else(|| {
                Error::InvalidTable(format!("pre-onset {}: unresolvable onset {form:?}", pre))
            })?;
            t.pre_onset.insert((pre, onset));
        }
        if t.particles.len() != 6 {
            return Err(Error::InvalidTable(format!(
                "expected exactly six appended particles, found {}",
                t.particles.len()
            )));
        }
        Ok(t)
    }

    /// Resolve a Wylie onset form like `sgr`, `gy` or `y` to its unique
    /// stack decomposition. Returns None if the form is invalid or ambiguous.
    fn resolve_onset_form(&self, form: &str) -> Option<Onset> {
        let (letters, seps) = wylie::tokenize_letters(form).ok()?;
        if !seps.is_empty() {
            return None;
        }
        let mut found = None;
        for cand in self.stack_candidates(&letters) {
            if found.is_some() {
                return None;
            }
            found = Some(cand);
        }
        found
    }

    /// All table-valid stack readings of a prescript-less onset.
    fn stack_candidates(&self, letters: &[TibetanLetter]) -> Vec<Onset> {
        let mut out = Vec::new();
        match letters {
            [c] if c.is_consonant() => out.push((None, *c, None)),
            [a, b] => {
                if self.sup_core.contains(&(*a, *b)) {
                    out.push((Some(*a), *b, None));
                }
                if self.core_sub.contains(&(*a, *b)) {
                    out.push((None, *a, Some(*b)));
                }
            }
            [a, b, c] => {
                if self.triples.contains(&(*a, *b, *c)) {
                    out.push((Some(*a), *b, Some(*c)));
                }
            }
            _ => {}
        }
        out
    }

    pub fn particle_count(&self) -> usize {
        self.particles.len()
    }

    pub fn particle_form(&self, p: Particle) -> &str {
        &self.particles[p.index()].form
    }

    pub fn particle_letters(&self, p: Particle) -> &[TibetanLetter] {
        &self.particles[p.index()].letters
    }

    pub fn particle_by_form(&self, form: &str) -> Option<Particle> {
        self.particles
            .iter()
            .position(|p| p.form == form)
            .map(|i| Particle(i as u8))
    }

    /// True when writing `pre` directly before `core` would collide with the
    /// stacked reading of the same letters, so a period separator is required.
    fn separator_required(&self, pre: TibetanLetter, core: TibetanLetter) -> bool {
        self.core_sub.contains(&(pre, core)) || self.sup_core.contains(&(pre, core))
    }

    /// Prescripts that may combine with the given stack.
    pub fn prescript_options(
        &self,
        superscript: Option<TibetanLetter>,
        core: TibetanLetter,
        subscript: Option<TibetanLetter>,
    ) -> Vec<TibetanLetter> {
        self.pre_onset
            .iter()
            .filter(|(_, onset)| *onset == (superscript, core, subscript))
            .map(|(p, _)| *p)
            .collect()
    }

    /// Postscripts permitted after the given coda.
    pub fn postscript_options(&self, coda: TibetanLetter) -> Vec<TibetanLetter> {
        self.coda_post
            .iter()
            .filter(|(c, _)| *c == coda)
            .map(|(_, p)| *p)
            .collect()
    }

    /// Check a full tuple against every table constraint.
    pub fn is_valid(&self, t: &SyllableTuple) -> bool {
        if !t.core.is_consonant() || !t.vowel.is_vowel() {
            return false;
        }
        let onset: Onset = (t.superscript, t.core, t.subscript);
        let stack_ok = match (t.superscript, t.subscript) {
            (None, None) => true,
            (Some(s), None) => self.sup_core.contains(&(s, t.core)),
            (None, Some(s)) => self.core_sub.contains(&(t.core, s)),
            (Some(a), Some(b)) => self.triples.contains(&(a, t.core, b)),
        };
        if !stack_ok {
            return false;
        }
        if let Some(p) = t.prescript {
            if !self.prescripts.contains(&p) || !self.pre_onset.contains(&(p, onset)) {
                return false;
            }
        }
        match (t.coda, t.postscript) {
            (None, None) => {}
            (Some(c), None) => {
                if !self.codas.contains(&c) {
                    return false;
                }
            }
            (Some(c), Some(p)) => {
                if !self.coda_post.contains(&(c, p)) {
                    return false;
                }
            }
            (None, Some(_)) => return false,
        }
        if let Some(p) = t.particle {
            if p.index() >= self.particles.len() {
                return false;
            }
        }
        true
    }
}

/// The eight-slot decomposition of one syllable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SyllableTuple {
    pub prescript: Option<TibetanLetter>,
    pub superscript: Option<TibetanLetter>,
    pub core: TibetanLetter,
    pub subscript: Option<TibetanLetter>,
    pub vowel: TibetanLetter,
    pub coda: Option<TibetanLetter>,
    pub postscript: Option<TibetanLetter>,
    pub particle: Option<Particle>,
}

impl SyllableTuple {
    /// The letters of this syllable in written order, matching what
    /// tokenizing the rendered form yields (a-chen is implicit).
    pub fn letters(&self, tables: &SyllableTables) -> Vec<TibetanLetter> {
        let mut out = Vec::with_capacity(8);
        for slot in [self.prescript, self.superscript] {
            if let Some(l) = slot {
                out.push(l);
            }
        }
        if self.core != TibetanLetter::A_CHEN {
            out.push(self.core);
        }
        if let Some(l) = self.subscript {
            out.push(l);
        }
        out.push(self.vowel);
        for slot in [self.coda, self.postscript] {
            if let Some(l) = slot {
                out.push(l);
            }
        }
        if let Some(p) = self.particle {
            out.extend_from_slice(tables.particle_letters(p));
        }
        out
    }

    /// Number of letters in written form.
    pub fn letter_count(&self, tables: &SyllableTables) -> usize {
        self.letters(tables).len()
    }
}

impl fmt::Display for SyllableTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_syllable(self, SyllableTables::shipped()))
    }
}

/// Assign letters to slots. The separator list comes from tokenization.
pub fn parse_syllable(
    letters: &[TibetanLetter],
    separators: &[usize],
    tables: &SyllableTables,
) -> Result<SyllableTuple> {
    let not_tibetan = || Error::NotTibetan(wylie::render_letters(letters, separators));
    if letters.is_empty() {
        return Err(not_tibetan());
    }
    let has_sep = match separators {
        [] => false,
        [0] => true,
        _ => return Err(not_tibetan()),
    };
    let vowels = letters.iter().filter(|l| l.is_vowel()).count();
    match vowels {
        1 => assign_slots(letters, has_sep, None, tables).ok_or_else(not_tibetan),
        2 => {
            // Exactly one particle can suffix-match: none of the six is a
            // suffix of another.
            for idx in 0..tables.particle_count() {
                let p = Particle(idx as u8);
                let pl = tables.particle_letters(p);
                if letters.len() > pl.len() && letters.ends_with(pl) {
                    let rest = &letters[..letters.len() - pl.len()];
                    return assign_slots(rest, has_sep, Some(p), tables).ok_or_else(not_tibetan);
                }
            }
            Err(not_tibetan())
        }
        _ => Err(not_tibetan()),
    }
}

/// Tokenize and parse a single syllable string.
pub fn parse_str(text: &str, tables: &SyllableTables) -> Result<SyllableTuple> {
    let (letters, seps) = wylie::tokenize_letters(text)?;
    parse_syllable(&letters, &seps, tables)
}

fn assign_slots(
    letters: &[TibetanLetter],
    has_sep: bool,
    particle: Option<Particle>,
    tables: &SyllableTables,
) -> Option<SyllableTuple> {
    let vowel_idx = letters.iter().position(|l| l.is_vowel())?;
    let vowel = letters[vowel_idx];
    let onset = &letters[..vowel_idx];
    let post = &letters[vowel_idx + 1..];
    if post.iter().any(|l| l.is_vowel()) {
        return None;
    }
    let (prescript, superscript, core, subscript) = resolve_onset(onset, has_sep, tables)?;
    let (coda, postscript) = match post {
        [] => (None, None),
        [c] if tables.codas.contains(c) => (Some(*c), None),
        [c, p] if tables.coda_post.contains(&(*c, *p)) => (Some(*c), Some(*p)),
        _ => return None,
    };
    Some(SyllableTuple {
        prescript,
        superscript,
        core,
        subscript,
        vowel,
        coda,
        postscript,
        particle,
    })
}

fn resolve_onset(
    onset: &[TibetanLetter],
    has_sep: bool,
    tables: &SyllableTables,
) -> Option<(
    Option<TibetanLetter>,
    Option<TibetanLetter>,
    TibetanLetter,
    Option<TibetanLetter>,
)> {
    let mut readings = Vec::new();
    if onset.is_empty() {
        if !has_sep {
            readings.push((None, None, TibetanLetter::A_CHEN, None));
        }
    } else {
        // Stacked readings never carry a separator.
        if !has_sep {
            for (sup, core, sub) in tables.stack_candidates(onset) {
                readings.push((None, sup, core, sub));
            }
        }
        // Prescripted readings: first letter is the prescript, the rest is a
        // stack the prescript combines with. A separator is required exactly
        // when the bare pair would also read as a stack, and is only written
        // in that position.
        if onset.len() >= 2 && tables.prescripts.contains(&onset[0]) {
            let pre = onset[0];
            for (sup, core, sub) in tables.stack_candidates(&onset[1..]) {
                if !tables.pre_onset.contains(&(pre, (sup, core, sub))) {
                    continue;
                }
                let gated = onset.len() == 2 && tables.separator_required(pre, core);
                if gated == has_sep {
                    readings.push((Some(pre), sup, core, sub));
                }
            }
        }
    }
    match readings.len() {
        0 => None,
        1 => Some(readings[0]),
        _ => {
            let form: String = onset.iter().map(|l| l.wylie()).collect();
            let preferred = tables.exceptions.get(&form).copied();
            let pick = |kind: OnsetReading| {
                readings.iter().find(|r| match kind {
                    OnsetReading::Stacked => r.0.is_none(),
                    OnsetReading::Prescripted => r.0.is_some(),
                })
            };
            match preferred {
                Some(kind) => pick(kind).or(readings.first()).copied(),
                // Default order: stacked before prescripted.
                None => pick(OnsetReading::Stacked).or(readings.first()).copied(),
            }
        }
    }
}

/// Render a tuple back to its Wylie form. The period is emitted exactly when
/// the prescript would otherwise fuse with the core into a stack (`g.y`).
pub fn render_syllable(t: &SyllableTuple, tables: &SyllableTables) -> String {
    let mut out = String::new();
    if let Some(p) = t.prescript {
        out.push_str(p.wylie());
        if t.superscript.is_none()
            && t.subscript.is_none()
            && tables.separator_required(p, t.core)
        {
            out.push('.');
        }
    }
    if let Some(s) = t.superscript {
        out.push_str(s.wylie());
    }
    if t.core != TibetanLetter::A_CHEN {
        out.push_str(t.core.wylie());
    }
    if let Some(s) = t.subscript {
        out.push_str(s.wylie());
    }
    out.push_str(t.vowel.wylie());
    if let Some(c) = t.coda {
        out.push_str(c.wylie());
    }
    if let Some(p) = t.postscript {
        out.push_str(p.wylie());
    }
    if let Some(p) = t.particle {
        out.push_str(tables.particle_form(p));
    }
    out
}

/// Deterministically enumerate tuples satisfying every table constraint.
/// Used by round-trip and reference tests and by fixture generation.
pub fn enumerate_valid_syllables(tables: &SyllableTables, limit: usize) -> Vec<SyllableTuple> {
    assert!(limit > 0, "limit must be positive");
    let mut onsets: Vec<(
        Option<TibetanLetter>,
        Option<TibetanLetter>,
        TibetanLetter,
        Option<TibetanLetter>,
    )> = Vec::new();
    for idx in 0..30u8 {
        let c = TibetanLetter::consonant(wylie_consonant_form(idx)).unwrap();
        onsets.push((None, None, c, None));
    }
    for (s, c) in &tables.sup_core {
        onsets.push((None, Some(*s), *c, None));
    }
    for (c, s) in &tables.core_sub {
        onsets.push((None, None, *c, Some(*s)));
    }
    for (a, b, c) in &tables.triples {
        onsets.push((None, Some(*a), *b, Some(*c)));
    }
    for (pre, (sup, core, sub)) in &tables.pre_onset {
        onsets.push((Some(*pre), *sup, *core, *sub));
    }

    let vowels: Vec<TibetanLetter> = ["a", "i", "u", "e", "o"]
        .iter()
        .map(|v| TibetanLetter::vowel(v).unwrap())
        .collect();
    let mut finals: Vec<(Option<TibetanLetter>, Option<TibetanLetter>)> = vec![(None, None)];
    finals.extend(tables.codas.iter().map(|c| (Some(*c), None)));
    finals.extend(tables.coda_post.iter().map(|(c, p)| (Some(*c), Some(*p))));
    let mut particles: Vec<Option<Particle>> = vec![None];
    particles.extend((0..tables.particle_count()).map(|i| Some(Particle(i as u8))));

    let mut out = Vec::new();
    'outer: for (prescript, superscript, core, subscript) in onsets {
        for vowel in &vowels {
            for (coda, postscript) in &finals {
                for particle in &particles {
                    out.push(SyllableTuple {
                        prescript,
                        superscript,
                        core,
                        subscript,
                        vowel: *vowel,
                        coda: *coda,
                        postscript: *postscript,
                        particle: *particle,
                    });
                    if out.len() >= limit {
                        break 'outer;
                    }
                }
            }
        }
    }
    out
}

fn wylie_consonant_form(idx: u8) -> &'static str {
    const FORMS: [&str; 30] = [
        "k", "kh", "g", "ng", "c", "ch", "j", "ny", "t", "th", "d", "n", "p", "ph", "b", "m",
        "ts", "tsh", "dz", "w", "zh", "z", "'", "y", "r", "l", "sh", "s", "h", "a",
    ];
    FORMS[idx as usize]
}

pub mod reference {
    //! Brute-force slot assignment, independent of [`super::parse_syllable`].
    //!
    //! Enumerates every split of a letter sequence into particle, onset,
    //! vowel and final slots, and checks each against the tables directly.
    //! Exists purely as a reference point for the test suite: a rendered
    //! valid tuple must admit exactly one assignment.

    use super::*;

    /// All table-valid slot assignments of a letter sequence.
    pub fn enumerate_assignments(
        letters: &[TibetanLetter],
        separators: &[usize],
        tables: &SyllableTables,
    ) -> Vec<SyllableTuple> {
        let has_sep = match separators {
            [] => false,
            [0] => true,
            _ => return Vec::new(),
        };
        let mut found = Vec::new();
        let mut particle_options: Vec<(Option<Particle>, &[TibetanLetter])> =
            vec![(None, letters)];
        for idx in 0..tables.particle_count() {
            let p = Particle(idx as u8);
            let pl = tables.particle_letters(p);
            if letters.len() > pl.len() && letters.ends_with(pl) {
                particle_options.push((Some(p), &letters[..letters.len() - pl.len()]));
            }
        }
        for (particle, rest) in particle_options {
            for vowel_idx in 0..rest.len() {
                if !rest[vowel_idx].is_vowel() {
                    continue;
                }
                let onset = &rest[..vowel_idx];
                let post = &rest[vowel_idx + 1..];
                if onset.iter().any(|l| l.is_vowel()) || post.iter().any(|l| l.is_vowel()) {
                    continue;
                }
                for (prescript, superscript, core, subscript) in
                    onset_assignments(onset, has_sep, tables)
                {
                    for (coda, postscript) in final_assignments(post, tables) {
                        let t = SyllableTuple {
                            prescript,
                            superscript,
                            core,
                            subscript,
                            vowel: rest[vowel_idx],
                            coda,
                            postscript,
                            particle,
                        };
                        if tables.is_valid(&t) && !found.contains(&t) {
                            found.push(t);
                        }
                    }
                }
            }
        }
        found
    }

    #[allow(clippy::type_complexity)]
    fn onset_assignments(
        onset: &[TibetanLetter],
        has_sep: bool,
        tables: &SyllableTables,
    ) -> Vec<(
        Option<TibetanLetter>,
        Option<TibetanLetter>,
        TibetanLetter,
        Option<TibetanLetter>,
    )> {
        let mut out = Vec::new();
        match onset.len() {
            0 => {
                if !has_sep {
                    out.push((None, None, TibetanLetter::A_CHEN, None));
                }
            }
            1 => {
                if !has_sep && onset[0].is_consonant() {
                    out.push((None, None, onset[0], None));
                }
            }
            2 => {
                let (a, b) = (onset[0], onset[1]);
                if !has_sep {
                    if tables.sup_core.contains(&(a, b)) {
                        out.push((None, Some(a), b, None));
                    }
                    if tables.core_sub.contains(&(a, b)) {
                        out.push((None, None, a, Some(b)));
                    }
                }
                let gated = tables.separator_required(a, b);
                if tables.prescripts.contains(&a) && gated == has_sep {
                    out.push((Some(a), None, b, None));
                }
            }
            3 => {
                if !has_sep {
                    let (a, b, c) = (onset[0], onset[1], onset[2]);
                    if tables.triples.contains(&(a, b, c)) {
                        out.push((None, Some(a), b, Some(c)));
                    }
                    if tables.prescripts.contains(&a) {
                        if tables.sup_core.contains(&(b, c)) {
                            out.push((Some(a), Some(b), c, None));
                        }
                        if tables.core_sub.contains(&(b, c)) {
                            out.push((Some(a), None, b, Some(c)));
                        }
                    }
                }
            }
            4 => {
                if !has_sep {
                    let (a, b, c, d) = (onset[0], onset[1], onset[2], onset[3]);
                    if tables.prescripts.contains(&a) && tables.triples.contains(&(b, c, d)) {
                        out.push((Some(a), Some(b), c, Some(d)));
                    }
                }
            }
            _ => {}
        }
        out
    }

    fn final_assignments(
        post: &[TibetanLetter],
        tables: &SyllableTables,
    ) -> Vec<(Option<TibetanLetter>, Option<TibetanLetter>)> {
        match post.len() {
            0 => vec![(None, None)],
            1 if tables.codas.contains(&post[0]) => vec![(Some(post[0]), None)],
            2 if tables.coda_post.contains(&(post[0], post[1])) => {
                vec![(Some(post[0]), Some(post[1]))]
            }
            _ => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tables() -> &'static SyllableTables {
        SyllableTables::shipped()
    }

    fn c(s: &str) -> TibetanLetter {
        TibetanLetter::consonant(s).unwrap()
    }
    fn v(s: &str) -> TibetanLetter {
        TibetanLetter::vowel(s).unwrap()
    }

    fn parse(s: &str) -> SyllableTuple {
        parse_str(s, tables()).unwrap_or_else(|e| panic!("parse {s}: {e}"))
    }

    #[test]
    fn bsgrubs_fills_seven_slots() {
        // Reference check: the brute-force assignment of bsgrubs is unique
        // and matches the parser.
        let (letters, seps) = wylie::tokenize_letters("bsgrubs").unwrap();
        let assignments = reference::enumerate_assignments(&letters, &seps, tables());
        assert_eq!(assignments.len(), 1, "bsgrubs assignments: {assignments:?}");
        let t = parse("bsgrubs");
        assert_eq!(assignments[0], t);
        assert_eq!(t.prescript, Some(c("b")));
        assert_eq!(t.superscript, Some(c("s")));
        assert_eq!(t.core, c("g"));
        assert_eq!(t.subscript, Some(c("r")));
        assert_eq!(t.vowel, v("u"));
        assert_eq!(t.coda, Some(c("b")));
        assert_eq!(t.postscript, Some(c("s")));
        assert_eq!(t.particle, None);
    }

    #[test]
    fn grub_is_core_plus_subscript() {
        let (letters, seps) = wylie::tokenize_letters("grub").unwrap();
        let assignments = reference::enumerate_assignments(&letters, &seps, tables());
        assert_eq!(assignments.len(), 1);
        let t = parse("grub");
        assert_eq!(assignments[0], t);
        assert_eq!(
            (t.prescript, t.superscript, t.core, t.subscript),
            (None, None, c("g"), Some(c("r")))
        );
        assert_eq!((t.vowel, t.coda), (v("u"), Some(c("b"))));
    }

    #[test]
    fn particle_is_stripped_with_two_vowels_total() {
        let (letters, seps) = wylie::tokenize_letters("po'i").unwrap();
        let assignments = reference::enumerate_assignments(&letters, &seps, tables());
        assert_eq!(assignments.len(), 1);
        let t = parse("po'i");
        assert_eq!(assignments[0], t);
        assert_eq!(t.core, c("p"));
        assert_eq!(t.vowel, v("o"));
        assert_eq!(t.particle.map(|p| tables().particle_form(p)), Some("'i"));
        let total_vowels = 1 + 1; // base vowel + particle vowel
        assert!(total_vowels <= 2);
    }

    #[test]
    fn particle_stripping_preserves_base_parse() {
        for (base, with) in [("pa", "pa'am"), ("dge", "dge'o"), ("mi", "mi'i")] {
            let tb = parse(base);
            let tw = parse(with);
            assert_eq!(
                SyllableTuple {
                    particle: None,
                    ..tw
                },
                tb,
                "{with} should parse as {base} plus a particle"
            );
            assert!(tw.particle.is_some());
        }
    }

    #[test]
    fn separator_forces_prescript_reading() {
        let with_sep = parse("g.yang");
        assert_eq!(with_sep.prescript, Some(c("g")));
        assert_eq!(with_sep.core, c("y"));
        let without = parse("gyang");
        assert_eq!(without.prescript, None);
        assert_eq!(without.core, c("g"));
        assert_eq!(without.subscript, Some(c("y")));
    }

    #[test]
    fn bare_vowel_gets_achen_core() {
        let t = parse("a");
        assert_eq!(t.core, TibetanLetter::A_CHEN);
        assert_eq!(t.vowel, v("a"));
        let t = parse("ang");
        assert_eq!(t.core, TibetanLetter::A_CHEN);
        assert_eq!(t.coda, Some(c("ng")));
        let t = parse("o");
        assert_eq!(t.vowel, v("o"));
    }

    #[test]
    fn foreign_sequences_are_rejected() {
        for s in ["badzra", "sarba", "rnXam"] {
            assert!(
                parse_str(s, tables()).is_err(),
                "{s} should not parse as Tibetan"
            );
        }
    }

    #[test]
    fn render_examples() {
        let sogs = SyllableTuple {
            prescript: None,
            superscript: None,
            core: c("s"),
            subscript: None,
            vowel: v("o"),
            coda: Some(c("g")),
            postscript: Some(c("s")),
            particle: None,
        };
        assert_eq!(render_syllable(&sogs, tables()), "sogs");
        let gyang = SyllableTuple {
            prescript: Some(c("g")),
            superscript: None,
            core: c("y"),
            subscript: None,
            vowel: v("a"),
            coda: Some(c("ng")),
            postscript: None,
            particle: None,
        };
        assert_eq!(render_syllable(&gyang, tables()), "g.yang");
        assert_eq!(render_syllable(&parse("grub"), tables()), "grub");
    }

    #[test]
    fn enumerate_respects_limit_and_validity() {
        let some = enumerate_valid_syllables(tables(), 1);
        assert_eq!(some.len(), 1);
        let many = enumerate_valid_syllables(tables(), 500);
        assert_eq!(many.len(), 500);
        for t in &many {
            assert!(tables().is_valid(t), "invalid tuple {t:?}");
        }
    }

    #[test]
    fn enumerated_strings_reparse_to_same_tuple() {
        let all = enumerate_valid_syllables(tables(), usize::MAX);
        assert!(all.len() > 10_000, "universe size {}", all.len());
        // Stride so every region of the enumeration is touched.
        for t in all.iter().step_by(101) {
            let s = render_syllable(t, tables());
            let back = parse_str(&s, tables())
                .unwrap_or_else(|e| panic!("reparse of {s} ({t:?}): {e}"));
            assert_eq!(&back, t, "round trip of {s}");
        }
    }

    #[test]
    fn exception_list_overrides_default_reading() {
        // Amend the tables so an onset is valid both ways, then pin its
        // reading through the exception section.
        let mut text = String::from(SHIPPED);
        text.push_str("\npre-onset g l\n");
        let amended = SyllableTables::parse(&text).unwrap();
        // Without a separator the stacked reading wins by default. The
        // prescripted reading of g+l needs a separator (gl is a stack).
        let t = parse_str("glang", &amended).unwrap();
        assert_eq!(t.prescript, None);
        let t = parse_str("g.lang", &amended).unwrap();
        assert_eq!(t.prescript, Some(c("g")));

        // A genuinely two-way onset: make the pair readable both ways
        // without a separator by adding an exception.
        let mut text2 = String::from(SHIPPED);
        text2.push_str("\npre-onset m n\nexception-onset mn prescript\n");
        let amended2 = SyllableTables::parse(&text2).unwrap();
        let t = parse_str("mna", &amended2).unwrap();
        assert_eq!(t.prescript, Some(c("m")));
        assert_eq!(t.core, c("n"));
    }

    #[test]
    fn wrong_particle_count_is_rejected() {
        let text = SHIPPED.replace("particle 'is", "# particle 'is");
        assert!(matches!(
            SyllableTables::parse(&text),
            Err(Error::InvalidTable(_))
        ));
    }
}
