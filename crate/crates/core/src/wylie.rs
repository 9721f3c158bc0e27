//! Wylie letter tokenization and unit splitting.
//!
//! Wylie transliteration writes each Tibetan letter as one to three Latin
//! characters (`tsh`, `zh`, `ng`, ...). Letter recognition is unambiguous by
//! construction of the scheme: scanning with maximal munch (longest form
//! first) can never split a digraph or trigraph that is lexically present.
//!
//! A period is the conventional disambiguator between a prescript and a core
//! letter (`g.yang` vs `gyang`); it is consumed and recorded, not emitted as
//! a letter. Spaces are syllable delimiters (tsheg) and `/` is the clause
//! delimiter (shad).

use crate::error::{Error, Result};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

/// Number of consonant entries in the inventory.
const CONSONANT_COUNT: u8 = 30;

/// The fixed letter inventory: 30 consonants followed by the 5 vowels.
/// The consonant `a` (a-chen) and the vowel `a` share a written form; the
/// tokenizer always emits the vowel, and the syllable parser introduces
/// a-chen as the core of vowel-initial syllables.
static INVENTORY: [&str; 35] = [
    "k", "kh", "g", "ng", "c", "ch", "j", "ny", "t", "th", "d", "n", "p", "ph", "b", "m", "ts",
    "tsh", "dz", "w", "zh", "z", "'", "y", "r", "l", "sh", "s", "h", "a", // a-chen
    "a", "i", "u", "e", "o",
];

/// One Tibetan letter, identified by its index in the fixed inventory.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TibetanLetter(u8);

impl TibetanLetter {
    /// The a-chen letter (the consonant written `a`).
    pub const A_CHEN: TibetanLetter = TibetanLetter(29);
    /// The a-chung letter (written `'`).
    pub const A_CHUNG: TibetanLetter = TibetanLetter(22);

    /// Look up a consonant by its Wylie form. `"a"` resolves to a-chen.
    pub fn consonant(form: &str) -> Option<TibetanLetter> {
        INVENTORY[..CONSONANT_COUNT as usize]
            .iter()
            .position(|f| *f == form)
            .map(|i| TibetanLetter(i as u8))
    }

    /// Look up a vowel by its Wylie form.
    pub fn vowel(form: &str) -> Option<TibetanLetter> {
        INVENTORY[CONSONANT_COUNT as usize..]
            .iter()
            .position(|f| *f == form)
            .map(|i| TibetanLetter(CONSONANT_COUNT + i as u8))
    }

    pub fn wylie(&self) -> &'static str {
        INVENTORY[self.0 as usize]
    }

    pub fn is_vowel(&self) -> bool {
        self.0 >= CONSONANT_COUNT
    }

    pub fn is_consonant(&self) -> bool {
        self.0 < CONSONANT_COUNT
    }
}

impl fmt::Debug for TibetanLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Self::A_CHEN {
            write!(f, "A(chen)")
        } else if self.is_vowel() {
            write!(f, "V({})", self.wylie())
        } else {
            write!(f, "C({})", self.wylie())
        }
    }
}

impl fmt::Display for TibetanLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.wylie())
    }
}

impl Serialize for TibetanLetter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        // Tag the two letters written "a" apart so round-trips are exact.
        if *self == Self::A_CHEN {
            s.serialize_str("A")
        } else {
            s.serialize_str(self.wylie())
        }
    }
}

impl<'de> Deserialize<'de> for TibetanLetter {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let form = String::deserialize(d)?;
        if form == "A" {
            return Ok(Self::A_CHEN);
        }
        TibetanLetter::vowel(&form)
            .or_else(|| TibetanLetter::consonant(&form))
            .ok_or_else(|| de::Error::custom(format!("unknown letter form {form:?}")))
    }
}

/// Byte range into the source text a unit was read from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub len: usize,
}

/// A tokenized syllable: its letters, any recorded prescript separators
/// (letter index after which a `.` appeared in the source), and provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawSyllable {
    pub letters: Vec<TibetanLetter>,
    pub separators: Vec<usize>,
    pub span: Span,
}

impl RawSyllable {
    /// Reproduce the exact source substring.
    pub fn render(&self) -> String {
        render_letters(&self.letters, &self.separators)
    }
}

/// Scan a single syllable into letters with maximal munch.
///
/// Returns the letters and the recorded separator positions (index of the
/// letter after which a period appeared). Fails with the byte position of the
/// first character that matches no inventory prefix, which callers use to
/// mark the whole syllable as foreign.
pub fn tokenize_letters(syllable_text: &str) -> Result<(Vec<TibetanLetter>, Vec<usize>)> {
    let bytes = syllable_text.as_bytes();
    let mut letters = Vec::new();
    let mut separators = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        if bytes[pos] == b'.' {
            if letters.is_empty() {
                return Err(Error::UnknownCharacter(pos));
            }
            separators.push(letters.len() - 1);
            pos += 1;
            continue;
        }
        // Longest form first: 3-char, then 2-char, then 1-char.
        let mut matched = None;
        for len in (1..=3.min(bytes.len() - pos)).rev() {
            if !syllable_text.is_char_boundary(pos + len) {
                continue;
            }
            let cand = &syllable_text[pos..pos + len];
            if let Some(letter) = lookup_form(cand) {
                matched = Some((letter, len));
                break;
            }
        }
        match matched {
            Some((letter, len)) => {
                letters.push(letter);
                pos += len;
            }
            None => return Err(Error::UnknownCharacter(pos)),
        }
    }
    if letters.is_empty() {
        return Err(Error::UnknownCharacter(0));
    }
    Ok((letters, separators))
}

/// Inverse of [`tokenize_letters`]: concatenate forms, reinserting periods.
pub fn render_letters(letters: &[TibetanLetter], separators: &[usize]) -> String {
    let mut out = String::new();
    for (i, letter) in letters.iter().enumerate() {
        // A-chen is implicit in Wylie: its syllables are written vowel-first.
        if *letter != TibetanLetter::A_CHEN {
            out.push_str(letter.wylie());
        }
        if separators.contains(&i) {
            out.push('.');
        }
    }
    out
}

fn lookup_form(cand: &str) -> Option<TibetanLetter> {
    // Vowels win for the shared form "a"; the parser reintroduces a-chen.
    TibetanLetter::vowel(cand).or_else(|| TibetanLetter::consonant(cand))
}

/// A whitespace-delimited unit of text, before letter tokenization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyllableUnit {
    pub text: String,
    pub span: Span,
}

/// Split cleaned text into syllable units and sentence boundaries.
///
/// Syllables are maximal runs between whitespace. Every run of `/` (shad)
/// records one sentence boundary; the boundary value is the number of
/// syllables seen so far, i.e. the boundary precedes that syllable index.
pub fn split_units(text: &str) -> (Vec<SyllableUnit>, Vec<usize>) {
    let mut units = Vec::new();
    let mut boundaries: Vec<usize> = Vec::new();
    let mut current_start: Option<usize> = None;
    let mut in_shad = false;

    let flush = |start: Option<usize>, end: usize, units: &mut Vec<SyllableUnit>, text: &str| {
        if let Some(s) = start {
            units.push(SyllableUnit {
                text: text[s..end].to_string(),
                span: Span {
                    start: s,
                    len: end - s,
                },
            });
        }
    };

    for (i, ch) in text.char_indices() {
        if ch.is_whitespace() {
            flush(current_start.take(), i, &mut units, text);
            in_shad = false;
        } else if ch == '/' {
            flush(current_start.take(), i, &mut units, text);
            if !in_shad {
                let b = units.len();
                if boundaries.last() != Some(&b) {
                    boundaries.push(b);
                }
                in_shad = true;
            }
        } else {
            if current_start.is_none() {
                current_start = Some(i);
            }
            in_shad = false;
        }
    }
    flush(current_start.take(), text.len(), &mut units, text);
    (units, boundaries)
}

/// Tokenize one unit into a [`RawSyllable`] with provenance.
pub fn tokenize_unit(unit: &SyllableUnit) -> Result<RawSyllable> {
    let (letters, separators) = tokenize_letters(&unit.text)?;
    Ok(RawSyllable {
        letters,
        separators,
        span: unit.span,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> TibetanLetter {
        TibetanLetter::consonant(s).unwrap()
    }
    fn v(s: &str) -> TibetanLetter {
        TibetanLetter::vowel(s).unwrap()
    }

    #[test]
    fn tshig_is_three_letters() {
        let (letters, seps) = tokenize_letters("tshig").unwrap();
        assert_eq!(letters, vec![c("tsh"), v("i"), c("g")]);
        assert!(seps.is_empty());
    }

    #[test]
    fn gzhan_uses_digraph_zh() {
        let (letters, _) = tokenize_letters("gzhan").unwrap();
        assert_eq!(letters, vec![c("g"), c("zh"), v("a"), c("n")]);
    }

    #[test]
    fn period_is_recorded_not_emitted() {
        let (letters, seps) = tokenize_letters("g.yang").unwrap();
        assert_eq!(letters, vec![c("g"), c("y"), v("a"), c("ng")]);
        assert_eq!(seps, vec![0]);
        // Without the period the letters are identical but no separator is kept.
        let (letters2, seps2) = tokenize_letters("gyang").unwrap();
        assert_eq!(letters, letters2);
        assert!(seps2.is_empty());
    }

    #[test]
    fn unknown_character_reports_position() {
        match tokenize_letters("sgXub") {
            Err(Error::UnknownCharacter(p)) => assert_eq!(p, 2),
            other => panic!("expected UnknownCharacter, got {other:?}"),
        }
    }

    #[test]
    fn leading_period_rejected() {
        assert!(tokenize_letters(".ya").is_err());
    }

    #[test]
    fn round_trip_tokenize_render() {
        for s in ["tshig", "gzhan", "g.yang", "sogs", "bsgrubs", "po'i", "dge"] {
            let (letters, seps) = tokenize_letters(s).unwrap();
            assert_eq!(render_letters(&letters, &seps), s, "round trip of {s}");
        }
    }

    #[test]
    fn maximal_munch_never_splits_digraphs() {
        // tsh over ts over t, and the rest of the multi-char forms.
        let (letters, _) = tokenize_letters("tsha").unwrap();
        assert_eq!(letters[0], c("tsh"));
        let (letters, _) = tokenize_letters("tsa").unwrap();
        assert_eq!(letters[0], c("ts"));
        for form in ["kh", "ng", "ch", "ny", "th", "ph", "dz", "zh", "sh"] {
            let s = format!("{form}a");
            let (letters, _) = tokenize_letters(&s).unwrap();
            assert_eq!(letters[0], c(form), "munch of {s}");
        }
    }

    #[test]
    fn split_units_counts_and_boundaries() {
        let (units, bounds) = split_units("bsgrubs pa /");
        assert_eq!(units.len(), 2);
        assert_eq!(bounds, vec![2]);

        let (units, bounds) = split_units("");
        assert!(units.is_empty());
        assert!(bounds.is_empty());

        let (units, bounds) = split_units("dge slong // dge 'dun");
        assert_eq!(units.len(), 4);
        assert_eq!(bounds, vec![2]);
    }

    #[test]
    fn split_units_spans_reproduce_source() {
        let text = "dge  slong / g.yang";
        let (units, _) = split_units(text);
        for u in &units {
            assert_eq!(&text[u.span.start..u.span.start + u.span.len], u.text);
        }
    }

    #[test]
    fn shad_attached_to_syllable_still_splits() {
        let (units, bounds) = split_units("na/ dper");
        assert_eq!(units.len(), 2);
        assert_eq!(units[0].text, "na");
        assert_eq!(bounds, vec![1]);
    }
}
