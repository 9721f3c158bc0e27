//! Stylometric features and perceptron classification.
//!
//! The style feature set follows the usual translation-versus-original
//! markers: mean syllable length in letters, mean sentence length in
//! syllables, relative frequency of verbal prefixes and of function words
//! (both lexicon files), frequency of foreign syllables, and type-to-token
//! ratio over normalized stems. For authorship work, n-gram and
//! bag-of-words features over segmented words (or stems when no segmenter
//! is given) are available on top.

use crate::align::{Document, MatchKey};
use crate::error::{Error, Result};
use crate::model::{self, LinearModel, TrainMeta};
use crate::segment::{segment, SegmenterModel};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

/// Sparse feature vector with namespaced ids (`style:`, `ngram:`, `bow:`).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector(pub BTreeMap<String, f64>);

impl FeatureVector {
    pub fn insert(&mut self, id: &str, value: f64) {
        debug_assert!(value.is_finite());
        self.0.insert(id.to_string(), value);
    }

    pub fn get(&self, id: &str) -> f64 {
        self.0.get(id).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn merge(&mut self, other: FeatureVector) {
        self.0.extend(other.0);
    }
}

/// A line-oriented word list.
#[derive(Clone, Debug, Default)]
pub struct WordList {
    forms: BTreeSet<String>,
}

impl WordList {
    pub fn parse(text: &str) -> WordList {
        WordList {
            forms: text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_string)
                .collect(),
        }
    }

    pub fn from_path(path: &Path) -> Result<WordList> {
        Ok(WordList::parse(&std::fs::read_to_string(path)?))
    }

    pub fn contains(&self, form: &str) -> bool {
        self.forms.contains(form)
    }
}

static FUNCTION_WORDS: OnceLock<WordList> = OnceLock::new();
static VERBAL_PREFIXES: OnceLock<WordList> = OnceLock::new();

/// Lexicons consumed by [`extract_style_features`].
#[derive(Clone, Copy, Debug)]
pub struct StyleLexicons<'a> {
    pub function_words: &'a WordList,
    pub verbal_prefixes: &'a WordList,
}

impl StyleLexicons<'static> {
    pub fn shipped() -> StyleLexicons<'static> {
        StyleLexicons {
            function_words: FUNCTION_WORDS
                .get_or_init(|| WordList::parse(include_str!("../data/function_words.txt"))),
            verbal_prefixes: VERBAL_PREFIXES
                .get_or_init(|| WordList::parse(include_str!("../data/verbal_prefixes.txt"))),
        }
    }
}

/// The five style features, namespaced `style:`.
pub fn extract_style_features(doc: &Document, lexicons: &StyleLexicons) -> Result<FeatureVector> {
    if doc.is_empty() {
        return Err(Error::EmptyDocument(doc.id.clone()));
    }
    let n = doc.len() as f64;
    let mut fv = FeatureVector::default();

    let total_letters: u64 = doc.tokens.iter().map(|t| t.letter_count as u64).sum();
    fv.insert("style:mean_syllable_len", total_letters as f64 / n);

    // Sentences are shad-delimited runs; without any shad the document is
    // one sentence. Empty runs (leading shad, doubled markers) are skipped.
    let mut sentence_lens = Vec::new();
    let mut prev = 0usize;
    for &b in &doc.sentence_breaks {
        if b > prev {
            sentence_lens.push(b - prev);
        }
        prev = b;
    }
    if doc.len() > prev {
        sentence_lens.push(doc.len() - prev);
    }
    let mean_sentence = if sentence_lens.is_empty() {
        n
    } else {
        sentence_lens.iter().sum::<usize>() as f64 / sentence_lens.len() as f64
    };
    fv.insert("style:mean_sentence_len", mean_sentence);

    let count_in = |list: &WordList| {
        doc.tokens.iter().filter(|t| list.contains(&t.text)).count() as f64
    };
    fv.insert(
        "style:verbal_prefix_freq",
        count_in(lexicons.verbal_prefixes) / n,
    );
    fv.insert(
        "style:function_word_freq",
        count_in(lexicons.function_words) / n,
    );

    let foreign = doc.tokens.iter().filter(|t| t.tuple.is_none()).count() as f64;
    fv.insert("style:foreign_freq", foreign / n);

    let types: BTreeSet<String> = doc
        .keys
        .iter()
        .map(|k| match k {
            MatchKey::Stem(s) => format!("s:{s}"),
            MatchKey::Foreign(t) => format!("f:{t}"),
        })
        .collect();
    fv.insert("style:type_token_ratio", types.len() as f64 / n);
    Ok(fv)
}

/// N-gram relative frequencies over segmented words, or over stems when no
/// segmenter is supplied. Unigrams are namespaced `bow:`, longer n-grams
/// `ngram:<n>:`.
pub fn extract_ngram_features(
    doc: &Document,
    n_range: std::ops::RangeInclusive<usize>,
    segmenter: Option<&SegmenterModel>,
) -> Result<FeatureVector> {
    let units: Vec<String> = match segmenter {
        Some(model) => {
            let seg = segment(model, &doc.tokens)?;
            seg.words()
                .into_iter()
                .map(|(s, e)| {
                    doc.tokens[s..=e]
                        .iter()
                        .map(|t| t.text.as_str())
                        .collect::<Vec<_>>()
                        .join("+")
                })
                .collect()
        }
        None => doc
            .keys
            .iter()
            .map(|k| match k {
                MatchKey::Stem(s) => s.to_string(),
                MatchKey::Foreign(t) => t.to_string(),
            })
            .collect(),
    };
    let mut fv = FeatureVector::default();
    for n in n_range {
        if n == 0 || units.len() < n {
            continue;
        }
        let total = (units.len() - n + 1) as f64;
        let mut counts: BTreeMap<String, usize> = BTreeMap::new();
        for window in units.windows(n) {
            let key = if n == 1 {
                format!("bow:{}", window[0])
            } else {
                format!("ngram:{n}:{}", window.join(" "))
            };
            *counts.entry(key).or_insert(0) += 1;
        }
        for (key, c) in counts {
            fv.insert(&key, c as f64 / total);
        }
    }
    Ok(fv)
}

/// Perceptron training with per-epoch seeded shuffling. Updates happen on
/// misclassification only; the first label is the positive class.
pub fn train_perceptron(
    examples: &[(FeatureVector, String)],
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<LinearModel> {
    let mut labels: Vec<&str> = Vec::new();
    for (_, l) in examples {
        if !labels.contains(&l.as_str()) {
            labels.push(l);
        }
    }
    if labels.len() != 2 {
        return Err(Error::DegenerateData(format!(
            "need exactly two labels, found {}",
            labels.len()
        )));
    }
    labels.sort();
    let (pos, neg) = (labels[0].to_string(), labels[1].to_string());

    let mut model = LinearModel::new(
        &pos,
        &neg,
        TrainMeta {
            epochs,
            learning_rate,
            seed,
        },
    );
    let mut order: Vec<usize> = (0..examples.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (fv, label) = &examples[i];
            let score = model.score(fv.iter());
            let predicted = model.label_for(score);
            if predicted != label {
                let delta = if *label == pos {
                    learning_rate
                } else {
                    -learning_rate
                };
                for (f, v) in fv.iter() {
                    *model.weights.entry(f.to_string()).or_insert(0.0) += delta * v;
                }
                model.bias += delta;
            }
        }
    }
    Ok(model)
}

/// Label and signed margin for a feature vector.
pub fn predict(model: &LinearModel, fv: &FeatureVector) -> (String, f64) {
    let score = model.score(fv.iter());
    (model.label_for(score).to_string(), score)
}

/// Confusion-matrix metrics.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalMetrics {
    pub accuracy: f64,
    pub total: usize,
    pub correct: usize,
    /// label -> (precision, recall, support)
    pub per_label: BTreeMap<String, (f64, f64, usize)>,
}

pub fn evaluate(model: &LinearModel, test: &[(FeatureVector, String)]) -> Result<EvalMetrics> {
    if test.is_empty() {
        return Err(Error::EmptyTestSet);
    }
    let mut correct = 0usize;
    let mut gold_count: BTreeMap<&str, usize> = BTreeMap::new();
    let mut pred_count: BTreeMap<&str, usize> = BTreeMap::new();
    let mut hit_count: BTreeMap<&str, usize> = BTreeMap::new();
    let mut predictions = Vec::with_capacity(test.len());
    for (fv, label) in test {
        let (pred, _) = predict(model, fv);
        *gold_count.entry(label.as_str()).or_insert(0) += 1;
        if pred == *label {
            correct += 1;
            *hit_count.entry(label.as_str()).or_insert(0) += 1;
        }
        predictions.push(pred);
    }
    for p in &predictions {
        *pred_count.entry(p.as_str()).or_insert(0) += 1;
    }
    let mut per_label = BTreeMap::new();
    for (label, &support) in &gold_count {
        let hits = hit_count.get(label).copied().unwrap_or(0);
        let predicted = pred_count.get(label).copied().unwrap_or(0);
        let precision = if predicted == 0 {
            1.0
        } else {
            hits as f64 / predicted as f64
        };
        let recall = hits as f64 / support as f64;
        per_label.insert(label.to_string(), (precision, recall, support));
    }
    Ok(EvalMetrics {
        accuracy: correct as f64 / test.len() as f64,
        total: test.len(),
        correct,
        per_label,
    })
}

pub fn save_stylo_model(path: &Path, model: &LinearModel) -> Result<()> {
    model::save_model(path, "stylo", model)
}

pub fn load_stylo_model(path: &Path) -> Result<LinearModel> {
    model::load_model(path, "stylo")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stem::NormRuleSet;
    use crate::syllable::SyllableTables;

    fn doc(text: &str) -> Document {
        Document::from_text("t", text, SyllableTables::shipped(), NormRuleSet::shipped())
    }

    #[test]
    fn type_token_ratio_counts_distinct_stems() {
        let d = doc("ka ka kha");
        let fv = extract_style_features(&d, &StyleLexicons::shipped()).unwrap();
        assert!((fv.get("style:type_token_ratio") - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(fv.get("style:foreign_freq"), 0.0);
    }

    #[test]
    fn hand_computed_two_sentence_document() {
        // Eight syllables in two shad-delimited sentences of 5 and 3.
        let d = doc("dge slong gi chos mthong / nga yod do /");
        let lex = StyleLexicons::shipped();
        let fv = extract_style_features(&d, &lex).unwrap();
        // Letters: dge 3, slong 4, gi 2, chos 3, mthong 4, nga 2, yod 3, do 2 = 23.
        assert!((fv.get("style:mean_syllable_len") - 23.0 / 8.0).abs() < 1e-12);
        assert!((fv.get("style:mean_sentence_len") - 4.0).abs() < 1e-12);
        // Function words present: gi, yi? no; gi only. do/ni? do is not listed.
        assert!((fv.get("style:function_word_freq") - 1.0 / 8.0).abs() < 1e-12);
        // Verbal prefixes: yod.
        assert!((fv.get("style:verbal_prefix_freq") - 1.0 / 8.0).abs() < 1e-12);
        // All parse; TTR = 8 distinct stems / 8.
        assert_eq!(fv.get("style:foreign_freq"), 0.0);
        assert!((fv.get("style:type_token_ratio") - 1.0).abs() < 1e-12);
    }

    #[test]
    fn frequencies_stay_proper() {
        let d = doc("gi kyi badzra dge dge /");
        let fv = extract_style_features(&d, &StyleLexicons::shipped()).unwrap();
        for (k, v) in fv.iter() {
            if k != "style:mean_syllable_len" && k != "style:mean_sentence_len" {
                assert!((0.0..=1.0).contains(&v), "{k}={v}");
            }
        }
    }

    #[test]
    fn empty_document_is_an_error() {
        let d = doc("");
        assert!(matches!(
            extract_style_features(&d, &StyleLexicons::shipped()),
            Err(Error::EmptyDocument(_))
        ));
    }

    #[test]
    fn unigram_frequencies() {
        let d = doc("ka ka kha");
        let fv = extract_ngram_features(&d, 1..=1, None).unwrap();
        assert!((fv.get("bow:(k,a)") - 2.0 / 3.0).abs() < 1e-12);
        assert!((fv.get("bow:(kh,a)") - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn bigram_hand_counts() {
        let d = doc("ka kha ka kha");
        let fv = extract_ngram_features(&d, 2..=2, None).unwrap();
        assert!((fv.get("ngram:2:(k,a) (kh,a)") - 2.0 / 3.0).abs() < 1e-12);
        assert!((fv.get("ngram:2:(kh,a) (k,a)") - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn empty_doc_gives_empty_ngrams() {
        let d = doc("");
        let fv = extract_ngram_features(&d, 1..=3, None).unwrap();
        assert!(fv.0.is_empty());
    }

    #[test]
    fn perceptron_separates_a_toy_set() {
        let mut pos = FeatureVector::default();
        pos.insert("x", 1.0);
        let mut neg = FeatureVector::default();
        neg.insert("y", 1.0);
        let examples = vec![
            (pos.clone(), "p".to_string()),
            (neg.clone(), "q".to_string()),
            (pos, "p".to_string()),
            (neg, "q".to_string()),
        ];
        let model = train_perceptron(&examples, 50, 1.0, 7).unwrap();
        for (fv, label) in &examples {
            assert_eq!(&predict(&model, fv).0, label);
        }
    }

    #[test]
    fn degenerate_labels_rejected() {
        let fv = FeatureVector::default();
        let examples = vec![(fv.clone(), "p".into()), (fv, "p".into())];
        assert!(matches!(
            train_perceptron(&examples, 1, 1.0, 0),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn zero_vector_gets_first_label_with_zero_margin() {
        let model = LinearModel::new(
            "a",
            "b",
            TrainMeta {
                epochs: 0,
                learning_rate: 1.0,
                seed: 0,
            },
        );
        let (label, margin) = predict(&model, &FeatureVector::default());
        assert_eq!(label, "a");
        assert_eq!(margin, 0.0);
    }

    #[test]
    fn scaling_weights_preserves_decisions() {
        let mut fv1 = FeatureVector::default();
        fv1.insert("x", 1.0);
        fv1.insert("z", 0.5);
        let mut fv2 = FeatureVector::default();
        fv2.insert("y", 2.0);
        let examples = vec![(fv1, "p".to_string()), (fv2, "q".to_string())];
        let model = train_perceptron(&examples, 20, 1.0, 3).unwrap();
        let mut scaled = model.clone();
        for w in scaled.weights.values_mut() {
            *w *= 10.0;
        }
        scaled.bias *= 10.0;
        for (fv, _) in &examples {
            assert_eq!(predict(&model, fv).0, predict(&scaled, fv).0);
        }
    }

    #[test]
    fn evaluate_counts_and_conventions() {
        let mut x = FeatureVector::default();
        x.insert("x", 1.0);
        let mut y = FeatureVector::default();
        y.insert("y", 1.0);
        let train = vec![(x.clone(), "p".to_string()), (y.clone(), "q".to_string())];
        let model = train_perceptron(&train, 30, 1.0, 1).unwrap();
        let test = vec![
            (x.clone(), "p".to_string()),
            (x.clone(), "p".to_string()),
            (y.clone(), "q".to_string()),
            (x, "q".to_string()), // will be predicted p: one error
        ];
        let m = evaluate(&model, &test).unwrap();
        assert_eq!(m.total, 4);
        assert_eq!(m.correct, 3);
        assert!((m.accuracy - 0.75).abs() < 1e-12);
        assert!(matches!(evaluate(&model, &[]), Err(Error::EmptyTestSet)));
    }
}
