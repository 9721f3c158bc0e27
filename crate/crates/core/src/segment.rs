//! Word segmentation as per-syllable boundary tagging.
//!
//! Tibetan writes no word boundaries; the segmenter decides, for each
//! syllable, whether it begins a word (BEGIN) or continues one (INSIDE).
//! Features come from the slot values of the surrounding syllables; the
//! tagger is an averaged perceptron behind a small model interface, so a
//! different sequence model can be slotted in without touching callers.

use crate::align::Token;
use crate::error::{Error, Result};
use crate::model::{self, LinearModel, TrainMeta};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::Path;

/// Identifier of the feature template implemented by [`featurize`].
/// Bump when the feature set changes; models carry the id they were
/// trained with.
pub const TEMPLATE: &str = "seg-v1";

const LABEL_BEGIN: &str = "B";
const LABEL_INSIDE: &str = "I";

/// Per-syllable boundary tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryTag {
    Begin,
    Inside,
}

/// One tag per syllable; the first tag of a document is always BEGIN.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub tags: Vec<BoundaryTag>,
}

impl Segmentation {
    /// Word spans (start, inclusive end) induced by the tags.
    pub fn words(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut start = 0;
        for (i, tag) in self.tags.iter().enumerate() {
            if i > 0 && *tag == BoundaryTag::Begin {
                out.push((start, i - 1));
                start = i;
            }
        }
        if !self.tags.is_empty() {
            out.push((start, self.tags.len() - 1));
        }
        out
    }
}

/// Trained segmenter: linear weights plus the template they assume.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmenterModel {
    pub template: String,
    pub linear: LinearModel,
}

impl SegmenterModel {
    pub fn save(&self, path: &Path) -> Result<()> {
        model::save_model(path, "segmenter", self)
    }

    pub fn load(path: &Path) -> Result<SegmenterModel> {
        model::load_model(path, "segmenter")
    }
}

/// Sparse binary features for position `i`: slot values at offsets -2..=2
/// with boundary padding, neighbor stem identity, particle and foreign
/// flags.
pub fn featurize(tokens: &[Token], i: usize) -> Vec<String> {
    assert!(i < tokens.len());
    let mut feats = Vec::with_capacity(32);
    for off in -2i64..=2 {
        let idx = i as i64 + off;
        if idx < 0 || idx as usize >= tokens.len() {
            feats.push(format!("pad[{off}]"));
            continue;
        }
        let tok = &tokens[idx as usize];
        match &tok.tuple {
            None => feats.push(format!("foreign[{off}]")),
            Some(t) => {
                let stack: String = [t.superscript, Some(t.core), t.subscript]
                    .iter()
                    .flatten()
                    .map(|l| l.wylie())
                    .collect();
                feats.push(format!("stack[{off}]={stack}"));
                feats.push(format!("vowel[{off}]={}", t.vowel.wylie()));
                if let Some(c) = t.coda {
                    feats.push(format!("coda[{off}]={}", c.wylie()));
                }
                if let Some(pre) = t.prescript {
                    feats.push(format!("pre[{off}]={}", pre.wylie()));
                }
                if t.postscript.is_some() {
                    feats.push(format!("post[{off}]"));
                }
                if t.particle.is_some() {
                    feats.push(format!("particle[{off}]"));
                }
            }
        }
        if off == 0 || off == 1 {
            feats.push(format!("syl[{off}]={}", tok.text));
        }
    }
    for off in [-1i64, 1] {
        let idx = i as i64 + off;
        if idx >= 0 && (idx as usize) < tokens.len() {
            let same = match (&tokens[i].tuple, &tokens[idx as usize].tuple) {
                (Some(a), Some(b)) => {
                    crate::stem::extract_stem(a) == crate::stem::extract_stem(b)
                }
                _ => false,
            };
            if same {
                feats.push(format!("stem_eq[{off}]"));
            }
        }
    }
    feats
}

/// Averaged-perceptron training over BEGIN/INSIDE tags.
pub fn train_segmenter(
    corpus: &[(Vec<Token>, Segmentation)],
    epochs: usize,
    seed: u64,
) -> Result<SegmenterModel> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    for (tokens, seg) in corpus {
        if tokens.len() != seg.tags.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} tokens vs {} tags",
                tokens.len(),
                seg.tags.len()
            )));
        }
    }

    // Averaged perceptron bookkeeping: running weights, per-feature totals
    // weighted by survival time, and last-update stamps.
    let mut weights: BTreeMap<String, f64> = BTreeMap::new();
    let mut totals: BTreeMap<String, f64> = BTreeMap::new();
    let mut stamps: BTreeMap<String, usize> = BTreeMap::new();
    let mut bias = 0.0f64;
    let mut bias_total = 0.0f64;
    let mut bias_stamp = 0usize;
    let mut step = 0usize;

    let mut order: Vec<usize> = (0..corpus.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..epochs {
        order.shuffle(&mut rng);
        for &si in &order {
            let (tokens, gold) = &corpus[si];
            for i in 0..tokens.len() {
                step += 1;
                let feats = featurize(tokens, i);
                let score: f64 = bias
                    + feats
                        .iter()
                        .map(|f| weights.get(f).copied().unwrap_or(0.0))
                        .sum::<f64>();
                let predicted = if i == 0 || score >= 0.0 {
                    BoundaryTag::Begin
                } else {
                    BoundaryTag::Inside
                };
                let target = gold.tags[i];
                if predicted != target {
                    let delta = if target == BoundaryTag::Begin { 1.0 } else { -1.0 };
                    for f in &feats {
                        let w = weights.entry(f.clone()).or_insert(0.0);
                        let t = totals.entry(f.clone()).or_insert(0.0);
                        let s = stamps.entry(f.clone()).or_insert(0);
                        *t += (step - *s) as f64 * *w;
                        *s = step;
                        *w += delta;
                    }
                    bias_total += (step - bias_stamp) as f64 * bias;
                    bias_stamp = step;
                    bias += delta;
                }
            }
        }
    }
    let mut averaged = BTreeMap::new();
    for (f, w) in &weights {
        let t = totals.get(f).copied().unwrap_or(0.0) + (step - stamps[f]) as f64 * w;
        let avg = t / step.max(1) as f64;
        if avg != 0.0 {
            averaged.insert(f.clone(), avg);
        }
    }
    bias_total += (step - bias_stamp) as f64 * bias;
    let linear = LinearModel {
        labels: (LABEL_BEGIN.into(), LABEL_INSIDE.into()),
        weights: averaged,
        bias: bias_total / step.max(1) as f64,
        meta: TrainMeta {
            epochs,
            learning_rate: 1.0,
            seed,
        },
    };
    Ok(SegmenterModel {
        template: TEMPLATE.into(),
        linear,
    })
}

/// Greedy left-to-right tagging; the first tag is forced BEGIN.
pub fn segment(model: &SegmenterModel, tokens: &[Token]) -> Result<Segmentation> {
    if model.template != TEMPLATE {
        return Err(Error::TemplateMismatch {
            found: model.template.clone(),
            expected: TEMPLATE.into(),
        });
    }
    let mut tags = Vec::with_capacity(tokens.len());
    for i in 0..tokens.len() {
        if i == 0 {
            tags.push(BoundaryTag::Begin);
            continue;
        }
        let feats = featurize(tokens, i);
        let score = model
            .linear
            .score(feats.iter().map(|f| (f.as_str(), 1.0)));
        tags.push(if score >= 0.0 {
            BoundaryTag::Begin
        } else {
            BoundaryTag::Inside
        });
    }
    Ok(Segmentation { tags })
}

/// Boundary precision/recall/F1 for predicted against gold tags, computed
/// over positions 1.. (position 0 is forced).
pub fn boundary_f1(pairs: &[(Segmentation, Segmentation)]) -> (f64, f64, f64) {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (pred, gold) in pairs {
        for i in 1..gold.tags.len() {
            match (pred.tags[i], gold.tags[i]) {
                (BoundaryTag::Begin, BoundaryTag::Begin) => tp += 1,
                (BoundaryTag::Begin, BoundaryTag::Inside) => fp += 1,
                (BoundaryTag::Inside, BoundaryTag::Begin) => fn_ += 1,
                _ => {}
            }
        }
    }
    let p = if tp + fp == 0 {
        1.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let r = if tp + fn_ == 0 {
        1.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f1 = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    (p, r, f1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::Document;
    use crate::stem::NormRuleSet;
    use crate::syllable::SyllableTables;

    fn tokens(text: &str) -> Vec<Token> {
        Document::from_text("t", text, SyllableTables::shipped(), NormRuleSet::shipped()).tokens
    }

    fn all_begin(n: usize) -> Segmentation {
        Segmentation {
            tags: vec![BoundaryTag::Begin; n],
        }
    }

    #[test]
    fn features_pad_at_edges_and_are_deterministic() {
        let toks = tokens("dge slong chos");
        let f0 = featurize(&toks, 0);
        assert!(f0.contains(&"pad[-2]".to_string()));
        assert!(f0.contains(&"pad[-1]".to_string()));
        assert_eq!(f0, featurize(&toks, 0));
    }

    #[test]
    fn hand_expanded_feature_set_for_middle_position() {
        let toks = tokens("dge slong gi");
        let feats = featurize(&toks, 1);
        let expected = [
            "pad[-2]",
            "stack[-1]=g",
            "vowel[-1]=e",
            "pre[-1]=d",
            "stack[0]=sl",
            "vowel[0]=o",
            "coda[0]=ng",
            "syl[0]=slong",
            "stack[1]=g",
            "vowel[1]=i",
            "syl[1]=gi",
            "pad[2]",
        ];
        assert_eq!(feats, expected, "features: {feats:?}");
    }

    #[test]
    fn single_syllable_words_learn_all_begin() {
        let sents = ["nga chos dge", "chos nga dge", "dge nga chos"];
        let corpus: Vec<(Vec<Token>, Segmentation)> = sents
            .iter()
            .map(|s| {
                let t = tokens(s);
                let n = t.len();
                (t, all_begin(n))
            })
            .collect();
        let model = train_segmenter(&corpus, 5, 1).unwrap();
        for (toks, gold) in &corpus {
            assert_eq!(&segment(&model, toks).unwrap(), gold);
        }
    }

    #[test]
    fn empty_and_single_inputs() {
        let model = train_segmenter(
            &[(tokens("nga chos"), all_begin(2))],
            3,
            0,
        )
        .unwrap();
        assert_eq!(segment(&model, &[]).unwrap().tags.len(), 0);
        let one = tokens("nga");
        assert_eq!(
            segment(&model, &one).unwrap().tags,
            vec![BoundaryTag::Begin]
        );
    }

    #[test]
    fn shape_mismatch_and_empty_corpus_are_errors() {
        assert!(matches!(train_segmenter(&[], 1, 0), Err(Error::EmptyCorpus)));
        let bad = vec![(tokens("nga chos"), all_begin(3))];
        assert!(matches!(
            train_segmenter(&bad, 1, 0),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn template_mismatch_is_rejected() {
        let model = train_segmenter(&[(tokens("nga chos"), all_begin(2))], 1, 0).unwrap();
        let stale = SegmenterModel {
            template: "seg-v0".into(),
            ..model
        };
        assert!(matches!(
            segment(&stale, &tokens("nga")),
            Err(Error::TemplateMismatch { .. })
        ));
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let corpus = vec![
            (tokens("dge slong chos la"), Segmentation {
                tags: vec![
                    BoundaryTag::Begin,
                    BoundaryTag::Inside,
                    BoundaryTag::Begin,
                    BoundaryTag::Begin,
                ],
            }),
            (tokens("chos dge slong"), Segmentation {
                tags: vec![BoundaryTag::Begin, BoundaryTag::Begin, BoundaryTag::Inside],
            }),
        ];
        let m1 = train_segmenter(&corpus, 4, 42).unwrap();
        let m2 = train_segmenter(&corpus, 4, 42).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn words_from_tags() {
        let seg = Segmentation {
            tags: vec![
                BoundaryTag::Begin,
                BoundaryTag::Inside,
                BoundaryTag::Begin,
                BoundaryTag::Inside,
                BoundaryTag::Inside,
            ],
        };
        assert_eq!(seg.words(), vec![(0, 1), (2, 4)]);
    }

    #[test]
    fn converged_model_reproduces_training_tags() {
        // A tiny lexicon with unambiguous two-syllable words.
        let corpus = vec![
            (
                tokens("dge slong chos mthong"),
                Segmentation {
                    tags: vec![
                        BoundaryTag::Begin,
                        BoundaryTag::Inside,
                        BoundaryTag::Begin,
                        BoundaryTag::Begin,
                    ],
                },
            ),
            (
                tokens("chos dge slong"),
                Segmentation {
                    tags: vec![BoundaryTag::Begin, BoundaryTag::Begin, BoundaryTag::Inside],
                },
            ),
            (
                tokens("mthong chos dge slong chos"),
                Segmentation {
                    tags: vec![
                        BoundaryTag::Begin,
                        BoundaryTag::Begin,
                        BoundaryTag::Begin,
                        BoundaryTag::Inside,
                        BoundaryTag::Begin,
                    ],
                },
            ),
        ];
        let model = train_segmenter(&corpus, 12, 3).unwrap();
        for (toks, gold) in &corpus {
            assert_eq!(&segment(&model, toks).unwrap(), gold, "{:?}", toks[0].text);
        }
    }
}
