//! Synthetic gold-standard fixtures.
//!
//! Generates a pair of documents from a syllable model, plants shared
//! passages into both, mutates the second copy under controlled rates, and
//! records ground truth. Mutations split into the non-substantial classes
//! (particle swap, orthographic variation, inflectional variation) and the
//! substantial ones (content substitution, omission). Costly mutations are
//! spaced so the error budget is never exceeded on any prefix of a plant;
//! otherwise recovery would depend on where the mutations happen to fall.
//!
//! Everything is driven by a seeded ChaCha stream: a fixed seed reproduces
//! the fixture bit for bit.

use super::GoldPair;
use crate::align::{Document, ParticleLexicon};
use crate::stem::{extract_stem, normalize, NormRuleSet, Stem};
use crate::syllable::{
    enumerate_valid_syllables, parse_str, render_syllable, SyllableTables, SyllableTuple,
};
use crate::wylie::TibetanLetter;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Mutation classes applied to planted copies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MutationClass {
    ParticleSwap,
    Orthographic,
    Inflectional,
    Substitution,
    Gap,
}

/// One applied mutation, at its offset within the original plant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MutationRecord {
    pub class: MutationClass,
    pub offset: usize,
}

/// Ground truth for one planted passage.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlantRecord {
    pub a_start: usize,
    pub a_end: usize,
    pub b_start: usize,
    pub b_end: usize,
    pub mutations: Vec<MutationRecord>,
}

impl PlantRecord {
    pub fn count(&self, class: MutationClass) -> usize {
        self.mutations.iter().filter(|m| m.class == class).count()
    }
}

/// Per-syllable mutation probabilities, realized as deterministic counts
/// (`round(rate * plant_len)` per plant).
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MutationRates {
    pub particle_swap: f64,
    pub orthographic: f64,
    pub inflectional: f64,
    pub substitution: f64,
    pub gap: f64,
}

impl MutationRates {
    pub fn zero() -> MutationRates {
        MutationRates {
            particle_swap: 0.0,
            orthographic: 0.0,
            inflectional: 0.0,
            substitution: 0.0,
            gap: 0.0,
        }
    }
}

impl Default for MutationRates {
    /// 12% non-substantial, 3% substantial.
    fn default() -> MutationRates {
        MutationRates {
            particle_swap: 0.03,
            orthographic: 0.04,
            inflectional: 0.05,
            substitution: 0.02,
            gap: 0.01,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct FixtureParams {
    pub seed: u64,
    pub n_pairs: usize,
    /// Approximate document length in syllables (background included).
    pub doc_len: usize,
    pub plant_min: usize,
    pub plant_max: usize,
    /// Number of distinct content syllables in the background model.
    pub vocab_size: usize,
    /// Roughly one grammatical particle per this many syllables.
    pub particle_every: usize,
    pub rates: MutationRates,
}

impl Default for FixtureParams {
    fn default() -> FixtureParams {
        FixtureParams {
            seed: 1,
            n_pairs: 24,
            doc_len: 3600,
            plant_min: 40,
            plant_max: 90,
            vocab_size: 320,
            particle_every: 5,
            rates: MutationRates::default(),
        }
    }
}

/// A generated document pair with its ground truth and plant log.
#[derive(Clone, Debug)]
pub struct GoldFixture {
    pub doc_a: Document,
    pub doc_b: Document,
    pub gold: Vec<GoldPair>,
    pub log: Vec<PlantRecord>,
}

struct SyllableModel {
    vocab: Vec<SyllableTuple>,
    cumulative: Vec<f64>,
    particles: Vec<SyllableTuple>,
    particle_every: usize,
    tables: &'static SyllableTables,
    rules: &'static NormRuleSet,
    lexicon: &'static ParticleLexicon,
}

impl SyllableModel {
    fn build(params: &FixtureParams, rng: &mut ChaCha8Rng) -> SyllableModel {
        let tables = SyllableTables::shipped();
        let rules = NormRuleSet::shipped();
        let lexicon = ParticleLexicon::shipped();
        let mut candidates: Vec<SyllableTuple> = enumerate_valid_syllables(tables, usize::MAX)
            .into_iter()
            .filter(|t| t.particle.is_none())
            .filter(|t| !lexicon.contains(&render_syllable(t, tables)))
            .collect();
        candidates.shuffle(rng);
        candidates.truncate(params.vocab_size.max(8));
        // Mildly skewed rank weights.
        let mut cumulative = Vec::with_capacity(candidates.len());
        let mut acc = 0.0;
        for r in 0..candidates.len() {
            acc += 1.0 / (r as f64 + 40.0);
            cumulative.push(acc);
        }
        let particles: Vec<SyllableTuple> = lexicon
            .forms()
            .filter_map(|f| parse_str(f, tables).ok())
            .collect();
        SyllableModel {
            vocab: candidates,
            cumulative,
            particles,
            particle_every: params.particle_every.max(2),
            tables,
            rules,
            lexicon,
        }
    }

    fn content(&self, rng: &mut ChaCha8Rng) -> SyllableTuple {
        let total = *self.cumulative.last().unwrap();
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c < u);
        self.vocab[idx.min(self.vocab.len() - 1)]
    }

    fn token(&self, rng: &mut ChaCha8Rng) -> SyllableTuple {
        if rng.random_range(0..self.particle_every) == 0 {
            self.particles[rng.random_range(0..self.particles.len())]
        } else {
            self.content(rng)
        }
    }

    fn stream(&self, len: usize, rng: &mut ChaCha8Rng) -> Vec<SyllableTuple> {
        (0..len).map(|_| self.token(rng)).collect()
    }

    fn stem_of(&self, t: &SyllableTuple) -> Stem {
        normalize(&extract_stem(t), self.rules)
    }

    fn is_particle(&self, t: &SyllableTuple) -> bool {
        self.lexicon.contains(&render_syllable(t, self.tables))
    }
}

/// Generate the fixture: background text, planted passages, mutated copies,
/// ground truth and plant log.
pub fn make_gold_fixture(params: &FixtureParams) -> GoldFixture {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let model = SyllableModel::build(params, &mut rng);

    let plants: Vec<Vec<SyllableTuple>> = (0..params.n_pairs)
        .map(|_| {
            let len = rng.random_range(params.plant_min..=params.plant_max.max(params.plant_min));
            model.stream(len, &mut rng)
        })
        .collect();

    let planted_total: usize = plants.iter().map(Vec::len).sum();
    let background_total = params.doc_len.saturating_sub(planted_total).max(
        8 * (params.n_pairs + 1),
    );
    let base_gap = background_total / (params.n_pairs + 1);
    let gap_len = |rng: &mut ChaCha8Rng| -> usize {
        let jitter = (base_gap / 4).max(1);
        base_gap.saturating_sub(jitter) + rng.random_range(0..=2 * jitter)
    };

    let mut tuples_a: Vec<SyllableTuple> = Vec::new();
    let mut tuples_b: Vec<SyllableTuple> = Vec::new();
    let mut gold = Vec::new();
    let mut log = Vec::new();

    for plant in &plants {
        let ga = gap_len(&mut rng);
        tuples_a.extend(model.stream(ga, &mut rng));
        let a_start = tuples_a.len();
        tuples_a.extend_from_slice(plant);
        let a_end = tuples_a.len() - 1;

        let gb = gap_len(&mut rng);
        tuples_b.extend(model.stream(gb, &mut rng));
        let (mutated, mutations) = mutate_plant(plant, &params.rates, &model, &mut rng);
        let b_start = tuples_b.len();
        tuples_b.extend(mutated);
        let b_end = tuples_b.len() - 1;

        gold.push(GoldPair {
            doc_a: "a".into(),
            a_start,
            a_end,
            doc_b: "b".into(),
            b_start,
            b_end,
            note: format!("plant {}", gold.len()),
        });
        log.push(PlantRecord {
            a_start,
            a_end,
            b_start,
            b_end,
            mutations,
        });
    }
    tuples_a.extend(model.stream(gap_len(&mut rng), &mut rng));
    tuples_b.extend(model.stream(gap_len(&mut rng), &mut rng));

    GoldFixture {
        doc_a: Document::from_tuples("a", &tuples_a, model.tables, model.rules),
        doc_b: Document::from_tuples("b", &tuples_b, model.tables, model.rules),
        gold,
        log,
    }
}

/// Costly mutations (those the aligner must absorb as gaps) keep this
/// spacing so the error budget holds on every plant prefix.
const COSTLY_SPACING: usize = 8;

fn mutate_plant(
    plant: &[SyllableTuple],
    rates: &MutationRates,
    model: &SyllableModel,
    rng: &mut ChaCha8Rng,
) -> (Vec<SyllableTuple>, Vec<MutationRecord>) {
    let len = plant.len();
    let count = |rate: f64| (rate * len as f64).round() as usize;
    let mut records: Vec<MutationRecord> = Vec::new();
    let mut out: Vec<SyllableTuple> = plant.to_vec();
    let mut costly_taken: Vec<usize> = Vec::new();
    let mut all_taken: Vec<usize> = Vec::new();

    let costly_ok = |i: usize, costly: &[usize], all: &[usize]| {
        i >= COSTLY_SPACING
            && i + 2 < len
            && costly.iter().all(|&j| i.abs_diff(j) >= COSTLY_SPACING)
            && all.iter().all(|&j| i.abs_diff(j) >= 2)
    };
    let free_ok = |i: usize, all: &[usize]| {
        i >= 1 && i + 1 < len && all.iter().all(|&j| i.abs_diff(j) >= 2)
    };

    let shuffled_positions = |rng: &mut ChaCha8Rng| -> Vec<usize> {
        let mut idx: Vec<usize> = (0..len).collect();
        idx.shuffle(rng);
        idx
    };

    // Particle swaps.
    let mut placed = 0;
    for i in shuffled_positions(rng) {
        if placed >= count(rates.particle_swap) {
            break;
        }
        if !model.is_particle(&plant[i]) || !costly_ok(i, &costly_taken, &all_taken) {
            continue;
        }
        let original = plant[i];
        let choices: Vec<&SyllableTuple> = model
            .particles
            .iter()
            .filter(|p| {
                render_syllable(p, model.tables) != render_syllable(&original, model.tables)
            })
            .collect();
        if choices.is_empty() {
            continue;
        }
        out[i] = *choices[rng.random_range(0..choices.len())];
        costly_taken.push(i);
        all_taken.push(i);
        records.push(MutationRecord {
            class: MutationClass::ParticleSwap,
            offset: i,
        });
        placed += 1;
    }

    // Content substitutions.
    let mut placed = 0;
    for i in shuffled_positions(rng) {
        if placed >= count(rates.substitution) {
            break;
        }
        if model.is_particle(&plant[i]) || !costly_ok(i, &costly_taken, &all_taken) {
            continue;
        }
        let original_stem = model.stem_of(&plant[i]);
        let mut replacement = None;
        for _ in 0..16 {
            let cand = model.content(rng);
            if model.stem_of(&cand) != original_stem {
                replacement = Some(cand);
                break;
            }
        }
        let Some(cand) = replacement else { continue };
        out[i] = cand;
        costly_taken.push(i);
        all_taken.push(i);
        records.push(MutationRecord {
            class: MutationClass::Substitution,
            offset: i,
        });
        placed += 1;
    }

    // Omissions (applied at the end, in descending offset order).
    let mut gaps: Vec<usize> = Vec::new();
    for i in shuffled_positions(rng) {
        if gaps.len() >= count(rates.gap) {
            break;
        }
        if model.is_particle(&plant[i]) || !costly_ok(i, &costly_taken, &all_taken) {
            continue;
        }
        costly_taken.push(i);
        all_taken.push(i);
        gaps.push(i);
        records.push(MutationRecord {
            class: MutationClass::Gap,
            offset: i,
        });
    }

    // Orthographic variants (stem-preserving, so free for the aligner).
    let mut placed = 0;
    for i in shuffled_positions(rng) {
        if placed >= count(rates.orthographic) {
            break;
        }
        if !free_ok(i, &all_taken) {
            continue;
        }
        let Some(rewritten) = orthographic_variant(&plant[i], model) else {
            continue;
        };
        out[i] = rewritten;
        all_taken.push(i);
        records.push(MutationRecord {
            class: MutationClass::Orthographic,
            offset: i,
        });
        placed += 1;
    }

    // Inflectional variants (prescript/postscript toggles, stem-preserving).
    let mut placed = 0;
    for i in shuffled_positions(rng) {
        if placed >= count(rates.inflectional) {
            break;
        }
        if model.is_particle(&plant[i]) || !free_ok(i, &all_taken) {
            continue;
        }
        let Some(rewritten) = inflectional_variant(&plant[i], model, rng) else {
            continue;
        };
        out[i] = rewritten;
        all_taken.push(i);
        records.push(MutationRecord {
            class: MutationClass::Inflectional,
            offset: i,
        });
        placed += 1;
    }

    gaps.sort_unstable_by(|x, y| y.cmp(x));
    for g in gaps {
        out.remove(g);
    }
    records.sort_by_key(|r| r.offset);
    (out, records)
}

/// A different spelling with the same normalized stem, or None.
fn orthographic_variant(t: &SyllableTuple, model: &SyllableModel) -> Option<SyllableTuple> {
    let s = TibetanLetter::consonant("s").unwrap();
    let ts = TibetanLetter::consonant("ts").unwrap();
    let p = TibetanLetter::consonant("p").unwrap();
    let b = TibetanLetter::consonant("b").unwrap();
    let y = TibetanLetter::consonant("y").unwrap();
    let r = TibetanLetter::consonant("r").unwrap();
    let t_ = TibetanLetter::consonant("t").unwrap();
    let g = TibetanLetter::consonant("g").unwrap();
    let d = TibetanLetter::consonant("d").unwrap();
    let a = TibetanLetter::vowel("a").unwrap();
    let o = TibetanLetter::vowel("o").unwrap();

    let mut candidates: Vec<SyllableTuple> = Vec::new();
    // s- <-> sts- stack variant.
    if t.prescript.is_none() && t.superscript.is_none() && t.core == s && t.subscript.is_none() {
        candidates.push(SyllableTuple {
            superscript: Some(s),
            core: ts,
            ..*t
        });
    }
    if t.superscript == Some(s) && t.core == ts && t.subscript.is_none() {
        candidates.push(SyllableTuple {
            superscript: None,
            core: s,
            ..*t
        });
    }
    // p/b voicing under y.
    if t.core == p && t.subscript == Some(y) {
        candidates.push(SyllableTuple { core: b, ..*t });
    }
    // Verb-row vowel variants feeding the shipped normalization rules.
    if t.superscript == Some(r) && t.core == t_ && t.subscript.is_none() && t.coda == Some(g) {
        let other = if t.vowel == o { a } else { o };
        candidates.push(SyllableTuple { vowel: other, ..*t });
    }
    if t.superscript.is_none()
        && t.core == p
        && t.subscript == Some(y)
        && t.coda == Some(d)
    {
        let other = if t.vowel == o { a } else { o };
        candidates.push(SyllableTuple { vowel: other, ..*t });
    }
    candidates.into_iter().find(|c| {
        model.tables.is_valid(c)
            && render_syllable(c, model.tables) != render_syllable(t, model.tables)
            && model.stem_of(c) == model.stem_of(t)
    })
}

/// Toggle a prescript or postscript, leaving the stem untouched.
fn inflectional_variant(
    t: &SyllableTuple,
    model: &SyllableModel,
    rng: &mut ChaCha8Rng,
) -> Option<SyllableTuple> {
    let mut candidates: Vec<SyllableTuple> = Vec::new();
    if t.prescript.is_some() {
        candidates.push(SyllableTuple {
            prescript: None,
            ..*t
        });
    } else {
        let options = model
            .tables
            .prescript_options(t.superscript, t.core, t.subscript);
        if !options.is_empty() {
            candidates.push(SyllableTuple {
                prescript: Some(options[rng.random_range(0..options.len())]),
                ..*t
            });
        }
    }
    if t.postscript.is_some() {
        candidates.push(SyllableTuple {
            postscript: None,
            ..*t
        });
    } else if let Some(coda) = t.coda {
        let options = model.tables.postscript_options(coda);
        if !options.is_empty() {
            candidates.push(SyllableTuple {
                postscript: Some(options[0]),
                ..*t
            });
        }
    }
    candidates.retain(|c| {
        model.tables.is_valid(c)
            && render_syllable(c, model.tables) != render_syllable(t, model.tables)
            && model.stem_of(c) == model.stem_of(t)
    });
    if candidates.is_empty() {
        None
    } else {
        Some(candidates[rng.random_range(0..candidates.len())])
    }
}
