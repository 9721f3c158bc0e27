//! Chunked execution of the aligner.
//!
//! Both documents are cut into ownership regions of `chunk_size - overlap`
//! positions. Every pair of regions becomes an independent task that runs
//! the chaining DP over a slice widened by `overlap + max_gap + 1` on each
//! side, and keeps only candidates whose start lies in its own region. Each
//! candidate is therefore produced exactly once with full context, so the
//! merged result equals [`align_pair`](super::align_pair) whenever no passage
//! exceeds `overlap` (the stated precondition). The final merge is a single
//! deterministic pass over the collected candidates, which makes the output
//! independent of worker count and completion order.

use super::graph::vertices_for_keys;
use super::paths::{chain_candidates, PathCandidate};
use super::{
    annotate_variants, merge_and_filter, AlignParams, Document, MatchKey, ParallelPassage,
    ParticleLexicon,
};
use crate::error::{Error, Result};
use crate::stem::{CostTable, NormRuleSet};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Decomposition and worker parameters for [`align_chunked`].
#[derive(Clone, Copy, Debug)]
pub struct ChunkParams {
    pub chunk_size: usize,
    pub overlap: usize,
    pub workers: usize,
}

/// Chunked, optionally parallel alignment. Result set equals
/// [`align_pair`](super::align_pair) exactly for any worker count, provided
/// the overlap is at least the longest passage present; a passage longer
/// than the overlap may be missed or truncated.
pub fn align_chunked(
    a: &Document,
    b: &Document,
    p: &AlignParams,
    cp: &ChunkParams,
) -> Result<Vec<ParallelPassage>> {
    align_chunked_with(a, b, p, cp, NormRuleSet::shipped(), ParticleLexicon::shipped())
}

pub fn align_chunked_with(
    a: &Document,
    b: &Document,
    p: &AlignParams,
    cp: &ChunkParams,
    rules: &NormRuleSet,
    lexicon: &ParticleLexicon,
) -> Result<Vec<ParallelPassage>> {
    p.validate()?;
    if a.is_empty() {
        return Err(Error::EmptyDocument(a.id.clone()));
    }
    if b.is_empty() {
        return Err(Error::EmptyDocument(b.id.clone()));
    }
    if cp.workers == 0 {
        return Err(Error::BadChunking("worker count must be at least 1".into()));
    }
    if cp.overlap < p.min_length {
        return Err(Error::BadChunking(format!(
            "overlap {} is below the minimum passage length {}; straddling \
             passages could be missed",
            cp.overlap, p.min_length
        )));
    }
    if cp.chunk_size <= 2 * cp.overlap {
        return Err(Error::BadChunking(format!(
            "chunk size {} must exceed twice the overlap {}",
            cp.chunk_size, cp.overlap
        )));
    }

    let step = cp.chunk_size - cp.overlap;
    let margin = cp.overlap + p.max_gap + 1;
    let owns = |len: usize| -> Vec<(usize, usize)> {
        (0..len)
            .step_by(step)
            .map(|s| (s, (s + step).min(len)))
            .collect()
    };
    let owns_a = owns(a.len());
    let owns_b = owns(b.len());
    let mut tasks = Vec::with_capacity(owns_a.len() * owns_b.len());
    for oa in &owns_a {
        for ob in &owns_b {
            tasks.push((*oa, *ob));
        }
    }

    let run = |&((oa_lo, oa_hi), (ob_lo, ob_hi)): &((usize, usize), (usize, usize))| -> Vec<PathCandidate> {
        let a_lo = oa_lo.saturating_sub(margin);
        let a_hi = (oa_hi + margin).min(a.len());
        let b_lo = ob_lo.saturating_sub(margin);
        let b_hi = (ob_hi + margin).min(b.len());
        let cands = candidates_for_slices(
            &a.keys[a_lo..a_hi],
            &b.keys[b_lo..b_hi],
            p,
        );
        cands
            .into_iter()
            .filter_map(|c| {
                let a_start = c.a_start as usize + a_lo;
                let b_start = c.b_start as usize + b_lo;
                if (oa_lo..oa_hi).contains(&a_start) && (ob_lo..ob_hi).contains(&b_start) {
                    Some(PathCandidate {
                        a_start: a_start as u32,
                        a_end: c.a_end + a_lo as u32,
                        b_start: b_start as u32,
                        b_end: c.b_end + b_lo as u32,
                        ..c
                    })
                } else {
                    None
                }
            })
            .collect()
    };

    #[cfg(feature = "parallel")]
    let per_task: Vec<Vec<PathCandidate>> = {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cp.workers)
            .build()
            .map_err(|e| Error::BadChunking(format!("worker pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    };
    #[cfg(not(feature = "parallel"))]
    let per_task: Vec<Vec<PathCandidate>> = tasks.iter().map(run).collect();

    let all: Vec<PathCandidate> = per_task.into_iter().flatten().collect();
    let mut passages = merge_and_filter(all, p);
    annotate_variants(&mut passages, a, b, p, rules, lexicon);
    Ok(passages)
}

fn candidates_for_slices(a: &[MatchKey], b: &[MatchKey], p: &AlignParams) -> Vec<PathCandidate> {
    let vertices = if p.vertex_threshold == 0.0 {
        vertices_for_keys(a, b, p, None::<&fn(&MatchKey, &MatchKey) -> f64>)
    } else {
        let dist = super::stem_cost_fn(CostTable::shipped());
        vertices_for_keys(a, b, p, Some(&dist))
    };
    chain_candidates(&vertices, p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::align_pair;
    use crate::stem::NormRuleSet;
    use crate::syllable::SyllableTables;

    fn doc(id: &str, text: &str) -> Document {
        Document::from_text(id, text, SyllableTables::shipped(), NormRuleSet::shipped())
    }

    fn repeated(pattern: &[&str], n: usize) -> String {
        let mut parts = Vec::new();
        for i in 0..n {
            parts.push(pattern[i % pattern.len()]);
        }
        parts.join(" ")
    }

    #[test]
    fn single_worker_matches_align_pair() {
        // Distinct filler plus one shared block placed differently.
        let filler_a = repeated(&["kha", "mi", "gso", "rta", "lam", "nor"], 40);
        let filler_b = repeated(&["zla", "sman", "dgu", "phag", "sha", "tshe"], 40);
        let shared = "dge slong chos la dga' zhing sems can thams cad";
        let a = doc("a", &format!("{filler_a} {shared} {filler_a}"));
        let b = doc("b", &format!("{filler_b} {shared} {filler_b}"));
        let p = AlignParams::default();
        let plain = align_pair(&a, &b, &p).unwrap();
        assert_eq!(plain.len(), 1, "plain: {plain:?}");
        for workers in [1, 2] {
            let cp = ChunkParams {
                chunk_size: 64,
                overlap: 16,
                workers,
            };
            let chunked = align_chunked(&a, &b, &p, &cp).unwrap();
            assert_eq!(chunked, plain, "workers={workers}");
        }
    }

    #[test]
    fn bad_chunking_is_rejected() {
        let a = doc("a", "nga la chos yod do zhes");
        let p = AlignParams::default();
        for cp in [
            ChunkParams {
                chunk_size: 64,
                overlap: 0,
                workers: 1,
            },
            ChunkParams {
                chunk_size: 20,
                overlap: 10,
                workers: 1,
            },
            ChunkParams {
                chunk_size: 64,
                overlap: 16,
                workers: 0,
            },
        ] {
            assert!(matches!(
                align_chunked(&a, &a, &p, &cp),
                Err(Error::BadChunking(_))
            ));
        }
    }

    #[test]
    fn single_chunk_degenerates_to_align_pair() {
        let a = doc("a", "dge slong chos la dga' zhing sems can thams cad");
        let p = AlignParams::default();
        let cp = ChunkParams {
            chunk_size: 4096,
            overlap: 64,
            workers: 1,
        };
        assert_eq!(
            align_chunked(&a, &a, &p, &cp).unwrap(),
            align_pair(&a, &a, &p).unwrap()
        );
    }
}
