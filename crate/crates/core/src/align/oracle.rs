//! Brute-force reference aligner for small inputs.
//!
//! Enumerates, for every matching start position pair, the minimal
//! stem-level edit cost to every end pair by standard dynamic programming
//! with the same vertex and gap costs as the chaining algorithm (matches are
//! only possible at vertices; a skipped position costs one per side, with no
//! bound on gap runs). A span pair is accepted when both lengths reach the
//! minimum and the cost fits the shared error budget; only pairs not
//! strictly contained in another accepted pair are kept.
//!
//! Guarded to small position products; this is a test surface, not a fast
//! path.

use super::graph::{vertices_for_keys, Vertex};
use super::{within_budget, AlignParams, Document, MatchKey, ParallelPassage, VariantCounts};
use crate::error::{Error, Result};
use crate::stem::CostTable;
use std::collections::HashMap;

/// Maximum `|a| * |b|` the brute-force aligner accepts.
pub const ORACLE_GUARD: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq)]
struct Accepted {
    a_start: usize,
    a_end: usize,
    b_start: usize,
    b_end: usize,
    cost: f64,
}

/// All maximal acceptable span pairs. Scores carry the negated edit cost
/// (higher is better); matched counts and variant tallies are not derived.
pub fn oracle_align(a: &Document, b: &Document, p: &AlignParams) -> Result<Vec<ParallelPassage>> {
    p.validate()?;
    if a.is_empty() {
        return Err(Error::EmptyDocument(a.id.clone()));
    }
    if b.is_empty() {
        return Err(Error::EmptyDocument(b.id.clone()));
    }
    let product = a.len() * b.len();
    if product > ORACLE_GUARD {
        return Err(Error::TooLarge(product, ORACLE_GUARD));
    }
    let vertices = doc_vertices(a, b, p);
    let grid: HashMap<(usize, usize), f64> = vertices
        .iter()
        .map(|v| ((v.i as usize, v.j as usize), v.cost as f64))
        .collect();

    let mut accepted = Vec::new();
    for v in &vertices {
        collect_from_start(
            (v.i as usize, v.j as usize),
            a.len(),
            b.len(),
            &grid,
            p,
            &mut accepted,
        );
    }

    let maximal: Vec<&Accepted> = accepted
        .iter()
        .filter(|x| {
            !accepted.iter().any(|y| {
                y.a_start <= x.a_start
                    && y.a_end >= x.a_end
                    && y.b_start <= x.b_start
                    && y.b_end >= x.b_end
                    && (y.a_start, y.a_end, y.b_start, y.b_end)
                        != (x.a_start, x.a_end, x.b_start, x.b_end)
            })
        })
        .collect();

    let mut out: Vec<ParallelPassage> = maximal
        .into_iter()
        .map(|x| ParallelPassage {
            a_start: x.a_start,
            a_end: x.a_end,
            b_start: x.b_start,
            b_end: x.b_end,
            score: -x.cost,
            matched: 0,
            variants: VariantCounts::default(),
        })
        .collect();
    out.sort_by(|x, y| {
        (x.a_start, x.a_end, x.b_start, x.b_end).cmp(&(y.a_start, y.a_end, y.b_start, y.b_end))
    });
    Ok(out)
}

/// The shared acceptance predicate: do the given spans admit an alignment
/// with matched endpoints whose cost fits the budget, at the minimum length?
pub fn oracle_accepts(
    a: &Document,
    b: &Document,
    a_span: (usize, usize),
    b_span: (usize, usize),
    p: &AlignParams,
) -> bool {
    let (sa, ea) = a_span;
    let (sb, eb) = b_span;
    if ea < sa || eb < sb || ea >= a.len() || eb >= b.len() {
        return false;
    }
    if ea - sa + 1 < p.min_length || eb - sb + 1 < p.min_length {
        return false;
    }
    let vertices = doc_vertices(a, b, p);
    let grid: HashMap<(usize, usize), f64> = vertices
        .iter()
        .map(|v| ((v.i as usize, v.j as usize), v.cost as f64))
        .collect();
    if !grid.contains_key(&(sa, sb)) {
        return false;
    }
    match min_cost_to(&grid, (sa, sb), (ea, eb)) {
        Some(cost) => within_budget(cost, ea - sa + 1, eb - sb + 1, p),
        None => false,
    }
}

fn doc_vertices(a: &Document, b: &Document, p: &AlignParams) -> Vec<Vertex> {
    if p.vertex_threshold == 0.0 {
        vertices_for_keys(&a.keys, &b.keys, p, None::<&fn(&MatchKey, &MatchKey) -> f64>)
    } else {
        let dist = super::stem_cost_fn(CostTable::shipped());
        vertices_for_keys(&a.keys, &b.keys, p, Some(&dist))
    }
}

/// One forward DP from a fixed start vertex. `m[u][w]` is the minimal cost
/// of an alignment from the start to `(u, w)` whose first and last positions
/// are matched; the rectangle minimum of `m - u - w` makes each cell O(1).
fn collect_from_start(
    start: (usize, usize),
    len_a: usize,
    len_b: usize,
    grid: &HashMap<(usize, usize), f64>,
    p: &AlignParams,
    accepted: &mut Vec<Accepted>,
) {
    let (sa, sb) = start;
    let rows = len_a - sa;
    let cols = len_b - sb;
    const INF: f64 = f64::INFINITY;
    let mut q_prev = vec![INF; cols];
    let mut q_cur = vec![INF; cols];
    for u in 0..rows {
        for w in 0..cols {
            let vc = grid.get(&(sa + u, sb + w)).copied();
            let m_uw = match vc {
                None => INF,
                Some(vc) => {
                    if u == 0 && w == 0 {
                        vc
                    } else if u == 0 || w == 0 {
                        INF // the start position must be the first match
                    } else {
                        let q = q_prev[w - 1];
                        if q.is_finite() {
                            vc + (u + w) as f64 - 2.0 + q
                        } else {
                            INF
                        }
                    }
                }
            };
            if m_uw.is_finite()
                && u + 1 >= p.min_length
                && w + 1 >= p.min_length
                && within_budget(m_uw, u + 1, w + 1, p)
            {
                accepted.push(Accepted {
                    a_start: sa,
                    a_end: sa + u,
                    b_start: sb,
                    b_end: sb + w,
                    cost: m_uw,
                });
            }
            let mut q = if m_uw.is_finite() {
                m_uw - (u + w) as f64
            } else {
                INF
            };
            if w > 0 {
                q = q.min(q_cur[w - 1]);
            }
            q = q.min(q_prev[w]);
            q_cur[w] = q;
        }
        std::mem::swap(&mut q_prev, &mut q_cur);
        q_cur.fill(INF);
    }
}

fn min_cost_to(
    grid: &HashMap<(usize, usize), f64>,
    start: (usize, usize),
    end: (usize, usize),
) -> Option<f64> {
    let (sa, sb) = start;
    let (ea, eb) = end;
    let rows = ea - sa + 1;
    let cols = eb - sb + 1;
    const INF: f64 = f64::INFINITY;
    let mut q_prev = vec![INF; cols];
    let mut q_cur = vec![INF; cols];
    let mut m_end = None;
    for u in 0..rows {
        for w in 0..cols {
            let vc = grid.get(&(sa + u, sb + w)).copied();
            let m_uw = match vc {
                None => INF,
                Some(vc) => {
                    if u == 0 && w == 0 {
                        vc
                    } else if u == 0 || w == 0 {
                        INF
                    } else {
                        let q = q_prev[w - 1];
                        if q.is_finite() {
                            vc + (u + w) as f64 - 2.0 + q
                        } else {
                            INF
                        }
                    }
                }
            };
            if u + 1 == rows && w + 1 == cols && m_uw.is_finite() {
                m_end = Some(m_uw);
            }
            let mut q = if m_uw.is_finite() {
                m_uw - (u + w) as f64
            } else {
                INF
            };
            if w > 0 {
                q = q.min(q_cur[w - 1]);
            }
            q = q.min(q_prev[w]);
            q_cur[w] = q;
        }
        std::mem::swap(&mut q_prev, &mut q_cur);
        q_cur.fill(INF);
    }
    m_end
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

    #[test]
    fn identical_documents_accept_the_full_span() {
        let text = "dge slong chos la dga' zhing sems can thams cad";
        let a = doc("a", text);
        let b = doc("b", text);
        let p = AlignParams::default();
        let oracle = oracle_align(&a, &b, &p).unwrap();
        let full = oracle
            .iter()
            .find(|o| (o.a_start, o.a_end) == (0, a.len() - 1) && (o.b_start, o.b_end) == (0, b.len() - 1));
        assert!(full.is_some(), "oracle: {oracle:?}");
        assert!(oracle_accepts(&a, &b, (0, a.len() - 1), (0, b.len() - 1), &p));
    }

    #[test]
    fn disjoint_documents_accept_nothing() {
        let a = doc("a", "nga la chos yod pas na kho");
        let b = doc("b", "khyed rang dper brjod mdzad dgos sam");
        let p = AlignParams::default();
        assert!(oracle_align(&a, &b, &p).unwrap().is_empty());
    }

    #[test]
    fn guard_rejects_large_inputs() {
        let text: Vec<String> = (0..400).map(|i| ["kha", "mi", "gso"][i % 3].to_string()).collect();
        let a = doc("a", &text.join(" "));
        let p = AlignParams::default();
        assert!(matches!(
            oracle_align(&a, &a, &p),
            Err(Error::TooLarge(_, _))
        ));
    }

    #[test]
    fn aligner_output_satisfies_the_oracle_predicate() {
        // A planted block with one substitution, inside unrelated filler.
        let filler_a = "kha mi gso rta lam nor zangs dkar phug ri";
        let filler_b = "zla sman dgu phag sha tshe gser dmar brag klu";
        let plant_a = "dge slong chos la dga' zhing sems can thams cad mthong ngo";
        let plant_b = "dge slong chos la dga' zhing sems kyi can thams cad mthong ngo";
        let a = doc("a", &format!("{filler_a} {plant_a} {filler_a}"));
        let b = doc("b", &format!("{filler_b} {plant_b} {filler_b}"));
        let p = AlignParams::default();
        let passages = align_pair(&a, &b, &p).unwrap();
        assert!(!passages.is_empty());
        for pass in &passages {
            assert!(
                oracle_accepts(&a, &b, (pass.a_start, pass.a_end), (pass.b_start, pass.b_end), &p),
                "unsound passage {pass:?}"
            );
        }
    }
}
