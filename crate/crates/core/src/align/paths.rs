//! Maximal-path extraction from the match graph.
//!
//! Vertices are processed in lexicographic order with a rolling window of
//! the last `max_gap + 1` rows. Each vertex either extends the best-scoring
//! feasible predecessor chain (score = matched count minus accumulated cost)
//! or starts a fresh chain. Parent choices form a forest; a chain is emitted
//! at a leaf (a vertex never chosen as parent), which makes emitted paths
//! maximal, and exactly one candidate per tree survives, which realizes the
//! one-vertex-one-path rule without materializing vertex lists.

use super::graph::{MatchGraph, Vertex};
use super::{within_budget, AlignParams};
use std::collections::{HashMap, VecDeque};

/// A candidate path: its spans, score and cost bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathCandidate {
    pub a_start: u32,
    pub a_end: u32,
    pub b_start: u32,
    pub b_end: u32,
    pub score: f64,
    pub cost: f64,
    pub matched: u32,
}

impl PathCandidate {
    pub fn a_len(&self) -> u32 {
        self.a_end - self.a_start + 1
    }
    pub fn b_len(&self) -> u32 {
        self.b_end - self.b_start + 1
    }
}

#[derive(Clone, Copy)]
struct State {
    root_i: u32,
    root_j: u32,
    cost: f64,
    score: f64,
    matched: u32,
    extended: bool,
}

struct TreeEntry {
    live: u32,
    best: Option<PathCandidate>,
}

/// All maximal feasible paths of the graph, one per parent tree.
pub fn find_maximal_paths(graph: &MatchGraph, p: &AlignParams) -> Vec<PathCandidate> {
    chain_candidates(&graph.vertices, p)
}

pub(crate) fn chain_candidates(vertices: &[Vertex], p: &AlignParams) -> Vec<PathCandidate> {
    let g1 = (p.max_gap + 1) as u32;
    let mut window: VecDeque<(u32, HashMap<u32, State>)> = VecDeque::new();
    let mut trees: HashMap<(u32, u32), TreeEntry> = HashMap::new();
    let mut out: Vec<PathCandidate> = Vec::new();

    for v in vertices {
        while window
            .front()
            .is_some_and(|(row_i, _)| row_i + g1 < v.i)
        {
            let (row_i, map) = window.pop_front().unwrap();
            finalize_row(row_i, map, &mut trees, &mut out, p);
        }
        let vc = v.cost as f64;

        // Best feasible predecessor in the window; ties go to the closest
        // predecessor (largest i', then largest j').
        let mut best: Option<(f64, f64, u32, (u32, u32), (u32, u32))> = None;
        for (row_i, map) in window.iter() {
            let di = v.i - row_i;
            if di == 0 || di > g1 {
                continue;
            }
            for dj in 1..=g1 {
                if dj > v.j {
                    break;
                }
                let pj = v.j - dj;
                let Some(u) = map.get(&pj) else { continue };
                let gap = (di - 1 + dj - 1) as f64;
                let ncost = u.cost + gap + vc;
                let len_a = (v.i - u.root_i + 1) as usize;
                let len_b = (v.j - u.root_j + 1) as usize;
                if !within_budget(ncost, len_a, len_b, p) {
                    continue;
                }
                let nscore = u.score + 1.0 - gap - vc;
                let cand = (nscore, ncost, u.matched + 1, (u.root_i, u.root_j), (*row_i, pj));
                let take = match &best {
                    None => true,
                    Some(b) => match nscore.total_cmp(&b.0) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => cand.4 > b.4,
                    },
                };
                if take {
                    best = Some(cand);
                }
            }
        }

        let fresh_ok = within_budget(vc, 1, 1, p);
        let fresh_score = 1.0 - vc;
        let state = match best {
            Some((nscore, ncost, matched, root, pred)) if !fresh_ok || nscore >= fresh_score => {
                let (pi, pj) = pred;
                let row = window
                    .iter_mut()
                    .find(|(row_i, _)| *row_i == pi)
                    .expect("predecessor row in window");
                row.1.get_mut(&pj).expect("predecessor state").extended = true;
                State {
                    root_i: root.0,
                    root_j: root.1,
                    cost: ncost,
                    score: nscore,
                    matched,
                    extended: false,
                }
            }
            _ if fresh_ok => State {
                root_i: v.i,
                root_j: v.j,
                cost: vc,
                score: fresh_score,
                matched: 1,
                extended: false,
            },
            _ => continue,
        };

        if window.back().map(|(row_i, _)| *row_i) != Some(v.i) {
            window.push_back((v.i, HashMap::new()));
        }
        trees
            .entry((state.root_i, state.root_j))
            .or_insert(TreeEntry {
                live: 0,
                best: None,
            })
            .live += 1;
        window.back_mut().unwrap().1.insert(v.j, state);
    }
    while let Some((row_i, map)) = window.pop_front() {
        finalize_row(row_i, map, &mut trees, &mut out, p);
    }
    debug_assert!(trees.is_empty());
    out.sort_by(|x, y| {
        (x.a_start, x.a_end, x.b_start, x.b_end, x.matched)
            .cmp(&(y.a_start, y.a_end, y.b_start, y.b_end, y.matched))
            .then(x.score.total_cmp(&y.score))
    });
    out
}

fn finalize_row(
    row_i: u32,
    map: HashMap<u32, State>,
    trees: &mut HashMap<(u32, u32), TreeEntry>,
    out: &mut Vec<PathCandidate>,
    p: &AlignParams,
) {
    for (j, state) in map {
        let root = (state.root_i, state.root_j);
        let entry = trees.get_mut(&root).expect("tree entry for live state");
        entry.live -= 1;
        if !state.extended {
            let cand = PathCandidate {
                a_start: state.root_i,
                a_end: row_i,
                b_start: state.root_j,
                b_end: j,
                score: state.score,
                cost: state.cost,
                matched: state.matched,
            };
            let replace = match &entry.best {
                None => true,
                Some(b) => match cand.score.total_cmp(&b.score) {
                    std::cmp::Ordering::Greater => true,
                    std::cmp::Ordering::Less => false,
                    std::cmp::Ordering::Equal => match cand.matched.cmp(&b.matched) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => (cand.a_end, cand.b_end) < (b.a_end, b.b_end),
                    },
                },
            };
            if replace {
                entry.best = Some(cand);
            }
        }
        if entry.live == 0 {
            let winner = entry.best.take();
            trees.remove(&root);
            if let Some(w) = winner {
                if w.a_len() as usize >= p.min_length && w.b_len() as usize >= p.min_length {
                    out.push(w);
                }
            }
        }
    }
}

/// Re-derive the vertex chain of a candidate inside its bounding rectangle.
/// Runs the same dynamic program restricted to chains rooted at the
/// candidate's start, which reproduces the global parent choices.
pub(crate) fn trace_chain(
    vertices: &[Vertex],
    root: (u32, u32),
    terminal: (u32, u32),
    p: &AlignParams,
) -> Vec<(u32, u32)> {
    let g1 = (p.max_gap + 1) as u32;
    // position -> (score, cost, parent)
    let mut states: HashMap<(u32, u32), (f64, f64, Option<(u32, u32)>)> = HashMap::new();
    for v in vertices {
        if v.i < root.0 || v.j < root.1 || v.i > terminal.0 || v.j > terminal.1 {
            continue;
        }
        let pos = (v.i, v.j);
        let vc = v.cost as f64;
        if pos == root {
            if within_budget(vc, 1, 1, p) {
                states.insert(pos, (1.0 - vc, vc, None));
            }
            continue;
        }
        let mut best: Option<(f64, f64, (u32, u32))> = None;
        for di in 1..=g1.min(v.i - root.0) {
            for dj in 1..=g1.min(v.j - root.1) {
                let pp = (v.i - di, v.j - dj);
                let Some(&(score, cost, _)) = states.get(&pp) else {
                    continue;
                };
                let gap = (di - 1 + dj - 1) as f64;
                let ncost = cost + gap + vc;
                let len_a = (v.i - root.0 + 1) as usize;
                let len_b = (v.j - root.1 + 1) as usize;
                if !within_budget(ncost, len_a, len_b, p) {
                    continue;
                }
                let nscore = score + 1.0 - gap - vc;
                let take = match &best {
                    None => true,
                    Some(b) => match nscore.total_cmp(&b.0) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Less => false,
                        std::cmp::Ordering::Equal => pp > b.2,
                    },
                };
                if take {
                    best = Some((nscore, ncost, pp));
                }
            }
        }
        if let Some((nscore, ncost, pred)) = best {
            states.insert(pos, (nscore, ncost, Some(pred)));
        }
    }
    let mut chain = Vec::new();
    let mut cur = Some(terminal);
    while let Some(pos) = cur {
        chain.push(pos);
        cur = states
            .get(&pos)
            .unwrap_or_else(|| panic!("trace lost at {pos:?}"))
            .2;
    }
    chain.reverse();
    chain
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::graph::vertices_for_keys;

    fn params() -> AlignParams {
        AlignParams::default()
    }

    fn keys(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    fn run(a: &str, b: &str, p: &AlignParams) -> Vec<PathCandidate> {
        let va = keys(a);
        let vb = keys(b);
        let vertices = vertices_for_keys(&va, &vb, p, None::<&fn(&char, &char) -> f64>);
        chain_candidates(&vertices, p)
    }

    #[test]
    fn single_diagonal_is_one_full_path() {
        let p = AlignParams {
            error_budget: 0.0,
            ..params()
        };
        let cands = run("abcdefgh", "abcdefgh", &p);
        assert_eq!(cands.len(), 1);
        let c = cands[0];
        assert_eq!((c.a_start, c.a_end, c.b_start, c.b_end), (0, 7, 0, 7));
        assert_eq!(c.matched, 8);
        assert_eq!(c.cost, 0.0);
    }

    #[test]
    fn substitution_is_bridged_within_budget() {
        // One substituted position (x vs y) inside a 12-long diagonal. At
        // the bridging vertex the span is 9, so the cost-2 bridge fits the
        // default quarter budget.
        let cands = run("abcdefgxijkl", "abcdefgyijkl", &params());
        assert_eq!(cands.len(), 1, "cands: {cands:?}");
        let c = cands[0];
        assert_eq!((c.a_start, c.a_end), (0, 11));
        assert_eq!(c.matched, 11);
        assert_eq!(c.cost, 2.0);
    }

    #[test]
    fn early_substitution_exceeds_prefix_budget() {
        // The budget accrues with the span: a substitution two positions in
        // cannot be bridged, so the head fragment is cut off.
        let cands = run("abxdefghijkl", "abydefghijkl", &params());
        assert_eq!(cands.len(), 1, "cands: {cands:?}");
        assert_eq!((cands[0].a_start, cands[0].a_end), (3, 11));
    }

    #[test]
    fn zero_budget_splits_at_substitution() {
        let p = AlignParams {
            error_budget: 0.0,
            min_length: 2,
            ..params()
        };
        let cands = run("abcdefgxijkl", "abcdefgyijkl", &p);
        assert_eq!(cands.len(), 2, "cands: {cands:?}");
    }

    #[test]
    fn disjoint_diagonals_give_two_paths() {
        let p = AlignParams {
            min_length: 3,
            ..params()
        };
        // Shared blocks "abcd" and "wxyz" separated by unrelated filler
        // longer than the budget allows bridging.
        let cands = run("abcd0123456789wxyz", "abcdQRSTUVWXYZwxyz", &p);
        assert_eq!(cands.len(), 2, "cands: {cands:?}");
        assert_eq!((cands[0].a_start, cands[0].a_end), (0, 3));
        assert_eq!((cands[1].a_start, cands[1].a_end), (14, 17));
    }

    #[test]
    fn trace_reproduces_diagonal_with_gap() {
        let p = params();
        let va = keys("abcdefgxijkl");
        let vb = keys("abcdefgyijkl");
        let vertices = vertices_for_keys(&va, &vb, &p, None::<&fn(&char, &char) -> f64>);
        let cands = chain_candidates(&vertices, &p);
        let c = cands[0];
        let chain = trace_chain(&vertices, (c.a_start, c.b_start), (c.a_end, c.b_end), &p);
        assert_eq!(chain.len(), c.matched as usize);
        assert_eq!(chain[0], (0, 0));
        assert_eq!(chain[6], (6, 6));
        assert_eq!(chain[7], (8, 8)); // skips the substituted position
        assert_eq!(*chain.last().unwrap(), (11, 11));
    }

    #[test]
    fn window_eviction_handles_sparse_rows() {
        // Matches far apart in i must not chain (gap beyond the window).
        let p = AlignParams {
            min_length: 2,
            ..params()
        };
        let cands = run("ab000000cd", "ab111111cd", &p);
        assert_eq!(cands.len(), 2);
    }
}
