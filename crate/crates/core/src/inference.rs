//! Decoding pair scores into relation graphs.
//!
//! * [`greedy_decode`]: per-head argmax.
//! * [`decode_event_complex`]: subevent head first; a non-NoRel subevent
//!   label fixes the temporal label through [`implied_temprel`].
//! * [`global_decode`]: the highest-scoring assignment with zero table
//!   violations, found by depth-first branch-and-bound.

use alloc::vec::Vec;
use core::time::Duration;

use crate::losses::{directed_slot, PairScores};
use crate::math;
use crate::relations::{
    count_violations, implied_temprel, pair_count, pair_index, Head, RelationGraph,
    RelationLabel,
};

/// Default cap on events per exact decoding problem.
pub const DEFAULT_MAX_EVENTS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("{n} events exceed the exact-decoding cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("no consistent assignment exists")]
    Infeasible,
    #[error("expected {expected} directed pair scores, got {got}")]
    ScoreCount { expected: usize, got: usize },
}

/// Argmax within one head. Ties go to the earlier label in
/// BF < AF < EQ < VG and PC < CP < CR < NR.
pub fn greedy_decode(scores: &PairScores, head: Head) -> RelationLabel {
    let probs = scores.head(head);
    let mut best = 0;
    for k in 1..4 {
        if probs[k] > probs[best] {
            best = k;
        }
    }
    head.labels()[best]
}

/// Scores for every directed pair of a document's events.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodingProblem {
    n_events: usize,
    /// Indexed by [`directed_slot`].
    scores: Vec<PairScores>,
}

impl DecodingProblem {
    pub fn new(n_events: usize, scores: Vec<PairScores>) -> Result<Self, DecodeError> {
        let expected = n_events * n_events.saturating_sub(1);
        if scores.len() != expected {
            return Err(DecodeError::ScoreCount { expected, got: scores.len() });
        }
        Ok(DecodingProblem { n_events, scores })
    }

    pub fn n_events(&self) -> usize {
        self.n_events
    }

    pub fn scores(&self, i: usize, j: usize) -> &PairScores {
        &self.scores[directed_slot(self.n_events, i, j)]
    }

    /// Log-score of labelling canonical pair `(i, j)` with `(t, s)`, both
    /// directions counted: `ln p_ij(t) + ln p_ij(s) + ln p_ji(t') + ln p_ji(s')`
    /// where `'` is the inverse.
    pub fn pair_value(&self, i: usize, j: usize, t: RelationLabel, s: RelationLabel) -> f64 {
        let f = self.scores(i, j);
        let r = self.scores(j, i);
        math::ln(f.prob(t)) + math::ln(f.prob(s))
            + (math::ln(r.prob(t.inverse())) + math::ln(r.prob(s.inverse())))
    }

    /// Sum of [`Self::pair_value`] over canonical pairs, in canonical
    /// order. `None` if some pair lacks a label.
    pub fn objective(&self, g: &RelationGraph) -> Option<f64> {
        let mut total = 0.0;
        for (i, j, l) in g.pairs() {
            total += self.pair_value(i, j, l.temporal?, l.subevent?);
        }
        Some(total)
    }

    /// The sub-problem over a subset of events, in the given order.
    pub fn restrict(&self, events: &[usize]) -> DecodingProblem {
        let m = events.len();
        let mut scores = Vec::with_capacity(m * m.saturating_sub(1));
        for &a in events {
            for &b in events {
                if a != b {
                    scores.push(*self.scores(a, b));
                }
            }
        }
        DecodingProblem { n_events: m, scores }
    }
}

/// Subevent-priority assembly of both heads for every canonical pair.
pub fn decode_event_complex(problem: &DecodingProblem) -> RelationGraph {
    let n = problem.n_events();
    let mut g = RelationGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let s = problem.scores(i, j);
            let sub = greedy_decode(s, Head::Subevent);
            let temp = implied_temprel(sub).unwrap_or_else(|| greedy_decode(s, Head::Temporal));
            g.set(i, j, sub);
            g.set(i, j, temp);
        }
    }
    g
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DecodeStats {
    pub objective: f64,
    pub nodes_expanded: u64,
    /// Measured only when built with the `std` feature.
    pub wall_time: Option<Duration>,
    pub violations: usize,
}

/// `(temporal, subevent)` assignments allowed on a single pair: any
/// temporal label next to NoRel, otherwise the implied temporal label.
pub fn coherent_assignments() -> Vec<(RelationLabel, RelationLabel)> {
    let mut out = Vec::with_capacity(7);
    for s in RelationLabel::SUBEVENT {
        match implied_temprel(s) {
            Some(t) => out.push((t, s)),
            None => out.extend(RelationLabel::TEMPORAL.map(|t| (t, s))),
        }
    }
    out
}

/// For a canonical triangle `a < b < c` with candidate indices on
/// `(a,b)`, `(a,c)`, `(b,c)`: which third candidates are consistent
/// given the other two, as bitmasks over [`coherent_assignments`].
struct Triangles {
    ab: [[u8; 7]; 7],
    ac: [[u8; 7]; 7],
    bc: [[u8; 7]; 7],
}

impl Triangles {
    fn build(options: &[(RelationLabel, RelationLabel)]) -> Triangles {
        let mut t = Triangles { ab: [[0; 7]; 7], ac: [[0; 7]; 7], bc: [[0; 7]; 7] };
        for x in 0..7 {
            for y in 0..7 {
                for z in 0..7 {
                    let mut g = RelationGraph::new(3);
                    for (i, j, c) in [(0, 1, x), (0, 2, y), (1, 2, z)] {
                        g.set(i, j, options[c].0);
                        g.set(i, j, options[c].1);
                    }
                    if count_violations(&g).violating_triples == 0 {
                        t.ab[y][z] |= 1 << x;
                        t.ac[x][z] |= 1 << y;
                        t.bc[x][y] |= 1 << z;
                    }
                }
            }
        }
        t
    }
}

struct Search<'a> {
    n: usize,
    pairs: Vec<(usize, usize)>,
    /// Pair indices in branching order.
    sequence: Vec<usize>,
    /// `values[p][c]`: objective contribution of candidate `c` on pair `p`.
    values: Vec<[f64; 7]>,
    /// Candidate indices per pair, best first.
    order: Vec<[u8; 7]>,
    triangles: &'a Triangles,
    /// Candidates still consistent with the assigned pairs.
    domain: Vec<u8>,
    /// Best value inside `domain`, per pair.
    top: Vec<f64>,
    /// Sum of `top` over unassigned pairs.
    future: f64,
    assigned: Vec<u8>,
    /// Edge-disjoint triangles as pair indices `(ab, ac, bc)`.
    packing: Vec<[usize; 3]>,
    /// Consistent candidate triples per packed triangle with their
    /// summed value, best first.
    completions: Vec<Vec<(f64, u8, u8, u8)>>,
    /// Pairs outside every packed triangle.
    loose: Vec<usize>,
    trail: Vec<(usize, u8, f64)>,
    best: f64,
    best_assignment: Vec<u8>,
    nodes: u64,
}

const UNASSIGNED: u8 = u8::MAX;

impl Search<'_> {
    fn top_of(&self, p: usize, domain: u8) -> f64 {
        for &c in &self.order[p] {
            if domain & (1 << c) != 0 {
                return self.values[p][c as usize];
            }
        }
        f64::NEG_INFINITY
    }

    fn live(&self, p: usize) -> u8 {
        match self.assigned[p] {
            UNASSIGNED => self.domain[p],
            c => 1 << c,
        }
    }

    /// Upper bound on the unassigned pairs' total: each packed triangle
    /// contributes its best consistent completion, loose pairs their best
    /// surviving candidate.
    fn bound(&self) -> f64 {
        let mut total = 0.0;
        for &p in &self.loose {
            if self.assigned[p] == UNASSIGNED {
                total += self.top[p];
            }
        }
        for (t, &[ab, ac, bc]) in self.packing.iter().enumerate() {
            let (da, dc, db) = (self.live(ab), self.live(ac), self.live(bc));
            // Completions are sorted, so the first one that fits is the best.
            let Some(&(v, x, y, z)) = self.completions[t]
                .iter()
                .find(|&&(_, x, y, z)| da & (1 << x) != 0 && dc & (1 << y) != 0 && db & (1 << z) != 0)
            else {
                return f64::NEG_INFINITY;
            };
            let mut fixed = 0.0;
            for (q, c) in [(ab, x), (ac, y), (bc, z)] {
                if self.assigned[q] != UNASSIGNED {
                    fixed += self.values[q][c as usize];
                }
            }
            total += v - fixed;
        }
        total
    }

    /// Narrows the domain of pair `q`. False if it becomes empty.
    fn restrict(&mut self, q: usize, mask: u8) -> bool {
        let old = self.domain[q];
        let new = old & mask;
        if new == old {
            return true;
        }
        if new == 0 {
            return false;
        }
        let old_top = self.top[q];
        self.trail.push((q, old, old_top));
        self.domain[q] = new;
        self.top[q] = self.top_of(q, new);
        self.future += self.top[q] - old_top;
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (q, dom, top) = self.trail.pop().unwrap();
            self.future += top - self.top[q];
            self.domain[q] = dom;
            self.top[q] = top;
        }
    }

    /// Filters pairs that close a triangle with the just-assigned pair `p`.
    fn propagate(&mut self, p: usize) -> bool {
        let (i, j) = self.pairs[p];
        let x = self.assigned[p];
        for k in 0..self.n {
            if k == i || k == j {
                continue;
            }
            let (q1, q2) = (canonical(self.n, i, k), canonical(self.n, j, k));
            let (a1, a2) = (self.assigned[q1], self.assigned[q2]);
            let (target, mask) = match (a1 == UNASSIGNED, a2 == UNASSIGNED) {
                (false, true) => (q2, self.third_mask(i, j, k, x, a1, true)),
                (true, false) => (q1, self.third_mask(i, j, k, x, a2, false)),
                _ => continue,
            };
            if !self.restrict(target, mask) {
                return false;
            }
        }
        true
    }

    /// Allowed candidates for the unknown pair of triangle `{i, j, k}`
    /// given `x` on `(i, j)` and `y` on `(i, k)` (`known_ik`) or `(j, k)`.
    fn third_mask(&self, i: usize, j: usize, k: usize, x: u8, y: u8, known_ik: bool) -> u8 {
        let t = self.triangles;
        let (x, y) = (x as usize, y as usize);
        // Sorted positions: i < j always; k falls before, between or after.
        match (k < i, k < j, known_ik) {
            // k < i < j: pairs (k,i)=ab, (k,j)=ac, (i,j)=bc.
            (true, _, true) => t.ac[y][x],
            (true, _, false) => t.ab[y][x],
            // i < k < j: (i,k)=ab, (i,j)=ac, (k,j)=bc.
            (false, true, true) => t.bc[y][x],
            (false, true, false) => t.ab[x][y],
            // i < j < k: (i,j)=ab, (i,k)=ac, (j,k)=bc.
            (false, false, true) => t.bc[x][y],
            (false, false, false) => t.ac[x][y],
        }
    }

    fn run(&mut self, depth: usize, current: f64) {
        self.nodes += 1;
        if depth == self.sequence.len() {
            if current > self.best {
                self.best = current;
                self.best_assignment.clone_from(&self.assigned);
            }
            return;
        }
        let p = self.sequence[depth];
        let slack = 1e-9 * (1.0 + self.best.abs());
        self.future -= self.top[p];
        let domain = self.domain[p];
        for idx in 0..7 {
            let c = self.order[p][idx];
            if domain & (1 << c) == 0 {
                continue;
            }
            let v = self.values[p][c as usize];
            if current + v + self.future < self.best - slack {
                // Values are sorted, so no later candidate can do better.
                break;
            }
            self.assigned[p] = c;
            let mark = self.trail.len();
            if self.propagate(p) && current + v + self.bound() >= self.best - slack {
                self.run(depth + 1, current + v);
            }
            self.undo(mark);
        }
        self.assigned[p] = UNASSIGNED;
        self.future += self.top[p];
    }
}

fn canonical(n: usize, a: usize, b: usize) -> usize {
    if a < b {
        pair_index(n, a, b)
    } else {
        pair_index(n, b, a)
    }
}

/// Exact consistent decoding of one problem of at most `max_events` events.
///
/// Maximises [`DecodingProblem::objective`] subject to zero table
/// violations and subevent/temporal coherence. Pairs are branched in
/// canonical order, values in descending score. Each assignment prunes the
/// candidates of pairs that close a triangle with it, and the bound adds
/// each remaining pair's best surviving candidate.
pub fn global_decode(
    problem: &DecodingProblem,
    max_events: usize,
) -> Result<(RelationGraph, DecodeStats), DecodeError> {
    let n = problem.n_events();
    if n > max_events {
        return Err(DecodeError::CapExceeded { n, cap: max_events });
    }
    #[cfg(feature = "std")]
    let started = std::time::Instant::now();

    let options = coherent_assignments();
    let triangles = Triangles::build(&options);
    let m = pair_count(n);
    let mut pairs = Vec::with_capacity(m);
    let mut values = Vec::with_capacity(m);
    let mut order = Vec::with_capacity(m);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
            let mut v = [0.0; 7];
            for (c, &(t, s)) in options.iter().enumerate() {
                v[c] = problem.pair_value(i, j, t, s);
            }
            let mut o = [0, 1, 2, 3, 4, 5, 6];
            o.sort_by(|&a, &b| v[b as usize].total_cmp(&v[a as usize]));
            values.push(v);
            order.push(o);
        }
    }
    let top: Vec<f64> = values.iter().zip(&order).map(|(v, o)| v[o[0] as usize]).collect();

    // All (VG, NR) never violates the table and seeds the incumbent.
    let fallback = options
        .iter()
        .position(|&o| o == (RelationLabel::Vague, RelationLabel::NoRel))
        .expect("VG/NR is coherent") as u8;
    if triangles.bc[fallback as usize][fallback as usize] & (1 << fallback) == 0 {
        return Err(DecodeError::Infeasible);
    }
    let mut seed_value = 0.0;
    for v in &values {
        seed_value += v[fallback as usize];
    }

    let sequence: Vec<usize> = (0..m).collect();
    let mut used = alloc::vec![false; m];
    let mut packing = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let tri = [pair_index(n, a, b), pair_index(n, a, c), pair_index(n, b, c)];
                if tri.iter().all(|&q| !used[q]) {
                    tri.iter().for_each(|&q| used[q] = true);
                    packing.push(tri);
                }
            }
        }
    }
    let loose = (0..m).filter(|&q| !used[q]).collect();
    let completions = packing
        .iter()
        .map(|&[ab, ac, bc]| {
            let mut list = Vec::new();
            for x in 0..7u8 {
                for y in 0..7u8 {
                    let mask = triangles.bc[x as usize][y as usize];
                    for z in (0..7u8).filter(|z| mask & (1 << z) != 0) {
                        let v = values[ab][x as usize] + values[ac][y as usize] + values[bc][z as usize];
                        list.push((v, x, y, z));
                    }
                }
            }
            list.sort_by(|a, b| b.0.total_cmp(&a.0));
            list
        })
        .collect();

    let mut search = Search {
        n,
        pairs,
        sequence,
        future: top.iter().sum(),
        values,
        order,
        triangles: &triangles,
        domain: alloc::vec![0x7f; m],
        top,
        assigned: alloc::vec![UNASSIGNED; m],
        packing,
        completions,
        loose,
        trail: Vec::new(),
        best: seed_value,
        best_assignment: alloc::vec![fallback; m],
        nodes: 0,
    };
    search.run(0, 0.0);

    let mut graph = RelationGraph::new(n);
    for (p, &(i, j)) in search.pairs.iter().enumerate() {
        let (t, s) = options[search.best_assignment[p] as usize];
        graph.set(i, j, t);
        graph.set(i, j, s);
    }
    let objective = problem.objective(&graph).expect("complete graph");
    let violations = count_violations(&graph).violating_triples;
    #[cfg(feature = "std")]
    let wall_time = Some(started.elapsed());
    #[cfg(not(feature = "std"))]
    let wall_time = None;
    Ok((
        graph,
        DecodeStats { objective, nodes_expanded: search.nodes, wall_time, violations },
    ))
}

/// Global decoding for documents of any size.
///
/// Up to `window` events are solved exactly. Larger documents are covered
/// by windows of `window` consecutive events with 50% overlap; a pair
/// covered by several windows takes its labels from the window with the
/// highest objective, and pairs no window covers fall back to
/// [`decode_event_complex`]. Consistency is only guaranteed inside each
/// window.
pub fn global_decode_windowed(
    problem: &DecodingProblem,
    window: usize,
) -> Result<(RelationGraph, DecodeStats), DecodeError> {
    let n = problem.n_events();
    if n <= window {
        return global_decode(problem, window);
    }
    assert!(window >= 2, "window must hold at least one pair");
    let stride = (window / 2).max(1);
    let mut starts: Vec<usize> = (0..=n - window).step_by(stride).collect();
    if *starts.last().unwrap() != n - window {
        starts.push(n - window);
    }
    let mut out = decode_event_complex(problem);
    let mut owner = alloc::vec![f64::NEG_INFINITY; pair_count(n)];
    let mut nodes = 0;
    let mut wall = Duration::ZERO;
    let mut timed = false;
    for s in starts {
        let events: Vec<usize> = (s..s + window).collect();
        let (g, st) = global_decode(&problem.restrict(&events), window)?;
        nodes += st.nodes_expanded;
        if let Some(t) = st.wall_time {
            wall += t;
            timed = true;
        }
        for (a, b, l) in g.pairs() {
            let (i, j) = (events[a], events[b]);
            let k = pair_index(n, i, j);
            if st.objective > owner[k] {
                owner[k] = st.objective;
                out.set(i, j, l.temporal.unwrap());
                out.set(i, j, l.subevent.unwrap());
            }
        }
    }
    let objective = problem.objective(&out).expect("complete graph");
    let violations = count_violations(&out).violating_triples;
    Ok((
        out,
        DecodeStats {
            objective,
            nodes_expanded: nodes,
            wall_time: timed.then_some(wall),
            violations,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::RelationLabel::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dist(rng: &mut ChaCha8Rng, sharp: f64) -> [f64; 4] {
        let mut v = [0.0; 4];
        for x in &mut v {
            *x = math::exp(sharp * rng.gen::<f64>());
        }
        let s: f64 = v.iter().sum();
        v.map(|x| x / s)
    }

    fn random_problem(n: usize, seed: u64) -> DecodingProblem {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scores = (0..n * (n - 1))
            .map(|_| PairScores { temporal: dist(&mut rng, 4.0), subevent: dist(&mut rng, 4.0) })
            .collect();
        DecodingProblem::new(n, scores).unwrap()
    }

    /// Brute force over every coherent assignment of every pair.
    fn exhaustive_best(problem: &DecodingProblem) -> f64 {
        let n = problem.n_events();
        let opts = coherent_assignments();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let mut choice = alloc::vec![0usize; pairs.len()];
        let mut best = f64::NEG_INFINITY;
        loop {
            let mut g = RelationGraph::new(n);
            for (p, &(i, j)) in pairs.iter().enumerate() {
                g.set(i, j, opts[choice[p]].0);
                g.set(i, j, opts[choice[p]].1);
            }
            let v = problem.objective(&g).unwrap();
            if v > best && count_violations(&g).violating_triples == 0 {
                best = v;
            }
            let mut k = 0;
            loop {
                if k == pairs.len() {
                    return best;
                }
                choice[k] += 1;
                if choice[k] < opts.len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn greedy_examples() {
        let s = PairScores { temporal: [0.7, 0.1, 0.1, 0.1], subevent: [0.1, 0.2, 0.3, 0.4] };
        assert_eq!(greedy_decode(&s, Head::Temporal), Before);
        assert_eq!(greedy_decode(&s, Head::Subevent), NoRel);
        assert_eq!(greedy_decode(&PairScores::uniform(), Head::Temporal), Before);
        assert_eq!(greedy_decode(&PairScores::uniform(), Head::Subevent), ParentChild);
    }

    #[test]
    fn subevent_priority() {
        let s = |t: [f64; 4], h: [f64; 4]| PairScores { temporal: t, subevent: h };
        let pc = s([0.1, 0.7, 0.1, 0.1], [0.7, 0.1, 0.1, 0.1]);
        let nr = s([0.1, 0.7, 0.1, 0.1], [0.1, 0.1, 0.1, 0.7]);
        let cr = s([0.7, 0.1, 0.1, 0.1], [0.1, 0.1, 0.7, 0.1]);
        for (scores, want) in [(pc, (Before, ParentChild)), (nr, (After, NoRel)), (cr, (Equal, Coref))] {
            let p = DecodingProblem::new(2, alloc::vec![scores, scores.mirrored()]).unwrap();
            let g = decode_event_complex(&p);
            assert_eq!(g.labels(0, 1), crate::relations::PairLabels::new(want.0, want.1));
        }
    }

    #[test]
    fn two_events_match_greedy_when_peaked() {
        let f = PairScores { temporal: [0.9, 0.05, 0.03, 0.02], subevent: [0.02, 0.03, 0.05, 0.9] };
        let p = DecodingProblem::new(2, alloc::vec![f, f.mirrored()]).unwrap();
        let (g, stats) = global_decode(&p, DEFAULT_MAX_EVENTS).unwrap();
        assert_eq!(g, decode_event_complex(&p));
        assert_eq!(stats.violations, 0);
    }

    #[test]
    fn uniform_scores_objective() {
        let n = 4;
        let p = DecodingProblem::new(n, alloc::vec![PairScores::uniform(); n * (n - 1)]).unwrap();
        let (g, stats) = global_decode(&p, DEFAULT_MAX_EVENTS).unwrap();
        assert_eq!(count_violations(&g).violating_triples, 0);
        let expected = math::ln(0.25) * 2.0 * (n * (n - 1)) as f64;
        assert!((stats.objective - expected).abs() < 1e-9);
    }

    #[test]
    fn fixes_inconsistent_greedy_output() {
        // BF(0,1), BF(1,2) confidently, AF(0,2) mildly: greedy violates BF∘BF→BF.
        let bf = PairScores { temporal: [0.9, 0.04, 0.03, 0.03], subevent: [0.02, 0.02, 0.02, 0.94] };
        let af = PairScores { temporal: [0.3, 0.5, 0.1, 0.1], subevent: [0.02, 0.02, 0.02, 0.94] };
        let mut scores = alloc::vec![PairScores::uniform(); 6];
        for (i, j, s) in [(0, 1, bf), (1, 2, bf), (0, 2, af)] {
            scores[directed_slot(3, i, j)] = s;
            scores[directed_slot(3, j, i)] = s.mirrored();
        }
        let p = DecodingProblem::new(3, scores).unwrap();
        let greedy = decode_event_complex(&p);
        assert!(count_violations(&greedy).violating_triples > 0);
        let (g, stats) = global_decode(&p, DEFAULT_MAX_EVENTS).unwrap();
        assert_eq!(stats.violations, 0);
        assert_eq!(stats.objective, exhaustive_best(&p));
        assert_eq!(g.get(0, 2, Head::Temporal), Some(Before));
    }

    #[test]
    fn matches_exhaustive_search() {
        for seed in 0..14 {
            let n = 2 + (seed as usize % 3);
            let p = random_problem(n, seed);
            let (g, stats) = global_decode(&p, DEFAULT_MAX_EVENTS).unwrap();
            assert_eq!(stats.violations, 0);
            assert_eq!(stats.objective, exhaustive_best(&p), "seed {seed}");
            assert_eq!(p.objective(&g), Some(stats.objective));
        }
    }

    #[test]
    fn cap_is_enforced() {
        let p = random_problem(5, 1);
        assert_eq!(global_decode(&p, 4).unwrap_err(), DecodeError::CapExceeded { n: 5, cap: 4 });
        let (g, stats) = global_decode_windowed(&p, 4).unwrap();
        assert!(g.is_complete());
        assert!(stats.nodes_expanded > 0);
    }

    #[test]
    fn global_not_worse_than_consistent_greedy() {
        for seed in 20..30 {
            let p = random_problem(5, seed);
            let greedy = decode_event_complex(&p);
            let (_, stats) = global_decode(&p, DEFAULT_MAX_EVENTS).unwrap();
            if count_violations(&greedy).violating_triples == 0 {
                assert!(stats.objective >= p.objective(&greedy).unwrap());
            }
        }
    }
}
