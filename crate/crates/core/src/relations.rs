//! Relation algebra over the joint temporal/subevent label space.
//!
//! Eight labels split into two heads. Temporal labels order two events by
//! their starting time; subevent labels describe membership in an event
//! hierarchy. Every pair of events carries at most one label per head.
//!
//! The conjunction rules live in [`induce`]: given `alpha(e1, e2)` and
//! `beta(e2, e3)` the table lists the labels that must hold on `(e1, e3)`
//! and the labels that must not. The table is stored as transcribed data,
//! rows and columns in the order PC, CP, CR, NR, BF, AF, EQ, VG.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

/// Which of the two classification heads a label belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Head {
    Temporal,
    Subevent,
}

impl Head {
    pub const ALL: [Head; 2] = [Head::Temporal, Head::Subevent];

    /// The four labels of this head, in tie-break order.
    pub fn labels(self) -> [RelationLabel; 4] {
        match self {
            Head::Temporal => RelationLabel::TEMPORAL,
            Head::Subevent => RelationLabel::SUBEVENT,
        }
    }

    /// The label standing for "nothing to report" on this head.
    pub fn null_label(self) -> RelationLabel {
        match self {
            Head::Temporal => RelationLabel::Vague,
            Head::Subevent => RelationLabel::NoRel,
        }
    }
}

/// One of the eight event-event relations.
///
/// The discriminant doubles as the position inside an 8-wide score vector:
/// temporal labels occupy 0..4, subevent labels 4..8.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum RelationLabel {
    Before = 0,
    After = 1,
    Equal = 2,
    Vague = 3,
    ParentChild = 4,
    ChildParent = 5,
    Coref = 6,
    NoRel = 7,
}

use RelationLabel::*;

impl RelationLabel {
    pub const ALL: [RelationLabel; 8] = [
        Before,
        After,
        Equal,
        Vague,
        ParentChild,
        ChildParent,
        Coref,
        NoRel,
    ];
    pub const TEMPORAL: [RelationLabel; 4] = [Before, After, Equal, Vague];
    pub const SUBEVENT: [RelationLabel; 4] = [ParentChild, ChildParent, Coref, NoRel];

    /// Position in the 8-wide score layout.
    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    /// Position within the label's own head (0..4).
    #[inline]
    pub fn head_index(self) -> usize {
        self as usize & 3
    }

    pub fn from_index(index: usize) -> Option<RelationLabel> {
        Self::ALL.get(index).copied()
    }

    pub fn head(self) -> Head {
        if (self as u8) < 4 {
            Head::Temporal
        } else {
            Head::Subevent
        }
    }

    /// The converse relation, read from the other event's side.
    pub fn inverse(self) -> RelationLabel {
        match self {
            Before => After,
            After => Before,
            ParentChild => ChildParent,
            ChildParent => ParentChild,
            Equal | Vague | Coref | NoRel => self,
        }
    }

    /// Two-letter code used in every file format and in CLI output.
    pub fn code(self) -> &'static str {
        match self {
            Before => "BF",
            After => "AF",
            Equal => "EQ",
            Vague => "VG",
            ParentChild => "PC",
            ChildParent => "CP",
            Coref => "CR",
            NoRel => "NR",
        }
    }

    pub fn from_code(code: &str) -> Option<RelationLabel> {
        Self::ALL.into_iter().find(|l| l.code() == code)
    }
}

impl fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown relation code {0:?}")]
pub struct UnknownLabel(pub alloc::string::String);

impl FromStr for RelationLabel {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_code(s).ok_or_else(|| UnknownLabel(s.into()))
    }
}

/// Free function form of [`RelationLabel::inverse`].
pub fn inverse(label: RelationLabel) -> RelationLabel {
    label.inverse()
}

/// Subevent relations other than NoRel fix the temporal relation of the
/// pair: a parent starts before its children, coreferent mentions start
/// together.
pub fn implied_temprel(subevent: RelationLabel) -> Option<RelationLabel> {
    match subevent {
        ParentChild => Some(Before),
        ChildParent => Some(After),
        Coref => Some(Equal),
        NoRel => None,
        _ => None,
    }
}

/// A set of labels stored as an 8-bit mask.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct LabelSet(u8);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub const fn of(labels: &[RelationLabel]) -> LabelSet {
        let mut bits = 0u8;
        let mut i = 0;
        while i < labels.len() {
            bits |= 1 << labels[i] as u8;
            i += 1;
        }
        LabelSet(bits)
    }

    pub fn contains(self, label: RelationLabel) -> bool {
        self.0 & (1 << label as u8) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn intersection(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 & other.0)
    }

    pub fn insert(&mut self, label: RelationLabel) {
        self.0 |= 1 << label as u8;
    }

    pub fn iter(self) -> impl Iterator<Item = RelationLabel> {
        RelationLabel::ALL.into_iter().filter(move |l| self.contains(*l))
    }

    pub fn map_inverse(self) -> LabelSet {
        let mut out = LabelSet::EMPTY;
        for l in self.iter() {
            out.insert(l.inverse());
        }
        out
    }
}

impl fmt::Debug for LabelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Deductions for `(e1, e3)` from `alpha(e1, e2)` and `beta(e2, e3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct InductionEntry {
    pub required: LabelSet,
    pub forbidden: LabelSet,
}

impl InductionEntry {
    pub fn is_empty(&self) -> bool {
        self.required.is_empty() && self.forbidden.is_empty()
    }
}

const fn cell(required: &[RelationLabel], forbidden: &[RelationLabel]) -> InductionEntry {
    InductionEntry {
        required: LabelSet::of(required),
        forbidden: LabelSet::of(forbidden),
    }
}

const NC: InductionEntry = cell(&[], &[]);

/// Row/column order of [`INDUCTION_TABLE`].
pub const TABLE_ORDER: [RelationLabel; 8] = [
    ParentChild,
    ChildParent,
    Coref,
    NoRel,
    Before,
    After,
    Equal,
    Vague,
];

/// The conjunction induction table, `INDUCTION_TABLE[row(alpha)][col(beta)]`,
/// with rows and columns in [`TABLE_ORDER`]. `NC` marks cells without
/// constraints.
#[rustfmt::skip]
pub const INDUCTION_TABLE: [[InductionEntry; 8]; 8] = [
    // alpha = PC
    [
        cell(&[ParentChild], &[After]),              // PC
        NC,                                          // CP
        cell(&[ParentChild], &[After]),              // CR
        cell(&[], &[ChildParent, Coref]),            // NR
        cell(&[Before], &[ChildParent, Coref]),      // BF
        NC,                                          // AF
        cell(&[Before], &[ChildParent, Coref]),      // EQ
        NC,                                          // VG
    ],
    // alpha = CP
    [
        NC,
        cell(&[ChildParent], &[Before]),
        cell(&[ChildParent], &[Before]),
        cell(&[], &[ParentChild, Coref]),
        NC,
        cell(&[After], &[ParentChild, Coref]),
        cell(&[After], &[ParentChild, Coref]),
        NC,
    ],
    // alpha = CR
    [
        cell(&[ParentChild], &[After]),
        cell(&[ChildParent], &[Before]),
        cell(&[Coref, Equal], &[]),
        cell(&[NoRel], &[]),
        cell(&[Before], &[ChildParent, Coref]),
        cell(&[After], &[ParentChild, Coref]),
        cell(&[Equal], &[]),
        cell(&[Vague], &[]),
    ],
    // alpha = NR
    [
        cell(&[], &[ChildParent, Coref]),
        cell(&[], &[ParentChild, Coref]),
        cell(&[NoRel], &[]),
        NC,
        NC,
        NC,
        NC,
        NC,
    ],
    // alpha = BF
    [
        cell(&[Before], &[ChildParent, Coref]),
        NC,
        cell(&[Before], &[ChildParent, Coref]),
        NC,
        cell(&[Before], &[ChildParent, Coref]),
        NC,
        cell(&[Before], &[ChildParent, Coref]),
        cell(&[], &[After, Equal]),
    ],
    // alpha = AF
    [
        NC,
        cell(&[After], &[ParentChild, Coref]),
        cell(&[After], &[ParentChild, Coref]),
        NC,
        NC,
        cell(&[After], &[ParentChild, Coref]),
        cell(&[After], &[ParentChild, Coref]),
        cell(&[], &[Before, Equal]),
    ],
    // alpha = EQ
    [
        cell(&[], &[After]),
        cell(&[], &[Before]),
        cell(&[Equal], &[]),
        NC,
        cell(&[Before], &[ChildParent, Coref]),
        cell(&[After], &[ParentChild, Coref]),
        cell(&[Equal], &[]),
        cell(&[Vague], &[Coref]),
    ],
    // alpha = VG
    [
        NC,
        NC,
        cell(&[Vague], &[Coref]),
        NC,
        cell(&[], &[After, Equal]),
        cell(&[], &[Before, Equal]),
        cell(&[Vague], &[]),
        NC,
    ],
];

/// Position of `label` in [`TABLE_ORDER`].
pub fn table_position(label: RelationLabel) -> usize {
    match label {
        ParentChild => 0,
        ChildParent => 1,
        Coref => 2,
        NoRel => 3,
        Before => 4,
        After => 5,
        Equal => 6,
        Vague => 7,
    }
}

/// Table lookup for `alpha(e1, e2) ∧ beta(e2, e3)`.
pub fn induce(alpha: RelationLabel, beta: RelationLabel) -> InductionEntry {
    INDUCTION_TABLE[table_position(alpha)][table_position(beta)]
}

/// Labels of one event pair, one optional slot per head.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PairLabels {
    pub temporal: Option<RelationLabel>,
    pub subevent: Option<RelationLabel>,
}

impl PairLabels {
    pub fn new(temporal: RelationLabel, subevent: RelationLabel) -> Self {
        debug_assert_eq!(temporal.head(), Head::Temporal);
        debug_assert_eq!(subevent.head(), Head::Subevent);
        PairLabels {
            temporal: Some(temporal),
            subevent: Some(subevent),
        }
    }

    pub fn get(&self, head: Head) -> Option<RelationLabel> {
        match head {
            Head::Temporal => self.temporal,
            Head::Subevent => self.subevent,
        }
    }

    pub fn slot_mut(&mut self, head: Head) -> &mut Option<RelationLabel> {
        match head {
            Head::Temporal => &mut self.temporal,
            Head::Subevent => &mut self.subevent,
        }
    }

    /// The same labels read in the opposite direction.
    pub fn inverse(&self) -> PairLabels {
        PairLabels {
            temporal: self.temporal.map(RelationLabel::inverse),
            subevent: self.subevent.map(RelationLabel::inverse),
        }
    }

    pub fn labels(&self) -> impl Iterator<Item = RelationLabel> {
        self.temporal.into_iter().chain(self.subevent)
    }

    pub fn is_empty(&self) -> bool {
        self.temporal.is_none() && self.subevent.is_none()
    }
}

/// What a violated table cell demanded of `(e1, e3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Deduction {
    Required(RelationLabel),
    Forbidden(RelationLabel),
}

impl Deduction {
    pub fn label(self) -> RelationLabel {
        match self {
            Deduction::Required(l) | Deduction::Forbidden(l) => l,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Violation {
    pub alpha: RelationLabel,
    pub beta: RelationLabel,
    pub deduction: Deduction,
    /// The label found on `(e1, e3)` for the deduction's head.
    pub found: RelationLabel,
}

/// Checks one ordered triple against the table.
///
/// Every head combination of `labels_12 × labels_23` is looked up. A
/// deduction is only checked when `labels_13` carries a label on that
/// head; absent labels are neither consistent nor violating.
pub fn check_triple(
    labels_12: &PairLabels,
    labels_23: &PairLabels,
    labels_13: &PairLabels,
) -> Vec<Violation> {
    let mut out = Vec::new();
    for_each_violation(labels_12, labels_23, labels_13, |v| out.push(v));
    out
}

fn for_each_violation(
    labels_12: &PairLabels,
    labels_23: &PairLabels,
    labels_13: &PairLabels,
    mut sink: impl FnMut(Violation),
) {
    for alpha in labels_12.labels() {
        for beta in labels_23.labels() {
            let entry = induce(alpha, beta);
            for r in entry.required.iter() {
                if let Some(found) = labels_13.get(r.head()) {
                    if found != r {
                        sink(Violation {
                            alpha,
                            beta,
                            deduction: Deduction::Required(r),
                            found,
                        });
                    }
                }
            }
            for f in entry.forbidden.iter() {
                if labels_13.get(f.head()) == Some(f) {
                    sink(Violation {
                        alpha,
                        beta,
                        deduction: Deduction::Forbidden(f),
                        found: f,
                    });
                }
            }
        }
    }
}

fn triple_is_consistent(l12: &PairLabels, l23: &PairLabels, l13: &PairLabels) -> bool {
    let mut ok = true;
    for_each_violation(l12, l23, l13, |_| ok = false);
    ok
}

/// Index of canonical pair `(i, j)`, `i < j`, in row-major upper-triangle
/// order: (0,1), (0,2), …, (0,n-1), (1,2), …
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Events plus per-pair labels. Only the canonical orientation `(i, j)`,
/// `i < j`, is stored; the other direction is materialised through
/// [`RelationLabel::inverse`] on read.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelationGraph {
    n_events: usize,
    edges: Vec<PairLabels>,
}

impl RelationGraph {
    pub fn new(n_events: usize) -> Self {
        RelationGraph {
            n_events,
            edges: alloc::vec![PairLabels::default(); pair_count(n_events)],
        }
    }

    pub fn n_events(&self) -> usize {
        self.n_events
    }

    /// Labels of the directed pair `(i, j)`, either orientation.
    pub fn labels(&self, i: usize, j: usize) -> PairLabels {
        assert!(i != j, "self pair ({i}, {i})");
        if i < j {
            self.edges[pair_index(self.n_events, i, j)]
        } else {
            self.edges[pair_index(self.n_events, j, i)].inverse()
        }
    }

    pub fn get(&self, i: usize, j: usize, head: Head) -> Option<RelationLabel> {
        self.labels(i, j).get(head)
    }

    /// Sets the label of `(i, j)` on the label's head, overwriting.
    pub fn set(&mut self, i: usize, j: usize, label: RelationLabel) {
        assert!(i != j, "self pair ({i}, {i})");
        let (a, b, l) = if i < j { (i, j, label) } else { (j, i, label.inverse()) };
        let idx = pair_index(self.n_events, a, b);
        *self.edges[idx].slot_mut(l.head()) = Some(l);
    }

    pub fn clear(&mut self, i: usize, j: usize, head: Head) {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        let idx = pair_index(self.n_events, a, b);
        *self.edges[idx].slot_mut(head) = None;
    }

    /// Canonical pairs with their stored labels, including unlabeled ones.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, PairLabels)> + '_ {
        let n = self.n_events;
        (0..n)
            .flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
            .zip(self.edges.iter().copied())
            .map(|((i, j), l)| (i, j, l))
    }

    /// Canonical pairs carrying at least one label.
    pub fn labeled_pairs(&self) -> impl Iterator<Item = (usize, usize, PairLabels)> + '_ {
        self.pairs().filter(|(_, _, l)| !l.is_empty())
    }

    pub fn label_count(&self) -> usize {
        self.edges
            .iter()
            .map(|l| l.temporal.is_some() as usize + l.subevent.is_some() as usize)
            .sum()
    }

    /// True if every pair carries a label on both heads.
    pub fn is_complete(&self) -> bool {
        self.edges
            .iter()
            .all(|l| l.temporal.is_some() && l.subevent.is_some())
    }

    /// Whether every label of `self` is also present, unchanged, in `other`.
    pub fn is_subgraph_of(&self, other: &RelationGraph) -> bool {
        self.n_events == other.n_events
            && self.edges.iter().zip(&other.edges).all(|(a, b)| {
                a.temporal.is_none_or(|t| b.temporal == Some(t))
                    && a.subevent.is_none_or(|s| b.subevent == Some(s))
            })
    }
}

/// A defect found by [`algebra_self_check`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgebraIssue {
    /// `inverse` is not an involution on this label, or changes its head.
    Inverse(RelationLabel),
    /// A cell both requires and forbids a label.
    Overlap(RelationLabel, RelationLabel),
    /// A cell requires two labels of one head.
    DoubleRequirement(RelationLabel, RelationLabel),
    /// Cell `(α, β)` and its mirror `(inverse β, inverse α)` disagree: one
    /// requires what the other, read backwards, forbids.
    Mirror(RelationLabel, RelationLabel),
}

/// Checks `inverse` and every induction table cell for internal
/// consistency. An empty result means the algebra is coherent.
pub fn algebra_self_check() -> Vec<AlgebraIssue> {
    let mut issues = Vec::new();
    for l in RelationLabel::ALL {
        if l.inverse().inverse() != l || l.inverse().head() != l.head() {
            issues.push(AlgebraIssue::Inverse(l));
        }
    }
    for a in RelationLabel::ALL {
        for b in RelationLabel::ALL {
            let e = induce(a, b);
            if !e.required.intersection(e.forbidden).is_empty() {
                issues.push(AlgebraIssue::Overlap(a, b));
            }
            if Head::ALL.iter().any(|&h| e.required.iter().filter(|l| l.head() == h).count() > 1) {
                issues.push(AlgebraIssue::DoubleRequirement(a, b));
            }
            let m = induce(b.inverse(), a.inverse());
            if !m.required.intersection(e.forbidden.map_inverse()).is_empty()
                || !m.forbidden.intersection(e.required.map_inverse()).is_empty()
            {
                issues.push(AlgebraIssue::Mirror(a, b));
            }
        }
    }
    issues
}

/// A violating ordered triple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TripleViolation {
    pub e1: usize,
    pub e2: usize,
    pub e3: usize,
    pub violation: Violation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ViolationReport {
    pub total_triples: usize,
    pub violating_triples: usize,
    pub details: Vec<TripleViolation>,
}

impl ViolationReport {
    pub fn rate(&self) -> f64 {
        if self.total_triples == 0 {
            0.0
        } else {
            self.violating_triples as f64 / self.total_triples as f64
        }
    }

    pub fn merge(&mut self, other: ViolationReport) {
        self.total_triples += other.total_triples;
        self.violating_triples += other.violating_triples;
        self.details.extend(other.details);
    }
}

/// Runs [`check_triple`] over every ordered triple of distinct events.
///
/// Each distinct (deduction, found) pair is reported once per ordered
/// triple even when several head combinations produce it.
pub fn count_violations(g: &RelationGraph) -> ViolationReport {
    let n = g.n_events();
    let mut report = ViolationReport::default();
    let mut seen: Vec<(Deduction, RelationLabel)> = Vec::new();
    for e1 in 0..n {
        for e2 in 0..n {
            if e2 == e1 {
                continue;
            }
            let l12 = g.labels(e1, e2);
            for e3 in 0..n {
                if e3 == e1 || e3 == e2 {
                    continue;
                }
                report.total_triples += 1;
                let l23 = g.labels(e2, e3);
                let l13 = g.labels(e1, e3);
                seen.clear();
                for_each_violation(&l12, &l23, &l13, |v| {
                    if !seen.contains(&(v.deduction, v.found)) {
                        seen.push((v.deduction, v.found));
                        report.details.push(TripleViolation { e1, e2, e3, violation: v });
                    }
                });
                if !seen.is_empty() {
                    report.violating_triples += 1;
                }
            }
        }
    }
    report
}

/// True if no ordered triple containing the pair `{i, j}` violates the table.
/// Cheaper than [`count_violations`] after a single-pair edit.
pub fn pair_is_consistent(g: &RelationGraph, i: usize, j: usize) -> bool {
    let n = g.n_events();
    for k in 0..n {
        if k == i || k == j {
            continue;
        }
        let tri = [i, j, k];
        for &(a, b, c) in &PERMUTATIONS_3 {
            let (x, y, z) = (tri[a], tri[b], tri[c]);
            if !triple_is_consistent(&g.labels(x, y), &g.labels(y, z), &g.labels(x, z)) {
                return false;
            }
        }
    }
    true
}

pub(crate) const PERMUTATIONS_3: [(usize, usize, usize); 6] = [
    (0, 1, 2),
    (0, 2, 1),
    (1, 0, 2),
    (1, 2, 0),
    (2, 0, 1),
    (2, 1, 0),
];

/// A deduction contradicted an existing label during closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
#[error("conflict on ({e1}, {e3}): found {existing}, deduced {deduced:?} via ({via})")]
pub struct ConflictError {
    pub e1: usize,
    pub e3: usize,
    pub existing: RelationLabel,
    pub deduced: Deduction,
    /// The middle event of the triple that produced the deduction.
    pub via: usize,
}

/// Populates unlabeled slots with required deductions until fixpoint.
///
/// Existing labels are never overwritten: a required label that disagrees
/// with the slot, or a forbidden label found in it, is a [`ConflictError`].
pub fn transitive_closure(g: &RelationGraph) -> Result<RelationGraph, ConflictError> {
    let mut out = g.clone();
    let n = out.n_events();
    loop {
        let mut changed = false;
        for e1 in 0..n {
            for e2 in 0..n {
                if e2 == e1 {
                    continue;
                }
                let l12 = out.labels(e1, e2);
                if l12.is_empty() {
                    continue;
                }
                for e3 in 0..n {
                    if e3 == e1 || e3 == e2 {
                        continue;
                    }
                    let l23 = out.labels(e2, e3);
                    for alpha in l12.labels() {
                        for beta in l23.labels() {
                            let entry = induce(alpha, beta);
                            for r in entry.required.iter() {
                                match out.get(e1, e3, r.head()) {
                                    None => {
                                        out.set(e1, e3, r);
                                        changed = true;
                                    }
                                    Some(existing) if existing != r => {
                                        return Err(ConflictError {
                                            e1,
                                            e3,
                                            existing,
                                            deduced: Deduction::Required(r),
                                            via: e2,
                                        });
                                    }
                                    Some(_) => {}
                                }
                            }
                            for f in entry.forbidden.iter() {
                                if out.get(e1, e3, f.head()) == Some(f) {
                                    return Err(ConflictError {
                                        e1,
                                        e3,
                                        existing: f,
                                        deduced: Deduction::Forbidden(f),
                                        via: e2,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        if !changed {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(req: &[RelationLabel], forb: &[RelationLabel]) -> InductionEntry {
        InductionEntry {
            required: LabelSet::of(req),
            forbidden: LabelSet::of(forb),
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(inverse(Before), After);
        assert_eq!(inverse(Equal), Equal);
        assert_eq!(inverse(ParentChild), ChildParent);
        assert_eq!(inverse(Coref), Coref);
        for l in RelationLabel::ALL {
            assert_eq!(l.inverse().inverse(), l);
            assert_eq!(l.inverse().head(), l.head());
        }
    }

    #[test]
    fn codes_round_trip() {
        for l in RelationLabel::ALL {
            assert_eq!(l.code().parse::<RelationLabel>().unwrap(), l);
            assert_eq!(RelationLabel::from_index(l.index()), Some(l));
        }
        assert!("XX".parse::<RelationLabel>().is_err());
    }

    #[test]
    fn induce_examples() {
        assert_eq!(induce(Before, ParentChild), entry(&[Before], &[ChildParent, Coref]));
        assert!(induce(ParentChild, ChildParent).is_empty());
        assert_eq!(induce(Coref, Coref), entry(&[Coref, Equal], &[]));
        assert_eq!(induce(Vague, Before), entry(&[], &[After, Equal]));
    }

    #[test]
    fn table_has_64_cells_with_sane_entries() {
        let mut cells = 0;
        for a in RelationLabel::ALL {
            for b in RelationLabel::ALL {
                let e = induce(a, b);
                cells += 1;
                assert!(e.required.intersection(e.forbidden).is_empty(), "{a} {b}");
                for h in Head::ALL {
                    assert!(e.required.iter().filter(|l| l.head() == h).count() <= 1);
                }
            }
        }
        assert_eq!(cells, 64);
    }

    #[test]
    fn algebra_is_coherent() {
        assert_eq!(algebra_self_check(), Vec::new());
    }

    #[test]
    fn implied_temprel_examples() {
        assert_eq!(implied_temprel(ParentChild), Some(Before));
        assert_eq!(implied_temprel(ChildParent), Some(After));
        assert_eq!(implied_temprel(Coref), Some(Equal));
        assert_eq!(implied_temprel(NoRel), None);
    }

    #[test]
    fn check_triple_examples() {
        let l12 = PairLabels { temporal: Some(Before), subevent: None };
        let l23 = PairLabels { temporal: None, subevent: Some(ParentChild) };
        assert!(check_triple(&l12, &l23, &PairLabels::new(Before, NoRel)).is_empty());

        let v = check_triple(&l12, &l23, &PairLabels { temporal: Some(After), subevent: None });
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].deduction, Deduction::Required(Before));
        assert_eq!(v[0].found, After);

        let eqcr = PairLabels::new(Equal, Coref);
        let v = check_triple(&eqcr, &eqcr, &PairLabels::new(Vague, NoRel));
        assert!(v.iter().any(|x| x.deduction == Deduction::Required(Equal)));
        assert!(v.iter().any(|x| x.deduction == Deduction::Required(Coref)));
    }

    #[test]
    fn pair_index_is_dense() {
        let n = 6;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(pair_index(n, i, j), k);
                k += 1;
            }
        }
        assert_eq!(k, pair_count(n));
    }

    #[test]
    fn graph_stores_canonical_orientation() {
        let mut g = RelationGraph::new(3);
        g.set(2, 0, ParentChild);
        assert_eq!(g.get(0, 2, Head::Subevent), Some(ChildParent));
        assert_eq!(g.get(2, 0, Head::Subevent), Some(ParentChild));
        g.set(0, 2, Before);
        assert_eq!(g.labels(2, 0), PairLabels::new(After, ParentChild));
    }

    #[test]
    fn violations_on_bad_transitivity() {
        let mut g = RelationGraph::new(3);
        g.set(0, 1, Before);
        g.set(1, 2, Before);
        g.set(0, 2, After);
        let r = count_violations(&g);
        assert_eq!(r.total_triples, 6);
        assert!(r.violating_triples >= 1);
        assert!(!pair_is_consistent(&g, 0, 2));
    }

    #[test]
    fn no_triples_with_two_events() {
        let mut g = RelationGraph::new(2);
        g.set(0, 1, Before);
        g.set(0, 1, NoRel);
        let r = count_violations(&g);
        assert_eq!(r.total_triples, 0);
        assert_eq!(r.violating_triples, 0);
    }

    #[test]
    fn closure_examples() {
        let mut g = RelationGraph::new(3);
        g.set(0, 1, Coref);
        g.set(1, 2, Coref);
        let c = transitive_closure(&g).unwrap();
        assert_eq!(c.get(0, 2, Head::Subevent), Some(Coref));
        assert_eq!(c.get(0, 2, Head::Temporal), Some(Equal));

        let mut g = RelationGraph::new(3);
        g.set(0, 1, ParentChild);
        g.set(1, 2, ParentChild);
        let c = transitive_closure(&g).unwrap();
        assert_eq!(c.get(0, 2, Head::Subevent), Some(ParentChild));

        let empty = RelationGraph::new(4);
        assert_eq!(transitive_closure(&empty).unwrap(), empty);
    }

    #[test]
    fn closure_reports_conflicts() {
        let mut g = RelationGraph::new(3);
        g.set(0, 1, Before);
        g.set(1, 2, Before);
        g.set(0, 2, After);
        let err = transitive_closure(&g).unwrap_err();
        assert_eq!(err.deduced.label(), Before);

        // Forbidden-only conflict: BF then PC forbids CP on (e1, e3).
        let mut g = RelationGraph::new(3);
        g.set(0, 1, Before);
        g.set(1, 2, ParentChild);
        g.set(0, 2, ChildParent);
        assert!(transitive_closure(&g).is_err());
    }
}
