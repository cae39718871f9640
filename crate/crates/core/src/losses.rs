//! Annotation, symmetry and conjunction consistency losses.
//!
//! Each rule is relaxed with the product t-norm and moved to negative log
//! space. Losses are built on an [`autodiff::Graph`](crate::autodiff::Graph)
//! from a [`ScoreBank`]: the log-probabilities (and log complements) of a
//! set of directed event pairs concatenated into two long vectors, so every
//! loss is a handful of gather/arith nodes regardless of how many triples
//! it grounds.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::index::sample;
use rand::Rng;

pub use crate::autodiff::{grad_check, grad_check_with, GradCheckReport};
use crate::autodiff::{Graph, ParamSet, Var};
use crate::math;
use crate::relations::{induce, Head, RelationLabel};

/// Probability floor applied after each head's softmax.
pub const DEFAULT_PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LossError {
    #[error("gold label {index} has no matching scores")]
    MissingScore { index: usize },
    #[error("log of zero: forbidden score {label} equals 1 in triple {triple}")]
    Domain { triple: usize, label: RelationLabel },
    #[error("invalid score distribution: {0}")]
    InvalidScores(&'static str),
    #[error("empty batch")]
    EmptyBatch,
}

/// Two probability distributions for one directed pair `(e1, e2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairScores {
    /// BF, AF, EQ, VG.
    pub temporal: [f64; 4],
    /// PC, CP, CR, NR.
    pub subevent: [f64; 4],
}

impl PairScores {
    pub fn uniform() -> Self {
        PairScores { temporal: [0.25; 4], subevent: [0.25; 4] }
    }

    /// Validates both heads (positive, summing to one within 1e-9).
    pub fn new(temporal: [f64; 4], subevent: [f64; 4]) -> Result<Self, LossError> {
        for head in [&temporal, &subevent] {
            if head.iter().any(|p| !(p.is_finite() && *p > 0.0 && *p <= 1.0)) {
                return Err(LossError::InvalidScores("entry outside (0, 1]"));
            }
            if (head.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(LossError::InvalidScores("head does not sum to 1"));
            }
        }
        Ok(PairScores { temporal, subevent })
    }

    /// Softmax per head followed by the renormalised probability floor.
    pub fn from_logits(logits: &[f64; 8], floor: f64) -> Self {
        let head = |z: &[f64]| -> [f64; 4] {
            let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let mut e = [0.0; 4];
            for (o, v) in e.iter_mut().zip(z) {
                *o = math::exp(v - max);
            }
            let s: f64 = e.iter().sum();
            e.map(|v| apply_floor(v / s, floor))
        };
        PairScores {
            temporal: head(&logits[..4]),
            subevent: head(&logits[4..]),
        }
    }

    pub fn prob(&self, label: RelationLabel) -> f64 {
        match label.head() {
            Head::Temporal => self.temporal[label.head_index()],
            Head::Subevent => self.subevent[label.head_index()],
        }
    }

    pub fn head(&self, head: Head) -> &[f64; 4] {
        match head {
            Head::Temporal => &self.temporal,
            Head::Subevent => &self.subevent,
        }
    }

    pub fn to_array(&self) -> [f64; 8] {
        let mut out = [0.0; 8];
        out[..4].copy_from_slice(&self.temporal);
        out[4..].copy_from_slice(&self.subevent);
        out
    }

    /// The distribution of the reverse pair implied by symmetry.
    pub fn mirrored(&self) -> PairScores {
        let mut out = *self;
        for l in RelationLabel::ALL {
            let p = self.prob(l);
            let m = l.inverse();
            match m.head() {
                Head::Temporal => out.temporal[m.head_index()] = p,
                Head::Subevent => out.subevent[m.head_index()] = p,
            }
        }
        out
    }
}

#[inline]
fn apply_floor(p: f64, floor: f64) -> f64 {
    (p + floor) / (1.0 + 4.0 * floor)
}

/// Per-label weights of the annotation loss.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LabelWeights(pub [f64; 8]);

impl Default for LabelWeights {
    fn default() -> Self {
        LabelWeights([1.0; 8])
    }
}

impl LabelWeights {
    pub fn get(&self, label: RelationLabel) -> f64 {
        self.0[label.index()]
    }

    pub fn scaled(&self, c: f64) -> LabelWeights {
        LabelWeights(self.0.map(|w| w * c))
    }

    /// Balanced weights computed within each head:
    /// `total / (present labels × count)`, capped at [`MAX_LABEL_WEIGHT`].
    /// Labels that never occur keep weight 1.
    pub fn inverse_frequency(counts: &[usize; 8]) -> LabelWeights {
        let mut w = [1.0; 8];
        for head in [0..4, 4..8] {
            let present: Vec<usize> = head.filter(|&i| counts[i] > 0).collect();
            let total: usize = present.iter().map(|&i| counts[i]).sum();
            for &i in &present {
                let balanced = total as f64 / (present.len() * counts[i]) as f64;
                w[i] = balanced.min(MAX_LABEL_WEIGHT);
            }
        }
        LabelWeights(w)
    }
}

/// Upper bound on a balanced label weight, so that a handful of rare
/// annotations cannot dominate the annotation loss.
pub const MAX_LABEL_WEIGHT: f64 = 10.0;

/// The three loss components and their weighted sum.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossBreakdown {
    pub l_a: f64,
    pub l_s: f64,
    pub l_c: f64,
    pub lambda_s: f64,
    pub lambda_c: f64,
    pub total: f64,
}

impl LossBreakdown {
    pub fn compose(l_a: f64, l_s: f64, l_c: f64, lambda_s: f64, lambda_c: f64) -> Self {
        LossBreakdown {
            l_a,
            l_s,
            l_c,
            lambda_s,
            lambda_c,
            total: l_a + lambda_s * l_s + lambda_c * l_c,
        }
    }

    /// Sums components across documents; coefficients must agree.
    pub fn accumulate(&mut self, other: &LossBreakdown) {
        self.l_a += other.l_a;
        self.l_s += other.l_s;
        self.l_c += other.l_c;
        self.lambda_s = other.lambda_s;
        self.lambda_c = other.lambda_c;
        self.total += other.total;
    }

    pub fn is_finite(&self) -> bool {
        self.l_a.is_finite() && self.l_s.is_finite() && self.l_c.is_finite() && self.total.is_finite()
    }
}

/// Log-probabilities of `slots` directed pairs, 8 entries per slot in
/// [`RelationLabel::index`] order.
#[derive(Clone, Copy, Debug)]
pub struct ScoreBank {
    pub log_p: Var,
    pub log_not_p: Var,
    pub slots: usize,
}

impl ScoreBank {
    /// Builds the bank from raw 8-wide logits, one node per slot.
    pub fn from_logits(g: &mut Graph<'_>, logits: &[Var], floor: f64) -> ScoreBank {
        let mut heads = Vec::with_capacity(logits.len() * 2);
        for &z in logits {
            let t = g.slice(z, 0, 4);
            let s = g.slice(z, 4, 4);
            heads.push(g.softmax(t));
            heads.push(g.softmax(s));
        }
        let p = g.concat(&heads);
        let p = g.affine(p, 1.0 / (1.0 + 4.0 * floor), floor / (1.0 + 4.0 * floor));
        Self::from_prob_node(g, p, logits.len())
    }

    /// Builds the bank from fixed scores (constants on the graph).
    pub fn from_scores(g: &mut Graph<'_>, scores: &[PairScores]) -> ScoreBank {
        let flat: Vec<f64> = scores.iter().flat_map(|s| s.to_array()).collect();
        let p = g.input(flat);
        Self::from_prob_node(g, p, scores.len())
    }

    fn from_prob_node(g: &mut Graph<'_>, p: Var, slots: usize) -> ScoreBank {
        let log_p = g.ln(p);
        let q = g.affine(p, -1.0, 1.0);
        let log_not_p = g.ln(q);
        ScoreBank { log_p, log_not_p, slots }
    }

    #[inline]
    pub fn index(slot: usize, label: RelationLabel) -> u32 {
        (slot * 8 + label.index()) as u32
    }

    /// Probabilities of one slot, read back from the graph.
    pub fn scores(&self, g: &Graph<'_>, slot: usize) -> PairScores {
        let lp = &g.value(self.log_p)[slot * 8..slot * 8 + 8];
        let mut t = [0.0; 4];
        let mut s = [0.0; 4];
        for k in 0..4 {
            t[k] = math::exp(lp[k]);
            s[k] = math::exp(lp[4 + k]);
        }
        PairScores { temporal: t, subevent: s }
    }
}

/// `L_A = Σ -w_r log r(e1, e2)` over `(slot, gold label)` items.
pub fn annotation_loss_var(
    g: &mut Graph<'_>,
    bank: &ScoreBank,
    gold: &[(usize, RelationLabel)],
    weights: &LabelWeights,
) -> Var {
    if gold.is_empty() {
        return g.constant(0.0);
    }
    let index = gold.iter().map(|&(s, l)| ScoreBank::index(s, l)).collect();
    let w = gold.iter().map(|&(_, l)| -weights.get(l)).collect();
    let picked = g.gather(bank.log_p, index);
    let w = g.input(w);
    let weighted = g.mul(picked, w);
    g.sum(weighted)
}

/// `L_S = Σ_α |log α(e1, e2) - log inverse(α)(e2, e1)|` for each
/// `(forward slot, reverse slot)` pair, over the labels of `heads`.
pub fn symmetry_loss_var(
    g: &mut Graph<'_>,
    bank: &ScoreBank,
    pairs: &[(usize, usize)],
    heads: HeadMask,
) -> Var {
    let labels: Vec<RelationLabel> = RelationLabel::ALL
        .into_iter()
        .filter(|l| heads.contains(l.head()))
        .collect();
    if pairs.is_empty() || labels.is_empty() {
        return g.constant(0.0);
    }
    let mut fwd = Vec::with_capacity(pairs.len() * labels.len());
    let mut rev = Vec::with_capacity(pairs.len() * labels.len());
    for &(f, r) in pairs {
        for &a in &labels {
            fwd.push(ScoreBank::index(f, a));
            rev.push(ScoreBank::index(r, a.inverse()));
        }
    }
    let a = g.gather(bank.log_p, fwd);
    let b = g.gather(bank.log_p, rev);
    let d = g.sub(a, b);
    let d = g.abs(d);
    g.sum(d)
}

/// Which heads a loss touches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HeadMask {
    pub temporal: bool,
    pub subevent: bool,
}

impl HeadMask {
    pub const BOTH: HeadMask = HeadMask { temporal: true, subevent: true };
    pub const TEMPORAL: HeadMask = HeadMask { temporal: true, subevent: false };
    pub const SUBEVENT: HeadMask = HeadMask { temporal: false, subevent: true };

    pub fn contains(self, head: Head) -> bool {
        match head {
            Head::Temporal => self.temporal,
            Head::Subevent => self.subevent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    /// `alpha ∧ beta → gamma`.
    Required,
    /// `alpha ∧ beta → ¬delta`.
    Forbidden,
}

/// One grounded-able conjunctive rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RuleTerm {
    pub alpha: RelationLabel,
    pub beta: RelationLabel,
    pub consequent: RelationLabel,
    pub kind: RuleKind,
}

impl RuleTerm {
    /// All three labels on one head.
    pub fn is_task_specific(&self) -> bool {
        self.alpha.head() == self.beta.head() && self.beta.head() == self.consequent.head()
    }
}

/// Which table-derived rules take part in the conjunction loss.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConstraintScope {
    /// Rules whose three labels share a head (e.g. BF ∧ BF → BF).
    pub task: bool,
    /// Rules mixing heads (e.g. BF ∧ PC → BF).
    pub cross_task: bool,
}

impl ConstraintScope {
    pub const ALL: ConstraintScope = ConstraintScope { task: true, cross_task: true };
    pub const NONE: ConstraintScope = ConstraintScope { task: false, cross_task: false };
    pub const TASK_ONLY: ConstraintScope = ConstraintScope { task: true, cross_task: false };

    pub fn admits(self, term: &RuleTerm) -> bool {
        if term.is_task_specific() {
            self.task
        } else {
            self.cross_task
        }
    }
}

/// The rule list grounded over every triple.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjunctionRules {
    pub terms: Vec<RuleTerm>,
}

impl ConjunctionRules {
    /// Every required/forbidden entry of the induction table admitted by
    /// `scope`, over all 64 `(alpha, beta)` cells.
    pub fn from_table(scope: ConstraintScope) -> Self {
        let mut terms = Vec::new();
        for alpha in RelationLabel::ALL {
            for beta in RelationLabel::ALL {
                let e = induce(alpha, beta);
                let req = e.required.iter().map(|c| (c, RuleKind::Required));
                let forb = e.forbidden.iter().map(|c| (c, RuleKind::Forbidden));
                for (consequent, kind) in req.chain(forb) {
                    let t = RuleTerm { alpha, beta, consequent, kind };
                    if scope.admits(&t) {
                        terms.push(t);
                    }
                }
            }
        }
        ConjunctionRules { terms }
    }

    pub fn single(term: RuleTerm) -> Self {
        ConjunctionRules { terms: vec![term] }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Penalty applied to each grounded rule term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConjunctionPenalty {
    /// `|L_t|`: penalises the consequent being both less and more likely
    /// than the antecedent conjunction.
    #[default]
    Absolute,
    /// `max(0, L_t)`: only the antecedent outweighing the consequent.
    Hinge,
}

/// `L_C` over `(slot_12, slot_23, slot_13)` triples.
///
/// A required consequent `gamma` contributes
/// `|log α12 + log β23 - log γ13|`, a forbidden `delta` contributes
/// `|log α12 + log β23 - log(1 - δ13)|`.
pub fn conjunction_loss_var(
    g: &mut Graph<'_>,
    bank: &ScoreBank,
    triples: &[(usize, usize, usize)],
    rules: &ConjunctionRules,
    penalty: ConjunctionPenalty,
) -> Var {
    let mut parts = Vec::with_capacity(2);
    for (kind, source) in [
        (RuleKind::Required, bank.log_p),
        (RuleKind::Forbidden, bank.log_not_p),
    ] {
        let terms: Vec<&RuleTerm> = rules.terms.iter().filter(|t| t.kind == kind).collect();
        if terms.is_empty() || triples.is_empty() {
            continue;
        }
        let len = terms.len() * triples.len();
        let mut ia = Vec::with_capacity(len);
        let mut ib = Vec::with_capacity(len);
        let mut ic = Vec::with_capacity(len);
        for &(s12, s23, s13) in triples {
            for t in &terms {
                ia.push(ScoreBank::index(s12, t.alpha));
                ib.push(ScoreBank::index(s23, t.beta));
                ic.push(ScoreBank::index(s13, t.consequent));
            }
        }
        let a = g.gather(bank.log_p, ia);
        let b = g.gather(bank.log_p, ib);
        let c = g.gather(source, ic);
        let ab = g.add(a, b);
        let diff = g.sub(ab, c);
        let pen = match penalty {
            ConjunctionPenalty::Absolute => g.abs(diff),
            ConjunctionPenalty::Hinge => g.relu(diff),
        };
        parts.push(g.sum(pen));
    }
    match parts.as_slice() {
        [] => g.constant(0.0),
        [one] => *one,
        [a, b] => g.add(*a, *b),
        _ => unreachable!(),
    }
}

/// Everything one document contributes to the joint objective. Slots index
/// into the document's [`ScoreBank`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DocumentTerms {
    pub annotations: Vec<(usize, RelationLabel)>,
    pub symmetric_pairs: Vec<(usize, usize)>,
    pub triples: Vec<(usize, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointLossConfig {
    pub lambda_s: f64,
    pub lambda_c: f64,
    pub symmetry_heads: HeadMask,
    pub rules: ConjunctionRules,
    pub penalty: ConjunctionPenalty,
}

impl JointLossConfig {
    pub fn new(lambda_s: f64, lambda_c: f64, scope: ConstraintScope) -> Self {
        JointLossConfig {
            lambda_s,
            lambda_c,
            symmetry_heads: HeadMask::BOTH,
            rules: ConjunctionRules::from_table(scope),
            penalty: ConjunctionPenalty::Absolute,
        }
    }
}

/// `L = L_A + λ_S L_S + λ_C L_C` for one document.
pub fn joint_loss_var(
    g: &mut Graph<'_>,
    bank: &ScoreBank,
    terms: &DocumentTerms,
    weights: &LabelWeights,
    cfg: &JointLossConfig,
) -> (Var, LossBreakdown) {
    let la = annotation_loss_var(g, bank, &terms.annotations, weights);
    let ls = symmetry_loss_var(g, bank, &terms.symmetric_pairs, cfg.symmetry_heads);
    let lc = conjunction_loss_var(g, bank, &terms.triples, &cfg.rules, cfg.penalty);
    let ws = g.scale(ls, cfg.lambda_s);
    let wc = g.scale(lc, cfg.lambda_c);
    let partial = g.add(la, ws);
    let total = g.add(partial, wc);
    let breakdown = LossBreakdown {
        l_a: g.scalar(la),
        l_s: g.scalar(ls),
        l_c: g.scalar(lc),
        lambda_s: cfg.lambda_s,
        lambda_c: cfg.lambda_c,
        total: g.scalar(total),
    };
    (total, breakdown)
}

/// Ordered distinct triples `(e1, e2, e3)` of `n` events, uniformly
/// subsampled without replacement down to `cap` when there are more.
pub fn enumerate_triples<R: Rng + ?Sized>(
    n: usize,
    cap: usize,
    rng: &mut R,
) -> Vec<(usize, usize, usize)> {
    let mut all = Vec::with_capacity(n * n.saturating_sub(1) * n.saturating_sub(2));
    for a in 0..n {
        for b in 0..n {
            if b == a {
                continue;
            }
            for c in 0..n {
                if c != a && c != b {
                    all.push((a, b, c));
                }
            }
        }
    }
    if all.len() <= cap {
        return all;
    }
    let mut picked = sample(rng, all.len(), cap).into_vec();
    picked.sort_unstable();
    picked.into_iter().map(|i| all[i]).collect()
}

/// Slot of the directed pair `(i, j)` among the `n (n - 1)` directed
/// pairs of `n` events.
#[inline]
pub fn directed_slot(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    i * (n - 1) + if j < i { j } else { j - 1 }
}

// Fixed-score evaluation of the losses.

fn with_bank<T>(scores: &[PairScores], f: impl FnOnce(&mut Graph<'_>, &ScoreBank) -> T) -> T {
    let params = ParamSet::new();
    let mut g = Graph::new(&params);
    let bank = ScoreBank::from_scores(&mut g, scores);
    f(&mut g, &bank)
}

/// Annotation loss of fixed scores against one gold label each.
pub fn annotation_loss(
    scores: &[PairScores],
    gold: &[RelationLabel],
    weights: &LabelWeights,
) -> Result<f64, LossError> {
    if gold.is_empty() {
        return Err(LossError::EmptyBatch);
    }
    if gold.len() > scores.len() {
        return Err(LossError::MissingScore { index: scores.len() });
    }
    let items: Vec<(usize, RelationLabel)> = gold.iter().copied().enumerate().collect();
    Ok(with_bank(scores, |g, bank| {
        let l = annotation_loss_var(g, bank, &items, weights);
        g.scalar(l)
    }))
}

/// Symmetry loss between the scores of `(e1, e2)` and `(e2, e1)`.
pub fn symmetry_loss(fwd: &PairScores, rev: &PairScores) -> f64 {
    with_bank(&[*fwd, *rev], |g, bank| {
        let l = symmetry_loss_var(g, bank, &[(0, 1)], HeadMask::BOTH);
        g.scalar(l)
    })
}

/// Conjunction loss over fixed `(scores_12, scores_23, scores_13)` triples.
pub fn conjunction_loss(
    triples: &[(PairScores, PairScores, PairScores)],
    rules: &ConjunctionRules,
    penalty: ConjunctionPenalty,
) -> Result<f64, LossError> {
    for (k, (_, _, s13)) in triples.iter().enumerate() {
        for t in rules.terms.iter().filter(|t| t.kind == RuleKind::Forbidden) {
            if s13.prob(t.consequent) >= 1.0 {
                return Err(LossError::Domain { triple: k, label: t.consequent });
            }
        }
    }
    let flat: Vec<PairScores> = triples.iter().flat_map(|(a, b, c)| [*a, *b, *c]).collect();
    let idx: Vec<(usize, usize, usize)> =
        (0..triples.len()).map(|k| (3 * k, 3 * k + 1, 3 * k + 2)).collect();
    Ok(with_bank(&flat, |g, bank| {
        let l = conjunction_loss_var(g, bank, &idx, rules, penalty);
        g.scalar(l)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relations::RelationLabel::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const LN2: f64 = core::f64::consts::LN_2;

    fn peaked(t: usize, pt: f64, s: usize, ps: f64) -> PairScores {
        let mut temporal = [(1.0 - pt) / 3.0; 4];
        temporal[t] = pt;
        let mut subevent = [(1.0 - ps) / 3.0; 4];
        subevent[s] = ps;
        PairScores { temporal, subevent }
    }

    #[test]
    fn annotation_examples() {
        let w = LabelWeights::default();
        let exact = PairScores { temporal: [1.0, 0.0, 0.0, 0.0], subevent: [0.25; 4] };
        assert_eq!(annotation_loss(&[exact], &[Before], &w).unwrap(), 0.0);

        let half = peaked(0, 0.5, 3, 0.7);
        assert!((annotation_loss(&[half], &[Before], &w).unwrap() - LN2).abs() < 1e-12);

        let mut w2 = LabelWeights::default();
        w2.0[ParentChild.index()] = 2.0;
        let s = PairScores::uniform();
        let l = annotation_loss(&[s], &[ParentChild], &w2).unwrap();
        assert!((l - 2.0 * math::ln(4.0)).abs() < 1e-12);
    }

    #[test]
    fn annotation_missing_score() {
        let w = LabelWeights::default();
        let err = annotation_loss(&[PairScores::uniform()], &[Before, After], &w).unwrap_err();
        assert_eq!(err, LossError::MissingScore { index: 1 });
        assert_eq!(annotation_loss(&[], &[], &w).unwrap_err(), LossError::EmptyBatch);
    }

    #[test]
    fn symmetry_zero_on_mirrored_scores() {
        let fwd = PairScores::new([0.7, 0.1, 0.15, 0.05], [0.2, 0.5, 0.1, 0.2]).unwrap();
        assert_eq!(symmetry_loss(&fwd, &fwd.mirrored()), 0.0);
    }

    #[test]
    fn symmetry_hand_computed() {
        let fwd = PairScores { temporal: [0.8, 0.1, 0.05, 0.05], subevent: [0.25; 4] };
        let rev = PairScores { temporal: [0.1, 0.4, 0.3, 0.2], subevent: [0.25; 4] };
        // BF->AF: ln 0.8 - ln 0.4; AF->BF: 0; EQ: ln 6; VG: ln 4.
        let expected = LN2 + 0.0 + math::ln(6.0) + math::ln(4.0);
        let got = symmetry_loss(&fwd, &rev);
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
        assert!((symmetry_loss(&rev, &fwd) - got).abs() < 1e-12);
    }

    fn single_required() -> ConjunctionRules {
        ConjunctionRules::single(RuleTerm {
            alpha: Before,
            beta: Before,
            consequent: Before,
            kind: RuleKind::Required,
        })
    }

    #[test]
    fn conjunction_term_examples() {
        let rules = single_required();
        let one = PairScores { temporal: [1.0, 0.0, 0.0, 0.0], subevent: [0.25; 4] };
        let l = conjunction_loss(&[(one, one, one)], &rules, ConjunctionPenalty::Absolute).unwrap();
        assert_eq!(l, 0.0);

        let half = peaked(0, 0.5, 3, 0.5);
        let quarter = peaked(0, 0.25, 3, 0.5);
        let l = conjunction_loss(&[(half, half, quarter)], &rules, ConjunctionPenalty::Absolute)
            .unwrap();
        assert!(l.abs() < 1e-12);

        let nine = peaked(0, 0.9, 3, 0.5);
        let l = conjunction_loss(&[(nine, nine, half)], &rules, ConjunctionPenalty::Absolute)
            .unwrap();
        let expected = (math::ln(0.81) - math::ln(0.5)).abs();
        assert!((l - expected).abs() < 1e-12);
        assert!((expected - 0.4824).abs() < 1e-4);
    }

    #[test]
    fn conjunction_forbidden_term() {
        let rules = ConjunctionRules::single(RuleTerm {
            alpha: Before,
            beta: ParentChild,
            consequent: ChildParent,
            kind: RuleKind::Forbidden,
        });
        let a = peaked(0, 0.9, 3, 0.5);
        let b = peaked(0, 0.5, 0, 0.9);
        let c = peaked(0, 0.5, 1, 0.5);
        let l = conjunction_loss(&[(a, b, c)], &rules, ConjunctionPenalty::Absolute).unwrap();
        assert!((l - 0.4824).abs() < 1e-4);

        let certain = PairScores { temporal: [0.25; 4], subevent: [0.0, 1.0, 0.0, 0.0] };
        let err = conjunction_loss(&[(a, b, certain)], &rules, ConjunctionPenalty::Absolute);
        assert!(matches!(err, Err(LossError::Domain { .. })));
    }

    #[test]
    fn hinge_ignores_underconfident_antecedents() {
        let rules = single_required();
        let low = peaked(0, 0.1, 3, 0.5);
        let high = peaked(0, 0.9, 3, 0.5);
        let abs = conjunction_loss(&[(low, low, high)], &rules, ConjunctionPenalty::Absolute)
            .unwrap();
        let hinge =
            conjunction_loss(&[(low, low, high)], &rules, ConjunctionPenalty::Hinge).unwrap();
        assert!(abs > 4.0);
        assert_eq!(hinge, 0.0);
    }

    #[test]
    fn table_rules_split_by_scope() {
        let all = ConjunctionRules::from_table(ConstraintScope::ALL);
        let task = ConjunctionRules::from_table(ConstraintScope::TASK_ONLY);
        let cross = ConjunctionRules::from_table(ConstraintScope {
            task: false,
            cross_task: true,
        });
        assert_eq!(all.terms.len(), task.terms.len() + cross.terms.len());
        assert!(task.terms.iter().all(RuleTerm::is_task_specific));
        assert!(ConjunctionRules::from_table(ConstraintScope::NONE).is_empty());
        // BF ∧ BF → BF is a transitivity rule.
        assert!(task.terms.contains(&RuleTerm {
            alpha: Before,
            beta: Before,
            consequent: Before,
            kind: RuleKind::Required
        }));
    }

    #[test]
    fn breakdown_recomposes_exactly() {
        let p = ParamSet::new();
        let mut g = Graph::new(&p);
        let scores = [
            peaked(0, 0.6, 3, 0.7),
            peaked(1, 0.5, 3, 0.6),
            peaked(0, 0.4, 0, 0.3),
            peaked(2, 0.3, 1, 0.4),
            peaked(0, 0.7, 3, 0.8),
            peaked(1, 0.6, 2, 0.5),
        ];
        let bank = ScoreBank::from_scores(&mut g, &scores);
        let terms = DocumentTerms {
            annotations: vec![(0, Before), (0, NoRel), (2, Before)],
            symmetric_pairs: vec![(0, 1), (2, 3), (4, 5)],
            triples: vec![(0, 2, 4), (1, 3, 5)],
        };
        let cfg = JointLossConfig::new(0.2, 0.2, ConstraintScope::ALL);
        let (_, b) = joint_loss_var(&mut g, &bank, &terms, &LabelWeights::default(), &cfg);
        assert_eq!(b.total, b.l_a + 0.2 * b.l_s + 0.2 * b.l_c);
        assert!(b.l_s > 0.0 && b.l_c > 0.0);

        let cfg0 = JointLossConfig::new(0.0, 0.0, ConstraintScope::ALL);
        let (_, b0) = joint_loss_var(&mut g, &bank, &terms, &LabelWeights::default(), &cfg0);
        assert_eq!(b0.total, b0.l_a);
    }

    #[test]
    fn balanced_weights_per_head() {
        let w = LabelWeights::inverse_frequency(&[10, 30, 5, 0, 2, 2, 1, 500]);
        // Temporal: 45 items over 3 labels.
        assert!((w.0[0] - 1.5).abs() < 1e-12);
        assert!((w.0[1] - 0.5).abs() < 1e-12);
        assert!((w.0[2] - 3.0).abs() < 1e-12);
        assert_eq!(w.0[3], 1.0);
        // Subevent: 505 items over 4 labels; rare ones hit the cap.
        assert_eq!(w.0[6], MAX_LABEL_WEIGHT);
        assert!((w.0[7] - 505.0 / 2000.0).abs() < 1e-12);
    }

    #[test]
    fn triples_are_capped_deterministically() {
        let mut r1 = ChaCha8Rng::seed_from_u64(3);
        let mut r2 = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(enumerate_triples(5, 1000, &mut r1).len(), 60);
        let a = enumerate_triples(9, 100, &mut r1);
        let mut r1b = ChaCha8Rng::seed_from_u64(3);
        let _ = enumerate_triples(5, 1000, &mut r1b);
        assert_eq!(a, enumerate_triples(9, 100, &mut r1b));
        assert_eq!(a.len(), 100);
        assert!(enumerate_triples(2, 10, &mut r2).is_empty());
    }

    #[test]
    fn directed_slots_are_dense() {
        let n = 5;
        let mut seen = vec![false; n * (n - 1)];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let s = directed_slot(n, i, j);
                    assert!(!seen[s]);
                    seen[s] = true;
                }
            }
        }
        assert!(seen.into_iter().all(|b| b));
    }
}
