//! Constrained training, evaluation and the ablation ladder.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::autodiff::{Gradients, Graph, ParamSet};
use crate::data::{CorpusRecord, Split};
use crate::inference::{
    decode_event_complex, global_decode_windowed, greedy_decode, DecodeError, DecodingProblem,
    DEFAULT_MAX_EVENTS,
};
use crate::losses::{
    directed_slot, enumerate_triples, joint_loss_var, ConjunctionPenalty, ConjunctionRules,
    ConstraintScope, DocumentTerms, HeadMask, JointLossConfig, LabelWeights, LossBreakdown,
    PairScores, ScoreBank, DEFAULT_PROB_FLOOR,
};
use crate::math;
use crate::model::{
    encode_document_var, init_params, score_all_pairs_var, score_document, CellType, Dims,
    Document, EncoderParams, ModelError,
};
use crate::relations::{
    count_violations, transitive_closure, ConflictError, Head, RelationGraph, RelationLabel,
    ViolationReport,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarnessError {
    #[error("loss became non-finite in epoch {epoch}, batch {batch}")]
    Divergence { epoch: usize, batch: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("prediction and gold sets differ: {0}")]
    Mismatch(String),
    #[error("no training annotations in the corpus")]
    NoTrainingData,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("gold graph {doc} does not close: {source}")]
    Conflict { doc: usize, source: ConflictError },
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Which parts of the framework are switched on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AblationFlags {
    /// Train both heads together; otherwise only `TrainConfig::task`.
    pub joint: bool,
    /// Symmetry loss and same-head conjunction rules.
    pub task_constraints: bool,
    /// Conjunction rules mixing temporal and subevent labels.
    pub cross_task_constraints: bool,
    /// Feed the per-pair commonsense channel.
    pub commonsense: bool,
    /// Decode test documents with exact global inference.
    pub global_inference: bool,
}

impl AblationFlags {
    pub const FULL: AblationFlags = AblationFlags {
        joint: true,
        task_constraints: true,
        cross_task_constraints: true,
        commonsense: false,
        global_inference: false,
    };
    pub const ANNOTATION_ONLY: AblationFlags = AblationFlags {
        joint: true,
        task_constraints: false,
        cross_task_constraints: false,
        commonsense: false,
        global_inference: false,
    };
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AmsGradConfig {
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AmsGradConfig {
    fn default() -> Self {
        AmsGradConfig { beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub seed: u64,
    pub epochs: usize,
    /// Documents are added to a batch until it holds this many pairs.
    pub batch_pairs: usize,
    pub learning_rate: f64,
    pub lambda_s: f64,
    pub lambda_c: f64,
    pub flags: AblationFlags,
    /// Head trained when `flags.joint` is off.
    pub task: Head,
    pub dims: Dims,
    pub optimizer: AmsGradConfig,
    pub prob_floor: f64,
    /// Use `max(0, ·)` instead of `|·|` for conjunction terms.
    pub conjunction_hinge: bool,
    /// Ordered triples per document fed to the conjunction loss.
    pub max_triples_per_doc: usize,
    /// Balance `L_A` by inverse label frequency.
    pub balance_labels: bool,
    /// Largest problem solved exactly by global inference.
    pub max_events: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            seed: 0,
            epochs: 30,
            batch_pairs: 64,
            learning_rate: 0.001,
            lambda_s: 0.2,
            lambda_c: 0.2,
            flags: AblationFlags::FULL,
            task: Head::Temporal,
            dims: Dims::default(),
            optimizer: AmsGradConfig::default(),
            prob_floor: DEFAULT_PROB_FLOOR,
            conjunction_hinge: false,
            max_triples_per_doc: 256,
            balance_labels: true,
            max_events: DEFAULT_MAX_EVENTS,
        }
    }
}

impl TrainConfig {
    /// The published setting: batch 512, 80 epochs, 768-wide encoder.
    pub fn paper_scale() -> Self {
        TrainConfig {
            epochs: 80,
            batch_pairs: 512,
            dims: Dims { d_tok: 768, d_h: 768, cell: CellType::Lstm, ..Dims::default() },
            ..TrainConfig::default()
        }
    }

    /// Small, fast settings for the synthetic ablation ladder: a 16-wide
    /// LSTM over a 64-word vocabulary, hinge conjunctions and light
    /// constraint weights, trained for 60 epochs.
    pub fn desk_ablation() -> Self {
        TrainConfig {
            epochs: 60,
            learning_rate: 0.01,
            lambda_s: 0.02,
            lambda_c: 0.02,
            conjunction_hinge: true,
            dims: Dims { vocab: 64, d_tok: 16, d_h: 16, cell: CellType::Lstm, ..Dims::default() },
            ..TrainConfig::default()
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::Config(m.to_string()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning rate must be positive");
        }
        if !(self.lambda_s >= 0.0 && self.lambda_c >= 0.0) {
            return bad("lambda_s and lambda_c must be non-negative");
        }
        if self.batch_pairs == 0 {
            return bad("batch size must be positive");
        }
        if !(self.prob_floor >= 0.0 && self.prob_floor < 0.25) {
            return bad("probability floor must lie in [0, 0.25)");
        }
        let o = self.optimizer;
        if !(0.0..1.0).contains(&o.beta1) || !(0.0..1.0).contains(&o.beta2) || o.epsilon <= 0.0 {
            return bad("optimizer betas must lie in [0, 1) and epsilon be positive");
        }
        if self.flags.commonsense != (self.dims.commonsense > 0) {
            return bad("the commonsense flag requires a positive commonsense width and vice versa");
        }
        if self.max_events < 2 {
            return bad("max_events must be at least 2");
        }
        Ok(())
    }

    fn heads(&self) -> HeadMask {
        match (self.flags.joint, self.task) {
            (true, _) => HeadMask::BOTH,
            (false, Head::Temporal) => HeadMask::TEMPORAL,
            (false, Head::Subevent) => HeadMask::SUBEVENT,
        }
    }

    /// The loss configuration implied by the flags.
    pub fn loss_config(&self) -> JointLossConfig {
        let scope = ConstraintScope {
            task: self.flags.task_constraints,
            cross_task: self.flags.cross_task_constraints,
        };
        let heads = self.heads();
        let mut rules = ConjunctionRules::from_table(scope);
        rules.terms.retain(|t| {
            [t.alpha, t.beta, t.consequent].iter().all(|l| heads.contains(l.head()))
        });
        let mut cfg = JointLossConfig::new(self.lambda_s, self.lambda_c, scope);
        cfg.rules = rules;
        cfg.symmetry_heads = heads;
        if self.conjunction_hinge {
            cfg.penalty = ConjunctionPenalty::Hinge;
        }
        cfg
    }
}

/// AMSGrad: Adam with bias-corrected moments whose second moment never
/// decreases.
#[derive(Clone, Debug, PartialEq)]
pub struct AmsGrad {
    cfg: AmsGradConfig,
    lr: f64,
    step: u64,
    m: Gradients,
    v: Gradients,
    v_max: Gradients,
}

impl AmsGrad {
    pub fn new(params: &ParamSet, lr: f64, cfg: AmsGradConfig) -> Self {
        AmsGrad {
            cfg,
            lr,
            step: 0,
            m: Gradients::zeros_like(params),
            v: Gradients::zeros_like(params),
            v_max: Gradients::zeros_like(params),
        }
    }

    pub fn steps(&self) -> u64 {
        self.step
    }

    pub fn update(&mut self, params: &mut ParamSet, grads: &Gradients) {
        self.step += 1;
        let AmsGradConfig { beta1, beta2, epsilon } = self.cfg;
        let c1 = 1.0 - math::powi(beta1, self.step);
        let c2 = 1.0 - math::powi(beta2, self.step);
        let ids: Vec<_> = params.ids().collect();
        for id in ids {
            let g = grads.get(id);
            let m = self.m.get_mut(id);
            let v = self.v.get_mut(id);
            let vm = self.v_max.get_mut(id);
            let w = &mut params.get_mut(id).data;
            for k in 0..g.len() {
                m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
                if v[k] > vm[k] {
                    vm[k] = v[k];
                }
                let m_hat = m[k] / c1;
                let v_hat = vm[k] / c2;
                w[k] -= self.lr * m_hat / (math::sqrt(v_hat) + epsilon);
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DevScores {
    pub temporal_f1: f64,
    pub subevent_f1: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    /// Summed over every training document.
    pub loss: LossBreakdown,
    pub dev: Option<DevScores>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingLog {
    pub epochs: Vec<EpochLog>,
    /// Epoch whose parameters were returned, when a dev split selected one.
    pub selected_epoch: Option<usize>,
}

/// Optional per-pair commonsense features for a document.
pub type CommonsenseSource<'a> = &'a dyn Fn(&Document, usize, usize) -> Option<Vec<f64>>;

/// Label counts over the annotations `train` would use.
pub fn label_counts(records: &[CorpusRecord], heads: HeadMask) -> [usize; 8] {
    let mut counts = [0; 8];
    for r in records.iter().filter(|r| r.split == Split::Train) {
        for (_, _, l) in r.gold.pairs() {
            for x in l.labels().filter(|x| heads.contains(x.head())) {
                counts[x.index()] += 1;
            }
        }
    }
    counts
}

fn document_terms(
    record: &CorpusRecord,
    cfg: &TrainConfig,
    loss: &JointLossConfig,
    rng: &mut ChaCha8Rng,
) -> DocumentTerms {
    let n = record.gold.n_events();
    let heads = cfg.heads();
    let mut terms = DocumentTerms::default();
    for (i, j, l) in record.gold.pairs() {
        for x in l.labels().filter(|x| heads.contains(x.head())) {
            terms.annotations.push((directed_slot(n, i, j), x));
        }
        if cfg.flags.task_constraints {
            terms.symmetric_pairs.push((directed_slot(n, i, j), directed_slot(n, j, i)));
        }
    }
    if !loss.rules.is_empty() {
        terms.triples = enumerate_triples(n, cfg.max_triples_per_doc, rng)
            .into_iter()
            .map(|(a, b, c)| (directed_slot(n, a, b), directed_slot(n, b, c), directed_slot(n, a, c)))
            .collect();
    }
    terms
}

/// Trains the pair scorer on the train split. See [`train_with`].
pub fn train(
    cfg: &TrainConfig,
    corpus: &[CorpusRecord],
) -> Result<(EncoderParams, TrainingLog), HarnessError> {
    train_with(cfg, corpus, None)
}

/// Mini-batch AMSGrad on the joint loss. Batches are whole documents so
/// every conjunction triple lies inside one batch. When a dev split exists
/// the parameters of the best dev epoch are returned (temporal micro-F1,
/// or subevent micro-F1 for a subevent-only model).
pub fn train_with(
    cfg: &TrainConfig,
    corpus: &[CorpusRecord],
    commonsense: Option<CommonsenseSource<'_>>,
) -> Result<(EncoderParams, TrainingLog), HarnessError> {
    cfg.validate()?;
    if cfg.flags.commonsense && commonsense.is_none() {
        return Err(HarnessError::Config("commonsense flag set without a feature source".into()));
    }
    for r in corpus {
        r.document.validate(cfg.dims.d_pos)?;
        if r.document.events.len() != r.gold.n_events() {
            return Err(HarnessError::Mismatch(r.document.id.clone()));
        }
    }
    let mut params = init_params(cfg.seed, cfg.dims);
    let mut log = TrainingLog::default();
    let train: Vec<&CorpusRecord> = corpus.iter().filter(|r| r.split == Split::Train).collect();
    let dev: Vec<&CorpusRecord> = corpus.iter().filter(|r| r.split == Split::Dev).collect();
    if cfg.epochs == 0 {
        return Ok((params, log));
    }
    let counts = label_counts(corpus, cfg.heads());
    if counts.iter().all(|&c| c == 0) {
        return Err(HarnessError::NoTrainingData);
    }
    let weights = if cfg.balance_labels {
        LabelWeights::inverse_frequency(&counts)
    } else {
        LabelWeights::default()
    };
    let loss_cfg = cfg.loss_config();
    let mut order_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0001);
    let mut triple_rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_0002);
    let mut opt = AmsGrad::new(&params.set, cfg.learning_rate, cfg.optimizer);
    let mut grads = Gradients::zeros_like(&params.set);
    let mut best: Option<(f64, usize, EncoderParams)> = None;
    let select = if cfg.flags.joint { Head::Temporal } else { cfg.task };

    for epoch in 0..cfg.epochs {
        let mut order: Vec<usize> = (0..train.len()).collect();
        order.shuffle(&mut order_rng);
        let mut total = LossBreakdown::default();
        let mut batch = 0;
        let mut start = 0;
        while start < order.len() {
            let mut end = start;
            let mut pairs = 0;
            while end < order.len() && pairs < cfg.batch_pairs {
                let n = train[order[end]].gold.n_events();
                pairs += n * n.saturating_sub(1) / 2;
                end += 1;
            }
            grads.fill_zero();
            for &k in &order[start..end] {
                let record = train[k];
                let terms = document_terms(record, cfg, &loss_cfg, &mut triple_rng);
                let mut g = Graph::new(&params.set);
                let hs = encode_document_var(&mut g, &params, &record.document);
                let doc = &record.document;
                let cs = commonsense.map(|f| move |i: usize, j: usize| f(doc, i, j));
                let cs_ref = cs.as_ref().map(|f| f as &dyn Fn(usize, usize) -> Option<Vec<f64>>);
                let logits = score_all_pairs_var(&mut g, &params, &hs, cs_ref);
                let bank = ScoreBank::from_logits(&mut g, &logits, cfg.prob_floor);
                let (loss, parts) = joint_loss_var(&mut g, &bank, &terms, &weights, &loss_cfg);
                if !parts.is_finite() {
                    return Err(HarnessError::Divergence { epoch, batch });
                }
                total.accumulate(&parts);
                g.backward_into(loss, &mut grads);
            }
            let scale = 1.0 / pairs.max(1) as f64;
            grads.scale(scale);
            if !grads.is_finite() {
                return Err(HarnessError::Divergence { epoch, batch });
            }
            opt.update(&mut params.set, &grads);
            batch += 1;
            start = end;
        }
        total.lambda_s = loss_cfg.lambda_s;
        total.lambda_c = loss_cfg.lambda_c;
        let dev_scores = if dev.is_empty() {
            None
        } else {
            let problems = score_records(&params, dev.iter().copied(), cfg.prob_floor)?;
            let golds: Vec<RelationGraph> = dev.iter().map(|r| r.gold.clone()).collect();
            let preds: Vec<RelationGraph> = problems.iter().map(greedy_graph).collect();
            let t = evaluate_temprel(&preds, &golds)?;
            let s = evaluate_subevent(&preds, &golds)?;
            let scores = DevScores { temporal_f1: t.f1, subevent_f1: s.f1_micro };
            let key = match select {
                Head::Temporal => scores.temporal_f1,
                Head::Subevent => scores.subevent_f1,
            };
            if best.as_ref().is_none_or(|(b, _, _)| key > *b) {
                best = Some((key, epoch, params.clone()));
            }
            Some(scores)
        };
        log.epochs.push(EpochLog { epoch, loss: total, dev: dev_scores });
    }
    if let Some((_, epoch, p)) = best {
        log.selected_epoch = Some(epoch);
        params = p;
    }
    Ok((params, log))
}

/// Decoding problems for each record, from the model's pair scores.
pub fn score_records<'a>(
    params: &EncoderParams,
    records: impl IntoIterator<Item = &'a CorpusRecord>,
    floor: f64,
) -> Result<Vec<DecodingProblem>, HarnessError> {
    records
        .into_iter()
        .map(|r| {
            let n = r.document.events.len();
            let scores = score_document(&r.document, params, floor)?;
            Ok(DecodingProblem::new(n, scores)?)
        })
        .collect()
}

/// Per-head argmax on every canonical pair, heads decoded independently.
pub fn greedy_graph(problem: &DecodingProblem) -> RelationGraph {
    let n = problem.n_events();
    let mut g = RelationGraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            let s = problem.scores(i, j);
            g.set(i, j, greedy_decode(s, Head::Temporal));
            g.set(i, j, greedy_decode(s, Head::Subevent));
        }
    }
    g
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_counts(correct: usize, predicted: usize, gold: usize) -> Prf {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(correct, predicted);
        let recall = ratio(correct, gold);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf { precision, recall, f1 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SubeventScores {
    pub pc: Prf,
    pub cp: Prf,
    pub micro: Prf,
    pub f1_pc: f64,
    pub f1_cp: f64,
    pub f1_micro: f64,
}

fn check_shapes(pred: &[RelationGraph], gold: &[RelationGraph]) -> Result<(), HarnessError> {
    if pred.len() != gold.len() {
        return Err(HarnessError::Mismatch(alloc::format!(
            "{} predicted documents, {} gold",
            pred.len(),
            gold.len()
        )));
    }
    for (k, (p, g)) in pred.iter().zip(gold).enumerate() {
        if p.n_events() != g.n_events() {
            return Err(HarnessError::Mismatch(alloc::format!(
                "document {k}: {} predicted events, {} gold",
                p.n_events(),
                g.n_events()
            )));
        }
    }
    Ok(())
}

fn predicted(p: &RelationGraph, doc: usize, i: usize, j: usize, head: Head) -> Result<RelationLabel, HarnessError> {
    p.get(i, j, head).ok_or_else(|| {
        HarnessError::Mismatch(alloc::format!("document {doc}: no {head:?} prediction for ({i}, {j})"))
    })
}

/// Micro precision, recall and F1 over gold-labelled pairs, Vague acting
/// as the null class on both sides.
pub fn evaluate_temprel(pred: &[RelationGraph], gold: &[RelationGraph]) -> Result<Prf, HarnessError> {
    check_shapes(pred, gold)?;
    let (mut correct, mut predicted_pos, mut gold_pos) = (0, 0, 0);
    for (k, (p, g)) in pred.iter().zip(gold).enumerate() {
        for (i, j, l) in g.pairs() {
            let Some(gl) = l.temporal else { continue };
            let pl = predicted(p, k, i, j, Head::Temporal)?;
            let (pv, gv) = (pl != RelationLabel::Vague, gl != RelationLabel::Vague);
            predicted_pos += pv as usize;
            gold_pos += gv as usize;
            correct += (pv && pl == gl) as usize;
        }
    }
    Ok(Prf::from_counts(correct, predicted_pos, gold_pos))
}

/// Per-label and micro F1 for Parent-Child and Child-Parent over pairs
/// `(e1, e2)` with `e1` first in the text. Gold graphs are closed under
/// the induction table before scoring.
pub fn evaluate_subevent(
    pred: &[RelationGraph],
    gold: &[RelationGraph],
) -> Result<SubeventScores, HarnessError> {
    check_shapes(pred, gold)?;
    // [correct, predicted, gold] for PC and CP.
    let mut c = [[0usize; 3]; 2];
    for (k, (p, g)) in pred.iter().zip(gold).enumerate() {
        let closed = transitive_closure(g).map_err(|source| HarnessError::Conflict { doc: k, source })?;
        for (i, j, l) in closed.pairs() {
            let Some(gl) = l.subevent else { continue };
            let pl = predicted(p, k, i, j, Head::Subevent)?;
            for (slot, label) in [RelationLabel::ParentChild, RelationLabel::ChildParent].into_iter().enumerate() {
                c[slot][0] += (pl == label && gl == label) as usize;
                c[slot][1] += (pl == label) as usize;
                c[slot][2] += (gl == label) as usize;
            }
        }
    }
    let pc = Prf::from_counts(c[0][0], c[0][1], c[0][2]);
    let cp = Prf::from_counts(c[1][0], c[1][1], c[1][2]);
    let micro = Prf::from_counts(c[0][0] + c[1][0], c[0][1] + c[1][1], c[0][2] + c[1][2]);
    Ok(SubeventScores { pc, cp, micro, f1_pc: pc.f1, f1_cp: cp.f1, f1_micro: micro.f1 })
}

/// Violations pooled over all graphs.
pub fn violation_report(graphs: &[RelationGraph]) -> ViolationReport {
    let mut report = ViolationReport::default();
    for g in graphs {
        report.merge(count_violations(g));
    }
    report
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MetricsReport {
    pub temporal: Prf,
    pub subevent: SubeventScores,
    /// Fraction of ordered test triples violating the induction table.
    pub violation_rate: f64,
    pub loss_curve: Vec<LossBreakdown>,
}

/// How test documents are turned into graphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoding {
    /// F1 from independent per-head argmax; violations counted on the
    /// subevent-priority event complexes.
    Local,
    /// Everything from exact global inference over windows of at most
    /// `max_events` events.
    Global { max_events: usize },
}

/// Graphs used for F1 and for the violation rate under `decoding`.
pub fn decode_all(
    problems: &[DecodingProblem],
    decoding: Decoding,
) -> Result<(Vec<RelationGraph>, Vec<RelationGraph>), HarnessError> {
    match decoding {
        Decoding::Local => Ok((
            problems.iter().map(greedy_graph).collect(),
            problems.iter().map(decode_event_complex).collect(),
        )),
        Decoding::Global { max_events } => {
            let graphs = problems
                .iter()
                .map(|p| global_decode_windowed(p, max_events).map(|(g, _)| g))
                .collect::<Result<Vec<_>, _>>()?;
            Ok((graphs.clone(), graphs))
        }
    }
}

pub fn evaluate_problems(
    problems: &[DecodingProblem],
    gold: &[RelationGraph],
    decoding: Decoding,
) -> Result<MetricsReport, HarnessError> {
    let (scored, assembled) = decode_all(problems, decoding)?;
    Ok(MetricsReport {
        temporal: evaluate_temprel(&scored, gold)?,
        subevent: evaluate_subevent(&scored, gold)?,
        violation_rate: violation_report(&assembled).rate(),
        loss_curve: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AblationRow {
    pub name: String,
    pub report: MetricsReport,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AblationTable {
    pub rows: Vec<AblationRow>,
}

impl AblationTable {
    pub fn row(&self, name: &str) -> Option<&MetricsReport> {
        self.rows.iter().find(|r| r.name == name).map(|r| &r.report)
    }

    /// Fixed-width text rendering, one line per row.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<20} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>9}",
            "model", "T-P", "T-R", "T-F1", "PC-F1", "CP-F1", "S-F1", "viol"
        );
        for r in &self.rows {
            let m = &r.report;
            let _ = writeln!(
                out,
                "{:<20} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>7.4} {:>9.5}",
                r.name,
                m.temporal.precision,
                m.temporal.recall,
                m.temporal.f1,
                m.subevent.f1_pc,
                m.subevent.f1_cp,
                m.subevent.f1_micro,
                m.violation_rate
            );
        }
        out
    }
}

pub const ROW_SINGLE: &str = "single-task";
pub const ROW_JOINT: &str = "joint";
pub const ROW_TASK: &str = "+task";
pub const ROW_CROSS: &str = "+cross-task";
pub const ROW_GLOBAL: &str = "+global";

fn curve(log: &TrainingLog) -> Vec<LossBreakdown> {
    log.epochs.iter().map(|e| e.loss).collect()
}

/// Runs the ladder single-task, joint, +task, +cross-task, +global with
/// the seed and hyperparameters of `base`. The single-task row pairs a
/// temporal-only and a subevent-only model; +global reuses the +cross-task
/// parameters and only changes decoding. Rows are scored on the test split.
pub fn run_ablation(base: &TrainConfig, corpus: &[CorpusRecord]) -> Result<AblationTable, HarnessError> {
    let test: Vec<&CorpusRecord> = corpus.iter().filter(|r| r.split == Split::Test).collect();
    if test.is_empty() {
        return Err(HarnessError::Config("ablation needs a test split".into()));
    }
    let gold: Vec<RelationGraph> = test.iter().map(|r| r.gold.clone()).collect();
    let with = |flags: AblationFlags, task: Head| TrainConfig { flags, task, ..base.clone() };
    let off = AblationFlags { global_inference: false, ..AblationFlags::ANNOTATION_ONLY };
    let mut table = AblationTable::default();

    let single = AblationFlags { joint: false, ..off };
    let (pt, lt) = train(&with(single, Head::Temporal), corpus)?;
    let (ps, ls) = train(&with(single, Head::Subevent), corpus)?;
    let a = score_records(&pt, test.iter().copied(), base.prob_floor)?;
    let b = score_records(&ps, test.iter().copied(), base.prob_floor)?;
    let combined: Vec<DecodingProblem> = a
        .iter()
        .zip(&b)
        .map(|(x, y)| {
            let n = x.n_events();
            let mut scores = Vec::with_capacity(n * n.saturating_sub(1));
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let t = x.scores(i, j).temporal;
                        let s = y.scores(i, j).subevent;
                        scores.push(PairScores { temporal: t, subevent: s });
                    }
                }
            }
            DecodingProblem::new(n, scores).expect("same shape")
        })
        .collect();
    let mut report = evaluate_problems(&combined, &gold, Decoding::Local)?;
    report.loss_curve = curve(&lt);
    for (acc, e) in report.loss_curve.iter_mut().zip(curve(&ls)) {
        acc.accumulate(&e);
    }
    table.rows.push(AblationRow { name: ROW_SINGLE.into(), report });

    let mut last = None;
    for (name, flags) in [
        (ROW_JOINT, off),
        (ROW_TASK, AblationFlags { task_constraints: true, ..off }),
        (ROW_CROSS, AblationFlags { task_constraints: true, cross_task_constraints: true, ..off }),
    ] {
        let (p, log) = train(&with(flags, base.task), corpus)?;
        let problems = score_records(&p, test.iter().copied(), base.prob_floor)?;
        let mut report = evaluate_problems(&problems, &gold, Decoding::Local)?;
        report.loss_curve = curve(&log);
        table.rows.push(AblationRow { name: name.into(), report: report.clone() });
        last = Some((problems, report));
    }
    let (problems, cross) = last.expect("ladder is non-empty");
    let mut report =
        evaluate_problems(&problems, &gold, Decoding::Global { max_events: base.max_events })?;
    report.loss_curve = cross.loss_curve;
    table.rows.push(AblationRow { name: ROW_GLOBAL.into(), report });
    Ok(table)
}
