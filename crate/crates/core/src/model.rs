//! Event-pair encoder and two-headed scorer.
//!
//! Tokens are embedded (trainable table, or externally supplied vectors),
//! concatenated with a one-hot POS tag and run through a single-layer
//! bidirectional recurrent encoder. An event's embedding is the pair of
//! hidden states at its trigger token. A pair is featurised as
//! `[h1; h2; h1 ⊙ h2; h1 - h2]` and scored by a one-hidden-layer MLP with
//! eight outputs, split 4/4 and normalised per head.
//!
//! The first MLP layer is stored as one column block per feature segment.
//! The product with the full feature vector is the same, but the `h1`,
//! `h2` and difference blocks can then be applied once per event instead of
//! once per pair.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::autodiff::{Graph, ParamId, ParamSet, Tensor, Var};
use crate::losses::{directed_slot, PairScores, ScoreBank};
use crate::math;

/// Collapsed part-of-speech inventory (one-hot width 18).
pub const POS_TAGS: [&str; 18] = [
    "NN", "NNP", "PRP", "VB", "MD", "JJ", "RB", "IN", "TO", "DT", "CC", "CD", "WH", "POS", "RP",
    "UH", "PUNCT", "X",
];

pub fn pos_id(tag: &str) -> Option<usize> {
    POS_TAGS.iter().position(|t| *t == tag)
}

/// Vocabulary id reserved for out-of-vocabulary tokens.
pub const OOV: usize = 0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("feature width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("document {0} has no tokens")]
    EmptyDocument(String),
    #[error("event index {index} out of range for {len} tokens")]
    EventOutOfRange { index: usize, len: usize },
    #[error("POS id {0} out of range")]
    PosOutOfRange(usize),
    #[error("parameter {0:?} missing or misshapen")]
    BadParameter(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CellType {
    Tanh,
    Lstm,
}

impl CellType {
    pub fn name(self) -> &'static str {
        match self {
            CellType::Tanh => "tanh",
            CellType::Lstm => "lstm",
        }
    }

    pub fn from_name(s: &str) -> Option<CellType> {
        match s {
            "tanh" => Some(CellType::Tanh),
            "lstm" => Some(CellType::Lstm),
            _ => None,
        }
    }

    fn gates(self) -> usize {
        match self {
            CellType::Tanh => 1,
            CellType::Lstm => 4,
        }
    }
}

/// Model dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dims {
    pub vocab: usize,
    pub d_tok: usize,
    pub d_pos: usize,
    pub d_h: usize,
    /// Width of the optional per-pair commonsense feature channel.
    pub commonsense: usize,
    pub cell: CellType,
}

impl Default for Dims {
    fn default() -> Self {
        Dims {
            vocab: 512,
            d_tok: 32,
            d_pos: POS_TAGS.len(),
            d_h: 64,
            commonsense: 0,
            cell: CellType::Lstm,
        }
    }
}

impl Dims {
    pub fn input_width(&self) -> usize {
        self.d_tok + self.d_pos
    }

    /// Width of an event embedding (forward and backward states).
    pub fn embedding_width(&self) -> usize {
        2 * self.d_h
    }

    pub fn feature_width(&self) -> usize {
        4 * self.embedding_width()
    }

    pub fn mlp_input(&self) -> usize {
        self.feature_width() + self.commonsense
    }

    /// Mean of the MLP's input and output widths.
    pub fn mlp_hidden(&self) -> usize {
        (self.mlp_input() + 8) / 2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct CellIds {
    wx: ParamId,
    wh: ParamId,
    b: ParamId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ParamIds {
    emb: ParamId,
    fwd: CellIds,
    bwd: CellIds,
    w1_first: ParamId,
    w1_second: ParamId,
    w1_prod: ParamId,
    w1_diff: ParamId,
    w1_cs: Option<ParamId>,
    b1: ParamId,
    w2: ParamId,
    b2: ParamId,
}

/// Trainable parameters plus the dimensions they were built for.
#[derive(Clone, Debug, PartialEq)]
pub struct EncoderParams {
    pub dims: Dims,
    pub set: ParamSet,
    ids: ParamIds,
}

/// `(name, rows, cols, fan_in)` for every tensor, in storage order.
fn layout(d: &Dims) -> Vec<(String, usize, usize, usize)> {
    let gates = d.cell.gates() * d.d_h;
    let e = d.embedding_width();
    let hid = d.mlp_hidden();
    let mut v: Vec<(String, usize, usize, usize)> =
        vec![("embedding".into(), d.vocab, d.d_tok, d.d_tok)];
    for dir in ["fwd", "bwd"] {
        v.push((alloc::format!("rnn.{dir}.wx"), gates, d.input_width(), d.input_width()));
        v.push((alloc::format!("rnn.{dir}.wh"), gates, d.d_h, d.d_h));
        v.push((alloc::format!("rnn.{dir}.b"), gates, 1, d.input_width()));
    }
    for block in ["first", "second", "prod", "diff"] {
        v.push((alloc::format!("mlp.w1.{block}"), hid, e, d.mlp_input()));
    }
    if d.commonsense > 0 {
        v.push(("mlp.w1.commonsense".into(), hid, d.commonsense, d.mlp_input()));
    }
    v.push(("mlp.b1".into(), hid, 1, d.mlp_input()));
    v.push(("mlp.w2".into(), 8, hid, hid));
    v.push(("mlp.b2".into(), 8, 1, hid));
    v
}

impl EncoderParams {
    /// Re-binds a parameter set (e.g. loaded from a checkpoint) to `dims`,
    /// checking every name and shape.
    pub fn from_parts(dims: Dims, set: ParamSet) -> Result<Self, ModelError> {
        let expected = layout(&dims);
        if expected.len() != set.len() {
            return Err(ModelError::BadParameter(alloc::format!(
                "expected {} tensors, found {}",
                expected.len(),
                set.len()
            )));
        }
        let find = |name: &str| -> Result<ParamId, ModelError> {
            let id = set.find(name).ok_or_else(|| ModelError::BadParameter(name.into()))?;
            let (_, rows, cols, _) = expected.iter().find(|e| e.0 == name).unwrap();
            let t = set.get(id);
            if t.rows != *rows || t.cols != *cols {
                return Err(ModelError::BadParameter(name.into()));
            }
            Ok(id)
        };
        let cell = |dir: &str| -> Result<CellIds, ModelError> {
            Ok(CellIds {
                wx: find(&alloc::format!("rnn.{dir}.wx"))?,
                wh: find(&alloc::format!("rnn.{dir}.wh"))?,
                b: find(&alloc::format!("rnn.{dir}.b"))?,
            })
        };
        let ids = ParamIds {
            emb: find("embedding")?,
            fwd: cell("fwd")?,
            bwd: cell("bwd")?,
            w1_first: find("mlp.w1.first")?,
            w1_second: find("mlp.w1.second")?,
            w1_prod: find("mlp.w1.prod")?,
            w1_diff: find("mlp.w1.diff")?,
            w1_cs: if dims.commonsense > 0 { Some(find("mlp.w1.commonsense")?) } else { None },
            b1: find("mlp.b1")?,
            w2: find("mlp.w2")?,
            b2: find("mlp.b2")?,
        };
        Ok(EncoderParams { dims, set, ids })
    }

    pub fn into_parts(self) -> (Dims, ParamSet) {
        (self.dims, self.set)
    }
}

/// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation, reproducible
/// from `seed`.
pub fn init_params(seed: u64, dims: Dims) -> EncoderParams {
    assert!(
        dims.vocab > 0 && dims.d_tok > 0 && dims.d_h > 0,
        "dimensions must be positive: {dims:?}"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = ParamSet::new();
    for (name, rows, cols, fan_in) in layout(&dims) {
        let bound = 1.0 / math::sqrt(fan_in as f64);
        let data = (0..rows * cols).map(|_| rng.gen_range(-bound..bound)).collect();
        set.add(name, Tensor::from_vec(rows, cols, data));
    }
    EncoderParams::from_parts(dims, set).expect("layout is self-consistent")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    pub text: String,
    pub vocab_id: usize,
    pub pos: usize,
}

/// A tokenised document and the token positions of its event triggers.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Document {
    pub id: String,
    pub tokens: Vec<Token>,
    pub events: Vec<usize>,
}

impl Document {
    pub fn validate(&self, d_pos: usize) -> Result<(), ModelError> {
        if self.tokens.is_empty() {
            return Err(ModelError::EmptyDocument(self.id.clone()));
        }
        for &e in &self.events {
            if e >= self.tokens.len() {
                return Err(ModelError::EventOutOfRange { index: e, len: self.tokens.len() });
            }
        }
        if let Some(t) = self.tokens.iter().find(|t| t.pos >= d_pos) {
            return Err(ModelError::PosOutOfRange(t.pos));
        }
        Ok(())
    }
}

fn run_cell(
    g: &mut Graph<'_>,
    cell: CellType,
    ids: CellIds,
    d_h: usize,
    inputs: &[Var],
    reverse: bool,
) -> Vec<Var> {
    let mut states: Vec<Option<Var>> = vec![None; inputs.len()];
    let mut h = g.input(vec![0.0; d_h]);
    let mut c = g.input(vec![0.0; d_h]);
    let bias = g.param(ids.b);
    let order: Vec<usize> = if reverse {
        (0..inputs.len()).rev().collect()
    } else {
        (0..inputs.len()).collect()
    };
    for t in order {
        let zx = g.matvec(ids.wx, inputs[t]);
        let zh = g.matvec(ids.wh, h);
        let z = g.add(zx, zh);
        let z = g.add(z, bias);
        h = match cell {
            CellType::Tanh => g.tanh(z),
            CellType::Lstm => {
                let i = g.slice(z, 0, d_h);
                let f = g.slice(z, d_h, d_h);
                let u = g.slice(z, 2 * d_h, d_h);
                let o = g.slice(z, 3 * d_h, d_h);
                let i = g.sigmoid(i);
                let f = g.sigmoid(f);
                let u = g.tanh(u);
                let o = g.sigmoid(o);
                let keep = g.mul(f, c);
                let write = g.mul(i, u);
                c = g.add(keep, write);
                let tc = g.tanh(c);
                g.mul(o, tc)
            }
        };
        states[t] = Some(h);
    }
    states.into_iter().map(|s| s.unwrap()).collect()
}

fn one_hot(width: usize, k: usize) -> Vec<f64> {
    let mut v = vec![0.0; width];
    v[k] = 1.0;
    v
}

/// Per-token encoder inputs from the embedding table; unknown vocabulary
/// ids fall back to [`OOV`].
pub fn token_inputs(g: &mut Graph<'_>, params: &EncoderParams, doc: &Document) -> Vec<Var> {
    let d = params.dims;
    doc.tokens
        .iter()
        .map(|t| {
            let id = if t.vocab_id < d.vocab { t.vocab_id } else { OOV };
            let e = g.row(params.ids.emb, id);
            let p = g.input(one_hot(d.d_pos, t.pos));
            g.concat(&[e, p])
        })
        .collect()
}

/// Per-token encoder inputs from precomputed `d_tok`-wide vectors (e.g. a
/// frozen language model), concatenated with the POS one-hot.
pub fn precomputed_inputs(
    g: &mut Graph<'_>,
    params: &EncoderParams,
    doc: &Document,
    vectors: &[Vec<f64>],
) -> Result<Vec<Var>, ModelError> {
    let d = params.dims;
    if vectors.len() != doc.tokens.len() {
        return Err(ModelError::WidthMismatch(vectors.len(), doc.tokens.len()));
    }
    let mut out = Vec::with_capacity(vectors.len());
    for (v, t) in vectors.iter().zip(&doc.tokens) {
        if v.len() != d.d_tok {
            return Err(ModelError::WidthMismatch(v.len(), d.d_tok));
        }
        let e = g.input(v.clone());
        let p = g.input(one_hot(d.d_pos, t.pos));
        out.push(g.concat(&[e, p]));
    }
    Ok(out)
}

/// Event embeddings (`2 d_h` wide) from per-token inputs.
pub fn encode_inputs(
    g: &mut Graph<'_>,
    params: &EncoderParams,
    inputs: &[Var],
    events: &[usize],
) -> Vec<Var> {
    let d = params.dims;
    let fwd = run_cell(g, d.cell, params.ids.fwd, d.d_h, inputs, false);
    let bwd = run_cell(g, d.cell, params.ids.bwd, d.d_h, inputs, true);
    events.iter().map(|&t| g.concat(&[fwd[t], bwd[t]])).collect()
}

pub fn encode_document_var(g: &mut Graph<'_>, params: &EncoderParams, doc: &Document) -> Vec<Var> {
    let inputs = token_inputs(g, params, doc);
    encode_inputs(g, params, &inputs, &doc.events)
}

/// One embedding per event trigger, in `doc.events` order.
pub fn encode_document(doc: &Document, params: &EncoderParams) -> Result<Vec<Vec<f64>>, ModelError> {
    doc.validate(params.dims.d_pos)?;
    let mut g = Graph::new(&params.set);
    let hs = encode_document_var(&mut g, params, doc);
    Ok(hs.iter().map(|h| g.value(*h).to_vec()).collect())
}

/// `[h1; h2; h1 ⊙ h2; h1 - h2]`.
pub fn pair_features(h1: &[f64], h2: &[f64]) -> Result<Vec<f64>, ModelError> {
    if h1.len() != h2.len() {
        return Err(ModelError::WidthMismatch(h1.len(), h2.len()));
    }
    let mut out = Vec::with_capacity(4 * h1.len());
    out.extend_from_slice(h1);
    out.extend_from_slice(h2);
    out.extend(h1.iter().zip(h2).map(|(a, b)| a * b));
    out.extend(h1.iter().zip(h2).map(|(a, b)| a - b));
    Ok(out)
}

pub fn pair_features_var(g: &mut Graph<'_>, h1: Var, h2: Var) -> Var {
    let prod = g.mul(h1, h2);
    let diff = g.sub(h1, h2);
    g.concat(&[h1, h2, prod, diff])
}

fn mlp_head(
    g: &mut Graph<'_>,
    params: &EncoderParams,
    pre: Var,
    commonsense: Option<Var>,
) -> Var {
    let ids = &params.ids;
    let mut z = pre;
    if let (Some(cs), Some(w)) = (commonsense, ids.w1_cs) {
        let c = g.matvec(w, cs);
        z = g.add(z, c);
    }
    let b1 = g.param(ids.b1);
    let z = g.add(z, b1);
    let hdn = g.tanh(z);
    let out = g.matvec(ids.w2, hdn);
    let b2 = g.param(ids.b2);
    g.add(out, b2)
}

/// Eight logits for an explicit feature vector (`4 x` embedding width).
pub fn score_features_var(
    g: &mut Graph<'_>,
    params: &EncoderParams,
    features: Var,
    commonsense: Option<Var>,
) -> Var {
    let e = params.dims.embedding_width();
    let ids = params.ids;
    let mut pre = None;
    for (k, w) in [ids.w1_first, ids.w1_second, ids.w1_prod, ids.w1_diff].into_iter().enumerate() {
        let seg = g.slice(features, k * e, e);
        let z = g.matvec(w, seg);
        pre = Some(match pre {
            None => z,
            Some(p) => g.add(p, z),
        });
    }
    mlp_head(g, params, pre.unwrap(), commonsense)
}

/// Scores for a feature vector. A missing commonsense channel is treated
/// as all zeros.
pub fn score_pair(
    features: &[f64],
    params: &EncoderParams,
    commonsense: Option<&[f64]>,
    floor: f64,
) -> Result<PairScores, ModelError> {
    let d = params.dims;
    if features.len() != d.feature_width() {
        return Err(ModelError::WidthMismatch(features.len(), d.feature_width()));
    }
    if let Some(cs) = commonsense {
        if cs.len() != d.commonsense {
            return Err(ModelError::WidthMismatch(cs.len(), d.commonsense));
        }
    }
    let mut g = Graph::new(&params.set);
    let f = g.input(features.to_vec());
    let cs = commonsense.map(|c| g.input(c.to_vec()));
    let z = score_features_var(&mut g, params, f, cs);
    let logits: [f64; 8] = g.value(z).try_into().expect("8 logits");
    Ok(PairScores::from_logits(&logits, floor))
}

/// Logits for every directed pair of a document, in
/// [`directed_slot`] order, sharing per-event partial products.
pub fn score_all_pairs_var(
    g: &mut Graph<'_>,
    params: &EncoderParams,
    embeddings: &[Var],
    commonsense: Option<&dyn Fn(usize, usize) -> Option<Vec<f64>>>,
) -> Vec<Var> {
    let ids = params.ids;
    let n = embeddings.len();
    let first: Vec<Var> = embeddings.iter().map(|h| g.matvec(ids.w1_first, *h)).collect();
    let second: Vec<Var> = embeddings.iter().map(|h| g.matvec(ids.w1_second, *h)).collect();
    let diff: Vec<Var> = embeddings.iter().map(|h| g.matvec(ids.w1_diff, *h)).collect();
    let mut out = vec![None; n * n.saturating_sub(1)];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let prod = g.mul(embeddings[i], embeddings[j]);
            let zp = g.matvec(ids.w1_prod, prod);
            let a = g.add(first[i], second[j]);
            let b = g.sub(diff[i], diff[j]);
            let z = g.add(a, b);
            let z = g.add(z, zp);
            let cs = commonsense.and_then(|f| f(i, j)).map(|v| g.input(v));
            out[directed_slot(n, i, j)] = Some(mlp_head(g, params, z, cs));
        }
    }
    out.into_iter().map(|v| v.unwrap()).collect()
}

/// Scores of every directed pair of `doc`, indexed by [`directed_slot`].
pub fn score_document(
    doc: &Document,
    params: &EncoderParams,
    floor: f64,
) -> Result<Vec<PairScores>, ModelError> {
    doc.validate(params.dims.d_pos)?;
    let mut g = Graph::new(&params.set);
    let hs = encode_document_var(&mut g, params, doc);
    let logits = score_all_pairs_var(&mut g, params, &hs, None);
    let bank = ScoreBank::from_logits(&mut g, &logits, floor);
    Ok((0..logits.len()).map(|s| bank.scores(&g, s)).collect())
}
