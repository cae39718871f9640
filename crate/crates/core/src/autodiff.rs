//! A small define-by-run reverse-mode differentiation tape.
//!
//! Nodes hold vectors; matrices only appear as trainable parameters, which
//! live in a [`ParamSet`] outside the tape. Values are computed eagerly when
//! a node is created, so a [`Graph`] doubles as a forward evaluator.
//! [`Graph::backward`] accumulates parameter gradients into [`Gradients`].
//!
//! The op set is deliberately narrow: matrix-vector products, embedding row
//! lookups, elementwise arithmetic, the activations the scorer needs,
//! per-vector softmax, natural log, absolute value, sums, and the indexing
//! ops (concat, slice, gather) used to vectorise the consistency losses.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::math;

/// A dense row-major matrix; vectors are `n x 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Tensor {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Tensor { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len(), "tensor shape {rows}x{cols} vs {} values", data.len());
        Tensor { rows, cols, data }
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub(crate) usize);

impl ParamId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Named trainable tensors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ParamSet {
    names: Vec<String>,
    tensors: Vec<Tensor>,
}

impl ParamSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: impl Into<String>, tensor: Tensor) -> ParamId {
        self.names.push(name.into());
        self.tensors.push(tensor);
        ParamId(self.tensors.len() - 1)
    }

    pub fn get(&self, id: ParamId) -> &Tensor {
        &self.tensors[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Tensor {
        &mut self.tensors[id.0]
    }

    pub fn name(&self, id: ParamId) -> &str {
        &self.names[id.0]
    }

    pub fn find(&self, name: &str) -> Option<ParamId> {
        self.names.iter().position(|n| n == name).map(ParamId)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ParamId> {
        (0..self.tensors.len()).map(ParamId)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Tensor)> {
        self.names.iter().map(String::as_str).zip(&self.tensors)
    }

    /// Total number of scalar parameters.
    pub fn scalar_count(&self) -> usize {
        self.tensors.iter().map(Tensor::len).sum()
    }
}

/// Per-parameter gradient buffers laid out like a [`ParamSet`].
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    data: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(params: &ParamSet) -> Self {
        Gradients {
            data: params.tensors.iter().map(|t| vec![0.0; t.len()]).collect(),
        }
    }

    pub fn get(&self, id: ParamId) -> &[f64] {
        &self.data[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut [f64] {
        &mut self.data[id.0]
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, c: f64) {
        for g in &mut self.data {
            g.iter_mut().for_each(|x| *x *= c);
        }
    }

    pub fn fill_zero(&mut self) {
        for g in &mut self.data {
            g.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().flatten().all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()))
    }
}

/// Handle to a node of a [`Graph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

#[derive(Clone, Debug)]
enum Op {
    Param(ParamId),
    Input,
    Row { table: ParamId, row: usize },
    MatVec { w: ParamId, x: Var },
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Affine { x: Var, scale: f64 },
    Tanh(Var),
    Sigmoid(Var),
    Relu(Var),
    Abs(Var),
    Log(Var),
    Softmax(Var),
    Sum(Var),
    Concat(Vec<Var>),
    Slice { x: Var, start: usize },
    Gather { x: Var, index: Vec<u32> },
}

#[derive(Clone, Debug)]
struct Node {
    op: Op,
    value: Vec<f64>,
}

/// A single-use computation graph borrowing its parameters.
pub struct Graph<'p> {
    params: &'p ParamSet,
    nodes: Vec<Node>,
}

impl<'p> Graph<'p> {
    pub fn new(params: &'p ParamSet) -> Self {
        Graph { params, nodes: Vec::new() }
    }

    pub fn params(&self) -> &'p ParamSet {
        self.params
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, op: Op, value: Vec<f64>) -> Var {
        self.nodes.push(Node { op, value });
        Var(self.nodes.len() - 1)
    }

    pub fn value(&self, v: Var) -> &[f64] {
        match &self.nodes[v.0].op {
            Op::Param(id) => &self.params.get(*id).data,
            _ => &self.nodes[v.0].value,
        }
    }

    pub fn scalar(&self, v: Var) -> f64 {
        let x = self.value(v);
        debug_assert_eq!(x.len(), 1, "scalar() on a vector node");
        x[0]
    }

    pub fn width(&self, v: Var) -> usize {
        self.value(v).len()
    }

    /// A parameter tensor as a flat vector node.
    pub fn param(&mut self, id: ParamId) -> Var {
        self.push(Op::Param(id), Vec::new())
    }

    /// A constant.
    pub fn input(&mut self, value: Vec<f64>) -> Var {
        self.push(Op::Input, value)
    }

    pub fn constant(&mut self, x: f64) -> Var {
        self.input(vec![x])
    }

    /// Row `row` of a parameter matrix (embedding lookup).
    pub fn row(&mut self, table: ParamId, row: usize) -> Var {
        let value = self.params.get(table).row(row).to_vec();
        self.push(Op::Row { table, row }, value)
    }

    pub fn matvec(&mut self, w: ParamId, x: Var) -> Var {
        let t = self.params.get(w);
        let xv = self.value(x);
        assert_eq!(t.cols, xv.len(), "matvec {} x {} against width {}", t.rows, t.cols, xv.len());
        let value = (0..t.rows)
            .map(|r| t.row(r).iter().zip(xv).map(|(a, b)| a * b).sum())
            .collect();
        self.push(Op::MatVec { w, x }, value)
    }

    fn zip_with(&mut self, a: Var, b: Var, op: Op, f: impl Fn(f64, f64) -> f64) -> Var {
        let (av, bv) = (self.value(a), self.value(b));
        assert_eq!(av.len(), bv.len(), "elementwise width mismatch");
        let value = av.iter().zip(bv).map(|(x, y)| f(*x, *y)).collect();
        self.push(op, value)
    }

    fn map(&mut self, x: Var, op: Op, f: impl Fn(f64) -> f64) -> Var {
        let value = self.value(x).iter().map(|v| f(*v)).collect();
        self.push(op, value)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.zip_with(a, b, Op::Add(a, b), |x, y| x + y)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.zip_with(a, b, Op::Sub(a, b), |x, y| x - y)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        self.zip_with(a, b, Op::Mul(a, b), |x, y| x * y)
    }

    /// `scale * x + shift`, elementwise.
    pub fn affine(&mut self, x: Var, scale: f64, shift: f64) -> Var {
        self.map(x, Op::Affine { x, scale }, |v| scale * v + shift)
    }

    pub fn scale(&mut self, x: Var, scale: f64) -> Var {
        self.affine(x, scale, 0.0)
    }

    pub fn tanh(&mut self, x: Var) -> Var {
        self.map(x, Op::Tanh(x), math::tanh)
    }

    pub fn sigmoid(&mut self, x: Var) -> Var {
        self.map(x, Op::Sigmoid(x), math::sigmoid)
    }

    /// `max(0, x)`; also serves as the hinge.
    pub fn relu(&mut self, x: Var) -> Var {
        self.map(x, Op::Relu(x), |v| v.max(0.0))
    }

    pub fn abs(&mut self, x: Var) -> Var {
        self.map(x, Op::Abs(x), f64::abs)
    }

    pub fn ln(&mut self, x: Var) -> Var {
        self.map(x, Op::Log(x), math::ln)
    }

    pub fn softmax(&mut self, x: Var) -> Var {
        let xv = self.value(x);
        let max = xv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut value: Vec<f64> = xv.iter().map(|v| math::exp(v - max)).collect();
        let z: f64 = value.iter().sum();
        value.iter_mut().for_each(|v| *v /= z);
        self.push(Op::Softmax(x), value)
    }

    pub fn sum(&mut self, x: Var) -> Var {
        let s = math::neumaier_sum(self.value(x));
        self.push(Op::Sum(x), vec![s])
    }

    pub fn concat(&mut self, parts: &[Var]) -> Var {
        let mut value = Vec::with_capacity(parts.iter().map(|p| self.width(*p)).sum());
        for p in parts {
            value.extend_from_slice(self.value(*p));
        }
        self.push(Op::Concat(parts.to_vec()), value)
    }

    pub fn slice(&mut self, x: Var, start: usize, len: usize) -> Var {
        let value = self.value(x)[start..start + len].to_vec();
        self.push(Op::Slice { x, start }, value)
    }

    /// `out[k] = x[index[k]]`; indices may repeat.
    pub fn gather(&mut self, x: Var, index: Vec<u32>) -> Var {
        let xv = self.value(x);
        let value = index.iter().map(|&i| xv[i as usize]).collect();
        self.push(Op::Gather { x, index }, value)
    }

    /// Every argument fed to a non-differentiable point (`abs`, `relu`),
    /// in node order.
    pub fn kink_arguments(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for node in &self.nodes {
            if let Op::Abs(x) | Op::Relu(x) = node.op {
                out.extend_from_slice(self.value(x));
            }
        }
        out
    }

    /// Reverse pass from a scalar output.
    pub fn backward(&self, output: Var) -> Gradients {
        let mut grads = Gradients::zeros_like(self.params);
        self.backward_into(output, &mut grads);
        grads
    }

    /// Reverse pass, adding into existing buffers.
    pub fn backward_into(&self, output: Var, grads: &mut Gradients) {
        assert_eq!(self.width(output), 1, "backward from a non-scalar node");
        let mut adj: Vec<Vec<f64>> = vec![Vec::new(); output.0 + 1];
        adj[output.0] = vec![1.0];

        fn acc(adj: &mut [Vec<f64>], v: Var, width: usize) -> &mut Vec<f64> {
            let a = &mut adj[v.0];
            if a.is_empty() {
                a.resize(width, 0.0);
            }
            a
        }

        for i in (0..=output.0).rev() {
            let g = core::mem::take(&mut adj[i]);
            if g.is_empty() {
                continue;
            }
            let node = &self.nodes[i];
            match &node.op {
                Op::Input => {}
                Op::Param(id) => {
                    for (d, x) in grads.get_mut(*id).iter_mut().zip(&g) {
                        *d += x;
                    }
                }
                Op::Row { table, row } => {
                    let cols = self.params.get(*table).cols;
                    let d = &mut grads.get_mut(*table)[row * cols..(row + 1) * cols];
                    for (d, x) in d.iter_mut().zip(&g) {
                        *d += x;
                    }
                }
                Op::MatVec { w, x } => {
                    let t = self.params.get(*w);
                    let xv = self.value(*x);
                    let dw = grads.get_mut(*w);
                    for (r, gr) in g.iter().enumerate() {
                        if *gr == 0.0 {
                            continue;
                        }
                        let row = &mut dw[r * t.cols..(r + 1) * t.cols];
                        for (d, xc) in row.iter_mut().zip(xv) {
                            *d += gr * xc;
                        }
                    }
                    let dx = acc(&mut adj, *x, t.cols);
                    for (r, gr) in g.iter().enumerate() {
                        if *gr == 0.0 {
                            continue;
                        }
                        for (d, w) in dx.iter_mut().zip(t.row(r)) {
                            *d += gr * w;
                        }
                    }
                }
                Op::Add(a, b) => {
                    for v in [*a, *b] {
                        let d = acc(&mut adj, v, g.len());
                        d.iter_mut().zip(&g).for_each(|(d, x)| *d += x);
                    }
                }
                Op::Sub(a, b) => {
                    let d = acc(&mut adj, *a, g.len());
                    d.iter_mut().zip(&g).for_each(|(d, x)| *d += x);
                    let d = acc(&mut adj, *b, g.len());
                    d.iter_mut().zip(&g).for_each(|(d, x)| *d -= x);
                }
                Op::Mul(a, b) => {
                    let (a, b) = (*a, *b);
                    let bv = self.value(b);
                    let d = acc(&mut adj, a, g.len());
                    for ((d, x), y) in d.iter_mut().zip(&g).zip(bv) {
                        *d += x * y;
                    }
                    let av = self.value(a);
                    let d = acc(&mut adj, b, g.len());
                    for ((d, x), y) in d.iter_mut().zip(&g).zip(av) {
                        *d += x * y;
                    }
                }
                Op::Affine { x, scale } => {
                    let d = acc(&mut adj, *x, g.len());
                    d.iter_mut().zip(&g).for_each(|(d, v)| *d += scale * v);
                }
                Op::Tanh(x) => {
                    let d = acc(&mut adj, *x, g.len());
                    for ((d, v), y) in d.iter_mut().zip(&g).zip(&node.value) {
                        *d += v * (1.0 - y * y);
                    }
                }
                Op::Sigmoid(x) => {
                    let d = acc(&mut adj, *x, g.len());
                    for ((d, v), y) in d.iter_mut().zip(&g).zip(&node.value) {
                        *d += v * y * (1.0 - y);
                    }
                }
                Op::Relu(x) => {
                    let xv = self.value(*x);
                    let d = acc(&mut adj, *x, g.len());
                    for ((d, v), a) in d.iter_mut().zip(&g).zip(xv) {
                        if *a > 0.0 {
                            *d += v;
                        }
                    }
                }
                Op::Abs(x) => {
                    let xv = self.value(*x);
                    let d = acc(&mut adj, *x, g.len());
                    for ((d, v), a) in d.iter_mut().zip(&g).zip(xv) {
                        *d += v * math::sign0(*a);
                    }
                }
                Op::Log(x) => {
                    let xv = self.value(*x);
                    let d = acc(&mut adj, *x, g.len());
                    for ((d, v), a) in d.iter_mut().zip(&g).zip(xv) {
                        *d += v / a;
                    }
                }
                Op::Softmax(x) => {
                    let y = &node.value;
                    let dot: f64 = g.iter().zip(y).map(|(a, b)| a * b).sum();
                    let d = acc(&mut adj, *x, g.len());
                    for ((d, v), yk) in d.iter_mut().zip(&g).zip(y) {
                        *d += yk * (v - dot);
                    }
                }
                Op::Sum(x) => {
                    let w = self.width(*x);
                    let d = acc(&mut adj, *x, w);
                    d.iter_mut().for_each(|d| *d += g[0]);
                }
                Op::Concat(parts) => {
                    let mut off = 0;
                    for p in parts {
                        let w = self.width(*p);
                        let d = acc(&mut adj, *p, w);
                        d.iter_mut().zip(&g[off..off + w]).for_each(|(d, v)| *d += v);
                        off += w;
                    }
                }
                Op::Slice { x, start } => {
                    let w = self.width(*x);
                    let d = acc(&mut adj, *x, w);
                    d[*start..start + g.len()]
                        .iter_mut()
                        .zip(&g)
                        .for_each(|(d, v)| *d += v);
                }
                Op::Gather { x, index } => {
                    let w = self.width(*x);
                    let d = acc(&mut adj, *x, w);
                    for (&k, v) in index.iter().zip(&g) {
                        d[k as usize] += v;
                    }
                }
            }
        }
    }
}

/// Outcome of comparing reverse-mode gradients with central differences.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GradCheckReport {
    pub max_rel_error: f64,
    pub max_abs_error: f64,
    pub checked: usize,
    /// Coordinates whose `±epsilon` probes straddled an `abs`/`relu` kink.
    pub skipped: usize,
}

/// Relative error with an absolute floor: gradients smaller than `floor`
/// in magnitude are compared absolutely.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Denominator floor used by [`grad_check`].
pub const GRAD_CHECK_FLOOR: f64 = 1e-6;

/// Compares `backward` against central finite differences for every
/// coordinate selected by `select(param, index)`.
///
/// `build` constructs the scalar loss on a fresh graph. A coordinate is
/// skipped when some `abs`/`relu` argument that moves under its `±epsilon`
/// probes changes sign or comes within `kink_margin` of zero.
pub fn grad_check_with<F, S>(
    params: &ParamSet,
    epsilon: f64,
    kink_margin: f64,
    mut select: S,
    build: F,
) -> GradCheckReport
where
    F: Fn(&mut Graph<'_>) -> Var,
    S: FnMut(ParamId, usize) -> bool,
{
    assert!(
        (1e-7..=1e-4).contains(&epsilon),
        "epsilon {epsilon} outside [1e-7, 1e-4]"
    );
    let analytic = {
        let mut g = Graph::new(params);
        let out = build(&mut g);
        g.backward(out)
    };
    let mut work = params.clone();
    let mut report = GradCheckReport {
        max_rel_error: 0.0,
        max_abs_error: 0.0,
        checked: 0,
        skipped: 0,
    };
    for id in params.ids() {
        for k in 0..params.get(id).len() {
            if !select(id, k) {
                continue;
            }
            let orig = work.get(id).data[k];
            work.get_mut(id).data[k] = orig + epsilon;
            let (plus, kinks_plus) = eval_point(&work, &build);
            work.get_mut(id).data[k] = orig - epsilon;
            let (minus, kinks_minus) = eval_point(&work, &build);
            work.get_mut(id).data[k] = orig;
            if near_kink(&kinks_plus, &kinks_minus, kink_margin) {
                report.skipped += 1;
                continue;
            }
            let numeric = (plus - minus) / (2.0 * epsilon);
            let a = analytic.get(id)[k];
            report.checked += 1;
            report.max_abs_error = report.max_abs_error.max((a - numeric).abs());
            report.max_rel_error = report
                .max_rel_error
                .max(relative_error(a, numeric, GRAD_CHECK_FLOOR));
        }
    }
    report
}

fn near_kink(plus: &[f64], minus: &[f64], margin: f64) -> bool {
    debug_assert_eq!(plus.len(), minus.len(), "graph structure changed under perturbation");
    plus.iter().zip(minus).any(|(p, m)| {
        p != m && (math::sign0(*p) != math::sign0(*m) || p.abs().min(m.abs()) < margin)
    })
}

fn eval_point<F>(params: &ParamSet, build: &F) -> (f64, Vec<f64>)
where
    F: Fn(&mut Graph<'_>) -> Var,
{
    let mut g = Graph::new(params);
    let out = build(&mut g);
    (g.scalar(out), g.kink_arguments())
}

/// Checks every coordinate; returns the maximum relative error.
pub fn grad_check<F>(params: &ParamSet, epsilon: f64, build: F) -> GradCheckReport
where
    F: Fn(&mut Graph<'_>) -> Var,
{
    grad_check_with(params, epsilon, 0.0, |_, _| true, build)
}
