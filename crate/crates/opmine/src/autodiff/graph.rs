//! Reverse-mode differentiation over a recorded operation tape.
//!
//! A [`Graph`] is an arena of nodes created in execution order; every op
//! checks shapes up front, verifies its output is finite, and registers the
//! parent links `backward` later walks in reverse. Tensors are addressed by
//! [`TensorId`]; values and (after backward) gradients are read back from
//! the graph. One backward pass ends the graph's life: further recording is
//! an error, only reads remain valid.

use super::array::Array;
use super::AutodiffError;
use rand::Rng;

/// Index of a tensor in its graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TensorId(pub(crate) usize);

/// Differentiable operation with custom forward/backward, the extension
/// point for structured losses that are unwieldy as op compositions.
pub trait CustomOp {
    fn name(&self) -> &'static str;
    fn forward(&self, inputs: &[&Array]) -> Result<Array, AutodiffError>;
    /// Gradients with respect to each input, given the upstream gradient.
    fn backward(&self, inputs: &[&Array], output: &Array, grad_output: &Array) -> Vec<Array>;
}

enum Op {
    Leaf,
    Add(TensorId, TensorId),
    Sub(TensorId, TensorId),
    Mul(TensorId, TensorId),
    Scale(TensorId, f64),
    AddScalar(TensorId),
    Matmul(TensorId, TensorId),
    Concat { parts: Vec<TensorId>, axis: usize },
    Slice { src: TensorId, axis: usize, start: usize },
    Transpose(TensorId),
    Tanh(TensorId),
    Sigmoid(TensorId),
    Relu(TensorId),
    Softmax { src: TensorId, axis: usize },
    LogSoftmax { src: TensorId, axis: usize },
    MeanPool { src: TensorId, axis: usize },
    LogSumExp { src: TensorId, axis: usize },
    Dropout { src: TensorId, mask: Array },
    EmbeddingLookup { table: TensorId, indices: Vec<usize> },
    SumAll(TensorId),
    Custom { parents: Vec<TensorId>, op: Box<dyn CustomOp> },
}

struct Node {
    value: Array,
    op: Op,
    requires_grad: bool,
    grad: Option<Array>,
}

#[derive(Default)]
pub struct Graph {
    nodes: Vec<Node>,
    cleared: bool,
}

impl Graph {
    pub fn new() -> Self {
        Graph::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, id: TensorId) -> &Array {
        &self.nodes[id.0].value
    }

    /// Gradient of the last backward target with respect to `id`, if it was
    /// computed (None for nodes off the loss path or before backward).
    pub fn grad(&self, id: TensorId) -> Option<&Array> {
        self.nodes[id.0].grad.as_ref()
    }

    fn push(&mut self, value: Array, op: Op, requires_grad: bool) -> Result<TensorId, AutodiffError> {
        if self.cleared {
            return Err(AutodiffError::GraphCleared);
        }
        let op_name = op_name(&op);
        if !value.all_finite() {
            return Err(AutodiffError::NonFinite { op: op_name.to_string() });
        }
        self.nodes.push(Node { value, op, requires_grad, grad: None });
        Ok(TensorId(self.nodes.len() - 1))
    }

    /// A trainable input: participates in gradient computation.
    pub fn leaf(&mut self, value: Array) -> Result<TensorId, AutodiffError> {
        self.push(value, Op::Leaf, true)
    }

    /// A constant input: no gradient is accumulated for it.
    pub fn constant(&mut self, value: Array) -> Result<TensorId, AutodiffError> {
        self.push(value, Op::Leaf, false)
    }

    fn binary_elementwise(
        &mut self,
        op_label: &'static str,
        a: TensorId,
        b: TensorId,
        f: impl Fn(f64, f64) -> f64,
        op: Op,
    ) -> Result<TensorId, AutodiffError> {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if !va.same_shape(vb) {
            return Err(AutodiffError::ShapeMismatch {
                op: op_label,
                left: va.shape_string(),
                right: vb.shape_string(),
            });
        }
        let data = va.data().iter().zip(vb.data().iter()).map(|(&x, &y)| f(x, y)).collect();
        let value = Array::from_vec(va.rows(), va.cols(), data);
        let rg = self.nodes[a.0].requires_grad || self.nodes[b.0].requires_grad;
        self.push(value, op, rg)
    }

    pub fn add(&mut self, a: TensorId, b: TensorId) -> Result<TensorId, AutodiffError> {
        self.binary_elementwise("add", a, b, |x, y| x + y, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: TensorId, b: TensorId) -> Result<TensorId, AutodiffError> {
        self.binary_elementwise("sub", a, b, |x, y| x - y, Op::Sub(a, b))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: TensorId, b: TensorId) -> Result<TensorId, AutodiffError> {
        self.binary_elementwise("mul", a, b, |x, y| x * y, Op::Mul(a, b))
    }

    pub fn scale(&mut self, a: TensorId, factor: f64) -> Result<TensorId, AutodiffError> {
        let value = self.nodes[a.0].value.map(|v| v * factor);
        let rg = self.nodes[a.0].requires_grad;
        self.push(value, Op::Scale(a, factor), rg)
    }

    pub fn add_scalar(&mut self, a: TensorId, constant: f64) -> Result<TensorId, AutodiffError> {
        let value = self.nodes[a.0].value.map(|v| v + constant);
        let rg = self.nodes[a.0].requires_grad;
        self.push(value, Op::AddScalar(a), rg)
    }

    pub fn matmul(&mut self, a: TensorId, b: TensorId) -> Result<TensorId, AutodiffError> {
        let (va, vb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if va.cols() != vb.rows() {
            return Err(AutodiffError::ShapeMismatch {
                op: "matmul",
                left: va.shape_string(),
                right: vb.shape_string(),
            });
        }
        let value = va.matmul(vb);
        let rg = self.nodes[a.0].requires_grad || self.nodes[b.0].requires_grad;
        self.push(value, Op::Matmul(a, b), rg)
    }

    /// Concatenates along `axis` (0 stacks rows, 1 stacks columns).
    pub fn concat(&mut self, parts: &[TensorId], axis: usize) -> Result<TensorId, AutodiffError> {
        if axis > 1 {
            return Err(AutodiffError::BadAxis { op: "concat", axis });
        }
        let first = &self.nodes[parts[0].0].value;
        let (mut rows, mut cols) = first.shape();
        for &p in &parts[1..] {
            let v = &self.nodes[p.0].value;
            let ok = if axis == 0 { v.cols() == cols } else { v.rows() == rows };
            if !ok {
                return Err(AutodiffError::ShapeMismatch {
                    op: "concat",
                    left: format!("[{rows},{cols}]"),
                    right: v.shape_string(),
                });
            }
            if axis == 0 {
                rows += v.rows();
            } else {
                cols += v.cols();
            }
        }
        if axis == 0 {
            rows = parts.iter().map(|p| self.nodes[p.0].value.rows()).sum();
        } else {
            cols = parts.iter().map(|p| self.nodes[p.0].value.cols()).sum();
        }
        let mut value = Array::zeros(rows, cols);
        if axis == 0 {
            let mut r0 = 0;
            for &p in parts {
                let v = &self.nodes[p.0].value;
                for r in 0..v.rows() {
                    for c in 0..v.cols() {
                        value.set(r0 + r, c, v.get(r, c));
                    }
                }
                r0 += v.rows();
            }
        } else {
            let mut c0 = 0;
            for &p in parts {
                let v = &self.nodes[p.0].value;
                for r in 0..v.rows() {
                    for c in 0..v.cols() {
                        value.set(r, c0 + c, v.get(r, c));
                    }
                }
                c0 += v.cols();
            }
        }
        let rg = parts.iter().any(|p| self.nodes[p.0].requires_grad);
        self.push(value, Op::Concat { parts: parts.to_vec(), axis }, rg)
    }

    /// Takes rows (axis 0) or columns (axis 1) `start..end`.
    pub fn slice(
        &mut self,
        src: TensorId,
        axis: usize,
        start: usize,
        end: usize,
    ) -> Result<TensorId, AutodiffError> {
        if axis > 1 {
            return Err(AutodiffError::BadAxis { op: "slice", axis });
        }
        let v = &self.nodes[src.0].value;
        let size = if axis == 0 { v.rows() } else { v.cols() };
        if start >= end || end > size {
            return Err(AutodiffError::BadSlice { start, end, size });
        }
        let value = if axis == 0 {
            let mut out = Array::zeros(end - start, v.cols());
            for r in start..end {
                for c in 0..v.cols() {
                    out.set(r - start, c, v.get(r, c));
                }
            }
            out
        } else {
            let mut out = Array::zeros(v.rows(), end - start);
            for r in 0..v.rows() {
                for c in start..end {
                    out.set(r, c - start, v.get(r, c));
                }
            }
            out
        };
        let rg = self.nodes[src.0].requires_grad;
        self.push(value, Op::Slice { src, axis, start }, rg)
    }

    pub fn transpose(&mut self, src: TensorId) -> Result<TensorId, AutodiffError> {
        let value = self.nodes[src.0].value.transpose();
        let rg = self.nodes[src.0].requires_grad;
        self.push(value, Op::Transpose(src), rg)
    }

    fn unary(
        &mut self,
        src: TensorId,
        f: impl Fn(f64) -> f64,
        op: Op,
    ) -> Result<TensorId, AutodiffError> {
        let value = self.nodes[src.0].value.map(f);
        let rg = self.nodes[src.0].requires_grad;
        self.push(value, op, rg)
    }

    pub fn tanh(&mut self, src: TensorId) -> Result<TensorId, AutodiffError> {
        self.unary(src, f64::tanh, Op::Tanh(src))
    }

    pub fn sigmoid(&mut self, src: TensorId) -> Result<TensorId, AutodiffError> {
        self.unary(src, |v| 1.0 / (1.0 + (-v).exp()), Op::Sigmoid(src))
    }

    pub fn relu(&mut self, src: TensorId) -> Result<TensorId, AutodiffError> {
        self.unary(src, |v| v.max(0.0), Op::Relu(src))
    }

    /// Softmax along `axis`: 0 normalizes each column, 1 each row. Max-shifted
    /// for stability; every slice sums to 1.
    pub fn softmax(&mut self, src: TensorId, axis: usize) -> Result<TensorId, AutodiffError> {
        if axis > 1 {
            return Err(AutodiffError::BadAxis { op: "softmax", axis });
        }
        let v = &self.nodes[src.0].value;
        let mut value = Array::zeros(v.rows(), v.cols());
        for_each_slice(v, axis, |line| {
            let max = line.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = line.iter().map(|&x| (x - max).exp()).collect();
            let sum: f64 = exps.iter().sum();
            exps.into_iter().map(|e| e / sum).collect()
        }, &mut value);
        let rg = self.nodes[src.0].requires_grad;
        self.push(value, Op::Softmax { src, axis }, rg)
    }

    pub fn log_softmax(&mut self, src: TensorId, axis: usize) -> Result<TensorId, AutodiffError> {
        if axis > 1 {
            return Err(AutodiffError::BadAxis { op: "log_softmax", axis });
        }
        let v = &self.nodes[src.0].value;
        let mut value = Array::zeros(v.rows(), v.cols());
        for_each_slice(v, axis, |line| {
            let max = line.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let lse = max + line.iter().map(|&x| (x - max).exp()).sum::<f64>().ln();
            line.iter().map(|&x| x - lse).collect()
        }, &mut value);
        let rg = self.nodes[src.0].requires_grad;
        self.push(value, Op::LogSoftmax { src, axis }, rg)
    }

    /// Mean along `axis`, reducing it to size 1 (axis 0: column means into
    /// one row; axis 1: row means into one column).
    pub fn mean_pool(&mut self, src: TensorId, axis: usize) -> Result<TensorId, AutodiffError> {
        if axis > 1 {
            return Err(AutodiffError::BadAxis { op: "mean_pool", axis });
        }
        let v = &self.nodes[src.0].value;
        let value = if axis == 0 {
            let mut out = Array::zeros(1, v.cols());
            for c in 0..v.cols() {
                let mut acc = 0.0;
                for r in 0..v.rows() {
                    acc += v.get(r, c);
                }
                out.set(0, c, acc / v.rows() as f64);
            }
            out
        } else {
            let mut out = Array::zeros(v.rows(), 1);
            for r in 0..v.rows() {
                let mut acc = 0.0;
                for c in 0..v.cols() {
                    acc += v.get(r, c);
                }
                out.set(r, 0, acc / v.cols() as f64);
            }
            out
        };
        let rg = self.nodes[src.0].requires_grad;
        self.push(value, Op::MeanPool { src, axis }, rg)
    }

    /// log(sum(exp)) along `axis`, reducing it to size 1. Max-shifted, so
    /// large inputs do not overflow.
    pub fn logsumexp(&mut self, src: TensorId, axis: usize) -> Result<TensorId, AutodiffError> {
        if axis > 1 {
            return Err(AutodiffError::BadAxis { op: "logsumexp", axis });
        }
        let v = &self.nodes[src.0].value;
        let reduce = |line: &[f64]| -> f64 {
            let max = line.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            max + line.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
        };
        let value = if axis == 0 {
            let mut out = Array::zeros(1, v.cols());
            for c in 0..v.cols() {
                let col: Vec<f64> = (0..v.rows()).map(|r| v.get(r, c)).collect();
                out.set(0, c, reduce(&col));
            }
            out
        } else {
            let mut out = Array::zeros(v.rows(), 1);
            for r in 0..v.rows() {
                out.set(r, 0, reduce(v.row(r)));
            }
            out
        };
        let rg = self.nodes[src.0].requires_grad;
        self.push(value, Op::LogSumExp { src, axis }, rg)
    }

    /// Inverted dropout: in training mode each element is kept with
    /// probability 1−p and scaled by 1/(1−p); otherwise the input passes
    /// through unchanged (same id).
    pub fn dropout(
        &mut self,
        src: TensorId,
        p: f64,
        train: bool,
        rng: &mut impl Rng,
    ) -> Result<TensorId, AutodiffError> {
        if !(0.0..1.0).contains(&p) {
            return Err(AutodiffError::BadDropout { p });
        }
        if !train || p == 0.0 {
            return Ok(src);
        }
        let keep_scale = 1.0 / (1.0 - p);
        let v = &self.nodes[src.0].value;
        let mask_data: Vec<f64> = (0..v.len())
            .map(|_| if rng.random::<f64>() >= p { keep_scale } else { 0.0 })
            .collect();
        let mask = Array::from_vec(v.rows(), v.cols(), mask_data);
        let data = v.data().iter().zip(mask.data().iter()).map(|(&x, &m)| x * m).collect();
        let value = Array::from_vec(v.rows(), v.cols(), data);
        let rg = self.nodes[src.0].requires_grad;
        self.push(value, Op::Dropout { src, mask }, rg)
    }

    /// Gathers rows of `table` ([V, D]) by index into a [D, n] matrix whose
    /// column j is row indices[j], ready for per-position column slicing.
    pub fn embedding_lookup(
        &mut self,
        table: TensorId,
        indices: &[usize],
    ) -> Result<TensorId, AutodiffError> {
        let t = &self.nodes[table.0].value;
        let dim = t.cols();
        for &idx in indices {
            if idx >= t.rows() {
                return Err(AutodiffError::BadIndex { index: idx, rows: t.rows() });
            }
        }
        let mut value = Array::zeros(dim, indices.len());
        for (j, &idx) in indices.iter().enumerate() {
            for d in 0..dim {
                value.set(d, j, t.get(idx, d));
            }
        }
        let rg = self.nodes[table.0].requires_grad;
        self.push(value, Op::EmbeddingLookup { table, indices: indices.to_vec() }, rg)
    }

    /// Sum of all elements, as a scalar.
    pub fn sum_all(&mut self, src: TensorId) -> Result<TensorId, AutodiffError> {
        let total: f64 = self.nodes[src.0].value.data().iter().sum();
        let rg = self.nodes[src.0].requires_grad;
        self.push(Array::scalar(total), Op::SumAll(src), rg)
    }

    /// Records a custom differentiable op.
    pub fn custom(
        &mut self,
        parents: &[TensorId],
        op: Box<dyn CustomOp>,
    ) -> Result<TensorId, AutodiffError> {
        let inputs: Vec<&Array> = parents.iter().map(|p| &self.nodes[p.0].value).collect();
        let value = op.forward(&inputs)?;
        let rg = parents.iter().any(|p| self.nodes[p.0].requires_grad);
        self.push(value, Op::Custom { parents: parents.to_vec(), op }, rg)
    }

    /// Reverse pass from a scalar loss. Populates `grad` on every node the
    /// loss depends on, then clears the graph: values and grads stay
    /// readable, recording anything further is an error.
    pub fn backward(&mut self, loss: TensorId) -> Result<(), AutodiffError> {
        if self.cleared {
            return Err(AutodiffError::GraphCleared);
        }
        let loss_value = &self.nodes[loss.0].value;
        if !loss_value.is_scalar() {
            return Err(AutodiffError::NonScalarLoss { shape: loss_value.shape_string() });
        }
        self.cleared = true;
        self.nodes[loss.0].grad = Some(Array::scalar(1.0));

        for i in (0..=loss.0).rev() {
            let Some(grad) = self.nodes[i].grad.clone() else { continue };
            if !self.nodes[i].requires_grad {
                continue;
            }
            // split borrow: temporarily take the op to walk parents
            let op = std::mem::replace(&mut self.nodes[i].op, Op::Leaf);
            self.propagate(&op, i, &grad);
            self.nodes[i].op = op;
        }
        Ok(())
    }

    fn accumulate(&mut self, target: TensorId, contribution: Array) {
        if !self.nodes[target.0].requires_grad {
            return;
        }
        match &mut self.nodes[target.0].grad {
            Some(g) => g.add_assign(&contribution),
            slot @ None => *slot = Some(contribution),
        }
    }

    fn propagate(&mut self, op: &Op, node: usize, g: &Array) {
        match op {
            Op::Leaf => {}
            Op::Add(a, b) => {
                self.accumulate(*a, g.clone());
                self.accumulate(*b, g.clone());
            }
            Op::Sub(a, b) => {
                self.accumulate(*a, g.clone());
                self.accumulate(*b, g.map(|v| -v));
            }
            Op::Mul(a, b) => {
                let ga = elementwise(g, &self.nodes[b.0].value, |x, y| x * y);
                let gb = elementwise(g, &self.nodes[a.0].value, |x, y| x * y);
                self.accumulate(*a, ga);
                self.accumulate(*b, gb);
            }
            Op::Scale(a, factor) => {
                let f = *factor;
                self.accumulate(*a, g.map(|v| v * f));
            }
            Op::AddScalar(a) => self.accumulate(*a, g.clone()),
            Op::Matmul(a, b) => {
                let ga = g.matmul(&self.nodes[b.0].value.transpose());
                let gb = self.nodes[a.0].value.transpose().matmul(g);
                self.accumulate(*a, ga);
                self.accumulate(*b, gb);
            }
            Op::Concat { parts, axis } => {
                let mut offset = 0usize;
                for &p in parts {
                    let v_shape = self.nodes[p.0].value.shape();
                    let (pr, pc) = v_shape;
                    let mut gp = Array::zeros(pr, pc);
                    if *axis == 0 {
                        for r in 0..pr {
                            for c in 0..pc {
                                gp.set(r, c, g.get(offset + r, c));
                            }
                        }
                        offset += pr;
                    } else {
                        for r in 0..pr {
                            for c in 0..pc {
                                gp.set(r, c, g.get(r, offset + c));
                            }
                        }
                        offset += pc;
                    }
                    self.accumulate(p, gp);
                }
            }
            Op::Slice { src, axis, start } => {
                let (sr, sc) = self.nodes[src.0].value.shape();
                let mut gs = Array::zeros(sr, sc);
                if *axis == 0 {
                    for r in 0..g.rows() {
                        for c in 0..g.cols() {
                            gs.set(start + r, c, g.get(r, c));
                        }
                    }
                } else {
                    for r in 0..g.rows() {
                        for c in 0..g.cols() {
                            gs.set(r, start + c, g.get(r, c));
                        }
                    }
                }
                self.accumulate(*src, gs);
            }
            Op::Transpose(src) => self.accumulate(*src, g.transpose()),
            Op::Tanh(src) => {
                let y = &self.nodes[node].value;
                let gs = elementwise(g, y, |gv, yv| gv * (1.0 - yv * yv));
                self.accumulate(*src, gs);
            }
            Op::Sigmoid(src) => {
                let y = &self.nodes[node].value;
                let gs = elementwise(g, y, |gv, yv| gv * yv * (1.0 - yv));
                self.accumulate(*src, gs);
            }
            Op::Relu(src) => {
                let x = &self.nodes[src.0].value;
                let gs = elementwise(g, x, |gv, xv| if xv > 0.0 { gv } else { 0.0 });
                self.accumulate(*src, gs);
            }
            Op::Softmax { src, axis } => {
                let y = &self.nodes[node].value;
                let mut gs = Array::zeros(y.rows(), y.cols());
                for_each_slice_pair(y, g, *axis, |yline, gline| {
                    let dot: f64 = yline.iter().zip(gline.iter()).map(|(&a, &b)| a * b).sum();
                    yline.iter().zip(gline.iter()).map(|(&yv, &gv)| yv * (gv - dot)).collect()
                }, &mut gs);
                self.accumulate(*src, gs);
            }
            Op::LogSoftmax { src, axis } => {
                let y = &self.nodes[node].value;
                let mut gs = Array::zeros(y.rows(), y.cols());
                for_each_slice_pair(y, g, *axis, |yline, gline| {
                    let gsum: f64 = gline.iter().sum();
                    yline.iter().zip(gline.iter()).map(|(&yv, &gv)| gv - yv.exp() * gsum).collect()
                }, &mut gs);
                self.accumulate(*src, gs);
            }
            Op::MeanPool { src, axis } => {
                let (sr, sc) = self.nodes[src.0].value.shape();
                let mut gs = Array::zeros(sr, sc);
                if *axis == 0 {
                    for r in 0..sr {
                        for c in 0..sc {
                            gs.set(r, c, g.get(0, c) / sr as f64);
                        }
                    }
                } else {
                    for r in 0..sr {
                        for c in 0..sc {
                            gs.set(r, c, g.get(r, 0) / sc as f64);
                        }
                    }
                }
                self.accumulate(*src, gs);
            }
            Op::LogSumExp { src, axis } => {
                let x = &self.nodes[src.0].value;
                let o = &self.nodes[node].value;
                let mut gs = Array::zeros(x.rows(), x.cols());
                if *axis == 0 {
                    for c in 0..x.cols() {
                        for r in 0..x.rows() {
                            gs.set(r, c, g.get(0, c) * (x.get(r, c) - o.get(0, c)).exp());
                        }
                    }
                } else {
                    for r in 0..x.rows() {
                        for c in 0..x.cols() {
                            gs.set(r, c, g.get(r, 0) * (x.get(r, c) - o.get(r, 0)).exp());
                        }
                    }
                }
                self.accumulate(*src, gs);
            }
            Op::Dropout { src, mask } => {
                let gs = elementwise(g, mask, |gv, m| gv * m);
                self.accumulate(*src, gs);
            }
            Op::EmbeddingLookup { table, indices } => {
                let t_shape = self.nodes[table.0].value.shape();
                let mut gt = Array::zeros(t_shape.0, t_shape.1);
                for (j, &idx) in indices.iter().enumerate() {
                    for d in 0..t_shape.1 {
                        gt.add_at(idx, d, g.get(d, j));
                    }
                }
                self.accumulate(*table, gt);
            }
            Op::SumAll(src) => {
                let (sr, sc) = self.nodes[src.0].value.shape();
                self.accumulate(*src, Array::filled(sr, sc, g.scalar_value()));
            }
            Op::Custom { parents, op } => {
                let inputs: Vec<&Array> = parents.iter().map(|p| &self.nodes[p.0].value).collect();
                let grads = op.backward(&inputs, &self.nodes[node].value, g);
                debug_assert_eq!(grads.len(), parents.len());
                let pairs: Vec<(TensorId, Array)> =
                    parents.iter().copied().zip(grads.into_iter()).collect();
                for (p, gp) in pairs {
                    self.accumulate(p, gp);
                }
            }
        }
    }
}

fn elementwise(a: &Array, b: &Array, f: impl Fn(f64, f64) -> f64) -> Array {
    debug_assert!(a.same_shape(b));
    let data = a.data().iter().zip(b.data().iter()).map(|(&x, &y)| f(x, y)).collect();
    Array::from_vec(a.rows(), a.cols(), data)
}

/// Applies `f` to each axis-slice (axis 0: columns; axis 1: rows), writing
/// results into `out`.
fn for_each_slice(v: &Array, axis: usize, f: impl Fn(&[f64]) -> Vec<f64>, out: &mut Array) {
    if axis == 1 {
        for r in 0..v.rows() {
            let line = f(v.row(r));
            for (c, val) in line.into_iter().enumerate() {
                out.set(r, c, val);
            }
        }
    } else {
        for c in 0..v.cols() {
            let col: Vec<f64> = (0..v.rows()).map(|r| v.get(r, c)).collect();
            let line = f(&col);
            for (r, val) in line.into_iter().enumerate() {
                out.set(r, c, val);
            }
        }
    }
}

fn for_each_slice_pair(
    a: &Array,
    b: &Array,
    axis: usize,
    f: impl Fn(&[f64], &[f64]) -> Vec<f64>,
    out: &mut Array,
) {
    if axis == 1 {
        for r in 0..a.rows() {
            let line = f(a.row(r), b.row(r));
            for (c, val) in line.into_iter().enumerate() {
                out.set(r, c, val);
            }
        }
    } else {
        for c in 0..a.cols() {
            let ca: Vec<f64> = (0..a.rows()).map(|r| a.get(r, c)).collect();
            let cb: Vec<f64> = (0..b.rows()).map(|r| b.get(r, c)).collect();
            let line = f(&ca, &cb);
            for (r, val) in line.into_iter().enumerate() {
                out.set(r, c, val);
            }
        }
    }
}

fn op_name(op: &Op) -> &'static str {
    match op {
        Op::Leaf => "leaf",
        Op::Add(..) => "add",
        Op::Sub(..) => "sub",
        Op::Mul(..) => "mul",
        Op::Scale(..) => "scale",
        Op::AddScalar(..) => "add_scalar",
        Op::Matmul(..) => "matmul",
        Op::Concat { .. } => "concat",
        Op::Slice { .. } => "slice",
        Op::Transpose(..) => "transpose",
        Op::Tanh(..) => "tanh",
        Op::Sigmoid(..) => "sigmoid",
        Op::Relu(..) => "relu",
        Op::Softmax { .. } => "softmax",
        Op::LogSoftmax { .. } => "log_softmax",
        Op::MeanPool { .. } => "mean_pool",
        Op::LogSumExp { .. } => "logsumexp",
        Op::Dropout { .. } => "dropout",
        Op::EmbeddingLookup { .. } => "embedding_lookup",
        Op::SumAll(..) => "sum_all",
        Op::Custom { op, .. } => op.name(),
    }
}
