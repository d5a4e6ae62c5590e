//! Linear-chain CRF over emission scores.
//!
//! The transition matrix is `(L+2) x (L+2)` where `L` is the tagset size:
//! row/column `L` is a virtual start state and `L+1` a virtual stop state,
//! so every path is scored including its entry and exit transitions. All
//! dynamic programs run in log space.

use crate::autodiff::{Array, AutodiffError, CustomOp};

use super::ModelError;

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    max + xs.iter().map(|&x| (x - max).exp()).sum::<f64>().ln()
}

// Path score assuming labels were already bounds-checked.
fn path_score(emissions: &Array, transitions: &Array, labels: &[usize]) -> f64 {
    let (n, l) = emissions.shape();
    debug_assert_eq!(labels.len(), n);
    let (start, stop) = (l, l + 1);
    let mut total = transitions.get(start, labels[0]);
    for (i, &y) in labels.iter().enumerate() {
        total += emissions.get(i, y);
        if i > 0 {
            total += transitions.get(labels[i - 1], y);
        }
    }
    total + transitions.get(labels[n - 1], stop)
}

/// Score of one label path: its emissions plus every transition on the way,
/// including start->first and last->stop.
pub fn crf_score(
    emissions: &Array,
    transitions: &Array,
    labels: &[usize],
) -> Result<f64, ModelError> {
    let (n, l) = emissions.shape();
    if labels.len() != n {
        return Err(ModelError::LengthMismatch { expected: n, got: labels.len() });
    }
    for &y in labels {
        if y >= l {
            return Err(ModelError::LabelIndex { index: y, size: l });
        }
    }
    if n == 0 {
        return Ok(0.0);
    }
    Ok(path_score(emissions, transitions, labels))
}

/// log Z: the log-sum-exp of `crf_score` over every possible label path,
/// computed by the forward recursion instead of enumeration.
pub fn crf_log_partition(emissions: &Array, transitions: &Array) -> f64 {
    let (n, l) = emissions.shape();
    if n == 0 {
        return 0.0;
    }
    let (start, stop) = (l, l + 1);
    let mut alpha: Vec<f64> =
        (0..l).map(|y| transitions.get(start, y) + emissions.get(0, y)).collect();
    let mut terms = vec![0.0; l];
    for i in 1..n {
        let mut next = vec![0.0; l];
        for (y, slot) in next.iter_mut().enumerate() {
            for (p, term) in terms.iter_mut().enumerate() {
                *term = alpha[p] + transitions.get(p, y);
            }
            *slot = emissions.get(i, y) + log_sum_exp(&terms);
        }
        alpha = next;
    }
    for (y, term) in terms.iter_mut().enumerate() {
        *term = alpha[y] + transitions.get(y, stop);
    }
    log_sum_exp(&terms)
}

/// Highest-scoring label path. Ties at any backpointer resolve to the lowest
/// label index, so decoding is reproducible on degenerate potentials.
pub fn viterbi(emissions: &Array, transitions: &Array) -> Vec<usize> {
    let (n, l) = emissions.shape();
    if n == 0 {
        return Vec::new();
    }
    let (start, stop) = (l, l + 1);
    let mut delta: Vec<f64> =
        (0..l).map(|y| transitions.get(start, y) + emissions.get(0, y)).collect();
    let mut back: Vec<Vec<usize>> = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let mut next = vec![0.0; l];
        let mut ptr = vec![0usize; l];
        for y in 0..l {
            let mut best = f64::NEG_INFINITY;
            let mut arg = 0usize;
            // Ascending p with a strict > keeps the lowest index on ties.
            for (p, &d) in delta.iter().enumerate() {
                let cand = d + transitions.get(p, y);
                if cand > best {
                    best = cand;
                    arg = p;
                }
            }
            next[y] = best + emissions.get(i, y);
            ptr[y] = arg;
        }
        delta = next;
        back.push(ptr);
    }
    let mut best = f64::NEG_INFINITY;
    let mut last = 0usize;
    for (y, &d) in delta.iter().enumerate() {
        let cand = d + transitions.get(y, stop);
        if cand > best {
            best = cand;
            last = y;
        }
    }
    let mut path = vec![last];
    for ptr in back.iter().rev() {
        last = ptr[last];
        path.push(last);
    }
    path.reverse();
    path
}

// Forward and backward lattices plus log Z, for posterior marginals.
// alpha[i][y] includes emission i; beta[i][y] excludes it and covers
// everything after position i through the stop transition, so
// alpha[i][y] + beta[i][y] - logz is the log marginal of label y at i.
fn lattices(emissions: &Array, transitions: &Array) -> (Vec<Vec<f64>>, Vec<Vec<f64>>, f64) {
    let (n, l) = emissions.shape();
    let (start, stop) = (l, l + 1);
    let mut alpha = vec![vec![0.0; l]; n];
    for y in 0..l {
        alpha[0][y] = transitions.get(start, y) + emissions.get(0, y);
    }
    let mut terms = vec![0.0; l];
    for i in 1..n {
        for y in 0..l {
            for (p, term) in terms.iter_mut().enumerate() {
                *term = alpha[i - 1][p] + transitions.get(p, y);
            }
            alpha[i][y] = emissions.get(i, y) + log_sum_exp(&terms);
        }
    }
    let mut beta = vec![vec![0.0; l]; n];
    for y in 0..l {
        beta[n - 1][y] = transitions.get(y, stop);
    }
    for i in (0..n - 1).rev() {
        for y in 0..l {
            for (q, term) in terms.iter_mut().enumerate() {
                *term = transitions.get(y, q) + emissions.get(i + 1, q) + beta[i + 1][q];
            }
            beta[i][y] = log_sum_exp(&terms);
        }
    }
    for (y, term) in terms.iter_mut().enumerate() {
        *term = alpha[n - 1][y] + transitions.get(y, stop);
    }
    let logz = log_sum_exp(&terms);
    (alpha, beta, logz)
}

/// Negative log-likelihood of a gold path, as a differentiable graph op.
///
/// Inputs are `[emissions (n x L), transitions (L+2 x L+2)]`; the output is
/// the scalar `log Z - score(gold)`. The backward pass produces exact
/// gradients from posterior marginals: `marginal - onehot(gold)` for the
/// emissions, expected minus observed edge counts for the transitions.
pub struct CrfNll {
    gold: Vec<usize>,
}

impl CrfNll {
    pub fn new(gold: Vec<usize>) -> Self {
        CrfNll { gold }
    }
}

impl CustomOp for CrfNll {
    fn name(&self) -> &'static str {
        "crf_nll"
    }

    fn forward(&self, inputs: &[&Array]) -> Result<Array, AutodiffError> {
        if inputs.len() != 2 {
            return Err(AutodiffError::ShapeMismatch {
                op: "crf_nll",
                left: format!("{} inputs", inputs.len()),
                right: "emissions + transitions".to_string(),
            });
        }
        let (emissions, transitions) = (inputs[0], inputs[1]);
        let (n, l) = emissions.shape();
        if n == 0 || transitions.rows() != l + 2 || transitions.cols() != l + 2 {
            return Err(AutodiffError::ShapeMismatch {
                op: "crf_nll",
                left: emissions.shape_string(),
                right: transitions.shape_string(),
            });
        }
        if self.gold.len() != n {
            return Err(AutodiffError::ShapeMismatch {
                op: "crf_nll",
                left: format!("{n} positions"),
                right: format!("{} gold labels", self.gold.len()),
            });
        }
        for &y in &self.gold {
            if y >= l {
                return Err(AutodiffError::BadIndex { index: y, rows: l });
            }
        }
        let logz = crf_log_partition(emissions, transitions);
        Ok(Array::scalar(logz - path_score(emissions, transitions, &self.gold)))
    }

    fn backward(&self, inputs: &[&Array], _output: &Array, grad_output: &Array) -> Vec<Array> {
        let (emissions, transitions) = (inputs[0], inputs[1]);
        let (n, l) = emissions.shape();
        let (start, stop) = (l, l + 1);
        let upstream = grad_output.scalar_value();
        let (alpha, beta, logz) = lattices(emissions, transitions);

        let mut grad_e = Array::zeros(n, l);
        for i in 0..n {
            for y in 0..l {
                let marginal = (alpha[i][y] + beta[i][y] - logz).exp();
                let observed = if self.gold[i] == y { 1.0 } else { 0.0 };
                grad_e.set(i, y, upstream * (marginal - observed));
            }
        }

        let mut grad_t = Array::zeros(l + 2, l + 2);
        for y in 0..l {
            let edge = transitions.get(start, y) + emissions.get(0, y) + beta[0][y] - logz;
            grad_t.add_at(start, y, edge.exp());
        }
        for i in 1..n {
            for p in 0..l {
                for y in 0..l {
                    let edge = alpha[i - 1][p]
                        + transitions.get(p, y)
                        + emissions.get(i, y)
                        + beta[i][y]
                        - logz;
                    grad_t.add_at(p, y, edge.exp());
                }
            }
        }
        for y in 0..l {
            let edge = alpha[n - 1][y] + transitions.get(y, stop) - logz;
            grad_t.add_at(y, stop, edge.exp());
        }
        grad_t.add_at(start, self.gold[0], -1.0);
        for i in 1..n {
            grad_t.add_at(self.gold[i - 1], self.gold[i], -1.0);
        }
        grad_t.add_at(self.gold[n - 1], stop, -1.0);

        vec![grad_e, grad_t.map(|v| v * upstream)]
    }
}
