//! The recurrent message-passing acceptance model.
//!
//! Every argument starts from a shared learned embedding (a separate one
//! marks members of the given set for the constructive task). Each step,
//! every attack `(u, w)` produces two messages: `M^s(v_u, v_w)` delivered to
//! the source `u` and `M^t(v_w, v_u)` delivered to the target `w`. A node
//! sums its incoming messages (zero vector when isolated), then a shared
//! gated recurrent cell updates its embedding from the sum and its static
//! initial embedding. After every step a readout maps each embedding to an
//! acceptance logit.
//!
//! Inference uses plain matrix kernels; training composes the same kernels
//! on a differentiation tape, so both paths produce bit-identical values.

mod trace;

pub use trace::{dump_trace, parse_trace, ForwardTrace};

use crate::af::{ArgumentSet, ArgumentationFramework};
use crate::numerics::matrix::{concat_cols, gather_rows, scatter_sum_rows};
use crate::numerics::nn::{
    gated_recurrent_cell, glorot, mlp_forward, sigmoid, LstmNodes, LstmParams, MlpNodes,
    MlpParams,
};
use crate::numerics::{Matrix, NodeId, Tape};
use crate::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Row of the shared embedding matrix used by plain nodes.
const EMBED_BASE: usize = 0;
/// Row used by members of the given set.
const EMBED_MEMBER: usize = 1;

/// All learnable weights.
///
/// The message MLPs take `2d` inputs (self embedding then neighbour
/// embedding) through one hidden ReLU layer of width `d` to a `d`-vector.
/// The cell takes `[message; static embedding]` (2d) with hidden width `d`.
/// The readout is `d → d → 1` with the same hidden-layer shape.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParameters {
    pub dim: usize,
    /// 2 × d: row 0 the base embedding, row 1 the member embedding.
    pub embeddings: Matrix,
    pub msg_src: MlpParams,
    pub msg_tgt: MlpParams,
    pub cell: LstmParams,
    pub readout: MlpParams,
}

impl ModelParameters {
    /// Glorot-uniform initialisation; forget-gate bias 1; embeddings are
    /// learned parameters with random init.
    pub fn init(dim: usize, rng: &mut impl Rng) -> Self {
        assert!(dim >= 1, "embedding dimension must be positive");
        let embeddings = glorot(2, dim, 1, dim, rng);
        ModelParameters {
            dim,
            embeddings,
            msg_src: MlpParams::init(2 * dim, dim, dim, rng),
            msg_tgt: MlpParams::init(2 * dim, dim, dim, rng),
            cell: LstmParams::init(2 * dim, dim, rng),
            readout: MlpParams::init(dim, dim, 1, rng),
        }
    }

    /// Parameter tensors in the fixed order shared with optimizer state.
    pub fn tensors(&self) -> Vec<&Matrix> {
        let mut out = vec![&self.embeddings];
        out.extend(self.msg_src.tensors());
        out.extend(self.msg_tgt.tensors());
        out.extend(self.cell.tensors());
        out.extend(self.readout.tensors());
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out = vec![&mut self.embeddings];
        out.extend(self.msg_src.tensors_mut());
        out.extend(self.msg_tgt.tensors_mut());
        out.extend(self.cell.tensors_mut());
        out.extend(self.readout.tensors_mut());
        out
    }

    pub fn shapes(&self) -> Vec<(usize, usize)> {
        self.tensors().iter().map(|t| t.shape()).collect()
    }

    pub fn count_parameters(&self) -> usize {
        self.tensors().iter().map(|t| t.data().len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.is_finite())
    }

    /// Registers every tensor as a tape leaf.
    pub fn leaf(&self, tape: &mut Tape) -> ParamNodes {
        ParamNodes {
            embeddings: tape.leaf(self.embeddings.clone()),
            msg_src: self.msg_src.leaf(tape),
            msg_tgt: self.msg_tgt.leaf(tape),
            cell: self.cell.leaf(tape),
            readout: self.readout.leaf(tape),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let d = self.dim;
        if self.embeddings.shape() != (2, d)
            || self.msg_src.w1.shape() != (2 * d, d)
            || self.msg_tgt.w1.shape() != (2 * d, d)
            || self.cell.w.shape() != (3 * d, 4 * d)
            || self.readout.w1.shape() != (d, d)
            || self.readout.w2.shape() != (d, 1)
        {
            return Err(Error::usage("model tensor shapes inconsistent with dim"));
        }
        if !self.is_finite() {
            return Err(Error::NonFinite("model parameters contain non-finite values".into()));
        }
        Ok(())
    }
}

/// Tape handles for all parameters, in [`ModelParameters::tensors`] order.
pub struct ParamNodes {
    pub embeddings: NodeId,
    pub msg_src: MlpNodes,
    pub msg_tgt: MlpNodes,
    pub cell: LstmNodes,
    pub readout: MlpNodes,
}

impl ParamNodes {
    pub fn ids(&self) -> Vec<NodeId> {
        let mut out = vec![self.embeddings];
        out.extend(self.msg_src.ids());
        out.extend(self.msg_tgt.ids());
        out.extend(self.cell.ids());
        out.extend(self.readout.ids());
        out
    }
}

/// Several frameworks batched as one disjoint-union graph.
///
/// Messages cannot cross framework boundaries because edges are the only
/// coupling and every edge stays inside its framework's index range.
#[derive(Clone, Debug)]
pub struct GraphBatch {
    pub total_nodes: usize,
    /// Attack pairs in global node indices.
    pub edges: Vec<(usize, usize)>,
    /// Given-set membership per global node.
    pub members: Vec<bool>,
    /// Prefix offsets per framework; length = framework count + 1.
    pub offsets: Vec<usize>,
}

impl GraphBatch {
    pub fn build(items: &[(&ArgumentationFramework, Option<&ArgumentSet>)]) -> GraphBatch {
        let mut edges = Vec::new();
        let mut members = Vec::new();
        let mut offsets = vec![0];
        let mut base = 0usize;
        for (af, given) in items {
            edges.extend(af.attacks().iter().map(|&(u, w)| (base + u, base + w)));
            for i in 0..af.n() {
                members.push(given.is_some_and(|s| s.contains(i)));
            }
            base += af.n();
            offsets.push(base);
        }
        GraphBatch { total_nodes: base, edges, members, offsets }
    }

    pub fn frameworks(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Node index range of framework `k`.
    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        self.offsets[k]..self.offsets[k + 1]
    }
}

fn member_rows(members: &[bool]) -> Vec<usize> {
    members.iter().map(|&m| if m { EMBED_MEMBER } else { EMBED_BASE }).collect()
}

/// Per-step logits for a whole batch, plain kernels. Entry `t` is an
/// `n × 1` matrix of logits after step `t+1`.
pub fn forward_batch(
    params: &ModelParameters,
    batch: &GraphBatch,
    steps: usize,
) -> Result<Vec<Matrix>> {
    if steps == 0 {
        return Err(Error::usage("forward requires at least one message-passing step"));
    }
    let n = batch.total_nodes;
    let d = params.dim;
    let (src, dst): (Vec<usize>, Vec<usize>) = batch.edges.iter().copied().unzip();

    let mut v = gather_rows(&params.embeddings, &member_rows(&batch.members));
    let x_static = v.clone();
    let mut cell_state = Matrix::zeros(n, d);
    let mut step_logits = Vec::with_capacity(steps);

    for _ in 0..steps {
        let m = if batch.edges.is_empty() {
            Matrix::zeros(n, d)
        } else {
            let v_src = gather_rows(&v, &src);
            let v_dst = gather_rows(&v, &dst);
            // M^s sees (self = source, neighbour = target) and lands on the
            // source; M^t sees (self = target, neighbour = source) and lands
            // on the target.
            let out_s = mlp_forward(&params.msg_src, &concat_cols(&v_src, &v_dst));
            let out_t = mlp_forward(&params.msg_tgt, &concat_cols(&v_dst, &v_src));
            let mut m = scatter_sum_rows(&out_s, &src, n);
            m.add_scaled(&scatter_sum_rows(&out_t, &dst, n), 1.0);
            m
        };
        let cell_in = concat_cols(&m, &x_static);
        let (new_v, new_cell) = gated_recurrent_cell(&params.cell, &v, &cell_state, &cell_in);
        v = new_v;
        cell_state = new_cell;
        step_logits.push(mlp_forward(&params.readout, &v));
    }
    Ok(step_logits)
}

/// Runs the model on one framework and records the per-step trace.
pub fn forward(
    params: &ModelParameters,
    af: &ArgumentationFramework,
    input_set: Option<&ArgumentSet>,
    steps: usize,
) -> Result<ForwardTrace> {
    let batch = GraphBatch::build(&[(af, input_set)]);
    let step_logits = forward_batch(params, &batch, steps)?;
    let mut logits = Vec::with_capacity(steps * af.n());
    for m in &step_logits {
        logits.extend(m.data().iter().copied());
    }
    Ok(ForwardTrace::new(af.names().to_vec(), steps, logits))
}

/// Binary acceptance map from final-step likelihoods; a likelihood of
/// exactly one half rejects.
pub fn predict(
    params: &ModelParameters,
    af: &ArgumentationFramework,
    input_set: Option<&ArgumentSet>,
    steps: usize,
) -> Result<Vec<u8>> {
    let trace = forward(params, af, input_set, steps)?;
    Ok((0..af.n()).map(|i| u8::from(trace.likelihood(steps, i) > 0.5)).collect())
}

/// Mean over steps of the per-step binary cross-entropy against `labels`.
pub fn per_step_loss(trace: &ForwardTrace, labels: &[u8]) -> Result<f64> {
    if labels.len() != trace.n() {
        return Err(Error::usage(format!(
            "label length {} does not match {} arguments",
            labels.len(),
            trace.n()
        )));
    }
    if trace.n() == 0 {
        return Err(Error::usage("loss of an empty trace"));
    }
    let mut total = 0.0;
    for t in 1..=trace.steps() {
        let mut step = 0.0;
        for (i, &y) in labels.iter().enumerate() {
            let o = trace.logit(t, i);
            step += o.max(0.0) - o * f64::from(y) + (-o.abs()).exp().ln_1p();
        }
        total += step / labels.len() as f64;
    }
    Ok(total / trace.steps() as f64)
}

/// Tape forward over a batch: returns per-step logit nodes.
pub fn forward_on_tape(
    tape: &mut Tape,
    nodes: &ParamNodes,
    params: &ModelParameters,
    batch: &GraphBatch,
    steps: usize,
) -> Result<Vec<NodeId>> {
    if steps == 0 {
        return Err(Error::usage("forward requires at least one message-passing step"));
    }
    let n = batch.total_nodes;
    let d = params.dim;
    let (src, dst): (Vec<usize>, Vec<usize>) = batch.edges.iter().copied().unzip();

    let v0 = tape.gather_rows(nodes.embeddings, member_rows(&batch.members));
    let x_static = v0;
    let mut v = v0;
    let mut cell_state = tape.leaf(Matrix::zeros(n, d));
    let zero_m = if batch.edges.is_empty() {
        Some(tape.leaf(Matrix::zeros(n, d)))
    } else {
        None
    };
    let mut step_logits = Vec::with_capacity(steps);

    for _ in 0..steps {
        let m = match zero_m {
            Some(z) => z,
            None => {
                let v_src = tape.gather_rows(v, src.clone());
                let v_dst = tape.gather_rows(v, dst.clone());
                let in_s = tape.concat_cols(v_src, v_dst);
                let out_s = nodes.msg_src.forward(tape, in_s);
                let in_t = tape.concat_cols(v_dst, v_src);
                let out_t = nodes.msg_tgt.forward(tape, in_t);
                let sum_s = tape.scatter_sum_rows(out_s, src.clone(), n);
                let sum_t = tape.scatter_sum_rows(out_t, dst.clone(), n);
                tape.add(sum_s, sum_t)
            }
        };
        let cell_in = tape.concat_cols(m, x_static);
        let (new_v, new_cell) = nodes.cell.step(tape, v, cell_state, cell_in);
        v = new_v;
        cell_state = new_cell;
        step_logits.push(nodes.readout.forward(tape, v));
    }
    Ok(step_logits)
}

/// Tape forward plus the training loss: mean over steps of the batch-wide
/// binary cross-entropy.
pub fn loss_on_tape(
    tape: &mut Tape,
    nodes: &ParamNodes,
    params: &ModelParameters,
    batch: &GraphBatch,
    labels: &[f64],
    steps: usize,
) -> Result<NodeId> {
    if labels.len() != batch.total_nodes {
        return Err(Error::usage(format!(
            "label length {} does not match {} batch nodes",
            labels.len(),
            batch.total_nodes
        )));
    }
    let step_logits = forward_on_tape(tape, nodes, params, batch, steps)?;
    let step_losses: Vec<NodeId> =
        step_logits.iter().map(|&l| tape.bce_with_logits_mean(l, labels)).collect();
    let total = tape.add_n(&step_losses);
    Ok(tape.scale(total, 1.0 / steps as f64))
}

/// Scatter-free scalar reference used in tests; exposed for the CLI's
/// self-check mode. Computes the same function as [`forward`] with plain
/// per-node loops instead of batched kernels.
pub fn forward_reference(
    params: &ModelParameters,
    af: &ArgumentationFramework,
    input_set: Option<&ArgumentSet>,
    steps: usize,
) -> Result<ForwardTrace> {
    if steps == 0 {
        return Err(Error::usage("forward requires at least one message-passing step"));
    }
    let n = af.n();
    let d = params.dim;
    let embed = |i: usize| -> Vec<f64> {
        let row = if input_set.is_some_and(|s| s.contains(i)) { EMBED_MEMBER } else { EMBED_BASE };
        params.embeddings.row(row).to_vec()
    };
    let mlp = |p: &MlpParams, input: &[f64]| -> Vec<f64> {
        let hidden: Vec<f64> = (0..p.w1.cols())
            .map(|h| {
                let pre = p.b1.get(0, h)
                    + input.iter().enumerate().map(|(k, &x)| x * p.w1.get(k, h)).sum::<f64>();
                pre.max(0.0)
            })
            .collect();
        (0..p.w2.cols())
            .map(|j| {
                p.b2.get(0, j)
                    + hidden.iter().enumerate().map(|(h, &x)| x * p.w2.get(h, j)).sum::<f64>()
            })
            .collect()
    };
    let mut v: Vec<Vec<f64>> = (0..n).map(&embed).collect();
    let x: Vec<Vec<f64>> = (0..n).map(&embed).collect();
    let mut c: Vec<Vec<f64>> = vec![vec![0.0; d]; n];
    let mut logits = Vec::with_capacity(steps * n);
    for _ in 0..steps {
        let mut m = vec![vec![0.0; d]; n];
        for &(u, w) in af.attacks() {
            let ms = mlp(&params.msg_src, &[v[u].clone(), v[w].clone()].concat());
            for (acc, &x) in m[u].iter_mut().zip(&ms) {
                *acc += x;
            }
            let mt = mlp(&params.msg_tgt, &[v[w].clone(), v[u].clone()].concat());
            for (acc, &x) in m[w].iter_mut().zip(&mt) {
                *acc += x;
            }
        }
        for i in 0..n {
            let joint = [m[i].clone(), x[i].clone(), v[i].clone()].concat();
            for j in 0..d {
                let gate = |block: usize| {
                    let col = block * d + j;
                    params.cell.b.get(0, col)
                        + joint
                            .iter()
                            .enumerate()
                            .map(|(r, &val)| val * params.cell.w.get(r, col))
                            .sum::<f64>()
                };
                let ig = sigmoid(gate(0));
                let fg = sigmoid(gate(1));
                let gg = gate(2).tanh();
                let og = sigmoid(gate(3));
                c[i][j] = fg * c[i][j] + ig * gg;
                v[i][j] = og * c[i][j].tanh();
            }
        }
        for vi in &v {
            logits.push(mlp(&params.readout, vi)[0]);
        }
    }
    Ok(ForwardTrace::new(af.names().to_vec(), steps, logits))
}
