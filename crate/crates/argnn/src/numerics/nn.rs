//! Neural building blocks: a one-hidden-layer ReLU MLP and an LSTM-style
//! gated recurrent cell.
//!
//! Each block has a plain forward (pure, allocation-light, used for
//! inference) and a tape forward (used for training). Both compose the same
//! kernels in the same order, so they produce bit-identical values for the
//! same parameters. Inputs are batched row-wise: a "vector" is a 1-row
//! matrix, and every function accepts any number of rows.

use super::matrix::{concat_cols, matmul, Matrix};
use super::tape::{NodeId, Tape};
use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use serde::{Deserialize, Serialize};

pub(crate) fn glorot(
    rows: usize,
    cols: usize,
    fan_in: usize,
    fan_out: usize,
    rng: &mut impl Rng,
) -> Matrix {
    let bound = (6.0 / (fan_in + fan_out) as f64).sqrt();
    let dist = Uniform::new_inclusive(-bound, bound);
    Matrix::from_fn(rows, cols, |_, _| dist.sample(rng))
}

/// `out = relu(in · w1 + b1) · w2 + b2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub w1: Matrix,
    pub b1: Matrix,
    pub w2: Matrix,
    pub b2: Matrix,
}

impl MlpParams {
    /// Glorot-uniform weights, zero biases.
    pub fn init(input: usize, hidden: usize, output: usize, rng: &mut impl Rng) -> Self {
        MlpParams {
            w1: glorot(input, hidden, input, hidden, rng),
            b1: Matrix::zeros(1, hidden),
            w2: glorot(hidden, output, hidden, output, rng),
            b2: Matrix::zeros(1, output),
        }
    }

    pub fn tensors(&self) -> Vec<&Matrix> {
        vec![&self.w1, &self.b1, &self.w2, &self.b2]
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        vec![&mut self.w1, &mut self.b1, &mut self.w2, &mut self.b2]
    }

    /// Registers the parameters as leaves of `tape`.
    pub fn leaf(&self, tape: &mut Tape) -> MlpNodes {
        MlpNodes {
            w1: tape.leaf(self.w1.clone()),
            b1: tape.leaf(self.b1.clone()),
            w2: tape.leaf(self.w2.clone()),
            b2: tape.leaf(self.b2.clone()),
        }
    }
}

/// Tape handles for one MLP's parameters.
#[derive(Clone, Copy)]
pub struct MlpNodes {
    pub w1: NodeId,
    pub b1: NodeId,
    pub w2: NodeId,
    pub b2: NodeId,
}

impl MlpNodes {
    pub fn forward(&self, tape: &mut Tape, input: NodeId) -> NodeId {
        let h = tape.matmul(input, self.w1);
        let h = tape.add_row_broadcast(h, self.b1);
        let h = tape.relu(h);
        let out = tape.matmul(h, self.w2);
        tape.add_row_broadcast(out, self.b2)
    }

    pub fn ids(&self) -> [NodeId; 4] {
        [self.w1, self.b1, self.w2, self.b2]
    }
}

/// Plain MLP forward over batched rows.
pub fn mlp_forward(params: &MlpParams, input: &Matrix) -> Matrix {
    assert_eq!(input.cols(), params.w1.rows(), "mlp input width");
    let mut h = matmul(input, &params.w1);
    for i in 0..h.rows() {
        for (x, &b) in h.row_mut(i).iter_mut().zip(params.b1.row(0)) {
            *x = (*x + b).max(0.0);
        }
    }
    let mut out = matmul(&h, &params.w2);
    for i in 0..out.rows() {
        for (x, &b) in out.row_mut(i).iter_mut().zip(params.b2.row(0)) {
            *x += b;
        }
    }
    out
}

/// Gated recurrent cell (LSTM): fused weight over `[input; hidden]`, gate
/// blocks ordered input, forget, candidate, output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmParams {
    /// `(input_dim + hidden) × 4·hidden`.
    pub w: Matrix,
    /// `1 × 4·hidden`.
    pub b: Matrix,
    pub hidden: usize,
}

impl LstmParams {
    /// Glorot-uniform weights; biases zero except the forget gate at 1.
    pub fn init(input: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let w = glorot(input + hidden, 4 * hidden, input + hidden, 4 * hidden, rng);
        let mut b = Matrix::zeros(1, 4 * hidden);
        for j in hidden..2 * hidden {
            b.set(0, j, 1.0);
        }
        LstmParams { w, b, hidden }
    }

    pub fn tensors(&self) -> Vec<&Matrix> {
        vec![&self.w, &self.b]
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        vec![&mut self.w, &mut self.b]
    }

    pub fn leaf(&self, tape: &mut Tape) -> LstmNodes {
        LstmNodes { w: tape.leaf(self.w.clone()), b: tape.leaf(self.b.clone()), hidden: self.hidden }
    }
}

/// Tape handles for one cell's parameters.
#[derive(Clone, Copy)]
pub struct LstmNodes {
    pub w: NodeId,
    pub b: NodeId,
    hidden: usize,
}

impl LstmNodes {
    /// One step over batched rows; returns (new hidden, new cell).
    pub fn step(
        &self,
        tape: &mut Tape,
        hidden: NodeId,
        cell: NodeId,
        input: NodeId,
    ) -> (NodeId, NodeId) {
        let d = self.hidden;
        let joint = tape.concat_cols(input, hidden);
        let z = tape.matmul(joint, self.w);
        let z = tape.add_row_broadcast(z, self.b);
        let zi = tape.slice_cols(z, 0, d);
        let zf = tape.slice_cols(z, d, 2 * d);
        let zg = tape.slice_cols(z, 2 * d, 3 * d);
        let zo = tape.slice_cols(z, 3 * d, 4 * d);
        let i = tape.sigmoid(zi);
        let f = tape.sigmoid(zf);
        let g = tape.tanh(zg);
        let o = tape.sigmoid(zo);
        let keep = tape.hadamard(f, cell);
        let write = tape.hadamard(i, g);
        let new_cell = tape.add(keep, write);
        let squashed = tape.tanh(new_cell);
        let new_hidden = tape.hadamard(o, squashed);
        (new_hidden, new_cell)
    }

    pub fn ids(&self) -> [NodeId; 2] {
        [self.w, self.b]
    }
}

/// Numerically stable logistic function.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

use sigmoid as stable_sigmoid;

/// Plain cell step over batched rows. Returns (new hidden, new cell); the
/// output equals the new hidden state.
pub fn gated_recurrent_cell(
    params: &LstmParams,
    hidden: &Matrix,
    cell: &Matrix,
    input: &Matrix,
) -> (Matrix, Matrix) {
    let d = params.hidden;
    assert_eq!(hidden.cols(), d, "hidden width");
    assert_eq!(cell.shape(), hidden.shape(), "cell shape");
    assert_eq!(input.rows(), hidden.rows(), "row counts");
    assert_eq!(input.cols() + d, params.w.rows(), "cell input width");
    let joint = concat_cols(input, hidden);
    let mut z = matmul(&joint, &params.w);
    for r in 0..z.rows() {
        for (x, &b) in z.row_mut(r).iter_mut().zip(params.b.row(0)) {
            *x += b;
        }
    }
    let mut new_hidden = Matrix::zeros(hidden.rows(), d);
    let mut new_cell = Matrix::zeros(hidden.rows(), d);
    for r in 0..z.rows() {
        let zr = z.row(r);
        for j in 0..d {
            let i = stable_sigmoid(zr[j]);
            let f = stable_sigmoid(zr[d + j]);
            let g = zr[2 * d + j].tanh();
            let o = stable_sigmoid(zr[3 * d + j]);
            let c = f * cell.get(r, j) + i * g;
            new_cell.set(r, j, c);
            new_hidden.set(r, j, o * c.tanh());
        }
    }
    (new_hidden, new_cell)
}
