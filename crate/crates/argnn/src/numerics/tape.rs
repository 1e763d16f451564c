//! Reverse-mode automatic differentiation over matrix operations.
//!
//! A [`Tape`] records every operation eagerly (values are computed at record
//! time) and [`Tape::backward`] walks the record once in reverse,
//! accumulating adjoints. A tape is confined to one thread and is rebuilt
//! per training step; leaves are registered per step with the current
//! parameter values.

use super::matrix::{
    concat_cols, gather_rows, matmul, matmul_nt, matmul_tn, scatter_sum_rows, Matrix,
};

/// Index of a node on a tape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NodeId(usize);

enum Op {
    Leaf,
    MatMul(NodeId, NodeId),
    Add(NodeId, NodeId),
    AddN(Vec<NodeId>),
    /// Broadcasts a 1-row matrix over every row of `a`.
    AddRowBroadcast { a: NodeId, row: NodeId },
    Hadamard(NodeId, NodeId),
    Scale(NodeId, f64),
    Relu(NodeId),
    Sigmoid(NodeId),
    Tanh(NodeId),
    ConcatCols(NodeId, NodeId),
    SliceCols { a: NodeId, lo: usize, hi: usize },
    GatherRows { a: NodeId, idx: Vec<usize> },
    ScatterSumRows { a: NodeId, dest: Vec<usize> },
    /// Mean stable binary cross-entropy of logits against fixed targets.
    BceMean { logits: NodeId, targets: Vec<f64> },
}

pub struct Tape {
    values: Vec<Matrix>,
    ops: Vec<Op>,
}

/// Adjoints produced by [`Tape::backward`], indexed by node.
pub struct Gradients {
    grads: Vec<Option<Matrix>>,
}

impl Gradients {
    /// The adjoint of `id`; zero-shaped nodes that the loss never touched
    /// return `None`.
    pub fn get(&self, id: NodeId) -> Option<&Matrix> {
        self.grads[id.0].as_ref()
    }
}

fn stable_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape { values: Vec::new(), ops: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn value(&self, id: NodeId) -> &Matrix {
        &self.values[id.0]
    }

    fn push(&mut self, value: Matrix, op: Op) -> NodeId {
        self.values.push(value);
        self.ops.push(op);
        NodeId(self.values.len() - 1)
    }

    pub fn leaf(&mut self, value: Matrix) -> NodeId {
        self.push(value, Op::Leaf)
    }

    pub fn matmul(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = matmul(self.value(a), self.value(b));
        self.push(v, Op::MatMul(a, b))
    }

    pub fn add(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (va, vb) = (self.value(a), self.value(b));
        assert_eq!(va.shape(), vb.shape(), "add shapes");
        let mut v = va.clone();
        v.add_scaled(vb, 1.0);
        self.push(v, Op::Add(a, b))
    }

    /// Elementwise sum of one or more same-shaped nodes.
    pub fn add_n(&mut self, ids: &[NodeId]) -> NodeId {
        assert!(!ids.is_empty(), "add_n needs at least one input");
        let mut v = self.value(ids[0]).clone();
        for id in &ids[1..] {
            v.add_scaled(self.value(*id), 1.0);
        }
        self.push(v, Op::AddN(ids.to_vec()))
    }

    pub fn add_row_broadcast(&mut self, a: NodeId, row: NodeId) -> NodeId {
        let (va, vrow) = (self.value(a), self.value(row));
        assert_eq!(vrow.rows(), 1, "broadcast row must have one row");
        assert_eq!(va.cols(), vrow.cols(), "broadcast width");
        let mut v = va.clone();
        for i in 0..v.rows() {
            for (o, &r) in v.row_mut(i).iter_mut().zip(vrow.row(0)) {
                *o += r;
            }
        }
        self.push(v, Op::AddRowBroadcast { a, row })
    }

    pub fn hadamard(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let (va, vb) = (self.value(a), self.value(b));
        assert_eq!(va.shape(), vb.shape(), "hadamard shapes");
        let data = va.data().iter().zip(vb.data()).map(|(&x, &y)| x * y).collect();
        let v = Matrix::from_vec(va.rows(), va.cols(), data);
        self.push(v, Op::Hadamard(a, b))
    }

    pub fn scale(&mut self, a: NodeId, c: f64) -> NodeId {
        let v = self.value(a).map(|x| c * x);
        self.push(v, Op::Scale(a, c))
    }

    pub fn relu(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).map(|x| x.max(0.0));
        self.push(v, Op::Relu(a))
    }

    pub fn sigmoid(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).map(stable_sigmoid);
        self.push(v, Op::Sigmoid(a))
    }

    pub fn tanh(&mut self, a: NodeId) -> NodeId {
        let v = self.value(a).map(f64::tanh);
        self.push(v, Op::Tanh(a))
    }

    pub fn concat_cols(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let v = concat_cols(self.value(a), self.value(b));
        self.push(v, Op::ConcatCols(a, b))
    }

    pub fn slice_cols(&mut self, a: NodeId, lo: usize, hi: usize) -> NodeId {
        let va = self.value(a);
        assert!(lo < hi && hi <= va.cols(), "slice bounds");
        let mut v = Matrix::zeros(va.rows(), hi - lo);
        for i in 0..va.rows() {
            v.row_mut(i).copy_from_slice(&va.row(i)[lo..hi]);
        }
        self.push(v, Op::SliceCols { a, lo, hi })
    }

    /// Row `r` of the output is row `idx[r]` of `a`. Indices may repeat.
    pub fn gather_rows(&mut self, a: NodeId, idx: Vec<usize>) -> NodeId {
        let v = gather_rows(self.value(a), &idx);
        self.push(v, Op::GatherRows { a, idx })
    }

    /// Row `r` of `a` is added into output row `dest[r]`, with the
    /// value-sorted accumulation policy of
    /// [`scatter_sum_rows`](super::matrix::scatter_sum_rows), which makes
    /// message aggregation bit-level permutation equivariant.
    pub fn scatter_sum_rows(&mut self, a: NodeId, dest: Vec<usize>, out_rows: usize) -> NodeId {
        let v = scatter_sum_rows(self.value(a), &dest, out_rows);
        self.push(v, Op::ScatterSumRows { a, dest })
    }

    /// Numerically stable mean binary cross-entropy on logits:
    /// `mean(max(o, 0) - o*y + ln(1 + exp(-|o|)))`. Output is 1 by 1.
    pub fn bce_with_logits_mean(&mut self, logits: NodeId, targets: &[f64]) -> NodeId {
        let vl = self.value(logits);
        assert_eq!(vl.rows() * vl.cols(), targets.len(), "one target per logit");
        assert!(!targets.is_empty(), "empty loss");
        let mut total = 0.0;
        for (&o, &y) in vl.data().iter().zip(targets) {
            total += o.max(0.0) - o * y + (-o.abs()).exp().ln_1p();
        }
        let v = Matrix::from_vec(1, 1, vec![total / targets.len() as f64]);
        self.push(v, Op::BceMean { logits, targets: targets.to_vec() })
    }

    /// Accumulates adjoints of everything `root` depends on. `root` must be
    /// a scalar (1 by 1) node.
    pub fn backward(&self, root: NodeId) -> Gradients {
        assert_eq!(self.value(root).shape(), (1, 1), "backward needs a scalar root");
        let mut grads: Vec<Option<Matrix>> = (0..self.values.len()).map(|_| None).collect();
        grads[root.0] = Some(Matrix::from_vec(1, 1, vec![1.0]));

        for id in (0..self.ops.len()).rev() {
            let Some(gout) = grads[id].take() else { continue };
            match &self.ops[id] {
                Op::Leaf => {
                    grads[id] = Some(gout);
                    continue;
                }
                Op::MatMul(a, b) => {
                    let ga = matmul_nt(&gout, self.value(*b));
                    let gb = matmul_tn(self.value(*a), &gout);
                    accumulate(&mut grads, *a, ga);
                    accumulate(&mut grads, *b, gb);
                }
                Op::Add(a, b) => {
                    accumulate(&mut grads, *a, gout.clone());
                    accumulate(&mut grads, *b, gout.clone());
                }
                Op::AddN(ids) => {
                    for a in ids {
                        accumulate(&mut grads, *a, gout.clone());
                    }
                }
                Op::AddRowBroadcast { a, row } => {
                    let mut grow = Matrix::zeros(1, gout.cols());
                    for i in 0..gout.rows() {
                        for (o, &g) in grow.row_mut(0).iter_mut().zip(gout.row(i)) {
                            *o += g;
                        }
                    }
                    accumulate(&mut grads, *a, gout.clone());
                    accumulate(&mut grads, *row, grow);
                }
                Op::Hadamard(a, b) => {
                    let va = self.value(*a);
                    let vb = self.value(*b);
                    let ga = Matrix::from_vec(
                        gout.rows(),
                        gout.cols(),
                        gout.data().iter().zip(vb.data()).map(|(&g, &y)| g * y).collect(),
                    );
                    let gb = Matrix::from_vec(
                        gout.rows(),
                        gout.cols(),
                        gout.data().iter().zip(va.data()).map(|(&g, &x)| g * x).collect(),
                    );
                    accumulate(&mut grads, *a, ga);
                    accumulate(&mut grads, *b, gb);
                }
                Op::Scale(a, c) => {
                    let mut g = gout.clone();
                    for x in g.data_mut() {
                        *x *= c;
                    }
                    accumulate(&mut grads, *a, g);
                }
                Op::Relu(a) => {
                    let out = &self.values[id];
                    let g = Matrix::from_vec(
                        gout.rows(),
                        gout.cols(),
                        gout.data()
                            .iter()
                            .zip(out.data())
                            .map(|(&g, &o)| if o > 0.0 { g } else { 0.0 })
                            .collect(),
                    );
                    accumulate(&mut grads, *a, g);
                }
                Op::Sigmoid(a) => {
                    let out = &self.values[id];
                    let g = Matrix::from_vec(
                        gout.rows(),
                        gout.cols(),
                        gout.data()
                            .iter()
                            .zip(out.data())
                            .map(|(&g, &s)| g * s * (1.0 - s))
                            .collect(),
                    );
                    accumulate(&mut grads, *a, g);
                }
                Op::Tanh(a) => {
                    let out = &self.values[id];
                    let g = Matrix::from_vec(
                        gout.rows(),
                        gout.cols(),
                        gout.data()
                            .iter()
                            .zip(out.data())
                            .map(|(&g, &t)| g * (1.0 - t * t))
                            .collect(),
                    );
                    accumulate(&mut grads, *a, g);
                }
                Op::ConcatCols(a, b) => {
                    let ca = self.value(*a).cols();
                    let mut ga = Matrix::zeros(gout.rows(), ca);
                    let mut gb = Matrix::zeros(gout.rows(), gout.cols() - ca);
                    for i in 0..gout.rows() {
                        ga.row_mut(i).copy_from_slice(&gout.row(i)[..ca]);
                        gb.row_mut(i).copy_from_slice(&gout.row(i)[ca..]);
                    }
                    accumulate(&mut grads, *a, ga);
                    accumulate(&mut grads, *b, gb);
                }
                Op::SliceCols { a, lo, hi } => {
                    let va = self.value(*a);
                    let mut ga = Matrix::zeros(va.rows(), va.cols());
                    for i in 0..gout.rows() {
                        ga.row_mut(i)[*lo..*hi].copy_from_slice(gout.row(i));
                    }
                    accumulate(&mut grads, *a, ga);
                }
                Op::GatherRows { a, idx } => {
                    let va = self.value(*a);
                    let mut ga = Matrix::zeros(va.rows(), va.cols());
                    for (r, &src) in idx.iter().enumerate() {
                        for (o, &g) in ga.row_mut(src).iter_mut().zip(gout.row(r)) {
                            *o += g;
                        }
                    }
                    accumulate(&mut grads, *a, ga);
                }
                Op::ScatterSumRows { a, dest } => {
                    let va = self.value(*a);
                    let mut ga = Matrix::zeros(va.rows(), va.cols());
                    for (r, &d) in dest.iter().enumerate() {
                        ga.row_mut(r).copy_from_slice(gout.row(d));
                    }
                    accumulate(&mut grads, *a, ga);
                }
                Op::BceMean { logits, targets } => {
                    let vl = self.value(*logits);
                    let scale = gout.get(0, 0) / targets.len() as f64;
                    let g = Matrix::from_vec(
                        vl.rows(),
                        vl.cols(),
                        vl.data()
                            .iter()
                            .zip(targets)
                            .map(|(&o, &y)| scale * (stable_sigmoid(o) - y))
                            .collect(),
                    );
                    accumulate(&mut grads, *logits, g);
                }
            }
            grads[id] = Some(gout);
        }
        Gradients { grads }
    }
}

fn accumulate(grads: &mut [Option<Matrix>], id: NodeId, g: Matrix) {
    match &mut grads[id.0] {
        Some(existing) => existing.add_scaled(&g, 1.0),
        slot => *slot = Some(g),
    }
}
