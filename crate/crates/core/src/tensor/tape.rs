//! Forward computation recording and reverse-mode gradient propagation.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::store::ParameterStore;
use super::{Tensor, TensorError};

/// Norm guard for cosine similarity; added to each norm before dividing.
pub(crate) const COSINE_EPS: f64 = 1e-12;

/// Floor applied to the target probability inside cross-entropy.
const MIN_PROB: f64 = 1e-12;

/// Handle to a value recorded on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValueId(usize);

enum Op {
    Leaf { param: Option<String> },
    MatVec { m: ValueId, v: ValueId },
    MatMat { a: ValueId, b: ValueId },
    Add { a: ValueId, b: ValueId },
    Sub { a: ValueId, b: ValueId },
    Mul { a: ValueId, b: ValueId },
    Sigmoid { x: ValueId },
    Tanh { x: ValueId },
    Relu { x: ValueId },
    MeanMany { xs: Vec<ValueId> },
    Concat { a: ValueId, b: ValueId },
    Softmax { x: ValueId },
    Cosine { a: ValueId, b: ValueId },
    CrossEntropy { probs: ValueId, target: usize },
    Dropout { x: ValueId, factors: Vec<f32> },
    Scale { x: ValueId, c: f32 },
    MulScalar { x: ValueId, s: ValueId },
    Index { x: ValueId, i: usize },
}

struct Node {
    value: Tensor,
    op: Op,
}

/// Records a forward pass over tensors and parameters, then back-propagates.
///
/// A tape is built per forward pass (per mini-batch in training). Parameter
/// leaves snapshot the current store values; [`Tape::backward`] accumulates
/// d(loss)/d(param) into the store's gradient slots. Creation order is the
/// topological order, so backward is a single reverse sweep.
pub struct Tape {
    nodes: Vec<Node>,
    param_leaves: BTreeMap<String, ValueId>,
    train: bool,
    rng: ChaCha8Rng,
}

impl Tape {
    /// Evaluation-mode tape: dropout is the identity.
    pub fn new() -> Self {
        Tape {
            nodes: Vec::new(),
            param_leaves: BTreeMap::new(),
            train: false,
            rng: ChaCha8Rng::seed_from_u64(0),
        }
    }

    /// Training-mode tape; `seed` drives the dropout masks.
    pub fn for_training(seed: u64) -> Self {
        Tape {
            nodes: Vec::new(),
            param_leaves: BTreeMap::new(),
            train: true,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn is_training(&self) -> bool {
        self.train
    }

    pub fn value(&self, id: ValueId) -> &Tensor {
        &self.nodes[id.0].value
    }

    fn push(&mut self, value: Tensor, op: Op) -> ValueId {
        self.nodes.push(Node { value, op });
        ValueId(self.nodes.len() - 1)
    }

    pub fn constant(&mut self, t: Tensor) -> ValueId {
        self.push(t, Op::Leaf { param: None })
    }

    /// Leaf bound to a named parameter. Repeated requests for the same name
    /// return the same node, so gradients accumulate once per use site.
    pub fn param(&mut self, store: &ParameterStore, name: &str) -> Result<ValueId, TensorError> {
        if let Some(&id) = self.param_leaves.get(name) {
            return Ok(id);
        }
        let value = store
            .get(name)
            .ok_or_else(|| TensorError::UnknownParameter(name.to_string()))?
            .clone();
        let id = self.push(
            value,
            Op::Leaf {
                param: Some(name.to_string()),
            },
        );
        self.param_leaves.insert(name.to_string(), id);
        Ok(id)
    }

    fn binary_same_shape(
        &mut self,
        op_name: &'static str,
        a: ValueId,
        b: ValueId,
        f: impl Fn(f32, f32) -> f32,
        op: Op,
    ) -> Result<ValueId, TensorError> {
        let (ta, tb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if ta.shape() != tb.shape() {
            return Err(TensorError::ShapeMismatch {
                op: op_name,
                left: ta.shape().to_vec(),
                right: tb.shape().to_vec(),
            });
        }
        let data = ta
            .data()
            .iter()
            .zip(tb.data())
            .map(|(&x, &y)| f(x, y))
            .collect();
        let out = Tensor::from_vec(ta.shape(), data).expect("shape preserved");
        out.check_finite(op_name)?;
        Ok(self.push(out, op))
    }

    pub fn add(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, TensorError> {
        self.binary_same_shape("add", a, b, |x, y| x + y, Op::Add { a, b })
    }

    pub fn sub(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, TensorError> {
        self.binary_same_shape("sub", a, b, |x, y| x - y, Op::Sub { a, b })
    }

    pub fn mul(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, TensorError> {
        self.binary_same_shape("mul", a, b, |x, y| x * y, Op::Mul { a, b })
    }

    /// Matrix (m x n) times vector (n) -> vector (m).
    pub fn matvec(&mut self, m: ValueId, v: ValueId) -> Result<ValueId, TensorError> {
        let (tm, tv) = (&self.nodes[m.0].value, &self.nodes[v.0].value);
        let (rows, cols) = match tm.shape() {
            [r, c] => (*r, *c),
            _ => {
                return Err(TensorError::ShapeMismatch {
                    op: "matvec",
                    left: tm.shape().to_vec(),
                    right: tv.shape().to_vec(),
                })
            }
        };
        if tv.shape() != [cols] {
            return Err(TensorError::ShapeMismatch {
                op: "matvec",
                left: tm.shape().to_vec(),
                right: tv.shape().to_vec(),
            });
        }
        let mut out = vec![0.0f32; rows];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0f64;
            let row = &tm.data()[i * cols..(i + 1) * cols];
            for (w, x) in row.iter().zip(tv.data()) {
                acc += f64::from(*w) * f64::from(*x);
            }
            *o = acc as f32;
        }
        let out = Tensor::vector(out);
        out.check_finite("matvec")?;
        Ok(self.push(out, Op::MatVec { m, v }))
    }

    /// Matrix (m x k) times matrix (k x n) -> matrix (m x n).
    pub fn matmat(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, TensorError> {
        let (ta, tb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        let ((m, k), (k2, n)) = match (ta.shape(), tb.shape()) {
            ([m, k], [k2, n]) => ((*m, *k), (*k2, *n)),
            _ => {
                return Err(TensorError::ShapeMismatch {
                    op: "matmat",
                    left: ta.shape().to_vec(),
                    right: tb.shape().to_vec(),
                })
            }
        };
        if k != k2 {
            return Err(TensorError::ShapeMismatch {
                op: "matmat",
                left: ta.shape().to_vec(),
                right: tb.shape().to_vec(),
            });
        }
        let mut out = vec![0.0f32; m * n];
        for i in 0..m {
            for j in 0..n {
                let mut acc = 0.0f64;
                for l in 0..k {
                    acc += f64::from(ta.data()[i * k + l]) * f64::from(tb.data()[l * n + j]);
                }
                out[i * n + j] = acc as f32;
            }
        }
        let out = Tensor::matrix(m, n, out).expect("shape consistent");
        out.check_finite("matmat")?;
        Ok(self.push(out, Op::MatMat { a, b }))
    }

    fn unary(
        &mut self,
        op_name: &'static str,
        x: ValueId,
        f: impl Fn(f32) -> f32,
        op: Op,
    ) -> Result<ValueId, TensorError> {
        let tx = &self.nodes[x.0].value;
        let data = tx.data().iter().map(|&v| f(v)).collect();
        let out = Tensor::from_vec(tx.shape(), data).expect("shape preserved");
        out.check_finite(op_name)?;
        Ok(self.push(out, op))
    }

    pub fn sigmoid(&mut self, x: ValueId) -> Result<ValueId, TensorError> {
        self.unary("sigmoid", x, |v| 1.0 / (1.0 + (-v).exp()), Op::Sigmoid { x })
    }

    pub fn tanh(&mut self, x: ValueId) -> Result<ValueId, TensorError> {
        self.unary("tanh", x, f32::tanh, Op::Tanh { x })
    }

    pub fn relu(&mut self, x: ValueId) -> Result<ValueId, TensorError> {
        self.unary("relu", x, |v| v.max(0.0), Op::Relu { x })
    }

    /// Arithmetic mean of same-shape tensors (row-wise mean when the rows
    /// arrive as separate vectors). Accumulates in f64, ascending input order.
    pub fn mean_many(&mut self, xs: &[ValueId]) -> Result<ValueId, TensorError> {
        assert!(!xs.is_empty(), "mean_many of zero tensors");
        let shape = self.nodes[xs[0].0].value.shape().to_vec();
        for &x in &xs[1..] {
            if self.nodes[x.0].value.shape() != shape.as_slice() {
                return Err(TensorError::ShapeMismatch {
                    op: "mean",
                    left: shape,
                    right: self.nodes[x.0].value.shape().to_vec(),
                });
            }
        }
        let numel: usize = shape.iter().product();
        let inv = 1.0f64 / xs.len() as f64;
        let mut acc = vec![0.0f64; numel];
        for &x in xs {
            for (a, &v) in acc.iter_mut().zip(self.nodes[x.0].value.data()) {
                *a += f64::from(v);
            }
        }
        let data = acc.iter().map(|&a| (a * inv) as f32).collect();
        let out = Tensor::from_vec(&shape, data).expect("shape preserved");
        out.check_finite("mean")?;
        Ok(self.push(out, Op::MeanMany { xs: xs.to_vec() }))
    }

    /// Concatenation of two vectors.
    pub fn concat(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, TensorError> {
        let (ta, tb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if ta.shape().len() != 1 || tb.shape().len() != 1 {
            return Err(TensorError::ShapeMismatch {
                op: "concat",
                left: ta.shape().to_vec(),
                right: tb.shape().to_vec(),
            });
        }
        let mut data = ta.data().to_vec();
        data.extend_from_slice(tb.data());
        Ok(self.push(Tensor::vector(data), Op::Concat { a, b }))
    }

    /// Max-subtracted softmax over a vector.
    pub fn softmax(&mut self, x: ValueId) -> Result<ValueId, TensorError> {
        let tx = &self.nodes[x.0].value;
        if tx.shape().len() != 1 || tx.numel() == 0 {
            return Err(TensorError::ShapeMismatch {
                op: "softmax",
                left: tx.shape().to_vec(),
                right: vec![],
            });
        }
        let max = tx.data().iter().cloned().fold(f32::NEG_INFINITY, f32::max);
        let exps: Vec<f64> = tx
            .data()
            .iter()
            .map(|&v| f64::from(v - max).exp())
            .collect();
        let denom: f64 = exps.iter().sum();
        let data = exps.iter().map(|&e| (e / denom) as f32).collect();
        let out = Tensor::vector(data);
        out.check_finite("softmax")?;
        Ok(self.push(out, Op::Softmax { x }))
    }

    /// Cosine similarity of two vectors, with a small guard added to each
    /// norm so zero vectors stay finite.
    pub fn cosine(&mut self, a: ValueId, b: ValueId) -> Result<ValueId, TensorError> {
        let (ta, tb) = (&self.nodes[a.0].value, &self.nodes[b.0].value);
        if ta.shape() != tb.shape() || ta.shape().len() != 1 {
            return Err(TensorError::ShapeMismatch {
                op: "cosine",
                left: ta.shape().to_vec(),
                right: tb.shape().to_vec(),
            });
        }
        let (dot, na, nb) = cosine_parts(ta.data(), tb.data());
        let cos = (dot / ((na + COSINE_EPS) * (nb + COSINE_EPS))) as f32;
        let out = Tensor::scalar(cos);
        out.check_finite("cosine")?;
        Ok(self.push(out, Op::Cosine { a, b }))
    }

    /// Cross-entropy of a probability vector against a one-hot target index.
    pub fn cross_entropy(&mut self, probs: ValueId, target: usize) -> Result<ValueId, TensorError> {
        let tp = &self.nodes[probs.0].value;
        if tp.shape().len() != 1 || target >= tp.numel() {
            return Err(TensorError::ShapeMismatch {
                op: "cross_entropy",
                left: tp.shape().to_vec(),
                right: vec![target],
            });
        }
        let p = f64::from(tp.data()[target]).max(MIN_PROB);
        let out = Tensor::scalar((-p.ln()) as f32);
        out.check_finite("cross_entropy")?;
        Ok(self.push(out, Op::CrossEntropy { probs, target }))
    }

    /// Inverted dropout: in training mode each element is kept with
    /// probability `1 - p` and scaled by `1/(1-p)`; in eval mode this is the
    /// identity.
    pub fn dropout(&mut self, x: ValueId, p: f32) -> Result<ValueId, TensorError> {
        assert!((0.0..1.0).contains(&p), "dropout rate must be in [0, 1)");
        if !self.train || p == 0.0 {
            let value = self.nodes[x.0].value.clone();
            let factors = vec![1.0; value.numel()];
            return Ok(self.push(value, Op::Dropout { x, factors }));
        }
        let keep = 1.0 - p;
        let scale = 1.0 / keep;
        let tx = &self.nodes[x.0].value;
        let factors: Vec<f32> = (0..tx.numel())
            .map(|_| {
                if self.rng.gen::<f32>() < keep {
                    scale
                } else {
                    0.0
                }
            })
            .collect();
        let data = tx
            .data()
            .iter()
            .zip(&factors)
            .map(|(&v, &f)| v * f)
            .collect();
        let out = Tensor::from_vec(tx.shape(), data).expect("shape preserved");
        out.check_finite("dropout")?;
        Ok(self.push(out, Op::Dropout { x, factors }))
    }

    /// Multiply by a compile-time constant.
    pub fn scale(&mut self, x: ValueId, c: f32) -> Result<ValueId, TensorError> {
        self.unary("scale", x, |v| v * c, Op::Scale { x, c })
    }

    /// Multiply a tensor by a scalar recorded on the tape.
    pub fn mul_scalar(&mut self, x: ValueId, s: ValueId) -> Result<ValueId, TensorError> {
        let ts = &self.nodes[s.0].value;
        if !ts.is_scalar() {
            return Err(TensorError::ShapeMismatch {
                op: "mul_scalar",
                left: self.nodes[x.0].value.shape().to_vec(),
                right: ts.shape().to_vec(),
            });
        }
        let sv = ts.item();
        self.unary("mul_scalar", x, |v| v * sv, Op::MulScalar { x, s })
    }

    /// Extract one coordinate (row-major flat index) as a scalar.
    pub fn index(&mut self, x: ValueId, i: usize) -> Result<ValueId, TensorError> {
        let tx = &self.nodes[x.0].value;
        if i >= tx.numel() {
            return Err(TensorError::ShapeMismatch {
                op: "index",
                left: tx.shape().to_vec(),
                right: vec![i],
            });
        }
        let out = Tensor::scalar(tx.data()[i]);
        Ok(self.push(out, Op::Index { x, i }))
    }

    /// Back-propagate from a scalar loss, accumulating parameter gradients
    /// into `store`. Consumes the tape; reverse creation order makes the
    /// accumulation deterministic.
    pub fn backward(self, loss: ValueId, store: &mut ParameterStore) -> Result<(), TensorError> {
        let loss_t = &self.nodes[loss.0].value;
        if !loss_t.is_scalar() {
            return Err(TensorError::NonScalarLoss {
                shape: loss_t.shape().to_vec(),
            });
        }
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::scalar(1.0));

        for idx in (0..self.nodes.len()).rev() {
            let grad = match grads[idx].take() {
                Some(g) => g,
                None => continue,
            };
            let node = &self.nodes[idx];
            match &node.op {
                Op::Leaf { param } => {
                    if let Some(name) = param {
                        store.accumulate_grad(name, &grad)?;
                    }
                }
                Op::Add { a, b } => {
                    add_into(&mut grads, *a, grad.data(), &self.nodes);
                    add_into(&mut grads, *b, grad.data(), &self.nodes);
                }
                Op::Sub { a, b } => {
                    add_into(&mut grads, *a, grad.data(), &self.nodes);
                    let neg: Vec<f32> = grad.data().iter().map(|&g| -g).collect();
                    add_into(&mut grads, *b, &neg, &self.nodes);
                }
                Op::Mul { a, b } => {
                    let da: Vec<f32> = grad
                        .data()
                        .iter()
                        .zip(self.nodes[b.0].value.data())
                        .map(|(&g, &y)| g * y)
                        .collect();
                    let db: Vec<f32> = grad
                        .data()
                        .iter()
                        .zip(self.nodes[a.0].value.data())
                        .map(|(&g, &x)| g * x)
                        .collect();
                    add_into(&mut grads, *a, &da, &self.nodes);
                    add_into(&mut grads, *b, &db, &self.nodes);
                }
                Op::MatVec { m, v } => {
                    let tm = &self.nodes[m.0].value;
                    let tv = &self.nodes[v.0].value;
                    let (rows, cols) = (tm.shape()[0], tm.shape()[1]);
                    let mut dm = vec![0.0f32; rows * cols];
                    for i in 0..rows {
                        let g = grad.data()[i];
                        for j in 0..cols {
                            dm[i * cols + j] = g * tv.data()[j];
                        }
                    }
                    let mut dv = vec![0.0f32; cols];
                    for (j, d) in dv.iter_mut().enumerate() {
                        let mut acc = 0.0f64;
                        for i in 0..rows {
                            acc += f64::from(tm.data()[i * cols + j]) * f64::from(grad.data()[i]);
                        }
                        *d = acc as f32;
                    }
                    add_into(&mut grads, *m, &dm, &self.nodes);
                    add_into(&mut grads, *v, &dv, &self.nodes);
                }
                Op::MatMat { a, b } => {
                    let ta = &self.nodes[a.0].value;
                    let tb = &self.nodes[b.0].value;
                    let (m, k) = (ta.shape()[0], ta.shape()[1]);
                    let n = tb.shape()[1];
                    // dA = dC . B^T
                    let mut da = vec![0.0f32; m * k];
                    for i in 0..m {
                        for l in 0..k {
                            let mut acc = 0.0f64;
                            for j in 0..n {
                                acc += f64::from(grad.data()[i * n + j])
                                    * f64::from(tb.data()[l * n + j]);
                            }
                            da[i * k + l] = acc as f32;
                        }
                    }
                    // dB = A^T . dC
                    let mut db = vec![0.0f32; k * n];
                    for l in 0..k {
                        for j in 0..n {
                            let mut acc = 0.0f64;
                            for i in 0..m {
                                acc += f64::from(ta.data()[i * k + l])
                                    * f64::from(grad.data()[i * n + j]);
                            }
                            db[l * n + j] = acc as f32;
                        }
                    }
                    add_into(&mut grads, *a, &da, &self.nodes);
                    add_into(&mut grads, *b, &db, &self.nodes);
                }
                Op::Sigmoid { x } => {
                    let y = &node.value;
                    let dx: Vec<f32> = grad
                        .data()
                        .iter()
                        .zip(y.data())
                        .map(|(&g, &s)| g * s * (1.0 - s))
                        .collect();
                    add_into(&mut grads, *x, &dx, &self.nodes);
                }
                Op::Tanh { x } => {
                    let y = &node.value;
                    let dx: Vec<f32> = grad
                        .data()
                        .iter()
                        .zip(y.data())
                        .map(|(&g, &t)| g * (1.0 - t * t))
                        .collect();
                    add_into(&mut grads, *x, &dx, &self.nodes);
                }
                Op::Relu { x } => {
                    // Subgradient 0 at the kink.
                    let tx = &self.nodes[x.0].value;
                    let dx: Vec<f32> = grad
                        .data()
                        .iter()
                        .zip(tx.data())
                        .map(|(&g, &v)| if v > 0.0 { g } else { 0.0 })
                        .collect();
                    add_into(&mut grads, *x, &dx, &self.nodes);
                }
                Op::MeanMany { xs } => {
                    let inv = 1.0 / xs.len() as f32;
                    let dx: Vec<f32> = grad.data().iter().map(|&g| g * inv).collect();
                    for &x in xs {
                        add_into(&mut grads, x, &dx, &self.nodes);
                    }
                }
                Op::Concat { a, b } => {
                    let la = self.nodes[a.0].value.numel();
                    add_into(&mut grads, *a, &grad.data()[..la], &self.nodes);
                    add_into(&mut grads, *b, &grad.data()[la..], &self.nodes);
                }
                Op::Softmax { x } => {
                    let y = &node.value;
                    let mut dot = 0.0f64;
                    for (&s, &g) in y.data().iter().zip(grad.data()) {
                        dot += f64::from(s) * f64::from(g);
                    }
                    let dx: Vec<f32> = y
                        .data()
                        .iter()
                        .zip(grad.data())
                        .map(|(&s, &g)| (f64::from(s) * (f64::from(g) - dot)) as f32)
                        .collect();
                    add_into(&mut grads, *x, &dx, &self.nodes);
                }
                Op::Cosine { a, b } => {
                    let u = self.nodes[a.0].value.data();
                    let v = self.nodes[b.0].value.data();
                    let (dot, nu_raw, nv_raw) = cosine_parts(u, v);
                    let nu = nu_raw + COSINE_EPS;
                    let nv = nv_raw + COSINE_EPS;
                    let cos = dot / (nu * nv);
                    let g = f64::from(grad.data()[0]);
                    let mut du = vec![0.0f32; u.len()];
                    let mut dv = vec![0.0f32; v.len()];
                    for i in 0..u.len() {
                        let mut d = f64::from(v[i]) / (nu * nv);
                        if nu_raw > 0.0 {
                            d -= cos * f64::from(u[i]) / (nu * nu_raw);
                        }
                        du[i] = (g * d) as f32;
                        let mut e = f64::from(u[i]) / (nu * nv);
                        if nv_raw > 0.0 {
                            e -= cos * f64::from(v[i]) / (nv * nv_raw);
                        }
                        dv[i] = (g * e) as f32;
                    }
                    add_into(&mut grads, *a, &du, &self.nodes);
                    add_into(&mut grads, *b, &dv, &self.nodes);
                }
                Op::CrossEntropy { probs, target } => {
                    let tp = &self.nodes[probs.0].value;
                    let p = f64::from(tp.data()[*target]).max(MIN_PROB);
                    let mut dp = vec![0.0f32; tp.numel()];
                    dp[*target] = (-f64::from(grad.data()[0]) / p) as f32;
                    add_into(&mut grads, *probs, &dp, &self.nodes);
                }
                Op::Dropout { x, factors } => {
                    let dx: Vec<f32> = grad
                        .data()
                        .iter()
                        .zip(factors)
                        .map(|(&g, &f)| g * f)
                        .collect();
                    add_into(&mut grads, *x, &dx, &self.nodes);
                }
                Op::Scale { x, c } => {
                    let dx: Vec<f32> = grad.data().iter().map(|&g| g * c).collect();
                    add_into(&mut grads, *x, &dx, &self.nodes);
                }
                Op::MulScalar { x, s } => {
                    let sv = self.nodes[s.0].value.item();
                    let dx: Vec<f32> = grad.data().iter().map(|&g| g * sv).collect();
                    let mut acc = 0.0f64;
                    for (&g, &v) in grad.data().iter().zip(self.nodes[x.0].value.data()) {
                        acc += f64::from(g) * f64::from(v);
                    }
                    add_into(&mut grads, *x, &dx, &self.nodes);
                    add_into(&mut grads, *s, &[acc as f32], &self.nodes);
                }
                Op::Index { x, i } => {
                    let mut dx = vec![0.0f32; self.nodes[x.0].value.numel()];
                    dx[*i] = grad.data()[0];
                    add_into(&mut grads, *x, &dx, &self.nodes);
                }
            }
        }
        Ok(())
    }
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

fn add_into(grads: &mut [Option<Tensor>], target: ValueId, delta: &[f32], nodes: &[Node]) {
    let slot = &mut grads[target.0];
    match slot {
        Some(g) => {
            for (a, &d) in g.data_mut().iter_mut().zip(delta) {
                *a += d;
            }
        }
        None => {
            let shape = nodes[target.0].value.shape().to_vec();
            let t = Tensor::from_vec(&shape, delta.to_vec()).expect("gradient shape matches value");
            *slot = Some(t);
        }
    }
}

fn cosine_parts(u: &[f32], v: &[f32]) -> (f64, f64, f64) {
    let mut dot = 0.0f64;
    let mut nu = 0.0f64;
    let mut nv = 0.0f64;
    for (&x, &y) in u.iter().zip(v) {
        dot += f64::from(x) * f64::from(y);
        nu += f64::from(x) * f64::from(x);
        nv += f64::from(y) * f64::from(y);
    }
    (dot, nu.sqrt(), nv.sqrt())
}
