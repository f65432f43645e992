//! Named learnable tensors with gradients and Adam state.

use std::collections::BTreeMap;

use super::{Tensor, TensorError};

struct Param {
    value: Tensor,
    grad: Tensor,
    adam_m: Tensor,
    adam_v: Tensor,
}

/// All learnable tensors of a model, keyed by name. Iteration order is the
/// name order (BTreeMap), which fixes the update and serialization order.
pub struct ParameterStore {
    params: BTreeMap<String, Param>,
    step: u64,
}

impl ParameterStore {
    pub fn new() -> Self {
        ParameterStore {
            params: BTreeMap::new(),
            step: 0,
        }
    }

    /// Register a parameter. Gradient and moment buffers start at zero.
    pub fn insert(&mut self, name: &str, value: Tensor) {
        let shape = value.shape().to_vec();
        self.params.insert(
            name.to_string(),
            Param {
                value,
                grad: Tensor::zeros(&shape),
                adam_m: Tensor::zeros(&shape),
                adam_v: Tensor::zeros(&shape),
            },
        );
    }

    pub fn get(&self, name: &str) -> Option<&Tensor> {
        self.params.get(name).map(|p| &p.value)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor> {
        self.params.get_mut(name).map(|p| &mut p.value)
    }

    pub fn grad(&self, name: &str) -> Option<&Tensor> {
        self.params.get(name).map(|p| &p.grad)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Total number of scalar coordinates across all parameters.
    pub fn coordinate_count(&self) -> usize {
        self.params.values().map(|p| p.value.numel()).sum()
    }

    pub(crate) fn accumulate_grad(&mut self, name: &str, delta: &Tensor) -> Result<(), TensorError> {
        let p = self
            .params
            .get_mut(name)
            .ok_or_else(|| TensorError::UnknownParameter(name.to_string()))?;
        for (g, &d) in p.grad.data_mut().iter_mut().zip(delta.data()) {
            *g += d;
        }
        Ok(())
    }

    pub fn zero_grads(&mut self) {
        for p in self.params.values_mut() {
            p.grad.data_mut().fill(0.0);
        }
    }

    /// One Adam update with bias correction over every parameter, then zero
    /// the gradients and advance the step counter.
    pub fn adam_step(&mut self, lr: f32, beta1: f32, beta2: f32, eps: f32) {
        self.step += 1;
        let t = self.step as i32;
        let bc1 = 1.0 - beta1.powi(t);
        let bc2 = 1.0 - beta2.powi(t);
        for p in self.params.values_mut() {
            for i in 0..p.value.numel() {
                let g = p.grad.data()[i];
                let m = beta1 * p.adam_m.data()[i] + (1.0 - beta1) * g;
                let v = beta2 * p.adam_v.data()[i] + (1.0 - beta2) * g * g;
                p.adam_m.data_mut()[i] = m;
                p.adam_v.data_mut()[i] = v;
                let m_hat = m / bc1;
                let v_hat = v / bc2;
                p.value.data_mut()[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            }
            p.grad.data_mut().fill(0.0);
        }
    }

    /// Snapshot of all parameter values (used for best-epoch checkpoints and
    /// divergence recovery). Optimizer state is not cloned.
    pub fn clone_values(&self) -> ParameterStore {
        let mut out = ParameterStore::new();
        for (name, p) in &self.params {
            out.insert(name, p.value.clone());
        }
        out.step = self.step;
        out
    }

    /// Overwrite current values from a snapshot with identical names/shapes.
    pub fn restore_values(&mut self, snapshot: &ParameterStore) {
        for (name, p) in &mut self.params {
            if let Some(v) = snapshot.get(name) {
                p.value = v.clone();
            }
        }
    }
}

impl Default for ParameterStore {
    fn default() -> Self {
        Self::new()
    }
}
