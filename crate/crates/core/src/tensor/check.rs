//! Finite-difference verification of analytic gradients.

use super::store::ParameterStore;
use super::tape::{Tape, ValueId};
use super::TensorError;

/// Default central-difference step. For f32 forward values, steps near 1e-2
/// balance truncation against rounding; callers checking smooth losses at
/// unit scale may prefer that over this conservative default.
pub const DEFAULT_FD_STEP: f32 = 1e-4;

/// Compare analytic gradients against central finite differences for every
/// parameter coordinate and return the maximum relative error
/// `|analytic - numeric| / max(1e-8, |analytic| + |numeric|)`.
///
/// `f` must rebuild the same deterministic scalar loss on each call (no
/// dropout). The store's values are restored before returning.
pub fn gradient_check<F>(
    f: F,
    store: &mut ParameterStore,
    h: f32,
) -> Result<f64, TensorError>
where
    F: Fn(&ParameterStore, &mut Tape) -> Result<ValueId, TensorError>,
{
    assert!(h > 0.0, "finite-difference step must be positive");

    store.zero_grads();
    let mut tape = Tape::new();
    let loss = f(store, &mut tape)?;
    tape.backward(loss, store)?;

    let names: Vec<String> = store.names().map(str::to_string).collect();
    let analytic: Vec<Vec<f32>> = names
        .iter()
        .map(|n| store.grad(n).expect("grad exists").data().to_vec())
        .collect();

    let eval = |store: &ParameterStore| -> Result<f64, TensorError> {
        let mut tape = Tape::new();
        let loss = f(store, &mut tape)?;
        Ok(f64::from(tape.value(loss).item()))
    };

    let mut max_rel = 0.0f64;
    for (name, grads) in names.iter().zip(&analytic) {
        for i in 0..grads.len() {
            let orig = store.get(name).expect("param exists").data()[i];
            store.get_mut(name).unwrap().data_mut()[i] = orig + h;
            let up = eval(store)?;
            store.get_mut(name).unwrap().data_mut()[i] = orig - h;
            let down = eval(store)?;
            store.get_mut(name).unwrap().data_mut()[i] = orig;

            let numeric = (up - down) / (2.0 * f64::from(h));
            let a = f64::from(grads[i]);
            let rel = (a - numeric).abs() / (a.abs() + numeric.abs()).max(1e-8);
            if rel > max_rel {
                max_rel = rel;
            }
        }
    }
    store.zero_grads();
    Ok(max_rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadratic_loss_checks_tightly() {
        // Central differences are exact for quadratics; with h = 1e-2 the
        // f32 rounding term stays below 1e-5 relative.
        let mut store = ParameterStore::new();
        store.insert("w", Tensor::vector(vec![1.0, -0.5, 2.0]));
        let err = gradient_check(
            |s, tape| {
                let w = tape.param(s, "w")?;
                let sq = tape.mul(w, w)?;
                let m = tape.mean_many(&[sq])?;
                let a = tape.index(m, 0)?;
                let b = tape.index(m, 1)?;
                let c = tape.index(m, 2)?;
                let ab = tape.add(a, b)?;
                tape.add(ab, c)
            },
            &mut store,
            1e-2,
        )
        .unwrap();
        assert!(err < 1e-5, "max relative error {err}");
    }

    /// Reduce a tensor to a scalar with unit weights (fold of index + add),
    /// keeping every coordinate's gradient at O(1).
    fn sum_all(tape: &mut Tape, x: ValueId) -> Result<ValueId, crate::tensor::TensorError> {
        let n = tape.value(x).numel();
        let mut total = tape.index(x, 0)?;
        for i in 1..n {
            let c = tape.index(x, i)?;
            total = tape.add(total, c)?;
        }
        Ok(total)
    }

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize, lo: f32, hi: f32) -> Vec<f32> {
        (0..n).map(|_| rng.gen_range(lo..hi)).collect()
    }

    /// Coordinates bounded away from zero (the ReLU kink is a subgradient
    /// point and is excluded from the sweep by resampling).
    fn rand_vec_off_zero(rng: &mut ChaCha8Rng, n: usize) -> Vec<f32> {
        (0..n)
            .map(|_| {
                let mag = rng.gen_range(0.1..1.5f32);
                if rng.gen_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect()
    }

    /// Matrix whose column and row sums are bounded away from zero, so the
    /// gradients of linear ops stay resolvable by f32 finite differences.
    fn rand_matrix_conditioned(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<f32> {
        loop {
            let data = rand_vec(rng, rows * cols, -1.0, 1.0);
            let col_ok = (0..cols).all(|j| {
                (0..rows).map(|i| f64::from(data[i * cols + j])).sum::<f64>().abs() >= 0.15
            });
            let row_ok = (0..rows).all(|i| {
                (0..cols).map(|j| f64::from(data[i * cols + j])).sum::<f64>().abs() >= 0.15
            });
            if col_ok && row_ok {
                return data;
            }
        }
    }

    /// Closed-form f64 cosine gradient, used only to select test points
    /// where no coordinate gradient vanishes (finite differences cannot
    /// resolve near-zero gradients against f32 rounding noise).
    fn cosine_grads_f64(u: &[f32], v: &[f32]) -> (Vec<f64>, Vec<f64>) {
        let dot: f64 = u.iter().zip(v).map(|(&x, &y)| f64::from(x) * f64::from(y)).sum();
        let nu: f64 = u.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|&y| f64::from(y) * f64::from(y)).sum::<f64>().sqrt();
        let cos = dot / (nu * nv);
        let du = u
            .iter()
            .zip(v)
            .map(|(&x, &y)| f64::from(y) / (nu * nv) - cos * f64::from(x) / (nu * nu))
            .collect();
        let dv = v
            .iter()
            .zip(u)
            .map(|(&y, &x)| f64::from(x) / (nu * nv) - cos * f64::from(y) / (nv * nv))
            .collect();
        (du, dv)
    }

    fn rand_cosine_pair(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f32>, Vec<f32>) {
        loop {
            let u = rand_vec_off_zero(rng, n);
            let v = rand_vec_off_zero(rng, n);
            let (du, dv) = cosine_grads_f64(&u, &v);
            if du.iter().chain(&dv).all(|g| g.abs() >= 0.05) {
                return (u, v);
            }
        }
    }

    #[test]
    fn primitives_check_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let h = 1e-2f32;
        let mut worst = 0.0f64;
        let mut run = |store: &mut ParameterStore,
                       f: &dyn Fn(
            &ParameterStore,
            &mut Tape,
        )
            -> Result<ValueId, crate::tensor::TensorError>| {
            let err = gradient_check(f, store, h).unwrap();
            worst = worst.max(err);
        };

        for trial in 0..100 {
            let n = 3 + (trial % 3);
            let (cu, cv) = rand_cosine_pair(&mut rng, n);
            let mut store = ParameterStore::new();
            store.insert("a", Tensor::vector(rand_vec_off_zero(&mut rng, n)));
            store.insert("b", Tensor::vector(rand_vec_off_zero(&mut rng, n)));
            store.insert("cu", Tensor::vector(cu));
            store.insert("cv", Tensor::vector(cv));
            store.insert(
                "w",
                Tensor::matrix(2, n, rand_matrix_conditioned(&mut rng, 2, n)).unwrap(),
            );
            store.insert(
                "m",
                Tensor::matrix(n, 2, rand_matrix_conditioned(&mut rng, n, 2)).unwrap(),
            );
            store.insert("logits", Tensor::vector(rand_vec(&mut rng, n, -0.8, 0.8)));
            store.insert("probs", Tensor::vector(rand_vec(&mut rng, n, 0.2, 1.2)));
            let target = trial % n;

            // elementwise add/sub/mul
            run(&mut store, &|s, t| {
                let a = t.param(s, "a")?;
                let b = t.param(s, "b")?;
                let x = t.add(a, b)?;
                let y = t.sub(x, b)?;
                let z = t.mul(y, b)?;
                sum_all(t, z)
            });
            // matvec
            run(&mut store, &|s, t| {
                let w = t.param(s, "w")?;
                let a = t.param(s, "a")?;
                let mv = t.matvec(w, a)?;
                sum_all(t, mv)
            });
            // matmat
            run(&mut store, &|s, t| {
                let w = t.param(s, "w")?;
                let m = t.param(s, "m")?;
                let mm = t.matmat(w, m)?;
                sum_all(t, mm)
            });
            // sigmoid, tanh, relu (inputs off the kink)
            run(&mut store, &|s, t| {
                let a = t.param(s, "a")?;
                let sg = t.sigmoid(a)?;
                let th = t.tanh(a)?;
                let re = t.relu(a)?;
                let m = t.mean_many(&[sg, th, re])?;
                sum_all(t, m)
            });
            // mean + concat + scale
            run(&mut store, &|s, t| {
                let a = t.param(s, "a")?;
                let b = t.param(s, "b")?;
                let m = t.mean_many(&[a, b])?;
                let cat = t.concat(m, a)?;
                let sc = t.scale(cat, 0.7)?;
                sum_all(t, sc)
            });
            // softmax through cross-entropy (the model's classifier head)
            run(&mut store, &|s, t| {
                let logits = t.param(s, "logits")?;
                let sm = t.softmax(logits)?;
                t.cross_entropy(sm, target)
            });
            // cross-entropy on a raw positive vector
            run(&mut store, &|s, t| {
                let p = t.param(s, "probs")?;
                t.cross_entropy(p, target)
            });
            // cosine at a well-posed pair
            run(&mut store, &|s, t| {
                let u = t.param(s, "cu")?;
                let v = t.param(s, "cv")?;
                t.cosine(u, v)
            });
            // tensor times tape scalar
            run(&mut store, &|s, t| {
                let p = t.param(s, "probs")?;
                let b = t.param(s, "b")?;
                let s0 = t.index(b, 0)?;
                let y = t.mul_scalar(p, s0)?;
                sum_all(t, y)
            });
        }
        assert!(worst < 1e-3, "worst relative error {worst}");
    }
}
