use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Adam moment estimates for one flat parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub step_count: u64,
    pub first_moment: Vec<f64>,
    pub second_moment: Vec<f64>,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub learning_rate: f64,
}

impl AdamState {
    /// Zeroed moments with β1 = 0.9, β2 = 0.999, ε = 1e-8.
    pub fn new(param_count: usize, learning_rate: f64) -> Self {
        Self {
            step_count: 0,
            first_moment: vec![0.0; param_count],
            second_moment: vec![0.0; param_count],
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            learning_rate,
        }
    }
}

/// One bias-corrected Adam descent step: `θ ← θ − α·m̂/(√v̂ + ε)`.
pub fn adam_step(params: &mut [f64], grads: &[f64], opt: &mut AdamState) -> Result<()> {
    if grads.len() != params.len() {
        return Err(Error::dim("Adam gradient", params.len(), grads.len()));
    }
    if opt.first_moment.len() != params.len() {
        return Err(Error::dim(
            "Adam moments",
            params.len(),
            opt.first_moment.len(),
        ));
    }
    opt.step_count += 1;
    let t = opt.step_count as i32;
    let correction1 = 1.0 - opt.beta1.powi(t);
    let correction2 = 1.0 - opt.beta2.powi(t);
    for (((p, g), m), v) in params
        .iter_mut()
        .zip(grads)
        .zip(opt.first_moment.iter_mut())
        .zip(opt.second_moment.iter_mut())
    {
        *m = opt.beta1 * *m + (1.0 - opt.beta1) * g;
        *v = opt.beta2 * *v + (1.0 - opt.beta2) * g * g;
        let m_hat = *m / correction1;
        let v_hat = *v / correction2;
        *p -= opt.learning_rate * m_hat / (v_hat.sqrt() + opt.epsilon);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_params() {
        let mut params = vec![0.5, -1.25, 3.0];
        let before = params.clone();
        let mut opt = AdamState::new(3, 1e-3);
        adam_step(&mut params, &[0.0; 3], &mut opt).unwrap();
        assert_eq!(params, before);
        assert_eq!(opt.step_count, 1);
    }

    #[test]
    fn first_step_moves_by_learning_rate_against_sign() {
        let mut params = vec![0.0, 0.0, 0.0];
        let grads = [2.5, -0.003, 40.0];
        let mut opt = AdamState::new(3, 1e-3);
        adam_step(&mut params, &grads, &mut opt).unwrap();
        for (p, g) in params.iter().zip(&grads) {
            // m̂/√v̂ = |g|/g exactly, up to ε
            let expected = -1e-3 * g.signum() * g.abs() / (g.abs() + 1e-8);
            assert!((p - expected).abs() < 1e-15);
            assert!((p + 1e-3 * g.signum()).abs() < 1e-8);
        }
    }

    #[test]
    fn minimizes_quadratic() {
        let mut x = vec![3.0];
        let mut opt = AdamState::new(1, 0.05);
        for _ in 0..2000 {
            let g = [2.0 * x[0]];
            adam_step(&mut x, &g, &mut opt).unwrap();
        }
        assert!(x[0] * x[0] < 1e-4, "x = {}", x[0]);
    }

    #[test]
    fn shape_mismatch() {
        let mut opt = AdamState::new(2, 1e-3);
        assert!(adam_step(&mut [0.0, 0.0], &[1.0], &mut opt).is_err());
        assert!(adam_step(&mut [0.0; 3], &[1.0; 3], &mut opt).is_err());
    }
}
