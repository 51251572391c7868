//! Q-function approximators and their training arithmetic.
//!
//! Two backends implement [`QNetwork`]: the classical [`MlpQNet`] and the
//! dense–VQC–dense [`HybridQNet`]. Both expose their parameters as one flat
//! vector in a fixed order (see [`QNetwork::layout`]) so the loss,
//! gradient, Adam and checkpoint code is shared.

mod adam;
mod checkpoint;
mod dense;
mod hybrid;
mod loss;
mod mlp;
mod vqc;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use adam::{adam_step, AdamState};
pub use checkpoint::{Checkpoint, NamedTensor};
pub use dense::{Activation, DenseLayer};
pub use hybrid::{hybrid_forward, HybridQNet, HybridTrace};
pub use loss::{batch_loss, gradients, loss_and_gradients, q_update_tabular, td_target};
pub use mlp::{mlp_forward, MlpQNet, MlpTrace};
pub use vqc::{vqc_forward, VqcGradient, VqcLayer};

/// One Q-value per discrete action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QValues(Vec<f64>);

impl QValues {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("Q-values".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> Option<f64> {
        self.0.iter().copied().reduce(f64::max)
    }

    /// Index of the largest value; ties resolve to the lowest index.
    pub fn argmax(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, &v) in self.0.iter().enumerate() {
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((i, v));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Name and shape of one tensor in a network's flat parameter vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorSpec {
    pub name: String,
    pub shape: Vec<usize>,
}

impl TensorSpec {
    pub fn new(name: impl Into<String>, shape: Vec<usize>) -> Self {
        Self {
            name: name.into(),
            shape,
        }
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A differentiable Q-function with a flat parameter vector.
pub trait QNetwork: Clone + Send + Sync {
    /// Intermediate activations of one forward pass, kept for backprop.
    type Trace;

    fn state_dim(&self) -> usize;
    fn n_actions(&self) -> usize;
    fn param_count(&self) -> usize;

    fn trace(&self, features: &[f64]) -> Result<Self::Trace>;
    fn trace_q<'a>(&self, trace: &'a Self::Trace) -> &'a QValues;

    /// Adds `∂loss/∂θ` to `grad` given `∂loss/∂Q` for the traced input.
    fn backward(&self, trace: &Self::Trace, grad_q: &[f64], grad: &mut [f64]) -> Result<()>;

    fn params(&self) -> Vec<f64>;
    fn set_params(&mut self, flat: &[f64]) -> Result<()>;
    fn layout(&self) -> Vec<TensorSpec>;

    fn forward(&self, features: &[f64]) -> Result<QValues> {
        let trace = self.trace(features)?;
        Ok(self.trace_q(&trace).clone())
    }
}

/// Target-network copy: `θ⁻ ← θ`.
pub fn sync_target<N: QNetwork>(net: &N, target: &mut N) {
    target.clone_from(net);
}

pub(crate) fn check_flat(expected: usize, flat: &[f64]) -> Result<()> {
    if flat.len() != expected {
        return Err(Error::dim("flat parameters", expected, flat.len()));
    }
    if flat.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("flat parameters".into()));
    }
    Ok(())
}

/// Classical features mapped into rotation angles in `[0, π]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodedState {
    s_rad: Vec<f64>,
}

impl EncodedState {
    pub fn s_rad(&self) -> &[f64] {
        &self.s_rad
    }

    /// Builds an encoding from angles that must already lie in `[0, π]`.
    pub fn from_radians(s_rad: Vec<f64>) -> Result<Self> {
        if s_rad.iter().any(|v| !(0.0..=PI).contains(v)) {
            return Err(Error::Argument("encoded angles must lie in [0, π]".into()));
        }
        Ok(Self { s_rad })
    }
}

/// `π·(x − min)/(max − min)` per component, clamped to `[0, π]`.
pub fn encode_state(
    features: &[f64],
    feature_min: &[f64],
    feature_max: &[f64],
) -> Result<EncodedState> {
    if feature_min.len() != features.len() {
        return Err(Error::dim(
            "encoding minimum",
            features.len(),
            feature_min.len(),
        ));
    }
    if feature_max.len() != features.len() {
        return Err(Error::dim(
            "encoding maximum",
            features.len(),
            feature_max.len(),
        ));
    }
    let mut s_rad = Vec::with_capacity(features.len());
    for (i, ((x, lo), hi)) in features
        .iter()
        .zip(feature_min)
        .zip(feature_max)
        .enumerate()
    {
        if lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less) {
            return Err(Error::Config(format!(
                "encoding range {i}: minimum {lo} is not below maximum {hi}"
            )));
        }
        if !x.is_finite() {
            return Err(Error::Numeric(format!("feature {i}")));
        }
        s_rad.push((PI * (x - lo) / (hi - lo)).clamp(0.0, PI));
    }
    Ok(EncodedState { s_rad })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_examples() {
        let enc = |x: f64| encode_state(&[x], &[0.0], &[1000.0]).unwrap().s_rad()[0];
        assert_eq!(enc(0.0), 0.0);
        assert_eq!(enc(1000.0), PI);
        assert!((enc(500.0) - PI / 2.0).abs() < 1e-15);
        assert_eq!(enc(-5.0), 0.0);
        assert_eq!(enc(2000.0), PI);
    }

    #[test]
    fn encode_rejects_bad_range() {
        assert!(matches!(
            encode_state(&[1.0], &[2.0], &[2.0]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            encode_state(&[1.0], &[3.0], &[2.0]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            encode_state(&[1.0, 2.0], &[0.0], &[1.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(QValues::new(vec![1.0, 3.0, 2.0]).unwrap().argmax(), Some(1));
        assert_eq!(QValues::new(vec![5.0, 5.0, 1.0]).unwrap().argmax(), Some(0));
        assert_eq!(QValues::new(vec![]).unwrap().argmax(), None);
    }
}
