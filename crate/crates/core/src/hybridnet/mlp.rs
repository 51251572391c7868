use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_flat, Activation, DenseLayer, QNetwork, QValues, TensorSpec};
use crate::error::{Error, Result};

/// Classical Q-network: `state_dim → hidden → hidden → n_actions`, tanh on
/// the hidden layers and identity on the output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpQNet {
    layers: Vec<DenseLayer>,
}

#[derive(Debug, Clone)]
pub struct MlpTrace {
    /// Input followed by the output of every layer.
    activations: Vec<Vec<f64>>,
    q: QValues,
}

impl MlpQNet {
    pub fn new<R: Rng + ?Sized>(
        state_dim: usize,
        hidden: usize,
        n_actions: usize,
        rng: &mut R,
    ) -> Self {
        Self {
            layers: vec![
                DenseLayer::init(state_dim, hidden, Activation::Tanh, rng),
                DenseLayer::init(hidden, hidden, Activation::Tanh, rng),
                DenseLayer::init(hidden, n_actions, Activation::Identity, rng),
            ],
        }
    }

    /// Any non-empty chain of layers whose dimensions line up.
    pub fn from_layers(layers: Vec<DenseLayer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Argument("MLP needs at least one layer".into()));
        }
        for pair in layers.windows(2) {
            if pair[0].out_dim() != pair[1].in_dim() {
                return Err(Error::dim(
                    "MLP layer chain",
                    pair[0].out_dim(),
                    pair[1].in_dim(),
                ));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[DenseLayer] {
        &self.layers
    }
}

/// Forward pass of the classical Q-network.
pub fn mlp_forward(state_features: &[f64], net: &MlpQNet) -> Result<QValues> {
    net.forward(state_features)
}

impl QNetwork for MlpQNet {
    type Trace = MlpTrace;

    fn state_dim(&self) -> usize {
        self.layers[0].in_dim()
    }

    fn n_actions(&self) -> usize {
        self.layers[self.layers.len() - 1].out_dim()
    }

    fn param_count(&self) -> usize {
        self.layers.iter().map(DenseLayer::param_count).sum()
    }

    fn trace(&self, features: &[f64]) -> Result<MlpTrace> {
        let mut activations = Vec::with_capacity(self.layers.len() + 1);
        activations.push(features.to_vec());
        for layer in &self.layers {
            let next = layer.forward(activations.last().unwrap())?;
            activations.push(next);
        }
        let q = QValues::new(activations.last().unwrap().clone())?;
        Ok(MlpTrace { activations, q })
    }

    fn trace_q<'a>(&self, trace: &'a MlpTrace) -> &'a QValues {
        &trace.q
    }

    fn backward(&self, trace: &MlpTrace, grad_q: &[f64], grad: &mut [f64]) -> Result<()> {
        if grad_q.len() != self.n_actions() {
            return Err(Error::dim("Q gradient", self.n_actions(), grad_q.len()));
        }
        if grad.len() != self.param_count() {
            return Err(Error::dim(
                "parameter gradient",
                self.param_count(),
                grad.len(),
            ));
        }
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut offset = 0;
        for layer in &self.layers {
            offsets.push(offset);
            offset += layer.param_count();
        }
        let mut upstream = grad_q.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let slot = &mut grad[offsets[i]..offsets[i] + layer.param_count()];
            upstream = layer.backward(
                &trace.activations[i],
                &trace.activations[i + 1],
                &upstream,
                slot,
            );
        }
        Ok(())
    }

    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for layer in &self.layers {
            layer.write_params(&mut out);
        }
        out
    }

    fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        check_flat(self.param_count(), flat)?;
        let mut rest = flat;
        for layer in &mut self.layers {
            rest = layer.read_params(rest);
        }
        Ok(())
    }

    fn layout(&self) -> Vec<TensorSpec> {
        let mut out = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            layer.layout(&format!("mlp.{i}"), &mut out);
        }
        out
    }
}
