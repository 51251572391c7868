use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Tanh,
    Identity,
}

impl Activation {
    #[inline]
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Tanh => x.tanh(),
            Activation::Identity => x,
        }
    }

    /// Derivative expressed through the activation's output.
    #[inline]
    fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

/// Fully connected layer `y = act(W·x + b)` with `W` stored row-major
/// as `out_dim × in_dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseLayer {
    in_dim: usize,
    out_dim: usize,
    weights: Vec<f64>,
    biases: Vec<f64>,
    activation: Activation,
}

impl DenseLayer {
    pub fn zeros(in_dim: usize, out_dim: usize, activation: Activation) -> Self {
        Self {
            in_dim,
            out_dim,
            weights: vec![0.0; in_dim * out_dim],
            biases: vec![0.0; out_dim],
            activation,
        }
    }

    /// Weights uniform in `±1/√in_dim`, biases zero.
    pub fn init<R: Rng + ?Sized>(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        rng: &mut R,
    ) -> Self {
        let bound = 1.0 / (in_dim as f64).sqrt();
        let weights = (0..in_dim * out_dim)
            .map(|_| rng.gen_range(-bound..=bound))
            .collect();
        Self {
            in_dim,
            out_dim,
            weights,
            biases: vec![0.0; out_dim],
            activation,
        }
    }

    pub fn from_parts(
        in_dim: usize,
        out_dim: usize,
        weights: Vec<f64>,
        biases: Vec<f64>,
        activation: Activation,
    ) -> Result<Self> {
        if weights.len() != in_dim * out_dim {
            return Err(Error::dim("dense weights", in_dim * out_dim, weights.len()));
        }
        if biases.len() != out_dim {
            return Err(Error::dim("dense biases", out_dim, biases.len()));
        }
        if weights.iter().chain(&biases).any(|v| !v.is_finite()) {
            return Err(Error::Numeric("dense layer parameters".into()));
        }
        Ok(Self {
            in_dim,
            out_dim,
            weights,
            biases,
            activation,
        })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.biases.len()
    }

    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        if input.len() != self.in_dim {
            return Err(Error::dim("dense input", self.in_dim, input.len()));
        }
        Ok(self
            .weights
            .chunks_exact(self.in_dim)
            .zip(&self.biases)
            .map(|(row, b)| {
                let pre = row.iter().zip(input).map(|(w, x)| w * x).sum::<f64>() + b;
                self.activation.apply(pre)
            })
            .collect())
    }

    /// Accumulates parameter gradients (weights then biases) into
    /// `grad_params` and returns the gradient with respect to `input`.
    pub fn backward(
        &self,
        input: &[f64],
        output: &[f64],
        grad_output: &[f64],
        grad_params: &mut [f64],
    ) -> Vec<f64> {
        debug_assert_eq!(grad_params.len(), self.param_count());
        let (gw, gb) = grad_params.split_at_mut(self.weights.len());
        let mut grad_input = vec![0.0; self.in_dim];
        for o in 0..self.out_dim {
            let delta = grad_output[o] * self.activation.derivative_from_output(output[o]);
            if delta == 0.0 {
                continue;
            }
            gb[o] += delta;
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let grow = &mut gw[o * self.in_dim..(o + 1) * self.in_dim];
            for i in 0..self.in_dim {
                grow[i] += delta * input[i];
                grad_input[i] += delta * row[i];
            }
        }
        grad_input
    }

    pub(crate) fn write_params(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.weights);
        out.extend_from_slice(&self.biases);
    }

    /// Loads parameters from the front of `flat`, returning the remainder.
    pub(crate) fn read_params<'a>(&mut self, flat: &'a [f64]) -> &'a [f64] {
        let (w, rest) = flat.split_at(self.weights.len());
        let (b, rest) = rest.split_at(self.biases.len());
        self.weights.copy_from_slice(w);
        self.biases.copy_from_slice(b);
        rest
    }

    pub(crate) fn layout(&self, name: &str, out: &mut Vec<super::TensorSpec>) {
        out.push(super::TensorSpec::new(
            format!("{name}.weight"),
            vec![self.out_dim, self.in_dim],
        ));
        out.push(super::TensorSpec::new(
            format!("{name}.bias"),
            vec![self.out_dim],
        ));
    }
}
