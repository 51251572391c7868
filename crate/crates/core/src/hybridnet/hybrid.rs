use std::f64::consts::PI;

use rand::Rng;

use super::{
    check_flat, encode_state, vqc_forward, Activation, DenseLayer, QNetwork, QValues, TensorSpec,
    VqcGradient, VqcLayer,
};
use crate::error::{Error, Result};

/// Dense–VQC–dense Q-network.
///
/// ```text
/// state ─ input_fc (tanh) ─ align_in (tanh) ─ [−1,1] → [0,π] ─ VQC ─ ⟨Z⟩ → [0,1]
///       ─ align_out (identity) ─ output_fc (identity) ─ Q-values
/// ```
#[derive(Debug, Clone, PartialEq)]
pub struct HybridQNet {
    input_fc: DenseLayer,
    align_in: DenseLayer,
    vqc: VqcLayer,
    align_out: DenseLayer,
    output_fc: DenseLayer,
    gradient_method: VqcGradient,
}

#[derive(Debug, Clone)]
pub struct HybridTrace {
    input: Vec<f64>,
    hidden_in: Vec<f64>,
    aligned: Vec<f64>,
    encoded: Vec<f64>,
    measured: Vec<f64>,
    hidden_out: Vec<f64>,
    q: QValues,
}

/// `align_in` is tanh, so its outputs live in this range before encoding.
const ALIGN_MIN: f64 = -1.0;
const ALIGN_MAX: f64 = 1.0;

impl HybridQNet {
    pub fn new<R: Rng + ?Sized>(
        state_dim: usize,
        hidden: usize,
        n_qubits: usize,
        depth: usize,
        n_actions: usize,
        rng: &mut R,
    ) -> Result<Self> {
        let input_fc = DenseLayer::init(state_dim, hidden, Activation::Tanh, rng);
        let align_in = DenseLayer::init(hidden, n_qubits, Activation::Tanh, rng);
        let vqc = VqcLayer::init(n_qubits, depth, rng)?;
        let align_out = DenseLayer::init(n_qubits, hidden, Activation::Identity, rng);
        let output_fc = DenseLayer::init(hidden, n_actions, Activation::Identity, rng);
        Self::from_parts(input_fc, align_in, vqc, align_out, output_fc)
    }

    pub fn from_parts(
        input_fc: DenseLayer,
        align_in: DenseLayer,
        vqc: VqcLayer,
        align_out: DenseLayer,
        output_fc: DenseLayer,
    ) -> Result<Self> {
        if input_fc.out_dim() != align_in.in_dim() {
            return Err(Error::dim(
                "hybrid input_fc → align_in",
                input_fc.out_dim(),
                align_in.in_dim(),
            ));
        }
        if align_in.out_dim() != vqc.n_qubits() {
            return Err(Error::dim(
                "hybrid align_in → vqc",
                vqc.n_qubits(),
                align_in.out_dim(),
            ));
        }
        if align_out.in_dim() != vqc.n_qubits() {
            return Err(Error::dim(
                "hybrid vqc → align_out",
                vqc.n_qubits(),
                align_out.in_dim(),
            ));
        }
        if align_out.out_dim() != output_fc.in_dim() {
            return Err(Error::dim(
                "hybrid align_out → output_fc",
                align_out.out_dim(),
                output_fc.in_dim(),
            ));
        }
        Ok(Self {
            input_fc,
            align_in,
            vqc,
            align_out,
            output_fc,
            gradient_method: VqcGradient::default(),
        })
    }

    pub fn with_gradient_method(mut self, method: VqcGradient) -> Self {
        self.gradient_method = method;
        self
    }

    pub fn gradient_method(&self) -> VqcGradient {
        self.gradient_method
    }

    pub fn set_gradient_method(&mut self, method: VqcGradient) {
        self.gradient_method = method;
    }

    pub fn input_fc(&self) -> &DenseLayer {
        &self.input_fc
    }

    pub fn align_in(&self) -> &DenseLayer {
        &self.align_in
    }

    pub fn vqc(&self) -> &VqcLayer {
        &self.vqc
    }

    pub fn align_out(&self) -> &DenseLayer {
        &self.align_out
    }

    pub fn output_fc(&self) -> &DenseLayer {
        &self.output_fc
    }

    fn segment_sizes(&self) -> [usize; 5] {
        [
            self.input_fc.param_count(),
            self.align_in.param_count(),
            self.vqc.angles().len(),
            self.align_out.param_count(),
            self.output_fc.param_count(),
        ]
    }
}

/// Forward pass of the hybrid Q-network.
pub fn hybrid_forward(state_features: &[f64], net: &HybridQNet) -> Result<QValues> {
    net.forward(state_features)
}

impl QNetwork for HybridQNet {
    type Trace = HybridTrace;

    fn state_dim(&self) -> usize {
        self.input_fc.in_dim()
    }

    fn n_actions(&self) -> usize {
        self.output_fc.out_dim()
    }

    fn param_count(&self) -> usize {
        self.segment_sizes().iter().sum()
    }

    fn trace(&self, features: &[f64]) -> Result<HybridTrace> {
        let hidden_in = self.input_fc.forward(features)?;
        let aligned = self.align_in.forward(&hidden_in)?;
        let n = aligned.len();
        let encoded = encode_state(&aligned, &vec![ALIGN_MIN; n], &vec![ALIGN_MAX; n])?;
        let measured = vqc_forward(&encoded, &self.vqc)?;
        let hidden_out = self.align_out.forward(&measured)?;
        let q = QValues::new(self.output_fc.forward(&hidden_out)?)?;
        Ok(HybridTrace {
            input: features.to_vec(),
            hidden_in,
            aligned,
            encoded: encoded.s_rad().to_vec(),
            measured,
            hidden_out,
            q,
        })
    }

    fn trace_q<'a>(&self, trace: &'a HybridTrace) -> &'a QValues {
        &trace.q
    }

    fn backward(&self, trace: &HybridTrace, grad_q: &[f64], grad: &mut [f64]) -> Result<()> {
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
        let [s0, s1, s2, s3, _] = self.segment_sizes();
        let (g_input, rest) = grad.split_at_mut(s0);
        let (g_align_in, rest) = rest.split_at_mut(s1);
        let (g_vqc, rest) = rest.split_at_mut(s2);
        let (g_align_out, g_output) = rest.split_at_mut(s3);

        let d_hidden_out =
            self.output_fc
                .backward(&trace.hidden_out, trace.q.values(), grad_q, g_output);
        let d_measured = self.align_out.backward(
            &trace.measured,
            &trace.hidden_out,
            &d_hidden_out,
            g_align_out,
        );
        // measured = (⟨Z⟩ + 1) / 2
        let weights: Vec<f64> = d_measured.iter().map(|d| 0.5 * d).collect();
        let (d_encoded, d_angles, _) =
            self.vqc
                .gradient(&trace.encoded, &weights, self.gradient_method)?;
        for (g, d) in g_vqc.iter_mut().zip(&d_angles) {
            *g += d;
        }
        // encoded = π·(aligned − min)/(max − min); tanh never reaches the clamp
        let scale = PI / (ALIGN_MAX - ALIGN_MIN);
        let d_aligned: Vec<f64> = d_encoded.iter().map(|d| d * scale).collect();
        let d_hidden_in =
            self.align_in
                .backward(&trace.hidden_in, &trace.aligned, &d_aligned, g_align_in);
        self.input_fc
            .backward(&trace.input, &trace.hidden_in, &d_hidden_in, g_input);
        Ok(())
    }

    fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        self.input_fc.write_params(&mut out);
        self.align_in.write_params(&mut out);
        out.extend_from_slice(self.vqc.angles());
        self.align_out.write_params(&mut out);
        self.output_fc.write_params(&mut out);
        out
    }

    fn set_params(&mut self, flat: &[f64]) -> Result<()> {
        check_flat(self.param_count(), flat)?;
        let rest = self.input_fc.read_params(flat);
        let rest = self.align_in.read_params(rest);
        let (angles, rest) = rest.split_at(self.vqc.angles().len());
        self.vqc.angles_mut().copy_from_slice(angles);
        let rest = self.align_out.read_params(rest);
        self.output_fc.read_params(rest);
        Ok(())
    }

    fn layout(&self) -> Vec<TensorSpec> {
        let mut out = Vec::new();
        self.input_fc.layout("input_fc", &mut out);
        self.align_in.layout("align_in", &mut out);
        out.push(TensorSpec::new(
            "vqc.angles",
            vec![self.vqc.depth(), self.vqc.n_qubits(), 3],
        ));
        self.align_out.layout("align_out", &mut out);
        self.output_fc.layout("output_fc", &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_network_gives_zero_q() {
        let net = HybridQNet::from_parts(
            DenseLayer::zeros(2, 32, Activation::Tanh),
            DenseLayer::zeros(32, 5, Activation::Tanh),
            VqcLayer::zeros(5, 2).unwrap(),
            DenseLayer::zeros(5, 32, Activation::Identity),
            DenseLayer::zeros(32, 21, Activation::Identity),
        )
        .unwrap();
        let q = hybrid_forward(&[0.4, 0.8], &net).unwrap();
        assert_eq!(q.values(), &[0.0; 21]);
    }

    #[test]
    fn forward_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let net = HybridQNet::new(2, 32, 5, 2, 21, &mut rng).unwrap();
        let a = hybrid_forward(&[0.3, 0.7], &net).unwrap();
        let b = hybrid_forward(&[0.3, 0.7], &net).unwrap();
        let bits = |q: &QValues| q.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn matches_step_by_step_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10 {
            let net = HybridQNet::new(2, 8, 5, 2, 7, &mut rng).unwrap();
            let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
            // re-derive each layer by hand from raw weights
            let dense = |layer: &DenseLayer, input: &[f64]| -> Vec<f64> {
                (0..layer.out_dim())
                    .map(|o| {
                        let mut acc = layer.biases()[o];
                        for i in 0..layer.in_dim() {
                            acc += layer.weights()[o * layer.in_dim() + i] * input[i];
                        }
                        match layer.activation() {
                            Activation::Tanh => acc.tanh(),
                            Activation::Identity => acc,
                        }
                    })
                    .collect()
            };
            let h = dense(net.input_fc(), &x);
            let a = dense(net.align_in(), &h);
            let s: Vec<f64> = a.iter().map(|v| PI * (v + 1.0) / 2.0).collect();
            let z: Vec<f64> = net
                .vqc()
                .expectations(&s)
                .unwrap()
                .iter()
                .map(|z| (z + 1.0) / 2.0)
                .collect();
            let h2 = dense(net.align_out(), &z);
            let q = dense(net.output_fc(), &h2);
            let got = hybrid_forward(&x, &net).unwrap();
            for (g, e) in got.values().iter().zip(&q) {
                assert!((g - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_and_shift_backward_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let net = HybridQNet::new(2, 6, 5, 2, 4, &mut rng).unwrap();
        let shift_net = net
            .clone()
            .with_gradient_method(VqcGradient::ParameterShift);
        let trace = net.trace(&[0.2, 0.9]).unwrap();
        let grad_q = [0.3, -1.1, 0.0, 2.0];
        let mut g1 = vec![0.0; net.param_count()];
        let mut g2 = vec![0.0; net.param_count()];
        net.backward(&trace, &grad_q, &mut g1).unwrap();
        shift_net.backward(&trace, &grad_q, &mut g2).unwrap();
        for (a, b) in g1.iter().zip(&g2) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn params_round_trip_and_layout() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = HybridQNet::new(2, 32, 5, 2, 21, &mut rng).unwrap();
        let flat = net.params();
        let total: usize = net.layout().iter().map(TensorSpec::len).sum();
        assert_eq!(total, flat.len());
        let mut other = HybridQNet::new(2, 32, 5, 2, 21, &mut rng).unwrap();
        other.set_params(&flat).unwrap();
        assert_eq!(other, net);
    }

    #[test]
    fn rejects_inconsistent_chain() {
        let err = HybridQNet::from_parts(
            DenseLayer::zeros(2, 8, Activation::Tanh),
            DenseLayer::zeros(8, 4, Activation::Tanh),
            VqcLayer::zeros(5, 1).unwrap(),
            DenseLayer::zeros(5, 8, Activation::Identity),
            DenseLayer::zeros(8, 3, Activation::Identity),
        );
        assert!(matches!(err, Err(Error::Dimension { .. })));
    }
}
