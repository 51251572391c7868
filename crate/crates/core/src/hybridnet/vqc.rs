use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::EncodedState;
use crate::error::{Error, Result};
use crate::qsim::{Axis, Circuit};

/// How the trainer differentiates the quantum layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VqcGradient {
    /// Two shifted circuit runs per rotation gate.
    ParameterShift,
    /// One backward sweep over the cached statevector.
    #[default]
    Adjoint,
}

/// Variational circuit: an Rx encoding layer followed by `depth` blocks of
/// per-qubit Rx·Ry·Rz rotations and a CNOT ladder `0→1→…→n−1`.
///
/// `angles` is laid out `[block][qubit][Rx, Ry, Rz]`. The underlying
/// [`Circuit`] takes the encoded angles first, then `angles`.
#[derive(Debug, Clone, PartialEq)]
pub struct VqcLayer {
    n_qubits: usize,
    depth: usize,
    angles: Vec<f64>,
    circuit: Circuit,
}

impl VqcLayer {
    pub fn new(n_qubits: usize, depth: usize, angles: Vec<f64>) -> Result<Self> {
        let expected = depth * n_qubits * 3;
        if angles.len() != expected {
            return Err(Error::dim("VQC angles", expected, angles.len()));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::Numeric("VQC angles".into()));
        }
        let circuit = build_circuit(n_qubits, depth)?;
        Ok(Self {
            n_qubits,
            depth,
            angles,
            circuit,
        })
    }

    pub fn zeros(n_qubits: usize, depth: usize) -> Result<Self> {
        Self::new(n_qubits, depth, vec![0.0; depth * n_qubits * 3])
    }

    /// Angles uniform in `[−π, π]`.
    pub fn init<R: Rng + ?Sized>(n_qubits: usize, depth: usize, rng: &mut R) -> Result<Self> {
        let angles = (0..depth * n_qubits * 3)
            .map(|_| rng.gen_range(-PI..=PI))
            .collect();
        Self::new(n_qubits, depth, angles)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub(crate) fn angles_mut(&mut self) -> &mut [f64] {
        &mut self.angles
    }

    fn circuit_params(&self, encoded: &[f64]) -> Result<Vec<f64>> {
        if encoded.len() != self.n_qubits {
            return Err(Error::dim("VQC input", self.n_qubits, encoded.len()));
        }
        let mut params = Vec::with_capacity(self.n_qubits + self.angles.len());
        params.extend_from_slice(encoded);
        params.extend_from_slice(&self.angles);
        Ok(params)
    }

    /// Raw ⟨Z⟩ of every qubit, each in `[−1, 1]`.
    pub fn expectations(&self, encoded: &[f64]) -> Result<Vec<f64>> {
        self.circuit.expect_z_all(&self.circuit_params(encoded)?)
    }

    /// Gradient of `Σ_q weights[q]·⟨Z_q⟩` split into (encoded inputs,
    /// variational angles), plus the raw ⟨Z⟩ values.
    pub fn gradient(
        &self,
        encoded: &[f64],
        weights: &[f64],
        method: VqcGradient,
    ) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let params = self.circuit_params(encoded)?;
        let (mut grad, z) = match method {
            VqcGradient::Adjoint => self.circuit.adjoint_gradient(&params, weights)?,
            VqcGradient::ParameterShift => {
                let grad = self.circuit.shift_gradient(&params, weights)?;
                (grad, self.circuit.expect_z_all(&params)?)
            }
        };
        let angle_grad = grad.split_off(self.n_qubits);
        Ok((grad, angle_grad, z))
    }
}

fn build_circuit(n_qubits: usize, depth: usize) -> Result<Circuit> {
    let mut circuit = Circuit::new(n_qubits)?;
    for q in 0..n_qubits {
        circuit.rotation(Axis::X, q, q)?;
    }
    let mut param = n_qubits;
    for _ in 0..depth {
        for q in 0..n_qubits {
            for axis in [Axis::X, Axis::Y, Axis::Z] {
                circuit.rotation(axis, q, param)?;
                param += 1;
            }
        }
        for q in 0..n_qubits.saturating_sub(1) {
            circuit.cnot(q, q + 1)?;
        }
    }
    Ok(circuit)
}

/// Runs the circuit on an encoded state and rescales each ⟨Z⟩ from
/// `[−1, 1]` to `[0, 1]`.
pub fn vqc_forward(encoded: &EncodedState, vqc: &VqcLayer) -> Result<Vec<f64>> {
    Ok(vqc
        .expectations(encoded.s_rad())?
        .into_iter()
        .map(|z| 0.5 * (z + 1.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    /// Independent oracle: explicit 2×2 gate matrices applied by
    /// enumerating basis indices, CNOT as a basis permutation.
    fn oracle_z(s_rad: &[f64], angles: &[f64], depth: usize) -> Vec<f64> {
        let n = s_rad.len();
        let dim = 1 << n;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[0] = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        let apply1 = |amps: &mut Vec<Complex64>, q: usize, m: [[Complex64; 2]; 2]| {
            let mut out = vec![Complex64::new(0.0, 0.0); dim];
            for (idx, a) in amps.iter().enumerate() {
                let bit = (idx >> q) & 1;
                for row in 0..2 {
                    let dest = (idx & !(1 << q)) | (row << q);
                    out[dest] += m[row][bit] * a;
                }
            }
            *amps = out;
        };
        let rx = |t: f64| {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            [[c.into(), -i * s], [-i * s, c.into()]]
        };
        let ry = |t: f64| {
            let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
            [[c.into(), (-s).into()], [s.into(), c.into()]]
        };
        let rz = |t: f64| {
            [
                [Complex64::from_polar(1.0, -t / 2.0), 0.0.into()],
                [0.0.into(), Complex64::from_polar(1.0, t / 2.0)],
            ]
        };
        for (q, &s) in s_rad.iter().enumerate() {
            apply1(&mut amps, q, rx(s));
        }
        for b in 0..depth {
            for q in 0..n {
                let base = (b * n + q) * 3;
                apply1(&mut amps, q, rx(angles[base]));
                apply1(&mut amps, q, ry(angles[base + 1]));
                apply1(&mut amps, q, rz(angles[base + 2]));
            }
            for q in 0..n - 1 {
                let mut out = amps.clone();
                for idx in 0..dim {
                    if (idx >> q) & 1 == 1 {
                        out[idx ^ (1 << (q + 1))] = amps[idx];
                    }
                }
                amps = out;
            }
        }
        (0..n)
            .map(|q| {
                amps.iter()
                    .enumerate()
                    .map(|(idx, a)| {
                        if (idx >> q) & 1 == 0 {
                            a.norm_sqr()
                        } else {
                            -a.norm_sqr()
                        }
                    })
                    .sum()
            })
            .collect()
    }

    fn encoded(v: &[f64]) -> EncodedState {
        EncodedState::from_radians(v.to_vec()).unwrap()
    }

    #[test]
    fn all_zero_inputs_give_ones() {
        let vqc = VqcLayer::zeros(5, 2).unwrap();
        let out = vqc_forward(&encoded(&[0.0; 5]), &vqc).unwrap();
        assert_eq!(out, vec![1.0; 5]);
    }

    #[test]
    fn flipped_first_qubit_without_blocks() {
        let vqc = VqcLayer::zeros(5, 0).unwrap();
        let input = [PI, 0.0, 0.0, 0.0, 0.0];
        let raw = vqc.expectations(&input).unwrap();
        let oracle = oracle_z(&input, &[], 0);
        for (r, o) in raw.iter().zip(&oracle) {
            assert!((r - o).abs() < 1e-12);
        }
        let out = vqc_forward(&encoded(&input), &vqc).unwrap();
        let expected = [0.0, 1.0, 1.0, 1.0, 1.0];
        for (o, e) in out.iter().zip(&expected) {
            assert!((o - e).abs() < 1e-12);
        }
    }

    #[test]
    fn flipped_first_qubit_propagates_down_the_ladder() {
        // with zero angles each block's CNOT ladder acts as a prefix XOR:
        // one block copies the flipped qubit 0 onto every later qubit, a
        // second block leaves every other qubit flipped
        let input = [PI, 0.0, 0.0, 0.0, 0.0];
        let cases: [(usize, [f64; 5]); 2] = [(1, [-1.0; 5]), (2, [-1.0, 1.0, -1.0, 1.0, -1.0])];
        for (depth, expected) in cases {
            let vqc = VqcLayer::zeros(5, depth).unwrap();
            let raw = vqc.expectations(&input).unwrap();
            let oracle = oracle_z(&input, vqc.angles(), depth);
            for ((r, o), e) in raw.iter().zip(&oracle).zip(&expected) {
                assert!((r - o).abs() < 1e-12);
                assert!((r - e).abs() < 1e-12, "depth {depth}: {raw:?}");
            }
        }
    }

    #[test]
    fn half_rotation_rescales_to_half() {
        let vqc = VqcLayer::zeros(5, 0).unwrap();
        let out = vqc_forward(&encoded(&[PI / 2.0, 0.0, 0.0, 0.0, 0.0]), &vqc).unwrap();
        assert!((out[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn matches_dense_oracle_with_random_angles() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let vqc = VqcLayer::init(5, 2, &mut rng).unwrap();
            let input: Vec<f64> = (0..5).map(|_| rng.gen_range(0.0..=PI)).collect();
            let raw = vqc.expectations(&input).unwrap();
            let oracle = oracle_z(&input, vqc.angles(), 2);
            for (r, o) in raw.iter().zip(&oracle) {
                assert!((r - o).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn wrong_input_length() {
        let vqc = VqcLayer::zeros(5, 1).unwrap();
        assert!(matches!(
            vqc.expectations(&[0.0; 4]),
            Err(Error::Dimension { .. })
        ));
        assert!(VqcLayer::new(5, 1, vec![0.0; 14]).is_err());
    }

    #[test]
    fn circuit_layout() {
        let vqc = VqcLayer::zeros(5, 2).unwrap();
        assert_eq!(vqc.circuit().n_params(), 5 + 30);
        // 5 encoding + 2 × (15 rotations + 4 CNOTs)
        assert_eq!(vqc.circuit().gates().len(), 5 + 2 * 19);
    }
}
