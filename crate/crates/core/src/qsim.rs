//! Statevector simulation of the {Rx, Ry, Rz, CNOT} gate set.
//!
//! Qubit `q` is bit `q` of the basis index, so qubit 0 is the least
//! significant bit. Gates act in place on amplitude pairs `(i, i | 1 << q)`,
//! which keeps every gate O(2^n). Expectations are exact sums over
//! amplitudes; there is no shot sampling.
//!
//! [`Circuit`] records a gate list whose rotation angles are looked up in a
//! parameter vector. It can be differentiated two ways: by the
//! parameter-shift rule (two shifted executions per rotation gate), and by
//! an adjoint sweep that runs the circuit backwards once. The shift rule is
//! the reference; the adjoint sweep is the fast path used during training
//! and is tested against it.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest register the simulator will allocate.
pub const MAX_QUBITS: usize = 20;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A rotation angle in radians. Any finite value is accepted.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct RotationAngle(f64);

impl RotationAngle {
    pub fn new(radians: f64) -> Result<Self> {
        if radians.is_finite() {
            Ok(Self(radians))
        } else {
            Err(Error::Numeric(format!("rotation angle {radians}")))
        }
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for RotationAngle {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

/// Pure state of `n_qubits` qubits as `2^n_qubits` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// The all-zeros basis state |0…0⟩.
    pub fn new(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    /// The computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "n_qubits must be within 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::Index {
                what: "basis states",
                index,
                len: dim,
            });
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Wraps an explicit amplitude vector. The length must be a power of two
    /// and the vector must be normalized to within 1e-10.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Argument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "{n_qubits} qubits exceeds {MAX_QUBITS}"
            )));
        }
        let state = Self {
            n_qubits,
            amplitudes,
        };
        let norm = state.norm_sqr();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Argument(format!(
                "state norm² is {norm}, expected 1"
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Probability of observing the given basis state.
    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes.get(index).map_or(0.0, |a| a.norm_sqr())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit < self.n_qubits {
            Ok(())
        } else {
            Err(Error::Index {
                what: "qubits",
                index: qubit,
                len: self.n_qubits,
            })
        }
    }

    pub fn apply_rx(&mut self, qubit: usize, angle: RotationAngle) -> Result<()> {
        self.check_qubit(qubit)?;
        self.rx(qubit, angle.0);
        Ok(())
    }

    pub fn apply_ry(&mut self, qubit: usize, angle: RotationAngle) -> Result<()> {
        self.check_qubit(qubit)?;
        self.ry(qubit, angle.0);
        Ok(())
    }

    pub fn apply_rz(&mut self, qubit: usize, angle: RotationAngle) -> Result<()> {
        self.check_qubit(qubit)?;
        self.rz(qubit, angle.0);
        Ok(())
    }

    /// Flips `target` on every basis state whose `control` bit is set.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control == target {
            return Err(Error::Argument(format!(
                "CNOT control and target are both qubit {control}"
            )));
        }
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        self.cnot(control, target);
        Ok(())
    }

    /// ⟨Z⟩ on one qubit: +1 weight for bit 0, −1 for bit 1.
    pub fn expect_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let p = a.norm_sqr();
                if i & mask == 0 {
                    p
                } else {
                    -p
                }
            })
            .sum())
    }

    /// ⟨Z⟩ for every qubit in one pass over the amplitudes.
    pub fn expect_z_all(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.n_qubits];
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            for (q, z) in out.iter_mut().enumerate() {
                if (i >> q) & 1 == 0 {
                    *z += p;
                } else {
                    *z -= p;
                }
            }
        }
        out
    }

    #[inline]
    fn for_each_pair(&mut self, qubit: usize, mut f: impl FnMut(&mut Complex64, &mut Complex64)) {
        let stride = 1usize << qubit;
        for chunk in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                f(a0, a1);
            }
        }
    }

    pub(crate) fn rx(&mut self, qubit: usize, theta: f64) {
        let (s, c) = (0.5 * theta).sin_cos();
        self.for_each_pair(qubit, |a0, a1| {
            let (x0, x1) = (*a0, *a1);
            // -i·s·x = (s·x.im, -s·x.re)
            *a0 = Complex64::new(c * x0.re + s * x1.im, c * x0.im - s * x1.re);
            *a1 = Complex64::new(c * x1.re + s * x0.im, c * x1.im - s * x0.re);
        });
    }

    pub(crate) fn ry(&mut self, qubit: usize, theta: f64) {
        let (s, c) = (0.5 * theta).sin_cos();
        self.for_each_pair(qubit, |a0, a1| {
            let (x0, x1) = (*a0, *a1);
            *a0 = x0 * c - x1 * s;
            *a1 = x0 * s + x1 * c;
        });
    }

    pub(crate) fn rz(&mut self, qubit: usize, theta: f64) {
        let (s, c) = (0.5 * theta).sin_cos();
        let lower = Complex64::new(c, -s);
        let upper = Complex64::new(c, s);
        self.for_each_pair(qubit, |a0, a1| {
            *a0 *= lower;
            *a1 *= upper;
        });
    }

    pub(crate) fn cnot(&mut self, control: usize, target: usize) {
        let cmask = 1usize << control;
        let tmask = 1usize << target;
        for i in 0..self.amplitudes.len() {
            // visit each swapped pair once, from its target-bit-0 member
            if i & cmask != 0 && i & tmask == 0 {
                self.amplitudes.swap(i, i | tmask);
            }
        }
    }

    /// Applies the Pauli generator of a rotation gate (X, Y or Z).
    fn apply_generator(&mut self, axis: Axis, qubit: usize) {
        match axis {
            Axis::X => self.for_each_pair(qubit, std::mem::swap),
            Axis::Y => self.for_each_pair(qubit, |a0, a1| {
                let (x0, x1) = (*a0, *a1);
                *a0 = Complex64::new(x1.im, -x1.re);
                *a1 = Complex64::new(-x0.im, x0.re);
            }),
            Axis::Z => self.for_each_pair(qubit, |_, a1| *a1 = -*a1),
        }
    }

    fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(ZERO, |acc, (a, b)| acc + a.conj() * b)
    }
}

/// Derivative of a single-angle expectation by the parameter-shift rule:
/// `(f(θ + π/2) − f(θ − π/2)) / 2`.
///
/// Exact for expectations of circuits whose angle enters through one
/// Rx, Ry or Rz gate.
pub fn parameter_shift<F>(circuit_eval: F, angle: RotationAngle) -> Result<f64>
where
    F: Fn(RotationAngle) -> Result<f64>,
{
    let plus = circuit_eval(RotationAngle::new(angle.0 + FRAC_PI_2)?)?;
    let minus = circuit_eval(RotationAngle::new(angle.0 - FRAC_PI_2)?)?;
    let grad = 0.5 * (plus - minus);
    if grad.is_finite() {
        Ok(grad)
    } else {
        Err(Error::Numeric("parameter-shift evaluation".into()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// Rotation about `axis` by the angle stored at `param` in the parameter vector.
    Rotation {
        axis: Axis,
        qubit: usize,
        param: usize,
    },
    Cnot {
        control: usize,
        target: usize,
    },
}

/// A fixed gate sequence with angles drawn from a parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_params: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Config(format!(
                "n_qubits must be within 1..={MAX_QUBITS}, got {n_qubits}"
            )));
        }
        Ok(Self {
            n_qubits,
            n_params: 0,
            gates: Vec::new(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// One more than the highest parameter index referenced.
    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit < self.n_qubits {
            Ok(())
        } else {
            Err(Error::Index {
                what: "qubits",
                index: qubit,
                len: self.n_qubits,
            })
        }
    }

    pub fn rotation(&mut self, axis: Axis, qubit: usize, param: usize) -> Result<&mut Self> {
        self.check_qubit(qubit)?;
        self.n_params = self.n_params.max(param + 1);
        self.gates.push(Gate::Rotation { axis, qubit, param });
        Ok(self)
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::Argument(format!(
                "CNOT control and target are both qubit {control}"
            )));
        }
        self.gates.push(Gate::Cnot { control, target });
        Ok(self)
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params {
            return Err(Error::dim(
                "circuit parameters",
                self.n_params,
                params.len(),
            ));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(Error::Numeric("circuit parameters".into()));
        }
        Ok(())
    }

    fn apply(state: &mut QuantumState, gate: Gate, angle: f64) {
        match gate {
            Gate::Rotation { axis, qubit, .. } => match axis {
                Axis::X => state.rx(qubit, angle),
                Axis::Y => state.ry(qubit, angle),
                Axis::Z => state.rz(qubit, angle),
            },
            Gate::Cnot { control, target } => state.cnot(control, target),
        }
    }

    fn angle_of(gate: Gate, params: &[f64]) -> f64 {
        match gate {
            Gate::Rotation { param, .. } => params[param],
            Gate::Cnot { .. } => 0.0,
        }
    }

    fn run_from(&self, state: &mut QuantumState, start: usize, params: &[f64]) {
        for &gate in &self.gates[start..] {
            Self::apply(state, gate, Self::angle_of(gate, params));
        }
    }

    /// Executes the circuit on |0…0⟩.
    pub fn run(&self, params: &[f64]) -> Result<QuantumState> {
        self.check_params(params)?;
        let mut state = QuantumState::new(self.n_qubits)?;
        self.run_from(&mut state, 0, params);
        Ok(state)
    }

    /// ⟨Z_q⟩ for every qubit after running the circuit.
    pub fn expect_z_all(&self, params: &[f64]) -> Result<Vec<f64>> {
        Ok(self.run(params)?.expect_z_all())
    }

    /// Jacobian `d⟨Z_q⟩/dθ_p` by the parameter-shift rule, indexed `[p][q]`.
    ///
    /// Each rotation gate is shifted on its own, so a parameter shared by
    /// several gates accumulates one shift pair per occurrence.
    pub fn shift_jacobian(&self, params: &[f64]) -> Result<Vec<Vec<f64>>> {
        self.check_params(params)?;
        let mut jacobian = vec![vec![0.0; self.n_qubits]; self.n_params];
        let mut prefix = QuantumState::new(self.n_qubits)?;
        for (k, &gate) in self.gates.iter().enumerate() {
            if let Gate::Rotation { param, .. } = gate {
                let theta = params[param];
                let mut plus = prefix.clone();
                Self::apply(&mut plus, gate, theta + FRAC_PI_2);
                self.run_from(&mut plus, k + 1, params);
                let mut minus = prefix.clone();
                Self::apply(&mut minus, gate, theta - FRAC_PI_2);
                self.run_from(&mut minus, k + 1, params);
                let (zp, zm) = (plus.expect_z_all(), minus.expect_z_all());
                for (acc, (p, m)) in jacobian[param].iter_mut().zip(zp.iter().zip(&zm)) {
                    *acc += 0.5 * (p - m);
                }
            }
            Self::apply(&mut prefix, gate, Self::angle_of(gate, params));
        }
        if jacobian.iter().flatten().any(|g| !g.is_finite()) {
            return Err(Error::Numeric("parameter-shift jacobian".into()));
        }
        Ok(jacobian)
    }

    /// Gradient of `Σ_q weights[q]·⟨Z_q⟩` with respect to every parameter,
    /// by the parameter-shift rule.
    pub fn shift_gradient(&self, params: &[f64], weights: &[f64]) -> Result<Vec<f64>> {
        if weights.len() != self.n_qubits {
            return Err(Error::dim(
                "observable weights",
                self.n_qubits,
                weights.len(),
            ));
        }
        let jacobian = self.shift_jacobian(params)?;
        Ok(jacobian
            .iter()
            .map(|row| row.iter().zip(weights).map(|(j, w)| j * w).sum())
            .collect())
    }

    /// Same gradient as [`Circuit::shift_gradient`] computed with one
    /// backward sweep: for `U = exp(−iθG/2)`, `d⟨O⟩/dθ = Im⟨λ|G|ψ_k⟩` where
    /// `λ` is the observable-weighted state propagated back to gate `k`.
    ///
    /// Returns the gradient together with the forward ⟨Z⟩ values.
    pub fn adjoint_gradient(
        &self,
        params: &[f64],
        weights: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        if weights.len() != self.n_qubits {
            return Err(Error::dim(
                "observable weights",
                self.n_qubits,
                weights.len(),
            ));
        }
        let mut psi = self.run(params)?;
        let z = psi.expect_z_all();
        let mut lambda = psi.clone();
        for (i, amp) in lambda.amplitudes.iter_mut().enumerate() {
            let eigen: f64 = weights
                .iter()
                .enumerate()
                .map(|(q, w)| if (i >> q) & 1 == 0 { *w } else { -*w })
                .sum();
            *amp *= eigen;
        }
        let mut grad = vec![0.0; self.n_params];
        let mut scratch = psi.clone();
        for &gate in self.gates.iter().rev() {
            match gate {
                Gate::Rotation { axis, qubit, param } => {
                    scratch.amplitudes.copy_from_slice(&psi.amplitudes);
                    scratch.apply_generator(axis, qubit);
                    grad[param] += lambda.inner(&scratch).im;
                    let theta = params[param];
                    Self::apply(&mut psi, gate, -theta);
                    Self::apply(&mut lambda, gate, -theta);
                }
                Gate::Cnot { control, target } => {
                    psi.cnot(control, target);
                    lambda.cnot(control, target);
                }
            }
        }
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::Numeric("adjoint gradient".into()));
        }
        Ok((grad, z))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn angle(x: f64) -> RotationAngle {
        RotationAngle::new(x).unwrap()
    }

    fn assert_amps(state: &QuantumState, expected: &[Complex64]) {
        assert_eq!(state.amplitudes().len(), expected.len());
        for (a, e) in state.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() < 1e-12, "{a} vs {e}");
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn new_state_is_all_zeros() {
        assert_amps(&QuantumState::new(1).unwrap(), &[ONE, ZERO]);
        assert_amps(&QuantumState::new(2).unwrap(), &[ONE, ZERO, ZERO, ZERO]);
        let five = QuantumState::new(5).unwrap();
        assert_eq!(five.amplitudes().len(), 32);
        assert_eq!(five.amplitudes()[0], ONE);
        assert!(matches!(QuantumState::new(0), Err(Error::Config(_))));
        assert!(matches!(QuantumState::new(21), Err(Error::Config(_))));
    }

    #[test]
    fn rx_examples() {
        let mut s = QuantumState::new(1).unwrap();
        s.apply_rx(0, angle(0.0)).unwrap();
        assert_amps(&s, &[ONE, ZERO]);

        let mut s = QuantumState::new(1).unwrap();
        s.apply_rx(0, angle(PI)).unwrap();
        assert_amps(&s, &[ZERO, c(0.0, -1.0)]);

        let mut s = QuantumState::new(1).unwrap();
        s.apply_rx(0, angle(PI / 2.0)).unwrap();
        assert_amps(&s, &[c(FRAC_1_SQRT_2, 0.0), c(0.0, -FRAC_1_SQRT_2)]);
    }

    #[test]
    fn ry_examples() {
        let mut s = QuantumState::new(1).unwrap();
        s.apply_ry(0, angle(0.0)).unwrap();
        assert_amps(&s, &[ONE, ZERO]);

        let mut s = QuantumState::new(1).unwrap();
        s.apply_ry(0, angle(PI)).unwrap();
        assert_amps(&s, &[ZERO, ONE]);

        let mut s = QuantumState::new(1).unwrap();
        s.apply_ry(0, angle(PI / 2.0)).unwrap();
        assert_amps(&s, &[c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]);
    }

    #[test]
    fn rz_examples() {
        let theta = 0.731;
        let mut s = QuantumState::new(1).unwrap();
        s.apply_rz(0, angle(theta)).unwrap();
        assert_amps(&s, &[Complex64::from_polar(1.0, -theta / 2.0), ZERO]);
        assert!((s.probability(0) - 1.0).abs() < 1e-15);

        let mut plus =
            QuantumState::from_amplitudes(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)])
                .unwrap();
        plus.apply_rz(0, angle(PI)).unwrap();
        assert_amps(&plus, &[c(0.0, -FRAC_1_SQRT_2), c(0.0, FRAC_1_SQRT_2)]);

        let mut s = QuantumState::new(3).unwrap();
        s.apply_ry(1, angle(0.4)).unwrap();
        let before = s.clone();
        s.apply_rz(1, angle(0.0)).unwrap();
        assert_amps(&s, before.amplitudes());
    }

    #[test]
    fn cnot_examples() {
        // |10⟩ with the first qubit (qubit 0) set: basis index 1
        let mut s = QuantumState::basis(2, 0b01).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_amps(&s, &QuantumState::basis(2, 0b11).unwrap().amplitudes);

        let mut s = QuantumState::new(2).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_amps(&s, &[ONE, ZERO, ZERO, ZERO]);

        let h = c(FRAC_1_SQRT_2, 0.0);
        let mut s = QuantumState::from_amplitudes(vec![h, h, ZERO, ZERO]).unwrap();
        s.apply_cnot(0, 1).unwrap();
        assert_amps(&s, &[h, ZERO, ZERO, h]);
    }

    #[test]
    fn gate_errors() {
        let mut s = QuantumState::new(2).unwrap();
        assert!(matches!(
            s.apply_rx(2, angle(0.1)),
            Err(Error::Index { .. })
        ));
        assert!(matches!(
            s.apply_ry(5, angle(0.1)),
            Err(Error::Index { .. })
        ));
        assert!(matches!(
            s.apply_rz(2, angle(0.1)),
            Err(Error::Index { .. })
        ));
        assert!(matches!(s.apply_cnot(1, 1), Err(Error::Argument(_))));
        assert!(matches!(s.apply_cnot(0, 2), Err(Error::Index { .. })));
        assert!(matches!(s.expect_z(3), Err(Error::Index { .. })));
        assert!(RotationAngle::new(f64::NAN).is_err());
        assert!(RotationAngle::new(f64::INFINITY).is_err());
    }

    #[test]
    fn expect_z_examples() {
        let zero = QuantumState::new(1).unwrap();
        assert_eq!(zero.expect_z(0).unwrap(), 1.0);
        let one = QuantumState::basis(1, 1).unwrap();
        assert_eq!(one.expect_z(0).unwrap(), -1.0);
        let mut s = QuantumState::new(1).unwrap();
        s.apply_rx(0, angle(PI / 2.0)).unwrap();
        assert!(s.expect_z(0).unwrap().abs() < 1e-15);
        for theta in [0.3, 1.1, 2.9, -4.0] {
            let mut s = QuantumState::new(1).unwrap();
            s.apply_rx(0, angle(theta)).unwrap();
            assert!((s.expect_z(0).unwrap() - theta.cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn parameter_shift_on_cosine() {
        let eval = |a: RotationAngle| {
            let mut s = QuantumState::new(1)?;
            s.apply_rx(0, a)?;
            s.expect_z(0)
        };
        let fd = |theta: f64| {
            let h = 1e-4;
            (eval(angle(theta + h)).unwrap() - eval(angle(theta - h)).unwrap()) / (2.0 * h)
        };
        assert!(parameter_shift(eval, angle(0.0)).unwrap().abs() < 1e-15);
        let g = parameter_shift(eval, angle(PI / 2.0)).unwrap();
        assert!((g + 1.0).abs() < 1e-14);
        assert!((g - fd(PI / 2.0)).abs() < 1e-8);
        let g = parameter_shift(eval, angle(PI)).unwrap();
        assert!(g.abs() < 1e-14);
        assert!((g - fd(PI)).abs() < 1e-8);
    }

    #[test]
    fn parameter_shift_rejects_non_finite() {
        let eval = |_: RotationAngle| Ok(f64::NAN);
        assert!(matches!(
            parameter_shift(eval, angle(0.2)),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn adjoint_matches_shift_on_small_circuit() {
        let mut circuit = Circuit::new(3).unwrap();
        circuit
            .rotation(Axis::X, 0, 0)
            .unwrap()
            .rotation(Axis::Y, 1, 1)
            .unwrap()
            .cnot(0, 1)
            .unwrap()
            .rotation(Axis::Z, 1, 2)
            .unwrap()
            .rotation(Axis::X, 2, 0)
            .unwrap()
            .cnot(1, 2)
            .unwrap()
            .rotation(Axis::Y, 2, 3)
            .unwrap();
        let params = [0.3, -1.2, 2.2, 0.9];
        let weights = [0.7, -1.3, 0.4];
        let shift = circuit.shift_gradient(&params, &weights).unwrap();
        let (adjoint, z) = circuit.adjoint_gradient(&params, &weights).unwrap();
        for (s, a) in shift.iter().zip(&adjoint) {
            assert!((s - a).abs() < 1e-12, "{s} vs {a}");
        }
        assert_eq!(z, circuit.expect_z_all(&params).unwrap());
    }

    #[test]
    fn circuit_parameter_count_checked() {
        let mut circuit = Circuit::new(2).unwrap();
        circuit.rotation(Axis::X, 0, 1).unwrap();
        assert_eq!(circuit.n_params(), 2);
        assert!(matches!(circuit.run(&[0.1]), Err(Error::Dimension { .. })));
        assert!(matches!(
            circuit.run(&[0.1, f64::NAN]),
            Err(Error::Numeric(_))
        ));
        assert!(circuit.cnot(1, 1).is_err());
    }
}
