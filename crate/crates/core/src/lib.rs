//! Day-ahead electricity market bidding among independent deep Q-learning
//! generator agents, with a classical MLP Q-function and a hybrid
//! dense–variational-quantum-circuit Q-function simulated on a statevector.
//!
//! Modules, bottom up:
//! - [`qsim`]: statevector simulator for Rx/Ry/Rz/CNOT with exact ⟨Z⟩ and
//!   parameter-shift / adjoint differentiation.
//! - [`hybridnet`]: the two Q-network backends, TD loss, gradients, Adam.
//! - [`market`]: generators, demand profile and uniform-price clearing.
//! - [`marl`]: ε-greedy independent learners, convergence test, reports.

pub mod error;
pub mod hybridnet;
pub mod market;
pub mod marl;
pub mod qsim;

pub use error::{Error, Result};
