//! Resonances of the one-dimensional Stark Hamiltonian
//! H_f = -d²/dx² + V(x) + f·x (f > 0, V compactly supported),
//! computed as the zeros of an Airy-matching residual: solutions of the ODE
//! are matched at the edges of supp V against the decaying Airy branch on the
//! right and the outgoing (rotated) branch on the left, and resonances are the
//! complex energies z = k² where the matching Wronskian vanishes. The crate
//! provides the scaled Airy machinery, ODE propagation, f = 0 scattering
//! quantities, bound-state data, residual/zero-finding in the k-plane, and
//! the small-f asymptotic predictions (resonance strings near the positive
//! real axis and near the e^{-iπ/3} line, bound-state descendants, and
//! tracked zeros of the reflection coefficient) together with a verification
//! suite that measures the asymptotics against refined resonances.

pub mod airy;
pub mod cli;
mod dd;
pub mod potential;
pub mod scattering;
pub mod schrodinger;
pub mod spectrum;
pub(crate) mod zeros;

pub use airy::{ai, ai_logderiv, ai_rotated, decompose_oscillatory, AiryEval};
pub use zeros::{FoundZero, Rect, ZeroError};
