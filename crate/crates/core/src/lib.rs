//! Covariant phase-space measurements from Weyl representations of finite
//! Abelian groups.
//!
//! For G = Z_{n_1} x ... x Z_{n_k} the crate builds the projective unitary
//! representation U_{chi,g} of dual(G) x G on C^{|G|}, the isometry between
//! Hilbert-Schmidt operators and square-summable phase-space functions, the
//! covariant POVM generated by a fiducial state, the measurement and
//! posterior-ensemble channels with their entropies, and linear-inversion
//! state reconstruction. A truncated-Fock realization covers the continuous
//! G = R analogue: displacement operators, coherent states, and the Husimi
//! function.

pub mod channels;
pub mod error;
pub mod group;
pub mod linalg;
pub mod oscillator;
pub mod phase_space;
pub mod povm;
pub mod random;
pub mod suite;
pub mod weyl;

pub use error::{Error, Result};
pub use group::{Character, FiniteLcaGroup, GroupElement, PhasePoint};
pub use linalg::{CMatrix, CVector};
