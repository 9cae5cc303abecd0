//! Numerical laboratory for periodic traveling waves of coupled dispersive
//! systems of the form `u_t + (grad R(u) - M u)_x = 0`, where `M` is a 2x2
//! matrix Fourier multiplier.
//!
//! The crate constructs explicit and numerically continued wave profiles
//! (cnoidal, dnoidal, log-KdV, Benjamin-Ono type with Newton continuation),
//! assembles the linearized operator around a wave as a dense collocation
//! matrix, verifies the spectral hypotheses behind orbital stability
//! (one simple negative eigenvalue, translation zero mode, and the
//! Vakhitov-Kolokolov-type sign condition), and demonstrates stability by
//! pseudospectral time evolution with a translation-minimized orbital
//! distance.

pub mod elliptic;
pub mod error;
pub mod evolution;
pub mod fourier;
pub mod grid;
pub mod spectral;
pub mod symbols;
pub mod system;
pub mod waves;

pub use error::{Error, Result};
pub use grid::Grid;
pub use system::{SystemKind, SystemSpec};
