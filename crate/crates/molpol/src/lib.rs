//! Cavity polariton dynamics for molecular ensembles.
//!
//! `molpol` models N molecules sharing a single cavity photon mode in the
//! one-excitation manifold. Identical molecules are never tracked
//! individually: states are labeled by how many molecules occupy each
//! vibrational level, and a truncation order bounds how many
//! ground-electronic molecules may hold vibrational quanta. Low orders give
//! polynomially sized bases whose error shrinks with the ensemble size;
//! order N is exact.
//!
//! The pipeline: solve each species' vibrational structure on a grid
//! ([`vib`]), enumerate the symmetric basis ([`basis`]), assemble and
//! diagonalize the coupled Hamiltonian ([`hamiltonian`]), propagate and
//! Fourier-transform ([`dynamics`]), reduce to populations and yields
//! ([`observables`]), cross-check against a brute-force reference
//! ([`oracle`]), and extract golden-rule decay rates ([`rates`]).

pub mod basis;
pub mod config;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod io;
pub mod linalg;
pub mod observables;
pub mod oracle;
pub mod rates;
pub mod runner;
pub mod vib;

pub use error::Error;
