//! Numerical laboratory for the spectral theory of Schrödinger operators
//! `-h²Δ + V` with a confining elliptic polynomial potential `V` on R^d
//! (d ∈ {1, 2}).
//!
//! The crate provides, bottom up:
//!
//! * stable 1D Hermite-function evaluation, Gauss–Hermite quadrature and
//!   ladder-operator matrices ([`hermite`]);
//! * validated elliptic polynomial potentials ([`potential`]);
//! * a Galerkin eigensolver in a scaled tensor Hermite basis with an exact
//!   analytic path for the harmonic oscillator ([`eigensolver`]);
//! * spectral windows, Weyl-law counting, the spectral function, weighted
//!   norms and heat-kernel diagonals ([`windows`]);
//! * Weyl quantization (exact for polynomial symbols, grid based for cutoff
//!   quasi-homogeneous observables) and the exact Moyal product
//!   ([`symbols`], [`quantization`]);
//! * Liouville averages on classical energy shells ([`liouville`]);
//! * random-state ensembles on spectral subspaces and Haar bases of
//!   eigenspaces ([`ensembles`]);
//! * experiment harnesses that turn the above into statistics tables
//!   ([`experiments`]).
//!
//! Hot loops are data parallel via rayon when the default `parallel` feature
//! is enabled; every entry point also has a sequential path so results are
//! bit-identical regardless of thread count.

pub mod cache;
pub mod eigensolver;
pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod gridquant;
pub mod hermite;
pub mod liouville;
pub mod numerics;
pub mod par;
pub mod potential;
pub mod quantization;
pub mod symbols;
pub mod windows;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
