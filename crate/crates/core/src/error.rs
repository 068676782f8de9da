use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The homogeneous top part of the potential is not positive on the
    /// unit sphere.
    #[error("potential is not elliptic: min of V0 over {n_dirs} directions is {margin}")]
    NonElliptic { margin: f64, n_dirs: usize },

    /// Structural problem with a potential (degree, dimension, emptiness).
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    /// Tensor bases are only built for d in {1, 2}.
    #[error("dimension {0} unsupported (only d = 1, 2)")]
    DimensionUnsupported(usize),

    /// The dense symmetric eigensolver failed.
    #[error("eigendecomposition failed: {0}")]
    ConvergenceFailure(String),

    /// A state past the certified part of the spectrum was requested.
    #[error("eigenindex {index} is not trusted (trust_count = {trust_count})")]
    UntrustedIndex { index: usize, trust_count: usize },

    /// The spectral window reaches past the trusted spectrum.
    #[error("window [{lo}, {hi}) reaches untrusted spectrum (trust_count = {trust_count})")]
    WindowTooWide { lo: f64, hi: f64, trust_count: usize },

    /// No eigenvalue falls inside the window.
    #[error("window [{lo}, {hi}) contains no eigenvalue")]
    WindowEmpty { lo: f64, hi: f64 },

    /// Window width violates b_h - a_h >= D h^delta.
    #[error("window width {width} below D*h^delta = {required}")]
    WindowTooNarrow { width: f64, required: f64 },

    /// Doubling the phase-space grid moved a matrix element too much.
    #[error("grid quantization underresolved: max entry change {change} > {tol}")]
    GridUnderresolved { change: f64, tol: f64 },

    /// Thin-shell rejection sampling accepted almost nothing.
    #[error("shell rejection sampling starved: acceptance rate {rate}")]
    RejectionStarved { rate: f64 },

    /// Coefficient profile violates the flatness condition.
    #[error("coefficient profile violates |gamma_n|^2 <= K0/N sum: max share {share} > {bound}")]
    ProfileViolation { share: f64, bound: f64 },

    /// Too few tail exceedances for a tail-slope fit.
    #[error("insufficient tail: {exceedances} exceedances at the smallest threshold (need {needed})")]
    InsufficientTail { exceedances: usize, needed: usize },

    /// Malformed text serialization of a potential or symbol.
    #[error("parse error: {0}")]
    Parse(String),

    /// Cache I/O or format mismatch.
    #[error("cache error: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
