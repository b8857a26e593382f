use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("gamma function pole at z = {0}")]
    GammaPole(Complex64),

    #[error("gamma ratio is indeterminate: poles in both numerator and denominator")]
    IndeterminateGammaRatio,

    #[error("hypergeometric parameter {name} = {value} is too close to a non-positive integer")]
    HypergeometricParameter { name: &'static str, value: Complex64 },

    #[error("hypergeometric series did not converge within {0} terms")]
    SeriesNotConverged(usize),

    #[error("invalid potential parameters: v0 = {v0}, alpha = {alpha} (both must be > 0)")]
    InvalidParameters { v0: f64, alpha: f64 },

    #[error("branch point of k'(k) at k = {0}")]
    BranchPoint(Complex64),

    #[error("momentum k = {k} is inside the excluded threshold neighbourhood of sqrt(V0) = {threshold}")]
    AtThreshold { k: f64, threshold: f64 },

    #[error("momentum k = {0} must be positive")]
    NonPositiveMomentum(f64),

    #[error("gamma pole in transfer matrix entry {entry} (argument {argument})")]
    TransferEntryPole { entry: &'static str, argument: Complex64 },

    #[error("scattering matrix pole: |T22| = {0} below threshold 1e-12")]
    ScatteringPole(f64),

    #[error("anti-bound index n = {n} is not admissible (requires n > lambda = {lambda})")]
    InadmissibleIndex { n: u32, lambda: f64 },

    #[error("seed wavefunction n = {n} has a node near x = {x}")]
    SeedNode { n: u32, x: f64 },

    #[error("Wronskian of the seed chain vanishes near x = {x}")]
    WronskianZero { x: f64 },

    #[error("chain order {0} exceeds the supported maximum {1}")]
    ChainOrderTooLarge(u32, u32),

    #[error("energy E = {energy} outside the valid domain: {expected}")]
    EnergyDomain { energy: f64, expected: &'static str },

    #[error("classically forbidden region inside [{a}, {b}] at energy E = {energy}")]
    ClassicallyForbidden { a: f64, b: f64, energy: f64 },

    #[error("integrator exceeded {0} steps")]
    StepLimit(usize),

    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(&'static str),

    #[error("phase unwrap ambiguity: adjacent jump {jump:.3} rad at k = {k}; use a denser grid")]
    UnwrapAmbiguity { k: f64, jump: f64 },

    #[error("grid is invalid: {0}")]
    InvalidGrid(&'static str),

    #[error("winding contour sampling did not resolve the argument variation")]
    WindingUnresolved,
}

pub type Result<T> = std::result::Result<T, Error>;
