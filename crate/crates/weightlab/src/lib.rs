//! Numerical laboratory for weighted harmonic analysis on discretized domains.
//!
//! The crate provides five building blocks and a verification harness on top:
//!
//! * [`grid`] — cell-centered grids on `[-L, L]^d` with shifted dyadic cube
//!   families, midpoint quadrature, and a bit-exact CSV interchange format.
//! * [`norms`] — weighted Lebesgue, Lorentz, Morrey, Orlicz (Luxemburg), and
//!   bounded-mean-oscillation norms of gridded functions.
//! * [`weights`] — Muckenhoupt-type weight classes: classical, multilinear,
//!   grading-refined, and partial-weight constants over cube families, plus
//!   reverse Hölder indices, power-weight membership gates, factorization and
//!   characterization checks, and majorant construction.
//! * [`operators`] — fractional maximal operators (linear and multilinear),
//!   fractional integrals with singularity-corrected quadrature, commutators,
//!   truncated commutator suprema, a weight-modified maximal operator, and an
//!   iteration algorithm that manufactures bounded majorants.
//! * [`exponents`] — exact rational exponent calculus: admissibility of
//!   grading tuples, defect exponents, duality, extrapolation targets, and
//!   off-diagonal iteration chains. No floating point enters this module.
//! * [`harness`] — a scenario catalog that exercises every statement the
//!   laboratory covers at desk scale, with deterministic JSON/CSV/SVG reports.

pub mod exponents;
pub mod grid;
pub mod harness;
pub mod norms;
pub mod operators;
pub mod weights;

/// Crate-wide error type. Every fallible operation narrates which contract
/// was violated rather than panicking.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid: {0}")]
    Grid(String),
    #[error("norm: {0}")]
    Norm(String),
    #[error("weight: {0}")]
    Weight(String),
    #[error("operator: {0}")]
    Operator(String),
    #[error("exponent: {0}")]
    Exponent(String),
    #[error("chain invariant violated: {0}")]
    ChainInvariant(String),
    #[error("work budget exceeded: {0}")]
    Budget(String),
    #[error("harness: {0}")]
    Harness(String),
    #[error("parse: {0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
