//! Correlation attack laboratory.
//!
//! [`cca`] measures how well tag bits can be linearly predicted from code or
//! cipher bits, [`dataset`] draws the paired samples, [`curve`] sweeps the
//! bit ratio `B/b`, and [`gaussian`] is a small Monte Carlo study of when a
//! correlated side measurement actually helps.

use thiserror::Error;

use crate::codec::CodecError;

pub mod cca;
pub mod curve;
pub mod dataset;
pub mod gaussian;
pub mod scramble;
pub mod stats;

pub use cca::{canonical_correlations, cca_first_correlation};
pub use curve::{
    run_cell, run_curve_experiment, CorrelationReport, CurveCell, CurveConfig, ReportRow,
    SchemeRatio,
};
pub use dataset::{sample_dataset, BitDataset, DatasetSpec, PadMode, Scheme};
pub use gaussian::{gaussian_threshold_demo, GaussianDemoParams, GaussianDemoResult};
pub use scramble::{fixed_bits_scramble, fixed_bits_unscramble, spread_positions};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    #[error("X has {x} rows but Y has {y}")]
    RowMismatch { x: usize, y: usize },
    #[error("need at least {needed} samples, got {samples}")]
    InsufficientSamples { samples: usize, needed: usize },
    #[error("a variable block has no columns")]
    EmptyBlock,
    #[error("non-finite matrix entry")]
    NonFinite,
    #[error("covariance is not positive definite")]
    NotPositiveDefinite,
    #[error("sample count must be positive")]
    NoSamples,
    #[error("budget of {budget} bits is too small for {bit_width}-bit tags")]
    BudgetTooSmall { bit_width: u32, budget: u32 },
    #[error("expected {expected} positions, got {found}")]
    PositionCount { expected: usize, found: usize },
    #[error("position {position} outside a {budget}-bit code")]
    PositionOutOfRange { position: u32, budget: u32 },
    #[error("position {0} listed twice")]
    DuplicatePosition(u32),
    #[error("invalid bit ratio {0}")]
    InvalidRatio(f64),
    #[error("sweep has an empty parameter list")]
    EmptySweep,
    #[error("unknown name")]
    UnknownName,
    #[error("{0}")]
    InvalidParameter(&'static str),
    #[error(transparent)]
    Codec(#[from] CodecError),
}
