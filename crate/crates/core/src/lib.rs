//! Least squares classification with optimistic self-learning.
//!
//! The crate provides the supervised regularized least squares classifier,
//! two semi-supervised extensions solved by block coordinate descent (soft
//! labels and hard labels), convexity diagnostics with brute-force oracles,
//! synthetic data generators and CSV loading, and the experiment protocols
//! for basin, local-optima and learning-curve studies.

pub mod datagen;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod model;
pub mod selflearn;

pub use datagen::{generate, LabeledPool, Split, SyntheticKind, SyntheticSpec};
pub use diagnostics::{HessianKind, NonconvexityWitness};
pub use error::{Error, Result};
pub use experiments::Method;
pub use model::{
    classify, decision_values, ridge_solve, ClassEncoding, Dataset, Penalty, Responsibilities,
    RidgeConfig, RidgeFactor, SoftLabels, WeightVector,
};
pub use selflearn::{
    fit_hard, fit_oracle, fit_soft, fit_supervised, FitResult, FitTrace, Imputed, Init, SoftStop,
    SolverConfig, StopReason,
};
