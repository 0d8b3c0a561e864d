//! Lesion analysis of a single-pattern bipolar autoassociative network.
//!
//! - [`net`]: patterns, outer-product training, lesions, the forward pass.
//! - [`recall`]: exact recall probabilities and curves by enumeration.
//! - [`survey`]: Monte Carlo over random cut-link sets.
//! - [`tot`]: signature classes, neuron-loss signature, convention search.

pub mod error;
pub mod net;
pub mod rational;
pub mod recall;
pub mod survey;
pub mod tot;

pub use error::{Error, Result};
pub use net::{
    BipolarVector, Conventions, CuePlacement, DamageSpec, DiagonalPolicy, Link, Response,
    SuccessKernel, SuccessRule, TiePolicy, TrainedNet, MAX_NEURONS,
};
pub use rational::{binomial, RationalProb};
pub use recall::{
    exact_recall_count, exact_recall_prob, mc_recall_estimate, recall_curve, McEstimate,
    RecallCount, RecallCurve,
};
