//! Information-dynamics signals and change-point detection for dated
//! document corpora.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`corpus`] ingests dated JSONL documents and normalizes them into
//!    token sequences.
//! 2. [`represent`] turns token sequences into probability-simplex vectors
//!    (smoothed term frequencies, a built-in LDA topic model, or imported
//!    distributions).
//! 3. [`infodyn`] computes windowed novelty, transience and resonance over
//!    the time-sorted distribution sequence.
//! 4. [`nxr`] and [`changepoint`] analyse the signals: resonance-on-novelty
//!    slopes per period, and a Bayesian two-change-point model over the
//!    novelty series with an NID (news information decoupling) verdict.
//!
//! [`synth`] generates ground-truthed synthetic series and corpora for
//! testing and calibration.

// Float validations are deliberately written as negated comparisons
// (`!(x > 0.0)`) so NaN fails them; the positive form the lint suggests
// would silently accept NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod changepoint;
pub mod corpus;
mod error;
pub mod infodyn;
pub mod nxr;
pub mod represent;
pub mod synth;

pub use changepoint::{ChangePointPosterior, CpModelSpec, CpParams, NidReport};
pub use corpus::{Document, NormalizeOpts, TokenizedDoc, Vocabulary};
pub use error::{Error, Result};
pub use infodyn::{SignalConfig, SignalPoint, SignalSeries};
pub use nxr::SlopeFit;
pub use represent::{DocDistribution, LdaModel};
