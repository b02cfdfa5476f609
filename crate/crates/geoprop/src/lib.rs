//! Location inference on social graphs and content-agnostic document
//! geotagging.
//!
//! The pipeline has two halves:
//!
//! 1. **User geolocation.** An undirected social graph is built from
//!    reciprocated mention records ([`graph`]). A small fraction of users
//!    carry ground-truth locations (GPS medians or gazetteer-matched
//!    self-reports). The solver in [`propagation`] spreads those locations
//!    across the graph by repeatedly assigning each unlocated user the
//!    geodesic median of their located neighbors, skipping users whose
//!    neighborhood is too dispersed.
//! 2. **Document geotagging.** Given a share log (who shared which URL),
//!    [`geotag`] assigns each URL the robust center of its sharers'
//!    locations and reports the dispersion as an uncertainty measure.
//!
//! Supporting modules: [`geodesy`] (WGS-84 distances), [`robust`] (geodesic
//! medians and MAD dispersion), [`toponym`] (gazetteer filtering and the
//! text-mention baseline), [`eval`] (cross-validation and accuracy/coverage
//! curves), [`synth`] (synthetic test worlds), and [`io`] (flat-file
//! formats).

pub mod eval;
pub mod geodesy;
pub mod geotag;
pub mod graph;
pub mod io;
pub mod propagation;
pub mod robust;
pub mod synth;
pub mod toponym;

pub use geodesy::GeoPoint;
pub use graph::{GroundTruthLabel, GroundTruthLabels, LabelSource, MentionRecord, SocialGraph};
pub use propagation::{LocationEstimate, Provenance, SolverConfig, SolverReport};
pub use robust::{RobustSummary, WeightedPointSet};

/// Errors produced by this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid coordinate (lat={lat}, lon={lon}): latitude must be finite in [-90, 90], longitude finite")]
    InvalidGeoPoint { lat: f64, lon: f64 },
    #[error("geodesic inverse solution did not converge (near-antipodal input)")]
    NonConvergence,
    #[error("point set is empty")]
    EmptySet,
    #[error("weights must be positive, finite, and match the point count")]
    InvalidWeights,
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(#[from] regex::Error),
    #[error("unparsable URL: {0}")]
    UnparsableUrl(String),
    #[error("input contains no records")]
    EmptyInput,
    #[error("not enough labeled users for the requested holdout")]
    InsufficientLabels,
    #[error("{path}:{line}: malformed record: {reason}")]
    Malformed {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
