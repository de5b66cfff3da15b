//! Two-stage Dirichlet-energy clustering for multi-relational graphs.
//!
//! Stage I fuses node attributes and R typed edge sets into feature vectors
//! by alternating a closed-form (or truncated-Neumann) smoothing update with
//! a relation-weight update. Stage II clusters the features either through
//! an explicit Gaussian-kernel affinity plus spectral clustering, or through
//! orthogonal random features, factored Sinkhorn–Knopp normalization and
//! k-means, which never materializes the N×N affinity.

pub mod attributeless;
pub mod energy;
pub mod error;
pub mod features;
pub mod graph;
pub mod io;
pub mod kmeans;
pub mod linalg;
pub mod metrics;
pub mod pipeline;
pub mod rng;
pub mod sketch;
pub mod sparse;
pub mod stage1;
pub mod stage2;
pub mod synth;

pub use error::{Error, Result};
pub use features::{FeatureMatrix, NormState};
pub use graph::{build_views, MultiRelGraph, Relation, RelationViews};
pub use sparse::CsrMatrix;
pub use stage1::{RelationWeights, SketchDim, Stage1Config, Stage1Mode};
pub use stage2::{ClusterResult, SKFactors, Stage2Config, Stage2Mode};
