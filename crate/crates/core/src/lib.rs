//! Ontology-driven page ranking.
//!
//! Pages are scored by the trees their annotated relations form inside a
//! concept graph, optionally helped by low-weight virtual links and
//! coverage bonuses, or by the dominant eigenvector of a page-to-page
//! back-link matrix.

pub mod backlink;
pub mod compare;
pub mod environment;
pub mod error;
pub mod fixtures;
pub mod forest;
pub mod generator;
pub mod golden;
pub mod model;
pub mod num;
pub mod relation;
pub mod virtual_links;

pub use backlink::{BacklinkMatrix, BacklinkMode, EigenResult};
pub use compare::{ComparisonReport, RankOptions};
pub use environment::Environment;
pub use error::{Error, Result, ValidationError};
pub use forest::{LengthAggregate, TreeSubset};
pub use generator::GeneratorParams;
pub use model::{
    CandidateEdge, CandidateEdgeSet, ConceptId, EdgeKind, OntologyGraph, PageSubgraph, PairKey,
    Query,
};
pub use num::Rational;
pub use relation::{Method, RankReport, ScoredPage};
pub use virtual_links::{Variant, VirtualConfig, VirtualDeltaMode};
