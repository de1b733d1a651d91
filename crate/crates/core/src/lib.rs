//! Reconstruction and analysis of information cascades on follower graphs.
//!
//! The pipeline: load a follower graph ([`graph`]) and per-story activation
//! logs ([`events`]), build each story's activation DAG and extract its
//! cascades ([`cascade`]), measure their macroscopic structure ([`metrics`]),
//! and fit heavy-tailed families to the resulting distributions
//! ([`fitting`]). The [`sim`] module generates synthetic graphs and seeded
//! contagion corpora — including a promotion mechanism — in the same file
//! formats the loaders read, and [`reference`] holds slow exhaustive
//! implementations used to validate everything on small instances.

pub mod cascade;
pub mod dist;
pub mod events;
pub mod fitting;
pub mod graph;
pub mod ids;
pub mod metrics;
pub mod reference;
pub mod sim;

pub use cascade::{ActivationDag, Cascade, CascadeError, DagBuilder, ObservedTree, Pos};
pub use dist::{CcdfTable, Histogram};
pub use events::{ActivationLog, ActivationSequence, LogError, LogUserId, ValidationReport};
pub use fitting::{
    compare_fits, fit_family, fit_lognormal, fit_powerlaw, fit_weibull, FitComparison, FitError,
    FitFamily, FitParams, FitResult,
};
pub use graph::{Direction, FollowerGraph, GraphError, GraphSummary, UserId};
pub use metrics::{
    cascade_metrics, story_metrics, CascadeMetrics, CorpusDistributions, StoryMetrics,
};
pub use sim::{
    derive_seed, generate_graph, run_independent_cascade, run_promotion_experiment,
    simulate_corpus, write_corpus, ContagionConfig, GraphConfig, IcmRun, PromotionConfig,
    SimConfig, SimError, SimStory, Topology,
};
