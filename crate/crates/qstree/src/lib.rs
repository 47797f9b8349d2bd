//! Colorings of regular trees described by edge-indexed quotient graphs:
//! ball censuses, factor complexity, special balls, factor graphs, structure
//! of quasi-Sturmian colorings and recurrence functions.

pub mod ball;
pub mod census;
pub mod check;
pub mod code;
pub mod error;
pub mod factor_graph;
pub mod fixtures;
pub mod quotient;
pub mod recurrence;
pub mod structure;
pub mod word;

pub use ball::{canonical_code, interior_classes, restrict_ball, unfold_ball, BallNode, ColoredBall};
pub use census::{
    build_census, build_census_with, complexity_profile, BallCensus, CensusOptions, ComplexityProfile, TypeSet, Verdict,
};
pub use code::BallCode;
pub use error::{Error, Result};
pub use factor_graph::{build_factor_graph, evolve, CaseLabel, EvolutionTrace, FactorGraph, Markers};
pub use fixtures::FixtureId;
pub use quotient::{parse_spec, ExpandedGraph, Origin, QuotientSpec};
pub use recurrence::{predict_rpp, recurrence_profile, recurrence_r, recurrence_rpp, Branch, RValue, RecurrenceProfile};
pub use structure::{derive_z, structure_report, Boundedness, Shape, StructureReport, Topology, ZGraph};
