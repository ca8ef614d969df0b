//! Local-lemma bounds for events in uniform random perfect matchings.
//!
//! A partial matching `M` defines the canonical event `A_M`: a uniform
//! perfect matching of `K_N` or `K_{N,M}` contains `M`. The crate computes
//! lower and upper bounds on the probability that none of a family of such
//! events occurs, checks them against exhaustive enumeration, and applies
//! them to cycle-restricted permutations, Latin rectangles and regular graphs
//! of high girth.

pub mod bounds;
pub mod config_model;
pub mod exact;
pub mod family;
pub mod girth_chromatic;
pub mod interval;
pub mod latin;
pub mod matching;
pub mod oracle;
pub mod permutations;
pub(crate) mod parallel;
pub mod report;
pub mod rng;

pub use family::{conflict_graph, family_stats, ConflictGraph, EventFamily, FamilyError, FamilyStats};
pub use matching::{canonical_form, event_probability, in_conflict, Matching, MatchingError, MatchingSpace, Vertex};
