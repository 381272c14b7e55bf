//! Compositions of k-local boolean functions.
//!
//! A composition writes `f : {0,1}^n → D` as `h(g_1(x), …, g_m(x))` where each
//! inner `g_j` reads at most `k` coordinates. This crate builds such
//! compositions for parity, Hamming weight and majority, reduces
//! branching programs and majority instances to them, lowers them to depth-3
//! circuits, and computes the exact information quantities that govern how
//! many inner functions each variable must feed.

pub mod bits;
pub mod boolfn;
pub mod branching;
pub mod composition;
pub mod constructions;
pub mod depth3;
pub mod domain;
pub mod error;
pub mod info;
pub mod majreduce;
pub mod search;
pub mod text;

pub use bits::{BitVector, MAX_ARITY};
pub use boolfn::{NamedFunction, Restriction, TruthTable};
pub use branching::{bp_to_composition, BranchingProgram, Layer};
pub use composition::{
    induce_outer, low_query_restriction, query_profile, restrict_composition, verify_against,
    Composition, FiberConflict, LocalFunction, OuterFunction, QueryProfile, Verification,
};
pub use constructions::{build_hw, build_maj, build_parity, GroupSplit};
pub use depth3::{composition_to_depth3, Depth3Circuit, Depth3Size, Polarity};
pub use domain::Domain;
pub use error::{Error, Result};
pub use info::{
    check_counting_bound, check_key_lemma, extract_bias_witness, info_report,
    validate_information_facts, BiasWitness, DiscreteDistribution, InfoReport, JointDistribution,
};
pub use majreduce::{
    derive_partial_hw, end_to_end_pipeline, split_variables, PartialHw, VariableSplit,
};
pub use search::{exact_cc, lower_bound_refinement, SearchBudget, SearchOutcome};
