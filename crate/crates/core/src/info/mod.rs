//! Exact information quantities over uniform distributions on subsets of the cube.
//!
//! All probabilities come from integer counts over the domain; floats only
//! appear when taking logarithms.

mod entropy;
mod facts;
mod report;
mod witness;

pub use entropy::{binary_entropy, DiscreteDistribution, JointDistribution};
pub use facts::{validate_information_facts, FactsReport};
pub use report::{
    check_counting_bound, check_key_lemma, info_report, subsets_up_to, CountingReport, InfoReport,
    KeyLemmaReport, KeyLemmaRow, VarInfo, MAX_INFO_ARITY,
};
pub use witness::{extract_bias_witness, BiasWitness};

/// Tolerance for floating equality assertions on information quantities.
pub const INFO_TOLERANCE: f64 = 1e-9;
