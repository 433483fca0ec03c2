use thiserror::Error;

use crate::diagram::Chord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong inside the library.
///
/// Variants are grouped loosely by the module that raises them. The CLI maps
/// [`Error::CostCapExceeded`] to its own exit code and every other variant to
/// a validation failure.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("endpoint {0} appears in more than one chord")]
    DuplicateEndpoint(u64),
    #[error("endpoint {label} is outside 1..={max}")]
    LabelOutOfRange { label: u64, max: u64 },
    #[error("chord joins endpoint {0} to itself")]
    SelfPair(u64),
    #[error("a chord diagram needs at least one chord")]
    EmptyDiagram,
    #[error("chord {0} is not in the diagram")]
    ChordNotInDiagram(Chord),
    #[error("chords {0} and {1} share an endpoint")]
    SharedEndpoint(Chord, Chord),
    #[error("subdiagram has no chords")]
    EmptySubdiagram,
    #[error("invalid chord labeling: {0}")]
    InvalidLabeling(String),
    #[error("j = {j} is outside 1..={n}")]
    JOutOfRange { j: usize, n: usize },
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("size must be at least 1")]
    ZeroSize,
    #[error("k = {k} is out of range: {reason}")]
    KOutOfRange { k: usize, reason: String },
    #[error("m = {m} is outside 1..={n}")]
    MOutOfRange { m: usize, n: usize },
    #[error("chord {0} is not part of the oriented diagram")]
    UnknownChord(Chord),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
    #[error("double factorial is only defined here for odd arguments, got {0}")]
    EvenArgument(i64),
    #[error("n = {n} exceeds the enumeration cap of {cap}")]
    SizeCapExceeded { n: usize, cap: usize },
    #[error("no diagram satisfies the condition")]
    EmptyCondition,
    #[error("distribution is not normalized (total mass {0})")]
    NotNormalized(f64),
    #[error("too few samples or cells for a goodness-of-fit test")]
    TooFewSamples,
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("estimated work {estimate:.3e} exceeds the budget {budget:.3e}")]
    CostCapExceeded { estimate: f64, budget: f64 },
}
