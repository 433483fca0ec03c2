//! Random chord diagrams, their intersection graphs, and exact and Monte
//! Carlo tools for their statistics.

pub mod diagram;
pub mod error;
pub mod experiments;
pub mod extremal;
pub mod formulas;
pub mod graph;
pub mod oracle;
pub mod oriented;
pub mod sampler;
pub mod stats;

pub use diagram::{crosses, parse_diagram, phi, serialize_diagram, tau, Block, Chord, ChordDiagram, Format, Subdiagram};
pub use error::{Error, Result};
pub use sampler::{derive_seed, run_continuous, run_discrete, sample_uniform, EvolutionTrace, Model, Seed};
