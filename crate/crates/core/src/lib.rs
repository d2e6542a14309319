//! Exact-rational toolkit for consistency questions about generalised
//! probabilistic theories (GPTs).
//!
//! The crate searches for inconsistency witnesses (outcomes with negative
//! probability produced by iterated transformations or teleportation),
//! issues boundedness certificates that guarantee consistency through a
//! hypersphere embedding, and compiles probabilistic finite automata into
//! explicit GPT generating sets. All verdict-relevant arithmetic is exact.

pub mod error;
pub mod gpt;
pub mod chainsim;
pub mod hypersphere;
pub mod io;
pub mod linalg;
pub mod reductions;
pub mod scalar;
pub mod teleport;
pub mod tensor;
pub mod verdict;
pub mod wordsearch;

pub use error::{GptError, Result};
pub use gpt::{compose, pair, validate_measurement, Effect, GptVector, Measurement, State, Transformation};
pub use linalg::{Matrix, RationalUnitVector, RayleighPair};
pub use scalar::Scalar;
pub use tensor::{marginalize, pair_tensor, tensor_effects, tensor_states, Tensor};
pub use hypersphere::{embed_certificate, embed_certificate_sq, min_pairing_value, sample_extreme, HypersphereGpt};
pub use teleport::{teleport_brute, teleport_channel, EntangledEffect, EntangledState};
pub use verdict::{BudgetReport, Certificate, ConsistencyVerdict, Family, NormKind, Sign, Witness};
pub use wordsearch::{acceptance, product, MatrixSet, PfaInstance, ProductNode, Word};
pub use chainsim::{brute_force_chain, consistency_scan, ChainSpec, Scenario, ScanOptions, TeleportPlan};
pub use io::{GeneratingSet, GeneratingSetDocument};
