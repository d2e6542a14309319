//! Three-valued outcomes of the semi-decision procedures.

use serde::{Deserialize, Serialize};

use crate::hypersphere::HypersphereGpt;
use crate::linalg::RayleighPair;
use crate::scalar::Scalar;
use crate::wordsearch::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ConsistencyVerdict {
    Inconsistent { witness: Witness },
    Consistent { certificate: Certificate },
    Unknown { budget: BudgetReport },
}

impl ConsistencyVerdict {
    pub fn is_inconsistent(&self) -> bool {
        matches!(self, ConsistencyVerdict::Inconsistent { .. })
    }

    pub fn is_consistent(&self) -> bool {
        matches!(self, ConsistencyVerdict::Consistent { .. })
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, ConsistencyVerdict::Unknown { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            ConsistencyVerdict::Inconsistent { witness } => Some(witness),
            _ => None,
        }
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            ConsistencyVerdict::Consistent { certificate } => Some(certificate),
            _ => None,
        }
    }

    /// 0 = consistent, 1 = inconsistent, 2 = unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            ConsistencyVerdict::Consistent { .. } => 0,
            ConsistencyVerdict::Inconsistent { .. } => 1,
            ConsistencyVerdict::Unknown { .. } => 2,
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            ConsistencyVerdict::Consistent { .. } => "consistent",
            ConsistencyVerdict::Inconsistent { .. } => "inconsistent",
            ConsistencyVerdict::Unknown { .. } => "unknown",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A word whose acceptance strictly exceeds the cut point.
    CutPoint {
        word: Word,
        acceptance: Scalar,
        lambda: Scalar,
    },
    /// `n'^T M_w n > threshold` at rational unit vectors.
    Unbounded {
        word: Word,
        pair: RayleighPair,
        threshold: Scalar,
    },
    /// `|tr(M_w^power)| > d`, so `M_w` has an eigenvalue of modulus above
    /// one and its powers are unbounded.
    Growth {
        word: Word,
        power: u32,
        trace: Scalar,
        dim: usize,
    },
    /// A negative outcome value of a translation-invariant chain.
    Chain(ChainWitness),
}

impl Witness {
    pub fn word(&self) -> &Word {
        match self {
            Witness::CutPoint { word, .. }
            | Witness::Unbounded { word, .. }
            | Witness::Growth { word, .. } => word,
            Witness::Chain(c) => &c.word,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    P1,
    P2,
    P3,
    P4,
}

impl Family {
    pub const ALL: [Family; 4] = [Family::P1, Family::P2, Family::P3, Family::P4];
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainWitness {
    pub family: Family,
    /// Generator indices, family-specific: P1/P2 `[state, effect]`,
    /// P3 `[even effect, odd effect]`, P4 `[even state, odd state]`.
    pub generators: Vec<usize>,
    /// Concatenated word in increasing site order.
    pub word: Word,
    /// Teleport steps on the even side and on the odd side.
    pub even_steps: usize,
    pub odd_steps: usize,
    /// Overall `±` applied to the correlation term.
    pub sign: Sign,
    /// Exact outcome value, including every positive prefactor.
    pub value: Scalar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-", alias = "\u{2212}")]
    Minus,
}

impl Sign {
    pub fn value(self) -> Scalar {
        match self {
            Sign::Plus => Scalar::one(),
            Sign::Minus => -Scalar::one(),
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn product(signs: &[Sign]) -> Sign {
        signs.iter().fold(Sign::Plus, |acc, s| acc.times(*s))
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[serde(rename = "induced_1")]
    Induced1,
    InducedInf,
    Frobenius,
}

impl NormKind {
    /// Tie-break order when several norms certify the same `Λ²`.
    pub const PREFERENCE: [NormKind; 3] = [NormKind::Induced1, NormKind::InducedInf, NormKind::Frobenius];
}

/// An exactly checked inequality `lhs <= 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub lhs: Scalar,
    pub holds: bool,
}

impl BoundCheck {
    pub fn new(name: impl Into<String>, lhs: Scalar) -> Self {
        let holds = lhs <= Scalar::one();
        BoundCheck {
            name: name.into(),
            lhs,
            holds,
        }
    }
}

/// Sub-multiplicative norm certificate: every product over the alphabet has
/// spectral norm at most `Λ = sqrt(lambda_sq)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub norm: NormKind,
    pub block_length: usize,
    /// `max_{|w| = t} N(M_w)`; squared for the Frobenius norm.
    pub block_max: Scalar,
    /// `max_{|w| < t} N(M_w)`; squared for the Frobenius norm.
    pub prefix_max: Scalar,
    pub lambda_sq: Scalar,
    /// `Λ` itself when it is rational.
    pub lambda: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<HypersphereGpt>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub checks: Vec<BoundCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetReport {
    pub max_len: usize,
    pub max_nodes: usize,
    pub nodes_explored: usize,
    /// Longest word length whose level was explored completely.
    pub complete_length: Option<usize>,
    pub node_budget_exhausted: bool,
    pub note: String,
}
