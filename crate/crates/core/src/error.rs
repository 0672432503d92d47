use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NonPrime(u32),
    #[error("entry {value} out of range for modulus {p}")]
    EntryOutOfRange { value: u32, p: u32 },
    #[error("field mismatch: F_{left} vs F_{right}")]
    FieldMismatch { left: u32, right: u32 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("budget exceeded: need {required} but budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("the zero vector does not generate a vertex")]
    ZeroVector,
    #[error("subspace is not closed under the algebra action")]
    NotActionClosed,
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("ideal is not a decomposition ideal of the module")]
    NotDecompositionIdeal,
    #[error("generator set is not fundamental")]
    NotFundamental,
    #[error("not a morphism of triples: {0}")]
    NotCMorphism(String),
    #[error("induced vertex map does not preserve adjacency: vertices {0} and {1}")]
    AdjacencyNotPreserved(usize, usize),
    #[error("ideal family is not directed")]
    NotDirected,
    #[error("sequence {0:?} is not admissible")]
    Inadmissible(Vec<usize>),
    #[error("graphs do not share a vertex universe")]
    IncompatibleUniverse,
    #[error("graph too large for brute-force isomorphism ({0} vertices)")]
    TooLarge(usize),
    #[error("chain map {0} is not injective")]
    NotInjective(usize),
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
