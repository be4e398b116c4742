use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("invalid integer literal {0:?}")]
    Integer(String),
    #[error("invalid rational literal {0:?}")]
    Rational(String),
    #[error("invalid weight {0:?}: expected \"1\" or \"sqrt(d)\"")]
    Weight(String),
    #[error("malformed input: {0}")]
    Shape(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("matrix is singular: the sublattice has infinite index")]
    SingularLattice,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("ragged matrix: row {row} has {found} entries, expected {expected}")]
    Ragged { row: usize, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("elements live in different ambient groups")]
    AmbientMismatch,
    #[error("subgroup does not span the same rational space: index is infinite")]
    InfiniteIndex,
    #[error("generator {index} of the smaller group is not in the larger group")]
    NotASubgroup { index: usize },
    #[error("element is not in the group")]
    NotInGroup,
    #[error("invalid group layout: {0}")]
    Layout(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("monoid is not pointed: generator {index} is not strictly positive under the functional")]
    NotPointed { index: usize },
    #[error("vector lies in the rational cone but no multiplier up to {bound} certifies membership")]
    BoundTooSmall { bound: u64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("invalid block structure: {0}")]
    Blocks(String),
    #[error("x-value {index} is not strictly positive")]
    NonPositiveValue { index: usize },
    #[error("a diagonal block is singular")]
    SingularBlock,
    #[error("extension is not in strong monomial form: {0}")]
    NotSsm(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("transform is not along the valuation: value of y_{index} would become non-positive")]
    NotAlongValuation { index: usize },
    #[error("index out of range: {0}")]
    IndexError(String),
    #[error("input is not in the expected monomial form: {0}")]
    NotMonomialForm(String),
    #[error("no nonnegative lift for row {row} within exponent bound {bound}")]
    NoNonnegativeLift { row: usize, bound: String },
    #[error("index hypothesis failed: group index {group_index} but |det A| = {determinant}")]
    IndexHypothesisFailed { group_index: String, determinant: String },
    #[error("quotient isomorphism hypothesis failed: {reason}")]
    QuotientHypothesisFailed { reason: String, witness: Vec<String> },
    #[error("step bound {limit} exceeded")]
    StepBoundExceeded { limit: usize },
    #[error("trace replay diverged at step {step}")]
    ReplayMismatch { step: usize },
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GradedError {
    #[error("the zero element has no value")]
    ZeroElement,
    #[error("basis label index {0} out of range")]
    UnknownLabel(usize),
    #[error("degree is not in the grading semigroup")]
    DegreeNotInSemigroup,
    #[error("coefficient vector has length {found}, expected {expected}")]
    CoefficientLength { expected: usize, found: usize },
    #[error("two terms at distinct basis labels share the value {0}")]
    ValueCollision(String),
    #[error("residue degree must be positive")]
    ZeroResidueDegree,
    #[error("incompatible input: {0}")]
    Incompatible(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemigroupError {
    #[error("membership query for a negative element")]
    NegativeQuery,
    #[error("generator {index} is not strictly positive")]
    NonPositiveGenerator { index: usize },
    #[error("generating values decrease at position {index}")]
    NonIncreasingTail { index: usize },
    #[error("generator {index} of the smaller semigroup is not in the larger one")]
    NotASubsemigroup { index: usize },
    #[error(transparent)]
    Group(#[from] GroupError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LedgerError {
    #[error("inconsistent record: {0}")]
    Inconsistent(String),
    #[error("residue characteristics differ ({0} vs {1})")]
    CharMismatch(u64, u64),
    #[error("index r is not recorded")]
    MissingIndex,
    #[error("residue characteristic {0} is neither 0 nor prime")]
    InvalidCharacteristic(u64),
    #[error("arithmetic overflow while composing records")]
    Overflow,
}

/// Any library error, with a stable machine-readable code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Monoid(#[from] MonoidError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Parse(_) => "parse_error",
            Error::Lattice(e) => match e {
                LatticeError::SingularLattice => "singular_lattice",
                LatticeError::DimensionMismatch { .. }
                | LatticeError::NotSquare { .. }
                | LatticeError::Ragged { .. } => "dimension_mismatch",
            },
            Error::Group(e) => group_code(e),
            Error::Monoid(e) => match e {
                MonoidError::DependentGenerators => "dependent_generators",
                MonoidError::NotPointed { .. } => "not_pointed",
                MonoidError::BoundTooSmall { .. } => "bound_too_small",
                MonoidError::DimensionMismatch { .. } => "dimension_mismatch",
            },
            Error::Extension(e) => extension_code(e),
            Error::Engine(e) => engine_code(e),
            Error::Graded(e) => match e {
                GradedError::ZeroElement => "zero_element",
                GradedError::Engine(e) => engine_code(e),
                GradedError::Semigroup(e) => semigroup_code(e),
                _ => "invalid_module_element",
            },
            Error::Semigroup(e) => semigroup_code(e),
            Error::Ledger(e) => match e {
                LedgerError::Inconsistent(_) => "inconsistent",
                LedgerError::CharMismatch(..) => "char_mismatch",
                LedgerError::MissingIndex => "missing_index",
                LedgerError::InvalidCharacteristic(_) => "invalid_characteristic",
                LedgerError::Overflow => "overflow",
            },
        }
    }
}

fn group_code(e: &GroupError) -> &'static str {
    match e {
        GroupError::AmbientMismatch => "ambient_mismatch",
        GroupError::InfiniteIndex => "infinite_index",
        GroupError::NotASubgroup { .. } => "not_a_subgroup",
        GroupError::NotInGroup => "not_in_group",
        GroupError::Layout(_) => "invalid_layout",
    }
}

fn extension_code(e: &ExtensionError) -> &'static str {
    match e {
        ExtensionError::Blocks(_) => "invalid_blocks",
        ExtensionError::NonPositiveValue { .. } => "non_positive_value",
        ExtensionError::SingularBlock => "singular_block",
        ExtensionError::NotSsm(_) => "not_ssm",
        ExtensionError::Dimension(_) => "dimension_mismatch",
    }
}

fn engine_code(e: &EngineError) -> &'static str {
    match e {
        EngineError::NotAlongValuation { .. } => "not_along_valuation",
        EngineError::IndexError(_) => "index_error",
        EngineError::NotMonomialForm(_) => "not_monomial_form",
        EngineError::NoNonnegativeLift { .. } => "no_nonnegative_lift",
        EngineError::IndexHypothesisFailed { .. } => "index_hypothesis_failed",
        EngineError::QuotientHypothesisFailed { .. } => "quotient_hypothesis_failed",
        EngineError::StepBoundExceeded { .. } => "step_bound_exceeded",
        EngineError::ReplayMismatch { .. } => "replay_mismatch",
        EngineError::Extension(e) => extension_code(e),
        EngineError::Group(e) => group_code(e),
        EngineError::Lattice(LatticeError::SingularLattice) => "singular_lattice",
        EngineError::Lattice(_) => "dimension_mismatch",
    }
}

fn semigroup_code(e: &SemigroupError) -> &'static str {
    match e {
        SemigroupError::NegativeQuery => "negative_query",
        SemigroupError::NonPositiveGenerator { .. } => "non_positive_generator",
        SemigroupError::NonIncreasingTail { .. } => "non_increasing_tail",
        SemigroupError::NotASubsemigroup { .. } => "not_a_subsemigroup",
        SemigroupError::Group(e) => group_code(e),
    }
}
