use thiserror::Error;

/// Errors raised by the algebraic operations in this crate.
///
/// Validation-style operations (`validate`, `validate_morphism`,
/// `validate_fibration`, `gysin_verify`, ...) do not error on mathematical
/// failures; they return reports. `Error` is reserved for malformed inputs
/// and broken preconditions.
#[derive(Debug, Error)]
pub enum Error {
    #[error("generator degree must be >= 1 (got {degree} for `{name}`)")]
    ZeroDegreeGenerator { name: String, degree: usize },

    #[error("duplicate generator name `{0}`")]
    DuplicateName(String),

    #[error("unknown generator id {0} (element does not belong to this algebra)")]
    UnknownGenerator(usize),

    #[error("unknown generator name `{0}`")]
    UnknownName(String),

    #[error("differential of `{name}` (degree {degree}) must be homogeneous of degree {expected}, got {found}")]
    DifferentialDegree {
        name: String,
        degree: usize,
        expected: usize,
        found: String,
    },

    #[error("morphism image of `{name}` (degree {degree}) must be homogeneous of degree {degree}, got {found}")]
    MorphismDegree {
        name: String,
        degree: usize,
        found: String,
    },

    #[error("morphism images must cover every source generator ({expected} generators, {found} images)")]
    MorphismArity { expected: usize, found: usize },

    #[error("element is not homogeneous")]
    NotHomogeneous,

    #[error("element of degree {degree} is not a cocycle")]
    NotCocycle { degree: usize },

    #[error("algebra failed validation: {0}")]
    Validation(String),

    #[error("cohomology class must have positive even degree, got {0}")]
    NotPositiveEven(usize),

    #[error("cohomology class must have odd degree, got {0}")]
    NotOdd(usize),

    #[error("class must be nonzero")]
    ZeroClass,

    #[error("even cohomology present in degree {degree} (dimension {dimension}); required to vanish through {through}")]
    EvenCohomologyPresent {
        degree: usize,
        dimension: usize,
        through: usize,
    },

    #[error("H^1 has dimension {0} >= 2; minimal-model operations support at most one degree-1 class")]
    UnsupportedFundamentalGroup(usize),

    #[error("subalgebra is not closed under d: `{gen}` has differential support outside the selection")]
    NotClosedUnderDifferential { gen: String },

    #[error("class does not die within the recorded tower stages")]
    ClassNotKilled,

    #[error("cocycle lifting failed in degree {degree}: the supplied model is not a quasi-isomorphism there")]
    LiftFailed { degree: usize },

    #[error("minimal model cutoff {have} is too small; need at least {need}")]
    InsufficientCutoff { have: usize, need: usize },

    #[error("algebra is not minimal: d(`{gen}`) has a linear term")]
    NotMinimal { gen: String },

    #[error("expected odd-degree generators only; `{gen}` has even degree {degree}")]
    EvenGenerator { gen: String, degree: usize },

    #[error("class is not in the span of generator classes in degree {degree}")]
    NotGeneratorSpanned { degree: usize },

    #[error("base must be a single odd-degree generator with zero differential")]
    NotSphereBase,

    #[error("fibration does not satisfy the stage filtration: {0}")]
    BadFibration(String),

    #[error("free Lie letters must have odd degree >= 3, got {0}")]
    UnsupportedLetterDegree(usize),

    #[error("quasi-isomorphism verification failed in degree {degree}: {detail}")]
    QuasiIsoFailed { degree: usize, detail: String },

    #[error("enumeration size {size} exceeds the configured cap {cap}")]
    EnumerationCap { size: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
