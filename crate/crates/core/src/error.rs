use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoreError {
    #[error("zero denominator")]
    ZeroDenominator,

    #[error("unassigned atoms: {}", .0.join(", "))]
    MissingAssignment(Vec<String>),

    #[error("numeric singularity")]
    NumericSingularity,

    #[error("`{0}` is not an independent variable")]
    NotIndependent(String),

    #[error("`{0}` is not a dependent variable")]
    NotDependent(String),

    #[error("derivative order cap {cap} exceeded while differentiating")]
    OrderCap { cap: usize },

    #[error("invalid system: {0}")]
    BadSystem(String),

    #[error("cannot solve for leading derivative: equation `{equation}` is not affine in `{lead}`")]
    NonlinearLead { equation: String, lead: String },

    #[error("reduction exceeded {0} rewrite steps; system may not terminate under this ranking")]
    ReductionDiverged(usize),

    #[error("classical adjoint identity requires linearity")]
    RequiresLinearity,

    #[error("differential substitutions are out of scope: component for `{0}` contains derivatives")]
    DifferentialSubstitution(String),

    #[error("substitution components must not all vanish")]
    ZeroSubstitution,

    #[error("substitution component for `{0}` contains an adjoint variable")]
    SubstitutionUsesAdjoint(String),

    #[error("multiplier form defined for scalar equations only")]
    ScalarOnly,

    #[error("multiplier normalizes to zero")]
    ZeroMultiplier,

    #[error("unbounded ansatz space: affine degree {0} exceeds the supported limit")]
    UnboundedAnsatz(u32),

    #[error("substitution rejected: adjoint residual does not vanish on the solution manifold\n{0}")]
    SubstitutionRejected(String),

    #[error("numeric sampling failed: could not find a nonsingular point after {0} attempts")]
    SamplingFailed(usize),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
