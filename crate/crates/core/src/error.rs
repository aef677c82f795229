use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("enumeration of {required} points exceeds the cap of {cap}")]
    SizeLimitExceeded { required: u128, cap: u128 },

    #[error("dimension {0} is not supported: d must be odd and at least 3")]
    BadDimension(u64),

    #[error("a system needs at least one qudit")]
    BadQuditCount,

    #[error("bad gate targets: {0}")]
    BadTargets(String),

    #[error("cannot compare against an all-zero operator")]
    DegenerateB,

    #[error("I + M is singular modulo {0}; the map has no Cayley parameterization")]
    CayleySingular(u64),

    #[error("one Euler step of this Hamiltonian is not a symplectic map")]
    NonSymplecticResult,

    #[error("the stationary-momentum condition of the Legendre transform has no unique solution")]
    LegendreSingular,

    #[error("{0} is not a Clifford operation; it needs the hbar^1 reflection-sum backend")]
    NotClifford(String),

    #[error("stabilizer delta set has {found} points, expected {expected}")]
    InvariantViolated { found: u128, expected: u128 },

    #[error("no mixed position/momentum Gaussian form reproduces this state")]
    NoGaussianForm,
}

pub type Result<T> = std::result::Result<T, Error>;
