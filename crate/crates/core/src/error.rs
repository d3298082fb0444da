use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero in F_q")]
    DivisionByZero,
    #[error("invalid base prime: {0}")]
    InvalidBasePrime(u64),
    #[error("invalid field modulus: {0} is not an odd prime")]
    InvalidModulus(u64),
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),
    #[error("cyclotomic does not split: Phi_{p} over F_{q}")]
    CyclotomicDoesNotSplit { p: u32, q: u32 },
    #[error("internal error: repeated root of Phi_{p} over F_{q}")]
    RepeatedRoot { p: u32, q: u32 },
    #[error("bad reduction prime: {q} kills an extreme coefficient of the Alexander polynomial")]
    BadReductionPrime { q: u32 },
    #[error("homology not semisimple over the given roots")]
    NotSemisimple,
    #[error("mismatched cover parameters: {0}")]
    MismatchedCover(String),
    #[error("invalid signature jump: {0}")]
    InvalidSignature(String),
    #[error("closed form inapplicable: {0}")]
    ClosedFormInapplicable(String),
    #[error("infection index {0} has no eigenvalue")]
    InfectionIndex(usize),
    #[error("block/spec mismatch: {0}")]
    BlockSpecMismatch(String),
    #[error("empty connected sum")]
    EmptySum,
    #[error("rank {rank} out of range for total dimension {dim}")]
    RankOutOfRange { rank: usize, dim: usize },
    #[error("budget exceeded: {needed} elementary evaluations requested, limit {limit}")]
    BudgetExceeded { needed: u128, limit: u64 },
    #[error("winding number shares factor with cover order: gcd({m}, {p}) = {gcd}")]
    WindingGcd { m: i64, p: u32, gcd: u64 },
    #[error("unknown {kind} '{name}' (available: {available})")]
    UnknownStrategy { kind: &'static str, name: String, available: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
