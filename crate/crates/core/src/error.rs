use thiserror::Error;

/// Errors raised by the correlator, bound and solver routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A correlation order larger than the number of particles it acts on.
    #[error("order {order} exceeds particle count {particles}")]
    OrderExceedsParticles { order: usize, particles: usize },

    /// Basis index outside `0..=n_particles`.
    #[error("index {index} out of range for {particles} particles")]
    IndexOutOfRange { index: usize, particles: usize },

    /// `k > n` in a binomial coefficient.
    #[error("binomial coefficient C({n}, {k}) is undefined")]
    InvalidBinomial { n: u64, k: u64 },

    #[error("at least one particle is required")]
    NoParticles,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An iterative routine ran out of its iteration or truncation budget.
    #[error("{routine} did not converge: {detail}")]
    NonConvergence {
        routine: &'static str,
        detail: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
