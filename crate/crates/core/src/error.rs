use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `n - |m|` is negative or odd.
    #[error("invalid radial index n={n}, m={m}: n - |m| must be even and non-negative")]
    InvalidIndex { n: i64, m: i64 },

    /// A Chebyshev order that does not occur in the expansion of `R_n^|m|`.
    #[error("Chebyshev order i={i} is incompatible with n={n}: n - i must be even and non-negative")]
    InvalidOrder { n: u32, i: u32 },

    #[error("argument {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    /// A closed form was requested outside the range where it holds.
    #[error("side condition violated: {0}")]
    SideCondition(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
