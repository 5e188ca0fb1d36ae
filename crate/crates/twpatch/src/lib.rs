//! Exact finite-level computations behind Taylor–Wiles patching in weight one.
//!
//! Everything is computed over `Z/p^M` (or `F_p`) with exact residues; there is
//! no floating point anywhere.  The modules build on each other bottom-up:
//! [`coeff`] supplies modular linear algebra, [`artin`] finite local algebras,
//! [`grpring`] modules over `O[(Z/p^N)^q]`, and [`patch`], [`qexp`] and
//! [`defring`] the concrete verifications.

pub mod artin;
pub mod cli;
pub mod coeff;
pub mod defring;
pub mod grpring;
pub mod patch;
pub mod qexp;
pub mod report;
pub mod suite;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring: {0}")]
    InvalidRing(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parameter mismatch: {0}")]
    Mismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("precision underflow: {0}")]
    Precision(String),
    #[error("not in span: {0}")]
    NotInSpan(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("rejected: {0}")]
    Rejected(String),
}

pub type Result<T> = std::result::Result<T, Error>;
