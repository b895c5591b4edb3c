//! Many-body Bell correlators for bosonic systems.
//!
//! The central quantity is the correlator `|<J+^m>|^2` of a state of `N`
//! bosons in two modes, compared against the local-realistic bound
//! `(N!/(N-m)!)^2 2^-m`. Everything is computed in the log domain so that
//! factorial-sized values at `N = 100` stay finite.
//!
//! ```
//! use bosonic_bell::{bell, dicke::DickeVector};
//!
//! let noon = DickeVector::noon_state(4).unwrap();
//! let report = bell::correlator_single(&noon, 4).unwrap();
//! assert!((report.ratio() - 4.0).abs() < 1e-12);
//! assert!(report.violates_bell);
//! ```

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bell;
pub mod dicke;
pub mod error;
pub mod hamiltonian;
pub mod lhv;
pub mod numerics;
pub mod spdc;

pub use error::{Error, Result};
pub use numerics::{LogComplex, LogScalar};

// README and book chapters compile and run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/log-domain.md")]
    mod log_domain {}
    #[doc = include_str!("../../../book/src/dicke.md")]
    mod dicke {}
    #[doc = include_str!("../../../book/src/bell-bounds.md")]
    mod bell_bounds {}
    #[doc = include_str!("../../../book/src/bec.md")]
    mod bec {}
    #[doc = include_str!("../../../book/src/spdc.md")]
    mod spdc {}
    #[doc = include_str!("../../../book/src/lhv.md")]
    mod lhv {}
    #[doc = include_str!("../../../book/src/pauli-expansion.md")]
    mod pauli_expansion {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
