//! Relative class numbers of prime cyclotomic fields and the explicit
//! analytic bounds around them.
//!
//! Everything here is pure computation on top of `alloc`: exact integers
//! for the arithmetic side and certified ball arithmetic ([`ball`]) for the
//! analytic side. IO, configuration and the command line live in the
//! companion `hminus` crate.
//!
//! Iterated logarithms follow the convention `log2(x) = log log x` and
//! `log3(x) = log log log x`, natural base throughout.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod arith;
pub mod ball;
pub mod bounds;
pub mod chars;
pub mod classnumber;
pub mod hurwitz;
pub mod jet;
pub mod lfunc;
mod error;

pub use error::{Error, Result};
