//! Matrix estimation by universal singular value thresholding.
//!
//! See the guide in `book/` for a walkthrough; [`estimator::usvt_estimate`] is
//! the entry point.

pub mod bounds;
pub mod checks;
pub mod error;
pub mod estimator;
pub mod generators;
pub mod harness;
pub mod io;
pub mod linalg;
pub mod rng;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/linear-algebra.md")]
    mod linear_algebra {}
    #[doc = include_str!("../../../book/src/estimator.md")]
    mod estimator {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    mod bounds {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
