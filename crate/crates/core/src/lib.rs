//! Exact intersection arithmetic and genus witnesses.
//!
//! The crate builds curve classes of prescribed arithmetic genus on a
//! polarized surface or threefold section and certifies them with Reider
//! type inequalities. Everything is exact: integers are [`BigInt`] and the
//! only rationals are [`BigRational`].
//!
//! - [`quadform`]: representing even integers by mixed 18-variable forms.
//! - [`lattice`]: intersection models, validation and the gap form.
//! - [`ampleness`]: Reider checks, twists and box thresholds.
//! - [`planner`]: genus witnesses and empirical thresholds.
//! - [`nodal`]: nodal curves via blowups.
//! - [`cli`]: the `genusforge` command line.
//!
//! [`BigInt`]: num_bigint::BigInt
//! [`BigRational`]: num_rational::BigRational

pub mod ampleness;
pub mod cli;
pub mod error;
pub mod lattice;
pub mod nodal;
pub mod planner;
pub mod quadform;
pub mod samples;

pub use error::{Error, Result};
pub use lattice::{DivisorClass, IntersectionModel};
pub use quadform::MixedQuadForm;

/// The guide's snippets run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/representing-even-integers.md")]
    mod representing_even_integers {}
    #[doc = include_str!("../../../book/src/intersection-lattices.md")]
    mod intersection_lattices {}
    #[doc = include_str!("../../../book/src/ampleness.md")]
    mod ampleness {}
    #[doc = include_str!("../../../book/src/genus-witnesses.md")]
    mod genus_witnesses {}
    #[doc = include_str!("../../../book/src/nodal-curves.md")]
    mod nodal_curves {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
