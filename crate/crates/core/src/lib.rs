//! Multiplication operators on atomic discretizations of `L_p(μ)`.
//!
//! The crate models a finite measure space as a list of weighted atoms and
//! represents functions as value vectors and operators as matrices acting on
//! them. On top of that it provides:
//!
//! * level sets of a multiplier `φ`, flat detection and band projections
//!   ([`levelsets`]);
//! * checks that operators commuting with `M_φ` leave every level band
//!   invariant, including the averaging operator that commutes with `M_y` on
//!   the unit square without preserving disjointness ([`commutant`]);
//! * the recursive norm-halving construction that turns a non-zero `A`
//!   dominated by a member of the commutant into a normalized sequence with
//!   disjoint images bounded away from zero ([`witness`]);
//! * decay and order-bound certificates for operators dominated by a
//!   compact-role kernel operator ([`compactcheck`]).
//!
//! Everything here is `no_std` (with `alloc`); IO and the command line live
//! in the companion `mulop` crate.

#![no_std]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::redundant_guards)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod commutant;
pub mod compactcheck;
mod error;
pub mod levelsets;
pub mod lpspace;
pub mod measure;
pub mod multipliers;
pub mod operators;
mod sum;
pub mod witness;

pub use error::{Error, Result};

pub use levelsets::{FlatReport, LevelBand, LevelKind};
pub use lpspace::{Exponent, LpFunction};
pub use measure::{Geometry, MeasurableSet, MeasureSpace, Point};
pub use multipliers::MultiplierShape;
pub use operators::{LinearOperator, NormMethod, OperatorNormEstimate};

pub use witness::{WitnessConfig, WitnessStep, WitnessTrace};
