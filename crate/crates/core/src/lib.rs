//! Exact-arithmetic engine for the 2-Selmer groups of quadratic number fields.
//!
//! The crate computes, over Q and over quadratic fields Q(sqrt(d)):
//!
//! - class groups in the usual and in the strict (narrow) sense, via binary
//!   quadratic forms with Gauss composition;
//! - unit groups, fundamental units (continued fractions) and the subgroups
//!   of totally positive and primary units;
//! - the 2-Selmer group Sel(F) of singular numbers modulo squares, together
//!   with the subgroups Sel+, Sel_4, Sel_4+ cut out by signatures and
//!   residues modulo 4;
//! - quadratic residue symbols, the four residue pairings between Selmer
//!   groups and (ray) class groups, and reciprocity checks;
//! - per-field verdict reports and multi-field scans.
//!
//! All arithmetic is exact: arbitrary-precision integers, integer sign
//! comparisons instead of floating point, and GF(2) linear algebra for every
//! dimension count.

pub mod arith;
pub mod classgroup;
pub mod error;
pub mod f2;
pub mod field;
pub mod forms;
pub mod ideal;
pub mod selmer;
pub mod symbols;
pub mod unit;
pub mod verify;

pub use error::Error;
pub use field::{FieldElement, QuadField};
pub use ideal::Ideal;
