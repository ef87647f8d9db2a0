//! Exact point counting over finite local rings.
//!
//! The crate counts points of affine schemes defined by integer polynomial
//! systems over `Z/p^m`, Galois rings and `F_q[t]/t^m`, builds jet schemes,
//! evaluates local and global zeta series, and computes representation zeta
//! data of finite congruence groups `SL_d(R)`.
//!
//! Module map:
//!
//! * [`rings`]: finite local rings and their residue fields.
//! * [`polys`]: integer polynomials, the expression parser, Jacobians, jets.
//! * [`schemes`]: affine schemes and constructors (jets, opens, singular
//!   locus, deformation varieties of surface groups).
//! * [`counting`]: brute-force and Hensel-lifting engines, normalized counts.
//! * [`diagnostics`]: sweeps of normalized counts and their statistics.
//! * [`zeta`]: local series, Padé fitting, Euler products, abscissa.
//! * [`groups`]: finite groups, commutator words, character degrees.

// row operations read more clearly with explicit indices
#![allow(clippy::needless_range_loop)]

pub mod counting;
pub mod diagnostics;
pub mod error;
pub mod exact;
pub mod groups;
pub mod linalg;
pub mod par;
pub mod polys;
pub mod rings;
pub mod schemes;
pub mod zeta;

pub use error::{Error, Result};
