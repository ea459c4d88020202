//! Exact-arithmetic homotopy theory of finite-dimensional dg Lie and
//! arity-truncated L∞ algebras over ℚ.
//!
//! Everything is computed with exact rational arithmetic: graded vector
//! spaces with named bases, Koszul signs, chain complexes and deterministic
//! contractions onto cohomology, L∞ algebras given by Taylor coefficients
//! `l_k` up to an arity bound `N`, L∞ morphisms as Maurer-Cartan elements of
//! a convolution algebra, gauge flows between them (closed form for dg Lie
//! targets, exact polynomial integration in general), homotopy certificates,
//! homotopy transfer onto cohomology, inversion of quasi-isomorphisms, a
//! polynomial-forms cylinder, and truncated functors between counital
//! conilpotent dg coalgebras and free graded Lie algebras.
//!
//! The crate favours small sparse data: all linear algebra runs over
//! `BTreeMap`-backed sparse columns, and every algorithm is deterministic so
//! results can be compared byte for byte.

pub mod algebra;
pub mod conv;
pub mod cylinder;
pub mod doc;
mod error;
pub mod fixtures;
pub mod freelie;
pub mod graded;
pub mod inversion;
pub mod morphism;
pub mod pushforward;
pub mod quillen;
pub mod randomgen;
pub mod scalar;
pub mod selftest;
pub mod solve;
pub mod transfer;
pub mod words;

pub use error::Error;
pub use scalar::{LinComb, Q};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
