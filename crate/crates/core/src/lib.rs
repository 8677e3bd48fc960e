//! Exact computation with order- and orientation-preserving transformations
//! on chains.
//!
//! Two chains are supported: the finite chain `{1 < 2 < … < n}` and the full
//! rational line ℚ. On finite chains, partial transformations are explicit
//! tables and every structural question (class membership, ideals, regularity,
//! Green's relations) can be answered both by a decision procedure and by an
//! independent brute-force oracle. On ℚ, transformations are finite lists of
//! (interval, Möbius-or-constant) pieces in exact rational arithmetic, and the
//! same decision procedures run symbolically.
//!
//! The [`suites`] module registers the verification suites that cross-check
//! every decision procedure against the oracles; the `chainmorph` CLI exposes
//! both the operations and the suites.

pub mod chain;
pub mod enumerate;
pub mod finite;
pub mod green;
pub mod regularity;
pub mod suites;
pub mod symbolic;

pub use chain::{ExtRat, FiniteChain, IntervalUnion, QInterval, Rat, Signature};
pub use finite::{ClassTag, IdealSet, PartialMap};
