//! Generalized (α, β, δ) Beta-splitting random trees.
//!
//! This crate implements an incremental evolutionary construction of rooted
//! binary trees in which each split divides a leaf's "speciation potential"
//! (an interval of `[0,1]`) at a Beta(α+1, β+1)-distributed fraction, and
//! leaves may additionally freeze (go extinct) with probability δ per event.
//!
//! The main pieces:
//!
//! - [`generate`] — the discrete-time generating / organizing / deleting
//!   processes that grow a ranked planar tree step by step.
//! - [`continuous`] — the continuous-time version with exponential waiting
//!   times and branch lengths, equivalent in law to the discrete process on
//!   effective events.
//! - [`trees`] — the four tree resolutions (ranked planar, unranked planar,
//!   ranked non-planar, unranked non-planar), the projections between them,
//!   combinatorial counts, the permutation bijection, and Newick/JSON I/O.
//! - [`probability`] — exact log-space probabilities of any tree at all four
//!   resolutions, closed forms for combs and fully balanced trees at
//!   β ∈ {−1, 0, +∞}, and the split distribution of the recursive
//!   Beta-splitting construction.
//! - [`reversal`] — the backward transition kernel on unranked planar trees
//!   and its consistency identity.
//! - [`oracle`] — brute-force ground truth: exhaustive enumeration, exact
//!   distributions, numerical quadrature, and goodness-of-fit tests.
//!
//! All probabilities are carried in natural-log space end to end
//! ([`LogProb`]); the probabilities involved reach 10^-157057 for the tree
//! sizes handled by the closed forms.
//!
//! The numeric kernel in [`numerics`] is generic over the scalar type via
//! `num-traits`; the tree-building processes and their serialized formats fix
//! the scalar to [`Real`].

pub mod continuous;
pub mod generate;
pub mod numerics;
pub mod oracle;
pub mod probability;
pub mod reversal;
pub mod trees;

mod arena;
mod error;

pub use error::{Error, Result};

/// Scalar type used by the tree-building processes and probability outputs.
pub type Real = f64;

/// Log-scale probability backed by [`Real`].
pub type LogProb = numerics::LogReal<Real>;
