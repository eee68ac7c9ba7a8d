//! Exact enumeration of parabolic double cosets in the symmetric group.
//!
//! The library computes `p_n`, the number of parabolic double cosets of
//! `S_n` (equivalently, the number of maximal two-way contingency tables
//! with entry sum `n`), through an exact big-integer pipeline:
//!
//! 1. [`triangles`] — binomial, Stirling and central-factorial triangles;
//! 2. [`fubini`] — generalized Fubini numbers `f_{n,k}` and the
//!    convolution `g_{n,c}`;
//! 3. [`chains`] — signed chain weights `h_{t,c}`, by two independent
//!    routes;
//! 4. [`engine`] — assembly of `q_n` and `p_n`, in a dense mode and a
//!    low-memory streaming mode with checkpointing;
//! 5. [`oracle`] — brute-force enumeration of contingency tables and
//!    weak-order pairs, used as ground truth at small `n`;
//! 6. [`analysis`] — high-precision ratio/asymptotics diagnostics and a
//!    congruence checker.
//!
//! Everything the pipeline asserts is computed in exact integer or
//! fixed-precision decimal arithmetic; hardware floats are never used.

pub mod analysis;
pub mod arith;
pub mod chains;
pub mod engine;
pub mod fubini;
pub mod oracle;
pub mod results;
pub mod triangles;
