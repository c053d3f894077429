//! Rainbow matchings in families of bipartite matchings.
//!
//! A family of n matchings F_1..F_n ("colors") in a bipartite graph has a
//! *rainbow matching* when one can pick pairwise disjoint edges from some of
//! the colors; the rainbow matching is *full* when every color contributes.
//! This crate provides:
//!
//! * [`family`] — instance types, validation, and the basic set computations;
//! * [`exact`] — an exact maximum-rainbow-matching oracle (ground truth);
//! * [`solver`] — constructive algorithms, including an augmentation machine
//!   that always finds a full rainbow matching once every color class has at
//!   least ceil(3n/2)+1 edges;
//! * [`generators`] — extremal, Latin-square, and random instance factories;
//! * [`harness`] — reproducible conjecture-probing campaigns.

pub mod exact;
pub mod family;
pub mod generators;
pub mod harness;
pub mod solver;

pub use family::{
    check_rainbow_matching, edges_between, free_vertices, is_rainbow_matching, Color, Edge,
    FamilyError, Matching, MatchingFamily, RainbowMatching, RainbowViolation,
};
