//! Bounded semantics for countably-infinitary formulas over finite
//! structures: a fragment/bound calculus, bounded satisfaction, compilation
//! to plain first-order sentences, and checkers for sequence families.

pub mod bounded;
pub mod bounds;
pub mod cli;
pub mod fragments;
pub mod logic;
pub mod structures;
