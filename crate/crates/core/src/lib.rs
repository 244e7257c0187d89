//! Conjugacy invariants and strong shift equivalence search for shifts of
//! finite type presented by small nonnegative integer matrices.

pub mod intmat;
pub mod quadorder;
pub mod perron;
pub mod invariants;
pub mod sse;
pub mod census;
pub mod cli;
