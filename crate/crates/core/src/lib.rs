//! Finite-state selection over shift spaces.
//!
//! The crate provides deterministic automata and selectors, Markov and Parry
//! measures, compatibility checks between selectors and the support of a
//! Markov measure, the Markov chains induced by automata (including the
//! snake chains of length-`n` runs), brute-force enumeration oracles for the
//! run-counting bounds, and reproducible sequence generators with
//! block-frequency statistics. [`experiment`] ties these together: it feeds
//! a generated sequence through a selector and measures how far the output
//! block frequencies are from the target measure.

pub mod alphabet;
pub mod automata;
pub mod chain;
pub mod compatibility;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod format;
mod graph;
pub mod measures;
pub mod oracles;
pub mod seqgen;

pub use alphabet::{Alphabet, Symbol, Word};
pub use automata::{Action, Automaton, Machine, Run, Selector, StateId};
pub use error::{Error, Result};
pub use measures::{MarkovMeasure, SftSpec};
