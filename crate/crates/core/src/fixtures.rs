//! Bundled example machines and measures.

use crate::alphabet::Alphabet;
use crate::automata::{Action, Selector};
use crate::format::{parse_matrix, parse_selector, SelectorFile};
use crate::measures::{parry_measure, MarkovMeasure, SftSpec};

pub const FIG1_SEL: &str = include_str!("../fixtures/fig1.sel");
pub const FIG2_SEL: &str = include_str!("../fixtures/fig2.sel");
pub const FIG3_SEL: &str = include_str!("../fixtures/fig3.sel");
pub const FIG3_FULL_SEL: &str = include_str!("../fixtures/fig3_full.sel");
pub const GOLDEN_MAT: &str = include_str!("../fixtures/golden.mat");
pub const GOLDEN_MSR: &str = include_str!("../fixtures/golden.msr");
pub const FULL_MAT: &str = include_str!("../fixtures/full.mat");
pub const UNIFORM_MSR: &str = include_str!("../fixtures/uniform.msr");

/// Three-state selector mixing keep and drop at `q1`.
pub fn fig1() -> Selector {
    parse_selector(FIG1_SEL).expect("bundled fixture").selector
}

/// Two-state oblivious selector keeping the symbols that follow a 1.
pub fn fig2() -> Selector {
    parse_selector(FIG2_SEL).expect("bundled fixture").selector
}

/// Golden-mean compatible selector, forbidden steps omitted.
pub fn fig3() -> Selector {
    fig3_file().selector
}

/// [`fig3`] together with its `iota` declaration.
pub fn fig3_file() -> SelectorFile {
    parse_selector(FIG3_SEL).expect("bundled fixture")
}

/// Golden-mean selector including the steps that read 11.
pub fn fig3_full() -> Selector {
    parse_selector(FIG3_FULL_SEL)
        .expect("bundled fixture")
        .selector
}

pub fn golden_sft() -> SftSpec {
    parse_matrix(GOLDEN_MAT).expect("bundled fixture")
}

/// Parry measure of the golden-mean shift, computed from its matrix.
pub fn golden_parry() -> MarkovMeasure {
    parry_measure(&golden_sft())
        .expect("golden mean is irreducible")
        .measure
}

pub fn uniform_binary() -> MarkovMeasure {
    MarkovMeasure::uniform(Alphabet::binary())
}

/// One state, every transition with the same action.
pub fn constant_selector(alphabet: Alphabet, action: Action) -> Selector {
    let k = alphabet.len();
    Selector::new(
        alphabet,
        vec!["q".into()],
        0,
        (0..k).map(|a| (0, a, action, 0)),
    )
    .expect("valid selector")
}
