#![allow(dead_code)]

use fsel_core::automata::{Action, Selector};
use fsel_core::measures::{MarkovMeasure, StochasticMatrix};
use fsel_core::{Alphabet, Word};
use proptest::prelude::*;

pub fn alphabet(k: usize) -> Alphabet {
    Alphabet::digits(k)
}

fn build(k: usize, n: usize, cells: Vec<Option<(usize, bool)>>) -> Selector {
    let states = (0..n).map(|i| format!("s{i}")).collect();
    let transitions = cells.into_iter().enumerate().filter_map(|(i, c)| {
        c.map(|(q, keep)| {
            let action = if keep { Action::Keep } else { Action::Drop };
            (i / k, i % k, action, q)
        })
    });
    Selector::new(alphabet(k), states, 0, transitions).expect("valid selector")
}

/// Complete selectors with up to `max_states` states over 2 or 3 symbols.
pub fn complete_selector(max_states: usize) -> impl Strategy<Value = Selector> {
    (2usize..=3, 1usize..=max_states).prop_flat_map(|(k, n)| {
        prop::collection::vec((0..n, any::<bool>()).prop_map(Some), n * k)
            .prop_map(move |cells| build(k, n, cells))
    })
}

/// Selectors whose transitions may be missing.
pub fn partial_selector(max_states: usize) -> impl Strategy<Value = Selector> {
    (2usize..=3, 1usize..=max_states).prop_flat_map(|(k, n)| {
        prop::collection::vec(prop::option::weighted(0.8, (0..n, any::<bool>())), n * k)
            .prop_map(move |cells| build(k, n, cells))
    })
}

/// Oblivious complete selectors: one action per state.
pub fn oblivious_selector(max_states: usize) -> impl Strategy<Value = Selector> {
    (2usize..=3, 1usize..=max_states).prop_flat_map(|(k, n)| {
        (
            prop::collection::vec(0..n, n * k),
            prop::collection::vec(any::<bool>(), n),
        )
            .prop_map(move |(targets, keeps)| {
                let cells = targets
                    .into_iter()
                    .enumerate()
                    .map(|(i, q)| Some((q, keeps[i / k])))
                    .collect();
                build(k, n, cells)
            })
    })
}

pub fn word(k: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0..k, 0..=max_len)
}

/// Markov measures with positive rows over 2 to 4 symbols; some entries are
/// zeroed when the row keeps another positive entry.
pub fn markov_measure() -> impl Strategy<Value = MarkovMeasure> {
    (2usize..=4).prop_flat_map(|k| {
        prop::collection::vec((0.05f64..1.0, prop::bool::weighted(0.2)), k * k).prop_map(
            move |cells| {
                let mut rows: Vec<Vec<f64>> = cells
                    .chunks(k)
                    .map(|c| {
                        c.iter()
                            .map(|&(x, zero)| if zero { 0.0 } else { x })
                            .collect()
                    })
                    .collect();
                // Keep the diagonal-successor entry so the chain stays
                // irreducible.
                for (i, row) in rows.iter_mut().enumerate() {
                    if row[(i + 1) % k] == 0.0 {
                        row[(i + 1) % k] = 0.5;
                    }
                    let s: f64 = row.iter().sum();
                    row.iter_mut().for_each(|x| *x /= s);
                }
                let p = StochasticMatrix::from_rows(&rows).expect("stochastic");
                MarkovMeasure::from_transition_matrix(alphabet(k), p).expect("irreducible")
            },
        )
    })
}
