use std::collections::HashMap;

use super::{Automaton, Machine, StateId};
use crate::alphabet::Word;
use crate::error::{Error, Result};

/// Largest number of candidate `(state, word)` pairs the construction will
/// examine.
const MAX_SNAKE_PAIRS: u128 = 1 << 24;

/// The automaton `A^n` whose states are the realizable runs `p * w`, `|w| = n`.
#[derive(Debug, Clone)]
pub struct SnakeAutomaton {
    pub automaton: Automaton,
    /// `runs[s] = (p, w)` for snake state `s`.
    pub runs: Vec<(StateId, Word)>,
    pub n: usize,
}

impl SnakeAutomaton {
    pub fn index_of(&self, p: StateId, w: &[usize]) -> Option<StateId> {
        self.runs.iter().position(|(q, v)| *q == p && v == w)
    }
}

/// Reading `a` in `p * bw` moves to `(p·b) * wa`. Only pairs whose run
/// exists are materialized. The initial snake state is the first one (in
/// state, then lexicographic, order) whose run starts at the initial state.
pub fn snake_automaton<M: Machine + ?Sized>(machine: &M, n: usize) -> Result<SnakeAutomaton> {
    if n == 0 {
        return Err(Error::Validation("snake length must be positive".into()));
    }
    let alphabet = machine.alphabet();
    let pairs = alphabet
        .count_words(n)
        .and_then(|c| c.checked_mul(machine.num_states() as u128))
        .filter(|&c| c <= MAX_SNAKE_PAIRS)
        .ok_or(Error::CapExceeded {
            requested: u128::MAX,
            cap: MAX_SNAKE_PAIRS,
        })?;
    let mut runs = Vec::new();
    let mut index: HashMap<(StateId, Word), StateId> = HashMap::with_capacity(pairs as usize);
    for p in 0..machine.num_states() {
        for w in alphabet.words(n) {
            if machine.end_state(p, &w).is_some() {
                index.insert((p, w.clone()), runs.len());
                runs.push((p, w));
            }
        }
    }
    if runs.is_empty() {
        return Err(Error::Validation(format!(
            "machine has no run of length {n}"
        )));
    }
    let mut transitions = Vec::new();
    for (s, (p, w)) in runs.iter().enumerate() {
        let q = machine.target(*p, w[0]).expect("realizable run");
        let mut next: Word = w[1..].to_vec();
        next.push(0);
        for a in 0..alphabet.len() {
            next[n - 1] = a;
            if let Some(&t) = index.get(&(q, next.clone())) {
                transitions.push((s, a, t));
            }
        }
    }
    let names = runs
        .iter()
        .map(|(p, w)| {
            let sep = if alphabet.is_single_char() { "" } else { "." };
            let word: Vec<&str> = w.iter().map(|&a| alphabet.token(a)).collect();
            format!("{}*{}", machine.state_name(*p), word.join(sep))
        })
        .collect();
    let initial = runs
        .iter()
        .position(|(p, _)| *p == machine.initial())
        .unwrap_or(0);
    let automaton = Automaton::new(alphabet.clone(), names, initial, transitions)?;
    Ok(SnakeAutomaton { automaton, runs, n })
}
