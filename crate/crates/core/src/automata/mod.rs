//! Deterministic automata and selectors.
//!
//! An [`Automaton`] is a partial transition function `Q × A → Q`. A
//! [`Selector`] decorates every transition of an automaton with an
//! [`Action`]: `Keep` copies the symbol read to the output, `Drop` emits
//! nothing. Partial transition functions are first-class, since machines
//! compatible with a shift only read the steps the shift allows.

mod scc;
mod snake;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::alphabet::{Alphabet, Symbol, Word};
use crate::error::{Error, Result};

pub use scc::{scc_decomposition, SccReport};
pub use snake::{snake_automaton, SnakeAutomaton};

/// Index of a state in declaration order.
pub type StateId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    /// Type I: output the symbol read.
    Keep,
    /// Type II: output the empty word.
    Drop,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Keep => "keep",
            Action::Drop => "drop",
        }
    }
}

/// Read access shared by automata and selectors.
pub trait Machine {
    fn alphabet(&self) -> &Alphabet;
    fn state_names(&self) -> &[String];
    fn initial(&self) -> StateId;
    /// `p·a`, if the transition exists.
    fn target(&self, p: StateId, a: Symbol) -> Option<StateId>;
    /// Whether the transition on `a` from `p` copies `a` to the output.
    fn emits(&self, _p: StateId, _a: Symbol) -> bool {
        false
    }

    fn num_states(&self) -> usize {
        self.state_names().len()
    }

    fn state_name(&self, p: StateId) -> &str {
        &self.state_names()[p]
    }

    fn state_index(&self, name: &str) -> Result<StateId> {
        self.state_names()
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }

    /// All transitions `(p, a, q)` in state-then-symbol order.
    fn transitions(&self) -> Vec<(StateId, Symbol, StateId)> {
        let k = self.alphabet().len();
        (0..self.num_states())
            .flat_map(|p| (0..k).filter_map(move |a| self.target(p, a).map(|q| (p, a, q))))
            .collect()
    }

    /// Successor lists (with multiplicity removed).
    fn adjacency(&self) -> Vec<Vec<StateId>> {
        let mut adj = vec![Vec::new(); self.num_states()];
        for (p, _, q) in self.transitions() {
            if !adj[p].contains(&q) {
                adj[p].push(q);
            }
        }
        adj
    }

    /// The end state `p·u`, or `None` if the run falls off the partial map.
    fn end_state(&self, p: StateId, u: &[Symbol]) -> Option<StateId> {
        u.iter().try_fold(p, |q, &a| self.target(q, a))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    /// Row-major `#Q × #A`.
    delta: Vec<Option<StateId>>,
    trim: bool,
}

impl Automaton {
    pub fn new<I>(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        transitions: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (StateId, Symbol, StateId)>,
    {
        check_states(&states, initial)?;
        let k = alphabet.len();
        let mut delta = vec![None; states.len() * k];
        for (p, a, q) in transitions {
            if p >= states.len() || q >= states.len() || a >= k {
                return Err(Error::Validation(format!(
                    "transition ({p}, {a}, {q}) out of range"
                )));
            }
            if delta[p * k + a].replace(q).is_some() {
                return Err(Error::DuplicateTransition {
                    state: states[p].clone(),
                    symbol: alphabet.token(a).to_string(),
                });
            }
        }
        let mut automaton = Automaton {
            alphabet,
            states,
            initial,
            delta,
            trim: false,
        };
        automaton.trim = automaton.compute_trim();
        Ok(automaton)
    }

    /// Builds an automaton from state and symbol tokens.
    pub fn from_names(
        alphabet: Alphabet,
        states: &[&str],
        initial: &str,
        transitions: &[(&str, &str, &str)],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let lookup = name_lookup(&states);
        let initial = lookup(initial)?;
        let transitions = transitions
            .iter()
            .map(|&(p, a, q)| Ok((lookup(p)?, alphabet.index_of(a)?, lookup(q)?)))
            .collect::<Result<Vec<_>>>()?;
        drop(lookup);
        Automaton::new(alphabet, states, initial, transitions)
    }

    /// Whether every state is reachable from the initial state and lies on
    /// some infinite run. Computed once at construction; it is reported, not
    /// enforced.
    pub fn is_trim(&self) -> bool {
        self.trim
    }

    fn compute_trim(&self) -> bool {
        let adj = self.adjacency();
        let reachable = crate::graph::reachable(&adj, self.initial);
        if reachable.iter().any(|r| !r) {
            return false;
        }
        // Peel states with no successor among the survivors; what remains
        // has an infinite continuation.
        let mut alive = vec![true; self.states.len()];
        loop {
            let mut changed = false;
            for p in 0..alive.len() {
                if alive[p] && !adj[p].iter().any(|&q| alive[q]) {
                    alive[p] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        alive.iter().all(|&a| a)
    }

    /// Fails with the first missing `(state, symbol)` pair.
    pub fn check_complete(&self) -> Result<()> {
        let k = self.alphabet.len();
        match self.delta.iter().position(Option::is_none) {
            None => Ok(()),
            Some(i) => Err(Error::Incomplete {
                state: self.states[i / k].clone(),
                symbol: self.alphabet.token(i % k).to_string(),
            }),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.delta.iter().all(Option::is_some)
    }
}

impl Machine for Automaton {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn state_names(&self) -> &[String] {
        &self.states
    }

    fn initial(&self) -> StateId {
        self.initial
    }

    #[inline]
    fn target(&self, p: StateId, a: Symbol) -> Option<StateId> {
        self.delta[p * self.alphabet.len() + a]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selector {
    automaton: Automaton,
    /// Parallel to the automaton's transition table; `Drop` where undefined.
    actions: Vec<Action>,
}

impl Selector {
    pub fn new<I>(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        transitions: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (StateId, Symbol, Action, StateId)>,
    {
        let transitions: Vec<_> = transitions.into_iter().collect();
        let k = alphabet.len();
        let automaton = Automaton::new(
            alphabet,
            states,
            initial,
            transitions.iter().map(|&(p, a, _, q)| (p, a, q)),
        )?;
        let mut actions = vec![Action::Drop; automaton.delta.len()];
        for &(p, a, action, _) in &transitions {
            actions[p * k + a] = action;
        }
        Ok(Selector { automaton, actions })
    }

    pub fn from_names(
        alphabet: Alphabet,
        states: &[&str],
        initial: &str,
        transitions: &[(&str, &str, Action, &str)],
    ) -> Result<Self> {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let lookup = name_lookup(&states);
        let initial = lookup(initial)?;
        let transitions = transitions
            .iter()
            .map(|&(p, a, act, q)| Ok((lookup(p)?, alphabet.index_of(a)?, act, lookup(q)?)))
            .collect::<Result<Vec<_>>>()?;
        drop(lookup);
        Selector::new(alphabet, states, initial, transitions)
    }

    /// The automaton obtained by removing outputs.
    pub fn underlying(&self) -> &Automaton {
        &self.automaton
    }

    pub fn action(&self, p: StateId, a: Symbol) -> Option<Action> {
        self.automaton
            .target(p, a)
            .map(|_| self.actions[p * self.automaton.alphabet.len() + a])
    }

    /// All transitions with their actions.
    pub fn labelled_transitions(&self) -> Vec<(StateId, Symbol, Action, StateId)> {
        self.automaton
            .transitions()
            .into_iter()
            .map(|(p, a, q)| (p, a, self.actions[p * self.automaton.alphabet.len() + a], q))
            .collect()
    }

    /// The common action of the transitions leaving `p`; `None` when `p` has
    /// no outgoing transition or mixes both actions.
    pub fn state_action(&self, p: StateId) -> Option<Action> {
        let mut actions = (0..self.automaton.alphabet.len()).filter_map(|a| self.action(p, a));
        let first = actions.next()?;
        actions.all(|x| x == first).then_some(first)
    }

    /// A state whose outgoing transitions mix `Keep` and `Drop`, if any.
    pub fn oblivious_violation(&self) -> Option<StateId> {
        (0..self.num_states()).find(|&p| {
            let mut actions = (0..self.automaton.alphabet.len()).filter_map(|a| self.action(p, a));
            match actions.next() {
                Some(first) => actions.any(|x| x != first),
                None => false,
            }
        })
    }

    pub fn is_oblivious(&self) -> bool {
        self.oblivious_violation().is_none()
    }

    pub fn check_oblivious(&self) -> Result<()> {
        match self.oblivious_violation() {
            None => Ok(()),
            Some(p) => Err(Error::NotOblivious {
                state: self.state_name(p).to_string(),
            }),
        }
    }

    /// Starts a resumable streaming run from the initial state.
    pub fn cursor(&self) -> SelectorCursor<'_> {
        SelectorCursor {
            selector: self,
            state: self.initial(),
            consumed: 0,
        }
    }
}

impl Machine for Selector {
    fn alphabet(&self) -> &Alphabet {
        &self.automaton.alphabet
    }

    fn state_names(&self) -> &[String] {
        &self.automaton.states
    }

    fn initial(&self) -> StateId {
        self.automaton.initial
    }

    #[inline]
    fn target(&self, p: StateId, a: Symbol) -> Option<StateId> {
        self.automaton.target(p, a)
    }

    #[inline]
    fn emits(&self, p: StateId, a: Symbol) -> bool {
        self.actions[p * self.automaton.alphabet.len() + a] == Action::Keep
    }
}

fn check_states(states: &[String], initial: StateId) -> Result<()> {
    if states.is_empty() {
        return Err(Error::Validation("machine has no states".into()));
    }
    if initial >= states.len() {
        return Err(Error::Validation(format!(
            "initial state {initial} out of range"
        )));
    }
    let mut seen = BTreeSet::new();
    for s in states {
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(Error::Validation(format!("bad state name `{s}`")));
        }
        if !seen.insert(s.as_str()) {
            return Err(Error::Validation(format!("duplicate state `{s}`")));
        }
    }
    Ok(())
}

fn name_lookup(states: &[String]) -> impl Fn(&str) -> Result<StateId> + '_ {
    let index: HashMap<&str, StateId> = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    move |name| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownState(name.to_string()))
    }
}

/// A finite run `p * u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub start: StateId,
    pub input: Word,
    pub output: Word,
    /// Occurrences of each state as the source of a transition; sums to
    /// `|input|`.
    pub visits: BTreeMap<StateId, u64>,
    pub end: StateId,
}

/// Runs `machine` from `p` on `u`. Automata have empty output.
pub fn run_word<M: Machine + ?Sized>(machine: &M, p: StateId, u: &[Symbol]) -> Result<Run> {
    if p >= machine.num_states() {
        return Err(Error::UnknownState(p.to_string()));
    }
    let k = machine.alphabet().len();
    let mut state = p;
    let mut output = Vec::new();
    let mut visits = BTreeMap::new();
    for (i, &a) in u.iter().enumerate() {
        if a >= k {
            return Err(Error::UnknownSymbol(a.to_string()));
        }
        let next = machine
            .target(state, a)
            .ok_or_else(|| undefined(machine, state, a, i as u64 + 1))?;
        *visits.entry(state).or_insert(0) += 1;
        if machine.emits(state, a) {
            output.push(a);
        }
        state = next;
    }
    Ok(Run {
        start: p,
        input: u.to_vec(),
        output,
        visits,
        end: state,
    })
}

fn undefined<M: Machine + ?Sized>(m: &M, p: StateId, a: Symbol, position: u64) -> Error {
    Error::UndefinedTransition {
        state: m.state_name(p).to_string(),
        symbol: m.alphabet().token(a).to_string(),
        position: Some(position),
    }
}

/// Single-owner streaming state of a selector over an input stream.
#[derive(Debug, Clone)]
pub struct SelectorCursor<'s> {
    selector: &'s Selector,
    state: StateId,
    consumed: u64,
}

impl SelectorCursor<'_> {
    /// Consumes one input symbol and returns the emitted symbol, if any.
    #[inline]
    pub fn feed(&mut self, a: Symbol) -> Result<Option<Symbol>> {
        let s = self.selector;
        if a >= s.alphabet().len() {
            return Err(Error::UnknownSymbol(a.to_string()));
        }
        let next = s
            .target(self.state, a)
            .ok_or_else(|| undefined(s, self.state, a, self.consumed + 1))?;
        let out = s.emits(self.state, a).then_some(a);
        self.state = next;
        self.consumed += 1;
        Ok(out)
    }

    pub fn state(&self) -> StateId {
        self.state
    }

    /// Number of input symbols consumed so far.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }
}

/// Lazily applies `selector` to `input`, yielding the kept symbols. Iteration
/// stops after the first error.
pub fn apply_selector<I>(selector: &Selector, input: I) -> SelectorStream<'_, I::IntoIter>
where
    I: IntoIterator<Item = Symbol>,
{
    SelectorStream {
        cursor: selector.cursor(),
        input: input.into_iter(),
        failed: false,
    }
}

pub struct SelectorStream<'s, I> {
    cursor: SelectorCursor<'s>,
    input: I,
    failed: bool,
}

impl<I> SelectorStream<'_, I> {
    pub fn cursor(&self) -> &SelectorCursor<'_> {
        &self.cursor
    }
}

impl<I: Iterator<Item = Symbol>> Iterator for SelectorStream<'_, I> {
    type Item = Result<Symbol>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        for a in self.input.by_ref() {
            match self.cursor.feed(a) {
                Ok(Some(b)) => return Some(Ok(b)),
                Ok(None) => {}
                Err(e) => {
                    self.failed = true;
                    return Some(Err(e));
                }
            }
        }
        None
    }
}

/// The oblivious selector performing prefix selection by the language of
/// `dfa` with the given accepting states.
pub fn dfa_to_selector(dfa: &Automaton, accepting: &BTreeSet<StateId>) -> Selector {
    let k = dfa.alphabet.len();
    let actions = (0..dfa.delta.len())
        .map(|i| {
            if accepting.contains(&(i / k)) && dfa.delta[i].is_some() {
                Action::Keep
            } else {
                Action::Drop
            }
        })
        .collect();
    Selector {
        automaton: dfa.clone(),
        actions,
    }
}

/// Inverse of [`dfa_to_selector`]: accepting states are those whose outgoing
/// transitions keep.
pub fn selector_to_dfa(selector: &Selector) -> Result<(Automaton, BTreeSet<StateId>)> {
    selector.check_oblivious()?;
    let accepting = (0..selector.num_states())
        .filter(|&p| selector.state_action(p) == Some(Action::Keep))
        .collect();
    Ok((selector.automaton.clone(), accepting))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn word(s: &str) -> Word {
        Alphabet::binary().parse_word(s).unwrap()
    }

    #[test]
    fn fig2_run() {
        let s = fixtures::fig2();
        let run = run_word(&s, 0, &word("01101")).unwrap();
        assert_eq!(run.output, word("10"));
        assert_eq!(s.state_name(run.end), "q1");
        assert_eq!(run.visits.values().sum::<u64>(), 5);
    }

    #[test]
    fn fig1_run() {
        let s = fixtures::fig1();
        let run = run_word(&s, 0, &word("0110")).unwrap();
        assert_eq!(run.output, word("01"));
        assert_eq!(s.state_name(run.end), "q2");
    }

    #[test]
    fn empty_run() {
        let s = fixtures::fig1();
        let run = run_word(&s, 2, &[]).unwrap();
        assert!(run.output.is_empty());
        assert_eq!(run.end, 2);
        assert!(run.visits.is_empty());
    }

    #[test]
    fn undefined_transition_reports_position() {
        let a = Automaton::from_names(Alphabet::binary(), &["q"], "q", &[("q", "0", "q")]).unwrap();
        match run_word(&a, 0, &word("001")) {
            Err(Error::UndefinedTransition { position, .. }) => assert_eq!(position, Some(3)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            run_word(&a, 0, &[7]),
            Err(Error::UnknownSymbol(_))
        ));
    }

    #[test]
    fn duplicate_transition_rejected() {
        let r = Automaton::from_names(
            Alphabet::binary(),
            &["q"],
            "q",
            &[("q", "0", "q"), ("q", "0", "q")],
        );
        assert!(matches!(r, Err(Error::DuplicateTransition { .. })));
    }

    #[test]
    fn streaming_matches_batch_on_fig2() {
        let s = fixtures::fig2();
        let out: Vec<_> = apply_selector(&s, word("01101"))
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(out, word("10"));
    }

    #[test]
    fn streaming_error_is_one_based() {
        let s = Selector::from_names(
            Alphabet::binary(),
            &["q"],
            "q",
            &[("q", "0", Action::Keep, "q")],
        )
        .unwrap();
        let results: Vec<_> = apply_selector(&s, word("0010")).collect();
        assert_eq!(results.len(), 3);
        match &results[2] {
            Err(Error::UndefinedTransition { position, .. }) => assert_eq!(*position, Some(3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn identity_and_null_selectors() {
        let x = word("0110100111");
        let keep = fixtures::constant_selector(Alphabet::binary(), Action::Keep);
        let drop = fixtures::constant_selector(Alphabet::binary(), Action::Drop);
        let out: Vec<_> = apply_selector(&keep, x.clone())
            .map(Result::unwrap)
            .collect();
        assert_eq!(out, x);
        assert_eq!(apply_selector(&drop, x).count(), 0);
    }

    #[test]
    fn obliviousness() {
        let fig1 = fixtures::fig1();
        assert_eq!(
            fig1.oblivious_violation().map(|p| fig1.state_name(p)),
            Some("q1")
        );
        assert!(fixtures::fig2().is_oblivious());
        assert!(fixtures::constant_selector(Alphabet::binary(), Action::Keep).is_oblivious());
        assert!(fixtures::fig3().is_oblivious());
    }

    #[test]
    fn dfa_for_words_ending_in_one_is_fig2() {
        let dfa = Automaton::from_names(
            Alphabet::binary(),
            &["q0", "q1"],
            "q0",
            &[
                ("q0", "0", "q0"),
                ("q0", "1", "q1"),
                ("q1", "0", "q0"),
                ("q1", "1", "q1"),
            ],
        )
        .unwrap();
        let sel = dfa_to_selector(&dfa, &BTreeSet::from([1]));
        assert_eq!(sel, fixtures::fig2());

        let all = dfa_to_selector(&dfa, &BTreeSet::from([0, 1]));
        assert!(all
            .labelled_transitions()
            .iter()
            .all(|t| t.2 == Action::Keep));
        let none = dfa_to_selector(&dfa, &BTreeSet::new());
        assert!(none
            .labelled_transitions()
            .iter()
            .all(|t| t.2 == Action::Drop));
    }

    #[test]
    fn selector_to_dfa_reads_accepting_states() {
        let (dfa, acc) = selector_to_dfa(&fixtures::fig2()).unwrap();
        assert_eq!(acc, BTreeSet::from([1]));
        assert_eq!(&dfa, fixtures::fig2().underlying());

        let keep = fixtures::constant_selector(Alphabet::binary(), Action::Keep);
        assert_eq!(selector_to_dfa(&keep).unwrap().1, BTreeSet::from([0]));

        assert!(matches!(
            selector_to_dfa(&fixtures::fig1()),
            Err(Error::NotOblivious { state }) if state == "q1"
        ));
    }

    #[test]
    fn trimness_flag() {
        assert!(fixtures::fig1().underlying().is_trim());
        assert!(fixtures::fig3_full().underlying().is_trim());
        // 010 is only entered through a step the golden-mean shift forbids.
        assert!(!fixtures::fig3().underlying().is_trim());
    }
}
