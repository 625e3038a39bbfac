//! Exhaustive oracles for the run-counting bounds and a literal
//! implementation of prefix selection.
//!
//! Every check here enumerates runs explicitly. They are slow by design and
//! serve as ground truth for the streaming code paths.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::alphabet::{Symbol, Word};
use crate::automata::{Automaton, Machine, Selector, StateId};
use crate::compatibility::CompatibilityWitness;
use crate::error::{Error, Result};
use crate::measures::MarkovMeasure;

/// Default enumeration cap on `(#A)^n`.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 20;
/// Slack added to measure-valued upper bounds.
pub const MEASURE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumeratedRun {
    pub input: Word,
    pub output: Word,
    pub end: StateId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunEnumeration {
    pub start: StateId,
    pub n: usize,
    /// Realizable runs in lexicographic order of input.
    pub runs: Vec<EnumeratedRun>,
}

fn check_cap<M: Machine + ?Sized>(machine: &M, n: usize, cap: u128) -> Result<()> {
    match machine.alphabet().count_words(n) {
        Some(c) if c <= cap => Ok(()),
        requested => Err(Error::CapExceeded {
            requested: requested.unwrap_or(u128::MAX),
            cap,
        }),
    }
}

/// Depth-first walk over realizable length-`n` runs from `p`, in
/// lexicographic order of input.
fn walk<M, F>(machine: &M, p: StateId, n: usize, visit: &mut F)
where
    M: Machine + ?Sized,
    F: FnMut(&[Symbol], &[Symbol], StateId),
{
    fn go<M, F>(
        machine: &M,
        q: StateId,
        remaining: usize,
        input: &mut Word,
        output: &mut Word,
        visit: &mut F,
    ) where
        M: Machine + ?Sized,
        F: FnMut(&[Symbol], &[Symbol], StateId),
    {
        if remaining == 0 {
            visit(input, output, q);
            return;
        }
        for a in 0..machine.alphabet().len() {
            let Some(r) = machine.target(q, a) else {
                continue;
            };
            let emits = machine.emits(q, a);
            input.push(a);
            if emits {
                output.push(a);
            }
            go(machine, r, remaining - 1, input, output, visit);
            input.pop();
            if emits {
                output.pop();
            }
        }
    }
    go(machine, p, n, &mut Vec::new(), &mut Vec::new(), visit);
}

/// All realizable runs of length `n` from `p`.
pub fn enumerate_runs<M: Machine + ?Sized>(
    machine: &M,
    p: StateId,
    n: usize,
    cap: u128,
) -> Result<RunEnumeration> {
    check_cap(machine, n, cap)?;
    let mut runs = Vec::new();
    walk(machine, p, n, &mut |input, output, end| {
        runs.push(EnumeratedRun {
            input: input.to_vec(),
            output: output.to_vec(),
            end,
        })
    });
    Ok(RunEnumeration { start: p, n, runs })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quantity {
    Count(u128),
    Measure(f64),
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Count(c) => write!(f, "{c}"),
            Quantity::Measure(x) => write!(f, "{x:.15e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LemmaCheckResult {
    pub lemma: &'static str,
    pub state: String,
    pub n: usize,
    pub word: String,
    pub epsilon: Option<f64>,
    pub value: Quantity,
    /// Lower bound, for two-sided checks.
    pub lower: Option<Quantity>,
    pub bound: Quantity,
    pub pass: bool,
}

impl fmt::Display for LemmaCheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "LEMMA {} p={} n={} w={} value={} bound=",
            self.lemma, self.state, self.n, self.word, self.value
        )?;
        match self.lower {
            Some(lo) => write!(f, "[{lo},{}]", self.bound)?,
            None => write!(f, "{}", self.bound)?,
        }
        f.write_str(if self.pass { " PASS" } else { " FAIL" })
    }
}

fn pow(base: usize, exp: usize) -> u128 {
    (base as u128).pow(exp as u32)
}

/// Number of runs from `p` per output prefix of length at most `max_len`.
fn prefix_counts(runs: &RunEnumeration, max_len: usize) -> BTreeMap<Word, u128> {
    let mut counts = BTreeMap::new();
    for run in &runs.runs {
        for len in 0..=run.output.len().min(max_len) {
            *counts.entry(run.output[..len].to_vec()).or_insert(0) += 1;
        }
    }
    counts
}

/// Measure `μ_{ι(p)}(u)` of runs from `p` per output prefix of length at most
/// `max_len`.
fn prefix_measures(
    runs: &RunEnumeration,
    mu: &MarkovMeasure,
    iota: &[Symbol],
    max_len: usize,
) -> BTreeMap<Word, f64> {
    let mut sums = BTreeMap::new();
    for run in &runs.runs {
        let weight = mu.conditional_word_measure(iota[runs.start], &run.input);
        for len in 0..=run.output.len().min(max_len) {
            *sums.entry(run.output[..len].to_vec()).or_insert(0.0) += weight;
        }
    }
    sums
}

fn upper_count_result(
    selector: &Selector,
    p: StateId,
    n: usize,
    w: &[Symbol],
    count: u128,
) -> LemmaCheckResult {
    let bound = pow(selector.alphabet().len(), n - w.len());
    LemmaCheckResult {
        lemma: "upper",
        state: selector.state_name(p).to_string(),
        n,
        word: selector.alphabet().format_word(w),
        epsilon: None,
        value: Quantity::Count(count),
        lower: None,
        bound: Quantity::Count(bound),
        pass: count <= bound,
    }
}

fn upper_measure_result(
    selector: &Selector,
    p: StateId,
    n: usize,
    w: &[Symbol],
    value: f64,
    bound: f64,
) -> LemmaCheckResult {
    LemmaCheckResult {
        lemma: "markov-upper",
        state: selector.state_name(p).to_string(),
        n,
        word: selector.alphabet().format_word(w),
        epsilon: None,
        value: Quantity::Measure(value),
        lower: None,
        bound: Quantity::Measure(bound),
        pass: value <= bound + MEASURE_SLACK,
    }
}

fn check_prefix_length(n: usize, w: &[Symbol]) -> Result<()> {
    if w.len() > n {
        return Err(Error::Validation(format!(
            "prefix length {} exceeds run length {n}",
            w.len()
        )));
    }
    Ok(())
}

fn eta_of(witness: &CompatibilityWitness) -> Result<&[Symbol]> {
    witness
        .eta
        .as_deref()
        .ok_or_else(|| Error::Validation("witness carries no eta labelling".into()))
}

/// Runs from `p` of length `n` whose output starts with `w`, against the
/// bound `(#A)^(n-|w|)`.
pub fn count_output_prefix_runs(
    selector: &Selector,
    p: StateId,
    n: usize,
    w: &[Symbol],
    cap: u128,
) -> Result<LemmaCheckResult> {
    selector.check_oblivious()?;
    check_prefix_length(n, w)?;
    check_cap(selector, n, cap)?;
    let mut count = 0u128;
    walk(selector, p, n, &mut |_, output, _| {
        if output.starts_with(w) {
            count += 1;
        }
    });
    Ok(upper_count_result(selector, p, n, w, count))
}

/// `Σ μ_{ι(p)}(u)` over runs `p * u` of length `n` whose output starts with
/// `w`, against the bound `μ_{η(p)}(w)`.
pub fn measure_output_prefix_runs(
    selector: &Selector,
    mu: &MarkovMeasure,
    witness: &CompatibilityWitness,
    p: StateId,
    n: usize,
    w: &[Symbol],
    cap: u128,
) -> Result<LemmaCheckResult> {
    selector.check_oblivious()?;
    check_prefix_length(n, w)?;
    check_cap(selector, n, cap)?;
    let eta = eta_of(witness)?;
    let mut value = 0.0;
    walk(selector, p, n, &mut |input, output, _| {
        if output.starts_with(w) {
            value += mu.conditional_word_measure(witness.iota[p], input);
        }
    });
    let bound = mu.conditional_word_measure(eta[p], w);
    Ok(upper_measure_result(selector, p, n, w, value, bound))
}

/// The counting bound for every state, every `n ≤ n_max` and every `w` with
/// `|w| ≤ min(n, w_max)`. States mixing both actions are skipped.
pub fn upper_sweep(
    selector: &Selector,
    n_max: usize,
    w_max: usize,
    cap: u128,
) -> Result<Vec<LemmaCheckResult>> {
    let alphabet = selector.alphabet();
    let mut results = Vec::new();
    for p in 0..selector.num_states() {
        let mixed = selector.state_action(p).is_none()
            && (0..alphabet.len()).any(|a| selector.action(p, a).is_some());
        if mixed {
            continue;
        }
        for n in 0..=n_max {
            let runs = enumerate_runs(selector, p, n, cap)?;
            let counts = prefix_counts(&runs, w_max);
            for len in 0..=n.min(w_max) {
                for w in alphabet.words(len) {
                    let count = counts.get(&w).copied().unwrap_or(0);
                    results.push(upper_count_result(selector, p, n, &w, count));
                }
            }
        }
    }
    Ok(results)
}

/// The measure bound for every state, every `n ≤ n_max` and every support
/// word `w` with `|w| ≤ min(n, w_max)`.
pub fn markov_upper_sweep(
    selector: &Selector,
    mu: &MarkovMeasure,
    witness: &CompatibilityWitness,
    n_max: usize,
    w_max: usize,
    cap: u128,
) -> Result<Vec<LemmaCheckResult>> {
    selector.check_oblivious()?;
    let eta = eta_of(witness)?;
    let alphabet = selector.alphabet();
    let mut results = Vec::new();
    for p in 0..selector.num_states() {
        for n in 0..=n_max {
            let runs = enumerate_runs(selector, p, n, cap)?;
            let sums = prefix_measures(&runs, mu, &witness.iota, w_max);
            for len in 0..=n.min(w_max) {
                for w in alphabet.words(len).filter(|w| mu.word_in_support(w)) {
                    let value = sums.get(&w).copied().unwrap_or(0.0);
                    let bound = mu.conditional_word_measure(eta[p], &w);
                    results.push(upper_measure_result(selector, p, n, &w, value, bound));
                }
            }
        }
    }
    Ok(results)
}

/// Input measure for [`equirun_scan`].
#[derive(Debug, Clone, Copy)]
pub enum ScanMode<'a> {
    Uniform,
    Markov {
        measure: &'a MarkovMeasure,
        witness: &'a CompatibilityWitness,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquirunScan {
    /// The least `n` at which every check passed.
    pub witness: Option<usize>,
    /// Checks at the witness `n`, or at `n_max` when none was found.
    pub results: Vec<LemmaCheckResult>,
}

/// Searches `n = k, k+1, …, n_max` for the least `n` at which, for every
/// state `p` and every `w ∈ A^k`, the runs from `p` with output prefix `w`
/// weigh between `(1-ε)·bound` and `bound`.
pub fn equirun_scan(
    selector: &Selector,
    mode: ScanMode<'_>,
    k: usize,
    epsilon: f64,
    n_max: usize,
    cap: u128,
) -> Result<EquirunScan> {
    let scc = crate::automata::scc_decomposition(selector);
    if !scc.is_strongly_connected() {
        return Err(Error::NotStronglyConnected {
            components: scc.components.len(),
        });
    }
    selector.check_oblivious()?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Validation(format!(
            "epsilon {epsilon} outside [0, 1)"
        )));
    }
    let alphabet = selector.alphabet();
    let mut results = Vec::new();
    for n in k..=n_max.max(k) {
        results.clear();
        for p in 0..selector.num_states() {
            let runs = enumerate_runs(selector, p, n, cap)?;
            let state = selector.state_name(p).to_string();
            match mode {
                ScanMode::Uniform => {
                    let counts = prefix_counts(&runs, k);
                    let bound = pow(alphabet.len(), n - k);
                    for w in alphabet.words(k) {
                        let count = counts.get(&w).copied().unwrap_or(0);
                        let lower = (1.0 - epsilon) * bound as f64;
                        results.push(LemmaCheckResult {
                            lemma: "equirun",
                            state: state.clone(),
                            n,
                            word: alphabet.format_word(&w),
                            epsilon: Some(epsilon),
                            value: Quantity::Count(count),
                            lower: Some(Quantity::Measure(lower)),
                            bound: Quantity::Count(bound),
                            pass: count as f64 >= lower && count <= bound,
                        });
                    }
                }
                ScanMode::Markov { measure, witness } => {
                    let eta = eta_of(witness)?;
                    let sums = prefix_measures(&runs, measure, &witness.iota, k);
                    for w in alphabet.words(k) {
                        let value = sums.get(&w).copied().unwrap_or(0.0);
                        let bound = measure.conditional_word_measure(eta[p], &w);
                        let lower = (1.0 - epsilon) * bound;
                        results.push(LemmaCheckResult {
                            lemma: "markov-equirun",
                            state: state.clone(),
                            n,
                            word: alphabet.format_word(&w),
                            epsilon: Some(epsilon),
                            value: Quantity::Measure(value),
                            lower: Some(Quantity::Measure(lower)),
                            bound: Quantity::Measure(bound),
                            pass: value >= lower - MEASURE_SLACK && value <= bound + MEASURE_SLACK,
                        });
                    }
                }
            }
        }
        if results.iter().all(|r| r.pass) {
            return Ok(EquirunScan {
                witness: Some(n),
                results,
            });
        }
    }
    Ok(EquirunScan {
        witness: None,
        results,
    })
}

/// Outputs `x[i]` for every `i` such that the DFA, restarted from its
/// initial state, accepts `x[..i]`.
pub fn brute_force_prefix_selection(
    x: &[Symbol],
    dfa: &Automaton,
    accepting: &BTreeSet<StateId>,
) -> Word {
    (0..x.len())
        .filter(|&i| {
            dfa.end_state(dfa.initial(), &x[..i])
                .is_some_and(|q| accepting.contains(&q))
        })
        .map(|i| x[i])
        .collect()
}

/// Parameters shared by the registered lemma checks.
#[derive(Debug, Clone, Copy)]
pub struct LemmaContext<'a> {
    pub selector: &'a Selector,
    pub markov: Option<(&'a MarkovMeasure, &'a CompatibilityWitness)>,
    pub n_max: usize,
    pub w_max: usize,
    pub k: usize,
    pub epsilon: f64,
    pub cap: u128,
}

impl LemmaContext<'_> {
    fn markov(&self) -> Result<(&MarkovMeasure, &CompatibilityWitness)> {
        self.markov
            .ok_or_else(|| Error::Validation("this check needs a measure".into()))
    }
}

/// A finite-`n` instance of one of the counting bounds.
pub trait LemmaCheck: Sync {
    fn name(&self) -> &'static str;
    fn needs_measure(&self) -> bool;
    fn run(&self, ctx: &LemmaContext<'_>) -> Result<Vec<LemmaCheckResult>>;
}

struct Upper;
struct MarkovUpper;
struct Equirun;
struct MarkovEquirun;

impl LemmaCheck for Upper {
    fn name(&self) -> &'static str {
        "upper"
    }
    fn needs_measure(&self) -> bool {
        false
    }
    fn run(&self, ctx: &LemmaContext<'_>) -> Result<Vec<LemmaCheckResult>> {
        upper_sweep(ctx.selector, ctx.n_max, ctx.w_max, ctx.cap)
    }
}

impl LemmaCheck for MarkovUpper {
    fn name(&self) -> &'static str {
        "markov-upper"
    }
    fn needs_measure(&self) -> bool {
        true
    }
    fn run(&self, ctx: &LemmaContext<'_>) -> Result<Vec<LemmaCheckResult>> {
        let (mu, witness) = ctx.markov()?;
        markov_upper_sweep(ctx.selector, mu, witness, ctx.n_max, ctx.w_max, ctx.cap)
    }
}

fn scan_results(scan: EquirunScan) -> Vec<LemmaCheckResult> {
    scan.results
}

impl LemmaCheck for Equirun {
    fn name(&self) -> &'static str {
        "equirun"
    }
    fn needs_measure(&self) -> bool {
        false
    }
    fn run(&self, ctx: &LemmaContext<'_>) -> Result<Vec<LemmaCheckResult>> {
        equirun_scan(
            ctx.selector,
            ScanMode::Uniform,
            ctx.k,
            ctx.epsilon,
            ctx.n_max,
            ctx.cap,
        )
        .map(scan_results)
    }
}

impl LemmaCheck for MarkovEquirun {
    fn name(&self) -> &'static str {
        "markov-equirun"
    }
    fn needs_measure(&self) -> bool {
        true
    }
    fn run(&self, ctx: &LemmaContext<'_>) -> Result<Vec<LemmaCheckResult>> {
        let (measure, witness) = ctx.markov()?;
        let mode = ScanMode::Markov { measure, witness };
        equirun_scan(ctx.selector, mode, ctx.k, ctx.epsilon, ctx.n_max, ctx.cap).map(scan_results)
    }
}

static LEMMA_CHECKS: [&dyn LemmaCheck; 4] = [&Upper, &MarkovUpper, &Equirun, &MarkovEquirun];

pub fn lemma_checks() -> &'static [&'static dyn LemmaCheck] {
    &LEMMA_CHECKS
}

pub fn lemma_check(name: &str) -> Result<&'static dyn LemmaCheck> {
    LEMMA_CHECKS
        .iter()
        .copied()
        .find(|c| c.name() == name)
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "lemma check",
            name: name.to_string(),
        })
}
