//! Markov chains induced by automata.
//!
//! A complete automaton read under the uniform measure gives the chain with
//! `P̂[p][q] = #{a : p·a = q} / #A`. A compatible, shift-complete automaton
//! read under a Markov measure `μ` gives `P̂[p][q] = P[ι(p)][a]` for each
//! transition `p -a-> q`. Applying either construction to the snake
//! automaton `A^n` yields the snake chain over length-`n` runs.

use crate::alphabet::Symbol;
use crate::automata::{snake_automaton, Machine, SnakeAutomaton, StateId};
use crate::error::{Error, Result};
use crate::graph;
use crate::measures::{linalg, MarkovMeasure, ROW_SUM_TOLERANCE, SOLVE_TOLERANCE};

/// Closed-form snake distributions must match the stationary solve to this.
pub const SNAKE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct StateChain {
    labels: Vec<String>,
    matrix: Vec<f64>,
    strongly_connected: bool,
    recurrent_classes: usize,
    stationary: Option<Vec<f64>>,
}

impl StateChain {
    fn build(labels: Vec<String>, matrix: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        let adjacency = graph::support_adjacency(&matrix, n);
        let comps = graph::components(
            n,
            adjacency
                .iter()
                .enumerate()
                .flat_map(|(p, s)| s.iter().map(move |&q| (p, q))),
        );
        let recurrent_classes = graph::recurrent_flags(&comps, &adjacency)
            .iter()
            .filter(|&&r| r)
            .count();
        let stochastic = matrix
            .chunks(n)
            .all(|row| (row.iter().sum::<f64>() - 1.0).abs() <= ROW_SUM_TOLERANCE);
        // A stochastic matrix with one recurrent class has a unique
        // stationary distribution, zero on transient states.
        let stationary = if stochastic && recurrent_classes == 1 {
            let pi = linalg::solve_stationary(&matrix, n)
                .ok_or(Error::NoUniqueStationary { classes: 1 })?;
            if linalg::stationary_residual(&matrix, n, &pi) > SOLVE_TOLERANCE {
                return Err(Error::NonConvergence { iterations: 0 });
            }
            Some(pi)
        } else {
            None
        };
        Ok(StateChain {
            labels,
            matrix,
            strongly_connected: comps.components.len() == 1,
            recurrent_classes,
            stationary,
        })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Row-major transition matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn entry(&self, p: StateId, q: StateId) -> f64 {
        self.matrix[p * self.size() + q]
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.strongly_connected
    }

    /// The stationary distribution `π̂`, available when the chain has a
    /// single recurrent class.
    pub fn stationary(&self) -> Result<&[f64]> {
        match &self.stationary {
            Some(pi) => Ok(pi),
            None if self.recurrent_classes != 1 => Err(Error::NoUniqueStationary {
                classes: self.recurrent_classes,
            }),
            None => Err(Error::Validation(
                "transition matrix is not stochastic".into(),
            )),
        }
    }
}

/// Chain of a deterministic complete automaton under the uniform measure.
pub fn uniform_chain<M: Machine + ?Sized>(machine: &M) -> Result<StateChain> {
    let n = machine.num_states();
    let k = machine.alphabet().len();
    let weight = 1.0 / k as f64;
    let mut matrix = vec![0.0; n * n];
    for p in 0..n {
        for a in 0..k {
            let q = machine.target(p, a).ok_or_else(|| Error::Incomplete {
                state: machine.state_name(p).to_string(),
                symbol: machine.alphabet().token(a).to_string(),
            })?;
            matrix[p * n + q] += weight;
        }
    }
    StateChain::build(machine.state_names().to_vec(), matrix)
}

/// Chain of a compatible automaton under `mu`, with `iota` from a
/// compatibility witness. Fails unless every step the support allows has a
/// transition.
pub fn compatible_chain<M: Machine + ?Sized>(
    machine: &M,
    mu: &MarkovMeasure,
    iota: &[Symbol],
) -> Result<StateChain> {
    let completeness = crate::compatibility::is_shift_complete(machine, mu, iota);
    if !completeness.complete {
        return Err(Error::NotShiftComplete {
            missing: completeness
                .missing
                .iter()
                .map(|&(p, a)| {
                    format!(
                        "({}, {})",
                        machine.state_name(p),
                        machine.alphabet().token(a)
                    )
                })
                .collect(),
        });
    }
    StateChain::build(
        machine.state_names().to_vec(),
        raw_compatible_matrix(machine, mu, iota),
    )
}

/// `P̂` without the completeness requirement; rows of states missing an
/// allowed step sum to less than one.
pub fn raw_compatible_matrix<M: Machine + ?Sized>(
    machine: &M,
    mu: &MarkovMeasure,
    iota: &[Symbol],
) -> Vec<f64> {
    let n = machine.num_states();
    let mut matrix = vec![0.0; n * n];
    for (p, a, q) in machine.transitions() {
        matrix[p * n + q] += mu.transition(iota[p], a);
    }
    matrix
}

/// How snake states are weighted.
#[derive(Debug, Clone, Copy)]
pub enum SnakeWeighting<'a> {
    /// Uniform input measure; the machine must be complete.
    Uniform,
    /// Markov input measure with the machine's `ι` labelling.
    Markov {
        measure: &'a MarkovMeasure,
        iota: &'a [Symbol],
    },
}

#[derive(Debug, Clone)]
pub struct SnakeDistribution {
    pub snake: SnakeAutomaton,
    /// `π̂_p / (#A)^n` (uniform) or `π̂_p μ_{ι(p)}(w)` (Markov).
    pub closed_form: Vec<f64>,
    /// Stationary distribution of the snake chain.
    pub solved: Vec<f64>,
    pub max_deviation: f64,
}

/// Closed-form distribution of the snake chain of length `n`, checked
/// against the stationary solve of that chain.
pub fn snake_distribution<M: Machine + ?Sized>(
    machine: &M,
    weighting: SnakeWeighting<'_>,
    n: usize,
) -> Result<SnakeDistribution> {
    let snake = snake_automaton(machine, n)?;
    let (base, snake_chain) = match weighting {
        SnakeWeighting::Uniform => (uniform_chain(machine)?, uniform_chain(&snake.automaton)?),
        SnakeWeighting::Markov { measure, iota } => {
            let snake_iota: Vec<Symbol> = snake.runs.iter().map(|(_, w)| w[n - 1]).collect();
            (
                compatible_chain(machine, measure, iota)?,
                compatible_chain(&snake.automaton, measure, &snake_iota)?,
            )
        }
    };
    let pi = base.stationary()?;
    let closed_form: Vec<f64> = match weighting {
        SnakeWeighting::Uniform => {
            let scale = (machine.alphabet().len() as f64).powi(n as i32);
            snake.runs.iter().map(|(p, _)| pi[*p] / scale).collect()
        }
        SnakeWeighting::Markov { measure, iota } => snake
            .runs
            .iter()
            .map(|(p, w)| pi[*p] * measure.conditional_word_measure(iota[*p], w))
            .collect(),
    };
    let solved = snake_chain.stationary()?.to_vec();
    let max_deviation = closed_form
        .iter()
        .zip(&solved)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    if max_deviation > SNAKE_TOLERANCE {
        return Err(Error::SnakeMismatch {
            deviation: max_deviation,
        });
    }
    Ok(SnakeDistribution {
        snake,
        closed_form,
        solved,
        max_deviation,
    })
}

/// The variant `π̂_p μ_{η(p)}(w)` over the realizable snake states. It
/// coincides with the `ι` weighting on states where `ι(p) = η(p)` and is not
/// in general a stationary distribution.
pub fn snake_distribution_eta<M: Machine + ?Sized>(
    machine: &M,
    measure: &MarkovMeasure,
    iota: &[Symbol],
    eta: &[Symbol],
    n: usize,
) -> Result<(SnakeAutomaton, Vec<f64>)> {
    let snake = snake_automaton(machine, n)?;
    let base = compatible_chain(machine, measure, iota)?;
    let pi = base.stationary()?;
    let weights = snake
        .runs
        .iter()
        .map(|(p, w)| pi[*p] * measure.conditional_word_measure(eta[*p], w))
        .collect();
    Ok((snake, weights))
}

/// `μ̂(p * u) = π̂_p μ_{ι(p)}(u)` for a realizable run.
pub fn lifted_run_measure<M: Machine + ?Sized>(
    machine: &M,
    chain: &StateChain,
    mu: &MarkovMeasure,
    iota: &[Symbol],
    p: StateId,
    u: &[Symbol],
) -> Result<f64> {
    if machine.end_state(p, u).is_none() {
        return Err(Error::UnrealizableRun {
            state: machine.state_name(p).to_string(),
            word: machine.alphabet().format_word(u),
        });
    }
    Ok(chain.stationary()?[p] * mu.conditional_word_measure(iota[p], u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateFrequencyReport {
    pub n: u64,
    /// Occurrences of each state as the source of one of the first `n`
    /// transitions.
    pub counts: Vec<u64>,
    pub frequencies: Vec<f64>,
    pub reference: Vec<f64>,
    pub max_deviation: f64,
}

/// Runs `machine` from its initial state over the first `n` symbols of `x`
/// and compares source-state frequencies with `reference`.
pub fn empirical_state_frequencies<M, I>(
    machine: &M,
    x: I,
    n: u64,
    reference: &[f64],
) -> Result<StateFrequencyReport>
where
    M: Machine + ?Sized,
    I: IntoIterator<Item = Symbol>,
{
    let mut counts = vec![0u64; machine.num_states()];
    let mut state = machine.initial();
    let mut consumed = 0u64;
    for a in x.into_iter().take(n as usize) {
        let next = machine
            .target(state, a)
            .ok_or_else(|| Error::UndefinedTransition {
                state: machine.state_name(state).to_string(),
                symbol: machine.alphabet().token(a).to_string(),
                position: Some(consumed + 1),
            })?;
        counts[state] += 1;
        state = next;
        consumed += 1;
    }
    if consumed < n {
        return Err(Error::Validation(format!(
            "input ended after {consumed} of {n} symbols"
        )));
    }
    let frequencies: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
    let max_deviation = frequencies
        .iter()
        .zip(reference)
        .map(|(f, r)| (f - r).abs())
        .fold(0.0, f64::max);
    Ok(StateFrequencyReport {
        n,
        counts,
        frequencies,
        reference: reference.to_vec(),
        max_deviation,
    })
}
