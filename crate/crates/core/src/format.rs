//! Line-based text formats for machines, measures and matrices.
//!
//! Machines:
//!
//! ```text
//! # comment
//! alphabet 0 1
//! states q0 q1
//! initial q0
//! iota q0 0            # optional
//! eta q0 0             # optional
//! trans q0 1 keep q1   # automata omit the action column
//! ```
//!
//! Measures are `alphabet`, `pi`, then one `row` per symbol; matrices are
//! `alphabet` then `row` lines.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::alphabet::Alphabet;
use crate::automata::{Action, Automaton, Machine, Selector, StateId};
use crate::compatibility::Declarations;
use crate::error::{Error, Result};
use crate::measures::{Distribution, MarkovMeasure, SftSpec, StochasticMatrix};

#[derive(Debug, Clone)]
pub struct SelectorFile {
    pub selector: Selector,
    pub declarations: Declarations,
}

#[derive(Debug, Clone)]
pub struct AutomatonFile {
    pub automaton: Automaton,
    pub declarations: Declarations,
}

/// A whitespace token with its 1-based column.
#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
}

impl<'a> Line<'a> {
    fn err(&self, token: usize, message: impl Into<String>) -> Error {
        let column = self.tokens.get(token).map_or(1, |t| t.column);
        Error::parse(self.number, column, message)
    }

    fn args(&self) -> &[Token<'a>] {
        &self.tokens[1..]
    }
}

fn lines(text: &str) -> impl Iterator<Item = Line<'_>> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (pos, c) in content
            .char_indices()
            .chain(std::iter::once((content.len(), ' ')))
        {
            match (c.is_whitespace(), start) {
                (false, None) => start = Some(pos),
                (true, Some(s)) => {
                    tokens.push(Token {
                        text: &content[s..pos],
                        column: content[..s].chars().count() + 1,
                    });
                    start = None;
                }
                _ => {}
            }
        }
        (!tokens.is_empty()).then_some(Line {
            number: i + 1,
            tokens,
        })
    })
}

struct MachineParts {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    transitions: Vec<(StateId, usize, Option<Action>, StateId)>,
    declarations: Declarations,
}

fn parse_machine(text: &str) -> Result<MachineParts> {
    let mut alphabet: Option<Alphabet> = None;
    let mut states: Option<Vec<String>> = None;
    let mut initial = None;
    let mut transitions = Vec::new();
    let mut declarations = Declarations::default();
    let mut seen = std::collections::HashSet::new();
    let mut last_line = 0;

    for line in lines(text) {
        last_line = line.number;
        let keyword = line.tokens[0].text;
        let need_alphabet = |alphabet: &Option<Alphabet>| {
            alphabet
                .clone()
                .ok_or_else(|| line.err(0, "`alphabet` must come first"))
        };
        let state_of = |states: &Option<Vec<String>>, i: usize| -> Result<StateId> {
            let states = states
                .as_ref()
                .ok_or_else(|| line.err(0, "`states` must precede this line"))?;
            let name = line.tokens[i].text;
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| line.err(i, format!("unknown state `{name}`")))
        };
        match keyword {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(line.err(0, "duplicate `alphabet`"));
                }
                let a = Alphabet::new(line.args().iter().map(|t| t.text))
                    .map_err(|e| line.err(1, e.to_string()))?;
                alphabet = Some(a);
            }
            "states" => {
                if states.is_some() {
                    return Err(line.err(0, "duplicate `states`"));
                }
                let names: Vec<String> = line.args().iter().map(|t| t.text.to_string()).collect();
                if names.is_empty() {
                    return Err(line.err(0, "no states listed"));
                }
                for (i, n) in names.iter().enumerate() {
                    if names[..i].contains(n) {
                        return Err(line.err(i + 1, format!("duplicate state `{n}`")));
                    }
                }
                states = Some(names);
            }
            "initial" => {
                if line.tokens.len() != 2 {
                    return Err(line.err(0, "expected `initial <state>`"));
                }
                initial = Some(state_of(&states, 1)?);
            }
            "iota" | "eta" => {
                if line.tokens.len() != 3 {
                    return Err(line.err(0, format!("expected `{keyword} <state> <symbol>`")));
                }
                let q = state_of(&states, 1)?;
                let a = need_alphabet(&alphabet)?
                    .index_of(line.tokens[2].text)
                    .map_err(|e| line.err(2, e.to_string()))?;
                let map = if keyword == "iota" {
                    &mut declarations.iota
                } else {
                    &mut declarations.eta
                };
                if map.insert(q, a).is_some() {
                    return Err(line.err(1, format!("duplicate `{keyword}` declaration")));
                }
            }
            "trans" => {
                let (action, dst) = match line.tokens.len() {
                    4 => (None, 3),
                    5 => {
                        let action = match line.tokens[3].text {
                            "keep" => Action::Keep,
                            "drop" => Action::Drop,
                            other => {
                                return Err(
                                    line.err(3, format!("expected keep|drop, got `{other}`"))
                                )
                            }
                        };
                        (Some(action), 4)
                    }
                    _ => {
                        return Err(line.err(0, "expected `trans <src> <symbol> [keep|drop] <dst>`"))
                    }
                };
                let p = state_of(&states, 1)?;
                let a = need_alphabet(&alphabet)?
                    .index_of(line.tokens[2].text)
                    .map_err(|e| line.err(2, e.to_string()))?;
                let q = state_of(&states, dst)?;
                if !seen.insert((p, a)) {
                    return Err(line.err(1, "duplicate transition for (state, symbol)"));
                }
                transitions.push((p, a, action, q));
            }
            other => return Err(line.err(0, format!("unknown keyword `{other}`"))),
        }
    }
    let end = |what: &str| Error::parse(last_line.max(1), 1, format!("missing `{what}` line"));
    Ok(MachineParts {
        alphabet: alphabet.ok_or_else(|| end("alphabet"))?,
        states: states.ok_or_else(|| end("states"))?,
        initial: initial.ok_or_else(|| end("initial"))?,
        transitions,
        declarations,
    })
}

pub fn parse_selector(text: &str) -> Result<SelectorFile> {
    let parts = parse_machine(text)?;
    let mut transitions = Vec::with_capacity(parts.transitions.len());
    for (p, a, action, q) in parts.transitions {
        let action = action.ok_or_else(|| {
            Error::Validation(format!(
                "transition from {} lacks a keep|drop action",
                parts.states[p]
            ))
        })?;
        transitions.push((p, a, action, q));
    }
    let selector = Selector::new(parts.alphabet, parts.states, parts.initial, transitions)?;
    Ok(SelectorFile {
        selector,
        declarations: parts.declarations,
    })
}

/// Parses an automaton. Selector files are accepted too; their actions are
/// discarded.
pub fn parse_automaton(text: &str) -> Result<AutomatonFile> {
    let parts = parse_machine(text)?;
    let automaton = Automaton::new(
        parts.alphabet,
        parts.states,
        parts.initial,
        parts.transitions.into_iter().map(|(p, a, _, q)| (p, a, q)),
    )?;
    Ok(AutomatonFile {
        automaton,
        declarations: parts.declarations,
    })
}

fn parse_reals(line: &Line<'_>) -> Result<Vec<f64>> {
    line.args()
        .iter()
        .enumerate()
        .map(|(i, t)| {
            t.text
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| line.err(i + 1, format!("not a real number: `{}`", t.text)))
        })
        .collect()
}

struct MatrixParts {
    alphabet: Alphabet,
    pi: Option<Vec<f64>>,
    rows: Vec<Vec<f64>>,
}

fn parse_matrix_parts(text: &str, allow_pi: bool, require_pi: bool) -> Result<MatrixParts> {
    let mut alphabet: Option<Alphabet> = None;
    let mut pi = None;
    let mut rows = Vec::new();
    let mut last_line = 0;
    for line in lines(text) {
        last_line = line.number;
        match line.tokens[0].text {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(line.err(0, "duplicate `alphabet`"));
                }
                alphabet = Some(
                    Alphabet::new(line.args().iter().map(|t| t.text))
                        .map_err(|e| line.err(1, e.to_string()))?,
                );
            }
            "pi" if allow_pi => {
                let n = alphabet
                    .as_ref()
                    .ok_or_else(|| line.err(0, "`alphabet` must come first"))?
                    .len();
                if pi.is_some() {
                    return Err(line.err(0, "duplicate `pi`"));
                }
                let v = parse_reals(&line)?;
                if v.len() != n {
                    return Err(line.err(0, format!("expected {n} values, got {}", v.len())));
                }
                pi = Some(v);
            }
            "row" => {
                let n = alphabet
                    .as_ref()
                    .ok_or_else(|| line.err(0, "`alphabet` must come first"))?
                    .len();
                let v = parse_reals(&line)?;
                if v.len() != n {
                    return Err(line.err(0, format!("expected {n} values, got {}", v.len())));
                }
                if rows.len() == n {
                    return Err(line.err(0, format!("more than {n} rows")));
                }
                rows.push(v);
            }
            other => return Err(line.err(0, format!("unknown keyword `{other}`"))),
        }
    }
    let alphabet =
        alphabet.ok_or_else(|| Error::parse(last_line.max(1), 1, "missing `alphabet` line"))?;
    if rows.len() != alphabet.len() {
        return Err(Error::parse(
            last_line.max(1),
            1,
            format!("expected {} rows, got {}", alphabet.len(), rows.len()),
        ));
    }
    if require_pi && pi.is_none() {
        return Err(Error::parse(last_line.max(1), 1, "missing `pi` line"));
    }
    Ok(MatrixParts { alphabet, pi, rows })
}

/// Parses and validates a Markov measure (row sums, normalization,
/// stationarity).
pub fn parse_measure(text: &str) -> Result<MarkovMeasure> {
    let parts = parse_matrix_parts(text, true, true)?;
    let p = StochasticMatrix::from_rows(&parts.rows)?;
    let pi = Distribution::new(parts.pi.expect("checked")).map_err(|e| match e {
        Error::WeightsNotNormalized { sum } => {
            Error::Validation(format!("pi sums to {sum}, not 1"))
        }
        e => e,
    })?;
    MarkovMeasure::new(parts.alphabet, pi, p)
}

pub fn parse_matrix(text: &str) -> Result<SftSpec> {
    let parts = parse_matrix_parts(text, false, false)?;
    SftSpec::from_rows(parts.alphabet, &parts.rows)
}

/// Parses the `row` lines of a measure file as a stochastic matrix. A `pi`
/// line is accepted and ignored.
pub fn parse_transition_matrix(text: &str) -> Result<(Alphabet, StochasticMatrix)> {
    let parts = parse_matrix_parts(text, true, false)?;
    Ok((parts.alphabet, StochasticMatrix::from_rows(&parts.rows)?))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn read_selector(path: impl AsRef<Path>) -> Result<SelectorFile> {
    parse_selector(&read(path.as_ref())?)
}

pub fn read_automaton(path: impl AsRef<Path>) -> Result<AutomatonFile> {
    parse_automaton(&read(path.as_ref())?)
}

pub fn read_measure(path: impl AsRef<Path>) -> Result<MarkovMeasure> {
    parse_measure(&read(path.as_ref())?)
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<SftSpec> {
    parse_matrix(&read(path.as_ref())?)
}

pub fn read_transition_matrix(path: impl AsRef<Path>) -> Result<(Alphabet, StochasticMatrix)> {
    parse_transition_matrix(&read(path.as_ref())?)
}

/// Canonical text of a selector (declaration order, no comments).
pub fn write_selector(selector: &Selector, declarations: &Declarations) -> String {
    let alphabet = selector.alphabet();
    let mut out = String::new();
    writeln!(out, "alphabet {}", alphabet.symbols().join(" ")).unwrap();
    writeln!(out, "states {}", selector.state_names().join(" ")).unwrap();
    writeln!(out, "initial {}", selector.state_name(selector.initial())).unwrap();
    for (kw, map) in [("iota", &declarations.iota), ("eta", &declarations.eta)] {
        for (&q, &a) in map {
            writeln!(out, "{kw} {} {}", selector.state_name(q), alphabet.token(a)).unwrap();
        }
    }
    for (p, a, action, q) in selector.labelled_transitions() {
        writeln!(
            out,
            "trans {} {} {} {}",
            selector.state_name(p),
            alphabet.token(a),
            action.as_str(),
            selector.state_name(q)
        )
        .unwrap();
    }
    out
}

/// SHA-256 of the canonical selector text, hex encoded.
pub fn selector_hash(selector: &Selector, declarations: &Declarations) -> String {
    hex::encode(Sha256::digest(
        write_selector(selector, declarations).as_bytes(),
    ))
}

/// Writes `alphabet`/`pi`/`row` lines; `labels` may be state names.
pub fn write_measure_text(
    labels: &[String],
    pi: Option<&[f64]>,
    rows: &[f64],
    digits: usize,
) -> String {
    let n = labels.len();
    let fmt_row = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.digits$}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let mut out = format!("alphabet {}\n", labels.join(" "));
    if let Some(pi) = pi {
        writeln!(out, "pi {}", fmt_row(pi)).unwrap();
    }
    for i in 0..n {
        writeln!(out, "row {}", fmt_row(&rows[i * n..(i + 1) * n])).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fig2_fixture_parses() {
        let f = parse_selector(fixtures::FIG2_SEL).unwrap();
        assert!(f.selector.is_oblivious());
        assert_eq!(f.selector.state_names(), ["q0", "q1"]);
    }

    #[test]
    fn duplicate_transition_is_parse_error() {
        let text = "alphabet 0 1\nstates q0\ninitial q0\ntrans q0 0 keep q0\ntrans  q0 0 drop q0\n";
        match parse_selector(text) {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (5, 8)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn diagnostics_carry_positions() {
        let text = "alphabet 0 1\nstates q0\ninitial q9\n";
        match parse_selector(text) {
            Err(Error::Parse {
                line,
                column,
                message,
            }) => {
                assert_eq!((line, column), (3, 9));
                assert!(message.contains("q9"));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_selector("alphabet 0 1\nstates q0\ninitial q0\nfoo\n"),
            Err(Error::Parse { line: 4, .. })
        ));
        assert!(matches!(
            parse_selector("alphabet 0 1\nstates q0\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn row_sum_off_by_a_percent_is_rejected() {
        let text = "alphabet 0 1\npi 0.5 0.5\nrow 0.49 0.5\nrow 0.5 0.5\n";
        assert!(matches!(parse_measure(text), Err(Error::Validation(_))));
    }

    #[test]
    fn golden_measure_fixture_matches_parry() {
        let mu = parse_measure(fixtures::GOLDEN_MSR).unwrap();
        let parry = crate::measures::parry_measure(&parse_matrix(fixtures::GOLDEN_MAT).unwrap())
            .unwrap()
            .measure;
        for (x, y) in mu.matrix().entries().iter().zip(parry.matrix().entries()) {
            assert!((x - y).abs() < 1e-13, "{x} vs {y}");
        }
    }

    #[test]
    fn automaton_reader_accepts_both_transition_forms() {
        let a = parse_automaton(fixtures::FIG1_SEL).unwrap().automaton;
        assert_eq!(&a, fixtures::fig1().underlying());
        let plain = "alphabet a\nstates s\ninitial s\ntrans s a s\n";
        assert!(parse_automaton(plain).is_ok());
        assert!(parse_selector(plain).is_err());
    }

    #[test]
    fn canonical_text_round_trips() {
        let f = fixtures::fig3_file();
        let text = write_selector(&f.selector, &f.declarations);
        let again = parse_selector(&text).unwrap();
        assert_eq!(again.selector, f.selector);
        assert_eq!(again.declarations, f.declarations);
        assert_eq!(
            selector_hash(&f.selector, &f.declarations),
            selector_hash(&again.selector, &again.declarations)
        );
    }
}
