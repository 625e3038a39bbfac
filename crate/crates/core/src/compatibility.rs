//! Compatibility of automata and selectors with the support of a Markov
//! measure.
//!
//! A machine is compatible when each state `q` carries the symbol `ι(q)` last
//! read on entering it and every transition `p -a-> q` has `P[ι(p)][a] > 0`.
//! Selectors additionally carry `η(q)`, the last selected symbol: keep
//! transitions require `η(p) = ι(p)` and set `η(q) = a`, drop transitions
//! propagate `η(q) = η(p)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::alphabet::Symbol;
use crate::automata::{Action, Machine, Selector, StateId};
use crate::measures::MarkovMeasure;

/// Labels declared in a machine file for states inference cannot fix.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Declarations {
    pub iota: BTreeMap<StateId, Symbol>,
    pub eta: BTreeMap<StateId, Symbol>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ViolationKind {
    IotaClash,
    EtaClash,
    ForbiddenStep,
    KeepMismatch,
    MissingDeclaration,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::IotaClash => "IotaClash",
            ViolationKind::EtaClash => "EtaClash",
            ViolationKind::ForbiddenStep => "ForbiddenStep",
            ViolationKind::KeepMismatch => "KeepMismatch",
            ViolationKind::MissingDeclaration => "MissingDeclaration",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// A state name or a transition written `p-a->q`.
    pub location: String,
    pub detail: String,
}

impl fmt::Display for Violation {
    /// `VIOLATION <kind> <location> <detail>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "VIOLATION {} {} {}",
            self.kind, self.location, self.detail
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompatibilityWitness {
    pub iota: Vec<Symbol>,
    /// Present for selectors only.
    pub eta: Option<Vec<Symbol>>,
    /// States whose `η` no constraint reaches. Each such class takes `ι` of its
    /// first state.
    pub unconstrained_eta: Vec<StateId>,
}

fn edge<M: Machine + ?Sized>(m: &M, p: StateId, a: Symbol, q: StateId) -> String {
    format!(
        "{}-{}->{}",
        m.state_name(p),
        m.alphabet().token(a),
        m.state_name(q)
    )
}

/// Infers `ι` from incoming labels; declarations only fill states without
/// incoming transitions.
pub fn infer_iota<M: Machine + ?Sized>(
    machine: &M,
    declared: &Declarations,
) -> Result<Vec<Symbol>, Vec<Violation>> {
    let n = machine.num_states();
    let alphabet = machine.alphabet();
    let mut incoming: Vec<Option<(Symbol, StateId)>> = vec![None; n];
    let mut violations = Vec::new();
    for (p, a, q) in machine.transitions() {
        match incoming[q] {
            None => incoming[q] = Some((a, p)),
            Some((b, first)) if b != a => violations.push(Violation {
                kind: ViolationKind::IotaClash,
                location: machine.state_name(q).to_string(),
                detail: format!(
                    "entered on {} from {} and on {} from {}",
                    alphabet.token(b),
                    machine.state_name(first),
                    alphabet.token(a),
                    machine.state_name(p)
                ),
            }),
            Some(_) => {}
        }
    }
    let mut iota = vec![0; n];
    for q in 0..n {
        match (incoming[q], declared.iota.get(&q)) {
            (Some((a, _)), Some(&d)) if d != a => violations.push(Violation {
                kind: ViolationKind::IotaClash,
                location: machine.state_name(q).to_string(),
                detail: format!(
                    "declared iota={} but entered on {}",
                    alphabet.token(d),
                    alphabet.token(a)
                ),
            }),
            (Some((a, _)), _) => iota[q] = a,
            (None, Some(&d)) => iota[q] = d,
            (None, None) => violations.push(Violation {
                kind: ViolationKind::MissingDeclaration,
                location: machine.state_name(q).to_string(),
                detail: "no incoming transition; declare `iota`".into(),
            }),
        }
    }
    if violations.is_empty() {
        Ok(iota)
    } else {
        Err(violations)
    }
}

fn forbidden_steps<M: Machine + ?Sized>(
    machine: &M,
    mu: &MarkovMeasure,
    iota: &[Symbol],
) -> Vec<Violation> {
    let alphabet = machine.alphabet();
    machine
        .transitions()
        .into_iter()
        .filter(|&(p, a, _)| mu.transition(iota[p], a) <= 0.0)
        .map(|(p, a, q)| Violation {
            kind: ViolationKind::ForbiddenStep,
            location: edge(machine, p, a, q),
            detail: format!(
                "P[{},{}]=0 with iota({})={}",
                alphabet.token(iota[p]),
                alphabet.token(a),
                machine.state_name(p),
                alphabet.token(iota[p])
            ),
        })
        .collect()
}

fn check_alphabets<M: Machine + ?Sized>(
    machine: &M,
    mu: &MarkovMeasure,
) -> Result<(), Vec<Violation>> {
    if machine.alphabet() == mu.alphabet() {
        Ok(())
    } else {
        Err(vec![Violation {
            kind: ViolationKind::MissingDeclaration,
            location: "alphabet".into(),
            detail: format!(
                "machine alphabet {:?} differs from measure alphabet {:?}",
                machine.alphabet(),
                mu.alphabet()
            ),
        }])
    }
}

/// Condition i) for automata (also applies to the automaton underlying a
/// selector).
pub fn check_automaton_compatibility<M: Machine + ?Sized>(
    machine: &M,
    mu: &MarkovMeasure,
    declared: &Declarations,
) -> Result<CompatibilityWitness, Vec<Violation>> {
    check_alphabets(machine, mu)?;
    let iota = infer_iota(machine, declared)?;
    let violations = forbidden_steps(machine, mu, &iota);
    if violations.is_empty() {
        Ok(CompatibilityWitness {
            iota,
            eta: None,
            unconstrained_eta: Vec::new(),
        })
    } else {
        Err(violations)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Conditions i) and ii) for selectors. `η` is solved by union-find: drop
/// transitions merge the classes of their endpoints, keep targets and
/// declarations anchor a class to a symbol, and every keep source must then
/// agree with its own `ι`.
pub fn check_selector_compatibility(
    selector: &Selector,
    mu: &MarkovMeasure,
    declared: &Declarations,
) -> Result<CompatibilityWitness, Vec<Violation>> {
    check_alphabets(selector, mu)?;
    let iota = infer_iota(selector, declared)?;
    let mut violations = forbidden_steps(selector, mu, &iota);
    let alphabet = selector.alphabet();
    let n = selector.num_states();
    let transitions = selector.labelled_transitions();

    let mut classes = UnionFind::new(n);
    for &(p, _, action, q) in &transitions {
        if action == Action::Drop {
            classes.union(p, q);
        }
    }

    // Anchors set by keep targets and declarations; first one wins, later
    // disagreeing ones are reported.
    let mut anchor: Vec<Option<(Symbol, String)>> = vec![None; n];
    let mut anchors: Vec<(StateId, Symbol, String)> = transitions
        .iter()
        .filter(|t| t.2 == Action::Keep)
        .map(|&(p, a, _, q)| (q, a, format!("selected by {}", edge(selector, p, a, q))))
        .collect();
    anchors.extend(
        declared
            .eta
            .iter()
            .map(|(&q, &a)| (q, a, format!("declared eta({})", selector.state_name(q)))),
    );
    for (q, a, why) in anchors {
        let root = classes.find(q);
        match &anchor[root] {
            None => anchor[root] = Some((a, why)),
            Some((b, first)) if *b != a => violations.push(Violation {
                kind: ViolationKind::EtaClash,
                location: selector.state_name(q).to_string(),
                detail: format!(
                    "eta forced to {} ({}) and to {} ({})",
                    alphabet.token(*b),
                    first,
                    alphabet.token(a),
                    why
                ),
            }),
            Some(_) => {}
        }
    }

    for &(p, a, action, q) in &transitions {
        if action != Action::Keep {
            continue;
        }
        let root = classes.find(p);
        match &anchor[root] {
            None => {
                anchor[root] = Some((iota[p], format!("keep source {}", selector.state_name(p))))
            }
            Some((b, why)) if *b != iota[p] => violations.push(Violation {
                kind: ViolationKind::KeepMismatch,
                location: edge(selector, p, a, q),
                detail: format!(
                    "selects with iota({})={} but eta={} ({})",
                    selector.state_name(p),
                    alphabet.token(iota[p]),
                    alphabet.token(*b),
                    why
                ),
            }),
            Some(_) => {}
        }
    }

    if !violations.is_empty() {
        return Err(violations);
    }
    // A class no constraint reaches takes `ι` of its first state.
    let mut eta = vec![0; n];
    let mut defaulted = vec![false; n];
    let mut unconstrained_eta = Vec::new();
    for q in 0..n {
        let root = classes.find(q);
        if anchor[root].is_none() {
            anchor[root] = Some((iota[q], String::new()));
            defaulted[root] = true;
        }
        if defaulted[root] {
            unconstrained_eta.push(q);
        }
        eta[q] = anchor[root].as_ref().map_or(iota[q], |(a, _)| *a);
    }
    let witness = CompatibilityWitness {
        iota,
        eta: Some(eta),
        unconstrained_eta,
    };
    debug_assert!(witness_violations(selector, mu, &witness).is_empty());
    Ok(witness)
}

/// Re-checks a witness against the raw definition, returning every clause
/// that fails.
pub fn witness_violations(
    selector: &Selector,
    mu: &MarkovMeasure,
    witness: &CompatibilityWitness,
) -> Vec<String> {
    let iota = &witness.iota;
    let mut failures = Vec::new();
    for (p, a, action, q) in selector.labelled_transitions() {
        let e = edge(selector, p, a, q);
        if mu.transition(iota[p], a) <= 0.0 {
            failures.push(format!("{e}: P[iota(p)][a] = 0"));
        }
        if iota[q] != a {
            failures.push(format!("{e}: iota(q) != a"));
        }
        if let Some(eta) = &witness.eta {
            match action {
                Action::Keep => {
                    if eta[q] != a {
                        failures.push(format!("{e}: eta(q) != a"));
                    }
                    if eta[p] != iota[p] {
                        failures.push(format!("{e}: eta(p) != iota(p)"));
                    }
                }
                Action::Drop => {
                    if eta[q] != eta[p] {
                        failures.push(format!("{e}: eta(q) != eta(p)"));
                    }
                }
            }
        }
    }
    failures
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftCompleteness {
    pub complete: bool,
    /// Pairs `(p, a)` with `P[ι(p)][a] > 0` but no transition.
    pub missing: Vec<(StateId, Symbol)>,
}

/// Whether every step the support allows has a transition.
pub fn is_shift_complete<M: Machine + ?Sized>(
    machine: &M,
    mu: &MarkovMeasure,
    iota: &[Symbol],
) -> ShiftCompleteness {
    let k = machine.alphabet().len();
    let missing: Vec<_> = (0..machine.num_states())
        .flat_map(|p| (0..k).map(move |a| (p, a)))
        .filter(|&(p, a)| mu.transition(iota[p], a) > 0.0 && machine.target(p, a).is_none())
        .collect();
    ShiftCompleteness {
        complete: missing.is_empty(),
        missing,
    }
}
