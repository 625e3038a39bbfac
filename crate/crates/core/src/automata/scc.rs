use std::collections::BTreeSet;

use super::{Machine, StateId};
use crate::graph;

/// Strongly connected components of a machine's transition graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SccReport {
    /// Components in reverse topological order of the condensation (a
    /// component appears before every component that can reach it).
    pub components: Vec<Vec<StateId>>,
    pub component_of: Vec<usize>,
    /// `recurrent[c]` holds iff no transition leaves component `c`.
    pub recurrent: Vec<bool>,
    /// Edges `(c, d)` of the condensation, `c != d`.
    pub edges: BTreeSet<(usize, usize)>,
}

impl SccReport {
    pub fn is_strongly_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn recurrent_components(&self) -> impl Iterator<Item = &[StateId]> {
        self.components
            .iter()
            .zip(&self.recurrent)
            .filter(|(_, &r)| r)
            .map(|(c, _)| c.as_slice())
    }

    pub fn is_in_recurrent(&self, q: StateId) -> bool {
        self.recurrent[self.component_of[q]]
    }
}

pub fn scc_decomposition<M: Machine + ?Sized>(machine: &M) -> SccReport {
    let adjacency = machine.adjacency();
    let comps = graph::components(
        machine.num_states(),
        adjacency
            .iter()
            .enumerate()
            .flat_map(|(p, succ)| succ.iter().map(move |&q| (p, q))),
    );
    let recurrent = graph::recurrent_flags(&comps, &adjacency);
    let mut edges = BTreeSet::new();
    for (p, succ) in adjacency.iter().enumerate() {
        for &q in succ {
            let (cp, cq) = (comps.component_of[p], comps.component_of[q]);
            if cp != cq {
                edges.insert((cp, cq));
            }
        }
    }
    SccReport {
        components: comps.components,
        component_of: comps.component_of,
        recurrent,
        edges,
    }
}
