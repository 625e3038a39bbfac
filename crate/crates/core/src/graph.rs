//! Small directed-graph helpers over dense state indices.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

/// Strongly connected components, sinks first (reverse topological order of
/// the condensation). States inside a component are sorted ascending.
pub(crate) struct Components {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
}

pub(crate) fn components<I>(n: usize, edges: I) -> Components
where
    I: IntoIterator<Item = (usize, usize)>,
{
    let mut graph = DiGraph::<(), ()>::with_capacity(n, 0);
    for _ in 0..n {
        graph.add_node(());
    }
    for (u, v) in edges {
        graph.add_edge(NodeIndex::new(u), NodeIndex::new(v), ());
    }
    let components: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|ix| ix.index()).collect();
            c.sort_unstable();
            c
        })
        .collect();
    let mut component_of = vec![0; n];
    for (ci, c) in components.iter().enumerate() {
        for &q in c.iter() {
            component_of[q] = ci;
        }
    }
    Components {
        components,
        component_of,
    }
}

/// Breadth-first reachability from `start` over an adjacency list.
pub(crate) fn reachable(adjacency: &[Vec<usize>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; adjacency.len()];
    let mut queue = std::collections::VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &v in &adjacency[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen
}

/// First pair `(from, to)` such that `to` is not reachable from `from`, or
/// `None` when the graph is strongly connected.
pub(crate) fn unreachable_pair(adjacency: &[Vec<usize>]) -> Option<(usize, usize)> {
    (0..adjacency.len()).find_map(|u| {
        reachable(adjacency, u)
            .iter()
            .position(|&r| !r)
            .map(|v| (u, v))
    })
}

/// Indices of components that no edge leaves.
pub(crate) fn recurrent_flags(comps: &Components, adjacency: &[Vec<usize>]) -> Vec<bool> {
    let mut recurrent = vec![true; comps.components.len()];
    for (u, succ) in adjacency.iter().enumerate() {
        let cu = comps.component_of[u];
        if succ.iter().any(|&v| comps.component_of[v] != cu) {
            recurrent[cu] = false;
        }
    }
    recurrent
}

/// Adjacency list of the nonzero pattern of a dense row-major matrix.
pub(crate) fn support_adjacency(matrix: &[f64], n: usize) -> Vec<Vec<usize>> {
    (0..n)
        .map(|i| (0..n).filter(|&j| matrix[i * n + j] > 0.0).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sinks_come_first() {
        // 0 -> 1 -> 2 <-> 3
        let comps = components(4, [(0, 1), (1, 2), (2, 3), (3, 2)]);
        assert_eq!(comps.components, vec![vec![2, 3], vec![1], vec![0]]);
        let adj = vec![vec![1], vec![2], vec![3], vec![2]];
        assert_eq!(recurrent_flags(&comps, &adj), vec![true, false, false]);
        assert_eq!(unreachable_pair(&adj), Some((1, 0)));
    }
}
