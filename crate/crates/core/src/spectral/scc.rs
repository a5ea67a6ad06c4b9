//! Maximal strongly connected subgraphs via an iterative Tarjan search.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Partition of the node set into MSCSs.
///
/// Components are numbered in topological order of the condensation (an arc
/// between components always goes from a lower to a higher index) and each
/// component lists its nodes in ascending order. A node without a self-loop
/// that reaches no cycle forms its own component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccDecomposition {
    pub components: Vec<Vec<usize>>,
    pub component_of: Vec<usize>,
    pub condensation_arcs: Vec<(usize, usize)>,
}

impl SccDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }
}

const UNVISITED: usize = usize::MAX;

/// Decompose the digraph given by successor lists.
pub fn scc_decompose_lists(succs: &[Vec<usize>]) -> SccDecomposition {
    let n = succs.len();
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut emitted: Vec<Vec<usize>> = Vec::new();

    // (node, position in its successor list)
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succs[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                emitted.push(comp);
            }
        }
    }

    // Renumber in topological order of the condensation, ties broken by the
    // smallest node of each component.
    let mut tarjan_of = vec![0; n];
    for (c, comp) in emitted.iter().enumerate() {
        for &v in comp {
            tarjan_of[v] = c;
        }
    }
    let count = emitted.len();
    let mut indegree = vec![0usize; count];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (u, targets) in succs.iter().enumerate() {
        for &v in targets {
            let (a, b) = (tarjan_of[u], tarjan_of[v]);
            if a != b {
                out[a].push(b);
                indegree[b] += 1;
            }
        }
    }
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..count)
        .filter(|&c| indegree[c] == 0)
        .map(|c| Reverse((emitted[c][0], c)))
        .collect();
    let mut order = Vec::with_capacity(count);
    while let Some(Reverse((_, c))) = ready.pop() {
        order.push(c);
        for &d in &out[c] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.push(Reverse((emitted[d][0], d)));
            }
        }
    }
    let mut emitted: Vec<Vec<usize>> = order
        .into_iter()
        .map(|c| std::mem::take(&mut emitted[c]))
        .collect();
    emitted.shrink_to_fit();

    let mut component_of = vec![0; n];
    for (c, comp) in emitted.iter().enumerate() {
        for &v in comp {
            component_of[v] = c;
        }
    }
    let mut condensation_arcs: Vec<(usize, usize)> = succs
        .iter()
        .enumerate()
        .flat_map(|(u, out)| out.iter().map(move |&v| (u, v)))
        .map(|(u, v)| (component_of[u], component_of[v]))
        .filter(|(a, b)| a != b)
        .collect();
    condensation_arcs.sort_unstable();
    condensation_arcs.dedup();

    SccDecomposition {
        components: emitted,
        component_of,
        condensation_arcs,
    }
}

/// Decompose a precedence graph.
pub fn scc_decompose<T>(g: &super::PrecedenceGraph<T>) -> SccDecomposition {
    scc_decompose_lists(g.successor_lists())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ring(n: usize) -> Vec<Vec<usize>> {
        (0..n).map(|i| vec![(i + 1) % n]).collect()
    }

    #[test]
    fn ring_is_one_component() {
        let d = scc_decompose_lists(&ring(5));
        assert_eq!(d.components, vec![vec![0, 1, 2, 3, 4]]);
        assert!(d.condensation_arcs.is_empty());
    }

    #[test]
    fn two_disjoint_rings() {
        let succs = vec![vec![1], vec![0], vec![3], vec![2]];
        let d = scc_decompose_lists(&succs);
        assert_eq!(d.len(), 2);
        assert_eq!(d.components, vec![vec![0, 1], vec![2, 3]]);
    }

    #[test]
    fn solitary_nodes_and_topological_numbering() {
        // 2 -> 0 -> 1, with 1 a sink and no self-loops anywhere
        let succs = vec![vec![1], vec![], vec![0]];
        let d = scc_decompose_lists(&succs);
        assert_eq!(d.components, vec![vec![2], vec![0], vec![1]]);
        for &(a, b) in &d.condensation_arcs {
            assert!(a < b);
        }
    }

    fn reachability(succs: &[Vec<usize>]) -> Vec<Vec<bool>> {
        let n = succs.len();
        let mut r = vec![vec![false; n]; n];
        for (u, out) in succs.iter().enumerate() {
            r[u][u] = true;
            for &v in out {
                r[u][v] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if r[i][k] && r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
        r
    }

    fn digraph() -> impl Strategy<Value = Vec<Vec<usize>>> {
        (1usize..=8).prop_flat_map(|n| {
            proptest::collection::vec(proptest::bool::weighted(0.25), n * n).prop_map(move |bits| {
                (0..n)
                    .map(|u| (0..n).filter(|&v| bits[u * n + v]).collect())
                    .collect()
            })
        })
    }

    proptest! {
        #[test]
        fn matches_reachability_oracle(succs in digraph()) {
            let d = scc_decompose_lists(&succs);
            let r = reachability(&succs);
            let n = succs.len();
            for i in 0..n {
                for j in 0..n {
                    let together = d.component_of[i] == d.component_of[j];
                    prop_assert_eq!(together, r[i][j] && r[j][i]);
                }
            }
            let mut all: Vec<usize> = d.components.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            for &(a, b) in &d.condensation_arcs {
                prop_assert!(a < b);
            }
        }
    }
}
