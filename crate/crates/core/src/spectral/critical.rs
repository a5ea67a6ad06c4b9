use num_integer::Integer;

use super::graph::PrecedenceGraph;
use super::karp::max_cycle_mean;
use super::scc::{scc_decompose, scc_decompose_lists};
use crate::error::{Error, Result};
use crate::semiring::{Ext, Field, MaxPlusMatrix, Scalar, DEFAULT_TOLERANCE};

/// `G^cr(A)`: the union of circuits attaining the maximum cycle mean.
///
/// Nodes are ascending; arcs are `(from, to)` pairs in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalGraph<F> {
    pub node_count: usize,
    pub lambda: F,
    pub nodes: Vec<usize>,
    pub arcs: Vec<(usize, usize)>,
}

impl<F> CriticalGraph<F> {
    pub fn contains(&self, node: usize) -> bool {
        self.nodes.binary_search(&node).is_ok()
    }

    /// MSCSs of the critical graph, each ascending, ordered by first node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut succs = vec![Vec::new(); self.node_count];
        for &(from, to) in &self.arcs {
            succs[from].push(to);
        }
        let mut comps: Vec<Vec<usize>> = scc_decompose_lists(&succs)
            .components
            .into_iter()
            .filter(|c| self.contains(c[0]))
            .collect();
        comps.sort();
        comps
    }
}

/// Normalised matrix `Â = (-λ) ⊗ A` with its Kleene star.
pub(crate) struct Normalised<F> {
    pub lambda: F,
    pub normalised: MaxPlusMatrix<F>,
    pub star: MaxPlusMatrix<F>,
}

pub(crate) fn require_irreducible<T: Scalar>(a: &MaxPlusMatrix<T>, op: &'static str) -> Result<()> {
    let g = PrecedenceGraph::from_matrix(a)?;
    let sccs = scc_decompose(&g);
    if sccs.len() == 1 {
        Ok(())
    } else {
        Err(Error::Reducible {
            op,
            components: sccs.len(),
        })
    }
}

pub(crate) fn normalise<T: Scalar>(
    a: &MaxPlusMatrix<T>,
    op: &'static str,
    tol: f64,
) -> Result<Normalised<T::Field>> {
    require_irreducible(a, op)?;
    let lambda = max_cycle_mean(a)?;
    let neg = lambda.checked_neg().ok_or(Error::Overflow(op))?;
    let normalised = a.to_field().scale(Ext::Fin(neg))?;
    let star = normalised.kleene_star_tol(tol)?;
    Ok(Normalised {
        lambda,
        normalised,
        star,
    })
}

fn is_zero<F: Field>(x: Ext<F>, tol: f64) -> bool {
    x.close(Ext::e(), tol)
}

pub(crate) fn critical_from<F: Field>(norm: &Normalised<F>, tol: f64) -> Result<CriticalGraph<F>> {
    let n = norm.star.rows();
    let plus = norm.normalised.otimes(&norm.star)?;
    let nodes: Vec<usize> = (0..n).filter(|&i| is_zero(plus.get(i, i), tol)).collect();
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let closing = norm.normalised.get(i, j).otimes(norm.star.get(j, i))?;
            if !norm.normalised.get(i, j).is_eps() && is_zero(closing, tol) {
                arcs.push((j, i));
            }
        }
    }
    arcs.sort_unstable();
    Ok(CriticalGraph {
        node_count: n,
        lambda: norm.lambda,
        nodes,
        arcs,
    })
}

/// The critical graph of an irreducible matrix.
pub fn critical_graph<T: Scalar>(a: &MaxPlusMatrix<T>) -> Result<CriticalGraph<T::Field>> {
    critical_graph_tol(a, DEFAULT_TOLERANCE)
}

pub fn critical_graph_tol<T: Scalar>(
    a: &MaxPlusMatrix<T>,
    tol: f64,
) -> Result<CriticalGraph<T::Field>> {
    let norm = normalise(a, "critical_graph", tol)?;
    critical_from(&norm, tol)
}

/// Cyclicity of a graph given by its arcs, restricted to `nodes`.
///
/// Per MSCS: the gcd of `level(u) + 1 - level(v)` over its arcs, with levels
/// from a BFS rooted at the smallest node; lcm across MSCSs. A solitary node
/// without a self-loop contributes 1.
pub fn graph_cyclicity(node_count: usize, nodes: &[usize], arcs: &[(usize, usize)]) -> u64 {
    let mut succs = vec![Vec::new(); node_count];
    for &(from, to) in arcs {
        succs[from].push(to);
    }
    let sccs = scc_decompose_lists(&succs);
    let mut sigma: u64 = 1;
    for comp in &sccs.components {
        if nodes.binary_search(&comp[0]).is_err() {
            continue;
        }
        let c = sccs.component_of[comp[0]];
        let mut level = vec![usize::MAX; node_count];
        let mut queue = std::collections::VecDeque::from([comp[0]]);
        level[comp[0]] = 0;
        while let Some(u) = queue.pop_front() {
            for &v in &succs[u] {
                if sccs.component_of[v] == c && level[v] == usize::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        let mut g: u64 = 0;
        for &u in comp {
            for &v in &succs[u] {
                if sccs.component_of[v] == c {
                    let diff = (level[u] as i64 + 1 - level[v] as i64).unsigned_abs();
                    g = g.gcd(&diff);
                }
            }
        }
        sigma = sigma.lcm(&g.max(1));
    }
    sigma
}

/// `σ(A)`: the cyclicity of the critical graph of an irreducible matrix.
pub fn cyclicity<T: Scalar>(a: &MaxPlusMatrix<T>) -> Result<u64> {
    let cr = critical_graph(a)?;
    Ok(graph_cyclicity(cr.node_count, &cr.nodes, &cr.arcs))
}
