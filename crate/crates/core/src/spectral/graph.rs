use crate::error::Result;
use crate::semiring::{Ext, MaxPlusMatrix, Scalar};

/// A weighted arc `from -> to`, taken from the finite matrix entry `(to, from)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc<T> {
    pub from: usize,
    pub to: usize,
    pub weight: T,
}

/// `G(A)`: arc `j -> i` iff `a_ij != eps`. Nodes are 0-based internally.
#[derive(Clone, Debug, PartialEq)]
pub struct PrecedenceGraph<T> {
    node_count: usize,
    arcs: Vec<Arc<T>>,
    preds: Vec<Vec<usize>>,
    succs: Vec<Vec<usize>>,
}

impl<T: Scalar> PrecedenceGraph<T> {
    /// Arcs are listed by end node, then start node.
    pub fn from_matrix(a: &MaxPlusMatrix<T>) -> Result<Self> {
        let n = a.require_square("build_graph")?;
        let mut arcs = Vec::new();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        for i in 0..n {
            for j in 0..n {
                if let Ext::Fin(weight) = a.get(i, j) {
                    arcs.push(Arc {
                        from: j,
                        to: i,
                        weight,
                    });
                    preds[i].push(j);
                    succs[j].push(i);
                }
            }
        }
        for s in &mut succs {
            s.sort_unstable();
        }
        Ok(PrecedenceGraph {
            node_count: n,
            arcs,
            preds,
            succs,
        })
    }
}

impl<T> PrecedenceGraph<T> {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[Arc<T>] {
        &self.arcs
    }

    /// The neighbourhood `N_i = { j | a_ij != eps }`, ascending.
    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.preds[i]
    }

    pub fn successors(&self, j: usize) -> &[usize] {
        &self.succs[j]
    }

    pub fn successor_lists(&self) -> &[Vec<usize>] {
        &self.succs
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.preds[to].binary_search(&from).is_ok()
    }
}

/// `G(A)` for a square matrix.
pub fn build_graph<T: Scalar>(a: &MaxPlusMatrix<T>) -> Result<PrecedenceGraph<T>> {
    PrecedenceGraph::from_matrix(a)
}
