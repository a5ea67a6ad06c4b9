//! Precedence graphs, MSCS decomposition, eigenvalue, critical graph,
//! cyclicity and eigenspace of square max-plus matrices.
//!
//! All eigen-operations require an irreducible matrix and refuse reducible
//! input with [`Error::Reducible`](crate::Error::Reducible).

mod critical;
mod eigen;
mod graph;
mod karp;
mod scc;

pub use critical::{critical_graph, critical_graph_tol, cyclicity, graph_cyclicity, CriticalGraph};
pub use eigen::{
    analyze, analyze_tol, eigenspace_membership, eigenspace_membership_tol, eigenvectors, in_span,
    is_eigenvector, power_eigenspace, power_transient, SpectralSummary,
};
pub use graph::{build_graph, Arc, PrecedenceGraph};
pub use karp::max_cycle_mean;
pub use scc::{scc_decompose, scc_decompose_lists, SccDecomposition};

use crate::error::Result;
use crate::semiring::{MaxPlusMatrix, Scalar};

/// `A` is irreducible iff `G(A)` has exactly one MSCS.
pub fn is_irreducible<T: Scalar>(a: &MaxPlusMatrix<T>) -> Result<bool> {
    Ok(scc_decompose(&build_graph(a)?).len() == 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Ext;

    #[test]
    fn irreducibility_examples() {
        let diag = MaxPlusMatrix::<i64>::identity(3);
        assert!(!is_irreducible(&diag).unwrap());
        let lone = MaxPlusMatrix::<i64>::eps(1, 1);
        assert!(is_irreducible(&lone).unwrap());
        let mut ring = MaxPlusMatrix::<i64>::eps(3, 3);
        for i in 0..3 {
            ring.set((i + 1) % 3, i, Ext::Fin(1));
        }
        assert!(is_irreducible(&ring).unwrap());
    }
}
