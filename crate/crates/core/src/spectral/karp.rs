//! Maximum cycle mean by Karp's recurrence, run per strongly connected component.

use super::graph::PrecedenceGraph;
use super::scc::scc_decompose;
use crate::error::{Error, Result};
use crate::semiring::{Ext, Field, MaxPlusMatrix, Scalar};

/// `λ(A)`: the maximum over elementary circuits of weight / length.
///
/// Exact in integer and rational mode; integer inputs yield a rational.
pub fn max_cycle_mean<T: Scalar>(a: &MaxPlusMatrix<T>) -> Result<T::Field> {
    let g = PrecedenceGraph::from_matrix(&a.to_field())?;
    let sccs = scc_decompose(&g);
    let mut best: Option<T::Field> = None;
    for comp in &sccs.components {
        if let Some(mean) = component_cycle_mean(&g, comp)? {
            best = Some(match best {
                Some(b) if b >= mean => b,
                _ => mean,
            });
        }
    }
    best.ok_or(Error::NoCircuit)
}

/// Karp on the subgraph induced by one strongly connected component.
/// Returns `None` for a solitary node without a self-loop.
pub(crate) fn component_cycle_mean<F: Field>(
    g: &PrecedenceGraph<F>,
    comp: &[usize],
) -> Result<Option<F>> {
    let m = comp.len();
    let mut local = vec![usize::MAX; g.node_count()];
    for (k, &v) in comp.iter().enumerate() {
        local[v] = k;
    }
    let arcs: Vec<(usize, usize, F)> = g
        .arcs()
        .iter()
        .filter(|a| local[a.from] != usize::MAX && local[a.to] != usize::MAX)
        .map(|a| (local[a.from], local[a.to], a.weight))
        .collect();
    if arcs.is_empty() {
        return Ok(None);
    }

    // walks[k][v]: heaviest walk of exactly k arcs from the source (local node 0) to v
    let mut walks = vec![vec![Ext::<F>::Eps; m]; m + 1];
    walks[0][0] = Ext::e();
    for k in 1..=m {
        let (done, rest) = walks.split_at_mut(k);
        let prev = &done[k - 1];
        let cur = &mut rest[0];
        for &(u, v, w) in &arcs {
            let cand = prev[u]
                .otimes(Ext::Fin(w))
                .map_err(|_| Error::Overflow("max_cycle_mean"))?;
            cur[v] = cur[v].oplus(cand);
        }
    }

    let mut best: Option<F> = None;
    for v in 0..m {
        let Ext::Fin(full) = walks[m][v] else {
            continue;
        };
        let mut worst: Option<F> = None;
        for (k, row) in walks.iter().enumerate().take(m) {
            let Ext::Fin(partial) = row[v] else { continue };
            let diff = full
                .checked_sub(partial)
                .ok_or(Error::Overflow("max_cycle_mean"))?;
            let mean = diff
                .checked_div_int((m - k) as i64)
                .ok_or(Error::Overflow("max_cycle_mean"))?;
            worst = Some(match worst {
                Some(w) if w <= mean => w,
                _ => mean,
            });
        }
        if let Some(w) = worst {
            best = Some(match best {
                Some(b) if b >= w => b,
                _ => w,
            });
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Rational;

    fn f(v: i64) -> Ext<i64> {
        Ext::Fin(v)
    }

    #[test]
    fn single_self_loop() {
        let a = MaxPlusMatrix::from_rows(vec![vec![f(5)]]).unwrap();
        assert_eq!(max_cycle_mean(&a).unwrap(), Rational::from_integer(5));
    }

    #[test]
    fn two_cycle_mean() {
        let a = MaxPlusMatrix::from_rows(vec![vec![Ext::Eps, f(3)], vec![f(7), Ext::Eps]]).unwrap();
        assert_eq!(max_cycle_mean(&a).unwrap(), Rational::from_integer(5));
    }

    #[test]
    fn fractional_mean() {
        let a = MaxPlusMatrix::from_rows(vec![vec![Ext::Eps, f(2)], vec![f(3), Ext::Eps]]).unwrap();
        assert_eq!(max_cycle_mean(&a).unwrap(), Rational::new(5, 2));
    }

    #[test]
    fn acyclic_has_no_eigenvalue() {
        let a =
            MaxPlusMatrix::from_rows(vec![vec![Ext::Eps, Ext::Eps], vec![f(1), Ext::Eps]]).unwrap();
        assert!(matches!(max_cycle_mean(&a), Err(Error::NoCircuit)));
    }

    #[test]
    fn reducible_takes_max_over_components() {
        // 1 <-> 2 with mean 1, 3 self-loop of 4, arc 2 -> 3 of weight 100
        let e = Ext::Eps;
        let a = MaxPlusMatrix::from_rows(vec![
            vec![e, f(1), e],
            vec![f(1), e, e],
            vec![e, f(100), f(4)],
        ])
        .unwrap();
        assert_eq!(max_cycle_mean(&a).unwrap(), Rational::from_integer(4));
    }
}
