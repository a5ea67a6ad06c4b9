use serde::Serialize;

use super::critical::{critical_from, graph_cyclicity, normalise, CriticalGraph};
use crate::error::{Error, Result};
use crate::semiring::{Ext, Field, MaxPlusMatrix, MaxPlusVector, Scalar, DEFAULT_TOLERANCE};

/// Eigenvalue, cyclicity, critical graph and eigenspace basis of an
/// irreducible matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralSummary<F> {
    pub lambda: F,
    pub sigma: u64,
    pub critical: CriticalGraph<F>,
    /// One column of `Â*` per MSCS of the critical graph, ascending by node.
    pub eigenbasis: Vec<MaxPlusVector<F>>,
    /// Every critical column of `Â*`, in critical-node order.
    pub critical_columns: Vec<MaxPlusVector<F>>,
}

#[derive(Serialize)]
#[serde(bound = "F: Field")]
struct SummaryJson<'a, F> {
    lambda: Ext<F>,
    sigma: u64,
    critical_nodes: Vec<usize>,
    critical_arcs: Vec<[usize; 2]>,
    eigenbasis: &'a [MaxPlusVector<F>],
}

impl<F: Field> SpectralSummary<F> {
    /// JSON with 1-based node indices.
    pub fn to_json(&self) -> Result<String> {
        let doc = SummaryJson {
            lambda: Ext::Fin(self.lambda),
            sigma: self.sigma,
            critical_nodes: self.critical.nodes.iter().map(|i| i + 1).collect(),
            critical_arcs: self
                .critical
                .arcs
                .iter()
                .map(|&(j, i)| [j + 1, i + 1])
                .collect(),
            eigenbasis: &self.eigenbasis,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// Spectral analysis of an irreducible matrix.
pub fn analyze<T: Scalar>(a: &MaxPlusMatrix<T>) -> Result<SpectralSummary<T::Field>> {
    analyze_tol(a, DEFAULT_TOLERANCE)
}

pub fn analyze_tol<T: Scalar>(a: &MaxPlusMatrix<T>, tol: f64) -> Result<SpectralSummary<T::Field>> {
    let norm = normalise(a, "spectral analysis", tol)?;
    let critical = critical_from(&norm, tol)?;
    let sigma = graph_cyclicity(critical.node_count, &critical.nodes, &critical.arcs);
    let critical_columns = critical
        .nodes
        .iter()
        .map(|&i| norm.star.column(i))
        .collect();
    let eigenbasis = critical
        .components()
        .iter()
        .map(|c| norm.star.column(c[0]))
        .collect();
    Ok(SpectralSummary {
        lambda: norm.lambda,
        sigma,
        critical,
        eigenbasis,
        critical_columns,
    })
}

/// Critical columns of `Â*`, one per critical MSCS; each satisfies `A ⊗ v = λ ⊗ v`.
pub fn eigenvectors<T: Scalar>(a: &MaxPlusMatrix<T>) -> Result<Vec<MaxPlusVector<T::Field>>> {
    Ok(analyze(a)?.eigenbasis)
}

/// Largest coefficient `c` with `c ⊗ basis <= v`, or `eps` if none is finite.
fn residual<F: Field>(v: &MaxPlusVector<F>, basis: &MaxPlusVector<F>) -> Result<Ext<F>> {
    let mut coeff: Option<Ext<F>> = None;
    for (vr, br) in v.entries().iter().zip(basis.entries()) {
        let Ext::Fin(b) = *br else { continue };
        let c = match *vr {
            Ext::Eps => Ext::Eps,
            Ext::Fin(x) => Ext::Fin(x.checked_sub(b).ok_or(Error::Overflow("residuation"))?),
        };
        coeff = Some(match coeff {
            Some(cur) if cur <= c => cur,
            _ => c,
        });
    }
    Ok(coeff.unwrap_or(Ext::Eps))
}

/// Whether `v` is a max-plus combination of the given generators.
pub fn in_span<F: Field>(
    generators: &[MaxPlusVector<F>],
    v: &MaxPlusVector<F>,
    tol: f64,
) -> Result<bool> {
    let n = v.len();
    let mut rebuilt = MaxPlusVector::eps(n);
    for b in generators {
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                op: "eigenspace_membership",
                left: (b.len(), 1),
                right: (n, 1),
            });
        }
        let c = residual(v, b)?;
        rebuilt = rebuilt.oplus(&b.scale(c)?)?;
    }
    Ok(rebuilt.close(v, tol))
}

/// Membership in the eigenspace `{ ⊕ a_i ⊗ [Â*]_.i : i critical }`.
///
/// The all-`eps` vector is a member (all coefficients `eps`).
pub fn eigenspace_membership<T: Scalar>(
    a: &MaxPlusMatrix<T>,
    v: &MaxPlusVector<T::Field>,
) -> Result<bool> {
    eigenspace_membership_tol(a, v, DEFAULT_TOLERANCE)
}

pub fn eigenspace_membership_tol<T: Scalar>(
    a: &MaxPlusMatrix<T>,
    v: &MaxPlusVector<T::Field>,
    tol: f64,
) -> Result<bool> {
    let summary = analyze_tol(a, tol)?;
    in_span(&summary.critical_columns, v, tol)
}

/// Direct check of `A ⊗ v = λ ⊗ v`.
pub fn is_eigenvector<F: Field>(
    a: &MaxPlusMatrix<F>,
    lambda: F,
    v: &MaxPlusVector<F>,
    tol: f64,
) -> Result<bool> {
    if v.entries().iter().all(|x| x.is_eps()) {
        return Ok(false);
    }
    Ok(a.apply(v)?.close(&v.scale(Ext::Fin(lambda))?, tol))
}

/// Smallest `k <= cap` with `A^⊗(k+σ) = (σ·λ) ⊗ A^⊗k`.
///
/// Once the identity holds at some `k` it holds for every later power.
pub fn power_transient<T: Scalar>(a: &MaxPlusMatrix<T>, cap: usize) -> Result<usize> {
    let summary = analyze(a)?;
    let af = a.to_field();
    let shift = summary
        .lambda
        .checked_mul_int(summary.sigma as i64)
        .ok_or(Error::Overflow("power_transient"))?;
    let mut low = MaxPlusMatrix::identity(af.rows());
    let mut high = af.power(summary.sigma)?;
    for k in 0..=cap {
        if high.close(&low.scale(Ext::Fin(shift))?, DEFAULT_TOLERANCE) {
            return Ok(k);
        }
        low = low.otimes(&af)?;
        high = high.otimes(&af)?;
    }
    Err(Error::RegimeCapExceeded { cap, last_k: cap })
}

/// Eigenspace generators of `B = A^⊗p`, as used for the contour shapes of
/// period-`p` regimes. Fails with [`Error::Reducible`] when `B` is reducible.
pub fn power_eigenspace<T: Scalar>(
    a: &MaxPlusMatrix<T>,
    p: u64,
) -> Result<SpectralSummary<T::Field>> {
    let b = a.to_field().power(p)?;
    analyze(&b)
}
