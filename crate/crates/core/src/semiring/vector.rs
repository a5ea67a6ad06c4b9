use std::fmt;

use serde::{Deserialize, Serialize};

use super::scalar::{Ext, Scalar};
use crate::error::{Error, Result};

/// Column vector over `R_max`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
pub struct MaxPlusVector<T>(Vec<Ext<T>>);

impl<T: Scalar> MaxPlusVector<T> {
    /// The unit vector `u` (all entries `e`).
    pub fn unit(n: usize) -> Self {
        MaxPlusVector(vec![Ext::e(); n])
    }

    pub fn eps(n: usize) -> Self {
        MaxPlusVector(vec![Ext::Eps; n])
    }

    pub fn from_finite(values: impl IntoIterator<Item = T>) -> Self {
        MaxPlusVector(values.into_iter().map(Ext::Fin).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> Ext<T> {
        self.0[i]
    }

    pub fn entries(&self) -> &[Ext<T>] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| !x.is_eps())
    }

    /// Finite entries, or the index of the first `eps`.
    pub fn finite_values(&self) -> Result<Vec<T>> {
        self.0
            .iter()
            .enumerate()
            .map(|(index, x)| x.finite().ok_or(Error::NonFiniteInitial { index }))
            .collect()
    }

    pub fn oplus(&self, rhs: &Self) -> Result<Self> {
        if self.len() != rhs.len() {
            return Err(Error::DimensionMismatch {
                op: "vec_add",
                left: (self.len(), 1),
                right: (rhs.len(), 1),
            });
        }
        Ok(MaxPlusVector(
            self.0
                .iter()
                .zip(&rhs.0)
                .map(|(a, b)| a.oplus(*b))
                .collect(),
        ))
    }

    /// `α ⊗ v`.
    pub fn scale(&self, alpha: Ext<T>) -> Result<Self> {
        self.0
            .iter()
            .map(|x| alpha.otimes(*x))
            .collect::<Result<Vec<_>>>()
            .map(MaxPlusVector)
    }

    pub fn close(&self, other: &Self, tol: f64) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.close(*b, tol))
    }

    pub fn to_field(&self) -> MaxPlusVector<T::Field> {
        MaxPlusVector(self.0.iter().map(|x| x.to_field()).collect())
    }
}

impl<T> From<Vec<Ext<T>>> for MaxPlusVector<T> {
    fn from(v: Vec<Ext<T>>) -> Self {
        MaxPlusVector(v)
    }
}

impl<T: Scalar> fmt::Display for MaxPlusVector<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(", "))
    }
}
