use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::scalar::{Ext, Scalar, DEFAULT_TOLERANCE};
use super::vector::MaxPlusVector;
use crate::error::{Error, Result};

/// Dense matrix over `R_max`, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MaxPlusMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Ext<T>>,
}

impl<T: Scalar> MaxPlusMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Ext<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "matrix dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidParameter(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(MaxPlusMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: Vec<Vec<Ext<T>>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some((i, bad)) = rows.iter().enumerate().find(|(_, row)| row.len() != c) {
            return Err(Error::InvalidParameter(format!(
                "row {} has {} entries, expected {c}",
                i + 1,
                bad.len()
            )));
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    /// The all-`eps` matrix (annihilator).
    pub fn eps(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        MaxPlusMatrix {
            rows,
            cols,
            data: vec![Ext::Eps; rows * cols],
        }
    }

    /// `E(n, n)`: `e` on the diagonal, `eps` elsewhere.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::eps(n, n);
        for i in 0..n {
            m.data[i * n + i] = Ext::e();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub(crate) fn require_square(&self, op: &'static str) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                op,
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Ext<T> {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Ext<T>) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Ext<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> MaxPlusVector<T> {
        MaxPlusVector::from((0..self.rows).map(|i| self.get(i, j)).collect::<Vec<_>>())
    }

    pub fn entries(&self) -> &[Ext<T>] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<Ext<T>>> {
        self.data.chunks(self.cols).map(<[_]>::to_vec).collect()
    }

    pub fn to_field(&self) -> MaxPlusMatrix<T::Field> {
        MaxPlusMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.to_field()).collect(),
        }
    }

    /// Entry-wise equality; exact for integer and rational scalars.
    pub fn close(&self, other: &Self, tol: f64) -> bool {
        self.dims() == other.dims()
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.close(*b, tol))
    }

    /// `A ⊕ B`.
    pub fn oplus(&self, rhs: &Self) -> Result<Self> {
        if self.dims() != rhs.dims() {
            return Err(Error::DimensionMismatch {
                op: "mat_add",
                left: self.dims(),
                right: rhs.dims(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a.oplus(*b))
            .collect();
        Ok(MaxPlusMatrix { data, ..*self })
    }

    fn check_product(&self, rhs: &Self) -> Result<()> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                op: "mat_mul",
                left: self.dims(),
                right: rhs.dims(),
            });
        }
        Ok(())
    }

    fn product_row(&self, rhs: &Self, i: usize, out: &mut [Ext<T>]) -> Result<()> {
        for (j, slot) in out.iter_mut().enumerate() {
            let mut acc = Ext::Eps;
            for (k, a) in self.row(i).iter().enumerate() {
                acc = acc.oplus(
                    a.otimes(rhs.get(k, j))
                        .map_err(|_| Error::Overflow("mat_mul"))?,
                );
            }
            *slot = acc;
        }
        Ok(())
    }

    /// `A ⊗ B`.
    pub fn otimes(&self, rhs: &Self) -> Result<Self> {
        self.check_product(rhs)?;
        let mut data = vec![Ext::Eps; self.rows * rhs.cols];
        for (i, out) in data.chunks_mut(rhs.cols).enumerate() {
            self.product_row(rhs, i, out)?;
        }
        Ok(MaxPlusMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    /// `A ⊗ B` with rows computed on the rayon pool; identical to [`otimes`](Self::otimes).
    pub fn otimes_par(&self, rhs: &Self) -> Result<Self> {
        self.check_product(rhs)?;
        let mut data = vec![Ext::Eps; self.rows * rhs.cols];
        data.par_chunks_mut(rhs.cols)
            .enumerate()
            .try_for_each(|(i, out)| self.product_row(rhs, i, out))?;
        Ok(MaxPlusMatrix {
            rows: self.rows,
            cols: rhs.cols,
            data,
        })
    }

    /// `A ⊗ x`.
    pub fn apply(&self, x: &MaxPlusVector<T>) -> Result<MaxPlusVector<T>> {
        if self.cols != x.len() {
            return Err(Error::DimensionMismatch {
                op: "mat_vec",
                left: self.dims(),
                right: (x.len(), 1),
            });
        }
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x.entries())
                    .try_fold(Ext::Eps, |acc, (a, b)| {
                        Ok(acc.oplus(a.otimes(*b).map_err(|_| Error::Overflow("mat_vec"))?))
                    })
            })
            .collect::<Result<Vec<_>>>()
            .map(MaxPlusVector::from)
    }

    /// `α ⊗ A`.
    pub fn scale(&self, alpha: Ext<T>) -> Result<Self> {
        let data = self
            .data
            .iter()
            .map(|a| {
                alpha
                    .otimes(*a)
                    .map_err(|_| Error::Overflow("scalar_mat_mul"))
            })
            .collect::<Result<_>>()?;
        Ok(MaxPlusMatrix { data, ..*self })
    }

    /// `A^⊗k` by repeated squaring; `A^⊗0 = E(n, n)`.
    pub fn power(&self, k: u64) -> Result<Self> {
        let n = self.require_square("mat_power")?;
        let mut result = Self::identity(n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.otimes(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.otimes(&base)?;
            }
        }
        Ok(result)
    }

    /// Kleene star `A* = ⊕_{k=0}^{n-1} A^⊗k`.
    ///
    /// The truncation is exact when no circuit has positive weight; this is
    /// checked on the diagonals of `A^⊗k` for `k = 1..=n`, which cover every
    /// elementary circuit.
    pub fn kleene_star(&self) -> Result<Self> {
        self.kleene_star_tol(DEFAULT_TOLERANCE)
    }

    /// [`kleene_star`](Self::kleene_star) treating circuit weights within
    /// `tol` of zero as zero (only relevant in float mode).
    pub fn kleene_star_tol(&self, tol: f64) -> Result<Self> {
        let n = self.require_square("kleene_star")?;
        let mut star = Self::identity(n);
        let mut power = Self::identity(n);
        for k in 1..=n {
            power = power.otimes(self)?;
            for i in 0..n {
                if let Ext::Fin(d) = power.get(i, i) {
                    if d > T::zero() && !d.close(T::zero(), tol) {
                        return Err(Error::KleeneDiverges { node: i + 1 });
                    }
                }
            }
            if k < n {
                star = star.oplus(&power)?;
            }
        }
        Ok(star)
    }

    /// `A+ = A ⊗ A*`.
    pub fn kleene_plus(&self) -> Result<Self> {
        self.otimes(&self.kleene_star()?)
    }

    pub fn kleene_plus_tol(&self, tol: f64) -> Result<Self> {
        self.otimes(&self.kleene_star_tol(tol)?)
    }
}

impl<T: Scalar> fmt::Display for MaxPlusMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(bound(serialize = "T: Scalar", deserialize = "T: Scalar"))]
struct MatrixLiteral<T> {
    rows: usize,
    cols: usize,
    entries: Vec<Vec<Ext<T>>>,
}

impl<T: Scalar> Serialize for MaxPlusMatrix<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixLiteral {
            rows: self.rows,
            cols: self.cols,
            entries: self.to_rows(),
        }
        .serialize(s)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for MaxPlusMatrix<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let lit = MatrixLiteral::<T>::deserialize(d)?;
        if lit.entries.len() != lit.rows {
            return Err(serde::de::Error::custom(format!(
                "\"rows\" is {} but {} rows of entries were given",
                lit.rows,
                lit.entries.len()
            )));
        }
        if let Some(r) = lit.entries.iter().position(|r| r.len() != lit.cols) {
            return Err(serde::de::Error::custom(format!(
                "row {} has {} entries but \"cols\" is {}",
                r + 1,
                lit.entries[r].len(),
                lit.cols
            )));
        }
        MaxPlusMatrix::from_rows(lit.entries).map_err(serde::de::Error::custom)
    }
}

pub fn mat_add<T: Scalar>(a: &MaxPlusMatrix<T>, b: &MaxPlusMatrix<T>) -> Result<MaxPlusMatrix<T>> {
    a.oplus(b)
}

pub fn mat_mul<T: Scalar>(a: &MaxPlusMatrix<T>, b: &MaxPlusMatrix<T>) -> Result<MaxPlusMatrix<T>> {
    a.otimes(b)
}

pub fn mat_power<T: Scalar>(a: &MaxPlusMatrix<T>, k: u64) -> Result<MaxPlusMatrix<T>> {
    a.power(k)
}

pub fn scalar_mat_mul<T: Scalar>(alpha: Ext<T>, a: &MaxPlusMatrix<T>) -> Result<MaxPlusMatrix<T>> {
    a.scale(alpha)
}

pub fn kleene_star<T: Scalar>(a: &MaxPlusMatrix<T>) -> Result<MaxPlusMatrix<T>> {
    a.kleene_star()
}

pub fn kleene_plus<T: Scalar>(a: &MaxPlusMatrix<T>) -> Result<MaxPlusMatrix<T>> {
    a.kleene_plus()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::Rational;
    use proptest::prelude::*;

    const EPS: Ext<i64> = Ext::Eps;

    fn m(rows: &[&[Ext<i64>]]) -> MaxPlusMatrix<i64> {
        MaxPlusMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn f(v: i64) -> Ext<i64> {
        Ext::Fin(v)
    }

    #[test]
    fn add_examples() {
        let a = m(&[&[f(1), EPS], &[EPS, f(2)]]);
        let b = m(&[&[f(0), f(0)], &[EPS, EPS]]);
        assert_eq!(mat_add(&a, &b).unwrap(), m(&[&[f(1), f(0)], &[EPS, f(2)]]));
        assert_eq!(mat_add(&a, &a).unwrap(), a);
        assert_eq!(mat_add(&a, &MaxPlusMatrix::eps(2, 2)).unwrap(), a);
        assert!(matches!(
            mat_add(&a, &MaxPlusMatrix::eps(2, 3)),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mul_examples() {
        let d = m(&[&[f(2), EPS], &[EPS, f(3)]]);
        let ones = m(&[&[f(1)], &[f(1)]]);
        assert_eq!(mat_mul(&d, &ones).unwrap(), m(&[&[f(3)], &[f(4)]]));
        assert_eq!(mat_mul(&MaxPlusMatrix::identity(2), &d).unwrap(), d);
        assert!(mat_mul(&ones, &ones).is_err());
    }

    #[test]
    fn power_zero_and_one() {
        let a = m(&[&[f(1), f(-4)], &[EPS, f(2)]]);
        assert_eq!(mat_power(&a, 0).unwrap(), MaxPlusMatrix::identity(2));
        assert_eq!(mat_power(&a, 1).unwrap(), a);
        assert!(matches!(
            mat_power(&MaxPlusMatrix::<i64>::eps(1, 2), 2),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn scalar_multiple() {
        let a = m(&[&[f(1), EPS]]);
        assert_eq!(scalar_mat_mul(f(0), &a).unwrap(), a);
        assert_eq!(scalar_mat_mul(f(2), &a).unwrap(), m(&[&[f(3), EPS]]));
    }

    #[test]
    fn star_of_eps_matrix_is_identity() {
        let z = MaxPlusMatrix::<i64>::eps(3, 3);
        assert_eq!(kleene_star(&z).unwrap(), MaxPlusMatrix::identity(3));
        assert_eq!(kleene_plus(&z).unwrap(), z);
    }

    #[test]
    fn star_two_node_circuit() {
        // arcs 1->2 weight -1 (entry (2,1)) and 2->1 weight -2 (entry (1,2))
        let a = m(&[&[EPS, f(-2)], &[f(-1), EPS]]);
        let star = kleene_star(&a).unwrap();
        // path enumeration: 1->1 best is empty (0) vs circuit (-3); 2->1 is -2; 1->2 is -1
        assert_eq!(star, m(&[&[f(0), f(-2)], &[f(-1), f(0)]]));
    }

    #[test]
    fn star_diverges_on_positive_circuit() {
        let a = m(&[&[EPS, f(2)], &[f(-1), EPS]]);
        assert!(matches!(kleene_star(&a), Err(Error::KleeneDiverges { .. })));
    }

    #[test]
    fn plus_zero_self_loop() {
        let a = m(&[&[f(0)]]);
        assert_eq!(kleene_plus(&a).unwrap(), a);
    }

    #[test]
    fn overflow_fails_loudly() {
        let a = m(&[&[f(i64::MAX / 2 + 1)]]);
        assert!(matches!(a.power(2), Err(Error::Overflow(_))));
    }

    #[test]
    fn json_literal() {
        let a: MaxPlusMatrix<Rational> = serde_json::from_str(
            r#"{"rows":2,"cols":2,"entries":[[1,"eps"],[{"num":1,"den":2},0]]}"#,
        )
        .unwrap();
        assert_eq!(a.get(0, 1), Ext::Eps);
        assert_eq!(a.get(1, 0), Ext::Fin(Rational::new(1, 2)));
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(
            text,
            r#"{"rows":2,"cols":2,"entries":[[1,"eps"],[{"num":1,"den":2},0]]}"#
        );
        assert!(serde_json::from_str::<MaxPlusMatrix<i64>>(
            r#"{"rows":2,"cols":1,"entries":[[1]]}"#
        )
        .is_err());
    }

    fn entry() -> impl Strategy<Value = Ext<i64>> {
        prop_oneof![1 => Just(Ext::Eps), 4 => (-20i64..20).prop_map(Ext::Fin)]
    }

    fn square(n: usize) -> impl Strategy<Value = MaxPlusMatrix<i64>> {
        proptest::collection::vec(entry(), n * n)
            .prop_map(move |d| MaxPlusMatrix::new(n, n, d).unwrap())
    }

    fn triple(
    ) -> impl Strategy<Value = (MaxPlusMatrix<i64>, MaxPlusMatrix<i64>, MaxPlusMatrix<i64>)> {
        (1usize..=8).prop_flat_map(|n| (square(n), square(n), square(n)))
    }

    fn brute_product(a: &MaxPlusMatrix<i64>, b: &MaxPlusMatrix<i64>) -> MaxPlusMatrix<i64> {
        let mut out = MaxPlusMatrix::eps(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let best = (0..a.cols())
                    .filter_map(|k| Some(a.get(i, k).finite()? + b.get(k, j).finite()?))
                    .max();
                out.set(i, j, best.map_or(Ext::Eps, Ext::Fin));
            }
        }
        out
    }

    proptest! {
        #[test]
        fn semiring_laws((a, b, c) in triple()) {
            prop_assert_eq!(a.oplus(&b).unwrap(), b.oplus(&a).unwrap());
            prop_assert_eq!(a.oplus(&b).unwrap().oplus(&c).unwrap(), a.oplus(&b.oplus(&c).unwrap()).unwrap());
            prop_assert_eq!(a.oplus(&a).unwrap(), a.clone());
            let ab_c = a.otimes(&b).unwrap().otimes(&c).unwrap();
            let a_bc = a.otimes(&b.otimes(&c).unwrap()).unwrap();
            prop_assert_eq!(ab_c, a_bc);
            let left = a.otimes(&b.oplus(&c).unwrap()).unwrap();
            let right = a.otimes(&b).unwrap().oplus(&a.otimes(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
            let n = a.rows();
            let id = MaxPlusMatrix::identity(n);
            let zero = MaxPlusMatrix::eps(n, n);
            prop_assert_eq!(id.otimes(&a).unwrap(), a.clone());
            prop_assert_eq!(a.otimes(&id).unwrap(), a.clone());
            prop_assert_eq!(zero.otimes(&a).unwrap(), zero.clone());
            prop_assert_eq!(a.otimes(&zero).unwrap(), zero);
        }

        #[test]
        fn product_matches_brute_force((a, b, _c) in triple()) {
            prop_assert_eq!(a.otimes(&b).unwrap(), brute_product(&a, &b));
            prop_assert_eq!(a.otimes_par(&b).unwrap(), a.otimes(&b).unwrap());
        }

        #[test]
        fn power_exponent_law(a in (1usize..=6).prop_flat_map(square), j in 0u64..=6, k in 0u64..=6) {
            let lhs = a.power(j + k).unwrap();
            let rhs = a.power(j).unwrap().otimes(&a.power(k).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn star_fixed_point(a in (1usize..=6).prop_flat_map(square)) {
            // shift everything down so that most instances have a star
            let shifted = a.scale(Ext::Fin(-20)).unwrap();
            if let Ok(star) = shifted.kleene_star() {
                let n = a.rows();
                let lhs = shifted.otimes(&star).unwrap().oplus(&MaxPlusMatrix::identity(n)).unwrap();
                prop_assert_eq!(lhs, star.clone());
                for i in 0..n {
                    prop_assert!(star.get(i, i) >= Ext::e());
                }
            }
        }
    }

    #[test]
    fn power_five_two_association_orders() {
        let a = m(&[
            &[f(3), f(-1), EPS, f(2)],
            &[f(0), EPS, f(4), EPS],
            &[EPS, f(1), f(-2), f(5)],
            &[f(2), EPS, f(0), f(1)],
        ]);
        let chain = (0..4).fold(a.clone(), |acc, _| acc.otimes(&a).unwrap());
        let sq = a.otimes(&a).unwrap();
        let nested = sq.otimes(&sq).unwrap().otimes(&a).unwrap();
        assert_eq!(a.power(5).unwrap(), chain);
        assert_eq!(chain, nested);
    }
}
