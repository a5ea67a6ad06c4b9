//! Iteration of `x(k+1) = P ⊗ x(k)` and detection of its periodic regime.

use std::collections::HashMap;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::semiring::{Ext, Field, MaxPlusMatrix, MaxPlusVector, Scalar};
use crate::spectral::{analyze, max_cycle_mean, SpectralSummary};

/// `x(0), x(1), ..., x(k_max)` for a fixed `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    p: MaxPlusMatrix<T>,
    states: Vec<MaxPlusVector<T>>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn matrix(&self) -> &MaxPlusMatrix<T> {
        &self.p
    }

    pub fn states(&self) -> &[MaxPlusVector<T>] {
        &self.states
    }

    pub fn x(&self, k: usize) -> &MaxPlusVector<T> {
        &self.states[k]
    }

    pub fn k_max(&self) -> usize {
        self.states.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.p.rows()
    }

    /// Extend in place so that `x(k_max)` exists.
    pub fn extend_to(&mut self, k_max: usize) -> Result<()> {
        while self.k_max() < k_max {
            let next = self
                .p
                .apply(self.states.last().expect("nonempty trajectory"))?;
            self.states.push(next);
        }
        Ok(())
    }

    /// `x_i(k) / k` for every node, `k >= 1`.
    pub fn finite_estimates(&self, k: usize) -> Result<Vec<T::Field>> {
        if k == 0 || k > self.k_max() {
            return Err(Error::InvalidParameter(format!(
                "estimate needs 1 <= k <= {}, got {k}",
                self.k_max()
            )));
        }
        self.states[k]
            .entries()
            .iter()
            .map(|x| {
                let v = x
                    .finite()
                    .ok_or(Error::Undefined(format!("x({k}) has an eps entry")))?;
                v.to_field()
                    .checked_div_int(k as i64)
                    .ok_or(Error::Overflow("finite_estimates"))
            })
            .collect()
    }

    /// CSV with columns `k, x_1..x_N, y_1..y_N`.
    pub fn to_csv(&self, lambda: T::Field) -> Result<String> {
        let norm = normalize(self, lambda)?;
        let n = self.dim();
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["k".to_string()];
        header.extend((1..=n).map(|i| format!("x_{i}")));
        header.extend((1..=n).map(|i| format!("y_{i}")));
        w.write_record(&header)?;
        for (k, (x, y)) in self.states.iter().zip(norm.states()).enumerate() {
            let mut row = vec![k.to_string()];
            row.extend(x.entries().iter().map(|v| v.to_string()));
            row.extend(y.entries().iter().map(|v| v.to_string()));
            w.write_record(&row)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Error::Internal(format!("csv buffer: {e}")))?;
        String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
    }
}

/// Iterate `k_max` steps from a finite `x0`.
pub fn iterate<T: Scalar>(
    p: &MaxPlusMatrix<T>,
    x0: &MaxPlusVector<T>,
    k_max: usize,
) -> Result<Trajectory<T>> {
    if !p.is_square() {
        return Err(Error::NotSquare {
            op: "iterate",
            rows: p.rows(),
            cols: p.cols(),
        });
    }
    if x0.len() != p.rows() {
        return Err(Error::DimensionMismatch {
            op: "iterate",
            left: p.dims(),
            right: (x0.len(), 1),
        });
    }
    x0.finite_values()?;
    let mut traj = Trajectory {
        p: p.clone(),
        states: vec![x0.clone()],
    };
    traj.extend_to(k_max)?;
    Ok(traj)
}

/// `y(k) = x(k) - λk`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedTrajectory<F> {
    pub lambda: F,
    y: Vec<MaxPlusVector<F>>,
}

impl<F: Field> NormalizedTrajectory<F> {
    pub fn states(&self) -> &[MaxPlusVector<F>] {
        &self.y
    }

    pub fn y(&self, k: usize) -> &MaxPlusVector<F> {
        &self.y[k]
    }
}

fn normalize_one<T: Scalar>(
    x: &MaxPlusVector<T>,
    lambda: T::Field,
    k: usize,
) -> Result<MaxPlusVector<T::Field>> {
    let shift = lambda
        .checked_mul_int(k as i64)
        .and_then(|s| s.checked_neg())
        .ok_or(Error::Overflow("normalize"))?;
    x.to_field().scale(Ext::Fin(shift))
}

pub fn normalize<T: Scalar>(
    traj: &Trajectory<T>,
    lambda: T::Field,
) -> Result<NormalizedTrajectory<T::Field>> {
    let y = traj
        .states
        .iter()
        .enumerate()
        .map(|(k, x)| normalize_one(x, lambda, k))
        .collect::<Result<_>>()?;
    Ok(NormalizedTrajectory { lambda, y })
}

fn ser_raw<F: Scalar, S: Serializer>(v: &F, s: S) -> std::result::Result<S::Ok, S::Error> {
    v.to_raw().serialize(s)
}

/// Transient, period, shift and limiting contours of a trajectory.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(bound = "F: Field")]
pub struct RegimeReport<F> {
    pub k_star: usize,
    pub rho: usize,
    #[serde(serialize_with = "ser_raw")]
    pub mu: F,
    #[serde(serialize_with = "ser_raw")]
    pub lambda: F,
    /// `y(k*), ..., y(k* + rho - 1)`.
    pub contours: Vec<MaxPlusVector<F>>,
}

impl<F: Field> RegimeReport<F> {
    /// `mu / rho`.
    pub fn cycletime(&self) -> Result<F> {
        self.mu
            .checked_div_int(self.rho as i64)
            .ok_or(Error::Overflow("cycletime"))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Default search cap `10 N^2 + 10 σ`.
pub fn default_cap(n: usize, sigma: u64) -> usize {
    10 * n * n + 10 * sigma as usize
}

type Key = Vec<Option<(i64, i64)>>;

fn key_of<F: Scalar>(y: &MaxPlusVector<F>) -> Result<Key> {
    y.entries()
        .iter()
        .map(|v| match v {
            Ext::Eps => Ok(None),
            Ext::Fin(x) => x.exact_key().map(Some).ok_or_else(|| {
                Error::InvalidParameter(
                    "regime detection needs exact arithmetic (int or rational mode)".into(),
                )
            }),
        })
        .collect()
}

/// Detect the regime with the default cap.
pub fn detect_regime<T: Scalar>(
    traj: &Trajectory<T>,
    spectral: &SpectralSummary<T::Field>,
) -> Result<RegimeReport<T::Field>> {
    detect_regime_capped(traj, spectral, default_cap(traj.dim(), spectral.sigma))
}

/// Smallest `k*` and `rho` with `y(k + rho) = y(k)` for `k >= k*`, found by
/// hashing `y(k)` for `k <= cap`. Iterates past the end of `traj` as needed.
pub fn detect_regime_capped<T: Scalar>(
    traj: &Trajectory<T>,
    spectral: &SpectralSummary<T::Field>,
    cap: usize,
) -> Result<RegimeReport<T::Field>> {
    let lambda = spectral.lambda;
    let mut seen: HashMap<Key, usize> = HashMap::new();
    let mut ys: Vec<MaxPlusVector<T::Field>> = Vec::new();
    let mut xs: Vec<MaxPlusVector<T>> = Vec::new();
    let mut x = traj.x(0).clone();
    for k in 0..=cap {
        if k > 0 {
            x = match traj.states.get(k) {
                Some(s) => s.clone(),
                None => traj.p.apply(&x)?,
            };
        }
        let y = normalize_one(&x, lambda, k)?;
        let key = key_of(&y)?;
        if let Some(&k_star) = seen.get(&key) {
            let rho = k - k_star;
            for d in (1..rho).filter(|d| rho % d == 0) {
                if ys[k_star + d] == ys[k_star] {
                    return Err(Error::Internal(format!(
                        "period {rho} is not minimal, {d} also repeats"
                    )));
                }
            }
            let mu = lambda
                .checked_mul_int(rho as i64)
                .ok_or(Error::Overflow("detect_regime"))?;
            for (now, then) in x.entries().iter().zip(xs[k_star].entries()) {
                if let (Ext::Fin(a), Ext::Fin(b)) = (now, then) {
                    let observed = a
                        .to_field()
                        .checked_sub(b.to_field())
                        .ok_or(Error::Overflow("detect_regime"))?;
                    if observed != mu {
                        return Err(Error::Internal(format!(
                            "observed shift {observed} differs from rho * lambda = {mu}"
                        )));
                    }
                }
            }
            return Ok(RegimeReport {
                k_star,
                rho,
                mu,
                lambda,
                contours: ys[k_star..].to_vec(),
            });
        }
        seen.insert(key, k);
        ys.push(y);
        xs.push(x.clone());
    }
    Err(Error::RegimeCapExceeded { cap, last_k: cap })
}

/// The cycletime `mu / rho`, identical for every node.
pub fn cycletime_estimate<T: Scalar>(
    traj: &Trajectory<T>,
    spectral: &SpectralSummary<T::Field>,
) -> Result<T::Field> {
    detect_regime(traj, spectral)?.cycletime()
}

/// Re-check a report against `P` by direct multiplication.
pub fn verify_regime<T: Scalar>(report: &RegimeReport<T::Field>, p: &MaxPlusMatrix<T>) -> bool {
    check_regime(report, p).unwrap_or(false)
}

fn check_regime<T: Scalar>(report: &RegimeReport<T::Field>, p: &MaxPlusMatrix<T>) -> Result<bool> {
    let rho = report.rho;
    if rho == 0 || report.contours.len() != rho {
        return Ok(false);
    }
    if max_cycle_mean(p)? != report.lambda {
        return Ok(false);
    }
    let sigma = analyze(p)?.sigma as usize;
    if sigma % rho != 0 {
        return Ok(false);
    }
    let mu = match report.lambda.checked_mul_int(rho as i64) {
        Some(m) => m,
        None => return Ok(false),
    };
    if mu != report.mu {
        return Ok(false);
    }
    let pf = p.to_field();
    let neg = report
        .lambda
        .checked_neg()
        .ok_or(Error::Overflow("verify_regime"))?;
    let p_hat = pf.scale(Ext::Fin(neg))?;
    let p_rho = pf.power(rho as u64)?;
    for (j, v) in report.contours.iter().enumerate() {
        if v.len() != p.rows() {
            return Ok(false);
        }
        if p_rho.apply(v)? != v.scale(Ext::Fin(mu))? {
            return Ok(false);
        }
        if p_hat.apply(v)? != report.contours[(j + 1) % rho] {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_p, random_parameters, NetworkSpec, TimingParameters};
    use crate::semiring::Rational;

    fn q(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    #[test]
    fn scalar_recursion() {
        let p = MaxPlusMatrix::from_rows(vec![vec![Ext::Fin(6i64)]]).unwrap();
        let t = iterate(&p, &MaxPlusVector::unit(1), 5).unwrap();
        for k in 0..=5 {
            assert_eq!(t.x(k).get(0), Ext::Fin(6 * k as i64));
        }
        let s = analyze(&p).unwrap();
        assert_eq!(cycletime_estimate(&t, &s).unwrap(), q(6));
    }

    #[test]
    fn uniform_ring_moves_in_lockstep() {
        let spec = NetworkSpec::regular_ring(8, 3).unwrap();
        let p = build_p(&spec, &TimingParameters::uniform(&spec, 5i64, 2)).unwrap();
        let t = iterate(&p, &MaxPlusVector::unit(8), 12).unwrap();
        for k in 0..=12 {
            assert_eq!(t.x(k), &MaxPlusVector::from_finite(vec![7 * k as i64; 8]));
        }
        let s = analyze(&p).unwrap();
        let n = normalize(&t, s.lambda).unwrap();
        for y in n.states() {
            assert_eq!(y, &MaxPlusVector::unit(8));
        }
        let r = detect_regime(&t, &s).unwrap();
        assert_eq!((r.k_star, r.rho), (0, 1));
        assert_eq!(r.mu, q(7));
        assert!(verify_regime(&r, &p));
    }

    #[test]
    fn eigenvector_start_is_immediately_periodic() {
        let spec = NetworkSpec::regular_ring(6, 3).unwrap();
        let params = random_parameters(&spec, 11, (1, 30), (1, 10)).unwrap();
        let p = build_p(&spec, &params).unwrap();
        let s = analyze(&p).unwrap();
        let v = &s.eigenbasis[0];
        assert!(s.lambda.is_integer());
        // shift to integers; eigenvector entries of an integer matrix with integer λ are integers
        let x0 = MaxPlusVector::from_finite(
            v.entries().iter().map(|e| e.finite().unwrap().to_integer()),
        );
        let t = iterate(&p, &x0, 6).unwrap();
        for k in 0..=6 {
            let expect = v.scale(Ext::Fin(s.lambda * q(k as i64))).unwrap();
            assert_eq!(t.x(k).to_field(), expect);
        }
        let r = detect_regime(&t, &s).unwrap();
        assert_eq!((r.k_star, r.rho), (0, 1));
        assert_eq!(r.mu, s.lambda);
    }

    #[test]
    fn rejects_eps_initial_condition() {
        let p = MaxPlusMatrix::from_rows(vec![vec![Ext::Fin(1i64)]]).unwrap();
        let x0 = MaxPlusVector::from(vec![Ext::Eps]);
        assert!(matches!(
            iterate(&p, &x0, 3),
            Err(Error::NonFiniteInitial { index: 0 })
        ));
    }

    #[test]
    fn two_routes_to_normalised_states() {
        let spec = NetworkSpec::regular_ring(7, 3).unwrap();
        let params = random_parameters(&spec, 5, (1, 30), (1, 10)).unwrap();
        let p = build_p(&spec, &params).unwrap();
        let s = analyze(&p).unwrap();
        let x0 = MaxPlusVector::from_finite([3i64, 0, 9, 1, 4, 4, 2]);
        let t = iterate(&p, &x0, 40).unwrap();
        let n = normalize(&t, s.lambda).unwrap();
        let p_hat = p.to_field().scale(Ext::Fin(-s.lambda)).unwrap();
        for k in 0..40 {
            assert_eq!(&p_hat.apply(n.y(k)).unwrap(), n.y(k + 1));
        }
    }

    #[test]
    fn period_two_regime_and_tampering() {
        // 2-cycle with equal weights and no self-loops: σ = 2
        let p = MaxPlusMatrix::from_rows(vec![
            vec![Ext::Eps, Ext::Fin(3i64)],
            vec![Ext::Fin(3), Ext::Eps],
        ])
        .unwrap();
        let s = analyze(&p).unwrap();
        assert_eq!(s.sigma, 2);
        let t = iterate(&p, &MaxPlusVector::from_finite([0, 5]), 0).unwrap();
        let r = detect_regime(&t, &s).unwrap();
        assert_eq!((r.k_star, r.rho), (0, 2));
        assert_eq!(r.mu, q(6));
        assert!(verify_regime(&r, &p));

        let mut longer = r.clone();
        longer.rho = 3;
        longer.mu = q(9);
        longer.contours.push(longer.contours[0].clone());
        assert!(!verify_regime(&longer, &p));

        let mut bent = r.clone();
        let mut e = bent.contours[1].entries().to_vec();
        e[0] = e[0].otimes(Ext::Fin(q(1))).unwrap();
        bent.contours[1] = MaxPlusVector::from(e);
        assert!(!verify_regime(&bent, &p));
    }

    #[test]
    fn cap_exceeded_is_reported() {
        let spec = NetworkSpec::regular_ring(5, 3).unwrap();
        let params = random_parameters(&spec, 1, (1, 30), (1, 10)).unwrap();
        let p = build_p(&spec, &params).unwrap();
        let s = analyze(&p).unwrap();
        let x0 = MaxPlusVector::from_finite([0i64, 1000, 0, 0, 0]);
        let t = iterate(&p, &x0, 0).unwrap();
        assert!(matches!(
            detect_regime_capped(&t, &s, 1),
            Err(Error::RegimeCapExceeded { cap: 1, .. })
        ));
    }

    #[test]
    fn csv_and_json_shapes() {
        let p = MaxPlusMatrix::from_rows(vec![
            vec![Ext::Fin(2i64), Ext::Fin(1)],
            vec![Ext::Fin(1), Ext::Fin(3)],
        ])
        .unwrap();
        let s = analyze(&p).unwrap();
        let t = iterate(&p, &MaxPlusVector::unit(2), 2).unwrap();
        let csv = t.to_csv(s.lambda).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("k,x_1,x_2,y_1,y_2"));
        assert_eq!(lines.next(), Some("0,0,0,0,0"));
        assert_eq!(lines.next(), Some("1,2,3,-1,0"));
        let r = detect_regime(&t, &s).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json().unwrap()).unwrap();
        assert_eq!(v["lambda"], 3);
        assert_eq!(v["rho"], 1);
        assert!(v["contours"].is_array());
    }
}
