use super::rule::CARule;
use super::state::CAState;
use super::sync::GlobalMap;
use crate::error::{Error, Result};
use crate::network::{build_p, NetworkSpec, TimingParameters};
use crate::semiring::{MaxPlusVector, Scalar};
use crate::trajectory::{iterate, Trajectory};

/// Cell `cell` holds `state` on `[start, end)`; `k` is the contour it was set on.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoldInterval<T> {
    pub cell: usize,
    pub k: usize,
    pub start: T,
    pub end: T,
    pub state: bool,
}

/// A CA evolved on the contours of a max-plus timed network.
#[derive(Clone, Debug)]
pub struct AsyncRun<T> {
    spec: NetworkSpec,
    params: TimingParameters<T>,
    rule: CARule,
    trajectory: Trajectory<T>,
    states: Vec<CAState>,
    /// `times[i][k] = x_i(k)`, for searching.
    times: Vec<Vec<T>>,
}

/// Contour times from `P`, contour states from the synchronous map.
pub fn async_run<T: Scalar>(
    rule: CARule,
    spec: &NetworkSpec,
    params: &TimingParameters<T>,
    s0: &CAState,
    x0: &MaxPlusVector<T>,
    k_max: usize,
) -> Result<AsyncRun<T>> {
    let map = GlobalMap::new(rule, spec)?;
    if s0.len() != spec.size() {
        return Err(Error::Arity(format!(
            "initial state has {} cells but the network has {}",
            s0.len(),
            spec.size()
        )));
    }
    let p = build_p(spec, params)?;
    let trajectory = iterate(&p, x0, k_max)?;
    let n = spec.size();
    let mut times = vec![Vec::with_capacity(k_max + 1); n];
    for (k, x) in trajectory.states().iter().enumerate() {
        let vals = x
            .finite_values()
            .map_err(|_| Error::Undefined(format!("contour {k} has a node that never updates")))?;
        for (i, v) in vals.into_iter().enumerate() {
            times[i].push(v);
        }
    }
    for (i, column) in times.iter().enumerate() {
        if let Some(k) = column.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::InvalidNetwork(format!(
                "update time of node {} decreases from contour {k} to {}; \
                 memory needs every node to wait for its own previous update (add a self-loop)",
                i + 1,
                k + 1
            )));
        }
    }
    let mut states = vec![s0.clone()];
    for _ in 0..k_max {
        let next = map.step(states.last().expect("nonempty"))?;
        states.push(next);
    }
    Ok(AsyncRun {
        spec: spec.clone(),
        params: params.clone(),
        rule,
        trajectory,
        states,
        times,
    })
}

impl<T: Scalar> AsyncRun<T> {
    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn params(&self) -> &TimingParameters<T> {
        &self.params
    }

    pub fn rule(&self) -> CARule {
        self.rule
    }

    pub fn trajectory(&self) -> &Trajectory<T> {
        &self.trajectory
    }

    pub fn k_max(&self) -> usize {
        self.states.len() - 1
    }

    pub fn cells(&self) -> usize {
        self.spec.size()
    }

    /// `s(k)`, the state on contour `k`.
    pub fn contour_state(&self, k: usize) -> &CAState {
        &self.states[k]
    }

    pub fn contour_states(&self) -> &[CAState] {
        &self.states
    }

    /// `x_i(k)`.
    pub fn time(&self, i: usize, k: usize) -> T {
        self.times[i][k]
    }

    /// Hold intervals of one cell, tiling `[x_i(0), x_i(k_max))`.
    pub fn hold_intervals(&self, cell: usize) -> Vec<HoldInterval<T>> {
        self.times[cell]
            .windows(2)
            .enumerate()
            .map(|(k, w)| HoldInterval {
                cell,
                k,
                start: w[0],
                end: w[1],
                state: self.states[k].get(cell),
            })
            .collect()
    }

    /// Every hold interval, cell by cell.
    pub fn memory(&self) -> Vec<HoldInterval<T>> {
        (0..self.cells())
            .flat_map(|i| self.hold_intervals(i))
            .collect()
    }

    /// `[max_i x_i(0), min_i x_i(k_max)]`, where every cell's state is known.
    pub fn domain(&self) -> (T, T) {
        let first = self.times.iter().map(|c| c[0]);
        let last = self.times.iter().map(|c| *c.last().expect("nonempty"));
        let lo = first
            .reduce(|a, b| if b > a { b } else { a })
            .expect("cells");
        let hi = last
            .reduce(|a, b| if b < a { b } else { a })
            .expect("cells");
        (lo, hi)
    }

    /// State of one cell at real time `t`: that of the last contour with
    /// `x_i(k) <= t`. `None` before `x_i(0)`.
    pub fn cell_state_at(&self, cell: usize, t: T) -> Option<bool> {
        let column = &self.times[cell];
        let after = column.partition_point(|&x| x <= t);
        (after > 0).then(|| self.states[after - 1].get(cell))
    }

    /// The real-time state `s^(t)` of all cells.
    pub fn state_at(&self, t: T) -> Result<CAState> {
        let (lo, hi) = self.domain();
        if t < lo {
            return Err(Error::Undefined(format!(
                "state undefined before initial contour (t = {t} < {lo})"
            )));
        }
        if t > hi {
            return Err(Error::Undefined(format!(
                "state unknown beyond the last computed contour (t = {t} > {hi})"
            )));
        }
        let bits = (0..self.cells())
            .map(|i| self.cell_state_at(i, t).expect("t >= every x_i(0)"))
            .collect();
        Ok(CAState::new(bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::random_parameters;

    fn ring10() -> NetworkSpec {
        NetworkSpec::regular_ring(10, 3).unwrap()
    }

    #[test]
    fn contour_states_follow_the_synchronous_orbit() {
        let spec = ring10();
        let params = random_parameters(&spec, 9, (1, 30), (1, 10)).unwrap();
        let s0: CAState = "0000100000".parse().unwrap();
        let run = async_run(
            CARule::EcaTable(150),
            &spec,
            &params,
            &s0,
            &MaxPlusVector::unit(10),
            20,
        )
        .unwrap();
        let orbit = super::super::sync_orbit(CARule::EcaTable(150), &spec, &s0, 50).unwrap();
        for k in 0..=20 {
            assert_eq!(run.contour_state(k), orbit.state(k));
        }
    }

    #[test]
    fn uniform_network_is_stretched_synchronous_pattern() {
        let spec = ring10();
        let params = TimingParameters::uniform(&spec, 5i64, 2);
        let s0 = CAState::single(10, 4);
        let run = async_run(
            CARule::EcaTable(150),
            &spec,
            &params,
            &s0,
            &MaxPlusVector::unit(10),
            8,
        )
        .unwrap();
        for k in 0..8 {
            for dt in 0..7 {
                assert_eq!(
                    &run.state_at(7 * k as i64 + dt).unwrap(),
                    run.contour_state(k)
                );
            }
        }
    }

    #[test]
    fn boundary_belongs_to_the_new_state() {
        let spec = ring10();
        let params = random_parameters(&spec, 2, (1, 30), (1, 10)).unwrap();
        let s0 = CAState::single(10, 4);
        let run = async_run(
            CARule::Parity,
            &spec,
            &params,
            &s0,
            &MaxPlusVector::unit(10),
            10,
        )
        .unwrap();
        for i in 0..10 {
            for k in 0..10 {
                let t = run.time(i, k);
                assert_eq!(run.cell_state_at(i, t), Some(run.contour_state(k).get(i)));
            }
        }
    }

    #[test]
    fn undefined_outside_domain() {
        let spec = ring10();
        let params = random_parameters(&spec, 2, (1, 30), (1, 10)).unwrap();
        let x0 = MaxPlusVector::from_finite([0i64, 5, 0, 0, 0, 0, 0, 0, 0, 0]);
        let run = async_run(CARule::Parity, &spec, &params, &CAState::zeros(10), &x0, 4).unwrap();
        let err = run.state_at(4).unwrap_err();
        assert!(err.to_string().contains("before initial contour"));
        let (_, hi) = run.domain();
        assert!(run.state_at(hi).is_ok());
        assert!(run.state_at(hi + 1).is_err());
    }

    #[test]
    fn intervals_tile_without_gaps() {
        let spec = ring10();
        let params = random_parameters(&spec, 4, (1, 30), (1, 10)).unwrap();
        let run = async_run(
            CARule::EcaTable(90),
            &spec,
            &params,
            &CAState::single(10, 0),
            &MaxPlusVector::unit(10),
            15,
        )
        .unwrap();
        for i in 0..10 {
            let iv = run.hold_intervals(i);
            assert_eq!(iv.len(), 15);
            assert_eq!(iv[0].start, run.time(i, 0));
            assert_eq!(iv.last().unwrap().end, run.time(i, 15));
            for w in iv.windows(2) {
                assert_eq!(w[0].end, w[1].start);
                assert!(w[0].start < w[0].end);
            }
        }
    }

    #[test]
    fn decreasing_update_times_are_refused() {
        // 2 listens only to 1, and starts late
        let spec = NetworkSpec::from_arcs(2, &[(0, 0), (0, 1)]).unwrap();
        let params = TimingParameters::uniform(&spec, 1i64, 0);
        let x0 = MaxPlusVector::from_finite([0i64, 50]);
        assert!(async_run(CARule::Parity, &spec, &params, &CAState::zeros(2), &x0, 3).is_err());
    }
}
