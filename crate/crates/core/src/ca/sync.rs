use std::collections::HashMap;

use serde::Serialize;

use super::rule::{apply_rule, rule_inputs, CARule};
use super::state::CAState;
use crate::error::{Error, Result};
use crate::network::NetworkSpec;

/// The synchronous global map `F` of a rule on a network.
#[derive(Clone, Debug)]
pub struct GlobalMap {
    rule: CARule,
    inputs: Vec<Vec<usize>>,
}

impl GlobalMap {
    pub fn new(rule: CARule, spec: &NetworkSpec) -> Result<Self> {
        Ok(GlobalMap {
            rule,
            inputs: rule_inputs(rule, spec)?,
        })
    }

    pub fn size(&self) -> usize {
        self.inputs.len()
    }

    pub fn rule(&self) -> CARule {
        self.rule
    }

    pub fn inputs(&self, i: usize) -> &[usize] {
        &self.inputs[i]
    }

    pub fn step(&self, s: &CAState) -> Result<CAState> {
        if s.len() != self.size() {
            return Err(Error::Arity(format!(
                "state has {} cells but the network has {}",
                s.len(),
                self.size()
            )));
        }
        let mut nb = Vec::new();
        let bits = self
            .inputs
            .iter()
            .map(|inp| {
                nb.clear();
                nb.extend(inp.iter().map(|&j| s.get(j)));
                apply_rule(self.rule, &nb)
            })
            .collect::<Result<Vec<bool>>>()?;
        Ok(CAState::new(bits))
    }

    /// `F` on the index encoding of [`CAState::to_index`].
    pub fn step_index(&self, index: u64) -> u64 {
        let n = self.size();
        let mut out = 0u64;
        let mut nb = [false; 64];
        for inp in &self.inputs {
            for (slot, &j) in inp.iter().enumerate() {
                nb[slot] = index >> (n - 1 - j) & 1 == 1;
            }
            let bit = apply_rule(self.rule, &nb[..inp.len()]).expect("inputs validated");
            out = out << 1 | bit as u64;
        }
        out
    }
}

/// One synchronous update of every cell.
pub fn sync_step(rule: CARule, spec: &NetworkSpec, s: &CAState) -> Result<CAState> {
    GlobalMap::new(rule, spec)?.step(s)
}

/// `s(0), ..., s(k)` under the synchronous map.
pub fn sync_states(
    rule: CARule,
    spec: &NetworkSpec,
    s0: &CAState,
    k: usize,
) -> Result<Vec<CAState>> {
    let map = GlobalMap::new(rule, spec)?;
    let mut out = vec![s0.clone()];
    for _ in 0..k {
        let next = map.step(out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

/// Orbit up to its first repeat: `s(t + p) = s(t)` with `p` minimal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyncOrbit {
    /// `s(0), ..., s(entry + period - 1)`.
    pub states: Vec<CAState>,
    pub entry: usize,
    pub period: usize,
}

impl SyncOrbit {
    /// The periodic CA orbit `{s(t), ..., s(t + p - 1)}`.
    pub fn cycle(&self) -> &[CAState] {
        &self.states[self.entry..]
    }

    /// `s(k)` for any `k`.
    pub fn state(&self, k: usize) -> &CAState {
        if k < self.states.len() {
            &self.states[k]
        } else {
            &self.states[self.entry + (k - self.entry) % self.period]
        }
    }
}

pub fn sync_orbit(
    rule: CARule,
    spec: &NetworkSpec,
    s0: &CAState,
    k_max: usize,
) -> Result<SyncOrbit> {
    let map = GlobalMap::new(rule, spec)?;
    let mut seen: HashMap<CAState, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut s = s0.clone();
    for k in 0..=k_max {
        if let Some(&entry) = seen.get(&s) {
            return Ok(SyncOrbit {
                states,
                entry,
                period: k - entry,
            });
        }
        seen.insert(s.clone(), k);
        let next = map.step(&s)?;
        states.push(std::mem::replace(&mut s, next));
    }
    Err(Error::OrbitCapExceeded { k_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> CAState {
        s.parse().unwrap()
    }

    #[test]
    fn rule_150_step_on_ten_ring() {
        let ring = NetworkSpec::regular_ring(10, 3).unwrap();
        let next = sync_step(CARule::EcaTable(150), &ring, &st("0000100000")).unwrap();
        assert_eq!(next, st("0001110000"));
        assert_eq!(
            sync_step(CARule::Parity, &ring, &CAState::zeros(10)).unwrap(),
            CAState::zeros(10)
        );
    }

    #[test]
    fn single_seed_spreads_to_three_cells() {
        let ring = NetworkSpec::regular_ring(20, 3).unwrap();
        let next = sync_step(CARule::EcaTable(150), &ring, &CAState::single(20, 9)).unwrap();
        let ones: Vec<usize> = (0..20).filter(|&i| next.get(i)).collect();
        assert_eq!(ones, vec![8, 9, 10]);
    }

    #[test]
    fn ten_ring_orbit_has_period_six() {
        let ring = NetworkSpec::regular_ring(10, 3).unwrap();
        let orbit = sync_orbit(CARule::EcaTable(150), &ring, &st("0000100000"), 100).unwrap();
        assert_eq!(orbit.period, 6);
        assert_eq!(orbit.entry, 0);
        let mut got: Vec<String> = orbit.cycle().iter().map(|s| s.to_string()).collect();
        got.sort();
        let mut want = vec![
            "0000100000",
            "0001110000",
            "0010101000",
            "0110101100",
            "1000100010",
            "1101110110",
        ];
        want.sort();
        assert_eq!(got, want);
        assert_eq!(orbit.state(6), orbit.state(0));
        assert_eq!(orbit.state(13), orbit.state(1));
    }

    #[test]
    fn zero_state_has_period_one() {
        let ring = NetworkSpec::regular_ring(7, 3).unwrap();
        let orbit = sync_orbit(CARule::EcaTable(150), &ring, &CAState::zeros(7), 5).unwrap();
        assert_eq!((orbit.entry, orbit.period), (0, 1));
    }

    #[test]
    fn cap_exceeded() {
        let ring = NetworkSpec::regular_ring(10, 3).unwrap();
        assert!(matches!(
            sync_orbit(CARule::EcaTable(150), &ring, &st("0000100000"), 3),
            Err(Error::OrbitCapExceeded { k_max: 3 })
        ));
    }

    #[test]
    fn index_step_agrees_with_state_step() {
        let ring = NetworkSpec::regular_ring(6, 3).unwrap();
        for rule in [CARule::EcaTable(30), CARule::EcaTable(110), CARule::Parity] {
            let map = GlobalMap::new(rule, &ring).unwrap();
            for idx in 0..64 {
                let s = CAState::from_index(idx, 6);
                assert_eq!(map.step(&s).unwrap().to_index(), map.step_index(idx));
            }
        }
    }

    #[test]
    fn wrong_length_state_is_rejected() {
        let ring = NetworkSpec::regular_ring(6, 3).unwrap();
        assert!(sync_step(CARule::Parity, &ring, &CAState::zeros(5)).is_err());
    }
}
