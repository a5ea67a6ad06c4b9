use rayon::prelude::*;
use serde::Serialize;

use super::rule::CARule;
use super::state::CAState;
use super::sync::GlobalMap;
use crate::error::{Error, Result};
use crate::network::NetworkSpec;

/// Largest network for which the full STG is built by default.
pub const STG_MAX_CELLS: usize = 24;

/// The functional graph `s -> F(s)` on all `2^N` states.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateTransitionGraph {
    n: usize,
    succ: Vec<u32>,
    on_attractor: Vec<bool>,
    /// Each circuit starts at its smallest state; sorted by that state.
    attractors: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleCensus {
    pub period: usize,
    pub states: Vec<String>,
}

/// Attractor summary: fixed points and longer circuits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AttractorCensus {
    pub fixed_points: Vec<String>,
    pub cycles: Vec<CycleCensus>,
}

impl StateTransitionGraph {
    pub fn cells(&self) -> usize {
        self.n
    }

    pub fn state_count(&self) -> usize {
        self.succ.len()
    }

    pub fn successor(&self, index: u32) -> u32 {
        self.succ[index as usize]
    }

    pub fn successors(&self) -> &[u32] {
        &self.succ
    }

    pub fn attractors(&self) -> &[Vec<u32>] {
        &self.attractors
    }

    pub fn is_on_attractor(&self, index: u32) -> bool {
        self.on_attractor[index as usize]
    }

    pub fn attractor_state_count(&self) -> usize {
        self.attractors.iter().map(Vec::len).sum()
    }

    pub fn transient_count(&self) -> usize {
        self.state_count() - self.attractor_state_count()
    }

    pub fn label(&self, index: u32) -> String {
        CAState::from_index(index as u64, self.n).to_string()
    }

    pub fn census(&self) -> AttractorCensus {
        let mut fixed_points = Vec::new();
        let mut cycles = Vec::new();
        for a in &self.attractors {
            if a.len() == 1 {
                fixed_points.push(self.label(a[0]));
            } else {
                cycles.push(CycleCensus {
                    period: a.len(),
                    states: a.iter().map(|&s| self.label(s)).collect(),
                });
            }
        }
        AttractorCensus {
            fixed_points,
            cycles,
        }
    }

    pub fn census_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.census())?)
    }
}

pub fn build_stg(rule: CARule, spec: &NetworkSpec) -> Result<StateTransitionGraph> {
    build_stg_with(rule, spec, STG_MAX_CELLS, false)
}

/// Build with an explicit cell cap; `parallel` shards successor computation.
pub fn build_stg_with(
    rule: CARule,
    spec: &NetworkSpec,
    cap: usize,
    parallel: bool,
) -> Result<StateTransitionGraph> {
    let n = spec.size();
    if n > cap.min(31) {
        return Err(Error::StgTooLarge {
            n,
            cap: cap.min(31),
        });
    }
    let map = GlobalMap::new(rule, spec)?;
    let count = 1usize << n;
    let succ: Vec<u32> = if parallel {
        (0..count as u64)
            .into_par_iter()
            .map(|s| map.step_index(s) as u32)
            .collect()
    } else {
        (0..count as u64)
            .map(|s| map.step_index(s) as u32)
            .collect()
    };

    const NEW: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let mut mark = vec![NEW; count];
    let mut on_attractor = vec![false; count];
    let mut attractors = Vec::new();
    let mut path: Vec<u32> = Vec::new();
    for start in 0..count {
        if mark[start] != NEW {
            continue;
        }
        path.clear();
        let mut s = start;
        while mark[s] == NEW {
            mark[s] = ACTIVE;
            path.push(s as u32);
            s = succ[s] as usize;
        }
        if mark[s] == ACTIVE {
            let from = path.iter().position(|&p| p as usize == s).expect("on path");
            let mut cycle = path[from..].to_vec();
            let min_at = cycle
                .iter()
                .enumerate()
                .min_by_key(|&(_, &v)| v)
                .map(|(i, _)| i)
                .expect("nonempty cycle");
            cycle.rotate_left(min_at);
            for &c in &cycle {
                on_attractor[c as usize] = true;
            }
            attractors.push(cycle);
        }
        for &p in &path {
            mark[p as usize] = DONE;
        }
    }
    attractors.sort_by_key(|c| c[0]);
    Ok(StateTransitionGraph {
        n,
        succ,
        on_attractor,
        attractors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_zero_is_a_fixed_point() {
        for n in 1..=6 {
            let ring = NetworkSpec::regular_ring(n, if n >= 3 { 3 } else { 1 }).unwrap();
            let g = build_stg(CARule::Parity, &ring).unwrap();
            assert_eq!(g.successor(0), 0);
            assert_eq!(g.attractors()[0], vec![0]);
        }
    }

    #[test]
    fn counts_add_up_and_parallel_agrees() {
        let ring = NetworkSpec::regular_ring(9, 3).unwrap();
        for rule in [
            CARule::EcaTable(30),
            CARule::EcaTable(150),
            CARule::EcaTable(110),
        ] {
            let a = build_stg_with(rule, &ring, 24, false).unwrap();
            let b = build_stg_with(rule, &ring, 24, true).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.attractor_state_count() + a.transient_count(), 512);
        }
    }

    #[test]
    fn too_large_is_refused() {
        let ring = NetworkSpec::regular_ring(25, 3).unwrap();
        assert!(matches!(
            build_stg(CARule::Parity, &ring),
            Err(Error::StgTooLarge { n: 25, .. })
        ));
        let small = NetworkSpec::regular_ring(8, 3).unwrap();
        assert!(build_stg_with(CARule::Parity, &small, 7, false).is_err());
    }

    #[test]
    fn census_json_shape() {
        let ring = NetworkSpec::regular_ring(4, 3).unwrap();
        let g = build_stg(CARule::EcaTable(150), &ring).unwrap();
        let v: serde_json::Value = serde_json::from_str(&g.census_json().unwrap()).unwrap();
        assert!(v["fixed_points"]
            .as_array()
            .unwrap()
            .contains(&"0000".into()));
        for c in v["cycles"].as_array().unwrap() {
            assert_eq!(
                c["period"].as_u64().unwrap() as usize,
                c["states"].as_array().unwrap().len()
            );
        }
    }
}
