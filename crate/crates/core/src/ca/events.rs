//! Message-level simulation of the timed network, used as an independent
//! check on contour times and contour states.
//!
//! Each cell finishes update `k` at `x_i(k)` and sends its state to every
//! successor `l`, where it arrives after `tau_li`. Once all messages of epoch
//! `k` have arrived, cell `l` processes for `xi_l` and finishes update `k+1`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use super::rule::{apply_rule, rule_inputs, CARule};
use super::state::CAState;
use crate::error::{Error, Result};
use crate::network::{NetworkSpec, TimingParameters};
use crate::semiring::{MaxPlusVector, Scalar, DEFAULT_TOLERANCE};
use crate::trajectory::iterate;

/// Deliberate protocol violations for negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// `cell` starts processing on the first arrival of each epoch and uses
    /// the last states it heard from the other neighbours.
    EarlyUpdate { cell: usize },
}

#[derive(Clone, Copy, Debug)]
enum Kind {
    Complete {
        cell: usize,
        k: usize,
        state: bool,
    },
    Arrival {
        to: usize,
        from: usize,
        k: usize,
        state: bool,
    },
}

struct Event<T> {
    time: T,
    seq: u64,
    kind: Kind,
}

impl<T: PartialOrd> PartialEq for Event<T> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<T: PartialOrd> Eq for Event<T> {}

impl<T: PartialOrd> PartialOrd for Event<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for Event<T> {
    // reversed: BinaryHeap pops the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .partial_cmp(&self.time)
            .unwrap_or(Ordering::Equal)
            .then(other.seq.cmp(&self.seq))
    }
}

/// What the message-level simulation observed.
#[derive(Clone, Debug, PartialEq)]
pub struct EventTrace<T> {
    /// `completion[k][i]`: the time cell `i` finished update `k`.
    pub completion: Vec<Vec<T>>,
    /// `receive[k][i]` for `k >= 1`: when cell `i` started update `k`.
    pub receive: Vec<Vec<T>>,
    pub states: Vec<CAState>,
}

struct Inbox {
    values: Vec<Option<bool>>,
    arrived: usize,
    fired: bool,
}

pub fn simulate_events<T: Scalar>(
    rule: CARule,
    spec: &NetworkSpec,
    params: &TimingParameters<T>,
    s0: &CAState,
    x0: &MaxPlusVector<T>,
    k_max: usize,
    fault: Fault,
) -> Result<EventTrace<T>> {
    params.validate(spec)?;
    let inputs = rule_inputs(rule, spec)?;
    let n = spec.size();
    if s0.len() != n || x0.len() != n {
        return Err(Error::Arity(format!(
            "network has {n} cells, initial state has {} and initial times {}",
            s0.len(),
            x0.len()
        )));
    }
    let x0 = x0.finite_values()?;
    // successors with the slot each arrival fills at the receiver
    let mut fanout: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (to, inp) in inputs.iter().enumerate() {
        for (slot, &from) in inp.iter().enumerate() {
            fanout[from].push((to, slot));
        }
    }
    let slot_of = |to: usize, from: usize| inputs[to].iter().position(|&j| j == from);

    let mut completion = vec![vec![None; n]; k_max + 1];
    let mut receive = vec![vec![None; n]; k_max + 1];
    let mut states = vec![vec![None; n]; k_max + 1];
    let mut inbox: HashMap<(usize, usize), Inbox> = HashMap::new();
    let mut heard: Vec<Vec<bool>> = inputs
        .iter()
        .map(|inp| inp.iter().map(|&j| s0.get(j)).collect())
        .collect();
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let mut push = |heap: &mut BinaryHeap<Event<T>>, time: T, kind: Kind| {
        heap.push(Event { time, seq, kind });
        seq += 1;
    };
    for i in 0..n {
        push(
            &mut heap,
            x0[i],
            Kind::Complete {
                cell: i,
                k: 0,
                state: s0.get(i),
            },
        );
    }

    while let Some(Event { time, kind, .. }) = heap.pop() {
        match kind {
            Kind::Complete { cell, k, state } => {
                completion[k][cell] = Some(time);
                states[k][cell] = Some(state);
                if k == k_max {
                    continue;
                }
                for &(to, _) in &fanout[cell] {
                    let tau = params.tau(to, cell).ok_or_else(|| {
                        Error::Internal(format!("no tau for {} -> {}", cell + 1, to + 1))
                    })?;
                    let at = time
                        .checked_add(tau)
                        .ok_or(Error::Overflow("simulate_events"))?;
                    push(
                        &mut heap,
                        at,
                        Kind::Arrival {
                            to,
                            from: cell,
                            k,
                            state,
                        },
                    );
                }
            }
            Kind::Arrival { to, from, k, state } => {
                let slot = slot_of(to, from).expect("fanout built from inputs");
                heard[to][slot] = state;
                let width = inputs[to].len();
                let entry = inbox.entry((to, k)).or_insert_with(|| Inbox {
                    values: vec![None; width],
                    arrived: 0,
                    fired: false,
                });
                entry.values[slot] = Some(state);
                entry.arrived += 1;
                let early = matches!(fault, Fault::EarlyUpdate { cell } if cell == to);
                let ready = !entry.fired && (entry.arrived == width || early);
                if ready {
                    entry.fired = true;
                    let nb: Vec<bool> = if early {
                        heard[to].clone()
                    } else {
                        entry
                            .values
                            .iter()
                            .map(|v| v.expect("all arrived"))
                            .collect()
                    };
                    let next = apply_rule(rule, &nb)?;
                    receive[k + 1][to] = Some(time);
                    let done = time
                        .checked_add(params.xi[to])
                        .ok_or(Error::Overflow("simulate_events"))?;
                    push(
                        &mut heap,
                        done,
                        Kind::Complete {
                            cell: to,
                            k: k + 1,
                            state: next,
                        },
                    );
                }
                if entry.arrived == width {
                    inbox.remove(&(to, k));
                }
            }
        }
    }

    let unwrap_grid = |grid: Vec<Vec<Option<T>>>, what: &str| -> Result<Vec<Vec<T>>> {
        grid.into_iter()
            .enumerate()
            .map(|(k, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(i, v)| {
                        v.ok_or_else(|| {
                            Error::Undefined(format!(
                                "cell {} never reached {what} {k}; it has no incoming messages",
                                i + 1
                            ))
                        })
                    })
                    .collect()
            })
            .collect()
    };
    let completion = unwrap_grid(completion, "update")?;
    let mut receive_rows = receive;
    receive_rows[0] = x0.clone().into_iter().map(Some).collect();
    let receive = unwrap_grid(receive_rows, "update")?;
    let states = states
        .into_iter()
        .map(|row| {
            CAState::new(
                row.into_iter()
                    .map(|b| b.expect("set with completion"))
                    .collect(),
            )
        })
        .collect();
    Ok(EventTrace {
        completion,
        receive,
        states,
    })
}

/// Epochs where the message-level run disagrees with the reference.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BijectionReport {
    pub state_mismatches: Vec<usize>,
    pub time_mismatches: Vec<usize>,
}

impl BijectionReport {
    pub fn holds(&self) -> bool {
        self.state_mismatches.is_empty() && self.time_mismatches.is_empty()
    }
}

/// Compare the message-level run against the synchronous map (states) and
/// `x(k) = P^k ⊗ x(0)` (times, to within the default tolerance for floats).
pub fn check_bijection<T: Scalar>(
    rule: CARule,
    spec: &NetworkSpec,
    params: &TimingParameters<T>,
    s0: &CAState,
    x0: &MaxPlusVector<T>,
    k_max: usize,
    fault: Fault,
) -> Result<BijectionReport> {
    let trace = simulate_events(rule, spec, params, s0, x0, k_max, fault)?;
    let sync = super::sync::sync_states(rule, spec, s0, k_max)?;
    let p = crate::network::build_p(spec, params)?;
    let traj = iterate(&p, x0, k_max)?;
    let mut report = BijectionReport::default();
    for k in 0..=k_max {
        if trace.states[k] != sync[k] {
            report.state_mismatches.push(k);
        }
        let expected = traj.x(k).finite_values()?;
        let agree = trace.completion[k].len() == expected.len()
            && trace.completion[k]
                .iter()
                .zip(&expected)
                .all(|(a, b)| a.close(*b, DEFAULT_TOLERANCE));
        if !agree {
            report.time_mismatches.push(k);
        }
    }
    Ok(report)
}

/// `s_S(k) = s_M(k)` and matching contour times for every `k <= k_max`.
pub fn verify_bijection<T: Scalar>(
    rule: CARule,
    spec: &NetworkSpec,
    params: &TimingParameters<T>,
    s0: &CAState,
    x0: &MaxPlusVector<T>,
    k_max: usize,
) -> Result<bool> {
    Ok(check_bijection(rule, spec, params, s0, x0, k_max, Fault::None)?.holds())
}
