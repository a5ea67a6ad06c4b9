//! Boolean cellular automata: synchronous orbits, state transition graphs,
//! and evolution on the contours of a max-plus timed network.

mod events;
mod rule;
mod run;
mod state;
mod stg;
mod sync;

pub use events::{
    check_bijection, simulate_events, verify_bijection, BijectionReport, EventTrace, Fault,
};
pub use rule::{apply_rule, rule_inputs, CARule};
pub use run::{async_run, AsyncRun, HoldInterval};
pub use state::CAState;
pub use stg::{
    build_stg, build_stg_with, AttractorCensus, CycleCensus, StateTransitionGraph, STG_MAX_CELLS,
};
pub use sync::{sync_orbit, sync_states, sync_step, GlobalMap, SyncOrbit};
