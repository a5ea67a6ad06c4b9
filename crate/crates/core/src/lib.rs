//! Max-plus linear algebra and cellular automata driven by max-plus timing.
//!
//! A network of cells with processing times `xi_i` and transmission times
//! `tau_ij` yields a timing matrix `P`; iterating `x(k+1) = P x(k)` gives the
//! update times of every cell. Running a CA rule on that schedule and reading
//! states on each contour `k` reproduces the synchronous orbit.
//!
//! ```
//! use tropical_ca::ca::{sync_orbit, CARule, CAState};
//! use tropical_ca::network::NetworkSpec;
//!
//! let ring = NetworkSpec::regular_ring(10, 3).unwrap();
//! let s0: CAState = "0000100000".parse().unwrap();
//! let orbit = sync_orbit(CARule::EcaTable(150), &ring, &s0, 100).unwrap();
//! assert_eq!(orbit.period, 6);
//! ```

pub mod ca;
pub mod error;
pub mod network;
pub mod render;
pub mod semiring;
pub mod spectral;
pub mod trajectory;

pub use error::{Error, Result};
