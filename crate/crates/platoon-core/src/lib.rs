//! Car-following platoon dynamics and string-stability analysis.
//!
//! The crate models a single-lane string of `N` vehicles under four
//! acceleration laws built on an optimal-velocity function `V(h)`:
//!
//! * `ovm`: each vehicle relaxes toward `V` of its own headway;
//! * `povm`: each follower relaxes toward `V` of its average spacing to the
//!   platoon leader;
//! * `tovm`: a blend of the two, with separate sensitivities for the
//!   predecessor and the leader;
//! * `fovm`: multi-following on the first and second vehicle ahead.
//!
//! [`sim`] integrates the resulting ODE systems (explicit Euler velocity
//! update, trapezoidal position update) on a ring road or an open road with a
//! velocity-prescribed leader. [`stability`] provides the matching linear
//! analysis: closed-form criteria, per-mode quadratics, and a dense
//! nonsymmetric eigensolver for the full linearized systems. [`metrics`]
//! condenses trajectories into scalar summaries.
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature (on by
//! default) only switches the float math from `libm` shims to the standard
//! library.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub(crate) mod math;

pub mod metrics;
pub mod models;
pub mod ovf;
pub mod rng;
pub mod sim;
pub mod stability;

pub use num_complex::Complex64;
