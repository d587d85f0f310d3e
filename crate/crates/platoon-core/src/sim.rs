//! Time stepping and the two scenario generators.
//!
//! The discretization is fixed: an explicit Euler update for velocities and a
//! trapezoidal (Heun-style) update for positions,
//!
//! ```text
//! v[i, j+1] = v[i, j] + acc[i, j] dt
//! x[i, j+1] = x[i, j] + (v[i, j] + v[i, j+1]) / 2 dt
//! ```
//!
//! with all accelerations evaluated once from the pre-step state. A
//! velocity-prescribed leader gets its speed set analytically at `t + dt`
//! before the position update, so it obeys the same trapezoidal rule and
//! never accumulates phase drift.
//!
//! Runs are deterministic: the initial disturbance comes from the seeded
//! [`SplitMix64`] stream in a fixed order (positions for vehicles `0..N`,
//! then velocities), so one seed reproduces a trajectory bit for bit.
//! Collisions and leader overruns are logged as events, never fatal.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use crate::math;
use crate::models::{accelerations, LeaderRule, ModelError, ModelKind, ModelSpec, PlatoonState};
use crate::ovf::{Ovf, OvfError};
use crate::rng::SplitMix64;

/// Integration settings shared by every scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Time step (s).
    pub dt: f64,
    /// Simulated duration (s).
    pub t_end: f64,
    /// Seed for the initial-disturbance draws.
    pub seed: u64,
    /// Keep every k-th step in the trajectory (the final step is always
    /// kept).
    pub record_every: usize,
}

impl SimConfig {
    pub fn new(t_end: f64, seed: u64) -> Self {
        Self { dt: 0.1, t_end, seed, record_every: 1 }
    }

    fn validate(&self) -> Result<usize, SimError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimError::InvalidConfig("dt must be positive"));
        }
        if !(self.t_end.is_finite() && self.t_end >= self.dt) {
            return Err(SimError::InvalidConfig("t_end must be at least dt"));
        }
        if self.record_every == 0 {
            return Err(SimError::InvalidConfig("record_every must be at least 1"));
        }
        Ok(math::round(self.t_end / self.dt) as usize)
    }
}

/// Ring road with a uniformly drawn initial disturbance.
#[derive(Debug, Clone, PartialEq)]
pub struct RingScenario {
    pub n: usize,
    /// Ring circumference (m).
    pub length: f64,
    pub ovf: Ovf,
    /// Magnitude of the initial perturbation: positions and speeds are
    /// offset by independent draws from `[0, disturbance)`.
    pub disturbance: f64,
    pub model: ModelSpec,
}

impl RingScenario {
    fn validate(&self) -> Result<f64, SimError> {
        if self.n < 2 {
            return Err(SimError::InvalidConfig("ring needs at least two vehicles"));
        }
        if !(self.length.is_finite() && self.length > 0.0) {
            return Err(SimError::InvalidConfig("ring length must be positive"));
        }
        if !(self.disturbance.is_finite() && self.disturbance >= 0.0) {
            return Err(SimError::InvalidConfig("disturbance must be nonnegative"));
        }
        if self.model.leader_rule != LeaderRule::OvmFollowsFirst {
            return Err(SimError::InvalidConfig("ring runs close the loop: the leader follows vehicle 0"));
        }
        let h = self.length / self.n as f64;
        if h <= self.ovf.jam_headway() || h >= self.ovf.saturation_headway() {
            return Err(SimError::InvalidConfig(
                "equilibrium headway L/N must lie strictly inside the OVF's interacting range",
            ));
        }
        Ok(h)
    }
}

/// Sinusoidal velocity profile imposed on the leader of an open-road run:
/// `v(t) = v0 + amplitude * sin(2 pi t / period)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderProfile {
    /// Mean (equilibrium) speed (m/s).
    pub v0: f64,
    /// Disturbance amplitude (m/s).
    pub amplitude: f64,
    /// Disturbance period (s).
    pub period: f64,
}

impl LeaderProfile {
    pub fn new(v0: f64, amplitude: f64, period: f64) -> Result<Self, SimError> {
        if !(v0.is_finite() && amplitude.is_finite() && period.is_finite()) {
            return Err(SimError::InvalidConfig("leader profile must be finite"));
        }
        // v0 >= amplitude keeps the prescribed speed nonnegative.
        if !(amplitude >= 0.0 && v0 >= amplitude) {
            return Err(SimError::InvalidConfig("need v0 >= amplitude >= 0"));
        }
        if period <= 0.0 {
            return Err(SimError::InvalidConfig("period must be positive"));
        }
        Ok(Self { v0, amplitude, period })
    }

    pub fn velocity(&self, t: f64) -> f64 {
        self.v0 + self.amplitude * math::sin(TAU * t / self.period)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Topology {
    Ring { length: f64 },
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    /// Some headway first reached zero or below (a collision).
    NegativeHeadway,
    /// A follower first passed the platoon leader in cumulative coordinates;
    /// leader-relative spacings are no longer meaningful.
    LeaderOverrun,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::NegativeHeadway => "negative_headway",
            EventKind::LeaderOverrun => "leader_overrun",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub vehicle: usize,
    pub kind: EventKind,
}

/// Recorded run: times, per-vehicle series, defined headways, and events.
///
/// `headways[step]` holds `N` values on a ring (the leader wraps) and `N - 1`
/// on an open road (the leader has no predecessor).
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub topology: Topology,
    /// Headway of the undisturbed uniform flow (m).
    pub equilibrium_headway: f64,
    pub dt: f64,
    pub times: Vec<f64>,
    pub positions: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
    pub headways: Vec<Vec<f64>>,
    pub events: Vec<Event>,
}

impl Trajectory {
    pub fn vehicle_count(&self) -> usize {
        self.positions.first().map_or(0, Vec::len)
    }

    pub fn headway_count(&self) -> usize {
        self.headways.first().map_or(0, Vec::len)
    }

    pub fn first_event(&self, kind: EventKind) -> Option<&Event> {
        self.events.iter().find(|e| e.kind == kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimError {
    /// A position or velocity stopped being finite.
    NonFinite { t: f64 },
    /// Configuration or scenario parameters out of contract.
    InvalidConfig(&'static str),
    /// The scenario does not support the requested model.
    UnsupportedScenario(&'static str),
    Model(ModelError),
    Ovf(OvfError),
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::NonFinite { t } => write!(f, "state became non-finite at t = {t} s"),
            SimError::InvalidConfig(what) => write!(f, "invalid configuration: {what}"),
            SimError::UnsupportedScenario(what) => write!(f, "unsupported scenario: {what}"),
            SimError::Model(e) => write!(f, "model error: {e}"),
            SimError::Ovf(e) => write!(f, "{e}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SimError {}

impl From<ModelError> for SimError {
    fn from(e: ModelError) -> Self {
        SimError::Model(e)
    }
}

impl From<OvfError> for SimError {
    fn from(e: OvfError) -> Self {
        SimError::Ovf(e)
    }
}

/// One integration step. `leader` must be supplied exactly when the model's
/// leader velocity is prescribed.
pub fn step(
    state: &PlatoonState,
    spec: &ModelSpec,
    ovf: &Ovf,
    dt: f64,
    leader: Option<&LeaderProfile>,
) -> Result<PlatoonState, SimError> {
    if !state.is_finite() {
        return Err(SimError::NonFinite { t: state.t });
    }
    let n = state.vehicle_count();
    let mut acc = vec![0.0; n];
    accelerations(state, spec, ovf, &mut acc)?;

    let t_next = state.t + dt;
    let mut v_next: Vec<f64> = (0..n).map(|i| state.v[i] + acc[i] * dt).collect();
    if spec.leader_rule == LeaderRule::PrescribedVelocity {
        let profile = leader
            .ok_or(SimError::InvalidConfig("prescribed leader needs a velocity profile"))?;
        v_next[n - 1] = profile.velocity(t_next);
    }
    let x_next: Vec<f64> =
        (0..n).map(|i| state.x[i] + 0.5 * (state.v[i] + v_next[i]) * dt).collect();

    let next = PlatoonState { t: t_next, x: x_next, v: v_next, ring_length: state.ring_length };
    if !next.is_finite() {
        return Err(SimError::NonFinite { t: t_next });
    }
    Ok(next)
}

/// Ring road run. The initial state is the uniform flow `x_i = h i`,
/// `v_i = V(h)` with `h = L/N`, offset by independent uniform draws from
/// `[0, disturbance)`: one draw per vehicle for positions, then one per
/// vehicle for velocities, in index order.
pub fn run_ring(scn: &RingScenario, cfg: &SimConfig) -> Result<Trajectory, SimError> {
    let h = scn.validate()?;
    let steps = cfg.validate()?;

    let mut rng = SplitMix64::new(cfg.seed);
    let pos_offsets: Vec<f64> = (0..scn.n).map(|_| rng.uniform(0.0, scn.disturbance)).collect();
    let vel_offsets: Vec<f64> = (0..scn.n).map(|_| rng.uniform(0.0, scn.disturbance)).collect();

    let veq = scn.ovf.eval(h);
    let x: Vec<f64> = (0..scn.n).map(|i| h * i as f64 + pos_offsets[i]).collect();
    let v: Vec<f64> = (0..scn.n).map(|i| veq + vel_offsets[i]).collect();
    let state = PlatoonState::new(0.0, x, v, Some(scn.length))?;

    integrate(state, &scn.model, &scn.ovf, cfg, steps, None, Topology::Ring { length: scn.length }, h)
}

/// Open-road run with a velocity-prescribed leader. The platoon starts in
/// exact equilibrium (spacing solving `V(h) = v0`, all speeds `v0`); only the
/// leader's sinusoid disturbs it. Only the predecessor-following and
/// leader-following laws are supported here.
pub fn run_infinite(
    leader: &LeaderProfile,
    n: usize,
    ovf: &Ovf,
    spec: &ModelSpec,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    if !matches!(spec.kind, ModelKind::Ovm | ModelKind::POvm) {
        return Err(SimError::UnsupportedScenario(
            "open-road runs support the ovm and povm laws only",
        ));
    }
    if spec.leader_rule != LeaderRule::PrescribedVelocity {
        return Err(SimError::UnsupportedScenario("open-road leader velocity is prescribed"));
    }
    if n < 2 {
        return Err(SimError::InvalidConfig("need at least two vehicles"));
    }
    let steps = cfg.validate()?;
    let h = ovf.equilibrium_headway(leader.v0)?;

    let x: Vec<f64> = (0..n).map(|i| h * i as f64).collect();
    let v: Vec<f64> = vec![leader.v0; n];
    let state = PlatoonState::new(0.0, x, v, None)?;

    integrate(state, spec, ovf, cfg, steps, Some(leader), Topology::Infinite, h)
}

#[allow(clippy::too_many_arguments)]
fn integrate(
    mut state: PlatoonState,
    spec: &ModelSpec,
    ovf: &Ovf,
    cfg: &SimConfig,
    steps: usize,
    leader: Option<&LeaderProfile>,
    topology: Topology,
    equilibrium_headway: f64,
) -> Result<Trajectory, SimError> {
    let mut traj = Trajectory {
        topology,
        equilibrium_headway,
        dt: cfg.dt,
        times: Vec::new(),
        positions: Vec::new(),
        velocities: Vec::new(),
        headways: Vec::new(),
        events: Vec::new(),
    };
    let leader_relative = matches!(spec.kind, ModelKind::POvm | ModelKind::TOvm);
    let mut saw_negative = false;
    let mut saw_overrun = false;

    record(&mut traj, &state);
    scan_events(&state, leader_relative, &mut saw_negative, &mut saw_overrun, &mut traj.events);

    for j in 1..=steps {
        state = step(&state, spec, ovf, cfg.dt, leader)?;
        scan_events(&state, leader_relative, &mut saw_negative, &mut saw_overrun, &mut traj.events);
        if j % cfg.record_every == 0 || j == steps {
            record(&mut traj, &state);
        }
    }
    Ok(traj)
}

fn record(traj: &mut Trajectory, state: &PlatoonState) {
    traj.times.push(state.t);
    traj.positions.push(state.x.clone());
    traj.velocities.push(state.v.clone());
    traj.headways.push(state.headways());
}

fn scan_events(
    state: &PlatoonState,
    leader_relative: bool,
    saw_negative: &mut bool,
    saw_overrun: &mut bool,
    events: &mut Vec<Event>,
) {
    if !*saw_negative {
        for (i, h) in state.headways().into_iter().enumerate() {
            if h <= 0.0 {
                events.push(Event { t: state.t, vehicle: i, kind: EventKind::NegativeHeadway });
                *saw_negative = true;
                break;
            }
        }
    }
    if leader_relative && !*saw_overrun {
        let n = state.vehicle_count();
        for i in 0..n - 1 {
            if state.x[n - 1] - state.x[i] < 0.0 {
                events.push(Event { t: state.t, vehicle: i, kind: EventKind::LeaderOverrun });
                *saw_overrun = true;
                break;
            }
        }
    }
}
