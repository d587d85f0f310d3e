//! Acceleration laws and the platoon state they act on.
//!
//! Vehicles are indexed `0..N-1` with index `N-1` the platoon leader (the
//! front of the string); vehicle `i` follows vehicle `i+1`. Positions are
//! cumulative: on a ring of length `L` they grow without bound and the wrap
//! only enters through `position_ahead`, which adds `L` per lap. That keeps
//! leader-relative spacings like `x[N-1] - x[i]` free of modular-arithmetic
//! sign errors.
//!
//! Collisions do not stop anything here: negative headways evaluate on the
//! standstill branch of the OVF and are flagged by the simulation layer.

use alloc::vec::Vec;
use core::fmt;

use crate::ovf::Ovf;

/// Which acceleration law governs the followers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Follow the immediate predecessor.
    Ovm,
    /// Follow the platoon leader through the average spacing.
    POvm,
    /// Blend of predecessor-following (weight `a`) and leader-following
    /// (weight `b`).
    TOvm,
    /// Multi-following on the first and second vehicle ahead.
    FOvm,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Ovm => "ovm",
            ModelKind::POvm => "povm",
            ModelKind::TOvm => "tovm",
            ModelKind::FOvm => "fovm",
        }
    }
}

/// How the platoon leader itself is driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeaderRule {
    /// Ring topology: the leader follows vehicle 0 by the plain OVM law
    /// (sensitivity `a`, or `a + b` for the blended model).
    OvmFollowsFirst,
    /// The scenario sets the leader velocity directly; its acceleration is
    /// never evaluated.
    PrescribedVelocity,
}

/// A follower law plus its sensitivities and the leader rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    /// Sensitivity to the predecessor (1/s). For `POvm` this is the leader
    /// sensitivity, the law's only one.
    pub a: f64,
    /// Secondary sensitivity (1/s): leader for `TOvm`, second-ahead for
    /// `FOvm`. Zero for the single-target laws.
    pub b: f64,
    pub leader_rule: LeaderRule,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelError {
    /// Sensitivities must satisfy `a >= 0`, `b >= 0`, `a + b > 0`, and plain
    /// OVM and P-OVM take no secondary sensitivity.
    InvalidSensitivities,
    /// The requested vehicle has no defined predecessor at this distance on
    /// an open road.
    NoVehicleAhead { vehicle: usize, ahead: usize },
    /// Leader-relative laws are only defined for followers.
    NotAFollower { vehicle: usize },
    /// `LeaderRule::OvmFollowsFirst` needs a ring to wrap on.
    LeaderNeedsRing,
    /// The leader velocity is prescribed by the scenario, not by a law.
    LeaderVelocityPrescribed,
    /// State vectors were empty, mismatched, or non-finite.
    InvalidState(&'static str),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::InvalidSensitivities => {
                write!(f, "sensitivities must satisfy a >= 0, b >= 0, a + b > 0 (b = 0 for ovm/povm)")
            }
            ModelError::NoVehicleAhead { vehicle, ahead } => {
                write!(f, "vehicle {vehicle} has no {ahead}-ahead neighbor on an open road")
            }
            ModelError::NotAFollower { vehicle } => {
                write!(f, "vehicle {vehicle} is the leader; law applies to followers only")
            }
            ModelError::LeaderNeedsRing => write!(f, "leader law needs a ring topology"),
            ModelError::LeaderVelocityPrescribed => {
                write!(f, "leader velocity is prescribed; no acceleration law applies")
            }
            ModelError::InvalidState(what) => write!(f, "invalid platoon state: {what}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ModelError {}

impl ModelSpec {
    pub fn new(kind: ModelKind, a: f64, b: f64, leader_rule: LeaderRule) -> Result<Self, ModelError> {
        if !(a.is_finite() && b.is_finite()) || a < 0.0 || b < 0.0 || a + b <= 0.0 {
            return Err(ModelError::InvalidSensitivities);
        }
        if matches!(kind, ModelKind::Ovm | ModelKind::POvm) && b != 0.0 {
            return Err(ModelError::InvalidSensitivities);
        }
        Ok(Self { kind, a, b, leader_rule })
    }

    pub fn ovm(a: f64, leader_rule: LeaderRule) -> Result<Self, ModelError> {
        Self::new(ModelKind::Ovm, a, 0.0, leader_rule)
    }

    pub fn povm(a: f64, leader_rule: LeaderRule) -> Result<Self, ModelError> {
        Self::new(ModelKind::POvm, a, 0.0, leader_rule)
    }

    pub fn tovm(a: f64, b: f64, leader_rule: LeaderRule) -> Result<Self, ModelError> {
        Self::new(ModelKind::TOvm, a, b, leader_rule)
    }

    pub fn fovm(a: f64, b: f64, leader_rule: LeaderRule) -> Result<Self, ModelError> {
        Self::new(ModelKind::FOvm, a, b, leader_rule)
    }

    /// Damping coefficient of the linearized law: the sum of all velocity-
    /// relaxation weights.
    pub fn damping(&self) -> f64 {
        match self.kind {
            ModelKind::Ovm | ModelKind::POvm => self.a,
            ModelKind::TOvm | ModelKind::FOvm => self.a + self.b,
        }
    }
}

/// Snapshot of the platoon: cumulative positions and speeds at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct PlatoonState {
    pub t: f64,
    /// Cumulative positions (m), never wrapped.
    pub x: Vec<f64>,
    /// Speeds (m/s).
    pub v: Vec<f64>,
    /// Ring circumference (m), or `None` on an open road.
    pub ring_length: Option<f64>,
}

impl PlatoonState {
    pub fn new(t: f64, x: Vec<f64>, v: Vec<f64>, ring_length: Option<f64>) -> Result<Self, ModelError> {
        if x.len() != v.len() {
            return Err(ModelError::InvalidState("position/velocity length mismatch"));
        }
        if x.len() < 2 {
            return Err(ModelError::InvalidState("need at least two vehicles"));
        }
        if !(x.iter().all(|p| p.is_finite()) && v.iter().all(|s| s.is_finite())) {
            return Err(ModelError::InvalidState("positions and speeds must be finite"));
        }
        if let Some(length) = ring_length {
            if !(length.is_finite() && length > 0.0) {
                return Err(ModelError::InvalidState("ring length must be positive"));
            }
        }
        Ok(Self { t, x, v, ring_length })
    }

    pub fn vehicle_count(&self) -> usize {
        self.x.len()
    }

    pub fn is_ring(&self) -> bool {
        self.ring_length.is_some()
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().all(|p| p.is_finite()) && self.v.iter().all(|s| s.is_finite())
    }

    /// Cumulative position of the `ahead`-th vehicle in front of `i`,
    /// unwrapped: on a ring each lap past the leader adds the circumference.
    pub fn position_ahead(&self, i: usize, ahead: usize) -> Result<f64, ModelError> {
        let n = self.vehicle_count();
        let j = i + ahead;
        if j < n {
            return Ok(self.x[j]);
        }
        match self.ring_length {
            Some(length) => Ok(self.x[j % n] + length * (j / n) as f64),
            None => Err(ModelError::NoVehicleAhead { vehicle: i, ahead }),
        }
    }

    /// Headway of vehicle `i` to its predecessor. For the leader on a ring
    /// this is `x[0] + L - x[N-1]`; on an open road the leader has none.
    pub fn headway(&self, i: usize) -> Result<f64, ModelError> {
        Ok(self.position_ahead(i, 1)? - self.x[i])
    }

    /// All defined headways in vehicle order: `N` values on a ring, `N - 1`
    /// on an open road.
    pub fn headways(&self) -> Vec<f64> {
        let n = self.vehicle_count();
        let count = if self.is_ring() { n } else { n - 1 };
        (0..count).map(|i| self.headway(i).expect("defined by count")).collect()
    }
}

/// Predecessor-following law: `a (V(h_i) - v_i)`.
pub fn accel_ovm(state: &PlatoonState, i: usize, a: f64, ovf: &Ovf) -> Result<f64, ModelError> {
    let h = state.headway(i)?;
    Ok(a * (ovf.eval(h) - state.v[i]))
}

/// Leader-following law for follower `i`: the target speed comes from the
/// average spacing `(x[N-1] - x[i]) / (N-1-i)` to the leader.
pub fn accel_povm(state: &PlatoonState, i: usize, a: f64, ovf: &Ovf) -> Result<f64, ModelError> {
    let n = state.vehicle_count();
    if i >= n - 1 {
        return Err(ModelError::NotAFollower { vehicle: i });
    }
    let spacing = (state.x[n - 1] - state.x[i]) / (n - 1 - i) as f64;
    Ok(a * (ovf.eval(spacing) - state.v[i]))
}

/// Blended law: predecessor term with weight `a` plus leader term with
/// weight `b`.
pub fn accel_tovm(state: &PlatoonState, i: usize, a: f64, b: f64, ovf: &Ovf) -> Result<f64, ModelError> {
    Ok(accel_ovm(state, i, a, ovf)? + accel_povm(state, i, b, ovf)?)
}

/// Two-ahead multi-following law: predecessor term with weight `a` plus a
/// term on half the spacing to the second vehicle ahead with weight `b`.
pub fn accel_fovm(state: &PlatoonState, i: usize, a: f64, b: f64, ovf: &Ovf) -> Result<f64, ModelError> {
    let first = accel_ovm(state, i, a, ovf)?;
    let second_spacing = 0.5 * (state.position_ahead(i, 2)? - state.x[i]);
    Ok(first + b * (ovf.eval(second_spacing) - state.v[i]))
}

/// Acceleration of the platoon leader under `spec.leader_rule`.
pub fn accel_leader(state: &PlatoonState, spec: &ModelSpec, ovf: &Ovf) -> Result<f64, ModelError> {
    match spec.leader_rule {
        LeaderRule::PrescribedVelocity => Err(ModelError::LeaderVelocityPrescribed),
        LeaderRule::OvmFollowsFirst => {
            if !state.is_ring() {
                return Err(ModelError::LeaderNeedsRing);
            }
            let leader = state.vehicle_count() - 1;
            match spec.kind {
                ModelKind::Ovm | ModelKind::POvm => accel_ovm(state, leader, spec.a, ovf),
                ModelKind::TOvm => accel_ovm(state, leader, spec.a + spec.b, ovf),
                ModelKind::FOvm => accel_fovm(state, leader, spec.a, spec.b, ovf),
            }
        }
    }
}

/// Accelerations for the whole platoon, written into `out` (length `N`).
/// Under a prescribed-velocity leader the leader slot is set to zero and the
/// integrator overrides its velocity analytically.
pub fn accelerations(
    state: &PlatoonState,
    spec: &ModelSpec,
    ovf: &Ovf,
    out: &mut [f64],
) -> Result<(), ModelError> {
    let n = state.vehicle_count();
    assert_eq!(out.len(), n, "output slice length must match vehicle count");
    for (i, slot) in out.iter_mut().enumerate().take(n - 1) {
        *slot = match spec.kind {
            ModelKind::Ovm => accel_ovm(state, i, spec.a, ovf)?,
            ModelKind::POvm => accel_povm(state, i, spec.a, ovf)?,
            ModelKind::TOvm => accel_tovm(state, i, spec.a, spec.b, ovf)?,
            ModelKind::FOvm => accel_fovm(state, i, spec.a, spec.b, ovf)?,
        };
    }
    out[n - 1] = match spec.leader_rule {
        LeaderRule::PrescribedVelocity => 0.0,
        LeaderRule::OvmFollowsFirst => accel_leader(state, spec, ovf)?,
    };
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use alloc::vec;

    fn cosine() -> Ovf {
        Ovf::cosine(7.0, 37.0, 20.0, 5.0).unwrap()
    }

    /// Uniform ring state `x_i = h i + c`, `v_i = V(h)`.
    fn uniform_ring(n: usize, h: f64, c: f64, ovf: &Ovf) -> PlatoonState {
        let x = (0..n).map(|i| h * i as f64 + c).collect();
        let v = vec![ovf.eval(h); n];
        PlatoonState::new(0.0, x, v, Some(h * n as f64)).unwrap()
    }

    #[test]
    fn headway_wraps_on_ring() {
        let ovf = cosine();
        let state = uniform_ring(12, 22.0, 0.0, &ovf);
        for i in 0..12 {
            assert!((state.headway(i).unwrap() - 22.0).abs() < 1e-12);
        }
        // Leader wrap: x = [0, 22, ..., 242], L = 264 -> 0 + 264 - 242 = 22.
        assert_eq!(state.x[11], 242.0);
        assert_eq!(state.headway(11).unwrap(), 22.0);
    }

    #[test]
    fn negative_headways_are_permitted() {
        let state =
            PlatoonState::new(0.0, vec![0.0, -1.0, 5.0], vec![0.0; 3], None).unwrap();
        assert_eq!(state.headway(0).unwrap(), -1.0);
    }

    #[test]
    fn leader_headway_undefined_on_open_road() {
        let state = PlatoonState::new(0.0, vec![0.0, 22.0], vec![10.0; 2], None).unwrap();
        assert!(matches!(
            state.headway(1),
            Err(ModelError::NoVehicleAhead { vehicle: 1, ahead: 1 })
        ));
    }

    #[test]
    fn ovm_examples() {
        let ovf = cosine();
        // Equilibrium pair: h = 22, v = V(22) = 10.
        let eq = PlatoonState::new(0.0, vec![0.0, 22.0], vec![10.0, 10.0], None).unwrap();
        assert!(accel_ovm(&eq, 0, 1.6, &ovf).unwrap().abs() < 1e-12);
        // Standing start: a (V(22) - 0) = 10.
        let standing = PlatoonState::new(0.0, vec![0.0, 22.0], vec![0.0, 0.0], None).unwrap();
        assert!((accel_ovm(&standing, 0, 1.0, &ovf).unwrap() - 10.0).abs() < 1e-12);
        // Jammed: V(7) = 0, so 2 (0 - 5) = -10.
        let jammed = PlatoonState::new(0.0, vec![0.0, 7.0], vec![5.0, 0.0], None).unwrap();
        assert!((accel_ovm(&jammed, 0, 2.0, &ovf).unwrap() + 10.0).abs() < 1e-12);
    }

    #[test]
    fn povm_equilibrium_and_reduction() {
        let ovf = cosine();
        let state = uniform_ring(12, 22.0, 0.0, &ovf);
        for i in 0..11 {
            assert!(accel_povm(&state, i, 2.4, &ovf).unwrap().abs() < 1e-10);
        }
        // For the last follower the average spacing is the plain headway.
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let x = vec![rng.uniform(0.0, 10.0), rng.uniform(15.0, 40.0), rng.uniform(45.0, 70.0)];
            let v = vec![rng.uniform(0.0, 20.0); 3];
            let s = PlatoonState::new(0.0, x, v, None).unwrap();
            let lhs = accel_povm(&s, 1, 1.3, &ovf).unwrap();
            let rhs = accel_ovm(&s, 1, 1.3, &ovf).unwrap();
            assert_eq!(lhs, rhs);
        }
        assert!(matches!(
            accel_povm(&state, 11, 1.0, &ovf),
            Err(ModelError::NotAFollower { vehicle: 11 })
        ));
    }

    #[test]
    fn povm_average_spacing_example() {
        let ovf = cosine();
        // N = 3, x = [0, 10, 50]: average spacing to the leader is 25 for
        // vehicle 0, and V(25) = 10 (1 - cos(0.6 pi)).
        let state = PlatoonState::new(0.0, vec![0.0, 10.0, 50.0], vec![0.0, 0.0, 0.0], None).unwrap();
        let expected = 10.0 * (1.0 - (0.6 * core::f64::consts::PI).cos());
        let got = accel_povm(&state, 0, 1.0, &ovf).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 13.09).abs() < 5e-3);
    }

    #[test]
    fn tovm_decomposes_exactly() {
        let ovf = cosine();
        let mut rng = SplitMix64::new(17);
        for _ in 0..100 {
            let n = 4 + (rng.next_u64() % 8) as usize;
            let mut x = Vec::with_capacity(n);
            let mut acc = 0.0;
            for _ in 0..n {
                x.push(acc);
                acc += rng.uniform(5.0, 40.0);
            }
            let v = (0..n).map(|_| rng.uniform(0.0, 20.0)).collect();
            let s = PlatoonState::new(0.0, x, v, Some(acc)).unwrap();
            let (a, b) = (rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0));
            for i in 0..n - 1 {
                let whole = accel_tovm(&s, i, a, b, &ovf).unwrap();
                let parts =
                    accel_ovm(&s, i, a, &ovf).unwrap() + accel_povm(&s, i, b, &ovf).unwrap();
                assert_eq!(whole, parts);
            }
            // Degenerate weights reduce to the single-target laws.
            for i in 0..n - 1 {
                assert_eq!(
                    accel_tovm(&s, i, a, 0.0, &ovf).unwrap(),
                    accel_ovm(&s, i, a, &ovf).unwrap()
                );
                assert_eq!(
                    accel_tovm(&s, i, 0.0, b, &ovf).unwrap(),
                    accel_povm(&s, i, b, &ovf).unwrap()
                );
            }
        }
    }

    #[test]
    fn fovm_examples() {
        let ovf = cosine();
        let state = uniform_ring(12, 22.0, 3.0, &ovf);
        for i in 0..12 {
            assert!(accel_fovm(&state, i, 1.0, 1.0, &ovf).unwrap().abs() < 1e-10);
        }
        // x = [0, 22, 50]: first term vanishes, second is V(25) - 10.
        let s = PlatoonState::new(0.0, vec![0.0, 22.0, 50.0], vec![10.0, 10.0, 10.0], None).unwrap();
        let expected = 10.0 * (1.0 - (0.6 * core::f64::consts::PI).cos()) - 10.0;
        let got = accel_fovm(&s, 0, 1.0, 1.0, &ovf).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 3.09).abs() < 5e-3);
        // b = 0 reduces to the predecessor law.
        assert_eq!(accel_fovm(&s, 0, 1.4, 0.0, &ovf).unwrap(), accel_ovm(&s, 0, 1.4, &ovf).unwrap());
        // Two-ahead is undefined for the last two vehicles on an open road.
        assert!(accel_fovm(&s, 1, 1.0, 1.0, &ovf).is_err());
    }

    #[test]
    fn leader_law_examples() {
        let ovf = cosine();
        let eq = uniform_ring(12, 22.0, 0.0, &ovf);
        let povm = ModelSpec::povm(1.0, LeaderRule::OvmFollowsFirst).unwrap();
        assert!(accel_leader(&eq, &povm, &ovf).unwrap().abs() < 1e-12);
        let tovm = ModelSpec::tovm(0.6, 0.6, LeaderRule::OvmFollowsFirst).unwrap();
        assert!(accel_leader(&eq, &tovm, &ovf).unwrap().abs() < 1e-12);

        // Jammed leader: wrap headway 7, V = 0. P-OVM leader uses a, the
        // blended leader uses a + b.
        let n = 12;
        let mut x: Vec<f64> = (0..n).map(|i| 22.0 * i as f64).collect();
        x[0] = 242.0 + 7.0 - 264.0; // wrap headway x0 + L - x11 = 7
        let mut v = vec![10.0; n];
        v[n - 1] = 5.0;
        let jam = PlatoonState::new(0.0, x, v, Some(264.0)).unwrap();
        let povm2 = ModelSpec::povm(2.0, LeaderRule::OvmFollowsFirst).unwrap();
        assert!((accel_leader(&jam, &povm2, &ovf).unwrap() + 10.0).abs() < 1e-12);
        let tovm2 = ModelSpec::tovm(1.0, 1.0, LeaderRule::OvmFollowsFirst).unwrap();
        assert!((accel_leader(&jam, &tovm2, &ovf).unwrap() + 10.0).abs() < 1e-12);

        // Contract errors.
        let open = PlatoonState::new(0.0, vec![0.0, 22.0], vec![10.0; 2], None).unwrap();
        assert!(matches!(accel_leader(&open, &povm, &ovf), Err(ModelError::LeaderNeedsRing)));
        let prescribed = ModelSpec::povm(1.0, LeaderRule::PrescribedVelocity).unwrap();
        assert!(matches!(
            accel_leader(&eq, &prescribed, &ovf),
            Err(ModelError::LeaderVelocityPrescribed)
        ));
    }

    #[test]
    fn equilibrium_annihilates_every_model() {
        let ovf = cosine();
        let mut rng = SplitMix64::new(31);
        for _ in 0..50 {
            let n = 3 + (rng.next_u64() % 10) as usize;
            let h = rng.uniform(10.0, 34.0);
            let c = rng.uniform(-50.0, 50.0);
            let ring = uniform_ring(n, h, c, &ovf);
            let mut out = vec![0.0; n];
            for spec in [
                ModelSpec::ovm(1.3, LeaderRule::OvmFollowsFirst).unwrap(),
                ModelSpec::povm(0.7, LeaderRule::OvmFollowsFirst).unwrap(),
                ModelSpec::tovm(0.4, 0.9, LeaderRule::OvmFollowsFirst).unwrap(),
                ModelSpec::fovm(0.4, 0.9, LeaderRule::OvmFollowsFirst).unwrap(),
            ] {
                accelerations(&ring, &spec, &ovf, &mut out).unwrap();
                assert!(out.iter().all(|a| a.abs() < 1e-9), "{spec:?} broke equilibrium");
            }
        }
    }

    #[test]
    fn laws_are_linear_in_sensitivities() {
        let ovf = cosine();
        let mut rng = SplitMix64::new(41);
        for _ in 0..100 {
            let x = vec![0.0, rng.uniform(8.0, 30.0), rng.uniform(38.0, 60.0), rng.uniform(66.0, 90.0)];
            let v = (0..4).map(|_| rng.uniform(0.0, 20.0)).collect();
            let s = PlatoonState::new(0.0, x, v, Some(100.0)).unwrap();
            let (a, b) = (rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0));
            for i in 0..3 {
                let one = accel_tovm(&s, i, a, b, &ovf).unwrap();
                let two = accel_tovm(&s, i, 2.0 * a, 2.0 * b, &ovf).unwrap();
                assert!((two - 2.0 * one).abs() < 1e-10 * (1.0 + two.abs()));
            }
        }
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::new(ModelKind::Ovm, 1.0, 0.5, LeaderRule::OvmFollowsFirst).is_err());
        assert!(ModelSpec::new(ModelKind::TOvm, 0.0, 0.0, LeaderRule::OvmFollowsFirst).is_err());
        assert!(ModelSpec::new(ModelKind::TOvm, -0.1, 0.5, LeaderRule::OvmFollowsFirst).is_err());
        assert!(ModelSpec::new(ModelKind::TOvm, 0.0, 0.5, LeaderRule::OvmFollowsFirst).is_ok());
    }
}
