//! Optimal-velocity functions: the map `V(h)` from headway to target speed,
//! its analytic derivative, and the fundamental-diagram view `q(k) = k V(1/k)`.
//!
//! Two families are provided. The cosine form ramps smoothly between a
//! standstill headway and a free-flow headway. The piecewise-linear form is
//! parameterized in occupancy `rho = l/h` and corresponds to a triangular
//! fundamental diagram: free flow at `rho <= rho_c`, a linear congested branch
//! up to the jam occupancy `rho_max`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::math;

/// Smooth ramp `V(h) = v_max/2 * (1 - cos(pi (h - h_min)/(h_max - h_min)))`
/// on `[h_min, h_max]`, clamped to `0` below and `v_max` above.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineOvf {
    h_min: f64,
    h_max: f64,
    v_max: f64,
    vehicle_length: f64,
}

/// Occupancy-parameterized law equivalent to a triangular fundamental
/// diagram: `V = v_max` for `rho(h) <= rho_c`, zero for `rho >= rho_max`,
/// and `v_max * rho_c (rho - rho_max) / (rho (rho_c - rho_max))` between,
/// with `rho(h) = l/h`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularOvf {
    v_max: f64,
    vehicle_length: f64,
    rho_c: f64,
    rho_max: f64,
}

/// Parameter errors caught at construction; evaluation itself is total.
#[derive(Debug, Clone, PartialEq)]
pub enum OvfError {
    /// A parameter was non-finite, non-positive, or ordered wrongly.
    InvalidParameter(&'static str),
    /// No headway satisfies `V(h) = v` for the requested speed.
    NoEquilibrium { speed: f64 },
}

impl fmt::Display for OvfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OvfError::InvalidParameter(what) => write!(f, "invalid OVF parameter: {what}"),
            OvfError::NoEquilibrium { speed } => {
                write!(f, "no interior equilibrium headway for speed {speed} m/s")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for OvfError {}

impl CosineOvf {
    pub fn new(h_min: f64, h_max: f64, v_max: f64, vehicle_length: f64) -> Result<Self, OvfError> {
        if !(h_min.is_finite() && h_max.is_finite() && v_max.is_finite() && vehicle_length.is_finite())
        {
            return Err(OvfError::InvalidParameter("non-finite value"));
        }
        if h_min <= 0.0 || h_max <= h_min {
            return Err(OvfError::InvalidParameter("need 0 < h_min < h_max"));
        }
        if v_max <= 0.0 {
            return Err(OvfError::InvalidParameter("need v_max > 0"));
        }
        if vehicle_length <= 0.0 {
            return Err(OvfError::InvalidParameter("need vehicle_length > 0"));
        }
        Ok(Self { h_min, h_max, v_max, vehicle_length })
    }

    pub fn h_min(&self) -> f64 {
        self.h_min
    }
    pub fn h_max(&self) -> f64 {
        self.h_max
    }
}

impl TriangularOvf {
    pub fn new(v_max: f64, vehicle_length: f64, rho_c: f64, rho_max: f64) -> Result<Self, OvfError> {
        if !(v_max.is_finite() && vehicle_length.is_finite() && rho_c.is_finite() && rho_max.is_finite())
        {
            return Err(OvfError::InvalidParameter("non-finite value"));
        }
        if v_max <= 0.0 {
            return Err(OvfError::InvalidParameter("need v_max > 0"));
        }
        if vehicle_length <= 0.0 {
            return Err(OvfError::InvalidParameter("need vehicle_length > 0"));
        }
        if !(0.0 < rho_c && rho_c < rho_max && rho_max <= 1.0) {
            return Err(OvfError::InvalidParameter("need 0 < rho_c < rho_max <= 1"));
        }
        Ok(Self { v_max, vehicle_length, rho_c, rho_max })
    }

    /// Headway at which the congested branch reaches zero speed, `l / rho_max`.
    pub fn jam_headway(&self) -> f64 {
        self.vehicle_length / self.rho_max
    }

    /// Headway at which free flow begins, `l / rho_c`.
    pub fn free_flow_headway(&self) -> f64 {
        self.vehicle_length / self.rho_c
    }
}

/// Either OVF family behind one evaluation surface.
#[derive(Debug, Clone, PartialEq)]
pub enum Ovf {
    Cosine(CosineOvf),
    Triangular(TriangularOvf),
}

impl Ovf {
    pub fn cosine(h_min: f64, h_max: f64, v_max: f64, vehicle_length: f64) -> Result<Self, OvfError> {
        CosineOvf::new(h_min, h_max, v_max, vehicle_length).map(Ovf::Cosine)
    }

    pub fn triangular(v_max: f64, vehicle_length: f64, rho_c: f64, rho_max: f64) -> Result<Self, OvfError> {
        TriangularOvf::new(v_max, vehicle_length, rho_c, rho_max).map(Ovf::Triangular)
    }

    pub fn v_max(&self) -> f64 {
        match self {
            Ovf::Cosine(c) => c.v_max,
            Ovf::Triangular(t) => t.v_max,
        }
    }

    pub fn vehicle_length(&self) -> f64 {
        match self {
            Ovf::Cosine(c) => c.vehicle_length,
            Ovf::Triangular(t) => t.vehicle_length,
        }
    }

    /// Largest headway with `V(h) = 0`.
    pub fn jam_headway(&self) -> f64 {
        match self {
            Ovf::Cosine(c) => c.h_min,
            Ovf::Triangular(t) => t.jam_headway(),
        }
    }

    /// Smallest headway with `V(h) = v_max`.
    pub fn saturation_headway(&self) -> f64 {
        match self {
            Ovf::Cosine(c) => c.h_max,
            Ovf::Triangular(t) => t.free_flow_headway(),
        }
    }

    /// Target speed at headway `h` (m/s). Total over all finite `h`;
    /// non-positive headways fall on the standstill branch.
    pub fn eval(&self, h: f64) -> f64 {
        match self {
            Ovf::Cosine(c) => {
                if h <= c.h_min {
                    0.0
                } else if h >= c.h_max {
                    c.v_max
                } else {
                    0.5 * c.v_max * (1.0 - math::cos(PI * (h - c.h_min) / (c.h_max - c.h_min)))
                }
            }
            Ovf::Triangular(t) => {
                // rho = l/h blows up as h -> 0+ and flips sign for h < 0;
                // both belong to the jammed branch.
                if h <= t.jam_headway() {
                    0.0
                } else if h >= t.free_flow_headway() {
                    t.v_max
                } else {
                    let rho = t.vehicle_length / h;
                    t.v_max * t.rho_c * (rho - t.rho_max) / (rho * (t.rho_c - t.rho_max))
                }
            }
        }
    }

    /// Analytic `dV/dh` (1/s). Zero on the clamped branches; at a breakpoint
    /// the one-sided derivative of the interior piece is returned, so the
    /// cosine family (which is C1) reports 0 there and the triangular family
    /// reports its congested-branch slope.
    pub fn eval_derivative(&self, h: f64) -> f64 {
        match self {
            Ovf::Cosine(c) => {
                if h < c.h_min || h > c.h_max {
                    0.0
                } else {
                    let w = PI / (c.h_max - c.h_min);
                    0.5 * c.v_max * w * math::sin(w * (h - c.h_min))
                }
            }
            Ovf::Triangular(t) => {
                if h < t.jam_headway() || h > t.free_flow_headway() {
                    0.0
                } else {
                    // d/dh of v_max rho_c (1 - rho_max h / l)/(rho_c - rho_max)
                    t.v_max * t.rho_c * t.rho_max
                        / (t.vehicle_length * (t.rho_max - t.rho_c))
                }
            }
        }
    }

    /// Sampled fundamental diagram: `samples` points of (density `k = 1/h` in
    /// veh/m, flow `q = k V(1/k)` in veh/s), densities increasing up to the
    /// jam density `1/jam_headway`.
    pub fn fundamental_diagram(&self, samples: usize) -> Vec<(f64, f64)> {
        assert!(samples >= 2, "need at least two samples");
        let k_jam = 1.0 / self.jam_headway();
        (1..=samples)
            .map(|i| {
                let k = k_jam * i as f64 / samples as f64;
                (k, k * self.eval(1.0 / k))
            })
            .collect()
    }

    /// Headway at which `V(h) = speed`, for `0 < speed < v_max`. Bisection on
    /// the monotone interior bracket, polished with one Newton step.
    pub fn equilibrium_headway(&self, speed: f64) -> Result<f64, OvfError> {
        if !(speed > 0.0 && speed < self.v_max()) {
            return Err(OvfError::NoEquilibrium { speed });
        }
        let mut lo = self.jam_headway();
        let mut hi = self.saturation_headway();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < speed {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= f64::EPSILON * hi {
                break;
            }
        }
        let mut h = 0.5 * (lo + hi);
        let slope = self.eval_derivative(h);
        if slope > 0.0 {
            h -= (self.eval(h) - speed) / slope;
        }
        Ok(h)
    }
}
