//! Model constants for the three-zone swarm and its update rule.

use crate::error::SwarmError;
use crate::vec2::Vec2;

/// All model constants. Lengths and times are dimensionless; the zone scales
/// and `dt` set the units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SwarmParams {
    /// Repulsion zone scale.
    pub sigma1: f64,
    /// Orientation zone scale; also the bandwidth of the density smoothing
    /// kernel used by the leader blend.
    pub sigma2: f64,
    /// Attraction zone scale.
    pub sigma3: f64,
    /// Relative weight of the attraction term in the desired velocity.
    pub c_a: f64,
    /// Density scale over which a leader's goal response decays.
    pub leader_decay: f64,
    /// Preferred direction known to leaders; must be a unit vector.
    pub goal_dir: Vec2,
    /// Integration timestep.
    pub dt: f64,
    /// Relaxation rate of the actual velocity toward the desired velocity.
    pub relax_rate: f64,
    /// Self-propulsion gain: speed is driven toward sqrt(alpha/beta).
    pub alpha: f64,
    /// Self-propulsion drag.
    pub beta: f64,
    /// Interaction kernels are truncated beyond this distance.
    pub cutoff_radius: f64,
}

impl Default for SwarmParams {
    fn default() -> Self {
        SwarmParams {
            sigma1: 0.5,
            sigma2: 1.0,
            sigma3: 2.0,
            c_a: 1.0,
            leader_decay: 0.5,
            goal_dir: Vec2::new(1.0, 0.0),
            dt: 0.05,
            relax_rate: 2.0,
            alpha: 1.0,
            beta: 1.0,
            cutoff_radius: 12.0,
        }
    }
}

impl SwarmParams {
    pub fn validate(&self) -> Result<(), SwarmError> {
        let positive = [
            ("sigma1", self.sigma1),
            ("sigma2", self.sigma2),
            ("sigma3", self.sigma3),
            ("leader_decay", self.leader_decay),
            ("dt", self.dt),
            ("relax_rate", self.relax_rate),
            ("cutoff_radius", self.cutoff_radius),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(SwarmError::Config(format!("{name} must be > 0, got {v}")));
            }
        }
        for (name, v) in [("c_a", self.c_a), ("alpha", self.alpha), ("beta", self.beta)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(SwarmError::Config(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.sigma1 < self.sigma2 && self.sigma2 < self.sigma3) {
            return Err(SwarmError::Config(format!(
                "zone scales must be ordered sigma1 < sigma2 < sigma3, got {} {} {}",
                self.sigma1, self.sigma2, self.sigma3
            )));
        }
        if (self.goal_dir.norm() - 1.0).abs() > 1e-12 {
            return Err(SwarmError::Config(format!(
                "goal_dir must be a unit vector, |g| = {}",
                self.goal_dir.norm()
            )));
        }
        Ok(())
    }
}
