//! Scalar order parameters describing the swarm configuration.

use crate::agent::SwarmSnapshot;
use crate::vec2::Vec2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderParameters {
    /// |sum of unit headings| / N, in [0, 1].
    pub polarization: f64,
    /// Angle of the summed unit headings, radians in (-pi, pi].
    pub mean_heading: f64,
    /// Largest distance of any agent from the position centroid.
    pub group_radius: f64,
}

fn heading_sum(snapshot: &SwarmSnapshot) -> Vec2 {
    let mut sum = Vec2::ZERO;
    for a in &snapshot.agents {
        sum += a.vel.normalized();
    }
    sum
}

pub fn polarization(snapshot: &SwarmSnapshot) -> f64 {
    heading_sum(snapshot).norm() / snapshot.len() as f64
}

pub fn mean_heading(snapshot: &SwarmSnapshot) -> f64 {
    heading_sum(snapshot).angle()
}

pub fn centroid(snapshot: &SwarmSnapshot) -> Vec2 {
    let mut sum = Vec2::ZERO;
    for a in &snapshot.agents {
        sum += a.pos;
    }
    sum / snapshot.len() as f64
}

pub fn group_radius(snapshot: &SwarmSnapshot) -> f64 {
    let c = centroid(snapshot);
    snapshot
        .agents
        .iter()
        .map(|a| (a.pos - c).norm())
        .fold(0.0, f64::max)
}

pub fn order_parameters(snapshot: &SwarmSnapshot) -> OrderParameters {
    let sum = heading_sum(snapshot);
    OrderParameters {
        polarization: sum.norm() / snapshot.len() as f64,
        mean_heading: sum.angle(),
        group_radius: group_radius(snapshot),
    }
}
