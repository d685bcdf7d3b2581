//! Three-zone interaction math: Gaussian repulsion, orientation and
//! attraction kernels, the combined desired velocity, and the smoothed
//! agent density used by the leader blend.
//!
//! All sums run over every agent including the agent itself. The repulsion
//! and attraction self-terms are identically zero; the orientation self-term
//! is retained, which keeps the normalization strictly positive even for an
//! isolated agent. Sums are truncated at `params.cutoff_radius`; the kernels
//! decay fast enough that agents beyond the cutoff contribute nothing at
//! working precision.
//!
//! Every path accumulates accepted neighbors in ascending index order, so
//! the per-agent operations, the batched grid-backed evaluation, and any
//! degree of parallelism all produce bit-identical results.

use std::f64::consts::PI;

use crate::agent::SwarmSnapshot;
use crate::error::SwarmError;
use crate::params::SwarmParams;
use crate::vec2::Vec2;

/// All interaction sums for one agent, evaluated in a single pass over its
/// neighbors.
#[derive(Clone, Copy, Debug)]
pub struct InteractionTerms {
    pub repulsion: Vec2,
    pub orientation: Vec2,
    pub attraction: Vec2,
    /// Smoothed agent density at the agent's own position. The density
    /// kernel equals the orientation kernel, so this is the orientation
    /// normalizer.
    pub density_at_self: f64,
}

impl InteractionTerms {
    /// Desired velocity of a follower: repulsion + orientation + c_a * attraction.
    pub fn desired(&self, params: &SwarmParams) -> Vec2 {
        self.repulsion + self.orientation + self.attraction * params.c_a
    }
}

#[derive(Clone, Copy)]
struct KernelCoefs {
    cutoff_sq: f64,
    rep_coef: f64,
    rep_inv4s: f64,
    orient_coef: f64,
    orient_inv4s: f64,
    att_coef: f64,
    att_inv4s: f64,
}

impl KernelCoefs {
    fn new(params: &SwarmParams) -> Self {
        KernelCoefs {
            cutoff_sq: params.cutoff_radius * params.cutoff_radius,
            rep_coef: 1.0 / (8.0 * PI * params.sigma1.powi(4)),
            rep_inv4s: 1.0 / (4.0 * params.sigma1 * params.sigma1),
            orient_coef: 1.0 / (4.0 * PI * params.sigma2 * params.sigma2),
            orient_inv4s: 1.0 / (4.0 * params.sigma2 * params.sigma2),
            att_coef: 1.0 / (64.0 * PI * params.sigma3.powi(6)),
            att_inv4s: 1.0 / (4.0 * params.sigma3 * params.sigma3),
        }
    }
}

fn check_index(i: usize, snapshot: &SwarmSnapshot) -> Result<(), SwarmError> {
    if i >= snapshot.len() {
        Err(SwarmError::InvalidIndex {
            index: i,
            len: snapshot.len(),
        })
    } else {
        Ok(())
    }
}

/// Single-pass evaluation of all interaction sums for agent `i` over the
/// given candidate indices (which must be in ascending order and cover every
/// agent within the cutoff of `i`). Candidates beyond the cutoff are skipped
/// by the exact radius test, so a superset is fine.
pub fn interaction_terms<I>(
    i: usize,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
    candidates: I,
) -> InteractionTerms
where
    I: IntoIterator<Item = usize>,
{
    let c = KernelCoefs::new(params);
    let pos_i = snapshot.agents[i].pos;

    let mut repulsion = Vec2::ZERO;
    let mut orient_num = Vec2::ZERO;
    let mut orient_den = 0.0;
    let mut attraction = Vec2::ZERO;

    for j in candidates {
        let agent_j = &snapshot.agents[j];
        let s_ij = agent_j.pos - pos_i;
        let d2 = s_ij.norm_sq();
        if d2 > c.cutoff_sq {
            continue;
        }
        repulsion += s_ij * (-c.rep_coef * (-d2 * c.rep_inv4s).exp());
        let k2 = c.orient_coef * (-d2 * c.orient_inv4s).exp();
        orient_num += agent_j.vel * k2;
        orient_den += k2;
        attraction += s_ij * (c.att_coef * d2 * (-d2 * c.att_inv4s).exp());
    }

    InteractionTerms {
        repulsion,
        orientation: orient_num / orient_den,
        attraction,
        density_at_self: orient_den,
    }
}

fn terms_full_scan(
    i: usize,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
) -> InteractionTerms {
    interaction_terms(i, snapshot, params, 0..snapshot.len())
}

/// Repulsion component of the desired velocity for agent `i`.
pub fn repulsion_velocity(
    i: usize,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
) -> Result<Vec2, SwarmError> {
    check_index(i, snapshot)?;
    Ok(terms_full_scan(i, snapshot, params).repulsion)
}

/// Orientation component: the kernel-weighted average of neighbor velocities.
/// The self term keeps the normalizer strictly positive.
pub fn orientation_velocity(
    i: usize,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
) -> Result<Vec2, SwarmError> {
    check_index(i, snapshot)?;
    Ok(terms_full_scan(i, snapshot, params).orientation)
}

/// Attraction component of the desired velocity for agent `i`.
pub fn attraction_velocity(
    i: usize,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
) -> Result<Vec2, SwarmError> {
    check_index(i, snapshot)?;
    Ok(terms_full_scan(i, snapshot, params).attraction)
}

/// Desired velocity of agent `i` under the leaderless interaction rule:
/// repulsion + orientation + c_a * attraction.
pub fn desired_velocity(
    i: usize,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
) -> Result<Vec2, SwarmError> {
    check_index(i, snapshot)?;
    Ok(terms_full_scan(i, snapshot, params).desired(params))
}

/// Kernel-density estimate of the agent density at `at`: the sum of the
/// orientation kernel over all agents (point masses), truncated at the
/// cutoff. Strictly positive at any agent's own position.
pub fn smoothed_density(at: Vec2, snapshot: &SwarmSnapshot, params: &SwarmParams) -> f64 {
    let c = KernelCoefs::new(params);
    let mut den = 0.0;
    for agent in &snapshot.agents {
        let d2 = (agent.pos - at).norm_sq();
        if d2 > c.cutoff_sq {
            continue;
        }
        den += c.orient_coef * (-d2 * c.orient_inv4s).exp();
    }
    den
}
