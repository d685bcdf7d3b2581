//! Untruncated all-pairs evaluation of the interaction rules.
//!
//! These are deliberately plain loops, written independently of the
//! truncated spatial-hash path in [`crate::kernels`], and exist so tests can
//! check the production path against a straightforward implementation. They
//! are O(N^2) per agent set and not meant for production runs.

use std::f64::consts::PI;

use crate::agent::{Role, SwarmSnapshot};
use crate::params::SwarmParams;
use crate::vec2::Vec2;

pub fn repulsion_all_pairs(i: usize, snapshot: &SwarmSnapshot, params: &SwarmParams) -> Vec2 {
    let s_i = snapshot.agents[i].pos;
    let coef = 1.0 / (8.0 * PI * params.sigma1.powi(4));
    let mut sum = Vec2::ZERO;
    for a in &snapshot.agents {
        let s_ij = a.pos - s_i;
        let r2 = s_ij.norm_sq();
        sum += s_ij * (-coef * (-r2 / (4.0 * params.sigma1 * params.sigma1)).exp());
    }
    sum
}

pub fn orientation_all_pairs(i: usize, snapshot: &SwarmSnapshot, params: &SwarmParams) -> Vec2 {
    let s_i = snapshot.agents[i].pos;
    let coef = 1.0 / (4.0 * PI * params.sigma2 * params.sigma2);
    let mut num = Vec2::ZERO;
    let mut den = 0.0;
    for a in &snapshot.agents {
        let r2 = (a.pos - s_i).norm_sq();
        let w = coef * (-r2 / (4.0 * params.sigma2 * params.sigma2)).exp();
        num += a.vel * w;
        den += w;
    }
    num / den
}

pub fn attraction_all_pairs(i: usize, snapshot: &SwarmSnapshot, params: &SwarmParams) -> Vec2 {
    let s_i = snapshot.agents[i].pos;
    let coef = 1.0 / (64.0 * PI * params.sigma3.powi(6));
    let mut sum = Vec2::ZERO;
    for a in &snapshot.agents {
        let s_ij = a.pos - s_i;
        let r2 = s_ij.norm_sq();
        sum += s_ij * (coef * r2 * (-r2 / (4.0 * params.sigma3 * params.sigma3)).exp());
    }
    sum
}

pub fn desired_all_pairs(i: usize, snapshot: &SwarmSnapshot, params: &SwarmParams) -> Vec2 {
    repulsion_all_pairs(i, snapshot, params)
        + orientation_all_pairs(i, snapshot, params)
        + attraction_all_pairs(i, snapshot, params) * params.c_a
}

pub fn smoothed_density_all_pairs(
    at: Vec2,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
) -> f64 {
    let coef = 1.0 / (4.0 * PI * params.sigma2 * params.sigma2);
    snapshot
        .agents
        .iter()
        .map(|a| coef * (-(a.pos - at).norm_sq() / (4.0 * params.sigma2 * params.sigma2)).exp())
        .sum()
}

pub fn leader_desired_all_pairs(i: usize, snapshot: &SwarmSnapshot, params: &SwarmParams) -> Vec2 {
    let density = smoothed_density_all_pairs(snapshot.agents[i].pos, snapshot, params);
    let w_goal = (-density / params.leader_decay).exp();
    desired_all_pairs(i, snapshot, params) * (1.0 - w_goal) + params.goal_dir * w_goal
}

/// One synchronous integration step evaluated with the all-pairs sums above,
/// sequentially.
pub fn step_all_pairs(snapshot: &SwarmSnapshot, params: &SwarmParams) -> SwarmSnapshot {
    let desired: Vec<Vec2> = (0..snapshot.len())
        .map(|i| match snapshot.agents[i].role {
            Role::Follower => desired_all_pairs(i, snapshot, params),
            Role::Leader => leader_desired_all_pairs(i, snapshot, params),
        })
        .collect();

    let agents = snapshot
        .agents
        .iter()
        .zip(&desired)
        .map(|(a, &v_d)| {
            let v = a.vel;
            let accel =
                (v_d - v) * params.relax_rate + v * (params.alpha - params.beta * v.norm_sq());
            let v_new = v + accel * params.dt;
            let pos_new = a.pos + v_new * params.dt;
            crate::agent::AgentState {
                id: a.id,
                pos: pos_new,
                vel: v_new,
                role: a.role,
            }
        })
        .collect();

    SwarmSnapshot::new(snapshot.step + 1, agents)
}
