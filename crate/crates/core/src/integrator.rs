//! Time integration: synchronous velocity-relaxation update, lattice initial
//! conditions, and multi-step runs.
//!
//! The velocity update combines relaxation toward the role-specific desired
//! velocity with a self-propulsion term that drives the speed toward
//! `sqrt(alpha/beta)` while leaving it free to fluctuate:
//!
//! ```text
//! v' = v + dt * ( relax_rate * (v_d - v) + (alpha - beta*|v|^2) * v )
//! s' = s + dt * v'
//! ```
//!
//! All desired velocities are computed from the input snapshot before any
//! state is mutated, so the update is synchronous and the result is
//! independent of agent ordering and of how the per-agent work is
//! parallelized.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::agent::{AgentState, Role, SwarmSnapshot};
use crate::error::{Diverged, SwarmError};
use crate::grid::NeighborGrid;
use crate::kernels;
use crate::leadership::{blend_from_density, blend_velocity};
use crate::params::SwarmParams;
use crate::vec2::Vec2;

/// A full simulation output: every snapshot from step 0 to the final step.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub params: SwarmParams,
    pub seed: u64,
    pub snapshots: Vec<SwarmSnapshot>,
}

impl Trajectory {
    pub fn final_snapshot(&self) -> &SwarmSnapshot {
        self.snapshots.last().expect("trajectory never empty")
    }

    pub fn n_steps(&self) -> usize {
        self.snapshots.len().saturating_sub(1)
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Invalid(#[from] SwarmError),
    #[error(transparent)]
    Diverged(#[from] Box<Diverged>),
}

/// Desired velocity for agent `i`, honoring its role, accumulated over the
/// given sorted candidate indices.
fn role_desired(
    i: usize,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
    candidates: &[usize],
) -> Vec2 {
    let terms = kernels::interaction_terms(i, snapshot, params, candidates.iter().copied());
    let v_d = terms.desired(params);
    match snapshot.agents[i].role {
        Role::Follower => v_d,
        Role::Leader => {
            let blend = blend_from_density(terms.density_at_self, params);
            blend_velocity(&blend, v_d, params.goal_dir)
        }
    }
}

/// Advances the swarm by one step. Desired velocities for all agents are
/// evaluated in parallel from the immutable input snapshot; the update is
/// then applied synchronously.
pub fn step(snapshot: &SwarmSnapshot, params: &SwarmParams) -> Result<SwarmSnapshot, SwarmError> {
    if snapshot.is_empty() {
        return Err(SwarmError::InvalidState("empty snapshot".into()));
    }

    let positions: Vec<Vec2> = snapshot.agents.iter().map(|a| a.pos).collect();
    let grid = NeighborGrid::build(&positions, params.cutoff_radius);

    let desired: Vec<Vec2> = (0..snapshot.len())
        .into_par_iter()
        .map_init(Vec::new, |buf, i| {
            grid.candidates_sorted(positions[i], buf);
            role_desired(i, snapshot, params, buf)
        })
        .collect();

    let next_step = snapshot.step + 1;
    let mut agents = Vec::with_capacity(snapshot.len());
    for (a, &v_d) in snapshot.agents.iter().zip(&desired) {
        let v = a.vel;
        let accel = (v_d - v) * params.relax_rate + v * (params.alpha - params.beta * v.norm_sq());
        let v_new = v + accel * params.dt;
        let pos_new = a.pos + v_new * params.dt;
        if !v_new.is_finite() || !pos_new.is_finite() {
            return Err(SwarmError::NonFinite {
                agent_id: a.id,
                step: next_step,
            });
        }
        agents.push(AgentState {
            id: a.id,
            pos: pos_new,
            vel: v_new,
            role: a.role,
        });
    }
    Ok(SwarmSnapshot::new(next_step, agents))
}

/// Places `n_side^2` agents on a square lattice centered at the origin, with
/// i.i.d. uniform headings at the given speed, and promotes a seeded random
/// subset of round(leader_fraction * N) agents to leaders.
pub fn init_lattice(
    n_side: usize,
    spacing: f64,
    leader_fraction: f64,
    speed: f64,
    seed: u64,
) -> Result<SwarmSnapshot, SwarmError> {
    if n_side < 1 {
        return Err(SwarmError::Config("n_side must be >= 1".into()));
    }
    if !(spacing > 0.0) {
        return Err(SwarmError::Config(format!(
            "spacing must be > 0, got {spacing}"
        )));
    }
    if !(speed > 0.0) {
        return Err(SwarmError::Config(format!("speed must be > 0, got {speed}")));
    }
    if !(0.0..=1.0).contains(&leader_fraction) {
        return Err(SwarmError::Config(format!(
            "leader_fraction must be in [0, 1], got {leader_fraction}"
        )));
    }

    let n = n_side * n_side;
    let half = (n_side as f64 - 1.0) / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut agents = Vec::with_capacity(n);
    for id in 0..n {
        let row = id / n_side;
        let col = id % n_side;
        let pos = Vec2::new((col as f64 - half) * spacing, (row as f64 - half) * spacing);
        let theta: f64 = rng.random_range(0.0..TAU);
        agents.push(AgentState {
            id,
            pos,
            vel: Vec2::from_angle(theta) * speed,
            role: Role::Follower,
        });
    }

    let n_leaders = ((leader_fraction * n as f64).round() as usize).min(n);
    for idx in rand::seq::index::sample(&mut rng, n, n_leaders) {
        agents[idx].role = Role::Leader;
    }

    Ok(SwarmSnapshot::new(0, agents))
}

/// Runs `n_steps` synchronous steps from `initial`. Deterministic given the
/// initial snapshot and parameters. On numerical divergence the error keeps
/// every snapshot produced before the failing step.
pub fn run(
    initial: SwarmSnapshot,
    params: &SwarmParams,
    n_steps: usize,
    seed: u64,
) -> Result<Trajectory, RunError> {
    params.validate()?;
    initial.validate()?;

    let mut snapshots = Vec::with_capacity(n_steps + 1);
    snapshots.push(initial);
    for _ in 0..n_steps {
        match step(snapshots.last().unwrap(), params) {
            Ok(next) => snapshots.push(next),
            Err(SwarmError::NonFinite { agent_id, step }) => {
                return Err(Box::new(Diverged {
                    agent_id,
                    step,
                    partial: Trajectory {
                        params: *params,
                        seed,
                        snapshots,
                    },
                })
                .into());
            }
            Err(other) => return Err(other.into()),
        }
    }
    Ok(Trajectory {
        params: *params,
        seed,
        snapshots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn single_follower(vel: Vec2) -> SwarmSnapshot {
        SwarmSnapshot::new(
            0,
            vec![AgentState {
                id: 0,
                pos: Vec2::new(0.5, -0.5),
                vel,
                role: Role::Follower,
            }],
        )
    }

    #[test]
    fn preferred_speed_is_a_fixed_point() {
        let params = SwarmParams::default(); // alpha = beta = 1 -> preferred speed 1
        let vel = Vec2::from_angle(0.83);
        let snap = single_follower(vel);
        let next = step(&snap, &params).unwrap();
        assert_abs_diff_eq!(next.agents[0].vel.x, vel.x, epsilon = 1e-14);
        assert_abs_diff_eq!(next.agents[0].vel.y, vel.y, epsilon = 1e-14);
        let expected_pos = snap.agents[0].pos + next.agents[0].vel * params.dt;
        assert_eq!(next.agents[0].pos, expected_pos);
        assert_eq!(next.step, 1);
    }

    #[test]
    fn ballistic_motion_without_forces() {
        // step() does not gate on validate(), so degenerate parameters are
        // usable for probing the update rule in isolation.
        let params = SwarmParams {
            relax_rate: 0.0,
            alpha: 0.0,
            beta: 0.0,
            ..SwarmParams::default()
        };
        let vel = Vec2::new(0.3, 1.1);
        let mut snap = single_follower(vel);
        for _ in 0..5 {
            snap = step(&snap, &params).unwrap();
        }
        assert_abs_diff_eq!(snap.agents[0].vel.x, vel.x, epsilon = 1e-12);
        assert_abs_diff_eq!(snap.agents[0].vel.y, vel.y, epsilon = 1e-12);
    }

    #[test]
    fn speed_regulates_toward_preferred_value() {
        // Relaxation disabled; only the self-propulsion term acts.
        let params = SwarmParams {
            relax_rate: 0.0,
            ..SwarmParams::default()
        };
        for start in [0.2, 2.5] {
            let mut snap = single_follower(Vec2::from_angle(1.0) * start);
            let mut last = start;
            for _ in 0..200 {
                snap = step(&snap, &params).unwrap();
                let s = snap.agents[0].vel.norm();
                if start < 1.0 {
                    assert!(s >= last - 1e-12, "speed must rise monotonically");
                } else {
                    assert!(s <= last + 1e-12, "speed must fall monotonically");
                }
                last = s;
            }
            assert_abs_diff_eq!(last, 1.0, epsilon = 1e-3);
        }
    }

    #[test]
    fn lattice_counts_and_roles() {
        let snap = init_lattice(10, 1.0, 0.15, 1.0, 7).unwrap();
        assert_eq!(snap.len(), 100);
        assert_eq!(snap.n_leaders(), 15);
        snap.validate().unwrap();
        for a in &snap.agents {
            assert_abs_diff_eq!(a.vel.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn lattice_without_leaders() {
        let snap = init_lattice(4, 0.8, 0.0, 2.0, 1).unwrap();
        assert_eq!(snap.n_leaders(), 0);
    }

    #[test]
    fn lattice_is_deterministic() {
        let a = init_lattice(6, 1.0, 0.2, 1.0, 42).unwrap();
        let b = init_lattice(6, 1.0, 0.2, 1.0, 42).unwrap();
        assert_eq!(a, b);
        let c = init_lattice(6, 1.0, 0.2, 1.0, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn lattice_rejects_bad_fraction() {
        assert!(init_lattice(3, 1.0, 1.5, 1.0, 0).is_err());
        assert!(init_lattice(3, 1.0, -0.1, 1.0, 0).is_err());
    }

    #[test]
    fn run_zero_steps_keeps_initial_only() {
        let snap = init_lattice(3, 1.0, 0.0, 1.0, 5).unwrap();
        let traj = run(snap.clone(), &SwarmParams::default(), 0, 5).unwrap();
        assert_eq!(traj.snapshots.len(), 1);
        assert_eq!(traj.snapshots[0], snap);
    }

    #[test]
    fn run_composes_steps() {
        let params = SwarmParams::default();
        let snap = init_lattice(3, 1.0, 0.25, 1.0, 11).unwrap();
        let manual = step(&step(&snap, &params).unwrap(), &params).unwrap();
        let traj = run(snap, &params, 2, 11).unwrap();
        assert_eq!(traj.snapshots[2], manual);
    }

    #[test]
    fn injected_nan_is_caught_within_one_step() {
        let params = SwarmParams::default();
        let mut snap = init_lattice(3, 1.0, 0.0, 1.0, 2).unwrap();
        snap.agents[4].vel = Vec2::new(f64::NAN, 0.0);
        match step(&snap, &params) {
            Err(SwarmError::NonFinite { agent_id: 4, step: 1 }) => {}
            other => panic!("expected NonFinite for agent 4, got {other:?}"),
        }
    }

    #[test]
    fn divergence_keeps_partial_trajectory() {
        // Huge self-propulsion with a large timestep overflows quickly.
        let params = SwarmParams {
            alpha: 1e300,
            dt: 10.0,
            ..SwarmParams::default()
        };
        let snap = init_lattice(2, 1.0, 0.0, 1.0, 3).unwrap();
        match run(snap, &params, 50, 3) {
            Err(RunError::Diverged(d)) => {
                assert!(d.step >= 1);
                assert_eq!(d.partial.snapshots.len(), d.step);
                assert_eq!(d.partial.snapshots[0].step, 0);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }
}
