//! Density-responsive leader behavior.
//!
//! A leader blends the ordinary follower response with the goal direction.
//! The goal weight is `exp(-D / leader_decay)` where `D` is the smoothed
//! agent density at the leader's own position: leaders push toward the goal
//! where the swarm is sparse and behave like followers where it is dense.
//! Roles never enter the interaction kernels, so followers' desired
//! velocities are unchanged by the presence of leaders.

use crate::agent::{Role, SwarmSnapshot};
use crate::error::SwarmError;
use crate::kernels;
use crate::params::SwarmParams;
use crate::vec2::Vec2;

/// Convex blend weights between the follower response and the goal direction.
/// `weight_follow` is defined as `1 - weight_goal`, so the pair always sums
/// to one exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeaderBlend {
    pub weight_goal: f64,
    pub weight_follow: f64,
}

/// Blend weights for a given local smoothed density. Monotone decreasing in
/// the density: `weight_goal -> 1` in the isolated limit and `-> 0` in the
/// dense limit.
pub fn blend_from_density(density: f64, params: &SwarmParams) -> LeaderBlend {
    let weight_goal = (-density / params.leader_decay).exp();
    LeaderBlend {
        weight_goal,
        weight_follow: 1.0 - weight_goal,
    }
}

/// Applies the blend: `weight_follow * v_follow + weight_goal * goal`.
pub fn blend_velocity(blend: &LeaderBlend, v_follow: Vec2, goal: Vec2) -> Vec2 {
    v_follow * blend.weight_follow + goal * blend.weight_goal
}

fn check_leader(i: usize, snapshot: &SwarmSnapshot) -> Result<(), SwarmError> {
    let agent = snapshot
        .agents
        .get(i)
        .ok_or(SwarmError::InvalidIndex {
            index: i,
            len: snapshot.len(),
        })?;
    if agent.role != Role::Leader {
        return Err(SwarmError::WrongRole {
            id: agent.id,
            expected: Role::Leader,
            actual: agent.role,
        });
    }
    Ok(())
}

/// Blend weights for leader `i`, from the smoothed density at its position.
pub fn leader_blend(
    i: usize,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
) -> Result<LeaderBlend, SwarmError> {
    check_leader(i, snapshot)?;
    let density = kernels::smoothed_density(snapshot.agents[i].pos, snapshot, params);
    Ok(blend_from_density(density, params))
}

/// Desired velocity of leader `i`: the follower response blended with the
/// goal direction according to the local density.
pub fn leader_desired_velocity(
    i: usize,
    snapshot: &SwarmSnapshot,
    params: &SwarmParams,
) -> Result<Vec2, SwarmError> {
    let blend = leader_blend(i, snapshot, params)?;
    let v_follow = kernels::desired_velocity(i, snapshot, params)?;
    Ok(blend_velocity(&blend, v_follow, params.goal_dir))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::AgentState;
    use approx::assert_abs_diff_eq;

    // exp(-0.2302585 / 0.1), 30-digit evaluation.
    const BLEND_HAND_VALUE: f64 = 0.100000009299405001;

    fn leader(id: usize, pos: Vec2) -> AgentState {
        AgentState {
            id,
            pos,
            vel: Vec2::new(1.0, 0.0),
            role: Role::Leader,
        }
    }

    fn follower(id: usize, pos: Vec2) -> AgentState {
        AgentState {
            id,
            pos,
            vel: Vec2::new(1.0, 0.0),
            role: Role::Follower,
        }
    }

    #[test]
    fn zero_density_gives_pure_goal_weight() {
        let b = blend_from_density(0.0, &SwarmParams::default());
        assert_eq!(b.weight_goal, 1.0);
        assert_eq!(b.weight_follow, 0.0);
    }

    #[test]
    fn large_density_gives_pure_follow_weight() {
        let b = blend_from_density(1e6, &SwarmParams::default());
        assert_eq!(b.weight_goal, 0.0);
        assert_eq!(b.weight_follow, 1.0);
    }

    #[test]
    fn blend_matches_hand_evaluation() {
        let params = SwarmParams {
            leader_decay: 0.1,
            ..SwarmParams::default()
        };
        let b = blend_from_density(0.2302585, &params);
        assert_abs_diff_eq!(b.weight_goal, BLEND_HAND_VALUE, epsilon = 1e-15);
        assert_abs_diff_eq!(b.weight_follow, 1.0 - BLEND_HAND_VALUE, epsilon = 1e-15);
    }

    #[test]
    fn weights_always_sum_to_one() {
        let params = SwarmParams::default();
        for d in [0.0, 0.01, 0.3, 1.7, 42.0] {
            let b = blend_from_density(d, &params);
            assert_eq!(b.weight_goal + b.weight_follow, 1.0);
            assert!(b.weight_goal > 0.0 && b.weight_goal <= 1.0);
        }
    }

    #[test]
    fn calling_on_follower_is_role_error() {
        let snap = SwarmSnapshot::new(0, vec![follower(0, Vec2::ZERO)]);
        match leader_blend(0, &snap, &SwarmParams::default()) {
            Err(SwarmError::WrongRole { id: 0, .. }) => {}
            other => panic!("expected role error, got {other:?}"),
        }
    }

    #[test]
    fn blend_velocity_limits() {
        let goal = Vec2::new(0.0, 1.0);
        let follow = Vec2::new(1.0, 0.0);
        let pure_goal = LeaderBlend {
            weight_goal: 1.0,
            weight_follow: 0.0,
        };
        assert_eq!(blend_velocity(&pure_goal, follow, goal), goal);
        let pure_follow = LeaderBlend {
            weight_goal: 0.0,
            weight_follow: 1.0,
        };
        assert_eq!(blend_velocity(&pure_follow, follow, goal), follow);
        let half = LeaderBlend {
            weight_goal: 0.5,
            weight_follow: 0.5,
        };
        assert_eq!(blend_velocity(&half, follow, goal), Vec2::new(0.5, 0.5));
    }

    #[test]
    fn goal_weight_decreases_as_neighbors_crowd_in() {
        let params = SwarmParams::default();
        let mut agents = vec![leader(0, Vec2::ZERO)];
        let mut last = leader_blend(0, &SwarmSnapshot::new(0, agents.clone()), &params)
            .unwrap()
            .weight_goal;
        for n in 1..6 {
            agents.push(follower(n, Vec2::new(0.3 * n as f64, 0.1)));
            let snap = SwarmSnapshot::new(0, agents.clone());
            let w = leader_blend(0, &snap, &params).unwrap().weight_goal;
            assert!(
                w < last,
                "goal weight must strictly decrease with density: {w} !< {last}"
            );
            last = w;
        }
    }

    #[test]
    fn leader_desired_lies_between_follow_and_goal() {
        let params = SwarmParams::default();
        let snap = SwarmSnapshot::new(
            0,
            vec![
                leader(0, Vec2::ZERO),
                follower(1, Vec2::new(1.0, 0.5)),
                follower(2, Vec2::new(-0.4, 1.2)),
            ],
        );
        let v_ld = leader_desired_velocity(0, &snap, &params).unwrap();
        let v_lf = kernels::desired_velocity(0, &snap, &params).unwrap();
        let seg = params.goal_dir - v_lf;
        let offset = v_ld - v_lf;
        // offset must be a t*seg with t in [0,1]
        let cross = seg.x * offset.y - seg.y * offset.x;
        assert!(cross.abs() < 1e-12, "point off the segment, cross={cross}");
        let t = offset.dot(seg) / seg.norm_sq();
        assert!((0.0..=1.0).contains(&t), "blend parameter out of range: {t}");
    }
}
