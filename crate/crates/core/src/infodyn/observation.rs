//! Extraction of (source, destination, conditional) observations from a
//! trajectory.
//!
//! For a destination agent p, a source agent p' and a step n, one
//! observation carries:
//!
//! - `x_next`: the destination's next velocity change, v_p(n+1) - v_p(n);
//! - `x_hist`: the k most recent velocity changes of the destination, most
//!   recent first, so `x_hist[0] = v_p(n) - v_p(n-1)`;
//! - `w`: the destination's speed |v_p(n)|, the extra conditioning variable;
//! - `y`: the source state relative to the destination at step n, stacked as
//!   (s_p' - s_p, v_p' - v_p). The sign convention is source minus
//!   destination; a consistent global sign flip leaves every distance-based
//!   count, and hence every transfer entropy value, unchanged.
//!
//! A pair is causally connected at step n when the source sits within
//! `causal_radius` of the destination at that step.

use crate::agent::{Role, SwarmSnapshot};
use crate::error::InfodynError;
use crate::grid::NeighborGrid;
use crate::vec2::Vec2;

/// Selects which directed pairs count as causally connected.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairSelector {
    pub causal_radius: f64,
}

/// One (destination, source, step) sample of the variables entering the
/// transfer entropy estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub dest_id: usize,
    pub src_id: usize,
    /// The step n at which the source state is taken; the predicted
    /// transition is n -> n+1.
    pub step: usize,
    pub x_next: Vec2,
    pub x_hist: Vec<Vec2>,
    pub w: f64,
    pub y: [f64; 4],
    pub dest_role: Role,
}

/// Extracts every observation from the snapshot sequence. Equivalent to
/// [`extract_observations_windowed`] with an unbounded window.
pub fn extract_observations(
    snapshots: &[SwarmSnapshot],
    k: usize,
    selector: &PairSelector,
) -> Result<Vec<Observation>, InfodynError> {
    extract_observations_windowed(snapshots, k, selector, None)
}

/// Extracts observations whose transition step n+1 falls inside the given
/// inclusive window. Observations are emitted in (step, destination, source)
/// order, so the output is deterministic.
pub fn extract_observations_windowed(
    snapshots: &[SwarmSnapshot],
    k: usize,
    selector: &PairSelector,
    window: Option<(usize, usize)>,
) -> Result<Vec<Observation>, InfodynError> {
    if k == 0 {
        return Err(InfodynError::Config("history length k must be >= 1".into()));
    }
    if !(selector.causal_radius > 0.0) {
        return Err(InfodynError::Config(format!(
            "causal_radius must be > 0, got {}",
            selector.causal_radius
        )));
    }
    let s = snapshots.len();
    if s < k + 2 {
        return Err(InfodynError::InsufficientHistory {
            needed: k + 2,
            got: s,
            k,
        });
    }
    for pair in snapshots.windows(2) {
        if pair[1].step != pair[0].step + 1 {
            return Err(InfodynError::NonConsecutiveSteps { step: pair[0].step });
        }
    }

    let n_agents = snapshots[0].len();
    let radius_sq = selector.causal_radius * selector.causal_radius;
    let mut out = Vec::new();
    let mut candidates = Vec::new();

    // idx is the position of step n in the slice; valid n leave k history
    // transitions behind and one transition ahead.
    for idx in k..=s - 2 {
        let step_n = snapshots[idx].step;
        if let Some((lo, hi)) = window {
            if step_n + 1 < lo || step_n + 1 > hi {
                continue;
            }
        }
        let snap = &snapshots[idx];
        let next = &snapshots[idx + 1];
        let positions: Vec<Vec2> = snap.agents.iter().map(|a| a.pos).collect();
        let grid = NeighborGrid::build(&positions, selector.causal_radius);

        for dest in 0..n_agents {
            let p = &snap.agents[dest];
            let x_next = next.agents[dest].vel - p.vel;
            let mut x_hist = Vec::with_capacity(k);
            for h in 0..k {
                x_hist.push(
                    snapshots[idx - h].agents[dest].vel - snapshots[idx - h - 1].agents[dest].vel,
                );
            }
            let w = p.vel.norm();

            grid.candidates_sorted(p.pos, &mut candidates);
            for &src in candidates.iter() {
                if src == dest {
                    continue;
                }
                let q = &snap.agents[src];
                let rel_pos = q.pos - p.pos;
                if rel_pos.norm_sq() > radius_sq {
                    continue;
                }
                let rel_vel = q.vel - p.vel;
                out.push(Observation {
                    dest_id: dest,
                    src_id: src,
                    step: step_n,
                    x_next,
                    x_hist: x_hist.clone(),
                    w,
                    y: [rel_pos.x, rel_pos.y, rel_vel.x, rel_vel.y],
                    dest_role: p.role,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::AgentState;
    use crate::{init_lattice, run, SwarmParams};

    fn two_agent_snapshots(n_snapshots: usize) -> Vec<SwarmSnapshot> {
        (0..n_snapshots)
            .map(|step| {
                SwarmSnapshot::new(
                    step,
                    vec![
                        AgentState {
                            id: 0,
                            pos: Vec2::new(0.0, 0.0),
                            vel: Vec2::new(1.0, 0.1 * step as f64),
                            role: Role::Follower,
                        },
                        AgentState {
                            id: 1,
                            pos: Vec2::new(1.0, 0.0),
                            vel: Vec2::new(0.9, -0.1 * step as f64),
                            role: Role::Leader,
                        },
                    ],
                )
            })
            .collect()
    }

    #[test]
    fn three_snapshots_give_single_valid_step() {
        let snaps = two_agent_snapshots(3);
        let obs = extract_observations(&snaps, 1, &PairSelector { causal_radius: 5.0 }).unwrap();
        assert!(!obs.is_empty());
        assert!(obs.iter().all(|o| o.step == 1));
        // x_hist holds the 0->1 change, x_next the 1->2 change
        let first = &obs[0];
        assert_eq!(first.x_hist.len(), 1);
        assert_eq!(first.x_hist[0], Vec2::new(0.0, 0.1));
        assert_eq!(first.x_next, Vec2::new(0.0, 0.1));
    }

    #[test]
    fn tight_radius_yields_no_pairs() {
        let snaps = two_agent_snapshots(5);
        let obs = extract_observations(&snaps, 1, &PairSelector { causal_radius: 0.5 }).unwrap();
        assert!(obs.is_empty());
    }

    #[test]
    fn pair_and_step_enumeration_matches_hand_count() {
        // 2 agents always in range, k = 1, 11 snapshots (steps 0..=10):
        // valid n are 1..=9, two directed pairs each.
        let snaps = two_agent_snapshots(11);
        let obs = extract_observations(&snaps, 1, &PairSelector { causal_radius: 2.0 }).unwrap();
        assert_eq!(obs.len(), 18);
        let n_dest0 = obs.iter().filter(|o| o.dest_id == 0).count();
        assert_eq!(n_dest0, 9);
    }

    #[test]
    fn short_trajectory_is_rejected() {
        let snaps = two_agent_snapshots(2);
        match extract_observations(&snaps, 1, &PairSelector { causal_radius: 2.0 }) {
            Err(InfodynError::InsufficientHistory { needed: 3, got: 2, k: 1 }) => {}
            other => panic!("expected InsufficientHistory, got {other:?}"),
        }
    }

    #[test]
    fn larger_k_shrinks_valid_window_by_one_step_each() {
        let snaps = two_agent_snapshots(12);
        let selector = PairSelector { causal_radius: 2.0 };
        let mut last = usize::MAX;
        for k in 1..=4 {
            let obs = extract_observations(&snaps, k, &selector).unwrap();
            let steps: std::collections::BTreeSet<usize> = obs.iter().map(|o| o.step).collect();
            assert_eq!(steps.len(), 12 - k - 1, "k={k}");
            assert!(steps.len() < last);
            last = steps.len();
            for o in &obs {
                assert_eq!(o.x_hist.len(), k);
            }
        }
    }

    #[test]
    fn window_restricts_transition_steps() {
        let snaps = two_agent_snapshots(11);
        let selector = PairSelector { causal_radius: 2.0 };
        let obs =
            extract_observations_windowed(&snaps, 1, &selector, Some((4, 6))).unwrap();
        let steps: std::collections::BTreeSet<usize> = obs.iter().map(|o| o.step + 1).collect();
        assert_eq!(steps, [4, 5, 6].into_iter().collect());
    }

    #[test]
    fn history_is_most_recent_first() {
        let snaps = two_agent_snapshots(6);
        let obs = extract_observations(&snaps, 3, &PairSelector { causal_radius: 2.0 }).unwrap();
        let o = obs.iter().find(|o| o.dest_id == 0 && o.step == 4).unwrap();
        // every transition of agent 0 changes vel by (0, +0.1)
        for h in &o.x_hist {
            assert_eq!(*h, Vec2::new(0.0, 0.1));
        }
        assert_eq!(o.w, snaps[4].agents[0].vel.norm());
    }

    #[test]
    fn roles_and_relative_state_are_copied_from_destination_and_source() {
        let snaps = two_agent_snapshots(3);
        let obs = extract_observations(&snaps, 1, &PairSelector { causal_radius: 2.0 }).unwrap();
        let to_leader = obs.iter().find(|o| o.dest_id == 1).unwrap();
        assert_eq!(to_leader.dest_role, Role::Leader);
        // y = (s_src - s_dst, v_src - v_dst) at step n = 1
        assert_eq!(to_leader.y[0], -1.0);
        assert_eq!(to_leader.y[1], 0.0);
        assert_eq!(to_leader.y[2], 1.0 - 0.9);
        assert_eq!(to_leader.y[3], 0.1 - (-0.1));
    }

    #[test]
    fn extraction_on_simulated_trajectory_is_consistent() {
        let snap = init_lattice(4, 1.0, 0.25, 1.0, 9).unwrap();
        let traj = run(snap, &SwarmParams::default(), 6, 9).unwrap();
        let obs =
            extract_observations(&traj.snapshots, 2, &PairSelector { causal_radius: 3.0 })
                .unwrap();
        assert!(!obs.is_empty());
        for o in &obs {
            assert!(o.step >= 2 && o.step <= 5);
            assert!(o.w > 0.0);
            assert_eq!(o.x_hist.len(), 2);
            let rel = Vec2::new(o.y[0], o.y[1]);
            assert!(rel.norm() <= 3.0 + 1e-12);
            assert_ne!(o.dest_id, o.src_id);
        }
    }
}
