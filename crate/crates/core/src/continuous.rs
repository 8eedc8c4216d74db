//! Continuous-time splitting/freezing process with branch lengths.
//!
//! Each active leaf `j` with interval length `L_j` splits at rate
//! `λ(1-δ)L_j` and freezes at rate `λδL_j`. Equivalently (and this is how
//! the simulation proceeds): the next event arrives after an
//! `Exponential(λ·L_act)` waiting time, hits active leaf `j` with
//! probability `L_j/L_act`, and is a freeze with probability δ. Frozen
//! leaves carry zero event rate, so every simulated event is effective, and
//! the embedded discrete tree has the law of the GOD process restricted to
//! effective events.

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde_json::{json, Value};

use crate::arena::ArenaTree;
use crate::generate::ModelParams;
use crate::numerics::sample_beta;
use crate::trees::{RankedPlanarTree, RpNode};
use crate::{Error, Result};

/// When to stop the event clock.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// After this many effective events.
    AfterEvents(usize),
    /// Once this many leaves are active (the discrete process' target);
    /// extinction can still end the run first.
    ActiveLeaves(usize),
}

/// A ranked planar tree with frozen marks plus the event times realizing it.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedTree {
    /// The embedded discrete tree, interval labels and frozen marks included.
    pub base: RankedPlanarTree,
    /// `event_times[rank - 1]` is the time of split `rank`; strictly
    /// increasing. Time 0 is the birth of the first species.
    pub event_times: Vec<f64>,
    /// `(in-order leaf index, freeze time)` for each frozen leaf.
    pub freeze_times: Vec<(usize, f64)>,
    /// Time of the last event.
    pub total_time: f64,
}

/// Run the continuous-time process. Draw order per event: waiting time,
/// leaf selector, event-type selector, then (splits only) the Beta fraction.
pub fn simulate_continuous<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
    stop: StopRule,
) -> Result<TimedTree> {
    if let StopRule::ActiveLeaves(0) = stop {
        return Err(Error::invalid("active-leaves stop target must be >= 1"));
    }
    let mut arena = ArenaTree::new();
    let mut t = 0.0f64;
    let mut event_times: Vec<f64> = Vec::new();
    let mut freezes_by_id: Vec<(usize, f64)> = Vec::new();
    let mut effective = 0usize;
    let mut next_rank = 1u32;
    loop {
        let done = match stop {
            StopRule::AfterEvents(n) => effective >= n,
            StopRule::ActiveLeaves(n) => arena.active_count() >= n,
        };
        if done || arena.active_count() == 0 {
            break;
        }
        let l_act = arena.active_total_width();
        if l_act <= 0.0 {
            return Err(Error::Precision(
                "total active width underflowed to zero".to_string(),
            ));
        }
        let wait = Exp::new(params.lambda * l_act)
            .map_err(|e| Error::domain(e.to_string()))?
            .sample(rng);
        t += wait;
        let target = rng.gen::<f64>() * l_act;
        let pos = arena
            .active_leaf_by_mass(target)
            .expect("an active leaf exists");
        let v = rng.gen::<f64>();
        if v < params.delta {
            let id = arena.leaf_id(pos);
            arena.freeze(pos);
            freezes_by_id.push((id, t));
        } else {
            let b = sample_beta(params.alpha + 1.0, params.beta + 1.0, rng)?;
            arena.split(pos, b, next_rank)?;
            event_times.push(t);
            next_rank += 1;
        }
        effective += 1;
    }
    // map arena ids to in-order leaf indices of the final tree
    let ids = arena.leaf_ids();
    let freeze_times = freezes_by_id
        .into_iter()
        .map(|(id, time)| {
            let idx = ids
                .iter()
                .position(|&i| i == id)
                .expect("frozen leaf survives to the end");
            (idx, time)
        })
        .collect();
    Ok(TimedTree {
        base: arena.to_tree(),
        event_times,
        freeze_times,
        total_time: t,
    })
}

/// Drop the clock: the ranked planar tree with frozen marks and intervals.
pub fn embedded_discrete(t: &TimedTree) -> RankedPlanarTree {
    t.base.clone()
}

impl TimedTree {
    fn split_time(&self, rank: u32) -> f64 {
        self.event_times[rank as usize - 1]
    }

    fn freeze_time_of(&self, leaf_idx: usize) -> Option<f64> {
        self.freeze_times
            .iter()
            .find(|(i, _)| *i == leaf_idx)
            .map(|(_, t)| *t)
    }

    /// Newick with branch lengths, e.g. `(,)1:0.37;`. Edge length is the
    /// child's event time minus the parent's (the root edge starts at time
    /// 0); an unfrozen leaf extends to `total_time`, a frozen one to its
    /// freeze time. Zero-length edges omit the `:length` suffix.
    pub fn to_newick(&self) -> String {
        enum Tok<'a> {
            Node(&'a RpNode, f64),
            Lit(&'static str),
            Owned(String),
        }
        let mut out = String::new();
        let mut leaf_idx = 0usize;
        let mut stack: Vec<Tok> = vec![Tok::Lit(";"), Tok::Node(self.base.root(), 0.0)];
        while let Some(tok) = stack.pop() {
            match tok {
                Tok::Lit(s) => out.push_str(s),
                Tok::Owned(s) => out.push_str(&s),
                Tok::Node(node, parent_time) => match node {
                    RpNode::Leaf { frozen, .. } => {
                        let end = if *frozen {
                            self.freeze_time_of(leaf_idx).unwrap_or(self.total_time)
                        } else {
                            self.total_time
                        };
                        leaf_idx += 1;
                        let mut s = String::new();
                        if *frozen {
                            s.push('*');
                        }
                        let len = end - parent_time;
                        if len > 0.0 {
                            s.push_str(&format!(":{len}"));
                        }
                        stack.push(Tok::Owned(s));
                    }
                    RpNode::Split { rank, left, right } => {
                        let time = self.split_time(*rank);
                        let len = time - parent_time;
                        let mut tail = rank.to_string();
                        if len > 0.0 {
                            tail.push_str(&format!(":{len}"));
                        }
                        stack.push(Tok::Owned(tail));
                        stack.push(Tok::Lit(")"));
                        stack.push(Tok::Node(right, time));
                        stack.push(Tok::Lit(","));
                        stack.push(Tok::Node(left, time));
                        stack.push(Tok::Lit("("));
                    }
                },
            }
        }
        out
    }

    /// JSON with explicit event times:
    /// `{"total_time": T, "tree": {"rank", "time", "left", "right"} | "leaf"
    /// | {"leaf": {"frozen": true, "freeze_time": t}}}`.
    pub fn to_json(&self) -> Value {
        fn rec(tt: &TimedTree, node: &RpNode, leaf_idx: &mut usize) -> Value {
            match node {
                RpNode::Leaf { frozen, .. } => {
                    let idx = *leaf_idx;
                    *leaf_idx += 1;
                    if *frozen {
                        json!({ "leaf": {
                            "frozen": true,
                            "freeze_time": tt.freeze_time_of(idx),
                        }})
                    } else {
                        Value::String("leaf".into())
                    }
                }
                RpNode::Split { rank, left, right } => json!({
                    "rank": rank,
                    "time": tt.split_time(*rank),
                    "left": rec(tt, left, leaf_idx),
                    "right": rec(tt, right, leaf_idx),
                }),
            }
        }
        let mut leaf_idx = 0usize;
        json!({
            "total_time": self.total_time,
            "tree": rec(self, self.base.root(), &mut leaf_idx),
        })
    }

    /// Check that event times strictly increase in rank and every edge has
    /// nonnegative length.
    pub fn times_consistent(&self) -> bool {
        if self.event_times.windows(2).any(|w| w[0] >= w[1]) {
            return false;
        }
        fn rec(tt: &TimedTree, node: &RpNode, parent_time: f64, leaf_idx: &mut usize) -> bool {
            match node {
                RpNode::Leaf { frozen, .. } => {
                    let idx = *leaf_idx;
                    *leaf_idx += 1;
                    let end = if *frozen {
                        tt.freeze_time_of(idx).unwrap_or(tt.total_time)
                    } else {
                        tt.total_time
                    };
                    end >= parent_time
                }
                RpNode::Split { rank, left, right } => {
                    let time = tt.split_time(*rank);
                    time >= parent_time
                        && rec(tt, left, time, leaf_idx)
                        && rec(tt, right, time, leaf_idx)
                }
            }
        }
        let mut leaf_idx = 0usize;
        rec(self, self.base.root(), 0.0, &mut leaf_idx)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::stream;

    #[test]
    fn trivial_stop_at_one_active_leaf() {
        let params = ModelParams::splitting(0.0, 0.0, 4).unwrap();
        let tt = simulate_continuous(&params, &mut stream(1, 0), StopRule::ActiveLeaves(1))
            .unwrap();
        assert_eq!(tt.base.leaf_count(), 1);
        assert_eq!(tt.total_time, 0.0);
        assert!(tt.event_times.is_empty());
    }

    #[test]
    fn single_split_is_a_timed_cherry() {
        let params = ModelParams::splitting(0.0, 0.0, 4).unwrap();
        let tt = simulate_continuous(&params, &mut stream(2, 0), StopRule::AfterEvents(1))
            .unwrap();
        assert_eq!(tt.base.leaf_count(), 2);
        assert_eq!(tt.event_times.len(), 1);
        assert!(tt.total_time > 0.0);
        assert_eq!(tt.total_time, tt.event_times[0]);
        let nw = tt.to_newick();
        assert!(nw.starts_with("(,)1:"), "newick = {nw}");
        assert!(nw.ends_with(';'));
    }

    #[test]
    fn embedded_tree_matches_base() {
        let params = ModelParams::new(0.5, 0.0, 0.2, 2.0, 5).unwrap();
        let tt = simulate_continuous(&params, &mut stream(3, 7), StopRule::ActiveLeaves(5))
            .unwrap();
        assert_eq!(embedded_discrete(&tt), tt.base);
    }

    #[test]
    fn times_are_monotone() {
        let params = ModelParams::new(0.0, 1.0, 0.25, 1.0, 6).unwrap();
        for rep in 0..200 {
            let tt = simulate_continuous(
                &params,
                &mut stream(4, rep),
                StopRule::ActiveLeaves(6),
            )
            .unwrap();
            assert!(tt.times_consistent(), "replicate {rep}");
        }
    }

    #[test]
    fn freeze_times_recorded_for_frozen_leaves() {
        let params = ModelParams::new(0.0, 0.0, 0.5, 1.0, 4).unwrap();
        for rep in 0..100 {
            let tt = simulate_continuous(
                &params,
                &mut stream(5, rep),
                StopRule::ActiveLeaves(4),
            )
            .unwrap();
            let frozen = tt.base.frozen_leaf_count();
            assert_eq!(frozen, tt.freeze_times.len(), "replicate {rep}");
        }
    }

    #[test]
    fn reproducible_given_stream() {
        let params = ModelParams::new(1.0, 0.0, 0.3, 0.5, 5).unwrap();
        let a = simulate_continuous(&params, &mut stream(6, 2), StopRule::ActiveLeaves(5))
            .unwrap();
        let b = simulate_continuous(&params, &mut stream(6, 2), StopRule::ActiveLeaves(5))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn after_events_counts_effective_events() {
        let params = ModelParams::new(0.0, 0.0, 0.4, 1.0, 100).unwrap();
        let tt = simulate_continuous(&params, &mut stream(7, 0), StopRule::AfterEvents(9))
            .unwrap();
        let frozen = tt.freeze_times.len();
        let splits = tt.event_times.len();
        // extinction can stop the run early, but never past 9 events
        assert!(frozen + splits <= 9);
        if tt.base.leaf_count() > tt.base.frozen_leaf_count() {
            assert_eq!(frozen + splits, 9);
        }
    }

    #[test]
    fn json_contains_times() {
        let params = ModelParams::splitting(0.0, 0.0, 3).unwrap();
        let tt = simulate_continuous(&params, &mut stream(8, 0), StopRule::ActiveLeaves(3))
            .unwrap();
        let v = tt.to_json();
        assert!(v["total_time"].as_f64().unwrap() > 0.0);
        assert!(v["tree"]["time"].as_f64().unwrap() > 0.0);
        assert_eq!(v["tree"]["rank"], 1);
    }
}
