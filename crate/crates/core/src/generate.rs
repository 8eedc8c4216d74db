//! Discrete-time Generating, Organizing, and Deleting processes.
//!
//! A tree grows from a single leaf labelled `[0,1]`. At each step a quadruple
//! `(u, b, v, d)` decides what happens: if `v < δ` the leaf whose interval
//! contains `d` freezes; otherwise the leaf whose interval contains `u`
//! splits at relative position `b ~ Beta(α+1, β+1)`, the left child
//! inheriting fraction `b` of the interval. Events that land on a frozen
//! leaf are cancelled. The run stops once `n` leaves are active (or none).

use rand::Rng;
use serde::Serialize;

use crate::arena::ArenaTree;
use crate::numerics::sample_beta;
use crate::trees::RankedPlanarTree;
use crate::{Error, Result};

/// Safety cap on total (including cancelled) events in [`run_god`]; large δ
/// can make cancelled events dominate, and a hang would otherwise be
/// undiagnosable.
pub const GOD_ITERATION_CAP: u64 = 10_000_000;

/// The parameter tuple `(α, β, δ, λ, n)` governing all processes.
///
/// `λ` is the continuous-time event rate and is ignored by the discrete
/// process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub lambda: f64,
    pub n: usize,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, delta: f64, lambda: f64, n: usize) -> Result<Self> {
        if !alpha.is_finite() || alpha <= -1.0 {
            return Err(Error::domain(format!("alpha must be finite and > -1, got {alpha}")));
        }
        if !beta.is_finite() || beta <= -1.0 {
            return Err(Error::domain(format!("beta must be finite and > -1, got {beta}")));
        }
        if !delta.is_finite() || !(0.0..1.0).contains(&delta) {
            return Err(Error::domain(format!("delta must lie in [0,1), got {delta}")));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::domain(format!("lambda must be finite and > 0, got {lambda}")));
        }
        if n < 1 {
            return Err(Error::domain("n must be at least 1".to_string()));
        }
        Ok(ModelParams {
            alpha,
            beta,
            delta,
            lambda,
            n,
        })
    }

    /// Pure splitting process (δ = 0, unit event rate).
    pub fn splitting(alpha: f64, beta: f64, n: usize) -> Result<Self> {
        Self::new(alpha, beta, 0.0, 1.0, n)
    }
}

/// One step of the augmented generating sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratingQuadruple {
    /// Uniform draw selecting the leaf to split.
    pub u: f64,
    /// Beta(α+1, β+1) split fraction for the left child.
    pub b: f64,
    /// Uniform draw deciding the event type (`v < δ` freezes).
    pub v: f64,
    /// Uniform draw selecting the leaf to freeze.
    pub d: f64,
}

pub(crate) fn draw_quadruple<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
) -> Result<GeneratingQuadruple> {
    let u = rng.gen::<f64>();
    let b = sample_beta(params.alpha + 1.0, params.beta + 1.0, rng)?;
    let v = rng.gen::<f64>();
    let d = rng.gen::<f64>();
    Ok(GeneratingQuadruple { u, b, v, d })
}

/// Sample `length` i.i.d. quadruples; reproducible given the rng stream.
pub fn sample_generating_sequence<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
    length: usize,
) -> Result<Vec<GeneratingQuadruple>> {
    (0..length).map(|_| draw_quadruple(params, rng)).collect()
}

/// What an event did.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Split,
    Freeze,
    Cancelled,
}

/// One entry of the event log.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EventRecord {
    pub step: usize,
    pub kind: EventKind,
    /// Interval of the affected (or targeted, when cancelled) leaf.
    #[serde(rename = "leaf_interval")]
    pub interval: (f64, f64),
    /// Split fraction; present on splits only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
}

/// Tree under construction plus bookkeeping for the GOD process.
#[derive(Clone, Debug)]
pub struct GodState {
    arena: ArenaTree,
    next_rank: u32,
    step: usize,
    events: Vec<EventRecord>,
}

impl GodState {
    /// A single active leaf labelled `[0,1]`.
    pub fn new() -> Self {
        GodState {
            arena: ArenaTree::new(),
            next_rank: 1,
            step: 0,
            events: Vec::new(),
        }
    }

    pub fn active_count(&self) -> usize {
        self.arena.active_count()
    }

    pub fn leaf_count(&self) -> usize {
        self.arena.leaf_count()
    }

    pub fn next_rank(&self) -> u32 {
        self.next_rank
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn event_log(&self) -> &[EventRecord] {
        &self.events
    }

    /// The event log, one JSON object per line.
    pub fn event_log_json_lines(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("event serializes"))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Current leaf intervals in tree order.
    pub fn leaf_intervals(&self) -> Vec<(f64, f64)> {
        self.arena.leaf_intervals()
    }

    /// Snapshot of the tree built so far (interval labels and frozen marks
    /// included).
    pub fn tree(&self) -> RankedPlanarTree {
        self.arena.to_tree()
    }
}

impl Default for GodState {
    fn default() -> Self {
        Self::new()
    }
}

/// Apply one quadruple to the state. Pure: the returned state is the only
/// outcome, and equal inputs give bit-equal states.
pub fn god_step(mut state: GodState, q: &GeneratingQuadruple, delta: f64) -> Result<GodState> {
    state.step += 1;
    let step = state.step;
    if q.v < delta {
        let pos = state.arena.leaf_pos_containing(q.d)?;
        let interval = state.arena.leaf_interval(pos);
        let kind = if state.arena.freeze(pos) {
            EventKind::Freeze
        } else {
            EventKind::Cancelled
        };
        state.events.push(EventRecord {
            step,
            kind,
            interval,
            b: None,
        });
    } else {
        let pos = state.arena.leaf_pos_containing(q.u)?;
        let interval = state.arena.leaf_interval(pos);
        if state.arena.leaf_frozen(pos) {
            state.events.push(EventRecord {
                step,
                kind: EventKind::Cancelled,
                interval,
                b: None,
            });
        } else {
            let rank = state.next_rank;
            state.arena.split(pos, q.b, rank)?;
            state.next_rank += 1;
            state.events.push(EventRecord {
                step,
                kind: EventKind::Split,
                interval,
                b: Some(q.b),
            });
        }
    }
    Ok(state)
}

/// The organizing map: deterministically fold a δ-free generating sequence
/// of `(u, b)` pairs into the ranked planar tree with `n` leaves.
///
/// The first pair's `u` is immaterial (there is a single leaf to split); the
/// internal node created at step `i` carries rank `i`.
pub fn organize(seq: &[(f64, f64)], n: usize) -> Result<RankedPlanarTree> {
    if n < 1 {
        return Err(Error::domain("n must be at least 1".to_string()));
    }
    if seq.len() + 1 < n {
        return Err(Error::invalid(format!(
            "generating sequence has {} entries, need at least {}",
            seq.len(),
            n - 1
        )));
    }
    let mut state = GodState::new();
    for &(u, b) in seq.iter().take(n - 1) {
        let q = GeneratingQuadruple { u, b, v: 1.0, d: 0.0 };
        state = god_step(state, &q, 0.0)?;
    }
    Ok(state.tree())
}

/// Terminal condition of [`run_god`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// `n` active leaves reached.
    ReachedN,
    /// Every leaf froze first.
    Extinct,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::ReachedN => "reached_n",
            Outcome::Extinct => "extinct",
        }
    }
}

/// Run the GOD process until the tree has `params.n` active leaves or none.
pub fn run_god<R: Rng + ?Sized>(
    params: &ModelParams,
    rng: &mut R,
) -> Result<(GodState, Outcome)> {
    let mut state = GodState::new();
    let mut iterations = 0u64;
    loop {
        if state.active_count() >= params.n {
            return Ok((state, Outcome::ReachedN));
        }
        if state.active_count() == 0 {
            return Ok((state, Outcome::Extinct));
        }
        iterations += 1;
        if iterations > GOD_ITERATION_CAP {
            return Err(Error::IterationCap(GOD_ITERATION_CAP));
        }
        let q = draw_quadruple(params, rng)?;
        state = god_step(state, &q, params.delta)?;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::stream;
    use crate::trees::RankedPlanarTree;

    #[test]
    fn params_validation() {
        assert!(ModelParams::new(0.0, 0.0, 0.0, 1.0, 4).is_ok());
        assert!(ModelParams::new(-1.0, 0.0, 0.0, 1.0, 4).is_err());
        assert!(ModelParams::new(0.0, f64::INFINITY, 0.0, 1.0, 4).is_err());
        assert!(ModelParams::new(0.0, 0.0, 1.0, 1.0, 4).is_err());
        assert!(ModelParams::new(0.0, 0.0, 0.0, 0.0, 4).is_err());
        assert!(ModelParams::new(0.0, 0.0, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn sequence_length_and_reproducibility() {
        let params = ModelParams::splitting(0.0, 0.0, 4).unwrap();
        let mut rng = stream(3, 0);
        assert!(sample_generating_sequence(&params, &mut rng, 0)
            .unwrap()
            .is_empty());
        let a = sample_generating_sequence(&params, &mut stream(3, 1), 5).unwrap();
        let b = sample_generating_sequence(&params, &mut stream(3, 1), 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn generating_sequence_beta_means() {
        // Beta(1,1) mean 1/2 and Beta(2,1) mean 2/3
        for (alpha, beta, want) in [(0.0, 0.0, 0.5), (1.0, 0.0, 2.0 / 3.0)] {
            let params = ModelParams::splitting(alpha, beta, 4).unwrap();
            let mut rng = stream(4, 0);
            let m = 100_000;
            let seq = sample_generating_sequence(&params, &mut rng, m).unwrap();
            let mean = seq.iter().map(|q| q.b).sum::<f64>() / m as f64;
            assert!((mean - want).abs() < 0.005, "mean = {mean}, want {want}");
        }
    }

    #[test]
    fn organize_single_leaf() {
        let t = organize(&[], 1).unwrap();
        assert_eq!(t.leaf_count(), 1);
        let ivs = t.leaf_intervals();
        assert_eq!(ivs.len(), 1);
        let iv = ivs[0].unwrap();
        assert_eq!((iv.lo, iv.hi), (0.0, 1.0));
    }

    #[test]
    fn organize_hand_trace() {
        // step 1 splits [0,1] at 0.4; step 2 splits [0,0.4] at 0.5;
        // step 3 splits [0.4,1] at 0.25
        let seq = [(0.0, 0.4), (0.2, 0.5), (0.9, 0.25)];
        let t = organize(&seq, 4).unwrap();
        let ivs: Vec<(f64, f64)> = t
            .leaf_intervals()
            .into_iter()
            .map(|iv| {
                let iv = iv.unwrap();
                (iv.lo, iv.hi)
            })
            .collect();
        assert_eq!(
            ivs,
            vec![(0.0, 0.2), (0.2, 0.4), (0.4, 0.55), (0.55, 1.0)]
        );
        // ranks: root 1; its left child 2, right child 3
        assert_eq!(t.to_perm().as_slice(), &[2, 1, 3]);
    }

    #[test]
    fn organize_is_deterministic() {
        let params = ModelParams::splitting(0.5, -0.3, 6).unwrap();
        let seq: Vec<(f64, f64)> =
            sample_generating_sequence(&params, &mut stream(9, 0), 5)
                .unwrap()
                .iter()
                .map(|q| (q.u, q.b))
                .collect();
        let a = organize(&seq, 6).unwrap();
        let b = organize(&seq, 6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn organize_rejects_short_sequence() {
        assert!(organize(&[(0.5, 0.5)], 4).is_err());
    }

    #[test]
    fn god_step_with_zero_delta_is_an_organize_step() {
        let q = GeneratingQuadruple {
            u: 0.3,
            b: 0.4,
            v: 0.0,
            d: 0.7,
        };
        // v = 0 >= delta = 0, so this splits even though v is extreme
        let state = god_step(GodState::new(), &q, 0.0).unwrap();
        assert_eq!(state.active_count(), 2);
        assert_eq!(state.event_log()[0].kind, EventKind::Split);
    }

    #[test]
    fn freeze_single_leaf() {
        let q = GeneratingQuadruple {
            u: 0.1,
            b: 0.5,
            v: 0.1,
            d: 0.6,
        };
        let state = god_step(GodState::new(), &q, 0.3).unwrap();
        assert_eq!(state.active_count(), 0);
        assert_eq!(state.event_log()[0].kind, EventKind::Freeze);
    }

    #[test]
    fn events_on_frozen_leaves_are_cancelled() {
        // split [0,1] at 0.5, freeze the left leaf, then aim a split and a
        // second freeze at it
        let mut state = GodState::new();
        state = god_step(
            state,
            &GeneratingQuadruple {
                u: 0.0,
                b: 0.5,
                v: 1.0,
                d: 0.0,
            },
            0.3,
        )
        .unwrap();
        state = god_step(
            state,
            &GeneratingQuadruple {
                u: 0.9,
                b: 0.5,
                v: 0.0,
                d: 0.2,
            },
            0.3,
        )
        .unwrap();
        assert_eq!(state.event_log().last().unwrap().kind, EventKind::Freeze);
        assert_eq!(state.active_count(), 1);
        let before = state.leaf_intervals();
        // split aimed at the frozen leaf
        state = god_step(
            state,
            &GeneratingQuadruple {
                u: 0.2,
                b: 0.5,
                v: 1.0,
                d: 0.0,
            },
            0.3,
        )
        .unwrap();
        assert_eq!(state.event_log().last().unwrap().kind, EventKind::Cancelled);
        assert_eq!(state.leaf_intervals(), before);
        // freeze aimed at the frozen leaf
        state = god_step(
            state,
            &GeneratingQuadruple {
                u: 0.9,
                b: 0.5,
                v: 0.0,
                d: 0.2,
            },
            0.3,
        )
        .unwrap();
        assert_eq!(state.event_log().last().unwrap().kind, EventKind::Cancelled);
        assert_eq!(state.active_count(), 1);
    }

    #[test]
    fn run_god_delta_zero_always_reaches_n() {
        let params = ModelParams::splitting(0.0, 0.0, 6).unwrap();
        for rep in 0..50 {
            let (state, outcome) = run_god(&params, &mut stream(17, rep)).unwrap();
            assert_eq!(outcome, Outcome::ReachedN);
            assert_eq!(state.active_count(), 6);
            let t = state.tree();
            // the built tree passes full validation (increasing ranks,
            // interval tiling)
            RankedPlanarTree::new(t.root().clone()).unwrap();
        }
    }

    #[test]
    fn run_god_interval_partition_tiles() {
        let params = ModelParams::new(0.5, 2.0, 0.2, 1.0, 8).unwrap();
        for rep in 0..50 {
            let (state, _) = run_god(&params, &mut stream(23, rep)).unwrap();
            let total: f64 = state
                .leaf_intervals()
                .iter()
                .map(|(lo, hi)| hi - lo)
                .sum();
            assert!((total - 1.0).abs() < 1e-12);
            for w in state.leaf_intervals().windows(2) {
                assert_eq!(w[0].1, w[1].0, "intervals must abut");
            }
        }
    }

    #[test]
    fn run_god_reproducible() {
        let params = ModelParams::new(0.0, 0.0, 0.3, 1.0, 5).unwrap();
        let (a, oa) = run_god(&params, &mut stream(31, 4)).unwrap();
        let (b, ob) = run_god(&params, &mut stream(31, 4)).unwrap();
        assert_eq!(oa, ob);
        assert_eq!(a.tree(), b.tree());
        assert_eq!(a.event_log(), b.event_log());
    }

    #[test]
    fn run_god_n1_is_trivial() {
        let params = ModelParams::splitting(0.0, 0.0, 1).unwrap();
        let (state, outcome) = run_god(&params, &mut stream(0, 0)).unwrap();
        assert_eq!(outcome, Outcome::ReachedN);
        assert_eq!(state.leaf_count(), 1);
        assert!(state.event_log().is_empty());
    }

    #[test]
    fn event_log_serializes_to_json_lines() {
        let q = GeneratingQuadruple {
            u: 0.3,
            b: 0.4,
            v: 1.0,
            d: 0.0,
        };
        let state = god_step(GodState::new(), &q, 0.0).unwrap();
        let lines = state.event_log_json_lines();
        assert!(lines.contains("\"kind\":\"split\""));
        assert!(lines.contains("\"leaf_interval\":[0.0,1.0]"));
        assert!(lines.contains("\"b\":0.4"));
    }
}
