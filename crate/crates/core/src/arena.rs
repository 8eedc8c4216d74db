//! Flat representation of the tree under construction, shared by the
//! discrete and continuous processes.
//!
//! Nodes live in a `Vec`; children are always created after their parent, so
//! conversion to the recursive tree type runs children-first in one reverse
//! pass with no recursion.

use crate::trees::{Interval, RankedPlanarTree, RpNode};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub(crate) enum ArenaNode {
    Leaf { lo: f64, hi: f64, frozen: bool },
    Split { rank: u32, left: usize, right: usize },
}

#[derive(Clone, Debug)]
pub(crate) struct ArenaTree {
    nodes: Vec<ArenaNode>,
    /// In-order arena ids of the current leaves; their intervals tile [0,1].
    leaves: Vec<usize>,
    active: usize,
}

impl ArenaTree {
    pub fn new() -> Self {
        ArenaTree {
            nodes: vec![ArenaNode::Leaf {
                lo: 0.0,
                hi: 1.0,
                frozen: false,
            }],
            leaves: vec![0],
            active: 1,
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn active_count(&self) -> usize {
        self.active
    }

    fn leaf_fields(&self, pos: usize) -> (f64, f64, bool) {
        match self.nodes[self.leaves[pos]] {
            ArenaNode::Leaf { lo, hi, frozen } => (lo, hi, frozen),
            ArenaNode::Split { .. } => unreachable!("leaf list points at a split"),
        }
    }

    pub fn leaf_interval(&self, pos: usize) -> (f64, f64) {
        let (lo, hi, _) = self.leaf_fields(pos);
        (lo, hi)
    }

    pub fn leaf_frozen(&self, pos: usize) -> bool {
        self.leaf_fields(pos).2
    }

    pub fn leaf_intervals(&self) -> Vec<(f64, f64)> {
        (0..self.leaves.len()).map(|p| self.leaf_interval(p)).collect()
    }

    /// Stable arena id of the leaf at in-order position `pos`.
    pub fn leaf_id(&self, pos: usize) -> usize {
        self.leaves[pos]
    }

    /// Arena ids of all current leaves, in tree order.
    pub fn leaf_ids(&self) -> &[usize] {
        &self.leaves
    }

    /// In-order position of the leaf whose interval contains `u`; a point on
    /// a boundary belongs to the cell on its right.
    pub fn leaf_pos_containing(&self, u: f64) -> Result<usize> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::domain(format!("u = {u} outside [0,1]")));
        }
        let idx = self
            .leaves
            .partition_point(|&id| matches!(self.nodes[id], ArenaNode::Leaf { lo, .. } if lo <= u));
        Ok((idx - 1).min(self.leaves.len() - 1))
    }

    /// Split the (active) leaf at `pos` at relative position `b`, assigning
    /// `rank` to the new internal node. Fails with a precision error if a
    /// child interval would have exactly zero width.
    pub fn split(&mut self, pos: usize, b: f64, rank: u32) -> Result<()> {
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::domain(format!("split fraction b = {b} outside (0,1)")));
        }
        let id = self.leaves[pos];
        let (lo, hi, frozen) = self.leaf_fields(pos);
        debug_assert!(!frozen, "split of a frozen leaf must be cancelled upstream");
        let mid = lo + (hi - lo) * b;
        if !(mid > lo && mid < hi) {
            return Err(Error::Precision(format!(
                "leaf interval [{lo}, {hi}] too narrow to split at b = {b}"
            )));
        }
        let left = self.nodes.len();
        self.nodes.push(ArenaNode::Leaf {
            lo,
            hi: mid,
            frozen: false,
        });
        let right = self.nodes.len();
        self.nodes.push(ArenaNode::Leaf {
            lo: mid,
            hi,
            frozen: false,
        });
        self.nodes[id] = ArenaNode::Split { rank, left, right };
        self.leaves.splice(pos..=pos, [left, right]);
        self.active += 1;
        Ok(())
    }

    /// Freeze the leaf at `pos`; returns false if it was already frozen.
    pub fn freeze(&mut self, pos: usize) -> bool {
        let id = self.leaves[pos];
        match &mut self.nodes[id] {
            ArenaNode::Leaf { frozen, .. } => {
                if *frozen {
                    false
                } else {
                    *frozen = true;
                    self.active -= 1;
                    true
                }
            }
            ArenaNode::Split { .. } => unreachable!("leaf list points at a split"),
        }
    }

    pub fn active_total_width(&self) -> f64 {
        (0..self.leaves.len())
            .filter_map(|p| {
                let (lo, hi, frozen) = self.leaf_fields(p);
                (!frozen).then_some(hi - lo)
            })
            .sum()
    }

    /// Position of the active leaf at cumulative active width `target`
    /// (in `[0, active_total_width)`).
    pub fn active_leaf_by_mass(&self, target: f64) -> Option<usize> {
        let mut acc = 0.0;
        let mut last_active = None;
        for p in 0..self.leaves.len() {
            let (lo, hi, frozen) = self.leaf_fields(p);
            if frozen {
                continue;
            }
            last_active = Some(p);
            acc += hi - lo;
            if target < acc {
                return Some(p);
            }
        }
        // target == total width up to rounding: take the last active leaf
        last_active
    }

    /// Convert to the recursive tree, with interval labels and frozen marks.
    pub fn to_tree(&self) -> RankedPlanarTree {
        let mut built: Vec<Option<RpNode>> = (0..self.nodes.len()).map(|_| None).collect();
        for id in (0..self.nodes.len()).rev() {
            let node = match self.nodes[id] {
                ArenaNode::Leaf { lo, hi, frozen } => RpNode::Leaf {
                    interval: Some(Interval::new(lo, hi)),
                    frozen,
                },
                ArenaNode::Split { rank, left, right } => RpNode::Split {
                    rank,
                    left: Box::new(built[left].take().expect("child before parent")),
                    right: Box::new(built[right].take().expect("child before parent")),
                },
            };
            built[id] = Some(node);
        }
        RankedPlanarTree::from_root_unchecked(built[0].take().expect("root"))
    }
}
