//! The four tree resolutions, projections between them, canonical forms,
//! combinatorial counts, and the permutation bijection.
//!
//! Resolutions, finest to coarsest:
//!
//! - [`RankedPlanarTree`] — left/right distinguished, internal nodes ranked
//!   `1..n-1` by split order (ranks increase along every root-to-leaf path).
//! - [`PlanarShape`] — left/right distinguished, ranks forgotten.
//! - [`RankedShape`] — ranks kept, children unordered.
//! - [`TreeShape`] — unordered and unranked (the phylogenetic tree shape).
//!
//! The non-planar resolutions are stored in a canonical child order so plain
//! structural equality coincides with isomorphism. The paper-level objects do
//! not fix such an order; the ones used here are:
//!
//! - `RankedShape`: children sorted by the smallest internal rank in each
//!   subtree (which, by the increasing property, is the subtree root's own
//!   rank), leaf children last. Two leaf children are interchangeable.
//! - `TreeShape`: children sorted by a total order where a leaf precedes any
//!   internal subtree and internal subtrees compare by (leaf count, then
//!   recursively by children).

mod newick;

pub use newick::{parse_bracket_planar, ParsedNewick};

use crate::numerics::{ln_binomial, ln_factorial};
use crate::{Error, Result};

/// Tree resolution tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Resolution {
    RankedPlanar,
    Planar,
    Ranked,
    Shape,
}

impl Resolution {
    pub fn as_str(&self) -> &'static str {
        match self {
            Resolution::RankedPlanar => "ranked-planar",
            Resolution::Planar => "planar",
            Resolution::Ranked => "ranked",
            Resolution::Shape => "shape",
        }
    }
}

impl std::str::FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ranked-planar" => Ok(Resolution::RankedPlanar),
            "planar" => Ok(Resolution::Planar),
            "ranked" => Ok(Resolution::Ranked),
            "shape" => Ok(Resolution::Shape),
            other => Err(Error::invalid(format!("unknown resolution `{other}`"))),
        }
    }
}

/// A closed subinterval of `[0,1]` labelling a leaf; its width is the leaf's
/// speciation potential.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

// ---------------------------------------------------------------------------
// Ranked planar trees
// ---------------------------------------------------------------------------

/// Node of a [`RankedPlanarTree`].
#[derive(Clone, Debug, PartialEq)]
pub enum RpNode {
    Leaf {
        interval: Option<Interval>,
        frozen: bool,
    },
    Split {
        rank: u32,
        left: Box<RpNode>,
        right: Box<RpNode>,
    },
}

impl RpNode {
    pub fn leaf() -> Self {
        RpNode::Leaf {
            interval: None,
            frozen: false,
        }
    }

    pub fn split(rank: u32, left: RpNode, right: RpNode) -> Self {
        RpNode::Split {
            rank,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, RpNode::Leaf { .. })
    }

    /// Numbers of internal nodes in the left and right subtrees below an
    /// internal node; a cherry gives `(0, 0)`.
    pub fn split_sizes(&self) -> Result<(usize, usize)> {
        match self {
            RpNode::Leaf { .. } => Err(Error::domain("split_sizes of a leaf")),
            RpNode::Split { left, right, .. } => {
                Ok((count_internal_rp(left), count_internal_rp(right)))
            }
        }
    }
}

fn count_internal_rp(node: &RpNode) -> usize {
    let mut stack = vec![node];
    let mut count = 0;
    while let Some(n) = stack.pop() {
        if let RpNode::Split { left, right, .. } = n {
            count += 1;
            stack.push(left);
            stack.push(right);
        }
    }
    count
}

/// A rooted planar binary tree whose `n-1` internal nodes are ranked
/// `1..n-1` in split order, ranks strictly increasing away from the root.
/// Leaves optionally carry interval labels and frozen marks.
#[derive(Clone, Debug, PartialEq)]
pub struct RankedPlanarTree {
    root: RpNode,
}

impl Drop for RankedPlanarTree {
    fn drop(&mut self) {
        // avoid recursive drop on deep combs
        let mut stack = vec![std::mem::replace(&mut self.root, RpNode::leaf())];
        while let Some(node) = stack.pop() {
            if let RpNode::Split { left, right, .. } = node {
                stack.push(*left);
                stack.push(*right);
            }
        }
    }
}

impl RankedPlanarTree {
    /// Validating constructor: checks the rank permutation, the increasing
    /// property, and (when present) that leaf intervals tile `[0,1]`.
    pub fn new(root: RpNode) -> Result<Self> {
        let tree = RankedPlanarTree { root };
        tree.validate()?;
        Ok(tree)
    }

    pub(crate) fn from_root_unchecked(root: RpNode) -> Self {
        RankedPlanarTree { root }
    }

    /// The one-leaf tree (probability 1 at every resolution).
    pub fn single_leaf() -> Self {
        RankedPlanarTree {
            root: RpNode::leaf(),
        }
    }

    pub fn root(&self) -> &RpNode {
        &self.root
    }

    fn validate(&self) -> Result<()> {
        let mut ranks = Vec::new();
        let mut leaves = 0usize;
        // (node, rank of nearest internal ancestor)
        let mut stack: Vec<(&RpNode, u32)> = vec![(&self.root, 0)];
        let mut intervals = Vec::new();
        while let Some((node, parent_rank)) = stack.pop() {
            match node {
                RpNode::Leaf { interval, .. } => {
                    leaves += 1;
                    intervals.push(*interval);
                }
                RpNode::Split { rank, left, right } => {
                    if *rank <= parent_rank {
                        return Err(Error::invalid(format!(
                            "rank {rank} not increasing below rank {parent_rank}"
                        )));
                    }
                    ranks.push(*rank);
                    stack.push((left, *rank));
                    stack.push((right, *rank));
                }
            }
        }
        if ranks.len() + 1 != leaves {
            return Err(Error::invalid("leaf/internal count mismatch"));
        }
        ranks.sort_unstable();
        for (i, r) in ranks.iter().enumerate() {
            if *r as usize != i + 1 {
                return Err(Error::invalid(format!(
                    "ranks are not a permutation of 1..{}",
                    leaves - 1
                )));
            }
        }
        let labelled = intervals.iter().filter(|i| i.is_some()).count();
        if labelled != 0 {
            if labelled != leaves {
                return Err(Error::invalid("mixed labelled and unlabelled leaves"));
            }
            let ivs: Vec<Interval> = self.leaf_intervals().into_iter().flatten().collect();
            let mut prev = 0.0;
            for iv in &ivs {
                if (iv.lo - prev).abs() > 1e-9 || iv.hi < iv.lo {
                    return Err(Error::invalid("leaf intervals do not tile [0,1]"));
                }
                prev = iv.hi;
            }
            if (prev - 1.0).abs() > 1e-9 {
                return Err(Error::invalid("leaf intervals do not end at 1"));
            }
        }
        Ok(())
    }

    pub fn leaf_count(&self) -> usize {
        count_internal_rp(&self.root) + 1
    }

    pub fn internal_count(&self) -> usize {
        count_internal_rp(&self.root)
    }

    /// `(n_L, n_R)` internal-node counts per split, in rank order `1..n-1`.
    pub fn split_pairs_by_rank(&self) -> Vec<(u32, u32)> {
        enum Frame<'a> {
            Enter(&'a RpNode),
            Exit(&'a RpNode),
        }
        let mut stack = vec![Frame::Enter(&self.root)];
        let mut sizes: Vec<u32> = Vec::new();
        let mut out: Vec<(u32, (u32, u32))> = Vec::new();
        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Enter(n) => match n {
                    RpNode::Leaf { .. } => sizes.push(0),
                    RpNode::Split { left, right, .. } => {
                        stack.push(Frame::Exit(n));
                        stack.push(Frame::Enter(right));
                        stack.push(Frame::Enter(left));
                    }
                },
                Frame::Exit(n) => {
                    let n_r = sizes.pop().expect("right subtree size");
                    let n_l = sizes.pop().expect("left subtree size");
                    if let RpNode::Split { rank, .. } = n {
                        out.push((*rank, (n_l, n_r)));
                    }
                    sizes.push(n_l + n_r + 1);
                }
            }
        }
        out.sort_unstable_by_key(|(rank, _)| *rank);
        out.into_iter().map(|(_, pair)| pair).collect()
    }

    /// In-order leaf payloads (interval label, frozen mark).
    pub fn leaves(&self) -> Vec<(Option<Interval>, bool)> {
        let mut out = Vec::new();
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            match node {
                RpNode::Leaf { interval, frozen } => out.push((*interval, *frozen)),
                RpNode::Split { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }

    pub fn leaf_intervals(&self) -> Vec<Option<Interval>> {
        self.leaves().into_iter().map(|(iv, _)| iv).collect()
    }

    pub fn frozen_leaf_count(&self) -> usize {
        self.leaves().iter().filter(|(_, f)| *f).count()
    }

    /// Left/right swap at every internal node.
    pub fn mirror(&self) -> Self {
        fn rec(node: &RpNode) -> RpNode {
            match node {
                RpNode::Leaf { interval, frozen } => RpNode::Leaf {
                    interval: *interval,
                    frozen: *frozen,
                },
                RpNode::Split { rank, left, right } => {
                    RpNode::split(*rank, rec(right), rec(left))
                }
            }
        }
        RankedPlanarTree {
            root: rec(&self.root),
        }
    }

    /// The splitting permutation: reading the internal ranks left to right
    /// (in-order), entry `k` is the rank of the `k`-th internal node, i.e.
    /// the step at which the `k`-th smallest split point was inserted.
    pub fn to_perm(&self) -> SplittingPermutation {
        enum Frame<'a> {
            Node(&'a RpNode),
            Emit(u32),
        }
        let mut out = Vec::new();
        let mut st = vec![Frame::Node(&self.root)];
        while let Some(f) = st.pop() {
            match f {
                Frame::Node(RpNode::Leaf { .. }) => {}
                Frame::Node(RpNode::Split { rank, left, right }) => {
                    st.push(Frame::Node(right));
                    st.push(Frame::Emit(*rank));
                    st.push(Frame::Node(left));
                }
                Frame::Emit(r) => out.push(r),
            }
        }
        SplittingPermutation(out)
    }

    /// Drop ranks, keep planarity.
    pub fn forget_ranks(&self) -> PlanarShape {
        fn rec(node: &RpNode) -> PsNode {
            match node {
                RpNode::Leaf { .. } => PsNode::Leaf,
                RpNode::Split { left, right, .. } => PsNode::split(rec(left), rec(right)),
            }
        }
        PlanarShape { root: rec(&self.root) }
    }

    /// Drop planarity, keep ranks (canonical child order).
    pub fn forget_planarity(&self) -> RankedShape {
        fn rec(node: &RpNode) -> RsNode {
            match node {
                RpNode::Leaf { .. } => RsNode::Leaf,
                RpNode::Split { rank, left, right } => RsNode::split(*rank, rec(left), rec(right)),
            }
        }
        RankedShape { root: rec(&self.root) }
    }

    /// Drop both ranks and planarity.
    pub fn shape(&self) -> TreeShape {
        self.forget_ranks().shape()
    }

    /// Fully unbalanced: the internal nodes form a single path.
    pub fn is_comb(&self) -> bool {
        is_comb_rp(&self.root)
    }
}

fn is_comb_rp(root: &RpNode) -> bool {
    let mut node = root;
    loop {
        match node {
            RpNode::Leaf { .. } => return true,
            RpNode::Split { left, right, .. } => match (left.is_leaf(), right.is_leaf()) {
                (true, _) => node = right,
                (_, true) => node = left,
                (false, false) => return false,
            },
        }
    }
}

// ---------------------------------------------------------------------------
// Splitting permutations
// ---------------------------------------------------------------------------

/// A permutation of `{1, …, n-1}` in bijection with ranked planar trees on
/// `n` leaves: entry `k` is the step index at which the `k`-th smallest
/// split point was created.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SplittingPermutation(Vec<u32>);

impl SplittingPermutation {
    pub fn new(perm: Vec<u32>) -> Result<Self> {
        let k = perm.len();
        let mut seen = vec![false; k];
        for &v in &perm {
            if v == 0 || v as usize > k || seen[v as usize - 1] {
                return Err(Error::invalid(format!(
                    "not a permutation of 1..={k}: {perm:?}"
                )));
            }
            seen[v as usize - 1] = true;
        }
        Ok(SplittingPermutation(perm))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn n_leaves(&self) -> usize {
        self.0.len() + 1
    }

    /// The unique ranked planar tree whose in-order internal ranks read this
    /// permutation — equivalently, the increasing binary tree obtained by
    /// binary-search insertion of the permutation's inverse. Built as the
    /// min-rooted Cartesian tree of the sequence (stack method, O(n)).
    pub fn to_tree(&self) -> RankedPlanarTree {
        if self.0.is_empty() {
            return RankedPlanarTree::single_leaf();
        }
        struct Tmp {
            rank: u32,
            left: Option<usize>,
            right: Option<usize>,
        }
        let mut arena: Vec<Tmp> = Vec::with_capacity(self.0.len());
        let mut spine: Vec<usize> = Vec::new();
        for &rank in &self.0 {
            let mut carried = None;
            while let Some(&top) = spine.last() {
                if arena[top].rank > rank {
                    carried = spine.pop();
                } else {
                    break;
                }
            }
            let id = arena.len();
            arena.push(Tmp {
                rank,
                left: carried,
                right: None,
            });
            if let Some(&top) = spine.last() {
                arena[top].right = Some(id);
            }
            spine.push(id);
        }
        let root = spine[0];
        // assemble children before parents
        let mut order = Vec::with_capacity(arena.len());
        let mut stack = vec![(root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                order.push(id);
                continue;
            }
            stack.push((id, true));
            if let Some(r) = arena[id].right {
                stack.push((r, false));
            }
            if let Some(l) = arena[id].left {
                stack.push((l, false));
            }
        }
        let mut built: Vec<Option<RpNode>> = (0..arena.len()).map(|_| None).collect();
        for id in order {
            let left = arena[id]
                .left
                .map(|c| built[c].take().expect("child built"))
                .unwrap_or_else(RpNode::leaf);
            let right = arena[id]
                .right
                .map(|c| built[c].take().expect("child built"))
                .unwrap_or_else(RpNode::leaf);
            built[id] = Some(RpNode::split(arena[id].rank, left, right));
        }
        RankedPlanarTree {
            root: built[root].take().expect("root built"),
        }
    }
}

// ---------------------------------------------------------------------------
// Planar shapes
// ---------------------------------------------------------------------------

/// Node of a [`PlanarShape`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PsNode {
    Leaf,
    Split { left: Box<PsNode>, right: Box<PsNode> },
}

impl PsNode {
    pub fn split(left: PsNode, right: PsNode) -> Self {
        PsNode::Split {
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, PsNode::Leaf)
    }

    pub fn split_sizes(&self) -> Result<(usize, usize)> {
        match self {
            PsNode::Leaf => Err(Error::domain("split_sizes of a leaf")),
            PsNode::Split { left, right } => {
                Ok((count_internal_ps(left), count_internal_ps(right)))
            }
        }
    }
}

fn count_internal_ps(node: &PsNode) -> usize {
    let mut stack = vec![node];
    let mut count = 0;
    while let Some(n) = stack.pop() {
        if let PsNode::Split { left, right } = n {
            count += 1;
            stack.push(left);
            stack.push(right);
        }
    }
    count
}

/// A rooted planar binary tree without ranks.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlanarShape {
    root: PsNode,
}

impl Drop for PlanarShape {
    fn drop(&mut self) {
        let mut stack = vec![std::mem::replace(&mut self.root, PsNode::Leaf)];
        while let Some(node) = stack.pop() {
            if let PsNode::Split { left, right } = node {
                stack.push(*left);
                stack.push(*right);
            }
        }
    }
}

impl PlanarShape {
    pub fn new(root: PsNode) -> Self {
        PlanarShape { root }
    }

    pub fn single_leaf() -> Self {
        PlanarShape { root: PsNode::Leaf }
    }

    pub fn cherry() -> Self {
        PlanarShape {
            root: PsNode::split(PsNode::Leaf, PsNode::Leaf),
        }
    }

    pub fn root(&self) -> &PsNode {
        &self.root
    }

    pub fn leaf_count(&self) -> usize {
        count_internal_ps(&self.root) + 1
    }

    pub fn internal_count(&self) -> usize {
        count_internal_ps(&self.root)
    }

    /// `(n_L, n_R)` per internal node, in pre-order.
    pub fn split_pairs(&self) -> Vec<(u32, u32)> {
        enum Frame<'a> {
            Enter(&'a PsNode),
            Exit,
        }
        let mut stack = vec![Frame::Enter(&self.root)];
        let mut sizes: Vec<u32> = Vec::new();
        let mut post: Vec<(u32, u32)> = Vec::new();
        while let Some(frame) = stack.pop() {
            match frame {
                Frame::Enter(PsNode::Leaf) => sizes.push(0),
                Frame::Enter(PsNode::Split { left, right }) => {
                    stack.push(Frame::Exit);
                    stack.push(Frame::Enter(right));
                    stack.push(Frame::Enter(left));
                }
                Frame::Exit => {
                    let n_r = sizes.pop().expect("right size");
                    let n_l = sizes.pop().expect("left size");
                    post.push((n_l, n_r));
                    sizes.push(n_l + n_r + 1);
                }
            }
        }
        post
    }

    /// The Catalan coefficient (shape functional)
    /// `∏ C(n_L + n_R, n_L)` — the number of valid rankings.
    ///
    /// Exact in `u128`; panics on overflow, which cannot happen at the
    /// enumeration scales this is used for.
    pub fn catalan_coefficient(&self) -> u128 {
        self.split_pairs()
            .iter()
            .fold(1u128, |acc, &(l, r)| {
                acc.checked_mul(binomial_u128((l + r) as u64, l as u64))
                    .expect("catalan coefficient overflow")
            })
    }

    /// `ln ∏ C(n_L + n_R, n_L)`, usable at any scale.
    pub fn ln_catalan_coefficient(&self) -> f64 {
        self.split_pairs()
            .iter()
            .map(|&(l, r)| ln_binomial((l + r) as u64, l as u64))
            .sum()
    }

    pub fn mirror(&self) -> Self {
        fn rec(node: &PsNode) -> PsNode {
            match node {
                PsNode::Leaf => PsNode::Leaf,
                PsNode::Split { left, right } => PsNode::split(rec(right), rec(left)),
            }
        }
        PlanarShape { root: rec(&self.root) }
    }

    pub fn shape(&self) -> TreeShape {
        fn rec(node: &PsNode) -> TsNode {
            match node {
                PsNode::Leaf => TsNode::Leaf,
                PsNode::Split { left, right } => TsNode::split(rec(left), rec(right)),
            }
        }
        TreeShape { root: rec(&self.root) }
    }

    pub fn is_comb(&self) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                PsNode::Leaf => return true,
                PsNode::Split { left, right } => match (left.is_leaf(), right.is_leaf()) {
                    (true, _) => node = right,
                    (_, true) => node = left,
                    (false, false) => return false,
                },
            }
        }
    }

    /// Every shape obtained by contracting one cherry to a leaf, once per
    /// cherry position (duplicates possible).
    pub fn with_each_cherry_removed(&self) -> Vec<PlanarShape> {
        fn rec(node: &PsNode, out: &mut Vec<PlanarShape>, rebuild: &dyn Fn(PsNode) -> PsNode) {
            if let PsNode::Split { left, right } = node {
                if left.is_leaf() && right.is_leaf() {
                    out.push(PlanarShape {
                        root: rebuild(PsNode::Leaf),
                    });
                    return;
                }
                let l = (**left).clone();
                let r = (**right).clone();
                rec(left, out, &|new_left| {
                    rebuild(PsNode::split(new_left, r.clone()))
                });
                rec(right, out, &|new_right| {
                    rebuild(PsNode::split(l.clone(), new_right))
                });
            }
        }
        let mut out = Vec::new();
        rec(&self.root, &mut out, &|n| n);
        out
    }
}

fn binomial_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc
            .checked_mul((n - i) as u128)
            .expect("binomial overflow")
            / (i + 1) as u128;
    }
    acc
}

// ---------------------------------------------------------------------------
// Ranked non-planar trees
// ---------------------------------------------------------------------------

/// Node of a [`RankedShape`]; `first`/`second` are in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RsNode {
    Leaf,
    Split {
        rank: u32,
        first: Box<RsNode>,
        second: Box<RsNode>,
    },
}

impl RsNode {
    fn key(&self) -> u32 {
        // By the increasing property the subtree's minimal internal rank is
        // its root's rank; leaves order last.
        match self {
            RsNode::Leaf => u32::MAX,
            RsNode::Split { rank, .. } => *rank,
        }
    }

    fn split(rank: u32, a: RsNode, b: RsNode) -> Self {
        let (first, second) = if a.key() <= b.key() { (a, b) } else { (b, a) };
        RsNode::Split {
            rank,
            first: Box::new(first),
            second: Box::new(second),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, RsNode::Leaf)
    }
}

/// A ranked tree with unordered children (Tajima's "evolutionary
/// relationships"), stored canonically so `==` is isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankedShape {
    root: RsNode,
}

impl Drop for RankedShape {
    fn drop(&mut self) {
        let mut stack = vec![std::mem::replace(&mut self.root, RsNode::Leaf)];
        while let Some(node) = stack.pop() {
            if let RsNode::Split { first, second, .. } = node {
                stack.push(*first);
                stack.push(*second);
            }
        }
    }
}

impl RankedShape {
    pub fn root(&self) -> &RsNode {
        &self.root
    }

    pub fn leaf_count(&self) -> usize {
        self.internal_count() + 1
    }

    pub fn internal_count(&self) -> usize {
        let mut stack = vec![&self.root];
        let mut count = 0;
        while let Some(n) = stack.pop() {
            if let RsNode::Split { first, second, .. } = n {
                count += 1;
                stack.push(first);
                stack.push(second);
            }
        }
        count
    }

    /// Number of internal nodes whose children are both leaves.
    pub fn cherry_count(&self) -> usize {
        let mut stack = vec![&self.root];
        let mut count = 0;
        while let Some(n) = stack.pop() {
            if let RsNode::Split { first, second, .. } = n {
                if first.is_leaf() && second.is_leaf() {
                    count += 1;
                }
                stack.push(first);
                stack.push(second);
            }
        }
        count
    }

    /// `(n_first, n_second)` internal counts per split in pre-order (for
    /// α = β the Beta factor is orientation-symmetric, so this order works
    /// for probability evaluation).
    pub fn split_pairs(&self) -> Vec<(u32, u32)> {
        fn rec(node: &RsNode, out: &mut Vec<(u32, u32)>) -> u32 {
            match node {
                RsNode::Leaf => 0,
                RsNode::Split { first, second, .. } => {
                    let mut tmp = Vec::new();
                    let a = rec(first, &mut tmp);
                    let b = rec(second, &mut tmp);
                    out.push((a, b));
                    out.append(&mut tmp);
                    a + b + 1
                }
            }
        }
        let mut out = Vec::new();
        rec(&self.root, &mut out);
        out
    }

    /// All ranked planar trees projecting to this ranked shape: one
    /// orientation choice per non-cherry internal node, `2^(n-1-c)` in total.
    pub fn planar_embeddings(&self) -> Vec<RankedPlanarTree> {
        fn rec(node: &RsNode) -> Vec<RpNode> {
            match node {
                RsNode::Leaf => vec![RpNode::leaf()],
                RsNode::Split { rank, first, second } => {
                    if first.is_leaf() && second.is_leaf() {
                        return vec![RpNode::split(*rank, RpNode::leaf(), RpNode::leaf())];
                    }
                    let firsts = rec(first);
                    let seconds = rec(second);
                    let mut out = Vec::with_capacity(2 * firsts.len() * seconds.len());
                    for a in &firsts {
                        for b in &seconds {
                            out.push(RpNode::split(*rank, a.clone(), b.clone()));
                            out.push(RpNode::split(*rank, b.clone(), a.clone()));
                        }
                    }
                    out
                }
            }
        }
        rec(&self.root)
            .into_iter()
            .map(RankedPlanarTree::from_root_unchecked)
            .collect()
    }

    pub fn shape(&self) -> TreeShape {
        fn rec(node: &RsNode) -> TsNode {
            match node {
                RsNode::Leaf => TsNode::Leaf,
                RsNode::Split { first, second, .. } => TsNode::split(rec(first), rec(second)),
            }
        }
        TreeShape { root: rec(&self.root) }
    }
}

// ---------------------------------------------------------------------------
// Tree shapes
// ---------------------------------------------------------------------------

/// Node of a [`TreeShape`]; children in canonical order, leaf counts cached.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TsNode {
    Leaf,
    Split {
        n_leaves: usize,
        left: Box<TsNode>,
        right: Box<TsNode>,
    },
}

impl TsNode {
    pub fn leaf_count(&self) -> usize {
        match self {
            TsNode::Leaf => 1,
            TsNode::Split { n_leaves, .. } => *n_leaves,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TsNode::Leaf)
    }

    /// Canonical total order: leaf < internal; internal by leaf count, then
    /// recursively by (left, right).
    fn canonical_cmp(&self, other: &TsNode) -> std::cmp::Ordering {
        use std::cmp::Ordering;
        match (self, other) {
            (TsNode::Leaf, TsNode::Leaf) => Ordering::Equal,
            (TsNode::Leaf, _) => Ordering::Less,
            (_, TsNode::Leaf) => Ordering::Greater,
            (
                TsNode::Split {
                    n_leaves: na,
                    left: la,
                    right: ra,
                },
                TsNode::Split {
                    n_leaves: nb,
                    left: lb,
                    right: rb,
                },
            ) => na
                .cmp(nb)
                .then_with(|| la.canonical_cmp(lb))
                .then_with(|| ra.canonical_cmp(rb)),
        }
    }

    fn split(a: TsNode, b: TsNode) -> Self {
        let n_leaves = a.leaf_count() + b.leaf_count();
        let (left, right) = if a.canonical_cmp(&b) != std::cmp::Ordering::Greater {
            (a, b)
        } else {
            (b, a)
        };
        TsNode::Split {
            n_leaves,
            left: Box::new(left),
            right: Box::new(right),
        }
    }
}

/// An unranked non-planar rooted binary tree (phylogenetic tree shape),
/// stored canonically so `==` is isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TreeShape {
    root: TsNode,
}

impl Drop for TreeShape {
    fn drop(&mut self) {
        let mut stack = vec![std::mem::replace(&mut self.root, TsNode::Leaf)];
        while let Some(node) = stack.pop() {
            if let TsNode::Split { left, right, .. } = node {
                stack.push(*left);
                stack.push(*right);
            }
        }
    }
}

impl TreeShape {
    pub fn root(&self) -> &TsNode {
        &self.root
    }

    pub fn leaf_count(&self) -> usize {
        self.root.leaf_count()
    }

    pub fn internal_count(&self) -> usize {
        self.leaf_count() - 1
    }

    pub fn cherry_count(&self) -> usize {
        let mut stack = vec![&self.root];
        let mut count = 0;
        while let Some(n) = stack.pop() {
            if let TsNode::Split { left, right, .. } = n {
                if left.is_leaf() && right.is_leaf() {
                    count += 1;
                }
                stack.push(left);
                stack.push(right);
            }
        }
        count
    }

    /// Number of internal nodes whose two child subtrees are isomorphic.
    /// In canonical form isomorphism is structural equality.
    pub fn iso_split_count(&self) -> usize {
        let mut stack = vec![&self.root];
        let mut count = 0;
        while let Some(n) = stack.pop() {
            if let TsNode::Split { left, right, .. } = n {
                if left == right {
                    count += 1;
                }
                stack.push(left);
                stack.push(right);
            }
        }
        count
    }

    /// Colless imbalance: `Σ |leaves_L − leaves_R|` over internal nodes.
    pub fn colless(&self) -> usize {
        let mut stack = vec![&self.root];
        let mut total = 0usize;
        while let Some(n) = stack.pop() {
            if let TsNode::Split { left, right, .. } = n {
                total += left.leaf_count().abs_diff(right.leaf_count());
                stack.push(left);
                stack.push(right);
            }
        }
        total
    }

    /// Sackin index: sum of leaf depths.
    pub fn sackin(&self) -> usize {
        let mut stack = vec![(&self.root, 0usize)];
        let mut total = 0usize;
        while let Some((n, depth)) = stack.pop() {
            match n {
                TsNode::Leaf => total += depth,
                TsNode::Split { left, right, .. } => {
                    stack.push((left, depth + 1));
                    stack.push((right, depth + 1));
                }
            }
        }
        total
    }

    /// One planar representative: the canonical layout read as planar.
    pub fn to_planar(&self) -> PlanarShape {
        fn rec(node: &TsNode) -> PsNode {
            match node {
                TsNode::Leaf => PsNode::Leaf,
                TsNode::Split { left, right, .. } => PsNode::split(rec(left), rec(right)),
            }
        }
        PlanarShape { root: rec(&self.root) }
    }

    /// All distinct planar shapes projecting to this shape,
    /// `2^(n-1-s)` in total.
    pub fn planar_embeddings(&self) -> Vec<PlanarShape> {
        fn rec(node: &TsNode) -> Vec<PsNode> {
            match node {
                TsNode::Leaf => vec![PsNode::Leaf],
                TsNode::Split { left, right, .. } => {
                    let ls = rec(left);
                    let rs = rec(right);
                    let mut out = Vec::new();
                    if left == right {
                        // flips coincide: all ordered pairs are distinct
                        for a in &ls {
                            for b in &rs {
                                out.push(PsNode::split(a.clone(), b.clone()));
                            }
                        }
                    } else {
                        for a in &ls {
                            for b in &rs {
                                out.push(PsNode::split(a.clone(), b.clone()));
                                out.push(PsNode::split(b.clone(), a.clone()));
                            }
                        }
                    }
                    out
                }
            }
        }
        rec(&self.root).into_iter().map(PlanarShape::new).collect()
    }

    pub fn is_comb(&self) -> bool {
        let mut node = &self.root;
        loop {
            match node {
                TsNode::Leaf => return true,
                TsNode::Split { left, right, .. } => {
                    match (left.is_leaf(), right.is_leaf()) {
                        (true, _) => node = right,
                        (_, true) => node = left,
                        (false, false) => return false,
                    }
                }
            }
        }
    }

    /// The comb on `n` leaves.
    pub fn comb(n: usize) -> Self {
        assert!(n >= 1);
        let mut node = TsNode::Leaf;
        for _ in 1..n {
            node = TsNode::split(TsNode::Leaf, node);
        }
        TreeShape { root: node }
    }

    /// The fully balanced shape on `n = 2^N` leaves.
    pub fn fully_balanced(n: usize) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::domain(format!("{n} is not a power of two")));
        }
        fn build(n: usize) -> TsNode {
            if n == 1 {
                TsNode::Leaf
            } else {
                TsNode::split(build(n / 2), build(n / 2))
            }
        }
        Ok(TreeShape { root: build(n) })
    }
}

/// `ln((n-1)!)` — the number of ranked planar trees on `n` leaves.
pub fn ln_ranked_planar_count(n: usize) -> f64 {
    ln_factorial(n.saturating_sub(1) as u64)
}
