//! Newick, bracket, and JSON serialization for all tree resolutions.
//!
//! Dialect: leaves are rendered empty (`*` when frozen), internal nodes carry
//! their rank as node label at ranked resolutions and no label otherwise;
//! trees are terminated by `;`. Branch lengths (`:0.37`) appear only on
//! continuous-time output and are accepted (and ignored) everywhere on input.
//!
//! The Supplementary-style bracket notation (`[., [[., .], .]]`) is accepted
//! as an alternate input format for planar shapes.

use serde_json::{json, Value};

use super::{
    PlanarShape, PsNode, RankedPlanarTree, RankedShape, RpNode, RsNode, TreeShape, TsNode,
};
use crate::{Error, Result};

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

enum Tok<'a, N> {
    Node(&'a N),
    Lit(&'static str),
    Label(String),
}

/// Iterative serializer shared by the four resolutions.
fn render<N>(
    root: &N,
    children: impl Fn(&N) -> Option<(&N, &N)>,
    label: impl Fn(&N) -> String,
) -> String {
    let mut out = String::new();
    let mut stack: Vec<Tok<N>> = vec![Tok::Lit(";"), Tok::Node(root)];
    while let Some(tok) = stack.pop() {
        match tok {
            Tok::Lit(s) => out.push_str(s),
            Tok::Label(s) => out.push_str(&s),
            Tok::Node(n) => {
                if let Some((l, r)) = children(n) {
                    stack.push(Tok::Label(label(n)));
                    stack.push(Tok::Lit(")"));
                    stack.push(Tok::Node(r));
                    stack.push(Tok::Lit(","));
                    stack.push(Tok::Node(l));
                    stack.push(Tok::Lit("("));
                } else {
                    stack.push(Tok::Label(label(n)));
                }
            }
        }
    }
    out
}

impl RankedPlanarTree {
    /// E.g. the cherry is `(,)1;`, the right comb on 4 leaves
    /// `(,(,(,)3)2)1;`; frozen leaves render as `*`.
    pub fn to_newick(&self) -> String {
        render(
            self.root(),
            |n| match n {
                RpNode::Leaf { .. } => None,
                RpNode::Split { left, right, .. } => Some((left.as_ref(), right.as_ref())),
            },
            |n| match n {
                RpNode::Leaf { frozen, .. } => {
                    if *frozen {
                        "*".into()
                    } else {
                        String::new()
                    }
                }
                RpNode::Split { rank, .. } => rank.to_string(),
            },
        )
    }

    pub fn to_json(&self) -> Value {
        fn rec(node: &RpNode) -> Value {
            match node {
                RpNode::Leaf { frozen, .. } => {
                    if *frozen {
                        json!({ "leaf": { "frozen": true } })
                    } else {
                        Value::String("leaf".into())
                    }
                }
                RpNode::Split { rank, left, right } => json!({
                    "rank": rank,
                    "left": rec(left),
                    "right": rec(right),
                }),
            }
        }
        rec(self.root())
    }
}

impl PlanarShape {
    pub fn to_newick(&self) -> String {
        render(
            self.root(),
            |n| match n {
                PsNode::Leaf => None,
                PsNode::Split { left, right } => Some((left.as_ref(), right.as_ref())),
            },
            |_| String::new(),
        )
    }

    pub fn to_json(&self) -> Value {
        fn rec(node: &PsNode) -> Value {
            match node {
                PsNode::Leaf => Value::String("leaf".into()),
                PsNode::Split { left, right } => json!({
                    "left": rec(left),
                    "right": rec(right),
                }),
            }
        }
        rec(self.root())
    }
}

impl RankedShape {
    /// Canonical-order Newick with rank labels; doubles as the canonical
    /// encoding of the isomorphism class.
    pub fn to_newick(&self) -> String {
        render(
            self.root(),
            |n| match n {
                RsNode::Leaf => None,
                RsNode::Split { first, second, .. } => Some((first.as_ref(), second.as_ref())),
            },
            |n| match n {
                RsNode::Leaf => String::new(),
                RsNode::Split { rank, .. } => rank.to_string(),
            },
        )
    }

    pub fn to_json(&self) -> Value {
        fn rec(node: &RsNode) -> Value {
            match node {
                RsNode::Leaf => Value::String("leaf".into()),
                RsNode::Split { rank, first, second } => json!({
                    "rank": rank,
                    "left": rec(first),
                    "right": rec(second),
                }),
            }
        }
        rec(self.root())
    }
}

impl TreeShape {
    /// Canonical-order Newick; doubles as the canonical encoding of the
    /// shape's isomorphism class.
    pub fn to_newick(&self) -> String {
        render(
            self.root(),
            |n| match n {
                TsNode::Leaf => None,
                TsNode::Split { left, right, .. } => Some((left.as_ref(), right.as_ref())),
            },
            |_| String::new(),
        )
    }

    pub fn to_json(&self) -> Value {
        fn rec(node: &TsNode) -> Value {
            match node {
                TsNode::Leaf => Value::String("leaf".into()),
                TsNode::Split { left, right, .. } => json!({
                    "left": rec(left),
                    "right": rec(right),
                }),
            }
        }
        rec(self.root())
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

/// A parsed Newick node before resolution-specific conversion.
#[derive(Clone, Debug)]
pub struct ParsedNewick {
    pub children: Vec<ParsedNewick>,
    pub label: String,
    pub length: Option<f64>,
}

impl ParsedNewick {
    fn leaf(label: String, length: Option<f64>) -> Self {
        ParsedNewick {
            children: Vec::new(),
            label,
            length,
        }
    }
}

fn parse_err(position: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        position,
        message: message.into(),
    }
}

/// Parse a Newick string into a raw node tree (iterative, explicit stack).
pub fn parse_newick(input: &str) -> Result<ParsedNewick> {
    let bytes = input.as_bytes();
    let mut pos = 0usize;
    // each frame collects the finished children at one '(' depth
    let mut frames: Vec<Vec<ParsedNewick>> = Vec::new();
    // the most recently completed node, not yet attached to a parent
    let mut current: Option<ParsedNewick> = None;

    fn read_label_length(bytes: &[u8], mut pos: usize) -> Result<(String, Option<f64>, usize)> {
        let start = pos;
        while pos < bytes.len() && !b"(),;:".contains(&bytes[pos]) {
            pos += 1;
        }
        let label = std::str::from_utf8(&bytes[start..pos])
            .map_err(|_| parse_err(start, "invalid utf-8 in label"))?
            .trim()
            .to_string();
        let mut length = None;
        if pos < bytes.len() && bytes[pos] == b':' {
            pos += 1;
            let lstart = pos;
            while pos < bytes.len() && !b"(),;".contains(&bytes[pos]) {
                pos += 1;
            }
            let text = std::str::from_utf8(&bytes[lstart..pos])
                .map_err(|_| parse_err(lstart, "invalid utf-8 in branch length"))?
                .trim();
            let v: f64 = text
                .parse()
                .map_err(|_| parse_err(lstart, format!("invalid branch length `{text}`")))?;
            length = Some(v);
        }
        Ok((label, length, pos))
    }

    let empty_leaf = || ParsedNewick::leaf(String::new(), None);
    loop {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if pos >= bytes.len() {
            return Err(parse_err(pos, "unexpected end of input (missing `;`)"));
        }
        match bytes[pos] {
            b'(' => {
                if current.is_some() {
                    return Err(parse_err(pos, "unexpected `(` after a node"));
                }
                frames.push(Vec::new());
                pos += 1;
            }
            b',' => {
                let node = current.take().unwrap_or_else(empty_leaf);
                match frames.last_mut() {
                    Some(f) => f.push(node),
                    None => return Err(parse_err(pos, "`,` outside parentheses")),
                }
                pos += 1;
            }
            b')' => {
                let node = current.take().unwrap_or_else(empty_leaf);
                let mut children = frames
                    .pop()
                    .ok_or_else(|| parse_err(pos, "unbalanced `)`"))?;
                children.push(node);
                pos += 1;
                let (label, length, newpos) = read_label_length(bytes, pos)?;
                pos = newpos;
                current = Some(ParsedNewick {
                    children,
                    label,
                    length,
                });
            }
            b';' => {
                let node = current.take().unwrap_or_else(empty_leaf);
                if !frames.is_empty() {
                    return Err(parse_err(pos, "missing `)` before `;`"));
                }
                pos += 1;
                while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                    pos += 1;
                }
                if pos != bytes.len() {
                    return Err(parse_err(pos, "trailing input after `;`"));
                }
                return Ok(node);
            }
            _ => {
                if current.is_some() {
                    return Err(parse_err(pos, "unexpected text after a node"));
                }
                let (label, length, newpos) = read_label_length(bytes, pos)?;
                pos = newpos;
                current = Some(ParsedNewick::leaf(label, length));
            }
        }
    }
}

fn to_rp(node: &ParsedNewick) -> Result<RpNode> {
    if node.children.is_empty() {
        let frozen = match node.label.as_str() {
            "" => false,
            "*" => true,
            other => {
                return Err(parse_err(
                    0,
                    format!("unexpected leaf label `{other}` (leaves are empty or `*`)"),
                ))
            }
        };
        return Ok(RpNode::Leaf {
            interval: None,
            frozen,
        });
    }
    if node.children.len() != 2 {
        return Err(parse_err(
            0,
            format!("internal node has {} children, expected 2", node.children.len()),
        ));
    }
    if node.label.is_empty() {
        return Err(parse_err(0, "missing rank label on internal node"));
    }
    let rank: u32 = node
        .label
        .parse()
        .map_err(|_| parse_err(0, format!("invalid rank label `{}`", node.label)))?;
    Ok(RpNode::Split {
        rank,
        left: Box::new(to_rp(&node.children[0])?),
        right: Box::new(to_rp(&node.children[1])?),
    })
}

impl RankedPlanarTree {
    /// Parse the ranked-planar dialect (rank labels required; `*` marks a
    /// frozen leaf; branch lengths tolerated and ignored).
    pub fn from_newick(input: &str) -> Result<Self> {
        let raw = parse_newick(input)?;
        let root = to_rp(&raw)?;
        RankedPlanarTree::new(root)
    }
}

impl PlanarShape {
    /// Parse a planar shape; rank labels, `*` marks and branch lengths are
    /// tolerated and ignored.
    pub fn from_newick(input: &str) -> Result<Self> {
        let raw = parse_newick(input)?;
        Ok(PlanarShape::new(to_ps_lenient(&raw)?))
    }

    /// Parse the Supplementary-style bracket notation, e.g.
    /// `[., [[., .], .]]`.
    pub fn from_bracket(input: &str) -> Result<Self> {
        parse_bracket_planar(input)
    }
}

fn to_ps_lenient(node: &ParsedNewick) -> Result<PsNode> {
    if node.children.is_empty() {
        return Ok(PsNode::Leaf);
    }
    if node.children.len() != 2 {
        return Err(parse_err(
            0,
            format!("internal node has {} children, expected 2", node.children.len()),
        ));
    }
    Ok(PsNode::split(
        to_ps_lenient(&node.children[0])?,
        to_ps_lenient(&node.children[1])?,
    ))
}

impl RankedShape {
    /// Parse a ranked tree (any planar layout) and canonicalize.
    pub fn from_newick(input: &str) -> Result<Self> {
        let t = RankedPlanarTree::from_newick(input)?;
        Ok(t.forget_planarity())
    }
}

impl TreeShape {
    /// Parse a shape (labels ignored, any planar layout) and canonicalize.
    pub fn from_newick(input: &str) -> Result<Self> {
        let ps = PlanarShape::from_newick(input)?;
        Ok(ps.shape())
    }
}

/// Parse `[., [[., .], .]]` into a planar shape.
pub fn parse_bracket_planar(input: &str) -> Result<PlanarShape> {
    let bytes = input.as_bytes();
    let mut pos = 0usize;
    let mut frames: Vec<Vec<PsNode>> = Vec::new();
    let mut finished: Option<PsNode> = None;
    while pos < bytes.len() {
        let c = bytes[pos];
        match c {
            b'[' => {
                if finished.is_some() {
                    return Err(parse_err(pos, "unexpected `[`"));
                }
                frames.push(Vec::new());
                pos += 1;
            }
            b'.' => {
                if finished.is_some() {
                    return Err(parse_err(pos, "unexpected `.`"));
                }
                finished = Some(PsNode::Leaf);
                pos += 1;
            }
            b',' => {
                let node = finished
                    .take()
                    .ok_or_else(|| parse_err(pos, "`,` without a preceding node"))?;
                match frames.last_mut() {
                    Some(f) => f.push(node),
                    None => return Err(parse_err(pos, "`,` outside brackets")),
                }
                pos += 1;
            }
            b']' => {
                let node = finished
                    .take()
                    .ok_or_else(|| parse_err(pos, "`]` without a preceding node"))?;
                let mut children = frames
                    .pop()
                    .ok_or_else(|| parse_err(pos, "unbalanced `]`"))?;
                children.push(node);
                if children.len() != 2 {
                    return Err(parse_err(
                        pos,
                        format!("bracket node has {} children, expected 2", children.len()),
                    ));
                }
                let right = children.pop().unwrap();
                let left = children.pop().unwrap();
                finished = Some(PsNode::split(left, right));
                pos += 1;
            }
            _ if c.is_ascii_whitespace() => pos += 1,
            other => {
                return Err(parse_err(
                    pos,
                    format!("unexpected character `{}`", other as char),
                ))
            }
        }
    }
    match (finished, frames.is_empty()) {
        (Some(root), true) => Ok(PlanarShape::new(root)),
        (_, false) => Err(parse_err(pos, "unclosed `[`")),
        (None, _) => Err(parse_err(pos, "empty input")),
    }
}
