//! Explicit colored balls in the covering tree and their canonical codes.

use std::collections::{BTreeMap, VecDeque};

use crate::code::{interner, BallCode, NodeId};
use crate::error::{Error, Result};
use crate::quotient::ExpandedGraph;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallNode {
    pub color: String,
    pub depth: usize,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// A rooted colored tree of a given radius; node 0 is the center.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredBall {
    pub radius: usize,
    pub nodes: Vec<BallNode>,
    /// Quotient vertex the ball was unfolded around, if any.
    pub base: Option<usize>,
}

impl ColoredBall {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_color(&self) -> &str {
        &self.nodes[0].color
    }

    /// Rebuilds an explicit ball from an interned code.
    pub fn from_code(code: BallCode) -> ColoredBall {
        let i = interner();
        let mut nodes = vec![BallNode { color: i.color(code.0).to_string(), depth: 0, parent: None, children: vec![] }];
        let mut stack: Vec<(usize, NodeId)> = vec![(0, code.0)];
        let mut radius = 0;
        while let Some((at, id)) = stack.pop() {
            for c in i.children(id) {
                let k = nodes.len();
                let depth = nodes[at].depth + 1;
                radius = radius.max(depth);
                nodes.push(BallNode { color: i.color(c).to_string(), depth, parent: Some(at), children: vec![] });
                nodes[at].children.push(k);
                stack.push((k, c));
            }
        }
        ColoredBall { radius, nodes, base: None }
    }

    fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes[v].parent.into_iter().chain(self.nodes[v].children.iter().copied())
    }

    /// Code of the radius-`n` ball about node `v`, or `None` if it leaves this ball.
    fn ball_at(&self, v: usize, n: usize) -> Option<NodeId> {
        if self.nodes[v].depth + n > self.radius {
            return None;
        }
        fn go(b: &ColoredBall, v: usize, from: Option<usize>, k: usize) -> NodeId {
            let kids = if k == 0 {
                Vec::new()
            } else {
                b.neighbors(v).filter(|&w| Some(w) != from).map(|w| go(b, w, Some(v), k - 1)).collect()
            };
            interner().intern(&b.nodes[v].color, kids)
        }
        Some(go(self, v, None, n))
    }
}

/// Unfolds the covering tree around a lift of `base` to radius `n`.
pub fn unfold_ball(g: &ExpandedGraph, base: usize, n: usize) -> Result<ColoredBall> {
    let mut nodes = vec![BallNode { color: g.color_name(base).to_string(), depth: 0, parent: None, children: vec![] }];
    // (ball node, quotient vertex, entering edge)
    let mut q: VecDeque<(usize, usize, Option<u32>)> = VecDeque::new();
    q.push_back((0, base, None));
    while let Some((at, v, ent)) = q.pop_front() {
        let depth = nodes[at].depth;
        if depth == n {
            continue;
        }
        if !g.vertices[v].complete {
            return Err(Error::Horizon(format!(
                "unfolding radius {n} around vertex {base} needs the neighbors of a frontier vertex"
            )));
        }
        for arc in &g.adj[v] {
            let copies = arc.index - u32::from(Some(arc.edge) == ent);
            for _ in 0..copies {
                let k = nodes.len();
                let w = arc.to as usize;
                nodes.push(BallNode { color: g.color_name(w).to_string(), depth: depth + 1, parent: Some(at), children: vec![] });
                nodes[at].children.push(k);
                q.push_back((k, w, Some(arc.edge)));
            }
        }
    }
    Ok(ColoredBall { radius: n, nodes, base: Some(base) })
}

/// Bottom-up canonical labeling.
pub fn canonical_code(ball: &ColoredBall) -> BallCode {
    let i = interner();
    let mut ids: Vec<NodeId> = vec![0; ball.len()];
    let mut order: Vec<usize> = (0..ball.len()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(ball.nodes[v].depth));
    for v in order {
        let kids = ball.nodes[v].children.iter().map(|&c| ids[c]).collect();
        ids[v] = i.intern(&ball.nodes[v].color, kids);
    }
    BallCode(ids[0])
}

/// The sub-ball of radius `m` about the same center.
pub fn restrict_ball(ball: &ColoredBall, m: usize) -> Result<ColoredBall> {
    if m > ball.radius {
        return Err(Error::Precondition(format!("cannot restrict radius {} to {m}", ball.radius)));
    }
    let mut map = vec![usize::MAX; ball.len()];
    let mut nodes = Vec::new();
    for (v, node) in ball.nodes.iter().enumerate() {
        // parents precede children in every construction used here
        if node.depth > m {
            continue;
        }
        map[v] = nodes.len();
        let parent = node.parent.map(|p| map[p]);
        if let Some(p) = parent {
            nodes.push(BallNode { color: node.color.clone(), depth: node.depth, parent, children: vec![] });
            let k = nodes.len() - 1;
            let pn: &mut BallNode = &mut nodes[p];
            pn.children.push(k);
        } else {
            nodes.push(BallNode { color: node.color.clone(), depth: 0, parent: None, children: vec![] });
        }
    }
    Ok(ColoredBall { radius: m, nodes, base: ball.base })
}

/// Codes of the radius-`n` balls about every node at depth at most `radius - n`, with multiplicity.
pub fn interior_classes(ball: &ColoredBall, n: usize) -> Result<BTreeMap<BallCode, usize>> {
    if n > ball.radius {
        return Err(Error::Precondition(format!("interior radius {n} exceeds ball radius {}", ball.radius)));
    }
    let mut out = BTreeMap::new();
    for v in 0..ball.len() {
        if let Some(id) = ball.ball_at(v, n) {
            *out.entry(BallCode(id)).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// Number of nodes of a ball of radius `n` in the `d`-regular tree.
pub fn ball_size(d: u64, n: u32) -> u64 {
    if n == 0 {
        return 1;
    }
    if d == 2 {
        return 2 * n as u64 + 1;
    }
    1 + d * ((d - 1).pow(n) - 1) / (d - 2)
}
