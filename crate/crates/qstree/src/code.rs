//! Hash-consed rooted colored trees.
//!
//! Every rooted colored tree is interned once; two trees receive the same id
//! iff they are isomorphic as rooted colored trees. Children are stored in
//! canonical order: by color name, then recursively by child sequence, with a
//! proper prefix ordered first. Ids are process-local; canonical strings are
//! the stable external form.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

pub type NodeId = u32;

#[derive(Debug)]
struct Node {
    color: u32,
    children: Box<[NodeId]>,
}

#[derive(Default)]
struct Inner {
    nodes: Vec<Node>,
    map: HashMap<(u32, Box<[NodeId]>), NodeId>,
    colors: Vec<Arc<str>>,
    color_ids: HashMap<Arc<str>, u32>,
}

impl Inner {
    fn cmp(&self, a: NodeId, b: NodeId) -> Ordering {
        if a == b {
            return Ordering::Equal;
        }
        let (na, nb) = (&self.nodes[a as usize], &self.nodes[b as usize]);
        if na.color != nb.color {
            let o = self.colors[na.color as usize].cmp(&self.colors[nb.color as usize]);
            if o != Ordering::Equal {
                return o;
            }
        }
        for (x, y) in na.children.iter().zip(nb.children.iter()) {
            match self.cmp(*x, *y) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        na.children.len().cmp(&nb.children.len())
    }
}

/// The process-wide code table. Behaves as a pure cache: concurrent insertion
/// of the same tree yields the same id.
pub struct Interner {
    inner: RwLock<Inner>,
}

static INTERNER: OnceLock<Interner> = OnceLock::new();

/// The shared interner.
pub fn interner() -> &'static Interner {
    INTERNER.get_or_init(|| Interner { inner: RwLock::new(Inner::default()) })
}

impl Interner {
    fn color_id(&self, color: &str) -> u32 {
        if let Some(&c) = self.inner.read().unwrap().color_ids.get(color) {
            return c;
        }
        let mut w = self.inner.write().unwrap();
        if let Some(&c) = w.color_ids.get(color) {
            return c;
        }
        let id = w.colors.len() as u32;
        let name: Arc<str> = Arc::from(color);
        w.colors.push(name.clone());
        w.color_ids.insert(name, id);
        id
    }

    /// Interns a node with the given color and children (any order).
    pub fn intern(&self, color: &str, mut children: Vec<NodeId>) -> NodeId {
        let c = self.color_id(color);
        let key = {
            let r = self.inner.read().unwrap();
            children.sort_by(|a, b| r.cmp(*a, *b));
            let key = (c, children.into_boxed_slice());
            if let Some(&id) = r.map.get(&key) {
                return id;
            }
            key
        };
        let mut w = self.inner.write().unwrap();
        if let Some(&id) = w.map.get(&key) {
            return id;
        }
        let id = w.nodes.len() as NodeId;
        w.nodes.push(Node { color: key.0, children: key.1.clone() });
        w.map.insert(key, id);
        id
    }

    /// Canonical total order on interned trees.
    pub fn cmp(&self, a: NodeId, b: NodeId) -> Ordering {
        self.inner.read().unwrap().cmp(a, b)
    }

    pub fn color(&self, a: NodeId) -> Arc<str> {
        let r = self.inner.read().unwrap();
        r.colors[r.nodes[a as usize].color as usize].clone()
    }

    /// Children in canonical order.
    pub fn children(&self, a: NodeId) -> Vec<NodeId> {
        self.inner.read().unwrap().nodes[a as usize].children.to_vec()
    }

    /// Depth of the tree (0 for a single node).
    pub fn depth(&self, a: NodeId) -> usize {
        let r = self.inner.read().unwrap();
        let mut d = 0;
        let mut x = a;
        while let Some(&c) = r.nodes[x as usize].children.first() {
            d += 1;
            x = c;
        }
        d
    }

    /// Writes `(<color> <child> ... <child>)`.
    pub fn write_string(&self, a: NodeId, out: &mut String) {
        let r = self.inner.read().unwrap();
        fn go(r: &Inner, a: NodeId, out: &mut String) {
            let n = &r.nodes[a as usize];
            out.push('(');
            out.push_str(&r.colors[n.color as usize]);
            for &c in n.children.iter() {
                out.push(' ');
                go(r, c, out);
            }
            out.push(')');
        }
        go(&r, a, out);
    }

    /// Truncates a tree to depth `m` (children at depth `m` are dropped).
    pub fn truncate(&self, a: NodeId, m: usize) -> NodeId {
        let mut memo = HashMap::new();
        self.truncate_memo(a, m, &mut memo)
    }

    fn truncate_memo(&self, a: NodeId, m: usize, memo: &mut HashMap<(NodeId, usize), NodeId>) -> NodeId {
        if let Some(&x) = memo.get(&(a, m)) {
            return x;
        }
        let color = self.color(a);
        let kids = if m == 0 {
            Vec::new()
        } else {
            self.children(a).into_iter().map(|c| self.truncate_memo(c, m - 1, memo)).collect()
        };
        let x = self.intern(&color, kids);
        memo.insert((a, m), x);
        x
    }
}

/// Canonical code of a colored ball: an interned tree whose root has the
/// ball's center color.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct BallCode(pub NodeId);

impl BallCode {
    pub fn canonical_string(self) -> String {
        let mut s = String::new();
        interner().write_string(self.0, &mut s);
        s
    }

    pub fn radius(self) -> usize {
        interner().depth(self.0)
    }

    pub fn center_color(self) -> Arc<str> {
        interner().color(self.0)
    }

    /// The sub-ball of radius `m` about the same center.
    pub fn restrict(self, m: usize) -> BallCode {
        BallCode(interner().truncate(self.0, m))
    }
}

impl Ord for BallCode {
    fn cmp(&self, other: &Self) -> Ordering {
        interner().cmp(self.0, other.0)
    }
}

impl PartialOrd for BallCode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BallCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}
