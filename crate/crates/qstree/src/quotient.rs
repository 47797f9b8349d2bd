//! Edge-indexed colored quotient graphs: a finite part plus up to two tails,
//! the `qst` text format, validation, and materialization into a finite
//! [`ExpandedGraph`].

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteVertex {
    pub id: String,
    pub color: String,
}

/// An edge `from -- to` with `fwd = i(from, to)` and `bwd = i(to, from)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedEdge {
    pub from: String,
    pub to: String,
    pub fwd: u32,
    pub bwd: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Loop {
    pub at: String,
    pub index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub name: String,
    pub color: String,
    pub loop_index: u32,
    /// Index toward the next occurrence along the ray.
    pub fwd: u32,
    /// Index from the next occurrence back to this one.
    pub bwd: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailKind {
    Periodic,
    /// Template names are single characters; `rules` maps each to its image.
    Substitution { rules: Vec<(char, String)>, seed: char },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailSpec {
    pub attach: String,
    pub attach_fwd: u32,
    pub attach_bwd: u32,
    pub kind: TailKind,
    pub templates: Vec<Template>,
}

impl TailSpec {
    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, TailKind::Periodic)
    }

    /// Period of a periodic tail.
    pub fn period(&self) -> Option<usize> {
        self.is_periodic().then_some(self.templates.len())
    }

    /// Template index of occurrences `0..count`.
    pub fn template_sequence(&self, count: usize) -> Result<Vec<usize>> {
        match &self.kind {
            TailKind::Periodic => Ok((0..count).map(|j| j % self.templates.len()).collect()),
            TailKind::Substitution { rules, seed } => {
                let pos: HashMap<char, usize> = self
                    .templates
                    .iter()
                    .enumerate()
                    .filter_map(|(i, t)| t.name.chars().next().map(|c| (c, i)))
                    .collect();
                let rule: HashMap<char, &str> = rules.iter().map(|(c, w)| (*c, w.as_str())).collect();
                let mut word: Vec<char> = vec![*seed];
                while word.len() < count {
                    let mut next = Vec::with_capacity(word.len() * 2);
                    for c in &word {
                        let img = rule.get(c).ok_or_else(|| {
                            Error::Horizon(format!("no substitution rule for symbol {c}"))
                        })?;
                        next.extend(img.chars());
                    }
                    if next.len() <= word.len() || next[..word.len()] != word[..] {
                        return Err(Error::Horizon(format!(
                            "substitution from seed {seed} does not grow a fixed point past {} symbols",
                            word.len()
                        )));
                    }
                    word = next;
                }
                word.truncate(count);
                word.iter()
                    .map(|c| {
                        pos.get(c).copied().ok_or_else(|| {
                            Error::Horizon(format!("substitution produced unknown symbol {c}"))
                        })
                    })
                    .collect()
            }
        }
    }
}

/// A finitely described edge-indexed colored quotient graph of a `degree`-regular tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientSpec {
    pub degree: u32,
    pub alphabet: Vec<String>,
    pub vertices: Vec<FiniteVertex>,
    pub edges: Vec<IndexedEdge>,
    pub loops: Vec<Loop>,
    pub tails: Vec<TailSpec>,
}

fn valid_token(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl QuotientSpec {
    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v.id == id)
    }

    pub fn has_tails(&self) -> bool {
        !self.tails.is_empty()
    }

    pub fn all_tails_periodic(&self) -> bool {
        self.tails.iter().all(TailSpec::is_periodic)
    }

    /// Checks every structural invariant of the format.
    pub fn validate(&self) -> Result<()> {
        let d = self.degree;
        if d < 2 {
            return Err(Error::Invalid(format!("degree must be at least 2, got {d}")));
        }
        if self.alphabet.is_empty() {
            return Err(Error::Invalid("empty alphabet".into()));
        }
        let mut colors = HashSet::new();
        for c in &self.alphabet {
            if !valid_token(c) {
                return Err(Error::Invalid(format!("bad color name {c:?}")));
            }
            if !colors.insert(c.as_str()) {
                return Err(Error::Invalid(format!("duplicate color {c}")));
            }
        }
        if self.vertices.is_empty() {
            return Err(Error::Invalid("the finite part has no vertices".into()));
        }
        let mut ids = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            if !valid_token(&v.id) {
                return Err(Error::Invalid(format!("bad vertex id {:?}", v.id)));
            }
            if ids.insert(v.id.as_str(), i).is_some() {
                return Err(Error::Invalid(format!("duplicate vertex {}", v.id)));
            }
            if !colors.contains(v.color.as_str()) {
                return Err(Error::Invalid(format!("vertex {} uses undeclared color {}", v.id, v.color)));
            }
        }
        let lookup = |id: &str| {
            ids.get(id)
                .copied()
                .ok_or_else(|| Error::Invalid(format!("unknown vertex {id}")))
        };

        let mut sums = vec![0u64; self.vertices.len()];
        let mut pairs = HashSet::new();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for e in &self.edges {
            let (a, b) = (lookup(&e.from)?, lookup(&e.to)?);
            if a == b {
                return Err(Error::Invalid(format!("edge {} {} joins a vertex to itself; use loop", e.from, e.to)));
            }
            if e.fwd == 0 || e.bwd == 0 {
                return Err(Error::Invalid(format!("edge {} {} has a zero index", e.from, e.to)));
            }
            if !pairs.insert((a.min(b), a.max(b))) {
                return Err(Error::Invalid(format!("duplicate edge between {} and {}", e.from, e.to)));
            }
            sums[a] += e.fwd as u64;
            sums[b] += e.bwd as u64;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut looped = HashSet::new();
        for l in &self.loops {
            let a = lookup(&l.at)?;
            if l.index == 0 {
                return Err(Error::Invalid(format!("loop at {} has index 0", l.at)));
            }
            if !looped.insert(a) {
                return Err(Error::Invalid(format!("more than one loop at {}", l.at)));
            }
            sums[a] += l.index as u64;
        }

        if self.tails.len() > 2 {
            return Err(Error::Invalid("at most two tails are supported".into()));
        }
        let mut used: HashSet<&str> = self.vertices.iter().map(|v| v.color.as_str()).collect();
        for (ti, t) in self.tails.iter().enumerate() {
            let a = lookup(&t.attach)?;
            if t.attach_fwd == 0 || t.attach_bwd == 0 {
                return Err(Error::Invalid(format!("tail {ti} has a zero attach index")));
            }
            sums[a] += t.attach_fwd as u64;
            if t.templates.is_empty() {
                return Err(Error::Invalid(format!("tail {ti} has no templates")));
            }
            let mut names = HashSet::new();
            for tp in &t.templates {
                if !valid_token(&tp.name) || !names.insert(tp.name.as_str()) {
                    return Err(Error::Invalid(format!("tail {ti}: bad or duplicate template name {:?}", tp.name)));
                }
                if !colors.contains(tp.color.as_str()) {
                    return Err(Error::Invalid(format!("template {} uses undeclared color {}", tp.name, tp.color)));
                }
                if tp.fwd == 0 || tp.bwd == 0 {
                    return Err(Error::Invalid(format!("template {} has a zero index", tp.name)));
                }
                used.insert(tp.color.as_str());
            }
            let last = t.templates.last().unwrap();
            if t.attach_bwd != last.bwd {
                return Err(Error::Invalid(format!(
                    "tail {ti}: attach bwd {} must equal the wrap-around bwd {} of template {}",
                    t.attach_bwd, last.bwd, last.name
                )));
            }
            match &t.kind {
                TailKind::Periodic => {}
                TailKind::Substitution { rules, seed } => {
                    let first = &t.templates[0];
                    for tp in &t.templates {
                        if tp.name.chars().count() != 1 {
                            return Err(Error::Invalid(format!(
                                "substitution template names must be single characters, got {}",
                                tp.name
                            )));
                        }
                        if (tp.loop_index, tp.fwd, tp.bwd) != (first.loop_index, first.fwd, first.bwd) {
                            return Err(Error::Invalid(format!(
                                "substitution templates must share loop/fwd/bwd; {} differs from {}",
                                tp.name, first.name
                            )));
                        }
                    }
                    let known: HashSet<char> = t.templates.iter().filter_map(|tp| tp.name.chars().next()).collect();
                    if !known.contains(seed) {
                        return Err(Error::Invalid(format!("seed {seed} is not a template")));
                    }
                    let mut ruled = HashSet::new();
                    for (c, w) in rules {
                        if !known.contains(c) || !ruled.insert(*c) {
                            return Err(Error::Invalid(format!("bad or duplicate rule for {c}")));
                        }
                        if w.is_empty() || w.chars().any(|x| !known.contains(&x)) {
                            return Err(Error::Invalid(format!("rule {c}->{w} uses unknown symbols")));
                        }
                    }
                    if let Some(c) = known.iter().find(|c| !ruled.contains(*c)) {
                        return Err(Error::Invalid(format!("no rule for template {c}")));
                    }
                }
            }
            let p = t.templates.len();
            for (k, tp) in t.templates.iter().enumerate() {
                let prev_bwd = t.templates[(k + p - 1) % p].bwd;
                let sum = tp.loop_index as u64 + tp.fwd as u64 + prev_bwd as u64;
                if sum != d as u64 {
                    return Err(Error::DegreeMismatch { vertex: format!("template {}", tp.name), sum, degree: d });
                }
            }
        }
        for (i, &s) in sums.iter().enumerate() {
            if s != d as u64 {
                return Err(Error::DegreeMismatch { vertex: self.vertices[i].id.clone(), sum: s, degree: d });
            }
        }
        let root = find(&mut parent, 0);
        for i in 1..self.vertices.len() {
            if find(&mut parent, i) != root {
                return Err(Error::Invalid(format!("graph is disconnected: {} is unreachable", self.vertices[i].id)));
            }
        }
        if let Some(c) = self.alphabet.iter().find(|c| !used.contains(c.as_str())) {
            return Err(Error::Invalid(format!("color {c} is never used")));
        }
        Ok(())
    }

    /// Materializes the finite part and tail occurrences `0..=horizon` of every tail.
    pub fn expand(&self, horizon: usize) -> Result<ExpandedGraph> {
        let color_of: HashMap<&str, u32> =
            self.alphabet.iter().enumerate().map(|(i, c)| (c.as_str(), i as u32)).collect();
        let mut b = GraphBuilder::new(self.degree, self.alphabet.clone());
        for (i, v) in self.vertices.iter().enumerate() {
            b.add_vertex(color_of[v.color.as_str()], Origin::Finite { index: i });
        }
        let idx = |id: &str| self.vertex_index(id).unwrap() as u32;
        for e in &self.edges {
            b.add_edge(idx(&e.from), idx(&e.to), e.fwd, e.bwd);
        }
        for l in &self.loops {
            b.add_loop(idx(&l.at), l.index);
        }
        for (ti, t) in self.tails.iter().enumerate() {
            let seq = t.template_sequence(horizon + 1)?;
            let mut prev = idx(&t.attach);
            let (mut fwd, mut bwd) = (t.attach_fwd, t.attach_bwd);
            for (j, &a) in seq.iter().enumerate() {
                let tp = &t.templates[a];
                let v = b.add_vertex(
                    color_of[tp.color.as_str()],
                    Origin::Tail { tail: ti, position: j, template: a },
                );
                b.add_edge(prev, v, fwd, bwd);
                if tp.loop_index > 0 {
                    b.add_loop(v, tp.loop_index);
                }
                if j == horizon {
                    b.mark_incomplete(v);
                }
                prev = v;
                fwd = tp.fwd;
                bwd = tp.bwd;
            }
        }
        Ok(b.finish())
    }

    /// Replaces the first `r` occurrences of periodic tail `tail` by finite vertices.
    /// Returns the new spec and the ids given to the unrolled occurrences.
    pub fn unroll(&self, tail: usize, r: usize) -> Result<(QuotientSpec, Vec<String>)> {
        let t = self
            .tails
            .get(tail)
            .ok_or_else(|| Error::Precondition(format!("no tail {tail}")))?;
        if !t.is_periodic() {
            return Err(Error::Precondition("only periodic tails can be unrolled".into()));
        }
        let mut out = self.clone();
        if r == 0 {
            return Ok((out, Vec::new()));
        }
        let p = t.templates.len();
        let taken: HashSet<String> = self.vertices.iter().map(|v| v.id.clone()).collect();
        let mut ids = Vec::with_capacity(r);
        for j in 0..r {
            let mut id = format!("tail{tail}_{j}");
            while taken.contains(&id) {
                id.push('_');
            }
            ids.push(id);
        }
        let mut prev = t.attach.clone();
        let (mut fwd, mut bwd) = (t.attach_fwd, t.attach_bwd);
        for (j, id) in ids.iter().enumerate() {
            let tp = &t.templates[j % p];
            out.vertices.push(FiniteVertex { id: id.clone(), color: tp.color.clone() });
            out.edges.push(IndexedEdge { from: prev.clone(), to: id.clone(), fwd, bwd });
            if tp.loop_index > 0 {
                out.loops.push(Loop { at: id.clone(), index: tp.loop_index });
            }
            prev = id.clone();
            fwd = tp.fwd;
            bwd = tp.bwd;
        }
        let templates: Vec<Template> = (0..p).map(|k| t.templates[(r + k) % p].clone()).collect();
        out.tails[tail] = TailSpec {
            attach: prev,
            attach_fwd: fwd,
            attach_bwd: bwd,
            kind: TailKind::Periodic,
            templates,
        };
        Ok((out, ids))
    }
}

// ---------------------------------------------------------------------------
// Text format

struct Fields<'a> {
    line: usize,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn parse(line: usize, toks: &[&'a str], allowed: &[&str]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for t in toks {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, msg: format!("expected key=value, got {t:?}") })?;
            if !allowed.contains(&k) {
                return Err(Error::Parse { line, msg: format!("unknown key {k:?}") });
            }
            if map.insert(k, v).is_some() {
                return Err(Error::Parse { line, msg: format!("duplicate key {k:?}") });
            }
        }
        for k in allowed {
            if !map.contains_key(k) {
                return Err(Error::Parse { line, msg: format!("missing key {k:?}") });
            }
        }
        Ok(Fields { line, map })
    }

    fn str(&self, k: &str) -> &'a str {
        self.map[k]
    }

    fn num(&self, k: &str) -> Result<u32> {
        parse_num(self.line, self.map[k])
    }
}

fn parse_num(line: usize, s: &str) -> Result<u32> {
    s.parse()
        .map_err(|_| Error::Parse { line, msg: format!("expected a non-negative integer, got {s:?}") })
}

fn token(line: usize, s: &str, what: &str) -> Result<String> {
    if valid_token(s) {
        Ok(s.to_string())
    } else {
        Err(Error::Parse { line, msg: format!("bad {what} {s:?}") })
    }
}

/// Parses and validates a `qst` document.
pub fn parse_spec(text: &str) -> Result<QuotientSpec> {
    let mut header = false;
    let mut degree = None;
    let mut alphabet = None;
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let mut loops = Vec::new();
    let mut tails: Vec<TailSpec> = Vec::new();
    let mut open_tail = false;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let indented = body.starts_with(' ') || body.starts_with('\t');
        let toks: Vec<&str> = body.split_whitespace().collect();
        if !header {
            if indented || toks != ["qst", "1"] {
                return Err(Error::Parse { line, msg: "first line must be `qst 1`".into() });
            }
            header = true;
            continue;
        }
        let err = |msg: String| Error::Parse { line, msg };
        if indented {
            if !open_tail {
                return Err(err("indented line outside a tail block".into()));
            }
            let tail = tails.last_mut().unwrap();
            match toks[0] {
                "template" => {
                    if toks.len() < 2 {
                        return Err(err("template needs a name".into()));
                    }
                    let f = Fields::parse(line, &toks[2..], &["color", "loop", "fwd", "bwd"])?;
                    tail.templates.push(Template {
                        name: token(line, toks[1], "template name")?,
                        color: token(line, f.str("color"), "color")?,
                        loop_index: f.num("loop")?,
                        fwd: f.num("fwd")?,
                        bwd: f.num("bwd")?,
                    });
                }
                "rules" => {
                    let TailKind::Substitution { rules, seed } = &mut tail.kind else {
                        return Err(err("rules given for a periodic tail".into()));
                    };
                    if !rules.is_empty() {
                        return Err(err("duplicate rules line".into()));
                    }
                    if toks.len() != 4 || toks[2] != "seed" {
                        return Err(err("expected `rules <A>-><word>,... seed <A>`".into()));
                    }
                    for r in toks[1].split(',') {
                        let (lhs, rhs) = r
                            .split_once("->")
                            .ok_or_else(|| err(format!("bad rule {r:?}")))?;
                        let mut cs = lhs.chars();
                        let (Some(c), None) = (cs.next(), cs.next()) else {
                            return Err(err(format!("rule lhs must be one symbol, got {lhs:?}")));
                        };
                        if rhs.is_empty() || !valid_token(rhs) {
                            return Err(err(format!("bad rule image {rhs:?}")));
                        }
                        rules.push((c, rhs.to_string()));
                    }
                    let mut cs = toks[3].chars();
                    let (Some(c), None) = (cs.next(), cs.next()) else {
                        return Err(err(format!("seed must be one symbol, got {:?}", toks[3])));
                    };
                    *seed = c;
                }
                other => return Err(err(format!("unknown tail directive {other:?}"))),
            }
            continue;
        }
        open_tail = false;
        match toks[0] {
            "degree" => {
                if degree.is_some() || toks.len() != 2 {
                    return Err(err("expected a single `degree <d>` line".into()));
                }
                degree = Some(parse_num(line, toks[1])?);
            }
            "alphabet" => {
                if alphabet.is_some() || toks.len() < 2 {
                    return Err(err("expected a single non-empty `alphabet` line".into()));
                }
                alphabet = Some(
                    toks[1..]
                        .iter()
                        .map(|c| token(line, c, "color"))
                        .collect::<Result<Vec<_>>>()?,
                );
            }
            "vertex" => {
                if toks.len() < 2 {
                    return Err(err("vertex needs an id".into()));
                }
                let f = Fields::parse(line, &toks[2..], &["color"])?;
                vertices.push(FiniteVertex {
                    id: token(line, toks[1], "vertex id")?,
                    color: token(line, f.str("color"), "color")?,
                });
            }
            "edge" => {
                if toks.len() != 5 {
                    return Err(err("expected `edge <id1> <id2> <fwd> <bwd>`".into()));
                }
                edges.push(IndexedEdge {
                    from: token(line, toks[1], "vertex id")?,
                    to: token(line, toks[2], "vertex id")?,
                    fwd: parse_num(line, toks[3])?,
                    bwd: parse_num(line, toks[4])?,
                });
            }
            "loop" => {
                if toks.len() != 3 {
                    return Err(err("expected `loop <id> <k>`".into()));
                }
                loops.push(Loop { at: token(line, toks[1], "vertex id")?, index: parse_num(line, toks[2])? });
            }
            "tail" => {
                let f = Fields::parse(line, &toks[1..], &["attach", "fwd", "bwd", "kind"])?;
                let kind = match f.str("kind") {
                    "periodic" => TailKind::Periodic,
                    "substitution" => TailKind::Substitution { rules: Vec::new(), seed: ' ' },
                    k => return Err(err(format!("unknown tail kind {k:?}"))),
                };
                tails.push(TailSpec {
                    attach: token(line, f.str("attach"), "vertex id")?,
                    attach_fwd: f.num("fwd")?,
                    attach_bwd: f.num("bwd")?,
                    kind,
                    templates: Vec::new(),
                });
                open_tail = true;
            }
            other => return Err(err(format!("unknown directive {other:?}"))),
        }
    }
    if !header {
        return Err(Error::Parse { line: 1, msg: "empty document".into() });
    }
    for t in &tails {
        if let TailKind::Substitution { rules, .. } = &t.kind {
            if rules.is_empty() {
                return Err(Error::Invalid(format!("substitution tail at {} has no rules line", t.attach)));
            }
        }
    }
    let spec = QuotientSpec {
        degree: degree.ok_or_else(|| Error::Invalid("missing degree".into()))?,
        alphabet: alphabet.ok_or_else(|| Error::Invalid("missing alphabet".into()))?,
        vertices,
        edges,
        loops,
        tails,
    };
    spec.validate()?;
    Ok(spec)
}

impl fmt::Display for QuotientSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qst 1")?;
        writeln!(f, "degree {}", self.degree)?;
        writeln!(f, "alphabet {}", self.alphabet.join(" "))?;
        for v in &self.vertices {
            writeln!(f, "vertex {} color={}", v.id, v.color)?;
        }
        for e in &self.edges {
            writeln!(f, "edge {} {} {} {}", e.from, e.to, e.fwd, e.bwd)?;
        }
        for l in &self.loops {
            writeln!(f, "loop {} {}", l.at, l.index)?;
        }
        for t in &self.tails {
            let kind = if t.is_periodic() { "periodic" } else { "substitution" };
            writeln!(f, "tail attach={} fwd={} bwd={} kind={kind}", t.attach, t.attach_fwd, t.attach_bwd)?;
            for tp in &t.templates {
                writeln!(
                    f,
                    "  template {} color={} loop={} fwd={} bwd={}",
                    tp.name, tp.color, tp.loop_index, tp.fwd, tp.bwd
                )?;
            }
            if let TailKind::Substitution { rules, seed } = &t.kind {
                let rs: Vec<String> = rules.iter().map(|(c, w)| format!("{c}->{w}")).collect();
                writeln!(f, "  rules {} seed {seed}", rs.join(","))?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Expanded graphs

/// Where a materialized vertex comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    Finite { index: usize },
    Tail { tail: usize, position: usize, template: usize },
    /// Position in a finite window of a bi-infinite word.
    Word { position: usize },
}

/// One directed incidence: `index` lifts of `to` are adjacent to a lift of the owner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub edge: u32,
    pub to: u32,
    pub index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedVertex {
    pub color: u32,
    pub origin: Origin,
    /// False when some incidence lies beyond the materialized window.
    pub complete: bool,
}

/// A finite, fully annotated piece of a quotient graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpandedGraph {
    pub degree: u32,
    pub colors: Vec<String>,
    pub vertices: Vec<ExpandedVertex>,
    pub adj: Vec<Vec<Arc>>,
    /// `rev[v][k]` is the position in `adj[to]` of the reverse of `adj[v][k]`.
    pub rev: Vec<Vec<u32>>,
}

impl ExpandedGraph {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn color_name(&self, v: usize) -> &str {
        &self.colors[self.vertices[v].color as usize]
    }

    pub fn index_sum(&self, v: usize) -> u64 {
        self.adj[v].iter().map(|a| a.index as u64).sum()
    }

    /// Graph distances from `src` (loops ignored, unreachable is `usize::MAX`).
    pub fn distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut q = VecDeque::new();
        dist[src] = 0;
        q.push_back(src);
        while let Some(v) = q.pop_front() {
            for a in &self.adj[v] {
                let w = a.to as usize;
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    /// Finds the vertex with the given origin.
    pub fn find(&self, origin: Origin) -> Option<usize> {
        self.vertices.iter().position(|v| v.origin == origin)
    }

    /// Human-readable name of a vertex.
    pub fn label(&self, spec: Option<&QuotientSpec>, v: usize) -> String {
        match self.vertices[v].origin {
            Origin::Finite { index } => match spec {
                Some(s) => s.vertices[index].id.clone(),
                None => format!("v{index}"),
            },
            Origin::Tail { tail, position, .. } => format!("tail{tail}[{position}]"),
            Origin::Word { position } => format!("w[{position}]"),
        }
    }
}

/// Incremental construction of an [`ExpandedGraph`].
pub(crate) struct GraphBuilder {
    g: ExpandedGraph,
    next_edge: u32,
}

impl GraphBuilder {
    pub(crate) fn new(degree: u32, colors: Vec<String>) -> Self {
        GraphBuilder {
            g: ExpandedGraph { degree, colors, vertices: Vec::new(), adj: Vec::new(), rev: Vec::new() },
            next_edge: 0,
        }
    }

    pub(crate) fn add_vertex(&mut self, color: u32, origin: Origin) -> u32 {
        self.g.vertices.push(ExpandedVertex { color, origin, complete: true });
        self.g.adj.push(Vec::new());
        self.g.rev.push(Vec::new());
        (self.g.vertices.len() - 1) as u32
    }

    pub(crate) fn add_edge(&mut self, a: u32, b: u32, fwd: u32, bwd: u32) {
        let e = self.next_edge;
        self.next_edge += 1;
        let (ka, kb) = (self.g.adj[a as usize].len() as u32, self.g.adj[b as usize].len() as u32);
        self.g.adj[a as usize].push(Arc { edge: e, to: b, index: fwd });
        self.g.rev[a as usize].push(kb);
        self.g.adj[b as usize].push(Arc { edge: e, to: a, index: bwd });
        self.g.rev[b as usize].push(ka);
    }

    pub(crate) fn add_loop(&mut self, a: u32, index: u32) {
        let e = self.next_edge;
        self.next_edge += 1;
        let k = self.g.adj[a as usize].len() as u32;
        self.g.adj[a as usize].push(Arc { edge: e, to: a, index });
        self.g.rev[a as usize].push(k);
    }

    pub(crate) fn mark_incomplete(&mut self, v: u32) {
        self.g.vertices[v as usize].complete = false;
    }

    pub(crate) fn finish(self) -> ExpandedGraph {
        self.g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASIC3: &str = "qst 1
degree 3
alphabet a1 a2 a3
vertex a1 color=a1
vertex a2 color=a2
edge a1 a2 3 1
tail attach=a2 fwd=2 bwd=1 kind=periodic
  template t color=a3 loop=0 fwd=2 bwd=1
";

    #[test]
    fn parses_and_expands_basic() {
        let s = parse_spec(BASIC3).unwrap();
        assert_eq!(s.degree, 3);
        let g = s.expand(4).unwrap();
        assert_eq!(g.len(), 2 + 5);
        for v in 0..g.len() {
            if g.vertices[v].complete {
                assert_eq!(g.index_sum(v), 3, "vertex {v}");
            }
        }
    }

    #[test]
    fn monochrome_has_one_vertex() {
        let s = parse_spec("qst 1\ndegree 3\nalphabet a\nvertex x color=a\nloop x 3\n").unwrap();
        assert_eq!(s.expand(5).unwrap().len(), 1);
    }

    #[test]
    fn degree_mismatch_names_vertex() {
        let e = parse_spec("qst 1\ndegree 3\nalphabet a\nvertex x color=a\nloop x 2\n").unwrap_err();
        match e {
            Error::DegreeMismatch { vertex, sum, .. } => {
                assert_eq!(vertex, "x");
                assert_eq!(sum, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_keys_and_references() {
        let bad_key = "qst 1\ndegree 3\nalphabet a\nvertex x color=a shade=b\nloop x 3\n";
        assert!(matches!(parse_spec(bad_key), Err(Error::Parse { line: 4, .. })));
        let bad_ref = "qst 1\ndegree 3\nalphabet a\nvertex x color=a\nloop y 3\n";
        assert!(matches!(parse_spec(bad_ref), Err(Error::Invalid(_))));
        let unused = "qst 1\ndegree 3\nalphabet a b\nvertex x color=a\nloop x 3\n";
        assert!(matches!(parse_spec(unused), Err(Error::Invalid(_))));
        let split = "qst 1\ndegree 2\nalphabet a\nvertex x color=a\nvertex y color=a\nloop x 2\nloop y 2\n";
        assert!(matches!(parse_spec(split), Err(Error::Invalid(_))));
    }

    #[test]
    fn fibonacci_substitution_sequence() {
        let text = "qst 1
degree 3
alphabet a b
vertex x color=a
loop x 1
tail attach=x fwd=2 bwd=1 kind=substitution
  template A color=a loop=0 fwd=2 bwd=1
  template B color=b loop=0 fwd=2 bwd=1
  rules A->AB,B->A seed A
";
        let s = parse_spec(text).unwrap();
        let seq = s.tails[0].template_sequence(8).unwrap();
        let word: String = seq.iter().map(|&i| if i == 0 { 'A' } else { 'B' }).collect();
        assert_eq!(word, "ABAABABA");
    }

    #[test]
    fn round_trip_and_unroll() {
        let s = parse_spec(BASIC3).unwrap();
        let again = parse_spec(&s.to_string()).unwrap();
        assert_eq!(s, again);
        let (u, ids) = s.unroll(0, 3).unwrap();
        u.validate().unwrap();
        assert_eq!(ids.len(), 3);
        assert_eq!(u.vertices.len(), 5);
    }
}
