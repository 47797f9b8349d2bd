//! Finite part, derived quotient of the tail, periodic extension and the
//! bounded-type round trip.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::ball::canonical_code;
use crate::ball::{BallNode, ColoredBall};
use crate::census::{build_census, BallCensus, TypeSet, Verdict};
use crate::error::{Error, Result};
use crate::quotient::{FiniteVertex, IndexedEdge, Loop, Origin, QuotientSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    FinitePartPlusRay,
    Ray,
    Biinfinite,
    Other,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::FinitePartPlusRay => "finite-part-plus-ray",
            Shape::Ray => "ray",
            Shape::Biinfinite => "biinfinite",
            Shape::Other => "other",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundedness {
    Bounded,
    UnboundedHeuristic,
    Undetermined,
}

impl fmt::Display for Boundedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundedness::Bounded => "bounded",
            Boundedness::UnboundedHeuristic => "unbounded-heuristic",
            Boundedness::Undetermined => "undetermined",
        })
    }
}

#[derive(Debug, Clone)]
pub struct StructureReport {
    pub window: usize,
    pub n0: usize,
    pub c: i64,
    pub n1: usize,
    /// Type sets of the finite part and of the tail positions inspected.
    pub types: Vec<TypeSet>,
    /// Vertices of the finite part `G`, as indices of the census graph.
    pub g: Vec<usize>,
    pub g_labels: Vec<String>,
    /// Number of leading occurrences of each tail that belong to `G`.
    pub tail_prefix: Vec<usize>,
    pub x_n1: usize,
    pub x_n1_label: String,
    /// Largest distance from `x_n1` to a vertex of `G`.
    pub r: usize,
    pub shape: Shape,
    pub bounded: Boundedness,
}

fn tau_of(types: &[TypeSet], v: usize) -> Option<&TypeSet> {
    types.iter().find(|t| t.vertex == v)
}

/// Finite part, `N1`, `x_{N1}` and the verdicts. The `probe` decides the
/// unbounded-type heuristic for substitution tails.
pub fn structure_report(
    spec: &QuotientSpec,
    census: &BallCensus,
    probe: impl FnOnce() -> Result<bool>,
) -> Result<StructureReport> {
    let prof = census.profile();
    if prof.verdict != Verdict::QuasiSturmian {
        return Err(Error::Precondition(format!("census verdict is {}, not quasi-Sturmian", prof.verdict)));
    }
    let (n0, c) = (prof.n0.unwrap(), prof.c.unwrap());
    let g = &census.graph;
    let types = census.type_sets();
    let big_n = census.max_n;

    let finite: Vec<usize> =
        (0..g.len()).filter(|&v| matches!(g.vertices[v].origin, Origin::Finite { .. })).collect();
    for &v in &finite {
        if tau_of(&types, v).is_none() {
            return Err(Error::Horizon(format!("finite vertex {} has no ball at radius {big_n}", g.label(Some(spec), v))));
        }
    }
    let tail_seq = |t: usize| -> Vec<usize> {
        let mut seq: Vec<(usize, usize)> = (0..g.len())
            .filter_map(|v| match g.vertices[v].origin {
                Origin::Tail { tail, position, .. } if tail == t => Some((position, v)),
                _ => None,
            })
            .collect();
        seq.sort();
        seq.into_iter().map(|(_, v)| v).collect()
    };

    // The minimal maximal type is attained before the increasing run of each tail.
    let mut min_tau = finite.iter().map(|&v| tau_of(&types, v).unwrap().tau).min().unwrap_or(i64::MAX);
    for t in 0..spec.tails.len() {
        for v in tail_seq(t) {
            match tau_of(&types, v) {
                Some(ts) if !ts.censored => min_tau = min_tau.min(ts.tau),
                _ => break,
            }
        }
    }
    let n1 = (n0 as i64).max(min_tau).max(0) as usize;

    let mut members: BTreeSet<usize> =
        finite.iter().copied().filter(|&v| tau_of(&types, v).unwrap().tau <= n1 as i64).collect();
    let mut tail_prefix = Vec::new();
    for t in 0..spec.tails.len() {
        let seq = tail_seq(t);
        let mut j = 0;
        while j < seq.len() {
            match tau_of(&types, seq[j]) {
                Some(ts) if !ts.censored && ts.tau <= n1 as i64 => j += 1,
                Some(_) => break,
                None => return Err(Error::Horizon(format!("tail {t} leaves the window inside the finite part"))),
            }
        }
        // beyond the prefix the maximal type grows by one per step
        let mut prev = tau_of(&types, seq[j]).map(|ts| ts.tau);
        for &v in &seq[j + 1..] {
            let (Some(p), Some(ts)) = (prev, tau_of(&types, v)) else { break };
            if p + 1 > big_n as i64 - 1 {
                break;
            }
            if ts.tau != p + 1 {
                return Err(Error::Inconsistency(format!(
                    "maximal types along tail {t} are not increasing by one at {} ({} after {p})",
                    g.label(Some(spec), v),
                    ts.tau
                )));
            }
            prev = Some(ts.tau);
        }
        members.extend(seq[..j].iter().copied());
        tail_prefix.push(j);
    }
    let g_vertices: Vec<usize> = members.iter().copied().collect();

    let at_n1: Vec<usize> = g_vertices
        .iter()
        .copied()
        .filter(|&v| tau_of(&types, v).unwrap().tau == n1 as i64)
        .collect();
    let x_n1 = match at_n1.as_slice() {
        [x] => *x,
        [] => return Err(Error::Inconsistency(format!("no vertex of maximal type N1 = {n1}"))),
        many => {
            return Err(Error::Inconsistency(format!(
                "{} vertices share maximal type N1 = {n1}",
                many.len()
            )))
        }
    };
    let dist = g.distances(x_n1);
    let r = g_vertices.iter().map(|&v| dist[v]).max().unwrap_or(0);

    let outside_finite = finite.iter().any(|v| !members.contains(v));
    let branching_outside = (0..g.len())
        .filter(|v| !members.contains(v) && g.vertices[*v].complete)
        .filter(|&v| {
            let nb: BTreeSet<u32> = g.adj[v].iter().map(|a| a.to).filter(|&w| w as usize != v).collect();
            nb.len() >= 3
        })
        .count();
    if branching_outside >= 2 {
        return Err(Error::Inconsistency(format!(
            "{branching_outside} branching vertices outside the finite part"
        )));
    }
    let shape = if spec.tails.is_empty() {
        Shape::Other
    } else if spec.all_tails_periodic() {
        if spec.tails.len() == 1 && !outside_finite {
            Shape::FinitePartPlusRay
        } else {
            Shape::Other
        }
    } else {
        path_shape(spec)
    };
    let bounded = if spec.tails.is_empty() {
        Boundedness::Undetermined
    } else if spec.all_tails_periodic() {
        Boundedness::Bounded
    } else if probe()? {
        Boundedness::UnboundedHeuristic
    } else {
        Boundedness::Undetermined
    };
    let g_labels = g_vertices.iter().map(|&v| g.label(Some(spec), v)).collect();
    Ok(StructureReport {
        window: big_n,
        n0,
        c,
        n1,
        types,
        g: g_vertices,
        g_labels,
        tail_prefix,
        x_n1,
        x_n1_label: g.label(Some(spec), x_n1),
        r,
        shape,
        bounded,
    })
}

/// Ray or bi-infinite line: the finite part is a path (loops aside) whose ends carry the tails.
fn path_shape(spec: &QuotientSpec) -> Shape {
    let nv = spec.vertices.len();
    let mut deg = vec![0usize; nv];
    for e in &spec.edges {
        deg[spec.vertex_index(&e.from).unwrap()] += 1;
        deg[spec.vertex_index(&e.to).unwrap()] += 1;
    }
    let attach: Vec<usize> = spec.tails.iter().map(|t| spec.vertex_index(&t.attach).unwrap()).collect();
    for &a in &attach {
        deg[a] += 1;
    }
    let is_path = spec.edges.len() + 1 == nv && deg.iter().all(|&d| d <= 2);
    match (is_path, spec.tails.len()) {
        (true, 1) if nv == 1 || deg[attach[0]] <= 2 => Shape::Ray,
        (true, 2) => Shape::Biinfinite,
        _ => Shape::Other,
    }
}

// ---------------------------------------------------------------------------
// Z

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    SingleVertex,
    Segment(usize),
    Cycle(usize),
}

impl Topology {
    /// Loops do not count as cycles.
    pub fn is_cycle(self) -> bool {
        matches!(self, Topology::Cycle(_))
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::SingleVertex => f.write_str("single-vertex"),
            Topology::Segment(k) => write!(f, "segment({k})"),
            Topology::Cycle(k) => write!(f, "cycle({k})"),
        }
    }
}

/// Edge-indexed graph on the `N1`-ball classes realized beyond the finite part.
#[derive(Debug, Clone)]
pub struct ZGraph {
    pub n1: usize,
    /// Census class indices at radius `N1`, canonical order.
    pub classes: Vec<usize>,
    pub colors: Vec<String>,
    /// `index[i][j] = i_Z(i, j)`.
    pub index: Vec<Vec<u32>>,
    pub topology: Topology,
}

impl ZGraph {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Multiset of `(i_Z(D,E), i_Z(E,D))` over edges, loops as `(k, k)`.
    pub fn index_multiset(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in i..self.len() {
                if self.index[i][j] > 0 {
                    let (a, b) = (self.index[i][j], self.index[j][i]);
                    out.push((a.min(b), a.max(b)));
                }
            }
        }
        out.sort();
        out
    }

    pub fn loops(&self) -> Vec<(usize, u32)> {
        (0..self.len()).filter(|&i| self.index[i][i] > 0).map(|i| (i, self.index[i][i])).collect()
    }

    /// Tail-free spec with quotient `Z`. With `by_class`, every vertex gets its own color.
    pub fn to_spec(&self, degree: u32, by_class: bool) -> QuotientSpec {
        let name = |i: usize| format!("z{i}");
        let color = |i: usize| if by_class { name(i) } else { self.colors[i].clone() };
        let mut alphabet: Vec<String> = Vec::new();
        for i in 0..self.len() {
            let c = color(i);
            if !alphabet.contains(&c) {
                alphabet.push(c);
            }
        }
        let mut spec = QuotientSpec {
            degree,
            alphabet,
            vertices: (0..self.len()).map(|i| FiniteVertex { id: name(i), color: color(i) }).collect(),
            edges: Vec::new(),
            loops: Vec::new(),
            tails: Vec::new(),
        };
        for i in 0..self.len() {
            if self.index[i][i] > 0 {
                spec.loops.push(Loop { at: name(i), index: self.index[i][i] });
            }
            for j in i + 1..self.len() {
                if self.index[i][j] > 0 {
                    spec.edges.push(IndexedEdge { from: name(i), to: name(j), fwd: self.index[i][j], bwd: self.index[j][i] });
                }
            }
        }
        spec
    }
}

/// The derived graph `Z` from the `N1`-balls of vertices outside `G`.
pub fn derive_z(census: &BallCensus, report: &StructureReport) -> Result<ZGraph> {
    if report.bounded != Boundedness::Bounded {
        return Err(Error::Precondition("Z is only defined for bounded type".into()));
    }
    let n1 = report.n1;
    if n1 + 1 > census.max_n {
        return Err(Error::Precondition(format!("census must reach radius {}", n1 + 1)));
    }
    let g = &census.graph;
    let in_g: BTreeSet<usize> = report.g.iter().copied().collect();
    let y: Vec<usize> = (0..g.len())
        .filter(|v| !in_g.contains(v) && matches!(g.vertices[*v].origin, Origin::Tail { .. }))
        .filter(|&v| census.class_of(n1 + 1, v).is_some())
        .collect();
    if y.is_empty() {
        return Err(Error::Horizon("no materialized vertex beyond the finite part".into()));
    }
    // unique extension of every N1-class on Y
    let mut ext: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in &y {
        let (d, e) = (census.class_of(n1, v).unwrap(), census.class_of(n1 + 1, v).unwrap());
        if *ext.entry(d).or_insert(e) != e {
            return Err(Error::Inconsistency(format!(
                "N1-class {d} has two extensions beyond the finite part"
            )));
        }
    }
    let classes: Vec<usize> = ext.keys().copied().collect();
    let pos: BTreeMap<usize, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let k = classes.len();
    let mut index: Vec<Option<Vec<u32>>> = vec![None; k];
    for &v in &y {
        let d = pos[&census.class_of(n1, v).unwrap()];
        let mut row = vec![0u32; k];
        for a in &g.adj[v] {
            let c = census
                .class_of(n1, a.to as usize)
                .ok_or_else(|| Error::Horizon("neighbor without an N1-ball".into()))?;
            let e = *pos.get(&c).ok_or_else(|| {
                Error::Inconsistency(format!("a neighbor class {c} of the tail side does not occur on it"))
            })?;
            row[e] += a.index;
        }
        match &index[d] {
            None => index[d] = Some(row),
            Some(prev) if *prev != row => {
                return Err(Error::Inconsistency(format!(
                    "neighbor counts of Z-vertex {d} differ across witnesses: {prev:?} vs {row:?}"
                )))
            }
            _ => {}
        }
    }
    let index: Vec<Vec<u32>> = index.into_iter().map(|r| r.expect("every class has a witness")).collect();
    for (i, row) in index.iter().enumerate() {
        if row.iter().map(|&x| x as u64).sum::<u64>() != g.degree as u64 {
            return Err(Error::Inconsistency(format!("Z-vertex {i} has index sum {:?}", row)));
        }
        for j in 0..k {
            if (row[j] > 0) != (index[j][i] > 0) {
                return Err(Error::Inconsistency(format!("Z indices between {i} and {j} are one-sided")));
            }
        }
    }
    let topology = z_topology(&index)?;
    let colors = classes.iter().map(|&c| census.classes(n1)[c].code.center_color().to_string()).collect();
    Ok(ZGraph { n1, classes, colors, index, topology })
}

fn z_topology(index: &[Vec<u32>]) -> Result<Topology> {
    let k = index.len();
    if k == 1 {
        return Ok(Topology::SingleVertex);
    }
    let deg: Vec<usize> = (0..k).map(|i| (0..k).filter(|&j| j != i && index[i][j] > 0).count()).collect();
    let edges: usize = deg.iter().sum::<usize>() / 2;
    // connectivity
    let mut seen = vec![false; k];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for w in 0..k {
            if w != v && index[v][w] > 0 && !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::Inconsistency("Z is disconnected".into()));
    }
    if deg.iter().all(|&d| d <= 2) {
        if edges + 1 == k {
            return Ok(Topology::Segment(k));
        }
        if edges == k {
            return Ok(Topology::Cycle(k));
        }
    }
    Err(Error::Inconsistency(format!("Z is neither a segment nor a cycle (degrees {deg:?})")))
}

// ---------------------------------------------------------------------------
// Periodic extension

/// The colored `k`-ball about a vertex of class `root`, assigning `Z`-classes
/// outward: a node of class `D` entered from class `P` receives
/// `i_Z(D, E) - [E = P]` children of each class `E`, in increasing class order.
pub fn psi_ball(z: &ZGraph, root: usize, k: usize) -> Result<ColoredBall> {
    let mut nodes = vec![BallNode { color: z.colors[root].clone(), depth: 0, parent: None, children: vec![] }];
    let mut class = vec![root];
    let mut frontier = vec![0usize];
    for depth in 1..=k {
        let mut next = Vec::new();
        for &at in &frontier {
            let d = class[at];
            let from = nodes[at].parent.map(|p| class[p]);
            for e in 0..z.len() {
                let mut cnt = z.index[d][e];
                if from == Some(e) {
                    cnt = cnt.checked_sub(1).ok_or_else(|| {
                        Error::Inconsistency(format!("index bookkeeping: i_Z({d},{e}) = 0 but {e} is a parent"))
                    })?;
                }
                for _ in 0..cnt {
                    let id = nodes.len();
                    nodes.push(BallNode { color: z.colors[e].clone(), depth, parent: Some(at), children: vec![] });
                    nodes[at].children.push(id);
                    class.push(e);
                    next.push(id);
                }
            }
        }
        frontier = next;
    }
    Ok(ColoredBall { radius: k, nodes, base: None })
}

#[derive(Debug, Clone)]
pub struct PeriodicExtension {
    /// Quotient `Z`, vertices colored by their center color.
    pub spec: QuotientSpec,
    /// Quotient `Z`, every vertex with its own color.
    pub z_spec: QuotientSpec,
    pub b_extension: Vec<usize>,
    pub b_z: Vec<usize>,
    /// First radius from which `b_extension` is constant over the checked range.
    pub stable_from: usize,
    pub stable_value: usize,
}

/// Builds the periodic extension and checks it against `Z`, the outward
/// construction, and the input coloring away from the finite part.
pub fn build_periodic_extension(
    census: &BallCensus,
    report: &StructureReport,
    z: &ZGraph,
    check_radius: usize,
) -> Result<PeriodicExtension> {
    let d = census.graph.degree;
    let spec = z.to_spec(d, false);
    let z_spec = z.to_spec(d, true);
    spec.validate()?;
    z_spec.validate()?;
    let ext = build_census(&spec, check_radius)?;
    let zc = build_census(&z_spec, check_radius)?;
    let b_extension: Vec<usize> = (0..=check_radius).map(|n| ext.b(n)).collect();
    let b_z: Vec<usize> = (0..=check_radius).map(|n| zc.b(n)).collect();

    // outward construction agrees with the covering of the extension
    for i in 0..z.len() {
        for k in 0..=check_radius.min(4) {
            let made = canonical_code(&psi_ball(z, i, k)?);
            if Some(made) != ext.code(k, i) {
                return Err(Error::Inconsistency(format!("outward construction differs at z{i}, radius {k}")));
            }
        }
    }
    // the extension reproduces the input coloring on balls avoiding G
    let g = &census.graph;
    let in_g: BTreeSet<usize> = report.g.iter().copied().collect();
    let mut dist_g = vec![usize::MAX; g.len()];
    for &s in &report.g {
        for (v, dv) in g.distances(s).into_iter().enumerate() {
            dist_g[v] = dist_g[v].min(dv);
        }
    }
    let zpos: BTreeMap<usize, usize> = z.classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    for v in (0..g.len()).filter(|v| !in_g.contains(v)) {
        let Some(cls) = census.class_of(z.n1, v) else { continue };
        let Some(&zi) = zpos.get(&cls) else { continue };
        for n in 0..dist_g[v].min(check_radius + 1) {
            let (Some(a), Some(b)) = (census.code(n, v), ext.code(n, zi)) else { break };
            if a != b {
                return Err(Error::Inconsistency(format!(
                    "extension differs from the coloring at {} radius {n}",
                    g.label(None, v)
                )));
            }
        }
    }
    let last = *b_extension.last().unwrap();
    let stable_from = (0..=check_radius).rev().take_while(|&n| b_extension[n] == last).last().unwrap_or(0);
    Ok(PeriodicExtension { spec, z_spec, b_extension, b_z, stable_from, stable_value: last })
}

// ---------------------------------------------------------------------------
// Round trip

/// The input coloring with every vertex of `G` given a fresh color of its own.
pub fn marked_recoloring(spec: &QuotientSpec, census: &BallCensus, report: &StructureReport) -> Result<QuotientSpec> {
    let mut out = spec.clone();
    let mut unrolled: Vec<Vec<String>> = Vec::new();
    for t in 0..spec.tails.len() {
        let (s, ids) = out.unroll(t, report.tail_prefix[t])?;
        out = s;
        unrolled.push(ids);
    }
    let g = &census.graph;
    let ids: BTreeSet<String> = report
        .g
        .iter()
        .map(|&v| match g.vertices[v].origin {
            Origin::Finite { index } => spec.vertices[index].id.clone(),
            Origin::Tail { tail, position, .. } => unrolled[tail][position].clone(),
            Origin::Word { .. } => unreachable!("word windows have no finite part"),
        })
        .collect();
    let mut fresh = Vec::new();
    for v in out.vertices.iter_mut() {
        if ids.contains(&v.id) {
            let mut c = format!("g_{}", v.id);
            while spec.alphabet.contains(&c) {
                c.push('_');
            }
            v.color = c.clone();
            fresh.push(c);
        }
    }
    let used: BTreeSet<&str> = out
        .vertices
        .iter()
        .map(|v| v.color.as_str())
        .chain(out.tails.iter().flat_map(|t| t.templates.iter().map(|tp| tp.color.as_str())))
        .collect();
    let mut alphabet: Vec<String> = spec.alphabet.iter().filter(|c| used.contains(c.as_str())).cloned().collect();
    alphabet.extend(fresh);
    out.alphabet = alphabet;
    out.validate()?;
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RoundTrip {
    pub z: ZGraph,
    pub extension: PeriodicExtension,
    pub b_psi: Vec<usize>,
    pub alphabet_size: usize,
    pub g_size: usize,
    /// `n + |A| + |VG|` for every `n` in the window.
    pub literal_holds: bool,
    /// `b_psi(n) - n` when constant from `N1` on.
    pub observed_offset: Option<i64>,
    /// `b_psi(n) = n + |VG| + |VZ|` for `N1 <= n` in the window.
    pub gz_law_holds: bool,
}

impl RoundTrip {
    pub fn literal_offset(&self) -> i64 {
        (self.alphabet_size + self.g_size) as i64
    }
}

/// Both directions of the bounded-type characterization over a window.
pub fn theorem_round_trip(spec: &QuotientSpec, window: usize) -> Result<RoundTrip> {
    let census = build_census(spec, window.max(2))?;
    let report = structure_report(spec, &census, || Ok(false))?;
    if report.bounded != Boundedness::Bounded {
        return Err(Error::Precondition("round trip needs a periodic tail".into()));
    }
    if report.shape != Shape::FinitePartPlusRay {
        return Err(Error::Inconsistency(format!("bounded type but shape is {}", report.shape)));
    }
    let wide = build_census(spec, window.max(report.n1 + 2))?;
    let z = derive_z(&wide, &report)?;
    let extension = build_periodic_extension(&wide, &report, &z, (2 * z.len()).max(window))?;
    let recolored = marked_recoloring(spec, &census, &report)?;
    let rc = build_census(&recolored, window)?;
    let b_psi: Vec<usize> = (0..=window).map(|n| rc.b(n)).collect();
    let alphabet_size = spec.alphabet.len();
    let g_size = report.g.len();
    let literal_holds = b_psi.iter().enumerate().all(|(n, &b)| b == n + alphabet_size + g_size);
    let offsets: BTreeSet<i64> = b_psi.iter().enumerate().skip(report.n1).map(|(n, &b)| b as i64 - n as i64).collect();
    let observed_offset = (offsets.len() == 1).then(|| *offsets.iter().next().unwrap());
    let gz_law_holds = b_psi.iter().enumerate().skip(report.n1).all(|(n, &b)| b == n + g_size + z.len());
    Ok(RoundTrip { z, extension, b_psi, alphabet_size, g_size, literal_holds, observed_offset, gz_law_holds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn report(spec: &QuotientSpec, n: usize) -> (BallCensus, StructureReport) {
        let c = build_census(spec, n).unwrap();
        let r = structure_report(spec, &c, || Ok(false)).unwrap();
        (c, r)
    }

    #[test]
    fn finite_parts() {
        let expect = [
            ("ex-basic(3)", 0, 0, 3, 2),
            ("ex-nonray", 0, 0, 3, 1),
            ("ex-n0eq1", 1, 1, 3, 2),
            ("ex-loops-n0eq1", 1, 1, 6, 4),
            ("ex-cycleG", 2, 2, 7, 4),
            ("ex-n0-ne-n1", 0, 1, 1, 0),
        ];
        for (f, (name, n0, n1, gsize, r)) in fixtures::bounded().into_iter().zip(expect) {
            assert_eq!(f.name, name);
            let (_, rep) = report(&f.spec, 12);
            assert_eq!((rep.n0, rep.n1, rep.g.len(), rep.r), (n0, n1, gsize, r), "{name}");
            assert_eq!(rep.shape, Shape::FinitePartPlusRay);
            assert_eq!(rep.bounded, Boundedness::Bounded);
        }
    }

    #[test]
    fn z_of_basic_is_a_loop_of_three() {
        let (c, rep) = report(&fixtures::ex_basic(3), 8);
        let z = derive_z(&c, &rep).unwrap();
        assert_eq!(z.topology, Topology::SingleVertex);
        assert_eq!(z.loops(), vec![(0, 3)]);
        assert_eq!(z.colors, vec!["a3".to_string()]);
    }

    #[test]
    fn z_of_n0_ne_n1_is_a_four_cycle() {
        let (c, rep) = report(&fixtures::ex_n0_ne_n1(), 8);
        let z = derive_z(&c, &rep).unwrap();
        assert_eq!(z.topology, Topology::Cycle(4));
        assert_eq!(z.index_multiset(), vec![(1, 2); 4]);
    }

    #[test]
    fn extension_of_basic_is_monochrome() {
        let (c, rep) = report(&fixtures::ex_basic(3), 8);
        let z = derive_z(&c, &rep).unwrap();
        let ext = build_periodic_extension(&c, &rep, &z, 6).unwrap();
        assert!(ext.b_extension.iter().all(|&b| b == 1));
    }

    #[test]
    fn psi_ball_has_regular_shape() {
        let (c, rep) = report(&fixtures::ex_n0_ne_n1(), 8);
        let z = derive_z(&c, &rep).unwrap();
        let b = psi_ball(&z, 0, 3).unwrap();
        assert_eq!(b.len() as u64, crate::ball::ball_size(3, 3));
    }
}
