//! Factor graphs on ball classes, the S/A/B/C markers, case labels and the
//! evolution of factor graphs along the radius.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::census::BallCensus;
use crate::error::{Error, Result};

/// Graph on the classes of one radius; an edge joins classes of adjacent vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorGraph {
    pub n: usize,
    pub size: usize,
    /// Unordered pairs `(i, j)` with `i <= j`; `(i, i)` is a self-loop.
    pub edges: BTreeSet<(usize, usize)>,
}

pub fn build_factor_graph(census: &BallCensus, n: usize) -> FactorGraph {
    let g = &census.graph;
    let mut edges = BTreeSet::new();
    for v in 0..g.len() {
        let Some(cv) = census.class_of(n, v) else { continue };
        for a in &g.adj[v] {
            if let Some(cw) = census.class_of(n, a.to as usize) {
                edges.insert((cv.min(cw), cv.max(cw)));
            }
        }
    }
    FactorGraph { n, size: census.b(n), edges }
}

impl FactorGraph {
    /// Distinct neighbors other than `i` itself.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == b {
                    None
                } else if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.neighbors(i).len()
    }

    pub fn has_self_loop(&self, i: usize) -> bool {
        self.edges.contains(&(i, i))
    }

    fn component_without(&self, start: usize, removed: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut q = VecDeque::from([start]);
        while let Some(v) = q.pop_front() {
            for w in self.neighbors(v) {
                if w != removed && seen.insert(w) {
                    q.push_back(w);
                }
            }
        }
        seen
    }

    /// A path (self-loops ignored).
    pub fn is_linear(&self) -> bool {
        let simple = self.edges.iter().filter(|(a, b)| a != b).count();
        self.size > 0
            && simple + 1 == self.size
            && (0..self.size).all(|i| self.degree(i) <= 2)
            && self.component_without(0, usize::MAX).len() == self.size
    }

    /// Whether `s` lies on a cycle of length at least three.
    pub fn on_cycle(&self, s: usize) -> bool {
        let nb = self.neighbors(s);
        for (k, &u) in nb.iter().enumerate() {
            let comp = self.component_without(u, s);
            if nb[k + 1..].iter().any(|w| comp.contains(w)) {
                return true;
            }
        }
        false
    }

    /// Number of vertices connected to `s` through `c`.
    pub fn beyond(&self, s: usize, c: usize) -> usize {
        if s == c {
            return 0;
        }
        self.component_without(c, s).len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.size).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// DOT rendering; `markers` and `label` are optional decorations.
    pub fn to_dot(&self, census: &BallCensus, markers: Option<&Markers>, label: Option<CaseLabel>) -> String {
        let mut s = format!("graph \"G_{}\" {{\n", self.n);
        let case = label.map_or("none".to_string(), |l| l.to_string());
        s.push_str(&format!("  label=\"n={} b={} case={case}\";\n  case=\"{case}\";\n", self.n, self.size));
        for (i, rec) in census.classes(self.n).iter().enumerate() {
            let mut marks = Vec::new();
            if let Some(m) = markers {
                for (name, v) in [("S", Some(m.s)), ("A", m.a), ("B", m.b), ("C", m.c)] {
                    if v == Some(i) {
                        marks.push(name);
                    }
                }
            }
            let shape = if marks.contains(&"S") { "doublecircle" } else { "circle" };
            s.push_str(&format!(
                "  c{i} [label=\"c{i}\", center=\"{}\", marker=\"{}\", shape={shape}];\n",
                rec.code.center_color(),
                marks.join(",")
            ));
        }
        for &(a, b) in &self.edges {
            s.push_str(&format!("  c{a} -- c{b};\n"));
        }
        s.push_str("}\n");
        s
    }
}

/// Adjacency relation between two classes of one radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Adjacency {
    pub weak: bool,
    /// Every witness of D has a neighbor of class E.
    pub d_to_e: bool,
    pub e_to_d: bool,
}

fn strongly(census: &BallCensus, n: usize, d: usize, e: usize) -> bool {
    let g = &census.graph;
    let mut any = false;
    for &w in &census.classes(n)[d].witnesses {
        let classes: Option<Vec<usize>> = g.adj[w].iter().map(|a| census.class_of(n, a.to as usize)).collect();
        // witnesses at the window edge are isometric to interior ones
        let Some(classes) = classes else { continue };
        any = true;
        if !classes.contains(&e) {
            return false;
        }
    }
    any
}

pub fn weak_strong_adjacency(census: &BallCensus, n: usize, d: usize, e: usize) -> Adjacency {
    let fg = build_factor_graph(census, n);
    Adjacency {
        weak: fg.edges.contains(&(d.min(e), d.max(e))),
        d_to_e: strongly(census, n, d, e),
        e_to_d: strongly(census, n, e, d),
    }
}

/// Number of `n`-balls of class `d` inside an `(n + 1)`-ball of class `e`
/// (center and neighbors of the center).
pub fn containment(census: &BallCensus, n: usize, e: usize, d: usize) -> Result<u64> {
    let rec = &census.classes(n + 1)[e];
    let x = rec.witnesses[0];
    let g = &census.graph;
    let mut count = u64::from(census.class_of(n, x) == Some(d));
    for a in &g.adj[x] {
        let c = census
            .class_of(n, a.to as usize)
            .ok_or_else(|| Error::Horizon(format!("neighbor of a radius-{} witness has no {n}-ball", n + 1)))?;
        if c == d {
            count += a.index as u64;
        }
    }
    Ok(count)
}

/// Class indices of the markers at one radius.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Markers {
    pub n: usize,
    pub s: usize,
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub c: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseLabel {
    Ia,
    Ib,
    Ic,
    II,
    III,
    PreK,
    NotApplicable,
}

impl CaseLabel {
    pub fn is_case_one(self) -> bool {
        matches!(self, CaseLabel::Ia | CaseLabel::Ib | CaseLabel::Ic)
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::Ia => "I-a",
            CaseLabel::Ib => "I-b",
            CaseLabel::Ic => "I-c",
            CaseLabel::II => "II",
            CaseLabel::III => "III",
            CaseLabel::PreK => "pre-K",
            CaseLabel::NotApplicable => "not-applicable",
        })
    }
}

/// How the first A/B pair was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedRule {
    /// `A_n = S_n = C_n` was found at this radius.
    Coincidence(usize),
    /// No coincidence in the window; `A` is the canonically smaller extension.
    Canonical,
}

impl fmt::Display for SeedRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedRule::Coincidence(n) => write!(f, "A=S=C at n={n}"),
            SeedRule::Canonical => f.write_str("canonically smaller extension (convention)"),
        }
    }
}

fn extensions_pair(census: &BallCensus, n: usize) -> Result<(usize, usize, usize)> {
    let s = census
        .unique_special(n)
        .ok_or_else(|| Error::Precondition(format!("no unique special ball with two extensions at n = {n}")))?;
    let e = &census.classes(n)[s].extensions;
    Ok((s, e[0], e[1]))
}

/// `(A_n, B_n)` for `n` in `n0 + 1 ..= hi`, index `n - n0 - 1`.
fn lineage(census: &BallCensus, n0: usize, hi: usize, swap_seed: bool) -> Result<Vec<(usize, usize)>> {
    let (_, e0, e1) = extensions_pair(census, n0)?;
    let mut out = vec![if swap_seed { (e1, e0) } else { (e0, e1) }];
    for n in n0 + 1..hi {
        let (a_n, _) = *out.last().unwrap();
        let (_, x, y) = extensions_pair(census, n)?;
        let (cx, cy) = (containment(census, n, x, a_n)?, containment(census, n, y, a_n)?);
        if cx == cy {
            return Err(Error::Ambiguity { n: n + 1, count: cx });
        }
        out.push(if cx > cy { (x, y) } else { (y, x) });
    }
    Ok(out)
}

/// The S/A/B/C markers over `n0 + 1 ..= hi` with the seed convention applied.
pub fn identify_sabc(census: &BallCensus, n0: usize, hi: usize) -> Result<(Vec<Markers>, SeedRule)> {
    if hi + 1 > census.max_n {
        return Err(Error::Precondition(format!(
            "markers up to n = {hi} need a census up to radius {}",
            hi + 1
        )));
    }
    let specials: Vec<usize> = (n0..=hi + 1)
        .map(|n| extensions_pair(census, n).map(|p| p.0))
        .collect::<Result<_>>()?;
    let restriction = |n: usize| census.classes(n + 1)[specials[n + 1 - n0]].restriction.unwrap();
    let build = |lin: &[(usize, usize)]| -> Vec<Markers> {
        (n0 + 1..=hi)
            .map(|n| {
                let (a, b) = lin[n - n0 - 1];
                Markers { n, s: specials[n - n0], a: Some(a), b: Some(b), c: Some(restriction(n)) }
            })
            .collect()
    };
    let first = build(&lineage(census, n0, hi, false)?);
    let hit = first
        .iter()
        .find(|m| Some(m.s) == m.c && (Some(m.s) == m.a || Some(m.s) == m.b))
        .map(|m| (m.n, Some(m.s) == m.a));
    match hit {
        None => Ok((first, SeedRule::Canonical)),
        Some((at, true)) => Ok((first, SeedRule::Coincidence(at))),
        Some((at, false)) => {
            let second = build(&lineage(census, n0, hi, true)?);
            if second[at - n0 - 1].a != Some(second[at - n0 - 1].s) {
                return Err(Error::Inconsistency(format!("no seed makes A = S = C at n = {at}")));
            }
            Ok((second, SeedRule::Coincidence(at)))
        }
    }
}

/// Case label of one radius at or after `K`.
pub fn classify_case(m: &Markers) -> CaseLabel {
    let (s, a, b, c) = (Some(m.s), m.a, m.b, m.c);
    let s_ext = s == a || s == b;
    let c_ext = c == a || c == b;
    if s == c {
        if s_ext {
            CaseLabel::NotApplicable
        } else {
            CaseLabel::III
        }
    } else {
        match (s_ext, c_ext) {
            (false, false) => CaseLabel::II,
            (false, true) => CaseLabel::Ia,
            (true, false) => CaseLabel::Ib,
            (true, true) => CaseLabel::Ic,
        }
    }
}

/// Degree claims attached to a case label.
pub fn check_case_structure(label: CaseLabel, m: &Markers, fg: &FactorGraph) -> Result<()> {
    match label {
        CaseLabel::II if fg.degree(m.s) != 3 => Err(Error::Inconsistency(format!(
            "case II at n = {} but S has degree {}",
            m.n,
            fg.degree(m.s)
        ))),
        l if (l.is_case_one() || l == CaseLabel::III) && (!fg.is_linear() || fg.degree(m.s) > 2) => {
            Err(Error::Inconsistency(format!(
                "case {l} at n = {} but the factor graph is not linear (S degree {}, max degree {})",
                m.n,
                fg.degree(m.s),
                fg.max_degree()
            )))
        }
        _ => Ok(()),
    }
}

#[derive(Debug, Clone)]
pub struct EvolutionTrace {
    pub n_lo: usize,
    pub n_hi: usize,
    pub n0: usize,
    pub labels: Vec<(usize, CaseLabel)>,
    pub markers: Vec<Markers>,
    /// Radii labeled case I.
    pub n_k: Vec<usize>,
    /// Case I radii together with pre-K radii.
    pub block_ends: Vec<usize>,
    /// First radius after N0 where A, S, C are not all equal.
    pub k: Option<usize>,
    pub seed: SeedRule,
    pub self_loop_radii: Vec<usize>,
    /// Number of vertices beyond C at each case I radius.
    pub beyond_c: Vec<(usize, usize)>,
}

impl EvolutionTrace {
    pub fn label(&self, n: usize) -> Option<CaseLabel> {
        self.labels.iter().find(|(m, _)| *m == n).map(|(_, l)| *l)
    }

    /// Smallest block end `>= n`.
    pub fn block_end(&self, n: usize) -> Option<usize> {
        self.block_ends.iter().copied().find(|&e| e >= n)
    }
}

/// Labels `n_lo ..= n_hi`. With `discipline`, also checks the structural claims
/// of each case and the allowed transitions between cases.
pub fn evolve(census: &BallCensus, n_lo: usize, n_hi: usize, discipline: bool) -> Result<EvolutionTrace> {
    let prof = census.profile();
    let n0 = prof
        .n0
        .ok_or_else(|| Error::Precondition("no unit-increment window; not quasi-Sturmian over the window".into()))?;
    for n in n0..=n_hi.min(census.max_n) {
        census.special_balls_checked(n, Some(n0))?;
    }
    let hi = n_hi.max(n0 + 1);
    let (markers, seed) = identify_sabc(census, n0, hi)?;
    let k = markers.iter().find(|m| !(m.a == Some(m.s) && m.c == Some(m.s))).map(|m| m.n);

    let mut labels = Vec::new();
    let mut self_loop_radii = Vec::new();
    let mut beyond_c = Vec::new();
    for n in n_lo..=n_hi {
        if n <= n0 {
            labels.push((n, CaseLabel::NotApplicable));
            continue;
        }
        let m = &markers[n - n0 - 1];
        let fg = build_factor_graph(census, n);
        if fg.has_self_loop(m.s) {
            self_loop_radii.push(n);
        }
        let label = if k.is_none_or(|k| n < k) { CaseLabel::PreK } else { classify_case(m) };
        if discipline {
            check_case_structure(label, m, &fg)?;
            if label == CaseLabel::NotApplicable {
                return Err(Error::Inconsistency(format!("A, S, C coincide again at n = {n} after K")));
            }
        }
        if label.is_case_one() {
            beyond_c.push((n, fg.beyond(m.s, m.c.unwrap())));
        }
        labels.push((n, label));
    }
    let n_k: Vec<usize> = labels.iter().filter(|(_, l)| l.is_case_one()).map(|(n, _)| *n).collect();
    let block_ends = labels
        .iter()
        .filter(|(_, l)| l.is_case_one() || *l == CaseLabel::PreK)
        .map(|(n, _)| *n)
        .collect();
    let trace = EvolutionTrace {
        n_lo,
        n_hi,
        n0,
        labels,
        markers: markers.into_iter().filter(|m| m.n >= n_lo && m.n <= n_hi).collect(),
        n_k,
        block_ends,
        k,
        seed,
        self_loop_radii,
        beyond_c,
    };
    if discipline {
        check_discipline(&trace)?;
    }
    Ok(trace)
}

/// Transition rules between consecutive labels.
pub fn check_discipline(t: &EvolutionTrace) -> Result<()> {
    let at = |n: usize| t.label(n);
    let bad = |n: usize, why: String| Err(Error::Inconsistency(format!("evolution pattern violated at n = {n}: {why}")));
    for &(n, m) in &t.beyond_c {
        for j in 1..m {
            if let Some(l) = at(n + j) {
                if l != CaseLabel::II {
                    return bad(n + j, format!("expected II ({} of {} after case I at {n}), got {l}", j, m - 1));
                }
            }
        }
        if m >= 1 {
            if let Some(l) = at(n + m) {
                if !(l.is_case_one() || l == CaseLabel::III) {
                    return bad(n + m, format!("expected case I or III, got {l}"));
                }
                if l == CaseLabel::III {
                    if let Some(next) = at(n + m + 1) {
                        if next != CaseLabel::Ib {
                            return bad(n + m + 1, format!("case III must be followed by I-b, got {next}"));
                        }
                    }
                }
            }
        }
    }
    for &(n, l) in &t.labels {
        if l == CaseLabel::Ic && Some(n) != t.k {
            return bad(n, "case I-c away from K".into());
        }
        if l == CaseLabel::II {
            let covered = t.beyond_c.iter().any(|&(s, m)| n > s && n < s + m);
            let opens_window = t.labels.iter().all(|&(p, pl)| p >= n || !pl.is_case_one());
            if !covered && !opens_window {
                return bad(n, "case II outside a run started by case I".into());
            }
        }
    }
    Ok(())
}

/// First radius in `(N0, window]` whose factor graph has a cycle through `S_n`,
/// ignoring self-loops, and the radii where `S_n` carries a self-loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicVerdict {
    pub first_cycle: Option<usize>,
    pub self_loop_radii: Vec<usize>,
    pub window: usize,
}

impl CyclicVerdict {
    pub fn is_cyclic(&self) -> bool {
        self.first_cycle.is_some()
    }
}

pub fn detect_cyclic(census: &BallCensus, window: usize) -> Result<CyclicVerdict> {
    let n0 = census
        .profile()
        .n0
        .ok_or_else(|| Error::Precondition("not quasi-Sturmian over the window".into()))?;
    let window = window.min(census.max_n);
    let mut first_cycle = None;
    let mut self_loop_radii = Vec::new();
    for n in n0 + 1..=window {
        let Some(s) = census.unique_special(n) else { continue };
        let fg = build_factor_graph(census, n);
        if fg.has_self_loop(s) {
            self_loop_radii.push(n);
        }
        if first_cycle.is_none() && fg.on_cycle(s) {
            first_cycle = Some(n);
        }
    }
    Ok(CyclicVerdict { first_cycle, self_loop_radii, window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::census::build_census;
    use crate::fixtures;

    #[test]
    fn monochrome_factor_graph_is_a_loop() {
        let c = build_census(&fixtures::mono(3), 3).unwrap();
        let fg = build_factor_graph(&c, 2);
        assert_eq!(fg.size, 1);
        assert!(fg.has_self_loop(0));
        let adj = weak_strong_adjacency(&c, 2, 0, 0);
        assert!(adj.weak && adj.d_to_e && adj.e_to_d);
        assert!(detect_cyclic(&c, 3).is_err());
    }

    #[test]
    fn basic_point_graph_is_a_path_with_loop_at_the_end() {
        let c = build_census(&fixtures::ex_basic(3), 3).unwrap();
        let fg = build_factor_graph(&c, 0);
        assert!(fg.is_linear());
        // a1 - a2 - a3 with a self-loop at a3
        assert_eq!(fg.edges, BTreeSet::from([(0, 1), (1, 2), (2, 2)]));
    }

    #[test]
    fn n0eq1_radius_two_is_linear() {
        let c = build_census(&fixtures::ex_n0eq1(), 4).unwrap();
        let fg = build_factor_graph(&c, 2);
        assert_eq!(fg.size, 6);
        assert!(fg.is_linear());
    }

    #[test]
    fn n0eq1_alternates_between_one_and_two() {
        let c = build_census(&fixtures::ex_n0eq1(), 14).unwrap();
        let t = evolve(&c, 2, 12, true).unwrap();
        for (n, l) in &t.labels {
            if n % 2 == 0 {
                assert_eq!(*l, CaseLabel::Ia, "n = {n}");
            } else {
                assert_eq!(*l, CaseLabel::II, "n = {n}");
            }
        }
        assert_eq!(t.k, Some(2));
    }

    #[test]
    fn n0_ne_n1_is_cyclic_and_basic_is_not() {
        let c = build_census(&fixtures::ex_n0_ne_n1(), 10).unwrap();
        assert!(detect_cyclic(&c, 10).unwrap().is_cyclic());
        let c = build_census(&fixtures::ex_basic(3), 10).unwrap();
        assert!(!detect_cyclic(&c, 10).unwrap().is_cyclic());
    }

    #[test]
    fn lineage_counts_never_tie() {
        for f in fixtures::bounded() {
            let c = build_census(&f.spec, 12).unwrap();
            let n0 = c.profile().n0.unwrap();
            let (ms, _) = identify_sabc(&c, n0, 10).unwrap();
            for m in &ms {
                // markers restrict coherently
                let s_prev = c.unique_special(m.n - 1).unwrap();
                assert_eq!(c.classes(m.n)[m.a.unwrap()].restriction, Some(s_prev));
                assert_eq!(c.classes(m.n)[m.b.unwrap()].restriction, Some(s_prev));
                let s_next = c.unique_special(m.n + 1).unwrap();
                assert_eq!(c.classes(m.n + 1)[s_next].restriction, m.c);
                if m.n < 10 {
                    let next = ms.iter().find(|x| x.n == m.n + 1).unwrap();
                    let ca = containment(&c, m.n, next.a.unwrap(), m.a.unwrap()).unwrap();
                    let cb = containment(&c, m.n, next.b.unwrap(), m.a.unwrap()).unwrap();
                    assert!(ca > cb, "{} n = {}", f.name, m.n);
                }
            }
        }
    }
}
