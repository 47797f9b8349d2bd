//! Ball classes per radius, factor complexity, special balls and type sets.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::code::{interner, BallCode, NodeId};
use crate::error::{Error, Result};
use crate::quotient::{ExpandedGraph, Origin, QuotientSpec};

/// Environment variable adding extra tail occurrences to every horizon.
pub const HORIZON_SLACK_VAR: &str = "QSTREE_HORIZON_SLACK";

/// Extra horizon requested through [`HORIZON_SLACK_VAR`].
pub fn horizon_slack() -> usize {
    std::env::var(HORIZON_SLACK_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(0)
}

/// Largest distance inside the finite part from any tail attachment vertex.
pub fn attach_eccentricity(spec: &QuotientSpec) -> usize {
    let g = match spec.expand(0) {
        Ok(g) => g,
        Err(_) => return spec.vertices.len(),
    };
    spec.tails
        .iter()
        .filter_map(|t| spec.vertex_index(&t.attach))
        .map(|a| {
            g.distances(a)
                .iter()
                .enumerate()
                .filter(|(v, _)| matches!(g.vertices[*v].origin, Origin::Finite { .. }))
                .map(|(_, &d)| d)
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

/// Number of tail occurrences materialized for a census up to radius `radius`.
///
/// An `n`-ball at tail position `j >= n` only sees tail templates, so its class
/// depends on `j mod p`. Positions up to `radius + 2p` must therefore carry
/// valid `radius`-balls, which needs `radius` further occurrences beyond them.
pub fn default_horizon(spec: &QuotientSpec, radius: usize) -> usize {
    let ecc = attach_eccentricity(spec);
    let p = spec.tails.iter().map(|t| t.period().unwrap_or(4)).max().unwrap_or(0);
    if spec.tails.is_empty() {
        return 0;
    }
    let base = ecc + 2 * radius + 2 * p + 1 + horizon_slack();
    if spec.all_tails_periodic() {
        base
    } else {
        base + 2 * radius + 8
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    pub parallel: bool,
    /// Overrides the default horizon.
    pub horizon: Option<usize>,
    /// Recompute at twice the horizon and require identical `b(n)`
    /// (always done for substitution tails).
    pub double_check: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions { parallel: true, horizon: None, double_check: false }
    }
}

/// One ball class at a fixed radius.
#[derive(Debug, Clone)]
pub struct ClassRecord {
    pub code: BallCode,
    /// Materialized vertices whose ball has this class, ascending.
    pub witnesses: Vec<usize>,
    /// Classes at the next radius restricting to this one.
    pub extensions: Vec<usize>,
    /// Class at the previous radius.
    pub restriction: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct Level {
    pub classes: Vec<ClassRecord>,
    index: HashMap<BallCode, usize>,
}

impl Level {
    pub fn position(&self, code: BallCode) -> Option<usize> {
        self.index.get(&code).copied()
    }
}

/// Ball classes at radii `0..=max_n`, plus radius `max_n + 1` for extensions.
#[derive(Debug, Clone)]
pub struct BallCensus {
    pub max_n: usize,
    pub horizon: usize,
    pub graph: ExpandedGraph,
    /// Tail periods (None for substitution tails).
    pub periods: Vec<Option<usize>>,
    codes: Vec<Vec<Option<BallCode>>>,
    class_of: Vec<Vec<Option<u32>>>,
    levels: Vec<Level>,
}

/// Computes `codes[r][v]` for `r <= max_r` by dynamic programming over
/// (vertex, entering edge, depth). `None` marks balls that need vertices
/// beyond the materialized window.
fn code_table(g: &ExpandedGraph, max_r: usize, parallel: bool) -> Vec<Vec<Option<NodeId>>> {
    let it = interner();
    let nv = g.len();
    let leaf: Vec<NodeId> = (0..nv).map(|v| it.intern(g.color_name(v), Vec::new())).collect();
    let mut roots: Vec<Vec<Option<NodeId>>> = vec![leaf.iter().map(|&x| Some(x)).collect()];
    let mut limbs: Vec<Vec<Option<NodeId>>> = (0..nv).map(|v| vec![Some(leaf[v]); g.adj[v].len()]).collect();

    let step = |v: usize, limbs: &Vec<Vec<Option<NodeId>>>, want_limbs: bool| -> (Option<NodeId>, Vec<Option<NodeId>>) {
        let arcs = &g.adj[v];
        if !g.vertices[v].complete {
            return (None, vec![None; arcs.len()]);
        }
        let sub: Option<Vec<NodeId>> = arcs
            .iter()
            .enumerate()
            .map(|(k, a)| limbs[a.to as usize][g.rev[v][k] as usize])
            .collect();
        let Some(sub) = sub else {
            return (None, vec![None; arcs.len()]);
        };
        let color = g.color_name(v);
        let gather = |skip: Option<usize>| {
            let mut kids = Vec::with_capacity(g.degree as usize);
            for (k, a) in arcs.iter().enumerate() {
                let n = a.index - u32::from(Some(k) == skip);
                kids.extend(std::iter::repeat_n(sub[k], n as usize));
            }
            it.intern(color, kids)
        };
        let root = gather(None);
        let next = if want_limbs { (0..arcs.len()).map(|k| Some(gather(Some(k)))).collect() } else { Vec::new() };
        (Some(root), next)
    };

    for r in 1..=max_r {
        let want = r < max_r;
        let out: Vec<(Option<NodeId>, Vec<Option<NodeId>>)> = if parallel {
            (0..nv).into_par_iter().map(|v| step(v, &limbs, want)).collect()
        } else {
            (0..nv).map(|v| step(v, &limbs, want)).collect()
        };
        let mut row = Vec::with_capacity(nv);
        let mut next = Vec::with_capacity(nv);
        for (root, l) in out {
            row.push(root);
            next.push(l);
        }
        roots.push(row);
        if want {
            limbs = next;
        }
    }
    roots
}

impl BallCensus {
    /// Builds the census directly on a materialized graph. Radius `max_n + 1` is
    /// also computed so that extensions of every class up to `max_n` are known.
    pub fn on_graph(graph: ExpandedGraph, max_n: usize, horizon: usize, periods: Vec<Option<usize>>, parallel: bool) -> Result<BallCensus> {
        let table = code_table(&graph, max_n + 1, parallel);
        let codes: Vec<Vec<Option<BallCode>>> =
            table.into_iter().map(|row| row.into_iter().map(|c| c.map(BallCode)).collect()).collect();
        let mut levels = Vec::with_capacity(codes.len());
        let mut class_of = Vec::with_capacity(codes.len());
        for row in &codes {
            let mut by: BTreeMap<BallCode, Vec<usize>> = BTreeMap::new();
            for (v, c) in row.iter().enumerate() {
                if let Some(c) = c {
                    by.entry(*c).or_default().push(v);
                }
            }
            let mut level = Level::default();
            let mut of = vec![None; row.len()];
            for (i, (code, witnesses)) in by.into_iter().enumerate() {
                for &w in &witnesses {
                    of[w] = Some(i as u32);
                }
                level.index.insert(code, i);
                level.classes.push(ClassRecord { code, witnesses, extensions: Vec::new(), restriction: None });
            }
            levels.push(level);
            class_of.push(of);
        }
        for r in 1..levels.len() {
            let mut ext: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); levels[r - 1].classes.len()];
            for (v, c) in class_of[r].iter().enumerate() {
                if let Some(c) = c {
                    let below = class_of[r - 1][v].expect("valid ball has a valid restriction") as usize;
                    ext[below].insert(*c as usize);
                    levels[r].classes[*c as usize].restriction = Some(below);
                }
            }
            for (i, e) in ext.into_iter().enumerate() {
                if e.is_empty() {
                    return Err(Error::Horizon(format!(
                        "class {i} at radius {} has no materialized extension; widen the horizon",
                        r - 1
                    )));
                }
                levels[r - 1].classes[i].extensions = e.into_iter().collect();
            }
        }
        Ok(BallCensus { max_n, horizon, graph, periods, codes, class_of, levels })
    }

    pub fn radius_count(&self) -> usize {
        self.levels.len()
    }

    /// Number of ball classes at radius `n`.
    pub fn b(&self, n: usize) -> usize {
        self.levels[n].classes.len()
    }

    pub fn level(&self, n: usize) -> &Level {
        &self.levels[n]
    }

    pub fn classes(&self, n: usize) -> &[ClassRecord] {
        &self.levels[n].classes
    }

    pub fn code(&self, n: usize, v: usize) -> Option<BallCode> {
        self.codes[n][v]
    }

    pub fn class_of(&self, n: usize, v: usize) -> Option<usize> {
        self.class_of[n][v].map(|c| c as usize)
    }

    pub fn profile(&self) -> ComplexityProfile {
        complexity_profile(self)
    }

    /// Classes at radius `n <= max_n` with at least two extensions.
    pub fn special_balls(&self, n: usize) -> Vec<(usize, usize)> {
        assert!(n < self.levels.len() - 1, "special balls need radius n + 1");
        self.levels[n]
            .classes
            .iter()
            .enumerate()
            .filter(|(_, c)| c.extensions.len() >= 2)
            .map(|(i, c)| (i, c.extensions.len()))
            .collect()
    }

    /// The unique special class at `n`, if there is exactly one with exactly two extensions.
    pub fn unique_special(&self, n: usize) -> Option<usize> {
        match self.special_balls(n).as_slice() {
            [(s, 2)] => Some(*s),
            _ => None,
        }
    }

    /// Special balls with the uniqueness check for `n >= n0`.
    pub fn special_balls_checked(&self, n: usize, n0: Option<usize>) -> Result<Vec<(usize, usize)>> {
        let sp = self.special_balls(n);
        if let Some(n0) = n0 {
            if n >= n0 && (sp.len() != 1 || sp[0].1 != 2) {
                return Err(Error::Inconsistency(format!(
                    "radius {n} >= N0 = {n0} has {} special balls with extension counts {:?}",
                    sp.len(),
                    sp.iter().map(|s| s.1).collect::<Vec<_>>()
                )));
            }
        }
        Ok(sp)
    }

    /// Vertices whose balls are known at every radius up to `max_n`.
    pub fn observed(&self) -> Vec<usize> {
        (0..self.graph.len()).filter(|&v| self.codes[self.max_n][v].is_some()).collect()
    }

    /// Type sets of the observed vertices.
    pub fn type_sets(&self) -> Vec<TypeSet> {
        let special: Vec<Vec<bool>> = (0..=self.max_n)
            .map(|n| self.levels[n].classes.iter().map(|c| c.extensions.len() >= 2).collect())
            .collect();
        self.observed()
            .into_iter()
            .map(|v| {
                let members: Vec<usize> =
                    (0..=self.max_n).filter(|&n| special[n][self.class_of(n, v).unwrap()]).collect();
                let tau = members.last().map_or(-1, |&m| m as i64);
                let on_tail = !matches!(self.graph.vertices[v].origin, Origin::Finite { .. });
                let censored = members.last() == Some(&self.max_n) || (members.is_empty() && on_tail);
                TypeSet { vertex: v, members, tau, censored }
            })
            .collect()
    }

    /// Observed vertex pairs with identical balls at every radius that are not
    /// occurrences of the same periodic template.
    pub fn indistinguishable_pairs(&self) -> Vec<(usize, usize)> {
        let obs = self.observed();
        let mut by: BTreeMap<BallCode, Vec<usize>> = BTreeMap::new();
        for &v in &obs {
            by.entry(self.codes[self.max_n][v].unwrap()).or_default().push(v);
        }
        let mut out = Vec::new();
        for vs in by.values() {
            for (i, &a) in vs.iter().enumerate() {
                for &b in &vs[i + 1..] {
                    if !self.same_template_class(a, b) {
                        out.push((a, b));
                    }
                }
            }
        }
        out
    }

    fn same_template_class(&self, a: usize, b: usize) -> bool {
        match (self.graph.vertices[a].origin, self.graph.vertices[b].origin) {
            (
                Origin::Tail { tail: ta, template: pa, .. },
                Origin::Tail { tail: tb, template: pb, .. },
            ) => ta == tb && pa == pb,
            (Origin::Word { .. }, Origin::Word { .. }) => true,
            _ => false,
        }
    }
}

/// Census of a spec with the default horizon.
pub fn build_census(spec: &QuotientSpec, max_n: usize) -> Result<BallCensus> {
    build_census_with(spec, max_n, CensusOptions::default())
}

pub fn build_census_with(spec: &QuotientSpec, max_n: usize, opts: CensusOptions) -> Result<BallCensus> {
    let h = opts.horizon.unwrap_or_else(|| default_horizon(spec, max_n + 1));
    let periods = spec.tails.iter().map(|t| t.period()).collect();
    let census = BallCensus::on_graph(spec.expand(h)?, max_n, h, periods, opts.parallel)?;
    if spec.has_tails() && (opts.double_check || !spec.all_tails_periodic()) {
        let h2 = 2 * h.max(1);
        let wide = BallCensus::on_graph(spec.expand(h2)?, max_n, h2, census.periods.clone(), opts.parallel)?;
        for n in 0..=max_n + 1 {
            if census.b(n) != wide.b(n) {
                return Err(Error::HorizonUnstable { n, h, h2, at_h: census.b(n), at_2h: wide.b(n) });
            }
        }
    }
    Ok(census)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    QuasiSturmian,
    PeriodicLike,
    Other,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::QuasiSturmian => "quasi-sturmian-up-to-N",
            Verdict::PeriodicLike => "periodic-like",
            Verdict::Other => "other",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityProfile {
    /// `b(n)` for `0..=N`.
    pub b: Vec<usize>,
    /// Smallest `n0` with unit increments over the observed window.
    pub n0: Option<usize>,
    pub c: Option<i64>,
    pub verdict: Verdict,
}

pub fn complexity_profile(census: &BallCensus) -> ComplexityProfile {
    let big_n = census.max_n;
    let b: Vec<usize> = (0..=big_n).map(|n| census.b(n)).collect();
    let mut n0 = None;
    for start in (0..big_n).rev() {
        if b[start + 1] == b[start] + 1 {
            n0 = Some(start);
        } else {
            break;
        }
    }
    let c = n0.map(|n0| b[n0] as i64 - n0 as i64);
    let verdict = if n0.is_some() {
        Verdict::QuasiSturmian
    } else if big_n == 0 || b[big_n] == b[big_n - 1] {
        Verdict::PeriodicLike
    } else {
        Verdict::Other
    };
    ComplexityProfile { b, n0, c, verdict }
}

/// Radii at which a vertex's ball is special, and their maximum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeSet {
    pub vertex: usize,
    pub members: Vec<usize>,
    /// Maximal type, `-1` when the set is empty.
    pub tau: i64,
    /// The window cannot exclude larger members.
    pub censored: bool,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn monochrome_is_constant() {
        let c = build_census(&fixtures::mono(3), 6).unwrap();
        for n in 0..=6 {
            assert_eq!(c.b(n), 1);
            assert!(c.special_balls(n).is_empty());
        }
        let p = c.profile();
        assert_eq!(p.verdict, Verdict::PeriodicLike);
        assert_eq!(p.n0, None);
        assert!(c.type_sets().iter().all(|t| t.members.is_empty() && t.tau == -1));
    }

    #[test]
    fn increment_law_and_surjectivity() {
        for f in fixtures::bounded() {
            let c = build_census(&f.spec, 8).unwrap();
            for n in 0..=8 {
                let s: usize = c.special_balls(n).iter().map(|(_, e)| e - 1).sum();
                assert_eq!(s, c.b(n + 1) - c.b(n), "{} at {n}", f.name);
            }
            for n in 1..=9 {
                assert!(c.classes(n).iter().all(|k| k.restriction.is_some()));
            }
        }
    }

    #[test]
    fn cycle_g_point_special_has_three_extensions() {
        let c = build_census(&fixtures::ex_cycle_g(), 4).unwrap();
        let sp = c.special_balls(0);
        let extra: usize = sp.iter().map(|(_, e)| e - 1).sum();
        assert_eq!(extra, 2);
        assert_eq!(sp.len(), 1);
        assert_eq!(sp[0].1, 3);
        assert_eq!(&*c.classes(0)[sp[0].0].code.center_color(), "x");
    }

    #[test]
    fn serial_matches_parallel() {
        let spec = fixtures::ex_n0eq1();
        let a = build_census_with(&spec, 8, CensusOptions { parallel: false, ..Default::default() }).unwrap();
        let b = build_census_with(&spec, 8, CensusOptions { parallel: true, ..Default::default() }).unwrap();
        for n in 0..=9 {
            let sa: Vec<String> = a.classes(n).iter().map(|k| k.code.canonical_string()).collect();
            let sb: Vec<String> = b.classes(n).iter().map(|k| k.code.canonical_string()).collect();
            assert_eq!(sa, sb);
        }
    }
}
