//! Recurrence functions `R''` and `R`, their closed-form predictions, and the
//! uniform-recurrence probe.
//!
//! The `m`-ball about a lift of `x` contains exactly the `n`-balls of the lifts
//! of quotient vertices within distance `m - n` of `x`, so both functions reduce
//! to breadth-first searches in the quotient.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::ball::{interior_classes, unfold_ball};
use crate::census::{build_census, build_census_with, default_horizon, BallCensus, CensusOptions, Verdict};
use crate::error::{Error, Result};
use crate::factor_graph::{evolve, EvolutionTrace};
use crate::quotient::{Origin, QuotientSpec};
use crate::structure::{derive_z, structure_report, Boundedness, StructureReport, Topology};

/// Result of growing a quotient ball about one center.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reach {
    /// Every class is seen within distance `k`.
    Covered { k: usize },
    /// The search left the materialized window at distance `k` having seen `covered` classes.
    Open { k: usize, covered: usize },
    /// Distance `max_k` reached having seen `covered` classes.
    Short { covered: usize },
}

/// Smallest `k` such that the vertices within distance `k` of `x` realize every `n`-class.
pub fn coverage_radius(census: &BallCensus, n: usize, x: usize, max_k: usize) -> Reach {
    let g = &census.graph;
    let total = census.b(n);
    let mut seen = vec![false; total];
    let mut covered = 0;
    let mut dist = vec![usize::MAX; g.len()];
    let mut layer = vec![x];
    dist[x] = 0;
    for k in 0..=max_k {
        for &v in &layer {
            match census.class_of(n, v) {
                Some(c) if !seen[c] => {
                    seen[c] = true;
                    covered += 1;
                }
                Some(_) => {}
                None => return Reach::Open { k, covered },
            }
        }
        if covered == total {
            return Reach::Covered { k };
        }
        let mut next = Vec::new();
        for &v in &layer {
            for a in &g.adj[v] {
                let w = a.to as usize;
                if dist[w] == usize::MAX {
                    dist[w] = k + 1;
                    next.push(w);
                }
            }
        }
        layer = next;
    }
    Reach::Short { covered }
}

/// `R''(n)` together with a center realizing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rpp {
    pub n: usize,
    pub value: usize,
    pub center: usize,
}

pub fn default_cap(census: &BallCensus, n: usize) -> usize {
    n + census.b(n) + 4
}

/// `R''(n)`: the least `m <= cap` such that some `m`-ball contains every `n`-ball.
/// Centers whose search leaves the window are skipped.
pub fn recurrence_rpp(census: &BallCensus, n: usize, cap: usize) -> Result<Rpp> {
    if n > census.max_n {
        return Err(Error::Precondition(format!("census stops at radius {}", census.max_n)));
    }
    if cap < n {
        return Err(Error::Precondition(format!("cap {cap} is below n = {n}")));
    }
    let reach: Vec<(usize, Reach)> = (0..census.graph.len())
        .into_par_iter()
        .map(|x| (x, coverage_radius(census, n, x, cap - n)))
        .collect();
    let best = reach
        .iter()
        .filter_map(|&(x, r)| match r {
            Reach::Covered { k } => Some((k, x)),
            _ => None,
        })
        .min();
    match best {
        Some((k, x)) => Ok(Rpp { n, value: n + k, center: x }),
        None => {
            let covered = reach
                .iter()
                .map(|(_, r)| match *r {
                    Reach::Covered { .. } => census.b(n),
                    Reach::Open { covered, .. } | Reach::Short { covered } => covered,
                })
                .max()
                .unwrap_or(0);
            Err(Error::CapExceeded { n, cap, covered, total: census.b(n) })
        }
    }
}

/// Checks a coverage witness against an explicitly unfolded ball: the interior
/// `n`-classes of the `m`-ball about `center` must be exactly the census classes.
pub fn verify_witness(census: &BallCensus, n: usize, center: usize, m: usize) -> Result<bool> {
    let ball = unfold_ball(&census.graph, center, m)?;
    let got: BTreeSet<_> = interior_classes(&ball, n)?.into_keys().collect();
    let want: BTreeSet<_> = census.classes(n).iter().map(|c| c.code).collect();
    Ok(got == want)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RValue {
    Attained(usize),
    /// Class `missing` never occurs at tail positions `>= n` of periodic tail `tail`,
    /// so balls far out on that tail miss it at every radius.
    NotAttained { missing: usize, tail: usize },
    /// Maximum over the centers inside the window; the tail is aperiodic.
    WindowLimited(usize),
}

impl fmt::Display for RValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RValue::Attained(m) => write!(f, "{m}"),
            RValue::NotAttained { .. } => f.write_str("not-attained"),
            RValue::WindowLimited(m) => write!(f, "{m}"),
        }
    }
}

fn tail_vertices(census: &BallCensus, t: usize) -> Vec<usize> {
    let mut v: Vec<(usize, usize)> = (0..census.graph.len())
        .filter_map(|v| match census.graph.vertices[v].origin {
            Origin::Tail { tail, position, .. } if tail == t => Some((position, v)),
            _ => None,
        })
        .collect();
    v.sort();
    v.into_iter().map(|(_, v)| v).collect()
}

/// `R(n)`: the least `m` such that every `m`-ball contains every `n`-ball.
pub fn recurrence_r(census: &BallCensus, n: usize, cap: usize) -> Result<RValue> {
    if n > census.max_n {
        return Err(Error::Precondition(format!("census stops at radius {}", census.max_n)));
    }
    // From position n on, the n-ball of a periodic tail vertex sees only the tail.
    for (t, p) in census.periods.iter().enumerate() {
        let Some(p) = *p else { continue };
        let seq = tail_vertices(census, t);
        if seq.len() < n + p {
            return Err(Error::Horizon(format!("tail {t} is too short for the recurrence proof at n = {n}")));
        }
        let mut present = vec![false; census.b(n)];
        for &v in &seq[n..n + p] {
            let c = census
                .class_of(n, v)
                .ok_or_else(|| Error::Horizon(format!("tail {t} position lacks an {n}-ball")))?;
            present[c] = true;
        }
        if let Some(missing) = present.iter().position(|&x| !x) {
            return Ok(RValue::NotAttained { missing, tail: t });
        }
    }
    let reach: Vec<Reach> =
        (0..census.graph.len()).into_par_iter().map(|x| coverage_radius(census, n, x, cap - n)).collect();
    let mut worst = 0;
    for r in &reach {
        match *r {
            Reach::Covered { k } => worst = worst.max(k),
            Reach::Open { .. } => {}
            Reach::Short { covered } => {
                return Err(Error::CapExceeded { n, cap, covered, total: census.b(n) });
            }
        }
    }
    let value = n + worst;
    if census.periods.iter().any(|p| p.is_none()) {
        Ok(RValue::WindowLimited(value))
    } else {
        Ok(RValue::Attained(value))
    }
}

/// True when `R(n)` is attained for every `n <= window`.
pub fn uniform_recurrence_probe(census: &BallCensus, window: usize) -> Result<bool> {
    for n in 0..=window.min(census.max_n) {
        if let RValue::NotAttained { .. } = recurrence_r(census, n, default_cap(census, n))? {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Predictions

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Branch {
    /// Unbounded type.
    One,
    /// Bounded type, acyclic `Z`.
    TwoA,
    /// Bounded type, `Z` a cycle.
    TwoB,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Branch::One => "(1)",
            Branch::TwoA => "(2a)",
            Branch::TwoB => "(2b)",
        })
    }
}

/// Closed forms for `R''(n)`. `b` is `b(n_k)` for branches (1)/(2a) and `b(n)` for (2b);
/// `r` is the largest distance from `x_{N1}` to the finite part.
pub fn rpp_formula(branch: Branch, n: usize, b: usize, g_size: usize, r: usize) -> usize {
    match branch {
        Branch::One => n + b / 2,
        Branch::TwoA | Branch::TwoB => n + (b + r + 1).saturating_sub(g_size) / 2,
    }
}

pub fn select_branch(bounded: Boundedness, z: Option<Topology>) -> Result<Branch> {
    match (bounded, z) {
        (Boundedness::Bounded, Some(t)) if t.is_cycle() => Ok(Branch::TwoB),
        (Boundedness::Bounded, Some(_)) => Ok(Branch::TwoA),
        (Boundedness::Bounded, None) => Err(Error::Precondition("bounded type without Z".into())),
        (Boundedness::UnboundedHeuristic, _) => Ok(Branch::One),
        (Boundedness::Undetermined, _) => Err(Error::Precondition("type is undetermined; no formula applies".into())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Prediction {
    pub value: usize,
    pub branch: Branch,
    /// Radius whose `b` entered the formula.
    pub n_k: usize,
}

pub fn predict_rpp(
    report: &StructureReport,
    z: Option<Topology>,
    trace: &EvolutionTrace,
    census: &BallCensus,
    n: usize,
) -> Result<Prediction> {
    let branch = select_branch(report.bounded, z)?;
    let n_k = match branch {
        Branch::TwoB => n,
        _ => trace
            .block_end(n)
            .ok_or_else(|| Error::Precondition(format!("no block end at or after n = {n} in the traced window")))?,
    };
    if n_k > census.max_n {
        return Err(Error::Horizon(format!("block end {n_k} lies beyond the census")));
    }
    let value = rpp_formula(branch, n, census.b(n_k), report.g.len(), report.r);
    Ok(Prediction { value, branch, n_k })
}

// ---------------------------------------------------------------------------
// Profiles

#[derive(Debug, Clone)]
pub struct RecurrenceRow {
    pub n: usize,
    pub rpp: std::result::Result<Rpp, String>,
    pub predicted: Option<Prediction>,
    pub r: std::result::Result<RValue, String>,
}

impl RecurrenceRow {
    pub fn status(&self) -> &'static str {
        match (&self.rpp, &self.predicted) {
            (Err(_), _) => "cap-exceeded",
            (Ok(_), None) => "no-prediction",
            (Ok(a), Some(p)) if a.value == p.value => "ok",
            _ => "mismatch",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RecurrenceProfile {
    pub rows: Vec<RecurrenceRow>,
    pub n_k: Vec<usize>,
    pub block_ends: Vec<usize>,
}

impl RecurrenceProfile {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,Rpp,Rpp_predicted,branch,R,status\n");
        for row in &self.rows {
            let rpp = row.rpp.as_ref().map(|r| r.value.to_string()).unwrap_or_default();
            let (pv, br) = row.predicted.map(|p| (p.value.to_string(), p.branch.to_string())).unwrap_or_default();
            let r = match &row.r {
                Ok(v) => v.to_string(),
                Err(_) => "cap-exceeded".into(),
            };
            s.push_str(&format!("{},{rpp},{pv},{br},{r},{}\n", row.n, row.status()));
        }
        s
    }

    /// Rows whose prediction disagrees with the search.
    pub fn mismatches(&self) -> Vec<usize> {
        self.rows.iter().filter(|r| r.status() == "mismatch").map(|r| r.n).collect()
    }
}

/// Census wide enough for searches up to `max_n` with the default cap.
pub fn recurrence_census(spec: &QuotientSpec, max_n: usize) -> Result<BallCensus> {
    let first = build_census(spec, max_n)?;
    let cap = default_cap(&first, max_n);
    let horizon = default_horizon(spec, max_n) + 2 * cap;
    build_census_with(spec, max_n, CensusOptions { horizon: Some(horizon), ..CensusOptions::default() })
}

/// `R''`, `R` and, with `predict`, the closed-form predictions for `0 <= n <= max_n`.
pub fn recurrence_profile(spec: &QuotientSpec, max_n: usize, predict: bool) -> Result<RecurrenceProfile> {
    // block ends may lie a little beyond max_n
    let reach = max_n + 4;
    let census = recurrence_census(spec, reach)?;
    let mut context = None;
    if predict && census.profile().verdict == Verdict::QuasiSturmian {
        let probe = || uniform_recurrence_probe(&census, max_n);
        let report = structure_report(spec, &census, probe)?;
        let z = if report.bounded == Boundedness::Bounded {
            Some(derive_z(&census, &report)?.topology)
        } else {
            None
        };
        let trace = evolve(&census, report.n0, reach - 1, false)?;
        context = Some((report, z, trace));
    }
    let mut rows = Vec::new();
    for n in 0..=max_n {
        let cap = default_cap(&census, n);
        let rpp = recurrence_rpp(&census, n, cap).map_err(|e| e.to_string());
        let r = recurrence_r(&census, n, cap).map_err(|e| e.to_string());
        let predicted = match &context {
            Some((rep, z, tr)) if n > rep.n1 => Some(predict_rpp(rep, *z, tr, &census, n)?),
            _ => None,
        };
        rows.push(RecurrenceRow { n, rpp, predicted, r });
    }
    let (n_k, block_ends) = match &context {
        Some((_, _, tr)) => (tr.n_k.clone(), tr.block_ends.clone()),
        None => (Vec::new(), Vec::new()),
    };
    Ok(RecurrenceProfile { rows, n_k, block_ends })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn formula_arithmetic() {
        assert_eq!(rpp_formula(Branch::One, 5, 8, 0, 0), 9);
        assert_eq!(rpp_formula(Branch::TwoA, 4, 8, 3, 2), 4 + 4);
        assert_eq!(rpp_formula(Branch::TwoB, 4, 7, 1, 0), 4 + 3);
    }

    #[test]
    fn monochrome_is_trivial() {
        let c = recurrence_census(&fixtures::mono(3), 5).unwrap();
        for n in 0..=5 {
            assert_eq!(recurrence_rpp(&c, n, n + 3).unwrap().value, n);
            assert_eq!(recurrence_r(&c, n, n + 3).unwrap(), RValue::Attained(n));
        }
    }

    #[test]
    fn bounded_fixtures_are_not_uniformly_recurrent() {
        for f in fixtures::bounded() {
            let c = recurrence_census(&f.spec, 4).unwrap();
            let rep = structure_report(&f.spec, &c, || Ok(false)).unwrap();
            let r = recurrence_r(&c, rep.n1 + 1, default_cap(&c, rep.n1 + 1)).unwrap();
            assert!(matches!(r, RValue::NotAttained { .. }), "{}: {r:?}", f.name);
        }
    }

    #[test]
    fn witnesses_match_explicit_unfolding() {
        let c = recurrence_census(&fixtures::ex_n0eq1(), 4).unwrap();
        for n in 0..=3 {
            let w = recurrence_rpp(&c, n, default_cap(&c, n)).unwrap();
            assert!(verify_witness(&c, n, w.center, w.value).unwrap());
            if w.value > n {
                // one less is not enough about any center, in particular this one
                assert!(!verify_witness(&c, n, w.center, w.value - 1).unwrap());
            }
        }
    }

    #[test]
    fn predictions_agree_on_bounded_fixtures() {
        for f in fixtures::bounded() {
            let p = recurrence_profile(&f.spec, 8, true).unwrap();
            assert!(p.mismatches().is_empty(), "{}: {}", f.name, p.to_csv());
            for w in p.rows.windows(2) {
                assert!(w[1].rpp.as_ref().unwrap().value >= w[0].rpp.as_ref().unwrap().value);
            }
        }
    }
}
