//! One-pass invariant and theorem report over a spec or the word fixture.

use std::fmt;

use crate::census::{build_census_with, BallCensus, CensusOptions, Verdict};
use crate::error::{Error, Result};
use crate::factor_graph::{check_discipline, detect_cyclic, evolve};
use crate::quotient::{parse_spec, QuotientSpec};
use crate::recurrence::{default_cap, recurrence_profile, recurrence_r, RValue};
use crate::structure::{
    build_periodic_extension, derive_z, marked_recoloring, structure_report, theorem_round_trip, Boundedness,
};
use crate::word::{block_of, word_fixture, word_levels, x_len};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Pass,
    /// Failure with the exit code of its error class.
    Fail(i32),
    Skip,
}

#[derive(Debug, Clone)]
pub struct CheckLine {
    pub key: String,
    pub status: Status,
    pub detail: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.status {
            Status::Pass => "PASS",
            Status::Fail(_) => "FAIL",
            Status::Skip => "SKIP",
        };
        write!(f, "{tag} {} {}", self.key, self.detail)
    }
}

#[derive(Debug, Default)]
pub struct CheckReport {
    pub lines: Vec<CheckLine>,
}

impl CheckReport {
    fn pass(&mut self, key: &str, detail: impl Into<String>) {
        self.lines.push(CheckLine { key: key.into(), status: Status::Pass, detail: detail.into() });
    }

    fn skip(&mut self, key: &str, detail: impl Into<String>) {
        self.lines.push(CheckLine { key: key.into(), status: Status::Skip, detail: detail.into() });
    }

    fn fail(&mut self, key: &str, e: &Error) {
        self.lines.push(CheckLine { key: key.into(), status: Status::Fail(e.exit_code()), detail: e.to_string() });
    }

    fn expect(&mut self, key: &str, ok: bool, detail: String) {
        if ok {
            self.pass(key, detail);
        } else {
            self.fail(key, &Error::Inconsistency(detail));
        }
    }

    /// Records `r`, returning its value on success.
    fn record<T>(&mut self, key: &str, r: Result<T>, detail: impl FnOnce(&T) -> String) -> Option<T> {
        match r {
            Ok(v) => {
                let d = detail(&v);
                self.pass(key, d);
                Some(v)
            }
            Err(e) => {
                self.fail(key, &e);
                None
            }
        }
    }

    /// Largest failure exit code, 0 when nothing failed.
    pub fn exit_code(&self) -> i32 {
        self.lines
            .iter()
            .filter_map(|l| match l.status {
                Status::Fail(c) => Some(c),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    pub fn failures(&self) -> usize {
        self.lines.iter().filter(|l| matches!(l.status, Status::Fail(_))).count()
    }
}

fn census_checks(rep: &mut CheckReport, c: &BallCensus) {
    let n_max = c.max_n;
    let mut law = Ok(());
    let mut restr = Ok(());
    for n in 0..n_max {
        let inc: usize = c.classes(n).iter().map(|k| k.extensions.len().saturating_sub(1)).sum();
        if c.classes(n).iter().any(|k| k.extensions.is_empty()) || inc != c.b(n + 1) - c.b(n) {
            law = Err(format!("n = {n}: sum {inc} vs b(n+1)-b(n) = {}", c.b(n + 1) as i64 - c.b(n) as i64));
            break;
        }
        for (i, k) in c.classes(n + 1).iter().enumerate() {
            let back = k.restriction.and_then(|r| c.classes(n).get(r));
            if back.is_none_or(|r| !r.extensions.contains(&i) || r.code != k.code.restrict(n)) {
                restr = Err(format!("class {i} at radius {} has a bad restriction", n + 1));
            }
        }
    }
    rep.expect("census.increment-law", law.is_ok(), law.err().unwrap_or_else(|| format!("0 <= n < {n_max}")));
    rep.expect("census.restriction", restr.is_ok(), restr.err().unwrap_or_else(|| "every class restricts to its parent".into()));
    let mono = (0..n_max).all(|n| c.b(n) <= c.b(n + 1));
    rep.expect("census.monotone", mono, "b(n) non-decreasing".into());
}

/// Runs every applicable invariant on `spec` with census window `max_n`.
pub fn run_checks(spec: &QuotientSpec, max_n: usize) -> CheckReport {
    let mut rep = CheckReport::default();
    if let Err(e) = spec.validate() {
        rep.fail("quotient.valid", &e);
        return rep;
    }
    rep.pass("quotient.valid", format!("degree {}, {} finite vertices, {} tails", spec.degree, spec.vertices.len(), spec.tails.len()));
    let round = parse_spec(&spec.to_string()).map(|s| s == *spec);
    rep.expect("quotient.round-trip", matches!(round, Ok(true)), "serialize then parse".into());

    let opts = CensusOptions { double_check: true, ..CensusOptions::default() };
    let Some(c) = rep.record("census.horizon-doubling", build_census_with(spec, max_n, opts), |c| {
        format!("b(n) unchanged at horizons {} and {}", c.horizon, 2 * c.horizon)
    }) else {
        return rep;
    };
    let serial = build_census_with(spec, max_n, CensusOptions { parallel: false, ..CensusOptions::default() });
    let same = serial.map(|s| (0..=max_n).all(|n| s.classes(n).iter().map(|k| k.code).eq(c.classes(n).iter().map(|k| k.code))));
    rep.expect("census.parallel-serial", matches!(same, Ok(true)), "identical class lists".into());
    census_checks(&mut rep, &c);
    let prof = c.profile();
    rep.pass("census.verdict", format!("{} (b = {:?})", prof.verdict, prof.b));

    if prof.verdict == Verdict::QuasiSturmian {
        quasi_sturmian_checks(&mut rep, spec, &c, max_n);
    } else {
        rep.skip("special.unique", "not quasi-Sturmian over the window");
    }
    recurrence_checks(&mut rep, spec, max_n.min(10));
    rep
}

fn quasi_sturmian_checks(rep: &mut CheckReport, spec: &QuotientSpec, c: &BallCensus, max_n: usize) {
    let n0 = c.profile().n0.unwrap();
    let uniq: Result<()> = (n0..=max_n).try_for_each(|n| c.special_balls_checked(n, Some(n0)).map(|_| ()));
    rep.record("special.unique", uniq, |_| format!("one special ball with two extensions for {n0} <= n <= {max_n}"));

    let hi = max_n.saturating_sub(1).max(n0 + 1);
    let cyclic = detect_cyclic(c, hi);
    let trace = evolve(c, n0, hi, false);
    match (&cyclic, &trace) {
        (Ok(cv), Ok(t)) if !cv.is_cyclic() => {
            let d = check_discipline(t);
            rep.record("evolution.discipline", d, |_| format!("acyclic, {} < n <= {hi}", n0));
        }
        (Ok(cv), Ok(_)) => rep.skip("evolution.discipline", format!("cyclic from n = {}", cv.first_cycle.unwrap())),
        (Err(e), _) | (_, Err(e)) => rep.fail("evolution.discipline", e),
    }

    let report = structure_report(spec, c, || Ok(false));
    let Some(report) = rep.record("structure.finite-part", report, |r| {
        format!("N0={} N1={} |G|={} x_N1={} r={} shape={} type={}", r.n0, r.n1, r.g.len(), r.x_n1_label, r.r, r.shape, r.bounded)
    }) else {
        return;
    };
    if report.bounded != Boundedness::Bounded {
        rep.skip("structure.z", "type is not bounded");
        return;
    }
    let Some(z) = rep.record("structure.z", derive_z(c, &report), |z| format!("{} with indices {:?}", z.topology, z.index_multiset())) else {
        return;
    };
    let ext = build_periodic_extension(c, &report, &z, (2 * z.len()).max(4));
    if let Some(ext) = rep.record("structure.extension", ext, |e| format!("b = {:?}", e.b_extension)) {
        rep.expect(
            "structure.extension-stabilizes",
            ext.stable_from <= 2 * z.len(),
            format!("constant {} from radius {} (bound {})", ext.stable_value, ext.stable_from, 2 * z.len()),
        );
    }
    if let Err(e) = marked_recoloring(spec, c, &report) {
        rep.fail("structure.marked-recoloring", &e);
        return;
    }
    match theorem_round_trip(spec, max_n.min(10)) {
        Ok(rt) => {
            let detail = format!(
                "b_psi = {:?}; n + |A| + |VG| = n + {}; observed n + {}",
                rt.b_psi,
                rt.literal_offset(),
                rt.observed_offset.map_or("?".to_string(), |o| o.to_string())
            );
            rep.expect("structure.marked-recoloring", rt.literal_holds, detail);
            rep.expect(
                "structure.marked-recoloring-gz",
                rt.gz_law_holds,
                format!("b_psi(n) = n + |VG| + |VZ| = n + {} for n >= N1", rt.g_size + rt.z.len()),
            );
        }
        Err(e) => rep.fail("structure.marked-recoloring", &e),
    }
}

fn recurrence_checks(rep: &mut CheckReport, spec: &QuotientSpec, max_n: usize) {
    let Some(p) = rep.record("recurrence.search", recurrence_profile(spec, max_n, true), |_| format!("0 <= n <= {max_n}")) else {
        return;
    };
    let vals: Vec<Option<usize>> = p.rows.iter().map(|r| r.rpp.as_ref().ok().map(|x| x.value)).collect();
    let ok = vals.iter().enumerate().all(|(n, v)| v.is_some_and(|v| v >= n)) && vals.windows(2).all(|w| w[0] <= w[1]);
    rep.expect("recurrence.monotone", ok, format!("R'' = {:?}", vals.iter().flatten().collect::<Vec<_>>()));
    let r_ok = p.rows.iter().all(|r| match (&r.rpp, &r.r) {
        (Ok(a), Ok(RValue::Attained(m) | RValue::WindowLimited(m))) => *m >= a.value,
        _ => true,
    });
    rep.expect("recurrence.r-dominates", r_ok, "R(n) >= R''(n) where attained".into());
    if p.rows.iter().any(|r| r.predicted.is_some()) {
        let bad = p.mismatches();
        rep.expect("recurrence.formula", bad.is_empty(), format!("predicted R'' checked for n = {:?}; mismatches {bad:?}", p.rows.iter().filter(|r| r.predicted.is_some()).map(|r| r.n).collect::<Vec<_>>()));
    } else {
        rep.skip("recurrence.formula", "no prediction applies");
    }
    if spec.all_tails_periodic() && spec.has_tails() {
        let dich = (|| -> Result<bool> {
            let c = crate::recurrence::recurrence_census(spec, max_n)?;
            let prof = c.profile();
            if prof.verdict != Verdict::QuasiSturmian {
                return Ok(true);
            }
            let n1 = structure_report(spec, &c, || Ok(false))?.n1;
            let n = n1 + 1;
            Ok(matches!(recurrence_r(&c, n, default_cap(&c, n))?, RValue::NotAttained { .. }))
        })();
        match dich {
            Ok(b) => rep.expect("recurrence.dichotomy", b, "R(N1+1) not attained for a periodic tail".into()),
            Err(e) => rep.fail("recurrence.dichotomy", &e),
        }
    }
}

/// Checks on the word fixture generated from `X_{k_max}`.
pub fn run_word_checks(k_max: usize, max_n: usize) -> CheckReport {
    let mut rep = CheckReport::default();
    let Some(fx) = rep.record("word.stabilized", word_fixture(k_max, max_n), |_| format!("factor sets of X_{k_max} up to length {}", 2 * max_n + 3)) else {
        return rep;
    };
    census_checks(&mut rep, &fx.census);
    let k_hi = (1..).take_while(|&k| crate::word::n_k(k) <= max_n).last().unwrap_or(0);
    match word_levels(&fx, k_hi) {
        Ok(levels) => {
            for l in levels {
                rep.expect(
                    &format!("word.b-at-n{}", l.n_k),
                    l.identity_holds(),
                    format!("b({}) = {} up to reversal, |X_{}| = {}, raw factor count {}", l.n_k, l.b, l.k, l.x_len, l.raw),
                );
            }
        }
        Err(e) => rep.fail("word.b-at-nk", &e),
    }
    for n in 1..=max_n {
        let want = n + x_len(block_of(n)) / 2;
        match fx.rpp(n) {
            Ok(v) => rep.expect(&format!("word.rpp-{n}"), v == want, format!("R''({n}) = {v}, predicted {want}")),
            Err(e) => rep.fail(&format!("word.rpp-{n}"), &e),
        }
    }
    rep
}
