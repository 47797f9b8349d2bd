//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use qstree::ball::{canonical_code, unfold_ball, BallNode, ColoredBall};
use qstree::census::{build_census, build_census_with, default_horizon, BallCensus, CensusOptions};
use qstree::factor_graph::{build_factor_graph, detect_cyclic, evolve, CaseLabel};
use qstree::fixtures::{self, Fixture};
use qstree::quotient::{Origin, QuotientSpec};
use qstree::recurrence::{default_cap, predict_rpp, recurrence_census, recurrence_r, recurrence_rpp, verify_witness, RValue};
use qstree::structure::{
    build_periodic_extension, derive_z, structure_report, theorem_round_trip, StructureReport, Topology,
};
use qstree::word::{factors, word_fixture, x_len, x_word};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn report(spec: &QuotientSpec, c: &BallCensus) -> Result<StructureReport, String> {
    structure_report(spec, c, || Ok(false)).map_err(err)
}

// 1 -------------------------------------------------------------------------

fn complexity_tables() -> Outcome {
    // (fixture, b(n) as a function of n, N0, N1)
    type Law = fn(usize) -> usize;
    let table: [(Fixture, Law, usize, usize); 6] = {
        let f = fixtures::bounded();
        let mut it = f.into_iter();
        [
            (it.next().unwrap(), |n| n + 3, 0, 0),
            (it.next().unwrap(), |n| n + 3, 0, 0),
            (it.next().unwrap(), |n| if n == 0 { 3 } else { n + 4 }, 1, 1),
            (it.next().unwrap(), |n| if n == 0 { 3 } else { n + 5 }, 1, 1),
            (it.next().unwrap(), |n| match n {
                0 => 3,
                1 => 5,
                _ => n + 5,
            }, 2, 2),
            (it.next().unwrap(), |n| n + 3, 0, 1),
        ]
    };
    let mut slowest = Duration::ZERO;
    for (f, law, n0, n1) in table {
        let t = Instant::now();
        let c = build_census(&f.spec, 12).map_err(err)?;
        for n in 0..=12 {
            ensure(c.b(n) == law(n), || format!("{}: b({n}) = {}, expected {}", f.name, c.b(n), law(n)))?;
        }
        let p = c.profile();
        ensure(p.n0 == Some(n0), || format!("{}: N0 = {:?}, expected {n0}", f.name, p.n0))?;
        let r = report(&f.spec, &c)?;
        ensure(r.n1 == n1, || format!("{}: N1 = {}, expected {n1}", f.name, r.n1))?;
        let dt = t.elapsed();
        ensure(dt < Duration::from_secs(10), || format!("{} took {dt:?}", f.name))?;
        slowest = slowest.max(dt);
    }
    Ok(format!("six tables exact for n <= 12, slowest {slowest:?}"))
}

// 2 -------------------------------------------------------------------------

fn special_balls() -> Outcome {
    for f in fixtures::bounded() {
        let c = build_census(&f.spec, 12).map_err(err)?;
        let n0 = c.profile().n0.ok_or_else(|| format!("{}: no N0", f.name))?;
        for n in 0..=12 {
            // recount extensions from the radius-(n+1) restrictions
            let mut ext = vec![BTreeSet::new(); c.b(n)];
            for (i, k) in c.classes(n + 1).iter().enumerate() {
                let below = c.level(n).position(k.code.restrict(n)).ok_or("restriction without class")?;
                ext[below].insert(i);
            }
            let inc: usize = ext.iter().map(|e| e.len() - 1).sum();
            ensure(inc == c.b(n + 1) - c.b(n), || format!("{}: increment law fails at n = {n}", f.name))?;
            if n >= n0 {
                let special: Vec<usize> = ext.iter().filter(|e| e.len() >= 2).map(|e| e.len()).collect();
                ensure(special == [2], || format!("{}: special extension counts at n = {n} are {special:?}", f.name))?;
            }
        }
    }
    Ok("one special ball with two extensions from N0 to 12; increment law for n <= 12".into())
}

// 3 -------------------------------------------------------------------------

fn z_graphs() -> Outcome {
    let mut problems = Vec::new();
    let mut seen = Vec::new();
    let cases: [(&str, QuotientSpec, Topology, Vec<(u32, u32)>); 3] = [
        ("ex-basic(3)", fixtures::ex_basic(3), Topology::SingleVertex, vec![(3, 3)]),
        (
            "ex-n0eq1",
            fixtures::ex_n0eq1(),
            Topology::Segment(5),
            // b-w-b-w-b with index-1 loops at both ends
            vec![(1, 1), (1, 1), (1, 1), (1, 2), (2, 2), (2, 2)],
        ),
        ("ex-n0-ne-n1", fixtures::ex_n0_ne_n1(), Topology::Cycle(4), vec![(1, 2); 4]),
    ];
    for (name, spec, topo, mult) in cases {
        let c = build_census(&spec, 12).map_err(err)?;
        let r = report(&spec, &c)?;
        let z = derive_z(&c, &r).map_err(err)?;
        let got = z.index_multiset();
        seen.push(format!("{name}: {} {:?}", z.topology, got));
        if z.topology != topo {
            problems.push(format!("{name}: topology {} (expected {topo})", z.topology));
        } else if got != mult {
            problems.push(format!("{name}: indices {got:?} (expected {mult:?})"));
        }
    }
    if problems.is_empty() {
        Ok(seen.join("; "))
    } else {
        Err(format!("{}; computed {}", problems.join("; "), seen.join("; ")))
    }
}

// 4 -------------------------------------------------------------------------

/// Independent check of the label sequence after the first case-I radius:
/// blocks `I II ... II [III] I`, with `III` only directly before `I`.
fn pattern_ok(labels: &[(usize, CaseLabel)]) -> Result<(), String> {
    let seq: Vec<(usize, CaseLabel)> = labels.iter().copied().skip_while(|(_, l)| *l == CaseLabel::PreK).collect();
    let Some(&(k, first)) = seq.first() else { return Ok(()) };
    if !first.is_case_one() {
        return Err(format!("first label after pre-K at n = {k} is {first}"));
    }
    for w in seq.windows(2) {
        let ((_, a), (n, b)) = (w[0], w[1]);
        let ok = match a {
            CaseLabel::Ia | CaseLabel::Ib | CaseLabel::Ic | CaseLabel::II => {
                matches!(b, CaseLabel::II | CaseLabel::III) || b.is_case_one()
            }
            CaseLabel::III => b.is_case_one(),
            _ => false,
        };
        if !ok || b == CaseLabel::PreK || b == CaseLabel::NotApplicable {
            return Err(format!("{a} followed by {b} at n = {n}"));
        }
    }
    Ok(())
}

fn evolution_discipline() -> Outcome {
    let mut done = Vec::new();
    for f in fixtures::bounded() {
        let c = build_census(&f.spec, 17).map_err(err)?;
        let n0 = c.profile().n0.unwrap();
        if detect_cyclic(&c, 15).map_err(err)?.is_cyclic() {
            continue;
        }
        let t = evolve(&c, n0 + 1, 15, true).map_err(|e| format!("{}: {e}", f.name))?;
        let labels: Vec<(usize, CaseLabel)> = (n0 + 1..=15).map(|n| (n, t.label(n).unwrap())).collect();
        pattern_ok(&labels).map_err(|e| format!("{}: {e}", f.name))?;
        for &(n, l) in &labels {
            let fg = build_factor_graph(&c, n);
            let s = t.markers.iter().find(|m| m.n == n).unwrap().s;
            match l {
                CaseLabel::II => ensure(fg.degree(s) == 3, || format!("{}: case II at {n} with deg S = {}", f.name, fg.degree(s)))?,
                CaseLabel::III | CaseLabel::Ia | CaseLabel::Ib | CaseLabel::Ic => {
                    ensure(fg.is_linear(), || format!("{}: case {l} at {n} with a non-linear factor graph", f.name))?
                }
                _ => {}
            }
        }
        let mut runs: Vec<(CaseLabel, usize)> = Vec::new();
        for &(_, l) in &labels {
            match runs.last_mut() {
                Some((m, c)) if *m == l => *c += 1,
                _ => runs.push((l, 1)),
            }
        }
        let runs: Vec<String> = runs.iter().map(|(l, c)| if *c == 1 { l.to_string() } else { format!("{l}x{c}") }).collect();
        done.push(format!("{} [{}]", f.name, runs.join(" ")));
    }
    Ok(format!("N0 < n <= 15 on acyclic fixtures: {}", done.join("; ")))
}

// 5 -------------------------------------------------------------------------

fn recurrence_formulas() -> Outcome {
    let t = Instant::now();
    let mut checked = 0;
    for f in fixtures::bounded() {
        let c = recurrence_census(&f.spec, 14).map_err(err)?;
        let r = report(&f.spec, &c)?;
        let z = derive_z(&c, &r).map_err(err)?;
        let trace = evolve(&c, r.n0, 13, false).map_err(err)?;
        for n in r.n1 + 1..=10 {
            let got = recurrence_rpp(&c, n, default_cap(&c, n)).map_err(err)?;
            let want = predict_rpp(&r, Some(z.topology), &trace, &c, n).map_err(err)?;
            ensure(got.value == want.value, || {
                format!("{}: R''({n}) = {}, predicted {} by {}", f.name, got.value, want.value, want.branch)
            })?;
            if n <= 3 {
                ensure(verify_witness(&c, n, got.center, got.value).map_err(err)?, || {
                    format!("{}: witness for R''({n}) fails on the unfolded ball", f.name)
                })?;
            }
            checked += 1;
        }
    }
    let dt = t.elapsed();
    ensure(dt < Duration::from_secs(60), || format!("took {dt:?}"))?;
    Ok(format!("{checked} radii agree exactly in {dt:?}"))
}

// 6 -------------------------------------------------------------------------

fn dichotomy() -> Outcome {
    for f in fixtures::bounded() {
        let c = recurrence_census(&f.spec, 6).map_err(err)?;
        let n = report(&f.spec, &c)?.n1 + 1;
        match recurrence_r(&c, n, default_cap(&c, n)).map_err(err)? {
            RValue::NotAttained { missing, tail } => {
                // the missing class must be absent at every materialized tail position >= n
                let absent = (0..c.graph.len()).all(|v| match c.graph.vertices[v].origin {
                    Origin::Tail { tail: t, position, .. } if t == tail && position >= n => {
                        c.class_of(n, v).is_none_or(|k| k != missing)
                    }
                    _ => true,
                });
                ensure(absent, || format!("{}: claimed missing class occurs on the tail", f.name))?;
            }
            other => return Err(format!("{}: R({n}) = {other:?}", f.name)),
        }
    }
    let c = recurrence_census(&fixtures::mono(3), 6).map_err(err)?;
    for n in 0..=6 {
        let r = recurrence_r(&c, n, default_cap(&c, n)).map_err(err)?;
        ensure(r == RValue::Attained(n), || format!("mono(3): R({n}) = {r:?}"))?;
    }
    Ok("R(N1+1) not attained on all periodic fixtures; R(n) = n on mono(3)".into())
}

// 7 -------------------------------------------------------------------------

fn canon(f: &str) -> String {
    let r: String = f.chars().rev().collect();
    if r.as_str() < f { r } else { f.to_string() }
}

/// Brute-force `R''` on a word: the least `m` such that some length-`(2m+1)`
/// factor contains every length-`(2n+1)` factor up to reversal.
fn word_rpp_oracle(w: &str, n: usize) -> usize {
    let l = 2 * n + 1;
    let target: BTreeSet<String> = factors(w, l).into_iter().map(canon).collect();
    (n..)
        .find(|&m| {
            let big = 2 * m + 1;
            (0..=w.len() - big).any(|i| {
                let win = &w[i..i + big];
                factors(win, l).into_iter().map(canon).collect::<BTreeSet<_>>() == target
            })
        })
        .unwrap()
}

fn word_counterexample() -> Outcome {
    let t = Instant::now();
    let fx = word_fixture(10, 15).map_err(err)?;
    let oracle_word = x_word(10);
    let mut notes = Vec::new();
    for k in 2..=4usize {
        let (lo, hi) = ((1 << (k - 1)) - 1, (1 << k) - 1);
        for n in lo + 1..=hi {
            let got = fx.rpp(n).map_err(err)?;
            ensure(got - n == x_len(k) / 2, || format!("R''({n}) - {n} = {}, expected {}", got - n, x_len(k) / 2))?;
            if n <= 7 {
                let o = word_rpp_oracle(&oracle_word, n);
                ensure(o == got, || format!("oracle R''({n}) = {o}, search gave {got}"))?;
            }
        }
    }
    let r1 = fx.rpp(1).map_err(err)?;
    ensure(r1 == 3, || format!("R''(1) = {r1}"))?;
    for k in 1..=4usize {
        let nk = (1 << k) - 1;
        let (b, raw) = (fx.census.b(nk), factors(&fx.word, 2 * nk + 1).len());
        if k >= 2 {
            ensure(b == x_len(k), || format!("b({nk}) = {b}, |X_{k}| = {}", x_len(k)))?;
        }
        notes.push(format!("k={k}: b={b} |X|={} raw={raw}", x_len(k)));
    }
    let dt = t.elapsed();
    ensure(dt < Duration::from_secs(30), || format!("took {dt:?}"))?;
    Ok(format!("R''(n) - n matches for k = 2..4, R''(1) = 3; {} ({dt:?})", notes.join(", ")))
}

// 8 -------------------------------------------------------------------------

fn round_trip() -> Outcome {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for f in fixtures::bounded() {
        let c = build_census(&f.spec, 12).map_err(err)?;
        let r = report(&f.spec, &c)?;
        let z = derive_z(&c, &r).map_err(err)?;
        let ext = build_periodic_extension(&c, &r, &z, 2 * z.len() + 2).map_err(err)?;
        ensure(ext.stable_from <= 2 * z.len(), || format!("{}: extension stabilizes only at {}", f.name, ext.stable_from))?;
        let rt = theorem_round_trip(&f.spec, 10).map_err(err)?;
        let lit = rt.literal_offset() as usize;
        let bad: Vec<usize> = (0..=10).filter(|&n| rt.b_psi[n] != n + lit).collect();
        notes.push(format!(
            "{}: b_psi-n={:?} vs |A|+|VG|={lit}, |VG|+|VZ|={}",
            f.name,
            rt.observed_offset,
            rt.g_size + rt.z.len()
        ));
        if !bad.is_empty() {
            failures.push(format!("{} at n = {bad:?}", f.name));
        }
    }
    if failures.is_empty() {
        Ok(notes.join("; "))
    } else {
        Err(format!("b_psi(n) = n + |A| + |VG| fails for {}; observed {}", failures.join(", "), notes.join("; ")))
    }
}

// 9 -------------------------------------------------------------------------

fn random_ball(rng: &mut StdRng) -> ColoredBall {
    let radius = rng.random_range(0..=4);
    let mut nodes = vec![BallNode { color: "c0".into(), depth: 0, parent: None, children: vec![] }];
    let mut frontier = vec![0];
    for depth in 1..=radius {
        let mut next = Vec::new();
        for &p in &frontier {
            for _ in 0..rng.random_range(0..=3) {
                let id = nodes.len();
                let color = format!("c{}", rng.random_range(0..3));
                nodes.push(BallNode { color, depth, parent: Some(p), children: vec![] });
                nodes[p].children.push(id);
                next.push(id);
            }
        }
        frontier = next;
    }
    ColoredBall { radius, nodes, base: None }
}

/// Same tree with shuffled children and a fresh breadth-first numbering.
fn permuted(b: &ColoredBall, rng: &mut StdRng) -> ColoredBall {
    let mut kids: Vec<Vec<usize>> = b.nodes.iter().map(|n| n.children.clone()).collect();
    for k in &mut kids {
        k.shuffle(rng);
    }
    let mut order = vec![0];
    let mut i = 0;
    while i < order.len() {
        order.extend(kids[order[i]].iter().copied());
        i += 1;
    }
    let mut new_id = vec![0; b.len()];
    for (ni, &old) in order.iter().enumerate() {
        new_id[old] = ni;
    }
    let nodes = order
        .iter()
        .map(|&old| BallNode {
            color: b.nodes[old].color.clone(),
            depth: b.nodes[old].depth,
            parent: b.nodes[old].parent.map(|p| new_id[p]),
            children: kids[old].iter().map(|&c| new_id[c]).collect(),
        })
        .collect();
    ColoredBall { radius: b.radius, nodes, base: None }
}

fn properties() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    for trial in 0..1000 {
        let b = random_ball(&mut rng);
        let p = permuted(&b, &mut rng);
        ensure(canonical_code(&b) == canonical_code(&p), || format!("permutation trial {trial} changed the code"))?;
    }
    let all: Vec<Fixture> = fixtures::bounded();
    for f in &all {
        let h = default_horizon(&f.spec, 12);
        let a = build_census_with(&f.spec, 12, CensusOptions { horizon: Some(h), ..Default::default() }).map_err(err)?;
        let b = build_census_with(&f.spec, 12, CensusOptions { horizon: Some(2 * h), ..Default::default() }).map_err(err)?;
        ensure((0..=12).all(|n| a.b(n) == b.b(n)), || format!("{}: horizon doubling changed b", f.name))?;
        let s = build_census_with(&f.spec, 12, CensusOptions { parallel: false, horizon: Some(h), ..Default::default() })
            .map_err(err)?;
        let dump = |c: &BallCensus| -> String {
            let mut out = String::new();
            for n in 0..=12 {
                for k in c.classes(n) {
                    out.push_str(&format!("{n} {} {:?} {:?}\n", k.code.canonical_string(), k.witnesses, k.extensions));
                }
            }
            out
        };
        ensure(dump(&a) == dump(&s), || format!("{}: parallel and serial censuses differ", f.name))?;
        // codes agree with explicit unfolding on a sample
        for v in 0..6.min(a.graph.len()) {
            let explicit = canonical_code(&unfold_ball(&a.graph, v, 3).map_err(err)?);
            ensure(a.code(3, v) == Some(explicit), || format!("{}: census code differs from unfolding at {v}", f.name))?;
        }
    }
    Ok("1000 permutation trials, horizon doubling and parallel/serial identity on six fixtures".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("complexity tables", complexity_tables),
        ("special-ball uniqueness", special_balls),
        ("derived graph Z", z_graphs),
        ("evolution discipline", evolution_discipline),
        ("recurrence formulas", recurrence_formulas),
        ("uniform recurrence dichotomy", dichotomy),
        ("word counterexample", word_counterexample),
        ("bounded-type round trip", round_trip),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let out = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let dt = t.elapsed();
        match out {
            Ok(msg) => println!("PASS [{}] {name} ({dt:.2?}): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL [{}] {name} ({dt:.2?}): {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
