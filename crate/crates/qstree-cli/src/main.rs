use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use qstree::census::BallCensus;
use qstree::check::{run_checks, run_word_checks};
use qstree::factor_graph::{build_factor_graph, check_discipline, detect_cyclic, evolve};
use qstree::quotient::{parse_spec, QuotientSpec};
use qstree::recurrence::recurrence_profile;
use qstree::structure::{derive_z, structure_report, Boundedness};
use qstree::word::{block_of, word_fixture, x_len, x_word};
use qstree::{build_census, Error, FixtureId, Result};

const AFTER_HELP: &str = "\
SPEC is a path to a qst file, `-` for stdin, or an embedded fixture id:
  ex-basic(c), ex-nonray, ex-n0eq1, ex-loops-n0eq1, ex-cycleG, ex-n0-ne-n1, mono(d), word(k)

Environment:
  QSTREE_HORIZON_SLACK  extra tail occurrences materialized beyond the default horizon (default 0)

Exit codes: 0 success, 1 parse or validation error, 2 inconsistency detected, 3 horizon or cap insufficient";

#[derive(Parser)]
#[command(name = "qstree", version, about = "Analyze colorings of regular trees given by edge-indexed quotients", after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a spec.
    Validate { spec: String },
    /// Print an embedded fixture in qst format (the word itself for word(k)).
    Example { id: String },
    /// Complexity table b(n) with special-ball counts.
    Complexity {
        spec: String,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// List the ball classes of one radius.
    Balls {
        spec: String,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
        /// Print canonical codes.
        #[arg(long)]
        codes: bool,
    },
    /// Factor graph of one radius.
    FactorGraph {
        spec: String,
        #[arg(short = 'n', default_value_t = 1)]
        n: usize,
        /// Write Graphviz DOT here ("-" for stdout).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Case labels and S/A/B/C markers over a range of radii.
    Evolve {
        spec: String,
        #[arg(long, default_value_t = 0)]
        from: usize,
        #[arg(long, default_value_t = 12)]
        to: usize,
    },
    /// Finite part, N0, N1, type and Z.
    Structure {
        spec: String,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
    /// Recurrence functions R'' and R as CSV.
    Recurrence {
        spec: String,
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// Add the closed-form predictions.
        #[arg(long)]
        predict: bool,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run every applicable invariant and theorem check.
    Check {
        spec: String,
        #[arg(long, default_value_t = 12)]
        max_n: usize,
    },
}

enum Source {
    Spec(QuotientSpec),
    Word(usize),
}

fn load(arg: &str) -> Result<Source> {
    let path = Path::new(arg);
    if arg == "-" || path.exists() {
        let text = if arg == "-" { std::io::read_to_string(std::io::stdin())? } else { fs::read_to_string(path)? };
        let spec = parse_spec(&text)?;
        spec.validate()?;
        return Ok(Source::Spec(spec));
    }
    let id: FixtureId = arg.parse()?;
    Ok(match id {
        FixtureId::Word(k) => Source::Word(k),
        other => Source::Spec(other.spec().expect("non-word fixture has a spec")),
    })
}

fn load_spec(arg: &str, what: &str) -> Result<QuotientSpec> {
    match load(arg)? {
        Source::Spec(s) => Ok(s),
        Source::Word(_) => Err(Error::Precondition(format!("{what} needs a quotient spec, not a word fixture"))),
    }
}

fn census(src: &Source, max_n: usize) -> Result<BallCensus> {
    match src {
        Source::Spec(s) => build_census(s, max_n),
        Source::Word(k) => Ok(word_fixture(*k, max_n)?.census),
    }
}

macro_rules! out {
    ($o:expr, $($t:tt)*) => {{
        use std::fmt::Write as _;
        let _ = write!($o, $($t)*);
    }};
}

macro_rules! outln {
    ($o:expr) => {
        $o.push('\n')
    };
    ($o:expr, $($t:tt)*) => {{
        use std::fmt::Write as _;
        let _ = writeln!($o, $($t)*);
    }};
}

fn emit(o: &mut String, text: &str, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => Ok(fs::write(p, text)?),
        _ => {
            out!(o, "{text}");
            Ok(())
        }
    }
}

fn run(cmd: Cmd, o: &mut String) -> Result<i32> {
    match cmd {
        Cmd::Validate { spec } => {
            match load(&spec)? {
                Source::Spec(s) => outln!(o, 
                    "ok: degree {}, {} colors, {} finite vertices, {} edges, {} loops, {} tails",
                    s.degree,
                    s.alphabet.len(),
                    s.vertices.len(),
                    s.edges.len(),
                    s.loops.len(),
                    s.tails.len()
                ),
                Source::Word(k) => outln!(o, "ok: word X_{k} of length {}", x_len(k)),
            }
        }
        Cmd::Example { id } => {
            let id: FixtureId = id.parse()?;
            match id.spec() {
                Some(s) => out!(o, "{s}"),
                None => {
                    let FixtureId::Word(k) = id else { unreachable!() };
                    outln!(o, "{}", x_word(k));
                }
            }
        }
        Cmd::Complexity { spec, max_n, csv } => {
            let c = census(&load(&spec)?, max_n)?;
            let mut out = String::from("n,b,specials,increment\n");
            for n in 0..=max_n {
                let inc = c.b(n + 1) as i64 - c.b(n) as i64;
                out.push_str(&format!("{n},{},{},{inc}\n", c.b(n), c.special_balls(n).len()));
            }
            let p = c.profile();
            let summary = format!(
                "verdict={}\nN0={}\nc={}\n",
                p.verdict,
                p.n0.map_or("none".into(), |v| v.to_string()),
                p.c.map_or("none".into(), |v| v.to_string())
            );
            match csv {
                Some(path) => {
                    emit(o, &out, Some(&path))?;
                    out!(o, "{summary}");
                }
                None => {
                    out!(o, "{out}");
                    for l in summary.lines() {
                        outln!(o, "# {l}");
                    }
                }
            }
        }
        Cmd::Balls { spec, n, codes } => {
            let src = load(&spec)?;
            let c = census(&src, n)?;
            let names = match &src {
                Source::Spec(s) => Some(s),
                Source::Word(_) => None,
            };
            outln!(o, "b({n}) = {}", c.b(n));
            for (i, k) in c.classes(n).iter().enumerate() {
                let special = if k.extensions.len() >= 2 { " special" } else { "" };
                let first = c.graph.label(names, k.witnesses[0]);
                out!(o, "[{i}] witnesses={} first={first} extensions={}{special}", k.witnesses.len(), k.extensions.len());
                if codes {
                    out!(o, " {}", k.code.canonical_string());
                }
                outln!(o);
            }
        }
        Cmd::FactorGraph { spec, n, dot } => {
            let c = census(&load(&spec)?, n + 1)?;
            let fg = build_factor_graph(&c, n);
            match dot {
                Some(p) => emit(o, &fg.to_dot(&c, None, None), Some(&p))?,
                None => {
                    outln!(o, "n={n} vertices={} edges={} linear={}", fg.size, fg.edges.len(), fg.is_linear());
                    for &(a, b) in &fg.edges {
                        outln!(o, "{a} -- {b}");
                    }
                }
            }
        }
        Cmd::Evolve { spec, from, to } => {
            let c = census(&load(&spec)?, to + 2)?;
            let trace = evolve(&c, from, to, false)?;
            let cyclic = detect_cyclic(&c, to)?;
            outln!(o, "N0={} K={} seed={}", trace.n0, trace.k.map_or("none".into(), |k| k.to_string()), trace.seed);
            outln!(o, "n,label,S,A,B,C");
            let opt = |x: Option<usize>| x.map_or(String::from("-"), |v| v.to_string());
            for m in trace.markers.iter().filter(|m| (from..=to).contains(&m.n)) {
                let label = trace.label(m.n).map_or(String::from("-"), |l| l.to_string());
                outln!(o, "{},{label},{},{},{},{}", m.n, m.s, opt(m.a), opt(m.b), opt(m.c));
            }
            match cyclic.first_cycle {
                Some(n) => outln!(o, "cyclic from n={n}; discipline not applicable"),
                None => {
                    check_discipline(&trace)?;
                    outln!(o, "discipline=ok");
                }
            }
        }
        Cmd::Structure { spec, max_n } => {
            let s = load_spec(&spec, "structure")?;
            let c = build_census(&s, max_n)?;
            let rep = structure_report(&s, &c, || Ok(false))?;
            outln!(o, "N0={}", rep.n0);
            outln!(o, "c={}", rep.c);
            outln!(o, "N1={}", rep.n1);
            outln!(o, "G={{{}}}", rep.g_labels.join(", "));
            outln!(o, "x_N1={}", rep.x_n1_label);
            outln!(o, "r={}", rep.r);
            outln!(o, "shape={}", rep.shape);
            outln!(o, "type={}", rep.bounded);
            if rep.bounded == Boundedness::Bounded {
                let z = derive_z(&c, &rep)?;
                outln!(o, "Z={}", z.topology);
                outln!(o, "Z_indices={:?}", z.index_multiset());
                outln!(o, "Z_colors={}", z.colors.join(","));
            }
        }
        Cmd::Recurrence { spec, max_n, predict, csv } => match load(&spec)? {
            Source::Spec(s) => {
                let p = recurrence_profile(&s, max_n, predict)?;
                emit(o, &p.to_csv(), csv.as_deref())?;
                if !p.mismatches().is_empty() {
                    eprintln!("prediction mismatch at n = {:?}", p.mismatches());
                    return Ok(2);
                }
            }
            Source::Word(k) => {
                let fx = word_fixture(k, max_n)?;
                let mut out = String::from("n,Rpp,Rpp_predicted,branch,R,status\n");
                let mut bad = false;
                for n in 1..=max_n {
                    let v = fx.rpp(n)?;
                    let want = n + x_len(block_of(n)) / 2;
                    bad |= v != want;
                    let pred = if predict { want.to_string() } else { String::new() };
                    let status = if !predict { "no-prediction" } else if v == want { "ok" } else { "mismatch" };
                    out.push_str(&format!("{n},{v},{pred},{},,{status}\n", if predict { "word" } else { "" }));
                }
                emit(o, &out, csv.as_deref())?;
                if predict && bad {
                    return Ok(2);
                }
            }
        },
        Cmd::Check { spec, max_n } => {
            let rep = match load(&spec)? {
                Source::Spec(s) => run_checks(&s, max_n),
                Source::Word(k) => run_word_checks(k, max_n),
            };
            for l in &rep.lines {
                outln!(o, "{l}");
            }
            outln!(o, "{} checks, {} failed", rep.lines.len(), rep.failures());
            return Ok(rep.exit_code());
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = String::new();
    let result = run(cli.cmd, &mut out);
    // a closed pipe downstream is not an error worth reporting
    let _ = std::io::stdout().lock().write_all(out.as_bytes());
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
