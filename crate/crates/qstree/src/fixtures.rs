//! Embedded example colorings.
//!
//! Color names: `b` for black vertices, `w` for white ones, `x` for crossed
//! ones, and `a1, a2, ...` for the chain example.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quotient::{parse_spec, QuotientSpec};

fn must(text: &str) -> QuotientSpec {
    parse_spec(text).expect("embedded fixture is valid")
}

/// Chain `a1 - a2 - ... - a_{c-1}` followed by a ray of color `a_c`; `b(n) = n + c`.
pub fn ex_basic_text(c: usize) -> String {
    assert!(c >= 2, "ex-basic needs c >= 2");
    let mut s = String::from("qst 1\ndegree 3\nalphabet");
    for i in 1..=c {
        s.push_str(&format!(" a{i}"));
    }
    s.push('\n');
    for i in 1..c {
        s.push_str(&format!("vertex a{i} color=a{i}\n"));
    }
    for i in 1..c.saturating_sub(1) {
        let fwd = if i == 1 { 3 } else { 2 };
        s.push_str(&format!("edge a{i} a{} {fwd} 1\n", i + 1));
    }
    let fwd = if c == 2 { 3 } else { 2 };
    s.push_str(&format!("tail attach=a{} fwd={fwd} bwd=1 kind=periodic\n", c - 1));
    s.push_str(&format!("  template t color=a{c} loop=0 fwd=2 bwd=1\n"));
    s
}

pub fn ex_basic(c: usize) -> QuotientSpec {
    must(&ex_basic_text(c))
}

pub const EX_NONRAY: &str = "qst 1
degree 3
alphabet w x b
vertex o color=w
vertex x color=x
vertex b1 color=b
edge o b1 3 1
edge x b1 3 1
tail attach=b1 fwd=1 bwd=1 kind=periodic
  template t color=b loop=0 fwd=2 bwd=1
";

pub const EX_N0EQ1: &str = "qst 1
degree 3
alphabet x b w
vertex x color=x
tail attach=x fwd=3 bwd=1 kind=periodic
  template p0 color=b loop=1 fwd=1 bwd=2
  template p1 color=w loop=0 fwd=1 bwd=1
  template p2 color=b loop=0 fwd=2 bwd=1
  template p3 color=w loop=0 fwd=2 bwd=1
  template p4 color=b loop=1 fwd=1 bwd=2
  template p5 color=w loop=0 fwd=1 bwd=2
  template p6 color=b loop=0 fwd=1 bwd=1
  template p7 color=w loop=0 fwd=2 bwd=1
";

pub const EX_LOOPS_N0EQ1: &str = "qst 1
degree 3
alphabet b w x
vertex t color=b
vertex s color=b
vertex o color=w
vertex m color=b
edge t o 1 1
edge s o 2 1
edge o m 1 1
loop t 2
loop s 1
tail attach=m fwd=2 bwd=1 kind=periodic
  template r color=x loop=0 fwd=2 bwd=1
";

pub const EX_CYCLE_G: &str = "qst 1
degree 3
alphabet x b w
vertex xt color=x
vertex bu color=b
vertex w color=w
vertex bd color=b
vertex x1 color=x
edge xt bu 3 1
edge bu w 1 1
edge bd w 1 2
edge bu x1 1 1
edge bd x1 2 1
tail attach=x1 fwd=1 bwd=1 kind=periodic
  template r color=x loop=0 fwd=2 bwd=1
";

pub const EX_N0_NE_N1: &str = "qst 1
degree 3
alphabet x b w
vertex x0 color=x
tail attach=x0 fwd=3 bwd=2 kind=periodic
  template p0 color=b loop=0 fwd=1 bwd=2
  template p1 color=w loop=0 fwd=1 bwd=2
  template p2 color=b loop=0 fwd=1 bwd=2
  template p3 color=x loop=0 fwd=1 bwd=2
";

pub fn ex_nonray() -> QuotientSpec {
    must(EX_NONRAY)
}

pub fn ex_n0eq1() -> QuotientSpec {
    must(EX_N0EQ1)
}

pub fn ex_loops_n0eq1() -> QuotientSpec {
    must(EX_LOOPS_N0EQ1)
}

pub fn ex_cycle_g() -> QuotientSpec {
    must(EX_CYCLE_G)
}

pub fn ex_n0_ne_n1() -> QuotientSpec {
    must(EX_N0_NE_N1)
}

/// The single-color coloring of the `d`-regular tree.
pub fn mono(d: u32) -> QuotientSpec {
    must(&format!("qst 1\ndegree {d}\nalphabet a\nvertex v color=a\nloop v {d}\n"))
}

/// A named spec.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub spec: QuotientSpec,
}

/// The six bounded-type examples.
pub fn bounded() -> Vec<Fixture> {
    [
        ("ex-basic(3)", ex_basic(3)),
        ("ex-nonray", ex_nonray()),
        ("ex-n0eq1", ex_n0eq1()),
        ("ex-loops-n0eq1", ex_loops_n0eq1()),
        ("ex-cycleG", ex_cycle_g()),
        ("ex-n0-ne-n1", ex_n0_ne_n1()),
    ]
    .into_iter()
    .map(|(n, s)| Fixture { name: n.to_string(), spec: s })
    .collect()
}

/// Identifier of an embedded fixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FixtureId {
    Basic(usize),
    NonRay,
    N0Eq1,
    LoopsN0Eq1,
    CycleG,
    N0NeN1,
    Mono(u32),
    Word(usize),
}

impl FixtureId {
    /// The quotient spec, or `None` for the word fixture.
    pub fn spec(self) -> Option<QuotientSpec> {
        Some(match self {
            FixtureId::Basic(c) => ex_basic(c),
            FixtureId::NonRay => ex_nonray(),
            FixtureId::N0Eq1 => ex_n0eq1(),
            FixtureId::LoopsN0Eq1 => ex_loops_n0eq1(),
            FixtureId::CycleG => ex_cycle_g(),
            FixtureId::N0NeN1 => ex_n0_ne_n1(),
            FixtureId::Mono(d) => mono(d),
            FixtureId::Word(_) => return None,
        })
    }
}

impl fmt::Display for FixtureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FixtureId::Basic(c) => write!(f, "ex-basic({c})"),
            FixtureId::NonRay => f.write_str("ex-nonray"),
            FixtureId::N0Eq1 => f.write_str("ex-n0eq1"),
            FixtureId::LoopsN0Eq1 => f.write_str("ex-loops-n0eq1"),
            FixtureId::CycleG => f.write_str("ex-cycleG"),
            FixtureId::N0NeN1 => f.write_str("ex-n0-ne-n1"),
            FixtureId::Mono(d) => write!(f, "mono({d})"),
            FixtureId::Word(k) => write!(f, "word({k})"),
        }
    }
}

impl FromStr for FixtureId {
    type Err = Error;

    /// Accepts `name`, `name(k)` and `name:k`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = if let Some(open) = s.find('(') {
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Invalid(format!("unbalanced fixture id {s:?}")))?;
            (&s[..open], Some(inner))
        } else if let Some((n, a)) = s.split_once(':') {
            (n, Some(a))
        } else {
            (s, None)
        };
        let num = |default: usize| -> Result<usize> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .trim()
                    .trim_start_matches("c=")
                    .trim_start_matches("d=")
                    .trim_start_matches("k=")
                    .parse()
                    .map_err(|_| Error::Invalid(format!("bad fixture parameter in {s:?}"))),
            }
        };
        let id = match name {
            "ex-basic" => {
                let c = num(3)?;
                if c < 2 {
                    return Err(Error::Invalid("ex-basic needs c >= 2".into()));
                }
                FixtureId::Basic(c)
            }
            "ex-nonray" => FixtureId::NonRay,
            "ex-n0eq1" => FixtureId::N0Eq1,
            "ex-loops-n0eq1" => FixtureId::LoopsN0Eq1,
            "ex-cycleG" | "ex-cycleg" => FixtureId::CycleG,
            "ex-n0-ne-n1" => FixtureId::N0NeN1,
            "mono" => {
                let d = num(3)?;
                if d < 2 {
                    return Err(Error::Invalid("mono needs d >= 2".into()));
                }
                FixtureId::Mono(d as u32)
            }
            "word" => {
                let k = num(6)?;
                if k < 3 {
                    return Err(Error::Invalid("word needs k >= 3".into()));
                }
                FixtureId::Word(k)
            }
            _ => return Err(Error::Invalid(format!("unknown fixture {s:?}"))),
        };
        if arg.is_some() && !matches!(id, FixtureId::Basic(_) | FixtureId::Mono(_) | FixtureId::Word(_)) {
            return Err(Error::Invalid(format!("fixture {name} takes no parameter")));
        }
        Ok(id)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_validate() {
        for f in bounded() {
            f.spec.validate().unwrap();
            assert_eq!(parse_spec(&f.spec.to_string()).unwrap(), f.spec, "{}", f.name);
        }
        for c in 2..7 {
            ex_basic(c).validate().unwrap();
        }
        mono(2).validate().unwrap();
        mono(5).validate().unwrap();
    }

    #[test]
    fn ids_parse() {
        assert_eq!("ex-basic(4)".parse::<FixtureId>().unwrap(), FixtureId::Basic(4));
        assert_eq!("ex-basic".parse::<FixtureId>().unwrap(), FixtureId::Basic(3));
        assert_eq!("mono:4".parse::<FixtureId>().unwrap(), FixtureId::Mono(4));
        assert_eq!("word(5)".parse::<FixtureId>().unwrap(), FixtureId::Word(5));
        assert!("ex-nonray(2)".parse::<FixtureId>().is_err());
        assert!("nope".parse::<FixtureId>().is_err());
        for id in ["ex-basic(3)", "ex-cycleG", "mono(3)", "word(4)"] {
            assert_eq!(id.parse::<FixtureId>().unwrap().to_string(), id);
        }
    }
}
