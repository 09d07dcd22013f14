//! The `--favored` and `--mutable` mini-languages.
//!
//! Favored spaces:
//!
//! ```text
//! fix+:3,7            x3 = x7 = 1
//! fix-:2              x2 = 0
//! atleast:1,4*2,9>=1  x1 + 2·x4 + x9 ≥ 1
//! auto:D+:seed=5      sampled from the present solution (also D-, D>=)
//! ```
//!
//! Mutable spaces are `;`-separated `key=value` pairs:
//!
//! ```text
//! mode=constraint;pct=5;basis=range;range=1000
//! mode=constraint;a=1,0..4,0..4
//! ```
//!
//! `pct`/`basis`/`range` build boxes around the present values; explicit
//! `c=`, `a=` and `b=` lists override them component by component. Item
//! indices are zero-based.

use std::fmt;

use cfex_core::instances::{build_favored, build_mutable, BoxBasis, FavoredKind};
use cfex_core::{FavoredSpace, Interval, Mode, MutableSpace, PresentProblem};

use crate::{Error, Result};

fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

fn int<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim().parse().map_err(|_| usage(format!("{what}: expected an integer, got {s:?}")))
}

pub fn parse_mode(s: &str) -> Result<Mode> {
    match s {
        "objective" => Ok(Mode::Objective),
        "constraint" => Ok(Mode::Constraint),
        "rhs" => Ok(Mode::Rhs),
        "all" => Ok(Mode::All),
        _ => Err(usage(format!("unknown mode {s:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FavoredSpec {
    Explicit(FavoredSpace),
    Auto { kind: FavoredKind, seed: u64 },
}

impl FavoredSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, body) = s.split_once(':').ok_or_else(|| usage(format!("favored spec {s:?} lacks a ':'")))?;
        let indices = |body: &str| -> Result<Vec<usize>> {
            body.split(',').filter(|t| !t.trim().is_empty()).map(|t| int(t, "favored index")).collect()
        };
        match head {
            "fix+" => Ok(FavoredSpec::Explicit(FavoredSpace::PositiveFix(indices(body)?))),
            "fix-" => Ok(FavoredSpec::Explicit(FavoredSpace::NegativeFix(indices(body)?))),
            "atleast" => {
                let (terms, beta) =
                    body.split_once(">=").ok_or_else(|| usage(format!("atleast spec {s:?} lacks '>='")))?;
                let mut weights = Vec::new();
                for t in terms.split(',').filter(|t| !t.trim().is_empty()) {
                    let (i, k) = match t.split_once('*') {
                        Some((i, k)) => (int::<usize>(i, "favored index")?, int::<i64>(k, "favored weight")?),
                        None => (int::<usize>(t, "favored index")?, 1),
                    };
                    weights.push((i, k));
                }
                let n = weights.iter().map(|&(i, _)| i + 1).max().unwrap_or(0);
                let mut alpha = vec![0; n];
                for (i, k) in weights {
                    alpha[i] += k;
                }
                Ok(FavoredSpec::Explicit(FavoredSpace::AtLeast { alpha, beta: int(beta, "favored bound")? }))
            }
            "auto" => {
                let (kind, rest) = body.split_once(':').unwrap_or((body, ""));
                let kind = match kind {
                    "D+" => FavoredKind::Positive,
                    "D-" => FavoredKind::Negative,
                    "D>=" => FavoredKind::AtLeast,
                    _ => return Err(usage(format!("unknown favored kind {kind:?}"))),
                };
                let seed = match rest.strip_prefix("seed=") {
                    Some(v) => int(v, "seed")?,
                    None if rest.is_empty() => 0,
                    None => return Err(usage(format!("unexpected {rest:?} in favored spec"))),
                };
                Ok(FavoredSpec::Auto { kind, seed })
            }
            _ => Err(usage(format!("unknown favored spec {head:?}"))),
        }
    }

    pub fn resolve(&self, p: &PresentProblem) -> Result<FavoredSpace> {
        let d = match self {
            FavoredSpec::Explicit(FavoredSpace::AtLeast { alpha, beta }) => {
                if alpha.len() > p.n() {
                    return Err(usage(format!("favored index out of range for {} items", p.n())));
                }
                let mut alpha = alpha.clone();
                alpha.resize(p.n(), 0);
                FavoredSpace::AtLeast { alpha, beta: *beta }
            }
            FavoredSpec::Explicit(d) => d.clone(),
            FavoredSpec::Auto { kind, seed } => build_favored(p, *kind, *seed)?,
        };
        d.validate(p.n())?;
        Ok(d)
    }
}

fn join<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for FavoredSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FavoredSpec::Explicit(FavoredSpace::PositiveFix(idx)) => write!(f, "fix+:{}", join(idx)),
            FavoredSpec::Explicit(FavoredSpace::NegativeFix(idx)) => write!(f, "fix-:{}", join(idx)),
            FavoredSpec::Explicit(FavoredSpace::AtLeast { alpha, beta }) => {
                let terms = alpha.iter().enumerate().filter(|(_, &k)| k != 0).map(|(i, &k)| match k {
                    1 => i.to_string(),
                    _ => format!("{i}*{k}"),
                });
                write!(f, "atleast:{}>={beta}", join(terms))
            }
            FavoredSpec::Auto { kind, seed } => write!(f, "auto:{}:seed={seed}", kind.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Basis {
    #[default]
    Range,
    Coefficient,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MutableSpec {
    pub mode: Option<Mode>,
    pub pct: u32,
    pub basis: Basis,
    /// Data range `R` for the range basis; defaults to the smallest power of
    /// ten covering every present coefficient.
    pub range: Option<i64>,
    pub c: Option<Vec<Interval>>,
    pub a: Option<Vec<Interval>>,
    pub b: Option<Interval>,
}

impl Default for MutableSpec {
    fn default() -> Self {
        MutableSpec { mode: None, pct: 5, basis: Basis::Range, range: None, c: None, a: None, b: None }
    }
}

fn parse_box(s: &str) -> Result<Interval> {
    match s.split_once("..") {
        Some((lo, hi)) => {
            let bx = Interval::new(int(lo, "box bound")?, int(hi, "box bound")?);
            if bx.is_empty() {
                return Err(usage(format!("empty box {s:?}")));
            }
            Ok(bx)
        }
        None => Ok(Interval::point(int(s, "box value")?)),
    }
}

fn fmt_box(bx: &Interval) -> String {
    if bx.is_point() {
        bx.lo.to_string()
    } else {
        format!("{}..{}", bx.lo, bx.hi)
    }
}

/// Smallest power of ten that is at least every present coefficient.
pub fn default_range(p: &PresentProblem) -> i64 {
    let top = p.c.iter().chain(&p.a).map(|v| v.abs()).max().unwrap_or(0);
    let mut r = 10;
    while r < top {
        r *= 10;
    }
    r
}

impl MutableSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let mut spec = MutableSpec::default();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) =
                part.split_once('=').ok_or_else(|| usage(format!("mutable spec entry {part:?} lacks '='")))?;
            let list = |v: &str| v.split(',').map(|t| parse_box(t.trim())).collect::<Result<Vec<_>>>();
            match key.trim() {
                "mode" => spec.mode = Some(parse_mode(value)?),
                "pct" => spec.pct = int(value, "pct")?,
                "basis" => {
                    spec.basis = match value {
                        "range" => Basis::Range,
                        "coef" => Basis::Coefficient,
                        _ => return Err(usage(format!("unknown basis {value:?}"))),
                    }
                }
                "range" => spec.range = Some(int(value, "range")?),
                "c" => spec.c = Some(list(value)?),
                "a" => spec.a = Some(list(value)?),
                "b" => spec.b = Some(parse_box(value)?),
                other => return Err(usage(format!("unknown mutable spec key {other:?}"))),
            }
        }
        Ok(spec)
    }

    pub fn basis_for(&self, p: &PresentProblem) -> BoxBasis {
        match self.basis {
            Basis::Coefficient => BoxBasis::PerCoefficient,
            Basis::Range => BoxBasis::DataRange(self.range.unwrap_or_else(|| default_range(p))),
        }
    }

    /// `mode` overrides the spec's own mode; constraint mode is the default.
    pub fn resolve(&self, p: &PresentProblem, mode: Option<Mode>) -> Result<MutableSpace> {
        let mode = mode.or(self.mode).unwrap_or(Mode::Constraint);
        let mut h = build_mutable(p, mode, self.pct, self.basis_for(p))?;
        let n = p.n();
        let sized = |what: &str, v: &Vec<Interval>| -> Result<Vec<Interval>> {
            if v.len() != n {
                return Err(usage(format!("{what} lists {} boxes for {n} items", v.len())));
            }
            Ok(v.clone())
        };
        if let Some(c) = &self.c {
            if !mode.c_mutable() && c.iter().zip(&p.c).any(|(bx, &v)| *bx != Interval::point(v)) {
                return Err(usage(format!("objective boxes given in {} mode", mode.name())));
            }
            h.c = sized("c", c)?;
        }
        if let Some(a) = &self.a {
            if !mode.a_mutable() && a.iter().zip(&p.a).any(|(bx, &v)| *bx != Interval::point(v)) {
                return Err(usage(format!("weight boxes given in {} mode", mode.name())));
            }
            h.a = sized("a", a)?;
        }
        if let Some(b) = self.b {
            if !mode.b_mutable() && b != Interval::point(p.b) {
                return Err(usage(format!("right-hand-side box given in {} mode", mode.name())));
            }
            h.b = b;
        }
        h.validate(p)?;
        Ok(h)
    }
}

impl fmt::Display for MutableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(m) = self.mode {
            parts.push(format!("mode={}", m.name()));
        }
        parts.push(format!("pct={}", self.pct));
        parts.push(format!("basis={}", if self.basis == Basis::Range { "range" } else { "coef" }));
        if let Some(r) = self.range {
            parts.push(format!("range={r}"));
        }
        if let Some(c) = &self.c {
            parts.push(format!("c={}", join(c.iter().map(fmt_box))));
        }
        if let Some(a) = &self.a {
            parts.push(format!("a={}", join(a.iter().map(fmt_box))));
        }
        if let Some(b) = &self.b {
            parts.push(format!("b={}", fmt_box(b)));
        }
        f.write_str(&parts.join(";"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example1() -> PresentProblem {
        PresentProblem::new(vec![1, 2, 2], vec![1, 3, 2], 3, vec![]).unwrap()
    }

    #[test]
    fn favored_forms() {
        assert_eq!(
            FavoredSpec::parse("fix+:3,7").unwrap(),
            FavoredSpec::Explicit(FavoredSpace::PositiveFix(vec![3, 7]))
        );
        assert_eq!(FavoredSpec::parse("fix-:2").unwrap(), FavoredSpec::Explicit(FavoredSpace::NegativeFix(vec![2])));
        assert_eq!(
            FavoredSpec::parse("atleast:1,4,9>=1").unwrap(),
            FavoredSpec::Explicit(FavoredSpace::AtLeast { alpha: vec![0, 1, 0, 0, 1, 0, 0, 0, 0, 1], beta: 1 })
        );
        assert_eq!(
            FavoredSpec::parse("auto:D+:seed=5").unwrap(),
            FavoredSpec::Auto { kind: FavoredKind::Positive, seed: 5 }
        );
        assert!(FavoredSpec::parse("fix+3").is_err());
        assert!(FavoredSpec::parse("fix+:x").is_err());
        assert!(FavoredSpec::parse("auto:D?").is_err());
    }

    #[test]
    fn favored_round_trip() {
        for s in ["fix+:3,7", "fix-:", "atleast:1,4*2,9>=1", "auto:D>=:seed=3"] {
            let spec = FavoredSpec::parse(s).unwrap();
            assert_eq!(FavoredSpec::parse(&spec.to_string()).unwrap(), spec, "{s}");
        }
    }

    #[test]
    fn atleast_pads_to_item_count() {
        let d = FavoredSpec::parse("atleast:2>=1").unwrap().resolve(&example1()).unwrap();
        assert_eq!(d, FavoredSpace::AtLeast { alpha: vec![0, 0, 1], beta: 1 });
        assert!(FavoredSpec::parse("fix+:3").unwrap().resolve(&example1()).is_err());
    }

    #[test]
    fn explicit_boxes() {
        let p = example1();
        let h = MutableSpec::parse("mode=constraint;a=1,0..4,0..4").unwrap().resolve(&p, None).unwrap();
        assert_eq!(h.a, vec![Interval::point(1), Interval::new(0, 4), Interval::new(0, 4)]);
        assert_eq!(h.c, vec![Interval::point(1), Interval::point(2), Interval::point(2)]);
        assert_eq!(h.grid_size(), 25);
    }

    #[test]
    fn percentage_boxes() {
        let p = PresentProblem::new(vec![235, 948], vec![135, 848], 500, vec![]).unwrap();
        let h = MutableSpec::parse("pct=5").unwrap().resolve(&p, None).unwrap();
        assert_eq!(h.mode, Mode::Constraint);
        assert_eq!(h.a, vec![Interval::new(85, 185), Interval::new(798, 898)]);
        let h = MutableSpec::parse("pct=5;basis=coef").unwrap().resolve(&p, None).unwrap();
        assert_eq!(h.a, vec![Interval::new(128, 142), Interval::new(805, 891)]);
    }

    #[test]
    fn default_range_is_a_power_of_ten() {
        let p = PresentProblem::new(vec![235, 948], vec![135, 848], 500, vec![]).unwrap();
        assert_eq!(default_range(&p), 1000);
        assert_eq!(default_range(&example1()), 10);
    }

    #[test]
    fn boxes_on_immutable_parts_are_rejected() {
        let p = example1();
        assert!(MutableSpec::parse("mode=objective;a=1,0..4,0..4").unwrap().resolve(&p, None).is_err());
        assert!(MutableSpec::parse("a=1,2").unwrap().resolve(&p, None).is_err());
        assert!(MutableSpec::parse("pct=x").is_err());
        assert!(MutableSpec::parse("colour=red").is_err());
    }

    #[test]
    fn mutable_round_trip() {
        let spec = MutableSpec::parse("mode=all;pct=3;basis=coef;c=1..2,2,2;b=2..4").unwrap();
        assert_eq!(MutableSpec::parse(&spec.to_string()).unwrap(), spec);
    }
}
