//! Instance files.
//!
//! The native format is line based; `#` starts a comment:
//!
//! ```text
//! cfex-instance 1
//! n 3
//! c 1 2 2
//! a 1 3 2
//! b 3
//! row 1 0 1 <= 1
//! favored fix+:2
//! mutable mode=constraint;a=1,0..4,0..4
//! distance-c 1 1 1
//! distance-a 1 1 1
//! distance-b 1
//! ```
//!
//! `row`, `favored`, `mutable` and the distance lines are optional. Files that
//! do not start with the header are read as kplib knapsack files.

use std::fmt::Write as _;
use std::path::Path;

use cfex_core::instances::{parse_kplib, to_cover, KplibFormat};
use cfex_core::mip::Comparator;
use cfex_core::{CeInstance, Distance, LinearRow, Mode, PresentProblem};

use crate::spec::{FavoredSpec, MutableSpec};
use crate::{Error, Result};

pub const HEADER: &str = "cfex-instance 1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub present: PresentProblem,
    pub favored: Option<FavoredSpec>,
    pub mutable: Option<MutableSpec>,
    pub distance: Option<Distance>,
}

impl InstanceFile {
    pub fn bare(present: PresentProblem) -> Self {
        InstanceFile { present, favored: None, mutable: None, distance: None }
    }

    /// Command-line specs take precedence over the file's own.
    pub fn assemble(
        &self,
        favored: Option<&FavoredSpec>,
        mutable: Option<&MutableSpec>,
        mode: Option<Mode>,
    ) -> Result<CeInstance> {
        let favored = favored
            .or(self.favored.as_ref())
            .ok_or_else(|| Error::Usage("no favored space given (use --favored)".into()))?
            .resolve(&self.present)?;
        let default = MutableSpec::default();
        let mutable = mutable.or(self.mutable.as_ref()).unwrap_or(&default).resolve(&self.present, mode)?;
        let distance = self.distance.clone().unwrap_or_else(|| Distance::unit(self.present.n()));
        Ok(CeInstance::new(self.present.clone(), favored, mutable, distance)?)
    }
}

fn bad(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Usage(format!("line {line}: {msg}"))
}

fn ints(line: usize, tokens: &[&str]) -> Result<Vec<i64>> {
    tokens.iter().map(|t| t.parse().map_err(|_| bad(line, format!("expected an integer, got {t:?}")))).collect()
}

pub fn parse_native(text: &str) -> Result<InstanceFile> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    match lines.next() {
        Some((_, HEADER)) => {}
        Some((no, other)) => return Err(bad(no, format!("expected {HEADER:?}, got {other:?}"))),
        None => return Err(Error::Usage("empty instance file".into())),
    }
    let mut n = None;
    let (mut c, mut a, mut b) = (None, None, None);
    let mut rows = Vec::new();
    let mut file = InstanceFile::bare(PresentProblem { c: Vec::new(), a: Vec::new(), b: 0, rows: Vec::new() });
    let (mut dc, mut da, mut db) = (None, None, None);
    for (no, line) in lines {
        let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let tokens: Vec<&str> = rest.split_whitespace().collect();
        let vector = |what: &str| -> Result<Vec<i64>> {
            let n = n.ok_or_else(|| bad(no, format!("{what} before n")))?;
            let v = ints(no, &tokens)?;
            if v.len() != n {
                return Err(bad(no, format!("{what} has {} entries, expected {n}", v.len())));
            }
            Ok(v)
        };
        let scalar = || -> Result<i64> {
            match ints(no, &tokens)?.as_slice() {
                [v] => Ok(*v),
                _ => Err(bad(no, format!("{key} takes one integer"))),
            }
        };
        match key {
            "n" => n = Some(usize::try_from(scalar()?).map_err(|_| bad(no, "n must be nonnegative"))?),
            "c" => c = Some(vector("c")?),
            "a" => a = Some(vector("a")?),
            "b" => b = Some(scalar()?),
            "row" => {
                let n = n.ok_or_else(|| bad(no, "row before n"))?;
                if tokens.len() != n + 2 {
                    return Err(bad(no, format!("row needs {n} coefficients, a comparator and a bound")));
                }
                let comparator = match tokens[n] {
                    "<=" => Comparator::Le,
                    ">=" => Comparator::Ge,
                    "=" => Comparator::Eq,
                    other => return Err(bad(no, format!("unknown comparator {other:?}"))),
                };
                let coefficients = ints(no, &tokens[..n])?;
                let rhs = ints(no, &tokens[n + 1..])?[0];
                rows.push(LinearRow::new(coefficients, comparator, rhs));
            }
            "favored" => file.favored = Some(FavoredSpec::parse(rest).map_err(|e| bad(no, e))?),
            "mutable" => file.mutable = Some(MutableSpec::parse(rest).map_err(|e| bad(no, e))?),
            "distance-c" => dc = Some(vector("distance-c")?),
            "distance-a" => da = Some(vector("distance-a")?),
            "distance-b" => db = Some(scalar()?),
            other => return Err(bad(no, format!("unknown key {other:?}"))),
        }
    }
    let missing = |what: &str| Error::Usage(format!("instance file lacks {what}"));
    let n = n.ok_or_else(|| missing("n"))?;
    file.present = PresentProblem::new(
        c.ok_or_else(|| missing("c"))?,
        a.ok_or_else(|| missing("a"))?,
        b.ok_or_else(|| missing("b"))?,
        rows,
    )?;
    if dc.is_some() || da.is_some() || db.is_some() {
        let unit = Distance::unit(n);
        let d = Distance { c: dc.unwrap_or(unit.c), a: da.unwrap_or(unit.a), b: db.unwrap_or(unit.b) };
        d.validate(n)?;
        file.distance = Some(d);
    }
    Ok(file)
}

pub fn write_native(file: &InstanceFile) -> String {
    let p = &file.present;
    let list = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}");
    let _ = writeln!(out, "n {}", p.n());
    let _ = writeln!(out, "c {}", list(&p.c));
    let _ = writeln!(out, "a {}", list(&p.a));
    let _ = writeln!(out, "b {}", p.b);
    for row in &p.rows {
        let cmp = match row.comparator {
            Comparator::Le => "<=",
            Comparator::Ge => ">=",
            Comparator::Eq => "=",
        };
        let _ = writeln!(out, "row {} {cmp} {}", list(&row.coefficients), row.rhs);
    }
    if let Some(f) = &file.favored {
        let _ = writeln!(out, "favored {f}");
    }
    if let Some(m) = &file.mutable {
        let _ = writeln!(out, "mutable {m}");
    }
    if let Some(d) = &file.distance {
        let _ = writeln!(out, "distance-c {}", list(&d.c));
        let _ = writeln!(out, "distance-a {}", list(&d.a));
        let _ = writeln!(out, "distance-b {}", d.b);
    }
    out
}

/// Reads either format, deciding on the header line.
pub fn parse_any(text: &str, kplib: KplibFormat) -> Result<InstanceFile> {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#'));
    if first.is_some_and(|l| l.starts_with("cfex-instance")) {
        parse_native(text)
    } else {
        Ok(InstanceFile::bare(to_cover(&parse_kplib(text, kplib)?)))
    }
}

pub fn load(path: &Path, kplib: KplibFormat) -> Result<InstanceFile> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_owned(), source })?;
    parse_any(&text, kplib).map_err(|e| match e {
        Error::Usage(msg) => Error::Usage(format!("{}: {msg}", path.display())),
        other => other,
    })
}
