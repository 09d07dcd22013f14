//! Instance ingestion, synthetic generators and the construction of favored
//! and mutable spaces used in the experiments.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write as _;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ce::{CeInstance, MipMinimizer};
use crate::mip::Comparator;
use crate::model::{
    Distance, FavoredSpace, Interval, LinearRow, Minimizer, Mode, MutableSpace, PresentProblem, Region,
};
use crate::{Error, Result};

/// A knapsack-style instance: a capacity (read as demand) and
/// `(profit, weight)` pairs (read as `(cost, weight)`).
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RawKnapsackInstance {
    pub capacity: i64,
    pub items: Vec<(i64, i64)>,
}

impl RawKnapsackInstance {
    pub fn n(&self) -> usize {
        self.items.len()
    }

    pub fn weights(&self) -> Vec<i64> {
        self.items.iter().map(|&(_, w)| w).collect()
    }

    pub fn costs(&self) -> Vec<i64> {
        self.items.iter().map(|&(c, _)| c).collect()
    }
}

/// Column order of the item lines in kplib-style files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KplibFormat {
    #[default]
    ProfitWeight,
    WeightProfit,
}

/// Parses `n`, the capacity, then `n` lines of two integers. Blank lines are
/// skipped; anything else is an error naming the line.
pub fn parse_kplib(text: &str, format: KplibFormat) -> Result<RawKnapsackInstance> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    let mut scalar = |what: &str| -> Result<i64> {
        let (no, line) = lines.next().ok_or_else(|| Error::Instance(format!("missing {what}")))?;
        let mut tokens = line.split_whitespace();
        let v = parse_int(tokens.next().unwrap_or(""), no)?;
        if tokens.next().is_some() {
            return Err(Error::Instance(format!("line {no}: expected a single {what}")));
        }
        Ok(v)
    };
    let n = scalar("item count")?;
    let capacity = scalar("capacity")?;
    if n <= 0 {
        return Err(Error::Instance(format!("item count must be positive, got {n}")));
    }
    let mut items = Vec::with_capacity(n as usize);
    for (no, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::Instance(format!("line {no}: expected 2 integers, found {}", tokens.len())));
        }
        let (x, y) = (parse_int(tokens[0], no)?, parse_int(tokens[1], no)?);
        if x < 0 || y < 0 {
            return Err(Error::Instance(format!("line {no}: negative entry")));
        }
        items.push(match format {
            KplibFormat::ProfitWeight => (x, y),
            KplibFormat::WeightProfit => (y, x),
        });
    }
    if items.len() != n as usize {
        return Err(Error::Instance(format!("header announces {n} items, found {}", items.len())));
    }
    if capacity < 0 {
        return Err(Error::Instance("negative capacity".into()));
    }
    Ok(RawKnapsackInstance { capacity, items })
}

fn parse_int(token: &str, line: usize) -> Result<i64> {
    token.parse().map_err(|_| Error::Instance(format!("line {line}: `{token}` is not an integer")))
}

pub fn serialize_kplib(raw: &RawKnapsackInstance, format: KplibFormat) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", raw.n());
    let _ = writeln!(out, "{}", raw.capacity);
    for &(profit, weight) in &raw.items {
        let (x, y) = match format {
            KplibFormat::ProfitWeight => (profit, weight),
            KplibFormat::WeightProfit => (weight, profit),
        };
        let _ = writeln!(out, "{x} {y}");
    }
    out
}

/// Cover reading: minimize total cost subject to covering the capacity.
pub fn to_cover(raw: &RawKnapsackInstance) -> PresentProblem {
    PresentProblem { c: raw.costs(), a: raw.weights(), b: raw.capacity, rows: Vec::new() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Correlation {
    Uncorrelated,
    Strong,
}

impl Correlation {
    pub fn name(self) -> &'static str {
        match self {
            Correlation::Uncorrelated => "uncorrelated",
            Correlation::Strong => "strong",
        }
    }
}

/// Weights uniform in `[1, R]`; costs uniform in `[1, R]` or `weight + R/10`;
/// demand half the total weight, rounded half up.
pub fn generate(n: usize, range: i64, correlation: Correlation, seed: u64) -> Result<RawKnapsackInstance> {
    if n == 0 {
        return Err(Error::Instance("cannot generate an empty instance".into()));
    }
    if range < 10 {
        return Err(Error::Instance(format!("data range must be at least 10, got {range}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(n);
    for _ in 0..n {
        let weight = rng.random_range(1..=range);
        let cost = match correlation {
            Correlation::Uncorrelated => rng.random_range(1..=range),
            Correlation::Strong => weight + range / 10,
        };
        items.push((cost, weight));
    }
    let total: i64 = items.iter().map(|&(_, w)| w).sum();
    Ok(RawKnapsackInstance { capacity: (total + 1) / 2, items })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FavoredKind {
    /// Positive fixations of items outside the present solution.
    Positive,
    /// Negative fixations of items inside the present solution.
    Negative,
    /// At least one of a random tenth of the items.
    AtLeast,
}

impl FavoredKind {
    pub fn name(self) -> &'static str {
        match self {
            FavoredKind::Positive => "D+",
            FavoredKind::Negative => "D-",
            FavoredKind::AtLeast => "D>=",
        }
    }
}

/// `⌈0.1 · b̂ / mean(â)⌉ = ⌈b̂·n / (10·Σâ)⌉`, zero for nonpositive demand.
pub fn fixation_count(p: &PresentProblem) -> Result<usize> {
    if p.b <= 0 {
        return Ok(0);
    }
    let total: i128 = p.a.iter().map(|&a| a as i128).sum();
    if total <= 0 {
        return Err(Error::Instance("fixation count needs a positive total weight".into()));
    }
    let num = p.b as i128 * p.n() as i128;
    let den = 10 * total;
    Ok(((num + den - 1) / den) as usize)
}

/// An optimal solution of the present problem.
pub fn present_solution(p: &PresentProblem) -> Result<Vec<u8>> {
    let favored = FavoredSpace::PositiveFix(Vec::new());
    MipMinimizer::default()
        .minimize(p, &favored, &p.params(), Region::All)?
        .map(|(_, x)| x)
        .ok_or_else(|| Error::Instance("the present problem is infeasible".into()))
}

pub fn build_favored(p: &PresentProblem, kind: FavoredKind, seed: u64) -> Result<FavoredSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.n();
    let mut pick = |candidates: Vec<usize>, k: usize| -> Result<Vec<usize>> {
        if candidates.len() < k {
            return Err(Error::Instance(format!(
                "{} needs {k} candidate items but only {} qualify",
                kind.name(),
                candidates.len()
            )));
        }
        let mut chosen: Vec<usize> = sample(&mut rng, candidates.len(), k).into_iter().map(|j| candidates[j]).collect();
        chosen.sort_unstable();
        Ok(chosen)
    };
    match kind {
        FavoredKind::Positive | FavoredKind::Negative => {
            let k = fixation_count(p)?;
            let x = present_solution(p)?;
            let wanted = u8::from(kind == FavoredKind::Negative);
            let candidates = (0..n).filter(|&i| x[i] == wanted).collect();
            let chosen = pick(candidates, k)?;
            Ok(match kind {
                FavoredKind::Positive => FavoredSpace::PositiveFix(chosen),
                _ => FavoredSpace::NegativeFix(chosen),
            })
        }
        FavoredKind::AtLeast => {
            let k = n.div_ceil(10);
            let chosen = pick((0..n).collect(), k)?;
            let mut alpha = vec![0; n];
            chosen.iter().for_each(|&i| alpha[i] = 1);
            Ok(FavoredSpace::AtLeast { alpha, beta: 1 })
        }
    }
}

/// How box half-widths are derived from the percentage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BoxBasis {
    /// `⌈pct·|v|/100⌉` for each coefficient `v`.
    PerCoefficient,
    /// `⌈pct·R/100⌉` for every coefficient, given the data range `R`.
    DataRange(i64),
}

fn half_width(pct: u32, value: i64, basis: BoxBasis) -> i64 {
    let base = match basis {
        BoxBasis::PerCoefficient => value.abs(),
        BoxBasis::DataRange(r) => r.abs(),
    };
    (pct as i64 * base + 99) / 100
}

/// Boxes of `pct` percent around the present values for the components
/// mutable in `mode`; weights never drop below zero. In constraint mode only
/// the weights move.
pub fn build_mutable(p: &PresentProblem, mode: Mode, pct: u32, basis: BoxBasis) -> Result<MutableSpace> {
    let around = |v: i64| Interval::new(v - half_width(pct, v, basis), v + half_width(pct, v, basis));
    let mut h = MutableSpace::degenerate(p, mode);
    if mode.c_mutable() {
        h.c = p.c.iter().map(|&v| around(v)).collect();
    }
    if mode.a_mutable() {
        h.a = p.a.iter().map(|&v| around(v)).map(|bx| Interval::new(bx.lo.max(0.min(bx.hi)), bx.hi)).collect();
    }
    if matches!(mode, Mode::Rhs | Mode::All) {
        h.b = around(p.b);
    }
    h.validate(p)?;
    Ok(h)
}

/// Shape of the small random instances used for cross-checking against the
/// oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub n: usize,
    pub mode: Mode,
    /// Upper limit on `|ℋ|`; boxes are collapsed until it holds.
    pub max_grid: u128,
    /// Add a random immutable row.
    pub side_row: bool,
}

/// A random desk-scale instance; deterministic per seed.
pub fn random_instance(seed: u64, shape: RandomShape) -> Result<CeInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shape.n.max(1);
    let c: Vec<i64> = (0..n).map(|_| rng.random_range(1..=6)).collect();
    let a: Vec<i64> = (0..n).map(|_| rng.random_range(0..=6)).collect();
    let total: i64 = a.iter().sum();
    let b = rng.random_range(1..=total.max(1));
    let mut rows = Vec::new();
    if shape.side_row {
        let coefficients: Vec<i64> = (0..n).map(|_| rng.random_range(0..=1)).collect();
        let limit = rng.random_range(1..=n as i64);
        rows.push(LinearRow::new(coefficients, Comparator::Le, limit));
    }
    let p = PresentProblem::new(c, a, b, rows)?;
    // Favor solutions the present optimum is not, when there is one.
    let present = crate::model::Enumeration
        .minimize(&p, &FavoredSpace::PositiveFix(Vec::new()), &p.params(), Region::All)?
        .map_or(vec![0; n], |(_, x)| x);
    let outside: Vec<usize> = (0..n).filter(|&i| present[i] == 0).collect();
    let inside: Vec<usize> = (0..n).filter(|&i| present[i] == 1).collect();
    let favored = match rng.random_range(0..3) {
        0 if !outside.is_empty() => {
            let k = rng.random_range(1..=2.min(outside.len()));
            FavoredSpace::PositiveFix(
                sorted_sample(&mut rng, outside.len(), k).into_iter().map(|j| outside[j]).collect(),
            )
        }
        1 if !inside.is_empty() => {
            let k = rng.random_range(1..=2.min(inside.len()));
            FavoredSpace::NegativeFix(sorted_sample(&mut rng, inside.len(), k).into_iter().map(|j| inside[j]).collect())
        }
        _ => {
            let alpha: Vec<i64> = (0..n).map(|i| if present[i] == 1 { 0 } else { rng.random_range(0..=2) }).collect();
            FavoredSpace::AtLeast { alpha, beta: rng.random_range(1..=2) }
        }
    };
    let mut h = MutableSpace::degenerate(&p, shape.mode);
    let widen = |rng: &mut ChaCha8Rng, v: i64, floor: Option<i64>| {
        let lo = v - rng.random_range(0..=3);
        Interval::new(floor.map_or(lo, |f| lo.max(f.min(v))), v + rng.random_range(0..=3))
    };
    if shape.mode.c_mutable() {
        h.c = p.c.iter().map(|&v| widen(&mut rng, v, None)).collect();
    }
    if shape.mode.a_mutable() {
        h.a = p.a.iter().map(|&v| widen(&mut rng, v, Some(0))).collect();
    }
    if matches!(shape.mode, Mode::Rhs | Mode::All) {
        h.b = widen(&mut rng, p.b, None);
        if shape.mode == Mode::Rhs {
            h.b = Interval::new(h.b.lo - 2, h.b.hi + 2);
        }
    }
    // Shrink toward the present values until the grid is small enough.
    let present: Vec<i64> = p.c.iter().chain(&p.a).copied().chain(core::iter::once(p.b)).collect();
    while h.grid_size() > shape.max_grid {
        let mut boxes: Vec<(&mut Interval, i64)> =
            h.c.iter_mut()
                .chain(h.a.iter_mut())
                .chain(core::iter::once(&mut h.b))
                .zip(present.iter().copied())
                .filter(|(bx, _)| !bx.is_point())
                .collect();
        let pick = rng.random_range(0..boxes.len());
        let (bx, v) = &mut boxes[pick];
        if bx.hi > *v {
            bx.hi -= 1;
        } else {
            bx.lo += 1;
        }
    }
    let distance = Distance {
        c: (0..n).map(|_| rng.random_range(1..=2)).collect(),
        a: (0..n).map(|_| rng.random_range(1..=2)).collect(),
        b: rng.random_range(1..=2),
    };
    CeInstance::new(p, favored, h, distance)
}

fn sorted_sample(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    let mut v = sample(rng, n, k).into_vec();
    v.sort_unstable();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE1_WEIGHTS: [i64; 10] = [135, 848, 764, 256, 496, 450, 652, 789, 94, 29];

    fn table1() -> RawKnapsackInstance {
        let items = TABLE1_WEIGHTS.iter().map(|&w| (w + 100, w)).collect();
        RawKnapsackInstance { capacity: 2358, items }
    }

    #[test]
    fn parse_example() {
        let raw = parse_kplib("3\n3\n1 1\n2 3\n2 2\n", KplibFormat::ProfitWeight).unwrap();
        assert_eq!(raw.capacity, 3);
        assert_eq!(raw.items, vec![(1, 1), (2, 3), (2, 2)]);
    }

    #[test]
    fn parse_swapped_columns() {
        let raw = parse_kplib("1\n3\n\n5 7\n", KplibFormat::WeightProfit).unwrap();
        assert_eq!(raw.items, vec![(7, 5)]);
    }

    #[test]
    fn parse_rejects_count_mismatch() {
        let err = parse_kplib("2\n5\n1 1\n", KplibFormat::ProfitWeight).unwrap_err();
        assert!(matches!(err, Error::Instance(msg) if msg.contains("2 items")));
    }

    #[test]
    fn parse_reports_line_numbers() {
        let err = parse_kplib("2\n5\n1 1\n1 x\n", KplibFormat::ProfitWeight).unwrap_err();
        assert!(matches!(err, Error::Instance(msg) if msg.starts_with("line 4")));
        assert!(parse_kplib("1\n5\n1 1 1\n", KplibFormat::ProfitWeight).is_err());
    }

    #[test]
    fn kplib_round_trip() {
        for format in [KplibFormat::ProfitWeight, KplibFormat::WeightProfit] {
            let text = serialize_kplib(&table1(), format);
            assert_eq!(parse_kplib(&text, format).unwrap(), table1());
            assert_eq!(serialize_kplib(&parse_kplib(&text, format).unwrap(), format), text);
        }
    }

    #[test]
    fn table1_fixes_one_item() {
        assert_eq!(fixation_count(&to_cover(&table1())).unwrap(), 1);
    }

    #[test]
    fn zero_demand_fixes_nothing() {
        let mut raw = table1();
        raw.capacity = 0;
        let p = to_cover(&raw);
        assert_eq!(present_solution(&p).unwrap(), vec![0; 10]);
        assert_eq!(build_favored(&p, FavoredKind::Positive, 1).unwrap(), FavoredSpace::PositiveFix(vec![]));
    }

    #[test]
    fn positive_fixations_avoid_present_solution() {
        let p = to_cover(&table1());
        let x = present_solution(&p).unwrap();
        for seed in 0..20 {
            let FavoredSpace::PositiveFix(idx) = build_favored(&p, FavoredKind::Positive, seed).unwrap() else {
                panic!("wrong variant");
            };
            assert!(idx.iter().all(|&i| x[i] == 0));
            assert_eq!(build_favored(&p, FavoredKind::Positive, seed).unwrap(), FavoredSpace::PositiveFix(idx));
        }
    }

    #[test]
    fn at_least_picks_a_tenth() {
        let p = to_cover(&table1());
        let FavoredSpace::AtLeast { alpha, beta } = build_favored(&p, FavoredKind::AtLeast, 3).unwrap() else {
            panic!("wrong variant");
        };
        assert_eq!(alpha.iter().sum::<i64>(), 1);
        assert_eq!(beta, 1);
    }

    #[test]
    fn strong_correlation_offsets_costs() {
        let raw = generate(50, 1000, Correlation::Strong, 9).unwrap();
        assert!(raw.items.iter().all(|&(c, w)| c - w == 100 && (1..=1000).contains(&w)));
        assert_eq!(raw, generate(50, 1000, Correlation::Strong, 9).unwrap());
    }

    #[test]
    fn single_item_demand_rounds_half_up() {
        let raw = generate(1, 1000, Correlation::Uncorrelated, 4).unwrap();
        assert_eq!(raw.capacity, (raw.items[0].1 + 1) / 2);
    }

    #[test]
    fn data_range_boxes() {
        let p = to_cover(&table1());
        let h = build_mutable(&p, Mode::Constraint, 5, BoxBasis::DataRange(1000)).unwrap();
        assert!(h.a.iter().zip(&p.a).all(|(bx, &w)| bx.hi == w + 50 && bx.lo == (w - 50).max(0)));
        assert!(h.c.iter().all(Interval::is_point) && h.b.is_point());
    }

    #[test]
    fn per_coefficient_boxes() {
        let p = to_cover(&table1());
        let h = build_mutable(&p, Mode::Constraint, 5, BoxBasis::PerCoefficient).unwrap();
        assert_eq!(h.a[9], Interval::new(27, 31));
        let flat = build_mutable(&p, Mode::All, 0, BoxBasis::PerCoefficient).unwrap();
        assert_eq!(flat.grid_size(), 1);
    }

    #[test]
    fn random_instances_respect_the_grid_limit() {
        for seed in 0..50 {
            for mode in [Mode::Objective, Mode::Constraint, Mode::Rhs, Mode::All] {
                let shape = RandomShape { n: 5, mode, max_grid: 2_000, side_row: seed % 2 == 0 };
                let inst = random_instance(seed, shape).unwrap();
                assert!(inst.mutable.grid_size() <= 2_000);
            }
        }
    }
}
