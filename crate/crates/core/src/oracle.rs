//! Brute-force classification of a parameter grid.
//!
//! Every point of `ℋ` is labeled by enumerating all of `{0,1}ⁿ`, independently
//! of the MIP solver. This is the reference the algorithms are tested
//! against, so it is deliberately simple and limited to desk-scale sizes.

use alloc::vec;
use alloc::vec::Vec;

use crate::model::{Distance, FavoredSpace, Kind, MutableSpace, Params, PresentProblem};
use crate::{Error, Result};

pub const DEFAULT_GRID_CEILING: u128 = 1_000_000;
pub const DEFAULT_MAX_ITEMS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ceilings {
    pub grid: u128,
    pub items: usize,
}

impl Default for Ceilings {
    fn default() -> Self {
        Ceilings { grid: DEFAULT_GRID_CEILING, items: DEFAULT_MAX_ITEMS }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Label {
    /// Infeasible, or no optimum is favored.
    Outside,
    WeakOnly,
    Strong,
}

impl Label {
    pub fn name(self) -> &'static str {
        match self {
            Label::Outside => "outside",
            Label::WeakOnly => "weak",
            Label::Strong => "strong",
        }
    }

    pub fn satisfies(self, kind: Kind) -> bool {
        match kind {
            Kind::Weak => self != Label::Outside,
            Kind::Strong => self == Label::Strong,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionPoint {
    pub params: Params,
    pub label: Label,
    /// Optimal value of the whole problem at these parameters.
    pub optimum: Option<i64>,
    /// All optimal solutions as bitmasks, bit `i` for item `i`, ascending.
    pub argmin: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RegionMap {
    pub present: Params,
    /// Grid points in lexicographic order of `(c, a, b)`.
    pub points: Vec<RegionPoint>,
}

impl RegionMap {
    pub fn get(&self, params: &Params) -> Option<&RegionPoint> {
        self.points.iter().find(|pt| &pt.params == params)
    }

    /// `(strong, weak-only, outside)` point counts.
    pub fn counts(&self) -> (usize, usize, usize) {
        let count = |l: Label| self.points.iter().filter(|pt| pt.label == l).count();
        (count(Label::Strong), count(Label::WeakOnly), count(Label::Outside))
    }

    /// Cheapest point whose label satisfies `kind`; ties go to the first in
    /// grid order.
    pub fn optimal_point(&self, dist: &Distance, kind: Kind) -> Option<(&RegionPoint, i64)> {
        self.points
            .iter()
            .filter(|pt| pt.label.satisfies(kind))
            .map(|pt| (pt, dist.cost(&pt.params, &self.present)))
            .fold(None, |best: Option<(&RegionPoint, i64)>, (pt, c)| match best {
                Some((_, b)) if b <= c => best,
                _ => Some((pt, c)),
            })
    }
}

pub fn optimal_cost(map: &RegionMap, dist: &Distance, kind: Kind) -> Option<i64> {
    map.optimal_point(dist, kind).map(|(_, c)| c)
}

pub fn enumerate(p: &PresentProblem, favored: &FavoredSpace, h: &MutableSpace) -> Result<RegionMap> {
    enumerate_with(p, favored, h, Ceilings::default())
}

pub fn enumerate_with(
    p: &PresentProblem,
    favored: &FavoredSpace,
    h: &MutableSpace,
    ceilings: Ceilings,
) -> Result<RegionMap> {
    let n = p.n();
    if n > ceilings.items.min(31) {
        return Err(Error::CeilingExceeded { size: 1u128 << n, ceiling: 1u128 << ceilings.items.min(31) });
    }
    let size = h.grid_size();
    if size > ceilings.grid {
        return Err(Error::CeilingExceeded { size, ceiling: ceilings.grid });
    }
    // 𝒳 and its split by 𝒟 do not depend on the parameters.
    let mut x = vec![0u8; n];
    let mut domain: Vec<(u32, bool)> = Vec::new();
    for mask in 0u32..(1u32 << n) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = ((mask >> i) & 1) as u8;
        }
        if p.in_domain(&x) {
            domain.push((mask, favored.contains(&x)));
        }
    }
    let boxes: Vec<_> = h.c.iter().chain(&h.a).chain(core::iter::once(&h.b)).copied().collect();
    let mut coords: Vec<i64> = boxes.iter().map(|bx| bx.lo).collect();
    let mut points = Vec::with_capacity(size as usize);
    loop {
        let params = Params { c: coords[..n].to_vec(), a: coords[n..2 * n].to_vec(), b: coords[2 * n] };
        points.push(classify(&params, &domain));
        // Odometer, last coordinate fastest.
        let mut k = boxes.len();
        loop {
            if k == 0 {
                return Ok(RegionMap { present: p.params(), points });
            }
            k -= 1;
            if coords[k] < boxes[k].hi {
                coords[k] += 1;
                break;
            }
            coords[k] = boxes[k].lo;
        }
    }
}

fn classify(params: &Params, domain: &[(u32, bool)]) -> RegionPoint {
    let eval = |mask: u32, v: &[i64]| -> i64 {
        v.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &k)| k).sum()
    };
    let mut min_all: Option<i64> = None;
    let mut min_fav: Option<i64> = None;
    let mut min_other: Option<i64> = None;
    let mut argmin = Vec::new();
    for &(mask, fav) in domain {
        if eval(mask, &params.a) < params.b {
            continue;
        }
        let value = eval(mask, &params.c);
        let slot = if fav { &mut min_fav } else { &mut min_other };
        *slot = Some(slot.map_or(value, |m| m.min(value)));
        match min_all {
            Some(m) if value > m => {}
            Some(m) if value == m => argmin.push(mask),
            _ => {
                min_all = Some(value);
                argmin.clear();
                argmin.push(mask);
            }
        }
    }
    let label = match (min_all, min_fav) {
        (Some(all), Some(fav)) if all == fav => match min_other {
            Some(other) if all > other - 1 => Label::WeakOnly,
            _ => Label::Strong,
        },
        _ => Label::Outside,
    };
    RegionPoint { params: params.clone(), label, optimum: min_all, argmin }
}
