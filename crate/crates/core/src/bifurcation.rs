//! Sweeps over pulse amplitudes: sign maps, stable-point count maps,
//! saddle-node thresholds and boundary extraction.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::averaging::{g_sign, PulseDrive};
use crate::error::{Error, Result};
use crate::fixedpoints::{count_stable, ScanSpec};
use crate::model::ModelParams;
use crate::numerics::linspace;

/// Sampled interval `[min, max]` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl AxisRange {
    pub fn new(min: f64, max: f64, n: usize) -> Self {
        Self { min, max, n }
    }

    pub fn single(value: f64) -> Self {
        Self::new(value, value, 1)
    }

    pub fn validate(&self, what: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{what}: bounds must be finite"
            )));
        }
        if self.n == 0 {
            return Err(Error::InvalidParameter(format!(
                "{what}: needs at least one sample"
            )));
        }
        if self.n > 1 && self.max <= self.min {
            return Err(Error::InvalidParameter(format!(
                "{what}: empty window [{}, {}] with {} samples",
                self.min, self.max, self.n
            )));
        }
        Ok(())
    }

    pub fn samples(&self) -> Vec<f64> {
        linspace(self.min, self.max, self.n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    /// Sign of `g` over `(x, V−)`.
    SignMap,
    /// `N_st` over `(V+, V−)`.
    NstMap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: &'static str,
    pub values: Vec<f64>,
}

/// Integer payload on a rectangular grid. `cells[i * second.len() + j]`
/// belongs to `(first[i], second[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub kind: PayloadKind,
    pub first: Axis,
    pub second: Axis,
    pub cells: Vec<i32>,
}

impl RegionGrid {
    pub fn new(kind: PayloadKind, first: Axis, second: Axis, cells: Vec<i32>) -> Result<Self> {
        if cells.len() != first.values.len() * second.values.len() {
            return Err(Error::InvalidParameter(format!(
                "grid has {} cells for a {}x{} lattice",
                cells.len(),
                first.values.len(),
                second.values.len()
            )));
        }
        Ok(Self {
            kind,
            first,
            second,
            cells,
        })
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.first.values.len(), self.second.values.len())
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.cells[i * self.second.values.len() + j]
    }

    /// Rows `(first, second, payload)` in storage order.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, i32)> + '_ {
        let n2 = self.second.values.len();
        self.cells
            .iter()
            .enumerate()
            .map(move |(k, &c)| (self.first.values[k / n2], self.second.values[k % n2], c))
    }
}

/// Sign of `g` over `(x, V−)` at fixed `V+`.
pub fn sign_map(
    p: &ModelParams,
    template: &PulseDrive,
    v_plus: f64,
    v_minus: AxisRange,
    x: AxisRange,
) -> Result<RegionGrid> {
    v_minus.validate("sign map V− axis")?;
    x.validate("sign map x axis")?;
    if v_minus.n < 2 || x.n < 2 {
        return Err(Error::InvalidParameter(
            "sign map needs at least 2 samples per axis".into(),
        ));
    }
    if !(x.min > 0.0 && x.max <= 1.0) {
        return Err(Error::InvalidParameter(
            "sign map x window must lie in (0, 1]".into(),
        ));
    }
    let xs = x.samples();
    let vms = v_minus.samples();
    let cells = xs
        .par_iter()
        .flat_map_iter(|&xv| {
            vms.iter().map(move |&vm| {
                g_sign(p, &template.with_amplitudes(v_plus, vm), xv).map(|s| i32::from(s.as_i8()))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RegionGrid::new(
        PayloadKind::SignMap,
        Axis {
            name: "x",
            values: xs,
        },
        Axis {
            name: "v_minus",
            values: vms,
        },
        cells,
    )
}

/// `N_st` over `(V+, V−)`; cells are independent and assembled in index
/// order, so the result does not depend on the thread count.
pub fn nst_map(
    p: &ModelParams,
    template: &PulseDrive,
    v_plus: AxisRange,
    v_minus: AxisRange,
    scan: &ScanSpec,
) -> Result<RegionGrid> {
    v_plus.validate("V+ axis")?;
    v_minus.validate("V− axis")?;
    scan.validate()?;
    let vps = v_plus.samples();
    let vms = v_minus.samples();
    let cells = vps
        .par_iter()
        .flat_map_iter(|&vp| {
            vms.iter().map(move |&vm| {
                let d = template.with_amplitudes(vp, vm);
                d.validate()?;
                count_stable(p, &d, scan).map(|n| n as i32)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RegionGrid::new(
        PayloadKind::NstMap,
        Axis {
            name: "v_plus",
            values: vps,
        },
        Axis {
            name: "v_minus",
            values: vms,
        },
        cells,
    )
}

/// Saddle-node event on a fixed-`V+` line, as `V−` increases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SaddleNode {
    /// A stable/unstable pair is born: `N_st` grows with `V−`.
    Creation,
    /// A pair annihilates: `N_st` drops with `V−`.
    Annihilation,
}

/// Bracket width in `V−` at which threshold bisection stops.
pub const THRESHOLD_TOL: f64 = 1e-4;

/// Locates the `V−` where `N_st` changes inside `bracket` by bisection
/// on the integer count.
pub fn saddle_node_threshold(
    p: &ModelParams,
    template: &PulseDrive,
    v_plus: f64,
    which: SaddleNode,
    bracket: (f64, f64),
    scan: &ScanSpec,
) -> Result<f64> {
    let (mut lo, mut hi) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let count = |vm: f64| -> Result<usize> {
        let d = template.with_amplitudes(v_plus, vm);
        d.validate()?;
        count_stable(p, &d, scan)
    };
    let n_lo = count(lo)?;
    let n_hi = count(hi)?;
    if n_lo == n_hi {
        return Err(Error::InvalidBracket(format!(
            "N_st = {n_lo} at both V− = {lo} and V− = {hi}"
        )));
    }
    let grows = n_hi > n_lo;
    if grows != (which == SaddleNode::Creation) {
        return Err(Error::InvalidBracket(format!(
            "N_st goes {n_lo} -> {n_hi} over [{lo}, {hi}], not a {which:?}"
        )));
    }
    while hi - lo > THRESHOLD_TOL {
        let mid = 0.5 * (lo + hi);
        if count(mid)? == n_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// A boundary between payload levels `levels.0` and `levels.1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub levels: (i32, i32),
    pub points: Vec<(f64, f64)>,
}

/// Grid edge carrying a boundary point at its midpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EdgeKey {
    /// Between nodes `(i, j)` and `(i + 1, j)`.
    AlongFirst(usize, usize),
    /// Between nodes `(i, j)` and `(i, j + 1)`.
    AlongSecond(usize, usize),
}

/// Marching squares on every integer level of the payload: boundary
/// points sit at midpoints of grid edges whose ends straddle the level;
/// segments are chained into polylines in a deterministic order.
pub fn trace_boundary(grid: &RegionGrid) -> Vec<Polyline> {
    let (n1, n2) = grid.dims();
    if n1 < 2 || n2 < 2 {
        return Vec::new();
    }
    let lo = *grid.cells.iter().min().unwrap();
    let hi = *grid.cells.iter().max().unwrap();
    let mut out = Vec::new();
    for level in lo..hi {
        let above = |i: usize, j: usize| grid.get(i, j) > level;
        let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
        for i in 0..n1 - 1 {
            for j in 0..n2 - 1 {
                // corners counter-clockwise from (i, j)
                let c = [
                    above(i, j),
                    above(i + 1, j),
                    above(i + 1, j + 1),
                    above(i, j + 1),
                ];
                let edges = [
                    EdgeKey::AlongFirst(i, j),
                    EdgeKey::AlongSecond(i + 1, j),
                    EdgeKey::AlongFirst(i, j + 1),
                    EdgeKey::AlongSecond(i, j),
                ];
                let crossing: Vec<usize> = (0..4).filter(|&e| c[e] != c[(e + 1) % 4]).collect();
                match crossing.len() {
                    2 => segments.push((edges[crossing[0]], edges[crossing[1]])),
                    4 => {
                        // saddle: decide by the mean of the corners
                        let sum: i32 = [
                            grid.get(i, j),
                            grid.get(i + 1, j),
                            grid.get(i + 1, j + 1),
                            grid.get(i, j + 1),
                        ]
                        .iter()
                        .sum();
                        let centre_above = 2 * sum > 4 * (2 * level + 1);
                        if centre_above == c[0] {
                            segments.push((edges[0], edges[1]));
                            segments.push((edges[2], edges[3]));
                        } else {
                            segments.push((edges[3], edges[0]));
                            segments.push((edges[1], edges[2]));
                        }
                    }
                    _ => {}
                }
            }
        }
        for chain in chain_segments(&segments) {
            out.push(Polyline {
                levels: (level, level + 1),
                points: chain.iter().map(|&k| edge_midpoint(grid, k)).collect(),
            });
        }
    }
    out
}

fn edge_midpoint(grid: &RegionGrid, key: EdgeKey) -> (f64, f64) {
    let f = &grid.first.values;
    let s = &grid.second.values;
    match key {
        EdgeKey::AlongFirst(i, j) => (0.5 * (f[i] + f[i + 1]), s[j]),
        EdgeKey::AlongSecond(i, j) => (f[i], 0.5 * (s[j] + s[j + 1])),
    }
}

fn chain_segments(segments: &[(EdgeKey, EdgeKey)]) -> Vec<Vec<EdgeKey>> {
    let mut adjacency: BTreeMap<EdgeKey, Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        adjacency.entry(a).or_default().push(k);
        adjacency.entry(b).or_default().push(k);
    }
    let mut used = vec![false; segments.len()];
    let mut chains = Vec::new();
    // open chains start at degree-one edges, closed loops afterwards
    let starts: Vec<EdgeKey> = adjacency
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(&k, _)| k)
        .chain(adjacency.keys().copied())
        .collect();
    for start in starts {
        let mut current = start;
        let mut chain = vec![current];
        while let Some(&seg) = adjacency[&current].iter().find(|&&s| !used[s]) {
            used[seg] = true;
            let (a, b) = segments[seg];
            current = if a == current { b } else { a };
            chain.push(current);
        }
        if chain.len() > 1 {
            chains.push(chain);
        }
    }
    chains
}

/// Second-axis values where polylines cross the line `first = value`,
/// with the levels they separate. Segments lying on the line are ignored.
pub fn crossings_at(polylines: &[Polyline], value: f64) -> Vec<(f64, (i32, i32))> {
    let mut out = Vec::new();
    for line in polylines {
        let first_of_line = out.len();
        for w in line.points.windows(2) {
            let ((a1, a2), (b1, b2)) = (w[0], w[1]);
            if a1 == b1 {
                continue;
            }
            let (l, h) = if a1 < b1 { (a1, b1) } else { (b1, a1) };
            if value >= l && value <= h {
                let t = (value - a1) / (b1 - a1);
                let hit = (a2 + t * (b2 - a2), line.levels);
                // a shared vertex is reported once
                if out.len() > first_of_line && out.last() == Some(&hit) {
                    continue;
                }
                out.push(hit);
            }
        }
    }
    out
}

/// Euclidean distance from `pt` to the nearest polyline segment.
pub fn distance_to_polylines(polylines: &[Polyline], pt: (f64, f64)) -> Option<f64> {
    polylines
        .iter()
        .flat_map(|l| {
            let single = (l.points.len() == 1).then(|| (l.points[0], l.points[0]));
            l.points.windows(2).map(|w| (w[0], w[1])).chain(single)
        })
        .map(|(a, b)| segment_distance(a, b, pt))
        .min_by(f64::total_cmp)
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 {
        (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (cx, cy) = (a.0 + t * dx, a.1 + t * dy);
    ((p.0 - cx).powi(2) + (p.1 - cy).powi(2)).sqrt()
}
