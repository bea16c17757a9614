//! Marching-squares level curves on a [`SweepGrid`].
//!
//! Nodes with `value >= level` count as inside. Each crossing edge gets one
//! point, found by bisection of the grid's own quantity along the edge (or by
//! linear interpolation in [`extract_level_curve_linear`]). Segments sharing
//! an edge are chained into polylines; closed loops repeat their first point.
//!
//! A level set can coincide with a grid line, as the `λ₀ = ±1` columns of a
//! ratio grid do at level 1. Runs of two or more consecutive nodes equal to
//! the level along a row or column are reported as their own polylines, and
//! marching-squares segments lying on such a run are dropped in their favour.

use alloc::collections::btree_map::Entry;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use super::SweepGrid;
use crate::error::Result;

/// Bisection stops once the quantity is within this relative distance of the level.
pub const LEVEL_REL_TOL: f64 = 1e-6;

const MAX_BISECTIONS: usize = 80;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LevelCurve {
    pub level: f64,
    /// `(chi0, lambda0)` pairs in traversal order.
    pub points: Vec<(f64, f64)>,
}

impl LevelCurve {
    pub fn is_closed(&self) -> bool {
        self.points.len() > 2 && self.points.first() == self.points.last()
    }
}

/// Grid edge: `H(i, j)` joins nodes `(i, j)`–`(i+1, j)` (along `χ₀`),
/// `V(i, j)` joins `(i, j)`–`(i, j+1)` (along `λ₀`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Edge {
    H(usize, usize),
    V(usize, usize),
}

impl Edge {
    fn nodes(self) -> ((usize, usize), (usize, usize)) {
        match self {
            Edge::H(i, j) => ((i, j), (i + 1, j)),
            Edge::V(i, j) => ((i, j), (i, j + 1)),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Crossing {
    point: (f64, f64),
    // grid node the crossing landed on, when that node sits on the level
    node: Option<(usize, usize)>,
}

struct Tracer<'g> {
    grid: &'g SweepGrid,
    level: f64,
    eq_tol: f64,
}

impl<'g> Tracer<'g> {
    fn value(&self, (i, j): (usize, usize)) -> f64 {
        self.grid.value(i, j)
    }

    fn inside(&self, node: (usize, usize)) -> bool {
        self.value(node) >= self.level
    }

    fn on_level(&self, node: (usize, usize)) -> bool {
        (self.value(node) - self.level).abs() <= self.eq_tol
    }

    fn coords(&self, (i, j): (usize, usize)) -> (f64, f64) {
        (self.grid.chi0_axis[i], self.grid.lambda0_axis[j])
    }

    fn crosses(&self, e: Edge) -> bool {
        let (a, b) = e.nodes();
        self.inside(a) != self.inside(b)
    }

    fn locate<F>(&self, e: Edge, refine: &mut F) -> Result<Crossing>
    where
        F: FnMut(f64, f64) -> Result<Option<f64>>,
    {
        let (na, nb) = e.nodes();
        for n in [na, nb] {
            if self.on_level(n) {
                return Ok(Crossing {
                    point: self.coords(n),
                    node: Some(n),
                });
            }
        }
        let (pa, pb) = (self.coords(na), self.coords(nb));
        let at = |t: f64| (pa.0 + t * (pb.0 - pa.0), pa.1 + t * (pb.1 - pa.1));
        let (va, vb) = (self.value(na), self.value(nb));
        let linear_t = (self.level - va) / (vb - va);

        let scale = self.level.abs().max(f64::MIN_POSITIVE);
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut g_lo = va - self.level;
        let mut best = (linear_t, f64::INFINITY);
        for _ in 0..MAX_BISECTIONS {
            let t = 0.5 * (lo + hi);
            let (x, y) = at(t);
            let g = match refine(x, y)? {
                Some(v) => v - self.level,
                None => {
                    best = (linear_t, 0.0);
                    break;
                }
            };
            if g.abs() < best.1 {
                best = (t, g.abs());
            }
            if g.abs() <= LEVEL_REL_TOL * scale {
                break;
            }
            if (g < 0.0) == (g_lo < 0.0) {
                lo = t;
                g_lo = g;
            } else {
                hi = t;
            }
        }
        Ok(Crossing {
            point: at(best.0),
            node: None,
        })
    }

    /// Segments in cell `(i, j)` as pairs of crossing edges.
    fn cell_segments(&self, i: usize, j: usize, out: &mut Vec<(Edge, Edge)>) {
        let bottom = Edge::H(i, j);
        let right = Edge::V(i + 1, j);
        let top = Edge::H(i, j + 1);
        let left = Edge::V(i, j);
        let crossing: Vec<Edge> = [bottom, right, top, left]
            .into_iter()
            .filter(|e| self.crosses(*e))
            .collect();
        match crossing.len() {
            2 => out.push((crossing[0], crossing[1])),
            4 => {
                let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
                let center = corners.iter().map(|&n| self.value(n)).sum::<f64>() / 4.0;
                let a_inside = self.inside((i, j));
                let center_inside = center >= self.level;
                if a_inside == center_inside {
                    // a and c connected through the centre: cut off b and d
                    out.push((bottom, right));
                    out.push((top, left));
                } else {
                    out.push((left, bottom));
                    out.push((right, top));
                }
            }
            _ => {}
        }
    }

    fn level_runs(&self) -> Vec<Vec<(usize, usize)>> {
        let (nx, ny) = self.grid.shape();
        let mut runs = Vec::new();
        let mut scan = |line: &mut dyn Iterator<Item = (usize, usize)>| {
            let mut run: Vec<(usize, usize)> = Vec::new();
            for n in line {
                if self.on_level(n) {
                    run.push(n);
                } else {
                    if run.len() >= 2 {
                        runs.push(core::mem::take(&mut run));
                    }
                    run.clear();
                }
            }
            if run.len() >= 2 {
                runs.push(run);
            }
        };
        for j in 0..ny {
            scan(&mut (0..nx).map(|i| (i, j)));
        }
        for i in 0..nx {
            scan(&mut (0..ny).map(|j| (i, j)));
        }
        runs
    }
}

fn adjacent(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0.abs_diff(b.0) + a.1.abs_diff(b.1) == 1
}

fn trace<F>(grid: &SweepGrid, level: f64, mut refine: F) -> Result<Vec<LevelCurve>>
where
    F: FnMut(f64, f64) -> Result<Option<f64>>,
{
    let (lo, hi) = grid.min_max();
    if !level.is_finite() || level < lo || level > hi {
        return Ok(Vec::new());
    }
    let tracer = Tracer {
        grid,
        level,
        eq_tol: 1e-12 * level.abs().max(1.0),
    };
    let (nx, ny) = grid.shape();

    let mut segments = Vec::new();
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            tracer.cell_segments(i, j, &mut segments);
        }
    }

    let mut crossings: BTreeMap<Edge, Crossing> = BTreeMap::new();
    for &(a, b) in &segments {
        for e in [a, b] {
            if let Entry::Vacant(slot) = crossings.entry(e) {
                slot.insert(tracer.locate(e, &mut refine)?);
            }
        }
    }

    segments.retain(|(a, b)| match (crossings[a].node, crossings[b].node) {
        (Some(na), Some(nb)) => !adjacent(na, nb),
        _ => true,
    });

    let mut incident: BTreeMap<Edge, Vec<usize>> = BTreeMap::new();
    for (k, &(a, b)) in segments.iter().enumerate() {
        incident.entry(a).or_default().push(k);
        incident.entry(b).or_default().push(k);
    }

    let mut used = alloc::vec![false; segments.len()];
    let mut curves = Vec::new();
    let walk = |start: Edge, used: &mut Vec<bool>| -> Option<Vec<(f64, f64)>> {
        let mut points = alloc::vec![crossings[&start].point];
        let mut at = start;
        loop {
            let next_seg = incident[&at].iter().copied().find(|&k| !used[k])?;
            used[next_seg] = true;
            let (a, b) = segments[next_seg];
            at = if a == at { b } else { a };
            points.push(crossings[&at].point);
            if !incident[&at].iter().any(|&k| !used[k]) {
                return Some(points);
            }
        }
    };

    let ends: Vec<Edge> = incident
        .iter()
        .filter(|(_, segs)| segs.len() == 1)
        .map(|(e, _)| *e)
        .collect();
    for e in ends {
        if let Some(points) = walk(e, &mut used) {
            curves.push(LevelCurve { level, points });
        }
    }
    let starts: Vec<Edge> = segments.iter().map(|s| s.0).collect();
    for e in starts {
        if let Some(points) = walk(e, &mut used) {
            curves.push(LevelCurve { level, points });
        }
    }

    for run in tracer.level_runs() {
        curves.push(LevelCurve {
            level,
            points: run.into_iter().map(|n| tracer.coords(n)).collect(),
        });
    }
    Ok(curves)
}

/// Level curves with crossings refined against the grid's own quantity
/// (re-evaluated through quadrature) to [`LEVEL_REL_TOL`].
pub fn extract_level_curve(grid: &SweepGrid, level: f64) -> Result<Vec<LevelCurve>> {
    trace(grid, level, |chi0, lambda0| grid.evaluate(chi0, lambda0).map(Some))
}

/// Level curves with linearly interpolated crossings; no re-evaluation.
pub fn extract_level_curve_linear(grid: &SweepGrid, level: f64) -> Result<Vec<LevelCurve>> {
    trace(grid, level, |_, _| Ok(None))
}

#[cfg(test)]
mod tests {
    use super::super::{FixedParams, SweepKind};
    use super::*;

    fn synthetic(n: usize, f: impl Fn(f64, f64) -> f64) -> SweepGrid {
        let axis: Vec<f64> = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
        let lambda: Vec<f64> = axis.iter().map(|x| 2.0 * x - 1.0).collect();
        let mut values = Vec::new();
        for &x in &axis {
            for &y in &lambda {
                values.push(f(x, y));
            }
        }
        SweepGrid::new(
            SweepKind::NormalizedRate,
            FixedParams { mu0: 1.0, omega0: 1.0 },
            1e-10,
            axis,
            lambda,
            values,
        )
        .unwrap()
    }

    #[test]
    fn circle_is_one_closed_loop() {
        let g = synthetic(41, |x, y| 2.0 - ((x - 0.5) * (x - 0.5) + y * y));
        let curves = extract_level_curve_linear(&g, 2.0 - 0.09).unwrap();
        assert_eq!(curves.len(), 1);
        let c = &curves[0];
        assert!(c.is_closed());
        for &(x, y) in &c.points {
            let r = ((x - 0.5) * (x - 0.5) + y * y).sqrt();
            assert!((r - 0.3).abs() < 5e-3, "{r}");
        }
    }

    #[test]
    fn straight_line_is_open() {
        let g = synthetic(11, |x, _| 2.0 + x);
        let curves = extract_level_curve_linear(&g, 2.55).unwrap();
        assert_eq!(curves.len(), 1);
        assert!(!curves[0].is_closed());
        assert_eq!(curves[0].points.len(), 11);
        for &(x, _) in &curves[0].points {
            assert!((x - 0.55).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_level_is_empty() {
        let g = synthetic(5, |x, y| x + y + 2.0);
        let (_, hi) = g.min_max();
        assert!(extract_level_curve_linear(&g, hi + 1.0).unwrap().is_empty());
        assert!(extract_level_curve_linear(&g, f64::NAN).unwrap().is_empty());
    }

    #[test]
    fn level_on_a_grid_column_is_reported() {
        // ratio-like: exactly 1 on lambda = +-1, bump above 1 in between
        let g = synthetic(9, |x, y| 1.0 + (1.0 - y * y) * (x - 0.3));
        let curves = extract_level_curve_linear(&g, 1.0).unwrap();
        let on_column = |y: f64| {
            curves
                .iter()
                .any(|c| c.points.len() == 9 && c.points.iter().all(|p| p.1 == y))
        };
        assert!(on_column(1.0));
        assert!(on_column(-1.0));
        // the interior crossing at x = 0.3
        assert!(curves
            .iter()
            .any(|c| c.points.iter().any(|p| p.1.abs() < 0.9 && (p.0 - 0.3).abs() < 1e-9)));
    }

    #[test]
    fn saddle_produces_two_curves() {
        let g = synthetic(2, |x, y| if (x > 0.5) == (y > 0.0) { 1.0 } else { 0.0 });
        let curves = extract_level_curve_linear(&g, 0.5).unwrap();
        assert_eq!(curves.len(), 2);
    }
}
