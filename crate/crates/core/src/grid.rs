//! Log-spaced parameter grids and the refinement/extension rules used to
//! turn grid suprema into finite-or-divergent verdicts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative change under refinement below which a grid estimate is "stable".
pub const STABILITY_TOL: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl LogGrid {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        let g = LogGrid { lo, hi, n };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(self.lo > 0.0 && self.hi >= self.lo && self.hi.is_finite()) {
            return Err(Error::invalid(format!(
                "log grid needs 0 < lo <= hi < inf, got [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.n == 1 && self.hi != self.lo {
            return Err(Error::invalid("single-point log grid needs lo == hi"));
        }
        Ok(())
    }

    /// Default radius grid for kernel conditions: 65 points over [1e-3, 1e3].
    pub fn kernel_default() -> Self {
        LogGrid {
            lo: 1e-3,
            hi: 1e3,
            n: 65,
        }
    }

    /// Default ball-radius grid for weight diagnostics: 33 points over [1e-2, 1e2].
    pub fn radius_default() -> Self {
        LogGrid {
            lo: 1e-2,
            hi: 1e2,
            n: 33,
        }
    }

    /// Default grid for half-line suprema: 129 points over [1e-4, 1e4].
    pub fn half_line_default() -> Self {
        LogGrid {
            lo: 1e-4,
            hi: 1e4,
            n: 129,
        }
    }

    pub fn single(x: f64) -> Self {
        LogGrid { lo: x, hi: x, n: 1 }
    }

    pub fn points(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let step = (b - a) / (self.n - 1) as f64;
        (0..self.n)
            .map(|i| {
                if i == 0 {
                    self.lo
                } else if i == self.n - 1 {
                    self.hi
                } else {
                    (a + step * i as f64).exp()
                }
            })
            .collect()
    }

    /// Same span, doubled resolution: every old node is kept.
    pub fn refined(&self) -> Self {
        if self.n == 1 {
            return *self;
        }
        LogGrid {
            lo: self.lo,
            hi: self.hi,
            n: 2 * self.n - 1,
        }
    }

    pub fn refined_by(&self, factor: usize) -> Self {
        let mut g = *self;
        let mut f = factor.max(1);
        while f > 1 {
            g = g.refined();
            f /= 2;
        }
        g
    }

    /// Extend by `decades` on both ends keeping the node spacing.
    pub fn extended(&self, decades: f64) -> Self {
        if self.n == 1 {
            let f = 10f64.powf(decades);
            return LogGrid {
                lo: self.lo / f,
                hi: self.hi * f,
                n: 9,
            };
        }
        let step = (self.hi.ln() - self.lo.ln()) / (self.n - 1) as f64;
        let extra = ((decades * std::f64::consts::LN_10) / step).round() as usize;
        let lo = (self.lo.ln() - step * extra as f64).exp();
        let hi = (self.hi.ln() + step * extra as f64).exp();
        LogGrid {
            lo,
            hi,
            n: self.n + 2 * extra,
        }
    }

    /// Doubled resolution and one extra decade on each side.
    pub fn probe(&self) -> Self {
        self.refined().extended(1.0)
    }

    pub fn contains_value(&self, x: f64) -> bool {
        self.points()
            .iter()
            .any(|p| (p - x).abs() <= 1e-12 * x.abs())
    }
}

/// Relative change between two estimates, symmetric in its arguments.
pub fn relative_change(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Maximum of `values` together with its index; `None` when empty or all NaN.
pub fn argmax(values: &[f64]) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            Some((_, b)) if b >= v => {}
            _ => best = Some((i, v)),
        }
    }
    best
}

/// A grid supremum checked against the probe grid (doubled resolution, one
/// more decade on each side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSup {
    /// Supremum on the base grid; infinite if any cell was.
    pub value: f64,
    /// Parameter of the maximiser and, for multi-cell scans, its cell index.
    pub at: f64,
    pub cell: usize,
    pub stable: bool,
    /// The probe grid attains a larger value at one of its outer ends.
    pub grows: bool,
}

impl GridSup {
    pub fn unbounded(&self) -> bool {
        self.value.is_infinite() || self.grows
    }
}

type Scan = (Vec<f64>, Vec<(usize, f64)>);

fn scan_values<F>(f: &F, cells: usize, grid: &LogGrid) -> Result<Scan>
where
    F: Fn(usize, f64) -> Result<f64> + Sync,
{
    let pts = grid.points();
    let keys: Vec<(usize, f64)> = (0..cells)
        .flat_map(|c| pts.iter().map(move |&t| (c, t)))
        .collect();
    let vals = keys
        .par_iter()
        .map(|&(c, t)| f(c, t))
        .collect::<Result<Vec<f64>>>()?;
    Ok((vals, keys))
}

/// sup over `cells` × grid of `f(cell, t)`; infinite values are treated as divergence.
pub fn scan_sup_cells<F>(f: &F, cells: usize, grid: &LogGrid) -> Result<GridSup>
where
    F: Fn(usize, f64) -> Result<f64> + Sync,
{
    grid.validate()?;
    if cells == 0 {
        return Err(Error::EmptyGrid);
    }
    let (vals, keys) = scan_values(f, cells, grid)?;
    if let Some(i) = vals.iter().position(|v| v.is_infinite()) {
        return Ok(GridSup {
            value: f64::INFINITY,
            at: keys[i].1,
            cell: keys[i].0,
            stable: true,
            grows: false,
        });
    }
    let (i, v) = argmax(&vals).unwrap_or((0, 0.0));
    let probe = grid.probe();
    let (pvals, pkeys) = scan_values(f, cells, &probe)?;
    if let Some(j) = pvals.iter().position(|v| v.is_infinite()) {
        return Ok(GridSup {
            value: f64::INFINITY,
            at: pkeys[j].1,
            cell: pkeys[j].0,
            stable: false,
            grows: true,
        });
    }
    let (j, pv) = argmax(&pvals).unwrap_or((0, 0.0));
    let at_end = pkeys[j].1 == probe.lo || pkeys[j].1 == probe.hi;
    Ok(GridSup {
        value: v,
        at: keys[i].1,
        cell: keys[i].0,
        stable: relative_change(v, pv) < STABILITY_TOL,
        grows: at_end && pv > v * (1.0 + STABILITY_TOL),
    })
}

/// One-parameter version of [`scan_sup_cells`].
pub fn scan_sup<F>(f: &F, grid: &LogGrid) -> Result<GridSup>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    scan_sup_cells(&|_, t| f(t), 1, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = LogGrid::new(1e-3, 1e3, 65).unwrap();
        let p = g.points();
        assert_eq!(p[0], 1e-3);
        assert_eq!(p[64], 1e3);
        assert!((p[32] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refined_keeps_nodes() {
        let g = LogGrid::new(1e-2, 1e2, 33).unwrap();
        let r = g.refined();
        assert_eq!(r.n, 65);
        let (p, q) = (g.points(), r.points());
        for (i, x) in p.iter().enumerate() {
            assert!((q[2 * i] - x).abs() <= 1e-12 * x);
        }
    }

    #[test]
    fn extension_keeps_spacing() {
        let g = LogGrid::new(1e-2, 1e2, 33).unwrap();
        let e = g.extended(1.0);
        assert!((e.lo - 1e-3).abs() < 1e-15);
        assert!((e.hi - 1e3).abs() < 1e-9);
        assert_eq!(e.n, 33 + 16);
    }

    #[test]
    fn scan_detects_growth() {
        let g = LogGrid::new(1e-2, 1e2, 33).unwrap();
        let s = scan_sup(&|t: f64| Ok(1.0 / t), &g).unwrap();
        assert!(s.grows && s.unbounded());
        let s = scan_sup(&|t: f64| Ok(1.0 / (1.0 + t)), &g).unwrap();
        assert!(!s.grows && s.stable);
        let s = scan_sup(&|t: f64| Ok(if t > 10.0 { f64::INFINITY } else { 1.0 }), &g).unwrap();
        assert!(s.unbounded());
    }

    #[test]
    fn invalid_grids() {
        assert_eq!(LogGrid::new(1.0, 2.0, 0), Err(Error::EmptyGrid));
        assert!(LogGrid::new(-1.0, 2.0, 3).is_err());
        assert!(LogGrid::new(3.0, 2.0, 3).is_err());
    }
}
