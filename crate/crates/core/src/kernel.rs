//! The radial kernel ρ of the generalized potential and its admissibility checks.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{argmax, relative_change, LogGrid, STABILITY_TOL};
use crate::quad;
use crate::report::{ConditionReport, Extended, Extremal};

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// ρ(t) = t^α
    Power { alpha: f64 },
    /// ρ(t) = t^α (1 + |ln t|)^β
    PowerLog { alpha: f64, beta: f64 },
    /// Piecewise linear through `(t_i, v_i)`; linear to zero below `t_0`,
    /// constant beyond the last node.
    Table { t: Vec<f64>, v: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    family: Family,
    n: usize,
}

fn check_dim(n: usize) -> Result<()> {
    if !(1..=3).contains(&n) {
        return Err(Error::invalid(format!("dimension {n} outside 1..=3")));
    }
    Ok(())
}

impl Kernel {
    /// Classical kernel t^α with 0 < α < n.
    pub fn power(n: usize, alpha: f64) -> Result<Self> {
        check_dim(n)?;
        if !(alpha > 0.0 && alpha < n as f64) {
            return Err(Error::invalid(format!(
                "power kernel needs 0 < alpha < n = {n}, got {alpha}"
            )));
        }
        Ok(Kernel {
            family: Family::Power { alpha },
            n,
        })
    }

    /// t^α for any α > 0. Kernels with α ≥ n are admissible near zero but
    /// their tail integral diverges; they exist so that divergence can be probed.
    pub fn power_any(n: usize, alpha: f64) -> Result<Self> {
        check_dim(n)?;
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::precondition(format!(
                "integral of rho(t)/t over (0,1) is finite only for alpha > 0, got {alpha}"
            )));
        }
        Ok(Kernel {
            family: Family::Power { alpha },
            n,
        })
    }

    pub fn power_log(n: usize, alpha: f64, beta: f64) -> Result<Self> {
        check_dim(n)?;
        if !(alpha > 0.0 && alpha < n as f64) || !beta.is_finite() {
            return Err(Error::invalid(format!(
                "power-log kernel needs 0 < alpha < n = {n} and finite beta, got ({alpha}, {beta})"
            )));
        }
        Ok(Kernel {
            family: Family::PowerLog { alpha, beta },
            n,
        })
    }

    /// Tabulated kernel. Values may be zero (limit cases); they may not be negative.
    pub fn table(n: usize, t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if t.is_empty() || t.len() != v.len() {
            return Err(Error::invalid(
                "table kernel needs equally many t and rho values, at least one",
            ));
        }
        if t[0] <= 0.0 || t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid(
                "table kernel nodes must be positive and strictly increasing",
            ));
        }
        if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::invalid(
                "table kernel values must be finite and nonnegative",
            ));
        }
        Ok(Kernel {
            family: Family::Table { t, v },
            n,
        })
    }

    /// Two whitespace- or comma-separated columns `t rho`; `#` starts a comment.
    pub fn table_from_file(n: usize, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut t = Vec::new();
        let mut v = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::Config(format!(
                        "{}:{}: bad number {s:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
            };
            if cols.len() != 2 {
                return Err(Error::Config(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    lineno + 1
                )));
            }
            t.push(parse(cols[0])?);
            v.push(parse(cols[1])?);
        }
        Kernel::table(n, t, v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// The exponent α of a pure power kernel.
    pub fn alpha(&self) -> Option<f64> {
        match self.family {
            Family::Power { alpha } => Some(alpha),
            _ => None,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.family {
            Family::Power { alpha } => t.powf(*alpha),
            Family::PowerLog { alpha, beta } => t.powf(*alpha) * (1.0 + t.ln().abs()).powf(*beta),
            Family::Table { t: ts, v } => table_eval(ts, v, t),
        }
    }

    /// ρ(t) / t^n
    pub fn density(&self, t: f64) -> f64 {
        self.eval(t) / t.powi(self.n as i32)
    }

    /// Points where ρ is not smooth.
    pub fn breaks(&self) -> Vec<f64> {
        match &self.family {
            Family::Power { .. } => Vec::new(),
            Family::PowerLog { .. } => vec![1.0],
            Family::Table { t, .. } => t.clone(),
        }
    }

    /// Beyond this radius the kernel has its asymptotic form.
    fn onset(&self) -> f64 {
        match &self.family {
            Family::Table { t, .. } => t[t.len() - 1].max(1.0),
            _ => 1.0,
        }
    }

    /// ∫_a^∞ ρ(t) t^{-n-1} dt.
    pub fn tail_from(&self, a: f64, tol: f64) -> Result<Extended> {
        if !(a > 0.0) {
            return Err(Error::precondition(format!(
                "tail start must be positive, got {a}"
            )));
        }
        let n = self.n as i32;
        let f = |t: f64| self.eval(t) / t.powi(n + 1);
        let out = quad::tail(&f, a, self.onset().max(a), tol)?;
        Ok(out.value().map_or(Extended::Divergent, Extended::Finite))
    }

    /// ∫_a^b ρ(t) t^{-n-1} dt for 0 < a < b < ∞.
    pub fn integral_between(&self, a: f64, b: f64, tol: f64) -> Result<f64> {
        let n = self.n as i32;
        let f = |t: f64| self.eval(t) / t.powi(n + 1);
        quad::integrate_pieces(&f, a, b, &self.breaks(), (false, false), tol)
    }
}

fn table_eval(ts: &[f64], v: &[f64], t: f64) -> f64 {
    let last = ts.len() - 1;
    if t <= ts[0] {
        return v[0] * t / ts[0];
    }
    if t >= ts[last] {
        return v[last];
    }
    let i = ts.partition_point(|&x| x <= t) - 1;
    let w = (t - ts[i]) / (ts[i + 1] - ts[i]);
    v[i] * (1.0 - w) + v[i + 1] * w
}

/// Serializable kernel description; the dimension comes from the surrounding config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum KernelSpec {
    Power {
        alpha: f64,
    },
    PowerLog {
        alpha: f64,
        beta: f64,
    },
    Table {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<String>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        t: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        rho: Vec<f64>,
    },
}

impl KernelSpec {
    /// Power kernels outside 0 < α < n are accepted so that divergent presets can be run.
    pub fn build(&self, n: usize) -> Result<Kernel> {
        match self {
            KernelSpec::Power { alpha } => Kernel::power_any(n, *alpha),
            KernelSpec::PowerLog { alpha, beta } => Kernel::power_log(n, *alpha, *beta),
            KernelSpec::Table { path: Some(p), .. } => Kernel::table_from_file(n, Path::new(p)),
            KernelSpec::Table { path: None, t, rho } => Kernel::table(n, t.clone(), rho.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSpec {
    pub k1: f64,
    pub k2: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

impl GrowthSpec {
    pub fn new(k1: f64, k2: f64, c: f64) -> Result<Self> {
        let s = GrowthSpec { k1, k2, c };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k1 > 0.0 && 2.0 * self.k1 < self.k2 && self.k2.is_finite()) {
            return Err(Error::invalid(format!(
                "growth spec needs 0 < 2 k1 < k2 < inf, got k1 = {}, k2 = {}",
                self.k1, self.k2
            )));
        }
        if !(self.c > 0.0) {
            return Err(Error::invalid(format!(
                "growth constant must be positive, got {}",
                self.c
            )));
        }
        Ok(())
    }
}

/// ∫_1^∞ ρ(t) t^{-n-1} dt, or a divergence verdict.
pub fn tail_integral(kernel: &Kernel, tol: f64) -> Result<Extended> {
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    kernel.tail_from(1.0, tol)
}

/// r^n ∫_r^∞ ρ(t) t^{-n-1} dt.
pub fn tilde_rho(kernel: &Kernel, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::precondition(format!(
            "tilde rho needs r > 0, got {r}"
        )));
    }
    match kernel.tail_from(r, 1e-11)? {
        Extended::Finite(v) => Ok(v * r.powi(kernel.n as i32)),
        Extended::Divergent => Err(Error::Divergent(format!("kernel tail from r = {r}"))),
    }
}

const SUP_SAMPLES: usize = 32;

fn growth_ratio(kernel: &Kernel, spec: &GrowthSpec, r: f64) -> Result<f64> {
    let mut lhs: f64 = 0.0;
    for j in 0..=SUP_SAMPLES {
        lhs = lhs.max(kernel.density(r * 2f64.powf(j as f64 / SUP_SAMPLES as f64)));
    }
    for b in kernel.breaks() {
        if b > r && b <= 2.0 * r {
            lhs = lhs.max(kernel.density(b));
        }
    }
    let rhs = kernel.integral_between(spec.k1 * r, spec.k2 * r, 1e-13)?;
    Ok(if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    })
}

fn growth_profile(kernel: &Kernel, spec: &GrowthSpec, grid: &LogGrid) -> Result<Vec<(f64, f64)>> {
    grid.validate()?;
    grid.points()
        .into_par_iter()
        .map(|r| growth_ratio(kernel, spec, r).map(|v| (r, v)))
        .collect()
}

/// Growth condition: sup_{r<s≤2r} ρ(s)/s^n ≤ C ∫_{k1 r}^{k2 r} ρ(t) t^{-n-1} dt on each grid radius.
pub fn check_growth(kernel: &Kernel, spec: &GrowthSpec, grid: &LogGrid) -> Result<ConditionReport> {
    spec.validate()?;
    let profile = growth_profile(kernel, spec, grid)?;
    let values: Vec<f64> = profile.iter().map(|p| p.1).collect();
    let (i, c) = argmax(&values).ok_or(Error::EmptyGrid)?;
    let probe = growth_profile(kernel, spec, &grid.probe())?;
    let c2 = probe.iter().map(|p| p.1).fold(0.0, f64::max);
    let stable = relative_change(c, c2) < STABILITY_TOL;
    Ok(ConditionReport::new(
        "growth",
        c <= spec.c,
        Extended::from_f64(c),
        Extremal::Radius { r: profile[i].0 },
        stable,
    )
    .with_profile(profile))
}

fn doubling_constant(kernel: &Kernel, grid: &LogGrid) -> Result<(f64, Extremal)> {
    grid.validate()?;
    let pts = grid.points();
    let g: Vec<f64> = pts.iter().map(|&t| kernel.density(t)).collect();
    let mut best = (
        1.0,
        Extremal::Pair {
            r: pts[0],
            t: pts[0],
        },
    );
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            if pts[j] / pts[i] > 2.0 * (1.0 + 1e-9) {
                break;
            }
            let (a, b) = (g[i], g[j]);
            let c = if a == b {
                1.0
            } else if a == 0.0 || b == 0.0 {
                f64::INFINITY
            } else {
                (a / b).max(b / a)
            };
            if c > best.0 {
                best = (
                    c,
                    Extremal::Pair {
                        r: pts[j],
                        t: pts[i],
                    },
                );
            }
        }
    }
    Ok(best)
}

/// Doubling of ρ(t)/t^n over grid pairs with 1/2 ≤ r/t ≤ 2; the empirical C is
/// the largest ratio in either direction.
pub fn check_doubling(kernel: &Kernel, grid: &LogGrid) -> Result<ConditionReport> {
    let (c, at) = doubling_constant(kernel, grid)?;
    let (c2, _) = doubling_constant(kernel, &grid.probe())?;
    let stable = relative_change(c, c2) < STABILITY_TOL;
    Ok(ConditionReport::new(
        "doubling",
        c.is_finite(),
        Extended::from_f64(c),
        at,
        stable,
    ))
}
