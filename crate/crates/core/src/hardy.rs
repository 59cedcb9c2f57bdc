//! Functions on the half-line, the supremal transform, the weighted Hardy
//! operator and the constants of the associated sup-norm inequalities.
//!
//! Arithmetic follows 1/∞ = 0 and 0·∞ = 0 throughout.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{argmax, scan_sup, LogGrid, STABILITY_TOL};
use crate::quad::{self, SeriesOutcome};
use crate::report::{ConditionReport, Extended, Extremal};

const HARDY_TOL: f64 = 1e-11;

#[derive(Debug, Clone, PartialEq)]
pub enum HalfLineFamily {
    /// c t^γ
    Power { gamma: f64, c: f64 },
    /// c t^γ (1 + |ln t|)^β
    PowerLog { gamma: f64, beta: f64, c: f64 },
    /// linear through `(t_i, g_i)`, constant outside the nodes
    Table { t: Vec<f64>, v: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Monotone {
    None,
    NonDecreasing,
    NonIncreasing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HalfLineFunction {
    family: HalfLineFamily,
    monotone: Monotone,
}

fn sample_points() -> Vec<f64> {
    LogGrid {
        lo: 1e-6,
        hi: 1e6,
        n: 241,
    }
    .points()
}

impl HalfLineFunction {
    pub fn power(gamma: f64, c: f64) -> Result<Self> {
        if !gamma.is_finite() || !(c.is_finite() && c >= 0.0) {
            return Err(Error::invalid(format!(
                "power function needs finite γ and c >= 0, got γ={gamma}, c={c}"
            )));
        }
        Ok(Self::plain(HalfLineFamily::Power { gamma, c }))
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::power(0.0, c)
    }

    pub fn zero() -> Self {
        Self::plain(HalfLineFamily::Power { gamma: 0.0, c: 0.0 })
    }

    pub fn power_log(gamma: f64, beta: f64, c: f64) -> Result<Self> {
        if !gamma.is_finite() || !beta.is_finite() || !(c.is_finite() && c >= 0.0) {
            return Err(Error::invalid(
                "power-log function needs finite parameters and c >= 0",
            ));
        }
        Ok(Self::plain(HalfLineFamily::PowerLog { gamma, beta, c }))
    }

    pub fn table(t: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != v.len() {
            return Err(Error::invalid("table needs equally many nodes and values"));
        }
        if t[0] <= 0.0 || t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "table nodes must be positive and increasing",
            ));
        }
        if v.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
            return Err(Error::invalid(
                "table values must be finite and nonnegative",
            ));
        }
        Ok(Self::plain(HalfLineFamily::Table { t, v }))
    }

    fn plain(family: HalfLineFamily) -> Self {
        let mut g = HalfLineFunction {
            family,
            monotone: Monotone::None,
        };
        g.monotone = g.detect_monotone();
        g
    }

    /// Declare a monotonicity, verified on a log-spaced sample.
    pub fn with_monotone(mut self, m: Monotone) -> Result<Self> {
        if m != Monotone::None && !self.sampled_monotone(m) {
            return Err(Error::precondition(format!(
                "declared {m:?} but the sampled values are not"
            )));
        }
        self.monotone = m;
        Ok(self)
    }

    fn sampled_monotone(&self, m: Monotone) -> bool {
        let v: Vec<f64> = sample_points().into_iter().map(|t| self.eval(t)).collect();
        v.windows(2).all(|w| {
            let slack = 1e-12 * w[0].abs().max(w[1].abs());
            match m {
                Monotone::NonDecreasing => w[1] >= w[0] - slack,
                Monotone::NonIncreasing => w[1] <= w[0] + slack,
                Monotone::None => true,
            }
        })
    }

    fn detect_monotone(&self) -> Monotone {
        match &self.family {
            HalfLineFamily::Power { gamma, c } if *c == 0.0 || *gamma == 0.0 => {
                Monotone::NonIncreasing
            }
            HalfLineFamily::Power { gamma, .. } if *gamma > 0.0 => Monotone::NonDecreasing,
            HalfLineFamily::Power { .. } => Monotone::NonIncreasing,
            HalfLineFamily::Table { .. } => {
                if self.sampled_monotone(Monotone::NonDecreasing) {
                    Monotone::NonDecreasing
                } else if self.sampled_monotone(Monotone::NonIncreasing) {
                    Monotone::NonIncreasing
                } else {
                    Monotone::None
                }
            }
            HalfLineFamily::PowerLog { .. } => Monotone::None,
        }
    }

    pub fn family(&self) -> &HalfLineFamily {
        &self.family
    }

    pub fn monotone(&self) -> Monotone {
        self.monotone
    }

    /// lim_{t→0+} g(t) = 0.
    pub fn vanishes_at_zero(&self) -> bool {
        match &self.family {
            HalfLineFamily::Power { gamma, c } => *c == 0.0 || *gamma > 0.0,
            HalfLineFamily::PowerLog { gamma, c, .. } => *c == 0.0 || *gamma > 0.0,
            HalfLineFamily::Table { v, .. } => v[0] == 0.0,
        }
    }

    /// Member of the cone of non-decreasing functions vanishing at 0+.
    pub fn in_cone(&self) -> bool {
        self.monotone == Monotone::NonDecreasing && self.vanishes_at_zero()
    }

    pub fn is_zero(&self) -> bool {
        match &self.family {
            HalfLineFamily::Power { c, .. } | HalfLineFamily::PowerLog { c, .. } => *c == 0.0,
            HalfLineFamily::Table { v, .. } => v.iter().all(|x| *x == 0.0),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.family {
            HalfLineFamily::Power { c, .. } | HalfLineFamily::PowerLog { c, .. } if *c == 0.0 => {
                0.0
            }
            HalfLineFamily::Power { gamma, c } => c * t.powf(*gamma),
            HalfLineFamily::PowerLog { gamma, beta, c } => {
                c * t.powf(*gamma) * (1.0 + t.ln().abs()).powf(*beta)
            }
            HalfLineFamily::Table { t: ts, v } => {
                if t <= ts[0] {
                    return v[0];
                }
                let last = ts.len() - 1;
                if t >= ts[last] {
                    return v[last];
                }
                let i = ts.partition_point(|x| *x <= t) - 1;
                let s = (t - ts[i]) / (ts[i + 1] - ts[i]);
                v[i] + s * (v[i + 1] - v[i])
            }
        }
    }

    /// Points where the function is not smooth.
    pub fn breaks(&self) -> Vec<f64> {
        match &self.family {
            HalfLineFamily::Table { t, .. } => t.clone(),
            HalfLineFamily::PowerLog { .. } => vec![1.0],
            HalfLineFamily::Power { .. } => Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum HalfLineSpec {
    Power {
        gamma: f64,
        #[serde(default = "one")]
        c: f64,
    },
    PowerLog {
        gamma: f64,
        beta: f64,
        #[serde(default = "one")]
        c: f64,
    },
    Table {
        t: Vec<f64>,
        g: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

impl HalfLineSpec {
    pub fn build(&self) -> Result<HalfLineFunction> {
        match self {
            HalfLineSpec::Power { gamma, c } => HalfLineFunction::power(*gamma, *c),
            HalfLineSpec::PowerLog { gamma, beta, c } => {
                HalfLineFunction::power_log(*gamma, *beta, *c)
            }
            HalfLineSpec::Table { t, g } => HalfLineFunction::table(t.clone(), g.clone()),
        }
    }
}

// 1/∞ = 0, 0·∞ = 0
fn conv_mul(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

fn conv_inv(a: f64) -> f64 {
    if a.is_infinite() {
        0.0
    } else {
        1.0 / a
    }
}

/// ess sup_{s > t} g(s) as a grid supremum over the tail grid, with the exact
/// value for monotone power functions.
pub fn supremal_transform(g: &HalfLineFunction, t: f64, tail_grid: &LogGrid) -> Result<Extended> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::precondition(format!(
            "supremal transform needs t > 0, got {t}"
        )));
    }
    if let HalfLineFamily::Power { gamma, c } = g.family {
        if c == 0.0 {
            return Ok(Extended::Finite(0.0));
        }
        return Ok(if gamma > 0.0 {
            Extended::Divergent
        } else {
            Extended::Finite(g.eval(t))
        });
    }
    tail_grid.validate()?;
    if tail_grid.hi < 1e3 * t * (1.0 - 1e-12) {
        return Err(Error::precondition(format!(
            "tail grid must reach 3 decades beyond t = {t}, ends at {}",
            tail_grid.hi
        )));
    }
    if g.monotone == Monotone::NonIncreasing {
        return Ok(Extended::Finite(g.eval(t)));
    }
    Ok(supremal_fn(&|s| g.eval(s), t, tail_grid))
}

/// Grid version of sup_{s > t} g(s) for an arbitrary function: the sample at `t`
/// and every tail-grid node beyond it, and divergent when g keeps growing two
/// decades past the grid.
pub fn supremal_fn<F: Fn(f64) -> f64>(g: &F, t: f64, tail_grid: &LogGrid) -> Extended {
    let mut best = g(t);
    for s in tail_grid.points().into_iter().filter(|&s| s > t) {
        best = best.max(g(s));
    }
    let top = tail_grid.hi.max(t);
    let end = g(top);
    let beyond = g(top * 1e2);
    if !beyond.is_finite() || (beyond > end * (1.0 + STABILITY_TOL) && beyond > best) {
        return Extended::Divergent;
    }
    Extended::from_f64(best)
}

/// Tail grid used by callers that only have a t grid: same density, three
/// extra decades at the top.
pub fn tail_grid_for(t_grid: &LogGrid) -> LogGrid {
    let per_decade = if t_grid.n > 1 {
        (t_grid.n - 1) as f64 / (t_grid.hi / t_grid.lo).log10()
    } else {
        16.0
    };
    let hi = t_grid.hi * 1e3;
    let n = ((hi / t_grid.lo).log10() * per_decade).ceil() as usize + 1;
    LogGrid {
        lo: t_grid.lo,
        hi,
        n,
    }
}

fn tail_integral<F: Fn(f64) -> f64>(h: &F, t: f64, breaks: &[f64]) -> Result<Extended> {
    let last = breaks.iter().copied().filter(|&b| b > t).fold(t, f64::max);
    let head = if last > t {
        quad::integrate_pieces(h, t, last, breaks, (false, false), HARDY_TOL)?
    } else {
        0.0
    };
    match quad::tail(h, last, last, HARDY_TOL)? {
        SeriesOutcome::Converged { value, .. } => Ok(Extended::Finite(head + value)),
        SeriesOutcome::Divergent { .. } => Ok(Extended::Divergent),
    }
}

/// H_w g(t) = ∫_t^∞ g(s) w(s) ds.
pub fn weighted_hardy(g: &HalfLineFunction, w: &HalfLineFunction, t: f64) -> Result<Extended> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::precondition(format!(
            "Hardy operator needs t > 0, got {t}"
        )));
    }
    if g.is_zero() || w.is_zero() {
        return Ok(Extended::Finite(0.0));
    }
    let h = |s: f64| conv_mul(g.eval(s), w.eval(s));
    let mut breaks = g.breaks();
    breaks.extend(w.breaks());
    tail_integral(&h, t, &breaks)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyConstant {
    pub b_estimate: Extended,
    pub divergent: bool,
    pub t_star: f64,
    pub stable: bool,
}

fn grid_sup<F: Fn(f64) -> Result<f64> + Sync>(
    f: &F,
    grid: &LogGrid,
) -> Result<(Extended, f64, bool)> {
    let s = scan_sup(f, grid)?;
    let v = if s.unbounded() {
        Extended::Divergent
    } else {
        Extended::Finite(s.value)
    };
    Ok((v, s.at, s.stable))
}

/// B = sup_t w2(t) (∫_t^∞ w) / (ess sup_{s>t} w1(s)).
pub fn best_constant_b(
    w1: &HalfLineFunction,
    w2: &HalfLineFunction,
    w: &HalfLineFunction,
    t_grid: &LogGrid,
) -> Result<HardyConstant> {
    if w.is_zero() || w2.is_zero() {
        return Ok(HardyConstant {
            b_estimate: Extended::Finite(0.0),
            divergent: false,
            t_star: t_grid.lo,
            stable: true,
        });
    }
    let one = HalfLineFunction::constant(1.0)?;
    let span = tail_grid_for(&t_grid.extended(2.0).refined());
    let expr = |t: f64| -> Result<f64> {
        let a = w2.eval(t);
        if a == 0.0 {
            return Ok(0.0);
        }
        let h = weighted_hardy(&one, w, t)?.value();
        let s1 = supremal_transform(w1, t, &span)?.value();
        Ok(conv_mul(conv_mul(a, h), conv_inv(s1)))
    };
    let (b, t_star, stable) = grid_sup(&expr, t_grid)?;
    Ok(HardyConstant {
        b_estimate: b,
        divergent: b.is_divergent(),
        t_star,
        stable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyInequality {
    /// sup_t w2(t) H_w g(t)
    pub lhs: Extended,
    /// sup_t w1(t) g(t)
    pub rhs: Extended,
    pub constant: f64,
    pub holds: bool,
}

/// sup_t w2 H_w g ≤ C sup_t w1 g for a non-decreasing g. The left side is sampled on
/// the grid; the right side also on its tail extension and at the breakpoints.
pub fn hardy_inequality_check(
    g: &HalfLineFunction,
    w1: &HalfLineFunction,
    w2: &HalfLineFunction,
    w: &HalfLineFunction,
    constant: f64,
    t_grid: &LogGrid,
) -> Result<HardyInequality> {
    if g.monotone() != Monotone::NonDecreasing {
        return Err(Error::precondition(
            "Hardy inequality is stated for non-decreasing g",
        ));
    }
    t_grid.validate()?;
    let pts = t_grid.points();
    let lhs_vals = pts
        .par_iter()
        .map(|&t| Ok(conv_mul(w2.eval(t), weighted_hardy(g, w, t)?.value())))
        .collect::<Result<Vec<f64>>>()?;
    // the right side is a plain supremum, so it also sees the tail grid and every node of g and w1
    let mut rhs_pts = tail_grid_for(t_grid).points();
    rhs_pts.extend(
        g.breaks()
            .into_iter()
            .chain(w1.breaks())
            .filter(|&t| t > 0.0),
    );
    let rhs_vals: Vec<f64> = rhs_pts
        .iter()
        .map(|&t| conv_mul(w1.eval(t), g.eval(t)))
        .collect();
    let lhs = Extended::from_f64(argmax(&lhs_vals).map_or(0.0, |x| x.1));
    let rhs = Extended::from_f64(argmax(&rhs_vals).map_or(0.0, |x| x.1));
    let holds = match (lhs, rhs) {
        (Extended::Finite(l), Extended::Finite(r)) => l <= conv_mul(constant, r),
        (_, Extended::Divergent) => true,
        (Extended::Divergent, Extended::Finite(_)) => false,
    };
    Ok(HardyInequality {
        lhs,
        rhs,
        constant,
        holds,
    })
}

/// sup_t w2(t) / ess sup_{s>t} w1(s).
pub fn identity_embedding_check(
    w1: &HalfLineFunction,
    w2: &HalfLineFunction,
    t_grid: &LogGrid,
) -> Result<ConditionReport> {
    if w2.is_zero() {
        return Ok(ConditionReport::new(
            "identity-embedding",
            true,
            Extended::Finite(0.0),
            Extremal::None,
            true,
        ));
    }
    let span = tail_grid_for(&t_grid.extended(2.0).refined());
    for t in t_grid.points() {
        let s = supremal_transform(w1, t, &span)?;
        if !(s.is_finite() && s.value() > 0.0) {
            return Err(Error::precondition(format!(
                "need 0 < ess sup of w1 over ({t}, ∞) < ∞"
            )));
        }
    }
    let expr = |t: f64| -> Result<f64> {
        let s = supremal_transform(w1, t, &span)?.value();
        Ok(conv_mul(w2.eval(t), conv_inv(s)))
    };
    let (c, t_star, stable) = grid_sup(&expr, t_grid)?;
    Ok(ConditionReport::new(
        "identity-embedding",
        c.is_finite(),
        c,
        Extremal::Radius { r: t_star },
        stable,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::relative_change;
    use approx::assert_relative_eq;

    fn grid() -> LogGrid {
        LogGrid::half_line_default()
    }

    #[test]
    fn supremal_examples() {
        let g = HalfLineFunction::power(-1.0, 1.0).unwrap();
        assert_eq!(
            supremal_transform(&g, 2.0, &grid()).unwrap(),
            Extended::Finite(0.5)
        );
        let g = HalfLineFunction::power(1.0, 1.0).unwrap();
        assert!(supremal_transform(&g, 3.0, &grid()).unwrap().is_divergent());

        let t: Vec<f64> = LogGrid {
            lo: 1e-3,
            hi: 1e5,
            n: 801,
        }
        .points();
        let v: Vec<f64> = t
            .iter()
            .map(|s| s.powf(-0.5) * (1.0 + s.ln().sin().powi(2)))
            .collect();
        let g = HalfLineFunction::table(t, v).unwrap();
        let tail = LogGrid {
            lo: 1e-3,
            hi: 1e5,
            n: 129,
        };
        let a = supremal_transform(&g, 1.0, &tail).unwrap().value();
        let b = supremal_transform(&g, 1.0, &tail.refined_by(8))
            .unwrap()
            .value();
        assert!(relative_change(a, b) < 0.02, "{a} vs {b}");
    }

    #[test]
    fn short_tail_grid_rejected() {
        let g = HalfLineFunction::table(vec![1.0, 2.0], vec![1.0, 3.0]).unwrap();
        let tail = LogGrid {
            lo: 1.0,
            hi: 100.0,
            n: 9,
        };
        assert!(matches!(
            supremal_transform(&g, 1.0, &tail),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn hardy_examples() {
        let one = HalfLineFunction::constant(1.0).unwrap();
        let w = HalfLineFunction::power(-2.0, 1.0).unwrap();
        assert_relative_eq!(
            weighted_hardy(&one, &w, 2.0).unwrap().value(),
            0.5,
            max_relative = 1e-10
        );
        assert_eq!(
            weighted_hardy(&HalfLineFunction::zero(), &w, 2.0).unwrap(),
            Extended::Finite(0.0)
        );
        let h = HalfLineFunction::power(-1.0, 1.0).unwrap();
        assert!(weighted_hardy(&one, &h, 1.0).unwrap().is_divergent());
    }

    #[test]
    fn best_constant_examples() {
        let one = HalfLineFunction::constant(1.0).unwrap();
        let t = HalfLineFunction::power(1.0, 1.0).unwrap();
        let w = HalfLineFunction::power(-2.0, 1.0).unwrap();
        let b = best_constant_b(&one, &t, &w, &grid()).unwrap();
        assert_relative_eq!(b.b_estimate.value(), 1.0, max_relative = 1e-6);
        assert!(b.stable && !b.divergent);
        let b = best_constant_b(&one, &t, &HalfLineFunction::zero(), &grid()).unwrap();
        assert_eq!(b.b_estimate, Extended::Finite(0.0));
        let b = best_constant_b(&one, &one, &w, &grid()).unwrap();
        assert!(b.divergent);
    }

    #[test]
    fn identity_examples() {
        let inv = HalfLineFunction::power(-1.0, 1.0).unwrap();
        let r = identity_embedding_check(&inv, &inv, &grid()).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.empirical_c.value(), 1.0, max_relative = 1e-12);
        let r = identity_embedding_check(&inv, &HalfLineFunction::zero(), &grid()).unwrap();
        assert_eq!(r.empirical_c, Extended::Finite(0.0));
        let r = identity_embedding_check(&inv, &HalfLineFunction::constant(1.0).unwrap(), &grid())
            .unwrap();
        assert!(!r.holds && r.empirical_c.is_divergent());
        let grow = HalfLineFunction::power(1.0, 1.0).unwrap();
        assert!(matches!(
            identity_embedding_check(&grow, &inv, &grid()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn monotone_flags() {
        let g = HalfLineFunction::table(vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 1.0]).unwrap();
        assert_eq!(g.monotone(), Monotone::NonDecreasing);
        assert!(g.in_cone());
        let h = HalfLineFunction::table(vec![1.0, 2.0, 3.0], vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(h.monotone(), Monotone::None);
        assert!(h.with_monotone(Monotone::NonDecreasing).is_err());
    }
}
