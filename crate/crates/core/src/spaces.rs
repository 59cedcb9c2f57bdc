//! φ-functions, test functions and the weighted Lebesgue, weak and Morrey norms.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, Above, Field, Product, Symmetry};
use crate::geom::{unit_sphere_area, Ball, Feature, Point};
use crate::grid::{argmax, relative_change, LogGrid, STABILITY_TOL};
use crate::quad;
use crate::weights::{ball_mass, Weight, MASS_TOL};

/// Relative tolerance used for norm quadrature unless a caller asks otherwise.
pub const NORM_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// φ(x, r)

#[derive(Debug, Clone, PartialEq)]
pub enum PhiFamily {
    /// r^e
    Power { exponent: f64 },
    /// r^e (1 + |ln r|)^γ
    PowerLog { exponent: f64, gamma: f64 },
    /// log-log interpolation through `(r_i, φ_i)`, constant outside the nodes
    Table { r: Vec<f64>, v: Vec<f64> },
}

/// A positive function φ(x, r), raised to `outer` (used for φ^{1/p}).
/// Shipped families do not depend on x.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiFunction {
    family: PhiFamily,
    outer: f64,
}

impl PhiFunction {
    pub fn power(exponent: f64) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::invalid("phi exponent must be finite"));
        }
        Ok(PhiFunction {
            family: PhiFamily::Power { exponent },
            outer: 1.0,
        })
    }

    /// The classical Morrey normalisation r^{(λ - n)/p}.
    pub fn morrey(lambda: f64, n: usize, p: f64) -> Result<Self> {
        if !(p >= 1.0) {
            return Err(Error::invalid(format!("phi needs p >= 1, got {p}")));
        }
        PhiFunction::power((lambda - n as f64) / p)
    }

    pub fn power_log(exponent: f64, gamma: f64) -> Result<Self> {
        if !exponent.is_finite() || !gamma.is_finite() {
            return Err(Error::invalid("phi parameters must be finite"));
        }
        Ok(PhiFunction {
            family: PhiFamily::PowerLog { exponent, gamma },
            outer: 1.0,
        })
    }

    pub fn table(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r.is_empty() || r.len() != v.len() {
            return Err(Error::invalid(
                "phi table needs equally many radii and values",
            ));
        }
        if r[0] <= 0.0 || r.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(
                "phi table radii must be positive and increasing",
            ));
        }
        if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
            return Err(Error::invalid("phi table values must be positive"));
        }
        Ok(PhiFunction {
            family: PhiFamily::Table { r, v },
            outer: 1.0,
        })
    }

    /// φ^s.
    pub fn pow(&self, s: f64) -> Self {
        PhiFunction {
            family: self.family.clone(),
            outer: self.outer * s,
        }
    }

    pub fn family(&self) -> &PhiFamily {
        &self.family
    }

    /// Exponent e when φ(x, r) = r^e.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.family {
            PhiFamily::Power { exponent } => Some(exponent * self.outer),
            _ => None,
        }
    }

    pub fn eval(&self, _x: &Point, r: f64) -> f64 {
        let base = match &self.family {
            PhiFamily::Power { exponent } => return r.powf(exponent * self.outer),
            PhiFamily::PowerLog { exponent, gamma } => {
                r.powf(*exponent) * (1.0 + r.ln().abs()).powf(*gamma)
            }
            PhiFamily::Table { r: rs, v } => {
                let last = rs.len() - 1;
                if r <= rs[0] {
                    v[0]
                } else if r >= rs[last] {
                    v[last]
                } else {
                    let i = rs.partition_point(|&x| x <= r) - 1;
                    let w = (r.ln() - rs[i].ln()) / (rs[i + 1].ln() - rs[i].ln());
                    (v[i].ln() * (1.0 - w) + v[i + 1].ln() * w).exp()
                }
            }
        };
        base.powf(self.outer)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PhiSpec {
    /// r^{(λ - n)/p}; `p` defaults to the source or target exponent of the experiment.
    Morrey {
        lambda: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<f64>,
    },
    Power {
        exponent: f64,
    },
    PowerLog {
        exponent: f64,
        gamma: f64,
    },
    Table {
        r: Vec<f64>,
        phi: Vec<f64>,
    },
}

impl PhiSpec {
    pub fn build(&self, n: usize, default_p: f64) -> Result<PhiFunction> {
        match self {
            PhiSpec::Morrey { lambda, p } => {
                PhiFunction::morrey(*lambda, n, p.unwrap_or(default_p))
            }
            PhiSpec::Power { exponent } => PhiFunction::power(*exponent),
            PhiSpec::PowerLog { exponent, gamma } => PhiFunction::power_log(*exponent, *gamma),
            PhiSpec::Table { r, phi } => PhiFunction::table(r.clone(), phi.clone()),
        }
    }

    /// The λ of a Morrey-normalised φ.
    pub fn lambda(&self) -> Option<f64> {
        match self {
            PhiSpec::Morrey { lambda, .. } => Some(*lambda),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// test functions

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// χ_{B(c, R)}
    Indicator { radius: f64 },
    /// |x - c|^{-γ} χ_{B(c, R)}
    Bump { radius: f64, gamma: f64 },
    /// exp(-|x - c|^2 / width^2)
    Gaussian { width: f64 },
    /// χ_{|x - c| ≥ R} |x - c|^{-2n}
    ComplementPower { radius: f64 },
    /// Radial table, linear between nodes, v_0 below the first node and zero beyond the last.
    Table { t: Vec<f64>, v: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub center: Point,
    pub shape: Shape,
}

impl Term {
    fn profile(&self, n: usize, t: f64) -> f64 {
        self.coef * shape_profile(&self.shape, n, t)
    }
}

fn shape_profile(shape: &Shape, n: usize, t: f64) -> f64 {
    match shape {
        Shape::Indicator { radius } => {
            if t < *radius {
                1.0
            } else {
                0.0
            }
        }
        Shape::Bump { radius, gamma } => {
            if t < *radius {
                if *gamma == 0.0 {
                    1.0
                } else {
                    t.powf(-gamma)
                }
            } else {
                0.0
            }
        }
        Shape::Gaussian { width } => (-(t / width).powi(2)).exp(),
        Shape::ComplementPower { radius } => {
            if t >= *radius {
                t.powi(-2 * n as i32)
            } else {
                0.0
            }
        }
        Shape::Table { t: ts, v } => {
            let last = ts.len() - 1;
            if t <= ts[0] {
                v[0]
            } else if t > ts[last] {
                0.0
            } else {
                let i = (ts.partition_point(|&x| x <= t) - 1).min(last - 1);
                let w = (t - ts[i]) / (ts[i + 1] - ts[i]);
                v[i] * (1.0 - w) + v[i + 1] * w
            }
        }
    }
}

/// A finite sum of radial shapes, each about its own center.
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub id: String,
    n: usize,
    terms: Vec<Term>,
}

impl TestFunction {
    pub fn zero(n: usize) -> Self {
        TestFunction {
            id: "zero".into(),
            n,
            terms: Vec::new(),
        }
    }

    pub fn new(id: impl Into<String>, n: usize, terms: Vec<Term>) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::invalid(format!("dimension {n} outside 1..=3")));
        }
        for t in &terms {
            if t.center.dim() != n {
                return Err(Error::invalid("term center has the wrong dimension"));
            }
            if !t.coef.is_finite() {
                return Err(Error::invalid("term coefficient must be finite"));
            }
            let ok = match &t.shape {
                Shape::Indicator { radius } | Shape::ComplementPower { radius } => *radius > 0.0,
                Shape::Bump { radius, gamma } => {
                    *radius > 0.0 && *gamma >= 0.0 && *gamma < n as f64
                }
                Shape::Gaussian { width } => *width > 0.0,
                Shape::Table { t, v } => {
                    !t.is_empty()
                        && t.len() == v.len()
                        && t[0] > 0.0
                        && t.windows(2).all(|w| w[1] > w[0])
                        && v.iter().all(|x| x.is_finite())
                }
            };
            if !ok {
                return Err(Error::invalid(format!(
                    "invalid shape parameters {:?}",
                    t.shape
                )));
            }
        }
        Ok(TestFunction {
            id: id.into(),
            n,
            terms,
        })
    }

    pub fn single(id: impl Into<String>, center: Point, shape: Shape) -> Result<Self> {
        let n = center.dim();
        TestFunction::new(
            id,
            n,
            vec![Term {
                coef: 1.0,
                center,
                shape,
            }],
        )
    }

    pub fn indicator(center: Point, radius: f64) -> Result<Self> {
        TestFunction::single(
            format!("indicator-{radius}"),
            center,
            Shape::Indicator { radius },
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.coef == 0.0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coef: t.coef * c,
                ..t.clone()
            })
            .collect();
        TestFunction {
            id: format!("{}*{c}", self.id),
            n: self.n,
            terms,
        }
    }

    /// a·self + b·other.
    pub fn combine(&self, a: f64, other: &TestFunction, b: f64) -> Self {
        let mut terms: Vec<Term> = self
            .terms
            .iter()
            .map(|t| Term {
                coef: t.coef * a,
                ..t.clone()
            })
            .collect();
        terms.extend(other.terms.iter().map(|t| Term {
            coef: t.coef * b,
            ..t.clone()
        }));
        TestFunction {
            id: format!("{a}*{}+{b}*{}", self.id, other.id),
            n: self.n,
            terms,
        }
    }

    /// f(λ ·): every center and length scale divided by λ.
    pub fn dilated(&self, lambda: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let c: Vec<f64> = t.center.coords().iter().map(|x| x / lambda).collect();
                let center = Point::new(&c).expect("finite");
                let (coef, shape) = match &t.shape {
                    Shape::Indicator { radius } => (
                        t.coef,
                        Shape::Indicator {
                            radius: radius / lambda,
                        },
                    ),
                    Shape::Bump { radius, gamma } => (
                        t.coef * lambda.powf(-gamma),
                        Shape::Bump {
                            radius: radius / lambda,
                            gamma: *gamma,
                        },
                    ),
                    Shape::Gaussian { width } => (
                        t.coef,
                        Shape::Gaussian {
                            width: width / lambda,
                        },
                    ),
                    Shape::ComplementPower { radius } => (
                        t.coef * lambda.powi(-2 * self.n as i32),
                        Shape::ComplementPower {
                            radius: radius / lambda,
                        },
                    ),
                    Shape::Table { t: ts, v } => (
                        t.coef,
                        Shape::Table {
                            t: ts.iter().map(|x| x / lambda).collect(),
                            v: v.clone(),
                        },
                    ),
                };
                Term {
                    coef,
                    center,
                    shape,
                }
            })
            .collect();
        TestFunction {
            id: format!("{}({lambda}x)", self.id),
            n: self.n,
            terms,
        }
    }

    /// Every coefficient and table value nonnegative.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.iter().all(|t| {
            t.coef >= 0.0
                && match &t.shape {
                    Shape::Table { v, .. } => v.iter().all(|x| *x >= 0.0),
                    _ => true,
                }
        })
    }

    /// Typical magnitude: Σ |coef| · (value of the shape at its edge).
    pub fn scale(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                t.coef.abs()
                    * match &t.shape {
                        Shape::Indicator { .. } | Shape::Gaussian { .. } => 1.0,
                        Shape::Bump { radius, gamma } => radius.powf(-gamma),
                        Shape::ComplementPower { radius } => radius.powi(-2 * self.n as i32),
                        Shape::Table { v, .. } => v.iter().fold(0.0, |m: f64, x| m.max(x.abs())),
                    }
            })
            .sum()
    }

    /// Largest distance from `x` to the support, infinite for unbounded supports.
    pub fn support_reach(&self, x: &Point) -> f64 {
        let mut reach: f64 = 0.0;
        for t in &self.terms {
            if t.coef == 0.0 {
                continue;
            }
            let d = x.distance(&t.center);
            let r = match &t.shape {
                Shape::Indicator { radius } | Shape::Bump { radius, .. } => *radius,
                Shape::Table { t: ts, .. } => ts[ts.len() - 1],
                Shape::Gaussian { .. } | Shape::ComplementPower { .. } => f64::INFINITY,
            };
            reach = reach.max(d + r);
        }
        reach
    }

    /// Upper bound for |f(y)| on the sphere |y - x| = t. Infinite while the sphere
    /// still meets the support of a compactly supported term; used far out only.
    pub fn far_envelope(&self, x: &Point, t: f64) -> f64 {
        let mut s = 0.0;
        for term in &self.terms {
            if term.coef == 0.0 {
                continue;
            }
            let d = x.distance(&term.center);
            let u = (t - d).max(0.0);
            let e = match &term.shape {
                Shape::Gaussian { width } => (-(u / width).powi(2)).exp(),
                Shape::ComplementPower { radius } => u.max(*radius).powi(-2 * self.n as i32),
                Shape::Indicator { radius } | Shape::Bump { radius, .. } => {
                    if t > d + radius {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                }
                Shape::Table { t: ts, .. } => {
                    if t > d + ts[ts.len() - 1] {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                }
            };
            s += term.coef.abs() * e;
        }
        s
    }

    /// Points where f blows up, with the local exponent.
    pub fn singular_points(&self) -> Vec<(Point, f64)> {
        self.terms
            .iter()
            .filter_map(|t| match t.shape {
                Shape::Bump { gamma, .. } if gamma > 0.0 && t.coef != 0.0 => {
                    Some((t.center, -gamma))
                }
                _ => None,
            })
            .collect()
    }

    /// Threshold values at which the distribution function of |f| jumps.
    pub fn plateaus(&self) -> Vec<f64> {
        let mut v: Vec<f64> = Vec::new();
        let mut total = 0.0;
        for t in &self.terms {
            match &t.shape {
                Shape::Indicator { .. } => {
                    v.push(t.coef.abs());
                    total += t.coef;
                }
                Shape::Table { v: vals, .. } => {
                    for w in vals.windows(2) {
                        if w[0] == w[1] {
                            v.push((t.coef * w[0]).abs());
                        }
                    }
                }
                _ => {}
            }
        }
        if total != 0.0 {
            v.push(total.abs());
        }
        v.retain(|x| *x > 0.0);
        v
    }

    /// ∫_{S^{n-1}} f(x + t u) dσ(u).
    pub fn spherical_integral(&self, x: &Point, t: f64) -> Result<f64> {
        let mut s = 0.0;
        for term in &self.terms {
            if term.coef != 0.0 {
                s += term.coef * shape_sphere(&term.shape, self.n, x.distance(&term.center), t)?;
            }
        }
        Ok(s)
    }

    /// Radii t about `x` where the spherical integral may kink, jump or blow up.
    pub fn sphere_breaks(&self, x: &Point) -> Vec<f64> {
        let mut b = Vec::new();
        for term in &self.terms {
            let d = x.distance(&term.center);
            b.push(d);
            for r in shape_radii(&term.shape) {
                b.push((d - r).abs());
                b.push(d + r);
            }
        }
        b.retain(|t| *t > 0.0);
        b
    }
}

fn shape_radii(shape: &Shape) -> Vec<f64> {
    match shape {
        Shape::Indicator { radius }
        | Shape::Bump { radius, .. }
        | Shape::ComplementPower { radius } => vec![*radius],
        Shape::Gaussian { .. } => Vec::new(),
        Shape::Table { t, .. } => t.clone(),
    }
}

/// Spherical integral of a radial shape about a point at distance `d` from its center.
fn shape_sphere(shape: &Shape, n: usize, d: f64, t: f64) -> Result<f64> {
    let prof = |s: f64| shape_profile(shape, n, s);
    if d == 0.0 {
        return Ok(unit_sphere_area(n) * prof(t));
    }
    match n {
        1 => Ok(prof((d + t).abs()) + prof((d - t).abs())),
        2 => {
            // 2 ∫_0^π F(sqrt(t^2 + d^2 - 2 t d cos θ)) dθ, angle measured toward the center
            let g = |th: f64| prof((t * t + d * d - 2.0 * t * d * th.cos()).max(0.0).sqrt());
            let mut breaks = Vec::new();
            for r in shape_radii(shape) {
                let c = (t * t + d * d - r * r) / (2.0 * t * d);
                if c > -1.0 && c < 1.0 {
                    breaks.push(c.acos());
                }
            }
            Ok(2.0 * quad::integrate_pieces(&g, 0.0, PI, &breaks, (true, false), 1e-11)?)
        }
        3 => {
            // (2π / (t d)) ∫_{|t-d|}^{t+d} F(s) s ds
            let g = |s: f64| prof(s) * s;
            let breaks = shape_radii(shape);
            let v =
                quad::integrate_pieces(&g, (t - d).abs(), t + d, &breaks, (true, false), 1e-11)?;
            Ok(2.0 * PI * v / (t * d))
        }
        _ => unreachable!(),
    }
}

impl Field for TestFunction {
    fn dim(&self) -> usize {
        self.n
    }

    fn at(&self, x: &Point) -> f64 {
        self.terms
            .iter()
            .map(|t| t.profile(self.n, x.distance(&t.center)))
            .sum()
    }

    fn features(&self) -> Vec<Feature> {
        let mut f = Vec::new();
        for t in &self.terms {
            f.push(Feature::point(t.center));
            f.extend(
                shape_radii(&t.shape)
                    .into_iter()
                    .map(|r| Feature::new(t.center, r)),
            );
        }
        f
    }

    fn symmetry(&self) -> Symmetry {
        let active: Vec<&Term> = self.terms.iter().filter(|t| t.coef != 0.0).collect();
        match active.first() {
            None => Symmetry::Constant(0.0),
            Some(t0) if active.iter().all(|t| t.center == t0.center) => Symmetry::Radial(t0.center),
            _ => Symmetry::General,
        }
    }

    fn profile(&self, t: f64) -> f64 {
        self.terms.iter().map(|term| term.profile(self.n, t)).sum()
    }

    fn level_radii(&self, level: f64) -> Vec<f64> {
        let active: Vec<&Term> = self.terms.iter().filter(|t| t.coef != 0.0).collect();
        if active.len() != 1 {
            return Vec::new();
        }
        let t = active[0];
        let c = t.coef.abs();
        if level <= 0.0 || c == 0.0 {
            return Vec::new();
        }
        match &t.shape {
            Shape::Bump { gamma, .. } if *gamma > 0.0 => vec![(c / level).powf(1.0 / gamma)],
            Shape::Gaussian { width } if c > level => vec![width * (c / level).ln().sqrt()],
            Shape::ComplementPower { .. } => vec![(c / level).powf(1.0 / (2 * self.n) as f64)],
            Shape::Table { t: ts, v } => {
                let mut out = Vec::new();
                for i in 0..ts.len() - 1 {
                    let (a, b) = (c * v[i].abs(), c * v[i + 1].abs());
                    if (a - level) * (b - level) < 0.0 {
                        out.push(ts[i] + (ts[i + 1] - ts[i]) * (level - a) / (b - a));
                    }
                }
                out
            }
            _ => Vec::new(),
        }
    }
}

/// Config form of one term; shape-specific fields are checked when built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub shape: ShapeKind,
    #[serde(default = "one")]
    pub coef: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub t: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    Indicator,
    Bump,
    Gaussian,
    ComplementPower,
    Table,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionSpec {
    pub id: String,
    #[serde(default)]
    pub terms: Vec<TermSpec>,
}

impl FunctionSpec {
    pub fn build(&self, n: usize) -> Result<TestFunction> {
        let mut terms = Vec::new();
        for ts in &self.terms {
            let center = match &ts.center {
                None => Point::origin(n),
                Some(c) if c.len() == n => Point::new(c)?,
                Some(c) => {
                    return Err(Error::Config(format!(
                        "function {}: center {c:?} is not in R^{n}",
                        self.id
                    )))
                }
            };
            let need = |v: Option<f64>, what: &str| {
                v.ok_or_else(|| {
                    Error::Config(format!(
                        "function {}: {:?} term needs `{what}`",
                        self.id, ts.shape
                    ))
                })
            };
            let shape = match ts.shape {
                ShapeKind::Indicator => Shape::Indicator {
                    radius: need(ts.radius, "radius")?,
                },
                ShapeKind::Bump => Shape::Bump {
                    radius: need(ts.radius, "radius")?,
                    gamma: need(ts.gamma, "gamma")?,
                },
                ShapeKind::Gaussian => Shape::Gaussian {
                    width: need(ts.width, "width")?,
                },
                ShapeKind::ComplementPower => Shape::ComplementPower {
                    radius: ts.radius.unwrap_or(1.0),
                },
                ShapeKind::Table => Shape::Table {
                    t: ts.t.clone(),
                    v: ts.v.clone(),
                },
            };
            terms.push(Term {
                coef: ts.coef,
                center,
                shape,
            });
        }
        TestFunction::new(self.id.clone(), n, terms)
    }
}

// ---------------------------------------------------------------------------
// norms

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub r_star: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub center_star: Option<Point>,
    pub stable: bool,
}

/// Local integrability of |f|^p w^power near every singular point in the closed ball.
fn check_product_integrable(
    f: &dyn SingularField,
    p: f64,
    w: &Weight,
    power: f64,
    ball: &Ball,
) -> Result<()> {
    w.check_integrable(power, ball)?;
    let n = ball.dim() as f64;
    for (c, e) in f.singular_exponents() {
        if !ball.contains_closed(&c) {
            continue;
        }
        let we = w.exponent_at(&c) * power;
        if !(p * e + we > -n) {
            return Err(Error::Precondition(format!(
                "|f|^{p} w^{power} not integrable at {:?}: local exponent {} must exceed -n = {}",
                c.coords(),
                p * e + we,
                -n
            )));
        }
    }
    Ok(())
}

/// A field with declared power singularities; test functions and potential profiles.
pub trait SingularField: Field {
    /// Points where the field blows up like |x - c|^e, with e < 0.
    fn singular_exponents(&self) -> Vec<(Point, f64)> {
        Vec::new()
    }

    /// Magnitude used to scale default threshold grids.
    fn magnitude(&self) -> f64;

    /// Threshold values at which the distribution function jumps.
    fn plateau_values(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl SingularField for TestFunction {
    fn singular_exponents(&self) -> Vec<(Point, f64)> {
        self.singular_points().into_iter().collect()
    }
    fn magnitude(&self) -> f64 {
        self.scale()
    }
    fn plateau_values(&self) -> Vec<f64> {
        self.plateaus()
    }
}

/// (∫_B |f|^p w^power)^{1/p}; p = ∞ gives the essential supremum of |f| on B.
pub fn lp_norm(
    f: &dyn SingularField,
    w: &Weight,
    power: f64,
    ball: &Ball,
    p: f64,
    tol: f64,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::invalid(format!("L_p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return ess_sup_abs(f, ball);
    }
    check_product_integrable(f, p, w, power, ball)?;
    if let Symmetry::Constant(0.0) = f.symmetry() {
        return Ok(0.0);
    }
    let fp = field::Power { base: f, s: p };
    let wp = field::Power { base: w, s: power };
    let prod = Product::new(vec![&fp, &wp]);
    let v = field::ball_integral(&prod, ball, tol)?;
    Ok(v.max(0.0).powf(1.0 / p))
}

fn ess_sup_abs(f: &dyn SingularField, ball: &Ball) -> Result<f64> {
    const SAMPLES: usize = 2048;
    if f.singular_exponents()
        .iter()
        .any(|(c, _)| ball.contains_closed(c))
    {
        return Ok(f64::INFINITY);
    }
    let mut best: f64 = 0.0;
    match f.symmetry() {
        Symmetry::Constant(v) => return Ok(v.abs()),
        Symmetry::Radial(pole) => {
            let d = ball.center.distance(&pole);
            let (lo, hi) = ((d - ball.radius).max(0.0), d + ball.radius);
            for i in 0..SAMPLES {
                let t = lo + (hi - lo) * (i as f64 + 0.5) / SAMPLES as f64;
                best = best.max(f.profile(t).abs());
            }
        }
        Symmetry::General if ball.dim() == 1 => {
            let c = ball.center.coords()[0];
            for i in 0..SAMPLES {
                let x = c - ball.radius + 2.0 * ball.radius * (i as f64 + 0.5) / SAMPLES as f64;
                best = best.max(f.at(&Point::on_axis(1, x)).abs());
            }
        }
        Symmetry::General => {
            return Err(Error::Unsupported(
                "L_inf norm of a non-radial field in R^n, n > 1".into(),
            ))
        }
    }
    Ok(best)
}

/// Default threshold grid: 129 log-spaced values over [1e-6, 1e6] times the function's magnitude.
pub fn default_threshold_grid(f: &dyn SingularField) -> LogGrid {
    let s = f.magnitude();
    let s = if s > 0.0 && s.is_finite() { s } else { 1.0 };
    LogGrid {
        lo: 1e-6 * s,
        hi: 1e6 * s,
        n: 129,
    }
}

fn weak_value(
    f: &dyn SingularField,
    w: &Weight,
    power: f64,
    ball: &Ball,
    q: f64,
    level: f64,
) -> Result<f64> {
    let above = Above { base: f, level };
    let wp = field::Power { base: w, s: power };
    let prod = Product::new(vec![&above, &wp]);
    let m = field::ball_integral(&prod, ball, NORM_TOL)?;
    Ok(level * m.max(0.0).powf(1.0 / q))
}

/// sup_λ λ · (w^power({x ∈ B : |f(x)| > λ}))^{1/q} over the threshold grid, augmented
/// by left limits at the plateau values of |f|.
pub fn weak_lq_norm(
    f: &dyn SingularField,
    w: &Weight,
    power: f64,
    ball: &Ball,
    q: f64,
    lambda_grid: &LogGrid,
) -> Result<f64> {
    Ok(weak_lq_norm_at(f, w, power, ball, q, lambda_grid)?.0)
}

fn weak_lq_norm_at(
    f: &dyn SingularField,
    w: &Weight,
    power: f64,
    ball: &Ball,
    q: f64,
    lambda_grid: &LogGrid,
) -> Result<(f64, f64)> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::invalid(format!(
            "weak norm needs 1 <= q < inf, got {q}"
        )));
    }
    lambda_grid.validate()?;
    w.check_integrable(power, ball)?;
    if let Symmetry::Constant(0.0) = f.symmetry() {
        return Ok((0.0, lambda_grid.lo));
    }
    let mut levels = lambda_grid.points();
    levels.extend(f.plateau_values().into_iter().map(|v| v * (1.0 - 1e-12)));
    let vals = levels
        .iter()
        .map(|&l| weak_value(f, w, power, ball, q, l))
        .collect::<Result<Vec<f64>>>()?;
    let (i, v) = argmax(&vals).unwrap_or((0, 0.0));
    Ok((v, levels[i]))
}

fn morrey_cell(
    f: &dyn SingularField,
    p: f64,
    phi: &PhiFunction,
    w: &Weight,
    power: f64,
    x0: &Point,
    r: f64,
    weak: Option<&LogGrid>,
) -> Result<f64> {
    let ball = Ball::new(*x0, r)?;
    let inner = match weak {
        None => lp_norm(f, w, power, &ball, p, NORM_TOL)?,
        Some(g) => weak_lq_norm(f, w, power, &ball, p, g)?,
    };
    if inner == 0.0 {
        return Ok(0.0);
    }
    let mass = ball_mass(w, power, &ball, MASS_TOL)?;
    Ok(inner / (phi.eval(x0, r) * mass.powf(1.0 / p)))
}

/// Values of the local Morrey quotient on every grid radius.
#[allow(clippy::too_many_arguments)]
pub fn morrey_profile(
    f: &dyn SingularField,
    p: f64,
    phi: &PhiFunction,
    w: &Weight,
    power: f64,
    x0: &Point,
    r_grid: &LogGrid,
    weak: Option<&LogGrid>,
) -> Result<Vec<(f64, f64)>> {
    r_grid.validate()?;
    let radii = r_grid.points();
    let vals: Vec<Result<f64>> = radii
        .par_iter()
        .map(|&r| morrey_cell(f, p, phi, w, power, x0, r, weak))
        .collect();
    radii
        .into_iter()
        .zip(vals)
        .map(|(r, v)| v.map(|v| (r, v)))
        .collect()
}

fn sup_of(profile: &[(f64, f64)]) -> (f64, f64) {
    let vals: Vec<f64> = profile.iter().map(|p| p.1).collect();
    let (i, v) = argmax(&vals).unwrap_or((0, 0.0));
    (v, profile[i].0)
}

#[allow(clippy::too_many_arguments)]
fn local_norm(
    f: &dyn SingularField,
    p: f64,
    phi: &PhiFunction,
    w: &Weight,
    power: f64,
    x0: &Point,
    r_grid: &LogGrid,
    weak: Option<&LogGrid>,
) -> Result<NormResult> {
    let (value, r_star) = sup_of(&morrey_profile(f, p, phi, w, power, x0, r_grid, weak)?);
    let (fine, _) = sup_of(&morrey_profile(
        f,
        p,
        phi,
        w,
        power,
        x0,
        &r_grid.refined(),
        weak,
    )?);
    Ok(NormResult {
        value,
        r_star,
        center_star: None,
        stable: relative_change(value, fine) < STABILITY_TOL,
    })
}

/// sup_r φ(x0,r)^{-1} (w^power(B(x0,r)))^{-1/p} ‖f χ_{B(x0,r)}‖_{L_p(w^power)} over the radius grid.
pub fn morrey_norm_local(
    f: &dyn SingularField,
    p: f64,
    phi: &PhiFunction,
    w: &Weight,
    power: f64,
    x0: &Point,
    r_grid: &LogGrid,
) -> Result<NormResult> {
    local_norm(f, p, phi, w, power, x0, r_grid, None)
}

/// The weak counterpart of [`morrey_norm_local`], with a weak L_q norm on each ball.
#[allow(clippy::too_many_arguments)]
pub fn weak_morrey_norm_local(
    f: &dyn SingularField,
    q: f64,
    phi: &PhiFunction,
    w: &Weight,
    power: f64,
    x0: &Point,
    r_grid: &LogGrid,
    lambda_grid: &LogGrid,
) -> Result<NormResult> {
    local_norm(f, q, phi, w, power, x0, r_grid, Some(lambda_grid))
}

/// Local norm maximised over a finite set of centers as well.
pub fn morrey_norm_global(
    f: &dyn SingularField,
    p: f64,
    phi: &PhiFunction,
    w: &Weight,
    power: f64,
    centers: &[Point],
    r_grid: &LogGrid,
) -> Result<NormResult> {
    global_norm(f, p, phi, w, power, centers, r_grid, None)
}

#[allow(clippy::too_many_arguments)]
pub fn weak_morrey_norm_global(
    f: &dyn SingularField,
    q: f64,
    phi: &PhiFunction,
    w: &Weight,
    power: f64,
    centers: &[Point],
    r_grid: &LogGrid,
    lambda_grid: &LogGrid,
) -> Result<NormResult> {
    global_norm(f, q, phi, w, power, centers, r_grid, Some(lambda_grid))
}

#[allow(clippy::too_many_arguments)]
fn global_norm(
    f: &dyn SingularField,
    p: f64,
    phi: &PhiFunction,
    w: &Weight,
    power: f64,
    centers: &[Point],
    r_grid: &LogGrid,
    weak: Option<&LogGrid>,
) -> Result<NormResult> {
    if centers.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut best: Option<NormResult> = None;
    let mut fine_best: f64 = 0.0;
    for c in centers {
        let coarse = sup_of(&morrey_profile(f, p, phi, w, power, c, r_grid, weak)?);
        let fine = sup_of(&morrey_profile(
            f,
            p,
            phi,
            w,
            power,
            c,
            &r_grid.refined(),
            weak,
        )?);
        fine_best = fine_best.max(fine.0);
        if best.is_none_or(|b| coarse.0 > b.value) {
            best = Some(NormResult {
                value: coarse.0,
                r_star: coarse.1,
                center_star: Some(*c),
                stable: false,
            });
        }
    }
    let mut b = best.expect("nonempty");
    b.stable = relative_change(b.value, fine_best) < STABILITY_TOL;
    Ok(b)
}
