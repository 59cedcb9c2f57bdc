//! The generalized Riesz potential, the centered maximal function, and the
//! near/far diagnostics built on them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, Field, Symmetry};
use crate::geom::{unit_sphere_area, Ball, Feature, Point};
use crate::grid::{argmax, relative_change, LogGrid, STABILITY_TOL};
use crate::kernel::{tilde_rho, Kernel};
use crate::quad::{self, SeriesOutcome};
use crate::spaces::{
    default_threshold_grid, lp_norm, weak_lq_norm, Shape, SingularField, TestFunction, NORM_TOL,
};
use crate::weights::{ball_mass, Weight, MASS_TOL};

/// Doublings of the truncation radius tried before giving up.
const MAX_TRUNCATION_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    /// Relative tolerance of the radial quadrature and of the truncation budget.
    pub tol: f64,
    /// Initial truncation radius for inputs with unbounded support.
    pub r_max: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            tol: 1e-10,
            r_max: 1e3,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.r_max > 0.0 && self.r_max.is_finite()) {
            return Err(Error::invalid(
                "quadrature spec needs tol > 0 and 0 < r_max < inf",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PotentialValue {
    pub value: f64,
    /// Truncation majorant plus the requested relative error.
    pub est_error: f64,
}

fn radial_integrand<'a>(
    f: &'a TestFunction,
    kernel: &'a Kernel,
    x: &'a Point,
) -> impl Fn(f64) -> f64 + 'a {
    move |t: f64| {
        let s = f.spherical_integral(x, t).unwrap_or(f64::NAN);
        if s == 0.0 {
            0.0
        } else {
            kernel.eval(t) / t * s
        }
    }
}

fn potential_breaks(f: &TestFunction, kernel: &Kernel, x: &Point) -> Vec<f64> {
    let mut b = f.sphere_breaks(x);
    b.extend(kernel.breaks());
    b.retain(|t| t.is_finite() && *t > 0.0);
    b.sort_by(|a, c| a.partial_cmp(c).unwrap());
    b
}

/// ∫_a^b ρ(t)/t S(t) dt with S the spherical integral of f about x.
fn radial_segment(
    f: &TestFunction,
    kernel: &Kernel,
    x: &Point,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let g = radial_integrand(f, kernel, x);
    let breaks = potential_breaks(f, kernel, x);
    let is_break = |v: f64| v == 0.0 || breaks.iter().any(|&c| (c - v).abs() <= 1e-13 * v.max(1.0));
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|&c| c > a && c < b).collect();
    inner.dedup();
    // geometric panels beyond the last break keep long smooth stretches cheap
    let last = inner.last().copied().unwrap_or(a).max(a);
    let last_hard = if inner.is_empty() { is_break(a) } else { true };
    let head = quad::integrate_pieces(&g, a, last.min(b), &inner, (is_break(a), true), tol)?;
    let tail = if b > last {
        if last > 0.0 && b / last > 4.0 {
            quad::integrate_pieces(&g, last, 2.0 * last, &[], (last_hard, false), tol)?
                + quad::integrate_geometric(&g, 2.0 * last, b, tol)?
        } else {
            quad::integrate_pieces(&g, last, b, &[], (last_hard, is_break(b)), tol)?
        }
    } else {
        0.0
    };
    Ok(head + tail)
}

fn truncation_majorant(
    f: &TestFunction,
    kernel: &Kernel,
    x: &Point,
    r: f64,
    tol: f64,
) -> Result<f64> {
    let sigma = unit_sphere_area(f.dim());
    let g = |t: f64| {
        let e = f.far_envelope(x, t);
        if e == 0.0 {
            0.0
        } else {
            sigma * kernel.eval(t) / t * e
        }
    };
    match quad::tail(&g, r, r, tol.max(1e-6))? {
        SeriesOutcome::Converged { value, .. } => Ok(value),
        SeriesOutcome::Divergent { .. } => Ok(f64::INFINITY),
    }
}

/// I_ρ f(x) = ∫ ρ(|x-y|) |x-y|^{-n} f(y) dy, evaluated in polar coordinates about x.
pub fn riesz_apply(
    f: &TestFunction,
    kernel: &Kernel,
    x: &Point,
    spec: &QuadratureSpec,
) -> Result<PotentialValue> {
    spec.validate()?;
    if f.dim() != kernel.n() || x.dim() != kernel.n() {
        return Err(Error::invalid(
            "function, kernel and point dimensions differ",
        ));
    }
    if f.is_zero() {
        return Ok(PotentialValue {
            value: 0.0,
            est_error: 0.0,
        });
    }
    let reach = f.support_reach(x);
    if reach.is_finite() {
        let v = radial_segment(f, kernel, x, 0.0, reach, spec.tol)?;
        return Ok(PotentialValue {
            value: v,
            est_error: spec.tol * v.abs(),
        });
    }
    let breaks = potential_breaks(f, kernel, x);
    let last = breaks.last().copied().unwrap_or(1.0);
    let mut r = spec.r_max.max(2.0 * last);
    let mut value = radial_segment(f, kernel, x, 0.0, r, spec.tol)?;
    let g = radial_integrand(f, kernel, x);
    let mut bound = truncation_majorant(f, kernel, x, r, spec.tol)?;
    for _ in 0..MAX_TRUNCATION_DOUBLINGS {
        if bound <= spec.tol * value.abs() {
            return Ok(PotentialValue {
                value,
                est_error: bound + spec.tol * value.abs(),
            });
        }
        value += quad::adaptive(&g, r, 2.0 * r, spec.tol)?.value;
        r *= 2.0;
        bound = truncation_majorant(f, kernel, x, r, spec.tol)?;
    }
    Err(Error::Truncation {
        bound,
        tolerance: spec.tol * value.abs(),
    })
}

/// Potential of f restricted to |y - x| < radius (`near = true`) or to its complement.
pub fn riesz_split(
    f: &TestFunction,
    kernel: &Kernel,
    x: &Point,
    radius: f64,
    near: bool,
    spec: &QuadratureSpec,
) -> Result<f64> {
    spec.validate()?;
    if f.is_zero() {
        return Ok(0.0);
    }
    if near {
        let hi = radius.min(f.support_reach(x));
        return radial_segment(f, kernel, x, 0.0, hi, spec.tol);
    }
    let total = riesz_apply(f, kernel, x, spec)?.value;
    let hi = radius.min(f.support_reach(x));
    Ok(total - radial_segment(f, kernel, x, 0.0, hi, spec.tol)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalValue {
    pub value: f64,
    pub r_star: f64,
    pub stable: bool,
}

fn average(f: &TestFunction, x: &Point, r: f64) -> Result<f64> {
    let ball = Ball::new(*x, r)?;
    let abs = field::Power { base: f, s: 1.0 };
    Ok(field::ball_integral(&abs, &ball, NORM_TOL)? / ball.volume())
}

fn max_on(f: &TestFunction, x: &Point, grid: &LogGrid) -> Result<(f64, f64)> {
    grid.validate()?;
    let radii = grid.points();
    let vals = radii
        .par_iter()
        .map(|&r| average(f, x, r))
        .collect::<Result<Vec<f64>>>()?;
    let (i, v) = argmax(&vals).unwrap_or((0, 0.0));
    Ok((v, radii[i]))
}

/// Centered maximal function sup_r |B(x,r)|^{-1} ∫_{B(x,r)} |f| over the radius grid.
pub fn maximal_apply(f: &TestFunction, x: &Point, r_grid: &LogGrid) -> Result<MaximalValue> {
    if f.is_zero() {
        r_grid.validate()?;
        return Ok(MaximalValue {
            value: 0.0,
            r_star: r_grid.lo,
            stable: true,
        });
    }
    let (value, r_star) = max_on(f, x, r_grid)?;
    let (fine, _) = max_on(f, x, &r_grid.refined())?;
    Ok(MaximalValue {
        value,
        r_star,
        stable: relative_change(value, fine) < STABILITY_TOL,
    })
}

/// Grid used for the maximal function inside the diagnostics.
pub fn maximal_grid() -> LogGrid {
    LogGrid {
        lo: 1e-4,
        hi: 1e4,
        n: 129,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HedbergSplit {
    pub near_value: f64,
    pub far_value: f64,
    pub near_bound: f64,
    pub far_bound: f64,
    /// near_value / near_bound, zero when both vanish.
    pub c_near: f64,
    pub c_far: f64,
}

fn quotient(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else if b == 0.0 {
        f64::INFINITY
    } else {
        a.abs() / b
    }
}

/// Norm data needed by the far-field integrals about a fixed center.
pub struct LocalNorms<'a> {
    pub f: &'a TestFunction,
    pub w: &'a Weight,
    pub p: f64,
    pub q: f64,
    pub x0: Point,
}

impl LocalNorms<'_> {
    /// ‖f χ_{B(x0,t)}‖_{L_p(w^p)}
    pub fn source(&self, t: f64) -> Result<f64> {
        lp_norm(
            self.f,
            self.w,
            self.p,
            &Ball::new(self.x0, t)?,
            self.p,
            NORM_TOL,
        )
    }

    /// w^q(B(x0,t))
    pub fn target_mass(&self, t: f64) -> Result<f64> {
        ball_mass(self.w, self.q, &Ball::new(self.x0, t)?, MASS_TOL)
    }

    fn far_integrand(&self, kernel: &Kernel, t: f64) -> Result<f64> {
        let s = self.source(t)?;
        if s == 0.0 {
            return Ok(0.0);
        }
        Ok(
            s * self.target_mass(t)?.powf(-1.0 / self.q) * kernel.eval(t)
                / t.powi(kernel.n() as i32 + 1),
        )
    }

    /// ∫_a^∞ ‖f χ_{B(x0,t)}‖_{L_p(w^p)} (w^q(B(x0,t)))^{-1/q} ρ(t) t^{-n-1} dt
    pub fn far_integral(&self, kernel: &Kernel, a: f64, tol: f64) -> Result<f64> {
        let g = |t: f64| self.far_integrand(kernel, t);
        let onset = a.max(self.f.support_reach(&self.x0)).clamp(1.0, 1e300);
        match quad::tail_fallible(&g, a, onset, tol)? {
            SeriesOutcome::Converged { value, .. } => Ok(value),
            SeriesOutcome::Divergent { .. } => Ok(f64::INFINITY),
        }
    }

    /// `far_integral` at every start in `starts`: one tail from the largest start,
    /// then the finite pieces between neighbours.
    pub fn far_integrals(&self, kernel: &Kernel, starts: &[f64], tol: f64) -> Result<Vec<f64>> {
        let mut order: Vec<usize> = (0..starts.len()).collect();
        order.sort_by(|&i, &j| starts[i].total_cmp(&starts[j]));
        let mut out = vec![0.0; starts.len()];
        let Some(&last) = order.last() else {
            return Ok(out);
        };
        let tail = self.far_integral(kernel, starts[last], tol)?;
        let err = std::sync::Mutex::new(None);
        let g = |t: f64| match self.far_integrand(kernel, t) {
            Ok(v) => v,
            Err(e) => {
                err.lock().unwrap().get_or_insert(e);
                f64::NAN
            }
        };
        let breaks = self.f.sphere_breaks(&self.x0);
        let pieces = order
            .windows(2)
            .map(|w| {
                quad::integrate_pieces(
                    &g,
                    starts[w[0]],
                    starts[w[1]],
                    &breaks,
                    (false, false),
                    tol * 1e-2,
                )
            })
            .collect::<Result<Vec<_>>>();
        if let Some(e) = err.into_inner().unwrap() {
            return Err(e);
        }
        let pieces = pieces?;
        let mut acc = tail;
        out[last] = acc;
        for (k, w) in order.windows(2).enumerate().rev() {
            acc += pieces[k];
            out[w[0]] = acc;
        }
        Ok(out)
    }
}

/// Near/far split of I_ρ f(x) at radius 2r with the bounds used in the pointwise estimate.
#[allow(clippy::too_many_arguments)]
pub fn hedberg_split_diagnostic(
    f: &TestFunction,
    kernel: &Kernel,
    x: &Point,
    r: f64,
    w: &Weight,
    p: f64,
    q: f64,
    spec: &QuadratureSpec,
) -> Result<HedbergSplit> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::precondition(format!(
            "split radius must be positive, got {r}"
        )));
    }
    if f.is_zero() {
        return Ok(HedbergSplit {
            near_value: 0.0,
            far_value: 0.0,
            near_bound: 0.0,
            far_bound: 0.0,
            c_near: 0.0,
            c_far: 0.0,
        });
    }
    let near_value = riesz_split(f, kernel, x, 2.0 * r, true, spec)?;
    let far_value = riesz_split(f, kernel, x, 2.0 * r, false, spec)?;
    let mf = maximal_apply(f, x, &maximal_grid())?.value;
    let near_bound = mf * tilde_rho(kernel, r)?;
    let norms = LocalNorms { f, w, p, q, x0: *x };
    let far_bound = norms.far_integral(kernel, 2.0 * r, 1e-8)?;
    Ok(HedbergSplit {
        near_value,
        far_value,
        near_bound,
        far_bound,
        c_near: quotient(near_value, near_bound),
        c_far: quotient(far_value, far_bound),
    })
}

/// I_ρ f tabulated along a ray from the center of a radial f, and interpolated
/// linearly in the distance. The tabulation nodes cluster at the radii where f
/// jumps so that the kinks of the potential are resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    n: usize,
    pole: Point,
    s: Vec<f64>,
    u: Vec<f64>,
    features: Vec<f64>,
}

/// Density of tabulation nodes per decade.
pub const PROFILE_PER_DECADE: usize = 48;

impl PotentialProfile {
    /// Tabulate over distances [lo, hi]; values at larger distances are extrapolated
    /// as a power law, smaller ones use the value at the pole.
    pub fn build(
        f: &TestFunction,
        kernel: &Kernel,
        spec: &QuadratureSpec,
        lo: f64,
        hi: f64,
    ) -> Result<Self> {
        let n = f.dim();
        let pole = match f.symmetry() {
            Symmetry::Radial(p) => p,
            Symmetry::Constant(_) => Point::origin(n),
            Symmetry::General => {
                return Err(Error::Unsupported(
                    "potential profile of a function that is not radial".into(),
                ))
            }
        };
        let mut features: Vec<f64> = Vec::new();
        for t in f.terms() {
            match &t.shape {
                Shape::Indicator { radius }
                | Shape::Bump { radius, .. }
                | Shape::ComplementPower { radius } => features.push(*radius),
                Shape::Table { t: ts, .. } => features.extend(ts.iter().copied()),
                Shape::Gaussian { .. } => {}
            }
        }
        features.sort_by(|a, b| a.partial_cmp(b).unwrap());
        features.dedup();
        let mut nodes = vec![0.0];
        let decades = (hi / lo).log10();
        let m = (decades * PROFILE_PER_DECADE as f64).ceil() as usize;
        nodes.extend(LogGrid { lo, hi, n: m + 1 }.points());
        for &r in &features {
            nodes.push(r);
            for k in 1..=30 {
                let h = 2f64.powi(-k);
                nodes.push(r * (1.0 - h));
                nodes.push(r * (1.0 + h));
            }
        }
        nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        nodes.dedup();
        let vals: Vec<Result<f64>> = nodes
            .par_iter()
            .map(|&s| {
                let mut e = [0.0; 3];
                e[0] = 1.0;
                riesz_apply(f, kernel, &pole.add_scaled(&e, s), spec).map(|v| v.value)
            })
            .collect();
        let mut s = Vec::with_capacity(nodes.len());
        let mut u = Vec::with_capacity(nodes.len());
        for (x, v) in nodes.into_iter().zip(vals) {
            match v {
                Ok(v) => {
                    s.push(x);
                    u.push(v);
                }
                // the pole itself may be a non-integrable point of the potential
                Err(Error::Evaluation { .. }) if x == 0.0 => {}
                Err(e) => return Err(e),
            }
        }
        Ok(PotentialProfile {
            n,
            pole,
            s,
            u,
            features,
        })
    }

    /// Profile over a range suited to radius grids inside [1e-4, 1e4].
    pub fn build_default(f: &TestFunction, kernel: &Kernel, spec: &QuadratureSpec) -> Result<Self> {
        PotentialProfile::build(f, kernel, spec, 1e-6, 1e6)
    }

    pub fn pole(&self) -> Point {
        self.pole
    }

    pub fn nodes(&self) -> (&[f64], &[f64]) {
        (&self.s, &self.u)
    }

    pub fn value(&self, t: f64) -> f64 {
        let (s, u) = (&self.s, &self.u);
        let last = s.len() - 1;
        if t <= s[0] {
            return u[0];
        }
        if t >= s[last] {
            let (a, b) = (u[last - 1], u[last]);
            if a != 0.0 && b != 0.0 && a.signum() == b.signum() {
                let e = (b / a).ln() / (s[last] / s[last - 1]).ln();
                return b * (t / s[last]).powf(e);
            }
            return b;
        }
        let i = s.partition_point(|&x| x <= t) - 1;
        let w = (t - s[i]) / (s[i + 1] - s[i]);
        u[i] * (1.0 - w) + u[i + 1] * w
    }
}

impl Field for PotentialProfile {
    fn dim(&self) -> usize {
        self.n
    }
    fn at(&self, x: &Point) -> f64 {
        self.value(x.distance(&self.pole))
    }
    fn features(&self) -> Vec<Feature> {
        self.features
            .iter()
            .map(|&r| Feature::new(self.pole, r))
            .collect()
    }
    fn symmetry(&self) -> Symmetry {
        if self.u.iter().all(|v| *v == 0.0) {
            Symmetry::Constant(0.0)
        } else {
            Symmetry::Radial(self.pole)
        }
    }
    fn profile(&self, t: f64) -> f64 {
        self.value(t)
    }
    fn level_radii(&self, level: f64) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 0..self.s.len() - 1 {
            let (a, b) = (self.u[i].abs(), self.u[i + 1].abs());
            if (a - level) * (b - level) < 0.0 {
                out.push(self.s[i] + (self.s[i + 1] - self.s[i]) * (level - a) / (b - a));
            }
        }
        out
    }
}

impl SingularField for PotentialProfile {
    fn magnitude(&self) -> f64 {
        self.u.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoTermRecord {
    pub r: f64,
    pub lhs: f64,
    pub term1: f64,
    pub term2: f64,
    /// lhs / (term1 + term2); `None` when all three vanish.
    pub empirical_c: Option<f64>,
}

/// Which norm the left side of the local estimate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strength {
    Strong,
    Weak,
}

/// Two-term local estimate on B(x0, r) from a tabulated potential about x0.
/// For `Strength::Weak` the source exponent is 1 and the left side is a weak L_q norm.
#[allow(clippy::too_many_arguments)]
pub fn two_term_from_profile(
    profile: &PotentialProfile,
    f: &TestFunction,
    kernel: &Kernel,
    w: &Weight,
    p: f64,
    q: f64,
    r: f64,
    strength: Strength,
) -> Result<TwoTermRecord> {
    let norms = LocalNorms {
        f,
        w,
        p: if strength == Strength::Weak { 1.0 } else { p },
        q,
        x0: profile.pole(),
    };
    let far = norms.far_integral(kernel, 2.0 * r, 1e-8)?;
    two_term_with_far(profile, f, w, p, q, r, far, strength)
}

/// `two_term_from_profile` with the far integral from 2r already known.
#[allow(clippy::too_many_arguments)]
pub fn two_term_with_far(
    profile: &PotentialProfile,
    f: &TestFunction,
    w: &Weight,
    p: f64,
    q: f64,
    r: f64,
    far: f64,
    strength: Strength,
) -> Result<TwoTermRecord> {
    let x0 = profile.pole();
    let ball = Ball::new(x0, r)?;
    let p = if strength == Strength::Weak { 1.0 } else { p };
    let lhs = match strength {
        Strength::Strong => lp_norm(profile, w, q, &ball, q, NORM_TOL)?,
        Strength::Weak => weak_lq_norm(profile, w, q, &ball, q, &default_threshold_grid(profile))?,
    };
    let norms = LocalNorms { f, w, p, q, x0 };
    let term1 = norms.source(2.0 * r)?;
    let term2 = if far == 0.0 {
        0.0
    } else {
        norms.target_mass(r)?.powf(1.0 / q) * far
    };
    let den = term1 + term2;
    let empirical_c = if lhs == 0.0 && den == 0.0 {
        None
    } else {
        Some(quotient(lhs, den))
    };
    Ok(TwoTermRecord {
        r,
        lhs,
        term1,
        term2,
        empirical_c,
    })
}

/// Two-term local estimate ‖I_ρ f χ_B‖ ≤ C (‖f χ_{2B}‖ + (w^q(B))^{1/q} ∫_{2r}^∞ ...) on B(x0, r).
#[allow(clippy::too_many_arguments)]
pub fn local_two_term_check(
    f: &TestFunction,
    kernel: &Kernel,
    w: &Weight,
    p: f64,
    q: f64,
    x0: &Point,
    r: f64,
    spec: &QuadratureSpec,
    strength: Strength,
) -> Result<TwoTermRecord> {
    let centred = match f.symmetry() {
        Symmetry::Radial(c) => c == *x0,
        Symmetry::Constant(_) => true,
        Symmetry::General => false,
    };
    if !centred {
        return Err(Error::Unsupported(
            "two-term check needs f radial about x0".into(),
        ));
    }
    let lo = (r * 1e-4).min(1e-6);
    let hi = (r * 1e4).max(1e6);
    let profile = PotentialProfile::build(f, kernel, spec, lo, hi)?;
    two_term_from_profile(&profile, f, kernel, w, p, q, r, strength)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn o(n: usize) -> Point {
        Point::origin(n)
    }

    #[test]
    fn indicator_potential_at_centre() {
        let f = TestFunction::indicator(o(1), 1.0).unwrap();
        let k = Kernel::power(1, 0.5).unwrap();
        let v = riesz_apply(&f, &k, &o(1), &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(v.value, 4.0, max_relative = 1e-8);
        let z = TestFunction::zero(1);
        assert_eq!(
            riesz_apply(&z, &k, &Point::on_axis(1, 0.3), &QuadratureSpec::default())
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn dilation_example() {
        let f = TestFunction::indicator(o(1), 1.0).unwrap().dilated(2.0);
        let k = Kernel::power(1, 0.5).unwrap();
        let v = riesz_apply(&f, &k, &o(1), &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(v.value, 4.0 / 2f64.sqrt(), max_relative = 1e-8);
    }

    #[test]
    fn off_support_closed_form() {
        // n = 1, α = 1/2, x = 3: ∫_{-1}^{1} |3 - y|^{-1/2} dy = 2(√4 - √2)
        let f = TestFunction::indicator(o(1), 1.0).unwrap();
        let k = Kernel::power(1, 0.5).unwrap();
        let v = riesz_apply(&f, &k, &Point::on_axis(1, 3.0), &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(v.value, 2.0 * (2.0 - 2f64.sqrt()), max_relative = 1e-8);
    }

    #[test]
    fn newtonian_potential_of_ball() {
        // n = 3, ρ(t) = t^2: I f(x) = ∫ |x - y|^{-1} f(y) dy
        let f = TestFunction::indicator(o(3), 1.0).unwrap();
        let k = Kernel::power(3, 2.0).unwrap();
        let spec = QuadratureSpec::default();
        let inside = riesz_apply(&f, &k, &Point::on_axis(3, 0.5), &spec)
            .unwrap()
            .value;
        assert_relative_eq!(inside, 2.0 * PI * (1.0 - 0.25 / 3.0), max_relative = 1e-7);
        let outside = riesz_apply(&f, &k, &Point::on_axis(3, 2.0), &spec)
            .unwrap()
            .value;
        assert_relative_eq!(outside, 4.0 * PI / 6.0, max_relative = 1e-7);
    }

    #[test]
    fn planar_log_free_case() {
        // n = 2, α = 1, f = χ_{B(0,1)}, x = 0: 2π ∫_0^1 dt = 2π
        let f = TestFunction::indicator(o(2), 1.0).unwrap();
        let k = Kernel::power(2, 1.0).unwrap();
        let v = riesz_apply(&f, &k, &o(2), &QuadratureSpec::default())
            .unwrap()
            .value;
        assert_relative_eq!(v, 2.0 * PI, max_relative = 1e-8);
    }

    #[test]
    fn infinite_support_tail() {
        // complement power in n = 1 at x = 0: 2 ∫_1^∞ t^{α-1} t^{-2} dt = 2/(2 - α)
        let f = TestFunction::single("tail", o(1), Shape::ComplementPower { radius: 1.0 }).unwrap();
        let k = Kernel::power(1, 0.5).unwrap();
        let v = riesz_apply(&f, &k, &o(1), &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(v.value, 2.0 / 1.5, max_relative = 1e-8);
        assert!(v.est_error < 1e-8);
        // Gaussian at the center: 2 ∫_0^∞ t^{-1/2} e^{-t^2} dt = Γ(1/4)
        let g = TestFunction::single("g", o(1), Shape::Gaussian { width: 1.0 }).unwrap();
        let v = riesz_apply(&g, &k, &o(1), &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(v.value, 3.625_609_908_221_908, max_relative = 1e-8);
    }

    #[test]
    fn maximal_examples() {
        let f = TestFunction::indicator(o(1), 1.0).unwrap();
        let g = LogGrid::new(1.0 / 64.0, 256.0, 15).unwrap();
        let m = maximal_apply(&f, &Point::on_axis(1, 3.0), &g).unwrap();
        assert_relative_eq!(m.value, 0.25, max_relative = 1e-9);
        assert_relative_eq!(m.r_star, 4.0, max_relative = 1e-12);
        let m = maximal_apply(&f, &o(1), &g).unwrap();
        assert_relative_eq!(m.value, 1.0, max_relative = 1e-12);
        assert_eq!(
            maximal_apply(&TestFunction::zero(1), &o(1), &g)
                .unwrap()
                .value,
            0.0
        );
    }

    #[test]
    fn hedberg_example() {
        let f = TestFunction::indicator(o(1), 1.0).unwrap();
        let k = Kernel::power(1, 0.5).unwrap();
        let spec = QuadratureSpec::default();
        let w = Weight::unit(1);
        let h = hedberg_split_diagnostic(&f, &k, &o(1), 0.25, &w, 2.0, 4.0, &spec).unwrap();
        // near part: ∫_{-1/2}^{1/2} |y|^{-1/2} dy = 2√2
        assert_relative_eq!(h.near_value, 2.0 * 2f64.sqrt(), max_relative = 1e-8);
        assert_relative_eq!(h.near_value + h.far_value, 4.0, max_relative = 1e-8);
        assert_relative_eq!(h.near_bound, 0.5 / 0.5, max_relative = 1e-6);
        assert!(h.c_near.is_finite() && h.c_far.is_finite());
        let z =
            hedberg_split_diagnostic(&TestFunction::zero(1), &k, &o(1), 0.25, &w, 2.0, 4.0, &spec)
                .unwrap();
        assert_eq!(
            (z.near_value, z.far_value, z.near_bound, z.far_bound),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn profile_interpolates_potential() {
        let f = TestFunction::indicator(o(1), 1.0).unwrap();
        let k = Kernel::power(1, 0.5).unwrap();
        let prof = PotentialProfile::build(&f, &k, &QuadratureSpec::default(), 1e-3, 1e3).unwrap();
        for x in [0.0, 0.37, 0.999, 1.5, 3.0, 50.0] {
            let exact = riesz_apply(&f, &k, &Point::on_axis(1, x), &QuadratureSpec::default())
                .unwrap()
                .value;
            assert_relative_eq!(prof.value(x), exact, max_relative = 2e-3);
        }
        // far field decays like |x|^{α - n}
        let far = prof.value(1e5);
        assert_relative_eq!(far, 2.0 * 1e5f64.powf(-0.5), max_relative = 1e-3);
    }

    #[test]
    fn two_term_degenerate_and_bounded() {
        let k = Kernel::power(1, 0.25).unwrap();
        let w = Weight::unit(1);
        let spec = QuadratureSpec::default();
        let z = local_two_term_check(
            &TestFunction::zero(1),
            &k,
            &w,
            2.0,
            4.0,
            &o(1),
            1.0,
            &spec,
            Strength::Strong,
        )
        .unwrap();
        assert_eq!(
            (z.lhs, z.term1, z.term2, z.empirical_c),
            (0.0, 0.0, 0.0, None)
        );
        let f = TestFunction::indicator(o(1), 1.0).unwrap();
        let rec = local_two_term_check(&f, &k, &w, 2.0, 4.0, &o(1), 1.0, &spec, Strength::Strong)
            .unwrap();
        let c = rec.empirical_c.unwrap();
        assert!(c > 0.0 && c.is_finite());
    }
}
