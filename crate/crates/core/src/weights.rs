//! Weights, ball masses and Muckenhoupt-type diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{self, Field, Symmetry};
use crate::geom::{unit_sphere_area, Ball, Feature, Point};
use crate::grid::{relative_change, LogGrid, STABILITY_TOL};
use crate::report::{ConditionReport, Extended, Extremal};

/// Slack allowed below 1 in the Hölder lower bound.
pub const HOLDER_SLACK: f64 = 1e-4;

/// Default relative tolerance for ball masses.
pub const MASS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightFamily {
    Constant {
        c: f64,
    },
    /// |x - center|^β
    Power {
        beta: f64,
        center: Point,
    },
    /// |x - center|^β (1 + |ln |x - center||)^γ
    PowerLog {
        beta: f64,
        gamma: f64,
        center: Point,
    },
    /// ∏ |x - c_i|^{β_i}
    Product {
        factors: Vec<(f64, Point)>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Weight {
    family: WeightFamily,
    n: usize,
}

impl Weight {
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::invalid(format!("dimension {n} outside 1..=3")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::invalid(format!(
                "constant weight must be positive, got {c}"
            )));
        }
        Ok(Weight {
            family: WeightFamily::Constant { c },
            n,
        })
    }

    pub fn unit(n: usize) -> Self {
        Weight::constant(n, 1.0).expect("valid dimension")
    }

    pub fn power(beta: f64, center: Point) -> Result<Self> {
        let n = center.dim();
        check_local(beta, n, "weight")?;
        Ok(Weight {
            family: WeightFamily::Power { beta, center },
            n,
        })
    }

    pub fn power_log(beta: f64, gamma: f64, center: Point) -> Result<Self> {
        let n = center.dim();
        check_local(beta, n, "weight")?;
        if !gamma.is_finite() {
            return Err(Error::invalid("log exponent must be finite"));
        }
        Ok(Weight {
            family: WeightFamily::PowerLog {
                beta,
                gamma,
                center,
            },
            n,
        })
    }

    pub fn product(factors: Vec<(f64, Point)>) -> Result<Self> {
        let Some(first) = factors.first() else {
            return Err(Error::invalid("product weight needs at least one factor"));
        };
        let n = first.1.dim();
        for (b, c) in &factors {
            if c.dim() != n {
                return Err(Error::invalid("product weight factors differ in dimension"));
            }
            check_local(*b, n, "weight factor")?;
        }
        Ok(Weight {
            family: WeightFamily::Product { factors },
            n,
        })
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.family, WeightFamily::Constant { .. })
    }

    /// Singular points with the exponent governing the local behaviour there.
    fn singular_points(&self) -> Vec<(f64, Point)> {
        match &self.family {
            WeightFamily::Constant { .. } => Vec::new(),
            WeightFamily::Power { beta, center } | WeightFamily::PowerLog { beta, center, .. } => {
                vec![(*beta, *center)]
            }
            WeightFamily::Product { factors } => factors.clone(),
        }
    }

    /// Local power exponent of w at `c`: w(x) ≈ |x - c|^e near c (zero at regular points).
    pub fn exponent_at(&self, c: &Point) -> f64 {
        self.singular_points()
            .iter()
            .filter(|(_, p)| p.distance(c) == 0.0)
            .map(|(b, _)| *b)
            .sum()
    }

    /// Check that w^power is integrable near every singular point in the closed ball.
    pub fn check_integrable(&self, power: f64, ball: &Ball) -> Result<()> {
        let n = self.n as f64;
        let mut points = self.singular_points();
        if let WeightFamily::PowerLog { beta, .. } = &self.family {
            if *beta == 0.0 {
                // pure log factor: |ln t|^{γ s} is always integrable
                points.clear();
            }
        }
        for (beta, c) in points {
            if ball.center.distance(&c) <= ball.radius * (1.0 + 1e-12) && !(power * beta > -n) {
                return Err(Error::Precondition(format!(
                    "w^{power} not locally integrable at {:?}: needs power*beta = {} > -n = {}",
                    c.coords(),
                    power * beta,
                    -n
                )));
            }
        }
        Ok(())
    }

    /// ess sup of 1/w over the ball, approximated by a sample maximum.
    pub fn ess_sup_inverse(&self, ball: &Ball) -> Result<Extended> {
        if let WeightFamily::Constant { c } = &self.family {
            return Ok(Extended::Finite(1.0 / c));
        }
        let vanishing = |beta: f64, gamma: f64| beta > 0.0 || (beta == 0.0 && gamma < 0.0);
        let zero_in_ball = match &self.family {
            WeightFamily::Power { beta, center } => {
                vanishing(*beta, 0.0) && ball.contains_closed(center)
            }
            WeightFamily::PowerLog {
                beta,
                gamma,
                center,
            } => vanishing(*beta, *gamma) && ball.contains_closed(center),
            WeightFamily::Product { factors } => factors
                .iter()
                .any(|(b, c)| *b > 0.0 && ball.contains_closed(c)),
            WeightFamily::Constant { .. } => false,
        };
        if zero_in_ball {
            return Ok(Extended::Divergent);
        }
        const SAMPLES: usize = 1024;
        let mut best: f64 = 0.0;
        match self.symmetry() {
            Symmetry::Radial(pole) => {
                let d = ball.center.distance(&pole);
                let (lo, hi) = ((d - ball.radius).max(0.0), d + ball.radius);
                for i in 0..=SAMPLES {
                    let t = lo + (hi - lo) * i as f64 / SAMPLES as f64;
                    if t > 0.0 {
                        best = best.max(1.0 / self.profile(t));
                    }
                }
            }
            _ if self.n == 1 => {
                let c = ball.center.coords()[0];
                for i in 0..=SAMPLES {
                    let x = c - ball.radius + 2.0 * ball.radius * i as f64 / SAMPLES as f64;
                    let v = self.at(&Point::on_axis(1, x));
                    if v.is_finite() && v > 0.0 {
                        best = best.max(1.0 / v);
                    }
                }
            }
            _ => {
                return Err(Error::Unsupported(
                    "essential supremum of 1/w for non-radial weights in R^n, n > 1".into(),
                ))
            }
        }
        Ok(Extended::from_f64(best))
    }
}

fn check_local(beta: f64, n: usize, what: &str) -> Result<()> {
    if !beta.is_finite() || !(beta > -(n as f64)) {
        return Err(Error::Precondition(format!(
            "{what} |x|^beta not locally integrable: needs beta = {beta} > -n = {}",
            -(n as f64)
        )));
    }
    Ok(())
}

impl Field for Weight {
    fn dim(&self) -> usize {
        self.n
    }

    fn at(&self, x: &Point) -> f64 {
        match &self.family {
            WeightFamily::Constant { c } => *c,
            WeightFamily::Power { beta, center } => x.distance(center).powf(*beta),
            WeightFamily::PowerLog {
                beta,
                gamma,
                center,
            } => {
                let t = x.distance(center);
                t.powf(*beta) * (1.0 + t.ln().abs()).powf(*gamma)
            }
            WeightFamily::Product { factors } => factors
                .iter()
                .map(|(b, c)| x.distance(c).powf(*b))
                .product(),
        }
    }

    fn features(&self) -> Vec<Feature> {
        let mut f: Vec<Feature> = self
            .singular_points()
            .into_iter()
            .map(|(_, c)| Feature::point(c))
            .collect();
        if let WeightFamily::PowerLog { center, .. } = &self.family {
            f.push(Feature::new(*center, 1.0));
        }
        f
    }

    fn symmetry(&self) -> Symmetry {
        match &self.family {
            WeightFamily::Constant { c } => Symmetry::Constant(*c),
            WeightFamily::Power { center, .. } | WeightFamily::PowerLog { center, .. } => {
                Symmetry::Radial(*center)
            }
            WeightFamily::Product { factors } => {
                let c0 = factors[0].1;
                if factors.iter().all(|(_, c)| c.distance(&c0) == 0.0) {
                    Symmetry::Radial(c0)
                } else {
                    Symmetry::General
                }
            }
        }
    }

    fn profile(&self, t: f64) -> f64 {
        match &self.family {
            WeightFamily::Constant { c } => *c,
            WeightFamily::Power { beta, .. } => t.powf(*beta),
            WeightFamily::PowerLog { beta, gamma, .. } => {
                t.powf(*beta) * (1.0 + t.ln().abs()).powf(*gamma)
            }
            WeightFamily::Product { factors } => t.powf(factors.iter().map(|f| f.0).sum()),
        }
    }
}

/// Serializable weight description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant {
        #[serde(default = "one")]
        c: f64,
    },
    Power {
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    PowerLog {
        beta: f64,
        gamma: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
    },
    Product {
        factors: Vec<FactorSpec>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<f64>>,
}

fn one() -> f64 {
    1.0
}

fn center_of(c: &Option<Vec<f64>>, n: usize) -> Result<Point> {
    match c {
        None => Ok(Point::origin(n)),
        Some(v) if v.len() == n => Point::new(v),
        Some(v) => Err(Error::Config(format!(
            "center {v:?} does not have dimension {n}"
        ))),
    }
}

impl WeightSpec {
    pub fn build(&self, n: usize) -> Result<Weight> {
        match self {
            WeightSpec::Constant { c } => Weight::constant(n, *c),
            WeightSpec::Power { beta, center } => Weight::power(*beta, center_of(center, n)?),
            WeightSpec::PowerLog {
                beta,
                gamma,
                center,
            } => Weight::power_log(*beta, *gamma, center_of(center, n)?),
            WeightSpec::Product { factors } => Weight::product(
                factors
                    .iter()
                    .map(|f| Ok((f.beta, center_of(&f.center, n)?)))
                    .collect::<Result<Vec<_>>>()?,
            ),
        }
    }
}

/// ∫_B w(x)^power dx.
pub fn ball_mass(w: &Weight, power: f64, ball: &Ball, tol: f64) -> Result<f64> {
    if ball.dim() != w.n {
        return Err(Error::invalid("weight and ball dimensions differ"));
    }
    w.check_integrable(power, ball)?;
    match &w.family {
        WeightFamily::Constant { c } => return Ok(c.powf(power) * ball.volume()),
        WeightFamily::Power { beta, center } if ball.center.distance(center) == 0.0 => {
            let e = power * beta + w.n as f64;
            return Ok(unit_sphere_area(w.n) * ball.radius.powf(e) / e);
        }
        _ => {}
    }
    let wp = field::Power { base: w, s: power };
    field::ball_integral(&wp, ball, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentSet {
    pub p: f64,
    pub q: f64,
}

impl ExponentSet {
    /// 1 ≤ p < q < ∞.
    pub fn new(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && p < q && q.is_finite()) {
            return Err(Error::invalid(format!(
                "exponents need 1 <= p < q < inf, got p = {p}, q = {q}"
            )));
        }
        Ok(ExponentSet { p, q })
    }

    /// Also admits p = q, for A_p-style diagnostics.
    pub fn diagnostic(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0 && p <= q && q.is_finite()) {
            return Err(Error::invalid(format!(
                "exponents need 1 <= p <= q < inf, got p = {p}, q = {q}"
            )));
        }
        Ok(ExponentSet { p, q })
    }

    /// p' = p/(p-1), infinite for p = 1.
    pub fn p_prime(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn q_prime(&self) -> f64 {
        conjugate(self.q)
    }
}

pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else {
        p / (p - 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedExponents {
    pub r: f64,
    pub r_prime: f64,
    pub s: f64,
    pub s_prime: f64,
}

/// r = 1 + q/p', r' = 1 + p'/q, s = 1 + p/q', s' = 1 + q'/p.
pub fn derived_exponents(e: &ExponentSet) -> Result<DerivedExponents> {
    if e.p <= 1.0 {
        return Err(Error::invalid(
            "derived exponents need p > 1 (p' is infinite at p = 1)",
        ));
    }
    let (pp, qp) = (e.p_prime(), e.q_prime());
    Ok(DerivedExponents {
        r: 1.0 + e.q / pp,
        r_prime: 1.0 + pp / e.q,
        s: 1.0 + e.p / qp,
        s_prime: 1.0 + qp / e.p,
    })
}

/// A finite family of balls: every center combined with every radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallGrid {
    pub centers: Vec<Point>,
    pub radii: LogGrid,
}

impl BallGrid {
    pub fn new(centers: Vec<Point>, radii: LogGrid) -> Result<Self> {
        let g = BallGrid { centers, radii };
        g.validate()?;
        Ok(g)
    }

    /// Centers {0, ±0.1, ±1, ±10} per axis, 33 radii over [1e-2, 1e2].
    pub fn default_for(n: usize) -> Self {
        let axis = [0.0, -0.1, 0.1, -1.0, 1.0, -10.0, 10.0];
        let mut centers = Vec::new();
        let mut idx = vec![0usize; n];
        loop {
            let c: Vec<f64> = idx.iter().map(|&i| axis[i]).collect();
            centers.push(Point::new(&c).expect("dimension in range"));
            let mut k = 0;
            while k < n {
                idx[k] += 1;
                if idx[k] < axis.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        BallGrid {
            centers,
            radii: LogGrid::radius_default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.centers.is_empty() {
            return Err(Error::EmptyGrid);
        }
        self.radii.validate()
    }

    pub fn balls(&self) -> Vec<Ball> {
        let radii = self.radii.points();
        self.centers
            .iter()
            .flat_map(|c| {
                radii.iter().map(move |&r| Ball {
                    center: *c,
                    radius: r,
                })
            })
            .collect()
    }

    /// Same centers, doubled radial resolution.
    pub fn refined(&self) -> Self {
        BallGrid {
            centers: self.centers.clone(),
            radii: self.radii.refined(),
        }
    }
}

/// Grid supremum over balls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallSup {
    pub value: Extended,
    pub ball: Ball,
    pub stable: bool,
}

/// Evaluate `f` on every ball in order; the first failing ball's error wins.
fn eval_balls<F>(grid: &BallGrid, f: F) -> Result<Vec<(Ball, f64)>>
where
    F: Fn(&Ball) -> Result<f64> + Sync,
{
    grid.validate()?;
    let out: Vec<Result<f64>> = grid.balls().par_iter().map(&f).collect();
    grid.balls()
        .into_iter()
        .zip(out)
        .map(|(b, r)| r.map(|v| (b, v)))
        .collect()
}

fn extreme(vals: &[(Ball, f64)], max: bool) -> (Ball, f64) {
    let mut best = vals[0];
    for &(b, v) in &vals[1..] {
        let better = if max { v > best.1 } else { v < best.1 };
        if better || best.1.is_nan() {
            best = (b, v);
        }
    }
    best
}

fn average_factor(w: &Weight, e: &ExponentSet, ball: &Ball) -> Result<(f64, f64)> {
    let vol = ball.volume();
    let a = (ball_mass(w, e.q, ball, MASS_TOL)? / vol).powf(1.0 / e.q);
    let b = if e.p == 1.0 {
        w.ess_sup_inverse(ball)?.value()
    } else {
        let pp = e.p_prime();
        (ball_mass(w, -pp, ball, MASS_TOL)? / vol).powf(1.0 / pp)
    };
    Ok((a, b))
}

fn apq_value(w: &Weight, e: &ExponentSet, ball: &Ball) -> Result<f64> {
    let (a, b) = average_factor(w, e, ball)?;
    Ok(a * b)
}

/// Grid estimate of the A_{p,q} characteristic
/// sup_B (avg_B w^q)^{1/q} (avg_B w^{-p'})^{1/p'}, with ess sup_B 1/w for p = 1.
pub fn apq_characteristic(w: &Weight, e: &ExponentSet, grid: &BallGrid) -> Result<BallSup> {
    let vals = eval_balls(grid, |b| apq_value(w, e, b))?;
    let (ball, v) = extreme(&vals, true);
    let fine = eval_balls(&grid.refined(), |b| apq_value(w, e, b))?;
    let (_, v2) = extreme(&fine, true);
    let stable = v.is_finite() && relative_change(v, v2) < STABILITY_TOL;
    Ok(BallSup {
        value: Extended::from_f64(v),
        ball,
        stable,
    })
}

fn holder_value(w: &Weight, e: &ExponentSet, ball: &Ball) -> Result<f64> {
    let vol = ball.volume();
    let lq = ball_mass(w, e.q, ball, MASS_TOL)?.powf(1.0 / e.q);
    let lpp = if e.p == 1.0 {
        w.ess_sup_inverse(ball)?.value()
    } else {
        let pp = e.p_prime();
        ball_mass(w, -pp, ball, MASS_TOL)?.powf(1.0 / pp)
    };
    Ok(vol.powf(1.0 / e.p - 1.0 / e.q - 1.0) * lq * lpp)
}

/// |B|^{1/p - 1/q - 1} ‖w‖_{L_q(B)} ‖w^{-1}‖_{L_{p'}(B)} ≥ 1 on every grid ball.
/// The report's constant is the smallest value seen.
pub fn holder_lower_bound_check(
    w: &Weight,
    e: &ExponentSet,
    grid: &BallGrid,
) -> Result<ConditionReport> {
    let vals = eval_balls(grid, |b| holder_value(w, e, b))?;
    let (ball, v) = extreme(&vals, false);
    let fine = eval_balls(&grid.refined(), |b| holder_value(w, e, b))?;
    let (_, v2) = extreme(&fine, false);
    let stable = relative_change(v, v2) < STABILITY_TOL;
    Ok(ConditionReport::new(
        "holder-lower-bound",
        v >= 1.0 - HOLDER_SLACK,
        Extended::from_f64(v),
        ball.into(),
        stable,
    )
    .with_note("empirical_c is the minimum over the grid"))
}

fn reverse_ratio(w: &Weight, power: f64, alpha1: f64, ball: &Ball) -> Result<f64> {
    let small = ball_mass(w, power, ball, MASS_TOL)?;
    let big = ball_mass(w, power, &ball.dilate(alpha1), MASS_TOL)?;
    Ok(small / big)
}

/// w^power(B(x,r)) ≤ α2 · w^power(B(x, α1 r)) on every grid ball.
pub fn reverse_doubling_check(
    w: &Weight,
    power: f64,
    alpha1: f64,
    alpha2: f64,
    grid: &BallGrid,
) -> Result<ConditionReport> {
    if !(alpha1 > 1.0 && alpha1.is_finite()) || !(alpha2 > 0.0 && alpha2 < 1.0) {
        return Err(Error::Precondition(format!(
            "reverse doubling needs alpha1 > 1 and 0 < alpha2 < 1, got ({alpha1}, {alpha2})"
        )));
    }
    let vals = eval_balls(grid, |b| reverse_ratio(w, power, alpha1, b))?;
    let (ball, v) = extreme(&vals, true);
    let fine = eval_balls(&grid.refined(), |b| reverse_ratio(w, power, alpha1, b))?;
    let (_, v2) = extreme(&fine, true);
    let stable = relative_change(v, v2) < STABILITY_TOL;
    Ok(ConditionReport::new(
        "reverse-doubling",
        v <= alpha2,
        Extended::from_f64(v),
        Extremal::from(ball),
        stable,
    ))
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
    fn mass_examples() {
        let b = Ball::new(o(2), 1.0).unwrap();
        assert_relative_eq!(
            ball_mass(&Weight::unit(2), 1.0, &b, 1e-9).unwrap(),
            PI,
            max_relative = 1e-12
        );
        let w = Weight::power(0.5, o(1)).unwrap();
        let b = Ball::new(o(1), 1.0).unwrap();
        assert_relative_eq!(
            ball_mass(&w, 2.0, &b, 1e-9).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert!(matches!(
            Weight::power(-2.0, o(1)),
            Err(Error::Precondition(_))
        ));
        let w = Weight::power(-0.5, o(1)).unwrap();
        assert!(matches!(
            ball_mass(&w, 2.0, &b, 1e-9),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        // off-centre ball through the singularity: ∫_0^2 x^{1/2} dx
        let w = Weight::power(0.5, o(1)).unwrap();
        let b = Ball::new(Point::on_axis(1, 1.0), 1.0).unwrap();
        assert_relative_eq!(
            ball_mass(&w, 1.0, &b, 1e-10).unwrap(),
            2.0 * 2f64.powf(1.5) / 3.0,
            max_relative = 1e-8
        );
        // |x|^{-1} in the plane over the unit disc centred at (1/2, 0) against a 2-d sum
        let w = Weight::power(-1.0, o(2)).unwrap();
        let b = Ball::new(Point::on_axis(2, 0.5), 1.0).unwrap();
        let v = ball_mass(&w, 1.0, &b, 1e-10).unwrap();
        let m = 1200;
        let h = 2.0 / m as f64;
        let mut s = 0.0;
        for i in 0..m {
            for j in 0..m {
                let x = -0.5 + (i as f64 + 0.5) * h;
                let y = -1.0 + (j as f64 + 0.5) * h;
                if (x - 0.5).powi(2) + y * y < 1.0 {
                    s += h * h / (x * x + y * y).sqrt();
                }
            }
        }
        assert_relative_eq!(v, s, max_relative = 2e-3);
    }

    #[test]
    fn unit_weight_characteristic() {
        for n in 1..=2 {
            let g = BallGrid::default_for(n);
            for (p, q) in [(1.0, 2.0), (2.0, 4.0), (1.5, 3.0)] {
                let e = ExponentSet::new(p, q).unwrap();
                let a = apq_characteristic(&Weight::unit(n), &e, &g).unwrap();
                assert_relative_eq!(a.value.value(), 1.0, max_relative = 1e-6);
                assert!(a.stable);
            }
        }
    }

    #[test]
    fn a2_power_weight_is_stable() {
        let w = Weight::power(0.125, o(1)).unwrap();
        let e = ExponentSet::diagnostic(2.0, 2.0).unwrap();
        let a = apq_characteristic(&w, &e, &BallGrid::default_for(1)).unwrap();
        assert!(a.value.is_finite() && a.stable);
        assert!(a.value.value() >= 1.0);
    }

    #[test]
    fn nonintegrable_dual_factor() {
        let w = Weight::power(3.0, o(1)).unwrap();
        let e = ExponentSet::new(2.0, 4.0).unwrap();
        let err = apq_characteristic(&w, &e, &BallGrid::default_for(1)).unwrap_err();
        assert!(matches!(err, Error::Precondition(ref m) if m.contains("-2")));
    }

    #[test]
    fn holder_examples() {
        let e = ExponentSet::new(2.0, 4.0).unwrap();
        let g = BallGrid::default_for(1);
        let r = holder_lower_bound_check(&Weight::unit(1), &e, &g).unwrap();
        assert_relative_eq!(r.empirical_c.value(), 1.0, max_relative = 1e-9);
        let w = Weight::power(0.125, o(1)).unwrap();
        let r = holder_lower_bound_check(&w, &e, &g).unwrap();
        assert!(r.holds && r.empirical_c.value() >= 1.0 - HOLDER_SLACK);
        let empty = BallGrid {
            centers: vec![],
            radii: LogGrid::radius_default(),
        };
        assert_eq!(
            holder_lower_bound_check(&w, &e, &empty).unwrap_err(),
            Error::EmptyGrid
        );
    }

    #[test]
    fn reverse_doubling_examples() {
        let g = BallGrid::default_for(1);
        let r = reverse_doubling_check(&Weight::unit(1), 1.0, 2.0, 0.6, &g).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.empirical_c.value(), 0.5, max_relative = 1e-12);
        assert!(
            !reverse_doubling_check(&Weight::unit(1), 1.0, 2.0, 0.4, &g)
                .unwrap()
                .holds
        );
        let at0 = BallGrid::new(vec![o(1)], LogGrid::radius_default()).unwrap();
        let w = Weight::power(1.0, o(1)).unwrap();
        let r = reverse_doubling_check(&w, 1.0, 2.0, 0.25, &at0).unwrap();
        assert_relative_eq!(r.empirical_c.value(), 0.25, max_relative = 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn derived() {
        let d = derived_exponents(&ExponentSet::new(2.0, 4.0).unwrap()).unwrap();
        assert_relative_eq!(d.r, 3.0);
        assert_relative_eq!(d.s, 2.5);
        assert_relative_eq!(d.r_prime, d.r / (d.r - 1.0), max_relative = 1e-12);
        assert!(derived_exponents(&ExponentSet::new(1.0, 4.0).unwrap()).is_err());
        assert!(ExponentSet::new(2.0, 2.0).is_err());
    }

    #[test]
    fn spec_parses() {
        let s: WeightSpec =
            toml::from_str("family = \"power\"\nbeta = 0.25\ncenter = [0.0, 0.0]").unwrap();
        let w = s.build(2).unwrap();
        assert_eq!(
            w.family(),
            &WeightFamily::Power {
                beta: 0.25,
                center: o(2)
            }
        );
        assert!(s.build(1).is_err());
    }

    #[test]
    fn ess_sup_inverse_forms() {
        let w = Weight::power(0.5, o(1)).unwrap();
        assert!(w
            .ess_sup_inverse(&Ball::new(o(1), 1.0).unwrap())
            .unwrap()
            .is_divergent());
        let v = w
            .ess_sup_inverse(&Ball::new(Point::on_axis(1, 3.0), 1.0).unwrap())
            .unwrap();
        assert_relative_eq!(v.value(), 2f64.powf(-0.5), max_relative = 1e-12);
        let w = Weight::power(-0.5, o(1)).unwrap();
        let v = w.ess_sup_inverse(&Ball::new(o(1), 4.0).unwrap()).unwrap();
        assert_relative_eq!(v.value(), 2.0, max_relative = 1e-12);
    }
}
