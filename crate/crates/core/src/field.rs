//! Scalar fields on R^n and their integrals over balls.
//!
//! Every shipped weight and test function is either constant, radial about a
//! single pole, or (in one dimension) piecewise smooth with known breakpoints.
//! A ball integral of a radial field is reduced to one radial integral
//! ∫ F(t) t^{n-1} A(t) dt, where A(t) is the measure of the part of the sphere
//! of radius t about the pole that lies inside the ball.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::{unit_sphere_area, Ball, Feature, Point};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Symmetry {
    Constant(f64),
    Radial(Point),
    General,
}

pub trait Field: Sync {
    fn dim(&self) -> usize;

    fn at(&self, x: &Point) -> f64;

    /// Spheres (or points) across which the field may jump, kink or blow up.
    fn features(&self) -> Vec<Feature>;

    fn symmetry(&self) -> Symmetry;

    /// Radii about the pole where `|field| = level` may be crossed.
    fn level_radii(&self, _level: f64) -> Vec<f64> {
        Vec::new()
    }

    /// Value at distance `t` from the pole of a radial field.
    fn profile(&self, t: f64) -> f64 {
        match self.symmetry() {
            Symmetry::Constant(v) => v,
            Symmetry::Radial(p) => {
                let mut e = [0.0; 3];
                e[0] = 1.0;
                self.at(&p.add_scaled(&e, t))
            }
            Symmetry::General => f64::NAN,
        }
    }
}

fn same_point(a: &Point, b: &Point) -> bool {
    a.distance(b) <= 1e-12 * (1.0 + a.norm().max(b.norm()))
}

/// Pointwise product of fields.
pub struct Product<'a> {
    pub factors: Vec<&'a dyn Field>,
}

impl<'a> Product<'a> {
    pub fn new(factors: Vec<&'a dyn Field>) -> Self {
        assert!(!factors.is_empty());
        Product { factors }
    }
}

impl Field for Product<'_> {
    fn dim(&self) -> usize {
        self.factors[0].dim()
    }

    fn at(&self, x: &Point) -> f64 {
        let mut v = 1.0;
        for f in &self.factors {
            let a = f.at(x);
            if a == 0.0 {
                // 0 * inf = 0
                return 0.0;
            }
            v *= a;
        }
        v
    }

    fn features(&self) -> Vec<Feature> {
        self.factors.iter().flat_map(|f| f.features()).collect()
    }

    fn symmetry(&self) -> Symmetry {
        let mut c = 1.0;
        let mut pole: Option<Point> = None;
        for f in &self.factors {
            match f.symmetry() {
                Symmetry::Constant(v) => c *= v,
                Symmetry::Radial(p) => match pole {
                    None => pole = Some(p),
                    Some(q) if same_point(&p, &q) => {}
                    Some(_) => return Symmetry::General,
                },
                Symmetry::General => return Symmetry::General,
            }
        }
        match pole {
            None => Symmetry::Constant(c),
            Some(p) => Symmetry::Radial(p),
        }
    }

    fn profile(&self, t: f64) -> f64 {
        let mut v = 1.0;
        for f in &self.factors {
            let a = f.profile(t);
            if a == 0.0 {
                return 0.0;
            }
            v *= a;
        }
        v
    }
}

/// |field|^s, with 0^s = 0 for every s (values off the support stay zero).
pub struct Power<'a> {
    pub base: &'a dyn Field,
    pub s: f64,
}

fn pow_abs(v: f64, s: f64) -> f64 {
    if s == 1.0 {
        v.abs()
    } else if v == 0.0 {
        0.0
    } else {
        v.abs().powf(s)
    }
}

impl Field for Power<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn at(&self, x: &Point) -> f64 {
        pow_abs(self.base.at(x), self.s)
    }
    fn features(&self) -> Vec<Feature> {
        self.base.features()
    }
    fn symmetry(&self) -> Symmetry {
        match self.base.symmetry() {
            Symmetry::Constant(v) => Symmetry::Constant(pow_abs(v, self.s)),
            s => s,
        }
    }
    fn profile(&self, t: f64) -> f64 {
        pow_abs(self.base.profile(t), self.s)
    }
}

/// Indicator of the superlevel set {|field| > level}.
pub struct Above<'a> {
    pub base: &'a dyn Field,
    pub level: f64,
}

impl Field for Above<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn at(&self, x: &Point) -> f64 {
        if self.base.at(x).abs() > self.level {
            1.0
        } else {
            0.0
        }
    }
    fn features(&self) -> Vec<Feature> {
        let mut f = self.base.features();
        if let Symmetry::Radial(p) = self.base.symmetry() {
            f.extend(
                self.base
                    .level_radii(self.level)
                    .into_iter()
                    .map(|r| Feature::new(p, r)),
            );
        }
        f
    }
    fn symmetry(&self) -> Symmetry {
        match self.base.symmetry() {
            Symmetry::Constant(v) => {
                Symmetry::Constant(if v.abs() > self.level { 1.0 } else { 0.0 })
            }
            s => s,
        }
    }
    fn profile(&self, t: f64) -> f64 {
        if self.base.profile(t).abs() > self.level {
            1.0
        } else {
            0.0
        }
    }
}

/// Measure of {u ∈ S^{n-1} : pole + t u ∈ B(c, R)} where d = |c - pole| > 0.
pub fn sphere_fraction(n: usize, t: f64, d: f64, radius: f64) -> f64 {
    if t <= 0.0 {
        return if d < radius { unit_sphere_area(n) } else { 0.0 };
    }
    if t + d <= radius {
        return unit_sphere_area(n);
    }
    if t >= d + radius || t <= d - radius {
        return 0.0;
    }
    let cos = ((t * t + d * d - radius * radius) / (2.0 * t * d)).clamp(-1.0, 1.0);
    match n {
        1 => {
            // only the point on the side of the ball counts
            1.0
        }
        2 => 2.0 * cos.acos(),
        3 => 2.0 * PI * (1.0 - cos),
        _ => unreachable!(),
    }
}

/// ∫_B field(x) dx.
pub fn ball_integral(f: &dyn Field, ball: &Ball, tol: f64) -> Result<f64> {
    let n = ball.dim();
    if f.dim() != n {
        return Err(Error::invalid(format!(
            "field of dimension {} on a ball in R^{n}",
            f.dim()
        )));
    }
    match f.symmetry() {
        Symmetry::Constant(v) => Ok(v * ball.volume()),
        _ if n == 1 => line_integral(f, ball, tol),
        Symmetry::Radial(pole) => radial_ball_integral(f, &pole, ball, tol),
        Symmetry::General => Err(Error::Unsupported(format!(
            "ball integral in R^{n} of a field that is not radial about a single point"
        ))),
    }
}

fn line_integral(f: &dyn Field, ball: &Ball, tol: f64) -> Result<f64> {
    let c = ball.center.coords()[0];
    let (a, b) = (c - ball.radius, c + ball.radius);
    let mut breaks = Vec::new();
    for ft in f.features() {
        let x = ft.center.coords()[0];
        breaks.push(x - ft.radius);
        breaks.push(x + ft.radius);
    }
    let near = |x: f64, y: f64| (x - y).abs() <= 1e-13 * (1.0 + x.abs().max(y.abs()));
    let hard = (
        breaks.iter().any(|&x| near(x, a)),
        breaks.iter().any(|&x| near(x, b)),
    );
    let g = |x: f64| f.at(&Point::on_axis(1, x));
    quad::integrate_pieces(&g, a, b, &breaks, hard, tol)
}

fn radial_ball_integral(f: &dyn Field, pole: &Point, ball: &Ball, tol: f64) -> Result<f64> {
    let n = ball.dim();
    let nn = n as i32;
    let radius = ball.radius;
    let d = ball.center.distance(pole);
    let mut breaks: Vec<f64> = f
        .features()
        .iter()
        .filter(|ft| same_point(&ft.center, pole))
        .map(|ft| ft.radius)
        .filter(|&r| r > 0.0)
        .collect();
    if d <= 1e-14 * radius {
        let g = |t: f64| f.profile(t) * t.powi(nn - 1);
        let v = quad::integrate_pieces(&g, 0.0, radius, &breaks, (true, false), tol)?;
        return Ok(unit_sphere_area(n) * v);
    }
    breaks.push((radius - d).abs());
    let lo = (d - radius).max(0.0);
    let hi = d + radius;
    let g = |t: f64| {
        let a = sphere_fraction(n, t, d, radius);
        if a == 0.0 {
            0.0
        } else {
            f.profile(t) * t.powi(nn - 1) * a
        }
    };
    quad::integrate_pieces(&g, lo, hi, &breaks, (true, true), tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    struct Dist {
        n: usize,
        pole: Point,
        s: f64,
    }

    impl Field for Dist {
        fn dim(&self) -> usize {
            self.n
        }
        fn at(&self, x: &Point) -> f64 {
            x.distance(&self.pole).powf(self.s)
        }
        fn features(&self) -> Vec<Feature> {
            vec![Feature::point(self.pole)]
        }
        fn symmetry(&self) -> Symmetry {
            Symmetry::Radial(self.pole)
        }
    }

    #[test]
    fn off_centre_disc_area() {
        // |x|^0 = 1 integrated over a disc not centred at the pole
        let f = Dist {
            n: 2,
            pole: Point::origin(2),
            s: 0.0,
        };
        for c in [0.3, 1.0, 2.5] {
            let b = Ball::new(Point::on_axis(2, c), 1.0).unwrap();
            assert_relative_eq!(
                ball_integral(&f, &b, 1e-10).unwrap(),
                PI,
                max_relative = 1e-8
            );
        }
        let f = Dist {
            n: 3,
            pole: Point::origin(3),
            s: 0.0,
        };
        let b = Ball::new(Point::on_axis(3, 0.7), 2.0).unwrap();
        assert_relative_eq!(
            ball_integral(&f, &b, 1e-10).unwrap(),
            32.0 * PI / 3.0,
            max_relative = 1e-8
        );
    }

    #[test]
    fn second_moment_of_shifted_disc() {
        // ∫_{B(c,1)} |x|^2 dx = π (|c|^2 + 1/2) in the plane
        let f = Dist {
            n: 2,
            pole: Point::origin(2),
            s: 2.0,
        };
        let b = Ball::new(Point::on_axis(2, 2.0), 1.0).unwrap();
        assert_relative_eq!(
            ball_integral(&f, &b, 1e-10).unwrap(),
            PI * 4.5,
            max_relative = 1e-8
        );
    }

    #[test]
    fn singular_line_integral() {
        let f = Dist {
            n: 1,
            pole: Point::origin(1),
            s: -0.5,
        };
        let b = Ball::new(Point::origin(1), 1.0).unwrap();
        assert_relative_eq!(
            ball_integral(&f, &b, 1e-10).unwrap(),
            4.0,
            max_relative = 1e-8
        );
        let b = Ball::new(Point::on_axis(1, 0.5), 0.5).unwrap();
        assert_relative_eq!(
            ball_integral(&f, &b, 1e-10).unwrap(),
            2.0,
            max_relative = 1e-8
        );
    }
}
