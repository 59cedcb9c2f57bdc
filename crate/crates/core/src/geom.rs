//! Points and balls in R^n for n = 1, 2, 3.

use std::f64::consts::PI;

use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        let dim = coords.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::invalid(format!(
                "point dimension {dim} outside 1..=3"
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("point coordinates must be finite"));
        }
        let mut c = [0.0; MAX_DIM];
        c[..dim].copy_from_slice(coords);
        Ok(Point { coords: c, dim })
    }

    pub fn origin(dim: usize) -> Self {
        assert!(
            (1..=MAX_DIM).contains(&dim),
            "dimension {dim} outside 1..=3"
        );
        Point {
            coords: [0.0; MAX_DIM],
            dim,
        }
    }

    /// The point `t * e_1`.
    pub fn on_axis(dim: usize, t: f64) -> Self {
        let mut p = Point::origin(dim);
        p.coords[0] = t;
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn distance(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut s = 0.0;
        for i in 0..self.dim {
            let d = self.coords[i] - other.coords[i];
            s += d * d;
        }
        s.sqrt()
    }

    pub fn norm(&self) -> f64 {
        self.distance(&Point::origin(self.dim))
    }

    pub fn add_scaled(&self, dir: &[f64; MAX_DIM], t: f64) -> Point {
        let mut p = *self;
        for (c, d) in p.coords[..self.dim].iter_mut().zip(dir) {
            *c += t * d;
        }
        p
    }

    /// Unit vector from `self` towards `other`, or `e_1` when the points coincide.
    pub fn direction_to(&self, other: &Point) -> [f64; MAX_DIM] {
        let d = self.distance(other);
        let mut u = [0.0; MAX_DIM];
        if d == 0.0 {
            u[0] = 1.0;
            return u;
        }
        for (i, ui) in u.iter_mut().enumerate().take(self.dim) {
            *ui = (other.coords[i] - self.coords[i]) / d;
        }
        u
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim))?;
        for c in self.coords() {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<f64> = Vec::deserialize(deserializer)?;
        Point::new(&v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::invalid(format!(
                "ball radius must be positive, got {radius}"
            )));
        }
        Ok(Ball { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn volume(&self) -> f64 {
        unit_ball_volume(self.dim()) * self.radius.powi(self.dim() as i32)
    }

    pub fn dilate(&self, factor: f64) -> Ball {
        Ball {
            center: self.center,
            radius: self.radius * factor,
        }
    }

    /// True when `p` lies in the closed ball.
    pub fn contains_closed(&self, p: &Point) -> bool {
        self.center.distance(p) <= self.radius * (1.0 + 1e-12)
    }
}

pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => panic!("dimension {n} outside 1..=3"),
    }
}

/// Surface measure of the unit sphere S^{n-1}.
pub fn unit_sphere_area(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => panic!("dimension {n} outside 1..=3"),
    }
}

/// A sphere `|y - center| = radius` across which an integrand may jump or kink.
/// Radius zero marks an isolated singular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feature {
    pub center: Point,
    pub radius: f64,
}

impl Feature {
    pub fn new(center: Point, radius: f64) -> Self {
        Feature { center, radius }
    }

    pub fn point(center: Point) -> Self {
        Feature {
            center,
            radius: 0.0,
        }
    }

    /// Radii `s` at which the sphere `|y - origin| = s` touches this feature.
    pub fn radial_breaks(&self, origin: &Point) -> [f64; 2] {
        let d = origin.distance(&self.center);
        [(d - self.radius).abs(), d + self.radius]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volumes() {
        let b = Ball::new(Point::origin(2), 2.0).unwrap();
        assert!((b.volume() - 4.0 * PI).abs() < 1e-14);
        assert!(Ball::new(Point::origin(1), 0.0).is_err());
    }

    #[test]
    fn point_roundtrip_json() {
        let p = Point::new(&[1.5, -2.0]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[1.5,-2.0]");
        let q: Point = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        assert!(Point::new(&[0.0; 4]).is_err());
    }

    #[test]
    fn feature_breaks() {
        let f = Feature::new(Point::origin(1), 1.0);
        assert_eq!(f.radial_breaks(&Point::on_axis(1, 3.0)), [2.0, 4.0]);
        assert_eq!(f.radial_breaks(&Point::on_axis(1, 0.5)), [0.5, 1.5]);
    }
}
