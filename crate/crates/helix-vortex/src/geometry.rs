//! Planar points, points on R^2 x T, screw motions and helical averaging.
//!
//! The symmetry group is the screw motion S_theta x = (R_theta x', x3 + theta)
//! where R_theta rotates the plane clockwise for positive theta. Angles are
//! kept unreduced; the axial coordinate is reduced modulo 2 pi into
//! [-pi, pi) only where a periodic quantity is evaluated.

use crate::error::{Error, Result};
use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

/// Rotation angle in radians, stored unreduced.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle(radians)
    }
}

/// Point (or vector) in the plane.
///
/// Serializes as the two-element array `[x1, x2]`; deserializes from either
/// that form or `{"x1": .., "x2": ..}`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point2 {
    pub x1: f64,
    pub x2: f64,
}

impl serde::Serialize for Point2 {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        [self.x1, self.x2].serialize(serializer)
    }
}

impl<'de> serde::Deserialize<'de> for Point2 {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Pair([f64; 2]),
            Fields { x1: f64, x2: f64 },
        }
        Ok(match Repr::deserialize(deserializer)? {
            Repr::Pair([x1, x2]) => Point2 { x1, x2 },
            Repr::Fields { x1, x2 } => Point2 { x1, x2 },
        })
    }
}

impl Point2 {
    pub const fn new(x1: f64, x2: f64) -> Self {
        Self { x1, x2 }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Weight bracket(x) = sqrt(1 + |x|^2).
    pub fn bracket(self) -> f64 {
        (1.0 + self.norm_sq()).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    /// Lift to R^2 x T at height x3.
    pub fn lift(self, x3: f64) -> Point3 {
        Point3::new(self.x1, self.x2, x3)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x1 * s, self.x2 * s)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x1, -self.x2)
    }
}

/// Point (or vector) on R^2 x T, with the axial coordinate kept unreduced.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl Point3 {
    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn planar(self) -> Point2 {
        Point2::new(self.x1, self.x2)
    }

    pub fn dot(self, o: Point3) -> f64 {
        self.x1 * o.x1 + self.x2 * o.x2 + self.x3 * o.x3
    }

    pub fn cross(self, o: Point3) -> Point3 {
        Point3::new(
            self.x2 * o.x3 - self.x3 * o.x2,
            self.x3 * o.x1 - self.x1 * o.x3,
            self.x1 * o.x2 - self.x2 * o.x1,
        )
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// Reduces x3 modulo 2 pi into [-pi, pi).
    pub fn reduced(self) -> Point3 {
        Point3::new(self.x1, self.x2, reduce_periodic(self.x3))
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, o: Point3) -> Point3 {
        Point3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

/// Reduces an axial coordinate modulo 2 pi into [-pi, pi).
pub fn reduce_periodic(x3: f64) -> f64 {
    let mut r = x3 - TAU * (x3 / TAU).round();
    if r >= PI {
        r -= TAU;
    } else if r < -PI {
        r += TAU;
    }
    r
}

/// Clockwise rotation: R_theta = (cos sin; -sin cos).
pub fn rotate(theta: Angle, p: Point2) -> Point2 {
    let (s, c) = theta.0.sin_cos();
    Point2::new(c * p.x1 + s * p.x2, -s * p.x1 + c * p.x2)
}

/// Counterclockwise quarter turn: perp(x) = (-x2, x1).
pub fn perp(p: Point2) -> Point2 {
    Point2::new(-p.x2, p.x1)
}

/// Screw motion S_theta x = (R_theta x', x3 + theta) with x3 unreduced.
pub fn screw(theta: Angle, p: Point3) -> Point3 {
    let r = rotate(theta, p.planar());
    Point3::new(r.x1, r.x2, p.x3 + theta.0)
}

/// Screw motion followed by reduction of x3 into [-pi, pi).
pub fn screw_periodic(theta: Angle, p: Point3) -> Point3 {
    screw(theta, p).reduced()
}

/// Helical direction field xi(x) = (x2, -x1, 1).
pub fn xi(p: Point3) -> Point3 {
    Point3::new(p.x2, -p.x1, 1.0)
}

/// Helical average of a field on R^2 x T along the screw orbit of a planar
/// point: (1/2 pi) times the integral over a in [-pi, pi) of f(R_a p, a).
///
/// The integrand is 2 pi-periodic in a, so the uniform trapezoid rule (n_quad
/// nodes, n_quad >= 4) converges spectrally in n_quad.
pub fn helical_average<F: Fn(Point3) -> f64>(f: F, p: Point2, n_quad: usize) -> Result<f64> {
    if n_quad < 4 {
        return Err(Error::Domain(format!("n_quad must be at least 4, got {n_quad}")));
    }
    let mut acc = crate::numerics::CompensatedSum::new();
    for k in 0..n_quad {
        let a = -PI + TAU * k as f64 / n_quad as f64;
        let q = rotate(Angle(a), p);
        let v = f(q.lift(a));
        if !v.is_finite() {
            return Err(Error::Evaluation(format!(
                "field returned non-finite value at a = {a}"
            )));
        }
        acc.add(v);
    }
    Ok(acc.value() / n_quad as f64)
}
