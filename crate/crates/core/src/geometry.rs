//! Planar points and the convex target region.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    pub const fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn origin() -> Self {
        Self::new(T::zero(), T::zero())
    }

    pub fn dot(self, other: Self) -> T {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Self) -> T {
        self.x * other.y - self.y * other.x
    }

    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist_sq(self, other: Self) -> T {
        (self - other).norm_sq()
    }

    pub fn dist(self, other: Self) -> T {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn cast<U: Scalar>(self) -> Point2<U> {
        Point2::new(U::lit(self.x.to_f64_lossy()), U::lit(self.y.to_f64_lossy()))
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> AddAssign for Point2<T> {
    fn add_assign(&mut self, rhs: Self) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl<T: Scalar> Neg for Point2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }
}

/// Axis-aligned bounding box `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox<T> {
    pub min: Point2<T>,
    pub max: Point2<T>,
}

impl<T: Scalar> BoundingBox<T> {
    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }
}

/// Convex polygon including its interior. Vertices are stored counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Region<T> {
    vertices: Vec<Point2<T>>,
    area: T,
}

impl<T: Scalar> Region<T> {
    /// Builds a region from a vertex loop in either orientation.
    ///
    /// Rejects loops with fewer than three vertices, zero area, non-finite
    /// coordinates or a reflex corner. Collinear intermediate vertices are allowed.
    pub fn new(vertices: Vec<Point2<T>>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateRegion(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateRegion("non-finite vertex".into()));
        }
        let signed = signed_area(&vertices);
        let scale = bbox_of(&vertices).width().max(bbox_of(&vertices).height());
        if signed.abs() <= T::epsilon() * scale * scale {
            return Err(Error::DegenerateRegion("zero area".into()));
        }
        let mut vertices = vertices;
        if signed < T::zero() {
            vertices.reverse();
        }
        let n = vertices.len();
        let tol = T::lit(1e-12) * scale * scale;
        for k in 0..n {
            let a = vertices[k];
            let b = vertices[(k + 1) % n];
            let c = vertices[(k + 2) % n];
            if (b - a).cross(c - b) < -tol {
                return Err(Error::DegenerateRegion(format!(
                    "polygon is not convex at vertex {}",
                    (k + 1) % n
                )));
            }
        }
        Ok(Self {
            vertices,
            area: signed.abs(),
        })
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
    pub fn rectangle(x0: T, y0: T, x1: T, y1: T) -> Result<Self> {
        Self::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn area(&self) -> T {
        self.area
    }

    pub fn bounding_box(&self) -> BoundingBox<T> {
        bbox_of(&self.vertices)
    }

    /// Closed containment test: boundary points count as inside.
    pub fn contains(&self, p: Point2<T>) -> bool {
        let n = self.vertices.len();
        let bb = self.bounding_box();
        let scale = bb.width().max(bb.height());
        let tol = T::lit(1e-12) * scale * scale;
        (0..n).all(|k| {
            let a = self.vertices[k];
            let b = self.vertices[(k + 1) % n];
            (b - a).cross(p - a) >= -tol
        })
    }

    pub fn cast<U: Scalar>(&self) -> Region<U> {
        Region {
            vertices: self.vertices.iter().map(|v| v.cast()).collect(),
            area: U::lit(self.area.to_f64_lossy()),
        }
    }
}

fn signed_area<T: Scalar>(vertices: &[Point2<T>]) -> T {
    let n = vertices.len();
    let twice: T = (0..n)
        .map(|k| vertices[k].cross(vertices[(k + 1) % n]))
        .sum();
    twice / T::lit(2.0)
}

fn bbox_of<T: Scalar>(vertices: &[Point2<T>]) -> BoundingBox<T> {
    let mut min = vertices[0];
    let mut max = vertices[0];
    for v in vertices {
        min.x = min.x.min(v.x);
        min.y = min.y.min(v.y);
        max.x = max.x.max(v.x);
        max.y = max.y.max(v.y);
    }
    BoundingBox { min, max }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn clockwise_input_is_normalized() {
        let r = Region::new(vec![p(0.0, 0.0), p(0.0, 2.0), p(3.0, 2.0), p(3.0, 0.0)]).unwrap();
        assert_eq!(r.area(), 6.0);
        assert!(r.contains(p(1.5, 1.0)));
        assert!(!r.contains(p(3.5, 1.0)));
    }

    #[test]
    fn boundary_is_inside() {
        let r = Region::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(r.contains(p(0.0, 0.5)));
        assert!(r.contains(p(1.0, 1.0)));
    }

    #[test]
    fn rejects_degenerate_and_reflex() {
        assert!(Region::new(vec![p(0.0, 0.0), p(1.0, 1.0)]).is_err());
        assert!(Region::new(vec![p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)]).is_err());
        let dart = vec![p(0.0, 0.0), p(2.0, 1.0), p(0.0, 2.0), p(0.5, 1.0)];
        assert!(Region::new(dart).is_err());
    }

    #[test]
    fn point_arithmetic() {
        let a = p(1.0, 2.0);
        let b = p(4.0, 6.0);
        assert_eq!(a.dist(b), 5.0);
        assert_eq!((b - a) * 2.0, p(6.0, 8.0));
        assert_eq!(a.cross(b), -2.0);
    }
}
