//! Midpoint-rule discretization of the sensor density over the region.
//!
//! Every integral `∫_W h(ω) f(ω) dω` becomes `Σ_{k ∈ W} h(point_k) · weight_k`.

use crate::error::{Error, Result};
use crate::geometry::{Point2, Region};
use crate::model::{density_at, DensitySpec};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedField<T> {
    points: Vec<Point2<T>>,
    weights: Vec<T>,
    resolution: (usize, usize),
}

impl<T: Scalar> DiscretizedField<T> {
    /// Builds a field from explicit samples. Weights must be non-negative with a positive sum.
    pub fn from_samples(points: Vec<Point2<T>>, weights: Vec<T>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::mismatch("field weights", points.len(), weights.len()));
        }
        if weights.iter().any(|&w| !(w >= T::zero() && w.is_finite())) {
            return Err(Error::invalid("weights", "must be finite and >= 0"));
        }
        let total: T = weights.iter().copied().sum();
        if !(total > T::zero()) {
            return Err(Error::invalid("weights", "total mass must be > 0"));
        }
        let n = points.len();
        Ok(Self {
            points,
            weights,
            resolution: (n, 1),
        })
    }

    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn resolution(&self) -> (usize, usize) {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }
}

/// Samples the density at the cell centers of an `nx × ny` grid over the
/// region's bounding box, keeping centers inside the (closed) polygon.
pub fn discretize<T: Scalar>(
    region: &Region<T>,
    density: &DensitySpec<T>,
    resolution: (usize, usize),
) -> Result<DiscretizedField<T>> {
    let (nx, ny) = resolution;
    if nx < 2 || ny < 2 {
        return Err(Error::invalid("resolution", format!("need at least 2x2, got {nx}x{ny}")));
    }
    let bb = region.bounding_box();
    if !(bb.width() > T::zero() && bb.height() > T::zero() && region.area() > T::zero()) {
        return Err(Error::DegenerateRegion("zero area".into()));
    }
    let dx = bb.width() / T::from_count(nx);
    let dy = bb.height() / T::from_count(ny);
    let cell_area = dx * dy;
    let half = T::lit(0.5);

    let mut points = Vec::with_capacity(nx * ny);
    let mut weights = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        let y = bb.min.y + (T::from_count(iy) + half) * dy;
        for ix in 0..nx {
            let p = Point2::new(bb.min.x + (T::from_count(ix) + half) * dx, y);
            if region.contains(p) {
                points.push(p);
                weights.push(density_at(density, region, p) * cell_area);
            }
        }
    }
    if points.is_empty() {
        return Err(Error::DegenerateRegion("no grid point falls inside the region".into()));
    }
    if !(weights.iter().copied().sum::<T>() > T::zero()) {
        return Err(Error::DegenerateRegion("density has no mass on the grid".into()));
    }
    Ok(DiscretizedField {
        points,
        weights,
        resolution,
    })
}

/// Volume and centroid of cell `n` under `owner`. Centroid is `None` for an empty cell.
pub fn cell_stats<T: Scalar>(
    field: &DiscretizedField<T>,
    owner: &[usize],
    n: usize,
) -> Result<(T, Option<Point2<T>>)> {
    if owner.len() != field.len() {
        return Err(Error::mismatch("assignment", field.len(), owner.len()));
    }
    let mut volume = T::zero();
    let mut moment = Point2::origin();
    for ((&o, &p), &w) in owner.iter().zip(&field.points).zip(&field.weights) {
        if o == n {
            volume += w;
            moment += p * w;
        }
    }
    let centroid = (volume > T::zero()).then(|| moment * (T::one() / volume));
    Ok((volume, centroid))
}

/// Volumes and centroids of all `num_cells` cells in one pass.
pub fn all_cell_stats<T: Scalar>(
    field: &DiscretizedField<T>,
    owner: &[usize],
    num_cells: usize,
) -> Result<(Vec<T>, Vec<Option<Point2<T>>>)> {
    if owner.len() != field.len() {
        return Err(Error::mismatch("assignment", field.len(), owner.len()));
    }
    let mut volumes = vec![T::zero(); num_cells];
    let mut moments = vec![Point2::origin(); num_cells];
    for ((&o, &p), &w) in owner.iter().zip(&field.points).zip(&field.weights) {
        volumes[o] += w;
        moments[o] += p * w;
    }
    let centroids = volumes
        .iter()
        .zip(moments)
        .map(|(&v, m)| (v > T::zero()).then(|| m * (T::one() / v)))
        .collect();
    Ok((volumes, centroids))
}
