//! Generalized Voronoi cell assignment and the total communication power `D`.

use crate::error::{Error, Result};
use crate::field::{all_cell_stats, DiscretizedField};
use crate::geometry::Point2;
use crate::model::RadioParams;
use crate::routing::{power_coefficients, propagate_flows, FlowSplit, Flows};
use crate::scalar::Scalar;

/// Owner AP of every field point plus per-cell volume and centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition<T> {
    pub owner: Vec<usize>,
    pub volumes: Vec<T>,
    /// `None` for cells with zero mass.
    pub centroids: Vec<Option<Point2<T>>>,
}

impl<T: Scalar> Partition<T> {
    /// Wraps an explicit assignment and computes its cell statistics.
    pub fn from_owner(field: &DiscretizedField<T>, owner: Vec<usize>, num_aps: usize) -> Result<Self> {
        if let Some(&bad) = owner.iter().find(|&&o| o >= num_aps) {
            return Err(Error::NotAnAccessPoint(bad));
        }
        let (volumes, centroids) = all_cell_stats(field, &owner, num_aps)?;
        Ok(Self {
            owner,
            volumes,
            centroids,
        })
    }

    pub fn num_cells(&self) -> usize {
        self.volumes.len()
    }
}

/// Breakdown of `D = sensor + λ·(ap_transmit + ap_receive)`, all in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown<T> {
    pub sensor: T,
    pub ap_transmit: T,
    pub ap_receive: T,
    pub total: T,
}

/// Everything `D` depends on besides positions, cells and routing.
#[derive(Debug, Clone, Copy)]
pub struct PowerModel<'a, T> {
    pub radio: &'a RadioParams<T>,
    pub lambda: T,
    pub bit_rate: T,
    pub field: &'a DiscretizedField<T>,
}

impl<'a, T: Scalar> PowerModel<'a, T> {
    pub fn new(radio: &'a RadioParams<T>, lambda: T, bit_rate: T, field: &'a DiscretizedField<T>) -> Self {
        Self {
            radio,
            lambda,
            bit_rate,
            field,
        }
    }

    pub fn num_aps(&self) -> usize {
        self.radio.num_aps()
    }

    fn check(&self, positions: &[Point2<T>]) -> Result<()> {
        if positions.len() != self.radio.num_nodes() {
            return Err(Error::mismatch("positions", self.radio.num_nodes(), positions.len()));
        }
        Ok(())
    }

    fn check_partition(&self, partition: &Partition<T>) -> Result<()> {
        if partition.owner.len() != self.field.len() {
            return Err(Error::mismatch("partition", self.field.len(), partition.owner.len()));
        }
        if partition.num_cells() != self.num_aps() {
            return Err(Error::mismatch("partition cells", self.num_aps(), partition.num_cells()));
        }
        Ok(())
    }

    /// Assigns each field point to the AP minimizing `η_n‖p_n − ω‖² + λg_n + λρ_n`.
    /// Exact ties go to the smaller index.
    pub fn voronoi_assign(&self, positions: &[Point2<T>], coeffs: &[T]) -> Result<Partition<T>> {
        self.check(positions)?;
        let n = self.num_aps();
        if coeffs.len() != n {
            return Err(Error::mismatch("power coefficients", n, coeffs.len()));
        }
        let offsets: Vec<T> = (0..n)
            .map(|k| self.lambda * coeffs[k] + self.lambda * self.radio.rho(k))
            .collect();
        let owner = self
            .field
            .points()
            .iter()
            .map(|&w| {
                let mut best = 0;
                let mut best_cost = T::infinity();
                for k in 0..n {
                    let c = self.radio.eta(k) * positions[k].dist_sq(w) + offsets[k];
                    if c < best_cost {
                        best_cost = c;
                        best = k;
                    }
                }
                best
            })
            .collect();
        Partition::from_owner(self.field, owner, n)
    }

    /// Voronoi assignment using the power coefficients induced by `split`.
    pub fn voronoi_for_split(&self, positions: &[Point2<T>], split: &FlowSplit<T>) -> Result<Partition<T>> {
        let g = power_coefficients(positions, split, self.radio)?;
        self.voronoi_assign(positions, &g)
    }

    pub fn flows(&self, partition: &Partition<T>, split: &FlowSplit<T>) -> Result<Flows<T>> {
        propagate_flows(&partition.volumes, split, self.bit_rate)
    }

    fn sensor_direct(&self, positions: &[Point2<T>], partition: &Partition<T>) -> T {
        self.field
            .points()
            .iter()
            .zip(self.field.weights())
            .zip(&partition.owner)
            .map(|((&w, &mass), &o)| self.radio.eta(o) * positions[o].dist_sq(w) * self.bit_rate * mass)
            .sum()
    }

    fn ap_transmit(&self, positions: &[Point2<T>], flows: &Flows<T>) -> T {
        let mut total = T::zero();
        for i in 0..self.num_aps() {
            for j in 0..self.radio.num_nodes() {
                let f = flows.flow(i, j);
                if f != T::zero() {
                    total += self.radio.beta(i, j) * positions[i].dist_sq(positions[j]) * f;
                }
            }
        }
        total
    }

    fn ap_receive(&self, partition: &Partition<T>, flows: &Flows<T>) -> T {
        (0..self.num_aps())
            .map(|n| self.radio.rho(n) * (flows.inflow(n) + self.bit_rate * partition.volumes[n]))
            .sum()
    }

    /// Term-by-term evaluation of sensor, AP transmit and AP receive power.
    pub fn breakdown(
        &self,
        positions: &[Point2<T>],
        partition: &Partition<T>,
        split: &FlowSplit<T>,
    ) -> Result<PowerBreakdown<T>> {
        self.check(positions)?;
        self.check_partition(partition)?;
        let flows = self.flows(partition, split)?;
        let sensor = self.sensor_direct(positions, partition);
        let ap_transmit = self.ap_transmit(positions, &flows);
        let ap_receive = self.ap_receive(partition, &flows);
        Ok(PowerBreakdown {
            sensor,
            ap_transmit,
            ap_receive,
            total: sensor + self.lambda * (ap_transmit + ap_receive),
        })
    }

    /// `D` summed directly from its three physical terms.
    pub fn objective_direct(&self, positions: &[Point2<T>], partition: &Partition<T>, split: &FlowSplit<T>) -> Result<T> {
        Ok(self.breakdown(positions, partition, split)?.total)
    }

    /// `D` as a per-point integrand using the AP power coefficients.
    pub fn objective_coeff(&self, positions: &[Point2<T>], partition: &Partition<T>, split: &FlowSplit<T>) -> Result<T> {
        self.check(positions)?;
        self.check_partition(partition)?;
        let g = power_coefficients(positions, split, self.radio)?;
        let offsets: Vec<T> = (0..self.num_aps())
            .map(|n| self.lambda * g[n] * self.bit_rate + self.lambda * self.radio.rho(n) * self.bit_rate)
            .collect();
        Ok(self
            .field
            .points()
            .iter()
            .zip(self.field.weights())
            .zip(&partition.owner)
            .map(|((&w, &mass), &o)| {
                (self.radio.eta(o) * positions[o].dist_sq(w) * self.bit_rate + offsets[o]) * mass
            })
            .sum())
    }

    /// `D` with the sensor term split about each cell centroid.
    pub fn objective_parallel_axis(
        &self,
        positions: &[Point2<T>],
        partition: &Partition<T>,
        split: &FlowSplit<T>,
    ) -> Result<T> {
        self.check(positions)?;
        self.check_partition(partition)?;
        let flows = self.flows(partition, split)?;
        let mut inertia = vec![T::zero(); self.num_aps()];
        for ((&w, &mass), &o) in self.field.points().iter().zip(self.field.weights()).zip(&partition.owner) {
            if let Some(c) = partition.centroids[o] {
                inertia[o] += c.dist_sq(w) * mass;
            }
        }
        let sensor: T = (0..self.num_aps())
            .map(|n| match partition.centroids[n] {
                Some(c) => {
                    let k = self.radio.eta(n) * self.bit_rate;
                    k * inertia[n] + k * partition.volumes[n] * positions[n].dist_sq(c)
                }
                None => T::zero(),
            })
            .sum();
        Ok(sensor + self.lambda * (self.ap_transmit(positions, &flows) + self.ap_receive(partition, &flows)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::discretize;
    use crate::geometry::Region;
    use crate::model::DensitySpec;
    use approx::assert_relative_eq;

    fn unit_field(n: usize) -> DiscretizedField<f64> {
        let r = Region::rectangle(0.0, 0.0, 1.0, 1.0).unwrap();
        discretize(&r, &DensitySpec::Uniform, (n, n)).unwrap()
    }

    #[test]
    fn single_ap_owns_everything() {
        let field = unit_field(8);
        let radio = RadioParams::homogeneous(1, 1, 1.0, 0.0, 1.0).unwrap();
        let model = PowerModel::new(&radio, 0.5, 1.0, &field);
        let pos = [Point2::new(0.1, 0.9), Point2::new(0.5, 0.5)];
        let part = model.voronoi_assign(&pos, &[3.0]).unwrap();
        assert!(part.owner.iter().all(|&o| o == 0));
    }

    #[test]
    fn exact_tie_goes_to_smaller_index() {
        let field = DiscretizedField::from_samples(vec![Point2::new(1.0, 0.0)], vec![1.0]).unwrap();
        let radio = RadioParams::homogeneous(2, 1, 1.0, 0.0, 1.0).unwrap();
        let model = PowerModel::new(&radio, 1.0, 1.0, &field);
        let pos = [Point2::new(0.0, 0.0), Point2::new(2.0, 0.0), Point2::new(5.0, 5.0)];
        let part = model.voronoi_assign(&pos, &[0.0, 0.0]).unwrap();
        assert_eq!(part.owner, vec![0]);
    }

    #[test]
    fn weighted_cell_is_a_disk() {
        // η_1 = 2 > η_2 = 1 with zero offsets: AP 1 owns the disk around (2p_1 − p_2).
        let field = unit_field(40);
        let radio = RadioParams::new(2, 1, vec![2.0, 1.0], vec![0.0, 0.0], vec![1.0; 6]).unwrap();
        let model = PowerModel::new(&radio, 0.0, 1.0, &field);
        let p1 = Point2::new(0.4, 0.5);
        let p2 = Point2::new(0.6, 0.5);
        let part = model.voronoi_assign(&[p1, p2, Point2::new(1.0, 1.0)], &[0.0, 0.0]).unwrap();
        let center = p1 * 2.0 - p2;
        let radius_sq = 2.0 * p1.dist_sq(p2);
        for (k, &w) in field.points().iter().enumerate() {
            let brute = if 2.0 * p1.dist_sq(w) <= p2.dist_sq(w) { 0 } else { 1 };
            assert_eq!(part.owner[k], brute);
            let d = w.dist_sq(center) - radius_sq;
            if d.abs() > 1e-9 {
                assert_eq!(part.owner[k] == 0, d < 0.0);
            }
        }
    }

    #[test]
    fn second_moment_of_unit_square() {
        let field = unit_field(100);
        let radio = RadioParams::homogeneous(1, 1, 1.0, 0.0, 1.0).unwrap();
        let model = PowerModel::new(&radio, 0.0, 1.0, &field);
        let pos = [Point2::new(0.5, 0.5), Point2::new(0.0, 0.0)];
        let split = FlowSplit::from_entries(1, 2, [(0, 1, 1.0)]).unwrap();
        let part = model.voronoi_assign(&pos, &[0.0]).unwrap();
        let d = model.objective_direct(&pos, &part, &split).unwrap();
        assert_relative_eq!(d, 1.0 / 6.0, max_relative = 0.01);
    }

    #[test]
    fn lambda_zero_ignores_routing() {
        let field = unit_field(20);
        let radio = RadioParams::homogeneous(2, 1, 1.0, 0.3, 2.0).unwrap();
        let model = PowerModel::new(&radio, 0.0, 5.0, &field);
        let pos = [Point2::new(0.2, 0.3), Point2::new(0.8, 0.6), Point2::new(0.5, 1.0)];
        let a = FlowSplit::from_entries(2, 3, [(0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let b = FlowSplit::from_entries(2, 3, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let part = model.voronoi_assign(&pos, &[0.0, 0.0]).unwrap();
        let da = model.objective_direct(&pos, &part, &a).unwrap();
        let db = model.objective_direct(&pos, &part, &b).unwrap();
        assert_eq!(da, db);
        let dc = model.objective_coeff(&pos, &part, &b).unwrap();
        assert_relative_eq!(dc, model.breakdown(&pos, &part, &b).unwrap().sensor, max_relative = 1e-12);
    }

    #[test]
    fn single_link_coeff_matches_direct() {
        let field = unit_field(10);
        let radio = RadioParams::new(1, 1, vec![1.5], vec![0.2], vec![1.0, 0.7]).unwrap();
        let model = PowerModel::new(&radio, 0.4, 3.0, &field);
        let pos = [Point2::new(0.3, 0.3), Point2::new(0.9, 0.1)];
        let split = FlowSplit::from_entries(1, 2, [(0, 1, 1.0)]).unwrap();
        let part = model.voronoi_assign(&pos, &[0.0]).unwrap();
        let g = 0.7 * pos[0].dist_sq(pos[1]);
        let by_hand: f64 = field
            .points()
            .iter()
            .zip(field.weights())
            .map(|(&w, &m)| (1.5 * pos[0].dist_sq(w) * 3.0 + 0.4 * g * 3.0 + 0.4 * 0.2 * 3.0) * m)
            .sum();
        let direct = model.objective_direct(&pos, &part, &split).unwrap();
        assert_relative_eq!(model.objective_coeff(&pos, &part, &split).unwrap(), by_hand, max_relative = 1e-12);
        assert_relative_eq!(direct, by_hand, max_relative = 1e-12);
    }

    #[test]
    fn parallel_axis_edge_cases() {
        let field = unit_field(10);
        let radio = RadioParams::homogeneous(2, 1, 1.0, 0.1, 1.0).unwrap();
        let model = PowerModel::new(&radio, 1.0, 2.0, &field);
        // Every point owned by AP 0; AP 1's cell is empty.
        let owner = vec![0; field.len()];
        let part = Partition::from_owner(&field, owner, 2).unwrap();
        let c = part.centroids[0].unwrap();
        let pos = [c, Point2::new(0.9, 0.9), Point2::new(0.0, 1.0)];
        let split = FlowSplit::from_entries(2, 3, [(0, 2, 1.0), (1, 0, 1.0)]).unwrap();
        let pa = model.objective_parallel_axis(&pos, &part, &split).unwrap();
        let direct = model.objective_direct(&pos, &part, &split).unwrap();
        assert_relative_eq!(pa, direct, max_relative = 1e-12);
        assert!(part.centroids[1].is_none());
    }
}
