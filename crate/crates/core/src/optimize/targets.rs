//! Per-node target points, curvature weights and movement accounting.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::model::RadioParams;
use crate::partition::Partition;
use crate::routing::Flows;
use crate::scalar::Scalar;

/// Weighted sums behind each node's target: `z_n = numerator_n / weight_n`.
///
/// `weight_n` is ψ_n, the coefficient of `‖p_n‖²` in `D` when everything but
/// `p_n` is held fixed.
fn pull<T: Scalar>(
    positions: &[Point2<T>],
    partition: &Partition<T>,
    flows: &Flows<T>,
    radio: &RadioParams<T>,
    lambda: T,
    bit_rate: T,
) -> Result<(Vec<Point2<T>>, Vec<T>)> {
    let n = radio.num_aps();
    let nodes = radio.num_nodes();
    if positions.len() != nodes {
        return Err(Error::mismatch("positions", nodes, positions.len()));
    }
    if partition.num_cells() != n {
        return Err(Error::mismatch("partition cells", n, partition.num_cells()));
    }
    if flows.num_aps() != n || flows.num_nodes() != nodes {
        return Err(Error::mismatch("flows", n * nodes, flows.num_aps() * flows.num_nodes()));
    }
    let mut numerator = vec![Point2::origin(); nodes];
    let mut weight = vec![T::zero(); nodes];
    for i in 0..n {
        if let Some(c) = partition.centroids[i] {
            let k = radio.eta(i) * bit_rate * partition.volumes[i];
            numerator[i] += c * k;
            weight[i] += k;
        }
        for j in 0..nodes {
            let f = flows.flow(i, j);
            if f == T::zero() {
                continue;
            }
            let k = lambda * radio.beta(i, j) * f;
            // Link i → j pulls i toward j and j toward i with the same weight.
            numerator[i] += positions[j] * k;
            weight[i] += k;
            numerator[j] += positions[i] * k;
            weight[j] += k;
        }
    }
    Ok((numerator, weight))
}

/// Unconstrained optimal position of every node with all else fixed.
///
/// A node with zero weight (empty cell and no traffic, or an FC when `λ = 0`)
/// has no preferred position and keeps its current one.
pub fn z_points<T: Scalar>(
    positions: &[Point2<T>],
    partition: &Partition<T>,
    flows: &Flows<T>,
    radio: &RadioParams<T>,
    lambda: T,
    bit_rate: T,
) -> Result<Vec<Point2<T>>> {
    let (numerator, weight) = pull(positions, partition, flows, radio, lambda, bit_rate)?;
    Ok(numerator
        .into_iter()
        .zip(weight)
        .zip(positions)
        .map(|((num, w), &p)| if w > T::zero() { num * (T::one() / w) } else { p })
        .collect())
}

/// ψ_n in W/m²: sensor mass plus incident link weights.
pub fn psi<T: Scalar>(
    positions: &[Point2<T>],
    partition: &Partition<T>,
    flows: &Flows<T>,
    radio: &RadioParams<T>,
    lambda: T,
    bit_rate: T,
) -> Result<Vec<T>> {
    Ok(pull(positions, partition, flows, radio, lambda, bit_rate)?.1)
}

/// Targets and weights in one pass.
pub fn targets_and_weights<T: Scalar>(
    positions: &[Point2<T>],
    partition: &Partition<T>,
    flows: &Flows<T>,
    radio: &RadioParams<T>,
    lambda: T,
    bit_rate: T,
) -> Result<(Vec<Point2<T>>, Vec<T>)> {
    let (numerator, weight) = pull(positions, partition, flows, radio, lambda, bit_rate)?;
    let z = numerator
        .into_iter()
        .zip(&weight)
        .zip(positions)
        .map(|((num, &w), &p)| if w > T::zero() { num * (T::one() / w) } else { p })
        .collect();
    Ok((z, weight))
}

/// Moving efficiency χ_n = (ψ_n/ζ_n)·‖p_n − z_n‖.
pub fn chi<T: Scalar>(positions: &[Point2<T>], z: &[Point2<T>], psi: &[T], move_costs: &[T]) -> Vec<T> {
    positions
        .iter()
        .zip(z)
        .zip(psi.iter().zip(move_costs))
        .map(|((&p, &t), (&w, &c))| w / c * p.dist(t))
        .collect()
}

/// Per-node movement energy `ζ_n‖p_n − p̃_n‖` and its total.
pub fn movement_energy<T: Scalar>(positions: &[Point2<T>], initial: &[Point2<T>], move_costs: &[T]) -> (Vec<T>, T) {
    let per_node: Vec<T> = positions
        .iter()
        .zip(initial)
        .zip(move_costs)
        .map(|((&p, &q), &c)| c * p.dist(q))
        .collect();
    let total = per_node.iter().copied().sum();
    (per_node, total)
}
