//! Energy-constrained relocation steps.

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scalar::Scalar;

/// Below this distance (metres) a node is treated as already at its target.
pub const MIN_MOVE_DISTANCE: f64 = 1e-9;

/// Bookkeeping from one total-budget move.
#[derive(Debug, Clone, PartialEq)]
pub struct MovePlan<T> {
    /// Nodes moved part of the way toward their target.
    pub dynamic: Vec<usize>,
    /// Nodes left at their starting point or placed exactly on their target.
    pub fixed: Vec<usize>,
    /// Fraction of the way toward the target, per node.
    pub ratios: Vec<T>,
    /// Energy that would be spent reaching every target directly.
    pub full_cost: T,
    /// Whether the budget cut the move short.
    pub budget_binds: bool,
}

fn check_lengths<T>(nodes: usize, what: &str, v: &[T]) -> Result<()> {
    if v.len() != nodes {
        return Err(Error::mismatch(what, nodes, v.len()));
    }
    Ok(())
}

/// Moves every node from its starting point toward its target so that the total
/// movement energy `Σ ζ_n‖p_n − p̃_n‖` stays within `budget`.
///
/// Nodes too costly to move (non-positive ratio) are dropped from the dynamic
/// set until the ratios of the remaining ones are all positive. Nodes with zero
/// weight have no preferred position; they stay on their target if that fits in
/// what is left of the budget, and at their starting point otherwise.
pub fn merl_move<T: Scalar>(
    initial: &[Point2<T>],
    targets: &[Point2<T>],
    weights: &[T],
    move_costs: &[T],
    budget: T,
) -> Result<(Vec<Point2<T>>, MovePlan<T>)> {
    let nodes = initial.len();
    check_lengths(nodes, "targets", targets)?;
    check_lengths(nodes, "weights", weights)?;
    check_lengths(nodes, "move costs", move_costs)?;
    if !(budget >= T::zero()) {
        return Err(Error::invalid("budget", "must be >= 0"));
    }
    let tiny = T::lit(MIN_MOVE_DISTANCE);

    let offsets: Vec<Point2<T>> = targets.iter().zip(initial).map(|(&z, &p)| z - p).collect();
    let dist: Vec<T> = offsets.iter().map(|g| g.norm()).collect();
    let cost: Vec<T> = dist.iter().zip(move_costs).map(|(&d, &c)| c * d).collect();
    let full_cost: T = cost.iter().copied().sum();

    let mut positions = initial.to_vec();
    let mut ratios = vec![T::zero(); nodes];
    let mut fixed = Vec::new();
    let mut dynamic = Vec::new();
    let mut reserved = T::zero();
    for n in 0..nodes {
        if dist[n] < tiny {
            positions[n] = targets[n];
            ratios[n] = T::one();
            fixed.push(n);
        } else if weights[n] <= T::zero() {
            fixed.push(n);
        } else {
            dynamic.push(n);
        }
    }
    for &n in &fixed {
        if weights[n] <= T::zero() && dist[n] >= tiny && reserved + cost[n] <= budget {
            reserved += cost[n];
            positions[n] = targets[n];
            ratios[n] = T::one();
        }
    }
    let available = budget - reserved;
    let mut excess = T::zero();
    if available <= T::zero() && !dynamic.is_empty() {
        excess = dynamic.iter().map(|&n| cost[n]).sum();
        fixed.append(&mut dynamic);
    }

    while !dynamic.is_empty() {
        let spend: T = dynamic.iter().map(|&n| cost[n]).sum();
        let inertia: T = dynamic
            .iter()
            .map(|&n| move_costs[n] * move_costs[n] / weights[n])
            .sum();
        excess = (spend - available).max(T::zero());
        let mut dropped = Vec::new();
        for &n in &dynamic {
            let r = T::one() - excess / (dist[n] * weights[n] / move_costs[n] * inertia);
            ratios[n] = r;
            if r <= T::zero() {
                dropped.push(n);
            }
        }
        if dropped.is_empty() {
            break;
        }
        dynamic.retain(|n| !dropped.contains(n));
        for n in dropped {
            ratios[n] = T::zero();
            fixed.push(n);
        }
    }
    for &n in &dynamic {
        positions[n] = if ratios[n] >= T::one() {
            targets[n]
        } else {
            initial[n] + offsets[n] * ratios[n]
        };
    }
    fixed.sort_unstable();
    Ok((
        positions,
        MovePlan {
            dynamic,
            fixed,
            ratios,
            full_cost,
            budget_binds: excess > T::zero(),
        },
    ))
}

/// Moves every node toward its target, stopping on the sphere of radius
/// `γ_n/ζ_n` around its starting point.
pub fn lorl_move<T: Scalar>(
    initial: &[Point2<T>],
    targets: &[Point2<T>],
    move_costs: &[T],
    node_budgets: &[T],
) -> Result<Vec<Point2<T>>> {
    let nodes = initial.len();
    check_lengths(nodes, "targets", targets)?;
    check_lengths(nodes, "move costs", move_costs)?;
    check_lengths(nodes, "node budgets", node_budgets)?;
    Ok((0..nodes)
        .map(|n| {
            let offset = targets[n] - initial[n];
            let d = offset.norm();
            if d < T::lit(MIN_MOVE_DISTANCE) {
                return targets[n];
            }
            let scale = node_budgets[n] / (move_costs[n] * d);
            if scale >= T::one() {
                targets[n]
            } else {
                initial[n] + offset * scale
            }
        })
        .collect())
}
