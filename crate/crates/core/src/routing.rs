//! Multi-hop data routing between access points and fusion centers.
//!
//! Nodes are indexed `0..num_aps` for APs followed by `num_aps..num_nodes`
//! for FCs. Only APs transmit, so every matrix here is `num_aps × num_nodes`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::model::RadioParams;
use crate::scalar::Scalar;

/// Upper bound on the number of paths [`enumerate_paths`] will produce.
pub const MAX_ENUMERATED_PATHS: usize = 1_000_000;

/// Normalized flow matrix `S`: share of AP `i`'s outgoing traffic sent to node `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowSplit<T> {
    num_aps: usize,
    num_nodes: usize,
    shares: Vec<T>,
}

impl<T: Scalar> FlowSplit<T> {
    pub fn zeros(num_aps: usize, num_nodes: usize) -> Self {
        Self {
            num_aps,
            num_nodes,
            shares: vec![T::zero(); num_aps * num_nodes],
        }
    }

    /// Builds a split from `(ap, node, share)` triples and validates it.
    pub fn from_entries(
        num_aps: usize,
        num_nodes: usize,
        entries: impl IntoIterator<Item = (usize, usize, T)>,
    ) -> Result<Self> {
        let mut split = Self::zeros(num_aps, num_nodes);
        for (i, j, s) in entries {
            if i >= num_aps {
                return Err(Error::NotAnAccessPoint(i));
            }
            if j >= num_nodes {
                return Err(Error::invalid("flow_split", format!("node {j} out of range")));
            }
            split.set(i, j, s);
        }
        split.validate()?;
        Ok(split)
    }

    /// Checks entries in `[0, 1]`, zero diagonal, unit row sums and no cycle.
    pub fn validate(&self) -> Result<()> {
        let tol = T::lit(1e-9);
        for i in 0..self.num_aps {
            let mut row = T::zero();
            for j in 0..self.num_nodes {
                let s = self.get(i, j);
                if !(s >= T::zero() && s <= T::one()) {
                    return Err(Error::invalid("flow_split", format!("s[{i}][{j}] = {s} outside [0, 1]")));
                }
                row += s;
            }
            if self.get(i, i) != T::zero() {
                return Err(Error::invalid("flow_split", format!("self loop at {i}")));
            }
            if (row - T::one()).abs() > tol {
                return Err(Error::invalid("flow_split", format!("row {i} sums to {row}")));
            }
        }
        self.topological_order().map(|_| ())
    }

    pub fn num_aps(&self) -> usize {
        self.num_aps
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.shares[i * self.num_nodes + j]
    }

    pub fn set(&mut self, i: usize, j: usize, s: T) {
        self.shares[i * self.num_nodes + j] = s;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.shares[i * self.num_nodes..(i + 1) * self.num_nodes]
    }

    /// Nodes receiving a positive share from AP `i`.
    pub fn successors(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(_, &s)| s > T::zero())
            .map(|(j, &s)| (j, s))
    }

    /// APs ordered so every AP comes after all APs that send data to it.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.num_aps;
        let mut indegree = vec![0usize; n];
        for i in 0..n {
            for (j, _) in self.successors(i) {
                if j < n {
                    indegree[j] += 1;
                }
            }
        }
        let mut ready: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = ready.pop_front() {
            order.push(i);
            for (j, _) in self.successors(i) {
                if j < n {
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        ready.push_back(j);
                    }
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
            return Err(Error::CycleDetected(stuck));
        }
        Ok(order)
    }
}

/// Absolute link flows `F(W, S)` in bits/s.
#[derive(Debug, Clone, PartialEq)]
pub struct Flows<T> {
    num_aps: usize,
    num_nodes: usize,
    link: Vec<T>,
    outflow: Vec<T>,
}

impl<T: Scalar> Flows<T> {
    pub fn num_aps(&self) -> usize {
        self.num_aps
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// `F_{i,j}` for AP `i` to node `j`.
    pub fn flow(&self, i: usize, j: usize) -> T {
        self.link[i * self.num_nodes + j]
    }

    /// Total traffic `F_i` leaving AP `i`.
    pub fn outflow(&self, i: usize) -> T {
        self.outflow[i]
    }

    /// Traffic arriving at node `j` from other APs.
    pub fn inflow(&self, j: usize) -> T {
        (0..self.num_aps).map(|i| self.flow(i, j)).sum()
    }
}

/// Routing decision together with the flows it induces.
#[derive(Debug, Clone, PartialEq)]
pub struct Routing<T> {
    pub split: FlowSplit<T>,
    pub flows: Flows<T>,
}

fn check_positions<T>(positions: &[Point2<T>], radio: &RadioParams<T>) -> Result<()>
where
    T: Scalar,
{
    if positions.len() != radio.num_nodes() {
        return Err(Error::mismatch("positions", radio.num_nodes(), positions.len()));
    }
    Ok(())
}

/// Energy per bit on link `i → j`: transmit cost plus receiver electronics when `j` is an AP.
pub fn edge_cost<T: Scalar>(positions: &[Point2<T>], i: usize, j: usize, radio: &RadioParams<T>) -> Result<T> {
    check_positions(positions, radio)?;
    if i >= radio.num_aps() {
        return Err(Error::NotAnAccessPoint(i));
    }
    if j >= radio.num_nodes() || j == i {
        return Err(Error::invalid("j", format!("invalid link target {j} from {i}")));
    }
    Ok(link_cost(positions, i, j, radio))
}

#[inline]
pub(crate) fn link_cost<T: Scalar>(positions: &[Point2<T>], i: usize, j: usize, radio: &RadioParams<T>) -> T {
    let tx = radio.beta(i, j) * positions[i].dist_sq(positions[j]);
    if j < radio.num_aps() {
        tx + radio.rho(j)
    } else {
        tx
    }
}

/// Minimum energy per bit from each AP to the set of fusion centers.
///
/// Bellman-Ford relaxation from a virtual sink joined to every FC. The
/// relaxation runs until a full pass changes nothing, so each returned cost
/// equals `min_j (e_{i,j} + cost_j)` as evaluated in floating point.
pub fn bellman_ford_costs<T: Scalar>(positions: &[Point2<T>], radio: &RadioParams<T>) -> Result<Vec<T>> {
    check_positions(positions, radio)?;
    let n = radio.num_aps();
    let nodes = radio.num_nodes();
    if nodes == n {
        return Err(Error::validation("num_fcs", "routing needs at least one fusion center"));
    }
    let mut cost = vec![T::infinity(); nodes];
    for c in cost.iter_mut().skip(n) {
        *c = T::zero();
    }
    // Shortest paths have at most n hops; the cap only guards against pathological rounding.
    for _ in 0..4 * n + 8 {
        let mut next = cost.clone();
        for i in 0..n {
            next[i] = (0..nodes)
                .filter(|&j| j != i)
                .map(|j| link_cost(positions, i, j, radio) + cost[j])
                .fold(T::infinity(), T::min);
        }
        if next == cost {
            break;
        }
        cost = next;
    }
    cost.truncate(n);
    Ok(cost)
}

/// Min-cost tree routing `R(P, W)`: each AP forwards everything to one next hop.
///
/// Among successors on a minimum-cost path the one reaching a fusion center
/// in the fewest hops wins, then the smallest index. The result is acyclic.
pub fn bellman_ford_route<T: Scalar>(positions: &[Point2<T>], radio: &RadioParams<T>) -> Result<FlowSplit<T>> {
    let n = radio.num_aps();
    let nodes = radio.num_nodes();
    let mut cost = bellman_ford_costs(positions, radio)?;
    cost.resize(nodes, T::zero());

    let tight = |i: usize, j: usize| j != i && link_cost(positions, i, j, radio) + cost[j] <= cost[i];

    // Hop level along tight edges; FCs sit at level 0.
    let mut level = vec![usize::MAX; nodes];
    for l in level.iter_mut().skip(n) {
        *l = 0;
    }
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            let best = (0..nodes)
                .filter(|&j| level[j] != usize::MAX && tight(i, j))
                .map(|j| level[j] + 1)
                .min();
            if let Some(l) = best {
                if l < level[i] {
                    level[i] = l;
                    changed = true;
                }
            }
        }
    }

    let mut split = FlowSplit::zeros(n, nodes);
    for i in 0..n {
        let next = if level[i] != usize::MAX {
            (0..nodes).find(|&j| level[j] < level[i] && tight(i, j))
        } else {
            None
        };
        // Unreachable for non-negative costs; keep the tree well formed regardless.
        let next = next.unwrap_or_else(|| cheapest_fc(positions, i, radio));
        split.set(i, next, T::one());
    }
    Ok(split)
}

fn cheapest_fc<T: Scalar>(positions: &[Point2<T>], i: usize, radio: &RadioParams<T>) -> usize {
    let mut best = radio.num_aps();
    let mut best_cost = T::infinity();
    for fc in radio.num_aps()..radio.num_nodes() {
        let c = link_cost(positions, i, fc, radio);
        if c < best_cost {
            best_cost = c;
            best = fc;
        }
    }
    best
}

/// Baseline routing with no relaying: each AP sends straight to its cheapest FC.
pub fn direct_route<T: Scalar>(positions: &[Point2<T>], radio: &RadioParams<T>) -> Result<FlowSplit<T>> {
    check_positions(positions, radio)?;
    let mut split = FlowSplit::zeros(radio.num_aps(), radio.num_nodes());
    for i in 0..radio.num_aps() {
        split.set(i, cheapest_fc(positions, i, radio), T::one());
    }
    Ok(split)
}

/// Pushes cell traffic `R_b·v_i` through the split in topological order.
pub fn propagate_flows<T: Scalar>(volumes: &[T], split: &FlowSplit<T>, bit_rate: T) -> Result<Flows<T>> {
    let n = split.num_aps();
    let nodes = split.num_nodes();
    if volumes.len() != n {
        return Err(Error::mismatch("volumes", n, volumes.len()));
    }
    let order = split.topological_order()?;
    let mut inbound = vec![T::zero(); n];
    let mut outflow = vec![T::zero(); n];
    let mut link = vec![T::zero(); n * nodes];
    for i in order {
        let total = bit_rate * volumes[i] + inbound[i];
        outflow[i] = total;
        for (j, s) in split.successors(i) {
            let f = s * total;
            link[i * nodes + j] = f;
            if j < n {
                inbound[j] += f;
            }
        }
    }
    Ok(Flows {
        num_aps: n,
        num_nodes: nodes,
        link,
        outflow,
    })
}

/// Convenience: propagate flows and bundle them with the split.
pub fn route_with_volumes<T: Scalar>(split: FlowSplit<T>, volumes: &[T], bit_rate: T) -> Result<Routing<T>> {
    let flows = propagate_flows(volumes, &split, bit_rate)?;
    Ok(Routing { split, flows })
}

/// Energy per bit `g_n` to deliver AP `n`'s data to the FCs along the split.
///
/// Reverse topological recursion `g_n = Σ_j s_{n,j}·(e_{n,j} + g_j)` with `g = 0` at FCs.
pub fn power_coefficients<T: Scalar>(
    positions: &[Point2<T>],
    split: &FlowSplit<T>,
    radio: &RadioParams<T>,
) -> Result<Vec<T>> {
    check_positions(positions, radio)?;
    let n = split.num_aps();
    let order = split.topological_order()?;
    let mut g = vec![T::zero(); n];
    for &i in order.iter().rev() {
        g[i] = split
            .successors(i)
            .map(|(j, s)| {
                let downstream = if j < n { g[j] } else { T::zero() };
                s * (link_cost(positions, i, j, radio) + downstream)
            })
            .sum();
    }
    Ok(g)
}

/// One AP-to-FC route and the fraction of the AP's traffic that follows it.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutePath<T> {
    pub nodes: Vec<usize>,
    pub share: T,
}

/// Every path from AP `n` to a fusion center with positive share.
pub fn enumerate_paths<T: Scalar>(split: &FlowSplit<T>, n: usize) -> Result<Vec<RoutePath<T>>> {
    if n >= split.num_aps() {
        return Err(Error::NotAnAccessPoint(n));
    }
    split.topological_order()?;
    let mut paths = Vec::new();
    let mut stack = vec![(vec![n], T::one())];
    while let Some((path, share)) = stack.pop() {
        let last = *path.last().expect("non-empty path");
        if last >= split.num_aps() {
            if paths.len() == MAX_ENUMERATED_PATHS {
                return Err(Error::PathExplosion {
                    node: n,
                    limit: MAX_ENUMERATED_PATHS,
                });
            }
            paths.push(RoutePath { nodes: path, share });
            continue;
        }
        // Reverse so the smallest successor is expanded first.
        let succ: Vec<_> = split.successors(last).collect();
        for &(j, s) in succ.iter().rev() {
            let mut next = path.clone();
            next.push(j);
            stack.push((next, share * s));
        }
    }
    Ok(paths)
}
