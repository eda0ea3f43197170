//! Alternating cell/routing/position optimization with optional movement budgets.

mod moves;
mod targets;

pub use moves::{lorl_move, merl_move, MovePlan, MIN_MOVE_DISTANCE};
pub use targets::{chi, movement_energy, psi, targets_and_weights, z_points};

use crate::error::{Error, Result};
use crate::field::DiscretizedField;
use crate::geometry::Point2;
use crate::model::{Algorithm, Scenario};
use crate::partition::{Partition, PowerModel};
use crate::routing::{bellman_ford_route, Routing};
use crate::scalar::Scalar;

/// Current node positions together with where they started.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment<T> {
    pub positions: Vec<Point2<T>>,
    pub initial: Vec<Point2<T>>,
}

impl<T: Scalar> Deployment<T> {
    pub fn new(initial: Vec<Point2<T>>) -> Self {
        Self {
            positions: initial.clone(),
            initial,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
}

/// Objective and per-node movement energy after an iteration (0 = start).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow<T> {
    pub iteration: usize,
    pub objective: T,
    pub energy: Vec<T>,
}

/// Quantities used by one position update.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<T> {
    pub targets: Vec<Point2<T>>,
    pub weights: Vec<T>,
    pub positions: Vec<Point2<T>>,
    pub plan: Option<MovePlan<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult<T> {
    pub algorithm: Algorithm,
    pub deployment: Deployment<T>,
    pub partition: Partition<T>,
    pub routing: Routing<T>,
    pub trace: Vec<TraceRow<T>>,
    pub steps: Vec<StepRecord<T>>,
    pub termination: Termination,
}

impl<T: Scalar> RunResult<T> {
    pub fn final_objective(&self) -> T {
        self.trace.last().map_or(T::zero(), |r| r.objective)
    }

    pub fn iterations(&self) -> usize {
        self.trace.len() - 1
    }
}

/// Runs `algorithm` from `initial` until the relative decrease of the objective
/// falls below the scenario's threshold or the iteration cap is hit.
pub fn run<T: Scalar>(
    scenario: &Scenario<T>,
    field: &DiscretizedField<T>,
    algorithm: Algorithm,
    initial: &[Point2<T>],
) -> Result<RunResult<T>> {
    scenario.validate()?;
    scenario.check_for(algorithm)?;
    let nodes = scenario.num_nodes();
    if initial.len() != nodes {
        return Err(Error::mismatch("initial positions", nodes, initial.len()));
    }
    if let Some(k) = initial.iter().position(|p| !p.is_finite()) {
        return Err(Error::invalid("initial positions", format!("node {k} is not finite")));
    }
    let model = PowerModel::new(&scenario.radio, scenario.lambda, scenario.bit_rate, field);
    // Energy columns fall back to metres travelled when no move cost is given.
    let unit = vec![T::one(); nodes];
    let move_costs = scenario.mobility.move_costs.as_deref().unwrap_or(&unit);

    let mut deployment = Deployment::new(initial.to_vec());
    let mut split = bellman_ford_route(&deployment.positions, &scenario.radio)?;
    let mut partition = model.voronoi_for_split(&deployment.positions, &split)?;
    let mut objective = model.objective_direct(&deployment.positions, &partition, &split)?;
    let mut trace = vec![TraceRow {
        iteration: 0,
        objective,
        energy: vec![T::zero(); nodes],
    }];
    let mut steps = Vec::new();
    let mut termination = Termination::MaxIterations;

    if objective == T::zero() {
        termination = Termination::Converged;
    } else {
        for iteration in 1..=scenario.max_iters {
            let previous = objective;
            partition = model.voronoi_for_split(&deployment.positions, &split)?;
            split = bellman_ford_route(&deployment.positions, &scenario.radio)?;
            let flows = model.flows(&partition, &split)?;
            let (z, w) = targets_and_weights(
                &deployment.positions,
                &partition,
                &flows,
                &scenario.radio,
                scenario.lambda,
                scenario.bit_rate,
            )?;
            let (next, plan) = match algorithm {
                Algorithm::Rl => (z.clone(), None),
                Algorithm::Merl => {
                    let budget = scenario.mobility.total_budget.unwrap_or_default();
                    let (p, plan) = merl_move(&deployment.initial, &z, &w, move_costs, budget)?;
                    (p, Some(plan))
                }
                Algorithm::Lorl => {
                    let budgets = scenario.mobility.node_budgets.as_deref().unwrap_or(&[]);
                    (lorl_move(&deployment.initial, &z, move_costs, budgets)?, None)
                }
            };
            deployment.positions = next;
            objective = model.objective_direct(&deployment.positions, &partition, &split)?;
            trace.push(TraceRow {
                iteration,
                objective,
                energy: movement_energy(&deployment.positions, &deployment.initial, move_costs).0,
            });
            steps.push(StepRecord {
                targets: z,
                weights: w,
                positions: deployment.positions.clone(),
                plan,
            });
            if objective == T::zero() || (previous - objective) / previous < scenario.epsilon {
                termination = Termination::Converged;
                break;
            }
        }
    }

    let flows = model.flows(&partition, &split)?;
    Ok(RunResult {
        algorithm,
        deployment,
        partition,
        routing: Routing { split, flows },
        trace,
        steps,
        termination,
    })
}

/// Unconstrained relocation.
pub fn rl_run<T: Scalar>(
    scenario: &Scenario<T>,
    field: &DiscretizedField<T>,
    initial: &[Point2<T>],
) -> Result<RunResult<T>> {
    run(scenario, field, Algorithm::Rl, initial)
}

/// Relocation under a total movement-energy budget.
pub fn merl_run<T: Scalar>(
    scenario: &Scenario<T>,
    field: &DiscretizedField<T>,
    initial: &[Point2<T>],
) -> Result<RunResult<T>> {
    run(scenario, field, Algorithm::Merl, initial)
}

/// Relocation under per-node movement-energy budgets.
pub fn lorl_run<T: Scalar>(
    scenario: &Scenario<T>,
    field: &DiscretizedField<T>,
    initial: &[Point2<T>],
) -> Result<RunResult<T>> {
    run(scenario, field, Algorithm::Lorl, initial)
}
