//! Mobile access-point and fusion-center deployment for wireless sensor networks.
//!
//! Sensors are spread over a convex region with a known density. Each sensor
//! reports to one access point (AP); APs relay traffic over multi-hop routes to
//! fusion centers (FCs). The crate minimizes total communication power by
//! alternating cell assignment, routing and node placement, optionally under
//! a movement-energy budget.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`). The aliases
//! at the crate root fix the precision for callers that do not care.

pub mod error;
pub mod field;
pub mod geometry;
pub mod model;
pub mod optimize;
pub mod partition;
pub mod routing;
pub mod runner;
pub mod scalar;
pub mod scenario;

pub use error::{Error, Result};
pub use field::{discretize, DiscretizedField};
pub use geometry::{Point2, Region};
pub use model::{Algorithm, DensitySpec, Fixture, GaussianComponent, Mobility, RadioParams, Scenario};
pub use optimize::{lorl_run, merl_run, rl_run, run, Deployment, RunResult, Termination, TraceRow};
pub use partition::{Partition, PowerBreakdown, PowerModel};
pub use routing::{FlowSplit, Flows, Routing};
pub use scalar::Scalar;
pub use scenario::{load_scenario, save_scenario};

pub type Point = Point2<f64>;
pub type Scenario64 = Scenario<f64>;
pub type Scenario32 = Scenario<f32>;
pub type Field64 = DiscretizedField<f64>;
pub type Deployment64 = Deployment<f64>;
pub type RunResult64 = RunResult<f64>;
pub type RunResult32 = RunResult<f32>;
