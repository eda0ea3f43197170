//! Run orchestration: scenario loading, initial deployments and output files.
//!
//! Every file written here is a deterministic function of the scenario bytes and
//! the [`RunConfig`].

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{discretize, DiscretizedField};
use crate::geometry::{Point2, Region};
use crate::model::{Algorithm, Scenario};
use crate::optimize::{movement_energy, run, RunResult, Termination};
use crate::partition::PowerModel;
use crate::routing::{direct_route, Routing};
use crate::scalar::Scalar;
use crate::scenario::load_scenario;

pub const DEFAULT_GRID: (usize, usize) = (100, 100);

pub const DEPLOYMENT_FILE: &str = "deployment.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const ROUTING_FILE: &str = "routing.csv";
pub const SUMMARY_FILE: &str = "summary.toml";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitSource {
    /// Uniform over the region, seeded by [`RunConfig::seed`].
    Random,
    /// A deployment CSV with `x_m` and `y_m` columns, one row per node.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: PathBuf,
    pub algorithm: Algorithm,
    pub grid: (usize, usize),
    pub seed: u64,
    pub init: InitSource,
    /// Overrides the scenario's stopping threshold.
    pub epsilon: Option<f64>,
    /// Overrides the scenario's iteration cap.
    pub max_iters: Option<usize>,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(scenario: impl Into<PathBuf>, algorithm: Algorithm, out: impl Into<PathBuf>) -> Self {
        Self {
            scenario: scenario.into(),
            algorithm,
            grid: DEFAULT_GRID,
            seed: 0,
            init: InitSource::Random,
            epsilon: None,
            max_iters: None,
            out: out.into(),
        }
    }
}

/// Parses `WxH`, e.g. `100x100`.
pub fn parse_grid(text: &str) -> Result<(usize, usize)> {
    let bad = || Error::invalid("grid", format!("expected WxH, got `{text}`"));
    let (w, h) = text.trim().split_once(['x', 'X']).ok_or_else(bad)?;
    let w: usize = w.trim().parse().map_err(|_| bad())?;
    let h: usize = h.trim().parse().map_err(|_| bad())?;
    if w < 2 || h < 2 {
        return Err(Error::invalid("grid", "each side must be at least 2"));
    }
    Ok((w, h))
}

/// `count` points drawn uniformly from the region by rejection from its bounding box.
pub fn random_deployment<T: Scalar>(region: &Region<T>, count: usize, seed: u64) -> Vec<Point2<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bb = region.bounding_box();
    let (x0, y0) = (bb.min.x.to_f64_lossy(), bb.min.y.to_f64_lossy());
    let (x1, y1) = (bb.max.x.to_f64_lossy(), bb.max.y.to_f64_lossy());
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let p = Point2::new(T::lit(rng.gen_range(x0..=x1)), T::lit(rng.gen_range(y0..=y1)));
        if region.contains(p) {
            points.push(p);
        }
    }
    points
}

#[derive(Debug, serde::Deserialize)]
struct PositionRow {
    x_m: f64,
    y_m: f64,
}

/// Reads node positions from a CSV with `x_m` and `y_m` columns (extra columns are ignored).
pub fn read_deployment(path: &Path) -> Result<Vec<Point2<f64>>> {
    let parse = |reason: String| Error::Parse {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => parse(format!("{other:?}")),
    })?;
    reader
        .deserialize::<PositionRow>()
        .map(|row| row.map(|r| Point2::new(r.x_m, r.y_m)).map_err(|e| parse(e.to_string())))
        .collect()
}

/// Cheapest-FC routing for `positions`, with cells and flows to match.
pub fn direct_baseline<T: Scalar>(
    scenario: &Scenario<T>,
    field: &DiscretizedField<T>,
    positions: &[Point2<T>],
) -> Result<Routing<T>> {
    let model = PowerModel::new(&scenario.radio, scenario.lambda, scenario.bit_rate, field);
    let split = direct_route(positions, &scenario.radio)?;
    let partition = model.voronoi_for_split(positions, &split)?;
    let flows = model.flows(&partition, &split)?;
    Ok(Routing { split, flows })
}

#[derive(Debug, Serialize)]
struct Summary {
    algorithm: String,
    seed: u64,
    grid: String,
    iterations: usize,
    termination: &'static str,
    initial_objective_watts: f64,
    final_objective_watts: f64,
    sensor_power_watts: f64,
    ap_transmit_power_watts: f64,
    ap_receive_power_watts: f64,
    direct_routing_objective_watts: f64,
    total_movement_energy_j: f64,
}

/// Everything a finished run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub scenario: Scenario<f64>,
    pub result: RunResult<f64>,
    pub files: Vec<PathBuf>,
}

/// Loads the scenario, runs the algorithm and writes the output files.
pub fn execute(config: &RunConfig) -> Result<RunOutput> {
    let mut scenario: Scenario<f64> = load_scenario(&config.scenario)?;
    if let Some(eps) = config.epsilon {
        scenario.epsilon = eps;
    }
    if let Some(cap) = config.max_iters {
        scenario.max_iters = cap;
    }
    scenario.validate()?;
    scenario.check_for(config.algorithm)?;
    let field = discretize(&scenario.region, &scenario.density, config.grid)?;
    let initial = match &config.init {
        InitSource::Random => random_deployment(&scenario.region, scenario.num_nodes(), config.seed),
        InitSource::File(path) => {
            let p = read_deployment(path)?;
            if p.len() != scenario.num_nodes() {
                return Err(Error::mismatch("initial deployment rows", scenario.num_nodes(), p.len()));
            }
            p
        }
    };
    let result = run(&scenario, &field, config.algorithm, &initial)?;
    let files = write_outputs(&config.out, config, &scenario, &field, &result)?;
    Ok(RunOutput {
        scenario,
        result,
        files,
    })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Parse {
            path: path.to_path_buf(),
            reason: format!("{other:?}"),
        },
    }
}

fn write_csv(path: &Path, header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(&row).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Writes deployment, trace, routing and summary files into `dir`.
pub fn write_outputs(
    dir: &Path,
    config: &RunConfig,
    scenario: &Scenario<f64>,
    field: &DiscretizedField<f64>,
    result: &RunResult<f64>,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let n = scenario.num_aps;
    let nodes = scenario.num_nodes();
    let dep = &result.deployment;

    let deployment = dir.join(DEPLOYMENT_FILE);
    write_csv(
        &deployment,
        &["node", "kind", "x_m", "y_m", "initial_x_m", "initial_y_m"].map(String::from),
        (0..nodes).map(|k| {
            let (p, q) = (dep.positions[k], dep.initial[k]);
            let kind = if k < n { "ap" } else { "fc" };
            vec![k.to_string(), kind.into(), p.x.to_string(), p.y.to_string(), q.x.to_string(), q.y.to_string()]
        }),
    )?;

    let trace = dir.join(TRACE_FILE);
    let mut header = vec!["iteration".to_string(), "objective_watts".to_string()];
    header.extend((0..nodes).map(|k| format!("movement_energy_node{k}_j")));
    write_csv(
        &trace,
        &header,
        result.trace.iter().map(|row| {
            let mut cells = vec![row.iteration.to_string(), row.objective.to_string()];
            cells.extend(row.energy.iter().map(|e| e.to_string()));
            cells
        }),
    )?;

    let routing = dir.join(ROUTING_FILE);
    write_csv(
        &routing,
        &["ap", "next", "share", "flow_bps", "cell_volume"].map(String::from),
        (0..n).flat_map(|i| {
            result.routing.split.successors(i).map(move |(j, s)| {
                vec![
                    i.to_string(),
                    j.to_string(),
                    s.to_string(),
                    result.routing.flows.flow(i, j).to_string(),
                    result.partition.volumes[i].to_string(),
                ]
            })
        }),
    )?;

    let model = PowerModel::new(&scenario.radio, scenario.lambda, scenario.bit_rate, field);
    let breakdown = model.breakdown(&dep.positions, &result.partition, &result.routing.split)?;
    let baseline = direct_baseline(scenario, field, &dep.positions)?;
    let baseline_partition = model.voronoi_for_split(&dep.positions, &baseline.split)?;
    let baseline_objective = model.objective_direct(&dep.positions, &baseline_partition, &baseline.split)?;
    let costs = scenario
        .mobility
        .move_costs
        .clone()
        .unwrap_or_else(|| vec![1.0; nodes]);
    let summary = Summary {
        algorithm: config.algorithm.to_string(),
        seed: config.seed,
        grid: format!("{}x{}", config.grid.0, config.grid.1),
        iterations: result.iterations(),
        termination: match result.termination {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max-iterations",
        },
        initial_objective_watts: result.trace[0].objective,
        final_objective_watts: result.final_objective(),
        sensor_power_watts: breakdown.sensor,
        ap_transmit_power_watts: breakdown.ap_transmit,
        ap_receive_power_watts: breakdown.ap_receive,
        direct_routing_objective_watts: baseline_objective,
        total_movement_energy_j: movement_energy(&dep.positions, &dep.initial, &costs).1,
    };
    let summary_path = dir.join(SUMMARY_FILE);
    let text = toml::to_string(&summary).map_err(|e| Error::Parse {
        path: summary_path.clone(),
        reason: e.to_string(),
    })?;
    fs::write(&summary_path, text).map_err(io_err(&summary_path))?;

    Ok(vec![deployment, trace, routing, summary_path])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("100x100").unwrap(), (100, 100));
        assert_eq!(parse_grid("8X4").unwrap(), (8, 4));
        assert!(parse_grid("100").is_err());
        assert!(parse_grid("1x9").is_err());
        assert!(parse_grid("ax9").is_err());
    }

    #[test]
    fn random_deployment_is_seeded_and_inside() {
        let tri = Region::new(vec![Point2::new(0.0, 0.0), Point2::new(4.0, 0.0), Point2::new(0.0, 4.0)]).unwrap();
        let a = random_deployment(&tri, 50, 7);
        let b = random_deployment(&tri, 50, 7);
        let c = random_deployment(&tri, 50, 8);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.iter().all(|&p| tri.contains(p)));
    }

    #[test]
    fn deployment_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        fs::write(&path, "node,kind,x_m,y_m\n0,ap,1.5,2\n1,fc,3,4.25\n").unwrap();
        assert_eq!(read_deployment(&path).unwrap(), vec![Point2::new(1.5, 2.0), Point2::new(3.0, 4.25)]);
        fs::write(&path, "node,x\n0,1\n").unwrap();
        assert!(matches!(read_deployment(&path), Err(Error::Parse { .. })));
    }
}
