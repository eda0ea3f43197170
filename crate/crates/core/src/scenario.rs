//! Scenario files: TOML with the unit spelled out in every field name.
//!
//! Radio parameters come either as SI coefficients (`eta_j_per_bit_m2`,
//! `rho_j_per_bit`, `beta_j_per_bit_m2`) or as physical tables
//! (`rx_threshold_nw`, gains, `rho_nj_per_bit`, `wavelength_m`) from which the
//! coefficients are derived. Saving always writes the SI form.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Region};
use crate::model::{
    DensitySpec, Fixture, GaussianComponent, LifetimeBudget, Mobility, PhysicalRadio, RadioParams, Scenario,
};
use crate::scalar::Scalar;

/// A single value broadcast to every node, or one value per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum PerNode {
    All(f64),
    Each(Vec<f64>),
}

impl PerNode {
    fn expand(&self, field: &str, len: usize) -> Result<Vec<f64>> {
        match self {
            PerNode::All(x) => Ok(vec![*x; len]),
            PerNode::Each(v) if v.len() == len => Ok(v.clone()),
            PerNode::Each(v) => Err(Error::validation(field, format!("expected {len} entries, got {}", v.len()))),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    region: RegionFile,
    density: DensityFile,
    network: NetworkFile,
    radio: RadioFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mobility: Option<MobilityFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solver: Option<SolverFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fixture: Option<FixtureFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegionFile {
    vertices_m: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum DensityFile {
    Uniform,
    GaussianMixture { components: Vec<ComponentFile> },
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComponentFile {
    weight: f64,
    mean_m: [f64; 2],
    variance_m2: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    num_aps: usize,
    num_fcs: usize,
    bit_rate_bps: f64,
    lambda: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RadioFile {
    Direct(DirectRadioFile),
    Physical(PhysicalRadioFile),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirectRadioFile {
    eta_j_per_bit_m2: PerNode,
    rho_j_per_bit: PerNode,
    /// One row per AP, one column per node; or a single value for every link.
    beta_j_per_bit_m2: BetaFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum BetaFile {
    All(f64),
    Rows(Vec<Vec<f64>>),
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PhysicalRadioFile {
    rx_threshold_nw: PerNode,
    tx_gain: PerNode,
    rx_gain: PerNode,
    rho_nj_per_bit: PerNode,
    sensor_tx_gain: f64,
    wavelength_m: f64,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MobilityFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    move_cost_j_per_m: Option<PerNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    total_budget_j: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    node_budget_j: Option<PerNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lifetime: Option<LifetimeFile>,
}

/// Per-node budgets given as residual energy minus what the node must keep for its lifetime.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LifetimeFile {
    residual_energy_j: PerNode,
    post_move_power_w: PerNode,
    lifetime_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverFile {
    #[serde(default = "default_epsilon")]
    epsilon: f64,
    #[serde(default = "default_max_iters")]
    max_iters: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FixtureFile {
    positions_m: Vec<[f64; 2]>,
    cell_volumes: Vec<f64>,
    /// `[ap, node, share]`, zero-based indices.
    flow_split: Vec<(usize, usize, f64)>,
}

pub const DEFAULT_EPSILON: f64 = 1e-4;
pub const DEFAULT_MAX_ITERS: usize = 200;

fn default_epsilon() -> f64 {
    DEFAULT_EPSILON
}

fn default_max_iters() -> usize {
    DEFAULT_MAX_ITERS
}

fn point(p: [f64; 2]) -> Point2<f64> {
    Point2::new(p[0], p[1])
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<Scenario<f64>> {
        let n = self.network.num_aps;
        let m = self.network.num_fcs;
        let nodes = n + m;
        if n == 0 {
            return Err(Error::validation("network.num_aps", "must be >= 1"));
        }
        if m == 0 {
            return Err(Error::validation("network.num_fcs", "must be >= 1"));
        }
        let region = Region::new(self.region.vertices_m.into_iter().map(point).collect())
            .map_err(|e| Error::validation("region.vertices_m", e.to_string()))?;
        let density = match self.density {
            DensityFile::Uniform => DensitySpec::Uniform,
            DensityFile::GaussianMixture { components } => DensitySpec::GaussianMixture(
                components
                    .into_iter()
                    .map(|c| GaussianComponent {
                        weight: c.weight,
                        mean: point(c.mean_m),
                        variance: c.variance_m2,
                    })
                    .collect(),
            ),
        };
        let bit_rate = self.network.bit_rate_bps;
        let radio = match self.radio {
            RadioFile::Direct(d) => {
                let eta = d.eta_j_per_bit_m2.expand("radio.eta_j_per_bit_m2", n)?;
                let rho = d.rho_j_per_bit.expand("radio.rho_j_per_bit", n)?;
                let beta = match d.beta_j_per_bit_m2 {
                    BetaFile::All(b) => (0..n * nodes)
                        .map(|k| if k / nodes == k % nodes { 0.0 } else { b })
                        .collect(),
                    BetaFile::Rows(rows) => {
                        if rows.len() != n || rows.iter().any(|r| r.len() != nodes) {
                            return Err(Error::validation(
                                "radio.beta_j_per_bit_m2",
                                format!("expected {n} rows of {nodes} entries"),
                            ));
                        }
                        rows.concat()
                    }
                };
                RadioParams::new(n, m, eta, rho, beta)
            }
            RadioFile::Physical(p) => {
                let nano = 1e-9;
                let phys = PhysicalRadio {
                    rx_threshold: scale(p.rx_threshold_nw.expand("radio.rx_threshold_nw", nodes)?, nano),
                    tx_gain: p.tx_gain.expand("radio.tx_gain", n)?,
                    rx_gain: p.rx_gain.expand("radio.rx_gain", nodes)?,
                    rho: scale(p.rho_nj_per_bit.expand("radio.rho_nj_per_bit", n)?, nano),
                    sensor_tx_gain: p.sensor_tx_gain,
                    wavelength: p.wavelength_m,
                };
                RadioParams::derive(n, m, &phys, bit_rate)
            }
        }
        .map_err(|e| Error::validation("radio", e.to_string()))?;

        let mob = self.mobility.unwrap_or_default();
        let move_costs = mob
            .move_cost_j_per_m
            .map(|c| c.expand("mobility.move_cost_j_per_m", nodes))
            .transpose()?;
        let node_budgets = match (mob.node_budget_j, mob.lifetime) {
            (Some(_), Some(_)) => {
                return Err(Error::validation(
                    "mobility.lifetime",
                    "give either node_budget_j or lifetime, not both",
                ))
            }
            (Some(b), None) => Some(b.expand("mobility.node_budget_j", nodes)?),
            (None, Some(l)) => {
                let residual = l.residual_energy_j.expand("mobility.lifetime.residual_energy_j", nodes)?;
                let power = l.post_move_power_w.expand("mobility.lifetime.post_move_power_w", nodes)?;
                let budgets = residual
                    .into_iter()
                    .zip(power)
                    .enumerate()
                    .map(|(k, (r, a))| {
                        LifetimeBudget {
                            residual_energy: r,
                            post_move_power: a,
                            lifetime: l.lifetime_s,
                        }
                        .movement_budget()
                        .map_err(|e| Error::validation(format!("mobility.lifetime[{k}]"), e.to_string()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(budgets)
            }
            (None, None) => None,
        };
        let solver = self.solver.unwrap_or(SolverFile {
            epsilon: DEFAULT_EPSILON,
            max_iters: DEFAULT_MAX_ITERS,
        });
        let fixture = self.fixture.map(|f| Fixture {
            positions: f.positions_m.into_iter().map(point).collect(),
            cell_volumes: f.cell_volumes,
            flow_split: f.flow_split,
        });
        let scenario = Scenario {
            region,
            density,
            num_aps: n,
            num_fcs: m,
            radio,
            bit_rate,
            lambda: self.network.lambda,
            mobility: Mobility {
                move_costs,
                total_budget: mob.total_budget_j,
                node_budgets,
            },
            epsilon: solver.epsilon,
            max_iters: solver.max_iters,
            fixture,
        };
        scenario.validate()?;
        Ok(scenario)
    }

    fn from_scenario<T: Scalar>(s: &Scenario<T>) -> Self {
        let f = |x: T| x.to_f64_lossy();
        let pt = |p: Point2<T>| [f(p.x), f(p.y)];
        let fv = |v: &[T]| v.iter().map(|&x| f(x)).collect::<Vec<_>>();
        let nodes = s.num_nodes();
        let mobility = &s.mobility;
        let has_mobility =
            mobility.move_costs.is_some() || mobility.total_budget.is_some() || mobility.node_budgets.is_some();
        ScenarioFile {
            region: RegionFile {
                vertices_m: s.region.vertices().iter().map(|&p| pt(p)).collect(),
            },
            density: match &s.density {
                DensitySpec::Uniform => DensityFile::Uniform,
                DensitySpec::GaussianMixture(cs) => DensityFile::GaussianMixture {
                    components: cs
                        .iter()
                        .map(|c| ComponentFile {
                            weight: f(c.weight),
                            mean_m: pt(c.mean),
                            variance_m2: f(c.variance),
                        })
                        .collect(),
                },
            },
            network: NetworkFile {
                num_aps: s.num_aps,
                num_fcs: s.num_fcs,
                bit_rate_bps: f(s.bit_rate),
                lambda: f(s.lambda),
            },
            radio: RadioFile::Direct(DirectRadioFile {
                eta_j_per_bit_m2: PerNode::Each(fv(s.radio.etas())),
                rho_j_per_bit: PerNode::Each(fv(s.radio.rhos())),
                beta_j_per_bit_m2: BetaFile::Rows(s.radio.betas().chunks(nodes).map(fv).collect()),
            }),
            mobility: has_mobility.then(|| MobilityFile {
                move_cost_j_per_m: mobility.move_costs.as_deref().map(|v| PerNode::Each(fv(v))),
                total_budget_j: mobility.total_budget.map(f),
                node_budget_j: mobility.node_budgets.as_deref().map(|v| PerNode::Each(fv(v))),
                lifetime: None,
            }),
            solver: Some(SolverFile {
                epsilon: f(s.epsilon),
                max_iters: s.max_iters,
            }),
            fixture: s.fixture.as_ref().map(|fx| FixtureFile {
                positions_m: fx.positions.iter().map(|&p| pt(p)).collect(),
                cell_volumes: fv(&fx.cell_volumes),
                flow_split: fx.flow_split.iter().map(|&(i, j, v)| (i, j, f(v))).collect(),
            }),
        }
    }
}

fn scale(v: Vec<f64>, k: f64) -> Vec<f64> {
    v.into_iter().map(|x| x * k).collect()
}

/// Parses scenario text. `origin` only labels errors.
pub fn parse_scenario<T: Scalar>(text: &str, origin: &Path) -> Result<Scenario<T>> {
    let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_path_buf(),
        reason: e.message().to_string(),
    })?;
    Ok(file.into_scenario()?.cast())
}

/// Reads, converts to SI and validates a scenario file.
pub fn load_scenario<T: Scalar>(path: impl AsRef<Path>) -> Result<Scenario<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, path)
}

/// Serializes a scenario in SI form.
pub fn scenario_to_string<T: Scalar>(scenario: &Scenario<T>) -> Result<String> {
    toml::to_string(&ScenarioFile::from_scenario(scenario)).map_err(|e| Error::Parse {
        path: "<memory>".into(),
        reason: e.to_string(),
    })
}

pub fn save_scenario<T: Scalar>(scenario: &Scenario<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = scenario_to_string(scenario)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
