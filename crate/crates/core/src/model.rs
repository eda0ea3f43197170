//! Problem instances: radio parameters, sensor density and movement budgets.
//!
//! Every quantity is SI (meters, joules, watts, bits per second). Unit
//! conversion from table units (nW, nJ/bit, pJ/bit/m²) happens when a scenario
//! file is loaded.

use crate::error::{Error, Result};
use crate::geometry::{Point2, Region};
use crate::scalar::Scalar;

fn check_positive<T: Scalar>(name: &str, value: T) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

fn path_loss_coefficient<T: Scalar>(
    p_th: T,
    g_t: T,
    g_r: T,
    bit_rate: T,
    wavelength: T,
) -> Result<T> {
    check_positive("p_th", p_th)?;
    check_positive("g_t", g_t)?;
    check_positive("g_r", g_r)?;
    check_positive("bit_rate", bit_rate)?;
    check_positive("wavelength", wavelength)?;
    let four_pi = T::lit(4.0) * T::PI();
    Ok(p_th * four_pi * four_pi / (bit_rate * g_t * g_r * wavelength * wavelength))
}

/// Sensor-to-AP path-loss coefficient η in J/bit/m².
///
/// `p_th` is the receiving AP's sensitivity threshold, `g_t_sensor` the sensor
/// transmit gain and `g_r` the AP receive gain.
pub fn derive_eta<T: Scalar>(p_th: T, g_t_sensor: T, g_r: T, bit_rate: T, wavelength: T) -> Result<T> {
    path_loss_coefficient(p_th, g_t_sensor, g_r, bit_rate, wavelength)
}

/// Link coefficient β_{i,j} in J/bit/m² for AP `i` transmitting to node `j`.
///
/// Same square-law form as [`derive_eta`], with the threshold and receive gain
/// of node `j` and the transmit gain of AP `i`.
pub fn derive_beta<T: Scalar>(p_th_j: T, g_t_i: T, g_r_j: T, bit_rate: T, wavelength: T) -> Result<T> {
    path_loss_coefficient(p_th_j, g_t_i, g_r_j, bit_rate, wavelength)
}

/// One isotropic Gaussian bump of a mixture density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianComponent<T> {
    pub weight: T,
    pub mean: Point2<T>,
    /// Per-axis variance in m².
    pub variance: T,
}

impl<T: Scalar> GaussianComponent<T> {
    pub fn pdf(&self, p: Point2<T>) -> T {
        let two_var = T::lit(2.0) * self.variance;
        (-(p.dist_sq(self.mean)) / two_var).exp() / (T::PI() * two_var)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec<T> {
    Uniform,
    GaussianMixture(Vec<GaussianComponent<T>>),
}

impl<T: Scalar> DensitySpec<T> {
    pub fn validate(&self) -> Result<()> {
        if let DensitySpec::GaussianMixture(components) = self {
            if components.is_empty() {
                return Err(Error::validation("density.components", "mixture has no components"));
            }
            for (k, c) in components.iter().enumerate() {
                if !(c.weight > T::zero()) {
                    return Err(Error::validation(
                        format!("density.components[{k}].weight"),
                        "must be > 0",
                    ));
                }
                if !(c.variance > T::zero()) {
                    return Err(Error::validation(
                        format!("density.components[{k}].variance_m2"),
                        "must be > 0",
                    ));
                }
                if !c.mean.is_finite() {
                    return Err(Error::validation(format!("density.components[{k}].mean_m"), "not finite"));
                }
            }
            let total: T = components.iter().map(|c| c.weight).sum();
            if (total - T::one()).abs() > T::lit(1e-6) {
                return Err(Error::validation(
                    "density.components",
                    format!("weights sum to {total}, expected 1"),
                ));
            }
        }
        Ok(())
    }

    pub fn cast<U: Scalar>(&self) -> DensitySpec<U> {
        match self {
            DensitySpec::Uniform => DensitySpec::Uniform,
            DensitySpec::GaussianMixture(cs) => DensitySpec::GaussianMixture(
                cs.iter()
                    .map(|c| GaussianComponent {
                        weight: U::lit(c.weight.to_f64_lossy()),
                        mean: c.mean.cast(),
                        variance: U::lit(c.variance.to_f64_lossy()),
                    })
                    .collect(),
            ),
        }
    }
}

/// Sensor density at `point`. The mixture is evaluated untruncated.
pub fn density_at<T: Scalar>(spec: &DensitySpec<T>, region: &Region<T>, point: Point2<T>) -> T {
    match spec {
        DensitySpec::Uniform => T::one() / region.area(),
        DensitySpec::GaussianMixture(components) => {
            components.iter().map(|c| c.weight * c.pdf(point)).sum()
        }
    }
}

/// Physical radio tables from which η and β are derived.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalRadio<T> {
    /// Minimum received power per node (APs then FCs), watts.
    pub rx_threshold: Vec<T>,
    /// Transmit antenna gain per AP.
    pub tx_gain: Vec<T>,
    /// Receive antenna gain per node (APs then FCs).
    pub rx_gain: Vec<T>,
    /// Receiver electronics per AP, J/bit.
    pub rho: Vec<T>,
    pub sensor_tx_gain: T,
    /// Carrier wavelength, meters.
    pub wavelength: T,
}

/// Per-AP and per-link radio coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct RadioParams<T> {
    num_aps: usize,
    num_nodes: usize,
    eta: Vec<T>,
    rho: Vec<T>,
    /// Row-major `num_aps × num_nodes`.
    beta: Vec<T>,
}

impl<T: Scalar> RadioParams<T> {
    pub fn new(num_aps: usize, num_fcs: usize, eta: Vec<T>, rho: Vec<T>, beta: Vec<T>) -> Result<Self> {
        let num_nodes = num_aps + num_fcs;
        if eta.len() != num_aps {
            return Err(Error::mismatch("eta", num_aps, eta.len()));
        }
        if rho.len() != num_aps {
            return Err(Error::mismatch("rho", num_aps, rho.len()));
        }
        if beta.len() != num_aps * num_nodes {
            return Err(Error::mismatch("beta", num_aps * num_nodes, beta.len()));
        }
        let params = Self {
            num_aps,
            num_nodes,
            eta,
            rho,
            beta,
        };
        params.validate()?;
        Ok(params)
    }

    /// Every AP shares η and ρ, and every link shares β.
    pub fn homogeneous(num_aps: usize, num_fcs: usize, eta: T, rho: T, beta: T) -> Result<Self> {
        Self::new(
            num_aps,
            num_fcs,
            vec![eta; num_aps],
            vec![rho; num_aps],
            vec![beta; num_aps * (num_aps + num_fcs)],
        )
    }

    pub fn derive(num_aps: usize, num_fcs: usize, phys: &PhysicalRadio<T>, bit_rate: T) -> Result<Self> {
        let num_nodes = num_aps + num_fcs;
        let lens = [
            ("rx_threshold", phys.rx_threshold.len(), num_nodes),
            ("tx_gain", phys.tx_gain.len(), num_aps),
            ("rx_gain", phys.rx_gain.len(), num_nodes),
            ("rho", phys.rho.len(), num_aps),
        ];
        for (what, got, expected) in lens {
            if got != expected {
                return Err(Error::mismatch(what, expected, got));
            }
        }
        let eta = (0..num_aps)
            .map(|n| {
                derive_eta(
                    phys.rx_threshold[n],
                    phys.sensor_tx_gain,
                    phys.rx_gain[n],
                    bit_rate,
                    phys.wavelength,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let mut beta = Vec::with_capacity(num_aps * num_nodes);
        for i in 0..num_aps {
            for j in 0..num_nodes {
                beta.push(derive_beta(
                    phys.rx_threshold[j],
                    phys.tx_gain[i],
                    phys.rx_gain[j],
                    bit_rate,
                    phys.wavelength,
                )?);
            }
        }
        Self::new(num_aps, num_fcs, eta, phys.rho.clone(), beta)
    }

    fn validate(&self) -> Result<()> {
        for (n, &e) in self.eta.iter().enumerate() {
            if !(e > T::zero() && e.is_finite()) {
                return Err(Error::invalid(format!("eta[{n}]"), "must be finite and > 0"));
            }
        }
        for (n, &r) in self.rho.iter().enumerate() {
            if !(r >= T::zero() && r.is_finite()) {
                return Err(Error::invalid(format!("rho[{n}]"), "must be finite and >= 0"));
            }
        }
        for i in 0..self.num_aps {
            for j in 0..self.num_nodes {
                let b = self.beta(i, j);
                if i != j && !(b > T::zero() && b.is_finite()) {
                    return Err(Error::invalid(format!("beta[{i}][{j}]"), "must be finite and > 0"));
                }
            }
        }
        Ok(())
    }

    pub fn num_aps(&self) -> usize {
        self.num_aps
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn eta(&self, n: usize) -> T {
        self.eta[n]
    }

    pub fn rho(&self, n: usize) -> T {
        self.rho[n]
    }

    /// β for AP `i` transmitting to node `j`.
    pub fn beta(&self, i: usize, j: usize) -> T {
        self.beta[i * self.num_nodes + j]
    }

    pub fn etas(&self) -> &[T] {
        &self.eta
    }

    pub fn rhos(&self) -> &[T] {
        &self.rho
    }

    pub fn betas(&self) -> &[T] {
        &self.beta
    }

    pub fn cast<U: Scalar>(&self) -> RadioParams<U> {
        let c = |v: &[T]| v.iter().map(|x| U::lit(x.to_f64_lossy())).collect();
        RadioParams {
            num_aps: self.num_aps,
            num_nodes: self.num_nodes,
            eta: c(&self.eta),
            rho: c(&self.rho),
            beta: c(&self.beta),
        }
    }
}

/// Residual energy budget that guarantees a network lifetime `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifetimeBudget<T> {
    /// ν_n, joules.
    pub residual_energy: T,
    /// α_n, watts drawn after the move.
    pub post_move_power: T,
    /// Seconds.
    pub lifetime: T,
}

impl<T: Scalar> LifetimeBudget<T> {
    /// Movement allowance γ_n = ν_n − α_n·T.
    pub fn movement_budget(&self) -> Result<T> {
        let gamma = self.residual_energy - self.post_move_power * self.lifetime;
        if gamma >= T::zero() {
            Ok(gamma)
        } else {
            Err(Error::invalid(
                "lifetime",
                format!("residual energy cannot sustain the lifetime (budget {gamma} J)"),
            ))
        }
    }
}

/// Movement-energy parameters for the mobile modes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mobility<T> {
    /// ζ_n, J/m per node.
    pub move_costs: Option<Vec<T>>,
    /// γ, joules for the whole network.
    pub total_budget: Option<T>,
    /// γ_n, joules per node.
    pub node_budgets: Option<Vec<T>>,
}

/// Small hand-built instance with fixed positions, volumes and flow split.
#[derive(Debug, Clone, PartialEq)]
pub struct Fixture<T> {
    pub positions: Vec<Point2<T>>,
    pub cell_volumes: Vec<T>,
    /// `(ap, node, share)` triples, zero-based.
    pub flow_split: Vec<(usize, usize, T)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Rl,
    Merl,
    Lorl,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Rl => "rl",
            Algorithm::Merl => "merl",
            Algorithm::Lorl => "lorl",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rl" => Ok(Algorithm::Rl),
            "merl" => Ok(Algorithm::Merl),
            "lorl" => Ok(Algorithm::Lorl),
            other => Err(Error::UnknownAlgorithm(other.to_string())),
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Full problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub region: Region<T>,
    pub density: DensitySpec<T>,
    pub num_aps: usize,
    pub num_fcs: usize,
    pub radio: RadioParams<T>,
    /// R_b, bits/s.
    pub bit_rate: T,
    /// λ, weight of AP power against sensor power.
    pub lambda: T,
    pub mobility: Mobility<T>,
    /// Relative-decrease stopping threshold.
    pub epsilon: T,
    pub max_iters: usize,
    pub fixture: Option<Fixture<T>>,
}

impl<T: Scalar> Scenario<T> {
    pub fn num_nodes(&self) -> usize {
        self.num_aps + self.num_fcs
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_aps < 1 {
            return Err(Error::validation("network.num_aps", "must be >= 1"));
        }
        if self.num_fcs < 1 {
            return Err(Error::validation("network.num_fcs", "must be >= 1"));
        }
        if self.radio.num_aps() != self.num_aps || self.radio.num_nodes() != self.num_nodes() {
            return Err(Error::validation("radio", "dimensions do not match the node counts"));
        }
        if !(self.bit_rate > T::zero() && self.bit_rate.is_finite()) {
            return Err(Error::validation("network.bit_rate_bps", "must be > 0"));
        }
        if !(self.lambda >= T::zero() && self.lambda.is_finite()) {
            return Err(Error::validation("network.lambda", "must be >= 0"));
        }
        if !(self.epsilon > T::zero()) {
            return Err(Error::validation("solver.epsilon", "must be > 0"));
        }
        self.density.validate()?;
        let nodes = self.num_nodes();
        if let Some(z) = &self.mobility.move_costs {
            if z.len() != nodes {
                return Err(Error::validation(
                    "mobility.move_cost_j_per_m",
                    format!("expected {nodes} entries, got {}", z.len()),
                ));
            }
            if let Some(k) = z.iter().position(|&c| !(c > T::zero() && c.is_finite())) {
                return Err(Error::validation(format!("mobility.move_cost_j_per_m[{k}]"), "must be > 0"));
            }
        }
        if let Some(g) = self.mobility.total_budget {
            if !(g >= T::zero()) {
                return Err(Error::validation("mobility.total_budget_j", "must be >= 0"));
            }
        }
        if let Some(gs) = &self.mobility.node_budgets {
            if gs.len() != nodes {
                return Err(Error::validation(
                    "mobility.node_budget_j",
                    format!("expected {nodes} entries, got {}", gs.len()),
                ));
            }
            if let Some(k) = gs.iter().position(|&g| !(g >= T::zero())) {
                return Err(Error::validation(format!("mobility.node_budget_j[{k}]"), "must be >= 0"));
            }
        }
        if let Some(fx) = &self.fixture {
            if fx.positions.len() != nodes {
                return Err(Error::validation("fixture.positions_m", "wrong node count"));
            }
            if fx.cell_volumes.len() != self.num_aps {
                return Err(Error::validation("fixture.cell_volumes", "wrong AP count"));
            }
            for &(i, j, s) in &fx.flow_split {
                if i >= self.num_aps || j >= nodes || i == j || !(s >= T::zero() && s <= T::one()) {
                    return Err(Error::validation("fixture.flow_split", format!("bad entry ({i}, {j}, {s})")));
                }
            }
        }
        Ok(())
    }

    /// Checks that the parameters an algorithm needs are present.
    pub fn check_for(&self, algorithm: Algorithm) -> Result<()> {
        match algorithm {
            Algorithm::Rl => Ok(()),
            Algorithm::Merl => {
                if self.mobility.move_costs.is_none() {
                    return Err(Error::validation("mobility.move_cost_j_per_m", "required by merl"));
                }
                if self.mobility.total_budget.is_none() {
                    return Err(Error::validation("mobility.total_budget_j", "required by merl"));
                }
                Ok(())
            }
            Algorithm::Lorl => {
                if self.mobility.move_costs.is_none() {
                    return Err(Error::validation("mobility.move_cost_j_per_m", "required by lorl"));
                }
                if self.mobility.node_budgets.is_none() {
                    return Err(Error::validation("mobility.node_budget_j", "required by lorl"));
                }
                Ok(())
            }
        }
    }

    /// Converts every number to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Scenario<U> {
        let c = |x: T| U::lit(x.to_f64_lossy());
        Scenario {
            region: self.region.cast(),
            density: self.density.cast(),
            num_aps: self.num_aps,
            num_fcs: self.num_fcs,
            radio: self.radio.cast(),
            bit_rate: c(self.bit_rate),
            lambda: c(self.lambda),
            mobility: Mobility {
                move_costs: self.mobility.move_costs.as_ref().map(|v| v.iter().map(|&x| c(x)).collect()),
                total_budget: self.mobility.total_budget.map(c),
                node_budgets: self.mobility.node_budgets.as_ref().map(|v| v.iter().map(|&x| c(x)).collect()),
            },
            epsilon: c(self.epsilon),
            max_iters: self.max_iters,
            fixture: self.fixture.as_ref().map(|f| Fixture {
                positions: f.positions.iter().map(|p| p.cast()).collect(),
                cell_volumes: f.cell_volumes.iter().map(|&x| c(x)).collect(),
                flow_split: f.flow_split.iter().map(|&(i, j, s)| (i, j, c(s))).collect(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eta_matches_worked_value() {
        let eta = derive_eta(1e-8f64, 1.0, 2.0, 1e6, 0.3).unwrap();
        assert!((eta - 8.77e-12).abs() < 0.01e-12, "{eta}");
    }

    #[test]
    fn constants_cancel() {
        let four_pi = 4.0 * std::f64::consts::PI;
        assert_relative_eq!(derive_eta(1.0, 1.0, 1.0, 1.0, four_pi).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(derive_beta(1.0, 1.0, 1.0, 1.0, four_pi).unwrap(), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn beta_worked_values() {
        let b = derive_beta(6e-9f64, 2.0, 2.0, 1e6, 0.3).unwrap();
        assert!((b - 2.63e-12).abs() < 0.01e-12, "{b}");
        let b = derive_beta(1e-8f64, 1.0, 1.0, 1e6, 0.3).unwrap();
        assert!((b - 1.754e-11).abs() < 0.001e-11, "{b}");
    }

    #[test]
    fn derivation_rejects_non_positive() {
        assert!(matches!(
            derive_eta(0.0, 1.0, 1.0, 1.0, 1.0),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(derive_beta(1.0, -1.0, 1.0, 1.0, 1.0).is_err());
        assert!(derive_beta(1.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn derivation_scaling() {
        let base = derive_eta(3e-9, 1.5, 2.5, 2e5, 0.2).unwrap();
        assert_relative_eq!(derive_eta(6e-9, 1.5, 2.5, 2e5, 0.2).unwrap(), 2.0 * base, max_relative = 1e-14);
        assert_relative_eq!(derive_eta(3e-9, 3.0, 2.5, 2e5, 0.2).unwrap(), 0.5 * base, max_relative = 1e-14);
        assert_relative_eq!(derive_eta(3e-9, 1.5, 5.0, 2e5, 0.2).unwrap(), 0.5 * base, max_relative = 1e-14);
        assert_relative_eq!(derive_eta(3e-9, 1.5, 2.5, 4e5, 0.2).unwrap(), 0.5 * base, max_relative = 1e-14);
    }

    #[test]
    fn uniform_density_on_square() {
        let region = Region::rectangle(0.0, 0.0, 10000.0, 10000.0).unwrap();
        let f = density_at(&DensitySpec::Uniform, &region, Point2::new(1234.0, 42.0));
        assert_relative_eq!(f, 1e-8, max_relative = 1e-15);
    }

    #[test]
    fn gaussian_peak() {
        let region = Region::rectangle(0.0, 0.0, 10000.0, 10000.0).unwrap();
        let mix = DensitySpec::GaussianMixture(vec![
            GaussianComponent { weight: 0.5, mean: Point2::new(3000.0, 3000.0), variance: 1.5e6 },
            GaussianComponent { weight: 0.5, mean: Point2::new(1e9, 1e9), variance: 1.0 },
        ]);
        let f = density_at(&mix, &region, Point2::new(3000.0, 3000.0));
        let expected = 0.5 / (2.0 * std::f64::consts::PI * 1.5e6);
        assert_relative_eq!(f, expected, max_relative = 1e-14);
    }

    #[test]
    fn lifetime_budget() {
        let ok = LifetimeBudget { residual_energy: 1000.0, post_move_power: 0.01, lifetime: 5000.0 };
        assert_relative_eq!(ok.movement_budget().unwrap(), 950.0);
        let bad = LifetimeBudget { residual_energy: 10.0, post_move_power: 1.0, lifetime: 11.0 };
        assert!(bad.movement_budget().is_err());
    }

    #[test]
    fn mixture_weights_must_sum_to_one() {
        let mix = DensitySpec::GaussianMixture(vec![GaussianComponent {
            weight: 0.7,
            mean: Point2::new(0.0, 0.0),
            variance: 1.0,
        }]);
        assert!(mix.validate().is_err());
    }

    #[test]
    fn algorithm_names() {
        assert_eq!("MERL".parse::<Algorithm>().unwrap(), Algorithm::Merl);
        assert!(matches!("pso".parse::<Algorithm>(), Err(Error::UnknownAlgorithm(_))));
    }
}
