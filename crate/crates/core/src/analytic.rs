//! Closed-form coverage and average-datarate expressions for the typical
//! cellular and WiFi user in the licensed and unlicensed bands.
//!
//! Every integral is evaluated numerically. The serving-distance integrals
//! are rewritten with `u = r²` so the integrand is `exp(-A u)` times a
//! bounded noise factor, which reduces to closed forms when noise is zero.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{thinned_intensity, Band, Tier};
use crate::quadrature::{integrate, integrate_to_infinity, QuadratureError, Tolerance};
use crate::radio::{NoiseModel, PathLoss, RadioError};
use crate::units::{db_to_linear, mhz_to_hz, per_km2_to_per_m2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("invalid scenario: {field} {reason}")]
    InvalidScenario { field: &'static str, reason: String },
    #[error("path-loss exponent {0} <= 2: interference diverges")]
    Divergent(f64),
    #[error("no serving {tier:?} node in the {band:?} band (zero intensity)")]
    DegenerateTier { tier: Tier, band: Band },
    #[error("{name} = {value} is outside [0, 1]")]
    FractionOutOfRange { name: &'static str, value: f64 },
    #[error("SINR threshold must be positive, got {0}")]
    Threshold(f64),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Radio(#[from] RadioError),
}

/// How the co-tier term of the cellular coverage exponent is weighted.
///
/// With nearest-BS association the co-tier Laplace functional contributes
/// `π λ r² · 2ζ(γ, α)`, so the exact exponent is `π λ r² (1 + 2ζ)`.
/// `Halved` keeps only one ζ, i.e. `π λ r² (1 + ζ)`, which overstates
/// coverage against simulation; it is kept for comparison with that form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SelfInterference {
    #[default]
    Exact,
    Halved,
}

impl SelfInterference {
    pub fn zeta_multiplier(&self) -> f64 {
        match self {
            SelfInterference::Exact => 2.0,
            SelfInterference::Halved => 1.0,
        }
    }
}

/// Physical-layer parameters, SI units, linear scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Incumbent density (m⁻²).
    pub incumbent_density: f64,
    pub cellular_density: f64,
    pub wifi_density: f64,
    /// Exclusion-zone radius around incumbents (m).
    pub exclusion_radius: f64,
    /// WiFi association range (m).
    pub wifi_range: f64,
    /// Transmit powers (W).
    pub incumbent_power: f64,
    pub cellular_power: f64,
    pub wifi_power: f64,
    /// Bandwidths (Hz). Both tiers share the unlicensed bandwidth.
    pub unlicensed_bandwidth: f64,
    pub cellular_licensed_bandwidth: f64,
    pub wifi_licensed_bandwidth: f64,
    pub path_loss: PathLoss,
    pub noise: NoiseModel,
    /// Linear SINR threshold.
    pub sinr_threshold: f64,
    pub self_interference: SelfInterference,
}

impl Scenario {
    /// The parameter set used throughout the evaluation: 1/25/100 per km²,
    /// 200 m zones, 50 m WiFi range, 1/2/1 W, 240/80/80 MHz, α = 4,
    /// interference-limited, γ = 10 dB.
    pub fn baseline() -> Self {
        Self {
            incumbent_density: per_km2_to_per_m2(1.0),
            cellular_density: per_km2_to_per_m2(25.0),
            wifi_density: per_km2_to_per_m2(100.0),
            exclusion_radius: 200.0,
            wifi_range: 50.0,
            incumbent_power: 1.0,
            cellular_power: 2.0,
            wifi_power: 1.0,
            unlicensed_bandwidth: mhz_to_hz(240.0),
            cellular_licensed_bandwidth: mhz_to_hz(80.0),
            wifi_licensed_bandwidth: mhz_to_hz(80.0),
            path_loss: PathLoss::new(4.0).expect("4 > 2"),
            noise: NoiseModel::interference_limited(),
            sinr_threshold: db_to_linear(10.0),
            self_interference: SelfInterference::Exact,
        }
    }

    pub fn with_threshold(mut self, gamma: f64) -> Self {
        self.sinr_threshold = gamma;
        self
    }

    pub fn validate(&self) -> Result<(), AnalyticError> {
        let non_negative = [
            ("incumbent_density", self.incumbent_density),
            ("cellular_density", self.cellular_density),
            ("wifi_density", self.wifi_density),
            ("exclusion_radius", self.exclusion_radius),
            ("incumbent_power", self.incumbent_power),
            ("cellular_power", self.cellular_power),
            ("wifi_power", self.wifi_power),
            ("unlicensed_bandwidth", self.unlicensed_bandwidth),
            ("cellular_licensed_bandwidth", self.cellular_licensed_bandwidth),
            ("wifi_licensed_bandwidth", self.wifi_licensed_bandwidth),
            ("noise.cellular", self.noise.cellular),
            ("noise.wifi", self.noise.wifi),
        ];
        for (field, value) in non_negative {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(AnalyticError::InvalidScenario {
                    field,
                    reason: format!("must be finite and >= 0, got {value}"),
                });
            }
        }
        if !(self.wifi_range > 0.0 && self.wifi_range.is_finite()) {
            return Err(AnalyticError::InvalidScenario {
                field: "wifi_range",
                reason: format!("must be > 0, got {}", self.wifi_range),
            });
        }
        if !(self.sinr_threshold > 0.0 && self.sinr_threshold.is_finite()) {
            return Err(AnalyticError::Threshold(self.sinr_threshold));
        }
        Ok(())
    }

    pub fn alpha(&self) -> f64 {
        self.path_loss.exponent()
    }

    /// Probability that a point lies outside every exclusion zone.
    pub fn retention(&self) -> f64 {
        thinned_intensity(1.0, self.incumbent_density, self.exclusion_radius)
    }

    pub fn density(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Cellular => self.cellular_density,
            Tier::Wifi => self.wifi_density,
            Tier::Incumbent => self.incumbent_density,
        }
    }

    /// Density of nodes eligible for the unlicensed band.
    pub fn eligible_density(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Incumbent => 0.0,
            t => thinned_intensity(self.density(t), self.incumbent_density, self.exclusion_radius),
        }
    }

    pub fn power(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Cellular => self.cellular_power,
            Tier::Wifi => self.wifi_power,
            Tier::Incumbent => self.incumbent_power,
        }
    }

    pub fn bandwidth(&self, tier: Tier, band: Band) -> f64 {
        match (tier, band) {
            (_, Band::Unlicensed) => self.unlicensed_bandwidth,
            (Tier::Cellular, Band::Licensed) => self.cellular_licensed_bandwidth,
            (Tier::Wifi, Band::Licensed) => self.wifi_licensed_bandwidth,
            (Tier::Incumbent, Band::Licensed) => 0.0,
        }
    }

    /// Density of `source` transmitters occupying `band`, as heard by a
    /// receiver of tier `victim`. Licensed bands are tier-private.
    pub fn source_density(&self, source: Tier, victim: Tier, band: Band, util: Utilization) -> f64 {
        match band {
            Band::Unlicensed => match source {
                Tier::Incumbent => self.incumbent_density,
                t => util.of(t) * self.eligible_density(t),
            },
            Band::Licensed if source == victim && source != Tier::Incumbent => {
                self.density(source) - util.of(source) * self.eligible_density(source)
            }
            Band::Licensed => 0.0,
        }
    }
}

/// Network-wide unlicensed utilization fractions.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Utilization {
    pub cellular: f64,
    pub wifi: f64,
}

impl Utilization {
    pub fn new(cellular: f64, wifi: f64) -> Result<Self, AnalyticError> {
        check_fraction("delta_c", cellular)?;
        check_fraction("delta_w", wifi)?;
        Ok(Self { cellular, wifi })
    }

    pub fn of(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Cellular => self.cellular,
            Tier::Wifi => self.wifi,
            Tier::Incumbent => 0.0,
        }
    }
}

/// Average datarates (bit/s) of one entity's cellular and WiFi users.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Rates {
    pub cellular: f64,
    pub wifi: f64,
}

impl Rates {
    pub fn of(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Cellular => self.cellular,
            Tier::Wifi => self.wifi,
            Tier::Incumbent => 0.0,
        }
    }
}

fn check_fraction(name: &'static str, value: f64) -> Result<(), AnalyticError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(AnalyticError::FractionOutOfRange { name, value })
    }
}

fn check_alpha(alpha: f64) -> Result<(), AnalyticError> {
    if alpha > 2.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(AnalyticError::Divergent(alpha))
    }
}

const TOL: Tolerance = Tolerance::relative(1e-11).with_abs(1e-300);

/// `sin(πx)/(πx)`, with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// `∫_{v0}^∞ dv / (1 + v^{α/2})`.
///
/// For `v0 >= 1` the tail is mapped onto `w ∈ (0, 1]` by
/// `v = v0 w^{-2/(α-2)}`, giving the smooth integrand
/// `(v0/β) / (v0^{α/2} + w^{α/(α-2)})`, `β = (α-2)/2`. Below 1 the
/// complement of the finite head is taken from `∫_0^∞ = 1/sinc(2/α)`.
pub fn power_law_tail(v0: f64, alpha: f64) -> Result<f64, AnalyticError> {
    check_alpha(alpha)?;
    let q = 0.5 * alpha;
    if v0 >= 1.0 {
        let beta = q - 1.0;
        let p = alpha / (alpha - 2.0);
        let head = v0.powf(q);
        let inner = integrate(|w| 1.0 / (head + w.powf(p)), 0.0, 1.0, TOL)?;
        Ok(v0 / beta * inner.value)
    } else {
        let whole = 1.0 / sinc(2.0 / alpha);
        let head = integrate(|v| 1.0 / (1.0 + v.powf(q)), 0.0, v0.max(0.0), TOL)?;
        Ok(whole - head.value)
    }
}

/// `ζ(γ, α) = (γ^{2/α}/2) ∫_{γ^{-2/α}}^∞ dx / (1 + x^{α/2})`.
///
/// Evaluated as `1/(α-2) ∫_0^1 dw / (1/γ + w^{α/(α-2)})`, the same
/// integral after the substitution used in [`power_law_tail`].
pub fn zeta(gamma: f64, alpha: f64) -> Result<f64, AnalyticError> {
    check_alpha(alpha)?;
    if !(gamma > 0.0) {
        return Err(AnalyticError::Threshold(gamma));
    }
    let p = alpha / (alpha - 2.0);
    let inv = 1.0 / gamma;
    let inner = integrate(|w| 1.0 / (inv + w.powf(p)), 0.0, 1.0, TOL)?;
    Ok(inner.value / (alpha - 2.0))
}

/// Laplace transform `E[exp(-s I)]` of the interference from `source`
/// transmitters in `band` at a `victim`-tier receiver at the origin.
///
/// Cellular sources seen by a cellular victim lie beyond the serving
/// distance (nearest-BS association); every other source is unbounded.
pub fn laplace_interference(
    s: f64,
    source: Tier,
    victim: Tier,
    band: Band,
    scenario: &Scenario,
    util: Utilization,
    serving_distance: f64,
) -> Result<f64, AnalyticError> {
    let alpha = scenario.alpha();
    let density = scenario.source_density(source, victim, band, util);
    if s == 0.0 || density == 0.0 {
        return Ok(1.0);
    }
    let scale = (s * scenario.power(source)).powf(2.0 / alpha);
    let exponent = if source == Tier::Cellular && victim == Tier::Cellular {
        let tail = power_law_tail(serving_distance * serving_distance / scale, alpha)?;
        // The halved variant weights the co-tier functional by one half.
        PI * density * scale * tail * scenario.self_interference.zeta_multiplier() / 2.0
    } else {
        PI * density * scale / sinc(2.0 / alpha)
    };
    Ok((-exponent).exp())
}

/// Coverage evaluator with the threshold-dependent constants cached.
#[derive(Debug, Clone, Copy)]
pub struct AnalyticModel {
    scenario: Scenario,
    zeta: f64,
    /// `π γ^{2/α} / sinc(2/α)`.
    sinc_coefficient: f64,
}

impl AnalyticModel {
    pub fn new(scenario: &Scenario) -> Result<Self, AnalyticError> {
        scenario.validate()?;
        let alpha = scenario.alpha();
        let gamma = scenario.sinr_threshold;
        Ok(Self {
            scenario: *scenario,
            zeta: zeta(gamma, alpha)?,
            sinc_coefficient: PI * gamma.powf(2.0 / alpha) / sinc(2.0 / alpha),
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    /// `p^{2/α}`.
    fn reach(&self, tier: Tier) -> f64 {
        self.scenario.power(tier).powf(2.0 / self.scenario.alpha())
    }

    /// `π λ ∫_0^∞ exp(-(κγ/p) u^{α/2} - A u) du`, via `t = A u`.
    fn nearest_serving(&self, serving_density: f64, exponent: f64) -> Result<f64, AnalyticError> {
        let sc = &self.scenario;
        let lead = PI * serving_density / exponent;
        let noise = sc.noise.cellular * sc.sinr_threshold / sc.cellular_power;
        if noise == 0.0 {
            return Ok(lead.min(1.0));
        }
        let half_alpha = 0.5 * sc.alpha();
        let est = integrate_to_infinity(|t| (-t - noise * (t / exponent).powf(half_alpha)).exp(), 0.0, TOL)?;
        Ok((lead * est.value).clamp(0.0, 1.0))
    }

    /// `(1/ρ_w²) ∫_0^{ρ_w²} exp(-(κγ/p) u^{α/2} - c u) du`.
    fn uniform_serving(&self, c: f64) -> Result<f64, AnalyticError> {
        let sc = &self.scenario;
        let range_sq = sc.wifi_range * sc.wifi_range;
        let noise = sc.noise.wifi * sc.sinr_threshold / sc.wifi_power;
        if noise == 0.0 {
            return Ok(wifi_closed_form(c, sc.wifi_range));
        }
        let half_alpha = 0.5 * sc.alpha();
        let est = integrate(|u| (-noise * u.powf(half_alpha) - c * u).exp(), 0.0, range_sq, TOL)?;
        Ok((est.value / range_sq).clamp(0.0, 1.0))
    }

    fn self_term(&self, serving_density: f64) -> f64 {
        PI * serving_density * (1.0 + self.scenario.self_interference.zeta_multiplier() * self.zeta)
    }

    pub fn cellular_licensed(&self, util: Utilization) -> Result<f64, AnalyticError> {
        let density = self
            .scenario
            .source_density(Tier::Cellular, Tier::Cellular, Band::Licensed, util);
        if !(density > 0.0) {
            return Err(AnalyticError::DegenerateTier {
                tier: Tier::Cellular,
                band: Band::Licensed,
            });
        }
        self.nearest_serving(density, self.self_term(density))
    }

    pub fn cellular_unlicensed(&self, util: Utilization) -> Result<f64, AnalyticError> {
        let sc = &self.scenario;
        let density = sc.source_density(Tier::Cellular, Tier::Cellular, Band::Unlicensed, util);
        if !(density > 0.0) {
            return Err(AnalyticError::DegenerateTier {
                tier: Tier::Cellular,
                band: Band::Unlicensed,
            });
        }
        let cross = self.cross_tier(Tier::Cellular, util, &[Tier::Wifi, Tier::Incumbent]);
        self.nearest_serving(density, self.self_term(density) + cross)
    }

    pub fn wifi_licensed(&self, util: Utilization) -> Result<f64, AnalyticError> {
        let density = self
            .scenario
            .source_density(Tier::Wifi, Tier::Wifi, Band::Licensed, util);
        self.uniform_serving(self.sinc_coefficient * density)
    }

    pub fn wifi_unlicensed(&self, util: Utilization) -> Result<f64, AnalyticError> {
        let cross = self.cross_tier(Tier::Wifi, util, &[Tier::Wifi, Tier::Cellular, Tier::Incumbent]);
        self.uniform_serving(cross)
    }

    /// `π γ^{2/α}/(p_v^{2/α} sinc) Σ_j λ_j p_j^{2/α}` over unlicensed sources.
    fn cross_tier(&self, victim: Tier, util: Utilization, sources: &[Tier]) -> f64 {
        let weighted: f64 = sources
            .iter()
            .map(|&j| self.scenario.source_density(j, victim, Band::Unlicensed, util) * self.reach(j))
            .sum();
        self.sinc_coefficient * weighted / self.reach(victim)
    }

    pub fn coverage(&self, tier: Tier, band: Band, util: Utilization) -> Result<f64, AnalyticError> {
        match (tier, band) {
            (Tier::Cellular, Band::Licensed) => self.cellular_licensed(util),
            (Tier::Cellular, Band::Unlicensed) => self.cellular_unlicensed(util),
            (Tier::Wifi, Band::Licensed) => self.wifi_licensed(util),
            (Tier::Wifi, Band::Unlicensed) => self.wifi_unlicensed(util),
            (Tier::Incumbent, _) => Err(AnalyticError::InvalidScenario {
                field: "tier",
                reason: "incumbents are not served".into(),
            }),
        }
    }

    /// Average datarate of a user of `tier` owned by an entity that puts a
    /// fraction `own_delta` of its eligible nodes in the unlicensed band.
    ///
    /// The user is on an unlicensed node with probability
    /// `own_delta · retention`; a band whose weight is exactly zero is not
    /// evaluated, so empty tiers never surface as errors.
    pub fn datarate(&self, tier: Tier, util: Utilization, own_delta: f64) -> Result<f64, AnalyticError> {
        check_fraction("own delta", own_delta)?;
        let sc = &self.scenario;
        if !(sc.density(tier) > 0.0) {
            return Err(AnalyticError::DegenerateTier {
                tier,
                band: Band::Licensed,
            });
        }
        let spectral = (1.0 + sc.sinr_threshold).log2();
        let unlicensed_weight = own_delta * sc.eligible_density(tier) / sc.density(tier);
        let licensed_weight = 1.0 - unlicensed_weight;
        let mut rate = 0.0;
        if unlicensed_weight > 0.0 {
            rate += sc.bandwidth(tier, Band::Unlicensed)
                * spectral
                * self.coverage(tier, Band::Unlicensed, util)?
                * unlicensed_weight;
        }
        if licensed_weight > 0.0 {
            rate += sc.bandwidth(tier, Band::Licensed)
                * spectral
                * self.coverage(tier, Band::Licensed, util)?
                * licensed_weight;
        }
        Ok(rate)
    }
}

/// `(1 - e^{-c ρ²}) / (c ρ²)`, equal to 1 at `c = 0`.
pub fn wifi_closed_form(c: f64, range: f64) -> f64 {
    let x = c * range * range;
    if x == 0.0 {
        1.0
    } else {
        -(-x).exp_m1() / x
    }
}

pub fn coverage_cellular_licensed(gamma: f64, delta_c: f64, scenario: &Scenario) -> Result<f64, AnalyticError> {
    AnalyticModel::new(&scenario.with_threshold(gamma))?.cellular_licensed(Utilization::new(delta_c, 0.0)?)
}

pub fn coverage_cellular_unlicensed(
    gamma: f64,
    delta_c: f64,
    delta_w: f64,
    scenario: &Scenario,
) -> Result<f64, AnalyticError> {
    AnalyticModel::new(&scenario.with_threshold(gamma))?.cellular_unlicensed(Utilization::new(delta_c, delta_w)?)
}

pub fn coverage_wifi_legacy(gamma: f64, delta_w: f64, scenario: &Scenario) -> Result<f64, AnalyticError> {
    AnalyticModel::new(&scenario.with_threshold(gamma))?.wifi_licensed(Utilization::new(0.0, delta_w)?)
}

pub fn coverage_wifi_unlicensed(
    gamma: f64,
    delta_c: f64,
    delta_w: f64,
    scenario: &Scenario,
) -> Result<f64, AnalyticError> {
    AnalyticModel::new(&scenario.with_threshold(gamma))?.wifi_unlicensed(Utilization::new(delta_c, delta_w)?)
}

pub fn avg_datarate_cellular(
    gamma: f64,
    delta_c: f64,
    delta_w: f64,
    own_delta_c: f64,
    scenario: &Scenario,
) -> Result<f64, AnalyticError> {
    AnalyticModel::new(&scenario.with_threshold(gamma))?.datarate(
        Tier::Cellular,
        Utilization::new(delta_c, delta_w)?,
        own_delta_c,
    )
}

pub fn avg_datarate_wifi(
    gamma: f64,
    delta_c: f64,
    delta_w: f64,
    own_delta_w: f64,
    scenario: &Scenario,
) -> Result<f64, AnalyticError> {
    AnalyticModel::new(&scenario.with_threshold(gamma))?.datarate(
        Tier::Wifi,
        Utilization::new(delta_c, delta_w)?,
        own_delta_w,
    )
}
