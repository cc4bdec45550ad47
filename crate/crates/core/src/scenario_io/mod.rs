//! Scenario files, geodata and result tables.
//!
//! Scenario files are TOML. Every key is optional; whatever is missing falls
//! back to the baseline parameter set and is listed in
//! [`ResolvedConfig::defaults_applied`]. Unknown keys are rejected. Values
//! are given in engineering units (per km², MHz, Mbps, dB, dBm or W) and
//! converted to SI-linear on load. The schema is documented in
//! `scenarios/README.md`.

mod geodata;
mod results;

pub use geodata::{load_geodata, project, BoundingBox, GeoKind, GeoRecord, Geodata};
pub use results::{ResultTable, Value};

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{Scenario, SelfInterference, Utilization};
use crate::game::{validate_entities, Entity, GameConfig, GameError};
use crate::radio::{NoiseModel, PathLoss, WifiAssociation};
use crate::units::{
    db_to_linear, dbm_to_watts, mbps_to_bps, mhz_to_hz, per_km2_to_per_m2, thermal_noise_watts, watts_to_dbm,
};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("{field}: {reason}")]
    Invalid { field: String, reason: String },
    #[error("bad override `{0}`: expected key.path=value")]
    Override(String),
    #[error("bad range `{0}`: expected start:stop:step")]
    Range(String),
    #[error("geodata {path}: {reason}")]
    Geodata { path: PathBuf, reason: String },
    #[error("cannot write results: {0}")]
    Write(String),
}

fn invalid(field: impl Into<String>, reason: impl fmt::Display) -> ConfigError {
    ConfigError::Invalid {
        field: field.into(),
        reason: reason.to_string(),
    }
}

/// How the game evaluates datarates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Closed-form coverage on the stochastic model.
    #[default]
    Analytic,
    /// One simulated random deployment.
    Montecarlo,
    /// The deployment from a geodata file.
    Casestudy,
}

/// A transmit power written as a number of watts or a string such as
/// `"33 dBm"`, `"2 W"` or `"500 mW"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PowerSpec {
    Watts(f64),
    Text(String),
}

impl PowerSpec {
    pub fn watts(&self) -> Result<f64, String> {
        match self {
            PowerSpec::Watts(w) => Ok(*w),
            PowerSpec::Text(s) => parse_power(s),
        }
    }
}

fn parse_power(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let lower = t.to_ascii_lowercase();
    let (number, scale): (&str, fn(f64) -> f64) = if let Some(n) = lower.strip_suffix("dbm") {
        (n, dbm_to_watts)
    } else if let Some(n) = lower.strip_suffix("mw") {
        (n, |x| x * 1e-3)
    } else if let Some(n) = lower.strip_suffix('w') {
        (n, |x| x)
    } else {
        return Err(format!("`{s}` has no unit (use W, mW or dBm)"));
    };
    let x: f64 = number
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a number with a unit"))?;
    Ok(scale(x))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NoiseSection {
    None,
    /// Thermal noise over the unlicensed bandwidth, identical for both tiers.
    Thermal {
        psd_dbm_per_hz: Option<f64>,
        noise_figure_db: Option<f64>,
    },
    Explicit {
        cellular_w: f64,
        wifi_w: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalSection {
    pub incumbent_density_per_km2: Option<f64>,
    pub cellular_density_per_km2: Option<f64>,
    pub wifi_density_per_km2: Option<f64>,
    pub exclusion_radius_m: Option<f64>,
    pub wifi_range_m: Option<f64>,
    pub incumbent_power: Option<PowerSpec>,
    pub cellular_power: Option<PowerSpec>,
    pub wifi_power: Option<PowerSpec>,
    pub unlicensed_bandwidth_mhz: Option<f64>,
    pub cellular_licensed_bandwidth_mhz: Option<f64>,
    pub wifi_licensed_bandwidth_mhz: Option<f64>,
    pub alpha: Option<f64>,
    pub gamma_db: Option<f64>,
    pub noise: Option<NoiseSection>,
    pub self_interference: Option<SelfInterference>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntitySection {
    pub name: Option<String>,
    pub cellular_share: Option<f64>,
    pub wifi_share: Option<f64>,
    pub cellular_threshold_mbps: Option<f64>,
    pub wifi_threshold_mbps: Option<f64>,
    pub cellular_weight: Option<f64>,
    pub wifi_weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSection {
    pub grid_step: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_activations: Option<usize>,
    pub seed: Option<u64>,
    pub burn_in_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    pub realizations: Option<usize>,
    pub window_radius_m: Option<f64>,
    pub seed: Option<u64>,
    pub wifi_association: Option<WifiAssociation>,
    pub gamma_db: Option<String>,
    pub delta_c: Option<f64>,
    pub delta_w: Option<f64>,
    /// Radius of the simulated deployment used by the game in `montecarlo` mode.
    pub deployment_radius_m: Option<f64>,
    pub users_per_network: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSurfaceSection {
    pub step: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareRandomSection {
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub weight_ratios: Option<Vec<f64>>,
    pub share_min: Option<f64>,
    pub share_max: Option<f64>,
    pub cellular_threshold_mbps: Option<f64>,
    pub wifi_threshold_mbps: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseStudySection {
    pub geodata: Option<PathBuf>,
    pub lat_min: Option<f64>,
    pub lat_max: Option<f64>,
    pub lon_min: Option<f64>,
    pub lon_max: Option<f64>,
    pub owner_seed: Option<u64>,
    pub users_per_network: Option<usize>,
}

/// The file as written, before defaults and unit conversion.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub mode: Option<Mode>,
    pub physical: Option<PhysicalSection>,
    #[serde(rename = "entity")]
    pub entities: Option<Vec<EntitySection>>,
    pub game: Option<GameSection>,
    pub montecarlo: Option<MonteCarloSection>,
    pub rate_surface: Option<RateSurfaceSection>,
    pub compare_random: Option<CompareRandomSection>,
    pub casestudy: Option<CaseStudySection>,
}

/// An inclusive `start:stop:step` sweep in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GammaRange {
    pub fn values(&self) -> Vec<f64> {
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl FromStr for GammaRange {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(':')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| ConfigError::Range(s.into()))?;
        match parts[..] {
            [start, stop, step] if step > 0.0 && stop >= start && start.is_finite() && stop.is_finite() => {
                Ok(Self { start, stop, step })
            }
            _ => Err(ConfigError::Range(s.into())),
        }
    }
}

impl fmt::Display for GammaRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSettings {
    pub realizations: usize,
    pub window_radius: f64,
    pub seed: u64,
    pub wifi_association: WifiAssociation,
    pub gamma_db: GammaRange,
    pub utilization: Utilization,
    pub deployment_radius: f64,
    pub users_per_network: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRandomSettings {
    pub runs: usize,
    pub seed: u64,
    pub weight_ratios: Vec<f64>,
    pub share_min: f64,
    pub share_max: f64,
    pub cellular_threshold: f64,
    pub wifi_threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseStudySettings {
    pub geodata: PathBuf,
    pub bbox: BoundingBox,
    pub owner_seed: u64,
    pub users_per_network: usize,
}

/// Everything a workflow needs, in SI-linear units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub mode: Mode,
    pub scenario: Scenario,
    pub entities: Vec<Entity>,
    pub game: GameConfig,
    pub montecarlo: MonteCarloSettings,
    pub rate_surface_step: f64,
    pub compare_random: CompareRandomSettings,
    pub casestudy: Option<CaseStudySettings>,
    /// Dotted keys that were absent and took their default.
    pub defaults_applied: Vec<String>,
    /// Values outside the commonly deployed parameter ranges.
    pub warnings: Vec<String>,
}

/// Read a scenario file, apply `key.path=value` overrides, resolve.
pub fn load_scenario(path: &Path, overrides: &[String]) -> Result<ResolvedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base_dir = path.parent().unwrap_or(Path::new("."));
    load_scenario_str(&text, overrides, base_dir)
}

/// As [`load_scenario`], from text. Relative paths inside resolve against
/// `base_dir`.
pub fn load_scenario_str(text: &str, overrides: &[String], base_dir: &Path) -> Result<ResolvedConfig, ConfigError> {
    let mut table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let file: ScenarioFile = toml::Value::Table(table)
        .try_into()
        .map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    resolve(file, base_dir)
}

/// Set `a.b.c=value` in a TOML table. Numeric segments index arrays of
/// tables. The value is parsed as TOML, else taken as a bare string.
pub fn apply_override(table: &mut toml::Table, spec: &str) -> Result<(), ConfigError> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| ConfigError::Override(spec.into()))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::Override(spec.into()));
    }
    let value = parse_override_value(raw.trim());
    let segments: Vec<&str> = key.split('.').collect();
    let mut cursor: &mut toml::Value = {
        let first = segments[0];
        if segments.len() == 1 {
            table.insert(first.to_string(), value);
            return Ok(());
        }
        table
            .entry(first.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
    };
    for (k, seg) in segments.iter().enumerate().skip(1) {
        let last = k + 1 == segments.len();
        cursor = match cursor {
            toml::Value::Table(t) => {
                if last {
                    t.insert(seg.to_string(), value);
                    return Ok(());
                }
                t.entry(seg.to_string())
                    .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            }
            toml::Value::Array(items) => {
                let idx: usize = seg.parse().map_err(|_| ConfigError::Override(spec.into()))?;
                let len = items.len();
                let slot = items
                    .get_mut(idx)
                    .ok_or_else(|| invalid(key, format!("index {idx} out of range (length {len})")))?;
                if last {
                    *slot = value;
                    return Ok(());
                }
                slot
            }
            _ => return Err(invalid(key, format!("`{seg}` is below a scalar"))),
        };
    }
    unreachable!("loop returns on the last segment")
}

fn parse_override_value(raw: &str) -> toml::Value {
    format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

struct Defaults<'a> {
    applied: &'a mut Vec<String>,
}

impl Defaults<'_> {
    fn take<T>(&mut self, value: Option<T>, key: &str, default: T) -> T {
        value.unwrap_or_else(|| {
            self.applied.push(key.to_string());
            default
        })
    }
}

fn positive(field: &str, x: f64) -> Result<f64, ConfigError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, format!("{x} must be > 0")))
    }
}

fn non_negative(field: &str, x: f64) -> Result<f64, ConfigError> {
    if x >= 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(field, format!("{x} must be >= 0")))
    }
}

fn fraction(field: &str, x: f64) -> Result<f64, ConfigError> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(invalid(field, format!("{x} must lie in [0, 1]")))
    }
}

fn density(v: Option<f64>, key: &str, default_m2: f64, d: &mut Defaults) -> Result<f64, ConfigError> {
    match v {
        Some(x) => Ok(per_km2_to_per_m2(non_negative(key, x)?)),
        None => Ok(d.take(None, key, default_m2)),
    }
}

fn power(v: Option<PowerSpec>, key: &str, default_w: f64, d: &mut Defaults) -> Result<f64, ConfigError> {
    match v {
        Some(spec) => non_negative(key, spec.watts().map_err(|r| invalid(key, r))?),
        None => Ok(d.take(None, key, default_w)),
    }
}

fn mhz(v: Option<f64>, key: &str, default_hz: f64, d: &mut Defaults) -> Result<f64, ConfigError> {
    match v {
        Some(x) => Ok(mhz_to_hz(positive(key, x)?)),
        None => Ok(d.take(None, key, default_hz)),
    }
}

const DEFAULT_REALIZATIONS: usize = 2000;
const DEFAULT_THERMAL_PSD_DBM_PER_HZ: f64 = -174.0;
const DEFAULT_NOISE_FIGURE_DB: f64 = 7.0;

fn resolve(file: ScenarioFile, base_dir: &Path) -> Result<ResolvedConfig, ConfigError> {
    let mut applied = Vec::new();
    let mut d = Defaults { applied: &mut applied };
    let base = Scenario::baseline();

    let mode = d.take(file.mode, "mode", Mode::Analytic);

    let p = file.physical.unwrap_or_default();
    let alpha = d.take(p.alpha, "physical.alpha", base.path_loss.exponent());
    let unlicensed_bandwidth = mhz(
        p.unlicensed_bandwidth_mhz,
        "physical.unlicensed_bandwidth_mhz",
        base.unlicensed_bandwidth,
        &mut d,
    )?;
    let noise = match d.take(p.noise, "physical.noise", NoiseSection::None) {
        NoiseSection::None => NoiseModel::interference_limited(),
        NoiseSection::Thermal {
            psd_dbm_per_hz,
            noise_figure_db,
        } => {
            let psd = d.take(
                psd_dbm_per_hz,
                "physical.noise.psd_dbm_per_hz",
                DEFAULT_THERMAL_PSD_DBM_PER_HZ,
            );
            let nf = d.take(
                noise_figure_db,
                "physical.noise.noise_figure_db",
                DEFAULT_NOISE_FIGURE_DB,
            );
            let n = thermal_noise_watts(unlicensed_bandwidth, psd, nf);
            NoiseModel::new(n, n).map_err(|e| invalid("physical.noise", e))?
        }
        NoiseSection::Explicit { cellular_w, wifi_w } => {
            NoiseModel::new(cellular_w, wifi_w).map_err(|e| invalid("physical.noise", e))?
        }
    };
    let scenario = Scenario {
        incumbent_density: density(
            p.incumbent_density_per_km2,
            "physical.incumbent_density_per_km2",
            base.incumbent_density,
            &mut d,
        )?,
        cellular_density: density(
            p.cellular_density_per_km2,
            "physical.cellular_density_per_km2",
            base.cellular_density,
            &mut d,
        )?,
        wifi_density: density(
            p.wifi_density_per_km2,
            "physical.wifi_density_per_km2",
            base.wifi_density,
            &mut d,
        )?,
        exclusion_radius: non_negative(
            "physical.exclusion_radius_m",
            d.take(
                p.exclusion_radius_m,
                "physical.exclusion_radius_m",
                base.exclusion_radius,
            ),
        )?,
        wifi_range: positive(
            "physical.wifi_range_m",
            d.take(p.wifi_range_m, "physical.wifi_range_m", base.wifi_range),
        )?,
        incumbent_power: power(
            p.incumbent_power,
            "physical.incumbent_power",
            base.incumbent_power,
            &mut d,
        )?,
        cellular_power: power(p.cellular_power, "physical.cellular_power", base.cellular_power, &mut d)?,
        wifi_power: power(p.wifi_power, "physical.wifi_power", base.wifi_power, &mut d)?,
        unlicensed_bandwidth,
        cellular_licensed_bandwidth: mhz(
            p.cellular_licensed_bandwidth_mhz,
            "physical.cellular_licensed_bandwidth_mhz",
            base.cellular_licensed_bandwidth,
            &mut d,
        )?,
        wifi_licensed_bandwidth: mhz(
            p.wifi_licensed_bandwidth_mhz,
            "physical.wifi_licensed_bandwidth_mhz",
            base.wifi_licensed_bandwidth,
            &mut d,
        )?,
        path_loss: PathLoss::new(alpha).map_err(|e| invalid("physical.alpha", e))?,
        noise,
        sinr_threshold: db_to_linear(d.take(p.gamma_db, "physical.gamma_db", 10.0)),
        self_interference: d.take(
            p.self_interference,
            "physical.self_interference",
            SelfInterference::default(),
        ),
    };
    scenario.validate().map_err(|e| invalid("physical", e))?;

    let entities = match file.entities {
        Some(list) if !list.is_empty() => list
            .into_iter()
            .enumerate()
            .map(|(i, e)| resolve_entity(i, e, &mut d))
            .collect::<Result<Vec<_>, _>>()?,
        _ => {
            d.take(None, "entity", ());
            vec![Entity {
                name: "sole".into(),
                cellular_share: 1.0,
                wifi_share: 1.0,
                cellular_threshold: 0.0,
                wifi_threshold: 0.0,
                cellular_weight: 1.0,
                wifi_weight: 1.0,
            }]
        }
    };
    validate_entities(&entities).map_err(|e| match e {
        GameError::InvalidEntities(reason) => invalid("entity", reason),
        other => invalid("entity", other),
    })?;

    let g = file.game.unwrap_or_default();
    let defaults = GameConfig::default();
    let game = GameConfig {
        grid_step: d.take(g.grid_step, "game.grid_step", defaults.grid_step),
        tolerance: d.take(g.tolerance, "game.tolerance", defaults.tolerance),
        max_activations: match g.max_activations {
            Some(m) => Some(m),
            None => d.take(None, "game.max_activations", None),
        },
        seed: d.take(g.seed, "game.seed", defaults.seed),
        burn_in_fraction: d.take(g.burn_in_fraction, "game.burn_in_fraction", defaults.burn_in_fraction),
    };
    game.validate(entities.len()).map_err(|e| invalid("game", e))?;

    let m = file.montecarlo.unwrap_or_default();
    let gamma_db = match m.gamma_db {
        Some(s) => s.parse::<GammaRange>()?,
        None => d.take(
            None,
            "montecarlo.gamma_db",
            GammaRange {
                start: -10.0,
                stop: 20.0,
                step: 1.0,
            },
        ),
    };
    let montecarlo = MonteCarloSettings {
        realizations: d.take(m.realizations, "montecarlo.realizations", DEFAULT_REALIZATIONS),
        window_radius: positive(
            "montecarlo.window_radius_m",
            d.take(
                m.window_radius_m,
                "montecarlo.window_radius_m",
                crate::montecarlo::McConfig::DEFAULT_WINDOW_RADIUS,
            ),
        )?,
        seed: d.take(m.seed, "montecarlo.seed", 1),
        wifi_association: d.take(
            m.wifi_association,
            "montecarlo.wifi_association",
            WifiAssociation::default(),
        ),
        gamma_db,
        utilization: Utilization {
            cellular: fraction("montecarlo.delta_c", d.take(m.delta_c, "montecarlo.delta_c", 0.7))?,
            wifi: fraction("montecarlo.delta_w", d.take(m.delta_w, "montecarlo.delta_w", 0.2))?,
        },
        deployment_radius: positive(
            "montecarlo.deployment_radius_m",
            d.take(m.deployment_radius_m, "montecarlo.deployment_radius_m", 1000.0),
        )?,
        users_per_network: d.take(m.users_per_network, "montecarlo.users_per_network", 64),
    };
    if montecarlo.realizations == 0 {
        return Err(invalid("montecarlo.realizations", "must be >= 1"));
    }
    if montecarlo.users_per_network == 0 {
        return Err(invalid("montecarlo.users_per_network", "must be >= 1"));
    }

    let rs = file.rate_surface.unwrap_or_default();
    let rate_surface_step = d.take(rs.step, "rate_surface.step", 0.1);
    crate::game::ActionGrid::new(rate_surface_step).map_err(|e| invalid("rate_surface.step", e))?;

    let c = file.compare_random.unwrap_or_default();
    let compare_random = CompareRandomSettings {
        runs: d.take(c.runs, "compare_random.runs", 30),
        seed: d.take(c.seed, "compare_random.seed", 1),
        weight_ratios: d.take(c.weight_ratios, "compare_random.weight_ratios", vec![5.0, 6.0, 7.0]),
        share_min: d.take(c.share_min, "compare_random.share_min", 0.1),
        share_max: d.take(c.share_max, "compare_random.share_max", 0.9),
        cellular_threshold: mbps_to_bps(d.take(
            c.cellular_threshold_mbps,
            "compare_random.cellular_threshold_mbps",
            30.0,
        )),
        wifi_threshold: mbps_to_bps(d.take(c.wifi_threshold_mbps, "compare_random.wifi_threshold_mbps", 100.0)),
    };
    if compare_random.runs == 0 {
        return Err(invalid("compare_random.runs", "must be >= 1"));
    }
    if compare_random.weight_ratios.is_empty() || compare_random.weight_ratios.iter().any(|r| !(*r > 0.0)) {
        return Err(invalid(
            "compare_random.weight_ratios",
            "must be a non-empty list of positive ratios",
        ));
    }
    if !(0.0 < compare_random.share_min
        && compare_random.share_min <= compare_random.share_max
        && compare_random.share_max < 1.0)
    {
        return Err(invalid("compare_random", "need 0 < share_min <= share_max < 1"));
    }

    let casestudy = match file.casestudy {
        Some(cs) => {
            let geodata = cs.geodata.ok_or_else(|| invalid("casestudy.geodata", "is required"))?;
            let bbox = BoundingBox {
                lat_min: d.take(cs.lat_min, "casestudy.lat_min", 55.85),
                lat_max: d.take(cs.lat_max, "casestudy.lat_max", 55.867),
                lon_min: d.take(cs.lon_min, "casestudy.lon_min", -4.29),
                lon_max: d.take(cs.lon_max, "casestudy.lon_max", -4.265),
            };
            bbox.validate().map_err(|r| invalid("casestudy", r))?;
            let users = d.take(cs.users_per_network, "casestudy.users_per_network", 64);
            if users == 0 {
                return Err(invalid("casestudy.users_per_network", "must be >= 1"));
            }
            Some(CaseStudySettings {
                geodata: if geodata.is_absolute() {
                    geodata
                } else {
                    base_dir.join(geodata)
                },
                bbox,
                owner_seed: d.take(cs.owner_seed, "casestudy.owner_seed", 1),
                users_per_network: users,
            })
        }
        None => None,
    };
    if mode == Mode::Casestudy && casestudy.is_none() {
        return Err(invalid("casestudy", "mode = \"casestudy\" needs a [casestudy] section"));
    }

    let warnings = range_warnings(&scenario);
    for w in &warnings {
        warn!("{w}");
    }
    Ok(ResolvedConfig {
        mode,
        scenario,
        entities,
        game,
        montecarlo,
        rate_surface_step,
        compare_random,
        casestudy,
        defaults_applied: applied,
        warnings,
    })
}

fn resolve_entity(i: usize, e: EntitySection, d: &mut Defaults) -> Result<Entity, ConfigError> {
    let key = |k: &str| format!("entity.{i}.{k}");
    let cellular_share = fraction(
        &key("cellular_share"),
        d.take(e.cellular_share, &key("cellular_share"), 0.0),
    )?;
    let wifi_share = fraction(&key("wifi_share"), d.take(e.wifi_share, &key("wifi_share"), 0.0))?;
    Ok(Entity {
        name: d.take(e.name, &key("name"), format!("entity-{i}")),
        cellular_share,
        wifi_share,
        cellular_threshold: mbps_to_bps(non_negative(
            &key("cellular_threshold_mbps"),
            d.take(e.cellular_threshold_mbps, &key("cellular_threshold_mbps"), 0.0),
        )?),
        wifi_threshold: mbps_to_bps(non_negative(
            &key("wifi_threshold_mbps"),
            d.take(e.wifi_threshold_mbps, &key("wifi_threshold_mbps"), 0.0),
        )?),
        cellular_weight: d.take(e.cellular_weight, &key("cellular_weight"), 1.0),
        wifi_weight: d.take(e.wifi_weight, &key("wifi_weight"), 1.0),
    })
}

const UNLICENSED_BANDWIDTHS_MHZ: [f64; 5] = [40.0, 80.0, 160.0, 240.0, 320.0];
const CELLULAR_LICENSED_BANDWIDTHS_MHZ: [f64; 4] = [20.0, 40.0, 80.0, 100.0];
const WIFI_LICENSED_BANDWIDTHS_MHZ: [f64; 4] = [20.0, 40.0, 80.0, 160.0];
const MAX_INCUMBENT_POWER_DBM: f64 = 30.0;
const MAX_NODE_POWER_DBM: f64 = 36.0;

/// Warnings for values outside the customary deployment ranges. These never
/// reject a file.
pub fn range_warnings(sc: &Scenario) -> Vec<String> {
    let mut out = Vec::new();
    let allowed = |hz: f64, set: &[f64]| set.iter().any(|&m| (mhz_to_hz(m) - hz).abs() < 1.0);
    for (name, hz, set) in [
        (
            "unlicensed bandwidth",
            sc.unlicensed_bandwidth,
            &UNLICENSED_BANDWIDTHS_MHZ[..],
        ),
        (
            "cellular licensed bandwidth",
            sc.cellular_licensed_bandwidth,
            &CELLULAR_LICENSED_BANDWIDTHS_MHZ[..],
        ),
        (
            "wifi licensed bandwidth",
            sc.wifi_licensed_bandwidth,
            &WIFI_LICENSED_BANDWIDTHS_MHZ[..],
        ),
    ] {
        if !allowed(hz, set) {
            out.push(format!("{name} {} MHz is not one of {set:?} MHz", hz * 1e-6));
        }
    }
    for (name, w, cap) in [
        ("incumbent power", sc.incumbent_power, MAX_INCUMBENT_POWER_DBM),
        ("cellular power", sc.cellular_power, MAX_NODE_POWER_DBM),
        ("wifi power", sc.wifi_power, MAX_NODE_POWER_DBM),
    ] {
        if w > 0.0 && watts_to_dbm(w) > cap + 1e-9 {
            out.push(format!("{name} {:.2} dBm exceeds {cap} dBm", watts_to_dbm(w)));
        }
    }
    out
}

#[cfg(test)]
mod tests;
