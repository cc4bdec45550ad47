//! Simulation oracle for the coverage expressions, and the empirical
//! datarate evaluator that runs on concrete (e.g. real-world) deployments.

mod empirical;

pub use empirical::{simulate_datarate_empirical, EmpiricalNetwork, Rect, Site, UserSample};

use std::sync::atomic::{AtomicUsize, Ordering};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{AnalyticError, Scenario, Utilization};
use crate::geometry::{
    assign_bands, mark_exclusion, sample_ppp, Band, Deployment, ExclusionZones, GeometryError, Tier, Window,
};
use crate::geometry::{sample_wifi_serving_distance, Node, Point};
use crate::radio::{draw_fading, sinr, RadioError, WifiAssociation};
use crate::rng::SeedTree;
use crate::units::db_to_linear;

/// Two-sided 99% standard-normal quantile.
pub const Z99: f64 = 2.575_829_303_548_901;

/// Redraws allowed per requested realization before giving up.
pub const REDRAW_BUDGET_PER_REALIZATION: usize = 100;

#[derive(Debug, Error)]
pub enum McError {
    #[error("at least one realization is required")]
    NoRealizations,
    #[error("at least one user is required")]
    NoUsers,
    #[error("no serving node found after {redraws} redraws (budget {budget})")]
    AssociationTimeout { redraws: usize, budget: usize },
    #[error("entity {entity} has a positive {tier:?} share but no such elements in the region")]
    MissingElements { entity: usize, tier: Tier },
    #[error("profile has {got} entries for {expected} entities")]
    ProfileLength { expected: usize, got: usize },
    #[error("incumbents are not served")]
    IncumbentTier,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Radio(#[from] RadioError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub realizations: usize,
    pub window: Window,
    pub seed: u64,
    pub gamma_db: Vec<f64>,
    #[serde(default)]
    pub wifi_association: WifiAssociation,
}

impl McConfig {
    pub const DEFAULT_WINDOW_RADIUS: f64 = 5_000.0;

    pub fn new(realizations: usize, seed: u64, gamma_db: Vec<f64>) -> Self {
        Self {
            realizations,
            window: Window::new(Self::DEFAULT_WINDOW_RADIUS).expect("positive radius"),
            seed,
            gamma_db,
            wifi_association: WifiAssociation::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageEstimate {
    pub gamma_db: f64,
    pub p_hat: f64,
    /// Half-width of the Wilson 99% interval.
    pub ci99: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
}

impl CoverageEstimate {
    pub fn from_counts(gamma_db: f64, successes: usize, n: usize) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, n, Z99);
        Self {
            gamma_db,
            p_hat: successes as f64 / n as f64,
            ci99: 0.5 * (ci_high - ci_low),
            ci_low,
            ci_high,
            n,
        }
    }

    pub fn contains(&self, p: f64) -> bool {
        (self.ci_low..=self.ci_high).contains(&p)
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: usize, n: usize, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// One realization of a tier's points, zone-flagged and band-tagged.
fn tier_points(
    scenario: &Scenario,
    tier: Tier,
    delta: f64,
    window: &Window,
    zones: &ExclusionZones,
    tree: &SeedTree,
) -> Result<Deployment, McError> {
    let mut pts = sample_ppp(
        scenario.density(tier),
        window,
        tier,
        &mut tree.child("points", tier as u64).rng(),
    )?;
    mark_exclusion(&mut pts, zones);
    assign_bands(&mut pts, delta, &mut tree.child("band-split", tier as u64).rng())?;
    Ok(pts)
}

/// SINR of the typical `tier` user in `band` for one realization, or `None`
/// when no serving node exists (the caller redraws).
fn typical_user_sinr(
    scenario: &Scenario,
    tier: Tier,
    band: Band,
    util: Utilization,
    mc: &McConfig,
    tree: &SeedTree,
) -> Result<Option<f64>, McError> {
    let window = &mc.window;
    let path_loss = scenario.path_loss;
    let incumbents = sample_ppp(
        scenario.incumbent_density,
        &window.inflated(scenario.exclusion_radius),
        Tier::Incumbent,
        &mut tree.stream("incumbent"),
    )?;
    let zones = ExclusionZones::around_incumbents(&incumbents, scenario.exclusion_radius)?;
    // Draw the cluster AP first: a band mismatch rejects the attempt
    // before any field is sampled.
    let cluster_ap = if tier == Tier::Wifi && mc.wifi_association == WifiAssociation::TypicalCluster {
        let mut rng = tree.stream("association");
        let r = sample_wifi_serving_distance(scenario.wifi_range, &mut rng);
        let theta = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        let mut ap = Node::new(Point::from_polar(r, theta), Tier::Wifi);
        ap.in_zone = zones.contains(&ap.pos);
        let unlicensed = !ap.in_zone && rng.random::<f64>() < util.wifi;
        ap.band = Some(if unlicensed { Band::Unlicensed } else { Band::Licensed });
        if ap.band != Some(band) {
            return Ok(None);
        }
        Some(ap)
    } else {
        None
    };
    let mut own = tier_points(scenario, tier, util.of(tier), window, &zones, tree)?;
    let in_band = |n: &&Node| n.band == Some(band);

    let serving = match tier {
        Tier::Cellular => own
            .iter()
            .enumerate()
            .filter(|(_, n)| in_band(n))
            .min_by(|a, b| a.1.pos.norm_sq().total_cmp(&b.1.pos.norm_sq()))
            .map(|(i, _)| i),
        Tier::Wifi if cluster_ap.is_some() => {
            own.push(cluster_ap.expect("checked"));
            Some(own.len() - 1)
        }
        Tier::Wifi => {
            let range_sq = scenario.wifi_range * scenario.wifi_range;
            let candidates: Vec<usize> = own
                .iter()
                .enumerate()
                .filter(|(_, n)| in_band(n) && n.pos.norm_sq() < range_sq)
                .map(|(i, _)| i)
                .collect();
            if candidates.is_empty() {
                None
            } else {
                let pick = tree.stream("association").random_range(0..candidates.len());
                Some(candidates[pick])
            }
        }
        Tier::Incumbent => return Err(McError::IncumbentTier),
    };
    let Some(serving) = serving else {
        return Ok(None);
    };

    let mut fading = tree.stream("fading");
    let received = |power: f64, dist_sq: f64, rng: &mut crate::rng::StreamRng| {
        power * draw_fading(rng) * path_loss.gain_sq(dist_sq)
    };

    let own_power = scenario.power(tier);
    let signal = received(own_power, own.nodes()[serving].pos.norm_sq(), &mut fading);
    let mut interference = 0.0;
    for (i, n) in own.iter().enumerate() {
        if i != serving && n.band == Some(band) {
            interference += received(own_power, n.pos.norm_sq(), &mut fading);
        }
    }
    if band == Band::Unlicensed {
        let other_tier = match tier {
            Tier::Cellular => Tier::Wifi,
            _ => Tier::Cellular,
        };
        let other = tier_points(scenario, other_tier, util.of(other_tier), window, &zones, tree)?;
        let other_power = scenario.power(other_tier);
        for n in other.iter().filter(|n| n.band == Some(Band::Unlicensed)) {
            interference += received(other_power, n.pos.norm_sq(), &mut fading);
        }
        for z in &incumbents {
            interference += received(scenario.incumbent_power, z.pos.norm_sq(), &mut fading);
        }
    }
    Ok(Some(sinr(signal, interference, scenario.noise.for_tier(tier))?))
}

/// Monte Carlo estimate of `P(SINR > γ)` for the typical user of `tier` in
/// `band`, on every threshold of `mc.gamma_db`.
///
/// Every realization yields one SINR sample, compared against all
/// thresholds (common random numbers). Realizations without a serving node
/// are redrawn from a fresh substream.
pub fn simulate_coverage(
    scenario: &Scenario,
    tier: Tier,
    band: Band,
    util: Utilization,
    mc: &McConfig,
) -> Result<Vec<CoverageEstimate>, McError> {
    if mc.realizations == 0 {
        return Err(McError::NoRealizations);
    }
    scenario.validate()?;
    let root = SeedTree::new(mc.seed)
        .child("coverage", tier as u64)
        .child("band", band as u64);
    let budget = REDRAW_BUDGET_PER_REALIZATION * mc.realizations;
    let redraws = AtomicUsize::new(0);

    let samples: Vec<f64> = (0..mc.realizations)
        .into_par_iter()
        .map(|i| {
            let realization = root.child("realization", i as u64);
            let mut attempt = 0u64;
            loop {
                let tree = realization.child("attempt", attempt);
                if let Some(s) = typical_user_sinr(scenario, tier, band, util, mc, &tree)? {
                    return Ok(s);
                }
                attempt += 1;
                let used = redraws.fetch_add(1, Ordering::Relaxed) + 1;
                if used > budget {
                    return Err(McError::AssociationTimeout { redraws: used, budget });
                }
            }
        })
        .collect::<Result<_, McError>>()?;

    Ok(mc
        .gamma_db
        .iter()
        .map(|&db| {
            let gamma = db_to_linear(db);
            let hits = samples.iter().filter(|&&s| s > gamma).count();
            CoverageEstimate::from_counts(db, hits, samples.len())
        })
        .collect())
}
