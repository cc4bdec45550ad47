//! End-to-end computations shared by the command line, the examples and the
//! acceptance suite: coverage curves, rate surfaces, game runs, the random
//! baseline comparison and the geodata case study.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{AnalyticError, AnalyticModel, Rates, Scenario, Utilization};
use crate::game::{
    empirical_mixed_strategy, mean_rates, payoff, profile_rates, qos_indicator, random_strategy, run_dbra,
    AnalyticRates, EmpiricalRates, Entity, Environment, GameConfig, GameError, GameRun, GameTrace, MixedStrategy,
    Outcome, RateModel, SERVED_TIERS,
};
use crate::geometry::{
    partition_entities, sample_ppp, Band, Deployment, ExclusionZones, GeometryError, Point, Tier, Window,
};
use crate::montecarlo::{simulate_coverage, CoverageEstimate, EmpiricalNetwork, McConfig, McError, Rect};
use crate::rng::SeedTree;
use crate::scenario_io::{load_geodata, ConfigError, Mode, ResolvedConfig, ResultTable, Value};
use crate::units::db_to_linear;

#[derive(Debug, Error)]
pub enum WorkflowError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    MonteCarlo(#[from] McError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub const TIER_BANDS: [(Tier, Band); 4] = [
    (Tier::Cellular, Band::Licensed),
    (Tier::Cellular, Band::Unlicensed),
    (Tier::Wifi, Band::Licensed),
    (Tier::Wifi, Band::Unlicensed),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveragePoint {
    pub tier: Tier,
    pub band: Band,
    pub gamma_db: f64,
    pub analytic: f64,
    pub simulated: Option<CoverageEstimate>,
}

impl CoveragePoint {
    pub fn inside_ci(&self) -> Option<bool> {
        self.simulated.map(|e| e.contains(self.analytic))
    }
}

/// Analytic coverage of all four tier/band combinations on `gamma_db`,
/// with Monte Carlo estimates when `mc` is given (its own threshold list is
/// replaced by `gamma_db`).
pub fn coverage_curves(
    scenario: &Scenario,
    util: Utilization,
    gamma_db: &[f64],
    mc: Option<&McConfig>,
) -> Result<Vec<CoveragePoint>, WorkflowError> {
    let mut out = Vec::new();
    for (tier, band) in TIER_BANDS {
        let simulated = match mc {
            Some(m) => {
                let m = McConfig {
                    gamma_db: gamma_db.to_vec(),
                    ..m.clone()
                };
                Some(simulate_coverage(scenario, tier, band, util, &m)?)
            }
            None => None,
        };
        for (k, &db) in gamma_db.iter().enumerate() {
            let model = AnalyticModel::new(&(*scenario).with_threshold(db_to_linear(db)))?;
            out.push(CoveragePoint {
                tier,
                band,
                gamma_db: db,
                analytic: model.coverage(tier, band, util)?,
                simulated: simulated.as_ref().map(|s| s[k]),
            });
        }
    }
    Ok(out)
}

pub fn coverage_table(points: &[CoveragePoint]) -> ResultTable {
    let mut t = ResultTable::new([
        "gamma_db",
        "tier",
        "band",
        "analytic",
        "p_hat",
        "ci99",
        "ci_low",
        "ci_high",
        "n",
        "inside_ci",
    ]);
    for p in points {
        let (p_hat, ci99, lo, hi, n, inside) = match p.simulated {
            Some(e) => (
                Value::from(e.p_hat),
                Value::from(e.ci99),
                Value::from(e.ci_low),
                Value::from(e.ci_high),
                Value::from(e.n),
                Value::from(if e.contains(p.analytic) { "yes" } else { "no" }),
            ),
            None => ("".into(), "".into(), "".into(), "".into(), "".into(), "".into()),
        };
        t.push(vec![
            p.gamma_db.into(),
            p.tier.label().into(),
            p.band.label().into(),
            p.analytic.into(),
            p_hat,
            ci99,
            lo,
            hi,
            n,
            inside,
        ]);
    }
    t
}

/// Network-wide datarates over a `(δ_c, δ_w)` grid, seen by one entity that
/// owns every node (its own fractions equal the aggregate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSurface {
    pub deltas: Vec<f64>,
    /// `cellular[c][w]`, bit/s.
    pub cellular: Vec<Vec<f64>>,
    pub wifi: Vec<Vec<f64>>,
}

impl RateSurface {
    /// `(δ_c, δ_w)` of the largest cellular rate. Ties go to the first in
    /// lexicographic order.
    pub fn cellular_argmax(&self) -> (f64, f64) {
        let (c, w) = argmax2(&self.cellular);
        (self.deltas[c], self.deltas[w])
    }

    pub fn wifi_argmax(&self) -> (f64, f64) {
        let (c, w) = argmax2(&self.wifi);
        (self.deltas[c], self.deltas[w])
    }

    /// For each δ_w, the δ_c maximizing the cellular rate.
    pub fn cellular_best_delta_c(&self) -> Vec<f64> {
        (0..self.deltas.len())
            .map(|w| {
                let col: Vec<f64> = self.cellular.iter().map(|row| row[w]).collect();
                self.deltas[argmax(&col)]
            })
            .collect()
    }

    /// For each δ_c, the δ_w maximizing the WiFi rate.
    pub fn wifi_best_delta_w(&self) -> Vec<f64> {
        self.wifi.iter().map(|row| self.deltas[argmax(row)]).collect()
    }

    pub fn table(&self) -> ResultTable {
        let mut t = ResultTable::new(["delta_c", "delta_w", "rate_c", "rate_w"]);
        for (c, &dc) in self.deltas.iter().enumerate() {
            for (w, &dw) in self.deltas.iter().enumerate() {
                t.push(vec![
                    dc.into(),
                    dw.into(),
                    self.cellular[c][w].into(),
                    self.wifi[c][w].into(),
                ]);
            }
        }
        t
    }
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

fn argmax2(m: &[Vec<f64>]) -> (usize, usize) {
    let mut best = (0, 0);
    for (c, row) in m.iter().enumerate() {
        for (w, &x) in row.iter().enumerate() {
            if x > m[best.0][best.1] {
                best = (c, w);
            }
        }
    }
    best
}

pub fn rate_surface(scenario: &Scenario, step: f64) -> Result<RateSurface, WorkflowError> {
    let grid = crate::game::ActionGrid::new(step)?;
    let model = AnalyticModel::new(scenario)?;
    let deltas: Vec<f64> = grid.values().collect();
    let mut cellular = Vec::with_capacity(deltas.len());
    let mut wifi = Vec::with_capacity(deltas.len());
    for &dc in &deltas {
        let mut rc = Vec::with_capacity(deltas.len());
        let mut rw = Vec::with_capacity(deltas.len());
        for &dw in &deltas {
            let util = Utilization { cellular: dc, wifi: dw };
            rc.push(model.datarate(Tier::Cellular, util, dc)?);
            rw.push(model.datarate(Tier::Wifi, util, dw)?);
        }
        cellular.push(rc);
        wifi.push(rw);
    }
    Ok(RateSurface { deltas, cellular, wifi })
}

/// The rate model selected by a configuration's mode.
#[derive(Debug)]
pub enum RateBackend {
    Analytic(AnalyticRates),
    Empirical(EmpiricalRates),
}

impl RateModel for RateBackend {
    fn rates(&self, env: &Environment<'_>, candidate: crate::game::Action) -> Result<Rates, GameError> {
        match self {
            RateBackend::Analytic(m) => m.rates(env, candidate),
            RateBackend::Empirical(m) => m.rates(env, candidate),
        }
    }
}

fn shares(entities: &[Entity]) -> Vec<(f64, f64)> {
    entities.iter().map(|e| (e.cellular_share, e.wifi_share)).collect()
}

/// One random deployment on a disk of `radius`, owners drawn by share.
pub fn synthetic_network(
    scenario: &Scenario,
    entities: &[Entity],
    radius: f64,
    tree: &SeedTree,
) -> Result<EmpiricalNetwork, WorkflowError> {
    let window = Window::new(radius)?;
    let cellular: Vec<f64> = entities.iter().map(|e| e.cellular_share).collect();
    let wifi: Vec<f64> = entities.iter().map(|e| e.wifi_share).collect();
    let incumbents = sample_ppp(
        scenario.incumbent_density,
        &window.inflated(scenario.exclusion_radius),
        Tier::Incumbent,
        &mut tree.stream("incumbents"),
    )?;
    let zones = ExclusionZones::around_incumbents(&incumbents, scenario.exclusion_radius)?;
    let bs = sample_ppp(
        scenario.cellular_density,
        &window,
        Tier::Cellular,
        &mut tree.stream("base-stations"),
    )?;
    let ap = sample_ppp(
        scenario.wifi_density,
        &window,
        Tier::Wifi,
        &mut tree.stream("access-points"),
    )?;
    let mut deployment = partition_entities(&bs, &cellular, &mut tree.stream("bs-owners"))?;
    deployment.extend(partition_entities(&ap, &wifi, &mut tree.stream("ap-owners"))?);
    deployment.extend(incumbents.filtered(|n| window.contains(&n.pos)));
    let region = Rect::centered(radius / std::f64::consts::SQRT_2);
    Ok(EmpiricalNetwork::new(
        &deployment,
        &zones,
        entities.len(),
        region,
        tree,
    )?)
}

/// The geodata deployment of a case-study configuration.
pub fn casestudy_network(cfg: &ResolvedConfig) -> Result<(EmpiricalNetwork, Deployment), WorkflowError> {
    let cs = cfg.casestudy.as_ref().ok_or_else(|| ConfigError::Invalid {
        field: "casestudy".into(),
        reason: "section missing".into(),
    })?;
    let geo = load_geodata(
        &cs.geodata,
        &cs.bbox,
        &shares(&cfg.entities),
        cfg.scenario.exclusion_radius,
        cs.owner_seed,
    )?;
    let served: Vec<Point> = geo
        .deployment
        .iter()
        .filter(|n| n.tier != Tier::Incumbent)
        .map(|n| n.pos)
        .collect();
    let region = Rect::bounding(served).expect("geodata has served nodes");
    let tree = SeedTree::new(cs.owner_seed).child("casestudy", 0);
    let net = EmpiricalNetwork::new(&geo.deployment, &geo.zones, cfg.entities.len(), region, &tree)?;
    Ok((net, geo.deployment))
}

pub fn rate_backend(cfg: &ResolvedConfig) -> Result<RateBackend, WorkflowError> {
    let users_root = SeedTree::new(cfg.game.seed).child("users", 0);
    let backend = match cfg.mode {
        Mode::Analytic => RateBackend::Analytic(AnalyticRates::new(&cfg.scenario)?),
        Mode::Montecarlo => {
            let tree = SeedTree::new(cfg.montecarlo.seed).child("deployment", 0);
            let net = synthetic_network(&cfg.scenario, &cfg.entities, cfg.montecarlo.deployment_radius, &tree)?;
            RateBackend::Empirical(EmpiricalRates::new(
                net,
                cfg.scenario,
                cfg.montecarlo.users_per_network,
                users_root,
            ))
        }
        Mode::Casestudy => {
            let (net, _) = casestudy_network(cfg)?;
            let users = cfg.casestudy.as_ref().map_or(64, |c| c.users_per_network);
            RateBackend::Empirical(EmpiricalRates::new(net, cfg.scenario, users, users_root))
        }
    };
    if let RateBackend::Empirical(m) = &backend {
        m.check_entities(&cfg.entities)?;
    }
    Ok(backend)
}

/// A finished game with the statistics that summarize it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameReport {
    pub entities: Vec<Entity>,
    pub run: GameRun,
    pub burn_in: usize,
    /// Equilibrium rates when converged, else post-burn-in means.
    pub rates: Vec<Rates>,
    pub thresholds_met: Vec<bool>,
    /// Post-burn-in play frequencies, or point masses on the equilibrium.
    pub mixed: Vec<MixedStrategy>,
}

impl GameReport {
    pub fn converged(&self) -> bool {
        self.run.outcome.is_converged()
    }

    pub fn all_thresholds_met(&self) -> bool {
        self.thresholds_met.iter().all(|&m| m)
    }
}

pub fn summarize(entities: &[Entity], run: GameRun, burn_in_fraction: f64) -> Result<GameReport, WorkflowError> {
    let burn_in = (burn_in_fraction * run.trace.len() as f64).floor() as usize;
    let (rates, mixed) = match &run.outcome {
        Outcome::Converged { profile, .. } => (
            run.trace.records.last().map(|r| r.rates.clone()).unwrap_or_default(),
            profile
                .iter()
                .map(|&a| MixedStrategy {
                    support: vec![(a, 1.0)],
                })
                .collect(),
        ),
        Outcome::NonTerminated { .. } => (
            mean_rates(&run.trace, burn_in)?,
            empirical_mixed_strategy(&run.trace, burn_in)?,
        ),
    };
    let thresholds_met = entities.iter().zip(&rates).map(|(e, r)| qos_indicator(e, r)).collect();
    Ok(GameReport {
        entities: entities.to_vec(),
        run,
        burn_in,
        rates,
        thresholds_met,
        mixed,
    })
}

pub fn play(cfg: &ResolvedConfig) -> Result<GameReport, WorkflowError> {
    let backend = rate_backend(cfg)?;
    play_with(&cfg.entities, &backend, &cfg.game)
}

pub fn play_with<M: RateModel + ?Sized>(
    entities: &[Entity],
    model: &M,
    game: &GameConfig,
) -> Result<GameReport, WorkflowError> {
    let run = run_dbra(entities, model, game)?;
    summarize(entities, run, game.burn_in_fraction)
}

/// One row per activation, from the actor's point of view.
pub fn trace_table(trace: &GameTrace) -> ResultTable {
    let mut t = ResultTable::new([
        "activation",
        "actor",
        "delta_c_i",
        "delta_w_i",
        "payoff",
        "rate_c",
        "rate_w",
        "agg_delta_c",
        "agg_delta_w",
    ]);
    for r in &trace.records {
        let rates = r.rates[r.actor];
        t.push(vec![
            r.activation.into(),
            r.actor.into(),
            r.action.cellular.into(),
            r.action.wifi.into(),
            r.payoff.into(),
            rates.cellular.into(),
            rates.wifi.into(),
            r.aggregate.cellular.into(),
            r.aggregate.wifi.into(),
        ]);
    }
    t
}

pub fn mixed_strategy_table(entities: &[Entity], mixed: &[MixedStrategy]) -> ResultTable {
    let mut t = ResultTable::new(["entity", "name", "delta_c", "delta_w", "probability"]);
    for (i, (e, m)) in entities.iter().zip(mixed).enumerate() {
        for (a, p) in &m.support {
            t.push(vec![
                i.into(),
                e.name.as_str().into(),
                a.cellular.into(),
                a.wifi.into(),
                (*p).into(),
            ]);
        }
    }
    t
}

pub fn rates_table(report: &GameReport) -> ResultTable {
    let mut t = ResultTable::new([
        "entity",
        "name",
        "rate_c",
        "rate_w",
        "threshold_c",
        "threshold_w",
        "thresholds_met",
        "payoff",
    ]);
    for (i, ((e, r), met)) in report
        .entities
        .iter()
        .zip(&report.rates)
        .zip(&report.thresholds_met)
        .enumerate()
    {
        t.push(vec![
            i.into(),
            e.name.as_str().into(),
            r.cellular.into(),
            r.wifi.into(),
            e.cellular_threshold.into(),
            e.wifi_threshold.into(),
            (if *met { "yes" } else { "no" }).into(),
            payoff(e, r).into(),
        ]);
    }
    t
}

/// JSON digest of a game: outcome, equilibrium or mixed strategies, rates.
pub fn game_summary(report: &GameReport) -> serde_json::Value {
    let entities: Vec<serde_json::Value> = report
        .entities
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut v = serde_json::json!({
                "name": e.name,
                "rate_c": report.rates[i].cellular,
                "rate_w": report.rates[i].wifi,
                "thresholds_met": report.thresholds_met[i],
            });
            match &report.run.outcome {
                Outcome::Converged { profile, .. } => {
                    v["action"] = serde_json::json!({"delta_c": profile[i].cellular, "delta_w": profile[i].wifi});
                }
                Outcome::NonTerminated { .. } => {
                    v["mixed_strategy"] = report.mixed[i]
                        .support
                        .iter()
                        .map(|(a, p)| serde_json::json!({"delta_c": a.cellular, "delta_w": a.wifi, "probability": p}))
                        .collect();
                }
            }
            v
        })
        .collect();
    serde_json::json!({
        "outcome": report.run.outcome,
        "activations": report.run.trace.len(),
        "burn_in": report.burn_in,
        "entities": entities,
    })
}

/// One paired best-response / random run of the two-entity comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRun {
    pub run: usize,
    pub weight_ratio: f64,
    pub shares: Vec<(f64, f64)>,
    pub converged: bool,
    pub dbra: Vec<Rates>,
    pub random: Vec<Rates>,
}

/// Entity-averaged tier rates.
fn entity_average(rates: &[Rates]) -> Rates {
    let n = rates.len() as f64;
    Rates {
        cellular: rates.iter().map(|r| r.cellular).sum::<f64>() / n,
        wifi: rates.iter().map(|r| r.wifi).sum::<f64>() / n,
    }
}

impl ComparisonRun {
    pub fn dbra_mean(&self) -> Rates {
        entity_average(&self.dbra)
    }

    pub fn random_mean(&self) -> Rates {
        entity_average(&self.random)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub runs: Vec<ComparisonRun>,
}

impl Comparison {
    pub fn dbra_mean(&self) -> Rates {
        entity_average(&self.runs.iter().map(ComparisonRun::dbra_mean).collect::<Vec<_>>())
    }

    pub fn random_mean(&self) -> Rates {
        entity_average(&self.runs.iter().map(ComparisonRun::random_mean).collect::<Vec<_>>())
    }

    /// Relative gain of best-response play over random utilization per tier.
    pub fn improvement(&self) -> Rates {
        let (d, r) = (self.dbra_mean(), self.random_mean());
        Rates {
            cellular: d.cellular / r.cellular - 1.0,
            wifi: d.wifi / r.wifi - 1.0,
        }
    }

    pub fn table(&self) -> ResultTable {
        let mut t = ResultTable::new([
            "run",
            "weight_ratio",
            "v_c_1",
            "v_w_1",
            "converged",
            "dbra_rate_c",
            "dbra_rate_w",
            "random_rate_c",
            "random_rate_w",
        ]);
        for r in &self.runs {
            let (d, x) = (r.dbra_mean(), r.random_mean());
            t.push(vec![
                r.run.into(),
                r.weight_ratio.into(),
                r.shares[0].0.into(),
                r.shares[0].1.into(),
                (if r.converged { "yes" } else { "no" }).into(),
                d.cellular.into(),
                d.wifi.into(),
                x.cellular.into(),
                x.wifi.into(),
            ]);
        }
        t
    }
}

/// Two entities with shares drawn from `[share_min, share_max]` per run,
/// weight ratios cycled from the list. Each run plays the game and draws one
/// random profile, both evaluated on the analytic model.
pub fn compare_random(
    scenario: &Scenario,
    settings: &crate::scenario_io::CompareRandomSettings,
    game: &GameConfig,
) -> Result<Comparison, WorkflowError> {
    let model = AnalyticRates::new(scenario)?;
    let root = SeedTree::new(settings.seed);
    let mut runs = Vec::with_capacity(settings.runs);
    for k in 0..settings.runs {
        let tree = root.child("comparison-run", k as u64);
        let mut share_rng = tree.stream("shares");
        let vc = share_rng.random_range(settings.share_min..=settings.share_max);
        let vw = share_rng.random_range(settings.share_min..=settings.share_max);
        let ratio = settings.weight_ratios[k % settings.weight_ratios.len()];
        let entity = |name: &str, c: f64, w: f64| Entity {
            name: name.into(),
            cellular_share: c,
            wifi_share: w,
            cellular_threshold: settings.cellular_threshold,
            wifi_threshold: settings.wifi_threshold,
            cellular_weight: ratio,
            wifi_weight: 1.0,
        };
        let entities = vec![entity("first", vc, vw), entity("second", 1.0 - vc, 1.0 - vw)];
        let cfg = GameConfig {
            seed: tree.stream("game-seed").random(),
            ..game.clone()
        };
        let report = play_with(&entities, &model, &cfg)?;
        let random_profile = random_strategy(entities.len(), &mut tree.stream("random"));
        let random = profile_rates(&model, &entities, &random_profile, 0)?;
        runs.push(ComparisonRun {
            run: k,
            weight_ratio: ratio,
            shares: vec![(vc, vw), (1.0 - vc, 1.0 - vw)],
            converged: report.converged(),
            dbra: report.rates,
            random,
        });
    }
    Ok(Comparison { runs })
}

/// Every tier an entity owns reaches a positive rate.
pub fn all_rates_positive(report: &GameReport) -> bool {
    report
        .entities
        .iter()
        .zip(&report.rates)
        .all(|(e, r)| SERVED_TIERS.iter().all(|&t| !e.owns(t) || r.of(t) > 0.0))
}

/// One closed-form self-check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

/// Closed forms the model must reproduce: ζ at α = 4 against
/// `½√γ·atan√γ`, interference-limited licensed cellular coverage against
/// `1/(1 + m·ζ)` for the configured self-interference multiplier `m`, the
/// WiFi closed form against quadrature, and the exclusion-zone retention.
pub fn self_checks(scenario: &Scenario) -> Result<Vec<Check>, WorkflowError> {
    use crate::analytic::{wifi_closed_form, zeta};
    use crate::quadrature::{integrate, Tolerance};

    let mut checks = Vec::new();
    let quarter_closed = |g: f64| 0.5 * g.sqrt() * g.sqrt().atan();
    for g in [0.1, 1.0, 10.0, 100.0] {
        checks.push(Check {
            name: format!("zeta({g}, 4)"),
            value: zeta(g, 4.0)?,
            expected: quarter_closed(g),
            tolerance: 1e-9 * quarter_closed(g).max(1.0),
        });
    }

    let mut quiet = *scenario;
    quiet.noise = crate::radio::NoiseModel::interference_limited();
    let m = quiet.self_interference.zeta_multiplier();
    let util = Utilization {
        cellular: 0.7,
        wifi: 0.2,
    };
    for db in (-10..=20).step_by(5) {
        let sc = quiet.with_threshold(db_to_linear(f64::from(db)));
        let model = AnalyticModel::new(&sc)?;
        checks.push(Check {
            name: format!("licensed cellular coverage at {db} dB, no noise"),
            value: model.cellular_licensed(util)?,
            expected: 1.0 / (1.0 + m * zeta(sc.sinr_threshold, sc.alpha())?),
            tolerance: 1e-9,
        });
    }

    let range = quiet.wifi_range;
    for c in [1e-5, 1e-4, 1e-3] {
        let direct = integrate(|u| (-c * u).exp(), 0.0, range * range, Tolerance::relative(1e-12))
            .map_err(AnalyticError::from)?
            .value
            / (range * range);
        checks.push(Check {
            name: format!("wifi closed form, c = {c}"),
            value: wifi_closed_form(c, range),
            expected: direct,
            tolerance: 1e-9,
        });
    }

    let retention = (-std::f64::consts::PI * quiet.incumbent_density * quiet.exclusion_radius.powi(2)).exp();
    checks.push(Check {
        name: "exclusion-zone retention".into(),
        value: quiet.retention(),
        expected: retention,
        tolerance: 1e-12,
    });
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario_io::load_scenario_str;
    use std::path::Path;

    #[test]
    fn self_checks_pass_on_the_baseline() {
        for sc in [
            Scenario::baseline(),
            Scenario {
                self_interference: crate::analytic::SelfInterference::Halved,
                ..Scenario::baseline()
            },
        ] {
            let checks = self_checks(&sc).unwrap();
            assert!(checks.len() > 10);
            for c in checks {
                assert!(c.passed(), "{c:?}");
            }
        }
    }

    #[test]
    fn coverage_without_simulation_has_empty_mc_columns() {
        let sc = Scenario::baseline();
        let pts = coverage_curves(
            &sc,
            Utilization {
                cellular: 0.7,
                wifi: 0.2,
            },
            &[0.0, 10.0],
            None,
        )
        .unwrap();
        assert_eq!(pts.len(), 8);
        assert!(pts
            .iter()
            .all(|p| p.simulated.is_none() && (0.0..=1.0).contains(&p.analytic)));
        let t = coverage_table(&pts);
        assert_eq!(t.len(), 8);
        assert_eq!(t.columns()[0], "gamma_db");
    }

    #[test]
    fn rate_surface_matches_direct_evaluation() {
        let sc = Scenario::baseline();
        let s = rate_surface(&sc, 0.5).unwrap();
        assert_eq!(s.deltas, vec![0.0, 0.5, 1.0]);
        let model = AnalyticModel::new(&sc).unwrap();
        let direct = model
            .datarate(
                Tier::Wifi,
                Utilization {
                    cellular: 1.0,
                    wifi: 0.5,
                },
                0.5,
            )
            .unwrap();
        assert_eq!(s.wifi[2][1], direct);
        assert_eq!(s.table().len(), 9);
    }

    #[test]
    fn synthetic_game_runs_on_the_empirical_backend() {
        let text = r#"
            mode = "montecarlo"
            [montecarlo]
            deployment_radius_m = 400
            users_per_network = 8
            seed = 3
            [game]
            max_activations = 6
            seed = 2
            [[entity]]
            cellular_share = 0.5
            wifi_share = 0.5
            [[entity]]
            cellular_share = 0.5
            wifi_share = 0.5
        "#;
        let cfg = load_scenario_str(text, &[], Path::new(".")).unwrap();
        let a = play(&cfg).unwrap();
        let b = play(&cfg).unwrap();
        assert_eq!(a.run, b.run);
        assert!(a.run.trace.len() <= 6);
        assert_eq!(trace_table(&a.run.trace).len(), a.run.trace.len());
    }

    #[test]
    fn comparison_is_deterministic() {
        let settings = crate::scenario_io::CompareRandomSettings {
            runs: 3,
            seed: 4,
            weight_ratios: vec![5.0, 7.0],
            share_min: 0.1,
            share_max: 0.9,
            cellular_threshold: 30e6,
            wifi_threshold: 100e6,
        };
        let game = GameConfig {
            max_activations: Some(50),
            ..GameConfig::default()
        };
        let a = compare_random(&Scenario::baseline(), &settings, &game).unwrap();
        let b = compare_random(&Scenario::baseline(), &settings, &game).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.runs[1].weight_ratio, 7.0);
        assert_eq!(a.table().len(), 3);
        assert!(a
            .runs
            .iter()
            .all(|r| r.random.iter().all(|x| x.cellular > 0.0 && x.wifi > 0.0)));
    }
}
