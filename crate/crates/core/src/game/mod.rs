//! Non-cooperative spectrum game between network entities.
//!
//! Each entity picks the fractions of its eligible cellular and WiFi nodes
//! that move to the unlicensed band. Its payoff is the preference-weighted
//! sum of its users' datarates, gated to zero unless every network it owns
//! meets its QoS threshold. Play follows a distributed best-response
//! scheme: one uniformly chosen entity per activation answers the current
//! profile with an exhaustive search over the action grid.

mod rates;

pub use rates::{AnalyticRates, EmpiricalRates};

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analytic::{AnalyticError, Rates, Utilization};
use crate::geometry::Tier;
use crate::montecarlo::McError;
use crate::rng::SeedTree;

#[derive(Debug, Error)]
pub enum GameError {
    #[error("invalid entities: {0}")]
    InvalidEntities(String),
    #[error("invalid game config: {0}")]
    InvalidConfig(String),
    #[error("trace has {len} records, nothing left after a burn-in of {burn_in}")]
    EmptyWindow { len: usize, burn_in: usize },
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    MonteCarlo(#[from] McError),
}

/// A network operator: its shares of the two tiers, QoS thresholds (bit/s)
/// and preference weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entity {
    pub name: String,
    pub cellular_share: f64,
    pub wifi_share: f64,
    pub cellular_threshold: f64,
    pub wifi_threshold: f64,
    pub cellular_weight: f64,
    pub wifi_weight: f64,
}

impl Entity {
    pub fn share(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Cellular => self.cellular_share,
            Tier::Wifi => self.wifi_share,
            Tier::Incumbent => 0.0,
        }
    }

    pub fn threshold(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Cellular => self.cellular_threshold,
            Tier::Wifi => self.wifi_threshold,
            Tier::Incumbent => 0.0,
        }
    }

    pub fn weight(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Cellular => self.cellular_weight,
            Tier::Wifi => self.wifi_weight,
            Tier::Incumbent => 0.0,
        }
    }

    pub fn owns(&self, tier: Tier) -> bool {
        self.share(tier) > 0.0
    }
}

pub const SERVED_TIERS: [Tier; 2] = [Tier::Cellular, Tier::Wifi];

pub fn validate_entities(entities: &[Entity]) -> Result<(), GameError> {
    if entities.is_empty() {
        return Err(GameError::InvalidEntities("at least one entity is required".into()));
    }
    for tier in SERVED_TIERS {
        let sum: f64 = entities.iter().map(|e| e.share(tier)).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(GameError::InvalidEntities(format!(
                "{tier:?} shares sum to {sum}, expected 1"
            )));
        }
    }
    for (i, e) in entities.iter().enumerate() {
        for tier in SERVED_TIERS {
            let (v, t, w) = (e.share(tier), e.threshold(tier), e.weight(tier));
            if !(0.0..=1.0).contains(&v) {
                return Err(GameError::InvalidEntities(format!(
                    "entity {i}: {tier:?} share {v} outside [0, 1]"
                )));
            }
            if !(t >= 0.0 && t.is_finite()) {
                return Err(GameError::InvalidEntities(format!(
                    "entity {i}: {tier:?} threshold {t} must be >= 0"
                )));
            }
            if v > 0.0 && !(w > 0.0 && w.is_finite()) {
                return Err(GameError::InvalidEntities(format!(
                    "entity {i}: {tier:?} weight {w} must be > 0"
                )));
            }
        }
    }
    Ok(())
}

/// Per-entity unlicensed fractions `(δ_c, δ_w)` of its eligible nodes.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Action {
    pub cellular: f64,
    pub wifi: f64,
}

impl Action {
    pub fn new(cellular: f64, wifi: f64) -> Self {
        Self { cellular, wifi }
    }

    pub fn of(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Cellular => self.cellular,
            Tier::Wifi => self.wifi,
            Tier::Incumbent => 0.0,
        }
    }

    pub fn distance(&self, other: &Action) -> f64 {
        (self.cellular - other.cellular).hypot(self.wifi - other.wifi)
    }
}

impl From<Action> for Utilization {
    fn from(a: Action) -> Self {
        Utilization {
            cellular: a.cellular,
            wifi: a.wifi,
        }
    }
}

/// The finite action set `{0, μ, 2μ, …, 1}²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionGrid {
    steps: u32,
}

impl ActionGrid {
    pub fn new(step: f64) -> Result<Self, GameError> {
        if !(step > 0.0 && step <= 1.0) {
            return Err(GameError::InvalidConfig(format!("grid step {step} must lie in (0, 1]")));
        }
        let steps = (1.0 / step).round();
        if (steps * step - 1.0).abs() > 1e-9 {
            return Err(GameError::InvalidConfig(format!("1/{step} is not an integer")));
        }
        Ok(Self { steps: steps as u32 })
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(move |k| self.value(k))
    }

    pub fn value(&self, k: u32) -> f64 {
        k as f64 / self.steps as f64
    }

    pub fn len(&self) -> usize {
        let side = self.steps as usize + 1;
        side * side
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// All actions, lexicographic in `(δ_c, δ_w)`.
    pub fn actions(&self) -> Vec<Action> {
        let mut out = Vec::with_capacity(self.len());
        for c in 0..=self.steps {
            for w in 0..=self.steps {
                out.push(Action::new(self.value(c), self.value(w)));
            }
        }
        out
    }

    /// Grid coordinates of an on-grid action.
    pub fn index_of(&self, action: &Action) -> Option<(u32, u32)> {
        let snap = |x: f64| {
            let k = (x * self.steps as f64).round();
            ((x * self.steps as f64 - k).abs() < 1e-6 && (0.0..=self.steps as f64).contains(&k)).then_some(k as u32)
        };
        Some((snap(action.cellular)?, snap(action.wifi)?))
    }

    pub fn random_action<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        let c = rng.random_range(0..=self.steps);
        let w = rng.random_range(0..=self.steps);
        Action::new(self.value(c), self.value(w))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub grid_step: f64,
    /// Stopping tolerance on the summed size of the latest action changes.
    pub tolerance: f64,
    /// Defaults to `500 · |E|`.
    pub max_activations: Option<usize>,
    pub seed: u64,
    /// Share of the trace discarded before mixed-strategy statistics.
    pub burn_in_fraction: f64,
}

impl Default for GameConfig {
    fn default() -> Self {
        Self {
            grid_step: 0.1,
            tolerance: 0.0,
            max_activations: None,
            seed: 1,
            burn_in_fraction: 0.2,
        }
    }
}

impl GameConfig {
    pub fn activation_budget(&self, n_entities: usize) -> usize {
        self.max_activations.unwrap_or(500 * n_entities)
    }

    pub fn validate(&self, n_entities: usize) -> Result<ActionGrid, GameError> {
        let grid = ActionGrid::new(self.grid_step)?;
        if !(self.tolerance >= 0.0) {
            return Err(GameError::InvalidConfig(format!(
                "tolerance {} must be >= 0",
                self.tolerance
            )));
        }
        if self.activation_budget(n_entities) < n_entities {
            return Err(GameError::InvalidConfig(format!(
                "max_activations {} is below the number of entities {n_entities}",
                self.activation_budget(n_entities)
            )));
        }
        if !(0.0..1.0).contains(&self.burn_in_fraction) {
            return Err(GameError::InvalidConfig(format!(
                "burn_in_fraction {} must lie in [0, 1)",
                self.burn_in_fraction
            )));
        }
        Ok(grid)
    }

    pub fn burn_in(&self, trace_len: usize) -> usize {
        (self.burn_in_fraction * trace_len as f64).floor() as usize
    }
}

/// `(Σ_j v_c^j δ_c^j, Σ_j v_w^j δ_w^j)`.
pub fn aggregate_utilization(entities: &[Entity], profile: &[Action]) -> Utilization {
    let sum = |tier: Tier| -> f64 {
        entities
            .iter()
            .zip(profile)
            .map(|(e, a)| e.share(tier) * a.of(tier))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    };
    Utilization {
        cellular: sum(Tier::Cellular),
        wifi: sum(Tier::Wifi),
    }
}

/// What the acting entity may observe: its own state and the aggregate of
/// everybody else. The individual actions of other entities stay private
/// to the engine and to the rate models (which stand in for the physical
/// network).
#[derive(Debug, Clone, Copy)]
pub struct Environment<'a> {
    entities: &'a [Entity],
    profile: &'a [Action],
    actor: usize,
    epoch: u64,
}

impl<'a> Environment<'a> {
    pub fn new(entities: &'a [Entity], profile: &'a [Action], actor: usize, epoch: u64) -> Self {
        Self {
            entities,
            profile,
            actor,
            epoch,
        }
    }

    pub fn actor(&self) -> usize {
        self.actor
    }

    pub fn entity(&self) -> &Entity {
        &self.entities[self.actor]
    }

    pub fn current_action(&self) -> Action {
        self.profile[self.actor]
    }

    /// Activation counter; rate models that sample use it to fix their draws.
    pub fn epoch(&self) -> u64 {
        self.epoch
    }

    /// Aggregate utilization contributed by all entities but the actor.
    pub fn others_aggregate(&self) -> Utilization {
        let mut u = Utilization::default();
        for (j, (e, a)) in self.entities.iter().zip(self.profile).enumerate() {
            if j != self.actor {
                u.cellular += e.cellular_share * a.cellular;
                u.wifi += e.wifi_share * a.wifi;
            }
        }
        u
    }

    /// Aggregate utilization if the actor played `candidate`.
    pub fn aggregate_with(&self, candidate: Action) -> Utilization {
        let others = self.others_aggregate();
        let e = self.entity();
        Utilization {
            cellular: (others.cellular + e.cellular_share * candidate.cellular).clamp(0.0, 1.0),
            wifi: (others.wifi + e.wifi_share * candidate.wifi).clamp(0.0, 1.0),
        }
    }

    pub(crate) fn profile_with(&self, candidate: Action) -> Vec<Action> {
        let mut p = self.profile.to_vec();
        p[self.actor] = candidate;
        p
    }
}

/// Datarates an entity would obtain from an action, given the environment.
pub trait RateModel: Sync {
    fn rates(&self, env: &Environment<'_>, candidate: Action) -> Result<Rates, GameError>;
}

/// 1 iff every owned network meets its threshold (inclusive).
pub fn qos_indicator(entity: &Entity, rates: &Rates) -> bool {
    SERVED_TIERS
        .iter()
        .all(|&t| !entity.owns(t) || rates.of(t) >= entity.threshold(t))
}

/// QoS-gated, preference-weighted rate sum over the owned networks.
pub fn payoff(entity: &Entity, rates: &Rates) -> f64 {
    if !qos_indicator(entity, rates) {
        return 0.0;
    }
    SERVED_TIERS
        .iter()
        .filter(|&&t| entity.owns(t))
        .map(|&t| entity.weight(t) * rates.of(t))
        .sum()
}

pub fn evaluate<M: RateModel + ?Sized>(
    model: &M,
    env: &Environment<'_>,
    candidate: Action,
) -> Result<(f64, Rates), GameError> {
    let rates = model.rates(env, candidate)?;
    Ok((payoff(env.entity(), &rates), rates))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestResponse {
    pub action: Action,
    pub payoff: f64,
    pub rates: Rates,
    pub evaluations: usize,
}

/// Exhaustive best response over the grid. Ties keep the current action
/// when it is among the maximizers, else the lexicographically lowest.
pub fn best_response<M: RateModel + ?Sized>(
    model: &M,
    env: &Environment<'_>,
    grid: &ActionGrid,
) -> Result<BestResponse, GameError> {
    let candidates = grid.actions();
    let scored: Vec<(f64, Rates)> = candidates
        .par_iter()
        .map(|&a| evaluate(model, env, a))
        .collect::<Result<_, _>>()?;
    let best = scored.iter().map(|s| s.0).fold(f64::NEG_INFINITY, f64::max);
    let current = env.current_action();
    let pick = candidates
        .iter()
        .position(|a| a.distance(&current) < 1e-12)
        .filter(|&k| scored[k].0 >= best)
        .or_else(|| scored.iter().position(|s| s.0 >= best))
        .expect("grid is non-empty");
    Ok(BestResponse {
        action: candidates[pick],
        payoff: scored[pick].0,
        rates: scored[pick].1,
        evaluations: candidates.len(),
    })
}

/// Uniform actor choice: the next ring among equal-rate Poisson clocks.
pub fn next_actor<R: Rng + ?Sized>(n_entities: usize, rng: &mut R) -> usize {
    rng.random_range(0..n_entities)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub activation: usize,
    pub actor: usize,
    pub action: Action,
    pub payoff: f64,
    /// Rates of every entity under the profile after this activation.
    pub rates: Vec<Rates>,
    pub profile: Vec<Action>,
    pub aggregate: Utilization,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct GameTrace {
    pub initial: Vec<Action>,
    pub records: Vec<TraceRecord>,
}

impl GameTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn final_profile(&self) -> &[Action] {
        self.records
            .last()
            .map(|r| r.profile.as_slice())
            .unwrap_or(&self.initial)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Converged { profile: Vec<Action>, activations: usize },
    NonTerminated { activations: usize },
}

impl Outcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, Outcome::Converged { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRun {
    pub trace: GameTrace,
    pub outcome: Outcome,
}

/// Rates of every entity under `profile`.
pub fn profile_rates<M: RateModel + ?Sized>(
    model: &M,
    entities: &[Entity],
    profile: &[Action],
    epoch: u64,
) -> Result<Vec<Rates>, GameError> {
    (0..entities.len())
        .map(|j| model.rates(&Environment::new(entities, profile, j, epoch), profile[j]))
        .collect()
}

/// Distributed best-response dynamics from a uniformly random grid profile.
///
/// Stops once every entity has acted since the last activation that moved
/// an action by more than the tolerance, and the latest moves of all
/// entities sum to at most the tolerance. Otherwise runs to the activation
/// budget and reports non-termination.
pub fn run_dbra<M: RateModel + ?Sized>(entities: &[Entity], model: &M, cfg: &GameConfig) -> Result<GameRun, GameError> {
    validate_entities(entities)?;
    let grid = cfg.validate(entities.len())?;
    let root = SeedTree::new(cfg.seed);
    let mut init_rng = root.stream("initial-actions");
    let initial: Vec<Action> = entities.iter().map(|_| grid.random_action(&mut init_rng)).collect();
    run_dbra_from(entities, model, cfg, &grid, initial, &root)
}

/// As [`run_dbra`], from a given starting profile.
pub fn run_dbra_from<M: RateModel + ?Sized>(
    entities: &[Entity],
    model: &M,
    cfg: &GameConfig,
    grid: &ActionGrid,
    initial: Vec<Action>,
    root: &SeedTree,
) -> Result<GameRun, GameError> {
    let n = entities.len();
    let mut actor_rng = root.stream("actor-clock");
    let mut profile = initial.clone();
    let mut latest_move = vec![0.0; n];
    let mut acted = vec![false; n];
    let mut records = Vec::new();
    let budget = cfg.activation_budget(n);

    for activation in 0..budget {
        let actor = next_actor(n, &mut actor_rng);
        let env = Environment::new(entities, &profile, actor, activation as u64);
        let br = best_response(model, &env, grid)?;
        let moved = br.action.distance(&profile[actor]);
        profile[actor] = br.action;
        latest_move[actor] = moved;
        if moved > cfg.tolerance {
            acted.iter_mut().for_each(|a| *a = false);
        }
        acted[actor] = true;

        let rates = profile_rates(model, entities, &profile, activation as u64)?;
        records.push(TraceRecord {
            activation,
            actor,
            action: br.action,
            payoff: payoff(&entities[actor], &rates[actor]),
            rates,
            profile: profile.clone(),
            aggregate: aggregate_utilization(entities, &profile),
        });

        if acted.iter().all(|&a| a) && latest_move.iter().sum::<f64>() <= cfg.tolerance {
            return Ok(GameRun {
                trace: GameTrace { initial, records },
                outcome: Outcome::Converged {
                    profile,
                    activations: activation + 1,
                },
            });
        }
    }
    Ok(GameRun {
        trace: GameTrace { initial, records },
        outcome: Outcome::NonTerminated { activations: budget },
    })
}

/// True when no entity's exhaustive best response differs from its action.
pub fn is_pure_equilibrium<M: RateModel + ?Sized>(
    model: &M,
    entities: &[Entity],
    profile: &[Action],
    grid: &ActionGrid,
    epoch: u64,
) -> Result<bool, GameError> {
    for i in 0..entities.len() {
        let env = Environment::new(entities, profile, i, epoch);
        if best_response(model, &env, grid)?.action.distance(&profile[i]) > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The baseline: every entity draws both fractions uniformly from
/// `[0.1, 1]`, off-grid.
pub fn random_strategy<R: Rng + ?Sized>(n_entities: usize, rng: &mut R) -> Vec<Action> {
    (0..n_entities)
        .map(|_| Action::new(rng.random_range(0.1..=1.0), rng.random_range(0.1..=1.0)))
        .collect()
}

/// Empirical distribution of one entity's actions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixedStrategy {
    /// `(action, probability)`, lexicographic in the action.
    pub support: Vec<(Action, f64)>,
}

impl MixedStrategy {
    pub fn probability(&self, action: &Action) -> f64 {
        self.support
            .iter()
            .find(|(a, _)| a.distance(action) < 1e-9)
            .map_or(0.0, |(_, p)| *p)
    }

    pub fn total(&self) -> f64 {
        self.support.iter().map(|(_, p)| p).sum()
    }
}

/// Visit frequencies of every entity's action over the records after
/// `burn_in`.
pub fn empirical_mixed_strategy(trace: &GameTrace, burn_in: usize) -> Result<Vec<MixedStrategy>, GameError> {
    let window = post_burn_in(trace, burn_in)?;
    let n = window[0].profile.len();
    let key = |x: f64| (x * 1e9).round() as i64;
    Ok((0..n)
        .map(|i| {
            let mut counts: BTreeMap<(i64, i64), (Action, usize)> = BTreeMap::new();
            for r in window {
                let a = r.profile[i];
                counts.entry((key(a.cellular), key(a.wifi))).or_insert((a, 0)).1 += 1;
            }
            let total = window.len() as f64;
            MixedStrategy {
                support: counts.into_values().map(|(a, c)| (a, c as f64 / total)).collect(),
            }
        })
        .collect())
}

/// Per-entity rates averaged over the records after `burn_in`.
pub fn mean_rates(trace: &GameTrace, burn_in: usize) -> Result<Vec<Rates>, GameError> {
    let window = post_burn_in(trace, burn_in)?;
    let n = window[0].rates.len();
    let k = window.len() as f64;
    Ok((0..n)
        .map(|i| Rates {
            cellular: window.iter().map(|r| r.rates[i].cellular).sum::<f64>() / k,
            wifi: window.iter().map(|r| r.rates[i].wifi).sum::<f64>() / k,
        })
        .collect())
}

fn post_burn_in(trace: &GameTrace, burn_in: usize) -> Result<&[TraceRecord], GameError> {
    if trace.records.len() <= burn_in {
        return Err(GameError::EmptyWindow {
            len: trace.records.len(),
            burn_in,
        });
    }
    Ok(&trace.records[burn_in..])
}
