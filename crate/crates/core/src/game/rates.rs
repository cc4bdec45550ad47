//! Rate models backing the game: the closed-form network model and a fixed
//! simulated deployment.

use std::sync::{Arc, Mutex};

use super::{Action, Entity, Environment, GameError, RateModel, SERVED_TIERS};
use crate::analytic::{AnalyticModel, Rates, Scenario, Utilization};
use crate::geometry::Tier;
use crate::montecarlo::{EmpiricalNetwork, UserSample};
use crate::rng::SeedTree;

/// Stochastic-geometry datarates. Only the aggregate utilization and the
/// actor's own fractions enter.
#[derive(Debug, Clone)]
pub struct AnalyticRates {
    model: AnalyticModel,
}

impl AnalyticRates {
    pub fn new(scenario: &Scenario) -> Result<Self, GameError> {
        Ok(Self {
            model: AnalyticModel::new(scenario)?,
        })
    }

    pub fn model(&self) -> &AnalyticModel {
        &self.model
    }
}

impl RateModel for AnalyticRates {
    fn rates(&self, env: &Environment<'_>, candidate: Action) -> Result<Rates, GameError> {
        let util = env.aggregate_with(candidate);
        let entity = env.entity();
        let rate = |tier: Tier| -> Result<f64, GameError> {
            if entity.owns(tier) {
                Ok(self.model.datarate(tier, util, candidate.of(tier))?)
            } else {
                Ok(0.0)
            }
        };
        Ok(Rates {
            cellular: rate(Tier::Cellular)?,
            wifi: rate(Tier::Wifi)?,
        })
    }
}

/// Datarates measured on one fixed deployment. Test users are redrawn at
/// every epoch and shared by all candidate evaluations within it.
#[derive(Debug)]
pub struct EmpiricalRates {
    network: EmpiricalNetwork,
    scenario: Scenario,
    users_per_network: usize,
    seeds: SeedTree,
    cache: Mutex<Option<(u64, Arc<UserSample>)>>,
}

impl EmpiricalRates {
    pub fn new(network: EmpiricalNetwork, scenario: Scenario, users_per_network: usize, seeds: SeedTree) -> Self {
        Self {
            network,
            scenario,
            users_per_network,
            seeds,
            cache: Mutex::new(None),
        }
    }

    pub fn network(&self) -> &EmpiricalNetwork {
        &self.network
    }

    /// Fails when an entity has a positive share of a tier but no sites.
    pub fn check_entities(&self, entities: &[Entity]) -> Result<(), GameError> {
        let shares: Vec<(f64, f64)> = entities.iter().map(|e| (e.cellular_share, e.wifi_share)).collect();
        if entities.len() != self.network.n_entities() {
            return Err(GameError::InvalidEntities(format!(
                "{} entities configured, the deployment has {}",
                entities.len(),
                self.network.n_entities()
            )));
        }
        Ok(self.network.check_shares(&shares)?)
    }

    fn users(&self, epoch: u64) -> Result<Arc<UserSample>, GameError> {
        let mut slot = self.cache.lock().expect("user cache poisoned");
        if let Some((e, sample)) = slot.as_ref() {
            if *e == epoch {
                return Ok(Arc::clone(sample));
            }
        }
        let mut rng = self.seeds.child("users", epoch).rng();
        let sample = Arc::new(UserSample::draw(
            &self.network,
            &self.scenario,
            self.users_per_network,
            &mut rng,
        )?);
        *slot = Some((epoch, Arc::clone(&sample)));
        Ok(sample)
    }
}

impl RateModel for EmpiricalRates {
    fn rates(&self, env: &Environment<'_>, candidate: Action) -> Result<Rates, GameError> {
        let users = self.users(env.epoch())?;
        let profile: Vec<Utilization> = env.profile_with(candidate).into_iter().map(Utilization::from).collect();
        let mut rates = users.rates(&self.network, &self.scenario, &profile, env.actor())?;
        for tier in SERVED_TIERS {
            if !env.entity().owns(tier) {
                match tier {
                    Tier::Cellular => rates.cellular = 0.0,
                    _ => rates.wifi = 0.0,
                }
            }
        }
        Ok(rates)
    }
}
