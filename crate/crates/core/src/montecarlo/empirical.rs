//! Datarates measured on a fixed deployment.
//!
//! Each site keeps one uniform draw for its whole life; under a profile it
//! is unlicensed iff it is outside every zone and its draw falls below its
//! owner's fraction. Changing an action therefore flips only the sites it
//! has to, which keeps payoff comparisons within a best response smooth.
//!
//! Users are dropped per call: cellular users uniformly in the user region
//! and attached to the nearest site of their own entity, WiFi users within
//! range of a uniformly chosen own AP. The success probability of a user is
//! the exact fading average for its geometry.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::McError;
use crate::analytic::{Rates, Scenario, Utilization};
use crate::geometry::{sample_wifi_serving_distance, Band, Deployment, ExclusionZones, Point, Tier};
use crate::rng::SeedTree;

/// Axis-aligned rectangle in local metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn centered(half_width: f64) -> Self {
        Self::new(Point::new(-half_width, -half_width), Point::new(half_width, half_width))
    }

    /// Smallest rectangle holding every point; `None` when empty.
    pub fn bounding(points: impl IntoIterator<Item = Point>) -> Option<Self> {
        points.into_iter().fold(None, |acc, p| {
            Some(match acc {
                None => Rect::new(p, p),
                Some(r) => Rect::new(
                    Point::new(r.min.x.min(p.x), r.min.y.min(p.y)),
                    Point::new(r.max.x.max(p.x), r.max.y.max(p.y)),
                ),
            })
        })
    }

    pub fn contains(&self, p: &Point) -> bool {
        (self.min.x..=self.max.x).contains(&p.x) && (self.min.y..=self.max.y).contains(&p.y)
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        Point::new(
            self.min.x + (self.max.x - self.min.x) * rng.random::<f64>(),
            self.min.y + (self.max.y - self.min.y) * rng.random::<f64>(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub pos: Point,
    pub tier: Tier,
    pub owner: Option<usize>,
    /// Outside every exclusion zone.
    pub eligible: bool,
    /// Fixed uniform draw deciding the band under a profile.
    pub draw: f64,
}

/// Which shared medium a transmitter occupies. Licensed spectrum is
/// private to each tier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Medium {
    Unlicensed,
    LicensedCellular,
    LicensedWifi,
}

#[derive(Debug, Clone)]
pub struct EmpiricalNetwork {
    sites: Vec<Site>,
    n_entities: usize,
    user_region: Rect,
}

impl EmpiricalNetwork {
    /// Build from a deployment whose cellular and WiFi nodes all carry an
    /// owner below `n_entities`. Band draws come from `tree`.
    pub fn new(
        deployment: &Deployment,
        zones: &ExclusionZones,
        n_entities: usize,
        user_region: Rect,
        tree: &SeedTree,
    ) -> Result<Self, McError> {
        let mut rng = tree.stream("site-band-draws");
        let mut sites = Vec::with_capacity(deployment.len());
        for node in deployment {
            let owner = match node.tier {
                Tier::Incumbent => None,
                tier => match node.owner {
                    Some(o) if o < n_entities => Some(o),
                    _ => {
                        return Err(McError::MissingElements {
                            entity: node.owner.unwrap_or(usize::MAX),
                            tier,
                        })
                    }
                },
            };
            sites.push(Site {
                pos: node.pos,
                tier: node.tier,
                owner,
                eligible: node.tier != Tier::Incumbent && !zones.contains(&node.pos),
                draw: rng.random(),
            });
        }
        Ok(Self {
            sites,
            n_entities,
            user_region,
        })
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn n_entities(&self) -> usize {
        self.n_entities
    }

    pub fn user_region(&self) -> Rect {
        self.user_region
    }

    pub fn count(&self, entity: usize, tier: Tier) -> usize {
        self.sites
            .iter()
            .filter(|s| s.tier == tier && s.owner == Some(entity))
            .count()
    }

    /// Every entity with a positive share of a tier must own at least one
    /// site of it.
    pub fn check_shares(&self, shares: &[(f64, f64)]) -> Result<(), McError> {
        for (entity, &(vc, vw)) in shares.iter().enumerate() {
            for (tier, v) in [(Tier::Cellular, vc), (Tier::Wifi, vw)] {
                if v > 0.0 && self.count(entity, tier) == 0 {
                    return Err(McError::MissingElements { entity, tier });
                }
            }
        }
        Ok(())
    }

    fn band(&self, site: &Site, profile: &[Utilization]) -> Band {
        match site.owner {
            Some(o) if site.eligible && site.draw < profile[o].of(site.tier) => Band::Unlicensed,
            Some(_) => Band::Licensed,
            None => Band::Unlicensed,
        }
    }

    fn medium(&self, site: &Site, profile: &[Utilization]) -> Medium {
        match (self.band(site, profile), site.tier) {
            (Band::Unlicensed, _) => Medium::Unlicensed,
            (Band::Licensed, Tier::Wifi) => Medium::LicensedWifi,
            _ => Medium::LicensedCellular,
        }
    }

    /// Fraction of each entity's `tier` sites that are unlicensed.
    pub fn unlicensed_fraction(&self, entity: usize, tier: Tier, profile: &[Utilization]) -> f64 {
        let own: Vec<&Site> = self
            .sites
            .iter()
            .filter(|s| s.tier == tier && s.owner == Some(entity))
            .collect();
        if own.is_empty() {
            return 0.0;
        }
        own.iter().filter(|s| self.band(s, profile) == Band::Unlicensed).count() as f64 / own.len() as f64
    }
}

#[derive(Debug, Clone)]
struct User {
    entity: usize,
    tier: Tier,
    serving: usize,
    /// `γ N / S`.
    noise_term: f64,
    /// `ln(1 + γ I_j / S)` for every site `j`.
    log_terms: Vec<f64>,
}

/// A batch of test users with their link budgets precomputed against every
/// site, reusable across any number of profiles.
#[derive(Debug, Clone)]
pub struct UserSample {
    users: Vec<User>,
    spectral_efficiency: f64,
}

impl UserSample {
    /// `n_users` per (entity, tier) for every entity owning sites of that tier.
    pub fn draw<R: Rng + ?Sized>(
        network: &EmpiricalNetwork,
        scenario: &Scenario,
        n_users: usize,
        rng: &mut R,
    ) -> Result<Self, McError> {
        if n_users == 0 {
            return Err(McError::NoUsers);
        }
        let gamma = scenario.sinr_threshold;
        let path_loss = scenario.path_loss;
        let sites = network.sites();
        let mut users = Vec::new();
        for entity in 0..network.n_entities() {
            for tier in [Tier::Cellular, Tier::Wifi] {
                let own: Vec<usize> = (0..sites.len())
                    .filter(|&j| sites[j].tier == tier && sites[j].owner == Some(entity))
                    .collect();
                if own.is_empty() {
                    continue;
                }
                for _ in 0..n_users {
                    let (pos, serving) = match tier {
                        Tier::Cellular => {
                            let pos = network.user_region().sample_uniform(rng);
                            let nearest = *own
                                .iter()
                                .min_by(|&&a, &&b| sites[a].pos.dist_sq(&pos).total_cmp(&sites[b].pos.dist_sq(&pos)))
                                .expect("own is non-empty");
                            (pos, nearest)
                        }
                        _ => {
                            let ap = own[rng.random_range(0..own.len())];
                            let r = sample_wifi_serving_distance(scenario.wifi_range, rng);
                            let theta = 2.0 * PI * rng.random::<f64>();
                            let c = sites[ap].pos;
                            (Point::new(c.x + r * theta.cos(), c.y + r * theta.sin()), ap)
                        }
                    };
                    let signal = scenario.power(tier) * path_loss.gain_sq(sites[serving].pos.dist_sq(&pos));
                    let log_terms = sites
                        .iter()
                        .map(|s| {
                            let mean = scenario.power(s.tier) * path_loss.gain_sq(s.pos.dist_sq(&pos));
                            (gamma * mean / signal).ln_1p()
                        })
                        .collect();
                    users.push(User {
                        entity,
                        tier,
                        serving,
                        noise_term: gamma * scenario.noise.for_tier(tier) / signal,
                        log_terms,
                    });
                }
            }
        }
        Ok(Self {
            users,
            spectral_efficiency: (1.0 + gamma).log2(),
        })
    }

    /// Mean user datarates of `entity` under `profile` (per-entity fractions).
    pub fn rates(
        &self,
        network: &EmpiricalNetwork,
        scenario: &Scenario,
        profile: &[Utilization],
        entity: usize,
    ) -> Result<Rates, McError> {
        if profile.len() != network.n_entities() {
            return Err(McError::ProfileLength {
                expected: network.n_entities(),
                got: profile.len(),
            });
        }
        let media: Vec<Medium> = network.sites().iter().map(|s| network.medium(s, profile)).collect();
        let mut sums = [0.0; 2];
        let mut counts = [0usize; 2];
        for user in self.users.iter().filter(|u| u.entity == entity) {
            let medium = media[user.serving];
            let log_interference: f64 = user
                .log_terms
                .iter()
                .zip(&media)
                .enumerate()
                .filter(|&(j, (_, m))| j != user.serving && *m == medium)
                .map(|(_, (l, _))| *l)
                .sum();
            let success = (-user.noise_term - log_interference).exp();
            let band = if medium == Medium::Unlicensed {
                Band::Unlicensed
            } else {
                Band::Licensed
            };
            let slot = (user.tier == Tier::Wifi) as usize;
            sums[slot] += scenario.bandwidth(user.tier, band) * self.spectral_efficiency * success;
            counts[slot] += 1;
        }
        let mean = |k: usize| {
            if counts[k] == 0 {
                0.0
            } else {
                sums[k] / counts[k] as f64
            }
        };
        Ok(Rates {
            cellular: mean(0),
            wifi: mean(1),
        })
    }
}

/// Per-entity mean datarates on a fixed network under `profile`, from
/// `n_users` fresh test users per entity and tier.
pub fn simulate_datarate_empirical<R: Rng + ?Sized>(
    network: &EmpiricalNetwork,
    scenario: &Scenario,
    profile: &[Utilization],
    n_users: usize,
    rng: &mut R,
) -> Result<Vec<Rates>, McError> {
    let sample = UserSample::draw(network, scenario, n_users, rng)?;
    (0..network.n_entities())
        .map(|e| sample.rates(network, scenario, profile, e))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::AnalyticModel;
    use crate::geometry::{partition_entities, sample_ppp, Node, Window};

    fn network(seed: u64, shares: &[f64], radius: f64, region: Rect, incumbents: bool) -> (EmpiricalNetwork, Scenario) {
        let sc = Scenario::baseline();
        let root = SeedTree::new(seed);
        let w = Window::new(radius).unwrap();
        let mut dep = partition_entities(
            &sample_ppp(sc.cellular_density, &w, Tier::Cellular, &mut root.stream("c")).unwrap(),
            shares,
            &mut root.stream("oc"),
        )
        .unwrap();
        dep.extend(
            partition_entities(
                &sample_ppp(sc.wifi_density, &w, Tier::Wifi, &mut root.stream("w")).unwrap(),
                shares,
                &mut root.stream("ow"),
            )
            .unwrap(),
        );
        let inc = if incumbents {
            sample_ppp(sc.incumbent_density, &w, Tier::Incumbent, &mut root.stream("z")).unwrap()
        } else {
            Deployment::default()
        };
        let zones = ExclusionZones::around_incumbents(&inc, sc.exclusion_radius).unwrap();
        dep.extend(inc);
        (
            EmpiricalNetwork::new(&dep, &zones, shares.len(), region, &root).unwrap(),
            sc,
        )
    }

    #[test]
    fn zero_users_is_an_error() {
        let (net, sc) = network(1, &[1.0], 500.0, Rect::centered(200.0), false);
        let r = simulate_datarate_empirical(
            &net,
            &sc,
            &[Utilization::default()],
            0,
            &mut SeedTree::new(1).stream("u"),
        );
        assert!(matches!(r, Err(McError::NoUsers)));
    }

    #[test]
    fn missing_owner_is_a_data_error() {
        let dep = Deployment::new(vec![Node::new(Point::ORIGIN, Tier::Cellular)]);
        let r = EmpiricalNetwork::new(&dep, &ExclusionZones::none(), 1, Rect::centered(1.0), &SeedTree::new(0));
        assert!(matches!(r, Err(McError::MissingElements { .. })));
        let (net, _) = network(2, &[1.0], 300.0, Rect::centered(100.0), false);
        assert!(net.check_shares(&[(0.5, 0.5), (0.5, 0.5)]).is_err());
        assert!(net.check_shares(&[(1.0, 1.0)]).is_ok());
    }

    #[test]
    fn licensed_only_matches_single_band_rate() {
        // PPP input, everything licensed, users away from the edge.
        let (net, sc) = network(3, &[1.0], 3_000.0, Rect::centered(600.0), false);
        let profile = [Utilization::default()];
        let draws = 30;
        let per: Vec<Rates> = (0..draws)
            .map(|k| {
                let mut rng = SeedTree::new(3).child("users", k).rng();
                simulate_datarate_empirical(&net, &sc, &profile, 100, &mut rng).unwrap()[0]
            })
            .collect();
        let model = AnalyticModel::new(&Scenario {
            incumbent_density: 0.0,
            ..sc
        })
        .unwrap();
        for tier in [Tier::Cellular, Tier::Wifi] {
            let xs: Vec<f64> = per.iter().map(|r| r.of(tier)).collect();
            let mean = xs.iter().sum::<f64>() / draws as f64;
            let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64).sqrt();
            let expected = model.datarate(tier, Utilization::default(), 0.0).unwrap();
            // One realization of the network: allow the spatial variance of a
            // single deployment on top of the sampling error.
            assert!(
                (mean - expected).abs() < 3.0 * sd / (draws as f64).sqrt() + 0.08 * expected,
                "{tier:?}: {mean} vs {expected}"
            );
        }
    }

    #[test]
    fn four_entity_rates_positive_and_reproducible() {
        let shares = [0.22, 0.19, 0.25, 0.34];
        let (net, sc) = network(4, &shares, 1_000.0, Rect::centered(800.0), true);
        let profile = vec![Utilization::new(0.5, 0.3).unwrap(); 4];
        let a = simulate_datarate_empirical(&net, &sc, &profile, 20, &mut SeedTree::new(4).stream("u")).unwrap();
        let b = simulate_datarate_empirical(&net, &sc, &profile, 20, &mut SeedTree::new(4).stream("u")).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|r| r.cellular > 0.0 && r.wifi > 0.0));
        assert!(net.unlicensed_fraction(0, Tier::Cellular, &profile) > 0.3);
    }

    #[test]
    fn band_draws_are_nested() {
        let (net, _) = network(5, &[0.5, 0.5], 800.0, Rect::centered(100.0), true);
        let lo = [Utilization::new(0.3, 0.3).unwrap(), Utilization::new(0.5, 0.5).unwrap()];
        let hi = [Utilization::new(0.6, 0.3).unwrap(), Utilization::new(0.5, 0.5).unwrap()];
        for s in net
            .sites()
            .iter()
            .filter(|s| s.owner == Some(0) && s.tier == Tier::Cellular)
        {
            if net.band(s, &lo) == Band::Unlicensed {
                assert_eq!(net.band(s, &hi), Band::Unlicensed);
            }
        }
        for s in net.sites().iter().filter(|s| !s.eligible && s.tier != Tier::Incumbent) {
            assert_eq!(net.band(s, &hi), Band::Licensed);
        }
    }
}
