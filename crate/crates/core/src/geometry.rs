//! Spatial model: homogeneous PPPs, exclusion-zone carving (Poisson hole
//! process), band and owner thinning, and WiFi serving-distance sampling.

use std::collections::HashMap;
use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("intensity must be non-negative and finite, got {0}")]
    InvalidIntensity(f64),
    #[error("window radius must be positive and finite, got {0}")]
    InvalidWindow(f64),
    #[error("radius must be non-negative and finite, got {0}")]
    InvalidRadius(f64),
    #[error("fraction must lie in [0, 1], got {0}")]
    FractionOutOfRange(f64),
    #[error("shares must be non-negative and sum to 1 (sum = {0})")]
    InvalidShares(f64),
    #[error("incumbent points carry no band and cannot be band-split")]
    IncumbentInBandSplit,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Self {
            x: r * theta.cos(),
            y: r * theta.sin(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

/// Observation disk centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    radius: f64,
}

impl Window {
    pub fn new(radius: f64) -> Result<Self, GeometryError> {
        if radius > 0.0 && radius.is_finite() {
            Ok(Self { radius })
        } else {
            Err(GeometryError::InvalidWindow(radius))
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.norm_sq() <= self.radius * self.radius
    }

    /// The same disk grown by `by` metres (used so that holes centred just
    /// outside the window still bite into it).
    pub fn inflated(&self, by: f64) -> Self {
        Self {
            radius: self.radius + by.max(0.0),
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let r = self.radius * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        Point::from_polar(r, theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Cellular,
    Wifi,
    Incumbent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Licensed,
    Unlicensed,
}

impl Tier {
    pub fn label(&self) -> &'static str {
        match self {
            Tier::Cellular => "c",
            Tier::Wifi => "w",
            Tier::Incumbent => "z",
        }
    }
}

impl Band {
    pub fn label(&self) -> &'static str {
        match self {
            Band::Licensed => "L",
            Band::Unlicensed => "U",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub pos: Point,
    pub tier: Tier,
    /// `None` until band splitting, and always `None` for incumbents.
    pub band: Option<Band>,
    pub owner: Option<usize>,
    /// Inside at least one exclusion zone, hence barred from the unlicensed band.
    pub in_zone: bool,
}

impl Node {
    pub fn new(pos: Point, tier: Tier) -> Self {
        Self {
            pos,
            tier,
            band: None,
            owner: None,
            in_zone: false,
        }
    }
}

/// A tagged point set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Deployment {
    nodes: Vec<Node>,
}

impl Deployment {
    pub fn new(nodes: Vec<Node>) -> Self {
        Self { nodes }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn nodes_mut(&mut self) -> &mut [Node] {
        &mut self.nodes
    }

    pub fn into_nodes(self) -> Vec<Node> {
        self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Node> {
        self.nodes.iter()
    }

    pub fn push(&mut self, node: Node) {
        self.nodes.push(node);
    }

    pub fn extend(&mut self, other: Deployment) {
        self.nodes.extend(other.nodes);
    }

    pub fn of_tier(&self, tier: Tier) -> Deployment {
        self.filtered(|n| n.tier == tier)
    }

    pub fn filtered<F: Fn(&Node) -> bool>(&self, keep: F) -> Deployment {
        Deployment {
            nodes: self.nodes.iter().copied().filter(|n| keep(n)).collect(),
        }
    }

    pub fn positions(&self) -> Vec<Point> {
        self.nodes.iter().map(|n| n.pos).collect()
    }
}

impl<'a> IntoIterator for &'a Deployment {
    type Item = &'a Node;
    type IntoIter = std::slice::Iter<'a, Node>;
    fn into_iter(self) -> Self::IntoIter {
        self.nodes.iter()
    }
}

/// Disks of radius `radius` around every incumbent. Lookups go through a
/// uniform grid with cell size `radius`, so a query touches at most 9 cells.
#[derive(Debug, Clone)]
pub struct ExclusionZones {
    centers: Vec<Point>,
    radius: f64,
    cell: f64,
    grid: HashMap<(i64, i64), Vec<usize>>,
}

impl ExclusionZones {
    pub fn new(centers: Vec<Point>, radius: f64) -> Result<Self, GeometryError> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(GeometryError::InvalidRadius(radius));
        }
        let cell = radius.max(1.0);
        let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, c) in centers.iter().enumerate() {
            grid.entry(Self::cell_of(c, cell)).or_default().push(i);
        }
        Ok(Self {
            centers,
            radius,
            cell,
            grid,
        })
    }

    pub fn none() -> Self {
        Self::new(Vec::new(), 0.0).expect("zero radius is valid")
    }

    /// Zones centred on the incumbent points of `deployment`.
    pub fn around_incumbents(deployment: &Deployment, radius: f64) -> Result<Self, GeometryError> {
        let centers = deployment
            .iter()
            .filter(|n| n.tier == Tier::Incumbent)
            .map(|n| n.pos)
            .collect();
        Self::new(centers, radius)
    }

    fn cell_of(p: &Point, cell: f64) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    pub fn centers(&self) -> &[Point] {
        &self.centers
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// True when `p` is within `radius` (inclusive) of some centre.
    pub fn contains(&self, p: &Point) -> bool {
        if self.centers.is_empty() {
            return false;
        }
        let (cx, cy) = Self::cell_of(p, self.cell);
        let r2 = self.radius * self.radius;
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.grid.get(&(cx + dx, cy + dy)) {
                    if ids.iter().any(|&i| self.centers[i].dist_sq(p) <= r2) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// Homogeneous PPP of `intensity` points per m² on `window`, every point
/// tagged with `tier`.
pub fn sample_ppp<R: Rng + ?Sized>(
    intensity: f64,
    window: &Window,
    tier: Tier,
    rng: &mut R,
) -> Result<Deployment, GeometryError> {
    if !(intensity >= 0.0 && intensity.is_finite()) {
        return Err(GeometryError::InvalidIntensity(intensity));
    }
    let mean = intensity * window.area();
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|_| GeometryError::InvalidIntensity(intensity))?
            .sample(rng) as usize
    } else {
        0
    };
    let nodes = (0..count)
        .map(|_| Node::new(window.sample_uniform(rng), tier))
        .collect();
    Ok(Deployment::new(nodes))
}

/// Points strictly farther than the zone radius from every zone centre.
pub fn carve_php(points: &Deployment, zones: &ExclusionZones) -> Deployment {
    points.filtered(|n| !zones.contains(&n.pos))
}

/// Flag (rather than drop) the points that fall inside a zone.
pub fn mark_exclusion(points: &mut Deployment, zones: &ExclusionZones) {
    for n in points.nodes_mut() {
        n.in_zone = zones.contains(&n.pos);
    }
}

/// Intensity of the PHP approximated as a PPP: `λ exp(-π λ_z ρ²)`.
pub fn thinned_intensity(lambda: f64, lambda_z: f64, rho: f64) -> f64 {
    lambda * (-PI * lambda_z * rho * rho).exp()
}

fn check_fraction(delta: f64) -> Result<(), GeometryError> {
    if (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(GeometryError::FractionOutOfRange(delta))
    }
}

/// Tag every point with a band in place: out-of-zone points go unlicensed
/// with probability `delta`, in-zone points stay licensed.
pub fn assign_bands<R: Rng + ?Sized>(points: &mut Deployment, delta: f64, rng: &mut R) -> Result<(), GeometryError> {
    check_fraction(delta)?;
    if points.iter().any(|n| n.tier == Tier::Incumbent) {
        return Err(GeometryError::IncumbentInBandSplit);
    }
    for n in points.nodes_mut() {
        // One draw per point keeps the stream aligned with point index.
        let u: f64 = rng.random();
        n.band = Some(if !n.in_zone && u < delta {
            Band::Unlicensed
        } else {
            Band::Licensed
        });
    }
    Ok(())
}

/// Split into (licensed, unlicensed) deployments.
pub fn split_band<R: Rng + ?Sized>(
    points: &Deployment,
    delta: f64,
    rng: &mut R,
) -> Result<(Deployment, Deployment), GeometryError> {
    let mut tagged = points.clone();
    assign_bands(&mut tagged, delta, rng)?;
    let (unlicensed, licensed): (Vec<Node>, Vec<Node>) = tagged
        .into_nodes()
        .into_iter()
        .partition(|n| n.band == Some(Band::Unlicensed));
    Ok((Deployment::new(licensed), Deployment::new(unlicensed)))
}

pub fn validate_shares(shares: &[f64]) -> Result<(), GeometryError> {
    let sum: f64 = shares.iter().sum();
    if shares.is_empty() || shares.iter().any(|s| !(*s >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
        return Err(GeometryError::InvalidShares(sum));
    }
    Ok(())
}

/// Pick an owner index for one point with probabilities `shares`.
pub fn draw_owner<R: Rng + ?Sized>(shares: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, s) in shares.iter().enumerate() {
        acc += s;
        if u < acc {
            return i;
        }
    }
    // Rounding slack: the last entity with a positive share.
    shares.iter().rposition(|s| *s > 0.0).unwrap_or(0)
}

/// Independent owner thinning: each point is owned by entity `i` with
/// probability `shares[i]`.
pub fn partition_entities<R: Rng + ?Sized>(
    points: &Deployment,
    shares: &[f64],
    rng: &mut R,
) -> Result<Deployment, GeometryError> {
    validate_shares(shares)?;
    let mut out = points.clone();
    for n in out.nodes_mut() {
        n.owner = Some(draw_owner(shares, rng));
    }
    Ok(out)
}

/// Distance from a WiFi user to its AP: density `2r/ρ_w²` on `[0, ρ_w)`.
///
/// This is the distribution of the distance from a uniform point in a disk
/// to the disk centre. It is sometimes called "triangular", but the density
/// is linear in `r` and that density is what is sampled here.
pub fn sample_wifi_serving_distance<R: Rng + ?Sized>(rho_w: f64, rng: &mut R) -> f64 {
    rho_w * rng.random::<f64>().sqrt()
}

/// Matérn-style cluster users: each user picks one of `parents` uniformly and
/// lands uniformly in the disk of radius `rho_w` around it. Returns the user
/// position together with its parent index.
pub fn sample_cluster_users<R: Rng + ?Sized>(
    parents: &[Point],
    rho_w: f64,
    n_users: usize,
    rng: &mut R,
) -> Vec<(Point, usize)> {
    if parents.is_empty() {
        return Vec::new();
    }
    (0..n_users)
        .map(|_| {
            let parent = rng.random_range(0..parents.len());
            let r = sample_wifi_serving_distance(rho_w, rng);
            let theta = 2.0 * PI * rng.random::<f64>();
            let off = Point::from_polar(r, theta);
            (Point::new(parents[parent].x + off.x, parents[parent].y + off.y), parent)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeedTree;
    use proptest::prelude::*;

    const KM2: f64 = 1e-6;

    fn rng(label: &str) -> crate::rng::StreamRng {
        SeedTree::new(42).stream(label)
    }

    #[test]
    fn window_rejects_bad_radius() {
        assert!(Window::new(0.0).is_err());
        assert!(Window::new(-1.0).is_err());
        assert!(Window::new(f64::NAN).is_err());
    }

    #[test]
    fn zero_intensity_is_empty() {
        let w = Window::new(1000.0).unwrap();
        assert!(sample_ppp(0.0, &w, Tier::Wifi, &mut rng("a")).unwrap().is_empty());
        assert!(matches!(
            sample_ppp(-1.0, &w, Tier::Wifi, &mut rng("a")),
            Err(GeometryError::InvalidIntensity(_))
        ));
    }

    #[test]
    fn ppp_points_lie_in_window_and_are_reproducible() {
        let w = Window::new(500.0).unwrap();
        let a = sample_ppp(100.0 * KM2, &w, Tier::Wifi, &mut rng("p")).unwrap();
        let b = sample_ppp(100.0 * KM2, &w, Tier::Wifi, &mut rng("p")).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|n| w.contains(&n.pos) && n.tier == Tier::Wifi));
    }

    #[test]
    fn ppp_mean_over_large_disk() {
        // 1/km² on a 10 km disk: mean count π·100.
        let w = Window::new(10_000.0).unwrap();
        let mut r = rng("mean");
        let draws = 400;
        let total: usize = (0..draws)
            .map(|_| sample_ppp(1.0 * KM2, &w, Tier::Cellular, &mut r).unwrap().len())
            .sum();
        let mean = total as f64 / draws as f64;
        let expected = PI * 100.0;
        // sd of the mean = sqrt(314/400) ≈ 0.89
        assert!(
            (mean - expected).abs() < 4.0 * (expected / draws as f64).sqrt(),
            "mean {mean}"
        );
    }

    #[test]
    fn ppp_counts_fit_poisson_100() {
        // 25/km² on a 4 km² disk. Chi-square over binned counts from 10⁴ draws.
        let w = Window::new((4.0e6 / PI).sqrt()).unwrap();
        let mut r = rng("chi");
        let draws = 10_000;
        let counts: Vec<usize> = (0..draws)
            .map(|_| sample_ppp(25.0 * KM2, &w, Tier::Cellular, &mut r).unwrap().len())
            .collect();
        let mean = counts.iter().sum::<usize>() as f64 / draws as f64;
        let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        assert!((mean - 100.0).abs() < 0.4, "mean {mean}");
        assert!((var - 100.0).abs() < 6.0, "var {var}");

        // Bins: <=80, 81..=119 individually grouped by 5, >=120.
        let edges: Vec<usize> = vec![80, 85, 90, 95, 100, 105, 110, 115, 120];
        let pmf = |k: usize| -> f64 {
            let lk = k as f64 * 100f64.ln() - 100.0 - ln_factorial(k);
            lk.exp()
        };
        let mut expected = vec![0.0; edges.len() + 1];
        for k in 0..400 {
            let bin = edges.iter().position(|&e| k <= e).unwrap_or(edges.len());
            expected[bin] += pmf(k) * draws as f64;
        }
        let mut observed = vec![0.0; edges.len() + 1];
        for &c in &counts {
            let bin = edges.iter().position(|&e| c <= e).unwrap_or(edges.len());
            observed[bin] += 1.0;
        }
        let chi2: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e) * (o - e) / e).sum();
        // 9 degrees of freedom, 0.999 quantile = 27.88
        assert!(chi2 < 27.88, "chi2 {chi2}");
    }

    fn ln_factorial(k: usize) -> f64 {
        (1..=k).map(|i| (i as f64).ln()).sum()
    }

    #[test]
    fn carving_with_no_zones_is_identity() {
        let w = Window::new(800.0).unwrap();
        let pts = sample_ppp(100.0 * KM2, &w, Tier::Wifi, &mut rng("c")).unwrap();
        assert_eq!(carve_php(&pts, &ExclusionZones::none()), pts);
    }

    #[test]
    fn zone_covering_window_empties_it() {
        let w = Window::new(800.0).unwrap();
        let pts = sample_ppp(100.0 * KM2, &w, Tier::Wifi, &mut rng("c")).unwrap();
        let zones = ExclusionZones::new(vec![Point::ORIGIN], 800.0).unwrap();
        assert!(carve_php(&pts, &zones).is_empty());
    }

    #[test]
    fn carve_keeps_exactly_the_far_points() {
        let w = Window::new(1500.0).unwrap();
        let mut r = rng("far");
        let pts = sample_ppp(100.0 * KM2, &w, Tier::Wifi, &mut r).unwrap();
        let inc = sample_ppp(3.0 * KM2, &w.inflated(200.0), Tier::Incumbent, &mut r).unwrap();
        let zones = ExclusionZones::around_incumbents(&inc, 200.0).unwrap();
        let kept = carve_php(&pts, &zones);
        let brute: Vec<Node> = pts
            .iter()
            .copied()
            .filter(|n| inc.iter().all(|z| z.pos.dist(&n.pos) > 200.0))
            .collect();
        assert_eq!(kept.nodes(), brute.as_slice());
    }

    #[test]
    fn thinned_intensity_values() {
        assert_eq!(thinned_intensity(3.0, 1.0, 0.0), 3.0);
        assert_eq!(thinned_intensity(3.0, 0.0, 200.0), 3.0);
        let v = thinned_intensity(25.0 * KM2, 1.0 * KM2, 200.0) / KM2;
        assert!((v - 22.048).abs() < 5e-4, "{v}");
        assert!((thinned_intensity(1.0, 1.0 * KM2, 200.0) - 0.881_911_8).abs() < 1e-6);
    }

    #[test]
    fn split_band_extremes_and_errors() {
        let w = Window::new(600.0).unwrap();
        let mut pts = sample_ppp(200.0 * KM2, &w, Tier::Cellular, &mut rng("s")).unwrap();
        let zones = ExclusionZones::new(vec![Point::new(100.0, 0.0)], 200.0).unwrap();
        mark_exclusion(&mut pts, &zones);
        let in_zone = pts.iter().filter(|n| n.in_zone).count();
        assert!(in_zone > 0);

        let (lic, unl) = split_band(&pts, 0.0, &mut rng("s0")).unwrap();
        assert_eq!((lic.len(), unl.len()), (pts.len(), 0));
        let (lic, unl) = split_band(&pts, 1.0, &mut rng("s1")).unwrap();
        assert_eq!(lic.len(), in_zone);
        assert_eq!(unl.len(), pts.len() - in_zone);
        assert!(lic.iter().all(|n| n.band == Some(Band::Licensed)));

        assert!(matches!(
            split_band(&pts, 1.5, &mut rng("s")),
            Err(GeometryError::FractionOutOfRange(_))
        ));
        let inc = Deployment::new(vec![Node::new(Point::ORIGIN, Tier::Incumbent)]);
        assert_eq!(
            split_band(&inc, 0.5, &mut rng("s")),
            Err(GeometryError::IncumbentInBandSplit)
        );
    }

    #[test]
    fn split_half_is_binomial() {
        let w = Window::new(3000.0).unwrap();
        let pts = sample_ppp(100.0 * KM2, &w, Tier::Wifi, &mut rng("b")).unwrap();
        let (_, unl) = split_band(&pts, 0.5, &mut rng("b2")).unwrap();
        let n = pts.len() as f64;
        let sd = (n * 0.25).sqrt();
        assert!((unl.len() as f64 - 0.5 * n).abs() < 4.0 * sd);
    }

    #[test]
    fn partition_shares() {
        let w = Window::new(400.0).unwrap();
        let pts = sample_ppp(100.0 * KM2, &w, Tier::Cellular, &mut rng("own")).unwrap();
        let one = partition_entities(&pts, &[1.0], &mut rng("o1")).unwrap();
        assert!(one.iter().all(|n| n.owner == Some(0)));
        let empty = partition_entities(&Deployment::default(), &[0.5, 0.5], &mut rng("o")).unwrap();
        assert!(empty.is_empty());
        assert!(matches!(
            partition_entities(&pts, &[0.6, 0.6], &mut rng("o")),
            Err(GeometryError::InvalidShares(_))
        ));
        assert!(partition_entities(&pts, &[1.2, -0.2], &mut rng("o")).is_err());
    }

    #[test]
    fn partition_market_shares_multinomial() {
        let shares = [0.22, 0.19, 0.25, 0.34];
        let w = Window::new(2000.0).unwrap();
        let pts = sample_ppp(1000.0 * KM2, &w, Tier::Wifi, &mut rng("m")).unwrap();
        let owned = partition_entities(&pts, &shares, &mut rng("m2")).unwrap();
        let n = pts.len() as f64;
        let mut counts = [0.0; 4];
        for node in &owned {
            counts[node.owner.unwrap()] += 1.0;
        }
        let chi2: f64 = counts
            .iter()
            .zip(shares)
            .map(|(o, s)| (o - s * n).powi(2) / (s * n))
            .sum();
        // 3 dof, 0.999 quantile = 16.27
        assert!(chi2 < 16.27, "chi2 {chi2} counts {counts:?}");
    }

    #[test]
    fn serving_distance_moments() {
        let mut r = rng("rw");
        let mut xs: Vec<f64> = (0..200_000)
            .map(|_| sample_wifi_serving_distance(50.0, &mut r))
            .collect();
        assert!(xs.iter().all(|&x| (0.0..50.0).contains(&x)));
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 100.0 / 3.0).abs() < 0.08, "mean {mean}");
        xs.sort_by(f64::total_cmp);
        let median = xs[xs.len() / 2];
        assert!((median - 50.0 / 2f64.sqrt()).abs() < 0.15, "median {median}");
    }

    #[test]
    fn cluster_users_stay_near_parent() {
        let parents = vec![Point::new(0.0, 0.0), Point::new(1000.0, 0.0)];
        let users = sample_cluster_users(&parents, 50.0, 500, &mut rng("u"));
        assert_eq!(users.len(), 500);
        assert!(users.iter().all(|(p, i)| p.dist(&parents[*i]) < 50.0));
        assert!(sample_cluster_users(&[], 50.0, 5, &mut rng("u")).is_empty());
    }

    proptest! {
        #[test]
        fn carve_is_idempotent(seed in 0u64..500, rho in 0.0f64..300.0) {
            let root = SeedTree::new(seed);
            let w = Window::new(700.0).unwrap();
            let pts = sample_ppp(80.0 * KM2, &w, Tier::Wifi, &mut root.stream("w")).unwrap();
            let inc = sample_ppp(4.0 * KM2, &w.inflated(rho), Tier::Incumbent, &mut root.stream("z")).unwrap();
            let zones = ExclusionZones::around_incumbents(&inc, rho).unwrap();
            let once = carve_php(&pts, &zones);
            prop_assert_eq!(carve_php(&once, &zones), once);
        }

        #[test]
        fn thinning_preserves_points(seed in 0u64..500, delta in 0.0f64..=1.0) {
            let root = SeedTree::new(seed);
            let w = Window::new(500.0).unwrap();
            let pts = sample_ppp(120.0 * KM2, &w, Tier::Cellular, &mut root.stream("c")).unwrap();
            let (lic, unl) = split_band(&pts, delta, &mut root.stream("band")).unwrap();
            prop_assert_eq!(lic.len() + unl.len(), pts.len());
            let mut all: Vec<(u64, u64)> = lic.iter().chain(unl.iter())
                .map(|n| (n.pos.x.to_bits(), n.pos.y.to_bits())).collect();
            let mut orig: Vec<(u64, u64)> = pts.iter().map(|n| (n.pos.x.to_bits(), n.pos.y.to_bits())).collect();
            all.sort_unstable();
            orig.sort_unstable();
            prop_assert_eq!(all, orig);

            let owned = partition_entities(&pts, &[0.3, 0.7], &mut root.stream("own")).unwrap();
            prop_assert_eq!(owned.positions(), pts.positions());
        }
    }
}
