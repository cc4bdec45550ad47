//! Link-level signal model for a receiver: Rayleigh-faded power-law links,
//! aggregate interference and SINR.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point, Tier};

/// Samplers clamp every link to at least this distance.
pub const MIN_SEPARATION_M: f64 = 0.1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RadioError {
    #[error("transmitter and receiver coincide (distance {0} m)")]
    ZeroDistance(f64),
    #[error("path-loss exponent must exceed 2 for finite interference, got {0}")]
    PathLossExponent(f64),
    #[error("{what} must be non-negative, got {value}")]
    Negative { what: &'static str, value: f64 },
}

/// Power-law path loss `d^-α` with `α > 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PathLoss(f64);

impl PathLoss {
    pub fn new(alpha: f64) -> Result<Self, RadioError> {
        if alpha > 2.0 && alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(RadioError::PathLossExponent(alpha))
        }
    }

    pub fn exponent(&self) -> f64 {
        self.0
    }

    /// Gain at `distance`, clamped to [`MIN_SEPARATION_M`].
    pub fn gain(&self, distance: f64) -> f64 {
        distance.max(MIN_SEPARATION_M).powf(-self.0)
    }

    /// Same as [`gain`](Self::gain) but from a squared distance, saving a sqrt.
    pub fn gain_sq(&self, distance_sq: f64) -> f64 {
        distance_sq.max(MIN_SEPARATION_M * MIN_SEPARATION_M).powf(-0.5 * self.0)
    }
}

impl TryFrom<f64> for PathLoss {
    type Error = RadioError;
    fn try_from(alpha: f64) -> Result<Self, Self::Error> {
        Self::new(alpha)
    }
}

impl From<PathLoss> for f64 {
    fn from(p: PathLoss) -> f64 {
        p.0
    }
}

/// Receiver noise power (W) per tier.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub cellular: f64,
    pub wifi: f64,
}

impl NoiseModel {
    pub fn new(cellular: f64, wifi: f64) -> Result<Self, RadioError> {
        for (what, value) in [("cellular noise", cellular), ("wifi noise", wifi)] {
            if !(value >= 0.0) {
                return Err(RadioError::Negative { what, value });
            }
        }
        Ok(Self { cellular, wifi })
    }

    pub fn interference_limited() -> Self {
        Self::default()
    }

    pub fn for_tier(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Cellular => self.cellular,
            Tier::Wifi => self.wifi,
            Tier::Incumbent => 0.0,
        }
    }
}

/// How the typical WiFi user picks its access point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WifiAssociation {
    /// The user belongs to the cluster of one AP of the band: the AP sits at
    /// a distance drawn from the `2r/ρ_w²` law and the rest of the band is an
    /// independent field. This is the Palm view behind the analytic WiFi
    /// expressions.
    #[default]
    TypicalCluster,
    /// The user at a fixed location picks uniformly among in-range APs of
    /// the band. Conditioning on at least one AP in range thins the other
    /// in-range APs below Poisson, so coverage comes out optimistic.
    UniformInRange,
}

/// A transmitter as seen by the interference model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmitter {
    pub pos: Point,
    pub power: f64,
}

/// Unit-mean exponential fading power.
pub fn draw_fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// Received power `p·H·d^-α`.
pub fn signal_power(p_tx: f64, distance: f64, path_loss: PathLoss, fading: f64) -> Result<f64, RadioError> {
    if !(distance > 0.0) {
        return Err(RadioError::ZeroDistance(distance));
    }
    Ok(p_tx * fading * distance.powf(-path_loss.exponent()))
}

/// Sum of independently faded powers from `interferers` at `receiver`.
/// The caller must already have removed the serving transmitter.
pub fn aggregate_interference<'a, I, R>(interferers: I, receiver: Point, path_loss: PathLoss, rng: &mut R) -> f64
where
    I: IntoIterator<Item = &'a Transmitter>,
    R: Rng + ?Sized,
{
    interferers
        .into_iter()
        .map(|t| t.power * draw_fading(rng) * path_loss.gain_sq(t.pos.dist_sq(&receiver)))
        .sum()
}

/// `signal / (noise + interference)`, `+inf` when the denominator vanishes
/// and the signal does not.
pub fn sinr(signal: f64, interference: f64, noise: f64) -> Result<f64, RadioError> {
    for (what, value) in [("signal", signal), ("interference", interference), ("noise", noise)] {
        if !(value >= 0.0) {
            return Err(RadioError::Negative { what, value });
        }
    }
    if signal == 0.0 {
        return Ok(0.0);
    }
    Ok(signal / (noise + interference))
}

/// `P(SINR > γ)` averaged exactly over Rayleigh fading for fixed
/// geometry: `exp(-γN/S) Π 1/(1 + γ I_j/S)`, where `S` and `I_j` are the
/// fading-free mean received powers.
pub fn rayleigh_success_probability<I: IntoIterator<Item = f64>>(
    mean_signal: f64,
    noise: f64,
    mean_interference: I,
    gamma: f64,
) -> f64 {
    if mean_signal <= 0.0 {
        return 0.0;
    }
    let ratio = gamma / mean_signal;
    // Work in logs: thousands of factors close to 1.
    let log_p = -ratio * noise - mean_interference.into_iter().map(|i| (ratio * i).ln_1p()).sum::<f64>();
    log_p.exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{sample_ppp, Window};
    use crate::quadrature::{integrate, Tolerance};
    use crate::rng::SeedTree;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn alpha4() -> PathLoss {
        PathLoss::new(4.0).unwrap()
    }

    #[test]
    fn path_loss_needs_alpha_above_two() {
        assert!(PathLoss::new(2.0).is_err());
        assert!(PathLoss::new(1.5).is_err());
        assert!(PathLoss::new(2.0001).is_ok());
    }

    #[test]
    fn signal_power_examples() {
        assert_eq!(signal_power(3.0, 1.0, alpha4(), 1.0).unwrap(), 3.0);
        assert!((signal_power(2.0, 10.0, alpha4(), 1.0).unwrap() - 2e-4).abs() < 1e-18);
        assert_eq!(
            signal_power(1.0, 0.0, alpha4(), 1.0),
            Err(RadioError::ZeroDistance(0.0))
        );
    }

    #[test]
    fn faded_signal_mean() {
        let mut rng = SeedTree::new(1).stream("fading");
        let n = 200_000;
        let mean = (0..n)
            .map(|_| signal_power(2.0, 10.0, alpha4(), draw_fading(&mut rng)).unwrap())
            .sum::<f64>()
            / n as f64;
        // sd of the mean is 2e-4/sqrt(n)
        assert!((mean - 2e-4).abs() < 4.0 * 2e-4 / (n as f64).sqrt());
    }

    #[test]
    fn interference_examples() {
        let mut rng = SeedTree::new(1).stream("i");
        assert_eq!(aggregate_interference(&[], Point::ORIGIN, alpha4(), &mut rng), 0.0);
        let one = [Transmitter {
            pos: Point::new(100.0, 0.0),
            power: 1.0,
        }];
        // With H = 1 the value is 1e-8; averaged over H it is too.
        let n = 100_000;
        let mean = (0..n)
            .map(|_| aggregate_interference(&one, Point::ORIGIN, alpha4(), &mut rng))
            .sum::<f64>()
            / n as f64;
        assert!((mean - 1e-8).abs() < 4e-8 / (n as f64).sqrt());
    }

    #[test]
    fn interference_mean_matches_campbell() {
        // PPP on the annulus 20 m..500 m, p = 1 W, α = 4.
        let lambda = 1e-4;
        let (r0, r1) = (20.0, 500.0);
        let window = Window::new(r1).unwrap();
        let campbell = 2.0
            * PI
            * lambda
            * integrate(|r: f64| r.powf(-3.0), r0, r1, Tolerance::default())
                .unwrap()
                .value;
        let root = SeedTree::new(3);
        let draws = 4000;
        let mut samples = Vec::with_capacity(draws);
        for k in 0..draws {
            let mut rng = root.child("draw", k as u64).rng();
            let pts = sample_ppp(lambda, &window, Tier::Wifi, &mut rng).unwrap();
            let tx: Vec<Transmitter> = pts
                .iter()
                .filter(|n| n.pos.norm() >= r0)
                .map(|n| Transmitter { pos: n.pos, power: 1.0 })
                .collect();
            samples.push(aggregate_interference(&tx, Point::ORIGIN, alpha4(), &mut rng));
        }
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        let se = (var / draws as f64).sqrt();
        assert!(
            (mean - campbell).abs() < 4.0 * se,
            "mean {mean} campbell {campbell} se {se}"
        );
    }

    #[test]
    fn sinr_examples() {
        assert_eq!(sinr(1.0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(sinr(1.0, 3.0, 1.0).unwrap(), 0.25);
        assert_eq!(sinr(0.0, 3.0, 1.0).unwrap(), 0.0);
        assert_eq!(sinr(0.0, 0.0, 0.0).unwrap(), 0.0);
        assert!(sinr(1.0, 0.0, 0.0).unwrap().is_infinite());
        assert!(sinr(1.0, -1.0, 0.0).is_err());
        assert!(sinr(1.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn rayleigh_average_matches_sampling() {
        let s = 1e-6;
        let interferers = [2e-7, 5e-8, 1e-7];
        let noise = 1e-8;
        let gamma = 2.0;
        let exact = rayleigh_success_probability(s, noise, interferers, gamma);
        let mut rng = SeedTree::new(5).stream("ray");
        let n = 200_000;
        let hits = (0..n)
            .filter(|_| {
                let sig = s * draw_fading(&mut rng);
                let int: f64 = interferers.iter().map(|i| i * draw_fading(&mut rng)).sum();
                sinr(sig, int, noise).unwrap() > gamma
            })
            .count();
        let p = hits as f64 / n as f64;
        assert!((p - exact).abs() < 4.0 * (exact * (1.0 - exact) / n as f64).sqrt());
    }

    proptest! {
        #[test]
        fn interference_is_monotone(seed in 0u64..1000, x in 1.0f64..1000.0, y in -1000.0f64..1000.0) {
            let root = SeedTree::new(seed);
            let base: Vec<Transmitter> = (0..5)
                .map(|i| Transmitter { pos: Point::new(50.0 * (i as f64 + 1.0), 0.0), power: 1.0 })
                .collect();
            let mut more = base.clone();
            more.push(Transmitter { pos: Point::new(x, y), power: 1.0 });
            // Same stream: the first five fading draws coincide.
            let a = aggregate_interference(&base, Point::ORIGIN, alpha4(), &mut root.stream("f"));
            let b = aggregate_interference(&more, Point::ORIGIN, alpha4(), &mut root.stream("f"));
            prop_assert!(b >= a);
        }

        #[test]
        fn sinr_is_scale_invariant(s in 0.0f64..10.0, i in 0.0f64..10.0, n in 1e-3f64..10.0, c in 1e-6f64..1e6) {
            let base = sinr(s, i, n).unwrap();
            let scaled = sinr(c * s, c * i, c * n).unwrap();
            prop_assert!((base - scaled).abs() <= 1e-12 * base.max(1.0));
        }
    }
}
