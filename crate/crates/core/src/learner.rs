//! Tabular per-agent learner: exponentially decayed payoff averages per move,
//! turned into a Boltzmann move distribution.

use rand::Rng;

use crate::error::{Error, Result};

/// Default decay per timestep; an effective memory of about 20 steps.
pub const DEFAULT_DECAY: f64 = 0.95;

/// A probability distribution over one agent's moves.
#[derive(Debug, Clone, PartialEq)]
pub struct MoveDistribution(Vec<f64>);

impl MoveDistribution {
    /// Normalizes nonnegative weights. Falls back to uniform when they sum to zero.
    pub fn from_weights(mut weights: Vec<f64>) -> Self {
        debug_assert!(weights.iter().all(|w| *w >= 0.0));
        let total: f64 = weights.iter().sum();
        if total > 0.0 && total.is_finite() {
            weights.iter_mut().for_each(|w| *w /= total);
            MoveDistribution(weights)
        } else {
            Self::uniform(weights.len())
        }
    }

    pub fn uniform(n: usize) -> Self {
        MoveDistribution(vec![1.0 / n as f64; n])
    }

    pub fn one_hot(n: usize, at: usize) -> Self {
        let mut p = vec![0.0; n];
        p[at] = 1.0;
        MoveDistribution(p)
    }

    /// Boltzmann distribution `p(m) ∝ exp(values[m] / temperature)`.
    ///
    /// A nonpositive temperature is read as the zero-temperature limit:
    /// uniform over the maximizers.
    pub fn boltzmann(values: &[f64], temperature: f64) -> Self {
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if temperature > 0.0 {
            let weights = values.iter().map(|v| ((v - max) / temperature).exp()).collect();
            Self::from_weights(weights)
        } else {
            Self::from_weights(values.iter().map(|&v| (v == max) as u8 as f64).collect())
        }
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Normalized pointwise product with `other`. If the supports do not
    /// overlap, `self` is returned unchanged.
    pub fn product(&self, other: &MoveDistribution) -> MoveDistribution {
        let w: Vec<f64> = self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect();
        if w.iter().sum::<f64>() > 0.0 {
            Self::from_weights(w)
        } else {
            self.clone()
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut x: f64 = rng.random();
        for (m, &p) in self.0.iter().enumerate() {
            if x < p {
                return m;
            }
            x -= p;
        }
        // Rounding left a sliver of mass: take the last move with support.
        self.0.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }
}

/// Per-agent record of decayed payoff sums, one slot per move.
///
/// Decay is applied lazily: all slots are multiplied by
/// `decay^(t - last_update)` when the next payoff arrives.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffTable {
    payoff_sums: Vec<f64>,
    weight_sums: Vec<f64>,
    decay: f64,
    last_update: u64,
}

impl PayoffTable {
    pub fn new(move_count: usize, decay: f64) -> Result<Self> {
        if !(decay > 0.0 && decay <= 1.0) {
            return Err(Error::config(format!("decay {decay} outside (0, 1]")));
        }
        Ok(PayoffTable {
            payoff_sums: vec![0.0; move_count],
            weight_sums: vec![0.0; move_count],
            decay,
            last_update: 0,
        })
    }

    pub fn move_count(&self) -> usize {
        self.payoff_sums.len()
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    pub fn last_update(&self) -> u64 {
        self.last_update
    }

    pub fn weight(&self, mv: usize) -> f64 {
        self.weight_sums[mv]
    }

    pub fn record(&mut self, t: u64, mv: usize, payoff: f64) -> Result<()> {
        if t < self.last_update {
            return Err(Error::OutOfOrder {
                t,
                last: self.last_update,
            });
        }
        let elapsed = t - self.last_update;
        if elapsed > 0 && self.decay < 1.0 {
            let factor = self.decay.powf(elapsed as f64);
            for (p, w) in self.payoff_sums.iter_mut().zip(&mut self.weight_sums) {
                *p *= factor;
                *w *= factor;
            }
        }
        self.payoff_sums[mv] += payoff;
        self.weight_sums[mv] += 1.0;
        self.last_update = t;
        Ok(())
    }

    /// Decayed average payoff for `mv`, or `None` if it was never sampled.
    pub fn average(&self, mv: usize) -> Option<f64> {
        let w = self.weight_sums[mv];
        (w > 0.0).then(|| self.payoff_sums[mv] / w)
    }

    /// Averages for every move. Unsampled moves get the mean of the sampled
    /// averages, or 0 when nothing has been sampled.
    pub fn averages(&self) -> Vec<f64> {
        let sampled: Vec<Option<f64>> = (0..self.move_count()).map(|m| self.average(m)).collect();
        let (sum, n) = sampled.iter().flatten().fold((0.0, 0usize), |(s, n), a| (s + a, n + 1));
        let fill = if n > 0 { sum / n as f64 } else { 0.0 };
        sampled.into_iter().map(|a| a.unwrap_or(fill)).collect()
    }

    /// Boltzmann distribution over the averages at the learning temperature.
    pub fn move_distribution(&self, t_learn: f64) -> MoveDistribution {
        MoveDistribution::boltzmann(&self.averages(), t_learn)
    }
}
