//! Time-weighted stationary moments with batch-means error bars.
//!
//! Samples arrive as `(value, weight)` pairs where the weight is the time the
//! trajectory spent at that value. The observation window is cut into
//! batches of equal duration; a sample that straddles a batch boundary has its
//! weight split exactly, so piecewise-constant jump trajectories are
//! integrated without discretization error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of equal-duration batches used for error estimation.
pub const DEFAULT_BATCHES: usize = 32;

/// Decorrelation time is capped at this fraction of the window.
pub const DECORRELATION_CAP: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryStats {
    pub mean: f64,
    pub variance: f64,
    /// Batch-means standard error of `mean`.
    pub std_error: f64,
    /// Batch-means standard error of `variance`.
    pub variance_std_error: f64,
    /// Integrated autocorrelation time, in the units of the weights.
    pub decorrelation_time: f64,
    pub sample_count: u64,
    /// Total weight (duration) of the window.
    pub window: f64,
}

impl TrajectoryStats {
    /// Number of statistically independent samples implied by the
    /// decorrelation time.
    pub fn effective_samples(&self) -> f64 {
        if self.decorrelation_time > 0.0 {
            self.window / (2.0 * self.decorrelation_time)
        } else {
            self.sample_count as f64
        }
    }
}

/// Weighted running mean and sum of squared deviations.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Moments {
    weight: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64, w: f64) {
        if w <= 0.0 {
            return;
        }
        self.weight += w;
        let delta = x - self.mean;
        self.mean += delta * w / self.weight;
        self.m2 += w * delta * (x - self.mean);
    }

    fn merge(&mut self, other: &Moments) {
        if other.weight == 0.0 {
            return;
        }
        if self.weight == 0.0 {
            *self = *other;
            return;
        }
        let total = self.weight + other.weight;
        let delta = other.mean - self.mean;
        self.mean += delta * other.weight / total;
        self.m2 += other.m2 + delta * delta * self.weight * other.weight / total;
        self.weight = total;
    }

    fn variance(&self) -> f64 {
        if self.weight > 0.0 {
            (self.m2 / self.weight).max(0.0)
        } else {
            0.0
        }
    }
}

fn spread(values: impl Iterator<Item = f64> + Clone) -> (f64, usize) {
    let n = values.clone().count();
    if n < 2 {
        return (0.0, n);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (ss / (n - 1) as f64, n)
}

/// Streaming estimator for one scalar channel over a window of known length.
#[derive(Debug, Clone)]
pub struct StationaryAccumulator {
    batch_len: f64,
    batches: Vec<Moments>,
    current: usize,
    filled: f64,
    samples: u64,
    window: f64,
}

impl StationaryAccumulator {
    pub fn new(window: f64) -> Self {
        Self::with_batches(window, DEFAULT_BATCHES)
    }

    pub fn with_batches(window: f64, batches: usize) -> Self {
        assert!(batches >= 1);
        Self {
            batch_len: window / batches as f64,
            batches: vec![Moments::default(); batches],
            current: 0,
            filled: 0.0,
            samples: 0,
            window,
        }
    }

    pub fn push(&mut self, value: f64, mut weight: f64) {
        self.samples += 1;
        let last = self.batches.len() - 1;
        while weight > 0.0 {
            if self.current == last {
                self.batches[last].push(value, weight);
                self.filled += weight;
                break;
            }
            let room = self.batch_len - self.filled;
            let take = weight.min(room);
            self.batches[self.current].push(value, take);
            self.filled += take;
            weight -= take;
            if self.filled >= self.batch_len * (1.0 - 1e-12) {
                self.current += 1;
                self.filled = 0.0;
            }
        }
    }

    /// Pools another accumulator's batches into this one. Used to combine
    /// independent trajectories; the result does not depend on merge order
    /// beyond rounding.
    pub fn merge(&mut self, other: StationaryAccumulator) {
        self.batches.extend(other.batches);
        self.samples += other.samples;
        self.window += other.window;
    }

    pub fn finish(&self) -> Result<TrajectoryStats> {
        let mut total = Moments::default();
        for b in &self.batches {
            total.merge(b);
        }
        if total.weight <= 0.0 || self.samples == 0 {
            return Err(Error::EmptyWindow);
        }
        let variance = total.variance();
        let full: Vec<&Moments> = self.batches.iter().filter(|b| b.weight > 0.0).collect();
        let (var_of_means, n_batches) = spread(full.iter().map(|b| b.mean));
        let (var_of_vars, _) = spread(full.iter().map(|b| b.variance()));
        let mean_batch_len = total.weight / n_batches as f64;
        let (std_error, variance_std_error) = if n_batches >= 2 {
            (
                (var_of_means / n_batches as f64).sqrt(),
                (var_of_vars / n_batches as f64).sqrt(),
            )
        } else {
            ((variance / self.samples as f64).sqrt(), f64::NAN)
        };
        let decorrelation_time = if variance > 0.0 && n_batches >= 2 {
            (mean_batch_len * var_of_means / (2.0 * variance)).min(DECORRELATION_CAP * total.weight)
        } else {
            0.0
        };
        Ok(TrajectoryStats {
            mean: total.mean,
            variance,
            std_error,
            variance_std_error,
            decorrelation_time,
            sample_count: self.samples,
            window: total.weight,
        })
    }
}

/// Time-weighted mean, variance and batch-means errors of a sampled
/// trajectory.
pub fn estimate_stationary_moments(values: &[f64], weights: &[f64]) -> Result<TrajectoryStats> {
    if values.len() != weights.len() {
        return Err(Error::InvalidConfig(format!(
            "{} values but {} weights",
            values.len(),
            weights.len()
        )));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::InvalidConfig("weights must be non-negative".into()));
    }
    let window: f64 = weights.iter().sum();
    if values.is_empty() || window <= 0.0 {
        return Err(Error::EmptyWindow);
    }
    let mut acc = StationaryAccumulator::new(window);
    for (&v, &w) in values.iter().zip(weights) {
        acc.push(v, w);
    }
    acc.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Poisson};

    #[test]
    fn empty_window() {
        assert_eq!(estimate_stationary_moments(&[], &[]), Err(Error::EmptyWindow));
        assert_eq!(
            estimate_stationary_moments(&[1.0], &[0.0]),
            Err(Error::EmptyWindow)
        );
        assert!(estimate_stationary_moments(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn constant_trajectory() {
        let s = estimate_stationary_moments(&[3.0; 100], &[0.5; 100]).unwrap();
        assert_eq!(s.mean, 3.0);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.std_error, 0.0);
        assert_eq!(s.decorrelation_time, 0.0);
        assert_eq!(s.sample_count, 100);
    }

    #[test]
    fn alternating_two_state_trajectory() {
        let (a, b, ta, tb) = (2.0, 7.0, 0.3, 1.1);
        let mut values = Vec::new();
        let mut weights = Vec::new();
        for _ in 0..1000 {
            values.extend([a, b]);
            weights.extend([ta, tb]);
        }
        let s = estimate_stationary_moments(&values, &weights).unwrap();
        let p = ta / (ta + tb);
        let mean = p * a + (1.0 - p) * b;
        let var = p * (1.0 - p) * (a - b) * (a - b);
        assert!((s.mean - mean).abs() < 1e-12);
        assert!((s.variance - var).abs() < 1e-12);
    }

    #[test]
    fn iid_poisson_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dist = Poisson::new(4.0).unwrap();
        let values: Vec<f64> = (0..200_000).map(|_| dist.sample(&mut rng)).collect();
        let s = estimate_stationary_moments(&values, &vec![1.0; values.len()]).unwrap();
        assert!((s.mean - 4.0).abs() < 3.0 * s.std_error, "{s:?}");
        assert!((s.variance - 4.0).abs() < 3.0 * s.variance_std_error, "{s:?}");
        // uncorrelated unit-spaced samples: τ_int ≈ 1/2
        assert!((s.decorrelation_time - 0.5).abs() < 0.3, "{s:?}");
    }

    #[test]
    fn split_weights_are_conserved() {
        let mut acc = StationaryAccumulator::with_batches(10.0, 4);
        acc.push(1.0, 3.7);
        acc.push(2.0, 6.3);
        let s = acc.finish().unwrap();
        assert!((s.window - 10.0).abs() < 1e-12);
        assert!((s.mean - (3.7 + 12.6) / 10.0).abs() < 1e-12);
    }

    #[test]
    fn merging_matches_single_pass() {
        let values: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut whole = StationaryAccumulator::with_batches(64.0, 8);
        let mut left = StationaryAccumulator::with_batches(32.0, 4);
        let mut right = StationaryAccumulator::with_batches(32.0, 4);
        for (i, v) in values.iter().enumerate() {
            whole.push(*v, 1.0);
            if i < 32 {
                left.push(*v, 1.0)
            } else {
                right.push(*v, 1.0)
            }
        }
        left.merge(right);
        let (a, b) = (whole.finish().unwrap(), left.finish().unwrap());
        assert!((a.mean - b.mean).abs() < 1e-14);
        assert!((a.variance - b.variance).abs() < 1e-14);
        assert!((a.std_error - b.std_error).abs() < 1e-14);
    }
}
