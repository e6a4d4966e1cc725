//! Path loss bookkeeping: free-space loss, reflection loss extracted from a
//! power measurement, and averaging of repeated RSS samples.

use crate::error::{ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerObservation {
    pub p_tx_dbm: f64,
    pub p_rx_dbm: f64,
    pub freq_mhz: f64,
    pub path_length_m: f64,
}

impl PowerObservation {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("frequency", self.freq_mhz)?;
        ensure_positive("path length", self.path_length_m)?;
        if !self.p_tx_dbm.is_finite() || !self.p_rx_dbm.is_finite() {
            return Err(Error::InvalidConfig("powers must be finite".into()));
        }
        Ok(())
    }
}

/// Reflection loss extracted from a power observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RlEstimate {
    pub rl_db: f64,
    /// Set when the observation implies a gain (negative loss); the value is
    /// reported as computed.
    pub negative: bool,
}

/// Friis free-space path loss in dB, frequency in MHz and distance in km.
pub fn fspl(freq_mhz: f64, dist_km: f64) -> Result<f64> {
    ensure_positive("frequency", freq_mhz)?;
    ensure_positive("distance", dist_km)?;
    Ok(32.4 + 20.0 * freq_mhz.log10() + 20.0 * dist_km.log10())
}

pub fn rl_from_powers(obs: &PowerObservation) -> Result<RlEstimate> {
    obs.validate()?;
    let path_loss = obs.p_tx_dbm - obs.p_rx_dbm;
    let rl_db = path_loss - fspl(obs.freq_mhz, obs.path_length_m / 1000.0)?;
    Ok(RlEstimate {
        rl_db,
        negative: rl_db < 0.0,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RssSampleSet {
    pub samples_dbm: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RssSummary {
    pub mean_dbm: f64,
    /// Standard error of the mean; `None` for a single sample.
    pub stderr_db: Option<f64>,
}

/// Mean and standard error, both in the dB domain.
pub fn aggregate_rss(set: &RssSampleSet) -> Result<RssSummary> {
    let xs = &set.samples_dbm;
    if xs.is_empty() {
        return Err(Error::EmptySamples);
    }
    let n = xs.len() as f64;
    let mean_dbm = xs.iter().sum::<f64>() / n;
    let stderr_db = (xs.len() >= 2).then(|| {
        let var = xs.iter().map(|x| (x - mean_dbm).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    });
    Ok(RssSummary { mean_dbm, stderr_db })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    #[test]
    fn fspl_reference_values() {
        assert_abs_diff_eq!(fspl(1.0, 1.0).unwrap(), 32.4, epsilon = 1e-12);
        assert_abs_diff_eq!(fspl(100_000.0, 0.001).unwrap(), 72.4, epsilon = 1e-9);
        assert!(fspl(0.0, 1.0).is_err());
        assert!(fspl(1.0, -1.0).is_err());
    }

    #[test]
    fn pure_los_gives_zero_loss() {
        let f = 100_000.0;
        let d = 32.4;
        let loss = fspl(f, d / 1000.0).unwrap();
        let est = rl_from_powers(&PowerObservation {
            p_tx_dbm: 20.0,
            p_rx_dbm: 20.0 - loss,
            freq_mhz: f,
            path_length_m: d,
        })
        .unwrap();
        assert_abs_diff_eq!(est.rl_db, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn trajectory_a_powers() {
        // FSPL(100 GHz, 32.4 m) is about 102.61 dB
        let loss = fspl(100_000.0, 0.0324).unwrap();
        assert_abs_diff_eq!(loss, 102.61, epsilon = 0.01);
        let obs = PowerObservation {
            p_tx_dbm: 30.0,
            p_rx_dbm: 30.0 - loss - 22.24,
            freq_mhz: 100_000.0,
            path_length_m: 32.4,
        };
        assert_abs_diff_eq!(obs.p_rx_dbm, -94.85, epsilon = 0.01);
        let est = rl_from_powers(&obs).unwrap();
        assert_abs_diff_eq!(est.rl_db, 22.24, epsilon = 1e-9);
        assert!(!est.negative);

        let shifted = PowerObservation {
            p_tx_dbm: obs.p_tx_dbm + 3.0,
            p_rx_dbm: obs.p_rx_dbm + 3.0,
            ..obs
        };
        assert_abs_diff_eq!(rl_from_powers(&shifted).unwrap().rl_db, est.rl_db, epsilon = 1e-9);
    }

    #[test]
    fn negative_loss_is_flagged() {
        let est = rl_from_powers(&PowerObservation {
            p_tx_dbm: 0.0,
            p_rx_dbm: -10.0,
            freq_mhz: 100_000.0,
            path_length_m: 10.0,
        })
        .unwrap();
        assert!(est.negative && est.rl_db < 0.0);
    }

    #[test]
    fn aggregate_edge_cases() {
        assert!(matches!(
            aggregate_rss(&RssSampleSet { samples_dbm: vec![] }),
            Err(Error::EmptySamples)
        ));
        let one = aggregate_rss(&RssSampleSet { samples_dbm: vec![-71.5] }).unwrap();
        assert_eq!(one.mean_dbm, -71.5);
        assert_eq!(one.stderr_db, None);
        let flat = aggregate_rss(&RssSampleSet { samples_dbm: vec![-60.0; 8] }).unwrap();
        assert_eq!(flat.mean_dbm, -60.0);
        assert_eq!(flat.stderr_db, Some(0.0));
    }

    #[test]
    fn stderr_of_fifty_noisy_samples() {
        let expected = 0.5 / 50f64.sqrt();
        let noise = Normal::new(0.0, 0.5).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let trials: Vec<f64> = (0..100)
            .map(|_| {
                let samples_dbm = (0..50).map(|_| -60.0 + noise.sample(&mut rng)).collect();
                aggregate_rss(&RssSampleSet { samples_dbm }).unwrap().stderr_db.unwrap()
            })
            .collect();
        let mean = trials.iter().sum::<f64>() / trials.len() as f64;
        let sd = (trials.iter().map(|x| (x - mean).powi(2)).sum::<f64>()
            / (trials.len() - 1) as f64)
            .sqrt();
        let sampling_error = sd / (trials.len() as f64).sqrt();
        assert!((mean - expected).abs() <= 3.0 * sampling_error, "{mean} vs {expected}");
        assert_abs_diff_eq!(expected, 0.0707, epsilon = 1e-4);
    }
}
