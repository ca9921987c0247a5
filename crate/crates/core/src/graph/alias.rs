//! Constant-time weighted sampling over a fixed discrete distribution.

use rand::Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Distribution;

use crate::error::{Error, Result};

/// Alias-method sampler that also keeps the exact normalized distribution
/// it draws from.
#[derive(Debug, Clone)]
pub struct AliasTable {
    sampler: WeightedAliasIndex<f64>,
    probs: Vec<f64>,
}

impl AliasTable {
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Validation(
                "alias table over an empty distribution".into(),
            ));
        }
        if weights.iter().any(|&w| !(w.is_finite() && w > 0.0)) {
            return Err(Error::Validation(
                "alias table weights must be finite and positive".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        let sampler = WeightedAliasIndex::new(weights.to_vec())
            .map_err(|e| Error::Validation(format!("alias table: {e}")))?;
        Ok(AliasTable {
            sampler,
            probs: weights.iter().map(|w| w / total).collect(),
        })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.sampler.sample(rng)
    }

    /// Exact probability of each index.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    fn freqs(weights: &[f64], draws: usize, seed: u64) -> Vec<f64> {
        let t = AliasTable::new(weights).unwrap();
        let mut rng = rng_from_seed(seed);
        let mut counts = vec![0usize; weights.len()];
        for _ in 0..draws {
            counts[t.sample(&mut rng)] += 1;
        }
        counts
            .into_iter()
            .map(|c| c as f64 / draws as f64)
            .collect()
    }

    #[test]
    fn uniform_pair() {
        let f = freqs(&[1.0, 1.0], 1_000_000, 1);
        assert!((f[0] - 0.5).abs() < 0.01);
    }

    #[test]
    fn three_to_one() {
        let f = freqs(&[3.0, 1.0], 1_000_000, 2);
        assert!((f[0] - 0.75).abs() < 0.01 && (f[1] - 0.25).abs() < 0.01);
    }

    #[test]
    fn rejects_bad_weights() {
        assert!(AliasTable::new(&[]).is_err());
        assert!(AliasTable::new(&[1.0, 0.0]).is_err());
        assert!(AliasTable::new(&[1.0, f64::NAN]).is_err());
    }

    #[test]
    fn exact_probabilities() {
        let t = AliasTable::new(&[8.0, 1.0]).unwrap();
        assert!((t.probabilities()[0] - 8.0 / 9.0).abs() < 1e-15);
    }
}
