use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::domain::{BoxDomain, IntensityMeasure, PointConfiguration};
use super::test_function::TestFunction;
use crate::error::{Error, Result};
use crate::specfun::{sample_mixing_tau, FractionalOrder};

/// Independent random-number streams used by [`mc_char`]. Fixed so that the
/// estimate for a given seed does not depend on the thread count.
pub const MC_STREAMS: u64 = 64;

const MIN_SAMPLES: usize = 100;

/// Source of random point configurations in a box.
pub trait ConfigurationSampler: Sync {
    fn domain(&self) -> &BoxDomain;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PointConfiguration;
}

/// Poisson process with constant intensity: `N ~ Poisson(m)`, then `N`
/// uniform points.
#[derive(Debug, Clone)]
pub struct PoissonSampler {
    mu: IntensityMeasure,
}

impl PoissonSampler {
    pub fn new(mu: IntensityMeasure) -> Self {
        Self { mu }
    }
}

fn poisson_configuration<R: Rng + ?Sized>(domain: &BoxDomain, mean: f64, rng: &mut R) -> PointConfiguration {
    let mut config = PointConfiguration::empty(domain.dim());
    if mean <= 0.0 {
        return config;
    }
    // Poisson::new only rejects non-positive or absurdly large means.
    let count = Poisson::new(mean).expect("finite positive mean").sample(rng) as u64;
    let mut point = vec![0.0; domain.dim()];
    for _ in 0..count {
        for (x, side) in point.iter_mut().zip(domain.sides()) {
            *x = rng.random::<f64>() * side;
        }
        config.push(&point);
    }
    config
}

impl ConfigurationSampler for PoissonSampler {
    fn domain(&self) -> &BoxDomain {
        &self.mu.domain
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PointConfiguration {
        poisson_configuration(&self.mu.domain, self.mu.total_mass(), rng)
    }
}

/// Fractional Poisson process: a random intensity `τ·μ` with `τ ~ ν_α`,
/// then a Poisson configuration. `α = 1` is the plain Poisson process.
#[derive(Debug, Clone)]
pub struct FractionalSampler {
    mu: IntensityMeasure,
    alpha: FractionalOrder,
}

impl FractionalSampler {
    pub fn new(mu: IntensityMeasure, alpha: FractionalOrder) -> Self {
        Self { mu, alpha }
    }
}

impl ConfigurationSampler for FractionalSampler {
    fn domain(&self) -> &BoxDomain {
        &self.mu.domain
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> PointConfiguration {
        let tau = if self.alpha.is_poisson() {
            1.0
        } else {
            sample_mixing_tau(self.alpha, rng)
        };
        poisson_configuration(&self.mu.domain, tau * self.mu.total_mass(), rng)
    }
}

/// Monte Carlo estimate of `E[e^{i⟨γ, f⟩}]` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: Complex64,
    pub stderr: f64,
    pub samples: usize,
}

/// Running mean and sum of squared deviations `Σ|x − mean|²`.
#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    count: usize,
    mean: Complex64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: Complex64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += (delta.conj() * (x - self.mean)).re;
    }

    // Chan et al. pairwise update.
    fn merge(self, other: Welford) -> Welford {
        if other.count == 0 {
            return self;
        }
        if self.count == 0 {
            return other;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let (na, nb, n) = (self.count as f64, other.count as f64, count as f64);
        Welford {
            count,
            mean: self.mean + delta * (nb / n),
            m2: self.m2 + other.m2 + delta.norm_sqr() * na * nb / n,
        }
    }
}

/// Averages `e^{i⟨γ, f⟩}` over `n_samples` configurations drawn from
/// `sampler`.
///
/// Sample `j` of stream `k` comes from ChaCha8 seeded with `seed` on stream
/// `k`; streams are reduced in index order, so the result is a pure function
/// of `(f, sampler, n_samples, seed)`.
pub fn mc_char<S: ConfigurationSampler>(
    f: &TestFunction,
    sampler: &S,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "n_samples = {n_samples}; at least {MIN_SAMPLES} are needed for a standard error"
        )));
    }
    f.check_support(sampler.domain())?;
    let streams = MC_STREAMS as usize;
    let per_stream: Vec<Welford> = (0..streams)
        .into_par_iter()
        .map(|k| {
            let quota = n_samples / streams + usize::from(k < n_samples % streams);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let mut acc = Welford::default();
            for _ in 0..quota {
                let phase = f.pair(&sampler.sample(&mut rng));
                acc.push(Complex64::from_polar(1.0, phase));
            }
            acc
        })
        .collect();
    let total = per_stream.into_iter().fold(Welford::default(), Welford::merge);
    let n = total.count as f64;
    Ok(McEstimate {
        value: total.mean,
        stderr: (total.m2 / (n - 1.0) / n).sqrt(),
        samples: total.count,
    })
}

/// Point counts of `draws` configurations, on the same stream layout as
/// [`mc_char`]: draw order is stream by stream.
pub fn sample_counts<S: ConfigurationSampler>(sampler: &S, draws: usize, seed: u64) -> Vec<usize> {
    let streams = MC_STREAMS as usize;
    let per_stream: Vec<Vec<usize>> = (0..streams)
        .into_par_iter()
        .map(|k| {
            let quota = draws / streams + usize::from(k < draws % streams);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            (0..quota).map(|_| sampler.sample(&mut rng).len()).collect()
        })
        .collect();
    per_stream.concat()
}

/// Agreement of observed counts with a count distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountFit {
    pub draws: usize,
    pub mean: f64,
    pub mean_stderr: f64,
    /// Pearson statistic over bins with expected count ≥ 5, the remaining
    /// bins (and any mass beyond `weights`) pooled into one.
    pub chi_square: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

pub fn count_fit(counts: &[usize], weights: &[f64]) -> Result<CountFit> {
    if counts.len() < 2 || weights.is_empty() {
        return Err(Error::InvalidParameter("need at least two draws and one weight".into()));
    }
    let draws = counts.len() as f64;
    let mean = counts.iter().sum::<usize>() as f64 / draws;
    let var = counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (draws - 1.0);
    let mut observed = vec![0usize; weights.len() + 1];
    for &c in counts {
        observed[c.min(weights.len())] += 1;
    }
    let tail = (1.0 - weights.iter().sum::<f64>()).max(0.0);
    let (mut stat, mut bins) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (o, p) in observed.iter().zip(weights.iter().chain([&tail])) {
        let e = p * draws;
        if e >= 5.0 {
            stat += (*o as f64 - e).powi(2) / e;
            bins += 1;
        } else {
            pooled_obs += *o as f64;
            pooled_exp += e;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        bins += 1;
    }
    if bins < 2 {
        return Err(Error::InvalidParameter(
            "too few populated bins for a chi-square test".into(),
        ));
    }
    let dof = bins - 1;
    let p_value = ChiSquared::new(dof as f64).map_or(f64::NAN, |d| d.sf(stat));
    Ok(CountFit {
        draws: counts.len(),
        mean,
        mean_stderr: (var / draws).sqrt(),
        chi_square: stat,
        degrees_of_freedom: dof,
        p_value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_merge_matches_direct() {
        let xs: Vec<Complex64> = (0..37).map(|i| Complex64::from_polar(1.0, 0.37 * i as f64)).collect();
        let mean: Complex64 = xs.iter().sum::<Complex64>() / xs.len() as f64;
        let m2: f64 = xs.iter().map(|x| (x - mean).norm_sqr()).sum();
        let (a, b) = xs.split_at(12);
        let mut wa = Welford::default();
        a.iter().for_each(|x| wa.push(*x));
        let mut wb = Welford::default();
        b.iter().for_each(|x| wb.push(*x));
        let w = wa.merge(wb);
        assert!((w.mean - mean).norm() < 1e-15);
        assert!((w.m2 - m2).abs() < 1e-13);
    }

    #[test]
    fn zero_mass_gives_empty_configurations() {
        let mu = IntensityMeasure::new(BoxDomain::interval(1.0).unwrap(), 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(PoissonSampler::new(mu).sample(&mut rng).is_empty());
    }

    #[test]
    fn count_fit_of_exact_frequencies() {
        let weights = [0.25, 0.5, 0.25];
        let counts: Vec<usize> = [0; 25].into_iter().chain([1; 50]).chain([2; 25]).collect();
        let fit = count_fit(&counts, &weights).unwrap();
        assert_eq!(fit.chi_square, 0.0);
        assert_eq!(fit.degrees_of_freedom, 2);
        assert_eq!(fit.mean, 1.0);
        assert!((fit.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn counts_are_reproducible() {
        let mu = IntensityMeasure::new(BoxDomain::interval(2.0).unwrap(), 1.0).unwrap();
        let sampler = PoissonSampler::new(mu);
        assert_eq!(sample_counts(&sampler, 500, 3), sample_counts(&sampler, 500, 3));
        assert_eq!(sample_counts(&sampler, 500, 3).len(), 500);
    }

    #[test]
    fn too_few_samples() {
        let mu = IntensityMeasure::new(BoxDomain::interval(1.0).unwrap(), 1.0).unwrap();
        let err = mc_char(&TestFunction::zero(), &PoissonSampler::new(mu), 99, 0).unwrap_err();
        assert!(err.is_validation());
    }
}
