//! Time series → point cloud: transient removal, uniform subsampling,
//! autocorrelation-based delay selection, Takens embedding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::turning::TimeSeries;

/// Point cloud in R^dim, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    pub dim: usize,
    data: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, data: Vec<f64>) -> Self {
        assert!(dim > 0 && data.len() % dim == 0);
        PointCloud { dim, data }
    }

    pub fn n_points(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EmbeddingConfig {
    /// Points retained from the second half of the series.
    pub subsample_count: usize,
    /// Embedding dimension m.
    pub embed_dim: usize,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig { subsample_count: 264, embed_dim: 3 }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        if self.embed_dim == 0 || self.subsample_count <= self.embed_dim - 1 {
            return Err(Error::Config(format!(
                "embedding config cannot produce points: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Keeps `subsample_count` samples evenly distributed over the second half
/// [T/2, T] of the series (indices rounded from the even partition). The
/// returned spacing is the nominal (T/2)/(count−1); actual index gaps differ
/// by at most one raw sample.
pub fn truncate_and_subsample(ts: &TimeSeries, config: &EmbeddingConfig) -> Result<TimeSeries> {
    config.validate()?;
    let m = ts.len();
    let count = config.subsample_count;
    if m < 2 * count {
        return Err(Error::InsufficientSamples(format!(
            "need at least {} samples to keep {count} from the second half, got {m}",
            2 * count
        )));
    }
    let span = (m - 1) as f64;
    let indices = (0..count)
        .map(|j| (span * (0.5 + j as f64 / (2 * (count - 1)) as f64)).round() as usize);
    let values: Vec<f64> = indices.clone().map(|i| ts.values[i]).collect();
    let first = indices.clone().next().unwrap();
    let total = span * ts.dt;
    Ok(TimeSeries {
        t0: ts.time_at(first),
        dt: 0.5 * total / (count - 1) as f64,
        values,
    })
}

/// Biased sample autocorrelation r(k) = Σₙ(yₙ−ȳ)(yₙ₊ₖ−ȳ) / Σₙ(yₙ−ȳ)² for
/// k = 0…max_lag; r(0) = 1.
pub fn autocorrelation(ts: &TimeSeries, max_lag: usize) -> Result<Vec<f64>> {
    let n = ts.len();
    if max_lag >= n {
        return Err(Error::InsufficientSamples(format!(
            "max_lag {max_lag} must be below the series length {n}"
        )));
    }
    let mean = ts.values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = ts.values.iter().map(|&y| y - mean).collect();
    let denom: f64 = centered.iter().map(|&c| c * c).sum();
    if denom == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let mut acf = Vec::with_capacity(max_lag + 1);
    acf.push(1.0);
    for k in 1..=max_lag {
        let num: f64 = centered[..n - k]
            .iter()
            .zip(&centered[k..])
            .map(|(&a, &b)| a * b)
            .sum();
        acf.push(num / denom);
    }
    Ok(acf)
}

/// The smallest lag k ≥ 1 with acf[k] ≤ 0; if the autocorrelation never
/// crosses zero (over-damped responses), falls back to the lag of its global
/// minimum — the most decorrelated coordinate available.
pub fn first_zero_lag(acf: &[f64]) -> usize {
    debug_assert!(!acf.is_empty() && (acf[0] - 1.0).abs() < 1e-9);
    if acf.len() < 2 {
        return 1;
    }
    for (k, &r) in acf.iter().enumerate().skip(1) {
        if r <= 0.0 {
            return k;
        }
    }
    let mut best = (1, acf[1]);
    for (k, &r) in acf.iter().enumerate().skip(2) {
        if r < best.1 {
            best = (k, r);
        }
    }
    best.0
}

/// Delay map: vₙ = (yₙ, yₙ₊η, …, yₙ₊₍ₘ₋₁₎η) for n = 0…N−1−(m−1)η, producing
/// exactly N − (m−1)η points in order.
pub fn takens_embed(ts: &TimeSeries, eta: usize, m: usize) -> Result<PointCloud> {
    if eta == 0 || m == 0 {
        return Err(Error::Domain(format!("takens_embed requires eta, m >= 1 (eta={eta}, m={m})")));
    }
    let n = ts.len();
    let reach = (m - 1) * eta;
    if n <= reach + 1 {
        return Err(Error::InsufficientSamples(format!(
            "series of {n} samples cannot be embedded with eta={eta}, m={m}"
        )));
    }
    let count = n - reach;
    let mut data = Vec::with_capacity(count * m);
    for i in 0..count {
        for d in 0..m {
            data.push(ts.values[i + d * eta]);
        }
    }
    Ok(PointCloud::new(m, data))
}

/// Delay-selection lag cap: floor(N/3), so an m = 3 embedding always keeps at
/// least a third of the samples.
pub fn default_max_lag(n: usize) -> usize {
    n / 3
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries { t0: 0.0, dt: 1.0, values }
    }

    fn cfg(count: usize) -> EmbeddingConfig {
        EmbeddingConfig { subsample_count: count, embed_dim: 3 }
    }

    #[test]
    fn subsample_of_exact_double_is_second_half() {
        let ts = series((0..528).map(|i| i as f64).collect());
        let out = truncate_and_subsample(&ts, &cfg(264)).unwrap();
        let expect: Vec<f64> = (264..528).map(|i| i as f64).collect();
        assert_eq!(out.values, expect);
    }

    #[test]
    fn subsample_constant_series() {
        let ts = series(vec![2.5; 1000]);
        let out = truncate_and_subsample(&ts, &cfg(264)).unwrap();
        assert_eq!(out.len(), 264);
        assert!(out.values.iter().all(|&v| v == 2.5));
    }

    #[test]
    fn subsample_default_sim_length() {
        // 65,537 samples (the default simulation output): indices start at
        // T/2, end at T, and successive gaps differ by at most one sample.
        let m = 65_537usize;
        let ts = series((0..m).map(|i| i as f64).collect());
        let out = truncate_and_subsample(&ts, &cfg(264)).unwrap();
        assert_eq!(out.len(), 264);
        let idx: Vec<usize> = out.values.iter().map(|&v| v as usize).collect();
        assert_eq!(idx[263], m - 1, "last sample must be t = T");
        assert!((idx[0] as f64 - (m - 1) as f64 / 2.0).abs() <= 1.0, "first sample near T/2");
        let gaps: Vec<usize> = idx.windows(2).map(|w| w[1] - w[0]).collect();
        let (gmin, gmax) = (gaps.iter().min().unwrap(), gaps.iter().max().unwrap());
        assert!(gmax - gmin <= 1, "index gaps {gmin}..{gmax} differ by more than 1");
    }

    #[test]
    fn subsample_rejects_short_input() {
        let ts = series(vec![0.0; 527]);
        assert!(matches!(
            truncate_and_subsample(&ts, &cfg(264)),
            Err(Error::InsufficientSamples(_))
        ));
    }

    #[test]
    fn acf_normalization() {
        let ts = series(vec![1.0, 3.0, -2.0, 0.5, 4.0, -1.0]);
        let acf = autocorrelation(&ts, 3).unwrap();
        assert_eq!(acf[0], 1.0);
        assert!(acf.iter().all(|r| r.is_finite()));
    }

    #[test]
    fn acf_of_cosine_crosses_at_quarter_period() {
        // Period 20 samples over many cycles: the autocorrelation is close to
        // cos(2πk/20), whose first nonpositive value is at k = 5.
        let p = 20.0;
        let ts = series(
            (0..400)
                .map(|i| (2.0 * std::f64::consts::PI * i as f64 / p).cos())
                .collect(),
        );
        let acf = autocorrelation(&ts, 40).unwrap();
        let lag = first_zero_lag(&acf);
        assert!(
            (lag as f64 - p / 4.0).abs() <= 1.0,
            "first zero at {lag}, expected ≈ {}",
            p / 4.0
        );
    }

    #[test]
    fn acf_white_noise_confidence_band() {
        let n = 264;
        let band = 4.0 / (n as f64).sqrt();
        let mut ok = 0;
        for seed in 0..100u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let ts = series((0..n).map(|_| StandardNormal.sample(&mut rng)).collect());
            let acf = autocorrelation(&ts, default_max_lag(n)).unwrap();
            if acf.iter().skip(1).all(|r| r.abs() < band) {
                ok += 1;
            }
        }
        assert!(ok >= 95, "only {ok}/100 white-noise trials stayed inside ±4/√N");
    }

    #[test]
    fn acf_zero_variance() {
        let ts = series(vec![7.0; 64]);
        assert!(matches!(autocorrelation(&ts, 10), Err(Error::ZeroVariance)));
    }

    #[test]
    fn first_zero_basic_and_fallback() {
        assert_eq!(first_zero_lag(&[1.0, 0.5, -0.1, 0.3]), 2);
        // Strictly positive acf: fall back to the global minimum (k = 7).
        let acf = [1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.05, 0.3, 0.6];
        assert_eq!(first_zero_lag(&acf), 7);
        // Zero counts as a crossing.
        assert_eq!(first_zero_lag(&[1.0, 0.2, 0.0, 0.1]), 2);
    }

    #[test]
    fn takens_count_arithmetic() {
        let ts = series((0..10).map(|i| i as f64).collect());
        let cloud = takens_embed(&ts, 2, 3).unwrap();
        assert_eq!(cloud.n_points(), 6);
        assert_eq!(cloud.point(0), &[0.0, 2.0, 4.0]);
        assert_eq!(cloud.point(5), &[5.0, 7.0, 9.0]);
    }

    #[test]
    fn takens_circle_from_sine() {
        // 264 samples spanning 11 periods of 24 samples; η = quarter period,
        // m = 2 gives (sin t, cos t): a circle.
        let periods = 11.0;
        let n = 264;
        let per = n as f64 / periods;
        let ts = series(
            (0..n)
                .map(|i| (2.0 * std::f64::consts::PI * i as f64 / per).sin())
                .collect(),
        );
        let eta = (per / 4.0).round() as usize;
        let cloud = takens_embed(&ts, eta, 2).unwrap();
        let nc = cloud.n_points() as f64;
        let (mut cx, mut cy) = (0.0, 0.0);
        for p in cloud.points() {
            cx += p[0];
            cy += p[1];
        }
        let (cx, cy) = (cx / nc, cy / nc);
        let radii: Vec<f64> = cloud
            .points()
            .map(|p| ((p[0] - cx).powi(2) + (p[1] - cy).powi(2)).sqrt())
            .collect();
        let rmax = radii.iter().cloned().fold(0.0, f64::max);
        let rmin = radii.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(rmax / rmin < 1.05, "not circular: radius ratio {}", rmax / rmin);
    }

    #[test]
    fn takens_dimension_one_is_identity() {
        let ts = series(vec![3.0, 1.0, 4.0, 1.0, 5.0]);
        let cloud = takens_embed(&ts, 1, 1).unwrap();
        assert_eq!(cloud.n_points(), 5);
        let flat: Vec<f64> = cloud.points().map(|p| p[0]).collect();
        assert_eq!(flat, ts.values);
    }

    #[test]
    fn takens_shift_equivariance() {
        let base: Vec<f64> = (0..50).map(|i| ((i * i) % 17) as f64).collect();
        let full = takens_embed(&series(base.clone()), 3, 3).unwrap();
        let shifted = takens_embed(&series(base[5..].to_vec()), 3, 3).unwrap();
        for i in 0..shifted.n_points() {
            assert_eq!(shifted.point(i), full.point(i + 5));
        }
    }

    #[test]
    fn takens_constant_offset_translates_cloud() {
        let base: Vec<f64> = (0..40).map(|i| (i as f64 * 0.7).sin()).collect();
        let a = takens_embed(&series(base.clone()), 2, 3).unwrap();
        let b = takens_embed(&series(base.iter().map(|v| v + 5.0).collect()), 2, 3).unwrap();
        for i in 0..a.n_points() {
            for d in 0..3 {
                assert_relative_eq!(a.point(i)[d] + 5.0, b.point(i)[d], max_relative = 1e-15);
            }
        }
    }

    #[test]
    fn takens_insufficient_samples() {
        let ts = series(vec![0.0; 10]);
        assert!(matches!(takens_embed(&ts, 5, 3), Err(Error::InsufficientSamples(_))));
        assert!(takens_embed(&ts, 0, 3).is_err());
    }
}
