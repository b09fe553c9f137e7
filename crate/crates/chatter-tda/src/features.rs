//! Scalar summaries of persistence diagrams and the feature vector fed to
//! the classifier.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::persistence::PersistenceDiagram;

pub const FEATURE_DIM: usize = 8;

/// Column names for the assembled vector, in order.
pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "h0_f2", "h0_f4", "h0_f5", "h1_f1", "h1_f2", "h1_f3", "h1_f4", "h1_f5",
];

/// The five functionals of a single diagram, with ȳ the largest death:
///
///   f1 = Σ bᵢ(dᵢ−bᵢ)      f2 = Σ (ȳ−dᵢ)(dᵢ−bᵢ)
///   f3 = Σ bᵢ²(dᵢ−bᵢ)⁴    f4 = Σ (ȳ−dᵢ)²(dᵢ−bᵢ)⁴
///   f5 = maxᵢ (dᵢ−bᵢ)
///
/// An empty diagram maps to all zeros.
pub fn diagram_features(pd: &PersistenceDiagram) -> [f64; 5] {
    if pd.pairs.is_empty() {
        return [0.0; 5];
    }
    let ymax = pd.max_death();
    let mut f = [0.0; 5];
    for p in &pd.pairs {
        let life = p.death - p.birth;
        let slack = ymax - p.death;
        f[0] += p.birth * life;
        f[1] += slack * life;
        f[2] += p.birth * p.birth * life.powi(4);
        f[3] += slack * slack * life.powi(4);
        f[4] = f[4].max(life);
    }
    f
}

/// Eight-dimensional descriptor: (f2, f4, f5) of the degree-0 diagram — its
/// births are all zero, so f1 and f3 vanish identically and are dropped —
/// followed by (f1…f5) of the degree-1 diagram.
pub fn feature_vector(
    pd0: &PersistenceDiagram,
    pd1: &PersistenceDiagram,
) -> Result<[f64; FEATURE_DIM]> {
    if let Some(p) = pd0.pairs.iter().find(|p| p.birth != 0.0) {
        return Err(Error::InvalidDiagram(format!(
            "degree-0 pair born at {} (all components are born at scale zero)",
            p.birth
        )));
    }
    let g0 = diagram_features(pd0);
    let g1 = diagram_features(pd1);
    Ok([g0[1], g0[3], g0[4], g1[0], g1[1], g1[2], g1[3], g1[4]])
}

/// Per-feature affine map fitted on training data only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

/// Means and population standard deviations of each feature column.
pub fn fit_normalizer(rows: &[[f64; FEATURE_DIM]]) -> Result<Normalizer> {
    if rows.is_empty() {
        return Err(Error::Domain("cannot fit a normalizer to zero rows".into()));
    }
    let n = rows.len() as f64;
    let mut means = vec![0.0; FEATURE_DIM];
    for row in rows {
        for (m, &v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut stds = vec![0.0; FEATURE_DIM];
    for row in rows {
        for (s, (&v, &m)) in stds.iter_mut().zip(row.iter().zip(&means)) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut stds {
        *s = (*s / n).sqrt();
    }
    Ok(Normalizer { means, stds })
}

impl Normalizer {
    /// z-scores a row; a column that was constant during fitting (zero
    /// standard deviation) carries no information and maps to zero.
    pub fn apply(&self, row: &[f64; FEATURE_DIM]) -> [f64; FEATURE_DIM] {
        let mut out = [0.0; FEATURE_DIM];
        for i in 0..FEATURE_DIM {
            if self.stds[i] > 0.0 {
                out[i] = (row[i] - self.means[i]) / self.stds[i];
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.means.len() != FEATURE_DIM || self.stds.len() != FEATURE_DIM {
            return Err(Error::Config(format!(
                "normalizer must carry {FEATURE_DIM} means and stds, got {} and {}",
                self.means.len(),
                self.stds.len()
            )));
        }
        if self.stds.iter().any(|s| !s.is_finite() || *s < 0.0) {
            return Err(Error::Config("normalizer stds must be finite and nonnegative".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::persistence::PersistencePair;
    use approx::assert_relative_eq;

    fn diagram(dim: usize, pairs: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram {
            dim,
            pairs: pairs
                .iter()
                .map(|&(birth, death)| PersistencePair { birth, death })
                .collect(),
        }
    }

    #[test]
    fn functionals_worked_example() {
        let pd = diagram(1, &[(1.0, 3.0), (2.0, 4.0)]);
        assert_eq!(diagram_features(&pd), [6.0, 2.0, 80.0, 16.0, 2.0]);
    }

    #[test]
    fn functionals_empty_diagram_is_zero() {
        assert_eq!(diagram_features(&PersistenceDiagram::empty(1)), [0.0; 5]);
    }

    #[test]
    fn functionals_zero_slack_for_single_pair() {
        // One pair: its death is the max death, so f2 and f4 vanish.
        let pd = diagram(1, &[(0.5, 2.5)]);
        let f = diagram_features(&pd);
        assert_eq!(f[1], 0.0);
        assert_eq!(f[3], 0.0);
        assert_eq!(f[0], 1.0);
        assert_eq!(f[4], 2.0);
    }

    #[test]
    fn vector_worked_example() {
        let pd0 = diagram(0, &[(0.0, 1.0), (0.0, 2.0)]);
        let pd1 = PersistenceDiagram::empty(1);
        let v = feature_vector(&pd0, &pd1).unwrap();
        assert_eq!(v, [1.0, 1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn vector_rejects_nonzero_degree0_birth() {
        let pd0 = diagram(0, &[(0.5, 1.0)]);
        let pd1 = PersistenceDiagram::empty(1);
        assert!(matches!(feature_vector(&pd0, &pd1), Err(Error::InvalidDiagram(_))));
    }

    #[test]
    fn functionals_scale_covariance() {
        // Scaling the diagram by c scales f1, f2 by c², f3, f4 by c⁶, f5 by c.
        let base = [(0.3, 1.1), (0.7, 2.9), (0.0, 1.7)];
        let c: f64 = 2.5;
        let scaled: Vec<(f64, f64)> =
            base.iter().map(|&(b, d)| (c * b, c * d)).collect();
        let f = diagram_features(&diagram(1, &base));
        let g = diagram_features(&diagram(1, &scaled));
        for (i, pow) in [(0, 2), (1, 2), (2, 6), (3, 6), (4, 1)] {
            assert_relative_eq!(g[i], c.powi(pow) * f[i], max_relative = 1e-12);
        }
    }

    #[test]
    fn normalizer_fit_and_apply() {
        let rows = vec![
            [1.0, 0.0, 5.0, 2.0, 2.0, 2.0, 2.0, 10.0],
            [3.0, 0.0, 5.0, 4.0, 0.0, 2.0, 6.0, 30.0],
        ];
        let norm = fit_normalizer(&rows).unwrap();
        assert_eq!(norm.means[0], 2.0);
        assert_eq!(norm.stds[0], 1.0);
        // Constant columns are degenerate.
        assert_eq!(norm.stds[1], 0.0);
        assert_eq!(norm.stds[2], 0.0);
        let z = norm.apply(&rows[0]);
        assert_eq!(z[0], -1.0);
        assert_eq!(z[1], 0.0, "degenerate column maps to zero");
        assert_eq!(z[2], 0.0, "degenerate column maps to zero");
        // Transformed training columns have mean 0 and population std 1.
        for col in [0, 3, 4, 6, 7] {
            let zs: Vec<f64> = rows.iter().map(|r| norm.apply(r)[col]).collect();
            let mean = zs.iter().sum::<f64>() / zs.len() as f64;
            let var = zs.iter().map(|z| (z - mean) * (z - mean)).sum::<f64>() / zs.len() as f64;
            assert_relative_eq!(mean, 0.0, epsilon = 1e-12);
            assert_relative_eq!(var, 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn normalizer_population_std() {
        // Three values 0, 3, 6: population std is √6, not the sample √9.
        let mut rows = vec![[0.0; FEATURE_DIM]; 3];
        rows[1][0] = 3.0;
        rows[2][0] = 6.0;
        let norm = fit_normalizer(&rows).unwrap();
        assert_relative_eq!(norm.stds[0], 6f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn normalizer_rejects_empty_and_validates_shape() {
        assert!(fit_normalizer(&[]).is_err());
        let norm = Normalizer { means: vec![0.0; 3], stds: vec![1.0; 3] };
        assert!(norm.validate().is_err());
        let norm = Normalizer { means: vec![0.0; 8], stds: vec![1.0; 8] };
        assert!(norm.validate().is_ok());
    }

    #[test]
    fn normalizer_json_round_trip() {
        let norm = Normalizer {
            means: (0..8).map(|i| i as f64 * 0.5).collect(),
            stds: (0..8).map(|i| 1.0 + i as f64).collect(),
        };
        let json = serde_json::to_string(&norm).unwrap();
        assert!(json.contains("\"means\"") && json.contains("\"stds\""));
        let back: Normalizer = serde_json::from_str(&json).unwrap();
        assert_eq!(back, norm);
    }
}
