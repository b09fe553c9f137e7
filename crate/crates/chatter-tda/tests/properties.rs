//! Property-based checks: structural invariants that must hold for arbitrary
//! inputs, not just the hand-picked oracle cases.

use chatter_tda::classifier::LogisticModel;
use chatter_tda::embedding::{takens_embed, PointCloud};
use chatter_tda::turning::TimeSeries;
use chatter_tda::features::{diagram_features, fit_normalizer, FEATURE_DIM};
use chatter_tda::persistence::{rips_diagrams, PersistenceDiagram, PersistencePair};
use proptest::prelude::*;

fn series(values: Vec<f64>) -> TimeSeries {
    TimeSeries { t0: 0.0, dt: 0.125, values }
}

fn small_cloud_strategy() -> impl Strategy<Value = PointCloud> {
    (2usize..12, proptest::collection::vec(-100.0f64..100.0, 6..36)).prop_map(|(n, raw)| {
        let n = n.min(raw.len() / 3).max(2);
        PointCloud::new(3, raw[..n * 3].to_vec())
    })
}

fn diagram_strategy() -> impl Strategy<Value = PersistenceDiagram> {
    proptest::collection::vec((0.0f64..10.0, 0.0f64..10.0), 0..12).prop_map(|raw| {
        let pairs = raw
            .into_iter()
            .map(|(a, b)| PersistencePair { birth: a.min(b), death: a.min(b) + (a - b).abs() + 1e-3 })
            .collect();
        PersistenceDiagram { dim: 1, pairs }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn takens_count_matches_formula(
        values in proptest::collection::vec(-10.0f64..10.0, 8..80),
        eta in 1usize..6,
        m in 1usize..4,
    ) {
        let ts = series(values.clone());
        let needed = (m - 1) * eta + 2;
        let result = takens_embed(&ts, eta, m);
        if values.len() >= needed {
            let cloud = result.unwrap();
            prop_assert_eq!(cloud.n_points(), values.len() - (m - 1) * eta);
            prop_assert_eq!(cloud.dim, m);
        } else {
            prop_assert!(result.is_err());
        }
    }

    #[test]
    fn takens_shift_equivariance(
        values in proptest::collection::vec(-10.0f64..10.0, 20..60),
        eta in 1usize..4,
        shift in 1usize..5,
    ) {
        let m = 3;
        if values.len() < shift + (m - 1) * eta + 2 {
            return Ok(());
        }
        let full = takens_embed(&series(values.clone()), eta, m).unwrap();
        let shifted = takens_embed(&series(values[shift..].to_vec()), eta, m).unwrap();
        for i in 0..shifted.n_points() {
            prop_assert_eq!(shifted.point(i), full.point(i + shift));
        }
    }

    #[test]
    fn feature_formulas_permutation_invariant(pd in diagram_strategy(), seed in 0u64..1000) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let base = diagram_features(&pd);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut shuffled = pd.clone();
        shuffled.pairs.shuffle(&mut rng);
        let perm = diagram_features(&shuffled);
        // f5 (max) is exactly permutation invariant; the sums are compared
        // loosely because f64 addition is order sensitive.
        prop_assert_eq!(base[4], perm[4]);
        for (a, b) in (0..4).map(|k| (base[k], perm[k])) {
            let scale = a.abs().max(b.abs()).max(1e-12);
            prop_assert!((a - b).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn h0_has_n_minus_1_pairs_for_generic_clouds(cloud in small_cloud_strategy()) {
        let (pd0, _) = rips_diagrams(&cloud).unwrap();
        // Distinct random points: no zero-length MST edges expected.
        prop_assert_eq!(pd0.pairs.len(), cloud.n_points() - 1);
        for p in &pd0.pairs {
            prop_assert_eq!(p.birth, 0.0);
            prop_assert!(p.death > 0.0);
        }
    }

    #[test]
    fn rips_invariant_under_point_permutation(cloud in small_cloud_strategy(), seed in 0u64..1000) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut idx: Vec<usize> = (0..cloud.n_points()).collect();
        idx.shuffle(&mut rng);
        let mut data = Vec::with_capacity(cloud.n_points() * 3);
        for &i in &idx {
            data.extend_from_slice(cloud.point(i));
        }
        let permuted = PointCloud::new(3, data);
        let (a0, a1) = rips_diagrams(&cloud).unwrap();
        let (b0, b1) = rips_diagrams(&permuted).unwrap();
        let key = |pd: &PersistenceDiagram| {
            let mut v: Vec<(u64, u64)> =
                pd.pairs.iter().map(|p| (p.birth.to_bits(), p.death.to_bits())).collect();
            v.sort_unstable();
            v
        };
        prop_assert_eq!(key(&a0), key(&b0));
        prop_assert_eq!(key(&a1), key(&b1));
    }

    #[test]
    fn rips_scale_equivariance(cloud in small_cloud_strategy(), scale in 0.01f64..50.0) {
        let data: Vec<f64> = (0..cloud.n_points())
            .flat_map(|i| cloud.point(i).iter().map(|&x| x * scale).collect::<Vec<_>>())
            .collect();
        let scaled = PointCloud::new(3, data);
        let (a0, a1) = rips_diagrams(&cloud).unwrap();
        let (b0, b1) = rips_diagrams(&scaled).unwrap();
        prop_assert_eq!(a0.pairs.len(), b0.pairs.len());
        prop_assert_eq!(a1.pairs.len(), b1.pairs.len());
        for (pa, pb) in a0.pairs.iter().chain(a1.pairs.iter()).zip(b0.pairs.iter().chain(b1.pairs.iter())) {
            let tol = 1e-12 * scale.max(1.0) * pa.death.abs().max(1.0);
            prop_assert!((pa.death * scale - pb.death).abs() <= tol);
            prop_assert!((pa.birth * scale - pb.birth).abs() <= tol);
        }
    }

    #[test]
    fn normalizer_prediction_invariance(
        raw in proptest::collection::vec(-50.0f64..50.0, FEATURE_DIM),
        weights in proptest::collection::vec(-3.0f64..3.0, FEATURE_DIM),
        bias in -3.0f64..3.0,
    ) {
        // Classifying a normalized vector with (w, c) equals classifying the
        // raw vector with the affinely composed model.
        let train: Vec<[f64; FEATURE_DIM]> = vec![
            [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
            [2.0, 1.0, 5.0, 3.0, 9.0, 4.0, 6.0, 7.0],
            [0.5, 3.0, 1.0, 8.0, 2.0, 5.0, 3.0, 1.0],
        ];
        let norm = fit_normalizer(&train).unwrap();
        let mut v = [0.0; FEATURE_DIM];
        v.copy_from_slice(&raw);
        let z = norm.apply(&v);
        let w: [f64; FEATURE_DIM] = weights.clone().try_into().unwrap();
        let model = LogisticModel {
            weights: w.to_vec(),
            bias,
            l2_strength: 1.0,
            seed: 0,
            tol: 1e-8,
        };
        // Compose: w'ᵢ = wᵢ/σᵢ (0 for degenerate), c' = c − Σ wᵢ μᵢ/σᵢ.
        let mut composed_w = [0.0; FEATURE_DIM];
        let mut composed_c = bias;
        for i in 0..FEATURE_DIM {
            if norm.stds[i] > 0.0 {
                composed_w[i] = w[i] / norm.stds[i];
                composed_c -= w[i] * norm.means[i] / norm.stds[i];
            }
        }
        let composed = LogisticModel { weights: composed_w.to_vec(), bias: composed_c, ..model.clone() };
        let margin_a = model.weights.iter().zip(z.iter()).map(|(a, b)| a * b).sum::<f64>() + model.bias;
        let margin_b = composed.weights.iter().zip(v.iter()).map(|(a, b)| a * b).sum::<f64>() + composed.bias;
        prop_assert!((margin_a - margin_b).abs() <= 1e-9 * margin_a.abs().max(1.0));
    }
}
