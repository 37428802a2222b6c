// SPDX-License-Identifier: Apache-2.0

mod common;

use msnet::linalg::{laplacian, symmetric_eigenvalues};
use msnet::states::{cluster_states, distance_matrix, silhouette, DistanceMatrix, Metric};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn regime_means(d: &DistanceMatrix, truth: &[usize]) -> (f64, f64) {
    let (mut within, mut nw, mut cross, mut nc) = (0.0, 0, 0.0, 0);
    for a in 0..d.size {
        for b in a + 1..d.size {
            if truth[a] == truth[b] {
                within += d.get(a, b);
                nw += 1;
            } else {
                cross += d.get(a, b);
                nc += 1;
            }
        }
    }
    (within / nw as f64, cross / nc as f64)
}

#[test]
fn alternating_regimes_separate() {
    let (seq, truth) = common::alternating_fixture(21);
    for metric in [Metric::Frobenius, Metric::Spectral] {
        let d = distance_matrix(&seq, metric).unwrap();
        let (within, cross) = regime_means(&d, &truth);
        assert!(within < cross, "{metric}: {within} vs {cross}");
        let fixed = cluster_states(&d, Some(2)).unwrap();
        assert_eq!(common::rand_index(&fixed.labels, &truth), 1.0, "{metric}");
        let auto = cluster_states(&d, None).unwrap();
        assert_eq!(auto.k, 2, "{metric}");
        assert_eq!(auto.change_points, (1..8).collect::<Vec<_>>());
    }
}

#[test]
fn laplacian_spectrum_matches_dense_solver() {
    let (seq, _) = common::hub_fixture(4);
    let n = seq.node_count();
    for layer in seq.layers() {
        let l = laplacian(&layer.symmetrized(), n);
        let ours = symmetric_eigenvalues(&l, n);
        let mut theirs: Vec<f64> = DMatrix::from_row_slice(n, n, &l).symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-9 * b.abs().max(1.0), "{a} vs {b}");
        }
    }
}

#[test]
fn block_matrix_splits_exactly() {
    let big = 10.0;
    let rows: Vec<Vec<f64>> = (0..6)
        .map(|a| (0..6).map(|b| if (a < 3) == (b < 3) { 0.0 } else { big }).collect())
        .collect();
    let d = DistanceMatrix::from_rows(rows, Metric::Frobenius).unwrap();
    let l = cluster_states(&d, Some(2)).unwrap();
    assert_eq!(l.labels, [0, 0, 0, 1, 1, 1]);
    assert_eq!(l.change_points, [3]);
    assert!(silhouette(&d, &l) > 0.99);
}

fn arb_layers() -> impl Strategy<Value = (usize, Vec<Vec<(usize, usize, f64)>>)> {
    (3usize..6, 2usize..8, any::<u64>()).prop_map(|(n, t, seed)| {
        let mut rng = common::rng(seed);
        (n, (0..t).map(|_| common::random_connected_edges(&mut rng, n, 1)).collect())
    })
}

proptest! {
    #[test]
    fn distances_form_a_metric_matrix((n, layers) in arb_layers(), spectral in any::<bool>()) {
        let metric = if spectral { Metric::Spectral } else { Metric::Frobenius };
        let d = distance_matrix(&common::sequence(n, &layers), metric).unwrap();
        for a in 0..d.size {
            prop_assert_eq!(d.get(a, a), 0.0);
            for b in 0..d.size {
                prop_assert!(d.get(a, b) >= 0.0);
                prop_assert_eq!(d.get(a, b), d.get(b, a));
            }
        }
    }

    #[test]
    fn layer_permutation_permutes_labels((n, layers) in arb_layers(), k in 1usize..4, seed in any::<u64>()) {
        let t = layers.len();
        let mut perm: Vec<usize> = (0..t).collect();
        perm.shuffle(&mut common::rng(seed));
        let shuffled: Vec<_> = perm.iter().map(|&p| layers[p].clone()).collect();
        let d_a = distance_matrix(&common::sequence(n, &layers), Metric::Frobenius).unwrap();
        let d_b = distance_matrix(&common::sequence(n, &shuffled), Metric::Frobenius).unwrap();
        // distinct linkage values keep tie-breaking out of the comparison
        let mut seen: Vec<f64> = d_a.values.clone();
        seen.sort_by(f64::total_cmp);
        seen.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
        prop_assume!(seen.len() == t * (t - 1) / 2 + 1);
        let k = k.min(t);
        let a = cluster_states(&d_a, Some(k)).unwrap();
        let b = cluster_states(&d_b, Some(k)).unwrap();
        let remapped: Vec<usize> = perm.iter().map(|&p| a.labels[p]).collect();
        prop_assert_eq!(common::rand_index(&remapped, &b.labels), 1.0);
    }
}
