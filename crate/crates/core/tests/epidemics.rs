// SPDX-License-Identifier: Apache-2.0

mod common;

use msnet::epidemics::{sis_ensemble, sis_run, SisConfig};
use proptest::prelude::*;

fn chain(n: usize, t: usize) -> msnet::Snapshots {
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    common::sequence(n, &vec![edges; t])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn larger_beta_infects_a_superset(seed in any::<u64>(), b2 in 0.0f64..1.0, gap in 0.0f64..0.5, src in 0usize..12) {
        let (seq, _) = common::hub_fixture(seed % 5);
        let b1 = (b2 + gap).min(1.0);
        let lo = sis_run(&seq, &SisConfig::new(b2, 0.0, vec![src], 2, seed)).unwrap();
        let hi = sis_run(&seq, &SisConfig::new(b1, 0.0, vec![src], 2, seed)).unwrap();
        for (a, b) in lo.infected.iter().zip(&hi.infected) {
            prop_assert!(a.iter().zip(b).all(|(&x, &y)| !x || y));
        }
    }

    #[test]
    fn prevalence_in_unit_interval(seed in any::<u64>(), beta in 0.0f64..=1.0, mu in 0.0f64..=1.0) {
        let seq = chain(8, 3);
        let tr = sis_run(&seq, &SisConfig::new(beta, mu, vec![0, 5], 3, seed)).unwrap();
        prop_assert_eq!(tr.steps(), 9);
        prop_assert!(tr.prevalence.iter().all(|&p| (0.0..=1.0).contains(&p)));
    }

    #[test]
    fn disjoint_component_stays_clean(seed in any::<u64>(), beta in 0.0f64..=1.0, mu in 0.0f64..0.5) {
        // {0,1,2} and {3,4,5} never touch
        let seq = common::sequence(6, &vec![vec![(0, 1, 1.0), (1, 2, 2.0), (3, 4, 1.0), (4, 5, 1.0)]; 3]);
        let tr = sis_run(&seq, &SisConfig::new(beta, mu, vec![1], 4, seed)).unwrap();
        prop_assert!(tr.infected.iter().all(|s| !s[3] && !s[4] && !s[5]));
    }

    #[test]
    fn no_transmission_only_shrinks(seed in any::<u64>(), mu in 0.0f64..=1.0) {
        let seq = chain(6, 2);
        let tr = sis_run(&seq, &SisConfig::new(0.0, mu, vec![0, 2, 4], 3, seed)).unwrap();
        let mut prev = tr.initial.clone();
        for s in &tr.infected {
            prop_assert!(s.iter().zip(&prev).all(|(&now, &before)| !now || before));
            prev = s.clone();
        }
    }
}

#[test]
fn wavefront_reaches_chain_end_by_step_four() {
    let tr = sis_run(&chain(5, 1), &SisConfig::new(1.0, 0.0, vec![0], 6, 0)).unwrap();
    assert!(tr.infected[3].iter().all(|&x| x));
    assert!(!tr.infected[2][4]);
}

#[test]
fn frozen_dynamics_keep_seeds() {
    let (seq, _) = common::hub_fixture(1);
    let tr = sis_run(&seq, &SisConfig::new(0.0, 0.0, vec![3, 9], 2, 4)).unwrap();
    assert!(tr.infected.iter().all(|s| *s == tr.initial));
}

#[test]
fn stronger_transmission_raises_mean_prevalence() {
    let (seq, hub) = common::hub_fixture(7);
    let hi = sis_ensemble(&seq, &SisConfig::new(0.3, 0.1, vec![hub], 5, 1000), 200).unwrap();
    let lo = sis_ensemble(&seq, &SisConfig::new(0.1, 0.1, vec![hub], 5, 1000), 200).unwrap();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(hi.mean.last() > lo.mean.last());
    assert!(mean(&hi.mean) > mean(&lo.mean));
}

#[test]
fn recovery_only_mean_decays() {
    let seq = chain(10, 4);
    let stats = sis_ensemble(&seq, &SisConfig::new(0.0, 0.5, vec![0, 3, 6, 9], 2, 77), 500).unwrap();
    assert!(stats.mean.windows(2).all(|w| w[1] <= w[0]));
    assert!(stats.mean.last().copied().unwrap() < 0.05);
}

#[test]
fn ensemble_is_reproducible() {
    let seq = chain(7, 3);
    let cfg = SisConfig::new(0.4, 0.2, vec![3], 3, 5);
    assert_eq!(sis_ensemble(&seq, &cfg, 20).unwrap(), sis_ensemble(&seq, &cfg, 20).unwrap());
    let one = sis_ensemble(&seq, &cfg, 1).unwrap();
    assert_eq!(one.mean, sis_run(&seq, &cfg).unwrap().prevalence);
    assert!(one.stddev.iter().all(|&s| s == 0.0));
}
