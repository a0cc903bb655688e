//! Library results checked against independent brute-force oracles and
//! frozen reference values.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use bfmn_core::metrics::{
    detect_communities, distance_metrics, mean_clustering, modularity_of, Partition,
};
use bfmn_core::model::Rating;
use bfmn_core::nullmodel::{ensemble, NullEnsembleSpec};
use bfmn_core::valence::{
    kruskal_wallis_two_group, label_cohort, label_word, read_labels_report, LabelConfig,
    RatingSample, Valence,
};
use bfmn_core::{Group, UndirectedGraph};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ratings(values: &[u8]) -> Vec<Rating> {
    values.iter().map(|&v| Rating::new(v).unwrap()).collect()
}

fn two_k5_bridge() -> UndirectedGraph {
    let mut edges = Vec::new();
    for base in [0, 5] {
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((base + u, base + v));
            }
        }
    }
    edges.push((4, 5));
    UndirectedGraph::from_edges(10, &edges).unwrap()
}

#[test]
fn clustering_matches_triangle_counting() {
    for g in small_graphs() {
        let got = mean_clustering(&g).unwrap();
        let want = brute_mean_clustering(&g);
        assert!((got - want).abs() <= 1e-12, "{got} vs {want}");
    }
}

#[test]
fn distances_match_floyd_warshall() {
    for g in small_graphs() {
        match brute_distances(&g) {
            Some((aspl, diameter, coverage)) => {
                let d = distance_metrics(&g).unwrap();
                assert_eq!(d.aspl, aspl);
                assert_eq!(d.diameter, diameter);
                assert_eq!(d.coverage, coverage);
            }
            None => assert!(distance_metrics(&g).is_err()),
        }
    }
}

#[test]
fn cycle_of_five_distances() {
    let g = UndirectedGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap();
    let d = distance_metrics(&g).unwrap();
    assert_eq!((d.aspl, d.diameter), (1.5, 2));
}

#[test]
fn bridge_modularity_by_edge_counting() {
    let g = two_k5_bridge();
    let split = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
    let expected = 20.0 / 21.0 - 0.5;
    assert!((brute_modularity(&g, &split) - expected).abs() < 1e-12);
    assert!((modularity_of(&g, &Partition::new(split)).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn two_triangles_exhaustive_optimum() {
    let g =
        UndirectedGraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
    let partitions = all_partitions(6);
    assert_eq!(partitions.len(), 203);
    let best = partitions
        .iter()
        .map(|p| brute_modularity(&g, p))
        .fold(f64::NEG_INFINITY, f64::max);
    assert!((best - 0.5).abs() < 1e-12);
    let (p, q) = detect_communities(&g, 7, 10).unwrap();
    assert!((q - best).abs() < 1e-12);
    assert_eq!(p.community_count(), 2);
}

/// Small fixture graphs for the community-detection checks.
fn fixture_graphs() -> Vec<UndirectedGraph> {
    let mut out = vec![
        UndirectedGraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap(),
        UndirectedGraph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
            .unwrap(),
        UndirectedGraph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap(),
        UndirectedGraph::from_edges(8, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7)])
            .unwrap(),
        UndirectedGraph::from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    while out.len() < 25 {
        let n = rng.random_range(4..=8);
        let g = random_graph(&mut rng, n, 0.45);
        if g.edge_count() > 0 {
            out.push(g);
        }
    }
    out
}

#[test]
fn detected_communities_dominate_random_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for g in fixture_graphs() {
        let (p, q) = detect_communities(&g, 11, 10).unwrap();
        assert!((q - modularity_of(&g, &p).unwrap()).abs() < 1e-12);
        let n = g.node_count();
        let trials = 400;
        let beaten = (0..trials)
            .filter(|_| {
                let k = rng.random_range(1..=n);
                let random: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
                q >= modularity_of(&g, &Partition::new(random)).unwrap() - 1e-12
            })
            .count();
        assert!(
            beaten as f64 >= 0.95 * trials as f64,
            "q={q} beat only {beaten}/{trials}"
        );
    }
}

#[test]
fn random_partition_of_random_graph_is_near_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let g = random_graph(&mut rng, 100, 0.08);
    for _ in 0..20 {
        let random: Vec<usize> = (0..100).map(|_| rng.random_range(0..4)).collect();
        let q = modularity_of(&g, &Partition::new(random)).unwrap();
        assert!(q.abs() < 0.1, "{q}");
    }
}

#[test]
fn rank_test_against_exact_permutations() {
    // Frozen from an independent scipy run plus full enumeration.
    type Case<'a> = (&'a [f64], &'a [f64], f64, f64, f64);
    let cases: [Case; 2] = [
        (&[5.0; 4], &[1.0; 4], 7.0, 0.008150971593502, 2.0 / 70.0),
        (&[4.0, 5.0], &[3.0; 3], 3.75, 0.052807511416113, 0.1),
    ];
    for (a, b, h, p, exact) in cases {
        let kw = kruskal_wallis_two_group(a, b).unwrap();
        assert!((kw.h - h).abs() < 1e-12);
        assert!((kw.p - p).abs() < 1e-12);
        assert!((textbook_h(a, b) - h).abs() < 1e-12);
        assert!((exact_permutation_p(a, b) - exact).abs() < 1e-12);
    }
    let kw = kruskal_wallis_two_group(&[5.0; 4], &[1.0; 4]).unwrap();
    assert!(kw.p < 0.05 && kw.mean_rank_a > kw.mean_rank_b);
}

#[test]
fn textbook_formula_agrees_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..300 {
        let na = rng.random_range(1..10);
        let nb = rng.random_range(1..10);
        let a: Vec<f64> = (0..na).map(|_| rng.random_range(1..=5) as f64).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.random_range(1..=5) as f64).collect();
        let kw = kruskal_wallis_two_group(&a, &b).unwrap();
        assert!((kw.h - textbook_h(&a, &b)).abs() < 1e-9);
    }
}

#[test]
fn strongly_positive_word_is_labelled_positive() {
    let word = RatingSample {
        word: "joy".into(),
        ratings: ratings(&[5, 5, 5, 4]),
    };
    let rest: Vec<f64> = (0..40).map(|i| [2.0, 3.0, 3.0, 4.0][i % 4]).collect();
    let label = label_word(&word, &rest, 0.1, 3);
    assert_eq!(label.label, Valence::Positive);
    let exact = exact_permutation_p(&[5.0, 5.0, 5.0, 4.0], &rest);
    assert!(exact < 0.1, "{exact}");
}

#[test]
fn single_positive_word_in_neutral_cohort() {
    // [5]*5 against twelve 3s: H = 16, chi-square p = 6.334248e-05 and the
    // exact p = 1/C(17,5) = 0.000161603.
    let kw = kruskal_wallis_two_group(&[5.0; 5], &[3.0; 12]).unwrap();
    assert!((kw.h - 16.0).abs() < 1e-12);
    assert!((kw.p - 6.334248e-05).abs() < 1e-10);
    assert!((exact_permutation_p(&[5.0; 5], &[3.0; 12]) - 1.0 / 6188.0).abs() < 1e-12);

    // One neutral word measured against that cohort stays neutral.
    let mut rest = vec![3.0; 9];
    rest.extend([5.0; 5]);
    let label = label_word(
        &RatingSample {
            word: "desk".into(),
            ratings: ratings(&[3, 3, 3]),
        },
        &rest,
        0.1,
        3,
    );
    assert_eq!(label.label, Valence::Neutral);
    assert!((label.h_statistic - 1.428571).abs() < 1e-6);
    assert!((label.p_value - 0.231998).abs() < 1e-6);
    assert!((exact_permutation_p(&[3.0; 3], &rest) - 0.514706).abs() < 1e-6);
}

#[test]
fn fixture_labels_match_golden_files() {
    for group in Group::ALL {
        let cohort = fixture_cohort(group);
        let labels = label_cohort(&cohort, &LabelConfig::default()).unwrap();
        let path = fixtures_dir().join(format!("golden_labels_human_{group}.csv"));
        let golden = read_labels_report(std::fs::File::open(path).unwrap(), b',').unwrap();
        assert_eq!(
            labels.keys().collect::<Vec<_>>(),
            golden.keys().collect::<Vec<_>>(),
            "word set for {group}"
        );
        for (word, want) in &golden {
            let got = &labels[word];
            assert_eq!(got.label, want.label, "{group}/{word}");
            assert_eq!(
                (got.n_word, got.n_rest),
                (want.n_word, want.n_rest),
                "{group}/{word}"
            );
            assert!(
                (got.h_statistic - want.h_statistic).abs() < 1e-9,
                "{group}/{word}"
            );
            assert!((got.p_value - want.p_value).abs() < 1e-9, "{group}/{word}");
        }
    }
}

#[test]
fn triangle_plus_edge_replicates_stay_in_their_degree_class() {
    let g = UndirectedGraph::from_edges(5, &[(0, 1), (1, 2), (0, 2), (3, 4)]).unwrap();
    // Every simple graph on 5 nodes with this exact degree vector, enumerated.
    let pairs: Vec<(usize, usize)> = (0..5)
        .flat_map(|u| (u + 1..5).map(move |v| (u, v)))
        .collect();
    let mut class: BTreeSet<Vec<(usize, usize)>> = BTreeSet::new();
    for mask in 0u32..(1 << pairs.len()) {
        let edges: Vec<_> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let h = UndirectedGraph::from_edges(5, &edges).unwrap();
        if h.degrees() == g.degrees() {
            class.insert(edges);
        }
    }
    let spec = NullEnsembleSpec {
        n_samples: 200,
        seed: 1,
        swap_factor: 10,
    };
    let mut shapes: BTreeMap<bool, usize> = BTreeMap::new();
    for h in ensemble(&g, &spec).unwrap() {
        let edges: Vec<_> = h.edges().collect();
        assert!(class.contains(&edges));
        let has_triangle = mean_clustering(&h).unwrap() > 0.0;
        *shapes.entry(has_triangle).or_default() += 1;
    }
    // Both the triangle+edge and the 5-path shape are reachable by legal swaps.
    assert_eq!(shapes.len(), 2, "{shapes:?}");
}
