//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use bfmn_core::ingest::{exclude_sparse_participants, parse_tabular, ColumnMapping};
use bfmn_core::normalize::{filter_idiosyncratic, normalize_cohort, LemmaMap, NormalizedCohort};
use bfmn_core::{CueList, Group, UndirectedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Erdős–Rényi style graph with `n` nodes and edge probability `p`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> UndirectedGraph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    UndirectedGraph::from_edges(n, &edges).unwrap()
}

/// The 200 small graphs used by the clustering and distance oracles.
pub fn small_graphs() -> Vec<UndirectedGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..200)
        .map(|_| {
            let n = rng.random_range(2..=12);
            let p = rng.random_range(0.1..0.9);
            random_graph(&mut rng, n, p)
        })
        .collect()
}

pub fn adjacency(g: &UndirectedGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = true;
        a[v][u] = true;
    }
    a
}

/// Mean clustering by enumerating node triples.
pub fn brute_mean_clustering(g: &UndirectedGraph) -> f64 {
    let a = adjacency(g);
    let n = a.len();
    let mut total = 0.0;
    for i in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&j| a[i][j]).collect();
        let k = nb.len();
        if k < 2 {
            continue;
        }
        let mut links = 0usize;
        for x in 0..k {
            for y in x + 1..k {
                if a[nb[x]][nb[y]] {
                    links += 1;
                }
            }
        }
        total += links as f64 / (k * (k - 1) / 2) as f64;
    }
    total / n as f64
}

/// Floyd–Warshall ASPL and diameter over the largest component. Ties in
/// component size go to the component holding the smallest node index.
pub fn brute_distances(g: &UndirectedGraph) -> Option<(f64, u32, f64)> {
    let a = adjacency(g);
    let n = a.len();
    const INF: u32 = u32::MAX / 4;
    let mut d = vec![vec![INF; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if a[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    let mut best: Vec<usize> = Vec::new();
    let mut seen = vec![false; n];
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| d[i][j] < INF).collect();
        for &j in &comp {
            seen[j] = true;
        }
        if comp.len() > best.len() {
            best = comp;
        }
    }
    if best.len() < 2 {
        return None;
    }
    let (mut sum, mut pairs, mut diam) = (0u64, 0u64, 0u32);
    for &i in &best {
        for &j in &best {
            if i != j {
                sum += d[i][j] as u64;
                pairs += 1;
                diam = diam.max(d[i][j]);
            }
        }
    }
    Some((
        sum as f64 / pairs as f64,
        diam,
        best.len() as f64 / n as f64,
    ))
}

/// Modularity straight from the definition, by counting edges.
pub fn brute_modularity(g: &UndirectedGraph, assignment: &[usize]) -> f64 {
    let m = g.edge_count() as f64;
    let k = assignment.iter().max().map_or(0, |&c| c + 1);
    let mut inside = vec![0.0; k];
    let mut degree = vec![0.0; k];
    for (u, v) in g.edges() {
        if assignment[u] == assignment[v] {
            inside[assignment[u]] += 1.0;
        }
        degree[assignment[u]] += 1.0;
        degree[assignment[v]] += 1.0;
    }
    (0..k)
        .map(|c| inside[c] / m - (degree[c] / (2.0 * m)).powi(2))
        .sum()
}

/// Every set partition of `n` items as restricted growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, max: usize, n: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 0..=max + 1 {
            prefix.push(c);
            rec(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 {
        let mut prefix = vec![0];
        rec(&mut prefix, 0, n, &mut out);
    }
    out
}

/// Tie-corrected Kruskal-Wallis H for two groups, from the textbook formula.
pub fn textbook_h(a: &[f64], b: &[f64]) -> f64 {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    pooled.sort_by(f64::total_cmp);
    let n = pooled.len() as f64;
    let midrank = |x: f64| {
        let lo = pooled.iter().position(|&y| y == x).unwrap() as f64;
        let count = pooled.iter().filter(|&&y| y == x).count() as f64;
        lo + (count + 1.0) / 2.0
    };
    let ra: f64 = a.iter().map(|&x| midrank(x)).sum();
    let rb: f64 = b.iter().map(|&x| midrank(x)).sum();
    let h = 12.0 / (n * (n + 1.0)) * (ra * ra / a.len() as f64 + rb * rb / b.len() as f64)
        - 3.0 * (n + 1.0);
    let mut ties = 0.0;
    let mut i = 0;
    while i < pooled.len() {
        let t = pooled[i..].iter().take_while(|&&y| y == pooled[i]).count() as f64;
        ties += t * t * t - t;
        i += t as usize;
    }
    let c = 1.0 - ties / (n * n * n - n);
    if c == 0.0 {
        0.0
    } else {
        h / c
    }
}

/// Exact permutation p-value: the share of all ways to split the pooled
/// sample into groups of the original sizes whose H is at least the observed H.
pub fn exact_permutation_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let observed = textbook_h(a, b);
    let n = pooled.len();
    let k = a.len();
    let (mut hits, mut total) = (0u64, 0u64);
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let mut in_a = vec![false; n];
        for &i in &idx {
            in_a[i] = true;
        }
        let ga: Vec<f64> = (0..n).filter(|&i| in_a[i]).map(|i| pooled[i]).collect();
        let gb: Vec<f64> = (0..n).filter(|&i| !in_a[i]).map(|i| pooled[i]).collect();
        total += 1;
        if textbook_h(&ga, &gb) >= observed - 1e-9 {
            hits += 1;
        }
        // next k-combination of 0..n
        let mut i = k;
        loop {
            if i == 0 {
                return hits as f64 / total as f64;
            }
            i -= 1;
            if idx[i] < n - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The synthetic fixture cohort for one human group: parsed, sparse
/// participants dropped, normalized and filtered at two participants.
pub fn fixture_cohort(group: Group) -> NormalizedCohort {
    let cues = CueList::default();
    let file = std::fs::File::open(fixtures_dir().join("synthetic_12.csv")).unwrap();
    let records = parse_tabular(file, &ColumnMapping::default(), &cues).unwrap();
    let records: Vec<_> = records.into_iter().filter(|r| r.group == group).collect();
    let kept = exclude_sparse_participants(records, &cues, 0.25)
        .unwrap()
        .kept;
    let normalized = normalize_cohort(&kept, &LemmaMap::default());
    filter_idiosyncratic(&normalized, 2).unwrap()
}
