//! Acceptance criteria, one PASS/FAIL/SKIP line each.
//!
//! Every criterion is a list of named sub-checks. A few sub-checks cannot
//! hold for any implementation of the stated method; they are listed in
//! `EXPECTED_FAILURES` with the reason, still print FAIL with the measured
//! numbers, and make the run fail if they ever start passing.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use bfmn_cli::config::{ConfigArgs, RunConfig};
use bfmn_cli::pipeline::{run_pipeline, OutputTree};
use bfmn_core::ingest::{
    exclude_sparse_participants, parse_transcript, render_transcript, IngestError,
};
use bfmn_core::metrics::{
    detect_communities, distance_metrics, mean_clustering, modularity_of, CommunityConfig, Metric,
    Partition,
};
use bfmn_core::nullmodel::{
    ensemble, null_test, null_test_suite, randomize_degree_preserving, NullEnsembleSpec,
};
use bfmn_core::valence::{kruskal_wallis_two_group, KruskalWallis, Valence, DEFAULT_ALPHA};
use bfmn_core::{
    AssociationEntry, CueList, CueResponse, Group, ParticipantRecord, Rating, Source,
    UndirectedGraph,
};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Sub-checks that no faithful implementation can pass, with the reason.
const EXPECTED_FAILURES: &[(&str, &str)] = &[
    (
        "C4.sweep",
        "the df=1 chi-square tail differs from the exact permutation p by up to ~0.7 at |a|+|b| <= 8 \
         (e.g. a=[1], b=[2]: 0.317 vs 1.0)",
    ),
    (
        "C4.example_45_333",
        "a=[4,5], b=[3,3,3]: chi-square p 0.0528 vs exact 0.1 (1 of 10 arrangements), gap 0.047 > 0.02",
    ),
];

struct Check {
    id: String,
    ok: bool,
    detail: String,
}

#[derive(Default)]
struct Criterion {
    checks: Vec<Check>,
    skipped: Option<String>,
}

impl Criterion {
    fn check(&mut self, id: &str, ok: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            id: id.to_string(),
            ok,
            detail: detail.into(),
        });
    }
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn graph(n: usize, edges: &[(usize, usize)]) -> UndirectedGraph {
    UndirectedGraph::from_edges(n, edges).unwrap()
}

fn complete(n: usize) -> UndirectedGraph {
    let edges: Vec<_> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .collect();
    graph(n, &edges)
}

fn star(leaves: usize) -> UndirectedGraph {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    graph(leaves + 1, &edges)
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
    graph(10, &edges)
}

/// Random simple graph with exactly `m` edges.
fn random_graph_m(rng: &mut ChaCha8Rng, n: usize, m: usize) -> UndirectedGraph {
    let mut g = UndirectedGraph::new(n);
    while g.edge_count() < m {
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        if u != v {
            g.add_edge(u, v).unwrap();
        }
    }
    g
}

fn c1_clustering() -> Criterion {
    let mut c = Criterion::default();
    let start = Instant::now();
    let graphs = small_graphs();
    let worst = graphs
        .iter()
        .map(|g| (mean_clustering(g).unwrap() - brute_mean_clustering(g)).abs())
        .fold(0.0, f64::max);
    c.check(
        "oracle",
        worst <= 1e-12,
        format!("200 graphs, max |diff| = {worst:.1e}"),
    );
    let k5 = mean_clustering(&complete(5)).unwrap();
    c.check("k5", k5 == 1.0, format!("K5 = {k5}"));
    let stars_zero = (2..8).all(|k| mean_clustering(&star(k)).unwrap() == 0.0);
    c.check("stars", stars_zero, "stars with 2..7 leaves = 0");
    let p3 = mean_clustering(&graph(3, &[(0, 1), (1, 2)])).unwrap();
    c.check("p3", p3 == 0.0, format!("P3 = {p3}"));
    let secs = start.elapsed().as_secs_f64();
    c.check("runtime", secs < 5.0, format!("{secs:.3} s"));
    c
}

fn c2_distances() -> Criterion {
    let mut c = Criterion::default();
    let mut mismatches = 0;
    for g in small_graphs() {
        let ok = match (brute_distances(&g), distance_metrics(&g)) {
            (Some((aspl, diameter, coverage)), Ok(d)) => {
                d.aspl == aspl && d.diameter == diameter && d.coverage == coverage
            }
            (None, Err(_)) => true,
            _ => false,
        };
        mismatches += usize::from(!ok);
    }
    c.check(
        "floyd_warshall",
        mismatches == 0,
        format!("200 graphs, {mismatches} mismatches"),
    );
    let p3 = distance_metrics(&graph(3, &[(0, 1), (1, 2)])).unwrap();
    c.check(
        "p3",
        p3.aspl == 4.0 / 3.0 && p3.diameter == 2,
        format!("P3 = ({}, {})", p3.aspl, p3.diameter),
    );
    let c5 = distance_metrics(&graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])).unwrap();
    c.check(
        "c5",
        c5.aspl == 1.5 && c5.diameter == 2,
        format!("C5 = ({}, {})", c5.aspl, c5.diameter),
    );
    c
}

fn c3_modularity() -> Criterion {
    let mut c = Criterion::default();
    let bridge = two_k5_bridge();
    let split = Partition::new(vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
    let q = modularity_of(&bridge, &split).unwrap();
    let want = 20.0 / 21.0 - 0.5;
    c.check(
        "bridge_q",
        (q - want).abs() <= 1e-12,
        format!("Q = {q:.15}, |diff| = {:.1e}", (q - want).abs()),
    );

    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut nonzero = 0;
    let mut tried = 0;
    while tried < 50 {
        let n = rng.random_range(3..30);
        let g = random_graph(&mut rng, n, 0.3);
        if g.edge_count() == 0 {
            continue;
        }
        tried += 1;
        nonzero += usize::from(modularity_of(&g, &Partition::single(n)).unwrap() != 0.0);
    }
    c.check(
        "single_community",
        nonzero == 0,
        format!("50 graphs, {nonzero} non-zero"),
    );

    let (p, q) = detect_communities(&bridge, 0, 10).unwrap();
    let recovered = p.canonical() == split.canonical();
    c.check(
        "bridge_recovered",
        recovered && (q - want).abs() < 1e-12,
        format!("q = {q:.6}, split recovered = {recovered}"),
    );

    let mut fixtures: Vec<UndirectedGraph> = vec![
        bridge,
        graph(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]),
        complete(5),
        star(4),
        graph(3, &[(0, 1), (1, 2)]),
        graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
    ];
    fixtures.extend(small_graphs().into_iter().filter(|g| g.edge_count() > 0));
    let inconsistent = fixtures
        .iter()
        .filter(|g| {
            let (p, q) = detect_communities(g, 3, 10).unwrap();
            (q - modularity_of(g, &p).unwrap()).abs() > 1e-12
        })
        .count();
    c.check(
        "self_consistency",
        inconsistent == 0,
        format!("{} fixtures, {inconsistent} inconsistent", fixtures.len()),
    );
    c
}

fn c4_rank_test() -> Criterion {
    let mut c = Criterion::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst = (0.0f64, Vec::new(), Vec::new(), 0.0, 0.0);
    for _ in 0..100 {
        let na = rng.random_range(1..=7);
        let nb = rng.random_range(1..=8 - na);
        let a: Vec<f64> = (0..na).map(|_| rng.random_range(1..=5) as f64).collect();
        let b: Vec<f64> = (0..nb).map(|_| rng.random_range(1..=5) as f64).collect();
        let chi = kruskal_wallis_two_group(&a, &b).unwrap().p;
        let exact = exact_permutation_p(&a, &b);
        if (chi - exact).abs() > worst.0 {
            worst = ((chi - exact).abs(), a, b, chi, exact);
        }
    }
    c.check(
        "sweep",
        worst.0 <= 0.05,
        format!(
            "100 cases, max |chi2 p - exact p| = {:.3} at a={:?} b={:?} ({:.3} vs {:.3})",
            worst.0, worst.1, worst.2, worst.3, worst.4
        ),
    );

    let same = kruskal_wallis_two_group(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
    c.check(
        "identical",
        same.h == 0.0 && same.p == 1.0,
        format!("(H, p) = ({}, {})", same.h, same.p),
    );
    let tied = kruskal_wallis_two_group(&[3.0; 4], &[3.0; 5]).unwrap();
    c.check(
        "all_tied",
        tied.h == 0.0 && tied.p == 1.0,
        format!("(H, p) = ({}, {})", tied.h, tied.p),
    );

    let kw = kruskal_wallis_two_group(&[5.0; 4], &[1.0; 4]).unwrap();
    let exact = exact_permutation_p(&[5.0; 4], &[1.0; 4]);
    c.check(
        "example_5555_1111",
        kw.p < 0.05 && kw.mean_rank_a > kw.mean_rank_b && (exact - 2.0 / 70.0).abs() < 1e-12,
        format!(
            "chi2 p = {:.6}, exact p = {exact:.6} over 70 arrangements",
            kw.p
        ),
    );
    let kw = kruskal_wallis_two_group(&[4.0, 5.0], &[3.0; 3]).unwrap();
    let exact = exact_permutation_p(&[4.0, 5.0], &[3.0; 3]);
    c.check(
        "example_45_333",
        (kw.p - exact).abs() <= 0.02,
        format!(
            "chi2 p = {:.4}, exact p = {exact:.4}, gap {:.4}",
            kw.p,
            (kw.p - exact).abs()
        ),
    );

    // A label only depends on ranks, so any strictly increasing map of the
    // ratings must leave it unchanged.
    let mut changed = 0;
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let transforms: [fn(f64) -> f64; 3] = [|x| x * x * x, |x| x.ln(), |x| 10.0 * x + 100.0];
    for _ in 0..200 {
        let a: Vec<f64> = (0..rng.random_range(3..12))
            .map(|_| rng.random_range(1..=5) as f64)
            .collect();
        let b: Vec<f64> = (0..rng.random_range(3..40))
            .map(|_| rng.random_range(1..=5) as f64)
            .collect();
        let base = kruskal_wallis_two_group(&a, &b).unwrap();
        for f in transforms {
            let t = kruskal_wallis_two_group(
                &a.iter().map(|&x| f(x)).collect::<Vec<_>>(),
                &b.iter().map(|&x| f(x)).collect::<Vec<_>>(),
            )
            .unwrap();
            changed += usize::from(label_of(&t) != label_of(&base) || (t.p - base.p).abs() > 1e-12);
        }
    }
    c.check(
        "monotone_invariance",
        changed == 0,
        format!("200 samples x 3 transforms, {changed} label changes"),
    );
    c
}

fn label_of(kw: &KruskalWallis) -> Valence {
    if kw.p >= DEFAULT_ALPHA {
        Valence::Neutral
    } else {
        match kw.mean_rank_a.total_cmp(&kw.mean_rank_b) {
            std::cmp::Ordering::Greater => Valence::Positive,
            std::cmp::Ordering::Less => Valence::Negative,
            std::cmp::Ordering::Equal => Valence::Neutral,
        }
    }
}

fn is_simple(g: &UndirectedGraph) -> bool {
    let mut seen = std::collections::HashSet::new();
    g.edges()
        .all(|(u, v)| u != v && seen.insert((u.min(v), u.max(v))))
}

/// Kolmogorov-Smirnov distance of `sample` from the uniform law on [0, 1].
fn ks_uniform(sample: &[f64]) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    s.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

fn c5_null_ensemble() -> Criterion {
    let mut c = Criterion::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = random_graph_m(&mut rng, 100, 250);
    let spec = NullEnsembleSpec {
        n_samples: 500,
        seed: 7,
        swap_factor: 10,
    };
    let reps = ensemble(&g, &spec).unwrap();
    let bad = reps
        .iter()
        .filter(|h| h.degrees() != g.degrees() || h.edge_count() != g.edge_count() || !is_simple(h))
        .count();
    let moved = reps
        .iter()
        .filter(|h| h.edges().any(|(u, v)| !g.has_edge(u, v)))
        .count();
    c.check(
        "degree_preservation",
        reps.len() == 500 && bad == 0 && moved == 500,
        format!("500 replicates of 100 nodes / 250 edges, {bad} violate degrees/simplicity/|E|, {moved} differ from the input"),
    );

    // Self-calibration: a graph drawn from the null ensemble, tested against
    // a fresh ensemble around itself, must give uniform p-values.
    let base = random_graph_m(&mut rng, 60, 240);
    let p_values: Vec<f64> = (0..200u64)
        .map(|t| {
            let g_t = randomize_degree_preserving(&base, 10_000 + t, 10).unwrap();
            let spec = NullEnsembleSpec {
                n_samples: 99,
                seed: t,
                swap_factor: 10,
            };
            null_test(&g_t, "mean_cc", mean_clustering, &spec)
                .unwrap()
                .p_value
        })
        .collect();
    let ks = ks_uniform(&p_values);
    c.check(
        "self_calibration",
        ks < 0.15,
        format!("200 trials x 99 replicates, KS distance {ks:.4}"),
    );

    let g = random_graph_m(&mut rng, 300, 600);
    let start = Instant::now();
    let reports = null_test_suite(
        &g,
        &Metric::ALL,
        &CommunityConfig::default(),
        &NullEnsembleSpec {
            n_samples: 500,
            seed: 1,
            swap_factor: 10,
        },
    )
    .unwrap();
    let secs = start.elapsed().as_secs_f64();
    c.check(
        "runtime",
        secs < 10.0 && reports.len() == 4,
        format!("all 4 metrics, 500 replicates, 300 nodes / 600 edges in {secs:.2} s"),
    );
    c
}

type ErrorMatcher = fn(&IngestError) -> bool;

fn c6_parser() -> Criterion {
    let mut c = Criterion::default();
    let cues = CueList::default();
    let path = fixtures().join("transcripts/simulated_academic_1.txt");
    let text = std::fs::read_to_string(&path).unwrap();
    let parse = |t: &str| parse_transcript(t, "p1", Source::Simulated, Group::Academic, &cues);
    let record = parse(&text).unwrap();
    let rendered = render_transcript(&record).unwrap();
    let again = parse(&rendered).unwrap();
    c.check(
        "round_trip",
        again == record && rendered == text && record.responses.len() == 10,
        format!(
            "10-cue golden file, records equal: {}, text equal: {}",
            again == record,
            rendered == text
        ),
    );

    let line = |cue: &str, rest: &str| format!("\"{cue}\"=\"4\"={rest}\n");
    let ok_tail = "\"a\"=\"3\"=\"b\"=\"4\"=\"c\"=\"5\"";
    let corpus: Vec<(&str, String, ErrorMatcher)> = vec![
        (
            "seven_fields",
            "\"art\"=\"4\"=\"a\"=\"3\"=\"b\"=\"4\"=\"c\"\n".into(),
            |e| matches!(e, IngestError::WrongFieldCount { found: 7, .. }),
        ),
        (
            "nine_fields",
            line("art", &format!("{ok_tail}=\"x\"")),
            |e| matches!(e, IngestError::WrongFieldCount { found: 9, .. }),
        ),
        ("unknown_cue", line("painting", ok_tail), |e| {
            matches!(e, IngestError::UnknownCue(_))
        }),
        (
            "rating_out_of_range",
            line("art", "\"a\"=\"6\"=\"b\"=\"4\"=\"c\"=\"5\""),
            |e| matches!(e, IngestError::MalformedLine { .. }),
        ),
        (
            "rating_not_numeric",
            line("art", "\"a\"=\"four\"=\"b\"=\"4\"=\"c\"=\"5\""),
            |e| matches!(e, IngestError::MalformedLine { .. }),
        ),
        (
            "unterminated_quote",
            line("art", "\"a=\"3\"=\"b\"=\"4\"=\"c\"=\"5\""),
            |e| matches!(e, IngestError::MalformedLine { .. }),
        ),
        (
            "duplicate_cue",
            format!("{}{}", line("art", ok_tail), line("art", ok_tail)),
            |e| matches!(e, IngestError::MalformedLine { .. }),
        ),
    ];
    let mut wrong = Vec::new();
    for (name, text, expected) in &corpus {
        match parse(text) {
            Err(e) if expected(&e) => {}
            other => wrong.push(format!("{name}: {other:?}")),
        }
    }
    c.check(
        "malformed_corpus",
        wrong.is_empty(),
        format!("{} cases, wrong: {wrong:?}", corpus.len()),
    );

    let with_blanks = |id: &str, blanks: usize| {
        let mut left = blanks;
        let responses = cues
            .iter()
            .map(|cue| CueResponse {
                cue: cue.to_string(),
                cue_rating: Rating::new(3),
                associations: (0..3)
                    .map(|k| {
                        let blank = left > 0;
                        left = left.saturating_sub(1);
                        AssociationEntry::new(
                            if blank {
                                String::new()
                            } else {
                                format!("{cue}{k}")
                            },
                            Rating::new(4),
                        )
                    })
                    .collect(),
            })
            .collect();
        ParticipantRecord {
            participant_id: id.into(),
            source: Source::Human,
            group: Group::Trainee,
            responses,
        }
    };
    let out = exclude_sparse_participants(
        vec![with_blanks("seven", 7), with_blanks("eight", 8)],
        &cues,
        0.25,
    )
    .unwrap();
    let kept: Vec<_> = out.kept.iter().map(|r| r.participant_id.as_str()).collect();
    let dropped: Vec<_> = out
        .dropped
        .iter()
        .map(|r| r.participant_id.as_str())
        .collect();
    c.check(
        "blank_rule",
        kept == ["seven"] && dropped == ["eight"],
        format!("kept {kept:?}, dropped {dropped:?}"),
    );
    c
}

fn read_tree(root: &Path) -> OutputTree {
    fn walk(dir: &Path, root: &Path, out: &mut OutputTree) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                out.insert(
                    path.strip_prefix(root).unwrap().to_path_buf(),
                    std::fs::read(&path).unwrap(),
                );
            }
        }
    }
    let mut out = OutputTree::new();
    walk(root, root, &mut out);
    out
}

fn run_binary(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_bfmn"))
        .args(args)
        .env_remove("BFMN_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(String::from_utf8_lossy(&out.stderr).into_owned())
    }
}

fn c7_determinism() -> Criterion {
    let mut c = Criterion::default();
    let tmp = tempfile::tempdir().unwrap();
    let config = fixtures().join("pipeline.toml");
    let mut trees = Vec::new();
    for workers in ["1", "4"] {
        let out = tmp.path().join(format!("w{workers}"));
        if let Err(e) = run_binary(&[
            "pipeline",
            "--config",
            config.to_str().unwrap(),
            "--seed",
            "42",
            "--workers",
            workers,
            "--output",
            out.to_str().unwrap(),
        ]) {
            c.check("pipeline_runs", false, e);
            return c;
        }
        trees.push(read_tree(&out));
    }
    let nulltests = trees[0]
        .keys()
        .filter(|p| p.ends_with("nulltest.json"))
        .count();
    let differing: Vec<_> = trees[0]
        .keys()
        .chain(trees[1].keys())
        .filter(|k| trees[0].get(*k) != trees[1].get(*k))
        .collect();
    c.check(
        "byte_identical",
        differing.is_empty() && nulltests > 0,
        format!(
            "seed 42, workers 1 vs 4, {} files incl. {nulltests} null-test reports, differing: {differing:?}",
            trees[0].len()
        ),
    );
    c
}

/// Published clustering coefficients and p-value category per cohort.
/// `None` marks a value published as "< .001".
const PUBLISHED: [(&str, f64, Option<f64>); 6] = [
    ("human_trainee", 0.572, None),
    ("human_expert", 0.358, Some(0.002)),
    ("human_academic", 0.417, None),
    ("simulated_trainee", 0.273, None),
    ("simulated_expert", 0.172, Some(0.004)),
    ("simulated_academic", 0.257, Some(0.002)),
];

#[derive(Debug, PartialEq)]
enum PCategory {
    BelowAllReplicates,
    Significant,
    NotSignificant,
}

fn category(p: f64, n_samples: usize) -> PCategory {
    if (p - 1.0 / (n_samples + 1) as f64).abs() < 1e-9 {
        PCategory::BelowAllReplicates
    } else if p < 0.05 {
        PCategory::Significant
    } else {
        PCategory::NotSignificant
    }
}

fn c8_study_reproduction() -> Criterion {
    let mut c = Criterion::default();
    let Some(config) = std::env::var_os("BFMN_STUDY_CONFIG") else {
        c.skipped =
            Some("BFMN_STUDY_CONFIG not set; the original study data are not available".into());
        return c;
    };
    let args = ConfigArgs {
        config: Some(PathBuf::from(config)),
        ..ConfigArgs::default()
    };
    let tree = match RunConfig::load(&args).and_then(|cfg| run_pipeline(&cfg, false)) {
        Ok(tree) => tree,
        Err(e) => {
            c.check("pipeline_runs", false, e.to_string());
            return c;
        }
    };
    for (cohort, cc, p) in PUBLISHED {
        let read = |file: &str| -> Option<serde_json::Value> {
            serde_json::from_slice(tree.get(&Path::new(cohort).join(file))?).ok()
        };
        let (Some(metrics), Some(null)) = (read("metrics.json"), read("nulltest.json")) else {
            c.check(cohort, false, "cohort missing from the output");
            continue;
        };
        let got_cc = metrics["mean_cc"].as_f64().unwrap_or(f64::NAN);
        let n = null["n_samples"].as_u64().unwrap_or(0) as usize;
        let got_p = null["tests"]
            .as_array()
            .and_then(|t| t.iter().find(|r| r["metric"] == "mean_cc"))
            .and_then(|r| r["p_value"].as_f64())
            .unwrap_or(f64::NAN);
        let want = match p {
            None => PCategory::BelowAllReplicates,
            Some(p) if p < 0.05 => PCategory::Significant,
            Some(_) => PCategory::NotSignificant,
        };
        let got = category(got_p, n);
        c.check(
            cohort,
            (got_cc - cc).abs() <= 0.02 && got == want,
            format!("CC {got_cc:.3} vs {cc:.3}, p {got_p:.4} ({got:?}) vs {want:?}"),
        );
    }
    c
}

type CriterionFn = fn() -> Criterion;

fn main() {
    let criteria: [(&str, &str, CriterionFn); 8] = [
        ("C1", "clustering oracle", c1_clustering),
        ("C2", "distance oracle", c2_distances),
        ("C3", "modularity", c3_modularity),
        ("C4", "rank test", c4_rank_test),
        ("C5", "null ensemble", c5_null_ensemble),
        ("C6", "parser", c6_parser),
        ("C7", "pipeline determinism", c7_determinism),
        ("C8", "study reproduction", c8_study_reproduction),
    ];
    let mut unexpected = Vec::new();
    for (id, title, run) in criteria {
        let result = run();
        if let Some(reason) = &result.skipped {
            println!("SKIP {id} {title}: {reason}");
            continue;
        }
        let failed: Vec<&Check> = result.checks.iter().filter(|k| !k.ok).collect();
        println!(
            "{} {id} {title}",
            if failed.is_empty() { "PASS" } else { "FAIL" }
        );
        for check in &result.checks {
            let full = format!("{id}.{}", check.id);
            let expected = EXPECTED_FAILURES.iter().find(|(name, _)| *name == full);
            let mark = match (check.ok, expected) {
                (true, None) => "ok",
                (false, Some(_)) => "expected failure",
                (false, None) => {
                    unexpected.push(format!("{full} failed"));
                    "FAILED"
                }
                (true, Some(_)) => {
                    unexpected.push(format!(
                        "{full} passed but is listed as an expected failure"
                    ));
                    "UNEXPECTED PASS"
                }
            };
            println!("    {full}: {mark} ({})", check.detail);
            if let (false, Some((_, why))) = (check.ok, expected) {
                println!("        known: {why}");
            }
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected acceptance results: {unexpected:?}");
        std::process::exit(1);
    }
}
