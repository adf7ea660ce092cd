use std::path::PathBuf;

use seqrecon::events::Scanner;
use seqrecon::{
    count_maximal_shared_subpaths, difference_graph, enumerate_reconstructions, extract_kmer_set,
    find_certificate, is_unique, label_multiplicities, true_multiplicities, Budget, DeBruijnGraph,
    EventKind, KmerSet, Rearrangement, SourceSet, Uniqueness,
};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn load(name: &str, k: usize) -> (SourceSet, KmerSet) {
    let x = SourceSet::from_text(&fixture(&format!("{name}.sources"))).unwrap();
    let y = KmerSet::from_text(&fixture(&format!("{name}.kmers"))).unwrap();
    assert_eq!(y.k(), k);
    assert_eq!(extract_kmer_set(&x, k).unwrap(), y, "{name} files disagree");
    (x, y)
}

fn assert_no_simple_events(x: &SourceSet, k: usize) {
    let scanner = Scanner::new(x, k).unwrap();
    for kind in [EventKind::A, EventKind::B, EventKind::C, EventKind::D] {
        assert_eq!(scanner.detect(kind), None, "unexpected event {kind}");
    }
}

#[test]
fn two_path_fixture() {
    let (x, y) = load("fig2a", 10);
    assert_no_simple_events(&x, 10);
    let r = enumerate_reconstructions(&y, 2, 40, Budget::unbounded()).unwrap();
    assert!(r.exhausted);
    assert_eq!(r.solutions.len(), 2);
    assert!(r.solutions.contains(&x));

    let alt = r.solutions.iter().find(|s| **s != x).unwrap();
    let d = difference_graph(&x, alt, 10).unwrap();
    assert!(d.symmetric);
    assert_eq!(d.c, 2);
    assert_eq!(count_maximal_shared_subpaths(&d), 2);

    let cert = find_certificate(&x, 10).unwrap().unwrap();
    assert_eq!(cert.rearrangement, Rearrangement::SwapH);
    assert_eq!(&cert.alternative, alt);
}

#[test]
fn four_path_fixture() {
    let (x, y) = load("fig2b", 12);
    assert_no_simple_events(&x, 12);
    assert_eq!(Scanner::new(&x, 12).unwrap().detect(EventKind::H), None);
    let r = enumerate_reconstructions(&y, 4, 40, Budget::unbounded()).unwrap();
    assert!(r.exhausted);
    assert_eq!(r.solutions.len(), 2);

    let alt = r.solutions.iter().find(|s| **s != x).unwrap();
    let d = difference_graph(&x, alt, 12).unwrap();
    assert!(d.symmetric);
    assert_eq!(d.c, 4);
    assert_eq!(count_maximal_shared_subpaths(&d), 4);

    // no pairwise swap explains this one; only a four-way crossover does
    let cert = find_certificate(&x, 12).unwrap().unwrap();
    assert_eq!(cert.rearrangement, Rearrangement::Recombination);
    assert_eq!(&cert.alternative, alt);
    assert_eq!(
        is_unique(&x, 12, Budget::default()).unwrap(),
        Uniqueness::Ambiguous
    );
}

#[test]
fn shared_nodes_are_labelled_two() {
    for (name, k, m) in [("fig2a", 10, 2), ("fig2b", 12, 4)] {
        let (x, y) = load(name, k);
        let g = DeBruijnGraph::build(&y);
        let labels = label_multiplicities(&g, m).unwrap();
        assert_eq!(labels, true_multiplicities(&x, &g, k), "{name}");
        let shared = labels.iter().filter(|&(_, mu)| mu == 2).count();
        assert_eq!(shared, if m == 2 { 2 } else { 4 }, "{name}");
    }
}
