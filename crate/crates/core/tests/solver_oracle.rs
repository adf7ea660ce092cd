use seqrecon::reconstruct::enumerate_reconstructions;
use seqrecon::{brute_force_oracle, extract_kmer_set, generate_sources, Budget, Params};

#[test]
fn solver_matches_brute_force_on_small_instances() {
    let mut checked = 0;
    for n in 5..=8 {
        for m in 1..=3usize {
            if m * n > 24 {
                continue;
            }
            for k in 2..=3 {
                let p = Params::new(n, m, k).unwrap();
                for seed in 0..20u64 {
                    let x = generate_sources(&p, seed * 7919 + (n * 100 + m * 10 + k) as u64);
                    let y = extract_kmer_set(&x, k).unwrap();
                    let oracle = brute_force_oracle(&y, m, n).unwrap();
                    let r = enumerate_reconstructions(&y, m, n, Budget::unbounded()).unwrap();
                    assert!(r.exhausted);
                    assert_eq!(r.solutions, oracle, "x = {:?}, k = {k}", x);
                    assert!(oracle.contains(&x));
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 150);
}
