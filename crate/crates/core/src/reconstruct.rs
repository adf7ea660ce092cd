//! Enumeration of every source multiset consistent with a `(k+1)`-mer set.
//!
//! A candidate reconstruction is a multiset of `m` walks on `G(Y)`, each of
//! exactly `n - k` edges, that together traverse every edge at least once.
//! The search grows walks edge by edge in lexicographic order and keeps walks
//! sorted, so each multiset is produced exactly once.
//!
//! Pruning is exact, never heuristic:
//!
//! * every start node must begin a walk and every end node must finish one;
//!   when the unused ones exactly fill the remaining walks, the choice is forced;
//! * a per-node bitset of achievable walk lengths rejects any step from which
//!   the remaining length cannot be completed (to an end node, when forced);
//! * flow conservation bounds how often any reconstruction can traverse each
//!   edge; steps past an upper bound are rejected, and traversals still owed
//!   to lower bounds may never outnumber the remaining edge slots;
//! * when those bounds (or the multiplicity labelling) pin every count
//!   exactly, each weakly connected piece of the unused capacity must be
//!   consumable by whole walks.

use serde::{Deserialize, Serialize};

use crate::debruijn::{edge_usage, label_multiplicities, DeBruijnGraph, MultiplicityMap};
use crate::error::{Error, Result};
use crate::model::{extract_kmer_set, window_mask, BitSequence, KmerSet, SourceSet};
use crate::visits::{visit_bounds, VisitBounds};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Stop after this many distinct solutions.
    pub max_solutions: Option<usize>,
    /// Stop after this many search expansions (start choices plus edge steps).
    pub max_expansions: Option<u64>,
}

impl Budget {
    pub fn unbounded() -> Self {
        Budget {
            max_solutions: None,
            max_expansions: None,
        }
    }

    pub fn new(max_solutions: usize, max_expansions: u64) -> Self {
        Budget {
            max_solutions: Some(max_solutions),
            max_expansions: Some(max_expansions),
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(2, 1_000_000)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stop {
    /// The whole search space was explored.
    Exhausted,
    /// The solution cap was reached.
    SolutionCap,
    /// The expansion cap was reached; the outcome is unknown.
    ExpansionCap,
}

#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    /// Distinct solutions, each with its sources in sorted order, in
    /// lexicographic order of the sorted tuples.
    pub solutions: Vec<SourceSet>,
    pub exhausted: bool,
    pub expansions: u64,
    pub stop: Stop,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Uniqueness {
    Unique,
    Ambiguous,
    Unknown,
}

/// Per-node bitsets over walk lengths `0..=len`.
struct LengthTable {
    words: usize,
    bits: Vec<u64>,
}

impl LengthTable {
    /// Bit `r` of node `v` is set when some walk of exactly `r` edges leaves
    /// `v` and stops at a node accepted by `base`.
    fn build(out: &[Vec<(usize, usize)>], len: usize, base: impl Fn(usize) -> bool) -> Self {
        let words = (len + 1).div_ceil(64);
        let n = out.len();
        let mut bits = vec![0u64; n * words];
        for v in 0..n {
            if base(v) {
                bits[v * words] |= 1;
            }
        }
        for r in 1..=len {
            let (word, bit) = ((r - 1) / 64, (r - 1) % 64);
            for v in 0..n {
                if out[v]
                    .iter()
                    .any(|&(w, _)| (bits[w * words + word] >> bit) & 1 == 1)
                {
                    bits[v * words + r / 64] |= 1 << (r % 64);
                }
            }
        }
        LengthTable { words, bits }
    }

    #[inline]
    fn get(&self, v: usize, r: usize) -> bool {
        (self.bits[v * self.words + r / 64] >> (r % 64)) & 1 == 1
    }
}

struct Search<'a> {
    g: &'a DeBruijnGraph,
    m: usize,
    len: usize,
    budget: Budget,
    out: Vec<Vec<(usize, usize)>>,
    is_source: Vec<bool>,
    is_sink: Vec<bool>,
    sources: Vec<usize>,
    reach_any: LengthTable,
    reach_end: LengthTable,
    lower: Vec<u32>,
    upper: Option<Vec<u32>>,
    /// Every reconstruction traverses each edge exactly `lower` times.
    exact: bool,
    used: Vec<u32>,
    /// Traversals still owed to edges below their lower bound.
    deficit: usize,
    starts: Vec<u32>,
    unused_sources: usize,
    ends: Vec<u32>,
    unused_sinks: usize,
    walks: Vec<Vec<usize>>,
    current: Vec<usize>,
    parent: Vec<usize>,
    comp_edges: Vec<usize>,
    comp_sources: Vec<usize>,
    expansions: u64,
    solutions: Vec<SourceSet>,
    stop: Option<Stop>,
}

/// The search recurses once per edge of every walk, so its depth is about
/// `m * (n - k)`. Grow the stack on demand instead of relying on the size of
/// whichever thread runs it.
fn deeper<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 4 * 1024 * 1024, f)
}

impl<'a> Search<'a> {
    fn new(
        g: &'a DeBruijnGraph,
        m: usize,
        len: usize,
        budget: Budget,
        bounds: Option<VisitBounds>,
    ) -> Self {
        let n = g.node_count();
        let out: Vec<Vec<(usize, usize)>> = (0..n)
            .map(|u| {
                g.out_neighbors(u)
                    .iter()
                    .map(|&v| (v, g.edge_index(g.edge_between(u, v)).expect("edge exists")))
                    .collect()
            })
            .collect();
        let sources = g.start_nodes();
        let sinks = g.end_nodes();
        let mut is_source = vec![false; n];
        let mut is_sink = vec![false; n];
        sources.iter().for_each(|&v| is_source[v] = true);
        sinks.iter().for_each(|&v| is_sink[v] = true);
        let reach_any = LengthTable::build(&out, len, |_| true);
        let reach_end = LengthTable::build(&out, len, |v| is_sink[v]);
        let exact = bounds.as_ref().is_some_and(VisitBounds::exact);
        let (lower, upper) = match bounds {
            Some(b) => (b.lower, Some(b.upper)),
            None => (vec![1; g.edge_count()], None),
        };
        let deficit = lower.iter().map(|&c| c as usize).sum();
        Search {
            g,
            m,
            len,
            budget,
            out,
            is_source,
            is_sink,
            unused_sources: sources.len(),
            unused_sinks: sinks.len(),
            sources,
            reach_any,
            reach_end,
            lower,
            upper,
            exact,
            used: vec![0; g.edge_count()],
            deficit,
            starts: vec![0; n],
            ends: vec![0; n],
            walks: Vec::with_capacity(m),
            current: Vec::with_capacity(len + 1),
            parent: vec![0; n],
            comp_edges: vec![0; n],
            comp_sources: vec![0; n],
            expansions: 0,
            solutions: Vec::new(),
            stop: None,
        }
    }

    fn tick(&mut self) -> bool {
        self.expansions += 1;
        if self
            .budget
            .max_expansions
            .is_some_and(|cap| self.expansions > cap)
        {
            self.stop = Some(Stop::ExpansionCap);
            return false;
        }
        true
    }

    /// With exact counts, every weakly connected piece of the unused capacity
    /// is consumed by whole walks running inside it, plus the rest of the
    /// current walk (`remaining` edges from `at`) if that lies there. Each
    /// unused source needs a walk of its own in its piece. When every walk
    /// must start at a source, these account for all of the capacity.
    fn components_ok(&mut self, at: Option<usize>, remaining: usize) -> bool {
        if !self.exact {
            return true;
        }
        let caps = &self.lower;
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        let n = self.g.node_count();
        for v in 0..n {
            self.parent[v] = v;
            self.comp_edges[v] = 0;
            self.comp_sources[v] = 0;
        }
        for u in 0..n {
            for &(w, e) in &self.out[u] {
                if self.used[e] < caps[e] {
                    let (a, b) = (find(&mut self.parent, u), find(&mut self.parent, w));
                    if a != b {
                        self.parent[a] = b;
                    }
                }
            }
        }
        for u in 0..n {
            let left: usize = self.out[u]
                .iter()
                .map(|&(_, e)| (caps[e] - self.used[e]) as usize)
                .sum();
            let r = find(&mut self.parent, u);
            self.comp_edges[r] += left;
        }
        for i in 0..self.sources.len() {
            let s = self.sources[i];
            if self.starts[s] == 0 {
                let r = find(&mut self.parent, s);
                self.comp_sources[r] += self.len;
            }
        }
        let mut current_root = None;
        if let Some(v) = at {
            let r = find(&mut self.parent, v);
            self.comp_sources[r] += remaining;
            current_root = Some(r);
        }
        let strict = self.sources.len() == self.m;
        let len = self.len;
        (0..n).filter(|&v| self.parent[v] == v).all(|r| {
            let (have, need) = (self.comp_edges[r], self.comp_sources[r]);
            if strict {
                return have == need;
            }
            let own = if current_root == Some(r) {
                remaining
            } else {
                0
            };
            have >= need && (have - own) % len == 0
        })
    }

    fn record(&mut self) {
        let k = self.g.k();
        let sources = self
            .walks
            .iter()
            .map(|walk| {
                let first = self.g.node(walk[0]);
                let head = (0..k).map(move |i| (first >> (k - 1 - i)) & 1 == 1);
                let tail = walk[1..].iter().map(|&v| self.g.node(v) & 1 == 1);
                BitSequence::from_bits(head.chain(tail))
            })
            .collect();
        self.solutions
            .push(SourceSet::new(sources).expect("walks share one length"));
        if self
            .budget
            .max_solutions
            .is_some_and(|cap| self.solutions.len() >= cap)
        {
            self.stop = Some(Stop::SolutionCap);
        }
    }

    fn start_walk(&mut self, t: usize) {
        if t == self.m {
            if self.deficit == 0 {
                self.record();
            }
            return;
        }
        let walks_left = self.m - t;
        if self.unused_sources > walks_left || self.unused_sinks > walks_left {
            return;
        }
        if self.deficit > walks_left * self.len {
            return;
        }
        if t > 0 && !self.components_ok(None, 0) {
            return;
        }
        let prev_start = if t > 0 { self.walks[t - 1][0] } else { 0 };
        // starts are non-decreasing, so a skipped unused source is lost for good
        let first_unused = self.sources.iter().copied().find(|&s| self.starts[s] == 0);
        let upper = first_unused.unwrap_or(self.g.node_count() - 1);
        let forced_source = self.unused_sources == walks_left;
        let forced_end = self.unused_sinks == walks_left;
        for v in prev_start..=upper {
            if forced_source && Some(v) != first_unused {
                continue;
            }
            let table = if forced_end {
                &self.reach_end
            } else {
                &self.reach_any
            };
            if !table.get(v, self.len) {
                continue;
            }
            if !self.tick() {
                return;
            }
            if self.is_source[v] && self.starts[v] == 0 {
                self.unused_sources -= 1;
            }
            self.starts[v] += 1;
            self.current.clear();
            self.current.push(v);
            let tied = t > 0 && v == prev_start;
            self.extend(t, v, self.len, tied);
            self.starts[v] -= 1;
            if self.is_source[v] && self.starts[v] == 0 {
                self.unused_sources += 1;
            }
            if self.stop.is_some() {
                return;
            }
        }
    }

    fn extend(&mut self, t: usize, u: usize, remaining: usize, tied: bool) {
        let walks_after = self.m - t - 1;
        if remaining == 0 {
            let fresh_end = self.is_sink[u] && self.ends[u] == 0;
            if fresh_end {
                self.unused_sinks -= 1;
            }
            self.ends[u] += 1;
            if self.unused_sinks <= walks_after {
                let walk = std::mem::take(&mut self.current);
                self.walks.push(walk);
                deeper(|| self.start_walk(t + 1));
                self.current = self.walks.pop().expect("pushed above");
            }
            self.ends[u] -= 1;
            if fresh_end {
                self.unused_sinks += 1;
            }
            return;
        }

        let slots_after = (remaining - 1) + walks_after * self.len;
        let forced_end = self.unused_sinks > walks_after;
        let pos = self.current.len();
        let prev_bit = if tied {
            Some(self.g.node(self.walks[t - 1][pos]) & 1)
        } else {
            None
        };
        let branching = self.exact
            && self.out[u]
                .iter()
                .filter(|&&(_, e)| self.used[e] < self.lower[e])
                .count()
                > 1;

        for idx in 0..self.out[u].len() {
            let (w, e) = self.out[u][idx];
            let bit = self.g.node(w) & 1;
            if prev_bit.is_some_and(|p| bit < p) {
                continue;
            }
            if let Some(upper) = &self.upper {
                if self.used[e] >= upper[e] {
                    continue;
                }
            }
            let fresh = self.used[e] < self.lower[e];
            if self.deficit - fresh as usize > slots_after {
                continue;
            }
            let table = if forced_end {
                &self.reach_end
            } else {
                &self.reach_any
            };
            if !table.get(w, remaining - 1) {
                continue;
            }
            if !self.tick() {
                return;
            }
            self.used[e] += 1;
            self.deficit -= fresh as usize;
            self.current.push(w);
            if !branching || self.components_ok(Some(w), remaining - 1) {
                deeper(|| self.extend(t, w, remaining - 1, prev_bit == Some(bit)));
            }
            self.current.pop();
            self.used[e] -= 1;
            self.deficit += fresh as usize;
            if self.stop.is_some() {
                return;
            }
        }
    }
}

/// Edge counts implied by the multiplicity labelling, when they are exact.
fn label_caps(g: &DeBruijnGraph, m: usize, n: usize) -> Option<Vec<u32>> {
    let mu = label_multiplicities(g, m).ok()?;
    let total: u64 = mu.iter().map(|(_, c)| c as u64).sum();
    if total != (m * (n - g.k() + 1)) as u64 {
        return None;
    }
    let usage = edge_usage(g, &mu);
    Some(g.edges().iter().map(|e| usage[e]).collect())
}

/// All multisets of `m` length-`n` sequences whose `(k+1)`-mer set is `y`.
pub fn enumerate_reconstructions(
    y: &KmerSet,
    m: usize,
    n: usize,
    budget: Budget,
) -> Result<ReconstructionResult> {
    enumerate_with(y, m, n, budget, true)
}

pub(crate) fn enumerate_with(
    y: &KmerSet,
    m: usize,
    n: usize,
    budget: Budget,
    use_bounds: bool,
) -> Result<ReconstructionResult> {
    let k = y.k();
    if k + 1 > n {
        return Err(Error::WindowTooLong { window: k + 1, n });
    }
    if m == 0 {
        return Err(Error::InvalidParams("m must be at least 1".into()));
    }
    if y.is_empty() {
        return Err(Error::InvalidParams("empty k-mer set".into()));
    }
    if budget.max_solutions == Some(0) {
        return Err(Error::InvalidParams(
            "solution cap must be at least 1".into(),
        ));
    }
    let g = DeBruijnGraph::build(y);
    let bounds = if use_bounds {
        match visit_bounds(&g, m, n - k) {
            Some(b) if !b.exact() => match label_caps(&g, m, n) {
                Some(c) => Some(VisitBounds {
                    lower: c.clone(),
                    upper: c,
                }),
                None => Some(b),
            },
            Some(b) => Some(b),
            None => {
                return Ok(ReconstructionResult {
                    solutions: Vec::new(),
                    exhausted: true,
                    expansions: 0,
                    stop: Stop::Exhausted,
                })
            }
        }
    } else {
        None
    };
    let mut search = Search::new(&g, m, n - k, budget, bounds);
    search.start_walk(0);
    let stop = search.stop.unwrap_or(Stop::Exhausted);
    Ok(ReconstructionResult {
        solutions: search.solutions,
        exhausted: stop == Stop::Exhausted,
        expansions: search.expansions,
        stop,
    })
}

/// Whether `x` is the only source multiset consistent with its k-mer set.
///
/// A verified swap certificate decides ambiguity without searching; otherwise
/// the enumeration runs with at least two solutions allowed.
pub fn is_unique(x: &SourceSet, k: usize, budget: Budget) -> Result<Uniqueness> {
    if crate::ambiguity::find_certificate(x, k)?.is_some() {
        return Ok(Uniqueness::Ambiguous);
    }
    let y = extract_kmer_set(x, k)?;
    let budget = Budget {
        max_solutions: Some(budget.max_solutions.unwrap_or(2).max(2)),
        ..budget
    };
    let result = enumerate_reconstructions(&y, x.m(), x.n(), budget)?;
    Ok(match (result.solutions.len(), result.exhausted) {
        (n, _) if n >= 2 => Uniqueness::Ambiguous,
        (1, true) => Uniqueness::Unique,
        _ => Uniqueness::Unknown,
    })
}

/// Exhaustive ground truth for tiny instances (`m * n <= 24`): every length-`n`
/// string whose windows lie in `y` is a candidate, and every multiset of `m`
/// candidates is tested for covering `y`.
pub fn brute_force_oracle(y: &KmerSet, m: usize, n: usize) -> Result<Vec<SourceSet>> {
    if m * n > 24 {
        return Err(Error::TooLarge(m * n));
    }
    let k = y.k();
    if k + 1 > n || m == 0 {
        return Err(Error::WindowTooLong { window: k + 1, n });
    }
    if y.len() > 64 {
        // m(n - k) <= 24 windows can never cover more than 24 distinct (k+1)-mers
        return Ok(Vec::new());
    }
    let w = k + 1;
    let mut candidates: Vec<(BitSequence, u64)> = Vec::new();
    for value in 0u64..(1u64 << n) {
        let mut cover = 0u64;
        let mut inside = true;
        for start in 0..=n - w {
            let window = ((value >> (n - w - start)) as u128) & window_mask(w);
            match y.as_slice().binary_search(&window) {
                Ok(idx) => cover |= 1 << idx,
                Err(_) => {
                    inside = false;
                    break;
                }
            }
        }
        if inside {
            let seq = BitSequence::from_bits((0..n).map(|i| (value >> (n - 1 - i)) & 1 == 1));
            candidates.push((seq, cover));
        }
    }
    let full = if y.len() == 64 {
        u64::MAX
    } else {
        (1u64 << y.len()) - 1
    };
    let mut out = Vec::new();
    let mut chosen = Vec::with_capacity(m);
    combine(&candidates, 0, m, 0, full, &mut chosen, &mut out);
    Ok(out)
}

fn combine(
    candidates: &[(BitSequence, u64)],
    from: usize,
    left: usize,
    cover: u64,
    full: u64,
    chosen: &mut Vec<usize>,
    out: &mut Vec<SourceSet>,
) {
    if left == 0 {
        if cover == full {
            let sources = chosen.iter().map(|&i| candidates[i].0.clone()).collect();
            out.push(SourceSet::new(sources).expect("equal lengths"));
        }
        return;
    }
    for i in from..candidates.len() {
        chosen.push(i);
        combine(
            candidates,
            i,
            left - 1,
            cover | candidates[i].1,
            full,
            chosen,
            out,
        );
        chosen.pop();
    }
}

/// The de Bruijn graph on the `(k+1)`-mers of `X - X̃`, with node
/// multiplicities counted within `X - X̃`.
#[derive(Clone, Debug)]
pub struct DifferenceGraph {
    pub graph: DeBruijnGraph,
    pub mu_diff: MultiplicityMap,
    /// Number of sources in `X - X̃`.
    pub c: usize,
    /// Whether building from `X̃ - X` gives the same edges and multiplicities.
    pub symmetric: bool,
}

fn diff_parts(strings: &[BitSequence], k: usize) -> (KmerSet, MultiplicityMap) {
    let edges = strings.iter().flat_map(|s| s.windows(k + 1)).collect();
    let mut mu = std::collections::BTreeMap::new();
    for s in strings {
        for v in s.windows(k) {
            *mu.entry(v).or_insert(0u32) += 1;
        }
    }
    (
        KmerSet::new(k, edges).expect("k checked by caller"),
        mu.into_iter().collect(),
    )
}

pub fn difference_graph(x: &SourceSet, x_alt: &SourceSet, k: usize) -> Result<DifferenceGraph> {
    if x.n() != x_alt.n() || x.m() != x_alt.m() {
        return Err(Error::Precondition("source sets differ in shape".into()));
    }
    if extract_kmer_set(x, k)? != extract_kmer_set(x_alt, k)? {
        return Err(Error::Precondition(
            "source sets have different k-mer sets".into(),
        ));
    }
    if x == x_alt {
        return Err(Error::Precondition(
            "source sets are equal as multisets".into(),
        ));
    }
    let forward = x.difference(x_alt);
    let backward = x_alt.difference(x);
    let (edges, mu_diff) = diff_parts(&forward, k);
    let (edges_back, mu_back) = diff_parts(&backward, k);
    Ok(DifferenceGraph {
        graph: DeBruijnGraph::build(&edges),
        symmetric: edges == edges_back && mu_diff == mu_back,
        mu_diff,
        c: forward.len(),
    })
}

/// Number of maximal chains of multiplicity-2 nodes in a difference graph,
/// counted as connected components of the subgraph induced by those nodes.
pub fn count_maximal_shared_subpaths(d: &DifferenceGraph) -> usize {
    let g = &d.graph;
    let shared: Vec<bool> = g
        .nodes()
        .iter()
        .map(|&v| d.mu_diff.get(v) == Some(2))
        .collect();
    let mut parent: Vec<usize> = (0..g.node_count()).collect();
    fn find(parent: &mut [usize], mut v: usize) -> usize {
        while parent[v] != v {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        v
    }
    for u in 0..g.node_count() {
        for &v in g.out_neighbors(u) {
            if shared[u] && shared[v] {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                parent[ru] = rv;
            }
        }
    }
    (0..g.node_count())
        .filter(|&v| shared[v] && find(&mut parent, v) == v)
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::KmerSet;

    fn y_of(strs: &[&str], k: usize) -> (SourceSet, KmerSet) {
        let x = SourceSet::from_strs(strs).unwrap();
        let y = extract_kmer_set(&x, k).unwrap();
        (x, y)
    }

    #[test]
    fn long_walks_fit_on_a_small_stack() {
        let params = crate::model::Params::new(2048, 4, 24).unwrap();
        let x = crate::model::generate_sources(&params, 3);
        let y = extract_kmer_set(&x, params.k).unwrap();
        let r = std::thread::Builder::new()
            .stack_size(256 * 1024)
            .spawn(move || enumerate_reconstructions(&y, 4, 2048, Budget::new(2, 1_000_000)))
            .unwrap()
            .join()
            .unwrap()
            .unwrap();
        assert!(r.solutions.contains(&x));
    }

    #[test]
    fn repeat_free_single_path() {
        let (x, y) = y_of(&["0110"], 2);
        let r = enumerate_reconstructions(&y, 1, 4, Budget::unbounded()).unwrap();
        assert!(r.exhausted);
        assert_eq!(r.solutions, vec![x.clone()]);
        assert_eq!(brute_force_oracle(&y, 1, 4).unwrap(), vec![x]);
    }

    #[test]
    fn self_loop_walk() {
        let y = KmerSet::from_text("000\n").unwrap();
        let expected = vec![SourceSet::from_strs(&["00000"]).unwrap()];
        assert_eq!(brute_force_oracle(&y, 1, 5).unwrap(), expected);
        assert_eq!(
            enumerate_reconstructions(&y, 1, 5, Budget::unbounded())
                .unwrap()
                .solutions,
            expected
        );
    }

    #[test]
    fn matches_oracle_on_two_sources() {
        let (x, y) = y_of(&["00110", "01100"], 2);
        let oracle = brute_force_oracle(&y, 2, 5).unwrap();
        let r = enumerate_reconstructions(&y, 2, 5, Budget::unbounded()).unwrap();
        assert!(r.exhausted);
        assert_eq!(r.solutions, oracle);
        assert!(oracle.contains(&x));
    }

    #[test]
    fn oracle_rejects_large() {
        let y = KmerSet::from_text("0101\n").unwrap();
        assert_eq!(brute_force_oracle(&y, 3, 9), Err(Error::TooLarge(27)));
    }

    #[test]
    fn budget_caps() {
        let (_, y) = y_of(&["0110", "0101"], 2);
        let r = enumerate_reconstructions(&y, 2, 4, Budget::new(1, 1_000)).unwrap();
        assert_eq!(r.stop, Stop::SolutionCap);
        assert!(!r.exhausted);
        let r = enumerate_reconstructions(&y, 2, 4, Budget::new(10, 1)).unwrap();
        assert_eq!(r.stop, Stop::ExpansionCap);
    }

    #[test]
    fn uniqueness_verdicts() {
        let x = SourceSet::from_strs(&["00001000", "10011010"]).unwrap();
        assert_eq!(
            is_unique(&x, 4, Budget::default()).unwrap(),
            Uniqueness::Unique
        );
        let x = SourceSet::from_strs(&["00110", "10111"]).unwrap();
        assert_eq!(
            is_unique(&x, 2, Budget::default()).unwrap(),
            Uniqueness::Ambiguous
        );
    }

    #[test]
    fn difference_graph_preconditions() {
        let x = SourceSet::from_strs(&["0000"]).unwrap();
        let other = SourceSet::from_strs(&["1111"]).unwrap();
        assert!(matches!(
            difference_graph(&x, &other, 2),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            difference_graph(&x, &x, 2),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn zero_solutions_is_legal() {
        // two disjoint edges cannot be covered by a single walk
        let y = KmerSet::from_text("001\n110\n").unwrap();
        let r = enumerate_reconstructions(&y, 1, 4, Budget::unbounded()).unwrap();
        assert!(r.exhausted);
        assert!(r.solutions.is_empty());
        assert!(brute_force_oracle(&y, 1, 4).unwrap().is_empty());
    }
}
