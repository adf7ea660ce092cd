//! Alternative source sets built from repeat witnesses.
//!
//! A D-witness `x_i(a) = x_j(a)` lets the two tails from position `a` be
//! exchanged. An H-witness (two shared k-mers at equal gaps) lets the middle
//! parts between them be exchanged. Inside a single source, interleaved
//! repeats allow a transposition and a triple repeat allows a rotation.
//!
//! When none of those apply, [`find_certificate`] falls back to a bounded
//! search over short chains of crossovers: cut two sources at a shared k-mer
//! and exchange their tails, possibly several times over. Intermediate states
//! may have the wrong lengths as long as the chain ends with every source back
//! at length `n`.
//!
//! Every result is checked with [`verify_equivalent`], so one that differs
//! from the input as a multiset certifies ambiguity.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::events::{EventKind, EventWitness, Scanner};
use crate::model::{extract_kmer_set, BitSequence, SourceSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SwapOutcome {
    pub alternative: SourceSet,
    /// `true` when the alternative differs from the input as a multiset.
    pub certificate: bool,
}

fn check(x: &SourceSet, w: &EventWitness, kind: EventKind, k: usize) -> Result<()> {
    if w.kind != kind {
        return Err(Error::InvalidWitness(format!(
            "expected a {kind} witness, got {}",
            w.kind
        )));
    }
    if !w.validate(x, k) {
        return Err(Error::InvalidWitness(format!(
            "{w} does not hold for these sources"
        )));
    }
    Ok(())
}

fn replace_pair(
    x: &SourceSet,
    i: usize,
    j: usize,
    xi: BitSequence,
    xj: BitSequence,
) -> SwapOutcome {
    let mut sources = x.sources().to_vec();
    sources[i - 1] = xi;
    sources[j - 1] = xj;
    let alternative = SourceSet::new(sources).expect("swap preserves lengths");
    let certificate = alternative != *x;
    SwapOutcome {
        alternative,
        certificate,
    }
}

/// `x̃_i = x_i[1:a-1] x_j[a:n]` and `x̃_j = x_j[1:a-1] x_i[a:n]`.
pub fn construct_swap_d(x: &SourceSet, w: &EventWitness, k: usize) -> Result<SwapOutcome> {
    check(x, w, EventKind::D, k)?;
    let (i, j, a) = (w.indices[0], w.indices[1], w.positions[0]);
    let n = x.n();
    let (xi, xj) = (x.get(i)?, x.get(j)?);
    let new_i = BitSequence::concat(&[&xi.substring(1, a - 1)?, &xj.substring(a, n)?]);
    let new_j = BitSequence::concat(&[&xj.substring(1, a - 1)?, &xi.substring(a, n)?]);
    Ok(replace_pair(x, i, j, new_i, new_j))
}

/// `x̃_i = x_i[1:a-1] x_j[c:c+b-a-1] x_i[b:n]` and
/// `x̃_j = x_j[1:c-1] x_i[a:b-1] x_j[c+b-a:n]`.
pub fn construct_swap_h(x: &SourceSet, w: &EventWitness, k: usize) -> Result<SwapOutcome> {
    check(x, w, EventKind::H, k)?;
    let (i, j) = (w.indices[0], w.indices[1]);
    let (a, b, c) = (w.positions[0], w.positions[1], w.positions[2]);
    let n = x.n();
    let gap = b - a;
    let (xi, xj) = (x.get(i)?, x.get(j)?);
    let new_i = BitSequence::concat(&[
        &xi.substring(1, a - 1)?,
        &xj.substring(c, c + gap - 1)?,
        &xi.substring(b, n)?,
    ]);
    let new_j = BitSequence::concat(&[
        &xj.substring(1, c - 1)?,
        &xi.substring(a, b - 1)?,
        &xj.substring(c + gap, n)?,
    ]);
    Ok(replace_pair(x, i, j, new_i, new_j))
}

/// Whether two source sets of the same shape have identical `(k+1)`-mer sets.
pub fn verify_equivalent(x: &SourceSet, x_alt: &SourceSet, k: usize) -> bool {
    if x.n() != x_alt.n() || x.m() != x_alt.m() {
        return false;
    }
    match (extract_kmer_set(x, k), extract_kmer_set(x_alt, k)) {
        (Ok(a), Ok(b)) => a == b,
        _ => false,
    }
}

fn replace_one(x: &SourceSet, i: usize, xi: BitSequence) -> SwapOutcome {
    let mut sources = x.sources().to_vec();
    sources[i - 1] = xi;
    let alternative = SourceSet::new(sources).expect("rearrangement preserves lengths");
    let certificate = alternative != *x;
    SwapOutcome {
        alternative,
        certificate,
    }
}

fn check_a(x: &SourceSet, w: &EventWitness, k: usize) -> Result<(usize, usize, usize)> {
    check(x, w, EventKind::A, k)?;
    Ok((w.indices[0], w.positions[0], w.positions[1]))
}

/// Interleaved repeats inside one source. With `first = [i],[p, r]` and
/// `second = [i],[q, s]` where `p < q < r < s`, the source reads
/// `X u Y w Z u V w T`; the blocks starting at the two `u` occurrences are
/// exchanged, giving `X u V w Z u Y w T`.
pub fn construct_transposition(
    x: &SourceSet,
    first: &EventWitness,
    second: &EventWitness,
    k: usize,
) -> Result<SwapOutcome> {
    let (i, p, r) = check_a(x, first, k)?;
    let (i2, q, s) = check_a(x, second, k)?;
    if i != i2 || !(p < q && q < r && r < s) {
        return Err(Error::InvalidWitness(format!(
            "{first} and {second} are not interleaved in one source"
        )));
    }
    let xi = x.get(i)?;
    let new_i = BitSequence::concat(&[
        &xi.substring(1, p - 1)?,
        &xi.substring(r, s - 1)?,
        &xi.substring(q, r - 1)?,
        &xi.substring(p, q - 1)?,
        &xi.substring(s, x.n())?,
    ]);
    Ok(replace_one(x, i, new_i))
}

/// A k-mer occurring three times in one source, witnessed by `[i],[p, q]`
/// and `[i],[q, r]`: `X u Y u Z u T` becomes `X u Z u Y u T`.
pub fn construct_rotation(
    x: &SourceSet,
    first: &EventWitness,
    second: &EventWitness,
    k: usize,
) -> Result<SwapOutcome> {
    let (i, p, q) = check_a(x, first, k)?;
    let (i2, q2, r) = check_a(x, second, k)?;
    if i != i2 || q != q2 {
        return Err(Error::InvalidWitness(format!(
            "{first} and {second} do not chain in one source"
        )));
    }
    let xi = x.get(i)?;
    let new_i = BitSequence::concat(&[
        &xi.substring(1, p - 1)?,
        &xi.substring(q, r - 1)?,
        &xi.substring(p, q - 1)?,
        &xi.substring(r, x.n())?,
    ]);
    Ok(replace_one(x, i, new_i))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rearrangement {
    SwapD,
    SwapH,
    Transposition,
    Rotation,
    /// A short sequence of crossovers at shared k-mers between different
    /// strings. Its certificate carries no witnesses.
    Recombination,
}

/// A verified alternative source set together with the witnesses it was
/// built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub rearrangement: Rearrangement,
    pub witnesses: Vec<EventWitness>,
    pub alternative: SourceSet,
}

/// Search for a rearrangement that yields a multiset-distinct source set with
/// the same `(k+1)`-mer set. Tries D-swaps, then H-swaps (both in detector
/// order), then transpositions and rotations inside single sources, and
/// finally crossover chains of up to four cuts.
pub fn find_certificate(x: &SourceSet, k: usize) -> Result<Option<Certificate>> {
    let scanner = Scanner::new(x, k)?;
    for (kind, rearrangement) in [
        (EventKind::D, Rearrangement::SwapD),
        (EventKind::H, Rearrangement::SwapH),
    ] {
        let mut found = None;
        let _ = scanner.for_each(kind, |w| {
            let swapped = match kind {
                EventKind::D => construct_swap_d(x, &w, k),
                _ => construct_swap_h(x, &w, k),
            };
            match swapped {
                Ok(out) if out.certificate => {
                    found = Some(Certificate {
                        rearrangement,
                        witnesses: vec![w],
                        alternative: out.alternative,
                    });
                    ControlFlow::Break(())
                }
                _ => ControlFlow::Continue(()),
            }
        });
        if found.is_some() {
            return Ok(found);
        }
    }

    // Repeated k-mers inside each source, as sorted occurrence lists.
    let mut per_source: Vec<Vec<Vec<usize>>> = vec![Vec::new(); x.m()];
    for occ in scanner.repeats() {
        let mut by_source: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(i, a) in occ {
            by_source.entry(i).or_default().push(a);
        }
        for (i, mut pos) in by_source {
            if pos.len() > 1 {
                pos.sort_unstable();
                per_source[i - 1].push(pos);
            }
        }
    }
    let a_witness = |i: usize, a: usize, b: usize| EventWitness {
        kind: EventKind::A,
        indices: vec![i],
        positions: vec![a, b],
    };
    for (idx, repeats) in per_source.iter_mut().enumerate() {
        let i = idx + 1;
        repeats.sort_unstable();
        let mut pairs = Vec::new();
        for pos in repeats.iter() {
            for (x1, &p) in pos.iter().enumerate() {
                for &r in &pos[x1 + 1..] {
                    pairs.push((p, r));
                }
            }
        }
        for &(p, r) in &pairs {
            for &(q, s) in &pairs {
                if p < q && q < r && r < s {
                    let (w1, w2) = (a_witness(i, p, r), a_witness(i, q, s));
                    let out = construct_transposition(x, &w1, &w2, k)?;
                    if out.certificate && verify_equivalent(x, &out.alternative, k) {
                        return Ok(Some(Certificate {
                            rearrangement: Rearrangement::Transposition,
                            witnesses: vec![w1, w2],
                            alternative: out.alternative,
                        }));
                    }
                }
            }
        }
        for pos in repeats.iter() {
            for t in pos.windows(3) {
                let (w1, w2) = (a_witness(i, t[0], t[1]), a_witness(i, t[1], t[2]));
                let out = construct_rotation(x, &w1, &w2, k)?;
                if out.certificate && verify_equivalent(x, &out.alternative, k) {
                    return Ok(Some(Certificate {
                        rearrangement: Rearrangement::Rotation,
                        witnesses: vec![w1, w2],
                        alternative: out.alternative,
                    }));
                }
            }
        }
    }
    Ok(
        recombine(x, &scanner, k, RECOMBINATION_DEPTH, RECOMBINATION_STEPS).map(|alternative| {
            Certificate {
                rearrangement: Rearrangement::Recombination,
                witnesses: Vec::new(),
                alternative,
            }
        }),
    )
}

const RECOMBINATION_DEPTH: usize = 4;
const RECOMBINATION_STEPS: u64 = 2_000_000;

/// A run of consecutive k-mers `lo..hi` (0-based) of source `src` (0-based).
#[derive(Clone, Copy, Debug)]
struct Piece {
    src: usize,
    lo: usize,
    hi: usize,
}

struct Recombiner<'a> {
    x: &'a SourceSet,
    k: usize,
    target: usize,
    pairs: Vec<((usize, usize), (usize, usize))>,
    strings: Vec<Vec<Piece>>,
    steps: u64,
    max_steps: u64,
}

impl Recombiner<'_> {
    fn count(s: &[Piece]) -> usize {
        s.iter().map(|p| p.hi - p.lo).sum()
    }

    fn wrong(&self) -> usize {
        self.strings
            .iter()
            .filter(|s| Self::count(s) != self.target)
            .count()
    }

    /// String index and k-mer offset of an occurrence.
    fn locate(&self, (src, pos): (usize, usize)) -> (usize, usize) {
        for (si, s) in self.strings.iter().enumerate() {
            let mut offset = 0;
            for p in s {
                if p.src == src && p.lo <= pos && pos < p.hi {
                    return (si, offset + pos - p.lo);
                }
                offset += p.hi - p.lo;
            }
        }
        unreachable!("every occurrence lies in exactly one string")
    }

    fn split(s: &[Piece], at: usize) -> (Vec<Piece>, Vec<Piece>) {
        let (mut head, mut tail) = (Vec::new(), Vec::new());
        let mut offset = 0;
        for &p in s {
            let len = p.hi - p.lo;
            if offset + len <= at {
                head.push(p);
            } else if offset >= at {
                tail.push(p);
            } else {
                let cut = p.lo + at - offset;
                head.push(Piece { hi: cut, ..p });
                tail.push(Piece { lo: cut, ..p });
            }
            offset += len;
        }
        (head, tail)
    }

    fn materialize(&self) -> Option<SourceSet> {
        let k = self.k;
        let sources = self
            .strings
            .iter()
            .map(|s| {
                let mut bits = Vec::with_capacity(self.target + k - 1);
                for (idx, p) in s.iter().enumerate() {
                    let src = &self.x.sources()[p.src];
                    let from = if idx == 0 { p.lo } else { p.lo + k - 1 };
                    for pos in from..p.hi + k - 1 {
                        bits.push(src.get(pos + 1).expect("position in range"));
                    }
                }
                BitSequence::from_bits(bits)
            })
            .collect();
        SourceSet::new(sources).ok()
    }

    fn search(&mut self, first: usize, left: usize) -> Option<SourceSet> {
        for idx in first..self.pairs.len() {
            self.steps += 1;
            if self.steps > self.max_steps {
                return None;
            }
            let (o1, o2) = self.pairs[idx];
            let ((s1, t1), (s2, t2)) = (self.locate(o1), self.locate(o2));
            if s1 == s2 {
                continue;
            }
            let saved = (self.strings[s1].clone(), self.strings[s2].clone());
            let (h1, r1) = Self::split(&saved.0, t1);
            let (h2, r2) = Self::split(&saved.1, t2);
            self.strings[s1] = h1.into_iter().chain(r2).collect();
            self.strings[s2] = h2.into_iter().chain(r1).collect();
            let wrong = self.wrong();
            if wrong == 0 {
                if let Some(alt) = self.materialize() {
                    if alt != *self.x && verify_equivalent(self.x, &alt, self.k) {
                        return Some(alt);
                    }
                }
            }
            if left > 1 && wrong <= 2 * (left - 1) {
                if let Some(alt) = self.search(idx + 1, left - 1) {
                    return Some(alt);
                }
            }
            self.strings[s1] = saved.0;
            self.strings[s2] = saved.1;
            if self.steps > self.max_steps {
                return None;
            }
        }
        None
    }
}

/// Apply up to `depth` crossovers, each exchanging the tails of two strings
/// at a shared k-mer, looking for a multiset-distinct set of length-`n`
/// strings. Crossovers keep every `(k+1)`-mer, so any such set is an
/// alternative reconstruction.
fn recombine(
    x: &SourceSet,
    scanner: &Scanner,
    k: usize,
    depth: usize,
    max_steps: u64,
) -> Option<SourceSet> {
    let mut pairs = Vec::new();
    for occ in scanner.repeats() {
        for (a, &(i, p)) in occ.iter().enumerate() {
            for &(j, q) in &occ[a + 1..] {
                pairs.push(((i - 1, p - 1), (j - 1, q - 1)));
            }
        }
    }
    pairs.sort_unstable();
    let target = x.n() - k + 1;
    let strings = (0..x.m())
        .map(|src| {
            vec![Piece {
                src,
                lo: 0,
                hi: target,
            }]
        })
        .collect();
    let mut r = Recombiner {
        x,
        k,
        target,
        pairs,
        strings,
        steps: 0,
        max_steps,
    };
    (1..=depth).find_map(|d| r.search(0, d))
}
