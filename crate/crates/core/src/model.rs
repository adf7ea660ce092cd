//! Parameters, bit-packed binary sequences, source sets and k-mer sets.
//!
//! Public positions are 1-based: `kmer_at(a, k)` is the window starting at
//! symbol `a`, and `substring(a, b)` includes both ends. Storage is 0-based.
//!
//! A window of `w` symbols is packed into a `u128` with the first symbol in
//! the most significant used bit, so numeric order of packed windows equals
//! lexicographic order of their binary strings.

use std::fmt;
use std::str::FromStr;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Longest window (in symbols) that fits a packed word.
pub const MAX_WINDOW: usize = 128;

/// Mask selecting the low `len` bits of a packed window.
#[inline]
pub fn window_mask(len: usize) -> u128 {
    debug_assert!(len <= MAX_WINDOW);
    if len == MAX_WINDOW {
        u128::MAX
    } else {
        (1u128 << len) - 1
    }
}

/// Render a packed window of `len` symbols as a `0`/`1` string.
pub fn format_window(value: u128, len: usize) -> String {
    (0..len)
        .map(|i| {
            if (value >> (len - 1 - i)) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Parse a `0`/`1` string into a packed window.
pub fn parse_window(s: &str) -> Result<u128> {
    if s.is_empty() || s.len() > MAX_WINDOW {
        return Err(Error::Parse(format!(
            "window length {} not in 1..={MAX_WINDOW}",
            s.len()
        )));
    }
    s.bytes().try_fold(0u128, |acc, b| match b {
        b'0' => Ok(acc << 1),
        b'1' => Ok((acc << 1) | 1),
        other => Err(Error::Parse(format!(
            "unexpected symbol {:?}",
            other as char
        ))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl Params {
    pub fn new(n: usize, m: usize, k: usize) -> Result<Self> {
        let p = Params {
            n,
            m,
            k,
            alpha: None,
            beta: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::InvalidParams(format!("n = {} < 4", self.n)));
        }
        if self.m < 1 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        if self.k < 2 {
            return Err(Error::InvalidParams(format!("k = {} < 2", self.k)));
        }
        if self.k + 1 > self.n {
            return Err(Error::WindowTooLong {
                window: self.k + 1,
                n: self.n,
            });
        }
        if self.k + 1 > MAX_WINDOW {
            return Err(Error::InvalidParams(format!(
                "k + 1 = {} exceeds {MAX_WINDOW}",
                self.k + 1
            )));
        }
        Ok(())
    }

    /// Number of k-mer positions per source, `n - k + 1`.
    pub fn n_prime(&self) -> usize {
        self.n - self.k + 1
    }

    /// The exponent `alpha`, or `log m / log n` when the params were not derived.
    pub fn effective_alpha(&self) -> f64 {
        self.alpha
            .unwrap_or_else(|| (self.m as f64).ln() / (self.n as f64).ln())
    }

    /// The exponent `beta`, or `k / log2 n` when the params were not derived.
    pub fn effective_beta(&self) -> f64 {
        self.beta
            .unwrap_or_else(|| self.k as f64 / (self.n as f64).log2())
    }
}

/// Derive `(m, k)` from `(n, alpha, beta)` with `m = round(n^alpha)` and
/// `k = round(beta * log2 n)`, clamped to `m >= 1` and `2 <= k <= n - 1`.
pub fn derive_params(n: usize, alpha: f64, beta: f64) -> Result<Params> {
    if n < 4 {
        return Err(Error::InvalidParams(format!("n = {n} < 4")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "alpha = {alpha} must be finite and >= 0"
        )));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "beta = {beta} must be finite and > 0"
        )));
    }
    let nf = n as f64;
    let m = nf.powf(alpha).round().max(1.0);
    if m > usize::MAX as f64 / 2.0 {
        return Err(Error::InvalidParams(format!(
            "m = n^alpha = {m} is too large"
        )));
    }
    let k = (beta * nf.log2()).round().clamp(2.0, (n - 1) as f64) as usize;
    let p = Params {
        n,
        m: m as usize,
        k,
        alpha: Some(alpha),
        beta: Some(beta),
    };
    p.validate()?;
    Ok(p)
}

/// A length-`n` binary string, packed 64 symbols per word.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitSequence {
    // `len` precedes `words` so the derived order is length-then-lexicographic.
    len: usize,
    words: Vec<u64>,
}

impl BitSequence {
    pub fn zeros(len: usize) -> Self {
        BitSequence {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut seq = BitSequence {
            len: 0,
            words: Vec::new(),
        };
        for b in bits {
            seq.push(b);
        }
        seq
    }

    pub fn random<R: RngCore>(len: usize, rng: &mut R) -> Self {
        let mut words: Vec<u64> = (0..len.div_ceil(64)).map(|_| rng.next_u64()).collect();
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= !(u64::MAX >> (len % 64));
            }
        }
        BitSequence { len, words }
    }

    fn push(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (63 - self.len % 64);
        }
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    fn bit0(&self, i: usize) -> bool {
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    /// Symbol at 1-based position `pos`.
    pub fn get(&self, pos: usize) -> Result<bool> {
        if pos == 0 || pos > self.len {
            return Err(Error::OutOfRange { pos, max: self.len });
        }
        Ok(self.bit0(pos - 1))
    }

    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bit0(i))
    }

    /// The substring `[a : b]` (1-based, inclusive). `b = a - 1` yields the
    /// empty string.
    pub fn substring(&self, a: usize, b: usize) -> Result<BitSequence> {
        if a == 0 || a > self.len + 1 {
            return Err(Error::OutOfRange {
                pos: a,
                max: self.len + 1,
            });
        }
        if b + 1 < a || b > self.len {
            return Err(Error::OutOfRange {
                pos: b,
                max: self.len,
            });
        }
        Ok(BitSequence::from_bits((a - 1..b).map(|i| self.bit0(i))))
    }

    pub fn concat(parts: &[&BitSequence]) -> BitSequence {
        BitSequence::from_bits(parts.iter().flat_map(|p| p.bits()))
    }

    /// The `a`-th k-mer, i.e. the packed value of `[a : a + k - 1]`.
    pub fn kmer_at(&self, a: usize, k: usize) -> Result<u128> {
        if k == 0 || k > MAX_WINDOW || k > self.len {
            return Err(Error::WindowTooLong {
                window: k,
                n: self.len,
            });
        }
        let max = self.len - k + 1;
        if a == 0 || a > max {
            return Err(Error::OutOfRange { pos: a, max });
        }
        Ok((a - 1..a - 1 + k).fold(0u128, |acc, i| (acc << 1) | self.bit0(i) as u128))
    }

    /// All windows of length `w`, in order of position (index 0 is position 1).
    pub fn windows(&self, w: usize) -> Vec<u128> {
        assert!(w >= 1 && w <= MAX_WINDOW, "window length {w} out of range");
        if w > self.len {
            return Vec::new();
        }
        let mask = window_mask(w);
        let mut out = Vec::with_capacity(self.len - w + 1);
        let mut acc = 0u128;
        for i in 0..self.len {
            acc = ((acc << 1) | self.bit0(i) as u128) & mask;
            if i + 1 >= w {
                out.push(acc);
            }
        }
        out
    }
}

impl fmt::Display for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.bits().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSequence({self})")
    }
}

impl FromStr for BitSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        s.bytes()
            .map(|b| match b {
                b'0' => Ok(false),
                b'1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "unexpected symbol {:?}",
                    other as char
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitSequence::from_bits)
    }
}

/// An ordered list of `m` equal-length sources. Equality is multiset
/// equality, so two source sets that differ only by relabeling compare equal.
#[derive(Clone, Debug)]
pub struct SourceSet {
    sources: Vec<BitSequence>,
}

impl SourceSet {
    pub fn new(sources: Vec<BitSequence>) -> Result<Self> {
        let Some(first) = sources.first() else {
            return Err(Error::InvalidParams(
                "a source set needs at least one sequence".into(),
            ));
        };
        let n = first.len();
        if n == 0 {
            return Err(Error::InvalidParams("sequences must be non-empty".into()));
        }
        if let Some(bad) = sources.iter().find(|s| s.len() != n) {
            return Err(Error::InvalidParams(format!(
                "all sources must have length {n}, found one of length {}",
                bad.len()
            )));
        }
        Ok(SourceSet { sources })
    }

    pub fn m(&self) -> usize {
        self.sources.len()
    }

    pub fn n(&self) -> usize {
        self.sources[0].len()
    }

    /// Source `i` (1-based).
    pub fn get(&self, i: usize) -> Result<&BitSequence> {
        if i == 0 || i > self.sources.len() {
            return Err(Error::OutOfRange {
                pos: i,
                max: self.sources.len(),
            });
        }
        Ok(&self.sources[i - 1])
    }

    pub fn sources(&self) -> &[BitSequence] {
        &self.sources
    }

    pub fn into_sources(self) -> Vec<BitSequence> {
        self.sources
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BitSequence> {
        self.sources.iter()
    }

    /// Sources sorted lexicographically: the canonical multiset representative.
    pub fn canonical(&self) -> Vec<BitSequence> {
        let mut v = self.sources.clone();
        v.sort();
        v
    }

    /// Multiset difference `self - other`, in sorted order.
    pub fn difference(&self, other: &SourceSet) -> Vec<BitSequence> {
        let mut rest = other.canonical();
        let mut out = Vec::new();
        for s in self.canonical() {
            match rest.binary_search(&s) {
                Ok(pos) => {
                    rest.remove(pos);
                }
                Err(_) => out.push(s),
            }
        }
        out
    }

    /// Newline-separated `0`/`1` strings, one source per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.sources {
            out.push_str(&s.to_string());
            out.push('\n');
        }
        out
    }

    /// Parse one source per non-empty line; `#` starts a comment line.
    pub fn from_text(text: &str) -> Result<Self> {
        let sources = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<Vec<BitSequence>>>()?;
        SourceSet::new(sources)
    }

    /// Convenience constructor from string literals.
    pub fn from_strs(strs: &[&str]) -> Result<Self> {
        SourceSet::new(strs.iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?)
    }
}

impl PartialEq for SourceSet {
    fn eq(&self, other: &Self) -> bool {
        self.m() == other.m() && self.canonical() == other.canonical()
    }
}

impl Eq for SourceSet {}

/// Generate `m` i.i.d. uniform length-`n` sources. Source `i` draws from its
/// own ChaCha stream keyed by `(seed, i)`, so any subset of sources can be
/// regenerated independently and in any order.
pub fn generate_sources(params: &Params, seed: u64) -> SourceSet {
    let sources = (0..params.m)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            BitSequence::random(params.n, &mut rng)
        })
        .collect();
    SourceSet { sources }
}

/// The k-mer windows of every source for a fixed window length.
#[derive(Clone, Debug)]
pub struct Windows {
    k: usize,
    n_prime: usize,
    per_source: Vec<Vec<u128>>,
}

impl Windows {
    pub fn new(x: &SourceSet, k: usize) -> Result<Self> {
        let n = x.n();
        if k == 0 || k > n || k > MAX_WINDOW {
            return Err(Error::WindowTooLong { window: k, n });
        }
        Ok(Windows {
            k,
            n_prime: n - k + 1,
            per_source: x.iter().map(|s| s.windows(k)).collect(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn m(&self) -> usize {
        self.per_source.len()
    }

    /// Positions per source, `n - k + 1`.
    pub fn n_prime(&self) -> usize {
        self.n_prime
    }

    /// The k-mer `x_i(a)`, both indices 1-based. Panics when out of range.
    #[inline]
    pub fn at(&self, i: usize, a: usize) -> u128 {
        self.per_source[i - 1][a - 1]
    }

    /// Windows of source `i` (1-based), 0-indexed by position.
    pub fn source(&self, i: usize) -> &[u128] {
        &self.per_source[i - 1]
    }
}

/// A deduplicated set of `(k+1)`-mers; `k` is the node (k-mer) length.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KmerSet {
    k: usize,
    kmers: Vec<u128>,
}

impl KmerSet {
    /// Build from packed `(k+1)`-mers; duplicates are removed.
    pub fn new(k: usize, mut kmers: Vec<u128>) -> Result<Self> {
        if k == 0 || k + 1 > MAX_WINDOW {
            return Err(Error::InvalidParams(format!(
                "node length k = {k} out of range"
            )));
        }
        let mask = window_mask(k + 1);
        if let Some(bad) = kmers.iter().find(|&&v| v & !mask != 0) {
            return Err(Error::InvalidParams(format!(
                "value {bad:#x} wider than {} bits",
                k + 1
            )));
        }
        kmers.sort_unstable();
        kmers.dedup();
        Ok(KmerSet { k, kmers })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.kmers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kmers.is_empty()
    }

    pub fn contains(&self, kmer: u128) -> bool {
        self.kmers.binary_search(&kmer).is_ok()
    }

    /// Sorted packed `(k+1)`-mers.
    pub fn as_slice(&self) -> &[u128] {
        &self.kmers
    }

    pub fn iter(&self) -> impl Iterator<Item = u128> + '_ {
        self.kmers.iter().copied()
    }

    /// Newline-separated `(k+1)`-mers in lexicographic order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for &v in &self.kmers {
            out.push_str(&format_window(v, self.k + 1));
            out.push('\n');
        }
        out
    }

    /// Parse one `(k+1)`-mer per line; all lines must share one length.
    pub fn from_text(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let Some(first) = lines.first() else {
            return Err(Error::Parse("empty k-mer set".into()));
        };
        let w = first.len();
        if w < 2 {
            return Err(Error::Parse(
                "(k+1)-mers must have at least 2 symbols".into(),
            ));
        }
        let kmers = lines
            .iter()
            .map(|l| {
                if l.len() != w {
                    return Err(Error::Parse(format!(
                        "mixed window lengths {w} and {}",
                        l.len()
                    )));
                }
                parse_window(l)
            })
            .collect::<Result<Vec<_>>>()?;
        KmerSet::new(w - 1, kmers)
    }
}

/// The set `Y(X)` of all `(k+1)`-mers of all sources.
pub fn extract_kmer_set(x: &SourceSet, k: usize) -> Result<KmerSet> {
    let n = x.n();
    if k + 1 > n || k + 1 > MAX_WINDOW || k == 0 {
        return Err(Error::WindowTooLong { window: k + 1, n });
    }
    let kmers = x.iter().flat_map(|s| s.windows(k + 1)).collect();
    KmerSet::new(k, kmers)
}
