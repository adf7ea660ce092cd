//! Exhaustive detectors for the repeat structures A, B, C, D and H.
//!
//! | kind | indices     | positions      | equalities                                   |
//! |------|-------------|----------------|----------------------------------------------|
//! | A    | `[i]`       | `[a, b]`       | `x_i(a) = x_i(b)`, `a < b`                   |
//! | B    | `[i, j, l]` | `[a, b, c, d]` | `x_i(a) = x_j(c)`, `x_i(b) = x_l(d)`, `0 <= b - a < k`, and `j != l` or `d - c != b - a` |
//! | C    | `[i, j]`    | `[p, a]`       | `x_i(p) = x_j(a)` with `p` in `{1, n'}`, `(j, a) != (i, p)` |
//! | D    | `[i, j]`    | `[a]`          | `x_i(a) = x_j(a)`, `i < j`                   |
//! | H    | `[i, j]`    | `[a, b, c]`    | `x_i(a) = x_j(c)`, `x_i(b) = x_j(c + b - a)`, `i != j`, `a < b` |
//!
//! All indices and positions are 1-based and `n' = n - k + 1`. In B the two
//! matched occurrences must differ from the anchors `(i, a)` and `(i, b)`.
//!
//! Every detector is an enumeration in a fixed lexicographic order;
//! [`Scanner::detect`] returns the first witness and [`Scanner::count`]
//! counts all of them.

use std::collections::HashMap;
use std::fmt;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{SourceSet, Windows};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EventKind {
    A,
    B,
    C,
    D,
    H,
}

impl EventKind {
    pub const ALL: [EventKind; 5] = [
        EventKind::A,
        EventKind::B,
        EventKind::C,
        EventKind::D,
        EventKind::H,
    ];
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EventWitness {
    pub kind: EventKind,
    pub indices: Vec<usize>,
    pub positions: Vec<usize>,
}

impl EventWitness {
    fn new(kind: EventKind, indices: &[usize], positions: &[usize]) -> Self {
        EventWitness {
            kind,
            indices: indices.to_vec(),
            positions: positions.to_vec(),
        }
    }

    /// Single-line JSON with fields in the order `kind`, `indices`, `positions`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }

    /// Re-check the witnessed equalities against `x`.
    pub fn validate(&self, x: &SourceSet, k: usize) -> bool {
        match Windows::new(x, k) {
            Ok(w) => self.validate_windows(&w),
            Err(_) => false,
        }
    }

    pub fn validate_windows(&self, w: &Windows) -> bool {
        let (m, np) = (w.m(), w.n_prime());
        let idx_ok = self.indices.iter().all(|&i| (1..=m).contains(&i));
        let pos_ok = self.positions.iter().all(|&p| (1..=np).contains(&p));
        let shape = match self.kind {
            EventKind::A => (1, 2),
            EventKind::B => (3, 4),
            EventKind::C | EventKind::D => (2, if self.kind == EventKind::C { 2 } else { 1 }),
            EventKind::H => (2, 3),
        };
        if (self.indices.len(), self.positions.len()) != shape || !idx_ok || !pos_ok {
            return false;
        }
        let x = |i: usize, a: usize| w.at(i, a);
        let ix = &self.indices;
        let p = &self.positions;
        match self.kind {
            EventKind::A => p[0] < p[1] && x(ix[0], p[0]) == x(ix[0], p[1]),
            EventKind::B => {
                let (i, j, l) = (ix[0], ix[1], ix[2]);
                let (a, b, c, d) = (p[0], p[1], p[2], p[3]);
                b >= a
                    && b - a < w.k()
                    && (j, c) != (i, a)
                    && (l, d) != (i, b)
                    && (j != l || d as i64 - c as i64 != (b - a) as i64)
                    && x(i, a) == x(j, c)
                    && x(i, b) == x(l, d)
            }
            EventKind::C => {
                let (i, j, pp, a) = (ix[0], ix[1], p[0], p[1]);
                (pp == 1 || pp == np) && (j, a) != (i, pp) && x(i, pp) == x(j, a)
            }
            EventKind::D => ix[0] < ix[1] && x(ix[0], p[0]) == x(ix[1], p[0]),
            EventKind::H => {
                let (i, j, a, b, c) = (ix[0], ix[1], p[0], p[1], p[2]);
                i != j
                    && a < b
                    && c + b - a <= np
                    && x(i, a) == x(j, c)
                    && x(i, b) == x(j, c + b - a)
            }
        }
    }
}

impl fmt::Display for EventWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

/// Windows of a source set plus an index from k-mer to its occurrences.
pub struct Scanner {
    windows: Windows,
    occurrences: HashMap<u128, Vec<(usize, usize)>>,
}

impl Scanner {
    pub fn new(x: &SourceSet, k: usize) -> Result<Self> {
        Ok(Scanner::from_windows(Windows::new(x, k)?))
    }

    pub fn from_windows(windows: Windows) -> Self {
        let mut occurrences: HashMap<u128, Vec<(usize, usize)>> = HashMap::new();
        for i in 1..=windows.m() {
            for (a0, &v) in windows.source(i).iter().enumerate() {
                occurrences.entry(v).or_default().push((i, a0 + 1));
            }
        }
        Scanner {
            windows,
            occurrences,
        }
    }

    pub fn windows(&self) -> &Windows {
        &self.windows
    }

    /// Occurrences `(i, a)` of a k-mer, sorted.
    pub fn occurrences(&self, kmer: u128) -> &[(usize, usize)] {
        self.occurrences.get(&kmer).map_or(&[], Vec::as_slice)
    }

    /// Occurrence lists of every k-mer seen more than once, in no particular order.
    pub fn repeats(&self) -> impl Iterator<Item = &[(usize, usize)]> + '_ {
        self.occurrences
            .values()
            .filter(|o| o.len() > 1)
            .map(Vec::as_slice)
    }

    /// Whether any k-mer occurs twice, within or across sources.
    pub fn has_repeat(&self) -> bool {
        self.occurrences.values().any(|o| o.len() > 1)
    }

    pub fn for_each<F>(&self, kind: EventKind, f: F) -> ControlFlow<()>
    where
        F: FnMut(EventWitness) -> ControlFlow<()>,
    {
        match kind {
            EventKind::A => self.for_each_a(f),
            EventKind::B => self.for_each_b(f),
            EventKind::C => self.for_each_c(f),
            EventKind::D => self.for_each_d(f),
            EventKind::H => self.for_each_h(f),
        }
    }

    pub fn detect(&self, kind: EventKind) -> Option<EventWitness> {
        let mut found = None;
        let _ = self.for_each(kind, |w| {
            found = Some(w);
            ControlFlow::Break(())
        });
        found
    }

    pub fn count(&self, kind: EventKind) -> u64 {
        let mut n = 0;
        let _ = self.for_each(kind, |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    /// All witnesses of `kind` in enumeration order.
    pub fn all(&self, kind: EventKind) -> Vec<EventWitness> {
        let mut out = Vec::new();
        let _ = self.for_each(kind, |w| {
            out.push(w);
            ControlFlow::Continue(())
        });
        out
    }

    // order: (i, a, b)
    fn for_each_a<F: FnMut(EventWitness) -> ControlFlow<()>>(&self, mut f: F) -> ControlFlow<()> {
        let w = &self.windows;
        for i in 1..=w.m() {
            for a in 1..=w.n_prime() {
                for &(j, b) in self.occurrences(w.at(i, a)) {
                    if j == i && b > a {
                        f(EventWitness::new(EventKind::A, &[i], &[a, b]))?;
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }

    // order: (i, a, b, j, c, l, d)
    fn for_each_b<F: FnMut(EventWitness) -> ControlFlow<()>>(&self, mut f: F) -> ControlFlow<()> {
        let w = &self.windows;
        let np = w.n_prime();
        for i in 1..=w.m() {
            for a in 1..=np {
                let first = self.occurrences(w.at(i, a));
                if first.len() < 2 {
                    continue;
                }
                for b in a..=(a + w.k() - 1).min(np) {
                    let second = self.occurrences(w.at(i, b));
                    if second.len() < 2 {
                        continue;
                    }
                    for &(j, c) in first {
                        if (j, c) == (i, a) {
                            continue;
                        }
                        for &(l, d) in second {
                            if (l, d) == (i, b) {
                                continue;
                            }
                            if j != l || d as i64 - c as i64 != (b - a) as i64 {
                                f(EventWitness::new(EventKind::B, &[i, j, l], &[a, b, c, d]))?;
                            }
                        }
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }

    // order: (i, first-then-last, j, a)
    fn for_each_c<F: FnMut(EventWitness) -> ControlFlow<()>>(&self, mut f: F) -> ControlFlow<()> {
        let w = &self.windows;
        let np = w.n_prime();
        for i in 1..=w.m() {
            let ends: &[usize] = if np == 1 { &[1] } else { &[1, np] };
            for &p in ends {
                for &(j, a) in self.occurrences(w.at(i, p)) {
                    if (j, a) != (i, p) {
                        f(EventWitness::new(EventKind::C, &[i, j], &[p, a]))?;
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }

    // order: (i, j, a)
    fn for_each_d<F: FnMut(EventWitness) -> ControlFlow<()>>(&self, mut f: F) -> ControlFlow<()> {
        let w = &self.windows;
        for i in 1..=w.m() {
            for j in i + 1..=w.m() {
                let (si, sj) = (w.source(i), w.source(j));
                for a0 in 0..w.n_prime() {
                    if si[a0] == sj[a0] {
                        f(EventWitness::new(EventKind::D, &[i, j], &[a0 + 1]))?;
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }

    // order: (i, j, a, b, c) over ordered pairs i != j
    fn for_each_h<F: FnMut(EventWitness) -> ControlFlow<()>>(&self, mut f: F) -> ControlFlow<()> {
        let w = &self.windows;
        let np = w.n_prime();
        let mut matches = Vec::new();
        for i in 1..=w.m() {
            for j in (1..=w.m()).filter(|&j| j != i) {
                let sj = w.source(j);
                for a in 1..np {
                    matches.clear();
                    matches.extend(
                        self.occurrences(w.at(i, a))
                            .iter()
                            .filter(|&&(s, _)| s == j)
                            .map(|&(_, c)| c),
                    );
                    if matches.is_empty() {
                        continue;
                    }
                    for b in a + 1..=np {
                        let target = w.at(i, b);
                        for &c in &matches {
                            let d = c + b - a;
                            if d <= np && sj[d - 1] == target {
                                f(EventWitness::new(EventKind::H, &[i, j], &[a, b, c]))?;
                            }
                        }
                    }
                }
            }
        }
        ControlFlow::Continue(())
    }
}

pub fn detect_a(x: &SourceSet, k: usize) -> Result<Option<EventWitness>> {
    Ok(Scanner::new(x, k)?.detect(EventKind::A))
}

pub fn detect_b(x: &SourceSet, k: usize) -> Result<Option<EventWitness>> {
    Ok(Scanner::new(x, k)?.detect(EventKind::B))
}

pub fn detect_c(x: &SourceSet, k: usize) -> Result<Option<EventWitness>> {
    Ok(Scanner::new(x, k)?.detect(EventKind::C))
}

pub fn detect_d(x: &SourceSet, k: usize) -> Result<Option<EventWitness>> {
    Ok(Scanner::new(x, k)?.detect(EventKind::D))
}

pub fn detect_h(x: &SourceSet, k: usize) -> Result<Option<EventWitness>> {
    Ok(Scanner::new(x, k)?.detect(EventKind::H))
}
