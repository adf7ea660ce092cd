//! Closed-form quantities: the asymptotic region classifier, finite-n union
//! bounds, and the V/U repeat statistics with their moment bounds.
//!
//! Every `n^{-β}` factor is evaluated as `2^{-k}` with the integer `k` of the
//! parameter set, so the finite-n values never depend on how β was rounded.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::events::EventKind;
use crate::model::{Params, SourceSet, Windows};
use crate::{Error, Result};

/// The limit of `E[U]^2 / E[U^2]` implied by the displayed U bounds.
pub const U_RATIO_LIMIT: f64 = 1.0 / 16384.0;

/// Limit of the V-statistic Paley-Zygmund bound when the `m^4 n^2` term dominates.
pub const V_RATIO_LIMIT: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Feasible,
    Infeasible,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Feasible => "feasible",
            Verdict::Infeasible => "infeasible",
            Verdict::Unknown => "unknown",
        })
    }
}

/// One of the three lines bounding the feasibility region.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Constraint {
    /// `β = 2α + 1`: same-position repeats between sources.
    TwoAlphaPlusOne,
    /// `β = α + 2`: repeats inside a single source.
    AlphaPlusTwo,
    /// `β = α + 3/2`: equal-gap double repeats.
    AlphaPlusThreeHalves,
}

impl Constraint {
    pub fn threshold(self, alpha: f64) -> f64 {
        match self {
            Constraint::TwoAlphaPlusOne => 2.0 * alpha + 1.0,
            Constraint::AlphaPlusTwo => alpha + 2.0,
            Constraint::AlphaPlusThreeHalves => alpha + 1.5,
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::TwoAlphaPlusOne => "beta = 2*alpha + 1",
            Constraint::AlphaPlusTwo => "beta = alpha + 2",
            Constraint::AlphaPlusThreeHalves => "beta = alpha + 3/2",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionClass {
    pub verdict: Verdict,
    /// The line that decided the verdict. For `Unknown` this is the
    /// achievability line that β failed to clear.
    pub binding_constraint: Constraint,
}

fn larger(alpha: f64, a: Constraint, b: Constraint) -> Constraint {
    if a.threshold(alpha) >= b.threshold(alpha) {
        a
    } else {
        b
    }
}

/// Classify `(α, β)` against the inner and outer boundaries of the
/// feasibility region. Points on a boundary are `Unknown`.
pub fn classify_region(alpha: f64, beta: f64) -> RegionClass {
    let achievable = larger(alpha, Constraint::TwoAlphaPlusOne, Constraint::AlphaPlusTwo);
    let converse = larger(
        alpha,
        Constraint::TwoAlphaPlusOne,
        Constraint::AlphaPlusThreeHalves,
    );
    if beta > achievable.threshold(alpha) {
        RegionClass {
            verdict: Verdict::Feasible,
            binding_constraint: achievable,
        }
    } else if beta < converse.threshold(alpha) {
        RegionClass {
            verdict: Verdict::Infeasible,
            binding_constraint: converse,
        }
    } else {
        RegionClass {
            verdict: Verdict::Unknown,
            binding_constraint: achievable,
        }
    }
}

fn pow2_neg(k: usize) -> f64 {
    (-(k as f64)).exp2()
}

/// Union bound on the probability that any k-mer appears twice:
/// `m^2 n^2 2^{-k} + m n^2 2^{-k}`. May exceed one.
pub fn repeat_free_bound(params: &Params) -> f64 {
    let (n, m) = (params.n as f64, params.m as f64);
    (m * m * n * n + m * n * n) * pow2_neg(params.k)
}

/// Finite-n union bounds on the probabilities of events A through D.
pub fn event_bounds(params: &Params) -> BTreeMap<EventKind, f64> {
    let (n, m, k) = (params.n as f64, params.m as f64, params.k as f64);
    let t = pow2_neg(params.k);
    let t2 = t * t;
    let two_k = 2.0 * k;
    BTreeMap::from([
        (EventKind::A, m * n * n * t),
        (
            EventKind::B,
            m.powi(3) * n.powi(3) * two_k * t2 + m * m * n * n * two_k * two_k * t2,
        ),
        (EventKind::C, 2.0 * m * m * n * t),
        (EventKind::D, m * m * n * t),
    ])
}

fn require_pair(x: &SourceSet) -> Result<()> {
    if x.m() < 2 {
        return Err(Error::Precondition(format!(
            "statistic needs at least two sources, got {}",
            x.m()
        )));
    }
    Ok(())
}

/// Number of `(i < j, a)` with equal k-mers at the same position `a`.
pub fn v_statistic(x: &SourceSet, k: usize) -> Result<u64> {
    require_pair(x)?;
    let w = Windows::new(x, k)?;
    let mut v = 0u64;
    for i in 1..=w.m() {
        for j in i + 1..=w.m() {
            let (si, sj) = (w.source(i), w.source(j));
            v += si.iter().zip(sj).filter(|(p, q)| p == q).count() as u64;
        }
    }
    Ok(v)
}

/// Number of `(i < j, a < b, c)` with `x_i(a) = x_j(c)` and
/// `x_i(b) = x_j(c + b - a)`.
///
/// For a fixed pair and offset `δ = c - a`, the matching positions lie on a
/// diagonal and every pair of them is one witness, so each diagonal with `s`
/// matches contributes `s(s-1)/2`.
pub fn u_statistic(x: &SourceSet, k: usize) -> Result<u64> {
    require_pair(x)?;
    let w = Windows::new(x, k)?;
    let np = w.n_prime() as isize;
    let mut u = 0u64;
    for i in 1..=w.m() {
        for j in i + 1..=w.m() {
            let (si, sj) = (w.source(i), w.source(j));
            for delta in -(np - 1)..np {
                let lo = 0.max(-delta);
                let hi = np.min(np - delta);
                let s = (lo..hi)
                    .filter(|&a| si[a as usize] == sj[(a + delta) as usize])
                    .count() as u64;
                u += s * s.saturating_sub(1) / 2;
            }
        }
    }
    Ok(u)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    /// The statistic measured on one instance, when one was supplied.
    pub value: Option<u64>,
    /// Exact first moment (V) or its lower bound (U).
    pub e_first: f64,
    /// Upper bound on the second moment.
    pub e_second_bound: f64,
    /// `e_first^2 / e_second_bound`, a lower bound on `Pr(statistic > 0)`.
    pub pz_lower: f64,
}

impl MomentReport {
    fn new(e_first: f64, e_second_bound: f64) -> Self {
        let pz_lower = if e_second_bound > 0.0 {
            (e_first * e_first / e_second_bound).clamp(0.0, 1.0)
        } else {
            0.0
        };
        MomentReport {
            value: None,
            e_first,
            e_second_bound,
            pz_lower,
        }
    }

    pub fn with_value(mut self, value: u64) -> Self {
        self.value = Some(value);
        self
    }
}

fn pairs(m: usize) -> f64 {
    (m * (m - 1) / 2) as f64
}

fn require_m(params: &Params) -> Result<()> {
    if params.m < 2 {
        return Err(Error::Precondition(format!(
            "moments need m >= 2, got {}",
            params.m
        )));
    }
    Ok(())
}

/// `E[V] = C(m,2)(n-k+1)2^{-k}` and `E[V^2] <= m^4 n^2 2^{-2k} + 2 m^2 n k 2^{-k}`.
pub fn moments_v(params: &Params) -> Result<MomentReport> {
    require_m(params)?;
    let (n, m, k) = (params.n as f64, params.m as f64, params.k as f64);
    let t = pow2_neg(params.k);
    let e_first = pairs(params.m) * params.n_prime() as f64 * t;
    let e_second = m.powi(4) * n * n * t * t + 2.0 * m * m * n * k * t;
    Ok(MomentReport::new(e_first, e_second))
}

/// `E[U] >= C(m,2)(n'/4)^3 2^{-2k}` and
/// `E[U^2] <= (m^2 n^3 2^{-2k})^2 + m^2 n^3 (2k)^3 2^{-2k}`.
pub fn moments_u(params: &Params) -> Result<MomentReport> {
    require_m(params)?;
    let (n, m, k) = (params.n as f64, params.m as f64, params.k as f64);
    let t2 = pow2_neg(2 * params.k);
    let quarter = params.n_prime() as f64 / 4.0;
    let e_first = pairs(params.m) * quarter.powi(3) * t2;
    let lead = m * m * n.powi(3) * t2;
    let e_second = lead * lead + m * m * n.powi(3) * (2.0 * k).powi(3) * t2;
    Ok(MomentReport::new(e_first, e_second))
}
