//! Interval bounds on how often any reconstruction traverses each edge.
//!
//! A reconstruction is `m` walks of `len` edges. Writing `c_e` for the number
//! of traversals of edge `e` and `s_v`, `t_v` for the number of walks starting
//! and ending at node `v`, every reconstruction satisfies
//!
//! * `c_e >= 1` and `sum_e c_e = m * len`;
//! * `out(v) - in(v) = s_v - t_v` at every node;
//! * every node without in-edges starts a walk and every node without
//!   out-edges ends one, so at most `m - #sources` walks start elsewhere (and
//!   likewise for ends).
//!
//! Propagating these constraints to a fixpoint yields bounds `lower <= c <=
//! upper` that hold for every reconstruction. When the lower bounds already
//! sum to `m * len` they are the exact traversal counts.

use std::collections::VecDeque;

use crate::debruijn::DeBruijnGraph;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct VisitBounds {
    pub lower: Vec<u32>,
    pub upper: Vec<u32>,
}

impl VisitBounds {
    pub fn exact(&self) -> bool {
        self.lower == self.upper
    }
}

struct Node {
    ins: Vec<usize>,
    outs: Vec<usize>,
    /// Bounds on `s_v - t_v`.
    lo: i64,
    hi: i64,
}

/// Bounds indexed like `g.edges()`, or `None` when the constraints are
/// contradictory and no reconstruction exists.
pub(crate) fn visit_bounds(g: &DeBruijnGraph, m: usize, len: usize) -> Option<VisitBounds> {
    let n = g.node_count();
    let edge_count = g.edge_count();
    let total = (m * len) as i64;
    if edge_count as i64 > total {
        return None;
    }
    let mut ends = Vec::with_capacity(edge_count);
    let mut nodes: Vec<Node> = (0..n)
        .map(|_| Node {
            ins: Vec::new(),
            outs: Vec::new(),
            lo: 0,
            hi: 0,
        })
        .collect();
    for (e, &kmer) in g.edges().iter().enumerate() {
        let u = g.node_index(g.edge_prefix(kmer)).expect("prefix is a node");
        let v = g.node_index(g.edge_suffix(kmer)).expect("suffix is a node");
        nodes[u].outs.push(e);
        nodes[v].ins.push(e);
        ends.push((u, v));
    }
    let sources = nodes.iter().filter(|d| d.ins.is_empty()).count();
    let sinks = nodes.iter().filter(|d| d.outs.is_empty()).count();
    if sources > m || sinks > m {
        return None;
    }
    let (extra_s, extra_t) = ((m - sources) as i64, (m - sinks) as i64);
    for d in nodes.iter_mut() {
        let (src, snk) = (d.ins.is_empty(), d.outs.is_empty());
        let smin = src as i64;
        let smax = if snk { 0 } else { src as i64 + extra_s };
        let tmin = snk as i64;
        let tmax = if src { 0 } else { snk as i64 + extra_t };
        d.lo = smin - tmax;
        d.hi = smax - tmin;
    }

    let mut lower = vec![1i64; edge_count];
    let mut upper = vec![total - (edge_count as i64 - 1); edge_count];
    let mut sum_lower = edge_count as i64;
    let mut queued = vec![false; n];
    let mut queue = VecDeque::with_capacity(n);

    loop {
        let round_slack = total - sum_lower;
        for v in 0..n {
            queued[v] = true;
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            queued[v] = false;
            let slack = total - sum_lower;
            if slack < 0 {
                return None;
            }
            let node = &nodes[v];
            let eff = |e: usize, lower: &[i64], upper: &[i64]| upper[e].min(lower[e] + slack);
            let in_l: i64 = node.ins.iter().map(|&e| lower[e]).sum();
            let in_u: i64 = node.ins.iter().map(|&e| eff(e, &lower, &upper)).sum();
            let out_l: i64 = node.outs.iter().map(|&e| lower[e]).sum();
            let out_u: i64 = node.outs.iter().map(|&e| eff(e, &lower, &upper)).sum();
            let mut updates: Vec<(usize, i64, i64)> = Vec::with_capacity(4);
            for &e in &node.outs {
                let (others_l, others_u) = (out_l - lower[e], out_u - eff(e, &lower, &upper));
                updates.push((e, in_l + node.lo - others_u, in_u + node.hi - others_l));
            }
            for &e in &node.ins {
                let (others_l, others_u) = (in_l - lower[e], in_u - eff(e, &lower, &upper));
                updates.push((e, out_l - node.hi - others_u, out_u - node.lo - others_l));
            }
            for (e, new_l, new_u) in updates {
                let mut touched = false;
                if new_l > lower[e] {
                    sum_lower += new_l - lower[e];
                    lower[e] = new_l;
                    touched = true;
                }
                if new_u < upper[e] {
                    upper[e] = new_u;
                    touched = true;
                }
                if lower[e] > upper[e] || sum_lower > total {
                    return None;
                }
                if touched {
                    for w in [ends[e].0, ends[e].1] {
                        if !queued[w] {
                            queued[w] = true;
                            queue.push_back(w);
                        }
                    }
                }
            }
        }
        if total - sum_lower == round_slack {
            break;
        }
    }

    let slack = total - sum_lower;
    let upper: Vec<u32> = (0..edge_count)
        .map(|e| upper[e].min(lower[e] + slack) as u32)
        .collect();
    let lower: Vec<u32> = lower.into_iter().map(|l| l as u32).collect();
    Some(VisitBounds { lower, upper })
}
