//! The similarity graph on E × E and walk counting.
//!
//! Vertices are ordered pairs (x, x') of points; (x, x') and (y, y') are
//! adjacent when they differ and ‖y' − x'‖ = r‖y − x‖. A walk of length k is
//! then a pair of k-step walks in E whose steps are r-dilated, so walk counts
//! reproduce |S_k(r)| whenever distinct points have nonzero distance.

use std::collections::{HashMap, HashSet};
use std::io::{self, Write};

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::Ratio;
use crate::geometry::PointSet;
use crate::limits::{guard, GRAPH_VERTEX_LIMIT};
use crate::pattern::{Count, Pattern};

/// Which pairs of vertices are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkRule {
    /// (x, x') ~ (y, y') iff (x, x') ≠ (y, y') and ‖y' − x'‖ = r‖y − x‖.
    Similarity,
    /// (x, x') ~ (y, y') iff x ≠ y and ‖y' − x'‖ = r‖y − x‖. Walks in this
    /// graph are exactly the tuples of S_k(r) for every p.
    DistinctBase,
}

/// The graph on E × E, with adjacency evaluated on the fly from the distance
/// buckets of E rather than stored.
#[derive(Debug, Clone)]
pub struct SimGraph<'a> {
    set: &'a PointSet,
    r: Ratio,
    rule: WalkRule,
    rmap: Vec<u32>,
    edges: Count,
}

/// The similarity graph. When the form is anisotropic the edge count is
/// checked against |S_1(r)|/2 computed from the distance histogram.
pub fn build_similarity_graph(set: &PointSet, r: Ratio) -> Result<SimGraph<'_>> {
    let g = SimGraph::with_rule(set, r, WalkRule::Similarity)?;
    if set.anisotropic_space() {
        let hist = set.table().histogram();
        let prime = set.prime();
        let s1: Count = prime
            .nonzero_elements()
            .map(|t| hist[t.value() as usize] * hist[prime.mul(r.value(), t).value() as usize])
            .sum();
        if 2 * g.edges != s1 {
            return Err(Error::MethodMismatch {
                name: "edge count".into(),
                detail: format!("2e(G) = {} but |S_1(r)| = {s1}", 2 * g.edges),
            });
        }
    }
    Ok(g)
}

impl<'a> SimGraph<'a> {
    pub fn with_rule(set: &'a PointSet, r: Ratio, rule: WalkRule) -> Result<SimGraph<'a>> {
        let n = set.len() as u128;
        guard("similarity graph vertices", n * n, GRAPH_VERTEX_LIMIT)?;
        let prime = set.prime();
        let rmap = prime.elements().map(|t| prime.mul(r.value(), t).value()).collect();
        let mut g = SimGraph { set, r, rule, rmap, edges: 0 };
        g.edges = g.degrees().iter().sum::<Count>() / 2;
        Ok(g)
    }

    pub fn rule(&self) -> WalkRule {
        self.rule
    }

    pub fn ratio(&self) -> Ratio {
        self.r
    }

    pub fn vertex_count(&self) -> usize {
        self.set.len() * self.set.len()
    }

    pub fn edge_count(&self) -> Count {
        self.edges
    }

    /// deg(x, x') = Σ_t |B_x(t)|·|B_{x'}(rt)| minus the excluded targets.
    pub fn degrees(&self) -> Vec<Count> {
        let n = self.set.len();
        let table = self.set.table();
        let p = self.rmap.len();
        (0..n * n)
            .into_par_iter()
            .map(|v| {
                let (x, xp) = (v / n, v % n);
                let all: Count = (0..p)
                    .map(|t| {
                        table.bucket(x, crate::Scalar(t as u32)).len() as Count
                            * table.bucket(xp, crate::Scalar(self.rmap[t])).len() as Count
                    })
                    .sum();
                match self.rule {
                    WalkRule::Similarity => all - 1,
                    WalkRule::DistinctBase => all - table.bucket(xp, crate::Scalar::ZERO).len() as Count,
                }
            })
            .collect()
    }

    /// One adjacency product g = A·f, with vertices (x, x') at index x·n + x'.
    pub fn step(&self, f: &[Count]) -> Vec<Count> {
        let n = self.set.len();
        let p = self.rmap.len();
        let table = self.set.table();
        // For each second coordinate y', h[x·p + s] = Σ_{x' : ‖x' − y'‖ = s} f(x, x').
        let columns: Vec<Vec<Count>> = (0..n)
            .into_par_iter()
            .map(|yp| {
                let mut h = vec![0 as Count; n * p];
                for s in 0..p {
                    for &xp in table.bucket(yp, crate::Scalar(s as u32)) {
                        for x in 0..n {
                            h[x * p + s] += f[x * n + xp as usize];
                        }
                    }
                }
                (0..n)
                    .map(|y| {
                        let all: Count = (0..n).map(|x| h[x * p + self.rmap[table.raw(x, y) as usize] as usize]).sum();
                        match self.rule {
                            WalkRule::Similarity => all - f[y * n + yp],
                            WalkRule::DistinctBase => all - h[y * p],
                        }
                    })
                    .collect()
            })
            .collect();
        let mut g = vec![0; n * n];
        for (yp, col) in columns.into_iter().enumerate() {
            for (y, v) in col.into_iter().enumerate() {
                g[y * n + yp] = v;
            }
        }
        g
    }

    /// Number of (k+1)-vertex sequences with consecutive vertices adjacent.
    pub fn count_walks(&self, k: usize) -> Count {
        let mut f = vec![1 as Count; self.vertex_count()];
        for _ in 0..k {
            f = self.step(&f);
        }
        f.iter().sum()
    }

    /// Writes one `u v` line per edge with u < v, vertices printed as
    /// `x|x'` using the point coordinates.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        let n = self.set.len();
        let table = self.set.table();
        let pts = self.set.points();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.rule == WalkRule::DistinctBase && a == c {
                        continue;
                    }
                    let t = self.rmap[table.raw(a, c) as usize];
                    for &d in table.bucket(b, crate::Scalar(t)) {
                        let (u, v) = (a * n + b, c * n + d as usize);
                        if u < v {
                            writeln!(w, "{}|{} {}|{}", pts[a], pts[b], pts[c], pts[d as usize])?;
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// A simple graph on at most 64 vertices stored as adjacency bitmasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseGraph {
    adj: Vec<u64>,
}

impl DenseGraph {
    /// Graph on `n` vertices whose edges are the set bits of `mask`, with
    /// bit b standing for the b-th pair (i, j), i < j, in lexicographic order.
    pub fn from_edge_mask(n: usize, mask: u64) -> DenseGraph {
        assert!(n <= 64);
        let mut adj = vec![0u64; n];
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if mask >> bit & 1 == 1 {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
                bit += 1;
            }
        }
        DenseGraph { adj }
    }

    /// Every labeled simple graph on `n` vertices (2^{n(n−1)/2} of them).
    pub fn all_labeled(n: usize) -> impl Iterator<Item = DenseGraph> {
        let pairs = n * n.saturating_sub(1) / 2;
        assert!(pairs < 64);
        (0..1u64 << pairs).map(move |mask| DenseGraph::from_edge_mask(n, mask))
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> Count {
        self.adj.iter().map(|a| a.count_ones() as Count).sum::<Count>() / 2
    }

    pub fn is_regular(&self) -> bool {
        self.adj.windows(2).all(|w| w[0].count_ones() == w[1].count_ones())
    }

    pub fn count_walks(&self, k: usize) -> Count {
        let n = self.adj.len();
        let mut f = vec![1 as Count; n];
        for _ in 0..k {
            f = (0..n)
                .map(|v| (0..n).filter(|&u| self.adj[v] >> u & 1 == 1).map(|u| f[u]).sum())
                .collect();
        }
        f.iter().sum()
    }
}

/// (2e)^k / n^{k−1}, the walk-count lower bound for a graph with n vertices
/// and e edges.
pub fn ms_lower_bound(n: u128, e: u128, k: u32) -> BigRational {
    assert!(n >= 1, "graph must have a vertex");
    let num = (BigInt::from(2) * BigInt::from(e)).pow(k);
    let den = BigInt::from(n).pow(k.saturating_sub(1));
    if k == 0 {
        // (2e)^0 / n^{-1} = n
        return BigRational::from_integer(BigInt::from(n));
    }
    BigRational::new(num, den)
}

/// The two incidence-graph double counts behind the walk-pair lower bounds.
///
/// First graph: left side E × E, right side the tuples (x_1, x_2, y_1, y_2)
/// of S_1(r), each joined to (x_1, y_1) and (x_2, y_2). Pairs of right
/// vertices sharing a left neighbour map onto S_2(r) with every fiber of
/// size exactly 4, so Σ_L d_v² = 4|S_2(r)|.
///
/// Second graph: left side E⁴, right side S_2(r), with (x_1, x_2, x_3, y_1,
/// y_2, y_3) joined to (x_1, x_3, y_1, y_3); here Σ_L d_v² = |C(r)|.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct DoubleCount {
    pub s1: Count,
    pub s2: Count,
    pub c: Count,
    pub pair_degree_sum: Count,
    pub pair_degree_sq_sum: Count,
    pub pair_left_size: Count,
    /// Every fiber of the map onto S_2(r) has exactly four elements and the
    /// image is all of S_2(r).
    pub fibers_exactly_four: bool,
    pub quad_degree_sum: Count,
    pub quad_degree_sq_sum: Count,
    pub quad_left_size: Count,
}

impl DoubleCount {
    pub fn identities_hold(&self) -> bool {
        self.pair_degree_sum == 2 * self.s1
            && self.pair_degree_sq_sum == 4 * self.s2
            && self.fibers_exactly_four
            && self.quad_degree_sum == self.s2
            && self.quad_degree_sq_sum == self.c
    }

    /// Σd_v² ≥ (Σd_v)²/|L| on both graphs, as integer inequalities.
    pub fn cauchy_schwarz_holds(&self) -> bool {
        self.pair_degree_sq_sum * self.pair_left_size >= self.pair_degree_sum * self.pair_degree_sum
            && self.quad_degree_sq_sum * self.quad_left_size >= self.quad_degree_sum * self.quad_degree_sum
    }
}

/// Builds both incidence graphs explicitly and evaluates the double counts.
pub fn verify_bipartite_double_count(set: &PointSet, r: Ratio) -> Result<DoubleCount> {
    let n = set.len();
    let s1_tuples = Pattern::walk_pair(1).collect(set, r)?;
    let s2_tuples = Pattern::walk_pair(2).collect(set, r)?;
    let c = Pattern::closed_walk_pair(4).count(set, r)?;

    // incidences[v] = (right vertex, which endpoint) for v = (x, y) at x·n + y
    let mut incidences: Vec<Vec<(usize, u8)>> = vec![Vec::new(); n * n];
    for (i, t) in s1_tuples.iter().enumerate() {
        let (x1, x2, y1, y2) = (t[0], t[1], t[2], t[3]);
        incidences[x1 * n + y1].push((i, 0));
        incidences[x2 * n + y2].push((i, 1));
    }
    let pair_degree_sum: Count = incidences.iter().map(|l| l.len() as Count).sum();
    let pair_degree_sq_sum: Count = incidences.iter().map(|l| (l.len() as Count).pow(2)).sum();

    let mut fibers: HashMap<[usize; 6], u32> = HashMap::new();
    for list in &incidences {
        for &(u, eu) in list {
            for &(w, ew) in list {
                let [a, b, a1, b1] = <[usize; 4]>::try_from(s1_tuples[u].as_slice()).expect("4-tuple");
                let [c, d, c1, d1] = <[usize; 4]>::try_from(s1_tuples[w].as_slice()).expect("4-tuple");
                let image = match (eu, ew) {
                    (0, 0) => [b, a, d, b1, a1, d1],
                    (0, _) => [b, a, c, b1, a1, c1],
                    (_, 0) => [a, b, d, a1, b1, d1],
                    _ => [a, b, c, a1, b1, c1],
                };
                *fibers.entry(image).or_default() += 1;
            }
        }
    }
    let s2_set: HashSet<[usize; 6]> =
        s2_tuples.iter().map(|t| <[usize; 6]>::try_from(t.as_slice()).expect("6-tuple")).collect();
    let fibers_exactly_four = fibers.len() == s2_set.len()
        && fibers.iter().all(|(image, &count)| count == 4 && s2_set.contains(image));

    let mut quad_degree: HashMap<[usize; 4], Count> = HashMap::new();
    for t in &s2_tuples {
        *quad_degree.entry([t[0], t[2], t[3], t[5]]).or_default() += 1;
    }
    let quad_degree_sum = quad_degree.values().sum();
    let quad_degree_sq_sum = quad_degree.values().map(|d| d * d).sum();

    Ok(DoubleCount {
        s1: s1_tuples.len() as Count,
        s2: s2_tuples.len() as Count,
        c,
        pair_degree_sum,
        pair_degree_sq_sum,
        pair_left_size: (n * n) as Count,
        fibers_exactly_four,
        quad_degree_sum,
        quad_degree_sq_sum,
        quad_left_size: (n as Count).pow(4),
    })
}
