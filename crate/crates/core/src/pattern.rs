//! Backtracking enumeration of dilated configuration pairs.
//!
//! A [`Pattern`] describes a set of 2m-tuples (x_0..x_{m-1}, y_0..y_{m-1}) of
//! points of E: a list of edges (i, j) with ‖y_i − y_j‖ = r‖x_i − x_j‖ and
//! x_i ≠ x_j, plus extra equalities and inequalities between vertices. Every
//! configuration family in this crate (walk pairs, closed walks, paths,
//! cycles, simplexes and their degenerate pieces) is one such pattern.
//!
//! The search assigns x_0, y_0, x_1, y_1, … in order. When y_i is joined by
//! an edge to an earlier vertex j, its candidates come from the distance
//! bucket of y_j instead of all of E, so the enumeration visits exactly the
//! tuples of the family plus failed partial prefixes.

use std::ops::ControlFlow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Prime, Ratio, Scalar};
use crate::geometry::{dist, DistanceTable, PointSet};
use crate::limits::{guard, sat_pow, BRUTE_LIMIT};

/// Exact configuration counts.
pub type Count = u128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pattern {
    m: usize,
    edges: Vec<(usize, usize)>,
    x_eq: Vec<(usize, usize)>,
    y_eq: Vec<(usize, usize)>,
    x_neq: Vec<(usize, usize)>,
    y_neq: Vec<(usize, usize)>,
}

fn all_pairs(m: usize) -> Vec<(usize, usize)> {
    (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect()
}

impl Pattern {
    /// m vertices and no constraints.
    pub fn new(m: usize) -> Pattern {
        assert!(m >= 1, "a pattern needs at least one vertex");
        Pattern { m, edges: vec![], x_eq: vec![], y_eq: vec![], x_neq: vec![], y_neq: vec![] }
    }

    /// Pairs of k-step walks: x_i ≠ x_{i+1} and ‖y_i − y_{i+1}‖ = r‖x_i − x_{i+1}‖.
    pub fn walk_pair(k: usize) -> Pattern {
        let mut p = Pattern::new(k + 1);
        p.edges = (0..k).map(|i| (i, i + 1)).collect();
        p
    }

    /// Pairs of closed walks of the given length.
    pub fn closed_walk_pair(len: usize) -> Pattern {
        assert!(len >= 3);
        let mut p = Pattern::walk_pair(len - 1);
        p.edges.push((0, len - 1));
        p
    }

    /// Pairs of k-paths: walk pairs whose x's are pairwise distinct and whose
    /// y's are pairwise distinct.
    pub fn path_pair(k: usize) -> Pattern {
        Pattern::walk_pair(k).all_distinct()
    }

    /// Pairs of cycles of the given length with all vertices distinct.
    pub fn cycle_pair(len: usize) -> Pattern {
        Pattern::closed_walk_pair(len).all_distinct()
    }

    /// Pairs of simplexes on m vertices: every pair of vertices is an edge and
    /// all vertices are distinct on both sides.
    pub fn simplex_pair(m: usize) -> Pattern {
        let mut p = Pattern::new(m);
        p.edges = all_pairs(m);
        p.all_distinct()
    }

    pub fn all_distinct(mut self) -> Pattern {
        for pair in all_pairs(self.m) {
            self = self.x_distinct(pair.0, pair.1).y_distinct(pair.0, pair.1);
        }
        self
    }

    fn checked(&self, i: usize, j: usize) -> (usize, usize) {
        assert!(i != j && i < self.m && j < self.m, "bad vertex pair ({i}, {j})");
        (i.min(j), i.max(j))
    }

    pub fn edge(mut self, i: usize, j: usize) -> Pattern {
        let e = self.checked(i, j);
        self.edges.push(e);
        self
    }

    pub fn x_equal(mut self, i: usize, j: usize) -> Pattern {
        let e = self.checked(i, j);
        self.x_eq.push(e);
        self
    }

    pub fn y_equal(mut self, i: usize, j: usize) -> Pattern {
        let e = self.checked(i, j);
        self.y_eq.push(e);
        self
    }

    pub fn x_distinct(mut self, i: usize, j: usize) -> Pattern {
        let e = self.checked(i, j);
        if !self.x_neq.contains(&e) {
            self.x_neq.push(e);
        }
        self
    }

    pub fn y_distinct(mut self, i: usize, j: usize) -> Pattern {
        let e = self.checked(i, j);
        if !self.y_neq.contains(&e) {
            self.y_neq.push(e);
        }
        self
    }

    /// Number of vertices on each side.
    pub fn vertices(&self) -> usize {
        self.m
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// |E|^{2m}, the size of the raw tuple space.
    pub fn tuple_space(&self, n: usize) -> u128 {
        sat_pow(n as u128, 2 * self.m as u32)
    }

    /// Checks a tuple (x_0..x_{m-1}, y_0..y_{m-1}) of indices into `set`
    /// against the definition, recomputing every distance from coordinates.
    pub fn holds(&self, set: &PointSet, r: Ratio, tuple: &[usize]) -> bool {
        if tuple.len() != 2 * self.m || tuple.iter().any(|&i| i >= set.len()) {
            return false;
        }
        let prime = set.prime();
        let pts = set.points();
        let (xs, ys) = tuple.split_at(self.m);
        let d = |a: usize, b: usize| dist(prime, &pts[a], &pts[b]).expect("same dimension");
        self.edges
            .iter()
            .all(|&(i, j)| xs[i] != xs[j] && d(ys[i], ys[j]) == prime.mul(r.value(), d(xs[i], xs[j])))
            && self.x_eq.iter().all(|&(i, j)| xs[i] == xs[j])
            && self.y_eq.iter().all(|&(i, j)| ys[i] == ys[j])
            && self.x_neq.iter().all(|&(i, j)| xs[i] != xs[j])
            && self.y_neq.iter().all(|&(i, j)| ys[i] != ys[j])
    }

    fn plan(&self) -> Vec<Slot> {
        let mut slots: Vec<Slot> = (0..self.m).map(|_| Slot::default()).collect();
        for &(a, b) in &self.edges {
            let (j, i) = (a.min(b), a.max(b));
            slots[i].dil.push(j);
            slots[i].x_neq.push(j);
        }
        for &(j, i) in &self.x_neq {
            slots[i].x_neq.push(j);
        }
        for &(j, i) in &self.y_neq {
            slots[i].y_neq.push(j);
        }
        for &(j, i) in &self.x_eq {
            slots[i].x_eq.push(j);
        }
        for &(j, i) in &self.y_eq {
            slots[i].y_eq.push(j);
        }
        for s in &mut slots {
            for v in [&mut s.dil, &mut s.x_neq, &mut s.y_neq, &mut s.x_eq, &mut s.y_eq] {
                v.sort_unstable();
                v.dedup();
            }
        }
        slots
    }
}

/// Constraints linking vertex i to earlier vertices j < i.
#[derive(Debug, Clone, Default)]
struct Slot {
    dil: Vec<usize>,
    x_neq: Vec<usize>,
    y_neq: Vec<usize>,
    x_eq: Vec<usize>,
    y_eq: Vec<usize>,
}

struct Search<'a> {
    table: &'a DistanceTable,
    n: u32,
    /// rmap[t] = r·t
    rmap: Vec<u32>,
    slots: Vec<Slot>,
}

impl<'a> Search<'a> {
    fn new(pattern: &Pattern, set: &'a PointSet, r: Ratio) -> Search<'a> {
        let prime: Prime = set.prime();
        Search {
            table: set.table(),
            n: set.len() as u32,
            rmap: prime.elements().map(|t| prime.mul(r.value(), t).value()).collect(),
            slots: pattern.plan(),
        }
    }

    fn x_ok(&self, slot: &Slot, xs: &[u32], x: u32) -> bool {
        slot.x_neq.iter().all(|&j| xs[j] != x) && slot.x_eq.iter().all(|&j| xs[j] == x)
    }

    fn y_ok(&self, slot: &Slot, xs: &[u32], ys: &[u32], x: u32, y: u32) -> bool {
        slot.y_neq.iter().all(|&j| ys[j] != y)
            && slot.y_eq.iter().all(|&j| ys[j] == y)
            && slot.dil.iter().all(|&j| {
                self.table.raw(y as usize, ys[j] as usize)
                    == self.rmap[self.table.raw(x as usize, xs[j] as usize) as usize]
            })
    }

    fn run<F>(&self, i: usize, xs: &mut Vec<u32>, ys: &mut Vec<u32>, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[u32], &[u32]) -> ControlFlow<()>,
    {
        if i == self.slots.len() {
            return visit(xs, ys);
        }
        let slot = &self.slots[i];
        let x_fixed = slot.x_eq.first().map(|&j| xs[j]);
        let x_range = match x_fixed {
            Some(x) => x..x + 1,
            None => 0..self.n,
        };
        for x in x_range {
            if !self.x_ok(slot, xs, x) {
                continue;
            }
            xs.push(x);
            if let Some(&j) = slot.y_eq.first() {
                let y = ys[j];
                if self.y_ok(slot, xs, ys, x, y) {
                    ys.push(y);
                    let flow = self.run(i + 1, xs, ys, visit);
                    ys.pop();
                    if flow.is_break() {
                        xs.pop();
                        return flow;
                    }
                }
            } else if let Some(&j) = slot.dil.first() {
                let t = self.rmap[self.table.raw(x as usize, xs[j] as usize) as usize];
                for &y in self.table.bucket(ys[j] as usize, Scalar(t)) {
                    if !self.y_ok(slot, xs, ys, x, y) {
                        continue;
                    }
                    ys.push(y);
                    let flow = self.run(i + 1, xs, ys, visit);
                    ys.pop();
                    if flow.is_break() {
                        xs.pop();
                        return flow;
                    }
                }
            } else {
                for y in 0..self.n {
                    if !self.y_ok(slot, xs, ys, x, y) {
                        continue;
                    }
                    ys.push(y);
                    let flow = self.run(i + 1, xs, ys, visit);
                    ys.pop();
                    if flow.is_break() {
                        xs.pop();
                        return flow;
                    }
                }
            }
            xs.pop();
        }
        ControlFlow::Continue(())
    }

    /// Runs the search with x_0 fixed.
    fn search_from<F>(&self, x0: u32, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[u32], &[u32]) -> ControlFlow<()>,
    {
        let m = self.slots.len();
        let mut xs = Vec::with_capacity(m);
        let mut ys = Vec::with_capacity(m);
        xs.push(x0);
        let slot = &self.slots[0];
        for y0 in 0..self.n {
            if !self.y_ok(slot, &xs, &ys, x0, y0) {
                continue;
            }
            ys.push(y0);
            let flow = self.run(1, &mut xs, &mut ys, visit);
            ys.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }
}

fn to_tuple(xs: &[u32], ys: &[u32]) -> Vec<usize> {
    xs.iter().chain(ys).map(|&i| i as usize).collect()
}

impl Pattern {
    /// Exact number of tuples in the family, guarded by |E|^{2m} ≤ BRUTE_LIMIT.
    pub fn count(&self, set: &PointSet, r: Ratio) -> Result<Count> {
        guard("configuration enumeration", self.tuple_space(set.len()), BRUTE_LIMIT)?;
        Ok(self.count_unguarded(set, r))
    }

    pub(crate) fn count_unguarded(&self, set: &PointSet, r: Ratio) -> Count {
        let search = Search::new(self, set, r);
        (0..search.n)
            .into_par_iter()
            .map(|x0| {
                let mut c: Count = 0;
                let _ = search.search_from(x0, &mut |_: &[u32], _: &[u32]| {
                    c += 1;
                    ControlFlow::Continue(())
                });
                c
            })
            .sum()
    }

    /// Calls `f` on every tuple of the family, in lexicographic order of
    /// (x_0, y_0, x_1, y_1, …). Guarded like [`Pattern::count`].
    pub fn for_each<F: FnMut(&[usize])>(&self, set: &PointSet, r: Ratio, mut f: F) -> Result<()> {
        guard("configuration enumeration", self.tuple_space(set.len()), BRUTE_LIMIT)?;
        let search = Search::new(self, set, r);
        for x0 in 0..search.n {
            let _ = search.search_from(x0, &mut |xs: &[u32], ys: &[u32]| {
                f(&to_tuple(xs, ys));
                ControlFlow::Continue(())
            });
        }
        Ok(())
    }

    /// Every tuple of the family.
    pub fn collect(&self, set: &PointSet, r: Ratio) -> Result<Vec<Vec<usize>>> {
        let mut out = Vec::new();
        self.for_each(set, r, |t| out.push(t.to_vec()))?;
        Ok(out)
    }

    /// The first tuple in search order, if any. Stops at the first hit, so it
    /// is not guarded.
    pub fn find(&self, set: &PointSet, r: Ratio) -> Option<Vec<usize>> {
        let search = Search::new(self, set, r);
        (0..search.n).into_par_iter().find_map_first(|x0| {
            let mut hit = None;
            let _ = search.search_from(x0, &mut |xs: &[u32], ys: &[u32]| {
                hit = Some(to_tuple(xs, ys));
                ControlFlow::Break(())
            });
            hit
        })
    }
}

/// A configuration found in a point set, re-checked against the definition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Indices into the point set: x_0..x_{m-1} then y_0..y_{m-1}.
    pub tuple: Vec<usize>,
}

/// Looks for one tuple of the family. The point order is shuffled by `seed`
/// first so that repeated searches on structured sets do not always start in
/// the same corner; the hit is mapped back and verified from coordinates.
pub fn find_witness(pattern: &Pattern, set: &PointSet, r: Ratio, seed: u64) -> Result<Option<Witness>> {
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let shuffled = set.permuted(&order);
    let Some(local) = pattern.find(&shuffled, r) else {
        return Ok(None);
    };
    let tuple: Vec<usize> = local.iter().map(|&i| order[i]).collect();
    if !pattern.holds(set, r, &tuple) {
        return Err(Error::Invalid(format!("witness {tuple:?} failed re-verification")));
    }
    Ok(Some(Witness { tuple }))
}
