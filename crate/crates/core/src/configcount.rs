//! Step-length counting functions and the walk-pair counts S_k(r), C(r), V(r).
//!
//! ν_k(t_1..t_k) counts (k+1)-tuples of E with consecutive distances t_i,
//! μ(t_1..t_4) counts closed 4-walks, and λ_{r,θ}(z) counts pairs (u, v) with
//! u − √r·θv = z. The walk-pair counts are each available through several
//! independent methods so they can be checked against one another.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Ratio, Scalar};
use crate::geometry::{DistanceTable, Point, PointSet};
use crate::limits::{guard, sat_pow, BRUTE_LIMIT, PROFILE_LIMIT};
use crate::orthogonal::{scaled_apply, OrthMatrix};
use crate::pattern::{Count, Pattern};
use crate::simgraph::{SimGraph, WalkRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Enumeration of the raw tuple definition.
    Brute,
    /// Sum over step-length vectors of products of ν_k.
    NuIdentity,
    /// Sum over closed-walk step profiles of products of μ.
    MuIdentity,
    /// Vector iteration on the graph on E × E.
    WalkDp,
    /// Sums of λ_{r,θ} powers over an orthogonal group.
    GroupSum,
}

impl Method {
    pub const ALL: [Method; 5] =
        [Method::Brute, Method::NuIdentity, Method::MuIdentity, Method::WalkDp, Method::GroupSum];

    pub fn name(self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::NuIdentity => "nu_identity",
            Method::MuIdentity => "mu_identity",
            Method::WalkDp => "walk_dp",
            Method::GroupSum => "group_sum",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown method {s:?}")))
    }
}

/// One computed count with the parameters that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub name: String,
    pub method: Method,
    pub p: u32,
    pub d: usize,
    pub e_size: usize,
    pub r: u32,
    pub k: Option<usize>,
    pub value: Count,
}

impl CountReport {
    pub const CSV_HEADER: &'static str = "name,method,p,d,E_size,r,k,value";

    fn new(name: &str, method: Method, set: &PointSet, r: Ratio, k: Option<usize>, value: Count) -> CountReport {
        CountReport {
            name: name.into(),
            method,
            p: set.prime().p(),
            d: set.dim(),
            e_size: set.len(),
            r: r.value().value(),
            k,
            value,
        }
    }

    pub fn csv_row(&self) -> String {
        let k = self.k.map(|k| k.to_string()).unwrap_or_default();
        format!("{},{},{},{},{},{},{},{}", self.name, self.method, self.p, self.d, self.e_size, self.r, k, self.value)
    }
}

/// Sums `f` over the points of a bucket.
fn gather(bucket: &[u32], f: &[Count]) -> Count {
    bucket.iter().map(|&i| f[i as usize]).sum()
}

/// One prefix-DP step: out[j] = Σ_{i : ‖x_i − x_j‖ = t} f[i].
fn transfer(table: &DistanceTable, f: &[Count], t: Scalar) -> Vec<Count> {
    (0..f.len()).map(|j| gather(table.bucket(j, t), f)).collect()
}

/// ν_k(t_1, …, t_k): the number of (x_1, …, x_{k+1}) ∈ E^{k+1} with
/// ‖x_i − x_{i+1}‖ = t_i, by dynamic programming over prefixes.
pub fn nu_k(set: &PointSet, steps: &[Scalar]) -> Count {
    let table = set.table();
    let mut f = vec![1 as Count; set.len()];
    for &t in steps {
        f = transfer(table, &f, t);
    }
    f.iter().sum()
}

/// μ(t_1, …, t_4): closed walks x_1 → x_2 → x_3 → x_4 → x_1 with step
/// lengths t_1..t_4.
pub fn mu4(set: &PointSet, t: [Scalar; 4]) -> Count {
    let table = set.table();
    let n = set.len();
    (0..n)
        .into_par_iter()
        .map(|start| {
            let mut f = vec![0 as Count; n];
            f[start] = 1;
            for &s in &t[..3] {
                f = transfer(table, &f, s);
            }
            gather(table.bucket(start, t[3]), &f)
        })
        .sum()
}

/// λ_{r,θ}(z) = |{(u, v) ∈ E² : u − √r·θv = z}|.
pub fn lambda_count(set: &PointSet, r: Ratio, theta: &OrthMatrix, z: &Point) -> Result<Count> {
    let prime = set.prime();
    let root = r.require_sqrt(prime)?;
    let images = set
        .points()
        .iter()
        .map(|v| scaled_apply(prime, theta, root, v))
        .collect::<Result<Vec<_>>>()?;
    let mut count = 0;
    for u in set.points() {
        for w in &images {
            if &u.sub(prime, w)? == z {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// The nonzero values of λ_{r,θ}, keyed by the index of z in F_p^d.
pub fn lambda_values(set: &PointSet, r: Ratio, theta: &OrthMatrix) -> Result<HashMap<u64, Count>> {
    let prime = set.prime();
    let root = r.require_sqrt(prime)?;
    let images = set
        .points()
        .iter()
        .map(|v| scaled_apply(prime, theta, root, v))
        .collect::<Result<Vec<_>>>()?;
    let mut out: HashMap<u64, Count> = HashMap::new();
    for u in set.points() {
        for w in &images {
            *out.entry(u.sub(prime, w)?.index(prime)).or_default() += 1;
        }
    }
    Ok(out)
}

/// A step label: a nonzero distance, or a step between distinct points at
/// distance zero (only possible when the form is isotropic).
#[derive(Debug, Clone, Copy)]
enum Label {
    Dist(Scalar),
    Null,
}

/// Walks the tree of step-label sequences, carrying the x-side and y-side
/// prefix vectors and pruning as soon as either side dies out.
struct LabelWalk<'a> {
    table: &'a DistanceTable,
    r: Ratio,
    prime: crate::field::Prime,
    k: usize,
    labels: Vec<Label>,
}

impl LabelWalk<'_> {
    fn x_step(&self, f: &[Count], l: Label) -> Vec<Count> {
        match l {
            Label::Dist(t) => transfer(self.table, f, t),
            Label::Null => (0..f.len()).map(|j| gather(self.table.bucket(j, Scalar::ZERO), f) - f[j]).collect(),
        }
    }

    fn y_step(&self, f: &[Count], l: Label) -> Vec<Count> {
        let t = match l {
            Label::Dist(t) => self.prime.mul(self.r.value(), t),
            Label::Null => Scalar::ZERO,
        };
        transfer(self.table, f, t)
    }

    fn sum_from(&self, depth: usize, fx: &[Count], fy: &[Count]) -> Count {
        if depth == self.k {
            return fx.iter().sum::<Count>() * fy.iter().sum::<Count>();
        }
        let mut total = 0;
        for &l in &self.labels {
            let gx = self.x_step(fx, l);
            if gx.iter().all(|&v| v == 0) {
                continue;
            }
            let gy = self.y_step(fy, l);
            if gy.iter().all(|&v| v == 0) {
                continue;
            }
            total += self.sum_from(depth + 1, &gx, &gy);
        }
        total
    }

    fn run(&self) -> Count {
        let ones = vec![1 as Count; self.table.len()];
        if self.k == 0 {
            return (ones.len() * ones.len()) as Count;
        }
        self.labels
            .par_iter()
            .map(|&l| {
                let gx = self.x_step(&ones, l);
                let gy = self.y_step(&ones, l);
                if gx.iter().all(|&v| v == 0) || gy.iter().all(|&v| v == 0) {
                    0
                } else {
                    self.sum_from(1, &gx, &gy)
                }
            })
            .sum()
    }
}

fn label_walk(set: &PointSet, r: Ratio, k: usize, with_null: bool) -> Result<Count> {
    let prime = set.prime();
    let n = set.len() as u128;
    guard("step-profile sum", sat_pow(prime.p() as u128, k as u32).saturating_mul(n * n), PROFILE_LIMIT)?;
    let mut labels: Vec<Label> = prime.nonzero_elements().map(Label::Dist).collect();
    if with_null && set.table().null_pairs() > 0 {
        labels.push(Label::Null);
    }
    Ok(LabelWalk { table: set.table(), r, prime, k, labels }.run())
}

/// Σ_{t ∈ (F_p^*)^k} ν_k(t)·ν_k(rt). Equals |S_k(r)| when no two distinct
/// points of E are at distance zero.
pub fn nu_product_sum(set: &PointSet, r: Ratio, k: usize) -> Result<Count> {
    label_walk(set, r, k, false)
}

/// Σ_{t ∈ (F_p^*)^4} μ(t)·μ(rt), evaluating μ by closed-walk DP for every
/// profile. Equals |C(r)| when no two distinct points are at distance zero.
pub fn mu_product_sum(set: &PointSet, r: Ratio) -> Result<Count> {
    let prime = set.prime();
    let n = set.len() as u128;
    guard("closed-walk profile sum", sat_pow(prime.p() as u128, 4).saturating_mul(n * n * n), PROFILE_LIMIT)?;
    let q = prime.p() - 1;
    let scale = |t: [Scalar; 4]| t.map(|s| prime.mul(r.value(), s));
    Ok((0..q.pow(4))
        .into_par_iter()
        .map(|mut idx| {
            let mut t = [Scalar::ONE; 4];
            for slot in &mut t {
                *slot = Scalar(idx % q + 1);
                idx /= q;
            }
            let x = mu4(set, t);
            if x == 0 {
                0
            } else {
                x * mu4(set, scale(t))
            }
        })
        .sum())
}

/// |S_k(r)|: tuples (x_1..x_{k+1}, y_1..y_{k+1}) ∈ E^{2k+2} with x_i ≠ x_{i+1}
/// and ‖y_i − y_{i+1}‖ = r‖x_i − x_{i+1}‖.
///
/// The `nu_identity` method sums ν-style prefix products over step-label
/// sequences, where a label is either a nonzero distance or "distinct points
/// at distance zero"; without null pairs in E this is exactly
/// [`nu_product_sum`]. The `walk_dp` method counts walks in the graph on
/// E × E that joins (x, x') to (y, y') when x ≠ y and the distances match.
pub fn count_s_k(set: &PointSet, r: Ratio, k: usize, method: Method) -> Result<CountReport> {
    if k == 0 {
        return Err(Error::Invalid("walk length k must be at least 1".into()));
    }
    let value = match method {
        Method::Brute => Pattern::walk_pair(k).count(set, r)?,
        Method::NuIdentity => label_walk(set, r, k, true)?,
        Method::WalkDp => SimGraph::with_rule(set, r, WalkRule::DistinctBase)?.count_walks(k),
        other => return Err(Error::Invalid(format!("method {other} does not apply to S_k"))),
    };
    Ok(CountReport::new("S_k", method, set, r, Some(k), value))
}

/// |C(r)|: pairs of closed 4-walks with x_i ≠ x_{i+1} (cyclically) and
/// r-dilated steps.
///
/// The `mu_identity` method tabulates every closed 4-walk of E once by its
/// step profile, then pairs x-profiles with their r-scaled y-profiles.
pub fn count_c(set: &PointSet, r: Ratio, method: Method) -> Result<CountReport> {
    let value = match method {
        Method::Brute => Pattern::closed_walk_pair(4).count(set, r)?,
        Method::MuIdentity => mu_identity_c(set, r)?,
        other => return Err(Error::Invalid(format!("method {other} does not apply to C"))),
    };
    Ok(CountReport::new("C", method, set, r, None, value))
}

fn mu_identity_c(set: &PointSet, r: Ratio) -> Result<Count> {
    let n = set.len();
    guard("closed 4-walk table", (n as u128).pow(4), BRUTE_LIMIT)?;
    let prime = set.prime();
    let p = prime.p() as usize;
    let table = set.table();
    // x-side labels 0..p with p standing for "distinct, distance zero";
    // y-side labels are plain distances.
    let base = p + 1;
    let key = |l: [usize; 4]| ((l[0] * base + l[1]) * base + l[2]) * base + l[3];
    let tally = |x_side: bool| -> Vec<Count> {
        (0..n)
            .into_par_iter()
            .map(|a| {
                let mut counts = vec![0 as Count; base.pow(4)];
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let walk = [(a, b), (b, c), (c, d), (d, a)];
                            let mut l = [0usize; 4];
                            let mut ok = true;
                            for (slot, &(i, j)) in l.iter_mut().zip(&walk) {
                                let t = table.raw(i, j) as usize;
                                *slot = if !x_side {
                                    t
                                } else if i == j {
                                    ok = false;
                                    break;
                                } else if t == 0 {
                                    p
                                } else {
                                    t
                                };
                            }
                            if ok {
                                counts[key(l)] += 1;
                            }
                        }
                    }
                }
                counts
            })
            .reduce(
                || vec![0; base.pow(4)],
                |mut acc, v| {
                    acc.iter_mut().zip(v).for_each(|(a, b)| *a += b);
                    acc
                },
            )
    };
    let xs = tally(true);
    let ys = tally(false);
    let scale = |t: usize| if t == p { 0 } else { prime.mul(r.value(), Scalar(t as u32)).value() as usize };
    let mut total = 0;
    for (idx, &cx) in xs.iter().enumerate() {
        if cx == 0 {
            continue;
        }
        let mut rest = idx;
        let mut l = [0usize; 4];
        for slot in l.iter_mut().rev() {
            *slot = rest % base;
            rest /= base;
        }
        total += cx * ys[key(l.map(scale))];
    }
    Ok(total)
}

/// |V(r)|: quadruples (x, y, z, w) ∈ E⁴ with ‖z − w‖ ≠ 0 and
/// ‖x − y‖ = r‖z − w‖.
pub fn count_v(set: &PointSet, r: Ratio) -> CountReport {
    let prime = set.prime();
    let hist = set.table().histogram();
    let value = prime
        .nonzero_elements()
        .map(|t| hist[t.value() as usize] * hist[prime.mul(r.value(), t).value() as usize])
        .sum();
    CountReport::new("V", Method::NuIdentity, set, r, None, value)
}

/// V(r)·p / |E|⁴, the normalized quadruple density.
pub fn v_density(set: &PointSet, r: Ratio) -> BigRational {
    let v = count_v(set, r).value;
    let n = BigInt::from(set.len());
    BigRational::new(BigInt::from(v) * BigInt::from(set.prime().p()), n.pow(4))
}
