//! Nondegenerate configuration families and their degenerate pieces.
//!
//! Two-path pairs split into 𝒜 (x_1 = x_3), ℬ (y_1 = y_3) and the rest 𝒞;
//! closed 4-walk pairs split into the all-distinct 4-cycle pairs ℱ and the
//! four pieces A13, A24, B13, B24 where opposite vertices coincide. Triangle
//! and simplex pairs are also bounded from below through the counting
//! function λ_{r,θ} summed over an orthogonal group.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configcount::{count_s_k, lambda_values, nu_k, Method};
use crate::error::{Error, Result};
use crate::field::{Prime, Ratio};
use crate::geometry::PointSet;
use crate::limits::{guard, sat_pow, BRUTE_LIMIT};
use crate::orthogonal::{enumerate_orthogonal, scaled_apply, so2_elements, GroupTable, OrthMatrix};
use crate::pattern::{find_witness, Count, Pattern, Witness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Two-walk pairs with x_1 = x_3.
    #[serde(rename = "A")]
    A,
    /// Two-walk pairs with y_1 = y_3.
    #[serde(rename = "B")]
    B,
    #[serde(rename = "A_and_B")]
    AAndB,
    /// Two-walk pairs with x_1 ≠ x_3 and y_1 ≠ y_3.
    #[serde(rename = "C2path")]
    C2Path,
    /// Pairs of k-paths with all x's distinct and all y's distinct.
    #[serde(rename = "k_path")]
    KPath,
    #[serde(rename = "A13")]
    A13,
    #[serde(rename = "A24")]
    A24,
    #[serde(rename = "B13")]
    B13,
    #[serde(rename = "B24")]
    B24,
    /// Pairs of 4-cycles with all vertices distinct.
    #[serde(rename = "F4cycle")]
    F4Cycle,
    #[serde(rename = "T_triangle")]
    TTriangle,
    #[serde(rename = "P_simplex")]
    PSimplex,
    #[serde(rename = "Lambda_theta")]
    LambdaTheta,
    #[serde(rename = "N_theta")]
    NTheta,
    #[serde(rename = "A_kl")]
    Akl,
}

impl Family {
    pub const ALL: [Family; 15] = [
        Family::A,
        Family::B,
        Family::AAndB,
        Family::C2Path,
        Family::KPath,
        Family::A13,
        Family::A24,
        Family::B13,
        Family::B24,
        Family::F4Cycle,
        Family::TTriangle,
        Family::PSimplex,
        Family::LambdaTheta,
        Family::NTheta,
        Family::Akl,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::A => "A",
            Family::B => "B",
            Family::AAndB => "A_and_B",
            Family::C2Path => "C2path",
            Family::KPath => "k_path",
            Family::A13 => "A13",
            Family::A24 => "A24",
            Family::B13 => "B13",
            Family::B24 => "B24",
            Family::F4Cycle => "F4cycle",
            Family::TTriangle => "T_triangle",
            Family::PSimplex => "P_simplex",
            Family::LambdaTheta => "Lambda_theta",
            Family::NTheta => "N_theta",
            Family::Akl => "A_kl",
        }
    }

    /// The tuple pattern of a family defined by vertex constraints alone.
    /// `d` sizes the simplex family; `k` sizes the path family.
    pub fn pattern(self, d: usize, k: usize) -> Option<Pattern> {
        Some(match self {
            Family::A => Pattern::walk_pair(2).x_equal(0, 2),
            Family::B => Pattern::walk_pair(2).y_equal(0, 2),
            Family::AAndB => Pattern::walk_pair(2).x_equal(0, 2).y_equal(0, 2),
            Family::C2Path => Pattern::walk_pair(2).x_distinct(0, 2).y_distinct(0, 2),
            Family::KPath => Pattern::path_pair(k),
            Family::A13 => Pattern::closed_walk_pair(4).x_equal(0, 2),
            Family::A24 => Pattern::closed_walk_pair(4).x_equal(1, 3),
            Family::B13 => Pattern::closed_walk_pair(4).y_equal(0, 2),
            Family::B24 => Pattern::closed_walk_pair(4).y_equal(1, 3),
            Family::F4Cycle => Pattern::cycle_pair(4),
            Family::TTriangle => Pattern::simplex_pair(3),
            Family::PSimplex => Pattern::simplex_pair(d + 1),
            Family::LambdaTheta | Family::NTheta | Family::Akl => return None,
        })
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown family {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyCount {
    pub family: Family,
    pub p: u32,
    pub d: usize,
    pub e_size: usize,
    pub r: u32,
    pub value: Count,
    pub method: Method,
    /// Path length or cycle length where it applies.
    pub k: Option<usize>,
    /// Row-major entries of θ for the per-rotation families.
    pub theta: Option<String>,
}

impl FamilyCount {
    pub const CSV_HEADER: &'static str = "family,p,d,E_size,r,value,method";

    fn new(family: Family, set: &PointSet, r: Ratio, value: Count, method: Method) -> FamilyCount {
        FamilyCount {
            family,
            p: set.prime().p(),
            d: set.dim(),
            e_size: set.len(),
            r: r.value().value(),
            value,
            method,
            k: None,
            theta: None,
        }
    }

    pub fn csv_row(&self) -> String {
        format!("{},{},{},{},{},{},{}", self.family, self.p, self.d, self.e_size, self.r, self.value, self.method)
    }
}

fn theta_label(theta: &OrthMatrix) -> String {
    theta.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" ")
}

/// Exact count of a vertex-constraint family by enumeration.
pub fn count_family(set: &PointSet, r: Ratio, family: Family, k: usize) -> Result<FamilyCount> {
    let pattern = family
        .pattern(set.dim(), k)
        .ok_or_else(|| Error::Invalid(format!("{family} is counted per rotation, not by enumeration")))?;
    let mut fc = FamilyCount::new(family, set, r, pattern.count(set, r)?, Method::Brute);
    if family == Family::KPath {
        fc.k = Some(k);
    }
    Ok(fc)
}

/// Pairs of k-paths: consecutive steps r-dilated, all x's distinct, all y's
/// distinct.
pub fn count_nondeg_paths(set: &PointSet, r: Ratio, k: usize) -> Result<FamilyCount> {
    if k == 0 {
        return Err(Error::Invalid("path length k must be at least 1".into()));
    }
    count_family(set, r, Family::KPath, k)
}

/// Searches for one member of a family; the hit is re-verified from
/// coordinates before it is returned.
pub fn family_witness(set: &PointSet, r: Ratio, family: Family, k: usize, seed: u64) -> Result<Option<Witness>> {
    let pattern = family
        .pattern(set.dim(), k)
        .ok_or_else(|| Error::Invalid(format!("{family} has no tuple pattern")))?;
    find_witness(&pattern, set, r, seed)
}

/// The degenerate two-path pieces counted by enumeration and by ν sums.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegenerateParts {
    pub a: Count,
    pub b: Count,
    pub a_and_b: Count,
    /// Σ_{t≠0} ν_1(t)·ν_2(rt, rt)
    pub a_closed: Count,
    /// Σ_{t≠0} ν_1(rt)·ν_2(t, t)
    pub b_closed: Count,
    /// |S_1(r)|
    pub a_and_b_closed: Count,
}

impl DegenerateParts {
    pub fn consistent(&self) -> bool {
        self.a == self.a_closed && self.b == self.b_closed && self.a_and_b == self.a_and_b_closed
    }
}

/// Σ_{t≠0} ν_1(t)·ν_2(rt, rt) and Σ_{t≠0} ν_1(rt)·ν_2(t, t).
pub fn degenerate_closed_forms(set: &PointSet, r: Ratio) -> (Count, Count) {
    let prime = set.prime();
    let mut a = 0;
    let mut b = 0;
    for t in prime.nonzero_elements() {
        let rt = prime.mul(r.value(), t);
        a += nu_k(set, &[t]) * nu_k(set, &[rt, rt]);
        b += nu_k(set, &[rt]) * nu_k(set, &[t, t]);
    }
    (a, b)
}

/// |𝒜|, |ℬ|, |𝒜∩ℬ| by enumeration, next to the closed forms. The closed forms
/// assume distinct points have nonzero distance.
pub fn count_degenerate_2path_parts(set: &PointSet, r: Ratio) -> Result<DegenerateParts> {
    let (a_closed, b_closed) = degenerate_closed_forms(set, r);
    Ok(DegenerateParts {
        a: count_family(set, r, Family::A, 2)?.value,
        b: count_family(set, r, Family::B, 2)?.value,
        a_and_b: count_family(set, r, Family::AAndB, 2)?.value,
        a_closed,
        b_closed,
        a_and_b_closed: count_s_k(set, r, 1, Method::NuIdentity)?.value,
    })
}

/// The four terms of |𝒞| = |S_2| + |S_1| − Σν_1(t)ν_2(rt,rt) − Σν_1(rt)ν_2(t,t)
/// and the enumerated |𝒞|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InclusionExclusion {
    pub c: Count,
    pub s2: Count,
    pub s1: Count,
    pub a_closed: Count,
    pub b_closed: Count,
}

impl InclusionExclusion {
    pub fn holds(&self) -> bool {
        self.c + self.a_closed + self.b_closed == self.s2 + self.s1
    }
}

pub fn verify_2path_inclusion_exclusion(set: &PointSet, r: Ratio) -> Result<InclusionExclusion> {
    let (a_closed, b_closed) = degenerate_closed_forms(set, r);
    Ok(InclusionExclusion {
        c: count_family(set, r, Family::C2Path, 2)?.value,
        s2: count_s_k(set, r, 2, Method::WalkDp)?.value,
        s1: count_s_k(set, r, 1, Method::NuIdentity)?.value,
        a_closed,
        b_closed,
    })
}

/// Closed 4-walk pairs split by which vertices coincide.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FourCycleParts {
    pub c: Count,
    pub f: Count,
    pub a13: Count,
    pub a24: Count,
    pub b13: Count,
    pub b24: Count,
    /// |A13 ∪ A24 ∪ B13 ∪ B24|, by checking each tuple of C(r).
    pub union: Count,
    /// Tuples of C(r) in neither ℱ nor the union: some pair of adjacent y's
    /// coincide, which needs a nonzero x-step of length zero.
    pub residual: Count,
}

impl FourCycleParts {
    /// C(r) = ℱ ⊔ (A13 ∪ A24 ∪ B13 ∪ B24).
    pub fn decomposition_holds(&self) -> bool {
        self.residual == 0 && self.c == self.f + self.union
    }

    /// max(|A13|, …) ≤ |A13| + |A24| + |B13| + |B24| and the union bound.
    pub fn union_bound_holds(&self) -> bool {
        self.union <= self.a13 + self.a24 + self.b13 + self.b24
    }
}

pub fn count_4cycle_families(set: &PointSet, r: Ratio) -> Result<FourCycleParts> {
    let c_pattern = Pattern::closed_walk_pair(4);
    let mut c = 0;
    let mut f = 0;
    let mut union = 0;
    let mut residual = 0;
    c_pattern.for_each(set, r, |t| {
        let (x, y) = t.split_at(4);
        c += 1;
        let degenerate = x[0] == x[2] || x[1] == x[3] || y[0] == y[2] || y[1] == y[3];
        let all_distinct = (0..4).all(|i| (i + 1..4).all(|j| x[i] != x[j] && y[i] != y[j]));
        if degenerate {
            union += 1;
        } else if all_distinct {
            f += 1;
        } else {
            residual += 1;
        }
    })?;
    let count = |fam| count_family(set, r, fam, 4).map(|fc| fc.value);
    let parts = FourCycleParts {
        c,
        f: count(Family::F4Cycle)?,
        a13: count(Family::A13)?,
        a24: count(Family::A24)?,
        b13: count(Family::B13)?,
        b24: count(Family::B24)?,
        union,
        residual,
    };
    if parts.f != f {
        return Err(Error::MethodMismatch {
            name: "F4cycle".into(),
            detail: format!("pattern count {} but {f} tuples of C(r) are all-distinct", parts.f),
        });
    }
    Ok(parts)
}

/// The projection of A13 onto S_2(r) that forgets x_3 and y_3:
/// (x_1, x_2, x_4, y_1, y_2, y_3, y_4) ↦ (x_4, x_1, x_2, y_4, y_1, y_2).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionFibers {
    pub domain: Count,
    pub s2: Count,
    pub surjective: bool,
    pub max_fiber: Count,
}

pub fn a13_projection_fibers(set: &PointSet, r: Ratio) -> Result<ProjectionFibers> {
    let mut fibers: HashMap<[usize; 6], Count> = HashMap::new();
    let mut domain = 0;
    Family::A13.pattern(2, 4).expect("vertex family").for_each(set, r, |t| {
        let (x, y) = t.split_at(4);
        domain += 1;
        *fibers.entry([x[3], x[0], x[1], y[3], y[0], y[1]]).or_default() += 1;
    })?;
    let s2: HashSet<[usize; 6]> = Pattern::walk_pair(2)
        .collect(set, r)?
        .into_iter()
        .map(|t| <[usize; 6]>::try_from(t.as_slice()).expect("6-tuple"))
        .collect();
    let surjective = s2.iter().all(|t| fibers.contains_key(t)) && fibers.keys().all(|t| s2.contains(t));
    Ok(ProjectionFibers {
        domain,
        s2: s2.len() as Count,
        surjective,
        max_fiber: fibers.values().copied().max().unwrap_or(0),
    })
}

/// Power sums of λ_{r,θ} over z for one θ, in dimension d (m = d + 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaSums {
    /// Σ_z λ = |E|²
    pub sum: Count,
    pub sum_sq: Count,
    /// Σ_z λ^d, the size of each A_kl.
    pub sum_pow_d: Count,
    /// Σ_z λ^{d+1} = |Λ_θ(r)|
    pub sum_pow_m: Count,
    /// Σ_z λ(λ−1)…(λ−d) = |N_θ(r)|: the pairs sharing z have distinct v's.
    pub n_theta: Count,
}

fn falling(x: Count, len: usize) -> Count {
    (0..len as Count).map(|i| x.saturating_sub(i)).product()
}

pub fn lambda_sums(set: &PointSet, r: Ratio, theta: &OrthMatrix) -> Result<LambdaSums> {
    let d = set.dim();
    let values = lambda_values(set, r, theta)?;
    let mut s = LambdaSums { sum: 0, sum_sq: 0, sum_pow_d: 0, sum_pow_m: 0, n_theta: 0 };
    for &l in values.values() {
        s.sum += l;
        s.sum_sq += l * l;
        s.sum_pow_d += l.pow(d as u32);
        s.sum_pow_m += l.pow(d as u32 + 1);
        s.n_theta += falling(l, d + 1);
    }
    Ok(s)
}

impl LambdaSums {
    /// |N_θ| = |Λ_θ| − 3Σλ² + 2|E|² (dimension two).
    pub fn plane_identity_holds(&self, n: usize) -> bool {
        self.n_theta + 3 * self.sum_sq == self.sum_pow_m + 2 * (n * n) as Count
    }

    /// |N_θ| ≥ |Λ_θ| − C(d+1, 2)·Σλ^d.
    pub fn bonferroni_holds(&self, d: usize) -> bool {
        let pairs = ((d + 1) * d / 2) as Count;
        self.n_theta + pairs * self.sum_pow_d >= self.sum_pow_m
    }
}

/// Λ_θ(r) and its slices, counted by walking v-tuples directly: for
/// (v_1..v_m) and u_1, the other u_j = u_1 + √r·θ(v_j − v_1) are forced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaSlices {
    pub lambda: Count,
    /// (k, l, number of tuples with v_k = v_l), 0-based k < l.
    pub pair_slices: Vec<(usize, usize, Count)>,
    /// Tuples with all v's equal.
    pub all_equal: Count,
    /// Tuples with all v's distinct: N_θ(r).
    pub n_theta: Count,
}

/// Calls `f(u, v)` for every tuple of Λ_θ(r) (index vectors of length d+1).
pub fn for_each_lambda_tuple<F>(set: &PointSet, r: Ratio, theta: &OrthMatrix, mut f: F) -> Result<()>
where
    F: FnMut(&[usize], &[usize]),
{
    let prime = set.prime();
    let n = set.len();
    let m = set.dim() + 1;
    guard("Λ_θ enumeration", sat_pow(n as u128, m as u32 + 1), BRUTE_LIMIT)?;
    let root = r.require_sqrt(prime)?;
    let index: HashMap<u64, usize> = set.points().iter().enumerate().map(|(i, x)| (x.index(prime), i)).collect();
    let images = set
        .points()
        .iter()
        .map(|v| scaled_apply(prime, theta, root, v))
        .collect::<Result<Vec<_>>>()?;
    let mut v = vec![0usize; m];
    let mut u = vec![0usize; m];
    loop {
        for u0 in 0..n {
            // z = u_1 − √rθv_1, then u_j = z + √rθv_j.
            let z = set.points()[u0].sub(prime, &images[v[0]])?;
            u[0] = u0;
            let mut ok = true;
            for j in 1..m {
                match index.get(&z.add(prime, &images[v[j]])?.index(prime)) {
                    Some(&i) => u[j] = i,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                f(&u, &v);
            }
        }
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(());
            }
            v[pos] += 1;
            if v[pos] < n {
                break;
            }
            v[pos] = 0;
            pos += 1;
        }
    }
}

pub fn lambda_slices_direct(set: &PointSet, r: Ratio, theta: &OrthMatrix) -> Result<LambdaSlices> {
    let m = set.dim() + 1;
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|k| (k + 1..m).map(move |l| (k, l))).collect();
    let mut out = LambdaSlices {
        lambda: 0,
        pair_slices: pairs.iter().map(|&(k, l)| (k, l, 0)).collect(),
        all_equal: 0,
        n_theta: 0,
    };
    for_each_lambda_tuple(set, r, theta, |_, v| {
        out.lambda += 1;
        let mut any_equal = false;
        for (slot, &(k, l)) in out.pair_slices.iter_mut().zip(&pairs) {
            if v[k] == v[l] {
                slot.2 += 1;
                any_equal = true;
            }
        }
        if v.iter().all(|&x| x == v[0]) {
            out.all_equal += 1;
        }
        if !any_equal {
            out.n_theta += 1;
        }
    })?;
    Ok(out)
}

/// |Λ_θ(r)| and |N_θ(r)| from the λ power sums, as family rows.
pub fn count_lambda_n_theta(set: &PointSet, r: Ratio, theta: &OrthMatrix) -> Result<(FamilyCount, FamilyCount)> {
    let sums = lambda_sums(set, r, theta)?;
    let label = theta_label(theta);
    let mut lam = FamilyCount::new(Family::LambdaTheta, set, r, sums.sum_pow_m, Method::GroupSum);
    lam.theta = Some(label.clone());
    let mut nt = FamilyCount::new(Family::NTheta, set, r, sums.n_theta, Method::GroupSum);
    nt.theta = Some(label);
    Ok((lam, nt))
}

/// Which orthogonal matrices to sum over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupChoice {
    /// All of O_d(F_p).
    Full,
    /// The determinant-one subgroup.
    Rotations,
}

pub fn group_table(d: usize, prime: Prime, choice: GroupChoice) -> Result<GroupTable> {
    match (choice, d) {
        (GroupChoice::Full, _) => enumerate_orthogonal(d, prime),
        (GroupChoice::Rotations, 2) => Ok(so2_elements(prime)),
        (GroupChoice::Rotations, _) => Ok(enumerate_orthogonal(d, prime)?.rotations()),
    }
}

/// λ power sums accumulated over a group and the lower bounds they give for
/// the number of simplex pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupBound {
    pub group: GroupChoice,
    pub group_order: Count,
    pub d: usize,
    pub e_size: usize,
    pub p: u32,
    /// Σ_θ Σ_z λ^{d+1} = Σ_θ |Λ_θ(r)|
    pub sum_pow_m: Count,
    pub sum_pow_d: Count,
    pub sum_sq: Count,
    /// Σ_θ |N_θ(r)|
    pub sum_n_theta: Count,
}

fn rational(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

impl GroupBound {
    /// Σ_θ |N_θ| / |G|: every N_θ sits inside the simplex-pair family, and a
    /// tuple lies in at most |G| of them.
    pub fn n_theta_bound(&self) -> BigRational {
        rational(self.sum_n_theta.into(), self.group_order.into())
    }

    /// (Σλ^{d+1} − C(d+1, 2)Σλ^d) / |G|; for d = 2 this is (Σλ³ − 3Σλ²)/|G|.
    pub fn bonferroni_bound(&self) -> BigRational {
        let pairs = BigInt::from((self.d + 1) * self.d / 2);
        rational(BigInt::from(self.sum_pow_m) - pairs * BigInt::from(self.sum_pow_d), self.group_order.into())
    }

    /// The smallest integer at least the N_θ bound.
    pub fn certified_count(&self) -> Count {
        self.sum_n_theta.div_ceil(self.group_order)
    }

    /// Σ_θ Σ_z λ^{d+1} ≥ |G|·|E|^{2d+2} / p^{d²}, from Hölder per θ.
    pub fn hoelder_holds(&self) -> bool {
        let lhs = BigInt::from(self.sum_pow_m) * BigInt::from(self.p).pow((self.d * self.d) as u32);
        let rhs = BigInt::from(self.group_order) * BigInt::from(self.e_size).pow(2 * self.d as u32 + 2);
        lhs >= rhs
    }

    /// Σ_θ Σ_z λ³ ≥ |E|⁶ / p³ in the plane (uses |G| ≥ p).
    pub fn plane_cube_bound_holds(&self) -> bool {
        let lhs = BigInt::from(self.sum_pow_m) * BigInt::from(self.p).pow(3);
        lhs >= BigInt::from(self.e_size).pow(6)
    }
}

pub fn simplex_group_bound(set: &PointSet, r: Ratio, choice: GroupChoice) -> Result<GroupBound> {
    let prime = set.prime();
    r.require_sqrt(prime)?;
    let group = group_table(set.dim(), prime, choice)?;
    let sums = group
        .elements()
        .par_iter()
        .map(|theta| lambda_sums(set, r, theta))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroupBound {
        group: choice,
        group_order: group.len() as Count,
        d: set.dim(),
        e_size: set.len(),
        p: prime.p(),
        sum_pow_m: sums.iter().map(|s| s.sum_pow_m).sum(),
        sum_pow_d: sums.iter().map(|s| s.sum_pow_d).sum(),
        sum_sq: sums.iter().map(|s| s.sum_sq).sum(),
        sum_n_theta: sums.iter().map(|s| s.n_theta).sum(),
    })
}

/// Triangle pairs ‖u_i − u_j‖ = r‖v_i − v_j‖ with distinct vertices on both
/// sides. `brute` is exact; `group_sum` is the certified lower bound from the
/// full orthogonal group and needs r to be a square.
pub fn count_nondeg_triangles(set: &PointSet, r: Ratio, method: Method) -> Result<FamilyCount> {
    let value = match method {
        Method::Brute => Pattern::simplex_pair(3).count(set, r)?,
        Method::GroupSum => {
            if set.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: set.dim() });
            }
            simplex_group_bound(set, r, GroupChoice::Full)?.certified_count()
        }
        other => return Err(Error::Invalid(format!("method {other} does not apply to T_triangle"))),
    };
    let mut fc = FamilyCount::new(Family::TTriangle, set, r, value, method);
    fc.k = Some(3);
    Ok(fc)
}

/// Pairs of d-simplexes (d + 1 distinct vertices per side, all edges
/// r-dilated). Same methods as [`count_nondeg_triangles`].
pub fn count_nondeg_simplexes(set: &PointSet, r: Ratio, method: Method) -> Result<FamilyCount> {
    if set.dim() < 2 {
        return Err(Error::Invalid("simplex pairs need d >= 2".into()));
    }
    let value = match method {
        Method::Brute => Pattern::simplex_pair(set.dim() + 1).count(set, r)?,
        Method::GroupSum => simplex_group_bound(set, r, GroupChoice::Full)?.certified_count(),
        other => return Err(Error::Invalid(format!("method {other} does not apply to P_simplex"))),
    };
    let mut fc = FamilyCount::new(Family::PSimplex, set, r, value, method);
    fc.k = Some(set.dim() + 1);
    Ok(fc)
}

/// True when every tuple of N_θ(r), read as (v, u) ↦ (x, y), is a triangle or
/// simplex pair.
pub fn n_theta_inside_simplex_pairs(set: &PointSet, r: Ratio, theta: &OrthMatrix) -> Result<bool> {
    let pattern = Pattern::simplex_pair(set.dim() + 1);
    let mut ok = true;
    for_each_lambda_tuple(set, r, theta, |u, v| {
        let distinct = (0..v.len()).all(|i| (i + 1..v.len()).all(|j| v[i] != v[j]));
        if distinct {
            let tuple: Vec<usize> = v.iter().chain(u).copied().collect();
            ok &= pattern.holds(set, r, &tuple);
        }
    })?;
    Ok(ok)
}
