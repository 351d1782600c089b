//! Verdicts for the counting inequalities and existence thresholds on
//! concrete point sets, and a sampler that locates empirical thresholds.
//!
//! Every threshold with an irrational constant is compared after squaring,
//! so boundary sizes are decided in integers.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configcount::{count_c, count_s_k, Method};
use crate::error::{Error, Result};
use crate::families::{a13_projection_fibers, count_4cycle_families, Family};
use crate::field::{Prime, Ratio};
use crate::geometry::{quotient_set, space_size, PointSet};
use crate::pattern::{find_witness, Count, Pattern};
use crate::simgraph::verify_bipartite_double_count;

/// The checkable statements. Names are what the CLI accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Claim {
    /// |S_1(r)| ≥ (1/p + 1/p² − 1/p³)|E|⁴ − 2|E|³/p − (p+1)|E|² for d = 2,
    /// p ≡ 3 (mod 4).
    S1LowerBound,
    /// |S_2(r)|·|E|² ≥ |S_1(r)|².
    S2LowerBound,
    /// |C(r)|·|E|⁴ ≥ |S_2(r)|².
    CLowerBound,
    /// ν_2(t_1, t_2) ≤ |E|·ν_1(t_1) for every (t_1, t_2).
    Nu2Bound,
    /// |S_2(r)| ≤ |A13|, |A24|, |B13|, |B24| ≤ (p+1)|S_2(r)|.
    DegenerateSandwich,
    /// |S_k(r)| ≥ |S_1(r)|^k / |E|^{2k−2}.
    WalkPowerBound,
    /// Both incidence-graph double counts.
    DoubleCount,
    /// A pair of nondegenerate 2-paths exists once |E| > (√3+1)p.
    TwoPathsExist,
    /// A pair of 4-cycles exists once |E| > 4√3·p^{3/2}.
    FourCyclesExist,
    /// A pair of triangles exists once |E| ≥ 3p, r a nonzero square.
    TrianglesExist,
    /// A pair of d-simplexes exists once |E| ≥ (d+1)p^{d/2}, r a square.
    SimplicesExist,
    /// |S_k(r)| > |E|^{2k+2}/(3p)^k once |E| > 2p.
    WalkLowerBound,
    /// Δ(E)/Δ(E) = F_p (even d) or contains the squares (odd d).
    Quotient,
}

impl Claim {
    pub const ALL: [Claim; 13] = [
        Claim::S1LowerBound,
        Claim::S2LowerBound,
        Claim::CLowerBound,
        Claim::Nu2Bound,
        Claim::DegenerateSandwich,
        Claim::WalkPowerBound,
        Claim::DoubleCount,
        Claim::TwoPathsExist,
        Claim::FourCyclesExist,
        Claim::TrianglesExist,
        Claim::SimplicesExist,
        Claim::WalkLowerBound,
        Claim::Quotient,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Claim::S1LowerBound => "s1-lower-bound",
            Claim::S2LowerBound => "s2-lower-bound",
            Claim::CLowerBound => "c-lower-bound",
            Claim::Nu2Bound => "nu2-bound",
            Claim::DegenerateSandwich => "degenerate-sandwich",
            Claim::WalkPowerBound => "walk-power-bound",
            Claim::DoubleCount => "double-count",
            Claim::TwoPathsExist => "two-paths-exist",
            Claim::FourCyclesExist => "four-cycles-exist",
            Claim::TrianglesExist => "triangles-exist",
            Claim::SimplicesExist => "simplices-exist",
            Claim::WalkLowerBound => "walk-lower-bound",
            Claim::Quotient => "quotient",
        }
    }

    /// Claims that depend on a dilation ratio.
    pub fn uses_ratio(self) -> bool {
        !matches!(self, Claim::Nu2Bound | Claim::Quotient)
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Claim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Claim> {
        Claim::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Invalid(format!("unknown claim {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Holds,
    Vacuous,
    Violated,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "HOLDS",
            Status::Vacuous => "VACUOUS",
            Status::Violated => "VIOLATED",
        })
    }
}

/// One claim evaluated on one instance. `lhs` and `rhs` are exact rationals
/// printed as `a` or `a/b`; for existence claims `lhs` is the number of
/// witnesses found (the search stops at the first) and `rhs` is 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub claim: Claim,
    pub status: Status,
    pub hypothesis_met: bool,
    pub conclusion_holds: bool,
    pub lhs: String,
    pub rhs: String,
    pub params: BTreeMap<String, String>,
}

impl Verdict {
    pub const CSV_HEADER: &'static str = "claim,status,hypothesis_met,conclusion_holds,lhs,rhs,params";

    fn new(claim: Claim, set: &PointSet, r: Option<Ratio>, hypothesis_met: bool, conclusion_holds: bool) -> Verdict {
        let status = match (hypothesis_met, conclusion_holds) {
            (false, _) => Status::Vacuous,
            (true, true) => Status::Holds,
            (true, false) => Status::Violated,
        };
        let mut params = BTreeMap::new();
        params.insert("p".into(), set.prime().p().to_string());
        params.insert("d".into(), set.dim().to_string());
        params.insert("E_size".into(), set.len().to_string());
        if let Some(r) = r {
            params.insert("r".into(), r.to_string());
        }
        Verdict {
            claim,
            status,
            hypothesis_met,
            conclusion_holds,
            lhs: String::new(),
            rhs: String::new(),
            params,
        }
    }

    fn sides(mut self, lhs: &BigRational, rhs: &BigRational) -> Verdict {
        self.lhs = lhs.to_string();
        self.rhs = rhs.to_string();
        self
    }

    fn param(mut self, key: &str, value: impl ToString) -> Verdict {
        self.params.insert(key.into(), value.to_string());
        self
    }

    /// A theorem contradicted on a concrete instance.
    pub fn is_contradiction(&self) -> bool {
        self.status == Status::Violated
    }

    pub fn csv_row(&self) -> String {
        let params: Vec<String> = self.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
        format!(
            "{},{},{},{},{},{},\"{}\"",
            self.claim,
            self.status,
            self.hypothesis_met,
            self.conclusion_holds,
            self.lhs,
            self.rhs,
            params.join(";").replace('"', "'")
        )
    }
}

fn int(v: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(v.into())
}

fn big(v: impl Into<BigInt>) -> BigInt {
    v.into()
}

fn plane_three_mod_four(set: &PointSet) -> bool {
    set.dim() == 2 && set.prime().p_mod_4() == 3
}

/// Runs two methods and insists they agree.
fn agreed(name: &str, a: Count, b: Count) -> Result<Count> {
    if a != b {
        return Err(Error::MethodMismatch { name: name.into(), detail: format!("{a} vs {b}") });
    }
    Ok(a)
}

fn s1(set: &PointSet, r: Ratio) -> Result<Count> {
    agreed(
        "S_1",
        count_s_k(set, r, 1, Method::NuIdentity)?.value,
        count_s_k(set, r, 1, Method::WalkDp)?.value,
    )
}

fn s2(set: &PointSet, r: Ratio) -> Result<Count> {
    agreed(
        "S_2",
        count_s_k(set, r, 2, Method::NuIdentity)?.value,
        count_s_k(set, r, 2, Method::WalkDp)?.value,
    )
}

/// (1/p + 1/p² − 1/p³)n⁴ − 2n³/p − (p+1)n².
pub fn s1_lower_bound_rhs(p: u32, n: usize) -> BigRational {
    let p = int(p);
    let n = int(n as u64);
    let one = BigRational::one();
    let coeff = &one / &p + &one / (&p * &p) - &one / (&p * &p * &p);
    let n2 = &n * &n;
    coeff * &n2 * &n2 - int(2) * &n2 * &n / &p - (p + one) * n2
}

pub fn check_s1_lower_bound(set: &PointSet, r: Ratio) -> Result<Verdict> {
    let lhs = int(s1(set, r)?);
    let rhs = s1_lower_bound_rhs(set.prime().p(), set.len());
    Ok(Verdict::new(Claim::S1LowerBound, set, Some(r), plane_three_mod_four(set), lhs >= rhs)
        .sides(&lhs, &rhs)
        .param("hypothesis", "d=2 and p=3 mod 4"))
}

pub fn check_s2_lower_bound(set: &PointSet, r: Ratio) -> Result<Verdict> {
    let n2 = big(set.len() as u64).pow(2);
    let lhs = int(s2(set, r)?) * int(n2.clone());
    let rhs = int(big(s1(set, r)?).pow(2));
    Ok(Verdict::new(Claim::S2LowerBound, set, Some(r), true, lhs >= rhs)
        .sides(&lhs, &rhs)
        .param("form", "|S_2|*|E|^2 >= |S_1|^2"))
}

pub fn check_c_lower_bound(set: &PointSet, r: Ratio) -> Result<Verdict> {
    let c = agreed("C", count_c(set, r, Method::MuIdentity)?.value, count_c(set, r, Method::Brute)?.value)?;
    let lhs = int(big(c) * big(set.len() as u64).pow(4));
    let rhs = int(big(s2(set, r)?).pow(2));
    Ok(Verdict::new(Claim::CLowerBound, set, Some(r), true, lhs >= rhs)
        .sides(&lhs, &rhs)
        .param("form", "|C|*|E|^4 >= |S_2|^2"))
}

/// Reports the pair (t_1, t_2) where ν_2(t_1, t_2) − |E|·ν_1(t_1) is largest.
pub fn check_nu2_bound(set: &PointSet) -> Result<Verdict> {
    let prime = set.prime();
    let table = set.table();
    let hist = table.histogram();
    let n = set.len() as i128;
    let mut worst: Option<(i128, Count, Count, u32, u32)> = None;
    for t1 in prime.elements() {
        for t2 in prime.elements() {
            let nu2: Count = (0..set.len())
                .map(|j| (table.bucket(j, t1).len() * table.bucket(j, t2).len()) as Count)
                .sum();
            let bound = set.len() as Count * hist[t1.value() as usize];
            let gap = nu2 as i128 - n * hist[t1.value() as usize] as i128;
            if worst.is_none_or(|w| gap > w.0) {
                worst = Some((gap, nu2, bound, t1.value(), t2.value()));
            }
        }
    }
    let (gap, nu2, bound, t1, t2) = worst.expect("field has elements");
    Ok(Verdict::new(Claim::Nu2Bound, set, None, true, gap <= 0)
        .sides(&int(nu2), &int(bound))
        .param("t1", t1)
        .param("t2", t2))
}

/// Checks all four sandwiches and reports the tightest side.
pub fn check_sandwich(set: &PointSet, r: Ratio) -> Result<Verdict> {
    let parts = count_4cycle_families(set, r)?;
    let s2 = s2(set, r)?;
    let p = set.prime().p() as Count;
    let pieces = [parts.a13, parts.a24, parts.b13, parts.b24];
    let min = *pieces.iter().min().expect("four");
    let max = *pieces.iter().max().expect("four");
    let fibers = a13_projection_fibers(set, r)?;
    let holds = min >= s2 && max <= (p + 1) * s2 && fibers.surjective && fibers.max_fiber <= p + 1;
    Ok(Verdict::new(Claim::DegenerateSandwich, set, Some(r), plane_three_mod_four(set), holds)
        .sides(&int(max), &int((p + 1) * s2))
        .param("S2", s2)
        .param("min_piece", min)
        .param("max_fiber", fibers.max_fiber)
        .param("surjective", fibers.surjective)
        .param("hypothesis", "d=2 and p=3 mod 4"))
}

pub fn check_walk_power_bound(set: &PointSet, r: Ratio, k: usize) -> Result<Verdict> {
    let sk = count_s_k(set, r, k, Method::WalkDp)?.value;
    let n = set.len() as u64;
    let lhs = int(sk);
    let rhs = if n == 0 {
        BigRational::zero()
    } else {
        BigRational::new(big(s1(set, r)?).pow(k as u32), big(n).pow(2 * k as u32 - 2))
    };
    Ok(Verdict::new(Claim::WalkPowerBound, set, Some(r), true, lhs >= rhs)
        .sides(&lhs, &rhs)
        .param("k", k))
}

pub fn check_double_count(set: &PointSet, r: Ratio) -> Result<Verdict> {
    let dc = verify_bipartite_double_count(set, r)?;
    Ok(Verdict::new(Claim::DoubleCount, set, Some(r), true, dc.identities_hold() && dc.cauchy_schwarz_holds())
        .sides(&int(dc.pair_degree_sq_sum), &int(4 * dc.s2))
        .param("fibers_exactly_four", dc.fibers_exactly_four)
        .param("quad_degree_sq_sum", dc.quad_degree_sq_sum)
        .param("C", dc.c))
}

/// Existence by witness search; the search is exhaustive, so a miss means
/// the family is empty.
fn existence(claim: Claim, set: &PointSet, r: Ratio, pattern: &Pattern, hypothesis: bool, seed: u64) -> Result<Verdict> {
    let found = find_witness(pattern, set, r, seed)?;
    let mut v = Verdict::new(claim, set, Some(r), hypothesis, found.is_some())
        .sides(&int(found.is_some() as u8), &BigRational::zero());
    if let Some(w) = found {
        let text: Vec<String> = w.tuple.iter().map(|&i| set.points()[i].to_string()).collect();
        v = v.param("witness", text.join(" "));
    }
    Ok(v)
}

/// Smallest n with n > p and (n − p)² > 3p², i.e. n > (√3 + 1)p.
pub fn two_path_threshold(p: u32) -> u128 {
    let p = p as u128;
    (p + 1..).find(|&n| (n - p) * (n - p) > 3 * p * p).expect("unbounded")
}

/// Smallest n with n² > 48p³, i.e. n > 4√3·p^{3/2}.
pub fn four_cycle_threshold(p: u32) -> u128 {
    let bound = 48 * (p as u128).pow(3);
    (bound.isqrt()..).find(|&n| n * n > bound).expect("unbounded")
}

/// Smallest n with n² ≥ (d+1)²p^d, i.e. n ≥ (d+1)p^{d/2}.
pub fn simplex_threshold(p: u32, d: usize) -> u128 {
    let bound = ((d + 1) as u128).pow(2) * (p as u128).pow(d as u32);
    let root = bound.isqrt();
    if root * root == bound {
        root
    } else {
        root + 1
    }
}

/// Evaluates an existence or walk-count theorem on one instance. `k` is used
/// by the walk-count claims only.
pub fn check_theorem(claim: Claim, set: &PointSet, r: Ratio, k: usize, seed: u64) -> Result<Verdict> {
    let prime = set.prime();
    let p = prime.p() as u128;
    let n = set.len() as u128;
    let d = set.dim();
    match claim {
        Claim::TwoPathsExist => {
            let size_ok = n > p && (n - p) * (n - p) > 3 * p * p;
            let hyp = plane_three_mod_four(set) && size_ok;
            Ok(existence(claim, set, r, &Pattern::path_pair(2), hyp, seed)?
                .param("hypothesis", format!("d=2, p=3 mod 4, |E|>p and (|E|-p)^2={} > 3p^2={}", (n.max(p) - p).pow(2), 3 * p * p)))
        }
        Claim::FourCyclesExist => {
            let hyp = plane_three_mod_four(set) && n * n > 48 * p.pow(3);
            let mut v = existence(claim, set, r, &Pattern::cycle_pair(4), hyp, seed)?
                .param("hypothesis", format!("d=2, p=3 mod 4, |E|^2={} > 48p^3={}", n * n, 48 * p.pow(3)));
            if d == 2 && 48 * p.pow(3) >= p.pow(4) {
                // |E| ≤ p² so |E|² ≤ p⁴ ≤ 48p³: no set in the plane qualifies.
                v = v.param("unsatisfiable", format!("|E|^2 <= p^4={} <= 48p^3={}", p.pow(4), 48 * p.pow(3)));
            }
            Ok(v)
        }
        Claim::TrianglesExist => {
            let hyp = d == 2 && r.is_square() && n >= 3 * p;
            Ok(existence(claim, set, r, &Pattern::simplex_pair(3), hyp, seed)?
                .param("hypothesis", format!("d=2, r square, |E|={n} >= 3p={}", 3 * p)))
        }
        Claim::SimplicesExist => {
            if d < 2 {
                return Err(Error::Invalid("simplex pairs need d >= 2".into()));
            }
            let bound = ((d + 1) as u128).pow(2) * p.pow(d as u32);
            let hyp = r.is_square() && n * n >= bound;
            Ok(existence(claim, set, r, &Pattern::simplex_pair(d + 1), hyp, seed)?
                .param("hypothesis", format!("r square, |E|^2={} >= (d+1)^2 p^d={bound}", n * n)))
        }
        Claim::WalkLowerBound => {
            if k == 0 {
                return Err(Error::Invalid("walk length k must be at least 1".into()));
            }
            let hyp = plane_three_mod_four(set) && n > 2 * p;
            let lhs = int(count_s_k(set, r, k, Method::WalkDp)?.value);
            let rhs = BigRational::new(big(n).pow(2 * k as u32 + 2), big(3 * p).pow(k as u32));
            Ok(Verdict::new(claim, set, Some(r), hyp, lhs > rhs)
                .sides(&lhs, &rhs)
                .param("k", k)
                .param("hypothesis", format!("d=2, p=3 mod 4, |E|={n} > 2p={}", 2 * p)))
        }
        other => Err(Error::Invalid(format!("{other} is not an existence or walk-count claim"))),
    }
}

/// Even d: Δ/Δ = F_p once |E| ≥ 9p^{d/2}. Odd d: every square lies in Δ/Δ
/// once |E| ≥ 6p^{d/2}. The containment is computed either way.
pub fn check_quotient_claims(set: &PointSet) -> Result<Verdict> {
    let prime = set.prime();
    let p = prime.p() as u128;
    let d = set.dim();
    let n = set.len() as u128;
    let quotient = match quotient_set(set) {
        Ok(q) => q,
        Err(Error::NoNonzeroDistance) => Default::default(),
        Err(e) => return Err(e),
    };
    let (hyp_factor, targets): (u128, Vec<_>) = if d.is_multiple_of(2) {
        (81, prime.elements().collect())
    } else {
        (36, prime.squares())
    };
    let bound = hyp_factor * p.pow(d as u32);
    let hit = targets.iter().filter(|t| quotient.contains(t)).count();
    let target = if d.is_multiple_of(2) { "F_p" } else { "squares" };
    Ok(Verdict::new(Claim::Quotient, set, None, n * n >= bound, hit == targets.len())
        .sides(&int(hit as u64), &int(targets.len() as u64))
        .param("target", target)
        .param("quotient_size", quotient.len())
        .param("hypothesis", format!("|E|^2={} >= {hyp_factor}p^d={bound}", n * n)))
}

/// Runs one claim; walk-count claims use `k`, existence claims use `seed`.
pub fn check_claim(claim: Claim, set: &PointSet, r: Ratio, k: usize, seed: u64) -> Result<Verdict> {
    match claim {
        Claim::S1LowerBound => check_s1_lower_bound(set, r),
        Claim::S2LowerBound => check_s2_lower_bound(set, r),
        Claim::CLowerBound => check_c_lower_bound(set, r),
        Claim::Nu2Bound => check_nu2_bound(set),
        Claim::DegenerateSandwich => check_sandwich(set, r),
        Claim::WalkPowerBound => check_walk_power_bound(set, r, k),
        Claim::DoubleCount => check_double_count(set, r),
        Claim::Quotient => check_quotient_claims(set),
        _ => check_theorem(claim, set, r, k, seed),
    }
}

/// Which ratios a scan requires to be positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatioPolicy {
    All,
    Squares,
    Fixed(u32),
}

impl RatioPolicy {
    pub fn ratios(self, prime: Prime) -> Result<Vec<Ratio>> {
        match self {
            RatioPolicy::All => Ok(Ratio::all(prime)),
            RatioPolicy::Squares => Ok(Ratio::squares(prime)),
            RatioPolicy::Fixed(r) => Ok(vec![Ratio::from_int(prime, r as u64)?]),
        }
    }
}

impl fmt::Display for RatioPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatioPolicy::All => f.write_str("all"),
            RatioPolicy::Squares => f.write_str("squares"),
            RatioPolicy::Fixed(r) => write!(f, "{r}"),
        }
    }
}

impl FromStr for RatioPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<RatioPolicy> {
        match s {
            "all" => Ok(RatioPolicy::All),
            "squares" => Ok(RatioPolicy::Squares),
            _ => s
                .parse()
                .map(RatioPolicy::Fixed)
                .map_err(|_| Error::Invalid(format!("ratio must be an integer, `all` or `squares`, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub size: usize,
    pub positive: usize,
    pub samples: usize,
    pub fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub p: u32,
    pub d: usize,
    pub r_policy: RatioPolicy,
    pub family: Family,
    pub seed: u64,
    pub samples: usize,
    pub sizes: Vec<usize>,
    pub points: Vec<ScanPoint>,
    /// Smallest tried size from which every larger tried size had all
    /// samples positive.
    pub empirical_min_size: Option<usize>,
    /// Size from which the existence theorem guarantees positivity, when one
    /// applies to these parameters.
    pub theoretical_threshold: Option<u128>,
}

impl ScanResult {
    pub const CSV_HEADER: &'static str = "family,p,d,r_policy,size,samples,positive,fraction,theoretical_threshold";

    pub fn csv_rows(&self) -> Vec<String> {
        let threshold = self.theoretical_threshold.map(|t| t.to_string()).unwrap_or_default();
        self.points
            .iter()
            .map(|pt| {
                format!(
                    "{},{},{},{},{},{},{},{:.6},{}",
                    self.family, self.p, self.d, self.r_policy, pt.size, pt.samples, pt.positive, pt.fraction, threshold
                )
            })
            .collect()
    }
}

/// The guaranteed-positive size for a family, if an existence theorem covers
/// the parameters.
pub fn theoretical_threshold(family: Family, prime: Prime, d: usize, policy: RatioPolicy) -> Option<u128> {
    let p = prime.p();
    let squares_only = match policy {
        RatioPolicy::All => false,
        RatioPolicy::Squares => true,
        RatioPolicy::Fixed(r) => prime.is_square(prime.scalar(r as i64)),
    };
    let plane3 = d == 2 && prime.p_mod_4() == 3;
    match family {
        Family::C2Path | Family::KPath if plane3 => Some(two_path_threshold(p)),
        Family::F4Cycle if plane3 => Some(four_cycle_threshold(p)),
        Family::TTriangle if d == 2 && squares_only => Some(3 * p as u128),
        Family::PSimplex if squares_only && d >= 2 => Some(simplex_threshold(p, d)),
        _ => None,
    }
}

/// Samples random sets of each size and records how often the family is
/// nonempty for every allowed ratio. Cell (size, sample) draws from its own
/// ChaCha stream, so results do not depend on scheduling.
pub fn scan_threshold(
    prime: Prime,
    d: usize,
    family: Family,
    policy: RatioPolicy,
    sizes: std::ops::RangeInclusive<usize>,
    samples: usize,
    seed: u64,
) -> Result<ScanResult> {
    if samples == 0 {
        return Err(Error::Invalid("samples must be at least 1".into()));
    }
    let pattern = family
        .pattern(d, 2)
        .ok_or_else(|| Error::Invalid(format!("{family} cannot be scanned")))?;
    let ratios = policy.ratios(prime)?;
    let space = space_size(prime, d).unwrap_or(u128::MAX);
    let sizes: Vec<usize> = sizes.collect();
    if let Some(&too_big) = sizes.iter().find(|&&s| s as u128 > space) {
        return Err(Error::SizeExceedsSpace { size: too_big as u128, space });
    }
    let cells: Vec<(usize, usize)> = sizes.iter().enumerate().flat_map(|(i, _)| (0..samples).map(move |s| (i, s))).collect();
    let outcomes = cells
        .par_iter()
        .map(|&(i, s)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((i * samples + s) as u64);
            let set = PointSet::random(prime, d, sizes[i], &mut rng)?;
            for &r in &ratios {
                if pattern.find(&set, r).is_none() {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect::<Result<Vec<bool>>>()?;
    let points: Vec<ScanPoint> = sizes
        .iter()
        .enumerate()
        .map(|(i, &size)| {
            let positive = outcomes[i * samples..(i + 1) * samples].iter().filter(|&&b| b).count();
            ScanPoint { size, positive, samples, fraction: positive as f64 / samples as f64 }
        })
        .collect();
    let empirical_min_size = points
        .iter()
        .rev()
        .take_while(|pt| pt.positive == pt.samples)
        .last()
        .map(|pt| pt.size);
    Ok(ScanResult {
        p: prime.p(),
        d,
        r_policy: policy,
        family,
        seed,
        samples,
        sizes,
        points,
        empirical_min_size,
        theoretical_threshold: theoretical_threshold(family, prime, d, policy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::pattern::tests::{random_set, two_point};
    use rand::Rng;

    fn ratio(p: &PointSet, r: u64) -> Ratio {
        Ratio::from_int(p.prime(), r).unwrap()
    }

    #[test]
    fn s1_bound_full_plane() {
        let p7 = Prime::new(7).unwrap();
        let full = PointSet::full_space(p7, 2).unwrap();
        let v = check_s1_lower_bound(&full, ratio(&full, 1)).unwrap();
        // ν(t) = 49·8 for each of the six nonzero t.
        assert_eq!(v.lhs, (6 * 392u64 * 392).to_string());
        assert_eq!(v.status, Status::Holds);
        let rhs = s1_lower_bound_rhs(7, 49);
        assert_eq!(v.rhs, rhs.to_string());
    }

    #[test]
    fn s1_bound_rhs_closed_form() {
        // p = 3, n = 1: (1/3 + 1/9 − 1/27) − 2/3 − 4 = −115/27.
        assert_eq!(s1_lower_bound_rhs(3, 1), BigRational::new(big(-115), big(27)));
    }

    #[test]
    fn two_point_sweep() {
        let set = two_point();
        let r = ratio(&set, 1);
        let s2 = check_s2_lower_bound(&set, r).unwrap();
        assert_eq!((s2.lhs.as_str(), s2.rhs.as_str()), ("16", "16"));
        let c = check_c_lower_bound(&set, r).unwrap();
        assert_eq!((c.lhs.as_str(), c.rhs.as_str()), ("64", "16"));
        for claim in Claim::ALL {
            let v = check_claim(claim, &set, r, 2, 1).unwrap();
            assert!(!v.is_contradiction(), "{v:?}");
        }
    }

    #[test]
    fn single_point_sweep() {
        let p7 = Prime::new(7).unwrap();
        let set = PointSet::new(p7, 2, vec![Point::from_ints(p7, &[3, 4]).unwrap()]).unwrap();
        let r = ratio(&set, 1);
        assert_eq!(check_s2_lower_bound(&set, r).unwrap().lhs, "0");
        assert_eq!(check_c_lower_bound(&set, r).unwrap().rhs, "0");
        assert_eq!(check_s1_lower_bound(&set, r).unwrap().status, Status::Holds);
        let q = check_quotient_claims(&set).unwrap();
        assert!(!q.conclusion_holds);
        assert_eq!(q.status, Status::Vacuous);
    }

    #[test]
    fn four_cycle_hypothesis_unsatisfiable_small_p() {
        for p in [3u64, 7, 11, 19, 23, 31, 43, 47] {
            let prime = Prime::new(p).unwrap();
            assert!(four_cycle_threshold(prime.p()) > (p * p) as u128);
        }
        assert!(four_cycle_threshold(53) <= 53 * 53);
        let p7 = Prime::new(7).unwrap();
        let full = PointSet::full_space(p7, 2).unwrap();
        let v = check_theorem(Claim::FourCyclesExist, &full, ratio(&full, 1), 0, 3).unwrap();
        assert_eq!(v.status, Status::Vacuous);
        assert!(v.conclusion_holds);
        assert!(v.params.contains_key("unsatisfiable"));
    }

    #[test]
    fn thresholds() {
        assert_eq!(two_path_threshold(7), 20);
        assert_eq!(two_path_threshold(3), 9);
        assert_eq!(simplex_threshold(7, 2), 21);
        assert_eq!(simplex_threshold(3, 3), 21);
        assert_eq!(four_cycle_threshold(7), 129);
    }

    #[test]
    fn walk_bound_example() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let p7 = Prime::new(7).unwrap();
        let set = PointSet::random(p7, 2, 15, &mut rng).unwrap();
        for r in Ratio::all(p7) {
            let v = check_theorem(Claim::WalkLowerBound, &set, r, 3, 0).unwrap();
            assert_eq!(v.status, Status::Holds, "{v:?}");
            assert_eq!(v.rhs, BigRational::new(big(15u64).pow(8), big(21u64).pow(3)).to_string());
        }
    }

    #[test]
    fn random_lemmas_never_violated() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..30 {
            let p = [7u64, 11][rng.gen_range(0..2)];
            let set = random_set(p, 2, rng.gen_range(1..9), rng.gen());
            let r = ratio(&set, rng.gen_range(1..p));
            for claim in [
                Claim::S1LowerBound,
                Claim::S2LowerBound,
                Claim::CLowerBound,
                Claim::Nu2Bound,
                Claim::DegenerateSandwich,
                Claim::WalkPowerBound,
                Claim::DoubleCount,
            ] {
                let v = check_claim(claim, &set, r, 3, 0).unwrap();
                assert!(v.hypothesis_met);
                assert_eq!(v.status, Status::Holds, "{v:?}");
            }
        }
    }

    #[test]
    fn nu2_bound_isotropic() {
        let set = random_set(5, 2, 9, 3);
        assert_eq!(check_nu2_bound(&set).unwrap().status, Status::Holds);
    }

    #[test]
    fn quotient_examples() {
        let p7 = Prime::new(7).unwrap();
        let v = check_quotient_claims(&PointSet::full_space(p7, 2).unwrap()).unwrap();
        assert_eq!(v.status, Status::Vacuous);
        assert!(v.conclusion_holds);
        assert_eq!(v.lhs, "7");
        let p3 = Prime::new(3).unwrap();
        let v = check_quotient_claims(&PointSet::full_space(p3, 4).unwrap()).unwrap();
        assert_eq!(v.status, Status::Holds);
        let v = check_quotient_claims(&PointSet::full_space(p3, 3).unwrap()).unwrap();
        assert!(v.conclusion_holds);
        assert_eq!(v.params["target"], "squares");
    }

    #[test]
    fn theorem_hypotheses_depend_on_class_and_ratio() {
        let set = random_set(5, 2, 25, 1);
        let v = check_theorem(Claim::TwoPathsExist, &set, ratio(&set, 1), 0, 0).unwrap();
        assert!(!v.hypothesis_met);
        let set = random_set(7, 2, 21, 1);
        assert!(check_theorem(Claim::TrianglesExist, &set, ratio(&set, 2), 0, 0).unwrap().hypothesis_met);
        assert!(!check_theorem(Claim::TrianglesExist, &set, ratio(&set, 3), 0, 0).unwrap().hypothesis_met);
    }

    #[test]
    fn witnesses_are_reported() {
        let set = random_set(7, 2, 20, 9);
        let v = check_theorem(Claim::TwoPathsExist, &set, ratio(&set, 3), 0, 4).unwrap();
        assert_eq!(v.status, Status::Holds);
        assert_eq!(v.params["witness"].split(' ').count(), 6);
    }

    #[test]
    fn scan_is_deterministic_and_validated() {
        let p7 = Prime::new(7).unwrap();
        let a = scan_threshold(p7, 2, Family::C2Path, RatioPolicy::Fixed(1), 2..=6, 3, 7).unwrap();
        let b = scan_threshold(p7, 2, Family::C2Path, RatioPolicy::Fixed(1), 2..=6, 3, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.points.len(), 5);
        assert_eq!(a.theoretical_threshold, Some(20));
        assert!(scan_threshold(p7, 2, Family::C2Path, RatioPolicy::All, 2..=3, 0, 7).is_err());
        assert_eq!(
            scan_threshold(p7, 2, Family::C2Path, RatioPolicy::All, 48..=50, 1, 7),
            Err(Error::SizeExceedsSpace { size: 50, space: 49 })
        );
        let full = scan_threshold(p7, 2, Family::C2Path, RatioPolicy::Fixed(1), 49..=49, 2, 1).unwrap();
        assert_eq!(full.points[0].fraction, 1.0);
        assert_eq!(full.empirical_min_size, Some(49));
        let two = scan_threshold(p7, 2, Family::C2Path, RatioPolicy::All, 2..=2, 4, 1).unwrap();
        assert_eq!(two.points[0].positive, 0);
        assert_eq!(two.empirical_min_size, None);
    }

    #[test]
    fn claim_names_round_trip() {
        for c in Claim::ALL {
            assert_eq!(c.name().parse::<Claim>().unwrap(), c);
            assert_eq!(serde_json::to_value(c).unwrap(), serde_json::json!(c.name()));
        }
        let v = check_nu2_bound(&two_point()).unwrap();
        assert!(v.csv_row().starts_with("nu2-bound,HOLDS,true,true,"));
        assert!(v.csv_row().ends_with(";t2=0\""));
        assert!(serde_json::to_string(&v).unwrap().contains("\"status\":\"HOLDS\""));
    }
}
