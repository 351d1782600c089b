//! Points of F_p^d, the quadratic form ‖x‖ = x₁² + … + x_d², spheres, and
//! distance/quotient sets of a point set.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::OnceLock;

use rand::Rng;

use crate::error::{Error, Result};
use crate::field::{Prime, Scalar};
use crate::limits::ENUMERATION_LIMIT;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    coords: Vec<Scalar>,
}

impl Point {
    pub fn new(coords: Vec<Scalar>) -> Point {
        Point { coords }
    }

    /// Builds a point from integers, rejecting non-canonical residues.
    pub fn from_ints(prime: Prime, coords: &[u64]) -> Result<Point> {
        let coords = coords
            .iter()
            .map(|&c| prime.checked_scalar(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(Point { coords })
    }

    pub fn origin(d: usize) -> Point {
        Point { coords: vec![Scalar::ZERO; d] }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn sub(&self, prime: Prime, other: &Point) -> Result<Point> {
        check_dim(self.dim(), other.dim())?;
        Ok(Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| prime.sub(a, b))
                .collect(),
        })
    }

    pub fn add(&self, prime: Prime, other: &Point) -> Result<Point> {
        check_dim(self.dim(), other.dim())?;
        Ok(Point {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(&a, &b)| prime.add(a, b))
                .collect(),
        })
    }

    pub fn scale(&self, prime: Prime, s: Scalar) -> Point {
        Point { coords: self.coords.iter().map(|&c| prime.mul(c, s)).collect() }
    }

    /// Mixed-radix index of the point in `0..p^d`.
    pub fn index(&self, prime: Prime) -> u64 {
        self.coords
            .iter()
            .fold(0u64, |acc, c| acc * prime.p() as u64 + c.value() as u64)
    }

    pub fn from_index(prime: Prime, d: usize, mut idx: u64) -> Point {
        let p = prime.p() as u64;
        let mut coords = vec![Scalar::ZERO; d];
        for c in coords.iter_mut().rev() {
            *c = Scalar((idx % p) as u32);
            idx /= p;
        }
        Point { coords }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub fn norm(prime: Prime, x: &Point) -> Scalar {
    let p = prime.p() as u64;
    let s = x.coords.iter().fold(0u64, |acc, c| {
        let v = c.value() as u64;
        (acc + v * v) % p
    });
    Scalar(s as u32)
}

pub fn dist(prime: Prime, x: &Point, y: &Point) -> Result<Scalar> {
    Ok(norm(prime, &x.sub(prime, y)?))
}

/// `p^d`, or `None` on overflow.
pub fn space_size(prime: Prime, d: usize) -> Option<u128> {
    (prime.p() as u128).checked_pow(d as u32)
}

fn enumerable_space(prime: Prime, d: usize) -> Result<u64> {
    match space_size(prime, d) {
        Some(n) if n <= ENUMERATION_LIMIT => Ok(n as u64),
        Some(n) => Err(Error::TooLarge { what: "p^d enumeration", size: n, limit: ENUMERATION_LIMIT }),
        None => Err(Error::TooLarge { what: "p^d enumeration", size: u128::MAX, limit: ENUMERATION_LIMIT }),
    }
}

/// Parameters of the sphere S_t = {x ∈ F_p^d : ‖x‖ = t}.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereSpec {
    pub t: Scalar,
    pub d: usize,
    pub prime: Prime,
}

/// Every point of S_t, by exhaustive enumeration of F_p^d.
pub fn sphere_points(spec: SphereSpec) -> Result<Vec<Point>> {
    let n = enumerable_space(spec.prime, spec.d)?;
    Ok((0..n)
        .map(|i| Point::from_index(spec.prime, spec.d, i))
        .filter(|x| norm(spec.prime, x) == spec.t)
        .collect())
}

/// Closed-form |S_t| for even d:
/// `p^{d-1} + λ(t)·p^{(d-2)/2}·η((-1)^{d/2})` with λ(0) = p-1, λ(t≠0) = -1.
pub fn sphere_size_formula(spec: SphereSpec) -> Result<u128> {
    let d = spec.d;
    if d == 0 || d % 2 == 1 {
        return Err(Error::OddDimension(d));
    }
    let p = spec.prime.p() as i128;
    let lambda = if spec.t.is_zero() { p - 1 } else { -1 };
    let eta = if (d / 2).is_multiple_of(2) { 1 } else { spec.prime.legendre_minus_one() as i128 };
    let size = p.pow(d as u32 - 1) + lambda * p.pow((d as u32 - 2) / 2) * eta;
    Ok(size as u128)
}

/// A finite set E ⊂ F_p^d with no repeated points.
///
/// The pairwise distance table and per-point distance buckets are built on
/// first use and shared by every counter.
#[derive(Debug, Clone)]
pub struct PointSet {
    prime: Prime,
    d: usize,
    points: Vec<Point>,
    table: OnceLock<DistanceTable>,
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.prime == other.prime && self.d == other.d && self.points == other.points
    }
}

impl Eq for PointSet {}

impl PointSet {
    pub fn new(prime: Prime, d: usize, points: Vec<Point>) -> Result<PointSet> {
        if d == 0 {
            return Err(Error::Invalid("dimension must be at least 1".into()));
        }
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut seen = HashSet::with_capacity(points.len());
        for x in &points {
            check_dim(d, x.dim())?;
            if x.coords.iter().any(|c| c.value() >= prime.p()) {
                return Err(Error::Invalid(format!("point {x} has non-canonical coordinates")));
            }
            if !seen.insert(x) {
                return Err(Error::DuplicatePoint(x.to_string()));
            }
        }
        Ok(PointSet { prime, d, points, table: OnceLock::new() })
    }

    /// All of F_p^d.
    pub fn full_space(prime: Prime, d: usize) -> Result<PointSet> {
        let n = enumerable_space(prime, d)?;
        PointSet::new(prime, d, (0..n).map(|i| Point::from_index(prime, d, i)).collect())
    }

    /// `size` distinct points sampled uniformly without replacement, listed in
    /// increasing index order.
    pub fn random<R: Rng + ?Sized>(prime: Prime, d: usize, size: usize, rng: &mut R) -> Result<PointSet> {
        let space = space_size(prime, d).unwrap_or(u128::MAX);
        if size as u128 > space {
            return Err(Error::SizeExceedsSpace { size: size as u128, space });
        }
        let n = enumerable_space(prime, d)?;
        let mut idx = rand::seq::index::sample(rng, n as usize, size).into_vec();
        idx.sort_unstable();
        PointSet::new(prime, d, idx.into_iter().map(|i| Point::from_index(prime, d, i as u64)).collect())
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.points.contains(x)
    }

    /// A copy of the set with one more point appended.
    pub fn with_point(&self, x: Point) -> Result<PointSet> {
        let mut points = self.points.clone();
        points.push(x);
        PointSet::new(self.prime, self.d, points)
    }

    /// The same set with its points listed in a different order.
    pub fn permuted(&self, order: &[usize]) -> PointSet {
        PointSet {
            prime: self.prime,
            d: self.d,
            points: order.iter().map(|&i| self.points[i].clone()).collect(),
            table: OnceLock::new(),
        }
    }

    /// True when no two distinct points of the ambient space are at distance
    /// zero, i.e. the form is anisotropic (d = 1, or d = 2 with p ≡ 3 mod 4).
    pub fn anisotropic_space(&self) -> bool {
        self.d == 1 || (self.d == 2 && self.prime.p_mod_4() == 3)
    }

    pub fn table(&self) -> &DistanceTable {
        self.table.get_or_init(|| DistanceTable::build(self))
    }

    pub fn dist(&self, i: usize, j: usize) -> Scalar {
        self.table().dist(i, j)
    }

    /// Parses the point-set text format: a `p=<int> d=<int>` header followed by
    /// one comma-separated point per line.
    pub fn parse(text: &str) -> Result<PointSet> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "missing header".into() })?;
        let (mut p, mut d) = (None, None);
        for tok in header.split_whitespace() {
            let (key, val) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse { line: hline, msg: format!("bad header token {tok:?}") })?;
            let val: u64 = val
                .parse()
                .map_err(|_| Error::Parse { line: hline, msg: format!("bad integer {val:?}") })?;
            match key {
                "p" => p = Some(val),
                "d" => d = Some(val as usize),
                _ => return Err(Error::Parse { line: hline, msg: format!("unknown header key {key:?}") }),
            }
        }
        let (p, d) = match (p, d) {
            (Some(p), Some(d)) => (p, d),
            _ => return Err(Error::Parse { line: hline, msg: "header needs p= and d=".into() }),
        };
        let prime = Prime::new(p)?;
        let mut points = Vec::new();
        let mut seen = HashSet::new();
        for (ln, line) in lines {
            let coords = line
                .split(',')
                .map(|c| c.trim().parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse { line: ln, msg: format!("bad point {line:?}") })?;
            if coords.len() != d {
                return Err(Error::Parse { line: ln, msg: format!("expected {d} coordinates") });
            }
            let x = Point::from_ints(prime, &coords).map_err(|e| Error::Parse { line: ln, msg: e.to_string() })?;
            if !seen.insert(x.clone()) {
                return Err(Error::Parse { line: ln, msg: format!("duplicate point {x}") });
            }
            points.push(x);
        }
        PointSet::new(prime, d, points)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("p={} d={}\n", self.prime.p(), self.d);
        for x in &self.points {
            out.push_str(&x.to_string());
            out.push('\n');
        }
        out
    }
}

/// Pairwise distances of a point set plus, for every point, the other
/// points bucketed by distance.
#[derive(Debug, Clone)]
pub struct DistanceTable {
    n: usize,
    p: usize,
    dists: Vec<u32>,
    // buckets[i * p + t] = indices j with dist(i, j) = t
    buckets: Vec<Vec<u32>>,
    null_pairs: usize,
}

impl DistanceTable {
    fn build(set: &PointSet) -> DistanceTable {
        let n = set.len();
        let p = set.prime.p() as usize;
        let mut dists = vec![0u32; n * n];
        let mut buckets = vec![Vec::new(); n * p];
        let mut null_pairs = 0;
        for i in 0..n {
            for j in 0..n {
                let t = dist(set.prime, &set.points[i], &set.points[j]).expect("same dimension").value();
                dists[i * n + j] = t;
                buckets[i * p + t as usize].push(j as u32);
                if t == 0 && i != j {
                    null_pairs += 1;
                }
            }
        }
        DistanceTable { n, p, dists, buckets, null_pairs }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> Scalar {
        Scalar(self.dists[i * self.n + j])
    }

    #[inline]
    pub(crate) fn raw(&self, i: usize, j: usize) -> u32 {
        self.dists[i * self.n + j]
    }

    /// Indices `j` with `dist(i, j) = t` (including `i` itself when t = 0).
    #[inline]
    pub fn bucket(&self, i: usize, t: Scalar) -> &[u32] {
        &self.buckets[i * self.p + t.value() as usize]
    }

    /// Number of ordered pairs of distinct points at distance zero.
    pub fn null_pairs(&self) -> usize {
        self.null_pairs
    }

    /// ν₁ as a histogram over all ordered pairs (diagonal included).
    pub fn histogram(&self) -> Vec<u128> {
        let mut h = vec![0u128; self.p];
        for &t in &self.dists {
            h[t as usize] += 1;
        }
        h
    }
}

/// Δ(E), taken over ordered pairs including x = y.
pub fn distance_set(set: &PointSet) -> BTreeSet<Scalar> {
    set.table().histogram().iter().enumerate().filter(|(_, &c)| c > 0).map(|(t, _)| Scalar(t as u32)).collect()
}

/// Δ(E)/Δ(E) = {a·b⁻¹ : a ∈ Δ(E), b ∈ Δ(E) \ {0}}.
pub fn quotient_set(set: &PointSet) -> Result<BTreeSet<Scalar>> {
    let prime = set.prime();
    let delta = distance_set(set);
    let denominators: Vec<Scalar> = delta.iter().copied().filter(|b| !b.is_zero()).collect();
    if denominators.is_empty() {
        return Err(Error::NoNonzeroDistance);
    }
    let mut out = BTreeSet::new();
    for &b in &denominators {
        let inv = prime.inv(b).expect("nonzero");
        for &a in &delta {
            out.insert(prime.mul(a, inv));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pr(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn pt(p: Prime, c: &[u64]) -> Point {
        Point::from_ints(p, c).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm(pr(7), &pt(pr(7), &[0, 0])), Scalar(0));
        assert_eq!(norm(pr(7), &pt(pr(7), &[3, 4])), Scalar(4));
        assert_eq!(norm(pr(3), &pt(pr(3), &[1, 1, 1])), Scalar(0));
    }

    #[test]
    fn dist_examples_and_symmetry() {
        let p = pr(7);
        let x = pt(p, &[0, 0]);
        assert_eq!(dist(p, &x, &x).unwrap(), Scalar(0));
        assert_eq!(dist(p, &x, &pt(p, &[1, 0])).unwrap(), Scalar(1));
        assert_eq!(
            dist(p, &x, &pt(p, &[1, 0, 0])),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        );
        let p = pr(11);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let a = Point::from_index(p, 3, rng.gen_range(0..1331));
            let b = Point::from_index(p, 3, rng.gen_range(0..1331));
            assert_eq!(dist(p, &a, &b).unwrap(), dist(p, &b, &a).unwrap());
        }
    }

    #[test]
    fn sphere_examples() {
        let p3 = pr(3);
        let s = sphere_points(SphereSpec { t: Scalar(1), d: 2, prime: p3 }).unwrap();
        let mut got: Vec<String> = s.iter().map(|x| x.to_string()).collect();
        got.sort();
        assert_eq!(got, vec!["0,1", "0,2", "1,0", "2,0"]);
        for n in [3, 7, 11, 19] {
            let zero = sphere_points(SphereSpec { t: Scalar(0), d: 2, prime: pr(n) }).unwrap();
            assert_eq!(zero, vec![Point::origin(2)]);
        }
        assert_eq!(sphere_points(SphereSpec { t: Scalar(1), d: 2, prime: pr(7) }).unwrap().len(), 8);
        assert!(matches!(
            sphere_points(SphereSpec { t: Scalar(1), d: 9, prime: pr(7) }),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn sphere_formula_examples() {
        let f = |n, d, t| sphere_size_formula(SphereSpec { t: Scalar(t), d, prime: pr(n) });
        assert_eq!(f(7, 2, 3).unwrap(), 8);
        assert_eq!(f(3, 2, 0).unwrap(), 1);
        assert_eq!(f(5, 2, 2).unwrap(), 4);
        assert_eq!(f(5, 3, 2), Err(Error::OddDimension(3)));
    }

    #[test]
    fn sphere_formula_matches_enumeration() {
        for (d, n) in [(2, 3), (2, 5), (2, 7), (2, 11), (2, 13), (2, 19), (4, 3), (4, 5)] {
            let prime = pr(n);
            let mut total = 0u128;
            for t in prime.elements() {
                let spec = SphereSpec { t, d, prime };
                let size = sphere_points(spec).unwrap().len() as u128;
                assert_eq!(size, sphere_size_formula(spec).unwrap(), "d={d} p={n} t={t}");
                total += size;
            }
            assert_eq!(total, space_size(prime, d).unwrap());
        }
    }

    #[test]
    fn sphere_sizes_partition_odd_dimensions() {
        for (d, n) in [(1, 7), (3, 3), (3, 5), (3, 7)] {
            let prime = pr(n);
            let total: usize = prime
                .elements()
                .map(|t| sphere_points(SphereSpec { t, d, prime }).unwrap().len())
                .sum();
            assert_eq!(total as u128, space_size(prime, d).unwrap());
        }
    }

    #[test]
    fn null_vectors_only_at_origin_when_p_3_mod_4() {
        for n in [3, 7, 11, 19] {
            let prime = pr(n);
            let full = PointSet::full_space(prime, 2).unwrap();
            for x in full.points() {
                assert_eq!(norm(prime, x).is_zero(), x.is_origin());
            }
            assert_eq!(full.table().null_pairs(), 0);
        }
        let full13 = PointSet::full_space(pr(13), 2).unwrap();
        assert!(full13.table().null_pairs() > 0);
    }

    #[test]
    fn distance_and_quotient_examples() {
        let p7 = pr(7);
        let one = PointSet::new(p7, 2, vec![pt(p7, &[2, 5])]).unwrap();
        assert_eq!(distance_set(&one).into_iter().collect::<Vec<_>>(), vec![Scalar(0)]);
        assert_eq!(quotient_set(&one), Err(Error::NoNonzeroDistance));

        let full3 = PointSet::full_space(pr(3), 2).unwrap();
        let all3: Vec<Scalar> = pr(3).elements().collect();
        assert_eq!(distance_set(&full3).into_iter().collect::<Vec<_>>(), all3);
        assert_eq!(quotient_set(&full3).unwrap().into_iter().collect::<Vec<_>>(), all3);

        let two = PointSet::new(p7, 2, vec![pt(p7, &[0, 0]), pt(p7, &[1, 0])]).unwrap();
        assert_eq!(distance_set(&two).into_iter().collect::<Vec<_>>(), vec![Scalar(0), Scalar(1)]);
        assert_eq!(quotient_set(&two).unwrap().into_iter().collect::<Vec<_>>(), vec![Scalar(0), Scalar(1)]);
    }

    #[test]
    fn dense_random_sets_have_full_quotient() {
        let p7 = pr(7);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let e = PointSet::random(p7, 2, 45, &mut rng).unwrap();
            assert_eq!(quotient_set(&e).unwrap().len(), 7);
        }
    }

    #[test]
    fn parse_and_print() {
        let text = "p=7 d=2\n0,0\n1,0\n";
        let e = PointSet::parse(text).unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.to_text(), text);
        assert!(matches!(PointSet::parse("p=7 d=2\n0,0\n0,0\n"), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(PointSet::parse("p=7 d=2\n0,7\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(PointSet::parse("p=9 d=2\n0,1\n"), Err(Error::NotPrime(9))));
        assert!(matches!(PointSet::parse("p=7\n0,1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(PointSet::parse("p=7 d=2\n0,1,2\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn random_respects_space() {
        let p7 = pr(7);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(
            PointSet::random(p7, 2, 50, &mut rng),
            Err(Error::SizeExceedsSpace { size: 50, space: 49 })
        );
        let e = PointSet::random(p7, 2, 49, &mut rng).unwrap();
        assert_eq!(e, PointSet::full_space(p7, 2).unwrap());
    }

    #[test]
    fn buckets_partition_each_row() {
        let e = PointSet::full_space(pr(5), 2).unwrap();
        let t = e.table();
        for i in 0..e.len() {
            let total: usize = pr(5).elements().map(|s| t.bucket(i, s).len()).sum();
            assert_eq!(total, e.len());
            for s in pr(5).elements() {
                for &j in t.bucket(i, s) {
                    assert_eq!(e.dist(i, j as usize), s);
                }
            }
        }
    }
}
