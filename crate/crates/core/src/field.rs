//! Arithmetic in the prime field F_p.
//!
//! Elements are stored as canonical residues in `[0, p)`. A [`Prime`] is a
//! small `Copy` context that carries the modulus and a couple of residue-class
//! facts; all arithmetic goes through it so that [`Scalar`] stays a bare
//! `u32`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An element of F_p in canonical form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(transparent)]
#[serde(transparent)]
pub struct Scalar(pub(crate) u32);

impl Scalar {
    pub const ZERO: Scalar = Scalar(0);
    pub const ONE: Scalar = Scalar(1);

    #[inline]
    pub fn value(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl std::fmt::Display for Scalar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An odd prime modulus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Prime {
    p: u32,
    p_mod_4: u8,
    legendre_minus_one: i8,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

impl Prime {
    /// Validates `n` as an odd prime below 2^31.
    pub fn new(n: u64) -> Result<Prime> {
        if n == 2 {
            return Err(Error::EvenPrime);
        }
        if n >= 1 << 31 || !is_prime(n) {
            return Err(Error::NotPrime(n));
        }
        let p = n as u32;
        let p_mod_4 = (p % 4) as u8;
        Ok(Prime {
            p,
            p_mod_4,
            legendre_minus_one: if p_mod_4 == 1 { 1 } else { -1 },
        })
    }

    #[inline]
    pub fn p(self) -> u32 {
        self.p
    }

    pub fn p_mod_4(self) -> u8 {
        self.p_mod_4
    }

    /// η(−1): +1 iff p ≡ 1 (mod 4).
    pub fn legendre_minus_one(self) -> i8 {
        self.legendre_minus_one
    }

    /// Reduces an arbitrary integer into canonical form.
    #[inline]
    pub fn scalar(self, v: i64) -> Scalar {
        Scalar(v.rem_euclid(self.p as i64) as u32)
    }

    /// Accepts only an already-canonical residue.
    pub fn checked_scalar(self, v: u64) -> Result<Scalar> {
        if v < self.p as u64 {
            Ok(Scalar(v as u32))
        } else {
            Err(Error::Invalid(format!("{v} is not a canonical residue mod {}", self.p)))
        }
    }

    pub fn elements(self) -> impl Iterator<Item = Scalar> {
        (0..self.p).map(Scalar)
    }

    pub fn nonzero_elements(self) -> impl Iterator<Item = Scalar> {
        (1..self.p).map(Scalar)
    }

    #[inline]
    pub fn add(self, a: Scalar, b: Scalar) -> Scalar {
        let s = a.0 as u64 + b.0 as u64;
        Scalar((s % self.p as u64) as u32)
    }

    #[inline]
    pub fn sub(self, a: Scalar, b: Scalar) -> Scalar {
        let s = a.0 as u64 + self.p as u64 - b.0 as u64;
        Scalar((s % self.p as u64) as u32)
    }

    #[inline]
    pub fn neg(self, a: Scalar) -> Scalar {
        if a.0 == 0 {
            a
        } else {
            Scalar(self.p - a.0)
        }
    }

    #[inline]
    pub fn mul(self, a: Scalar, b: Scalar) -> Scalar {
        Scalar(((a.0 as u64 * b.0 as u64) % self.p as u64) as u32)
    }

    pub fn pow(self, a: Scalar, mut e: u64) -> Scalar {
        let p = self.p as u64;
        let mut base = a.0 as u64 % p;
        let mut acc = 1 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        Scalar(acc as u32)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(self, a: Scalar) -> Option<Scalar> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.p as u64 - 2))
        }
    }

    /// Legendre symbol (a/p) via Euler's criterion.
    pub fn legendre(self, a: Scalar) -> i8 {
        if a.is_zero() {
            return 0;
        }
        if self.pow(a, (self.p as u64 - 1) / 2).0 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn is_square(self, a: Scalar) -> bool {
        self.legendre(a) >= 0
    }

    /// Square root of `a`, returning the smaller of the two roots.
    pub fn sqrt(self, a: Scalar) -> Result<Scalar> {
        if a.is_zero() {
            return Ok(Scalar::ZERO);
        }
        if self.legendre(a) != 1 {
            return Err(Error::NotASquare { value: a.0, p: self.p });
        }
        let root = if self.p_mod_4 == 3 {
            self.pow(a, (self.p as u64 + 1) / 4)
        } else {
            self.tonelli_shanks(a)
        };
        let other = self.neg(root);
        Ok(root.min(other))
    }

    /// Tonelli–Shanks for a nonzero quadratic residue.
    pub(crate) fn tonelli_shanks(self, a: Scalar) -> Scalar {
        let p = self.p as u64;
        let mut q = p - 1;
        let mut s = 0u32;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let z = self
            .nonzero_elements()
            .find(|&z| self.legendre(z) == -1)
            .expect("odd prime has a nonresidue");
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, q.div_ceil(2));
        while t.0 != 1 {
            // least i with t^(2^i) = 1
            let mut i = 0;
            let mut tt = t;
            while tt.0 != 1 {
                tt = self.mul(tt, tt);
                i += 1;
            }
            let b = self.pow(c, 1u64 << (m - i - 1));
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        r
    }

    /// The set {a² : a ∈ F_p}, sorted, including zero.
    pub fn squares(self) -> Vec<Scalar> {
        let mut seen = vec![false; self.p as usize];
        for a in self.elements() {
            seen[self.mul(a, a).0 as usize] = true;
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(v, _)| Scalar(v as u32))
            .collect()
    }

    pub fn nonzero_squares(self) -> Vec<Scalar> {
        self.squares().into_iter().filter(|s| !s.is_zero()).collect()
    }
}

/// A nonzero dilation ratio with its squareness cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    r: Scalar,
    sqrt_r: Option<Scalar>,
}

impl Ratio {
    pub fn new(prime: Prime, r: Scalar) -> Result<Ratio> {
        if r.is_zero() {
            return Err(Error::ZeroRatio);
        }
        Ok(Ratio { r, sqrt_r: prime.sqrt(r).ok() })
    }

    pub fn from_int(prime: Prime, r: u64) -> Result<Ratio> {
        Ratio::new(prime, prime.checked_scalar(r)?)
    }

    pub fn value(self) -> Scalar {
        self.r
    }

    pub fn is_square(self) -> bool {
        self.sqrt_r.is_some()
    }

    /// Canonical square root, present iff the ratio is a square.
    pub fn sqrt(self) -> Option<Scalar> {
        self.sqrt_r
    }

    pub(crate) fn require_sqrt(self, prime: Prime) -> Result<Scalar> {
        self.sqrt_r.ok_or(Error::NotASquareRatio { r: self.r.0, p: prime.p() })
    }

    /// Every nonzero ratio, in increasing order.
    pub fn all(prime: Prime) -> Vec<Ratio> {
        prime.nonzero_elements().map(|r| Ratio::new(prime, r).unwrap()).collect()
    }

    pub fn squares(prime: Prime) -> Vec<Ratio> {
        Ratio::all(prime).into_iter().filter(|r| r.is_square()).collect()
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.r)
    }
}

impl std::fmt::Display for Prime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL_PRIMES: [u64; 10] = [3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

    #[test]
    fn make_prime_examples() {
        let p7 = Prime::new(7).unwrap();
        assert_eq!(p7.p_mod_4(), 3);
        assert_eq!(p7.legendre_minus_one(), -1);
        let p5 = Prime::new(5).unwrap();
        assert_eq!(p5.p_mod_4(), 1);
        assert_eq!(p5.legendre_minus_one(), 1);
        assert_eq!(Prime::new(9), Err(Error::NotPrime(9)));
        assert_eq!(Prime::new(2), Err(Error::EvenPrime));
        assert_eq!(Prime::new(1), Err(Error::NotPrime(1)));
    }

    #[test]
    fn legendre_examples() {
        let p = Prime::new(7).unwrap();
        assert_eq!(p.legendre(Scalar(6)), -1);
        assert_eq!(p.legendre(Scalar(0)), 0);
        assert_eq!(p.legendre(Scalar(2)), 1);
    }

    #[test]
    fn sqrt_examples() {
        let p = Prime::new(7).unwrap();
        assert_eq!(p.sqrt(Scalar(4)).unwrap(), Scalar(2));
        assert_eq!(p.sqrt(Scalar(0)).unwrap(), Scalar(0));
        assert_eq!(p.sqrt(Scalar(2)).unwrap(), Scalar(3));
        assert_eq!(p.sqrt(Scalar(3)), Err(Error::NotASquare { value: 3, p: 7 }));
    }

    #[test]
    fn squares_examples() {
        let sq = |n| Prime::new(n).unwrap().squares().iter().map(|s| s.0).collect::<Vec<_>>();
        assert_eq!(sq(3), vec![0, 1]);
        assert_eq!(sq(7), vec![0, 1, 2, 4]);
        for n in [3u64, 5, 7, 11] {
            assert_eq!(sq(n).len() as u64, n.div_ceil(2));
        }
    }

    #[test]
    fn legendre_is_multiplicative() {
        for n in SMALL_PRIMES {
            let p = Prime::new(n).unwrap();
            for a in p.nonzero_elements() {
                for b in p.nonzero_elements() {
                    assert_eq!(p.legendre(p.mul(a, b)), p.legendre(a) * p.legendre(b));
                }
            }
        }
    }

    #[test]
    fn legendre_matches_enumerated_squares() {
        for n in SMALL_PRIMES {
            let p = Prime::new(n).unwrap();
            let sq = p.squares();
            for a in p.nonzero_elements() {
                assert_eq!(p.legendre(a) == 1, sq.contains(&a), "p={n} a={a}");
            }
        }
    }

    #[test]
    fn sqrt_roundtrips_on_all_squares() {
        for n in SMALL_PRIMES {
            let p = Prime::new(n).unwrap();
            for a in p.squares() {
                let s = p.sqrt(a).unwrap();
                assert_eq!(p.mul(s, s), a);
                assert!(s.0 <= (p.p() - 1) / 2);
            }
        }
    }

    #[test]
    fn fast_path_agrees_with_tonelli_shanks() {
        for n in SMALL_PRIMES.iter().filter(|&&n| n % 4 == 3) {
            let p = Prime::new(*n).unwrap();
            for a in p.nonzero_squares() {
                let fast = p.pow(a, (p.p() as u64 + 1) / 4);
                let general = p.tonelli_shanks(a);
                assert!(fast == general || fast == p.neg(general));
            }
        }
    }

    #[test]
    fn ratio_caches_root() {
        let p = Prime::new(7).unwrap();
        let two = Ratio::from_int(p, 2).unwrap();
        assert!(two.is_square());
        assert_eq!(two.sqrt(), Some(Scalar(3)));
        let three = Ratio::from_int(p, 3).unwrap();
        assert!(!three.is_square());
        assert_eq!(Ratio::from_int(p, 0), Err(Error::ZeroRatio));
        assert_eq!(Ratio::squares(p).len(), 3);
    }

    #[test]
    fn inverse_and_arithmetic() {
        let p = Prime::new(13).unwrap();
        for a in p.nonzero_elements() {
            assert_eq!(p.mul(a, p.inv(a).unwrap()), Scalar::ONE);
            assert_eq!(p.add(a, p.neg(a)), Scalar::ZERO);
            assert_eq!(p.sub(a, a), Scalar::ZERO);
        }
        assert_eq!(p.inv(Scalar::ZERO), None);
        assert_eq!(p.scalar(-1), Scalar(12));
    }
}
