//! The orthogonal groups O_d(F_p) and SO_2(F_p): enumeration, closed-form
//! orders, and the rotation taking one vector onto a dilate of another.

use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::field::{Prime, Ratio, Scalar};
use crate::geometry::{norm, sphere_points, Point, SphereSpec};
use crate::limits::{guard, sat_pow, GROUP_SEARCH_LIMIT};

/// A d×d matrix θ over F_p with θᵀθ = I, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrthMatrix {
    d: usize,
    entries: Vec<Scalar>,
    det: Scalar,
}

fn mat_mul(prime: Prime, d: usize, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            let mut acc = Scalar::ZERO;
            for k in 0..d {
                acc = prime.add(acc, prime.mul(a[i * d + k], b[k * d + j]));
            }
            out[i * d + j] = acc;
        }
    }
    out
}

fn transpose(d: usize, a: &[Scalar]) -> Vec<Scalar> {
    let mut out = vec![Scalar::ZERO; d * d];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = a[i * d + j];
        }
    }
    out
}

fn identity(d: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::ZERO; d * d];
    for i in 0..d {
        out[i * d + i] = Scalar::ONE;
    }
    out
}

/// Determinant by Gaussian elimination over F_p.
fn determinant(prime: Prime, d: usize, a: &[Scalar]) -> Scalar {
    let mut m = a.to_vec();
    let mut det = Scalar::ONE;
    for col in 0..d {
        let Some(pivot) = (col..d).find(|&r| !m[r * d + col].is_zero()) else {
            return Scalar::ZERO;
        };
        if pivot != col {
            for k in 0..d {
                m.swap(pivot * d + k, col * d + k);
            }
            det = prime.neg(det);
        }
        let pv = m[col * d + col];
        det = prime.mul(det, pv);
        let inv = prime.inv(pv).expect("nonzero pivot");
        for r in col + 1..d {
            let factor = prime.mul(m[r * d + col], inv);
            if factor.is_zero() {
                continue;
            }
            for k in col..d {
                let sub = prime.mul(factor, m[col * d + k]);
                m[r * d + k] = prime.sub(m[r * d + k], sub);
            }
        }
    }
    det
}

impl OrthMatrix {
    /// Validates θᵀθ = I and records the determinant.
    pub fn new(prime: Prime, d: usize, entries: Vec<Scalar>) -> Result<OrthMatrix> {
        if entries.len() != d * d {
            return Err(Error::DimensionMismatch { expected: d * d, got: entries.len() });
        }
        if mat_mul(prime, d, &transpose(d, &entries), &entries) != identity(d) {
            return Err(Error::NotOrthogonal);
        }
        let det = determinant(prime, d, &entries);
        Ok(OrthMatrix { d, entries, det })
    }

    pub fn from_ints(prime: Prime, d: usize, entries: &[i64]) -> Result<OrthMatrix> {
        OrthMatrix::new(prime, d, entries.iter().map(|&v| prime.scalar(v)).collect())
    }

    pub fn identity(d: usize) -> OrthMatrix {
        OrthMatrix { d, entries: identity(d), det: Scalar::ONE }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Scalar {
        self.entries[i * self.d + j]
    }

    pub fn det(&self) -> Scalar {
        self.det
    }

    pub fn is_rotation(&self) -> bool {
        self.det == Scalar::ONE
    }

    pub fn compose(&self, prime: Prime, other: &OrthMatrix) -> OrthMatrix {
        OrthMatrix {
            d: self.d,
            entries: mat_mul(prime, self.d, &self.entries, &other.entries),
            det: prime.mul(self.det, other.det),
        }
    }

    /// θ⁻¹ = θᵀ.
    pub fn inverse(&self) -> OrthMatrix {
        OrthMatrix { d: self.d, entries: transpose(self.d, &self.entries), det: self.det }
    }

    pub fn apply(&self, prime: Prime, v: &Point) -> Result<Point> {
        scaled_apply(prime, self, Scalar::ONE, v)
    }
}

/// s·θ·v. The result satisfies ‖s θ v‖ = s²‖v‖.
pub fn scaled_apply(prime: Prime, theta: &OrthMatrix, s: Scalar, v: &Point) -> Result<Point> {
    let d = theta.d;
    if v.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: v.dim() });
    }
    let c = v.coords();
    let coords = (0..d)
        .map(|i| {
            let row = (0..d).fold(Scalar::ZERO, |acc, k| prime.add(acc, prime.mul(theta.entries[i * d + k], c[k])));
            prime.mul(s, row)
        })
        .collect();
    Ok(Point::new(coords))
}

/// A finite matrix group, stored as its element list.
#[derive(Debug, Clone)]
pub struct GroupTable {
    prime: Prime,
    d: usize,
    elements: Vec<OrthMatrix>,
}

impl GroupTable {
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[OrthMatrix] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, OrthMatrix> {
        self.elements.iter()
    }

    pub fn contains(&self, theta: &OrthMatrix) -> bool {
        self.elements.contains(theta)
    }

    /// The determinant-one subgroup.
    pub fn rotations(&self) -> GroupTable {
        GroupTable {
            prime: self.prime,
            d: self.d,
            elements: self.elements.iter().filter(|m| m.is_rotation()).cloned().collect(),
        }
    }

    /// Checks identity, inverses and closure under products.
    pub fn is_group(&self) -> bool {
        let set: HashSet<&[Scalar]> = self.elements.iter().map(|m| m.entries.as_slice()).collect();
        if !set.contains(identity(self.d).as_slice()) {
            return false;
        }
        self.elements.iter().all(|a| {
            set.contains(a.inverse().entries.as_slice())
                && self.elements.iter().all(|b| set.contains(a.compose(self.prime, b).entries.as_slice()))
        })
    }
}

fn dot(prime: Prime, a: &Point, b: &Point) -> Scalar {
    a.coords()
        .iter()
        .zip(b.coords())
        .fold(Scalar::ZERO, |acc, (&x, &y)| prime.add(acc, prime.mul(x, y)))
}

/// O_d(F_p) by orthonormal-frame search: columns are chosen one at a time from
/// the unit sphere, each orthogonal to the ones already chosen.
pub fn enumerate_orthogonal(d: usize, prime: Prime) -> Result<GroupTable> {
    if d == 0 {
        return Err(Error::Invalid("dimension must be at least 1".into()));
    }
    let unit = sphere_points(SphereSpec { t: Scalar::ONE, d, prime })?;
    guard("orthonormal frame search", sat_pow(unit.len() as u128, d as u32), GROUP_SEARCH_LIMIT)?;

    let mut elements = Vec::new();
    let mut frame: Vec<&Point> = Vec::with_capacity(d);
    fn extend<'a>(
        prime: Prime,
        d: usize,
        unit: &'a [Point],
        frame: &mut Vec<&'a Point>,
        out: &mut Vec<OrthMatrix>,
    ) {
        if frame.len() == d {
            let mut entries = vec![Scalar::ZERO; d * d];
            for (j, col) in frame.iter().enumerate() {
                for (i, &c) in col.coords().iter().enumerate() {
                    entries[i * d + j] = c;
                }
            }
            let det = determinant(prime, d, &entries);
            out.push(OrthMatrix { d, entries, det });
            return;
        }
        for cand in unit {
            if frame.iter().all(|c| dot(prime, c, cand).is_zero()) {
                frame.push(cand);
                extend(prime, d, unit, frame, out);
                frame.pop();
            }
        }
    }
    extend(prime, d, &unit, &mut frame, &mut elements);
    elements.sort_by(|a, b| a.entries.cmp(&b.entries));
    Ok(GroupTable { prime, d, elements })
}

/// O_d(F_p) by testing every one of the p^{d²} matrices.
pub fn enumerate_orthogonal_brute(d: usize, prime: Prime) -> Result<GroupTable> {
    let total = sat_pow(prime.p() as u128, (d * d) as u32);
    guard("matrix brute force", total, GROUP_SEARCH_LIMIT)?;
    let p = prime.p() as u64;
    let id = identity(d);
    let mut elements = Vec::new();
    let mut entries = vec![Scalar::ZERO; d * d];
    for idx in 0..total as u64 {
        let mut rest = idx;
        for e in entries.iter_mut().rev() {
            *e = Scalar((rest % p) as u32);
            rest /= p;
        }
        if mat_mul(prime, d, &transpose(d, &entries), &entries) == id {
            let det = determinant(prime, d, &entries);
            elements.push(OrthMatrix { d, entries: entries.clone(), det });
        }
    }
    Ok(GroupTable { prime, d, elements })
}

/// SO_2(F_p): the matrices [[a, −b], [b, a]] with a² + b² = 1.
pub fn so2_elements(prime: Prime) -> GroupTable {
    let mut elements = Vec::new();
    for a in prime.elements() {
        for b in prime.elements() {
            if prime.add(prime.mul(a, a), prime.mul(b, b)) == Scalar::ONE {
                elements.push(OrthMatrix { d: 2, entries: vec![a, prime.neg(b), b, a], det: Scalar::ONE });
            }
        }
    }
    elements.sort_by(|a, b| a.entries.cmp(&b.entries));
    GroupTable { prime, d: 2, elements }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderKind {
    /// O_{2n+1}
    Odd,
    /// O⁺_{2n}
    EvenPlus,
    /// O⁻_{2n}
    EvenMinus,
}

/// Closed-form orders of the finite orthogonal groups.
pub fn order_formula(kind: OrderKind, n: u32, prime: Prime) -> BigUint {
    let p = BigUint::from(prime.p());
    let prod = |upto: u32| -> BigUint {
        (1..=upto).fold(BigUint::one(), |acc, i| acc * (p.pow(2 * i) - BigUint::one()))
    };
    let two = BigUint::from(2u32);
    match kind {
        OrderKind::Odd => two * p.pow(n * n) * prod(n),
        OrderKind::EvenPlus => two * p.pow(n * (n.saturating_sub(1))) * (p.pow(n) - BigUint::one()) * prod(n.saturating_sub(1)),
        OrderKind::EvenMinus => two * p.pow(n * (n.saturating_sub(1))) * (p.pow(n) + BigUint::one()) * prod(n.saturating_sub(1)),
    }
}

/// Which family the sum-of-squares form on F_p^d belongs to. In even
/// dimension 2n the form is of plus type iff (−1)^n is a square.
pub fn form_kind(d: usize, prime: Prime) -> (OrderKind, u32) {
    let n = (d / 2) as u32;
    if d % 2 == 1 {
        return (OrderKind::Odd, n);
    }
    let disc_square = n.is_multiple_of(2) || prime.legendre_minus_one() == 1;
    (if disc_square { OrderKind::EvenPlus } else { OrderKind::EvenMinus }, n)
}

/// |O_d(F_p)| for the sum-of-squares form.
pub fn orthogonal_group_order(d: usize, prime: Prime) -> BigUint {
    let (kind, n) = form_kind(d, prime);
    order_formula(kind, n, prime)
}

/// The unique θ ∈ SO_2(F_p) with u = √r·θ·v, built as θ = (1/√r)·U·V⁻¹ from
/// the circulant matrices U = [[u₁, −u₂], [u₂, u₁]] and V likewise.
pub fn rotation_from_pair(prime: Prime, u: &Point, v: &Point, r: Ratio) -> Result<OrthMatrix> {
    if prime.p_mod_4() != 3 {
        return Err(Error::WrongResidueClass(prime.p()));
    }
    for x in [u, v] {
        if x.dim() != 2 {
            return Err(Error::DimensionMismatch { expected: 2, got: x.dim() });
        }
    }
    if u.is_origin() || v.is_origin() {
        return Err(Error::ZeroVector);
    }
    let root = r.require_sqrt(prime)?;
    let (nu, nv) = (norm(prime, u), norm(prime, v));
    let rnv = prime.mul(r.value(), nv);
    if nu != rnv {
        return Err(Error::NormMismatch { lhs: nu.value(), rhs: rnv.value() });
    }
    let [u1, u2] = [u.coords()[0], u.coords()[1]];
    let [v1, v2] = [v.coords()[0], v.coords()[1]];
    let big_u = [u1, prime.neg(u2), u2, u1];
    // V⁻¹ = Vᵀ / ‖v‖ since VᵀV = ‖v‖·I.
    let v_t = [v1, v2, prime.neg(v2), v1];
    let scale = prime.inv(prime.mul(root, nv)).expect("nonzero: p = 3 mod 4 and v != 0");
    let prod = mat_mul(prime, 2, &big_u, &v_t);
    OrthMatrix::new(prime, 2, prod.into_iter().map(|e| prime.mul(e, scale)).collect())
}
