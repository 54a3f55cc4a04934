//! Quadratic fields Q(sqrt(d)), their rings of integers, exact signatures
//! and the unit residues modulo 4.
//!
//! Elements are stored as integer coordinates with respect to the integral
//! basis {1, w}, where w = sqrt(d) for d = 2, 3 mod 4 and w = (1+sqrt(d))/2
//! for d = 1 mod 4. The rational field is carried along as a degenerate
//! degree-1 case so capitulation maps and the classical supplementary-law
//! examples run through the same pipeline.
//!
//! No floating point is used anywhere: real-embedding signs are decided by
//! comparing x^2 against d*y^2 as integers.

use crate::arith::{exact_sqrt, is_squarefree};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    /// The rational field, degree 1.
    Rational,
    /// Q(sqrt(d)) for a squarefree d different from 0 and 1.
    Quadratic { d: i64 },
}

/// The ambient number field together with lazily built per-field data
/// (principal cycles, class groups, unit and Selmer structures). All data is
/// immutable once computed, so a `QuadField` can be shared by reference
/// across worker threads.
pub struct QuadField {
    kind: FieldKind,
    delta: i64,
    r: usize,
    s: usize,
    n: usize,
    /// Trace of w: 0 for sqrt(d), 1 for (1+sqrt(d))/2, 0 for Q.
    t: i64,
    /// Constant term in w^2 = t*w + m: d resp. (d-1)/4, 0 for Q.
    m: i64,
    pub(crate) caches: FieldCaches,
}

#[derive(Default)]
pub(crate) struct FieldCaches {
    pub(crate) mod4: OnceLock<Result<Mod4Data>>,
    pub(crate) cycles: OnceLock<Result<crate::forms::PrincipalCycles>>,
    pub(crate) narrow: OnceLock<Result<crate::classgroup::ClassGroupData>>,
    pub(crate) ordinary: OnceLock<Result<crate::classgroup::ClassGroupData>>,
    pub(crate) units: OnceLock<Result<crate::unit::UnitData>>,
    pub(crate) selmer: OnceLock<Result<crate::selmer::SelmerSpace>>,
}

impl fmt::Debug for QuadField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FieldKind::Rational => write!(f, "Q"),
            FieldKind::Quadratic { d } => write!(f, "Q(sqrt({d}))"),
        }
    }
}

impl PartialEq for QuadField {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl QuadField {
    /// The quadratic field Q(sqrt(d)) for squarefree d, d not in {0, 1}.
    pub fn new(d: i64) -> Result<QuadField> {
        if d == 0 || d == 1 {
            return Err(Error::domain(format!("d = {d} does not define a quadratic field")));
        }
        if !is_squarefree(d) {
            return Err(Error::domain(format!("d = {d} is not squarefree")));
        }
        let d_mod4 = d.rem_euclid(4);
        let (delta, t, m) = if d_mod4 == 1 {
            (d, 1, (d - 1) / 4)
        } else {
            (4 * d, 0, d)
        };
        let (r, s) = if d > 0 { (2, 0) } else { (0, 1) };
        Ok(QuadField {
            kind: FieldKind::Quadratic { d },
            delta,
            r,
            s,
            n: 2,
            t,
            m,
            caches: FieldCaches::default(),
        })
    }

    /// The rational field as a degenerate degree-1 case.
    pub fn rational() -> QuadField {
        QuadField {
            kind: FieldKind::Rational,
            delta: 1,
            r: 1,
            s: 0,
            n: 1,
            t: 0,
            m: 0,
            caches: FieldCaches::default(),
        }
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.kind, FieldKind::Rational)
    }

    /// The squarefree d, or None for the rational field.
    pub fn d(&self) -> Option<i64> {
        match self.kind {
            FieldKind::Rational => None,
            FieldKind::Quadratic { d } => Some(d),
        }
    }

    /// Field discriminant: d for d = 1 mod 4, else 4d (1 for Q).
    pub fn delta(&self) -> i64 {
        self.delta
    }

    /// Number of real places.
    pub fn real_places(&self) -> usize {
        self.r
    }

    /// Number of complex places.
    pub fn complex_places(&self) -> usize {
        self.s
    }

    /// Degree over Q.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn is_real_quadratic(&self) -> bool {
        matches!(self.kind, FieldKind::Quadratic { d } if d > 0)
    }

    pub fn is_imaginary(&self) -> bool {
        matches!(self.kind, FieldKind::Quadratic { d } if d < 0)
    }

    /// Trace of the basis generator w.
    pub fn omega_trace(&self) -> i64 {
        self.t
    }

    /// Constant term of w^2 = t*w + m.
    pub fn omega_const(&self) -> i64 {
        self.m
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::from_i64(0, 0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement::from_i64(1, 0)
    }

    pub fn integer(&self, n: i64) -> FieldElement {
        FieldElement::from_i64(n, 0)
    }

    /// The element sqrt(d): w itself for d = 2,3 mod 4, 2w - 1 for d = 1 mod 4.
    pub fn sqrt_d(&self) -> Result<FieldElement> {
        match self.kind {
            FieldKind::Rational => Err(Error::domain("sqrt(d) needs a quadratic field")),
            FieldKind::Quadratic { .. } => {
                if self.t == 1 {
                    Ok(FieldElement::from_i64(-1, 2))
                } else {
                    Ok(FieldElement::from_i64(0, 1))
                }
            }
        }
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            x: &a.x + &b.x,
            y: &a.y + &b.y,
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            x: &a.x - &b.x,
            y: &a.y - &b.y,
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            x: -&a.x,
            y: -&a.y,
        }
    }

    /// (x1 + y1 w)(x2 + y2 w) with w^2 = t*w + m.
    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let yy = &a.y * &b.y;
        let x = &a.x * &b.x + BigInt::from(self.m) * &yy;
        let y = &a.x * &b.y + &a.y * &b.x + BigInt::from(self.t) * yy;
        FieldElement { x, y }
    }

    /// The nontrivial automorphism: x + y*w maps to (x + t*y) - y*w.
    /// Identity on the rational field.
    pub fn conj(&self, a: &FieldElement) -> FieldElement {
        if self.is_rational() {
            return a.clone();
        }
        FieldElement {
            x: &a.x + BigInt::from(self.t) * &a.y,
            y: -&a.y,
        }
    }

    /// Field norm: x^2 + t*x*y - m*y^2 for quadratic fields, x for Q.
    pub fn norm(&self, a: &FieldElement) -> BigInt {
        if self.is_rational() {
            return a.x.clone();
        }
        &a.x * &a.x + BigInt::from(self.t) * &a.x * &a.y - BigInt::from(self.m) * &a.y * &a.y
    }

    pub fn trace(&self, a: &FieldElement) -> BigInt {
        if self.is_rational() {
            return a.x.clone();
        }
        BigInt::from(2) * &a.x + BigInt::from(self.t) * &a.y
    }

    pub fn pow(&self, a: &FieldElement, e: u32) -> FieldElement {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn has_odd_norm(&self, a: &FieldElement) -> bool {
        self.norm(a).is_odd()
    }

    /// Exact division a/b in F, provided the quotient is integral.
    pub fn div_exact(&self, a: &FieldElement, b: &FieldElement) -> Option<FieldElement> {
        if b.is_zero() {
            return None;
        }
        if self.is_rational() {
            let (q, r) = a.x.div_rem(&b.x);
            return if r.is_zero() {
                Some(FieldElement { x: q, y: BigInt::zero() })
            } else {
                None
            };
        }
        // a/b = a * conj(b) / N(b)
        let num = self.mul(a, &self.conj(b));
        let nb = self.norm(b);
        let (qx, rx) = num.x.div_rem(&nb);
        let (qy, ry) = num.y.div_rem(&nb);
        if rx.is_zero() && ry.is_zero() {
            Some(FieldElement { x: qx, y: qy })
        } else {
            None
        }
    }

    /// Sign vector of a nonzero element under the real embeddings, bit i set
    /// iff the i-th embedding is negative. Embedding order is fixed globally:
    /// sqrt(d) -> +sqrt(d) first, sqrt(d) -> -sqrt(d) second. Imaginary
    /// fields give the empty vector.
    pub fn signature(&self, a: &FieldElement) -> Result<Vec<bool>> {
        if a.is_zero() {
            return Err(Error::domain("signature of zero"));
        }
        match self.kind {
            FieldKind::Rational => Ok(vec![a.x.is_negative()]),
            FieldKind::Quadratic { d } => {
                if d < 0 {
                    return Ok(vec![]);
                }
                // halved coordinates: a = (X + Y sqrt(d)) / 2
                let (xx, yy) = self.halved_coords(a);
                Ok(vec![
                    !sign_x_plus_y_sqrt_d(&xx, &yy, d),
                    !sign_x_plus_y_sqrt_d(&xx, &(-&yy), d),
                ])
            }
        }
    }

    pub fn is_totally_positive(&self, a: &FieldElement) -> Result<bool> {
        Ok(self.signature(a)?.iter().all(|&b| !b))
    }

    /// Coordinates (X, Y) with a = (X + Y sqrt(d)) / 2.
    fn halved_coords(&self, a: &FieldElement) -> (BigInt, BigInt) {
        if self.t == 1 {
            (BigInt::from(2) * &a.x + &a.y, a.y.clone())
        } else {
            (BigInt::from(2) * &a.x, BigInt::from(2) * &a.y)
        }
    }

    /// Exact test for membership in the square of the multiplicative group:
    /// is there beta in F with beta^2 = a? For integral a this is equivalent
    /// to having an integral square root.
    pub fn is_square(&self, a: &FieldElement) -> bool {
        if a.is_zero() {
            return true;
        }
        if self.is_rational() {
            return !a.x.is_negative() && exact_sqrt(&a.x).is_some();
        }
        let FieldKind::Quadratic { d } = self.kind else { unreachable!() };
        let dd = BigInt::from(d);
        let two = BigInt::from(2);
        let (xx, yy) = self.halved_coords(a);
        // With a = (X + Y sqrt(d))/2, a square root beta = (U + V sqrt(d))/2
        // (U = V mod 2) satisfies U^2 + d V^2 = 2X and U V = Y, and its norm
        // (U^2 - d V^2)/4 squares to N(a) = (X^2 - d Y^2)/4. So n2 below is
        // |U^2 - d V^2| and 2 U^2 = 2X +- n2.
        let n4 = &xx * &xx - &dd * &yy * &yy;
        let Some(n2) = exact_sqrt(&(BigInt::from(4) * n4)) else {
            return false;
        };
        for sgn in [1i64, -1] {
            let rhs = &two * &xx + BigInt::from(sgn) * &n2;
            let (u2, rem) = rhs.div_rem(&two);
            if !rem.is_zero() || u2.is_negative() {
                continue;
            }
            let Some(u) = exact_sqrt(&u2) else { continue };
            if u.is_zero() {
                // beta = V sqrt(d) / 2: need Y = 0 and d V^2 = 2X
                if !yy.is_zero() {
                    continue;
                }
                let (v2, rem) = (&two * &xx).div_rem(&dd);
                if !rem.is_zero() || v2.is_negative() {
                    continue;
                }
                let Some(v) = exact_sqrt(&v2) else { continue };
                if self.check_sqrt(&u, &v, a) {
                    return true;
                }
                continue;
            }
            let (v, rem) = yy.div_rem(&u);
            if !rem.is_zero() {
                continue;
            }
            if self.check_sqrt(&u, &v, a) {
                return true;
            }
        }
        false
    }

    /// Verify ((U + V sqrt(d))/2)^2 = a, demanding integrality of the root.
    fn check_sqrt(&self, u: &BigInt, v: &BigInt, a: &FieldElement) -> bool {
        let two = BigInt::from(2);
        let beta = if self.t == 1 {
            if (u - v).is_odd() {
                return false;
            }
            FieldElement {
                x: (u - v).div_rem(&two).0,
                y: v.clone(),
            }
        } else {
            if u.is_odd() || v.is_odd() {
                return false;
            }
            FieldElement {
                x: u.div_rem(&two).0,
                y: v.div_rem(&two).0,
            }
        };
        self.mul(&beta, &beta) == *a
    }

    /// True iff a and b generate the same class of F^x / (F^x)^2.
    pub fn same_square_class(&self, a: &FieldElement, b: &FieldElement) -> bool {
        self.is_square(&self.mul(a, b))
    }

    /// Residues modulo 4 with odd norm, their squares and a basis of the
    /// square-class quotient. Built once per field by enumeration.
    pub fn mod4_data(&self) -> Result<&Mod4Data> {
        self.caches
            .mod4
            .get_or_init(|| Mod4Data::build(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// True iff a is congruent to the square of an odd element modulo 4.
    /// The element must have odd norm.
    pub fn is_square_mod4(&self, a: &FieldElement) -> Result<bool> {
        if !self.has_odd_norm(a) {
            return Err(Error::domain("is_square_mod4 needs an element of odd norm"));
        }
        let data = self.mod4_data()?;
        Ok(data.square_set.contains(&reduce4(a)))
    }

    /// Coordinates of a modulo squares in the basis stored in Mod4Data:
    /// a = b1^e1 * ... * bn^en * xi^2 mod 4. Length equals the field degree.
    pub fn mod4_coords(&self, a: &FieldElement) -> Result<Vec<bool>> {
        if !self.has_odd_norm(a) {
            return Err(Error::domain("mod4_coords needs an element of odd norm"));
        }
        let data = self.mod4_data()?;
        let ra = reduce4(a);
        for mask in 0..(1u32 << data.dim) {
            let mut prod = ra.clone();
            for (i, b) in data.basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    prod = reduce4(&self.mul(&prod, b));
                }
            }
            if data.square_set.contains(&prod) {
                return Ok((0..data.dim).map(|i| mask >> i & 1 == 1).collect());
            }
        }
        Err(Error::theorem(
            "mod4 square classes failed to cover a unit residue",
        ))
    }
}

fn sign_x_plus_y_sqrt_d(x: &BigInt, y: &BigInt, d: i64) -> bool {
    // true iff x + y sqrt(d) > 0 (d > 0, not both zero)
    let d = BigInt::from(d);
    match (x.sign(), y.sign()) {
        (num_bigint::Sign::NoSign, _) => y.is_positive(),
        (_, num_bigint::Sign::NoSign) => x.is_positive(),
        (num_bigint::Sign::Plus, num_bigint::Sign::Plus) => true,
        (num_bigint::Sign::Minus, num_bigint::Sign::Minus) => false,
        (num_bigint::Sign::Plus, num_bigint::Sign::Minus) => x * x > y * y * d,
        (num_bigint::Sign::Minus, num_bigint::Sign::Plus) => x * x < y * y * d,
    }
}

/// Exact element x + y*w of the ring of integers, coordinates in the
/// integral basis {1, w}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    pub x: BigInt,
    pub y: BigInt,
}

impl FieldElement {
    pub fn new(x: BigInt, y: BigInt) -> Self {
        FieldElement { x, y }
    }

    pub fn from_i64(x: i64, y: i64) -> Self {
        FieldElement {
            x: BigInt::from(x),
            y: BigInt::from(y),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.x.is_one() && self.y.is_zero()
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.x, self.y)
    }
}

fn reduce4(a: &FieldElement) -> FieldElement {
    let four = BigInt::from(4);
    FieldElement {
        x: a.x.mod_floor(&four),
        y: a.y.mod_floor(&four),
    }
}

/// The odd residues modulo 4*O_F, the subgroup of squares, and a basis of
/// the quotient; the quotient dimension always equals the field degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mod4Data {
    pub unit_residues: Vec<FieldElement>,
    pub squares: Vec<FieldElement>,
    pub basis: Vec<FieldElement>,
    pub dim: usize,
    square_set: std::collections::HashSet<FieldElement>,
}

impl Mod4Data {
    fn build(field: &QuadField) -> Result<Mod4Data> {
        let y_range = if field.is_rational() { 1 } else { 4 };
        let mut units = Vec::new();
        for x in 0..4i64 {
            for y in 0..y_range {
                let r = FieldElement::from_i64(x, y);
                if field.norm(&r).is_odd() {
                    units.push(r);
                }
            }
        }
        let mut square_set = std::collections::HashSet::new();
        for u in &units {
            square_set.insert(reduce4(&field.mul(u, u)));
        }
        let mut squares: Vec<FieldElement> = square_set.iter().cloned().collect();
        squares.sort_by(|a, b| (&a.x, &a.y).cmp(&(&b.x, &b.y)));

        // greedy basis of the square-class quotient
        let mut span: std::collections::HashSet<FieldElement> = square_set.clone();
        let mut basis = Vec::new();
        for u in &units {
            if span.contains(u) {
                continue;
            }
            basis.push(u.clone());
            let extra: Vec<FieldElement> = span
                .iter()
                .map(|s| reduce4(&field.mul(u, s)))
                .collect();
            span.extend(extra);
        }
        if span.len() != units.len() || basis.len() != field.degree() {
            return Err(Error::theorem(format!(
                "mod-4 square classes of {:?}: got dimension {}, expected degree {}",
                field,
                basis.len(),
                field.degree()
            )));
        }
        Ok(Mod4Data {
            unit_residues: units,
            squares,
            basis,
            dim: field.degree(),
            square_set,
        })
    }
}
