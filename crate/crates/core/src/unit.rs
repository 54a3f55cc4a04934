//! Unit groups: the fundamental unit by continued fractions, and the
//! square-class structure of E with its totally-positive and primary
//! subgroups.
//!
//! The continued fraction of w is driven by the exact (P, Q) recurrence for
//! (P + sqrt(Delta))/Q. When the state first repeats, the two convergent
//! matrices M_j, M_k give a Moebius transformation T = M_k M_j^{-1} fixing
//! w; writing T = [[p, q], [r, s]], the element r*w + s is a unit, and the
//! first repeat yields the fundamental one. Coefficients are kept as big
//! integers throughout.

use crate::error::{Error, Result};
use crate::f2::BitMatrix;
use crate::field::{FieldElement, QuadField};
use num_bigint::BigInt;
use num_traits::{One, Signed};
use std::collections::HashMap;

fn isqrt64(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// True iff the element exceeds 1 under the first real embedding and is not
/// equal to 1.
fn greater_than_one(field: &QuadField, a: &FieldElement) -> Result<bool> {
    let shifted = field.sub(a, &field.one());
    if shifted.is_zero() {
        return Ok(false);
    }
    Ok(!field.signature(&shifted)?[0])
}

/// The fundamental unit epsilon > 1 of a real quadratic field, from the
/// continued-fraction expansion of w.
pub fn fundamental_unit(field: &QuadField) -> Result<FieldElement> {
    if !field.is_real_quadratic() {
        return Err(Error::domain("fundamental unit needs a real quadratic field"));
    }
    let delta = field.delta();
    let t = field.omega_trace();
    let s = isqrt64(delta);

    // convergent matrix [[h_{n-1}, h_{n-2}], [k_{n-1}, k_{n-2}]]
    let mut h1 = BigInt::one();
    let mut h2 = BigInt::from(0);
    let mut k1 = BigInt::from(0);
    let mut k2 = BigInt::one();

    let mut p = t;
    let mut q = 2i64;
    let mut seen: HashMap<(i64, i64), (BigInt, BigInt, BigInt, BigInt)> = HashMap::new();

    for step in 0.. {
        assert!(q > 0, "continued fraction drifted out of range");
        if step >= 1 {
            if let Some((hj1, hj2, kj1, kj2)) = seen.get(&(p, q)) {
                // T = M_k * M_j^{-1}; det(M_j) = hj1*kj2 - hj2*kj1 = +-1
                let det = hj1 * kj2 - hj2 * kj1;
                // inverse of [[a,b],[c,d]] is [[d,-b],[-c,a]]/det
                let (ia, ib, ic, id) = (kj2.clone(), -hj2, -kj1.clone(), hj1.clone());
                let (ia, ib, ic, id) = if det.is_negative() {
                    (-ia, -ib, -ic, -id)
                } else {
                    (ia, ib, ic, id)
                };
                let tr = &k1 * &ia + &k2 * &ic;
                let ts = &k1 * &ib + &k2 * &id;
                let eta = FieldElement::new(ts, tr);
                let n = field.norm(&eta);
                debug_assert!(n.clone().abs().is_one(), "CF produced a non-unit");
                // normalize to the associate greater than 1
                let candidates = [
                    eta.clone(),
                    field.neg(&eta),
                    field.conj(&eta),
                    field.neg(&field.conj(&eta)),
                ];
                for c in candidates {
                    if greater_than_one(field, &c)? {
                        return Ok(c);
                    }
                }
                return Err(Error::theorem(
                    "no associate of the CF unit exceeds 1".to_string(),
                ));
            }
            seen.insert((p, q), (h1.clone(), h2.clone(), k1.clone(), k2.clone()));
        }
        let a = (p + s).div_euclid(q);
        let ab = BigInt::from(a);
        let hn = &ab * &h1 + &h2;
        let kn = &ab * &k1 + &k2;
        h2 = std::mem::replace(&mut h1, hn);
        k2 = std::mem::replace(&mut k1, kn);
        p = a * q - p;
        let num = delta - p * p;
        debug_assert_eq!(num % q, 0);
        q = num / q;
    }
    unreachable!()
}

/// Square-class structure of the unit group: a basis of E/E^2 with its
/// signature and mod-4 data and the dimensions of E+, E_4 and E_4+ modulo
/// squares.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitData {
    /// Fundamental unit for real fields; torsion generator otherwise
    /// (i for d = -1, the sixth root of unity for d = -3, else -1).
    pub torsion_or_fundamental: FieldElement,
    /// Basis of E/E^2: {-1, eps} for real fields, {i} for d = -1,
    /// {-1} for the remaining imaginary fields and for Q.
    pub basis: Vec<FieldElement>,
    /// r x k matrix of basis signatures.
    pub sign_matrix: BitMatrix,
    /// n x k matrix of basis mod-4 square-class coordinates.
    pub mod4_matrix: BitMatrix,
    /// is_square_mod4 of each basis element.
    pub mod4_vector: Vec<bool>,
    /// dim E/E+ = rank of the signature matrix.
    pub u: usize,
    pub dim_e_plus: usize,
    pub dim_e4: usize,
    pub dim_e4_plus: usize,
    pub e_plus_basis: Vec<FieldElement>,
    pub e4_basis: Vec<FieldElement>,
    pub e4_plus_basis: Vec<FieldElement>,
}

fn subset_product(field: &QuadField, basis: &[FieldElement], mask: &[bool]) -> FieldElement {
    let mut acc = field.one();
    for (b, &take) in basis.iter().zip(mask) {
        if take {
            acc = field.mul(&acc, b);
        }
    }
    acc
}

impl UnitData {
    fn build(field: &QuadField) -> Result<UnitData> {
        let minus_one = field.integer(-1);
        let (torsion_or_fundamental, basis) = match field.d() {
            None => (minus_one.clone(), vec![minus_one.clone()]),
            Some(-1) => {
                let i = FieldElement::from_i64(0, 1);
                (i.clone(), vec![i])
            }
            Some(-3) => {
                // the sixth root of unity (1+sqrt(-3))/2 = w; modulo squares
                // its class is the class of -1
                (FieldElement::from_i64(0, 1), vec![minus_one.clone()])
            }
            Some(d) if d < 0 => (minus_one.clone(), vec![minus_one.clone()]),
            Some(_) => {
                let eps = fundamental_unit(field)?;
                (eps.clone(), vec![minus_one.clone(), eps])
            }
        };
        let r = field.real_places();
        let n = field.degree();
        let sign_cols: Vec<Vec<bool>> = basis
            .iter()
            .map(|b| field.signature(b))
            .collect::<Result<_>>()?;
        let mod4_cols: Vec<Vec<bool>> = basis
            .iter()
            .map(|b| field.mod4_coords(b))
            .collect::<Result<_>>()?;
        let mod4_vector: Vec<bool> = basis
            .iter()
            .map(|b| field.is_square_mod4(b))
            .collect::<Result<_>>()?;
        let sign_matrix = BitMatrix::from_columns(&sign_cols, r);
        let mod4_matrix = BitMatrix::from_columns(&mod4_cols, n);
        let stacked = sign_matrix.stack(&mod4_matrix);
        let u = sign_matrix.rank();

        let reps = |kernel: Vec<Vec<bool>>| -> Vec<FieldElement> {
            kernel
                .iter()
                .map(|v| subset_product(field, &basis, v))
                .collect()
        };
        let e_plus_basis = reps(sign_matrix.kernel_basis());
        let e4_basis = reps(mod4_matrix.kernel_basis());
        let e4_plus_basis = reps(stacked.kernel_basis());

        Ok(UnitData {
            torsion_or_fundamental,
            dim_e_plus: e_plus_basis.len(),
            dim_e4: e4_basis.len(),
            dim_e4_plus: e4_plus_basis.len(),
            basis,
            sign_matrix,
            mod4_matrix,
            mod4_vector,
            u,
            e_plus_basis,
            e4_basis,
            e4_plus_basis,
        })
    }
}

/// Per-field cached unit structure.
pub fn unit_structure(field: &QuadField) -> Result<&UnitData> {
    field
        .caches
        .units
        .get_or_init(|| UnitData::build(field))
        .as_ref()
        .map_err(Clone::clone)
}
