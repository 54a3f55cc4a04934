//! The 2-Selmer group of singular numbers modulo squares, its distinguished
//! subgroups, ray-class 2-ranks, conductors, and base change to and from Q.
//!
//! A basis of Sel(F) is assembled from a basis of E/E^2 together with
//! generators of the squares of the 2-torsion class representatives; the
//! exact sequence 1 -> E/E^2 -> Sel(F) -> Cl(F)[2] -> 1 makes that a basis,
//! and the construction verifies dim = rho + r + s. Signature and mod-4
//! coordinate matrices over this basis realize Sel+, Sel_4 and Sel_4+ as
//! kernels.

use crate::classgroup::{class_group, narrow_class_group};
use crate::error::{Error, Result};
use crate::f2::BitMatrix;
use crate::field::{FieldElement, QuadField};
use crate::ideal::{
    ideal_from_element, ideal_mul, ideal_sqrt, ideals_coprime, principal_generator, split_prime,
    Ideal, SplitKind,
};
use crate::unit::unit_structure;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::fmt;

/// Moduli dividing (4) * infinity, the only conductors a singular number
/// can have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Modulus {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "inf")]
    Infinity,
    #[serde(rename = "(4)")]
    Four,
    #[serde(rename = "(4)inf")]
    FourInfinity,
}

impl Modulus {
    /// Divisibility: 1 | inf | (4)inf and 1 | (4) | (4)inf.
    pub fn divides(self, other: Modulus) -> bool {
        use Modulus::*;
        matches!(
            (self, other),
            (One, _) | (_, FourInfinity) | (Infinity, Infinity) | (Four, Four)
        )
    }

    /// True when the finite part is (4).
    pub fn has_finite_part(self) -> bool {
        matches!(self, Modulus::Four | Modulus::FourInfinity)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::One => write!(f, "1"),
            Modulus::Infinity => write!(f, "inf"),
            Modulus::Four => write!(f, "(4)"),
            Modulus::FourInfinity => write!(f, "(4)inf"),
        }
    }
}

/// Sel(F) with explicit singular-number representatives and the GF(2)
/// matrices of the signature and mod-4 coordinate maps.
#[derive(Debug, Clone, PartialEq)]
pub struct SelmerSpace {
    pub basis: Vec<FieldElement>,
    pub dim: usize,
    /// r x dim signature matrix.
    pub sign_matrix: BitMatrix,
    /// n x dim matrix of mod-4 square-class coordinates.
    pub mod4_matrix: BitMatrix,
}

impl SelmerSpace {
    fn build(field: &QuadField) -> Result<SelmerSpace> {
        let units = unit_structure(field)?;
        let ordinary = class_group(field)?;
        let mut basis = units.basis.clone();
        for two_torsion in &ordinary.two_torsion_basis {
            let square = ideal_mul(field, two_torsion, two_torsion);
            let gamma = principal_generator(field, &square)?.ok_or_else(|| {
                Error::theorem(format!(
                    "square of 2-torsion ideal {two_torsion} is not principal"
                ))
            })?;
            basis.push(gamma);
        }
        let expected =
            ordinary.two_rank + field.real_places() + field.complex_places();
        if basis.len() != expected {
            return Err(Error::theorem(format!(
                "Selmer dimension {} differs from rho + r + s = {expected} over {field:?}",
                basis.len()
            )));
        }
        let sign_cols: Vec<Vec<bool>> = basis
            .iter()
            .map(|b| field.signature(b))
            .collect::<Result<_>>()?;
        let mod4_cols: Vec<Vec<bool>> = basis
            .iter()
            .map(|b| {
                let odd = if field.has_odd_norm(b) {
                    b.clone()
                } else {
                    representative_coprime_to(field, b, &Ideal::from_integer(2))?
                };
                field.mod4_coords(&odd)
            })
            .collect::<Result<_>>()?;
        Ok(SelmerSpace {
            dim: basis.len(),
            sign_matrix: BitMatrix::from_columns(&sign_cols, field.real_places()),
            mod4_matrix: BitMatrix::from_columns(&mod4_cols, field.degree()),
            basis,
        })
    }

    /// Product of basis elements selected by a coefficient vector.
    pub fn element_from_coeffs(&self, field: &QuadField, coeffs: &[bool]) -> FieldElement {
        let mut acc = field.one();
        for (b, &take) in self.basis.iter().zip(coeffs) {
            if take {
                acc = field.mul(&acc, b);
            }
        }
        acc
    }
}

/// Per-field cached Selmer space.
pub fn selmer_space(field: &QuadField) -> Result<&SelmerSpace> {
    field
        .caches
        .selmer
        .get_or_init(|| SelmerSpace::build(field))
        .as_ref()
        .map_err(Clone::clone)
}

/// Replace a singular number by one whose ideal square root is coprime to
/// the given ideal: find a prime (or the unit ideal) in the inverse class,
/// relate it by a principal generator gamma, and divide gamma^2 by the
/// input. The input is returned unchanged when already coprime. Searches
/// primes of norm up to 200 * |Delta|.
pub fn representative_coprime_to(
    field: &QuadField,
    omega: &FieldElement,
    target: &Ideal,
) -> Result<FieldElement> {
    let bound = (200i64 * field.delta().abs()).max(2000) as u64;
    representative_coprime_to_bounded(field, omega, target, bound)
}

/// As `representative_coprime_to`, with an explicit prime norm bound.
pub fn representative_coprime_to_bounded(
    field: &QuadField,
    omega: &FieldElement,
    target: &Ideal,
    bound: u64,
) -> Result<FieldElement> {
    let principal = ideal_from_element(field, omega)?;
    let root = ideal_sqrt(field, &principal)?
        .ok_or_else(|| Error::domain(format!("{omega} is not a singular number")))?;
    if ideals_coprime(field, &root, target) {
        return Ok(omega.clone());
    }
    let group = class_group(field)?;
    let target_class = group.inverse(group.class_of_ideal(field, &root)?);

    let try_candidate = |q: &Ideal| -> Result<Option<FieldElement>> {
        if !ideals_coprime(field, q, target) || !q.has_odd_norm(field) {
            return Ok(None);
        }
        if group.class_of_ideal(field, q)? != target_class {
            return Ok(None);
        }
        let gamma = principal_generator(field, &ideal_mul(field, &root, q))?
            .ok_or_else(|| Error::theorem("class arithmetic promised a generator".to_string()))?;
        let beta = field
            .div_exact(&field.mul(&gamma, &gamma), omega)
            .ok_or_else(|| Error::theorem("gamma^2 / omega must be integral".to_string()))?;
        debug_assert_eq!(
            ideal_from_element(field, &beta).unwrap(),
            ideal_mul(field, q, q)
        );
        Ok(Some(beta))
    };

    if let Some(beta) = try_candidate(&Ideal::one())? {
        return Ok(beta);
    }
    let mut p = 3u64;
    while p <= bound {
        if crate::arith::is_prime(p) {
            let split = split_prime(field, p)?;
            if split.kind != SplitKind::Inert {
                for prime in &split.primes {
                    if let Some(beta) = try_candidate(prime)? {
                        return Ok(beta);
                    }
                }
            }
        }
        p += 2;
    }
    Err(Error::inconclusive(
        format!("coprime representative for {omega}"),
        bound,
    ))
}

/// Lemma-L4 representative coprime to the finite part of the modulus.
pub fn coprime_representative(
    field: &QuadField,
    omega: &FieldElement,
    modulus: Modulus,
) -> Result<FieldElement> {
    if !modulus.has_finite_part() {
        // still validate singularity
        let principal = ideal_from_element(field, omega)?;
        ideal_sqrt(field, &principal)?
            .ok_or_else(|| Error::domain(format!("{omega} is not a singular number")))?;
        return Ok(omega.clone());
    }
    representative_coprime_to(field, omega, &Ideal::from_integer(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubspaceKind {
    /// Totally positive classes: Sel+.
    Plus,
    /// Classes congruent to a square mod 4: Sel_4.
    Four,
    /// Both at once: Sel_4+.
    FourPlus,
}

/// A distinguished subgroup of Sel(F), with explicit product
/// representatives of a kernel basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SelmerSubspace {
    pub kind: SubspaceKind,
    pub basis: Vec<FieldElement>,
    pub dim: usize,
    /// Kernel coefficient vectors over the ambient Selmer basis.
    pub coeffs: Vec<Vec<bool>>,
}

/// Kernel of the signature map, the mod-4 map, or their stack, with the
/// dimension checked against the closed forms rho+ + s, rho+, rho.
pub fn selmer_subspace(field: &QuadField, kind: SubspaceKind) -> Result<SelmerSubspace> {
    let sel = selmer_space(field)?;
    let matrix = match kind {
        SubspaceKind::Plus => sel.sign_matrix.clone(),
        SubspaceKind::Four => sel.mod4_matrix.clone(),
        SubspaceKind::FourPlus => sel.sign_matrix.stack(&sel.mod4_matrix),
    };
    let kernel = matrix.kernel_basis();
    let rho = class_group(field)?.two_rank;
    let rho_plus = narrow_class_group(field)?.two_rank;
    let expected = match kind {
        SubspaceKind::Plus => rho_plus + field.complex_places(),
        SubspaceKind::Four => rho_plus,
        SubspaceKind::FourPlus => rho,
    };
    if kernel.len() != expected {
        return Err(Error::theorem(format!(
            "dim of {kind:?} Selmer subspace is {} but the class-rank table demands {expected} over {field:?}",
            kernel.len()
        )));
    }
    let basis = kernel
        .iter()
        .map(|v| sel.element_from_coeffs(field, v))
        .collect();
    Ok(SelmerSubspace {
        kind,
        basis,
        dim: kernel.len(),
        coeffs: kernel,
    })
}

/// 2-ranks of the ray class groups mod 1, 4, 4*inf computed from the exact
/// sequences (alternating sums of dimensions), independent of the closed
/// forms they are compared against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RayRanks {
    pub rho4: usize,
    pub rho4_plus: usize,
    pub rho_plus_via_selmer: usize,
}

pub fn ray_2ranks(field: &QuadField) -> Result<RayRanks> {
    let sel = selmer_space(field)?;
    let rho = class_group(field)?.two_rank;
    let r = field.real_places();
    let n = field.degree();
    let stacked = sel.sign_matrix.stack(&sel.mod4_matrix);
    Ok(RayRanks {
        rho_plus_via_selmer: rho + r - sel.sign_matrix.rank(),
        rho4: rho + n - sel.mod4_matrix.rank(),
        rho4_plus: rho + n + r - stacked.rank(),
    })
}

/// The conductor of the quadratic character attached to a singular number,
/// classified into the divisors of (4)*inf: trivial iff the number is a
/// square mod 4 and totally positive, etc.
pub fn conductor_class(field: &QuadField, omega: &FieldElement) -> Result<Modulus> {
    let odd = representative_coprime_to(field, omega, &Ideal::from_integer(2))?;
    let square = field.is_square_mod4(&odd)?;
    let positive = field.is_totally_positive(&odd)?;
    Ok(match (square, positive) {
        (true, true) => Modulus::One,
        (true, false) => Modulus::Infinity,
        (false, true) => Modulus::Four,
        (false, false) => Modulus::FourInfinity,
    })
}

/// Lift a Selmer class of Q into F (the inclusion j).
pub fn lift_from_rational(_field: &QuadField, a: &BigInt) -> Result<FieldElement> {
    if a.is_zero() {
        return Err(Error::domain("zero is not a Selmer class"));
    }
    Ok(FieldElement::new(a.clone(), BigInt::from(0)))
}

/// Push a Selmer class of F down to Q by the norm, reduced to its canonical
/// representative: the signed squarefree part.
pub fn norm_to_rational(field: &QuadField, omega: &FieldElement) -> Result<BigInt> {
    if omega.is_zero() {
        return Err(Error::domain("zero is not a Selmer class"));
    }
    let n = field.norm(omega);
    signed_squarefree_part(&n)
}

/// The signed squarefree part of a nonzero integer.
pub fn signed_squarefree_part(n: &BigInt) -> Result<BigInt> {
    let negative = n.is_negative();
    let mag = n.abs();
    // singular numbers have square norm magnitude; fall back to factoring
    let core = if crate::arith::exact_sqrt(&mag).is_some() {
        BigInt::from(1)
    } else {
        let mut core = BigInt::from(1);
        for (p, e) in crate::arith::factor_big(&mag)? {
            if e % 2 == 1 {
                core *= BigInt::from(p);
            }
        }
        core
    };
    Ok(if negative { -core } else { core })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;

    fn fe(x: i64, y: i64) -> FieldElement {
        FieldElement::from_i64(x, y)
    }

    #[test]
    fn selmer_space_sqrt10() {
        let f = QuadField::new(10).unwrap();
        let sel = selmer_space(&f).unwrap();
        assert_eq!(sel.dim, 3); // rho + r + s = 1 + 2 + 0
        // the unit part is {-1, 3 + sqrt(10)}
        assert_eq!(sel.basis[0], fe(-1, 0));
        assert_eq!(sel.basis[1], fe(3, 1));
        // the class part is a singular number whose ideal is the square of
        // an odd 2-torsion prime
        let third = &sel.basis[2];
        let ideal = ideal_from_element(&f, third).unwrap();
        assert!(ideal_sqrt(&f, &ideal).unwrap().is_some());
        // together with 5 it spans the same classes as the classical basis
        // {-1, 3+sqrt(10), 2}
        let two_class_product = f.mul(&fe(2, 0), third);
        // 2 * gamma differs from a square by a unit in the span
        let sel_classes: Vec<FieldElement> = (0..8u32)
            .map(|mask| {
                sel.element_from_coeffs(&f, &[(mask & 1) != 0, (mask & 2) != 0, (mask & 4) != 0])
            })
            .collect();
        assert!(sel_classes
            .iter()
            .any(|c| f.same_square_class(c, &two_class_product)));
    }

    #[test]
    fn selmer_space_gaussian_and_rational() {
        let f = QuadField::new(-1).unwrap();
        let sel = selmer_space(&f).unwrap();
        assert_eq!(sel.dim, 1);
        assert_eq!(sel.basis, vec![fe(0, 1)]);

        let q = QuadField::rational();
        let sel = selmer_space(&q).unwrap();
        assert_eq!(sel.basis, vec![fe(-1, 0)]);
        assert_eq!(sel.dim, 1);
    }

    #[test]
    fn coprime_representative_examples() {
        // already odd: unchanged
        let f = QuadField::new(10).unwrap();
        assert_eq!(
            coprime_representative(&f, &fe(5, 0), Modulus::Four).unwrap(),
            fe(5, 0)
        );
        // class of 2 moves to an odd representative in the same square class
        let beta = coprime_representative(&f, &fe(2, 0), Modulus::Four).unwrap();
        assert!(beta.x.is_odd() || beta.y.is_odd());
        assert!(f.has_odd_norm(&beta));
        assert!(f.same_square_class(&beta, &fe(5, 0)));
        let root = ideal_sqrt(&f, &ideal_from_element(&f, &beta).unwrap()).unwrap();
        assert!(root.unwrap().has_odd_norm(&f));

        // Q(sqrt(-5)): class of 2 becomes -2 + sqrt(-5) (norm 9)
        let f5 = QuadField::new(-5).unwrap();
        let beta = coprime_representative(&f5, &fe(2, 0), Modulus::Four).unwrap();
        assert_eq!(beta, fe(-2, 1));

        // a non-singular number is out of domain
        assert!(coprime_representative(&f, &fe(3, 0), Modulus::Four).is_err());
        // trivial finite part: unchanged
        assert_eq!(
            coprime_representative(&f, &fe(2, 0), Modulus::Infinity).unwrap(),
            fe(2, 0)
        );
    }

    #[test]
    fn subspaces_sqrt10_all_equal_class_of_five() {
        let f = QuadField::new(10).unwrap();
        for kind in [SubspaceKind::Plus, SubspaceKind::Four, SubspaceKind::FourPlus] {
            let sub = selmer_subspace(&f, kind).unwrap();
            assert_eq!(sub.dim, 1, "{kind:?}");
            assert!(
                f.same_square_class(&sub.basis[0], &fe(5, 0)),
                "{kind:?} generator {} is not the class of 5",
                sub.basis[0]
            );
        }
    }

    #[test]
    fn subspaces_sqrt3() {
        let f = QuadField::new(3).unwrap();
        let plus = selmer_subspace(&f, SubspaceKind::Plus).unwrap();
        assert_eq!(plus.dim, 1);
        assert!(f.same_square_class(&plus.basis[0], &fe(2, 1)));
        let four = selmer_subspace(&f, SubspaceKind::Four).unwrap();
        assert_eq!(four.dim, 1);
        assert!(f.same_square_class(&four.basis[0], &fe(-1, 0)));
        let both = selmer_subspace(&f, SubspaceKind::FourPlus).unwrap();
        assert_eq!(both.dim, 0);
    }

    #[test]
    fn subspace_imaginary_minus5() {
        let f = QuadField::new(-5).unwrap();
        let sub = selmer_subspace(&f, SubspaceKind::FourPlus).unwrap();
        assert_eq!(sub.dim, 1);
        assert!(f.same_square_class(&sub.basis[0], &fe(-1, 0)));
    }

    #[test]
    fn ray_ranks_examples() {
        let f3 = QuadField::new(3).unwrap();
        let r = ray_2ranks(&f3).unwrap();
        assert_eq!((r.rho4, r.rho4_plus), (1, 2));
        assert_eq!(r.rho_plus_via_selmer, 1);

        let fi = QuadField::new(-1).unwrap();
        let r = ray_2ranks(&fi).unwrap();
        assert_eq!((r.rho4, r.rho4_plus), (1, 1));

        let f10 = QuadField::new(10).unwrap();
        let r = ray_2ranks(&f10).unwrap();
        assert_eq!((r.rho4, r.rho4_plus), (1, 3));
    }

    #[test]
    fn conductor_examples() {
        let f10 = QuadField::new(10).unwrap();
        assert_eq!(conductor_class(&f10, &fe(1, 0)).unwrap(), Modulus::One);
        assert_eq!(conductor_class(&f10, &fe(5, 0)).unwrap(), Modulus::One);
        let f3 = QuadField::new(3).unwrap();
        assert_eq!(conductor_class(&f3, &fe(-1, 0)).unwrap(), Modulus::Infinity);
        // 2 + sqrt(3) is a totally positive unit, not a square mod 4
        assert_eq!(conductor_class(&f3, &fe(2, 1)).unwrap(), Modulus::Four);
        // -(2 + sqrt(3)) has full conductor
        assert_eq!(
            conductor_class(&f3, &fe(-2, -1)).unwrap(),
            Modulus::FourInfinity
        );
        // non-singular input is rejected
        assert!(conductor_class(&f10, &fe(3, 0)).is_err());
    }

    #[test]
    fn modulus_divisibility() {
        use Modulus::*;
        assert!(One.divides(Infinity));
        assert!(One.divides(Four));
        assert!(Infinity.divides(FourInfinity));
        assert!(Four.divides(FourInfinity));
        assert!(!Infinity.divides(Four));
        assert!(!Four.divides(Infinity));
        assert!(!FourInfinity.divides(One));
    }

    #[test]
    fn base_change_examples() {
        // lift(-1) into Q(i) is trivial
        let fi = QuadField::new(-1).unwrap();
        let lifted = lift_from_rational(&fi, &BigInt::from(-1)).unwrap();
        assert!(fi.is_square(&lifted) || fi.same_square_class(&lifted, &fe(1, 0)));

        // norm of 3 + sqrt(10) is the class of -1
        let f10 = QuadField::new(10).unwrap();
        assert_eq!(norm_to_rational(&f10, &fe(3, 1)).unwrap(), BigInt::from(-1));

        // norm o lift squares, hence trivializes
        for a in [-1i64, 2, -6, 15] {
            let lifted = lift_from_rational(&f10, &BigInt::from(a)).unwrap();
            assert_eq!(norm_to_rational(&f10, &lifted).unwrap(), BigInt::from(1));
        }
    }

    #[test]
    fn signed_squarefree() {
        assert_eq!(signed_squarefree_part(&BigInt::from(49)).unwrap(), BigInt::from(1));
        assert_eq!(signed_squarefree_part(&BigInt::from(-49)).unwrap(), BigInt::from(-1));
        assert_eq!(signed_squarefree_part(&BigInt::from(12)).unwrap(), BigInt::from(3));
        assert_eq!(signed_squarefree_part(&BigInt::from(-30)).unwrap(), BigInt::from(-30));
    }
}
