//! Quadratic residue symbols in F, their multiplicative extension to odd
//! ideals and Selmer classes, the four residue pairings against (ray) class
//! groups, ideal-group membership, and the reciprocity / supplementary-law
//! checkers.
//!
//! Symbols at degree-1 primes reduce to Legendre symbols in the prime
//! field; inert primes are handled by Euler's criterion inside the
//! degree-2 residue field F_p[w]/(w^2 - t w - m), so no non-residue search
//! is ever needed.

use crate::arith::{big_mod_u64, jacobi, mul_mod, primes_up_to};
use crate::classgroup::class_group;
use crate::error::{Error, Result};
use crate::f2::BitMatrix;
use crate::field::{FieldElement, QuadField};
use crate::ideal::{
    factorize, ideal_from_element, ideal_mul, ideals_coprime, principal_generator,
    split_prime, Ideal, SplitKind,
};
use crate::selmer::{representative_coprime_to, selmer_space, selmer_subspace, SubspaceKind};
use crate::unit::unit_structure;
use num_bigint::BigInt;
use serde::Serialize;

/// Quadratic residue symbol (alpha / p) for a prime ideal of odd norm,
/// with alpha coprime to p. Degree-1 primes reduce to the prime field,
/// inert primes use Euler's criterion in F_{p^2}.
pub fn residue_symbol(field: &QuadField, alpha: &FieldElement, prime: &Ideal) -> Result<i32> {
    if !prime.has_odd_norm(field) {
        return Err(Error::domain("residue symbol needs an odd prime"));
    }
    if field.is_rational() {
        let p = bigint_to_u64(&prime.c)?;
        let s = crate::arith::jacobi_big(&alpha.x, p)?;
        if s == 0 {
            return Err(Error::domain("residue symbol needs coprime arguments"));
        }
        return Ok(s);
    }
    if prime.c > BigInt::from(1) {
        // inert prime (p)
        let p = bigint_to_u64(&prime.c)?;
        return symbol_inert(field, alpha, p);
    }
    let p = bigint_to_u64(&prime.a)?;
    let b = big_mod_u64(&prime.b, p);
    // w = -b in the residue field
    let x = big_mod_u64(&alpha.x, p);
    let y = big_mod_u64(&alpha.y, p);
    let v = (x + p - mul_mod(b, y, p)) % p;
    let s = jacobi(v as i64, p)?;
    if s == 0 {
        return Err(Error::domain("residue symbol needs coprime arguments"));
    }
    Ok(s)
}

fn bigint_to_u64(n: &BigInt) -> Result<u64> {
    let (sign, digits) = n.to_u64_digits();
    if sign == num_bigint::Sign::Minus || digits.len() > 1 {
        return Err(Error::domain("prime ideal norm out of range"));
    }
    Ok(digits.first().copied().unwrap_or(0))
}

/// Euler's criterion in the residue field of an inert prime.
fn symbol_inert(field: &QuadField, alpha: &FieldElement, p: u64) -> Result<i32> {
    let t = field.omega_trace().rem_euclid(p as i64) as u64;
    let m = field.omega_const().rem_euclid(p as i64) as u64;
    let a0 = big_mod_u64(&alpha.x, p);
    let a1 = big_mod_u64(&alpha.y, p);
    if a0 == 0 && a1 == 0 {
        return Err(Error::domain("residue symbol needs coprime arguments"));
    }
    // (c0 + c1 w)(d0 + d1 w) with w^2 = t w + m
    let mul2 = |c: (u64, u64), d: (u64, u64)| -> (u64, u64) {
        let cross = mul_mod(c.1, d.1, p);
        let e0 = (mul_mod(c.0, d.0, p) + mul_mod(m, cross, p)) % p;
        let e1 = (mul_mod(c.0, d.1, p) + mul_mod(c.1, d.0, p) + mul_mod(t, cross, p)) % p;
        (e0, e1)
    };
    let exp = ((p as u128 * p as u128 - 1) / 2) as u64;
    let mut acc = (1u64, 0u64);
    let mut base = (a0, a1);
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul2(acc, base);
        }
        base = mul2(base, base);
        e >>= 1;
    }
    if acc == (1, 0) {
        Ok(1)
    } else if acc == (p - 1, 0) {
        Ok(-1)
    } else {
        Err(Error::theorem(format!(
            "Euler criterion in F_{p}^2 returned a non-scalar"
        )))
    }
}

/// Symbol (omega / a) of a Selmer class against an odd integral ideal:
/// replace omega by a representative coprime to 2a, then multiply residue
/// symbols over the factorization of a.
pub fn symbol_ideal(field: &QuadField, omega: &FieldElement, ideal: &Ideal) -> Result<i32> {
    if !ideal.has_odd_norm(field) {
        return Err(Error::domain("symbol_ideal needs an odd ideal"));
    }
    if ideal.is_one() {
        return Ok(1);
    }
    let modulus = ideal_mul(field, ideal, &Ideal::from_integer(2));
    let rep = if ideals_coprime(field, &ideal_from_element(field, omega)?, &modulus) {
        omega.clone()
    } else {
        representative_coprime_to(field, omega, &modulus)?
    };
    let mut sign = 1i32;
    for (prime, e) in factorize(field, ideal)? {
        if e % 2 == 1 {
            sign *= residue_symbol(field, &rep, &prime)?;
        }
    }
    Ok(sign)
}

/// The four ideal groups of the class-field dictionary, as membership
/// conditions on the generator of a*b^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IdealGroupKind {
    /// I^2 P: a*b^2 principal, no condition on the generator.
    Principal,
    /// I^2 P+: some totally positive generator.
    PrincipalPlus,
    /// I^2 P_4: some generator congruent to a square mod 4.
    PrincipalFour,
    /// I^2 P_4+: some totally positive generator that is a square mod 4.
    PrincipalFourPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Membership {
    Member,
    NonMember,
    Inconclusive,
}

fn generator_condition(
    field: &QuadField,
    kind: IdealGroupKind,
    alpha: &FieldElement,
) -> Result<bool> {
    Ok(match kind {
        IdealGroupKind::Principal => true,
        IdealGroupKind::PrincipalPlus => field.is_totally_positive(alpha)?,
        IdealGroupKind::PrincipalFour => field.is_square_mod4(alpha)?,
        IdealGroupKind::PrincipalFourPlus => {
            field.is_square_mod4(alpha)? && field.is_totally_positive(alpha)?
        }
    })
}

/// The Selmer group dual to an ideal group under the residue pairings.
fn dual_selmer_basis(field: &QuadField, kind: IdealGroupKind) -> Result<Vec<FieldElement>> {
    Ok(match kind {
        IdealGroupKind::Principal => selmer_subspace(field, SubspaceKind::FourPlus)?.basis,
        IdealGroupKind::PrincipalPlus => selmer_subspace(field, SubspaceKind::Four)?.basis,
        IdealGroupKind::PrincipalFour => selmer_subspace(field, SubspaceKind::Plus)?.basis,
        IdealGroupKind::PrincipalFourPlus => selmer_space(field)?.basis.clone(),
    })
}

/// Decide membership of an odd integral ideal in one of the four ideal
/// groups. The witness search runs over one odd representative per class
/// with square inverse to [a] (up to the norm bound) and sweeps unit square
/// classes over the generator, which decides membership completely when no
/// candidate is cut off by the bound; a failed search is certified as
/// non-membership through the dual pairing symbols.
pub fn ideal_group_membership(
    field: &QuadField,
    ideal: &Ideal,
    kind: IdealGroupKind,
    bound: u64,
) -> Result<Membership> {
    if !ideal.has_odd_norm(field) {
        return Err(Error::domain("ideal group membership needs an odd ideal"));
    }
    let group = class_group(field)?;
    let target = group.inverse(group.class_of_ideal(field, ideal)?);
    let units = unit_structure(field)?;
    let unit_sweep: Vec<FieldElement> = (0..(1u32 << units.basis.len()))
        .map(|mask| {
            let mut acc = field.one();
            for (i, b) in units.basis.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc = field.mul(&acc, b);
                }
            }
            acc
        })
        .collect();

    for c in 0..group.order as usize {
        if group.compose(c, c) != target {
            continue;
        }
        let rep = &group.odd_representatives[c];
        if rep.norm(field) > BigInt::from(bound) {
            continue;
        }
        let candidate = ideal_mul(field, ideal, &ideal_mul(field, rep, rep));
        let gamma = principal_generator(field, &candidate)?.ok_or_else(|| {
            Error::theorem("class arithmetic promised a principal ideal".to_string())
        })?;
        for unit in &unit_sweep {
            let alpha = field.mul(&gamma, unit);
            if generator_condition(field, kind, &alpha)? {
                return Ok(Membership::Member);
            }
        }
    }

    // certify non-membership through the dual pairing
    for omega in dual_selmer_basis(field, kind)? {
        match symbol_ideal(field, &omega, ideal) {
            Ok(-1) => return Ok(Membership::NonMember),
            Ok(_) => {}
            Err(Error::Inconclusive { .. }) => return Ok(Membership::Inconclusive),
            Err(e) => return Err(e),
        }
    }
    Ok(Membership::Inconclusive)
}

/// The four pairings between ray class groups and Selmer groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairingKind {
    /// Cl+{4}/2 x Sel(F).
    EP1,
    /// Cl{4}/2 x Sel+(F).
    EP2,
    /// Cl+/2 x Sel_4(F).
    EP3,
    /// Cl/2 x Sel_4+(F).
    EP4,
}

impl PairingKind {
    pub const ALL: [PairingKind; 4] = [
        PairingKind::EP1,
        PairingKind::EP2,
        PairingKind::EP3,
        PairingKind::EP4,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PairingVerdict {
    Perfect,
    RankDeficit,
    Inconclusive,
}

/// Symbol matrix of one pairing: rows are odd prime ideals, columns the
/// basis of the Selmer side, entry 1 encoding symbol -1.
#[derive(Debug, Clone, PartialEq)]
pub struct PairingReport {
    pub kind: PairingKind,
    pub selmer_basis: Vec<FieldElement>,
    pub row_ideals: Vec<Ideal>,
    pub matrix: BitMatrix,
    pub achieved_rank: usize,
    pub expected_rank: usize,
    pub verdict: PairingVerdict,
}

/// Build the symbol matrix for one pairing, streaming odd primes coprime to
/// the discriminant and the basis norms until the rank reaches the dimension
/// of the Selmer side or the norm bound is exhausted.
pub fn pairing_matrix(
    field: &QuadField,
    kind: PairingKind,
    norm_bound: Option<u64>,
) -> Result<PairingReport> {
    let basis: Vec<FieldElement> = match kind {
        PairingKind::EP1 => selmer_space(field)?.basis.clone(),
        PairingKind::EP2 => selmer_subspace(field, SubspaceKind::Plus)?.basis,
        PairingKind::EP3 => selmer_subspace(field, SubspaceKind::Four)?.basis,
        PairingKind::EP4 => selmer_subspace(field, SubspaceKind::FourPlus)?.basis,
    };
    let expected = basis.len();
    let bound = norm_bound.unwrap_or(200 * field.delta().unsigned_abs());
    let mut matrix = BitMatrix::zero(0, expected);
    let mut row_ideals = Vec::new();
    let mut achieved = 0usize;
    if expected > 0 {
        let norms: Vec<BigInt> = basis.iter().map(|b| field.norm(b)).collect();
        let delta = field.delta();
        let add_row = |prime: Ideal,
                           matrix: &mut BitMatrix,
                           row_ideals: &mut Vec<Ideal>|
         -> Result<usize> {
            let row: Vec<bool> = basis
                .iter()
                .map(|w| residue_symbol(field, w, &prime).map(|s| s == -1))
                .collect::<Result<_>>()?;
            matrix.push_row(&row);
            row_ideals.push(prime);
            Ok(matrix.rank())
        };
        // inert primes enter at norm p^2; buffer them so rows appear in
        // increasing norm order
        let mut inert_pending: std::collections::BTreeSet<(u64, u64)> =
            std::collections::BTreeSet::new();
        'primes: for p in primes_up_to(bound).into_iter().skip(1) {
            while let Some(&(n2, q)) = inert_pending.first() {
                if n2 > p {
                    break;
                }
                inert_pending.pop_first();
                let prime = split_prime(field, q)?.primes.remove(0);
                achieved = add_row(prime, &mut matrix, &mut row_ideals)?;
                if achieved == expected {
                    break 'primes;
                }
            }
            if delta.rem_euclid(p as i64) == 0 {
                continue;
            }
            if norms.iter().any(|n| big_mod_u64(n, p) == 0) {
                continue;
            }
            let split = split_prime(field, p)?;
            match split.kind {
                SplitKind::Split => {
                    for prime in split.primes {
                        achieved = add_row(prime, &mut matrix, &mut row_ideals)?;
                        if achieved == expected {
                            break 'primes;
                        }
                    }
                }
                SplitKind::Inert => {
                    if field.is_rational() {
                        achieved = add_row(split.primes[0].clone(), &mut matrix, &mut row_ideals)?;
                        if achieved == expected {
                            break 'primes;
                        }
                    } else if let Some(n2) = p.checked_mul(p) {
                        if n2 <= bound {
                            inert_pending.insert((n2, p));
                        }
                    }
                }
                SplitKind::Ramified => {}
            }
        }
        if achieved < expected {
            for (_, q) in inert_pending {
                let prime = split_prime(field, q)?.primes.remove(0);
                achieved = add_row(prime, &mut matrix, &mut row_ideals)?;
                if achieved == expected {
                    break;
                }
            }
        }
    }
    let verdict = if achieved == expected {
        PairingVerdict::Perfect
    } else {
        PairingVerdict::RankDeficit
    };
    Ok(PairingReport {
        kind,
        selmer_basis: basis,
        row_ideals,
        matrix,
        achieved_rank: achieved,
        expected_rank: expected,
        verdict,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReciprocityOutcome {
    Pass,
    Fail,
    Skipped,
}

/// Check (alpha/beta) = (beta/alpha) for coprime integral elements of odd
/// norm satisfying the sufficient hypothesis: alpha primary (a square
/// mod 4) and one of the two totally positive.
pub fn reciprocity_check(
    field: &QuadField,
    alpha: &FieldElement,
    beta: &FieldElement,
) -> Result<ReciprocityOutcome> {
    if alpha.is_zero() || beta.is_zero() {
        return Ok(ReciprocityOutcome::Skipped);
    }
    if !field.has_odd_norm(alpha) || !field.has_odd_norm(beta) {
        return Ok(ReciprocityOutcome::Skipped);
    }
    let primary = field.is_square_mod4(alpha)?;
    let hypothesis = primary
        && (field.is_totally_positive(alpha)? || field.is_totally_positive(beta)?);
    if !hypothesis {
        return Ok(ReciprocityOutcome::Skipped);
    }
    let ia = ideal_from_element(field, alpha)?;
    let ib = ideal_from_element(field, beta)?;
    if !ideals_coprime(field, &ia, &ib) {
        return Ok(ReciprocityOutcome::Skipped);
    }
    let symbol_over = |top: &FieldElement, bottom: &Ideal| -> Result<i32> {
        let mut sign = 1i32;
        for (prime, e) in factorize(field, bottom)? {
            if e % 2 == 1 {
                sign *= residue_symbol(field, top, &prime)?;
            }
        }
        Ok(sign)
    };
    let ab = symbol_over(alpha, &ib)?;
    let ba = symbol_over(beta, &ia)?;
    Ok(if ab == ba {
        ReciprocityOutcome::Pass
    } else {
        ReciprocityOutcome::Fail
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SupplementaryOutcome {
    Verified,
    Refuted,
    Inconclusive,
}

/// First supplementary law: for an odd integral ideal a, the existence of
/// b and a totally positive alpha = xi^2 mod 4 with a*b^2 = (alpha) is
/// equivalent to (omega/a) = 1 for every omega in Sel(F). Both sides are
/// computed; disagreement is reported as refuted and signals a bug.
pub fn supplementary_check(
    field: &QuadField,
    ideal: &Ideal,
    bound: u64,
) -> Result<SupplementaryOutcome> {
    if !ideal.has_odd_norm(field) {
        return Err(Error::domain("supplementary law needs an odd ideal"));
    }
    let mut all_plus = true;
    for omega in &selmer_space(field)?.basis {
        match symbol_ideal(field, omega, ideal) {
            Ok(-1) => {
                all_plus = false;
                break;
            }
            Ok(_) => {}
            Err(Error::Inconclusive { .. }) => return Ok(SupplementaryOutcome::Inconclusive),
            Err(e) => return Err(e),
        }
    }
    let membership =
        ideal_group_membership(field, ideal, IdealGroupKind::PrincipalFourPlus, bound)?;
    Ok(match (membership, all_plus) {
        (Membership::Member, true) => SupplementaryOutcome::Verified,
        (Membership::Member, false) => SupplementaryOutcome::Refuted,
        (Membership::NonMember, false) => SupplementaryOutcome::Verified,
        (Membership::NonMember, true) => SupplementaryOutcome::Refuted,
        (Membership::Inconclusive, true) => SupplementaryOutcome::Inconclusive,
        (Membership::Inconclusive, false) => SupplementaryOutcome::Verified,
    })
}

/// Odd prime ideals of norm below the bound, ordered by (norm, b).
pub fn odd_prime_ideals(field: &QuadField, norm_bound: u64) -> Result<Vec<Ideal>> {
    let mut out: Vec<(BigInt, Ideal)> = Vec::new();
    for p in primes_up_to(norm_bound).into_iter().skip(1) {
        let split = split_prime(field, p)?;
        for prime in split.primes {
            let n = prime.norm(field);
            if n < BigInt::from(norm_bound) {
                out.push((n, prime));
            }
        }
    }
    out.sort();
    Ok(out.into_iter().map(|(_, p)| p).collect())
}
