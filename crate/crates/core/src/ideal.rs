//! Integral ideals of quadratic orders in Hermite normal form.
//!
//! An ideal is stored as c*(a*Z + (b+w)*Z) with c > 0, a > 0 and
//! 0 <= b < a; the triple is unique, so equality is structural. Rational
//! ideals are the degenerate case (c; 1, 0). Prime splitting, factorization,
//! ideal square roots, and principal/totally-positive generator extraction
//! live here; the generator extraction leans on the reduction machinery in
//! `forms`.

use crate::arith::{factor_big, jacobi, sqrt_mod_p};
use crate::error::{Error, Result};
use crate::field::{FieldElement, QuadField};
use crate::forms::{principal_cycles, reduce, QForm};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// Integral ideal c*(a*Z + (b+w)*Z) in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ideal {
    pub c: BigInt,
    pub a: BigInt,
    pub b: BigInt,
}

impl Ideal {
    pub fn one() -> Ideal {
        Ideal {
            c: BigInt::one(),
            a: BigInt::one(),
            b: BigInt::zero(),
        }
    }

    /// The ideal generated by a rational integer n != 0.
    pub fn from_integer(n: i64) -> Ideal {
        Ideal {
            c: BigInt::from(n.unsigned_abs()),
            a: BigInt::one(),
            b: BigInt::zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        self.c.is_one() && self.a.is_one()
    }

    /// norm = c^2 * a for quadratic fields, c for the rational field.
    pub fn norm(&self, field: &QuadField) -> BigInt {
        if field.is_rational() {
            self.c.clone()
        } else {
            &self.c * &self.c * &self.a
        }
    }

    pub fn has_odd_norm(&self, field: &QuadField) -> bool {
        self.norm(field).is_odd()
    }

    /// Z-module generators: c*a and c*(b+w), just c over the rationals.
    pub fn generators(&self, field: &QuadField) -> Vec<FieldElement> {
        if field.is_rational() {
            return vec![FieldElement::new(self.c.clone(), BigInt::zero())];
        }
        vec![
            FieldElement::new(&self.c * &self.a, BigInt::zero()),
            FieldElement::new(&self.c * &self.b, self.c.clone()),
        ]
    }

    pub fn contains(&self, field: &QuadField, alpha: &FieldElement) -> bool {
        if field.is_rational() {
            return alpha.y.is_zero() && alpha.x.is_multiple_of(&self.c);
        }
        if !alpha.y.is_multiple_of(&self.c) {
            return false;
        }
        let ca = &self.c * &self.a;
        (&alpha.x - &self.b * &alpha.y).is_multiple_of(&ca)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; {}, {})", self.c, self.a, self.b)
    }
}

/// Canonicalize the Z-module spanned by the given elements into an ideal.
/// The module must actually be an ideal of the ring of integers.
fn hnf(field: &QuadField, gens: &[FieldElement]) -> Result<Ideal> {
    if field.is_rational() {
        let mut c = BigInt::zero();
        for g in gens {
            debug_assert!(g.y.is_zero());
            c = c.gcd(&g.x);
        }
        if c.is_zero() {
            return Err(Error::domain("zero module is not an ideal"));
        }
        return Ok(Ideal {
            c,
            a: BigInt::one(),
            b: BigInt::zero(),
        });
    }
    // combine omega-coordinates down to their gcd, tracking the combination
    let mut combo = FieldElement::new(BigInt::zero(), BigInt::zero());
    for g in gens {
        if g.y.is_zero() {
            continue;
        }
        if combo.y.is_zero() {
            combo = g.clone();
            continue;
        }
        let e = combo.y.extended_gcd(&g.y);
        combo = FieldElement::new(&e.x * &combo.x + &e.y * &g.x, e.gcd);
    }
    if combo.y.is_zero() {
        return Err(Error::domain("module of rank < 2 is not an ideal here"));
    }
    if combo.y.is_negative() {
        combo = FieldElement::new(-combo.x, -combo.y);
    }
    let m = combo.y.clone();
    let mut a_gcd = BigInt::zero();
    for g in gens {
        let k = g.y.div_rem(&m).0;
        debug_assert!(g.y.is_multiple_of(&m));
        let x_cleared = &g.x - &k * &combo.x;
        a_gcd = a_gcd.gcd(&x_cleared);
    }
    if a_gcd.is_zero() {
        return Err(Error::domain("degenerate module"));
    }
    // extract (c; a, b) from A*Z + (B + m*w)*Z
    let (a, ra) = a_gcd.div_rem(&m);
    let (b0, rb) = combo.x.div_rem(&m);
    if !ra.is_zero() || !rb.is_zero() {
        return Err(Error::domain("module is not an ideal of the maximal order"));
    }
    let b = b0.mod_floor(&a);
    let ideal = Ideal { c: m, a, b };
    debug_assert!(
        field
            .norm(&FieldElement::new(ideal.b.clone(), BigInt::one()))
            .is_multiple_of(&ideal.a),
        "HNF invariant a | N(b + w) violated for {ideal}"
    );
    Ok(ideal)
}

/// The principal ideal generated by a nonzero element.
pub fn ideal_from_element(field: &QuadField, alpha: &FieldElement) -> Result<Ideal> {
    if alpha.is_zero() {
        return Err(Error::domain("zero element generates the zero ideal"));
    }
    if field.is_rational() {
        let mut c = alpha.x.clone();
        if c.is_negative() {
            c = -c;
        }
        return Ok(Ideal {
            c,
            a: BigInt::one(),
            b: BigInt::zero(),
        });
    }
    let omega = FieldElement::from_i64(0, 1);
    hnf(field, &[alpha.clone(), field.mul(alpha, &omega)])
}

pub fn ideal_mul(field: &QuadField, lhs: &Ideal, rhs: &Ideal) -> Ideal {
    if field.is_rational() {
        return Ideal {
            c: &lhs.c * &rhs.c,
            a: BigInt::one(),
            b: BigInt::zero(),
        };
    }
    let gl = lhs.generators(field);
    let gr = rhs.generators(field);
    let mut gens = Vec::with_capacity(4);
    for x in &gl {
        for y in &gr {
            gens.push(field.mul(x, y));
        }
    }
    hnf(field, &gens).expect("product of ideals is an ideal")
}

/// Ideal sum (greatest common divisor).
pub fn ideal_add(field: &QuadField, lhs: &Ideal, rhs: &Ideal) -> Ideal {
    if field.is_rational() {
        return Ideal {
            c: lhs.c.gcd(&rhs.c),
            a: BigInt::one(),
            b: BigInt::zero(),
        };
    }
    let mut gens: Vec<FieldElement> = lhs.generators(field);
    gens.extend(rhs.generators(field));
    hnf(field, &gens).expect("sum of ideals is an ideal")
}

pub fn ideal_conj(field: &QuadField, ideal: &Ideal) -> Ideal {
    if field.is_rational() {
        return ideal.clone();
    }
    let t = BigInt::from(field.omega_trace());
    let b = (-&ideal.b - t).mod_floor(&ideal.a);
    Ideal {
        c: ideal.c.clone(),
        a: ideal.a.clone(),
        b,
    }
}

pub fn ideal_pow(field: &QuadField, ideal: &Ideal, e: u32) -> Ideal {
    let mut acc = Ideal::one();
    for _ in 0..e {
        acc = ideal_mul(field, &acc, ideal);
    }
    acc
}

pub fn ideals_coprime(field: &QuadField, lhs: &Ideal, rhs: &Ideal) -> bool {
    ideal_add(field, lhs, rhs).is_one()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitKind {
    /// Two distinct conjugate primes of residue degree 1.
    Split,
    /// The rational prime stays prime.
    Inert,
    /// The square of one prime.
    Ramified,
}

/// Decomposition of a rational prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    pub kind: SplitKind,
    pub primes: Vec<Ideal>,
}

/// Decompose a rational prime, by the Kronecker symbol of the discriminant.
pub fn split_prime(field: &QuadField, p: u64) -> Result<Splitting> {
    if !crate::arith::is_prime(p) {
        return Err(Error::domain(format!("{p} is not prime")));
    }
    if field.is_rational() {
        return Ok(Splitting {
            kind: SplitKind::Inert,
            primes: vec![Ideal {
                c: BigInt::from(p),
                a: BigInt::one(),
                b: BigInt::zero(),
            }],
        });
    }
    let d = field.d().unwrap();
    let t = field.omega_trace();
    let prime_with_b = |b: u64| -> Ideal {
        Ideal {
            c: BigInt::one(),
            a: BigInt::from(p),
            b: BigInt::from(b % p),
        }
    };
    if p == 2 {
        let dm8 = d.rem_euclid(8);
        return Ok(if dm8 == 1 {
            Splitting {
                kind: SplitKind::Split,
                primes: vec![prime_with_b(0), prime_with_b(1)],
            }
        } else if dm8 == 5 {
            Splitting {
                kind: SplitKind::Inert,
                primes: vec![Ideal::from_integer(2)],
            }
        } else if d % 2 == 0 {
            Splitting {
                kind: SplitKind::Ramified,
                primes: vec![prime_with_b(0)],
            }
        } else {
            // d = 3 mod 4
            Splitting {
                kind: SplitKind::Ramified,
                primes: vec![prime_with_b(1)],
            }
        });
    }
    let delta_mod = field.delta().rem_euclid(p as i64);
    let symbol = jacobi(delta_mod, p)?;
    // roots of the minimal polynomial x^2 - t*x - m of w, then b = -root
    let m_mod = field.omega_const().rem_euclid(p as i64) as u64;
    let t_mod = t.rem_euclid(p as i64) as u64;
    let inv2 = crate::arith::pow_mod(2, p - 2, p);
    match symbol {
        1 => {
            let r = sqrt_mod_p(delta_mod as u64 % p, p)
                .expect("residue has a square root");
            let root1 = crate::arith::mul_mod(t_mod + r, inv2, p);
            let root2 = crate::arith::mul_mod((t_mod + p) - r, inv2, p);
            let mut bs = [(p - root1) % p, (p - root2) % p];
            bs.sort_unstable();
            let _ = m_mod;
            Ok(Splitting {
                kind: SplitKind::Split,
                primes: vec![prime_with_b(bs[0]), prime_with_b(bs[1])],
            })
        }
        0 => {
            let root = crate::arith::mul_mod(t_mod, inv2, p);
            Ok(Splitting {
                kind: SplitKind::Ramified,
                primes: vec![prime_with_b((p - root) % p)],
            })
        }
        _ => Ok(Splitting {
            kind: SplitKind::Inert,
            primes: vec![Ideal {
                c: BigInt::from(p),
                a: BigInt::one(),
                b: BigInt::zero(),
            }],
        }),
    }
}

/// Divide an ideal by a prime ideal above p that contains it.
fn divide_by_prime(field: &QuadField, ideal: &Ideal, prime: &Ideal, p: u64) -> Ideal {
    let pb = BigInt::from(p);
    if field.is_rational() || prime.c > BigInt::one() {
        // rational prime or inert prime (p): the quotient is the module
        // scaled by 1/p, and p divides the content
        let (q, r) = ideal.c.div_rem(&pb);
        debug_assert!(r.is_zero(), "division by non-dividing prime");
        return Ideal {
            c: q,
            a: ideal.a.clone(),
            b: ideal.b.clone(),
        };
    }
    // degree-1 prime: multiply by the conjugate, then strip (p)
    let prod = ideal_mul(field, ideal, &ideal_conj(field, prime));
    let (c, r) = prod.c.div_rem(&pb);
    debug_assert!(r.is_zero(), "division by non-dividing prime");
    Ideal {
        c,
        a: prod.a,
        b: prod.b,
    }
}

fn ideal_subset_of_prime(field: &QuadField, ideal: &Ideal, prime: &Ideal) -> bool {
    ideal
        .generators(field)
        .iter()
        .all(|g| prime.contains(field, g))
}

/// Prime factorization, obtained by factoring the norm and computing
/// valuations at the primes above each rational divisor. Primes are returned
/// in increasing (norm, b) order.
pub fn factorize(field: &QuadField, ideal: &Ideal) -> Result<Vec<(Ideal, u32)>> {
    let n = ideal.norm(field);
    if n.is_zero() {
        return Err(Error::domain("factorize needs a nonzero ideal"));
    }
    let mut out = Vec::new();
    for (p, _) in factor_big(&n)? {
        let split = split_prime(field, p)?;
        for prime in &split.primes {
            let mut e = 0u32;
            let mut cur = ideal.clone();
            while ideal_subset_of_prime(field, &cur, prime) {
                cur = divide_by_prime(field, &cur, prime, p);
                e += 1;
            }
            if e > 0 {
                out.push((prime.clone(), e));
            }
        }
    }
    // the factorization must reconstruct the ideal exactly
    let mut check = Ideal::one();
    for (prime, e) in &out {
        check = ideal_mul(field, &check, &ideal_pow(field, prime, *e));
    }
    if check != *ideal {
        return Err(Error::theorem(format!(
            "factorization of {ideal} reconstructed {check}"
        )));
    }
    Ok(out)
}

/// The ideal square root, present iff every prime exponent is even.
pub fn ideal_sqrt(field: &QuadField, ideal: &Ideal) -> Result<Option<Ideal>> {
    let factors = factorize(field, ideal)?;
    if factors.iter().any(|(_, e)| e % 2 == 1) {
        return Ok(None);
    }
    let mut root = Ideal::one();
    for (prime, e) in factors {
        root = ideal_mul(field, &root, &ideal_pow(field, &prime, e / 2));
    }
    Ok(Some(root))
}

/// The quadratic form of the primitive part of an ideal: norm a, middle
/// coefficient 2b + t.
pub(crate) fn form_of_ideal(field: &QuadField, ideal: &Ideal) -> Result<QForm> {
    let a: i128 = ideal
        .a
        .to_string()
        .parse()
        .map_err(|_| Error::domain("ideal too large for form arithmetic"))?;
    let b: i128 = ideal
        .b
        .to_string()
        .parse()
        .map_err(|_| Error::domain("ideal too large for form arithmetic"))?;
    let t = field.omega_trace() as i128;
    let delta = field.delta() as i128;
    let bb = 2 * b + t;
    let c = (bb * bb - delta) / (4 * a);
    debug_assert_eq!((bb * bb - delta) % (4 * a), 0);
    Ok(QForm::new(a, bb, c))
}

/// A generator of the ideal in the ordinary sense, if principal.
///
/// Imaginary and real fields both go through form reduction with
/// transformation tracking: the primitive part of the ideal is principal
/// exactly when its form lies in the cycle of the (+-1)-lead unit forms, and
/// the tracked matrices exhibit an element of norm +-(ideal norm).
pub fn principal_generator(field: &QuadField, ideal: &Ideal) -> Result<Option<FieldElement>> {
    if field.is_rational() {
        return Ok(Some(FieldElement::new(ideal.c.clone(), BigInt::zero())));
    }
    let f = form_of_ideal(field, ideal)?;
    let (r, m1) = reduce(&f);
    let cycles = principal_cycles(field)?;
    let m2 = match (cycles.lookup_plus(&r), cycles.lookup_minus(&r)) {
        (Some(m), _) => m,
        (None, Some(m)) => m,
        (None, None) => return Ok(None),
    };
    let w = m1.mul(&m2.inverse_unimodular());
    let (wx, wy) = w.first_column();
    // gamma = wx * a + wy * (b + w), scaled back by the content
    let gamma_prim = FieldElement::new(&wx * &ideal.a + &wy * &ideal.b, wy);
    let gamma = FieldElement::new(&gamma_prim.x * &ideal.c, &gamma_prim.y * &ideal.c);
    debug_assert_eq!(
        field.norm(&gamma).abs(),
        ideal.norm(field),
        "extracted generator has wrong norm"
    );
    Ok(Some(gamma))
}

/// A totally positive generator, if one exists: take any generator and move
/// its signature into the all-positive class using unit signatures.
pub fn strict_generator(field: &QuadField, ideal: &Ideal) -> Result<Option<FieldElement>> {
    let Some(gamma) = principal_generator(field, ideal)? else {
        return Ok(None);
    };
    if field.is_rational() {
        // principal_generator returns the positive rational generator
        return Ok(Some(gamma));
    }
    let sig = field.signature(&gamma)?;
    if sig.iter().all(|&b| !b) {
        return Ok(Some(gamma));
    }
    let units = crate::unit::unit_structure(field)?;
    let Some(coeffs) = units.sign_matrix.solve(&sig) else {
        return Ok(None);
    };
    let mut adjusted = gamma;
    for (i, &take) in coeffs.iter().enumerate() {
        if take {
            adjusted = field.mul(&adjusted, &units.basis[i]);
        }
    }
    debug_assert!(field.is_totally_positive(&adjusted)?);
    Ok(Some(adjusted))
}
