//! Binary quadratic forms with transformation tracking.
//!
//! A form (a, b, c) stands for a x^2 + b x y + c y^2 of discriminant
//! Delta = b^2 - 4ac. Reduction, the cycle structure of reduced indefinite
//! forms and Gauss composition together realize the narrow class group; the
//! tracked SL2(Z) matrices turn a principality test into an explicit
//! generator, which is what the Selmer machinery needs.
//!
//! An ideal a*Z + (b+w)*Z of norm a corresponds to the form
//! (a, 2b + t, *) where t is the trace of w; an element m*a + n*(b+w) has
//! norm a * f(m, n), so the ideal is principal exactly when f represents
//! +1 or -1, and the reduction matrices exhibit the representation.

use crate::error::{Error, Result};
use crate::field::QuadField;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Primitive integral binary quadratic form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QForm {
    pub a: i128,
    pub b: i128,
    pub c: i128,
}

impl QForm {
    pub fn new(a: i128, b: i128, c: i128) -> Self {
        QForm { a, b, c }
    }

    pub fn disc(&self) -> i128 {
        self.b * self.b - 4 * self.a * self.c
    }

    pub fn eval(&self, x: &BigInt, y: &BigInt) -> BigInt {
        let (a, b, c) = (BigInt::from(self.a), BigInt::from(self.b), BigInt::from(self.c));
        a * x * x + b * x * y + c * y * y
    }

    pub fn content(&self) -> i128 {
        gcd3(self.a, self.b, self.c)
    }
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn gcd3(a: i128, b: i128, c: i128) -> i128 {
    gcd(gcd(a, b), c)
}

fn xgcd128(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

fn isqrt128(n: i128) -> i128 {
    if n < 0 {
        panic!("isqrt of negative");
    }
    let mut r = (n as f64).sqrt() as i128;
    while r > 0 && r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Column-action 2x2 integer matrix: (x, y) maps to (p x + q y, r x + s y).
/// Entries are big integers because cycle traversals accumulate
/// fundamental-unit-sized coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat2 {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
    pub s: BigInt,
}

impl Mat2 {
    pub fn identity() -> Self {
        Mat2 {
            p: BigInt::one(),
            q: BigInt::zero(),
            r: BigInt::zero(),
            s: BigInt::one(),
        }
    }

    pub fn new_i64(p: i64, q: i64, r: i64, s: i64) -> Self {
        Mat2 {
            p: BigInt::from(p),
            q: BigInt::from(q),
            r: BigInt::from(r),
            s: BigInt::from(s),
        }
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        Mat2 {
            p: &self.p * &other.p + &self.q * &other.r,
            q: &self.p * &other.q + &self.q * &other.s,
            r: &self.r * &other.p + &self.s * &other.r,
            s: &self.r * &other.q + &self.s * &other.s,
        }
    }

    pub fn det(&self) -> BigInt {
        &self.p * &self.s - &self.q * &self.r
    }

    /// Inverse of a determinant +1 matrix.
    pub fn inverse_unimodular(&self) -> Mat2 {
        debug_assert!(self.det().is_one());
        Mat2 {
            p: self.s.clone(),
            q: -&self.q,
            r: -&self.r,
            s: self.p.clone(),
        }
    }

    pub fn apply(&self, x: &BigInt, y: &BigInt) -> (BigInt, BigInt) {
        (&self.p * x + &self.q * y, &self.r * x + &self.s * y)
    }

    /// First column, i.e. the image of (1, 0).
    pub fn first_column(&self) -> (BigInt, BigInt) {
        (self.p.clone(), self.r.clone())
    }

    /// The translation [[1, k], [0, 1]].
    pub fn translation(k: i128) -> Mat2 {
        Mat2 {
            p: BigInt::one(),
            q: BigInt::from(k),
            r: BigInt::zero(),
            s: BigInt::one(),
        }
    }
}

/// f composed with the translation [[1, m], [0, 1]]: b grows by 2am.
fn translate(f: QForm, m: i128) -> QForm {
    QForm {
        a: f.a,
        b: f.b + 2 * f.a * m,
        c: f.a * m * m + f.b * m + f.c,
    }
}

/// True iff the form is reduced. Definite convention: -a < b <= a <= c with
/// b >= 0 when a = c. Indefinite convention: |sqrt(D) - 2|a|| < b < sqrt(D),
/// checked with exact integer comparisons.
pub fn is_reduced(f: &QForm) -> bool {
    let d = f.disc();
    if d < 0 {
        if f.a <= 0 {
            return false;
        }
        let ok_range = -f.a < f.b && f.b <= f.a && f.a <= f.c;
        let ok_tie = f.a != f.c || f.b >= 0;
        ok_range && ok_tie
    } else {
        if f.b <= 0 || f.b * f.b >= d {
            return false;
        }
        let two_abs_a = 2 * f.a.abs();
        let upper = f.b + two_abs_a;
        if upper * upper <= d {
            return false;
        }
        let low = two_abs_a - f.b;
        low < 0 || low * low < d
    }
}

/// One reduction / cycle step for indefinite forms:
/// (a, b, c) -> (c, b', *) with b' = -b mod 2|c| chosen in the canonical
/// window. Returns the new form and the step matrix.
pub fn rho(f: &QForm) -> (QForm, Mat2) {
    let d = f.disc();
    debug_assert!(d > 0 && f.c != 0);
    let s = isqrt128(d);
    let two_c = 2 * f.c.abs();
    let r = (-f.b).rem_euclid(two_c);
    let b_new = if f.c.abs() > s {
        if r <= f.c.abs() {
            r
        } else {
            r - two_c
        }
    } else {
        s - (s - r).rem_euclid(two_c)
    };
    let m = (f.b + b_new) / (2 * f.c);
    debug_assert_eq!((f.b + b_new) % (2 * f.c), 0);
    let c_new = (b_new * b_new - d) / (4 * f.c);
    let g = QForm::new(f.c, b_new, c_new);
    debug_assert_eq!(g.disc(), d);
    let step = Mat2 {
        p: BigInt::zero(),
        q: BigInt::from(-1),
        r: BigInt::one(),
        s: BigInt::from(m),
    };
    (g, step)
}

/// Reduce a form, returning the reduced form and M with f o M = reduced.
pub fn reduce(f: &QForm) -> (QForm, Mat2) {
    let d = f.disc();
    if d < 0 {
        reduce_definite(f)
    } else {
        let mut cur = *f;
        let mut m = Mat2::identity();
        // rho strictly shrinks |c| while the form is far from reduced
        for _ in 0..10_000 {
            if is_reduced(&cur) {
                return (cur, m);
            }
            let (next, step) = rho(&cur);
            m = m.mul(&step);
            cur = next;
        }
        panic!("indefinite reduction did not terminate for {f:?}");
    }
}

fn reduce_definite(f: &QForm) -> (QForm, Mat2) {
    let mut cur = *f;
    let mut m = Mat2::identity();
    assert!(cur.a > 0, "definite reduction expects a positive definite form");
    loop {
        // normalize b into (-a, a]
        if !(-cur.a < cur.b && cur.b <= cur.a) {
            let k = cur.a - cur.b;
            let step = k.div_euclid(2 * cur.a);
            cur = translate(cur, step);
            m = m.mul(&Mat2::translation(step));
        }
        if cur.a > cur.c {
            // swap: (a, b, c) -> (c, -b, a)
            cur = QForm::new(cur.c, -cur.b, cur.a);
            m = m.mul(&Mat2::new_i64(0, -1, 1, 0));
            continue;
        }
        if cur.a == cur.c && cur.b < 0 {
            cur = QForm::new(cur.c, -cur.b, cur.a);
            m = m.mul(&Mat2::new_i64(0, -1, 1, 0));
            continue;
        }
        break;
    }
    (cur, m)
}

/// Gauss composition of two primitive forms of the same discriminant, with
/// positive leading coefficients. The output is not reduced.
pub fn compose(f1: &QForm, f2: &QForm) -> QForm {
    let d = f1.disc();
    debug_assert_eq!(d, f2.disc());
    debug_assert!(f1.a > 0 && f2.a > 0);
    let (f1, f2) = if f1.a > f2.a { (f2, f1) } else { (f1, f2) };
    let s = (f1.b + f2.b) / 2;
    let n = f2.b - s;
    let (y1, d0) = if f2.a % f1.a == 0 {
        (0i128, f1.a)
    } else {
        let (g, u, _) = xgcd128(f2.a, f1.a);
        (u, g)
    };
    let (x2, y2, d1) = if s % d0 == 0 {
        (0i128, -1i128, d0)
    } else {
        let (g, u, v) = xgcd128(s, d0);
        (u, -v, g)
    };
    let v1 = f1.a / d1;
    let v2 = f2.a / d1;
    let r = (y1 * y2 * n - x2 * f2.c).rem_euclid(v1);
    let b3 = f2.b + 2 * v2 * r;
    let a3 = v1 * v2;
    let c3 = (b3 * b3 - d) / (4 * a3);
    debug_assert_eq!((b3 * b3 - d) % (4 * a3), 0);
    QForm::new(a3, b3, c3)
}

/// All reduced primitive forms of the given fundamental discriminant,
/// sorted lexicographically. For negative discriminants only the positive
/// definite ones are listed.
pub fn reduced_forms(delta: i64) -> Vec<QForm> {
    let d = delta as i128;
    let mut out = Vec::new();
    if d < 0 {
        let bound = isqrt128(-d / 3);
        for a in 1..=bound.max(1) {
            for b in -a..=a {
                if (b - d).rem_euclid(2) != 0 {
                    continue;
                }
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                let f = QForm::new(a, b, c);
                if is_reduced(&f) && f.content() == 1 {
                    out.push(f);
                }
            }
        }
    } else {
        let s = isqrt128(d);
        for b in 1..=s {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let t = (b * b - d) / 4; // negative
            let limit = -t;
            for a_abs in 1..=limit {
                if limit % a_abs != 0 {
                    continue;
                }
                for a in [a_abs, -a_abs] {
                    let c = t / a;
                    let f = QForm::new(a, b, c);
                    if is_reduced(&f) && f.content() == 1 {
                        out.push(f);
                    }
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// The rho-orbit of a reduced indefinite form, starting at the given form.
pub fn cycle_of(start: &QForm) -> Vec<QForm> {
    debug_assert!(is_reduced(start) && start.disc() > 0);
    let mut out = vec![*start];
    let mut cur = *start;
    loop {
        let (next, _) = rho(&cur);
        if next == *start {
            break;
        }
        out.push(next);
        cur = next;
        assert!(out.len() < 1_000_000, "cycle runaway");
    }
    out
}

/// Reduced representatives of the principal and the negated-principal form
/// classes, with matrices relating each cycle member back to the unreduced
/// unit forms (leading coefficient +1 resp. -1). This is the per-field
/// infrastructure behind principality tests and generator extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalCycles {
    /// Members of the cycle of the principal form; form = f_unit o M.
    pub plus: Vec<(QForm, Mat2)>,
    /// Members of the cycle of the (-1)-form; form = g_unit o M. Empty for
    /// imaginary fields.
    pub minus: Vec<(QForm, Mat2)>,
    plus_index: HashMap<QForm, usize>,
    minus_index: HashMap<QForm, usize>,
}

impl PrincipalCycles {
    pub fn lookup_plus(&self, f: &QForm) -> Option<&Mat2> {
        self.plus_index.get(f).map(|&i| &self.plus[i].1)
    }

    pub fn lookup_minus(&self, f: &QForm) -> Option<&Mat2> {
        self.minus_index.get(f).map(|&i| &self.minus[i].1)
    }

    fn build(field: &QuadField) -> Result<PrincipalCycles> {
        if field.is_rational() {
            return Err(Error::domain("no form cycles over the rational field"));
        }
        let delta = field.delta() as i128;
        let t = field.omega_trace() as i128;
        // form of the unit ideal Z + wZ: leading coefficient 1
        let f_unit = QForm::new(1, t, (t * t - delta) / 4);
        debug_assert_eq!(f_unit.disc(), delta);
        let plus = Self::trace_cycle(&f_unit);
        let minus = if field.is_real_quadratic() {
            let g_unit = QForm::new(-1, t, -(t * t - delta) / 4);
            debug_assert_eq!(g_unit.disc(), delta);
            Self::trace_cycle(&g_unit)
        } else {
            Vec::new()
        };
        let plus_index = plus
            .iter()
            .enumerate()
            .map(|(i, (f, _))| (*f, i))
            .collect();
        let minus_index = minus
            .iter()
            .enumerate()
            .map(|(i, (f, _))| (*f, i))
            .collect();
        Ok(PrincipalCycles {
            plus,
            minus,
            plus_index,
            minus_index,
        })
    }

    fn trace_cycle(unit_form: &QForm) -> Vec<(QForm, Mat2)> {
        let (r0, m0) = reduce(unit_form);
        if unit_form.disc() < 0 {
            return vec![(r0, m0)];
        }
        let mut out = vec![(r0, m0.clone())];
        let mut cur = r0;
        let mut m = m0;
        loop {
            let (next, step) = rho(&cur);
            m = m.mul(&step);
            if next == r0 {
                break;
            }
            out.push((next, m.clone()));
            cur = next;
            assert!(out.len() < 1_000_000, "principal cycle runaway");
        }
        out
    }
}

/// Per-field cached principal cycles.
pub fn principal_cycles(field: &QuadField) -> Result<&PrincipalCycles> {
    field
        .caches
        .cycles
        .get_or_init(|| PrincipalCycles::build(field))
        .as_ref()
        .map_err(Clone::clone)
}
