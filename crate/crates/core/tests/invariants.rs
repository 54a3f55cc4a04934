//! Cross-module invariants on randomized inputs: ideal arithmetic laws,
//! square-root round trips, generator exactness, subspace intersections,
//! and the vanishing of Sel_4+ symbols on principal odd ideals.

use num_bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use selmer::field::{FieldElement, QuadField};
use selmer::ideal::{
    factorize, ideal_conj, ideal_from_element, ideal_mul, ideal_sqrt, principal_generator,
    split_prime, strict_generator, Ideal,
};
use selmer::selmer::{selmer_space, selmer_subspace, SubspaceKind};
use selmer::symbols::symbol_ideal;

fn fe(x: i64, y: i64) -> FieldElement {
    FieldElement::from_i64(x, y)
}

fn random_ideal(rng: &mut ChaCha8Rng, field: &QuadField) -> Ideal {
    loop {
        let alpha = fe(rng.gen_range(-30..=30), rng.gen_range(-30..=30));
        if alpha.is_zero() {
            continue;
        }
        return ideal_from_element(field, &alpha).unwrap();
    }
}

#[test]
fn ideal_norm_multiplicative_and_conjugate_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for d in [10i64, -5, 13, -23, 34] {
        let field = QuadField::new(d).unwrap();
        for _ in 0..60 {
            let a = random_ideal(&mut rng, &field);
            let b = random_ideal(&mut rng, &field);
            let prod = ideal_mul(&field, &a, &b);
            assert_eq!(prod.norm(&field), a.norm(&field) * b.norm(&field));
            // a * conj(a) = (norm a)
            let n = ideal_mul(&field, &a, &ideal_conj(&field, &a));
            assert_eq!(n.c, a.norm(&field));
            assert!(n.a == BigInt::from(1));
        }
    }
}

#[test]
fn ideal_sqrt_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for d in [10i64, -5, 13, -23] {
        let field = QuadField::new(d).unwrap();
        for _ in 0..40 {
            let b = random_ideal(&mut rng, &field);
            let sq = ideal_mul(&field, &b, &b);
            assert_eq!(ideal_sqrt(&field, &sq).unwrap(), Some(b));
        }
    }
}

#[test]
fn extracted_generators_are_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for d in [10i64, 34, 79, -5, -23] {
        let field = QuadField::new(d).unwrap();
        for _ in 0..40 {
            let a = random_ideal(&mut rng, &field);
            // principal by construction, so extraction must succeed and
            // regenerate the same HNF
            let g = principal_generator(&field, &a).unwrap().expect("principal");
            assert_eq!(ideal_from_element(&field, &g).unwrap(), a);
            if let Some(s) = strict_generator(&field, &a).unwrap() {
                assert!(field.is_totally_positive(&s).unwrap());
                assert_eq!(ideal_from_element(&field, &s).unwrap(), a);
            }
        }
    }
}

#[test]
fn four_plus_subspace_is_the_intersection() {
    for d in [2i64, 3, 10, 15, 34, -1, -5, -21, 105] {
        let field = QuadField::new(d).unwrap();
        let sel = selmer_space(&field).unwrap();
        let plus = selmer_subspace(&field, SubspaceKind::Plus).unwrap();
        let four = selmer_subspace(&field, SubspaceKind::Four).unwrap();
        let both = selmer_subspace(&field, SubspaceKind::FourPlus).unwrap();
        // spans as sets of coefficient vectors
        let span = |coeffs: &[Vec<bool>]| -> std::collections::HashSet<Vec<bool>> {
            let dim = sel.dim;
            let mut out = std::collections::HashSet::new();
            for mask in 0u32..(1 << coeffs.len()) {
                let mut v = vec![false; dim];
                for (i, c) in coeffs.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        for (slot, &bit) in v.iter_mut().zip(c) {
                            *slot ^= bit;
                        }
                    }
                }
                out.insert(v);
            }
            out
        };
        let inter: std::collections::HashSet<Vec<bool>> = span(&plus.coeffs)
            .intersection(&span(&four.coeffs))
            .cloned()
            .collect();
        assert_eq!(inter, span(&both.coeffs), "d = {d}");
    }
}

#[test]
fn selmer_basis_is_f2_independent() {
    // no nonempty sub-product of the basis is a square in F
    for d in [10i64, -5, 3, 34, 30, -21, 105] {
        let field = QuadField::new(d).unwrap();
        let sel = selmer_space(&field).unwrap();
        for mask in 1u32..(1 << sel.dim) {
            let coeffs: Vec<bool> = (0..sel.dim).map(|i| mask >> i & 1 == 1).collect();
            let prod = sel.element_from_coeffs(&field, &coeffs);
            assert!(
                !field.is_square(&prod),
                "d = {d}: sub-product {prod} is a square"
            );
        }
    }
}

#[test]
fn elementary_divisors_multiply_to_order() {
    for d in [-5i64, -23, -14, -21, 10, 34, 79, 105, 30] {
        let field = QuadField::new(d).unwrap();
        for g in [
            selmer::classgroup::narrow_class_group(&field).unwrap(),
            selmer::classgroup::class_group(&field).unwrap(),
        ] {
            let product: u64 = g.elementary_divisors.iter().product();
            assert_eq!(product, g.order, "d = {d}");
            // ascending divisibility chain
            for pair in g.elementary_divisors.windows(2) {
                assert_eq!(pair[1] % pair[0], 0, "d = {d}");
            }
            assert_eq!(
                g.two_rank,
                g.elementary_divisors.iter().filter(|&&x| x % 2 == 0).count()
            );
        }
    }
}

#[test]
fn odd_class_number_means_unit_selmer() {
    // h odd: the Selmer basis has no class-group part
    for d in [2i64, 3, 5, 13, -1, -2, -3, -7, -11] {
        let field = QuadField::new(d).unwrap();
        let h = selmer::classgroup::class_group(&field).unwrap().order;
        assert_eq!(h % 2, 1, "test fields must have odd h, d = {d}");
        let sel = selmer_space(&field).unwrap();
        let units = selmer::unit::unit_structure(&field).unwrap();
        assert_eq!(sel.basis, units.basis, "d = {d}");
    }
}

#[test]
fn four_plus_classes_vanish_on_principal_odd_ideals() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for d in [10i64, -5, 34, 15] {
        let field = QuadField::new(d).unwrap();
        let four_plus = selmer_subspace(&field, SubspaceKind::FourPlus).unwrap();
        if four_plus.dim == 0 {
            continue;
        }
        let mut tested = 0;
        while tested < 25 {
            let gamma = fe(rng.gen_range(-40..=40), rng.gen_range(-40..=40));
            if gamma.is_zero() || !field.has_odd_norm(&gamma) {
                continue;
            }
            let principal = ideal_from_element(&field, &gamma).unwrap();
            for omega in &four_plus.basis {
                assert_eq!(
                    symbol_ideal(&field, omega, &principal).unwrap(),
                    1,
                    "d = {d}: ({omega} / ({gamma})) should be trivial"
                );
            }
            tested += 1;
        }
    }
}

#[test]
fn factorization_matches_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in [10i64, -5, 17, -6] {
        let field = QuadField::new(d).unwrap();
        for _ in 0..30 {
            let a = random_ideal(&mut rng, &field);
            let n = a.norm(&field);
            let mut recon = BigInt::from(1);
            for (prime, e) in factorize(&field, &a).unwrap() {
                for _ in 0..e {
                    recon *= prime.norm(&field);
                }
            }
            assert_eq!(recon, n);
        }
    }
}

#[test]
fn split_primes_multiply_to_p() {
    for d in [10i64, -5, 17, 73, -163] {
        let field = QuadField::new(d).unwrap();
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23] {
            let split = split_prime(&field, p).unwrap();
            let product = split
                .primes
                .iter()
                .fold(Ideal::one(), |acc, q| ideal_mul(&field, &acc, q));
            let expected = match split.kind {
                selmer::ideal::SplitKind::Split => Ideal::from_integer(p as i64),
                selmer::ideal::SplitKind::Inert => Ideal::from_integer(p as i64),
                selmer::ideal::SplitKind::Ramified => {
                    // the square of the ramified prime is (p)
                    assert_eq!(
                        ideal_mul(&field, &split.primes[0], &split.primes[0]),
                        Ideal::from_integer(p as i64)
                    );
                    continue;
                }
            };
            assert_eq!(product, expected, "d = {d}, p = {p}");
        }
    }
}
