//! Acceptance suite: one test per criterion, each printing a pass line.
//! Criteria 1, 2, 7 and 8 read a shared single-worker scan of every
//! squarefree |d| <= 300; run with `--nocapture` to see the lines.

use num_bigint::BigInt;
use selmer::field::{FieldElement, QuadField};
use selmer::ideal::{ideal_mul, Ideal};
use selmer::selmer::{
    lift_from_rational, norm_to_rational, representative_coprime_to, selmer_space,
    selmer_subspace, SubspaceKind,
};
use selmer::verify::{reciprocity_rng, sample_pair, verify_field, Config, FieldReport, Verdict};
use std::sync::OnceLock;
use std::time::Duration;

fn fe(x: i64, y: i64) -> FieldElement {
    FieldElement::from_i64(x, y)
}

static SCAN: OnceLock<(Vec<FieldReport>, Duration)> = OnceLock::new();

/// Single-worker verification of every squarefree d with 2 <= |d| <= 300.
fn full_scan() -> &'static (Vec<FieldReport>, Duration) {
    SCAN.get_or_init(|| {
        let cfg = Config::default();
        let started = std::time::Instant::now();
        let mut reports = Vec::new();
        for d in selmer::verify::squarefree_range(-300, 300) {
            if d.abs() < 2 {
                continue;
            }
            reports.push(verify_field(d, &cfg).expect("field verification aborted"));
        }
        (reports, started.elapsed())
    })
}

fn check_everywhere(reports: &[FieldReport], name: &str) {
    for report in reports {
        assert_eq!(
            report.checks[name],
            Verdict::Pass,
            "d = {}: check {name} did not pass",
            report.d
        );
    }
}

#[test]
fn criterion_01_selmer_dimension_table() {
    let (reports, elapsed) = full_scan();
    assert_eq!(reports.len(), 364);
    check_everywhere(reports, "dimension_table");
    for report in reports {
        assert_eq!(report.dim_sel, report.rho + report.r + report.s, "d = {}", report.d);
        assert_eq!(report.dim_sel_plus, report.rho_plus + report.s, "d = {}", report.d);
        assert_eq!(report.dim_sel4, report.rho_plus, "d = {}", report.d);
        assert_eq!(report.dim_sel4_plus, report.rho, "d = {}", report.d);
        assert_eq!(report.rho4, report.rho_plus + report.s, "d = {}", report.d);
        assert_eq!(report.rho4_plus, report.rho + report.r + report.s, "d = {}", report.d);
    }
    assert!(
        *elapsed < Duration::from_secs(120),
        "single-worker scan took {elapsed:?}, over the 2 minute budget"
    );
    println!(
        "criterion 01 (Selmer dimension table, {} fields in {elapsed:.1?}): PASS",
        reports.len()
    );
}

#[test]
fn criterion_02_rho_plus_triple_agreement() {
    let (reports, _) = full_scan();
    check_everywhere(reports, "rho_plus_triple");
    println!("criterion 02 (triple agreement of rho+): PASS");
}

#[test]
fn criterion_03_worked_examples() {
    // Q(sqrt(10)): Sel4 = Sel+ = Sel4+ = <5>
    let f10 = QuadField::new(10).unwrap();
    let five = fe(5, 0);
    for kind in [SubspaceKind::Plus, SubspaceKind::Four, SubspaceKind::FourPlus] {
        let sub = selmer_subspace(&f10, kind).unwrap();
        assert_eq!(sub.dim, 1);
        assert!(
            f10.same_square_class(&sub.basis[0], &five),
            "{kind:?} generator is not the class of 5"
        );
    }

    // Q(sqrt(34)): E4+/E^2 = <35 + 6 sqrt(34)>, narrow class group of
    // order 4, strictly-principal 2-torsion rank 0
    let f34 = QuadField::new(34).unwrap();
    let units = selmer::unit::unit_structure(&f34).unwrap();
    assert_eq!(units.e4_plus_basis, vec![fe(35, 6)]);
    let narrow = selmer::classgroup::narrow_class_group(&f34).unwrap();
    assert_eq!(narrow.order, 4);
    assert_eq!(narrow.elementary_divisors, vec![4]);
    let report34 = verify_field(34, &Config::default()).unwrap();
    assert_eq!(report34.clp_rank, 0);

    // Sel(Q) = <-1>
    let q = QuadField::rational();
    let sel_q = selmer_space(&q).unwrap();
    assert_eq!(sel_q.basis, vec![fe(-1, 0)]);
    assert_eq!(sel_q.dim, 1);
    println!("criterion 03 (worked examples reproduced): PASS");
}

#[test]
fn criterion_04_pairings_perfect_to_100() {
    let (reports, _) = full_scan();
    let mut counted = 0;
    for report in reports.iter().filter(|r| r.d.abs() <= 100) {
        for pairing in &report.pairings {
            assert_eq!(
                pairing.verdict,
                selmer::symbols::PairingVerdict::Perfect,
                "d = {}, {:?}: rank {}/{}",
                report.d,
                pairing.kind,
                pairing.achieved_rank,
                pairing.expected_rank
            );
            counted += 1;
        }
    }
    assert_eq!(counted % 4, 0);
    assert!(counted >= 4 * 120);
    println!("criterion 04 (all four pairings perfect, |d| <= 100): PASS");
}

const FUZZ_FIELDS: [i64; 10] = [2, -2, 5, -5, 10, -10, 3, 15, 34, -1];

#[test]
fn criterion_05_reciprocity_fuzz() {
    let cfg = Config {
        seed: 20260809,
        fuzz_height: 50,
        ..Config::default()
    };
    for d in FUZZ_FIELDS {
        let field = QuadField::new(d).unwrap();
        let mut rng = reciprocity_rng(&cfg, d);
        let mut accepted = 0u32;
        let mut attempts = 0u64;
        while accepted < 500 {
            attempts += 1;
            assert!(attempts < 4_000_000, "sampler starved for d = {d}");
            let (alpha, beta) = sample_pair(&mut rng, cfg.fuzz_height);
            match selmer::symbols::reciprocity_check(&field, &alpha, &beta).unwrap() {
                selmer::symbols::ReciprocityOutcome::Pass => accepted += 1,
                selmer::symbols::ReciprocityOutcome::Fail => {
                    panic!("reciprocity mismatch for d = {d}: alpha = {alpha}, beta = {beta}")
                }
                selmer::symbols::ReciprocityOutcome::Skipped => {}
            }
        }
        assert_eq!(accepted, 500);
    }
    println!("criterion 05 (reciprocity fuzz, 10 fields x 500 pairs): PASS");
}

#[test]
fn criterion_06_supplementary_law() {
    let mut total = 0usize;
    let mut inconclusive: Vec<(i64, Ideal)> = Vec::new();
    for d in FUZZ_FIELDS {
        let field = QuadField::new(d).unwrap();
        for prime in selmer::symbols::odd_prime_ideals(&field, 500).unwrap() {
            total += 1;
            match selmer::symbols::supplementary_check(&field, &prime, 4000).unwrap() {
                selmer::symbols::SupplementaryOutcome::Verified => {}
                selmer::symbols::SupplementaryOutcome::Refuted => {
                    panic!("supplementary law refuted at d = {d}, prime {prime}")
                }
                selmer::symbols::SupplementaryOutcome::Inconclusive => {
                    inconclusive.push((d, prime));
                }
            }
        }
    }
    let rate = inconclusive.len() as f64 / total as f64;
    assert!(
        rate < 0.05,
        "inconclusive rate {rate} over {total} prime ideals"
    );
    // raising the bound must resolve spot-checked inconclusive cases
    for (d, prime) in inconclusive.iter().take(3) {
        let field = QuadField::new(*d).unwrap();
        assert_eq!(
            selmer::symbols::supplementary_check(&field, prime, 16000).unwrap(),
            selmer::symbols::SupplementaryOutcome::Verified,
            "d = {d}, prime {prime} still inconclusive at the raised bound"
        );
    }
    println!(
        "criterion 06 (supplementary law, {total} prime ideals, {} inconclusive): PASS",
        inconclusive.len()
    );
}

#[test]
fn criterion_07_rank_inequalities_and_relations() {
    let (reports, _) = full_scan();
    for name in [
        "armitage_frohlich",
        "unit_lower_bound",
        "subgroup_index",
        "class_number_relation",
        "clp_rank",
    ] {
        check_everywhere(reports, name);
    }
    println!("criterion 07 (rank inequalities, class number and Clp relations): PASS");
}

#[test]
fn criterion_08_lagarias_uniformity() {
    let (reports, _) = full_scan();
    check_everywhere(reports, "lagarias_uniform");
    for d in [17i64, 73, 97] {
        let report =
            reports.iter().find(|r| r.d == d).expect("field in scan range");
        assert!(
            report.lagarias.iter().all(|&b| b),
            "d = {d} is x^2 + 16 y^2 but some condition is false"
        );
    }
    println!("criterion 08 (eight equivalences mutually consistent): PASS");
}

#[test]
fn criterion_09_property_suites() {
    use rand::Rng;
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5e1f);

    // (a) symbols are well defined on classes: invariant under multiplying
    // by squares and under changing the coprime representative
    let pool = [10i64, -5, 3, 34, -1, 5];
    let fields: Vec<QuadField> = pool.iter().map(|&d| QuadField::new(d).unwrap()).collect();
    let mut cases = 0;
    while cases < 1000 {
        let field = &fields[rng.gen_range(0..fields.len())];
        let sel = selmer_space(field).unwrap();
        let mask: u32 = rng.gen_range(0..(1 << sel.dim));
        let coeffs: Vec<bool> = (0..sel.dim).map(|i| mask >> i & 1 == 1).collect();
        let omega = sel.element_from_coeffs(field, &coeffs);
        let xi = loop {
            let cand = fe(rng.gen_range(-20..=20), rng.gen_range(-20..=20));
            if !cand.is_zero() && field.has_odd_norm(&cand) {
                break cand;
            }
        };
        let p: u64 = *[3u64, 5, 7, 11, 13, 17, 19].get(rng.gen_range(0..7)).unwrap();
        let split = selmer::ideal::split_prime(field, p).unwrap();
        let target = split.primes[rng.gen_range(0..split.primes.len())].clone();
        if !target.has_odd_norm(field) {
            continue;
        }
        let s1 = selmer::symbols::symbol_ideal(field, &omega, &target).unwrap();
        let scaled = field.mul(&omega, &field.mul(&xi, &xi));
        let s2 = selmer::symbols::symbol_ideal(field, &scaled, &target).unwrap();
        assert_eq!(s1, s2, "square multiplication changed a symbol");
        // representative change: both representatives have equal mod-4
        // coordinates and equal symbols
        let modulus = ideal_mul(field, &target, &Ideal::from_integer(2));
        let rep1 = representative_coprime_to(field, &omega, &modulus).unwrap();
        let rep2 = representative_coprime_to(field, &scaled, &modulus).unwrap();
        assert_eq!(
            field.mod4_coords(&rep1).unwrap(),
            field.mod4_coords(&rep2).unwrap(),
            "mod-4 coordinates depend on the representative"
        );
        assert_eq!(
            selmer::symbols::residue_symbol(field, &rep1, &target).unwrap()
                * selmer::symbols::residue_symbol(field, &rep2, &target).unwrap(),
            1,
            "symbol depends on the representative"
        );
        cases += 1;
    }

    // (b) homomorphism laws over the full residue enumeration
    for field in &fields {
        let units = field.mod4_data().unwrap().unit_residues.clone();
        for a in &units {
            for b in &units {
                let ca = field.mod4_coords(a).unwrap();
                let cb = field.mod4_coords(b).unwrap();
                let cab = field.mod4_coords(&field.mul(a, b)).unwrap();
                let expected: Vec<bool> = ca.iter().zip(&cb).map(|(&x, &y)| x ^ y).collect();
                assert_eq!(cab, expected);
            }
        }
        if field.real_places() > 0 {
            let elems = [fe(1, 1), fe(-2, 3), fe(5, -1), fe(3, 2)];
            for a in &elems {
                for b in &elems {
                    let sa = field.signature(a).unwrap();
                    let sb = field.signature(b).unwrap();
                    let sab = field.signature(&field.mul(a, b)).unwrap();
                    let expected: Vec<bool> = sa.iter().zip(&sb).map(|(&x, &y)| x ^ y).collect();
                    assert_eq!(sab, expected);
                }
                assert!(field
                    .signature(&field.mul(a, a))
                    .unwrap()
                    .iter()
                    .all(|&bit| !bit));
            }
        }
    }

    // (c) norm o lift is trivial on Sel(Q) for 20 fields
    let mut checked = 0;
    for d in selmer::verify::squarefree_range(2, 40)
        .into_iter()
        .chain(selmer::verify::squarefree_range(-15, -2))
    {
        let field = QuadField::new(d).unwrap();
        for a in [-1i64, 2, -3, 30] {
            let lifted = lift_from_rational(&field, &BigInt::from(a)).unwrap();
            assert_eq!(
                norm_to_rational(&field, &lifted).unwrap(),
                BigInt::from(1),
                "norm o lift({a}) nontrivial over d = {d}"
            );
        }
        checked += 1;
        if checked == 20 {
            break;
        }
    }
    assert!(checked >= 20);
    println!("criterion 09 (property suites): PASS");
}
