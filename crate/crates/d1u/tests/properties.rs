//! Structural invariants checked across the whole public surface: group
//! axioms and characters, field axioms, the d1u oracle pair, translation
//! invariance, search completeness against naive enumeration, and the
//! certification consistency of the design module.

use d1u::constructions::{build, exp_construction, plan, square_map};
use d1u::design::{
    character_bases, frame_potential_gap, haar_point_check, solve_weights, unbiasedness_report,
};
use d1u::diffcalc::GroupFunction;
use d1u::fields::FiniteField;
use d1u::groups::{enumerate_abelian_groups, AbelianGroup, GroupElement};
use d1u::search::{search_group, SearchConfig, SearchStatus};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

// ---------------------------------------------------------------------------
// groups

fn groups_up_to(max_order: u64) -> Vec<AbelianGroup> {
    (1..=max_order)
        .flat_map(|n| enumerate_abelian_groups(n).unwrap())
        .collect()
}

#[test]
fn group_axioms_exhaustive() {
    for group in groups_up_to(64) {
        let elems: Vec<GroupElement> = group.elements().collect();
        let zero = group.zero();
        for u in &elems {
            // inverse exists and round-trips
            let minus = group.neg(u).unwrap();
            assert_eq!(group.add(u, &minus).unwrap(), zero);
            assert_eq!(group.add(u, &zero).unwrap(), *u);
            for v in &elems {
                assert_eq!(group.add(u, v).unwrap(), group.add(v, u).unwrap());
            }
        }
        // associativity on full triples for small groups, strided otherwise
        let stride = if group.order() <= 24 { 1 } else { 7 };
        for u in elems.iter().step_by(stride) {
            for v in elems.iter().step_by(stride) {
                for w in elems.iter().step_by(stride) {
                    let left = group.add(&group.add(u, v).unwrap(), w).unwrap();
                    let right = group.add(u, &group.add(v, w).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
    }
}

#[test]
fn character_orthogonality_and_multiplicativity() {
    for group in groups_up_to(64) {
        let elems: Vec<GroupElement> = group.elements().collect();
        for s in &elems {
            if *s != group.zero() {
                let total: Complex64 = elems
                    .iter()
                    .map(|e| group.character_value(s, e).unwrap())
                    .sum();
                assert!(
                    total.norm() < 1e-9,
                    "character sum for {group} index {s:?} is {total}"
                );
            }
            for u in elems.iter().step_by(3) {
                for v in elems.iter().step_by(5) {
                    let lhs = group.character_value(s, &group.add(u, v).unwrap()).unwrap();
                    let rhs =
                        group.character_value(s, u).unwrap() * group.character_value(s, v).unwrap();
                    assert!((lhs - rhs).norm() < 1e-12);
                }
            }
        }
    }
}

/// Independent partition counter: p(n) via "parts of size <= k".
fn partition_count(n: u64) -> u64 {
    let n = n as usize;
    let mut ways = vec![vec![0u64; n + 1]; n + 1];
    for row in ways.iter_mut() {
        row[0] = 1;
    }
    for k in 1..=n {
        for total in 1..=n {
            ways[k][total] = ways[k - 1][total] + if total >= k { ways[k][total - k] } else { 0 };
        }
    }
    ways[n][n]
}

#[test]
fn enumeration_count_matches_partition_oracle() {
    for n in 1..=200u64 {
        // independent factorization by trial division
        let mut expected = 1u64;
        let mut rest = n;
        let mut p = 2u64;
        while p * p <= rest {
            if rest % p == 0 {
                let mut e = 0u64;
                while rest % p == 0 {
                    rest /= p;
                    e += 1;
                }
                expected *= partition_count(e);
            }
            p += 1;
        }
        if rest > 1 {
            expected *= partition_count(1);
        }
        let got = enumerate_abelian_groups(n).unwrap().len() as u64;
        assert_eq!(got, expected, "class count mismatch at n = {n}");
    }
}

// ---------------------------------------------------------------------------
// fields

fn prime_powers_up_to(limit: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in 2..=limit {
        let is_prime = p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0);
        if !is_prime {
            continue;
        }
        let mut size = p;
        let mut k = 1u32;
        while size <= limit {
            out.push((p, k));
            size = match size.checked_mul(p) {
                Some(s) => s,
                None => break,
            };
            k += 1;
        }
    }
    out
}

#[test]
fn field_axioms_exhaustive() {
    for (p, k) in prime_powers_up_to(64) {
        let field = FiniteField::new(p, k).unwrap();
        let elems: Vec<_> = field.elements().collect();
        for a in &elems {
            for b in &elems {
                for c in &elems {
                    let left = field.mul(a, &field.add(b, c));
                    let right = field.add(&field.mul(a, b), &field.mul(a, c));
                    assert_eq!(left, right, "distributivity fails in GF({p}^{k})");
                }
            }
        }
        for a in elems.iter().skip(1) {
            let inv = field.inverse(a).unwrap();
            assert_eq!(field.mul(a, &inv), field.one());
        }
    }
}

#[test]
fn exponential_family_is_d1u() {
    for (p, k) in prime_powers_up_to(512) {
        let q = p.pow(k) - 1;
        if q < 2 {
            continue;
        }
        let f = exp_construction(q).unwrap();
        assert_eq!(f.codomain().order(), q + 1);
        assert!(
            f.is_d1u().unwrap().is_d1u,
            "exponential family fails at q = {q} (GF({p}^{k}))"
        );
    }
}

// ---------------------------------------------------------------------------
// diffcalc properties

/// Random function strategy: dimension, codomain class, then values.
fn group_function_strategy() -> impl Strategy<Value = GroupFunction> {
    (2usize..=16, 2u64..=30)
        .prop_flat_map(|(d, order)| {
            let classes = enumerate_abelian_groups(order).unwrap();
            (Just(d), 0..classes.len(), Just(classes))
        })
        .prop_flat_map(|(d, class, classes)| {
            let group = classes[class].clone();
            let order = group.order();
            (Just(d), Just(group), prop::collection::vec(0..order, d))
        })
        .prop_map(|(_, group, indices)| {
            let values = indices.iter().map(|&i| group.element_at(i)).collect();
            GroupFunction::new(group, values).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn oracle_equivalence(f in group_function_strategy()) {
        let fast = f.is_d1u().unwrap();
        let slow = f.is_d1u_bruteforce().unwrap();
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn wraparound_symmetry(f in group_function_strategy(), a in 1usize..16, x in 0usize..16) {
        let d = f.domain_order();
        let a = 1 + a % (d - 1);
        let x = x % d;
        let lhs = &f.differential(a)[x];
        let rhs = f.codomain().neg(&f.differential(d - a)[(a + x) % d]).unwrap();
        prop_assert_eq!(lhs, &rhs);
    }

    #[test]
    fn second_differential_characterization(f in group_function_strategy()) {
        let d = f.domain_order();
        if d > 10 || f.codomain().order() > 12 {
            return Ok(()); // keep the quadratic sweep small
        }
        let zero = f.codomain().zero();
        let nowhere_vanishing = (1..d).all(|a1| {
            (1..d).all(|a2| f.second_differential(a1, a2).iter().all(|e| *e != zero))
        });
        prop_assert_eq!(f.is_d1u().unwrap().is_d1u, nowhere_vanishing);
    }

    #[test]
    fn pigeonhole(f in group_function_strategy()) {
        if f.is_d1u().unwrap().is_d1u {
            prop_assert!(f.codomain().order() >= f.domain_order() as u64);
        }
    }

    #[test]
    fn translation_invariance(f in group_function_strategy(), shift in 0u64..1000) {
        let group = f.codomain().clone();
        let d = f.domain_order();
        let base = f.is_d1u().unwrap().is_d1u;

        // add a constant
        let c = group.element_at(shift % group.order());
        let translated: Vec<_> = f.values().iter()
            .map(|v| group.add(v, &c).unwrap())
            .collect();
        let translated = GroupFunction::new(group.clone(), translated).unwrap();
        prop_assert_eq!(translated.is_d1u().unwrap().is_d1u, base);

        // add a homomorphism x -> x . e, for e of order dividing d
        let generator = group.elements().find(|e| {
            *e != group.zero() && (d as u64).is_multiple_of(group.element_order(e).unwrap())
        });
        if let Some(e) = generator {
            let shifted: Vec<_> = f.values().iter().enumerate()
                .map(|(x, v)| {
                    let hx = group.scalar_mul(x as i64, &e).unwrap();
                    group.add(v, &hx).unwrap()
                })
                .collect();
            let shifted = GroupFunction::new(group, shifted).unwrap();
            prop_assert_eq!(shifted.is_d1u().unwrap().is_d1u, base);
        }
    }

    #[test]
    fn function_serde_round_trip(f in group_function_strategy()) {
        let json = serde_json::to_string(&f).unwrap();
        let back: GroupFunction = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, f);
    }
}

// ---------------------------------------------------------------------------
// constructions

#[test]
fn plan_q_stays_in_window() {
    for d in 2..=500u64 {
        let p = plan(d).unwrap();
        assert!(p.q >= d - 1, "q = {} below d - 1 for d = {d}", p.q);
        assert!(p.q <= 2 * d, "q = {} above 2d for d = {d}", p.q);
        assert_eq!(p.bases_count, p.bound + 1);
    }
}

#[test]
fn prior_bound_beaten_from_seven() {
    for d in 7..=300u64 {
        let p = plan(d).unwrap();
        assert!(p.bound <= p.comparison_bounds.prior_quadratic);
    }
}

// ---------------------------------------------------------------------------
// search vs naive enumeration

/// Counts d1u functions with f(0) = 0 by full enumeration.
fn naive_exists(d: usize, group: &AbelianGroup) -> bool {
    let m = group.order() as usize;
    if m < d {
        return false;
    }
    let elems: Vec<GroupElement> = group.elements().collect();
    let total = (m as u64).pow(d as u32 - 1);
    for code in 0..total {
        let mut values = Vec::with_capacity(d);
        values.push(elems[0].clone());
        let mut rest = code;
        for _ in 1..d {
            values.push(elems[(rest % m as u64) as usize].clone());
            rest /= m as u64;
        }
        let f = GroupFunction::new(group.clone(), values).unwrap();
        if f.is_d1u_bruteforce().unwrap().is_d1u {
            return true;
        }
    }
    false
}

/// A concrete order-20 witness for d = 14 found by this module's search
/// (seed 0, canonical ordering); keeping it frozen gives CI-speed coverage
/// of the existence claim the hour-long search reproduces.
#[test]
fn d14_order20_witness_verifies() {
    let group = AbelianGroup::new(&[4, 5]).unwrap();
    let values: &[[i64; 2]] = &[
        [0, 0],
        [0, 0],
        [0, 1],
        [1, 0],
        [3, 4],
        [0, 1],
        [0, 0],
        [1, 3],
        [0, 4],
        [3, 1],
        [2, 4],
        [1, 3],
        [2, 4],
        [0, 2],
    ];
    let values: Vec<Vec<i64>> = values.iter().map(|v| v.to_vec()).collect();
    let f = GroupFunction::from_residues(group, &values).unwrap();
    assert_eq!(f.codomain().order(), 20);
    assert!(f.is_d1u().unwrap().is_d1u);
    assert!(f.is_d1u_bruteforce().unwrap().is_d1u);
}

#[test]
fn search_matches_naive_enumeration() {
    let cases: &[(u64, u64)] = &[(4, 4), (4, 5), (4, 6), (5, 5), (5, 6), (6, 6), (6, 7)];
    for &(d, order) in cases {
        for group in enumerate_abelian_groups(order).unwrap() {
            let cfg = SearchConfig::exhaustive(order, order);
            let result = search_group(d, &group, &cfg).unwrap();
            let found = matches!(result.status, SearchStatus::Found { .. });
            assert_eq!(
                found,
                naive_exists(d as usize, &group),
                "search vs naive disagree for d = {d}, group {group}"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// design

#[test]
fn constructed_bases_are_orthonormal_and_flat() {
    let mut functions: Vec<GroupFunction> = (2..=8u64).map(|d| build(d).unwrap()).collect();
    functions.extend([3, 5, 7].map(|q| square_map(q).unwrap()));
    functions.extend([4, 6, 8].map(|q| exp_construction(q).unwrap()));
    for f in &functions {
        let d = f.domain_order();
        let bs = character_bases(f).unwrap(); // BasisSet::new re-validates Gram
        assert_eq!(bs.num_bases() as u64, f.codomain().order() + 1);
        let flat = 1.0 / (d as f64).sqrt();
        let standard = bs.bases().last().unwrap().clone();
        for basis in &bs.bases()[..bs.num_bases() - 1] {
            for u in basis {
                for e in &standard {
                    let overlap: Complex64 = u.iter().zip(e).map(|(a, b)| a.conj() * b).sum();
                    assert!((overlap.norm() - flat).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn certification_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    // a certified instance and an uncertifiable one
    let good = solve_weights(character_bases(&build(6).unwrap()).unwrap());
    let standard: Vec<Vec<Complex64>> = (0..4)
        .map(|t| {
            let mut e = vec![Complex64::new(0.0, 0.0); 4];
            e[t] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    let poor = solve_weights(d1u::design::BasisSet::new(4, vec![standard]).unwrap());

    for wd in [&good, &poor] {
        let by_residual = wd.residual() <= 1e-9;
        let by_potential = frame_potential_gap(wd) <= 1e-8;
        let by_haar = haar_point_check(wd, 100, &mut rng) <= 1e-8;
        assert_eq!(by_residual, by_potential);
        assert_eq!(by_residual, by_haar);
        assert_eq!(by_residual, wd.certified());
        // weights normalize exactly as solved
        let total: f64 = wd.basis_weights().iter().sum::<f64>() * wd.basis_set().dimension() as f64;
        assert!((total - 1.0).abs() < 1e-12);
        assert!(frame_potential_gap(wd) > -1e-9);
    }
    assert!(good.certified());
    assert!(!poor.certified());
}

#[test]
fn square_map_bases_recover_mubs() {
    let f = square_map(7).unwrap();
    let bs = character_bases(&f).unwrap();
    assert!(unbiasedness_report(&bs).unwrap() < 1e-9);
}
