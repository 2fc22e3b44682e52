//! Acceptance suite. Each test evaluates one criterion at its stated
//! tolerance and runtime limit and prints a single pass/fail line; run with
//! `cargo test -p d1u --test acceptance -- --nocapture` to see them all.
//!
//! The long d = 14 search reproduction is `#[ignore]`d; run it explicitly
//! with `cargo test -p d1u --test acceptance -- --ignored --nocapture`.

use d1u::constructions::{build, least_coprime_prime, plan, square_map};
use d1u::design::{character_bases, haar_point_check, solve_weights, unbiasedness_report};
use d1u::diffcalc::GroupFunction;
use d1u::groups::{enumerate_abelian_groups, AbelianGroup, GroupElement};
use d1u::search::{search_min_order, SearchConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

fn criterion(number: u32, name: &str, limit: Duration, body: impl FnOnce() -> Result<(), String>) {
    let t0 = Instant::now();
    let outcome = body();
    let elapsed = t0.elapsed();
    match outcome {
        Ok(()) if elapsed <= limit => {
            println!("acceptance {number:02} {name}: PASS ({elapsed:.2?})");
        }
        Ok(()) => {
            println!(
                "acceptance {number:02} {name}: FAIL (runtime {elapsed:.2?} exceeds {limit:.2?})"
            );
            panic!("criterion {number} exceeded its runtime limit");
        }
        Err(reason) => {
            println!("acceptance {number:02} {name}: FAIL ({reason})");
            panic!("criterion {number} failed: {reason}");
        }
    }
}

fn random_function(rng: &mut ChaCha8Rng, max_d: usize, max_order: u64) -> GroupFunction {
    loop {
        let d = rng.random_range(2..=max_d);
        let order = rng.random_range(2..=max_order);
        let classes = enumerate_abelian_groups(order).unwrap();
        let group = classes[rng.random_range(0..classes.len())].clone();
        let values: Vec<GroupElement> = (0..d)
            .map(|_| group.element_at(rng.random_range(0..group.order())))
            .collect();
        if let Ok(f) = GroupFunction::new(group, values) {
            return f;
        }
    }
}

#[test]
fn criterion_01_table_reproduction() {
    criterion(1, "table reproduction", Duration::from_secs(1), || {
        for (d, expected) in [(14u64, 39u64), (20, 57), (21, 46)] {
            let p = plan(d).map_err(|e| e.to_string())?;
            if p.bound != expected {
                return Err(format!(
                    "plan({d}).bound = {}, expected {expected}",
                    p.bound
                ));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_02_construction_validity() {
    criterion(2, "construction validity", Duration::from_secs(30), || {
        for d in 2..=200u64 {
            let f = build(d).map_err(|e| format!("build({d}): {e}"))?;
            if f.domain_order() as u64 != d {
                return Err(format!("build({d}) has wrong domain order"));
            }
            if !f.is_d1u().map_err(|e| e.to_string())?.is_d1u {
                return Err(format!("build({d}) is not d1u"));
            }
            if d <= 40 && !f.is_d1u_bruteforce().map_err(|e| e.to_string())?.is_d1u {
                return Err(format!("build({d}) rejected by the brute-force oracle"));
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_03_oracle_equivalence() {
    criterion(
        3,
        "checker oracle equivalence",
        Duration::from_secs(30),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0xD10);
            for i in 0..500 {
                let f = random_function(&mut rng, 24, 30);
                let fast = f.is_d1u().map_err(|e| e.to_string())?;
                let slow = f.is_d1u_bruteforce().map_err(|e| e.to_string())?;
                if fast != slow {
                    return Err(format!(
                        "disagreement on random function {i}: {fast:?} vs {slow:?}"
                    ));
                }
            }
            for d in 2..=40u64 {
                let f = build(d).map_err(|e| e.to_string())?;
                let fast = f.is_d1u().map_err(|e| e.to_string())?;
                let slow = f.is_d1u_bruteforce().map_err(|e| e.to_string())?;
                if fast != slow {
                    return Err(format!("disagreement on build({d})"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_04_bound_formulas() {
    criterion(
        4,
        "bound-formula properties",
        Duration::from_secs(60),
        || {
            for d in 3..=10_000u64 {
                let p = plan(d).map_err(|e| format!("plan({d}): {e}"))?;
                let cap = if d % 2 == 1 { 4 * d } else { 6 * d };
                if p.bound > cap {
                    return Err(format!("plan({d}).bound = {} exceeds {cap}", p.bound));
                }
                if p.q < d - 1 {
                    return Err(format!("plan({d}).q = {} below d - 1", p.q));
                }
                if (7..=2000).contains(&d) {
                    let prior = (3 * (d - 1) * (d - 1)).div_ceil(4);
                    if p.bound > prior {
                        return Err(format!(
                            "plan({d}).bound = {} exceeds the quadratic bound {prior}",
                            p.bound
                        ));
                    }
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_05_d30030_example() {
    criterion(5, "d = 30030 products", Duration::from_secs(1), || {
        let p = plan(30030).map_err(|e| e.to_string())?;
        if p.bound != 3 * 30029 {
            return Err(format!("flag-branch bound {} != 3 * 30029", p.bound));
        }
        if p.bound != 90087 {
            return Err("3 * 30029 should be 90087".into());
        }
        if least_coprime_prime(30030) != 17 {
            return Err("least prime coprime to 30030 should be 17".into());
        }
        // two-coordinate product: 17 * 30029 (the least coprime prime times
        // the best base codomain order in the window)
        match p.dlogd_alternative {
            Some(alt) if alt == 17 * 30029 => Ok(()),
            other => Err(format!("two-coordinate product {other:?} != 17 * 30029")),
        }
    });
}

#[test]
fn criterion_06_mub_recovery() {
    criterion(
        6,
        "MUB recovery at prime d",
        Duration::from_secs(10),
        || {
            for d in [3u64, 5, 7, 11] {
                let bases = character_bases(&square_map(d).unwrap()).map_err(|e| e.to_string())?;
                let unbiased = unbiasedness_report(&bases).map_err(|e| e.to_string())?;
                let design = solve_weights(bases);
                if design.residual() >= 1e-9 {
                    return Err(format!("d = {d}: residual {} >= 1e-9", design.residual()));
                }
                if !design.certified() {
                    return Err(format!("d = {d}: NOT-CERTIFIED"));
                }
                let expected = 1.0 / (d as f64 * (d as f64 + 1.0));
                for (j, &w) in design.basis_weights().iter().enumerate() {
                    if (w - expected).abs() >= 1e-10 {
                        return Err(format!(
                            "d = {d}: weight {j} is {w}, expected {expected} within 1e-10"
                        ));
                    }
                }
                if unbiased >= 1e-9 {
                    return Err(format!(
                        "d = {d}: unbiasedness deviation {unbiased} >= 1e-9"
                    ));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_07_composite_designs() {
    criterion(
        7,
        "end-to-end composite designs",
        Duration::from_secs(300),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0x2D);
            for (d, expected_bases) in [(6u64, 16usize), (10, 34), (14, 40)] {
                let f = build(d).map_err(|e| e.to_string())?;
                let bases = character_bases(&f).map_err(|e| e.to_string())?;
                if bases.num_bases() != expected_bases {
                    return Err(format!(
                        "d = {d}: {} bases, expected {expected_bases}",
                        bases.num_bases()
                    ));
                }
                let design = solve_weights(bases);
                if !design.certified() || design.residual() >= 1e-8 {
                    return Err(format!(
                        "d = {d}: NOT-CERTIFIED (residual {})",
                        design.residual()
                    ));
                }
                if design.basis_weights().iter().any(|&w| w < 0.0) {
                    return Err(format!("d = {d}: negative weight"));
                }
                let deviation = haar_point_check(&design, 100, &mut rng);
                if deviation >= 1e-8 {
                    return Err(format!("d = {d}: Haar spot check deviates by {deviation}"));
                }
            }
            Ok(())
        },
    );
}

#[test]
fn criterion_08_search_small_scale() {
    criterion(
        8,
        "search correctness at small scale",
        Duration::from_secs(10),
        || {
            for (d, expected) in [(3u64, 3u64), (4, 5), (5, 5)] {
                let cfg = SearchConfig::exhaustive(d, 4 * d);
                let outcome = search_min_order(d, &cfg).map_err(|e| e.to_string())?;
                if outcome.found_order != Some(expected) {
                    return Err(format!(
                        "search_min_order({d}) = {:?}, expected {expected}",
                        outcome.found_order
                    ));
                }
                for summary in &outcome.orders {
                    if summary.order < expected
                        && summary.status != d1u::search::OrderStatus::Exhausted
                    {
                        return Err(format!(
                            "d = {d}: order {} below the find is {:?}, not exhausted",
                            summary.order, summary.status
                        ));
                    }
                }
                // naive full-enumeration confirms the negative at the largest
                // exhausted order and the positive at the found order
                if expected > d {
                    for group in enumerate_abelian_groups(expected - 1).unwrap() {
                        if naive_exists(d as usize, &group) {
                            return Err(format!(
                                "naive enumeration finds a function for d = {d} at order {}",
                                expected - 1
                            ));
                        }
                    }
                }
                let exists_at_found = enumerate_abelian_groups(expected)
                    .unwrap()
                    .iter()
                    .any(|g| naive_exists(d as usize, g));
                if !exists_at_found {
                    return Err(format!(
                        "naive enumeration refutes the find for d = {d} at order {expected}"
                    ));
                }
            }
            Ok(())
        },
    );
}

fn naive_exists(d: usize, group: &AbelianGroup) -> bool {
    let m = group.order() as usize;
    if m < d {
        return false;
    }
    let elems: Vec<GroupElement> = group.elements().collect();
    let total = (m as u64).pow(d as u32 - 1);
    (0..total).any(|code| {
        let mut values = Vec::with_capacity(d);
        values.push(elems[0].clone());
        let mut rest = code;
        for _ in 1..d {
            values.push(elems[(rest % m as u64) as usize].clone());
            rest /= m as u64;
        }
        GroupFunction::new(group.clone(), values)
            .unwrap()
            .is_d1u_bruteforce()
            .unwrap()
            .is_d1u
    })
}

/// Long-running reproduction of the d = 14 computer finding: a d1u function
/// into some abelian group of order 20 within a one-hour budget. Establishing
/// nonexistence below 20 is out of scope for CI; the EXHAUSTED /
/// INCONCLUSIVE reporting in the search module carries that attempt.
#[test]
#[ignore = "best-effort one-hour search; run with -- --ignored"]
fn criterion_09_d14_order20_search() {
    criterion(
        9,
        "d = 14 order-20 search",
        Duration::from_secs(3900),
        || {
            let cfg = SearchConfig {
                time_budget: Some(Duration::from_secs(3600)),
                order_range: (20, 20),
                normalize: true,
                seed: 0,
            };
            let outcome = search_min_order(14, &cfg).map_err(|e| e.to_string())?;
            match outcome.found_order {
                Some(20) => Ok(()),
                _ => {
                    let statuses: Vec<String> = outcome
                        .results
                        .iter()
                        .map(|r| format!("{}: {:?}", r.group, r.status))
                        .collect();
                    Err(format!(
                        "no order-20 function found within budget ({})",
                        statuses.join(", ")
                    ))
                }
            }
        },
    );
}

#[test]
fn criterion_10_identity_suites() {
    criterion(
        10,
        "differential identity suites",
        Duration::from_secs(5),
        || {
            let mut rng = ChaCha8Rng::seed_from_u64(0x1D5);
            for _ in 0..1000 {
                let f = random_function(&mut rng, 20, 25);
                let d = f.domain_order();
                let a = rng.random_range(1..d);
                let r = rng.random_range(0..=6usize);
                let x = rng.random_range(0..d);

                // wrap-around: D_a f(x) = -D_{d-a} f(a + x), exactly
                let lhs = &f.differential(a)[x];
                let rhs = f
                    .codomain()
                    .neg(&f.differential(d - a)[(a + x) % d])
                    .map_err(|e| e.to_string())?;
                if *lhs != rhs {
                    return Err(format!("wrap-around identity fails at a = {a}, x = {x}"));
                }

                if !f.iterate_identity_check(a, r) {
                    return Err(format!("iteration identity fails at a = {a}, r = {r}"));
                }
            }
            Ok(())
        },
    );
}
