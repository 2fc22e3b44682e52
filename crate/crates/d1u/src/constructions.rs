//! Systematic d1u constructions on cyclic domains and the planner that
//! picks the cheapest codomain for a target dimension.
//!
//! Two base families are realized directly: the square map `x -> x^2` on
//! `Z/qZ` for odd primes `q`, and the discrete-exponential map
//! `x -> g^x` from `Z/qZ` into `(Z/pZ)^k` for `q = p^k - 1`. A base
//! function on `Z/qZ` with `q >= d - 1` is restricted to `Z/dZ` and paired
//! with a cheap first coordinate: `i mod p` for the least prime `p` coprime
//! to `d` (odd `d`), or a two-valued flag in `Z/3Z` (even `d`). Either way
//! the result is d1u, with codomain order `2 C` resp. `3 C` for a base
//! codomain of order `C`.

use crate::arith::{self, Sieve};
use crate::diffcalc::GroupFunction;
use crate::fields::{FiniteField, MAX_FIELD_SIZE};
use crate::groups::AbelianGroup;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which base family seeds a construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseFamily {
    /// `x -> x^2 mod q` for an odd prime `q`; codomain order `q`.
    OddPrimeSquare,
    /// `x -> g^x` into `(Z/pZ)^k` for `q + 1 = p^k`; codomain order `q + 1`.
    PrimePowerExponential,
    /// A d1u function supplied through the JSON interface.
    UserSupplied,
}

/// Which construction the planner selected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `d` is itself an odd prime: the square map is optimal, no product.
    OddPrimeDirect,
    /// Odd `d`: pair the base with `i mod p`, `p` the least coprime prime.
    Odd,
    /// Even `d`: pair the base with the half-interval flag into `Z/3Z`.
    Even,
}

/// Reference bounds reported alongside a plan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonBounds {
    /// `2(d + d^0.525)` for odd `d`, `3(d + d^0.525)` for even `d`; the
    /// asymptotic form obtained from the best known prime-gap exponent.
    pub prime_gap: f64,
    /// `4d` (odd) or `6d` (even): the window bound from Chebyshev's theorem
    /// that a prime always exists between `d` and `2d`.
    pub chebyshev: u64,
    /// `ceil(3/4 (d-1)^2)`: the earlier general-purpose quadratic bound.
    pub prior_quadratic: u64,
}

/// The planner's choice for a dimension `d`: which branch, which base
/// family at which domain size `q`, the resulting codomain and the bound
/// on the minimal codomain order it certifies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionPlan {
    pub d: u64,
    pub branch: Branch,
    /// Least prime coprime to `d`; present on the odd product branch.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub q: u64,
    pub base_family: BaseFamily,
    pub codomain: AbelianGroup,
    /// Codomain order; an upper bound on the minimal order achievable.
    pub bound: u64,
    /// A d1u function of codomain order `n` yields `n + 1` design bases.
    pub bases_count: u64,
    /// For even `d`: the order the two-coordinate (`i mod p`) product would
    /// give instead, `p * C` for the best base codomain order `C`. The flag
    /// construction is used precisely because this is often much worse.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dlogd_alternative: Option<u64>,
    pub comparison_bounds: ComparisonBounds,
}

/// `x -> x^2 mod q` on `Z/qZ` for an odd prime `q`.
pub fn square_map(q: u64) -> Result<GroupFunction> {
    if q < 3 || q.is_multiple_of(2) || !arith::is_prime(q) {
        return Err(Error::Domain(format!(
            "square map requires an odd prime, got {q}"
        )));
    }
    let codomain = AbelianGroup::new(&[q])?;
    let values = (0..q)
        .map(|x| codomain.element(&[(x * x % q) as i64]))
        .collect::<Result<Vec<_>>>()?;
    GroupFunction::new(codomain, values)
}

/// `x -> g^x` from `Z/qZ` into the additive group `(Z/pZ)^k`, for
/// `q + 1 = p^k` a prime power.
pub fn exp_construction(q: u64) -> Result<GroupFunction> {
    if q == 0 {
        return Err(Error::Domain("domain order must be >= 1".into()));
    }
    let (p, k) = arith::prime_power(q + 1)
        .ok_or_else(|| Error::Domain(format!("{} = q + 1 is not a prime power", q + 1)))?;
    let field = FiniteField::new(p, k)?;
    let codomain = field.additive_group();
    let values = (0..q)
        .map(|x| field.exp_map(x))
        .collect::<Result<Vec<_>>>()?;
    GroupFunction::new(codomain, values)
}

/// Restriction of `phi: Z/qZ -> G` to `Z/dZ` for `d <= q + 1`: the first
/// `d` values, except that for `q = d - 1` the final value wraps to
/// `phi(q) = phi(0)`.
pub fn restrict(phi: &GroupFunction, d: u64) -> Result<GroupFunction> {
    let q = phi.domain_order() as u64;
    if d == 0 {
        return Err(Error::Domain("restricted domain must be >= 1".into()));
    }
    if q + 1 < d {
        return Err(Error::Domain(format!(
            "cannot restrict a function on Z/{q}Z to Z/{d}Z (need q >= d - 1)"
        )));
    }
    let d = d as usize;
    let mut values: Vec<_> = phi.values()[..d.min(phi.domain_order())].to_vec();
    if d == phi.domain_order() + 1 {
        values.push(phi.values()[0].clone());
    }
    GroupFunction::new(phi.codomain().clone(), values)
}

/// Smallest prime not dividing `d`.
pub fn least_coprime_prime(d: u64) -> u64 {
    let mut p = 2u64;
    loop {
        if !d.is_multiple_of(p) {
            return p;
        }
        p += 1;
        while !arith::is_prime(p) {
            p += 1;
        }
    }
}

/// The half-interval flag: `0` for `x < d/2`, `1` for `x >= d/2`, viewed in
/// `Z/3Z`. Defined for even `d`; `x` is reduced modulo `d`.
pub fn flag(d: u64, x: u64) -> Result<u64> {
    if d == 0 || !d.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "flag function requires even d, got {d}"
        )));
    }
    Ok(if x % d < d / 2 { 0 } else { 1 })
}

/// The odd-dimension product: `f(i) = (i mod p, phi_d(i))` into
/// `Z/pZ x G`, where `p` is the least prime coprime to `d` and `phi` is a
/// d1u function on `Z/qZ`, `q >= d - 1`.
pub fn dlogd_construction(d: u64, phi: &GroupFunction) -> Result<GroupFunction> {
    if d < 2 {
        return Err(Error::Domain("target dimension must be >= 2".into()));
    }
    let verdict = phi.is_d1u()?;
    if !verdict.is_d1u {
        return Err(Error::InvalidInput("base function is not d1u".into()));
    }
    let p = least_coprime_prime(d);
    let phi_d = restrict(phi, d)?;
    let zp = AbelianGroup::new(&[p])?;
    let (codomain, split) = zp.direct_product(phi_d.codomain());
    let values = (0..d)
        .map(|i| {
            let first = zp.element(&[(i % p) as i64])?;
            split.combine(&first, &phi_d.values()[i as usize])
        })
        .collect::<Result<Vec<_>>>()?;
    GroupFunction::new(codomain, values)
}

/// The even-dimension product: `f(i) = (flag(i), phi_d(i))` into
/// `Z/3Z x G`.
pub fn evens_construction(d: u64, phi: &GroupFunction) -> Result<GroupFunction> {
    if d < 2 || !d.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "flag construction requires even d >= 2, got {d}"
        )));
    }
    let verdict = phi.is_d1u()?;
    if !verdict.is_d1u {
        return Err(Error::InvalidInput("base function is not d1u".into()));
    }
    let phi_d = restrict(phi, d)?;
    let z3 = AbelianGroup::new(&[3])?;
    let (codomain, split) = z3.direct_product(phi_d.codomain());
    let values = (0..d)
        .map(|i| {
            let first = z3.element(&[flag(d, i)? as i64])?;
            split.combine(&first, &phi_d.values()[i as usize])
        })
        .collect::<Result<Vec<_>>>()?;
    GroupFunction::new(codomain, values)
}

struct Candidate {
    bound: u64,
    family_rank: u8,
    q: u64,
    family: BaseFamily,
}

/// Scans `q` in `[max(d-1, 2), 2d]` over both base families, applies the
/// branch factor (2 for odd `d`, 3 for even) and returns the plan with the
/// minimal bound. Ties prefer the square family, then the smallest `q`.
/// When `d` itself is an odd prime the square map is returned directly:
/// its bound `d` is optimal and no product can match it.
pub fn plan(d: u64) -> Result<ConstructionPlan> {
    if d < 2 {
        return Err(Error::Domain(format!("planning requires d >= 2, got {d}")));
    }
    let odd = d % 2 == 1;
    let comparison_bounds = comparison_bounds(d, odd);
    let sieve = Sieve::up_to(2 * d + 2);

    if odd && sieve.is_prime(d) {
        return Ok(ConstructionPlan {
            d,
            branch: Branch::OddPrimeDirect,
            p: None,
            q: d,
            base_family: BaseFamily::OddPrimeSquare,
            codomain: AbelianGroup::new(&[d])?,
            bound: d,
            bases_count: d + 1,
            dlogd_alternative: None,
            comparison_bounds,
        });
    }

    let factor: u64 = if odd { 2 } else { 3 };
    let mut best: Option<Candidate> = None;
    let mut best_c_base = u64::MAX;
    for q in (d - 1).max(2)..=2 * d {
        let mut offer = |family: BaseFamily, family_rank: u8, c_base: u64| {
            best_c_base = best_c_base.min(c_base);
            let cand = Candidate {
                bound: factor * c_base,
                family_rank,
                q,
                family,
            };
            let better = match &best {
                None => true,
                Some(cur) => {
                    (cand.bound, cand.family_rank, cand.q) < (cur.bound, cur.family_rank, cur.q)
                }
            };
            if better {
                best = Some(cand);
            }
        };
        if q % 2 == 1 && sieve.is_prime(q) {
            offer(BaseFamily::OddPrimeSquare, 0, q);
        }
        if q < MAX_FIELD_SIZE {
            if let Some((_, _)) = prime_power_fast(&sieve, q + 1) {
                offer(BaseFamily::PrimePowerExponential, 1, q + 1);
            }
        }
    }
    // Chebyshev: some odd prime lives in (d, 2d), so a candidate always exists
    let chosen = best.ok_or_else(|| {
        Error::Internal(format!("no base candidate found for d = {d} in [d-1, 2d]"))
    })?;

    let base_codomain = match chosen.family {
        BaseFamily::OddPrimeSquare => AbelianGroup::new(&[chosen.q])?,
        BaseFamily::PrimePowerExponential => {
            let (p, k) =
                arith::prime_power(chosen.q + 1).expect("candidate was validated as a prime power");
            AbelianGroup::new(&vec![p; k as usize])?
        }
        BaseFamily::UserSupplied => unreachable!("planner only offers built-in families"),
    };
    let pairing = AbelianGroup::new(&[if odd { 2 } else { 3 }])?;
    let (codomain, _) = pairing.direct_product(&base_codomain);

    Ok(ConstructionPlan {
        d,
        branch: if odd { Branch::Odd } else { Branch::Even },
        p: if odd { Some(2) } else { None },
        q: chosen.q,
        base_family: chosen.family,
        codomain,
        bound: chosen.bound,
        bases_count: chosen.bound + 1,
        dlogd_alternative: if odd {
            None
        } else {
            Some(least_coprime_prime(d) * best_c_base)
        },
        comparison_bounds,
    })
}

/// Executes `plan(d)` end to end and returns the constructed function.
pub fn build(d: u64) -> Result<GroupFunction> {
    let plan = plan(d)?;
    let f = match plan.branch {
        Branch::OddPrimeDirect => square_map(plan.q)?,
        Branch::Odd => dlogd_construction(d, &base_function(&plan)?)?,
        Branch::Even => evens_construction(d, &base_function(&plan)?)?,
    };
    if f.codomain() != &plan.codomain || f.codomain().order() != plan.bound {
        return Err(Error::Internal(format!(
            "constructed codomain {} does not match the planned bound {}",
            f.codomain(),
            plan.bound
        )));
    }
    Ok(f)
}

fn base_function(plan: &ConstructionPlan) -> Result<GroupFunction> {
    match plan.base_family {
        BaseFamily::OddPrimeSquare => square_map(plan.q),
        BaseFamily::PrimePowerExponential => exp_construction(plan.q),
        BaseFamily::UserSupplied => Err(Error::InvalidInput(
            "user-supplied plans cannot be rebuilt without the function".into(),
        )),
    }
}

fn comparison_bounds(d: u64, odd: bool) -> ComparisonBounds {
    let factor = if odd { 2u64 } else { 3 };
    let df = d as f64;
    ComparisonBounds {
        prime_gap: factor as f64 * (df + df.powf(0.525)),
        chebyshev: 2 * factor * d,
        prior_quadratic: (3 * (d - 1) * (d - 1)).div_ceil(4),
    }
}

/// Prime-power test tuned for the planner's window scan: the sieve answers
/// the prime case, composites reveal their smallest factor quickly.
fn prime_power_fast(sieve: &Sieve, m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    if sieve.is_prime(m) {
        return Some((m, 1));
    }
    let smallest = if m.is_multiple_of(2) {
        2
    } else {
        let mut p = 3u64;
        loop {
            if p * p > m {
                return None; // prime, but the sieve said otherwise
            }
            if m.is_multiple_of(p) {
                break p;
            }
            p += 2;
        }
    };
    let mut rest = m;
    let mut k = 0u32;
    while rest.is_multiple_of(smallest) {
        rest /= smallest;
        k += 1;
    }
    if rest == 1 {
        Some((smallest, k))
    } else {
        None
    }
}
