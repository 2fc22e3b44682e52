//! Galois fields `GF(p^k)` with deterministic construction, sized for the
//! discrete-exponential family: the map `x -> g^x` from `Z/(p^k - 1)Z` into
//! the additive group `(Z/pZ)^k` is differentially 1-uniform.
//!
//! Elements are coefficient vectors of polynomials reduced modulo a fixed
//! irreducible modulus; `coeffs[i]` is the coefficient of `x^i`. Both the
//! modulus and the primitive generator are the lexicographically smallest
//! choices, so constructions are reproducible across runs and platforms.

use crate::groups::{AbelianGroup, GroupElement};
use crate::{arith, Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Fields are capped at this size; the constructions only ever need
/// `q = p^k - 1` close to the target dimension, which stays desk-scale.
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// An element of `GF(p^k)`: `k` coefficients in `[0, p)`, ascending powers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

/// `GF(p^k)` with a fixed irreducible modulus and primitive generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawField", into = "RawField")]
pub struct FiniteField {
    p: u64,
    k: u32,
    modulus: Vec<u64>, // length k+1, monic
    generator: FieldElement,
}

#[derive(Serialize, Deserialize, Clone)]
struct RawField {
    p: u64,
    k: u32,
    modulus: Vec<u64>,
    generator: Vec<u64>,
}

impl From<FiniteField> for RawField {
    fn from(f: FiniteField) -> Self {
        RawField {
            p: f.p,
            k: f.k,
            modulus: f.modulus,
            generator: f.generator.coeffs,
        }
    }
}

impl TryFrom<RawField> for FiniteField {
    type Error = Error;

    fn try_from(raw: RawField) -> Result<Self> {
        if !arith::is_prime(raw.p) {
            return Err(Error::InvalidInput(format!(
                "field characteristic {} is not prime",
                raw.p
            )));
        }
        if raw.k == 0 || raw.p.checked_pow(raw.k).is_none_or(|s| s > MAX_FIELD_SIZE) {
            return Err(Error::InvalidInput("field size out of range".into()));
        }
        if raw.modulus.len() != raw.k as usize + 1
            || raw.modulus.last() != Some(&1)
            || raw.modulus.iter().any(|&c| c >= raw.p)
        {
            return Err(Error::InvalidInput(
                "field modulus must be a monic degree-k polynomial with reduced coefficients"
                    .into(),
            ));
        }
        if !is_irreducible(&raw.modulus, raw.p) {
            return Err(Error::InvalidInput("field modulus is reducible".into()));
        }
        let mut field = FiniteField {
            p: raw.p,
            k: raw.k,
            modulus: raw.modulus,
            generator: FieldElement {
                coeffs: vec![0; raw.k as usize],
            },
        };
        let generator = FieldElement {
            coeffs: raw.generator,
        };
        if generator.coeffs.len() != raw.k as usize || generator.coeffs.iter().any(|&c| c >= raw.p)
        {
            return Err(Error::InvalidInput(
                "field generator has the wrong shape".into(),
            ));
        }
        if !field.is_primitive(&generator) {
            return Err(Error::InvalidInput(
                "field generator is not primitive".into(),
            ));
        }
        field.generator = generator;
        Ok(field)
    }
}

impl FiniteField {
    /// Builds `GF(p^k)` with the lexicographically smallest monic irreducible
    /// modulus and the lexicographically smallest primitive generator
    /// (coefficient sequences compared constant term first).
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::Domain(format!(
                "field characteristic {p} is not prime"
            )));
        }
        if k == 0 {
            return Err(Error::Domain("extension degree must be >= 1".into()));
        }
        let size = p
            .checked_pow(k)
            .filter(|&s| s <= MAX_FIELD_SIZE)
            .ok_or_else(|| {
                Error::Capacity(format!("field size p^k exceeds the cap {MAX_FIELD_SIZE}"))
            })?;
        let modulus = smallest_irreducible(p, k);
        let mut field = FiniteField {
            p,
            k,
            modulus,
            generator: FieldElement {
                coeffs: vec![0; k as usize],
            },
        };
        let generator = (1..size)
            .map(|code| field.element_at_code(code))
            .find(|e| field.is_primitive(e))
            .ok_or_else(|| Error::Internal("no primitive element found".into()))?;
        field.generator = generator;
        Ok(field)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// `p^k`.
    pub fn size(&self) -> u64 {
        self.p.pow(self.k)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> &FieldElement {
        &self.generator
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.k as usize],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut coeffs = vec![0; self.k as usize];
        coeffs[0] = 1;
        FieldElement { coeffs }
    }

    /// Decodes the lexicographic code of an element: the constant term is the
    /// most significant digit, so codes sort like coefficient sequences.
    pub fn element_at_code(&self, code: u64) -> FieldElement {
        assert!(code < self.size(), "field element code out of range");
        let mut coeffs = vec![0u64; self.k as usize];
        let mut rest = code;
        for slot in coeffs.iter_mut().rev() {
            *slot = rest % self.p;
            rest /= self.p;
        }
        FieldElement { coeffs }
    }

    pub fn code_of(&self, e: &FieldElement) -> u64 {
        let mut code = 0u64;
        for &c in &e.coeffs {
            code = code * self.p + c;
        }
        code
    }

    /// All field elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.size()).map(|c| self.element_at_code(c))
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + y) % self.p)
                .collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| (x + self.p - y) % self.p)
                .collect(),
        }
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let k = self.k as usize;
        let mut prod = vec![0u64; 2 * k.max(1)];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        poly_rem_in_place(&mut prod, &self.modulus, self.p);
        prod.truncate(k);
        prod.resize(k, 0);
        FieldElement { coeffs: prod }
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inverse(&self, a: &FieldElement) -> Result<FieldElement> {
        if a == &self.zero() {
            return Err(Error::Domain("zero has no multiplicative inverse".into()));
        }
        Ok(self.pow(a, self.size() - 2))
    }

    fn is_primitive(&self, e: &FieldElement) -> bool {
        if e == &self.zero() {
            return false;
        }
        let q = self.size() - 1;
        arith::factorize(q)
            .iter()
            .all(|&(r, _)| self.pow(e, q / r) != self.one())
    }

    /// The additive group `(Z/pZ)^k` that field elements live in.
    pub fn additive_group(&self) -> AbelianGroup {
        AbelianGroup::from_canonical(vec![self.p; self.k as usize])
    }

    /// `g^x` reinterpreted as an element of the additive group, for
    /// `0 <= x < p^k - 1`.
    pub fn exp_map(&self, x: u64) -> Result<GroupElement> {
        let q = self.size() - 1;
        if x >= q {
            return Err(Error::Domain(format!(
                "exponent {x} out of range for multiplicative order {q}"
            )));
        }
        let value = self.pow(&self.generator, x);
        Ok(GroupElement::from_residues(value.coeffs))
    }
}

impl fmt::Display for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}^{})", self.p, self.k)
    }
}

/// Lexicographically smallest monic irreducible polynomial of degree `k`
/// over `GF(p)`, as ascending coefficients of length `k + 1`.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    let k = k as usize;
    let candidates = p.pow(k as u32);
    for code in 0..candidates {
        // constant term is the most significant digit of the code
        let mut coeffs = vec![0u64; k + 1];
        let mut rest = code;
        for slot in coeffs[..k].iter_mut().rev() {
            *slot = rest % p;
            rest /= p;
        }
        coeffs[k] = 1;
        if is_irreducible(&coeffs, p) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over GF(p)")
}

/// Trial division by every monic polynomial of degree `1..=k/2`.
fn is_irreducible(poly: &[u64], p: u64) -> bool {
    let k = poly.len() - 1;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    if poly[0] == 0 {
        return false; // divisible by x
    }
    for deg in 1..=k / 2 {
        let count = p.pow(deg as u32);
        for code in 0..count {
            let mut divisor = vec![0u64; deg + 1];
            let mut rest = code;
            for slot in divisor[..deg].iter_mut() {
                *slot = rest % p;
                rest /= p;
            }
            divisor[deg] = 1;
            let mut rem = poly.to_vec();
            poly_rem_in_place(&mut rem, &divisor, p);
            if rem.iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Reduces `a` modulo the monic polynomial `m` in place (coefficients
/// ascending; entries beyond the remainder are zeroed).
fn poly_rem_in_place(a: &mut [u64], m: &[u64], p: u64) {
    let md = m.len() - 1;
    debug_assert_eq!(m[md], 1, "modulus must be monic");
    if md == 0 {
        for c in a.iter_mut() {
            *c = 0;
        }
        return;
    }
    for i in (md..a.len()).rev() {
        let factor = a[i];
        if factor == 0 {
            continue;
        }
        a[i] = 0;
        for (j, &mc) in m[..md].iter().enumerate() {
            let idx = i - md + j;
            a[idx] = (a[idx] + (p - mc % p) * factor) % p;
        }
    }
}
