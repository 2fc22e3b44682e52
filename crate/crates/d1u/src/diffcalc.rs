//! Differential calculus on functions `Z/dZ -> B` and the d1u decision
//! procedure.
//!
//! `f` is differentially 1-uniform iff for every nonzero shift `a` the
//! difference sequence `x -> f(x+a) - f(x)` contains no repeated value.
//! The identity `D_a(f)(x) = -D_{-a}(f)(a+x)` pairs the shift `a` with
//! `d - a`, so the optimized checker only scans the first half of the
//! shifts; [`GroupFunction::is_d1u_bruteforce`] is the literal
//! solution-counting oracle kept alongside it.

use crate::groups::{AbelianGroup, GroupElement};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// A total function from `Z/dZ` into a finite abelian group, stored as a
/// value table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGroupFunction", into = "RawGroupFunction")]
pub struct GroupFunction {
    codomain: AbelianGroup,
    values: Vec<GroupElement>,
}

#[derive(Serialize, Deserialize, Clone)]
struct RawGroupFunction {
    d: u64,
    codomain: Vec<u64>,
    values: Vec<Vec<i64>>,
}

impl From<GroupFunction> for RawGroupFunction {
    fn from(f: GroupFunction) -> Self {
        RawGroupFunction {
            d: f.values.len() as u64,
            codomain: f.codomain.factors().to_vec(),
            values: f
                .values
                .iter()
                .map(|e| e.residues().iter().map(|&r| r as i64).collect())
                .collect(),
        }
    }
}

impl TryFrom<RawGroupFunction> for GroupFunction {
    type Error = Error;

    fn try_from(raw: RawGroupFunction) -> Result<Self> {
        if raw.d == 0 || raw.d as usize != raw.values.len() {
            return Err(Error::InvalidInput(format!(
                "declared domain order {} does not match {} listed values",
                raw.d,
                raw.values.len()
            )));
        }
        // composite factors are split into prime powers; residues follow the
        // Chinese remainder isomorphism, which preserves differentials
        let (codomain, map) = AbelianGroup::canonicalize(&raw.codomain)?;
        let values = raw
            .values
            .iter()
            .map(|v| map.map_residues(v).map(GroupElement::from_residues))
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupFunction { codomain, values })
    }
}

/// Outcome of a d1u check: either a pass, or a failing witness
/// `(a, x, x')` with `x != x'` and `D_a f(x) = D_a f(x')`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D1uVerdict {
    pub is_d1u: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

/// The lexicographically first failing triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub a: usize,
    pub x: usize,
    pub x_prime: usize,
}

impl GroupFunction {
    /// Builds a function from its value table; every value must belong to
    /// the codomain.
    pub fn new(codomain: AbelianGroup, values: Vec<GroupElement>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("domain order must be >= 1".into()));
        }
        for v in &values {
            if v.residues().len() != codomain.rank() {
                return Err(Error::ShapeMismatch {
                    expected: codomain.rank(),
                    got: v.residues().len(),
                });
            }
            if v.residues()
                .iter()
                .zip(codomain.factors())
                .any(|(&r, &n)| r >= n)
            {
                return Err(Error::InvalidInput("value residue not reduced".into()));
            }
        }
        Ok(GroupFunction { codomain, values })
    }

    /// Convenience constructor from unreduced residue tuples.
    pub fn from_residues(codomain: AbelianGroup, values: &[Vec<i64>]) -> Result<Self> {
        let values = values
            .iter()
            .map(|v| codomain.element(v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(codomain, values)
    }

    /// Domain order `d`.
    pub fn domain_order(&self) -> usize {
        self.values.len()
    }

    pub fn codomain(&self) -> &AbelianGroup {
        &self.codomain
    }

    pub fn values(&self) -> &[GroupElement] {
        &self.values
    }

    pub fn value(&self, x: usize) -> &GroupElement {
        &self.values[x % self.values.len()]
    }

    /// The difference sequence `x -> f(x+a) - f(x)`; the shift is reduced
    /// modulo `d`.
    pub fn differential(&self, a: usize) -> Vec<GroupElement> {
        let d = self.values.len();
        let a = a % d;
        (0..d)
            .map(|x| {
                self.codomain
                    .sub(&self.values[(x + a) % d], &self.values[x])
                    .expect("values share the codomain shape")
            })
            .collect()
    }

    /// `D_{a1} D_{a2} f` as a value table.
    pub fn second_differential(&self, a1: usize, a2: usize) -> Vec<GroupElement> {
        let d = self.values.len();
        let a1 = a1 % d;
        let inner = self.differential(a2);
        (0..d)
            .map(|x| {
                self.codomain
                    .sub(&inner[(x + a1) % d], &inner[x])
                    .expect("values share the codomain shape")
            })
            .collect()
    }

    /// Optimized d1u check: scans shifts `1..=ceil((d-1)/2)` (the wrap-around
    /// identity makes the upper half redundant) and rejects as soon as a
    /// difference sequence repeats a value. Shift `a = 0` is never checked:
    /// with `b != 0` the equation has no solutions at all.
    pub fn is_d1u(&self) -> Result<D1uVerdict> {
        let d = self.values.len();
        if d < 2 {
            return Err(Error::Domain("d1u check requires domain order >= 2".into()));
        }
        let half = d / 2; // == ceil((d-1)/2)
        for a in 1..=half {
            let diff = self.differential(a);
            if let Some((x, x_prime)) = first_repeat(&self.codomain, &diff) {
                return Ok(D1uVerdict {
                    is_d1u: false,
                    witness: Some(Witness { a, x, x_prime }),
                });
            }
        }
        Ok(D1uVerdict {
            is_d1u: true,
            witness: None,
        })
    }

    /// Literal oracle: for every nonzero shift `a` and every codomain value
    /// `b`, counts the solutions of `f(x+a) - f(x) = b` and fails when any
    /// count exceeds one. Must agree with [`GroupFunction::is_d1u`] on every
    /// input, witness included.
    pub fn is_d1u_bruteforce(&self) -> Result<D1uVerdict> {
        let d = self.values.len();
        if d < 2 {
            return Err(Error::Domain("d1u check requires domain order >= 2".into()));
        }
        for a in 1..d {
            let diff = self.differential(a);
            let mut best: Option<(usize, usize)> = None;
            for b in self.codomain.elements() {
                let solutions: Vec<usize> = (0..d).filter(|&x| diff[x] == b).collect();
                if solutions.len() > 1 {
                    let pair = (solutions[0], solutions[1]);
                    if best.is_none_or(|cur| pair < cur) {
                        best = Some(pair);
                    }
                }
            }
            if let Some((x, x_prime)) = best {
                return Ok(D1uVerdict {
                    is_d1u: false,
                    witness: Some(Witness { a, x, x_prime }),
                });
            }
        }
        Ok(D1uVerdict {
            is_d1u: true,
            witness: None,
        })
    }

    /// Checks the iteration identity
    /// `D_{ra}(f)(x) = sum_{i=0}^{r-1} D_a(f)(ia + x)` for all `x`, exactly.
    /// It holds for every `f`; this is a self-test surface.
    pub fn iterate_identity_check(&self, a: usize, r: usize) -> bool {
        let d = self.values.len();
        let a = a % d;
        let ra = ((a as u128 * r as u128) % d as u128) as usize;
        let lhs = self.differential(ra);
        let single = self.differential(a);
        (0..d).all(|x| {
            let mut acc = self.codomain.zero();
            let mut pos = x;
            for _ in 0..r {
                acc = self
                    .codomain
                    .add(&acc, &single[pos])
                    .expect("values share the codomain shape");
                pos = (pos + a) % d;
            }
            acc == lhs[x]
        })
    }
}

/// Lexicographically first `(x, x')` with `seq[x] = seq[x']`, `x < x'`.
fn first_repeat(codomain: &AbelianGroup, seq: &[GroupElement]) -> Option<(usize, usize)> {
    let mut occurrences: HashMap<u64, (usize, usize)> = HashMap::with_capacity(seq.len());
    let mut best: Option<(usize, usize)> = None;
    for (x, v) in seq.iter().enumerate() {
        let key = codomain
            .index_of(v)
            .expect("values share the codomain shape");
        match occurrences.get_mut(&key) {
            None => {
                occurrences.insert(key, (x, usize::MAX));
            }
            Some((first, second)) => {
                if *second == usize::MAX {
                    *second = x;
                    let pair = (*first, *second);
                    if best.is_none_or(|cur| pair < cur) {
                        best = Some(pair);
                    }
                }
            }
        }
    }
    best
}
