//! Finite abelian groups in primary decomposition, their enumeration by
//! order, and their characters.
//!
//! A group is stored as a sorted list of prime-power cyclic orders, so two
//! groups are isomorphic iff their factor lists are equal. Elements are
//! residue tuples matching the factor list. All values are immutable after
//! construction and freely shareable across threads.

use crate::arith;
use crate::{Error, Result};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::TAU;
use std::fmt;

/// A finite abelian group `Z/n_1 x ... x Z/n_r` with each `n_j` a prime
/// power and the list sorted ascending. The empty list is the trivial group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    factors: Vec<u64>,
    order: u64,
}

/// An element of an [`AbelianGroup`]: one reduced residue per cyclic factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupElement {
    residues: Vec<u64>,
}

impl GroupElement {
    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub(crate) fn from_residues(residues: Vec<u64>) -> Self {
        GroupElement { residues }
    }
}

/// Records how the factors of a raw (possibly composite) factor list split
/// into the canonical prime-power factors, so residue tuples can be carried
/// along the isomorphism.
#[derive(Debug, Clone)]
pub struct FactorMap {
    // targets[i] = (canonical position, prime-power modulus) pieces of raw factor i
    targets: Vec<Vec<(usize, u64)>>,
    canonical_rank: usize,
}

impl FactorMap {
    /// Maps a residue tuple for the raw factor list onto the canonical
    /// decomposition via the Chinese remainder splitting.
    pub fn map_residues(&self, raw: &[i64]) -> Result<Vec<u64>> {
        if raw.len() != self.targets.len() {
            return Err(Error::ShapeMismatch {
                expected: self.targets.len(),
                got: raw.len(),
            });
        }
        let mut out = vec![0u64; self.canonical_rank];
        for (value, pieces) in raw.iter().zip(&self.targets) {
            for &(pos, m) in pieces {
                out[pos] = value.rem_euclid(m as i64) as u64;
            }
        }
        Ok(out)
    }
}

/// Positions of the two operands' factors inside a canonical direct product.
#[derive(Debug, Clone)]
pub struct ProductSplit {
    left_pos: Vec<usize>,
    right_pos: Vec<usize>,
}

impl ProductSplit {
    /// Interleaves an element of each operand into an element of the product.
    pub fn combine(&self, left: &GroupElement, right: &GroupElement) -> Result<GroupElement> {
        if left.residues.len() != self.left_pos.len() {
            return Err(Error::ShapeMismatch {
                expected: self.left_pos.len(),
                got: left.residues.len(),
            });
        }
        if right.residues.len() != self.right_pos.len() {
            return Err(Error::ShapeMismatch {
                expected: self.right_pos.len(),
                got: right.residues.len(),
            });
        }
        let mut out = vec![0u64; self.left_pos.len() + self.right_pos.len()];
        for (r, &pos) in left.residues.iter().zip(&self.left_pos) {
            out[pos] = *r;
        }
        for (r, &pos) in right.residues.iter().zip(&self.right_pos) {
            out[pos] = *r;
        }
        Ok(GroupElement::from_residues(out))
    }
}

impl AbelianGroup {
    /// The trivial group of order 1.
    pub fn trivial() -> Self {
        AbelianGroup {
            factors: Vec::new(),
            order: 1,
        }
    }

    /// Builds the group from a list of cyclic orders, each `>= 2`. Composite
    /// orders are split into prime-power factors and the result is sorted
    /// into canonical form.
    pub fn new(factors: &[u64]) -> Result<Self> {
        Ok(Self::canonicalize(factors)?.0)
    }

    /// The cyclic group `Z/nZ` (`n >= 1`) in canonical form.
    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("cyclic group order must be >= 1".into()));
        }
        if n == 1 {
            return Ok(Self::trivial());
        }
        Self::new(&[n])
    }

    /// [`AbelianGroup::new`] plus the residue mapping from the raw factor
    /// list onto the canonical one.
    pub fn canonicalize(factors: &[u64]) -> Result<(Self, FactorMap)> {
        let mut pieces: Vec<(u64, usize)> = Vec::new();
        for (i, &n) in factors.iter().enumerate() {
            if n < 2 {
                return Err(Error::Domain(format!("group factor must be >= 2, got {n}")));
            }
            for (p, e) in arith::factorize(n) {
                pieces.push((p.pow(e), i));
            }
        }
        // stable sort keeps pieces of equal order in input order
        pieces.sort_by_key(|&(m, _)| m);
        let mut targets = vec![Vec::new(); factors.len()];
        let mut canonical = Vec::with_capacity(pieces.len());
        let mut order = 1u64;
        for (pos, &(m, raw)) in pieces.iter().enumerate() {
            targets[raw].push((pos, m));
            canonical.push(m);
            order = order
                .checked_mul(m)
                .ok_or_else(|| Error::Capacity("group order exceeds 64-bit range".into()))?;
        }
        Ok((
            AbelianGroup {
                factors: canonical,
                order,
            },
            FactorMap {
                targets,
                canonical_rank: pieces.len(),
            },
        ))
    }

    pub(crate) fn from_canonical(factors: Vec<u64>) -> Self {
        debug_assert!(factors.windows(2).all(|w| w[0] <= w[1]));
        debug_assert!(factors.iter().all(|&m| arith::prime_power(m).is_some()));
        let order = factors.iter().product::<u64>().max(1);
        AbelianGroup { factors, order }
    }

    pub fn factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    /// Number of cyclic factors.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement::from_residues(vec![0; self.factors.len()])
    }

    /// Builds an element from (possibly unreduced, possibly negative)
    /// integers, reducing each modulo its factor.
    pub fn element(&self, residues: &[i64]) -> Result<GroupElement> {
        if residues.len() != self.factors.len() {
            return Err(Error::ShapeMismatch {
                expected: self.factors.len(),
                got: residues.len(),
            });
        }
        Ok(GroupElement::from_residues(
            residues
                .iter()
                .zip(&self.factors)
                .map(|(&r, &n)| r.rem_euclid(n as i64) as u64)
                .collect(),
        ))
    }

    fn check_shape(&self, e: &GroupElement) -> Result<()> {
        if e.residues.len() != self.factors.len() {
            return Err(Error::ShapeMismatch {
                expected: self.factors.len(),
                got: e.residues.len(),
            });
        }
        Ok(())
    }

    /// Componentwise sum reduced modulo each factor.
    pub fn add(&self, u: &GroupElement, v: &GroupElement) -> Result<GroupElement> {
        self.check_shape(u)?;
        self.check_shape(v)?;
        Ok(GroupElement::from_residues(
            u.residues
                .iter()
                .zip(&v.residues)
                .zip(&self.factors)
                .map(|((&a, &b), &n)| (a + b) % n)
                .collect(),
        ))
    }

    /// Additive inverse.
    pub fn neg(&self, u: &GroupElement) -> Result<GroupElement> {
        self.check_shape(u)?;
        Ok(GroupElement::from_residues(
            u.residues
                .iter()
                .zip(&self.factors)
                .map(|(&a, &n)| (n - a) % n)
                .collect(),
        ))
    }

    /// `u - v`.
    pub fn sub(&self, u: &GroupElement, v: &GroupElement) -> Result<GroupElement> {
        self.check_shape(u)?;
        self.check_shape(v)?;
        Ok(GroupElement::from_residues(
            u.residues
                .iter()
                .zip(&v.residues)
                .zip(&self.factors)
                .map(|((&a, &b), &n)| (a + n - b) % n)
                .collect(),
        ))
    }

    /// `n . u` for a (possibly negative) integer scalar.
    pub fn scalar_mul(&self, n: i64, u: &GroupElement) -> Result<GroupElement> {
        self.check_shape(u)?;
        Ok(GroupElement::from_residues(
            u.residues
                .iter()
                .zip(&self.factors)
                .map(|(&a, &m)| {
                    let m_i = m as i128;
                    ((n as i128 * a as i128).rem_euclid(m_i)) as u64
                })
                .collect(),
        ))
    }

    /// Additive order of an element (lcm of the per-factor orders).
    pub fn element_order(&self, u: &GroupElement) -> Result<u64> {
        self.check_shape(u)?;
        let mut ord = 1u64;
        for (&r, &n) in u.residues.iter().zip(&self.factors) {
            let component = n / gcd(n, r); // gcd(n, 0) = n, so zero residues give 1
            ord = ord / gcd(ord, component) * component;
        }
        Ok(ord)
    }

    /// Position of an element in the lexicographic enumeration (last factor
    /// varies fastest).
    pub fn index_of(&self, e: &GroupElement) -> Result<u64> {
        self.check_shape(e)?;
        let mut idx = 0u64;
        for (&r, &n) in e.residues.iter().zip(&self.factors) {
            idx = idx * n + r;
        }
        Ok(idx)
    }

    /// Inverse of [`AbelianGroup::index_of`].
    ///
    /// Panics if `idx >= order`.
    pub fn element_at(&self, idx: u64) -> GroupElement {
        assert!(idx < self.order, "element index {idx} out of range");
        let mut residues = vec![0u64; self.factors.len()];
        let mut rest = idx;
        for (slot, &n) in residues.iter_mut().zip(&self.factors).rev() {
            *slot = rest % n;
            rest /= n;
        }
        GroupElement::from_residues(residues)
    }

    /// All elements in lexicographic order.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order).map(|i| self.element_at(i))
    }

    /// Evaluates the character indexed by `index` at `e`:
    /// `exp(2 pi i sum_j index_j e_j / n_j)`.
    pub fn character_value(&self, index: &GroupElement, e: &GroupElement) -> Result<Complex64> {
        self.check_shape(index)?;
        self.check_shape(e)?;
        let mut phase = 0.0f64;
        for ((&s, &r), &n) in index.residues.iter().zip(&e.residues).zip(&self.factors) {
            let t = (s as u128 * r as u128 % n as u128) as f64;
            phase += t / n as f64;
        }
        Ok(Complex64::from_polar(1.0, TAU * phase))
    }

    /// Direct product in canonical form, together with the factor positions
    /// needed to embed operand elements into the product.
    pub fn direct_product(&self, other: &Self) -> (Self, ProductSplit) {
        let mut factors = Vec::with_capacity(self.rank() + other.rank());
        let mut left_pos = vec![0usize; self.rank()];
        let mut right_pos = vec![0usize; other.rank()];
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.rank() || j < other.rank() {
            let take_left =
                j >= other.rank() || (i < self.rank() && self.factors[i] <= other.factors[j]);
            if take_left {
                left_pos[i] = factors.len();
                factors.push(self.factors[i]);
                i += 1;
            } else {
                right_pos[j] = factors.len();
                factors.push(other.factors[j]);
                j += 1;
            }
        }
        (
            AbelianGroup::from_canonical(factors),
            ProductSplit {
                left_pos,
                right_pos,
            },
        )
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z/{n}Z")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.factors.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let factors = Vec::<u64>::deserialize(deserializer)?;
        AbelianGroup::new(&factors).map_err(D::Error::custom)
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// A character of a finite abelian group, identified with the group element
/// that indexes it (finite abelian groups are self-dual).
#[derive(Debug, Clone)]
pub struct Character {
    group: AbelianGroup,
    index: GroupElement,
}

impl Character {
    pub fn new(group: AbelianGroup, index: GroupElement) -> Result<Self> {
        group.check_shape(&index)?;
        Ok(Character { group, index })
    }

    pub fn index(&self) -> &GroupElement {
        &self.index
    }

    pub fn eval(&self, e: &GroupElement) -> Result<Complex64> {
        self.group.character_value(&self.index, e)
    }
}

/// One representative per isomorphism class of abelian groups of order `n`,
/// obtained from the partitions of each prime exponent. The result is
/// sorted by factor list, so the order is deterministic.
pub fn enumerate_abelian_groups(n: u64) -> Result<Vec<AbelianGroup>> {
    if n == 0 {
        return Err(Error::Domain("group order must be >= 1".into()));
    }
    if n == 1 {
        return Ok(vec![AbelianGroup::trivial()]);
    }
    let mut classes: Vec<Vec<u64>> = vec![Vec::new()];
    for (p, e) in arith::factorize(n) {
        let parts = partitions(e);
        let mut next = Vec::with_capacity(classes.len() * parts.len());
        for base in &classes {
            for part in &parts {
                let mut factors = base.clone();
                factors.extend(part.iter().map(|&k| p.pow(k)));
                next.push(factors);
            }
        }
        classes = next;
    }
    let mut groups: Vec<AbelianGroup> = classes
        .into_iter()
        .map(|mut factors| {
            factors.sort_unstable();
            AbelianGroup::from_canonical(factors)
        })
        .collect();
    groups.sort_by(|a, b| a.factors.cmp(&b.factors));
    Ok(groups)
}

/// All partitions of `n` as weakly decreasing sequences.
fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        let mut k = max.min(rest);
        while k >= 1 {
            cur.push(k);
            rec(rest - k, k, cur, out);
            cur.pop();
            k -= 1;
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}
