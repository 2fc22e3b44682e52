//! Weighted complex projective 2-designs induced by d1u functions.
//!
//! For a d1u `f: Z/dZ -> B` the candidate design consists of `|B| + 1`
//! orthonormal bases of `C^d`: one basis per character index `s` of `B`,
//! with vectors `u_{t,s}(x) = chi_t(x) psi_s(f(x)) / sqrt(d)` for
//! `t in Z/dZ`, plus the standard basis. Per-basis weights are found by an
//! equality-constrained nonnegative least-squares fit of the twofold tensor
//! mixture against the normalized symmetric-subspace projector, and the
//! certificate is cross-checked along three routes that only share the
//! input vectors:
//!
//! 1. the Frobenius residual of the materialized `d^2 x d^2` operator,
//! 2. the frame-potential gap `sum w_x w_y |<x,y>|^4 - 2/(d(d+1))`,
//! 3. spot checks of the defining average against the closed-form
//!    Haar integral `(1 + |<a,b>|^2)/(d(d+1))` at random points.

use crate::diffcalc::GroupFunction;
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use std::f64::consts::TAU;

/// Gram matrices of putative bases must equal the identity this tightly.
pub const GRAM_TOL: f64 = 1e-10;
/// Unit-norm tolerance for individual vectors.
pub const UNIT_NORM_TOL: f64 = 1e-12;
/// A design is certified iff its Frobenius residual stays below this.
pub const CERTIFICATION_RESIDUAL_TOL: f64 = 1e-9;

/// A collection of orthonormal bases of `C^d`.
#[derive(Debug, Clone)]
pub struct BasisSet {
    d: usize,
    bases: Vec<Vec<Vec<Complex64>>>,
}

impl BasisSet {
    /// Validates that every basis consists of `d` unit vectors of length
    /// `d` with pairwise inner products zero (within [`GRAM_TOL`]).
    pub fn new(d: usize, bases: Vec<Vec<Vec<Complex64>>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension must be >= 1".into()));
        }
        for (j, basis) in bases.iter().enumerate() {
            if basis.len() != d || basis.iter().any(|v| v.len() != d) {
                return Err(Error::ShapeMismatch {
                    expected: d,
                    got: basis.len(),
                });
            }
            for (t, u) in basis.iter().enumerate() {
                let norm = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                if (norm - 1.0).abs() > UNIT_NORM_TOL {
                    return Err(Error::InvalidInput(format!(
                        "vector {t} of basis {j} has norm {norm}, not 1"
                    )));
                }
                for u2 in basis.iter().skip(t + 1) {
                    if inner(u, u2).norm() > GRAM_TOL {
                        return Err(Error::InvalidInput(format!(
                            "basis {j} is not orthogonal within {GRAM_TOL}"
                        )));
                    }
                }
            }
        }
        Ok(BasisSet { d, bases })
    }

    pub fn dimension(&self) -> usize {
        self.d
    }

    pub fn bases(&self) -> &[Vec<Vec<Complex64>>] {
        &self.bases
    }

    pub fn num_bases(&self) -> usize {
        self.bases.len()
    }
}

/// A [`BasisSet`] with one weight per basis (each vector of basis `j`
/// carries weight `w_j`), plus the certification numbers.
#[derive(Debug, Clone)]
pub struct WeightedDesign {
    basis_set: BasisSet,
    basis_weights: Vec<f64>,
    residual: f64,
    potential_gap: f64,
    certified: bool,
}

impl WeightedDesign {
    pub fn basis_set(&self) -> &BasisSet {
        &self.basis_set
    }

    pub fn basis_weights(&self) -> &[f64] {
        &self.basis_weights
    }

    /// Frobenius distance of the weighted twofold tensor mixture from the
    /// normalized symmetric-subspace projector.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn potential_gap(&self) -> f64 {
        self.potential_gap
    }

    /// True iff the residual met [`CERTIFICATION_RESIDUAL_TOL`] with
    /// nonnegative normalized weights. Never set on a failed fit.
    pub fn certified(&self) -> bool {
        self.certified
    }
}

/// Builds the `|B| + 1` candidate bases induced by a d1u function: one per
/// character of the codomain (in element order), then the standard basis.
/// Refuses functions that fail the d1u check.
pub fn character_bases(f: &GroupFunction) -> Result<BasisSet> {
    let verdict = f.is_d1u()?;
    if !verdict.is_d1u {
        return Err(Error::InvalidInput(
            "only d1u functions induce candidate 2-designs".into(),
        ));
    }
    let d = f.domain_order();
    let codomain = f.codomain();
    let scale = 1.0 / (d as f64).sqrt();
    // chi_t(x) = root[(t * x) mod d]
    let root: Vec<Complex64> = (0..d)
        .map(|r| Complex64::from_polar(1.0, TAU * r as f64 / d as f64))
        .collect();

    let mut bases = Vec::with_capacity(codomain.order() as usize + 1);
    for s in codomain.elements() {
        // psi_s(f(x)), evaluated once per column
        let psi: Vec<Complex64> = f
            .values()
            .iter()
            .map(|v| codomain.character_value(&s, v))
            .collect::<Result<_>>()?;
        let mut basis = Vec::with_capacity(d);
        for t in 0..d {
            let u: Vec<Complex64> = (0..d).map(|x| root[(t * x) % d] * psi[x] * scale).collect();
            basis.push(u);
        }
        bases.push(basis);
    }
    let standard: Vec<Vec<Complex64>> = (0..d)
        .map(|t| {
            let mut e = vec![Complex64::new(0.0, 0.0); d];
            e[t] = Complex64::new(1.0, 0.0);
            e
        })
        .collect();
    bases.push(standard);

    // every character basis is unbiased to the standard one by construction
    for basis in &bases[..bases.len() - 1] {
        for u in basis {
            if u.iter().any(|c| (c.norm() - scale).abs() > UNIT_NORM_TOL) {
                return Err(Error::Internal(
                    "character basis lost its flat component profile".into(),
                ));
            }
        }
    }
    BasisSet::new(d, bases)
}

/// Finds per-basis weights minimizing the Frobenius deviation of
/// `sum_j w_j S_j` from the normalized symmetric projector, subject to
/// `sum_j d w_j = 1` and `w_j >= 0`, where `S_j` is the twofold tensor sum
/// over basis `j`. Returns the design with its residual; when the best
/// feasible residual misses the tolerance the design is reported
/// not-certified rather than adjusted.
pub fn solve_weights(bs: BasisSet) -> WeightedDesign {
    let d = bs.d;
    let m = bs.num_bases();
    let gram = overlap_gram(&bs);
    // <S_j, T> = 2/(d+1) for any orthonormal basis
    let target = 2.0 / (d as f64 + 1.0);

    let weights = active_set_solve(&gram, target, d as f64, m);
    let residual = frobenius_residual(&bs, &weights);
    let potential_gap =
        frame_potential_from_gram(&gram, &weights) - 2.0 / (d as f64 * (d as f64 + 1.0));
    let normalized = {
        let total: f64 = weights.iter().sum::<f64>() * d as f64;
        (total - 1.0).abs() <= 1e-12
    };
    let certified =
        normalized && weights.iter().all(|&w| w >= 0.0) && residual <= CERTIFICATION_RESIDUAL_TOL;
    WeightedDesign {
        basis_set: bs,
        basis_weights: weights,
        residual,
        potential_gap,
        certified,
    }
}

/// `sum_{x,y} w_x w_y |<x,y>|^4 - 2/(d(d+1))`, recomputed from the design
/// vectors; nonnegative up to round-off and zero exactly on 2-designs.
pub fn frame_potential_gap(wd: &WeightedDesign) -> f64 {
    let d = wd.basis_set.d as f64;
    let mut fp = 0.0;
    for (j, basis_j) in wd.basis_set.bases.iter().enumerate() {
        for (k, basis_k) in wd.basis_set.bases.iter().enumerate() {
            let w = wd.basis_weights[j] * wd.basis_weights[k];
            if w == 0.0 {
                continue;
            }
            let mut acc = 0.0;
            for u in basis_j {
                for v in basis_k {
                    acc += inner(u, v).norm_sqr().powi(2);
                }
            }
            fp += w * acc;
        }
    }
    fp - 2.0 / (d * (d + 1.0))
}

/// Compares the weighted design average of `|<a,x>|^2 |<b,x>|^2` against
/// the Haar integral `(1 + |<a,b>|^2)/(d(d+1))` at `trials` random unit
/// vector pairs `(a, b)`; returns the maximum absolute deviation.
pub fn haar_point_check<R: Rng + ?Sized>(wd: &WeightedDesign, trials: usize, rng: &mut R) -> f64 {
    let d = wd.basis_set.d;
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let a = random_unit_vector(d, rng);
        let b = random_unit_vector(d, rng);
        let mut design_avg = 0.0;
        for (j, basis) in wd.basis_set.bases.iter().enumerate() {
            let w = wd.basis_weights[j];
            if w == 0.0 {
                continue;
            }
            for v in basis {
                design_avg += w * inner(&a, v).norm_sqr() * inner(&b, v).norm_sqr();
            }
        }
        let haar = (1.0 + inner(&a, &b).norm_sqr()) / (d as f64 * (d as f64 + 1.0));
        worst = worst.max((design_avg - haar).abs());
    }
    worst
}

/// Maximum deviation of `|<u,v>|^2` from `1/d` over pairs of vectors taken
/// from distinct bases. Zero exactly when the bases are mutually unbiased.
pub fn unbiasedness_report(bs: &BasisSet) -> Result<f64> {
    if bs.num_bases() < 2 {
        return Err(Error::Domain(
            "unbiasedness needs at least two bases".into(),
        ));
    }
    let target = 1.0 / bs.d as f64;
    let mut worst = 0.0f64;
    for (j, basis_j) in bs.bases.iter().enumerate() {
        for basis_k in bs.bases.iter().skip(j + 1) {
            for u in basis_j {
                for v in basis_k {
                    worst = worst.max((inner(u, v).norm_sqr() - target).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// JSON-facing snapshot of a weighted design certificate.
#[derive(Debug, Clone, Serialize)]
pub struct DesignReport {
    pub d: usize,
    pub certified: bool,
    pub residual: f64,
    pub potential_gap: f64,
    pub unbiasedness: f64,
    pub weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bases: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

impl DesignReport {
    pub fn from_design(wd: &WeightedDesign, include_bases: bool) -> Result<Self> {
        Ok(DesignReport {
            d: wd.basis_set.d,
            certified: wd.certified,
            residual: wd.residual,
            potential_gap: wd.potential_gap,
            unbiasedness: unbiasedness_report(&wd.basis_set)?,
            weights: wd.basis_weights.clone(),
            bases: include_bases.then(|| {
                wd.basis_set
                    .bases
                    .iter()
                    .map(|basis| {
                        basis
                            .iter()
                            .map(|v| v.iter().map(|c| [c.re, c.im]).collect())
                            .collect()
                    })
                    .collect()
            }),
        })
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|c| c / norm).collect();
        }
    }
}

/// `G[j][k] = sum_{u in j, v in k} |<u,v>|^4`; doubles as the quadratic
/// form of the least-squares objective and the frame-potential kernel.
fn overlap_gram(bs: &BasisSet) -> DMatrix<f64> {
    let m = bs.num_bases();
    let mut gram = DMatrix::zeros(m, m);
    for j in 0..m {
        for k in j..m {
            let mut acc = 0.0;
            for u in &bs.bases[j] {
                for v in &bs.bases[k] {
                    acc += inner(u, v).norm_sqr().powi(2);
                }
            }
            gram[(j, k)] = acc;
            gram[(k, j)] = acc;
        }
    }
    gram
}

fn frame_potential_from_gram(gram: &DMatrix<f64>, w: &[f64]) -> f64 {
    let m = w.len();
    let mut fp = 0.0;
    for j in 0..m {
        for k in 0..m {
            fp += w[j] * w[k] * gram[(j, k)];
        }
    }
    fp
}

/// Active-set iteration for
/// `min w' G w - 2 target 1' w  s.t.  d sum w = 1, w >= 0`.
/// At most `m` variables ever appear, so dense KKT solves are cheap; a
/// singular system falls back to the SVD least-squares solution.
fn active_set_solve(gram: &DMatrix<f64>, target: f64, d: f64, m: usize) -> Vec<f64> {
    let uniform = vec![1.0 / (d * m as f64); m];
    let mut free: Vec<usize> = (0..m).collect();
    let mut clamped: Vec<usize> = Vec::new();
    let mut w = uniform.clone();

    for _ in 0..(2 * m + 4) {
        if free.is_empty() {
            w = uniform.clone();
            break;
        }
        let nf = free.len();
        let mut kkt = DMatrix::zeros(nf + 1, nf + 1);
        let mut rhs = DVector::zeros(nf + 1);
        for (ii, &i) in free.iter().enumerate() {
            for (jj, &j) in free.iter().enumerate() {
                kkt[(ii, jj)] = 2.0 * gram[(i, j)];
            }
            kkt[(ii, nf)] = d;
            kkt[(nf, ii)] = d;
            rhs[ii] = 2.0 * target;
        }
        rhs[nf] = 1.0;
        let svd = kkt.svd(true, true);
        let Ok(solution) = svd.solve(&rhs, 1e-13) else {
            w = uniform.clone();
            break;
        };
        let mu = solution[nf];
        w = vec![0.0; m];
        for (ii, &i) in free.iter().enumerate() {
            w[i] = solution[ii];
        }

        // clamp the most negative weight, if any
        if let Some((worst_pos, &worst)) = free
            .iter()
            .enumerate()
            .min_by(|a, b| w[*a.1].total_cmp(&w[*b.1]))
        {
            if w[worst] < -1e-12 {
                clamped.push(free.remove(worst_pos));
                continue;
            }
        }

        // feasible: release a clamped weight only if its multiplier says the
        // objective still decreases along it
        let grad = |i: usize| -> f64 {
            let gw: f64 = (0..m).map(|j| gram[(i, j)] * w[j]).sum();
            2.0 * gw - 2.0 * target + mu * d
        };
        if let Some((pos, &i)) = clamped
            .iter()
            .enumerate()
            .min_by(|a, b| grad(*a.1).total_cmp(&grad(*b.1)))
        {
            if grad(i) < -1e-9 {
                free.push(clamped.remove(pos));
                free.sort_unstable();
                continue;
            }
        }
        break;
    }

    // exact nonnegativity and normalization
    for wi in w.iter_mut() {
        if *wi < 0.0 {
            *wi = 0.0;
        }
    }
    let total: f64 = w.iter().sum::<f64>() * d;
    if total > 0.0 {
        for wi in w.iter_mut() {
            *wi /= total;
        }
    } else {
        w = uniform;
    }
    w
}

/// Materializes `sum_j w_j S_j` in the `d^2 x d^2` tensor-square space and
/// returns its Frobenius distance from `Pi_sym / (d(d+1)/2)`.
fn frobenius_residual(bs: &BasisSet, weights: &[f64]) -> f64 {
    let d = bs.d;
    let dim = d * d;
    let mut mixture = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut kron = vec![Complex64::new(0.0, 0.0); dim];
    for (basis, &w) in bs.bases.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for v in basis {
            for x in 0..d {
                for y in 0..d {
                    kron[x * d + y] = v[x] * v[y];
                }
            }
            for p in 0..dim {
                let row = w * kron[p];
                let out = &mut mixture[p * dim..(p + 1) * dim];
                for (entry, kq) in out.iter_mut().zip(&kron) {
                    *entry += row * kq.conj();
                }
            }
        }
    }
    let norm = 1.0 / (d as f64 * (d as f64 + 1.0) / 2.0);
    let mut sum = 0.0f64;
    for x in 0..d {
        for y in 0..d {
            let p = x * d + y;
            for xp in 0..d {
                for yp in 0..d {
                    let q = xp * d + yp;
                    let mut t = 0.0;
                    if x == xp && y == yp {
                        t += 0.5 * norm;
                    }
                    if x == yp && y == xp {
                        t += 0.5 * norm;
                    }
                    sum += (mixture[p * dim + q] - Complex64::new(t, 0.0)).norm_sqr();
                }
            }
        }
    }
    sum.sqrt()
}
