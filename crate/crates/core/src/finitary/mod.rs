//! Operators described by eigen-data.
//!
//! An [`EigenSystem`] lists real eigenvalues with orthonormal eigenvectors in a
//! `d`-dimensional space. Its domain is the span of the listed eigenvectors, so
//! fewer than `d` pairs model an operator with a non-dense domain; a full list
//! is the "quantum like" case. Everything else in the crate (dynamics,
//! expected values, joint measurements) is computed from this representation.

mod polynomial;

pub use polynomial::Polynomial;

use crate::error::{Error, Result};
use crate::linalg::{
    self, columns_to_matrix, compare_rounded, fix_phase, hermitian_defect, hermitian_eigen,
    inner, orthonormal_basis, real, residual_from_span, CMatrix, CVector, C64,
};
use std::cmp::Ordering;

/// Tolerances for unit-scale double-precision data.
pub mod tol {
    /// Hermiticity defect and imaginary parts of eigenvalues.
    pub const SYM: f64 = 1e-9;
    /// Orthonormality of eigenvector families.
    pub const ORTH: f64 = 1e-9;
    /// Relative distance of a vector from an operator domain.
    pub const DOM: f64 = 1e-8;

    /// Eigen-residual bound for an operator of norm `norm`.
    pub fn eig(norm: f64) -> f64 {
        1e-8 * (1.0 + norm)
    }

    /// Commutator bound for operators of norms `a` and `b`.
    pub fn comm(a: f64, b: f64) -> f64 {
        1e-8 * (1.0 + a * b)
    }

    /// Gap below which eigenvalues are identified.
    pub fn dedup(max_abs: f64) -> f64 {
        1e-8 * (1.0 + max_abs)
    }
}

/// A square matrix equal to its conjugate transpose within [`tol::SYM`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Validates and stores the exactly Hermitian part of `m`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::validation(format!(
                "matrix is {}x{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("matrix has non-finite entries"));
        }
        let defect = hermitian_defect(&m);
        if defect > tol::SYM {
            return Err(Error::validation(format!(
                "matrix is not Hermitian (defect {defect:.3e})"
            )));
        }
        Ok(HermitianMatrix(linalg::hermitize(&m)))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::validation("rows of unequal length"));
        }
        HermitianMatrix::new(CMatrix::from_fn(n, n, |i, j| real(rows[i][j])))
    }

    pub fn diagonal(values: &[f64]) -> Self {
        HermitianMatrix(linalg::real_diagonal(values))
    }

    pub fn zeros(dim: usize) -> Self {
        HermitianMatrix(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    /// Frobenius norm, an upper bound for the operator norm.
    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn scaled(&self, s: f64) -> HermitianMatrix {
        HermitianMatrix(&self.0 * real(s))
    }
}

/// Anything that acts as a symmetric operator on (part of) `C^d`.
pub trait Observable {
    fn dim(&self) -> usize;
    fn act(&self, x: &CVector) -> Result<CVector>;
}

impl Observable for HermitianMatrix {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn act(&self, x: &CVector) -> Result<CVector> {
        check_len(self.dim(), x)?;
        Ok(&self.0 * x)
    }
}

impl Observable for EigenSystem {
    fn dim(&self) -> usize {
        self.dim
    }

    fn act(&self, x: &CVector) -> Result<CVector> {
        self.apply(x)
    }
}

fn check_len(dim: usize, x: &CVector) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: x.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    pub vector: CVector,
}

/// A maximal set of eigenvectors sharing one eigenvalue (up to
/// [`tol::dedup`]).
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenspace {
    pub value: f64,
    pub vectors: Vec<CVector>,
}

impl Eigenspace {
    pub fn multiplicity(&self) -> usize {
        self.vectors.len()
    }

    pub fn projector(&self, dim: usize) -> CMatrix {
        linalg::projector(dim, &self.vectors)
    }
}

/// Real eigenvalues with orthonormal eigenvectors in an ambient space of
/// dimension `dim`; pairs sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    dim: usize,
    pairs: Vec<EigenPair>,
}

impl EigenSystem {
    /// Validates eigenpairs: real eigenvalues, orthonormal vectors of length
    /// `dim`, at most `dim` of them.
    ///
    /// Real eigenvalues make both deficiency indices of the operator zero, so
    /// every value built here is essentially self-adjoint on its domain.
    pub fn from_eigenpairs(pairs: Vec<(C64, CVector)>, dim: usize) -> Result<Self> {
        if pairs.len() > dim {
            return Err(Error::validation(format!(
                "{} eigenpairs exceed ambient dimension {dim}",
                pairs.len()
            )));
        }
        let mut checked = Vec::with_capacity(pairs.len());
        for (k, (value, vector)) in pairs.into_iter().enumerate() {
            if !value.re.is_finite() || !value.im.is_finite() {
                return Err(Error::validation(format!("eigenvalue {k} is not finite")));
            }
            if value.im.abs() > tol::SYM {
                return Err(Error::validation(format!(
                    "eigenvalue {k} is not real ({} + {}i)",
                    value.re, value.im
                )));
            }
            check_len(dim, &vector)?;
            checked.push(EigenPair {
                value: value.re,
                vector,
            });
        }
        for i in 0..checked.len() {
            let norm = checked[i].vector.norm();
            if (norm - 1.0).abs() > tol::ORTH {
                return Err(Error::validation(format!(
                    "eigenvector {i} is not normalized (norm {norm})"
                )));
            }
            for j in 0..i {
                let overlap = inner(&checked[i].vector, &checked[j].vector).norm();
                if overlap > tol::ORTH {
                    return Err(Error::validation(format!(
                        "eigenvectors {j} and {i} are not orthogonal (overlap {overlap:.3e})"
                    )));
                }
            }
        }
        Ok(EigenSystem::from_sorted(dim, checked))
    }

    pub fn from_real_pairs(pairs: Vec<(f64, CVector)>, dim: usize) -> Result<Self> {
        EigenSystem::from_eigenpairs(
            pairs.into_iter().map(|(v, x)| (real(v), x)).collect(),
            dim,
        )
    }

    /// The diagonal operator on the standard basis.
    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        let pairs = values
            .iter()
            .enumerate()
            .map(|(k, &v)| EigenPair {
                value: v,
                vector: linalg::basis_vector(d, k),
            })
            .collect();
        EigenSystem::from_sorted(d, pairs)
    }

    /// Sorts ascending; near-equal eigenvalues are ordered by their rounded
    /// eigenvector components.
    fn from_sorted(dim: usize, mut pairs: Vec<EigenPair>) -> Self {
        pairs.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap_or(Ordering::Equal));
        let gap = tol::dedup(pairs.iter().map(|p| p.value.abs()).fold(0.0, f64::max));
        let mut start = 0;
        for k in 1..=pairs.len() {
            if k == pairs.len() || pairs[k].value - pairs[k - 1].value > gap {
                pairs[start..k].sort_by(|a, b| compare_rounded(&a.vector, &b.vector));
                start = k;
            }
        }
        EigenSystem { dim, pairs }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pairs(&self) -> &[EigenPair] {
        &self.pairs
    }

    pub fn count(&self) -> usize {
        self.pairs.len()
    }

    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn vectors(&self) -> Vec<CVector> {
        self.pairs.iter().map(|p| p.vector.clone()).collect()
    }

    /// Whether the eigenvectors span the whole space.
    pub fn is_full(&self) -> bool {
        self.pairs.len() == self.dim
    }

    /// Largest absolute eigenvalue: the norm on the domain.
    pub fn norm(&self) -> f64 {
        self.pairs.iter().map(|p| p.value.abs()).fold(0.0, f64::max)
    }

    fn dedup_gap(&self) -> f64 {
        tol::dedup(self.norm())
    }

    /// Distance of `x` from the domain.
    pub fn domain_residual(&self, x: &CVector) -> Result<f64> {
        check_len(self.dim, x)?;
        let mut r = x.clone();
        for p in &self.pairs {
            r -= &p.vector * inner(x, &p.vector);
        }
        Ok(r.norm())
    }

    pub fn contains(&self, x: &CVector) -> Result<bool> {
        Ok(self.domain_residual(x)? <= tol::DOM * x.norm())
    }

    pub(crate) fn check_domain(&self, x: &CVector) -> Result<()> {
        let residual = self.domain_residual(x)?;
        if residual > tol::DOM * x.norm() {
            return Err(Error::OutsideDomain { residual });
        }
        Ok(())
    }

    /// `Σ λ_i <x, v_i> v_i` for `x` in the domain.
    pub fn apply(&self, x: &CVector) -> Result<CVector> {
        self.check_domain(x)?;
        Ok(self.map_coefficients(x, real))
    }

    /// `Σ g(λ_i) <x, v_i> v_i` without a domain check.
    pub(crate) fn map_coefficients(&self, x: &CVector, g: impl Fn(f64) -> C64) -> CVector {
        let mut out = CVector::zeros(self.dim);
        for p in &self.pairs {
            out += &p.vector * (inner(x, &p.vector) * g(p.value));
        }
        out
    }

    /// `Σ λ v v†`: the operator extended by zero off its domain.
    pub fn to_matrix(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for p in &self.pairs {
            m += &p.vector * p.vector.adjoint() * real(p.value);
        }
        m
    }

    /// Eigenspaces of distinct eigenvalues, ascending. Values closer than
    /// [`tol::dedup`] are chained together; the reported value is their mean.
    pub fn eigenspaces(&self) -> Vec<Eigenspace> {
        let gap = self.dedup_gap();
        let mut out: Vec<(Vec<f64>, Vec<CVector>)> = Vec::new();
        for (k, p) in self.pairs.iter().enumerate() {
            let joins = k > 0 && p.value - self.pairs[k - 1].value <= gap;
            if joins {
                let last = out.last_mut().expect("previous group");
                last.0.push(p.value);
                last.1.push(p.vector.clone());
            } else {
                out.push((vec![p.value], vec![p.vector.clone()]));
            }
        }
        out.into_iter()
            .map(|(values, vectors)| Eigenspace {
                value: values.iter().sum::<f64>() / values.len() as f64,
                vectors,
            })
            .collect()
    }

    /// Basis-independent comparison: equal eigenvalues within `tol` and equal
    /// spectral projectors (Frobenius) within `tol`.
    pub fn approx_eq(&self, other: &EigenSystem, tol: f64) -> bool {
        if self.dim != other.dim || self.count() != other.count() {
            return false;
        }
        let (a, b) = (self.eigenspaces(), other.eigenspaces());
        a.len() == b.len()
            && a.iter().zip(&b).all(|(x, y)| {
                x.multiplicity() == y.multiplicity()
                    && (x.value - y.value).abs() <= tol
                    && (x.projector(self.dim) - y.projector(self.dim)).norm() <= tol
            })
    }
}

/// Full eigen-system of a Hermitian matrix, eigenvalues ascending.
pub fn diagonalize(m: &HermitianMatrix) -> Result<EigenSystem> {
    let (values, vectors) = hermitian_eigen(m.matrix());
    let bound = tol::eig(m.norm());
    let mut pairs = Vec::with_capacity(values.len());
    for (value, vector) in values.into_iter().zip(vectors) {
        let vector = fix_phase(&vector);
        let residual = (m.matrix() * &vector - &vector * real(value)).norm();
        if residual > bound {
            return Err(Error::Tolerance {
                context: "eigen residual".into(),
                value: residual,
                bound,
            });
        }
        pairs.push(EigenPair { value, vector });
    }
    Ok(EigenSystem::from_sorted(m.dim(), pairs))
}

/// Dimension of the span of the orbit `{x, Mx, M²x, ...}`, examining at most
/// `cap` vectors.
pub fn orbit_span_dim(m: &HermitianMatrix, x: &CVector, cap: usize) -> Result<usize> {
    if cap == 0 {
        return Err(Error::validation("cap must be at least 1"));
    }
    check_len(m.dim(), x)?;
    let scale = 1.0 + m.norm();
    let mut basis: Vec<CVector> = Vec::new();
    let mut next = x.clone();
    while basis.len() < cap.min(m.dim()) {
        let size = next.norm();
        let mut r = residual_from_span(&basis, &next);
        r = residual_from_span(&basis, &r);
        if r.norm() <= linalg::RANK_THRESHOLD * scale * size.max(f64::MIN_POSITIVE)
            || r.norm() == 0.0
        {
            break;
        }
        let q = &r / real(r.norm());
        next = m.matrix() * &q;
        basis.push(q);
    }
    Ok(basis.len())
}

/// The restriction of `a` to the invariant subspace spanned by `k`.
pub fn restrict(a: &EigenSystem, k: &[CVector]) -> Result<EigenSystem> {
    for v in k {
        a.check_domain(v)?;
    }
    let q = orthonormal_basis(a.dim(), k);
    let mut images = Vec::with_capacity(q.len());
    for (j, qj) in q.iter().enumerate() {
        let y = a.apply(qj)?;
        let r = residual_from_span(&q, &y);
        if r.norm() > tol::DOM * (1.0 + y.norm()) {
            return Err(Error::NotInvariant {
                witness: j,
                residual: r.norm(),
            });
        }
        images.push(y);
    }
    let m = CMatrix::from_fn(q.len(), q.len(), |r, c| inner(&images[c], &q[r]));
    let (values, coeffs) = hermitian_eigen(&m);
    let basis = columns_to_matrix(a.dim(), &q);
    let pairs = values
        .into_iter()
        .zip(coeffs)
        .map(|(value, w)| EigenPair {
            value,
            vector: fix_phase(&(&basis * w)),
        })
        .collect();
    Ok(EigenSystem::from_sorted(a.dim(), pairs))
}

/// Orthogonal projection of `x` onto the span of the linearly independent
/// family `k`.
pub fn project(k: &[CVector], x: &CVector) -> Result<CVector> {
    let dim = x.len();
    for v in k {
        check_len(dim, v)?;
    }
    let q = orthonormal_basis(dim, k);
    if q.len() != k.len() {
        return Err(Error::validation(format!(
            "projection family is linearly dependent (rank {} of {})",
            q.len(),
            k.len()
        )));
    }
    Ok(x - residual_from_span(&q, x))
}

/// Equal domains and pairwise commutation on the common domain.
pub fn commeasurable(ops: &[EigenSystem]) -> Result<bool> {
    let Some(first) = ops.first() else {
        return Ok(true);
    };
    for op in ops {
        if op.dim() != first.dim() {
            return Err(Error::DimensionMismatch {
                expected: first.dim(),
                found: op.dim(),
            });
        }
    }
    for op in &ops[1..] {
        if op.count() != first.count() {
            return Ok(false);
        }
        for p in op.pairs() {
            if !first.contains(&p.vector)? {
                return Ok(false);
            }
        }
    }
    let basis = first.vectors();
    for (i, a) in ops.iter().enumerate() {
        for b in &ops[i + 1..] {
            let bound = tol::comm(a.norm(), b.norm());
            for x in &basis {
                let ab = a.map_coefficients(&b.map_coefficients(x, real), real);
                let ba = b.map_coefficients(&a.map_coefficients(x, real), real);
                if (ab - ba).norm() > bound {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A common eigenvector with its eigenvalue under each operator.
#[derive(Clone, Debug, PartialEq)]
pub struct JointEigenvector {
    pub vector: CVector,
    pub values: Vec<f64>,
}

/// Simultaneous diagonalization by splitting eigenspaces of the first
/// operator with each subsequent one.
pub fn joint_eigensystem(ops: &[EigenSystem]) -> Result<Vec<JointEigenvector>> {
    if !commeasurable(ops)? {
        return Err(Error::NotCommeasurable);
    }
    let Some(first) = ops.first() else {
        return Ok(Vec::new());
    };
    let dim = first.dim();
    let mut clusters: Vec<Vec<CVector>> = first
        .eigenspaces()
        .into_iter()
        .map(|s| s.vectors)
        .collect();
    for op in &ops[1..] {
        let gap = op.dedup_gap();
        let mut split = Vec::with_capacity(clusters.len());
        for cluster in clusters {
            if cluster.len() == 1 {
                split.push(cluster);
                continue;
            }
            let images: Vec<CVector> = cluster
                .iter()
                .map(|v| op.map_coefficients(v, real))
                .collect();
            let m = CMatrix::from_fn(cluster.len(), cluster.len(), |r, c| {
                inner(&images[c], &cluster[r])
            });
            let (values, coeffs) = hermitian_eigen(&m);
            let basis = columns_to_matrix(dim, &cluster);
            let mut group: Vec<CVector> = Vec::new();
            for k in 0..values.len() {
                if k > 0 && values[k] - values[k - 1] > gap {
                    split.push(std::mem::take(&mut group));
                }
                group.push(&basis * &coeffs[k]);
            }
            split.push(group);
        }
        clusters = split;
    }
    let mut out: Vec<JointEigenvector> = clusters
        .into_iter()
        .flatten()
        .map(|v| {
            let vector = fix_phase(&v);
            let values = ops
                .iter()
                .map(|op| inner(&op.map_coefficients(&vector, real), &vector).re)
                .collect();
            JointEigenvector { vector, values }
        })
        .collect();
    out.sort_by(|a, b| {
        for (x, y) in a.values.iter().zip(&b.values) {
            match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        compare_rounded(&a.vector, &b.vector)
    });
    Ok(out)
}

/// The operator `F(A_1, ..., A_n)` on the common domain: each joint
/// eigenvector gets eigenvalue `F(λ_1, ..., λ_n)`.
pub fn functional_calculus<F>(f: F, ops: &[EigenSystem]) -> Result<EigenSystem>
where
    F: Fn(&[f64]) -> f64,
{
    let joint = joint_eigensystem(ops)?;
    let dim = ops.first().map(|o| o.dim()).unwrap_or(0);
    let mut pairs = Vec::with_capacity(joint.len());
    for j in joint {
        let value = f(&j.values);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                value,
                at: j.values,
            });
        }
        pairs.push(EigenPair {
            value,
            vector: j.vector,
        });
    }
    Ok(EigenSystem::from_sorted(dim, pairs))
}

/// `∏ (t - λ)` over the distinct eigenvalues.
pub fn minimal_polynomial(a: &EigenSystem) -> Polynomial {
    let roots: Vec<f64> = a.eigenspaces().iter().map(|s| s.value).collect();
    Polynomial::from_roots(&roots)
}

/// `p(A) x`, computed from eigen-data.
pub fn eval_polynomial(p: &Polynomial, a: &EigenSystem, x: &CVector) -> Result<CVector> {
    a.check_domain(x)?;
    Ok(a.map_coefficients(x, |v| real(p.eval(v))))
}

/// Eigenvectors span the whole (truncated) space.
pub fn is_intrinsically_effective(a: &EigenSystem) -> bool {
    a.is_full()
}

/// Extends `a` to the whole space with explicitly supplied completing pairs.
pub fn complete_extension(a: &EigenSystem, extra: &[(f64, CVector)]) -> Result<EigenSystem> {
    if a.count() + extra.len() != a.dim() {
        return Err(Error::validation(format!(
            "extension is incomplete: {} + {} pairs in dimension {}",
            a.count(),
            extra.len(),
            a.dim()
        )));
    }
    let pairs = a
        .pairs()
        .iter()
        .map(|p| (p.value, p.vector.clone()))
        .chain(extra.iter().cloned())
        .collect();
    EigenSystem::from_real_pairs(pairs, a.dim())
}

/// Whether the full operator `t` extends `a`: every eigenpair of `a` is an
/// eigenpair of `t`.
pub fn is_benioff_extension(t: &EigenSystem, a: &EigenSystem) -> Result<bool> {
    if !t.is_full() {
        return Err(Error::validation(format!(
            "extension candidate has {} eigenpairs in dimension {}",
            t.count(),
            t.dim()
        )));
    }
    if t.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: t.dim(),
            found: a.dim(),
        });
    }
    let bound = tol::eig(t.norm().max(a.norm()));
    for p in a.pairs() {
        let image = t.map_coefficients(&p.vector, real);
        if (image - &p.vector * real(p.value)).norm() > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Sampled function `x ↦ y`, looked up with tolerance [`tol::dedup`].
#[derive(Clone, Debug, PartialEq)]
pub struct ValueTable {
    pub points: Vec<(f64, f64)>,
}

impl ValueTable {
    pub fn lookup(&self, x: f64) -> Option<f64> {
        self.points
            .iter()
            .find(|(px, _)| (px - x).abs() <= tol::dedup(x.abs()))
            .map(|&(_, y)| y)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        self.lookup(x)
            .ok_or_else(|| Error::validation(format!("value table has no entry for {x}")))
    }
}

/// A single operator generating the commeasurable family: injective
/// eigenvalues `β` on a joint eigenbasis, with tables `f_i(β) = λ_i` so that
/// `f_i(A) = A_i`.
///
/// `β` is the first operator's eigenvalue when those are pairwise distinct on
/// the joint basis, and the basis index otherwise.
pub fn joint_generator(ops: &[EigenSystem]) -> Result<(EigenSystem, Vec<ValueTable>)> {
    let joint = joint_eigensystem(ops)?;
    let dim = ops.first().map(|o| o.dim()).unwrap_or(0);
    let firsts: Vec<f64> = joint.iter().map(|j| j.values[0]).collect();
    let gap = tol::dedup(linalg::max_abs(&firsts));
    let injective = firsts.windows(2).all(|w| w[1] - w[0] > gap);
    let beta: Vec<f64> = if injective {
        firsts
    } else {
        (0..joint.len()).map(|k| k as f64).collect()
    };
    let pairs = joint
        .iter()
        .zip(&beta)
        .map(|(j, &b)| EigenPair {
            value: b,
            vector: j.vector.clone(),
        })
        .collect();
    let tables = (0..ops.len())
        .map(|i| ValueTable {
            points: joint.iter().zip(&beta).map(|(j, &b)| (b, j.values[i])).collect(),
        })
        .collect();
    Ok((EigenSystem::from_sorted(dim, pairs), tables))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_vector, c64, from_reals};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn e(d: usize, k: usize) -> CVector {
        basis_vector(d, k)
    }

    fn sigma_x() -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn diagonalize_examples() {
        let id = diagonalize(&HermitianMatrix::diagonal(&[1.0, 1.0, 1.0])).unwrap();
        assert_eq!(id.values(), vec![1.0, 1.0, 1.0]);

        let sx = diagonalize(&sigma_x()).unwrap();
        let vals = sx.values();
        assert!((vals[0] + 1.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        let minus = from_reals(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
        let plus = from_reals(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert!(inner(&sx.pairs()[0].vector, &minus).norm() > 1.0 - 1e-12);
        assert!(inner(&sx.pairs()[1].vector, &plus).norm() > 1.0 - 1e-12);

        let d = diagonalize(&HermitianMatrix::diagonal(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(d.values(), vec![1.0, 2.0, 3.0]);

        let bad = CMatrix::from_fn(2, 2, |i, j| if i < j { real(1.0) } else { real(0.0) });
        assert!(HermitianMatrix::new(bad).is_err());
    }

    #[test]
    fn from_eigenpairs_validation() {
        let a = EigenSystem::from_real_pairs(vec![(2.0, e(3, 0))], 3).unwrap();
        assert_eq!(a.count(), 1);
        assert!(!is_intrinsically_effective(&a));
        assert!(EigenSystem::from_real_pairs(vec![(1.0, e(2, 0)), (2.0, e(2, 0))], 2).is_err());
        assert!(EigenSystem::from_eigenpairs(vec![(c64(1.0, 1e-3), e(2, 0))], 2).is_err());
        assert!(EigenSystem::from_real_pairs(
            vec![(1.0, e(1, 0)), (2.0, e(1, 0) * real(-1.0))],
            1
        )
        .is_err());
    }

    #[test]
    fn apply_examples() {
        let a = diagonalize(&sigma_x()).unwrap();
        let v = a.pairs()[1].vector.clone();
        assert!((a.apply(&v).unwrap() - &v).norm() < 1e-12);
        assert_eq!(a.apply(&CVector::zeros(2)).unwrap(), CVector::zeros(2));

        let partial = EigenSystem::from_real_pairs(vec![(1.0, e(2, 0))], 2).unwrap();
        match partial.apply(&e(2, 1)) {
            Err(Error::OutsideDomain { residual }) => assert!((residual - 1.0).abs() < 1e-12),
            other => panic!("expected OutsideDomain, got {other:?}"),
        }
    }

    #[test]
    fn orbit_examples() {
        let d = HermitianMatrix::diagonal(&[1.0, 2.0]);
        assert_eq!(orbit_span_dim(&d, &e(2, 0), 10).unwrap(), 1);
        assert_eq!(orbit_span_dim(&d, &(e(2, 0) + e(2, 1)), 10).unwrap(), 2);
        assert_eq!(orbit_span_dim(&sigma_x(), &e(2, 0), 10).unwrap(), 2);
        assert_eq!(orbit_span_dim(&sigma_x(), &e(2, 0), 1).unwrap(), 1);
        assert!(orbit_span_dim(&d, &e(2, 0), 0).is_err());
    }

    #[test]
    fn restrict_examples() {
        let a = EigenSystem::diagonal(&[1.0, 2.0, 3.0]);
        assert!(restrict(&a, &a.vectors()).unwrap().approx_eq(&a, 1e-12));
        let r = restrict(&a, &[e(3, 0), e(3, 2)]).unwrap();
        let expected = EigenSystem::from_real_pairs(vec![(1.0, e(3, 0)), (3.0, e(3, 2))], 3).unwrap();
        assert!(r.approx_eq(&expected, 1e-12));

        let full = diagonalize(&sigma_x()).unwrap();
        assert!(matches!(
            restrict(&full, &[e(2, 0)]),
            Err(Error::NotInvariant { .. })
        ));
    }

    #[test]
    fn project_examples() {
        let x = from_reals(&[1.0, 1.0]);
        assert!((project(std::slice::from_ref(&x), &x).unwrap() - &x).norm() < 1e-12);
        assert!((project(&[e(2, 0)], &x).unwrap() - e(2, 0)).norm() < 1e-12);
        let k = from_reals(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        let p = project(&[k], &e(2, 0)).unwrap();
        assert!((p - from_reals(&[0.5, 0.5])).norm() < 1e-12);
        assert!(project(&[x.clone(), &x * real(2.0)], &x).is_err());
    }

    #[test]
    fn commeasurability_examples() {
        let a = EigenSystem::diagonal(&[1.0, 2.0]);
        let b = EigenSystem::diagonal(&[3.0, 4.0]);
        assert!(commeasurable(&[a.clone(), b]).unwrap());
        let sx = diagonalize(&sigma_x()).unwrap();
        assert!(!commeasurable(&[a.clone(), sx]).unwrap());
        let partial = EigenSystem::from_real_pairs(vec![(1.0, e(2, 0))], 2).unwrap();
        assert!(!commeasurable(&[partial, a]).unwrap());
    }

    #[test]
    fn joint_eigensystem_splits_degenerate_space() {
        let a = EigenSystem::diagonal(&[1.0, 1.0, 2.0]);
        let b = EigenSystem::diagonal(&[3.0, 4.0, 5.0]);
        let joint = joint_eigensystem(&[a.clone(), b]).unwrap();
        let expected = [(0, [1.0, 3.0]), (1, [1.0, 4.0]), (2, [2.0, 5.0])];
        for (j, (k, vals)) in joint.iter().zip(expected) {
            assert!(inner(&j.vector, &e(3, k)).norm() > 1.0 - 1e-12);
            assert!((j.values[0] - vals[0]).abs() < 1e-12);
            assert!((j.values[1] - vals[1]).abs() < 1e-12);
        }
        let single = joint_eigensystem(std::slice::from_ref(&a)).unwrap();
        assert_eq!(single.len(), 3);
        let sx = diagonalize(&HermitianMatrix::from_real_rows(&[
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0],
        ]).unwrap())
        .unwrap();
        assert_eq!(
            joint_eigensystem(&[EigenSystem::diagonal(&[1.0, 2.0, 3.0]), sx]),
            Err(Error::NotCommeasurable)
        );
    }

    #[test]
    fn functional_calculus_examples() {
        let a = EigenSystem::diagonal(&[1.0, 2.0]);
        let b = EigenSystem::diagonal(&[3.0, 4.0]);
        let sum = functional_calculus(|v| v[0] + v[1], &[a.clone(), b.clone()]).unwrap();
        assert!(sum.approx_eq(&EigenSystem::diagonal(&[4.0, 6.0]), 1e-12));
        let first = functional_calculus(|v| v[0], &[a.clone(), b]).unwrap();
        assert!(first.approx_eq(&a, 1e-12));
        let sx = diagonalize(&sigma_x()).unwrap();
        let sq = functional_calculus(|v| v[0] * v[0], &[sx]).unwrap();
        assert!(sq.approx_eq(&EigenSystem::diagonal(&[1.0, 1.0]), 1e-12));
        assert!(matches!(
            functional_calculus(|v| 1.0 / (v[0] - 1.0), &[a]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn minimal_polynomial_examples() {
        assert_eq!(
            minimal_polynomial(&EigenSystem::diagonal(&[1.0, 1.0, 1.0])).coeffs(),
            &[-1.0, 1.0]
        );
        let sx = diagonalize(&sigma_x()).unwrap();
        let p = minimal_polynomial(&sx);
        assert_eq!(p.degree(), Some(2));
        assert!((p.coeffs()[0] + 1.0).abs() < 1e-12 && p.coeffs()[1].abs() < 1e-12);
        let q = minimal_polynomial(&EigenSystem::diagonal(&[1.0, 1.0, 2.0]));
        assert_eq!(q.coeffs(), &[2.0, -3.0, 1.0]);
    }

    #[test]
    fn extensions() {
        let a = EigenSystem::from_real_pairs(vec![(1.0, e(2, 0))], 2).unwrap();
        let t = complete_extension(&a, &[(5.0, e(2, 1))]).unwrap();
        assert!(t.approx_eq(&EigenSystem::diagonal(&[1.0, 5.0]), 1e-12));
        assert!(is_intrinsically_effective(&t));
        assert!(is_benioff_extension(&t, &a).unwrap());
        let full = EigenSystem::diagonal(&[1.0, 2.0]);
        assert_eq!(complete_extension(&full, &[]).unwrap(), full);
        let skew = from_reals(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
        assert!(complete_extension(&a, &[(5.0, skew.clone())]).is_err());
        assert!(complete_extension(&a, &[]).is_err());

        let wrong = EigenSystem::from_real_pairs(vec![(3.0, e(2, 0))], 2).unwrap();
        assert!(!is_benioff_extension(&full, &wrong).unwrap());
        let inside = EigenSystem::from_real_pairs(vec![(1.0, skew)], 2).unwrap();
        assert!(is_benioff_extension(&EigenSystem::diagonal(&[1.0, 1.0]), &inside).unwrap());
        assert!(is_benioff_extension(&a, &a).is_err());
    }

    #[test]
    fn joint_generator_examples() {
        let s = EigenSystem::diagonal(&[1.0, 2.0, 3.0]);
        let (a, tables) = joint_generator(std::slice::from_ref(&s)).unwrap();
        assert!(a.approx_eq(&s, 1e-12));
        assert!(tables[0].points.iter().all(|(x, y)| (x - y).abs() < 1e-12));

        let s = EigenSystem::diagonal(&[1.0, 1.0]);
        let t = EigenSystem::diagonal(&[2.0, 3.0]);
        let (a, tables) = joint_generator(&[s.clone(), t.clone()]).unwrap();
        assert!(a.approx_eq(&EigenSystem::diagonal(&[0.0, 1.0]), 1e-12));
        assert_eq!(tables[0].points, vec![(0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(tables[1].points, vec![(0.0, 2.0), (1.0, 3.0)]);
        for (table, target) in tables.iter().zip([s, t]) {
            let rebuilt = functional_calculus(|v| table.eval(v[0]).unwrap(), std::slice::from_ref(&a)).unwrap();
            assert!(rebuilt.approx_eq(&target, 1e-9));
        }
        let sx = diagonalize(&sigma_x()).unwrap();
        assert_eq!(
            joint_generator(&[EigenSystem::diagonal(&[1.0, 2.0]), sx]),
            Err(Error::NotCommeasurable)
        );
    }
}
