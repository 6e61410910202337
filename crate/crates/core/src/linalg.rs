//! Dense complex linear algebra shared by the operator, dynamics and lattice
//! modules.
//!
//! Inner products are linear in the first argument: `<x, y> = Σ x_i conj(y_i)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::cmp::Ordering;

pub type C64 = nalgebra::Complex<f64>;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

/// Singular values below this are treated as zero on unit-scale data.
pub const RANK_THRESHOLD: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn inner(x: &CVector, y: &CVector) -> C64 {
    y.dotc(x)
}

pub fn basis_vector(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = real(1.0);
    v
}

pub fn from_reals(xs: &[f64]) -> CVector {
    CVector::from_iterator(xs.len(), xs.iter().map(|&x| real(x)))
}

pub fn real_diagonal(xs: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&from_reals(xs))
}

pub fn columns_to_matrix(dim: usize, vectors: &[CVector]) -> CMatrix {
    let mut m = CMatrix::zeros(dim, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        m.set_column(j, v);
    }
    m
}

pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * real(0.5)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, Vec<CVector>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let eig = SymmetricEigen::new(hermitize(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(Ordering::Equal)
    });
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| eig.eigenvectors.column(k).into_owned())
        .collect();
    (values, vectors)
}

/// Rotates `v` so that its first component of non-negligible magnitude is
/// real and positive.
pub fn fix_phase(v: &CVector) -> CVector {
    let scale = v.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
    match v.iter().find(|z| z.norm() > 1e-6 * scale.max(f64::MIN_POSITIVE)) {
        Some(z) => v * (z.conj() / z.norm()),
        None => v.clone(),
    }
}

/// Thin singular value decomposition `M V = U Σ` with singular values in
/// decreasing order. Columns of `U` for zero singular values are zero.
pub struct Svd {
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    pub v: CMatrix,
}

/// One-sided Jacobi SVD. Rotates column pairs of `M` until all are mutually
/// orthogonal to working precision; the accumulated rotations form `V`.
pub fn svd(m: &CMatrix) -> Svd {
    let (n, k) = m.shape();
    let mut a = m.clone();
    let mut v = CMatrix::identity(k, k);
    for _ in 0..JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma: C64 = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                // Phase that makes the pair's inner product real and positive.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let xp = mat[(r, p)];
                        let xq = mat[(r, q)] * phase;
                        mat[(r, p)] = xp * c - xq * s;
                        mat[(r, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut order: Vec<(f64, usize)> = (0..k).map(|j| (a.column(j).norm(), j)).collect();
    order.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)));
    let u = CMatrix::from_fn(n, k, |r, c| {
        let (sigma, j) = order[c];
        if sigma > 0.0 {
            a[(r, j)] / sigma
        } else {
            C64::default()
        }
    });
    Svd {
        u,
        singular_values: order.iter().map(|o| o.0).collect(),
        v: CMatrix::from_fn(k, k, |r, c| v[(r, order[c].1)]),
    }
}

const JACOBI_SWEEPS: usize = 100;

/// Orthonormal basis of the span of `vectors` (SVD rank with a relative
/// threshold).
pub fn orthonormal_basis(dim: usize, vectors: &[CVector]) -> Vec<CVector> {
    if vectors.is_empty() || dim == 0 {
        return Vec::new();
    }
    let d = svd(&columns_to_matrix(dim, vectors));
    let smax = d.singular_values.first().copied().unwrap_or(0.0);
    let cutoff = RANK_THRESHOLD * smax.max(1.0);
    d.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > cutoff)
        .map(|(k, _)| d.u.column(k).into_owned())
        .collect()
}

pub fn rank(dim: usize, vectors: &[CVector]) -> usize {
    orthonormal_basis(dim, vectors).len()
}

/// `x - Σ <x,q> q` for an orthonormal family `q`.
pub fn residual_from_span(onb: &[CVector], x: &CVector) -> CVector {
    let mut r = x.clone();
    for q in onb {
        let c = inner(&r, q);
        r -= q * c;
    }
    r
}

pub fn projector(dim: usize, onb: &[CVector]) -> CMatrix {
    let mut p = CMatrix::zeros(dim, dim);
    for q in onb {
        p += q * q.adjoint();
    }
    p
}

/// Orthonormal basis of `span(a) ∩ span(b)`.
pub fn span_intersection(dim: usize, a: &[CVector], b: &[CVector]) -> Vec<CVector> {
    let qa = orthonormal_basis(dim, a);
    let qb = orthonormal_basis(dim, b);
    if qa.is_empty() || qb.is_empty() {
        return Vec::new();
    }
    // Components of span(a) orthogonal to span(b); its kernel is the
    // intersection, read off from the right singular vectors.
    let residuals: Vec<CVector> = qa.iter().map(|q| residual_from_span(&qb, q)).collect();
    let k = qa.len();
    let d = svd(&columns_to_matrix(dim, &residuals));
    let qa_mat = columns_to_matrix(dim, &qa);
    let mut found = Vec::new();
    for (j, &s) in d.singular_values.iter().enumerate() {
        if s < RANK_THRESHOLD {
            found.push(&qa_mat * d.v.column(j));
        }
    }
    debug_assert!(found.len() <= k);
    canonical_basis(dim, &orthonormal_basis(dim, &found))
}

/// Deterministic orthonormal basis of a subspace: Gram–Schmidt over the
/// columns of its projector in coordinate order. Depends only on the subspace.
pub fn canonical_basis(dim: usize, onb: &[CVector]) -> Vec<CVector> {
    if onb.is_empty() {
        return Vec::new();
    }
    let p = projector(dim, onb);
    let mut out: Vec<CVector> = Vec::with_capacity(onb.len());
    for j in 0..dim {
        if out.len() == onb.len() {
            break;
        }
        let col = p.column(j).into_owned();
        let mut r = residual_from_span(&out, &col);
        r = residual_from_span(&out, &r);
        let n = r.norm();
        // Some remaining column always has norm >= 1/dim.
        if n > 1e-3 {
            out.push(fix_phase(&(r / real(n))));
        }
    }
    out
}

/// Lexicographic comparison of components rounded to `1e-9` multiples.
pub fn compare_rounded(a: &CVector, b: &CVector) -> Ordering {
    let key = |z: &C64| ((z.re * 1e9).round() as i64, (z.im * 1e9).round() as i64);
    for (x, y) in a.iter().zip(b.iter()) {
        match key(x).cmp(&key(y)) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

/// Sum of the diagonal.
pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().sum()
}

pub fn max_abs(values: &[f64]) -> f64 {
    values.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_svd_rank_deficient_complex() {
        // Five orthonormal columns plus a sixth inside their span.
        let q = DMatrix::from_fn(9, 9, |r, c| c64(((r * 5 + c * 3) % 7) as f64 - 3.0, ((r + 2 * c) % 4) as f64))
            .qr()
            .q();
        let mut m = CMatrix::zeros(9, 6);
        for c in 0..5 {
            m.set_column(c, &q.column(c));
        }
        m.set_column(5, &(q.column(1) * c64(0.3, -0.2) + q.column(4) * real(0.7)));
        let d = svd(&m);
        let sigma = CMatrix::from_diagonal(&CVector::from_iterator(6, d.singular_values.iter().map(|&s| real(s))));
        assert!((&d.u * sigma * d.v.adjoint() - &m).norm() < 1e-13);
        assert!(d.singular_values[5] < 1e-14 && d.singular_values[4] > 0.1);
        assert_eq!(orthonormal_basis(9, &(0..6).map(|c| m.column(c).into_owned()).collect::<Vec<_>>()).len(), 5);
    }

    #[test]
    fn intersection_by_rank() {
        let e = |k| basis_vector(3, k);
        let s = (&e(1) + &e(2)) * real(std::f64::consts::FRAC_1_SQRT_2);
        let got = span_intersection(3, &[e(0), s], &[e(0), e(1)]);
        assert_eq!(got.len(), 1);
        assert!((&got[0] - e(0)).norm() < 1e-12);
        assert!(span_intersection(3, &[e(0)], &[e(1)]).is_empty());
        assert_eq!(span_intersection(3, &[e(0), e(1)], &[e(1), e(0)]).len(), 2);
    }

    #[test]
    fn canonical_basis_is_basis_independent() {
        let e = |k| basis_vector(3, k);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let a = canonical_basis(3, &[e(0), e(1)]);
        let b = canonical_basis(
            3,
            &[(&e(0) + &e(1)) * real(h), (&e(0) - &e(1)) * c64(0.0, h)],
        );
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn rank_of_dependent_family() {
        let v = from_reals(&[1.0, 2.0, 0.0]);
        assert_eq!(rank(3, &[v.clone(), &v * real(2.0)]), 1);
        assert_eq!(rank(3, &[]), 0);
    }
}
