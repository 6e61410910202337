//! Brute-force reference computations. None of these call the routines they
//! are used to check.

use crate::linalg::{real, CMatrix, CVector, C64};
use std::collections::{BTreeMap, BTreeSet};

/// A partial labeling as `object -> label` over indices.
pub type Labeling = BTreeMap<usize, usize>;

/// Every map `Y -> Y` as a value vector.
pub fn all_maps(y: usize) -> Vec<Vec<usize>> {
    let total = y.pow(y as u32);
    (0..total)
        .map(|mut code| {
            (0..y)
                .map(|_| {
                    let d = code % y;
                    code /= y;
                    d
                })
                .collect()
        })
        .collect()
}

/// `∃ h : Y -> Y` with `dom f ⊆ dom g` and `f = h ∘ g` on `dom f`.
pub fn relabel_le(f: &Labeling, g: &Labeling, y: usize) -> bool {
    if !f.keys().all(|x| g.contains_key(x)) {
        return false;
    }
    all_maps(y)
        .iter()
        .any(|h| f.iter().all(|(x, &fx)| h[g[x]] == fx))
}

/// As [`relabel_le`] with `h` nondecreasing for the label ranks.
pub fn monotone_le(f: &Labeling, g: &Labeling, ranks: &[i64]) -> bool {
    if !f.keys().all(|x| g.contains_key(x)) {
        return false;
    }
    let y = ranks.len();
    all_maps(y).iter().any(|h| {
        let monotone = (0..y).all(|p| (0..y).all(|q| ranks[p] > ranks[q] || ranks[h[p]] <= ranks[h[q]]));
        monotone && f.iter().all(|(x, &fx)| h[g[x]] == fx)
    })
}

/// `f ≤ g` read off kernels: `dom f ⊆ dom g` and `g(x) = g(y)` forces
/// `f(x) = f(y)`.
pub fn kernel_le(f: &Labeling, g: &Labeling) -> bool {
    f.keys().all(|x| g.contains_key(x))
        && f.iter()
            .all(|(x, fx)| f.iter().all(|(z, fz)| g[x] != g[z] || fx == fz))
}

/// All `(|Y|+1)^|X|` partial labelings.
pub fn all_labelings(x: usize, y: usize) -> Vec<Labeling> {
    let base = y + 1;
    let total = base.pow(x as u32);
    (0..total)
        .map(|mut code| {
            let mut f = Labeling::new();
            for obj in 0..x {
                let d = code % base;
                code /= base;
                if d > 0 {
                    f.insert(obj, d - 1);
                }
            }
            f
        })
        .collect()
}

/// Partition of `{a} ∪ X` (slot 0 is `a`, slot `i + 1` is object `i`) induced
/// by a family that forms an ideal: unmeasured objects sit with `a`, measured
/// ones are split by every member defined on both. Returns sorted blocks of
/// slots, or `None` if the relation is not an equivalence.
pub fn family_partition(x: usize, family: &[Labeling]) -> Option<Vec<Vec<usize>>> {
    let measured: BTreeSet<usize> = family.iter().flat_map(|f| f.keys().copied()).collect();
    let same = |p: usize, q: usize| -> bool {
        match (p, q) {
            (0, 0) => true,
            (0, o) | (o, 0) => !measured.contains(&(o - 1)),
            (p, q) => {
                let (p, q) = (p - 1, q - 1);
                if measured.contains(&p) != measured.contains(&q) {
                    return false;
                }
                family
                    .iter()
                    .all(|f| match (f.get(&p), f.get(&q)) {
                        (Some(u), Some(v)) => u == v,
                        _ => true,
                    })
            }
        }
    };
    let n = x + 1;
    for p in 0..n {
        for q in 0..n {
            for r in 0..n {
                if same(p, q) && same(q, r) && !same(p, r) {
                    return None;
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for s in 0..n {
        match blocks.iter_mut().find(|b| same(b[0], s)) {
            Some(b) => b.push(s),
            None => blocks.push(vec![s]),
        }
    }
    Some(blocks)
}

/// Partition of the downward closure of `{h ∘ k ∘ s|E : k : Y -> Y, E ⊆ X}`.
pub fn hat_partition(h: &[usize], s: &[usize], y: usize) -> Option<Vec<Vec<usize>>> {
    let x = s.len();
    let mut generators: BTreeSet<Labeling> = BTreeSet::new();
    for k in all_maps(y) {
        for subset in 0..1usize << x {
            let g: Labeling = (0..x)
                .filter(|obj| subset >> obj & 1 == 1)
                .map(|obj| (obj, h[k[s[obj]]]))
                .collect();
            generators.insert(g);
        }
    }
    let members: Vec<Labeling> = all_labelings(x, y)
        .into_iter()
        .filter(|f| generators.iter().any(|g| kernel_le(f, g)))
        .collect();
    family_partition(x, &members)
}

/// `exp(M)` by scaling and squaring of a 30-term Taylor series.
pub fn expm(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let norm = m.norm();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = m / real(2f64.powi(squarings as i32));
    let mut term = CMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..=30 {
        term = &term * &scaled / real(k as f64);
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `p(M)` for ascending coefficients, by Horner's rule on matrices.
pub fn matrix_polynomial(coeffs: &[f64], m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    coeffs
        .iter()
        .rev()
        .fold(CMatrix::zeros(n, n), |acc, &c| &acc * m + CMatrix::identity(n, n) * real(c))
}

/// `‖Sw - <w,Sw> w‖²`
pub fn centered_variance(s: &CMatrix, w: &CVector) -> f64 {
    let sw = s * w;
    let mean: C64 = w.dotc(&sw);
    (sw - w * mean).norm_squared()
}

/// `Σ_φ X(φ) conj(Y(φ))` where `X(φ) = ∏ x_n(φ(n))` over explicit
/// two-point functions `[x(a), x(b)]`.
pub fn tensor_inner(xs: &[[C64; 2]], ys: &[[C64; 2]]) -> C64 {
    let n = xs.len();
    (0..1usize << n)
        .map(|phi| {
            (0..n).fold(real(1.0), |acc, k| {
                let bit = (phi >> k) & 1;
                acc * xs[k][bit] * ys[k][bit].conj()
            })
        })
        .sum()
}

/// `∏ <x_n, y_n>` with each inner product summed over both points.
pub fn product_of_inners(xs: &[[C64; 2]], ys: &[[C64; 2]]) -> C64 {
    xs.iter()
        .zip(ys)
        .fold(real(1.0), |acc, (x, y)| acc * (x[0] * y[0].conj() + x[1] * y[1].conj()))
}

/// Orthonormal basis of the column space by pivoted Gram-Schmidt with one
/// reorthogonalization; stops once every residual is below
/// `1e-9 · max(1, largest column norm)`.
pub fn column_space(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    let mut residuals: Vec<CVector> = m.column_iter().map(|c| c.into_owned()).collect();
    let top = residuals.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let mut basis: Vec<CVector> = Vec::new();
    while basis.len() < n {
        let Some((j, norm)) = residuals
            .iter()
            .map(|r| r.norm())
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(&y.1))
        else {
            break;
        };
        if norm <= 1e-9 * top {
            break;
        }
        let mut q = residuals[j].clone() / real(norm);
        for b in &basis {
            let c: C64 = b.dotc(&q);
            q -= b * c;
        }
        let qn = q.norm();
        q /= real(qn);
        for r in residuals.iter_mut() {
            let c: C64 = q.dotc(r);
            *r -= &q * c;
        }
        basis.push(q);
    }
    CMatrix::from_fn(n, basis.len(), |r, c| basis[c][r])
}

pub fn dense_projector(basis: &CMatrix) -> CMatrix {
    basis * basis.adjoint()
}

pub fn dense_join(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let both = CMatrix::from_fn(n, a.ncols() + b.ncols(), |r, c| {
        if c < a.ncols() {
            a[(r, c)]
        } else {
            b[(r, c - a.ncols())]
        }
    });
    column_space(&both)
}

pub fn dense_complement(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    column_space(&(CMatrix::identity(n, n) - dense_projector(a)))
}

/// `A ∧ B = (A^⊥ ∨ B^⊥)^⊥`
pub fn dense_meet(a: &CMatrix, b: &CMatrix) -> CMatrix {
    dense_complement(&dense_join(&dense_complement(a), &dense_complement(b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_rotation_generator() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = real(-std::f64::consts::FRAC_PI_2);
        m[(1, 0)] = real(std::f64::consts::FRAC_PI_2);
        let r = expm(&m);
        assert!((r[(0, 0)]).norm() < 1e-14 && (r[(1, 0)] - real(1.0)).norm() < 1e-14);
    }

    #[test]
    fn relabeling_oracle_examples() {
        let f: Labeling = [(0, 0), (1, 0)].into();
        let g: Labeling = [(0, 0), (1, 1)].into();
        assert!(relabel_le(&f, &g, 2) && !relabel_le(&g, &f, 2));
        let rev: Labeling = [(0, 1), (1, 0)].into();
        assert!(!monotone_le(&rev, &g, &[0, 1]) && monotone_le(&f, &g, &[0, 1]));
    }
}
