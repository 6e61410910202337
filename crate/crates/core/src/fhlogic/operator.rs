use super::{Atom, FiniteSupportVector};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, CMatrix, C64};
use std::collections::{BTreeMap, BTreeSet};

/// `F` on the finite atom set `e` plus `λ` times the identity on `ℓ2(A ∖ e)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FHOperator {
    support: Vec<Atom>,
    matrix: CMatrix,
    tail: C64,
}

impl FHOperator {
    /// Accepts the support in any order; rows and columns are permuted to
    /// ascending atom order.
    pub fn new(support: Vec<Atom>, matrix: CMatrix, tail: C64) -> Result<Self> {
        let k = support.len();
        if matrix.nrows() != k || matrix.ncols() != k {
            return Err(Error::validation(format!(
                "matrix is {}x{} for a support of {k} atoms",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if support.iter().collect::<BTreeSet<_>>().len() != k {
            return Err(Error::validation("support atoms must be distinct"));
        }
        if matrix.iter().chain([&tail]).any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("operator has non-finite entries"));
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&i| support[i]);
        Ok(FHOperator {
            support: order.iter().map(|&i| support[i]).collect(),
            matrix: CMatrix::from_fn(k, k, |r, c| matrix[(order[r], order[c])]),
            tail,
        })
    }

    pub fn scalar(tail: C64) -> Self {
        FHOperator {
            support: Vec::new(),
            matrix: CMatrix::zeros(0, 0),
            tail,
        }
    }

    pub fn support(&self) -> &[Atom] {
        &self.support
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn tail(&self) -> C64 {
        self.tail
    }

    fn position(&self, a: Atom) -> Option<usize> {
        self.support.binary_search(&a).ok()
    }

    /// Hermitian `F` and real `λ`, within `1e-9`.
    pub fn is_symmetric(&self) -> bool {
        hermitian_defect(&self.matrix) <= 1e-9 && self.tail.im.abs() <= 1e-9
    }

    fn removable(&self, i: usize, tol: f64) -> bool {
        (0..self.support.len()).all(|j| {
            let expected = if i == j { self.tail } else { C64::default() };
            (self.matrix[(i, j)] - expected).norm() <= tol
                && (self.matrix[(j, i)] - expected).norm() <= tol
        })
    }

    /// Drops every atom whose row and column already agree with the scalar
    /// part. Removability of one atom does not depend on the others, so a
    /// single pass yields the least support.
    pub fn canonicalize(&self, tol: f64) -> FHOperator {
        let keep: Vec<usize> = (0..self.support.len())
            .filter(|&i| !self.removable(i, tol))
            .collect();
        FHOperator {
            support: keep.iter().map(|&i| self.support[i]).collect(),
            matrix: CMatrix::from_fn(keep.len(), keep.len(), |r, c| self.matrix[(keep[r], keep[c])]),
            tail: self.tail,
        }
    }

    pub fn is_canonical(&self, tol: f64) -> bool {
        (0..self.support.len()).all(|i| !self.removable(i, tol))
    }

    /// Dense matrix on `window`, which must contain the support.
    pub fn expand(&self, window: &[Atom]) -> Result<CMatrix> {
        for a in &self.support {
            if !window.contains(a) {
                return Err(Error::validation(format!("window does not contain support atom {a}")));
            }
        }
        let m = window.len();
        Ok(CMatrix::from_fn(m, m, |r, c| {
            match (self.position(window[r]), self.position(window[c])) {
                (Some(i), Some(j)) => self.matrix[(i, j)],
                _ if r == c => self.tail,
                _ => C64::default(),
            }
        }))
    }
}

/// On `e`: the matrix action; off `e`: multiplication by `λ`.
pub fn fh_apply(t: &FHOperator, v: &FiniteSupportVector) -> FiniteSupportVector {
    let mut out = FiniteSupportVector::default();
    for (i, &a) in t.support.iter().enumerate() {
        let z: C64 = t
            .support
            .iter()
            .enumerate()
            .map(|(j, &b)| t.matrix[(i, j)] * v.get(b))
            .sum();
        out.add_at(a, z);
    }
    for (&a, &z) in v.entries() {
        if t.position(a).is_none() {
            out.add_at(a, z * t.tail);
        }
    }
    out
}

/// Every column sum of `F` equals `λ`: exactly the condition for `T` to map
/// zero-sum vectors to zero-sum vectors.
pub fn zero_sum_compatible(t: &FHOperator, tol: f64) -> bool {
    (0..t.support.len()).all(|j| {
        let sum: C64 = t.matrix.column(j).iter().sum();
        (sum - t.tail).norm() <= tol
    })
}

/// Recovers `(e, F, λ)` from a matrix on `window` that is a finite matrix on
/// `e` plus a scalar elsewhere.
///
/// Atoms outside `e` have vanishing off-diagonal row and column and a common
/// diagonal value, so `e` is the complement of the largest such class. Ties
/// go to the class containing the highest atom. At least two atoms must lie
/// outside `e`.
pub fn decompose_equivariant(m: &CMatrix, window: &[Atom], tol: f64) -> Result<FHOperator> {
    let n = window.len();
    if n < 3 {
        return Err(Error::validation("decomposition needs a window of at least 3 atoms"));
    }
    if m.nrows() != n || m.ncols() != n {
        return Err(Error::validation(format!(
            "matrix is {}x{} for a window of {n} atoms",
            m.nrows(),
            m.ncols()
        )));
    }
    let clean: Vec<usize> = (0..n)
        .filter(|&i| (0..n).all(|j| i == j || (m[(i, j)].norm() <= tol && m[(j, i)].norm() <= tol)))
        .collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &i in &clean {
        match classes
            .iter_mut()
            .find(|c| (m[(c[0], c[0])] - m[(i, i)]).norm() <= tol)
        {
            Some(c) => c.push(i),
            None => classes.push(vec![i]),
        }
    }
    let outside = classes
        .into_iter()
        .max_by_key(|c| (c.len(), c.iter().map(|&i| window[i]).max()))
        .filter(|c| c.len() >= 2)
        .ok_or(Error::NotEquivariant { max_support: n - 2 })?;
    let tail = m[(outside[0], outside[0])];
    let inside: Vec<usize> = (0..n).filter(|i| !outside.contains(i)).collect();
    let result = FHOperator::new(
        inside.iter().map(|&i| window[i]).collect(),
        CMatrix::from_fn(inside.len(), inside.len(), |r, c| m[(inside[r], inside[c])]),
        tail,
    )?;
    // Transpositions of two outside atoms must commute with the matrix.
    for (x, &p) in outside.iter().enumerate() {
        for &q in &outside[x + 1..] {
            for k in 0..n {
                let swap = |i: usize| if i == p { q } else if i == q { p } else { i };
                for l in 0..n {
                    if (m[(swap(k), swap(l))] - m[(k, l)]).norm() > tol {
                        return Err(Error::NotEquivariant { max_support: n - 2 });
                    }
                }
            }
        }
    }
    Ok(result)
}

/// `f(x) = Σ_{a ∈ e} g_a x(a)` on zero-sum vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalRepresentation {
    pub support: Vec<Atom>,
    pub coefficients: BTreeMap<Atom, C64>,
}

impl FunctionalRepresentation {
    pub fn eval(&self, x: &FiniteSupportVector) -> C64 {
        self.coefficients.iter().map(|(&a, &g)| g * x.get(a)).sum()
    }
}

/// Reconstructs a functional on zero-sum vectors from samples
/// `f(e_a - e_b)`.
///
/// With the last window atom `r` as reference, `h_a = f(e_a - e_r)` and every
/// sample must satisfy `f(e_a - e_b) = h_a - h_b`. The value taken by most
/// atoms (ties to the class of the highest atom) is the constant `c`; then
/// `e = {a : h_a ≠ c}` and `g_a = h_a - c`.
pub fn represent_functional(
    samples: &BTreeMap<(Atom, Atom), C64>,
    window: &[Atom],
    tol: f64,
) -> Result<FunctionalRepresentation> {
    let atoms: BTreeSet<Atom> = window.iter().copied().collect();
    if atoms.len() != window.len() || atoms.len() < 3 {
        return Err(Error::validation("window needs at least 3 distinct atoms"));
    }
    for (a, b) in samples.keys() {
        if !atoms.contains(a) || !atoms.contains(b) {
            return Err(Error::validation(format!("sample ({a}, {b}) lies outside the window")));
        }
    }
    let reference = *atoms.iter().next_back().expect("nonempty window");
    let sample = |a: Atom, b: Atom| -> Option<C64> {
        if a == b {
            return Some(C64::default());
        }
        samples
            .get(&(a, b))
            .copied()
            .or_else(|| samples.get(&(b, a)).map(|z| -z))
    };
    let mut h = BTreeMap::new();
    for &a in &atoms {
        let value = sample(a, reference).ok_or_else(|| {
            Error::validation(format!("missing sample for ({a}, {reference})"))
        })?;
        h.insert(a, value);
    }
    for (&(a, b), &value) in samples {
        let predicted = h[&a] - h[&b];
        if (value - predicted).norm() > tol {
            return Err(Error::Inconsistent(format!(
                "f(e_{a} - e_{b}) = {value} but the reference {reference} predicts {predicted}"
            )));
        }
    }
    let mut classes: Vec<(C64, Vec<Atom>)> = Vec::new();
    for (&a, &value) in &h {
        match classes.iter_mut().find(|(v, _)| (v - value).norm() <= tol) {
            Some((_, members)) => members.push(a),
            None => classes.push((value, vec![a])),
        }
    }
    let (constant, outside) = classes
        .into_iter()
        .max_by_key(|(_, members)| (members.len(), members.last().copied()))
        .expect("nonempty window");
    if outside.len() < 2 {
        return Err(Error::Inconsistent(
            "fewer than two atoms share the tail value".into(),
        ));
    }
    let coefficients: BTreeMap<Atom, C64> = h
        .into_iter()
        .filter(|(a, _)| !outside.contains(a))
        .map(|(a, v)| (a, v - constant))
        .collect();
    Ok(FunctionalRepresentation {
        support: coefficients.keys().copied().collect(),
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fhlogic::window;
    use crate::linalg::{c64, real};

    fn swap_op(tail: f64) -> FHOperator {
        FHOperator::new(
            vec![Atom(1), Atom(2)],
            CMatrix::from_fn(2, 2, |i, j| real(if i == j { 0.0 } else { 1.0 })),
            real(tail),
        )
        .unwrap()
    }

    #[test]
    fn apply_examples() {
        let v = FiniteSupportVector::new([(Atom(1), real(1.0)), (Atom(3), c64(0.0, 2.0))]);
        assert_eq!(fh_apply(&FHOperator::scalar(real(2.0)), &v), v.scaled(real(2.0)));
        assert_eq!(fh_apply(&swap_op(0.0), &v), FiniteSupportVector::unit(Atom(2)));
        let off = FiniteSupportVector::unit(Atom(7));
        assert_eq!(fh_apply(&swap_op(3.0), &off), off.scaled(real(3.0)));
    }

    #[test]
    fn canonicalize_examples() {
        let t = FHOperator::new(vec![Atom(1), Atom(2)], crate::linalg::real_diagonal(&[4.0, 4.0]), real(4.0))
            .unwrap();
        assert!(t.canonicalize(0.0).support().is_empty());
        assert_eq!(swap_op(0.0).canonicalize(0.0), swap_op(0.0));
        let t = FHOperator::new(vec![Atom(1), Atom(2)], crate::linalg::real_diagonal(&[1.0, 4.0]), real(4.0))
            .unwrap();
        assert_eq!(t.canonicalize(0.0).support(), &[Atom(1)]);
    }

    #[test]
    fn new_sorts_support() {
        let m = CMatrix::from_fn(2, 2, |i, j| real((2 * i + j) as f64));
        let t = FHOperator::new(vec![Atom(5), Atom(2)], m, real(0.0)).unwrap();
        assert_eq!(t.support(), &[Atom(2), Atom(5)]);
        assert_eq!(t.matrix()[(0, 1)], real(2.0));
        assert!(FHOperator::new(vec![Atom(1), Atom(1)], CMatrix::zeros(2, 2), real(0.0)).is_err());
    }

    #[test]
    fn zero_sum_examples() {
        assert!(zero_sum_compatible(&FHOperator::scalar(real(7.0)), 0.0));
        assert!(zero_sum_compatible(&swap_op(1.0), 0.0));
        let t = FHOperator::new(vec![Atom(1), Atom(2)], crate::linalg::real_diagonal(&[2.0, 2.0]), real(1.0))
            .unwrap();
        assert!(!zero_sum_compatible(&t, 0.0));
    }

    #[test]
    fn decompose_examples() {
        let w = window(8);
        let t = FHOperator::new(
            vec![Atom(3), Atom(6)],
            CMatrix::from_fn(2, 2, |i, j| c64((i + 2 * j) as f64 + 1.0, i as f64 - j as f64)),
            c64(0.5, -1.0),
        )
        .unwrap();
        assert_eq!(decompose_equivariant(&t.expand(&w).unwrap(), &w, 0.0).unwrap(), t);
        let s = decompose_equivariant(&(CMatrix::identity(8, 8) * real(3.0)), &w, 0.0).unwrap();
        assert!(s.support().is_empty());
        assert_eq!(s.tail(), real(3.0));
        let dense = CMatrix::from_fn(8, 8, |i, j| real(1.0 + (i * 8 + j) as f64));
        assert_eq!(
            decompose_equivariant(&dense, &w, 1e-12),
            Err(Error::NotEquivariant { max_support: 6 })
        );
    }

    #[test]
    fn functional_examples() {
        let w = window(5);
        let all_pairs = |f: &dyn Fn(Atom, Atom) -> C64| {
            let mut s = BTreeMap::new();
            for &a in &w {
                for &b in &w {
                    if a != b {
                        s.insert((a, b), f(a, b));
                    }
                }
            }
            s
        };
        let zero = represent_functional(&all_pairs(&|_, _| C64::default()), &w, 1e-12).unwrap();
        assert!(zero.support.is_empty());

        let coord = |a: Atom, b: Atom| {
            real(if a == Atom(1) { 1.0 } else { 0.0 } - if b == Atom(1) { 1.0 } else { 0.0 })
        };
        let rep = represent_functional(&all_pairs(&coord), &w, 1e-12).unwrap();
        assert_eq!(rep.support, vec![Atom(1)]);
        assert_eq!(rep.coefficients[&Atom(1)], real(1.0));

        let varying = |a: Atom, b: Atom| {
            if a == Atom(2) {
                real(b.0 as f64)
            } else if b == Atom(2) {
                real(-(a.0 as f64))
            } else {
                C64::default()
            }
        };
        assert!(matches!(
            represent_functional(&all_pairs(&varying), &w, 1e-12),
            Err(Error::Inconsistent(_))
        ));
    }
}
