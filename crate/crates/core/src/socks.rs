//! Antisymmetric tensors over a sequence of two-element sets.
//!
//! Pair `n` has elements `a_n` and `b_n`. A vector of the pair space `L_n` is
//! a function with `x(a_n) + x(b_n) = 0`, stored as its value at `a_n`. A
//! choice function on the first `N` pairs is encoded as an `N`-bit index whose
//! most significant bit is pair 0, with `a = 0` and `b = 1`; tables list
//! choices in that order.

use crate::error::{Error, Result};
use crate::linalg::{real, CMatrix, C64};
use std::collections::BTreeSet;
use std::f64::consts::FRAC_1_SQRT_2;

/// Largest `N` for which full `2^N` tables are built.
pub const MAX_TABLE_PAIRS: usize = 16;
/// Largest number of pairs a Fock vector may span.
pub const MAX_FOCK_PAIRS: usize = 32;

/// Element of `L_n`: value `value` at `a_n` and `-value` at `b_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairVector {
    pub pair: usize,
    pub value: C64,
}

impl PairVector {
    pub fn new(pair: usize, value: C64) -> Self {
        PairVector { pair, value }
    }

    pub fn at(&self, choose_b: bool) -> C64 {
        if choose_b {
            -self.value
        } else {
            self.value
        }
    }

    /// `x(a) conj(y(a)) + x(b) conj(y(b)) = 2 x(a) conj(y(a))`
    pub fn inner(&self, other: &PairVector) -> C64 {
        self.value * other.value.conj() * 2.0
    }
}

fn choice_bit(phi: usize, n: usize, pair: usize) -> bool {
    (phi >> (n - 1 - pair)) & 1 == 1
}

/// A function on the `2^N` choice functions of pairs `0..N`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignedTensor {
    n: usize,
    table: Vec<C64>,
}

impl SignedTensor {
    /// Validates the size and the sign rule `X(φ) = (-1)^{|φ|} X(a...a)`.
    pub fn new(n: usize, table: Vec<C64>) -> Result<Self> {
        if n > MAX_TABLE_PAIRS {
            return Err(Error::validation(format!(
                "tensor tables are limited to {MAX_TABLE_PAIRS} pairs"
            )));
        }
        if table.len() != 1 << n {
            return Err(Error::validation(format!(
                "table for N={n} needs {} entries, found {}",
                1usize << n,
                table.len()
            )));
        }
        let t = SignedTensor { n, table };
        let scale = t.table.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if t.sign_defect() > 1e-12 * (1.0 + scale) {
            return Err(Error::validation("table violates the antisymmetry sign rule"));
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> &[C64] {
        &self.table
    }

    pub fn get(&self, phi: usize) -> C64 {
        self.table[phi]
    }

    fn sign_defect(&self) -> f64 {
        let base = self.table[0];
        self.table
            .iter()
            .enumerate()
            .map(|(phi, &x)| (x - base * parity_sign(phi.count_ones() as usize)).norm())
            .fold(0.0, f64::max)
    }

    /// Checks `X(φ) = (-1)^m X(ψ)` for every pair of choices differing in `m`
    /// positions.
    pub fn is_antisymmetric_exhaustive(&self, tol: f64) -> bool {
        let size = self.table.len();
        (0..size).all(|phi| {
            (0..size).all(|psi| {
                let m = (phi ^ psi).count_ones() as usize;
                (self.table[phi] - self.table[psi] * parity_sign(m)).norm() <= tol
            })
        })
    }
}

fn parity_sign(m: usize) -> f64 {
    if m.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `X(φ) = ∏_n x_n(φ(n))` for vectors on consecutive pairs `0..N`.
pub fn tau(xs: &[PairVector]) -> Result<SignedTensor> {
    for (k, x) in xs.iter().enumerate() {
        if x.pair != k {
            return Err(Error::validation(format!(
                "pair vectors must cover pairs 0..{} in order; position {k} holds pair {}",
                xs.len(),
                x.pair
            )));
        }
    }
    let n = xs.len();
    if n > MAX_TABLE_PAIRS {
        return Err(Error::validation(format!(
            "tensor tables are limited to {MAX_TABLE_PAIRS} pairs"
        )));
    }
    let table = (0..1usize << n)
        .map(|phi| {
            xs.iter()
                .enumerate()
                .fold(real(1.0), |acc, (k, x)| acc * x.at(choice_bit(phi, n, k)))
        })
        .collect();
    Ok(SignedTensor { n, table })
}

/// `Σ_φ X(φ) conj(Y(φ))`
pub fn inner_t(x: &SignedTensor, y: &SignedTensor) -> Result<C64> {
    if x.n != y.n {
        return Err(Error::DimensionMismatch {
            expected: x.n,
            found: y.n,
        });
    }
    Ok(x.table
        .iter()
        .zip(&y.table)
        .map(|(a, b)| a * b.conj())
        .sum())
}

/// The unit generator `u_N = τ(1/√2, ..., 1/√2)` of the `N`-pair component.
pub fn generator(n: usize) -> Result<SignedTensor> {
    let xs: Vec<PairVector> = (0..n)
        .map(|k| PairVector::new(k, real(FRAC_1_SQRT_2)))
        .collect();
    tau(&xs)
}

/// `Σ_N c_N u_N` for `N = 0..=M`; each component is one-dimensional.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedFockVector {
    coeffs: Vec<C64>,
}

impl TruncatedFockVector {
    pub fn new(coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::validation("a Fock vector needs the N=0 coefficient"));
        }
        if coeffs.len() > MAX_FOCK_PAIRS + 1 {
            return Err(Error::validation(format!(
                "Fock vectors are limited to {MAX_FOCK_PAIRS} pairs"
            )));
        }
        if coeffs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("Fock vector has non-finite coefficients"));
        }
        Ok(TruncatedFockVector { coeffs })
    }

    /// `u_n` inside the space truncated at `m` pairs.
    pub fn unit(m: usize, n: usize) -> Result<Self> {
        if n > m {
            return Err(Error::validation(format!("u_{n} is outside truncation {m}")));
        }
        let mut coeffs = vec![C64::new(0.0, 0.0); m + 1];
        coeffs[n] = real(1.0);
        TruncatedFockVector::new(coeffs)
    }

    pub fn zero(m: usize) -> Self {
        TruncatedFockVector {
            coeffs: vec![C64::new(0.0, 0.0); m + 1],
        }
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// Number of pairs `M` of the truncation.
    pub fn max_pairs(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn inner(&self, other: &TruncatedFockVector) -> Result<C64> {
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coeffs.len(),
                found: other.coeffs.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    /// The `N`-pair component `c_N u_N` as a full table.
    pub fn component_tensor(&self, n: usize) -> Result<SignedTensor> {
        let c = *self
            .coeffs
            .get(n)
            .ok_or_else(|| Error::validation(format!("no component {n}")))?;
        let u = generator(n)?;
        Ok(SignedTensor {
            n,
            table: u.table.iter().map(|z| z * c).collect(),
        })
    }

    pub fn approx_eq(&self, other: &TruncatedFockVector, tol: f64) -> bool {
        self.coeffs.len() == other.coeffs.len()
            && self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .all(|(a, b)| (a - b).norm() <= tol)
    }
}

/// `c_N ↦ d_N c_N`
pub fn diag_operator(d: &[f64], v: &TruncatedFockVector) -> Result<TruncatedFockVector> {
    if d.len() < v.coeffs.len() {
        return Err(Error::validation(format!(
            "{} diagonal entries for {} components",
            d.len(),
            v.coeffs.len()
        )));
    }
    TruncatedFockVector::new(v.coeffs.iter().zip(d).map(|(c, &x)| c * x).collect())
}

/// Scales the pair-`n` vector by `λ_n`.
pub fn socks_l_operator(lambdas: &[f64], xs: &[PairVector]) -> Result<Vec<PairVector>> {
    if lambdas.len() < xs.len() {
        return Err(Error::validation(format!(
            "{} eigenvalues for {} pair vectors",
            lambdas.len(),
            xs.len()
        )));
    }
    xs.iter()
        .map(|x| {
            let lambda = lambdas.get(x.pair).ok_or_else(|| {
                Error::validation(format!("no eigenvalue for pair {}", x.pair))
            })?;
            Ok(PairVector::new(x.pair, x.value * lambda))
        })
        .collect()
}

/// Swaps `a_k` and `b_k` for every `k` in the set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlipAction {
    pairs: BTreeSet<usize>,
}

impl FlipAction {
    pub fn new(pairs: impl IntoIterator<Item = usize>) -> Self {
        FlipAction {
            pairs: pairs.into_iter().collect(),
        }
    }

    pub fn single(k: usize) -> Self {
        FlipAction::new([k])
    }

    pub fn pairs(&self) -> &BTreeSet<usize> {
        &self.pairs
    }

    /// `(-1)^{|F ∩ {0..n-1}|}`
    pub fn sign(&self, n: usize) -> f64 {
        parity_sign(self.pairs.range(..n).count())
    }
}

/// `c_N ↦ (-1)^{|F ∩ {0..N-1}|} c_N`
pub fn flip(f: &FlipAction, v: &TruncatedFockVector) -> TruncatedFockVector {
    TruncatedFockVector {
        coeffs: v
            .coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * f.sign(n))
            .collect(),
    }
}

/// The flip acting on a table: `(gX)(φ) = X(φ ∘ g)`.
pub fn flip_tensor(f: &FlipAction, x: &SignedTensor) -> SignedTensor {
    let mask = f
        .pairs
        .range(..x.n)
        .fold(0usize, |m, &k| m | 1 << (x.n - 1 - k));
    SignedTensor {
        n: x.n,
        table: (0..x.table.len()).map(|phi| x.table[phi ^ mask]).collect(),
    }
}

/// `{0..N*-1}` for the largest `N*` with `|c_{N*}| > tol`.
pub fn least_support(v: &TruncatedFockVector, tol: f64) -> BTreeSet<usize> {
    match v.coeffs.iter().rposition(|c| c.norm() > tol) {
        Some(top) => (0..top).collect(),
        None => BTreeSet::new(),
    }
}

pub const DEFAULT_SUPPORT_TOL: f64 = 1e-12;

/// `R_F M R_F = M` for the diagonal sign representation `R_F` on the
/// generators `u_0..u_M`.
pub fn is_invariant_operator(m: &CMatrix, f: &FlipAction) -> Result<bool> {
    if m.nrows() != m.ncols() {
        return Err(Error::validation("operator matrix must be square"));
    }
    let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let bound = 1e-12 * (1.0 + scale);
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if f.sign(i) != f.sign(j) && m[(i, j)].norm() > bound {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn pv(pair: usize, re: f64) -> PairVector {
        PairVector::new(pair, real(re))
    }

    #[test]
    fn tau_examples() {
        let x = tau(&[pv(0, 1.0)]).unwrap();
        assert_eq!(x.table(), &[real(1.0), real(-1.0)]);
        let x = tau(&[pv(0, 1.0), pv(1, 1.0)]).unwrap();
        assert_eq!(x.table(), &[real(1.0), real(-1.0), real(-1.0), real(1.0)]);
        assert!(x.is_antisymmetric_exhaustive(0.0));
        assert!(tau(&[pv(1, 1.0)]).is_err());
        assert!(SignedTensor::new(1, vec![real(1.0), real(1.0)]).is_err());
    }

    #[test]
    fn inner_examples() {
        let x = tau(&[pv(0, 1.0)]).unwrap();
        assert_eq!(inner_t(&x, &x).unwrap(), real(2.0));
        let y = tau(&[PairVector::new(0, c64(0.0, 1.0))]).unwrap();
        assert_eq!(inner_t(&x, &y).unwrap(), c64(0.0, -2.0));
        assert_eq!(pv(0, 1.0).inner(&PairVector::new(0, c64(0.0, 1.0))), c64(0.0, -2.0));
        assert!(inner_t(&x, &generator(2).unwrap()).is_err());
        for n in 0..=8 {
            let u = generator(n).unwrap();
            assert!((inner_t(&u, &u).unwrap().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diag_examples() {
        let u2 = TruncatedFockVector::unit(3, 2).unwrap();
        let out = diag_operator(&[5.0, 6.0, 7.0, 8.0], &u2).unwrap();
        assert_eq!(out.coeffs()[2], real(7.0));
        let v = TruncatedFockVector::new(vec![real(1.0), real(1.0)]).unwrap();
        assert_eq!(diag_operator(&[1.0, 2.0], &v).unwrap().coeffs(), &[real(1.0), real(2.0)]);
        assert!(diag_operator(&[1.0], &v).is_err());
    }

    #[test]
    fn l_operator_examples() {
        assert_eq!(socks_l_operator(&[3.0], &[pv(0, 1.0)]).unwrap(), vec![pv(0, 3.0)]);
        assert_eq!(socks_l_operator(&[3.0], &[pv(0, 0.0)]).unwrap(), vec![pv(0, 0.0)]);
        assert!(socks_l_operator(&[], &[pv(0, 1.0)]).is_err());
    }

    #[test]
    fn flip_examples() {
        let u2 = TruncatedFockVector::unit(3, 2).unwrap();
        let f0 = FlipAction::single(0);
        assert_eq!(flip(&f0, &u2).coeffs()[2], real(-1.0));
        let u0 = TruncatedFockVector::unit(3, 0).unwrap();
        assert_eq!(flip(&f0, &u0), u0);
        assert_eq!(flip(&FlipAction::default(), &u2), u2);
        let f = FlipAction::new([0, 2]);
        assert_eq!(flip(&f, &flip(&f, &u2)), u2);

        let v = TruncatedFockVector::new(vec![real(0.5), real(-1.0), real(2.0)]).unwrap();
        for n in 0..=2 {
            let direct = flip_tensor(&f0, &v.component_tensor(n).unwrap());
            let via = flip(&f0, &v).component_tensor(n).unwrap();
            assert_eq!(direct, via);
        }
    }

    #[test]
    fn support_examples() {
        assert!(least_support(&TruncatedFockVector::unit(4, 0).unwrap(), 1e-12).is_empty());
        let u3 = TruncatedFockVector::unit(4, 3).unwrap();
        assert_eq!(least_support(&u3, 1e-12), BTreeSet::from([0, 1, 2]));
        for k in 0..4 {
            let moved = flip(&FlipAction::single(k), &u3) != u3;
            assert_eq!(moved, k < 3);
        }
        assert!(least_support(&TruncatedFockVector::zero(4), 1e-12).is_empty());
    }

    #[test]
    fn invariant_operator_examples() {
        let f = FlipAction::single(0);
        assert!(is_invariant_operator(&crate::linalg::real_diagonal(&[1.0, 2.0, 3.0]), &f).unwrap());
        let mut m = CMatrix::zeros(3, 3);
        assert!(is_invariant_operator(&m, &f).unwrap());
        m[(0, 2)] = real(1.0);
        assert!(!is_invariant_operator(&m, &f).unwrap());
    }
}
