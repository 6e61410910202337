//! Seeded generators for the property suites.

use crate::fhlogic::{Atom, FHOperator, FiniteSupportVector, SymbolicSubspace};
use crate::linalg::{c64, real, CMatrix, CVector, C64};
use crate::Result;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn complex(rng: &mut ChaCha8Rng) -> C64 {
    c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// `(M + M†) / 2` for `M` with entries uniform in the unit square, times `scale`.
pub fn hermitian(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> CMatrix {
    let m = CMatrix::from_fn(d, d, |_, _| complex(rng));
    (&m + m.adjoint()) * real(scale / 2.0)
}

/// Haar-like unitary from the QR factor of a complex Gaussian-ish matrix.
pub fn unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| complex(rng)).qr().q()
}

/// `U diag(values) U†` for a random unitary `U`.
pub fn hermitian_with_spectrum(rng: &mut ChaCha8Rng, values: &[f64]) -> CMatrix {
    let u = unitary(rng, values.len());
    let d = CMatrix::from_diagonal(&CVector::from_iterator(values.len(), values.iter().map(|&v| real(v))));
    &u * d * u.adjoint()
}

pub fn unit_vector(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    let v = CVector::from_fn(d, |_, _| complex(rng));
    let n = v.norm();
    v / real(n)
}

/// `G G† / tr(G G†)`: full rank with probability one.
pub fn density(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex(rng));
    let m = &g * g.adjoint();
    let tr: C64 = m.diagonal().iter().sum();
    m / tr
}

pub fn real_coeffs(rng: &mut ChaCha8Rng, degree: usize) -> Vec<f64> {
    (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// A quarter-integer in `[-2, 2]`; nonzero when requested. Exact in binary.
pub fn dyadic(rng: &mut ChaCha8Rng, nonzero: bool) -> f64 {
    loop {
        let k: i32 = rng.random_range(-8..=8);
        if !nonzero || k != 0 {
            return f64::from(k) / 4.0;
        }
    }
}

/// `k` distinct atoms drawn from `window`, in random order.
pub fn atoms(rng: &mut ChaCha8Rng, window: &[Atom], k: usize) -> Vec<Atom> {
    let mut pool = window.to_vec();
    let mut out = Vec::with_capacity(k);
    for _ in 0..k.min(pool.len()) {
        out.push(pool.swap_remove(rng.random_range(0..pool.len())));
    }
    out
}

/// Operator with dyadic entries, nonzero off the diagonal, on `support`.
pub fn fh_operator(rng: &mut ChaCha8Rng, support: Vec<Atom>) -> Result<FHOperator> {
    let s = support.len();
    let mut m = CMatrix::zeros(s, s);
    for i in 0..s {
        for j in 0..s {
            m[(i, j)] = c64(dyadic(rng, i != j), dyadic(rng, false));
        }
    }
    FHOperator::new(support, m, c64(dyadic(rng, false), dyadic(rng, false)))
}

/// Vector with random complex entries on the given atoms.
pub fn sparse_vector(rng: &mut ChaCha8Rng, support: &[Atom]) -> FiniteSupportVector {
    FiniteSupportVector::new(support.iter().map(|&a| (a, complex(rng))))
}

/// Random member of the finite/cofinite class mentioning only `window`.
pub fn subspace(rng: &mut ChaCha8Rng, window: &[Atom]) -> Result<SymbolicSubspace> {
    let cofinite = rng.random_bool(0.5);
    let count = rng.random_range(0..=3);
    let mut vectors = Vec::with_capacity(count);
    for _ in 0..count {
        let k = rng.random_range(1..=window.len().min(3));
        let support = atoms(rng, window, k);
        vectors.push(sparse_vector(rng, &support));
    }
    let excluding = if cofinite {
        let k = rng.random_range(0..=window.len());
        Some(atoms(rng, window, k).into_iter().collect())
    } else {
        None
    };
    SymbolicSubspace::new(vectors, excluding)
}
