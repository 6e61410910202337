//! Time evolution, expected values and experiment composition for operators
//! given by eigen-data.

use crate::error::{Error, Result};
use crate::finitary::{diagonalize, EigenSystem, HermitianMatrix, Observable, Polynomial, ValueTable};
use crate::linalg::{
    self, basis_vector, inner, real, span_intersection, CMatrix, CVector, C64,
};
use nalgebra::{DMatrix, Schur};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_1_SQRT_2, TAU};

/// A unit vector.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    pub fn new(v: CVector) -> Result<Self> {
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::validation("state has non-finite components"));
        }
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!("state is not normalized (norm {norm})")));
        }
        Ok(StateVector(v))
    }

    /// `v / ‖v‖` for nonzero `v`.
    pub fn normalized(v: CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::validation("cannot normalize a zero or non-finite vector"));
        }
        StateVector::new(v / real(norm))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }
}

/// A positive semidefinite Hermitian matrix of unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix(HermitianMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        let h = HermitianMatrix::new(m)?;
        let trace = linalg::trace(h.matrix()).re;
        if (trace - 1.0).abs() > 1e-9 {
            return Err(Error::validation(format!("density matrix has trace {trace}")));
        }
        let (values, _) = linalg::hermitian_eigen(h.matrix());
        if let Some(&least) = values.first() {
            if least < -1e-10 {
                return Err(Error::validation(format!(
                    "density matrix has negative eigenvalue {least}"
                )));
            }
        }
        Ok(DensityMatrix(h))
    }

    /// `|ψ⟩⟨ψ|`
    pub fn pure(psi: &StateVector) -> Self {
        let v = psi.vector();
        DensityMatrix(HermitianMatrix::new(v * v.adjoint()).expect("outer product is Hermitian"))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.0.matrix()
    }
}

/// A square matrix with `U†U = I` within `1e-8`.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::validation("unitary matrix must be square"));
        }
        let defect = (m.adjoint() * &m - linalg::identity(m.nrows())).norm();
        if defect > 1e-8 {
            return Err(Error::validation(format!(
                "matrix is not unitary (defect {defect:.3e})"
            )));
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }
}

fn phase(lambda: f64, t: f64) -> C64 {
    C64::from_polar(1.0, -lambda * t)
}

fn require_full(a: &EigenSystem) -> Result<()> {
    if !a.is_full() {
        return Err(Error::validation(format!(
            "operator is defined on a proper subspace ({} of {} eigenpairs)",
            a.count(),
            a.dim()
        )));
    }
    Ok(())
}

fn require_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `Σ e^{-iλt} <ψ, v> v` for `ψ` in the domain of `a`.
pub fn evolve(a: &EigenSystem, psi0: &StateVector, t: f64) -> Result<StateVector> {
    a.check_domain(psi0.vector())?;
    Ok(StateVector(a.map_coefficients(psi0.vector(), |l| phase(l, t))))
}

/// `exp(-i t A)` for an operator defined everywhere.
pub fn propagator(a: &EigenSystem, t: f64) -> Result<UnitaryMatrix> {
    require_full(a)?;
    Ok(UnitaryMatrix(spectral_sum(a, |l| phase(l, t))))
}

fn spectral_sum(a: &EigenSystem, g: impl Fn(f64) -> C64) -> CMatrix {
    let mut m = CMatrix::zeros(a.dim(), a.dim());
    for p in a.pairs() {
        m += &p.vector * p.vector.adjoint() * g(p.value);
    }
    m
}

/// A real function known on the spectrum.
#[derive(Clone, Debug, PartialEq)]
pub enum SpectralFunction {
    Poly(Polynomial),
    Table(ValueTable),
}

impl SpectralFunction {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            SpectralFunction::Poly(p) => Ok(p.eval(x)),
            SpectralFunction::Table(t) => t.eval(x),
        }
    }
}

/// `tr(P D)` for the projector onto an orthonormal family.
fn trace_on(vectors: &[CVector], d: &DensityMatrix) -> f64 {
    vectors
        .iter()
        .map(|v| inner(&(d.matrix() * v), v).re)
        .sum()
}

/// `tr(f(T) D) = Σ_λ f(λ) tr(P_λ D)`.
pub fn expectation(f: &SpectralFunction, t: &EigenSystem, d: &DensityMatrix) -> Result<f64> {
    require_full(t)?;
    require_dim(t.dim(), d.dim())?;
    let mut total = 0.0;
    for space in t.eigenspaces() {
        total += f.eval(space.value)? * trace_on(&space.vectors, d);
    }
    Ok(total)
}

/// `B = Σ_λ (1/n_λ) tr(P_λ D) P_λ`: the state that spreads the weight of each
/// eigenspace uniformly and reproduces every expected value of `f(T)`.
pub fn compress_state(t: &EigenSystem, d: &DensityMatrix) -> Result<DensityMatrix> {
    require_full(t)?;
    require_dim(t.dim(), d.dim())?;
    let mut b = CMatrix::zeros(t.dim(), t.dim());
    for space in t.eigenspaces() {
        let weight = trace_on(&space.vectors, d) / space.multiplicity() as f64;
        b += space.projector(t.dim()) * real(weight);
    }
    DensityMatrix::new(b)
}

/// `C` together with its spectrum as constructed.
#[derive(Clone, Debug, PartialEq)]
pub struct Concatenation {
    pub c: HermitianMatrix,
    /// Eigenvalues of `C`, each in `[0, 2π)`, in Schur order.
    pub angles: Vec<f64>,
}

/// Hermitian `C` with spectrum in `[0, 2π)` and `exp(-iC) = exp(-iA) exp(-iB)`.
pub fn concatenate(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<HermitianMatrix> {
    Ok(concatenate_detailed(a, b)?.c)
}

/// Each eigenvalue `z` of the unitary product becomes `θ = -arg z mod 2π`.
pub fn concatenate_detailed(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<Concatenation> {
    require_dim(a.dim(), b.dim())?;
    let d = a.dim();
    if d == 0 {
        return Ok(Concatenation {
            c: HermitianMatrix::zeros(0),
            angles: Vec::new(),
        });
    }
    let ua = spectral_sum(&diagonalize(a)?, |l| phase(l, 1.0));
    let ub = spectral_sum(&diagonalize(b)?, |l| phase(l, 1.0));
    let r = &ua * &ub;
    let schur = Schur::try_new(r.clone(), 1e-15, 10_000).ok_or_else(|| Error::Tolerance {
        context: "unitary Schur decomposition did not converge".into(),
        value: f64::INFINITY,
        bound: 0.0,
    })?;
    let (q, tri) = schur.unpack();
    let thetas: Vec<f64> = (0..d)
        .map(|k| {
            let theta = (-tri[(k, k)].arg()).rem_euclid(TAU);
            // rem_euclid may round a tiny negative angle up to 2π.
            if theta > TAU - 1e-10 {
                0.0
            } else {
                theta
            }
        })
        .collect();
    let c = &q * linalg::real_diagonal(&thetas) * q.adjoint();
    let rebuilt = &q
        * CMatrix::from_diagonal(&CVector::from_iterator(d, thetas.iter().map(|&t| phase(t, 1.0))))
        * q.adjoint();
    let residual = (rebuilt - &r).norm();
    if residual > 1e-8 {
        return Err(Error::Tolerance {
            context: "unitary logarithm".into(),
            value: residual,
            bound: 1e-8,
        });
    }
    Ok(Concatenation {
        c: HermitianMatrix::new(linalg::hermitize(&c))?,
        angles: thetas,
    })
}

/// `<Sw, Sw> - <w, Sw>²`
pub fn variance<O: Observable + ?Sized>(s: &O, w: &StateVector) -> Result<f64> {
    require_dim(s.dim(), w.dim())?;
    let sw = s.act(w.vector())?;
    let mean = inner(w.vector(), &sw).re;
    Ok(sw.norm_squared() - mean * mean)
}

/// Orthonormal basis of `span b1 ∩ span b2`.
pub fn subspace_intersection(b1: &[CVector], b2: &[CVector]) -> Result<Vec<CVector>> {
    let Some(dim) = b1.iter().chain(b2).map(|v| v.len()).next() else {
        return Ok(Vec::new());
    };
    for v in b1.iter().chain(b2) {
        require_dim(dim, v.len())?;
    }
    Ok(span_intersection(dim, b1, b2))
}

/// Two operators whose domains meet only in `span{e_0}` yet give `e_0` the same
/// variance.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplementaryPair {
    pub s: EigenSystem,
    pub t: EigenSystem,
    /// Orthonormal basis of `dom S ∩ dom T`.
    pub intersection: Vec<CVector>,
}

/// `S` has eigenvectors `(e_0 ± e_1)/√2, e_2, ..., e_{k-1}` with eigenvalues
/// `alphas`; `T` repeats the construction with `e_1, ..., e_{d-1}` replaced by
/// a seeded random orthonormal basis `g_1, ..., g_{d-1}` of `e_0^⊥`.
pub fn complementary_pair(d: usize, alphas: &[f64], seed: u64) -> Result<ComplementaryPair> {
    let k = alphas.len();
    if k < 2 {
        return Err(Error::validation("at least two eigenvalues are required"));
    }
    if d < 2 * k + 1 {
        return Err(Error::validation(format!(
            "dimension {d} is too small for {k} eigenvalues (need at least {})",
            2 * k + 1
        )));
    }
    if alphas.iter().any(|a| !a.is_finite()) {
        return Err(Error::validation("eigenvalues must be finite"));
    }
    let standard: Vec<CVector> = (0..d).map(|j| basis_vector(d, j)).collect();
    let s = anchored_system(d, alphas, &standard)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..16 {
        let rotated = random_complement_basis(d, &mut rng);
        let t = anchored_system(d, alphas, &rotated)?;
        let intersection = span_intersection(d, &s.vectors(), &t.vectors());
        if intersection.len() == 1 {
            return Ok(ComplementaryPair { s, t, intersection });
        }
    }
    Err(Error::Tolerance {
        context: "no rotation with one-dimensional domain intersection".into(),
        value: 16.0,
        bound: 0.0,
    })
}

/// Eigenpairs `((b_0 + b_1)/√2, α_0), ((b_0 - b_1)/√2, α_1), (b_j, α_j)`.
fn anchored_system(d: usize, alphas: &[f64], basis: &[CVector]) -> Result<EigenSystem> {
    let h = real(FRAC_1_SQRT_2);
    let mut pairs = vec![
        (alphas[0], (&basis[0] + &basis[1]) * h),
        (alphas[1], (&basis[0] - &basis[1]) * h),
    ];
    for (j, &alpha) in alphas.iter().enumerate().skip(2) {
        pairs.push((alpha, basis[j].clone()));
    }
    EigenSystem::from_real_pairs(pairs, d)
}

/// `e_0` followed by a random orthonormal basis of its complement.
fn random_complement_basis(d: usize, rng: &mut ChaCha8Rng) -> Vec<CVector> {
    let m = d - 1;
    let g = DMatrix::<f64>::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
    let q = g.qr().q();
    let mut out = vec![basis_vector(d, 0)];
    for j in 0..m {
        let mut v = CVector::zeros(d);
        for i in 0..m {
            v[i + 1] = real(q[(i, j)]);
        }
        out.push(v);
    }
    out
}

/// `T = (ħ/2m) P² + (f/2ħ) Q²` on `n` interior points of `[-L, L]` with
/// Dirichlet boundary, `P² = -d²/dx²` by central differences.
pub fn oscillator_hamiltonian(n: usize, l: f64, m: f64, f: f64, hbar: f64) -> Result<HermitianMatrix> {
    if n < 16 {
        return Err(Error::validation(format!("grid size {n} is below 16")));
    }
    for (name, value) in [("L", l), ("mass", m), ("stiffness", f), ("hbar", hbar)] {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::validation(format!("{name} must be positive and finite")));
        }
    }
    let h = 2.0 * l / (n as f64 + 1.0);
    let kinetic = hbar / (2.0 * m) / (h * h);
    let potential = f / (2.0 * hbar);
    let mut t = CMatrix::zeros(n, n);
    for j in 0..n {
        let x = -l + (j as f64 + 1.0) * h;
        t[(j, j)] = real(2.0 * kinetic + potential * x * x);
        if j + 1 < n {
            t[(j, j + 1)] = real(-kinetic);
            t[(j + 1, j)] = real(-kinetic);
        }
    }
    HermitianMatrix::new(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finitary::is_intrinsically_effective;
    use crate::linalg::{c64, from_reals};
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sigma_x() -> HermitianMatrix {
        HermitianMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    fn sigma_z() -> HermitianMatrix {
        HermitianMatrix::diagonal(&[1.0, -1.0])
    }

    fn state(xs: &[f64]) -> StateVector {
        StateVector::normalized(from_reals(xs)).unwrap()
    }

    #[test]
    fn evolve_examples() {
        let a = diagonalize(&sigma_x()).unwrap();
        let psi = state(&[1.0, 0.0]);
        assert!((evolve(&a, &psi, 0.0).unwrap().vector() - psi.vector()).norm() < 1e-12);
        let out = evolve(&a, &psi, FRAC_PI_2).unwrap();
        let expected = CVector::from_vec(vec![c64(0.0, 0.0), c64(0.0, -1.0)]);
        assert!((out.vector() - expected).norm() < 1e-12);

        let diag = EigenSystem::diagonal(&[0.5, 2.0]);
        let out = evolve(&diag, &state(&[0.0, 1.0]), 3.0).unwrap();
        assert!((out.vector()[1] - C64::from_polar(1.0, -6.0)).norm() < 1e-12);

        let partial = EigenSystem::from_real_pairs(vec![(1.0, basis_vector(2, 0))], 2).unwrap();
        assert!(matches!(
            evolve(&partial, &state(&[0.0, 1.0]), 1.0),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn propagator_examples() {
        let a = diagonalize(&sigma_x()).unwrap();
        let u0 = propagator(&a, 0.0).unwrap();
        assert!((u0.matrix() - linalg::identity(2)).norm() < 1e-12);
        let upi = propagator(&a, PI).unwrap();
        assert!((upi.matrix() + linalg::identity(2)).norm() < 1e-12);
        let one = propagator(&EigenSystem::diagonal(&[PI]), 1.0).unwrap();
        assert!((one.matrix()[(0, 0)] + real(1.0)).norm() < 1e-12);
        let partial = EigenSystem::from_real_pairs(vec![(1.0, basis_vector(2, 0))], 2).unwrap();
        assert!(propagator(&partial, 1.0).is_err());
    }

    #[test]
    fn expectation_examples() {
        let t = EigenSystem::diagonal(&[1.0, 2.0]);
        let d = DensityMatrix::new(linalg::real_diagonal(&[0.25, 0.75])).unwrap();
        let square = SpectralFunction::Poly(Polynomial::new(vec![0.0, 0.0, 1.0]));
        assert!((expectation(&square, &t, &d).unwrap() - 3.25).abs() < 1e-12);
        let c = SpectralFunction::Poly(Polynomial::constant(7.0));
        assert!((expectation(&c, &t, &d).unwrap() - 7.0).abs() < 1e-12);
        let pure = DensityMatrix::pure(&state(&[0.0, 1.0]));
        let id = SpectralFunction::Poly(Polynomial::identity());
        assert!((expectation(&id, &t, &pure).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn compress_examples() {
        let t = EigenSystem::diagonal(&[1.0, 1.0]);
        let d = DensityMatrix::pure(&state(&[1.0, 0.0]));
        let b = compress_state(&t, &d).unwrap();
        assert!((b.matrix() - linalg::real_diagonal(&[0.5, 0.5])).norm() < 1e-12);
        let t = EigenSystem::diagonal(&[1.0, 2.0]);
        let d = DensityMatrix::new(linalg::real_diagonal(&[0.25, 0.75])).unwrap();
        assert!((compress_state(&t, &d).unwrap().matrix() - d.matrix()).norm() < 1e-12);
    }

    #[test]
    fn concatenate_examples() {
        let zero = HermitianMatrix::zeros(2);
        assert!(concatenate(&zero, &zero).unwrap().matrix().norm() < 1e-12);
        let a = HermitianMatrix::diagonal(&[1.5 * PI]);
        let c = concatenate(&a, &a).unwrap();
        assert!((c.matrix()[(0, 0)].re - PI).abs() < 1e-9);
        let c = concatenate(&sigma_x().scaled(FRAC_PI_2), &sigma_z().scaled(FRAC_PI_2)).unwrap();
        let ec = spectral_sum(&diagonalize(&c).unwrap(), |l| phase(l, 1.0));
        let ea = spectral_sum(&diagonalize(&sigma_x().scaled(FRAC_PI_2)).unwrap(), |l| phase(l, 1.0));
        let eb = spectral_sum(&diagonalize(&sigma_z().scaled(FRAC_PI_2)).unwrap(), |l| phase(l, 1.0));
        assert!((ec - ea * eb).norm() < 1e-8);
        assert!(diagonalize(&c)
            .unwrap()
            .values()
            .iter()
            .all(|&v| (0.0..TAU).contains(&v)));
        assert_eq!(
            concatenate(&zero, &HermitianMatrix::zeros(3)),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn variance_examples() {
        let s = HermitianMatrix::diagonal(&[0.0, 1.0]);
        assert!(variance(&s, &state(&[1.0, 0.0])).unwrap().abs() < 1e-15);
        assert!((variance(&s, &state(&[1.0, 1.0])).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn complementary_pair_examples() {
        let alphas = [2.0_f64.sqrt(), 0.0, 3.0];
        let pair = complementary_pair(7, &alphas, 42).unwrap();
        assert_eq!(pair.intersection.len(), 1);
        assert!(inner(&pair.intersection[0], &basis_vector(7, 0)).norm() > 1.0 - 1e-9);
        let e0 = StateVector::new(basis_vector(7, 0)).unwrap();
        let vs = variance(&pair.s, &e0).unwrap();
        let vt = variance(&pair.t, &e0).unwrap();
        assert!((vs - 0.5).abs() < 1e-12 && (vt - 0.5).abs() < 1e-12);
        assert!((vs * vt - 0.25).abs() < 1e-12);
        assert!(complementary_pair(6, &alphas, 42).is_err());
        assert!(complementary_pair(7, &[1.0], 42).is_err());
    }

    #[test]
    fn subspace_intersection_examples() {
        let e = |k| basis_vector(3, k);
        assert_eq!(subspace_intersection(&[e(0), e(1)], &[e(0), e(1)]).unwrap().len(), 2);
        assert!(subspace_intersection(&[e(0)], &[e(1)]).unwrap().is_empty());
    }

    #[test]
    fn oscillator_is_equally_spaced() {
        let t = oscillator_hamiltonian(400, 10.0, 1.0, 1.0, 1.0).unwrap();
        let sys = diagonalize(&t).unwrap();
        assert!(is_intrinsically_effective(&sys));
        let v = sys.values();
        let gaps: Vec<f64> = (0..5).map(|k| v[k + 1] - v[k]).collect();
        for w in gaps.windows(2) {
            assert!((w[1] / w[0] - 1.0).abs() < 0.01);
        }
        assert!(oscillator_hamiltonian(8, 10.0, 1.0, 1.0, 1.0).is_err());
        assert!(oscillator_hamiltonian(16, -1.0, 1.0, 1.0, 1.0).is_err());
    }
}
