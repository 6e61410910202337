use super::{Atom, FHOperator, FiniteSupportVector};
use crate::error::{Error, Result};
use crate::linalg::{self, canonical_basis, inner, orthonormal_basis, span_intersection, CVector, C64};
use std::collections::BTreeSet;

/// Entries below this are rounding noise in canonical bases.
const PRUNE: f64 = 1e-13;
/// Tolerance for subspace comparisons.
const SAME: f64 = 1e-9;

/// `W ⊕ ℓ2(A ∖ E)` with `W` finite-dimensional, or just `W`.
///
/// Canonical form: `W ⊆ ℓ2(E)`, no `e_a` with `a ∈ E` lies in `W`, and the
/// basis of `W` is the deterministic one of [`canonical_basis`] in ascending
/// atom order.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicSubspace {
    finite: Vec<FiniteSupportVector>,
    cofinite_excluding: Option<BTreeSet<Atom>>,
}

impl SymbolicSubspace {
    /// The closed subspace `span(finite) + ℓ2(A ∖ E)`, brought to canonical
    /// form.
    pub fn new(finite: Vec<FiniteSupportVector>, cofinite_excluding: Option<BTreeSet<Atom>>) -> Result<Self> {
        for v in &finite {
            if v.entries().values().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::validation("subspace vector has non-finite entries"));
            }
        }
        let raw = SymbolicSubspace {
            finite,
            cofinite_excluding,
        };
        let u: Vec<Atom> = raw.mentioned().into_iter().collect();
        let (spanning, flag) = raw.local(&u);
        Ok(SymbolicSubspace::from_local(&u, &spanning, flag))
    }

    pub fn zero() -> Self {
        SymbolicSubspace {
            finite: Vec::new(),
            cofinite_excluding: None,
        }
    }

    pub fn span(vectors: Vec<FiniteSupportVector>) -> Result<Self> {
        SymbolicSubspace::new(vectors, None)
    }

    /// `ℓ2(A ∖ E)`
    pub fn cofinite(excluding: impl IntoIterator<Item = Atom>) -> Self {
        SymbolicSubspace {
            finite: Vec::new(),
            cofinite_excluding: Some(excluding.into_iter().collect()),
        }
    }

    pub fn finite_part(&self) -> &[FiniteSupportVector] {
        &self.finite
    }

    pub fn cofinite_excluding(&self) -> Option<&BTreeSet<Atom>> {
        self.cofinite_excluding.as_ref()
    }

    pub fn is_cofinite(&self) -> bool {
        self.cofinite_excluding.is_some()
    }

    pub fn finite_dim(&self) -> usize {
        self.finite.len()
    }

    /// Atoms named by the finite part or the exclusion set.
    pub fn mentioned(&self) -> BTreeSet<Atom> {
        let mut atoms: BTreeSet<Atom> = self.finite.iter().flat_map(|v| v.support()).collect();
        if let Some(e) = &self.cofinite_excluding {
            atoms.extend(e.iter().copied());
        }
        atoms
    }

    /// Spanning set of the trace on `ℓ2(u)` (which must contain every
    /// mentioned atom), and whether the subspace contains `ℓ2(A ∖ u)`.
    fn local(&self, u: &[Atom]) -> (Vec<CVector>, bool) {
        let dense = |v: &FiniteSupportVector| CVector::from_iterator(u.len(), u.iter().map(|&a| v.get(a)));
        let mut spanning: Vec<CVector> = self.finite.iter().map(dense).collect();
        if let Some(e) = &self.cofinite_excluding {
            for (k, a) in u.iter().enumerate() {
                if !e.contains(a) {
                    spanning.push(linalg::basis_vector(u.len(), k));
                }
            }
        }
        (spanning, self.cofinite_excluding.is_some())
    }

    fn local_basis(&self, u: &[Atom]) -> (Vec<CVector>, bool) {
        let (spanning, flag) = self.local(u);
        (orthonormal_basis(u.len(), &spanning), flag)
    }

    fn from_local(u: &[Atom], spanning: &[CVector], cofinite: bool) -> Self {
        let dim = u.len();
        let onb = orthonormal_basis(dim, spanning);
        let sparse = |v: &CVector| {
            FiniteSupportVector::new(
                u.iter()
                    .zip(v.iter())
                    .filter(|(_, z)| z.norm() > PRUNE)
                    .map(|(&a, &z)| (a, z)),
            )
        };
        if !cofinite {
            return SymbolicSubspace {
                finite: canonical_basis(dim, &onb).iter().map(sparse).collect(),
                cofinite_excluding: None,
            };
        }
        let weight = |k: usize| onb.iter().map(|q| q[k].norm_sqr()).sum::<f64>();
        let excluded: Vec<usize> = (0..dim).filter(|&k| weight(k) < 1.0 - SAME).collect();
        let restricted: Vec<CVector> = onb
            .iter()
            .map(|q| {
                let mut r = CVector::zeros(dim);
                for &k in &excluded {
                    r[k] = q[k];
                }
                r
            })
            .collect();
        let w = orthonormal_basis(dim, &restricted);
        SymbolicSubspace {
            finite: canonical_basis(dim, &w).iter().map(sparse).collect(),
            cofinite_excluding: Some(excluded.iter().map(|&k| u[k]).collect()),
        }
    }

    /// Equal exclusion sets and equal finite parts (projectors within `1e-9`).
    pub fn same_as(&self, other: &SymbolicSubspace) -> bool {
        if self.cofinite_excluding != other.cofinite_excluding || self.finite_dim() != other.finite_dim() {
            return false;
        }
        let u: Vec<Atom> = self.mentioned().union(&other.mentioned()).copied().collect();
        let dense = |s: &SymbolicSubspace| {
            let vs: Vec<CVector> = s
                .finite
                .iter()
                .map(|v| CVector::from_iterator(u.len(), u.iter().map(|&a| v.get(a))))
                .collect();
            linalg::projector(u.len(), &vs)
        };
        (dense(self) - dense(other)).norm() <= SAME
    }
}

fn union_atoms(subspaces: &[&SymbolicSubspace]) -> Vec<Atom> {
    subspaces
        .iter()
        .flat_map(|s| s.mentioned())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Intersection: computed on `ℓ2(U)`; the part outside `U` survives only if
/// both operands are cofinite.
pub fn subspace_meet(s1: &SymbolicSubspace, s2: &SymbolicSubspace) -> SymbolicSubspace {
    let u = union_atoms(&[s1, s2]);
    let (a, f1) = s1.local_basis(&u);
    let (b, f2) = s2.local_basis(&u);
    SymbolicSubspace::from_local(&u, &span_intersection(u.len(), &a, &b), f1 && f2)
}

/// Closed sum: finite-dimensional plus cofinite sums are closed.
pub fn subspace_join(s1: &SymbolicSubspace, s2: &SymbolicSubspace) -> SymbolicSubspace {
    let u = union_atoms(&[s1, s2]);
    let (mut a, f1) = s1.local(&u);
    let (b, f2) = s2.local(&u);
    a.extend(b);
    SymbolicSubspace::from_local(&u, &a, f1 || f2)
}

/// Two cofinite subspaces always share atoms outside `U`.
pub fn orthogonal(s1: &SymbolicSubspace, s2: &SymbolicSubspace) -> bool {
    if s1.is_cofinite() && s2.is_cofinite() {
        return false;
    }
    let u = union_atoms(&[s1, s2]);
    let (a, _) = s1.local_basis(&u);
    let (b, _) = s2.local_basis(&u);
    a.iter().all(|x| b.iter().all(|y| inner(x, y).norm() <= SAME))
}

/// `0` for finite-dimensional subspaces, `1` otherwise.
pub fn alpha_value(s: &SymbolicSubspace) -> u8 {
    u8::from(s.is_cofinite())
}

/// `x ∧ (y ∨ z) = x ∧ ((y ∧ (x ∨ z)) ∨ z)`
pub fn modularity_check(x: &SymbolicSubspace, y: &SymbolicSubspace, z: &SymbolicSubspace) -> bool {
    let lhs = subspace_meet(x, &subspace_join(y, z));
    let rhs = subspace_meet(x, &subspace_join(&subspace_meet(y, &subspace_join(x, z)), z));
    lhs.same_as(&rhs)
}

/// Trace of a projection times an operator: a number, or the divergent value
/// produced by a nonzero scalar on an infinite-dimensional range.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SymbolicTrace {
    Finite(C64),
    Infinite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityRefutation {
    /// `P_E` for `E = A ∖ supp(D)`.
    pub witness: SymbolicSubspace,
    pub trace: SymbolicTrace,
    pub alpha: u8,
}

impl DensityRefutation {
    /// `tr(P_E D) ≠ α(P_E)`
    pub fn refutes(&self) -> bool {
        match self.trace {
            SymbolicTrace::Infinite => true,
            SymbolicTrace::Finite(t) => t != C64::new(f64::from(self.alpha), 0.0),
        }
    }
}

/// Shows that `D` does not represent `α`: on `P_E = ℓ2(A ∖ supp D)` the
/// operator is the scalar `ρ`, so `tr(P_E D)` is infinite or zero while
/// `α(P_E) = 1`.
pub fn refute_density(d: &FHOperator) -> Result<DensityRefutation> {
    if !d.is_symmetric() {
        return Err(Error::validation("density candidate is not symmetric"));
    }
    let d = d.canonicalize(0.0);
    let witness = SymbolicSubspace::cofinite(d.support().iter().copied());
    let trace = if d.tail() == C64::default() {
        SymbolicTrace::Finite(C64::default())
    } else {
        SymbolicTrace::Infinite
    };
    Ok(DensityRefutation {
        alpha: alpha_value(&witness),
        witness,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::real;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn e(n: u32) -> FiniteSupportVector {
        FiniteSupportVector::unit(Atom(n))
    }

    fn excl(atoms: &[u32]) -> SymbolicSubspace {
        SymbolicSubspace::cofinite(atoms.iter().map(|&n| Atom(n)))
    }

    #[test]
    fn meet_examples() {
        let s = SymbolicSubspace::span(vec![e(1), e(2)]).unwrap();
        assert!(subspace_meet(&s, &s).same_as(&s));
        assert!(subspace_meet(&excl(&[1]), &excl(&[2])).same_as(&excl(&[1, 2])));
        let one = SymbolicSubspace::span(vec![e(1)]).unwrap();
        assert!(subspace_meet(&one, &excl(&[1])).same_as(&SymbolicSubspace::zero()));
    }

    #[test]
    fn join_examples() {
        let c = excl(&[1, 2]);
        assert!(subspace_join(&c, &c).same_as(&c));
        let one = SymbolicSubspace::span(vec![e(1)]).unwrap();
        assert!(subspace_join(&one, &c).same_as(&excl(&[2])));
        let two = SymbolicSubspace::span(vec![e(2)]).unwrap();
        assert!(subspace_join(&one, &two).same_as(&SymbolicSubspace::span(vec![e(1), e(2)]).unwrap()));
    }

    #[test]
    fn canonical_form_absorbs_units() {
        let mixed = FiniteSupportVector::new([(Atom(1), real(FRAC_1_SQRT_2)), (Atom(3), real(FRAC_1_SQRT_2))]);
        let s = SymbolicSubspace::new(vec![mixed, e(2)], Some([Atom(1), Atom(2)].into())).unwrap();
        assert_eq!(s.cofinite_excluding(), Some(&BTreeSet::new()));
        assert_eq!(s.finite_dim(), 0);
        let d = FiniteSupportVector::difference(Atom(1), Atom(2));
        let s = SymbolicSubspace::new(vec![d.clone()], Some([Atom(1), Atom(2)].into())).unwrap();
        assert_eq!(s.cofinite_excluding(), Some(&BTreeSet::from([Atom(1), Atom(2)])));
        assert_eq!(s.finite_dim(), 1);
        let t = SymbolicSubspace::new(vec![e(1).scaled(real(2.0))], None).unwrap();
        assert_eq!(t.finite_part(), &[e(1)]);
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_value(&SymbolicSubspace::zero()), 0);
        assert_eq!(alpha_value(&SymbolicSubspace::span(vec![e(1), e(2)]).unwrap()), 0);
        assert_eq!(alpha_value(&excl(&[1])), 1);
    }

    #[test]
    fn refutation_examples() {
        let r = refute_density(&FHOperator::scalar(real(1.0))).unwrap();
        assert!(r.witness.same_as(&excl(&[])));
        assert_eq!(r.trace, SymbolicTrace::Infinite);
        assert!(r.refutes());
        let d = FHOperator::new(vec![Atom(1), Atom(2)], crate::linalg::real_diagonal(&[0.25, 0.75]), real(0.0))
            .unwrap();
        let r = refute_density(&d).unwrap();
        assert_eq!(r.trace, SymbolicTrace::Finite(C64::default()));
        assert_eq!(r.alpha, 1);
        assert!(r.refutes());
        assert!(r.witness.same_as(&excl(&[1, 2])));
    }

    #[test]
    fn modularity_examples() {
        let x = excl(&[1]);
        assert!(modularity_check(&x, &x, &x));
        let y = SymbolicSubspace::span(vec![e(1), e(2)]).unwrap();
        let z = SymbolicSubspace::span(vec![FiniteSupportVector::difference(Atom(1), Atom(3))]).unwrap();
        assert!(modularity_check(&y, &z, &x));
        assert!(orthogonal(&SymbolicSubspace::span(vec![e(1)]).unwrap(), &excl(&[1])));
        assert!(!orthogonal(&excl(&[1]), &excl(&[2])));
    }
}
