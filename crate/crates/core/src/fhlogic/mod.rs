//! Operators and subspaces of `ℓ2(A)` for an unbounded set of atoms `A`.
//!
//! Every object mentions finitely many atoms. Operators are a finite matrix on
//! a finite atom set plus a scalar on all remaining atoms; subspaces are a
//! finite-dimensional part plus, optionally, all of `ℓ2(A ∖ E)` for a finite
//! set `E`. Computations run in `ℓ2(U)` for the finite set `U` of atoms the
//! operands mention, which is exact because everything is constant off `U`.

mod operator;
mod subspace;

pub use operator::{
    decompose_equivariant, fh_apply, represent_functional, zero_sum_compatible, FHOperator,
    FunctionalRepresentation,
};
pub use subspace::{
    alpha_value, modularity_check, orthogonal, refute_density, subspace_join, subspace_meet,
    DensityRefutation, SymbolicSubspace, SymbolicTrace,
};

use crate::error::{Error, Result};
use crate::linalg::C64;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

/// An atom, written `a<n>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(pub u32);

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

impl FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.strip_prefix('a')
            .and_then(|n| n.parse().ok())
            .map(Atom)
            .ok_or_else(|| Error::validation(format!("invalid atom name {s:?} (expected a<n>)")))
    }
}

/// `a_1, ..., a_m`
pub fn window(m: u32) -> Vec<Atom> {
    (1..=m).map(Atom).collect()
}

/// A vector of `ℓ2(A)` with finite support; zero coordinates are not stored.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FiniteSupportVector {
    entries: BTreeMap<Atom, C64>,
}

impl FiniteSupportVector {
    pub fn new(entries: impl IntoIterator<Item = (Atom, C64)>) -> Self {
        let mut v = FiniteSupportVector::default();
        for (a, z) in entries {
            v.add_at(a, z);
        }
        v
    }

    /// `e_a`
    pub fn unit(a: Atom) -> Self {
        FiniteSupportVector::new([(a, C64::new(1.0, 0.0))])
    }

    /// `e_a - e_b`
    pub fn difference(a: Atom, b: Atom) -> Self {
        FiniteSupportVector::new([(a, C64::new(1.0, 0.0)), (b, C64::new(-1.0, 0.0))])
    }

    pub fn get(&self, a: Atom) -> C64 {
        self.entries.get(&a).copied().unwrap_or_default()
    }

    pub fn add_at(&mut self, a: Atom, z: C64) {
        let slot = self.entries.entry(a).or_default();
        *slot += z;
        if *slot == C64::default() {
            self.entries.remove(&a);
        }
    }

    pub fn entries(&self) -> &BTreeMap<Atom, C64> {
        &self.entries
    }

    pub fn support(&self) -> impl Iterator<Item = Atom> + '_ {
        self.entries.keys().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Σ_a x(a)`
    pub fn coordinate_sum(&self) -> C64 {
        self.entries.values().sum()
    }

    pub fn scaled(&self, c: C64) -> Self {
        FiniteSupportVector::new(self.entries.iter().map(|(&a, &z)| (a, z * c)))
    }

    pub fn norm(&self) -> f64 {
        self.entries.values().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn approx_eq(&self, other: &FiniteSupportVector, tol: f64) -> bool {
        self.entries
            .keys()
            .chain(other.entries.keys())
            .all(|&a| (self.get(a) - other.get(a)).norm() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atoms_round_trip_through_names() {
        assert_eq!("a12".parse::<Atom>().unwrap(), Atom(12));
        assert_eq!(Atom(3).to_string(), "a3");
        assert!("b1".parse::<Atom>().is_err());
        assert!("a".parse::<Atom>().is_err());
    }

    #[test]
    fn zero_entries_are_pruned() {
        let mut v = FiniteSupportVector::unit(Atom(1));
        v.add_at(Atom(1), C64::new(-1.0, 0.0));
        assert!(v.is_zero());
        assert_eq!(FiniteSupportVector::difference(Atom(1), Atom(2)).coordinate_sum(), C64::default());
    }
}
