use serde::{Deserialize, Serialize};

/// A real polynomial, coefficients in ascending degree. The zero polynomial
/// has no coefficients; otherwise the leading coefficient is nonzero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Polynomial::new(vec![c])
    }

    /// `t`
    pub fn identity() -> Self {
        Polynomial::new(vec![0.0, 1.0])
    }

    /// `∏ (t - r)`
    pub fn from_roots(roots: &[f64]) -> Self {
        roots.iter().fold(Polynomial::constant(1.0), |p, &r| {
            p.mul(&Polynomial::new(vec![-r, 1.0]))
        })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let at = |p: &Polynomial, k: usize| p.coeffs.get(k).copied().unwrap_or(0.0);
        Polynomial::new((0..n).map(|k| at(self, k) + at(other, k)).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Polynomial::new(Vec::new());
        }
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// `self ∘ inner`
    pub fn compose(&self, inner: &Polynomial) -> Polynomial {
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::new(Vec::new()), |acc, &c| {
                acc.mul(inner).add(&Polynomial::constant(c))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic() {
        let p = Polynomial::from_roots(&[1.0, -1.0]);
        assert_eq!(p.coeffs(), &[-1.0, 0.0, 1.0]);
        assert_eq!(p.degree(), Some(2));
        assert!(p.is_monic());
        assert_eq!(p.eval(3.0), 8.0);
        let q = Polynomial::new(vec![1.0, 2.0]);
        assert_eq!(p.compose(&q).eval(0.5), p.eval(q.eval(0.5)));
        assert_eq!(p.mul(&q).eval(2.0), p.eval(2.0) * q.eval(2.0));
        assert_eq!(Polynomial::new(vec![0.0, 0.0]).degree(), None);
    }
}
