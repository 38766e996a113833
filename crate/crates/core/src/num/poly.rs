//! Dense complex polynomials in one variable, ascending coefficient order.

use super::NumError;
use crate::C64;
use num_traits::Zero;

/// Polynomial with complex coefficients, `coeffs[k]` multiplying `t^k`.
///
/// The representation is normalized: the last stored coefficient is nonzero
/// unless the polynomial is identically zero (empty coefficient list).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<C64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Polynomial::new(vec![c])
    }

    /// Monomial `c t^k`.
    pub fn monomial(c: C64, k: usize) -> Self {
        let mut v = vec![C64::zero(); k + 1];
        v[k] = c;
        Polynomial::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is reported as 0 by convention.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_else(C64::zero)
    }

    pub fn leading(&self) -> C64 {
        self.coeffs.last().copied().unwrap_or_else(C64::zero)
    }

    pub fn is_monic(&self) -> bool {
        (self.leading() - C64::new(1.0, 0.0)).norm() < 1e-14
    }

    /// Horner evaluation.
    pub fn eval(&self, t: C64) -> C64 {
        let mut acc = C64::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() <= 1 {
            return Polynomial::zero();
        }
        let d: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| c * k as f64)
            .collect();
        Polynomial::new(d)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut v = vec![C64::zero(); n];
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = self.coeff(k) + other.coeff(k);
        }
        Polynomial::new(v)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut v = vec![C64::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Polynomial::new(v)
    }

    /// Euclidean division, returns `(quotient, remainder)`.
    pub fn div_rem(&self, divisor: &Polynomial) -> Result<(Polynomial, Polynomial), NumError> {
        if divisor.is_zero() {
            return Err(NumError::ZeroPolynomial);
        }
        let dlead = divisor.leading();
        let ddeg = divisor.degree();
        let mut rem = self.coeffs.clone();
        if rem.len() <= ddeg {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut quot = vec![C64::zero(); rem.len() - ddeg];
        for k in (ddeg..rem.len()).rev() {
            let q = rem[k] / dlead;
            quot[k - ddeg] = q;
            for (j, &dc) in divisor.coeffs.iter().enumerate() {
                rem[k - ddeg + j] -= q * dc;
            }
        }
        rem.truncate(ddeg);
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Polynomial {
        let mut p = Polynomial::constant(C64::new(1.0, 0.0));
        for &r in roots {
            p = p.mul(&Polynomial::new(vec![-r, C64::new(1.0, 0.0)]));
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn eval_and_derivative() {
        // f = t^3 - 3t
        let f = Polynomial::new(vec![c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(f.eval(c(1.0, 0.0)), c(-2.0, 0.0));
        assert_eq!(f.eval(c(-1.0, 0.0)), c(2.0, 0.0));
        let df = f.derivative();
        assert_eq!(df.coeffs(), &[c(-3.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]);
    }

    #[test]
    fn div_rem_reconstructs() {
        let a = Polynomial::new(vec![c(1.0, 2.0), c(0.5, 0.0), c(0.0, -1.0), c(2.0, 0.0)]);
        let b = Polynomial::new(vec![c(-1.0, 0.0), c(1.0, 1.0)]);
        let (q, r) = a.div_rem(&b).unwrap();
        let back = q.mul(&b).add(&r);
        for k in 0..4 {
            assert!((back.coeff(k) - a.coeff(k)).norm() < 1e-12);
        }
        assert!(r.degree() < b.degree() || r.is_zero());
    }

    #[test]
    fn normalization_strips_leading_zeros() {
        let p = Polynomial::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), 0);
    }
}
