//! Cocycle model of the fiber at `z = 0` (genus 0) and the product of
//! cocycles, the independent route to the tangent multiplication.
//!
//! A class is represented over the two-chart cover (affine plane, disk at
//! infinity) by `(alpha1, alpha2, s)` with `alpha1 - alpha2 = omega * s` on
//! the overlap. Classes reduce to their values at the zeros of `omega`;
//! coboundaries `(omega g1, omega g2, g1 - g2)` die there, which is what the
//! evaluation map quotients out.

use super::VerifyError;
use crate::engine::FiberAlgebra;
use crate::model::{AbelianIntegral, CurveData};
use crate::num::{ExpansionPoint, LaurentSeries, Polynomial};
use crate::C64;

/// Genus-0 cocycle data. All disk-side data are Laurent series in `v = 1/t`;
/// densities are taken with respect to `dt`.
#[derive(Debug, Clone)]
pub struct CechCocycle {
    /// Density of the 1-form on the affine chart (polynomial in `t`).
    pub alpha1: Polynomial,
    /// Density of the disk-side form, as a series in `v`. A pole of order at
    /// most `n` at infinity means `v`-orders at least `-(n-2)`.
    pub alpha2: LaurentSeries,
    /// Overlap function, a Laurent polynomial in `t` stored in `v`-orders.
    pub s: LaurentSeries,
}

fn poly_to_v(p: &Polynomial, trunc: i32) -> LaurentSeries {
    let inf = ExpansionPoint::Infinity;
    let mut out = LaurentSeries::zero(inf, -(p.degree() as i32), trunc);
    for (i, &c) in p.coeffs().iter().enumerate() {
        out = out
            .add(&LaurentSeries::monomial(inf, c, -(i as i32), trunc))
            .unwrap();
    }
    out
}

impl CechCocycle {
    /// Check `alpha1 - alpha2 = omega s` on the certified window.
    pub fn validate(&self, m: &AbelianIntegral) -> Result<f64, VerifyError> {
        let CurveData::Genus0 { f } = &m.data else {
            panic!("cocycle model is genus-0 only")
        };
        let trunc = self.s.truncation_order() + self.alpha2.truncation_order();
        let omega_v = poly_to_v(&f.derivative(), trunc);
        let lhs = poly_to_v(&self.alpha1, trunc).sub(&self.alpha2)?;
        let rhs = omega_v.mul(&self.s)?;
        let diff = lhs.sub(&rhs)?;
        let mut defect = 0.0f64;
        for k in diff.lowest_order()..=diff.truncation_order() {
            defect = defect.max(diff.coeff(k).norm());
        }
        let scale = (0..=self.alpha1.degree())
            .map(|k| self.alpha1.coeff(k).norm())
            .fold(1.0, f64::max);
        if defect > 1e-8 * scale {
            return Err(VerifyError::InvalidCocycle(defect));
        }
        Ok(defect)
    }

    /// Class values at the zeros of `omega` (the idempotent frame).
    pub fn reduce(&self, fa: &FiberAlgebra) -> Vec<C64> {
        fa.critical
            .points
            .iter()
            .map(|&q| self.alpha1.eval(q))
            .collect()
    }

    /// A cocycle with prescribed class values `target(q_s) = p(q_s)` dressed
    /// by coboundary data, exercising the representative-independence of the
    /// reduction. `g1` is polynomial, `g2` vanishes at infinity.
    pub fn dressed(
        m: &AbelianIntegral,
        p: &Polynomial,
        g1: &Polynomial,
        g2_tail: &[C64],
    ) -> Result<CechCocycle, VerifyError> {
        let CurveData::Genus0 { f } = &m.data else {
            panic!("cocycle model is genus-0 only")
        };
        let omega = f.derivative();
        let trunc = (m.n as i32 + g2_tail.len() as i32 + g1.degree() as i32 + 8).max(16);
        let inf = ExpansionPoint::Infinity;
        let alpha1 = p.add(&omega.mul(g1));
        // s = g1 + g2, alpha2 = alpha1 - omega s = p - omega g2
        let mut g2 = LaurentSeries::zero(inf, 1, trunc);
        for (l, &c) in g2_tail.iter().enumerate() {
            g2 = g2
                .add(&LaurentSeries::monomial(inf, c, l as i32 + 1, trunc))
                .unwrap();
        }
        let s = poly_to_v(g1, trunc).add(&g2)?;
        let omega_v = poly_to_v(&omega, trunc);
        let alpha2 = poly_to_v(p, trunc).sub(&omega_v.mul(&g2)?)?;
        Ok(CechCocycle { alpha1, alpha2, s })
    }

    /// Product with the deformation cocycle of the chart direction
    /// `d/d a_j`, which is `(t^j, t^j, 0)`: the three slots are multiplied
    /// through, the third solving its own cocycle relation.
    pub fn multiply_by_direction(&self, j: usize) -> Result<CechCocycle, VerifyError> {
        let h = Polynomial::monomial(C64::new(1.0, 0.0), j);
        let trunc = self.s.truncation_order();
        let h_v = poly_to_v(&h, trunc + j as i32);
        let alpha1 = self.alpha1.mul(&h);
        let alpha2 = h_v.mul(&self.alpha2)?;
        let s = h_v.mul(&self.s)?;
        Ok(CechCocycle { alpha1, alpha2, s })
    }
}

/// The oracle: multiply the class of `c` by the tangent direction `d/d a_j`
/// at the cocycle level and reduce; the caller compares against the
/// componentwise product.
pub fn cech_multiplication_oracle(
    m: &AbelianIntegral,
    fa: &FiberAlgebra,
    c: &CechCocycle,
    j: usize,
) -> Result<Vec<C64>, VerifyError> {
    c.validate(m)?;
    let prod = c.multiply_by_direction(j)?;
    prod.validate(m)?;
    Ok(prod.reduce(fa))
}
