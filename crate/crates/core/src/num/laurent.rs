//! Truncated Laurent series with certified truncation orders.
//!
//! A series carries the point it is expanded at, its lowest stored order and
//! a contiguous block of coefficients up to a certified truncation order.
//! Every operation narrows the certification pessimistically so that no
//! consumer ever reads past what the inputs actually determine. At infinity
//! the local parameter is `1/t` and orders count powers of `1/t`.

use super::NumError;
use crate::C64;
use num_traits::Zero;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpansionPoint {
    Finite(C64),
    Infinity,
}

impl ExpansionPoint {
    fn same_as(&self, other: &ExpansionPoint) -> bool {
        match (self, other) {
            (ExpansionPoint::Infinity, ExpansionPoint::Infinity) => true,
            (ExpansionPoint::Finite(a), ExpansionPoint::Finite(b)) => (a - b).norm() < 1e-12,
            _ => false,
        }
    }
}

/// `coeffs[i]` multiplies `param^(low + i)`; certified through `low + len - 1`.
#[derive(Debug, Clone)]
pub struct LaurentSeries {
    point: ExpansionPoint,
    low: i32,
    coeffs: Vec<C64>,
}

impl LaurentSeries {
    pub fn new(point: ExpansionPoint, low: i32, coeffs: Vec<C64>) -> Self {
        assert!(!coeffs.is_empty(), "series must certify at least one order");
        LaurentSeries { point, low, coeffs }
    }

    /// Zero series certified through `trunc`.
    pub fn zero(point: ExpansionPoint, low: i32, trunc: i32) -> Self {
        assert!(trunc >= low);
        LaurentSeries {
            point,
            low,
            coeffs: vec![C64::zero(); (trunc - low + 1) as usize],
        }
    }

    pub fn constant(point: ExpansionPoint, value: C64, trunc: i32) -> Self {
        let mut s = LaurentSeries::zero(point, 0, trunc.max(0));
        s.coeffs[0] = value;
        s
    }

    /// The monomial `c · param^k`, certified through `trunc`.
    pub fn monomial(point: ExpansionPoint, c: C64, k: i32, trunc: i32) -> Self {
        let mut s = LaurentSeries::zero(point, k, trunc.max(k));
        s.coeffs[0] = c;
        s
    }

    pub fn point(&self) -> ExpansionPoint {
        self.point
    }

    pub fn lowest_order(&self) -> i32 {
        self.low
    }

    pub fn truncation_order(&self) -> i32 {
        self.low + self.coeffs.len() as i32 - 1
    }

    pub fn coeff(&self, order: i32) -> C64 {
        if order < self.low || order > self.truncation_order() {
            C64::zero()
        } else {
            self.coeffs[(order - self.low) as usize]
        }
    }

    /// First order with a coefficient above `tol` in magnitude, if any.
    pub fn valuation(&self, tol: f64) -> Option<i32> {
        self.coeffs
            .iter()
            .position(|c| c.norm() > tol)
            .map(|i| self.low + i as i32)
    }

    pub fn is_negligible(&self, tol: f64) -> bool {
        self.valuation(tol).is_none()
    }

    /// Drop orders above `order` (tightening the certificate).
    pub fn truncate(&self, order: i32) -> LaurentSeries {
        assert!(order >= self.low, "cannot truncate below lowest order");
        let keep = (order - self.low + 1) as usize;
        LaurentSeries {
            point: self.point,
            low: self.low,
            coeffs: self.coeffs[..keep.min(self.coeffs.len())].to_vec(),
        }
    }

    /// Multiply by `param^k`.
    pub fn shift(&self, k: i32) -> LaurentSeries {
        LaurentSeries {
            point: self.point,
            low: self.low + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, s: C64) -> LaurentSeries {
        LaurentSeries {
            point: self.point,
            low: self.low,
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &LaurentSeries) -> Result<LaurentSeries, NumError> {
        if !self.point.same_as(&other.point) {
            return Err(NumError::IncompatibleExpansionPoints);
        }
        let low = self.low.min(other.low);
        let trunc = self.truncation_order().min(other.truncation_order());
        let mut out = LaurentSeries::zero(self.point, low, trunc.max(low));
        for k in low..=trunc {
            let v = self.coeff(k) + other.coeff(k);
            out.coeffs[(k - low) as usize] = v;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &LaurentSeries) -> Result<LaurentSeries, NumError> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &LaurentSeries) -> Result<LaurentSeries, NumError> {
        if !self.point.same_as(&other.point) {
            return Err(NumError::IncompatibleExpansionPoints);
        }
        let low = self.low + other.low;
        // An unknown tail of one factor first pollutes the product at
        // (trunc+1) + other.low, so certify one order below that.
        let trunc = (self.truncation_order() + other.low)
            .min(other.truncation_order() + self.low);
        let mut out = LaurentSeries::zero(self.point, low, trunc.max(low));
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let oa = self.low + i as i32;
            for (j, &b) in other.coeffs.iter().enumerate() {
                let k = oa + other.low + j as i32;
                if k > trunc {
                    break;
                }
                out.coeffs[(k - low) as usize] += a * b;
            }
        }
        Ok(out)
    }

    /// Derivative with respect to the local parameter.
    pub fn differentiate(&self) -> LaurentSeries {
        let low = self.low - 1;
        let coeffs: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| c * (self.low + i as i32) as f64)
            .collect();
        LaurentSeries {
            point: self.point,
            low,
            coeffs,
        }
    }

    /// Termwise antiderivative; fails if the residue coefficient is not
    /// negligible (no logarithms in this representation).
    pub fn integrate(&self, res_tol: f64) -> Result<LaurentSeries, NumError> {
        if self.coeff(-1).norm() > res_tol {
            return Err(NumError::ValuationError(
                "nonzero residue term cannot be integrated termwise",
            ));
        }
        let low = self.low + 1;
        let coeffs: Vec<C64> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let k = self.low + i as i32;
                if k == -1 {
                    C64::zero()
                } else {
                    c / (k + 1) as f64
                }
            })
            .collect();
        Ok(LaurentSeries {
            point: self.point,
            low,
            coeffs,
        })
    }

    /// Coefficient of order -1, the residue of the 1-form this series is the
    /// density of in its local parameter.
    pub fn residue(&self) -> Result<C64, NumError> {
        if self.truncation_order() < -1 {
            return Err(NumError::InsufficientTruncation {
                trunc: self.truncation_order(),
            });
        }
        Ok(self.coeff(-1))
    }

    /// Multiplicative inverse. Needs a clear leading coefficient.
    pub fn inverse(&self) -> Result<LaurentSeries, NumError> {
        let val = self
            .valuation(0.0)
            .ok_or(NumError::ValuationError("cannot invert the zero series"))?;
        let lead = self.coeff(val);
        // factor lead*param^val out, invert 1 + h by the geometric series
        let rel_len = (self.truncation_order() - val) as usize;
        let mut h = vec![C64::zero(); rel_len + 1];
        for (i, slot) in h.iter_mut().enumerate() {
            *slot = self.coeff(val + i as i32) / lead;
        }
        let mut inv = vec![C64::zero(); rel_len + 1];
        inv[0] = C64::new(1.0, 0.0);
        for k in 1..=rel_len {
            let mut s = C64::zero();
            for j in 1..=k {
                s += h[j] * inv[k - j];
            }
            inv[k] = -s;
        }
        let coeffs: Vec<C64> = inv.iter().map(|&c| c / lead).collect();
        // input certified to trunc = val + rel_len; output certified to
        // -val + rel_len (relative accuracy is preserved by the recursion)
        Ok(LaurentSeries {
            point: self.point,
            low: -val,
            coeffs,
        })
    }

    /// Principal-branch fractional power of a series of valuation 0.
    pub fn powf(&self, alpha: f64) -> Result<LaurentSeries, NumError> {
        if self.low > 0 || self.coeff(0).is_zero() {
            return Err(NumError::ValuationError(
                "fractional power needs valuation exactly 0",
            ));
        }
        if self.valuation(0.0) != Some(0) {
            return Err(NumError::ValuationError(
                "fractional power needs valuation exactly 0",
            ));
        }
        let lead = self.coeff(0);
        let rel_len = self.truncation_order() as usize;
        let mut h = LaurentSeries::zero(self.point, 1, rel_len.max(1) as i32);
        for k in 1..=self.truncation_order() {
            h.coeffs[(k - 1) as usize] = self.coeff(k) / lead;
        }
        let mut acc = LaurentSeries::constant(self.point, C64::new(1.0, 0.0), rel_len as i32);
        let mut term = acc.clone();
        for k in 1..=rel_len {
            let factor = (alpha - (k as f64 - 1.0)) / k as f64;
            term = term.mul(&h)?.scale(C64::new(factor, 0.0));
            term = term.truncate(rel_len as i32);
            acc = acc.add(&term)?;
        }
        let lead_pow = lead.powf(alpha);
        Ok(acc.scale(lead_pow))
    }

    /// Integer power (positive, negative or zero).
    pub fn powi(&self, n: i32) -> Result<LaurentSeries, NumError> {
        if n == 0 {
            return Ok(LaurentSeries::constant(
                self.point,
                C64::new(1.0, 0.0),
                self.truncation_order() - self.low,
            ));
        }
        let base = if n < 0 { self.inverse()? } else { self.clone() };
        let mut acc = base.clone();
        for _ in 1..n.abs() {
            acc = acc.mul(&base)?;
        }
        Ok(acc)
    }

    /// Substitute `inner` for the parameter of `self`. `inner` must have
    /// positive valuation; the result is expanded at `inner`'s point.
    pub fn compose(&self, inner: &LaurentSeries) -> Result<LaurentSeries, NumError> {
        let vb = inner.low.max(inner.valuation(0.0).unwrap_or(inner.low));
        if vb < 1 {
            return Err(NumError::ValuationError(
                "composition needs inner valuation >= 1",
            ));
        }
        let ta = self.truncation_order();
        let va = self.low;
        let tb = inner.truncation_order();
        // uncertainty from the outer tail enters at (ta+1)*vb, from the inner
        // tail at (va-1)*vb + tb + 1
        let trunc = ((ta + 1) * vb - 1).min((va - 1) * vb + tb);
        let low = va * vb;
        if trunc < low {
            return Err(NumError::ValuationError(
                "composition certifies no orders at this truncation",
            ));
        }
        let mut out = LaurentSeries::zero(inner.point, low, trunc);
        // positive powers incrementally; negative powers via the inverse
        let mut pow = LaurentSeries::constant(inner.point, C64::new(1.0, 0.0), trunc.max(0));
        if va < 0 {
            let inv = inner.inverse()?;
            let mut neg_pow = inv.clone();
            for k in 1..=(-va) {
                if k > 1 {
                    neg_pow = neg_pow.mul(&inv)?;
                }
                let order = -k;
                let c = self.coeff(order);
                if !c.is_zero() {
                    out = out.add(&neg_pow.scale(c))?.truncate(trunc);
                }
            }
        }
        let kmax = ta.max(0);
        for k in 0..=kmax {
            if k > 0 {
                pow = pow.mul(inner)?;
                if pow.truncation_order() > trunc {
                    pow = pow.truncate(trunc.max(pow.lowest_order()));
                }
            }
            if pow.lowest_order() > trunc {
                break;
            }
            let c = self.coeff(k);
            if !c.is_zero() {
                out = out.add(&pow.scale(c))?.truncate(trunc);
            }
        }
        Ok(out)
    }

    /// Compositional inverse of a series of valuation exactly 1.
    pub fn revert(&self) -> Result<LaurentSeries, NumError> {
        if self.valuation(0.0) != Some(1) || self.low > 1 {
            return Err(NumError::ValuationError(
                "reversion needs valuation exactly 1",
            ));
        }
        let n = self.truncation_order();
        if n < 1 {
            return Err(NumError::ValuationError("nothing certified to revert"));
        }
        let b1 = self.coeff(1);
        let mut g = LaurentSeries::zero(self.point, 1, n);
        g.coeffs[0] = C64::new(1.0, 0.0) / b1;
        for m in 2..=n {
            // [x^m] of sum_{k>=2} b_k g^k using g through order m-1
            let mut pow = g.truncate(m).mul(&g.truncate(m)).unwrap().truncate(m);
            let mut s = C64::zero();
            for k in 2..=m {
                if k > 2 {
                    pow = pow.mul(&g.truncate(m)).unwrap();
                    if pow.truncation_order() > m {
                        pow = pow.truncate(m);
                    }
                }
                s += self.coeff(k) * pow.coeff(m);
            }
            let gm = -s / b1;
            g.coeffs[(m - 1) as usize] = gm;
        }
        Ok(g)
    }

    /// Numeric evaluation of the truncated series at a parameter value.
    pub fn eval_param(&self, param: C64) -> C64 {
        let mut acc = C64::zero();
        // Horner on the positive block, direct powers for the polar part
        for (i, &c) in self.coeffs.iter().enumerate().rev() {
            let k = self.low + i as i32;
            if k >= 0 {
                acc = acc * param + c;
            }
        }
        let min_nonneg = self.low.max(0);
        acc *= param.powi(min_nonneg);
        for (i, &c) in self.coeffs.iter().enumerate() {
            let k = self.low + i as i32;
            if k < 0 {
                acc += c * param.powi(k);
            }
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    fn at0() -> ExpansionPoint {
        ExpansionPoint::Finite(C64::zero())
    }

    #[test]
    fn add_mul_differentiate_basics() {
        // (1+t) + (1-t) = 2
        let a = LaurentSeries::new(at0(), 0, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let b = LaurentSeries::new(at0(), 0, vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        let s = a.add(&b).unwrap();
        assert_eq!(s.coeff(0), c(2.0, 0.0));
        assert_eq!(s.coeff(1), c(0.0, 0.0));

        // t^{-1} * t = 1
        let p = LaurentSeries::monomial(at0(), c(1.0, 0.0), -1, 3);
        let q = LaurentSeries::monomial(at0(), c(1.0, 0.0), 1, 3);
        let m = p.mul(&q).unwrap();
        assert_eq!(m.coeff(0), c(1.0, 0.0));

        // d(t^2) = 2t
        let t2 = LaurentSeries::monomial(at0(), c(1.0, 0.0), 2, 4);
        let d = t2.differentiate();
        assert_eq!(d.coeff(1), c(2.0, 0.0));
    }

    #[test]
    fn residue_cases() {
        // (1/t) dt has residue 1
        let s = LaurentSeries::monomial(at0(), c(1.0, 0.0), -1, 2);
        assert_eq!(s.residue().unwrap(), c(1.0, 0.0));
        // (1/t^2) dt has residue 0
        let s = LaurentSeries::monomial(at0(), c(1.0, 0.0), -2, 2);
        assert_eq!(s.residue().unwrap(), c(0.0, 0.0));
        // truncation below -1 certifies nothing
        let s = LaurentSeries::new(at0(), -4, vec![c(1.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(
            s.residue(),
            Err(NumError::InsufficientTruncation { .. })
        ));
    }

    #[test]
    fn inverse_and_powf() {
        // 1/(1 - t) = 1 + t + t^2 + ...
        let s = LaurentSeries::new(
            at0(),
            0,
            vec![c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        let inv = s.inverse().unwrap();
        for k in 0..=3 {
            assert!((inv.coeff(k) - c(1.0, 0.0)).norm() < 1e-14);
        }
        // (1 + t)^(1/2) = 1 + t/2 - t^2/8 + ...
        let s = LaurentSeries::new(at0(), 0, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let r = s.powf(0.5).unwrap();
        assert!((r.coeff(1) - c(0.5, 0.0)).norm() < 1e-14);
        assert!((r.coeff(2) - c(-0.125, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn revert_round_trip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let n = 12;
            let mut coeffs = vec![C64::zero(); n];
            coeffs[0] = c(1.0, 0.0); // unit leading coefficient
            for slot in coeffs.iter_mut().skip(1) {
                *slot = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
            let b = LaurentSeries::new(at0(), 1, coeffs);
            let g = b.revert().unwrap();
            let comp = b.compose(&g).unwrap();
            // identity up to the certified order
            for k in comp.lowest_order()..=comp.truncation_order() {
                let expect = if k == 1 { c(1.0, 0.0) } else { C64::zero() };
                assert!(
                    (comp.coeff(k) - expect).norm() < 1e-9,
                    "order {k}: {}",
                    comp.coeff(k)
                );
            }
        }
    }

    #[test]
    fn residue_linearity_exact() {
        let a = LaurentSeries::new(at0(), -2, vec![c(0.3, 0.1), c(1.5, -2.0), c(0.2, 0.0)]);
        let b = LaurentSeries::new(at0(), -2, vec![c(-1.0, 0.4), c(0.5, 0.5), c(0.0, 1.0)]);
        let alpha = c(2.0, -1.0);
        let beta = c(-0.5, 3.0);
        let combo = a.scale(alpha).add(&b.scale(beta)).unwrap();
        let lhs = combo.residue().unwrap();
        let rhs = alpha * a.residue().unwrap() + beta * b.residue().unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn incompatible_points_rejected() {
        let a = LaurentSeries::monomial(at0(), c(1.0, 0.0), 0, 2);
        let b = LaurentSeries::monomial(ExpansionPoint::Infinity, c(1.0, 0.0), 0, 2);
        assert!(matches!(
            a.add(&b),
            Err(NumError::IncompatibleExpansionPoints)
        ));
    }
}
