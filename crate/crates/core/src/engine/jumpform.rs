//! The jump-kernel section at genus 1: a 1-form with pole order at most `n`
//! at the marked point whose only other feature is a jump `omega` across the
//! a-cycle. Together with the single-valued Weierstrass forms it spans the
//! full `2g + n - 1` dimensional fiber.
//!
//! Construction: with `v(u) = zeta(u) - eta1 u` (a-periodic, jumps by
//! `-2 pi i` under the b-translation), the combination
//! `alpha1 - dv - omega v` acquires the jump `2 pi i omega`, and `alpha1`
//! is the unique combination of `wp^{(n)} du`, `wp^{(n-1)} du` cancelling the
//! pole overflow of `omega v`. The result is divided by `2 pi i` so the jump
//! is exactly `omega`.

use super::EngineError;
use crate::elliptic::{contour_period, Cycle, CycleKind};
use crate::model::{AbelianIntegral, CurveData};
use crate::num::{ExpansionPoint, LaurentSeries};
use crate::C64;
use std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct JumpKernel {
    /// Coefficients of `wp^{(n)} du` and `wp^{(n-1)} du` (the overflow match).
    pub a_top: C64,
    pub b_top: C64,
    /// Overall scalar applied so the jump is exactly `1 * omega`.
    pub scale: C64,
    /// Numerically integrated a-period of the kernel.
    pub a_period: C64,
}

impl JumpKernel {
    pub fn build(m: &AbelianIntegral) -> Result<JumpKernel, EngineError> {
        let CurveData::Genus1 { lattice, .. } = &m.data else {
            panic!("jump kernel only exists at genus 1")
        };
        let n = m.n as i32;
        let omega = m.omega_series(6);
        let w_top = omega.coeff(-n - 1);
        let w_next = omega.coeff(-n);
        // wp^{(j)} = (-1)^j (j+1)! u^{-j-2} + O(u^{-j})
        let lead_n = fact_signed(m.n);
        let lead_n1 = fact_signed(m.n - 1);
        let a_top = w_top / lead_n;
        let b_top = w_next / lead_n1;
        let scale = C64::new(0.0, 2.0 * PI).inv();

        let mut kernel = JumpKernel {
            a_top,
            b_top,
            scale,
            a_period: C64::new(0.0, 0.0),
        };
        // jump convention: density(u + tau) - density(u) must equal the
        // omega density; measured once and pinned by the scalar
        let probe = C64::new(0.31, 0.11) + lattice.tau * 0.27;
        let jump = kernel.density_raw(m, probe + lattice.tau)? - kernel.density_raw(m, probe)?;
        let want = m.omega_density(probe)?;
        kernel.scale = want / jump;

        let density_fn = |u: C64| kernel.density(m, u).unwrap_or(C64::new(f64::NAN, 0.0));
        let a_cycle = Cycle::new(CycleKind::A, lattice);
        kernel.a_period = contour_period(lattice, &density_fn, &a_cycle, 1e-11)?;
        Ok(kernel)
    }

    /// Unscaled density: `alpha1 + (wp + eta1) du - v omega` by the global
    /// formula (single-valued on the plane; the torus jump appears through
    /// quasi-periodicity).
    fn density_raw(&self, m: &AbelianIntegral, u: C64) -> Result<C64, EngineError> {
        let CurveData::Genus1 { lattice, .. } = &m.data else {
            unreachable!()
        };
        let v = lattice.zeta(u)? - lattice.eta1 * u;
        let alpha1 = self.a_top * lattice.wp(u, m.n)? + self.b_top * lattice.wp(u, m.n - 1)?;
        Ok(alpha1 + lattice.wp(u, 0)? + lattice.eta1 - v * m.omega_density(u)?)
    }

    /// Density of the normalized kernel (jump exactly `omega`).
    pub fn density(&self, m: &AbelianIntegral, u: C64) -> Result<C64, EngineError> {
        Ok(self.scale * self.density_raw(m, u)?)
    }

    /// Laurent series of the normalized density at the marked point.
    pub fn density_series(
        &self,
        m: &AbelianIntegral,
        trunc: i32,
    ) -> Result<LaurentSeries, EngineError> {
        let CurveData::Genus1 { lattice, .. } = &m.data else {
            unreachable!()
        };
        let at0 = ExpansionPoint::Finite(C64::new(0.0, 0.0));
        let order = trunc + m.n as i32 + 4;
        let omega = m.omega_series(order);
        // v = zeta - eta1 u
        let v = lattice
            .zeta_series(order)
            .add(&LaurentSeries::monomial(at0, -lattice.eta1, 1, order))
            .unwrap();
        let mut s = lattice.wp_series(m.n, trunc).scale(self.a_top);
        s = s
            .add(&lattice.wp_series(m.n - 1, trunc).scale(self.b_top))
            .unwrap();
        s = s.add(&lattice.wp_series(0, trunc)).unwrap();
        s = s
            .add(&LaurentSeries::constant(at0, lattice.eta1, trunc))
            .unwrap();
        s = s.sub(&v.mul(&omega).unwrap().truncate(trunc)).unwrap();
        Ok(s.scale(self.scale))
    }
}

/// `(-1)^j (j+1)!` as a complex scalar.
fn fact_signed(j: usize) -> C64 {
    let mut f = 1.0f64;
    for i in 2..=(j + 1) {
        f *= i as f64;
    }
    C64::new(if j % 2 == 0 { f } else { -f }, 0.0)
}
