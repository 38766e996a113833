//! The distinguished coordinate `x = f^{-1/n}` at the marked point and the
//! series plumbing for rewriting 1-form densities in it.

use super::EngineError;
use crate::model::{AbelianIntegral, CurveData};
use crate::num::{puiseux_inverse_root, LaurentSeries};
use crate::C64;

/// Series data of the coordinate change between the native local parameter
/// (`1/t` at genus 0, `u` at genus 1) and `x`.
#[derive(Debug, Clone)]
pub struct XData {
    /// `x` as a series in the native parameter.
    pub x_of_param: LaurentSeries,
    /// Native parameter as a series in `x` (compositional inverse).
    pub param_of_x: LaurentSeries,
    /// Leading coefficient of `x_of_param` (branch witness).
    pub leading: C64,
}

/// Genus-0 coordinate data: `x = f^{-1/n}` as a series in `v = 1/t`,
/// principal branch (leading coefficient exactly 1).
pub fn x_series_genus0(m: &AbelianIntegral, order: i32) -> Result<XData, EngineError> {
    let CurveData::Genus0 { f } = &m.data else {
        panic!("genus-0 x-series on a genus-1 point")
    };
    let x = puiseux_inverse_root(f, order)?;
    let v = x.revert()?;
    Ok(XData {
        leading: x.coeff(1),
        x_of_param: x,
        param_of_x: v,
    })
}

/// Genus-1 coordinate data: `x = f^{-1/n}` as a series in `u`. The scalar
/// branch of the `n`-th root is principal, unless `branch_ref` is given, in
/// which case the root nearest the reference leading coefficient is taken
/// (continuity along deformation paths).
pub fn x_series_genus1(
    m: &AbelianIntegral,
    order: i32,
    branch_ref: Option<C64>,
) -> Result<XData, EngineError> {
    let n = m.n as i32;
    let f = m.f_series(order.max(n + 4))?;
    // f = L u^{-n} (1 + h), leading L at order -n
    let lead = f.coeff(-n);
    let rel = f.shift(n).scale(C64::new(1.0, 0.0) / lead);
    let root = rel.powf(-1.0 / n as f64)?;
    let mut scalar = lead.powf(-1.0 / n as f64);
    if let Some(r) = branch_ref {
        let mut best = scalar;
        let mut best_d = (scalar - r).norm();
        for k in 1..m.n {
            let phase = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            let cand = scalar * C64::from_polar(1.0, phase);
            let d = (cand - r).norm();
            if d < best_d {
                best = cand;
                best_d = d;
            }
        }
        scalar = best;
    }
    let x = root.scale(scalar).shift(1).truncate(order);
    let u = x.revert()?;
    Ok(XData {
        leading: x.coeff(1),
        x_of_param: x,
        param_of_x: u,
    })
}

impl XData {
    /// Rewrite a 1-form given by its density series in the native parameter
    /// as a density series in `x`: `g(param(x)) * param'(x)`.
    pub fn form_to_x(&self, density: &LaurentSeries) -> Result<LaurentSeries, EngineError> {
        let sub = density.compose(&self.param_of_x)?;
        let dpdx = self.param_of_x.differentiate();
        Ok(sub.mul(&dpdx)?)
    }

    /// Polar coefficients `(order, coeff)` for orders `-max_pole..=-1` of a
    /// density-in-x series.
    pub fn polar_part(density_in_x: &LaurentSeries, max_pole: i32) -> Vec<(i32, C64)> {
        (-max_pole..=-1)
            .map(|k| (k, density_in_x.coeff(k)))
            .collect()
    }
}
