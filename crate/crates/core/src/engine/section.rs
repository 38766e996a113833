//! Primitive sections: the unique 1-form with polar part `x^{-k} dx` at the
//! marked point, no other poles, and (at genus 1) zero a-period.

use super::xseries::{x_series_genus0, x_series_genus1, XData};
use super::EngineError;
use crate::elliptic::{contour_period, Cycle, CycleKind};
use crate::model::{AbelianIntegral, CriticalData, CurveData};
use crate::num::{CMatrix, ExpansionPoint, LaurentSeries, Polynomial};
use crate::C64;

/// Threshold below which a section value at a critical point flags the
/// section as non-primitive there. The locus boundary is detected, never
/// crossed silently.
pub const PRIMITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub enum SectionCoeffs {
    /// Density polynomial `h(t)` of `rho = h dt`.
    Genus0(Polynomial),
    /// `du`-coefficient and the coefficients of `wp^{(j)} du`, `j = 0..`.
    Genus1 { du: C64, wp: Vec<C64> },
}

#[derive(Debug, Clone)]
pub struct PrimitiveSection {
    pub k: usize,
    pub coeffs: SectionCoeffs,
    /// Density values at the critical points, in the `dt`/`du` frame.
    pub values_at_critical: Vec<C64>,
    /// Numerically integrated a-period (zero at genus 0 by construction).
    pub a_period: C64,
    /// All critical values clear of the degeneracy threshold.
    pub primitive: bool,
    /// Defect of the polar-part match, checked to order `k + 2`.
    pub polar_defect: f64,
}

impl PrimitiveSection {
    /// Construct `rho_k` at the point `m` with critical data `cd`.
    pub fn build(
        m: &AbelianIntegral,
        cd: &CriticalData,
        k: usize,
    ) -> Result<PrimitiveSection, EngineError> {
        if k < 2 || k > m.n {
            return Err(EngineError::KOutOfRange { k, n: m.n });
        }
        match &m.data {
            CurveData::Genus0 { .. } => build_genus0(m, cd, k),
            CurveData::Genus1 { .. } => build_genus1(m, cd, k),
        }
    }

    /// Density of the section with respect to the standard coordinate form.
    pub fn density(&self, m: &AbelianIntegral, u: C64) -> Result<C64, EngineError> {
        match (&self.coeffs, &m.data) {
            (SectionCoeffs::Genus0(h), _) => Ok(h.eval(u)),
            (SectionCoeffs::Genus1 { du, wp }, CurveData::Genus1 { lattice, .. }) => {
                let mut v = *du;
                for (j, &c) in wp.iter().enumerate() {
                    v += c * lattice.wp(u, j)?;
                }
                Ok(v)
            }
            _ => unreachable!("section/point genus mismatch"),
        }
    }

    /// Density of the section as a Laurent series at the marked point, in the
    /// native local parameter (`1/t` at genus 0, `u` at genus 1).
    pub fn density_series(&self, m: &AbelianIntegral, trunc: i32) -> LaurentSeries {
        match (&self.coeffs, &m.data) {
            (SectionCoeffs::Genus0(h), _) => {
                // rho = h(t) dt = -(sum h_i v^{-i-2}) dv
                let inf = ExpansionPoint::Infinity;
                let mut s = LaurentSeries::zero(inf, -(h.degree() as i32) - 2, trunc);
                for (i, &c) in h.coeffs().iter().enumerate() {
                    s = s
                        .add(&LaurentSeries::monomial(inf, -c, -(i as i32) - 2, trunc))
                        .unwrap();
                }
                s
            }
            (SectionCoeffs::Genus1 { du, wp }, CurveData::Genus1 { lattice, .. }) => {
                let at0 = ExpansionPoint::Finite(C64::new(0.0, 0.0));
                let mut s = LaurentSeries::constant(at0, *du, trunc);
                for (j, &c) in wp.iter().enumerate() {
                    s = s.add(&lattice.wp_series(j, trunc).scale(c)).unwrap();
                }
                s
            }
            _ => unreachable!(),
        }
    }
}

fn polar_match(
    basis_x: &[LaurentSeries],
    k: usize,
) -> Result<Vec<C64>, EngineError> {
    // match coefficients of x^{-k} .. x^{-2}; the residue order -1 comes for
    // free and is verified afterwards
    let rows: Vec<Vec<C64>> = (0..k - 1)
        .map(|r| {
            let order = -(k as i32) + r as i32;
            basis_x.iter().map(|b| b.coeff(order)).collect()
        })
        .collect();
    let mat = CMatrix::from_rows(&rows);
    let mut rhs = vec![C64::new(0.0, 0.0); k - 1];
    rhs[0] = C64::new(1.0, 0.0);
    Ok(mat.solve(&rhs)?)
}

fn verify_polar(
    x: &XData,
    density_native: &LaurentSeries,
    k: usize,
) -> Result<f64, EngineError> {
    let in_x = x.form_to_x(density_native)?;
    let mut defect = 0.0f64;
    for order in -(k as i32)..=-1 {
        let want = if order == -(k as i32) {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        };
        defect = defect.max((in_x.coeff(order) - want).norm());
    }
    Ok(defect)
}

fn build_genus0(
    m: &AbelianIntegral,
    cd: &CriticalData,
    k: usize,
) -> Result<PrimitiveSection, EngineError> {
    let order = (m.n as i32 + k as i32 + 10).max(16);
    let x = x_series_genus0(m, order)?;
    let inf = ExpansionPoint::Infinity;
    // basis forms t^i dt with density -v^{-i-2} in v = 1/t
    let basis_native: Vec<LaurentSeries> = (0..k - 1)
        .map(|i| LaurentSeries::monomial(inf, C64::new(-1.0, 0.0), -(i as i32) - 2, order))
        .collect();
    let basis_x: Vec<LaurentSeries> = basis_native
        .iter()
        .map(|b| x.form_to_x(b))
        .collect::<Result<_, _>>()?;
    let c = polar_match(&basis_x, k)?;
    let h = Polynomial::new(c.clone());
    let density_native = {
        let mut s = LaurentSeries::zero(inf, -(k as i32), order);
        for (i, &ci) in c.iter().enumerate() {
            s = s
                .add(&LaurentSeries::monomial(inf, -ci, -(i as i32) - 2, order))
                .unwrap();
        }
        s
    };
    let polar_defect = verify_polar(&x, &density_native, k)?;
    if polar_defect > 1e-8 {
        return Err(EngineError::PolarMatchFailure(polar_defect));
    }
    let values: Vec<C64> = cd.points.iter().map(|&q| h.eval(q)).collect();
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let primitive = values.iter().all(|v| v.norm() > PRIMITIVITY_TOL * scale);
    Ok(PrimitiveSection {
        k,
        coeffs: SectionCoeffs::Genus0(h),
        values_at_critical: values,
        a_period: C64::new(0.0, 0.0),
        primitive,
        polar_defect,
    })
}

fn build_genus1(
    m: &AbelianIntegral,
    cd: &CriticalData,
    k: usize,
) -> Result<PrimitiveSection, EngineError> {
    let CurveData::Genus1 { lattice, .. } = &m.data else {
        unreachable!()
    };
    let order = (m.n as i32 + k as i32 + 12).max(18);
    let x = x_series_genus1(m, order, None)?;
    // basis wp^{(j)} du, j = 0..k-2, with pole orders 2..k
    let basis_native: Vec<LaurentSeries> =
        (0..k - 1).map(|j| lattice.wp_series(j, order)).collect();
    let basis_x: Vec<LaurentSeries> = basis_native
        .iter()
        .map(|b| x.form_to_x(b))
        .collect::<Result<_, _>>()?;
    let c = polar_match(&basis_x, k)?;

    // a-periods: wp du has -eta1, higher derivatives are exact, du has 1;
    // the du coefficient kills the raw period
    let raw_period = c[0] * (-lattice.eta1);
    let lambda = -raw_period;

    let mut density_native = LaurentSeries::constant(
        ExpansionPoint::Finite(C64::new(0.0, 0.0)),
        lambda,
        order,
    );
    for (j, &cj) in c.iter().enumerate() {
        density_native = density_native
            .add(&lattice.wp_series(j, order).scale(cj))
            .unwrap();
    }
    let polar_defect = verify_polar(&x, &density_native, k)?;
    if polar_defect > 1e-8 {
        return Err(EngineError::PolarMatchFailure(polar_defect));
    }

    let section = PrimitiveSection {
        k,
        coeffs: SectionCoeffs::Genus1 {
            du: lambda,
            wp: c.clone(),
        },
        values_at_critical: Vec::new(),
        a_period: C64::new(0.0, 0.0),
        primitive: false,
        polar_defect,
    };
    // independent numerical a-period
    let density_fn = |u: C64| section.density(m, u).unwrap_or(C64::new(f64::NAN, 0.0));
    let a_cycle = Cycle::new(CycleKind::A, lattice);
    let a_period = contour_period(lattice, &density_fn, &a_cycle, 1e-11)?;

    let values: Vec<C64> = cd
        .points
        .iter()
        .map(|&q| section.density(m, q))
        .collect::<Result<_, _>>()?;
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1.0);
    let primitive = values.iter().all(|v| v.norm() > PRIMITIVITY_TOL * scale);
    Ok(PrimitiveSection {
        values_at_critical: values,
        a_period,
        primitive,
        ..section
    })
}
