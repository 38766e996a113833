//! Simple-pole shape of the pencil in `z` at genus 0.
//!
//! The connection acts on the polynomial-form basis `{t^i dt}` by
//! multiplication with `(d_xi f)/z` followed by reduction modulo the image
//! of `d + omega/z` on polynomials. Sampling the reduced matrices over a
//! fixed `z` set and regressing each entry on `a + b/z` certifies the pole
//! shape; the fitted residue must be the multiplication operator.

use super::VerifyError;
use crate::engine::FiberAlgebra;
use crate::model::{AbelianIntegral, CurveData};
use crate::num::{CMatrix, Polynomial};
use crate::C64;

/// Fixed, documented sample set for the pole-shape fit.
pub const Z_SAMPLES: [C64; 6] = [
    C64::new(1.0, 0.0),
    C64::new(2.0, 0.0),
    C64::new(4.0, 0.0),
    C64::new(8.0, 0.0),
    C64::new(-3.0, 0.0),
    C64::new(0.0, 1.0),
];

#[derive(Debug)]
pub struct PencilReport {
    /// Largest per-entry regression residual of the `a + b/z` fit.
    pub fit_residual: f64,
    /// Largest componentwise difference between the fitted residue matrix
    /// and the multiplication operator from the fiber algebra.
    pub residue_vs_multiplication: f64,
    /// Residual after injecting a synthetic `1/z^2` term (detector check).
    pub fault_residual: f64,
}

/// Reduce the density `p(t)` modulo `im(d + omega/z)` at a concrete `z`,
/// returning the degree `<= n-2` representative.
fn reduce_mod_image(p: &Polynomial, f: &Polynomial, z: C64) -> Polynomial {
    let n = f.degree();
    let omega = f.derivative();
    let mut cur = p.clone();
    while cur.degree() >= n - 1 && !cur.is_zero() {
        let m = cur.degree();
        let c = cur.leading();
        // subtract (c z / n) (d + omega/z)(t^{m-n+1})
        //        = (c z (m-n+1)/n) t^{m-n} + (c/n) omega t^{m-n+1}
        let l = m + 1 - n;
        let factor = c / n as f64;
        let mut sub = omega.mul(&Polynomial::monomial(factor, l));
        if l >= 1 {
            sub = sub.add(&Polynomial::monomial(factor * z * l as f64, m - n));
        }
        cur = cur.sub(&sub);
        // guard: the leading term must actually cancel
        debug_assert!(cur.degree() < m || cur.is_zero());
    }
    cur
}

/// Connection matrix in direction `d/d a_j` over the basis `{t^i dt}` at the
/// sample `z`: column `i` holds the reduction of `(t^{i+j}/z) dt`.
fn connection_matrix(m: &AbelianIntegral, j: usize, z: C64) -> CMatrix {
    let CurveData::Genus0 { f } = &m.data else {
        panic!("pencil reduction is genus-0 only")
    };
    let n = m.n;
    let dim = n - 1;
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let input = Polynomial::monomial(C64::new(1.0, 0.0) / z, i + j);
        let red = reduce_mod_image(&input, f, z);
        for r in 0..dim {
            out.set(r, i, red.coeff(r));
        }
    }
    out
}

/// Multiplication operator by `(d_xi f) = t^j` on the value model, expressed
/// over the polynomial basis through the critical points (independent of the
/// reduction route above).
fn multiplication_matrix(fa: &FiberAlgebra, j: usize) -> Result<CMatrix, VerifyError> {
    let dim = fa.dim();
    let q = &fa.critical.points;
    // Vandermonde V[s][i] = q_s^i
    let rows: Vec<Vec<C64>> = q
        .iter()
        .map(|&qs| {
            let mut p = C64::new(1.0, 0.0);
            (0..dim)
                .map(|_| {
                    let v = p;
                    p *= qs;
                    v
                })
                .collect()
        })
        .collect();
    let vand = CMatrix::from_rows(&rows);
    let mut out = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        // values of t^j * t^i at q_s, pulled back to coefficients
        let vals: Vec<C64> = q.iter().map(|&qs| qs.powu((i + j) as u32)).collect();
        let coef = vand.solve(&vals)?;
        for r in 0..dim {
            out.set(r, i, coef[r]);
        }
    }
    Ok(out)
}

fn fit_entrywise(
    samples: &[(C64, CMatrix)],
    dim: usize,
) -> Result<(CMatrix, CMatrix, f64), VerifyError> {
    let mut a_inf = CMatrix::zeros(dim, dim);
    let mut b_res = CMatrix::zeros(dim, dim);
    let mut worst = 0.0f64;
    let design: Vec<Vec<C64>> = samples
        .iter()
        .map(|(z, _)| vec![C64::new(1.0, 0.0), C64::new(1.0, 0.0) / z])
        .collect();
    let design = CMatrix::from_rows(&design);
    for r in 0..dim {
        for c in 0..dim {
            let rhs: Vec<C64> = samples.iter().map(|(_, m)| m.get(r, c)).collect();
            let (x, resid) = design.lstsq(&rhs)?;
            a_inf.set(r, c, x[0]);
            b_res.set(r, c, x[1]);
            let scale = rhs.iter().map(|v| v.norm()).fold(1.0, f64::max);
            worst = worst.max(resid / scale);
        }
    }
    Ok((a_inf, b_res, worst))
}

/// Sample the connection in every chart direction over `Z_SAMPLES`, fit the
/// pole shape, compare the fitted residue with the multiplication operator,
/// and confirm the fit degrades under an injected `1/z^2` term.
pub fn pencil_consistency(m: &AbelianIntegral, fa: &FiberAlgebra) -> Result<PencilReport, VerifyError> {
    assert_eq!(m.genus(), 0);
    let dim = m.dim();
    let mut fit_residual = 0.0f64;
    let mut residue_diff = 0.0f64;
    let mut fault_residual = f64::INFINITY;
    for j in 0..dim {
        let samples: Vec<(C64, CMatrix)> = Z_SAMPLES
            .iter()
            .map(|&z| (z, connection_matrix(m, j, z)))
            .collect();
        let (_a_inf, b_res, resid) = fit_entrywise(&samples, dim)?;
        fit_residual = fit_residual.max(resid);
        let mult = multiplication_matrix(fa, j)?;
        for r in 0..dim {
            for c in 0..dim {
                residue_diff = residue_diff.max((b_res.get(r, c) - mult.get(r, c)).norm());
            }
        }
        // fault injection on the first direction only
        if j == 0 {
            let faulty: Vec<(C64, CMatrix)> = samples
                .iter()
                .map(|(z, mat)| {
                    let mut bad = mat.clone();
                    bad.set(0, 0, bad.get(0, 0) + C64::new(1e-3, 0.0) / (z * z));
                    (*z, bad)
                })
                .collect();
            let (_, _, bad_resid) = fit_entrywise(&faulty, dim)?;
            fault_residual = bad_resid;
        }
    }
    Ok(PencilReport {
        fit_residual,
        residue_vs_multiplication: residue_diff,
        fault_residual,
    })
}
