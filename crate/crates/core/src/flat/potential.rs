//! Structure constants in a flat frame, the potential fit and the WDVV
//! residual.

use super::genus0::FlatChartGenus0;
use super::FlatError;
use crate::engine::{EngineConfig, FiberAlgebra, TangentVector};
use crate::model::AbelianIntegral;
use crate::num::CMatrix;
use crate::C64;

/// Totally symmetric `c_ABC = eta(d_A o d_B, d_C)` over a frame.
pub fn structure_constants(
    fa: &FiberAlgebra,
    frame: &[TangentVector],
) -> Result<Vec<Vec<Vec<C64>>>, FlatError> {
    let d = frame.len();
    let mut c = vec![vec![vec![C64::new(0.0, 0.0); d]; d]; d];
    for a in 0..d {
        for b in 0..=a {
            let prod = fa.multiply(&frame[a], &frame[b])?;
            for g in 0..d {
                let v = fa.metric(&prod, &frame[g])?;
                c[a][b][g] = v;
                c[b][a][g] = v;
            }
        }
    }
    // total symmetry witness
    let mut defect = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            for g in 0..d {
                defect = defect.max((c[a][b][g] - c[g][b][a]).norm());
                defect = defect.max((c[a][b][g] - c[a][g][b]).norm());
            }
        }
    }
    if defect > 1e-9 * scale_of(&c) {
        return Err(FlatError::PotentialityFailure(defect));
    }
    Ok(c)
}

fn scale_of(c: &[Vec<Vec<C64>>]) -> f64 {
    c.iter()
        .flatten()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1.0)
}

/// `max |c_AB^E c_ECD - c_AC^E c_EBD|` with indices raised by `eta^{-1}`.
pub fn wdvv_residual(c: &[Vec<Vec<C64>>], eta: &CMatrix) -> Result<f64, FlatError> {
    let d = c.len();
    let eta_inv = eta.inverse().map_err(FlatError::from)?;
    // raised tensor m[a][b][e] = sum_g c[a][b][g] eta^{g e}
    let mut raised = vec![vec![vec![C64::new(0.0, 0.0); d]; d]; d];
    for a in 0..d {
        for b in 0..d {
            for e in 0..d {
                let mut s = C64::new(0.0, 0.0);
                for g in 0..d {
                    s += c[a][b][g] * eta_inv.get(g, e);
                }
                raised[a][b][e] = s;
            }
        }
    }
    let mut res = 0.0f64;
    for a in 0..d {
        for b in 0..d {
            for g in 0..d {
                for dd in 0..d {
                    let mut lhs = C64::new(0.0, 0.0);
                    let mut rhs = C64::new(0.0, 0.0);
                    for e in 0..d {
                        lhs += raised[a][b][e] * c[e][g][dd];
                        rhs += raised[a][g][e] * c[e][b][dd];
                    }
                    res = res.max((lhs - rhs).norm());
                }
            }
        }
    }
    Ok(res / scale_of(c).powi(2).max(1.0))
}

/// Four-index potentiality defect at a genus-0 point: Richardson finite
/// differences of `c_ABC` along each flat direction, checked for symmetry of
/// the derivative index against the tensor indices.
pub fn potentiality_defect(
    m: &AbelianIntegral,
    chart: &FlatChartGenus0,
    cfg: &EngineConfig,
    h: f64,
) -> Result<f64, FlatError> {
    let d = chart.dimension;
    let c_at = |point: &AbelianIntegral| -> Result<Vec<Vec<Vec<C64>>>, FlatError> {
        let fa = FiberAlgebra::new(point.clone(), cfg)?;
        let ch = super::genus0::flat_coordinates_genus0(point, cfg)?;
        let frame = ch.frame_vectors(&fa);
        structure_constants(&fa, &frame)
    };
    // dc[dd][a][b][g]
    let mut dc = vec![vec![vec![vec![C64::new(0.0, 0.0); d]; d]; d]; d];
    for dd in 0..d {
        // step along the flat direction dd expressed in the chart
        let dir: Vec<C64> = (0..d).map(|j| chart.frame.get(j, dd)).collect();
        let fd = |step: f64| -> Result<Vec<Vec<Vec<C64>>>, FlatError> {
            let plus = c_at(&m.deform(&dir, C64::new(step, 0.0))?)?;
            let minus = c_at(&m.deform(&dir, C64::new(-step, 0.0))?)?;
            let mut out = vec![vec![vec![C64::new(0.0, 0.0); d]; d]; d];
            for a in 0..d {
                for b in 0..d {
                    for g in 0..d {
                        out[a][b][g] = (plus[a][b][g] - minus[a][b][g]) / (2.0 * step);
                    }
                }
            }
            Ok(out)
        };
        let d1 = fd(h)?;
        let d2 = fd(h / 2.0)?;
        for a in 0..d {
            for b in 0..d {
                for g in 0..d {
                    dc[dd][a][b][g] = (4.0 * d2[a][b][g] - d1[a][b][g]) / 3.0;
                }
            }
        }
    }
    let mut defect = 0.0f64;
    let scale = dc
        .iter()
        .flatten()
        .flatten()
        .flatten()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    for dd in 0..d {
        for a in 0..d {
            for b in 0..d {
                for g in 0..d {
                    // swapping the derivative index with a tensor index must
                    // not change the value
                    defect = defect.max((dc[dd][a][b][g] - dc[a][dd][b][g]).norm());
                }
            }
        }
    }
    Ok(defect / scale)
}

/// Multi-indices of total degree `lo..=hi` in `d` variables.
fn monomials(d: usize, lo: usize, hi: usize) -> Vec<Vec<usize>> {
    fn rec(d: usize, total: usize, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if d == 1 {
            let mut m = prefix.clone();
            m.push(total);
            out.push(m);
            return;
        }
        for k in 0..=total {
            prefix.push(k);
            rec(d - 1, total - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    for deg in lo..=hi {
        rec(d, deg, &mut Vec::new(), &mut out);
    }
    out
}

fn mono_eval(mono: &[usize], t: &[C64]) -> C64 {
    mono.iter()
        .zip(t)
        .fold(C64::new(1.0, 0.0), |acc, (&p, &x)| acc * x.powu(p as u32))
}

/// Third partial of a monomial: returns the coefficient polynomial value.
fn mono_d3(mono: &[usize], a: usize, b: usize, g: usize, t: &[C64]) -> C64 {
    let mut m: Vec<usize> = mono.to_vec();
    let mut factor = 1.0f64;
    for idx in [a, b, g] {
        if m[idx] == 0 {
            return C64::new(0.0, 0.0);
        }
        factor *= m[idx] as f64;
        m[idx] -= 1;
    }
    mono_eval(&m, t) * factor
}

#[derive(Debug)]
pub struct PotentialFit {
    pub monomials: Vec<Vec<usize>>,
    pub coeffs: Vec<C64>,
    pub fit_residual: f64,
    pub samples: usize,
}

impl PotentialFit {
    /// Coefficient of a named monomial, zero if absent.
    pub fn coeff(&self, mono: &[usize]) -> C64 {
        self.monomials
            .iter()
            .position(|m| m == mono)
            .map(|i| self.coeffs[i])
            .unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn eval(&self, t: &[C64]) -> C64 {
        self.monomials
            .iter()
            .zip(&self.coeffs)
            .map(|(m, &c)| c * mono_eval(m, t))
            .sum()
    }
}

/// Fit a polynomial potential of total degree `<= n+2` to sampled structure
/// constants at genus 0: every `(sample, A<=B<=C)` contributes the linear
/// constraint `d3 F = c_ABC`. Quadratic and lower terms are not in the basis,
/// which is the normalization killing the affine-quadratic ambiguity.
pub fn potential_genus0(
    samples: &[(Vec<C64>, Vec<Vec<Vec<C64>>>)],
    dim: usize,
    max_degree: usize,
) -> Result<PotentialFit, FlatError> {
    let monos = monomials(dim, 3, max_degree);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (t, c) in samples {
        for a in 0..dim {
            for b in a..dim {
                for g in b..dim {
                    rows.push(
                        monos
                            .iter()
                            .map(|mn| mono_d3(mn, a, b, g, t))
                            .collect::<Vec<C64>>(),
                    );
                    rhs.push(c[a][b][g]);
                }
            }
        }
    }
    let mat = CMatrix::from_rows(&rows);
    let (coeffs, resid) = mat.lstsq(&rhs)?;
    let scale = rhs.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
    Ok(PotentialFit {
        monomials: monos,
        coeffs,
        fit_residual: resid / (rhs.len() as f64).sqrt() / scale,
        samples: samples.len(),
    })
}
