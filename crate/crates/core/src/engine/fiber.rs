//! Tangent vectors in chart and fiber (idempotent-frame) representations,
//! the multiplication carried through a primitive section, and the residue
//! metric.

use super::section::PrimitiveSection;
use super::EngineError;
use crate::model::{AbelianIntegral, CriticalData, CurveData};
use crate::num::CMatrix;
use crate::C64;

#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    /// Base finite-difference step, scaled per chart coordinate.
    pub fd_step: f64,
    /// Condition-number ceiling for the chart/fiber frame.
    pub cond_max: f64,
    pub k: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            fd_step: 1e-4,
            cond_max: 1e8,
            k: 2,
        }
    }
}

/// A tangent vector at a moduli point, in both the chart basis and the
/// critical-point fiber representation `h_s = (d_xi f)(q_s)`.
#[derive(Debug, Clone)]
pub struct TangentVector {
    pub chart: Vec<C64>,
    pub fiber: Vec<C64>,
}

/// Fiberwise model of the pencil at one moduli point: critical data, the
/// chosen primitive section and the chart/fiber frame.
pub struct FiberAlgebra {
    pub point: AbelianIntegral,
    pub critical: CriticalData,
    pub rho: PrimitiveSection,
    chart_to_fiber: CMatrix,
    fiber_to_chart: CMatrix,
    /// 1-norm condition estimate of the chart/fiber frame.
    pub frame_condition: f64,
}

impl FiberAlgebra {
    pub fn new(m: AbelianIntegral, cfg: &EngineConfig) -> Result<Self, EngineError> {
        let critical = m.critical_data(1e-6)?;
        Self::with_critical(m, critical, cfg)
    }

    pub fn with_critical(
        m: AbelianIntegral,
        critical: CriticalData,
        cfg: &EngineConfig,
    ) -> Result<Self, EngineError> {
        let rho = PrimitiveSection::build(&m, &critical, cfg.k)?;
        let chart_to_fiber = chart_fiber_matrix(&m, &critical, cfg)?;
        let fiber_to_chart = chart_to_fiber.inverse().map_err(|_| {
            EngineError::SingularFrame {
                cond: f64::INFINITY,
            }
        })?;
        let frame_condition = chart_to_fiber.cond_1();
        if frame_condition > cfg.cond_max {
            return Err(EngineError::SingularFrame {
                cond: frame_condition,
            });
        }
        Ok(FiberAlgebra {
            point: m,
            critical,
            rho,
            chart_to_fiber,
            fiber_to_chart,
            frame_condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.point.dim()
    }

    /// Lift a chart direction to its fiber representation.
    pub fn tangent_to_fiber(&self, chart_dir: &[C64]) -> TangentVector {
        let fiber = self.chart_to_fiber.matvec(chart_dir);
        TangentVector {
            chart: chart_dir.to_vec(),
            fiber,
        }
    }

    /// Reconstruct the chart representation from fiber values.
    pub fn fiber_to_tangent(&self, fiber: &[C64]) -> TangentVector {
        let chart = self.fiber_to_chart.matvec(fiber);
        TangentVector {
            chart,
            fiber: fiber.to_vec(),
        }
    }

    pub fn chart_basis_vector(&self, a: usize) -> TangentVector {
        let mut chart = vec![C64::new(0.0, 0.0); self.dim()];
        chart[a] = C64::new(1.0, 0.0);
        self.tangent_to_fiber(&chart)
    }

    fn require_primitive(&self) -> Result<(), EngineError> {
        if self.rho.primitive {
            Ok(())
        } else {
            let min_value = self
                .rho
                .values_at_critical
                .iter()
                .map(|v| v.norm())
                .fold(f64::INFINITY, f64::min);
            Err(EngineError::NotPrimitive { min_value })
        }
    }

    /// Product of tangent vectors. The fibers are carried into the section
    /// model by the primitive section, multiplied there, and divided back:
    /// `(h_X r)(h_Y r)/r`. Division by the section values is what makes
    /// primitivity a genuine requirement of this code path.
    pub fn multiply(
        &self,
        x: &TangentVector,
        y: &TangentVector,
    ) -> Result<TangentVector, EngineError> {
        self.require_primitive()?;
        let r = &self.rho.values_at_critical;
        let fiber: Vec<C64> = x
            .fiber
            .iter()
            .zip(&y.fiber)
            .zip(r)
            .map(|((hx, hy), rs)| (hx * rs) * (hy * rs) / (rs * rs))
            .collect();
        Ok(self.fiber_to_tangent(&fiber))
    }

    /// The unit of the multiplication: all fiber values 1, which is the
    /// direction translating every critical value equally.
    pub fn unit_field(&self) -> TangentVector {
        let fiber = vec![C64::new(1.0, 0.0); self.dim()];
        self.fiber_to_tangent(&fiber)
    }

    /// Residue metric
    /// `eta(X, Y) = sum_s h_X(q_s) h_Y(q_s) rho(q_s)^2 / omega'(q_s)`.
    pub fn metric(&self, x: &TangentVector, y: &TangentVector) -> Result<C64, EngineError> {
        self.require_primitive()?;
        let mut acc = C64::new(0.0, 0.0);
        for s in 0..self.dim() {
            let r = self.rho.values_at_critical[s];
            acc += x.fiber[s] * y.fiber[s] * r * r / self.critical.omega_deriv[s];
        }
        Ok(acc)
    }

    /// Metric matrix over a frame of tangent vectors.
    pub fn metric_matrix(&self, frame: &[TangentVector]) -> Result<CMatrix, EngineError> {
        let n = frame.len();
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, self.metric(&frame[i], &frame[j])?);
            }
        }
        Ok(m)
    }

    /// Structure constants of the multiplication in the chart basis:
    /// `mult[c][a][b]` with `e_a o e_b = sum_c mult[c][a][b] e_c`.
    pub fn chart_multiplication_tensor(&self) -> Result<Vec<Vec<Vec<C64>>>, EngineError> {
        let d = self.dim();
        let basis: Vec<TangentVector> = (0..d).map(|a| self.chart_basis_vector(a)).collect();
        let mut out = vec![vec![vec![C64::new(0.0, 0.0); d]; d]; d];
        for a in 0..d {
            for b in 0..=a {
                let prod = self.multiply(&basis[a], &basis[b])?;
                for c in 0..d {
                    out[c][a][b] = prod.chart[c];
                    out[c][b][a] = prod.chart[c];
                }
            }
        }
        Ok(out)
    }
}

/// Matrix `M[s][A] = (d_A f)(q_s)`: exact coefficient derivatives at genus 0,
/// leaf-preserving Richardson finite differences of the critical values at
/// genus 1 (the `c0` column is exactly 1).
fn chart_fiber_matrix(
    m: &AbelianIntegral,
    cd: &CriticalData,
    cfg: &EngineConfig,
) -> Result<CMatrix, EngineError> {
    let d = m.dim();
    let mut rows = vec![vec![C64::new(0.0, 0.0); d]; d];
    match &m.data {
        CurveData::Genus0 { .. } => {
            // d f / d a_j = t^j
            for (s, &q) in cd.points.iter().enumerate() {
                let mut p = C64::new(1.0, 0.0);
                for j in 0..d {
                    rows[s][j] = p;
                    p *= q;
                }
            }
        }
        CurveData::Genus1 { .. } => {
            for col in 0..d {
                if col == d - 1 {
                    // c0 direction: f shifts uniformly
                    for row in rows.iter_mut() {
                        row[col] = C64::new(1.0, 0.0);
                    }
                    continue;
                }
                let mut dir = vec![C64::new(0.0, 0.0); d];
                dir[col] = C64::new(1.0, 0.0);
                let scale = m.chart()[col].norm().max(1.0);
                let h = cfg.fd_step * scale;
                let d1 = central_difference(m, cd, &dir, h)?;
                let d2 = central_difference(m, cd, &dir, h / 2.0)?;
                for (s, row) in rows.iter_mut().enumerate() {
                    // Richardson: (4 D(h/2) - D(h)) / 3
                    row[col] = (4.0 * d2[s] - d1[s]) / 3.0;
                }
            }
        }
    }
    Ok(CMatrix::from_rows(&rows))
}

fn central_difference(
    m: &AbelianIntegral,
    cd: &CriticalData,
    dir: &[C64],
    h: f64,
) -> Result<Vec<C64>, EngineError> {
    let eps = C64::new(h, 0.0);
    let plus = m.deform(dir, eps)?.critical_data_warm(cd)?;
    let minus = m.deform(dir, -eps)?.critical_data_warm(cd)?;
    Ok(plus
        .values
        .iter()
        .zip(&minus.values)
        .map(|(p, q)| (p - q) / (2.0 * h))
        .collect())
}
