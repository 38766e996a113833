//! Numerical flat structure at genus 1.
//!
//! Sections of the fiber are represented over the basis
//! `{du, wp du, .., wp^{(n-2)} du, J}` with `J` the jump kernel. A family is
//! flat when its a-period, its jump coefficient and the `x`-expansion of its
//! polar part stay constant; transporting a section therefore means solving
//! the linear constraint system at the target point. The flat frame pulls
//! transported sections back to tangent vectors through the primitive
//! section, and flat coordinates are integrated along grid paths.

use super::FlatError;
use crate::engine::{x_series_genus1, EngineConfig, FiberAlgebra, JumpKernel, TangentVector};
use crate::model::{AbelianIntegral, CurveData};
use crate::num::{CMatrix, LaurentSeries};
use crate::C64;

/// The section space at one moduli point: basis data needed to solve
/// transport constraints and to evaluate at critical points.
pub struct SectionSpace {
    pub n: usize,
    /// a-periods of the basis elements.
    a_periods: Vec<C64>,
    /// Polar x-expansion coefficients (orders -n..-2) per basis element.
    polar: Vec<Vec<C64>>,
    /// Basis values at the critical points.
    values: Vec<Vec<C64>>,
    /// Branch witness of the x-coordinate used for the polar data.
    pub x_leading: C64,
}

/// Transport targets: the conserved data of a flat section family.
#[derive(Debug, Clone)]
pub struct SectionTargets {
    pub a_period: C64,
    /// Orders -n..-2 of the density in x.
    pub polar: Vec<C64>,
    /// Jump coefficient (of `J`), constant along flat families.
    pub lambda: C64,
}

impl SectionSpace {
    /// Build the basis data at `m`. `branch_ref` pins the x-branch to the
    /// one used at the start of a transport path.
    pub fn build(
        m: &AbelianIntegral,
        fa: &FiberAlgebra,
        branch_ref: Option<C64>,
    ) -> Result<SectionSpace, FlatError> {
        let CurveData::Genus1 { lattice, .. } = &m.data else {
            panic!("section space is a genus-1 object")
        };
        let n = m.n;
        let dim = n + 1;
        let order = (2 * n as i32 + 14).max(18);
        let x = x_series_genus1(m, order, branch_ref)?;
        let kernel = JumpKernel::build(m)?;

        let mut a_periods = Vec::with_capacity(dim);
        let mut polar = Vec::with_capacity(dim);
        let mut values = Vec::with_capacity(dim);

        let polar_window = |density_x: &LaurentSeries| -> Vec<C64> {
            (-(n as i32)..=-2).map(|o| density_x.coeff(o)).collect()
        };

        // du
        a_periods.push(C64::new(1.0, 0.0));
        let du_density = LaurentSeries::constant(
            crate::num::ExpansionPoint::Finite(C64::new(0.0, 0.0)),
            C64::new(1.0, 0.0),
            order,
        );
        polar.push(polar_window(&x.form_to_x(&du_density)?));
        values.push(vec![C64::new(1.0, 0.0); fa.critical.points.len()]);

        // wp^{(j)} du for j = 0..n-2
        for j in 0..=(n - 2) {
            a_periods.push(if j == 0 {
                -lattice.eta1
            } else {
                C64::new(0.0, 0.0)
            });
            let density = lattice.wp_series(j, order);
            polar.push(polar_window(&x.form_to_x(&density)?));
            values.push(
                fa.critical
                    .points
                    .iter()
                    .map(|&q| lattice.wp(q, j))
                    .collect::<Result<_, _>>()
                    .map_err(crate::model::ModelError::from)
                    .map_err(crate::engine::EngineError::from)?,
            );
        }

        // jump kernel
        a_periods.push(kernel.a_period);
        let jk_density = kernel.density_series(m, order.min(8))?;
        polar.push(polar_window(&x.form_to_x(&jk_density)?));
        values.push(
            fa.critical
                .points
                .iter()
                .map(|&q| kernel.density(m, q))
                .collect::<Result<_, _>>()?,
        );

        Ok(SectionSpace {
            n,
            a_periods,
            polar,
            values,
            x_leading: x.leading,
        })
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Conserved data of the section with coefficients `c`.
    pub fn targets_of(&self, c: &[C64]) -> SectionTargets {
        let dim = self.dim();
        let a_period = (0..dim).map(|i| c[i] * self.a_periods[i]).sum();
        let polar = (0..self.polar[0].len())
            .map(|r| (0..dim).map(|i| c[i] * self.polar[i][r]).sum())
            .collect();
        SectionTargets {
            a_period,
            polar,
            lambda: c[dim - 1],
        }
    }

    /// Critical-point values of the section with coefficients `c`.
    pub fn values_of(&self, c: &[C64]) -> Vec<C64> {
        let count = self.values[0].len();
        (0..count)
            .map(|s| (0..self.dim()).map(|i| c[i] * self.values[i][s]).sum())
            .collect()
    }

    /// Solve for the coefficients realizing the given conserved data at this
    /// point: the jump coefficient is pinned directly, the rest from the
    /// a-period row plus the polar window rows.
    pub fn solve_targets(&self, targets: &SectionTargets) -> Result<Vec<C64>, FlatError> {
        let dim = self.dim();
        let unknowns = dim - 1;
        let mut rows: Vec<Vec<C64>> = Vec::with_capacity(unknowns);
        let mut rhs: Vec<C64> = Vec::with_capacity(unknowns);
        // a-period row
        rows.push((0..unknowns).map(|i| self.a_periods[i]).collect());
        rhs.push(targets.a_period - targets.lambda * self.a_periods[dim - 1]);
        // polar rows
        for r in 0..self.polar[0].len() {
            rows.push((0..unknowns).map(|i| self.polar[i][r]).collect());
            rhs.push(targets.polar[r] - targets.lambda * self.polar[dim - 1][r]);
        }
        let mat = CMatrix::from_rows(&rows);
        let (sol, _resid) = mat.lstsq(&rhs)?;
        let mut c = sol;
        c.push(targets.lambda);
        Ok(c)
    }

    /// Coefficients of the section with prescribed values at the critical
    /// points (the inverse of `values_of` as a square solve).
    pub fn solve_values(&self, values: &[C64]) -> Result<Vec<C64>, FlatError> {
        let dim = self.dim();
        assert_eq!(values.len(), dim);
        let rows: Vec<Vec<C64>> = (0..dim)
            .map(|s| (0..dim).map(|i| self.values[i][s]).collect())
            .collect();
        let mat = CMatrix::from_rows(&rows);
        Ok(mat.solve(values)?)
    }
}

/// Two-axis grid in the moduli chart.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub axis_a: usize,
    pub axis_b: usize,
    pub step: f64,
    pub count_a: usize,
    pub count_b: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            axis_a: 1,
            axis_b: 0,
            step: 0.02,
            count_a: 3,
            count_b: 3,
        }
    }
}

pub struct FlatFrameGrid {
    pub spec: GridSpec,
    /// Chart coordinates of the grid points.
    pub points: Vec<Vec<Vec<C64>>>,
    /// Frame matrices `E` (columns: flat fields in the chart basis).
    pub frames: Vec<Vec<CMatrix>>,
    /// Metric in the flat frame at the base point.
    pub eta0: CMatrix,
    /// Max deviation of eta over the grid.
    pub eta_constancy_defect: f64,
    /// Max plaquette defect of the integrated coordinates.
    pub closure_defect: f64,
    /// Flat coordinates at the grid points (zero at the base).
    pub coords: Vec<Vec<Vec<C64>>>,
    /// Largest frame jump between neighbours (continuity witness).
    pub frame_continuity: f64,
}

/// Conserved data of the chart-basis frame at a base point: the section
/// images of the chart directions under the primitive section, plus the
/// x-branch witness needed to transport them elsewhere.
pub fn frame_targets(
    m0: &AbelianIntegral,
    fa0: &FiberAlgebra,
) -> Result<(Vec<SectionTargets>, C64), FlatError> {
    let dim = m0.dim();
    let space0 = SectionSpace::build(m0, fa0, None)?;
    let mut targets: Vec<SectionTargets> = Vec::with_capacity(dim);
    for a in 0..dim {
        let v = fa0.chart_basis_vector(a);
        let w: Vec<C64> = v
            .fiber
            .iter()
            .zip(&fa0.rho.values_at_critical)
            .map(|(h, r)| h * r)
            .collect();
        let c = space0.solve_values(&w)?;
        targets.push(space0.targets_of(&c));
    }
    Ok((targets, space0.x_leading))
}

/// The flat frame at `fa`'s point, transported from the given targets.
pub fn transported_frame(
    m: &AbelianIntegral,
    fa: &FiberAlgebra,
    targets: &[SectionTargets],
    branch: C64,
) -> Result<Vec<TangentVector>, FlatError> {
    let space = SectionSpace::build(m, fa, Some(branch))?;
    targets
        .iter()
        .map(|t| {
            let c = space.solve_targets(t)?;
            let w = space.values_of(&c);
            let fiber: Vec<C64> = w
                .iter()
                .zip(&fa.rho.values_at_critical)
                .map(|(wv, r)| wv / r)
                .collect();
            Ok(fa.fiber_to_tangent(&fiber))
        })
        .collect()
}

/// Construct the flat frame on a grid around `m0` by flat transport of the
/// chart frame's section images, then integrate the coframe to coordinates.
pub fn flat_frame_numeric(
    m0: &AbelianIntegral,
    cfg: &EngineConfig,
    spec: &GridSpec,
) -> Result<FlatFrameGrid, FlatError> {
    assert_eq!(m0.genus(), 1);
    let dim = m0.dim();
    let fa0 = FiberAlgebra::new(m0.clone(), cfg)?;
    let (targets, branch) = frame_targets(m0, &fa0)?;

    let node = |ka: usize, kb: usize| -> Result<(AbelianIntegral, FiberAlgebra), FlatError> {
        let mut dir = vec![C64::new(0.0, 0.0); dim];
        dir[spec.axis_a] = C64::new(1.0, 0.0);
        let m = m0.deform(&dir, C64::new(spec.step * ka as f64, 0.0))?;
        let mut dir_b = vec![C64::new(0.0, 0.0); dim];
        dir_b[spec.axis_b] = C64::new(1.0, 0.0);
        let m = m.deform(&dir_b, C64::new(spec.step * kb as f64, 0.0))?;
        let fa = FiberAlgebra::new(m.clone(), cfg)?;
        Ok((m, fa))
    };

    let mut frames: Vec<Vec<CMatrix>> = Vec::new();
    let mut points: Vec<Vec<Vec<C64>>> = Vec::new();
    let mut etas: Vec<Vec<CMatrix>> = Vec::new();
    for ka in 0..spec.count_a {
        let mut frow = Vec::new();
        let mut prow = Vec::new();
        let mut erow = Vec::new();
        for kb in 0..spec.count_b {
            let (m, fa) = node(ka, kb)?;
            let cols = transported_frame(&m, &fa, &targets, branch)?;
            let mut frame = CMatrix::zeros(dim, dim);
            for (a, v) in cols.iter().enumerate() {
                for j in 0..dim {
                    frame.set(j, a, v.chart[j]);
                }
            }
            let eta = fa.metric_matrix(&cols)?;
            frow.push(frame);
            prow.push(m.chart());
            erow.push(eta);
        }
        frames.push(frow);
        points.push(prow);
        etas.push(erow);
    }

    // eta constancy across the grid
    let eta0 = etas[0][0].clone();
    let mut eta_defect = 0.0f64;
    for row in &etas {
        for e in row {
            for a in 0..dim {
                for b in 0..dim {
                    eta_defect = eta_defect.max((e.get(a, b) - eta0.get(a, b)).norm());
                }
            }
        }
    }

    // frame continuity between neighbours
    let mut continuity = 0.0f64;
    for ka in 0..spec.count_a {
        for kb in 0..spec.count_b {
            let here = &frames[ka][kb];
            for (na, nb) in [(ka + 1, kb), (ka, kb + 1)] {
                if na < spec.count_a && nb < spec.count_b {
                    let there = &frames[na][nb];
                    for a in 0..dim {
                        for j in 0..dim {
                            continuity =
                                continuity.max((here.get(j, a) - there.get(j, a)).norm());
                        }
                    }
                }
            }
        }
    }

    // integrate the coframe: dt = E^{-1} d(chart), trapezoid along edges
    let inv: Vec<Vec<CMatrix>> = frames
        .iter()
        .map(|row| row.iter().map(|f| f.inverse().unwrap()).collect())
        .collect();
    let edge = |inv_a: &CMatrix, inv_b: &CMatrix, pa: &[C64], pb: &[C64]| -> Vec<C64> {
        let d: Vec<C64> = pa.iter().zip(pb).map(|(x, y)| y - x).collect();
        let va = inv_a.matvec(&d);
        let vb = inv_b.matvec(&d);
        va.iter().zip(&vb).map(|(x, y)| (x + y) * 0.5).collect()
    };
    let zero = vec![C64::new(0.0, 0.0); dim];
    let mut coords = vec![vec![zero.clone(); spec.count_b]; spec.count_a];
    for ka in 0..spec.count_a {
        for kb in 0..spec.count_b {
            if ka == 0 && kb == 0 {
                continue;
            }
            // path: along axis a first, then axis b
            let (pka, pkb, from) = if kb == 0 {
                (ka - 1, 0usize, coords[ka - 1][0].clone())
            } else {
                (ka, kb - 1, coords[ka][kb - 1].clone())
            };
            let step = edge(
                &inv[pka][pkb],
                &inv[ka][kb],
                &points[pka][pkb],
                &points[ka][kb],
            );
            coords[ka][kb] = from.iter().zip(&step).map(|(x, y)| x + y).collect();
        }
    }
    // plaquette closure: compare the two edge orders
    let mut closure = 0.0f64;
    for ka in 0..spec.count_a.saturating_sub(1) {
        for kb in 0..spec.count_b.saturating_sub(1) {
            let right_then_up: Vec<C64> = {
                let s1 = edge(&inv[ka][kb], &inv[ka + 1][kb], &points[ka][kb], &points[ka + 1][kb]);
                let s2 = edge(
                    &inv[ka + 1][kb],
                    &inv[ka + 1][kb + 1],
                    &points[ka + 1][kb],
                    &points[ka + 1][kb + 1],
                );
                s1.iter().zip(&s2).map(|(x, y)| x + y).collect()
            };
            let up_then_right: Vec<C64> = {
                let s1 = edge(&inv[ka][kb], &inv[ka][kb + 1], &points[ka][kb], &points[ka][kb + 1]);
                let s2 = edge(
                    &inv[ka][kb + 1],
                    &inv[ka + 1][kb + 1],
                    &points[ka][kb + 1],
                    &points[ka + 1][kb + 1],
                );
                s1.iter().zip(&s2).map(|(x, y)| x + y).collect()
            };
            for (x, y) in right_then_up.iter().zip(&up_then_right) {
                closure = closure.max((x - y).norm());
            }
        }
    }
    if closure > 1e-5 {
        return Err(FlatError::NonIntegrableFrame(closure));
    }

    Ok(FlatFrameGrid {
        spec: spec.clone(),
        points,
        frames,
        eta0,
        eta_constancy_defect: eta_defect,
        closure_defect: closure,
        coords,
        frame_continuity: continuity,
    })
}
