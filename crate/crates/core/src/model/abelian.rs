//! The moduli point type, leaf-coefficient solving, the differential and
//! critical data extraction.

use super::zeros::locate_zeros_genus1;
use super::ModelError;
use crate::elliptic::{integrate_polyline, Cycle, CycleKind, Lattice};
use crate::num::{poly_roots, ExpansionPoint, LaurentSeries, Polynomial, RootConfig};
use crate::C64;
use std::f64::consts::PI;

/// Curve plus integral data at a moduli point.
#[derive(Debug, Clone)]
pub enum CurveData {
    /// `f` monic of degree `n` with vanishing `t^{n-1}` coefficient; the
    /// affine maps fixing infinity are used up by this gauge.
    Genus0 { f: Polynomial },
    /// `df = (alpha + beta wp + sum_j gamma_j wp^{(j)}) du` on `C/(Z+tau Z)`,
    /// with `(alpha, beta)` solved from the prescribed periods and `c0` the
    /// additive constant of `f` at the basepoint `(1+tau)/2`.
    Genus1 {
        lattice: Lattice,
        alpha: C64,
        beta: C64,
        gammas: Vec<C64>,
        c0: C64,
        p_a: C64,
        p_b: C64,
    },
}

/// A point of the moduli leaf.
#[derive(Debug, Clone)]
pub struct AbelianIntegral {
    /// Pole order of `f` at the marked point.
    pub n: usize,
    pub data: CurveData,
}

/// Zeros of `omega`, critical values along the fixed branch, and the
/// derivative of the `omega` density at each zero.
#[derive(Debug, Clone)]
pub struct CriticalData {
    pub points: Vec<C64>,
    pub values: Vec<C64>,
    pub omega_deriv: Vec<C64>,
}

/// The unique `(alpha, beta)` giving `alpha du + beta wp du` the periods
/// `(p_a, p_b)`. The system determinant is `tau*eta1 - eta2 = 2 pi i`, so it
/// never degenerates.
pub fn solve_leaf_coefficients(lattice: &Lattice, p_a: C64, p_b: C64) -> (C64, C64) {
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    // periods of du are (1, tau); of wp du are (-eta1, -eta2)
    let alpha = (lattice.eta1 * p_b - lattice.eta2 * p_a) / two_pi_i;
    let beta = (p_b - lattice.tau * p_a) / two_pi_i;
    (alpha, beta)
}

impl AbelianIntegral {
    pub fn genus0(f: Polynomial) -> Result<Self, ModelError> {
        let n = f.degree();
        if n < 2 {
            return Err(ModelError::InvalidModel(format!(
                "need pole order n >= 2, got degree {n}"
            )));
        }
        if !f.is_monic() {
            return Err(ModelError::InvalidModel("f must be monic".into()));
        }
        if f.coeff(n - 1).norm() > 1e-12 {
            return Err(ModelError::InvalidModel(
                "t^{n-1} coefficient must vanish in the chosen gauge".into(),
            ));
        }
        Ok(AbelianIntegral {
            n,
            data: CurveData::Genus0 { f },
        })
    }

    /// Genus-0 point from the free chart coefficients `(a_0, .., a_{n-2})`.
    pub fn genus0_from_chart(n: usize, chart: &[C64]) -> Result<Self, ModelError> {
        assert_eq!(chart.len(), n - 1);
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[..(n - 1)].copy_from_slice(chart);
        coeffs[n] = C64::new(1.0, 0.0);
        AbelianIntegral::genus0(Polynomial::new(coeffs))
    }

    pub fn genus1(
        tau: C64,
        gammas: Vec<C64>,
        c0: C64,
        p_a: C64,
        p_b: C64,
    ) -> Result<Self, ModelError> {
        let n = gammas.len() + 1;
        if n < 2 {
            return Err(ModelError::InvalidModel(
                "need at least gamma_1, so pole order n >= 2".into(),
            ));
        }
        let top = gammas[n - 2];
        if top.norm() < 1e-12 {
            return Err(ModelError::InvalidModel(
                "gamma_{n-1} must be nonzero so df has pole order exactly n+1".into(),
            ));
        }
        let lattice = Lattice::new(tau, 1e-14)?;
        let (alpha, beta) = solve_leaf_coefficients(&lattice, p_a, p_b);
        Ok(AbelianIntegral {
            n,
            data: CurveData::Genus1 {
                lattice,
                alpha,
                beta,
                gammas,
                c0,
                p_a,
                p_b,
            },
        })
    }

    pub fn genus(&self) -> usize {
        match self.data {
            CurveData::Genus0 { .. } => 0,
            CurveData::Genus1 { .. } => 1,
        }
    }

    /// Chart dimension `2g + n - 1`.
    pub fn dim(&self) -> usize {
        2 * self.genus() + self.n - 1
    }

    /// Chart coordinates: `(a_0..a_{n-2})` at genus 0,
    /// `(tau, gamma_1..gamma_{n-1}, c0)` at genus 1.
    pub fn chart(&self) -> Vec<C64> {
        match &self.data {
            CurveData::Genus0 { f } => (0..self.n - 1).map(|k| f.coeff(k)).collect(),
            CurveData::Genus1 {
                lattice,
                gammas,
                c0,
                ..
            } => {
                let mut v = vec![lattice.tau];
                v.extend_from_slice(gammas);
                v.push(*c0);
                v
            }
        }
    }

    /// Density of `omega = df` with respect to `dt` (genus 0) or `du`.
    pub fn omega_density(&self, u: C64) -> Result<C64, ModelError> {
        match &self.data {
            CurveData::Genus0 { f } => Ok(f.derivative().eval(u)),
            CurveData::Genus1 {
                lattice,
                alpha,
                beta,
                gammas,
                ..
            } => {
                let mut v = *alpha + *beta * lattice.wp(u, 0)?;
                for (j, &g) in gammas.iter().enumerate() {
                    v += g * lattice.wp(u, j + 1)?;
                }
                Ok(v)
            }
        }
    }

    /// Derivative of the density in the same coordinate.
    pub fn omega_density_deriv(&self, u: C64) -> Result<C64, ModelError> {
        match &self.data {
            CurveData::Genus0 { f } => Ok(f.derivative().derivative().eval(u)),
            CurveData::Genus1 {
                lattice,
                beta,
                gammas,
                ..
            } => {
                let mut v = *beta * lattice.wp(u, 1)?;
                for (j, &g) in gammas.iter().enumerate() {
                    v += g * lattice.wp(u, j + 2)?;
                }
                Ok(v)
            }
        }
    }

    /// Laurent series of the `omega` density at the marked point (genus 1
    /// only): local parameter `u`, pole order `n+1`, no residue term.
    pub fn omega_series(&self, trunc: i32) -> LaurentSeries {
        match &self.data {
            CurveData::Genus0 { .. } => unreachable!("genus-0 omega is polynomial"),
            CurveData::Genus1 {
                lattice,
                alpha,
                beta,
                gammas,
                ..
            } => {
                let at0 = ExpansionPoint::Finite(C64::new(0.0, 0.0));
                let mut s = LaurentSeries::constant(at0, *alpha, trunc)
                    .add(&lattice.wp_series(0, trunc).scale(*beta))
                    .unwrap();
                for (j, &g) in gammas.iter().enumerate() {
                    s = s.add(&lattice.wp_series(j + 1, trunc).scale(g)).unwrap();
                }
                s
            }
        }
    }

    /// Local expansion of `f` itself at the marked point (genus 1): termwise
    /// antiderivative of the `omega` series plus the integration constant
    /// pinned by `f((1+tau)/2) = c0` along a straight (or dogleg) path.
    pub fn f_series(&self, trunc: i32) -> Result<LaurentSeries, ModelError> {
        let CurveData::Genus1 {
            lattice, c0, ..
        } = &self.data
        else {
            unreachable!("genus-0 f is polynomial")
        };
        let omega = self.omega_series(trunc - 1);
        let mut f_loc = omega.integrate(1e-30)?;
        // pin the constant term: f(u1) = c0 + int_{u0}^{u1} omega
        let u0 = (C64::new(1.0, 0.0) + lattice.tau) * 0.5;
        let u1 = C64::from_polar(0.08, 0.7);
        let path = integration_path(lattice, u0, u1)?;
        let omega_fn = |u: C64| self.omega_density(u).unwrap_or(C64::new(f64::NAN, 0.0));
        let f_u1 = *c0 + integrate_polyline(&omega_fn, &path, 1e-12)?;
        let c = f_u1 - f_loc.eval_param(u1);
        f_loc = f_loc
            .add(&LaurentSeries::constant(
                ExpansionPoint::Finite(C64::new(0.0, 0.0)),
                c,
                f_loc.truncation_order(),
            ))
            .unwrap();
        Ok(f_loc)
    }

    /// Numerically integrated `(a, b)` periods of `omega`.
    pub fn contour_periods(&self, tol: f64) -> Result<(C64, C64), ModelError> {
        let CurveData::Genus1 { lattice, .. } = &self.data else {
            return Ok((C64::new(0.0, 0.0), C64::new(0.0, 0.0)));
        };
        let omega_fn = |u: C64| self.omega_density(u).unwrap_or(C64::new(f64::NAN, 0.0));
        let a = Cycle::new(CycleKind::A, lattice);
        let b = Cycle::new(CycleKind::B, lattice);
        let pa = integrate_polyline(&omega_fn, &a.points(), tol)?;
        let pb = integrate_polyline(&omega_fn, &b.points(), tol)?;
        Ok((pa, pb))
    }

    /// All zeros of `omega` with critical values and density derivatives.
    pub fn critical_data(&self, cluster_tol: f64) -> Result<CriticalData, ModelError> {
        match &self.data {
            CurveData::Genus0 { f } => self.critical_data_genus0(f, cluster_tol),
            CurveData::Genus1 { .. } => {
                let points = locate_zeros_genus1(self)?;
                self.finish_genus1(points)
            }
        }
    }

    /// Re-solve critical data after a small deformation, polishing from the
    /// previous zeros and keeping their order (nearest-translate pairing).
    pub fn critical_data_warm(&self, prev: &CriticalData) -> Result<CriticalData, ModelError> {
        match &self.data {
            CurveData::Genus0 { f } => {
                let fresh = self.critical_data_genus0(f, 1e-6)?;
                let points = pair_to_previous(&fresh.points, &prev.points, None)?;
                self.finish_genus0(f, points)
            }
            CurveData::Genus1 { lattice, .. } => {
                let mut points = Vec::with_capacity(prev.points.len());
                for &q in &prev.points {
                    let z = self.newton_polish(q, 60)?;
                    points.push(z);
                }
                let points = pair_to_previous(&points, &prev.points, Some(lattice))?;
                // collisions after polishing mean the warm start jumped zeros
                for i in 0..points.len() {
                    for j in (i + 1)..points.len() {
                        if (points[i] - points[j]).norm() < 1e-7 {
                            return Err(ModelError::LeftSemisimpleLocus);
                        }
                    }
                }
                self.finish_genus1(points)
            }
        }
    }

    fn critical_data_genus0(
        &self,
        f: &Polynomial,
        cluster_tol: f64,
    ) -> Result<CriticalData, ModelError> {
        let df = f.derivative();
        let cfg = RootConfig {
            cluster_tol,
            ..RootConfig::default()
        };
        let roots = poly_roots(&df, &cfg)?;
        let expected = self.dim();
        if let Some((_, m)) = roots.iter().find(|(_, m)| *m >= 2) {
            let _ = m;
            let sep = min_separation(&roots.iter().map(|r| r.0).collect::<Vec<_>>());
            return Err(ModelError::NonSemisimplePoint { separation: sep });
        }
        if roots.len() != expected {
            return Err(ModelError::RootCountMismatch {
                found: roots.len(),
                expected,
            });
        }
        self.finish_genus0(f, roots.into_iter().map(|(z, _)| z).collect())
    }

    fn finish_genus0(&self, f: &Polynomial, points: Vec<C64>) -> Result<CriticalData, ModelError> {
        let ddf = f.derivative().derivative();
        let values = points.iter().map(|&q| f.eval(q)).collect();
        let omega_deriv = points.iter().map(|&q| ddf.eval(q)).collect();
        Ok(CriticalData {
            points,
            values,
            omega_deriv,
        })
    }

    fn finish_genus1(&self, points: Vec<C64>) -> Result<CriticalData, ModelError> {
        let CurveData::Genus1 { lattice, c0, .. } = &self.data else {
            unreachable!()
        };
        let u0 = (C64::new(1.0, 0.0) + lattice.tau) * 0.5;
        let omega_fn = |u: C64| self.omega_density(u).unwrap_or(C64::new(f64::NAN, 0.0));
        let mut values = Vec::with_capacity(points.len());
        let mut omega_deriv = Vec::with_capacity(points.len());
        for &q in &points {
            let path = integration_path(lattice, u0, q)?;
            let int = integrate_polyline(&omega_fn, &path, 1e-12)?;
            values.push(*c0 + int);
            omega_deriv.push(self.omega_density_deriv(q)?);
        }
        Ok(CriticalData {
            points,
            values,
            omega_deriv,
        })
    }

    pub(crate) fn newton_polish(&self, start: C64, max_iter: usize) -> Result<C64, ModelError> {
        let mut z = start;
        for _ in 0..max_iter {
            let w = self.omega_density(z)?;
            let dw = self.omega_density_deriv(z)?;
            if dw.norm() < 1e-250 {
                return Err(ModelError::LeftSemisimpleLocus);
            }
            let step = w / dw;
            z -= step;
            if step.norm() < 1e-13 {
                return Ok(z);
            }
        }
        Err(ModelError::RootCountMismatch {
            found: 0,
            expected: self.dim(),
        })
    }

    /// Perturb the chart by `eps * direction`, staying on the leaf: at genus
    /// 1 the period coefficients `(alpha, beta)` are re-solved against the
    /// same `(p_a, p_b)` so the prescribed periods are untouched.
    pub fn deform(&self, direction: &[C64], eps: C64) -> Result<AbelianIntegral, ModelError> {
        assert_eq!(direction.len(), self.dim());
        match &self.data {
            CurveData::Genus0 { .. } => {
                let chart: Vec<C64> = self
                    .chart()
                    .iter()
                    .zip(direction)
                    .map(|(a, d)| a + eps * d)
                    .collect();
                AbelianIntegral::genus0_from_chart(self.n, &chart)
            }
            CurveData::Genus1 {
                lattice,
                gammas,
                c0,
                p_a,
                p_b,
                ..
            } => {
                let tau = lattice.tau + eps * direction[0];
                let new_gammas: Vec<C64> = gammas
                    .iter()
                    .zip(&direction[1..self.n])
                    .map(|(g, d)| g + eps * d)
                    .collect();
                let new_c0 = *c0 + eps * direction[self.n];
                AbelianIntegral::genus1(tau, new_gammas, new_c0, *p_a, *p_b)
            }
        }
    }
}

/// Pole-free polyline from `from` to `to`: straight if clear of all lattice
/// points, otherwise through one deterministic sidestep waypoint.
pub fn integration_path(
    lattice: &Lattice,
    from: C64,
    to: C64,
) -> Result<Vec<C64>, ModelError> {
    const CLEARANCE: f64 = 0.04;
    let seg_clear = |a: C64, b: C64| {
        let mut d = f64::INFINITY;
        for i in 0..=48 {
            let z = a + (b - a) * (i as f64 / 48.0);
            d = d.min(lattice.lattice_distance(z));
        }
        d
    };
    // endpoints may legitimately sit near a pole (expansion points); only the
    // interior needs clearance, so measure on the trimmed segment
    let trim = |a: C64, b: C64| {
        let t0 = (0.06 / (b - a).norm()).min(0.45);
        (a + (b - a) * t0, b - (b - a) * t0)
    };
    let (ti, tf) = trim(from, to);
    if seg_clear(ti, tf) >= CLEARANCE || (to - from).norm() < 0.15 {
        return Ok(vec![from, to]);
    }
    let mid = (from + to) * 0.5;
    let dir = (to - from) / (to - from).norm();
    let perp = dir * C64::new(0.0, 1.0);
    for &s in &[0.3, -0.3, 0.55, -0.55] {
        let w = mid + perp * s;
        let (a1, b1) = trim(from, w);
        let (a2, b2) = trim(w, to);
        if seg_clear(a1, b1) >= CLEARANCE && seg_clear(a2, b2) >= CLEARANCE {
            return Ok(vec![from, w, to]);
        }
    }
    Err(ModelError::NoSafePath(seg_clear(ti, tf)))
}

/// Reorder `fresh` so that entry `i` is the one closest to `prev[i]`; at
/// genus 1 the comparison is up to lattice translates and the winner is
/// normalized to the translate nearest the previous position.
fn pair_to_previous(
    fresh: &[C64],
    prev: &[C64],
    lattice: Option<&Lattice>,
) -> Result<Vec<C64>, ModelError> {
    let dist = |a: C64, b: C64| -> (f64, C64) {
        match lattice {
            None => ((a - b).norm(), a),
            Some(l) => {
                let (red, _, _) = l.reduce(a - b);
                ((red).norm(), b + red)
            }
        }
    };
    let mut used = vec![false; fresh.len()];
    let mut out = Vec::with_capacity(prev.len());
    for &p in prev {
        let mut best: Option<(f64, usize, C64)> = None;
        for (i, &f) in fresh.iter().enumerate() {
            if used[i] {
                continue;
            }
            let (d, moved) = dist(f, p);
            if best.as_ref().is_none_or(|(bd, _, _)| d < *bd) {
                best = Some((d, i, moved));
            }
        }
        let (d, i, moved) = best.ok_or(ModelError::LeftSemisimpleLocus)?;
        if d > 0.4 {
            return Err(ModelError::LeftSemisimpleLocus);
        }
        used[i] = true;
        out.push(moved);
    }
    Ok(out)
}

fn min_separation(points: &[C64]) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            d = d.min((points[i] - points[j]).norm());
        }
    }
    d
}
