//! Polynomial root finding: Aberth–Ehrlich simultaneous iteration with a
//! companion-matrix eigenvalue fallback, plus cluster-based multiplicity
//! detection.

use super::{coeff_scale, NumError, Polynomial};
use crate::C64;
use num_traits::Zero;

#[derive(Debug, Clone, Copy)]
pub struct RootConfig {
    /// Residual target relative to the coefficient scale.
    pub tol: f64,
    /// Roots closer than `cluster_tol * scale` are merged into one root with
    /// combined multiplicity. Detecting multiple zeros is load-bearing for
    /// rejecting non-semisimple points, so this is a first-class knob.
    pub cluster_tol: f64,
    pub max_iter: usize,
    /// Hard cap on the degree accepted by the solver.
    pub degree_cap: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        RootConfig {
            tol: 1e-12,
            cluster_tol: 1e-6,
            max_iter: 200,
            degree_cap: 64,
        }
    }
}

/// All roots of `p`, clustered into `(root, multiplicity)` pairs.
///
/// The residual contract is `|p(r)| <= tol * scale` with `scale` the largest
/// coefficient magnitude; clustered roots are reported at the cluster mean.
pub fn poly_roots(p: &Polynomial, cfg: &RootConfig) -> Result<Vec<(C64, usize)>, NumError> {
    if p.is_zero() {
        return Err(NumError::ZeroPolynomial);
    }
    let n = p.degree();
    if n > cfg.degree_cap {
        return Err(NumError::DegreeCap(n, cfg.degree_cap));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let roots = match aberth(p, cfg) {
        Ok(r) => r,
        Err(_) => companion_roots(p, cfg)?,
    };
    Ok(cluster(&roots, cfg, p))
}

fn aberth(p: &Polynomial, cfg: &RootConfig) -> Result<Vec<C64>, NumError> {
    let n = p.degree();
    let dp = p.derivative();
    let scale = coeff_scale(p.coeffs());

    // initial guesses on a circle of the Cauchy-bound radius, de-symmetrized
    let lead = p.leading();
    let radius = 1.0
        + p.coeffs()[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.43;
            C64::from_polar(radius * 0.8, theta)
        })
        .collect();

    for _ in 0..cfg.max_iter {
        let mut max_step = 0.0f64;
        let snapshot = z.clone();
        for i in 0..n {
            let pv = p.eval(snapshot[i]);
            let dv = dp.eval(snapshot[i]);
            if pv.is_zero() {
                continue;
            }
            let newton = if dv.is_zero() {
                C64::new(1e-8, 1e-8)
            } else {
                pv / dv
            };
            let mut rep = C64::zero();
            for (j, &zj) in snapshot.iter().enumerate() {
                if j != i {
                    let d = snapshot[i] - zj;
                    if d.norm() > 1e-300 {
                        rep += C64::new(1.0, 0.0) / d;
                    }
                }
            }
            let denom = C64::new(1.0, 0.0) - newton * rep;
            let step = if denom.norm() < 1e-14 {
                newton
            } else {
                newton / denom
            };
            z[i] -= step;
            if !z[i].re.is_finite() || !z[i].im.is_finite() {
                return Err(NumError::NonConvergence(cfg.max_iter));
            }
            max_step = max_step.max(step.norm());
        }
        if max_step < cfg.tol {
            // final Newton polish against the original polynomial
            for zi in z.iter_mut() {
                for _ in 0..3 {
                    let dv = dp.eval(*zi);
                    if dv.norm() < 1e-280 {
                        break;
                    }
                    *zi -= p.eval(*zi) / dv;
                }
            }
            let worst = z.iter().map(|&r| p.eval(r).norm()).fold(0.0, f64::max);
            // near a multiple root the residual scales like tol^m; accept a
            // relaxed bound and let clustering sort multiplicities out
            if worst <= (cfg.tol * scale).max(1e-10 * scale) {
                return Ok(z);
            }
            return Err(NumError::NonConvergence(cfg.max_iter));
        }
    }
    Err(NumError::NonConvergence(cfg.max_iter))
}

/// Eigenvalues of the companion matrix, used when the iteration stalls.
fn companion_roots(p: &Polynomial, cfg: &RootConfig) -> Result<Vec<C64>, NumError> {
    use nalgebra::DMatrix;
    let n = p.degree();
    let lead = p.leading();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeff(i) / lead;
    }
    let schur = m
        .try_schur(1e-14, 10_000)
        .ok_or(NumError::NonConvergence(cfg.max_iter))?;
    let t = schur.unpack().1;
    let mut roots: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let dp = p.derivative();
    for r in roots.iter_mut() {
        for _ in 0..3 {
            let dv = dp.eval(*r);
            if dv.norm() < 1e-280 {
                break;
            }
            *r -= p.eval(*r) / dv;
        }
    }
    Ok(roots)
}

fn cluster(roots: &[C64], cfg: &RootConfig, p: &Polynomial) -> Vec<(C64, usize)> {
    let scale = coeff_scale(p.coeffs()).max(
        roots.iter().map(|r| r.norm()).fold(0.0, f64::max),
    );
    let thresh = cfg.cluster_tol * scale;
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![roots[i]];
        used[i] = true;
        for j in (i + 1)..roots.len() {
            if !used[j] && (roots[j] - roots[i]).norm() < thresh {
                members.push(roots[j]);
                used[j] = true;
            }
        }
        let mean = members.iter().sum::<C64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    // deterministic output order
    out.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out
}
