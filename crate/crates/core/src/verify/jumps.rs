//! Flat transport in the forms-with-jumps model at genus 1, verified two
//! ways, plus the degeneration of the pairing on the isotropic direction.

use super::VerifyError;
use crate::engine::{EngineConfig, FiberAlgebra, JumpKernel};
use crate::flat::{SectionSpace, SectionTargets};
use crate::model::{AbelianIntegral, CurveData};
use crate::C64;
use std::f64::consts::PI;

#[derive(Debug)]
pub struct JumpsReport {
    /// Largest deviation of the measured cut jump from `lambda * omega`.
    pub jump_relation_defect: f64,
    /// Coefficient disagreement between the pointwise (global targets) and
    /// stepwise (local re-targeting) transports at the path end.
    pub transport_disagreement: f64,
    /// Return defect of the stepwise transport around a closed square.
    pub loop_defect: f64,
}

fn space_at(
    m: &AbelianIntegral,
    cfg: &EngineConfig,
    branch: Option<C64>,
) -> Result<(FiberAlgebra, SectionSpace), VerifyError> {
    let fa = FiberAlgebra::new(m.clone(), cfg)?;
    let space = SectionSpace::build(m, &fa, branch)?;
    Ok((fa, space))
}

/// Method A: solve the conserved data from the path start at every point.
pub fn transport_pointwise(
    path: &[AbelianIntegral],
    c0: &[C64],
    cfg: &EngineConfig,
) -> Result<Vec<Vec<C64>>, VerifyError> {
    let (_, space0) = space_at(&path[0], cfg, None)?;
    let branch = space0.x_leading;
    let targets = space0.targets_of(c0);
    let mut out = vec![c0.to_vec()];
    for (step, m) in path.iter().enumerate().skip(1) {
        let (_, space) = space_at(m, cfg, Some(branch))?;
        let c = space
            .solve_targets(&targets)
            .map_err(|e| VerifyError::SolveFailure {
                step,
                reason: e.to_string(),
            })?;
        out.push(c);
    }
    Ok(out)
}

/// Method B: carry the data forward one step at a time, so integrability is
/// exercised rather than assumed.
pub fn transport_stepwise(
    path: &[AbelianIntegral],
    c0: &[C64],
    cfg: &EngineConfig,
) -> Result<Vec<Vec<C64>>, VerifyError> {
    let (_, space0) = space_at(&path[0], cfg, None)?;
    let branch = space0.x_leading;
    let mut current = c0.to_vec();
    let mut current_targets: SectionTargets = space0.targets_of(&current);
    let mut out = vec![current.clone()];
    for (step, m) in path.iter().enumerate().skip(1) {
        let (_, space) = space_at(m, cfg, Some(branch))?;
        let c = space
            .solve_targets(&current_targets)
            .map_err(|e| VerifyError::SolveFailure {
                step,
                reason: e.to_string(),
            })?;
        current_targets = space.targets_of(&c);
        current = c;
        out.push(current.clone());
    }
    Ok(out)
}

/// Measured jump of the section across the a-cut against `lambda * omega`.
pub fn jump_relation_defect(
    m: &AbelianIntegral,
    space_coeffs: &[C64],
    cfg: &EngineConfig,
) -> Result<f64, VerifyError> {
    let CurveData::Genus1 { lattice, .. } = &m.data else {
        panic!("jumps model is genus-1 only")
    };
    let _ = cfg;
    let kernel = JumpKernel::build(m)?;
    let n = m.n;
    let lambda = space_coeffs[n];
    let density = |u: C64| -> Result<C64, VerifyError> {
        let mut v = space_coeffs[0];
        for j in 0..=(n - 2) {
            v += space_coeffs[j + 1] * lattice.wp(u, j).map_err(crate::model::ModelError::from)
                .map_err(crate::engine::EngineError::from)?;
        }
        v += lambda * kernel.density(m, u)?;
        Ok(v)
    };
    let mut defect = 0.0f64;
    for &(s, t) in &[(0.23, 0.31), (0.41, 0.17), (-0.29, 0.37), (0.11, 0.43)] {
        let u = C64::new(s, 0.0) + lattice.tau * t;
        let jump = density(u + lattice.tau)? - density(u)?;
        let want = lambda * m.omega_density(u)?;
        defect = defect.max((jump - want).norm() / (1.0 + want.norm()));
    }
    Ok(defect)
}

/// Full two-method transport comparison along a path in the moduli chart,
/// plus a closed-loop return check for the stepwise method.
pub fn jumps_flatness_check(
    m0: &AbelianIntegral,
    c0: &[C64],
    direction: usize,
    extent: f64,
    steps: usize,
    cfg: &EngineConfig,
) -> Result<JumpsReport, VerifyError> {
    let dim = m0.dim();
    let mut dir = vec![C64::new(0.0, 0.0); dim];
    dir[direction] = C64::new(1.0, 0.0);
    let path: Vec<AbelianIntegral> = (0..=steps)
        .map(|i| m0.deform(&dir, C64::new(extent * i as f64 / steps as f64, 0.0)))
        .collect::<Result<_, _>>()?;

    let a = transport_pointwise(&path, c0, cfg)?;
    let b = transport_stepwise(&path, c0, cfg)?;
    let mut disagreement = 0.0f64;
    let scale = c0.iter().map(|v| v.norm()).fold(1.0, f64::max);
    for (ca, cb) in a.iter().zip(&b) {
        for (x, y) in ca.iter().zip(cb) {
            disagreement = disagreement.max((x - y).norm() / scale);
        }
    }

    // closed square loop in two chart directions for the stepwise method
    let second = if direction == dim - 1 { 1 } else { dim - 1 };
    let mut dir2 = vec![C64::new(0.0, 0.0); dim];
    dir2[second] = C64::new(1.0, 0.0);
    let leg = extent / 2.0;
    let k = (steps / 2).max(2);
    let mut loop_path = vec![m0.clone()];
    let legs: [(usize, f64); 4] = [
        (direction, leg),
        (second, leg),
        (direction, -leg),
        (second, -leg),
    ];
    let mut current = m0.clone();
    for (axis, amount) in legs {
        let mut d = vec![C64::new(0.0, 0.0); dim];
        d[axis] = C64::new(1.0, 0.0);
        for i in 1..=k {
            let next = current.deform(&d, C64::new(amount * i as f64 / k as f64, 0.0))?;
            loop_path.push(next);
        }
        current = loop_path.last().unwrap().clone();
    }
    let looped = transport_stepwise(&loop_path, c0, cfg)?;
    let last = looped.last().unwrap();
    let mut loop_defect = 0.0f64;
    for (x, y) in last.iter().zip(c0) {
        loop_defect = loop_defect.max((x - y).norm() / scale);
    }

    let jump_relation = jump_relation_defect(&path[steps / 2], &a[steps / 2], cfg)?;
    Ok(JumpsReport {
        jump_relation_defect: jump_relation,
        transport_disagreement: disagreement,
        loop_defect,
    })
}

/// Pairing of the isotropic no-pole direction with itself.
///
/// The section with vanishing polar window, zero a-period and unit jump
/// coefficient carries the cohomology direction singled out by the a-cycles.
/// The residue theorem on the cut torus forces
/// `sum_s w_s^2 / omega'(q_s) = +- lambda^2 P_a / (2 pi i)`: the boundary
/// term is exactly the cut contribution, so the intrinsic pairing of the
/// direction with itself vanishes. Returns the deviation from the nearer
/// sign (the cut orientation is not pinned here).
pub fn isotropy_pairing_defect(
    m: &AbelianIntegral,
    cfg: &EngineConfig,
) -> Result<f64, VerifyError> {
    let CurveData::Genus1 { p_a, .. } = &m.data else {
        panic!("isotropy check is genus-1 only")
    };
    let (fa, space) = space_at(m, cfg, None)?;
    let n = m.n;
    let targets = SectionTargets {
        a_period: C64::new(0.0, 0.0),
        polar: vec![C64::new(0.0, 0.0); n - 1],
        lambda: C64::new(1.0, 0.0),
    };
    let c = space.solve_targets(&targets)?;
    let w = space.values_of(&c);
    let mut pairing = C64::new(0.0, 0.0);
    for (ws, dw) in w.iter().zip(&fa.critical.omega_deriv) {
        pairing += ws * ws / dw;
    }
    let cut_term = p_a / C64::new(0.0, 2.0 * PI);
    let d_plus = (pairing - cut_term).norm();
    let d_minus = (pairing + cut_term).norm();
    Ok(d_plus.min(d_minus) / (1.0 + cut_term.norm()))
}
