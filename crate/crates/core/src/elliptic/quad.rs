//! Adaptive Gauss–Kronrod quadrature for complex line integrals along
//! polyline contours. Periods feed linear solves downstream, so every
//! integral carries an error estimate checked against the requested
//! tolerance.

use super::EllipticError;
use crate::C64;

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// One Gauss–Kronrod pass over the straight segment `[a, b]`, returning the
/// Kronrod value, the |K - G| error estimate and the integral of |f|.
fn gk15<F: Fn(C64) -> C64>(f: &F, a: C64, b: C64) -> (C64, f64, f64) {
    let center = (a + b) * 0.5;
    let half = (b - a) * 0.5;
    let fc = f(center);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut resabs = fc.norm() * WGK[7];
    for (i, &x) in XGK.iter().enumerate().take(7) {
        let dz = half * x;
        let fp = f(center + dz);
        let fm = f(center - dz);
        kron += (fp + fm) * WGK[i];
        resabs += (fp.norm() + fm.norm()) * WGK[i];
        if i % 2 == 1 {
            gauss += (fp + fm) * WG[i / 2];
        }
    }
    let kron = kron * half;
    let gauss = gauss * half;
    (kron, (kron - gauss).norm(), resabs * half.norm())
}

/// Integrate `f` along the straight segment `[a, b]` to absolute tolerance.
pub fn integrate_segment<F: Fn(C64) -> C64>(
    f: &F,
    a: C64,
    b: C64,
    abs_tol: f64,
) -> Result<C64, EllipticError> {
    let mut stack = vec![(a, b, 0usize)];
    let mut total = C64::new(0.0, 0.0);
    let mut err_total = 0.0;
    let mut resabs_total = 0.0;
    let mut leaves = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (val, err, resabs) = gk15(f, lo, hi);
        let frac = ((hi - lo).norm() / (b - a).norm()).max(1e-3);
        // roundoff floor: below ~50 eps of the magnitude integral no estimate
        // is meaningful, so do not split further
        let floor = 50.0 * f64::EPSILON * resabs;
        if err <= (abs_tol * frac).max(floor) || depth >= 30 {
            if depth >= 30 && err > (abs_tol * frac).max(floor) * 100.0 {
                return Err(EllipticError::QuadratureFailure {
                    tol: abs_tol,
                    err,
                });
            }
            total += val;
            err_total += err;
            resabs_total += resabs;
            leaves += 1;
            if leaves > 200_000 {
                return Err(EllipticError::QuadratureFailure {
                    tol: abs_tol,
                    err: err_total,
                });
            }
        } else {
            let mid = (lo + hi) * 0.5;
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
    }
    let budget = abs_tol.max(500.0 * f64::EPSILON * resabs_total) * 10.0;
    if err_total > budget {
        return Err(EllipticError::QuadratureFailure {
            tol: abs_tol,
            err: err_total,
        });
    }
    Ok(total)
}

/// Integrate along the polyline through `points`.
pub fn integrate_polyline<F: Fn(C64) -> C64>(
    f: &F,
    points: &[C64],
    abs_tol: f64,
) -> Result<C64, EllipticError> {
    assert!(points.len() >= 2, "polyline needs at least two points");
    let mut total = C64::new(0.0, 0.0);
    let per_edge = abs_tol / (points.len() - 1) as f64;
    for seg in points.windows(2) {
        total += integrate_segment(f, seg[0], seg[1], per_edge)?;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn polynomial_segment_is_exact() {
        let f = |z: C64| z * z * z - 2.0 * z + c(0.0, 1.0);
        let a = c(-1.0, 0.5);
        let b = c(2.0, -0.3);
        let val = integrate_segment(&f, a, b, 1e-12).unwrap();
        // antiderivative z^4/4 - z^2 + i z
        let anti = |z: C64| z.powi(4) / 4.0 - z * z + c(0.0, 1.0) * z;
        assert!((val - (anti(b) - anti(a))).norm() < 1e-12);
    }

    #[test]
    fn residue_of_one_over_z_on_a_square() {
        let f = |z: C64| 1.0 / z;
        let pts = [c(1.0, -1.0), c(1.0, 1.0), c(-1.0, 1.0), c(-1.0, -1.0), c(1.0, -1.0)];
        let val = integrate_polyline(&f, &pts, 1e-12).unwrap();
        assert!((val - c(0.0, 2.0 * std::f64::consts::PI)).norm() < 1e-10);
    }
}
