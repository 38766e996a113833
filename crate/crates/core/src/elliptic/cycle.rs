//! Homology cycle representatives on the torus and their contour periods.

use super::quad::integrate_polyline;
use super::{EllipticError, Lattice};
use crate::C64;

/// Fixed base-point offset of the cycle representatives. Chosen once so all
/// runs integrate along the same pole-free paths.
pub const A_CYCLE_OFFSET: C64 = C64::new(0.17, 0.13);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    A,
    B,
}

/// A straight-segment representative of an `a` or `b` cycle: from the fixed
/// offset to offset+1 (class of `[0,1]`) or offset+tau.
#[derive(Debug, Clone)]
pub struct Cycle {
    pub kind: CycleKind,
    pub start: C64,
    pub end: C64,
}

impl Cycle {
    pub fn new(kind: CycleKind, lattice: &Lattice) -> Self {
        let start = A_CYCLE_OFFSET;
        let end = match kind {
            CycleKind::A => start + C64::new(1.0, 0.0),
            CycleKind::B => start + lattice.tau,
        };
        Cycle { kind, start, end }
    }

    pub fn points(&self) -> Vec<C64> {
        vec![self.start, self.end]
    }

    /// Minimum distance of the segment to any lattice point.
    pub fn lattice_clearance(&self, lattice: &Lattice) -> f64 {
        let mut d = f64::INFINITY;
        let n = 64;
        for i in 0..=n {
            let z = self.start + (self.end - self.start) * (i as f64 / n as f64);
            d = d.min(lattice.lattice_distance(z));
        }
        d
    }
}

/// Contour period `\oint_c form` by adaptive quadrature; `form` is the
/// density with respect to `du`.
pub fn contour_period<F: Fn(C64) -> C64>(
    lattice: &Lattice,
    form: &F,
    cycle: &Cycle,
    abs_tol: f64,
) -> Result<C64, EllipticError> {
    let clearance = cycle.lattice_clearance(lattice);
    if clearance < 0.02 {
        return Err(EllipticError::PoleOnPath(clearance));
    }
    integrate_polyline(form, &cycle.points(), abs_tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn du_periods_are_one_and_tau() {
        let l = Lattice::new(c(0.3, 1.1), 1e-14).unwrap();
        let a = Cycle::new(CycleKind::A, &l);
        let b = Cycle::new(CycleKind::B, &l);
        let one = contour_period(&l, &|_| c(1.0, 0.0), &a, 1e-12).unwrap();
        let tau = contour_period(&l, &|_| c(1.0, 0.0), &b, 1e-12).unwrap();
        assert!((one - c(1.0, 0.0)).norm() < 1e-12);
        assert!((tau - l.tau).norm() < 1e-12);
    }

    #[test]
    fn wp_periods_are_quasi_periods() {
        // antiderivative of wp is -zeta, so the a-period is -eta1
        let l = Lattice::new(c(0.3, 1.1), 1e-14).unwrap();
        let a = Cycle::new(CycleKind::A, &l);
        let b = Cycle::new(CycleKind::B, &l);
        let f = |u: C64| l.wp(u, 0).unwrap();
        let pa = contour_period(&l, &f, &a, 1e-11).unwrap();
        let pb = contour_period(&l, &f, &b, 1e-11).unwrap();
        assert!((pa + l.eta1).norm() < 1e-8, "a-period {} vs {}", pa, -l.eta1);
        assert!((pb + l.eta2).norm() < 1e-8);
    }

    #[test]
    fn exact_forms_have_zero_periods() {
        let l = Lattice::new(c(-0.2, 0.9), 1e-14).unwrap();
        for j in 1..=3usize {
            // wp^{(j)} = d(wp^{(j-1)})/du is exact
            let f = |u: C64| l.wp(u, j).unwrap();
            for kind in [CycleKind::A, CycleKind::B] {
                let cyc = Cycle::new(kind, &l);
                let p = contour_period(&l, &f, &cyc, 1e-11).unwrap();
                assert!(p.norm() < 1e-8, "j={j}: period {p}");
            }
        }
    }
}
