//! Lattice data for `Z + tau Z`: modular invariants, quasi-periods and the
//! Laurent coefficients of the Weierstrass function at the origin.

use super::EllipticError;
use crate::num::{ExpansionPoint, LaurentSeries};
use crate::C64;
use std::f64::consts::PI;

/// Immutable lattice data. `eta1`, `eta2` are the increments of the
/// Weierstrass zeta function under `u -> u+1` and `u -> u+tau`; they satisfy
/// the Legendre relation `eta1*tau - eta2 = 2*pi*i`.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub tau: C64,
    /// Nome `exp(2 pi i tau)`.
    pub q: C64,
    pub g2: C64,
    pub g3: C64,
    pub eta1: C64,
    pub eta2: C64,
    /// Eisenstein E2 (quasi-modular), kept for diagnostics.
    pub e2: C64,
    /// Coefficients `c_k` of `wp(u) = u^-2 + sum_{k>=2} c_k u^{2k-2}`.
    wp_taylor: Vec<C64>,
}

impl Lattice {
    /// Build the lattice for `tau`; series are summed until the tail bound
    /// drops below `precision`.
    pub fn new(tau: C64, precision: f64) -> Result<Self, EllipticError> {
        if tau.im <= 0.0 {
            return Err(EllipticError::LowerHalfPlane(tau.im));
        }
        let q = (C64::new(0.0, 2.0 * PI) * tau).exp();
        let qn = q.norm();
        let tol = precision.min(1e-12).max(1e-18);
        // |term_k| <= k^5 |q|^k for E6, the worst of the three
        let kmax = {
            let mut k = 8usize;
            while (k as f64).powi(5) * qn.powf(k as f64) > tol && k < 2000 {
                k += 8;
            }
            k + 8
        };

        let (mut e2, mut e4, mut e6) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0));
        let sigmas = divisor_sums(kmax);
        let mut qk = C64::new(1.0, 0.0);
        for k in 1..=kmax {
            qk *= q;
            let (s1, s3, s5) = sigmas[k];
            e2 -= 24.0 * s1 * qk;
            e4 += 240.0 * s3 * qk;
            e6 -= 504.0 * s5 * qk;
        }

        let pi2 = PI * PI;
        let g2 = e4 * (4.0 / 3.0) * pi2 * pi2;
        let g3 = e6 * (8.0 / 27.0) * pi2 * pi2 * pi2;
        let eta1 = e2 * (pi2 / 3.0);
        let eta2 = eta1 * tau - C64::new(0.0, 2.0 * PI);

        let wp_taylor = wp_taylor_coeffs(g2, g3, 40);

        Ok(Lattice {
            tau,
            q,
            g2,
            g3,
            eta1,
            eta2,
            e2,
            wp_taylor,
        })
    }

    /// `eta1*tau - eta2 - 2*pi*i`, which should be zero; kept as an explicit
    /// health check because everything downstream leans on it.
    pub fn legendre_defect(&self) -> f64 {
        (self.eta1 * self.tau - self.eta2 - C64::new(0.0, 2.0 * PI)).norm()
    }

    /// Reduce `u` to the centered fundamental cell, returning the reduced
    /// point and the integer shifts `(k, m)` with `u = u_red + k + m*tau`.
    pub fn reduce(&self, u: C64) -> (C64, i64, i64) {
        let t = u.im / self.tau.im;
        let s = u.re - t * self.tau.re;
        let m = t.round() as i64;
        let k = s.round() as i64;
        let u_red = u - C64::new(k as f64, 0.0) - self.tau * m as f64;
        (u_red, k, m)
    }

    /// Distance from `u` to the nearest lattice point.
    pub fn lattice_distance(&self, u: C64) -> f64 {
        let (u_red, _, _) = self.reduce(u);
        // the centered cell might not contain the nearest translate for very
        // skew tau; checking the 9 neighbours settles it
        let mut d = f64::INFINITY;
        for k in -1..=1 {
            for m in -1..=1 {
                let p = u_red - C64::new(k as f64, 0.0) - self.tau * m as f64;
                d = d.min(p.norm());
            }
        }
        d
    }

    /// Taylor coefficients `c_k`, `k >= 2`, of `wp` at the origin.
    pub fn wp_taylor(&self) -> &[C64] {
        &self.wp_taylor
    }

    /// Laurent series of `wp^{(j)}` at the origin certified through `trunc`.
    pub fn wp_series(&self, j: usize, trunc: i32) -> LaurentSeries {
        let at0 = ExpansionPoint::Finite(C64::new(0.0, 0.0));
        let mut s = LaurentSeries::zero(at0, -2, trunc.max(-2));
        // wp = u^-2 + sum c_k u^{2k-2}
        if -2 <= trunc {
            s = s
                .add(&LaurentSeries::monomial(at0, C64::new(1.0, 0.0), -2, trunc))
                .unwrap();
        }
        for (k, &c) in self.wp_taylor.iter().enumerate() {
            let pow = 2 * (k as i32 + 2) - 2;
            if pow <= trunc {
                s = s
                    .add(&LaurentSeries::monomial(at0, c, pow, trunc))
                    .unwrap();
            }
        }
        let mut out = s;
        for _ in 0..j {
            out = out.differentiate();
        }
        out
    }

    /// Laurent series of the zeta function at the origin (odd, `1/u` leading).
    pub fn zeta_series(&self, trunc: i32) -> LaurentSeries {
        // zeta' = -wp, no residue term
        let wp = self.wp_series(0, trunc - 1);
        let mut z = wp.scale(C64::new(-1.0, 0.0)).integrate(0.0).unwrap();
        // integration maps u^-2 to u^-1 correctly; constant term is zero by
        // oddness, which termwise integration already produces
        z = z.truncate(trunc.min(z.truncation_order()));
        z
    }
}

/// `(sigma1, sigma3, sigma5)` for 1..=n, sieve-style.
fn divisor_sums(n: usize) -> Vec<(f64, f64, f64)> {
    let mut out = vec![(0.0, 0.0, 0.0); n + 1];
    for d in 1..=n {
        let d1 = d as f64;
        let d3 = d1 * d1 * d1;
        let d5 = d3 * d1 * d1;
        let mut k = d;
        while k <= n {
            out[k].0 += d1;
            out[k].1 += d3;
            out[k].2 += d5;
            k += d;
        }
    }
    out
}

/// Recurrence for the Laurent coefficients of `wp` at 0.
fn wp_taylor_coeffs(g2: C64, g3: C64, count: usize) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); count + 2];
    if count >= 1 {
        c[2] = g2 / 20.0;
    }
    if count >= 2 {
        c[3] = g3 / 28.0;
    }
    for k in 4..count + 2 {
        let mut s = C64::new(0.0, 0.0);
        for m in 2..=(k - 2) {
            s += c[m] * c[k - m];
        }
        c[k] = s * 3.0 / ((2 * k + 1) as f64 * (k - 3) as f64);
    }
    c[2..].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;

    #[test]
    fn square_lattice_has_zero_g3() {
        let l = Lattice::new(c(0.0, 1.0), 1e-14).unwrap();
        assert!(l.g3.norm() < 1e-10, "g3 = {}", l.g3);
        assert!(l.legendre_defect() < 1e-10);
    }

    #[test]
    fn hexagonal_lattice_has_zero_g2() {
        let tau = C64::from_polar(1.0, std::f64::consts::PI / 3.0);
        let l = Lattice::new(tau, 1e-14).unwrap();
        assert!(l.g2.norm() < 1e-10, "g2 = {}", l.g2);
        assert!(l.legendre_defect() < 1e-10);
    }

    #[test]
    fn lower_half_plane_rejected() {
        assert!(Lattice::new(c(0.3, -1.0), 1e-12).is_err());
    }

    #[test]
    fn reduction_and_distance() {
        let l = Lattice::new(c(0.3, 1.1), 1e-14).unwrap();
        let u = c(5.2, 3.4);
        let (u_red, k, m) = l.reduce(u);
        let back = u_red + c(k as f64, 0.0) + l.tau * m as f64;
        assert!((back - u).norm() < 1e-12);
        assert!(l.lattice_distance(c(0.0, 0.0)) < 1e-14);
        assert!(l.lattice_distance(c(0.5, 0.0)) > 0.4);
    }
}
