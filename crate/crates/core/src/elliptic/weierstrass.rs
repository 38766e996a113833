//! Evaluation of `wp`, its derivatives and `zeta` by nome series whose
//! lattice rows are summed in closed form, plus independent row-sum oracles.

use super::{EllipticError, Lattice};
use crate::C64;
use std::f64::consts::PI;

const POLE_CLEARANCE: f64 = 1e-9;
const TERM_CUTOFF: f64 = 1e-18;
const MAX_ROWS: usize = 800;

/// Polynomials `P_j` with `(w d/dw)^j [w/(1-w)^2] = P_j(w)/(1-w)^{j+2}`.
///
/// Recurrence: `P_{j+1} = w P_j'(w)(1-w) + (j+2) w P_j(w)`.
fn log_derivative_polys(jmax: usize) -> Vec<Vec<f64>> {
    let mut polys: Vec<Vec<f64>> = vec![vec![0.0, 1.0]]; // P_0 = w
    for j in 0..jmax {
        let p = &polys[j];
        let mut next = vec![0.0; p.len() + 1];
        for (i, &a) in p.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            // w * p'(w) term: i a w^i
            next[i] += (i as f64) * a;
            // -w^2 p'(w) term
            next[i + 1] -= (i as f64) * a;
            // (j+2) w p term
            next[i + 1] += (j as f64 + 2.0) * a;
        }
        polys.push(next);
    }
    polys
}

fn eval_poly(p: &[f64], y: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &a in p.iter().rev() {
        acc = acc * y + a;
    }
    acc
}

/// `(w d/dw)^j [y/(1-y)^2]` evaluated at `y`.
fn dj_r(polys: &[Vec<f64>], j: usize, y: C64) -> C64 {
    let one = C64::new(1.0, 0.0);
    eval_poly(&polys[j], y) / (one - y).powi(j as i32 + 2)
}

impl Lattice {
    /// `wp^{(j)}(u)`: the Weierstrass function for `j = 0`, its derivatives
    /// for `j >= 1`.
    pub fn wp(&self, u: C64, j: usize) -> Result<C64, EllipticError> {
        let (u_red, _, _) = self.reduce(u);
        let d = self.lattice_distance(u);
        if d < POLE_CLEARANCE {
            return Err(EllipticError::PoleAtLatticePoint(d));
        }
        let polys = log_derivative_polys(j);
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        let w = (two_pi_i * u_red).exp();
        let winv = C64::new(1.0, 0.0) / w;

        let mut sum = dj_r(&polys, j, w);
        if j == 0 {
            sum += C64::new(1.0 / 12.0, 0.0);
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let mut qn = C64::new(1.0, 0.0);
        for _n in 1..=MAX_ROWS {
            qn *= self.q;
            let t1 = dj_r(&polys, j, qn * w);
            let t2 = dj_r(&polys, j, qn * winv) * sign;
            let mut term = t1 + t2;
            if j == 0 {
                term -= 2.0 * dj_r(&polys, 0, qn);
            }
            sum += term;
            if term.norm() < TERM_CUTOFF * (1.0 + sum.norm()) && qn.norm() < 1e-12 {
                break;
            }
        }
        Ok(two_pi_i.powi(j as i32 + 2) * sum)
    }

    /// Weierstrass zeta, quasi-periodic with increments `eta1`, `eta2`.
    pub fn zeta(&self, u: C64) -> Result<C64, EllipticError> {
        let (u_red, k, m) = self.reduce(u);
        let d = self.lattice_distance(u);
        if d < POLE_CLEARANCE {
            return Err(EllipticError::PoleAtLatticePoint(d));
        }
        let two_pi_i = C64::new(0.0, 2.0 * PI);
        let w = (two_pi_i * u_red).exp();
        let winv = C64::new(1.0, 0.0) / w;
        let one = C64::new(1.0, 0.0);

        let mut sum = one / (one - w);
        let mut qn = C64::new(1.0, 0.0);
        for _n in 1..=MAX_ROWS {
            qn *= self.q;
            let term = one / (one - qn * w) - one / (one - qn * winv);
            sum += term;
            if term.norm() < TERM_CUTOFF * (1.0 + sum.norm()) && qn.norm() < 1e-12 {
                break;
            }
        }
        let base = self.eta1 * u_red + C64::new(0.0, PI) - two_pi_i * sum;
        Ok(base + self.eta1 * k as f64 + self.eta2 * m as f64)
    }
}

/// Modular invariants by lattice-row sums: each row `m + n*tau` (fixed `n`)
/// is summed over `m` in closed trigonometric form, and rows are accumulated
/// up to `rows`. Independent of the nome series used by `Lattice::new`.
pub fn g_invariants_row_sum(tau: C64, rows: usize) -> (C64, C64) {
    let zeta4 = PI.powi(4) / 90.0;
    let zeta6 = PI.powi(6) / 945.0;
    let mut g4 = C64::new(2.0 * zeta4, 0.0);
    let mut g6 = C64::new(2.0 * zeta6, 0.0);
    for n in 1..=rows {
        let c = tau * n as f64;
        g4 += 2.0 * row_sum_4(c);
        g6 += 2.0 * row_sum_6(c);
    }
    (g4 * 60.0, g6 * 140.0)
}

/// `sum_m 1/(m+c)^4 = (pi^4/3)(1+u^2)(1+3u^2)` with `u = cot(pi c)`.
fn row_sum_4(c: C64) -> C64 {
    let u = (PI * c).cos() / (PI * c).sin();
    let u2 = u * u;
    let one = C64::new(1.0, 0.0);
    (one + u2) * (one + 3.0 * u2) * (PI.powi(4) / 3.0)
}

/// `sum_m 1/(m+c)^6 = (pi^6/60)(1+u^2)(8+60u^2+60u^4)`.
fn row_sum_6(c: C64) -> C64 {
    let u = (PI * c).cos() / (PI * c).sin();
    let u2 = u * u;
    let one = C64::new(1.0, 0.0);
    (one + u2) * (C64::new(8.0, 0.0) + 60.0 * u2 + 60.0 * u2 * u2) * (PI.powi(6) / 60.0)
}

/// `wp(u)` as a cosecant row sum, the oracle for the nome-series evaluator.
pub fn wp_row_sum(tau: C64, u: C64, rows: usize) -> C64 {
    let cosec2 = |z: C64| {
        let s = (PI * z).sin();
        C64::new(PI * PI, 0.0) / (s * s)
    };
    let mut sum = cosec2(u) - PI * PI / 3.0;
    for n in 1..=rows {
        let shift = tau * n as f64;
        sum += cosec2(u - shift) + cosec2(u + shift) - 2.0 * cosec2(shift);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::c;
    use rand::{Rng, SeedableRng};

    fn sample_u(rng: &mut impl Rng, tau: C64) -> C64 {
        // away from lattice points
        loop {
            let s = rng.gen_range(-0.45..0.45);
            let t = rng.gen_range(-0.45..0.45);
            let u = c(s, 0.0) + tau * t;
            if (s.abs() > 0.08 || t.abs() > 0.08) && u.norm() > 0.1 {
                return u;
            }
        }
    }

    #[test]
    fn differential_equation_and_symmetries() {
        let l = Lattice::new(c(0.3, 1.1), 1e-14).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let u = sample_u(&mut rng, l.tau);
            let p = l.wp(u, 0).unwrap();
            let p1 = l.wp(u, 1).unwrap();
            // evenness
            assert!((p - l.wp(-u, 0).unwrap()).norm() < 1e-10);
            // (wp')^2 = 4 wp^3 - g2 wp - g3
            let lhs = p1 * p1;
            let rhs = 4.0 * p * p * p - l.g2 * p - l.g3;
            assert!(
                (lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()),
                "ODE defect {}",
                (lhs - rhs).norm()
            );
            // periodicity in both directions
            assert!((p - l.wp(u + c(1.0, 0.0), 0).unwrap()).norm() < 1e-10);
            assert!((p - l.wp(u + l.tau, 0).unwrap()).norm() < 1e-10);
        }
    }

    #[test]
    fn zeta_oddness_and_quasi_periods() {
        let l = Lattice::new(c(-0.21, 0.9), 1e-14).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let u = sample_u(&mut rng, l.tau);
            let z = l.zeta(u).unwrap();
            assert!((z + l.zeta(-u).unwrap()).norm() < 1e-10);
            assert!((l.zeta(u + c(1.0, 0.0)).unwrap() - z - l.eta1).norm() < 1e-10);
            assert!((l.zeta(u + l.tau).unwrap() - z - l.eta2).norm() < 1e-10);
        }
        // eta1 = 2 zeta(1/2)
        assert!((l.eta1 - 2.0 * l.zeta(c(0.5, 0.0)).unwrap()).norm() < 1e-11);
        assert!((l.eta2 - 2.0 * l.zeta(l.tau * 0.5).unwrap()).norm() < 1e-11);
    }

    #[test]
    fn zeta_derivative_is_minus_wp() {
        let l = Lattice::new(c(0.1, 1.3), 1e-14).unwrap();
        let u = c(0.31, 0.22);
        let h = 1e-5;
        let d = (l.zeta(u + c(h, 0.0)).unwrap() - l.zeta(u - c(h, 0.0)).unwrap()) / (2.0 * h);
        assert!((d + l.wp(u, 0).unwrap()).norm() < 1e-7);
    }

    #[test]
    fn invariants_match_row_sum_oracle() {
        let l = Lattice::new(c(0.3, 1.1), 1e-14).unwrap();
        let (g2, g3) = g_invariants_row_sum(l.tau, 60);
        assert!((l.g2 - g2).norm() < 1e-10, "g2 defect {}", (l.g2 - g2).norm());
        assert!((l.g3 - g3).norm() < 1e-10, "g3 defect {}", (l.g3 - g3).norm());
    }

    #[test]
    fn wp_matches_row_sum_oracle_randomized() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let tau = c(rng.gen_range(-0.4..0.4), rng.gen_range(0.8..1.6));
            let l = Lattice::new(tau, 1e-14).unwrap();
            for _ in 0..100 {
                let u = sample_u(&mut rng, tau);
                let a = l.wp(u, 0).unwrap();
                let b = wp_row_sum(tau, u, 40);
                assert!(
                    (a - b).norm() < 1e-10 * (1.0 + a.norm()),
                    "tau {tau}, u {u}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn higher_derivatives_match_finite_differences() {
        let l = Lattice::new(c(0.2, 1.0), 1e-14).unwrap();
        let u = c(0.27, 0.41);
        for j in 1..=4usize {
            let h = 1e-4;
            let fd = (l.wp(u + c(h, 0.0), j - 1).unwrap() - l.wp(u - c(h, 0.0), j - 1).unwrap())
                / (2.0 * h);
            let ex = l.wp(u, j).unwrap();
            assert!(
                (fd - ex).norm() < 1e-5 * (1.0 + ex.norm()),
                "j={j}: {fd} vs {ex}"
            );
        }
    }

    #[test]
    fn wp_series_matches_evaluation_near_origin() {
        let l = Lattice::new(c(0.3, 1.1), 1e-14).unwrap();
        let s = l.wp_series(0, 12);
        let u = c(0.05, 0.03);
        let from_series = s.eval_param(u);
        let direct = l.wp(u, 0).unwrap();
        assert!((from_series - direct).norm() < 1e-11 * direct.norm());
        // zeta series too
        let zs = l.zeta_series(13);
        let z = l.zeta(u).unwrap();
        assert!((zs.eval_param(u) - z).norm() < 1e-11 * z.norm());
    }
}
