//! Moduli-point behaviour: leaf coefficients, critical data, deformation.

use frobpencil_core::c;
use frobpencil_core::elliptic::Lattice;
use frobpencil_core::model::{
    solve_leaf_coefficients, AbelianIntegral, ModelError,
};
use frobpencil_core::num::Polynomial;
use frobpencil_core::C64;

fn cubic_minus_3t() -> AbelianIntegral {
    // f = t^3 - 3t
    AbelianIntegral::genus0(Polynomial::new(vec![
        c(0.0, 0.0),
        c(-3.0, 0.0),
        c(0.0, 0.0),
        c(1.0, 0.0),
    ]))
    .unwrap()
}

fn sample_genus1() -> AbelianIntegral {
    AbelianIntegral::genus1(
        c(0.3, 1.1),
        vec![c(0.4, 0.1), c(1.0, 0.0)],
        c(0.2, -0.1),
        c(1.0, 0.0),
        c(2.0, 1.0),
    )
    .unwrap()
}

#[test]
fn leaf_system_reproduces_basis_periods() {
    let l = Lattice::new(c(0.3, 1.1), 1e-14).unwrap();
    let (a, b) = solve_leaf_coefficients(&l, c(0.0, 0.0), c(0.0, 0.0));
    assert!(a.norm() < 1e-14 && b.norm() < 1e-14);
    let (a, b) = solve_leaf_coefficients(&l, c(1.0, 0.0), l.tau);
    assert!((a - c(1.0, 0.0)).norm() < 1e-12 && b.norm() < 1e-12);
    let (a, b) = solve_leaf_coefficients(&l, -l.eta1, -l.eta2);
    assert!(a.norm() < 1e-12 && (b - c(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn genus0_differential_and_critical_data() {
    let m = cubic_minus_3t();
    // omega = 3(t^2 - 1) dt
    assert!((m.omega_density(c(2.0, 0.0)).unwrap() - c(9.0, 0.0)).norm() < 1e-14);
    let cd = m.critical_data(1e-6).unwrap();
    assert_eq!(cd.points.len(), 2);
    assert!((cd.points[0] - c(-1.0, 0.0)).norm() < 1e-10);
    assert!((cd.points[1] - c(1.0, 0.0)).norm() < 1e-10);
    assert!((cd.values[0] - c(2.0, 0.0)).norm() < 1e-10);
    assert!((cd.values[1] - c(-2.0, 0.0)).norm() < 1e-10);
}

#[test]
fn quartic_monomial_is_non_semisimple() {
    // f = t^4 has a triple critical point at 0
    let m = AbelianIntegral::genus0(Polynomial::new(vec![
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(1.0, 0.0),
    ]))
    .unwrap();
    assert!(matches!(
        m.critical_data(1e-6),
        Err(ModelError::NonSemisimplePoint { .. })
    ));
}

#[test]
fn genus1_periods_match_prescription() {
    let m = sample_genus1();
    let (pa, pb) = m.contour_periods(1e-11).unwrap();
    assert!((pa - c(1.0, 0.0)).norm() < 1e-8, "P_a = {pa}");
    assert!((pb - c(2.0, 1.0)).norm() < 1e-8, "P_b = {pb}");
}

#[test]
fn genus1_zero_period_leaf_forces_exact_form() {
    // with both periods zero, alpha = beta = 0 and omega = gamma_1 wp' du
    let m = AbelianIntegral::genus1(
        c(0.3, 1.1),
        vec![c(1.0, 0.0)],
        c(0.0, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
    )
    .unwrap();
    match &m.data {
        frobpencil_core::model::CurveData::Genus1 { alpha, beta, .. } => {
            assert!(alpha.norm() < 1e-14);
            assert!(beta.norm() < 1e-14);
        }
        _ => unreachable!(),
    }
}

#[test]
fn genus1_critical_count_is_n_plus_one() {
    // n = 3 means 2g + n - 1 = 4 critical points
    let m = sample_genus1();
    let cd = m.critical_data(1e-6).unwrap();
    assert_eq!(cd.points.len(), 4);
    // each located point is a genuine zero
    for &q in &cd.points {
        assert!(m.omega_density(q).unwrap().norm() < 1e-9);
    }
    // and the density derivative is nonzero (semisimple)
    for &d in &cd.omega_deriv {
        assert!(d.norm() > 1e-6);
    }
}

#[test]
fn genus1_n2_critical_count() {
    let m = AbelianIntegral::genus1(
        c(-0.2, 0.9),
        vec![c(0.7, -0.3)],
        c(0.1, 0.0),
        c(0.5, 0.2),
        c(-1.0, 0.4),
    )
    .unwrap();
    let cd = m.critical_data(1e-6).unwrap();
    assert_eq!(cd.points.len(), 3);
}

#[test]
fn omega_residue_at_pole_vanishes() {
    let m = sample_genus1();
    // closed polygon around the pole at 0: the integral is 2 pi i times the
    // residue of omega there
    let ring: Vec<C64> = (0..=48)
        .map(|k| C64::from_polar(0.3, 2.0 * std::f64::consts::PI * k as f64 / 48.0))
        .collect();
    let omega = |u: C64| m.omega_density(u).unwrap();
    let int = frobpencil_core::elliptic::integrate_polyline(&omega, &ring, 1e-11).unwrap();
    assert!(int.norm() < 1e-10, "residue integral {int}");
}

#[test]
fn deform_preserves_leaf_periods() {
    let m = sample_genus1();
    let dir = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.3, 0.2), c(0.0, 0.0)];
    let m2 = m.deform(&dir, c(0.02, 0.01)).unwrap();
    let (pa, pb) = m2.contour_periods(1e-11).unwrap();
    assert!((pa - c(1.0, 0.0)).norm() < 1e-8);
    assert!((pb - c(2.0, 1.0)).norm() < 1e-8);
    // identity deformation
    let m3 = m.deform(&dir, c(0.0, 0.0)).unwrap();
    assert_eq!(m3.chart(), m.chart());
}

#[test]
fn warm_critical_data_tracks_deformation() {
    let m = sample_genus1();
    let cd = m.critical_data(1e-6).unwrap();
    let dir = vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
    let eps = c(1e-4, 0.0);
    let m2 = m.deform(&dir, eps).unwrap();
    let cd2 = m2.critical_data_warm(&cd).unwrap();
    for (q, q2) in cd.points.iter().zip(&cd2.points) {
        assert!((q - q2).norm() < 1e-2);
    }
    // warm and cold agree up to ordering
    let cold = m2.critical_data(1e-6).unwrap();
    for q2 in &cd2.points {
        assert!(cold.points.iter().any(|&q| (q - q2).norm() < 1e-9));
    }
}

#[test]
fn genus0_values_match_independent_evaluation() {
    let m = AbelianIntegral::genus0_from_chart(
        4,
        &[c(0.3, -0.2), c(-1.0, 0.5), c(0.4, 0.1)],
    )
    .unwrap();
    let cd = m.critical_data(1e-6).unwrap();
    assert_eq!(cd.points.len(), 3);
    // recompute f(q) through an independent Horner pass
    let horner = |q: C64| {
        let ch = m.chart();
        q * q * q * q + ch[2] * q * q + ch[1] * q + ch[0]
    };
    for (q, v) in cd.points.iter().zip(&cd.values) {
        assert!((horner(*q) - v).norm() < 1e-10);
    }
}

#[test]
fn f_series_matches_path_integral() {
    let m = sample_genus1();
    let fs = m.f_series(12).unwrap();
    // independent check at a second point: integrate omega from the basepoint
    let lattice = match &m.data {
        frobpencil_core::model::CurveData::Genus1 { lattice, .. } => lattice,
        _ => unreachable!(),
    };
    let u0 = (c(1.0, 0.0) + lattice.tau) * 0.5;
    let u_test = c(0.1, 0.06);
    let omega = |u: C64| m.omega_density(u).unwrap();
    let path = frobpencil_core::model::integration_path(lattice, u0, u_test).unwrap();
    let direct = c(0.2, -0.1)
        + frobpencil_core::elliptic::integrate_polyline(&omega, &path, 1e-12).unwrap();
    let from_series = fs.eval_param(u_test);
    // near the pole both routes carry values ~1e3, so compare relatively
    assert!(
        (direct - from_series).norm() < 1e-9 * (1.0 + direct.norm()),
        "{direct} vs {from_series}"
    );
}
