//! Primitive sections and the fiber algebra: frozen low-genus values plus
//! cross-route checks (exact coefficient derivatives against leaf-preserving
//! finite differences).

use frobpencil_core::c;
use frobpencil_core::engine::{
    EngineConfig, FiberAlgebra, JumpKernel, PrimitiveSection, SectionCoeffs,
};
use frobpencil_core::model::AbelianIntegral;
use frobpencil_core::num::{puiseux_inverse_root, LaurentSeries, Polynomial};
use frobpencil_core::C64;

fn cubic() -> AbelianIntegral {
    // f = t^3 - 3t
    AbelianIntegral::genus0_from_chart(3, &[c(0.0, 0.0), c(-3.0, 0.0)]).unwrap()
}

fn genus1_point() -> AbelianIntegral {
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
fn puiseux_root_of_pure_power_is_exact() {
    // f = t^4: x = 1/t with no corrections
    let f = Polynomial::monomial(c(1.0, 0.0), 4);
    let x = puiseux_inverse_root(&f, 10).unwrap();
    assert!((x.coeff(1) - c(1.0, 0.0)).norm() < 1e-15);
    for k in 2..=10 {
        assert!(x.coeff(k).norm() < 1e-15);
    }
}

#[test]
fn puiseux_root_binomial_coefficient() {
    // f = t^3 - 3t: x = t^{-1}(1 - 3 t^{-2})^{-1/3} = t^{-1} + t^{-3} + ...
    let f = Polynomial::new(vec![c(0.0, 0.0), c(-3.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
    let x = puiseux_inverse_root(&f, 9).unwrap();
    assert!((x.coeff(1) - c(1.0, 0.0)).norm() < 1e-14);
    assert!((x.coeff(3) - c(1.0, 0.0)).norm() < 1e-14, "{}", x.coeff(3));
    // reversion identity f(t(x)) x^n = 1 + O(x^order); reversion returns
    // v(x) with v = 1/t, so t(x) is its multiplicative inverse
    let t_of_x = x.revert().unwrap().inverse().unwrap();
    let tsq = |s: &LaurentSeries| s.mul(s).unwrap();
    let t2 = tsq(&t_of_x);
    let t3 = t2.mul(&t_of_x).unwrap();
    let f_of_t = t3.sub(&t_of_x.scale(c(3.0, 0.0))).unwrap();
    let xn = LaurentSeries::monomial(t_of_x.point(), c(1.0, 0.0), 3, 12);
    let prod = f_of_t.mul(&xn).unwrap();
    assert!((prod.coeff(0) - c(1.0, 0.0)).norm() < 1e-12);
    for k in 1..=prod.truncation_order() {
        assert!(prod.coeff(k).norm() < 1e-11, "order {k}: {}", prod.coeff(k));
    }
}

#[test]
fn rho2_is_minus_dt_for_depressed_polynomials() {
    for chart in [
        vec![c(0.0, 0.0), c(-3.0, 0.0)],
        vec![c(0.4, -0.2), c(1.0, 0.7)],
    ] {
        let m = AbelianIntegral::genus0_from_chart(3, &chart).unwrap();
        let cd = m.critical_data(1e-6).unwrap();
        let rho = PrimitiveSection::build(&m, &cd, 2).unwrap();
        match &rho.coeffs {
            SectionCoeffs::Genus0(h) => {
                assert_eq!(h.degree(), 0);
                assert!((h.coeff(0) - c(-1.0, 0.0)).norm() < 1e-12, "{:?}", h);
            }
            _ => unreachable!(),
        }
        assert!(rho.primitive);
        assert!(rho.polar_defect < 1e-10);
    }
}

#[test]
fn rho2_values_at_cubic_critical_points() {
    let m = cubic();
    let cd = m.critical_data(1e-6).unwrap();
    let rho = PrimitiveSection::build(&m, &cd, 2).unwrap();
    for v in &rho.values_at_critical {
        assert!((v - c(-1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn k_out_of_range_rejected() {
    let m = cubic();
    let cd = m.critical_data(1e-6).unwrap();
    assert!(PrimitiveSection::build(&m, &cd, 1).is_err());
    assert!(PrimitiveSection::build(&m, &cd, 4).is_err());
    assert!(PrimitiveSection::build(&m, &cd, 3).is_ok());
}

#[test]
fn genus1_section_polar_part_and_period() {
    let m = genus1_point();
    let cd = m.critical_data(1e-6).unwrap();
    for k in 2..=3 {
        let rho = PrimitiveSection::build(&m, &cd, k).unwrap();
        assert!(
            rho.polar_defect < 1e-9,
            "k={k} polar defect {}",
            rho.polar_defect
        );
        assert!(
            rho.a_period.norm() < 1e-8,
            "k={k} a-period {}",
            rho.a_period
        );
    }
}

#[test]
fn genus1_du_coefficient_kills_raw_period() {
    // the correction is linear: lambda = -(raw a-period), and the a-period
    // of du is exactly 1
    let m = genus1_point();
    let cd = m.critical_data(1e-6).unwrap();
    let rho = PrimitiveSection::build(&m, &cd, 2).unwrap();
    let SectionCoeffs::Genus1 { du, wp } = &rho.coeffs else {
        unreachable!()
    };
    let lattice = match &m.data {
        frobpencil_core::model::CurveData::Genus1 { lattice, .. } => lattice,
        _ => unreachable!(),
    };
    let raw = wp[0] * (-lattice.eta1);
    assert!((du + raw).norm() < 1e-12);
}

#[test]
fn cubic_metric_matches_residue_oracle() {
    // eta in the idempotent frame is diag(rho^2/omega') = (1/6, -1/6)
    let m = cubic();
    let fa = FiberAlgebra::new(m, &EngineConfig::default()).unwrap();
    let e_minus = fa.fiber_to_tangent(&[c(1.0, 0.0), c(0.0, 0.0)]);
    let e_plus = fa.fiber_to_tangent(&[c(0.0, 0.0), c(1.0, 0.0)]);
    // critical points are ordered (-1, 1); omega' = 6t there
    let m_mm = fa.metric(&e_minus, &e_minus).unwrap();
    let m_pp = fa.metric(&e_plus, &e_plus).unwrap();
    let m_pm = fa.metric(&e_plus, &e_minus).unwrap();
    assert!((m_mm - c(-1.0 / 6.0, 0.0)).norm() < 1e-12);
    assert!((m_pp - c(1.0 / 6.0, 0.0)).norm() < 1e-12);
    assert!(m_pm.norm() < 1e-12);
}

#[test]
fn chart_fiber_examples_for_cubic() {
    let m = cubic();
    let fa = FiberAlgebra::new(m, &EngineConfig::default()).unwrap();
    // d/d a_0 has fiber (1, 1)
    let e0 = fa.chart_basis_vector(0);
    assert!((e0.fiber[0] - c(1.0, 0.0)).norm() < 1e-12);
    assert!((e0.fiber[1] - c(1.0, 0.0)).norm() < 1e-12);
    // d/d a_1 has fiber (t at q_s) = (-1, 1)
    let e1 = fa.chart_basis_vector(1);
    assert!((e1.fiber[0] - c(-1.0, 0.0)).norm() < 1e-12);
    assert!((e1.fiber[1] - c(1.0, 0.0)).norm() < 1e-12);
    // unit field is d/d a_0
    let e = fa.unit_field();
    assert!((e.chart[0] - c(1.0, 0.0)).norm() < 1e-12);
    assert!(e.chart[1].norm() < 1e-12);
}

#[test]
fn multiplication_axioms_on_fibers() {
    let m = cubic();
    let fa = FiberAlgebra::new(m, &EngineConfig::default()).unwrap();
    let x = fa.fiber_to_tangent(&[c(2.0, 0.0), c(3.0, 0.0)]);
    let y = fa.fiber_to_tangent(&[c(5.0, 0.0), c(7.0, 0.0)]);
    let z = fa.fiber_to_tangent(&[c(-1.0, 2.0), c(0.5, -0.5)]);
    let xy = fa.multiply(&x, &y).unwrap();
    assert!((xy.fiber[0] - c(10.0, 0.0)).norm() < 1e-12);
    assert!((xy.fiber[1] - c(21.0, 0.0)).norm() < 1e-12);
    // unit
    let e = fa.unit_field();
    let ex = fa.multiply(&e, &x).unwrap();
    assert!((ex.fiber[0] - x.fiber[0]).norm() < 1e-12);
    // associativity on fibers is exact
    let assoc_l = fa.multiply(&fa.multiply(&x, &y).unwrap(), &z).unwrap();
    let assoc_r = fa.multiply(&x, &fa.multiply(&y, &z).unwrap()).unwrap();
    for s in 0..2 {
        assert!((assoc_l.fiber[s] - assoc_r.fiber[s]).norm() < 1e-12);
    }
    // Frobenius compatibility eta(x o y, z) = eta(x, y o z)
    let lhs = fa.metric(&xy, &z).unwrap();
    let rhs = fa.metric(&x, &fa.multiply(&y, &z).unwrap()).unwrap();
    assert!((lhs - rhs).norm() < 1e-12);
}

#[test]
fn genus1_frame_cross_checked_by_coarse_differences() {
    // the Richardson frame columns should agree with a plain wide-step
    // difference to the step's accuracy
    let m = genus1_point();
    let fa = FiberAlgebra::new(m.clone(), &EngineConfig::default()).unwrap();
    let dim = fa.dim();
    let cd = &fa.critical;
    for col in [1usize, 2] {
        let mut dir = vec![C64::new(0.0, 0.0); dim];
        dir[col] = c(1.0, 0.0);
        let h = 2e-3;
        let plus = m
            .deform(&dir, c(h, 0.0))
            .unwrap()
            .critical_data_warm(cd)
            .unwrap();
        let minus = m
            .deform(&dir, c(-h, 0.0))
            .unwrap()
            .critical_data_warm(cd)
            .unwrap();
        let v = fa.chart_basis_vector(col);
        for s in 0..dim {
            let fd = (plus.values[s] - minus.values[s]) / (2.0 * h);
            assert!(
                (fd - v.fiber[s]).norm() < 1e-4 * (1.0 + fd.norm()),
                "col {col} s {s}: {fd} vs {}",
                v.fiber[s]
            );
        }
    }
    // unit column: c0 derivative is exactly 1
    let unit = fa.chart_basis_vector(dim - 1);
    for s in 0..dim {
        assert!((unit.fiber[s] - c(1.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn genus0_k_independence_of_multiplication() {
    // the product tensor in the chart basis does not depend on which rho
    // carries the multiplication
    let m = AbelianIntegral::genus0_from_chart(
        4,
        &[c(0.3, -0.2), c(-1.0, 0.5), c(0.4, 0.1)],
    )
    .unwrap();
    let mut cfg = EngineConfig::default();
    let fa2 = FiberAlgebra::new(m.clone(), &cfg).unwrap();
    cfg.k = 3;
    let fa3 = FiberAlgebra::new(m.clone(), &cfg).unwrap();
    let t2 = fa2.chart_multiplication_tensor().unwrap();
    let t3 = fa3.chart_multiplication_tensor().unwrap();
    let mut max_d = 0.0f64;
    let mut eta_diff = 0.0f64;
    for a in 0..3 {
        for b in 0..3 {
            for cc in 0..3 {
                max_d = max_d.max((t2[cc][a][b] - t3[cc][a][b]).norm());
            }
            let va2 = fa2.chart_basis_vector(a);
            let vb2 = fa2.chart_basis_vector(b);
            let va3 = fa3.chart_basis_vector(a);
            let vb3 = fa3.chart_basis_vector(b);
            eta_diff = eta_diff.max(
                (fa2.metric(&va2, &vb2).unwrap() - fa3.metric(&va3, &vb3).unwrap()).norm(),
            );
        }
    }
    assert!(max_d < 1e-10, "multiplication depends on rho: {max_d}");
    assert!(eta_diff > 1e-4, "metrics should differ between k=2 and k=3");
}

#[test]
fn metric_invariant_under_affine_coordinate_change() {
    // recompute rho(q)^2/omega'(q) after t -> a t + b on a genus-0 point;
    // the diagonal residues must not move
    let m = cubic();
    let fa = FiberAlgebra::new(m, &EngineConfig::default()).unwrap();
    let a = c(1.7, 0.4);
    // under t = a s + b: q -> (q - b)/a, f_s'(s) = a f'(t), omega_s'(q_s) =
    // a^2 f''(t), rho density -1 -> -a, so rho^2/omega' is unchanged
    for s in 0..2 {
        let r = fa.rho.values_at_critical[s];
        let w = fa.critical.omega_deriv[s];
        let r_new = r * a;
        let w_new = w * a * a;
        assert!(((r_new * r_new / w_new) - (r * r / w)).norm() < 1e-14);
    }
}

#[test]
fn jump_kernel_has_unit_jump_and_bounded_pole() {
    let m = genus1_point();
    let kernel = JumpKernel::build(&m).unwrap();
    let lattice = match &m.data {
        frobpencil_core::model::CurveData::Genus1 { lattice, .. } => lattice,
        _ => unreachable!(),
    };
    // jump across the a-cut equals omega at several probe points
    for &(s, t) in &[(0.21, 0.33), (0.43, 0.12), (-0.31, 0.27)] {
        let u = c(s, 0.0) + lattice.tau * t;
        let jump = kernel.density(&m, u + lattice.tau).unwrap()
            - kernel.density(&m, u).unwrap();
        let want = m.omega_density(u).unwrap();
        assert!(
            (jump - want).norm() < 1e-9 * (1.0 + want.norm()),
            "jump {jump} vs omega {want}"
        );
    }
    // no jump in the a-direction (single-valued across b-cuts)
    let u = c(0.2, 0.0) + lattice.tau * 0.4;
    let d = kernel.density(&m, u + c(1.0, 0.0)).unwrap() - kernel.density(&m, u).unwrap();
    assert!(d.norm() < 1e-10);
    // pole order <= n: series coefficients below -n vanish
    let s = kernel.density_series(&m, 10).unwrap();
    for order in s.lowest_order()..-(m.n as i32) {
        assert!(
            s.coeff(order).norm() < 1e-9,
            "order {order}: {}",
            s.coeff(order)
        );
    }
    // series matches direct evaluation near the pole
    let u = c(0.06, 0.04);
    let direct = kernel.density(&m, u).unwrap();
    let series = s.eval_param(u);
    assert!(
        (direct - series).norm() < 1e-8 * (1.0 + direct.norm()),
        "{direct} vs {series}"
    );
}
