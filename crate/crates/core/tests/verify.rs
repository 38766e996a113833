//! Oracle equivalence, pencil shape, jumps transport and the axiom suites.

use frobpencil_core::c;
use frobpencil_core::engine::{EngineConfig, FiberAlgebra};
use frobpencil_core::model::AbelianIntegral;
use frobpencil_core::num::Polynomial;
use frobpencil_core::verify::{
    axiom_suite, cech_multiplication_oracle, isotropy_pairing_defect, jumps_flatness_check,
    pencil_consistency, CechCocycle, SuiteThresholds,
};
use frobpencil_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_genus0(rng: &mut ChaCha8Rng, n: usize) -> AbelianIntegral {
    loop {
        let chart: Vec<C64> = (0..n - 1)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let m = AbelianIntegral::genus0_from_chart(n, &chart).unwrap();
        if let Ok(cd) = m.critical_data(1e-6) {
            let mut sep = f64::INFINITY;
            for i in 0..cd.points.len() {
                for j in (i + 1)..cd.points.len() {
                    sep = sep.min((cd.points[i] - cd.points[j]).norm());
                }
            }
            if sep > 0.25 {
                return m;
            }
        }
    }
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
fn cocycle_oracle_matches_componentwise_multiplication() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let cfg = EngineConfig::default();
    for trial in 0..50 {
        let n = 3 + (trial % 4);
        let m = random_genus0(&mut rng, n);
        let fa = FiberAlgebra::new(m.clone(), &cfg).unwrap();
        // random class and coboundary dressing
        let p = Polynomial::new(
            (0..n - 1)
                .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        );
        let g1 = Polynomial::new(
            (0..2)
                .map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
                .collect(),
        );
        let g2: Vec<C64> = (0..3)
            .map(|_| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)))
            .collect();
        let cocycle = CechCocycle::dressed(&m, &p, &g1, &g2).unwrap();
        let j = rng.gen_range(0..n - 1);
        let oracle_values = cech_multiplication_oracle(&m, &fa, &cocycle, j).unwrap();
        // engine route: pull the class back through rho, multiply, push
        let y_fiber: Vec<C64> = cocycle
            .reduce(&fa)
            .iter()
            .zip(&fa.rho.values_at_critical)
            .map(|(v, r)| v / r)
            .collect();
        let y = fa.fiber_to_tangent(&y_fiber);
        let x = fa.chart_basis_vector(j);
        let engine = fa.multiply(&x, &y).unwrap();
        let engine_values: Vec<C64> = engine
            .fiber
            .iter()
            .zip(&fa.rho.values_at_critical)
            .map(|(h, r)| h * r)
            .collect();
        let scale = oracle_values.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for (o, e) in oracle_values.iter().zip(&engine_values) {
            assert!(
                (o - e).norm() / scale < 1e-8,
                "n={n} j={j}: oracle {o} vs engine {e}"
            );
        }
    }
}

#[test]
fn cocycle_unit_direction_preserves_class() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let m = random_genus0(&mut rng, 4);
    let fa = FiberAlgebra::new(m.clone(), &EngineConfig::default()).unwrap();
    let p = Polynomial::new(vec![c(0.3, 0.1), c(-0.7, 0.2), c(0.5, 0.0)]);
    let cocycle = CechCocycle::dressed(&m, &p, &Polynomial::constant(c(0.2, -0.3)), &[]).unwrap();
    let before = cocycle.reduce(&fa);
    let after = cech_multiplication_oracle(&m, &fa, &cocycle, 0).unwrap();
    for (b, a) in before.iter().zip(&after) {
        assert!((b - a).norm() < 1e-10);
    }
}

#[test]
fn coboundaries_reduce_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let m = random_genus0(&mut rng, 5);
    let fa = FiberAlgebra::new(m.clone(), &EngineConfig::default()).unwrap();
    let zero = Polynomial::zero();
    let g1 = Polynomial::new(vec![c(0.4, 0.0), c(0.0, 0.7), c(-0.2, 0.1)]);
    let cocycle = CechCocycle::dressed(&m, &zero, &g1, &[c(0.3, 0.3)]).unwrap();
    for v in cocycle.reduce(&fa) {
        assert!(v.norm() < 1e-10, "coboundary value {v}");
    }
}

#[test]
fn pencil_fit_certifies_simple_pole_and_residue() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..4 {
        let n = 3 + (rng.gen_range(0..3) as usize);
        let m = random_genus0(&mut rng, n);
        let fa = FiberAlgebra::new(m.clone(), &EngineConfig::default()).unwrap();
        let report = pencil_consistency(&m, &fa).unwrap();
        assert!(report.fit_residual < 1e-6, "fit {}", report.fit_residual);
        assert!(
            report.residue_vs_multiplication < 1e-6,
            "residue diff {}",
            report.residue_vs_multiplication
        );
        assert!(
            report.fault_residual > 1e-4,
            "fault detector {}",
            report.fault_residual
        );
    }
}

#[test]
fn jumps_transport_two_methods_agree() {
    let m = genus1_point();
    let cfg = EngineConfig::default();
    let dim = m.dim();
    let mut c0 = vec![C64::new(0.0, 0.0); dim];
    c0[1] = c(1.0, 0.0); // wp du component
    c0[dim - 1] = c(0.5, -0.3); // jump component
    let report = jumps_flatness_check(&m, &c0, 1, 0.08, 8, &cfg).unwrap();
    assert!(
        report.transport_disagreement < 1e-5,
        "methods disagree: {}",
        report.transport_disagreement
    );
    assert!(report.loop_defect < 1e-5, "loop defect {}", report.loop_defect);
    assert!(
        report.jump_relation_defect < 1e-8,
        "jump relation {}",
        report.jump_relation_defect
    );
}

#[test]
fn pure_elliptic_sections_transport_without_jump_machinery() {
    // lambda = 0 families stay lambda = 0 and the two methods still agree
    let m = genus1_point();
    let cfg = EngineConfig::default();
    let dim = m.dim();
    let mut c0 = vec![C64::new(0.0, 0.0); dim];
    c0[0] = c(0.7, 0.1);
    c0[2] = c(-0.4, 0.6);
    let report = jumps_flatness_check(&m, &c0, 2, 0.08, 8, &cfg).unwrap();
    assert!(report.transport_disagreement < 1e-5);
    assert!(report.loop_defect < 1e-5);
}

#[test]
fn isotropic_direction_pairs_to_the_cut_term() {
    let m = genus1_point();
    let defect = isotropy_pairing_defect(&m, &EngineConfig::default()).unwrap();
    assert!(defect < 1e-6, "isotropy defect {defect}");
}

#[test]
fn genus0_suite_passes_at_tight_thresholds() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let m = random_genus0(&mut rng, 4);
    let report = axiom_suite(&m, 2, 17, &SuiteThresholds::genus0()).unwrap();
    for check in &report.checks {
        assert!(
            check.pass,
            "{}: residual {} > {}",
            check.name, check.residual, check.threshold
        );
    }
}

#[test]
fn genus1_suite_passes() {
    let m = genus1_point();
    let report = axiom_suite(&m, 2, 23, &SuiteThresholds::genus1()).unwrap();
    for check in &report.checks {
        assert!(
            check.pass,
            "{}: residual {} > {}",
            check.name, check.residual, check.threshold
        );
    }
}

#[test]
fn zero_period_leaf_suite_passes() {
    // Hurwitz reduction: single-valued f, alpha = beta = 0
    let m = AbelianIntegral::genus1(
        c(0.3, 1.1),
        vec![c(0.2, 0.1), c(1.0, 0.0)],
        c(0.1, 0.0),
        c(0.0, 0.0),
        c(0.0, 0.0),
    )
    .unwrap();
    let report = axiom_suite(&m, 2, 29, &SuiteThresholds::genus1()).unwrap();
    for check in &report.checks {
        assert!(
            check.pass,
            "{}: residual {} > {}",
            check.name, check.residual, check.threshold
        );
    }
}
