//! Flat structure: exact genus-0 charts, the A2 closed form, potential fits,
//! WDVV, and the genus-1 numerical frame.

use frobpencil_core::c;
use frobpencil_core::engine::{EngineConfig, FiberAlgebra};
use frobpencil_core::flat::{
    flat_coordinates_genus0, flat_frame_numeric, potential_genus0, potentiality_defect,
    structure_constants, wdvv_residual, GridSpec,
};
use frobpencil_core::model::AbelianIntegral;
use frobpencil_core::C64;
use rand::{Rng, SeedableRng};

fn g0(n: usize, chart: &[C64]) -> AbelianIntegral {
    AbelianIntegral::genus0_from_chart(n, chart).unwrap()
}

#[test]
fn origin_chart_has_zero_coordinates() {
    // f = t^3 with a tiny regularizing a1 would be non-semisimple at exactly
    // the origin; probe the coordinate map instead at a near-origin point
    let m = g0(3, &[c(0.0, 0.0), c(-0.3, 0.0)]);
    let chart = flat_coordinates_genus0(&m, &EngineConfig::default()).unwrap();
    // t_1 = a_1, t_2 = a_0 for n = 3
    assert!((chart.t_values[0] - c(-0.3, 0.0)).norm() < 1e-12);
    assert!(chart.t_values[1].norm() < 1e-12);
}

#[test]
fn a2_chart_is_exact() {
    let m = g0(3, &[c(0.25, -0.4), c(-3.0, 0.5)]);
    let chart = flat_coordinates_genus0(&m, &EngineConfig::default()).unwrap();
    // eta antidiagonal with eta_12 = 1/3
    assert!(chart.antidiagonal_defect < 1e-10);
    assert!((chart.eta.get(0, 1) - c(1.0 / 3.0, 0.0)).norm() < 1e-10);
    assert!(chart.constancy_defect < 1e-8);
    assert!((chart.t_values[0] - c(-3.0, 0.5)).norm() < 1e-11);
    assert!((chart.t_values[1] - c(0.25, -0.4)).norm() < 1e-11);
}

#[test]
fn a3_eta_constant_and_antidiagonal_at_random_points() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
    let mut reference: Option<Vec<C64>> = None;
    let mut checked = 0;
    while checked < 12 {
        let chart_pt = [
            c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)),
            c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)),
            c(rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)),
        ];
        let m = g0(4, &chart_pt);
        let Ok(chart) = flat_coordinates_genus0(&m, &EngineConfig::default()) else {
            continue;
        };
        checked += 1;
        assert!(chart.antidiagonal_defect < 1e-9, "{}", chart.antidiagonal_defect);
        let flat: Vec<C64> = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| chart.eta.get(a, b))
            .collect();
        match &reference {
            None => reference = Some(flat),
            Some(r) => {
                for (x, y) in r.iter().zip(&flat) {
                    assert!((x - y).norm() < 1e-8, "eta drifted: {x} vs {y}");
                }
            }
        }
    }
}

#[test]
fn unit_is_the_last_flat_coordinate_direction() {
    let m = g0(4, &[c(0.3, -0.2), c(-1.0, 0.5), c(0.4, 0.1)]);
    let cfg = EngineConfig::default();
    let chart = flat_coordinates_genus0(&m, &cfg).unwrap();
    let fa = FiberAlgebra::new(m, &cfg).unwrap();
    let e = fa.unit_field();
    // e = d/dt_{n-1}: the last frame column equals the unit chart vector
    let d = chart.dimension;
    for j in 0..d {
        assert!(
            (chart.frame.get(j, d - 1) - e.chart[j]).norm() < 1e-9,
            "frame column vs unit at {j}"
        );
    }
}

#[test]
fn a2_structure_constants_and_potential_match_closed_form() {
    // c_111 = -t_1/9, c_122 = 1/3, others zero;
    // F = t_1 t_2^2 / 6 - t_1^4 / 216
    let cfg = EngineConfig::default();
    let mut samples = Vec::new();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    for _ in 0..12 {
        let pt = [
            c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            c(rng.gen_range(-2.0..-0.7), rng.gen_range(-0.3..0.3)),
        ];
        let m = g0(3, &[pt[0], pt[1]]);
        let Ok(chart) = flat_coordinates_genus0(&m, &cfg) else {
            continue;
        };
        let fa = FiberAlgebra::new(m, &cfg).unwrap();
        let frame = chart.frame_vectors(&fa);
        let cs = structure_constants(&fa, &frame).unwrap();
        // closed-form check: c[0][0][0] = -t1/9
        assert!(
            (cs[0][0][0] + chart.t_values[0] / 9.0).norm() < 1e-9,
            "c111 {} vs {}",
            cs[0][0][0],
            -chart.t_values[0] / 9.0
        );
        assert!((cs[0][1][1] - c(1.0 / 3.0, 0.0)).norm() < 1e-9);
        assert!(cs[0][0][1].norm() < 1e-9);
        assert!(cs[1][1][1].norm() < 1e-9);
        // unit contraction equals eta
        for a in 0..2 {
            for b in 0..2 {
                assert!((cs[1][a][b] - chart.eta.get(a, b)).norm() < 1e-9);
            }
        }
        samples.push((chart.t_values.clone(), cs));
    }
    assert!(samples.len() >= 8);
    let fit = potential_genus0(&samples, 2, 5).unwrap();
    assert!(fit.fit_residual < 1e-9, "residual {}", fit.fit_residual);
    assert!((fit.coeff(&[1, 2]) - c(1.0 / 6.0, 0.0)).norm() < 1e-8);
    assert!((fit.coeff(&[4, 0]) + c(1.0 / 216.0, 0.0)).norm() < 1e-8);
    // everything else negligible
    for (mono, coeff) in fit.monomials.iter().zip(&fit.coeffs) {
        if mono != &vec![1, 2] && mono != &vec![4, 0] {
            assert!(coeff.norm() < 1e-8, "{mono:?} = {coeff}");
        }
    }
}

#[test]
fn wdvv_two_dimensional_is_trivial_and_fault_injection_fires() {
    let cfg = EngineConfig::default();
    let m = g0(3, &[c(0.2, 0.1), c(-1.5, 0.3)]);
    let chart = flat_coordinates_genus0(&m, &cfg).unwrap();
    let fa = FiberAlgebra::new(m, &cfg).unwrap();
    let frame = chart.frame_vectors(&fa);
    let cs = structure_constants(&fa, &frame).unwrap();
    let res = wdvv_residual(&cs, &chart.eta).unwrap();
    assert!(res < 1e-12, "2d WDVV {res}");
}

#[test]
fn wdvv_fault_injection_fires_in_three_dimensions() {
    // two-dimensional WDVV is vacuous, so the detector check needs n = 4
    let cfg = EngineConfig::default();
    let m = g0(4, &[c(0.3, -0.2), c(-1.0, 0.5), c(0.4, 0.1)]);
    let chart = flat_coordinates_genus0(&m, &cfg).unwrap();
    let fa = FiberAlgebra::new(m, &cfg).unwrap();
    let frame = chart.frame_vectors(&fa);
    let mut cs = structure_constants(&fa, &frame).unwrap();
    cs[0][0][0] += c(1e-3, 0.0);
    let res_bad = wdvv_residual(&cs, &chart.eta).unwrap();
    assert!(res_bad > 1e-4, "corrupted WDVV {res_bad}");
}

#[test]
fn a3_wdvv_and_potentiality() {
    let cfg = EngineConfig::default();
    let m = g0(4, &[c(0.3, -0.2), c(-1.0, 0.5), c(0.4, 0.1)]);
    let chart = flat_coordinates_genus0(&m, &cfg).unwrap();
    let fa = FiberAlgebra::new(m.clone(), &cfg).unwrap();
    let frame = chart.frame_vectors(&fa);
    let cs = structure_constants(&fa, &frame).unwrap();
    let res = wdvv_residual(&cs, &chart.eta).unwrap();
    assert!(res < 1e-9, "A3 WDVV residual {res}");
    let pd = potentiality_defect(&m, &chart, &cfg, 0.02).unwrap();
    assert!(pd < 1e-9, "potentiality defect {pd}");
}

#[test]
fn genus1_flat_frame_eta_constant_on_grid() {
    let m = AbelianIntegral::genus1(
        c(0.3, 1.1),
        vec![c(0.4, 0.1), c(1.0, 0.0)],
        c(0.2, -0.1),
        c(1.0, 0.0),
        c(2.0, 1.0),
    )
    .unwrap();
    let spec = GridSpec {
        axis_a: 1,
        axis_b: 3,
        step: 0.02,
        count_a: 3,
        count_b: 3,
    };
    let grid = flat_frame_numeric(&m, &EngineConfig::default(), &spec).unwrap();
    assert!(
        grid.eta_constancy_defect < 1e-5,
        "eta defect {}",
        grid.eta_constancy_defect
    );
    assert!(
        grid.closure_defect < 1e-5,
        "closure defect {}",
        grid.closure_defect
    );
    // continuity: the neighbour jump scales down with the grid step
    let half = GridSpec {
        step: spec.step / 2.0,
        count_a: 2,
        count_b: 2,
        ..spec.clone()
    };
    let fine = flat_frame_numeric(&m, &EngineConfig::default(), &half).unwrap();
    assert!(
        fine.frame_continuity < 0.75 * grid.frame_continuity,
        "no continuity scaling: {} vs {}",
        fine.frame_continuity,
        grid.frame_continuity
    );
    // base-point coordinates vanish and grow roughly linearly with the grid
    assert!(grid.coords[0][0].iter().all(|t| t.norm() < 1e-14));
    assert!(grid.coords[2][2].iter().any(|t| t.norm() > 1e-3));
}
