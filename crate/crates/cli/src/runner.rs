//! Orchestration of the four run modes and report assembly.

use crate::config::{Mode, RunConfig};
use crate::json::{self, Value};
use frobpencil_core::engine::{EngineConfig, FiberAlgebra};
use frobpencil_core::flat::{
    flat_coordinates_genus0, flat_frame_numeric, potential_genus0, structure_constants,
    wdvv_residual, GridSpec,
};
use frobpencil_core::model::AbelianIntegral;
use frobpencil_core::num::Polynomial;
use frobpencil_core::verify::{
    axiom_suite, cech_multiplication_oracle, pencil_consistency, CechCocycle, CheckRecord,
    SuiteThresholds,
};
use frobpencil_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub struct RunOutcome {
    pub report: Value,
    pub all_pass: bool,
    pub summary: Vec<String>,
}

fn record_value(c: &CheckRecord) -> Value {
    let mut m = Value::map();
    m.insert("name".into(), Value::Str(c.name.clone()));
    m.insert("residual".into(), Value::Float(c.residual));
    m.insert("threshold".into(), Value::Float(c.threshold));
    m.insert("pass".into(), Value::Bool(c.pass));
    Value::Map(m)
}

fn complex_list(zs: &[C64]) -> Value {
    Value::List(zs.iter().map(|&z| Value::complex(z)).collect())
}

fn matrix_value(m: &frobpencil_core::num::CMatrix) -> Value {
    Value::List(
        (0..m.rows())
            .map(|i| Value::List((0..m.cols()).map(|j| Value::complex(m.get(i, j))).collect()))
            .collect(),
    )
}

fn conventions() -> Value {
    let mut m = Value::map();
    m.insert(
        "a_cycle_offset".into(),
        Value::complex(frobpencil_core::elliptic::A_CYCLE_OFFSET),
    );
    m.insert("basepoint".into(), Value::Str("(1+tau)/2".into()));
    m.insert("root_branch".into(), Value::Str("principal".into()));
    m.insert(
        "metric_normalization".into(),
        Value::Str("residue-scalar-1".into()),
    );
    m.insert(
        "z_samples".into(),
        Value::List(
            frobpencil_core::verify::Z_SAMPLES
                .iter()
                .map(|&z| Value::complex(z))
                .collect(),
        ),
    );
    Value::Map(m)
}

fn config_echo(cfg: &RunConfig) -> Value {
    let mut m = Value::map();
    m.insert("mode".into(), Value::Str(cfg.mode.as_str().into()));
    m.insert("genus".into(), Value::Int(cfg.genus as i64));
    m.insert("n".into(), Value::Int(cfg.n as i64));
    m.insert("k".into(), Value::Int(cfg.k as i64));
    if let Some(coeffs) = &cfg.coeffs {
        m.insert("coeffs".into(), complex_list(coeffs));
    }
    if cfg.genus == 1 {
        m.insert("tau".into(), Value::complex(cfg.tau));
        m.insert("pa".into(), Value::complex(cfg.p_a));
        m.insert("pb".into(), Value::complex(cfg.p_b));
    }
    m.insert("seed".into(), Value::Int(cfg.seed as i64));
    m.insert("tol".into(), Value::Float(cfg.tol_scale));
    if cfg.mode == Mode::Sweep {
        m.insert(
            "grid".into(),
            Value::Str(format!("{}x{}", cfg.grid.0, cfg.grid.1)),
        );
        m.insert("grid_radius".into(), Value::Float(cfg.grid_radius));
    }
    if cfg.mode == Mode::Oracle {
        m.insert("count".into(), Value::Int(cfg.count as i64));
    }
    Value::Map(m)
}

fn scaled_thresholds(genus: usize, tol_scale: f64) -> SuiteThresholds {
    let base = SuiteThresholds::for_genus(genus);
    SuiteThresholds {
        algebra: base.algebra * tol_scale,
        flatness: base.flatness * tol_scale,
        potentiality: base.potentiality * tol_scale,
        wdvv: base.wdvv * tol_scale,
        transport: base.transport * tol_scale,
        nondegeneracy_floor: base.nondegeneracy_floor,
    }
}

/// Deterministic moduli point from the config: explicit coefficients if
/// given, otherwise sampled from the seed with a semisimplicity retry.
fn point_from_config(cfg: &RunConfig) -> Result<AbelianIntegral, String> {
    if let Some(coeffs) = &cfg.coeffs {
        return build_point(cfg, coeffs).map_err(|e| e.to_string());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..64 {
        let len = if cfg.genus == 0 { cfg.n - 1 } else { cfg.n };
        let mut coeffs: Vec<C64> = (0..len)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        if cfg.genus == 1 {
            // keep the top derivative coefficient away from zero and make
            // the additive constant mild
            let top = cfg.n - 2;
            if coeffs[top].norm() < 0.3 {
                coeffs[top] = C64::new(1.0, 0.0);
            }
            let last = cfg.n - 1;
            coeffs[last] *= 0.3;
        }
        let Ok(m) = build_point(cfg, &coeffs) else {
            continue;
        };
        match m.critical_data(1e-6) {
            Ok(cd) => {
                let mut sep = f64::INFINITY;
                for i in 0..cd.points.len() {
                    for j in (i + 1)..cd.points.len() {
                        sep = sep.min((cd.points[i] - cd.points[j]).norm());
                    }
                }
                let floor = if cfg.genus == 0 { 0.25 } else { 0.08 };
                if sep > floor {
                    return Ok(m);
                }
            }
            Err(_) => continue,
        }
    }
    Err("could not sample a semisimple point from the seed".into())
}

fn build_point(
    cfg: &RunConfig,
    coeffs: &[C64],
) -> Result<AbelianIntegral, frobpencil_core::model::ModelError> {
    if cfg.genus == 0 {
        AbelianIntegral::genus0_from_chart(cfg.n, coeffs)
    } else {
        let gammas = coeffs[..cfg.n - 1].to_vec();
        let c0 = coeffs[cfg.n - 1];
        AbelianIntegral::genus1(cfg.tau, gammas, c0, cfg.p_a, cfg.p_b)
    }
}

pub fn run(cfg: &RunConfig) -> RunOutcome {
    let mut root = Value::map();
    root.insert("schema_version".into(), Value::Str("1".into()));
    root.insert("config".into(), config_echo(cfg));
    root.insert("conventions".into(), conventions());

    let (checks, artifacts, summary) = match cfg.mode {
        Mode::Compute => run_compute(cfg),
        Mode::Verify => run_verify(cfg),
        Mode::Sweep => run_sweep(cfg),
        Mode::Oracle => run_oracle(cfg),
    };

    let passed = checks.iter().filter(|c| c.pass).count();
    let failed = checks.len() - passed;
    root.insert(
        "checks".into(),
        Value::List(checks.iter().map(record_value).collect()),
    );
    root.insert("artifacts".into(), Value::Map(artifacts));
    let mut s = Value::map();
    s.insert("passed".into(), Value::Int(passed as i64));
    s.insert("failed".into(), Value::Int(failed as i64));
    root.insert("summary".into(), Value::Map(s));

    RunOutcome {
        report: Value::Map(root),
        all_pass: failed == 0,
        summary,
    }
}

fn failure_checks(context: &str, err: String) -> (Vec<CheckRecord>, BTreeMap<String, Value>, Vec<String>) {
    let mut artifacts = Value::map();
    artifacts.insert("error".into(), Value::Str(err.clone()));
    (
        vec![CheckRecord {
            name: context.into(),
            residual: f64::INFINITY,
            threshold: 0.0,
            pass: false,
        }],
        artifacts,
        vec![format!("FAIL {context}: {err}")],
    )
}

fn run_compute(cfg: &RunConfig) -> (Vec<CheckRecord>, BTreeMap<String, Value>, Vec<String>) {
    let m = match point_from_config(cfg) {
        Ok(m) => m,
        Err(e) => return failure_checks("moduli_point", e),
    };
    let ecfg = EngineConfig {
        k: cfg.k,
        ..EngineConfig::default()
    };
    let mut checks = Vec::new();
    let mut artifacts = Value::map();
    let mut summary = Vec::new();

    let fa = match FiberAlgebra::new(m.clone(), &ecfg) {
        Ok(fa) => fa,
        Err(e) => return failure_checks("fiber_algebra", e.to_string()),
    };
    artifacts.insert("critical_points".into(), complex_list(&fa.critical.points));
    artifacts.insert("critical_values".into(), complex_list(&fa.critical.values));
    artifacts.insert(
        "rho_values_at_critical".into(),
        complex_list(&fa.rho.values_at_critical),
    );
    checks.push(CheckRecord {
        name: "rho_primitive".into(),
        residual: if fa.rho.primitive { 0.0 } else { 1.0 },
        threshold: 0.5,
        pass: fa.rho.primitive,
    });
    checks.push(CheckRecord {
        name: "rho_polar_part".into(),
        residual: fa.rho.polar_defect,
        threshold: 1e-8,
        pass: fa.rho.polar_defect <= 1e-8,
    });
    let basis: Vec<_> = (0..fa.dim()).map(|a| fa.chart_basis_vector(a)).collect();
    if let Ok(eta_chart) = fa.metric_matrix(&basis) {
        artifacts.insert("eta_chart".into(), matrix_value(&eta_chart));
    }

    let thresholds = scaled_thresholds(cfg.genus, cfg.tol_scale);
    if cfg.genus == 0 {
        match flat_coordinates_genus0(&m, &ecfg) {
            Ok(chart) => {
                artifacts.insert("flat_coordinates".into(), complex_list(&chart.t_values));
                artifacts.insert("eta_flat".into(), matrix_value(&chart.eta));
                checks.push(CheckRecord {
                    name: "eta_constancy".into(),
                    residual: chart.constancy_defect,
                    threshold: thresholds.flatness,
                    pass: chart.constancy_defect <= thresholds.flatness,
                });
                // potential from a seeded cloud around the point
                match genus0_potential_cloud(cfg, &m, &ecfg) {
                    Ok((fit, wdvv)) => {
                        let mut pot = Value::map();
                        for (mono, coeff) in fit.monomials.iter().zip(&fit.coeffs) {
                            if coeff.norm() > 1e-10 {
                                let name = mono
                                    .iter()
                                    .enumerate()
                                    .filter(|(_, &p)| p > 0)
                                    .map(|(i, &p)| format!("t{}^{}", i + 1, p))
                                    .collect::<Vec<_>>()
                                    .join("*");
                                pot.insert(name, Value::complex(*coeff));
                            }
                        }
                        artifacts.insert("potential".into(), Value::Map(pot));
                        artifacts.insert("potential_fit_residual".into(), Value::Float(fit.fit_residual));
                        checks.push(CheckRecord {
                            name: "potential_fit".into(),
                            residual: fit.fit_residual,
                            threshold: 1e-8,
                            pass: fit.fit_residual <= 1e-8,
                        });
                        checks.push(CheckRecord {
                            name: "wdvv".into(),
                            residual: wdvv,
                            threshold: thresholds.wdvv,
                            pass: wdvv <= thresholds.wdvv,
                        });
                        artifacts.insert("wdvv_residual".into(), Value::Float(wdvv));
                    }
                    Err(e) => checks.push(CheckRecord {
                        name: format!("potential ({e})"),
                        residual: f64::INFINITY,
                        threshold: 0.0,
                        pass: false,
                    }),
                }
            }
            Err(e) => checks.push(CheckRecord {
                name: format!("flat_chart ({e})"),
                residual: f64::INFINITY,
                threshold: 0.0,
                pass: false,
            }),
        }
    } else {
        match m.contour_periods(1e-11) {
            Ok((pa, pb)) => {
                let defect = (pa - cfg.p_a).norm().max((pb - cfg.p_b).norm());
                checks.push(CheckRecord {
                    name: "period_prescription".into(),
                    residual: defect,
                    threshold: 1e-8,
                    pass: defect <= 1e-8,
                });
            }
            Err(e) => checks.push(CheckRecord {
                name: format!("period_prescription ({e})"),
                residual: f64::INFINITY,
                threshold: 0.0,
                pass: false,
            }),
        }
        checks.push(CheckRecord {
            name: "rho_a_period".into(),
            residual: fa.rho.a_period.norm(),
            threshold: 1e-8,
            pass: fa.rho.a_period.norm() <= 1e-8,
        });
        let spec = GridSpec {
            axis_a: 1,
            axis_b: m.dim() - 1,
            step: 0.02,
            count_a: 3,
            count_b: 3,
        };
        match flat_frame_numeric(&m, &ecfg, &spec) {
            Ok(grid) => {
                artifacts.insert("eta_flat".into(), matrix_value(&grid.eta0));
                checks.push(CheckRecord {
                    name: "eta_constancy".into(),
                    residual: grid.eta_constancy_defect,
                    threshold: thresholds.flatness,
                    pass: grid.eta_constancy_defect <= thresholds.flatness,
                });
                checks.push(CheckRecord {
                    name: "frame_closure".into(),
                    residual: grid.closure_defect,
                    threshold: thresholds.flatness,
                    pass: grid.closure_defect <= thresholds.flatness,
                });
                let corner: Vec<C64> = grid.coords[spec.count_a - 1][spec.count_b - 1].clone();
                artifacts.insert("flat_coordinates_corner".into(), complex_list(&corner));
            }
            Err(e) => checks.push(CheckRecord {
                name: format!("flat_frame ({e})"),
                residual: f64::INFINITY,
                threshold: 0.0,
                pass: false,
            }),
        }
    }

    summary.push(format!(
        "compute: genus {} n {} k {}: {}/{} checks pass",
        cfg.genus,
        cfg.n,
        cfg.k,
        checks.iter().filter(|c| c.pass).count(),
        checks.len()
    ));
    (checks, artifacts, summary)
}

fn genus0_potential_cloud(
    cfg: &RunConfig,
    m: &AbelianIntegral,
    ecfg: &EngineConfig,
) -> Result<(frobpencil_core::flat::PotentialFit, f64), frobpencil_core::flat::FlatError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x9e3779b9));
    let dim = m.dim();
    let mut samples = Vec::new();
    let mut wdvv_max: f64 = 0.0;
    let mut guard = 0;
    while samples.len() < 14 && guard < 200 {
        guard += 1;
        let dir: Vec<C64> = (0..dim)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let probe = m.deform(&dir, C64::new(0.15, 0.0))?;
        let Ok(chart) = flat_coordinates_genus0(&probe, ecfg) else {
            continue;
        };
        let Ok(fa) = FiberAlgebra::new(probe.clone(), ecfg) else {
            continue;
        };
        let frame = chart.frame_vectors(&fa);
        let Ok(cs) = structure_constants(&fa, &frame) else {
            continue;
        };
        wdvv_max = wdvv_max.max(wdvv_residual(&cs, &chart.eta)?);
        samples.push((chart.t_values.clone(), cs));
    }
    let fit = potential_genus0(&samples, dim, m.n + 2)?;
    Ok((fit, wdvv_max))
}

fn run_verify(cfg: &RunConfig) -> (Vec<CheckRecord>, BTreeMap<String, Value>, Vec<String>) {
    let m = match point_from_config(cfg) {
        Ok(m) => m,
        Err(e) => return failure_checks("moduli_point", e),
    };
    let thresholds = scaled_thresholds(cfg.genus, cfg.tol_scale);
    let mut artifacts = Value::map();
    artifacts.insert("chart".into(), complex_list(&m.chart()));
    match axiom_suite(&m, cfg.k, cfg.seed, &thresholds) {
        Ok(report) => {
            let mut summary: Vec<String> = report
                .checks
                .iter()
                .map(|c| {
                    format!(
                        "{} {:<28} residual {:>12.3e}  threshold {:>9.1e}",
                        if c.pass { "PASS" } else { "FAIL" },
                        c.name,
                        c.residual,
                        c.threshold
                    )
                })
                .collect();
            summary.push(format!(
                "verify: {}/{} checks pass",
                report.checks.iter().filter(|c| c.pass).count(),
                report.checks.len()
            ));
            (report.checks, artifacts, summary)
        }
        Err(e) => failure_checks("axiom_suite", e.to_string()),
    }
}

fn run_sweep(cfg: &RunConfig) -> (Vec<CheckRecord>, BTreeMap<String, Value>, Vec<String>) {
    if cfg.genus != 1 {
        return failure_checks("sweep", "sweep mode needs genus 1".into());
    }
    let (rows, cols) = cfg.grid;
    let thresholds = scaled_thresholds(1, cfg.tol_scale);

    // fixed moduli data shared by all cells
    let base = match point_from_config(cfg) {
        Ok(m) => m,
        Err(e) => return failure_checks("moduli_point", e),
    };
    let chart = base.chart();
    let gammas: Vec<C64> = chart[1..cfg.n].to_vec();
    let c0 = chart[cfg.n];

    let offsets = |count: usize, idx: usize| -> f64 {
        if count == 1 {
            0.0
        } else {
            cfg.grid_radius * (2.0 * idx as f64 / (count - 1) as f64 - 1.0)
        }
    };

    let cells: Vec<(usize, usize)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (i, j)))
        .collect();
    let results: Vec<(usize, usize, Result<CellOutcome, String>)> = maybe_parallel(cells, |(i, j)| {
        let pa = cfg.p_a + C64::new(offsets(rows, i), 0.0);
        let pb = cfg.p_b + C64::new(offsets(cols, j), 0.0);
        let out = sweep_cell(cfg, &gammas, c0, pa, pb, &thresholds);
        (i, j, out)
    });

    let mut checks = Vec::new();
    let mut cell_values = vec![vec![None; cols]; rows];
    let mut cell_records = Vec::new();
    for (i, j, res) in results {
        match res {
            Ok(cell) => {
                checks.push(CheckRecord {
                    name: format!("cell_{i}_{j}"),
                    residual: cell.worst_residual_ratio,
                    threshold: 1.0,
                    pass: cell.all_pass,
                });
                let mut rec = Value::map();
                rec.insert("pa".into(), Value::complex(cell.pa));
                rec.insert("pb".into(), Value::complex(cell.pb));
                rec.insert("all_pass".into(), Value::Bool(cell.all_pass));
                rec.insert("c_tensor_norm".into(), Value::Float(cell.c_norm));
                rec.insert(
                    "c_sample".into(),
                    complex_list(&cell.c_sample),
                );
                cell_records.push((format!("cell_{i}_{j}"), Value::Map(rec)));
                cell_values[i][j] = Some(cell);
            }
            Err(e) => {
                checks.push(CheckRecord {
                    name: format!("cell_{i}_{j} ({e})"),
                    residual: f64::INFINITY,
                    threshold: 1.0,
                    pass: false,
                });
            }
        }
    }

    // finite-difference Lipschitz bound on the structure constants over the
    // period grid
    let step = if rows > 1 {
        2.0 * cfg.grid_radius / (rows - 1) as f64
    } else {
        1.0
    };
    let mut lipschitz: f64 = 0.0;
    let mut continuous = true;
    for i in 0..rows {
        for j in 0..cols {
            let Some(here) = &cell_values[i][j] else {
                continuous = false;
                continue;
            };
            for (ni, nj) in [(i + 1, j), (i, j + 1)] {
                if ni < rows && nj < cols {
                    if let Some(there) = &cell_values[ni][nj] {
                        let mut d: f64 = 0.0;
                        for (a, b) in here.c_sample.iter().zip(&there.c_sample) {
                            d = d.max((a - b).norm());
                        }
                        lipschitz = lipschitz.max(d / step);
                    }
                }
            }
        }
    }
    checks.push(CheckRecord {
        name: "c_field_continuity".into(),
        residual: lipschitz,
        threshold: 1e3,
        pass: continuous && lipschitz.is_finite() && lipschitz < 1e3,
    });

    let mut artifacts = Value::map();
    artifacts.insert("lipschitz_bound".into(), Value::Float(lipschitz));
    let mut cells_map = Value::map();
    for (k, v) in cell_records {
        cells_map.insert(k, v);
    }
    artifacts.insert("cells".into(), Value::Map(cells_map));

    let summary = vec![format!(
        "sweep: {}x{} grid, {}/{} cells pass, Lipschitz bound {:.3e}",
        rows,
        cols,
        checks.iter().filter(|c| c.pass).count(),
        checks.len(),
        lipschitz
    )];
    (checks, artifacts, summary)
}

struct CellOutcome {
    pa: C64,
    pb: C64,
    all_pass: bool,
    worst_residual_ratio: f64,
    c_norm: f64,
    c_sample: Vec<C64>,
}

fn sweep_cell(
    cfg: &RunConfig,
    gammas: &[C64],
    c0: C64,
    pa: C64,
    pb: C64,
    thresholds: &SuiteThresholds,
) -> Result<CellOutcome, String> {
    let m = AbelianIntegral::genus1(cfg.tau, gammas.to_vec(), c0, pa, pb)
        .map_err(|e| e.to_string())?;
    let report = axiom_suite(&m, cfg.k, cfg.seed, thresholds).map_err(|e| e.to_string())?;
    let ecfg = EngineConfig {
        k: cfg.k,
        ..EngineConfig::default()
    };
    let fa = FiberAlgebra::new(m, &ecfg).map_err(|e| e.to_string())?;
    let tensor = fa.chart_multiplication_tensor().map_err(|e| e.to_string())?;
    let dim = fa.dim();
    let mut c_norm: f64 = 0.0;
    let mut c_sample = Vec::new();
    for c in 0..dim {
        for a in 0..dim {
            for b in 0..dim {
                c_norm = c_norm.max(tensor[c][a][b].norm());
            }
        }
    }
    for a in 0..dim {
        c_sample.push(tensor[0][a][a.min(dim - 1)]);
    }
    let worst = report
        .checks
        .iter()
        .map(|c| {
            if c.threshold > 0.0 && c.residual.is_finite() {
                c.residual / c.threshold
            } else if c.pass {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0f64, f64::max);
    Ok(CellOutcome {
        pa,
        pb,
        all_pass: report.all_pass(),
        worst_residual_ratio: worst,
        c_norm,
        c_sample,
    })
}

fn run_oracle(cfg: &RunConfig) -> (Vec<CheckRecord>, BTreeMap<String, Value>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let ecfg = EngineConfig::default();
    let mut worst_mult: f64 = 0.0;
    let mut worst_fit: f64 = 0.0;
    let mut worst_residue: f64 = 0.0;
    let mut trials = 0usize;
    while trials < cfg.count {
        let n = 3 + trials % 4;
        let Some(m) = sample_genus0(&mut rng, n) else {
            continue;
        };
        let Ok(fa) = FiberAlgebra::new(m.clone(), &ecfg) else {
            continue;
        };
        trials += 1;
        // cocycle oracle against the engine product
        let p = Polynomial::new(
            (0..n - 1)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect(),
        );
        let g1 = Polynomial::new(vec![
            C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
            C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)),
        ]);
        let g2 = [C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))];
        let j = rng.gen_range(0..n - 1);
        let run = || -> Result<f64, String> {
            let cocycle = CechCocycle::dressed(&m, &p, &g1, &g2).map_err(|e| e.to_string())?;
            let oracle = cech_multiplication_oracle(&m, &fa, &cocycle, j).map_err(|e| e.to_string())?;
            let y_fiber: Vec<C64> = cocycle
                .reduce(&fa)
                .iter()
                .zip(&fa.rho.values_at_critical)
                .map(|(v, r)| v / r)
                .collect();
            let y = fa.fiber_to_tangent(&y_fiber);
            let x = fa.chart_basis_vector(j);
            let prod = fa.multiply(&x, &y).map_err(|e| e.to_string())?;
            let scale = oracle.iter().map(|v| v.norm()).fold(1.0, f64::max);
            let mut d: f64 = 0.0;
            for (o, (h, r)) in oracle
                .iter()
                .zip(prod.fiber.iter().zip(&fa.rho.values_at_critical))
            {
                d = d.max((o - h * r).norm() / scale);
            }
            Ok(d)
        };
        match run() {
            Ok(d) => worst_mult = worst_mult.max(d),
            Err(_) => worst_mult = f64::INFINITY,
        }
        // pencil shape on a subset of trials
        if trials % 5 == 0 {
            match pencil_consistency(&m, &fa) {
                Ok(rep) => {
                    worst_fit = worst_fit.max(rep.fit_residual);
                    worst_residue = worst_residue.max(rep.residue_vs_multiplication);
                }
                Err(_) => worst_fit = f64::INFINITY,
            }
        }
    }
    let checks = vec![
        CheckRecord {
            name: "oracle_multiplication_agreement".into(),
            residual: worst_mult,
            threshold: 1e-8,
            pass: worst_mult <= 1e-8,
        },
        CheckRecord {
            name: "pencil_fit".into(),
            residual: worst_fit,
            threshold: 1e-6,
            pass: worst_fit <= 1e-6,
        },
        CheckRecord {
            name: "pencil_residue_vs_multiplication".into(),
            residual: worst_residue,
            threshold: 1e-6,
            pass: worst_residue <= 1e-6,
        },
    ];
    let mut artifacts = Value::map();
    artifacts.insert("trials".into(), Value::Int(trials as i64));
    let summary = vec![format!(
        "oracle: {} trials, multiplication delta {:.3e}, pencil fit {:.3e}",
        trials, worst_mult, worst_fit
    )];
    (checks, artifacts, summary)
}

fn sample_genus0(rng: &mut ChaCha8Rng, n: usize) -> Option<AbelianIntegral> {
    for _ in 0..40 {
        let chart: Vec<C64> = (0..n - 1)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let Ok(m) = AbelianIntegral::genus0_from_chart(n, &chart) else {
            continue;
        };
        if let Ok(cd) = m.critical_data(1e-6) {
            let mut sep = f64::INFINITY;
            for i in 0..cd.points.len() {
                for j in (i + 1)..cd.points.len() {
                    sep = sep.min((cd.points[i] - cd.points[j]).norm());
                }
            }
            if sep > 0.25 {
                return Some(m);
            }
        }
    }
    None
}

/// Run the closure over all items, in parallel when a worker pool is
/// available, preserving input order in the output.
fn maybe_parallel<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    let threads = std::env::var("FROBPENCIL_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&t| t >= 1);
    match threads {
        Some(1) => items.into_iter().map(f).collect(),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .expect("worker pool");
            pool.install(|| items.into_par_iter().map(f).collect())
        }
        None => items.into_par_iter().map(f).collect(),
    }
}
