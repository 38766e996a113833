//! Zero location for the elliptic `omega` density by argument-principle cell
//! subdivision with Newton polishing.
//!
//! The density has a single pole of order `n+1` at the lattice and `n+1`
//! zeros per fundamental cell. Cells are counted by boundary winding numbers
//! (the pole-carrying cell is corrected by `n+1`), subdivided while they hold
//! zeros, and finished with Newton iterations. A min-size cell that still
//! holds two or more zeros is reported as non-semisimple.

use super::abelian::{AbelianIntegral, CurveData};
use super::ModelError;
use crate::C64;

const MIN_CELL: f64 = 0.045;
const COLLISION_CELL: f64 = 1.5e-3;

/// Deterministic cell-corner offsets tried in order when a zero sits on a
/// cell boundary and the winding walk cannot stabilize. Non-dyadic values
/// keep subdivision gridlines off the lattice points at every depth.
const CORNERS: [(f64, f64); 9] = [
    (0.11, 0.07),
    (0.23, 0.37),
    (0.43, 0.19),
    (0.07, 0.29),
    (0.31, 0.11),
    (0.17, 0.41),
    (0.39, 0.03),
    (0.03, 0.47),
    (0.47, 0.23),
];

struct Cell {
    /// Corner in `(s, t)` coordinates, the cell being
    /// `corner + [0,w] + [0,w] tau`.
    s: f64,
    t: f64,
    w: f64,
}

pub fn locate_zeros_genus1(m: &AbelianIntegral) -> Result<Vec<C64>, ModelError> {
    let CurveData::Genus1 { lattice, .. } = &m.data else {
        unreachable!()
    };
    let expected = m.dim();
    let tau = lattice.tau;
    let mut last_err = None;
    for (js, jt) in CORNERS {
        match try_locate(m, tau, js, jt, expected) {
            Ok(z) => return Ok(z),
            Err(e @ ModelError::NonSemisimplePoint { .. }) => return Err(e),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.unwrap_or(ModelError::RootCountMismatch {
        found: 0,
        expected,
    }))
}

fn try_locate(
    m: &AbelianIntegral,
    tau: C64,
    js: f64,
    jt: f64,
    expected: usize,
) -> Result<Vec<C64>, ModelError> {
    // one full fundamental cell with the pole at 0 interior
    let base = Cell {
        s: -0.5 - js,
        t: -0.5 - jt,
        w: 1.0,
    };
    let embed = |s: f64, t: f64| C64::new(s, 0.0) + tau * t;
    // lattice points sit at integer (s, t)
    let pole_in = |c: &Cell| -> bool {
        let inside = |x: f64, lo: f64, w: f64| x > lo && x < lo + w;
        let cand_s = [c.s.floor(), c.s.ceil(), (c.s + c.w).floor()];
        let cand_t = [c.t.floor(), c.t.ceil(), (c.t + c.w).floor()];
        for &a in &cand_s {
            for &b in &cand_t {
                if inside(a, c.s, c.w) && inside(b, c.t, c.w) {
                    return true;
                }
            }
        }
        false
    };

    let mut zeros: Vec<C64> = Vec::new();
    let mut stack = vec![base];
    let mut visits = 0usize;
    while let Some(cell) = stack.pop() {
        visits += 1;
        if visits > 4000 {
            return Err(ModelError::RootCountMismatch {
                found: zeros.len(),
                expected,
            });
        }
        let has_pole = pole_in(&cell);
        let winding = boundary_winding(m, &cell, tau, &embed)?;
        let count = winding + if has_pole { (m.n + 1) as isize } else { 0 };
        if count < 0 {
            return Err(ModelError::RootCountMismatch {
                found: zeros.len(),
                expected,
            });
        }
        if count == 0 {
            continue;
        }
        let diam = (embed(cell.s + cell.w, cell.t + cell.w) - embed(cell.s, cell.t)).norm();
        if count == 1 && diam < MIN_CELL && !has_pole {
            let center = embed(cell.s + cell.w / 2.0, cell.t + cell.w / 2.0);
            if let Ok(z) = m.newton_polish(center, 80) {
                // accept only if Newton stayed local, else keep subdividing
                if (z - center).norm() <= 1.5 * diam {
                    zeros.push(z);
                    continue;
                }
            }
            if diam < COLLISION_CELL {
                return Err(ModelError::RootCountMismatch {
                    found: zeros.len(),
                    expected,
                });
            }
        }
        if count >= 2 && diam < COLLISION_CELL && !has_pole {
            // several zeros trapped in a vanishing cell
            return Err(ModelError::NonSemisimplePoint { separation: diam });
        }
        let h = cell.w / 2.0;
        for (ds, dt) in [(0.0, 0.0), (h, 0.0), (0.0, h), (h, h)] {
            stack.push(Cell {
                s: cell.s + ds,
                t: cell.t + dt,
                w: h,
            });
        }
    }

    if zeros.len() != expected {
        return Err(ModelError::RootCountMismatch {
            found: zeros.len(),
            expected,
        });
    }
    // cross-cell duplicate or near-collision check
    for i in 0..zeros.len() {
        for j in (i + 1)..zeros.len() {
            let d = (zeros[i] - zeros[j]).norm();
            if d < 1e-8 {
                return Err(ModelError::RootCountMismatch {
                    found: zeros.len() - 1,
                    expected,
                });
            }
            if d < 1e-6 {
                return Err(ModelError::NonSemisimplePoint { separation: d });
            }
        }
    }
    // normalize to the centered fundamental cell, deterministic order
    if let CurveData::Genus1 { lattice, .. } = &m.data {
        for z in zeros.iter_mut() {
            let (red, _, _) = lattice.reduce(*z);
            *z = red;
        }
    }
    zeros.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(zeros)
}

/// Winding number of the density along the cell boundary. Walks the boundary
/// with local refinement until consecutive phase steps are below pi/2.
fn boundary_winding(
    m: &AbelianIntegral,
    cell: &Cell,
    tau: C64,
    embed: &impl Fn(f64, f64) -> C64,
) -> Result<isize, ModelError> {
    let corners = [
        (cell.s, cell.t),
        (cell.s + cell.w, cell.t),
        (cell.s + cell.w, cell.t + cell.w),
        (cell.s, cell.t + cell.w),
        (cell.s, cell.t),
    ];
    let mut total = 0.0f64;
    for seg in corners.windows(2) {
        let f = |x: f64| -> Result<C64, ModelError> {
            let s = seg[0].0 + (seg[1].0 - seg[0].0) * x;
            let t = seg[0].1 + (seg[1].1 - seg[0].1) * x;
            m.omega_density(embed(s, t))
        };
        total += segment_arg_sweep(&f, 0.0, 1.0, 0)?;
    }
    let w = total / (2.0 * std::f64::consts::PI);
    let rounded = w.round();
    if (w - rounded).abs() > 0.25 {
        // a zero is sitting essentially on the boundary
        return Err(ModelError::RootCountMismatch {
            found: 0,
            expected: 0,
        });
    }
    let _ = tau;
    Ok(rounded as isize)
}

fn segment_arg_sweep(
    f: &impl Fn(f64) -> Result<C64, ModelError>,
    a: f64,
    b: f64,
    depth: usize,
) -> Result<f64, ModelError> {
    const N: usize = 16;
    let mut total = 0.0;
    let mut prev = f(a)?;
    for i in 1..=N {
        let x = a + (b - a) * i as f64 / N as f64;
        let cur = f(x)?;
        if prev.norm() == 0.0 || cur.norm() == 0.0 {
            return Err(ModelError::RootCountMismatch {
                found: 0,
                expected: 0,
            });
        }
        let step = (cur / prev).arg();
        if step.abs() > std::f64::consts::FRAC_PI_2 {
            if depth >= 12 {
                return Err(ModelError::RootCountMismatch {
                    found: 0,
                    expected: 0,
                });
            }
            let xl = a + (b - a) * (i - 1) as f64 / N as f64;
            total += segment_arg_sweep(f, xl, x, depth + 1)?;
        } else {
            total += step;
        }
        prev = cur;
    }
    Ok(total)
}
