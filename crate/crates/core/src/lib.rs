//! Frobenius structures on moduli of abelian integrals, at desk scale.
//!
//! The library builds, for a point of a moduli leaf of abelian integrals on a
//! genus 0 or genus 1 curve, the finite-dimensional fiber data of the pencil
//! of connections attached to the integral: critical points and values of the
//! differential, primitive 1-form sections, the induced multiplication on
//! tangent vectors, the residue metric, flat coordinates, the potential, and
//! a battery of axiom and oracle checks (componentwise multiplication versus
//! cocycle products, simple-pole shape of the pencil, flat transport in the
//! forms-with-jumps model, WDVV).

pub mod elliptic;
pub mod engine;
pub mod flat;
pub mod model;
pub mod num;
pub mod verify;

pub use num_complex::Complex64 as C64;

/// `a + bi` shorthand used pervasively in tests and builders.
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
