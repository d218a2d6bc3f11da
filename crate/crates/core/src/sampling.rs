//! Seeded generators for small exact instances.
//!
//! All draws use ChaCha8 seeded from a `u64`, so a seed fixes every
//! instance bit for bit.

use std::sync::Arc;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gpt::{ConeModel, Effect, Measurement, State};
use crate::rational::{int, ratio, Rational, Vector};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| <= 10` and `1 <= q <= 10`.
pub fn small_rational(rng: &mut SeededRng) -> Rational {
    ratio(rng.gen_range(-10..=10), rng.gen_range(1..=10))
}

pub fn small_rational_vector(rng: &mut SeededRng, len: usize) -> Vector {
    (0..len).map(|_| small_rational(rng)).collect()
}

/// Nonnegative integer weights in `0..=max`, not all zero.
fn weights(rng: &mut SeededRng, len: usize, max: i64) -> Vec<Rational> {
    loop {
        let w: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=max)).collect();
        if w.iter().any(|&x| x > 0) {
            return w.into_iter().map(int).collect();
        }
    }
}

/// Normalized random conic combination of the primal rays.
pub fn random_state_coords(rng: &mut SeededRng, model: &ConeModel) -> Vector {
    let w = weights(rng, model.primal_rays().len(), 4);
    let mut v = Vector::zeros(model.dim());
    for (wi, g) in w.iter().zip(model.primal_rays()) {
        v.add_scaled(wi, g);
    }
    let norm = model.unit().dot(&v);
    v.scale(&(Rational::one() / norm))
}

pub fn random_state(rng: &mut SeededRng, model: &Arc<ConeModel>) -> State {
    State::new(model, random_state_coords(rng, model)).expect("convex combination of rays is a state")
}

/// Random nonzero conic combination of the dual rays.
fn random_dual_element(rng: &mut SeededRng, model: &ConeModel) -> Vector {
    let w = weights(rng, model.dual_rays().len(), 4);
    let mut v = Vector::zeros(model.dim());
    for (wi, h) in w.iter().zip(model.dual_rays()) {
        v.add_scaled(wi, h);
    }
    v
}

/// Smallest `s` with `v <= s u`, measured on the primal rays.
fn unit_scale(model: &ConeModel, v: &Vector) -> Rational {
    model
        .primal_rays()
        .iter()
        .map(|g| v.dot(g) / model.unit().dot(g))
        .max()
        .unwrap_or_else(Rational::zero)
}

/// A random effect: a conic combination of dual rays scaled under `u` by a
/// random slack factor. Occasionally returns `0` or `u` exactly.
pub fn random_effect(rng: &mut SeededRng, model: &Arc<ConeModel>) -> Effect {
    match rng.gen_range(0..10) {
        0 => return Effect::zero(model),
        1 => return Effect::unit(model),
        _ => {}
    }
    let c = random_dual_element(rng, model);
    let s = unit_scale(model, &c);
    let slack = [ratio(1, 1), ratio(5, 4), ratio(3, 2), ratio(2, 1)][rng.gen_range(0..4)].clone();
    let coords = c.scale(&(Rational::one() / (s * slack)));
    Effect::new(model, coords).expect("scaled dual element is an effect")
}

/// A random measurement with `outcomes >= 2` effects: `outcomes - 1` random
/// dual elements scaled jointly under `u`, plus the remainder.
pub fn random_measurement(rng: &mut SeededRng, model: &Arc<ConeModel>, outcomes: usize) -> Measurement {
    assert!(outcomes >= 1);
    let parts: Vec<Vector> = (0..outcomes - 1).map(|_| random_dual_element(rng, model)).collect();
    let total = parts.iter().fold(Vector::zeros(model.dim()), |acc, p| acc.add(p));
    let s = unit_scale(model, &total);
    let slack = [ratio(1, 1), ratio(4, 3), ratio(2, 1)][rng.gen_range(0..3)].clone();
    let k = if s.is_zero() { Rational::zero() } else { Rational::one() / (s * slack) };
    let mut effects: Vec<Vector> = parts.iter().map(|p| p.scale(&k)).collect();
    let rest = model.unit().sub(&total.scale(&k));
    effects.push(rest);
    Measurement::new(model, effects).expect("remainder is in the dual cone")
}

/// A rational in `(lo, hi)` on a grid of `1/steps`.
pub fn rational_between(rng: &mut SeededRng, lo: &Rational, hi: &Rational, steps: i64) -> Rational {
    let k = rng.gen_range(1..steps);
    lo + (hi - lo) * ratio(k, steps)
}
