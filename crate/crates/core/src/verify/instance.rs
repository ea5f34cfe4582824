use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::functions::random_recipe;

/// The recipes and parameters that reproduce one instance.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InstanceDescriptor {
    pub seed: u64,
    pub stream: u64,
    pub index: usize,
    pub dim: usize,
    pub grids: Vec<usize>,
    pub extent: f64,
    pub m: usize,
    pub alpha: f64,
    pub exponents: Vec<f64>,
    pub functions: Vec<String>,
    pub weights: BTreeMap<String, String>,
    pub params: BTreeMap<String, f64>,
}

/// Stream of instance `instance` of check number `check`, derived from the suite seed.
pub fn instance_rng(seed: u64, check: usize, instance: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(check, instance));
    rng
}

pub(crate) fn stream_id(check: usize, instance: usize) -> u64 {
    check as u64 * 1_000_003 + instance as u64
}

fn round3(x: f64) -> f64 {
    (x * 1e3).round() / 1e3
}

/// `m` random function recipes supported in `[lo, hi]^n`.
pub(crate) fn random_functions(rng: &mut ChaCha8Rng, m: usize, dim: usize, lo: f64, hi: f64) -> Vec<String> {
    (0..m)
        .map(|_| random_recipe(rng.random_range(0..1_000_000u64), dim, lo, hi).to_string())
        .collect()
}

/// A weight bounded above and below on the box: a smooth log-normal field, or a
/// mild power of the distance to a point.
pub(crate) fn tame_weight(rng: &mut ChaCha8Rng, extent: f64) -> String {
    if rng.random_bool(0.5) {
        format!("random:({},2)", rng.random_range(0..1_000_000u64))
    } else {
        let a = round3(rng.random_range(-0.15..0.15));
        let c = round3(extent * rng.random_range(0.2..0.8));
        format!("power:({a},{c})")
    }
}

/// A power weight `|x - c|^a` with `a` drawn from `range`.
pub(crate) fn power_weight(rng: &mut ChaCha8Rng, extent: f64, range: std::ops::Range<f64>) -> String {
    let a = round3(rng.random_range(range));
    let c = round3(extent * rng.random_range(0.2..0.8));
    format!("power:({a},{c})")
}
