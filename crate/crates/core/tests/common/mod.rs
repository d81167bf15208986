#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weakmeas::hilbert::{FockPointerState, QubitState, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_pair(rng: &mut ChaCha8Rng) -> C64 {
    // Box-Muller; the exact distribution does not matter, only isotropy-ish spread.
    let u: f64 = rng.random_range(f64::EPSILON..1.0);
    let v: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    C64::from_polar((-2.0 * u.ln()).sqrt(), v)
}

pub fn random_qubit(rng: &mut ChaCha8Rng) -> QubitState {
    QubitState::normalize(gaussian_pair(rng), gaussian_pair(rng)).unwrap()
}

/// Random pointer with support on `0..=support`, padded to `n_max`.
pub fn random_pointer(rng: &mut ChaCha8Rng, n_max: usize, support: usize) -> FockPointerState {
    let mut amps = vec![C64::new(0.0, 0.0); n_max + 1];
    for a in amps.iter_mut().take(support + 1) {
        *a = gaussian_pair(rng);
    }
    FockPointerState::normalize(amps).unwrap()
}

pub fn phase(rng: &mut ChaCha8Rng) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
