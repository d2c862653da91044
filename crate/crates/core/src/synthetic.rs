//! Seeded synthetic datasets.

use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// `n` observations uniform on `[-1, 1]^n_attrs`, labelled `+1` when exactly
/// one of `x0 > 0` and `x1 > 0` holds and `-1` otherwise. The remaining
/// attributes are noise. No linear function of the attributes separates
/// the classes better than chance.
pub fn xor_thresholds(n: usize, n_attrs: usize, seed: u64) -> Result<Dataset> {
    if n_attrs < 2 {
        return Err(Error::param("xor_thresholds needs at least 2 attributes"));
    }
    if n < 2 {
        return Err(Error::param("xor_thresholds needs at least 2 observations"));
    }
    let mut rng = rng_from_seed(seed);
    let mut values = Vec::with_capacity(n * n_attrs);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..n_attrs).map(|_| rng.random_range(-1.0..1.0)).collect();
        labels.push(usize::from((row[0] > 0.0) != (row[1] > 0.0)));
        values.extend(row);
    }
    Dataset::new(
        values,
        n_attrs,
        labels,
        (0..n_attrs).map(|j| format!("x{j}")).collect(),
        vec!["-1".into(), "1".into()],
    )
}

fn base_wave(centre: f64, i: usize) -> f64 {
    (6.0 - (i as f64 - centre).abs()).max(0.0)
}

/// Breiman's three-class waveform data: 21 attributes, each observation a
/// random convex combination of two of three triangular waves plus
/// standard normal noise. Classes are equiprobable.
pub fn waveform(n: usize, seed: u64) -> Result<Dataset> {
    if n < 3 {
        return Err(Error::param("waveform needs at least 3 observations"));
    }
    // centres of the three waves on positions 1..=21
    const CENTRES: [f64; 3] = [11.0, 15.0, 7.0];
    const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];
    let mut rng = rng_from_seed(seed);
    let mut values = Vec::with_capacity(n * 21);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let class = rng.random_range(0..3);
        let (a, b) = PAIRS[class];
        let u: f64 = rng.random();
        for i in 1..=21 {
            let noise: f64 = rng.sample(StandardNormal);
            values.push(u * base_wave(CENTRES[a], i) + (1.0 - u) * base_wave(CENTRES[b], i) + noise);
        }
        labels.push(class);
    }
    Dataset::new(
        values,
        21,
        labels,
        (0..21).map(|j| format!("x{j}")).collect(),
        vec!["0".into(), "1".into(), "2".into()],
    )
}
