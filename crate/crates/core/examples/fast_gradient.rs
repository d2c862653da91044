//! The incrementally updated pathbuild gradient against a full
//! recomputation, and the time each takes.
//!
//! `cargo run --release --example fast_gradient`

use std::time::Instant;

use rule_ensemble::dataset::Dataset;
use rule_ensemble::model::{FitConfig, Prepared};
use rule_ensemble::solvers::PathbuildState;
use rule_ensemble::synthetic::waveform;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // waveform class 0 against the rest
    let w = waveform(2000, 1)?;
    let labels: Vec<usize> = w.labels().iter().map(|&c| usize::from(c == 0)).collect();
    let d = Dataset::new(
        w.values().to_vec(),
        w.n_attrs(),
        labels,
        w.attribute_names().to_vec(),
        vec!["rest".into(), "wave0".into()],
    )?;
    let y = d.signed_labels()?;
    let prepared = Prepared::new(&d, &y, d.class_names().to_vec(), &FitConfig::default())?;
    let fm = &prepared.features;
    println!("{} x {} feature matrix", fm.n_rows(), fm.n_cols());

    let mut st = PathbuildState::new(fm, &y, 0.0)?;
    let (mut incremental, mut naive, mut worst) = (0.0, 0.0, 0.0f64);
    for _ in 0..2000 {
        let g = st.gradient();
        let g_inf = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let step: Vec<(usize, f64)> = g
            .iter()
            .enumerate()
            .filter(|(_, gk)| gk.abs() >= 0.3 * g_inf)
            .map(|(k, &gk)| (k, 0.05 * gk))
            .collect();
        let t = Instant::now();
        st.apply_step(&step);
        incremental += t.elapsed().as_secs_f64();
        let t = Instant::now();
        let full = st.naive_gradient();
        naive += t.elapsed().as_secs_f64();
        worst = worst.max(full.iter().zip(st.gradient()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
    }
    println!(
        "{} indicator flips, max deviation {worst:.2e}, incremental {incremental:.3}s, full recomputation {naive:.3}s",
        st.flips()
    );
    Ok(())
}
