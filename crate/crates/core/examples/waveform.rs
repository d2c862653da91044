//! Three-class waveform data, 5000 observations, under 5x2
//! cross-validation with the SPG solver.
//!
//! `cargo run --release --example waveform`

use std::time::Instant;

use rule_ensemble::analysis::{run_cv, CvProtocol};
use rule_ensemble::model::{FitConfig, SolverChoice};
use rule_ensemble::solvers::SpgConfig;
use rule_ensemble::synthetic::waveform;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = waveform(5000, 7)?;
    let cfg = FitConfig {
        solver: SolverChoice::SpgLasso(SpgConfig::default()),
        ..Default::default()
    };
    let start = Instant::now();
    let result = run_cv(&d, &CvProtocol::default(), &cfg)?;
    println!("{}", result.summary());
    for (name, e) in result.class_names.iter().zip(result.per_class_error()) {
        println!("class {name}: one-versus-all error {:.2}%", 100.0 * e);
    }
    println!("{:.1}s", start.elapsed().as_secs_f64());
    Ok(())
}
