//! Nonzero coefficients along the FPC continuation path on generated rules.
//!
//! `cargo run --release --example fpc_sparsity`

use std::path::Path;

use rule_ensemble::dataset::{load_csv, LabelColumn};
use rule_ensemble::model::{FitConfig, Prepared};
use rule_ensemble::solvers::{fpc_with, FpcConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/breast-w.csv");
    let d = load_csv(path, &LabelColumn::Name("class".into()))?;
    let labels = d.signed_labels()?;
    let prepared = Prepared::new(&d, &labels, d.class_names().to_vec(), &FitConfig::default())?;
    let cfg = FpcConfig {
        mu_max: 10.0,
        n_steps: 15,
        ..Default::default()
    };
    let report = fpc_with(&prepared.features, &prepared.labels, &cfg)?;
    let k = prepared.features.n_cols();
    println!("{k} terms");
    for step in &report.steps {
        println!(
            "mu {:9.4}  nonzeros {:4} ({:5.1}% zero)  mse {:.4}",
            step.param,
            step.nonzeros,
            100.0 * (k - step.nonzeros) as f64 / k as f64,
            step.risk
        );
    }
    Ok(())
}
