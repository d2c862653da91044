//! Repeated stratified cross-validation with per-split metrics.
//!
//! `cargo run --release --example cross_validation`

use std::path::Path;

use rule_ensemble::analysis::{run_cv, CvProtocol};
use rule_ensemble::dataset::{load_csv, LabelColumn};
use rule_ensemble::model::FitConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/breast-w.csv");
    let d = load_csv(path, &LabelColumn::Name("class".into()))?;
    let protocol = CvProtocol {
        folds: 2,
        repetitions: 5,
        seed: 42,
    };
    let result = run_cv(&d, &protocol, &FitConfig::default())?;
    result.write_csv(std::io::stdout())?;
    println!("{}", result.summary());
    Ok(())
}
