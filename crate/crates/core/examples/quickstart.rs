//! Fit a rule ensemble on the breast cancer data, score a held-out half and
//! list the strongest rules.
//!
//! `cargo run --release --example quickstart`

use std::path::Path;

use rule_ensemble::analysis::{confusion_metrics, rank_rules};
use rule_ensemble::dataset::{load_csv, stratified_kfold, LabelColumn};
use rule_ensemble::model::{fit_binary, sign_label, FitConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/breast-w.csv");
    let d = load_csv(path, &LabelColumn::Name("class".into()))?;
    let fold = &stratified_kfold(&d, 2, 0)?[0];
    let (train, test) = (d.subset(fold.train.as_slice()), d.subset(fold.test.as_slice()));

    // defaults: up to 600 rules, pathbuild with tau = 0.3
    let model = fit_binary(&train, &FitConfig::default())?;
    let predicted: Vec<f64> = model.predict_scores(&test)?.into_iter().map(sign_label).collect();
    let metrics = confusion_metrics(&predicted, &test.signed_labels()?)?;
    println!(
        "{} rules, {} nonzero coefficients, test error {:.2}%",
        model.ruleset.n_terms(),
        model.nonzero_count(),
        100.0 * metrics.error_rate
    );
    print!("{}", rank_rules(&model, 5).to_table());
    Ok(())
}
