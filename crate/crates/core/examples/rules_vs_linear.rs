//! Rules capture an XOR of thresholds that no linear model can.
//!
//! `cargo run --release --example rules_vs_linear`

use rule_ensemble::dataset::stratified_kfold;
use rule_ensemble::model::{FitConfig, Model, Terms};
use rule_ensemble::synthetic::xor_thresholds;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = xor_thresholds(2000, 5, 7)?;
    let fold = &stratified_kfold(&d, 2, 0)?[0];
    let (train, test) = (d.subset(fold.train.as_slice()), d.subset(fold.test.as_slice()));
    for terms in [Terms::Rules, Terms::RulesAndLinear, Terms::LinearOnly] {
        let cfg = FitConfig {
            terms,
            ..Default::default()
        };
        let m = Model::fit(&train, &cfg)?;
        let predicted = m.predict_classes(&test)?;
        let wrong = predicted.iter().zip(test.labels()).filter(|(p, t)| p != t).count();
        println!("{terms:?}: test error {:.2}%", 100.0 * wrong as f64 / test.n_rows() as f64);
    }
    Ok(())
}
