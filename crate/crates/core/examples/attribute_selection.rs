//! Recover the two informative attributes of an XOR problem padded with
//! noise attributes, then refit on the reduced data.
//!
//! `cargo run --release --example attribute_selection`

use rule_ensemble::analysis::{attribute_selection, SelectionProtocol, SweepParam};
use rule_ensemble::model::{FitConfig, Model};
use rule_ensemble::rules::BoostConfig;
use rule_ensemble::synthetic::xor_thresholds;
use rule_ensemble::tree::TreeConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = xor_thresholds(600, 6, 10)?;
    // small trees keep rules short, so noise attributes rarely ride along
    let cfg = FitConfig {
        boost: BoostConfig {
            max_rules: 120,
            tree: TreeConfig {
                mean_leaves: 4.0,
                ..Default::default()
            },
            ..Default::default()
        },
        ..Default::default()
    };
    // an attribute must be voted in by four of the five repetitions
    let protocol = SelectionProtocol {
        top_k: 3,
        min_repetitions: 4,
        ..Default::default()
    };
    let sel = attribute_selection(&d, &cfg, SweepParam::MuMax, &[0.3, 0.6, 1.0], &protocol)?;
    let names: Vec<&str> = sel.attributes.iter().map(|&j| d.attribute_names()[j].as_str()).collect();
    println!("selected attributes: {names:?}");

    let reduced = d.select_attributes(&sel.attributes)?;
    let m = Model::fit(&reduced, &FitConfig::default())?;
    let predicted = m.predict_classes(&reduced)?;
    let wrong = predicted.iter().zip(reduced.labels()).filter(|(p, t)| p != t).count();
    println!("training error on the reduced data: {:.2}%", 100.0 * wrong as f64 / reduced.n_rows() as f64);
    Ok(())
}
