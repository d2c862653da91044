//! Inspect rule generation: tree sizes drawn, rules per tree and the
//! training risk of the boosted memory function.
//!
//! `cargo run --release --example boosting_trace`

use std::path::Path;

use rule_ensemble::dataset::{load_csv, standardize, LabelColumn};
use rule_ensemble::rules::{generate_rules_traced, BoostConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pima.csv");
    let d = load_csv(path, &LabelColumn::Name("class".into()))?;
    let (scaled, _) = standardize(&d);
    let labels = scaled.signed_labels()?;
    let (rules, trace) = generate_rules_traced(&scaled, &labels, &BoostConfig::default())?;
    let trees = trace.tree_sizes.len();
    let mean_size = trace.tree_sizes.iter().sum::<usize>() as f64 / trees as f64;
    println!("{} rules from {trees} trees, mean terminal nodes {mean_size:.1}", rules.n_terms());
    for (m, risk) in trace.memory_risk.iter().enumerate().step_by((trees / 8).max(1)) {
        println!("after {m:3} trees: training risk {risk:.4}");
    }
    for k in 0..3 {
        println!("rule {k}: {}", rules.describe_term(k, d.attribute_names()));
    }
    Ok(())
}
