//! Rank rules by coefficient magnitude and count how often each rule is
//! ranked across a sweep of the FPC path end point.
//!
//! `cargo run --release --example rule_ranking`

use rule_ensemble::analysis::{rank_rules, vote_rules};
use rule_ensemble::model::{FitConfig, Prepared, SolverChoice};
use rule_ensemble::solvers::FpcConfig;
use rule_ensemble::synthetic::xor_thresholds;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = xor_thresholds(800, 4, 5)?;
    let labels = d.signed_labels()?;
    let prepared = Prepared::new(&d, &labels, d.class_names().to_vec(), &FitConfig::default())?;
    let mut rankings = Vec::new();
    for mu_max in [0.1, 0.3, 1.0] {
        let (m, _) = prepared.fit(&SolverChoice::Fpc(FpcConfig {
            mu_max,
            ..Default::default()
        }))?;
        let ranking = rank_rules(&m, 8);
        println!("mu_max {mu_max}:\n{}", ranking.to_table());
        rankings.push(ranking);
    }
    let tally = vote_rules(&rankings)?;
    println!("ranked at every mu_max:");
    for k in tally.voted(rankings.len()) {
        println!("  {}", prepared.ruleset.describe_term(k, d.attribute_names()));
    }
    Ok(())
}
