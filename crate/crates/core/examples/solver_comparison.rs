//! The four solvers on one rule set: error, sparsity and time.
//!
//! `cargo run --release --example solver_comparison`

use std::path::Path;
use std::time::Instant;

use rule_ensemble::dataset::{load_csv, stratified_kfold, LabelColumn};
use rule_ensemble::model::{sign_label, FitConfig, Prepared, SolverChoice};
use rule_ensemble::solvers::{CdConfig, FpcConfig, PathbuildConfig, SpgConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/pima.csv");
    let d = load_csv(path, &LabelColumn::Name("class".into()))?;
    let fold = &stratified_kfold(&d, 2, 0)?[0];
    let (train, test) = (d.subset(fold.train.as_slice()), d.subset(fold.test.as_slice()));

    // rules are generated once and shared by every solver
    let labels = train.signed_labels()?;
    let prepared = Prepared::new(&train, &labels, train.class_names().to_vec(), &FitConfig::default())?;
    let truth = test.signed_labels()?;
    let solvers = [
        SolverChoice::Pathbuild(PathbuildConfig::default()),
        SolverChoice::CdElasticNet(CdConfig {
            n_steps: 30,
            ..Default::default()
        }),
        SolverChoice::Fpc(FpcConfig::default()),
        SolverChoice::SpgLasso(SpgConfig::default()),
    ];
    println!("{} rules", prepared.ruleset.n_terms());
    for solver in solvers {
        let start = Instant::now();
        let (m, _) = prepared.fit(&solver)?;
        let secs = start.elapsed().as_secs_f64();
        let scores = m.predict_scores(&test)?;
        let wrong = scores.iter().zip(&truth).filter(|(s, y)| sign_label(**s) != **y).count();
        println!(
            "{:<15} error {:5.2}%  nonzeros {:4}  {:.2}s",
            solver.name(),
            100.0 * wrong as f64 / truth.len() as f64,
            m.nonzero_count(),
            secs
        );
    }
    Ok(())
}
