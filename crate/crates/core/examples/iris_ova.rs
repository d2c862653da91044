//! One-versus-all classification of the three iris species.
//!
//! `cargo run --release --example iris_ova`

use std::path::Path;

use rule_ensemble::dataset::{load_csv, stratified_kfold, LabelColumn};
use rule_ensemble::model::{FitConfig, Model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/iris.csv");
    let d = load_csv(path, &LabelColumn::Name("class".into()))?;
    let fold = &stratified_kfold(&d, 2, 1)?[0];
    let (train, test) = (d.subset(fold.train.as_slice()), d.subset(fold.test.as_slice()));
    let Model::Ova(ova) = Model::fit(&train, &FitConfig::default())? else {
        unreachable!("three classes give a one-versus-all model")
    };
    for (name, m) in ova.class_names.iter().zip(&ova.models) {
        println!("{name}: {} nonzero terms", m.nonzero_count());
    }
    let mut confusion = vec![vec![0usize; 3]; 3];
    for i in 0..test.n_rows() {
        confusion[test.labels()[i]][ova.predict_class(test.row(i))?] += 1;
    }
    println!("rows: true class, columns: predicted class");
    for (name, row) in ova.class_names.iter().zip(&confusion) {
        println!("{name:>16} {row:?}");
    }
    Ok(())
}
