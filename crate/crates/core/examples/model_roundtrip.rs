//! Save a model as JSON, load it back and check the scores are unchanged
//! to the bit.
//!
//! `cargo run --release --example model_roundtrip`

use std::path::Path;

use rule_ensemble::dataset::{load_csv, LabelColumn};
use rule_ensemble::model::{FitConfig, Model};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/iris.csv");
    let d = load_csv(path, &LabelColumn::Name("class".into()))?;
    let model = Model::fit(&d, &FitConfig::default())?;

    let dir = std::env::temp_dir().join("rule-ensemble-roundtrip");
    std::fs::create_dir_all(&dir)?;
    let file = dir.join("iris.json");
    model.save(&file)?;
    let loaded = Model::load(&file)?;

    let identical = (0..d.n_rows()).all(|i| {
        let (a, b) = (model.predict_scores(d.row(i)).unwrap(), loaded.predict_scores(d.row(i)).unwrap());
        a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits())
    });
    println!(
        "wrote {} ({} bytes); scores identical after reload: {identical}",
        file.display(),
        std::fs::metadata(&file)?.len()
    );
    Ok(())
}
