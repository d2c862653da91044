//! Sweep the pathbuild threshold under 5x2 cross-validation.
//!
//! `cargo run --release --example tau_sweep`

use rule_ensemble::analysis::{sweep, CvProtocol, SweepParam};
use rule_ensemble::model::FitConfig;
use rule_ensemble::synthetic::xor_thresholds;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let d = xor_thresholds(1000, 5, 3)?;
    let grid = [0.0, 0.3, 0.6, 0.9, 1.0];
    let result = sweep(&d, &CvProtocol::default(), &FitConfig::default(), SweepParam::Tau, &grid, 10)?;
    result.write_csv(std::io::stdout())?;
    Ok(())
}
