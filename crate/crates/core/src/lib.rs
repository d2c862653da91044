//! Rule ensemble classifiers.
//!
//! Gradient-boosted regression trees on the ramp loss generate candidate
//! rules: conjunctions of interval conditions on the attributes. A sparse
//! linear model over the rules, optionally joined by the raw attributes,
//! is then fitted by one of four L1 solvers:
//!
//! | solver | problem |
//! |---|---|
//! | [`solvers::pathbuild`] | thresholded gradient descent on the ramp risk |
//! | [`solvers::cd_elastic_net`] | coordinate descent along an elastic-net path |
//! | [`solvers::fpc`] | fixed-point continuation for L1 least squares |
//! | [`solvers::spg_lasso`] | spectral projected gradient on an L1 ball |
//!
//! Problems with more than two classes are handled one versus all.
//! [`analysis`] adds error metrics, repeated stratified cross-validation,
//! parameter sweeps, rule ranking and voting, and attribute selection.
//!
//! ```no_run
//! use rule_ensemble::dataset::{load_csv, LabelColumn};
//! use rule_ensemble::model::{FitConfig, Model};
//!
//! let d = load_csv("data/iris.csv", &LabelColumn::Name("class".into()))?;
//! let model = Model::fit(&d, &FitConfig::default())?;
//! let class = model.predict_class(d.row(0))?;
//! println!("{}", model.class_names()[class]);
//! # Ok::<(), rule_ensemble::Error>(())
//! ```
//!
//! Runnable examples, `cargo run --release --example <name>`:
//!
//! | example | shows |
//! |---|---|
//! | `quickstart` | fit, score a held-out half, list top rules |
//! | `rules_vs_linear` | rules against linear terms on XOR data |
//! | `solver_comparison` | the four solvers on one rule set |
//! | `tau_sweep` | cross-validated sweep of the pathbuild threshold |
//! | `fpc_sparsity` | nonzero coefficients along the FPC path |
//! | `iris_ova` | one-versus-all multiclass fitting |
//! | `cross_validation` | 5x2 stratified cross-validation metrics |
//! | `rule_ranking` | ranking and voting across solutions |
//! | `attribute_selection` | recovering informative attributes |
//! | `fast_gradient` | incremental pathbuild gradient against recomputation |
//! | `waveform` | the generated waveform benchmark |
//! | `model_roundtrip` | JSON save and load |
//! | `boosting_trace` | tree sizes and risk during rule generation |

pub mod analysis;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod loss;
pub mod model;
pub mod rng;
pub mod rules;
pub mod solvers;
pub mod synthetic;
pub mod tree;

pub use error::{Error, Result};
