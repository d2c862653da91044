//! Command-line front end.
//!
//! Settings come from flags, then an optional TOML file given with
//! `--config` (keys are the flag names in snake case), then built-in
//! defaults. The resolved fitting configuration is printed to stderr at
//! startup. Exit codes: 0 success, 1 usage error, 2 data or model error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analysis::{
    attribute_selection, one_vs_all_metrics, rank_rules, run_cv, sweep, vote_rules, CvProtocol, SelectionProtocol,
    SweepParam,
};
use crate::dataset::{load_csv, load_csv_with_classes, load_observations, write_csv, Dataset, LabelColumn, SubsampleSize};
use crate::error::Error;
use crate::model::{FitConfig, Model, Prepared, SolverChoice, Terms};
use crate::rules::BoostConfig;
use crate::solvers::{CdConfig, FpcConfig, PathbuildConfig, SpgConfig};

#[derive(Debug, Parser)]
#[command(name = "rule-ensemble", version, about = "Rule ensemble classifiers")]
struct Cli {
    /// TOML file with default settings
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads for folds and one-versus-all submodels
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model and write it as JSON
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Model JSON
        #[arg(long)]
        out: PathBuf,
        /// Solver path as CSV (two-class data)
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Score observations with a saved model
    Predict {
        #[arg(long)]
        model: PathBuf,
        /// CSV with the model's attribute columns
        #[arg(long)]
        data: PathBuf,
        /// Predictions CSV (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error rates of a saved model on labelled data
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Per-class metrics CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated stratified k-fold cross-validation
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// Metrics CSV (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// One-versus-all metrics per class
        #[arg(long)]
        per_class_out: Option<PathBuf>,
    },
    /// List the most important terms of a saved model
    Rank {
        #[arg(long)]
        model: PathBuf,
        /// Terms to list
        #[arg(long, default_value_t = 20)]
        top: usize,
        /// Only this class of a one-versus-all model
        #[arg(long)]
        class: Option<String>,
    },
    /// Cross-validated error over a grid of one solver parameter
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        protocol: ProtocolArgs,
        /// For example `tau=0,0.1,0.2`
        #[arg(long)]
        param_grid: String,
        /// Terms ranked per solution for the vote tallies
        #[arg(long, default_value_t = 20)]
        top: usize,
        /// Sweep CSV (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Votes across the grid for every split
        #[arg(long)]
        votes_out: Option<PathBuf>,
    },
    /// Select attributes by voting over a parameter grid and repetitions
    SelectAttrs {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Defaults to 13 values of mu_max from 0.01 to 1
        #[arg(long)]
        param_grid: Option<String>,
        /// Repetitions [default: 5]
        #[arg(long)]
        reps: Option<usize>,
        /// Terms ranked per solution
        #[arg(long, default_value_t = 20)]
        top: usize,
        /// Repetitions an attribute must appear in
        #[arg(long, default_value_t = 3)]
        min_votes: usize,
        /// Grid votes a term needs (default: every grid value)
        #[arg(long)]
        min_rule_votes: Option<usize>,
        /// Reduced dataset CSV
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct DataArgs {
    /// CSV file with a header row
    #[arg(long)]
    data: PathBuf,
    /// Label column name or zero-based index
    #[arg(long)]
    label_col: Option<String>,
}

#[derive(Debug, Args)]
struct ProtocolArgs {
    /// Folds per repetition [default: 2]
    #[arg(long)]
    folds: Option<usize>,
    /// Repetitions [default: 5]
    #[arg(long)]
    reps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum SolverName {
    Pathbuild,
    Cdnet,
    Fpc,
    Spg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
enum TermsArg {
    Rules,
    RulesAndLinear,
    LinearOnly,
}

#[derive(Debug, Default, Args)]
struct ModelArgs {
    /// Inferred from solver flags when omitted [default: pathbuild]
    #[arg(long, value_enum)]
    solver: Option<SolverName>,
    /// Pathbuild gradient threshold in [0, 1]
    #[arg(long)]
    tau: Option<f64>,
    /// Pathbuild step size
    #[arg(long)]
    delta: Option<f64>,
    /// Iteration cap for pathbuild and spg
    #[arg(long)]
    max_iter: Option<usize>,
    /// Elastic-net mix, 1 for the lasso
    #[arg(long)]
    alpha: Option<f64>,
    /// End of the cdnet lambda path [default: 0.001 of the null-solution bound]
    #[arg(long)]
    lambda_min: Option<f64>,
    /// Path length for cdnet and fpc
    #[arg(long)]
    n_steps: Option<usize>,
    /// End of the fpc mu path
    #[arg(long)]
    mu_max: Option<f64>,
    /// L1 radius for spg
    #[arg(long)]
    sigma: Option<f64>,
    /// Rows per tree: a fraction such as 0.25 or a count such as 2500
    #[arg(long)]
    eta: Option<SubsampleSize>,
    /// Boosting shrinkage
    #[arg(long)]
    nu: Option<f64>,
    /// Mean terminal nodes per tree
    #[arg(long)]
    mean_leaves: Option<f64>,
    /// Rules to generate per binary task
    #[arg(long)]
    max_rules: Option<usize>,
    /// Cap on boosting iterations
    #[arg(long)]
    max_trees: Option<usize>,
    /// Smallest node a split may create
    #[arg(long)]
    min_node_count: Option<usize>,
    /// Fraction of attributes tried at each split
    #[arg(long)]
    attr_fraction: Option<f64>,
    /// Base learners in the linear model [default: rules]
    #[arg(long, value_enum)]
    terms: Option<TermsArg>,
    /// Fit on raw attribute values
    #[arg(long)]
    no_standardize: bool,
    /// Master random seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum EtaValue {
    Count(usize),
    Fraction(f64),
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSettings {
    label_col: Option<toml::Value>,
    threads: Option<usize>,
    folds: Option<usize>,
    reps: Option<usize>,
    solver: Option<SolverName>,
    tau: Option<f64>,
    delta: Option<f64>,
    max_iter: Option<usize>,
    alpha: Option<f64>,
    lambda_min: Option<f64>,
    n_steps: Option<usize>,
    mu_max: Option<f64>,
    sigma: Option<f64>,
    eta: Option<EtaValue>,
    nu: Option<f64>,
    mean_leaves: Option<f64>,
    max_rules: Option<usize>,
    max_trees: Option<usize>,
    min_node_count: Option<usize>,
    attr_fraction: Option<f64>,
    terms: Option<TermsArg>,
    no_standardize: Option<bool>,
    seed: Option<u64>,
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => CliError::Usage(msg),
            other => CliError::Data(other),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(Error::io("<output>", e))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Run the command line `argv` (program name first) and return the exit
/// code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn load_settings(path: Option<&Path>) -> CliResult<FileSettings> {
    let Some(path) = path else {
        return Ok(FileSettings::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Data(Error::io(path, e)))?;
    toml::from_str(&text).or_else(|e| usage(format!("config file {}: {e}", path.display())))
}

fn execute(cli: Cli) -> CliResult<()> {
    let settings = load_settings(cli.config.as_deref())?;
    let threads = cli.threads.or(settings.threads).unwrap_or(1);
    if threads == 0 {
        return usage("--threads must be at least 1");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?;
    pool.install(|| dispatch(cli.command, &settings))
}

fn dispatch(command: Command, settings: &FileSettings) -> CliResult<()> {
    match command {
        Command::Train {
            data,
            model,
            out,
            report,
        } => {
            let d = load_data(&data, settings)?;
            let cfg = fit_config(&model, settings)?;
            announce(&cfg);
            let fitted = if let Some(report_path) = report {
                if d.n_classes() != 2 {
                    return usage("--report needs two-class data");
                }
                let labels = d.signed_labels()?;
                let prepared = Prepared::new(&d, &labels, d.class_names().to_vec(), &cfg)?;
                let (m, rep) = prepared.fit(&cfg.solver)?;
                rep.write_csv(create(&report_path)?)?;
                Model::Binary(m)
            } else {
                Model::fit(&d, &cfg)?
            };
            fitted.save(&out)?;
            Ok(())
        }
        Command::Predict { model, data, out } => {
            let m = Model::load(&model)?;
            let rows = load_observations(&data, m.attribute_names())?;
            write_predictions(&m, &rows, output(out.as_deref())?)
        }
        Command::Evaluate { model, data, out } => {
            let m = Model::load(&model)?;
            let label = label_column(&data, settings)?;
            let d = load_csv_with_classes(&data.data, &label, m.class_names())?;
            evaluate(&m, &d, out.as_deref())
        }
        Command::Cv {
            data,
            model,
            protocol,
            out,
            per_class_out,
        } => {
            let d = load_data(&data, settings)?;
            let cfg = fit_config(&model, settings)?;
            let protocol = cv_protocol(&protocol, &cfg, settings);
            announce(&cfg);
            let result = run_cv(&d, &protocol, &cfg)?;
            result.write_csv(output(out.as_deref())?)?;
            if let Some(path) = per_class_out {
                result.write_per_class_csv(create(&path)?)?;
            }
            summary_line(out.is_some(), &result.summary());
            Ok(())
        }
        Command::Rank { model, top, class } => {
            if top == 0 {
                return usage("--top must be at least 1");
            }
            let m = Model::load(&model)?;
            let mut stdout = io::stdout().lock();
            match &m {
                Model::Binary(b) => write!(stdout, "{}", rank_rules(b, top).to_table())?,
                Model::Ova(o) => {
                    if let Some(c) = &class {
                        if !o.class_names.contains(c) {
                            return usage(format!("model has no class `{c}`"));
                        }
                    }
                    for (name, sub) in o.class_names.iter().zip(&o.models) {
                        if class.as_ref().is_none_or(|c| c == name) {
                            writeln!(stdout, "class {name}")?;
                            write!(stdout, "{}", rank_rules(sub, top).to_table())?;
                        }
                    }
                }
            }
            Ok(())
        }
        Command::Sweep {
            data,
            model,
            protocol,
            param_grid,
            top,
            out,
            votes_out,
        } => {
            let (param, grid) = parse_grid(&param_grid)?;
            let d = load_data(&data, settings)?;
            let cfg = fit_config(&model, settings)?;
            let protocol = cv_protocol(&protocol, &cfg, settings);
            announce(&cfg);
            let result = sweep(&d, &protocol, &cfg, param, &grid, top.max(1))?;
            result.write_csv(output(out.as_deref())?)?;
            if let Some(path) = votes_out {
                let mut w = csv::Writer::from_writer(create(&path)?);
                w.write_record(["split", "term", "votes", "context", "rule"])
                    .map_err(Error::from)?;
                for (s, (rankings, rs)) in result.rankings.iter().zip(&result.rulesets).enumerate() {
                    let tally = vote_rules(rankings)?;
                    for (k, v) in &tally.votes {
                        w.write_record([
                            s.to_string(),
                            k.to_string(),
                            v.to_string(),
                            tally.context.to_string(),
                            rs.describe_term(*k, d.attribute_names()),
                        ])
                        .map_err(Error::from)?;
                    }
                }
                w.flush()?;
            }
            Ok(())
        }
        Command::SelectAttrs {
            data,
            model,
            param_grid,
            reps,
            top,
            min_votes,
            min_rule_votes,
            out,
        } => {
            let (param, grid) = match param_grid {
                Some(g) => parse_grid(&g)?,
                None => (SweepParam::MuMax, default_mu_grid()),
            };
            let d = load_data(&data, settings)?;
            let cfg = fit_config(&model, settings)?;
            announce(&cfg);
            let protocol = SelectionProtocol {
                repetitions: reps.or(settings.reps).unwrap_or(5),
                seed: cfg.boost.seed,
                top_k: top.max(1),
                min_rule_votes,
                min_repetitions: min_votes,
            };
            let selection = attribute_selection(&d, &cfg, param, &grid, &protocol)?;
            let mut stdout = io::stdout().lock();
            for &j in &selection.attributes {
                writeln!(stdout, "{}", d.attribute_names()[j])?;
            }
            if let Some(path) = out {
                if selection.attributes.is_empty() {
                    return Err(CliError::Data(Error::param("no attributes were selected")));
                }
                let reduced = d.select_attributes(&selection.attributes)?;
                write_csv(&reduced, create(&path)?, "class")?;
            }
            Ok(())
        }
    }
}

fn default_mu_grid() -> Vec<f64> {
    (0..13).map(|i| 0.01 * 100f64.powf(i as f64 / 12.0)).collect()
}

fn announce(cfg: &FitConfig) {
    eprintln!("# settings {}", serde_json::to_string(cfg).expect("configs serialize"));
}

fn summary_line(csv_in_file: bool, line: &str) {
    if csv_in_file {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Data(Error::io(path, e)))
}

fn output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn label_column(data: &DataArgs, settings: &FileSettings) -> CliResult<LabelColumn> {
    if let Some(s) = &data.label_col {
        return Ok(s.parse().expect("label columns parse infallibly"));
    }
    match &settings.label_col {
        Some(toml::Value::String(s)) => Ok(LabelColumn::Name(s.clone())),
        Some(toml::Value::Integer(i)) if *i >= 0 => Ok(LabelColumn::Index(*i as usize)),
        Some(other) => usage(format!("label_col must be a name or index, found {other}")),
        None => usage("--label-col is required (or label_col in the config file)"),
    }
}

fn load_data(data: &DataArgs, settings: &FileSettings) -> CliResult<Dataset> {
    let label = label_column(data, settings)?;
    Ok(load_csv(&data.data, &label)?)
}

fn cv_protocol(args: &ProtocolArgs, cfg: &FitConfig, settings: &FileSettings) -> CvProtocol {
    CvProtocol {
        folds: args.folds.or(settings.folds).unwrap_or(2),
        repetitions: args.reps.or(settings.reps).unwrap_or(5),
        seed: cfg.boost.seed,
    }
}

fn parse_grid(spec: &str) -> CliResult<(SweepParam, Vec<f64>)> {
    let Some((name, values)) = spec.split_once('=') else {
        return usage("--param-grid must look like name=v1,v2,...");
    };
    let param = SweepParam::parse(name.trim())?;
    let grid = values
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| v.parse::<f64>().or_else(|_| usage(format!("bad grid value `{v}`"))))
        .collect::<CliResult<Vec<_>>>()?;
    if grid.is_empty() {
        return usage("--param-grid has no values");
    }
    Ok((param, grid))
}

/// Settings that pin a solver, for conflict detection.
fn solver_params_given(m: &ModelArgs, s: &FileSettings) -> Vec<(&'static str, SolverName)> {
    let mut given = Vec::new();
    let mut note = |present: bool, flag: &'static str, solver: SolverName| {
        if present {
            given.push((flag, solver));
        }
    };
    note(m.tau.or(s.tau).is_some(), "tau", SolverName::Pathbuild);
    note(m.delta.or(s.delta).is_some(), "delta", SolverName::Pathbuild);
    note(m.alpha.or(s.alpha).is_some(), "alpha", SolverName::Cdnet);
    note(m.lambda_min.or(s.lambda_min).is_some(), "lambda-min", SolverName::Cdnet);
    note(m.mu_max.or(s.mu_max).is_some(), "mu-max", SolverName::Fpc);
    note(m.sigma.or(s.sigma).is_some(), "sigma", SolverName::Spg);
    given
}

fn fit_config(m: &ModelArgs, s: &FileSettings) -> CliResult<FitConfig> {
    let given = solver_params_given(m, s);
    let solver = match m.solver.or(s.solver) {
        Some(name) => name,
        None => given.first().map_or(SolverName::Pathbuild, |g| g.1),
    };
    if let Some((flag, owner)) = given.iter().find(|g| g.1 != solver) {
        return usage(format!(
            "--{flag} belongs to the {} solver, not {}",
            owner.to_possible_value().expect("named").get_name(),
            solver.to_possible_value().expect("named").get_name()
        ));
    }
    let n_steps = m.n_steps.or(s.n_steps);
    let max_iter = m.max_iter.or(s.max_iter);
    if n_steps.is_some() && !matches!(solver, SolverName::Cdnet | SolverName::Fpc) {
        return usage("--n-steps applies to the cdnet and fpc solvers");
    }
    if max_iter.is_some() && !matches!(solver, SolverName::Pathbuild | SolverName::Spg) {
        return usage("--max-iter applies to the pathbuild and spg solvers");
    }

    let solver = match solver {
        SolverName::Pathbuild => {
            let d = PathbuildConfig::default();
            SolverChoice::Pathbuild(PathbuildConfig {
                tau: m.tau.or(s.tau).unwrap_or(d.tau),
                delta: m.delta.or(s.delta).unwrap_or(d.delta),
                max_iter: max_iter.unwrap_or(d.max_iter),
                ..d
            })
        }
        SolverName::Cdnet => {
            let d = CdConfig::default();
            SolverChoice::CdElasticNet(CdConfig {
                alpha: m.alpha.or(s.alpha).unwrap_or(d.alpha),
                lambda_min: m.lambda_min.or(s.lambda_min).or(d.lambda_min),
                n_steps: n_steps.unwrap_or(d.n_steps),
                ..d
            })
        }
        SolverName::Fpc => {
            let d = FpcConfig::default();
            SolverChoice::Fpc(FpcConfig {
                mu_max: m.mu_max.or(s.mu_max).unwrap_or(d.mu_max),
                n_steps: n_steps.unwrap_or(d.n_steps),
                ..d
            })
        }
        SolverName::Spg => {
            let d = SpgConfig::default();
            SolverChoice::SpgLasso(SpgConfig {
                sigma: m.sigma.or(s.sigma).unwrap_or(d.sigma),
                max_iter: max_iter.unwrap_or(d.max_iter),
                ..d
            })
        }
    };

    let bd = BoostConfig::default();
    let eta = m.eta.or(s.eta.map(|e| match e {
        EtaValue::Count(c) => SubsampleSize::Count(c),
        EtaValue::Fraction(f) => SubsampleSize::Fraction(f),
    }));
    let mut boost = BoostConfig {
        max_rules: m.max_rules.or(s.max_rules).unwrap_or(bd.max_rules),
        max_trees: m.max_trees.or(s.max_trees).unwrap_or(bd.max_trees),
        eta: eta.unwrap_or(bd.eta),
        nu: m.nu.or(s.nu).unwrap_or(bd.nu),
        seed: m.seed.or(s.seed).unwrap_or(bd.seed),
        ..bd
    };
    boost.tree.mean_leaves = m.mean_leaves.or(s.mean_leaves).unwrap_or(bd.tree.mean_leaves);
    boost.tree.min_node_count = m.min_node_count.or(s.min_node_count).unwrap_or(bd.tree.min_node_count);
    boost.tree.attr_sample_fraction = m.attr_fraction.or(s.attr_fraction).unwrap_or(bd.tree.attr_sample_fraction);
    boost.validate()?;

    let terms = match m.terms.or(s.terms).unwrap_or(TermsArg::Rules) {
        TermsArg::Rules => Terms::Rules,
        TermsArg::RulesAndLinear => Terms::RulesAndLinear,
        TermsArg::LinearOnly => Terms::LinearOnly,
    };
    Ok(FitConfig {
        boost,
        solver,
        terms,
        no_standardize: m.no_standardize || s.no_standardize.unwrap_or(false),
    })
}

fn write_predictions(m: &Model, rows: &[Vec<f64>], out: Box<dyn Write>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["row_index".to_string()];
    match m {
        Model::Binary(_) => header.push("score".into()),
        Model::Ova(o) => header.extend(o.class_names.iter().map(|c| format!("score_{c}"))),
    }
    header.push("predicted_label".into());
    w.write_record(&header).map_err(Error::from)?;
    for (i, x) in rows.iter().enumerate() {
        let scores = m.predict_scores(x)?;
        let class = m.predict_class(x)?;
        let mut rec = vec![i.to_string()];
        rec.extend(scores.iter().map(f64::to_string));
        rec.push(m.class_names()[class].clone());
        w.write_record(&rec).map_err(Error::from)?;
    }
    w.flush()?;
    Ok(())
}

fn evaluate(m: &Model, d: &Dataset, out: Option<&Path>) -> CliResult<()> {
    // align attributes with the model by name
    let attrs = m
        .attribute_names()
        .iter()
        .map(|name| {
            d.attribute_names()
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| Error::MissingAttribute(name.clone()))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let d = d.select_attributes(&attrs)?;
    let truth = d.labels();
    let predicted = m.predict_classes(&d)?;
    let wrong = predicted.iter().zip(truth).filter(|(p, t)| p != t).count();
    let per_class = (0..m.class_names().len())
        .map(|j| one_vs_all_metrics(&predicted, truth, j))
        .collect::<crate::Result<Vec<_>>>()?;
    let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"));
    let mut line = format!("error={:.6} n={}", wrong as f64 / truth.len() as f64, truth.len());
    if m.class_names().len() == 2 {
        line.push_str(&format!(" fp_rate={} fn_rate={}", fmt(per_class[1].fp_rate), fmt(per_class[1].fn_rate)));
    }
    println!("{line}");
    if let Some(path) = out {
        let mut w = csv::Writer::from_writer(create(path)?);
        w.write_record(["class", "error", "fp_rate", "fn_rate"]).map_err(Error::from)?;
        for (name, pm) in m.class_names().iter().zip(&per_class) {
            let o = |v: Option<f64>| v.map_or_else(String::new, |x| x.to_string());
            w.write_record([name.clone(), pm.error_rate.to_string(), o(pm.fp_rate), o(pm.fn_rate)])
                .map_err(Error::from)?;
        }
        w.flush()?;
    }
    Ok(())
}
