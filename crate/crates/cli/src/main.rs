//! `fssrec`: build a meta-db of feature selection results and recommend
//! algorithms for new datasets.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fssrec::earr::EarrParams;
use fssrec::evalharness::{k_sensitivity, optimal_set_in_view, Evaluator, DEFAULT_LEVEL};
use fssrec::learners::LearnerId;
use fssrec::metadb::{build_db, earr_view, CvConfig, MetaDb, MetaDbError};
use fssrec::metafeatures::{extract, MetaFeatureVector};
use fssrec::recommender::{default_k, RecommendError, Recommender, DEFAULT_TOP};
use fssrec::selectors::AlgorithmId;
use fssrec::tabular::{load_arff, load_csv, ClassColumn, Dataset};

#[derive(Parser)]
#[command(name = "fssrec", version, about = "Recommend feature subset selection algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the meta-features of a dataset as JSON.
    ExtractMeta {
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        csv: CsvArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Cross-validate every selector on every dataset of a directory.
    BuildDb {
        /// Directory of .arff and .csv files.
        #[arg(long)]
        datasets: PathBuf,
        #[arg(long, default_value = "nb")]
        learner: LearnerId,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
        passes: u64,
        #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
        folds: u64,
        /// Comma-separated algorithm ids (default: all).
        #[arg(long, value_delimiter = ',')]
        selectors: Vec<AlgorithmId>,
        #[command(flatten)]
        csv: CsvArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Rank the algorithms for a new dataset.
    Recommend {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        #[command(flatten)]
        earr: EarrArgs,
        #[arg(long, default_value = "auto")]
        k: KArg,
        #[arg(long, default_value_t = DEFAULT_TOP, value_parser = positive)]
        top: usize,
        #[command(flatten)]
        csv: CsvArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Leave-one-out evaluation of the recommender over a meta-db.
    Validate {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        earr: EarrArgs,
        #[arg(long, default_value = "auto")]
        k: KArg,
        #[arg(long, default_value_t = DEFAULT_TOP, value_parser = positive)]
        top: usize,
        /// Also write one CSV row per dataset here.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Leave-one-out RPR for every k, with the statistically acceptable k values.
    Sensitivity {
        #[arg(long)]
        db: PathBuf,
        #[command(flatten)]
        earr: EarrArgs,
        #[arg(long, default_value_t = DEFAULT_LEVEL)]
        level: f64,
        /// Also write the full report as JSON here.
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Optimal algorithm sets of the meta-db entries.
    BestSet {
        #[arg(long)]
        db: PathBuf,
        /// Entry name (default: every entry).
        #[arg(long)]
        dataset: Option<String>,
        #[command(flatten)]
        earr: EarrArgs,
        #[arg(long, default_value_t = DEFAULT_LEVEL)]
        level: f64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EarrArgs {
    #[arg(long, default_value_t = 0.0, value_parser = weight)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0, value_parser = weight)]
    beta: f64,
}

impl EarrArgs {
    fn params(&self) -> EarrParams {
        EarrParams::new(self.alpha, self.beta).expect("validated by the parser")
    }
}

#[derive(Args)]
struct CsvArgs {
    /// Class column of CSV inputs: `last`, a 0-based index or a header name.
    #[arg(long, default_value = "last")]
    class: String,
    /// CSV inputs have no header row.
    #[arg(long)]
    no_header: bool,
}

#[derive(Clone, Copy)]
enum KArg {
    Auto,
    Fixed(usize),
}

impl FromStr for KArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(KArg::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("expected a positive integer or `auto`, got `{s}`")),
            Ok(k) => Ok(KArg::Fixed(k)),
        }
    }
}

impl KArg {
    fn resolve(self, candidates: usize) -> usize {
        match self {
            KArg::Auto => default_k(candidates),
            KArg::Fixed(k) => k,
        }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) | Err(_) => Err(format!("expected a positive integer, got `{s}`")),
        Ok(v) => Ok(v),
    }
}

fn weight(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("expected a finite non-negative number, got `{s}`")),
    }
}

enum Failure {
    Usage(String),
    Data(String),
}

type CliResult = Result<(), Failure>;

fn load_dataset(path: &Path, csv: &CsvArgs) -> Result<Dataset, Failure> {
    let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
    let loaded = match ext.as_deref() {
        Some("arff") => load_arff(path),
        Some("csv") => {
            let class = ClassColumn::from_str(&csv.class).unwrap_or(ClassColumn::Last);
            load_csv(path, !csv.no_header, &class)
        }
        _ => {
            return Err(Failure::Usage(format!(
                "{}: unsupported extension (expected .arff or .csv)",
                path.display()
            )))
        }
    };
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    loaded
        .map(|ds| ds.with_name(stem))
        .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_db(path: &Path) -> Result<MetaDb, Failure> {
    MetaDb::load(path).map_err(|e| match e {
        MetaDbError::Io { .. } => Failure::Data(e.to_string()),
        _ => Failure::Data(format!("{}: {e}", path.display())),
    })
}

fn write_output(path: Option<&Path>, text: &str) -> CliResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Data(format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Data(format!("stdout: {e}"))),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn recommend_failure(e: RecommendError, flag: &str) -> Failure {
    Failure::Usage(format!("--{flag}: {e}"))
}

#[derive(Serialize)]
struct MetaReport<'a> {
    dataset: &'a str,
    meta: MetaFeatureVector,
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::ExtractMeta { dataset, csv, output } => {
            let ds = load_dataset(&dataset, &csv)?;
            let meta = extract(&ds);
            eprintln!(
                "{}: I={} F={} T={} D={}",
                ds.name(),
                meta.instances,
                meta.attributes,
                meta.classes,
                meta.dimensionality
            );
            write_output(
                output.as_deref(),
                &to_json(&MetaReport {
                    dataset: ds.name(),
                    meta,
                }),
            )
        }
        Command::BuildDb {
            datasets,
            learner,
            seed,
            passes,
            folds,
            selectors,
            csv,
            output,
        } => {
            let mut roster = if selectors.is_empty() {
                AlgorithmId::ALL.to_vec()
            } else {
                selectors
            };
            let before = roster.len();
            let mut seen = Vec::new();
            roster.retain(|a| {
                let fresh = !seen.contains(a);
                seen.push(*a);
                fresh
            });
            if roster.len() < 2 || roster.len() != before {
                return Err(Failure::Usage("--selectors: need at least two distinct algorithms".into()));
            }
            let mut files: Vec<PathBuf> = fs::read_dir(&datasets)
                .map_err(|e| Failure::Data(format!("{}: {e}", datasets.display())))?
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|p| {
                    p.is_file()
                        && matches!(
                            p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
                            Some("arff" | "csv")
                        )
                })
                .collect();
            files.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
            if files.is_empty() {
                return Err(Failure::Data(format!("{}: no .arff or .csv files", datasets.display())));
            }
            let loaded = files.iter().map(|p| load_dataset(p, &csv)).collect::<Result<Vec<_>, _>>()?;
            let cv = CvConfig {
                passes: passes as usize,
                folds: folds as usize,
                seed,
            };
            let db = build_db(&loaded, &roster, learner, &cv).map_err(|e| Failure::Data(e.to_string()))?;
            for (ds, e) in loaded.iter().zip(db.entries()) {
                eprintln!(
                    "{}: {} instances, {} features, {} records per algorithm",
                    e.dataset,
                    ds.instance_count(),
                    ds.feature_count(),
                    cv.fold_count()
                );
            }
            write_output(output.as_deref(), &db.to_json())
        }
        Command::Recommend {
            db,
            dataset,
            earr,
            k,
            top,
            csv,
            output,
        } => {
            let db = load_db(&db)?;
            let ds = load_dataset(&dataset, &csv)?;
            let k = k.resolve(db.len());
            let meta = extract(&ds);
            let rec = Recommender::new(&db, &earr.params())
                .recommend(&meta, k, top, None)
                .map_err(|e| match e {
                    RecommendError::TopOutOfRange { .. } => recommend_failure(e, "top"),
                    _ => recommend_failure(e, "k"),
                })?;
            let names: Vec<String> = rec.top.iter().map(|a| a.to_string()).collect();
            eprintln!("{}: top {} with k = {}: {}", ds.name(), top, k, names.join(", "));
            write_output(output.as_deref(), &to_json(&rec))
        }
        Command::Validate {
            db,
            earr,
            k,
            top,
            csv,
            output,
        } => {
            let db = load_db(&db)?;
            let k = k.resolve(db.len().saturating_sub(1));
            let eval = Evaluator::new(&db, &earr.params(), DEFAULT_LEVEL);
            let report = eval.leave_one_out(k, top).map_err(|e| match e {
                fssrec::evalharness::EvalError::Recommend(RecommendError::TopOutOfRange { .. }) => {
                    Failure::Usage(format!("--top: {e}"))
                }
                fssrec::evalharness::EvalError::Recommend(_) => Failure::Usage(format!("--k: {e}")),
                other => Failure::Data(other.to_string()),
            })?;
            if let Some(path) = csv {
                let file = fs::File::create(&path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
                report
                    .write_csv(file)
                    .map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            }
            let ratios: Vec<String> = report.hit_ratio.iter().map(|h| format!("{h:.4}")).collect();
            eprintln!(
                "G = {}, k = {}: hit ratio by position [{}], top-{} {:.4}, mean RPR {:.4}",
                report.g,
                k,
                ratios.join(", "),
                top,
                report.hit_ratio_top,
                report.mean_rpr
            );
            write_output(output.as_deref(), &to_json(&report))
        }
        Command::Sensitivity {
            db,
            earr,
            level,
            json,
            output,
        } => {
            if !(level > 0.0 && level < 1.0) {
                return Err(Failure::Usage(format!("--level: expected a value in (0, 1), got {level}")));
            }
            let db = load_db(&db)?;
            let report = k_sensitivity(&db, &earr.params(), level).map_err(|e| Failure::Data(e.to_string()))?;
            let (lo, hi) = report.advisory_band;
            eprintln!(
                "N = {}: best k = {}, acceptable k = {:?}, advisory band [{lo}, {hi}]",
                db.len(),
                report.best_k,
                report.acceptable()
            );
            if let Some(path) = json {
                fs::write(&path, to_json(&report)).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
            }
            let mut buf = Vec::new();
            report.write_csv(&mut buf).map_err(|e| Failure::Data(e.to_string()))?;
            write_output(output.as_deref(), &String::from_utf8(buf).expect("CSV is UTF-8"))
        }
        Command::BestSet {
            db,
            dataset,
            earr,
            level,
            output,
        } => {
            if !(level > 0.0 && level < 1.0) {
                return Err(Failure::Usage(format!("--level: expected a value in (0, 1), got {level}")));
            }
            let db = load_db(&db)?;
            let view = earr_view(&db, &earr.params());
            let entries: Vec<usize> = match &dataset {
                Some(name) => vec![view
                    .datasets
                    .iter()
                    .position(|d| d == name)
                    .ok_or_else(|| Failure::Usage(format!("--dataset: `{name}` is not in the meta-db")))?],
                None => (0..db.len()).collect(),
            };
            let sets: Vec<_> = entries.iter().map(|&e| optimal_set_in_view(&view, e, level)).collect();
            for s in &sets {
                let names: Vec<String> = s.members.iter().map(|a| a.to_string()).collect();
                eprintln!("{}: best {}, set {{{}}}", s.dataset, s.best, names.join(", "));
            }
            write_output(output.as_deref(), &to_json(&sets))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
