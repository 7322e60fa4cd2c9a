use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use morphorad::phantom::{make_cohort, CohortSpec, MANIFEST_FILE};
use morphorad::pipeline::{
    run_analyze, run_extract, run_reduce, write_analyze, write_extract, write_reduce, write_report,
    CohortManifest, Report, RunConfig, FEATURES_FILE, REDUCED_FILE, REPORT_FILE,
};
use morphorad::stats::FeatureTable;

/// Radiomics extraction and survival analysis with morphological texture
/// features.
#[derive(Parser)]
#[command(name = "morphorad", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    /// Worker threads (default: all cores). Does not change any output.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Extract the 1,589 features of every manifest patient into features.csv.
    Extract {
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Reduce features.csv to the 159-column reduced.csv with PCA loadings and
    /// Spearman matrices.
    Reduce {
        /// Feature table (default: <out>/features.csv).
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Survival analysis of reduced.csv: report.json and KM curve CSVs.
    Analyze {
        /// Reduced table (default: <out>/reduced.csv).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Render report.json as summary.md and SVG Kaplan-Meier plots.
    Report {
        /// Report file (default: <out>/report.json).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic cohort: volumes, masks, manifest.csv and
    /// ground_truth.json.
    Phantom {
        /// JSON cohort spec; defaults apply when omitted.
        #[arg(long, alias = "spec")]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the cohort seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the number of patients.
        #[arg(long)]
        n: Option<usize>,
    },
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => RunConfig::default(),
    };
    if common.workers.is_some() {
        cfg.workers = common.workers;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn input_or(input: &Option<PathBuf>, out: &Path, default: &str) -> PathBuf {
    input.clone().unwrap_or_else(|| out.join(default))
}

fn load_manifest(path: &Path) -> Result<CohortManifest> {
    let m = CohortManifest::load(path).with_context(|| format!("reading manifest {}", path.display()))?;
    Ok(m)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Extract { manifest, common } => {
            let cfg = load_config(&common)?;
            let m = load_manifest(&manifest)?;
            let res = run_extract(&m, &cfg)?;
            write_extract(&common.out, &res)?;
            let failed = res.status.iter().filter(|s| s.error.is_some()).count();
            eprintln!(
                "extracted {} features for {} patients ({failed} failed) -> {}",
                res.table.n_features(),
                res.table.n_patients(),
                common.out.join(FEATURES_FILE).display()
            );
        }
        Command::Reduce { input, common } => {
            let cfg = load_config(&common)?;
            let path = input_or(&input, &common.out, FEATURES_FILE);
            let table = FeatureTable::read_csv_file(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let res = run_reduce(&table, &cfg)?;
            std::fs::create_dir_all(&common.out)?;
            write_reduce(&common.out, &res)?;
            eprintln!(
                "reduced to {} features -> {}",
                res.reduced.n_features(),
                common.out.join(REDUCED_FILE).display()
            );
        }
        Command::Analyze {
            input,
            manifest,
            common,
        } => {
            let cfg = load_config(&common)?;
            let path = input_or(&input, &common.out, REDUCED_FILE);
            let table = FeatureTable::read_csv_file(&path)
                .with_context(|| format!("reading {}", path.display()))?;
            let m = load_manifest(&manifest)?;
            let report = run_analyze(&table, &m, &cfg)?;
            write_analyze(&common.out, &report)?;
            eprintln!(
                "{} significant of {} features -> {}",
                report.ranked.len(),
                report.metadata.n_features,
                common.out.join(REPORT_FILE).display()
            );
        }
        Command::Report { input, out } => {
            let path = input_or(&input, &out, REPORT_FILE);
            let report = Report::load(&path).with_context(|| format!("reading {}", path.display()))?;
            write_report(&out, &report)?;
            eprintln!("wrote summary for {} significant features", report.ranked.len());
        }
        Command::Phantom {
            config,
            out,
            seed,
            n,
        } => {
            let mut spec = match &config {
                Some(p) => CohortSpec::load(p).with_context(|| format!("reading spec {}", p.display()))?,
                None => CohortSpec::default(),
            };
            if let Some(s) = seed {
                spec.seed = s;
            }
            if let Some(n) = n {
                spec.n = n;
            }
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let m = make_cohort(&spec, &out)?;
            eprintln!("generated {} patients -> {}", m.rows.len(), out.join(MANIFEST_FILE).display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
