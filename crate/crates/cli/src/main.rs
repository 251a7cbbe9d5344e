use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gcfl_core::fed::Algorithm;
use gcfl_core::graph::{property_significance, Property};
use gcfl_core::harness::{
    calibrate, is_social, load_named, run_experiment, seed_dir, with_degree_features,
    write_calibration_csv, ExperimentConfig,
};
use gcfl_core::hetero::{pairwise_heterogeneity, write_hetero_csv, HeteroParams};
use gcfl_core::Result;

#[derive(Parser)]
#[command(name = "gcfl", version, about = "Clustered federated learning for graph classification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare structural statistics of a dataset against random nulls.
    AnalyzeProperties {
        #[arg(long, default_value = "data")]
        data_root: PathBuf,
        #[arg(long)]
        dataset: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// CSV destination; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structure and feature heterogeneity between a base dataset and others.
    AnalyzeHetero {
        #[arg(long, default_value = "data")]
        data_root: PathBuf,
        #[arg(long)]
        base: String,
        /// Datasets to compare against; the base itself gives the
        /// within-dataset value.
        #[arg(long, value_delimiter = ',', required = true)]
        against: Vec<String>,
        #[arg(long, default_value_t = 4)]
        awe_length: usize,
        #[arg(long, default_value_t = 2000)]
        pair_budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run self-training plus the configured algorithms.
    Run(RunArgs),
    /// Grid-search eps1/eps2 on validation accuracy.
    Calibrate(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment description.
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    data_root: Option<PathBuf>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    #[arg(long)]
    eps1: Option<f64>,
    #[arg(long)]
    eps2: Option<f64>,
    #[arg(long)]
    standardize: Option<bool>,
}

impl RunArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::load(&self.config)?;
        if let Some(v) = &self.data_root {
            cfg.data_root = v.clone();
        }
        if let Some(v) = &self.output_dir {
            cfg.output_dir = v.clone();
        }
        if let Some(v) = &self.dataset {
            cfg.dataset = Some(v.clone());
        }
        if let Some(v) = &self.seeds {
            cfg.seeds = v.clone();
        }
        if let Some(v) = self.rounds {
            cfg.rounds = v;
        }
        if let Some(v) = &self.algorithms {
            cfg.algorithms = v.iter().map(|s| s.parse()).collect::<Result<Vec<Algorithm>>>()?;
        }
        if self.eps1.is_some() {
            cfg.eps1 = self.eps1;
        }
        if self.eps2.is_some() {
            cfg.eps2 = self.eps2;
        }
        if let Some(v) = self.standardize {
            cfg.standardize = v;
        }
        Ok(cfg)
    }
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "NA".into(), |x| format!("{x:.4}"))
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::AnalyzeProperties {
            data_root,
            dataset,
            seed,
            out,
        } => {
            let ds = load_named(&data_root, &dataset)?;
            let report = property_significance(&ds, seed)?;
            for p in Property::ALL {
                let row = report.get(p);
                log::info!(
                    "{dataset} {p}: real {} random {} p {}",
                    fmt_opt(row.real),
                    fmt_opt(row.random),
                    row.p_value.map_or_else(|| "NA".into(), |x| format!("{x:.3e}"))
                );
            }
            report.write_csv(sink(&out)?)
        }
        Command::AnalyzeHetero {
            data_root,
            base,
            against,
            awe_length,
            pair_budget,
            seed,
            out,
        } => {
            let params = HeteroParams {
                awe_length,
                pair_budget,
                seed,
                ..HeteroParams::default()
            };
            let prepare = |name: &str| -> Result<_> {
                let ds = load_named(&data_root, name)?;
                if is_social(name) {
                    with_degree_features(&ds)
                } else {
                    Ok(ds)
                }
            };
            let a = prepare(&base)?;
            let mut rows = Vec::with_capacity(against.len());
            for name in &against {
                let report = if *name == base {
                    pairwise_heterogeneity(&a.graphs, None, &params)?
                } else {
                    pairwise_heterogeneity(&a.graphs, Some(&prepare(name)?.graphs), &params)?
                };
                log::info!("{base} vs {name}: structure {:.4}", report.structure_mean);
                rows.push((base.clone(), name.clone(), report));
            }
            write_hetero_csv(sink(&out)?, &rows)
        }
        Command::Run(args) => {
            let cfg = args.load()?;
            for outcome in run_experiment(&cfg)? {
                for (_, alg, m) in &outcome.summaries {
                    println!(
                        "seed {} {alg}: average {:.4} min gain {:.4} improved {}/{}",
                        outcome.seed,
                        m.average,
                        m.min_gain,
                        m.improved,
                        m.accuracies.len()
                    );
                }
                println!("wrote {}", seed_dir(&cfg, outcome.seed).display());
            }
            Ok(())
        }
        Command::Calibrate(args) => {
            let cfg = args.load()?;
            let (rows, best) = calibrate(&cfg)?;
            std::fs::create_dir_all(&cfg.output_dir)?;
            let path = cfg.output_dir.join("calibration.csv");
            write_calibration_csv(BufWriter::new(File::create(&path)?), &rows)?;
            for b in best {
                println!(
                    "{}: eps1 = {} eps2 = {} (validation accuracy {:.4}, {} clusters)",
                    b.algorithm, b.eps1, b.eps2, b.val_acc, b.clusters
                );
            }
            println!("wrote {}", path.display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(2)
        }
    }
}
