//! `ewlr` command-line runner.
//!
//! Settings come from an optional config file (TOML, or plain `key = value`
//! lines) and are overridden by flags. `EWLR_NUM_THREADS` caps the worker
//! pool.

mod config_file;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ewlr::data_io::{write_libsvm, GeneratorSpec};
use ewlr::harness::{comparator_cached, comparator_loss, run_experiment, sweep_b, write_run, write_sweep, PredictorKind, RunConfig};
use ewlr::sampler::AdaptConfig;

#[derive(Parser)]
#[command(name = "ewlr", version, about = "Online logistic regression with exponential weights")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one predictor over repeated permutations of a dataset.
    Run(RunArgs),
    /// Repeat `run` over a grid of prior scales.
    SweepB {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated list of B values.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
    },
    /// Run the numerical verification suites; exits nonzero on any failure.
    Verify(verify::VerifyArgs),
    /// Write a synthetic dataset in LIBSVM format.
    GenData {
        /// Generator spec, e.g. `hazan:n=300,chi=1,seed=4`.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Best fixed predictor in the B-ball for a dataset, as JSON.
    Comparator {
        #[arg(long)]
        data: String,
        #[arg(long = "B")]
        b: f64,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
}

#[derive(Args, Default)]
struct RunArgs {
    /// Config file whose values the flags below override.
    #[arg(long)]
    config: Option<PathBuf>,
    /// LIBSVM path or `gen:<spec>`.
    #[arg(long)]
    data: Option<String>,
    /// ew-exact | ew-theory | ew-practical | solid-angle | ogd | ons
    #[arg(long)]
    predictor: Option<PredictorKind>,
    #[arg(long = "B")]
    b: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep the file order instead of permuting each repeat.
    #[arg(long)]
    no_permute: bool,
    /// Scale features to unit maximum norm.
    #[arg(long)]
    normalize: bool,
    #[arg(long)]
    keep_first: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    chains: Option<usize>,
    #[arg(long)]
    mc_samples: Option<usize>,
    /// Theory-mode step size `c / (L sqrt(d))` instead of the pilot.
    #[arg(long)]
    theory_step: Option<f64>,
    /// Aim the pilot at a point acceptance rate instead of the default window.
    #[arg(long)]
    target_acceptance: Option<f64>,
    /// Half-width of the window around `--target-acceptance`.
    #[arg(long, default_value_t = 0.03)]
    target_width: f64,
    #[arg(long)]
    comparator_cache: Option<PathBuf>,
    #[arg(long)]
    no_svg: bool,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => config_file::load(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident => $target:ident),* $(,)?) => {
                $(if let Some(v) = self.$field.clone() { cfg.$target = v; })*
            };
        }
        set!(data => data, predictor => predictor, b => b, seed => seed, repeats => repeats, out => out, delta => delta);
        set!(mc_samples => mc_samples);
        if let Some(n) = self.n {
            cfg.n = Some(n);
        }
        if let Some(v) = self.keep_first {
            cfg.keep_first = Some(v);
        }
        if let Some(v) = self.horizon {
            cfg.horizon = Some(v);
        }
        if let Some(v) = self.alpha {
            cfg.alpha = Some(v);
        }
        if let Some(v) = self.chains {
            cfg.chains = Some(v);
        }
        if let Some(v) = self.theory_step {
            cfg.theory_step = Some(v);
        }
        if let Some(v) = &self.comparator_cache {
            cfg.comparator_cache = Some(v.clone());
        }
        if self.no_permute {
            cfg.permute = false;
        }
        if self.normalize {
            cfg.normalize = true;
        }
        if self.no_svg {
            cfg.svg = false;
        }
        if let Some(p) = self.target_acceptance {
            cfg.practical.adapt = AdaptConfig::around(p, self.target_width)?;
        }
        cfg.validate()?;
        if !cfg.data.starts_with("gen:") && !std::path::Path::new(&cfg.data).is_file() {
            anyhow::bail!("data file `{}` not found", cfg.data);
        }
        Ok(cfg)
    }
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("EWLR_NUM_THREADS") {
        let n: usize = v.parse().with_context(|| format!("EWLR_NUM_THREADS = `{v}` is not a count"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn load_examples(data: &str, n: Option<usize>) -> Result<ewlr::data_io::Dataset> {
    let cfg = RunConfig {
        data: data.to_owned(),
        n,
        ..RunConfig::default()
    };
    let ds = cfg.load_data().with_context(|| format!("loading `{data}`"))?;
    Ok(match n {
        Some(n) => ds.truncated(n)?,
        None => ds,
    })
}

fn execute(cli: Cli) -> Result<bool> {
    init_threads()?;
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve()?;
            let out = run_experiment(&cfg)?;
            write_run(&cfg.out, &out)?;
            for r in &out.repeats {
                println!(
                    "repeat {}: loss {:.6} comparator {:.6} regret {:.6}",
                    r.repeat, r.regret.learner_loss, r.regret.comparator_loss, r.regret.regret
                );
            }
            println!("wrote {}", cfg.out.display());
            Ok(true)
        }
        Command::SweepB { run, grid } => {
            let cfg = run.resolve()?;
            let rows = sweep_b(&cfg, &grid)?;
            write_sweep(&cfg.out, &rows, cfg.svg)?;
            std::fs::write(cfg.out.join("config.json"), serde_json::to_string_pretty(&cfg)?)?;
            for r in &rows {
                println!("B={} median={:.6} q25={:.6} q75={:.6}", r.b, r.median, r.q25, r.q75);
            }
            Ok(true)
        }
        Command::Verify(args) => verify::run(&args),
        Command::GenData { spec, out } => {
            let ds = GeneratorSpec::parse(spec.strip_prefix("gen:").unwrap_or(&spec))?.generate()?;
            write_libsvm(&ds, &out)?;
            println!("wrote {} examples to {}", ds.len(), out.display());
            Ok(true)
        }
        Command::Comparator { data, b, n, cache } => {
            let ds = load_examples(&data, n)?;
            let sol = match cache {
                Some(dir) => comparator_cached(ds.examples(), ds.dim(), b, &dir)?,
                None => comparator_loss(ds.examples(), ds.dim(), b)?,
            };
            println!("{}", serde_json::to_string_pretty(&sol)?);
            Ok(sol.converged)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
