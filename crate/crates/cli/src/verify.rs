use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, ValueEnum};
use ewlr::harness::{plateau_check, plateau_instance, regret_slope_check, verify_lemmas, worst_of_chi};
use ewlr::sampler::PracticalConfig;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Lemmas,
    Slope,
    Plateau,
    Adversarial,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = Suite::All)]
    suite: Suite,
    /// Seeds for the property checks.
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3])]
    seeds: Vec<u64>,
    /// Seeds per horizon in the adversarial experiment.
    #[arg(long, default_value_t = 70)]
    adversarial_seeds: usize,
    /// Write the JSON report here as well as printing a summary.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn line(name: &str, passed: bool, detail: String) {
    println!("{name}: {} {detail}", if passed { "PASS" } else { "FAIL" });
}

pub fn run(args: &VerifyArgs) -> Result<bool> {
    let wants = |s: Suite| args.suite == Suite::All || args.suite == s;
    let mut report = serde_json::Map::new();
    let mut all = true;

    if wants(Suite::Lemmas) {
        let mut reps = Vec::new();
        for &seed in &args.seeds {
            let rep = verify_lemmas(seed)?;
            let failed: Vec<String> = rep.failures().map(|c| format!("{} [{}]", c.name, c.instance)).collect();
            line(
                &format!("lemmas seed {seed}"),
                rep.passed,
                format!("{} checks, failed: {failed:?}", rep.checks.len()),
            );
            all &= rep.passed;
            reps.push(serde_json::to_value(&rep)?);
        }
        report.insert("lemmas".into(), Value::Array(reps));
    }
    if wants(Suite::Slope) {
        let c = regret_slope_check(&[100, 200, 400, 800], 5.0, 2.0, 8, 1.2, 7)?;
        line(
            "regret slope",
            c.passed,
            format!("slope {:.4}, ratio {:.4} <= {:.4}", c.slope, c.ratio, c.ratio_bound),
        );
        all &= c.passed;
        report.insert("slope".into(), serde_json::to_value(&c)?);
    }
    if wants(Suite::Plateau) {
        let (data, u) = plateau_instance();
        let c = plateau_check(&data, &u, &[1.0, 10.0, 100.0], 0.05)?;
        line(
            "B plateau",
            c.passed,
            format!("losses {:?}, spread {:.4}", c.losses, c.relative_spread),
        );
        all &= c.passed;
        report.insert("plateau".into(), serde_json::to_value(&c)?);
    }
    if wants(Suite::Adversarial) {
        let c = worst_of_chi(&[75, 150, 300], args.adversarial_seeds, PracticalConfig::default(), 11)?;
        let rows: Vec<String> = c.rows.iter().map(|r| format!("n={} EW {:.3} OGD {:.3}", r.n, r.ew, r.ogd)).collect();
        line("worst of chi", c.passed, rows.join(", "));
        all &= c.passed;
        report.insert("adversarial".into(), serde_json::to_value(&c)?);
    }
    let report = json!({ "passed": all, "suites": report });
    if let Some(path) = &args.out {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, serde_json::to_string_pretty(&report)?)?;
    }
    Ok(all)
}
