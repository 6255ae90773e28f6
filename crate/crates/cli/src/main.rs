use std::fs::{self, File};
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use stecn::harness::{
    run_experiment, run_scenario, write_convergence_csv, write_runs_csv, write_slots_csv,
    write_summary_json, write_tasks_csv, AxisValues, Scenario, ScenarioConfig, Scheme,
};
use stecn::{Error, Result};

#[derive(Parser)]
#[command(
    name = "stecn",
    version,
    about = "Secure task scheduling simulator for LEO edge computing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario for one scheme (or all of them) and write per-slot results.
    Simulate(SimulateArgs),
    /// Run a seeded grid of scenarios in parallel and write per-run rows plus a summary.
    Sweep(SweepArgs),
    /// Print the topology of one slot as JSON.
    DumpTopology(DumpArgs),
}

#[derive(Args)]
struct Overrides {
    /// JSON scenario file; missing keys take defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    users: Option<usize>,
    #[arg(long)]
    eves: Option<usize>,
    #[arg(long)]
    slots: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

impl Overrides {
    fn load(&self) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(p) => ScenarioConfig::load(p)?,
            None => ScenarioConfig::default(),
        };
        if let Some(v) = self.users {
            cfg.users = v;
        }
        if let Some(v) = self.eves {
            cfg.eavesdroppers = v;
        }
        if let Some(v) = self.slots {
            cfg.slots = v;
        }
        if let Some(v) = self.seed {
            cfg.master_seed = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// proposed, random, greedy, no_an, pso, ga, or `all`.
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    overrides: Overrides,
    /// e.g. `users=10:30:5` or `eves=2,4,6`; repeat for a grid.
    #[arg(long, required = true)]
    axis: Vec<String>,
    /// Number of seeds, counting up from the configured master seed.
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// Comma-separated schemes, or `all`.
    #[arg(long, default_value = "all")]
    schemes: String,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct DumpArgs {
    #[command(flatten)]
    overrides: Overrides,
    #[arg(long)]
    slot: usize,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_schemes(s: &str) -> Result<Vec<Scheme>> {
    if s == "all" {
        return Ok(Scheme::ALL.to_vec());
    }
    s.split(',').map(|x| x.trim().parse()).collect()
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn simulate(args: &SimulateArgs) -> Result<()> {
    let base = args.overrides.load()?;
    let schemes = match &args.scheme {
        Some(s) => parse_schemes(s)?,
        None => vec![base.scheme],
    };
    let mut runs = Vec::new();
    for &scheme in &schemes {
        runs.push(run_scenario(&ScenarioConfig {
            scheme,
            ..base.clone()
        })?);
    }
    fs::create_dir_all(&args.out)?;
    let slots: Vec<_> = runs.iter().flat_map(|r| r.slots.iter().cloned()).collect();
    write_slots_csv(create(&args.out, "slots.csv")?, &slots)?;
    write_tasks_csv(create(&args.out, "tasks.csv")?, &slots)?;
    write_convergence_csv(create(&args.out, "convergence.csv")?, &slots)?;
    let summary = json!({
        "config": base,
        "runs": runs.iter().map(|r| json!({
            "scheme": r.scheme,
            "seed": r.seed,
            "psi_star": r.psi_star,
            "rtp": r.rtp,
            "mean_delay_s": r.mean_delay_s,
            "mean_energy_j": r.mean_energy_j,
            "weighted_cost": r.weighted_cost,
            "infeasible_slots": r.infeasible_slots,
        })).collect::<Vec<_>>(),
    });
    write_summary_json(create(&args.out, "summary.json")?, &summary)?;
    let dead: Vec<&str> = runs
        .iter()
        .filter(|r| r.infeasible_slots == r.slots.len())
        .map(|r| r.scheme.name())
        .collect();
    if !dead.is_empty() {
        return Err(Error::Infeasible(format!(
            "no task could be scheduled in any slot for: {}",
            dead.join(", ")
        )));
    }
    Ok(())
}

fn sweep(args: &SweepArgs) -> Result<()> {
    let base = args.overrides.load()?;
    let axes = args
        .axis
        .iter()
        .map(|a| a.parse())
        .collect::<Result<Vec<AxisValues>>>()?;
    let schemes = parse_schemes(&args.schemes)?;
    let seeds: Vec<u64> = (0..args.seeds)
        .map(|k| base.master_seed.wrapping_add(k))
        .collect();
    let exp = run_experiment(&base, &axes, &seeds, &schemes)?;
    fs::create_dir_all(&args.out)?;
    write_runs_csv(create(&args.out, "runs.csv")?, &exp.rows)?;
    let summary = json!({
        "config": base,
        "axes": args.axis,
        "seeds": seeds,
        "aggregation": "per-run values are means over slots; cells report mean and sample std across seeds",
        "cells": exp.summary,
    });
    write_summary_json(create(&args.out, "summary.json")?, &summary)?;
    Ok(())
}

fn dump_topology(args: &DumpArgs) -> Result<()> {
    let cfg = args.overrides.load()?;
    let scenario = Scenario::new(&cfg)?;
    let snap = scenario.snapshot(&cfg, args.slot);
    match &args.out {
        Some(p) => write_summary_json(BufWriter::new(File::create(p)?), &snap),
        None => write_summary_json(io::stdout().lock(), &snap),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::DumpTopology(a) => dump_topology(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) | Error::InvalidArgument(_) | Error::Json(_) => 2,
                Error::Infeasible(_) => 3,
                _ => 1,
            })
        }
    }
}
