use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use handoff_core::estimator::{estimate_ap_position, EstimatorConfig, SampleSet, SnrScale};
use handoff_core::mobility::MobilityTrace;
use handoff_core::sim::{compare, run, select_on_trace, Scenario};
use rayon::prelude::*;

use crate::csvio::{read_samples, read_trace, write_atomic};
use crate::error::{AppError, Result};
use crate::fmt::g6;
use crate::presets::{self, PRESETS};
use crate::report::{compare_summary_table, compare_table, emit_report, Cell, Format, Table};
use crate::scenario_file::to_toml;
use crate::sweep::{expand, run_points, sweep_table, Vary};

pub const SYNOPSIS: &str = "\
usage: handoff [--seed N] [--out-dir DIR] [--format csv|json] <command>

commands:
  run <scenario>                    simulate one scenario
  compare <dirf> <omrf>             DiRF vs OmRF over a seed set (--seeds 1,2,3)
  estimate <samples.csv>            locate an AP from t,x,y,z,snr_db samples
  select <trace.csv> <scenario>     handoff decisions along a t,x,y,z trace
  sweep <scenario> --vary F=V1,V2   run every combination of the listed values
  presets [name]                    list bundled scenarios or print one

<scenario> is a TOML file or preset:<name>.";

#[derive(Debug, Parser)]
#[command(name = "handoff", version, about = "Directional-AP handoff simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Linear,
    Db,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate one scenario.
    Run {
        scenario: String,
        /// Also write the per-packet event log.
        #[arg(long)]
        packets: bool,
    },
    /// Compare a DiRF scenario with its OmRF twin.
    Compare {
        dirf: String,
        omrf: String,
        /// Seed set; defaults to the scenario seed.
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
    },
    /// Estimate an AP position from SNR samples.
    Estimate {
        samples: PathBuf,
        #[arg(long, value_enum, default_value = "linear")]
        snr_scale: ScaleArg,
    },
    /// Replay handoff decisions along a trace.
    Select { trace: PathBuf, scenario: String },
    /// Run a scenario over every combination of the varied fields.
    Sweep {
        scenario: String,
        /// `field=v1,v2,...`; repeat to vary several fields.
        #[arg(long, required = true)]
        vary: Vec<Vary>,
    },
    /// List the bundled scenarios, or print one.
    Presets { name: Option<String> },
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            eprintln!("{}", e.render());
            eprintln!("{SYNOPSIS}");
            return 1;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(spec: &str, seed: Option<u64>) -> Result<Scenario> {
    let mut sc = presets::load(spec)?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    Ok(sc)
}

fn out_dir(dir: &Path) -> Result<&Path> {
    fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    Ok(dir)
}

fn write_effective(dir: &Path, stem: &str, sc: &Scenario) -> Result<PathBuf> {
    let path = dir.join(format!("{stem}.toml"));
    write_atomic(&path, to_toml(sc).as_bytes())?;
    Ok(path)
}

fn execute(cli: Cli) -> Result<()> {
    let fmt = cli.format;
    match cli.command {
        Command::Run { scenario, packets } => {
            let mut sc = load(&scenario, cli.seed)?;
            sc.record_packets |= packets;
            let dir = out_dir(&cli.out_dir)?;
            write_effective(dir, "effective", &sc)?;
            let r = run(&sc)?;
            emit_report(&r, dir, fmt)?;
            let tot = r.totals();
            println!(
                "{} seed {}: {} Mbps per client, {} handoffs, {} retransmissions -> {}",
                r.scenario,
                r.seed,
                g6(r.mean_client_throughput_mbps()),
                r.total_handoffs(),
                tot.retransmissions,
                dir.display()
            );
        }
        Command::Compare { dirf, omrf, seeds } => {
            let a = load(&dirf, cli.seed)?;
            let b = load(&omrf, cli.seed)?;
            let seeds = if seeds.is_empty() { vec![a.seed] } else { seeds };
            let dir = out_dir(&cli.out_dir)?;
            write_effective(dir, "effective_dirf", &a)?;
            write_effective(dir, "effective_omrf", &b)?;
            let r = compare(&a, &b, &seeds)?;
            compare_table(&r).write(dir, "compare", fmt)?;
            compare_summary_table(&r).write(dir, "compare_summary", fmt)?;
            println!("DiRF/OmRF throughput ratio {} over {} seeds", g6(r.ratio), seeds.len());
        }
        Command::Estimate { samples, snr_scale } => {
            let rows = read_samples(&samples)?;
            let scale = match snr_scale {
                ScaleArg::Linear => SnrScale::Linear,
                ScaleArg::Db => SnrScale::Db,
            };
            let cfg = EstimatorConfig::default();
            let set = SampleSet::from_db(rows.iter().map(|s| (s.pos(), s.snr_db)), scale, cfg.pair_strategy)?;
            let est = estimate_ap_position(&set, &cfg)?;
            let dir = out_dir(&cli.out_dir)?;
            let mut t = Table::new(&["x", "y", "z", "loss", "iterations", "converged"]);
            let p = est.position;
            t.push(vec![
                p.x.into(),
                p.y.into(),
                p.z.into(),
                est.loss.into(),
                est.iterations.into(),
                Cell::Bool(est.converged),
            ]);
            t.write(dir, "estimate", fmt)?;
            println!(
                "AP at ({}, {}, {}) after {} iterations",
                g6(p.x),
                g6(p.y),
                g6(p.z),
                est.iterations
            );
        }
        Command::Select { trace, scenario } => {
            let sc = load(&scenario, cli.seed)?;
            let tr = MobilityTrace::new(read_trace(&trace)?)?;
            let sel = select_on_trace(&sc, &tr)?;
            let dir = out_dir(&cli.out_dir)?;
            write_effective(dir, "effective", &sc)?;
            let mut t = Table::new(&["t", "from", "to"]);
            for d in &sel.decisions {
                t.push(vec![d.t.into(), d.from.into(), d.to.into()]);
            }
            t.write(dir, "decisions", fmt)?;
            println!("start AP {}, {} decisions", sel.start_ap, sel.decisions.len());
        }
        Command::Sweep { scenario, vary } => {
            let base = load(&scenario, cli.seed)?;
            let points = expand(&base, &vary)?;
            let dir = out_dir(&cli.out_dir)?;
            let reports = run_points(&points)?;
            points.par_iter().zip(&reports).try_for_each(|(p, r)| {
                let sub = dir.join(&p.label);
                out_dir(&sub)?;
                write_effective(&sub, "effective", &p.scenario)?;
                emit_report(r, &sub, fmt).map(|_| ())
            })?;
            let t = sweep_table(&points, &reports);
            t.write(dir, "sweep", fmt)?;
            for (p, r) in points.iter().zip(&reports) {
                println!("{}: {} Mbps per client", p.label, g6(r.mean_client_throughput_mbps()));
            }
        }
        Command::Presets { name } => match name {
            None => PRESETS.iter().for_each(|(n, _)| println!("{n}")),
            Some(n) => {
                let text = presets::preset_text(&n).ok_or_else(|| AppError::Usage(format!("unknown preset `{n}`")))?;
                print!("{text}");
            }
        },
    }
    Ok(())
}
