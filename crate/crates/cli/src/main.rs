//! Command line front end for the convergence studies.
//!
//! Exit codes: 0 on success, 1 when a solve fails, 2 on configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use slabtime::study::{
    format_comparison_table, run_study, run_support_type_comparison, RefineMode, StudyConfig,
    StudyRow,
};
use slabtime::{Error, SupportType};

#[derive(Parser)]
#[command(name = "slabtime", version, about = "Space-time dG heat equation studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a refinement study on the moving-bump manufactured solution.
    Study(StudyArgs),
    /// Compare the temporal support-point families against Gauss-Lobatto.
    Compare(StudyArgs),
}

#[derive(Args)]
struct StudyArgs {
    /// Path to a key=value configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Override the refinement mode (h, k or kh).
    #[arg(long, value_name = "MODE")]
    refine_mode: Option<String>,
    /// Override the temporal polynomial degree.
    #[arg(long)]
    r: Option<usize>,
    /// Override the spatial polynomial degree.
    #[arg(long)]
    s: Option<usize>,
    /// Override the temporal support-point family
    /// (lobatto, legendre, radau-left or radau-right).
    #[arg(long, value_name = "FAMILY")]
    support_type: Option<String>,
    /// Override the slab size bound (0 solves all intervals at once).
    #[arg(long, value_name = "N")]
    nmax: Option<usize>,
    /// Override the number of refinement steps.
    #[arg(long, value_name = "N")]
    steps: Option<usize>,
    /// Write the study table to this CSV file.
    #[arg(long, value_name = "PATH")]
    csv: Option<PathBuf>,
    /// Write VTK slices of each level's solution into this directory.
    #[arg(long, value_name = "DIR")]
    vtk: Option<PathBuf>,
}

impl StudyArgs {
    fn into_config(self) -> Result<StudyConfig, Error> {
        let mut cfg = StudyConfig::from_file(&self.config)?;
        if let Some(mode) = self.refine_mode {
            cfg.refine_mode = RefineMode::parse(&mode)?;
        }
        if let Some(r) = self.r {
            cfg.temporal_degree = r;
        }
        if let Some(s) = self.s {
            cfg.spatial_degree = s;
        }
        if let Some(family) = self.support_type {
            cfg.support_type = SupportType::parse(&family)?;
        }
        if let Some(nmax) = self.nmax {
            cfg.n_max = nmax;
        }
        if let Some(steps) = self.steps {
            cfg.n_refinement_steps = steps;
        }
        if let Some(csv) = self.csv {
            cfg.csv_path = Some(csv);
        }
        if let Some(vtk) = self.vtk {
            cfg.vtk_dir = Some(vtk);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn print_table(rows: &[StudyRow]) {
    println!(
        "{:>5} {:>6} {:>8} {:>9} {:>14} {:>7} {:>9}",
        "level", "M", "Nx", "dofs", "error", "eoc", "seconds"
    );
    for row in rows {
        let eoc = row.eoc.map_or_else(|| "-".into(), |v| format!("{v:.3}"));
        println!(
            "{:>5} {:>6} {:>8} {:>9} {:>14.6e} {:>7} {:>9.3}",
            row.level, row.m, row.n_x, row.dofs, row.error, eoc, row.seconds
        );
    }
}

fn run(cli: Cli) -> Result<(), (u8, Error)> {
    match cli.command {
        Command::Study(args) => {
            let cfg = args.into_config().map_err(|e| (2, e))?;
            let rows = run_study(&cfg).map_err(|e| (1, e))?;
            print_table(&rows);
        }
        Command::Compare(args) => {
            let cfg = args.into_config().map_err(|e| (2, e))?;
            let rows = run_support_type_comparison(&cfg).map_err(|e| (1, e))?;
            print!("{}", format_comparison_table(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, err)) => {
            eprintln!("error: {err}");
            ExitCode::from(code)
        }
    }
}
