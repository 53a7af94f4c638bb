//! Batch front end: configuration, task orchestration, report emission.
//!
//! A run is described by a TOML file (see [`RunConfig`]); the single-task
//! subcommands build the same structure from flags, with `--set key=value`
//! filling task parameters. Exit status is 0 when every report passes, 1 when
//! some report fails, and 2 on configuration errors.

mod config;
mod run;
pub mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{
    Emit, ExponentSpec, GridSpec, InputSpec, RunConfig, SymbolSpec, Task, TripleName, WeightSpec,
};
pub use run::{resolve_out_dir, run, RunOutcome, DEFAULT_OUT, OUT_ENV};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "bilsym", version, about = "Bilinear pseudodifferential operators on the torus")]
pub struct Cli {
    /// Output directory (overrides the config and $BILSYM_OUT).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for data-parallel sweeps.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run every task of a config file.
    Run { config: PathBuf },
    /// Apply a symbol to two inputs and save the field.
    Apply(TaskArgs),
    /// Compute a kernel slice.
    Kernel(TaskArgs),
    /// Norms of a field.
    Norm(TaskArgs),
    /// Check the Leibniz reconstruction.
    Leibniz(TaskArgs),
    /// Scattering gap table and limit field.
    Scatter(TaskArgs),
    /// Run a single probe.
    Probe {
        #[arg(value_enum)]
        kind: ProbeKind,
        #[command(flatten)]
        args: TaskArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProbeKind {
    Opnorm,
    Scaling,
    Decay,
    Dilation,
    Domination,
    Bmo,
    Cseminorm,
    Weights,
}

#[derive(Debug, Default, Args)]
pub struct TaskArgs {
    /// Base config; its tasks are replaced by this subcommand's task.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Catalogue symbol, e.g. `bracket(-1)`.
    #[arg(long)]
    pub symbol: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub period: Option<f64>,
    #[arg(long)]
    pub p1: Option<f64>,
    #[arg(long)]
    pub p2: Option<f64>,
    /// Task parameter as TOML, e.g. `--set radii=[4,8,16]` or `--set f.family=steps`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Also write SVG plots.
    #[arg(long)]
    pub svg: bool,
}

fn parse_assignment(text: &str) -> Result<toml::Table> {
    let (key, value) =
        text.split_once('=').ok_or_else(|| Error::Config(format!("expected KEY=VALUE, got `{text}`")))?;
    let (key, value) = (key.trim(), value.trim());
    toml::from_str::<toml::Table>(&format!("{key} = {value}"))
        .or_else(|_| toml::from_str::<toml::Table>(&format!("{key} = {}", toml::Value::String(value.into()))))
        .map_err(|e| Error::Config(format!("bad assignment `{text}`: {}", e.message())))
}

fn merge(into: &mut toml::Table, from: toml::Table) {
    for (k, v) in from {
        match (into.get_mut(&k), v) {
            (Some(toml::Value::Table(a)), toml::Value::Table(b)) => merge(a, b),
            (_, v) => {
                into.insert(k, v);
            }
        }
    }
}

impl TaskArgs {
    /// Config with a single task of `kind`.
    pub fn to_config(&self, kind: &str) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig {
                seed: 0,
                threads: None,
                out: None,
                grid: GridSpec::default(),
                symbol: None,
                exponents: None,
                emit: Emit::default(),
                tolerances: Default::default(),
                tasks: Vec::new(),
            },
        };
        if let Some(s) = &self.symbol {
            cfg.symbol = Some(SymbolSpec::Compact(s.clone()));
        }
        if let Some(d) = self.dim {
            cfg.grid.dim = d;
        }
        if let Some(n) = self.points {
            cfg.grid.points = n;
        }
        if let Some(l) = self.period {
            cfg.grid.period = l;
        }
        match (self.p1, self.p2, cfg.exponents) {
            (Some(p1), Some(p2), _) => cfg.exponents = Some(ExponentSpec { p1, p2 }),
            (Some(p1), None, Some(e)) => cfg.exponents = Some(ExponentSpec { p1, ..e }),
            (None, Some(p2), Some(e)) => cfg.exponents = Some(ExponentSpec { p2, ..e }),
            (None, None, _) => {}
            _ => return Err(Error::Config("give both --p1 and --p2".into())),
        }
        if self.svg {
            cfg.emit.svg = true;
        }
        let mut table = toml::Table::new();
        table.insert("kind".into(), toml::Value::String(kind.into()));
        for a in &self.set {
            merge(&mut table, parse_assignment(a)?);
        }
        let task: Task = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(format!("task `{kind}`: {}", e.message())))?;
        cfg.tasks = vec![task];
        Ok(cfg)
    }
}

impl Cli {
    /// The config this invocation describes, with global flags applied.
    pub fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.command {
            Command::Run { config } => RunConfig::load(config)?,
            Command::Apply(a) => a.to_config("apply")?,
            Command::Kernel(a) => a.to_config("kernel")?,
            Command::Norm(a) => a.to_config("norm")?,
            Command::Leibniz(a) => a.to_config("leibniz")?,
            Command::Scatter(a) => a.to_config("scatter")?,
            Command::Probe { kind, args } => {
                let name = kind.to_possible_value().map(|v| v.get_name().to_owned()).unwrap_or_default();
                args.to_config(&name)?
            }
        };
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(t) = self.threads {
            cfg.threads = Some(t);
        }
        Ok(cfg)
    }

    pub fn execute(&self) -> Result<RunOutcome> {
        let cfg = self.config()?;
        cfg.validate()?;
        let out = resolve_out_dir(self.out.as_deref(), &cfg);
        match cfg.threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Config(e.to_string()))?
                .install(|| run(&cfg, &out)),
            None => run(&cfg, &out),
        }
    }
}

/// Entry point of the `bilsym` binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.execute() {
        Ok(outcome) => {
            for r in &outcome.reports {
                println!("{}", r.summary());
            }
            println!("reports in {}", outcome.out_dir.display());
            if outcome.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("bilsym: {}", e.to_string().replace('\n', " "));
            ExitCode::from(2)
        }
    }
}
