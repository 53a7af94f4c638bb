//! Task execution and artifact emission.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use super::config::{RunConfig, Task};
use super::svg;
use crate::decompose::leibniz_residual;
use crate::error::{Error, Result};
use crate::grid::bfld::{field_to_tensor, Tensor, FIELD_MAGIC};
use crate::grid::{bmo_norm, lp_norm, sobolev_norm, weak_lp_quasinorm, Grid};
use crate::operator::{apply, kernel_slice};
use crate::probes::families::pair;
use crate::probes::{
    bmo_probe, c_seminorm_decay_probe, decay_probe, dilation_check, domination_check, envelope,
    muckenhoupt_constant, opnorm_probe, opnorm_stability, scaling_probe, BallFamily, Comparison, DecayMode,
    Family, ProbeReport, WeightPair,
};
use crate::scatter::{convergence_report, residual_vs_ode, scatter_limit};
use crate::symbol::{Sampling, Symbol, SymbolClassParams};

/// Environment variable naming the default output directory.
pub const OUT_ENV: &str = "BILSYM_OUT";
pub const DEFAULT_OUT: &str = "bilsym-out";

/// What a finished run reports back.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub reports: Vec<ProbeReport>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }
}

#[derive(Serialize)]
struct ManifestEntry {
    path: String,
    bytes: u64,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest {
    schema: u32,
    files: Vec<ManifestEntry>,
}

#[derive(Serialize)]
struct Metadata {
    version: &'static str,
    started_unix: f64,
    finished_unix: f64,
    elapsed_seconds: f64,
    threads: usize,
    tasks: Vec<TaskTiming>,
}

#[derive(Serialize)]
struct TaskTiming {
    task: String,
    seconds: f64,
}

/// `--out`, then the config, then `$BILSYM_OUT`, then `./bilsym-out`.
pub fn resolve_out_dir(flag: Option<&Path>, config: &RunConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.out.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

struct Emitter {
    dir: PathBuf,
    files: Vec<PathBuf>,
}

impl Emitter {
    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes)?;
        self.files.push(path);
        Ok(())
    }

    fn tensor(&mut self, name: &str, t: &Tensor) -> Result<()> {
        let mut buf = Vec::new();
        t.write_to(&mut buf)?;
        self.write(name, &buf)
    }
}

/// Runs every task of a validated config, writing artifacts into `out_dir`.
/// Task errors become failing reports; only I/O errors abort the run.
pub fn run(config: &RunConfig, out_dir: &Path) -> Result<RunOutcome> {
    config.validate()?;
    fs::create_dir_all(out_dir)?;
    let started = unix_now();
    let clock = Instant::now();
    let mut em = Emitter { dir: out_dir.to_path_buf(), files: Vec::new() };
    let grid = config.grid.build()?;
    let symbol = match &config.symbol {
        Some(s) => Some(s.resolve(grid.dim())?),
        None => None,
    };
    let mut reports = Vec::new();
    let mut timings = Vec::new();
    for (i, task) in config.tasks.iter().enumerate() {
        let stem = format!("{:02}-{}", i, task.kind());
        let t0 = Instant::now();
        let report = match run_task(config, task, &grid, symbol.as_ref(), &stem, &mut em) {
            Ok(r) => r,
            Err(e) => {
                let mut r = ProbeReport::new(task.kind(), format!("task error: {e}"));
                r.note(e.to_string());
                r
            }
        };
        timings.push(TaskTiming { task: stem.clone(), seconds: t0.elapsed().as_secs_f64() });
        if config.emit.json {
            em.write(&format!("{stem}.json"), report.to_json()?.as_bytes())?;
        }
        if config.emit.csv || config.emit.svg {
            let mut csv = Vec::new();
            report.write_csv(&mut csv)?;
            if config.emit.csv {
                em.write(&format!("{stem}.csv"), &csv)?;
            }
            if config.emit.svg {
                if let Some(plot) = svg::plot_csv(&csv, &report.name)? {
                    em.write(&format!("{stem}.svg"), plot.as_bytes())?;
                }
            }
        }
        reports.push(report);
    }
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION"),
        started_unix: started,
        finished_unix: unix_now(),
        elapsed_seconds: clock.elapsed().as_secs_f64(),
        threads: rayon::current_num_threads(),
        tasks: timings,
    };
    em.write("metadata.json", serde_json::to_string_pretty(&meta).map_err(|e| Error::Format(e.to_string()))?.as_bytes())?;
    let mut entries = Vec::new();
    for path in &em.files {
        let bytes = fs::read(path)?;
        entries.push(ManifestEntry {
            path: path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
            bytes: bytes.len() as u64,
            sha256: hex(&Sha256::digest(&bytes)),
        });
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));
    let manifest = Manifest { schema: 1, files: entries };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(out_dir.join("manifest.json"), text)?;
    let mut files = em.files;
    files.push(out_dir.join("manifest.json"));
    Ok(RunOutcome { out_dir: out_dir.to_path_buf(), reports, files })
}

fn need(symbol: Option<&Symbol>) -> Result<&Symbol> {
    symbol.ok_or_else(|| Error::Config("task needs a symbol".into()))
}

fn run_task(
    config: &RunConfig,
    task: &Task,
    grid: &Grid,
    symbol: Option<&Symbol>,
    stem: &str,
    em: &mut Emitter,
) -> Result<ProbeReport> {
    let seed = config.seed;
    let tol = &config.tolerances;
    Ok(match task {
        Task::Apply { f, g } => {
            let sigma = need(symbol)?;
            let (f, g) = (f.load(grid, seed, 0)?, g.load(grid, seed, 1)?);
            let out = apply(sigma, &f, &g)?;
            em.tensor(&format!("{stem}.bfld"), &field_to_tensor(&out.field))?;
            let sup = out.field.max_abs();
            let mut r = ProbeReport::new("apply", "sup norm of T(f,g)")
                .param("symbol", sigma.name())
                .param("method", out.method)
                .param("points", grid.points())
                .param("dim", grid.dim())
                .columns(&["l1", "l2", "sup"]);
            r.push(vec![lp_norm(&out.field, 1.0)?, lp_norm(&out.field, 2.0)?, sup]);
            r.judge(sup, f64::INFINITY, 0.0, Comparison::AtMost)
        }
        Task::Kernel { base, taper } => {
            let sigma = need(symbol)?;
            let slice = kernel_slice(sigma, *base, grid, *taper)?;
            let len = grid.len();
            let tensor = Tensor {
                magic: *FIELD_MAGIC,
                points: vec![len as u32, len as u32],
                periods: vec![grid.period(), grid.period()],
                representation: 0,
                values: slice.values.clone(),
                tags: vec![grid.dim() as f64, grid.points() as f64, *base as f64, slice.taper.unwrap_or(0.0)],
            };
            em.tensor(&format!("{stem}.bfld"), &tensor)?;
            let peak = slice.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let mut r = ProbeReport::new("kernel", "max |K| on the slice")
                .param("symbol", sigma.name())
                .param("base", base)
                .param("taper", slice.taper)
                .param("points", grid.points())
                .columns(&["s", "envelope"]);
            for (s, k) in envelope(&slice, 2.0 * grid.spacing(), grid.period() / 2.0, 32, DecayMode::Power) {
                r.push(vec![s, k]);
            }
            r.judge(peak, f64::INFINITY, 0.0, Comparison::AtMost)
        }
        Task::Norm { input, p, s } => {
            let f = input.load(grid, seed, 0)?;
            let lp = lp_norm(&f, *p)?;
            let mut r = ProbeReport::new("norm", "L^p norm")
                .param("p", p)
                .param("s", s)
                .param("points", grid.points())
                .columns(&["lp", "weak_lp", "sobolev", "bmo"]);
            r.push(vec![lp, weak_lp_quasinorm(&f, *p)?, sobolev_norm(&f, *s, *p)?, bmo_norm(&f)?]);
            r.judge(lp, f64::INFINITY, 0.0, Comparison::AtMost)
        }
        Task::Leibniz { m, s, trials } => {
            let sigma = need(symbol)?;
            let rows: Vec<Result<f64>> = (0..*trials)
                .into_par_iter()
                .map(|i| {
                    let (f, g) = pair(grid, Family::Gaussian, seed, i);
                    leibniz_residual(sigma, *m, *s, &f, &g)
                })
                .collect();
            let mut r = ProbeReport::new("leibniz", "max relative reconstruction residual")
                .param("symbol", sigma.name())
                .param("m", m)
                .param("s", s)
                .param("trials", trials)
                .columns(&["trial", "residual"]);
            let mut worst = 0.0f64;
            for (i, v) in rows.into_iter().enumerate() {
                let v = v?;
                worst = worst.max(v);
                r.push(vec![i as f64, v]);
            }
            r.judge(worst, 0.0, tol.leibniz, Comparison::AtMost)
        }
        Task::Scatter { triple, times, r, p, t, dt, f, g } => {
            let pt = triple.build();
            let (f, g) = (f.load(grid, seed, 0)?, g.load(grid, seed, 1)?);
            let mut report = convergence_report(&pt, &f, &g, times, *r, *p)?;
            em.tensor(&format!("{stem}-limit.bfld"), &field_to_tensor(&scatter_limit(&pt, &f, &g)?))?;
            // With a backward linear flow there is no stable time-stepping
            // baseline; F and its limit are unaffected.
            if pt.backward_flow(grid) {
                report.note("RK4 baseline skipped: a(ξ) < 0 on the lattice, the u-flow runs backward");
            } else {
                let residual = residual_vs_ode(&pt, &f, &g, *t, *dt)?;
                report.note(residual.summary());
                if !residual.pass {
                    report.pass = false;
                }
            }
            report
        }
        Task::Opnorm { family, trials, bound, resolutions } => {
            let sigma = need(symbol)?;
            let exps = config.exponents.ok_or_else(|| Error::Config("opnorm needs [exponents]".into()))?.build()?;
            match resolutions {
                Some(res) => opnorm_stability(
                    sigma, exps, *family, *trials, grid.dim(), res, grid.period(), seed, tol.stability,
                )?,
                None => opnorm_probe(sigma, exps, *family, *trials, grid, seed, *bound, 0.0)?,
            }
        }
        Task::Scaling { rho, m, radii, trials, sharp } => {
            let comparison = if *sharp { Comparison::Within } else { Comparison::AtMost };
            scaling_probe(need(symbol)?, *rho, *m, radii, grid, seed, *trials, comparison, tol.scaling_slope)?
        }
        Task::Decay { m, rho, mode } => {
            let sigma = need(symbol)?;
            let declared = sigma.class();
            let class = SymbolClassParams {
                m: m.or(declared.map(|c| c.m)).ok_or_else(|| Error::Config("decay needs m".into()))?,
                rho: rho.or(declared.map(|c| c.rho)).ok_or_else(|| Error::Config("decay needs rho".into()))?,
                delta: declared.map_or(0.0, |c| c.delta),
            };
            decay_probe(sigma, class, *mode, grid, tol.decay_slope)?
        }
        Task::Dilation { k, f, g } => {
            let (f, g) = (f.load(grid, seed, 0)?, g.load(grid, seed, 1)?);
            dilation_check(need(symbol)?, &f, &g, *k, tol.dilation)?
        }
        Task::Domination { s, resolutions, trials, expect } => {
            let tolerance = match expect {
                crate::probes::DominationExpectation::Stable => tol.stability,
                crate::probes::DominationExpectation::Grows => tol.growth,
            };
            domination_check(need(symbol)?, *s, *trials, resolutions, grid.period(), seed, *expect, tolerance)?
        }
        Task::Bmo { resolutions, trials } => {
            bmo_probe(need(symbol)?, grid.dim(), *trials, resolutions, grid.period(), seed, tol.stability)?
        }
        Task::Cseminorm { rho, lambdas } => {
            c_seminorm_decay_probe(need(symbol)?, *rho, lambdas, &Sampling::new(grid.dim()), tol.cseminorm)?
        }
        Task::Weights { w1, w2, p1, p2, q, levels, stride, bound } => {
            let wp = WeightPair::new(w1.load(grid)?, w2.load(grid)?, *p1, *p2, *q)?;
            let family = BallFamily { levels: *levels, stride: *stride };
            let c = muckenhoupt_constant(&wp, family)?;
            let mut r = ProbeReport::new("weights", "bilinear Muckenhoupt constant")
                .param("p1", p1)
                .param("p2", p2)
                .param("q", q)
                .param("family", family)
                .columns(&["constant"]);
            r.push(vec![c]);
            r.judge(c, bound.unwrap_or(f64::INFINITY), 0.0, Comparison::AtMost)
        }
    })
}
