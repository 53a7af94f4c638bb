//! Run configuration, read from TOML.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::decompose::leibniz_split;
use crate::error::{Error, Result};
use crate::grid::bfld::{load_field, Tensor};
use crate::grid::{ComplexField, Grid};
use crate::operator::Taper;
use crate::probes::families::{draw, trial_rng};
use crate::probes::{power_weight, DecayMode, DominationExpectation, Family, LebesgueExponents};
use crate::scatter::PhaseTriple;
use crate::symbol::tabulated::from_table;
use crate::symbol::{builtin, Builtin, Symbol};
use crate::tolerances::Tolerances;

fn two_pi() -> f64 {
    std::f64::consts::TAU
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub symbol: Option<SymbolSpec>,
    #[serde(default)]
    pub exponents: Option<ExponentSpec>,
    #[serde(default)]
    pub emit: Emit,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default, rename = "task")]
    pub tasks: Vec<Task>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub points: usize,
    #[serde(default = "two_pi")]
    pub period: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { dim: 1, points: 128, period: two_pi() }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.dim, self.points, self.period)
    }
}

/// `"bracket(-1)"`, a catalogue table such as `{ name = "bracket", m = -1 }`,
/// or `{ file = "sigma.bsym" }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSpec {
    Compact(String),
    File { file: PathBuf },
    Catalogue(Builtin),
}

impl SymbolSpec {
    pub fn resolve(&self, dim: usize) -> Result<Symbol> {
        match self {
            SymbolSpec::Compact(text) => builtin(&Builtin::parse(text)?, dim),
            SymbolSpec::Catalogue(b) => builtin(b, dim),
            SymbolSpec::File { file } => {
                let mut r = std::fs::File::open(file)
                    .map_err(|e| Error::Config(format!("cannot open {}: {e}", file.display())))?;
                let (sym, grid) = from_table(&Tensor::read_from(&mut r)?)?;
                if grid.dim() != dim {
                    return Err(Error::Config(format!("symbol table {} is {}-dimensional", file.display(), grid.dim())));
                }
                Ok(sym)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentSpec {
    pub p1: f64,
    pub p2: f64,
}

impl ExponentSpec {
    pub fn build(&self) -> Result<LebesgueExponents> {
        LebesgueExponents::holder(self.p1, self.p2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Emit {
    pub json: bool,
    pub csv: bool,
    pub svg: bool,
}

impl Default for Emit {
    fn default() -> Self {
        Self { json: true, csv: true, svg: false }
    }
}

/// An input field: a family draw or a `.bfld` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputSpec {
    File { file: PathBuf },
    Draw { family: Family, #[serde(default)] trial: usize },
}

impl InputSpec {
    pub fn gaussian(trial: usize) -> Self {
        InputSpec::Draw { family: Family::Gaussian, trial }
    }

    /// `stream` separates the two slots of a pair drawn with the same trial.
    pub fn load(&self, grid: &Grid, seed: u64, stream: usize) -> Result<ComplexField> {
        match self {
            InputSpec::File { file } => {
                let f = load_field(file)?;
                if f.grid() != grid {
                    return Err(Error::Config(format!("{} was written on a different grid", file.display())));
                }
                Ok(f)
            }
            &InputSpec::Draw { family, trial } => {
                let mut rng = trial_rng(seed, 2 * trial + stream);
                Ok(draw(grid, family, trial, &mut rng))
            }
        }
    }

    fn check(&self) -> Result<()> {
        if let InputSpec::File { file } = self {
            if !file.is_file() {
                return Err(Error::Config(format!("input file {} does not exist", file.display())));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TripleName {
    HeatHalfwave,
    LaplaceHeatHalfwave,
    Zero,
}

impl TripleName {
    pub fn build(self) -> PhaseTriple {
        match self {
            TripleName::HeatHalfwave => PhaseTriple::heat_halfwave(),
            TripleName::LaplaceHeatHalfwave => PhaseTriple::laplace_heat_halfwave(),
            TripleName::Zero => PhaseTriple::zero(),
        }
    }
}

/// A weight: `|x − c|^power` about the torus center, or a `.bfld` file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightSpec {
    Power { power: f64 },
    File { file: PathBuf },
}

impl WeightSpec {
    pub fn load(&self, grid: &Grid) -> Result<ComplexField> {
        match self {
            &WeightSpec::Power { power } => Ok(power_weight(grid, power)),
            WeightSpec::File { file } => InputSpec::File { file: file.clone() }.load(grid, 0, 0),
        }
    }
}

fn d_trials() -> usize {
    20
}
fn d_times() -> Vec<f64> {
    vec![0.5, 1.0, 2.0, 4.0, 8.0]
}
fn d_p() -> f64 {
    2.0
}
fn d_one() -> f64 {
    1.0
}
fn d_dt() -> f64 {
    1e-2
}
fn d_taper() -> Taper {
    Taper::Auto
}
fn d_triple() -> TripleName {
    TripleName::HeatHalfwave
}
fn d_scatter_input() -> InputSpec {
    InputSpec::Draw { family: Family::LowTrig, trial: 0 }
}
fn d_gauss0() -> InputSpec {
    InputSpec::gaussian(0)
}
fn d_family() -> Family {
    Family::Gaussian
}
fn d_mode() -> DecayMode {
    DecayMode::Power
}
fn d_resolutions() -> Vec<usize> {
    vec![64, 128, 256]
}
fn d_lambdas() -> Vec<f64> {
    vec![1.0, 0.5, 0.25]
}
fn d_levels() -> u32 {
    6
}
fn d_stride() -> usize {
    1
}
fn d_expect() -> DominationExpectation {
    DominationExpectation::Stable
}

/// One unit of work. Every task writes a report; some also write fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// `T_σ(f,g)`, written as a `.bfld` field.
    Apply {
        #[serde(default = "d_gauss0")]
        f: InputSpec,
        #[serde(default = "d_gauss0")]
        g: InputSpec,
    },
    /// Kernel slice at node `base`, written as a `.bfld` tensor.
    Kernel {
        #[serde(default)]
        base: usize,
        #[serde(default = "d_taper")]
        taper: Taper,
    },
    /// `L^p`, weak `L^p`, `W^{s,p}` and BMO norms of a field.
    Norm {
        #[serde(default = "d_gauss0")]
        input: InputSpec,
        #[serde(default = "d_p")]
        p: f64,
        #[serde(default)]
        s: f64,
    },
    /// Leibniz reconstruction residual over random Gaussian pairs.
    Leibniz {
        m: f64,
        s: f64,
        #[serde(default = "d_trials")]
        trials: usize,
    },
    /// Scattering gap table, RK4 residual, and the limit field.
    Scatter {
        #[serde(default = "d_triple")]
        triple: TripleName,
        #[serde(default = "d_times")]
        times: Vec<f64>,
        #[serde(default)]
        r: f64,
        #[serde(default = "d_p")]
        p: f64,
        #[serde(default = "d_one")]
        t: f64,
        #[serde(default = "d_dt")]
        dt: f64,
        #[serde(default = "d_scatter_input")]
        f: InputSpec,
        #[serde(default = "d_scatter_input")]
        g: InputSpec,
    },
    Opnorm {
        #[serde(default = "d_family")]
        family: Family,
        #[serde(default = "d_trials")]
        trials: usize,
        #[serde(default)]
        bound: Option<f64>,
        /// When set, runs the resolution-stability variant.
        #[serde(default)]
        resolutions: Option<Vec<usize>>,
    },
    Scaling {
        rho: f64,
        m: f64,
        radii: Vec<f64>,
        #[serde(default = "d_trials")]
        trials: usize,
        /// Require the rate to be attained, not just bounded.
        #[serde(default)]
        sharp: bool,
    },
    Decay {
        /// Class parameters; the symbol's declared class when omitted.
        #[serde(default)]
        m: Option<f64>,
        #[serde(default)]
        rho: Option<f64>,
        #[serde(default = "d_mode")]
        mode: DecayMode,
    },
    Dilation {
        k: u32,
        #[serde(default = "d_gauss0")]
        f: InputSpec,
        #[serde(default = "d_gauss0")]
        g: InputSpec,
    },
    Domination {
        s: f64,
        #[serde(default = "d_resolutions")]
        resolutions: Vec<usize>,
        #[serde(default = "d_trials")]
        trials: usize,
        #[serde(default = "d_expect")]
        expect: DominationExpectation,
    },
    Bmo {
        #[serde(default = "d_resolutions")]
        resolutions: Vec<usize>,
        #[serde(default = "d_trials")]
        trials: usize,
    },
    Cseminorm {
        rho: f64,
        #[serde(default = "d_lambdas")]
        lambdas: Vec<f64>,
    },
    Weights {
        w1: WeightSpec,
        w2: WeightSpec,
        p1: f64,
        p2: f64,
        q: f64,
        #[serde(default = "d_levels")]
        levels: u32,
        #[serde(default = "d_stride")]
        stride: usize,
        #[serde(default)]
        bound: Option<f64>,
    },
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::Apply { .. } => "apply",
            Task::Kernel { .. } => "kernel",
            Task::Norm { .. } => "norm",
            Task::Leibniz { .. } => "leibniz",
            Task::Scatter { .. } => "scatter",
            Task::Opnorm { .. } => "opnorm",
            Task::Scaling { .. } => "scaling",
            Task::Decay { .. } => "decay",
            Task::Dilation { .. } => "dilation",
            Task::Domination { .. } => "domination",
            Task::Bmo { .. } => "bmo",
            Task::Cseminorm { .. } => "cseminorm",
            Task::Weights { .. } => "weights",
        }
    }

    pub fn needs_symbol(&self) -> bool {
        !matches!(self, Task::Norm { .. } | Task::Scatter { .. } | Task::Weights { .. })
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(format!("{name} must be finite, got {v}")))
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| bad(e.message().to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks everything that can be checked without running a task.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid.build().map_err(|e| bad(e.to_string()))?;
        if self.threads == Some(0) {
            return Err(bad("threads must be at least 1"));
        }
        if self.tasks.is_empty() {
            return Err(bad("no tasks selected"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("scaling_slope", t.scaling_slope),
            ("decay_slope", t.decay_slope),
            ("stability", t.stability),
            ("growth", t.growth),
            ("dilation", t.dilation),
            ("leibniz", t.leibniz),
            ("cseminorm", t.cseminorm),
            ("c_sigma", t.c_sigma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(bad(format!("tolerance {name} must be finite and nonnegative")));
            }
        }
        let symbol = match &self.symbol {
            Some(s) => Some(s.resolve(grid.dim()).map_err(|e| bad(e.to_string()))?),
            None => None,
        };
        if let Some(e) = &self.exponents {
            e.build().map_err(|e| bad(e.to_string()))?;
        }
        for task in &self.tasks {
            let kind = task.kind();
            if task.needs_symbol() && symbol.is_none() {
                return Err(bad(format!("task `{kind}` needs a [symbol]")));
            }
            self.validate_task(task, &grid, symbol.as_ref()).map_err(|e| match e {
                Error::Config(msg) => bad(format!("task `{kind}`: {msg}")),
                e => bad(format!("task `{kind}`: {e}")),
            })?;
        }
        Ok(())
    }

    fn validate_task(&self, task: &Task, grid: &Grid, symbol: Option<&Symbol>) -> Result<()> {
        let x_independent = || -> Result<()> { symbol.map_or(Ok(()), |s| s.require_x_independent()) };
        match task {
            Task::Apply { f, g } | Task::Dilation { f, g, .. } => {
                f.check()?;
                g.check()?;
                if matches!(task, Task::Dilation { .. }) {
                    x_independent()?;
                }
            }
            Task::Kernel { base, .. } => {
                if *base >= grid.len() {
                    return Err(bad(format!("base node {base} is off the grid")));
                }
            }
            Task::Norm { input, p, s } => {
                input.check()?;
                finite("s", *s)?;
                if !(*p > 0.0) {
                    return Err(bad(format!("p must be positive, got {p}")));
                }
            }
            Task::Leibniz { m, s, trials } => {
                finite("m", *m)?;
                if *trials == 0 {
                    return Err(bad("trials must be positive"));
                }
                leibniz_split(symbol.expect("checked"), *m, *s)?;
            }
            Task::Scatter { times, p, r, t, dt, f, g, .. } => {
                f.check()?;
                g.check()?;
                finite("r", *r)?;
                if times.len() < 2 || times.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
                    return Err(bad("scatter needs at least two nonnegative finite times"));
                }
                if !(*p >= 1.0) || !(*t >= 0.0) || !(*dt > 0.0) {
                    return Err(bad("scatter needs p ≥ 1, t ≥ 0 and dt > 0"));
                }
            }
            Task::Opnorm { trials, resolutions, .. } => {
                if self.exponents.is_none() {
                    return Err(bad("opnorm needs [exponents]"));
                }
                if *trials < 20 {
                    return Err(bad(format!("opnorm needs at least 20 trials, got {trials}")));
                }
                if let Some(r) = resolutions {
                    if r.len() < 2 {
                        return Err(bad("stability needs at least two resolutions"));
                    }
                    for &n in r {
                        Grid::new(grid.dim(), n, grid.period())?;
                    }
                }
            }
            Task::Scaling { rho, m, radii, .. } => {
                finite("m", *m)?;
                finite("rho", *rho)?;
                x_independent()?;
                if radii.len() < 3 || radii.windows(2).any(|w| !(w[1] > w[0])) || !(radii[0] > 0.0) {
                    return Err(bad("radii must be at least three positive ascending values"));
                }
                if 4.0 * radii[radii.len() - 1] > grid.nyquist() {
                    return Err(bad(format!("outer annulus radius exceeds the Nyquist radius {}", grid.nyquist())));
                }
            }
            Task::Decay { m, rho, .. } => {
                let declared = symbol.and_then(|s| s.class());
                if (m.is_none() || rho.is_none()) && declared.is_none() {
                    return Err(bad("decay needs m and rho when the symbol declares no class"));
                }
            }
            Task::Domination { s, resolutions, .. } => {
                if grid.dim() != 1 {
                    return Err(bad("domination runs in dimension 1"));
                }
                if !(*s > 0.0 && *s < 2.0) {
                    return Err(bad(format!("s must lie in (0, 2n), got {s}")));
                }
                if resolutions.len() < 2 {
                    return Err(bad("domination needs two resolutions"));
                }
                x_independent()?;
            }
            Task::Bmo { resolutions, .. } => {
                for &n in resolutions {
                    Grid::new(grid.dim(), n, grid.period())?;
                }
            }
            Task::Cseminorm { rho, lambdas } => {
                finite("rho", *rho)?;
                x_independent()?;
                if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0 && l <= 1.0)) {
                    return Err(bad("lambdas must lie in (0, 1]"));
                }
            }
            Task::Weights { w1, w2, p1, p2, q, .. } => {
                for w in [w1, w2] {
                    if let WeightSpec::File { file } = w {
                        InputSpec::File { file: file.clone() }.check()?;
                    }
                }
                if !(*p1 >= 1.0 && *p2 >= 1.0 && *q > 0.0) || !(p1.is_finite() && p2.is_finite() && q.is_finite()) {
                    return Err(bad("weights need finite p₁, p₂ ≥ 1 and q > 0"));
                }
            }
        }
        Ok(())
    }
}
