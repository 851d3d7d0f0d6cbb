//! Pipeline behind each subcommand. Every artifact is a pure function of the
//! model file and the flags, so repeated runs write byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use levy_barrier::generator::diagnostic_suite;
use levy_barrier::simulate::{
    default_rivals, dominance_experiment, simulate_paths, summarise_value, Terminal,
};
use levy_barrier::value::SearchGrid;
use levy_barrier::{
    linspace, BarrierValueFunction, ModelFile, ModelSpec, OptimalBarrier, ScaleFunction,
    SimulationConfig, SimulationEstimate, Strategy,
};

/// `x_min:x_max:n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_min.is_finite() && self.x_min >= 0.0) {
            bail!("grid x_min must be finite and ≥ 0, got {}", self.x_min);
        }
        if !(self.x_max.is_finite() && self.x_max > self.x_min) {
            bail!("grid x_max must be finite and > x_min, got {}", self.x_max);
        }
        if self.n_points < 3 {
            bail!("grid needs at least 3 points, got {}", self.n_points);
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        linspace(self.x_min, self.x_max, self.n_points)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, n] = parts.as_slice() else {
            return Err(format!("expected x_min:x_max:n, got {s:?}"));
        };
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let n = n.trim().parse::<usize>().map_err(|e| format!("{n:?}: {e}"))?;
        Ok(Self {
            x_min: num(lo)?,
            x_max: num(hi)?,
            n_points: n,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Solve,
    Check,
    Simulate {
        strategy: Option<String>,
        dump_paths: bool,
    },
    Dominance {
        rivals: Vec<String>,
        z: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McSettings {
    pub n_paths: usize,
    pub horizon: Option<f64>,
    pub seed: u64,
    pub x0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Generator residuals: the scale equation (relative) and HJB (absolute).
    pub generator: f64,
    /// Slack for second-difference shape tests.
    pub shape: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            generator: 1e-6,
            shape: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model_path: PathBuf,
    pub command: Command,
    pub output_dir: PathBuf,
    /// `None` means `0.01 : 3b*+5 : 200`.
    pub grid: Option<GridSpec>,
    pub mc: Option<McSettings>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        if !self.model_path.is_file() {
            bail!("model file {} does not exist", self.model_path.display());
        }
        if let Some(g) = &self.grid {
            g.validate()?;
        }
        for (name, t) in [("generator", self.tolerances.generator), ("shape", self.tolerances.shape)] {
            if !(t.is_finite() && t >= 0.0) {
                bail!("{name} tolerance must be finite and ≥ 0, got {t}");
            }
        }
        Ok(())
    }
}

/// Everything downstream of the model file: the scale function, `b*` and
/// `V_{b*}`.
struct Solved {
    model: ModelSpec,
    optimal: OptimalBarrier,
    value: BarrierValueFunction,
}

impl Solved {
    fn scale(&self) -> &ScaleFunction {
        self.value.scale()
    }

    fn b_star(&self) -> f64 {
        self.optimal.b_star
    }

    fn grid(&self, spec: Option<GridSpec>) -> GridSpec {
        spec.unwrap_or(GridSpec {
            x_min: 0.01,
            x_max: 3.0 * self.b_star() + 5.0,
            n_points: 200,
        })
    }
}

fn load(path: &Path) -> Result<Solved> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let model = ModelFile::parse(&text)
        .and_then(|f| f.to_model())
        .with_context(|| format!("loading {}", path.display()))?;
    let report = model.lundberg_check();
    if !report.passed() {
        bail!(
            "{} fails the Lundberg condition: {}",
            path.display(),
            report.explain()
        );
    }
    let sf = ScaleFunction::new(&model)?;
    let (optimal, value) = BarrierValueFunction::optimal(sf)?;
    Ok(Solved {
        model,
        optimal,
        value,
    })
}

/// Runs one subcommand. `Ok(false)` means every artifact was written but a
/// requested check failed.
pub fn run(config: &RunConfig) -> Result<bool> {
    config.validate()?;
    let solved = load(&config.model_path)?;
    fs::create_dir_all(&config.output_dir)
        .with_context(|| format!("creating {}", config.output_dir.display()))?;
    match &config.command {
        Command::Solve => solve(config, &solved),
        Command::Check => check(config, &solved),
        Command::Simulate {
            strategy,
            dump_paths,
        } => simulate(config, &solved, strategy.as_deref(), *dump_paths),
        Command::Dominance { rivals, z } => dominance(config, &solved, rivals, *z),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serialises");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    model: ModelFile,
    rho: f64,
    roots: &'a [f64],
    coeffs: &'a [f64],
    sum_coeffs: f64,
    b_star: f64,
    value_at_b_star: f64,
    hprime_min: f64,
    search: &'a SearchGrid,
}

fn solve(config: &RunConfig, s: &Solved) -> Result<bool> {
    let e = s.scale().expansion();
    let out = SolveOutput {
        model: ModelFile::from(&s.model),
        rho: e.rho,
        roots: &e.roots,
        coeffs: &e.coeffs,
        sum_coeffs: e.sum_coeffs(),
        b_star: s.b_star(),
        value_at_b_star: s.value.value_at(s.b_star()),
        hprime_min: s.optimal.hprime_min,
        search: &s.optimal.search,
    };
    let dir = &config.output_dir;
    write(dir, "solve.json", &to_json(&out))?;

    let xs = s.grid(config.grid).points();
    let mut scale = String::from("x,h,h_prime,h_second\n");
    for [x, h, h1, h2] in s.scale().table(&xs)? {
        writeln!(scale, "{x},{h},{h1},{h2}")?;
    }
    write(dir, "scale.csv", &scale)?;
    let mut value = String::from("x,value,gradient\n");
    for [x, v, g] in s.value.table(&xs) {
        writeln!(value, "{x},{v},{g}")?;
    }
    write(dir, "value.csv", &value)?;
    println!(
        "rho = {}  roots = {:?}  b* = {}  V(b*) = {}",
        out.rho, out.roots, out.b_star, out.value_at_b_star
    );
    Ok(true)
}

fn check(config: &RunConfig, s: &Solved) -> Result<bool> {
    if s.model.positive().is_active() {
        eprintln!("note: the model has upward jumps; barrier value HJB checks are skipped");
    }
    let grid = s.grid(config.grid);
    let tol = config.tolerances;
    let report = diagnostic_suite(&s.value, &grid.points(), tol.generator, tol.shape)?;
    write(&config.output_dir, "diagnostics.json", &(report.to_json() + "\n"))?;
    print!("{}", report.render_table());
    Ok(report.pass())
}

fn mc_config(config: &RunConfig, s: &Solved) -> Result<(SimulationConfig, f64)> {
    let mc = config.mc.context("Monte Carlo settings missing")?;
    let horizon = mc.horizon.unwrap_or_else(|| SimulationConfig::default_horizon(&s.model));
    let x0 = mc.x0.unwrap_or(s.b_star());
    Ok((SimulationConfig::new(mc.n_paths, horizon, mc.seed), x0))
}

#[derive(Serialize)]
struct SimulateOutput {
    strategy: Strategy,
    x0: f64,
    #[serde(flatten)]
    estimate: SimulationEstimate,
    /// Closed-form `V_b(x0)` when the strategy is a barrier and the model
    /// has no upward jumps.
    analytic: Option<f64>,
}

fn simulate(config: &RunConfig, s: &Solved, strategy: Option<&str>, dump: bool) -> Result<bool> {
    let (mc, x0) = mc_config(config, s)?;
    let strategy = match strategy {
        Some(text) => text.parse::<Strategy>()?,
        None => Strategy::barrier(s.b_star()),
    };
    let paths = simulate_paths(&s.model, strategy, x0, &mc)?;
    let estimate = summarise_value(&s.model, &paths, &mc);
    let analytic = match strategy {
        Strategy::Barrier { level } if !s.model.positive().is_active() => {
            Some(BarrierValueFunction::new(s.scale().clone(), level)?.value_at(x0))
        }
        Strategy::NoDividends => Some(0.0),
        _ => None,
    };
    let out = SimulateOutput {
        strategy,
        x0,
        estimate,
        analytic,
    };
    write(&config.output_dir, "simulate.json", &to_json(&out))?;
    if dump {
        let mut csv = String::from(
            "path,ruin_time,discounted_dividends,total_dividends,terminal,terminal_surplus,max_surplus\n",
        );
        for (i, p) in paths.iter().enumerate() {
            let ruin = p.ruin_time.map(|t| t.to_string()).unwrap_or_default();
            let terminal = match p.terminal {
                Terminal::Ruined => "ruined",
                Terminal::Horizon => "horizon",
            };
            writeln!(
                csv,
                "{i},{ruin},{},{},{terminal},{},{}",
                p.discounted_dividends, p.total_dividends, p.terminal_surplus, p.max_surplus
            )?;
        }
        write(&config.output_dir, "paths.csv", &csv)?;
    }
    println!(
        "{strategy} from x0 = {x0}: mean = {} ± {} (n = {}, bias ≤ {})",
        estimate.mean, estimate.std_error, estimate.n_paths, estimate.bias_bound
    );
    Ok(true)
}

fn dominance(config: &RunConfig, s: &Solved, rivals: &[String], z: f64) -> Result<bool> {
    let (mc, x0) = mc_config(config, s)?;
    let rivals = if rivals.is_empty() {
        default_rivals(&s.model, s.b_star())
    } else {
        rivals
            .iter()
            .map(|r| r.parse::<Strategy>())
            .collect::<levy_barrier::Result<_>>()?
    };
    let report = dominance_experiment(&s.model, x0, Strategy::barrier(s.b_star()), &rivals, &mc, z)?;
    write(&config.output_dir, "dominance.json", &to_json(&report))?;
    for row in &report.rows {
        println!(
            "{:>24}  {}  difference = {:+.6} ± {:.6}",
            row.strategy.to_string(),
            if row.pass { "PASS" } else { "FAIL" },
            row.difference,
            row.difference_se
        );
    }
    Ok(report.pass)
}
