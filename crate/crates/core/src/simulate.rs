//! Monte Carlo estimation of discounted dividends and ruin probabilities.
//!
//! Paths are independent. Path `i` draws from a ChaCha8 stream selected by
//! `i` under the master seed, so estimates are reproducible regardless of
//! how the paths are scheduled across threads, and two strategies simulated
//! with the same seed see the same uncontrolled path (common random numbers).
//!
//! Without a Gaussian part the path is simulated event by event: exponential
//! waiting times, linear drift in between, and barrier or threshold
//! payments integrated in closed form. With `σ > 0` the diffusion is
//! advanced by Euler steps of size `min(1e-3, 0.01/λ)`, jumps still land at
//! their exact times, and barrier and ruin crossings inside a step are
//! located by linear interpolation. The Brownian supremum within a step is
//! not corrected for, which biases barrier and ruin events slightly low.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::roots::find_root;

/// Parametric dividend strategies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Strategy {
    /// Pay everything above `level`; a lump `x − level` at time 0 when the
    /// initial capital exceeds it.
    Barrier { level: f64 },
    /// Pay continuously at `rate` while the surplus is above `level`.
    Threshold { level: f64, rate: f64 },
    NoDividends,
}

impl Strategy {
    pub fn barrier(level: f64) -> Self {
        Self::Barrier { level }
    }

    pub fn threshold(level: f64, rate: f64) -> Self {
        Self::Threshold { level, rate }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Barrier { level } if !(level.is_finite() && level >= 0.0) => Err(
                Error::InvalidInput(format!("barrier level must be finite and ≥ 0, got {level}")),
            ),
            Self::Threshold { level, rate }
                if !(level.is_finite() && level >= 0.0 && rate.is_finite() && rate > 0.0) =>
            {
                Err(Error::InvalidInput(format!(
                    "threshold needs finite level ≥ 0 and rate > 0, got ({level}, {rate})"
                )))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Barrier { level } => write!(f, "barrier:{level}"),
            Self::Threshold { level, rate } => write!(f, "threshold:{level}:{rate}"),
            Self::NoDividends => write!(f, "none"),
        }
    }
}

impl FromStr for Strategy {
    type Err = Error;

    /// `none`, `barrier:<level>` or `threshold:<level>:<rate>`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number {t:?} in strategy {s:?}")))
        };
        let strategy = match parts.as_slice() {
            ["none"] => Self::NoDividends,
            ["barrier", b] => Self::barrier(num(b)?),
            ["threshold", b, r] => Self::threshold(num(b)?, num(r)?),
            _ => {
                return Err(Error::InvalidInput(format!(
                    "unknown strategy {s:?}; expected none, barrier:<b> or threshold:<b>:<rate>"
                )))
            }
        };
        strategy.validate()?;
        Ok(strategy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig {
    pub n_paths: usize,
    pub horizon: f64,
    pub seed: u64,
    /// Euler step for `σ > 0`; defaults to `min(1e-3, 0.01/λ)`.
    pub euler_step: Option<f64>,
}

impl SimulationConfig {
    pub fn new(n_paths: usize, horizon: f64, seed: u64) -> Self {
        Self {
            n_paths,
            horizon,
            seed,
            euler_step: None,
        }
    }

    /// Horizon after which discounting has shrunk any remaining value by a
    /// factor 10⁻⁴: `T = ln(10⁴)/δ`.
    pub fn default_horizon(model: &ModelSpec) -> f64 {
        1e4f64.ln() / model.discount()
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::InvalidInput("n_paths must be positive".into()));
        }
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::InvalidInput(format!(
                "horizon must be finite and positive, got {}",
                self.horizon
            )));
        }
        if let Some(dt) = self.euler_step {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidInput(format!("euler step must be positive, got {dt}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Terminal {
    Ruined,
    Horizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathRecord {
    pub ruin_time: Option<f64>,
    pub discounted_dividends: f64,
    /// Undiscounted cumulative dividends `L_τ`.
    pub total_dividends: f64,
    pub terminal: Terminal,
    /// Controlled surplus at the end: negative after a ruinous jump, zero
    /// after creeping through 0, `U_T` at the horizon.
    pub terminal_surplus: f64,
    /// Uncontrolled surplus `X` at the same time.
    pub uncontrolled_terminal: f64,
    pub max_surplus: f64,
}

/// Monte Carlo estimate with its truncation-bias bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimulationEstimate {
    pub mean: f64,
    #[serde(rename = "se")]
    pub std_error: f64,
    #[serde(rename = "n")]
    pub n_paths: usize,
    pub horizon: f64,
    pub seed: u64,
    /// Upper bound on the expected contribution after the horizon.
    pub bias_bound: f64,
    pub ruin_fraction: f64,
}

impl SimulationEstimate {
    /// Upper end of a ±`z` standard-error interval.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.mean - z * self.std_error, self.mean + z * self.std_error)
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn path_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Randomness for one jump event. Always drawn in full so that paths under
/// different strategies consume identical streams.
struct JumpDraw {
    wait: f64,
    negative: bool,
    size: f64,
}

fn draw_jump(model: &ModelSpec, rng: &mut ChaCha8Rng) -> JumpDraw {
    let lam = model.total_jump_intensity();
    let u_wait: f64 = rng.random();
    let u_side: f64 = rng.random();
    let u_comp: f64 = rng.random();
    let u_size: f64 = rng.random();
    if lam == 0.0 {
        return JumpDraw {
            wait: f64::INFINITY,
            negative: false,
            size: 0.0,
        };
    }
    let wait = -(1.0 - u_wait).ln() / lam;
    let negative = u_side * lam < model.negative().intensity();
    let density = if negative {
        model.negative().density()
    } else {
        model.positive().density()
    }
    .expect("active side has a density");
    JumpDraw {
        wait,
        negative,
        size: density.sample_from_uniforms(u_comp, u_size),
    }
}

/// `∫_{t0}^{t1} rate·e^{−δs} ds`.
fn discounted_stream(rate: f64, delta: f64, t0: f64, t1: f64) -> f64 {
    rate * ((-delta * t0).exp() - (-delta * t1).exp()) / delta
}

struct PathState {
    t: f64,
    u: f64,
    x: f64,
    discounted: f64,
    total: f64,
    max_u: f64,
}

impl PathState {
    fn new(x0: f64) -> Self {
        Self {
            t: 0.0,
            u: x0,
            x: x0,
            discounted: 0.0,
            total: 0.0,
            max_u: x0,
        }
    }

    fn pay_lump(&mut self, amount: f64, delta: f64) {
        debug_assert!(amount >= 0.0 && amount <= self.u + 1e-9, "inadmissible lump");
        self.discounted += amount * (-delta * self.t).exp();
        self.total += amount;
        self.u -= amount;
    }

    fn pay_stream(&mut self, rate: f64, delta: f64, t0: f64, t1: f64) {
        if t1 > t0 {
            self.discounted += discounted_stream(rate, delta, t0, t1);
            self.total += rate * (t1 - t0);
        }
    }

    fn finish(self, terminal: Terminal) -> PathRecord {
        PathRecord {
            ruin_time: (terminal == Terminal::Ruined).then_some(self.t),
            discounted_dividends: self.discounted,
            total_dividends: self.total,
            terminal,
            terminal_surplus: self.u,
            uncontrolled_terminal: self.x,
            max_surplus: self.max_u,
        }
    }
}

/// Advances the drift-only flow of the controlled surplus from `s.t` to
/// `t_end`. Returns `true` if the surplus crept below zero on the way, with
/// `s.t` set to the ruin time.
fn drift_flow(s: &mut PathState, strategy: Strategy, a: f64, delta: f64, t_end: f64) -> bool {
    let (t_start, x_start) = (s.t, s.x);
    let ruined = controlled_flow(s, strategy, a, delta, t_end);
    s.x = x_start + a * (s.t - t_start);
    ruined
}

fn controlled_flow(s: &mut PathState, strategy: Strategy, a: f64, delta: f64, t_end: f64) -> bool {
    loop {
        let remaining = t_end - s.t;
        if remaining <= 0.0 {
            s.t = t_end;
            return false;
        }
        let (level, above_drift, above_rate) = match strategy {
            Strategy::Barrier { level } => (level, f64::NAN, f64::NAN),
            Strategy::Threshold { level, rate } => (level, a - rate, rate),
            Strategy::NoDividends => (f64::INFINITY, f64::NAN, f64::NAN),
        };
        let at_level = s.u >= level;
        if at_level && matches!(strategy, Strategy::Barrier { .. }) {
            // held at the barrier while the drift pushes up
            if a > 0.0 {
                s.pay_stream(a, delta, s.t, t_end);
                s.t = t_end;
                return false;
            }
            // drift down: leave the barrier
        } else if s.u > level || (at_level && above_drift > 0.0) {
            let d = above_drift;
            let hit = if d < 0.0 { (s.u - level) / -d } else { f64::INFINITY };
            let span = hit.min(remaining);
            s.pay_stream(above_rate, delta, s.t, s.t + span);
            s.u = if span == hit { level } else { s.u + d * span };
            s.max_u = s.max_u.max(s.u);
            s.t += span;
            continue;
        } else if at_level && a >= 0.0 {
            // sliding at the threshold: the drift is paid out exactly
            s.pay_stream(a, delta, s.t, t_end);
            s.t = t_end;
            return false;
        }
        // below the level (or leaving it downward) with drift a
        if a > 0.0 {
            let hit = if level.is_finite() && s.u < level {
                (level - s.u) / a
            } else {
                f64::INFINITY
            };
            if hit >= remaining {
                s.u += a * remaining;
                s.max_u = s.max_u.max(s.u);
                s.t = t_end;
                return false;
            }
            s.u = level;
            s.max_u = s.max_u.max(s.u);
            s.t += hit;
        } else if a < 0.0 {
            let hit = s.u / -a;
            if hit < remaining {
                s.t += hit;
                s.u = 0.0;
                return true;
            }
            s.u += a * remaining;
            s.t = t_end;
            return false;
        } else {
            s.t = t_end;
            return false;
        }
    }
}

/// Applies a jump at the current time; returns `true` on ruin.
fn apply_jump(s: &mut PathState, strategy: Strategy, jump: &JumpDraw, delta: f64) -> bool {
    if jump.negative {
        s.u -= jump.size;
        s.x -= jump.size;
        return s.u < 0.0;
    }
    s.u += jump.size;
    s.x += jump.size;
    s.max_u = s.max_u.max(s.u);
    if let Strategy::Barrier { level } = strategy {
        if s.u > level {
            s.pay_lump(s.u - level, delta);
        }
    }
    false
}

fn initial_lump(s: &mut PathState, strategy: Strategy, delta: f64) {
    if let Strategy::Barrier { level } = strategy {
        if s.u > level {
            s.pay_lump(s.u - level, delta);
        }
    }
}

fn simulate_exact(
    model: &ModelSpec,
    strategy: Strategy,
    x0: f64,
    horizon: f64,
    rng: &mut ChaCha8Rng,
) -> PathRecord {
    let (a, delta) = (model.drift(), model.discount());
    let mut s = PathState::new(x0);
    initial_lump(&mut s, strategy, delta);
    loop {
        let jump = draw_jump(model, rng);
        let t_jump = s.t + jump.wait;
        let t_end = t_jump.min(horizon);
        if drift_flow(&mut s, strategy, a, delta, t_end) {
            return s.finish(Terminal::Ruined);
        }
        if t_jump >= horizon {
            s.t = horizon;
            return s.finish(Terminal::Horizon);
        }
        s.t = t_jump;
        if apply_jump(&mut s, strategy, &jump, delta) {
            return s.finish(Terminal::Ruined);
        }
    }
}

fn simulate_euler(
    model: &ModelSpec,
    strategy: Strategy,
    x0: f64,
    horizon: f64,
    dt: f64,
    rng: &mut ChaCha8Rng,
) -> PathRecord {
    let (a, sigma, delta) = (model.drift(), model.sigma(), model.discount());
    let mut s = PathState::new(x0);
    initial_lump(&mut s, strategy, delta);
    let mut jump = draw_jump(model, rng);
    let mut t_jump = jump.wait;
    while s.t < horizon {
        let t_next = (s.t + dt).min(t_jump).min(horizon);
        let h = t_next - s.t;
        let z: f64 = rng.sample(StandardNormal);
        let noise = sigma * h.sqrt() * z;
        let (drift, pay) = match strategy {
            Strategy::Threshold { level, rate } if s.u > level => (a - rate, rate),
            _ => (a, 0.0),
        };
        let u_old = s.u;
        let u_new = s.u + drift * h + noise;
        s.x += a * h + noise;
        if u_new < 0.0 {
            let frac = u_old / (u_old - u_new);
            s.pay_stream(pay, delta, s.t, s.t + frac * h);
            s.t += frac * h;
            s.u = u_new;
            return s.finish(Terminal::Ruined);
        }
        s.pay_stream(pay, delta, s.t, t_next);
        s.u = u_new;
        s.max_u = s.max_u.max(s.u);
        if let Strategy::Barrier { level } = strategy {
            if u_new > level {
                let frac = ((level - u_old) / (u_new - u_old)).clamp(0.0, 1.0);
                let crossing = s.t + frac * h;
                let overflow = u_new - level;
                // overflow accrued between the crossing and the step end
                let when = 0.5 * (crossing + t_next);
                s.discounted += overflow * (-delta * when).exp();
                s.total += overflow;
                s.u = level;
            }
        }
        s.t = t_next;
        if s.t >= horizon {
            break;
        }
        if s.t == t_jump {
            if apply_jump(&mut s, strategy, &jump, delta) {
                return s.finish(Terminal::Ruined);
            }
            jump = draw_jump(model, rng);
            t_jump = s.t + jump.wait;
        }
    }
    s.t = horizon;
    s.finish(Terminal::Horizon)
}

fn euler_step(model: &ModelSpec, config: &SimulationConfig) -> f64 {
    config.euler_step.unwrap_or_else(|| {
        let lam = model.total_jump_intensity();
        if lam > 0.0 {
            (1e-3f64).min(0.01 / lam)
        } else {
            1e-3
        }
    })
}

/// Simulates one path per index in `0..n_paths`, in index order.
pub fn simulate_paths(
    model: &ModelSpec,
    strategy: Strategy,
    x0: f64,
    config: &SimulationConfig,
) -> Result<Vec<PathRecord>> {
    config.validate()?;
    strategy.validate()?;
    if !(x0.is_finite() && x0 >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "initial capital must be finite and ≥ 0, got {x0}"
        )));
    }
    let dt = euler_step(model, config);
    let records = (0..config.n_paths)
        .into_par_iter()
        .map(|i| {
            let mut rng = path_rng(config.seed, i);
            if model.sigma() > 0.0 {
                simulate_euler(model, strategy, x0, config.horizon, dt, &mut rng)
            } else {
                simulate_exact(model, strategy, x0, config.horizon, &mut rng)
            }
        })
        .collect();
    Ok(records)
}

/// Bound on the discounted dividends still to come from surplus `u` at
/// the horizon, in time-0 money.
fn remaining_value_bound(model: &ModelSpec, u: f64, horizon: f64) -> f64 {
    let delta = model.discount();
    let upward = model.drift().max(0.0) + model.positive().intensity() * model.positive().mean_size();
    let c = upward / delta + model.sigma() / (2.0 * delta).sqrt();
    (-delta * horizon).exp() * (u.max(0.0) + c)
}

fn estimate_from(values: &[f64], bias_bound: f64, ruined: usize, config: &SimulationConfig) -> SimulationEstimate {
    let (mean, std_error) = mean_and_se(values);
    SimulationEstimate {
        mean,
        std_error,
        n_paths: values.len(),
        horizon: config.horizon,
        seed: config.seed,
        bias_bound,
        ruin_fraction: ruined as f64 / values.len() as f64,
    }
}

/// Estimates `V_ξ(x0)`, the expected discounted dividends until ruin.
pub fn simulate_value(
    model: &ModelSpec,
    strategy: Strategy,
    x0: f64,
    config: &SimulationConfig,
) -> Result<SimulationEstimate> {
    let paths = simulate_paths(model, strategy, x0, config)?;
    Ok(summarise_value(model, &paths, config))
}

/// Mean discounted dividends of simulated paths, with the truncation bias bound.
pub fn summarise_value(model: &ModelSpec, paths: &[PathRecord], config: &SimulationConfig) -> SimulationEstimate {
    let values: Vec<f64> = paths.iter().map(|p| p.discounted_dividends).collect();
    let ruined = paths.iter().filter(|p| p.terminal == Terminal::Ruined).count();
    let bias = paths
        .iter()
        .filter(|p| p.terminal == Terminal::Horizon)
        .map(|p| remaining_value_bound(model, p.terminal_surplus, config.horizon))
        .sum::<f64>()
        / paths.len() as f64;
    estimate_from(&values, bias, ruined, config)
}

/// Lundberg adjustment coefficient `γ > 0` with `Ψ(−γ) = 0`, if one exists.
/// Then `ψ(u) ≤ e^{−γu}`.
pub fn adjustment_coefficient(model: &ModelSpec) -> Result<Option<f64>> {
    if !model.lundberg_check().drift_positive {
        return Err(Error::Lundberg(model.lundberg_check()));
    }
    let f = |g: f64| {
        (
            model.exponent_continued(-g),
            -model.exponent_derivative_continued(-g, 1),
        )
    };
    let hi = match model.negative().density() {
        Some(d) => {
            let mut eps = 1e-12;
            let mut hi = d.min_rate() * (1.0 - eps);
            while f(hi).0 <= 0.0 && eps > 1e-300 {
                eps *= 1e-2;
                hi = d.min_rate() * (1.0 - eps);
            }
            hi
        }
        // no downward movement at all: ruin is impossible
        None if model.sigma() == 0.0 && model.drift() >= 0.0 => return Ok(None),
        None => {
            let mut hi = 1.0;
            while f(hi).0 <= 0.0 {
                hi *= 2.0;
            }
            hi
        }
    };
    // Ψ(−γ) < 0 just left of zero since Ψ′(0+) > 0
    let lo = hi * 1e-9;
    if f(lo).0 >= 0.0 {
        return Ok(None);
    }
    Ok(Some(find_root("adjustment coefficient", f, lo, hi)?))
}

/// Frequency of ruin before the horizon without dividends. The bias bound
/// is `E[e^{−γU_T}; survived]`, which dominates the probability of ruin
/// after the horizon.
pub fn simulate_ruin_probability(
    model: &ModelSpec,
    x0: f64,
    config: &SimulationConfig,
) -> Result<SimulationEstimate> {
    let gamma = adjustment_coefficient(model)?;
    let paths = simulate_paths(model, Strategy::NoDividends, x0, config)?;
    let values: Vec<f64> = paths
        .iter()
        .map(|p| if p.terminal == Terminal::Ruined { 1.0 } else { 0.0 })
        .collect();
    let ruined = values.iter().filter(|&&v| v > 0.0).count();
    let bias = match gamma {
        Some(g) => {
            paths
                .iter()
                .filter(|p| p.terminal == Terminal::Horizon)
                .map(|p| (-g * p.terminal_surplus).exp())
                .sum::<f64>()
                / paths.len() as f64
        }
        None => 0.0,
    };
    Ok(estimate_from(&values, bias, ruined, config))
}

/// Rivals of the barrier at `b`: barriers at `b ± 0.5` and `b ± 1` (clamped
/// at 0) and, when the drift is positive, a threshold strategy at `b`
/// paying half the drift.
pub fn default_rivals(model: &ModelSpec, b: f64) -> Vec<Strategy> {
    let mut rivals: Vec<Strategy> = [-1.0, -0.5, 0.5, 1.0]
        .iter()
        .map(|d| Strategy::barrier((b + d).max(0.0)))
        .collect();
    if model.drift() > 0.0 {
        rivals.push(Strategy::threshold(b, model.drift() / 2.0));
    }
    rivals
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceRow {
    pub strategy: Strategy,
    pub estimate: SimulationEstimate,
    /// Mean of `rival − baseline` over common paths.
    pub difference: f64,
    pub difference_se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceReport {
    pub x0: f64,
    pub baseline: Strategy,
    pub baseline_estimate: SimulationEstimate,
    pub rows: Vec<DominanceRow>,
    /// Number of standard errors a rival may exceed the baseline by.
    pub z: f64,
    pub pass: bool,
}

/// Compares a barrier strategy against rivals on common random numbers.
/// A rival fails when its mean advantage exceeds `z` standard errors of
/// the paired difference.
pub fn dominance_experiment(
    model: &ModelSpec,
    x0: f64,
    baseline: Strategy,
    rivals: &[Strategy],
    config: &SimulationConfig,
    z: f64,
) -> Result<DominanceReport> {
    let base_paths = simulate_paths(model, baseline, x0, config)?;
    let baseline_estimate = summarise_value(model, &base_paths, config);
    let mut rows = Vec::with_capacity(rivals.len());
    for &rival in rivals {
        let paths = simulate_paths(model, rival, x0, config)?;
        let estimate = summarise_value(model, &paths, config);
        let diffs: Vec<f64> = paths
            .iter()
            .zip(&base_paths)
            .map(|(r, b)| r.discounted_dividends - b.discounted_dividends)
            .collect();
        let (difference, difference_se) = mean_and_se(&diffs);
        let pass = difference <= z * difference_se + 1e-12;
        rows.push(DominanceRow {
            strategy: rival,
            estimate,
            difference,
            difference_se,
            pass,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(DominanceReport {
        x0,
        baseline,
        baseline_estimate,
        rows,
        z,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JumpSide, MixedExponential};

    fn m1() -> ModelSpec {
        ModelSpec::cramer_lundberg(1.5, 0.0, 1.0, 2.0, 0.1).unwrap()
    }

    fn two_sided() -> ModelSpec {
        ModelSpec::new(
            1.0,
            0.0,
            JumpSide::new(1.0, MixedExponential::new(&[0.4, 0.6], &[1.0, 3.0]).unwrap()).unwrap(),
            JumpSide::new(0.5, MixedExponential::exponential(2.0).unwrap()).unwrap(),
            0.1,
        )
        .unwrap()
    }

    #[test]
    fn no_dividends_pay_nothing() {
        let cfg = SimulationConfig::new(500, 50.0, 3);
        let est = simulate_value(&m1(), Strategy::NoDividends, 2.0, &cfg).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn initial_lump_above_barrier() {
        let cfg = SimulationConfig::new(200, 50.0, 9);
        let paths = simulate_paths(&m1(), Strategy::barrier(1.0), 6.0, &cfg).unwrap();
        assert!(paths.iter().all(|p| p.discounted_dividends >= 5.0));
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SimulationConfig::new(2_000, 40.0, 77);
        let s = Strategy::barrier(2.0);
        let a = simulate_value(&two_sided(), s, 1.0, &cfg).unwrap();
        let b = simulate_value(&two_sided(), s, 1.0, &cfg).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
        let c = simulate_value(&two_sided(), s, 1.0, &SimulationConfig::new(2_000, 40.0, 78)).unwrap();
        assert_ne!(a.mean, c.mean);
    }

    #[test]
    fn surplus_accounting_balances() {
        // X = U + L on every path: dividends never exceed what the
        // uncontrolled surplus made available
        let cfg = SimulationConfig::new(1_000, 40.0, 5);
        for strategy in [
            Strategy::barrier(1.5),
            Strategy::threshold(1.0, 0.5),
            Strategy::threshold(1.0, 3.0),
            Strategy::NoDividends,
        ] {
            for p in simulate_paths(&two_sided(), strategy, 2.5, &cfg).unwrap() {
                let gap = p.uncontrolled_terminal - p.terminal_surplus - p.total_dividends;
                assert!(gap.abs() < 1e-9 * (1.0 + p.total_dividends), "{strategy}: {gap}");
                assert!(p.discounted_dividends >= 0.0);
                if p.terminal == Terminal::Ruined {
                    assert!(p.terminal_surplus <= 0.0);
                }
                if let Strategy::Barrier { level } = strategy {
                    assert!(p.terminal_surplus <= level + 1e-12);
                }
            }
        }
    }

    #[test]
    fn negative_drift_creeps_into_ruin() {
        // drift −1 with upward jumps only: ruin happens by creeping
        let m = ModelSpec::new(
            -1.0,
            0.0,
            JumpSide::none(),
            JumpSide::new(2.0, MixedExponential::exponential(1.0).unwrap()).unwrap(),
            0.1,
        )
        .unwrap();
        let cfg = SimulationConfig::new(200, 100.0, 1);
        let paths = simulate_paths(&m, Strategy::NoDividends, 0.5, &cfg).unwrap();
        for p in paths.iter().filter(|p| p.terminal == Terminal::Ruined) {
            assert_eq!(p.terminal_surplus, 0.0);
        }
        assert!(paths.iter().any(|p| p.terminal == Terminal::Ruined));
    }

    #[test]
    fn euler_respects_barrier_and_matches_exact_mode() {
        // the same model with a tiny Gaussian part against the event-exact
        // simulator without one
        let exact = m1();
        let noisy = ModelSpec::cramer_lundberg(1.5, 0.05, 1.0, 2.0, 0.1).unwrap();
        let mut cfg = SimulationConfig::new(4_000, 30.0, 11);
        cfg.euler_step = Some(2e-3);
        let s = Strategy::barrier(2.0);
        let a = simulate_value(&exact, s, 1.0, &cfg).unwrap();
        let b = simulate_value(&noisy, s, 1.0, &cfg).unwrap();
        let joint = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.mean - b.mean).abs() < 3.0 * joint, "{} vs {}", a.mean, b.mean);
        for p in simulate_paths(&noisy, s, 1.0, &cfg).unwrap().iter().take(200) {
            assert!(p.terminal_surplus <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn identical_rival_has_zero_difference() {
        let cfg = SimulationConfig::new(500, 40.0, 4);
        let s = Strategy::barrier(2.0);
        let r = dominance_experiment(&m1(), 1.0, s, &[s], &cfg, 3.0).unwrap();
        assert_eq!(r.rows[0].difference, 0.0);
        assert!(r.pass);
    }

    #[test]
    fn ruin_probability_extremes() {
        let cfg = SimulationConfig::new(2_000, 50.0, 8);
        let far = simulate_ruin_probability(&m1(), 60.0, &cfg).unwrap();
        assert_eq!(far.mean, 0.0);
        let bm = ModelSpec::cramer_lundberg(1.0, 1.0, 0.5, 2.0, 0.1).unwrap();
        let mut cfg = SimulationConfig::new(400, 5.0, 8);
        cfg.euler_step = Some(1e-4);
        let zero = simulate_ruin_probability(&bm, 0.0, &cfg).unwrap();
        assert!(zero.mean > 0.95, "{}", zero.mean);
    }

    #[test]
    fn adjustment_coefficient_exponential_claims() {
        // Ψ(−γ) = −aγ + λγ/(α−γ) = 0 → γ = α − λ/a
        let g = adjustment_coefficient(&m1()).unwrap().unwrap();
        assert!((g - (2.0 - 1.0 / 1.5)).abs() < 1e-12);
        let no_down = ModelSpec::new(1.0, 0.0, JumpSide::none(), JumpSide::none(), 0.1).unwrap();
        assert_eq!(adjustment_coefficient(&no_down).unwrap(), None);
    }

    #[test]
    fn strategy_parsing() {
        assert_eq!("none".parse::<Strategy>().unwrap(), Strategy::NoDividends);
        assert_eq!("barrier:2.5".parse::<Strategy>().unwrap(), Strategy::barrier(2.5));
        assert_eq!(
            "threshold:1:0.75".parse::<Strategy>().unwrap(),
            Strategy::threshold(1.0, 0.75)
        );
        assert!("barrier:-1".parse::<Strategy>().is_err());
        assert!("threshold:1".parse::<Strategy>().is_err());
        assert!("band:1:2".parse::<Strategy>().is_err());
        let s = Strategy::threshold(1.0, 0.75);
        assert_eq!(s.to_string().parse::<Strategy>().unwrap(), s);
    }

    #[test]
    fn rejects_bad_config() {
        let m = m1();
        assert!(simulate_value(&m, Strategy::NoDividends, 1.0, &SimulationConfig::new(0, 1.0, 0)).is_err());
        assert!(simulate_value(&m, Strategy::NoDividends, 1.0, &SimulationConfig::new(1, -1.0, 0)).is_err());
        assert!(simulate_value(&m, Strategy::NoDividends, -1.0, &SimulationConfig::new(1, 1.0, 0)).is_err());
    }
}
