//! Infinitesimal generator of the risk process and the verification checks
//! built on it.
//!
//! With total-drift parameterisation the generator is
//!
//! ```text
//! Γg(x) = σ²g″(x)/2 + a g′(x)
//!       + λ₊ ∫₀^∞ [g(x+y) − g(x)] f₊(y) dy
//!       + λ₋ ∫₀^∞ [g(x−y) − g(x)] f₋(y) dy.
//! ```
//!
//! Derivatives are supplied in closed form by the target function; only the
//! jump integrals are computed numerically.

use rayon::prelude::*;
use serde::Serialize;

use crate::diagnostics::{CheckResult, DiagnosticsReport};
use crate::error::{Error, Result};
use crate::model::{MixedExponential, ModelSpec};
use crate::quadrature::{integrate_piecewise, QuadratureOptions};
use crate::scale::{ScaleFunction, TiltedRuinExpansion};
use crate::value::BarrierValueFunction;

/// Half-width of the neighbourhood of the barrier left out of HJB grids.
pub const BARRIER_EXCLUSION: f64 = 1e-6;
/// Tail mass of each jump law beyond the cutoff where quadrature switches
/// to the mapped semi-infinite rule.
pub const TAIL_MASS: f64 = 1e-12;

/// A function on ℝ with closed-form first and second derivatives, smooth
/// except at the listed breakpoints.
pub trait GeneratorTarget: Sync {
    fn value(&self, x: f64) -> f64;
    fn first(&self, x: f64) -> f64;
    fn second(&self, x: f64) -> f64;
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// `h` extended by zero on the negative half-line.
impl GeneratorTarget for ScaleFunction {
    fn value(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.derivative_unchecked(x, 0)
        }
    }

    fn first(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.derivative_unchecked(x, 1)
        }
    }

    fn second(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.derivative_unchecked(x, 2)
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0]
    }
}

impl GeneratorTarget for BarrierValueFunction {
    fn value(&self, x: f64) -> f64 {
        self.value_at(x)
    }

    fn first(&self, x: f64) -> f64 {
        self.value_gradient(x)
    }

    fn second(&self, x: f64) -> f64 {
        self.value_second(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![0.0, self.barrier()]
    }
}

/// Target assembled from closures, for test functions and combinations.
pub struct FnTarget<F, D1, D2> {
    pub value: F,
    pub first: D1,
    pub second: D2,
    pub breakpoints: Vec<f64>,
}

impl<F, D1, D2> GeneratorTarget for FnTarget<F, D1, D2>
where
    F: Fn(f64) -> f64 + Sync,
    D1: Fn(f64) -> f64 + Sync,
    D2: Fn(f64) -> f64 + Sync,
{
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    fn first(&self, x: f64) -> f64 {
        (self.first)(x)
    }

    fn second(&self, x: f64) -> f64 {
        (self.second)(x)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorQuadrature {
    model: ModelSpec,
    pub rel_tol: f64,
    /// Cutoffs for the negative and positive jump laws.
    pub tail_cutoff: (f64, f64),
}

impl GeneratorQuadrature {
    pub fn new(model: &ModelSpec) -> Self {
        let cut = |d: Option<&MixedExponential>| d.map_or(0.0, |d| d.tail_cutoff(TAIL_MASS));
        Self {
            model: model.clone(),
            rel_tol: 1e-9,
            tail_cutoff: (
                cut(model.negative().density()),
                cut(model.positive().density()),
            ),
        }
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    fn options(&self) -> QuadratureOptions {
        QuadratureOptions {
            rel_tol: self.rel_tol,
            ..Default::default()
        }
    }

    /// `Γg(x)`.
    pub fn apply<G: GeneratorTarget + ?Sized>(&self, g: &G, x: f64) -> Result<f64> {
        if !x.is_finite() {
            return Err(Error::InvalidInput(format!("generator evaluated at {x}")));
        }
        let m = &self.model;
        let opts = self.options();
        let gx = g.value(x);
        let mut total = 0.5 * m.sigma() * m.sigma() * g.second(x) + m.drift() * g.first(x);
        let bps = g.breakpoints();
        if let Some(d) = m.negative().density() {
            let cuts: Vec<f64> = bps.iter().map(|&b| x - b).filter(|&y| y > 0.0).collect();
            let integral = integrate_piecewise(
                |y| g.value(x - y) * d.density(y),
                0.0,
                &cuts,
                self.tail_cutoff.0,
                &opts,
            )?;
            total += m.negative().intensity() * (integral.value - gx);
        }
        if let Some(d) = m.positive().density() {
            let cuts: Vec<f64> = bps.iter().map(|&b| b - x).filter(|&y| y > 0.0).collect();
            let integral = integrate_piecewise(
                |y| g.value(x + y) * d.density(y),
                0.0,
                &cuts,
                self.tail_cutoff.1,
                &opts,
            )?;
            total += m.positive().intensity() * (integral.value - gx);
        }
        Ok(total)
    }

    /// `(Γ − δ)g(x)`.
    pub fn discounted<G: GeneratorTarget + ?Sized>(&self, g: &G, x: f64) -> Result<f64> {
        Ok(self.apply(g, x)? - self.model.discount() * g.value(x))
    }

    fn discounted_on<G: GeneratorTarget + ?Sized>(&self, g: &G, xs: &[f64]) -> Result<Vec<f64>> {
        xs.par_iter().map(|&x| self.discounted(g, x)).collect()
    }
}

fn describe(xs: &[f64]) -> String {
    match (xs.first(), xs.last()) {
        (Some(a), Some(b)) => format!("{} points on [{a}, {b}]", xs.len()),
        _ => "empty grid".into(),
    }
}

/// Relative residual `|(Γ − δ)h(x)| / (δ h(x))` over a grid of positive points.
pub fn check_scale_equation(
    q: &GeneratorQuadrature,
    sf: &ScaleFunction,
    grid: &[f64],
    tol: f64,
) -> Result<CheckResult> {
    if let Some(&x) = grid.iter().find(|&&x| !(x > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "scale equation grid must lie in (0, ∞), found {x}"
        )));
    }
    let delta = q.model().discount();
    let raw = q.discounted_on(sf, grid)?;
    let residuals = raw
        .iter()
        .zip(grid)
        .map(|(r, &x)| r.abs() / (delta * sf.derivative_unchecked(x, 0)))
        .collect();
    Ok(CheckResult::new(
        "scale_equation_relative",
        describe(grid),
        tol,
        residuals,
    ))
}

/// HJB checks for a barrier value function: `(Γ − δ)V = 0` on `(0, b)` and
/// `(Γ − δ)V ≤ 0` above `b`. Grid points within [`BARRIER_EXCLUSION`] of
/// `b` and points `≤ 0` are dropped.
pub fn check_hjb(
    q: &GeneratorQuadrature,
    vbf: &BarrierValueFunction,
    grid: &[f64],
    tol: f64,
) -> Result<DiagnosticsReport> {
    let b = vbf.barrier();
    let below: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&x| x > 0.0 && x < b - BARRIER_EXCLUSION)
        .collect();
    let above: Vec<f64> = grid
        .iter()
        .copied()
        .filter(|&x| x > 0.0 && x > b + BARRIER_EXCLUSION)
        .collect();
    let mut report = DiagnosticsReport::new();
    let r_below = q.discounted_on(vbf, &below)?;
    report.push(CheckResult::new(
        "hjb_equality_below_barrier",
        describe(&below),
        tol,
        r_below.iter().map(|r| r.abs()).collect(),
    ));
    let r_above = q.discounted_on(vbf, &above)?;
    report.push(CheckResult::new(
        "hjb_inequality_above_barrier",
        describe(&above),
        tol,
        r_above,
    ));
    Ok(report)
}

/// The three verification conditions for a candidate `ν = V_b`: the HJB
/// inequalities, concavity on `(0, b)` and `ν′ ≥ 1`.
pub fn check_optimality(
    q: &GeneratorQuadrature,
    vbf: &BarrierValueFunction,
    grid: &[f64],
    tol: f64,
    shape_tol: f64,
) -> Result<DiagnosticsReport> {
    let mut report = check_hjb(q, vbf, grid, tol)?;
    let positive: Vec<f64> = grid.iter().copied().filter(|&x| x >= 0.0).collect();
    report.push(CheckResult::new(
        "gradient_at_least_one",
        describe(&positive),
        tol,
        positive.iter().map(|&x| 1.0 - vbf.value_gradient(x)).collect(),
    ));
    let b = vbf.barrier();
    if b > 0.0 {
        let n = 200;
        let xs: Vec<f64> = (0..=n).map(|i| b * i as f64 / n as f64).collect();
        let vs: Vec<f64> = xs.iter().map(|&x| vbf.value_at(x)).collect();
        let mut c = check_shape(&xs, &vs, Shape::Concave, shape_tol)?;
        c.name = "value_concave_below_barrier".into();
        report.push(c);
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    Convex,
    Concave,
    Decreasing,
}

/// Second differences, generalised to non-uniform grids so that on a
/// uniform grid they equal `v_{i−1} − 2v_i + v_{i+1}`.
fn second_differences(xs: &[f64], vs: &[f64]) -> Vec<f64> {
    (1..xs.len() - 1)
        .map(|i| {
            let hl = xs[i] - xs[i - 1];
            let hr = xs[i + 1] - xs[i];
            ((vs[i + 1] - vs[i]) / hr - (vs[i] - vs[i - 1]) / hl) * 0.5 * (hl + hr)
        })
        .collect()
}

fn validate_grid(xs: &[f64], vs: &[f64]) -> Result<()> {
    if xs.len() != vs.len() {
        return Err(Error::InvalidInput(format!(
            "{} grid points but {} values",
            xs.len(),
            vs.len()
        )));
    }
    if xs.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "grid too short: {} points, need at least 3",
            xs.len()
        )));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("grid must be strictly increasing".into()));
    }
    Ok(())
}

/// Shape test on sampled values. Residuals are oriented so that a
/// non-positive residual means the property holds at that point.
pub fn check_shape(xs: &[f64], vs: &[f64], shape: Shape, tol: f64) -> Result<CheckResult> {
    validate_grid(xs, vs)?;
    let (name, residuals) = match shape {
        Shape::Convex => (
            "convex",
            second_differences(xs, vs).into_iter().map(|d| -d).collect(),
        ),
        Shape::Concave => ("concave", second_differences(xs, vs)),
        Shape::Decreasing => ("decreasing", vs.windows(2).map(|w| w[1] - w[0]).collect()),
    };
    Ok(CheckResult::new(name, describe(xs), tol, residuals))
}

/// Complete-monotonicity sample: `(−1)^k ψ̃^{(k)}(x) ≥ 0` for `k = 0..=orders`
/// using the exact exponential-sum derivatives.
pub fn check_complete_monotonicity(
    expansion: &TiltedRuinExpansion,
    xs: &[f64],
    orders: u32,
    tol: f64,
) -> Result<CheckResult> {
    let mut residuals = Vec::with_capacity(xs.len() * (orders as usize + 1));
    for &x in xs {
        for k in 0..=orders {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            residuals.push(-sign * expansion.ruin_derivative(x, k)?);
        }
    }
    Ok(CheckResult::new(
        "completely_monotone",
        format!("{}, derivatives 0..={orders}", describe(xs)),
        tol,
        residuals,
    ))
}

/// `(log f)″ ≥ −tol` for a mixed-exponential density, from closed-form
/// derivatives of `f`.
pub fn check_logconvexity(density: &MixedExponential, xs: &[f64], tol: f64) -> CheckResult {
    let residuals = xs
        .iter()
        .map(|&x| {
            let f = density.density_derivative(x, 0);
            let f1 = density.density_derivative(x, 1);
            let f2 = density.density_derivative(x, 2);
            -(f * f2 - f1 * f1) / (f * f)
        })
        .collect();
    CheckResult::new("log_convex", describe(xs), tol, residuals)
}

/// Log-convexity of positive samples via second differences of their logs.
pub fn check_logconvexity_samples(xs: &[f64], vs: &[f64], tol: f64) -> Result<CheckResult> {
    if let Some(v) = vs.iter().find(|&&v| !(v > 0.0)) {
        return Err(Error::InvalidInput(format!(
            "log-convexity needs positive samples, found {v}"
        )));
    }
    let logs: Vec<f64> = vs.iter().map(|v| v.ln()).collect();
    let mut c = check_shape(xs, &logs, Shape::Convex, tol)?;
    c.name = "log_convex".into();
    Ok(c)
}

/// The full diagnostic suite for a solved model at its optimal barrier:
///
/// * `(Γ − δ)h = 0` relative to `δh` on the positive grid points;
/// * the barrier verification conditions, only when there are no upward
///   jumps (otherwise `V_b` is not the barrier value);
/// * `ψ̃` decreasing, convex and completely monotone to order 4;
/// * `h′` convex, and `h`, `h′` convex beyond `b`;
/// * log-convexity of the claim density.
///
/// `tol` applies to generator residuals, `shape_tol` to the shape tests.
pub fn diagnostic_suite(
    value: &BarrierValueFunction,
    xs: &[f64],
    tol: f64,
    shape_tol: f64,
) -> Result<DiagnosticsReport> {
    let sf = value.scale();
    let model = sf.model();
    let b = value.barrier();
    let q = GeneratorQuadrature::new(model);
    let positive: Vec<f64> = xs.iter().copied().filter(|&x| x > 0.0).collect();
    let mut report = DiagnosticsReport::new();
    report.push(check_scale_equation(&q, sf, &positive, tol)?);
    if !model.positive().is_active() {
        report.extend(check_optimality(&q, value, xs, tol, shape_tol)?);
    }

    let named = |name: &str, xs: &[f64], vs: &[f64], shape: Shape| {
        check_shape(xs, vs, shape, shape_tol).map(|mut c| {
            c.name = name.into();
            c
        })
    };
    let expansion = sf.expansion();
    let ruin = xs
        .iter()
        .map(|&x| expansion.ruin_probability(x))
        .collect::<Result<Vec<_>>>()?;
    report.push(named("tilted_ruin_decreasing", xs, &ruin, Shape::Decreasing)?);
    report.push(named("tilted_ruin_convex", xs, &ruin, Shape::Convex)?);
    let mut cm = check_complete_monotonicity(expansion, xs, 4, shape_tol)?;
    cm.name = "tilted_ruin_completely_monotone".into();
    report.push(cm);

    let hp: Vec<f64> = xs.iter().map(|&x| sf.h_prime(x)).collect::<Result<_>>()?;
    report.push(named("hprime_convex", xs, &hp, Shape::Convex)?);
    let upper = xs.last().copied().unwrap_or(0.0).max(b + 1.0);
    let beyond = crate::linspace(b, upper, xs.len().max(3));
    let h: Vec<f64> = beyond.iter().map(|&x| sf.h(x)).collect::<Result<_>>()?;
    let hp: Vec<f64> = beyond.iter().map(|&x| sf.h_prime(x)).collect::<Result<_>>()?;
    report.push(named("h_convex_beyond_barrier", &beyond, &h, Shape::Convex)?);
    report.push(named("hprime_convex_beyond_barrier", &beyond, &hp, Shape::Convex)?);
    if let Some(d) = model.negative().density() {
        let ys = crate::linspace(0.0, d.tail_cutoff(TAIL_MASS), xs.len().max(3));
        let mut c = check_logconvexity(d, &ys, shape_tol);
        c.name = "claim_density_log_convex".into();
        report.push(c);
    }
    Ok(report)
}
