//! Two-sided Lévy risk model with finite-activity mixed-exponential jumps.
//!
//! The surplus process is
//!
//! ```text
//! X_t = x + a t + σ W_t + Σ positive jumps − Σ negative jumps
//! ```
//!
//! where both jump streams are compound Poisson with mixed-exponential
//! sizes. Because both sides have finite activity and finite mean, the
//! small-jump compensator of the general Lévy–Khintchine triplet is folded
//! into the drift: `drift` is the total linear drift (premium rate), and the
//! Laplace exponent reads
//!
//! ```text
//! Ψ(θ) = aθ + σ²θ²/2 + λ₊(Σ b⁺α⁺/(α⁺−θ) − 1) + λ₋(Σ b⁻α⁻/(α⁻+θ) − 1)
//! ```
//!
//! on `−α⁻₁ < θ < Θ`, with `Θ` the smallest positive-jump rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Tolerance on the weight sum accepted when reading a model file. Weights
/// are renormalised after the check.
pub const FILE_WEIGHT_SUM_TOL: f64 = 1e-9;

/// One component `b·α·e^{−αy}` of a mixed-exponential density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub weight: f64,
    pub rate: f64,
}

/// Density `f(y) = Σ b_j α_j e^{−α_j y}` on `y > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedExponential {
    terms: Vec<ExpTerm>,
}

impl MixedExponential {
    pub fn new(weights: &[f64], rates: &[f64]) -> Result<Self> {
        Self::with_tolerance(weights, rates, WEIGHT_SUM_TOL)
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(&[1.0], &[rate])
    }

    fn with_tolerance(weights: &[f64], rates: &[f64], tol: f64) -> Result<Self> {
        let bad = |reason: String| Error::InvalidModel {
            key: "density".into(),
            reason,
        };
        if weights.len() != rates.len() {
            return Err(bad(format!(
                "{} weights but {} rates",
                weights.len(),
                rates.len()
            )));
        }
        if weights.is_empty() {
            return Err(bad("at least one term is required".into()));
        }
        for (j, (&w, &r)) in weights.iter().zip(rates).enumerate() {
            if !w.is_finite() || w < 0.0 {
                return Err(bad(format!("weight[{j}] = {w} must be finite and non-negative")));
            }
            if !r.is_finite() || r <= 0.0 {
                return Err(bad(format!("rate[{j}] = {r} must be finite and positive")));
            }
        }
        if let Some(j) = rates.windows(2).position(|w| w[0] >= w[1]) {
            return Err(bad(format!(
                "rates must be strictly increasing (rate[{}] = {} >= rate[{}] = {})",
                j,
                rates[j],
                j + 1,
                rates[j + 1]
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > tol {
            return Err(bad(format!("weights sum to {sum}, expected 1 within {tol:e}")));
        }
        // a sum off by rounding only is left alone so that normalising is
        // idempotent and files round-trip bit for bit
        let scale = if (sum - 1.0).abs() <= weights.len() as f64 * f64::EPSILON {
            1.0
        } else {
            sum
        };
        let terms = weights
            .iter()
            .zip(rates)
            .map(|(&weight, &rate)| ExpTerm {
                weight: weight / scale,
                rate,
            })
            .collect();
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.weight).collect()
    }

    pub fn rates(&self) -> Vec<f64> {
        self.terms.iter().map(|t| t.rate).collect()
    }

    /// Smallest rate; governs the heaviest tail.
    pub fn min_rate(&self) -> f64 {
        self.terms[0].rate
    }

    pub fn max_rate(&self) -> f64 {
        self.terms[self.terms.len() - 1].rate
    }

    pub fn density(&self, y: f64) -> f64 {
        self.density_derivative(y, 0)
    }

    /// k-th derivative of the density at `y ≥ 0`, in closed form.
    pub fn density_derivative(&self, y: f64, k: u32) -> f64 {
        if y < 0.0 {
            return 0.0;
        }
        self.terms
            .iter()
            .map(|t| t.weight * t.rate * (-t.rate).powi(k as i32) * (-t.rate * y).exp())
            .sum()
    }

    /// `P(Y > y)`.
    pub fn survival(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 1.0;
        }
        self.terms
            .iter()
            .map(|t| t.weight * (-t.rate * y).exp())
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.terms.iter().map(|t| t.weight / t.rate).sum()
    }

    /// Smallest `y` with `P(Y > y) ≤ eps`, using `P(Y > y) ≤ e^{−α₁y}`.
    pub fn tail_cutoff(&self, eps: f64) -> f64 {
        (1.0 / eps).ln() / self.min_rate()
    }

    /// Draws a jump size from two independent uniforms: the first picks
    /// the component, the second is inverted through its exponential cdf.
    pub fn sample_from_uniforms(&self, u_component: f64, u_size: f64) -> f64 {
        let mut acc = 0.0;
        let mut rate = self.max_rate();
        for t in &self.terms {
            acc += t.weight;
            if u_component < acc {
                rate = t.rate;
                break;
            }
        }
        // u_size ∈ [0,1) so 1 − u_size ∈ (0,1]
        -(1.0 - u_size).ln() / rate
    }

    /// `Σ b α (1/(α − s) − 1/α)·α = Σ b s/(α − s)`, i.e. `E[e^{sY}] − 1`,
    /// continued analytically to every `s` that is not a pole.
    fn mgf_minus_one(&self, s: f64) -> f64 {
        self.terms.iter().map(|t| t.weight * s / (t.rate - s)).sum()
    }

    /// Derivative of [`Self::mgf_minus_one`] in `s`.
    fn mgf_derivative(&self, s: f64, order: u32) -> f64 {
        // d^k/ds^k α/(α − s) = k! α /(α − s)^{k+1}
        let fact: f64 = (1..=order).map(f64::from).product();
        self.terms
            .iter()
            .map(|t| t.weight * fact * t.rate / (t.rate - s).powi(order as i32 + 1))
            .sum()
    }
}

/// Intensity and size law of one jump direction. `density` is present iff
/// `intensity > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpSide {
    intensity: f64,
    density: Option<MixedExponential>,
}

impl JumpSide {
    pub fn none() -> Self {
        Self {
            intensity: 0.0,
            density: None,
        }
    }

    pub fn new(intensity: f64, density: MixedExponential) -> Result<Self> {
        if !intensity.is_finite() || intensity < 0.0 {
            return Err(Error::InvalidModel {
                key: "lambda".into(),
                reason: format!("intensity {intensity} must be finite and non-negative"),
            });
        }
        if intensity == 0.0 {
            return Ok(Self::none());
        }
        Ok(Self {
            intensity,
            density: Some(density),
        })
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn density(&self) -> Option<&MixedExponential> {
        self.density.as_ref()
    }

    pub fn is_active(&self) -> bool {
        self.density.is_some()
    }

    pub fn mean_size(&self) -> f64 {
        self.density.as_ref().map_or(0.0, MixedExponential::mean)
    }
}

/// Immutable risk model: drift, Gaussian coefficient, jumps on each side and
/// the discount rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    drift: f64,
    sigma: f64,
    negative: JumpSide,
    positive: JumpSide,
    discount: f64,
}

impl ModelSpec {
    pub fn new(
        drift: f64,
        sigma: f64,
        negative: JumpSide,
        positive: JumpSide,
        discount: f64,
    ) -> Result<Self> {
        let bad = |key: &str, reason: String| Error::InvalidModel {
            key: key.into(),
            reason,
        };
        if !drift.is_finite() {
            return Err(bad("drift", format!("{drift} is not finite")));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(bad("sigma", format!("{sigma} must be finite and non-negative")));
        }
        if !discount.is_finite() || discount <= 0.0 {
            return Err(bad("discount", format!("{discount} must be finite and positive")));
        }
        if drift == 0.0 && sigma == 0.0 && !negative.is_active() && !positive.is_active() {
            return Err(bad(
                "model",
                "degenerate process: zero drift, no Gaussian part and no jumps".into(),
            ));
        }
        Ok(Self {
            drift,
            sigma,
            negative,
            positive,
            discount,
        })
    }

    /// Spectrally negative model with a single exponential claim law.
    pub fn cramer_lundberg(
        premium: f64,
        sigma: f64,
        claim_intensity: f64,
        claim_rate: f64,
        discount: f64,
    ) -> Result<Self> {
        Self::new(
            premium,
            sigma,
            JumpSide::new(claim_intensity, MixedExponential::exponential(claim_rate)?)?,
            JumpSide::none(),
            discount,
        )
    }

    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn negative(&self) -> &JumpSide {
        &self.negative
    }

    pub fn positive(&self) -> &JumpSide {
        &self.positive
    }

    pub fn discount(&self) -> f64 {
        self.discount
    }

    /// Same process, different discount rate.
    pub fn with_discount(&self, discount: f64) -> Result<Self> {
        Self::new(
            self.drift,
            self.sigma,
            self.negative.clone(),
            self.positive.clone(),
            discount,
        )
    }

    /// Right end of the exponent's domain: the smallest positive-jump rate,
    /// or `+∞` without positive jumps.
    pub fn theta(&self) -> f64 {
        self.positive
            .density()
            .map_or(f64::INFINITY, MixedExponential::min_rate)
    }

    /// Left end of the exponent's domain: `−α⁻₁`, or `−∞` without negative jumps.
    pub fn lower_bound(&self) -> f64 {
        self.negative
            .density()
            .map_or(f64::NEG_INFINITY, |d| -d.min_rate())
    }

    pub fn total_jump_intensity(&self) -> f64 {
        self.negative.intensity + self.positive.intensity
    }

    /// `Ψ′(0+) = E[X₁ − X₀]`.
    pub fn mean_drift(&self) -> f64 {
        self.drift + self.positive.intensity * self.positive.mean_size()
            - self.negative.intensity * self.negative.mean_size()
    }

    /// Laplace exponent on its admissible interval `(−α⁻₁, Θ)`.
    pub fn laplace_exponent(&self, theta: f64) -> Result<f64> {
        self.check_domain("laplace exponent", theta)?;
        Ok(self.exponent_continued(theta))
    }

    /// `κ(η) = Ψ(η + ρ) − δ`, the exponent of the Esscher-tilted process
    /// shifted by the discount rate.
    pub fn tilted_exponent(&self, rho: f64, eta: f64) -> Result<f64> {
        self.check_domain("tilted exponent", eta + rho)?;
        Ok(self.exponent_continued(eta + rho) - self.discount)
    }

    fn check_domain(&self, what: &'static str, theta: f64) -> Result<()> {
        let (lo, hi) = (self.lower_bound(), self.theta());
        if theta.is_nan() || theta <= lo || theta >= hi {
            return Err(Error::Domain {
                what,
                value: theta,
                bound: format!("{lo} < θ < {hi}"),
            });
        }
        Ok(())
    }

    /// The rational closed form of Ψ, valid wherever it has no pole. Beyond
    /// `−α⁻₁` this is the analytic continuation used to locate the roots of
    /// the tilted Cramér equation.
    pub(crate) fn exponent_continued(&self, theta: f64) -> f64 {
        let mut v = self.drift * theta + 0.5 * self.sigma * self.sigma * theta * theta;
        if let Some(d) = self.positive.density() {
            v += self.positive.intensity * d.mgf_minus_one(theta);
        }
        if let Some(d) = self.negative.density() {
            v += self.negative.intensity * d.mgf_minus_one(-theta);
        }
        v
    }

    /// k-th derivative (k = 1, 2) of the continued exponent.
    pub(crate) fn exponent_derivative_continued(&self, theta: f64, order: u32) -> f64 {
        let mut v = match order {
            1 => self.drift + self.sigma * self.sigma * theta,
            2 => self.sigma * self.sigma,
            _ => 0.0,
        };
        if let Some(d) = self.positive.density() {
            v += self.positive.intensity * d.mgf_derivative(theta, order);
        }
        if let Some(d) = self.negative.density() {
            let sign = if order % 2 == 1 { -1.0 } else { 1.0 };
            v += sign * self.negative.intensity * d.mgf_derivative(-theta, order);
        }
        v
    }

    /// Derivative of Ψ on its admissible interval.
    pub fn laplace_exponent_derivative(&self, theta: f64) -> Result<f64> {
        self.check_domain("laplace exponent derivative", theta)?;
        Ok(self.exponent_derivative_continued(theta, 1))
    }

    pub fn lundberg_check(&self) -> LundbergReport {
        let theta = self.theta();
        let limit_divergence = if self.positive.is_active() {
            // pole of the positive-jump transform at Θ
            true
        } else {
            self.sigma > 0.0 || self.drift > 0.0
        };
        let mean_drift = self.mean_drift();
        LundbergReport {
            theta,
            limit_divergence,
            drift_positive: mean_drift > 0.0,
            mean_drift,
        }
    }

    /// Esscher transform by `rho`: the model whose Laplace exponent is
    /// `η ↦ Ψ(η + ρ) − Ψ(ρ)`. Requires `−α⁻₁ < ρ < Θ`.
    pub fn esscher_tilt(&self, rho: f64) -> Result<Self> {
        self.check_domain("esscher tilt", rho)?;
        let tilt_side = |side: &JumpSide, shift: f64| -> Result<JumpSide> {
            let Some(d) = side.density() else {
                return Ok(JumpSide::none());
            };
            let raw: Vec<f64> = d
                .terms()
                .iter()
                .map(|t| t.weight * t.rate / (t.rate + shift))
                .collect();
            let mass: f64 = raw.iter().sum();
            let weights: Vec<f64> = raw.iter().map(|w| w / mass).collect();
            let rates: Vec<f64> = d.terms().iter().map(|t| t.rate + shift).collect();
            JumpSide::new(side.intensity * mass, MixedExponential::new(&weights, &rates)?)
        };
        Self::new(
            self.drift + self.sigma * self.sigma * rho,
            self.sigma,
            tilt_side(&self.negative, rho)?,
            tilt_side(&self.positive, -rho)?,
            self.discount,
        )
    }
}

/// Outcome of the Lundberg and drift checks. Callers gate on [`Self::passed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LundbergReport {
    /// `+∞` when there are no positive jumps.
    #[serde(serialize_with = "serialize_extended")]
    pub theta: f64,
    pub limit_divergence: bool,
    pub drift_positive: bool,
    /// `Ψ′(0+)`.
    pub mean_drift: f64,
}

impl LundbergReport {
    pub fn passed(&self) -> bool {
        self.theta > 0.0 && self.limit_divergence && self.drift_positive
    }

    pub fn explain(&self) -> String {
        let mut parts = Vec::new();
        if self.theta <= 0.0 {
            parts.push(format!("Θ = {} is not positive", self.theta));
        }
        if !self.limit_divergence {
            parts.push("Ψ(θ) does not diverge as θ ↑ Θ".to_string());
        }
        if !self.drift_positive {
            parts.push(format!(
                "the process does not drift to +∞: Ψ′(0+) = {} ≤ 0",
                self.mean_drift
            ));
        }
        if parts.is_empty() {
            "all conditions hold".into()
        } else {
            parts.join("; ")
        }
    }
}

fn serialize_extended<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    }
}

/// On-disk model description.
///
/// ```json
/// {
///   "drift": 1.5,
///   "sigma": 0.0,
///   "discount": 0.1,
///   "neg_jumps": { "lambda": 1.0, "weights": [1.0], "rates": [2.0] },
///   "pos_jumps": { "lambda": 0.0, "weights": [], "rates": [] }
/// }
/// ```
///
/// `drift` is the total linear drift of the surplus (the premium rate), not
/// the truncated-triplet constant. Either jump block may be omitted, which is
/// the same as `lambda = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub drift: f64,
    pub sigma: f64,
    pub discount: f64,
    #[serde(default)]
    pub neg_jumps: JumpBlock,
    #[serde(default)]
    pub pos_jumps: JumpBlock,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpBlock {
    pub lambda: f64,
    #[serde(default)]
    pub weights: Vec<f64>,
    #[serde(default)]
    pub rates: Vec<f64>,
}

impl JumpBlock {
    fn to_side(&self, key: &str) -> Result<JumpSide> {
        let wrap = |e: Error| match e {
            Error::InvalidModel { key: k, reason } => Error::InvalidModel {
                key: format!("{key}.{k}"),
                reason,
            },
            other => other,
        };
        if self.lambda == 0.0 && self.weights.is_empty() && self.rates.is_empty() {
            return Ok(JumpSide::none());
        }
        if self.lambda == 0.0 {
            // weights given but switched off; still validate them
            MixedExponential::with_tolerance(&self.weights, &self.rates, FILE_WEIGHT_SUM_TOL)
                .map_err(wrap)?;
            return Ok(JumpSide::none());
        }
        let density =
            MixedExponential::with_tolerance(&self.weights, &self.rates, FILE_WEIGHT_SUM_TOL)
                .map_err(wrap)?;
        JumpSide::new(self.lambda, density).map_err(wrap)
    }

    fn from_side(side: &JumpSide) -> Self {
        match side.density() {
            Some(d) => Self {
                lambda: side.intensity(),
                weights: d.weights(),
                rates: d.rates(),
            },
            None => Self::default(),
        }
    }
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_model(&self) -> Result<ModelSpec> {
        ModelSpec::new(
            self.drift,
            self.sigma,
            self.neg_jumps.to_side("neg_jumps")?,
            self.pos_jumps.to_side("pos_jumps")?,
            self.discount,
        )
    }
}

impl From<&ModelSpec> for ModelFile {
    fn from(m: &ModelSpec) -> Self {
        Self {
            drift: m.drift,
            sigma: m.sigma,
            discount: m.discount,
            neg_jumps: JumpBlock::from_side(&m.negative),
            pos_jumps: JumpBlock::from_side(&m.positive),
        }
    }
}

impl ModelSpec {
    /// Parses and validates a JSON model document.
    pub fn from_json(text: &str) -> Result<Self> {
        ModelFile::parse(text)?.to_model()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ModelFile::from(self)).expect("model serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m1() -> ModelSpec {
        ModelSpec::cramer_lundberg(1.5, 0.0, 1.0, 2.0, 0.1).unwrap()
    }

    fn pure_drift(a: f64) -> ModelSpec {
        ModelSpec::new(a, 0.0, JumpSide::none(), JumpSide::none(), 0.1).unwrap()
    }

    /// Adaptive-free oracle: composite Simpson on the jump integral
    /// ∫(e^{θx} − 1)π(x)dx, truncated far in the tail.
    fn jump_integral_oracle(d: &MixedExponential, s: f64) -> f64 {
        let upper = 60.0 / (d.min_rate() - s.max(0.0));
        let n = 200_000;
        let h = upper / n as f64;
        let f = |y: f64| ((s * y).exp() - 1.0) * d.density(y);
        let mut acc = f(0.0) + f(upper);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn exponent_of_pure_drift_is_linear() {
        assert_eq!(pure_drift(1.0).laplace_exponent(0.3).unwrap(), 0.3);
    }

    #[test]
    fn exponent_vanishes_at_zero() {
        let two_sided = ModelSpec::new(
            0.7,
            0.4,
            JumpSide::new(1.3, MixedExponential::new(&[0.3, 0.7], &[1.0, 4.0]).unwrap()).unwrap(),
            JumpSide::new(0.5, MixedExponential::exponential(3.0).unwrap()).unwrap(),
            0.05,
        )
        .unwrap();
        for m in [m1(), pure_drift(2.0), two_sided] {
            assert_eq!(m.laplace_exponent(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn exponent_of_m1_at_one() {
        let v = m1().laplace_exponent(1.0).unwrap();
        assert!((v - 7.0 / 6.0).abs() < 1e-15, "{v}");
        let d = MixedExponential::exponential(2.0).unwrap();
        let oracle = 1.5 + jump_integral_oracle(&d, -1.0);
        assert!((v - oracle).abs() < 1e-9, "{v} vs {oracle}");
    }

    #[test]
    fn domain_errors_name_the_bound() {
        let m = ModelSpec::new(
            1.0,
            0.0,
            JumpSide::new(1.0, MixedExponential::exponential(2.0).unwrap()).unwrap(),
            JumpSide::new(0.2, MixedExponential::exponential(3.0).unwrap()).unwrap(),
            0.1,
        )
        .unwrap();
        assert!(m.laplace_exponent(2.9).is_ok());
        let err = m.laplace_exponent(3.0).unwrap_err().to_string();
        assert!(err.contains("< 3"), "{err}");
        assert!(m.laplace_exponent(-2.0).is_err());
        assert!(m.laplace_exponent(-1.99).is_ok());
    }

    #[test]
    fn lundberg_reports() {
        let r = m1().lundberg_check();
        assert_eq!(r.theta, f64::INFINITY);
        assert!(r.limit_divergence && r.drift_positive);
        assert!((r.mean_drift - 1.0).abs() < 1e-15);
        // finite-difference confirmation of Ψ′(0+)
        let m = m1();
        let h = 1e-6;
        let fd = (m.laplace_exponent(h).unwrap() - m.laplace_exponent(-h).unwrap()) / (2.0 * h);
        assert!((fd - 1.0).abs() < 1e-8);

        let bm = ModelSpec::new(0.0, 1.0, JumpSide::none(), JumpSide::none(), 0.1).unwrap();
        let r = bm.lundberg_check();
        assert_eq!(r.theta, f64::INFINITY);
        assert!(r.limit_divergence);
        assert!(!r.drift_positive);
        assert!(!r.passed());
        assert!(r.explain().contains("drift"));

        let with_pos = ModelSpec::new(
            1.0,
            0.0,
            JumpSide::none(),
            JumpSide::new(1.0, MixedExponential::new(&[0.5, 0.5], &[3.0, 5.0]).unwrap()).unwrap(),
            0.1,
        )
        .unwrap();
        assert_eq!(with_pos.lundberg_check().theta, 3.0);
    }

    #[test]
    fn tilted_exponent_cases() {
        let m = pure_drift(1.0);
        assert!((m.tilted_exponent(0.1, 0.2).unwrap() - 0.2).abs() < 1e-15);

        let m = m1();
        let rho = 0.097_723_739_982_043_55;
        let expected = 1.5 * (rho - 1.0) - (rho - 1.0) / (2.0 + rho - 1.0) - 0.1;
        let got = m.tilted_exponent(rho, -1.0).unwrap();
        assert!((got - expected).abs() < 1e-14);
        assert!(got < 0.0);
    }

    #[test]
    fn density_validation() {
        assert!(MixedExponential::new(&[0.5, 0.5], &[2.0, 1.0]).is_err());
        assert!(MixedExponential::new(&[0.5, 0.6], &[1.0, 2.0]).is_err());
        assert!(MixedExponential::new(&[], &[]).is_err());
        assert!(MixedExponential::new(&[1.0], &[0.0]).is_err());
        assert!(MixedExponential::new(&[-0.1, 1.1], &[1.0, 2.0]).is_err());
        assert!(ModelSpec::new(0.0, 0.0, JumpSide::none(), JumpSide::none(), 0.1).is_err());
        assert!(ModelSpec::new(1.0, 0.0, JumpSide::none(), JumpSide::none(), 0.0).is_err());
        assert!(ModelSpec::new(1.0, -1.0, JumpSide::none(), JumpSide::none(), 0.1).is_err());
    }

    #[test]
    fn model_file_roundtrip_and_errors() {
        let text = r#"{
            "drift": 2.0, "sigma": 0.0, "discount": 0.05,
            "neg_jumps": {"lambda": 1.0, "weights": [0.5, 0.5000000001], "rates": [1.0, 3.0]}
        }"#;
        let m = ModelSpec::from_json(text).unwrap();
        let w = m.negative().density().unwrap().weights();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(!m.positive().is_active());
        let again = ModelSpec::from_json(&m.to_json()).unwrap();
        assert_eq!(m, again);

        let bad = r#"{"drift": 2.0, "sigma": 0.0, "discount": 0.05,
            "neg_jumps": {"lambda": 1.0, "weights": [0.5, 0.49], "rates": [1.0, 3.0]}}"#;
        let err = ModelSpec::from_json(bad).unwrap_err().to_string();
        assert!(err.contains("neg_jumps"), "{err}");

        let err = ModelSpec::from_json("{\n \"drift\": 1.0,\n \"sigma\": 0.0\n}")
            .unwrap_err()
            .to_string();
        assert!(err.contains("discount") && err.contains("line"), "{err}");
    }

    #[test]
    fn esscher_tilt_matches_shifted_exponent() {
        let m = ModelSpec::new(
            0.9,
            0.3,
            JumpSide::new(1.2, MixedExponential::new(&[0.4, 0.6], &[1.5, 4.0]).unwrap()).unwrap(),
            JumpSide::new(0.4, MixedExponential::exponential(2.5).unwrap()).unwrap(),
            0.1,
        )
        .unwrap();
        let rho = 0.3;
        let tilted = m.esscher_tilt(rho).unwrap();
        let psi_rho = m.laplace_exponent(rho).unwrap();
        for eta in [-1.2, -0.5, 0.0, 0.4, 1.9] {
            let lhs = tilted.laplace_exponent(eta).unwrap();
            let rhs = m.laplace_exponent(eta + rho).unwrap() - psi_rho;
            assert!((lhs - rhs).abs() < 1e-13, "{eta}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn sampling_inverts_the_cdf() {
        let d = MixedExponential::new(&[0.25, 0.75], &[1.0, 5.0]).unwrap();
        // component 0 for u < 0.25, then an Exp(1) quantile
        let y = d.sample_from_uniforms(0.1, 0.5);
        assert!((y - 2f64.ln()).abs() < 1e-15);
        let y = d.sample_from_uniforms(0.9, 0.5);
        assert!((y - 2f64.ln() / 5.0).abs() < 1e-15);
    }
}
