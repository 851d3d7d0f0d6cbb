//! Lundberg root, tilted ruin probability and the generalized scale function.
//!
//! For a discount rate δ let ρ be the positive root of `Ψ(ρ) = δ`. The
//! Esscher-tilted process with exponent `κ(η) = Ψ(η + ρ) − δ` drifts to +∞,
//! and when the negative jumps are mixed-exponential its ruin probability is
//!
//! ```text
//! ψ̃(x) = Σ_j A_j e^{−R_j x}
//! ```
//!
//! where the `−R_j` are the real negative roots of `κ(η) = 0`. The tilted
//! process has negative-jump rates `α_j + ρ`; the roots interlace with them,
//!
//! ```text
//! 0 < R_1 < α_1+ρ < R_2 < … < α_n+ρ < R_{n+1},
//! ```
//!
//! with the last root present only when the tilted process has unbounded
//! variation or negative drift (σ > 0 or a < 0). The coefficients are
//!
//! ```text
//! A_j = Π_k (1 − R_j/(α_k+ρ)) / Π_{k≠j} (1 − R_j/R_k).
//! ```
//!
//! The generalized scale function is `h(x) = (1 − ψ̃(x)) e^{ρx}` for `x ≥ 0`
//! and zero below.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::ModelSpec;
use crate::roots::find_root;

/// Bracket offset from a pole, relative to the pole location.
const POLE_OFFSET: f64 = 1e-12;
const MAX_DOUBLINGS: usize = 60;

/// Unique `ρ ∈ (0, Θ)` with `Ψ(ρ) = δ`.
pub fn root_rho(model: &ModelSpec) -> Result<f64> {
    let report = model.lundberg_check();
    if !report.passed() {
        return Err(Error::Lundberg(report));
    }
    let delta = model.discount();
    let f = |t: f64| {
        (
            model.exponent_continued(t) - delta,
            model.exponent_derivative_continued(t, 1),
        )
    };
    let theta = model.theta();
    let hi = if theta.is_finite() {
        let mut eps = POLE_OFFSET;
        let mut hi = theta * (1.0 - eps);
        while f(hi).0 <= 0.0 {
            eps *= 1e-2;
            hi = theta * (1.0 - eps);
            if eps < 1e-300 || hi >= theta {
                return Err(Error::Bracket {
                    what: "Lundberg root ρ(δ)".into(),
                    lo: 0.0,
                    hi: theta,
                });
            }
        }
        hi
    } else {
        let mut hi = 1.0;
        let mut n = 0;
        while f(hi).0 <= 0.0 {
            hi *= 2.0;
            n += 1;
            if n > 1100 {
                return Err(Error::Bracket {
                    what: "Lundberg root ρ(δ)".into(),
                    lo: 0.0,
                    hi,
                });
            }
        }
        hi
    };
    let rho = find_root("Lundberg root ρ(δ)", f, 0.0, hi)?;
    let residual = (model.exponent_continued(rho) - delta).abs();
    if residual > 1e-12 * delta.max(1.0) || rho <= 0.0 {
        return Err(Error::Invariant(format!(
            "Lundberg root ρ = {rho} leaves residual |Ψ(ρ) − δ| = {residual:e}"
        )));
    }
    Ok(rho)
}

/// `A_j = Π_k (1 − R_j/p_k) / Π_{k≠j} (1 − R_j/R_k)` for roots `R` and
/// tilted jump rates `p`.
pub fn expansion_coefficients(roots: &[f64], tilted_rates: &[f64]) -> Vec<f64> {
    roots
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let num: f64 = tilted_rates.iter().map(|&p| 1.0 - r / p).product();
            let den: f64 = roots
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &rk)| 1.0 - r / rk)
                .product();
            num / den
        })
        .collect()
}

/// Ruin-probability expansion of the tilted process.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TiltedRuinExpansion {
    pub rho: f64,
    pub roots: Vec<f64>,
    pub coeffs: Vec<f64>,
    /// Negative-jump rates of the tilted process, `α_j + ρ`.
    pub tilted_rates: Vec<f64>,
}

impl TiltedRuinExpansion {
    pub fn sum_coeffs(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    /// `ψ̃(x) = Σ A_j e^{−R_j x}`.
    pub fn ruin_probability(&self, x: f64) -> Result<f64> {
        self.ruin_derivative(x, 0)
    }

    /// k-th derivative `Σ A_j (−R_j)^k e^{−R_j x}`.
    pub fn ruin_derivative(&self, x: f64, order: u32) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Domain {
                what: "tilted ruin probability",
                value: x,
                bound: "x ≥ 0".into(),
            });
        }
        Ok(self
            .roots
            .iter()
            .zip(&self.coeffs)
            .map(|(&r, &a)| a * (-r).powi(order as i32) * (-r * x).exp())
            .sum())
    }

    pub fn summary(&self) -> ExpansionSummary {
        ExpansionSummary {
            rho: self.rho,
            roots: self.roots.clone(),
            coeffs: self.coeffs.clone(),
            sum_coeffs: self.sum_coeffs(),
        }
    }
}

/// JSON export shape of a solved expansion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionSummary {
    pub rho: f64,
    pub roots: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub sum_coeffs: f64,
}

/// Whether `κ(η) → +∞` as `η → −∞`, which adds a root beyond the last pole.
fn has_unbounded_root(model: &ModelSpec) -> bool {
    model.sigma() > 0.0 || model.drift() < 0.0
}

/// Solves for all real negative roots of the tilted Cramér equation and the
/// coefficients of the tilted ruin probability.
pub fn solve_expansion(model: &ModelSpec) -> Result<TiltedRuinExpansion> {
    let rho = root_rho(model)?;
    let delta = model.discount();
    let kappa = |r: f64| {
        (
            model.exponent_continued(rho - r) - delta,
            -model.exponent_derivative_continued(rho - r, 1),
        )
    };
    let tilted_rates: Vec<f64> = model
        .negative()
        .density()
        .map(|d| d.rates().iter().map(|a| a + rho).collect())
        .unwrap_or_default();

    let mut brackets = Vec::new();
    // κ(−ρ) = Ψ(0) − δ = −δ < 0 and R_1 > ρ, so ρ is a safe left end
    let mut left = rho;
    for &p in &tilted_rates {
        brackets.push((left, p * (1.0 - POLE_OFFSET)));
        left = p * (1.0 + POLE_OFFSET);
    }

    let mut roots = Vec::with_capacity(tilted_rates.len() + 1);
    for (j, &(lo, hi)) in brackets.iter().enumerate() {
        roots.push(find_root(&format!("root R_{}", j + 1), kappa, lo, hi)?);
    }
    if has_unbounded_root(model) {
        let base = tilted_rates.last().copied().unwrap_or(rho);
        let lo = left;
        let mut hi = 2.0 * base + 1.0;
        let mut found = false;
        for _ in 0..=MAX_DOUBLINGS {
            if kappa(hi).0 > 0.0 {
                found = true;
                break;
            }
            hi *= 2.0;
        }
        if !found {
            return Err(Error::Bracket {
                what: format!("root R_{} beyond the last pole", roots.len() + 1),
                lo,
                hi,
            });
        }
        roots.push(find_root(
            &format!("root R_{}", roots.len() + 1),
            kappa,
            lo,
            hi,
        )?);
    }

    for (j, &r) in roots.iter().enumerate() {
        let (v, dv) = kappa(r);
        if v.abs() > 1e-10 * (1.0 + dv.abs()) {
            return Err(Error::Invariant(format!(
                "κ(−R_{}) = {v:e} is not a root (κ′ = {dv:e})",
                j + 1
            )));
        }
    }
    check_interlacing(&roots, &tilted_rates)?;
    if let Some(w) = roots.windows(2).position(|w| w[1] - w[0] <= 1e-12 * w[1]) {
        return Err(Error::Invariant(format!(
            "repeated root: R_{} = {} and R_{} = {} coincide",
            w + 1,
            roots[w],
            w + 2,
            roots[w + 1]
        )));
    }

    let coeffs = expansion_coefficients(&roots, &tilted_rates);
    if let Some(j) = coeffs.iter().position(|&a| !(a > 0.0)) {
        return Err(Error::Invariant(format!(
            "coefficient A_{} = {} is not positive",
            j + 1,
            coeffs[j]
        )));
    }
    let sum: f64 = coeffs.iter().sum();
    if sum > 1.0 + 1e-10 {
        return Err(Error::Invariant(format!(
            "Σ A_j = {sum} exceeds 1; ψ̃(0) would not be a probability"
        )));
    }
    Ok(TiltedRuinExpansion {
        rho,
        roots,
        coeffs,
        tilted_rates,
    })
}

/// Strict interlacing `0 < R_1 < p_1 < R_2 < … < p_n < R_{n+1}`.
pub fn check_interlacing(roots: &[f64], tilted_rates: &[f64]) -> Result<()> {
    let n = tilted_rates.len();
    if roots.len() != n && roots.len() != n + 1 {
        return Err(Error::Invariant(format!(
            "found {} roots for {} jump rates",
            roots.len(),
            n
        )));
    }
    if roots.first().is_some_and(|&r| r <= 0.0) {
        return Err(Error::Invariant("interlacing broken: R_1 ≤ 0".into()));
    }
    for (j, &p) in tilted_rates.iter().enumerate() {
        if roots[j] >= p {
            return Err(Error::Invariant(format!(
                "interlacing broken: R_{} = {} ≥ α_{}+ρ = {}",
                j + 1,
                roots[j],
                j + 1,
                p
            )));
        }
        if let Some(&next) = roots.get(j + 1) {
            if next <= p {
                return Err(Error::Invariant(format!(
                    "interlacing broken: R_{} = {} ≤ α_{}+ρ = {}",
                    j + 2,
                    next,
                    j + 1,
                    p
                )));
            }
        }
    }
    Ok(())
}

/// `h(x) = (1 − ψ̃(x)) e^{ρx}` together with its closed-form derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFunction {
    model: ModelSpec,
    expansion: TiltedRuinExpansion,
}

impl ScaleFunction {
    pub fn new(model: &ModelSpec) -> Result<Self> {
        let expansion = solve_expansion(model)?;
        Ok(Self {
            model: model.clone(),
            expansion,
        })
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }

    pub fn expansion(&self) -> &TiltedRuinExpansion {
        &self.expansion
    }

    pub fn rho(&self) -> f64 {
        self.expansion.rho
    }

    /// `h^{(order)}(x)` for `x ≥ 0`; orders 0, 1 and 2 are the documented
    /// surface, higher orders are used by the convexity diagnostics.
    pub fn eval(&self, x: f64, order: u32) -> Result<f64> {
        if x.is_nan() || x < 0.0 {
            return Err(Error::Domain {
                what: "scale function",
                value: x,
                bound: "x ≥ 0".into(),
            });
        }
        Ok(self.derivative_unchecked(x, order))
    }

    /// `ρ^k e^{ρx} − Σ A_j (ρ − R_j)^k e^{(ρ − R_j)x}`.
    pub(crate) fn derivative_unchecked(&self, x: f64, order: u32) -> f64 {
        let rho = self.expansion.rho;
        let k = order as i32;
        let tail: f64 = self
            .expansion
            .roots
            .iter()
            .zip(&self.expansion.coeffs)
            .map(|(&r, &a)| a * (rho - r).powi(k) * ((rho - r) * x).exp())
            .sum();
        rho.powi(k) * (rho * x).exp() - tail
    }

    pub fn h(&self, x: f64) -> Result<f64> {
        self.eval(x, 0)
    }

    pub fn h_prime(&self, x: f64) -> Result<f64> {
        self.eval(x, 1)
    }

    pub fn h_second(&self, x: f64) -> Result<f64> {
        self.eval(x, 2)
    }

    /// Rows `(x, h, h′, h″)` on the given points.
    pub fn table(&self, xs: &[f64]) -> Result<Vec<[f64; 4]>> {
        xs.iter()
            .map(|&x| Ok([x, self.eval(x, 0)?, self.eval(x, 1)?, self.eval(x, 2)?]))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{JumpSide, MixedExponential};

    fn m1() -> ModelSpec {
        ModelSpec::cramer_lundberg(1.5, 0.0, 1.0, 2.0, 0.1).unwrap()
    }

    fn mixture() -> ModelSpec {
        ModelSpec::new(
            2.0,
            0.0,
            JumpSide::new(1.0, MixedExponential::new(&[0.5, 0.5], &[1.0, 3.0]).unwrap()).unwrap(),
            JumpSide::none(),
            0.05,
        )
        .unwrap()
    }

    /// Sign scan of κ(−r) followed by plain bisection.
    fn scan_roots(model: &ModelSpec, rho: f64, upto: f64, steps: usize) -> Vec<f64> {
        let k = |r: f64| model.exponent_continued(rho - r) - model.discount();
        let h = upto / steps as f64;
        let mut out = Vec::new();
        let mut prev = (h * 0.5, k(h * 0.5));
        for i in 1..steps {
            let r = (i as f64 + 0.5) * h;
            let v = k(r);
            if prev.1.signum() != v.signum() && prev.1.is_finite() && v.is_finite() {
                let (mut a, mut b) = (prev.0, r);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if k(m).signum() == k(a).signum() {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                let m = 0.5 * (a + b);
                // discard poles: a genuine root has a small value nearby
                if k(m).abs() < 1e-6 {
                    out.push(m);
                }
            }
            prev = (r, v);
        }
        out
    }

    #[test]
    fn rho_for_pure_drift() {
        let m = ModelSpec::new(1.0, 0.0, JumpSide::none(), JumpSide::none(), 0.1).unwrap();
        assert!((root_rho(&m).unwrap() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rho_for_brownian_motion_with_drift() {
        let m = ModelSpec::new(0.5, 1.0, JumpSide::none(), JumpSide::none(), 0.1).unwrap();
        let exact = -0.5 + (0.25f64 + 0.2).sqrt();
        assert!((root_rho(&m).unwrap() - exact).abs() < 1e-14);
        assert!((exact - 0.17082).abs() < 1e-5);
    }

    #[test]
    fn rho_for_m1_matches_bisection_oracle() {
        let m = m1();
        let (mut lo, mut hi) = (0.0, 10.0 / 1.5);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if m.laplace_exponent(mid).unwrap() < 0.1 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let rho = root_rho(&m).unwrap();
        assert!((rho - lo).abs() < 1e-14);
        assert!((rho - 0.09772).abs() < 1e-5);
        assert!((m.laplace_exponent(rho).unwrap() - 0.1).abs() <= 1e-12);
    }

    #[test]
    fn rho_refuses_failed_lundberg() {
        let m = ModelSpec::new(0.0, 1.0, JumpSide::none(), JumpSide::none(), 0.1).unwrap();
        assert!(matches!(root_rho(&m), Err(Error::Lundberg(_))));
        let m = ModelSpec::cramer_lundberg(0.4, 0.0, 1.0, 2.0, 0.1).unwrap();
        let msg = root_rho(&m).unwrap_err().to_string();
        assert!(msg.contains("drift"), "{msg}");
    }

    #[test]
    fn rho_below_positive_jump_pole() {
        let m = ModelSpec::new(
            0.2,
            0.0,
            JumpSide::none(),
            JumpSide::new(2.0, MixedExponential::exponential(1.0).unwrap()).unwrap(),
            5.0,
        )
        .unwrap();
        let rho = root_rho(&m).unwrap();
        assert!(rho > 0.0 && rho < 1.0);
        assert!((m.laplace_exponent(rho).unwrap() - 5.0).abs() < 1e-11);
    }

    #[test]
    fn single_root_coefficient_tends_to_one() {
        let a = expansion_coefficients(&[1e-14], &[2.0]);
        assert!((a[0] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn m1_expansion_matches_scan_and_classical_formula() {
        let m = m1();
        let e = solve_expansion(&m).unwrap();
        // bounded variation with positive drift: one root per claim component
        assert_eq!(e.roots.len(), 1);
        let scanned = scan_roots(&m, e.rho, 50.0, 50_000);
        assert_eq!(scanned.len(), 1);
        assert!((scanned[0] - e.roots[0]).abs() < 1e-10);
        // exponential claims: tilted process is Cramér–Lundberg with
        // λ̃ = λα/(α+ρ), α̃ = α+ρ, ψ̃(0) = λ̃/(c α̃), R = α̃ − λ̃/c
        let (c, lam, alpha) = (1.5, 1.0, 2.0);
        let at = alpha + e.rho;
        let lt = lam * alpha / at;
        assert!((e.roots[0] - (at - lt / c)).abs() < 1e-12);
        assert!((e.coeffs[0] - lt / (c * at)).abs() < 1e-12);
        assert!(e.sum_coeffs() < 1.0);
    }

    #[test]
    fn mixture_expansion_counts_and_interlaces() {
        let m = mixture();
        let e = solve_expansion(&m).unwrap();
        assert_eq!(e.roots.len(), 2);
        let scanned = scan_roots(&m, e.rho, 60.0, 60_000);
        assert_eq!(scanned.len(), 2);
        for (a, b) in scanned.iter().zip(&e.roots) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(e.roots[0] < 1.0 + e.rho && e.roots[1] > 1.0 + e.rho && e.roots[1] < 3.0 + e.rho);
        // with a Gaussian part the extra root beyond the last pole appears
        let m = ModelSpec::new(
            2.0,
            0.4,
            m.negative().clone(),
            JumpSide::none(),
            0.05,
        )
        .unwrap();
        let e = solve_expansion(&m).unwrap();
        assert_eq!(e.roots.len(), 3);
        assert!(e.roots[2] > 3.0 + e.rho);
        assert!((e.sum_coeffs() - 1.0).abs() < 1e-12);
        assert!(e.coeffs.iter().all(|&a| a > 0.0));
    }

    #[test]
    fn ruin_probability_properties() {
        let e = solve_expansion(&m1()).unwrap();
        assert!((e.ruin_probability(0.0).unwrap() - e.sum_coeffs()).abs() < 1e-16);
        let at1 = e.ruin_probability(1.0).unwrap();
        assert!(at1 > 0.0 && at1 < e.ruin_probability(0.0).unwrap());
        assert!(e.ruin_probability(200.0).unwrap() < 1e-100);
        assert!(e.ruin_probability(-0.1).is_err());
    }

    #[test]
    fn scale_function_paths_agree() {
        let sf = ScaleFunction::new(&m1()).unwrap();
        let x = 5.0;
        let direct = sf.h(x).unwrap();
        let composed = (1.0 - sf.expansion().ruin_probability(x).unwrap()) * (sf.rho() * x).exp();
        assert!((direct - composed).abs() <= 4.0 * f64::EPSILON * direct);
        // h′ = ρh + Σ A_j R_j e^{(ρ−R_j)x}
        let e = sf.expansion();
        let hp = sf.rho() * direct
            + e.roots
                .iter()
                .zip(&e.coeffs)
                .map(|(r, a)| a * r * ((sf.rho() - r) * x).exp())
                .sum::<f64>();
        assert!((hp - sf.h_prime(x).unwrap()).abs() < 1e-13 * hp);
        assert!(sf.h(-1.0).is_err());
    }

    #[test]
    fn scale_function_at_zero() {
        let sf = ScaleFunction::new(&m1()).unwrap();
        let e = sf.expansion();
        let h0 = sf.h(0.0).unwrap();
        assert!((h0 - (1.0 - e.sum_coeffs())).abs() < 1e-15);
        let hp0 = sf.h_prime(0.0).unwrap();
        let expected = sf.rho() * h0 + e.roots[0] * e.coeffs[0];
        assert!((hp0 - expected).abs() < 1e-14 && hp0 > 0.0);

        // σ > 0 forces h(0) = 0
        let m = ModelSpec::cramer_lundberg(1.5, 0.5, 1.0, 2.0, 0.1).unwrap();
        let sf = ScaleFunction::new(&m).unwrap();
        assert!(sf.h(0.0).unwrap().abs() < 1e-14);
        assert!(sf.h_prime(0.0).unwrap() > 0.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let sf = ScaleFunction::new(&mixture()).unwrap();
        let step = 1e-5;
        for &x in &[0.3, 1.0, 4.0, 9.0] {
            for order in 0..2 {
                let fd = (sf.eval(x + step, order).unwrap() - sf.eval(x - step, order).unwrap())
                    / (2.0 * step);
                let exact = sf.eval(x, order + 1).unwrap();
                assert!(
                    (fd - exact).abs() <= 1e-6 * exact.abs().max(1e-3),
                    "order {order} at {x}: {fd} vs {exact}"
                );
            }
        }
    }

    #[test]
    fn no_negative_jumps_gives_exponential_scale() {
        let m = ModelSpec::new(1.0, 0.0, JumpSide::none(), JumpSide::none(), 0.1).unwrap();
        let sf = ScaleFunction::new(&m).unwrap();
        assert!(sf.expansion().roots.is_empty());
        assert!((sf.h(2.0).unwrap() - (0.2f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn interlacing_checker_rejects_violations() {
        assert!(check_interlacing(&[0.5, 2.5], &[1.0, 3.0]).is_ok());
        assert!(check_interlacing(&[1.5, 2.5], &[1.0, 3.0]).is_err());
        assert!(check_interlacing(&[0.5, 0.9], &[1.0, 3.0]).is_err());
        assert!(check_interlacing(&[0.5], &[1.0, 3.0]).is_err());
    }
}
