//! Optimal barrier level and the barrier value function.
//!
//! For a barrier `b` the expected discounted dividends are
//!
//! ```text
//! V_b(x) = h(x)/h′(b)              0 ≤ x ≤ b
//!        = x − b + h(b)/h′(b)      x > b
//! ```
//!
//! and zero for `x < 0`. The optimal barrier `b*` is the largest global
//! minimiser of `h′` on `[0, ∞)`, using the right derivative at 0.
//!
//! The representation is exact when the surplus has no upward jumps. With
//! upward jumps `h` still solves `(Γ − δ)h = 0`, but `V_b` on `[0, b]` no
//! longer does, because jumps over the barrier see the linear branch.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::roots::find_root;
use crate::scale::ScaleFunction;

const GRID_POINTS: usize = 10_000;
const REFINE_TOL: f64 = 1e-8;
const TIE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchGrid {
    pub x_max: f64,
    pub n_points: usize,
    pub refinement: String,
    /// Set when the grid shows several separated near-minimal cells.
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimalBarrier {
    pub b_star: f64,
    pub hprime_min: f64,
    pub search: SearchGrid,
}

/// Smallest `x` with `ρ·h(x) > 2·h′(0+)`. Since `h′ ≥ ρh`, `h′` exceeds its
/// value at 0 everywhere beyond this point.
fn search_window(sf: &ScaleFunction) -> f64 {
    let rho = sf.rho();
    let target = 2.0 * sf.derivative_unchecked(0.0, 1);
    let g = |x: f64| rho * sf.derivative_unchecked(x, 0) - target;
    let mut hi = 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        // ties move the bracket right, toward the supremum
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Locates `b* = sup{b ≥ 0 : h′(b) ≤ h′(x) ∀x ≥ 0}`.
pub fn find_bstar(sf: &ScaleFunction) -> OptimalBarrier {
    let hp = |x: f64| sf.derivative_unchecked(x, 1);
    let x_max = search_window(sf);
    let step = x_max / GRID_POINTS as f64;
    let values: Vec<f64> = (0..=GRID_POINTS).map(|i| hp(i as f64 * step)).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tie = TIE_TOL * min.abs().max(1.0);
    let near: Vec<usize> = (0..values.len())
        .filter(|&i| values[i] <= min + tie)
        .collect();
    let best = *near.last().expect("grid is non-empty");
    let separated = near.windows(2).any(|w| w[1] > w[0] + 1);
    let note = separated.then(|| {
        format!(
            "{} grid points within {tie:e} of the minimum in separated cells; the largest was taken",
            near.len()
        )
    });

    let lo = best.saturating_sub(1) as f64 * step;
    let hi = ((best + 1).min(GRID_POINTS)) as f64 * step;
    let mut refinement = format!("golden-section on [{lo}, {hi}] to {REFINE_TOL:e}");
    let mut candidate = golden_section(hp, lo, hi, REFINE_TOL);
    // polish on the sign change of h″ when the minimum is interior
    let h2 = |x: f64| (sf.derivative_unchecked(x, 2), sf.derivative_unchecked(x, 3));
    if h2(lo).0 < 0.0 && h2(hi).0 > 0.0 {
        if let Ok(root) = find_root("h″ = 0", h2, lo, hi) {
            candidate = root;
            refinement.push_str(", polished by root of h″");
        }
    }
    // endpoints of the bracket compete with the interior candidate
    let mut b_star = candidate;
    for x in [lo, hi] {
        if hp(x) < hp(b_star) || (hp(x) == hp(b_star) && x > b_star) {
            b_star = x;
        }
    }
    if b_star < REFINE_TOL && sf.derivative_unchecked(0.0, 2) >= 0.0 {
        b_star = 0.0;
    }
    OptimalBarrier {
        b_star,
        hprime_min: hp(b_star),
        search: SearchGrid {
            x_max,
            n_points: GRID_POINTS + 1,
            refinement,
            note,
        },
    }
}

/// `V_b` for a fixed barrier `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct BarrierValueFunction {
    sf: ScaleFunction,
    b: f64,
    h_at_b: f64,
    hprime_at_b: f64,
}

impl BarrierValueFunction {
    pub fn new(sf: ScaleFunction, b: f64) -> Result<Self> {
        if !b.is_finite() || b < 0.0 {
            return Err(Error::InvalidInput(format!(
                "barrier must be finite and non-negative, got {b}"
            )));
        }
        let h_at_b = sf.derivative_unchecked(b, 0);
        let hprime_at_b = sf.derivative_unchecked(b, 1);
        if !(hprime_at_b > 0.0) {
            return Err(Error::Invariant(format!("h′({b}) = {hprime_at_b} is not positive")));
        }
        Ok(Self {
            sf,
            b,
            h_at_b,
            hprime_at_b,
        })
    }

    /// Value function at the optimal barrier.
    pub fn optimal(sf: ScaleFunction) -> Result<(OptimalBarrier, Self)> {
        let opt = find_bstar(&sf);
        let vbf = Self::new(sf, opt.b_star)?;
        Ok((opt, vbf))
    }

    pub fn barrier(&self) -> f64 {
        self.b
    }

    pub fn scale(&self) -> &ScaleFunction {
        &self.sf
    }

    pub fn h_at_b(&self) -> f64 {
        self.h_at_b
    }

    pub fn hprime_at_b(&self) -> f64 {
        self.hprime_at_b
    }

    pub fn value_at(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else if x <= self.b {
            self.sf.derivative_unchecked(x, 0) / self.hprime_at_b
        } else {
            x - self.b + self.h_at_b / self.hprime_at_b
        }
    }

    /// `V_b′`; right derivative at 0, left derivative at `b` (both branches
    /// give 1 there).
    pub fn value_gradient(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else if x <= self.b {
            self.sf.derivative_unchecked(x, 1) / self.hprime_at_b
        } else {
            1.0
        }
    }

    /// `V_b″` away from the kink at `b`.
    pub fn value_second(&self, x: f64) -> f64 {
        if x < 0.0 || x > self.b {
            0.0
        } else {
            self.sf.derivative_unchecked(x, 2) / self.hprime_at_b
        }
    }

    pub fn table(&self, xs: &[f64]) -> Vec<[f64; 3]> {
        xs.iter()
            .map(|&x| [x, self.value_at(x), self.value_gradient(x)])
            .collect()
    }

    pub fn summary(&self) -> ValueSummary {
        ValueSummary {
            b_star: self.b,
            value_at_b_star: self.value_at(self.b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValueSummary {
    pub b_star: f64,
    pub value_at_b_star: f64,
}
