//! Optimal dividend barriers for two-sided Lévy risk processes.
//!
//! The surplus is a Lévy process with drift, an optional Brownian part and
//! mixed-exponential compound-Poisson jumps in both directions. The crate
//! computes the generalized scale function `h` in closed form, locates the
//! optimal dividend barrier `b*`, evaluates barrier value functions, checks
//! the HJB verification conditions by quadrature and estimates dividend
//! values by Monte Carlo.
//!
//! ```
//! use levy_barrier::{ModelSpec, ScaleFunction, BarrierValueFunction};
//!
//! let model = ModelSpec::cramer_lundberg(1.5, 0.0, 1.0, 2.0, 0.1).unwrap();
//! let sf = ScaleFunction::new(&model).unwrap();
//! let (opt, value) = BarrierValueFunction::optimal(sf).unwrap();
//! assert!(opt.b_star > 0.0);
//! assert!(value.value_at(opt.b_star + 1.0) > value.value_at(opt.b_star));
//! ```

pub mod diagnostics;
pub mod error;
pub mod generator;
pub mod model;
pub mod quadrature;
pub mod roots;
pub mod scale;
pub mod simulate;
pub mod value;

pub use diagnostics::{CheckResult, DiagnosticsReport};
pub use error::{Error, Result};
pub use generator::{GeneratorQuadrature, GeneratorTarget, Shape};
pub use model::{JumpSide, LundbergReport, MixedExponential, ModelFile, ModelSpec};
pub use scale::{root_rho, solve_expansion, ScaleFunction, TiltedRuinExpansion};
pub use simulate::{SimulationConfig, SimulationEstimate, Strategy};
pub use value::{find_bstar, BarrierValueFunction, OptimalBarrier};

/// `n` equally spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|i| start + (end - start) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}
