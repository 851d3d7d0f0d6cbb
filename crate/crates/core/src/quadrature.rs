//! Globally adaptive 21-point Gauss–Kronrod quadrature.

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9]
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 1e-14,
            max_intervals: 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod_21<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment {
        lo,
        hi,
        value,
        error,
    }
}

/// Integrates `f` over the finite interval `[lo, hi]`, bisecting the
/// segment with the largest error estimate until the total estimate meets
/// `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let mut segments = vec![gauss_kronrod_21(&f, lo, hi)];
    let mut evaluations = 21;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        let target = opts.abs_tol.max(opts.rel_tol * value.abs());
        if error <= target {
            return Ok(Integral {
                value,
                error,
                evaluations,
            });
        }
        if segments.len() >= opts.max_intervals {
            return Err(Error::Quadrature {
                lo,
                hi,
                achieved: error,
                requested: target,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.error.total_cmp(&b.1.error))
            .expect("non-empty");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            // cannot split further in floating point
            return Err(Error::Quadrature {
                lo,
                hi,
                achieved: error,
                requested: target,
            });
        }
        segments.push(gauss_kronrod_21(&f, seg.lo, mid));
        segments.push(gauss_kronrod_21(&f, mid, seg.hi));
        evaluations += 42;
    }
}

/// Integrates over `[lo, ∞)` through the map `y = lo + t/(1 − t)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    let mapped = |t: f64| {
        let s = 1.0 - t;
        let y = lo + t / s;
        let v = f(y);
        if v == 0.0 {
            0.0
        } else {
            v / (s * s)
        }
    };
    integrate(mapped, 0.0, 1.0, opts)
}

/// Integrates a piecewise-smooth function over `[lo, ∞)`, splitting at
/// each breakpoint inside the range and switching to the mapped tail rule
/// beyond `tail_start`.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    breakpoints: &[f64],
    tail_start: f64,
    opts: &QuadratureOptions,
) -> Result<Integral> {
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&b| b > lo && b.is_finite())
        .collect();
    let tail = tail_start.max(lo).max(cuts.iter().copied().fold(lo, f64::max));
    cuts.push(tail);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = Integral {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
    };
    let mut left = lo;
    for &c in &cuts {
        let piece = integrate(&f, left, c, opts)?;
        total.value += piece.value;
        total.error += piece.error;
        total.evaluations += piece.evaluations;
        left = c;
    }
    let piece = integrate_to_infinity(&f, tail, opts)?;
    total.value += piece.value;
    total.error += piece.error;
    total.evaluations += piece.evaluations;
    Ok(total)
}
