//! Bracketed scalar root finding: bisection safeguarding Newton steps.

use crate::error::{Error, Result};

/// Finds a root of `f` in `[lo, hi]`, where `f` returns `(value, derivative)`
/// and changes sign across the bracket. A Newton step is taken whenever it
/// stays inside the current bracket and shrinks it fast enough, otherwise
/// the bracket is bisected. Terminates at full floating-point resolution.
pub fn find_root<F>(what: &str, f: F, lo: f64, hi: f64) -> Result<f64>
where
    F: Fn(f64) -> (f64, f64),
{
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Bracket {
            what: what.to_string(),
            lo,
            hi,
        });
    }
    // orient so that f(neg) < 0 < f(pos)
    let (mut neg, mut pos) = if flo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = 0.5 * (lo + hi);
    let mut step_before_last = (hi - lo).abs();
    let mut last_step = step_before_last;
    for _ in 0..400 {
        let (fx, dfx) = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        let (a, b) = if neg < pos { (neg, pos) } else { (pos, neg) };
        let newton = x - fx / dfx;
        let next = if dfx.is_finite()
            && dfx != 0.0
            && newton > a
            && newton < b
            && (newton - x).abs() < 0.5 * step_before_last
        {
            newton
        } else {
            0.5 * (a + b)
        };
        step_before_last = last_step;
        last_step = (next - x).abs();
        if next == x || next <= a || next >= b {
            // bracket exhausted at floating-point resolution
            let (fa, _) = f(a);
            let (fb, _) = f(b);
            return Ok(if fa.abs() <= fb.abs() { a } else { b });
        }
        x = next;
    }
    Ok(x)
}
