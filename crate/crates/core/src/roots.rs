//! Bracketed root finding for increasing scalar functions.

use crate::error::{Error, Result};

/// Why a bracket search stopped without enclosing the target level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BracketFailure {
    /// The function already exceeds the level at the lower floor.
    AboveAtFloor,
    /// The function stays below the level up to the upper cap.
    BelowAtCap,
}

/// Finds `[lo, hi]` with `f(lo) < level <= f(hi)` for an increasing `f` on
/// `(floor, cap]`, expanding geometrically by a factor 2 from `start`.
pub fn bracket_increasing<F>(
    f: &mut F,
    level: f64,
    start: f64,
    floor: f64,
    cap: f64,
) -> std::result::Result<(f64, f64), BracketFailure>
where
    F: FnMut(f64) -> f64,
{
    let mut x = start.clamp(floor, cap);
    if f(x) < level {
        loop {
            let next = x * 2.0;
            if next > cap {
                return Err(BracketFailure::BelowAtCap);
            }
            if f(next) >= level {
                return Ok((x, next));
            }
            x = next;
        }
    } else {
        loop {
            let next = x * 0.5;
            if next < floor {
                return Err(BracketFailure::AboveAtFloor);
            }
            if f(next) < level {
                return Ok((next, x));
            }
            x = next;
        }
    }
}

/// Solves `f(x) = level` on a bracket `f(lo) < level <= f(hi)`, `0 < lo < hi`.
///
/// Bisection runs in the geometric mean while the bracket spans more than a
/// factor 4 and in the arithmetic mean afterwards, down to a few ulps. Every
/// midpoint value must lie between the current endpoint values; otherwise
/// the function is not increasing and the solve aborts. A final secant step
/// inside the bracket polishes the result.
pub fn solve_increasing<F>(f: &mut F, level: f64, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if !(flo < level && fhi >= level) {
        return Err(Error::Invalid(format!(
            "not a bracket: f({lo}) = {flo}, f({hi}) = {fhi}, level {level}"
        )));
    }
    for _ in 0..400 {
        if fhi == level {
            return Ok(hi);
        }
        let mid = if lo > 0.0 && hi > 4.0 * lo { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        let slack = 1e-13 * (flo.abs() + fhi.abs());
        if !(fm >= flo - slack && fm <= fhi + slack) || fm.is_nan() {
            return Err(Error::MonotonicityViolated { x: mid });
        }
        if fm < level {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    // secant polish inside the final bracket
    let mut best = if (fhi - level).abs() <= (level - flo).abs() { hi } else { lo };
    if fhi > flo {
        let x = lo + (level - flo) * (hi - lo) / (fhi - flo);
        if x > lo && x < hi && (f(x) - level).abs() < (f(best) - level).abs() {
            best = x;
        }
    }
    Ok(best)
}
