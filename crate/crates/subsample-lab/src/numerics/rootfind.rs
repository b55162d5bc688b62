//! Scalar root finding and concave maximization.

use crate::error::{Error, Result};

/// Solve `f(c) = target` for a function monotone on the bracket. If
/// `[lo, hi]` does not bracket the target it is expanded geometrically
/// (up to 60 doublings) before bisecting. The result never leaves the
/// final bracket.
pub fn bisect_monotone(
    mut f: impl FnMut(f64) -> f64,
    target: f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut flo = f(lo) - target;
    let mut fhi = f(hi) - target;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let mut expansions = 0usize;
    while flo * fhi > 0.0 {
        if expansions >= 60 {
            return Err(Error::BracketFailure {
                context: format!("target {target} not bracketed on [{lo}, {hi}]"),
                expansions,
            });
        }
        // Expand toward the target: for an increasing f with both ends
        // below the target the bracket grows upward, and symmetrically
        // for the other three sign/monotonicity combinations.
        let span = (hi - lo).max(f64::MIN_POSITIVE);
        let increasing = fhi >= flo;
        let below = flo < 0.0;
        if increasing == below {
            hi += span;
            fhi = f(hi) - target;
        } else {
            lo -= span;
            flo = f(lo) - target;
        }
        expansions += 1;
    }
    // Bisect; 200 halvings are enough for any double-precision bracket.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid) - target;
        if fmid.abs() <= tol || 0.5 * (hi - lo) < f64::EPSILON * mid.abs() {
            return Ok(mid);
        }
        if flo * fmid <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section maximization of a concave function on `[lo, hi]`. The
/// upper end auto-expands (doubling) while the function keeps increasing
/// there, so `hi` only needs to be an initial guess.
pub fn maximize_concave_scalar(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
) -> (f64, f64) {
    assert!(hi > lo);
    let mut a = lo;
    let mut b = hi;
    // Expand while the function is still rising at the right end.
    let mut fb = f(b);
    for _ in 0..60 {
        let probe = b - 1e-3 * (b - a).max(1e-6);
        if f(probe) > fb {
            break;
        }
        let nb = a + 2.0 * (b - a);
        let fnb = f(nb);
        if fnb <= fb {
            b = nb;
            fb = fnb;
            break;
        }
        b = nb;
        fb = fnb;
    }
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INVPHI * (b - a);
    let mut x2 = a + INVPHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INVPHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INVPHI * (b - a);
            f1 = f(x1);
        }
    }
    let xm = 0.5 * (a + b);
    (xm, f(xm))
}
