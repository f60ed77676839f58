//! Principal branch of the Lambert W function.

use crate::error::{Error, Result};

/// `W(x)` for `x ≥ 0`: the unique `w ≥ 0` with `w·e^w = x`.
pub fn lambert_w(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "lambert_w needs x >= 0 on the principal branch, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(f64::INFINITY);
    }
    if x > 1e300 {
        // w·e^w overflows during Halley steps; the log form is exact here.
        return Ok(w_of_exp_log_form(x.ln()));
    }
    let mut w = if x < 1.0 {
        x / (1.0 + x)
    } else {
        let l = x.ln();
        if l > 1.0 {
            l - l.ln()
        } else {
            l.max(0.5)
        }
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 1e-16 * w.abs().max(1e-300) {
            break;
        }
    }
    Ok(w)
}

/// `W(e^l)` for any real `l`, without forming `e^l`.
///
/// Bound formulas evaluate `W(e^C Δ²)` with `C` of the order of `T Δ²`, far
/// past the range where `e^C` is representable.
pub fn lambert_w_of_exp(l: f64) -> f64 {
    if l.is_nan() {
        return f64::NAN;
    }
    if l == f64::INFINITY {
        return f64::INFINITY;
    }
    if l < 1.0 {
        // e^l < e, so the direct form is accurate and cannot overflow.
        return lambert_w(l.exp()).unwrap_or(0.0);
    }
    w_of_exp_log_form(l)
}

/// Newton on `g(w) = w + ln w − l`, which is concave and increasing, so the
/// iteration from the right converges monotonically.
fn w_of_exp_log_form(l: f64) -> f64 {
    let mut w = if l > 3.0 {
        l - l.ln() + 0.5
    } else {
        l.max(1.0)
    };
    for _ in 0..100 {
        let g = w + w.ln() - l;
        let step = g / (1.0 + 1.0 / w);
        w -= step;
        if step.abs() <= 1e-16 * w {
            break;
        }
    }
    w
}
