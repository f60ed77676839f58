//! Summary statistics over Monte Carlo replications.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation over `√R`; zero for a single replication.
    pub stderr: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self {
            mean: mean(values),
            stderr: standard_error(values),
            q25: quantile_sorted(&sorted, 0.25),
            q50: quantile_sorted(&sorted, 0.5),
            q75: quantile_sorted(&sorted, 0.75),
        }
    }
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn standard_error(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let var = values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}

/// Linear-interpolation quantile (the common "type 7" rule) of sorted data.
/// Interpolating between a finite value and `+∞` yields `+∞` only when the
/// upper neighbor actually carries weight.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        n => {
            let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            let frac = h - lo as f64;
            if frac == 0.0 || sorted[lo] == sorted[hi] {
                sorted[lo]
            } else {
                sorted[lo] + frac * (sorted[hi] - sorted[lo])
            }
        }
    }
}

/// Per-run loss ratio: `0/0 = 1`, `x/0 = +∞`.
pub fn loss_ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        if numerator == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        numerator / denominator
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_of_small_samples() {
        let s = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&s, 0.5), 2.5);
        assert_eq!(quantile_sorted(&s, 0.25), 1.75);
        assert_eq!(quantile_sorted(&s, 0.75), 3.25);
        assert_eq!(quantile_sorted(&[5.0], 0.3), 5.0);
        assert!(quantile_sorted(&[], 0.3).is_nan());
    }

    #[test]
    fn infinite_entries() {
        let s = [0.5, 1.0, f64::INFINITY];
        assert_eq!(quantile_sorted(&s, 0.5), 1.0);
        assert_eq!(quantile_sorted(&s, 0.75), f64::INFINITY);
        let both = [f64::INFINITY, f64::INFINITY];
        assert_eq!(quantile_sorted(&both, 0.5), f64::INFINITY);
    }

    #[test]
    fn summary_is_ordered() {
        let v = [3.0, 1.0, 2.0, 10.0, 0.0];
        let s = Summary::of(&v);
        assert!(s.q25 <= s.q50 && s.q50 <= s.q75);
        assert_eq!(s.mean, 3.2);
        assert_eq!(Summary::of(&[2.0]).stderr, 0.0);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(loss_ratio(0.0, 0.0), 1.0);
        assert_eq!(loss_ratio(2.0, 0.0), f64::INFINITY);
        assert_eq!(loss_ratio(1.0, 4.0), 0.25);
    }
}
