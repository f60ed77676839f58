//! Index functions `F(n, x; a)` and their level-crossing times.
//!
//! A policy pulls the arm minimizing `F(N_k, N_k Δ̂_k²; a_k)`. Every function
//! here is non-decreasing in both `n` and `x` and diverges along rays
//! `x = n·y`, which is what the generic loss bound needs.
//!
//! The crossing time `t(C)` of an arm with gap `Δ` is the real `t` solving
//! `F(t, tΔ²; a) = C`, i.e. the number of pulls after which the index reaches
//! `C` when the empirical gap equals the true gap. The floor time `t₀(C)` is
//! the pull count after which the index is at least `C` whatever the
//! observations; it is infinite when no such count exists.

use std::fmt;

use crate::error::{Error, Result};
use crate::lambert::lambert_w_of_exp;

const THREE_HALVES: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndexFunction {
    /// `F = x`.
    Apt,
    /// `F = α·x + ln n`.
    Lsa { alpha: f64 },
    /// `F = x′ − ln x′ + ln(n/a)` with `x′ = max(x, 1)`.
    Fwt,
    /// `F = x′ − 1.5 ln x′ + 1.5 ln n` with `x′ = max(x, 1.5)`.
    FwtGaps,
    /// `F = (1+√x)² − ln((1+√x)²) + ln n`.
    FwtExperimental,
}

impl IndexFunction {
    pub const NAMES: [&'static str; 5] = ["apt", "lsa", "fwt", "fwt_gaps", "fwt_exp"];

    pub fn lsa(alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lsa alpha must be positive and finite, got {alpha}"
            )));
        }
        Ok(IndexFunction::Lsa { alpha })
    }

    /// Looks up a policy by name; LSA gets `α = 1`.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "apt" => Ok(IndexFunction::Apt),
            "lsa" => Ok(IndexFunction::Lsa { alpha: 1.0 }),
            "fwt" => Ok(IndexFunction::Fwt),
            "fwt_gaps" => Ok(IndexFunction::FwtGaps),
            "fwt_exp" => Ok(IndexFunction::FwtExperimental),
            other => Err(Error::UnknownPolicy(other.to_string())),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            IndexFunction::Apt => "apt",
            IndexFunction::Lsa { .. } => "lsa",
            IndexFunction::Fwt => "fwt",
            IndexFunction::FwtGaps => "fwt_gaps",
            IndexFunction::FwtExperimental => "fwt_exp",
        }
    }

    /// `F(n, x; a)`. Every function except APT takes `ln n` and rejects `n = 0`.
    pub fn value(&self, n: u64, x: f64, a: f64) -> Result<f64> {
        if n == 0 && !matches!(self, IndexFunction::Apt) {
            return Err(Error::ZeroPulls { name: self.name() });
        }
        Ok(self.eval(n as f64, x, a))
    }

    /// Unchecked evaluation at a real pull count.
    pub fn eval(&self, n: f64, x: f64, a: f64) -> f64 {
        match *self {
            IndexFunction::Apt => x,
            IndexFunction::Lsa { alpha } => alpha * x + n.ln(),
            IndexFunction::Fwt => {
                let xp = x.max(1.0);
                xp - xp.ln() + (n / a).ln()
            }
            IndexFunction::FwtGaps => {
                let xp = x.max(THREE_HALVES);
                xp - THREE_HALVES * xp.ln() + THREE_HALVES * n.ln()
            }
            IndexFunction::FwtExperimental => {
                let y = (1.0 + x.sqrt()).powi(2);
                y - y.ln() + n.ln()
            }
        }
    }

    /// Real `t ≥ 0` with `F(t, tΔ²; a) = c`, in closed form where one exists.
    pub fn crossing_time(&self, c: f64, gap: f64, a: f64) -> f64 {
        let g2 = gap * gap;
        match *self {
            IndexFunction::Apt => c.max(0.0) / g2,
            IndexFunction::Lsa { alpha } => {
                // u = αΔ²t solves u + ln u = c + ln(αΔ²).
                let ag = alpha * g2;
                lambert_w_of_exp(c + ag.ln()) / ag
            }
            IndexFunction::Fwt => {
                let lb = (a * g2).ln();
                if c + lb >= 1.0 {
                    (c + lb) / g2
                } else {
                    a * (c - 1.0).exp()
                }
            }
            IndexFunction::FwtGaps => {
                let shifted = c + THREE_HALVES * g2.ln();
                if shifted >= THREE_HALVES {
                    shifted / g2
                } else {
                    THREE_HALVES * (c / THREE_HALVES - 1.0).exp()
                }
            }
            IndexFunction::FwtExperimental => self.crossing_time_numeric(c, gap, a),
        }
    }

    /// Crossing time by bisection on `t`, for any index function.
    ///
    /// Used for the experimental index and to cross-check the closed forms.
    pub fn crossing_time_numeric(&self, c: f64, gap: f64, a: f64) -> f64 {
        let g2 = gap * gap;
        let f = |t: f64| self.eval(t, t * g2, a);
        if f(f64::MIN_POSITIVE) >= c {
            return 0.0;
        }
        let mut hi = 1.0;
        while f(hi) < c {
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid) >= c {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// Pull count after which `F ≥ c` whatever the observed gap, or `None`.
    pub fn floor_time(&self, c: f64, a: f64) -> Option<f64> {
        match *self {
            IndexFunction::Apt => (c <= 0.0).then_some(0.0),
            IndexFunction::Lsa { .. } => Some(c.exp()),
            IndexFunction::Fwt => Some(a * (c - 1.0).exp()),
            IndexFunction::FwtGaps => Some(THREE_HALVES * (c / THREE_HALVES - 1.0).exp()),
            IndexFunction::FwtExperimental => Some((c - 1.0).exp()),
        }
    }
}

impl fmt::Display for IndexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexFunction::Lsa { alpha } if *alpha != 1.0 => write!(f, "lsa(alpha={alpha})"),
            other => f.write_str(other.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{E, LN_2};

    const ALL: [IndexFunction; 6] = [
        IndexFunction::Apt,
        IndexFunction::Lsa { alpha: 1.0 },
        IndexFunction::Lsa { alpha: 0.1 },
        IndexFunction::Fwt,
        IndexFunction::FwtGaps,
        IndexFunction::FwtExperimental,
    ];

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1.0)
    }

    #[test]
    fn apt_values() {
        assert_eq!(IndexFunction::Apt.value(5, 2.3, 1.0).unwrap(), 2.3);
        assert_eq!(IndexFunction::Apt.value(0, 0.0, 7.0).unwrap(), 0.0);
    }

    #[test]
    fn lsa_values() {
        let lsa = IndexFunction::from_name("lsa").unwrap();
        assert_eq!(lsa.value(1, 0.0, 1.0).unwrap(), 0.0);
        assert!(close(lsa.value(3, 0.0, 1.0).unwrap(), 3f64.ln()));
        let small = IndexFunction::lsa(0.1).unwrap();
        assert!(close(small.value(2, 1.5, 1.0).unwrap(), 0.15 + LN_2));
        assert!(matches!(
            lsa.value(0, 1.0, 1.0),
            Err(Error::ZeroPulls { .. })
        ));
        assert!(IndexFunction::lsa(0.0).is_err());
    }

    #[test]
    fn fwt_values() {
        let f = IndexFunction::Fwt;
        assert!(close(f.value(1, 0.5, 1.0).unwrap(), 1.0));
        assert!(close(f.value(2, E, 1.0).unwrap(), E - 1.0 + LN_2));
        assert!(close(f.value(4, 1.0, 2.0).unwrap(), 1.0 + LN_2));
        assert!(f.value(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn fwt_gaps_values() {
        let f = IndexFunction::FwtGaps;
        assert!(close(
            f.value(1, 0.0, 1.0).unwrap(),
            1.5 - 1.5 * 1.5f64.ln()
        ));
        assert!(close(
            f.value(2, 3.0, 1.0).unwrap(),
            3.0 - 1.5 * 3f64.ln() + 1.5 * LN_2
        ));
        assert!(f.value(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn fwt_experimental_values() {
        let f = IndexFunction::FwtExperimental;
        assert!(close(f.value(1, 0.0, 1.0).unwrap(), 1.0));
        assert!(close(f.value(1, 1.0, 1.0).unwrap(), 4.0 - 4f64.ln()));
        assert!(close(
            f.value(3, 4.0, 1.0).unwrap(),
            9.0 - 9f64.ln() + 3f64.ln()
        ));
        assert!(f.value(0, 1.0, 1.0).is_err());
    }

    #[test]
    fn names_round_trip() {
        for name in IndexFunction::NAMES {
            assert_eq!(IndexFunction::from_name(name).unwrap().name(), name);
        }
        assert!(matches!(
            IndexFunction::from_name("ucb"),
            Err(Error::UnknownPolicy(_))
        ));
    }

    #[test]
    fn monotone_on_grid() {
        let ns = [1u64, 2, 3, 5, 10, 100, 1000, 100_000];
        let xs = [0.0, 0.1, 0.5, 1.0, 1.4, 1.5, 2.0, 10.0, 1e3];
        for f in ALL {
            for &a in &[0.5, 1.0, 3.0] {
                for w in ns.windows(2) {
                    for &x in &xs {
                        let lo = f.value(w[0], x, a).unwrap();
                        let hi = f.value(w[1], x, a).unwrap();
                        assert!(lo <= hi, "{f} not monotone in n at x={x}");
                    }
                }
                for &n in &ns {
                    for w in xs.windows(2) {
                        let lo = f.value(n, w[0], a).unwrap();
                        let hi = f.value(n, w[1], a).unwrap();
                        assert!(lo <= hi, "{f} not monotone in x at n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn diverges_along_rays() {
        for f in ALL {
            for &y in &[1e-4, 1e-2, 0.3, 1.0, 5.0] {
                let mut n = 1u64;
                let mut reached = false;
                while n <= 1u64 << 40 {
                    if f.value(n, n as f64 * y, 1.0).unwrap() > 1e3 {
                        reached = true;
                        break;
                    }
                    n *= 2;
                }
                assert!(reached, "{f} does not reach 1e3 along y={y}");
            }
        }
    }

    #[test]
    fn floor_times_bound_the_index() {
        for f in ALL.into_iter().filter(|f| *f != IndexFunction::Apt) {
            for &c in &[0.5, 1.0, 2.0, 4.0, 8.0] {
                for &a in &[0.5, 1.0, 2.0] {
                    let t0 = f.floor_time(c, a).unwrap();
                    let n = t0.ceil().max(1.0);
                    // Whatever the observed information, F(n, ·) >= c past t0.
                    assert!(f.eval(n, 0.0, a) >= c - 1e-12, "{f} c={c}");
                }
            }
        }
        assert_eq!(IndexFunction::Apt.floor_time(1.0, 1.0), None);
    }

    proptest! {
        #[test]
        fn crossing_times_solve_the_level_equation(
            c in 0.0f64..40.0,
            gap in 0.01f64..3.0,
            a in 0.2f64..5.0,
        ) {
            for f in ALL {
                let t = f.crossing_time(c, gap, a);
                let value = f.eval(t, t * gap * gap, a);
                prop_assert!((value - c).abs() <= 1e-9 * c.max(1.0), "{} at c={}: F={}", f, c, value);
                let numeric = f.crossing_time_numeric(c, gap, a);
                prop_assert!((t - numeric).abs() <= 1e-9 * t.max(1e-9), "{}: {} vs {}", f, t, numeric);
            }
        }
    }
}
