use proptest::prelude::*;

use tbandit::bounds::{
    apt_bound, fwt_large_t_bound, lower_bound, lsa_bound, lsa_exact_bound, oracle_bound_value,
    BoundFamily,
};
use tbandit::config::log_spaced;
use tbandit::optimize::evaluate_family;
use tbandit::ProblemInstance;

fn symmetric(k: usize, gap: f64) -> ProblemInstance {
    ProblemInstance::from_gaps(vec![gap; k], vec![1.0; k]).unwrap()
}

fn figure_two() -> ProblemInstance {
    let gaps = (1..=50).map(|i| (i as f64 / 50.0).powi(2)).collect();
    ProblemInstance::from_gaps(gaps, vec![1.0; 50]).unwrap()
}

#[test]
fn exponent_matches_the_complexity_rate() {
    for (k, gap) in [(2, 1.0), (10, 0.5), (25, 0.2)] {
        let inst = symmetric(k, gap);
        let h = k as f64 / (gap * gap);
        let t = 1e3 * h;
        let target = 1.0 / (4.0 * h);
        for (name, bound) in [
            ("apt", apt_bound(&inst, t).unwrap()),
            ("fwt_large_T", fwt_large_t_bound(&inst, t)),
        ] {
            let rate = -bound.log_value / t;
            assert!(
                (rate - target).abs() <= 0.1 * target,
                "{name} K={k}: {rate} vs {target}"
            );
        }
    }
}

#[test]
fn families_are_non_increasing_past_validity() {
    let inst = figure_two();
    let grid = log_spaced(100_000, 100_000_000_000, 80);
    for family in [
        BoundFamily::AptCor1,
        BoundFamily::FwtCor2,
        BoundFamily::FwtLargeT,
        BoundFamily::SumOfGapsCor3,
        BoundFamily::Oracle,
        BoundFamily::Lower,
    ] {
        let mut last = f64::INFINITY;
        let mut started = false;
        for &t in &grid {
            let e = evaluate_family(family, &inst, t as f64).unwrap();
            started |= e.value.valid && !e.value.is_vacuous(inst.total_cost());
            if !started {
                continue;
            }
            assert!(
                e.value.log_value <= last + 1e-9 * last.abs().max(1.0),
                "{family} rises at T={t}"
            );
            last = e.value.log_value;
        }
        assert!(started, "{family} never becomes informative");
    }
}

#[test]
fn optimized_lsa_is_non_increasing() {
    let inst = symmetric(5, 0.8);
    let mut last = f64::INFINITY;
    for t in log_spaced(1_000, 10_000_000, 40) {
        let e = evaluate_family(BoundFamily::LsaEq11, &inst, t as f64).unwrap();
        assert!(
            e.value.log_value <= last + 1e-9 * last.abs().max(1.0),
            "T={t}"
        );
        last = e.value.log_value;
    }
}

#[test]
fn fwt_becomes_informative_before_apt_on_figure_two() {
    let inst = figure_two();
    let half = 25f64.ln();
    let first_below = |family| {
        log_spaced(100, 10_000_000_000, 300)
            .into_iter()
            .find(|&t| {
                evaluate_family(family, &inst, t as f64)
                    .unwrap()
                    .value
                    .log_value
                    < half
            })
            .unwrap()
    };
    assert!(first_below(BoundFamily::FwtCor2) < first_below(BoundFamily::AptCor1));
}

fn gaps() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.1f64..2.0, 1..8)
}

proptest! {
    #[test]
    fn sandwich_form_dominates_exact_lsa(gaps in gaps(), t in 10.0f64..1e6, c in 1.0f64..20.0) {
        let inst = ProblemInstance::from_gaps(gaps.clone(), vec![1.0; gaps.len()]).unwrap();
        let shift = gaps.iter().map(|g| 1.0 - (g * g).ln()).fold(0.0, f64::max);
        let levels = vec![c + shift; gaps.len()];
        let loose = lsa_bound(&inst, t, &levels).unwrap();
        let exact = lsa_exact_bound(&inst, t, &levels).unwrap();
        prop_assert!(exact.log_value <= loose.log_value + 1e-9 * loose.log_value.abs().max(1.0));
    }

    #[test]
    fn lower_bound_below_oracle(gaps in gaps(), t in 1.0f64..1e7) {
        let inst = ProblemInstance::from_gaps(gaps.clone(), vec![1.0; gaps.len()]).unwrap();
        let lower = lower_bound(&inst, t).unwrap();
        let oracle = oracle_bound_value(&inst, t).unwrap();
        prop_assert!(lower.log_value <= oracle.log_value);
    }
}
