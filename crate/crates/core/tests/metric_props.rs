#[path = "support/metric_laws.rs"]
mod metric_laws;

use metric_laws::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn classify_is_the_naive_count(s in scenario()) {
        classify_matches_naive(&s)?;
    }

    #[test]
    fn scores_stay_in_bounds(s in scenario()) {
        bounds_and_not_applicable(&s)?;
    }

    #[test]
    fn baselines_hold(s in scenario()) {
        baselines(&s)?;
    }

    #[test]
    fn keeping_more_is_monotone(s in scenario()) {
        monotonicity(&s)?;
    }
}
