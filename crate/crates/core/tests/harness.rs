use std::time::{Duration, Instant};

use paretoprobe::classifiers::{make_subject, Executor, SubjectId, ThreadSafety};
use paretoprobe::harness::{estimate_time, run_experiment, ExperimentPlan};
use paretoprobe::strategies::Strategy;

const SECONDS_PER_CALL: f64 = 50e-6;

/// Subject that busy-waits before answering, so classification dominates
/// the wall time.
fn slow_subject(name: &str) -> Executor {
    let inner = make_subject(name, &[]).unwrap();
    let schema = inner.schema().clone();
    Executor::from_fn(name, schema, ThreadSafety::Serial, move |p| {
        let until = Instant::now() + Duration::from_secs_f64(SECONDS_PER_CALL);
        while Instant::now() < until {
            std::hint::spin_loop();
        }
        inner.classify(p)
    })
}

#[test]
fn time_estimate_is_within_a_factor_of_two() {
    for id in SubjectId::ALL {
        let e = slow_subject(id.as_str());
        let mut plan = ExperimentPlan::new(id.as_str(), Strategy::RandomTarget, 100);
        plan.repetitions = 1;
        let report = run_experiment(&plan, &e).unwrap();
        let agg = &report.aggregates[0];
        let estimate = estimate_time(agg, SECONDS_PER_CALL).unwrap();
        let measured = agg.mean_wall.as_secs_f64();
        let ratio = measured / estimate;
        assert!((0.5..=2.0).contains(&ratio), "{}: estimate {estimate:.3}s, measured {measured:.3}s", id.as_str());
    }
}

#[test]
fn repeated_plans_give_identical_reports() {
    let e = make_subject("circle2", &[]).unwrap();
    let mut plan = ExperimentPlan::new("circle2", Strategy::RandomTarget, 300);
    plan.repetitions = 3;
    let strip = |mut r: paretoprobe::harness::ExplorationReport| {
        for row in &mut r.rows {
            row.wall = Duration::ZERO;
        }
        for a in &mut r.aggregates {
            a.mean_wall = Duration::ZERO;
        }
        r
    };
    assert_eq!(strip(run_experiment(&plan, &e).unwrap()), strip(run_experiment(&plan, &e).unwrap()));
}
