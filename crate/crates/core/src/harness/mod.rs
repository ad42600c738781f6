//! Repeated strategy runs, capability and cost metrics, CSV and SVG output.

mod report;
mod svg;

pub use report::export_csv;
pub use svg::{render_front_svg, write_front_svg};

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classifiers::Executor;
use crate::space::{random_pool, Point, SpaceError};
use crate::strategies::{explore, ParetoPair, Strategy, StrategyConfig, StrategyError, StrategyKind};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("invalid plan: {0}")]
    BadPlan(String),
    #[error("no Pareto pairs were found, so the cost is infinite")]
    NoFront,
    #[error("front rendering needs exactly two real features: {0}")]
    NotTwoDimensional(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentPlan {
    /// Name of the classifier under test, used in reports.
    pub target: String,
    pub strategy: Strategy,
    /// Walk counts to run; each gets `repetitions` repetitions.
    pub sweep: Vec<u64>,
    pub repetitions: u32,
    pub steps: u32,
    pub walk_distance: u32,
    pub pool_size: usize,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl ExperimentPlan {
    pub fn new(target: &str, strategy: Strategy, walks: u64) -> Self {
        ExperimentPlan {
            target: target.to_string(),
            strategy,
            sweep: vec![walks],
            repetitions: 10,
            steps: 20,
            walk_distance: 20,
            pool_size: 300,
            seed: 0,
            jobs: None,
        }
    }

    fn check(&self) -> Result<(), HarnessError> {
        if self.sweep.is_empty() || self.sweep.contains(&0) {
            return Err(HarnessError::BadPlan("walk counts must be at least 1".into()));
        }
        if self.repetitions == 0 {
            return Err(HarnessError::BadPlan("repetitions must be at least 1".into()));
        }
        if self.pool_size == 0 {
            return Err(HarnessError::BadPlan("pool size must be at least 1".into()));
        }
        Ok(())
    }

    /// Seed of repetition `rep`. Pools and walks of a repetition derive
    /// from it, so the same repetition sees the same pool at every W.
    pub fn repetition_seed(&self, rep: u32) -> u64 {
        self.seed ^ u64::from(rep + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
    }

    /// Seed pool of repetition `rep`.
    pub fn pool(&self, exec: &Executor, rep: u32) -> Result<Vec<Point>, SpaceError> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.repetition_seed(rep));
        // Separate stream from the walk generators seeded nearby.
        rng.set_stream(1);
        random_pool(exec.schema(), self.pool_size, &mut rng)
    }
}

/// One repetition at one walk count.
#[derive(Debug, Clone, PartialEq)]
pub struct RepetitionRow {
    pub walks: u64,
    pub repetition: u32,
    pub executions: u64,
    pub pairs: u64,
    pub wall: Duration,
    /// Set when the executor failed and the repetition was abandoned.
    pub error: Option<String>,
    pub pool: Vec<Point>,
    pub found: Vec<ParetoPair>,
}

impl RepetitionRow {
    pub fn capability(&self) -> f64 {
        self.pairs as f64 / self.walks as f64
    }

    pub fn cost(&self) -> f64 {
        cost(self.executions as f64, self.pairs as f64)
    }
}

/// Means over the successful repetitions at one walk count.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub walks: u64,
    pub repetitions: u32,
    pub mean_executions: f64,
    pub mean_pairs: f64,
    pub mean_wall: Duration,
    /// Pairs per walk.
    pub capability: f64,
    /// Executions per pair; infinite when no pair was found.
    pub cost: f64,
}

fn cost(executions: f64, pairs: f64) -> f64 {
    if pairs > 0.0 {
        executions / pairs
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplorationReport {
    pub target: String,
    pub strategy: StrategyKind,
    pub rows: Vec<RepetitionRow>,
    pub aggregates: Vec<Aggregate>,
}

impl ExplorationReport {
    pub fn aggregate(&self, walks: u64) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.walks == walks)
    }

    pub fn failed(&self) -> impl Iterator<Item = &RepetitionRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }
}

/// Runs every (walk count, repetition) of the plan against `exec`.
/// Repetitions run one after another; walks inside one may run in parallel.
pub fn run_experiment(plan: &ExperimentPlan, exec: &Executor) -> Result<ExplorationReport, HarnessError> {
    plan.check()?;
    let mut rows = Vec::new();
    let mut aggregates = Vec::new();
    for &walks in &plan.sweep {
        let first = rows.len();
        for rep in 0..plan.repetitions {
            let pool = plan.pool(exec, rep)?;
            let cfg = StrategyConfig {
                steps: plan.steps,
                walk_distance: plan.walk_distance,
                pool,
                seed: plan.repetition_seed(rep),
            };
            let before = exec.executions();
            let start = Instant::now();
            let result = explore(&plan.strategy, &cfg, walks, exec, plan.jobs);
            let wall = start.elapsed();
            let row = match result {
                Ok(x) => RepetitionRow {
                    walks,
                    repetition: rep,
                    executions: x.executions(),
                    pairs: x.pair_count(),
                    wall,
                    error: None,
                    pool: cfg.pool,
                    found: x.pairs().cloned().collect(),
                },
                Err(StrategyError::Exec(e)) => RepetitionRow {
                    walks,
                    repetition: rep,
                    executions: exec.executions() - before,
                    pairs: 0,
                    wall,
                    error: Some(e.to_string()),
                    pool: cfg.pool,
                    found: Vec::new(),
                },
                Err(e) => return Err(e.into()),
            };
            rows.push(row);
        }
        aggregates.push(aggregate(walks, &rows[first..]));
    }
    Ok(ExplorationReport {
        target: plan.target.clone(),
        strategy: plan.strategy.kind(),
        rows,
        aggregates,
    })
}

fn aggregate(walks: u64, rows: &[RepetitionRow]) -> Aggregate {
    let ok: Vec<_> = rows.iter().filter(|r| r.error.is_none()).collect();
    let n = ok.len().max(1) as f64;
    let executions: u64 = ok.iter().map(|r| r.executions).sum();
    let pairs: u64 = ok.iter().map(|r| r.pairs).sum();
    let wall: Duration = ok.iter().map(|r| r.wall).sum();
    let mean_pairs = pairs as f64 / n;
    Aggregate {
        walks,
        repetitions: ok.len() as u32,
        mean_executions: executions as f64 / n,
        mean_pairs,
        mean_wall: wall.div_f64(n),
        capability: mean_pairs / walks as f64,
        cost: cost(executions as f64, pairs as f64),
    }
}

/// Predicted wall time `W · C · E · s` for `s` seconds per classification.
pub fn estimate_time(agg: &Aggregate, seconds_per_call: f64) -> Result<f64, HarnessError> {
    if !agg.cost.is_finite() {
        return Err(HarnessError::NoFront);
    }
    Ok(agg.walks as f64 * agg.capability * agg.cost * seconds_per_call)
}

/// Least-squares line through `(xs, ys)`: `(slope, intercept, r²)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::{make_subject, ExecError, Label, ThreadSafety};
    use crate::morphisms::Traversal;

    fn agg(walks: u64, capability: f64, cost: f64) -> Aggregate {
        Aggregate {
            walks,
            repetitions: 1,
            mean_executions: 0.0,
            mean_pairs: 0.0,
            mean_wall: Duration::ZERO,
            capability,
            cost,
        }
    }

    #[test]
    fn time_estimate_is_a_product() {
        let t = estimate_time(&agg(1000, 0.5, 22.0), 1e-4).unwrap();
        assert!((t - 1.1).abs() < 1e-12);
        assert!(matches!(estimate_time(&agg(1000, 0.0, f64::INFINITY), 1e-4), Err(HarnessError::NoFront)));
    }

    #[test]
    fn identities_hold_per_row() {
        let e = make_subject("sin2", &[]).unwrap();
        let mut plan = ExperimentPlan::new("sin2", Strategy::RandomTarget, 100);
        plan.repetitions = 3;
        plan.sweep = vec![100, 200];
        let r = run_experiment(&plan, &e).unwrap();
        assert_eq!(r.rows.len(), 6);
        for row in &r.rows {
            assert_eq!((row.capability() * row.walks as f64).round() as u64, row.pairs);
            assert_eq!(row.found.len() as u64, row.pairs);
            if row.pairs > 0 {
                assert!((row.cost() * row.pairs as f64 - row.executions as f64).abs() < 1e-6);
            }
        }
        assert!(r.aggregates[1].mean_executions > r.aggregates[0].mean_executions);
    }

    #[test]
    fn same_seed_same_report() {
        let e = make_subject("circle1", &[]).unwrap();
        let mut plan = ExperimentPlan::new("circle1", Strategy::RandomWalk(Traversal::all(e.schema())), 150);
        plan.repetitions = 2;
        plan.seed = 17;
        let strip = |mut r: ExplorationReport| {
            for row in &mut r.rows {
                row.wall = Duration::ZERO;
            }
            for a in &mut r.aggregates {
                a.mean_wall = Duration::ZERO;
            }
            r
        };
        let a = strip(run_experiment(&plan, &e).unwrap());
        let b = strip(run_experiment(&plan, &e).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn executor_failure_is_recorded() {
        let schema = crate::classifiers::subject_schema();
        let e = Executor::from_fn("broken", schema, ThreadSafety::Concurrent, |p| {
            if p[0].as_f64().unwrap() > 3.0 {
                Err(ExecError::Crashed("boom".into()))
            } else {
                Ok(Label::new("x"))
            }
        });
        let mut plan = ExperimentPlan::new("broken", Strategy::RandomTarget, 50);
        plan.repetitions = 2;
        let r = run_experiment(&plan, &e).unwrap();
        assert_eq!(r.failed().count(), 2);
        assert_eq!(r.aggregates[0].repetitions, 0);
        assert!(r.aggregates[0].cost.is_infinite());
    }

    #[test]
    fn bad_plans_are_rejected() {
        let e = make_subject("sin1", &[]).unwrap();
        let mut plan = ExperimentPlan::new("sin1", Strategy::RandomTarget, 0);
        assert!(matches!(run_experiment(&plan, &e), Err(HarnessError::BadPlan(_))));
        plan.sweep = vec![10];
        plan.repetitions = 0;
        assert!(matches!(run_experiment(&plan, &e), Err(HarnessError::BadPlan(_))));
    }

    #[test]
    fn fit_recovers_a_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [3.0, 5.0, 7.0, 9.0];
        let (m, b, r2) = linear_fit(&xs, &ys);
        assert!((m - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }
}
