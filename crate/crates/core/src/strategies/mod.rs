//! Exploration strategies that turn a seed pool into Pareto pairs: random
//! target, directed walk and random walk, each ending in bisection.

mod walks;

pub use walks::{directed_walk, random_target, random_walk, refine, Refinement};

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::classifiers::{ExecError, Executor, Label, ThreadSafety};
use crate::morphisms::Traversal;
use crate::space::{validate_point, Point, Verdict};

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyConfig {
    /// Bisection iterations per found bracket.
    pub steps: u32,
    /// Maximum traversal steps per walk.
    pub walk_distance: u32,
    /// Seed test set.
    pub pool: Vec<Point>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledPoint {
    pub point: Point,
    pub label: Label,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    RandomTarget,
    DirectedWalk,
    RandomWalk,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::RandomTarget, StrategyKind::DirectedWalk, StrategyKind::RandomWalk];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::RandomTarget => "random-target",
            StrategyKind::DirectedWalk => "directed-walk",
            StrategyKind::RandomWalk => "random-walk",
        }
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyKind {
    type Err = StrategyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        StrategyKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| StrategyError::UnknownStrategy(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub strategy: StrategyKind,
    pub walk: u64,
    /// Seed of the walk's own generator.
    pub seed: u64,
}

/// Two differently labelled points close to a class border.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoPair {
    pub a: LabeledPoint,
    pub b: LabeledPoint,
    pub gap: f64,
    /// Bracket width when refinement started.
    pub entry_gap: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WalkResult {
    Found(ParetoPair),
    NotFound,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutcome {
    pub result: WalkResult,
    pub executions_used: u64,
}

impl WalkOutcome {
    pub fn not_found(executions_used: u64) -> Self {
        WalkOutcome {
            result: WalkResult::NotFound,
            executions_used,
        }
    }

    pub fn pair(&self) -> Option<&ParetoPair> {
        match &self.result {
            WalkResult::Found(p) => Some(p),
            WalkResult::NotFound => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StrategyError {
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error("pool needs at least {needed} points, has {got}")]
    PoolTooSmall { needed: usize, got: usize },
    #[error("pool point {index} is invalid: {verdict}")]
    InvalidPool { index: usize, verdict: Verdict },
    #[error("random walk needs at least one traversal")]
    NoTraversals,
    #[error("traversal {0} names a feature outside the schema")]
    BadTraversal(Traversal),
    #[error("bracket ends share the label {0:?}")]
    SameLabel(String),
    #[error("unknown strategy {0:?} (expected random-target, directed-walk or random-walk)")]
    UnknownStrategy(String),
    #[error("io: {0}")]
    Io(String),
}

/// A strategy with its traversal choice.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    RandomTarget,
    DirectedWalk(Traversal),
    RandomWalk(Vec<Traversal>),
}

impl Strategy {
    pub fn kind(&self) -> StrategyKind {
        match self {
            Strategy::RandomTarget => StrategyKind::RandomTarget,
            Strategy::DirectedWalk(_) => StrategyKind::DirectedWalk,
            Strategy::RandomWalk(_) => StrategyKind::RandomWalk,
        }
    }

    /// Runs walk number `walk`.
    pub fn run(&self, cfg: &StrategyConfig, walk: u64, exec: &Executor) -> Result<WalkOutcome, StrategyError> {
        match self {
            Strategy::RandomTarget => random_target(cfg, walk, exec),
            Strategy::DirectedWalk(t) => directed_walk(cfg, walk, *t, exec),
            Strategy::RandomWalk(ts) => random_walk(cfg, walk, ts, exec),
        }
    }

    fn check(&self, cfg: &StrategyConfig, exec: &Executor) -> Result<(), StrategyError> {
        let schema = exec.schema();
        for (index, p) in cfg.pool.iter().enumerate() {
            let verdict = validate_point(schema, p);
            if !verdict.is_ok() {
                return Err(StrategyError::InvalidPool { index, verdict });
            }
        }
        let needed = if matches!(self, Strategy::RandomTarget) { 2 } else { 1 };
        if cfg.pool.len() < needed {
            return Err(StrategyError::PoolTooSmall { needed, got: cfg.pool.len() });
        }
        let ts: &[Traversal] = match self {
            Strategy::RandomTarget => &[],
            Strategy::DirectedWalk(t) => std::slice::from_ref(t),
            Strategy::RandomWalk(ts) if ts.is_empty() => return Err(StrategyError::NoTraversals),
            Strategy::RandomWalk(ts) => ts,
        };
        if let Some(t) = ts.iter().find(|t| t.feature >= schema.len()) {
            return Err(StrategyError::BadTraversal(*t));
        }
        Ok(())
    }
}

/// Outcomes of walks `0..walks`, in walk order.
#[derive(Debug, Clone, PartialEq)]
pub struct Exploration {
    pub strategy: StrategyKind,
    pub outcomes: Vec<WalkOutcome>,
}

impl Exploration {
    pub fn walks(&self) -> u64 {
        self.outcomes.len() as u64
    }

    pub fn executions(&self) -> u64 {
        self.outcomes.iter().map(|o| o.executions_used).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &ParetoPair> {
        self.outcomes.iter().filter_map(WalkOutcome::pair)
    }

    pub fn pair_count(&self) -> u64 {
        self.pairs().count() as u64
    }

    /// Writes one JSON record per walk.
    pub fn write_ndjson<W: Write>(&self, mut out: W) -> Result<(), StrategyError> {
        for (walk, o) in self.outcomes.iter().enumerate() {
            let record = match o.pair() {
                Some(p) => serde_json::json!({
                    "walk": walk,
                    "strategy": self.strategy,
                    "found": true,
                    "executions": o.executions_used,
                    "a": p.a.point,
                    "label_a": p.a.label,
                    "b": p.b.point,
                    "label_b": p.b.label,
                    "gap": p.gap,
                    "seed": p.provenance.seed,
                }),
                None => serde_json::json!({
                    "walk": walk,
                    "strategy": self.strategy,
                    "found": false,
                    "executions": o.executions_used,
                }),
            };
            writeln!(out, "{record}").map_err(|e| StrategyError::Io(e.to_string()))?;
        }
        Ok(())
    }
}

/// Runs walks `0..walks`. Walks run in parallel on `Concurrent` executors,
/// on at most `jobs` threads when given. Results do not depend on the
/// thread count.
pub fn explore(
    strategy: &Strategy,
    cfg: &StrategyConfig,
    walks: u64,
    exec: &Executor,
    jobs: Option<usize>,
) -> Result<Exploration, StrategyError> {
    strategy.check(cfg, exec)?;
    let run = |w: u64| strategy.run(cfg, w, exec);
    let parallel = exec.thread_safety() == ThreadSafety::Concurrent && jobs != Some(1);
    let outcomes = if !parallel {
        (0..walks).map(run).collect::<Result<Vec<_>, _>>()?
    } else if let Some(n) = jobs {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| StrategyError::Io(e.to_string()))?;
        pool.install(|| (0..walks).into_par_iter().map(run).collect::<Result<Vec<_>, _>>())?
    } else {
        (0..walks).into_par_iter().map(run).collect::<Result<Vec<_>, _>>()?
    };
    Ok(Exploration {
        strategy: strategy.kind(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::make_subject;
    use crate::space::random_pool;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(subject: &str) -> (Executor, StrategyConfig) {
        let e = make_subject(subject, &[]).unwrap();
        let pool = random_pool(e.schema(), 300, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let cfg = StrategyConfig { steps: 20, walk_distance: 20, pool, seed: 9 };
        (e, cfg)
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let (e, cfg) = setup("sin2");
        let s = Strategy::RandomWalk(Traversal::all(e.schema()));
        let one = explore(&s, &cfg, 300, &e, Some(1)).unwrap();
        let four = explore(&s, &cfg, 300, &e, Some(4)).unwrap();
        let any = explore(&s, &cfg, 300, &e, None).unwrap();
        assert_eq!(one, four);
        assert_eq!(one, any);
    }

    #[test]
    fn executions_match_counter() {
        let (e, cfg) = setup("circle2");
        for s in [Strategy::RandomTarget, Strategy::DirectedWalk(Traversal::up(0)), Strategy::RandomWalk(Traversal::all(e.schema()))] {
            let before = e.executions();
            let x = explore(&s, &cfg, 200, &e, None).unwrap();
            assert_eq!(x.executions(), e.executions() - before);
        }
    }

    #[test]
    fn prefix_property() {
        let (e, cfg) = setup("line2");
        let s = Strategy::RandomTarget;
        let short = explore(&s, &cfg, 100, &e, None).unwrap();
        let long = explore(&s, &cfg, 200, &e, None).unwrap();
        assert_eq!(short.outcomes[..], long.outcomes[..100]);
    }

    #[test]
    fn configuration_is_checked() {
        let (e, mut cfg) = setup("sin1");
        let bad_t = Strategy::DirectedWalk(Traversal::up(5));
        assert!(matches!(explore(&bad_t, &cfg, 1, &e, None), Err(StrategyError::BadTraversal(_))));
        assert!(matches!(
            explore(&Strategy::RandomWalk(vec![]), &cfg, 1, &e, None),
            Err(StrategyError::NoTraversals)
        ));
        cfg.pool.push(Point::reals(&[9.0, 0.0]).unwrap());
        assert!(matches!(
            explore(&Strategy::RandomTarget, &cfg, 1, &e, None),
            Err(StrategyError::InvalidPool { index: 300, .. })
        ));
    }

    #[test]
    fn ndjson_has_one_record_per_walk() {
        let (e, cfg) = setup("sin2");
        let x = explore(&Strategy::RandomTarget, &cfg, 50, &e, None).unwrap();
        let mut buf = Vec::new();
        x.write_ndjson(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 50);
        let found = lines
            .iter()
            .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap())
            .filter(|v| v["found"] == true)
            .count();
        assert_eq!(found as u64, x.pair_count());
    }

    #[test]
    fn strategy_names_round_trip() {
        for k in StrategyKind::ALL {
            assert_eq!(k.as_str().parse::<StrategyKind>().unwrap(), k);
        }
        assert!("hill-climb".parse::<StrategyKind>().is_err());
    }
}
