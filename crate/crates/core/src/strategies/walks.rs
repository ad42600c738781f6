use rand::seq::index::sample;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifiers::Executor;
use crate::morphisms::{apply_traversal_unchecked, midpoint_unchecked, Traversal};
use crate::space::distance_unchecked;

use super::{LabeledPoint, ParetoPair, Provenance, StrategyConfig, StrategyError, StrategyKind, WalkOutcome, WalkResult};

/// Result of [`refine`]: the final bracket and the executions it took.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub a: LabeledPoint,
    pub b: LabeledPoint,
    pub executions: u64,
}

/// Bisects the bracket `(x, y)` exactly `steps` times, keeping the labels at
/// its ends different. Each iteration classifies the midpoint once.
pub fn refine(x: LabeledPoint, y: LabeledPoint, steps: u32, exec: &Executor) -> Result<Refinement, StrategyError> {
    if x.label == y.label {
        return Err(StrategyError::SameLabel(x.label.to_string()));
    }
    let (mut x, mut y) = (x, y);
    for _ in 0..steps {
        let z = midpoint_unchecked(&x.point, &y.point);
        let label = exec.classify(&z)?;
        let z = LabeledPoint { point: z, label };
        if z.label != x.label {
            y = z;
        } else {
            x = z;
        }
    }
    Ok(Refinement {
        a: x,
        b: y,
        executions: u64::from(steps),
    })
}

/// Generator for one walk. Depends only on the base seed and walk index.
pub(crate) fn walk_rng(cfg: &StrategyConfig, walk: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(walk_seed(cfg, walk))
}

pub(crate) fn walk_seed(cfg: &StrategyConfig, walk: u64) -> u64 {
    cfg.seed ^ walk
}

fn labeled(exec: &Executor, point: crate::space::Point, used: &mut u64) -> Result<LabeledPoint, StrategyError> {
    let label = exec.classify(&point)?;
    *used += 1;
    Ok(LabeledPoint { point, label })
}

fn found(
    cfg: &StrategyConfig,
    kind: StrategyKind,
    walk: u64,
    x: LabeledPoint,
    y: LabeledPoint,
    exec: &Executor,
    used: u64,
) -> Result<WalkOutcome, StrategyError> {
    let entry_gap = distance_unchecked(&x.point, &y.point);
    let r = refine(x, y, cfg.steps, exec)?;
    let gap = distance_unchecked(&r.a.point, &r.b.point);
    Ok(WalkOutcome {
        result: WalkResult::Found(ParetoPair {
            a: r.a,
            b: r.b,
            gap,
            entry_gap,
            provenance: Provenance {
                strategy: kind,
                walk,
                seed: walk_seed(cfg, walk),
            },
        }),
        executions_used: used + r.executions,
    })
}

/// Two distinct pool points; refine if their labels differ.
pub fn random_target(cfg: &StrategyConfig, walk: u64, exec: &Executor) -> Result<WalkOutcome, StrategyError> {
    if cfg.pool.len() < 2 {
        return Err(StrategyError::PoolTooSmall { needed: 2, got: cfg.pool.len() });
    }
    let mut rng = walk_rng(cfg, walk);
    let picked = sample(&mut rng, cfg.pool.len(), 2);
    let mut used = 0;
    let x = labeled(exec, cfg.pool[picked.index(0)].clone(), &mut used)?;
    let y = labeled(exec, cfg.pool[picked.index(1)].clone(), &mut used)?;
    if x.label == y.label {
        return Ok(WalkOutcome::not_found(used));
    }
    found(cfg, StrategyKind::RandomTarget, walk, x, y, exec, used)
}

/// Walks from a pool point along `t` until the label changes. A step that
/// leaves the point unchanged (domain edge) ends the walk.
pub fn directed_walk(cfg: &StrategyConfig, walk: u64, t: Traversal, exec: &Executor) -> Result<WalkOutcome, StrategyError> {
    if cfg.pool.is_empty() {
        return Err(StrategyError::PoolTooSmall { needed: 1, got: 0 });
    }
    let schema = exec.schema();
    let mut rng = walk_rng(cfg, walk);
    let start = cfg.pool[rng.random_range(0..cfg.pool.len())].clone();
    let mut used = 0;
    let mut x = labeled(exec, start, &mut used)?;
    for _ in 0..cfg.walk_distance {
        let next = apply_traversal_unchecked(schema, t, &x.point);
        if next == x.point {
            return Ok(WalkOutcome::not_found(used));
        }
        let y = labeled(exec, next, &mut used)?;
        if y.label != x.label {
            return found(cfg, StrategyKind::DirectedWalk, walk, x, y, exec, used);
        }
        x = y;
    }
    Ok(WalkOutcome::not_found(used))
}

/// Like [`directed_walk`], but each step uses a traversal drawn uniformly
/// from `ts`. A step that leaves the point unchanged is skipped without an
/// execution; it still counts toward the walk distance.
pub fn random_walk(cfg: &StrategyConfig, walk: u64, ts: &[Traversal], exec: &Executor) -> Result<WalkOutcome, StrategyError> {
    if ts.is_empty() {
        return Err(StrategyError::NoTraversals);
    }
    if cfg.pool.is_empty() {
        return Err(StrategyError::PoolTooSmall { needed: 1, got: 0 });
    }
    let schema = exec.schema();
    let mut rng = walk_rng(cfg, walk);
    let start = cfg.pool[rng.random_range(0..cfg.pool.len())].clone();
    let mut used = 0;
    let mut x = labeled(exec, start, &mut used)?;
    for _ in 0..cfg.walk_distance {
        let t = ts[rng.random_range(0..ts.len())];
        let next = apply_traversal_unchecked(schema, t, &x.point);
        if next == x.point {
            continue;
        }
        let y = labeled(exec, next, &mut used)?;
        if y.label != x.label {
            return found(cfg, StrategyKind::RandomWalk, walk, x, y, exec, used);
        }
        x = y;
    }
    Ok(WalkOutcome::not_found(used))
}
