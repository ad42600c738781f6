use std::ffi::c_char;
use std::ptr;

use paretoprobe::morphisms::Traversal;
use paretoprobe::space::random_pool;
use paretoprobe::strategies::{explore, Strategy, StrategyConfig, StrategyError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{guard, Failure, PpStatus};
use crate::executor::{executor_ref, PpExecutor};
use crate::{out_string, str_arg};

pub const PP_STRATEGY_RANDOM_TARGET: u32 = 0;
pub const PP_STRATEGY_DIRECTED_WALK: u32 = 1;
pub const PP_STRATEGY_RANDOM_WALK: u32 = 2;

/// Parameters of one exploration run. Fill with
/// [`pp_explore_options_default`] and override fields as needed.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PpExploreOptions {
    /// One of the `PP_STRATEGY_*` constants.
    pub strategy: u32,
    /// Refinement iterations per bracket.
    pub steps: u32,
    /// Traversal steps per walk.
    pub walk_distance: u32,
    /// Upper bound on walk threads; 0 picks automatically.
    pub jobs: u32,
    pub walks: u64,
    /// Seed points sampled uniformly from the schema.
    pub pool_size: u64,
    pub seed: u64,
    /// Comma-separated traversals such as `"U0,D1"`, or null. Directed
    /// walks use the first (default `U0`); random walks default to all.
    pub traversals: *const c_char,
}

/// Totals of a run and one JSON record per walk, newline-delimited. Release
/// `ndjson` with `pp_string_free`.
#[repr(C)]
#[derive(Debug)]
pub struct PpExploreResult {
    pub walks: u64,
    pub pairs: u64,
    pub executions: u64,
    pub ndjson: *mut c_char,
}

impl From<StrategyError> for Failure {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::Exec(e) => e.into(),
            StrategyError::Io(m) => Failure::new(PpStatus::Io, m),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

/// Random walk over every traversal, 1000 walks, 20 steps and walk
/// distance 20, a pool of 300 seeds, seed 0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pp_explore_options_default(out: *mut PpExploreOptions) -> PpStatus {
    guard(|| {
        let o = PpExploreOptions {
            strategy: PP_STRATEGY_RANDOM_WALK,
            steps: 20,
            walk_distance: 20,
            jobs: 0,
            walks: 1000,
            pool_size: 300,
            seed: 0,
            traversals: ptr::null(),
        };
        // SAFETY: caller contract.
        unsafe { crate::write_out(out, o, "out") }
    })
}

/// Runs `options.walks` walks against `exec`.
///
/// # Safety
/// `exec` must be a live handle; `options` readable, with `traversals` null
/// or NUL-terminated; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pp_explore(
    exec: *const PpExecutor,
    options: *const PpExploreOptions,
    out: *mut PpExploreResult,
) -> PpStatus {
    guard(|| {
        // SAFETY: caller contract.
        let e = unsafe { executor_ref(exec) }?;
        // SAFETY: caller contract.
        let o = unsafe { options.as_ref() }.ok_or_else(|| Failure::null("options"))?;
        if out.is_null() {
            return Err(Failure::null("out"));
        }
        let schema = e.schema();
        let ts = if o.traversals.is_null() {
            Vec::new()
        } else {
            // SAFETY: caller contract.
            let text = unsafe { str_arg(o.traversals, "traversals") }?;
            text.split(',')
                .filter(|t| !t.trim().is_empty())
                .map(|t| t.trim().parse::<Traversal>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Failure::invalid(e.to_string()))?
        };
        let strategy = match o.strategy {
            PP_STRATEGY_RANDOM_TARGET => Strategy::RandomTarget,
            PP_STRATEGY_DIRECTED_WALK => Strategy::DirectedWalk(ts.first().copied().unwrap_or(Traversal::up(0))),
            PP_STRATEGY_RANDOM_WALK if ts.is_empty() => Strategy::RandomWalk(Traversal::all(schema)),
            PP_STRATEGY_RANDOM_WALK => Strategy::RandomWalk(ts),
            other => return Err(Failure::invalid(format!("unknown strategy {other}"))),
        };
        let pool_size = usize::try_from(o.pool_size).map_err(|_| Failure::invalid("pool_size too large"))?;
        let mut rng = ChaCha8Rng::seed_from_u64(o.seed);
        rng.set_stream(1);
        let pool = random_pool(schema, pool_size, &mut rng)?;
        let cfg = StrategyConfig { steps: o.steps, walk_distance: o.walk_distance, pool, seed: o.seed };
        let jobs = (o.jobs > 0).then_some(o.jobs as usize);
        let x = explore(&strategy, &cfg, o.walks, e, jobs)?;
        let mut buf = Vec::new();
        x.write_ndjson(&mut buf)?;
        let text = String::from_utf8(buf).map_err(|_| Failure::invalid("records are not UTF-8"))?;
        let result = PpExploreResult {
            walks: x.walks(),
            pairs: x.pair_count(),
            executions: x.executions(),
            ndjson: out_string(text)?,
        };
        // SAFETY: checked non-null above.
        unsafe { out.write(result) };
        Ok(())
    })
}
