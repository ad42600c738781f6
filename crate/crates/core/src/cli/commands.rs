use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Duration;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bridge::{self, BridgeConfig, BridgeError, RestartPolicy, ServeEnd, ServeOptions};
use crate::classifiers::{class_mass as mass, make_subject, subject_schema, Executor, Subject, SubjectError, SubjectId};
use crate::harness::{self, ExperimentPlan, HarnessError};
use crate::morphisms::{apply_composition, plan_path as plan, MorphError, Traversal};
use crate::space::{distance, random_pool, Point, SpaceError, SpaceSchema};
use crate::strategies::{self, Strategy, StrategyConfig, StrategyError, StrategyKind};

use super::{ClassMassArgs, CliError, ExperimentArgs, ExploreArgs, PlanPathArgs, ServeArgs, SourceArgs, WalkArgs};

impl From<SubjectError> for CliError {
    fn from(e: SubjectError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SpaceError> for CliError {
    fn from(e: SpaceError) -> Self {
        match e {
            SpaceError::Io(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<MorphError> for CliError {
    fn from(e: MorphError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<BridgeError> for CliError {
    fn from(e: BridgeError) -> Self {
        match e {
            BridgeError::BadConfig(_) | BridgeError::SchemaMismatch { .. } | BridgeError::KindMismatch { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::Exec(_) | StrategyError::Io(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::BadPlan(_) | HarnessError::NotTwoDimensional(_) => CliError::Config(e.to_string()),
            HarnessError::Space(e) => e.into(),
            HarnessError::Strategy(e) => e.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |e| CliError::Runtime(format!("{}: {e}", path.display()))
}

fn parse_params(params: &[String]) -> Result<Vec<(String, f64)>, CliError> {
    params
        .iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("--param {p:?} is not NAME=VALUE")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("--param {p:?}: value is not a number")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

/// Parses `start:stop:step`, `a,b,c` or a single count.
pub fn parse_sweep(s: &str) -> Result<Vec<u64>, String> {
    let num = |t: &str| t.trim().parse::<u64>().map_err(|_| format!("bad walk count {t:?} in sweep {s:?}"));
    if let Some((start, rest)) = s.split_once(':') {
        let (stop, step) = rest.split_once(':').ok_or_else(|| format!("sweep {s:?} needs start:stop:step"))?;
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if step == 0 || start == 0 || start > stop {
            return Err(format!("sweep {s:?} needs 0 < start <= stop and step > 0"));
        }
        return Ok((start..=stop).step_by(step as usize).collect());
    }
    let walks = s.split(',').map(num).collect::<Result<Vec<_>, _>>()?;
    if walks.contains(&0) {
        return Err(format!("sweep {s:?} contains a zero walk count"));
    }
    Ok(walks)
}

/// Stable identifier of a plan's parameters, used as a directory name.
pub fn plan_id(parts: &[&str]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in parts.join("\u{1f}").bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    format!("{h:016x}")
}

struct Target {
    name: String,
    exec: Executor,
}

fn bridge_config(src: &SourceArgs, command: &str) -> Result<BridgeConfig, CliError> {
    let mut cfg = BridgeConfig::from_command_line(command)?;
    cfg.handshake_timeout_ms = src.handshake_timeout_ms;
    cfg.request_timeout_ms = src.request_timeout_ms;
    cfg.restart = if src.restarts > 0 {
        RestartPolicy::OnCrash { max_restarts: src.restarts }
    } else {
        RestartPolicy::Never
    };
    cfg.transcript = src.transcript.clone();
    Ok(cfg)
}

fn load_schema(path: &Path) -> Result<SpaceSchema, CliError> {
    Ok(SpaceSchema::load(path)?)
}

/// Resolves the classifier source. `all` expands to every subject when
/// `allow_all` is set.
fn targets(src: &SourceArgs, allow_all: bool, bridge_name: &str) -> Result<Vec<Target>, CliError> {
    if let Some(command) = &src.bridge {
        let schema_path = src.schema.as_deref().ok_or_else(|| CliError::Config("--bridge requires --schema".into()))?;
        let schema = load_schema(schema_path)?;
        let exec = bridge::spawn(&bridge_config(src, command)?, schema)?;
        return Ok(vec![Target { name: bridge_name.to_string(), exec }]);
    }
    let subject = src.subject.as_deref().ok_or_else(|| CliError::Config("give --subject or --bridge".into()))?;
    let params = parse_params(&src.params)?;
    let names: Vec<&str> = if subject == "all" && allow_all {
        SubjectId::ALL.iter().map(|s| s.as_str()).collect()
    } else {
        vec![subject]
    };
    names
        .into_iter()
        .map(|n| {
            Ok(Target {
                name: n.to_string(),
                exec: make_subject(n, &params)?,
            })
        })
        .collect()
}

fn traversals(schema: &SpaceSchema, text: &[String]) -> Result<Vec<Traversal>, CliError> {
    let ts = text.iter().map(|t| t.trim().parse::<Traversal>()).collect::<Result<Vec<_>, _>>()?;
    if let Some(t) = ts.iter().find(|t| t.feature >= schema.len()) {
        return Err(CliError::Config(format!("traversal {t} names a feature outside the schema")));
    }
    Ok(ts)
}

fn strategy_for(kind: StrategyKind, schema: &SpaceSchema, walk: &WalkArgs) -> Result<Strategy, CliError> {
    let ts = traversals(schema, &walk.traversal)?;
    Ok(match kind {
        StrategyKind::RandomTarget => Strategy::RandomTarget,
        StrategyKind::DirectedWalk => Strategy::DirectedWalk(ts.first().copied().unwrap_or(Traversal::up(0))),
        StrategyKind::RandomWalk if ts.is_empty() => Strategy::RandomWalk(Traversal::all(schema)),
        StrategyKind::RandomWalk => Strategy::RandomWalk(ts),
    })
}

fn strategy_kinds(name: &str) -> Result<Vec<StrategyKind>, CliError> {
    if name == "all" {
        Ok(StrategyKind::ALL.to_vec())
    } else {
        Ok(vec![name.parse()?])
    }
}

fn read_pool(schema: &SpaceSchema, path: &Path) -> Result<Vec<Point>, CliError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut pool = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let p = Point::parse_json(schema, &line)
            .map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), n + 1)))?;
        pool.push(p);
    }
    Ok(pool)
}

fn sample_pool(schema: &SpaceSchema, size: usize, seed: u64) -> Result<Vec<Point>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    Ok(random_pool(schema, size, &mut rng)?)
}

fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn fmt_cost(c: f64) -> String {
    if c.is_finite() {
        format!("{c:.3}")
    } else {
        "inf".into()
    }
}

pub(super) fn explore(a: &ExploreArgs) -> Result<i32, CliError> {
    let kind: StrategyKind = a.strategy.parse()?;
    if a.walks == 0 {
        return Err(CliError::Config("--walks must be at least 1".into()));
    }
    let target = targets(&a.source, false, "bridge")?.remove(0);
    let exec = &target.exec;
    let strategy = strategy_for(kind, exec.schema(), &a.walk)?;
    let pool = match &a.pool {
        Some(path) => read_pool(exec.schema(), path)?,
        None => sample_pool(exec.schema(), a.walk.pool_size, a.walk.seed)?,
    };
    let cfg = StrategyConfig {
        steps: a.walk.steps,
        walk_distance: a.walk.walk_distance,
        pool,
        seed: a.walk.seed,
    };
    let x = strategies::explore(&strategy, &cfg, a.walks, exec, a.walk.jobs)?;
    exec.shutdown();

    create_dir(&a.walk.out)?;
    let path = a.walk.out.join("pairs.ndjson");
    let file = File::create(&path).map_err(io_err(&path))?;
    let mut out = BufWriter::new(file);
    x.write_ndjson(&mut out)?;
    out.flush().map_err(io_err(&path))?;

    let pairs = x.pair_count();
    let executions = x.executions();
    let cost = if pairs > 0 { executions as f64 / pairs as f64 } else { f64::INFINITY };
    println!(
        "pairs={pairs} executions={executions} capability={:.4} cost={}",
        pairs as f64 / a.walks as f64,
        fmt_cost(cost)
    );
    Ok(0)
}

pub(super) fn experiment(a: &ExperimentArgs) -> Result<i32, CliError> {
    let kinds = strategy_kinds(&a.strategy)?;
    let sweep = parse_sweep(&a.sweep).map_err(CliError::Config)?;
    if a.repetitions == 0 {
        return Err(CliError::Config("--repetitions must be at least 1".into()));
    }
    let targets = targets(&a.source, true, &a.name)?;

    let source = a.source.bridge.clone().unwrap_or_else(|| a.source.subject.clone().unwrap_or_default());
    let params = a.source.params.join(";");
    let id = plan_id(&[
        &source,
        &params,
        &a.strategy,
        &a.sweep,
        &a.repetitions.to_string(),
        &a.walk.steps.to_string(),
        &a.walk.walk_distance.to_string(),
        &a.walk.pool_size.to_string(),
        &a.walk.traversal.join(","),
        &a.walk.seed.to_string(),
    ]);
    let stamp = chrono::Utc::now().format("%Y%m%dT%H%M%S%.3fZ").to_string();
    let dir: PathBuf = a.walk.out.join("runs").join(id).join(stamp);
    create_dir(&dir)?;

    let mut failures = 0usize;
    for t in &targets {
        let schema = t.exec.schema();
        for &kind in &kinds {
            let plan = ExperimentPlan {
                target: t.name.clone(),
                strategy: strategy_for(kind, schema, &a.walk)?,
                sweep: sweep.clone(),
                repetitions: a.repetitions,
                steps: a.walk.steps,
                walk_distance: a.walk.walk_distance,
                pool_size: a.walk.pool_size,
                seed: a.walk.seed,
                jobs: a.walk.jobs,
            };
            let report = harness::run_experiment(&plan, &t.exec)?;
            let stem = format!("{}__{}", t.name, kind.as_str());
            harness::export_csv(&report, &dir.join(format!("{stem}.csv")))?;
            for g in &report.aggregates {
                println!(
                    "{} {} walks={} capability={:.4} cost={}",
                    t.name,
                    kind.as_str(),
                    g.walks,
                    g.capability,
                    fmt_cost(g.cost)
                );
            }
            for r in report.failed() {
                failures += 1;
                eprintln!(
                    "error: {} {} walks={} repetition={}: {}",
                    t.name,
                    kind.as_str(),
                    r.walks,
                    r.repetition,
                    r.error.as_deref().unwrap_or_default()
                );
            }
            if a.render {
                // Front of the first repetition at the last walk count of the sweep.
                let last = *sweep.last().expect("sweep is non-empty");
                let row = report.rows.iter().find(|r| r.walks == last && r.repetition == 0);
                if let Some(row) = row {
                    match harness::write_front_svg(schema, &row.pool, &row.found, &dir.join(format!("{stem}.svg"))) {
                        Ok(()) => {}
                        Err(HarnessError::NotTwoDimensional(why)) => {
                            eprintln!("warning: not rendering {stem}: {why}");
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
        t.exec.shutdown();
    }
    println!("reports in {}", dir.display());
    Ok(if failures > 0 { 2 } else { 0 })
}

pub(super) fn plan_path(a: &PlanPathArgs) -> Result<i32, CliError> {
    let schema = match &a.schema {
        Some(path) => load_schema(path)?,
        None => subject_schema(),
    };
    let from = Point::parse_json(&schema, &a.from)?;
    let to = Point::parse_json(&schema, &a.to)?;
    let c = plan(&schema, &from, &to, a.delta)?;
    let end = apply_composition(&schema, &c, &from)?;
    let residual = distance(&schema, &end, &to)?;
    println!("{c}");
    println!("steps={} residual={residual:e}", c.len());
    Ok(0)
}

pub(super) fn serve(a: &ServeArgs) -> Result<i32, CliError> {
    let exec = match (&a.subject, &a.constant) {
        (Some(name), _) => {
            if a.schema.is_some() {
                return Err(CliError::Config("--schema is only used with --constant".into()));
            }
            make_subject(name, &parse_params(&a.params)?)?
        }
        (None, Some(label)) => {
            let path = a.schema.as_deref().ok_or_else(|| CliError::Config("--constant requires --schema".into()))?;
            Executor::constant(load_schema(path)?, label)
        }
        (None, None) => return Err(CliError::Config("give --subject or --constant".into())),
    };
    let opts = ServeOptions {
        crash_after: a.crash_after,
        delay: Duration::from_millis(a.delay_ms),
        declare_features: a.declare_features,
        concurrent: a.concurrent,
    };
    let stdin = io::stdin();
    let end = bridge::serve(exec.classifier(), &opts, stdin.lock(), io::stdout())
        .map_err(|e| CliError::Runtime(format!("serve: {e}")))?;
    Ok(match end {
        ServeEnd::Bye | ServeEnd::Eof => 0,
        ServeEnd::Crash => 3,
    })
}

pub(super) fn class_mass(a: &ClassMassArgs) -> Result<i32, CliError> {
    let id: SubjectId = a.subject.parse()?;
    let subject = Subject::new(id, &parse_params(&a.params)?)?;
    if a.samples == 0 {
        return Err(CliError::Config("--samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    for (label, share) in mass(&subject, a.samples, &mut rng) {
        println!("{label}={share:.4}");
    }
    Ok(0)
}
