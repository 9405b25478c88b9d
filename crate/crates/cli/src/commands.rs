use std::io::Write;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use odesc::classify::{compute_m, conjugacy_witness, is_infinity_adic};
use odesc::escape::{
    construct_indecisive, sample_genericity, validate_system, verify_schedule, winner_trace, ConstructError,
    ConstructOptions, HoleSystem, Validity, WinnerTrace,
};
use odesc::interval::{
    backward_gap, backward_level, build_solenoid, construct_indecisive_interval, first_hit_interval,
    interval_winner_trace, verify_interval_schedule, verify_solenoid_structure, IntervalConstructError,
    IntervalConstructOptions, IntervalHit, IntervalHole, OpenInterval, Orbit, PiecewiseAffineMap,
    SolenoidalModel,
};
use odesc::odometer::partition_report;
use odesc::rational::{format_rational, parse_rational};
use odesc::{AdicPoint, RadixSpec};
use serde::Serialize;

use crate::args::{Cli, Command, TentOp};
use crate::config::{Action, ExperimentConfig, HoleConfig, SystemConfig};
use crate::report;
use crate::{CliError, Outcome};

/// Fallback orbit horizon for interval maps when neither flag nor config sets one.
const DEFAULT_HORIZON: u64 = 100_000;
/// Largest cover `verify --depth` enumerates.
const MAX_PARTITION_CELLS: u64 = 50_000_000;

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("report serializes");
    bytes.push(b'\n');
    emit(out, &bytes)
}

pub fn dispatch(cli: Cli) -> Result<Outcome> {
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.seed = g.seed.or(cfg.seed);
    cfg.n_max = g.n_max.or(cfg.n_max);
    cfg.horizon = g.horizon.or(cfg.horizon);
    cfg.threads = g.threads.or(cfg.threads);
    cfg.output = g.out.clone().or(cfg.output);

    match cli.command {
        Command::Run => {
            let action = cfg
                .action
                .ok_or_else(|| usage("'run' needs an 'action' in the config"))?;
            run_action(action, &cfg, None)
        }
        Command::Simulate { x } => {
            cfg.x = x.or(cfg.x);
            simulate(&cfg)
        }
        Command::Construct {
            schedule,
            max_depth,
            max_offset,
            max_scale,
        } => {
            cfg.schedule = schedule.or(cfg.schedule);
            cfg.max_depth = max_depth.or(cfg.max_depth);
            cfg.max_offset = max_offset.or(cfg.max_offset);
            cfg.max_scale = max_scale.or(cfg.max_scale);
            construct(&cfg)
        }
        Command::Classify { a, b } => {
            let parse = |s: &str| s.parse::<RadixSpec>().map_err(|e| usage(format!("spec '{s}': {e}")));
            match (a, b) {
                (Some(a), Some(b)) => {
                    cfg.pair = Some((parse(&a)?, parse(&b)?));
                    classify(&cfg)
                }
                (Some(a), None) => describe_spec(&parse(&a)?, cfg.output.as_deref()),
                _ => classify(&cfg),
            }
        }
        Command::Sample { trials, summary } => {
            cfg.trials = trials.or(cfg.trials);
            sample(&cfg, summary)
        }
        Command::Verify {
            x,
            schedule,
            scales,
            depth,
        } => {
            cfg.x = x.or(cfg.x);
            cfg.schedule = schedule.or(cfg.schedule);
            cfg.scales = scales.or(cfg.scales);
            cfg.depth = depth.or(cfg.depth);
            verify(&cfg)
        }
        Command::Solenoid { branching, stage } => {
            if branching.is_some() || stage.is_some() {
                let (cfg_branching, cfg_stage) = match &cfg.system {
                    Some(SystemConfig::Solenoid { branching, stage }) => (Some(branching.clone()), Some(*stage)),
                    _ => (None, None),
                };
                let branching = match branching {
                    Some(text) => text.parse().map_err(|e| usage(format!("branching '{text}': {e}")))?,
                    None => cfg_branching.unwrap_or_else(|| RadixSpec::constant(2).expect("2 is a radix")),
                };
                let stage = stage
                    .or(cfg_stage)
                    .ok_or_else(|| usage("solenoid needs --stage"))?;
                cfg.system = Some(SystemConfig::Solenoid { branching, stage });
            }
            solenoid_check(&cfg)
        }
        Command::Tent { op } => tent(op, &cfg),
    }
}

fn run_action(action: Action, cfg: &ExperimentConfig, summary: Option<PathBuf>) -> Result<Outcome> {
    match action {
        Action::Simulate => simulate(cfg),
        Action::Construct => construct(cfg),
        Action::Classify => classify(cfg),
        Action::Sample => sample(cfg, summary),
        Action::Verify => verify(cfg),
        Action::SolenoidCheck => solenoid_check(cfg),
    }
}

fn system(cfg: &ExperimentConfig) -> Result<&SystemConfig> {
    cfg.system
        .as_ref()
        .ok_or_else(|| usage("the config needs a 'system'"))
}

fn require<T: Clone>(value: &Option<T>, name: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| usage(format!("missing '{name}' (config field or flag)")))
}

fn odometer_system(spec: &RadixSpec, holes: &[HoleConfig]) -> Result<HoleSystem> {
    let centers = holes
        .iter()
        .enumerate()
        .map(|(i, h)| {
            AdicPoint::parse(spec, &h.center).map_err(|e| usage(format!("holes[{i}].center: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let schedules = holes.iter().map(|h| h.schedule.clone()).collect();
    HoleSystem::new(spec.clone(), centers, schedules).map_err(|e| usage(e.to_string()))
}

fn rational(text: &str, what: &str) -> Result<BigRational> {
    parse_rational(text).map_err(|e| usage(format!("{what}: {e}")))
}

fn interval_holes(holes: &[HoleConfig]) -> Result<Vec<IntervalHole>> {
    holes
        .iter()
        .enumerate()
        .map(|(i, h)| {
            Ok(IntervalHole::new(
                rational(&h.center, &format!("holes[{i}].center"))?,
                h.schedule.clone(),
            ))
        })
        .collect()
}

/// Hole system on the adding machine coding stage `stage` of the model:
/// every center and the traced point are replaced by their itinerary residue.
fn solenoid_system(
    branching: &RadixSpec,
    stage: usize,
    holes: &[HoleConfig],
) -> Result<(SolenoidalModel, HoleSystem)> {
    let model = build_solenoid(branching, stage).map_err(|e| usage(e.to_string()))?;
    let centers = holes
        .iter()
        .enumerate()
        .map(|(i, h)| code_point(&model, stage, &rational(&h.center, &format!("holes[{i}].center"))?))
        .collect::<Result<Vec<_>>>()?;
    let schedules = holes.iter().map(|h| h.schedule.clone()).collect();
    let sys = HoleSystem::new(branching.clone(), centers, schedules).map_err(|e| usage(e.to_string()))?;
    Ok((model, sys))
}

fn code_point(model: &SolenoidalModel, stage: usize, x: &BigRational) -> Result<AdicPoint> {
    let label = model.itinerary(x, stage).map_err(|e| usage(e.to_string()))?;
    Ok(AdicPoint::from_residue(model.branching().clone(), &BigUint::from(label), stage)
        .expect("label below m_k"))
}

fn one_based_to_zero(schedule: &[usize], holes: usize) -> Result<Vec<usize>> {
    schedule
        .iter()
        .map(|&i| {
            if (1..=holes).contains(&i) {
                Ok(i - 1)
            } else {
                Err(usage(format!("schedule entry {i} is not a hole index in 1..={holes}")))
            }
        })
        .collect()
}

/// Orbit horizon for interval work: the flag/config value, else one that is
/// exact for tent orbits of `x`.
fn interval_horizon(cfg: &ExperimentConfig, x: &BigRational) -> u64 {
    cfg.horizon.unwrap_or_else(|| {
        x.denom()
            .to_u64()
            .map_or(DEFAULT_HORIZON, |q| q.saturating_add(2).max(DEFAULT_HORIZON))
    })
}

fn log_stats(trace: &WinnerTrace) {
    let stats = trace.stats();
    log::info!("switch count {}, wins {:?}", stats.switch_count, stats.wins);
}

fn simulate(cfg: &ExperimentConfig) -> Result<Outcome> {
    let n_max = require(&cfg.n_max, "n_max")?;
    let x_text = require(&cfg.x, "x")?;
    let out = cfg.output.as_deref();
    match system(cfg)? {
        SystemConfig::Odometer { radix } => {
            let sys = odometer_system(radix, &cfg.holes)?;
            if let Validity::Degenerate(reason) = validate_system(&sys) {
                log::warn!("degenerate hole system: {reason}");
            }
            let x = AdicPoint::parse(radix, &x_text).map_err(|e| usage(format!("x: {e}")))?;
            let trace = winner_trace(&sys, &x, n_max);
            log_stats(&trace);
            emit(out, &report::trace_csv(&trace, true))?;
        }
        SystemConfig::Tent => {
            let holes = interval_holes(&cfg.holes)?;
            let x = rational(&x_text, "x")?;
            let horizon = interval_horizon(cfg, &x);
            let trace = interval_winner_trace(&PiecewiseAffineMap::tent(), &holes, &x, n_max, horizon)
                .map_err(|e| usage(e.to_string()))?;
            log_stats(&trace);
            emit(out, &report::trace_csv(&trace, false))?;
        }
        SystemConfig::Solenoid { branching, stage } => {
            let (model, sys) = solenoid_system(branching, *stage, &cfg.holes)?;
            if let Some(n) = (1..=n_max).find(|&n| sys.depths(n).iter().any(|&d| d > *stage)) {
                return Err(usage(format!(
                    "at scale {n} a hole is deeper than stage {stage}; build a deeper stage or lower n_max"
                )));
            }
            let x = code_point(&model, *stage, &rational(&x_text, "x")?)?;
            let trace = winner_trace(&sys, &x, n_max);
            log_stats(&trace);
            emit(out, &report::trace_csv(&trace, true))?;
        }
    }
    Ok(Outcome::Positive)
}

#[derive(Serialize)]
struct OdometerConstruction {
    point: String,
    residue: String,
    depth: usize,
    schedule: Vec<usize>,
    realized_scales: Vec<usize>,
}

#[derive(Serialize)]
struct IntervalConstructionReport {
    x: String,
    schedule: Vec<usize>,
    realized_scales: Vec<usize>,
}

fn construct(cfg: &ExperimentConfig) -> Result<Outcome> {
    let schedule = require(&cfg.schedule, "schedule")?;
    if schedule.is_empty() {
        return Err(usage("schedule must not be empty"));
    }
    let out = cfg.output.as_deref();
    match system(cfg)? {
        SystemConfig::Odometer { radix } => {
            let sys = odometer_system(radix, &cfg.holes)?;
            let targets = one_based_to_zero(&schedule, sys.len())?;
            let defaults = ConstructOptions::default();
            let opts = ConstructOptions {
                max_depth: cfg.max_depth.unwrap_or(defaults.max_depth),
                max_offset: cfg.max_offset.unwrap_or(defaults.max_offset),
                max_scale: cfg.max_scale.unwrap_or(defaults.max_scale),
            };
            let c = construct_indecisive(&sys, &targets, &opts).map_err(|e| match e {
                ConstructError::SearchBudgetExceeded { .. } | ConstructError::VerificationFailed { .. } => {
                    CliError::Search(e.to_string())
                }
                ConstructError::DegenerateSystem(_) | ConstructError::Usage(_) => usage(e.to_string()),
            })?;
            emit_json(
                out,
                &OdometerConstruction {
                    point: c.point.to_string(),
                    residue: c.residue.to_string(),
                    depth: c.depth,
                    schedule,
                    realized_scales: c.realized_scales,
                },
            )?;
        }
        SystemConfig::Tent => {
            let holes = interval_holes(&cfg.holes)?;
            let targets = one_based_to_zero(&schedule, holes.len())?;
            let defaults = IntervalConstructOptions::default();
            let opts = IntervalConstructOptions {
                max_scale: cfg.max_scale.unwrap_or(defaults.max_scale),
                orbit_horizon: cfg.horizon.unwrap_or(defaults.orbit_horizon),
                ..defaults
            };
            let c = construct_indecisive_interval(&PiecewiseAffineMap::tent(), &holes, &targets, &opts)
                .map_err(|e| match e {
                    IntervalConstructError::SearchBudgetExceeded => CliError::Search(e.to_string()),
                    _ => usage(e.to_string()),
                })?;
            emit_json(
                out,
                &IntervalConstructionReport {
                    x: format_rational(&c.x),
                    schedule,
                    realized_scales: c.realized_scales,
                },
            )?;
        }
        SystemConfig::Solenoid { .. } => {
            return Err(usage(
                "construct runs on odometer or tent systems; code solenoid points with an odometer over the branching sequence",
            ))
        }
    }
    Ok(Outcome::Positive)
}

fn describe_spec(spec: &RadixSpec, out: Option<&Path>) -> Result<Outcome> {
    let m = compute_m(spec);
    let kind = if is_infinity_adic(spec) {
        "infinity-adic"
    } else {
        "not-infinity-adic"
    };
    emit(out, format!("{kind}\nM({spec}) = {m}\n").as_bytes())?;
    Ok(Outcome::Positive)
}

fn classify(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (a, b) = require(&cfg.pair, "pair")?;
    let (ma, mb) = (compute_m(&a), compute_m(&b));
    let (verdict, outcome) = match conjugacy_witness(&a, &b) {
        None => ("conjugate".to_string(), Outcome::Positive),
        Some(p) => (format!("not-conjugate witness={p}"), Outcome::Negative),
    };
    let text = format!("{verdict}\nM({a}) = {ma}\nM({b}) = {mb}\n");
    emit(cfg.output.as_deref(), text.as_bytes())?;
    Ok(outcome)
}

fn summary_path(explicit: Option<PathBuf>, out: Option<&Path>) -> Option<PathBuf> {
    explicit.or_else(|| {
        out.map(|p| {
            let stem = p.file_stem().map_or_else(|| "sample".into(), |s| s.to_string_lossy().into_owned());
            p.with_file_name(format!("{stem}.summary.json"))
        })
    })
}

fn sample(cfg: &ExperimentConfig, summary: Option<PathBuf>) -> Result<Outcome> {
    let n_max = require(&cfg.n_max, "n_max")?;
    let trials = require(&cfg.trials, "trials")?;
    let seed = cfg.seed.unwrap_or(0);
    let sys = match system(cfg)? {
        SystemConfig::Odometer { radix } => odometer_system(radix, &cfg.holes)?,
        _ => return Err(usage("sample draws points of an adding machine; use an odometer system")),
    };
    if let Validity::Degenerate(reason) = validate_system(&sys) {
        log::warn!("degenerate hole system: {reason}");
    }
    let run = sample_genericity(&sys, n_max, trials, seed, cfg.threads);
    let out = cfg.output.as_deref();
    emit(out, &report::sample_csv(&run, sys.len()))?;
    if let Some(path) = summary_path(summary, out) {
        emit(Some(&path), &report::sample_summary_json(&run, seed))?;
    }
    for h in 1..=3 {
        if let Some(f) = run.summary.fraction_indecisive(h) {
            log::info!("fraction {h}-indecisive: {f}");
        }
    }
    Ok(Outcome::Positive)
}

fn verify(cfg: &ExperimentConfig) -> Result<Outcome> {
    let out = cfg.output.as_deref();
    if let Some(schedule) = &cfg.schedule {
        let scales = require(&cfg.scales, "scales")?;
        let x_text = require(&cfg.x, "x")?;
        let ok = match system(cfg)? {
            SystemConfig::Odometer { radix } => {
                let sys = odometer_system(radix, &cfg.holes)?;
                let targets = one_based_to_zero(schedule, sys.len())?;
                let x = AdicPoint::parse(radix, &x_text).map_err(|e| usage(format!("x: {e}")))?;
                verify_schedule(&sys, &x, &targets, &scales)
            }
            SystemConfig::Tent => {
                let holes = interval_holes(&cfg.holes)?;
                let targets = one_based_to_zero(schedule, holes.len())?;
                let x = rational(&x_text, "x")?;
                let horizon = interval_horizon(cfg, &x);
                verify_interval_schedule(&PiecewiseAffineMap::tent(), &holes, &x, &targets, &scales, horizon)
            }
            SystemConfig::Solenoid { .. } => return Err(usage("verify a schedule on odometer or tent systems")),
        };
        emit(out, if ok { b"verified\n" } else { b"not-verified\n" })?;
        return Ok(if ok { Outcome::Positive } else { Outcome::Negative });
    }

    let depth = require(&cfg.depth, "depth (or a schedule)")?;
    let spec = match system(cfg)? {
        SystemConfig::Odometer { radix } => radix,
        SystemConfig::Solenoid { branching, .. } => branching,
        SystemConfig::Tent => return Err(usage("partition checks need an odometer system")),
    };
    let cells = spec.modulus(depth + 1);
    if cells > BigUint::from(MAX_PARTITION_CELLS) {
        return Err(usage(format!("m_{} = {cells} is too large to enumerate", depth + 1)));
    }
    let mut text = String::from("depth,cylinders,children,cyclic,refines\n");
    let mut ok = true;
    for i in 0..=depth {
        let r = partition_report(spec, i);
        ok &= r.ok();
        text.push_str(&format!(
            "{i},{},{},{},{}\n",
            r.cylinders, r.children_per_cylinder, r.cyclic as u8, r.refines as u8
        ));
    }
    emit(out, text.as_bytes())?;
    Ok(if ok { Outcome::Positive } else { Outcome::Negative })
}

fn solenoid_check(cfg: &ExperimentConfig) -> Result<Outcome> {
    let (branching, stage) = match system(cfg)? {
        SystemConfig::Solenoid { branching, stage } => (branching, *stage),
        _ => return Err(usage("solenoid needs a solenoid system (or --branching/--stage)")),
    };
    if stage == 0 {
        return Err(usage("stage must be at least 1"));
    }
    let model = build_solenoid(branching, stage).map_err(|e| usage(e.to_string()))?;
    let ok = verify_solenoid_structure(&model, stage);
    emit(cfg.output.as_deref(), &report::solenoid_csv(&model, stage))?;
    if ok {
        eprintln!("stages 0..={stage}: structure verified");
        Ok(Outcome::Positive)
    } else {
        eprintln!("stages 0..={stage}: structure check failed");
        Ok(Outcome::Negative)
    }
}

fn tent(op: TentOp, cfg: &ExperimentConfig) -> Result<Outcome> {
    let map = PiecewiseAffineMap::tent();
    let err = |e: odesc::interval::IntervalError| usage(e.to_string());
    let text = match op {
        TentOp::Orbit { x } => {
            let x = rational(&x, "x")?;
            let orbit = Orbit::compute(&map, &x, interval_horizon(cfg, &x)).map_err(err)?;
            let mut text: String = orbit.points.iter().map(|p| format_rational(p) + "\n").collect();
            if !orbit.closed {
                text.push_str("...\n");
            }
            text
        }
        TentOp::Preimages { y, depth } => {
            let y = rational(&y, "y")?;
            backward_level(&map, &y, depth)
                .map_err(err)?
                .iter()
                .map(|p| format_rational(p) + "\n")
                .collect()
        }
        TentOp::Gap { y, depth } => {
            let y = rational(&y, "y")?;
            format_rational(&backward_gap(&map, &y, depth).map_err(err)?) + "\n"
        }
        TentOp::Hit { x, lo, hi } => {
            let x = rational(&x, "x")?;
            let hole = OpenInterval::new(rational(&lo, "lo")?, rational(&hi, "hi")?);
            match first_hit_interval(&map, &x, &hole, interval_horizon(cfg, &x)).map_err(err)? {
                IntervalHit::Hit(k) => format!("{k}\n"),
                IntervalHit::NeverHits => "inf\n".into(),
                IntervalHit::Undecided => "undecided\n".into(),
            }
        }
    };
    emit(cfg.output.as_deref(), text.as_bytes())?;
    Ok(Outcome::Positive)
}
