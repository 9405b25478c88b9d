//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use odesc::escape::{
    construct_indecisive, hit_vector, validate_system, verify_schedule, winner_trace, ConstructOptions,
    HoleSystem, RadiusSchedule, Validity,
};
use odesc::interval::{
    backward_gap, build_solenoid, first_hit_interval, verify_solenoid_structure, IntervalHit, OpenInterval,
    PiecewiseAffineMap,
};
use odesc::odometer::{
    distance, first_hit, first_hit_bruteforce, translate, verify_cyclic_partition, BruteForceHit,
};
use odesc::rational::rat;
use odesc::{compute_m, conjugacy_witness, is_infinity_adic, AdicPoint, Cylinder, RadixSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn spec(text: &str) -> RadixSpec {
    text.parse().expect("valid spec")
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Exact point with random digits; tail digits stay below 2 so any radix accepts them.
fn random_exact(rng: &mut ChaCha8Rng, spec: &RadixSpec) -> AdicPoint {
    let pre_len = rng.gen_range(0..6);
    let period_len = rng.gen_range(1..4);
    let pre = (1..=pre_len).map(|n| rng.gen_range(0..spec.radix_at(n))).collect();
    let period = (0..period_len).map(|_| rng.gen_range(0..2)).collect();
    AdicPoint::exact(spec.clone(), pre, period).expect("digits in range")
}

fn random_point(rng: &mut ChaCha8Rng, spec: &RadixSpec) -> AdicPoint {
    if rng.gen_bool(0.5) {
        random_exact(rng, spec)
    } else {
        AdicPoint::sampled(spec.clone(), rng.gen())
    }
}

fn pool() -> Vec<RadixSpec> {
    let mut specs: Vec<RadixSpec> = ["2", "3", "10", "2,3", "2,3|4", "5|2,7", "6"].map(spec).to_vec();
    specs.push(RadixSpec::factorial());
    specs.push(RadixSpec::primes());
    specs
}

fn oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let specs = pool();
    let limit = BigUint::from(100_000u32);
    let start = Instant::now();
    for case in 0..1000 {
        let s = &specs[rng.gen_range(0..specs.len())];
        let max_depth = (0..).take_while(|&l| s.modulus(l) <= limit).last().unwrap();
        let depth = rng.gen_range(0..=max_depth);
        let m = s.modulus(depth).to_u64().unwrap();
        let cylinder = Cylinder::new(s.clone(), depth, BigUint::from(rng.gen_range(0..m))).unwrap();
        let x = random_point(&mut rng, s);
        let closed = first_hit(&x, &cylinder);
        let brute = first_hit_bruteforce(&x, &cylinder, m);
        check(brute == BruteForceHit::Hit(closed.to_u64().unwrap()), || {
            format!("case {case}: spec {s}, depth {depth}, x {x}: closed form {closed}, brute force {brute:?}")
        })?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))?;
    Ok(format!("1000 cases agree in {:.2?}", elapsed))
}

fn isometry_and_partition() -> Outcome {
    let specs = ["2", "2,3", "10", "2,3|4"].map(spec);
    for s in &specs {
        for i in 0..=6 {
            check(verify_cyclic_partition(s, i), || format!("partition fails for {s} at depth {i}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let one = BigInt::one();
    for pair in 0..1000 {
        let s = &specs[pair % specs.len()];
        let (x, y) = (random_exact(&mut rng, s), random_exact(&mut rng, s));
        let (fx, fy) = (translate(&x, &one).unwrap(), translate(&y, &one).unwrap());
        let before = distance(&x, &y, 64);
        let after = distance(&fx, &fy, 64);
        check(before == after, || format!("{s}: d({x}, {y}) = {before:?} but d(fx, fy) = {after:?}"))?;
    }
    Ok("4 specs x depths 0..=6 partitioned, 1000 pairs isometric".into())
}

fn equidistribution() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let limit = BigUint::from(4096u32);
    let mut checked = 0;
    for s in pool() {
        for depth in (1..).take_while(|&l| s.modulus(l) <= limit) {
            let m = s.modulus(depth).to_usize().unwrap();
            for _ in 0..2 {
                let x = random_point(&mut rng, &s);
                let mut visits = vec![0u32; m];
                let mut prefix = x.prefix(depth);
                for _ in 0..m {
                    visits[prefix.to_residue().to_usize().unwrap()] += 1;
                    prefix.increment();
                }
                check(visits.iter().all(|&v| v == 1), || {
                    format!("{s} depth {depth}: x = {x} visits unevenly")
                })?;
                checked += 1;
            }
            // Cross-check the stepped prefix against the group translation.
            let x = random_exact(&mut rng, &s);
            let k = rng.gen_range(0..m as i64);
            let moved = translate(&x, &BigInt::from(k)).unwrap();
            let expected = (x.residue(depth) + BigUint::from(k as u64)) % BigUint::from(m);
            check(moved.residue(depth) == expected, || format!("{s}: translate disagrees at depth {depth}"))?;
        }
    }
    Ok(format!("{checked} orbits visit every cylinder exactly once"))
}

fn worked_system() -> HoleSystem {
    let s = spec("2");
    HoleSystem::new(
        s.clone(),
        vec![AdicPoint::zero(s.clone()), AdicPoint::parse(&s, "digits:1,0").unwrap()],
        vec![RadiusSchedule::dyadic(), RadiusSchedule::dyadic()],
    )
    .unwrap()
}

/// Winner at scale `n` from iterated digit stepping; `None` when a tie.
fn brute_force_winner(sys: &HoleSystem, x: &AdicPoint, n: usize) -> Option<Option<usize>> {
    let mut taus = Vec::new();
    for hole in sys.holes(n) {
        let m = hole.modulus().to_u64().filter(|&m| m <= 1 << 16)?;
        match first_hit_bruteforce(x, &hole, m) {
            BruteForceHit::Hit(k) => taus.push(k),
            BruteForceHit::NotFoundWithinHorizon => return Some(None),
        }
    }
    let best = *taus.iter().min()?;
    let winners: Vec<usize> = (0..taus.len()).filter(|&i| taus[i] == best).collect();
    Some((winners.len() == 1).then(|| winners[0]))
}

fn worked_trace() -> Outcome {
    let sys = worked_system();
    let x = AdicPoint::from_residue(spec("2"), &BigUint::from(9u32), 6).unwrap();
    check(x.residue(6) == BigUint::from(9u32), || "x is not 9 mod 64".into())?;
    let trace = winner_trace(&sys, &x, 6);
    let winners: Vec<usize> = trace.winners().iter().map(|w| w.map_or(0, |i| i + 1)).collect();
    check(winners == [2, 2, 2, 1, 2, 2], || format!("winners {winners:?}"))?;
    let switches = trace.stats().switch_count;
    check(switches == 2, || format!("switch count {switches}"))?;
    for n in 1..=6 {
        let brute = brute_force_winner(&sys, &x, n);
        check(brute == Some(trace.records[n - 1].winner), || format!("scale {n}: oracle says {brute:?}"))?;
    }
    Ok("winners [2,2,2,1,2,2], 2 switches, oracle agrees".into())
}

fn constructor_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let specs = ["2", "3", "2,3", "2|3", "5"].map(spec);
    let schedules = [
        RadiusSchedule::dyadic(),
        RadiusSchedule::geometric(rat(1, 3), rat(1, 2)),
        RadiusSchedule::geometric(rat(1, 1), rat(1, 3)),
        RadiusSchedule::geometric(rat(2, 1), rat(1, 4)),
    ];
    let mut slowest = Duration::ZERO;
    let mut cases = 0;
    while cases < 20 {
        let s = &specs[rng.gen_range(0..specs.len())];
        let n = rng.gen_range(2..=4);
        let centers = (0..n).map(|_| random_exact(&mut rng, s)).collect();
        let radii = (0..n).map(|_| schedules[rng.gen_range(0..schedules.len())].clone()).collect();
        let Ok(sys) = HoleSystem::new(s.clone(), centers, radii) else {
            continue;
        };
        if validate_system(&sys) != Validity::Generic {
            continue;
        }
        cases += 1;
        let len = rng.gen_range(1..=8);
        let schedule: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
        let start = Instant::now();
        let result = construct_indecisive(&sys, &schedule, &ConstructOptions::default());
        let elapsed = start.elapsed();
        slowest = slowest.max(elapsed);
        check(elapsed < Duration::from_secs(1), || format!("case {cases} took {elapsed:?}"))?;
        let c = result.map_err(|e| format!("case {cases}, schedule {schedule:?}: {e}"))?;
        check(verify_schedule(&sys, &c.point, &schedule, &c.realized_scales), || {
            format!("case {cases}: returned point fails verification")
        })?;
        for (&scale, &target) in c.realized_scales.iter().zip(&schedule) {
            check(hit_vector(&sys, &c.point, scale).winner == Some(target), || {
                format!("case {cases}: wrong winner at scale {scale}")
            })?;
            if let Some(w) = brute_force_winner(&sys, &c.point, scale) {
                check(w == Some(target), || format!("case {cases}: oracle disagrees at scale {scale}"))?;
            }
        }
    }
    Ok(format!("20 systems realized and verified, slowest {slowest:.2?}"))
}

fn classifier_table() -> Outcome {
    let rows = [
        ("2", "4", None),
        ("2", "3", Some(2)),
        ("2,3", "6", None),
        ("2|3", "6", Some(2)),
    ];
    for (a, b, expected) in rows {
        let got = conjugacy_witness(&spec(a), &spec(b));
        check(got == expected, || format!("({a}, {b}): expected {expected:?}, got {got:?}"))?;
    }
    check(is_infinity_adic(&RadixSpec::factorial()), || "factorial is not infinity-adic".into())?;
    check(!is_infinity_adic(&RadixSpec::primes()), || "primes reported infinity-adic".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let pre = (0..rng.gen_range(0..4)).map(|_| rng.gen_range(2..40)).collect();
        let period = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(2..40)).collect();
        let s = RadixSpec::periodic(pre, period).unwrap();
        check(!is_infinity_adic(&s), || format!("{s} reported infinity-adic ({})", compute_m(&s)))?;
    }
    Ok("4 pairs, factorial, primes and 200 periodic specs as expected".into())
}

fn tent_backward_density() -> Outcome {
    let tent = PiecewiseAffineMap::tent();
    for y in [rat(1, 2), rat(1, 3), rat(2, 5)] {
        for d in 0..=16 {
            let gap = backward_gap(&tent, &y, d).map_err(|e| e.to_string())?;
            let bound = BigRational::new(BigInt::from(2), BigInt::one() << d);
            check(gap <= bound, || format!("y = {y}, d = {d}: gap {gap} > {bound}"))?;
        }
    }
    Ok("gaps within 2^(1-d) for d <= 16".into())
}

/// First hit by plain iteration of `x -> min(2x, 2 - 2x)`, up to `steps` iterates.
fn tent_hit_by_iteration(x: &BigRational, hole: &OpenInterval, steps: u64) -> Option<u64> {
    let two = BigRational::from_integer(BigInt::from(2));
    let mut y = x.clone();
    for k in 0..=steps {
        if hole.contains(&y) {
            return Some(k);
        }
        let doubled = &y * &two;
        y = if doubled <= BigRational::one() { doubled } else { &two - doubled };
    }
    None
}

fn tent_decision_completeness() -> Outcome {
    let tent = PiecewiseAffineMap::tent();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut hits, mut nevers) = (0, 0);
    for case in 0..500 {
        let q: i64 = rng.gen_range(1..=10_000);
        let p = rng.gen_range(0..=q);
        let x = rat(p, q);
        let reduced_q = q / p.gcd(&q);
        let hq: i64 = rng.gen_range(2..=1000);
        let center = rat(rng.gen_range(1..hq), hq);
        let radius = rat(1, rng.gen_range(2..=2000));
        let hole = OpenInterval::new(&center - &radius, &center + &radius);
        let horizon = reduced_q as u64 + 2;
        let got = first_hit_interval(&tent, &x, &hole, horizon).map_err(|e| e.to_string())?;
        let expected = tent_hit_by_iteration(&x, &hole, horizon);
        match (got, expected) {
            (IntervalHit::Hit(k), Some(e)) if k == e => hits += 1,
            (IntervalHit::NeverHits, None) => nevers += 1,
            _ => return Err(format!("case {case}: x = {x}, hole {hole}: got {got:?}, iteration says {expected:?}")),
        }
    }
    Ok(format!("500 cases decided ({hits} hits, {nevers} never), none undecided"))
}

fn solenoid_structure() -> Outcome {
    let model = build_solenoid(&spec("2"), 10).map_err(|e| e.to_string())?;
    check(verify_solenoid_structure(&model, 10), || "structure check fails at stage 10".into())?;
    let count = model.stage(10).map_or(0, |s| s.len());
    check(count == 1024, || format!("stage 10 has {count} intervals"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 1..=10 {
        let stage = model.stage(k).unwrap();
        let m = stage.len();
        for _ in 0..1000 {
            let r = rng.gen_range(0..m);
            let interval = &stage[r];
            let t = rat(rng.gen_range(0..=1000), 1000);
            let x = &interval.left + t * interval.length();
            let label = model.itinerary(&x, k).map_err(|e| e.to_string())?;
            check(label == r, || format!("stage {k}: {x} coded {label}, expected {r}"))?;
            let image = model.stage_map(&x, k).map_err(|e| e.to_string())?;
            let next = model.itinerary(&image, k).map_err(|e| e.to_string())?;
            check(next == (r + 1) % m, || format!("stage {k}: itinerary of f({x}) is {next}, expected {}", (r + 1) % m))?;
            if k > 1 {
                let parent = model.itinerary(&x, k - 1).map_err(|e| e.to_string())?;
                check(parent == r % (m / 2), || format!("stage {k}: {x} not nested in parent"))?;
            }
        }
    }
    Ok("stage 10 verified, 1000 points per stage intertwine with +1".into())
}

fn sample_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("sample.json");
    std::fs::write(
        &config,
        r#"{
            "system": {"kind": "odometer", "radix": "2,3"},
            "holes": [
                {"center": "digits:0", "schedule": {"kind": "geometric", "c": "1", "lambda": "1/2"}},
                {"center": "digits:1,0", "schedule": {"kind": "geometric", "c": "1", "lambda": "1/3"}},
                {"center": "digits:1,1|1", "schedule": {"kind": "harmonic", "c": "1/2"}}
            ],
            "action": "sample",
            "n_max": 24,
            "trials": 300,
            "seed": 42
        }"#,
    )
    .map_err(|e| e.to_string())?;
    let run = |name: &str, threads: &str| -> Result<Vec<u8>, String> {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_odesc"))
            .args(["--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .args(["--threads", threads, "sample"])
            .status()
            .map_err(|e| e.to_string())?;
        check(status.success(), || format!("sample exited with {status}"))?;
        std::fs::read(&out).map_err(|e| e.to_string())
    };
    let first = run("a.csv", "1")?;
    let again = run("b.csv", "1")?;
    let threaded = run("c.csv", "4")?;
    let threaded_again = run("d.csv", "3")?;
    check(first == again, || "repeated runs differ".into())?;
    check(first == threaded && first == threaded_again, || "thread count changes the output".into())?;
    check(first.iter().filter(|&&b| b == b'\n').count() == 301, || "unexpected row count".into())?;
    Ok("4 runs (threads 1, 1, 4, 3) byte-identical".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_equivalence),
        ("isometry and cyclic partition", isometry_and_partition),
        ("equidistribution", equidistribution),
        ("worked trace", worked_trace),
        ("constructor soundness", constructor_soundness),
        ("classifier table", classifier_table),
        ("tent backward density", tent_backward_density),
        ("tent decision completeness", tent_decision_completeness),
        ("solenoid structure", solenoid_structure),
        ("sample determinism", sample_determinism),
    ];
    let mut failed = 0;
    let mut stdout = std::io::stdout().lock();
    for (i, (name, criterion)) in criteria.iter().enumerate() {
        let result = std::panic::catch_unwind(criterion).unwrap_or_else(|_| Err("panicked".into()));
        let line = match result {
            Ok(detail) => format!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                format!("FAIL {:>2} {name}: {why}", i + 1)
            }
        };
        writeln!(stdout, "{line}").unwrap();
        stdout.flush().unwrap();
    }
    writeln!(stdout, "{} of {} criteria passed", criteria.len() - failed, criteria.len()).unwrap();
    if failed > 0 {
        std::process::exit(1);
    }
}
