use odesc::escape::{derive_seed, sample_genericity, winner_trace, HoleSystem, RadiusSchedule};
use odesc::{AdicPoint, RadixSpec};

fn system(spec: &str, centers: &[&str]) -> HoleSystem {
    let spec: RadixSpec = spec.parse().unwrap();
    let points = centers.iter().map(|c| AdicPoint::parse(&spec, c).unwrap()).collect();
    HoleSystem::new(spec, points, vec![RadiusSchedule::dyadic(); centers.len()]).unwrap()
}

#[test]
fn thread_count_does_not_change_results() {
    let sys = system("2", &["digits:0", "digits:1,0"]);
    let sequential = sample_genericity(&sys, 16, 64, 11, None);
    let parallel = sample_genericity(&sys, 16, 64, 11, Some(4));
    assert_eq!(sequential, parallel);
    assert_eq!(sequential, sample_genericity(&sys, 16, 64, 11, Some(1)));
    assert_ne!(sequential, sample_genericity(&sys, 16, 64, 12, None));
}

#[test]
fn records_match_individual_traces() {
    let sys = system("2,3", &["digits:0", "digits:1|0", "digits:|1"]);
    let run = sample_genericity(&sys, 10, 8, 3, Some(2));
    for record in &run.records {
        assert_eq!(record.point_seed, derive_seed(3, record.trial));
        let x = AdicPoint::sampled(sys.spec().clone(), record.point_seed);
        let stats = winner_trace(&sys, &x, 10).stats();
        assert_eq!(stats.switch_count, record.switch_count);
        assert_eq!(stats.wins, record.wins);
    }
    let summary = &run.summary;
    assert_eq!(summary.switch_histogram.iter().sum::<u64>(), 8);
    for histogram in &summary.win_histograms {
        assert_eq!(histogram.iter().sum::<u64>(), 8);
    }
}

#[test]
fn single_hole_is_always_indecisive() {
    let sys = system("2", &["digits:1|0"]);
    let run = sample_genericity(&sys, 6, 20, 5, None);
    for h in 1..=3 {
        assert_eq!(run.summary.fraction_indecisive(h), Some(1.0));
    }
    assert_eq!(run.summary.switch_histogram[0], 20);
}

#[test]
fn zero_trials() {
    let sys = system("2", &["digits:0", "digits:1,0"]);
    let run = sample_genericity(&sys, 6, 0, 5, Some(3));
    assert!(run.records.is_empty());
    assert_eq!(run.summary.trials, 0);
    assert_eq!(run.summary.fraction_indecisive(1), None);
}

#[test]
fn seeds_are_distinct_per_trial() {
    let seeds: std::collections::BTreeSet<u64> = (0..1000).map(|t| derive_seed(0, t)).collect();
    assert_eq!(seeds.len(), 1000);
}
