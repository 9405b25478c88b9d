//! Competing shrinking holes on an adding machine.
//!
//! At scale `n` hole `i` is the ball of radius `rho_i(n)` around center
//! `p_i`, i.e. a cylinder. The first-hit time of every hole is available in
//! closed form, so winners (the unique strict minimizer of the hit times)
//! can be traced exactly along any horizon.

mod construct;
mod sample;
mod schedule;

use std::fmt;

use num_bigint::BigUint;
use thiserror::Error;

use crate::odometer::{self, AdicPoint, Cylinder, OrbitRelation, UltraDistance};
use crate::radix::RadixSpec;

pub use construct::{construct_indecisive, verify_schedule, ConstructError, Construction, ConstructOptions};
pub use sample::{derive_seed, sample_genericity, SampleRun, SampleSummary, TrialRecord};
pub use schedule::RadiusSchedule;

/// Depth used to certify that two sampled centers differ.
pub const SAMPLED_DISTINCTNESS_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EscapeError {
    #[error("a hole system needs at least one hole")]
    NoHoles,
    #[error("{centers} centers but {schedules} radius schedules")]
    LengthMismatch { centers: usize, schedules: usize },
    #[error("center {index} lives on a different radix sequence")]
    SpecMismatch { index: usize },
    #[error("centers {first} and {second} coincide")]
    CoincidentCenters { first: usize, second: usize },
    #[error("schedule of hole {index} is invalid: {reason}")]
    InvalidSchedule { index: usize, reason: String },
    #[error("hole index {index} is out of range for {holes} holes")]
    HoleOutOfRange { index: usize, holes: usize },
    #[error("the hole schedule to realize is empty")]
    EmptyTargetSchedule,
}

/// `N` holes on `Δ_α`: centers with radius schedules.
#[derive(Debug, Clone)]
pub struct HoleSystem {
    spec: RadixSpec,
    centers: Vec<AdicPoint>,
    schedules: Vec<RadiusSchedule>,
}

impl HoleSystem {
    pub fn new(
        spec: RadixSpec,
        centers: Vec<AdicPoint>,
        schedules: Vec<RadiusSchedule>,
    ) -> Result<Self, EscapeError> {
        if centers.is_empty() {
            return Err(EscapeError::NoHoles);
        }
        if centers.len() != schedules.len() {
            return Err(EscapeError::LengthMismatch {
                centers: centers.len(),
                schedules: schedules.len(),
            });
        }
        if let Some(index) = centers.iter().position(|c| c.spec() != &spec) {
            return Err(EscapeError::SpecMismatch { index });
        }
        for (index, schedule) in schedules.iter().enumerate() {
            let warnings = schedule
                .validate()
                .map_err(|reason| EscapeError::InvalidSchedule { index, reason })?;
            for w in warnings {
                log::warn!("hole {index}: {w}");
            }
        }
        for i in 0..centers.len() {
            for j in i + 1..centers.len() {
                let d = odometer::distance(&centers[i], &centers[j], SAMPLED_DISTINCTNESS_DEPTH);
                if !matches!(d, UltraDistance::Exp(_)) {
                    return Err(EscapeError::CoincidentCenters { first: i, second: j });
                }
            }
        }
        Ok(HoleSystem {
            spec,
            centers,
            schedules,
        })
    }

    pub fn spec(&self) -> &RadixSpec {
        &self.spec
    }

    pub fn centers(&self) -> &[AdicPoint] {
        &self.centers
    }

    pub fn schedules(&self) -> &[RadiusSchedule] {
        &self.schedules
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Cylinder depths `L_i(n)` of all holes at scale `n`.
    pub fn depths(&self, n: usize) -> Vec<usize> {
        self.schedules
            .iter()
            .map(|s| odometer::radius_depth(&s.radius(n)).expect("validated radii are positive"))
            .collect()
    }

    /// The holes at scale `n` as cylinders.
    pub fn holes(&self, n: usize) -> Vec<Cylinder> {
        self.depths(n)
            .into_iter()
            .zip(&self.centers)
            .map(|(depth, center)| Cylinder::around(center, depth))
            .collect()
    }
}

/// Why a hole system fails the genericity precondition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Degeneracy {
    Coincident { first: usize, second: usize },
    /// `centers[second] = f^shift(centers[first])`.
    SameOrbit { first: usize, second: usize, shift: num_bigint::BigInt },
    /// Orbit relations cannot be decided for sampled centers.
    Undecidable { first: usize, second: usize },
}

impl fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degeneracy::Coincident { first, second } => {
                write!(f, "centers {} and {} coincide", first + 1, second + 1)
            }
            Degeneracy::SameOrbit { first, second, shift } => write!(
                f,
                "center {} is the image of center {} under f^{}",
                second + 1,
                first + 1,
                shift
            ),
            Degeneracy::Undecidable { first, second } => write!(
                f,
                "orbit relation of centers {} and {} is undecidable (sampled point)",
                first + 1,
                second + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Generic,
    Degenerate(Degeneracy),
}

/// Generic iff the centers are pairwise distinct and pairwise on distinct orbits.
pub fn validate_system(sys: &HoleSystem) -> Validity {
    let centers = &sys.centers;
    for i in 0..centers.len() {
        for j in i + 1..centers.len() {
            match odometer::same_orbit(&centers[i], &centers[j]) {
                Ok(OrbitRelation::DistinctOrbits) => {}
                Ok(OrbitRelation::SameOrbit(shift)) if shift == 0.into() => {
                    return Validity::Degenerate(Degeneracy::Coincident { first: i, second: j })
                }
                Ok(OrbitRelation::SameOrbit(shift)) => {
                    return Validity::Degenerate(Degeneracy::SameOrbit {
                        first: i,
                        second: j,
                        shift,
                    })
                }
                Err(_) => {
                    return Validity::Degenerate(Degeneracy::Undecidable { first: i, second: j })
                }
            }
        }
    }
    Validity::Generic
}

/// A first-hit time; `Never` realizes `min ∅ = +∞`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HitTime {
    At(BigUint),
    Never,
    /// The search horizon ran out before the answer was known.
    Undecided,
}

impl HitTime {
    pub fn at(k: u64) -> Self {
        HitTime::At(BigUint::from(k))
    }
}

impl fmt::Display for HitTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HitTime::At(k) => write!(f, "{k}"),
            HitTime::Never => f.write_str("inf"),
            HitTime::Undecided => f.write_str("undecided"),
        }
    }
}

/// Index `i` with `τ_i < τ_j` for every `j ≠ i`, where the minimum over no
/// competitors is `+∞`. Ties and undecided entries give `None`.
pub fn winner(taus: &[HitTime]) -> Option<usize> {
    if taus.contains(&HitTime::Undecided) {
        return None;
    }
    let (best, best_tau) = taus.iter().enumerate().min_by(|a, b| a.1.cmp(b.1))?;
    if *best_tau == HitTime::Never {
        return None;
    }
    let tied = taus.iter().filter(|t| *t == best_tau).count() > 1;
    (!tied).then_some(best)
}

/// Hit data for one scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaleRecord {
    pub n: usize,
    /// Cylinder depths of the holes; empty for interval holes.
    pub depths: Vec<usize>,
    pub taus: Vec<HitTime>,
    pub winner: Option<usize>,
    /// Some pair of holes intersects.
    pub overlap: bool,
    /// Some hole is the whole space; excluded from statistics.
    pub coarse: bool,
}

impl ScaleRecord {
    fn from_taus(n: usize, depths: Vec<usize>, taus: Vec<HitTime>, overlap: bool, coarse: bool) -> Self {
        let winner = winner(&taus);
        ScaleRecord {
            n,
            depths,
            taus,
            winner,
            overlap,
            coarse,
        }
    }

    /// Some hit time is undecided.
    pub fn indeterminate(&self) -> bool {
        self.taus.contains(&HitTime::Undecided)
    }

    /// Whether the scale takes part in switch and win counts.
    pub fn counted(&self) -> bool {
        !self.coarse && !self.indeterminate()
    }
}

/// Hit times of every hole at scale `n` for the point `x`.
pub fn hit_vector(sys: &HoleSystem, x: &AdicPoint, n: usize) -> ScaleRecord {
    let holes = sys.holes(n);
    let taus = holes
        .iter()
        .map(|c| HitTime::At(odometer::first_hit(x, c)))
        .collect();
    let overlap = holes
        .iter()
        .enumerate()
        .any(|(i, a)| holes[i + 1..].iter().any(|b| a.intersects(b)));
    let depths: Vec<usize> = holes.iter().map(Cylinder::depth).collect();
    let coarse = depths.contains(&0);
    ScaleRecord::from_taus(n, depths, taus, overlap, coarse)
}

/// Per-scale records for `n = 1..=n_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinnerTrace {
    pub holes: usize,
    pub records: Vec<ScaleRecord>,
}

impl WinnerTrace {
    pub fn new(holes: usize, records: Vec<ScaleRecord>) -> Self {
        WinnerTrace { holes, records }
    }

    pub fn winners(&self) -> Vec<Option<usize>> {
        self.records.iter().map(|r| r.winner).collect()
    }

    pub fn stats(&self) -> IndecisivenessStats {
        indecisiveness_stats(self)
    }
}

pub fn winner_trace(sys: &HoleSystem, x: &AdicPoint, n_max: usize) -> WinnerTrace {
    let records = (1..=n_max).map(|n| hit_vector(sys, x, n)).collect();
    WinnerTrace::new(sys.len(), records)
}

/// Finite-horizon surrogate for membership in every `𝔗(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndecisivenessStats {
    /// Changes of winner between consecutive decided scales.
    pub switch_count: usize,
    pub wins: Vec<usize>,
}

impl IndecisivenessStats {
    /// Every hole wins at least `h` scales.
    pub fn is_h_indecisive(&self, h: usize) -> bool {
        self.wins.iter().all(|&w| w >= h)
    }
}

pub fn indecisiveness_stats(trace: &WinnerTrace) -> IndecisivenessStats {
    let mut wins = vec![0; trace.holes];
    let mut switch_count = 0;
    let mut previous = None;
    for winner in trace
        .records
        .iter()
        .filter(|r| r.counted())
        .filter_map(|r| r.winner)
    {
        wins[winner] += 1;
        if previous.is_some_and(|p| p != winner) {
            switch_count += 1;
        }
        previous = Some(winner);
    }
    IndecisivenessStats { switch_count, wins }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use num_bigint::BigInt;

    fn dyadic() -> RadixSpec {
        RadixSpec::constant(2).unwrap()
    }

    fn pt(text: &str) -> AdicPoint {
        AdicPoint::parse(&dyadic(), text).unwrap()
    }

    fn worked_system() -> HoleSystem {
        HoleSystem::new(
            dyadic(),
            vec![AdicPoint::zero(dyadic()), pt("digits:1,0")],
            vec![RadiusSchedule::dyadic(), RadiusSchedule::dyadic()],
        )
        .unwrap()
    }

    fn nine() -> AdicPoint {
        AdicPoint::from_residue(dyadic(), &BigUint::from(9u32), 6).unwrap()
    }

    fn taus(values: &[u64]) -> Vec<HitTime> {
        values.iter().map(|&v| HitTime::at(v)).collect()
    }

    #[test]
    fn winner_rule() {
        assert_eq!(winner(&taus(&[7, 12])), Some(0));
        assert_eq!(winner(&taus(&[3, 3])), None);
        assert_eq!(winner(&taus(&[5])), Some(0));
        assert_eq!(winner(&[HitTime::Never]), None);
        assert_eq!(winner(&[HitTime::Never, HitTime::at(4)]), Some(1));
        assert_eq!(winner(&[HitTime::Never, HitTime::Never]), None);
        assert_eq!(winner(&[HitTime::at(1), HitTime::Undecided]), None);
        assert_eq!(winner(&[]), None);
        assert_eq!(winner(&taus(&[4, 2, 2])), None);
        assert_eq!(winner(&taus(&[4, 2, 3])), Some(1));
    }

    #[test]
    fn worked_hit_vectors() {
        let sys = worked_system();
        let r = hit_vector(&sys, &nine(), 4);
        assert_eq!(r.taus, taus(&[7, 12]));
        assert_eq!(r.winner, Some(0));
        assert!(!r.overlap);
        assert_eq!(r.depths, vec![4, 4]);
        let r = hit_vector(&sys, &nine(), 2);
        assert_eq!(r.taus, taus(&[3, 0]));
        assert_eq!(r.winner, Some(1));
    }

    #[test]
    fn whole_space_holes_overlap() {
        let big = RadiusSchedule::Explicit {
            values: vec![rat(2, 1)],
            lambda: rat(1, 2),
        };
        let sys = HoleSystem::new(
            dyadic(),
            vec![AdicPoint::zero(dyadic()), pt("digits:1,0")],
            vec![big.clone(), big],
        )
        .unwrap();
        let r = hit_vector(&sys, &nine(), 1);
        assert!(r.overlap && r.coarse);
        assert_eq!(r.taus, taus(&[0, 0]));
        assert_eq!(r.winner, None);
    }

    #[test]
    fn worked_trace() {
        let sys = worked_system();
        let trace = winner_trace(&sys, &nine(), 6);
        let t1: Vec<HitTime> = trace.records.iter().map(|r| r.taus[0].clone()).collect();
        let t2: Vec<HitTime> = trace.records.iter().map(|r| r.taus[1].clone()).collect();
        assert_eq!(t1, taus(&[1, 3, 7, 7, 23, 55]));
        assert_eq!(t2, taus(&[0, 0, 4, 12, 12, 12]));
        let winners: Vec<Option<usize>> = [1, 1, 1, 0, 1, 1].into_iter().map(Some).collect();
        assert_eq!(trace.winners(), winners);
        assert_eq!(winner_trace(&sys, &nine(), 1).winners(), vec![Some(1)]);

        let stats = trace.stats();
        assert_eq!(stats.switch_count, 2);
        assert_eq!(stats.wins, vec![1, 5]);
        assert!(stats.is_h_indecisive(1));
        assert!(!stats.is_h_indecisive(2));
    }

    #[test]
    fn single_hole_always_wins() {
        let sys = HoleSystem::new(dyadic(), vec![pt("digits:1,1|0")], vec![RadiusSchedule::dyadic()])
            .unwrap();
        let trace = winner_trace(&sys, &AdicPoint::sampled(dyadic(), 3), 5);
        assert_eq!(trace.winners(), vec![Some(0); 5]);
        assert_eq!(trace.stats().switch_count, 0);
    }

    #[test]
    fn stats_edge_cases() {
        let record = |w: Option<usize>| ScaleRecord {
            n: 1,
            depths: vec![1, 1],
            taus: vec![],
            winner: w,
            overlap: false,
            coarse: false,
        };
        let trace = WinnerTrace::new(2, vec![record(Some(0)); 3]);
        let stats = trace.stats();
        assert_eq!(stats.switch_count, 0);
        assert!(!stats.is_h_indecisive(1));

        let empty = WinnerTrace::new(2, vec![]);
        assert_eq!(empty.stats().switch_count, 0);
        assert!(!empty.stats().is_h_indecisive(1));

        // Ties are skipped: 1, None, 1, 0 switches once.
        let trace = WinnerTrace::new(
            2,
            vec![record(Some(1)), record(None), record(Some(1)), record(Some(0))],
        );
        assert_eq!(trace.stats().switch_count, 1);

        let mut coarse = record(Some(0));
        coarse.coarse = true;
        let trace = WinnerTrace::new(2, vec![record(Some(1)), coarse, record(Some(1))]);
        assert_eq!(trace.stats().switch_count, 0);
        assert_eq!(trace.stats().wins, vec![0, 2]);
    }

    #[test]
    fn validation_examples() {
        assert_eq!(validate_system(&worked_system()), Validity::Generic);
        let degenerate = HoleSystem::new(
            dyadic(),
            vec![AdicPoint::zero(dyadic()), pt("digits:1")],
            vec![RadiusSchedule::dyadic(), RadiusSchedule::dyadic()],
        )
        .unwrap();
        assert_eq!(
            validate_system(&degenerate),
            Validity::Degenerate(Degeneracy::SameOrbit {
                first: 0,
                second: 1,
                shift: BigInt::from(-1)
            })
        );
        let single =
            HoleSystem::new(dyadic(), vec![pt("digits:1,0")], vec![RadiusSchedule::dyadic()]).unwrap();
        assert_eq!(validate_system(&single), Validity::Generic);
    }

    #[test]
    fn system_construction_errors() {
        let z = AdicPoint::zero(dyadic());
        assert_eq!(
            HoleSystem::new(dyadic(), vec![], vec![]).unwrap_err(),
            EscapeError::NoHoles
        );
        assert_eq!(
            HoleSystem::new(dyadic(), vec![z.clone(), z.clone()], vec![RadiusSchedule::dyadic(); 2])
                .unwrap_err(),
            EscapeError::CoincidentCenters { first: 0, second: 1 }
        );
        assert!(matches!(
            HoleSystem::new(dyadic(), vec![z.clone()], vec![]).unwrap_err(),
            EscapeError::LengthMismatch { .. }
        ));
        let other = AdicPoint::zero(RadixSpec::constant(3).unwrap());
        assert_eq!(
            HoleSystem::new(dyadic(), vec![other], vec![RadiusSchedule::dyadic()]).unwrap_err(),
            EscapeError::SpecMismatch { index: 0 }
        );
        let bad = RadiusSchedule::geometric(rat(1, 1), rat(3, 2));
        assert!(matches!(
            HoleSystem::new(dyadic(), vec![z], vec![bad]).unwrap_err(),
            EscapeError::InvalidSchedule { index: 0, .. }
        ));
    }
}
