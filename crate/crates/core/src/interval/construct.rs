use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use super::{interval_record, validate_holes, IntervalError, IntervalHole, Orbit, PiecewiseAffineMap};
use crate::rational::{format_rational, rat};

/// Search bounds for [`construct_indecisive_interval`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalConstructOptions {
    /// Longest backward step between consecutive prescribed visits.
    pub max_gap: usize,
    /// Largest spacing between consecutive realized scales.
    pub max_step: usize,
    /// Largest scale considered.
    pub max_scale: usize,
    /// Longest lead-in before the first prescribed visit.
    pub max_lead: usize,
    /// Minimum horizon for exact orbit checks.
    pub orbit_horizon: u64,
}

impl Default for IntervalConstructOptions {
    fn default() -> Self {
        IntervalConstructOptions {
            max_gap: 24,
            max_step: 8,
            max_scale: 256,
            max_lead: 6,
            orbit_horizon: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalConstruction {
    pub x: BigRational,
    pub realized_scales: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalConstructError {
    #[error(transparent)]
    Invalid(#[from] IntervalError),
    #[error("target schedule is empty")]
    EmptyTargetSchedule,
    #[error("target schedule names hole {index}, but there are {holes} holes")]
    HoleOutOfRange { index: usize, holes: usize },
    #[error("center of hole {second} lands on the center of hole {first} after {steps} steps")]
    DegenerateCenters { first: usize, second: usize, steps: u64 },
    #[error("search budget exceeded: no schedule realization within the configured bounds")]
    SearchBudgetExceeded,
}

/// Exact horizon after which a tent-map orbit of `x` must have repeated:
/// with denominator `2^a·q`, `q` odd, the orbit has at most `a + q` states.
fn orbit_bound(x: &BigRational, floor: u64) -> u64 {
    let den = x.denom().magnitude();
    let a = den.trailing_zeros().unwrap_or(0);
    let q = den >> a;
    q.to_u64()
        .and_then(|q| q.checked_add(a + 2))
        .map_or(u64::MAX, |b| b.max(floor))
}

/// Orbit horizon for `x`: exact for the tent map, `floor` otherwise.
fn horizon_for(map: &PiecewiseAffineMap, x: &BigRational, floor: u64) -> u64 {
    if *map == PiecewiseAffineMap::tent() {
        orbit_bound(x, floor)
    } else {
        floor
    }
}

fn check_center_orbits(
    map: &PiecewiseAffineMap,
    holes: &[IntervalHole],
    horizon: u64,
) -> Result<(), IntervalConstructError> {
    for (j, hole) in holes.iter().enumerate() {
        let orbit = Orbit::compute(map, &hole.center, horizon_for(map, &hole.center, horizon))?;
        for (steps, point) in orbit.points.iter().enumerate().skip(1) {
            if let Some(i) = holes.iter().position(|h| &h.center == point) {
                return Err(IntervalConstructError::DegenerateCenters {
                    first: i,
                    second: j,
                    steps: steps as u64,
                });
            }
        }
    }
    Ok(())
}

fn disjoint_at(holes: &[IntervalHole], n: usize) -> bool {
    let intervals: Vec<_> = holes.iter().map(|h| h.at(n)).collect();
    intervals.iter().enumerate().all(|(i, a)| {
        intervals[i + 1..]
            .iter()
            .all(|b| a.hi < b.lo || b.hi < a.lo)
    })
}

/// Points of the annulus `rho_out ≤ |x - c| ≤ (rho_out + rho_in)/2` inside
/// `[0, 1]`, as up to two closed windows.
fn annulus(center: &BigRational, rho_in: &BigRational, rho_out: &BigRational) -> Vec<(BigRational, BigRational)> {
    let mid = (rho_in + rho_out) / rat(2, 1);
    let zero = BigRational::zero();
    let one = BigRational::one();
    let mut windows = Vec::new();
    for (lo, hi) in [(center + rho_out, center + &mid), (center - &mid, center - rho_out)] {
        let lo = lo.max(zero.clone());
        let hi = hi.min(one.clone());
        if lo <= hi {
            windows.push((lo, hi));
        }
    }
    windows
}

/// Backward chain `y_1, …, y_K` with `y_K = c_{i_K}` and each `y_k` a
/// preimage of `y_{k+1}` lying in the annulus of hole `i_k` between the
/// scales `n_{k+1}` and `n_k`.
fn backward_chain(
    map: &PiecewiseAffineMap,
    holes: &[IntervalHole],
    schedule: &[usize],
    scales: &[usize],
    max_gap: usize,
) -> Option<BigRational> {
    let mut y = holes[schedule[schedule.len() - 1]].center.clone();
    for k in (0..schedule.len() - 1).rev() {
        let hole = &holes[schedule[k]];
        let rho_in = hole.schedule.radius(scales[k]);
        let rho_out = hole.schedule.radius(scales[k + 1]);
        if rho_out >= rho_in {
            return None;
        }
        let windows = annulus(&hole.center, &rho_in, &rho_out);
        y = (1..=max_gap).find_map(|g| {
            windows
                .iter()
                .find_map(|(lo, hi)| map.preimage_in(&y, g, lo, hi))
        })?;
    }
    Some(y)
}

/// Builds a rational `x` whose winner at strictly increasing scales
/// `n_1 < n_2 < …` is `schedule[0], schedule[1], …` (holes 0-indexed).
///
/// The orbit is assembled backward: the last visit is the center of the
/// final hole, and every earlier visit is a preimage placed in a thin
/// annulus of its hole, close enough to count at its own scale but outside
/// the hole at all later ones.
pub fn construct_indecisive_interval(
    map: &PiecewiseAffineMap,
    holes: &[IntervalHole],
    schedule: &[usize],
    opts: &IntervalConstructOptions,
) -> Result<IntervalConstruction, IntervalConstructError> {
    validate_holes(holes)?;
    if schedule.is_empty() {
        return Err(IntervalConstructError::EmptyTargetSchedule);
    }
    if let Some(&index) = schedule.iter().find(|&&i| i >= holes.len()) {
        return Err(IntervalConstructError::HoleOutOfRange {
            index,
            holes: holes.len(),
        });
    }
    check_center_orbits(map, holes, opts.orbit_horizon)?;

    let n_start = (1..=opts.max_scale)
        .find(|&n| disjoint_at(holes, n))
        .ok_or(IntervalConstructError::SearchBudgetExceeded)?;
    let count = schedule.len();

    for step in 1..=opts.max_step.max(1) {
        for first in n_start..n_start + opts.max_step.max(1) {
            let last = first + (count - 1) * step;
            if last > opts.max_scale {
                continue;
            }
            let scales: Vec<usize> = (0..count).map(|k| first + k * step).collect();
            let Some(y1) = backward_chain(map, holes, schedule, &scales, opts.max_gap) else {
                continue;
            };
            for lead in (1..=opts.max_lead).chain(std::iter::once(0)) {
                let Ok(candidates) = super::backward_level(map, &y1, lead) else {
                    continue;
                };
                for x in candidates {
                    if verify_interval_schedule(map, holes, &x, schedule, &scales, opts.orbit_horizon) {
                        log::debug!(
                            "realized schedule at scales {:?} with x = {}",
                            scales,
                            format_rational(&x)
                        );
                        return Ok(IntervalConstruction {
                            x,
                            realized_scales: scales,
                        });
                    }
                }
            }
        }
    }
    Err(IntervalConstructError::SearchBudgetExceeded)
}

/// Whether the winner of `x` at `scales[k]` is `schedule[k]` for every `k`,
/// with strictly increasing scales and exact (never undecided) hit times.
pub fn verify_interval_schedule(
    map: &PiecewiseAffineMap,
    holes: &[IntervalHole],
    x: &BigRational,
    schedule: &[usize],
    scales: &[usize],
    horizon: u64,
) -> bool {
    if scales.len() != schedule.len() || scales.windows(2).any(|w| w[0] >= w[1]) {
        return false;
    }
    if scales.first() == Some(&0) {
        return false;
    }
    let Ok(orbit) = Orbit::compute(map, x, horizon_for(map, x, horizon)) else {
        return false;
    };
    scales.iter().zip(schedule).all(|(&n, &target)| {
        let record = interval_record(&orbit, holes, n);
        record.counted() && record.winner == Some(target)
    })
}
