//! Exact rational dynamics on `[0, 1]`.
//!
//! Continuous piecewise affine maps are stored by their values at the
//! breakpoints, so continuity holds by construction. Rational orbits of the
//! tent map never grow their denominators, which makes first-hit times
//! (including "never") decidable by cycle detection.

mod construct;
mod solenoid;

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::escape::{HitTime, RadiusSchedule, ScaleRecord, WinnerTrace};
use crate::rational::{format_rational, rat};

pub use construct::{
    construct_indecisive_interval, verify_interval_schedule, IntervalConstructError,
    IntervalConstructOptions, IntervalConstruction,
};
pub use solenoid::{build_solenoid, verify_solenoid_structure, ClosedInterval, SolenoidError, SolenoidalModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("point {0} lies outside [0, 1]")]
    OutsideDomain(String),
    #[error("breakpoints must start at 0, end at 1 and increase strictly")]
    BadBreakpoints,
    #[error("map needs one value per breakpoint")]
    ValueCountMismatch,
    #[error("map value {0} lies outside [0, 1]")]
    ValueOutOfRange(String),
    #[error("level {0} is attained on a whole piece; its preimage set is infinite")]
    FlatPiece(String),
    #[error("hole centers {first} and {second} coincide")]
    CoincidentCenters { first: usize, second: usize },
    #[error("hole {index}: {reason}")]
    InvalidHole { index: usize, reason: String },
}

/// A continuous map `[0,1] → [0,1]`, affine between consecutive breakpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseAffineMap {
    breakpoints: Vec<BigRational>,
    values: Vec<BigRational>,
}

fn in_unit(x: &BigRational) -> bool {
    !(x < &BigRational::zero() || x > &BigRational::one())
}

impl PiecewiseAffineMap {
    pub fn new(breakpoints: Vec<BigRational>, values: Vec<BigRational>) -> Result<Self, IntervalError> {
        if breakpoints.len() < 2
            || !breakpoints[0].is_zero()
            || !breakpoints[breakpoints.len() - 1].is_one()
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(IntervalError::BadBreakpoints);
        }
        if values.len() != breakpoints.len() {
            return Err(IntervalError::ValueCountMismatch);
        }
        if let Some(v) = values.iter().find(|v| !in_unit(v)) {
            return Err(IntervalError::ValueOutOfRange(format_rational(v)));
        }
        Ok(PiecewiseAffineMap { breakpoints, values })
    }

    /// `T(x) = 1 - |2x - 1|`.
    pub fn tent() -> Self {
        PiecewiseAffineMap {
            breakpoints: vec![rat(0, 1), rat(1, 2), rat(1, 1)],
            values: vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        }
    }

    pub fn breakpoints(&self) -> &[BigRational] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn pieces(&self) -> usize {
        self.breakpoints.len() - 1
    }

    fn piece_value(&self, k: usize, x: &BigRational) -> BigRational {
        let (x0, x1) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
        let (y0, y1) = (&self.values[k], &self.values[k + 1]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Solves `piece_k(x) = y` on a non-flat piece.
    fn piece_inverse(&self, k: usize, y: &BigRational) -> BigRational {
        let (x0, x1) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
        let (y0, y1) = (&self.values[k], &self.values[k + 1]);
        x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    }

    pub fn evaluate(&self, x: &BigRational) -> Result<BigRational, IntervalError> {
        if !in_unit(x) {
            return Err(IntervalError::OutsideDomain(format_rational(x)));
        }
        let k = self.breakpoints[1..]
            .partition_point(|b| b < x)
            .min(self.pieces() - 1);
        Ok(self.piece_value(k, x))
    }

    /// All solutions of `f(x) = y`, sorted.
    pub fn preimages(&self, y: &BigRational) -> Result<Vec<BigRational>, IntervalError> {
        if !in_unit(y) {
            return Err(IntervalError::OutsideDomain(format_rational(y)));
        }
        let mut out = Vec::new();
        for k in 0..self.pieces() {
            let (y0, y1) = (&self.values[k], &self.values[k + 1]);
            let (lo, hi) = if y0 <= y1 { (y0, y1) } else { (y1, y0) };
            if y < lo || y > hi {
                continue;
            }
            if y0 == y1 {
                return Err(IntervalError::FlatPiece(format_rational(y)));
            }
            out.push(self.piece_inverse(k, y));
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Some `x ∈ [lo, hi]` with `f^depth(x) = y`, found depth-first.
    pub fn preimage_in(
        &self,
        y: &BigRational,
        depth: usize,
        lo: &BigRational,
        hi: &BigRational,
    ) -> Option<BigRational> {
        if lo > hi {
            return None;
        }
        if depth == 0 {
            return (lo <= y && y <= hi).then(|| y.clone());
        }
        for k in 0..self.pieces() {
            let a = lo.max(&self.breakpoints[k]);
            let b = hi.min(&self.breakpoints[k + 1]);
            if a > b {
                continue;
            }
            let (fa, fb) = (self.piece_value(k, a), self.piece_value(k, b));
            if fa == fb {
                if self.preimage_in(y, depth - 1, &fa, &fb).is_some() {
                    return Some((a + b) / rat(2, 1));
                }
                continue;
            }
            let (ia, ib) = if fa < fb { (fa, fb) } else { (fb, fa) };
            if let Some(z) = self.preimage_in(y, depth - 1, &ia, &ib) {
                return Some(self.piece_inverse(k, &z));
            }
        }
        None
    }
}

/// The open interval `(lo, hi)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenInterval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl OpenInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        OpenInterval { lo, hi }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo < x && x < &self.hi
    }

    pub fn intersects(&self, other: &OpenInterval) -> bool {
        self.lo < other.hi && other.lo < self.hi
    }
}

impl fmt::Display for OpenInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.lo), format_rational(&self.hi))
    }
}

/// A shrinking hole `(center - rho_n, center + rho_n)` on `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalHole {
    pub center: BigRational,
    pub schedule: RadiusSchedule,
}

impl IntervalHole {
    pub fn new(center: BigRational, schedule: RadiusSchedule) -> Self {
        IntervalHole { center, schedule }
    }

    pub fn at(&self, n: usize) -> OpenInterval {
        let rho = self.schedule.radius(n);
        OpenInterval::new(&self.center - &rho, &self.center + &rho)
    }

    fn validate(&self, index: usize) -> Result<(), IntervalError> {
        if self.center <= BigRational::zero() || self.center >= BigRational::one() {
            return Err(IntervalError::InvalidHole {
                index,
                reason: format!("center {} is not inside (0, 1)", format_rational(&self.center)),
            });
        }
        let warnings = self
            .schedule
            .validate()
            .map_err(|reason| IntervalError::InvalidHole { index, reason })?;
        for w in warnings {
            log::warn!("interval hole {index}: {w}");
        }
        Ok(())
    }
}

/// Answer of an exact first-hit search on the interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalHit {
    Hit(u64),
    /// The orbit closed a cycle without entering the hole.
    NeverHits,
    Undecided,
}

impl From<IntervalHit> for HitTime {
    fn from(hit: IntervalHit) -> Self {
        match hit {
            IntervalHit::Hit(k) => HitTime::At(BigUint::from(k)),
            IntervalHit::NeverHits => HitTime::Never,
            IntervalHit::Undecided => HitTime::Undecided,
        }
    }
}

/// The distinct states `x, f(x), …` up to the first repetition or `horizon` steps.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub points: Vec<BigRational>,
    /// A repeated state was found, so `points` is the whole forward orbit.
    pub closed: bool,
}

impl Orbit {
    pub fn compute(map: &PiecewiseAffineMap, x: &BigRational, horizon: u64) -> Result<Self, IntervalError> {
        let mut seen: HashMap<BigRational, ()> = HashMap::new();
        let mut points = Vec::new();
        let mut current = x.clone();
        for step in 0..=horizon {
            if seen.insert(current.clone(), ()).is_some() {
                return Ok(Orbit { points, closed: true });
            }
            points.push(current.clone());
            if step < horizon {
                current = map.evaluate(&current)?;
            }
        }
        Ok(Orbit {
            points,
            closed: false,
        })
    }

    pub fn first_hit(&self, hole: &OpenInterval) -> IntervalHit {
        match self.points.iter().position(|p| hole.contains(p)) {
            Some(k) => IntervalHit::Hit(k as u64),
            None if self.closed => IntervalHit::NeverHits,
            None => IntervalHit::Undecided,
        }
    }
}

pub fn first_hit_interval(
    map: &PiecewiseAffineMap,
    x: &BigRational,
    hole: &OpenInterval,
    horizon: u64,
) -> Result<IntervalHit, IntervalError> {
    if !in_unit(x) {
        return Err(IntervalError::OutsideDomain(format_rational(x)));
    }
    let mut seen: HashMap<BigRational, ()> = HashMap::new();
    let mut current = x.clone();
    for step in 0..=horizon {
        if hole.contains(&current) {
            return Ok(IntervalHit::Hit(step));
        }
        if seen.insert(current.clone(), ()).is_some() {
            return Ok(IntervalHit::NeverHits);
        }
        if step < horizon {
            current = map.evaluate(&current)?;
        }
    }
    Ok(IntervalHit::Undecided)
}

/// Checks hole parameters and pairwise distinct centers.
pub fn validate_holes(holes: &[IntervalHole]) -> Result<(), IntervalError> {
    for (i, hole) in holes.iter().enumerate() {
        hole.validate(i)?;
        if let Some(j) = holes[..i].iter().position(|h| h.center == hole.center) {
            return Err(IntervalError::CoincidentCenters { first: j, second: i });
        }
    }
    Ok(())
}

pub(crate) fn interval_record(
    orbit: &Orbit,
    holes: &[IntervalHole],
    n: usize,
) -> ScaleRecord {
    let intervals: Vec<OpenInterval> = holes.iter().map(|h| h.at(n)).collect();
    let taus: Vec<HitTime> = intervals.iter().map(|i| orbit.first_hit(i).into()).collect();
    let overlap = intervals
        .iter()
        .enumerate()
        .any(|(i, a)| intervals[i + 1..].iter().any(|b| a.intersects(b)));
    let coarse = intervals
        .iter()
        .any(|i| i.lo < BigRational::zero() && i.hi > BigRational::one());
    let winner = crate::escape::winner(&taus);
    ScaleRecord {
        n,
        depths: Vec::new(),
        taus,
        winner,
        overlap,
        coarse,
    }
}

/// Winner trace of `x` against interval holes for `n = 1..=n_max`.
/// Scales with an undecided hit time have no winner and are not counted.
pub fn interval_winner_trace(
    map: &PiecewiseAffineMap,
    holes: &[IntervalHole],
    x: &BigRational,
    n_max: usize,
    horizon: u64,
) -> Result<WinnerTrace, IntervalError> {
    validate_holes(holes)?;
    if !in_unit(x) {
        return Err(IntervalError::OutsideDomain(format_rational(x)));
    }
    let orbit = Orbit::compute(map, x, horizon)?;
    let records = (1..=n_max).map(|n| interval_record(&orbit, holes, n)).collect();
    Ok(WinnerTrace::new(holes.len(), records))
}

/// The level-`d` backward orbit `f^{-d}(y)`, sorted.
pub fn backward_level(map: &PiecewiseAffineMap, y: &BigRational, d: usize) -> Result<Vec<BigRational>, IntervalError> {
    let mut level = vec![y.clone()];
    for _ in 0..d {
        let mut next = Vec::with_capacity(level.len() * 2);
        for point in &level {
            next.extend(map.preimages(point)?);
        }
        next.sort();
        next.dedup();
        level = next;
    }
    Ok(level)
}

/// Largest gap between consecutive points of `{0} ∪ f^{-d}(y) ∪ {1}`.
pub fn backward_gap(map: &PiecewiseAffineMap, y: &BigRational, d: usize) -> Result<BigRational, IntervalError> {
    let level = backward_level(map, y, d)?;
    let mut previous = BigRational::zero();
    let mut widest = BigRational::zero();
    for point in level.iter().chain(std::iter::once(&BigRational::one())) {
        let gap = point - &previous;
        if gap > widest {
            widest = gap;
        }
        previous = point.clone();
    }
    Ok(widest)
}
