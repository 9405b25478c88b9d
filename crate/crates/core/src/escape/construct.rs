use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use super::{hit_vector, validate_system, Degeneracy, EscapeError, HoleSystem, Validity};
use crate::odometer::AdicPoint;

/// Search bounds for [`construct_indecisive`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructOptions {
    /// Largest digit depth the committed residue may reach.
    pub max_depth: usize,
    /// Largest number of extensions `r + t·m_L` tried per scale.
    pub max_offset: u64,
    /// Largest scale `n` considered.
    pub max_scale: usize,
}

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            max_depth: 512,
            max_offset: 4096,
            max_scale: 4096,
        }
    }
}

/// A point with finitely many nonzero digits whose winners at the realized
/// scales follow the requested schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub point: AdicPoint,
    pub residue: BigUint,
    pub depth: usize,
    pub realized_scales: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("degenerate system: {0}")]
    DegenerateSystem(Degeneracy),
    #[error(
        "search budget exceeded realizing entry {entry} (hole {hole}): scanned scales up to {last_scale} at depth {depth}"
    )]
    SearchBudgetExceeded {
        entry: usize,
        hole: usize,
        last_scale: usize,
        depth: usize,
    },
    #[error(transparent)]
    Usage(#[from] EscapeError),
    #[error("constructed point failed verification at scale {scale}")]
    VerificationFailed { scale: usize },
}

/// Hole data at one scale, truncated to a committed depth `e`.
///
/// For a hole deeper than `e` only the first `e` digits of `x` are known,
/// so `(r - x) mod m_e` is a lower bound on its hit time that no later
/// digit choice can lower.
struct ScaleHoles {
    /// Per hole: modulus at `min(L_i, e)`, center residue there, and whether `L_i ≤ e`.
    holes: Vec<(BigUint, BigUint, bool)>,
}

impl ScaleHoles {
    fn new(sys: &HoleSystem, depths: &[usize], e: usize, moduli: &[BigUint]) -> Self {
        let holes = sys
            .centers()
            .iter()
            .zip(depths)
            .map(|(c, &d)| {
                let t = d.min(e);
                (moduli[t].clone(), c.residue(t), d <= e)
            })
            .collect();
        ScaleHoles { holes }
    }

    /// The winner every extension of the residue `x mod m_e` is guaranteed to have.
    fn certified_winner(&self, x: &BigUint) -> Option<usize> {
        let bounds: Vec<BigUint> = self
            .holes
            .iter()
            .map(|(m, r, _)| (r + m - x % m) % m)
            .collect();
        let (best, tau) = bounds.iter().enumerate().min_by(|a, b| a.1.cmp(b.1))?;
        let exact = self.holes[best].2;
        let unique = bounds.iter().enumerate().all(|(j, b)| j == best || b > tau);
        (exact && unique).then_some(best)
    }
}

/// Greedy nested-cylinder search for a point whose winner at strictly
/// increasing scales `n_1 < n_2 < …` is `schedule[0], schedule[1], …`.
///
/// Holes are 0-indexed. The committed residue `r mod m_L` is only ever
/// extended, and every realized winner is certified from the committed
/// digits alone, so later extensions cannot undo it.
pub fn construct_indecisive(
    sys: &HoleSystem,
    schedule: &[usize],
    opts: &ConstructOptions,
) -> Result<Construction, ConstructError> {
    if schedule.is_empty() {
        return Err(EscapeError::EmptyTargetSchedule.into());
    }
    if let Some(&index) = schedule.iter().find(|&&i| i >= sys.len()) {
        return Err(EscapeError::HoleOutOfRange {
            index,
            holes: sys.len(),
        }
        .into());
    }
    if let Validity::Degenerate(reason) = validate_system(sys) {
        return Err(ConstructError::DegenerateSystem(reason));
    }

    let spec = sys.spec();
    let moduli = spec.moduli(opts.max_depth);
    let mut residue = BigUint::zero();
    let mut depth = 0usize;
    let mut realized: Vec<usize> = Vec::with_capacity(schedule.len());

    for (entry, &target) in schedule.iter().enumerate() {
        let first_scale = realized.last().map_or(1, |n| n + 1);
        let mut found = None;
        let mut last_scale = first_scale;
        'scales: for n in first_scale..=opts.max_scale {
            last_scale = n;
            let depths = sys.depths(n);
            if depths.contains(&0) {
                continue;
            }
            let base = depths[target].max(depth);
            if base > opts.max_depth {
                break;
            }
            let full = depths.iter().copied().max().unwrap_or(0).max(depth).min(opts.max_depth);
            let step = &moduli[depth];
            let levels = if full > base { vec![base, full] } else { vec![base] };
            for e in levels {
                let holes = ScaleHoles::new(sys, &depths, e, &moduli);
                let extensions = &moduli[e] / step;
                let limit = extensions.to_u64().map_or(opts.max_offset, |x| x.min(opts.max_offset));
                let mut candidate = residue.clone();
                for _ in 0..limit {
                    if holes.certified_winner(&candidate) == Some(target) {
                        found = Some((n, candidate, e));
                        break 'scales;
                    }
                    candidate += step;
                }
                if depths[target] >= depth {
                    // Enter the target hole as early as the committed digits allow.
                    let m = &moduli[depths[target]];
                    let r = sys.centers()[target].residue(depths[target]);
                    let lead = (&r % step + step - &residue) % step;
                    let direct = (&r + m - &lead % m) % m;
                    if holes.certified_winner(&direct) == Some(target) {
                        found = Some((n, direct, e));
                        break 'scales;
                    }
                }
            }
        }
        match found {
            Some((n, x, e)) => {
                log::debug!("entry {entry}: hole {target} wins at scale {n} with depth {e}");
                residue = x;
                depth = e;
                realized.push(n);
            }
            None => {
                return Err(ConstructError::SearchBudgetExceeded {
                    entry,
                    hole: target,
                    last_scale,
                    depth,
                })
            }
        }
    }

    let point = AdicPoint::from_residue(spec.clone(), &residue, depth)
        .expect("residue is below the committed modulus");
    if let Some(scale) = first_violation(sys, &point, schedule, &realized) {
        return Err(ConstructError::VerificationFailed { scale });
    }
    Ok(Construction {
        point,
        residue,
        depth,
        realized_scales: realized,
    })
}

fn first_violation(
    sys: &HoleSystem,
    x: &AdicPoint,
    schedule: &[usize],
    scales: &[usize],
) -> Option<usize> {
    if scales.len() != schedule.len() {
        return Some(0);
    }
    let mut previous = 0;
    for (&n, &target) in scales.iter().zip(schedule) {
        let record = hit_vector(sys, x, n);
        if n <= previous || record.coarse || record.winner != Some(target) {
            return Some(n);
        }
        previous = n;
    }
    None
}

/// Whether `x` has winner `schedule[k]` at `scales[k]` for every `k`, with
/// strictly increasing, non-coarse scales.
pub fn verify_schedule(sys: &HoleSystem, x: &AdicPoint, schedule: &[usize], scales: &[usize]) -> bool {
    first_violation(sys, x, schedule, scales).is_none()
}
