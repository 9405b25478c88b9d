use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

use crate::odometer::Cylinder;
use crate::radix::RadixSpec;
use crate::rational::format_rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolenoidError {
    #[error("point {point} lies in no stage-{stage} interval")]
    NotInStage { point: String, stage: usize },
    #[error("stage {stage} is not built (model has {built} stages)")]
    StageNotBuilt { stage: usize, built: usize },
    #[error("stage {0} has too many intervals to enumerate")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosedInterval {
    pub left: BigRational,
    pub right: BigRational,
}

impl ClosedInterval {
    pub fn new(left: BigRational, right: BigRational) -> Self {
        ClosedInterval { left, right }
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.left <= x && x <= &self.right
    }

    pub fn length(&self) -> BigRational {
        &self.right - &self.left
    }
}

/// Nested stages of closed intervals labelled by residues, with stage maps
/// that rotate labels by one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolenoidalModel {
    branching: RadixSpec,
    /// `stages[k][r]` is `I_{k,r}`, `r < m_k`.
    stages: Vec<Vec<ClosedInterval>>,
    /// Labels of each stage sorted by left endpoint.
    order: Vec<Vec<usize>>,
}

fn sorted_labels(stage: &[ClosedInterval]) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..stage.len()).collect();
    labels.sort_by(|&a, &b| stage[a].left.cmp(&stage[b].left));
    labels
}

fn modulus_usize(spec: &RadixSpec, k: usize) -> Option<usize> {
    spec.modulus(k).to_usize()
}

/// Stage `k` splits every stage-`(k-1)` interval into `2c - 1` equal parts,
/// `c = j_k`, and keeps the even-numbered ones. Child `t` of `I_{k-1,r}`
/// gets label `r + t·m_{k-1}`.
pub fn build_solenoid(branching: &RadixSpec, depth: usize) -> Result<SolenoidalModel, SolenoidError> {
    let mut stages = vec![vec![ClosedInterval::new(BigRational::zero(), BigRational::one())]];
    for k in 1..=depth {
        let m = modulus_usize(branching, k).filter(|&m| m <= 1 << 24).ok_or(SolenoidError::TooLarge(k))?;
        let parent_count = stages[k - 1].len();
        let c = branching.radix_at(k);
        let parts = BigRational::from_integer(BigInt::from(2 * c - 1));
        let mut stage = vec![None; m];
        for (r, parent) in stages[k - 1].iter().enumerate() {
            let width = parent.length() / &parts;
            for t in 0..c as usize {
                let left = &parent.left + &width * BigRational::from_integer(BigInt::from(2 * t));
                let right = &left + &width;
                stage[r + t * parent_count] = Some(ClosedInterval::new(left, right));
            }
        }
        stages.push(stage.into_iter().map(|i| i.expect("every label is assigned")).collect());
    }
    Ok(SolenoidalModel::from_stages(branching.clone(), stages))
}

impl SolenoidalModel {
    /// Wraps arbitrary stages without checking them.
    pub fn from_stages(branching: RadixSpec, stages: Vec<Vec<ClosedInterval>>) -> Self {
        let order = stages.iter().map(|s| sorted_labels(s)).collect();
        SolenoidalModel {
            branching,
            stages,
            order,
        }
    }

    pub fn branching(&self) -> &RadixSpec {
        &self.branching
    }

    /// Deepest built stage.
    pub fn depth(&self) -> usize {
        self.stages.len() - 1
    }

    pub fn stage(&self, k: usize) -> Option<&[ClosedInterval]> {
        self.stages.get(k).map(Vec::as_slice)
    }

    /// Overwrites `I_{k,r}`; used to exercise the structure checks.
    pub fn replace_interval(&mut self, k: usize, r: usize, interval: ClosedInterval) {
        self.stages[k][r] = interval;
        self.order[k] = sorted_labels(&self.stages[k]);
    }

    fn stage_checked(&self, k: usize) -> Result<&[ClosedInterval], SolenoidError> {
        self.stage(k).ok_or(SolenoidError::StageNotBuilt {
            stage: k,
            built: self.depth(),
        })
    }

    /// Label `r` of the stage-`k` interval containing `x`.
    pub fn itinerary(&self, x: &BigRational, k: usize) -> Result<usize, SolenoidError> {
        let stage = self.stage_checked(k)?;
        let order = &self.order[k];
        let after = order.partition_point(|&r| &stage[r].left <= x);
        after
            .checked_sub(1)
            .map(|i| order[i])
            .filter(|&r| stage[r].contains(x))
            .ok_or_else(|| SolenoidError::NotInStage {
                point: format_rational(x),
                stage: k,
            })
    }

    /// The cylinder `[r]_k` of the adding machine matching the itinerary of `x`.
    pub fn cylinder_of(&self, x: &BigRational, k: usize) -> Result<Cylinder, SolenoidError> {
        let r = self.itinerary(x, k)?;
        Ok(Cylinder::new(self.branching.clone(), k, BigUint::from(r)).expect("label is below m_k"))
    }

    /// The stage-`k` map: the increasing affine bijection `I_{k,r} → I_{k,r+1 mod m_k}`.
    pub fn stage_map(&self, x: &BigRational, k: usize) -> Result<BigRational, SolenoidError> {
        let r = self.itinerary(x, k)?;
        Ok(self.map_from(k, r, x))
    }

    fn map_from(&self, k: usize, r: usize, x: &BigRational) -> BigRational {
        let stage = &self.stages[k];
        let (from, to) = (&stage[r], &stage[(r + 1) % stage.len()]);
        &to.left + (x - &from.left) * to.length() / from.length()
    }
}

/// Checks stages `1..=k`: label counts, disjointness, nesting of `I_{k,r}`
/// in `I_{k-1, r mod m_{k-1}}`, and that each stage map is the affine
/// bijection onto the next label.
pub fn verify_solenoid_structure(model: &SolenoidalModel, k: usize) -> bool {
    if k > model.depth() {
        return false;
    }
    let zero = BigRational::zero();
    let one = BigRational::one();
    let two = BigRational::from_integer(2.into());
    for level in 0..=k {
        let stage = &model.stages[level];
        if modulus_usize(&model.branching, level) != Some(stage.len()) {
            return false;
        }
        if stage.iter().any(|i| i.left >= i.right || i.left < zero || i.right > one) {
            return false;
        }
        let order = &model.order[level];
        if order.windows(2).any(|w| stage[w[0]].right >= stage[w[1]].left) {
            return false;
        }
        if level > 0 {
            let parents = &model.stages[level - 1];
            for (r, interval) in stage.iter().enumerate() {
                let parent = &parents[r % parents.len()];
                if interval.left < parent.left || interval.right > parent.right {
                    return false;
                }
            }
            // Children of a parent appear left to right by offset t.
            for r in 0..parents.len() {
                let lefts: Vec<&BigRational> =
                    (r..stage.len()).step_by(parents.len()).map(|s| &stage[s].left).collect();
                if lefts.windows(2).any(|w| w[0] >= w[1]) {
                    return false;
                }
            }
        }
        for (r, interval) in stage.iter().enumerate() {
            let successor = (r + 1) % stage.len();
            let next = &stage[successor];
            let mid = (&interval.left + &interval.right) / &two;
            let checks = [
                (&interval.left, next.left.clone()),
                (&interval.right, next.right.clone()),
                (&mid, (&next.left + &next.right) / &two),
            ];
            for (x, want) in checks {
                let image = model.map_from(level, r, x);
                if image != want || model.itinerary(&image, level).ok() != Some(successor) {
                    return false;
                }
            }
        }
    }
    true
}
