//! The adding machine `(Δ_α, f_α)`.
//!
//! Points are either *exact* eventually periodic digit streams or *sampled*
//! streams whose digits come from a counter-based generator. Exact points
//! are closed under translation by any integer, so orbit relations and
//! equality are decidable for them.
//!
//! Tail digits carry a flavour: `Low(d)` is the digit `d`, `High(d)` is the
//! digit `j_n - 1 - d`. For periodic radix sequences every stream is
//! normalized to `Low` digits; for the builtin families `High` is needed to
//! express tails such as `-1 = (j_1 - 1, j_2 - 1, …)`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::radix::{parse_canonical_u64, DigitVector, RadixSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OdometerError {
    #[error("points live on different radix sequences")]
    SpecMismatch,
    #[error("sampled points support translation only through finite-depth residues")]
    SampledTranslate,
    #[error("orbit relations are decidable only for exact points")]
    SampledOrbit,
    #[error("digit {digit} at position {position} is not below the radix {radix}")]
    DigitOutOfRange { position: usize, digit: u64, radix: u64 },
    #[error("the repeating block of a point must be nonempty")]
    EmptyPeriod,
    #[error("cannot parse point {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("ball radius must be positive, got {0}")]
    NonPositiveRadius(BigRational),
}

/// A digit in the repeating tail of an exact point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TailDigit {
    /// The digit `d`.
    Low(u64),
    /// The digit `j_n - 1 - d`.
    High(u64),
}

impl TailDigit {
    fn value(self, radix: u64) -> u64 {
        match self {
            TailDigit::Low(d) => d,
            TailDigit::High(d) => radix - 1 - d,
        }
    }

    fn payload(self) -> u64 {
        match self {
            TailDigit::Low(d) | TailDigit::High(d) => d,
        }
    }
}

/// Digits `pre[0], …, pre[P-1]` at positions `1..=P`, then `period` forever.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExactDigits {
    pre: Vec<u64>,
    period: Vec<TailDigit>,
}

impl ExactDigits {
    pub fn preperiod(&self) -> &[u64] {
        &self.pre
    }

    pub fn period(&self) -> &[TailDigit] {
        &self.period
    }

    fn symbol(&self, n: usize) -> TailDigit {
        debug_assert!(n > self.pre.len());
        self.period[(n - 1 - self.pre.len()) % self.period.len()]
    }

    fn value(&self, spec: &RadixSpec, n: usize) -> u64 {
        if n <= self.pre.len() {
            self.pre[n - 1]
        } else {
            self.symbol(n).value(spec.radix_at(n))
        }
    }

    fn zero() -> Self {
        ExactDigits {
            pre: Vec::new(),
            period: vec![TailDigit::Low(0)],
        }
    }
}

#[derive(Debug)]
struct SampledDigits {
    seed: u64,
    memo: Mutex<Vec<u64>>,
}

#[derive(Debug, Clone)]
enum Repr {
    Exact(ExactDigits),
    Sampled(Arc<SampledDigits>),
}

/// A point of `Δ_α`.
#[derive(Debug, Clone)]
pub struct AdicPoint {
    spec: RadixSpec,
    repr: Repr,
}

impl PartialEq for AdicPoint {
    fn eq(&self, other: &Self) -> bool {
        if self.spec != other.spec {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => a == b,
            (Repr::Sampled(a), Repr::Sampled(b)) => a.seed == b.seed,
            _ => false,
        }
    }
}

/// Digit `n` of the sampled point with the given seed: uniform on `[0, j_n)`,
/// drawn from ChaCha stream `n` so that digits are independent of access order.
pub fn sampled_digit(spec: &RadixSpec, seed: u64, n: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    rng.gen_range(0..spec.radix_at(n))
}

impl AdicPoint {
    /// An exact point from a preperiod and a nonempty repeating block of plain digits.
    pub fn exact(spec: RadixSpec, pre: Vec<u64>, period: Vec<u64>) -> Result<Self, OdometerError> {
        let period = period.into_iter().map(TailDigit::Low).collect();
        Self::exact_with_tail(spec, pre, period)
    }

    pub fn exact_with_tail(
        spec: RadixSpec,
        pre: Vec<u64>,
        period: Vec<TailDigit>,
    ) -> Result<Self, OdometerError> {
        if period.is_empty() {
            return Err(OdometerError::EmptyPeriod);
        }
        let digits = ExactDigits { pre, period };
        validate_digits(&spec, &digits)?;
        Ok(AdicPoint::from_normalized(spec, digits))
    }

    /// The point with all digits zero.
    pub fn zero(spec: RadixSpec) -> Self {
        AdicPoint {
            spec,
            repr: Repr::Exact(ExactDigits::zero()),
        }
    }

    /// The image of the integer `k` in `Δ_α` (for `k < 0`, the limit of `m_L + k`).
    pub fn from_integer(spec: RadixSpec, k: &BigInt) -> Self {
        let magnitude = k.magnitude();
        let (residue, depth, tail) = if k.sign() == Sign::Minus {
            let depth = spec.depth_exceeding(&(magnitude - 1u32));
            (spec.modulus(depth) - magnitude, depth, TailDigit::High(0))
        } else {
            (magnitude.clone(), spec.depth_exceeding(magnitude), TailDigit::Low(0))
        };
        let pre = DigitVector::from_residue(spec.clone(), &residue, depth)
            .expect("residue below m_depth")
            .digits()
            .to_vec();
        AdicPoint::from_normalized(
            spec,
            ExactDigits {
                pre,
                period: vec![tail],
            },
        )
    }

    /// Point with the digits of residue `r` at depth `depth` and a zero tail.
    pub fn from_residue(spec: RadixSpec, residue: &BigUint, depth: usize) -> Result<Self, OdometerError> {
        let digits = DigitVector::from_residue(spec.clone(), residue, depth).map_err(|_| {
            OdometerError::Parse {
                text: residue.to_string(),
                reason: format!("residue does not fit depth {depth}"),
            }
        })?;
        Ok(AdicPoint::from_normalized(
            spec,
            ExactDigits {
                pre: digits.digits().to_vec(),
                period: vec![TailDigit::Low(0)],
            },
        ))
    }

    pub fn sampled(spec: RadixSpec, seed: u64) -> Self {
        AdicPoint {
            spec,
            repr: Repr::Sampled(Arc::new(SampledDigits {
                seed,
                memo: Mutex::new(Vec::new()),
            })),
        }
    }

    fn from_normalized(spec: RadixSpec, digits: ExactDigits) -> Self {
        let digits = normalize(&spec, digits);
        AdicPoint {
            spec,
            repr: Repr::Exact(digits),
        }
    }

    /// Parses `digits:1,0,1|0`, `digits:0`, `digits:|~0` or `seed:42`.
    ///
    /// A `~d` entry in the repeating block stands for the digit `j_n - 1 - d`.
    pub fn parse(spec: &RadixSpec, text: &str) -> Result<Self, OdometerError> {
        let parse_err = |reason: String| OdometerError::Parse {
            text: text.to_string(),
            reason,
        };
        if let Some(seed) = text.strip_prefix("seed:") {
            let seed = parse_canonical_u64(seed).map_err(parse_err)?;
            return Ok(AdicPoint::sampled(spec.clone(), seed));
        }
        let body = text
            .strip_prefix("digits:")
            .ok_or_else(|| parse_err("expected a 'digits:' or 'seed:' prefix".into()))?;
        let (pre, period) = match body.split_once('|') {
            Some((pre, period)) => (pre, period),
            None => ("", body),
        };
        let pre = if pre.is_empty() {
            Vec::new()
        } else {
            pre.split(',')
                .map(parse_canonical_u64)
                .collect::<Result<Vec<_>, _>>()
                .map_err(parse_err)?
        };
        let period = period
            .split(',')
            .map(|token| match token.strip_prefix('~') {
                Some(rest) => parse_canonical_u64(rest).map(TailDigit::High),
                None => parse_canonical_u64(token).map(TailDigit::Low),
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(parse_err)?;
        AdicPoint::exact_with_tail(spec.clone(), pre, period)
    }

    pub fn spec(&self) -> &RadixSpec {
        &self.spec
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    pub fn exact_digits(&self) -> Option<&ExactDigits> {
        match &self.repr {
            Repr::Exact(d) => Some(d),
            Repr::Sampled(_) => None,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match &self.repr {
            Repr::Sampled(s) => Some(s.seed),
            Repr::Exact(_) => None,
        }
    }

    /// Digit `x_n`, `n ≥ 1`.
    pub fn digit(&self, n: usize) -> u64 {
        assert!(n >= 1, "digit positions start at 1");
        match &self.repr {
            Repr::Exact(d) => d.value(&self.spec, n),
            Repr::Sampled(s) => {
                let mut memo = s.memo.lock().unwrap_or_else(|e| e.into_inner());
                while memo.len() < n {
                    let next = memo.len() + 1;
                    memo.push(sampled_digit(&self.spec, s.seed, next));
                }
                memo[n - 1]
            }
        }
    }

    /// The first `depth` digits.
    pub fn prefix(&self, depth: usize) -> DigitVector {
        let digits = (1..=depth).map(|n| self.digit(n)).collect();
        DigitVector::new(self.spec.clone(), digits).expect("point digits are in range")
    }

    /// The depth-`L` residue `X_L`.
    pub fn residue(&self, depth: usize) -> BigUint {
        self.prefix(depth).to_residue()
    }
}

impl fmt::Display for AdicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Sampled(s) => write!(f, "seed:{}", s.seed),
            Repr::Exact(d) => {
                f.write_str("digits:")?;
                if !d.pre.is_empty() {
                    for (i, x) in d.pre.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{x}")?;
                    }
                    f.write_str("|")?;
                }
                for (i, t) in d.period.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    match t {
                        TailDigit::Low(x) => write!(f, "{x}")?,
                        TailDigit::High(x) => write!(f, "~{x}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

fn lcm_usize(a: usize, b: usize) -> usize {
    a.lcm(&b)
}

/// Positions that must be inspected before the joint (digits, radix)
/// sequence is periodic: `(start, period)`.
fn joint_window(spec: &RadixSpec, pre_len: usize, period_len: usize) -> (usize, usize) {
    match spec.periodic_shape() {
        Some((spec_pre, spec_period)) => (
            pre_len.max(spec_pre) + 1,
            lcm_usize(period_len, spec_period),
        ),
        None => (pre_len + 1, period_len),
    }
}

fn validate_digits(spec: &RadixSpec, digits: &ExactDigits) -> Result<(), OdometerError> {
    let (start, len) = joint_window(spec, digits.pre.len(), digits.period.len());
    // For the builtin families j_n is increasing, so the first occurrence of each
    // tail position is the binding constraint.
    for n in 1..start + len {
        let radix = spec.radix_at(n);
        let (digit, ok) = if n <= digits.pre.len() {
            let d = digits.pre[n - 1];
            (d, d < radix)
        } else {
            let t = digits.symbol(n);
            (t.payload(), t.payload() < radix)
        };
        if !ok {
            return Err(OdometerError::DigitOutOfRange {
                position: n,
                digit,
                radix,
            });
        }
    }
    Ok(())
}

/// Canonical form: plain digits for periodic specs, minimal period, then
/// minimal preperiod.
fn normalize(spec: &RadixSpec, digits: ExactDigits) -> ExactDigits {
    let mut digits = if spec.is_periodic() {
        let (start, len) = joint_window(spec, digits.pre.len(), digits.period.len());
        let pre = (1..start).map(|n| digits.value(spec, n)).collect();
        let period = (start..start + len)
            .map(|n| TailDigit::Low(digits.value(spec, n)))
            .collect();
        ExactDigits { pre, period }
    } else {
        digits
    };

    let len = digits.period.len();
    if let Some(p) = (1..=len)
        .filter(|p| len % p == 0)
        .find(|&p| (0..len).all(|i| digits.period[i] == digits.period[i % p]))
    {
        digits.period.truncate(p);
    }

    while let Some(&last) = digits.pre.last() {
        let n = digits.pre.len();
        let candidate = digits.period[digits.period.len() - 1];
        if candidate.payload() >= spec.radix_at(n) || candidate.value(spec.radix_at(n)) != last {
            break;
        }
        digits.pre.pop();
        digits.period.rotate_right(1);
    }
    digits
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Op {
    Add,
    Sub,
}

/// Symbolic digit arithmetic for builtin radix families, valid once `j_n`
/// exceeds twice the largest payload plus two.
fn symbolic_step(op: Op, a: TailDigit, b: TailDigit, carry: u64) -> (TailDigit, u64) {
    use TailDigit::{High, Low};
    match op {
        Op::Add => match (a, b) {
            (Low(x), Low(y)) => (Low(x + y + carry), 0),
            (Low(x), High(y)) | (High(y), Low(x)) => {
                if x + carry > y {
                    (Low(x + carry - y - 1), 1)
                } else {
                    (High(y - x - carry), 0)
                }
            }
            (High(x), High(y)) => (High(x + y + 1 - carry), 1),
        },
        Op::Sub => match (a, b) {
            (Low(x), Low(y)) => {
                if x >= y + carry {
                    (Low(x - y - carry), 0)
                } else {
                    (High(y + carry - x - 1), 1)
                }
            }
            (Low(x), High(y)) => (Low(x + y + 1 - carry), 1),
            (High(x), Low(y)) => (High(x + y + carry), 0),
            (High(x), High(y)) => {
                if y >= x + carry {
                    (Low(y - x - carry), 0)
                } else {
                    (High(x + carry - y - 1), 1)
                }
            }
        },
    }
}

fn concrete_step(op: Op, x: u64, y: u64, carry: u64, radix: u64) -> (u64, u64) {
    match op {
        Op::Add => {
            let total = x as u128 + y as u128 + carry as u128;
            let radix = radix as u128;
            ((total % radix) as u64, (total / radix) as u64)
        }
        Op::Sub => {
            let need = y as u128 + carry as u128;
            if x as u128 >= need {
                ((x as u128 - need) as u64, 0)
            } else {
                ((x as u128 + radix as u128 - need) as u64, 1)
            }
        }
    }
}

/// `x ± y` digitwise with carries, as an exact stream.
///
/// Before the joint sequence becomes periodic the digits are computed
/// concretely; afterwards the state is `(phase, carry)` and the first
/// repeated state closes the period.
fn combine(spec: &RadixSpec, x: &ExactDigits, y: &ExactDigits, op: Op) -> ExactDigits {
    let pre_len = x.pre.len().max(y.pre.len());
    let tail_len = lcm_usize(x.period.len(), y.period.len());
    let (mut stable_from, period) = joint_window(spec, pre_len, tail_len);
    let symbolic = !spec.is_periodic();
    if symbolic {
        let bound = x
            .period
            .iter()
            .chain(&y.period)
            .map(|t| t.payload())
            .max()
            .unwrap_or(0);
        while spec.radix_at(stable_from) < 2 * bound + 3 {
            stable_from += 1;
        }
    }

    let mut out: Vec<TailDigit> = Vec::new();
    let mut seen: HashMap<(usize, u64), usize> = HashMap::new();
    let mut carry = 0u64;
    let mut n = 1usize;
    let cycle_start = loop {
        if n >= stable_from {
            let key = ((n - stable_from) % period, carry);
            if let Some(&start) = seen.get(&key) {
                break start;
            }
            seen.insert(key, n);
        }
        let radix = spec.radix_at(n);
        if symbolic && n >= stable_from {
            let (digit, next) = symbolic_step(op, x.symbol(n), y.symbol(n), carry);
            out.push(digit);
            carry = next;
        } else {
            let (digit, next) = concrete_step(op, x.value(spec, n), y.value(spec, n), carry, radix);
            out.push(TailDigit::Low(digit));
            carry = next;
        }
        n += 1;
    };

    let pre = out[..cycle_start - 1]
        .iter()
        .enumerate()
        .map(|(i, t)| t.value(spec.radix_at(i + 1)))
        .collect();
    ExactDigits {
        pre,
        period: out[cycle_start - 1..].to_vec(),
    }
}

fn exact_parts<'a>(
    x: &'a AdicPoint,
    y: &'a AdicPoint,
) -> Result<(&'a ExactDigits, &'a ExactDigits), OdometerError> {
    if x.spec != y.spec {
        return Err(OdometerError::SpecMismatch);
    }
    match (&x.repr, &y.repr) {
        (Repr::Exact(a), Repr::Exact(b)) => Ok((a, b)),
        _ => Err(OdometerError::SampledOrbit),
    }
}

/// Sum of two points of `Δ_α` with infinite carry propagation.
pub fn add_points(x: &AdicPoint, y: &AdicPoint) -> Result<AdicPoint, OdometerError> {
    let (a, b) = exact_parts(x, y)?;
    Ok(AdicPoint::from_normalized(x.spec.clone(), combine(&x.spec, a, b, Op::Add)))
}

/// Difference `x - y` of two points of `Δ_α`.
pub fn sub_points(x: &AdicPoint, y: &AdicPoint) -> Result<AdicPoint, OdometerError> {
    let (a, b) = exact_parts(x, y)?;
    Ok(AdicPoint::from_normalized(x.spec.clone(), combine(&x.spec, a, b, Op::Sub)))
}

/// `f_α^k(x)`: adds `k` (negative `k` runs the inverse map).
pub fn translate(x: &AdicPoint, k: &BigInt) -> Result<AdicPoint, OdometerError> {
    let digits = match &x.repr {
        Repr::Exact(d) => d,
        Repr::Sampled(_) => return Err(OdometerError::SampledTranslate),
    };
    if k.is_zero() {
        return Ok(x.clone());
    }
    let shift = AdicPoint::from_integer(x.spec.clone(), &k.abs());
    let shift = match &shift.repr {
        Repr::Exact(d) => d,
        Repr::Sampled(_) => unreachable!(),
    };
    let op = if k.is_negative() { Op::Sub } else { Op::Add };
    Ok(AdicPoint::from_normalized(
        x.spec.clone(),
        combine(&x.spec, digits, shift, op),
    ))
}

/// Metric value `d_α(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UltraDistance {
    Zero,
    /// `2^{-n}` where `n` is the first differing position.
    Exp(usize),
    /// All digits agree up to the cap; equality is undecided.
    IndeterminateBelow(usize),
}

impl UltraDistance {
    pub fn to_rational(self) -> Option<BigRational> {
        match self {
            UltraDistance::Zero => Some(BigRational::zero()),
            UltraDistance::Exp(n) => Some(BigRational::new(
                BigInt::one(),
                BigInt::one() << n,
            )),
            UltraDistance::IndeterminateBelow(_) => None,
        }
    }
}

/// `d_α(x, y)`. Exact pairs are decided without regard to `depth_cap`.
pub fn distance(x: &AdicPoint, y: &AdicPoint, depth_cap: usize) -> UltraDistance {
    if let (Repr::Exact(a), Repr::Exact(b)) = (&x.repr, &y.repr) {
        if x.spec == y.spec {
            if a == b {
                return UltraDistance::Zero;
            }
            // Distinct canonical forms describe distinct digit sequences.
            let mut n = 1;
            loop {
                if a.value(&x.spec, n) != b.value(&y.spec, n) {
                    return UltraDistance::Exp(n);
                }
                n += 1;
            }
        }
    }
    (1..=depth_cap)
        .find(|&n| x.digit(n) != y.digit(n))
        .map_or(UltraDistance::IndeterminateBelow(depth_cap), UltraDistance::Exp)
}

/// The points whose first `depth` digits are fixed: residue `r mod m_depth`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cylinder {
    spec: RadixSpec,
    depth: usize,
    residue: BigUint,
}

impl Cylinder {
    pub fn new(spec: RadixSpec, depth: usize, residue: BigUint) -> Option<Self> {
        (residue < spec.modulus(depth)).then_some(Cylinder {
            spec,
            depth,
            residue,
        })
    }

    /// The cylinder of `point` at the given depth.
    pub fn around(point: &AdicPoint, depth: usize) -> Self {
        Cylinder {
            spec: point.spec.clone(),
            depth,
            residue: point.residue(depth),
        }
    }

    pub fn spec(&self) -> &RadixSpec {
        &self.spec
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn residue(&self) -> &BigUint {
        &self.residue
    }

    pub fn modulus(&self) -> BigUint {
        self.spec.modulus(self.depth)
    }

    pub fn contains(&self, x: &AdicPoint) -> bool {
        x.residue(self.depth) == self.residue
    }

    /// Two cylinders meet iff the deeper residue reduces to the shallower one.
    pub fn intersects(&self, other: &Cylinder) -> bool {
        let (shallow, deep) = if self.depth <= other.depth {
            (self, other)
        } else {
            (other, self)
        };
        &deep.residue % shallow.modulus() == shallow.residue
    }
}

/// Depth `L ≥ 0` with `2^{-(L+1)} < rho ≤ 2^{-L}`; radii above 1 give 0.
pub fn radius_depth(rho: &BigRational) -> Result<usize, OdometerError> {
    if !rho.is_positive() {
        return Err(OdometerError::NonPositiveRadius(rho.clone()));
    }
    let p = rho.numer().magnitude();
    let q = rho.denom().magnitude();
    if p > q {
        return Ok(0);
    }
    let mut depth = (q.bits() - p.bits()) as usize;
    while (p << depth) > *q {
        depth -= 1;
    }
    while (p << (depth + 1)) <= *q {
        depth += 1;
    }
    Ok(depth)
}

/// The open ball `B_rho(center)` as a cylinder.
pub fn ball_to_cylinder(center: &AdicPoint, rho: &BigRational) -> Result<Cylinder, OdometerError> {
    Ok(Cylinder::around(center, radius_depth(rho)?))
}

/// Least `τ ≥ 0` with `f^τ(x) ∈ c`: `(r - X_L) mod m_L`.
pub fn first_hit(x: &AdicPoint, c: &Cylinder) -> BigUint {
    let modulus = c.modulus();
    let position = x.residue(c.depth);
    (&c.residue + &modulus - position) % modulus
}

/// Outcome of the iterating first-hit search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BruteForceHit {
    Hit(u64),
    NotFoundWithinHorizon,
}

/// Steps `x, f(x), …, f^horizon(x)` comparing digits with the cylinder prefix.
pub fn first_hit_bruteforce(x: &AdicPoint, c: &Cylinder, horizon: u64) -> BruteForceHit {
    let target = DigitVector::from_residue(c.spec.clone(), &c.residue, c.depth)
        .expect("cylinder residue below its modulus");
    let mut current = x.prefix(c.depth);
    for step in 0..=horizon {
        if current.digits() == target.digits() {
            return BruteForceHit::Hit(step);
        }
        current.increment();
    }
    BruteForceHit::NotFoundWithinHorizon
}

/// Orbit relation between two exact points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitRelation {
    /// `y = f^k(x)`.
    SameOrbit(BigInt),
    DistinctOrbits,
}

/// Decides whether `y = f^k(x)` for some integer `k` by inspecting the tail of `y - x`.
pub fn same_orbit(x: &AdicPoint, y: &AdicPoint) -> Result<OrbitRelation, OdometerError> {
    let diff = sub_points(y, x)?;
    let digits = diff.exact_digits().expect("difference of exact points");
    let spec = &diff.spec;
    let (start, len) = joint_window(spec, digits.pre.len(), digits.period.len());
    let window = start..start + len;
    let (all_zero, all_max) = if spec.is_periodic() {
        (
            window.clone().all(|n| digits.value(spec, n) == 0),
            window.clone().all(|n| digits.value(spec, n) + 1 == spec.radix_at(n)),
        )
    } else {
        (
            digits.period.iter().all(|t| *t == TailDigit::Low(0)),
            digits.period.iter().all(|t| *t == TailDigit::High(0)),
        )
    };
    let head = BigInt::from(diff.residue(start - 1));
    if all_zero {
        Ok(OrbitRelation::SameOrbit(head))
    } else if all_max {
        Ok(OrbitRelation::SameOrbit(head - BigInt::from(spec.modulus(start - 1))))
    } else {
        Ok(OrbitRelation::DistinctOrbits)
    }
}

/// Counts from checking the depth-`i` clopen cover.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionReport {
    pub cylinders: u64,
    pub children_per_cylinder: u64,
    /// `f` sends residue `r` to `r + 1 mod m_i` for every cylinder.
    pub cyclic: bool,
    /// Every depth-`i` cylinder is the disjoint union of `j_{i+1}` depth-`(i+1)` cylinders.
    pub refines: bool,
}

impl PartitionReport {
    pub fn ok(&self) -> bool {
        self.cyclic && self.refines
    }
}

fn residue_u64(spec: &RadixSpec, digits: &[u64]) -> u64 {
    digits
        .iter()
        .enumerate()
        .rev()
        .fold(0u64, |acc, (i, &d)| acc * spec.radix_at(i + 1) + d)
}

/// Exhaustively checks the depth-`i` cylinder cover. Requires `m_{i+1}` to fit in memory.
pub fn partition_report(spec: &RadixSpec, i: usize) -> PartitionReport {
    let cylinders = spec
        .modulus(i)
        .to_u64()
        .expect("cover too large to enumerate");
    let branching = spec.radix_at(i + 1);

    let mut cyclic = true;
    for r in 0..cylinders {
        let representative = AdicPoint::from_residue(spec.clone(), &BigUint::from(r), i)
            .expect("residue below modulus");
        let image = translate(&representative, &BigInt::one()).expect("exact point");
        if image.residue(i) != BigUint::from((r + 1) % cylinders) {
            cyclic = false;
            break;
        }
    }

    let total = cylinders * branching;
    let mut covered = vec![false; total as usize];
    let mut refines = true;
    let mut parent = DigitVector::zeros(spec.clone(), i);
    'outer: for r in 0..cylinders {
        let mut child: Vec<u64> = parent.digits().to_vec();
        child.push(0);
        for t in 0..branching {
            child[i] = t;
            let s = residue_u64(spec, &child);
            if s >= total || s % cylinders != r || covered[s as usize] {
                refines = false;
                break 'outer;
            }
            covered[s as usize] = true;
        }
        parent.increment();
    }
    refines &= covered.iter().all(|&c| c);

    PartitionReport {
        cylinders,
        children_per_cylinder: branching,
        cyclic,
        refines,
    }
}

pub fn verify_cyclic_partition(spec: &RadixSpec, i: usize) -> bool {
    partition_report(spec, i).ok()
}
