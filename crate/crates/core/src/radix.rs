//! Mixed-radix digit arithmetic for the spaces `Δ_α`.
//!
//! A radix sequence `α = (j_1, j_2, …)` is either eventually periodic
//! (`"2,3|4"` means `2, 3, 4, 4, 4, …`) or one of two builtin families.
//! Digits are indexed from 1. Cumulative moduli `m_L = j_1 ⋯ j_L` are
//! arbitrary precision, as are the positional residues
//! `X_L = Σ_{k ≤ L} x_k · m_{k-1}`.

use std::fmt;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RadixError {
    #[error("radix entry {value} at position {position} is smaller than 2")]
    RadixTooSmall { position: usize, value: u64 },
    #[error("the repeating block of a radix sequence must be nonempty")]
    EmptyPeriod,
    #[error("cannot parse radix sequence {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("digit vectors have different radix sequences")]
    SpecMismatch,
    #[error("digit vectors have different depths ({left} vs {right})")]
    DepthMismatch { left: usize, right: usize },
    #[error("residue {residue} is out of range for depth {depth} (modulus {modulus})")]
    ResidueOutOfRange {
        residue: BigUint,
        depth: usize,
        modulus: BigUint,
    },
    #[error("digit {digit} at position {position} is not below the radix {radix}")]
    DigitOutOfRange { position: usize, digit: u64, radix: u64 },
}

/// The shape of a radix sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SpecKind {
    /// `preperiod` followed by `period` repeated forever.
    Periodic { preperiod: Vec<u64>, period: Vec<u64> },
    /// `j_n = n + 1`.
    Factorial,
    /// `j_n` is the n-th prime.
    Primes,
}

/// A radix sequence `α` with every entry at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RadixSpec {
    kind: SpecKind,
}

impl RadixSpec {
    pub fn periodic(preperiod: Vec<u64>, period: Vec<u64>) -> Result<Self, RadixError> {
        if period.is_empty() {
            return Err(RadixError::EmptyPeriod);
        }
        for (i, &value) in preperiod.iter().chain(period.iter()).enumerate() {
            if value < 2 {
                return Err(RadixError::RadixTooSmall {
                    position: i + 1,
                    value,
                });
            }
        }
        Ok(RadixSpec {
            kind: SpecKind::Periodic { preperiod, period },
        })
    }

    /// The constant sequence `(j, j, j, …)`.
    pub fn constant(j: u64) -> Result<Self, RadixError> {
        Self::periodic(Vec::new(), vec![j])
    }

    pub fn factorial() -> Self {
        RadixSpec {
            kind: SpecKind::Factorial,
        }
    }

    pub fn primes() -> Self {
        RadixSpec {
            kind: SpecKind::Primes,
        }
    }

    pub fn kind(&self) -> &SpecKind {
        &self.kind
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self.kind, SpecKind::Periodic { .. })
    }

    /// `(preperiod length, period length)` for eventually periodic specs.
    pub fn periodic_shape(&self) -> Option<(usize, usize)> {
        match &self.kind {
            SpecKind::Periodic { preperiod, period } => Some((preperiod.len(), period.len())),
            _ => None,
        }
    }

    /// `j_n` for `n ≥ 1`.
    ///
    /// # Panics
    ///
    /// Panics if `n == 0`.
    pub fn radix_at(&self, n: usize) -> u64 {
        assert!(n >= 1, "radix positions start at 1");
        match &self.kind {
            SpecKind::Periodic { preperiod, period } => {
                if n <= preperiod.len() {
                    preperiod[n - 1]
                } else {
                    period[(n - 1 - preperiod.len()) % period.len()]
                }
            }
            SpecKind::Factorial => n as u64 + 1,
            SpecKind::Primes => nth_prime(n),
        }
    }

    /// `m_L = j_1 ⋯ j_L`, with `m_0 = 1`.
    pub fn modulus(&self, depth: usize) -> BigUint {
        (1..=depth).fold(BigUint::one(), |acc, n| acc * self.radix_at(n))
    }

    /// All moduli `m_0, …, m_depth`.
    pub fn moduli(&self, depth: usize) -> Vec<BigUint> {
        let mut out = Vec::with_capacity(depth + 1);
        out.push(BigUint::one());
        for n in 1..=depth {
            let next = &out[n - 1] * self.radix_at(n);
            out.push(next);
        }
        out
    }

    /// Smallest depth `L` with `m_L > value`.
    pub fn depth_exceeding(&self, value: &BigUint) -> usize {
        let mut m = BigUint::one();
        let mut depth = 0;
        while &m <= value {
            depth += 1;
            m *= self.radix_at(depth);
        }
        depth
    }
}

impl fmt::Display for RadixSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SpecKind::Factorial => f.write_str("factorial"),
            SpecKind::Primes => f.write_str("primes"),
            SpecKind::Periodic { preperiod, period } => {
                if !preperiod.is_empty() {
                    write_list(f, preperiod)?;
                    f.write_str("|")?;
                }
                write_list(f, period)
            }
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, values: &[u64]) -> fmt::Result {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{v}")?;
    }
    Ok(())
}

/// Parses a canonical decimal (no sign, no leading zeros).
pub(crate) fn parse_canonical_u64(token: &str) -> Result<u64, String> {
    if token.is_empty() {
        return Err("empty entry".into());
    }
    if !token.bytes().all(|b| b.is_ascii_digit()) {
        return Err(format!("{token:?} is not a decimal integer"));
    }
    if token.len() > 1 && token.starts_with('0') {
        return Err(format!("{token:?} has a leading zero"));
    }
    token
        .parse::<u64>()
        .map_err(|e| format!("{token:?}: {e}"))
}

fn parse_list(text: &str) -> Result<Vec<u64>, String> {
    text.split(',').map(parse_canonical_u64).collect()
}

impl FromStr for RadixSpec {
    type Err = RadixError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let parse_err = |reason: String| RadixError::Parse {
            text: text.to_string(),
            reason,
        };
        match text {
            "factorial" => return Ok(RadixSpec::factorial()),
            "primes" => return Ok(RadixSpec::primes()),
            _ => {}
        }
        let (pre, period) = match text.split_once('|') {
            Some((pre, period)) => {
                if pre.is_empty() {
                    return Err(parse_err("empty preperiod before '|'".into()));
                }
                (parse_list(pre).map_err(parse_err)?, period)
            }
            None => (Vec::new(), text),
        };
        let period = parse_list(period).map_err(parse_err)?;
        RadixSpec::periodic(pre, period)
    }
}

impl Serialize for RadixSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RadixSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

static PRIMES: Mutex<Vec<u64>> = Mutex::new(Vec::new());

/// The n-th prime (1-indexed), grown on demand by trial division.
pub fn nth_prime(n: usize) -> u64 {
    assert!(n >= 1);
    let mut primes = PRIMES.lock().unwrap_or_else(|e| e.into_inner());
    if primes.is_empty() {
        primes.push(2);
    }
    while primes.len() < n {
        let mut candidate = primes[primes.len() - 1] + 1;
        loop {
            let is_prime = primes
                .iter()
                .take_while(|&&p| p * p <= candidate)
                .all(|&p| !candidate.is_multiple_of(p));
            if is_prime {
                break;
            }
            candidate += 1;
        }
        primes.push(candidate);
    }
    primes[n - 1]
}

/// A finite truncation `(x_1, …, x_L)` of a point of `Δ_α`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitVector {
    spec: RadixSpec,
    digits: Vec<u64>,
}

impl DigitVector {
    pub fn new(spec: RadixSpec, digits: Vec<u64>) -> Result<Self, RadixError> {
        for (i, &digit) in digits.iter().enumerate() {
            let radix = spec.radix_at(i + 1);
            if digit >= radix {
                return Err(RadixError::DigitOutOfRange {
                    position: i + 1,
                    digit,
                    radix,
                });
            }
        }
        Ok(DigitVector { spec, digits })
    }

    pub fn zeros(spec: RadixSpec, depth: usize) -> Self {
        DigitVector {
            spec,
            digits: vec![0; depth],
        }
    }

    pub fn spec(&self) -> &RadixSpec {
        &self.spec
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn depth(&self) -> usize {
        self.digits.len()
    }

    /// Carry addition `z_n = x_n + y_n + t_{n-1} mod j_n`; the carry out of
    /// the last position is dropped.
    pub fn add(&self, other: &DigitVector) -> Result<DigitVector, RadixError> {
        if self.spec != other.spec {
            return Err(RadixError::SpecMismatch);
        }
        if self.depth() != other.depth() {
            return Err(RadixError::DepthMismatch {
                left: self.depth(),
                right: other.depth(),
            });
        }
        let mut carry = 0u64;
        let digits = self
            .digits
            .iter()
            .zip(&other.digits)
            .enumerate()
            .map(|(i, (&x, &y))| {
                let radix = self.spec.radix_at(i + 1);
                // x, y < radix and carry ≤ 1, so the sum cannot overflow for radix < 2^63.
                let total = x + y + carry;
                carry = total / radix;
                total % radix
            })
            .collect();
        Ok(DigitVector {
            spec: self.spec.clone(),
            digits,
        })
    }

    /// In-place `+1`, dropping the carry out of the last position.
    pub fn increment(&mut self) {
        for (i, digit) in self.digits.iter_mut().enumerate() {
            let radix = self.spec.radix_at(i + 1);
            if *digit + 1 < radix {
                *digit += 1;
                return;
            }
            *digit = 0;
        }
    }

    /// `X_L = Σ x_k · m_{k-1}`, evaluated Horner-style from the top digit.
    pub fn to_residue(&self) -> BigUint {
        let mut value = BigUint::zero();
        for (i, &digit) in self.digits.iter().enumerate().rev() {
            value = value * self.spec.radix_at(i + 1) + digit;
        }
        value
    }

    /// Inverse of [`DigitVector::to_residue`] by repeated division.
    pub fn from_residue(
        spec: RadixSpec,
        residue: &BigUint,
        depth: usize,
    ) -> Result<Self, RadixError> {
        let mut rest = residue.clone();
        let mut digits = Vec::with_capacity(depth);
        for n in 1..=depth {
            let (q, r) = rest.div_rem(&BigUint::from(spec.radix_at(n)));
            digits.push(r.to_u64().expect("remainder below a u64 radix"));
            rest = q;
        }
        if !rest.is_zero() {
            return Err(RadixError::ResidueOutOfRange {
                residue: residue.clone(),
                depth,
                modulus: spec.modulus(depth),
            });
        }
        Ok(DigitVector { spec, digits })
    }
}

pub fn add_digits(xs: &DigitVector, ys: &DigitVector) -> Result<DigitVector, RadixError> {
    xs.add(ys)
}

pub fn digits_to_residue(xs: &DigitVector) -> BigUint {
    xs.to_residue()
}

pub fn residue_to_digits(
    spec: &RadixSpec,
    residue: &BigUint,
    depth: usize,
) -> Result<DigitVector, RadixError> {
    DigitVector::from_residue(spec.clone(), residue, depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> RadixSpec {
        text.parse().unwrap()
    }

    fn dv(s: &RadixSpec, digits: &[u64]) -> DigitVector {
        DigitVector::new(s.clone(), digits.to_vec()).unwrap()
    }

    #[test]
    fn radix_lookup() {
        assert_eq!(spec("2").radix_at(5), 2);
        assert_eq!(spec("2,3|4").radix_at(4), 4);
        assert_eq!(spec("2,3|4").radix_at(2), 3);
        assert_eq!(RadixSpec::factorial().radix_at(4), 5);
        let primes: Vec<u64> = (1..=8).map(|n| RadixSpec::primes().radix_at(n)).collect();
        assert_eq!(primes, [2, 3, 5, 7, 11, 13, 17, 19]);
    }

    #[test]
    fn moduli() {
        assert_eq!(spec("2").modulus(3), BigUint::from(8u32));
        assert_eq!(spec("2,3|4").modulus(4), BigUint::from(96u32));
        assert_eq!(RadixSpec::factorial().modulus(0), BigUint::one());
        assert_eq!(spec("7").modulus(0), BigUint::one());
        assert_eq!(RadixSpec::factorial().modulus(4), BigUint::from(120u32));
    }

    #[test]
    fn carry_addition() {
        let dyadic = spec("2");
        let sum = dv(&dyadic, &[1, 1, 0]).add(&dv(&dyadic, &[1, 0, 0])).unwrap();
        assert_eq!(sum.digits(), &[0, 0, 1]);

        let s232 = spec("2,3|2");
        let sum = dv(&s232, &[1, 2, 1]).add(&dv(&s232, &[1, 1, 1])).unwrap();
        assert_eq!(sum.digits(), &[0, 1, 1]);
        assert_eq!(sum.to_residue(), BigUint::from(8u32));

        let y = dv(&s232, &[1, 2, 0]);
        assert_eq!(dv(&s232, &[0, 0, 0]).add(&y).unwrap(), y);
    }

    #[test]
    fn add_rejects_mismatches() {
        let a = dv(&spec("2"), &[1, 0]);
        assert_eq!(
            a.add(&dv(&spec("2"), &[1])),
            Err(RadixError::DepthMismatch { left: 2, right: 1 })
        );
        assert_eq!(a.add(&dv(&spec("3"), &[1, 0])), Err(RadixError::SpecMismatch));
    }

    #[test]
    fn residues() {
        let s232 = spec("2,3|2");
        assert_eq!(dv(&s232, &[1, 2, 1]).to_residue(), BigUint::from(11u32));
        assert_eq!(dv(&s232, &[0, 0, 0]).to_residue(), BigUint::zero());
        assert_eq!(dv(&spec("2"), &[1, 0, 1]).to_residue(), BigUint::from(5u32));

        let back = residue_to_digits(&s232, &BigUint::from(8u32), 3).unwrap();
        assert_eq!(back.digits(), &[0, 1, 1]);
        let back = residue_to_digits(&spec("2"), &BigUint::from(5u32), 3).unwrap();
        assert_eq!(back.digits(), &[1, 0, 1]);
        let back = residue_to_digits(&s232, &BigUint::zero(), 3).unwrap();
        assert_eq!(back.digits(), &[0, 0, 0]);
    }

    #[test]
    fn residue_out_of_range() {
        let err = residue_to_digits(&spec("2"), &BigUint::from(8u32), 3).unwrap_err();
        assert!(matches!(err, RadixError::ResidueOutOfRange { depth: 3, .. }));
    }

    #[test]
    fn invalid_specs() {
        assert_eq!(
            RadixSpec::periodic(vec![2], vec![1]),
            Err(RadixError::RadixTooSmall { position: 2, value: 1 })
        );
        assert_eq!(RadixSpec::periodic(vec![2], vec![]), Err(RadixError::EmptyPeriod));
        for bad in ["", "1", "2,,3", "|4", "2|", "02", "+2", " 2", "2;3", "fact"] {
            assert!(bad.parse::<RadixSpec>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn text_round_trip() {
        for text in ["2", "2,3|4", "factorial", "primes", "10", "2,3", "12|5", "3,5|7,11,2"] {
            assert_eq!(spec(text).to_string(), text);
        }
    }

    #[test]
    fn increment_wraps() {
        let mut x = dv(&spec("2,3|2"), &[1, 2, 1]);
        x.increment();
        assert_eq!(x.digits(), &[0, 0, 0]);
        x.increment();
        assert_eq!(x.digits(), &[1, 0, 0]);
    }

    #[test]
    fn depth_exceeding() {
        assert_eq!(spec("2").depth_exceeding(&BigUint::from(7u32)), 3);
        assert_eq!(spec("2").depth_exceeding(&BigUint::from(8u32)), 4);
        assert_eq!(spec("2").depth_exceeding(&BigUint::zero()), 0);
    }
}
