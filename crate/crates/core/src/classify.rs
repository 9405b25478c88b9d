//! Conjugacy classification of adding machines.
//!
//! Two adding machines are topologically conjugate exactly when their
//! prime-count functions `M_α(p) = Σ_i v_p(j_i)` agree. For eventually
//! periodic sequences every prime dividing the repeating block has infinite
//! count and the preperiod contributes finite counts. `j_n = n + 1` gives
//! every prime an infinite count; `j_n = p_n` gives every prime count 1.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::radix::{RadixSpec, SpecKind};

/// `M_α(p)` for a single prime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Multiplicity {
    Finite(u64),
    Infinite,
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Finite(n) => write!(f, "{n}"),
            Multiplicity::Infinite => f.write_str("inf"),
        }
    }
}

/// The invariant `M_α` as a total function on primes: finitely many listed
/// values and one shared value for every other prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCountFunction {
    /// Never holds an entry equal to `unlisted`, so equality is structural.
    listed: BTreeMap<u64, Multiplicity>,
    unlisted: Multiplicity,
}

impl PrimeCountFunction {
    fn new(listed: BTreeMap<u64, Multiplicity>, unlisted: Multiplicity) -> Self {
        let listed = listed.into_iter().filter(|&(_, m)| m != unlisted).collect();
        PrimeCountFunction { listed, unlisted }
    }

    /// Primes whose count differs from [`Self::unlisted`].
    pub fn listed(&self) -> &BTreeMap<u64, Multiplicity> {
        &self.listed
    }

    /// Count shared by every prime not in [`Self::listed`].
    pub fn unlisted(&self) -> Multiplicity {
        self.unlisted
    }

    pub fn count(&self, p: u64) -> Multiplicity {
        self.listed.get(&p).copied().unwrap_or(self.unlisted)
    }

    pub fn is_infinity_adic(&self) -> bool {
        self.unlisted == Multiplicity::Infinite && self.listed.is_empty()
    }
}

impl fmt::Display for PrimeCountFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (p, m)) in self.listed.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}: {m}")?;
        }
        if self.unlisted != Multiplicity::Finite(0) {
            let sep = if self.listed.is_empty() { "all" } else { ", other" };
            write!(f, "{sep} primes: {}", self.unlisted)?;
        }
        f.write_str("}")
    }
}

/// Prime factorization by trial division, as `(prime, exponent)` pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u64)> {
    let mut factors = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            factors.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

pub fn compute_m(spec: &RadixSpec) -> PrimeCountFunction {
    match spec.kind() {
        SpecKind::Factorial => PrimeCountFunction::new(BTreeMap::new(), Multiplicity::Infinite),
        SpecKind::Primes => PrimeCountFunction::new(BTreeMap::new(), Multiplicity::Finite(1)),
        SpecKind::Periodic { preperiod, period } => {
            let mut listed: BTreeMap<u64, Multiplicity> = period
                .iter()
                .flat_map(|&j| factorize(j))
                .map(|(p, _)| (p, Multiplicity::Infinite))
                .collect();
            for (p, e) in preperiod.iter().flat_map(|&j| factorize(j)) {
                let entry = listed.entry(p).or_insert(Multiplicity::Finite(0));
                if let Multiplicity::Finite(n) = entry {
                    *n += e;
                }
            }
            PrimeCountFunction::new(listed, Multiplicity::Finite(0))
        }
    }
}

fn is_prime(n: u64) -> bool {
    factorize(n) == [(n, 1)]
}

/// Smallest prime where `M_a` and `M_b` differ, if any.
pub fn conjugacy_witness(a: &RadixSpec, b: &RadixSpec) -> Option<u64> {
    let (ma, mb) = (compute_m(a), compute_m(b));
    let mut candidates: BTreeSet<u64> = ma.listed.keys().chain(mb.listed.keys()).copied().collect();
    if ma.unlisted != mb.unlisted {
        let outside = (2..).find(|&p| is_prime(p) && !candidates.contains(&p));
        candidates.extend(outside);
    }
    candidates.into_iter().find(|&p| ma.count(p) != mb.count(p))
}

pub fn conjugate(a: &RadixSpec, b: &RadixSpec) -> bool {
    compute_m(a) == compute_m(b)
}

pub fn is_infinity_adic(spec: &RadixSpec) -> bool {
    compute_m(spec).is_infinity_adic()
}
