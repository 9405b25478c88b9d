use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, serde_rational, serde_rational_vec};

/// Radii `rho_n`, `n ≥ 1`, of a shrinking hole.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadiusSchedule {
    /// `rho_n = c · lambda^n`.
    Geometric {
        #[serde(with = "serde_rational")]
        c: BigRational,
        #[serde(with = "serde_rational")]
        lambda: BigRational,
    },
    /// `rho_n = c / n`.
    Harmonic {
        #[serde(with = "serde_rational")]
        c: BigRational,
    },
    /// `rho_n = values[n-1]` for `n ≤ K`, then `values[K-1] · lambda^{n-K}`.
    Explicit {
        #[serde(with = "serde_rational_vec")]
        values: Vec<BigRational>,
        #[serde(with = "serde_rational")]
        lambda: BigRational,
    },
}

impl RadiusSchedule {
    pub fn geometric(c: BigRational, lambda: BigRational) -> Self {
        RadiusSchedule::Geometric { c, lambda }
    }

    pub fn harmonic(c: BigRational) -> Self {
        RadiusSchedule::Harmonic { c }
    }

    /// `rho_n = 2^{-n}`.
    pub fn dyadic() -> Self {
        RadiusSchedule::geometric(BigRational::one(), BigRational::new(1.into(), 2.into()))
    }

    /// # Panics
    ///
    /// Panics if `n == 0`.
    pub fn radius(&self, n: usize) -> BigRational {
        assert!(n >= 1, "scales start at 1");
        match self {
            RadiusSchedule::Geometric { c, lambda } => c * Pow::pow(lambda, n),
            RadiusSchedule::Harmonic { c } => c / BigRational::from_integer(BigInt::from(n)),
            RadiusSchedule::Explicit { values, lambda } => {
                if n <= values.len() {
                    values[n - 1].clone()
                } else {
                    &values[values.len() - 1] * Pow::pow(lambda, n - values.len())
                }
            }
        }
    }

    /// Checks positivity, monotonicity and decay. Returns warnings for
    /// explicit lists that are nonincreasing but not strictly decreasing.
    pub fn validate(&self) -> Result<Vec<String>, String> {
        let check_lambda = |lambda: &BigRational| {
            if lambda.is_positive() && lambda < &BigRational::one() {
                Ok(())
            } else {
                Err(format!("lambda must lie in (0, 1), got {}", format_rational(lambda)))
            }
        };
        match self {
            RadiusSchedule::Geometric { c, lambda } => {
                if !c.is_positive() {
                    return Err(format!("c must be positive, got {}", format_rational(c)));
                }
                check_lambda(lambda)?;
                Ok(Vec::new())
            }
            RadiusSchedule::Harmonic { c } => {
                if !c.is_positive() {
                    return Err(format!("c must be positive, got {}", format_rational(c)));
                }
                Ok(Vec::new())
            }
            RadiusSchedule::Explicit { values, lambda } => {
                if values.is_empty() {
                    return Err("explicit schedule needs at least one radius".into());
                }
                check_lambda(lambda)?;
                let mut warnings = Vec::new();
                for (i, rho) in values.iter().enumerate() {
                    if rho <= &BigRational::zero() {
                        return Err(format!("radius {} is not positive", i + 1));
                    }
                    if i > 0 {
                        let prev = &values[i - 1];
                        if rho > prev {
                            return Err(format!("radius {} increases the schedule", i + 1));
                        }
                        if rho == prev {
                            warnings.push(format!(
                                "radii {} and {} are equal; schedule is only nonincreasing",
                                i,
                                i + 1
                            ));
                        }
                    }
                }
                Ok(warnings)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn radii() {
        let s = RadiusSchedule::dyadic();
        assert_eq!(s.radius(1), rat(1, 2));
        assert_eq!(s.radius(6), rat(1, 64));
        let h = RadiusSchedule::harmonic(rat(1, 2));
        assert_eq!(h.radius(4), rat(1, 8));
        let e = RadiusSchedule::Explicit {
            values: vec![rat(1, 2), rat(1, 3)],
            lambda: rat(1, 3),
        };
        assert_eq!(e.radius(2), rat(1, 3));
        assert_eq!(e.radius(4), rat(1, 27));
    }

    #[test]
    fn validation() {
        assert!(RadiusSchedule::dyadic().validate().unwrap().is_empty());
        assert!(RadiusSchedule::geometric(rat(1, 1), rat(1, 1)).validate().is_err());
        assert!(RadiusSchedule::geometric(rat(0, 1), rat(1, 2)).validate().is_err());
        assert!(RadiusSchedule::harmonic(rat(-1, 2)).validate().is_err());
        let flat = RadiusSchedule::Explicit {
            values: vec![rat(1, 2), rat(1, 2), rat(1, 4)],
            lambda: rat(1, 2),
        };
        assert_eq!(flat.validate().unwrap().len(), 1);
        let rising = RadiusSchedule::Explicit {
            values: vec![rat(1, 4), rat(1, 2)],
            lambda: rat(1, 2),
        };
        assert!(rising.validate().is_err());
    }

    #[test]
    fn json_form() {
        let s = RadiusSchedule::geometric(rat(1, 10), rat(1, 2));
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, r#"{"kind":"geometric","c":"1/10","lambda":"1/2"}"#);
        assert_eq!(serde_json::from_str::<RadiusSchedule>(&text).unwrap(), s);
        assert!(serde_json::from_str::<RadiusSchedule>(r#"{"kind":"harmonic","c":"x"}"#).is_err());
    }
}
