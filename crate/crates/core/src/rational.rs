//! Exact probabilities.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A probability `numer / denom` held in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalProb {
    numer: BigUint,
    denom: BigUint,
}

impl RationalProb {
    pub fn new(numer: impl Into<BigUint>, denom: impl Into<BigUint>) -> Result<Self> {
        let numer = numer.into();
        let denom = denom.into();
        if denom.is_zero() {
            return Err(Error::Parse("probability with zero denominator".into()));
        }
        if numer > denom {
            return Err(Error::Parse(format!("{numer}/{denom} exceeds 1")));
        }
        let g = numer.gcd(&denom);
        Ok(Self { numer: numer / &g, denom: denom / g })
    }

    /// `successes / total` for a completed count.
    pub fn from_counts(successes: u64, total: u64) -> Self {
        Self::new(successes, total).expect("count exceeds its total")
    }

    pub fn zero() -> Self {
        Self { numer: BigUint::zero(), denom: BigUint::one() }
    }

    pub fn one() -> Self {
        Self { numer: BigUint::one(), denom: BigUint::one() }
    }

    pub fn numer(&self) -> &BigUint {
        &self.numer
    }

    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    pub fn to_f64(&self) -> f64 {
        // Both parts fit comfortably in f64 range at the sizes used here.
        self.numer.to_f64().unwrap_or(f64::NAN) / self.denom.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering with `places` digits, rounded half-up from the exact value.
    pub fn render(&self, places: u32) -> String {
        let scale = BigUint::from(10u32).pow(places);
        let two = BigUint::from(2u32);
        let scaled = (&self.numer * &scale * &two + &self.denom) / (&self.denom * &two);
        let (int, frac) = scaled.div_rem(&scale);
        if places == 0 {
            int.to_string()
        } else {
            format!("{int}.{:0>width$}", frac.to_string(), width = places as usize)
        }
    }
}

impl Ord for RationalProb {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.numer * &other.denom).cmp(&(&other.numer * &self.denom))
    }
}

impl PartialOrd for RationalProb {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RationalProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer, self.denom)
    }
}

/// Accepts `a/b` or a bare integer (`0` or `1`).
impl FromStr for RationalProb {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let parse = |t: &str| {
            t.trim().parse::<BigUint>().map_err(|e| Error::Parse(format!("{s:?}: {e}")))
        };
        match s.split_once('/') {
            Some((a, b)) => Self::new(parse(a)?, parse(b)?),
            None => Self::new(parse(s)?, 1u32),
        }
    }
}

impl Serialize for RationalProb {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalProb {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    // Each partial product C(n-k+i, i) is an integer, so the division is exact.
    (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(n - k + i) / BigUint::from(i))
}

/// `C(n, k)` for the small arguments used in enumeration.
pub fn binomial_u64(n: u64, k: u64) -> u64 {
    binomial(n, k).to_u64().expect("binomial exceeds u64")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_and_validates() {
        let p = RationalProb::new(256u32, 512u32).unwrap();
        assert_eq!(p.to_string(), "1/2");
        assert!(RationalProb::new(3u32, 2u32).is_err());
        assert!(RationalProb::new(0u32, 0u32).is_err());
        assert_eq!(RationalProb::new(0u32, 7u32).unwrap(), RationalProb::zero());
    }

    #[test]
    fn render_five_places() {
        assert_eq!(RationalProb::from_counts(146, 512).render(5), "0.28516");
        assert_eq!(RationalProb::one().render(5), "1.00000");
        assert_eq!(RationalProb::from_counts(1, 2).render(5), "0.50000");
        assert_eq!(RationalProb::from_counts(57, 64).render(5), "0.89063");
        assert_eq!(RationalProb::from_counts(1, 3).render(0), "0");
    }

    #[test]
    fn ordering_is_numeric() {
        let a: RationalProb = "1/3".parse().unwrap();
        let b: RationalProb = "2/5".parse().unwrap();
        assert!(a < b);
        assert_eq!("2/4".parse::<RationalProb>().unwrap(), "1/2".parse().unwrap());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial_u64(9, 4), 126);
        assert_eq!(binomial_u64(9, 0), 1);
        assert_eq!(binomial_u64(3, 5), 0);
        assert_eq!(binomial(81, 10).to_string(), "1878392407320");
    }
}
