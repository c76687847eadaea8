use std::fmt;

use crate::error::{Error, Result};

/// Largest trial divisor used by [`Prime::new`].
const TRIAL_BOUND: u64 = 1_000_000;

/// A rational prime, validated by trial division.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(transparent)]
pub struct Prime(u64);

impl Prime {
    pub fn new(p: u64) -> Result<Self> {
        if p < 2 {
            return Err(Error::NotPrime(p));
        }
        // Trial division certifies primality only below TRIAL_BOUND^2.
        if p / TRIAL_BOUND >= TRIAL_BOUND {
            return Err(Error::NotPrime(p));
        }
        let mut d = 2u64;
        while d * d <= p {
            if p.is_multiple_of(d) {
                return Err(Error::NotPrime(p));
            }
            d += 1;
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_small_primes() {
        for p in [2u64, 3, 5, 7, 11, 101, 7919] {
            assert_eq!(Prime::new(p).unwrap().get(), p);
        }
    }

    #[test]
    fn rejects_composites_and_units() {
        for n in [0u64, 1, 4, 9, 15, 7917, 1_000_003 * 3] {
            assert!(Prime::new(n).is_err(), "{n}");
        }
    }
}
