//! Shared helpers for the integration suites: published-digit bands and a
//! deterministic pseudo-random stream for property sweeps.
//!
//! Each test binary compiles this module separately, so not every helper is
//! used from every binary.
#![allow(dead_code)]

use harmonic_li_core::util::{pow10, rational_from_decimal};
use harmonic_li_core::Interval;
use rug::Rational;

/// How a published decimal was produced from the underlying real.
#[derive(Clone, Copy, Debug)]
pub enum Printed {
    /// Rounded up (an upper bound column).
    Up,
    /// Rounded down (a lower bound column).
    Down,
    /// Rounded to nearest (an approximation column).
    Nearest,
    /// Truncated digits of the constant (trailing-ellipsis style).
    Truncated,
}

/// The band of reals that print as `s` under the given convention.
pub fn printed_band(s: &str, mode: Printed) -> (Rational, Rational) {
    let q = rational_from_decimal(s).unwrap();
    let dp = s.split('.').nth(1).map(|f| f.len()).unwrap_or(0) as i64;
    let ulp = pow10(-dp);
    match mode {
        Printed::Up => (Rational::from(&q - &ulp), q),
        Printed::Down | Printed::Truncated => (q.clone(), Rational::from(&q + &ulp)),
        Printed::Nearest => {
            let half = &ulp / Rational::from(2);
            (Rational::from(&q - &half), Rational::from(&q + &half))
        }
    }
}

/// True when the enclosure is consistent with the published digits: it
/// intersects the printed band and is itself no wider than one printed ulp.
pub fn matches_printed(iv: &Interval, s: &str, mode: Printed) -> bool {
    let (lo, hi) = printed_band(s, mode);
    let (a, b) = iv.to_rationals();
    let dp = s.split('.').nth(1).map(|f| f.len()).unwrap_or(0) as i64;
    let ulp = pow10(-dp);
    b >= lo && a <= hi && Rational::from(&b - &a) <= ulp
}

/// The enclosure sits entirely inside the printed band (used for the
/// truncated fundamental constants, where every printed digit must be
/// certified).
pub fn inside_printed(iv: &Interval, s: &str, mode: Printed) -> bool {
    let (lo, hi) = printed_band(s, mode);
    let (a, b) = iv.to_rationals();
    a >= lo && b <= hi
}

/// Small deterministic LCG for reproducible random sweeps.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.0
    }

    /// Uniform in `[0, 1)` with 1e-6 granularity, as an exact rational.
    pub fn unit_rational(&mut self) -> Rational {
        Rational::from((self.next_u64() % 1_000_000, 1_000_000u64))
    }

    pub fn range_u64(&mut self, lo: u64, hi: u64) -> u64 {
        lo + self.next_u64() % (hi - lo + 1)
    }
}
