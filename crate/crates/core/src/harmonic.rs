//! Certified harmonic numbers for integer and real arguments.

use rug::Rational;

use crate::constants::{digamma_tail_bracket, euler_gamma};
use crate::error::{Error, Result};
use crate::interval::{Interval, PrecisionConfig};
use crate::util::pow10;

/// Largest index kept as an exact rational; past this the accumulation is
/// certified interval arithmetic.
pub const EXACT_LIMIT: u64 = 10_000;

/// A harmonic number with its certified enclosure and, when cheap, the exact
/// rational value.
#[derive(Clone, Debug)]
pub struct HarmonicValue {
    pub argument: Rational,
    pub value: Interval,
    pub exact: Option<Rational>,
}

/// Incremental harmonic-number state: exact while the index stays at or
/// below [`EXACT_LIMIT`], certified interval accumulation afterwards.
#[derive(Clone, Debug)]
pub struct HarmonicSeq {
    k: u64,
    exact: Option<Rational>,
    value: Interval,
    digits: u32,
}

impl HarmonicSeq {
    /// Starts at `H_0 = 0`.
    pub fn new(digits: u32) -> Self {
        HarmonicSeq {
            k: 0,
            exact: Some(Rational::new()),
            value: Interval::exact_u64(0, digits),
            digits,
        }
    }

    pub fn index(&self) -> u64 {
        self.k
    }

    /// Advances to `H_{k+1}`.
    pub fn step(&mut self) {
        self.k += 1;
        if self.k <= EXACT_LIMIT {
            let e = self.exact.as_mut().expect("exact state below EXACT_LIMIT");
            *e += Rational::from((1u64, self.k));
            self.value = Interval::from_rational(e, self.digits);
        } else {
            self.exact = None;
            let inv = Interval::from_rational(&Rational::from((1u64, self.k)), self.digits);
            self.value = self.value.add(&inv);
        }
    }

    pub fn advance_to(&mut self, k: u64) {
        assert!(k >= self.k, "HarmonicSeq cannot rewind");
        while self.k < k {
            self.step();
        }
    }

    pub fn exact(&self) -> Option<&Rational> {
        self.exact.as_ref()
    }

    pub fn value(&self) -> &Interval {
        &self.value
    }
}

/// `H_n` for a non-negative integer: exact rational for `n <= 10^4`,
/// certified interval accumulation beyond.
pub fn harmonic_int(n: u64, digits: u32) -> HarmonicValue {
    let mut seq = HarmonicSeq::new(digits);
    seq.advance_to(n);
    HarmonicValue {
        argument: Rational::from(n),
        value: seq.value().clone(),
        exact: seq.exact().cloned(),
    }
}

/// Exact rational harmonic numbers `H_0..H_n` in one pass; `n <= 10^4`.
pub fn harmonic_rationals(n: u64) -> Vec<Rational> {
    assert!(
        n <= EXACT_LIMIT,
        "exact harmonic table capped at {EXACT_LIMIT}"
    );
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut h = Rational::new();
    out.push(h.clone());
    for k in 1..=n {
        h += Rational::from((1u64, k));
        out.push(h.clone());
    }
    out
}

/// Enclosure of `H_x = Psi(x+1) + gamma` for rational `x > -1`.
///
/// Uses `H_x = H_{x+n} - sum_{k=1..n} 1/(x+k)` with the tail
/// `H_{x+n} - gamma - log(x+n+1/2)` bracketed by the shifted Bernoulli
/// series, `n` raised until the bracket meets the working precision.
pub fn harmonic_real(x: &Rational, digits: u32, cfg: &PrecisionConfig) -> Result<Interval> {
    if *x <= -1i32 {
        return Err(Error::Domain {
            op: "harmonic_real",
            msg: format!("argument {x} <= -1 rejected"),
        });
    }
    let eps = pow10(-(digits as i64) - 2);
    // z = x + n + 1/2 must be large enough for the series to reach eps
    let need = Rational::from(((digits as u64 + 6) * 3665 / 10000 + 3, 1u64));
    let mut n: u64 = 0;
    let mut z = x + Rational::from((1, 2));
    while z < need {
        n += 1;
        z += 1u32;
    }
    let (s_lo, s_hi) = digamma_tail_bracket(&z, &eps)?;
    let mut shift_sum = Rational::new();
    for k in 1..=n {
        shift_sum += Rational::from(1) / (x + Rational::from(k));
    }
    let gamma = euler_gamma(digits + 2, cfg)?;
    let log_z = Interval::from_rational(&z, digits + 4).ln()?;
    // H_x = gamma + log z + D - shift_sum, D in [s_lo, s_hi]
    let d = Interval::from_rational_bounds(&s_lo, &s_hi, digits + 4);
    let shift = Interval::from_rational(&shift_sum, digits + 4);
    Ok(gamma.add(&log_z).add(&d).sub(&shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::Pow;

    #[test]
    fn harmonic_int_small_values() {
        assert_eq!(harmonic_int(0, 40).exact.unwrap(), Rational::new());
        assert_eq!(harmonic_int(2, 40).exact.unwrap(), Rational::from((3, 2)));
        // n=4 against a direct rational summation oracle
        let oracle = (1..=4u64).fold(Rational::new(), |a, k| a + Rational::from((1u64, k)));
        assert_eq!(oracle, Rational::from((25, 12)));
        assert_eq!(harmonic_int(4, 40).exact.unwrap(), oracle);
        assert!(harmonic_int(4, 40).value.contains_rational(&oracle));
    }

    #[test]
    fn harmonic_seq_crosses_exact_limit() {
        let mut seq = HarmonicSeq::new(30);
        seq.advance_to(EXACT_LIMIT + 5);
        assert!(seq.exact().is_none());
        // still a valid enclosure: compare against log bounds
        // log(n) < H_n < log(n) + 1
        let n = seq.index();
        let ln = Interval::exact_u64(n, 30).ln().unwrap();
        assert!(seq.value().hi() > ln.lo());
        assert!(seq.value().lo() < &(ln.hi().clone() + 1u32));
    }

    #[test]
    fn harmonic_real_at_integer_matches_exact() {
        let cfg = PrecisionConfig::default();
        let h3 = harmonic_real(&Rational::from(3), 40, &cfg).unwrap();
        assert!(h3.contains_rational(&Rational::from((11, 6))));
    }

    #[test]
    fn harmonic_real_at_one_half() {
        let cfg = PrecisionConfig::default();
        let h = harmonic_real(&Rational::from((1, 2)), 40, &cfg).unwrap();
        // independent oracle: H_{1/2} = 2 - 2 log 2
        let two = Interval::exact_u64(2, 44);
        let target = two.sub(&two.ln().unwrap().mul(&two));
        assert!(h.intersects(&target));
        // and the bracket evaluated directly at n = 1000 must agree
        let x = Rational::from((1, 2));
        let n = 1000u64;
        let mut sum = Rational::new();
        for k in 1..=n {
            sum += Rational::from(1) / (&x + Rational::from(k));
        }
        let z = &x + Rational::from((2 * n as i64 + 1, 2));
        let log_z = Interval::from_rational(&z, 44).ln().unwrap();
        let gamma = euler_gamma(42, &cfg).unwrap();
        let lo_corr = Interval::from_rational(
            &(Rational::from(1) / (Rational::from(24) * (&z + Rational::from((1, 2))).pow(2))),
            44,
        );
        let hi_corr = Interval::from_rational(
            &(Rational::from(1) / (Rational::from(24) * z.clone().pow(2))),
            44,
        );
        let base = gamma.add(&log_z).sub(&Interval::from_rational(&sum, 44));
        let oracle = base.add(&lo_corr).hull(&base.add(&hi_corr));
        assert!(
            h.intersects(&oracle),
            "series and Prop-bracket oracle disagree"
        );
    }

    #[test]
    fn harmonic_real_rejects_low_arguments() {
        let cfg = PrecisionConfig::default();
        assert!(harmonic_real(&Rational::from(-2), 40, &cfg).is_err());
        assert!(harmonic_real(&Rational::from(-1), 40, &cfg).is_err());
    }
}
