//! Outward-rounded interval arithmetic over arbitrary-precision floats.
//!
//! Every operation returns an interval that contains the exact image of its
//! operand intervals: lower endpoints are rounded toward negative infinity
//! and upper endpoints toward positive infinity. All analytic quantities in
//! this crate flow through this type.

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Working precision in significant decimal digits, plus the ceiling that
/// refinement loops may escalate to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrecisionConfig {
    pub working_digits: u32,
    pub max_refine_digits: u32,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        PrecisionConfig {
            working_digits: 40,
            max_refine_digits: 200,
        }
    }
}

impl PrecisionConfig {
    pub fn new(working_digits: u32, max_refine_digits: u32) -> Result<Self> {
        if working_digits < 15 {
            return Err(Error::InvalidConfig {
                msg: format!("working_digits {working_digits} < 15"),
            });
        }
        if max_refine_digits < working_digits {
            return Err(Error::InvalidConfig {
                msg: format!(
                    "max_refine_digits {max_refine_digits} < working_digits {working_digits}"
                ),
            });
        }
        Ok(PrecisionConfig {
            working_digits,
            max_refine_digits,
        })
    }

    /// Configuration with a given working precision and the default ceiling
    /// (raised if needed to stay consistent).
    pub fn with_working(digits: u32) -> Result<Self> {
        let def = PrecisionConfig::default();
        PrecisionConfig::new(digits, def.max_refine_digits.max(digits))
    }

    pub fn check_refine(&self, digits: u32) -> Result<()> {
        if digits > self.max_refine_digits {
            Err(Error::PrecisionExceeded {
                requested: digits,
                max: self.max_refine_digits,
            })
        } else {
            Ok(())
        }
    }
}

/// Binary bits needed to honor `digits` significant decimal digits, with a
/// guard margin for intermediate rounding.
pub fn bits_for_digits(digits: u32) -> u32 {
    // log2(10) = 3.3219...
    (digits * 3322).div_ceil(1000) + 16
}

/// A certified enclosure `[lo, hi]` of a real number.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

impl Interval {
    /// Builds from endpoints; panics if `lo > hi` or either is not finite,
    /// since that always indicates an internal arithmetic bug.
    pub fn from_endpoints(lo: Float, hi: Float) -> Interval {
        assert!(
            lo.is_finite() && hi.is_finite(),
            "non-finite interval endpoint"
        );
        assert!(lo <= hi, "inverted interval: {lo} > {hi}");
        Interval { lo, hi }
    }

    pub fn point(f: Float) -> Interval {
        let hi = f.clone();
        Interval::from_endpoints(f, hi)
    }

    pub fn exact_u64(v: u64, digits: u32) -> Interval {
        let p = bits_for_digits(digits).max(64);
        Interval::point(Float::with_val(p, v))
    }

    pub fn exact_i64(v: i64, digits: u32) -> Interval {
        let p = bits_for_digits(digits).max(64);
        Interval::point(Float::with_val(p, v))
    }

    pub fn from_rational(q: &Rational, digits: u32) -> Interval {
        let p = bits_for_digits(digits);
        let lo = Float::with_val_round(p, q, Round::Down).0;
        let hi = Float::with_val_round(p, q, Round::Up).0;
        Interval::from_endpoints(lo, hi)
    }

    /// Enclosure `[a, b]` of two rationals with outward rounding.
    pub fn from_rational_bounds(a: &Rational, b: &Rational, digits: u32) -> Interval {
        let p = bits_for_digits(digits);
        let lo = Float::with_val_round(p, a, Round::Down).0;
        let hi = Float::with_val_round(p, b, Round::Up).0;
        Interval::from_endpoints(lo, hi)
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn width(&self) -> Float {
        Float::with_val_round(self.prec(), &self.hi - &self.lo, Round::Up).0
    }

    pub fn midpoint(&self) -> Float {
        let sum = Float::with_val(self.prec() + 1, &self.lo + &self.hi);
        sum / 2u32
    }

    pub fn mid_f64(&self) -> f64 {
        self.midpoint().to_f64()
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.lo.is_sign_positive() && !self.lo.is_zero()
    }

    pub fn is_strictly_negative(&self) -> bool {
        self.hi.is_sign_negative() && !self.hi.is_zero()
    }

    pub fn contains_zero(&self) -> bool {
        !self.is_strictly_positive() && !self.is_strictly_negative()
    }

    pub fn contains_rational(&self, q: &Rational) -> bool {
        self.lo.partial_cmp(q).is_some_and(|o| o.is_le())
            && self.hi.partial_cmp(q).is_some_and(|o| o.is_ge())
    }

    pub fn intersects(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// `self.hi < other.lo`: every point of `self` is below every point of
    /// `other`.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        self.hi < other.lo
    }

    /// Smallest interval containing both operands.
    pub fn hull(&self, other: &Interval) -> Interval {
        let lo = if self.lo <= other.lo {
            self.lo.clone()
        } else {
            other.lo.clone()
        };
        let hi = if self.hi >= other.hi {
            self.hi.clone()
        } else {
            other.hi.clone()
        };
        Interval::from_endpoints(lo, hi)
    }

    fn out_prec(&self, rhs: &Interval) -> u32 {
        self.prec().max(rhs.prec())
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        let p = self.out_prec(rhs);
        let lo = Float::with_val_round(p, &self.lo + &rhs.lo, Round::Down).0;
        let hi = Float::with_val_round(p, &self.hi + &rhs.hi, Round::Up).0;
        Interval::from_endpoints(lo, hi)
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        let p = self.out_prec(rhs);
        let lo = Float::with_val_round(p, &self.lo - &rhs.hi, Round::Down).0;
        let hi = Float::with_val_round(p, &self.hi - &rhs.lo, Round::Up).0;
        Interval::from_endpoints(lo, hi)
    }

    pub fn neg(&self) -> Interval {
        Interval::from_endpoints(
            Float::with_val(self.hi.prec(), -&self.hi),
            Float::with_val(self.lo.prec(), -&self.lo),
        )
    }

    pub fn abs(&self) -> Interval {
        if self.is_strictly_positive() {
            self.clone()
        } else if self.is_strictly_negative() {
            self.neg()
        } else {
            let mag_lo = Float::with_val(self.lo.prec(), self.lo.abs_ref());
            let mag_hi = Float::with_val(self.hi.prec(), self.hi.abs_ref());
            let hi = if mag_lo >= mag_hi { mag_lo } else { mag_hi };
            Interval::from_endpoints(Float::with_val(hi.prec(), 0), hi)
        }
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let p = self.out_prec(rhs);
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for x in [&self.lo, &self.hi] {
            for y in [&rhs.lo, &rhs.hi] {
                let d = Float::with_val_round(p, x * y, Round::Down).0;
                let u = Float::with_val_round(p, x * y, Round::Up).0;
                lo = Some(match lo {
                    Some(cur) if cur <= d => cur,
                    _ => d,
                });
                hi = Some(match hi {
                    Some(cur) if cur >= u => cur,
                    _ => u,
                });
            }
        }
        Interval::from_endpoints(lo.unwrap(), hi.unwrap())
    }

    pub fn div(&self, rhs: &Interval) -> Result<Interval> {
        if rhs.contains_zero() {
            return Err(Error::Domain {
                op: "div",
                msg: "divisor interval contains zero".into(),
            });
        }
        let p = self.out_prec(rhs);
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for x in [&self.lo, &self.hi] {
            for y in [&rhs.lo, &rhs.hi] {
                let d = Float::with_val_round(p, x / y, Round::Down).0;
                let u = Float::with_val_round(p, x / y, Round::Up).0;
                lo = Some(match lo {
                    Some(cur) if cur <= d => cur,
                    _ => d,
                });
                hi = Some(match hi {
                    Some(cur) if cur >= u => cur,
                    _ => u,
                });
            }
        }
        Ok(Interval::from_endpoints(lo.unwrap(), hi.unwrap()))
    }

    pub fn recip(&self) -> Result<Interval> {
        if self.contains_zero() {
            return Err(Error::Domain {
                op: "recip",
                msg: "interval contains zero".into(),
            });
        }
        let p = self.prec();
        let lo = Float::with_val_round(p, self.hi.recip_ref(), Round::Down).0;
        let hi = Float::with_val_round(p, self.lo.recip_ref(), Round::Up).0;
        Ok(Interval::from_endpoints(lo, hi))
    }

    pub fn ln(&self) -> Result<Interval> {
        if !self.is_strictly_positive() {
            return Err(Error::Domain {
                op: "log",
                msg: "argument not strictly positive".into(),
            });
        }
        let p = self.prec();
        let lo = Float::with_val_round(p, self.lo.ln_ref(), Round::Down).0;
        let hi = Float::with_val_round(p, self.hi.ln_ref(), Round::Up).0;
        Ok(Interval::from_endpoints(lo, hi))
    }

    pub fn exp(&self) -> Interval {
        let p = self.prec();
        let lo = Float::with_val_round(p, self.lo.exp_ref(), Round::Down).0;
        let hi = Float::with_val_round(p, self.hi.exp_ref(), Round::Up).0;
        Interval::from_endpoints(lo, hi)
    }

    pub fn sqrt(&self) -> Result<Interval> {
        if self.lo.is_sign_negative() && !self.lo.is_zero() {
            return Err(Error::Domain {
                op: "sqrt",
                msg: "argument extends below zero".into(),
            });
        }
        let p = self.prec();
        let lo = Float::with_val_round(p, self.lo.sqrt_ref(), Round::Down).0;
        let hi = Float::with_val_round(p, self.hi.sqrt_ref(), Round::Up).0;
        Ok(Interval::from_endpoints(lo, hi))
    }

    /// Integer power with sign-and-parity case analysis.
    pub fn pow_int(&self, k: i32) -> Result<Interval> {
        if k == 0 {
            return Ok(Interval::exact_u64(1, 1).with_prec(self.prec()));
        }
        if k < 0 {
            return self.pow_int(-k)?.recip();
        }
        let p = self.prec();
        let ku = k as u32;
        let even = k % 2 == 0;
        let (lo, hi) = if self.is_strictly_positive() || !even {
            (
                Float::with_val_round(p, (&self.lo).pow(ku), Round::Down).0,
                Float::with_val_round(p, (&self.hi).pow(ku), Round::Up).0,
            )
        } else if self.is_strictly_negative() {
            // even power of a negative interval reverses order
            (
                Float::with_val_round(p, (&self.hi).pow(ku), Round::Down).0,
                Float::with_val_round(p, (&self.lo).pow(ku), Round::Up).0,
            )
        } else {
            let a = Float::with_val_round(p, (&self.lo).pow(ku), Round::Up).0;
            let b = Float::with_val_round(p, (&self.hi).pow(ku), Round::Up).0;
            (Float::with_val(p, 0), if a >= b { a } else { b })
        };
        Ok(Interval::from_endpoints(lo, hi))
    }

    /// The same enclosure re-rounded outward at a new precision.
    pub fn with_prec(&self, prec: u32) -> Interval {
        let lo = Float::with_val_round(prec, &self.lo, Round::Down).0;
        let hi = Float::with_val_round(prec, &self.hi, Round::Up).0;
        Interval::from_endpoints(lo, hi)
    }

    /// If the enclosure pins down a unique floor, returns it.
    pub fn floor_unique(&self) -> Option<Integer> {
        let f_lo = self.lo.to_integer_round(Round::Down)?.0;
        let f_hi = self.hi.to_integer_round(Round::Down)?.0;
        if f_lo == f_hi {
            Some(f_lo)
        } else {
            None
        }
    }

    /// If the enclosure pins down a unique ceiling, returns it. A point
    /// interval sitting exactly on an integer has that integer as ceiling.
    pub fn ceil_unique(&self) -> Option<Integer> {
        let c_lo = self.lo.to_integer_round(Round::Up)?.0;
        let c_hi = self.hi.to_integer_round(Round::Up)?.0;
        if c_lo == c_hi {
            Some(c_lo)
        } else {
            None
        }
    }

    /// Endpoints as exact rationals (floats are always rational).
    pub fn to_rationals(&self) -> (Rational, Rational) {
        (
            self.lo.to_rational().unwrap(),
            self.hi.to_rational().unwrap(),
        )
    }

    /// Outward decimal strings `(lo, hi)` at `sig` significant digits.
    pub fn display_outward(&self, sig: usize) -> (String, String) {
        (
            float_to_decimal(&self.lo, sig, Round::Down),
            float_to_decimal(&self.hi, sig, Round::Up),
        )
    }
}

/// Plain decimal rendering of a float with a directed rounding mode.
/// Falls back to exponent notation for extreme magnitudes.
pub fn float_to_decimal(f: &Float, sig: usize, round: Round) -> String {
    if f.is_zero() {
        return "0".to_string();
    }
    let (neg, digits, exp) = f.to_sign_string_exp_round(10, Some(sig.max(1)), round);
    let exp = exp.unwrap_or(0);
    let sign = if neg { "-" } else { "" };
    // exp is the position of the decimal point relative to the digit string
    if exp <= 0 && exp > -6 {
        let zeros = "0".repeat((-exp) as usize);
        format!("{sign}0.{zeros}{digits}")
    } else if exp > 0 && (exp as usize) <= digits.len() {
        let (int, frac) = digits.split_at(exp as usize);
        if frac.is_empty() {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    } else if exp > 0 && (exp as usize) <= sig + 6 {
        let zeros = "0".repeat(exp as usize - digits.len());
        format!("{sign}{digits}{zeros}")
    } else {
        let mut it = digits.chars();
        let first = it.next().unwrap();
        let rest: String = it.collect();
        if rest.is_empty() {
            format!("{sign}{first}e{}", exp - 1)
        } else {
            format!("{sign}{first}.{rest}e{}", exp - 1)
        }
    }
}
