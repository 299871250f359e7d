//! Symbolic shift arguments.
//!
//! The interesting shifts are tied to constants (`gamma`, `log 2`, `log mu`,
//! `log alpha`), and keeping them symbolic lets `H_k - gamma + t` cancel to
//! an exact rational when `t = gamma + c`. Plain decimals are treated as
//! exact rationals.

use std::fmt;

use rug::Rational;

use crate::constants::euler_gamma;
use crate::discretized::alpha_star;
use crate::error::{Error, Result};
use crate::interval::{Interval, PrecisionConfig};
use crate::li::soldner_mu;
use crate::util::rational_from_decimal;

#[derive(Clone, Debug, PartialEq)]
pub enum Shift {
    /// An exact rational shift.
    Exact(Rational),
    /// `gamma + offset` with an exact rational offset.
    GammaPlus(Rational),
    /// `log q` for a positive rational `q` (so `-log 2` is `log (1/2)`).
    LogRational(Rational),
    /// `log mu`, the shift that makes `mu e^{-t}` exactly 1.
    LogMu,
    /// `log alpha`, where `alpha` solves `li(x) = x / log x`.
    LogAlpha,
}

impl Shift {
    pub fn gamma() -> Shift {
        Shift::GammaPlus(Rational::new())
    }

    pub fn gamma_plus_one() -> Shift {
        Shift::GammaPlus(Rational::from(1))
    }

    pub fn log2() -> Shift {
        Shift::LogRational(Rational::from(2))
    }

    pub fn neg_log2() -> Shift {
        Shift::LogRational(Rational::from((1, 2)))
    }

    /// The exact offset `c` when the shift is `gamma + c`.
    pub fn gamma_offset(&self) -> Option<&Rational> {
        match self {
            Shift::GammaPlus(c) => Some(c),
            _ => None,
        }
    }

    pub fn is_log_mu(&self) -> bool {
        matches!(self, Shift::LogMu)
    }

    /// Certified enclosure of the shift value.
    pub fn enclosure(&self, digits: u32, cfg: &PrecisionConfig) -> Result<Interval> {
        match self {
            Shift::Exact(q) => Ok(Interval::from_rational(q, digits)),
            Shift::GammaPlus(c) => {
                Ok(euler_gamma(digits + 2, cfg)?.add(&Interval::from_rational(c, digits)))
            }
            Shift::LogRational(q) => {
                if *q <= 0 {
                    return Err(Error::Domain {
                        op: "shift",
                        msg: format!("log of non-positive rational {q}"),
                    });
                }
                Interval::from_rational(q, digits + 2).ln()
            }
            Shift::LogMu => soldner_mu(digits + 2, cfg)?.ln(),
            Shift::LogAlpha => alpha_star(digits + 2, cfg)?.ln(),
        }
    }

    /// Parses a CLI / file representation.
    pub fn parse(s: &str) -> Result<Shift> {
        let t = s.trim();
        match t {
            "gamma" => return Ok(Shift::gamma()),
            "gamma+1" => return Ok(Shift::gamma_plus_one()),
            "log2" => return Ok(Shift::log2()),
            "-log2" => return Ok(Shift::neg_log2()),
            "logmu" => return Ok(Shift::LogMu),
            "logalpha" => return Ok(Shift::LogAlpha),
            _ => {}
        }
        if let Some(rest) = t.strip_prefix("gamma+") {
            return Ok(Shift::GammaPlus(rational_from_decimal(rest)?));
        }
        if let Some(rest) = t.strip_prefix("gamma-") {
            return Ok(Shift::GammaPlus(-rational_from_decimal(rest)?));
        }
        if let Some((num, den)) = t.split_once('/') {
            let num = rational_from_decimal(num)?;
            let den = rational_from_decimal(den)?;
            if den.cmp0() == std::cmp::Ordering::Equal {
                return Err(Error::Domain {
                    op: "shift",
                    msg: "zero denominator".into(),
                });
            }
            return Ok(Shift::Exact(num / den));
        }
        Ok(Shift::Exact(rational_from_decimal(t)?))
    }
}

impl fmt::Display for Shift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shift::Exact(q) => write!(f, "{q}"),
            Shift::GammaPlus(c) if c.cmp0() == std::cmp::Ordering::Equal => write!(f, "gamma"),
            Shift::GammaPlus(c) if *c == 1i32 => write!(f, "gamma+1"),
            Shift::GammaPlus(c) => write!(f, "gamma+{c}"),
            Shift::LogRational(q) if *q == 2i32 => write!(f, "log2"),
            Shift::LogRational(q) if *q == Rational::from((1, 2)) => write!(f, "-log2"),
            Shift::LogRational(q) => write!(f, "log({q})"),
            Shift::LogMu => write!(f, "logmu"),
            Shift::LogAlpha => write!(f, "logalpha"),
        }
    }
}
