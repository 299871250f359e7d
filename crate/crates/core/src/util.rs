//! Small shared helpers: exact decimal parsing and a file checksum.

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Parses a decimal literal (optionally signed, optional fraction, optional
/// `e` exponent) into an exact rational.
pub fn rational_from_decimal(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Domain {
        op: "rational_from_decimal",
        msg: format!("bad decimal {s:?}"),
    };
    if s.is_empty() {
        return Err(bad());
    }
    let (mant, exp) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, body) = match mant.as_bytes()[0] {
        b'-' => (true, &mant[1..]),
        b'+' => (false, &mant[1..]),
        _ => (false, mant),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit())
        || !frac_part.bytes().all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let digits: String = format!("{int_part}{frac_part}");
    let num: Integer = digits.parse().map_err(|_| bad())?;
    let scale = frac_part.len() as i64 - exp;
    let mut q = Rational::from(num);
    if scale > 0 {
        q /= Rational::from(Integer::from(10).pow(scale as u32));
    } else if scale < 0 {
        q *= Rational::from(Integer::from(10).pow((-scale) as u32));
    }
    if neg {
        q = -q;
    }
    Ok(q)
}

/// 10^e as an exact rational.
pub fn pow10(e: i64) -> Rational {
    if e >= 0 {
        Rational::from(Integer::from(10).pow(e as u32))
    } else {
        Rational::from((Integer::from(1), Integer::from(10).pow((-e) as u32)))
    }
}

/// FNV-1a 64-bit checksum used by the prime-count cache file.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}
