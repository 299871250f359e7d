//! Certified enclosures of the Euler-Mascheroni constant and `e^gamma`.
//!
//! `gamma` comes from bracketing `H_N - gamma - log(N + 1/2)` between two
//! consecutive partial sums of the shifted Bernoulli series
//! `sum_k (1 - 2^{1-2k}) B_{2k} / (2k x^{2k})` at `x = N + 1/2`, which is
//! two-sided for every odd truncation order. All series terms are exact
//! rationals, so the only rounding enters through `log(N + 1/2)`.

use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Integer, Rational};

use crate::bernoulli::bernoulli_even;
use crate::error::{Error, Result};
use crate::interval::{Interval, PrecisionConfig};

/// Exact bracket `[s_lo, s_hi]` for `H_{z - 1/2} - gamma - log z` with
/// `z > 0` rational: consecutive partial sums of the shifted Bernoulli
/// series, widened until the gap is at most `eps`.
///
/// Fails if the (divergent) series starts growing before reaching `eps`,
/// which signals that `z` is too small for the requested accuracy.
pub(crate) fn digamma_tail_bracket(z: &Rational, eps: &Rational) -> Result<(Rational, Rational)> {
    let z2 = Rational::from(z * z);
    let mut partial = Rational::new();
    let mut prev_abs: Option<Rational> = None;
    let mut zpow = Rational::from(1); // z^{2k}
    let mut upper_at_odd: Option<Rational> = None;
    for k in 1..=512u32 {
        zpow *= &z2;
        // c_k / z^{2k} with c_k = (1 - 2^{1-2k}) B_{2k} / (2k)
        let scale =
            Rational::from(1) - Rational::from((Integer::from(1), Integer::from(1) << (2 * k - 1)));
        let term = bernoulli_even(k) * scale / Rational::from(2 * k) / &zpow;
        let t_abs = Rational::from(term.abs_ref());
        if let Some(p) = &prev_abs {
            if t_abs > *p {
                return Err(Error::Domain {
                    op: "digamma_tail_bracket",
                    msg: format!("series diverges before reaching eps at z = {z}"),
                });
            }
        }
        partial += &term;
        if k % 2 == 1 {
            // odd order: partial sum is an upper bound of the bracketed value
            upper_at_odd = Some(partial.clone());
        } else if let Some(hi) = &upper_at_odd {
            // even order: partial sum is the matching lower bound
            if Rational::from(hi - &partial) <= *eps {
                return Ok((partial, hi.clone()));
            }
        }
        prev_abs = Some(t_abs);
    }
    Err(Error::Domain {
        op: "digamma_tail_bracket",
        msg: format!("no bracket of width {eps} reached at z = {z}"),
    })
}

fn pow10(e: i64) -> Rational {
    let base = Integer::from(10u32);
    if e >= 0 {
        Rational::from(base.pow(e as u32))
    } else {
        Rational::from((Integer::from(1), base.pow((-e) as u32)))
    }
}

/// Exact harmonic number `H_n`.
pub(crate) fn harmonic_exact(n: u64) -> Rational {
    let mut h = Rational::new();
    for k in 1..=n {
        h += Rational::from((1u32, k));
    }
    h
}

fn gamma_uncached(digits: u32) -> Result<Interval> {
    // e^{-2 pi x} error floor: x about 0.3665 * digits suffices; keep margin.
    let n = (digits as u64 + 6) * 3665 / 10000 + 3;
    let z = Rational::from((2 * n + 1, 2)); // N + 1/2
    let eps = pow10(-(digits as i64) - 2);
    let (s_lo, s_hi) = digamma_tail_bracket(&z, &eps)?;
    let h = harmonic_exact(n);
    let log_z = Interval::from_rational(&z, digits + 4).ln()?;
    // gamma = H_N - log(N + 1/2) - D with D in [s_lo, s_hi]
    let hi_part = Interval::from_rational(&Rational::from(&h - &s_lo), digits + 4);
    let lo_part = Interval::from_rational(&Rational::from(&h - &s_hi), digits + 4);
    let enc = lo_part.sub(&log_z).hull(&hi_part.sub(&log_z));
    Ok(enc)
}

fn gamma_cache() -> &'static Mutex<Option<(u32, Interval)>> {
    static CACHE: OnceLock<Mutex<Option<(u32, Interval)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(None))
}

/// Certified enclosure of the Euler-Mascheroni constant with width at most
/// `10^(1 - digits)`.
pub fn euler_gamma(digits: u32, cfg: &PrecisionConfig) -> Result<Interval> {
    cfg.check_refine(digits)?;
    let mut guard = gamma_cache().lock().unwrap();
    if let Some((d, iv)) = guard.as_ref() {
        if *d >= digits {
            return Ok(iv.clone());
        }
    }
    let iv = gamma_uncached(digits)?;
    *guard = Some((digits, iv.clone()));
    Ok(iv)
}

/// Enclosure of `e^gamma` at working precision.
pub fn exp_gamma(cfg: &PrecisionConfig) -> Result<Interval> {
    Ok(euler_gamma(cfg.working_digits, cfg)?.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rational_from_decimal;
    use rug::Float;

    #[test]
    fn gamma_contains_printed_digits() {
        let cfg = PrecisionConfig::default();
        let g = euler_gamma(12, &cfg).unwrap();
        let printed = rational_from_decimal("0.577215664901").unwrap();
        let ulp = pow10(-12);
        assert!(
            g.contains_rational(&printed) || {
                // printed value is truncated, so allow the band [printed, printed + ulp)
                let hi = Rational::from(&printed + &ulp);
                g.lo().to_rational().unwrap() >= printed && g.hi().to_rational().unwrap() <= hi
            }
        );
        // all printed digits: enclosure must sit inside [printed, printed + 1e-12]
        let band_hi = Rational::from(&printed + &ulp);
        assert!(g.lo().to_rational().unwrap() >= printed);
        assert!(g.hi().to_rational().unwrap() <= band_hi);
    }

    #[test]
    fn gamma_width_meets_target() {
        let cfg = PrecisionConfig::default();
        for digits in [12u32, 15, 30, 40] {
            let g = euler_gamma(digits, &cfg).unwrap();
            let tol = Float::with_val(256, 10).pow(1i32 - digits as i32);
            assert!(g.width() <= tol, "width too large at {digits} digits");
        }
    }

    #[test]
    fn gamma_nested_refinement() {
        let cfg = PrecisionConfig::default();
        let coarse = euler_gamma(12, &cfg).unwrap();
        let fine = euler_gamma(15, &cfg).unwrap();
        assert!(fine.lo() >= coarse.lo() && fine.hi() <= coarse.hi());
    }

    #[test]
    fn gamma_beyond_max_refine_rejected() {
        let cfg = PrecisionConfig::default();
        assert!(matches!(
            euler_gamma(500, &cfg),
            Err(Error::PrecisionExceeded { .. })
        ));
    }

    #[test]
    fn exp_gamma_printed_and_roundtrip() {
        let cfg = PrecisionConfig::default();
        let eg = exp_gamma(&cfg).unwrap();
        let printed = rational_from_decimal("1.781072417990").unwrap();
        let band_hi = &printed + pow10(-12);
        assert!(eg.lo().to_rational().unwrap() >= printed);
        assert!(eg.hi().to_rational().unwrap() <= band_hi);
        // exp(gamma enclosure) intersects, and log roundtrip recovers gamma
        let g = euler_gamma(cfg.working_digits, &cfg).unwrap();
        assert!(eg.intersects(&g.exp()));
        let back = eg.ln().unwrap();
        assert!(back.intersects(&g));
    }
}
