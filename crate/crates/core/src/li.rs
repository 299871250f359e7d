//! The logarithmic integral and its relatives, all as certified enclosures.
//!
//! `li(x) = Ei(log x)` with `Ei(z) = gamma + log|z| + sum_{k>=1} z^k/(k k!)`,
//! truncated once the term magnitude is below the precision target and the
//! term ratio is certified below 1/2, so twice the last term majorizes the
//! remainder. The series is used on both sides of the singularity: for
//! `0 < x < 1` it is alternating and the same majorant applies.

use std::sync::{Mutex, OnceLock};

use rug::{Float, Integer, Rational};

use crate::constants::euler_gamma;
use crate::error::{Error, Result};
use crate::interval::{bits_for_digits, Interval, PrecisionConfig};
use crate::util::pow10;

/// A certified `li` evaluation at a rational argument.
#[derive(Clone, Debug)]
pub struct LiValue {
    pub argument: Rational,
    pub value: Interval,
}

/// Enclosure of `Ei(z)` for a sign-definite interval `z`.
pub(crate) fn ei_interval(z: &Interval, digits: u32, cfg: &PrecisionConfig) -> Result<Interval> {
    if z.contains_zero() {
        return Err(Error::Domain {
            op: "ei",
            msg: "argument interval contains zero".into(),
        });
    }
    // compensate the known cancellation of about |z| / ln 10 digits
    let zmag = z.abs().hi().to_f64();
    if zmag > 1.0e6 || zmag.is_nan() {
        return Err(Error::Domain {
            op: "ei",
            msg: format!("|z| = {zmag} too large"),
        });
    }
    let wd = digits + (zmag * std::f64::consts::LOG10_E).ceil() as u32 + 8;
    let p = bits_for_digits(wd);
    let zp = z.with_prec(p);
    let gamma = euler_gamma(wd, cfg)?;
    let log_abs = zp.abs().ln()?;
    let eps = Float::with_val(p, &pow10(-(wd as i64)));

    let mut sum = Interval::from_endpoints(Float::with_val(p, 0), Float::with_val(p, 0));
    let mut power = Interval::from_endpoints(Float::with_val(p, 1), Float::with_val(p, 1));
    let mut kfact = Integer::from(1);
    let max_iter = 2 * zmag.ceil() as u32 + 10 * wd + 64;
    for k in 1..=max_iter {
        power = power.mul(&zp);
        kfact *= k;
        let denom = Interval::from_rational(
            &Rational::from((Integer::from(k) * &kfact, Integer::from(1))),
            wd,
        );
        let term = power.div(&denom)?;
        sum = sum.add(&term);
        let t_abs = term.abs();
        let ratio = zp.abs().hi().to_f64() / (k as f64 + 1.0);
        if ratio <= 0.5 && *t_abs.hi() <= eps {
            let r = Float::with_val(p, t_abs.hi() * 2u32);
            let rem = Interval::from_endpoints(Float::with_val(p, -&r), r);
            sum = sum.add(&rem);
            return Ok(gamma
                .add(&log_abs)
                .add(&sum)
                .with_prec(bits_for_digits(digits + 4)));
        }
    }
    Err(Error::Domain {
        op: "ei",
        msg: format!("series did not converge for |z| = {zmag}"),
    })
}

/// `li` at a rational argument `x > 0`, `x != 1`.
pub fn li(x: &Rational, digits: u32, cfg: &PrecisionConfig) -> Result<LiValue> {
    if *x <= 0 {
        return Err(Error::Domain {
            op: "li",
            msg: format!("argument {x} <= 0"),
        });
    }
    if *x == 1 {
        return Err(Error::Domain {
            op: "li",
            msg: "argument 1 (pole of li)".into(),
        });
    }
    // raise precision until log x is sign definite
    let mut d = digits;
    loop {
        let z = Interval::from_rational(x, d + 4).ln()?;
        if !z.contains_zero() {
            let value = ei_interval(&z, digits, cfg)?;
            return Ok(LiValue {
                argument: x.clone(),
                value,
            });
        }
        d = d.saturating_mul(2);
        cfg.check_refine(d).map_err(|_| Error::Domain {
            op: "li",
            msg: format!("argument {x} indistinguishable from 1 at max precision"),
        })?;
    }
}

/// `li` of an interval argument with `x.lo > 0` and `1` outside the interval.
pub fn li_interval(x: &Interval, digits: u32, cfg: &PrecisionConfig) -> Result<Interval> {
    let z = x.ln()?;
    ei_interval(&z, digits, cfg)
}

/// `li(e^t x)/e^t` computed as `Ei(t + log x) e^{-t}` to avoid forming
/// `e^t x`.
pub fn li_scaled(
    t: &Interval,
    x: &Interval,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<Interval> {
    let z = t.add(&x.ln()?);
    if z.contains_zero() {
        return Err(Error::Domain {
            op: "li_scaled",
            msg: "t + log x contains zero (argument 1)".into(),
        });
    }
    let ei = ei_interval(&z, digits, cfg)?;
    Ok(ei.mul(&t.neg().exp()))
}

/// Convenience for integer second arguments.
pub fn li_scaled_u64(t: &Interval, n: u64, digits: u32, cfg: &PrecisionConfig) -> Result<Interval> {
    li_scaled(t, &Interval::exact_u64(n, digits + 4), digits, cfg)
}

/// Closed form of `int_r^inf dx / (x^2 (t + log x)^2)` for `t + log r > 0`:
/// `e^t li(1/(r e^t)) + 1/(r (t + log r))`. Certified positive by the
/// enclosure itself at the precisions used here.
pub fn tail_integral(
    r: &Interval,
    t: &Interval,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<Interval> {
    let u = t.add(&r.ln()?);
    if !u.is_strictly_positive() {
        return Err(Error::Domain {
            op: "tail_integral",
            msg: "t + log r not certified positive".into(),
        });
    }
    // li(1/(r e^t)) = Ei(-(t + log r))
    let ei = ei_interval(&u.neg(), digits, cfg)?;
    let first = ei.mul(&t.exp());
    let second = r.mul(&u).recip()?;
    Ok(first.add(&second))
}

/// Bracket of `li(e^t y)/e^t - li(e^t x)/e^t` for `y > x > 0`,
/// `t + log x > 0`: `((y-x)/(t+log((x+y)/2)), (y-x)/(t+log x))`.
pub fn li_difference_bounds(
    x: &Rational,
    y: &Rational,
    t: &Rational,
    digits: u32,
) -> Result<(Interval, Interval)> {
    if !(y > x && *x > 0) {
        return Err(Error::Domain {
            op: "li_difference_bounds",
            msg: format!("need y > x > 0, got x = {x}, y = {y}"),
        });
    }
    let ti = Interval::from_rational(t, digits + 4);
    let xi = Interval::from_rational(x, digits + 4);
    let u = ti.add(&xi.ln()?);
    if !u.is_strictly_positive() {
        return Err(Error::Domain {
            op: "li_difference_bounds",
            msg: "t + log x not certified positive".into(),
        });
    }
    let gap = Interval::from_rational(&Rational::from(y - x), digits + 4);
    let mid = Rational::from(x + y) / 2u32;
    let mid_log = Interval::from_rational(&mid, digits + 4).ln()?;
    let lower = gap.div(&ti.add(&mid_log))?;
    let upper = gap.div(&u)?;
    Ok((lower, upper))
}

/// Antiderivative route for `int_a^b dx/(t + log x)^j`, `j` in `1..=3`:
/// `F_1 = li_scaled(t, x)`, `F_2 = F_1 - x/u`, `F_3 = (F_1 - x/u - x/u^2)/2`
/// with `u = t + log x`.
pub fn inv_log_power_integral(
    t: &Interval,
    a: &Interval,
    b: &Interval,
    order: u32,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<Interval> {
    if !(1..=3).contains(&order) {
        return Err(Error::Domain {
            op: "inv_log_power_integral",
            msg: format!("order {order} outside 1..=3"),
        });
    }
    let eval = |x: &Interval| -> Result<Interval> {
        let f1 = li_scaled(t, x, digits, cfg)?;
        if order == 1 {
            return Ok(f1);
        }
        let u = t.add(&x.ln()?);
        let x_over_u = x.div(&u)?;
        if order == 2 {
            return Ok(f1.sub(&x_over_u));
        }
        let x_over_u2 = x.div(&u.pow_int(2)?)?;
        let half = Interval::from_rational(&Rational::from((1, 2)), digits + 4);
        Ok(f1.sub(&x_over_u).sub(&x_over_u2).mul(&half))
    };
    Ok(eval(b)?.sub(&eval(a)?))
}

/// Certified bisection for a sign change of `f` on `[a, b]` over exact
/// rational endpoints. Indeterminate signs escalate the evaluation
/// precision; the final enclosure is `[a, b]` once it is narrower than
/// `width_target`.
pub(crate) fn bisect_certified<F>(
    f: F,
    a0: Rational,
    b0: Rational,
    width_target: &Rational,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<Interval>
where
    F: Fn(&Rational, u32) -> Result<Interval>,
{
    let sign_at = |q: &Rational| -> Result<i32> {
        let mut d = cfg.working_digits.max(digits);
        loop {
            let v = f(q, d)?;
            if v.is_strictly_positive() {
                return Ok(1);
            }
            if v.is_strictly_negative() {
                return Ok(-1);
            }
            d = d.saturating_mul(2);
            cfg.check_refine(d)?;
        }
    };
    let mut a = a0;
    let mut b = b0;
    let sa = sign_at(&a)?;
    let sb = sign_at(&b)?;
    if sa == sb {
        return Err(Error::Domain {
            op: "bisect_certified",
            msg: "no certified sign change on the bracket".into(),
        });
    }
    while Rational::from(&b - &a) > *width_target {
        let m = Rational::from(&a + &b) / 2u32;
        if sign_at(&m)? == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Interval::from_rational_bounds(&a, &b, digits + 2))
}

fn mu_cache() -> &'static Mutex<Option<(u32, Interval)>> {
    static CACHE: OnceLock<Mutex<Option<(u32, Interval)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(None))
}

/// Enclosure of the Ramanujan-Soldner constant (unique positive zero of
/// `li`) of width at most `10^(1-digits)`.
pub fn soldner_mu(digits: u32, cfg: &PrecisionConfig) -> Result<Interval> {
    cfg.check_refine(digits)?;
    {
        let guard = mu_cache().lock().unwrap();
        if let Some((d, iv)) = guard.as_ref() {
            if *d >= digits {
                return Ok(iv.clone());
            }
        }
    }
    let target = pow10(1 - digits as i64) / 2u32;
    let iv = bisect_certified(
        |q, d| li(q, d, cfg).map(|lv| lv.value),
        Rational::from((7, 5)),
        Rational::from((3, 2)),
        &target,
        digits,
        cfg,
    )?;
    let mut guard = mu_cache().lock().unwrap();
    *guard = Some((digits, iv.clone()));
    Ok(iv)
}
