//! Discretized logarithmic-integral machinery: the shifted inverse sums,
//! the discrepancy sequences, and two-sided bounds for the limiting error
//! function `beta(t)`, plus the local-maximum search across shifts.

use std::sync::{Mutex, OnceLock};

use rug::{Integer, Rational};

use crate::constants::euler_gamma;
use crate::error::{Error, Result};
use crate::harmonic::{harmonic_rationals, HarmonicSeq, EXACT_LIMIT};
use crate::interval::{Interval, PrecisionConfig};
use crate::li::{bisect_certified, li, li_scaled_u64, soldner_mu, tail_integral};
use crate::shift::Shift;
use crate::util::pow10;

/// Cached state behind every sum `sum_k 1/(H_k - gamma + t)^j`: the shift,
/// the starting index, and per-order prefix sums that grow append-only.
pub struct ShiftContext {
    shift: Shift,
    start: u64,
    digits: u32,
    cfg: PrecisionConfig,
    t: Interval,
    gamma: Interval,
    seq: Option<HarmonicSeq>,
    // k = start + i for index i
    denoms: Vec<Interval>,
    harmonics: Vec<Interval>,
    // prefix[j-1][m] = sum of the first m summands of order j
    prefix: [Vec<Interval>; 3],
    // midpoint-rule companion: sums of 1/(t + log(k + 1/2))
    mid_prefix: Vec<Interval>,
}

impl ShiftContext {
    pub fn new(shift: Shift, start: u64, digits: u32, cfg: &PrecisionConfig) -> Result<Self> {
        if start == 0 {
            return Err(Error::Domain {
                op: "ShiftContext",
                msg: "start index must be >= 1".into(),
            });
        }
        let t = shift.enclosure(digits, cfg)?;
        let gamma = euler_gamma(digits + 2, cfg)?;
        // sufficient and cheap: H_N - gamma > log N, so t + log N > 0 makes
        // every denominator positive; probe H_N directly only when that is
        // not certified (the sums stay valid down to t > gamma - H_N)
        let strong = t.add(&Interval::exact_u64(start, digits).ln()?);
        if !strong.is_strictly_positive() {
            let mut probe = HarmonicSeq::new(digits);
            probe.advance_to(start);
            let first = denom_for(&shift, digits, &gamma, &t, &probe);
            if !first.is_strictly_positive() {
                return Err(Error::Domain {
                    op: "ShiftContext",
                    msg: format!("t = {shift} leaves H_{start} - gamma + t without certified sign"),
                });
            }
        }
        let zero = Interval::exact_u64(0, digits);
        Ok(ShiftContext {
            shift,
            start,
            digits,
            cfg: *cfg,
            t,
            gamma,
            seq: None,
            denoms: Vec::new(),
            harmonics: Vec::new(),
            prefix: [vec![zero.clone()], vec![zero.clone()], vec![zero.clone()]],
            mid_prefix: vec![zero],
        })
    }

    pub fn shift(&self) -> &Shift {
        &self.shift
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn t_enclosure(&self) -> &Interval {
        &self.t
    }

    fn filled_to(&self) -> u64 {
        self.start + self.denoms.len() as u64
    }

    /// Extends caches so that index `k` (inclusive) is available.
    fn extend(&mut self, k: u64) -> Result<()> {
        if self.seq.is_none() {
            let mut seq = HarmonicSeq::new(self.digits);
            seq.advance_to(self.start - 1);
            self.seq = Some(seq);
        }
        while self.filled_to() <= k {
            let next_k = self.filled_to();
            let seq = self.seq.as_mut().unwrap();
            seq.advance_to(next_k);
            let d = denom_for(&self.shift, self.digits, &self.gamma, &self.t, seq);
            let h_iv = seq.value().clone();
            debug_assert!(
                d.is_strictly_positive(),
                "denominator not positive at k={next_k}"
            );
            let inv1 = d.recip()?;
            let inv2 = d.pow_int(2)?.recip()?;
            let inv3 = d.pow_int(3)?.recip()?;
            self.prefix[0].push(self.prefix[0].last().unwrap().add(&inv1));
            self.prefix[1].push(self.prefix[1].last().unwrap().add(&inv2));
            self.prefix[2].push(self.prefix[2].last().unwrap().add(&inv3));
            self.harmonics.push(h_iv);
            self.denoms.push(d);
        }
        Ok(())
    }

    /// Extends the midpoint-rule prefix (`1/(t + log(k + 1/2))` terms),
    /// which needs the stronger condition `t > -log N` and is therefore
    /// grown only on demand.
    fn extend_mid(&mut self, k: u64) -> Result<()> {
        while (self.start + self.mid_prefix.len() as u64 - 1) <= k {
            let next_k = self.start + self.mid_prefix.len() as u64 - 1;
            let mid = Rational::from((2 * next_k + 1, 2));
            let mid_term = self
                .t
                .add(&Interval::from_rational(&mid, self.digits).ln()?)
                .recip()?;
            self.mid_prefix
                .push(self.mid_prefix.last().unwrap().add(&mid_term));
        }
        Ok(())
    }

    /// `sum_{k=start}^{n-1} 1/(H_k - gamma + t)^order`; empty for `n = start`.
    pub fn partial_inverse_sum(&mut self, n: u64, order: u32) -> Result<Interval> {
        if n < self.start {
            return Err(Error::Domain {
                op: "partial_inverse_sum",
                msg: format!("n = {n} below start index {}", self.start),
            });
        }
        if !(1..=3).contains(&order) {
            return Err(Error::Domain {
                op: "partial_inverse_sum",
                msg: format!("order {order} outside 1..=3"),
            });
        }
        if n > self.start {
            self.extend(n - 1)?;
        }
        Ok(self.prefix[(order - 1) as usize][(n - self.start) as usize].clone())
    }

    fn mid_sum_through(&mut self, n: u64) -> Result<Interval> {
        self.extend_mid(n)?;
        Ok(self.mid_prefix[(n - self.start + 1) as usize].clone())
    }

    /// `H_k - gamma + t` for any `k >= 1`, cached for `k >= start`.
    pub fn shifted_harmonic(&mut self, k: u64) -> Result<Interval> {
        if k >= self.start {
            self.extend(k)?;
            return Ok(self.denoms[(k - self.start) as usize].clone());
        }
        let mut seq = HarmonicSeq::new(self.digits);
        seq.advance_to(k);
        Ok(denom_for(
            &self.shift,
            self.digits,
            &self.gamma,
            &self.t,
            &seq,
        ))
    }

    /// `H_k` enclosure for `k >= 1`.
    pub fn harmonic_at(&mut self, k: u64) -> Result<Interval> {
        if k >= self.start {
            self.extend(k)?;
            return Ok(self.harmonics[(k - self.start) as usize].clone());
        }
        let mut seq = HarmonicSeq::new(self.digits);
        seq.advance_to(k);
        Ok(seq.value().clone())
    }

    /// `li(e^t x)/e^t` at integer `x`, with the `t = log mu`, `x = 1` point
    /// pinned to exactly zero (`li(mu) = 0` by definition of `mu`).
    pub fn li_scaled_at(&self, x: u64) -> Result<Interval> {
        if self.shift.is_log_mu() && x == 1 {
            return Ok(Interval::exact_u64(0, self.digits));
        }
        li_scaled_u64(&self.t, x, self.digits, &self.cfg)
    }

    /// The discrepancy triple `(theta_n, eta_n, delta_n)`.
    ///
    /// Indexing follows the proofs: `theta_n` integrates to `n` and sums to
    /// `n - 1`; `eta_n` and `delta_n` both run through `k = n`, so that
    /// `theta_n = eta_{n-1} + delta_{n-1}`.
    pub fn discrepancies(&mut self, n: u64) -> Result<(Interval, Interval, Interval)> {
        if n < self.start {
            return Err(Error::Domain {
                op: "discrepancies",
                msg: format!("n = {n} below start index {}", self.start),
            });
        }
        let li_n = self.li_scaled_at(n)?;
        let li_np1 = self.li_scaled_at(n + 1)?;
        let li_start = self.li_scaled_at(self.start)?;
        let inv_sum = self.partial_inverse_sum(n, 1)?;
        let theta = li_n.sub(&li_start).sub(&inv_sum);
        let mid = self.mid_sum_through(n)?;
        let through = self.partial_inverse_sum(n + 1, 1)?;
        let eta = mid.sub(&through);
        let delta = li_np1.sub(&li_start).sub(&mid);
        Ok((theta, eta, delta))
    }

    /// Two-sided bounds on the tail `theta(t, N) - theta_n(t, N) = theta(t, n)`.
    pub fn theta_tail_bounds(&self, n: u64) -> Result<BoundPair> {
        let (lower, upper) = tail_bound_pair(&self.t, n, self.digits, &self.cfg)?;
        Ok(BoundPair {
            lower,
            upper,
            n_used: n,
            target: BoundTarget::Theta,
        })
    }
}

/// Shifted denominator `H_k - gamma + t`, exact rational when the shift is
/// `gamma + c` and `k` is small enough for exact harmonic numbers.
fn denom_for(
    shift: &Shift,
    digits: u32,
    gamma: &Interval,
    t: &Interval,
    seq: &HarmonicSeq,
) -> Interval {
    match (shift.gamma_offset(), seq.exact()) {
        (Some(c), Some(h)) => Interval::from_rational(&Rational::from(h + c), digits),
        _ => seq.value().sub(gamma).add(t),
    }
}

/// What a [`BoundPair`] encloses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundTarget {
    Beta,
    Theta,
    BetaAtR,
}

impl std::fmt::Display for BoundTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundTarget::Beta => write!(f, "beta(t)"),
            BoundTarget::Theta => write!(f, "theta(t,N)"),
            BoundTarget::BetaAtR => write!(f, "beta(t,r)"),
        }
    }
}

/// Certified lower/upper bounds with the truncation index that produced
/// them. The emitted claim is `target` lies in `[lower.lo, upper.hi]`.
#[derive(Clone, Debug)]
pub struct BoundPair {
    pub lower: Interval,
    pub upper: Interval,
    pub n_used: u64,
    pub target: BoundTarget,
}

impl BoundPair {
    pub fn enclosure(&self) -> Interval {
        self.lower.hull(&self.upper)
    }
}

/// `r_t = mu e^{-t}` with its ceiling `R_t`, the starting index that keeps
/// the leading `li` term non-negative.
#[derive(Clone, Debug)]
pub struct RCeiling {
    pub shift: Shift,
    pub r_t: Interval,
    pub r_ceil: u64,
}

/// Tail bounds shared by `theta` and `beta`: the right-hand sides of the
/// two-sided truncation estimate at index `n`.
fn tail_bound_pair(
    t: &Interval,
    n: u64,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<(Interval, Interval)> {
    let inv24 = Interval::from_rational(&Rational::from((1, 24)), digits);
    let inv12 = Interval::from_rational(&Rational::from((1, 12)), digits);
    let np1 = Interval::exact_u64(n + 1, digits);
    let ni = Interval::exact_u64(n, digits);
    let nhalf = Interval::from_rational(&Rational::from((2 * n + 1, 2)), digits);

    let u_np1 = t.add(&np1.ln()?);
    let u_n = t.add(&ni.ln()?);
    let u_nhalf = t.add(&nhalf.ln()?);

    let lower = tail_integral(&np1, t, digits, cfg)?
        .mul(&inv24)
        .add(&np1.mul(&u_np1.pow_int(2)?).recip()?.mul(&inv24));
    let upper = tail_integral(&ni, t, digits, cfg)?
        .mul(&inv24)
        .add(&nhalf.mul(&u_nhalf.pow_int(2)?).recip()?.mul(&inv24))
        .add(&ni.pow_int(2)?.mul(&u_n.pow_int(2)?).recip()?.mul(&inv24))
        .add(&ni.pow_int(2)?.mul(&u_n.pow_int(3)?).recip()?.mul(&inv12));
    Ok((lower, upper))
}

fn rational_ceil(q: &Rational) -> Integer {
    let num = q.numer();
    let den = q.denom();
    let shifted = Integer::from(num + den) - 1u32;
    shifted.div_rem_floor(den.clone()).0
}

/// `R_t = ceil(mu e^{-t})`, refining the enclosure of `mu e^{-t}` until it
/// pins a unique ceiling. `t = log mu` is resolved symbolically to 1.
pub fn r_ceiling(shift: &Shift, digits: u32, cfg: &PrecisionConfig) -> Result<RCeiling> {
    if shift.is_log_mu() {
        return Ok(RCeiling {
            shift: shift.clone(),
            r_t: Interval::exact_u64(1, digits),
            r_ceil: 1,
        });
    }
    let mut d = digits;
    loop {
        let t = shift.enclosure(d, cfg)?;
        let mu = soldner_mu(d + 2, cfg)?;
        let v = mu.mul(&t.neg().exp());
        if let Some(c) = v.ceil_unique() {
            let r_ceil = c.to_u64().ok_or_else(|| Error::Domain {
                op: "r_ceiling",
                msg: format!("R_t out of range for t = {shift}"),
            })?;
            return Ok(RCeiling {
                shift: shift.clone(),
                r_t: v,
                r_ceil,
            });
        }
        let next = d.saturating_mul(2);
        if cfg.check_refine(next).is_err() {
            return Err(Error::IntegerBoundary {
                what: format!("mu e^(-t) at t = {shift}"),
            });
        }
        d = next;
    }
}

/// Certified comparison `ceil(r) >= mu e^{-t}` used as the `beta_n`
/// precondition.
fn check_ceil_at_least_rt(
    r_ceil: u64,
    shift: &Shift,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<()> {
    if shift.is_log_mu() {
        if r_ceil >= 1 {
            return Ok(());
        }
        return Err(Error::Domain {
            op: "beta_n",
            msg: "ceil(r) < mu e^(-t) = 1".into(),
        });
    }
    let mut d = digits;
    loop {
        let t = shift.enclosure(d, cfg)?;
        let v = soldner_mu(d + 2, cfg)?.mul(&t.neg().exp());
        let r_iv = Interval::exact_u64(r_ceil, d);
        if r_iv.hi() >= v.hi() {
            return Ok(());
        }
        if r_iv.hi() < v.lo() {
            return Err(Error::Domain {
                op: "beta_n",
                msg: format!("ceil(r) = {r_ceil} below mu e^(-t) for t = {shift}"),
            });
        }
        let next = d.saturating_mul(2);
        if cfg.check_refine(next).is_err() {
            return Err(Error::IntegerBoundary {
                what: format!("mu e^(-t) vs {r_ceil}"),
            });
        }
        d = next;
    }
}

/// `beta_n(t, r) = li(e^t n)/e^t - sum_{ceil(r) <= k < n} 1/(H_k - gamma + t)`.
pub fn beta_n(
    shift: &Shift,
    r: &Rational,
    n: u64,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<Interval> {
    if *r <= 0 {
        return Err(Error::Domain {
            op: "beta_n",
            msg: format!("r = {r} must be positive"),
        });
    }
    let r_ceil = rational_ceil(r).to_u64().ok_or_else(|| Error::Domain {
        op: "beta_n",
        msg: format!("ceil(r) out of range for r = {r}"),
    })?;
    check_ceil_at_least_rt(r_ceil, shift, digits, cfg)?;
    if n < r_ceil {
        return Err(Error::Domain {
            op: "beta_n",
            msg: format!("n = {n} below ceil(r) = {r_ceil}"),
        });
    }
    let mut ctx = ShiftContext::new(shift.clone(), r_ceil, digits, cfg)?;
    let s = ctx.partial_inverse_sum(n, 1)?;
    Ok(ctx.li_scaled_at(n)?.sub(&s))
}

/// Certified bounds for `beta(t)` from the truncation at `n` (default
/// `n = R_t`, which reproduces the coarsest published bounds).
pub fn beta_bounds(
    shift: &Shift,
    n: Option<u64>,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<BoundPair> {
    let rc = r_ceiling(shift, digits, cfg)?;
    let n = n.unwrap_or(rc.r_ceil);
    if n < rc.r_ceil {
        return Err(Error::Domain {
            op: "beta_bounds",
            msg: format!("n = {n} below R_t = {}", rc.r_ceil),
        });
    }
    let mut ctx = ShiftContext::new(shift.clone(), rc.r_ceil, digits, cfg)?;
    let b_n = ctx.li_scaled_at(n)?.sub(&ctx.partial_inverse_sum(n, 1)?);
    let (tail_lo, tail_hi) = tail_bound_pair(ctx.t_enclosure(), n, digits, cfg)?;
    Ok(BoundPair {
        lower: b_n.add(&tail_lo),
        upper: b_n.add(&tail_hi),
        n_used: n,
        target: BoundTarget::Beta,
    })
}

/// The ordered triple `(li(e^t R_t)/e^t, li(mu + e^t)/e^t, 1/log mu)`.
pub fn beta_range_ceiling_check(
    shift: &Shift,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<(Interval, Interval, Interval)> {
    let rc = r_ceiling(shift, digits, cfg)?;
    let ctx = ShiftContext::new(shift.clone(), rc.r_ceil, digits, cfg)?;
    let first = ctx.li_scaled_at(rc.r_ceil)?;
    let t = shift.enclosure(digits, cfg)?;
    let mu = soldner_mu(digits + 2, cfg)?;
    let e_t = t.exp();
    let second = crate::li::li_interval(&mu.add(&e_t), digits, cfg)?.div(&e_t)?;
    let third = mu.ln()?.recip()?;
    Ok((first, second, third))
}

fn alpha_cache() -> &'static Mutex<Option<(u32, Interval)>> {
    static CACHE: OnceLock<Mutex<Option<(u32, Interval)>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(None))
}

/// Enclosure of the unique solution of `li(x) = x / log x` on `[3.5, 4]`,
/// of width at most `10^(1-digits)`.
pub fn alpha_star(digits: u32, cfg: &PrecisionConfig) -> Result<Interval> {
    cfg.check_refine(digits)?;
    {
        let guard = alpha_cache().lock().unwrap();
        if let Some((d, iv)) = guard.as_ref() {
            if *d >= digits {
                return Ok(iv.clone());
            }
        }
    }
    let target = pow10(1 - digits as i64) / 2u32;
    let iv = bisect_certified(
        |q, d| {
            let x = Interval::from_rational(q, d + 4);
            let ratio = x.div(&x.ln()?)?;
            Ok(li(q, d, cfg)?.value.sub(&ratio))
        },
        Rational::from((7, 2)),
        Rational::from(4),
        &target,
        digits,
        cfg,
    )?;
    let mut guard = alpha_cache().lock().unwrap();
    *guard = Some((digits, iv.clone()));
    Ok(iv)
}

/// Enclosure of the argmax of `beta_n(t)` on the default bracket
/// `[log mu, 2]`; see [`rho_n_search_in`].
pub fn rho_n_search(
    n: u64,
    tol: &Rational,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<Interval> {
    let (_, log_mu_hi) = soldner_mu(digits + 2, cfg)?.ln()?.to_rationals();
    rho_n_search_in(n, log_mu_hi, Rational::from(2), tol, digits, cfg)
}

/// Enclosure of the argmax of `beta_n(t)` on `[a, b]` located by certified
/// derivative-sign bisection; enclosure width at most `tol`. The bracket
/// must sit inside the region where the sum starts at 1, i.e. `a >= log mu`.
pub fn rho_n_search_in(
    n: u64,
    mut a: Rational,
    mut b: Rational,
    tol: &Rational,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<Interval> {
    if n == 0 {
        return Err(Error::Domain {
            op: "rho_n_search",
            msg: "n must be >= 1".into(),
        });
    }
    if n - 1 > EXACT_LIMIT {
        return Err(Error::Domain {
            op: "rho_n_search",
            msg: format!("n = {n} beyond exact harmonic range {EXACT_LIMIT}"),
        });
    }
    let hs = harmonic_rationals(n - 1);
    // derivative of beta_n: n/(t + log n) - li(e^t n)/e^t + sum 1/(H_k - gamma + t)^2
    let deriv = |tq: &Rational, d: u32| -> Result<Interval> {
        let t = Interval::from_rational(tq, d);
        let gamma = euler_gamma(d + 2, cfg)?;
        let n_iv = Interval::exact_u64(n, d);
        let mut v = n_iv.div(&t.add(&n_iv.ln()?))?;
        v = v.sub(&li_scaled_u64(&t, n, d, cfg)?);
        let mut sum = Interval::exact_u64(0, d);
        for h in hs.iter().skip(1) {
            let shifted = Interval::from_rational(&Rational::from(h + tq), d).sub(&gamma);
            sum = sum.add(&shifted.pow_int(2)?.recip()?);
        }
        Ok(v.add(&sum))
    };
    let sign_at = |tq: &Rational| -> Result<i32> {
        let mut d = digits;
        loop {
            let v = deriv(tq, d)?;
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
    if sign_at(&a)? <= 0 || sign_at(&b)? >= 0 {
        return Err(Error::NoInteriorMax { n });
    }
    while Rational::from(&b - &a) > *tol {
        let m = Rational::from(&a + &b) / 2u32;
        if sign_at(&m)? > 0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Interval::from_rational_bounds(&a, &b, digits + 2))
}

/// Harmonic mean `M_{-1}(H_1 + t, ..., H_n + t) = n / sum_k 1/(H_k + t)`.
pub fn harmonic_mean_shifted(
    t: &Rational,
    n: u64,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<Interval> {
    if *t <= -1 {
        return Err(Error::Domain {
            op: "harmonic_mean_shifted",
            msg: format!("t = {t} makes H_1 + t non-positive"),
        });
    }
    if n == 0 {
        return Err(Error::Domain {
            op: "harmonic_mean_shifted",
            msg: "n must be >= 1".into(),
        });
    }
    let mut ctx = ShiftContext::new(Shift::GammaPlus(t.clone()), 1, digits, cfg)?;
    let s = ctx.partial_inverse_sum(n + 1, 1)?;
    Interval::exact_u64(n, digits).div(&s)
}
