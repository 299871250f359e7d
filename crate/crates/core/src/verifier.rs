//! Scans of the finite inequalities relating the prime density to shifted
//! harmonic sums, with three-valued certified verdicts.
//!
//! An interval evaluation that straddles zero is never reported as a
//! violation: the margin is re-evaluated at doubled precision up to the
//! configured ceiling, and only then does the verdict become
//! `Indeterminate`.

use std::time::Instant;

use rayon::prelude::*;
use rug::float::{Constant, Round};
use rug::{Float, Rational};

use crate::discretized::{r_ceiling, ShiftContext};
use crate::error::{Error, Result};
use crate::interval::{bits_for_digits, Interval, PrecisionConfig};
use crate::primes::PrimeCounter;
use crate::shift::Shift;
use crate::util::rational_from_decimal;

/// Three-valued certified verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Holds => write!(f, "holds"),
            Verdict::Fails => write!(f, "fails"),
            Verdict::Indeterminate => write!(f, "indeterminate"),
        }
    }
}

/// Which of the two displayed bound forms to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundForm {
    /// `t + log n` in the numerator.
    Log,
    /// `H_n - gamma + t` in the numerator.
    Harmonic,
}

impl std::fmt::Display for BoundForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundForm::Log => write!(f, "log-form"),
            BoundForm::Harmonic => write!(f, "harmonic-form"),
        }
    }
}

/// The constant `M`: either an exact rational multiple of `1/pi` or a plain
/// rational.
#[derive(Clone, Debug)]
pub enum MConstant {
    OverPi(Rational),
    Plain(Rational),
}

impl MConstant {
    pub fn enclosure(&self, digits: u32) -> Result<Interval> {
        match self {
            MConstant::OverPi(q) => {
                let p = bits_for_digits(digits);
                let pi_lo = Float::with_val_round(p, Constant::Pi, Round::Down).0;
                let pi_hi = Float::with_val_round(p, Constant::Pi, Round::Up).0;
                let pi = Interval::from_endpoints(pi_lo, pi_hi);
                Interval::from_rational(q, digits).div(&pi)
            }
            MConstant::Plain(q) => Ok(Interval::from_rational(q, digits)),
        }
    }
}

/// Where the harmonic sum starts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SumStart {
    /// Start at `R_t = ceil(mu e^{-t})`.
    RCeil,
    /// Start at an explicit index.
    Explicit(u64),
}

/// Parameters of one named inequality.
#[derive(Clone, Debug)]
pub struct InequalityPreset {
    pub id: String,
    pub shift: Shift,
    pub sum_start: SumStart,
    pub lambda: Rational,
    pub m: MConstant,
    pub alpha_exponent: Rational,
    pub c: Rational,
    pub n_threshold: u64,
    pub known_exceptions: Vec<u64>,
    pub variant: BoundForm,
    /// Upper end of the directly verified range; scans default to it and
    /// label anything beyond as conditional.
    pub proof_hi: u64,
}

/// The shipped named presets.
pub fn presets() -> Vec<InequalityPreset> {
    let m = MConstant::OverPi(Rational::from((1, 8)));
    let half = Rational::from((1, 2));
    let c = Rational::from(2657);
    let lam = |s: &str| rational_from_decimal(s).unwrap();
    vec![
        InequalityPreset {
            id: "rh5".into(),
            shift: Shift::gamma(),
            sum_start: SumStart::RCeil,
            lambda: lam("0.4986013304"),
            m: m.clone(),
            alpha_exponent: half.clone(),
            c: c.clone(),
            n_threshold: 803,
            known_exceptions: vec![],
            variant: BoundForm::Log,
            proof_hi: 1491,
        },
        InequalityPreset {
            id: "rh6".into(),
            shift: Shift::gamma(),
            sum_start: SumStart::Explicit(2),
            lambda: lam("1.4986013304"),
            m: m.clone(),
            alpha_exponent: half.clone(),
            c: c.clone(),
            n_threshold: 1,
            known_exceptions: vec![],
            variant: BoundForm::Log,
            proof_hi: 1491,
        },
        InequalityPreset {
            id: "rh6b".into(),
            shift: Shift::gamma_plus_one(),
            sum_start: SumStart::RCeil,
            lambda: lam("0.7509547014"),
            m: m.clone(),
            alpha_exponent: half.clone(),
            c: c.clone(),
            n_threshold: 1,
            known_exceptions: vec![],
            variant: BoundForm::Log,
            proof_hi: 548,
        },
        InequalityPreset {
            id: "rh7".into(),
            shift: Shift::Exact(Rational::new()),
            sum_start: SumStart::Explicit(2),
            lambda: lam("1.0956456993"),
            m: m.clone(),
            alpha_exponent: half.clone(),
            c: c.clone(),
            n_threshold: 1427,
            known_exceptions: vec![],
            variant: BoundForm::Log,
            proof_hi: 2657,
        },
        InequalityPreset {
            id: "rh8a".into(),
            shift: Shift::log2(),
            sum_start: SumStart::RCeil,
            lambda: lam("0.6026096358"),
            m: m.clone(),
            alpha_exponent: half.clone(),
            c: c.clone(),
            n_threshold: 714,
            known_exceptions: vec![],
            variant: BoundForm::Log,
            proof_hi: 1328,
        },
        InequalityPreset {
            id: "rh9".into(),
            shift: Shift::Exact(Rational::from(1)),
            sum_start: SumStart::RCeil,
            lambda: lam("0.7418976158"),
            m,
            alpha_exponent: half,
            c,
            n_threshold: 1,
            known_exceptions: vec![82],
            variant: BoundForm::Log,
            proof_hi: 977,
        },
    ]
}

pub fn preset_by_id(id: &str) -> Option<InequalityPreset> {
    presets()
        .into_iter()
        .find(|p| p.id == id.to_ascii_lowercase())
}

/// One evaluated inequality instance.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub preset_id: String,
    pub n: u64,
    pub lhs: Interval,
    pub rhs: Interval,
    pub verdict: Verdict,
    pub margin: Interval,
}

impl CheckResult {
    fn from_sides(preset_id: String, n: u64, lhs: Interval, rhs: Interval) -> CheckResult {
        let margin = rhs.sub(&lhs);
        let verdict = if margin.is_strictly_positive() {
            Verdict::Holds
        } else if margin.is_strictly_negative() {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        };
        CheckResult {
            preset_id,
            n,
            lhs,
            rhs,
            verdict,
            margin,
        }
    }
}

/// Aggregated scan output.
#[derive(Clone, Debug)]
pub struct ScanReport {
    pub preset_id: String,
    pub variant: BoundForm,
    pub n_lo: u64,
    pub n_hi: u64,
    pub holds: u64,
    pub fails: u64,
    pub indeterminate: u64,
    pub violations: Vec<u64>,
    pub indeterminate_ns: Vec<u64>,
    pub rows: Vec<CheckResult>,
    pub wall_ms: u128,
    pub digits: u32,
    pub cache_checksum: String,
    pub beyond_proof_range: bool,
}

const CSV_HEADER: &str = "preset,n,lhs_lo,lhs_hi,rhs_lo,rhs_hi,verdict";

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let (l_lo, l_hi) = r.lhs.display_outward(17);
            let (r_lo, r_hi) = r.rhs.display_outward(17);
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.preset_id, r.n, l_lo, l_hi, r_lo, r_hi, r.verdict
            ));
        }
        out
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json())
            .expect("report serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let (l_lo, l_hi) = r.lhs.display_outward(17);
                let (r_lo, r_hi) = r.rhs.display_outward(17);
                serde_json::json!({
                    "preset": r.preset_id,
                    "n": r.n,
                    "lhs_lo": l_lo,
                    "lhs_hi": l_hi,
                    "rhs_lo": r_lo,
                    "rhs_hi": r_hi,
                    "verdict": r.verdict.to_string(),
                })
            })
            .collect();
        serde_json::json!({
            "preset": self.preset_id,
            "variant": self.variant.to_string(),
            "range": [self.n_lo, self.n_hi],
            "counts": {
                "holds": self.holds,
                "fails": self.fails,
                "indeterminate": self.indeterminate,
            },
            "violations": self.violations,
            "indeterminate_ns": self.indeterminate_ns,
            "metadata": {
                "precision_digits": self.digits,
                "cache_checksum": self.cache_checksum,
                "wall_ms": self.wall_ms,
                "beyond_proof_range": self.beyond_proof_range,
            },
            "rows": rows,
        })
    }
}

fn sum_start_index(preset: &InequalityPreset, digits: u32, cfg: &PrecisionConfig) -> Result<u64> {
    match preset.sum_start {
        SumStart::RCeil => Ok(r_ceiling(&preset.shift, digits, cfg)?.r_ceil),
        SumStart::Explicit(k) => Ok(k),
    }
}

/// Certified floor of `e^t n`, escalating the precision of the shift
/// enclosure when the product straddles an integer. For `t = log q` the
/// threshold is the exact rational `q n`, which no amount of precision
/// could separate from an integer, so it is floored symbolically.
fn floor_exp_shift(shift: &Shift, n: u64, digits: u32, cfg: &PrecisionConfig) -> Result<u64> {
    if let Shift::LogRational(q) = shift {
        let x = q * Rational::from(n);
        return x.floor().numer().to_u64().ok_or_else(|| Error::Domain {
            op: "pi",
            msg: "threshold out of range".into(),
        });
    }
    let mut d = digits;
    loop {
        let x = shift
            .enclosure(d, cfg)?
            .exp()
            .mul(&Interval::exact_u64(n, d));
        match PrimeCounter::floor_of(&x) {
            Ok(f) => return Ok(f),
            Err(Error::IntegerBoundary { .. }) => {
                let next = d.saturating_mul(2);
                cfg.check_refine(next).map_err(|_| Error::IntegerBoundary {
                    what: format!("e^t n at t = {shift}, n = {n}"),
                })?;
                d = next;
            }
            Err(e) => return Err(e),
        }
    }
}

struct RowInputs {
    n: u64,
    pi: u64,
    sum: Interval,
    factor: Interval,
}

/// Shared rhs of the displayed inequalities.
///
/// Forms 1 and 2 bound `|pi(e^t n) - e^t sum|`; forms 3 and 4 divide
/// through by `e^t n`. Odd forms use `t + log n`, even forms
/// `H_n - gamma + t`.
#[allow(clippy::too_many_arguments)]
fn bound_rhs(
    form: u8,
    m: &Interval,
    alpha: &Rational,
    lambda: &Interval,
    t: &Interval,
    n: u64,
    factor: &Interval,
    digits: u32,
) -> Result<Interval> {
    let n_iv = Interval::exact_u64(n, digits);
    let ln_n = n_iv.ln()?;
    let alpha_iv = Interval::from_rational(alpha, digits);
    match form {
        1 | 2 => {
            // M e^{alpha t} n^alpha factor + lambda e^t
            let e_at = t.mul(&alpha_iv).exp();
            let n_a = ln_n.mul(&alpha_iv).exp();
            Ok(m.mul(&e_at)
                .mul(&n_a)
                .mul(factor)
                .add(&lambda.mul(&t.exp())))
        }
        3 | 4 => {
            // M e^{(alpha-1) t} n^{alpha-1} factor + lambda / n
            let am1 = alpha_iv.sub(&Interval::exact_u64(1, digits));
            let e_at = t.mul(&am1).exp();
            let n_a = ln_n.mul(&am1).exp();
            Ok(m.mul(&e_at).mul(&n_a).mul(factor).add(&lambda.div(&n_iv)?))
        }
        _ => Err(Error::Domain {
            op: "bound_rhs",
            msg: format!("form {form} outside 1..=4"),
        }),
    }
}

fn evaluate_rows(
    preset: &InequalityPreset,
    inputs: Vec<RowInputs>,
    t: &Interval,
    digits: u32,
) -> Result<Vec<CheckResult>> {
    let m = preset.m.enclosure(digits)?;
    let lambda = Interval::from_rational(&preset.lambda, digits);
    let form = match preset.variant {
        BoundForm::Log => 3u8,
        BoundForm::Harmonic => 4u8,
    };
    inputs
        .into_par_iter()
        .map(|row| {
            let n_iv = Interval::exact_u64(row.n, digits);
            let x = t.exp().mul(&n_iv);
            let p = Interval::exact_u64(row.pi, digits).div(&x)?;
            let lhs = p.sub(&row.sum.div(&n_iv)?).abs();
            let rhs = bound_rhs(
                form,
                &m,
                &preset.alpha_exponent,
                &lambda,
                t,
                row.n,
                &row.factor,
                digits,
            )?;
            Ok(CheckResult::from_sides(preset.id.clone(), row.n, lhs, rhs))
        })
        .collect()
}

fn gather_inputs(
    preset: &InequalityPreset,
    n_lo: u64,
    n_hi: u64,
    counter: &mut PrimeCounter,
    digits: u32,
    cfg: &PrecisionConfig,
) -> Result<(Vec<RowInputs>, Interval)> {
    let k0 = sum_start_index(preset, digits, cfg)?;
    let mut ctx = ShiftContext::new(preset.shift.clone(), k0, digits, cfg)?;
    let t = ctx.t_enclosure().clone();
    let thresholds: Vec<u64> = (n_lo..=n_hi)
        .map(|n| floor_exp_shift(&preset.shift, n, digits, cfg))
        .collect::<Result<_>>()?;
    let counts = counter.pi_batch(&thresholds)?;
    let mut inputs = Vec::with_capacity((n_hi - n_lo + 1) as usize);
    for (i, n) in (n_lo..=n_hi).enumerate() {
        let sum = if n <= k0 {
            Interval::exact_u64(0, digits)
        } else {
            ctx.partial_inverse_sum(n, 1)?
        };
        let factor = match preset.variant {
            BoundForm::Log => t.add(&Interval::exact_u64(n, digits).ln()?),
            BoundForm::Harmonic => ctx.shifted_harmonic(n)?,
        };
        inputs.push(RowInputs {
            n,
            pi: counts[i],
            sum,
            factor,
        });
    }
    Ok((inputs, t))
}

/// Evaluates one preset inequality at one index with certified arithmetic,
/// escalating precision while the verdict is indeterminate.
pub fn evaluate_inequality(
    preset: &InequalityPreset,
    n: u64,
    counter: &mut PrimeCounter,
    cfg: &PrecisionConfig,
) -> Result<CheckResult> {
    let mut digits = cfg.working_digits;
    loop {
        let (inputs, t) = gather_inputs(preset, n, n, counter, digits, cfg)?;
        let row = evaluate_rows(preset, inputs, &t, digits)?.pop().unwrap();
        if row.verdict != Verdict::Indeterminate {
            return Ok(row);
        }
        let next = digits.saturating_mul(2);
        if cfg.check_refine(next).is_err() {
            return Ok(row);
        }
        digits = next;
    }
}

/// Scans `[n_lo, n_hi]`, retrying indeterminate entries at doubled
/// precision before reporting them.
pub fn scan(
    preset: &InequalityPreset,
    n_lo: u64,
    n_hi: u64,
    counter: &mut PrimeCounter,
    cfg: &PrecisionConfig,
) -> Result<ScanReport> {
    if n_lo == 0 || n_hi < n_lo {
        return Err(Error::Domain {
            op: "scan",
            msg: format!("bad range {n_lo}:{n_hi}"),
        });
    }
    let start = Instant::now();
    let digits = cfg.working_digits;
    let (inputs, t) = gather_inputs(preset, n_lo, n_hi, counter, digits, cfg)?;
    let mut rows = evaluate_rows(preset, inputs, &t, digits)?;
    for row in rows.iter_mut() {
        if row.verdict == Verdict::Indeterminate {
            *row = evaluate_inequality(preset, row.n, counter, cfg)?;
        }
    }
    let mut holds = 0;
    let mut fails = 0;
    let mut indet = 0;
    let mut violations = Vec::new();
    let mut indeterminate_ns = Vec::new();
    for r in &rows {
        match r.verdict {
            Verdict::Holds => holds += 1,
            Verdict::Fails => {
                fails += 1;
                violations.push(r.n);
            }
            Verdict::Indeterminate => {
                indet += 1;
                indeterminate_ns.push(r.n);
            }
        }
    }
    Ok(ScanReport {
        preset_id: preset.id.clone(),
        variant: preset.variant,
        n_lo,
        n_hi,
        holds,
        fails,
        indeterminate: indet,
        violations,
        indeterminate_ns,
        rows,
        wall_ms: start.elapsed().as_millis(),
        digits,
        cache_checksum: format!("{:016x}", counter.cache.checksum()),
        beyond_proof_range: n_hi > preset.proof_hi,
    })
}

/// Evaluates one of the four displayed generic inequalities with arbitrary
/// constants. `form` selects the display; odd forms use `t + log n`.
#[allow(clippy::too_many_arguments)]
pub fn generic_bound_check(
    m: MConstant,
    alpha_exponent: Rational,
    c: Rational,
    shift: &Shift,
    r: &Rational,
    lambda: Rational,
    n: u64,
    form: u8,
    counter: &mut PrimeCounter,
    cfg: &PrecisionConfig,
) -> Result<CheckResult> {
    if !(1..=4).contains(&form) {
        return Err(Error::Domain {
            op: "generic_bound_check",
            msg: format!("form {form}"),
        });
    }
    let digits = cfg.working_digits;
    // preconditions: ceil(r) >= mu e^{-t} and n >= C e^{-t}
    let r_ceil = {
        let num = r.numer();
        let den = r.denom();
        let shifted = rug::Integer::from(num + den) - 1u32;
        shifted
            .div_rem_floor(den.clone())
            .0
            .to_u64()
            .ok_or_else(|| Error::Domain {
                op: "generic_bound_check",
                msg: "ceil(r) out of range".into(),
            })?
    };
    let t = shift.enclosure(digits, cfg)?;
    let mu_rt = crate::li::soldner_mu(digits + 2, cfg)?.mul(&t.neg().exp());
    if Interval::exact_u64(r_ceil, digits).hi() < mu_rt.hi() {
        return Err(Error::Domain {
            op: "generic_bound_check",
            msg: format!("ceil(r) = {r_ceil} not certified >= mu e^(-t)"),
        });
    }
    let c_limit = Interval::from_rational(&c, digits).mul(&t.neg().exp());
    if Interval::exact_u64(n, digits).hi() < c_limit.hi() {
        return Err(Error::Domain {
            op: "generic_bound_check",
            msg: format!("n = {n} not certified >= C e^(-t)"),
        });
    }
    let mut ctx = ShiftContext::new(shift.clone(), r_ceil, digits, cfg)?;
    let sum = if n <= r_ceil {
        Interval::exact_u64(0, digits)
    } else {
        ctx.partial_inverse_sum(n, 1)?
    };
    let factor = if form % 2 == 1 {
        t.add(&Interval::exact_u64(n, digits).ln()?)
    } else {
        ctx.shifted_harmonic(n)?
    };
    let pi_val = counter.pi(floor_exp_shift(shift, n, digits, cfg)?)?;
    let m_iv = m.enclosure(digits)?;
    let lambda_iv = Interval::from_rational(&lambda, digits);
    let n_iv = Interval::exact_u64(n, digits);
    let lhs = match form {
        1 | 2 => Interval::exact_u64(pi_val, digits)
            .sub(&t.exp().mul(&sum))
            .abs(),
        _ => {
            let x = t.exp().mul(&n_iv);
            Interval::exact_u64(pi_val, digits)
                .div(&x)?
                .sub(&sum.div(&n_iv)?)
                .abs()
        }
    };
    let rhs = bound_rhs(
        form,
        &m_iv,
        &alpha_exponent,
        &lambda_iv,
        &t,
        n,
        &factor,
        digits,
    )?;
    Ok(CheckResult::from_sides(
        format!("custom-form{form}"),
        n,
        lhs,
        rhs,
    ))
}

/// One residual-series row.
#[derive(Clone, Debug)]
pub struct ResidualRow {
    pub n: u64,
    pub residual: Interval,
    pub normalized: Interval,
}

/// `pi(e^t n) - e^t sum_{k=N}^{n-1} 1/(H_k - gamma + t)` with the
/// `sqrt(n) H_n` normalization, emitted for diagnostics only; asymptotic
/// statements are not decidable at this scale.
pub fn residual_series(
    shift: &Shift,
    start: u64,
    n_lo: u64,
    n_hi: u64,
    stride: u64,
    counter: &mut PrimeCounter,
    cfg: &PrecisionConfig,
) -> Result<Vec<ResidualRow>> {
    if stride == 0 {
        return Err(Error::Domain {
            op: "residual_series",
            msg: "stride must be >= 1".into(),
        });
    }
    if start == 0 || n_lo == 0 || n_hi < n_lo {
        return Err(Error::Domain {
            op: "residual_series",
            msg: "bad range".into(),
        });
    }
    let digits = cfg.working_digits;
    let mut ctx = ShiftContext::new(shift.clone(), start, digits, cfg)?;
    // precondition t > gamma - H_N, certified via the context's guard on
    // t > -log N plus an explicit check of the first denominator
    let first = ctx.shifted_harmonic(start)?;
    if !first.is_strictly_positive() {
        return Err(Error::Domain {
            op: "residual_series",
            msg: "t not certified above gamma - H_N".into(),
        });
    }
    let t = ctx.t_enclosure().clone();
    let ns: Vec<u64> = (n_lo..=n_hi).step_by(stride as usize).collect();
    let thresholds: Vec<u64> = ns
        .iter()
        .map(|&n| floor_exp_shift(shift, n, digits, cfg))
        .collect::<Result<_>>()?;
    let counts = counter.pi_batch(&thresholds)?;
    let e_t = t.exp();
    let mut out = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let sum = if n <= start {
            Interval::exact_u64(0, digits)
        } else {
            ctx.partial_inverse_sum(n, 1)?
        };
        let residual = Interval::exact_u64(counts[i], digits).sub(&e_t.mul(&sum));
        let h_n = ctx.harmonic_at(n)?;
        let denom = Interval::exact_u64(n, digits).sqrt()?.mul(&h_n);
        let normalized = residual.div(&denom)?;
        out.push(ResidualRow {
            n,
            residual,
            normalized,
        });
    }
    Ok(out)
}
