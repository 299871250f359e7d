//! Command-line front end.
//!
//! Data goes to stdout (or `--out FILE`, written atomically), logs to
//! stderr. Exit codes: 0 success, 2 usage errors, 3 precision errors,
//! 4 when a scan finds a certified violation, 5 when indeterminate
//! verdicts remain.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use harmonic_li_core::util::rational_from_decimal;
use harmonic_li_core::*;
use rug::Rational;

const ENV_DIGITS: &str = "HARMONIC_LI_DIGITS";
const ENV_CACHE: &str = "HARMONIC_LI_CACHE";

#[derive(Parser)]
#[command(
    name = "harmonic-li",
    about = "Certified bounds for harmonic-number discretizations of the logarithmic integral",
    version
)]
struct Cli {
    /// Working precision in significant decimal digits (overrides HARMONIC_LI_DIGITS).
    #[arg(long, global = true)]
    digits: Option<u32>,

    /// Prime-count cache file (overrides HARMONIC_LI_CACHE).
    #[arg(long, global = true)]
    cache_path: Option<PathBuf>,

    /// Write data output to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enclosures of gamma, e^gamma, mu, 1/log mu, alpha*, log alpha*.
    Constants,
    /// Certified two-sided bounds for beta(t).
    Beta {
        /// Shift: gamma, gamma+1, log2, -log2, logmu, logalpha, or a decimal.
        #[arg(long)]
        t: String,
        /// Truncation index (defaults to R_t).
        #[arg(long)]
        n: Option<u64>,
    },
    /// Reproduce one of the published tables (certified columns only).
    Table {
        /// Which table: 1, 2, 3, or 4.
        which: u8,
        /// Append an uncertified high-n point estimate column.
        #[arg(long)]
        estimate: bool,
    },
    /// Scan an inequality preset (or a custom parameter tuple) over a range of n.
    Verify {
        /// Preset id: rh5, rh6, rh6b, rh7, rh8a, rh9.
        #[arg(long, conflicts_with = "custom")]
        preset: Option<String>,
        /// Custom tuple M,ALPHA,C,T,R,LAMBDA (decimals; T accepts shift keywords).
        #[arg(long)]
        custom: Option<String>,
        /// Scan range a:b (defaults to the preset's directly verified range).
        #[arg(long)]
        range: Option<String>,
        /// Bound form to evaluate.
        #[arg(long, value_enum, default_value_t = VariantArg::Log)]
        variant: VariantArg,
        /// Output format.
        #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
        format: FormatArg,
    },
    /// Exact prime count pi(x).
    Pi {
        /// Threshold (decimal; floored).
        #[arg(long)]
        x: String,
    },
    /// Residual series pi(e^t n) - e^t sum_{k=N}^{n-1} 1/(H_k - gamma + t).
    Residuals {
        #[arg(long)]
        t: String,
        /// Starting summation index.
        #[arg(long = "N")]
        start: u64,
        #[arg(long)]
        range: String,
        #[arg(long, default_value_t = 1)]
        stride: u64,
    },
    /// Enclosure of the local maximum location of beta_n on [log mu, 2].
    Rho {
        #[arg(long)]
        n: u64,
        /// Enclosure width target (decimal).
        #[arg(long, default_value = "0.000001")]
        tol: String,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Log,
    Harmonic,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::PrecisionExceeded { .. } | Error::IntegerBoundary { .. } => 3,
        _ => 2,
    }
}

struct Ctx {
    cfg: PrecisionConfig,
    /// Requested output precision; the working precision is this clamped
    /// from below at the 15-digit configuration floor.
    target_digits: u32,
    cache_path: Option<PathBuf>,
    out: Option<PathBuf>,
}

impl Ctx {
    fn counter(&self) -> Result<PrimeCounter> {
        let config = SieveConfig::default();
        match &self.cache_path {
            Some(p) if p.exists() => match PrimeCountCache::load(p) {
                Ok(cache) => PrimeCounter::with_cache(config, cache),
                Err(e) => {
                    eprintln!(
                        "warning: cache at {} unusable ({e}); re-sieving",
                        p.display()
                    );
                    PrimeCounter::new(config)
                }
            },
            _ => PrimeCounter::new(config),
        }
    }

    fn persist(&self, counter: &PrimeCounter) {
        if let Some(p) = &self.cache_path {
            if let Err(e) = counter.cache.save(p) {
                eprintln!("warning: could not persist cache to {}: {e}", p.display());
            }
        }
    }

    fn emit(&self, data: &str) -> Result<()> {
        match &self.out {
            Some(path) => {
                let tmp = path.with_extension("tmp");
                let mut f = fs::File::create(&tmp)?;
                f.write_all(data.as_bytes())?;
                f.sync_all()?;
                fs::rename(&tmp, path)?;
                Ok(())
            }
            None => {
                print!("{data}");
                Ok(())
            }
        }
    }
}

fn interval_cols(iv: &Interval, sig: usize) -> (String, String) {
    iv.display_outward(sig)
}

fn cmd_constants(ctx: &Ctx) -> Result<u8> {
    let d = ctx.target_digits;
    let c = &ctx.cfg;
    let gamma = constants::euler_gamma(d, c)?;
    let e_gamma = constants::euler_gamma(d + 2, c)?.exp();
    let mu = soldner_mu(d, c)?;
    let inv_log_mu = soldner_mu(d + 2, c)?.ln()?.recip()?;
    let alpha = alpha_star(d, c)?;
    let log_alpha = alpha_star(d + 2, c)?.ln()?;
    let mut out = String::from("name,lo,hi\n");
    for (name, iv) in [
        ("gamma", &gamma),
        ("exp_gamma", &e_gamma),
        ("mu", &mu),
        ("inv_log_mu", &inv_log_mu),
        ("alpha_star", &alpha),
        ("log_alpha_star", &log_alpha),
    ] {
        let (lo, hi) = interval_cols(iv, d as usize);
        out.push_str(&format!("{name},{lo},{hi}\n"));
    }
    ctx.emit(&out)?;
    Ok(0)
}

fn cmd_beta(ctx: &Ctx, t: &str, n: Option<u64>) -> Result<u8> {
    let shift = Shift::parse(t)?;
    let d = ctx.cfg.working_digits;
    let rc = r_ceiling(&shift, d, &ctx.cfg)?;
    let bp = beta_bounds(&shift, n, d, &ctx.cfg)?;
    let sig = 12usize;
    let (lo, _) = bp.lower.display_outward(sig);
    let (_, hi) = bp.upper.display_outward(sig);
    let out = format!(
        "t,n,r_ceiling,beta_lower,beta_upper\n{},{},{},{},{}\n",
        shift, bp.n_used, rc.r_ceil, lo, hi
    );
    ctx.emit(&out)?;
    Ok(0)
}

/// Uncertified point estimate of beta(t): midpoint of the bounds at a deep
/// truncation.
fn beta_estimate(shift: &Shift, d: u32, cfg: &PrecisionConfig) -> Result<String> {
    let rc = r_ceiling(shift, d, cfg)?;
    let bp = beta_bounds(shift, Some(rc.r_ceil + 2000), d, cfg)?;
    Ok(harmonic_li_core::interval::float_to_decimal(
        &bp.enclosure().midpoint(),
        10,
        rug::float::Round::Nearest,
    ))
}

fn cmd_table(ctx: &Ctx, which: u8, estimate: bool) -> Result<u8> {
    let d = ctx.cfg.working_digits;
    let c = &ctx.cfg;
    let mut failures = 0u32;
    let mut out = String::new();
    match which {
        1 | 2 => {
            out.push_str("t,n,beta_lower,beta_upper,li_rt_lo,li_rt_hi,r_ceiling");
            if estimate {
                out.push_str(",beta_estimate_uncertified");
            }
            out.push('\n');
            let shifts: Vec<Shift> = if which == 1 {
                (-15..=15)
                    .rev()
                    .map(|t| Shift::Exact(Rational::from(t)))
                    .collect()
            } else {
                vec![
                    Shift::gamma_plus_one(),
                    Shift::LogAlpha,
                    Shift::Exact(Rational::from(1)),
                    Shift::log2(),
                    Shift::gamma(),
                    Shift::LogMu,
                    Shift::Exact(Rational::new()),
                    Shift::neg_log2(),
                    Shift::Exact(Rational::from(-1)),
                ]
            };
            for shift in shifts {
                let row = (|| -> Result<String> {
                    let rc = r_ceiling(&shift, d, c)?;
                    let n = if which == 1 { rc.r_ceil } else { 50 };
                    let bp = beta_bounds(&shift, Some(n), d, c)?;
                    let sctx = ShiftContext::new(shift.clone(), rc.r_ceil, d, c)?;
                    let li_rt = sctx.li_scaled_at(rc.r_ceil)?;
                    let (blo, _) = bp.lower.display_outward(10);
                    let (_, bhi) = bp.upper.display_outward(10);
                    let (llo, lhi) = li_rt.display_outward(10);
                    let mut row = format!("{shift},{n},{blo},{bhi},{llo},{lhi},{}", rc.r_ceil);
                    if estimate {
                        row.push(',');
                        row.push_str(&beta_estimate(&shift, d, c)?);
                    }
                    row.push('\n');
                    Ok(row)
                })();
                match row {
                    Ok(r) => out.push_str(&r),
                    Err(e) => {
                        eprintln!("warning: row t={shift} failed: {e}");
                        failures += 1;
                    }
                }
            }
        }
        3 => {
            out.push_str("n,rho_lo,rho_hi\n");
            let fine = rational_from_decimal("0.00000001").unwrap();
            let coarse = rational_from_decimal("0.000001").unwrap();
            let mut ns: Vec<(u64, &Rational)> = (1..=10).map(|n| (n, &fine)).collect();
            ns.push((4000, &coarse));
            ns.push((5000, &coarse));
            for (n, tol) in ns {
                match rho_n_search(n, tol, d, c) {
                    Ok(rho) => {
                        let (lo, hi) = rho.display_outward(9);
                        out.push_str(&format!("{n},{lo},{hi}\n"));
                    }
                    Err(e) => {
                        eprintln!("warning: row n={n} failed: {e}");
                        failures += 1;
                    }
                }
            }
        }
        4 => {
            out.push_str("t,n,beta_lower,beta_upper");
            if estimate {
                out.push_str(",beta_estimate_uncertified");
            }
            out.push('\n');
            for ts in [
                "1.274", "1.280", "1.281", "1.282", "1.283", "1.284", "1.285", "1.290",
            ] {
                let shift = Shift::Exact(rational_from_decimal(ts)?);
                match beta_bounds(&shift, Some(100), d, c) {
                    Ok(bp) => {
                        let (blo, _) = bp.lower.display_outward(9);
                        let (_, bhi) = bp.upper.display_outward(9);
                        let mut row = format!("{ts},100,{blo},{bhi}");
                        if estimate {
                            row.push(',');
                            row.push_str(&beta_estimate(&shift, d, c)?);
                        }
                        row.push('\n');
                        out.push_str(&row);
                    }
                    Err(e) => {
                        eprintln!("warning: row t={ts} failed: {e}");
                        failures += 1;
                    }
                }
            }
        }
        _ => {
            return Err(Error::Domain {
                op: "table",
                msg: format!("no table {which}"),
            });
        }
    }
    ctx.emit(&out)?;
    Ok(if failures > 0 { 3 } else { 0 })
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| Error::Domain {
        op: "range",
        msg: format!("expected a:b, got {s:?}"),
    })?;
    let lo: u64 = a.parse().map_err(|_| Error::Domain {
        op: "range",
        msg: format!("bad {a:?}"),
    })?;
    let hi: u64 = b.parse().map_err(|_| Error::Domain {
        op: "range",
        msg: format!("bad {b:?}"),
    })?;
    Ok((lo, hi))
}

fn parse_custom(spec: &str, variant: BoundForm) -> Result<InequalityPreset> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 6 {
        return Err(Error::Domain {
            op: "custom",
            msg: "expected M,ALPHA,C,T,R,LAMBDA".into(),
        });
    }
    let m = rational_from_decimal(parts[0])?;
    let alpha = rational_from_decimal(parts[1])?;
    let c = rational_from_decimal(parts[2])?;
    let shift = Shift::parse(parts[3])?;
    let r = rational_from_decimal(parts[4])?;
    let lambda = rational_from_decimal(parts[5])?;
    let r_ceil = {
        let num = r.numer();
        let den = r.denom();
        let shifted = rug::Integer::from(num + den) - 1u32;
        shifted
            .div_rem_floor(den.clone())
            .0
            .to_u64()
            .ok_or_else(|| Error::Domain {
                op: "custom",
                msg: "bad r".into(),
            })?
    };
    Ok(InequalityPreset {
        id: "custom".into(),
        shift,
        sum_start: SumStart::Explicit(r_ceil),
        lambda,
        m: MConstant::Plain(m),
        alpha_exponent: alpha,
        c,
        n_threshold: 1,
        known_exceptions: vec![],
        variant,
        proof_hi: u64::MAX,
    })
}

fn cmd_verify(
    ctx: &Ctx,
    preset: Option<String>,
    custom: Option<String>,
    range: Option<String>,
    variant: VariantArg,
    format: FormatArg,
) -> Result<u8> {
    let variant = match variant {
        VariantArg::Log => BoundForm::Log,
        VariantArg::Harmonic => BoundForm::Harmonic,
    };
    let preset = match (preset, custom) {
        (Some(id), None) => {
            let mut p = preset_by_id(&id).ok_or_else(|| Error::Domain {
                op: "verify",
                msg: format!("unknown preset {id}"),
            })?;
            p.variant = variant;
            p
        }
        (None, Some(spec)) => parse_custom(&spec, variant)?,
        _ => {
            return Err(Error::Domain {
                op: "verify",
                msg: "exactly one of --preset or --custom is required".into(),
            });
        }
    };
    let (n_lo, n_hi) = match range {
        Some(r) => parse_range(&r)?,
        None => (1, preset.proof_hi),
    };
    let mut counter = ctx.counter()?;
    let report = scan(&preset, n_lo, n_hi, &mut counter, &ctx.cfg)?;
    ctx.persist(&counter);
    if report.beyond_proof_range {
        eprintln!(
            "note: range extends beyond the preset's directly verified range (n <= {}); conclusions out there are conditional",
            preset.proof_hi
        );
    }
    eprintln!(
        "scan {}: {} holds, {} fails, {} indeterminate in [{}, {}] ({} ms)",
        report.preset_id,
        report.holds,
        report.fails,
        report.indeterminate,
        report.n_lo,
        report.n_hi,
        report.wall_ms
    );
    match format {
        FormatArg::Csv => ctx.emit(&report.to_csv())?,
        FormatArg::Json => ctx.emit(&report.to_json_string())?,
    }
    if report.fails > 0 {
        Ok(4)
    } else if report.indeterminate > 0 {
        Ok(5)
    } else {
        Ok(0)
    }
}

fn cmd_pi(ctx: &Ctx, x: &str) -> Result<u8> {
    let q = rational_from_decimal(x)?;
    if q < 0 {
        return Err(Error::Domain {
            op: "pi",
            msg: "negative threshold".into(),
        });
    }
    let floor = q
        .clone()
        .floor()
        .numer()
        .to_u64()
        .ok_or(Error::LimitExceeded {
            value: u64::MAX,
            cap: PI_CAP,
        })?;
    let mut counter = ctx.counter()?;
    let count = counter.pi(floor)?;
    ctx.persist(&counter);
    ctx.emit(&format!("{count}\n"))?;
    Ok(0)
}

fn cmd_residuals(ctx: &Ctx, t: &str, start: u64, range: &str, stride: u64) -> Result<u8> {
    let shift = Shift::parse(t)?;
    let (n_lo, n_hi) = parse_range(range)?;
    let mut counter = ctx.counter()?;
    let rows = residual_series(&shift, start, n_lo, n_hi, stride, &mut counter, &ctx.cfg)?;
    ctx.persist(&counter);
    let mut out = String::from("n,residual_lo,residual_hi,normalized_lo,normalized_hi\n");
    for row in rows {
        let (rl, rh) = row.residual.display_outward(12);
        let (nl, nh) = row.normalized.display_outward(12);
        out.push_str(&format!("{},{rl},{rh},{nl},{nh}\n", row.n));
    }
    ctx.emit(&out)?;
    Ok(0)
}

fn cmd_rho(ctx: &Ctx, n: u64, tol: &str) -> Result<u8> {
    let tol = rational_from_decimal(tol)?;
    if tol <= 0 {
        return Err(Error::Domain {
            op: "rho",
            msg: "tol must be positive".into(),
        });
    }
    let rho = rho_n_search(n, &tol, ctx.cfg.working_digits, &ctx.cfg)?;
    let (lo, hi) = rho.display_outward(10);
    ctx.emit(&format!("n,rho_lo,rho_hi\n{n},{lo},{hi}\n"))?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    let digits = match cli.digits {
        Some(d) => Some(d),
        None => match std::env::var(ENV_DIGITS) {
            Ok(v) => Some(v.parse::<u32>().map_err(|_| Error::InvalidConfig {
                msg: format!("bad {ENV_DIGITS} value {v:?}"),
            })?),
            Err(_) => None,
        },
    };
    let target_digits = digits.unwrap_or(PrecisionConfig::default().working_digits);
    if target_digits == 0 {
        return Err(Error::InvalidConfig {
            msg: "digits must be >= 1".into(),
        });
    }
    let cfg = PrecisionConfig::with_working(target_digits.max(15))?;
    let cache_path = cli
        .cache_path
        .or_else(|| std::env::var(ENV_CACHE).ok().map(PathBuf::from));
    let ctx = Ctx {
        cfg,
        target_digits,
        cache_path,
        out: cli.out,
    };
    match cli.command {
        Command::Constants => cmd_constants(&ctx),
        Command::Beta { t, n } => cmd_beta(&ctx, &t, n),
        Command::Table { which, estimate } => cmd_table(&ctx, which, estimate),
        Command::Verify {
            preset,
            custom,
            range,
            variant,
            format,
        } => cmd_verify(&ctx, preset, custom, range, variant, format),
        Command::Pi { x } => cmd_pi(&ctx, &x),
        Command::Residuals {
            t,
            start,
            range,
            stride,
        } => cmd_residuals(&ctx, &t, start, &range, stride),
        Command::Rho { n, tol } => cmd_rho(&ctx, n, &tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
