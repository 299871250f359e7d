//! Exact prime counting through a segmented sieve of Eratosthenes with a
//! persistent, append-friendly cache of previously answered thresholds.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use rug::Rational;

use crate::error::{Error, Result};
use crate::interval::Interval;
use crate::util::fnv1a64;

/// Queries above this are rejected.
pub const PI_CAP: u64 = 10_000_000_000;

const CACHE_MAGIC: &str = "harmonic-li-picache";
const CACHE_VERSION: &str = "v1";

#[derive(Clone, Copy, Debug)]
pub struct SieveConfig {
    pub segment_size: u64,
    /// 0 means let the thread pool decide.
    pub parallel_segments: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_size: 1 << 20,
            parallel_segments: 0,
        }
    }
}

impl SieveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.segment_size < (1 << 10) {
            return Err(Error::InvalidConfig {
                msg: format!("segment_size {} below 2^10", self.segment_size),
            });
        }
        Ok(())
    }
}

/// Monotone table of answered `(threshold, pi(threshold))` pairs.
#[derive(Clone, Debug, Default)]
pub struct PrimeCountCache {
    pub limit: u64,
    entries: BTreeMap<u64, u64>,
}

impl PrimeCountCache {
    pub fn entries(&self) -> impl Iterator<Item = (&u64, &u64)> {
        self.entries.iter()
    }

    pub fn lookup(&self, threshold: u64) -> Option<u64> {
        self.entries.get(&threshold).copied()
    }

    fn record(&mut self, threshold: u64, count: u64) {
        self.entries.insert(threshold, count);
        self.limit = self.limit.max(threshold);
    }

    pub fn checksum(&self) -> u64 {
        let mut body = format!("{}\n", self.limit);
        for (t, c) in &self.entries {
            body.push_str(&format!("{t},{c}\n"));
        }
        fnv1a64(body.as_bytes())
    }

    /// Serializes as the versioned ASCII format:
    /// `harmonic-li-picache v1 <limit> <checksum>` then `threshold,count`
    /// lines in ascending order.
    pub fn to_file_string(&self) -> String {
        let mut out = format!(
            "{CACHE_MAGIC} {CACHE_VERSION} {} {:016x}\n",
            self.limit,
            self.checksum()
        );
        for (t, c) in &self.entries {
            out.push_str(&format!("{t},{c}\n"));
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp)?;
        f.write_all(self.to_file_string().as_bytes())?;
        f.sync_all()?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<PrimeCountCache> {
        let text = fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<PrimeCountCache> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Cache {
            msg: "empty cache file".into(),
        })?;
        let parts: Vec<&str> = header.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != CACHE_MAGIC || parts[1] != CACHE_VERSION {
            return Err(Error::Cache {
                msg: format!("bad header {header:?}"),
            });
        }
        let limit: u64 = parts[2].parse().map_err(|_| Error::Cache {
            msg: "bad limit field".into(),
        })?;
        let checksum = u64::from_str_radix(parts[3], 16).map_err(|_| Error::Cache {
            msg: "bad checksum field".into(),
        })?;
        let mut cache = PrimeCountCache {
            limit,
            entries: BTreeMap::new(),
        };
        let mut last: Option<(u64, u64)> = None;
        for line in lines {
            if line.is_empty() {
                continue;
            }
            let (t, c) = line.split_once(',').ok_or_else(|| Error::Cache {
                msg: format!("bad entry {line:?}"),
            })?;
            let t: u64 = t.parse().map_err(|_| Error::Cache {
                msg: format!("bad entry {line:?}"),
            })?;
            let c: u64 = c.parse().map_err(|_| Error::Cache {
                msg: format!("bad entry {line:?}"),
            })?;
            if let Some((pt, pc)) = last {
                if t <= pt || c < pc {
                    return Err(Error::Cache {
                        msg: "entries not monotone ascending".into(),
                    });
                }
            }
            last = Some((t, c));
            cache.entries.insert(t, c);
        }
        if cache.checksum() != checksum {
            return Err(Error::Cache {
                msg: "checksum mismatch".into(),
            });
        }
        Ok(cache)
    }
}

/// Montgomery-Vaughan gap verdict for a pair `y > x`.
#[derive(Clone, Debug)]
pub struct MvCheck {
    pub pi_x: u64,
    pub pi_y: u64,
    pub bound: Interval,
    pub margin: Interval,
    pub holds: bool,
}

/// Exact `pi(x)` backed by a segmented sieve; results are cached.
pub struct PrimeCounter {
    config: SieveConfig,
    base_primes: Vec<u64>,
    base_limit: u64,
    /// cumulative prime counts at segment boundaries:
    /// `seg_counts[i]` = number of primes below `(i+1) * segment_size`
    seg_counts: Vec<u64>,
    pub cache: PrimeCountCache,
}

impl PrimeCounter {
    pub fn new(config: SieveConfig) -> Result<Self> {
        config.validate()?;
        Ok(PrimeCounter {
            config,
            base_primes: Vec::new(),
            base_limit: 0,
            seg_counts: Vec::new(),
            cache: PrimeCountCache::default(),
        })
    }

    pub fn with_cache(config: SieveConfig, cache: PrimeCountCache) -> Result<Self> {
        let mut c = PrimeCounter::new(config)?;
        c.cache = cache;
        Ok(c)
    }

    fn ensure_base(&mut self, upto: u64) {
        let need = (upto as f64).sqrt() as u64 + 2;
        if need <= self.base_limit {
            return;
        }
        let n = need as usize;
        let mut composite = vec![false; n + 1];
        self.base_primes.clear();
        for p in 2..=n {
            if !composite[p] {
                self.base_primes.push(p as u64);
                let mut m = p * p;
                while m <= n {
                    composite[m] = true;
                    m += p;
                }
            }
        }
        self.base_limit = need;
    }

    /// Marks composites among odd numbers in `[lo, lo + 2*len)`; returns the
    /// flags for odds `lo, lo+2, ...` (`lo` odd).
    fn sieve_odd_segment(base: &[u64], lo: u64, len: usize) -> Vec<bool> {
        debug_assert!(lo % 2 == 1);
        let mut composite = vec![false; len];
        let hi = lo + 2 * len as u64;
        // base[0] is 2; even values are not represented
        for &p in base.iter().skip(1) {
            if p * p >= hi {
                break;
            }
            let mut start = p * p;
            if start < lo {
                // first odd multiple of p at or above lo
                let mut m = lo.div_ceil(p) * p;
                if m.is_multiple_of(2) {
                    m += p;
                }
                start = m.max(p * p);
            }
            let mut idx = (start - lo) / 2;
            while (idx as usize) < len {
                composite[idx as usize] = true;
                idx += p;
            }
        }
        composite
    }

    /// Number of primes in `[lo_bound, hi_bound]` (inclusive), sieving odd
    /// numbers only.
    fn count_range(&self, lo_bound: u64, hi_bound: u64) -> u64 {
        if hi_bound < 2 || hi_bound < lo_bound {
            return 0;
        }
        let mut count = 0u64;
        if lo_bound <= 2 {
            count += 1;
        }
        let first_odd = lo_bound.max(3) | 1;
        if first_odd > hi_bound {
            return count;
        }
        let len = ((hi_bound - first_odd) / 2 + 1) as usize;
        let flags = Self::sieve_odd_segment(&self.base_primes, first_odd, len);
        count + flags.iter().filter(|&&c| !c).count() as u64
    }

    /// Extends the cumulative segment counts so that segment `idx` exists,
    /// sieving missing segments in parallel and reducing in index order.
    fn ensure_segments(&mut self, idx: usize) {
        if self.seg_counts.len() > idx {
            return;
        }
        let s = self.config.segment_size;
        self.ensure_base((idx as u64 + 1) * s);
        let from = self.seg_counts.len();
        let missing: Vec<usize> = (from..=idx).collect();
        let base = &self.base_primes;
        let counts: Vec<u64> = if self.config.parallel_segments == 1 {
            missing
                .iter()
                .map(|&i| count_segment(base, i as u64, s))
                .collect()
        } else {
            missing
                .par_iter()
                .map(|&i| count_segment(base, i as u64, s))
                .collect()
        };
        let mut acc = if from == 0 {
            0
        } else {
            self.seg_counts[from - 1]
        };
        for c in counts {
            acc += c;
            self.seg_counts.push(acc);
        }
    }

    /// Exact count of primes `<= x`.
    pub fn pi(&mut self, x: u64) -> Result<u64> {
        if x > PI_CAP {
            return Err(Error::LimitExceeded {
                value: x,
                cap: PI_CAP,
            });
        }
        if let Some(c) = self.cache.lookup(x) {
            return Ok(c);
        }
        let s = self.config.segment_size;
        let idx = (x / s) as usize;
        let below = if idx == 0 {
            0
        } else {
            self.ensure_segments(idx - 1);
            self.seg_counts[idx - 1]
        };
        self.ensure_base(x + 1);
        let count = below + self.count_range(idx as u64 * s, x);
        self.cache.record(x, count);
        Ok(count)
    }

    /// `pi` over an ascending list of real thresholds (floored), one pass.
    pub fn pi_batch(&mut self, thresholds: &[u64]) -> Result<Vec<u64>> {
        if thresholds.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Domain {
                op: "pi_batch",
                msg: "thresholds not ascending".into(),
            });
        }
        thresholds.iter().map(|&x| self.pi(x)).collect()
    }

    /// Floor of a certified enclosure; the caller escalates precision when
    /// the enclosure straddles an integer.
    pub fn floor_of(x: &Interval) -> Result<u64> {
        match x.floor_unique() {
            Some(f) => f.to_u64().ok_or_else(|| Error::Domain {
                op: "pi",
                msg: "threshold out of range".into(),
            }),
            None => Err(Error::IntegerBoundary {
                what: "prime-count threshold".into(),
            }),
        }
    }

    /// Exact `pi` at a real threshold given as a certified enclosure.
    pub fn pi_interval(&mut self, x: &Interval) -> Result<u64> {
        self.pi(Self::floor_of(x)?)
    }

    /// Enclosure of the prime density `pi(x)/x` for a rational `x > 0`.
    pub fn prime_density(&mut self, x: &Rational, digits: u32) -> Result<Interval> {
        if *x <= 0 {
            return Err(Error::Domain {
                op: "prime_density",
                msg: format!("x = {x} <= 0"),
            });
        }
        let floor = x
            .clone()
            .floor()
            .numer()
            .to_u64()
            .ok_or_else(|| Error::Domain {
                op: "prime_density",
                msg: "threshold out of range".into(),
            })?;
        let count = self.pi(floor)?;
        let exact = Rational::from(count) / x.clone();
        Ok(Interval::from_rational(&exact, digits))
    }

    /// Density at an interval threshold (`pi` from the certified floor).
    pub fn prime_density_interval(&mut self, x: &Interval, digits: u32) -> Result<Interval> {
        let count = self.pi_interval(x)?;
        Interval::exact_u64(count, digits).div(x)
    }

    /// Checks `0 <= pi(y) - pi(x) < 2(y-x)/log(y-x)` and returns the margin.
    pub fn mv_gap_check(&mut self, x: &Rational, y: &Rational, digits: u32) -> Result<MvCheck> {
        if !(*x > 0 && y > x) {
            return Err(Error::Domain {
                op: "mv_gap_check",
                msg: "need y > x > 0".into(),
            });
        }
        let gap = Rational::from(y - x);
        if gap <= 1 {
            return Err(Error::Domain {
                op: "mv_gap_check",
                msg: "need y - x > 1".into(),
            });
        }
        let fx = x.clone().floor().numer().to_u64().unwrap_or(0);
        let fy = y
            .clone()
            .floor()
            .numer()
            .to_u64()
            .ok_or(Error::LimitExceeded {
                value: u64::MAX,
                cap: PI_CAP,
            })?;
        let pi_x = self.pi(fx)?;
        let pi_y = self.pi(fy)?;
        let diff = pi_y - pi_x;
        let gap_iv = Interval::from_rational(&gap, digits);
        let bound = gap_iv
            .mul(&Interval::exact_u64(2, digits))
            .div(&gap_iv.ln()?)?;
        let margin = bound.sub(&Interval::exact_u64(diff, digits));
        let holds = margin.is_strictly_positive();
        Ok(MvCheck {
            pi_x,
            pi_y,
            bound,
            margin,
            holds,
        })
    }
}

fn count_segment(base: &[u64], idx: u64, segment_size: u64) -> u64 {
    let lo = idx * segment_size;
    let hi = lo + segment_size - 1;
    let mut count = 0u64;
    if lo <= 2 && hi >= 2 {
        count += 1;
    }
    let first_odd = lo.max(3) | 1;
    if first_odd > hi {
        return count;
    }
    let len = ((hi - first_odd) / 2 + 1) as usize;
    let flags = PrimeCounter::sieve_odd_segment(base, first_odd, len);
    count + flags.iter().filter(|&&c| !c).count() as u64
}
