//! Exact Bernoulli numbers via the defining recurrence.

use std::sync::{Mutex, OnceLock};

use rug::{Integer, Rational};

/// Table of even-index Bernoulli numbers `B_{2k}` as exact rationals.
#[derive(Debug, Default)]
pub struct BernoulliTable {
    // all[m] = B_m, odd entries beyond B_1 are zero
    all: Vec<Rational>,
}

impl BernoulliTable {
    pub fn new() -> Self {
        BernoulliTable {
            all: vec![Rational::from(1), Rational::from((-1, 2))],
        }
    }

    /// Ensures `B_{2k}` is available, extending with
    /// `B_m = -1/(m+1) * sum_{j<m} C(m+1, j) B_j`.
    fn extend_to(&mut self, k: u32) {
        if self.all.len() < 2 {
            *self = BernoulliTable::new();
        }
        let target = 2 * k as usize;
        while self.all.len() <= target {
            let m = self.all.len();
            let mut acc = Rational::new();
            for (j, b) in self.all.iter().enumerate() {
                if b.cmp0() == std::cmp::Ordering::Equal {
                    continue;
                }
                let binom = Integer::from(m as u32 + 1).binomial(j as u32);
                acc += Rational::from((binom, Integer::from(1))) * b;
            }
            acc /= -Rational::from(m as u32 + 1);
            self.all.push(acc);
        }
    }

    pub fn even(&mut self, k: u32) -> Rational {
        self.extend_to(k);
        self.all[2 * k as usize].clone()
    }
}

fn table() -> &'static Mutex<BernoulliTable> {
    static TABLE: OnceLock<Mutex<BernoulliTable>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(BernoulliTable::new()))
}

/// `B_{2k}` as an exact rational, `k >= 1` (also valid for `k = 0`).
pub fn bernoulli_even(k: u32) -> Rational {
    table().lock().unwrap().even(k)
}
