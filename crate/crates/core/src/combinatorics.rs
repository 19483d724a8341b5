//! Restricted-composition weights `{N brace k}_d`.
//!
//! `{N brace k}_d` is the sum of `Π_j 1/r_j!` over all compositions
//! `r_1 + … + r_N = k` with every part `0 ≤ r_j ≤ d`. It is the
//! combinatorial factor multiplying `|k⟩` after an `N`-mode split,
//! per-mode truncation at `d` photons and recombination.
//!
//! Values are kept as exact rationals. They are computed with a
//! dynamic-programming recurrence that adds one mode at a time,
//! convolving the running row with `1/r!` for `r ∈ 0..=d`, which costs
//! `O(N·k·d)` instead of the exponential direct sum. The direct sum is
//! still available through [`enumerate_compositions`] and serves as an
//! independent check.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact value of `{N brace k}_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedWeight {
    pub value: BigRational,
    pub n_modes: usize,
    pub total_photons: usize,
    pub per_mode_cutoff: usize,
}

impl RestrictedWeight {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Nearest `f64`. Saturates to infinity for values beyond `f64` range.
    pub fn to_f64(&self) -> f64 {
        self.value.to_f64().unwrap_or(f64::INFINITY)
    }
}

/// One composition `r_1, …, r_N` of `k` with every part at most `d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    pub parts: Vec<usize>,
}

impl Composition {
    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    /// `Π_j 1/r_j!` as an exact rational.
    pub fn inverse_factorial_product(&self) -> BigRational {
        let denom = self
            .parts
            .iter()
            .fold(BigInt::one(), |acc, &r| acc * factorial(r));
        BigRational::new(BigInt::one(), denom)
    }
}

fn check_domain(n_modes: usize, per_mode_cutoff: usize) -> Result<()> {
    if n_modes == 0 {
        return Err(Error::Domain("number of modes must be at least 1".into()));
    }
    if per_mode_cutoff == 0 {
        return Err(Error::Domain(
            "per-mode photon cutoff must be at least 1".into(),
        ));
    }
    Ok(())
}

pub fn factorial(n: usize) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Natural log of `n!`, summed term by term.
pub fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

type Row = Arc<Vec<BigRational>>;

fn weight_cache() -> &'static Mutex<HashMap<(usize, usize), Row>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Row>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn compute_row(n_modes: usize, per_mode_cutoff: usize, max_k: usize) -> Vec<BigRational> {
    let inv_fact: Vec<BigRational> = (0..=per_mode_cutoff.min(max_k))
        .map(|r| BigRational::new(BigInt::one(), factorial(r)))
        .collect();
    let mut row = vec![BigRational::zero(); max_k + 1];
    row[0] = BigRational::one();
    for mode in 0..n_modes {
        // After `mode + 1` modes at most `(mode + 1)·d` photons are reachable.
        let reach = ((mode + 1) * per_mode_cutoff).min(max_k);
        let mut next = vec![BigRational::zero(); max_k + 1];
        for (t, slot) in next.iter_mut().enumerate().take(reach + 1) {
            let mut acc = BigRational::zero();
            for (r, w) in inv_fact.iter().enumerate().take(t.min(per_mode_cutoff) + 1) {
                let prev = &row[t - r];
                if !prev.is_zero() {
                    acc += prev * w;
                }
            }
            *slot = acc;
        }
        row = next;
    }
    row
}

/// Exact weights `{N brace k}_d` for `k = 0..=max_k`, memoized per `(N, d)`.
///
/// The cache is shared between threads behind a mutex; rows are extended
/// on demand when a larger `max_k` is requested.
pub fn restricted_weights(n_modes: usize, max_k: usize, per_mode_cutoff: usize) -> Result<Row> {
    check_domain(n_modes, per_mode_cutoff)?;
    let key = (n_modes, per_mode_cutoff);
    let support = n_modes * per_mode_cutoff;
    let needed = max_k.min(support);
    {
        let cache = weight_cache().lock().expect("weight cache poisoned");
        if let Some(row) = cache.get(&key) {
            if row.len() > needed {
                return Ok(pad_row(row, max_k));
            }
        }
    }
    let row = Arc::new(compute_row(n_modes, per_mode_cutoff, needed));
    weight_cache()
        .lock()
        .expect("weight cache poisoned")
        .entry(key)
        .and_modify(|cached| {
            if cached.len() < row.len() {
                *cached = Arc::clone(&row);
            }
        })
        .or_insert_with(|| Arc::clone(&row));
    Ok(pad_row(&row, max_k))
}

fn pad_row(row: &Row, max_k: usize) -> Row {
    if row.len() == max_k + 1 {
        return Arc::clone(row);
    }
    let mut out: Vec<BigRational> = row.iter().take(max_k + 1).cloned().collect();
    out.resize(max_k + 1, BigRational::zero());
    Arc::new(out)
}

/// `{N brace k}_d` as an exact rational; zero when `k > N·d`.
pub fn restricted_weight(
    n_modes: usize,
    total_photons: usize,
    per_mode_cutoff: usize,
) -> Result<RestrictedWeight> {
    let row = restricted_weights(n_modes, total_photons, per_mode_cutoff)?;
    Ok(RestrictedWeight {
        value: row[total_photons].clone(),
        n_modes,
        total_photons,
        per_mode_cutoff,
    })
}

/// `ln {N brace k}_d` for `k = 0..=max_k`, computed by the same recurrence
/// in the log domain. Unreachable entries are `-inf`.
pub fn restricted_weights_log(
    n_modes: usize,
    max_k: usize,
    per_mode_cutoff: usize,
) -> Result<Vec<f64>> {
    check_domain(n_modes, per_mode_cutoff)?;
    let needed = max_k.min(n_modes * per_mode_cutoff);
    let ln_inv_fact: Vec<f64> = (0..=per_mode_cutoff.min(needed))
        .map(|r| -ln_factorial(r))
        .collect();
    let mut row = vec![f64::NEG_INFINITY; needed + 1];
    row[0] = 0.0;
    let mut terms = Vec::with_capacity(per_mode_cutoff + 1);
    for mode in 0..n_modes {
        let reach = ((mode + 1) * per_mode_cutoff).min(needed);
        let mut next = vec![f64::NEG_INFINITY; needed + 1];
        for (t, slot) in next.iter_mut().enumerate().take(reach + 1) {
            terms.clear();
            terms.extend(
                ln_inv_fact
                    .iter()
                    .enumerate()
                    .take(t.min(per_mode_cutoff) + 1)
                    .map(|(r, lw)| row[t - r] + lw)
                    .filter(|v| v.is_finite()),
            );
            *slot = log_sum_exp(&terms);
        }
        row = next;
    }
    row.resize(max_k + 1, f64::NEG_INFINITY);
    Ok(row)
}

fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return f64::NEG_INFINITY;
    }
    max + terms.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Natural log of `{N brace k}_d`. Fails with [`Error::ZeroWeight`] when `k > N·d`.
pub fn restricted_weight_log(
    n_modes: usize,
    total_photons: usize,
    per_mode_cutoff: usize,
) -> Result<f64> {
    check_domain(n_modes, per_mode_cutoff)?;
    if total_photons > n_modes * per_mode_cutoff {
        return Err(Error::ZeroWeight {
            n_modes,
            total_photons,
            per_mode_cutoff,
        });
    }
    let row = restricted_weights_log(n_modes, total_photons, per_mode_cutoff)?;
    Ok(row[total_photons])
}

/// Iterator over all compositions of `k` into `N` parts bounded by `d`,
/// in descending lexicographic order.
#[derive(Debug, Clone)]
pub struct Compositions {
    per_mode_cutoff: usize,
    next: Option<Vec<usize>>,
}

impl Compositions {
    fn new(n_modes: usize, total: usize, per_mode_cutoff: usize) -> Self {
        let next = if total > n_modes * per_mode_cutoff {
            None
        } else {
            let mut parts = vec![0; n_modes];
            fill_greedy(&mut parts, total, per_mode_cutoff);
            Some(parts)
        };
        Compositions {
            per_mode_cutoff,
            next,
        }
    }

    fn advance(&self, parts: &[usize]) -> Option<Vec<usize>> {
        let n = parts.len();
        let d = self.per_mode_cutoff;
        let mut suffix = 0;
        for i in (0..n.saturating_sub(1)).rev() {
            suffix += parts[i + 1];
            if parts[i] > 0 && suffix < (n - i - 1) * d {
                let mut next = parts.to_vec();
                next[i] -= 1;
                fill_greedy(&mut next[i + 1..], suffix + 1, d);
                return Some(next);
            }
        }
        None
    }
}

fn fill_greedy(parts: &mut [usize], mut remaining: usize, cap: usize) {
    for p in parts.iter_mut() {
        *p = remaining.min(cap);
        remaining -= *p;
    }
    debug_assert_eq!(remaining, 0);
}

impl Iterator for Compositions {
    type Item = Composition;

    fn next(&mut self) -> Option<Composition> {
        let current = self.next.take()?;
        self.next = self.advance(&current);
        Some(Composition { parts: current })
    }
}

/// Every composition of `k` into `N` parts each at most `d`, exactly once.
pub fn enumerate_compositions(
    n_modes: usize,
    total_photons: usize,
    per_mode_cutoff: usize,
) -> Result<Compositions> {
    check_domain(n_modes, per_mode_cutoff)?;
    Ok(Compositions::new(n_modes, total_photons, per_mode_cutoff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use proptest::prelude::*;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    fn binomial(n: usize, k: usize) -> BigInt {
        factorial(n) / (factorial(k) * factorial(n - k))
    }

    fn brute_force(n: usize, k: usize, d: usize) -> BigRational {
        enumerate_compositions(n, k, d)
            .unwrap()
            .map(|c| c.inverse_factorial_product())
            .fold(BigRational::zero(), |a, b| a + b)
    }

    #[test]
    fn small_weight_examples() {
        assert_eq!(restricted_weight(5, 0, 3).unwrap().value, int(1));
        assert_eq!(restricted_weight(7, 3, 1).unwrap().value, int(35));
        assert_eq!(restricted_weight(2, 2, 2).unwrap().value, int(2));
        assert!(restricted_weight(2, 5, 2).unwrap().is_zero());
    }

    #[test]
    fn rejects_zero_modes_or_cutoff() {
        assert!(matches!(restricted_weight(0, 1, 1), Err(Error::Domain(_))));
        assert!(matches!(restricted_weight(1, 1, 0), Err(Error::Domain(_))));
        assert!(enumerate_compositions(0, 0, 1).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let parts: Vec<_> = enumerate_compositions(2, 2, 2)
            .unwrap()
            .map(|c| c.parts)
            .collect();
        assert_eq!(parts, vec![vec![2, 0], vec![1, 1], vec![0, 2]]);

        let parts: Vec<_> = enumerate_compositions(3, 0, 1)
            .unwrap()
            .map(|c| c.parts)
            .collect();
        assert_eq!(parts, vec![vec![0, 0, 0]]);

        assert_eq!(enumerate_compositions(2, 3, 1).unwrap().count(), 0);
    }

    #[test]
    fn enumeration_is_descending_and_unique() {
        let all: Vec<_> = enumerate_compositions(4, 6, 3)
            .unwrap()
            .map(|c| c.parts)
            .collect();
        for pair in all.windows(2) {
            assert!(pair[0] > pair[1]);
        }
        // Count via inclusion-exclusion on parts exceeding 3.
        let n = 4usize;
        let k = 6usize;
        let d = 3usize;
        let mut expected: i64 = 0;
        for j in 0..=n {
            if j * (d + 1) > k {
                break;
            }
            let m = k - j * (d + 1);
            let term = binomial(n, j) * binomial(m + n - 1, n - 1);
            let term: i64 = term.try_into().unwrap();
            expected += if j % 2 == 0 { term } else { -term };
        }
        assert_eq!(all.len() as i64, expected);
        assert!(all
            .iter()
            .all(|p| p.iter().sum::<usize>() == k && p.iter().all(|&r| r <= d)));
    }

    #[test]
    fn binomial_degeneration() {
        for n in 1..=20 {
            for k in 0..=n {
                let w = restricted_weight(n, k, 1).unwrap();
                assert_eq!(
                    w.value,
                    BigRational::from_integer(binomial(n, k)),
                    "N={n} k={k}"
                );
            }
        }
    }

    #[test]
    fn unrestricted_limit() {
        for n in 1..=8usize {
            for d in 1..=6usize {
                for k in 0..=d {
                    let expected = BigRational::new(BigInt::from(n).pow(k as u32), factorial(k));
                    assert_eq!(restricted_weight(n, k, d).unwrap().value, expected);
                }
            }
        }
    }

    #[test]
    fn oracle_equivalence_small_grid() {
        for n in 1..=5 {
            for d in 1..=4 {
                let row = restricted_weights(n, 12, d).unwrap();
                for k in 0..=12 {
                    assert_eq!(row[k], brute_force(n, k, d), "N={n} k={k} d={d}");
                }
            }
        }
    }

    #[test]
    fn denominator_divides_factorial_power() {
        for n in 1..=5 {
            for d in 1..=4 {
                let bound = factorial(d).pow(n as u32);
                for w in restricted_weights(n, n * d, d).unwrap().iter() {
                    assert!(bound.is_multiple_of(w.denom()));
                }
            }
        }
    }

    #[test]
    fn log_examples() {
        assert!((restricted_weight_log(7, 3, 1).unwrap() - 35f64.ln()).abs() < 1e-14);
        assert!((restricted_weight_log(1, 4, 5).unwrap() - (1.0f64 / 24.0).ln()).abs() < 1e-14);
        assert!((restricted_weight_log(2, 2, 2).unwrap() - 2f64.ln()).abs() < 1e-14);
        assert!(matches!(
            restricted_weight_log(2, 5, 2),
            Err(Error::ZeroWeight { .. })
        ));
    }

    #[test]
    fn log_path_matches_exact_path() {
        let mut worst: f64 = 0.0;
        for n in 1..=60usize {
            for d in 1..=(60 / n) {
                let exact = restricted_weights(n, n * d, d).unwrap();
                let logs = restricted_weights_log(n, n * d, d).unwrap();
                for (w, lw) in exact.iter().zip(&logs) {
                    // Compare in the log domain to stay in range for large values.
                    let ln_exact = ln_rational(w);
                    let rel = (lw - ln_exact).exp_m1().abs();
                    worst = worst.max(rel);
                }
            }
        }
        assert!(worst <= 1e-12, "worst relative error {worst:e}");
    }

    fn ln_rational(r: &BigRational) -> f64 {
        ln_bigint(r.numer()) - ln_bigint(r.denom())
    }

    fn ln_bigint(v: &BigInt) -> f64 {
        let bits = v.bits();
        if bits < 1000 {
            return v.to_f64().unwrap().ln();
        }
        let shift = bits - 900;
        (v >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }

    proptest! {
        #[test]
        fn monotone_in_cutoff(n in 1usize..6, k in 0usize..15, d in 1usize..5) {
            let lo = restricted_weight(n, k, d).unwrap().value;
            let hi = restricted_weight(n, k, d + 1).unwrap().value;
            prop_assert!(hi >= lo);
        }

        #[test]
        fn zero_iff_beyond_support(n in 1usize..6, k in 0usize..30, d in 1usize..5) {
            let w = restricted_weight(n, k, d).unwrap();
            prop_assert_eq!(w.is_zero(), k > n * d);
            prop_assert!(w.value >= BigRational::zero());
        }
    }
}
