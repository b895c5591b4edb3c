//! Local-hidden-variable side of the many-body Bell inequality.
//!
//! Each of `m` parties holds predetermined outcomes `sigma1, sigma2 = ±1`
//! and a sign `s = ±1`, and contributes the factor
//! `(sigma1 + i s sigma2) / 2`, whose modulus squared is exactly `1/2`.
//! A deterministic strategy therefore reaches `|<Sigma_m>|^2 = 2^-m`, and by
//! convexity no mixture can exceed it.
//!
//! Values are kept as Gaussian integers over `2^m` so the enumeration can
//! assert exact equalities.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Largest party count accepted by the exhaustive search (`8^m` vertices).
pub const MAX_BRUTE_FORCE_PARTIES: usize = 16;

/// Predetermined outcomes of one party.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartySetting {
    sigma1: i8,
    sigma2: i8,
    s: i8,
}

impl PartySetting {
    pub fn new(sigma1: i8, sigma2: i8, s: i8) -> Result<Self> {
        if [sigma1, sigma2, s].iter().all(|v| *v == 1 || *v == -1) {
            Ok(PartySetting { sigma1, sigma2, s })
        } else {
            Err(Error::InvalidArgument(format!(
                "party setting ({sigma1}, {sigma2}, {s}) is not all ±1"
            )))
        }
    }

    /// The eight settings, indexed by the bits of `0..8`.
    pub fn all() -> [PartySetting; 8] {
        std::array::from_fn(|i| {
            let bit = |b: usize| if i >> b & 1 == 0 { 1 } else { -1 };
            PartySetting {
                sigma1: bit(2),
                sigma2: bit(1),
                s: bit(0),
            }
        })
    }

    pub fn sigma1(self) -> i8 {
        self.sigma1
    }

    pub fn sigma2(self) -> i8 {
        self.sigma2
    }

    pub fn s(self) -> i8 {
        self.s
    }

    /// `sigma1 + i s sigma2`, i.e. twice the party's factor.
    fn doubled_factor(self) -> Gaussian {
        Gaussian {
            re: i64::from(self.sigma1),
            im: i64::from(self.s * self.sigma2),
        }
    }

    fn with_flipped_sign(self) -> Self {
        PartySetting { s: -self.s, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Gaussian {
    re: i64,
    im: i64,
}

impl Gaussian {
    const ONE: Gaussian = Gaussian { re: 1, im: 0 };

    // Components stay below 2^(m/2) in magnitude, far from overflow, so the
    // hot loop skips overflow checks.
    #[inline(always)]
    fn mul(self, o: Gaussian) -> Gaussian {
        Gaussian {
            re: (self.re.wrapping_mul(o.re)).wrapping_sub(self.im.wrapping_mul(o.im)),
            im: (self.re.wrapping_mul(o.im)).wrapping_add(self.im.wrapping_mul(o.re)),
        }
    }

    #[inline(always)]
    fn norm_sqr(self) -> i64 {
        self.re
            .wrapping_mul(self.re)
            .wrapping_add(self.im.wrapping_mul(self.im))
    }
}

/// `(re + i im) / 2^exponent` with integer parts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicComplex {
    pub re: i64,
    pub im: i64,
    pub exponent: u32,
}

impl DyadicComplex {
    /// Numerator of `|z|^2 = norm_numerator / 4^exponent`.
    pub fn norm_numerator(&self) -> i64 {
        self.re * self.re + self.im * self.im
    }

    pub fn to_complex(&self) -> Complex64 {
        let scale = 0.5f64.powi(self.exponent as i32);
        Complex64::new(self.re as f64 * scale, self.im as f64 * scale)
    }

    pub fn conj(&self) -> Self {
        DyadicComplex {
            im: -self.im,
            ..*self
        }
    }
}

/// One deterministic assignment of settings to `m` parties.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LhvStrategy {
    parties: Vec<PartySetting>,
}

impl LhvStrategy {
    pub fn new(parties: Vec<PartySetting>) -> Result<Self> {
        if parties.is_empty() {
            return Err(Error::InvalidArgument(
                "a strategy needs at least one party".into(),
            ));
        }
        Ok(LhvStrategy { parties })
    }

    /// Strategy number `index` in `0..8^m`, one base-8 digit per party.
    pub fn from_index(m: usize, index: u64) -> Result<Self> {
        if m == 0 || m > 21 || index >> (3 * m) != 0 {
            return Err(Error::InvalidArgument(format!(
                "strategy index {index} for {m} parties"
            )));
        }
        let all = PartySetting::all();
        Self::new(
            (0..m)
                .map(|k| all[(index >> (3 * k) & 7) as usize])
                .collect(),
        )
    }

    pub fn parties(&self) -> &[PartySetting] {
        &self.parties
    }

    pub fn len(&self) -> usize {
        self.parties.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parties.is_empty()
    }

    /// The same outcomes with every sign choice reversed.
    pub fn with_flipped_signs(&self) -> Self {
        LhvStrategy {
            parties: self.parties.iter().map(|p| p.with_flipped_sign()).collect(),
        }
    }

    /// `prod_k (sigma1 + i s sigma2) / 2`, exactly.
    pub fn exact_correlator(&self) -> DyadicComplex {
        let z = self
            .parties
            .iter()
            .fold(Gaussian::ONE, |acc, p| acc.mul(p.doubled_factor()));
        DyadicComplex {
            re: z.re,
            im: z.im,
            exponent: self.parties.len() as u32,
        }
    }
}

pub fn strategy_correlator(strategy: &LhvStrategy) -> Complex64 {
    strategy.exact_correlator().to_complex()
}

/// A probability distribution over deterministic strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct LhvMixture {
    strategies: Vec<LhvStrategy>,
    weights: Vec<f64>,
}

impl LhvMixture {
    pub fn new(strategies: Vec<LhvStrategy>, weights: Vec<f64>) -> Result<Self> {
        if strategies.is_empty() || strategies.len() != weights.len() {
            return Err(Error::InvalidArgument(format!(
                "{} strategies with {} weights",
                strategies.len(),
                weights.len()
            )));
        }
        let m = strategies[0].len();
        if strategies.iter().any(|s| s.len() != m) {
            return Err(Error::InvalidArgument(
                "strategies differ in party count".into(),
            ));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidArgument(
                "negative or non-finite weight".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        Ok(LhvMixture {
            strategies,
            weights,
        })
    }

    pub fn single(strategy: LhvStrategy) -> Self {
        LhvMixture {
            strategies: vec![strategy],
            weights: vec![1.0],
        }
    }

    pub fn parties(&self) -> usize {
        self.strategies[0].len()
    }
}

/// `|sum_j w_j <Sigma_m>_j|^2`.
pub fn mixture_correlator_sq(mixture: &LhvMixture) -> f64 {
    mixture
        .strategies
        .iter()
        .zip(&mixture.weights)
        .map(|(s, w)| strategy_correlator(s) * *w)
        .sum::<Complex64>()
        .norm_sqr()
}

/// Outcome of the exhaustive search over deterministic strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LhvSearch {
    pub parties: usize,
    /// Largest `|2^m <Sigma_m>|^2` found; the bound is attained when this
    /// equals `2^m`.
    pub max_norm_numerator: i64,
    pub vertices: u64,
    pub vertices_at_max: u64,
}

impl LhvSearch {
    /// `max |<Sigma_m>|^2`, exact in `f64` since it is dyadic.
    pub fn max_value(&self) -> f64 {
        self.max_norm_numerator as f64 * 0.25f64.powi(self.parties as i32)
    }

    /// True when the maximum is exactly `2^-m`.
    pub fn bound_attained(&self) -> bool {
        self.max_norm_numerator == 1i64 << self.parties
    }
}

// Odometer walk over the remaining parties below a fixed prefix, keeping the
// running products so each strategy costs one Gaussian multiplication.
fn search_below(prefix: Gaussian, remaining: usize) -> (i64, u64) {
    let factors = PartySetting::all().map(PartySetting::doubled_factor);
    match remaining {
        0 => (prefix.norm_sqr(), 1),
        _ => odometer(prefix, remaining - 1, &factors),
    }
}

fn odometer(prefix: Gaussian, inner: usize, factors: &[Gaussian; 8]) -> (i64, u64) {
    let mut digits = vec![0usize; inner];
    let mut partial = vec![prefix; inner + 1];
    for k in 0..inner {
        partial[k + 1] = partial[k].mul(factors[0]);
    }
    let (mut best, mut ties) = (i64::MIN, 0u64);
    loop {
        let base = partial[inner];
        let (mut top, mut count) = (i64::MIN, 0u64);
        for f in factors {
            let v = base.mul(*f).norm_sqr();
            if v > top {
                (top, count) = (v, 1);
            } else if v == top {
                count = count.wrapping_add(1);
            }
        }
        match top.cmp(&best) {
            std::cmp::Ordering::Greater => (best, ties) = (top, count),
            std::cmp::Ordering::Equal => ties += count,
            std::cmp::Ordering::Less => {}
        }
        // Advance the odometer; the last digit moves fastest.
        let mut pos = inner;
        loop {
            if pos == 0 {
                return (best, ties);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < 8 {
                break;
            }
            digits[pos] = 0;
        }
        for k in pos..inner {
            partial[k + 1] = partial[k].mul(factors[digits[k]]);
        }
    }
}

/// Visits all `8^m` deterministic strategies and records the largest
/// squared correlator. Mixtures need not be visited: the squared modulus of
/// a convex combination never exceeds the largest vertex value.
pub fn brute_force_search(m: usize) -> Result<LhvSearch> {
    if m == 0 || m > MAX_BRUTE_FORCE_PARTIES {
        return Err(Error::InvalidArgument(format!(
            "party count {m} outside 1..={MAX_BRUTE_FORCE_PARTIES}"
        )));
    }
    let factors = PartySetting::all().map(PartySetting::doubled_factor);
    // Split over the first party (and the second when available) for the
    // worker pool; partial results are merged by max-reduction.
    let heads: Vec<(Gaussian, usize)> = if m >= 2 {
        factors
            .iter()
            .flat_map(|a| factors.iter().map(move |b| (a.mul(*b), m - 2)))
            .collect()
    } else {
        factors.iter().map(|a| (*a, 0)).collect()
    };
    let (best, ties) = heads
        .par_iter()
        .map(|(prefix, remaining)| search_below(*prefix, *remaining))
        .reduce(
            || (i64::MIN, 0),
            |(a, na), (b, nb)| match a.cmp(&b) {
                std::cmp::Ordering::Greater => (a, na),
                std::cmp::Ordering::Less => (b, nb),
                std::cmp::Ordering::Equal => (a, na + nb),
            },
        );
    Ok(LhvSearch {
        parties: m,
        max_norm_numerator: best,
        vertices: 8u64.pow(m as u32),
        vertices_at_max: ties,
    })
}

/// `max |<Sigma_m>|^2` over all local deterministic strategies.
pub fn brute_force_max(m: usize) -> Result<f64> {
    Ok(brute_force_search(m)?.max_value())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setting(a: i8, b: i8, s: i8) -> PartySetting {
        PartySetting::new(a, b, s).unwrap()
    }

    #[test]
    fn single_party_value() {
        let s = LhvStrategy::new(vec![setting(1, 1, 1)]).unwrap();
        assert_eq!(strategy_correlator(&s), Complex64::new(0.5, 0.5));
    }

    #[test]
    fn two_party_value() {
        let s = LhvStrategy::new(vec![setting(1, 1, 1), setting(1, 1, 1)]).unwrap();
        assert_eq!(strategy_correlator(&s), Complex64::new(0.0, 0.5));
    }

    #[test]
    fn settings_are_distinct_and_valid() {
        let all = PartySetting::all();
        for (i, a) in all.iter().enumerate() {
            for b in &all[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert!(PartySetting::new(0, 1, 1).is_err());
        assert!(PartySetting::new(1, 2, 1).is_err());
        assert!(LhvStrategy::new(vec![]).is_err());
    }

    #[test]
    fn every_strategy_saturates_exactly() {
        for m in 1..=4usize {
            for idx in 0..8u64.pow(m as u32) {
                let s = LhvStrategy::from_index(m, idx).unwrap();
                let z = s.exact_correlator();
                assert_eq!(z.norm_numerator(), 1 << m);
                assert_eq!(
                    mixture_correlator_sq(&LhvMixture::single(s)),
                    0.5f64.powi(m as i32)
                );
            }
        }
    }

    #[test]
    fn opposite_outcomes_interfere() {
        let a = LhvStrategy::new(vec![setting(1, 1, 1), setting(1, -1, 1)]).unwrap();
        let b = LhvStrategy::new(vec![setting(-1, 1, 1), setting(1, -1, 1)]).unwrap();
        let mix = LhvMixture::new(vec![a, b], vec![0.5, 0.5]).unwrap();
        assert!(mixture_correlator_sq(&mix) < 0.25);
    }

    #[test]
    fn mixture_validation() {
        let a = LhvStrategy::from_index(2, 3).unwrap();
        let b = LhvStrategy::from_index(3, 3).unwrap();
        assert!(LhvMixture::new(vec![a.clone(), b], vec![0.5, 0.5]).is_err());
        assert!(LhvMixture::new(vec![a.clone()], vec![0.9]).is_err());
        assert!(LhvMixture::new(vec![a.clone()], vec![]).is_err());
        assert!(LhvMixture::new(vec![a.clone(), a], vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn small_searches() {
        assert_eq!(brute_force_max(1).unwrap(), 0.5);
        let s = brute_force_search(3).unwrap();
        assert_eq!(s.max_value(), 0.125);
        assert!(s.bound_attained());
        assert_eq!(s.vertices, 512);
        assert_eq!(s.vertices_at_max, 512);
        assert!(brute_force_max(0).is_err());
        assert!(brute_force_max(17).is_err());
    }

    #[test]
    fn index_round_trip() {
        assert!(LhvStrategy::from_index(2, 64).is_err());
        let s = LhvStrategy::from_index(3, 0o521).unwrap();
        assert_eq!(s.parties()[0], PartySetting::all()[1]);
        assert_eq!(s.parties()[1], PartySetting::all()[2]);
        assert_eq!(s.parties()[2], PartySetting::all()[5]);
    }
}
