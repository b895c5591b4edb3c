//! Two-region pair states from four-mode parametric down-conversion.
//!
//! Pairs are emitted into regions `A` and `B` with perfectly anticorrelated
//! internal states. Region `A` holds `n` up and `m` down particles while
//! `B` holds `m` up and `n` down, with amplitude
//!
//! ```text
//! C(n, m) = (-i tanh t)^(n+m) / cosh^2 t
//! ```
//!
//! The number of particles per region, `N = n + m`, fluctuates with
//! probability `p_N = (N+1) tanh^(2N) t / cosh^4 t`. The cross-region
//! correlator `|<J+_A^m J-_B^m>|^2` of the full state has a closed form, and
//! its Bell bound picks up the fluctuation factor
//! `f_mk = sum_N p_N (N!/(N-m)! N!/(N-k)!)^2`.
//!
//! Within a fixed-`N` sector the state is the uniform superposition
//! `sum_n |n, N-n>_A |N-n, n>_B / sqrt(N+1)`, where the Bell violation
//! actually lives.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::bell::{bound_single_log, bound_two_region_log, CorrelatorReport};
use crate::error::{Error, Result};
use crate::numerics::{log_factorial, log_falling_factorial, LogComplex, LogScalar};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Largest cutoff the truncated full-state evaluation may grow to.
pub const MAX_CUTOFF: usize = 4096;

/// Largest pair number the fluctuation series is extended to.
const MAX_SERIES_TERMS: usize = 5_000_000;

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("squeezing time {t}")))
    }
}

/// `ln p_N`; `-inf` where the probability vanishes.
pub fn log_pair_probability(t: f64, n_pairs: usize) -> f64 {
    if t == 0.0 {
        return if n_pairs == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    2.0 * n_pairs as f64 * t.tanh().ln() - 4.0 * t.cosh().ln() + ((n_pairs + 1) as f64).ln()
}

/// Probability of `N` particles in each region, `(N+1) tanh^(2N) t / cosh^4 t`.
pub fn pair_probability(t: f64, n_pairs: usize) -> f64 {
    log_pair_probability(t, n_pairs).exp()
}

/// Closed-form `sum_{N > max_n} p_N = x^(M+1) ((M+2) - (M+1) x)` with
/// `x = tanh^2 t`.
pub fn pair_tail(t: f64, max_n: usize) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let x = t.tanh().powi(2);
    let m = max_n as f64;
    let lead = (m + 1.0) * x.ln();
    (lead.exp() * ((m + 2.0) - (m + 1.0) * x)).max(0.0)
}

/// `p_0 ..= p_max_n` with the analytic bound on the discarded tail.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDistribution {
    pub t: f64,
    pub max_n: usize,
    pub probabilities: Vec<f64>,
    pub tail_bound: f64,
}

impl PairDistribution {
    pub fn total(&self) -> f64 {
        // Smallest terms first.
        self.probabilities.iter().rev().sum()
    }

    /// `sum_N N p_N` over the stored entries.
    pub fn mean_pairs(&self) -> f64 {
        self.probabilities
            .iter()
            .enumerate()
            .rev()
            .map(|(n, p)| n as f64 * p)
            .sum()
    }

    /// `ln p_N`, from the table when stored and from the closed form beyond.
    pub fn log_probability(&self, n_pairs: usize) -> f64 {
        match self.probabilities.get(n_pairs) {
            Some(&p) if p > 0.0 => p.ln(),
            _ => log_pair_probability(self.t, n_pairs),
        }
    }
}

/// Pair distribution truncated where the closed-form tail drops to `epsilon`.
pub fn build_distribution(t: f64, epsilon: f64) -> Result<PairDistribution> {
    check_time(t)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!("tail tolerance {epsilon}")));
    }
    let mut max_n = 0;
    while pair_tail(t, max_n) > epsilon {
        max_n += 1;
        if max_n > MAX_SERIES_TERMS {
            return Err(Error::NonConvergence {
                routine: "pair distribution",
                detail: format!("tail above {epsilon} at N = {max_n} for t = {t}"),
            });
        }
    }
    let probabilities = (0..=max_n).map(|n| pair_probability(t, n)).collect();
    Ok(PairDistribution {
        t,
        max_n,
        probabilities,
        tail_bound: pair_tail(t, max_n),
    })
}

/// Closed form `(sinh t cosh t)^(4m) (m!)^4` of `|<J+_A^m J-_B^m>|^2` on the
/// full state.
pub fn analytic_full_correlator(t: f64, m: usize) -> Result<LogScalar> {
    check_time(t)?;
    if m == 0 {
        return Ok(LogScalar::ONE);
    }
    if t == 0.0 {
        return Ok(LogScalar::ZERO);
    }
    let mf = m as f64;
    Ok(LogScalar::from_ln(
        4.0 * mf * (t.sinh().ln() + t.cosh().ln()) + 4.0 * log_factorial(m as u64),
    ))
}

/// The full pair state restricted to a finite grid of `(n, m)` occupations.
///
/// Index `(n, m)` stands for `|n, m>_A |m, n>_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedPairState {
    cutoff: usize,
    amplitudes: Vec<Complex64>,
}

impl TruncatedPairState {
    fn from_fn(cutoff: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let side = cutoff + 1;
        let mut amplitudes = vec![ZERO; side * side];
        for n in 0..side {
            for m in 0..side {
                amplitudes[n * side + m] = f(n, m);
            }
        }
        TruncatedPairState { cutoff, amplitudes }
    }

    /// Down-conversion amplitudes for `n, m <= cutoff`.
    pub fn spdc_square(t: f64, cutoff: usize) -> Self {
        let c = spdc_single_amplitudes(t, cutoff);
        Self::from_fn(cutoff, |n, m| c[n] * c[m])
    }

    /// Down-conversion amplitudes for `n + m <= max_pairs`, so that every
    /// fixed-`N` sector up to `max_pairs` is complete.
    pub fn spdc_total(t: f64, max_pairs: usize) -> Self {
        let c = spdc_single_amplitudes(t, max_pairs);
        Self::from_fn(max_pairs, |n, m| {
            if n + m <= max_pairs {
                c[n] * c[m]
            } else {
                ZERO
            }
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitude(&self, n: usize, m: usize) -> Complex64 {
        self.amplitudes[n * (self.cutoff + 1) + m]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// One application of `J+_A J-_B`: `(n, m) -> (n+1, m-1)` with weight
    /// `sqrt((n+1) m)` from each region. Components pushed past the cutoff
    /// are dropped; they have no overlap with the truncated state anyway.
    fn apply_paired_shift(&self) -> Self {
        let side = self.cutoff + 1;
        let mut out = vec![ZERO; side * side];
        for n in 0..self.cutoff {
            for m in 1..side {
                let a = self.amplitudes[n * side + m];
                if a != ZERO {
                    let w_a = (((n + 1) * m) as f64).sqrt();
                    let w_b = ((m * (n + 1)) as f64).sqrt();
                    out[(n + 1) * side + (m - 1)] = a * (w_a * w_b);
                }
            }
        }
        TruncatedPairState {
            cutoff: self.cutoff,
            amplitudes: out,
        }
    }

    /// `<psi| J+_A^m J-_B^m |psi>`.
    pub fn cross_expectation(&self, m: usize) -> Complex64 {
        let image = (0..m).fold(self.clone(), |v, _| v.apply_paired_shift());
        self.amplitudes
            .iter()
            .zip(&image.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// `C_n = (-i tanh t)^n / cosh t` for `n = 0..=cutoff`.
fn spdc_single_amplitudes(t: f64, cutoff: usize) -> Vec<Complex64> {
    let z = Complex64::new(0.0, -t.tanh());
    let mut c = Vec::with_capacity(cutoff + 1);
    let mut cur = Complex64::new(1.0 / t.cosh(), 0.0);
    for _ in 0..=cutoff {
        c.push(cur);
        cur *= z;
    }
    c
}

/// Result of the truncated full-state evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullStateExpectation {
    /// `<J+_A^m J-_B^m>` including all phases of the amplitudes.
    pub value: Complex64,
    /// Grid cutoff at which the value settled.
    pub cutoff: usize,
}

/// `<J+_A^m J-_B^m>` on the truncated full state, doubling the cutoff until
/// the relative change drops below `tol / 10`.
pub fn numeric_full_expectation(t: f64, m: usize, tol: f64) -> Result<FullStateExpectation> {
    check_time(t)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol}")));
    }
    if t == 0.0 {
        let value = if m == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        };
        return Ok(FullStateExpectation { value, cutoff: 0 });
    }
    let mut cutoff = (2 * m).max(16);
    let mut previous = TruncatedPairState::spdc_square(t, cutoff).cross_expectation(m);
    loop {
        let next_cutoff = 2 * cutoff;
        if next_cutoff > MAX_CUTOFF {
            return Err(Error::NonConvergence {
                routine: "truncated full-state correlator",
                detail: format!("cutoff {cutoff} reached for t = {t}, m = {m}"),
            });
        }
        let value = TruncatedPairState::spdc_square(t, next_cutoff).cross_expectation(m);
        let change = (value - previous).norm();
        if change <= 0.1 * tol * value.norm() {
            return Ok(FullStateExpectation {
                value,
                cutoff: next_cutoff,
            });
        }
        previous = value;
        cutoff = next_cutoff;
    }
}

/// `|<J+_A^m J-_B^m>|^2` from the truncated full state.
pub fn numeric_full_correlator(t: f64, m: usize, tol: f64) -> Result<LogScalar> {
    let e = numeric_full_expectation(t, m, tol)?;
    Ok(LogComplex::from_complex(e.value).modulus_squared())
}

/// `ln f_mk`, `f_mk = sum_{N >= max(m,k)} p_N (N!/(N-m)! N!/(N-k)!)^2`.
///
/// The series is extended past the stored distribution until the terms are
/// decreasing and the geometric bound on the remainder (valid because the
/// term ratio itself decreases) falls below `tol / 10` of the partial sum.
pub fn f_factor_log(distribution: &PairDistribution, m: usize, k: usize, tol: f64) -> f64 {
    let t = distribution.t;
    let start = m.max(k);
    if t == 0.0 {
        return if start == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    let term = |n: usize| {
        distribution.log_probability(n)
            + 2.0 * log_falling_factorial(n as u64, m as u64).expect("n >= m")
            + 2.0 * log_falling_factorial(n as u64, k as u64).expect("n >= k")
    };

    // Streaming log-sum-exp over positive terms.
    let mut max = f64::NEG_INFINITY;
    let mut scaled = 0.0;
    let mut previous = f64::NEG_INFINITY;
    for n in start..start + MAX_SERIES_TERMS {
        let cur = term(n);
        if cur > max {
            scaled = scaled * (max - cur).exp() + 1.0;
            max = cur;
        } else {
            scaled += (cur - max).exp();
        }
        let log_partial = max + scaled.ln();
        let log_ratio = cur - previous;
        previous = cur;
        if n > start && log_ratio < 0.0 {
            let r = log_ratio.exp();
            let log_remainder = cur + (r / (1.0 - r)).ln();
            if log_remainder - log_partial < (0.1 * tol).ln() {
                return log_partial;
            }
        }
    }
    max + scaled.ln()
}

/// Full-state correlator against the fluctuation-averaged bound
/// `2^(-2m) f_mm`.
pub fn full_state_report(t: f64, m: usize, tol: f64) -> Result<CorrelatorReport> {
    check_time(t)?;
    if t == 0.0 {
        return Err(Error::InvalidArgument(
            "the full-state bound needs t > 0".into(),
        ));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol}")));
    }
    let distribution = build_distribution(t, tol)?;
    let log_f = f_factor_log(&distribution, m, m, tol);
    let log_bound = log_f - 2.0 * m as f64 * LN_2;
    let value = analytic_full_correlator(t, m)?;
    Ok(CorrelatorReport::new(m, value, log_bound, 2 * m))
}

/// A fixed-`N` two-region state `sum_n a_n |n, N-n>_A |N-n, n>_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedNTwoRegionState {
    n_per_region: usize,
    amplitudes: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    A,
    B,
}

impl FixedNTwoRegionState {
    /// Normalizes the given `N + 1` amplitudes.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument("no amplitudes".into()));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument(format!("state norm {norm}")));
        }
        Ok(FixedNTwoRegionState {
            n_per_region: amplitudes.len() - 1,
            amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
        })
    }

    pub fn n_per_region(&self) -> usize {
        self.n_per_region
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<psi| J+_A^m J-_B^m |psi>`.
    ///
    /// Each paired step maps `n -> n+1` with `sqrt((n+1)(N-n))` from `A` and
    /// the same factor from `B`, so weight `(n+1)(N-n)`; the amplitudes are renormalized after every
    /// step and the norm tracked in the log domain.
    pub fn cross_expectation(&self, m: usize) -> LogComplex {
        let big_n = self.n_per_region;
        if m > big_n {
            return LogComplex::ZERO;
        }
        let mut image = self.amplitudes.clone();
        let mut log_scale = 0.0;
        for _ in 0..m {
            let mut next = vec![ZERO; big_n + 1];
            for n in 0..big_n {
                next[n + 1] = image[n] * ((n + 1) * (big_n - n)) as f64;
            }
            let norm: f64 = next.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            if norm == 0.0 {
                return LogComplex::ZERO;
            }
            next.iter_mut().for_each(|a| *a /= norm);
            log_scale += norm.ln();
            image = next;
        }
        let dot: Complex64 = self
            .amplitudes
            .iter()
            .zip(&image)
            .map(|(a, b)| a.conj() * b)
            .sum();
        LogComplex::from_scaled(dot, log_scale)
    }

    /// Reduced density matrix of one region, obtained by tracing out the
    /// other. Row/column `j` is the basis state with `j` particles up.
    pub fn reduced_density(&self, region: Region) -> Vec<Vec<Complex64>> {
        let big_n = self.n_per_region;
        // (up count in A, up count in B, amplitude)
        let entries: Vec<(usize, usize, Complex64)> = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, &a)| (n, big_n - n, a))
            .collect();
        let mut rho = vec![vec![ZERO; big_n + 1]; big_n + 1];
        for &(ka, kb, x) in &entries {
            for &(la, lb, y) in &entries {
                let (kept_row, kept_col, traced_equal) = match region {
                    Region::A => (ka, la, kb == lb),
                    Region::B => (kb, lb, ka == la),
                };
                if traced_equal {
                    rho[kept_row][kept_col] += x * y.conj();
                }
            }
        }
        rho
    }

    /// `Tr[J+^m rho]` for the reduced state of one region.
    pub fn reduced_moment(&self, region: Region, m: usize) -> LogScalar {
        let big_n = self.n_per_region;
        if m > big_n {
            return LogScalar::ZERO;
        }
        let rho = self.reduced_density(region);
        // (J+^m)[j+m][j] = sqrt(prod_{l<m} (j+l+1)(N-j-l)) = sqrt(((j+m)!/j!) ((N-j)!/(N-j-m)!)).
        let mut trace = ZERO;
        for j in 0..=big_n - m {
            let log_elem = 0.5
                * (log_falling_factorial((j + m) as u64, m as u64).expect("m <= j+m")
                    + log_falling_factorial((big_n - j) as u64, m as u64).expect("m <= N-j"));
            let rho_entry = rho[j][j + m];
            if rho_entry != ZERO {
                trace += rho_entry * log_elem.exp();
            }
        }
        LogScalar::from_real(trace.re)
    }
}

/// Uniform fixed-`N` sector of the down-conversion state.
pub fn fixed_n_state(n_per_region: usize) -> Result<FixedNTwoRegionState> {
    if n_per_region == 0 {
        return Err(Error::NoParticles);
    }
    let a = Complex64::new(1.0 / ((n_per_region + 1) as f64).sqrt(), 0.0);
    FixedNTwoRegionState::from_amplitudes(vec![a; n_per_region + 1])
}

/// `|<J+_A^m J-_B^m>|^2` in a fixed-`N` sector, against
/// `(N!/(N-m)!)^4 2^(-2m)`.
pub fn fixed_n_correlator(state: &FixedNTwoRegionState, m: usize) -> Result<CorrelatorReport> {
    let n = state.n_per_region();
    let log_bound = bound_two_region_log(n, n, m, m)?;
    let value = state.cross_expectation(m).modulus_squared();
    Ok(CorrelatorReport::new(m, value, log_bound, 2 * m))
}

/// Single-region correlator `|Tr[J+^m rho]|^2` of a fixed-`N` state.
pub fn fixed_n_region_correlator(
    state: &FixedNTwoRegionState,
    region: Region,
    m: usize,
) -> Result<CorrelatorReport> {
    let log_bound = bound_single_log(state.n_per_region(), m)?;
    let moment = state.reduced_moment(region, m);
    Ok(CorrelatorReport::new(m, moment.powi(2), log_bound, m))
}

/// `Tr[J+^m rho_A]` for the uniform fixed-`N` state, with `rho_A` obtained
/// by tracing out region `B`.
pub fn reduced_region_moment(n_per_region: usize, m: usize) -> Result<LogScalar> {
    Ok(fixed_n_state(n_per_region)?.reduced_moment(Region::A, m))
}

/// The two sides of the pure-state versus number-mixture comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureCheck {
    /// `|<J+_A^m J-_B^m>|^2` on the coherent truncated pure state.
    pub pure_correlator: f64,
    /// `|sum_N p_N <psi_N| J+_A^m J-_B^m |psi_N>|^2`.
    pub mixture_correlator: f64,
}

impl MixtureCheck {
    pub fn absolute(&self) -> f64 {
        (self.pure_correlator - self.mixture_correlator).abs()
    }

    /// Discrepancy relative to the larger side; zero when both vanish.
    pub fn relative(&self) -> f64 {
        let scale = self
            .pure_correlator
            .abs()
            .max(self.mixture_correlator.abs());
        if scale == 0.0 {
            0.0
        } else {
            self.absolute() / scale
        }
    }
}

/// Evaluates the cross-region correlator on the pure state truncated to
/// `N <= max_pairs` (with all coherences between sectors) and on the
/// incoherent mixture of its fixed-`N` sectors.
pub fn mixture_equivalence_check(t: f64, m: usize, max_pairs: usize) -> Result<MixtureCheck> {
    check_time(t)?;
    let pure = TruncatedPairState::spdc_total(t, max_pairs).cross_expectation(m);

    let mut mixture = ZERO;
    for n in 0..=max_pairs {
        let p = pair_probability(t, n);
        if p == 0.0 {
            continue;
        }
        let c = if n == 0 {
            if m == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                ZERO
            }
        } else {
            fixed_n_state(n)?.cross_expectation(m).to_complex()
        };
        mixture += c * p;
    }
    Ok(MixtureCheck {
        pure_correlator: pure.norm_sqr(),
        mixture_correlator: mixture.norm_sqr(),
    })
}
