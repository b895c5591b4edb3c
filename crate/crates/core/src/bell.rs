//! Bell correlators for bosonic qubits and their local-realistic bounds.
//!
//! For `N` indistinguishable qubits the collective correlator of order `m`
//! is `E_m = |<J+^m>|^2`. Any local-hidden-variable model obeys
//!
//! ```text
//! E_m <= (N! / (N-m)!)^2 * 2^(-m)
//! ```
//!
//! and violating this bound certifies many-body Bell correlations. With two
//! regions `A` and `B` the correlator `|<J+_A^m J+_B^k>|^2` is bounded by the
//! product of the two single-region factors times `2^-(m+k)`.
//!
//! All magnitudes live in the log domain (see [`crate::numerics`]).

use std::f64::consts::LN_2;
use std::fmt;

use num_complex::Complex64;

use crate::dicke::DickeVector;
use crate::error::{Error, Result};
use crate::numerics::{log_factorial, log_falling_factorial, LogScalar};

/// A correlator together with its Bell bound and classification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorReport {
    pub order_m: usize,
    /// The correlator value (a squared modulus, so never negative).
    pub log_correlator: LogScalar,
    /// Natural log of the local-realistic bound.
    pub log_bound: f64,
    /// `ln(correlator) - log_bound`; `-inf` for a vanishing correlator.
    pub log_ratio: f64,
    pub violates_bell: bool,
    /// Natural log of the entanglement threshold: the Bell bound with every
    /// `2^-1` per measured qubit replaced by `4^-1`.
    pub log_entanglement_threshold: f64,
    pub violates_entanglement_threshold: bool,
}

/// Log-ratio a correlator must exceed to count as a violation. Absorbs
/// rounding in cases where value and bound agree analytically.
pub const VIOLATION_LOG_MARGIN: f64 = 1e-12;

impl CorrelatorReport {
    /// Builds a report; `qubits_measured` is the total order (`m`, or `m+k`
    /// for two regions) used to derive the entanglement threshold.
    pub fn new(
        order_m: usize,
        log_correlator: LogScalar,
        log_bound: f64,
        qubits_measured: usize,
    ) -> Self {
        let log_entanglement_threshold = log_bound - qubits_measured as f64 * LN_2;
        let (log_ratio, positive) = if log_correlator.sign() > 0 {
            (log_correlator.log_magnitude() - log_bound, true)
        } else {
            (f64::NEG_INFINITY, false)
        };
        CorrelatorReport {
            order_m,
            log_correlator,
            log_bound,
            log_ratio,
            violates_bell: positive && log_ratio > VIOLATION_LOG_MARGIN,
            log_entanglement_threshold,
            violates_entanglement_threshold: positive
                && log_correlator.log_magnitude() - log_entanglement_threshold
                    > VIOLATION_LOG_MARGIN,
        }
    }

    /// Correlator divided by the bound, on a linear scale.
    pub fn ratio(&self) -> f64 {
        self.log_ratio.exp()
    }
}

/// `ln[(N!/(N-m)!)^2 2^-m]`.
pub fn bound_single_log(n_particles: usize, m: usize) -> Result<f64> {
    let falling = log_falling_factorial(n_particles as u64, m as u64)?;
    Ok(2.0 * falling - m as f64 * LN_2)
}

/// `ln[(N_A!/(N_A-m)!)^2 (N_B!/(N_B-k)!)^2 2^-(m+k)]`.
pub fn bound_two_region_log(n_a: usize, n_b: usize, m: usize, k: usize) -> Result<f64> {
    let fa = log_falling_factorial(n_a as u64, m as u64)?;
    let fb = log_falling_factorial(n_b as u64, k as u64)?;
    Ok(2.0 * fa + 2.0 * fb - (m + k) as f64 * LN_2)
}

/// `|<J+^m>|^2` on a normalized state, with bound and flags.
pub fn correlator_single(state: &DickeVector, m: usize) -> Result<CorrelatorReport> {
    let n = state.n_particles();
    let log_bound = bound_single_log(n, m)?;
    let value = state.expectation_j_plus_power(m).modulus_squared();
    Ok(CorrelatorReport::new(m, value, log_bound, m))
}

/// `|<J+_A^m J+_B^k>|^2` for a product state `|a> (x) |b>`.
pub fn correlator_two_region_product(
    a: &DickeVector,
    m: usize,
    b: &DickeVector,
    k: usize,
) -> Result<CorrelatorReport> {
    let log_bound = bound_two_region_log(a.n_particles(), b.n_particles(), m, k)?;
    let value = (a.expectation_j_plus_power(m) * b.expectation_j_plus_power(k)).modulus_squared();
    Ok(CorrelatorReport::new(m, value, log_bound, m + k))
}

/// Correlator of individually addressable qubits,
/// `|<sigma+^(1) ... sigma+^(m)>|^2`, on the `N`-qubit GHZ state
/// `(|up...up> + |down...down>) / sqrt(2)`.
///
/// The GHZ state is held as its two computational basis strings; the
/// raising operators act on the first `m` qubits.
pub fn ghz_addressable_correlator(n_qubits: usize, m: usize) -> Result<f64> {
    if n_qubits == 0 || n_qubits > 128 {
        return Err(Error::InvalidArgument(format!(
            "GHZ size {n_qubits} outside 1..=128"
        )));
    }
    if m > n_qubits {
        return Err(Error::OrderExceedsParticles {
            order: m,
            particles: n_qubits,
        });
    }
    let all_up: u128 = if n_qubits == 128 {
        u128::MAX
    } else {
        (1u128 << n_qubits) - 1
    };
    // Unit weights; the 1/2 from normalization is applied at the end.
    let ghz = [(0u128, 1.0f64), (all_up, 1.0f64)];
    let raise_mask: u128 = if m == 128 {
        u128::MAX
    } else {
        (1u128 << m) - 1
    };

    // sigma+ on each masked qubit: 0 -> 1, annihilates a qubit already at 1.
    let raised = ghz
        .iter()
        .filter(|(bits, _)| bits & raise_mask == 0)
        .map(|(bits, amp)| (bits | raise_mask, *amp));
    let expectation: f64 = raised
        .flat_map(|(bits, amp)| {
            ghz.iter()
                .filter(move |(b, _)| *b == bits)
                .map(move |(_, a)| a * amp)
        })
        .sum::<f64>()
        * 0.5;
    Ok(expectation * expectation)
}

/// GHZ state of `N` qubits in region `A` next to one qubit in `B` that is
/// in an equal superposition and uncorrelated with `A`. Order `N` in `A`,
/// order 1 in `B`.
///
/// The value is `(N!)^2 / 16`: `|<J+^N>_A| = N!/2` and `|<J+>_B| = 1/2`.
pub fn ghz_plus_single_correlator(n_qubits: usize) -> Result<CorrelatorReport> {
    if n_qubits == 0 {
        return Err(Error::NoParticles);
    }
    let log_bound = bound_two_region_log(n_qubits, 1, n_qubits, 1)?;
    // Written with the same falling-factorial terms as the bound so the
    // ratio at N = 3 is exactly zero.
    let fa = log_falling_factorial(n_qubits as u64, n_qubits as u64)?;
    let fb = log_falling_factorial(1, 1)?;
    let value = LogScalar::from_ln(2.0 * fa + 2.0 * fb - 4.0 * LN_2);
    Ok(CorrelatorReport::new(
        n_qubits,
        value,
        log_bound,
        n_qubits + 1,
    ))
}

/// Where a two-region violation comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossRegionVerdict {
    /// The joint correlator violates its bound while both single-region
    /// correlators respect theirs.
    GenuineCrossRegion,
    /// The joint correlator violates, but so does at least one region alone.
    LocalOrigin,
    NoViolation,
}

impl fmt::Display for CrossRegionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CrossRegionVerdict::GenuineCrossRegion => "genuine cross-region",
            CrossRegionVerdict::LocalOrigin => "local-origin",
            CrossRegionVerdict::NoViolation => "no violation",
        })
    }
}

pub fn cross_region_guard(
    report_a: &CorrelatorReport,
    report_b: &CorrelatorReport,
    report_ab: &CorrelatorReport,
) -> CrossRegionVerdict {
    match (
        report_ab.violates_bell,
        report_a.violates_bell || report_b.violates_bell,
    ) {
        (false, _) => CrossRegionVerdict::NoViolation,
        (true, false) => CrossRegionVerdict::GenuineCrossRegion,
        (true, true) => CrossRegionVerdict::LocalOrigin,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    X,
    Y,
}

/// One ordered product of `J_x` / `J_y` factors in the expansion of
/// `J+^m = (J_x + i J_y)^m`, with coefficient `i^(number of Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliWord {
    pub letters: Vec<PauliLetter>,
    pub coefficient: Complex64,
}

impl PauliWord {
    pub fn y_count(&self) -> usize {
        self.letters
            .iter()
            .filter(|l| **l == PauliLetter::Y)
            .count()
    }

    /// `<psi| W |psi>` for the operator product `W`, applied right to left.
    pub fn expectation(&self, state: &DickeVector) -> Complex64 {
        let image = self
            .letters
            .iter()
            .rev()
            .fold(state.clone(), |v, l| match l {
                PauliLetter::X => v.apply_jx(),
                PauliLetter::Y => v.apply_jy(),
            });
        state
            .overlap(&image)
            .expect("same particle number")
            .to_complex()
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.y_count() % 4 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        };
        let word: String = self
            .letters
            .iter()
            .map(|l| match l {
                PauliLetter::X => 'X',
                PauliLetter::Y => 'Y',
            })
            .collect();
        write!(f, "{c} {word}")
    }
}

/// All `2^m` ordered words of `(J_x + i J_y)^m`, in binary order with `X`
/// before `Y` and the leftmost letter most significant.
pub fn expand_plus_power(m: usize) -> Result<Vec<PauliWord>> {
    if m == 0 || m > 24 {
        return Err(Error::InvalidArgument(format!(
            "expansion order {m} outside 1..=24"
        )));
    }
    let i_powers = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, -1.0),
    ];
    Ok((0u32..1 << m)
        .map(|mask| {
            let letters: Vec<PauliLetter> = (0..m)
                .map(|pos| {
                    if mask >> (m - 1 - pos) & 1 == 1 {
                        PauliLetter::Y
                    } else {
                        PauliLetter::X
                    }
                })
                .collect();
            let ys = mask.count_ones() as usize;
            PauliWord {
                letters,
                coefficient: i_powers[ys % 4],
            }
        })
        .collect())
}

/// `<J+^m>` reassembled from the expectation values of its Pauli words.
pub fn expectation_from_words(state: &DickeVector, m: usize) -> Result<Complex64> {
    Ok(expand_plus_power(m)?
        .iter()
        .map(|w| w.coefficient * w.expectation(state))
        .sum())
}

/// `ln[(N!)^2 / 4]`, the maximal order-`N` correlator reached by the NOON state.
pub fn noon_log_correlator(n_particles: usize) -> f64 {
    2.0 * log_factorial(n_particles as u64) - 2.0 * LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_bounds() {
        assert!((bound_single_log(1, 1).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        assert!(bound_single_log(2, 2).unwrap().abs() < 1e-15);
        let b = bound_single_log(100, 100).unwrap();
        assert!((b - (2.0 * log_factorial(100) - 100.0 * LN_2)).abs() < 1e-10);
        assert!((b - 658.164).abs() < 0.001);
        assert_eq!(bound_single_log(3, 0).unwrap(), 0.0);
        assert!(bound_single_log(3, 4).is_err());
    }

    #[test]
    fn two_region_bounds() {
        assert!((bound_two_region_log(1, 1, 1, 1).unwrap() + 2.0 * LN_2).abs() < 1e-15);
        assert!(bound_two_region_log(2, 2, 2, 2).unwrap().abs() < 1e-15);
        for n in 1..20 {
            let b = bound_two_region_log(n, 1, n, 1).unwrap();
            let expected = 2.0 * log_factorial(n as u64) - (n + 1) as f64 * LN_2;
            assert!((b - expected).abs() < 1e-12);
        }
        assert!(bound_two_region_log(2, 1, 2, 2).is_err());
        assert!(bound_two_region_log(1, 2, 2, 1).is_err());
    }

    #[test]
    fn zero_order_is_trivial() {
        let r = correlator_single(&DickeVector::css_x(4), 0).unwrap();
        assert!(r.log_correlator.log_magnitude().abs() < 1e-14);
        assert_eq!(r.log_bound, 0.0);
        assert!(!r.violates_bell);
    }

    #[test]
    fn noon_report() {
        for n in 1..=40usize {
            let r = correlator_single(&DickeVector::noon_state(n).unwrap(), n).unwrap();
            assert!((r.log_correlator.log_magnitude() - noon_log_correlator(n)).abs() < 1e-10);
            assert!((r.log_ratio - (n as f64 - 2.0) * LN_2).abs() < 1e-10);
            assert_eq!(r.violates_bell, n >= 3);
            // The per-qubit entanglement threshold sits 2^-N below the bound.
            assert!((r.log_bound - r.log_entanglement_threshold - n as f64 * LN_2).abs() < 1e-12);
            assert_eq!(r.violates_entanglement_threshold, n >= 2);
        }
    }

    #[test]
    fn css_first_order_report() {
        for n in 1..=12usize {
            let r = correlator_single(&DickeVector::css_x(n), 1).unwrap();
            let nf = n as f64;
            assert!((r.log_correlator.to_real() - nf * nf / 4.0).abs() < 1e-10);
            assert!((r.log_bound.exp() - nf * nf / 2.0).abs() < 1e-10);
            assert!((r.log_ratio - 0.5f64.ln()).abs() < 1e-12);
            assert!(!r.violates_bell);
        }
    }

    #[test]
    fn vanishing_correlator_never_violates() {
        let r = correlator_single(&DickeVector::noon_state(5).unwrap(), 3).unwrap();
        assert!(r.log_correlator.is_zero());
        assert_eq!(r.log_ratio, f64::NEG_INFINITY);
        assert!(!r.violates_bell && !r.violates_entanglement_threshold);
        assert_eq!(r.ratio(), 0.0);
    }

    #[test]
    fn ghz_addressable() {
        assert_eq!(ghz_addressable_correlator(5, 5).unwrap(), 0.25);
        assert_eq!(ghz_addressable_correlator(5, 3).unwrap(), 0.0);
        assert_eq!(ghz_addressable_correlator(128, 128).unwrap(), 0.25);
        assert!(ghz_addressable_correlator(3, 4).is_err());
        assert!(ghz_addressable_correlator(0, 0).is_err());
    }

    #[test]
    fn ghz_plus_single() {
        let r = ghz_plus_single_correlator(3).unwrap();
        assert_eq!(r.log_ratio, 0.0);
        assert!(!r.violates_bell);
        let r = ghz_plus_single_correlator(4).unwrap();
        assert!((r.log_ratio - LN_2).abs() < 1e-12);
        assert!(r.violates_bell);
        let r = ghz_plus_single_correlator(1).unwrap();
        assert!((r.log_ratio + 2.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn guard_verdicts() {
        let below = CorrelatorReport::new(1, LogScalar::from_ln(-1.0), 0.0, 1);
        let above = CorrelatorReport::new(1, LogScalar::from_ln(1.0), 0.0, 1);
        assert_eq!(
            cross_region_guard(&below, &below, &above),
            CrossRegionVerdict::GenuineCrossRegion
        );
        assert_eq!(
            cross_region_guard(&above, &below, &above),
            CrossRegionVerdict::LocalOrigin
        );
        assert_eq!(
            cross_region_guard(&below, &above, &above),
            CrossRegionVerdict::LocalOrigin
        );
        assert_eq!(
            cross_region_guard(&below, &below, &below),
            CrossRegionVerdict::NoViolation
        );
        assert_eq!(
            cross_region_guard(&above, &above, &below),
            CrossRegionVerdict::NoViolation
        );
        assert_eq!(CrossRegionVerdict::LocalOrigin.to_string(), "local-origin");
    }

    #[test]
    fn expansion_words() {
        let w = expand_plus_power(1).unwrap();
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].letters, vec![PauliLetter::X]);
        assert_eq!(w[0].coefficient, Complex64::new(1.0, 0.0));
        assert_eq!(w[1].coefficient, Complex64::new(0.0, 1.0));

        let w: Vec<String> = expand_plus_power(2)
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(w, ["+1 XX", "+i XY", "+i YX", "-1 YY"]);

        for m in 1..=10 {
            let words = expand_plus_power(m).unwrap();
            assert_eq!(words.len(), 1 << m);
            assert!(words
                .iter()
                .all(|w| (w.coefficient.norm() - 1.0).abs() == 0.0));
        }
        assert!(expand_plus_power(0).is_err());
    }
}
