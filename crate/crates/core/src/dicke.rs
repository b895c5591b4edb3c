//! Bosonic qubits in the symmetric basis `|n, N-n>` (n particles up, N-n
//! down) and matrix-free collective ladder operators.
//!
//! Repeated ladder operations grow norms factorially, so every application
//! renormalizes the amplitudes and moves the norm into `log_scale`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{log_binomial, LogComplex};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// A (possibly unnormalized) vector `exp(log_scale) * sum_n amplitudes[n] |n, N-n>`.
///
/// After any operation the amplitude array has unit 2-norm, unless the vector
/// is the zero vector, which is flagged by `log_scale == -inf` and all-zero
/// amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeVector {
    amplitudes: Vec<Complex64>,
    log_scale: f64,
}

impl DickeVector {
    /// The basis vector `|n, N-n>`.
    pub fn basis_state(n_particles: usize, n: usize) -> Result<Self> {
        if n > n_particles {
            return Err(Error::IndexOutOfRange {
                index: n,
                particles: n_particles,
            });
        }
        let mut amplitudes = vec![ZERO; n_particles + 1];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(DickeVector {
            amplitudes,
            log_scale: 0.0,
        })
    }

    /// `(|N,0> + |0,N>) / sqrt(2)`.
    pub fn noon_state(n_particles: usize) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::NoParticles);
        }
        let mut amplitudes = vec![ZERO; n_particles + 1];
        let c = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amplitudes[0] = c;
        amplitudes[n_particles] = c;
        Ok(DickeVector {
            amplitudes,
            log_scale: 0.0,
        })
    }

    /// Coherent spin state polarized along +x: `c_n = sqrt(C(N, n)) / 2^(N/2)`.
    ///
    /// This is the ground state of `-J_x`.
    pub fn css_x(n_particles: usize) -> Self {
        let half_log_norm = 0.5 * n_particles as f64 * std::f64::consts::LN_2;
        let amplitudes = (0..=n_particles)
            .map(|n| {
                let lb = log_binomial(n_particles as u64, n as u64).expect("n <= N");
                Complex64::new((0.5 * lb - half_log_norm).exp(), 0.0)
            })
            .collect();
        DickeVector {
            amplitudes,
            log_scale: 0.0,
        }
    }

    /// Normalizes arbitrary amplitudes; the norm is discarded.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::InvalidArgument(
                "a Dicke vector needs at least one amplitude".into(),
            ));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        let mut v = DickeVector::renormalized(amplitudes, 0.0);
        if !v.is_zero() {
            v.log_scale = 0.0;
        }
        Ok(v)
    }

    pub fn from_real_amplitudes(amplitudes: &[f64]) -> Result<Self> {
        Self::from_amplitudes(amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect())
    }

    fn renormalized(mut amplitudes: Vec<Complex64>, log_scale: f64) -> Self {
        let norm = l2_norm(&amplitudes);
        if norm == 0.0 || log_scale == f64::NEG_INFINITY {
            amplitudes.iter_mut().for_each(|a| *a = ZERO);
            return DickeVector {
                amplitudes,
                log_scale: f64::NEG_INFINITY,
            };
        }
        let inv = 1.0 / norm;
        amplitudes.iter_mut().for_each(|a| *a *= inv);
        DickeVector {
            amplitudes,
            log_scale: log_scale + norm.ln(),
        }
    }

    pub fn n_particles(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Natural log of the overall factor multiplying `amplitudes`.
    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn is_zero(&self) -> bool {
        self.log_scale == f64::NEG_INFINITY
    }

    /// Unit amplitudes and zero log-scale, within `1e-12`.
    pub fn is_normalized(&self) -> bool {
        !self.is_zero()
            && self.log_scale.abs() <= 1e-12
            && (l2_norm(&self.amplitudes) - 1.0).abs() <= 1e-12
    }

    /// Amplitudes with the scale folded in; overflows for huge scales.
    pub fn scaled_amplitudes(&self) -> Vec<Complex64> {
        if self.is_zero() {
            return vec![ZERO; self.amplitudes.len()];
        }
        let s = self.log_scale.exp();
        self.amplitudes.iter().map(|a| a * s).collect()
    }

    /// The same vector multiplied by `exp(i * phase)`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let w = Complex64::from_polar(1.0, phase);
        DickeVector {
            amplitudes: self.amplitudes.iter().map(|a| a * w).collect(),
            log_scale: self.log_scale,
        }
    }

    fn map_raw(&self, op: impl FnOnce(&[Complex64]) -> Vec<Complex64>) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        DickeVector::renormalized(op(&self.amplitudes), self.log_scale)
    }

    /// `J+ = a^dagger b`, sending `|n, N-n>` to `sqrt((n+1)(N-n)) |n+1, N-n-1>`.
    pub fn apply_j_plus(&self) -> Self {
        self.map_raw(raise)
    }

    /// `J- = a b^dagger`, the adjoint of [`apply_j_plus`](Self::apply_j_plus).
    pub fn apply_j_minus(&self) -> Self {
        self.map_raw(lower)
    }

    /// `J_x = (J+ + J-) / 2`.
    pub fn apply_jx(&self) -> Self {
        self.map_raw(|a| {
            raise(a)
                .into_iter()
                .zip(lower(a))
                .map(|(u, d)| 0.5 * (u + d))
                .collect()
        })
    }

    /// `J_y = (J+ - J-) / (2i)`.
    pub fn apply_jy(&self) -> Self {
        let minus_half_i = Complex64::new(0.0, -0.5);
        self.map_raw(|a| {
            raise(a)
                .into_iter()
                .zip(lower(a))
                .map(|(u, d)| minus_half_i * (u - d))
                .collect()
        })
    }

    pub fn apply_j_plus_power(&self, m: usize) -> Self {
        (0..m).fold(self.clone(), |v, _| v.apply_j_plus())
    }

    pub fn apply_j_minus_power(&self, m: usize) -> Self {
        (0..m).fold(self.clone(), |v, _| v.apply_j_minus())
    }

    /// `<self | other>`, scales included.
    pub fn overlap(&self, other: &DickeVector) -> Result<LogComplex> {
        if self.amplitudes.len() != other.amplitudes.len() {
            return Err(Error::InvalidArgument(format!(
                "overlap of {}- and {}-particle vectors",
                self.n_particles(),
                other.n_particles()
            )));
        }
        if self.is_zero() || other.is_zero() {
            return Ok(LogComplex::ZERO);
        }
        let dot: Complex64 = self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(LogComplex::from_scaled(
            dot,
            self.log_scale + other.log_scale,
        ))
    }

    /// `<psi| J+^m |psi>`. Orders above `N` give the exact zero.
    pub fn expectation_j_plus_power(&self, m: usize) -> LogComplex {
        self.overlap(&self.apply_j_plus_power(m))
            .expect("same particle number")
    }

    /// `<psi| J-^m |psi>`.
    pub fn expectation_j_minus_power(&self, m: usize) -> LogComplex {
        self.overlap(&self.apply_j_minus_power(m))
            .expect("same particle number")
    }
}

fn l2_norm(a: &[Complex64]) -> f64 {
    // Scale by the largest entry so tiny or huge amplitudes do not
    // under/overflow when squared.
    let max = a
        .iter()
        .map(|z| z.re.abs().max(z.im.abs()))
        .fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let s: f64 = a.iter().map(|z| (z / max).norm_sqr()).sum();
    max * s.sqrt()
}

/// Unnormalized `J+` on raw amplitudes.
pub(crate) fn raise(a: &[Complex64]) -> Vec<Complex64> {
    let n_particles = a.len() - 1;
    let mut out = vec![ZERO; a.len()];
    for n in 0..n_particles {
        out[n + 1] = a[n] * (((n + 1) * (n_particles - n)) as f64).sqrt();
    }
    out
}

/// Unnormalized `J-` on raw amplitudes.
pub(crate) fn lower(a: &[Complex64]) -> Vec<Complex64> {
    let n_particles = a.len() - 1;
    let mut out = vec![ZERO; a.len()];
    for n in 1..=n_particles {
        out[n - 1] = a[n] * ((n * (n_particles - n + 1)) as f64).sqrt();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, LN_2};

    fn close(a: Complex64, b: f64) -> bool {
        (a - Complex64::new(b, 0.0)).norm() < 1e-14
    }

    #[test]
    fn basis_states() {
        let v = DickeVector::basis_state(2, 0).unwrap();
        assert_eq!(v.amplitudes().len(), 3);
        assert!(close(v.amplitudes()[0], 1.0));
        let v = DickeVector::basis_state(2, 2).unwrap();
        assert!(close(v.amplitudes()[2], 1.0));
        let v = DickeVector::basis_state(0, 0).unwrap();
        assert_eq!(v.n_particles(), 0);
        assert!(close(v.amplitudes()[0], 1.0));
        assert_eq!(
            DickeVector::basis_state(2, 3),
            Err(Error::IndexOutOfRange {
                index: 3,
                particles: 2
            })
        );
    }

    #[test]
    fn noon_and_css() {
        let v = DickeVector::noon_state(1).unwrap();
        assert!(close(v.amplitudes()[0], FRAC_1_SQRT_2) && close(v.amplitudes()[1], FRAC_1_SQRT_2));
        let v = DickeVector::noon_state(3).unwrap();
        assert!(close(v.amplitudes()[1], 0.0) && close(v.amplitudes()[3], FRAC_1_SQRT_2));
        assert_eq!(DickeVector::noon_state(0), Err(Error::NoParticles));

        let c = DickeVector::css_x(2);
        assert!(close(c.amplitudes()[0], 0.5));
        assert!(close(c.amplitudes()[1], FRAC_1_SQRT_2));
        assert!(close(c.amplitudes()[2], 0.5));
        for n in [1, 5, 40, 400] {
            assert!(DickeVector::css_x(n).is_normalized());
        }
    }

    #[test]
    fn raising_moves_weight_and_scale() {
        let v = DickeVector::basis_state(2, 0).unwrap().apply_j_plus();
        assert!(close(v.amplitudes()[1], 1.0));
        assert!((v.log_scale() - 0.5 * LN_2).abs() < 1e-15);

        let top = DickeVector::basis_state(2, 2).unwrap().apply_j_plus();
        assert!(top.is_zero());
        assert!(top.amplitudes().iter().all(|a| *a == ZERO));
        // Once zero, stays zero.
        assert!(top.apply_j_minus().is_zero());

        // J+^2 on the two-particle NOON state leaves sqrt(2) |2,0>:
        // the |0,2> branch picks up sqrt(2) * sqrt(2) on top of 1/sqrt(2).
        let v = DickeVector::noon_state(2).unwrap().apply_j_plus_power(2);
        assert!(close(v.amplitudes()[2], 1.0));
        assert!(close(v.amplitudes()[0], 0.0));
        assert!((v.log_scale() - 0.5 * LN_2).abs() < 1e-15);
    }

    #[test]
    fn noon_expectation_values() {
        for n in 1..=30usize {
            let noon = DickeVector::noon_state(n).unwrap();
            for m in 1..n {
                assert!(noon.expectation_j_plus_power(m).is_zero(), "N={n} m={m}");
            }
            let e = noon.expectation_j_plus_power(n);
            let expected = crate::numerics::log_factorial(n as u64) - LN_2;
            assert!((e.log_magnitude() - expected).abs() < 1e-12);
            assert!(e.phase().abs() < 1e-12);
            assert!(noon.expectation_j_plus_power(n + 1).is_zero());
        }
        let e = DickeVector::noon_state(2)
            .unwrap()
            .expectation_j_plus_power(2);
        assert!((e.to_complex().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn css_first_moment() {
        for n in 1..=10usize {
            let e = DickeVector::css_x(n)
                .expectation_j_plus_power(1)
                .to_complex();
            assert!((e.re - n as f64 / 2.0).abs() < 1e-12, "N={n}");
            assert!(e.im.abs() < 1e-14);
        }
    }

    #[test]
    fn zero_order_is_norm() {
        let v = DickeVector::css_x(7);
        let e = v.expectation_j_plus_power(0);
        assert!(e.log_magnitude().abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_amplitudes() {
        assert!(DickeVector::from_amplitudes(vec![]).is_err());
        assert!(DickeVector::from_real_amplitudes(&[f64::NAN, 1.0]).is_err());
        assert!(DickeVector::from_real_amplitudes(&[0.0, 0.0])
            .unwrap()
            .is_zero());
        let v = DickeVector::from_real_amplitudes(&[3.0, 4.0]).unwrap();
        assert!(v.is_normalized());
    }
}
