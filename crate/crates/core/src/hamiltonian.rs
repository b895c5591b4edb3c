//! Two-mode Bose-Hubbard model `H = -J_x + (U/N) J_z^2` in the `J_z`
//! eigenbasis, and an extremal eigensolver for real symmetric tridiagonal
//! matrices.
//!
//! `J_z^2` is diagonal in the symmetric basis and `J_x` only couples
//! neighbouring `n`, so the Hamiltonian is tridiagonal. The ground state is
//! bracketed by Sturm-sequence bisection and its vector obtained by inverse
//! iteration.

use num_complex::Complex64;

use crate::dicke::DickeVector;
use crate::error::{Error, Result};

/// Default bracket width for the bisection stage.
pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// Residual `||Hv - Ev||` accepted relative to `max(1, |E|)`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-10;

const MAX_BISECTION_STEPS: usize = 400;
const MAX_INVERSE_ITERATIONS: usize = 64;

/// A real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    diagonal: Vec<f64>,
    off_diagonal: Vec<f64>,
}

impl TridiagonalOperator {
    pub fn new(diagonal: Vec<f64>, off_diagonal: Vec<f64>) -> Result<Self> {
        if diagonal.is_empty() {
            return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
        }
        if off_diagonal.len() + 1 != diagonal.len() {
            return Err(Error::InvalidArgument(format!(
                "off-diagonal length {} does not match dimension {}",
                off_diagonal.len(),
                diagonal.len()
            )));
        }
        if diagonal.iter().chain(&off_diagonal).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix element".into()));
        }
        Ok(TridiagonalOperator {
            diagonal,
            off_diagonal,
        })
    }

    pub fn dimension(&self) -> usize {
        self.diagonal.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn off_diagonal(&self) -> &[f64] {
        &self.off_diagonal
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dimension(), "dimension mismatch");
        let d = self.dimension();
        (0..d)
            .map(|i| {
                let mut s = self.diagonal[i] * v[i];
                if i > 0 {
                    s += self.off_diagonal[i - 1] * v[i - 1];
                }
                if i + 1 < d {
                    s += self.off_diagonal[i] * v[i + 1];
                }
                s
            })
            .collect()
    }

    /// `v^T H v / v^T v`.
    pub fn rayleigh_quotient(&self, v: &[f64]) -> f64 {
        let hv = self.apply(v);
        dot(v, &hv) / dot(v, v)
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let d = self.dimension();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..d {
            let mut r = 0.0;
            if i > 0 {
                r += self.off_diagonal[i - 1].abs();
            }
            if i + 1 < d {
                r += self.off_diagonal[i].abs();
            }
            lo = lo.min(self.diagonal[i] - r);
            hi = hi.max(self.diagonal[i] + r);
        }
        (lo, hi)
    }

    fn norm_bound(&self) -> f64 {
        let (lo, hi) = self.gershgorin_bounds();
        lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE)
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::EPSILON * self.norm_bound();
        let mut count = 0;
        let mut q = self.diagonal[0] - x;
        for i in 0..self.dimension() {
            if i > 0 {
                let e = self.off_diagonal[i - 1];
                q = self.diagonal[i] - x - e * e / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// True when `H` commutes with the index reflection `n -> d-1-n`.
    pub fn is_reflection_symmetric(&self) -> bool {
        let d = self.dimension();
        let scale = self.norm_bound();
        let tol = 8.0 * f64::EPSILON * scale;
        (0..d).all(|i| (self.diagonal[i] - self.diagonal[d - 1 - i]).abs() <= tol)
            && (0..d - 1)
                .all(|i| (self.off_diagonal[i] - self.off_diagonal[d - 2 - i]).abs() <= tol)
    }

    /// Solves `(H - shift) x = b` by Gaussian elimination with partial
    /// pivoting; exactly singular pivots are nudged to `eps * ||H||`.
    fn solve_shifted(&self, shift: f64, b: &[f64]) -> Vec<f64> {
        let d = self.dimension();
        let tiny = f64::EPSILON * self.norm_bound();
        if d == 1 {
            let p = self.diagonal[0] - shift;
            return vec![b[0] / if p.abs() < tiny { tiny } else { p }];
        }
        // Row i of the factored system holds (diag, upper1, upper2).
        let mut diag: Vec<f64> = self.diagonal.iter().map(|x| x - shift).collect();
        let mut upper1: Vec<f64> = self.off_diagonal.clone();
        let mut upper2 = vec![0.0; d.saturating_sub(2)];
        let mut lower = self.off_diagonal.clone();
        let mut rhs = b.to_vec();

        for i in 0..d - 1 {
            if diag[i].abs() >= lower[i].abs() {
                if diag[i].abs() < tiny {
                    diag[i] = tiny;
                }
                let f = lower[i] / diag[i];
                diag[i + 1] -= f * upper1[i];
                rhs[i + 1] -= f * rhs[i];
                lower[i] = 0.0;
            } else {
                // Swap rows i and i+1.
                let f = diag[i] / lower[i];
                diag[i] = lower[i];
                let tmp = diag[i + 1];
                diag[i + 1] = upper1[i] - f * tmp;
                upper1[i] = tmp;
                if i + 1 < d - 1 {
                    upper2[i] = upper1[i + 1];
                    upper1[i + 1] = -f * upper2[i];
                }
                rhs.swap(i, i + 1);
                rhs[i + 1] -= f * rhs[i];
                lower[i] = 0.0;
            }
        }
        if diag[d - 1].abs() < tiny {
            diag[d - 1] = tiny;
        }

        let mut x = vec![0.0; d];
        for i in (0..d).rev() {
            let mut s = rhs[i];
            if i + 1 < d {
                s -= upper1[i] * x[i + 1];
            }
            if i + 2 < d {
                s -= upper2[i] * x[i + 2];
            }
            x[i] = s / diag[i];
        }
        x
    }

    /// Smallest eigenvalue bracketed to `tol * max(1, |lambda|)`.
    pub fn smallest_eigenvalue(&self, tol: f64) -> Result<f64> {
        let (mut lo, mut hi) = self.gershgorin_bounds();
        // Widen a hair so the bounds are strict.
        let pad = f64::EPSILON * self.norm_bound() * 4.0;
        lo -= pad;
        hi += pad;
        for _ in 0..MAX_BISECTION_STEPS {
            let width = hi - lo;
            let scale = lo.abs().max(hi.abs()).max(1.0);
            if width <= tol * scale {
                return Ok(0.5 * (lo + hi));
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                // Bracket cannot shrink further in floating point.
                return Ok(mid);
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::NonConvergence {
            routine: "bisection",
            detail: format!("bracket [{lo}, {hi}] after {MAX_BISECTION_STEPS} steps"),
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if max == 0.0 {
        return;
    }
    v.iter_mut().for_each(|x| *x /= max);
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// `H = -J_x + (U/N) J_z^2` on `N` particles, `U` in units of the tunnelling
/// (Josephson) energy.
///
/// Diagonal: `(U/N) (n - N/2)^2`. Off-diagonal: `-sqrt((n+1)(N-n)) / 2`.
pub fn build_bose_hubbard(n_particles: usize, interaction: f64) -> Result<TridiagonalOperator> {
    if n_particles == 0 {
        return Err(Error::NoParticles);
    }
    if !interaction.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "interaction strength {interaction}"
        )));
    }
    let nf = n_particles as f64;
    let diagonal = (0..=n_particles)
        .map(|n| {
            let jz = n as f64 - 0.5 * nf;
            interaction / nf * jz * jz
        })
        .collect();
    let off_diagonal = (0..n_particles)
        .map(|n| -0.5 * (((n + 1) * (n_particles - n)) as f64).sqrt())
        .collect();
    TridiagonalOperator::new(diagonal, off_diagonal)
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub energy: f64,
    pub state: DickeVector,
    /// `||H v - E v||_2` of the returned pair.
    pub residual_norm: f64,
}

/// Lowest eigenpair of a symmetric tridiagonal operator.
///
/// The eigenvector is normalized and its largest-magnitude component made
/// positive. For reflection-symmetric operators the iteration is confined to
/// the even sector, which selects the symmetric member of a near-degenerate
/// doublet.
pub fn ground_state(h: &TridiagonalOperator, tol: f64) -> Result<GroundStateResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol}")));
    }
    let d = h.dimension();
    let lambda = h.smallest_eigenvalue(tol)?;
    let symmetric = h.is_reflection_symmetric();

    let mut v = vec![1.0; d];
    normalize(&mut v);
    let mut energy = lambda;
    let mut residual = f64::INFINITY;
    let target = RESIDUAL_TOLERANCE * lambda.abs().max(1.0);

    for iteration in 0..MAX_INVERSE_ITERATIONS {
        let mut y = h.solve_shifted(lambda, &v);
        if symmetric {
            for i in 0..d / 2 {
                let avg = 0.5 * (y[i] + y[d - 1 - i]);
                y[i] = avg;
                y[d - 1 - i] = avg;
            }
        }
        normalize(&mut y);
        if y.iter().any(|x| !x.is_finite()) {
            break;
        }
        v = y;
        energy = h.rayleigh_quotient(&v);
        let hv = h.apply(&v);
        residual = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - energy * b).powi(2))
            .sum::<f64>()
            .sqrt();
        // One extra sweep after reaching the target polishes the small
        // components of the vector.
        if residual <= 1e-3 * target && iteration >= 1 {
            break;
        }
    }
    if !(residual <= target) {
        return Err(Error::NonConvergence {
            routine: "inverse iteration",
            detail: format!("residual {residual:e} above {target:e} at E = {energy}"),
        });
    }

    let pivot = v
        .iter()
        .copied()
        .fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    let state = DickeVector::from_amplitudes(v.iter().map(|&x| Complex64::new(x, 0.0)).collect())?;
    Ok(GroundStateResult {
        energy,
        state,
        residual_norm: residual,
    })
}

/// Ground state of the two-mode Bose-Hubbard model.
pub fn bose_hubbard_ground_state(
    n_particles: usize,
    interaction: f64,
) -> Result<GroundStateResult> {
    ground_state(
        &build_bose_hubbard(n_particles, interaction)?,
        DEFAULT_TOLERANCE,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn single_qubit_matrix() {
        let h = build_bose_hubbard(1, 0.0).unwrap();
        assert_eq!(h.diagonal(), &[0.0, 0.0]);
        assert_eq!(h.off_diagonal(), &[-0.5]);
        let gs = ground_state(&h, DEFAULT_TOLERANCE).unwrap();
        assert!((gs.energy + 0.5).abs() < 1e-12);
        for a in gs.state.amplitudes() {
            assert!((a.re - FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn two_particle_matrix() {
        let h = build_bose_hubbard(2, -1.0).unwrap();
        assert_eq!(h.diagonal(), &[-0.5, 0.0, -0.5]);
        let s = -(2f64).sqrt() / 2.0;
        for e in h.off_diagonal() {
            assert!((e - s).abs() < 1e-15);
        }
        let gs = ground_state(&build_bose_hubbard(2, 0.0).unwrap(), DEFAULT_TOLERANCE).unwrap();
        assert!((gs.energy + 1.0).abs() < 1e-12);
        let css = DickeVector::css_x(2);
        for (a, b) in gs.state.amplitudes().iter().zip(css.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(build_bose_hubbard(0, 1.0), Err(Error::NoParticles));
        assert!(build_bose_hubbard(3, f64::NAN).is_err());
        assert!(TridiagonalOperator::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(TridiagonalOperator::new(vec![], vec![]).is_err());
        let h = build_bose_hubbard(3, 0.0).unwrap();
        assert!(ground_state(&h, 0.0).is_err());
        assert!(ground_state(&h, f64::NAN).is_err());
    }

    #[test]
    fn one_by_one() {
        let h = TridiagonalOperator::new(vec![3.5], vec![]).unwrap();
        let gs = ground_state(&h, DEFAULT_TOLERANCE).unwrap();
        assert!((gs.energy - 3.5).abs() < 1e-12);
        assert!((gs.state.amplitudes()[0].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sturm_count_on_diagonal_matrix() {
        let h = TridiagonalOperator::new(vec![1.0, 2.0, 3.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(h.count_below(0.5), 0);
        assert_eq!(h.count_below(1.5), 1);
        assert_eq!(h.count_below(2.5), 2);
        assert_eq!(h.count_below(10.0), 3);
        assert!(!h.is_reflection_symmetric());
        assert!(build_bose_hubbard(9, -3.0)
            .unwrap()
            .is_reflection_symmetric());
    }

    #[test]
    fn non_symmetric_operator_still_solves() {
        // Lowest eigenvalue of [[2,-1],[-1,5]] is (7 - sqrt(13)) / 2.
        let h = TridiagonalOperator::new(vec![2.0, 5.0], vec![-1.0]).unwrap();
        let gs = ground_state(&h, DEFAULT_TOLERANCE).unwrap();
        assert!((gs.energy - (7.0 - 13f64.sqrt()) / 2.0).abs() < 1e-12);
        assert!(gs.residual_norm < 1e-12);
    }
}
