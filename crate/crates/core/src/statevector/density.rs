use nalgebra::DMatrix;
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::error::{arg_err, Result};
use crate::Scalar;

/// Density matrix of a k-qubit subsystem, row-major, dimension 2^k.
///
/// Only produced as a diagnostic (partial traces and outcome averages);
/// nothing evolves a density matrix under gates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrix<T> {
    num_qubits: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Scalar> DensityMatrix<T> {
    pub(crate) fn from_entries(num_qubits: usize, entries: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(entries.len(), 1 << (2 * num_qubits));
        DensityMatrix { num_qubits, entries }
    }

    pub fn zeros(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        Self::from_entries(num_qubits, vec![Complex::new(T::zero(), T::zero()); dim * dim])
    }

    /// I / 2^k.
    pub fn maximally_mixed(num_qubits: usize) -> Self {
        let mut rho = Self::zeros(num_qubits);
        let dim = rho.dim();
        let w = T::one() / T::of(dim as f64);
        for i in 0..dim {
            rho.entries[i * dim + i] = Complex::new(w, T::zero());
        }
        rho
    }

    /// |s⟩⟨s|.
    pub fn from_pure(s: &StateVector<T>) -> Self {
        let mut rho = Self::zeros(s.num_qubits());
        rho.add_pure(s, T::one());
        rho
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim() + col]
    }

    /// Accumulates `weight · |s⟩⟨s|` into `self`.
    pub fn add_pure(&mut self, s: &StateVector<T>, weight: T) {
        assert_eq!(s.num_qubits(), self.num_qubits, "register size mismatch");
        let dim = self.dim();
        let amps = s.amplitudes();
        for (r, &a) in amps.iter().enumerate() {
            let ar = a * weight;
            for (e, b) in self.entries[r * dim..(r + 1) * dim].iter_mut().zip(amps) {
                *e += ar * b.conj();
            }
        }
    }

    /// Accumulates `weight · other` into `self`.
    pub fn add_scaled(&mut self, other: &DensityMatrix<T>, weight: T) {
        assert_eq!(other.num_qubits, self.num_qubits, "register size mismatch");
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            *a += *b * weight;
        }
    }

    pub fn trace(&self) -> Complex<T> {
        let dim = self.dim();
        (0..dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.entries[i * dim + i])
    }

    /// Tr(ρ²); 1 exactly for pure states.
    pub fn purity(&self) -> T {
        // Tr(ρ²) = Σ_{ij} ρ_ij ρ_ji = Σ |ρ_ij|² for Hermitian ρ
        self.entries.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        let dim = self.dim();
        (0..dim).all(|r| (r..dim).all(|c| (self.get(r, c) - self.get(c, r).conj()).norm() <= tol))
    }

    /// Smallest eigenvalue, computed in `f64` via a Hermitian eigendecomposition.
    pub fn min_eigenvalue(&self) -> f64 {
        let dim = self.dim();
        let m = DMatrix::from_fn(dim, dim, |r, c| {
            let z = self.get(r, c);
            // symmetrize so round-off never makes the input non-Hermitian
            let w = self.get(c, r).conj();
            Complex::new((z.re.as_f64() + w.re.as_f64()) / 2.0, (z.im.as_f64() + w.im.as_f64()) / 2.0)
        });
        m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Hermitian, unit trace and positive semidefinite (eigenvalues ≥ −1e-9).
    pub fn is_valid(&self, tol: T) -> bool {
        let tr = self.trace();
        self.is_hermitian(tol)
            && (tr.re - T::one()).abs() <= tol
            && tr.im.abs() <= tol
            && self.min_eigenvalue() >= -1e-9
    }

    /// ⟨ψ|ρ|ψ⟩, the fidelity of this state against a pure target.
    pub fn fidelity_with_pure(&self, target: &StateVector<T>) -> Result<T> {
        if target.num_qubits() != self.num_qubits {
            return Err(arg_err!(
                "fidelity between {}-qubit density matrix and {}-qubit state",
                self.num_qubits,
                target.num_qubits()
            ));
        }
        let dim = self.dim();
        let psi = target.amplitudes();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (r, p) in psi.iter().enumerate() {
            let mut row = Complex::new(T::zero(), T::zero());
            for (e, q) in self.entries[r * dim..(r + 1) * dim].iter().zip(psi) {
                row += *e * q;
            }
            acc += p.conj() * row;
        }
        Ok(acc.re)
    }

    /// Largest entrywise |ρ_ij − σ_ij|.
    pub fn max_abs_diff(&self, other: &DensityMatrix<T>) -> Result<T> {
        if other.num_qubits != self.num_qubits {
            return Err(arg_err!("comparing density matrices of different sizes"));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm())))
    }

    /// Partial trace keeping the listed qubits (1-based, in the given order).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let n = self.num_qubits;
        let (keep_idx, env_idx) = super::split_indices(n, keep)?;
        let k = keep.len();
        let kd = 1usize << k;
        let dim = self.dim();
        let mut out = DensityMatrix::zeros(k);
        for r in 0..kd {
            for c in 0..kd {
                let mut acc = Complex::new(T::zero(), T::zero());
                for &e in &env_idx {
                    acc += self.entries[(keep_idx[r] | e) * dim + (keep_idx[c] | e)];
                }
                out.entries[r * kd + c] = acc;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn maximally_mixed_is_valid() {
        let rho = DensityMatrix::<f64>::maximally_mixed(2);
        assert!(rho.is_valid(1e-12));
        assert!((rho.purity() - 0.25).abs() < 1e-15);
        assert!((rho.min_eigenvalue() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn pure_state_purity_is_one() {
        let s = StateVector::<f64>::basis(2, &[1, 0]).unwrap();
        let rho = DensityMatrix::from_pure(&s);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        assert!((rho.fidelity_with_pure(&s).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reduce_of_density_matches_state_partial_trace() {
        let phi = crate::channel::build_product_channel::<f64>(1).unwrap();
        let rho = DensityMatrix::from_pure(&phi);
        let reduced = rho.reduce(&[2]).unwrap();
        let direct = phi.reduced_density(&[2]).unwrap();
        assert!(reduced.max_abs_diff(&direct).unwrap() < 1e-15);
        assert!(reduced.max_abs_diff(&DensityMatrix::maximally_mixed(1)).unwrap() < 1e-15);
    }
}
