//! Dense state-vector engine.
//!
//! Qubits are numbered from 1 and qubit 1 is the most significant bit of the
//! basis index: the ket |b₁b₂…bₙ⟩ lives at index Σ bᵢ·2^(n−i). Reading a ket
//! left to right therefore reads the index's binary expansion.
//!
//! Every operation is a pure function returning a new state; `*_mut`
//! variants exist where the protocol pipeline wants to avoid copies.

mod bell;
mod density;
mod gate;

pub use bell::BellOutcome;
pub use density::DensityMatrix;
pub use gate::Gate1Q;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::Scalar;

/// Largest register the engine will allocate (2^30 amplitudes).
pub const MAX_QUBITS: usize = 30;

/// Dense amplitude vector over an n-qubit register.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawState<T>", bound(deserialize = "T: Scalar"))]
pub struct StateVector<T> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

#[derive(Deserialize)]
struct RawState<T> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> TryFrom<RawState<T>> for StateVector<T> {
    type Error = Error;

    fn try_from(raw: RawState<T>) -> Result<Self> {
        let s = StateVector::from_amplitudes(raw.amps)?;
        if s.num_qubits != raw.num_qubits {
            return Err(arg_err!("num_qubits {} does not match {} amplitudes", raw.num_qubits, s.amps.len()));
        }
        Ok(s)
    }
}

#[inline]
fn czero<T: Scalar>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Bit mask of 1-based qubit `q` in an `n`-qubit register.
#[inline]
fn mask(n: usize, q: usize) -> usize {
    1 << (n - q)
}

/// Opens a zero bit at position `pos`, shifting higher bits up by one.
#[inline]
fn insert_zero_bit(x: usize, pos: u32) -> usize {
    let low = x & ((1 << pos) - 1);
    (x >> pos) << (pos + 1) | low
}

fn check_qubit(n: usize, q: usize) -> Result<()> {
    if q == 0 || q > n {
        return Err(arg_err!("qubit {q} out of range 1..={n}"));
    }
    Ok(())
}

/// For a subset `keep` (1-based, ordered) of an n-qubit register, returns the
/// full-register bit patterns of every sub-index (keep[0] most significant)
/// and of every complement index (complement in ascending order).
pub(crate) fn split_indices(n: usize, keep: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    if keep.is_empty() {
        return Err(arg_err!("qubit subset must not be empty"));
    }
    let mut seen = vec![false; n + 1];
    for &q in keep {
        check_qubit(n, q)?;
        if seen[q] {
            return Err(arg_err!("qubit {q} listed twice"));
        }
        seen[q] = true;
    }
    let env: Vec<usize> = (1..=n).filter(|q| !seen[*q]).collect();
    let scatter = |qubits: &[usize]| -> Vec<usize> {
        let k = qubits.len();
        (0..1usize << k)
            .map(|sub| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| sub >> (k - 1 - j) & 1 == 1)
                    .fold(0, |acc, (_, &q)| acc | mask(n, q))
            })
            .collect()
    };
    Ok((scatter(keep), scatter(&env)))
}

impl<T: Scalar> StateVector<T> {
    /// The 0-qubit state with the single amplitude 1.
    pub fn scalar_one() -> Self {
        StateVector { num_qubits: 0, amps: vec![Complex::new(T::one(), T::zero())] }
    }

    /// Wraps an amplitude vector, checking length 2^n and normalization.
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(arg_err!("amplitude count {len} is not a power of two"));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(Error::Resource(format!("{num_qubits} qubits exceeds the {MAX_QUBITS}-qubit limit")));
        }
        let s = StateVector { num_qubits, amps };
        let norm = s.norm_sqr();
        if (norm - T::one()).abs() > T::norm_tol() {
            return Err(arg_err!("state is not normalized: Σ|amp|² = {norm}"));
        }
        Ok(s)
    }

    pub(crate) fn from_raw(num_qubits: usize, amps: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << num_qubits);
        StateVector { num_qubits, amps }
    }

    /// Computational basis state |b₁…bₙ⟩; `bits` holds 0/1 values, qubit 1 first.
    pub fn basis(n: usize, bits: &[u8]) -> Result<Self> {
        if bits.len() != n {
            return Err(arg_err!("expected {n} bits, got {}", bits.len()));
        }
        if n > MAX_QUBITS {
            return Err(Error::Resource(format!("{n} qubits exceeds the {MAX_QUBITS}-qubit limit")));
        }
        let mut index = 0usize;
        for &b in bits {
            if b > 1 {
                return Err(arg_err!("bit value {b} is not 0 or 1"));
            }
            index = index << 1 | b as usize;
        }
        let mut amps = vec![czero(); 1 << n];
        amps[index] = Complex::new(T::one(), T::zero());
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Single-qubit state a|0⟩ + b|1⟩.
    pub fn qubit(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        Self::from_amplitudes(vec![a, b])
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    /// Nonzero amplitudes as (basis bitstring, amplitude), in index order.
    pub fn nonzero_terms(&self, cutoff: T) -> Vec<(String, Complex<T>)> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > cutoff)
            .map(|(i, a)| (self.bitstring(i), *a))
            .collect()
    }

    pub fn bitstring(&self, index: usize) -> String {
        (1..=self.num_qubits)
            .map(|q| if index & mask(self.num_qubits, q) != 0 { '1' } else { '0' })
            .collect()
    }

    /// a ⊗ b, with a's qubits as the most significant block.
    pub fn tensor(&self, other: &StateVector<T>) -> Result<Self> {
        let n = self.num_qubits + other.num_qubits;
        if n > MAX_QUBITS {
            return Err(Error::Resource(format!("{n} qubits exceeds the {MAX_QUBITS}-qubit limit")));
        }
        let mut amps = Vec::with_capacity(1 << n);
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| *a * *b));
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    /// Relabels qubits: output qubit j carries input qubit `perm[j-1]`
    /// (1-based). Pure amplitude permutation.
    pub fn reorder_qubits(&self, perm: &[usize]) -> Result<Self> {
        let n = self.num_qubits;
        if perm.len() != n {
            return Err(arg_err!("permutation has {} entries for {n} qubits", perm.len()));
        }
        let mut seen = vec![false; n + 1];
        for &p in perm {
            if p == 0 || p > n || seen[p] {
                return Err(arg_err!("{perm:?} is not a permutation of 1..={n}"));
            }
            seen[p] = true;
        }
        let mut amps = vec![czero(); self.amps.len()];
        for (k, a) in self.amps.iter().enumerate() {
            let mut out = 0usize;
            for (j, &src) in perm.iter().enumerate() {
                if k & mask(n, src) != 0 {
                    out |= mask(n, j + 1);
                }
            }
            amps[out] = *a;
        }
        Ok(StateVector { num_qubits: n, amps })
    }

    pub fn apply_1q(&self, q: usize, g: &Gate1Q<T>) -> Result<Self> {
        let mut s = self.clone();
        s.apply_1q_mut(q, g)?;
        Ok(s)
    }

    pub fn apply_1q_mut(&mut self, q: usize, g: &Gate1Q<T>) -> Result<()> {
        check_qubit(self.num_qubits, q)?;
        let m = g.matrix();
        let bit = mask(self.num_qubits, q);
        for i0 in (0..self.amps.len()).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            let (a0, a1) = (self.amps[i0], self.amps[i1]);
            self.amps[i0] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i1] = m[1][0] * a0 + m[1][1] * a1;
        }
        Ok(())
    }

    pub fn apply_cnot(&self, control: usize, target: usize) -> Result<Self> {
        let mut s = self.clone();
        s.apply_cnot_mut(control, target)?;
        Ok(s)
    }

    pub fn apply_cnot_mut(&mut self, control: usize, target: usize) -> Result<()> {
        check_qubit(self.num_qubits, control)?;
        check_qubit(self.num_qubits, target)?;
        if control == target {
            return Err(arg_err!("CNOT control and target are both qubit {control}"));
        }
        let (c, t) = (mask(self.num_qubits, control), mask(self.num_qubits, target));
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
        Ok(())
    }

    /// Unnormalized projection of (qa, qb) onto a Bell vector, with the pair
    /// removed from the register. Returns the remaining amplitudes.
    fn bell_contract(&self, qa: usize, qb: usize, outcome: BellOutcome) -> Result<Vec<Complex<T>>> {
        let n = self.num_qubits;
        check_qubit(n, qa)?;
        check_qubit(n, qb)?;
        if qa == qb {
            return Err(arg_err!("Bell measurement needs two distinct qubits, got {qa} twice"));
        }
        let (ma, mb) = (mask(n, qa), mask(n, qb));
        let (lo, hi) = (ma.min(mb).trailing_zeros(), ma.max(mb).trailing_zeros());
        let coeffs = outcome.amplitudes::<T>();
        let rest = 1usize << (n - 2);
        let mut out = Vec::with_capacity(rest);
        for r in 0..rest {
            let base = insert_zero_bit(insert_zero_bit(r, lo), hi);
            let mut acc = czero();
            for (xy, c) in coeffs.iter().enumerate() {
                if *c == T::zero() {
                    continue;
                }
                let idx = base | if xy & 2 != 0 { ma } else { 0 } | if xy & 1 != 0 { mb } else { 0 };
                acc += self.amps[idx] * *c;
            }
            out.push(acc);
        }
        Ok(out)
    }

    /// Projects qubits (qa, qb) onto the Bell vector for `outcome`.
    ///
    /// Returns the outcome probability and the renormalized post-measurement
    /// state of the remaining n−2 qubits (relative order preserved), or
    /// `None` when the probability is below the zero-probability cutoff.
    pub fn bell_project(&self, qa: usize, qb: usize, outcome: BellOutcome) -> Result<(T, Option<Self>)> {
        let mut amps = self.bell_contract(qa, qb, outcome)?;
        let p = amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr());
        if p < T::zero_prob() {
            return Ok((p, None));
        }
        let scale = T::one() / p.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        Ok((p, Some(StateVector { num_qubits: self.num_qubits - 2, amps })))
    }

    /// Like [`bell_project`](Self::bell_project) but keeps the measured pair in
    /// the register, leaving it in the Bell state that was observed.
    pub fn bell_project_keep(&self, qa: usize, qb: usize, outcome: BellOutcome) -> Result<(T, Option<Self>)> {
        let (p, rest) = self.bell_project(qa, qb, outcome)?;
        let Some(rest) = rest else { return Ok((p, None)) };
        let n = self.num_qubits;
        let (ma, mb) = (mask(n, qa), mask(n, qb));
        let (lo, hi) = (ma.min(mb).trailing_zeros(), ma.max(mb).trailing_zeros());
        let coeffs = outcome.amplitudes::<T>();
        let mut amps = vec![czero(); self.amps.len()];
        for (r, a) in rest.amps.iter().enumerate() {
            let base = insert_zero_bit(insert_zero_bit(r, lo), hi);
            for (xy, c) in coeffs.iter().enumerate() {
                let idx = base | if xy & 2 != 0 { ma } else { 0 } | if xy & 1 != 0 { mb } else { 0 };
                amps[idx] = *a * *c;
            }
        }
        Ok((p, Some(StateVector { num_qubits: n, amps })))
    }

    /// Probabilities of the four Bell outcomes on (qa, qb), in
    /// [`BellOutcome::ALL`] order.
    pub fn bell_probabilities(&self, qa: usize, qb: usize) -> Result<[T; 4]> {
        let mut out = [T::zero(); 4];
        for (slot, o) in out.iter_mut().zip(BellOutcome::ALL) {
            *slot = self
                .bell_contract(qa, qb, o)?
                .iter()
                .fold(T::zero(), |acc, a| acc + a.norm_sqr());
        }
        Ok(out)
    }

    /// Reduced density matrix of the ordered subset `keep` (1-based,
    /// keep[0] most significant); everything else is traced out.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix<T>> {
        let (keep_idx, env_idx) = split_indices(self.num_qubits, keep)?;
        let k = keep.len();
        let kd = 1usize << k;
        let mut entries = vec![czero(); kd * kd];
        let mut slice = vec![czero(); kd];
        for &e in &env_idx {
            for (i, slot) in slice.iter_mut().enumerate() {
                *slot = self.amps[keep_idx[i] | e];
            }
            for r in 0..kd {
                if slice[r] == czero() {
                    continue;
                }
                for c in 0..kd {
                    entries[r * kd + c] += slice[r] * slice[c].conj();
                }
            }
        }
        Ok(DensityMatrix::from_entries(k, entries))
    }

    /// Probability that qubit `q` reads 1 in the computational basis.
    pub fn prob_one(&self, q: usize) -> Result<T> {
        check_qubit(self.num_qubits, q)?;
        let bit = mask(self.num_qubits, q);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & bit != 0)
            .fold(T::zero(), |acc, (_, a)| acc + a.norm_sqr()))
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        if self.num_qubits != other.num_qubits {
            return Err(arg_err!("inner product of {}- and {}-qubit states", self.num_qubits, other.num_qubits));
        }
        Ok(self.amps.iter().zip(&other.amps).fold(czero(), |acc, (a, b)| acc + a.conj() * *b))
    }

    /// Largest |aᵢ − bᵢ| between two equally sized states.
    pub fn max_abs_diff(&self, other: &StateVector<T>) -> Result<T> {
        if self.num_qubits != other.num_qubits {
            return Err(arg_err!("comparing {}- and {}-qubit states", self.num_qubits, other.num_qubits));
        }
        Ok(self.amps.iter().zip(&other.amps).fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm())))
    }
}

/// |⟨a|b⟩|², insensitive to the global phase of either argument.
pub fn fidelity_mod_phase<T: Scalar>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    Ok(a.inner(b)?.norm_sqr())
}
