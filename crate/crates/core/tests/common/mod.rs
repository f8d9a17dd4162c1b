//! Test-side reference model written without the library's projection,
//! CNOT or Pauli code. A receiver branch is computed by contracting
//! ⟨B₁…B_N| against ⊗inputs ⊗ channel directly, one amplitude at a time.

#![allow(dead_code)]

use num_complex::Complex64 as C;

pub const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn parity(x: usize) -> usize {
    x.count_ones() as usize & 1
}

fn bit(x: usize, n: usize, q: usize) -> usize {
    (x >> (n - q)) & 1
}

/// Receiver bits paired with sender bits `c` in the channel.
pub fn partner(c: usize, entangled: bool) -> usize {
    if entangled {
        let head = c >> 1;
        (head << 1) | ((c & 1) ^ parity(head))
    } else {
        c
    }
}

/// ⟨B_o | x c⟩ for outcome index o in (φ⁺, φ⁻, ψ⁺, ψ⁻) order.
pub fn bell(o: usize, x: usize, c: usize) -> f64 {
    let s = FRAC_1_SQRT_2;
    match (o, x, c) {
        (0, 0, 0) | (0, 1, 1) | (1, 0, 0) | (2, 0, 1) | (2, 1, 0) | (3, 0, 1) => s,
        (1, 1, 1) | (3, 1, 0) => -s,
        _ => 0.0,
    }
}

/// Unnormalized receiver state for an outcome tuple; its squared norm is
/// the branch probability.
pub fn receiver_branch(inputs: &[(C, C)], outcomes: &[usize], entangled: bool) -> Vec<C> {
    let n = inputs.len();
    let dim = 1usize << n;
    let chan = (0.5f64).powf(n as f64 / 2.0);
    let mut out = vec![C::new(0.0, 0.0); dim];
    for x in 0..dim {
        let mut amp_in = C::new(1.0, 0.0);
        for (i, q) in inputs.iter().enumerate() {
            amp_in *= if bit(x, n, i + 1) == 0 { q.0 } else { q.1 };
        }
        for c in 0..dim {
            let mut w = chan;
            for (i, &o) in outcomes.iter().enumerate() {
                w *= bell(o, bit(x, n, i + 1), bit(c, n, i + 1));
            }
            if w != 0.0 {
                out[partner(c, entangled)] += amp_in * w;
            }
        }
    }
    out
}

/// Flip the last qubit when qubits 1..N−1 have odd parity.
pub fn cascade(psi: &[C]) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0); psi.len()];
    for (r, a) in psi.iter().enumerate() {
        out[r ^ parity(r >> 1)] = *a;
    }
    out
}

/// Pauli by letter on qubit q (1-based, MSB first).
pub fn pauli(psi: &[C], q: usize, op: char) -> Vec<C> {
    let n = psi.len().trailing_zeros() as usize;
    let m = 1usize << (n - q);
    let i = C::new(0.0, 1.0);
    let mut out = psi.to_vec();
    for r in (0..psi.len()).filter(|r| r & m == 0) {
        let (a0, a1) = (psi[r], psi[r | m]);
        let (b0, b1) = match op {
            'I' => (a0, a1),
            'X' => (a1, a0),
            'Y' => (-i * a1, i * a0),
            'Z' => (a0, -a1),
            _ => panic!("unknown Pauli {op}"),
        };
        out[r] = b0;
        out[r | m] = b1;
    }
    out
}

/// Expected per-qubit correction letter for an outcome index.
pub fn correction_letter(o: usize) -> char {
    ['I', 'Z', 'X', 'Y'][o]
}

pub fn product(inputs: &[(C, C)]) -> Vec<C> {
    let mut out = vec![C::new(1.0, 0.0)];
    for q in inputs {
        out = out.iter().flat_map(|a| [a * q.0, a * q.1]).collect();
    }
    out
}

pub fn norm_sqr(v: &[C]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

pub fn normalized(v: &[C]) -> Vec<C> {
    let k = norm_sqr(v).sqrt();
    v.iter().map(|a| a / k).collect()
}

pub fn fidelity(a: &[C], b: &[C]) -> f64 {
    let ip: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    ip.norm_sqr() / (norm_sqr(a) * norm_sqr(b))
}

/// Whole reference pipeline for one tuple: branch, cascade, corrections.
/// Returns (probability, corrected receiver state).
pub fn reference_run(inputs: &[(C, C)], outcomes: &[usize], entangled: bool) -> (f64, Vec<C>) {
    let branch = receiver_branch(inputs, outcomes, entangled);
    let p = norm_sqr(&branch);
    let mut s = normalized(&branch);
    if entangled {
        s = cascade(&s);
    }
    for (i, &o) in outcomes.iter().enumerate() {
        s = pauli(&s, i + 1, correction_letter(o));
    }
    (p, s)
}

pub fn tuple(index: usize, n: usize) -> Vec<usize> {
    (0..n).map(|i| (index >> (2 * (n - 1 - i))) & 3).collect()
}

pub fn as_pairs(inputs: &[aon_teleport::InputQubitF64]) -> Vec<(C, C)> {
    inputs.iter().map(|q| (q.a, q.b)).collect()
}
