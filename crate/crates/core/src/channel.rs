//! Channel construction.
//!
//! The product channel is N copies of φ⁺ with pair i on qubits (i, N+i):
//! senders hold qubits 1..N, the receiver N+1..2N. The entangled channel
//! applies CNOTs from qubits 1..N−1 onto qubit 2N, so that in every term
//! bit 2N equals bit N XOR the parity of bits 1..N−1.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Error, Result};
use crate::statevector::StateVector;
use crate::Scalar;

/// Largest sender count for which channels are built (3N = 30 qubits is the
/// engine's ceiling once inputs are attached).
pub const MAX_SENDERS: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// N independent Bell pairs.
    Product,
    /// Bell pairs plus N−1 CNOTs onto the receiver's last qubit.
    Entangled,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Product => "product",
            ChannelKind::Entangled => "entangled",
        })
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "product" => Ok(ChannelKind::Product),
            "entangled" => Ok(ChannelKind::Entangled),
            other => Err(arg_err!("unknown channel kind {other:?} (expected product or entangled)")),
        }
    }
}

/// Which register positions belong to the senders and which to the receiver.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelLayout {
    senders: usize,
    kind: ChannelKind,
}

impl ChannelLayout {
    /// An entangled layout with a single sender has no CNOTs and is recorded
    /// as a product layout.
    pub fn new(senders: usize, kind: ChannelKind) -> Result<Self> {
        check_senders(senders)?;
        let kind = if senders == 1 { ChannelKind::Product } else { kind };
        Ok(ChannelLayout { senders, kind })
    }

    pub fn senders(&self) -> usize {
        self.senders
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn sender_positions(&self) -> std::ops::RangeInclusive<usize> {
        1..=self.senders
    }

    pub fn receiver_positions(&self) -> std::ops::RangeInclusive<usize> {
        self.senders + 1..=2 * self.senders
    }

    pub fn build<T: Scalar>(&self) -> Result<StateVector<T>> {
        match self.kind {
            ChannelKind::Product => build_product_channel(self.senders),
            ChannelKind::Entangled => build_entangled_channel(self.senders),
        }
    }
}

fn check_senders(n: usize) -> Result<()> {
    if n == 0 {
        return Err(arg_err!("sender count must be at least 1"));
    }
    if n > MAX_SENDERS {
        return Err(Error::Resource(format!("{n} senders exceeds the limit of {MAX_SENDERS}")));
    }
    Ok(())
}

/// ⊗ᵢ φ⁺ on pairs (i, N+i).
pub fn build_product_channel<T: Scalar>(n: usize) -> Result<StateVector<T>> {
    check_senders(n)?;
    let h = Complex::new(T::FRAC_1_SQRT_2(), T::zero());
    let o = Complex::new(T::zero(), T::zero());
    let pair = StateVector::from_raw(2, vec![h, o, o, h]);
    let mut raw = StateVector::scalar_one();
    for _ in 0..n {
        raw = raw.tensor(&pair)?;
    }
    // raw holds pair i on (2i−1, 2i); move those to (i, N+i)
    let perm: Vec<usize> = (1..=n).map(|i| 2 * i - 1).chain((1..=n).map(|i| 2 * i)).collect();
    raw.reorder_qubits(&perm)
}

/// The product channel with CNOTs (controls 1..N−1, target 2N) applied.
pub fn build_entangled_channel<T: Scalar>(n: usize) -> Result<StateVector<T>> {
    if n < 2 {
        return Err(arg_err!("the entangled channel needs at least 2 senders, got {n}"));
    }
    let mut s = build_product_channel(n)?;
    for control in 1..n {
        s.apply_cnot_mut(control, 2 * n)?;
    }
    Ok(s)
}

/// Checks the basis-state pattern of a channel and its uniform amplitude
/// 2^(−N/2).
///
/// Product: bits 1..N equal bits N+1..2N. Entangled: bits 1..N−1 equal bits
/// N+1..2N−1 and bit 2N = bit N ⊕ parity(bits 1..N−1).
pub fn verify_channel_structure<T: Scalar>(s: &StateVector<T>, n: usize, kind: ChannelKind) -> Result<bool> {
    if n == 0 || s.num_qubits() != 2 * n {
        return Err(arg_err!("expected a {}-qubit channel for N = {n}, got {} qubits", 2 * n, s.num_qubits()));
    }
    let expected = T::of(2f64.powf(-(n as f64) / 2.0));
    let tol = T::norm_tol();
    let half = 1usize << n;
    for (index, amp) in s.amplitudes().iter().enumerate() {
        let mag = amp.norm();
        if mag <= tol {
            continue;
        }
        if (amp.re - expected).abs() > tol || amp.im.abs() > tol {
            return Ok(false);
        }
        let (senders, receiver) = (index / half, index % half);
        let ok = match kind {
            ChannelKind::Product => senders == receiver,
            ChannelKind::Entangled => {
                // senders' bits 1..N−1 are the high N−1 bits of the sender half
                let head = senders >> 1;
                let parity = head.count_ones() as usize & 1;
                let last = (senders & 1) ^ parity;
                (receiver >> 1) == head && (receiver & 1) == last
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(s: &StateVector<f64>) -> Vec<String> {
        s.nonzero_terms(1e-12).into_iter().map(|(b, _)| b).collect()
    }

    #[test]
    fn product_channel_examples() {
        let s = build_product_channel::<f64>(1).unwrap();
        assert_eq!(terms(&s), ["00", "11"]);
        let s = build_product_channel::<f64>(2).unwrap();
        assert_eq!(terms(&s), ["0000", "0101", "1010", "1111"]);
        let s = build_product_channel::<f64>(3).unwrap();
        assert_eq!(
            terms(&s),
            ["000000", "001001", "010010", "011011", "100100", "101101", "110110", "111111"]
        );
        let amp = 1.0 / (2.0 * 2f64.sqrt());
        assert!(s.nonzero_terms(1e-12).iter().all(|(_, a)| (a.re - amp).abs() < 1e-15 && a.im == 0.0));
        assert!(matches!(build_product_channel::<f64>(0), Err(Error::Argument(_))));
        assert!(matches!(build_product_channel::<f64>(11), Err(Error::Resource(_))));
    }

    #[test]
    fn entangled_channel_examples() {
        let s = build_entangled_channel::<f64>(2).unwrap();
        assert_eq!(terms(&s), ["0000", "0101", "1011", "1110"]);
        let s = build_entangled_channel::<f64>(3).unwrap();
        let mut t = terms(&s);
        t.sort();
        assert_eq!(t, ["000000", "001001", "010011", "011010", "100101", "101100", "110110", "111111"]);
        assert!(build_entangled_channel::<f64>(1).is_err());
    }

    #[test]
    fn structure_examples() {
        let p2 = build_product_channel::<f64>(2).unwrap();
        assert!(verify_channel_structure(&p2, 2, ChannelKind::Product).unwrap());
        assert!(!verify_channel_structure(&p2, 2, ChannelKind::Entangled).unwrap());
        let e3 = build_entangled_channel::<f64>(3).unwrap();
        assert!(verify_channel_structure(&e3, 3, ChannelKind::Entangled).unwrap());
        assert!(!verify_channel_structure(&e3, 3, ChannelKind::Product).unwrap());
        assert!(verify_channel_structure(&e3, 2, ChannelKind::Entangled).is_err());
    }

    #[test]
    fn structure_rejects_wrong_amplitudes() {
        let mut amps = build_product_channel::<f64>(1).unwrap().amplitudes().to_vec();
        amps[3] = -amps[3];
        let s = StateVector::from_amplitudes(amps).unwrap();
        assert!(!verify_channel_structure(&s, 1, ChannelKind::Product).unwrap());
    }

    #[test]
    fn layout_partitions_register() {
        let l = ChannelLayout::new(3, ChannelKind::Entangled).unwrap();
        let mut all: Vec<usize> = l.sender_positions().chain(l.receiver_positions()).collect();
        all.sort();
        assert_eq!(all, (1..=6).collect::<Vec<_>>());
        assert_eq!(ChannelLayout::new(1, ChannelKind::Entangled).unwrap().kind(), ChannelKind::Product);
        assert!(ChannelLayout::new(0, ChannelKind::Product).is_err());
    }
}
