//! Brute-force checks that do not trust any single protocol run: every
//! outcome tuple is walked explicitly, and receiver states are averaged over
//! outcomes to test what the receiver can and cannot learn.
//!
//! All walks go through the same outcome tree: sender 1's four branches,
//! each split into sender 2's four, and so on. Leaves come out in
//! lexicographic (φ⁺, φ⁻, ψ⁺, ψ⁻) order whatever the thread schedule, and
//! sums over leaves are folded sequentially in that order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelKind;
use crate::error::{arg_err, Error, Result};
pub use crate::protocol::generic_inputs;
use crate::protocol::{correction_for, target_state, InputQubit, JointRegister, MeasureChoice, PauliOp, PauliString, QubitRole, Teleportation};
use crate::statevector::{BellOutcome, DensityMatrix, StateVector};
use crate::Scalar;

/// Largest N for exhaustive or sampled outcome runs (3N = 21 qubits).
pub const MAX_ENUMERATION_SENDERS: usize = 7;
/// Largest N for outcome-averaged density matrices.
pub const MAX_AVERAGE_SENDERS: usize = 6;

/// Tree levels that fan out over threads; deeper levels run sequentially.
const PARALLEL_DEPTH: usize = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct OutcomeReport<T> {
    pub outcomes: Vec<BellOutcome>,
    pub probability: T,
    /// `None` for zero-probability tuples.
    pub fidelity: Option<T>,
    pub correction: PauliString,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct Enumeration<T> {
    pub senders: usize,
    pub channel_kind: ChannelKind,
    pub reports: Vec<OutcomeReport<T>>,
    pub min_fidelity: Option<T>,
    pub max_fidelity: Option<T>,
    pub probability_sum: T,
}

impl<T: Scalar> Enumeration<T> {
    fn from_reports(senders: usize, channel_kind: ChannelKind, reports: Vec<OutcomeReport<T>>) -> Self {
        let fids = reports.iter().filter_map(|r| r.fidelity);
        let min_fidelity = fids.clone().reduce(T::min);
        let max_fidelity = fids.reduce(T::max);
        let probability_sum = reports.iter().fold(T::zero(), |acc, r| acc + r.probability);
        Enumeration { senders, channel_kind, reports, min_fidelity, max_fidelity, probability_sum }
    }
}

/// A leaf of the outcome tree. `register` is `None` below a zero-probability
/// branch.
struct Leaf<T> {
    outcomes: Vec<BellOutcome>,
    probability: T,
    register: Option<JointRegister<T>>,
}

fn walk<T: Scalar>(
    reg: Option<JointRegister<T>>,
    senders: &[usize],
    prefix: Vec<BellOutcome>,
    probability: T,
) -> Result<Vec<Leaf<T>>> {
    let Some((&sender, rest)) = senders.split_first() else {
        return Ok(vec![Leaf { outcomes: prefix, probability, register: reg }]);
    };
    let branch = |o: BellOutcome| -> Result<Vec<Leaf<T>>> {
        let mut prefix = prefix.clone();
        prefix.push(o);
        let Some(mut reg) = reg.clone() else {
            return walk(None, rest, prefix, T::zero());
        };
        let m = reg.sender_measure(sender, MeasureChoice::Forced(o))?;
        if m.collapsed {
            walk(Some(reg), rest, prefix, probability * m.probability)
        } else {
            walk(None, rest, prefix, T::zero())
        }
    };
    let depth = prefix.len();
    let children: Vec<Vec<Leaf<T>>> = if depth < PARALLEL_DEPTH {
        BellOutcome::ALL.par_iter().map(|&o| branch(o)).collect::<Result<_>>()?
    } else {
        BellOutcome::ALL.iter().map(|&o| branch(o)).collect::<Result<_>>()?
    };
    Ok(children.into_iter().flatten().collect())
}

fn check_size(n: usize, max: usize) -> Result<()> {
    if n == 0 {
        return Err(arg_err!("at least one sender is required"));
    }
    if n > max {
        return Err(Error::Resource(format!("{n} senders exceeds the limit of {max} for this computation")));
    }
    Ok(())
}

/// Every one of the 4^N outcome tuples, each run through the receiver's
/// cascade and correction and scored against ⊗ inputs.
pub fn enumerate_all_outcomes<T: Scalar>(inputs: &[InputQubit<T>], kind: ChannelKind) -> Result<Enumeration<T>> {
    let n = inputs.len();
    check_size(n, MAX_ENUMERATION_SENDERS)?;
    let tele = Teleportation::new(inputs, kind)?;
    let senders: Vec<usize> = (1..=n).collect();
    let leaves = walk(Some(tele.joint().clone()), &senders, vec![], T::one())?;
    let reports = leaves
        .into_par_iter()
        .map(|leaf| match leaf.register {
            Some(reg) => {
                let t = tele.finish(reg, &leaf.outcomes, leaf.probability)?;
                Ok(OutcomeReport {
                    correction: t.correction.unwrap_or_else(|| correction_for(&leaf.outcomes)),
                    outcomes: leaf.outcomes,
                    probability: leaf.probability,
                    fidelity: t.fidelity,
                })
            }
            None => Ok(OutcomeReport {
                correction: correction_for(&leaf.outcomes),
                outcomes: leaf.outcomes,
                probability: T::zero(),
                fidelity: None,
            }),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Enumeration::from_reports(n, tele.layout().kind(), reports))
}

/// `samples` outcome tuples drawn uniformly (with replacement) from a seeded
/// stream, each run as a forced-outcome protocol. Reports keep draw order.
pub fn sample_outcomes<T: Scalar>(
    inputs: &[InputQubit<T>],
    kind: ChannelKind,
    samples: usize,
    seed: u64,
) -> Result<Enumeration<T>> {
    let n = inputs.len();
    check_size(n, MAX_ENUMERATION_SENDERS)?;
    let tele = Teleportation::new(inputs, kind)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<usize> = (0..samples).map(|_| rng.random_range(0..1usize << (2 * n))).collect();
    let reports = picks
        .into_par_iter()
        .map(|k| {
            let outcomes = BellOutcome::tuple_from_index(k, n);
            let t = tele.run_forced(&outcomes)?;
            Ok(OutcomeReport {
                correction: t.correction.unwrap_or_else(|| correction_for(&outcomes)),
                outcomes,
                probability: t.outcome_probability,
                fidelity: t.fidelity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Enumeration::from_reports(n, tele.layout().kind(), reports))
}

/// Exact Bell-outcome distribution of each sender on the prepared joint
/// state, before anyone has measured.
pub fn sender_outcome_marginals<T: Scalar>(inputs: &[InputQubit<T>], kind: ChannelKind) -> Result<Vec<[T; 4]>> {
    let tele = Teleportation::new(inputs, kind)?;
    (1..=inputs.len()).map(|i| tele.joint().outcome_distribution(i)).collect()
}

/// Σ p(outcomes)·|χ⟩⟨χ| over the receiver's states straight after all
/// measurements, before cascade and correction: what the receiver holds
/// without the broadcast.
pub fn average_receiver_state<T: Scalar>(inputs: &[InputQubit<T>], kind: ChannelKind) -> Result<DensityMatrix<T>> {
    let n = inputs.len();
    check_size(n, MAX_AVERAGE_SENDERS)?;
    let tele = Teleportation::new(inputs, kind)?;
    let senders: Vec<usize> = (1..=n).collect();
    let mut rho = DensityMatrix::zeros(n);
    for leaf in walk(Some(tele.joint().clone()), &senders, vec![], T::one())? {
        if let Some(reg) = leaf.register {
            rho.add_pure(&reg.into_receiver_state()?, leaf.probability);
        }
    }
    Ok(rho)
}

/// What happens to a withholding sender's qubits.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WithheldModel {
    /// The sender never measures; Aₖ and channel qubit k are traced out.
    #[default]
    TraceOut,
    /// The sender measures but never broadcasts; the receiver averages over
    /// the unknown outcome.
    MeasureNoBroadcast,
}

impl WithheldModel {
    pub const ALL: [WithheldModel; 2] = [WithheldModel::TraceOut, WithheldModel::MeasureNoBroadcast];

    pub fn token(self) -> &'static str {
        match self {
            WithheldModel::TraceOut => "trace-out",
            WithheldModel::MeasureNoBroadcast => "measure-no-broadcast",
        }
    }
}

impl fmt::Display for WithheldModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

impl FromStr for WithheldModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.token() == s)
            .ok_or_else(|| arg_err!("unknown withheld model {s:?}; expected trace-out or measure-no-broadcast"))
    }
}

/// Receiver's N-qubit state when some senders withhold, with the cascade
/// not applied. Two brackets are reported: participants' per-qubit
/// corrections applied (the best the receiver can do qubit by qubit) and no
/// corrections at all.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct WithheldAnalysis<T> {
    pub senders: usize,
    pub channel_kind: ChannelKind,
    pub withheld: Vec<usize>,
    pub model: WithheldModel,
    pub corrected: DensityMatrix<T>,
    pub uncorrected: DensityMatrix<T>,
    /// Fidelity of the whole register against ⊗ inputs.
    pub joint_fidelity_corrected: T,
    pub joint_fidelity_uncorrected: T,
    /// Fidelity of receiver qubit N+i's marginal against input i.
    pub per_qubit_fidelity_corrected: Vec<T>,
    pub per_qubit_fidelity_uncorrected: Vec<T>,
}

impl<T: Scalar> WithheldAnalysis<T> {
    /// Participants' per-qubit fidelities after correction.
    pub fn participant_fidelities(&self) -> Vec<(usize, T)> {
        (1..=self.senders)
            .filter(|i| !self.withheld.contains(i))
            .map(|i| (i, self.per_qubit_fidelity_corrected[i - 1]))
            .collect()
    }
}

fn validate_withheld(n: usize, withheld: &[usize]) -> Result<Vec<usize>> {
    let mut w = withheld.to_vec();
    w.sort_unstable();
    w.dedup();
    if w.len() != withheld.len() {
        return Err(arg_err!("withheld senders {withheld:?} contain duplicates"));
    }
    if w.is_empty() {
        return Err(arg_err!("no sender is withheld"));
    }
    if let Some(&bad) = w.iter().find(|&&i| i == 0 || i > n) {
        return Err(arg_err!("withheld sender {bad} out of range 1..={n}"));
    }
    if w.len() == n {
        return Err(arg_err!("every sender is withheld; there is no protocol activity to evaluate"));
    }
    Ok(w)
}

pub fn withheld_participation_state<T: Scalar>(
    inputs: &[InputQubit<T>],
    kind: ChannelKind,
    withheld: &[usize],
    model: WithheldModel,
) -> Result<WithheldAnalysis<T>> {
    let n = inputs.len();
    check_size(n, MAX_AVERAGE_SENDERS)?;
    let withheld = validate_withheld(n, withheld)?;
    let tele = Teleportation::new(inputs, kind)?;
    let measuring: Vec<usize> = match model {
        WithheldModel::TraceOut => (1..=n).filter(|i| !withheld.contains(i)).collect(),
        WithheldModel::MeasureNoBroadcast => (1..=n).collect(),
    };
    let leaves = walk(Some(tele.joint().clone()), &measuring, vec![], T::one())?;
    let parts = leaves
        .into_par_iter()
        .filter_map(|leaf| leaf.register.map(|reg| (leaf.outcomes, leaf.probability, reg)))
        .map(|(outcomes, p, reg)| {
            let keep = reg.receiver_positions();
            let plain = reg.state().reduced_density(&keep)?;
            let mut fixed = reg.state().clone();
            for (&sender, &o) in measuring.iter().zip(&outcomes) {
                let op = PauliOp::for_outcome(o);
                if withheld.contains(&sender) || op == PauliOp::I {
                    continue;
                }
                let pos = reg
                    .position(QubitRole::Receiver(sender))
                    .ok_or_else(|| Error::State(format!("receiver qubit {} missing", n + sender)))?;
                fixed.apply_1q_mut(pos, &op.gate())?;
            }
            Ok((p, plain, fixed.reduced_density(&keep)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (mut corrected, mut uncorrected) = (DensityMatrix::zeros(n), DensityMatrix::zeros(n));
    for (p, plain, fixed) in &parts {
        uncorrected.add_scaled(plain, *p);
        corrected.add_scaled(fixed, *p);
    }
    let target = target_state(inputs)?;
    let per_qubit = |rho: &DensityMatrix<T>| -> Result<Vec<T>> {
        (1..=n).map(|i| rho.reduce(&[i])?.fidelity_with_pure(&inputs[i - 1].state())).collect()
    };
    Ok(WithheldAnalysis {
        senders: n,
        channel_kind: tele.layout().kind(),
        withheld,
        model,
        joint_fidelity_corrected: corrected.fidelity_with_pure(&target)?,
        joint_fidelity_uncorrected: uncorrected.fidelity_with_pure(&target)?,
        per_qubit_fidelity_corrected: per_qubit(&corrected)?,
        per_qubit_fidelity_uncorrected: per_qubit(&uncorrected)?,
        corrected,
        uncorrected,
    })
}

/// Receiver's first N−1 qubits after every sender has broadcast, when the
/// last receiver qubit is out of reach (so no cascade).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct StolenQubitAnalysis<T> {
    pub senders: usize,
    pub channel_kind: ChannelKind,
    /// Outcome-averaged state of qubits N+1..2N−1 with their corrections
    /// applied.
    pub remaining: DensityMatrix<T>,
    /// Against the product of inputs 1..N−1.
    pub fidelity: T,
    pub per_qubit_fidelity: Vec<T>,
}

pub fn stolen_last_qubit_state<T: Scalar>(inputs: &[InputQubit<T>], kind: ChannelKind) -> Result<StolenQubitAnalysis<T>> {
    let n = inputs.len();
    check_size(n, MAX_AVERAGE_SENDERS)?;
    if n < 2 {
        return Err(arg_err!("need at least two senders to keep anything without the last qubit"));
    }
    let tele = Teleportation::new(inputs, kind)?;
    let senders: Vec<usize> = (1..=n).collect();
    let keep: Vec<usize> = (1..n).collect();
    let mut remaining = DensityMatrix::zeros(n - 1);
    for leaf in walk(Some(tele.joint().clone()), &senders, vec![], T::one())? {
        let Some(reg) = leaf.register else { continue };
        let mut s: StateVector<T> = reg.into_receiver_state()?;
        for (i, &o) in leaf.outcomes[..n - 1].iter().enumerate() {
            s.apply_1q_mut(i + 1, &PauliOp::for_outcome(o).gate())?;
        }
        remaining.add_scaled(&s.reduced_density(&keep)?, leaf.probability);
    }
    let target = target_state(&inputs[..n - 1])?;
    let per_qubit_fidelity = keep
        .iter()
        .map(|&i| remaining.reduce(&[i])?.fidelity_with_pure(&inputs[i - 1].state()))
        .collect::<Result<_>>()?;
    Ok(StolenQubitAnalysis {
        senders: n,
        channel_kind: tele.layout().kind(),
        fidelity: remaining.fidelity_with_pure(&target)?,
        per_qubit_fidelity,
        remaining,
    })
}
