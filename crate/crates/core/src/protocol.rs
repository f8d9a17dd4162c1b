//! The teleportation pipeline.
//!
//! Register layout after [`prepare_joint_state`]: input qubit Aᵢ at position
//! i, channel qubits at N+1..3N. Sender i Bell-measures (Aᵢ, channel qubit i);
//! measured pairs are removed, so after all N measurements the register holds
//! exactly the receiver's N qubits. The receiver then runs the CNOT cascade
//! (entangled channel only) and applies the per-qubit Pauli correction.

use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelKind, ChannelLayout};
use crate::error::{arg_err, Error, Result};
use crate::statevector::{fidelity_mod_phase, BellOutcome, Gate1Q, StateVector};
use crate::Scalar;

/// Largest sender count accepted by [`generate_correction_table`].
pub const MAX_TABLE_SENDERS: usize = 6;

/// A sender's qubit a|0⟩ + b|1⟩.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct InputQubit<T> {
    pub a: Complex<T>,
    pub b: Complex<T>,
}

impl<T: Scalar> InputQubit<T> {
    pub fn new(a: Complex<T>, b: Complex<T>) -> Result<Self> {
        let norm = a.norm_sqr() + b.norm_sqr();
        if (norm - T::one()).abs() > T::norm_tol() {
            return Err(arg_err!("input qubit is not normalized: |a|² + |b|² = {norm}"));
        }
        Ok(InputQubit { a, b })
    }

    /// cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        let (s, c) = (theta / 2.0).sin_cos();
        let b = Complex::from_polar(s, phi);
        InputQubit {
            a: Complex::new(T::of(c), T::zero()),
            b: Complex::new(T::of(b.re), T::of(b.im)),
        }
    }

    /// |0⟩ or |1⟩; used to encode no/yes votes.
    pub fn basis(bit: bool) -> Self {
        let (o, l) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
        if bit {
            InputQubit { a: o, b: l }
        } else {
            InputQubit { a: l, b: o }
        }
    }

    /// Draws a qubit uniformly on the Bloch sphere, rejecting points with
    /// |cos θ| > 0.95 so that no input sits near a computational basis state.
    pub fn random_generic<R: Rng>(rng: &mut R) -> Self {
        loop {
            let z: f64 = rng.random_range(-1.0..1.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            if z.abs() <= 0.95 {
                return Self::from_bloch(z.acos(), phi);
            }
        }
    }

    pub fn state(&self) -> StateVector<T> {
        StateVector::from_raw(1, vec![self.a, self.b])
    }
}

/// `n` generic inputs from a seeded stream (see [`InputQubit::random_generic`]).
pub fn generic_inputs<T: Scalar>(n: usize, seed: u64) -> Vec<InputQubit<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| InputQubit::random_generic(&mut rng)).collect()
}

/// ⊗ᵢ(aᵢ|0⟩ + bᵢ|1⟩), the state the receiver should end up holding.
pub fn target_state<T: Scalar>(inputs: &[InputQubit<T>]) -> Result<StateVector<T>> {
    inputs.iter().try_fold(StateVector::scalar_one(), |acc, q| acc.tensor(&q.state()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PauliOp {
    I,
    X,
    Y,
    Z,
}

impl PauliOp {
    /// Correction that undoes the receiver-side branch of a Bell outcome:
    /// φ⁺ → I, φ⁻ → Z, ψ⁺ → X, ψ⁻ → Y.
    pub fn for_outcome(o: BellOutcome) -> Self {
        match o {
            BellOutcome::PhiPlus => PauliOp::I,
            BellOutcome::PhiMinus => PauliOp::Z,
            BellOutcome::PsiPlus => PauliOp::X,
            BellOutcome::PsiMinus => PauliOp::Y,
        }
    }

    pub fn gate<T: Scalar>(self) -> Gate1Q<T> {
        match self {
            PauliOp::I => Gate1Q::identity(),
            PauliOp::X => Gate1Q::pauli_x(),
            PauliOp::Y => Gate1Q::pauli_y(),
            PauliOp::Z => Gate1Q::pauli_z(),
        }
    }

    fn letter(self) -> char {
        match self {
            PauliOp::I => 'I',
            PauliOp::X => 'X',
            PauliOp::Y => 'Y',
            PauliOp::Z => 'Z',
        }
    }

    fn from_letter(c: char) -> Option<Self> {
        match c.to_ascii_uppercase() {
            'I' => Some(PauliOp::I),
            'X' => Some(PauliOp::X),
            'Y' => Some(PauliOp::Y),
            'Z' => Some(PauliOp::Z),
            _ => None,
        }
    }
}

/// One Pauli per receiver qubit; entry i acts on receiver qubit N+i.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PauliString(Vec<PauliOp>);

impl PauliString {
    pub fn new(ops: Vec<PauliOp>) -> Self {
        PauliString(ops)
    }

    pub fn identity(n: usize) -> Self {
        PauliString(vec![PauliOp::I; n])
    }

    pub fn ops(&self) -> &[PauliOp] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == PauliOp::I)
    }

    /// Non-identity factors with the receiver's qubit labels, e.g. `Z3 X4`
    /// for N = 2; `I` when there are none.
    pub fn labeled(&self) -> String {
        let n = self.0.len();
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &p)| p != PauliOp::I)
            .map(|(i, p)| format!("{}{}", p.letter(), n + i + 1))
            .collect();
        if parts.is_empty() {
            "I".into()
        } else {
            parts.join(" ")
        }
    }

    /// Same as [`labeled`](Self::labeled) in σ notation, e.g. `σz³σx⁴`.
    pub fn sigma_notation(&self) -> String {
        const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
        let n = self.0.len();
        let mut out = String::new();
        for (i, p) in self.0.iter().enumerate().filter(|(_, &p)| p != PauliOp::I) {
            out.push('σ');
            out.push(p.letter().to_ascii_lowercase());
            for d in (n + i + 1).to_string().chars() {
                out.push(SUP[d.to_digit(10).unwrap_or(0) as usize]);
            }
        }
        if out.is_empty() {
            "I".into()
        } else {
            out
        }
    }

    /// Parses the [`labeled`](Self::labeled) form for `n` senders.
    pub fn parse_labeled(s: &str, n: usize) -> Result<Self> {
        let mut ops = vec![PauliOp::I; n];
        for tok in s.split_whitespace() {
            if tok == "I" {
                continue;
            }
            let mut chars = tok.chars();
            let op = chars
                .next()
                .and_then(PauliOp::from_letter)
                .ok_or_else(|| arg_err!("bad Pauli factor {tok:?}"))?;
            let label: usize = chars.as_str().parse().map_err(|_| arg_err!("bad qubit label in {tok:?}"))?;
            if label <= n || label > 2 * n {
                return Err(arg_err!("qubit label {label} is not a receiver qubit for N = {n}"));
            }
            if ops[label - n - 1] != PauliOp::I {
                return Err(arg_err!("qubit {label} appears twice in {s:?}"));
            }
            ops[label - n - 1] = op;
        }
        Ok(PauliString(ops))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.labeled())
    }
}

/// What currently sits at a register position.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitRole {
    /// Sender i's qubit to be teleported.
    Input(usize),
    /// Sender i's half of the channel (channel qubit i).
    SenderChannel(usize),
    /// Receiver's channel qubit N+i.
    Receiver(usize),
}

/// How a sender's Bell outcome is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeasureChoice {
    Forced(BellOutcome),
    /// Sample from the exact outcome distribution using this uniform variate
    /// in [0, 1).
    Sample(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SenderMeasurement<T> {
    pub outcome: BellOutcome,
    pub probability: T,
    /// `false` when a forced outcome had zero probability; the register is
    /// left untouched in that case.
    pub collapsed: bool,
}

/// The 3N-qubit joint register with role bookkeeping, so that senders and
/// the receiver can address their qubits as measured pairs disappear.
#[derive(Clone, Debug)]
pub struct JointRegister<T> {
    state: StateVector<T>,
    roles: Vec<QubitRole>,
    measured: Vec<bool>,
}

impl<T: Scalar> JointRegister<T> {
    pub fn prepare(inputs: &[InputQubit<T>], channel: &StateVector<T>) -> Result<Self> {
        let n = inputs.len();
        let state = prepare_joint_state(inputs, channel)?;
        let roles = (1..=n)
            .map(QubitRole::Input)
            .chain((1..=n).map(QubitRole::SenderChannel))
            .chain((1..=n).map(QubitRole::Receiver))
            .collect();
        Ok(JointRegister { state, roles, measured: vec![false; n] })
    }

    /// A register with explicit roles, e.g. partway through a protocol. A
    /// sender whose `Input` role is absent counts as having measured.
    pub fn from_parts(state: StateVector<T>, roles: Vec<QubitRole>) -> Result<Self> {
        if roles.len() != state.num_qubits() {
            return Err(arg_err!("{} roles for {} qubits", roles.len(), state.num_qubits()));
        }
        let n = roles.iter().filter(|r| matches!(r, QubitRole::Receiver(_))).count();
        for (i, r) in roles.iter().enumerate() {
            let id = match *r {
                QubitRole::Input(k) | QubitRole::SenderChannel(k) | QubitRole::Receiver(k) => k,
            };
            if id == 0 || id > n || roles[..i].contains(r) {
                return Err(arg_err!("role {r:?} is out of range or repeated"));
            }
        }
        for k in 1..=n {
            let a = roles.contains(&QubitRole::Input(k));
            if a != roles.contains(&QubitRole::SenderChannel(k)) {
                return Err(arg_err!("sender {k} holds only one of its two qubits"));
            }
        }
        let measured = (1..=n).map(|k| !roles.contains(&QubitRole::Input(k))).collect();
        Ok(JointRegister { state, roles, measured })
    }

    pub fn senders(&self) -> usize {
        self.measured.len()
    }

    pub fn state(&self) -> &StateVector<T> {
        &self.state
    }

    pub fn roles(&self) -> &[QubitRole] {
        &self.roles
    }

    /// 1-based register position of a role, if it is still present.
    pub fn position(&self, role: QubitRole) -> Option<usize> {
        self.roles.iter().position(|&r| r == role).map(|p| p + 1)
    }

    pub fn has_measured(&self, sender: usize) -> bool {
        sender >= 1 && self.measured.get(sender - 1).copied().unwrap_or(false)
    }

    /// Positions of receiver qubits N+1..2N, in order.
    pub fn receiver_positions(&self) -> Vec<usize> {
        (1..=self.senders()).filter_map(|i| self.position(QubitRole::Receiver(i))).collect()
    }

    fn sender_pair(&self, sender: usize) -> Result<(usize, usize)> {
        if sender == 0 || sender > self.senders() {
            return Err(arg_err!("sender {sender} out of range 1..={}", self.senders()));
        }
        if self.has_measured(sender) {
            return Err(Error::State(format!(
                "sender {sender} has already measured; its channel qubit is no longer entangled"
            )));
        }
        let a = self.position(QubitRole::Input(sender));
        let c = self.position(QubitRole::SenderChannel(sender));
        match (a, c) {
            (Some(a), Some(c)) => Ok((a, c)),
            _ => Err(Error::State(format!("sender {sender}'s qubits are not in the register"))),
        }
    }

    /// Exact outcome probabilities for sender i, in [`BellOutcome::ALL`] order.
    pub fn outcome_distribution(&self, sender: usize) -> Result<[T; 4]> {
        let (a, c) = self.sender_pair(sender)?;
        self.state.bell_probabilities(a, c)
    }

    /// Sender i's Bell measurement on (Aᵢ, channel qubit i). The pair is
    /// removed from the register.
    pub fn sender_measure(&mut self, sender: usize, choice: MeasureChoice) -> Result<SenderMeasurement<T>> {
        let (a, c) = self.sender_pair(sender)?;
        let outcome = match choice {
            MeasureChoice::Forced(o) => o,
            MeasureChoice::Sample(u) => {
                let probs = self.state.bell_probabilities(a, c)?;
                sample_outcome(&probs, u)
            }
        };
        let (probability, post) = self.state.bell_project(a, c, outcome)?;
        let Some(post) = post else {
            return Ok(SenderMeasurement { outcome, probability, collapsed: false });
        };
        self.state = post;
        self.roles.retain(|&r| r != QubitRole::Input(sender) && r != QubitRole::SenderChannel(sender));
        self.measured[sender - 1] = true;
        Ok(SenderMeasurement { outcome, probability, collapsed: true })
    }

    /// The receiver's N qubits once every sender has measured.
    pub fn into_receiver_state(self) -> Result<StateVector<T>> {
        if self.measured.iter().any(|m| !m) {
            return Err(Error::ProtocolIncomplete("not every sender has measured".into()));
        }
        Ok(self.state)
    }
}

fn sample_outcome<T: Scalar>(probs: &[T; 4], u: f64) -> BellOutcome {
    let mut acc = 0.0;
    let mut last = BellOutcome::PhiPlus;
    for (o, p) in BellOutcome::ALL.iter().zip(probs) {
        let p = p.as_f64();
        if p < T::ZERO_PROB {
            continue;
        }
        acc += p;
        last = *o;
        if u < acc {
            return *o;
        }
    }
    last
}

/// ⊗ᵢ inputs ⊗ channel: inputs at positions 1..N, channel at N+1..3N.
pub fn prepare_joint_state<T: Scalar>(inputs: &[InputQubit<T>], channel: &StateVector<T>) -> Result<StateVector<T>> {
    let n = inputs.len();
    if n == 0 {
        return Err(arg_err!("at least one input qubit is required"));
    }
    if channel.num_qubits() != 2 * n {
        return Err(arg_err!("{n} inputs need a {}-qubit channel, got {} qubits", 2 * n, channel.num_qubits()));
    }
    for (i, q) in inputs.iter().enumerate() {
        InputQubit::new(q.a, q.b).map_err(|e| arg_err!("input {}: {e}", i + 1))?;
    }
    target_state(inputs)?.tensor(channel)
}

/// CNOTs from receiver qubits 1..N−1 onto receiver qubit N. Identity for N = 1.
pub fn receiver_cnot_cascade<T: Scalar>(s: &StateVector<T>) -> Result<StateVector<T>> {
    let n = s.num_qubits();
    if n == 0 {
        return Err(arg_err!("the receiver register is empty"));
    }
    let mut out = s.clone();
    for control in 1..n {
        out.apply_cnot_mut(control, n)?;
    }
    Ok(out)
}

pub fn correction_for(outcomes: &[BellOutcome]) -> PauliString {
    PauliString(outcomes.iter().map(|&o| PauliOp::for_outcome(o)).collect())
}

pub fn apply_correction<T: Scalar>(s: &StateVector<T>, p: &PauliString) -> Result<StateVector<T>> {
    if s.num_qubits() != p.len() {
        return Err(arg_err!("{}-qubit correction for a {}-qubit register", p.len(), s.num_qubits()));
    }
    let mut out = s.clone();
    for (i, op) in p.ops().iter().enumerate().filter(|(_, &op)| op != PauliOp::I) {
        out.apply_1q_mut(i + 1, &op.gate())?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutcomePolicy {
    /// Sample every sender's outcome from a ChaCha8 stream with this seed.
    Seeded(u64),
    /// One outcome per sender, in sender order.
    Forced(Vec<BellOutcome>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Completed,
    /// A forced outcome had probability zero; the branch stops there.
    ZeroProbabilityBranch { sender: usize },
    /// Some senders never broadcast, so the receiver never ran the cascade.
    Withheld { senders: Vec<usize> },
}

/// Record of one protocol run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct Transcript<T> {
    pub senders: usize,
    pub channel_kind: ChannelKind,
    /// `None` once redacted.
    pub inputs: Option<Vec<InputQubit<T>>>,
    /// One slot per sender; `None` where no broadcast happened.
    pub outcomes: Vec<Option<BellOutcome>>,
    /// Product of the measured branch probabilities.
    pub outcome_probability: T,
    pub cascade_applied: bool,
    pub correction: Option<PauliString>,
    /// The receiver's N qubits after cascade and correction.
    pub final_state: Option<StateVector<T>>,
    pub fidelity: Option<T>,
    pub rng_seed: Option<u64>,
    pub status: RunStatus,
}

impl<T: Scalar> Transcript<T> {
    pub fn redacted(mut self) -> Self {
        self.inputs = None;
        self
    }

    pub fn is_complete(&self) -> bool {
        self.status == RunStatus::Completed
    }
}

/// A prepared run: channel and joint state are built once and reused for
/// every outcome policy.
#[derive(Clone, Debug)]
pub struct Teleportation<T> {
    inputs: Vec<InputQubit<T>>,
    layout: ChannelLayout,
    joint: JointRegister<T>,
    target: StateVector<T>,
}

impl<T: Scalar> Teleportation<T> {
    pub fn new(inputs: &[InputQubit<T>], kind: ChannelKind) -> Result<Self> {
        let layout = ChannelLayout::new(inputs.len(), kind)?;
        let channel = layout.build()?;
        let joint = JointRegister::prepare(inputs, &channel)?;
        Ok(Teleportation { inputs: inputs.to_vec(), layout, joint, target: target_state(inputs)? })
    }

    pub fn senders(&self) -> usize {
        self.layout.senders()
    }

    pub fn layout(&self) -> ChannelLayout {
        self.layout
    }

    pub fn inputs(&self) -> &[InputQubit<T>] {
        &self.inputs
    }

    pub fn joint(&self) -> &JointRegister<T> {
        &self.joint
    }

    pub fn target(&self) -> &StateVector<T> {
        &self.target
    }

    pub fn run(&self, policy: &OutcomePolicy) -> Result<Transcript<T>> {
        let n = self.senders();
        match policy {
            OutcomePolicy::Forced(list) => {
                if list.len() != n {
                    return Err(arg_err!("{} forced outcomes for {n} senders", list.len()));
                }
                self.execute(list.iter().map(|&o| MeasureChoice::Forced(o)), None)
            }
            OutcomePolicy::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let draws: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
                self.execute(draws.into_iter().map(MeasureChoice::Sample), Some(*seed))
            }
        }
    }

    pub fn run_forced(&self, outcomes: &[BellOutcome]) -> Result<Transcript<T>> {
        self.run(&OutcomePolicy::Forced(outcomes.to_vec()))
    }

    fn blank_transcript(&self, seed: Option<u64>) -> Transcript<T> {
        Transcript {
            senders: self.senders(),
            channel_kind: self.layout.kind(),
            inputs: Some(self.inputs.clone()),
            outcomes: vec![None; self.senders()],
            outcome_probability: T::zero(),
            cascade_applied: false,
            correction: None,
            final_state: None,
            fidelity: None,
            rng_seed: seed,
            status: RunStatus::Completed,
        }
    }

    fn execute(&self, choices: impl Iterator<Item = MeasureChoice>, seed: Option<u64>) -> Result<Transcript<T>> {
        let mut reg = self.joint.clone();
        let mut outcomes = Vec::with_capacity(self.senders());
        let mut probability = T::one();
        for (sender, choice) in (1..=self.senders()).zip(choices) {
            let m = reg.sender_measure(sender, choice)?;
            outcomes.push(m.outcome);
            if !m.collapsed {
                let mut t = self.blank_transcript(seed);
                for (slot, o) in t.outcomes.iter_mut().zip(&outcomes) {
                    *slot = Some(*o);
                }
                t.status = RunStatus::ZeroProbabilityBranch { sender };
                return Ok(t);
            }
            probability *= m.probability;
        }
        let mut t = self.finish(reg, &outcomes, probability)?;
        t.rng_seed = seed;
        Ok(t)
    }

    /// Receiver side once every sender in `reg` has measured with the given
    /// outcomes: cascade (entangled channel), correction, fidelity.
    pub fn finish(&self, reg: JointRegister<T>, outcomes: &[BellOutcome], probability: T) -> Result<Transcript<T>> {
        if outcomes.len() != self.senders() {
            return Err(arg_err!("{} outcomes for {} senders", outcomes.len(), self.senders()));
        }
        let mut t = self.blank_transcript(None);
        let mut state = reg.into_receiver_state()?;
        if self.layout.kind() == ChannelKind::Entangled {
            state = receiver_cnot_cascade(&state)?;
            t.cascade_applied = true;
        }
        let correction = correction_for(outcomes);
        let state = apply_correction(&state, &correction)?;
        t.fidelity = Some(fidelity_mod_phase(&state, &self.target)?);
        t.final_state = Some(state);
        t.correction = Some(correction);
        t.outcomes = outcomes.iter().map(|&o| Some(o)).collect();
        t.outcome_probability = probability;
        Ok(t)
    }
}

/// Builds the channel, runs all N senders and the receiver, and scores the
/// result against ⊗ inputs.
pub fn run_protocol<T: Scalar>(
    inputs: &[InputQubit<T>],
    kind: ChannelKind,
    policy: &OutcomePolicy,
) -> Result<Transcript<T>> {
    Teleportation::new(inputs, kind)?.run(policy)
}

/// One row of a correction table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct CorrectionRow<T> {
    pub outcomes: Vec<BellOutcome>,
    pub correction: PauliString,
    /// Receiver's state after the cascade and before correction, symbolically.
    pub post_cascade_state: String,
    /// Fidelity reached by this row's correction on the verification inputs.
    pub fidelity: T,
}

/// Symbolic post-cascade receiver state for an outcome tuple, e.g.
/// `[a1|0⟩ − b1|1⟩]₃ ⊗ [a2|1⟩ + b2|0⟩]₄`.
pub fn describe_post_cascade_state(outcomes: &[BellOutcome]) -> String {
    let n = outcomes.len();
    outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let k = i + 1;
            let body = match o {
                BellOutcome::PhiPlus => format!("a{k}|0⟩ + b{k}|1⟩"),
                BellOutcome::PhiMinus => format!("a{k}|0⟩ − b{k}|1⟩"),
                BellOutcome::PsiPlus => format!("a{k}|1⟩ + b{k}|0⟩"),
                BellOutcome::PsiMinus => format!("a{k}|1⟩ − b{k}|0⟩"),
            };
            format!("[{body}]_{}", n + k)
        })
        .collect::<Vec<_>>()
        .join(" ⊗ ")
}

/// Seed of the fixed inputs every generated table row is verified on.
pub const TABLE_VERIFICATION_SEED: u64 = 0x7ab1e;

/// All 4^N rows, outcomes in lexicographic (φ⁺, φ⁻, ψ⁺, ψ⁻) order. Each row's
/// correction is checked numerically on the entangled channel before it is
/// emitted; a row that does not reach fidelity 1 is an error.
pub fn generate_correction_table<T: Scalar>(n: usize) -> Result<Vec<CorrectionRow<T>>> {
    if n == 0 || n > MAX_TABLE_SENDERS {
        return Err(arg_err!("table size must be 1..={MAX_TABLE_SENDERS} senders, got {n}"));
    }
    let inputs = generic_inputs::<T>(n, TABLE_VERIFICATION_SEED);
    let tele = Teleportation::new(&inputs, ChannelKind::Entangled)?;
    let tol = T::norm_tol();
    (0..1usize << (2 * n))
        .into_par_iter()
        .map(|k| {
            let outcomes = BellOutcome::tuple_from_index(k, n);
            let t = tele.run_forced(&outcomes)?;
            let fidelity = t.fidelity.ok_or_else(|| Error::Verification(format!("{outcomes:?} did not complete")))?;
            if (fidelity - T::one()).abs() > tol {
                return Err(Error::Verification(format!(
                    "correction for {outcomes:?} reaches fidelity {fidelity}, not 1"
                )));
            }
            Ok(CorrectionRow {
                correction: correction_for(&outcomes),
                post_cascade_state: describe_post_cascade_state(&outcomes),
                outcomes,
                fidelity,
            })
        })
        .collect()
}
