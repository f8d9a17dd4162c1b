//! Parties on a classical broadcast bus.
//!
//! A scenario is a fixed-order event loop: participating senders measure in
//! index order and publish to the bus as they go; senders withholding under
//! [`WithheldModel::MeasureNoBroadcast`] measure but never publish. The
//! receiver acts only once the bus carries all N messages, which is what
//! makes the protocol all-or-nothing on the entangled channel. With a seeded
//! policy one uniform variate is drawn per sender in index order, so a
//! full-participation scenario reproduces [`run_protocol`] with the same seed.
//!
//! [`run_protocol`]: crate::protocol::run_protocol

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelKind;
use crate::error::{arg_err, Error, Result};
use crate::oracle::{
    average_receiver_state, sender_outcome_marginals, withheld_participation_state, WithheldAnalysis, WithheldModel,
    MAX_AVERAGE_SENDERS,
};
use crate::protocol::{
    generic_inputs, InputQubit, MeasureChoice, OutcomePolicy, RunStatus, Teleportation, Transcript,
};
use crate::statevector::{BellOutcome, DensityMatrix};
use crate::Scalar;

/// Seed for generic inputs when a config does not set one.
pub const DEFAULT_INPUT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Sender(usize),
    Receiver,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Party {
    pub id: usize,
    pub role: Role,
    /// Positions in the freshly prepared 3N-qubit register.
    pub qubits: Vec<usize>,
    pub outcome: Option<BellOutcome>,
    pub participates: bool,
}

fn parties(n: usize, participation: &[bool]) -> Vec<Party> {
    let mut out: Vec<Party> = (1..=n)
        .map(|i| Party {
            id: i,
            role: Role::Sender(i),
            qubits: vec![i, n + i],
            outcome: None,
            participates: participation[i - 1],
        })
        .collect();
    out.push(Party { id: n + 1, role: Role::Receiver, qubits: (2 * n + 1..=3 * n).collect(), outcome: None, participates: true });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BusMessage {
    pub sender: usize,
    pub outcome: BellOutcome,
}

/// Reliable, ordered log of broadcast outcomes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BroadcastBus {
    log: Vec<BusMessage>,
}

impl BroadcastBus {
    pub fn publish(&mut self, sender: usize, outcome: BellOutcome) -> Result<()> {
        if self.outcome_of(sender).is_some() {
            return Err(Error::State(format!("sender {sender} has already broadcast")));
        }
        self.log.push(BusMessage { sender, outcome });
        Ok(())
    }

    pub fn messages(&self) -> &[BusMessage] {
        &self.log
    }

    pub fn outcome_of(&self, sender: usize) -> Option<BellOutcome> {
        self.log.iter().find(|m| m.sender == sender).map(|m| m.outcome)
    }

    pub fn is_complete(&self, senders: usize) -> bool {
        (1..=senders).all(|i| self.outcome_of(i).is_some())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct ScenarioConfig<T> {
    pub senders: usize,
    pub channel_kind: ChannelKind,
    /// One flag per sender.
    pub participation: Vec<bool>,
    pub policy: OutcomePolicy,
    /// Vote mode: sender i teleports |1⟩ for yes, |0⟩ for no.
    pub votes: Option<Vec<bool>>,
    /// Explicit inputs outside vote mode; generic seeded inputs otherwise.
    pub inputs: Option<Vec<InputQubit<T>>>,
    pub input_seed: u64,
    pub withheld_model: WithheldModel,
    /// Leave the vote encoding basis out of the report.
    pub conceal_basis: bool,
}

impl<T: Scalar> ScenarioConfig<T> {
    pub fn new(senders: usize, channel_kind: ChannelKind, policy: OutcomePolicy) -> Self {
        ScenarioConfig {
            senders,
            channel_kind,
            participation: vec![true; senders],
            policy,
            votes: None,
            inputs: None,
            input_seed: DEFAULT_INPUT_SEED,
            withheld_model: WithheldModel::default(),
            conceal_basis: false,
        }
    }

    pub fn with_votes(mut self, votes: Vec<bool>) -> Self {
        self.votes = Some(votes);
        self
    }

    pub fn with_inputs(mut self, inputs: Vec<InputQubit<T>>) -> Self {
        self.inputs = Some(inputs);
        self
    }

    pub fn with_input_seed(mut self, seed: u64) -> Self {
        self.input_seed = seed;
        self
    }

    /// Marks the listed senders (1-based) as not participating.
    pub fn withholding(mut self, senders: &[usize]) -> Self {
        for &i in senders {
            if let Some(flag) = i.checked_sub(1).and_then(|k| self.participation.get_mut(k)) {
                *flag = false;
            }
        }
        self
    }

    pub fn with_withheld_model(mut self, model: WithheldModel) -> Self {
        self.withheld_model = model;
        self
    }

    pub fn concealing_basis(mut self, conceal: bool) -> Self {
        self.conceal_basis = conceal;
        self
    }

    pub fn withheld(&self) -> Vec<usize> {
        (1..=self.senders).filter(|&i| !self.participation.get(i - 1).copied().unwrap_or(true)).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.senders;
        if self.participation.len() != n {
            return Err(arg_err!("participation mask has {} entries for {n} senders", self.participation.len()));
        }
        if !self.participation.iter().any(|&p| p) {
            return Err(arg_err!("participation mask has no participant"));
        }
        if let Some(v) = &self.votes {
            if v.len() != n {
                return Err(arg_err!("{} votes for {n} senders", v.len()));
            }
            if self.inputs.is_some() {
                return Err(arg_err!("explicit inputs and votes are mutually exclusive"));
            }
        }
        if let Some(q) = &self.inputs {
            if q.len() != n {
                return Err(arg_err!("{} inputs for {n} senders", q.len()));
            }
        }
        if let OutcomePolicy::Forced(list) = &self.policy {
            if list.len() != n {
                return Err(arg_err!("{} forced outcomes for {n} senders", list.len()));
            }
        }
        Ok(())
    }

    /// The qubits the senders teleport.
    pub fn resolved_inputs(&self) -> Vec<InputQubit<T>> {
        match (&self.votes, &self.inputs) {
            (Some(v), _) => v.iter().map(|&b| InputQubit::basis(b)).collect(),
            (None, Some(q)) => q.clone(),
            (None, None) => generic_inputs(self.senders, self.input_seed),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub yes: usize,
    pub no: usize,
}

/// Reads each receiver qubit in the computational basis. Votes are basis
/// states, so every readout must be deterministic; a qubit that is not
/// (within tolerance) is a state error rather than a random draw.
pub fn tally_votes<T: Scalar>(t: &Transcript<T>) -> Result<Tally> {
    let s = t
        .final_state
        .as_ref()
        .ok_or_else(|| Error::ProtocolIncomplete("no final state to tally; the protocol did not complete".into()))?;
    let tol = T::of(1e-9);
    let mut tally = Tally { yes: 0, no: 0 };
    for q in 1..=s.num_qubits() {
        let p1 = s.prob_one(q)?;
        if p1 > T::one() - tol {
            tally.yes += 1;
        } else if p1 < tol {
            tally.no += 1;
        } else {
            return Err(Error::State(format!("receiver qubit {q} is not a basis state (P(1) = {p1})")));
        }
    }
    Ok(tally)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleCheck {
    pub rule: u8,
    pub name: String,
    pub passed: bool,
    /// The quantity the verdict rests on.
    pub measured: f64,
    pub detail: String,
}

const RULE_TOL: f64 = 1e-10;

/// Numerical checks for the voting rules that have numerical content:
/// (2) one vote per voter, (3) public outcomes reveal nothing about votes,
/// (4) the receiver cannot attribute votes without the broadcast.
pub fn check_voting_rules<T: Scalar>(config: &ScenarioConfig<T>) -> Result<Vec<RuleCheck>> {
    config.validate()?;
    let n = config.senders;
    if n > MAX_AVERAGE_SENDERS {
        return Err(Error::Resource(format!("voting rule checks are limited to {MAX_AVERAGE_SENDERS} senders")));
    }
    let kind = config.channel_kind;
    let inputs = config.resolved_inputs();
    // a different assignment to compare against: flipped votes, or fresh
    // generic inputs outside vote mode
    let other: Vec<InputQubit<T>> = match &config.votes {
        Some(v) => v.iter().map(|&b| InputQubit::basis(!b)).collect(),
        None => generic_inputs(n, config.input_seed.wrapping_add(1)),
    };
    Ok(vec![
        rule_single_vote(&inputs, kind)?,
        rule_outcomes_hide_votes(&inputs, &other, kind)?,
        rule_no_attribution(&inputs, &other, kind)?,
    ])
}

fn rule_single_vote<T: Scalar>(inputs: &[InputQubit<T>], kind: ChannelKind) -> Result<RuleCheck> {
    let tele = Teleportation::new(inputs, kind)?;
    let n = inputs.len();
    let mut rejected = 0;
    let mut worst = 1.0f64;
    for i in 1..=n {
        let mut reg = tele.joint().clone();
        let o = BellOutcome::ALL[(i - 1) % 4];
        reg.sender_measure(i, MeasureChoice::Forced(o))?;
        if matches!(reg.sender_measure(i, MeasureChoice::Forced(o)), Err(Error::State(_))) {
            rejected += 1;
        }
        // keep the measured pair in place and look at its marginal
        let (_, post) = tele.joint().state().bell_project_keep(i, n + i, o)?;
        if let Some(post) = post {
            let purity = post.reduced_density(&[i, n + i])?.purity().as_f64();
            worst = worst.min(purity);
        }
    }
    let passed = rejected == n && (worst - 1.0).abs() < RULE_TOL;
    Ok(RuleCheck {
        rule: 2,
        name: "each voter votes once".into(),
        passed,
        measured: worst,
        detail: format!(
            "{rejected}/{n} repeated measurements rejected; min purity of a measured sender pair {worst:.12}"
        ),
    })
}

fn rule_outcomes_hide_votes<T: Scalar>(a: &[InputQubit<T>], b: &[InputQubit<T>], kind: ChannelKind) -> Result<RuleCheck> {
    let mut dev = 0.0f64;
    for inputs in [a, b] {
        for m in sender_outcome_marginals(inputs, kind)? {
            for p in m {
                dev = dev.max((p.as_f64() - 0.25).abs());
            }
        }
    }
    Ok(RuleCheck {
        rule: 3,
        name: "broadcast outcomes are independent of votes".into(),
        passed: dev < RULE_TOL,
        measured: dev,
        detail: format!("max |P(outcome) - 1/4| over senders and two vote assignments: {dev:.3e}"),
    })
}

fn rule_no_attribution<T: Scalar>(a: &[InputQubit<T>], b: &[InputQubit<T>], kind: ChannelKind) -> Result<RuleCheck> {
    let (ra, rb) = (average_receiver_state(a, kind)?, average_receiver_state(b, kind)?);
    let mixed = DensityMatrix::maximally_mixed(a.len());
    let diff = ra.max_abs_diff(&rb)?.as_f64().max(ra.max_abs_diff(&mixed)?.as_f64());
    Ok(RuleCheck {
        rule: 4,
        name: "receiver cannot attribute votes before the broadcast".into(),
        passed: diff < RULE_TOL,
        measured: diff,
        detail: format!("max entrywise distance between outcome-averaged receiver states and I/2^N: {diff:.3e}"),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct ScenarioReport<T> {
    pub transcript: Transcript<T>,
    pub parties: Vec<Party>,
    pub bus: BroadcastBus,
    pub joint_fidelity: Option<T>,
    /// Receiver qubit N+i against input i.
    pub per_qubit_fidelity: Vec<T>,
    pub tally: Option<Tally>,
    /// `None` when the basis is concealed or outside vote mode.
    pub vote_basis: Option<String>,
    pub rule_checks: Vec<RuleCheck>,
    /// Outcome-averaged receiver state and fidelities when someone withheld.
    pub withheld: Option<WithheldAnalysis<T>>,
}

impl<T: Scalar> ScenarioReport<T> {
    pub fn is_complete(&self) -> bool {
        self.transcript.is_complete()
    }
}

pub fn run_scenario<T: Scalar>(config: &ScenarioConfig<T>) -> Result<ScenarioReport<T>> {
    config.validate()?;
    let n = config.senders;
    let inputs = config.resolved_inputs();
    let tele = Teleportation::new(&inputs, config.channel_kind)?;
    let mut parties = parties(n, &config.participation);
    let mut bus = BroadcastBus::default();
    let mut reg = tele.joint().clone();

    let (choices, seed): (Vec<MeasureChoice>, Option<u64>) = match &config.policy {
        OutcomePolicy::Forced(list) => (list.iter().map(|&o| MeasureChoice::Forced(o)).collect(), None),
        OutcomePolicy::Seeded(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            ((0..n).map(|_| MeasureChoice::Sample(rng.random::<f64>())).collect(), Some(*seed))
        }
    };

    let mut probability = T::one();
    let mut zero_branch = None;
    for i in 1..=n {
        let participates = config.participation[i - 1];
        if !participates && config.withheld_model == WithheldModel::TraceOut {
            continue;
        }
        let m = reg.sender_measure(i, choices[i - 1])?;
        parties[i - 1].outcome = Some(m.outcome);
        if !m.collapsed {
            zero_branch = Some(i);
            break;
        }
        probability *= m.probability;
        if participates {
            bus.publish(i, m.outcome)?;
        }
    }

    let mut report = ScenarioReport {
        transcript: tele.run(&OutcomePolicy::Forced(vec![BellOutcome::PhiPlus; n]))?,
        parties,
        joint_fidelity: None,
        per_qubit_fidelity: vec![],
        tally: None,
        vote_basis: None,
        rule_checks: vec![],
        withheld: None,
        bus,
    };

    if let Some(sender) = zero_branch {
        let t = &mut report.transcript;
        *t = blank(t, seed);
        t.outcomes = report.parties[..n].iter().map(|p| p.outcome).collect();
        t.status = RunStatus::ZeroProbabilityBranch { sender };
    } else if report.bus.is_complete(n) {
        let outcomes: Vec<BellOutcome> = (1..=n).filter_map(|i| report.bus.outcome_of(i)).collect();
        let mut t = tele.finish(reg, &outcomes, probability)?;
        t.rng_seed = seed;
        if let Some(s) = &t.final_state {
            report.per_qubit_fidelity = (1..=n)
                .map(|q| s.reduced_density(&[q])?.fidelity_with_pure(&inputs[q - 1].state()))
                .collect::<Result<_>>()?;
        }
        report.joint_fidelity = t.fidelity;
        if config.votes.is_some() {
            report.tally = Some(tally_votes(&t)?);
            // the report carries the count, not who voted what
            t = t.redacted();
            t.final_state = None;
        }
        report.transcript = t;
    } else {
        let withheld = config.withheld();
        let analysis = withheld_participation_state(&inputs, config.channel_kind, &withheld, config.withheld_model)?;
        let t = &mut report.transcript;
        *t = blank(t, seed);
        t.outcomes = (1..=n).map(|i| report.bus.outcome_of(i)).collect();
        t.outcome_probability = probability;
        t.status = RunStatus::Withheld { senders: withheld };
        if config.votes.is_some() {
            *t = t.clone().redacted();
        }
        report.joint_fidelity = Some(analysis.joint_fidelity_corrected);
        report.per_qubit_fidelity = analysis.per_qubit_fidelity_corrected.clone();
        report.withheld = Some(analysis);
    }

    if config.votes.is_some() {
        if !config.conceal_basis {
            report.vote_basis = Some("computational".into());
        }
        if n <= MAX_AVERAGE_SENDERS {
            report.rule_checks = check_voting_rules(config)?;
        }
    }
    Ok(report)
}

/// `t` with everything the receiver would have produced cleared.
fn blank<T: Scalar>(t: &Transcript<T>, seed: Option<u64>) -> Transcript<T> {
    Transcript {
        senders: t.senders,
        channel_kind: t.channel_kind,
        inputs: t.inputs.clone(),
        outcomes: vec![None; t.senders],
        outcome_probability: T::zero(),
        cascade_applied: false,
        correction: None,
        final_state: None,
        fidelity: None,
        rng_seed: seed,
        status: RunStatus::Completed,
    }
}
